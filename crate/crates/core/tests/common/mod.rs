//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the crate's curve, attribute or PCA code.

#![allow(dead_code)]

use iaa_core::IntervalSet;
use rand::Rng;

/// Random set: up to `max_n` intervals with endpoints in `[0, 10]`, each
/// collapsed to a point with probability `crisp`.
pub fn random_pairs<R: Rng>(rng: &mut R, max_n: usize, crisp: f64) -> Vec<(f64, f64)> {
    let n = rng.gen_range(1..=max_n);
    (0..n)
        .map(|_| {
            let a: f64 = rng.gen_range(0.0..=10.0);
            if rng.gen_bool(crisp) {
                (a, a)
            } else {
                let b: f64 = rng.gen_range(0.0..=10.0);
                (a.min(b), a.max(b))
            }
        })
        .collect()
}

/// Same, on a coarse grid so that endpoints coincide often.
pub fn random_grid_pairs<R: Rng>(rng: &mut R, max_n: usize, crisp: f64) -> Vec<(f64, f64)> {
    let n = rng.gen_range(1..=max_n);
    (0..n)
        .map(|_| {
            let a = rng.gen_range(0..=20) as f64 / 2.0;
            if rng.gen_bool(crisp) {
                (a, a)
            } else {
                let b = rng.gen_range(0..=20) as f64 / 2.0;
                (a.min(b), a.max(b))
            }
        })
        .collect()
}

pub fn set(label: &str, pairs: &[(f64, f64)]) -> IntervalSet {
    IntervalSet::from_pairs(label, pairs).expect("valid pairs")
}

/// Number of closed intervals containing `x`.
pub fn count_containing(pairs: &[(f64, f64)], x: f64) -> usize {
    pairs.iter().filter(|&&(l, r)| l <= x && x <= r).count()
}

/// Integral of the membership function by the midpoint rule over the cells
/// between consecutive distinct endpoints.
pub fn midpoint_area(pairs: &[(f64, f64)]) -> f64 {
    let mut xs: Vec<f64> = pairs.iter().flat_map(|&(l, r)| [l, r]).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let n = pairs.len() as f64;
    xs.windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            (w[1] - w[0]) * count_containing(pairs, mid) as f64 / n
        })
        .sum()
}

pub type M6 = [[f64; 6]; 6];

pub fn covariance(rows: &[[f64; 6]]) -> M6 {
    let m = rows.len() as f64;
    let mean: [f64; 6] = std::array::from_fn(|k| rows.iter().map(|r| r[k]).sum::<f64>() / m);
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            rows.iter()
                .map(|r| (r[i] - mean[i]) * (r[j] - mean[j]))
                .sum::<f64>()
                / (m - 1.0)
        })
    })
}

fn matmul(a: &M6, b: &M6) -> M6 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..6).map(|k| a[i][k] * b[k][j]).sum()))
}

/// Characteristic polynomial `det(xI - A)` by Faddeev-LeVerrier, highest
/// degree first.
pub fn char_poly(a: &M6) -> [f64; 7] {
    let mut c = [0.0; 7];
    c[0] = 1.0;
    let identity: M6 =
        std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }));
    let mut m = [[0.0; 6]; 6];
    for k in 1..=6 {
        let am = matmul(a, &m);
        m = std::array::from_fn(|i| std::array::from_fn(|j| am[i][j] + c[k - 1] * identity[i][j]));
        let amk = matmul(a, &m);
        let trace: f64 = (0..6).map(|i| amk[i][i]).sum();
        c[k] = -trace / k as f64;
    }
    c
}

fn eval_poly(c: &[f64; 7], x: f64) -> f64 {
    c.iter().fold(0.0, |acc, &v| acc * x + v)
}

/// Largest root of the characteristic polynomial of a symmetric PSD matrix,
/// found by scanning down from the trace for the first sign change and then
/// bisecting.
pub fn largest_eigenvalue(a: &M6) -> f64 {
    let c = char_poly(a);
    let trace: f64 = (0..6).map(|i| a[i][i]).sum();
    let top = trace * 1.001 + 1e-300;
    let steps = 200_000;
    let mut hi = top;
    let mut lo = top;
    for s in 1..=steps {
        let x = top * (1.0 - s as f64 / steps as f64);
        if eval_poly(&c, x) <= 0.0 {
            lo = x;
            break;
        }
        hi = x;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if eval_poly(&c, mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Unit null vector of `A - lambda I` by Gaussian elimination with full
/// pivoting, sign-normalised so the largest component is positive.
#[allow(clippy::needless_range_loop)]
pub fn null_vector(a: &M6, lambda: f64) -> [f64; 6] {
    let mut m: M6 = std::array::from_fn(|i| {
        std::array::from_fn(|j| a[i][j] - if i == j { lambda } else { 0.0 })
    });
    let mut cols: [usize; 6] = std::array::from_fn(|k| k);
    for k in 0..5 {
        let (mut pi, mut pj, mut best) = (k, k, -1.0);
        for i in k..6 {
            for j in k..6 {
                if m[i][j].abs() > best {
                    best = m[i][j].abs();
                    pi = i;
                    pj = j;
                }
            }
        }
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        cols.swap(k, pj);
        for i in k + 1..6 {
            let f = m[i][k] / m[k][k];
            for j in k..6 {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    // last permuted variable is free
    let mut y = [0.0; 6];
    y[5] = 1.0;
    for k in (0..5).rev() {
        let s: f64 = (k + 1..6).map(|j| m[k][j] * y[j]).sum();
        y[k] = -s / m[k][k];
    }
    let mut x = [0.0; 6];
    for (k, &c) in cols.iter().enumerate() {
        x[c] = y[k];
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = x.map(|v| v / norm);
    let lead = x
        .iter()
        .copied()
        .max_by(|p, q| p.abs().total_cmp(&q.abs()))
        .unwrap();
    if lead < 0.0 {
        x = x.map(|v| -v);
    }
    x
}
