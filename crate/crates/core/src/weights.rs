//! Learning feature weights from random interval data.
//!
//! A population of random interval sets is turned into fuzzy numbers, random
//! pairs of them into feature vectors, and the first principal component of
//! those vectors gives the loadings. Repeating the pipeline with derived
//! seeds shows how stable the loadings are.

use std::io::Write;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::attributes::AttributeOptions;
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::parallel::Execution;
use crate::similarity::{
    feature_vector, fuzzy_numbers, resolve_range, FeatureVector, FuzzyNumber, RangeSpec,
    WeightVector, FEATURE_NAMES,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub set_count: usize,
    pub min_intervals: usize,
    pub max_intervals: usize,
    pub value_min: f64,
    pub value_max: f64,
    pub crisp_probability: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            set_count: 500,
            min_intervals: 3,
            max_intervals: 10,
            value_min: 1.0,
            value_max: 10.0,
            crisp_probability: 0.1,
            seed: 1,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.set_count < 2 {
            return Err(Error::Config("set_count must be at least 2".into()));
        }
        if self.min_intervals < 1 || self.min_intervals > self.max_intervals {
            return Err(Error::Config(format!(
                "intervals per set must satisfy 1 <= min <= max, got {}..={}",
                self.min_intervals, self.max_intervals
            )));
        }
        if !(self.value_min.is_finite() && self.value_max.is_finite())
            || self.value_min >= self.value_max
        {
            return Err(Error::Config(format!(
                "value range needs finite min < max, got {}..{}",
                self.value_min, self.value_max
            )));
        }
        if !(0.0..=1.0).contains(&self.crisp_probability) {
            return Err(Error::Config(format!(
                "crisp_probability must be in [0, 1], got {}",
                self.crisp_probability
            )));
        }
        Ok(())
    }

    /// The survey-scale range spanned by generated values.
    pub fn global_range(&self) -> RangeSpec {
        RangeSpec::Global {
            min: self.value_min,
            max: self.value_max,
        }
    }
}

/// Draws `set_count` random interval sets. Each interval orders two uniform
/// draws from the value range and collapses to the first draw with
/// `crisp_probability`.
pub fn generate_population(cfg: &GeneratorConfig) -> Result<Vec<IntervalSet>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.set_count)
        .map(|k| {
            let n = rng.gen_range(cfg.min_intervals..=cfg.max_intervals);
            let intervals = (0..n)
                .map(|_| {
                    let a = rng.gen_range(cfg.value_min..=cfg.value_max);
                    let b = rng.gen_range(cfg.value_min..=cfg.value_max);
                    if rng.gen_bool(cfg.crisp_probability) {
                        Interval::crisp(a)
                    } else {
                        Interval::new(a.min(b), a.max(b))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            IntervalSet::new(format!("set_{}", k + 1), intervals)
        })
        .collect()
}

/// One feature vector per sampled pair of the population.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDataset {
    pub rows: Vec<FeatureVector>,
    pub pairs: Vec<(usize, usize)>,
    pub population: usize,
    pub seed: u64,
    pub range: RangeSpec,
}

/// `k`-th pair `(i, j)`, `i < j`, in row-major order over `n` items.
fn unrank_pair(k: u64, n: u64) -> (usize, usize) {
    let offset = |i: u64| i * (2 * n - i - 1) / 2;
    let (mut lo, mut hi) = (0u64, n - 1);
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if offset(mid) <= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let i = if offset(hi) <= k { hi } else { lo };
    (i as usize, (i + 1 + k - offset(i)) as usize)
}

/// Samples `pair_count` distinct unordered pairs (or takes all of them when
/// there are fewer) and computes their feature vectors.
pub fn build_feature_dataset(
    population: &[FuzzyNumber],
    spec: RangeSpec,
    pair_count: usize,
    seed: u64,
    exec: Execution,
) -> Result<FeatureDataset> {
    if pair_count < 1 {
        return Err(Error::Config("pair_count must be at least 1".into()));
    }
    let n = population.len();
    if n < 2 {
        return Err(Error::Config("population needs at least 2 members".into()));
    }
    let total = (n as u64) * (n as u64 - 1) / 2;
    let pairs: Vec<(usize, usize)> = if pair_count as u64 >= total {
        (0..total).map(|k| unrank_pair(k, n as u64)).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = index::sample(&mut rng, total as usize, pair_count).into_vec();
        picked.sort_unstable();
        picked
            .into_iter()
            .map(|k| unrank_pair(k as u64, n as u64))
            .collect()
    };
    let rows = exec.map_slice(&pairs, |&(i, j)| {
        let (a, b) = (&population[i], &population[j]);
        feature_vector(a, b, resolve_range(a, b, spec))
    });
    Ok(FeatureDataset {
        rows,
        pairs,
        population: n,
        seed,
        range: spec,
    })
}

pub type Matrix6 = [[f64; 6]; 6];

/// Sample covariance (or correlation when `standardize`) of the rows.
/// Zero-variance features get zero rows and columns in the correlation.
pub fn scatter_matrix(rows: &[FeatureVector], standardize: bool) -> Result<Matrix6> {
    let m = rows.len();
    if m < 2 {
        return Err(Error::Degenerate(format!("need at least 2 rows, got {m}")));
    }
    let data: Vec<[f64; 6]> = rows.iter().map(FeatureVector::as_array).collect();
    let mut mean = [0.0; 6];
    for r in &data {
        for (acc, v) in mean.iter_mut().zip(r) {
            *acc += v;
        }
    }
    mean = mean.map(|s| s / m as f64);

    let mut upper = [[0.0; 6]; 6];
    for r in &data {
        let d: [f64; 6] = std::array::from_fn(|k| r[k] - mean[k]);
        for (i, row) in upper.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate().skip(i) {
                *c += d[i] * d[j];
            }
        }
    }
    let mut cov: Matrix6 = std::array::from_fn(|i| {
        std::array::from_fn(|j| upper[i.min(j)][i.max(j)] / (m - 1) as f64)
    });
    if standardize {
        let sd: [f64; 6] = std::array::from_fn(|k| cov[k][k].sqrt());
        for i in 0..6 {
            for j in 0..6 {
                cov[i][j] = if sd[i] > 0.0 && sd[j] > 0.0 {
                    cov[i][j] / (sd[i] * sd[j])
                } else {
                    0.0
                };
            }
        }
    }
    if (0..6).all(|k| cov[k][k] <= 0.0) {
        return Err(Error::Degenerate("every feature has zero variance".into()));
    }
    Ok(cov)
}

fn mat_vec(a: &Matrix6, x: &[f64; 6]) -> [f64; 6] {
    std::array::from_fn(|i| (0..6).map(|k| a[i][k] * x[k]).sum())
}

fn mat_mul(a: &Matrix6, b: &Matrix6) -> Matrix6 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..6).map(|k| a[i][k] * b[k][j]).sum()))
}

fn norm(x: &[f64; 6]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn sign_normalize(mut v: [f64; 6]) -> [f64; 6] {
    let lead = v
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0);
    if lead < 0.0 {
        v = v.map(|x| -x);
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalComponent {
    pub loadings: WeightVector,
    pub eigenvalue: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Relative step size at which power iteration stops.
pub const POWER_TOLERANCE: f64 = 1e-10;
const MAX_POWER_ITERATIONS: usize = 100_000;
const SQUARINGS: usize = 12;

/// Dominant unit eigenvector of a symmetric positive semi-definite matrix.
///
/// A few repeated squarings of the matrix give a starting vector (the
/// largest-norm column of `A^(2^k)`, which always has a component along the
/// dominant direction), then plain power iteration on `A` polishes it.
pub fn dominant_eigenvector(a: &Matrix6) -> Result<PrincipalComponent> {
    let scale = a.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Degenerate(
            "zero matrix has no dominant direction".into(),
        ));
    }
    let mut p: Matrix6 = a.map(|row| row.map(|v| v / scale));
    for _ in 0..SQUARINGS {
        p = mat_mul(&p, &p);
        let s = p.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
        if s == 0.0 {
            break;
        }
        p = p.map(|row| row.map(|v| v / s));
    }
    let column = (0..6)
        .map(|j| std::array::from_fn::<f64, 6, _>(|i| p[i][j]))
        .max_by(|x, y| norm(x).total_cmp(&norm(y)))
        .expect("six columns");
    let mut x = if norm(&column) > 0.0 {
        column.map(|v| v / norm(&column))
    } else {
        [1.0 / 6f64.sqrt(); 6]
    };

    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_POWER_ITERATIONS {
        iterations += 1;
        let y = mat_vec(a, &x);
        let ny = norm(&y);
        if ny == 0.0 {
            return Err(Error::Degenerate(
                "start vector lies in the null space".into(),
            ));
        }
        let mut y = y.map(|v| v / ny);
        if y.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() < 0.0 {
            y = y.map(|v| -v);
        }
        let step = y
            .iter()
            .zip(&x)
            .map(|(p, q)| (p - q).powi(2))
            .sum::<f64>()
            .sqrt();
        x = y;
        if step <= POWER_TOLERANCE {
            converged = true;
            break;
        }
    }
    let x = sign_normalize(x);
    let ax = mat_vec(a, &x);
    let eigenvalue = ax.iter().zip(&x).map(|(p, q)| p * q).sum();
    Ok(PrincipalComponent {
        loadings: WeightVector::normalized(x)?,
        eigenvalue,
        iterations,
        converged,
    })
}

/// First principal component of a feature dataset.
pub fn first_principal_component(
    rows: &[FeatureVector],
    standardize: bool,
) -> Result<PrincipalComponent> {
    dominant_eigenvector(&scatter_matrix(rows, standardize)?)
}

/// `||A x - lambda x||` for a returned component.
pub fn eigen_residual(a: &Matrix6, pc: &PrincipalComponent) -> f64 {
    let x = pc.loadings.as_array();
    let ax = mat_vec(a, &x);
    let r: [f64; 6] = std::array::from_fn(|i| ax[i] - pc.eigenvalue * x[i]);
    norm(&r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnConfig {
    pub generator: GeneratorConfig,
    pub range: RangeSpec,
    pub pair_count: usize,
    pub repeats: usize,
    pub standardize: bool,
    pub attributes: AttributeOptions,
}

impl Default for LearnConfig {
    fn default() -> Self {
        let generator = GeneratorConfig::default();
        Self {
            range: generator.global_range(),
            generator,
            pair_count: 100_000,
            repeats: 10,
            standardize: false,
            attributes: AttributeOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnedWeights {
    pub weights: WeightVector,
    pub runs: Vec<PrincipalComponent>,
    /// Mean |loading| per feature across runs.
    pub mean_abs: [f64; 6],
    /// Sample standard deviation of |loading| per feature across runs.
    pub std_abs: [f64; 6],
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed used by repeat `r` of a run seeded with `seed`.
pub fn repeat_seed(seed: u64, r: usize) -> u64 {
    splitmix64(seed.wrapping_add(r as u64))
}

/// One full pipeline: population, pair features, first component.
pub fn learn_once(cfg: &LearnConfig, seed: u64, exec: Execution) -> Result<PrincipalComponent> {
    let generator = GeneratorConfig {
        seed,
        ..cfg.generator
    };
    let sets = generate_population(&generator)?;
    let population = fuzzy_numbers(&sets, cfg.attributes, exec)?;
    let data = build_feature_dataset(
        &population,
        cfg.range,
        cfg.pair_count,
        splitmix64(seed ^ 0x5eed),
        exec,
    )?;
    first_principal_component(&data.rows, cfg.standardize)
}

/// Runs the pipeline `repeats` times and averages the loadings.
pub fn learn_weights(cfg: &LearnConfig, exec: Execution) -> Result<LearnedWeights> {
    if cfg.repeats < 1 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }
    cfg.generator.validate()?;
    let runs: Vec<PrincipalComponent> = exec
        .map(cfg.repeats, |r| {
            learn_once(cfg, repeat_seed(cfg.generator.seed, r), exec)
        })
        .into_iter()
        .collect::<Result<_>>()?;

    let k = runs.len() as f64;
    let abs: Vec<[f64; 6]> = runs
        .iter()
        .map(|r| r.loadings.as_array().map(f64::abs))
        .collect();
    let mean_abs: [f64; 6] = std::array::from_fn(|f| abs.iter().map(|a| a[f]).sum::<f64>() / k);
    let std_abs: [f64; 6] = std::array::from_fn(|f| {
        if runs.len() < 2 {
            0.0
        } else {
            let ss: f64 = abs.iter().map(|a| (a[f] - mean_abs[f]).powi(2)).sum();
            (ss / (k - 1.0)).sqrt()
        }
    });

    let weights = if runs.len() == 1 {
        runs[0].loadings
    } else {
        let reference = runs[0].loadings.as_array();
        let mut sum = [0.0; 6];
        for r in &runs {
            let v = r.loadings.as_array();
            let dot: f64 = v.iter().zip(&reference).map(|(a, b)| a * b).sum();
            let sign = if dot < 0.0 { -1.0 } else { 1.0 };
            for (s, x) in sum.iter_mut().zip(v) {
                *s += sign * x;
            }
        }
        WeightVector::normalized(sign_normalize(sum))?
    };
    Ok(LearnedWeights {
        weights,
        runs,
        mean_abs,
        std_abs,
    })
}

impl LearnedWeights {
    /// CSV stability report: one row per feature with the final weight, the
    /// mean and spread of |loading|, and every repeat's loading.
    pub fn write_report<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = ["feature", "weight", "mean_abs_loading", "std_abs_loading"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend((1..=self.runs.len()).map(|r| format!("repeat_{r}")));
        w.write_record(&header)?;
        let final_w = self.weights.as_array();
        for (f, name) in FEATURE_NAMES.iter().enumerate() {
            let mut rec = vec![
                name.to_string(),
                final_w[f].to_string(),
                self.mean_abs[f].to_string(),
                self.std_abs[f].to_string(),
            ];
            rec.extend(
                self.runs
                    .iter()
                    .map(|r| r.loadings.as_array()[f].to_string()),
            );
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}
