//! Piecewise-constant membership curves built from interval sets.
//!
//! The membership of `x` is the fraction of source intervals (closed) that
//! contain it. The curve is stored as an ordered list of constant-height
//! regions tiling `[min left, max right]`; zero-height regions fill gaps and
//! zero-width "spike" regions carry point memberships that differ from both
//! neighbouring plateaus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::IntervalSet;

/// One constant piece of a membership curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Region {
    pub left: f64,
    pub right: f64,
    pub height: f64,
}

impl Region {
    pub fn new(left: f64, right: f64, height: f64) -> Self {
        Self {
            left,
            right,
            height,
        }
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    pub fn is_spike(&self) -> bool {
        self.left == self.right
    }
}

impl From<[f64; 3]> for Region {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl From<Region> for [f64; 3] {
    fn from(r: Region) -> Self {
        [r.left, r.right, r.height]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve", into = "RawCurve")]
pub struct MembershipCurve {
    label: String,
    n: usize,
    regions: Vec<Region>,
}

#[derive(Serialize, Deserialize)]
struct RawCurve {
    label: String,
    n: usize,
    regions: Vec<Region>,
}

impl TryFrom<RawCurve> for MembershipCurve {
    type Error = Error;

    fn try_from(raw: RawCurve) -> Result<Self> {
        Self::from_regions(raw.label, raw.n, raw.regions)
    }
}

impl From<MembershipCurve> for RawCurve {
    fn from(c: MembershipCurve) -> Self {
        Self {
            label: c.label,
            n: c.n,
            regions: c.regions,
        }
    }
}

impl MembershipCurve {
    /// Builds the canonical curve of `set`.
    pub fn from_set(set: &IntervalSet) -> Self {
        build_curve(set)
    }

    /// Rebuilds a curve from a stored region list, checking that the regions
    /// tile a contiguous span with heights that are multiples of `1/n`.
    pub fn from_regions(label: impl Into<String>, n: usize, regions: Vec<Region>) -> Result<Self> {
        let label = label.into();
        if n == 0 {
            return Err(Error::InvalidCurve(
                "source count must be at least 1".into(),
            ));
        }
        if regions.is_empty() {
            return Err(Error::InvalidCurve(format!(
                "curve {label:?} has no regions"
            )));
        }
        for (k, r) in regions.iter().enumerate() {
            if !(r.left.is_finite() && r.right.is_finite() && r.left <= r.right) {
                return Err(Error::InvalidCurve(format!("region {k} has bad bounds")));
            }
            let scaled = r.height * n as f64;
            if !(0.0..=1.0).contains(&r.height) || (scaled - scaled.round()).abs() > 1e-9 {
                return Err(Error::InvalidCurve(format!(
                    "region {k} height {} is not a multiple of 1/{n}",
                    r.height
                )));
            }
        }
        for (k, pair) in regions.windows(2).enumerate() {
            if pair[0].right != pair[1].left {
                return Err(Error::InvalidCurve(format!(
                    "regions {k} and {} are not contiguous",
                    k + 1
                )));
            }
        }
        if regions.iter().all(|r| r.height <= 0.0) {
            return Err(Error::NoPositiveHeight(label));
        }
        Ok(Self { label, n, regions })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of source intervals the curve was built from.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    /// Maximum membership degree over all regions.
    pub fn height(&self) -> f64 {
        self.regions.iter().map(|r| r.height).fold(0.0, f64::max)
    }

    /// `(first region's left, last region's right)`.
    pub fn support(&self) -> (f64, f64) {
        (
            self.regions[0].left,
            self.regions[self.regions.len() - 1].right,
        )
    }

    /// Membership read back from the region list. A spike at `x` wins;
    /// otherwise `x` on a shared boundary takes the taller neighbour, which is
    /// the closed-interval point membership.
    pub fn membership(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        let mut best = 0.0_f64;
        for r in &self.regions {
            if r.left > x {
                break;
            }
            if x <= r.right {
                if r.is_spike() {
                    return r.height;
                }
                best = best.max(r.height);
            }
        }
        best
    }
}

/// Number of intervals in `set` containing `x`.
pub fn membership_count(set: &IntervalSet, x: f64) -> usize {
    set.iter().filter(|iv| iv.contains(x)).count()
}

/// Fraction of intervals in `set` containing `x`.
pub fn membership_at(set: &IntervalSet, x: f64) -> f64 {
    membership_count(set, x) as f64 / set.len() as f64
}

/// Builds the canonical membership curve of `set`.
///
/// Open segments between consecutive distinct endpoints take the count of
/// intervals spanning them; each endpoint takes its point count. An endpoint
/// whose count equals an adjacent segment's is absorbed (left first);
/// otherwise it becomes a spike. Adjacent segments of equal height with no
/// spike between them are merged.
pub fn build_curve(set: &IntervalSet) -> MembershipCurve {
    let n = set.len();
    let mut lefts: Vec<f64> = set.iter().map(|iv| iv.left()).collect();
    let mut rights: Vec<f64> = set.iter().map(|iv| iv.right()).collect();
    lefts.sort_by(f64::total_cmp);
    rights.sort_by(f64::total_cmp);

    let mut breaks = set.sorted_endpoints();
    breaks.dedup();

    let started = |x: f64, inclusive: bool| {
        lefts.partition_point(|&l| l <= x)
            - rights.partition_point(|&r| if inclusive { r < x } else { r <= x })
    };
    // intervals with l <= x <= r
    let point: Vec<usize> = breaks.iter().map(|&x| started(x, true)).collect();
    // intervals with l <= x_k and r > x_k, i.e. spanning (x_k, x_{k+1})
    let segment: Vec<usize> = breaks[..breaks.len() - 1]
        .iter()
        .map(|&x| started(x, false))
        .collect();

    let mut out: Vec<(f64, f64, usize)> = Vec::with_capacity(2 * breaks.len());
    for (k, &x) in breaks.iter().enumerate() {
        let left_seg = k.checked_sub(1).map(|j| segment[j]);
        let right_seg = segment.get(k).copied();
        let spike = left_seg != Some(point[k]) && right_seg != Some(point[k]);
        if spike {
            out.push((x, x, point[k]));
        }
        if let Some(count) = right_seg {
            let next = breaks[k + 1];
            match out.last_mut() {
                Some(last) if !spike && last.0 < last.1 && last.2 == count => last.1 = next,
                _ => out.push((x, next, count)),
            }
        }
    }

    let regions = out
        .into_iter()
        .map(|(l, r, c)| Region::new(l, r, c as f64 / n as f64))
        .collect();
    MembershipCurve {
        label: set.label().to_string(),
        n,
        regions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pairs: &[(f64, f64)]) -> IntervalSet {
        IntervalSet::from_pairs("s", pairs).unwrap()
    }

    fn a1() -> IntervalSet {
        set(&[(1.0, 2.0), (3.0, 4.0), (3.0, 6.0), (4.0, 4.0)])
    }

    fn triples(c: &MembershipCurve) -> Vec<(f64, f64, f64)> {
        c.regions()
            .iter()
            .map(|r| (r.left, r.right, r.height))
            .collect()
    }

    #[test]
    fn membership_counts() {
        let s = a1();
        assert_eq!(membership_at(&s, 3.5), 0.5);
        assert_eq!(membership_at(&s, 0.0), 0.0);
        assert_eq!(membership_at(&s, 4.0), 0.75);
        assert_eq!(membership_count(&s, 4.0), 3);
    }

    #[test]
    fn worked_example_region_list() {
        let c = build_curve(&a1());
        assert_eq!(
            triples(&c),
            vec![
                (1.0, 2.0, 0.25),
                (2.0, 3.0, 0.0),
                (3.0, 4.0, 0.5),
                (4.0, 4.0, 0.75),
                (4.0, 6.0, 0.25),
            ]
        );
        assert_eq!(c.height(), 0.75);
        assert_eq!(c.support(), (1.0, 6.0));
    }

    #[test]
    fn single_crisp_interval_is_one_spike() {
        let c = build_curve(&set(&[(1.0, 1.0)]));
        assert_eq!(triples(&c), vec![(1.0, 1.0, 1.0)]);
        assert_eq!(c.height(), 1.0);
        let c = build_curve(&set(&[(4.0, 4.0)]));
        assert_eq!(c.support(), (4.0, 4.0));
    }

    #[test]
    fn touching_intervals_spike_at_contact() {
        let c = build_curve(&set(&[(1.0, 2.0), (2.0, 3.0)]));
        assert_eq!(
            triples(&c),
            vec![(1.0, 2.0, 0.5), (2.0, 2.0, 1.0), (2.0, 3.0, 0.5)]
        );
    }

    #[test]
    fn film_heights_and_supports() {
        let b = set(&[(5.0, 6.0), (6.0, 7.0), (10.0, 10.0), (3.0, 4.0), (5.0, 5.0)]);
        assert_eq!(build_curve(&b).height(), 0.4);
        let h = set(&[(1.5, 6.5), (3.0, 10.0), (1.0, 10.0), (2.0, 9.3), (8.0, 8.8)]);
        assert_eq!(build_curve(&h).support(), (1.0, 10.0));
        assert_eq!(build_curve(&set(&[(0.0, 3.0)])).height(), 1.0);
    }

    #[test]
    fn plateaus_and_boundaries() {
        // an endpoint always changes the count on one side or spikes, so
        // equal neighbouring plateaus are always split by a spike
        let c = build_curve(&set(&[(0.0, 2.0), (1.0, 3.0), (1.0, 3.0)]));
        assert_eq!(
            triples(&c),
            vec![
                (0.0, 1.0, 1.0 / 3.0),
                (1.0, 2.0, 1.0),
                (2.0, 3.0, 2.0 / 3.0)
            ]
        );
        let c = build_curve(&set(&[(0.0, 1.0), (1.0, 2.0), (0.0, 2.0)]));
        assert_eq!(
            triples(&c),
            vec![
                (0.0, 1.0, 2.0 / 3.0),
                (1.0, 1.0, 1.0),
                (1.0, 2.0, 2.0 / 3.0)
            ]
        );
    }

    #[test]
    fn curve_membership_matches_direct_count() {
        let s = a1();
        let c = build_curve(&s);
        for x in [0.0, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 7.0] {
            assert_eq!(c.membership(x), membership_at(&s, x), "x = {x}");
        }
    }

    #[test]
    fn json_shape_and_validation() {
        let c = build_curve(&a1());
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["n"], 4);
        assert_eq!(v["regions"][3], serde_json::json!([4.0, 4.0, 0.75]));
        let back: MembershipCurve = serde_json::from_value(v).unwrap();
        assert_eq!(back, c);

        let gap = r#"{"label":"x","n":2,"regions":[[0,1,0.5],[2,3,0.5]]}"#;
        assert!(serde_json::from_str::<MembershipCurve>(gap).is_err());
        let off_grid = r#"{"label":"x","n":2,"regions":[[0,1,0.3]]}"#;
        assert!(serde_json::from_str::<MembershipCurve>(off_grid).is_err());
        let flat = r#"{"label":"x","n":2,"regions":[[0,1,0.0]]}"#;
        assert!(serde_json::from_str::<MembershipCurve>(flat).is_err());
    }
}
