//! Shape and agreement attributes of a membership curve: area, perimeter,
//! centroid, five-number summary, alpha length and agreement ratio.
//!
//! A few of these have more than one defensible reading. The alternatives are
//! kept as runtime options ([`PerimeterMode`], [`QuartileMethod`],
//! [`AgreementLoop`]) so they can be compared against published values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::curve::MembershipCurve;
use crate::error::{Error, Result};
use crate::interval::IntervalSet;

/// How the last region of a curve enters the perimeter walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerimeterMode {
    /// Every region is walked normally, then the last region's height closes
    /// the outline on the right.
    #[default]
    Closed,
    /// The last region contributes only its height.
    Literal,
}

/// Quartile convention over the `2n` sorted endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuartileMethod {
    /// Median of the lower and upper halves, no interpolation.
    #[default]
    Halves,
    /// Linear interpolation at `(N - 1) p`.
    Interp,
}

/// Lowest level visited by the agreement-ratio loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgreementLoop {
    /// `i = n ..= 2`.
    #[default]
    To2,
    /// `i = n ..= 1`; the `i = 1` term compares against the full span.
    To1,
}

macro_rules! option_enum_str {
    ($ty:ty, $what:literal, $($variant:ident => $name:literal),+) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $(Self::$variant => $name),+ })
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_lowercase().as_str() {
                    $($name => Ok(Self::$variant),)+
                    other => Err(Error::Config(format!(concat!("unknown ", $what, " {:?}"), other))),
                }
            }
        }
    };
}

option_enum_str!(PerimeterMode, "perimeter mode", Closed => "closed", Literal => "literal");
option_enum_str!(QuartileMethod, "quartile method", Halves => "halves", Interp => "interp");
option_enum_str!(AgreementLoop, "agreement loop bound", To2 => "to2", To1 => "to1");

/// The full set of attribute conventions used for one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct AttributeOptions {
    pub perimeter: PerimeterMode,
    pub quartiles: QuartileMethod,
    pub agreement_loop: AgreementLoop,
}

impl AttributeOptions {
    /// All eight combinations, defaults first.
    pub fn all() -> Vec<Self> {
        let mut out = Vec::with_capacity(8);
        for perimeter in [PerimeterMode::Closed, PerimeterMode::Literal] {
            for quartiles in [QuartileMethod::Halves, QuartileMethod::Interp] {
                for agreement_loop in [AgreementLoop::To2, AgreementLoop::To1] {
                    out.push(Self {
                        perimeter,
                        quartiles,
                        agreement_loop,
                    });
                }
            }
        }
        out
    }
}

impl fmt::Display for AttributeOptions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "perimeter={} quartiles={} ar-loop={}",
            self.perimeter, self.quartiles, self.agreement_loop
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumberSummary {
    pub min: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub max: f64,
}

impl FiveNumberSummary {
    pub fn as_array(&self) -> [f64; 5] {
        [self.min, self.q1, self.q2, self.q3, self.max]
    }

    fn from_sorted(points: &[f64], method: QuartileMethod) -> Self {
        debug_assert!(!points.is_empty());
        let n = points.len();
        let (q1, q2, q3) = match method {
            QuartileMethod::Halves => {
                let half = n / 2;
                if n == 1 {
                    (points[0], points[0], points[0])
                } else {
                    (
                        median(&points[..half]),
                        median(points),
                        median(&points[n - half..]),
                    )
                }
            }
            QuartileMethod::Interp => (
                interpolate(points, 0.25),
                interpolate(points, 0.5),
                interpolate(points, 0.75),
            ),
        };
        Self {
            min: points[0],
            q1,
            q2,
            q3,
            max: points[n - 1],
        }
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    (sorted[(n - 1) / 2] + sorted[n / 2]) / 2.0
}

fn interpolate(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Sum of `height * width` over all regions.
pub fn area(curve: &MembershipCurve) -> f64 {
    curve.regions().iter().map(|r| r.height * r.width()).sum()
}

/// Perimeter of the curve outline.
///
/// Regions are walked left to right with the previous height starting at 0.
/// A spike adds `|h - max(prev, h)|`. A positive-width region adds its width
/// (bottom edge) and, if it has height, its width again (top edge) plus the
/// step `|prev - h|` (left edge). Zero-height regions add only their width.
pub fn perimeter(curve: &MembershipCurve, mode: PerimeterMode) -> f64 {
    let regions = curve.regions();
    let last = regions[regions.len() - 1];
    let walked = match mode {
        PerimeterMode::Closed => regions,
        PerimeterMode::Literal => &regions[..regions.len() - 1],
    };
    let mut total = 0.0;
    let mut previous = 0.0_f64;
    for r in walked {
        let width = r.width();
        if width == 0.0 {
            total += (r.height - previous.max(r.height)).abs();
        } else {
            total += width;
            if r.height > 0.0 {
                total += width + (previous - r.height).abs();
            }
        }
        previous = r.height;
    }
    total + last.height
}

/// Height-weighted mean of region edges; each region counts its left and
/// right edge once with mass equal to its height, so a spike counts twice.
pub fn centroid_x(curve: &MembershipCurve) -> Result<f64> {
    let (num, den) = curve.regions().iter().fold((0.0, 0.0), |(n, d), r| {
        (n + r.height * (r.left + r.right), d + 2.0 * r.height)
    });
    if den <= 0.0 {
        return Err(Error::NoPositiveHeight(curve.label().to_string()));
    }
    Ok(num / den)
}

/// Half the mean height of the regions with positive height.
pub fn centroid_y(curve: &MembershipCurve) -> Result<f64> {
    let (sum, count) = curve
        .regions()
        .iter()
        .filter(|r| r.height > 0.0)
        .fold((0.0, 0usize), |(s, c), r| (s + r.height / 2.0, c + 1));
    if count == 0 {
        return Err(Error::NoPositiveHeight(curve.label().to_string()));
    }
    Ok(sum / count as f64)
}

/// Five-number summary of the set's `2n` endpoints.
pub fn quartiles(set: &IntervalSet, method: QuartileMethod) -> FiveNumberSummary {
    FiveNumberSummary::from_sorted(&set.sorted_endpoints(), method)
}

/// Same summary, recovered from the curve alone.
pub fn quartiles_from_curve(curve: &MembershipCurve, method: QuartileMethod) -> FiveNumberSummary {
    FiveNumberSummary::from_sorted(&endpoints_from_curve(curve), method)
}

/// Recovers the sorted endpoint multiset from a curve.
///
/// At a boundary `x` with plateau counts `left`, `right` and point count `p`
/// (the spike's count, or the larger plateau when there is none), intervals
/// opening at `x` account for `p - left`, intervals closing at `x` for
/// `p - right`, and a crisp interval at `x` appears in both. The endpoint
/// multiplicity is therefore `2p - left - right`.
pub fn endpoints_from_curve(curve: &MembershipCurve) -> Vec<f64> {
    struct Boundary {
        x: f64,
        left: i64,
        spike: Option<i64>,
        right: i64,
    }
    let n = curve.n() as f64;
    let level = |h: f64| (h * n).round() as i64;

    let mut bounds: Vec<Boundary> = Vec::new();
    for r in curve.regions() {
        if bounds.last().is_none_or(|b| b.x != r.left) {
            bounds.push(Boundary {
                x: r.left,
                left: 0,
                spike: None,
                right: 0,
            });
        }
        let b = bounds.last_mut().expect("boundary pushed above");
        if r.is_spike() {
            b.spike = Some(level(r.height));
        } else {
            b.right = level(r.height);
            bounds.push(Boundary {
                x: r.right,
                left: level(r.height),
                spike: None,
                right: 0,
            });
        }
    }

    let mut points = Vec::with_capacity(2 * curve.n());
    for b in bounds {
        let p = b.spike.unwrap_or(b.left.max(b.right));
        let mult = 2 * p - b.left - b.right;
        debug_assert!(mult >= 0);
        points.extend(std::iter::repeat_n(b.x, mult.max(0) as usize));
    }
    points
}

/// Total width of regions with height at least `level`. Spikes add nothing.
pub fn alpha_length(curve: &MembershipCurve, level: f64) -> f64 {
    curve
        .regions()
        .iter()
        .filter(|r| r.height >= level)
        .map(|r| r.width())
        .sum()
}

/// Height-weighted average of successive alpha-length ratios.
///
/// A single-interval set agrees with itself and scores 1. Levels whose lower
/// cut has zero length are skipped; if every level is skipped (all-crisp
/// data) the ratio is 0.
pub fn agreement_ratio(set: &IntervalSet, curve: &MembershipCurve, bound: AgreementLoop) -> f64 {
    let n = set.len();
    debug_assert_eq!(n, curve.n(), "curve must be built from the same set");
    if n == 1 {
        return 1.0;
    }
    let lowest = match bound {
        AgreementLoop::To2 => 2,
        AgreementLoop::To1 => 1,
    };
    let nf = n as f64;
    let mut total = 0.0;
    let mut weights = 0.0;
    for i in (lowest..=n).rev() {
        let below = alpha_length(curve, (i - 1) as f64 / nf);
        if below == 0.0 {
            continue;
        }
        let y = i as f64 / nf;
        total += y * (alpha_length(curve, y) / below);
        weights += y;
    }
    if weights > 0.0 {
        total / weights
    } else {
        0.0
    }
}

/// Everything the similarity measure needs from one curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttributeSummary {
    pub area: f64,
    pub perimeter: f64,
    pub centroid_x: f64,
    pub centroid_y: f64,
    pub quartiles: FiveNumberSummary,
    pub height: f64,
    pub agreement_ratio: f64,
}

impl AttributeSummary {
    pub fn compute(
        set: &IntervalSet,
        curve: &MembershipCurve,
        opts: AttributeOptions,
    ) -> Result<Self> {
        Ok(Self {
            area: area(curve),
            perimeter: perimeter(curve, opts.perimeter),
            centroid_x: centroid_x(curve)?,
            centroid_y: centroid_y(curve)?,
            quartiles: quartiles(set, opts.quartiles),
            height: curve.height(),
            agreement_ratio: agreement_ratio(set, curve, opts.agreement_loop),
        })
    }
}
