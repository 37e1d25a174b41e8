//! Weighted similarity between two aggregated fuzzy numbers.
//!
//! Six normalised difference features (quartile distance, centroid distance,
//! area, height, perimeter and agreement-ratio differences) are combined as
//! `S = 1 - sum(w_i^2 * f_i)`. With unit-norm weights and every feature in
//! `[0, 1]`, `S` stays in `[0, 1]`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::attributes::{AttributeOptions, AttributeSummary};
use crate::curve::{build_curve, MembershipCurve};
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::parallel::Execution;

/// An interval set together with its curve and precomputed attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyNumber {
    set: IntervalSet,
    curve: MembershipCurve,
    attributes: AttributeSummary,
}

impl FuzzyNumber {
    pub fn new(set: IntervalSet, opts: AttributeOptions) -> Result<Self> {
        let curve = build_curve(&set);
        let attributes = AttributeSummary::compute(&set, &curve, opts)?;
        Ok(Self {
            set,
            curve,
            attributes,
        })
    }

    pub fn label(&self) -> &str {
        self.set.label()
    }

    pub fn set(&self) -> &IntervalSet {
        &self.set
    }

    pub fn curve(&self) -> &MembershipCurve {
        &self.curve
    }

    pub fn attributes(&self) -> &AttributeSummary {
        &self.attributes
    }

    pub fn support(&self) -> (f64, f64) {
        self.curve.support()
    }
}

/// Builds fuzzy numbers for many sets.
pub fn fuzzy_numbers(
    sets: &[IntervalSet],
    opts: AttributeOptions,
    exec: Execution,
) -> Result<Vec<FuzzyNumber>> {
    exec.map_slice(sets, |s| FuzzyNumber::new(s.clone(), opts))
        .into_iter()
        .collect()
}

/// Normalising span for the two distance features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RangeSpec {
    /// Known scale bounds, e.g. a 1-10 survey.
    Global { min: f64, max: f64 },
    /// Span of the union of both supports.
    Local,
}

impl RangeSpec {
    pub fn global(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || max <= min {
            return Err(Error::Config(format!(
                "global range needs finite min < max, got {min}..{max}"
            )));
        }
        Ok(Self::Global { min, max })
    }
}

impl fmt::Display for RangeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Global { min, max } => write!(f, "global:{min}:{max}"),
            Self::Local => f.write_str("local"),
        }
    }
}

impl FromStr for RangeSpec {
    type Err = Error;

    /// `local` or `global:MIN:MAX`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("local") {
            return Ok(Self::Local);
        }
        let bad = || {
            Error::Config(format!(
                "range must be `local` or `global:MIN:MAX`, got {s:?}"
            ))
        };
        let rest = s
            .strip_prefix("global:")
            .or_else(|| s.strip_prefix("GLOBAL:"))
            .ok_or_else(bad)?;
        let (lo, hi) = rest.split_once(':').ok_or_else(bad)?;
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        Self::global(lo, hi)
    }
}

/// Range used to normalise the distance features of `a` against `b`.
pub fn resolve_range(a: &FuzzyNumber, b: &FuzzyNumber, spec: RangeSpec) -> f64 {
    match spec {
        RangeSpec::Global { min, max } => max - min,
        RangeSpec::Local => {
            let (a_lo, a_hi) = a.support();
            let (b_lo, b_hi) = b.support();
            a_hi.max(b_hi) - a_lo.min(b_lo)
        }
    }
}

/// The six difference features, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureVector {
    pub quartile_distance: f64,
    pub centroid_distance: f64,
    pub area_difference: f64,
    pub height_difference: f64,
    pub perimeter_difference: f64,
    pub agreement_difference: f64,
}

pub const FEATURE_NAMES: [&str; 6] = [
    "quartile_distance",
    "centroid_distance",
    "area_difference",
    "height_difference",
    "perimeter_difference",
    "agreement_difference",
];

impl FeatureVector {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.quartile_distance,
            self.centroid_distance,
            self.area_difference,
            self.height_difference,
            self.perimeter_difference,
            self.agreement_difference,
        ]
    }

    pub fn from_array(f: [f64; 6]) -> Self {
        Self {
            quartile_distance: f[0],
            centroid_distance: f[1],
            area_difference: f[2],
            height_difference: f[3],
            perimeter_difference: f[4],
            agreement_difference: f[5],
        }
    }
}

fn relative_difference(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m > 0.0 {
        (a - b).abs() / m
    } else {
        0.0
    }
}

/// Feature vector of a pair under an already resolved `range`.
///
/// A zero range (two identical point supports) zeroes the quartile and
/// centroid features; two zero areas give a zero area feature.
pub fn feature_vector(a: &FuzzyNumber, b: &FuzzyNumber, range: f64) -> FeatureVector {
    let (x, y) = (a.attributes(), b.attributes());
    let (quartile_distance, centroid_distance) = if range > 0.0 {
        let qa = x.quartiles.as_array();
        let qb = y.quartiles.as_array();
        let q: f64 = qa.iter().zip(&qb).map(|(p, q)| (p - q).abs()).sum();
        let dx = x.centroid_x - y.centroid_x;
        let dy = x.centroid_y - y.centroid_y;
        let c = (dx * dx + dy * dy).sqrt() / (range * range + 0.25).sqrt();
        ((q / (5.0 * range)).min(1.0), c.min(1.0))
    } else {
        (0.0, 0.0)
    };
    FeatureVector {
        quartile_distance,
        centroid_distance,
        area_difference: relative_difference(x.area, y.area),
        height_difference: (x.height - y.height).abs(),
        perimeter_difference: relative_difference(x.perimeter, y.perimeter),
        agreement_difference: (x.agreement_ratio - y.agreement_ratio).abs(),
    }
}

/// Unit-norm loadings, one per feature. Only their squares matter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightVector([f64; 6]);

impl WeightVector {
    /// First-principal-component loadings learned on random interval data.
    pub const DEFAULT: WeightVector = WeightVector([
        0.320726, -0.509757, 0.100985, -0.461649, 0.444451, -0.465218,
    ]);

    pub const NORM_TOLERANCE: f64 = 1e-6;

    pub fn new(w: [f64; 6]) -> Result<Self> {
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("weights must be finite".into()));
        }
        let sq: f64 = w.iter().map(|v| v * v).sum();
        if (sq - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::Config(format!(
                "sum of squared weights is {sq}, expected 1 (tolerance {})",
                Self::NORM_TOLERANCE
            )));
        }
        Ok(Self(w))
    }

    /// Scales `w` to unit norm.
    pub fn normalized(w: [f64; 6]) -> Result<Self> {
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Degenerate(
                "cannot normalise a zero weight vector".into(),
            ));
        }
        Ok(Self(w.map(|v| v / norm)))
    }

    pub fn as_array(&self) -> [f64; 6] {
        self.0
    }

    pub fn squared(&self) -> [f64; 6] {
        self.0.map(|v| v * v)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Bare([f64; 6]),
            Wrapped { weights: [f64; 6] },
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| {
            Error::Config(format!(
                "weight file must hold 6 numbers or {{\"weights\": [...]}}: {e}"
            ))
        })?;
        match raw {
            Raw::Bare(w) | Raw::Wrapped { weights: w } => Self::new(w),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "features": FEATURE_NAMES, "weights": self.0 })
    }
}

impl Default for WeightVector {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// `1 - sum(w_i^2 f_i)` for a precomputed feature vector.
pub fn combine(features: &FeatureVector, weights: &WeightVector) -> f64 {
    let f = features.as_array();
    let s: f64 = weights.squared().iter().zip(&f).map(|(w, f)| w * f).sum();
    (1.0 - s).clamp(0.0, 1.0)
}

pub fn similarity(
    a: &FuzzyNumber,
    b: &FuzzyNumber,
    weights: &WeightVector,
    spec: RangeSpec,
) -> f64 {
    let range = resolve_range(a, b, spec);
    combine(&feature_vector(a, b, range), weights)
}

/// Labelled symmetric matrix of pairwise similarities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Value for a pair of labels.
    pub fn by_label(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.get(self.index_of(a)?, self.index_of(b)?))
    }

    /// Distinct pairs `(i, j, value)` with `i < j`, sorted by value descending.
    pub fn ranked_pairs(&self) -> Vec<(usize, usize, f64)> {
        let n = self.len();
        let mut pairs: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, self.get(i, j)))
            .collect();
        pairs.sort_by(|a, b| b.2.total_cmp(&a.2));
        pairs
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![String::new()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        for (label, row) in self.labels.iter().zip(&self.values) {
            let mut rec = vec![label.clone()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Similarity of every pair of items. Each distinct pair is evaluated once
/// and mirrored; the diagonal is exactly 1.
pub fn similarity_matrix(
    items: &[FuzzyNumber],
    weights: &WeightVector,
    spec: RangeSpec,
    exec: Execution,
) -> SimilarityMatrix {
    let n = items.len();
    let upper: Vec<Vec<f64>> = exec.map(n, |i| {
        (i + 1..n)
            .map(|j| similarity(&items[i], &items[j], weights, spec))
            .collect()
    });
    let mut values = vec![vec![1.0; n]; n];
    for (i, row) in upper.into_iter().enumerate() {
        for (k, v) in row.into_iter().enumerate() {
            let j = i + 1 + k;
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    SimilarityMatrix {
        labels: items.iter().map(|f| f.label().to_string()).collect(),
        values,
    }
}
