//! Bundled film-rating example and the published matrices it is checked
//! against.

use std::fmt::Write as _;

use serde::Serialize;

use crate::attributes::{AttributeOptions, AttributeSummary};
use crate::error::Result;
use crate::interval::{load_dataset, DatasetFormat, IntervalDataset};
use crate::parallel::Execution;
use crate::similarity::{
    fuzzy_numbers, similarity_matrix, RangeSpec, SimilarityMatrix, WeightVector,
};

/// Ten films rated by five critics on a 1-10 scale, as interval cells.
pub const FILMS_CSV: &str = include_str!("../data/films.csv");

pub const SCALE_MIN: f64 = 1.0;
pub const SCALE_MAX: f64 = 10.0;

/// Published similarity between the ten films.
pub const PUBLISHED_FILMS: [[f64; 10]; 10] = [
    [
        1.0000, 0.4830, 0.5527, 0.3993, 0.5900, 0.3867, 0.3747, 0.4444, 0.7182, 0.6377,
    ],
    [
        0.4830, 1.0000, 0.7422, 0.7686, 0.7028, 0.6342, 0.6829, 0.6859, 0.5882, 0.5173,
    ],
    [
        0.5527, 0.7422, 1.0000, 0.8120, 0.9461, 0.6308, 0.5851, 0.7351, 0.4545, 0.3740,
    ],
    [
        0.3993, 0.7686, 0.8120, 1.0000, 0.7755, 0.7633, 0.7211, 0.8305, 0.5881, 0.5222,
    ],
    [
        0.5900, 0.7028, 0.9461, 0.7755, 1.0000, 0.6781, 0.5471, 0.7843, 0.5020, 0.4215,
    ],
    [
        0.3867, 0.6342, 0.6308, 0.7633, 0.6781, 1.0000, 0.8498, 0.7072, 0.6629, 0.6546,
    ],
    [
        0.3747, 0.6829, 0.5851, 0.7211, 0.5471, 0.8498, 1.0000, 0.5836, 0.6559, 0.6865,
    ],
    [
        0.4444, 0.6859, 0.7351, 0.8305, 0.7843, 0.7072, 0.5836, 1.0000, 0.5511, 0.4835,
    ],
    [
        0.7182, 0.5882, 0.4545, 0.5881, 0.5020, 0.6629, 0.6559, 0.5511, 1.0000, 0.9195,
    ],
    [
        0.6377, 0.5173, 0.3740, 0.5222, 0.4215, 0.6546, 0.6865, 0.4835, 0.9195, 1.0000,
    ],
];

/// Published similarity between the five critics.
pub const PUBLISHED_CRITICS: [[f64; 5]; 5] = [
    [1.0000, 0.8635, 0.8069, 0.8925, 0.9151],
    [0.8635, 1.0000, 0.9344, 0.9706, 0.8802],
    [0.8069, 0.9344, 1.0000, 0.9123, 0.8231],
    [0.8925, 0.9706, 0.9123, 1.0000, 0.9088],
    [0.9151, 0.8802, 0.8231, 0.9088, 1.0000],
];

/// Film pairs whose sets are all crisp and so do not depend on the
/// attribute conventions.
pub const CONVENTION_FREE_CELLS: [(&str, &str); 3] = [
    ("Film A", "Film I"),
    ("Film A", "Film J"),
    ("Film I", "Film J"),
];

/// Cells reported individually when they miss the published value by more
/// than this.
pub const REPORT_THRESHOLD: f64 = 0.01;

pub fn films() -> IntervalDataset {
    load_dataset(FILMS_CSV.as_bytes(), DatasetFormat::Csv).expect("bundled film data is valid")
}

pub fn scale_range() -> RangeSpec {
    RangeSpec::Global {
        min: SCALE_MIN,
        max: SCALE_MAX,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellDeviation {
    pub row: String,
    pub col: String,
    pub computed: f64,
    pub published: f64,
    pub deviation: f64,
}

/// Comparison of a computed matrix with a published one over distinct pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixComparison {
    pub max_deviation: f64,
    pub total_deviation: f64,
    /// Every distinct pair, row-major.
    pub cells: Vec<CellDeviation>,
}

impl MatrixComparison {
    pub fn new<const N: usize>(computed: &SimilarityMatrix, published: &[[f64; N]; N]) -> Self {
        let mut cells = Vec::with_capacity(N * (N - 1) / 2);
        for (i, row) in published.iter().enumerate() {
            for (j, &p) in row.iter().enumerate().skip(i + 1) {
                let c = computed.get(i, j);
                cells.push(CellDeviation {
                    row: computed.labels[i].clone(),
                    col: computed.labels[j].clone(),
                    computed: c,
                    published: p,
                    deviation: c - p,
                });
            }
        }
        Self {
            max_deviation: cells.iter().map(|c| c.deviation.abs()).fold(0.0, f64::max),
            total_deviation: cells.iter().map(|c| c.deviation.abs()).sum(),
            cells,
        }
    }

    pub fn exceeding(&self, threshold: f64) -> impl Iterator<Item = &CellDeviation> {
        self.cells
            .iter()
            .filter(move |c| c.deviation.abs() > threshold)
    }

    pub fn cell(&self, a: &str, b: &str) -> Option<&CellDeviation> {
        self.cells
            .iter()
            .find(|c| (c.row == a && c.col == b) || (c.row == b && c.col == a))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantRun {
    pub options: AttributeOptions,
    pub attributes: Vec<(String, AttributeSummary)>,
    pub matrix: SimilarityMatrix,
    pub comparison: MatrixComparison,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticRun {
    pub range: RangeSpec,
    pub matrix: SimilarityMatrix,
    pub comparison: MatrixComparison,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub films: Vec<VariantRun>,
    /// Index into `films` of the run with the smallest total deviation.
    pub best: usize,
    pub critics: Vec<CriticRun>,
}

impl DemoReport {
    pub fn best_run(&self) -> &VariantRun {
        &self.films[self.best]
    }
}

/// Runs the film comparison under each attribute convention and the critic
/// comparison (default conventions) under the scale range and local ranges.
pub fn run_demo(
    variants: &[AttributeOptions],
    weights: &WeightVector,
    exec: Execution,
) -> Result<DemoReport> {
    let data = films();
    let film_sets = data.row_sets();
    let critic_sets = data.transpose().row_sets();

    let variants = if variants.is_empty() {
        vec![AttributeOptions::default()]
    } else {
        variants.to_vec()
    };

    let mut runs = Vec::with_capacity(variants.len());
    for opts in variants {
        let items = fuzzy_numbers(&film_sets, opts, exec)?;
        let matrix = similarity_matrix(&items, weights, scale_range(), exec);
        runs.push(VariantRun {
            options: opts,
            attributes: items
                .iter()
                .map(|f| (f.label().to_string(), *f.attributes()))
                .collect(),
            comparison: MatrixComparison::new(&matrix, &PUBLISHED_FILMS),
            matrix,
        });
    }
    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| {
            a.1.comparison
                .total_deviation
                .total_cmp(&b.1.comparison.total_deviation)
        })
        .map(|(i, _)| i)
        .unwrap_or(0);

    let critic_items = fuzzy_numbers(&critic_sets, AttributeOptions::default(), exec)?;
    let critics = [scale_range(), RangeSpec::Local]
        .into_iter()
        .map(|range| {
            let matrix = similarity_matrix(&critic_items, weights, range, exec);
            CriticRun {
                range,
                comparison: MatrixComparison::new(&matrix, &PUBLISHED_CRITICS),
                matrix,
            }
        })
        .collect();

    Ok(DemoReport {
        films: runs,
        best,
        critics,
    })
}

fn write_matrix(out: &mut String, m: &SimilarityMatrix) {
    let _ = write!(out, "{:>10}", "");
    for l in &m.labels {
        let _ = write!(out, " {l:>9}");
    }
    out.push('\n');
    for (l, row) in m.labels.iter().zip(&m.values) {
        let _ = write!(out, "{l:>10}");
        for v in row {
            let _ = write!(out, " {v:>9.6}");
        }
        out.push('\n');
    }
}

fn write_pair_extremes(out: &mut String, m: &SimilarityMatrix) {
    let ranked = m.ranked_pairs();
    if let (Some(first), Some(last)) = (ranked.first(), ranked.last()) {
        let name =
            |(i, j, v): (usize, usize, f64)| format!("({}, {}) = {v:.6}", m.labels[i], m.labels[j]);
        let _ = writeln!(out, "  most similar:   {}", name(*first));
        if let Some(second) = ranked.get(1) {
            let _ = writeln!(out, "  second:         {}", name(*second));
        }
        let _ = writeln!(out, "  least similar:  {}", name(*last));
    }
}

/// Plain-text report.
pub fn render_text(report: &DemoReport) -> String {
    let mut out = String::new();
    let best = report.best_run();

    let _ = writeln!(out, "Film attributes ({})", best.options);
    let _ = writeln!(
        out,
        "{:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}  five-number summary",
        "", "area", "perimeter", "cx", "cy", "height", "AR"
    );
    for (label, a) in &best.attributes {
        let q = a.quartiles.as_array().map(|v| format!("{v:.6}")).join(", ");
        let _ = writeln!(
            out,
            "{label:>10} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}  ({q})",
            a.area, a.perimeter, a.centroid_x, a.centroid_y, a.height, a.agreement_ratio
        );
    }

    let _ = writeln!(
        out,
        "\nFilm similarity ({}, range {})",
        best.options,
        scale_range()
    );
    write_matrix(&mut out, &best.matrix);
    write_pair_extremes(&mut out, &best.matrix);

    let _ = writeln!(out, "\nDeviation from published film matrix");
    let _ = writeln!(
        out,
        "  {:<50} {:>10} {:>10}",
        "conventions", "max |dev|", "total"
    );
    for (k, run) in report.films.iter().enumerate() {
        let mark = if k == report.best { " <- best" } else { "" };
        let _ = writeln!(
            out,
            "  {:<50} {:>10.6} {:>10.6}{mark}",
            run.options.to_string(),
            run.comparison.max_deviation,
            run.comparison.total_deviation
        );
    }
    let _ = writeln!(out, "\nBest combination: {}", best.options);
    let _ = writeln!(out, "Convention-free cells:");
    for (a, b) in CONVENTION_FREE_CELLS {
        if let Some(c) = best.comparison.cell(a, b) {
            let _ = writeln!(
                out,
                "  ({a}, {b}) computed {:.6} published {:.4} deviation {:+.6}",
                c.computed, c.published, c.deviation
            );
        }
    }
    let over: Vec<_> = best.comparison.exceeding(REPORT_THRESHOLD).collect();
    let _ = writeln!(
        out,
        "Cells deviating by more than {REPORT_THRESHOLD}: {}",
        over.len()
    );
    for c in over {
        let _ = writeln!(
            out,
            "  ({}, {}) computed {:.6} published {:.4} deviation {:+.6}",
            c.row, c.col, c.computed, c.published, c.deviation
        );
    }

    for critic in &report.critics {
        let _ = writeln!(out, "\nCritic similarity (range {})", critic.range);
        write_matrix(&mut out, &critic.matrix);
        write_pair_extremes(&mut out, &critic.matrix);
        let _ = writeln!(
            out,
            "  max |dev| from published {:.6}, total {:.6}",
            critic.comparison.max_deviation, critic.comparison.total_deviation
        );
    }
    out
}
