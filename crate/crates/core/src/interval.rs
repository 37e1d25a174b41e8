//! Interval-valued datasets: single scores as closed ranges, labelled sets of
//! them, and complete items x sources grids.
//!
//! A cell is written `[l,r]`, `l:r`, or a bare number `v` (shorthand for
//! `[v,v]`). CSV files should use the `l:r` form so cells stay comma free.

use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed score range `[left, right]`. `left == right` is a crisp score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    left: f64,
    right: f64,
}

impl Interval {
    pub fn new(left: f64, right: f64) -> Result<Self> {
        if !left.is_finite() || !right.is_finite() {
            return Err(Error::InvalidInterval {
                left,
                right,
                reason: "endpoints must be finite",
            });
        }
        if left > right {
            return Err(Error::InvalidInterval {
                left,
                right,
                reason: "left endpoint exceeds right endpoint",
            });
        }
        Ok(Self { left, right })
    }

    pub fn crisp(value: f64) -> Result<Self> {
        Self::new(value, value)
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn right(&self) -> f64 {
        self.right
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    pub fn is_crisp(&self) -> bool {
        self.left == self.right
    }

    /// Closed containment: both endpoints belong to the interval.
    pub fn contains(&self, x: f64) -> bool {
        self.left <= x && x <= self.right
    }

    /// Maps both endpoints through `f`, reordering when `f` is decreasing.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let (a, b) = (f(self.left), f(self.right));
        Self::new(a.min(b), a.max(b))
    }

    /// The comma-free `l:r` cell form used in CSV output.
    pub fn to_cell(&self) -> String {
        format!("{}:{}", self.left, self.right)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.left, self.right)
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(value: [f64; 2]) -> Result<Self> {
        Self::new(value[0], value[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(value: Interval) -> Self {
        [value.left, value.right]
    }
}

impl FromStr for Interval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_interval(s)
    }
}

/// Parses one cell in `[l,r]`, `l:r` or bare-number form.
pub fn parse_interval(text: &str) -> Result<Interval> {
    let parse_err = |reason: &str| Error::Parse {
        cell: text.to_string(),
        reason: reason.to_string(),
    };
    let number = |s: &str| -> Result<f64> {
        let s = s.trim();
        if s.is_empty() {
            return Err(parse_err("missing value"));
        }
        let v: f64 = s.parse().map_err(|_| parse_err("not a number"))?;
        if !v.is_finite() {
            return Err(parse_err("value is not finite"));
        }
        Ok(v)
    };

    let t = text.trim();
    if t.is_empty() {
        return Err(parse_err("empty cell"));
    }
    if let Some(rest) = t.strip_prefix('[') {
        let inner = rest
            .strip_suffix(']')
            .ok_or_else(|| parse_err("missing closing ']'"))?;
        let (l, r) = inner
            .split_once(',')
            .ok_or_else(|| parse_err("expected `[l,r]`"))?;
        return Interval::new(number(l)?, number(r)?);
    }
    if let Some((l, r)) = t.split_once(':') {
        return Interval::new(number(l)?, number(r)?);
    }
    Interval::crisp(number(t)?)
}

/// A labelled, non-empty collection of intervals from `n` sources.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    label: String,
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn new(label: impl Into<String>, intervals: Vec<Interval>) -> Result<Self> {
        let label = label.into();
        if intervals.is_empty() {
            return Err(Error::Ingest(format!("interval set {label:?} is empty")));
        }
        Ok(Self { label, intervals })
    }

    /// Convenience constructor from `(left, right)` pairs.
    pub fn from_pairs(label: impl Into<String>, pairs: &[(f64, f64)]) -> Result<Self> {
        let intervals = pairs
            .iter()
            .map(|&(l, r)| Interval::new(l, r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(label, intervals)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    /// Number of source intervals, `n`.
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.intervals.iter()
    }

    /// All `2n` endpoint values, sorted ascending.
    pub fn sorted_endpoints(&self) -> Vec<f64> {
        let mut points: Vec<f64> = self
            .intervals
            .iter()
            .flat_map(|iv| [iv.left, iv.right])
            .collect();
        points.sort_by(f64::total_cmp);
        points
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// Input file formats for [`load_dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    Csv,
    Json,
}

impl DatasetFormat {
    /// Guesses the format from a file extension; anything but `.json` is CSV.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Self::Json,
            _ => Self::Csv,
        }
    }
}

impl FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown dataset format {other:?}"))),
        }
    }
}

/// A complete grid of intervals: one per (item, source) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalDataset {
    item_labels: Vec<String>,
    source_labels: Vec<String>,
    // row-major, item x source
    cells: Vec<Interval>,
}

impl IntervalDataset {
    pub fn new(
        item_labels: Vec<String>,
        source_labels: Vec<String>,
        cells: Vec<Interval>,
    ) -> Result<Self> {
        if item_labels.is_empty() || source_labels.is_empty() {
            return Err(Error::Ingest("dataset has no items or no sources".into()));
        }
        if cells.len() != item_labels.len() * source_labels.len() {
            return Err(Error::Ingest(format!(
                "expected {} cells for {} items x {} sources, got {}",
                item_labels.len() * source_labels.len(),
                item_labels.len(),
                source_labels.len(),
                cells.len()
            )));
        }
        check_labels("item", &item_labels)?;
        check_labels("source", &source_labels)?;
        Ok(Self {
            item_labels,
            source_labels,
            cells,
        })
    }

    pub fn item_labels(&self) -> &[String] {
        &self.item_labels
    }

    pub fn source_labels(&self) -> &[String] {
        &self.source_labels
    }

    pub fn n_items(&self) -> usize {
        self.item_labels.len()
    }

    pub fn n_sources(&self) -> usize {
        self.source_labels.len()
    }

    pub fn get(&self, item: usize, source: usize) -> Option<Interval> {
        if item < self.n_items() && source < self.n_sources() {
            Some(self.cells[item * self.n_sources() + source])
        } else {
            None
        }
    }

    /// Swaps items and sources.
    pub fn transpose(&self) -> Self {
        let (rows, cols) = (self.n_items(), self.n_sources());
        let cells = (0..cols)
            .flat_map(|c| (0..rows).map(move |r| (r, c)))
            .map(|(r, c)| self.cells[r * cols + c])
            .collect();
        Self {
            item_labels: self.source_labels.clone(),
            source_labels: self.item_labels.clone(),
            cells,
        }
    }

    /// The interval set of one item, labelled with the item label.
    pub fn row_set(&self, item: usize) -> Result<IntervalSet> {
        if item >= self.n_items() {
            return Err(Error::OutOfRange {
                index: item,
                len: self.n_items(),
            });
        }
        let cols = self.n_sources();
        IntervalSet::new(
            self.item_labels[item].clone(),
            self.cells[item * cols..(item + 1) * cols].to_vec(),
        )
    }

    /// Every row as an interval set, in item order.
    pub fn row_sets(&self) -> Vec<IntervalSet> {
        (0..self.n_items())
            .map(|i| self.row_set(i).expect("index in range"))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().from_writer(writer);
        let mut header = vec![String::new()];
        header.extend(self.source_labels.iter().cloned());
        w.write_record(&header)?;
        for (i, label) in self.item_labels.iter().enumerate() {
            let mut record = vec![label.clone()];
            let cols = self.n_sources();
            record.extend(
                self.cells[i * cols..(i + 1) * cols]
                    .iter()
                    .map(Interval::to_cell),
            );
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cols = self.n_sources();
        let items: Vec<JsonItem> = self
            .item_labels
            .iter()
            .enumerate()
            .map(|(i, label)| JsonItem {
                label: label.clone(),
                intervals: self.cells[i * cols..(i + 1) * cols].to_vec(),
            })
            .collect();
        serde_json::to_value(JsonDataset {
            items,
            sources: Some(self.source_labels.clone()),
        })
        .expect("dataset serializes")
    }
}

fn check_labels(kind: &str, labels: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for label in labels {
        if label.trim().is_empty() {
            return Err(Error::Ingest(format!("empty {kind} label")));
        }
        if !seen.insert(label.as_str()) {
            return Err(Error::Ingest(format!("duplicate {kind} label {label:?}")));
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct JsonItem {
    label: String,
    intervals: Vec<Interval>,
}

#[derive(Serialize, Deserialize)]
struct JsonDataset {
    items: Vec<JsonItem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sources: Option<Vec<String>>,
}

/// Reads a dataset in the given format.
pub fn load_dataset<R: Read>(reader: R, format: DatasetFormat) -> Result<IntervalDataset> {
    match format {
        DatasetFormat::Csv => load_csv(reader),
        DatasetFormat::Json => load_json(reader),
    }
}

/// Reads a dataset from a file, picking the format from its extension.
pub fn load_dataset_path(path: &std::path::Path) -> Result<IntervalDataset> {
    let file = std::fs::File::open(path)?;
    load_dataset(
        std::io::BufReader::new(file),
        DatasetFormat::from_path(path),
    )
}

fn load_csv<R: Read>(reader: R) -> Result<IntervalDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let rows: Vec<Vec<String>> = rdr
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<_, _>>()?;
    let rows: Vec<Vec<String>> = rows
        .into_iter()
        .filter(|r| !r.iter().all(|c| c.is_empty()))
        .collect();
    if rows.is_empty() {
        return Err(Error::Ingest("empty file".into()));
    }

    // The corner cell may be a label or empty, so it only decides for
    // single-column files.
    let first = &rows[0];
    let has_header = first[0].is_empty()
        || first[1..].iter().any(|c| parse_interval(c).is_err())
        || (first.len() == 1 && parse_interval(&first[0]).is_err());
    let data = if has_header { &rows[1..] } else { &rows[..] };
    if data.is_empty() {
        return Err(Error::Ingest("file has a header but no data rows".into()));
    }
    let has_label_col = data.iter().any(|r| parse_interval(&r[0]).is_err());
    let skip = usize::from(has_label_col);

    let width = data[0].len();
    let n_sources = width.saturating_sub(skip);
    if n_sources == 0 {
        return Err(Error::Ingest("no interval columns".into()));
    }
    let source_labels: Vec<String> = if has_header {
        let header = &rows[0];
        if header.len() != width {
            return Err(Error::Ingest(format!(
                "header has {} columns, data rows have {width}",
                header.len()
            )));
        }
        header[skip..].to_vec()
    } else {
        (1..=n_sources).map(|k| format!("source_{k}")).collect()
    };

    let mut item_labels = Vec::with_capacity(data.len());
    let mut cells = Vec::with_capacity(data.len() * n_sources);
    for (k, row) in data.iter().enumerate() {
        let line = k + 1 + usize::from(has_header);
        if row.len() != width {
            return Err(Error::Ingest(format!(
                "row {line} has {} columns, expected {width}",
                row.len()
            )));
        }
        item_labels.push(if has_label_col {
            row[0].clone()
        } else {
            format!("item_{}", k + 1)
        });
        for (j, cell) in row[skip..].iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::Ingest(format!(
                    "missing cell at row {line} ({:?}), column {:?}",
                    item_labels[k], source_labels[j]
                )));
            }
            let iv = parse_interval(cell).map_err(|e| {
                Error::Ingest(format!(
                    "row {line} ({:?}), column {:?}: {e}",
                    item_labels[k], source_labels[j]
                ))
            })?;
            cells.push(iv);
        }
    }
    IntervalDataset::new(item_labels, source_labels, cells)
}

fn load_json<R: Read>(reader: R) -> Result<IntervalDataset> {
    let parsed: JsonDataset = serde_json::from_reader(reader)
        .map_err(|e| Error::Ingest(format!("malformed JSON dataset: {e}")))?;
    if parsed.items.is_empty() {
        return Err(Error::Ingest("dataset has no items".into()));
    }
    let width = parsed.items[0].intervals.len();
    let source_labels = match parsed.sources {
        Some(s) => s,
        None => (1..=width).map(|k| format!("source_{k}")).collect(),
    };
    let mut item_labels = Vec::with_capacity(parsed.items.len());
    let mut cells = Vec::new();
    for item in parsed.items {
        if item.intervals.len() != source_labels.len() {
            return Err(Error::Ingest(format!(
                "item {:?} has {} intervals, expected {}",
                item.label,
                item.intervals.len(),
                source_labels.len()
            )));
        }
        cells.extend(item.intervals);
        item_labels.push(item.label);
    }
    IntervalDataset::new(item_labels, source_labels, cells)
}
