//! Confusion matrices, per-class precision/recall/F1, macro-F1, and the
//! sweep summary grids.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifiers::Method;
use crate::corpus::{Language, LabelScheme, SchemeKind};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("{truth} true labels but {predicted} predictions")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("label `{0}` is not in the scheme")]
    UnknownLabel(String),
    #[error("malformed report CSV: {0}")]
    Malformed(String),
}

/// Rows are true classes, columns predicted classes, in scheme order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    scheme: LabelScheme,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn scheme(&self) -> &LabelScheme {
        &self.scheme
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.scheme.len() + predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.counts.chunks(self.scheme.len()).map(<[u64]>::to_vec).collect()
    }
}

/// Confusion matrix from class indices.
pub fn confusion_from_indices(
    y_true: &[usize],
    y_pred: &[usize],
    scheme: &LabelScheme,
) -> Result<ConfusionMatrix, EvalError> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch {
            truth: y_true.len(),
            predicted: y_pred.len(),
        });
    }
    let k = scheme.len();
    let mut counts = vec![0u64; k * k];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        for l in [t, p] {
            if l >= k {
                return Err(EvalError::UnknownLabel(format!("#{l}")));
            }
        }
        counts[t * k + p] += 1;
    }
    Ok(ConfusionMatrix {
        scheme: scheme.clone(),
        counts,
    })
}

/// Confusion matrix from label codes.
pub fn confusion<S: AsRef<str>>(
    y_true: &[S],
    y_pred: &[S],
    scheme: &LabelScheme,
) -> Result<ConfusionMatrix, EvalError> {
    let index = |codes: &[S]| -> Result<Vec<usize>, EvalError> {
        codes
            .iter()
            .map(|c| {
                scheme
                    .index_of(c.as_ref())
                    .ok_or_else(|| EvalError::UnknownLabel(c.as_ref().to_string()))
            })
            .collect()
    };
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch {
            truth: y_true.len(),
            predicted: y_pred.len(),
        });
    }
    confusion_from_indices(&index(y_true)?, &index(y_pred)?, scheme)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub per_class: Vec<ClassMetrics>,
    pub macro_f1: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-class metrics with the 0/0 → 0 convention; macro-F1 is the
/// unweighted mean over every scheme class, zero-support ones included.
pub fn report(cm: &ConfusionMatrix) -> ClassificationReport {
    let k = cm.scheme.len();
    let per_class: Vec<ClassMetrics> = (0..k)
        .map(|c| {
            let tp = cm.get(c, c);
            let predicted: u64 = (0..k).map(|t| cm.get(t, c)).sum();
            let support: u64 = (0..k).map(|p| cm.get(c, p)).sum();
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, support);
            let f1 = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            ClassMetrics {
                label: cm.scheme.code(c).to_string(),
                precision,
                recall,
                f1,
                support,
            }
        })
        .collect();
    let macro_f1 = if k == 0 {
        0.0
    } else {
        per_class.iter().map(|m| m.f1).sum::<f64>() / k as f64
    };
    ClassificationReport {
        per_class,
        macro_f1,
    }
}

const CSV_HEADER: [&str; 5] = ["label", "precision", "recall", "f1", "support"];
const MACRO_ROW: &str = "macro";

impl ClassificationReport {
    pub fn get(&self, label: &str) -> Option<&ClassMetrics> {
        self.per_class.iter().find(|m| m.label == label)
    }

    pub fn support(&self) -> u64 {
        self.per_class.iter().map(|m| m.support).sum()
    }

    /// CSV with full-precision numbers; the last row carries macro-F1.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for m in &self.per_class {
            w.write_record([
                m.label.clone(),
                m.precision.to_string(),
                m.recall.to_string(),
                m.f1.to_string(),
                m.support.to_string(),
            ])
            .expect("in-memory write");
        }
        w.write_record([
            MACRO_ROW.to_string(),
            String::new(),
            String::new(),
            self.macro_f1.to_string(),
            self.support().to_string(),
        ])
        .expect("in-memory write");
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn from_csv(text: &str) -> Result<Self, EvalError> {
        let bad = |m: String| EvalError::Malformed(m);
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers().map_err(|e| bad(e.to_string()))?;
        if header.iter().collect::<Vec<_>>() != CSV_HEADER {
            return Err(bad(format!("unexpected header {header:?}")));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("`{s}`: {e}")));
        let count = |s: &str| s.parse::<u64>().map_err(|e| bad(format!("`{s}`: {e}")));
        let mut per_class = Vec::new();
        let mut macro_f1 = None;
        for rec in r.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            if &rec[0] == MACRO_ROW {
                macro_f1 = Some(num(&rec[3])?);
                continue;
            }
            per_class.push(ClassMetrics {
                label: rec[0].to_string(),
                precision: num(&rec[1])?,
                recall: num(&rec[2])?,
                f1: num(&rec[3])?,
                support: count(&rec[4])?,
            });
        }
        Ok(Self {
            per_class,
            macro_f1: macro_f1.ok_or_else(|| bad("no macro row".into()))?,
        })
    }

    /// Aligned table with two decimals, one row per class plus a macro row.
    pub fn to_text(&self) -> String {
        let width = self
            .per_class
            .iter()
            .map(|m| m.label.chars().count())
            .chain([MACRO_ROW.len()])
            .max()
            .unwrap_or(5);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>6}  {:>6}  {:>7}",
            "class", "precision", "recall", "f1", "support"
        );
        for m in &self.per_class {
            let _ = writeln!(
                out,
                "{:<width$}  {:>9.2}  {:>6.2}  {:>6.2}  {:>7}",
                m.label, m.precision, m.recall, m.f1, m.support
            );
        }
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>6}  {:>6.2}  {:>7}",
            MACRO_ROW,
            "",
            "",
            self.macro_f1,
            self.support()
        );
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Text,
    Speech,
}

impl Modality {
    pub const ALL: [Modality; 2] = [Modality::Text, Modality::Speech];

    pub fn name(self) -> &'static str {
        match self {
            Modality::Text => "text",
            Modality::Speech => "speech",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Modality {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(Modality::Text),
            "speech" | "audio" => Ok(Modality::Speech),
            other => Err(format!("unknown modality `{other}` (expected text or speech)")),
        }
    }
}

/// Coordinates of one model in the sweep rubric.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub language: String,
    pub task: SchemeKind,
    pub modality: Modality,
    pub method: Method,
}

impl CellKey {
    pub fn new(language: &Language, task: SchemeKind, modality: Modality, method: Method) -> Self {
        Self {
            language: language.name().to_string(),
            task,
            modality,
            method,
        }
    }
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}/{}", self.language, self.task, self.modality, self.method)
    }
}

/// Every cell of the rubric: tasks × rubric languages × modalities × methods.
pub fn rubric_cells() -> Vec<CellKey> {
    let mut cells = Vec::with_capacity(48);
    for task in [SchemeKind::Binary, SchemeKind::Multiclass] {
        for language in &Language::RUBRIC {
            for method in Method::ALL {
                for modality in Modality::ALL {
                    cells.push(CellKey::new(language, task, modality, method));
                }
            }
        }
    }
    cells
}

/// Column order of a summary grid: methods, each split into text and speech.
pub fn grid_columns() -> Vec<(Method, Modality)> {
    Method::ALL
        .iter()
        .flat_map(|&m| Modality::ALL.iter().map(move |&d| (m, d)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub language: String,
    /// Macro-F1 per [`grid_columns`] entry; `None` where the cell is missing.
    pub values: Vec<Option<f64>>,
    /// Column of the row maximum (first on ties).
    pub best: Option<usize>,
    /// Columns whose model was attempted but failed.
    pub failed: Vec<bool>,
}

/// Macro-F1 grid for one task: rows are languages.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryGrid {
    pub task: SchemeKind,
    pub rows: Vec<GridRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub binary: SummaryGrid,
    pub multiclass: SummaryGrid,
    /// Rubric cells with a report.
    pub present: usize,
    /// Rubric cells without a report, in rubric order.
    pub missing: Vec<CellKey>,
}

impl SweepSummary {
    /// Flag cells as failed so the grids render them as `ERR`.
    pub fn mark_failed<'a>(&mut self, keys: impl IntoIterator<Item = &'a CellKey>) {
        let cols = grid_columns();
        for key in keys {
            let grid = match key.task {
                SchemeKind::Binary => &mut self.binary,
                SchemeKind::Multiclass => &mut self.multiclass,
            };
            let col = cols.iter().position(|&c| c == (key.method, key.modality));
            if let (Some(row), Some(col)) = (grid.rows.iter_mut().find(|r| r.language == key.language), col) {
                row.failed[col] = true;
            }
        }
    }

    pub fn grid(&self, task: SchemeKind) -> &SummaryGrid {
        match task {
            SchemeKind::Binary => &self.binary,
            SchemeKind::Multiclass => &self.multiclass,
        }
    }
}

fn build_grid(task: SchemeKind, reports: &BTreeMap<CellKey, ClassificationReport>) -> SummaryGrid {
    let mut languages: Vec<String> = Language::RUBRIC.iter().map(|l| l.name().to_string()).collect();
    for key in reports.keys() {
        if key.task == task && !languages.contains(&key.language) {
            languages.push(key.language.clone());
        }
    }
    let rows = languages
        .into_iter()
        .map(|language| {
            let values: Vec<Option<f64>> = grid_columns()
                .into_iter()
                .map(|(method, modality)| {
                    let key = CellKey {
                        language: language.clone(),
                        task,
                        modality,
                        method,
                    };
                    reports.get(&key).map(|r| r.macro_f1)
                })
                .collect();
            let mut best: Option<usize> = None;
            for (i, v) in values.iter().enumerate() {
                if let Some(v) = v {
                    if best.is_none_or(|b| *v > values[b].unwrap_or(f64::NEG_INFINITY)) {
                        best = Some(i);
                    }
                }
            }
            GridRow {
                language,
                failed: vec![false; values.len()],
                values,
                best,
            }
        })
        .collect();
    SummaryGrid { task, rows }
}

/// Summarize a sweep as one grid per task and check rubric completeness.
pub fn sweep_summary(reports: &BTreeMap<CellKey, ClassificationReport>) -> SweepSummary {
    let cells = rubric_cells();
    let missing: Vec<CellKey> = cells.iter().filter(|c| !reports.contains_key(c)).cloned().collect();
    SweepSummary {
        binary: build_grid(SchemeKind::Binary, reports),
        multiclass: build_grid(SchemeKind::Multiclass, reports),
        present: cells.len() - missing.len(),
        missing,
    }
}

impl SummaryGrid {
    /// Aligned text: two header lines (methods, then modalities), one row
    /// per language. The row maximum carries a `*` and is named in the
    /// trailing `best` column.
    pub fn to_text(&self) -> String {
        let cols = grid_columns();
        let lang_w = self
            .rows
            .iter()
            .map(|r| r.language.chars().count())
            .max()
            .unwrap_or(8)
            .max(8);
        let mut out = String::new();
        let _ = writeln!(out, "Macro F1 on validation data ({})", self.task);
        let _ = write!(out, "{:<lang_w$}", "");
        for m in Method::ALL {
            let _ = write!(out, " {:^15}", m.name());
        }
        let _ = writeln!(out);
        let _ = write!(out, "{:<lang_w$}", "");
        for (_, d) in &cols {
            let _ = write!(out, " {:>7}", d.name());
        }
        let _ = writeln!(out, "  best");
        for row in &self.rows {
            let _ = write!(out, "{:<lang_w$}", row.language);
            for (i, v) in row.values.iter().enumerate() {
                let cell = match v {
                    Some(v) if row.best == Some(i) => format!("{v:.2}*"),
                    Some(v) => format!("{v:.2} "),
                    None if row.failed[i] => "ERR ".to_string(),
                    None => "-  ".to_string(),
                };
                let _ = write!(out, " {cell:>7}");
            }
            let best = row
                .best
                .map(|b| format!("{}/{}", cols[b].0, cols[b].1))
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(out, "  {best}");
        }
        out
    }

    /// CSV with one column per method/modality pair and a `best` column.
    pub fn to_csv(&self) -> String {
        let cols = grid_columns();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["language".to_string()];
        header.extend(cols.iter().map(|(m, d)| format!("{m}_{d}")));
        header.push("best".into());
        w.write_record(&header).expect("in-memory write");
        for row in &self.rows {
            let mut rec = vec![row.language.clone()];
            rec.extend(row.values.iter().zip(&row.failed).map(|(v, &failed)| match v {
                Some(v) => v.to_string(),
                None if failed => "ERR".into(),
                None => String::new(),
            }));
            rec.push(
                row.best
                    .map(|b| format!("{}_{}", cols[b].0, cols[b].1))
                    .unwrap_or_default(),
            );
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// Per-class F1 table for one language and task: class rows ×
/// method/modality columns, two decimals, with a closing macro row.
/// Missing models show `-`.
pub fn per_class_table(
    scheme: &LabelScheme,
    reports: &BTreeMap<(Method, Modality), ClassificationReport>,
) -> String {
    let cols = grid_columns();
    let mut out = String::new();
    let _ = write!(out, "{:<6}", "class");
    for (m, d) in &cols {
        let _ = write!(out, " {:>10}", format!("{m}/{d}"));
    }
    let _ = writeln!(out);
    let fmt_cell = |v: Option<f64>| v.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
    for label in scheme.labels() {
        let _ = write!(out, "{label:<6}");
        for key in &cols {
            let v = reports.get(key).and_then(|r| r.get(label)).map(|m| m.f1);
            let _ = write!(out, " {:>10}", fmt_cell(v));
        }
        let _ = writeln!(out);
    }
    let _ = write!(out, "{:<6}", MACRO_ROW);
    for key in &cols {
        let _ = write!(out, " {:>10}", fmt_cell(reports.get(key).map(|r| r.macro_f1)));
    }
    let _ = writeln!(out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bin() -> LabelScheme {
        LabelScheme::binary()
    }

    #[test]
    fn confusion_counts() {
        let cm = confusion(&["H", "H", "N", "N"], &["H", "N", "H", "N"], &bin()).unwrap();
        assert_eq!(cm.rows(), vec![vec![1, 1], vec![1, 1]]);
        let perfect = confusion(&["H", "N", "N"], &["H", "N", "N"], &bin()).unwrap();
        assert_eq!(perfect.rows(), vec![vec![1, 0], vec![0, 2]]);
        let empty = confusion::<&str>(&[], &[], &bin()).unwrap();
        assert_eq!(empty.total(), 0);
    }

    #[test]
    fn confusion_errors() {
        assert_eq!(
            confusion(&["H"], &["H", "N"], &bin()),
            Err(EvalError::LengthMismatch { truth: 1, predicted: 2 })
        );
        assert_eq!(
            confusion(&["H"], &["Q"], &bin()),
            Err(EvalError::UnknownLabel("Q".into()))
        );
    }

    #[test]
    fn perfect_and_hand_computed_reports() {
        let r = report(&confusion(&["H", "N"], &["H", "N"], &bin()).unwrap());
        assert_eq!(r.macro_f1, 1.0);
        assert!(r.per_class.iter().all(|m| m.f1 == 1.0));
        // class H: TP=2, FP=1, FN=1
        let r = report(
            &confusion(&["H", "H", "H", "N", "N"], &["H", "H", "N", "H", "N"], &bin()).unwrap(),
        );
        let h = r.get("H").unwrap();
        assert!((h.precision - 2.0 / 3.0).abs() < 1e-15);
        assert!((h.recall - 2.0 / 3.0).abs() < 1e-15);
        assert!((h.f1 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_support_class_enters_macro_mean() {
        let scheme = LabelScheme::multiclass();
        let r = report(&confusion(&["C", "N"], &["C", "N"], &scheme).unwrap());
        assert_eq!(r.per_class.len(), 5);
        assert_eq!(r.get("P").unwrap().f1, 0.0);
        assert!((r.macro_f1 - 2.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn csv_round_trip_and_text_layout() {
        let r = report(
            &confusion(&["C", "N", "P", "R", "G", "N"], &["C", "N", "N", "R", "C", "P"], &LabelScheme::multiclass())
                .unwrap(),
        );
        let back = ClassificationReport::from_csv(&r.to_csv()).unwrap();
        assert_eq!(back, r);
        let text = r.to_text();
        assert_eq!(text.lines().count(), 7);
        assert!(text.lines().nth(1).unwrap().starts_with("C "));
        assert!(ClassificationReport::from_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn rubric_has_48_cells() {
        let cells = rubric_cells();
        assert_eq!(cells.len(), 48);
        let unique: std::collections::BTreeSet<_> = cells.iter().collect();
        assert_eq!(unique.len(), 48);
    }

    fn fake_report(macro_f1: f64) -> ClassificationReport {
        ClassificationReport {
            per_class: vec![],
            macro_f1,
        }
    }

    #[test]
    fn sweep_completeness() {
        let empty = sweep_summary(&BTreeMap::new());
        assert_eq!(empty.present, 0);
        assert_eq!(empty.missing.len(), 48);

        let mut one_language = BTreeMap::new();
        for task in [SchemeKind::Binary, SchemeKind::Multiclass] {
            for (i, (method, modality)) in grid_columns().into_iter().enumerate() {
                one_language.insert(
                    CellKey::new(&Language::Tamil, task, modality, method),
                    fake_report(i as f64 / 10.0),
                );
            }
        }
        let s = sweep_summary(&one_language);
        assert_eq!(s.present, 16);
        assert_eq!(s.missing.len(), 32);
        let tamil = &s.binary.rows[1];
        assert_eq!(tamil.language, "Tamil");
        assert_eq!(tamil.best, Some(7));
        assert!(s.binary.rows[0].best.is_none());
        let text = s.binary.to_text();
        assert!(text.contains("0.70*"));
        assert!(text.contains("rf/speech"));
        assert!(s.binary.to_csv().lines().nth(2).unwrap().ends_with("rf_speech"));

        let mut s = s;
        s.mark_failed([&CellKey::new(&Language::Telugu, SchemeKind::Binary, Modality::Speech, Method::Svm)]);
        assert!(s.binary.rows[2].failed[3]);
        assert!(s.binary.to_text().lines().nth(5).unwrap().contains("ERR"));
        assert!(s.binary.to_csv().lines().nth(3).unwrap().contains("ERR"));
    }

    #[test]
    fn best_marker_prefers_first_on_ties() {
        let mut reports = BTreeMap::new();
        for method in [Method::Svm, Method::Lr] {
            reports.insert(
                CellKey::new(&Language::Malayalam, SchemeKind::Multiclass, Modality::Text, method),
                fake_report(0.54),
            );
        }
        let s = sweep_summary(&reports);
        assert_eq!(s.multiclass.rows[0].best, Some(2));
    }

    #[test]
    fn per_class_table_shape() {
        let scheme = LabelScheme::multiclass();
        let r = report(&confusion(&["C", "N"], &["C", "G"], &scheme).unwrap());
        let mut reports = BTreeMap::new();
        reports.insert((Method::Nb, Modality::Speech), r);
        let t = per_class_table(&scheme, &reports);
        assert_eq!(t.lines().count(), 7);
        assert!(t.lines().nth(1).unwrap().contains("1.00"));
    }

    fn brute_force(truth: &[usize], pred: &[usize], k: usize) -> (Vec<f64>, f64) {
        let mut f1s = Vec::new();
        for c in 0..k {
            let tp = truth.iter().zip(pred).filter(|(&t, &p)| t == c && p == c).count() as f64;
            let fp = truth.iter().zip(pred).filter(|(&t, &p)| t != c && p == c).count() as f64;
            let fn_ = truth.iter().zip(pred).filter(|(&t, &p)| t == c && p != c).count() as f64;
            // F1 = 2TP / (2TP + FP + FN), the harmonic-mean identity
            let f1 = if tp == 0.0 { 0.0 } else { 2.0 * tp / (2.0 * tp + fp + fn_) };
            f1s.push(f1);
        }
        let m = f1s.iter().sum::<f64>() / k as f64;
        (f1s, m)
    }

    proptest! {
        #[test]
        fn report_matches_brute_force(
            k in 2usize..=5,
            pairs in proptest::collection::vec((0usize..5, 0usize..5), 0..200),
        ) {
            let scheme = LabelScheme::custom_multiclass(&["a", "b", "c", "d", "e"][..k]).unwrap();
            let truth: Vec<usize> = pairs.iter().map(|p| p.0 % k).collect();
            let pred: Vec<usize> = pairs.iter().map(|p| p.1 % k).collect();
            let r = report(&confusion_from_indices(&truth, &pred, &scheme).unwrap());
            let (f1s, m) = brute_force(&truth, &pred, k);
            for (got, want) in r.per_class.iter().zip(&f1s) {
                prop_assert!((got.f1 - want).abs() <= 1e-12);
            }
            prop_assert!((r.macro_f1 - m).abs() <= 1e-12);
            let lo = f1s.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = f1s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lo - 1e-15 <= r.macro_f1 && r.macro_f1 <= hi + 1e-15);

            let mut rev_t = truth.clone();
            let mut rev_p = pred.clone();
            rev_t.reverse();
            rev_p.reverse();
            prop_assert_eq!(r, report(&confusion_from_indices(&rev_t, &rev_p, &scheme).unwrap()));
        }
    }
}
