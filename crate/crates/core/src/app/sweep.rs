use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{load_inputs, run_cell, write_file, AppError, RunConfig};
use crate::classifiers::Method;
use crate::corpus::{load_manifest, LabelScheme, Language, SchemeKind};
use crate::evaluation::{
    per_class_table, rubric_cells, sweep_summary, CellKey, ClassificationReport, Modality, SweepSummary,
};

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub reports: BTreeMap<CellKey, ClassificationReport>,
    /// Cells that were attempted but failed, with the error message.
    pub failures: BTreeMap<CellKey, String>,
    pub summary: SweepSummary,
}

const TASKS: [SchemeKind; 2] = [SchemeKind::Binary, SchemeKind::Multiclass];

fn cell_dir(root: &Path, key: &CellKey) -> PathBuf {
    root.join(key.language.to_lowercase())
        .join(key.task.to_string())
        .join(key.modality.name())
        .join(key.method.name())
}

/// Train every task × modality × method cell for each `(language, manifest)`
/// pair. Failures are recorded per cell and the sweep carries on. With
/// `base.output_dir` set, each cell's artifacts go to
/// `<out>/<language>/<task>/<modality>/<method>/` and the summaries to
/// `<out>/`.
pub fn cmd_sweep(manifests: &[(String, PathBuf)], base: &RunConfig) -> Result<SweepOutcome, AppError> {
    let mut reports = BTreeMap::new();
    let mut failures = BTreeMap::new();
    let fail_all = |failures: &mut BTreeMap<CellKey, String>, keys: Vec<CellKey>, msg: String| {
        for k in keys {
            log::warn!("{k}: {msg}");
            failures.insert(k, msg.clone());
        }
    };

    for (name, manifest) in manifests {
        let language = Language::parse(name);
        let keys_for = |modality: Option<Modality>| -> Vec<CellKey> {
            let mut keys = Vec::new();
            for task in TASKS {
                for m in Modality::ALL.into_iter().filter(|m| modality.is_none_or(|x| x == *m)) {
                    for method in Method::ALL {
                        keys.push(CellKey::new(&language, task, m, method));
                    }
                }
            }
            keys
        };
        let ds = match load_manifest(manifest, &LabelScheme::multiclass()) {
            Ok(ds) => ds.with_language(language.clone()),
            Err(e) => {
                fail_all(&mut failures, keys_for(None), e.to_string());
                continue;
            }
        };
        for modality in Modality::ALL {
            let inputs = match load_inputs(&ds, modality, &base.audio, base.feature_cache.as_deref()) {
                Ok(i) => i,
                Err(e) => {
                    fail_all(&mut failures, keys_for(Some(modality)), e.to_string());
                    continue;
                }
            };
            for task in TASKS {
                let task_ds = match ds.with_scheme(LabelScheme::for_kind(task)) {
                    Ok(d) => d,
                    Err(e) => {
                        let keys = Method::ALL
                            .iter()
                            .map(|&m| CellKey::new(&language, task, modality, m))
                            .collect();
                        fail_all(&mut failures, keys, e.to_string());
                        continue;
                    }
                };
                for method in Method::ALL {
                    let key = CellKey::new(&language, task, modality, method);
                    log::info!("training {key}");
                    let cfg = RunConfig {
                        manifest_path: manifest.clone(),
                        language: Some(language.name().to_string()),
                        task,
                        modality,
                        method,
                        output_dir: base.output_dir.as_ref().map(|o| cell_dir(o, &key)),
                        ..base.clone()
                    };
                    let result = run_cell(&cfg, &task_ds, &inputs).and_then(|out| {
                        if let Some(dir) = &cfg.output_dir {
                            out.write(dir)?;
                        }
                        Ok(out.report)
                    });
                    match result {
                        Ok(r) => {
                            reports.insert(key, r);
                        }
                        Err(e) => fail_all(&mut failures, vec![key], e.to_string()),
                    }
                }
            }
        }
    }

    let mut summary = sweep_summary(&reports);
    summary.mark_failed(failures.keys());
    let outcome = SweepOutcome {
        reports,
        failures,
        summary,
    };
    if let Some(out) = &base.output_dir {
        write_sweep_files(out, &outcome)?;
    }
    Ok(outcome)
}

impl SweepOutcome {
    /// Both grids followed by the failed and missing rubric cells.
    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        for task in TASKS {
            out.push_str(&self.summary.grid(task).to_text());
            out.push('\n');
        }
        let _ = writeln!(out, "rubric cells trained: {} of {}", self.summary.present, rubric_cells().len());
        for (key, msg) in &self.failures {
            let _ = writeln!(out, "failed: {key}: {msg}");
        }
        for key in &self.summary.missing {
            if !self.failures.contains_key(key) {
                let _ = writeln!(out, "missing: {key}");
            }
        }
        out
    }

    /// One row per rubric cell plus any extra trained cells.
    pub fn cells_csv(&self) -> String {
        let mut keys = rubric_cells();
        keys.extend(self.reports.keys().chain(self.failures.keys()).cloned());
        let mut seen = std::collections::BTreeSet::new();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["language", "task", "modality", "method", "status", "macro_f1", "message"])
            .expect("in-memory write");
        for key in keys {
            if !seen.insert(key.clone()) {
                continue;
            }
            let (status, f1, msg) = match (self.reports.get(&key), self.failures.get(&key)) {
                (Some(r), _) => ("trained", r.macro_f1.to_string(), String::new()),
                (None, Some(m)) => ("failed", String::new(), m.clone()),
                (None, None) => ("missing", String::new(), String::new()),
            };
            w.write_record([
                key.language.as_str(),
                &key.task.to_string(),
                key.modality.name(),
                key.method.name(),
                status,
                &f1,
                &msg,
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// Per-class F1 tables, one per (language, task) that has any report.
    pub fn per_class_tables(&self) -> Vec<(String, SchemeKind, String)> {
        let mut grouped: BTreeMap<(String, SchemeKind), BTreeMap<(Method, Modality), ClassificationReport>> =
            BTreeMap::new();
        for (key, r) in &self.reports {
            grouped
                .entry((key.language.clone(), key.task))
                .or_default()
                .insert((key.method, key.modality), r.clone());
        }
        grouped
            .into_iter()
            .map(|((lang, task), reports)| {
                let table = per_class_table(&LabelScheme::for_kind(task), &reports);
                (lang, task, table)
            })
            .collect()
    }
}

fn write_sweep_files(out: &Path, o: &SweepOutcome) -> Result<(), AppError> {
    write_file(&out.join("summary.txt"), o.summary_text())?;
    for task in TASKS {
        write_file(&out.join(format!("summary_{task}.csv")), o.summary.grid(task).to_csv())?;
    }
    write_file(&out.join("cells.csv"), o.cells_csv())?;
    for (lang, task, table) in o.per_class_tables() {
        let name = format!("per_class_{}_{task}.txt", lang.to_lowercase());
        write_file(&out.join(name), format!("{lang} {task}: F1 per class\n{table}"))?;
    }
    Ok(())
}
