//! Aggregation and on-disk layout of run reports.
//!
//! Every table is comma-separated with a header row. Floats use the shortest
//! representation that parses back to the same value, so re-aggregating
//! from `attempts.csv` reproduces `summary.csv` exactly.
//!
//! | file | columns |
//! |------|---------|
//! | `summary.csv` | `group,mode,count,average,maximum,minimum,median` |
//! | `attempts.csv` (echo) | `wave_kind,mode,attempt,loss` |
//! | `attempts.csv` (fit) | `metric,mode,attempt,value` |
//! | `fitness_trace.csv` | `attempt,generation,best_fitness,mean_fitness` |
//! | `test_points.csv` | `mode,point,mean_abs_distance,median_abs_distance,mean_cumulative,median_cumulative` |
//! | `predictions/attempt_NNN.csv` | `point,u0,u1,u2,u3,prediction,target,abs_distance` |
//! | `params/attempt_NNN.txt` | `name value` per line |
//!
//! `config.toml` echoes the resolved configuration. Wall-clock time goes to
//! `run_info.txt` only, keeping every other file reproducible byte for byte.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::harness::run::{ReportBody, RunReport};
use crate::harness::HarnessError;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const ATTEMPTS_FILE: &str = "attempts.csv";
pub const TRACE_FILE: &str = "fitness_trace.csv";
pub const TEST_POINTS_FILE: &str = "test_points.csv";
pub const CONFIG_FILE: &str = "config.toml";
pub const RUN_INFO_FILE: &str = "run_info.txt";

/// Group name collecting every wave of one mode in the echo summary.
pub const ALL_WAVES: &str = "all";

const ECHO_KEY: &str = "wave_kind";
const ECHO_VALUE: &str = "loss";
const FIT_KEY: &str = "metric";
const FIT_VALUE: &str = "value";

#[derive(Debug, Clone, PartialEq)]
pub struct AttemptRow {
    pub group: String,
    pub mode: String,
    pub attempt: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub group: String,
    pub mode: String,
    pub count: usize,
    pub average: f64,
    pub maximum: f64,
    pub minimum: f64,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestPointRow {
    pub mode: String,
    pub point: usize,
    pub mean_abs_distance: f64,
    pub median_abs_distance: f64,
    pub mean_cumulative: f64,
    pub median_cumulative: f64,
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn summary_row(group: &str, mode: &str, values: &[f64]) -> SummaryRow {
    SummaryRow {
        group: group.to_string(),
        mode: mode.to_string(),
        count: values.len(),
        average: mean(values),
        maximum: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        minimum: values.iter().copied().fold(f64::INFINITY, f64::min),
        median: median(values),
    }
}

/// Statistics per (group, mode) in first-appearance order; with
/// `pool_by_mode`, one extra [`ALL_WAVES`] row per mode pools every group.
pub fn summarize(rows: &[AttemptRow], pool_by_mode: bool) -> Vec<SummaryRow> {
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.group.as_str(), r.mode.as_str())) {
            keys.push((&r.group, &r.mode));
        }
    }
    let mut out: Vec<SummaryRow> = keys
        .iter()
        .map(|(g, m)| {
            let values: Vec<f64> = rows
                .iter()
                .filter(|r| r.group == *g && r.mode == *m)
                .map(|r| r.value)
                .collect();
            summary_row(g, m, &values)
        })
        .collect();
    if pool_by_mode {
        let mut modes: Vec<&str> = Vec::new();
        for r in rows {
            if !modes.contains(&r.mode.as_str()) {
                modes.push(&r.mode);
            }
        }
        for m in modes {
            let values: Vec<f64> = rows
                .iter()
                .filter(|r| r.mode == m)
                .map(|r| r.value)
                .collect();
            out.push(summary_row(ALL_WAVES, m, &values));
        }
    }
    out
}

/// Per-point statistics across series; each series is one attempt's list
/// of absolute distances in point order.
fn test_point_rows(mode: &str, series: &[Vec<f64>]) -> Vec<TestPointRow> {
    let n = series.iter().map(Vec::len).min().unwrap_or(0);
    let cumulative: Vec<Vec<f64>> = series
        .iter()
        .map(|s| {
            s.iter()
                .scan(0.0, |acc, v| {
                    *acc += v;
                    Some(*acc)
                })
                .collect()
        })
        .collect();
    (0..n)
        .map(|i| {
            let at: Vec<f64> = series.iter().map(|s| s[i]).collect();
            let cum: Vec<f64> = cumulative.iter().map(|s| s[i]).collect();
            TestPointRow {
                mode: mode.to_string(),
                point: i,
                mean_abs_distance: mean(&at),
                median_abs_distance: median(&at),
                mean_cumulative: mean(&cum),
                median_cumulative: median(&cum),
            }
        })
        .collect()
}

impl RunReport {
    fn columns(&self) -> (&'static str, &'static str) {
        match self.body {
            ReportBody::Echo(_) => (ECHO_KEY, ECHO_VALUE),
            ReportBody::Fit(_) => (FIT_KEY, FIT_VALUE),
        }
    }

    /// Flat per-attempt records, the single source for every aggregate.
    pub fn attempt_rows(&self) -> Vec<AttemptRow> {
        match &self.body {
            ReportBody::Echo(records) => records
                .iter()
                .map(|r| AttemptRow {
                    group: r.wave.clone(),
                    mode: r.mode.to_string(),
                    attempt: r.attempt,
                    value: r.loss,
                })
                .collect(),
            ReportBody::Fit(fit) => {
                let mode = fit.mode.to_string();
                let mut rows = Vec::new();
                for a in &fit.attempts {
                    let metrics = [
                        ("test_metric", a.test_metric),
                        ("train_loss", a.train_loss),
                        ("clamp_events", a.clamp_events as f64),
                        ("rejected_evaluations", a.rejected_evaluations as f64),
                    ];
                    for (name, value) in metrics {
                        rows.push(AttemptRow {
                            group: name.to_string(),
                            mode: mode.clone(),
                            attempt: a.attempt,
                            value,
                        });
                    }
                }
                rows
            }
        }
    }

    pub fn summary(&self) -> Vec<SummaryRow> {
        summarize(
            &self.attempt_rows(),
            matches!(self.body, ReportBody::Echo(_)),
        )
    }

    pub fn test_points(&self) -> Vec<TestPointRow> {
        match &self.body {
            ReportBody::Echo(records) => {
                let mut modes: Vec<_> = Vec::new();
                for r in records {
                    if !modes.contains(&r.mode) {
                        modes.push(r.mode);
                    }
                }
                modes
                    .into_iter()
                    .flat_map(|m| {
                        let series: Vec<Vec<f64>> = records
                            .iter()
                            .filter(|r| r.mode == m)
                            .map(|r| r.test_abs_errors.clone())
                            .collect();
                        test_point_rows(m.as_str(), &series)
                    })
                    .collect()
            }
            ReportBody::Fit(fit) => {
                let series: Vec<Vec<f64>> = fit
                    .attempts
                    .iter()
                    .map(|a| a.points.iter().map(|p| p.abs_distance).collect())
                    .collect();
                test_point_rows(fit.mode.as_str(), &series)
            }
        }
    }

    /// Value of `group` for `mode` in the summary, if present.
    pub fn summary_for(&self, group: &str, mode: &str) -> Option<SummaryRow> {
        self.summary()
            .into_iter()
            .find(|r| r.group == group && r.mode == mode)
    }
}

fn io_error(path: &Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `bytes` to a temporary file beside `path` and renames it into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(dir, e))?;
    tmp.write_all(bytes).map_err(|e| io_error(path, e))?;
    tmp.as_file().sync_all().map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

fn csv_bytes(
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<Vec<u8>, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(HarnessError::from)?;
    for row in rows {
        w.write_record(&row).map_err(HarnessError::from)?;
    }
    w.into_inner()
        .map_err(|e| HarnessError::Format(e.to_string()))
}

fn summary_bytes(rows: &[SummaryRow]) -> Result<Vec<u8>, HarnessError> {
    csv_bytes(
        &[
            "group", "mode", "count", "average", "maximum", "minimum", "median",
        ],
        rows.iter().map(|r| {
            vec![
                r.group.clone(),
                r.mode.clone(),
                r.count.to_string(),
                r.average.to_string(),
                r.maximum.to_string(),
                r.minimum.to_string(),
                r.median.to_string(),
            ]
        }),
    )
}

/// Writes the report into `dir`, returning the paths written.
pub fn emit_report(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: Vec<u8>| -> Result<(), HarnessError> {
        let path = dir.join(name);
        write_atomic(&path, &bytes)?;
        written.push(path);
        Ok(())
    };

    put(SUMMARY_FILE, summary_bytes(&report.summary())?)?;

    let (key, value) = report.columns();
    put(
        ATTEMPTS_FILE,
        csv_bytes(
            &[key, "mode", "attempt", value],
            report
                .attempt_rows()
                .into_iter()
                .map(|r| vec![r.group, r.mode, r.attempt.to_string(), r.value.to_string()]),
        )?,
    )?;

    let trace_rows: Vec<Vec<String>> = match &report.body {
        ReportBody::Echo(_) => Vec::new(),
        ReportBody::Fit(fit) => fit
            .attempts
            .iter()
            .flat_map(|a| {
                a.history.iter().map(move |h| {
                    vec![
                        a.attempt.to_string(),
                        h.generation.to_string(),
                        h.best_fitness.to_string(),
                        h.mean_fitness.to_string(),
                    ]
                })
            })
            .collect(),
    };
    put(
        TRACE_FILE,
        csv_bytes(
            &["attempt", "generation", "best_fitness", "mean_fitness"],
            trace_rows,
        )?,
    )?;

    put(
        TEST_POINTS_FILE,
        csv_bytes(
            &[
                "mode",
                "point",
                "mean_abs_distance",
                "median_abs_distance",
                "mean_cumulative",
                "median_cumulative",
            ],
            report.test_points().into_iter().map(|r| {
                vec![
                    r.mode,
                    r.point.to_string(),
                    r.mean_abs_distance.to_string(),
                    r.median_abs_distance.to_string(),
                    r.mean_cumulative.to_string(),
                    r.median_cumulative.to_string(),
                ]
            }),
        )?,
    )?;

    if let ReportBody::Fit(fit) = &report.body {
        for a in &fit.attempts {
            let rows = a.points.iter().enumerate().map(|(i, p)| {
                let mut row = vec![i.to_string()];
                row.extend(p.input.u().iter().map(|u| u.to_string()));
                row.extend([
                    p.prediction.to_string(),
                    p.target.to_string(),
                    p.abs_distance.to_string(),
                ]);
                row
            });
            put(
                &format!("predictions/attempt_{:03}.csv", a.attempt),
                csv_bytes(
                    &[
                        "point",
                        "u0",
                        "u1",
                        "u2",
                        "u3",
                        "prediction",
                        "target",
                        "abs_distance",
                    ],
                    rows,
                )?,
            )?;
            let mut text = String::new();
            for (name, v) in fit.param_names.iter().zip(&a.best_params) {
                text.push_str(&format!("{name} {v}\n"));
            }
            put(
                &format!("params/attempt_{:03}.txt", a.attempt),
                text.into_bytes(),
            )?;
        }
    }

    put(CONFIG_FILE, report.config.to_toml()?.into_bytes())?;
    put(
        RUN_INFO_FILE,
        format!(
            "experiment {}\nwall_clock_seconds {}\n",
            report.config.experiment,
            report.wall_clock.as_secs_f64()
        )
        .into_bytes(),
    )?;
    Ok(written)
}

/// Reads `attempts.csv` back into rows; the boolean is true for echo reports.
pub fn read_attempts(path: &Path) -> Result<(Vec<AttemptRow>, bool), HarnessError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| HarnessError::Csv {
        path: path.to_path_buf(),
        source: e,
    })?;
    let header = reader.headers().map_err(HarnessError::from)?.clone();
    let echo = match header.iter().collect::<Vec<_>>().as_slice() {
        [ECHO_KEY, "mode", "attempt", ECHO_VALUE] => true,
        [FIT_KEY, "mode", "attempt", FIT_VALUE] => false,
        other => {
            return Err(HarnessError::Format(format!(
                "{}: unexpected header {:?}",
                path.display(),
                other
            )))
        }
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(HarnessError::from)?;
        let parse_err = |what: &str| {
            HarnessError::Format(format!("{}: bad {what} in {:?}", path.display(), record))
        };
        rows.push(AttemptRow {
            group: record[0].to_string(),
            mode: record[1].to_string(),
            attempt: record[2].parse().map_err(|_| parse_err("attempt"))?,
            value: record[3].parse().map_err(|_| parse_err("value"))?,
        });
    }
    Ok((rows, echo))
}

/// Recomputes `summary.csv` in `dir` from its `attempts.csv`.
pub fn reaggregate(dir: &Path) -> Result<Vec<SummaryRow>, HarnessError> {
    let (rows, echo) = read_attempts(&dir.join(ATTEMPTS_FILE))?;
    if rows.is_empty() {
        return Err(HarnessError::Format(format!(
            "{}: no attempt rows",
            dir.join(ATTEMPTS_FILE).display()
        )));
    }
    let summary = summarize(&rows, echo);
    write_atomic(&dir.join(SUMMARY_FILE), &summary_bytes(&summary)?)?;
    Ok(summary)
}
