//! Battery campaigns over status sets.
//!
//! A campaign runs every (status, mode) unit through a battery on a fixed
//! size worker pool, then sorts the results, so the bytes written never
//! depend on the number of workers or on completion order. Aggregates
//! (suspect rates per technique, failure-count histogram, per-test failure
//! frequency) and the quality registry are all recomputed from the
//! per-status reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::mt::MtState;
use crate::partition::{list_status_files, load_status_file, LoadedStatus, Technique};
use crate::stats::{run_test, Battery, Mode, StreamView, TestResult, Verdict};

pub const CODE_VERSION: &str = concat!("mt-streams ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub battery: Battery,
    pub modes: Vec<Mode>,
    pub threshold: f64,
    /// Worker count; affects wall time only.
    pub parallelism: usize,
}

impl CampaignConfig {
    pub fn new(battery: Battery, modes: &[Mode], parallelism: usize) -> Self {
        let threshold = battery.threshold;
        let modes: BTreeSet<Mode> = modes.iter().copied().collect();
        Self {
            battery,
            modes: modes.into_iter().collect(),
            threshold,
            parallelism: parallelism.max(1),
        }
    }

    /// Battery digest, threshold, modes and code version, hashed together.
    pub fn fingerprint(&self) -> String {
        let modes: Vec<&str> = self.modes.iter().map(|m| m.as_str()).collect();
        let text = format!(
            "{}\nthreshold={:e}\nmodes={}\nversion={}\n",
            self.battery.digest(),
            self.threshold,
            modes.join(","),
            CODE_VERSION
        );
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Battery outcome for one status in one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct StatusReport {
    pub technique: Technique,
    pub index: usize,
    pub mode: Mode,
    pub results: Vec<TestResult>,
}

impl StatusReport {
    pub fn failed_ids(&self) -> Vec<&str> {
        self.results
            .iter()
            .filter(|r| r.verdict == Verdict::Fail)
            .map(|r| r.id.as_str())
            .collect()
    }

    pub fn n_failed(&self) -> usize {
        self.failed_ids().len()
    }
}

/// Runs the battery in order, each test on a fresh view of `state`.
pub fn run_battery_on_status(
    (technique, index): (Technique, usize),
    state: &MtState,
    mode: Mode,
    battery: &Battery,
    threshold: f64,
) -> Result<StatusReport> {
    let results = battery
        .tests
        .iter()
        .map(|def| {
            let mut view = StreamView::new(state.clone(), mode);
            run_test(def, &mut view, threshold)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StatusReport {
        technique,
        index,
        mode,
        results,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Good,
    Suspect,
}

/// The set of test ids a status may fail and still count as Good.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedFailures(BTreeSet<String>);

impl ExpectedFailures {
    /// Every id must belong to the battery.
    pub fn new<I, S>(battery_ids: &BTreeSet<String>, ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = ids.into_iter().map(Into::into).collect();
        if let Some(unknown) = set.iter().find(|id| !battery_ids.contains(*id)) {
            return Err(Error::Config(format!(
                "expected-failure id `{unknown}` is not in the battery"
            )));
        }
        Ok(Self(set))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.0.contains(id)
    }
}

/// Good iff every failed test is an expected failure.
pub fn classify_status(report: &StatusReport, expected: &ExpectedFailures) -> Classification {
    if report.failed_ids().iter().all(|id| expected.contains(id)) {
        Classification::Good
    } else {
        Classification::Suspect
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusMeta {
    pub technique: Technique,
    pub index: usize,
    pub sha256: String,
}

/// Everything about a campaign except the per-test records; written next
/// to the results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignMeta {
    pub fingerprint: String,
    pub version: String,
    pub battery: Battery,
    pub threshold: f64,
    pub modes: Vec<Mode>,
    pub statuses: Vec<StatusMeta>,
    /// Inputs that could not be read, by file name.
    pub skipped: Vec<String>,
}

impl CampaignMeta {
    pub fn battery_ids(&self) -> BTreeSet<String> {
        self.battery.ids().map(str::to_string).collect()
    }

    /// LinearComp entries of the battery.
    pub fn default_expected(&self) -> ExpectedFailures {
        ExpectedFailures(self.battery.linear_comp_ids().into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub meta: CampaignMeta,
    /// Sorted by (technique, index, mode).
    pub reports: Vec<StatusReport>,
}

/// Status files gathered from directories and single files.
#[derive(Debug, Default)]
pub struct LoadedInputs {
    pub statuses: Vec<LoadedStatus>,
    pub failures: Vec<(PathBuf, Error)>,
}

/// Loads every status file under `dirs` plus `files`. With `strict`, the
/// first unreadable file aborts; otherwise it is recorded and skipped.
pub fn load_inputs(dirs: &[PathBuf], files: &[PathBuf], strict: bool) -> Result<LoadedInputs> {
    let mut paths = Vec::new();
    for dir in dirs {
        paths.extend(list_status_files(dir)?);
    }
    paths.extend(files.iter().cloned());
    let mut out = LoadedInputs::default();
    let mut seen = BTreeSet::new();
    for path in paths {
        match load_status_file(&path) {
            Ok(s) => {
                if !seen.insert((s.technique, s.index)) {
                    return Err(Error::Config(format!(
                        "{}: duplicate status {}_{}",
                        path.display(),
                        s.technique,
                        s.index
                    )));
                }
                out.statuses.push(s);
            }
            Err(e) if !strict && e.is_input_error() => out.failures.push((path, e)),
            Err(e) => return Err(e),
        }
    }
    out.statuses.sort_by_key(|s| (s.technique, s.index));
    Ok(out)
}

/// Runs the battery over every (status, mode) unit.
pub fn run_campaign(config: &CampaignConfig, inputs: &LoadedInputs) -> Result<CampaignReport> {
    config.battery.validate()?;
    let units: Vec<(&LoadedStatus, Mode)> = inputs
        .statuses
        .iter()
        .flat_map(|s| config.modes.iter().map(move |&m| (s, m)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let mut reports = pool.install(|| {
        units
            .par_iter()
            .map(|(s, mode)| {
                run_battery_on_status(
                    (s.technique, s.index),
                    &s.state,
                    *mode,
                    &config.battery,
                    config.threshold,
                )
            })
            .collect::<Result<Vec<_>>>()
    })?;
    reports.sort_by_key(|r| (r.technique, r.index, r.mode));

    let mut skipped: Vec<String> = inputs
        .failures
        .iter()
        .map(|(p, _)| {
            p.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default()
        })
        .collect();
    skipped.sort();
    let meta = CampaignMeta {
        fingerprint: config.fingerprint(),
        version: CODE_VERSION.to_string(),
        battery: config.battery.clone(),
        threshold: config.threshold,
        modes: config.modes.clone(),
        statuses: inputs
            .statuses
            .iter()
            .map(|s| StatusMeta {
                technique: s.technique,
                index: s.index,
                sha256: s.sha256.clone(),
            })
            .collect(),
        skipped,
    };
    Ok(CampaignReport { meta, reports })
}

/// p-values are written with 17 significant digits so they parse back to
/// the same `f64`.
fn format_p(p: f64) -> String {
    format!("{p:.16e}")
}

/// One JSONL line per (status, mode, test), sorted by
/// (technique, index, mode, test id).
pub fn render_results(reports: &[StatusReport]) -> String {
    type Key<'a> = (Technique, usize, Mode, &'a str);
    let mut lines: Vec<(Key, String)> = Vec::new();
    for r in reports {
        for t in &r.results {
            let mut p_values: Vec<&(String, f64)> = t.p_values.iter().collect();
            p_values.sort_by(|a, b| a.0.cmp(&b.0));
            let p_json: Vec<String> = p_values
                .iter()
                .map(|(name, p)| format!("{}:{}", json_str(name), format_p(*p)))
                .collect();
            let line = format!(
                "{{\"technique\":{},\"index\":{},\"mode\":{},\"test_id\":{},\"p_values\":{{{}}},\"verdict\":{},\"draws\":{}}}",
                json_str(r.technique.as_str()),
                r.index,
                json_str(r.mode.as_str()),
                json_str(&t.id),
                p_json.join(","),
                json_str(t.verdict.as_str()),
                t.draws
            );
            lines.push(((r.technique, r.index, r.mode, t.id.as_str()), line));
        }
    }
    lines.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = String::new();
    for (_, line) in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

pub fn meta_path(results: &Path) -> PathBuf {
    let mut name = results.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes the results file and its `.meta.json` sidecar.
pub fn write_campaign(report: &CampaignReport, results: &Path) -> Result<()> {
    if let Some(parent) = results.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(results, render_results(&report.reports)).map_err(|e| Error::io(results, e))?;
    let meta = meta_path(results);
    let text = serde_json::to_string_pretty(&report.meta).expect("meta serializes") + "\n";
    fs::write(&meta, text).map_err(|e| Error::io(&meta, e))?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct Record {
    technique: Technique,
    index: usize,
    mode: Mode,
    test_id: String,
    p_values: BTreeMap<String, f64>,
    verdict: String,
    draws: u64,
}

/// Reads a results file and its sidecar back into a report.
pub fn read_campaign(results: &Path) -> Result<CampaignReport> {
    let meta_file = meta_path(results);
    let meta_text = fs::read_to_string(&meta_file).map_err(|e| Error::io(&meta_file, e))?;
    let meta: CampaignMeta = serde_json::from_str(&meta_text).map_err(|source| Error::Json {
        path: meta_file.clone(),
        source,
    })?;
    let text = fs::read_to_string(results).map_err(|e| Error::io(results, e))?;
    let mut grouped: BTreeMap<(Technique, usize, Mode), Vec<TestResult>> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let rec: Record = serde_json::from_str(line).map_err(|source| Error::Json {
            path: results.to_path_buf(),
            source,
        })?;
        let verdict = match rec.verdict.as_str() {
            "pass" => Verdict::Pass,
            "fail" => Verdict::Fail,
            other => {
                return Err(Error::Format(format!(
                    "{}:{}: unknown verdict `{other}`",
                    results.display(),
                    lineno + 1
                )))
            }
        };
        grouped
            .entry((rec.technique, rec.index, rec.mode))
            .or_default()
            .push(TestResult {
                id: rec.test_id,
                p_values: rec.p_values.into_iter().collect(),
                verdict,
                draws: rec.draws,
            });
    }
    // records are sorted by test id on disk; restore battery order
    let position: BTreeMap<&str, usize> = meta
        .battery
        .ids()
        .enumerate()
        .map(|(i, id)| (id, i))
        .collect();
    let reports = grouped
        .into_iter()
        .map(|((technique, index, mode), mut results)| {
            results.sort_by_key(|t| position.get(t.id.as_str()).copied().unwrap_or(usize::MAX));
            StatusReport {
                technique,
                index,
                mode,
                results,
            }
        })
        .collect();
    Ok(CampaignReport { meta, reports })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub technique: Technique,
    pub mode: Mode,
    pub statuses: usize,
    pub suspect: usize,
    pub fraction: f64,
}

/// Suspect count and share per (technique, mode).
pub fn technique_summary(report: &CampaignReport, expected: &ExpectedFailures) -> Vec<SummaryRow> {
    let mut counts: BTreeMap<(Technique, Mode), (usize, usize)> = BTreeMap::new();
    for r in &report.reports {
        let entry = counts.entry((r.technique, r.mode)).or_default();
        entry.0 += 1;
        if classify_status(r, expected) == Classification::Suspect {
            entry.1 += 1;
        }
    }
    counts
        .into_iter()
        .map(|((technique, mode), (statuses, suspect))| SummaryRow {
            technique,
            mode,
            statuses,
            suspect,
            fraction: suspect as f64 / statuses as f64,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HistogramRow {
    pub technique: Technique,
    pub mode: Mode,
    /// Total tests failed, expected failures included.
    pub n_failed: usize,
    pub statuses: usize,
}

/// How many tests each Suspect status failed, per (technique, mode).
pub fn failure_histogram(
    report: &CampaignReport,
    expected: &ExpectedFailures,
) -> Vec<HistogramRow> {
    let mut counts: BTreeMap<(Technique, Mode, usize), usize> = BTreeMap::new();
    for r in &report.reports {
        if classify_status(r, expected) == Classification::Suspect {
            *counts
                .entry((r.technique, r.mode, r.n_failed()))
                .or_default() += 1;
        }
    }
    counts
        .into_iter()
        .map(|((technique, mode, n_failed), statuses)| HistogramRow {
            technique,
            mode,
            n_failed,
            statuses,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyRow {
    pub test_id: String,
    pub technique: Technique,
    pub mode: Mode,
    pub failures: usize,
    pub statuses: usize,
    pub fraction: f64,
}

/// Failure share of every battery test per (technique, mode), most
/// frequent first.
pub fn per_test_frequency(report: &CampaignReport) -> Vec<FrequencyRow> {
    let mut totals: BTreeMap<(Technique, Mode), usize> = BTreeMap::new();
    let mut fails: BTreeMap<(String, Technique, Mode), usize> = BTreeMap::new();
    for r in &report.reports {
        *totals.entry((r.technique, r.mode)).or_default() += 1;
        for t in &r.results {
            let e = fails
                .entry((t.id.clone(), r.technique, r.mode))
                .or_default();
            if t.verdict == Verdict::Fail {
                *e += 1;
            }
        }
    }
    let mut rows: Vec<FrequencyRow> = fails
        .into_iter()
        .map(|((test_id, technique, mode), failures)| {
            let statuses = totals[&(technique, mode)];
            FrequencyRow {
                test_id,
                technique,
                mode,
                failures,
                statuses,
                fraction: failures as f64 / statuses as f64,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.fraction
            .total_cmp(&a.fraction)
            .then_with(|| a.test_id.cmp(&b.test_id))
            .then_with(|| (a.technique, a.mode).cmp(&(b.technique, b.mode)))
    });
    rows
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub technique: Technique,
    pub index: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualityRegistry {
    pub fingerprint: String,
    pub expected_fail: Vec<String>,
    pub modes: Vec<Mode>,
    pub entries: Vec<RegistryEntry>,
}

impl QualityRegistry {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            writeln!(out, "{} {} {}", e.technique, e.index, e.sha256).unwrap();
        }
        out
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("registry serializes") + "\n"
    }
}

/// Statuses that are Good in every mode the campaign ran.
pub fn build_registry(report: &CampaignReport, expected: &ExpectedFailures) -> QualityRegistry {
    let mut verdicts: BTreeMap<(Technique, usize), (usize, bool)> = BTreeMap::new();
    for r in &report.reports {
        let e = verdicts.entry((r.technique, r.index)).or_insert((0, true));
        e.0 += 1;
        e.1 &= classify_status(r, expected) == Classification::Good;
    }
    let checksums: BTreeMap<(Technique, usize), &str> = report
        .meta
        .statuses
        .iter()
        .map(|s| ((s.technique, s.index), s.sha256.as_str()))
        .collect();
    let n_modes = report.meta.modes.len();
    let entries = verdicts
        .into_iter()
        .filter(|(_, (seen, good))| *good && *seen == n_modes)
        .map(|((technique, index), _)| RegistryEntry {
            technique,
            index,
            sha256: checksums
                .get(&(technique, index))
                .copied()
                .unwrap_or_default()
                .to_string(),
        })
        .collect();
    QualityRegistry {
        fingerprint: report.meta.fingerprint.clone(),
        expected_fail: expected.ids().map(str::to_string).collect(),
        modes: report.meta.modes.clone(),
        entries,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    Summary,
    Histogram,
    PerTest,
}

fn percent(f: f64) -> String {
    format!("{:.2}", f * 100.0)
}

fn render_rows(format: TableFormat, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            writeln!(out, "{}", header.join(",")).unwrap();
            for r in rows {
                writeln!(out, "{}", r.join(",")).unwrap();
            }
        }
        TableFormat::Markdown => {
            writeln!(out, "| {} |", header.join(" | ")).unwrap();
            let rule: Vec<&str> = header.iter().map(|_| "---").collect();
            writeln!(out, "| {} |", rule.join(" | ")).unwrap();
            for r in rows {
                writeln!(out, "| {} |", r.join(" | ")).unwrap();
            }
        }
        TableFormat::Json => unreachable!("json tables are serialized directly"),
    }
    out
}

/// Renders one aggregate table.
pub fn render_table(
    report: &CampaignReport,
    expected: &ExpectedFailures,
    table: Table,
    format: TableFormat,
) -> String {
    match table {
        Table::Summary => {
            let rows = technique_summary(report, expected);
            if format == TableFormat::Json {
                return serde_json::to_string_pretty(&rows).unwrap() + "\n";
            }
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.technique.to_string(),
                        r.mode.to_string(),
                        r.suspect.to_string(),
                        r.statuses.to_string(),
                        percent(r.fraction),
                    ]
                })
                .collect();
            render_rows(
                format,
                &["technique", "mode", "suspect", "statuses", "percent"],
                &cells,
            )
        }
        Table::Histogram => {
            let rows = failure_histogram(report, expected);
            if format == TableFormat::Json {
                return serde_json::to_string_pretty(&rows).unwrap() + "\n";
            }
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.technique.to_string(),
                        r.mode.to_string(),
                        r.n_failed.to_string(),
                        r.statuses.to_string(),
                    ]
                })
                .collect();
            render_rows(
                format,
                &["technique", "mode", "n_failed", "statuses"],
                &cells,
            )
        }
        Table::PerTest => {
            let rows = per_test_frequency(report);
            if format == TableFormat::Json {
                return serde_json::to_string_pretty(&rows).unwrap() + "\n";
            }
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.test_id.clone(),
                        r.technique.to_string(),
                        r.mode.to_string(),
                        r.failures.to_string(),
                        r.statuses.to_string(),
                        percent(r.fraction),
                    ]
                })
                .collect();
            render_rows(
                format,
                &[
                    "test_id",
                    "technique",
                    "mode",
                    "failures",
                    "statuses",
                    "percent",
                ],
                &cells,
            )
        }
    }
}

/// Full-scale figures reported for 4096 statuses per technique under the
/// 106-test Big Crush battery. Reference only; the desk battery is not
/// comparable.
pub mod full_scale {
    /// (technique/mode label, suspect statuses, total).
    pub const SUSPECT_COUNTS: [(&str, usize, usize); 3] = [
        ("random spacing int", 1185, 4096),
        ("sequence splitting int", 1156, 4096),
        ("indexed sequence int", 1139, 4096),
    ];
    /// Failure-count histogram for random spacing, int mode.
    pub const RANDOM_SPACING_INT_HISTOGRAM: [(usize, usize); 4] =
        [(3, 990), (4, 172), (5, 21), (6, 2)];
    pub const MAX_TESTS_FAILED: usize = 6;
    pub const CPU_YEARS: usize = 33;
}
