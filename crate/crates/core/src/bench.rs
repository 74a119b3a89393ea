//! Benchmark harness: deviation metrics, instance statistics and suite runs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{self, SolveConfig, SolveStatus};
use crate::heur::{self, GraspConfig, HeurError};
use crate::model::{self, Cost, Instance};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("best-known entry {instance} (kappa {kappa}): lb {lb} exceeds ub {ub}")]
    CrossedBounds {
        instance: String,
        kappa: u64,
        lb: Cost,
        ub: Cost,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// `100 (lb_bk - lb_m) / lb_bk` as an exact fraction; `None` for a zero reference.
pub fn deviation_lb_exact(lb_bk: Cost, lb_m: Cost) -> Option<Ratio<i128>> {
    (lb_bk > 0).then(|| {
        Ratio::new(
            100 * (i128::from(lb_bk) - i128::from(lb_m)),
            i128::from(lb_bk),
        )
    })
}

/// `100 (ub_m - ub_bk) / ub_bk` as an exact fraction; `None` for a zero
/// reference. Negative values mean the method improved the reference.
pub fn deviation_ub_exact(ub_bk: Cost, ub_m: Cost) -> Option<Ratio<i128>> {
    (ub_bk > 0).then(|| {
        Ratio::new(
            100 * (i128::from(ub_m) - i128::from(ub_bk)),
            i128::from(ub_bk),
        )
    })
}

fn ratio_to_f64(r: Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Lower bound deviation in percent.
pub fn deviation_lb(lb_bk: Cost, lb_m: Cost) -> Option<f64> {
    deviation_lb_exact(lb_bk, lb_m).map(ratio_to_f64)
}

/// Upper bound deviation in percent.
pub fn deviation_ub(ub_bk: Cost, ub_m: Cost) -> Option<f64> {
    deviation_ub_exact(ub_bk, ub_m).map(ratio_to_f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BestKnown {
    pub lb: Cost,
    pub ub: Cost,
}

/// Reference bounds keyed by `(instance, kappa)`, read from
/// `instance,kappa,lb,ub` CSV.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BestKnownTable {
    entries: HashMap<(String, u64), BestKnown>,
}

#[derive(Debug, Deserialize)]
struct BestKnownRow {
    instance: String,
    kappa: u64,
    lb: Cost,
    ub: Cost,
}

impl BestKnownTable {
    pub fn from_csv(reader: impl std::io::Read) -> Result<Self, BenchError> {
        let mut table = BestKnownTable::default();
        for row in csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader)
            .deserialize()
        {
            let row: BestKnownRow = row?;
            table.insert(&row.instance, row.kappa, row.lb, row.ub)?;
        }
        Ok(table)
    }

    pub fn insert(
        &mut self,
        instance: &str,
        kappa: u64,
        lb: Cost,
        ub: Cost,
    ) -> Result<(), BenchError> {
        if lb > ub {
            return Err(BenchError::CrossedBounds {
                instance: instance.into(),
                kappa,
                lb,
                ub,
            });
        }
        self.entries
            .insert((instance.to_string(), kappa), BestKnown { lb, ub });
        Ok(())
    }

    pub fn get(&self, instance: &str, kappa: u64) -> Option<BestKnown> {
        self.entries.get(&(instance.to_string(), kappa)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One row of the instance characteristics table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsRow {
    pub name: String,
    pub elements: usize,
    pub subsets: usize,
    /// Conflict count per kappa.
    pub conflicts: BTreeMap<u64, usize>,
}

/// Splits a generated name `<base>-k<kappa>`.
pub fn split_derived_name(name: &str) -> Option<(&str, u64)> {
    let (base, k) = name.rsplit_once("-k")?;
    Some((base, k.parse().ok()?))
}

/// Groups generated instances by base name, in order of first appearance.
/// Instances whose names carry no kappa suffix are listed under kappa 0.
pub fn stats_report(instances: &[Instance]) -> Vec<StatsRow> {
    let mut rows: Vec<StatsRow> = Vec::new();
    for inst in instances {
        let (base, kappa) = split_derived_name(inst.name()).unwrap_or((inst.name(), 0));
        let pos = match rows.iter().position(|r| r.name == base) {
            Some(p) => p,
            None => {
                rows.push(StatsRow {
                    name: base.to_string(),
                    elements: inst.num_elements(),
                    subsets: inst.num_subsets(),
                    conflicts: BTreeMap::new(),
                });
                rows.len() - 1
            }
        };
        rows[pos].conflicts.insert(kappa, inst.conflicts().len());
    }
    rows
}

/// Aligned text rendering of [`stats_report`] rows.
pub fn format_stats_table(rows: &[StatsRow]) -> String {
    let kappas: BTreeSet<u64> = rows
        .iter()
        .flat_map(|r| r.conflicts.keys().copied())
        .collect();
    let mut header = vec!["instance".to_string(), "|U|".into(), "|N|".into()];
    header.extend(kappas.iter().map(|k| format!("|D| k={k}")));
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut cells = vec![
                r.name.clone(),
                r.elements.to_string(),
                r.subsets.to_string(),
            ];
            cells.extend(
                kappas
                    .iter()
                    .map(|k| r.conflicts.get(k).map_or("-".into(), |d| d.to_string())),
            );
            cells
        })
        .collect();
    align(&header, &body)
}

fn align(header: &[String], body: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in body {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    for row in std::iter::once(header).chain(body.iter().map(Vec::as_slice)) {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| {
                if i == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

/// A solver under benchmark.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    /// Branch-and-bound; optionally warm-started with a GRASP incumbent.
    Exact {
        warm_start: Option<GraspConfig>,
    },
    Grasp(GraspConfig),
    Greedy,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact { warm_start: None } => "exact",
            Method::Exact {
                warm_start: Some(_),
            } => "exact-warm",
            Method::Grasp(_) => "grasp",
            Method::Greedy => "greedy",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Per-run wall clock limit.
    pub time_limit: Duration,
    pub node_limit: Option<u64>,
    pub jobs: usize,
    /// When false, time columns are left empty so output is reproducible.
    pub record_times: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            time_limit: Duration::from_secs(3600),
            node_limit: None,
            jobs: 1,
            record_times: true,
        }
    }
}

/// A suite member: base instance name, kappa and the generated instance.
#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub name: String,
    pub kappa: u64,
    pub instance: Instance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance_name: String,
    pub kappa: u64,
    pub method_name: String,
    pub lower_bound: Option<Cost>,
    pub upper_bound: Option<Cost>,
    pub status: SolveStatus,
    pub time_to_best_s: Option<f64>,
    pub time_total_s: Option<f64>,
    pub lb_deviation_pct: Option<f64>,
    pub ub_deviation_pct: Option<f64>,
}

impl BenchRecord {
    /// Fills the deviation columns from a reference table.
    pub fn with_deviations(mut self, best: &BestKnownTable) -> Self {
        let bk = best.get(&self.instance_name, self.kappa);
        self.lb_deviation_pct = bk
            .zip(self.lower_bound)
            .and_then(|(b, lb)| deviation_lb(b.lb, lb));
        self.ub_deviation_pct = bk
            .zip(self.upper_bound)
            .and_then(|(b, ub)| deviation_ub(b.ub, ub));
        self
    }
}

/// Per-method means over the records where each column is defined.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub method_name: String,
    pub records: usize,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
    pub time_to_best_s: Option<f64>,
    pub time_total_s: Option<f64>,
    pub lb_deviation_pct: Option<f64>,
    pub ub_deviation_pct: Option<f64>,
    /// How many records contributed to each deviation mean.
    pub lb_deviation_count: usize,
    pub ub_deviation_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub records: Vec<BenchRecord>,
    pub aggregates: Vec<AggregateRow>,
}

struct RunOutcome {
    lower: Option<Cost>,
    upper: Option<Cost>,
    status: SolveStatus,
    time_to_best: Duration,
}

fn run_method(inst: &Instance, method: &Method, cfg: &BenchConfig) -> RunOutcome {
    let heur_outcome = |res: Result<heur::GraspOutcome, HeurError>| match res {
        Ok(out) => RunOutcome {
            lower: None,
            upper: Some(out.total),
            status: SolveStatus::Feasible,
            time_to_best: out.time_to_best,
        },
        Err(HeurError::Uncoverable(_)) => RunOutcome {
            lower: None,
            upper: None,
            status: SolveStatus::Infeasible,
            time_to_best: Duration::ZERO,
        },
        Err(_) => RunOutcome {
            lower: None,
            upper: None,
            status: SolveStatus::Unknown,
            time_to_best: Duration::ZERO,
        },
    };
    match method {
        Method::Exact { warm_start } => {
            let start = Instant::now();
            let initial_incumbent = warm_start
                .as_ref()
                .and_then(|g| {
                    heur::grasp(
                        inst,
                        &GraspConfig {
                            time_limit: cfg.time_limit,
                            ..g.clone()
                        },
                    )
                    .ok()
                })
                .map(|o| o.solution);
            let solve_cfg = SolveConfig {
                time_limit: cfg.time_limit.saturating_sub(start.elapsed()),
                node_limit: cfg.node_limit,
                initial_incumbent,
                ..Default::default()
            };
            let rep = exact::solve(inst, &solve_cfg);
            if exact::verify_certificate(inst, &rep).is_err() {
                return RunOutcome {
                    lower: None,
                    upper: None,
                    status: SolveStatus::Unknown,
                    time_to_best: rep.time_to_best,
                };
            }
            let lower = (rep.status != SolveStatus::Infeasible).then_some(rep.lower_bound);
            RunOutcome {
                lower,
                upper: rep.upper_bound,
                status: rep.status,
                time_to_best: rep.time_to_best,
            }
        }
        Method::Grasp(g) => heur_outcome(heur::grasp(
            inst,
            &GraspConfig {
                time_limit: cfg.time_limit,
                ..g.clone()
            },
        )),
        Method::Greedy => {
            let start = Instant::now();
            heur_outcome(heur::greedy(inst).and_then(|s| {
                let total = model::evaluate(inst, &s)?.total;
                Ok(heur::GraspOutcome {
                    solution: s,
                    total,
                    iteration_found: 0,
                    iterations_run: 1,
                    time_to_best: start.elapsed(),
                })
            }))
        }
    }
}

fn guarded(f: impl FnOnce() -> RunOutcome) -> RunOutcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(RunOutcome {
        lower: None,
        upper: None,
        status: SolveStatus::Unknown,
        time_to_best: Duration::ZERO,
    })
}

fn run_one(
    entry: &SuiteEntry,
    method: &Method,
    cfg: &BenchConfig,
    best: &BestKnownTable,
) -> BenchRecord {
    let start = Instant::now();
    let outcome = guarded(|| run_method(&entry.instance, method, cfg));
    let total = start.elapsed();
    BenchRecord {
        instance_name: entry.name.clone(),
        kappa: entry.kappa,
        method_name: method.name().to_string(),
        lower_bound: outcome.lower,
        upper_bound: outcome.upper,
        status: outcome.status,
        time_to_best_s: cfg
            .record_times
            .then_some(outcome.time_to_best.as_secs_f64()),
        time_total_s: cfg.record_times.then_some(total.as_secs_f64()),
        lb_deviation_pct: None,
        ub_deviation_pct: None,
    }
    .with_deviations(best)
}

fn mean(values: impl Iterator<Item = f64>) -> (Option<f64>, usize) {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    ((count > 0).then(|| sum / count as f64), count)
}

/// Means per method, methods in first-appearance order.
pub fn aggregate(records: &[BenchRecord]) -> Vec<AggregateRow> {
    let mut methods: Vec<&str> = Vec::new();
    for r in records {
        if !methods.contains(&r.method_name.as_str()) {
            methods.push(&r.method_name);
        }
    }
    methods
        .into_iter()
        .map(|m| {
            let rs: Vec<&BenchRecord> = records.iter().filter(|r| r.method_name == m).collect();
            let (lb_dev, lb_n) = mean(rs.iter().filter_map(|r| r.lb_deviation_pct));
            let (ub_dev, ub_n) = mean(rs.iter().filter_map(|r| r.ub_deviation_pct));
            AggregateRow {
                method_name: m.to_string(),
                records: rs.len(),
                lower_bound: mean(rs.iter().filter_map(|r| r.lower_bound.map(|v| v as f64))).0,
                upper_bound: mean(rs.iter().filter_map(|r| r.upper_bound.map(|v| v as f64))).0,
                time_to_best_s: mean(rs.iter().filter_map(|r| r.time_to_best_s)).0,
                time_total_s: mean(rs.iter().filter_map(|r| r.time_total_s)).0,
                lb_deviation_pct: lb_dev,
                ub_deviation_pct: ub_dev,
                lb_deviation_count: lb_n,
                ub_deviation_count: ub_n,
            }
        })
        .collect()
}

/// Runs every method on every entry. Records come back sorted by
/// `(instance, kappa, method)` regardless of scheduling.
pub fn run_suite(
    entries: &[SuiteEntry],
    methods: &[Method],
    cfg: &BenchConfig,
    best: &BestKnownTable,
) -> Result<SuiteResult, BenchError> {
    let jobs: Vec<(&SuiteEntry, &Method)> = entries
        .iter()
        .flat_map(|e| methods.iter().map(move |m| (e, m)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| BenchError::Pool(e.to_string()))?;
    let mut records: Vec<BenchRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|(e, m)| run_one(e, m, cfg, best))
            .collect()
    });
    records.sort_by(|a, b| {
        (&a.instance_name, a.kappa, &a.method_name).cmp(&(
            &b.instance_name,
            b.kappa,
            &b.method_name,
        ))
    });
    let aggregates = aggregate(&records);
    Ok(SuiteResult {
        records,
        aggregates,
    })
}

/// Parses a suite manifest: one `<scpcs-file> <kappa>` pair per line, `#`
/// comments and blank lines ignored, relative paths resolved against `base`.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<(PathBuf, u64)>, BenchError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: &str| BenchError::Parse {
            line: idx + 1,
            message: message.to_string(),
        };
        let mut fields = line.split_whitespace();
        let (Some(file), Some(kappa), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(err("expected `<scpcs-file> <kappa>`"));
        };
        let kappa = kappa
            .parse()
            .map_err(|_| err("kappa must be a nonnegative integer"))?;
        out.push((base.join(file), kappa));
    }
    Ok(out)
}

pub const RESULTS_HEADER: [&str; 10] = [
    "instance",
    "kappa",
    "method",
    "lb",
    "ub",
    "status",
    "time_to_best_s",
    "time_total_s",
    "lb_dev_pct",
    "ub_dev_pct",
];

/// Instance column value marking aggregate rows in results CSV.
pub const AGGREGATE_MARKER: &str = "AVERAGE";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

fn pct4(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| format!("{v:.4}"))
}

fn secs(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| format!("{v:.6}"))
}

/// Results CSV: one line per record, then one `AVERAGE` line per method
/// whose status column holds the record count.
pub fn write_results_csv(result: &SuiteResult) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULTS_HEADER)?;
    for r in &result.records {
        w.write_record([
            r.instance_name.clone(),
            r.kappa.to_string(),
            r.method_name.clone(),
            opt(r.lower_bound),
            opt(r.upper_bound),
            r.status.to_string(),
            secs(r.time_to_best_s),
            secs(r.time_total_s),
            pct4(r.lb_deviation_pct),
            pct4(r.ub_deviation_pct),
        ])?;
    }
    for a in &result.aggregates {
        w.write_record([
            AGGREGATE_MARKER.to_string(),
            String::new(),
            a.method_name.clone(),
            pct4(a.lower_bound),
            pct4(a.upper_bound),
            format!("n={}", a.records),
            secs(a.time_to_best_s),
            secs(a.time_total_s),
            pct4(a.lb_deviation_pct),
            pct4(a.ub_deviation_pct),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Parse {
        line: 0,
        message: e.to_string(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Parses results CSV back into records and aggregate rows. Aggregate
/// deviation counts are not stored in the file and come back as zero.
pub fn read_results_csv(text: &str) -> Result<(Vec<BenchRecord>, Vec<AggregateRow>), BenchError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut records = Vec::new();
    let mut aggregates = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row?;
        let line = idx + 2;
        let err = |message: String| BenchError::Parse { line, message };
        let field = |k: usize| row.get(k).unwrap_or("");
        fn parse<T: std::str::FromStr>(s: &str) -> Result<Option<T>, String> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| format!("bad value {s:?}"))
            }
        }
        if row.len() != RESULTS_HEADER.len() {
            return Err(err(format!(
                "expected {} fields, found {}",
                RESULTS_HEADER.len(),
                row.len()
            )));
        }
        if field(0) == AGGREGATE_MARKER {
            let records_n = field(5).strip_prefix("n=").and_then(|n| n.parse().ok());
            aggregates.push(AggregateRow {
                method_name: field(2).to_string(),
                records: records_n.ok_or_else(|| err("aggregate count missing".into()))?,
                lower_bound: parse(field(3)).map_err(err)?,
                upper_bound: parse(field(4)).map_err(err)?,
                time_to_best_s: parse(field(6)).map_err(err)?,
                time_total_s: parse(field(7)).map_err(err)?,
                lb_deviation_pct: parse(field(8)).map_err(err)?,
                ub_deviation_pct: parse(field(9)).map_err(err)?,
                lb_deviation_count: 0,
                ub_deviation_count: 0,
            });
            continue;
        }
        records.push(BenchRecord {
            instance_name: field(0).to_string(),
            kappa: parse(field(1))
                .map_err(err)?
                .ok_or_else(|| err("kappa missing".into()))?,
            method_name: field(2).to_string(),
            lower_bound: parse(field(3)).map_err(err)?,
            upper_bound: parse(field(4)).map_err(err)?,
            status: field(5).parse().map_err(err)?,
            time_to_best_s: parse(field(6)).map_err(err)?,
            time_total_s: parse(field(7)).map_err(err)?,
            lb_deviation_pct: parse(field(8)).map_err(err)?,
            ub_deviation_pct: parse(field(9)).map_err(err)?,
        });
    }
    Ok((records, aggregates))
}

/// Human-readable results table with two-decimal percentages.
pub fn format_results_table(result: &SuiteResult) -> String {
    let pct2 = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2}"));
    let t2 = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2}"));
    let header: Vec<String> = [
        "instance", "k", "method", "LB", "UB", "status", "Heu s", "Tot s", "LB dev%", "UB dev%",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut body: Vec<Vec<String>> = result
        .records
        .iter()
        .map(|r| {
            vec![
                r.instance_name.clone(),
                r.kappa.to_string(),
                r.method_name.clone(),
                opt(r.lower_bound),
                opt(r.upper_bound),
                r.status.to_string(),
                t2(r.time_to_best_s),
                t2(r.time_total_s),
                pct2(r.lb_deviation_pct),
                pct2(r.ub_deviation_pct),
            ]
        })
        .collect();
    for a in &result.aggregates {
        body.push(vec![
            AGGREGATE_MARKER.to_string(),
            String::new(),
            a.method_name.clone(),
            pct2(a.lower_bound),
            pct2(a.upper_bound),
            format!(
                "n={} ({}/{})",
                a.records, a.lb_deviation_count, a.ub_deviation_count
            ),
            t2(a.time_to_best_s),
            t2(a.time_total_s),
            pct2(a.lb_deviation_pct),
            pct2(a.ub_deviation_pct),
        ]);
    }
    align(&header, &body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgen::random_instance;
    use proptest::prelude::*;

    #[test]
    fn deviation_examples() {
        assert_eq!(deviation_lb(100, 95), Some(5.0));
        assert_eq!(deviation_lb(100, 100), Some(0.0));
        let d = deviation_ub(1360, 1348).unwrap();
        assert!((d - (-0.8824)).abs() < 1e-4, "{d}");
        assert_eq!(
            deviation_ub_exact(1360, 1348),
            Some(Ratio::new(-1200, 1360))
        );
        assert_eq!(deviation_lb(0, 3), None);
        assert_eq!(deviation_ub(0, 3), None);
    }

    #[test]
    fn best_known_csv() {
        let t = BestKnownTable::from_csv(
            "instance,kappa,lb,ub\nscp41,1,400,429\nscp41,2,300, 310\n".as_bytes(),
        )
        .unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("scp41", 2), Some(BestKnown { lb: 300, ub: 310 }));
        assert!(matches!(
            BestKnownTable::from_csv("instance,kappa,lb,ub\na,1,5,4\n".as_bytes()),
            Err(BenchError::CrossedBounds { .. })
        ));
    }

    #[test]
    fn stats_rows() {
        assert!(stats_report(&[]).is_empty());
        let base = random_instance(1, 10, 6, 0.3);
        let a = base.clone().with_name("r-k1");
        let b = Instance::new(
            "r-k2",
            10,
            base.costs().to_vec(),
            base.all_members().to_vec(),
            vec![],
        )
        .unwrap();
        let rows = stats_report(&[a.clone(), b]);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].name, "r");
        assert_eq!(rows[0].conflicts.get(&1), Some(&a.conflicts().len()));
        assert_eq!(rows[0].conflicts.get(&2), Some(&0));
        let table = format_stats_table(&rows);
        assert!(table.lines().nth(1).unwrap().starts_with("r "));
    }

    #[test]
    fn aggregate_means() {
        let rec = |dev: Option<f64>| BenchRecord {
            instance_name: "a".into(),
            kappa: 1,
            method_name: "m".into(),
            lower_bound: Some(10),
            upper_bound: Some(12),
            status: SolveStatus::Feasible,
            time_to_best_s: None,
            time_total_s: None,
            lb_deviation_pct: dev,
            ub_deviation_pct: None,
        };
        let agg = aggregate(&[rec(Some(5.0)), rec(Some(0.0)), rec(None)]);
        assert_eq!(agg[0].lb_deviation_pct, Some(2.5));
        assert_eq!(agg[0].lb_deviation_count, 2);
        assert_eq!(agg[0].ub_deviation_pct, None);
        assert_eq!(agg[0].records, 3);
    }

    #[test]
    fn known_optimum_has_zero_deviation() {
        let inst = crate::toy::fig1_instance(1, 10);
        let mut best = BestKnownTable::default();
        best.insert("fig1", 0, 3, 3).unwrap();
        let entries = [SuiteEntry {
            name: "fig1".into(),
            kappa: 0,
            instance: inst,
        }];
        let res = run_suite(
            &entries,
            &[Method::Exact { warm_start: None }],
            &BenchConfig::default(),
            &best,
        )
        .unwrap();
        let r = &res.records[0];
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(
            (r.lb_deviation_pct, r.ub_deviation_pct),
            (Some(0.0), Some(0.0))
        );
    }

    #[test]
    fn csv_round_trip_and_independent_aggregates() {
        let entries: Vec<SuiteEntry> = (0..4)
            .map(|s| SuiteEntry {
                name: format!("r{s}"),
                kappa: 1,
                instance: random_instance(s, 14, 10, 0.3),
            })
            .collect();
        let mut best = BestKnownTable::default();
        for e in &entries {
            let opt = crate::oracle::brute_force_optimum(&e.instance, 20)
                .unwrap()
                .total;
            best.insert(&e.name, 1, opt.saturating_sub(1).max(1), opt + 1)
                .unwrap();
        }
        let methods = [
            Method::Exact { warm_start: None },
            Method::Greedy,
            Method::Grasp(GraspConfig {
                iterations: 10,
                ..Default::default()
            }),
        ];
        let cfg = BenchConfig {
            jobs: 3,
            ..Default::default()
        };
        let res = run_suite(&entries, &methods, &cfg, &best).unwrap();
        let text = write_results_csv(&res).unwrap();
        assert!(text.starts_with("instance,kappa,method,lb,ub,status,time_to_best_s,time_total_s,lb_dev_pct,ub_dev_pct\n"));
        let (records, aggregates) = read_results_csv(&text).unwrap();
        assert_eq!(records.len(), res.records.len());
        let close = |a: Option<f64>, b: Option<f64>, tol: f64| match (a, b) {
            (Some(a), Some(b)) => (a - b).abs() <= tol,
            (None, None) => true,
            _ => false,
        };
        for (a, b) in records.iter().zip(&res.records) {
            assert_eq!(
                (
                    &a.instance_name,
                    a.kappa,
                    &a.method_name,
                    a.lower_bound,
                    a.upper_bound,
                    a.status
                ),
                (
                    &b.instance_name,
                    b.kappa,
                    &b.method_name,
                    b.lower_bound,
                    b.upper_bound,
                    b.status
                )
            );
            assert!(close(a.lb_deviation_pct, b.lb_deviation_pct, 5e-5));
            assert!(close(a.ub_deviation_pct, b.ub_deviation_pct, 5e-5));
            assert!(close(a.time_total_s, b.time_total_s, 5e-7));
        }
        // recompute the means from the parsed rows
        let again = aggregate(&records);
        assert_eq!(again.len(), aggregates.len());
        for (a, b) in again.iter().zip(&aggregates) {
            assert_eq!(a.method_name, b.method_name);
            assert_eq!(a.records, b.records);
            assert!(close(a.ub_deviation_pct, b.ub_deviation_pct, 1e-4));
            assert!(close(a.lb_deviation_pct, b.lb_deviation_pct, 1e-4));
        }
        let table = format_results_table(&res);
        assert!(table.contains("AVERAGE"));
    }

    #[test]
    fn panicking_method_becomes_unknown() {
        let out = guarded(|| panic!("solver bug"));
        assert_eq!(out.status, SolveStatus::Unknown);
        assert_eq!((out.lower, out.upper), (None, None));
    }

    #[test]
    fn manifest_lines() {
        let text = "# suite\nscp41-k1.scpcs 1\n\n/abs/x.scpcs 2\n";
        let entries = parse_manifest(text, std::path::Path::new("/data")).unwrap();
        assert_eq!(
            entries,
            vec![
                (std::path::PathBuf::from("/data/scp41-k1.scpcs"), 1),
                (std::path::PathBuf::from("/abs/x.scpcs"), 2)
            ]
        );
        assert!(parse_manifest("a.scpcs\n", std::path::Path::new(".")).is_err());
        assert!(parse_manifest("a.scpcs one\n", std::path::Path::new(".")).is_err());
    }

    proptest! {
        #[test]
        fn ub_deviation_is_antisymmetric(r in 1u64..1_000_000, d in 0u64..1_000_000) {
            prop_assume!(d <= r);
            let up = deviation_ub_exact(r, r + d).unwrap();
            let down = deviation_ub_exact(r, r - d).unwrap();
            prop_assert_eq!(up, -down);
            prop_assert_eq!(deviation_lb_exact(r, r).unwrap(), Ratio::from_integer(0));
        }
    }
}
