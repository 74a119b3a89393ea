use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use scpcs::bench::{self, BenchConfig, BenchRecord, BestKnownTable, Method, SuiteEntry};
use scpcs::exact::{self, SolveConfig, SolveStatus};
use scpcs::heur::{self, GraspConfig, HeurError};
use scpcs::ingest;
use scpcs::lp;
use scpcs::model::{self, Instance};
use scpcs::oracle::{self, OracleError};
use scpcs::transform::{self, GammaRounding, GammaSource, TransformParams};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "scpcs",
    version,
    about = "Set covering with conflict penalties"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an OR-Library set covering file and report its size
    Parse { file: PathBuf },
    /// Generate a penalized instance from an OR-Library file
    Transform {
        file: PathBuf,
        #[arg(long)]
        kappa: u64,
        #[arg(long, default_value = "half-up")]
        rounding: GammaRounding,
        #[arg(long, default_value = "merged")]
        gamma_source: GammaSource,
        /// Base name of the generated instance (defaults to the file stem)
        #[arg(long)]
        name: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Branch-and-bound with certified bounds
    Solve {
        file: PathBuf,
        #[arg(long, default_value_t = 3600.0)]
        time_limit: f64,
        #[arg(long)]
        node_limit: Option<u64>,
        /// Seed the search with a GRASP incumbent
        #[arg(long)]
        warm_start: bool,
        /// Append a JSON-lines record to this file
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        kappa: u64,
    },
    /// GRASP upper bound
    Grasp {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        iterations: u64,
        #[arg(long, default_value_t = 0.2)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3600.0)]
        time_limit: f64,
    },
    /// Exhaustive optimum for tiny instances
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = oracle::DEFAULT_MAX_SUBSETS)]
        max_n: usize,
    },
    /// Write the linearized model in CPLEX LP format
    ExportLp {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Instance characteristics for every OR-Library file in a directory
    Stats {
        dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        kappa: Vec<u64>,
        #[arg(long, default_value = "half-up")]
        rounding: GammaRounding,
    },
    /// Run solvers over a suite manifest (`<scpcs-file> <kappa>` per line)
    Bench {
        manifest: PathBuf,
        #[arg(long)]
        best_known: Option<PathBuf>,
        #[arg(long, default_value_t = 3600.0)]
        time_limit: f64,
        #[arg(long)]
        node_limit: Option<u64>,
        #[arg(long, value_delimiter = ',', default_value = "exact,grasp")]
        methods: Vec<String>,
        #[arg(long, default_value_t = 100)]
        iterations: u64,
        #[arg(long, default_value_t = 0.2)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Leave time columns empty (reproducible output)
        #[arg(long)]
        no_times: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn data(message: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_DATA,
            message: message.to_string(),
        }
    }

    fn usage(message: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }
}

type CliResult = Result<(), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CliResult {
    fs::write(path, contents).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn load_canonical(path: &Path) -> Result<Instance, Failure> {
    ingest::read_canonical(&read(path)?)
        .map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map_or_else(
        || "instance".to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

fn seconds(s: f64) -> Result<Duration, Failure> {
    Duration::try_from_secs_f64(s)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| Failure::usage(format!("time limit must be positive, got {s}")))
}

fn cmd_parse(file: &Path) -> CliResult {
    let raw = ingest::parse_orlib(&read(file)?).map_err(Failure::data)?;
    let inst = ingest::to_instance(&raw, &file_stem(file)).map_err(Failure::data)?;
    println!("m={} n={}", inst.num_elements(), inst.num_subsets());
    let findings = model::validate_instance(&inst);
    if findings.is_empty() {
        println!("valid");
    }
    for v in findings {
        println!("violation: {v}");
    }
    Ok(())
}

fn cmd_transform(
    file: &Path,
    params: TransformParams,
    name: Option<String>,
    output: Option<&Path>,
) -> CliResult {
    let raw = ingest::parse_orlib(&read(file)?).map_err(Failure::data)?;
    let base = name.unwrap_or_else(|| file_stem(file));
    let (inst, meta) = transform::pipeline(&raw, &base, &params).map_err(Failure::data)?;
    println!(
        "name={} m={} n={} |D|={} gamma={} rounding={} gamma_source={}",
        inst.name(),
        inst.num_elements(),
        inst.num_subsets(),
        inst.conflicts().len(),
        meta.gamma,
        meta.rounding,
        meta.gamma_source
    );
    if let Some(out) = output {
        write(out, &ingest::write_canonical(&inst).map_err(Failure::data)?)?;
    }
    Ok(())
}

fn cmd_solve(
    file: &Path,
    time_limit: Duration,
    node_limit: Option<u64>,
    warm_start: bool,
    json: Option<&Path>,
    kappa: u64,
) -> CliResult {
    let inst = load_canonical(file)?;
    let initial_incumbent = if warm_start {
        match heur::grasp(
            &inst,
            &GraspConfig {
                time_limit,
                ..Default::default()
            },
        ) {
            Ok(out) => {
                println!("warm start: {}", out.total);
                Some(out.solution)
            }
            Err(_) => None,
        }
    } else {
        None
    };
    let cfg = SolveConfig {
        time_limit,
        node_limit,
        initial_incumbent,
        ..Default::default()
    };
    let rep = exact::solve(&inst, &cfg);
    println!("status={}", rep.status);
    println!("lower_bound={}", rep.lower_bound);
    println!(
        "upper_bound={}",
        rep.upper_bound.map_or("-".into(), |u| u.to_string())
    );
    if let Some(sol) = &rep.incumbent {
        let b = model::evaluate(&inst, sol).map_err(Failure::data)?;
        println!(
            "cover_cost={} penalty_cost={}",
            b.cover_cost, b.penalty_cost
        );
        println!("selected={}", one_based(sol));
    }
    if let Some(k) = rep.uncoverable_element {
        println!("uncoverable element {}", k + 1);
    }
    println!("nodes={}", rep.nodes_explored);
    println!(
        "time_to_best={:.3}s time_total={:.3}s",
        rep.time_to_best.as_secs_f64(),
        rep.time_total.as_secs_f64()
    );
    exact::verify_certificate(&inst, &rep)
        .map_err(|e| Failure::data(format!("certificate check failed: {e}")))?;

    if let Some(path) = json {
        let (base, k) = bench::split_derived_name(inst.name()).unwrap_or((inst.name(), kappa));
        let record = BenchRecord {
            instance_name: base.to_string(),
            kappa: k,
            method_name: if warm_start { "exact-warm" } else { "exact" }.into(),
            lower_bound: (rep.status != SolveStatus::Infeasible).then_some(rep.lower_bound),
            upper_bound: rep.upper_bound,
            status: rep.status,
            time_to_best_s: Some(rep.time_to_best.as_secs_f64()),
            time_total_s: Some(rep.time_total.as_secs_f64()),
            lb_deviation_pct: None,
            ub_deviation_pct: None,
        };
        let line = serde_json::to_string(&record).map_err(Failure::data)?;
        let mut f = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
        writeln!(f, "{line}").map_err(Failure::data)?;
    }
    if rep.status == SolveStatus::Infeasible {
        return Err(Failure {
            code: EXIT_INFEASIBLE,
            message: "instance is infeasible".into(),
        });
    }
    Ok(())
}

fn one_based(sol: &model::Solution) -> String {
    sol.selected()
        .iter()
        .map(|j| (j + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_grasp(file: &Path, cfg: GraspConfig) -> CliResult {
    let inst = load_canonical(file)?;
    match heur::grasp(&inst, &cfg) {
        Ok(out) => {
            println!("total={}", out.total);
            println!("selected={}", one_based(&out.solution));
            println!(
                "iteration_found={} iterations_run={}",
                out.iteration_found, out.iterations_run
            );
            Ok(())
        }
        Err(HeurError::Uncoverable(k)) => Err(Failure {
            code: EXIT_INFEASIBLE,
            message: format!("uncoverable element {}", k + 1),
        }),
        Err(HeurError::Config(msg)) => Err(Failure::usage(msg)),
        Err(e) => Err(Failure::data(e)),
    }
}

fn cmd_oracle(file: &Path, max_n: usize) -> CliResult {
    let inst = load_canonical(file)?;
    match oracle::brute_force_optimum(&inst, max_n) {
        Ok(opt) => {
            println!("optimum={}", opt.total);
            println!("witness={}", one_based(&opt.witness));
            println!("optima={}", opt.count);
            Ok(())
        }
        Err(OracleError::TooLarge { n, max_n }) => {
            println!("refused: {n} subsets exceeds the enumeration limit of {max_n}");
            Err(Failure::usage(format!(
                "instance too large for enumeration ({n} > {max_n})"
            )))
        }
        Err(OracleError::Infeasible) => Err(Failure {
            code: EXIT_INFEASIBLE,
            message: "no selection covers every element".into(),
        }),
        Err(e) => Err(Failure::data(e)),
    }
}

fn cmd_stats(dir: &Path, kappas: &[u64], rounding: GammaRounding) -> CliResult {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Failure::data(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let mut rows = Vec::new();
    for file in files {
        let Ok(raw) = ingest::parse_orlib(&read(&file)?) else {
            eprintln!(
                "skipping {}: not an OR-Library set covering file",
                file.display()
            );
            continue;
        };
        let base = file_stem(&file);
        let mut generated = Vec::with_capacity(kappas.len());
        for &kappa in kappas {
            let params = TransformParams {
                kappa,
                rounding,
                ..Default::default()
            };
            generated.push(
                transform::pipeline(&raw, &base, &params)
                    .map_err(Failure::data)?
                    .0,
            );
        }
        let batch = bench::stats_report(&generated);
        rows.extend(batch);
    }
    print!("{}", bench::format_stats_table(&rows));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    manifest: &Path,
    best_known: Option<&Path>,
    cfg: BenchConfig,
    methods: &[String],
    grasp_cfg: GraspConfig,
    output: Option<&Path>,
) -> CliResult {
    let text = String::from_utf8(read(manifest)?).map_err(Failure::data)?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let list = bench::parse_manifest(&text, base).map_err(Failure::data)?;
    let mut entries = Vec::with_capacity(list.len());
    for (path, kappa) in list {
        let inst = load_canonical(&path)?;
        let name = bench::split_derived_name(inst.name())
            .map_or(inst.name().to_string(), |(b, _)| b.to_string());
        entries.push(SuiteEntry {
            name,
            kappa,
            instance: inst,
        });
    }
    let best = match best_known {
        Some(p) => BestKnownTable::from_csv(read(p)?.as_slice()).map_err(Failure::data)?,
        None => BestKnownTable::default(),
    };
    let methods = methods
        .iter()
        .map(|m| match m.as_str() {
            "exact" => Ok(Method::Exact { warm_start: None }),
            "exact-warm" => Ok(Method::Exact {
                warm_start: Some(grasp_cfg.clone()),
            }),
            "grasp" => Ok(Method::Grasp(grasp_cfg.clone())),
            "greedy" => Ok(Method::Greedy),
            other => Err(Failure::usage(format!(
                "unknown method {other:?} (exact, exact-warm, grasp, greedy)"
            ))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let result = bench::run_suite(&entries, &methods, &cfg, &best).map_err(Failure::data)?;
    let csv = bench::write_results_csv(&result).map_err(Failure::data)?;
    match output {
        Some(path) => write(path, &csv)?,
        None => print!("{csv}"),
    }
    eprint!("{}", bench::format_results_table(&result));
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Parse { file } => cmd_parse(&file),
        Command::Transform {
            file,
            kappa,
            rounding,
            gamma_source,
            name,
            output,
        } => {
            let params = TransformParams {
                kappa,
                rounding,
                gamma_source,
            };
            cmd_transform(&file, params, name, output.as_deref())
        }
        Command::Solve {
            file,
            time_limit,
            node_limit,
            warm_start,
            json,
            kappa,
        } => cmd_solve(
            &file,
            seconds(time_limit)?,
            node_limit,
            warm_start,
            json.as_deref(),
            kappa,
        ),
        Command::Grasp {
            file,
            iterations,
            alpha,
            seed,
            time_limit,
        } => {
            let cfg = GraspConfig {
                iterations,
                rcl_alpha: alpha,
                seed,
                time_limit: seconds(time_limit)?,
            };
            cfg.validate().map_err(Failure::usage)?;
            cmd_grasp(&file, cfg)
        }
        Command::Oracle { file, max_n } => cmd_oracle(&file, max_n),
        Command::ExportLp { file, output } => {
            let inst = load_canonical(&file)?;
            write(&output, &lp::export_lp(&inst))?;
            println!(
                "wrote {} ({} rows)",
                output.display(),
                inst.num_elements() + inst.conflicts().len()
            );
            Ok(())
        }
        Command::Stats {
            dir,
            kappa,
            rounding,
        } => cmd_stats(&dir, &kappa, rounding),
        Command::Bench {
            manifest,
            best_known,
            time_limit,
            node_limit,
            methods,
            iterations,
            alpha,
            seed,
            jobs,
            no_times,
            output,
        } => {
            let cfg = BenchConfig {
                time_limit: seconds(time_limit)?,
                node_limit,
                jobs,
                record_times: !no_times,
            };
            let grasp_cfg = GraspConfig {
                iterations,
                rcl_alpha: alpha,
                seed,
                time_limit: cfg.time_limit,
            };
            grasp_cfg.validate().map_err(Failure::usage)?;
            cmd_bench(
                &manifest,
                best_known.as_deref(),
                cfg,
                &methods,
                grasp_cfg,
                output.as_deref(),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
