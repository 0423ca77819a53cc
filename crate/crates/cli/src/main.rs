use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use mdmtsp::graph::{validate_tour, MetricInstance, Weight};
use mdmtsp::instances::{load_instance, serialize_instance_json, FamilySpec, Manifest, ManifestEntry, SolutionFile};
use mdmtsp::postperson::{DrppBackend, DrppCaps};
use mdmtsp::rational::{format_weight, parse_weight};
use mdmtsp::solver::{oracle_opt, solve, Algorithm, OracleCap, SolveConfig, SolveReport};

/// Multi-depot multiple TSP: generate instances, solve, verify and benchmark.
#[derive(Parser)]
#[command(name = "mdmtsp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance and print its manifest entry.
    Generate(GenerateArgs),
    /// Solve an instance (JSON or TSPLIB subset).
    Solve(SolveArgs),
    /// Check a solution file against its instance.
    Verify(VerifyArgs),
    /// Run algorithms over every instance of a manifest and emit CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    LowerBound,
    RandomEuclidean,
    RandomMetric,
    RandomGraphic,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    family: Family,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Spoke shortening of the lower-bound family, in (0, 1).
    #[arg(long, default_value = "1/10", value_parser = parse_rational)]
    delta: Weight,
    /// Edge probability of random graphic instances.
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct SolverOpts {
    /// Heavy-edge threshold of the extended algorithm, e.g. 0.25 or 1/4.
    #[arg(long, default_value = "1/4", value_parser = parse_epsilon)]
    epsilon: Weight,
    #[arg(long, default_value = "exact")]
    backend: DrppBackend,
    /// Report the ratio to the oracle optimum when it fits the cap. Bench
    /// always consults the oracle for entries without a stored optimum.
    #[arg(long)]
    with_oracle: bool,
    /// Largest node count the oracle accepts.
    #[arg(long, default_value_t = 10)]
    oracle_cap: usize,
    /// Search-node limit of the exact postperson backend.
    #[arg(long)]
    drpp_cap: Option<u64>,
}

impl SolverOpts {
    fn config(&self, algorithm: Algorithm) -> SolveConfig {
        let mut caps = DrppCaps::default();
        if let Some(limit) = self.drpp_cap {
            caps.exact_search_limit = limit;
        }
        SolveConfig {
            algorithm,
            epsilon: self.epsilon,
            backend: self.backend,
            caps,
            oracle_cap: self.oracle_cap(),
        }
    }

    fn oracle_cap(&self) -> OracleCap {
        OracleCap {
            max_nodes: self.oracle_cap,
            ..OracleCap::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value = "christofides-md")]
    algorithm: Algorithm,
    #[command(flatten)]
    opts: SolverOpts,
    /// Where to write the solution file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// json prints the solution when no --out is given; csv prints one table row.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    solution: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    manifest: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "christofides-md,extended")]
    algorithms: Vec<Algorithm>,
    #[command(flatten)]
    opts: SolverOpts,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave the time_ms column empty so output is reproducible.
    #[arg(long)]
    no_timing: bool,
}

fn parse_rational(s: &str) -> Result<Weight, String> {
    parse_weight(s).ok_or_else(|| format!("`{s}` is not a number or fraction"))
}

fn parse_epsilon(s: &str) -> Result<Weight, String> {
    let e = parse_rational(s)?;
    if e <= Weight::from_integer(0) {
        return Err("epsilon must be positive".into());
    }
    Ok(e)
}

#[derive(Serialize)]
struct Row {
    instance: String,
    algorithm: String,
    params: String,
    weight: String,
    opt: String,
    ratio: String,
    time_ms: String,
}

fn ratio(weight: Weight, opt: Option<Weight>) -> String {
    match opt {
        Some(o) if o > Weight::from_integer(0) => {
            let r = weight / o;
            format!("{:.6}", *r.numer() as f64 / *r.denom() as f64)
        }
        Some(_) if weight == Weight::from_integer(0) => format!("{:.6}", 1.0),
        _ => String::new(),
    }
}

/// Optimum from the exhaustive oracle, if the cap admits the instance.
fn oracle_weight(inst: &MetricInstance, opts: &SolverOpts) -> Option<Weight> {
    oracle_opt(inst, &opts.oracle_cap()).ok().map(|o| o.weight)
}

fn report_row(name: &str, report: &SolveReport, opt: Option<Weight>, timing: bool) -> Row {
    Row {
        instance: name.to_string(),
        algorithm: report.algorithm.to_string(),
        params: report.params.to_string(),
        weight: format_weight(report.weight),
        opt: opt.map(format_weight).unwrap_or_default(),
        ratio: ratio(report.weight, opt),
        time_ms: if timing {
            report.wall_time.as_millis().to_string()
        } else {
            String::new()
        },
    }
}

fn write_csv(out: impl Write, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["instance", "algorithm", "params", "weight", "opt", "ratio", "time_ms"])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn cmd_generate(args: GenerateArgs) -> Result<ExitCode> {
    let spec = match args.family {
        Family::LowerBound => FamilySpec::LowerBound {
            d: args.d,
            delta: args.delta,
        },
        Family::RandomEuclidean => FamilySpec::RandomEuclidean {
            n: args.n,
            d: args.d,
            seed: args.seed,
        },
        Family::RandomMetric => FamilySpec::RandomMetric {
            n: args.n,
            d: args.d,
            seed: args.seed,
        },
        Family::RandomGraphic => FamilySpec::RandomGraphic {
            n: args.n,
            d: args.d,
            density: args.density,
            seed: args.seed,
        },
    };
    let inst = spec.generate()?;
    write_file(&args.out, &serialize_instance_json(&inst))?;
    let entry = ManifestEntry {
        name: inst.name().to_string(),
        path: args.out,
        opt: None,
    };
    println!("{}", serde_json::to_string(&entry)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let inst = load_instance(&args.instance)?;
    let report = solve(&inst, &args.opts.config(args.algorithm))?;
    let opt = args.opts.with_oracle.then(|| oracle_weight(&inst, &args.opts)).flatten();
    let file = SolutionFile::from_report(&inst, &report);
    let ratio_field = ratio(report.weight, opt);
    let mut fields = vec![report.algorithm.to_string(), format_weight(report.weight)];
    if !ratio_field.is_empty() {
        fields.push(ratio_field);
    }
    fields.push(report.wall_time.as_millis().to_string());
    let summary = fields.join(" ");
    if let Some(out) = &args.out {
        write_file(out, &file.to_json())?;
    }
    match (args.format, &args.out) {
        (Format::Csv, _) => {
            let name = if inst.name().is_empty() {
                args.instance.display().to_string()
            } else {
                inst.name().to_string()
            };
            write_csv(std::io::stdout().lock(), &[report_row(&name, &report, opt, true)])?;
        }
        (Format::Json, Some(_)) => println!("{summary}"),
        (Format::Json, None) => {
            print!("{}", file.to_json());
            eprintln!("{summary}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let inst = load_instance(&args.instance)?;
    let text = std::fs::read_to_string(&args.solution).with_context(|| format!("reading {}", args.solution.display()))?;
    let file = SolutionFile::from_json(&text)?;
    let tour = match file.tour(&inst) {
        Ok(t) => t,
        Err(e) => {
            println!("invalid: {e}");
            return Ok(ExitCode::from(1));
        }
    };
    let mut failed = false;
    if let Err(violations) = validate_tour(&inst, &tour) {
        for v in violations {
            println!("violation: {v}");
        }
        failed = true;
    }
    let actual = inst.weight_of(&tour);
    if actual != file.weight {
        println!(
            "weight mismatch: declared {}, actual {}",
            format_weight(file.weight),
            format_weight(actual)
        );
        failed = true;
    }
    if failed {
        return Ok(ExitCode::from(1));
    }
    println!("ok {}", format_weight(actual));
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let manifest = Manifest::load(&args.manifest)?;
    let loaded: Vec<(ManifestEntry, Result<MetricInstance>)> = manifest
        .instances
        .into_par_iter()
        .map(|e| {
            let inst = load_instance(&e.path).map_err(anyhow::Error::from);
            (e, inst)
        })
        .collect();
    let opts = &args.opts;
    let opts_by_instance: Vec<Option<Weight>> = loaded
        .par_iter()
        .map(|(e, inst)| e.opt.or_else(|| inst.as_ref().ok().and_then(|i| oracle_weight(i, opts))))
        .collect();

    let jobs: Vec<(usize, Algorithm)> = (0..loaded.len())
        .flat_map(|i| args.algorithms.iter().map(move |&a| (i, a)))
        .collect();
    let results: Vec<(Row, Option<String>)> = jobs
        .par_iter()
        .map(|&(i, algorithm)| {
            let (entry, inst) = &loaded[i];
            let opt = opts_by_instance[i];
            let outcome = inst
                .as_ref()
                .map_err(|e| anyhow!("{e:#}"))
                .and_then(|inst| Ok(solve(inst, &opts.config(algorithm))?));
            match outcome {
                Ok(report) => (report_row(&entry.name, &report, opt, !args.no_timing), None),
                Err(e) => {
                    let row = Row {
                        instance: entry.name.clone(),
                        algorithm: algorithm.to_string(),
                        params: String::new(),
                        weight: String::new(),
                        opt: opt.map(format_weight).unwrap_or_default(),
                        ratio: String::new(),
                        time_ms: String::new(),
                    };
                    (row, Some(format!("{} / {}: {e:#}", entry.name, algorithm)))
                }
            }
        })
        .collect();

    let mut failed = false;
    for (_, err) in &results {
        if let Some(msg) = err {
            eprintln!("error: {msg}");
            failed = true;
        }
    }
    let rows: Vec<Row> = results.into_iter().map(|(r, _)| r).collect();
    match &args.out {
        Some(path) => {
            let f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(f, &rows)?;
        }
        None => write_csv(std::io::stdout().lock(), &rows)?,
    }
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
