//! Command line front end: `gen`, `solve`, `verify` and `bench`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use crate::generate::{GenScheme, Scheme};
use crate::pls::{parse_grid, parse_instance, serialize_instance, PlsInstance};
use crate::runner::{solve, Algorithm, RunRecord, StatsDocument};

#[derive(Debug, Parser)]
#[command(name = "plse", version, about = "Partial Latin square extension solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Extend an instance and write the filled grid.
    Solve(SolveArgs),
    /// Check that a grid is a valid extension of an instance.
    Verify(VerifyArgs),
    /// Run algorithms over a directory of instances and write a CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub scheme: Scheme,
    #[arg(long)]
    pub n: usize,
    /// Fraction of cells to fill.
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, default_value = "tr-ils")]
    pub alg: Algorithm,
    /// Seconds.
    #[arg(long, default_value_t = 30.0)]
    pub time_limit: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Where to write the JSON stats document.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub instance: PathBuf,
    pub solution: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory of `.pls` instances.
    #[arg(long)]
    pub dir: PathBuf,
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',', default_value = "ils1,tr-ils")]
    pub alg: Vec<Algorithm>,
    #[arg(long, default_value_t = 30.0)]
    pub time_limit: f64,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub seeds: Vec<u64>,
    #[arg(long)]
    pub csv: PathBuf,
    /// Seconds at which to report the best size so far.
    #[arg(long, value_delimiter = ',', default_value = "5,10,30")]
    pub checkpoints: Vec<f64>,
}

#[derive(Debug, Error)]
#[error("{0}")]
pub struct CliError(pub String);

impl CliError {
    fn at(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError(format!("{}: {e}", path.display()))
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Bench(a) => cmd_bench(&a),
    }
}

fn time_limit(secs: f64) -> Result<Duration, CliError> {
    if secs.is_finite() && secs > 0.0 {
        Ok(Duration::from_secs_f64(secs))
    } else {
        Err(CliError(format!("time limit must be positive, got {secs}")))
    }
}

fn read_instance(path: &Path) -> Result<PlsInstance, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::at(path, e))?;
    parse_instance(&text).map_err(|e| CliError::at(path, e))
}

pub fn cmd_gen(a: &GenArgs) -> Result<(), CliError> {
    let g = GenScheme {
        scheme: a.scheme,
        ratio: a.r,
        seed: a.seed,
    };
    let inst = g.generate(a.n).map_err(|e| CliError(e.to_string()))?;
    fs::write(&a.output, serialize_instance(&inst)).map_err(|e| CliError::at(&a.output, e))?;
    println!("{}", inst.len());
    Ok(())
}

pub fn cmd_solve(a: &SolveArgs) -> Result<(), CliError> {
    let limit = time_limit(a.time_limit)?;
    let inst = read_instance(&a.input)?;
    let out = solve(&inst, a.alg, limit, a.seed).map_err(|e| CliError(e.to_string()))?;
    fs::write(&a.output, serialize_instance(&out.merged)).map_err(|e| CliError::at(&a.output, e))?;
    let name = instance_name(&a.input);
    let record = RunRecord::new(&name, &scheme_of(&name), &inst, a.alg, a.seed, limit, &out);
    println!(
        "{}: init {} final {} ({} of {} cells filled{})",
        name,
        record.init,
        record.final_size,
        out.merged.len(),
        inst.n() * inst.n(),
        if out.optimal { ", optimal" } else { "" }
    );
    if let Some(path) = &a.stats {
        let doc = StatsDocument {
            record,
            first_ls_improvement: out.stats.first_ls_improvement,
            mean_ls_ms: out.stats.mean_ls_ms,
            series: out.stats.series.clone(),
        };
        let json = serde_json::to_string_pretty(&doc).map_err(|e| CliError(e.to_string()))?;
        fs::write(path, json + "\n").map_err(|e| CliError::at(path, e))?;
    }
    Ok(())
}

/// Checks that `grid` contains `inst` and satisfies the Latin condition.
/// Returns the number of filled cells, or a description of the first
/// violation.
pub fn check_solution(inst: &PlsInstance, n: usize, grid: &[u16]) -> Result<usize, String> {
    if n != inst.n() {
        return Err(format!("solution has order {n}, instance has order {}", inst.n()));
    }
    for (i, (&want, &got)) in inst.to_grid().iter().zip(grid).enumerate() {
        if want != 0 && want != got {
            let (r, c) = (i / n + 1, i % n + 1);
            return Err(format!("cell ({r},{c}) must hold given symbol {want}, found {got}"));
        }
    }
    for r in 0..n {
        let mut seen = vec![0usize; n + 1];
        for c in 0..n {
            let s = grid[r * n + c] as usize;
            if s != 0 {
                if seen[s] != 0 {
                    return Err(format!(
                        "row {}: cells ({},{}) and ({},{}) both hold symbol {s}",
                        r + 1,
                        r + 1,
                        seen[s],
                        r + 1,
                        c + 1
                    ));
                }
                seen[s] = c + 1;
            }
        }
    }
    for c in 0..n {
        let mut seen = vec![0usize; n + 1];
        for r in 0..n {
            let s = grid[r * n + c] as usize;
            if s != 0 {
                if seen[s] != 0 {
                    return Err(format!(
                        "column {}: cells ({},{}) and ({},{}) both hold symbol {s}",
                        c + 1,
                        seen[s],
                        c + 1,
                        r + 1,
                        c + 1
                    ));
                }
                seen[s] = r + 1;
            }
        }
    }
    Ok(grid.iter().filter(|&&s| s != 0).count())
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<(), CliError> {
    let inst = read_instance(&a.instance)?;
    let text = fs::read_to_string(&a.solution).map_err(|e| CliError::at(&a.solution, e))?;
    let (n, grid) = parse_grid(&text).map_err(|e| CliError::at(&a.solution, e))?;
    let filled = check_solution(&inst, n, &grid).map_err(|e| CliError(format!("invalid: {e}")))?;
    println!("valid: {filled} of {} cells filled", n * n);
    Ok(())
}

fn instance_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Generation scheme guessed from a file name.
fn scheme_of(name: &str) -> String {
    let lower = name.to_ascii_lowercase();
    if lower.contains("qwh") {
        "qwh".into()
    } else if lower.contains("qc") {
        "qc".into()
    } else {
        "unknown".into()
    }
}

fn checkpoint_label(secs: f64) -> String {
    format!("ckpt_{secs}s")
}

struct BenchRow {
    record: Result<RunRecord, String>,
    instance: String,
    alg: Algorithm,
    seed: u64,
    checkpoints: Vec<usize>,
}

fn worker_count() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var("PLSE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(cap) if cap > 0 => cap.min(available),
        _ => available,
    }
}

pub fn cmd_bench(a: &BenchArgs) -> Result<(), CliError> {
    let limit = time_limit(a.time_limit)?;
    if a.alg.is_empty() || a.seeds.is_empty() {
        return Err(CliError("need at least one algorithm and one seed".into()));
    }
    let mut files: Vec<PathBuf> = fs::read_dir(&a.dir)
        .map_err(|e| CliError::at(&a.dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "pls"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError(format!("{}: no .pls files", a.dir.display())));
    }

    let jobs: Vec<(PathBuf, Algorithm, u64)> = files
        .iter()
        .flat_map(|f| a.alg.iter().flat_map(move |&alg| a.seeds.iter().map(move |&s| (f.clone(), alg, s))))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| CliError(e.to_string()))?;
    let rows: Vec<BenchRow> = pool.install(|| {
        jobs.par_iter()
            .map(|(path, alg, seed)| {
                let name = instance_name(path);
                let attempt = read_instance(path).map_err(|e| e.0).and_then(|inst| {
                    let out = solve(&inst, *alg, limit, *seed).map_err(|e| e.to_string())?;
                    let ck = a.checkpoints.iter().map(|&s| out.stats.best_at(s * 1e3)).collect();
                    Ok((RunRecord::new(&name, &scheme_of(&name), &inst, *alg, *seed, limit, &out), ck))
                });
                let (record, checkpoints) = match attempt {
                    Ok((r, ck)) => (Ok(r), ck),
                    Err(e) => (Err(e), Vec::new()),
                };
                BenchRow {
                    record,
                    instance: name,
                    alg: *alg,
                    seed: *seed,
                    checkpoints,
                }
            })
            .collect()
    });

    let mut w = csv::Writer::from_path(&a.csv).map_err(|e| CliError::at(&a.csv, e))?;
    let mut header: Vec<String> = "instance,n,r,scheme,alg,seed,given,init,final,iters,elapsed_ms,opt"
        .split(',')
        .map(String::from)
        .collect();
    header.extend(a.checkpoints.iter().map(|&s| checkpoint_label(s)));
    let width = header.len();
    let csv_err = |e: csv::Error| CliError::at(&a.csv, e);
    w.write_record(&header).map_err(csv_err)?;

    // Means per (n, r, alg), in order of first appearance.
    let mut groups: Vec<((usize, String, String), Vec<&BenchRow>)> = Vec::new();
    for row in &rows {
        let fields = match &row.record {
            Ok(r) => {
                let key = (r.n, r.r.to_string(), r.alg.clone());
                match groups.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, g)) => g.push(row),
                    None => groups.push((key, vec![row])),
                }
                let mut f = vec![
                    r.instance.clone(),
                    r.n.to_string(),
                    r.r.to_string(),
                    r.scheme.clone(),
                    r.alg.clone(),
                    r.seed.to_string(),
                    r.given.to_string(),
                    r.init.to_string(),
                    r.final_size.to_string(),
                    r.iters.to_string(),
                    format!("{:.3}", r.elapsed_ms),
                    u8::from(r.opt).to_string(),
                ];
                f.extend(row.checkpoints.iter().map(|c| c.to_string()));
                f
            }
            Err(e) => {
                eprintln!("{} {} seed {}: {e}", row.instance, row.alg, row.seed);
                let mut f = vec![String::new(); width];
                f[0] = row.instance.clone();
                f[4] = row.alg.to_string();
                f[5] = row.seed.to_string();
                f
            }
        };
        w.write_record(&fields).map_err(csv_err)?;
    }
    for ((n, r, alg), members) in &groups {
        let recs: Vec<&RunRecord> = members.iter().filter_map(|m| m.record.as_ref().ok()).collect();
        let k = recs.len() as f64;
        let mean = |f: &dyn Fn(&RunRecord) -> f64| format!("{:.3}", recs.iter().map(|r| f(r)).sum::<f64>() / k);
        let schemes: Vec<&str> = recs.iter().map(|r| r.scheme.as_str()).collect();
        let scheme = if schemes.iter().all(|s| *s == schemes[0]) { schemes[0] } else { "mixed" };
        let mut f = vec![
            "MEAN".to_string(),
            n.to_string(),
            r.clone(),
            scheme.to_string(),
            alg.clone(),
            String::new(),
            mean(&|r| r.given as f64),
            mean(&|r| r.init as f64),
            mean(&|r| r.final_size as f64),
            mean(&|r| r.iters as f64),
            mean(&|r| r.elapsed_ms),
            mean(&|r| u8::from(r.opt) as f64),
        ];
        for i in 0..a.checkpoints.len() {
            let total: usize = members.iter().map(|m| m.checkpoints[i]).sum();
            f.push(format!("{:.3}", total as f64 / k));
        }
        w.write_record(&f).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::at(&a.csv, e))?;
    let failed = rows.iter().filter(|r| r.record.is_err()).count();
    println!("{} runs, {failed} failed", rows.len());
    Ok(())
}
