//! `varimin report`: verify a run directory against its manifest and emit
//! plot-ready CSV.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;

use crate::exit::{CliError, ExitCode};
use crate::manifest::{read_manifest, verify};

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Output directory of a previous `curvature`, `check` or `minimize`.
    pub dir: PathBuf,
    /// Where to write `plot.csv`; defaults to the run directory.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

fn read(dir: &Path, name: &str) -> Result<String, CliError> {
    let path = dir.join(name);
    fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))
}

fn columns(header: &str, wanted: &[&str]) -> Result<Vec<usize>, CliError> {
    let cols: Vec<&str> = header.split(',').collect();
    wanted
        .iter()
        .map(|w| {
            cols.iter()
                .position(|c| c == w)
                .ok_or_else(|| CliError::input(format!("column '{w}' missing")))
        })
        .collect()
}

/// Rows of `name` restricted to `wanted` columns, in order.
fn select(dir: &Path, name: &str, wanted: &[&str]) -> Result<Vec<Vec<String>>, CliError> {
    let text = read(dir, name)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::input(format!("{name} is empty")))?;
    let idx = columns(header, wanted)?;
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            idx.iter()
                .map(|&i| {
                    f.get(i)
                        .map(|s| s.to_string())
                        .ok_or_else(|| CliError::input(format!("short row in {name}")))
                })
                .collect()
        })
        .collect()
}

fn minimize_plot(dir: &Path) -> Result<String, CliError> {
    let trace = select(dir, "trace.csv", &["iter", "energy", "mass", "diameter"])?;
    let mon = select(
        dir,
        "monitors.csv",
        &["iter", "diameter_lower", "mass_lower", "hausdorff"],
    )?;
    let mut out = String::from("iter,energy,mass,diameter,diameter_lower,mass_lower,hausdorff\n");
    for (t, m) in trace.iter().zip(&mon) {
        if t[0] != m[0] {
            return Err(CliError::input("trace.csv and monitors.csv are out of step"));
        }
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            t[0], t[1], t[2], t[3], m[1], m[2], m[3]
        ));
    }
    Ok(out)
}

fn check_plot(dir: &Path) -> Result<String, CliError> {
    let rows: Vec<serde_json::Value> =
        serde_json::from_str(&read(dir, "bounds.json")?).map_err(|e| CliError::input(format!("bounds.json: {e}")))?;
    let mut out = String::from("p,lemma,margin,status\n");
    for r in rows {
        let num = |k: &str| r.get(k).and_then(|v| v.as_f64()).unwrap_or(f64::NAN);
        let text = |k: &str| r.get(k).and_then(|v| v.as_str()).unwrap_or("").to_string();
        out.push_str(&format!(
            "{:.16e},{},{:.16e},{}\n",
            num("p"),
            text("lemma"),
            num("margin"),
            text("status")
        ));
    }
    Ok(out)
}

fn curvature_plot(dir: &Path) -> Result<String, CliError> {
    let mut out = String::from("atom,h_norm,h_relative_norm,residual\n");
    for (i, line) in read(dir, "curvature.jsonl")?.lines().enumerate() {
        let r: serde_json::Value =
            serde_json::from_str(line).map_err(|e| CliError::input(format!("curvature.jsonl line {}: {e}", i + 1)))?;
        let norm = |k: &str| {
            r.get(k)
                .and_then(|v| v.as_array())
                .map(|a| a.iter().filter_map(|x| x.as_f64()).map(|x| x * x).sum::<f64>().sqrt())
                .unwrap_or(f64::NAN)
        };
        let res = r.get("residual").and_then(|v| v.as_f64()).unwrap_or(f64::NAN);
        out.push_str(&format!("{i},{:.16e},{:.16e},{:.16e}\n", norm("H"), norm("H_N"), res));
    }
    Ok(out)
}

pub fn run(args: &ReportArgs) -> Result<ExitCode, CliError> {
    let manifest = read_manifest(&args.dir)?;
    let bad = verify(&args.dir, &manifest)?;
    println!("command   {}", manifest.command);
    println!("version   {}", manifest.version);
    println!("seed      {}", manifest.seed);
    println!("threads   {}", manifest.threads);
    println!("wall      {:.3} s", manifest.wall_clock_s);
    for o in &manifest.outputs {
        let mark = if bad.contains(&o.path) { "MISMATCH" } else { "ok" };
        println!("  {:<16} {}  {mark}", o.path, o.sha256);
    }
    if !bad.is_empty() {
        eprintln!("{} output(s) differ from the manifest", bad.len());
        return Ok(ExitCode::BoundFailure);
    }
    let plot = match manifest.command.as_str() {
        "minimize" => minimize_plot(&args.dir)?,
        "check" => check_plot(&args.dir)?,
        "curvature" => curvature_plot(&args.dir)?,
        other => return Err(CliError::input(format!("unknown command '{other}' in manifest"))),
    };
    let path = args.plot.clone().unwrap_or_else(|| args.dir.join("plot.csv"));
    fs::write(&path, plot).map_err(|e| CliError::io(&path, e))?;
    println!("plot data written to {}", path.display());
    Ok(ExitCode::Success)
}
