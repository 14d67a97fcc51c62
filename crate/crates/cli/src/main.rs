//! `fracadi` - benchmark runner for the fractional ADI solvers.
//!
//! Subcommands:
//! * `solve`            - run one configuration per config section, report the
//!   final max error against the exact solution.
//! * `convergence`      - run a refinement ladder per section and emit the
//!   convergence table.
//! * `compare-splitting`- reproduce the D-ADI / D-ADI-II / FS-II comparison on
//!   the Riesz benchmark.
//! * `stability-report` - numerical checks of the stability theory
//!   (definiteness, Gerschgorin, norm bounds) as key-value blocks.
//!
//! Configs are flat `key = value` text with optional `[section]` headers;
//! CLI flags override config keys. Exit code 0 only if every embedded
//! assertion passed. `FRACADI_THREADS` caps line-sweep parallelism.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fracadi_core::config::{parse_sections, RunConfig};
use fracadi_core::diagnostics::{verify_definiteness, verify_norm_bounds};
use fracadi_core::frac::build_direction_operator;
use fracadi_core::model::{AxisSpec, FracOrder};
use fracadi_core::study::{
    run_convergence_study, run_splitting_comparison, solve_once, SPLITTING_RATIOS,
};
use fracadi_core::table::{emit_grouped_table, emit_splitting_table, emit_table};
use fracadi_core::{Error, Result};

#[derive(Parser)]
#[command(name = "fracadi", version, about = "Fractional ADI benchmark solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags that mirror (and override) config keys.
#[derive(Args, Clone, Default)]
struct Overrides {
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    nt_ratio: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    output: Option<String>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run each configured problem once and report its error.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a refinement ladder per section and emit convergence tables.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        /// Refinement levels (overrides the config key).
        #[arg(long)]
        levels: Option<usize>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Scheme comparison (D-ADI vs FS-II vs D-ADI-II) on the Riesz benchmark.
    CompareSplitting {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Stability-theory checks over a (mu, size) grid.
    StabilityReport {
        /// Comma-separated fractional orders, e.g. 1.1,1.5,1.9
        #[arg(long, value_delimiter = ',')]
        mu: Vec<f64>,
        /// Comma-separated interior sizes, e.g. 4,8,16,32
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
    },
}

fn apply_overrides(map: &mut BTreeMap<String, String>, ov: &Overrides, levels: Option<usize>) {
    let mut set = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            map.insert(k.to_string(), v);
        }
    };
    set("problem", ov.problem.clone());
    set("scheme", ov.scheme.clone());
    set("alpha", ov.alpha.map(|v| v.to_string()));
    set("beta", ov.beta.map(|v| v.to_string()));
    set("gamma", ov.gamma.map(|v| v.to_string()));
    set("n", ov.n.map(|v| v.to_string()));
    set("nt_ratio", ov.nt_ratio.map(|v| v.to_string()));
    set("t_end", ov.t_end.map(|v| v.to_string()));
    set("output", ov.output.clone());
    set("format", ov.format.clone());
    set("levels", levels.map(|v| v.to_string()));
}

fn load_runs(
    path: &PathBuf,
    ov: &Overrides,
    levels: Option<usize>,
) -> Result<Vec<(String, RunConfig)>> {
    let text = std::fs::read_to_string(path)?;
    parse_sections(&text)?
        .into_iter()
        .map(|(name, mut map)| {
            apply_overrides(&mut map, ov, levels);
            RunConfig::from_entries(&map).map(|cfg| (name, cfg))
        })
        .collect()
}

fn write_or_print(output: &Option<String>, text: &str) -> Result<()> {
    match output {
        Some(path) => {
            std::fs::write(path, text)?;
            eprintln!("wrote {path}");
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_solve(config: PathBuf, overrides: Overrides) -> Result<()> {
    let runs = load_runs(&config, &overrides, None)?;
    let mut records = Vec::new();
    let (format, output) = (runs[0].1.format, runs[0].1.output.clone());
    for (name, cfg) in &runs {
        let rec = solve_once(cfg)?;
        eprintln!(
            "[{name}] problem={} scheme={} n={} tau={:.6e} error={:.4e}",
            rec.problem,
            rec.scheme,
            rec.n,
            rec.tau,
            rec.error.unwrap()
        );
        records.push(rec);
    }
    write_or_print(&output, &emit_table(&records, format)?)
}

fn cmd_convergence(config: PathBuf, levels: Option<usize>, overrides: Overrides) -> Result<()> {
    let runs = load_runs(&config, &overrides, levels)?;
    let (format, output) = (runs[0].1.format, runs[0].1.output.clone());
    let mut groups = Vec::new();
    for (name, cfg) in &runs {
        let recs = run_convergence_study(cfg)?;
        for rec in recs.iter().filter(|r| r.note.is_some()) {
            eprintln!(
                "[{name}] level {} failed: {}",
                rec.level,
                rec.note.clone().unwrap()
            );
        }
        let label = format!(
            "{} {}",
            name,
            cfg.orders()
                .iter()
                .map(|o| o.to_string())
                .collect::<Vec<_>>()
                .join("/")
        );
        groups.push((label, recs));
    }
    let failed = groups
        .iter()
        .flat_map(|(_, g)| g.iter())
        .any(|r| r.note.is_some());
    let same_ladder = groups
        .iter()
        .all(|(_, g)| g.len() == groups[0].1.len() && g[0].n == groups[0].1[0].n);
    let text = if groups.len() == 1 {
        emit_table(&groups[0].1, format)?
    } else if same_ladder {
        emit_grouped_table(&groups, format)?
    } else {
        let mut text = String::new();
        for (label, recs) in &groups {
            text.push_str(&format!("# {label}\n"));
            text.push_str(&emit_table(recs, format)?);
        }
        text
    };
    write_or_print(&output, &text)?;
    if failed {
        return Err(Error::Config("one or more levels failed".into()));
    }
    Ok(())
}

fn cmd_compare_splitting(config: PathBuf, overrides: Overrides) -> Result<()> {
    let runs = load_runs(&config, &overrides, None)?;
    for (name, cfg) in &runs {
        let rows = run_splitting_comparison(cfg, &SPLITTING_RATIOS)?;
        eprintln!("[{name}] D-ADI-II and FS-II agree to 1e-13 at every ratio");
        write_or_print(&cfg.output, &emit_splitting_table(&rows, cfg.format)?)?;
    }
    Ok(())
}

fn cmd_stability_report(mu: Vec<f64>, sizes: Vec<usize>) -> Result<()> {
    if mu.is_empty() || sizes.is_empty() {
        return Err(Error::Config("need --mu and --sizes".into()));
    }
    let mut all_pass = true;
    for &m in &mu {
        let ord = FracOrder::new(m)?;
        for &q in &sizes {
            let rep = verify_definiteness(ord, q);
            all_pass &= rep.pass;
            println!("{}", rep.to_kv_block());

            for (label, d1, d2, kappa) in [("advection", 1.0, 1.0, 1.0), ("riesz", 1.0, 1.0, 0.0)] {
                let ax = AxisSpec::constant(0.0, 1.0, q + 1, ord, d1, d2, kappa)?;
                let op = build_direction_operator(&ax, 0, 1.0 / (q + 1) as f64)?;
                let mut rep = verify_norm_bounds(&op)?;
                rep.label = format!("{} ({label})", rep.label);
                all_pass &= rep.pass;
                println!("{}", rep.to_kv_block());
            }
        }
    }
    if all_pass {
        Ok(())
    } else {
        Err(Error::Config("one or more stability checks failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { config, overrides } => cmd_solve(config, overrides),
        Command::Convergence {
            config,
            levels,
            overrides,
        } => cmd_convergence(config, levels, overrides),
        Command::CompareSplitting { config, overrides } => cmd_compare_splitting(config, overrides),
        Command::StabilityReport { mu, sizes } => cmd_stability_report(mu, sizes),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
