use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use orthorec::experiments::{run_experiment, write_outputs, ExperimentConfig, ExperimentKind};
use orthorec::iep::{solve_hiep, solve_hpiep, InnerProductSpec, PoleSet};
use orthorec::linalg::Pole;
use orthorec::lsq::{lsq_fit, read_data_csv_file, write_model_json};
use orthorec::{Error, C64};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "orthorec",
    version,
    about = "Updating and downdating orthogonal (rational) function recurrences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config and write CSV metrics plus a manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; falls back to the config's `output` field.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment with its default setup and print the final scalars.
    Golden {
        #[arg(long)]
        experiment: String,
    },
    /// Least-squares fit of CSV data (z_re, z_im, w_re, w_im, f_re, f_im).
    Fit {
        #[arg(long)]
        data: PathBuf,
        /// Dimension of the approximation space.
        #[arg(long)]
        degree: usize,
        /// Finite pole as `re,im`; repeat for more. Remaining poles are infinite.
        #[arg(long = "pole", value_parser = parse_pole)]
        poles: Vec<C64>,
        /// Write the model JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_pole(s: &str) -> Result<C64, String> {
    let (re, im) = s.split_once(',').ok_or("expected re,im")?;
    let re = re.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let im = im.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok(C64::new(re, im))
}

/// Exit codes: 0 clean, 2 partial (a cell broke down), 1 configuration or I/O error.
enum Outcome {
    Clean,
    Partial,
}

fn run(config: PathBuf, out: Option<PathBuf>) -> anyhow::Result<Outcome> {
    let text = std::fs::read_to_string(&config)
        .with_context(|| format!("reading {}", config.display()))?;
    let cfg = ExperimentConfig::from_json(&text)?;
    let dir = match out.or_else(|| cfg.output.as_ref().map(PathBuf::from)) {
        Some(d) => d,
        None => bail!("no output directory: pass --out or set `output` in the config"),
    };
    let result = run_experiment(&cfg)?;
    let written =
        write_outputs(&result, &dir).with_context(|| format!("writing to {}", dir.display()))?;
    for p in &written {
        eprintln!("wrote {}", p.display());
    }
    for c in &result.cells {
        if let Some(b) = &c.breakdown {
            eprintln!("{}: breakdown at step {}: {}", c.label, b.step, b.message);
        }
    }
    Ok(if result.manifest.clean {
        Outcome::Clean
    } else {
        Outcome::Partial
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".into())
}

fn golden(name: &str) -> anyhow::Result<Outcome> {
    let kind = ExperimentKind::from_name(name)?;
    let mut cfg = ExperimentConfig::new(kind);
    // golden scalars only need the final state
    cfg.metric_stride = Some(usize::MAX);
    let result = run_experiment(&cfg)?;
    println!(
        "{:<14} {:>6} {:>12} {:>14} {:>12} {:>12}",
        "method", "steps", "unitarity", "tridiagonality", "max_error", "err_f"
    );
    for c in &result.cells {
        let g = &c.golden;
        println!(
            "{:<14} {:>6} {:>12} {:>14} {:>12.3e} {:>12}",
            c.label,
            c.steps_completed,
            fmt_opt(g.unitarity),
            fmt_opt(g.tridiagonality),
            g.final_max_error,
            fmt_opt(g.final_err_f)
        );
        if let Some(b) = &c.breakdown {
            println!("  breakdown at step {}: {}", b.step, b.message);
        }
    }
    Ok(if result.manifest.clean {
        Outcome::Clean
    } else {
        Outcome::Partial
    })
}

fn fit(
    data: PathBuf,
    degree: usize,
    poles: Vec<C64>,
    out: Option<PathBuf>,
) -> anyhow::Result<Outcome> {
    let (z, w, f) = read_data_csv_file(&data)?;
    let spec = InnerProductSpec::new(z, w)?;
    let m = spec.len();
    let model = if poles.is_empty() {
        lsq_fit(&solve_hiep(&spec)?, &f, degree)?
    } else {
        if poles.len() >= m {
            return Err(
                Error::ConfigInvalid(format!("at most {} poles for {m} nodes", m - 1)).into(),
            );
        }
        let mut list: Vec<Pole> = poles.into_iter().map(Pole::Finite).collect();
        list.resize(m - 1, Pole::Infinite);
        lsq_fit(&solve_hpiep(&spec, &PoleSet::new(list))?, &f, degree)?
    };
    match out {
        Some(p) => {
            let file =
                std::fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?;
            write_model_json(&model, file)?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            write_model_json(&model, &mut out)?;
            let _ = writeln!(out);
        }
    }
    Ok(Outcome::Clean)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Run { config, out } => run(config, out),
        Command::Golden { experiment } => golden(&experiment),
        Command::Fit {
            data,
            degree,
            poles,
            out,
        } => fit(data, degree, poles, out),
    };
    match res {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
