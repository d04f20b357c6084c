use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use homfinsler::harness::{
    cmd_catalog, cmd_crosscheck, cmd_scan, cmd_search_metric, cmd_verify_case, exit_code, RunConfig,
};
use homfinsler::{Error, Result};

#[derive(Parser)]
#[command(name = "homfinsler", version, about = "Curvature checks for invariant (alpha,beta)-metrics on homogeneous spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides the flag-scan sample budget.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Print the JSON report instead of the text rendering.
    #[arg(long, global = true)]
    json: bool,

    /// Also write the JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// List the ten candidate families.
    Catalog,
    /// Structural, KVCL, flag and S-curvature checks for one case.
    VerifyCase,
    /// Search block scalars for positive curvature, then perturb.
    SearchMetric,
    /// Run the oracle suites.
    Crosscheck,
    /// Flag- and S-curvature scans of the configured metric.
    Scan,
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.samples {
        cfg.scan.flag_samples = n;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.display().to_string());
    }
    Ok(cfg)
}

fn write_out(path: &Option<String>, json: &str) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, format!("{json}\n")).map_err(|e| Error::Config(format!("cannot write {p}: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    if let Command::Catalog = cli.command {
        let rep = cmd_catalog();
        let json = rep.to_json();
        if cli.json {
            println!("{json}");
        } else {
            print!("{}", rep.render_text());
        }
        if let Err(e) = write_out(&cfg.out, &json) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        return ExitCode::SUCCESS;
    }

    let outcome = match cli.command {
        Command::VerifyCase => cmd_verify_case(&cfg),
        Command::SearchMetric => cmd_search_metric(&cfg),
        Command::Crosscheck => cmd_crosscheck(&cfg),
        Command::Scan => cmd_scan(&cfg),
        Command::Catalog => unreachable!(),
    };
    let mut code = exit_code(&outcome);
    match &outcome {
        Ok(rep) => {
            let json = rep.to_json();
            if cli.json {
                println!("{json}");
            } else {
                print!("{}", rep.render_text());
            }
            if let Err(e) = write_out(&cfg.out, &json) {
                eprintln!("error: {e}");
                code = 2;
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(code as u8)
}
