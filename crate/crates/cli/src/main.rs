// SPDX-License-Identifier: Apache-2.0

//! `flexevo`: FG vs. MVG circuit experiments, oracle suites and analysis.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 runtime or
//! analysis error, 3 oracle failure.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use flexevo::circuit::modular_goal;
use flexevo::harness::{
    export_summary, flexibility_report, read_records, run_experiment, summarize, summary_csv,
    ExperimentConfig, Metadata, RecordWriter, RECORDS_FILE,
};
use flexevo::oracle::{run_oracles, Fault, Scope};
use flexevo::{Error, Seed};

#[derive(Parser, Debug)]
#[command(
    name = "flexevo",
    version,
    about = "Flexibility of evolved NAND circuits under fixed and varying goals"
)]
struct Cli {
    /// TOML experiment config; built-in desk defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Dotted override, e.g. `--set ga.pop_size=500`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,

    /// Output directory.
    #[arg(long, env = "FLEXEVO_OUT", global = true)]
    out: Option<PathBuf>,

    /// Master seed, overriding `run.master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// No progress output.
    #[arg(long, short, global = true)]
    quiet: bool,

    /// Corrupt a component to check that the oracles notice.
    #[arg(long, hide = true, global = true)]
    inject_fault: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pretrain under FG and MVG, adapt to every test goal, export records and summaries.
    Run,
    /// List training and test goals with their truth tables.
    Goals,
    /// Run brute-force verification suites: circuit, formalism or all.
    Oracle { scope: String },
    /// Recompute summaries and the flexibility report from a records file.
    Analyze { records: PathBuf },
}

/// An error with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::Usage(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("flexevo: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Run => cmd_run(cli),
        Command::Goals => cmd_goals(cli),
        Command::Oracle { scope } => cmd_oracle(cli, scope),
        Command::Analyze { records } => cmd_analyze(cli, records),
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut overrides = cli.overrides.clone();
    if let Some(seed) = cli.seed {
        overrides.push(format!("run.master_seed={seed}"));
    }
    let config = match &cli.config {
        Some(path) => {
            if !path.exists() {
                return Err(Failure::usage(format!(
                    "config file {} not found",
                    path.display()
                )));
            }
            ExperimentConfig::load(path, &overrides)?
        }
        None => ExperimentConfig::from_toml("", &overrides)?,
    };
    Ok(config)
}

fn progress(cli: &Cli) -> impl Fn(&str) + '_ {
    move |msg: &str| {
        if !cli.quiet {
            eprintln!("{msg}");
        }
    }
}

fn cmd_run(cli: &Cli) -> Result<(), Failure> {
    let config = load_config(cli)?;
    let out_dir = cli
        .out
        .clone()
        .or_else(|| config.run.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("results"));
    let meta = Metadata::of(&config);
    let log = progress(cli);
    log(&format!(
        "config {} | pop {} | {} seeds | pretrain {} generations | output {}",
        meta.config_hash,
        config.ga.pop_size,
        config.seeds().len(),
        config.schedule.pretrain_generations,
        out_dir.display()
    ));

    // Reject a bad config before creating any file.
    config.validate()?;
    let mut writer = RecordWriter::create(out_dir.join(RECORDS_FILE), &meta)?;
    let records =
        run_experiment(&config, |batch| writer.append(batch), &log).map_err(|e| Failure {
            code: 2,
            message: e.to_string(),
        })?;

    let stats = summarize(&records, config.run.aggregation);
    export_summary(&out_dir, &records, &stats, &meta)?;
    let report = flexibility_report(
        &records,
        config.run.aggregation,
        config.master_seed().label("bootstrap"),
    );
    print!("{}", report.render());
    log(&format!(
        "wrote {} records to {}",
        records.len(),
        out_dir.display()
    ));
    Ok(())
}

fn cmd_goals(cli: &Cli) -> Result<(), Failure> {
    let config = load_config(cli)?;
    let params = config.circuit_params();
    let mut seen = HashSet::new();
    for (kind, families) in [
        ("train", &config.goals.training),
        ("test", &config.goals.test),
    ] {
        for (i, fam) in families.iter().enumerate() {
            let goal = modular_goal(*fam, &params)?;
            if !seen.insert((*fam, kind)) {
                eprintln!("warning: duplicate {kind} goal {fam}");
            }
            println!("{kind}\t{i}\t{fam}\t{}", goal.table);
        }
    }
    Ok(())
}

fn cmd_oracle(cli: &Cli, scope: &str) -> Result<(), Failure> {
    let scope = Scope::parse(scope).ok_or_else(|| {
        Failure::usage(format!(
            "unknown oracle scope {scope:?}; expected circuit, formalism or all"
        ))
    })?;
    let fault = match &cli.inject_fault {
        Some(name) => Some(
            Fault::parse(name).ok_or_else(|| Failure::usage(format!("unknown fault {name:?}")))?,
        ),
        None => None,
    };
    let seed = Seed(cli.seed.unwrap_or(2024));
    let results = run_oracles(scope, fault, seed);
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(Failure {
            code: 3,
            message: format!("{failed} of {} oracle checks failed", results.len()),
        });
    }
    Ok(())
}

fn cmd_analyze(cli: &Cli, path: &Path) -> Result<(), Failure> {
    let runtime = |e: Error| Failure {
        code: 2,
        message: e.to_string(),
    };
    let (meta, records) = read_records(path).map_err(runtime)?;
    let meta = meta.ok_or_else(|| Failure {
        code: 2,
        message: format!("{}: missing metadata line", path.display()),
    })?;
    let stats = summarize(&records, meta.aggregation);
    let report = flexibility_report(
        &records,
        meta.aggregation,
        Seed(meta.master_seed).label("bootstrap"),
    );
    match &cli.out {
        Some(dir) => {
            let written = export_summary(dir, &records, &stats, &meta).map_err(runtime)?;
            for p in written {
                progress(cli)(&format!("wrote {}", p.display()));
            }
        }
        None => print!("{}", summary_csv(&stats, &meta)),
    }
    print!("{}", report.render());
    Ok(())
}
