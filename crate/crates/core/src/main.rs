use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use schreier_rewire::group::FamilyTag;
use schreier_rewire::groupoid::{correction_set, label_rewiring};
use schreier_rewire::homology::{abelianized_matrix, rewired_complex, schreier_presentation};
use schreier_rewire::rewire::build_rewiring;
use schreier_rewire::runner::{run_experiment, write_outputs, ExperimentConfig, OutputFormat};
use schreier_rewire::schreier::build_schreier;
use schreier_rewire::{Error, Result};

#[derive(Parser)]
#[command(
    version,
    about = "Schreier graph rewiring, rank-gradient bounds and homology torsion"
)]
struct Cli {
    /// List the built-in families and exit.
    #[arg(long)]
    families: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Schreier,
    Rewired,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment sweep described by a JSON config.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (overrides the config).
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Compute homology through both routes and compare them.
        #[arg(long)]
        verify: bool,
    },
    /// Write the labeled Schreier graph of one quotient.
    DumpGraph {
        #[arg(long)]
        family: FamilyTag,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        size: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the abelianized relation matrix of one quotient.
    DumpMatrix {
        #[arg(long)]
        family: FamilyTag,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        size: u64,
        #[arg(long, value_enum, default_value = "schreier")]
        route: Route,
        /// Rewiring radius for the rewired route.
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::BufWriter::new(std::io::stdout().lock())),
    })
}

fn run(
    config: PathBuf,
    out: Option<PathBuf>,
    workers: Option<usize>,
    format: Format,
    verify: bool,
) -> Result<i32> {
    let mut cfg = ExperimentConfig::load(&config)?;
    if let Some(w) = workers {
        cfg.workers = w;
    }
    if let Some(o) = out {
        cfg.output = o;
    }
    if verify {
        cfg.homology = true;
        cfg.two_route = true;
    }
    cfg.validate()?;
    let outcome = run_experiment(&cfg)?;
    let format = match format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
        Format::Both => OutputFormat::Both,
    };
    write_outputs(&outcome, &cfg.output, format)?;

    let s = &outcome.summary;
    println!("{} rows written to {}", s.rows, cfg.output.display());
    for fam in &s.families {
        for r in &fam.per_r {
            println!(
                "{} R={}: limsup density {} over {} non-degenerate of {} rows",
                fam.family,
                r.r,
                r.limsup_density.as_deref().unwrap_or("-"),
                r.non_degenerate_rows,
                r.rows
            );
        }
        println!(
            "{} cc estimate: {}",
            fam.family,
            fam.cc_estimate.as_deref().unwrap_or("-")
        );
    }
    for row in outcome.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "error in {} {} R={}: {}",
            row.family,
            row.params,
            row.r,
            row.error.as_deref().unwrap_or_default()
        );
    }
    Ok(outcome.exit_code())
}

fn dump_matrix(
    family: FamilyTag,
    rank: Option<usize>,
    size: u64,
    route: Route,
    radius: usize,
    out: Option<PathBuf>,
) -> Result<()> {
    let group = schreier_rewire::group::GroupInstance::from_tag(family, rank)?;
    let graph = build_schreier(group.quotient(size)?.action());
    let presentation = match route {
        Route::Schreier => schreier_presentation(&graph, &group, 0)?,
        Route::Rewired => {
            let r = build_rewiring(&graph, &group, radius)?;
            let lab = label_rewiring(&graph, &r.edges)?;
            let c = correction_set(&graph, &lab, &group)?;
            rewired_complex(&graph, &group, &r.edges, &lab, &c)?
        }
    };
    let mut w = sink(&out)?;
    abelianized_matrix(&presentation).write_dump(&mut w)?;
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.families {
        for tag in FamilyTag::ALL {
            println!("{:<16} {}", tag.as_str(), tag.description());
        }
        return ExitCode::SUCCESS;
    }
    let result = match cli.command {
        None => {
            eprintln!("nothing to do; see --help");
            return ExitCode::from(2);
        }
        Some(Command::Run {
            config,
            out,
            workers,
            format,
            verify,
        }) => run(config, out, workers, format, verify),
        Some(Command::DumpGraph {
            family,
            rank,
            size,
            out,
        }) => (|| {
            let group = schreier_rewire::group::GroupInstance::from_tag(family, rank)?;
            let graph = build_schreier(group.quotient(size)?.action());
            let mut w = sink(&out)?;
            graph.write_adjacency(&mut w)?;
            w.flush()?;
            Ok(0)
        })(),
        Some(Command::DumpMatrix {
            family,
            rank,
            size,
            route,
            radius,
            out,
        }) => dump_matrix(family, rank, size, route, radius, out).map(|_| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e @ Error::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
