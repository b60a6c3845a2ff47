//! `asw` — exact computations with cyclic p-power covers of the projective
//! line: analyze a Witt vector, enumerate conductor strata, split one-point
//! rows, verify deformation certificates, test exactness, export graphs.

mod table;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use asw_core::deform;
use asw_core::error::Error;
use asw_core::json::{
    analyze_report, certificate_report, components_report, enumerate_report,
    exactness_search_report, SplitReport, WittInput, FORMAT_VERSION,
};
use asw_core::moduli;
use asw_core::ramify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Parser)]
#[command(name = "asw", version, about = "Cyclic p-power covers of the projective line: ramification data, conductor strata, deformations")]
struct Cli {
    /// Worker threads for enumeration (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a Witt vector and report datum, genus, p-rank, and Swan data.
    Analyze {
        /// Witt-vector JSON: inline text, or a path to a file.
        input: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Enumerate the conductor stratum Omega_d with its cover graph.
    Enumerate {
        /// Conductor tuple, comma separated (e.g. 4,8).
        #[arg(long, value_delimiter = ',')]
        d: Vec<u64>,
        #[arg(long)]
        p: u64,
        /// Restrict to matrices with these column-support counts.
        #[arg(long, value_delimiter = ',')]
        strata: Option<Vec<u64>>,
        /// List only the component (essential-free) matrices.
        #[arg(long)]
        components: bool,
        /// Emit the graph in DOT instead of a report.
        #[arg(long)]
        dot: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// List the irreducible components of the stratum with dimensions.
    Components {
        #[arg(long, value_delimiter = ',')]
        d: Vec<u64>,
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Decide irreducibility of the stratum.
    Irreducible {
        #[arg(long, value_delimiter = ',')]
        d: Vec<u64>,
        #[arg(long)]
        p: u64,
    },
    /// Split a one-point conductor row into its essential-free matrix.
    SplitPop {
        /// Conductor row, comma separated (e.g. 9,53).
        #[arg(long, value_delimiter = ',')]
        row: Vec<u64>,
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Verify that a family over F_q(t) deforms a cover over F_q.
    VerifyDeformation {
        /// Special-fiber Witt JSON (inline or path).
        special: String,
        /// Family Witt JSON (inline or path).
        family: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Search the values of a making dx/(x^u (x-a)^v) exact.
    Exactness {
        u: u64,
        v: u64,
        p: u64,
        /// Extension degree m of the field F_{p^m} searched for roots.
        #[arg(long, default_value_t = 1)]
        search_degree: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Export the cover graph of Omega_d as DOT.
    Graph {
        #[arg(long, value_delimiter = ',')]
        d: Vec<u64>,
        #[arg(long)]
        p: u64,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse(_) => 2,
        Error::UnsplitPole { .. } => 3,
        Error::InadmissibleTuple(_) => 4,
        _ => 1,
    }
}

fn read_input(arg: &str) -> Result<String, Error> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("cannot read `{arg}`: {e}")))
}

fn parse_witt(arg: &str) -> Result<asw_core::WittVector, Error> {
    let text = read_input(arg)?;
    let input: WittInput =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad Witt JSON: {e}")))?;
    input.to_witt()
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Analyze { input, format } => {
            let witt = parse_witt(&input)?;
            let analysis = ramify::analyze_cover(&witt)?;
            let pr = ramify::p_rank_vector(&analysis.datum);
            let genus = ramify::genus_vector(&analysis.datum, 0)?;
            let report = analyze_report(&analysis, &pr, &genus);
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
                Format::Table => print!("{}", table::analyze(&report)),
            }
            Ok(0)
        }
        Command::Enumerate {
            d,
            p,
            strata,
            components,
            dot,
            format,
        } => {
            // Component and strata listings come straight from the
            // enumeration; only the full report needs the cover graph.
            if components {
                let report = components_report(&d, p)?;
                match format {
                    Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
                    Format::Table => print!("{}", table::components(&report)),
                }
                return Ok(0);
            }
            if let Some(s) = strata {
                let matrices = moduli::strata(&d, &s, p)?;
                let report = serde_json::json!({
                    "format_version": FORMAT_VERSION,
                    "p": p,
                    "conductors": d,
                    "strata": s,
                    "matrices": matrices.iter().map(|m| m.rows().to_vec()).collect::<Vec<_>>(),
                });
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
                return Ok(0);
            }
            let graph = moduli::build_graph(&d, p)?;
            if dot {
                print!("{}", graph.to_dot());
                return Ok(0);
            }
            let report = enumerate_report(&graph)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
                Format::Table => print!("{}", table::enumerate(&report)),
            }
            Ok(0)
        }
        Command::Components { d, p, format } => {
            let report = components_report(&d, p)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
                Format::Table => print!("{}", table::components(&report)),
            }
            Ok(0)
        }
        Command::Irreducible { d, p } => {
            let verdict = moduli::irreducible(&d, p)?;
            let closed = moduli::irreducible_closed_form(&d, p)?;
            let count = moduli::components(&d, p)?.len();
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "format_version": FORMAT_VERSION,
                    "p": p,
                    "conductors": d,
                    "irreducible": verdict,
                    "irreducible_closed_form": closed,
                    "component_count": count,
                }))
                .unwrap()
            );
            Ok(0)
        }
        Command::SplitPop { row, p, format } => {
            let split = deform::pop_split(&row, p)?;
            let report = SplitReport {
                format_version: FORMAT_VERSION,
                p,
                input_row: row,
                rows: split.rows().to_vec(),
                column_sums: split.conductors(),
            };
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
                Format::Table => print!("{}", table::split(&report)),
            }
            Ok(0)
        }
        Command::VerifyDeformation {
            special,
            family,
            format,
        } => {
            let special = parse_witt(&special)?;
            let family = parse_witt(&family)?;
            let cert = deform::verify_deformation(&special, &family)?;
            let report = certificate_report(&cert);
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
                Format::Table => print!("{}", table::certificate(&report)),
            }
            Ok(if cert.valid { 0 } else { 5 })
        }
        Command::Exactness {
            u,
            v,
            p,
            search_degree,
            format,
        } => {
            let search = deform::exactness_search(u, v, p, search_degree)?;
            let report = exactness_search_report(&search);
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
                Format::Table => print!("{}", table::exactness(&report)),
            }
            Ok(0)
        }
        Command::Graph { d, p } => {
            let graph = moduli::build_graph(&d, p)?;
            print!("{}", graph.to_dot());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
