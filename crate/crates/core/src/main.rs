use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use mueller_cert::report::{analyze_file, summary, sig12, to_json, Report, EXIT_INTERNAL, EXIT_PARSE};
use mueller_cert::studies::{tetra_scan, vanzyl_case};
use mueller_cert::{CertError, DEFAULT_TOL};

#[derive(Parser)]
#[command(name = "mueller-cert", version, about = "Certify 4x4 polarization transfer matrices")]
struct Cli {
    /// Relative tolerance for every verdict
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Report)]
    format: Format,
    /// Exit 0 = Mueller, 3 = pre-Mueller only, 4 = not pre-Mueller
    #[arg(long, global = true)]
    verdict_exit: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Report,
    Summary,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one matrix file
    Analyze { file: PathBuf },
    /// Monte-Carlo volume of physical diagonal matrices in the pre-Mueller cube
    TetraScan {
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Constraint check on the van Zyl canonical parameters
    Vanzyl,
    /// Analyze every regular file in a directory, in sorted order
    Batch { dir: PathBuf },
}

fn render(r: &Report, format: Format) -> String {
    match format {
        Format::Report => to_json(r),
        Format::Summary => summary(r),
    }
}

fn fail(err: &CertError) -> ExitCode {
    eprintln!("error: {err}");
    let code = if matches!(err, CertError::Parse(_)) { EXIT_PARSE } else { EXIT_INTERNAL };
    ExitCode::from(code as u8)
}

fn batch(dir: &Path, cli: &Cli) -> ExitCode {
    let mut files: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(rd) => rd.filter_map(|e| e.ok()).map(|e| e.path()).filter(|p| p.is_file()).collect(),
        Err(e) => return fail(&CertError::Parse(format!("{}: {e}", dir.display()))),
    };
    files.sort();
    let results: Vec<_> = files.par_iter().map(|p| analyze_file(p, cli.tol)).collect();

    let mut worst = 0;
    let mut parse_failed = false;
    for (path, res) in files.iter().zip(results) {
        match res {
            Ok(r) => {
                match cli.format {
                    Format::Report => println!("{{\"file\": {:?}, \"report\": {}}}", path.display().to_string(), to_json(&r)),
                    Format::Summary => print!("== {}\n{}", path.display(), summary(&r)),
                }
                worst = worst.max(r.tier().exit_code());
            }
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                parse_failed = true;
            }
        }
    }
    if parse_failed {
        ExitCode::from(EXIT_PARSE as u8)
    } else if cli.verdict_exit {
        ExitCode::from(worst as u8)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Analyze { file } => match analyze_file(file, cli.tol) {
            Ok(r) => {
                println!("{}", render(&r, cli.format).trim_end());
                if cli.verdict_exit {
                    ExitCode::from(r.tier().exit_code() as u8)
                } else {
                    ExitCode::SUCCESS
                }
            }
            Err(e) => fail(&e),
        },
        Command::TetraScan { samples, seed } => {
            let scan = tetra_scan(*samples, *seed);
            match cli.format {
                Format::Report => println!("{}", to_json(&scan)),
                Format::Summary => println!(
                    "samples {} seed {}: fraction Mueller {:.6}, fraction pre-Mueller {:.6}",
                    scan.samples, scan.seed, scan.fraction_mueller, scan.fraction_pre_mueller
                ),
            }
            ExitCode::SUCCESS
        }
        Command::Vanzyl => {
            let v = vanzyl_case();
            match cli.format {
                Format::Report => println!("{}", to_json(&v)),
                Format::Summary => {
                    let b = v.binding_constraint;
                    println!("d = {:?}", v.d);
                    println!("Type-I constraints hold: {}", v.type1_constraints);
                    println!("binding constraint #{}: {}, violation {:.4}", b.index, b.formula, -b.slack);
                    println!("diagonal-form H eigenvalues: {:?}", v.diagonal_h_eigenvalues.map(sig12));
                    println!("negative eigenvalues: {}", v.negative_eigenvalues);
                    println!("note: {}", v.note);
                }
            }
            ExitCode::SUCCESS
        }
        Command::Batch { dir } => batch(dir, &cli),
    }
}
