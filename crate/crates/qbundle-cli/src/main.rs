//! `qbundle`: check catalog bundles or bundle files, and evaluate single
//! expressions against them.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use qbundle::catalog::{example_names, export, load_example, parse_example, Example};
use qbundle::text::Context;
use qbundle::{Calculus, Poly, Report};

#[derive(Parser)]
#[command(
    name = "qbundle",
    version,
    about = "Exact checks for quantum principal bundles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Longest algebra word checked; defaults to the example's bound.
    #[arg(long, global = true, env = "QBUNDLE_MAX_LEN", value_parser = clap::value_parser!(u32).range(1..=8))]
    max_len: Option<u32>,
    /// Highest form degree checked; defaults to the example's bound.
    #[arg(long, global = true, env = "QBUNDLE_MAX_DEG", value_parser = clap::value_parser!(u32).range(0..=4))]
    max_deg: Option<u32>,
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report as JSON to this path and as text next to it.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check of an example; exit status 1 if any fails.
    Check {
        /// Catalog name or bundle file.
        target: String,
    },
    /// Print the full report of an example; exit status 1 if any check fails.
    Report {
        /// Catalog name or bundle file.
        target: String,
    },
    /// Normal form of an expression on the total space.
    Nf {
        /// Catalog name or bundle file.
        target: String,
        /// Expression, e.g. `v*u`.
        expr: String,
    },
    /// Coaction of an element or total coaction of a form.
    Coact {
        /// Catalog name or bundle file.
        target: String,
        /// Expression.
        expr: String,
    },
    /// Exterior derivative of an expression.
    D {
        /// Catalog name or bundle file.
        target: String,
        /// Expression.
        expr: String,
    },
    /// Wedge product of two forms.
    Wedge {
        /// Catalog name or bundle file.
        target: String,
        /// Left factor.
        left: String,
        /// Right factor.
        right: String,
    },
    /// Vertical projection of a form.
    Piver {
        /// Catalog name or bundle file.
        target: String,
        /// Expression.
        expr: String,
    },
    /// Basis of the base forms of a degree.
    Base {
        /// Catalog name or bundle file.
        target: String,
        /// Form degree.
        degree: usize,
    },
    /// Print an example in the bundle file format.
    Export {
        /// Catalog name or bundle file.
        target: String,
    },
    /// List the catalog.
    List,
}

fn load(target: &str) -> Result<Example> {
    let path = Path::new(target);
    if path.exists() || target.contains('/') || target.contains('.') {
        let src =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return parse_example(&src).with_context(|| format!("parsing {}", path.display()));
    }
    Ok(load_example(target)?)
}

fn bounds(cli: &Cli, ex: &Example) -> (usize, usize) {
    (
        cli.max_len.map_or(ex.max_len, |v| v as usize),
        cli.max_deg.map_or(ex.max_deg, |v| v as usize),
    )
}

fn calculus(ex: &Example) -> Result<&Calculus> {
    ex.total_calculus()
        .map(|c| c.as_ref())
        .context("this example has no calculus")
}

fn parse(ex: &Example, src: &str) -> Result<Poly> {
    Ok(match ex.total_calculus() {
        Some(c) => Context::forms(c).parse(src)?,
        None => {
            Context::new(ex.total_algebra().context("this example has no algebra")?).parse(src)?
        }
    })
}

fn render(ex: &Example, p: &Poly) -> String {
    match ex.total_calculus() {
        Some(c) => c.omega().render(p),
        None => ex.total_algebra().map(|a| a.render(p)).unwrap_or_default(),
    }
}

fn emit(cli: &Cli, rep: &Report, full: bool) -> Result<ExitCode> {
    if let Some(path) = &cli.report {
        std::fs::write(path, rep.to_json())
            .with_context(|| format!("writing {}", path.display()))?;
        let text = path.with_extension("txt");
        std::fs::write(&text, rep.to_text())
            .with_context(|| format!("writing {}", text.display()))?;
    }
    match cli.format {
        Format::Json => println!("{}", rep.to_json()),
        Format::Text if full => print!("{}", rep.to_text()),
        Format::Text => {
            if let Some(c) = rep.first_failure() {
                println!("first failure: {} ({}): {}", c.id, c.anchor, c.witness);
            }
            println!("{} passed, {} failed", rep.passed(), rep.failed());
        }
    }
    Ok(if rep.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::List => {
            for name in example_names() {
                let ex = load_example(name)?;
                println!("{name:<14}{}", ex.description);
            }
        }
        Command::Check { target } | Command::Report { target } => {
            let ex = load(target)?;
            let (len, deg) = bounds(cli, &ex);
            let rep = ex.check(len, deg);
            return emit(cli, &rep, matches!(cli.command, Command::Report { .. }));
        }
        Command::Nf { target, expr } => {
            let ex = load(target)?;
            println!("{}", render(&ex, &parse(&ex, expr)?));
        }
        Command::Coact { target, expr } => {
            let ex = load(target)?;
            let p = parse(&ex, expr)?;
            let t = match (&ex.bundle, &ex.coaction) {
                (Some(b), _) => b.total_coaction(&p),
                (None, Some(c)) => c.apply(&p),
                _ => bail!("this example has no coaction"),
            };
            println!("{}", t.render());
        }
        Command::D { target, expr } => {
            let ex = load(target)?;
            let c = calculus(&ex)?;
            println!("{}", c.omega().render(&c.d(&parse(&ex, expr)?)?));
        }
        Command::Wedge {
            target,
            left,
            right,
        } => {
            let ex = load(target)?;
            let c = calculus(&ex)?;
            println!(
                "{}",
                c.omega()
                    .render(&c.wedge(&parse(&ex, left)?, &parse(&ex, right)?)?)
            );
        }
        Command::Piver { target, expr } => {
            let ex = load(target)?;
            let b = ex.bundle.as_ref().context("this example has no bundle")?;
            println!("{}", b.pi_ver(&parse(&ex, expr)?)?.render());
        }
        Command::Base { target, degree } => {
            let ex = load(target)?;
            let b = ex.bundle.as_ref().context("this example has no bundle")?;
            let (len, _) = bounds(cli, &ex);
            let basis = b.base_forms(*degree, len);
            println!(
                "# {} base forms of degree {degree} on words with at most {len} letters",
                basis.len()
            );
            for p in basis {
                println!("{}", render(&ex, &p));
            }
        }
        Command::Export { target } => print!("{}", export(&load(target)?)),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
