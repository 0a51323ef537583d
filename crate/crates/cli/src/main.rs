use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use toroidal_core::census::{emit_report, exit_code, run_verification, OutputFormat, RunConfig, Section};
use toroidal_core::curves::{good_configuration_search, LatticeChoice};
use toroidal_core::fpgroup::{coset_enumeration, Enumeration, ParabolicSubgroup, Presentation, DEFAULT_MAX_COSETS};
use toroidal_core::quotient::SearchScalar;

/// Bad arguments, bad bounds or unwritable output.
const USAGE_ERROR: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "toroidal-census", version, about = "Exact census of Euler-number-one smooth toroidal compactifications")]
struct Cli {
    /// Print per-check timings to stderr; twice adds the check details.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    /// Write output to this file instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    /// Default directory for report files when --output is not given.
    #[arg(long, env = "TOROIDAL_CENSUS_OUT", global = true, hide_env_values = true)]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run verification sections and print their verdicts.
    Verify {
        #[arg(long = "section", value_enum, default_value = "all")]
        sections: Vec<SectionArg>,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Run a single search.
    Search {
        #[command(subcommand)]
        target: SearchTarget,
    },
    /// Coset enumeration of a cusp subgroup in Δ.
    Cosets {
        #[arg(long, value_enum)]
        subgroup: SubgroupArg,
        #[arg(long, default_value_t = DEFAULT_MAX_COSETS as u64, value_parser = clap::value_parser!(u64).range(1..))]
        max_cosets: u64,
    },
    /// Run every section and emit the full report.
    Report {
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[command(flatten)]
        bounds: Bounds,
    },
}

#[derive(clap::Args, Debug)]
struct Bounds {
    #[arg(long, default_value_t = DEFAULT_MAX_COSETS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    max_cosets: u64,
    /// Largest n with C² = 2n on the singularity list.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(i64).range(1..))]
    singularity_bound: i64,
    /// Force every check whose id starts with this prefix to fail.
    #[arg(long, value_name = "CHECK_ID")]
    inject_fault: Option<String>,
}

#[derive(Subcommand, Debug)]
enum SearchTarget {
    /// Good configurations of four elliptic curves on E × E.
    GoodConfig {
        #[arg(long, value_enum)]
        lattice: LatticeArg,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SectionArg {
    All,
    Abelian,
    Bielliptic,
    Parabolic,
    Examples,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum LatticeArg {
    Eisenstein,
    Gaussian,
    Generic,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SubgroupArg {
    Delta6,
    Delta18a,
    Delta18b,
    Delta54,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Text => OutputFormat::Text,
        }
    }
}

fn config(sections: &[SectionArg], bounds: &Bounds) -> RunConfig {
    let sections: BTreeSet<Section> = if sections.contains(&SectionArg::All) {
        Section::ALL.into_iter().collect()
    } else {
        sections
            .iter()
            .map(|s| match s {
                SectionArg::Abelian => Section::Abelian,
                SectionArg::Bielliptic => Section::Bielliptic,
                SectionArg::Parabolic => Section::Parabolic,
                SectionArg::Examples | SectionArg::All => Section::Examples,
            })
            .collect()
    };
    RunConfig {
        sections,
        max_cosets: bounds.max_cosets as usize,
        singularity_bound: bounds.singularity_bound,
        fault: bounds.inject_fault.clone(),
    }
}

/// `--output` if given, else `<out_dir>/<default_name>` if the directory is
/// configured, else stdout.
fn destination(cli: &Cli, default_name: &str) -> Option<PathBuf> {
    cli.output.clone().or_else(|| cli.out_dir.as_ref().map(|d| d.join(default_name)))
}

fn write_out(dest: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match dest {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes).context("writing to stdout")
        }
    }
}

fn extension(f: FormatArg) -> &'static str {
    match f {
        FormatArg::Json => "json",
        FormatArg::Text => "txt",
    }
}

fn run_report(cli: &Cli, cfg: RunConfig, format: FormatArg, name: &str) -> Result<u8> {
    let report = run_verification(&cfg)?;
    if cli.verbose > 0 {
        for c in report.checks() {
            eprintln!("{:>10} us  {:<13} {}", c.timing_us, c.verdict.to_string(), c.id);
            if cli.verbose > 1 {
                eprintln!("{:>16}{}", "", c.detail);
            }
        }
    }
    let bytes = emit_report(&report, format.into())?;
    let dest = destination(cli, &format!("{name}.{}", extension(format)));
    write_out(dest.as_deref(), &bytes)?;
    Ok(exit_code(&report) as u8)
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Verify { sections, format, bounds } => run_report(cli, config(sections, bounds), *format, "census-verify"),
        Command::Report { format, bounds } => run_report(cli, config(&[SectionArg::All], bounds), *format, "census-report"),
        Command::Search { target: SearchTarget::GoodConfig { lattice } } => {
            let choice = match lattice {
                LatticeArg::Eisenstein => LatticeChoice::Eisenstein,
                LatticeArg::Gaussian => LatticeChoice::Gaussian,
                LatticeArg::Generic => LatticeChoice::Generic,
            };
            let report = good_configuration_search::<SearchScalar>(choice)?;
            let mut bytes = serde_json::to_vec_pretty(&report)?;
            bytes.push(b'\n');
            write_out(destination(cli, &format!("good-config-{}.json", choice.name())).as_deref(), &bytes)?;
            Ok(0)
        }
        Command::Cosets { subgroup, max_cosets } => {
            let s = match subgroup {
                SubgroupArg::Delta6 => ParabolicSubgroup::Delta6,
                SubgroupArg::Delta18a => ParabolicSubgroup::Delta18a,
                SubgroupArg::Delta18b => ParabolicSubgroup::Delta18b,
                SubgroupArg::Delta54 => ParabolicSubgroup::Delta54,
            };
            let e = coset_enumeration(&Presentation::delta(), &s.spec(), *max_cosets as usize)?;
            let (value, code) = match &e {
                Enumeration::Complete(t) => (
                    serde_json::json!({
                        "subgroup": s,
                        "generators": s.generator_words(),
                        "verdict": "PASS",
                        "index": t.index(),
                        "cosets_defined": t.cosets_defined(),
                    }),
                    if t.index() == s.nominal_index() { 0 } else { 1 },
                ),
                Enumeration::Inconclusive { defined, bound } => (
                    serde_json::json!({
                        "subgroup": s,
                        "generators": s.generator_words(),
                        "verdict": "INCONCLUSIVE",
                        "cosets_defined": defined,
                        "bound": bound,
                    }),
                    2,
                ),
            };
            let mut value = value;
            if code == 1 {
                value["verdict"] = "FAIL".into();
            }
            let mut bytes = serde_json::to_vec_pretty(&value)?;
            bytes.push(b'\n');
            write_out(destination(cli, &format!("cosets-{}.json", s.key())).as_deref(), &bytes)?;
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}
