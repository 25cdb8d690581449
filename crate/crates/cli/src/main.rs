use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kstab::analysis::{
    futaki_to_csv, oracle_compare, report_to_text, rows_to_csv, rows_to_text, sweep, sweep_sequential, AnalysisOptions,
    VarietyDocument,
};
use kstab::cone::{ConeVariety, ReebVector};
use kstab::families::{make_family, FamilyInstance, FamilyKind};
use kstab::pdivisor::{presentation_for_family, presentation_for_variety, PDivisorPresentation};
use kstab::rational::parse_rational;
use kstab::volume::DEFAULT_TOLERANCE;
use kstab::Error;

#[derive(Parser)]
#[command(name = "kstab", version, about = "K-stability of weighted-homogeneous cone singularities")]
struct Cli {
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,
    /// Gradient tolerance of the numeric volume minimizer.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Treat central fibers of user-supplied degenerations as normal.
    #[arg(long, global = true)]
    assume_normal: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Volume minimizer, Futaki invariants and verdict for one variety.
    Analyze(Source),
    /// Verdicts over a grid of family parameters.
    Sweep {
        #[arg(long)]
        family: FamilyKind,
        /// Inclusive range such as `2..12`, or a single value.
        #[arg(short, long, value_parser = parse_range, default_value = "2..12")]
        p: (i64, i64),
        #[arg(short, long, value_parser = parse_range, default_value = "2..12")]
        q: (i64, i64),
        /// Run on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Polyhedral divisor data of a complexity-one variety.
    Pdivisor(Source),
    /// Compare index-character coefficients with brute-force lattice counts.
    Oracle {
        #[command(flatten)]
        source: Source,
        /// Reeb field in torus coordinates, e.g. `6,2`; defaults to the
        /// family reference field.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        reeb: Option<Vec<String>>,
        #[arg(long, default_value_t = 40)]
        cutoff: u64,
    },
}

#[derive(Args)]
struct Source {
    /// Variety document (TOML or JSON).
    #[arg(conflicts_with = "family")]
    file: Option<PathBuf>,
    #[arg(long, requires_all = ["p", "q"])]
    family: Option<FamilyKind>,
    #[arg(short)]
    p: Option<i64>,
    #[arg(short)]
    q: Option<i64>,
}

enum Loaded {
    Family(FamilyInstance),
    Document(VarietyDocument),
}

impl Source {
    fn load(&self) -> Result<Loaded, Error> {
        match (&self.file, self.family) {
            (Some(path), _) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
                Ok(Loaded::Document(VarietyDocument::parse(&text)?))
            }
            (None, Some(kind)) => Ok(Loaded::Family(make_family(kind, self.p.unwrap(), self.q.unwrap())?)),
            (None, None) => Err(Error::InvalidInput("give a document path or --family with -p and -q".into())),
        }
    }
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let bad = || format!("expected `a..b` or an integer, got {s:?}");
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim_start_matches('=').trim().parse().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok((lo, hi))
}

fn json<T: serde::Serialize>(value: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::Internal(format!("json: {e}")))
}

fn pdivisor_text(pd: &PDivisorPresentation) -> String {
    let mut out = format!("tail cone      {:?}\n", pd.tail_cone.rays);
    out.push_str(&format!("dual cone      {:?}\n", pd.dual_cone.rays));
    if pd.saturation_index != 1 {
        out.push_str(&format!("saturation     index {}\n", pd.saturation_index));
    }
    for r in &pd.rays {
        let vertices: Vec<String> = r
            .delta
            .vertices
            .iter()
            .map(|v| format!("({})", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")))
            .collect();
        out.push_str(&format!(
            "ray {:<10} x{}  coordinates {:?}  vertices {}{}\n",
            format!("{:?}", r.ray.ray),
            r.ray.multiplicity,
            r.ray.coordinates,
            vertices.join(" "),
            if r.psi.is_trivial() { "  (trivial)" } else { "" }
        ));
    }
    out.push_str(&format!(
        "bound          at most {} nontrivial degenerations ({} distinct, {} non-integral slopes)\n",
        pd.slopes.count_nontrivial_bound, pd.slopes.distinct_nontrivial, pd.slopes.non_integral_slopes
    ));
    out
}

fn variety_of(loaded: &Loaded) -> Result<ConeVariety, Error> {
    match loaded {
        Loaded::Family(f) => Ok(f.variety.clone()),
        Loaded::Document(d) => d.variety(),
    }
}

/// Output text, and whether a consistency check failed.
fn run(cli: &Cli) -> Result<(String, bool), Error> {
    let opts = AnalysisOptions { tol: cli.tol, assume_normal: cli.assume_normal };
    match &cli.command {
        Command::Analyze(src) => {
            let report = match src.load()? {
                Loaded::Family(f) => kstab::analysis::analyze(&f, &opts)?,
                Loaded::Document(d) => d.analyze(&opts)?,
            };
            let out = match cli.format {
                Format::Json => json(&report)?,
                Format::Csv => futaki_to_csv(&report)?,
                Format::Text => report_to_text(&report),
            };
            Ok((out, false))
        }
        Command::Sweep { family, p, q, sequential } => {
            let rows = if *sequential { sweep_sequential(*family, *p, *q, &opts) } else { sweep(*family, *p, *q, &opts) };
            let out = match cli.format {
                Format::Json => json(&rows)?,
                Format::Csv => rows_to_csv(&rows)?,
                Format::Text => rows_to_text(&rows),
            };
            Ok((out, false))
        }
        Command::Pdivisor(src) => {
            let pd = match src.load()? {
                Loaded::Family(f) => presentation_for_family(&f)?,
                Loaded::Document(d) => presentation_for_variety(&d.variety()?)?,
            };
            let out = match cli.format {
                Format::Text => pdivisor_text(&pd),
                _ => json(&pd)?,
            };
            Ok((out, false))
        }
        Command::Oracle { source, reeb, cutoff } => {
            let loaded = source.load()?;
            let v = variety_of(&loaded)?;
            let xi = match (reeb, &loaded) {
                (Some(coords), _) => ReebVector::new(coords.iter().map(|c| parse_rational(c)).collect::<Result<_, _>>()?),
                (None, Loaded::Family(f)) => f.reference_reeb(),
                (None, Loaded::Document(_)) => {
                    return Err(Error::InvalidInput("--reeb is required for document input".into()))
                }
            };
            let report = oracle_compare(&v, &xi, *cutoff)?;
            let out = match cli.format {
                Format::Json => json(&report)?,
                Format::Csv => {
                    let mut s = String::from("weight,brute_force,series\n");
                    for (k, (a, b)) in report.brute_force.iter().zip(&report.series).enumerate() {
                        s.push_str(&format!("{k},{a},{b}\n"));
                    }
                    s
                }
                Format::Text => {
                    let verdict = if report.agrees() {
                        "agree".to_string()
                    } else {
                        format!("differ at {:?}", report.mismatches)
                    };
                    format!("{} at {} through weight {}: {verdict}\n", report.name, report.xi, report.cutoff)
                }
            };
            Ok((out, !report.agrees()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, failed)) => {
            print!("{out}");
            if failed {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_internal() { 3 } else { 2 })
        }
    }
}
