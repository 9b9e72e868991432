use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use dpmult::families::{check_separations, classify, make_family, paper_separations, FamilySpec, Space};
use dpmult::multiplier::{
    brute_force_opnorm, default_probes, mult_lower_bound_with, thm41_functional, LowerSource, SearchOptions,
};
use dpmult::report::to_json_string;
use dpmult::repro::run_all;
use dpmult::seqcore::read_seq_arg;
use dpmult::spectral::{delta_z_report, resolvent_probe, symbol_spectrum_image};
use dpmult::{convolve, norm, Exponent, FinSeq, NormKind, NormTag};

/// Experiments on d_p sequence spaces, their multipliers and the shift.
///
/// Thread count follows RAYON_NUM_THREADS.
#[derive(Parser)]
#[command(name = "dpmult", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Exponent p, e.g. 2, 1.5 or 3/2.
    #[arg(long)]
    p: Option<Exponent>,
    /// Conjugate exponent q (alternative to --p).
    #[arg(long, conflicts_with = "p")]
    q: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (directory for repro); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl Common {
    fn exponent(&self) -> anyhow::Result<Exponent> {
        Ok(match (self.p, self.q) {
            (Some(p), _) => p,
            (None, Some(q)) => Exponent::from_conjugate(q)?,
            (None, None) => Exponent::rational(2, 1)?,
        })
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Every norm of a sequence.
    Norm {
        /// Inline list "1,0.5" or @file.json.
        #[arg(long)]
        a: String,
        #[command(flatten)]
        common: Common,
    },
    /// Cauchy product a * b.
    Conv {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[command(flatten)]
        common: Common,
    },
    /// Certified bracket on the multiplier norm of b.
    Mult {
        #[arg(long)]
        b: String,
        /// Ascent evaluations.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Randomise phases of search vectors.
        #[arg(long)]
        complex_phases: bool,
        /// Also run the brute-force oracle in this dimension (<= 6).
        #[arg(long)]
        oracle_dim: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        oracle_samples: usize,
        /// Also report the block functional for this probe a.
        #[arg(long)]
        a: Option<String>,
        #[arg(long, default_value_t = 16)]
        n_max: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Symbol image f_b on a polar grid of the closed disc.
    Spec {
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 32)]
        radial: usize,
        #[arg(long, default_value_t = 128)]
        angular: usize,
        /// Grid as RADIALxANGULAR; overrides --radial/--angular.
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Truncated resolvent (S - lambda I)^{-1} e_0.
    Resolvent {
        /// Complex number: "0.5", "0.5+0.5i" or "re,im".
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 2048)]
        n_max: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Norm bounds of the point evaluation at z.
    Deltaz {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 10_000)]
        n_max: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Classify a symbol family, or print the separation table.
    Family {
        /// e.g. "sparse:alpha=1/2", "power:sigma=3/2", "harmonic", "block", "geometric:r=1/2".
        #[arg(long, required_unless_present = "separations")]
        spec: Option<String>,
        /// Spaces to test, comma separated (l1, l1w, dp, dpp, d1).
        #[arg(long, default_value = "l1,l1w,dp,dpp,d1")]
        space: String,
        /// Also emit the truncation of length N.
        #[arg(long)]
        realize: Option<usize>,
        #[arg(long)]
        separations: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run the acceptance suite; one report per criterion plus summary.json.
    Repro {
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Input(anyhow::Error),
    Claims,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<dpmult::Error> for Failure {
    fn from(e: dpmult::Error) -> Self {
        Failure::Input(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(e.into())
    }
}

fn parse_complex(s: &str) -> anyhow::Result<Complex64> {
    if let Some((re, im)) = s.split_once(',') {
        return Ok(Complex64::new(re.trim().parse()?, im.trim().parse()?));
    }
    s.trim().parse::<Complex64>().map_err(|_| anyhow!("bad complex number {s:?}"))
}

fn parse_grid(s: &str) -> anyhow::Result<(usize, usize)> {
    let (r, a) = s.split_once(['x', 'X']).ok_or_else(|| anyhow!("grid must look like 64x256"))?;
    Ok((r.trim().parse()?, a.trim().parse()?))
}

fn seq(arg: &str) -> anyhow::Result<FinSeq> {
    read_seq_arg(arg).with_context(|| format!("reading sequence {arg:?}"))
}

fn emit(common: &Common, text: String) -> anyhow::Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize + ?Sized>(common: &Common, value: &T) -> anyhow::Result<()> {
    if matches!(common.format, Format::Csv) {
        bail!("this command has no CSV form");
    }
    emit(common, to_json_string(value)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Norm { a, common } => {
            let a = seq(&a)?;
            let p = common.exponent()?;
            let values: serde_json::Map<String, serde_json::Value> = NormTag::ALL
                .iter()
                .map(|&tag| {
                    let v = NormKind::new(tag, p).map(|k| norm(&a, k)).ok();
                    (tag.name().to_string(), json!(v))
                })
                .collect();
            emit_json(&common, &json!({"p": p, "len": a.len(), "norms": values}))?;
        }
        Cmd::Conv { a, b, common } => {
            let c = convolve(&seq(&a)?, &seq(&b)?);
            match common.format {
                Format::Csv => emit(&common, c.to_csv())?,
                Format::Json => emit_json(&common, &c)?,
            }
        }
        Cmd::Mult { b, budget, complex_phases, oracle_dim, oracle_samples, a, n_max, common } => {
            let b = seq(&b)?;
            let p = common.exponent()?;
            let opts = SearchOptions { complex_phases };
            let probes = default_probes(&b, p, common.seed, opts);
            let mut bounds = mult_lower_bound_with(&b, p, &probes, budget, common.seed, opts)?;
            let mut extra = serde_json::Map::new();
            if let Some(dim) = oracle_dim {
                let v = brute_force_opnorm(&b, p, dim, oracle_samples, common.seed)?;
                if v > bounds.lower {
                    bounds.lower = v;
                    bounds.lower_source = LowerSource::Oracle;
                }
                extra.insert("oracle".into(), json!(v));
            }
            if let Some(a) = a {
                let rep = thm41_functional(&b, &seq(&a)?, p, n_max);
                extra.insert("block_functional".into(), serde_json::to_value(&rep)?);
            }
            let mut out = serde_json::to_value(&bounds)?;
            if let serde_json::Value::Object(m) = &mut out {
                m.insert("p".into(), json!(p));
                m.insert("seed".into(), json!(common.seed));
                m.insert("budget".into(), json!(budget));
                m.extend(extra);
            }
            emit_json(&common, &out)?;
        }
        Cmd::Spec { b, radial, angular, grid, common } => {
            let (radial, angular) = match grid {
                Some(g) => parse_grid(&g)?,
                None => (radial, angular),
            };
            let cloud = symbol_spectrum_image(&seq(&b)?, radial, angular)?;
            match common.format {
                Format::Csv => emit(&common, cloud.to_csv())?,
                Format::Json => emit_json(&common, &cloud)?,
            }
        }
        Cmd::Resolvent { lambda, n_max, common } => {
            let rep = resolvent_probe(parse_complex(&lambda)?, common.exponent()?, n_max)?;
            emit_json(&common, &rep)?;
        }
        Cmd::Deltaz { z, n_max, common } => {
            let rep = delta_z_report(parse_complex(&z)?, common.exponent()?, n_max)?;
            emit_json(&common, &json!({"report": rep, "sandwich_holds": rep.sandwich_holds()}))?;
        }
        Cmd::Family { spec, space, realize, separations, common } => {
            if separations {
                let table = check_separations(&paper_separations())?;
                emit_json(&common, &table)?;
                if table.iter().any(|o| !o.agrees) {
                    return Err(Failure::Claims);
                }
                return Ok(());
            }
            let spec: FamilySpec = spec.expect("required by clap").parse()?;
            let fam = make_family(spec)?;
            let p = common.exponent()?;
            let verdicts = space
                .split(',')
                .map(|s| Ok(classify(&fam, s.parse::<Space>()?, p)?))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let mut out = json!({"family": spec, "p": p, "verdicts": verdicts});
            if let Some(n) = realize {
                out["realized"] = serde_json::to_value(fam.realize(n)?)?;
            }
            emit_json(&common, &out)?;
        }
        Cmd::Repro { common } => {
            let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("report"));
            let summary = run_all(common.seed, Some(&dir), |rep| {
                eprintln!("{} {}", if rep.pass() { "PASS" } else { "FAIL" }, rep.experiment_id);
            })?;
            eprintln!("{}/{} criteria passed; reports in {}", summary.passed, summary.passed + summary.failed, dir.display());
            if !summary.all_pass() {
                return Err(Failure::Claims);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Claims) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
