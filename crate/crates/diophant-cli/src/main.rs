//! `approx`: command-line front end for the diophant library.
//!
//! Every run prints (or writes with `--out`) a JSON document
//! `{"manifest": ..., "result": ...}`; CSV and SVG outputs are available where noted.
//! Exit codes: 0 success, 1 failed acceptance criterion, 2 invalid input,
//! 3 undecided at the precision cap, 4 digit-stream horizon exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use diophant::acceptance;
use diophant::arith_sums::{c_constant, coprime_main_term, coprime_progression_count, phi_progression_sum, prime_factors, regular_system_count};
use diophant::asymptotic::inhomogeneous_hits;
use diophant::cf::{parse_rational, Real, RealSpec};
use diophant::enclosure::{precision_cap, rat_to_f64, set_precision_cap};
use diophant::metric_lab::{borel_bernstein_trial, khintchine_trial, uniform_survival, BBTrialSpec, BlockRule, PhiSeq, TrialReport};
use diophant::orchard::{min_blocking_radius, polya_baseline, render, visibility, DistanceMode, OrchardScene, RadiusModel};
use diophant::three_distance::{gaps_direct, verify};
use diophant::uniform::{badly_witness, cns_report, dirichlet_scan, exponent_probe, witness, PsiSpec};
use diophant::{Constraint, Error};

/// Environment variable holding the default precision cap in bits.
const CAP_ENV: &str = "APPROX_PRECISION_CAP";

#[derive(Parser, Debug)]
#[command(
    name = "approx",
    version,
    about = "Rational approximation with numerators and denominators in arithmetic progressions"
)]
struct Cli {
    /// Precision cap in bits for certified comparisons (default from APPROX_PRECISION_CAP, else 65536).
    #[arg(long, global = true)]
    precision_cap: Option<u32>,
    /// Worker threads (default: available cores); results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Approximations (am + r)/(bn + s) within factor * ab / N^2.
    Hits(HitsArgs),
    /// Dirichlet-type uniform approximation.
    #[command(subcommand)]
    Uniform(UniformCmd),
    /// Gap lengths of {i xi}, 0 <= i <= Q.
    Threedist(ThreedistArgs),
    /// Arithmetic sums with exact values, main terms and errors (CSV).
    #[command(subcommand)]
    Sums(SumsCmd),
    /// Seeded Monte-Carlo experiments.
    #[command(subcommand)]
    Metric(MetricCmd),
    /// Visibility in the orchard of the pseudo-lattice.
    #[command(subcommand)]
    Orchard(OrchardCmd),
    /// Run an acceptance suite.
    Accept {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(acceptance::SUITES))]
        suite: String,
    },
}

#[derive(Args, Debug)]
struct HitsArgs {
    #[arg(long)]
    xi: String,
    #[arg(long)]
    abrs: String,
    /// Shift alpha in the same format as --xi.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, default_value = "1/4")]
    factor: String,
    #[arg(long)]
    qmax: u64,
}

#[derive(Args, Debug)]
struct XiConstraint {
    #[arg(long)]
    xi: String,
    #[arg(long)]
    abrs: String,
}

#[derive(Subcommand, Debug)]
enum UniformCmd {
    /// List Q in [qmin, qmax] without an approximation within Psi(Q).
    Scan {
        #[command(flatten)]
        base: XiConstraint,
        #[arg(long, default_value = "1,1,0")]
        psi: String,
        #[arg(long, default_value_t = 1)]
        qmin: u64,
        #[arg(long)]
        qmax: u64,
    },
    /// Per-index congruence classification of the convergents.
    Cns {
        #[command(flatten)]
        base: XiConstraint,
        #[arg(long, default_value = "1,1,0")]
        psi: String,
        #[arg(long, default_value_t = 30)]
        kmax: usize,
    },
    /// Explicit approximation with denominator at most Q and its audit trace.
    Witness {
        #[command(flatten)]
        base: XiConstraint,
        #[arg(long, default_value = "1,1,0")]
        psi: String,
        #[arg(long)]
        q: String,
    },
    /// Largest Q dist(N xi, aZ + r) minimum up to qmax.
    Exponent {
        #[command(flatten)]
        base: XiConstraint,
        #[arg(long)]
        qmax: u64,
    },
    /// Best inhomogeneous approximation against 2ab(M + 2)/Q.
    Badly {
        #[command(flatten)]
        base: XiConstraint,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        q: String,
    },
}

#[derive(Args, Debug)]
struct ThreedistArgs {
    #[arg(long)]
    xi: String,
    #[arg(long)]
    q: u64,
    /// Compare with the spectrum predicted from the greedy decomposition of Q.
    #[arg(long)]
    verify: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum SumsCmd {
    /// Count of n = r (mod a), n <= x, coprime to q, for q in [qmin, qmax].
    Coprime {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        r: u64,
        #[arg(long, default_value_t = 1)]
        qmin: u64,
        #[arg(long)]
        qmax: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
    },
    /// Sum of phi(uk + v), k >= 0, up to each Q against C(u, v) Q^2.
    Totient {
        #[arg(long)]
        u: u64,
        #[arg(long)]
        v: u64,
        /// Comma-separated Q values.
        #[arg(long, value_delimiter = ',')]
        q: Vec<u64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
    },
    /// Reduced fractions (am + r)/N in (lo, hi) with N in the regular subsequence, Q/2 <= N <= Q.
    Regcount {
        #[arg(long)]
        abrs: String,
        #[arg(long, default_value = "0")]
        lo: String,
        #[arg(long, default_value = "1")]
        hi: String,
        #[arg(long, value_delimiter = ',')]
        q: Vec<u64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
    },
}

#[derive(Args, Debug)]
struct TrialArgs {
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long, default_value_t = 2000)]
    samples: u64,
    /// Keep the per-sample outcome codes in the JSON output.
    #[arg(long)]
    outcomes: bool,
}

#[derive(Subcommand, Debug)]
enum MetricCmd {
    /// Fractions of samples with a hit |xi - (am + r)/N| < Psi(N) in dyadic blocks.
    Khintchine {
        #[arg(long)]
        abrs: String,
        #[arg(long)]
        psi: String,
        /// Blocks [2^j, 2^(j+1)] for j in jmin..=jmax.
        #[arg(long, default_value_t = 6)]
        jmin: u32,
        #[arg(long, default_value_t = 12)]
        jmax: u32,
        #[command(flatten)]
        trial: TrialArgs,
    },
    /// Survival of the uniform property up to each Q of the grid.
    Uniform {
        #[arg(long)]
        abrs: String,
        #[arg(long)]
        psi: String,
        #[arg(long, value_delimiter = ',')]
        qgrid: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        q0: u64,
        /// Write the survival curve as CSV instead of JSON.
        #[arg(long)]
        csv: bool,
        #[command(flatten)]
        trial: TrialArgs,
    },
    /// Events on blocks of partial quotients followed by a large digit.
    Bb {
        #[arg(long, default_value_t = 2)]
        digit_cap: u64,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 3)]
        c: u64,
        /// phi_n = max(1, coef n^exp) as coef,exp.
        #[arg(long, default_value = "1,1")]
        phi: String,
        /// `fixed:i1,...,id` or `target:b`.
        #[arg(long, default_value = "target:2")]
        rule: String,
        #[arg(long, default_value_t = 2)]
        kmin: u64,
        #[arg(long, default_value_t = 60)]
        kmax: u64,
        #[command(flatten)]
        trial: TrialArgs,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Euclid,
    Vertical,
}

#[derive(Args, Debug)]
struct SceneArgs {
    #[arg(long)]
    abrs: String,
    /// `asymptotic` (radius ab/(4x)) or `uniform:R`.
    #[arg(long, default_value = "asymptotic")]
    model: String,
    #[arg(long)]
    depth: u64,
    #[arg(long, default_value = "0")]
    glade: String,
    #[arg(long, value_enum, default_value = "euclid")]
    mode: ModeArg,
    /// Keep only trees with |y| <= theta x.
    #[arg(long)]
    sector: Option<String>,
}

#[derive(Subcommand, Debug)]
enum OrchardCmd {
    /// First tree blocking the ray of the given slope.
    View {
        #[command(flatten)]
        scene: SceneArgs,
        #[arg(long)]
        slope: String,
    },
    /// Smallest distance from the ray to a tree (uniform model).
    Minradius {
        #[command(flatten)]
        scene: SceneArgs,
        #[arg(long)]
        slope: String,
    },
    /// Trees (bn, am) inside the disk of radius N against a grid of slopes.
    Polya {
        #[arg(long, default_value = "1,1,0,0")]
        abrs: String,
        #[arg(long)]
        n: u64,
        /// Grid of `count` slopes (2k - count - 1)/(count / 5), k = 1..count.
        #[arg(long, default_value_t = 100)]
        slopes: i64,
        #[arg(long)]
        radius: Option<String>,
    },
    /// SVG drawing of the scene and rays.
    Render {
        #[command(flatten)]
        scene: SceneArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        slopes: Vec<f64>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Precondition(_) | Error::Parse(_) => 2,
            Error::Indeterminate { .. } => 3,
            Error::Horizon { .. } => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// What a command produced.
enum Output {
    Json(Value),
    Text(String),
}

fn to_json<T: Serialize>(x: &T) -> Outcome<Value> {
    Ok(serde_json::to_value(x)?)
}

fn xi_of(s: &str) -> Outcome<RealSpec> {
    Ok(RealSpec::parse(s)?)
}

fn constraint_of(s: &str) -> Outcome<Constraint> {
    Ok(s.parse::<Constraint>()?)
}

fn psi_of(s: &str) -> Outcome<PsiSpec> {
    Ok(PsiSpec::parse(s)?)
}

fn csv(header: &str, rows: Vec<String>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn table(format: TableFormat, header: &str, rows: Vec<Vec<String>>) -> Output {
    match format {
        TableFormat::Csv => Output::Text(csv(header, rows.into_iter().map(|r| r.join(",")).collect())),
        TableFormat::Json => {
            let keys: Vec<&str> = header.split(',').collect();
            let v: Vec<Value> = rows
                .into_iter()
                .map(|r| Value::Object(keys.iter().zip(r).map(|(k, x)| (k.to_string(), Value::String(x))).collect()))
                .collect();
            Output::Json(Value::Array(v))
        }
    }
}

fn trial_json(mut rep: TrialReport, keep: bool) -> Outcome<Output> {
    if !keep {
        rep.outcomes.clear();
    }
    Ok(Output::Json(to_json(&rep)?))
}

fn hits(a: &HitsArgs) -> Outcome<Output> {
    let xi = xi_of(&a.xi)?;
    let c = constraint_of(&a.abrs)?;
    let alpha = a.alpha.as_deref().map(xi_of).transpose()?;
    let factor = parse_rational(&a.factor)?;
    let hits = inhomogeneous_hits(&xi, alpha.as_ref().map(|x| x as &dyn Real), &c, &factor, a.qmax)?;
    Ok(Output::Json(to_json(&hits)?))
}

fn uniform(cmd: &UniformCmd) -> Outcome<Output> {
    let v = match cmd {
        UniformCmd::Scan { base, psi, qmin, qmax } => to_json(&dirichlet_scan(&xi_of(&base.xi)?, &constraint_of(&base.abrs)?, &psi_of(psi)?, *qmin, *qmax)?)?,
        UniformCmd::Cns { base, psi, kmax } => to_json(&cns_report(&xi_of(&base.xi)?, &constraint_of(&base.abrs)?, &psi_of(psi)?, *kmax)?)?,
        UniformCmd::Witness { base, psi, q } => to_json(&witness(&xi_of(&base.xi)?, &constraint_of(&base.abrs)?, &parse_rational(q)?, &psi_of(psi)?)?)?,
        UniformCmd::Exponent { base, qmax } => to_json(&exponent_probe(&xi_of(&base.xi)?, &constraint_of(&base.abrs)?, *qmax)?)?,
        UniformCmd::Badly { base, alpha, q } => {
            let alpha = alpha.as_deref().map(xi_of).transpose()?;
            to_json(&badly_witness(
                &xi_of(&base.xi)?,
                alpha.as_ref().map(|x| x as &dyn Real),
                &constraint_of(&base.abrs)?,
                &parse_rational(q)?,
            )?)?
        }
    };
    Ok(Output::Json(v))
}

fn threedist(a: &ThreedistArgs) -> Outcome<Output> {
    let xi = xi_of(&a.xi)?;
    let v = if a.verify {
        to_json(&verify(&xi, a.q)?)?
    } else {
        to_json(&gaps_direct(&xi, a.q)?)?
    };
    Ok(Output::Json(v))
}

fn sums(cmd: &SumsCmd) -> Outcome<Output> {
    match cmd {
        SumsCmd::Coprime { x, a, r, qmin, qmax, format } => {
            let mut rows = Vec::new();
            for q in (*qmin).max(1)..=*qmax {
                if num_integer::gcd(num_integer::gcd(*a, *r), q) != 1 {
                    continue;
                }
                let exact = coprime_progression_count(*x, q, *a, *r)?;
                let main = coprime_main_term(*x, q, *a, *r)?;
                let err = rat_to_f64(&main) - exact as f64;
                let bound = 4 * a * (1u64 << prime_factors(q).len());
                rows.push(vec![
                    q.to_string(),
                    exact.to_string(),
                    format!("{:.6}", rat_to_f64(&main)),
                    format!("{:.6}", err.abs()),
                    bound.to_string(),
                ]);
            }
            Ok(table(*format, "q,exact,main_term,error,bound", rows))
        }
        SumsCmd::Totient { u, v, q, format } => {
            let cc = c_constant(*u, *v, 64)?;
            let mut rows = Vec::new();
            for &qq in q {
                let s = phi_progression_sum(*u, *v, qq)?;
                let main = cc.mid_f64() * (qq as f64) * (qq as f64);
                rows.push(vec![
                    qq.to_string(),
                    s.to_string(),
                    format!("{main:.3}"),
                    format!("{:.3}", s as f64 - main),
                    format!("{:.9}", cc.mid_f64()),
                ]);
            }
            Ok(table(*format, "Q,exact,main_term,error,constant", rows))
        }
        SumsCmd::Regcount { abrs, lo, hi, q, format } => {
            let c = constraint_of(abrs)?;
            let (lo, hi) = (parse_rational(lo)?, parse_rational(hi)?);
            let len = rat_to_f64(&(&hi - &lo));
            let mut rows = Vec::new();
            for &qq in q {
                let rc = regular_system_count(&c, &lo, &hi, qq)?;
                rows.push(vec![
                    qq.to_string(),
                    rc.count.to_string(),
                    rc.denominators.to_string(),
                    format!("{:.6}", rc.count as f64 / (len * (qq * qq) as f64)),
                ]);
            }
            Ok(table(*format, "Q,count,denominators,count_over_length_q2", rows))
        }
    }
}

fn phi_seq(s: &str) -> Outcome<PhiSeq> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Failure {
        code: 2,
        message: format!("parse error: expected coef,exp but got {s:?}"),
    };
    if parts.len() != 2 {
        return Err(bad());
    }
    Ok(PhiSeq {
        coef: parts[0].parse().map_err(|_| bad())?,
        exp: parts[1].parse().map_err(|_| bad())?,
    })
}

fn block_rule(s: &str) -> Outcome<BlockRule> {
    let bad = || Failure {
        code: 2,
        message: format!("parse error: expected fixed:i1,..,id or target:b but got {s:?}"),
    };
    if let Some(rest) = s.strip_prefix("fixed:") {
        let v: std::result::Result<Vec<u64>, _> = rest.split(',').map(|x| x.trim().parse()).collect();
        return Ok(BlockRule::Fixed(v.map_err(|_| bad())?));
    }
    if let Some(rest) = s.strip_prefix("target:") {
        return Ok(BlockRule::Targeting {
            b: rest.trim().parse().map_err(|_| bad())?,
        });
    }
    Err(bad())
}

fn metric(cmd: &MetricCmd) -> Outcome<Output> {
    match cmd {
        MetricCmd::Khintchine { abrs, psi, jmin, jmax, trial } => {
            if jmin > jmax || *jmax > 40 {
                return Err(Failure {
                    code: 2,
                    message: "precondition violated: need jmin <= jmax <= 40".into(),
                });
            }
            let blocks: Vec<(u64, u64)> = (*jmin..=*jmax).map(|j| (1u64 << j, 1u64 << (j + 1))).collect();
            trial_json(
                khintchine_trial(&constraint_of(abrs)?, &psi_of(psi)?, &blocks, trial.samples, trial.seed)?,
                trial.outcomes,
            )
        }
        MetricCmd::Uniform {
            abrs,
            psi,
            qgrid,
            q0,
            csv: as_csv,
            trial,
        } => {
            let rep = uniform_survival(&constraint_of(abrs)?, &psi_of(psi)?, trial.samples, qgrid, *q0, trial.seed)?;
            if *as_csv {
                let rows = rep
                    .fractions
                    .iter()
                    .map(|p| format!("{},{:.6},{:.6}", p.label.trim_start_matches("Q="), p.fraction, p.std_error))
                    .collect();
                return Ok(Output::Text(csv("Q,survival,std_error", rows)));
            }
            trial_json(rep, trial.outcomes)
        }
        MetricCmd::Bb {
            digit_cap,
            d,
            c,
            phi,
            rule,
            kmin,
            kmax,
            trial,
        } => {
            let spec = BBTrialSpec {
                digit_cap: *digit_cap,
                d: *d,
                c: *c,
                phi: phi_seq(phi)?,
                rule: block_rule(rule)?,
            };
            trial_json(borel_bernstein_trial(&spec, trial.samples, (*kmin, *kmax), trial.seed)?, trial.outcomes)
        }
    }
}

fn scene_of(a: &SceneArgs) -> Outcome<OrchardScene> {
    let model = if a.model == "asymptotic" {
        RadiusModel::Asymptotic
    } else if let Some(r) = a.model.strip_prefix("uniform:") {
        RadiusModel::Uniform(parse_rational(r)?)
    } else {
        return Err(Failure {
            code: 2,
            message: format!("parse error: model must be asymptotic or uniform:R, got {:?}", a.model),
        });
    };
    let mode = match a.mode {
        ModeArg::Euclid => DistanceMode::Euclidean,
        ModeArg::Vertical => DistanceMode::Vertical,
    };
    let mut scene = OrchardScene::new(constraint_of(&a.abrs)?, model, a.depth, parse_rational(&a.glade)?, mode)?;
    if let Some(t) = &a.sector {
        scene = scene.with_sector(parse_rational(t)?)?;
    }
    Ok(scene)
}

fn orchard(cmd: &OrchardCmd) -> Outcome<Output> {
    match cmd {
        OrchardCmd::View { scene, slope } => {
            let s = scene_of(scene)?;
            Ok(Output::Json(
                json!({ "scene": to_json(&s)?, "visibility": to_json(&visibility(&s, &xi_of(slope)?)?)? }),
            ))
        }
        OrchardCmd::Minradius { scene, slope } => {
            let s = scene_of(scene)?;
            Ok(Output::Json(
                json!({ "scene": to_json(&s)?, "min_blocking_radius": to_json(&min_blocking_radius(&s, &xi_of(slope)?)?)? }),
            ))
        }
        OrchardCmd::Polya { abrs, n, slopes, radius } => {
            if *slopes < 1 {
                return Err(Failure {
                    code: 2,
                    message: "precondition violated: need at least one slope".into(),
                });
            }
            let grid: Vec<RealSpec> = (1..=*slopes)
                .map(|k| RealSpec::rational(5 * (2 * k - slopes - 1), *slopes))
                .collect::<diophant::Result<_>>()?;
            let radius = radius.as_deref().map(parse_rational).transpose()?;
            Ok(Output::Json(to_json(&polya_baseline(&constraint_of(abrs)?, *n, &grid, radius)?)?))
        }
        OrchardCmd::Render { scene, slopes, svg } => {
            let doc = render(&scene_of(scene)?, slopes)?;
            match svg {
                Some(path) => {
                    fs::write(path, &doc)?;
                    Ok(Output::Json(json!({ "svg": path.display().to_string(), "bytes": doc.len() })))
                }
                None => Ok(Output::Text(doc)),
            }
        }
    }
}

fn accept(suite: &str) -> Outcome<(Output, bool)> {
    let reports = acceptance::run(suite)?;
    for r in &reports {
        eprintln!("{}", r.line());
    }
    let pass = reports.iter().all(|r| r.pass);
    Ok((Output::Json(json!({ "suite": suite, "pass": pass, "criteria": to_json(&reports)? })), pass))
}

fn dispatch(cli: &Cli) -> Outcome<(Output, bool)> {
    let plain = |o: Outcome<Output>| o.map(|x| (x, true));
    match &cli.command {
        Command::Hits(a) => plain(hits(a)),
        Command::Uniform(c) => plain(uniform(c)),
        Command::Threedist(a) => plain(threedist(a)),
        Command::Sums(c) => plain(sums(c)),
        Command::Metric(c) => plain(metric(c)),
        Command::Orchard(c) => plain(orchard(c)),
        Command::Accept { suite } => accept(suite),
    }
}

fn configure(cli: &Cli) -> Outcome<()> {
    let cap = match cli.precision_cap {
        Some(c) => Some(c),
        None => match std::env::var(CAP_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| Failure {
                code: 2,
                message: format!("{CAP_ENV} must be a positive integer, got {v:?}"),
            })?),
            Err(_) => None,
        },
    };
    if let Some(c) = cap {
        if c < 16 {
            return Err(Failure {
                code: 2,
                message: "precision cap must be at least 16 bits".into(),
            });
        }
        set_precision_cap(c);
    }
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| Failure {
            code: 2,
            message: e.to_string(),
        })?;
    }
    Ok(())
}

fn manifest() -> Value {
    json!({
        "program": "approx",
        "version": env!("CARGO_PKG_VERSION"),
        "argv": std::env::args().skip(1).collect::<Vec<_>>(),
        "precision_cap_bits": precision_cap(),
    })
}

fn emit(cli: &Cli, out: Output) -> Outcome<()> {
    let text = match out {
        Output::Json(result) => {
            let mut s = serde_json::to_string_pretty(&json!({ "manifest": manifest(), "result": result }))?;
            s.push('\n');
            s
        }
        Output::Text(t) => t,
    };
    match &cli.out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = configure(&cli)
        .and_then(|_| dispatch(&cli))
        .and_then(|(out, pass)| emit(&cli, out).map(|_| pass));
    match run {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
