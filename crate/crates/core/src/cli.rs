//! The `hyperpf` command line. Every subcommand parses flags, calls the
//! library and prints one JSON document.
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage or input error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::ensemble::{
    correlation, moments_needed, partition_from_table, partition_function, MomentSequence,
    NamedWeight, Route,
};
use crate::error::{Error, Result};
use crate::exterior::{omega, ModelShape, Multivector};
use crate::oracle::{
    closed_form_partition, direct_interaction, integrate_partition, integrate_r1, random_moments,
    random_rational, seeded_rng, Method,
};
use crate::scalar::{format_rational, parse_rational, Coeff, Scalar};
use crate::spine::{
    epsilon, higher_plucker_residual, plucker_residual, toeplitz_residual, Spine, StructureTable,
    ToeplitzOperator,
};
use crate::tau::{
    default_k_cut, extraction_evaluate, miwa_insertion, miwa_ratio, psi_minus, psi_plus, tau,
    LaurentPolynomial, WavePair,
};

/// Environment variable naming the structure-table cache directory.
pub const CACHE_ENV: &str = "HYPERPF_CACHE_DIR";

/// Absolute tolerance for float-mode verification.
pub const FLOAT_TOL: f64 = 1e-9;

/// Bound on numerators and denominators of random rational inputs.
const RANDOM_BOUND: i64 = 9;

#[derive(Parser, Debug)]
#[command(name = "hyperpf", version, about = "Exact hyperpfaffian and momentum-algebra toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Particle charge L (even).
    #[arg(long = "L", global = true)]
    pub l: Option<usize>,
    /// Particle count M.
    #[arg(long = "M", global = true)]
    pub m: Option<usize>,
    /// Named weight: `uniform:a,b` or `gaussian`.
    #[arg(long, global = true, conflicts_with = "moments")]
    pub weight: Option<String>,
    /// Moment-sequence JSON file.
    #[arg(long, global = true)]
    pub moments: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Truncation order of psi^+ (default max(2K, 1)).
    #[arg(long = "k-cut", global = true)]
    pub k_cut: Option<usize>,
    /// Monte Carlo samples or quadrature nodes per axis (0 = default).
    #[arg(long, global = true, default_value_t = 0)]
    pub budget: u64,
    /// Random trials for verification commands.
    #[arg(long, global = true, default_value_t = 20)]
    pub trials: usize,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Do not read or write cached structure tables.
    #[arg(long = "no-cache", global = true)]
    pub no_cache: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteArg {
    Hyperpfaffian,
    Structure,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Partition function Z.
    Partition {
        #[arg(long, value_enum, default_value_t = RouteArg::Hyperpfaffian)]
        route: RouteArg,
    },
    /// Structure-coefficient table C_P.
    Structure,
    /// Momentum mode epsilon_p.
    Epsilon {
        #[arg(long, allow_hyphen_values = true)]
        p: i64,
    },
    /// Correlation density R_m at the given points.
    Correlate {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        points: Vec<String>,
        /// Report only star(...)/Z, without the pointwise weights.
        #[arg(long)]
        weightless: bool,
    },
    /// tau_M of the moment sequence.
    Tau,
    /// Wave functions psi^- and psi^+; with --z also the Miwa-shift values.
    Psi {
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
    },
    /// star(omega(x_1) ∧ ... ∧ omega(x_M)) against the direct product.
    VerifyConfluent,
    /// r_n and the higher residuals for every n.
    VerifyPlucker,
    /// Toeplitz residuals for random band-3 operators.
    VerifyToeplitz,
    /// Extraction by adjunction against the structure-table expansion.
    VerifyAdjunction,
    /// Hirota residue on random moment pairs.
    VerifyHirota,
    /// Full product psi^- psi^+.
    TransportSpectrum {
        /// Weight of the primed background (default: same as --weight).
        #[arg(long, conflicts_with = "plus_moments")]
        plus_weight: Option<String>,
        #[arg(long)]
        plus_moments: Option<PathBuf>,
    },
    /// Closed-form, quadrature or Monte Carlo integration of Z, or of R_1 with --x.
    Oracle {
        #[arg(long, default_value = "closed_form")]
        method: String,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
    },
}

/// Exit code and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let result = match cli.config.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| execute(&cli.command, &cli.config)),
            Err(e) => Err(Error::Unsupported(e.to_string())),
        },
        None => execute(&cli.command, &cli.config),
    };
    match result {
        Ok((report, ok)) => {
            let mut text = serde_json::to_string_pretty(&report).expect("JSON values serialize");
            text.push('\n');
            if let Some(path) = &cli.config.output {
                if let Err(e) = std::fs::write(path, &text) {
                    return Outcome {
                        code: 2,
                        stdout: String::new(),
                        stderr: format!("error: cannot write {}: {e}\n", path.display()),
                    };
                }
            }
            Outcome {
                code: if ok { 0 } else { 1 },
                stdout: text,
                stderr: String::new(),
            }
        }
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// Cache directory from the environment, else `$HOME/.cache/hyperpf`.
pub fn default_cache_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os(CACHE_ENV) {
        return Some(PathBuf::from(dir));
    }
    std::env::var_os("HOME").map(|h| Path::new(&h).join(".cache").join("hyperpf"))
}

trait Emit: Coeff {
    fn emit(&self) -> Value;
}

impl Emit for BigRational {
    fn emit(&self) -> Value {
        Value::String(format_rational(self))
    }
}

impl Emit for f64 {
    fn emit(&self) -> Value {
        json!(self)
    }
}

fn mv_json<C: Emit>(a: &Multivector<C>) -> Value {
    Value::Object(a.iter().map(|(b, c)| (b.key(), c.emit())).collect())
}

fn laurent_json<C: Emit>(p: &LaurentPolynomial<C>) -> Value {
    Value::Object(p.terms().iter().map(|(e, c)| (e.to_string(), c.emit())).collect())
}

fn scalar_json<C: Emit>(key: &str, s: &Scalar<C>) -> Value {
    let mut out = Map::new();
    match &s.scale {
        Some(tag) if s.power != 0 && C::is_exact() => {
            out.insert(key.into(), s.value.emit());
            out.insert(
                "scale".into(),
                json!({"symbol": tag.symbol, "float": tag.value, "power": s.power}),
            );
        }
        _ => {
            out.insert(key.into(), if C::is_exact() { s.value.emit() } else { json!(s.to_f64()) });
        }
    }
    Value::Object(out)
}

fn negligible<C: Coeff>(c: &C) -> bool {
    if C::is_exact() {
        c.is_zero()
    } else {
        c.to_f64().abs() <= FLOAT_TOL
    }
}

fn close<C: Coeff>(a: &C, b: &C) -> bool {
    if C::is_exact() {
        a == b
    } else {
        let (a, b) = (a.to_f64(), b.to_f64());
        (a - b).abs() <= FLOAT_TOL * a.abs().max(b.abs()).max(1.0)
    }
}

fn convert<C: Coeff>(m: &MomentSequence) -> MomentSequence<C> {
    MomentSequence::with_scale(
        m.values().iter().map(C::from_rational).collect(),
        m.scale().cloned(),
    )
}

fn rational_list(v: &[BigRational]) -> Value {
    Value::Array(v.iter().map(|r| r.emit()).collect())
}

fn shape_of(config: &RunConfig) -> Result<ModelShape> {
    let l = config
        .l
        .ok_or_else(|| Error::Parse("missing --L".into()))?;
    let m = config
        .m
        .ok_or_else(|| Error::Parse("missing --M".into()))?;
    ModelShape::new(l, m)
}

fn shape_json(shape: &ModelShape) -> Value {
    json!({"L": shape.charge(), "M": shape.particles(), "K": shape.radius()})
}

fn load_moments(path: &Path) -> Result<MomentSequence> {
    let text = std::fs::read_to_string(path)?;
    MomentSequence::from_json(&serde_json::from_str(&text)?)
}

fn weight_of(config: &RunConfig) -> Result<NamedWeight> {
    match (&config.weight, &config.moments) {
        (Some(w), _) => NamedWeight::parse(w),
        (None, Some(path)) => Ok(NamedWeight::Explicit(load_moments(path)?)),
        (None, None) => Err(Error::Parse("supply --weight or --moments".into())),
    }
}

fn table_for(shape: &ModelShape, config: &RunConfig) -> Result<StructureTable> {
    let dir = if config.no_cache { None } else { default_cache_dir() };
    StructureTable::load_or_build(shape, dir.as_deref())
}

fn summary(command: &str, shape: &ModelShape, config: &RunConfig, checks: Vec<Value>) -> (Value, bool) {
    let failed = checks.iter().filter(|c| c["ok"] != json!(true)).count();
    let ok = failed == 0;
    (
        json!({
            "command": command,
            "shape": shape_json(shape),
            "mode": if config.mode == Mode::Exact { "exact" } else { "float" },
            "seed": config.seed,
            "checks": checks,
            "passed": ok,
            "failures": failed,
        }),
        ok,
    )
}

fn execute(command: &Command, config: &RunConfig) -> Result<(Value, bool)> {
    let exact = config.mode == Mode::Exact;
    match command {
        Command::Partition { route } => {
            let shape = shape_of(config)?;
            let moments = weight_of(config)?.moments(moments_needed(&shape))?;
            let route = *route;
            if exact {
                Ok((partition_cmd(&moments, &shape, route, config)?, true))
            } else {
                Ok((partition_cmd(&convert::<f64>(&moments), &shape, route, config)?, true))
            }
        }
        Command::Structure => {
            let shape = shape_of(config)?;
            Ok((table_for(&shape, config)?.to_json(), true))
        }
        Command::Epsilon { p } => {
            let shape = shape_of(config)?;
            let e: Multivector = epsilon(*p, &shape);
            Ok((json!({"p": p, "shape": shape_json(&shape), "epsilon": mv_json(&e)}), true))
        }
        Command::Correlate { points, weightless } => {
            let shape = shape_of(config)?;
            let weight = weight_of(config)?;
            let pts = points
                .iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<_>>>()?;
            Ok((correlate_cmd(&pts, &weight, &shape, *weightless, exact)?, true))
        }
        Command::Tau => {
            let shape = shape_of(config)?;
            let moments = weight_of(config)?.moments(moments_needed(&shape))?;
            let out = if exact {
                scalar_json("tau", &tau(&moments, &shape)?)
            } else {
                scalar_json("tau", &tau(&convert::<f64>(&moments), &shape)?)
            };
            Ok((out, true))
        }
        Command::Psi { z } => {
            let shape = shape_of(config)?;
            let weight = weight_of(config)?;
            let k_cut = config.k_cut.unwrap_or_else(|| default_k_cut(&shape));
            let z = z.as_deref().map(parse_rational).transpose()?;
            if exact {
                Ok((psi_cmd::<BigRational>(&weight, &shape, k_cut, z.as_ref())?, true))
            } else {
                Ok((psi_cmd::<f64>(&weight, &shape, k_cut, z.as_ref())?, true))
            }
        }
        Command::VerifyConfluent => {
            let shape = shape_of(config)?;
            let mut rng = seeded_rng(config.seed);
            let tuples: Vec<Vec<BigRational>> = (0..config.trials)
                .map(|_| {
                    (0..shape.particles())
                        .map(|_| random_rational(&mut rng, RANDOM_BOUND))
                        .collect()
                })
                .collect();
            let checks = if exact {
                confluent_checks::<BigRational>(&shape, &tuples)?
            } else {
                confluent_checks::<f64>(&shape, &tuples)?
            };
            Ok(summary("verify-confluent", &shape, config, checks))
        }
        Command::VerifyPlucker => {
            let shape = shape_of(config)?;
            let checks = if exact {
                plucker_checks::<BigRational>(&shape)?
            } else {
                plucker_checks::<f64>(&shape)?
            };
            Ok(summary("verify-plucker", &shape, config, checks))
        }
        Command::VerifyToeplitz => {
            let shape = shape_of(config)?;
            let mut rng = seeded_rng(config.seed);
            let bands: Vec<Vec<(i64, BigRational)>> = (0..config.trials)
                .map(|_| {
                    (-1..=1)
                        .map(|j| (j, random_rational(&mut rng, RANDOM_BOUND)))
                        .collect()
                })
                .collect();
            let checks = if exact {
                toeplitz_checks::<BigRational>(&shape, &bands)
            } else {
                toeplitz_checks::<f64>(&shape, &bands)
            };
            Ok(summary("verify-toeplitz", &shape, config, checks))
        }
        Command::VerifyAdjunction => {
            let shape = shape_of(config)?;
            let table = table_for(&shape, config)?;
            let mut rng = seeded_rng(config.seed);
            let seqs: Vec<MomentSequence> = (0..config.trials)
                .map(|_| random_moments(&mut rng, moments_needed(&shape), RANDOM_BOUND))
                .collect();
            let checks = if exact {
                adjunction_checks::<BigRational>(&shape, &table, &seqs)?
            } else {
                adjunction_checks::<f64>(&shape, &table, &seqs)?
            };
            Ok(summary("verify-adjunction", &shape, config, checks))
        }
        Command::VerifyHirota => {
            let shape = shape_of(config)?;
            let k_cut = config.k_cut.unwrap_or_else(|| default_k_cut(&shape));
            let mut rng = seeded_rng(config.seed);
            let plus_len = plus_moment_count(&shape, k_cut + 4);
            let pairs: Vec<(MomentSequence, MomentSequence)> = (0..config.trials)
                .map(|_| {
                    let a = random_moments(&mut rng, moments_needed(&shape), RANDOM_BOUND);
                    let b = random_moments(&mut rng, plus_len, RANDOM_BOUND);
                    (a, b)
                })
                .collect();
            let checks = if exact {
                hirota_checks::<BigRational>(&shape, k_cut, &pairs)?
            } else {
                hirota_checks::<f64>(&shape, k_cut, &pairs)?
            };
            Ok(summary("verify-hirota", &shape, config, checks))
        }
        Command::TransportSpectrum {
            plus_weight,
            plus_moments,
        } => {
            let shape = shape_of(config)?;
            let k_cut = config.k_cut.unwrap_or_else(|| default_k_cut(&shape));
            let weight = weight_of(config)?;
            let plus = match (plus_weight, plus_moments) {
                (Some(w), _) => NamedWeight::parse(w)?,
                (None, Some(p)) => NamedWeight::Explicit(load_moments(p)?),
                (None, None) => weight.clone(),
            };
            let t = weight.moments(moments_needed(&shape))?;
            let tp = plus.moments(plus_moment_count(&shape, k_cut))?;
            if exact {
                transport_cmd::<BigRational>(&shape, k_cut, &t, &tp)
            } else {
                transport_cmd::<f64>(&shape, k_cut, &t, &tp)
            }
        }
        Command::Oracle { method, x } => {
            let shape = shape_of(config)?;
            let weight = weight_of(config)?;
            let method: Method = method.parse()?;
            oracle_cmd(&weight, &shape, method, *x, config)
        }
    }
}

/// Moments `m_0..` needed by psi^+ at truncation `k_cut`.
fn plus_moment_count(shape: &ModelShape, k_cut: usize) -> usize {
    let kp = shape.beta() as usize * shape.particles() / 2;
    k_cut + 2 * kp + 1
}

fn partition_cmd<C: Emit>(
    moments: &MomentSequence<C>,
    shape: &ModelShape,
    route: RouteArg,
    config: &RunConfig,
) -> Result<Value> {
    let z = match route {
        RouteArg::Hyperpfaffian => partition_function(moments, shape, Route::Hyperpfaffian)?,
        RouteArg::Structure => {
            let table = table_for(shape, config)?;
            moments.scalar(partition_from_table(moments, &table)?, shape.particles() as i32)
        }
    };
    Ok(scalar_json("Z", &z))
}

fn correlate_cmd(
    points: &[BigRational],
    weight: &NamedWeight,
    shape: &ModelShape,
    weightless: bool,
    exact: bool,
) -> Result<Value> {
    let r = correlation(points, weight, shape, weightless)?;
    let mut out = Map::new();
    out.insert("points".into(), rational_list(points));
    if weightless {
        if exact {
            out.extend(
                scalar_json("weightless", &r.weightless)
                    .as_object()
                    .cloned()
                    .unwrap_or_default(),
            );
        } else {
            out.insert("weightless".into(), json!(r.weightless.to_f64()));
        }
        return Ok(Value::Object(out));
    }
    match (exact, r.exact()) {
        (true, Some(v)) => out.extend(scalar_json("R", &v).as_object().cloned().unwrap_or_default()),
        _ => {
            out.insert("R".into(), json!(r.to_f64().unwrap_or(f64::NAN)));
        }
    }
    Ok(Value::Object(out))
}

fn psi_cmd<C: Emit>(
    weight: &NamedWeight,
    shape: &ModelShape,
    k_cut: usize,
    z: Option<&BigRational>,
) -> Result<Value> {
    let beta = shape.beta() as usize;
    let t = convert::<C>(&weight.moments(moments_needed(shape) + beta)?);
    let tp = convert::<C>(&weight.moments(plus_moment_count(shape, k_cut))?);
    let minus = psi_minus(&t, shape)?;
    let plus = psi_plus(&tp, shape, k_cut)?;
    let mut out = json!({
        "shape": shape_json(shape),
        "k_cut": k_cut,
        "psi_minus": laurent_json(&minus),
        "psi_plus": laurent_json(&plus),
    });
    if let Some(z) = z {
        let zc = C::from_rational(z);
        out["z"] = z.emit();
        out["psi_minus_at_z"] = minus.eval(&zc)?.emit();
        out["shifted_lower_tau"] = miwa_insertion(&t, &zc, shape)?.emit();
        out["shifted_lower_tau_over_tau"] = miwa_ratio(&t, &zc, shape)?.emit();
    }
    Ok(out)
}

fn confluent_checks<C: Emit>(shape: &ModelShape, tuples: &[Vec<BigRational>]) -> Result<Vec<Value>> {
    tuples
        .iter()
        .map(|pts| {
            let xs: Vec<C> = pts.iter().map(C::from_rational).collect();
            let forms: Vec<Multivector<C>> = xs.iter().map(|x| omega(x, shape)).collect();
            let actual = Multivector::wedge_all(shape.dim(), &forms)?.star();
            let expected = direct_interaction(&xs, shape.charge() as u32);
            Ok(json!({
                "inputs": rational_list(pts),
                "expected": expected.emit(),
                "actual": actual.emit(),
                "ok": close(&actual, &expected),
            }))
        })
        .collect()
}

fn plucker_checks<C: Emit>(shape: &ModelShape) -> Result<Vec<Value>> {
    let spine = Spine::<C>::new(shape);
    let k = shape.radius();
    let mut checks = Vec::new();
    for n in -2 * k - 1..=2 * k + 1 {
        let r = plucker_residual(n, &spine);
        checks.push(json!({
            "name": "r_n",
            "inputs": {"n": n},
            "expected": {},
            "actual": mv_json(&r),
            "ok": r.iter().all(|(_, c)| negligible(c)),
        }));
    }
    for j in 2..=shape.particles() {
        let jk = j as i64 * k;
        for n in -jk - 1..=jk + 1 {
            let r = higher_plucker_residual(n, j, &spine)?;
            checks.push(json!({
                "name": "higher",
                "inputs": {"n": n, "j": j},
                "expected": {},
                "actual": mv_json(&r),
                "ok": r.iter().all(|(_, c)| negligible(c)),
            }));
        }
    }
    Ok(checks)
}

fn toeplitz_checks<C: Emit>(shape: &ModelShape, bands: &[Vec<(i64, BigRational)>]) -> Vec<Value> {
    let spine = Spine::<C>::new(shape);
    let k = shape.radius();
    bands
        .iter()
        .map(|band| {
            let op = ToeplitzOperator::new(band.iter().map(|(j, t)| (*j, C::from_rational(t))));
            let nonzero: Vec<i64> = (-2 * k - 2..=2 * k + 2)
                .filter(|&n| {
                    !toeplitz_residual(&op, n, &spine)
                        .iter()
                        .all(|(_, c)| negligible(c))
                })
                .collect();
            json!({
                "inputs": band.iter().map(|(j, t)| json!([j, t.emit()])).collect::<Vec<_>>(),
                "expected": "zero residual for every n",
                "actual": {"nonzero_n": nonzero},
                "ok": nonzero.is_empty(),
            })
        })
        .collect()
}

fn adjunction_checks<C: Emit>(
    shape: &ModelShape,
    table: &StructureTable,
    seqs: &[MomentSequence],
) -> Result<Vec<Value>> {
    let k = shape.radius();
    let mut checks = Vec::new();
    for seq in seqs {
        let m = convert::<C>(seq);
        for q in -k..=k {
            let actual = extraction_evaluate(q, &m, shape)?;
            let expected = table.insertion(q, |p| m.shifted(p, shape).unwrap().clone());
            checks.push(json!({
                "inputs": {"q": q, "moments": rational_list(seq.values())},
                "expected": expected.emit(),
                "actual": actual.emit(),
                "ok": close(&actual, &expected),
            }));
        }
    }
    Ok(checks)
}

fn hirota_checks<C: Emit>(
    shape: &ModelShape,
    k_cut: usize,
    pairs: &[(MomentSequence, MomentSequence)],
) -> Result<Vec<Value>> {
    let mut checks = Vec::new();
    for (a, b) in pairs {
        let (t, tp) = (convert::<C>(a), convert::<C>(b));
        let base = WavePair::build(&t, &tp, shape, k_cut)?.residue();
        let wide = WavePair::build(&t, &tp, shape, k_cut + 4)?.residue();
        checks.push(json!({
            "name": "residue",
            "inputs": {
                "moments": rational_list(a.values()),
                "moments_plus": rational_list(b.values()),
                "k_cut": k_cut,
            },
            "expected": C::zero().emit(),
            "actual": base.emit(),
            "ok": negligible(&base),
        }));
        checks.push(json!({
            "name": "truncation",
            "inputs": {"k_cut": [k_cut, k_cut + 4]},
            "expected": base.emit(),
            "actual": wide.emit(),
            "ok": close(&base, &wide),
        }));
    }
    Ok(checks)
}

fn transport_cmd<C: Emit>(
    shape: &ModelShape,
    k_cut: usize,
    t: &MomentSequence,
    tp: &MomentSequence,
) -> Result<(Value, bool)> {
    let pair = WavePair::build(&convert::<C>(t), &convert::<C>(tp), shape, k_cut)?;
    let spectrum = pair.product();
    let z0 = spectrum.coeff(0);
    let ok = negligible(&z0);
    Ok((
        json!({
            "shape": shape_json(shape),
            "k_cut": k_cut,
            "spectrum": laurent_json(&spectrum),
            "z0": z0.emit(),
            "z0_vanishes": ok,
        }),
        ok,
    ))
}

fn oracle_cmd(
    weight: &NamedWeight,
    shape: &ModelShape,
    method: Method,
    x: Option<f64>,
    config: &RunConfig,
) -> Result<(Value, bool)> {
    let seed = config.seed;
    match x {
        None => {
            let report = integrate_partition(weight, shape, method, config.budget, seed)?;
            let exact = closed_form_partition(weight, shape)?;
            let mut out = serde_json::to_value(&report)?;
            out["shape"] = shape_json(shape);
            out["weight"] = json!(weight.label());
            out["exact"] = scalar_json("Z", &exact)["Z"].clone();
            out["exact_float"] = json!(exact.to_f64());
            Ok((out, true))
        }
        Some(x) => {
            let report = integrate_r1(weight, shape, x, method, config.budget, seed)?;
            let mut out = serde_json::to_value(&report)?;
            out["shape"] = shape_json(shape);
            out["weight"] = json!(weight.label());
            out["x"] = json!(x);
            Ok((out, true))
        }
    }
}
