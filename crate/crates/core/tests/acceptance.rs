//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --release -p hyperpf --test acceptance`. Exits
//! non-zero if any criterion fails. A JSON report with diagnostics goes
//! to `acceptance-report.json` in the cargo target tmp directory.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use hyperpf::cli::run;
use hyperpf::ensemble::{
    correlation, insertion_amplitudes, moments_needed, partition_from_table,
    partition_function, r1_moment_integral, MomentSequence, NamedWeight, Route,
};
use hyperpf::exterior::{hyperpfaffian, omega, pfaffian_classical, two_form, ModelShape, Multivector};
use hyperpf::oracle::{
    closed_form_partition, direct_interaction, integrate_partition, random_moments, random_rational,
    seeded_rng, Method,
};
use hyperpf::scalar::{binomial, format_rational, int, pow, ratio};
use hyperpf::spine::{
    plucker_residual, power_sums, toeplitz_residual, Spine, StructureTable, ToeplitzOperator,
};
use hyperpf::tau::{
    default_k_cut, extraction_evaluate, miwa_insertion, miwa_ratio, psi_minus, LaurentPolynomial,
    WavePair,
};

type Q = BigRational;

const SEED: u64 = 0x5EED_2024;
const BOUND: i64 = 9;

const CONFLUENT_SHAPES: [(usize, usize); 6] = [(2, 2), (2, 3), (2, 4), (2, 5), (4, 2), (4, 3)];
const PLUCKER_SHAPES: [(usize, usize); 3] = [(2, 2), (2, 3), (4, 2)];

/// Criterion tolerances.
const CONFLUENT_TIME_LIMIT: Duration = Duration::from_secs(60);
const GAUSSIAN_FLOAT: f64 = 4.71238898038469;
const GAUSSIAN_FLOAT_TOL: f64 = 1e-12;
const MC_SAMPLES: u64 = 10_000_000;
const MC_SIGMAS: f64 = 3.0;
const MC_REL: f64 = 0.01;
const MC_TIME_LIMIT: Duration = Duration::from_secs(300);

struct Outcome {
    pass: bool,
    summary: String,
    diagnostics: Vec<String>,
    report: Value,
}

fn shape(l: usize, m: usize) -> ModelShape {
    ModelShape::new(l, m).unwrap()
}

fn s(q: &Q) -> String {
    format_rational(q)
}

fn c1_confluent() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded_rng(SEED);
    let mut total = 0;
    let mut bad = Vec::new();
    for (l, m) in CONFLUENT_SHAPES {
        let sh = shape(l, m);
        for _ in 0..100 {
            let xs: Vec<Q> = (0..m).map(|_| random_rational(&mut rng, BOUND)).collect();
            let forms: Vec<Multivector> = xs.iter().map(|x| omega(x, &sh)).collect();
            let lhs = Multivector::wedge_all(sh.dim(), &forms).unwrap().star();
            let rhs = direct_interaction(&xs, l as u32);
            total += 1;
            if lhs != rhs {
                bad.push(format!("{sh} at {:?}", xs.iter().map(s).collect::<Vec<_>>()));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = bad.is_empty() && elapsed <= CONFLUENT_TIME_LIMIT;
    Outcome {
        pass,
        summary: format!(
            "{}/{} tuples exact, {:.2}s (limit {}s)",
            total - bad.len(),
            total,
            elapsed.as_secs_f64(),
            CONFLUENT_TIME_LIMIT.as_secs()
        ),
        diagnostics: bad.iter().take(3).cloned().collect(),
        report: json!({"mismatches": bad, "seconds": elapsed.as_secs_f64()}),
    }
}

fn c2_partition_values() -> Outcome {
    let sh = shape(2, 2);
    let uni = NamedWeight::unit_interval().moments(5).unwrap();
    let gau = NamedWeight::Gaussian.moments(5).unwrap();
    let zu = partition_function(&uni, &sh, Route::Hyperpfaffian).unwrap();
    let zg = partition_function(&gau, &sh, Route::Hyperpfaffian).unwrap();
    let zf = partition_function(&gau.to_float(), &sh, Route::Hyperpfaffian).unwrap().value;
    // closed forms are an independent route (Selberg / Mehta)
    let cu = closed_form_partition(&NamedWeight::unit_interval(), &sh).unwrap();
    let cg = closed_form_partition(&NamedWeight::Gaussian, &sh).unwrap();
    let uniform_ok = zu.value == ratio(1, 30) && zu.scale.is_none() && zu == cu;
    let gauss_ok = zg.value == ratio(3, 2)
        && zg.power == 2
        && zg.scale.as_ref().is_some_and(|t| t.symbol == "sqrt_pi")
        && zg == cg;
    let float_ok = (zf - GAUSSIAN_FLOAT).abs() <= GAUSSIAN_FLOAT_TOL;
    Outcome {
        pass: uniform_ok && gauss_ok && float_ok,
        summary: format!(
            "uniform Z = {zu} ({}), gaussian Z = {zg} ({}), float {zf:.15} ({})",
            ok(uniform_ok),
            ok(gauss_ok),
            ok(float_ok)
        ),
        diagnostics: vec![],
        report: json!({"uniform": zu.to_string(), "gaussian": zg.to_string(), "float": zf}),
    }
}

fn c3_route_equality() -> Outcome {
    let mut rng = seeded_rng(SEED + 3);
    let mut total = 0;
    let mut bad = Vec::new();
    for (l, m) in CONFLUENT_SHAPES {
        let sh = shape(l, m);
        let table = StructureTable::build(&sh).unwrap();
        for _ in 0..100 {
            let moms = random_moments(&mut rng, moments_needed(&sh), BOUND);
            let a = partition_function(&moms, &sh, Route::Hyperpfaffian).unwrap().value;
            let b = partition_from_table(&moms, &table).unwrap();
            total += 1;
            if a != b {
                bad.push(format!("{sh}: {} vs {}", s(&a), s(&b)));
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        summary: format!("{}/{} moment sequences agree exactly", total - bad.len(), total),
        diagnostics: bad.iter().take(3).cloned().collect(),
        report: json!({"mismatches": bad}),
    }
}

fn c4_pfaffian() -> Outcome {
    let mut rng = seeded_rng(SEED + 4);
    let mut total = 0;
    let mut bad = Vec::new();
    for n in [4usize, 6, 8, 10] {
        let sh = shape(2, n / 2);
        for _ in 0..100 {
            let mut a = vec![vec![Q::zero(); n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    let v = random_rational(&mut rng, BOUND);
                    a[j][i] = -v.clone();
                    a[i][j] = v;
                }
            }
            let hp = hyperpfaffian(&two_form(&a).unwrap(), &sh).unwrap();
            let pf = pfaffian_classical(&a).unwrap();
            total += 1;
            if hp != pf {
                bad.push(format!("N={n}: {} vs {}", s(&hp), s(&pf)));
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        summary: format!("{}/{} antisymmetric arrays agree exactly", total - bad.len(), total),
        diagnostics: bad.iter().take(3).cloned().collect(),
        report: json!({"mismatches": bad}),
    }
}

fn c5_plucker() -> Outcome {
    let mut rng = seeded_rng(SEED + 5);
    let mut checked = 0;
    let mut bad = Vec::new();
    for (l, m) in PLUCKER_SHAPES {
        let sh = shape(l, m);
        let spine = Spine::<Q>::new(&sh);
        let k = sh.radius();
        for n in -2 * k - 1..=2 * k + 1 {
            checked += 1;
            if !plucker_residual(n, &spine).is_zero() {
                bad.push(format!("{sh} r_{n}"));
            }
        }
        for j in 2..=m {
            // every momentum component of the ordered j-fold sum
            for (n, r) in power_sums(j, &spine) {
                checked += 1;
                if !r.is_zero() {
                    bad.push(format!("{sh} j={j} n={n}"));
                }
            }
        }
        for _ in 0..20 {
            let op = ToeplitzOperator::new((-1..=1).map(|j| (j, random_rational(&mut rng, BOUND))));
            for n in -2 * k - 2..=2 * k + 2 {
                checked += 1;
                if !toeplitz_residual(&op, n, &spine).is_zero() {
                    bad.push(format!("{sh} Toeplitz n={n}"));
                }
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        summary: format!("{} residuals checked, {} nonzero", checked, bad.len()),
        diagnostics: bad.iter().take(3).cloned().collect(),
        report: json!({"nonzero": bad}),
    }
}

fn c6_adjunction() -> Outcome {
    let mut rng = seeded_rng(SEED + 6);
    let mut total = 0;
    let mut bad = Vec::new();
    for (l, m) in PLUCKER_SHAPES {
        let sh = shape(l, m);
        let table = StructureTable::build(&sh).unwrap();
        let k = sh.radius();
        for _ in 0..20 {
            let moms = random_moments(&mut rng, moments_needed(&sh), BOUND);
            for q in -k..=k {
                let a = extraction_evaluate(q, &moms, &sh).unwrap();
                let b = table.insertion(q, |p| moms.shifted(p, &sh).unwrap().clone());
                total += 1;
                if a != b {
                    bad.push(format!("{sh} q={q}: {} vs {}", s(&a), s(&b)));
                }
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        summary: format!("{}/{} extractions agree exactly", total - bad.len(), total),
        diagnostics: bad.iter().take(3).cloned().collect(),
        report: json!({"mismatches": bad}),
    }
}

fn c7_negative_miwa() -> Outcome {
    let mut rng = seeded_rng(SEED + 7);
    let worked = psi_minus(&NamedWeight::unit_interval().moments(5).unwrap(), &shape(2, 2)).unwrap();
    let expect = LaurentPolynomial::from_terms([
        (0, ratio(1, 5)),
        (1, int(-1)),
        (2, int(2)),
        (3, int(-2)),
        (4, int(1)),
    ]);
    let worked_ok = worked == expect;
    let mut total = 0;
    let mut stated = 0;
    let mut corrected = 0;
    let mut samples = Vec::new();
    for (l, m) in PLUCKER_SHAPES {
        let sh = shape(l, m);
        let moms = NamedWeight::unit_interval()
            .moments(moments_needed(&sh) + sh.beta() as usize)
            .unwrap();
        let psi = psi_minus(&moms, &sh).unwrap();
        let mut zs = 0;
        while zs < 10 {
            let z = random_rational(&mut rng, BOUND);
            if z.is_zero() {
                continue;
            }
            zs += 1;
            let lhs = psi.eval(&z).unwrap();
            let ratio_side = miwa_ratio(&moms, &z, &sh).unwrap();
            let insertion = miwa_insertion(&moms, &z, &sh).unwrap();
            total += 1;
            stated += usize::from(lhs == ratio_side);
            corrected += usize::from(lhs == insertion);
            if samples.len() < 3 {
                samples.push(format!(
                    "{sh} z={}: psi^-(z) = {}, z^2K tau_(M-1)(shifted)/tau_M = {}",
                    s(&z),
                    s(&lhs),
                    s(&ratio_side)
                ));
            }
        }
    }
    let z3 = miwa_ratio(&NamedWeight::unit_interval().moments(9).unwrap(), &int(3), &shape(2, 2))
        .unwrap();
    let mut diagnostics = samples.clone();
    diagnostics.push(format!(
        "worked case at z=3: psi^-(3) = {}, stated right side = {}",
        s(&worked.eval(&int(3)).unwrap()),
        s(&z3)
    ));
    diagnostics.push(format!(
        "without the 1/tau_M factor: psi^-(z) = z^2K tau_(M-1)(shifted) holds at {corrected}/{total}"
    ));
    Outcome {
        pass: worked_ok && stated == total,
        summary: format!(
            "worked polynomial {}; stated identity exact at {stated}/{total} points",
            ok(worked_ok)
        ),
        diagnostics,
        report: json!({
            "worked_case": worked_ok,
            "stated_identity_matches": stated,
            "corrected_identity_matches": corrected,
            "points": total,
            "samples": samples,
        }),
    }
}

/// `psi^+` with the opposite index orientation, `m̂'_{k-p}` in place of
/// `m̂'_{k+p}`; reported as a diagnostic only.
fn psi_plus_reversed(moments_plus: &MomentSequence, sh: &ModelShape, k_cut: usize) -> LaurentPolynomial {
    let up = sh.with_particles(sh.particles() + 1).unwrap();
    let kp = up.radius();
    let amps = insertion_amplitudes(moments_plus, &up).unwrap();
    let beta = sh.beta() as u64;
    LaurentPolynomial::from_terms((1..=k_cut as i64).map(|k| {
        let mut acc = Q::zero();
        for (i, a) in amps.iter().enumerate() {
            let p = i as i64 - kp;
            if let Ok(m) = moments_plus.get(k - p + kp) {
                acc += a * m;
            }
        }
        let c = Q::from_integer(binomial(beta + k as u64 - 1, k as u64));
        (-k, c * acc)
    }))
}

fn c8_hirota() -> Outcome {
    let mut rng = seeded_rng(SEED + 8);
    let mut total = 0;
    let mut zeros = 0;
    let mut stable = 0;
    let mut reversed_zeros = 0;
    let mut samples = Vec::new();
    let mut spectra = Vec::new();
    for (l, m) in PLUCKER_SHAPES {
        let sh = shape(l, m);
        let k_cut = default_k_cut(&sh);
        let kp = sh.with_particles(m + 1).unwrap().radius() as usize;
        for trial in 0..50 {
            let t = random_moments(&mut rng, moments_needed(&sh), BOUND);
            let tp = random_moments(&mut rng, k_cut + 4 + 2 * kp + 1, BOUND);
            let base = WavePair::build(&t, &tp, &sh, k_cut).unwrap();
            let wide = WavePair::build(&t, &tp, &sh, k_cut + 4).unwrap();
            let r = base.residue();
            total += 1;
            zeros += usize::from(r.is_zero());
            stable += usize::from(r == wide.residue());
            let rev = psi_plus_reversed(&tp, &sh, k_cut);
            let rev_res = base.psi_minus.mul(&rev).coeff(0);
            reversed_zeros += usize::from(rev_res.is_zero());
            if trial == 0 {
                samples.push(format!("{sh}: residue {}", s(&r)));
                let spectrum = base.product();
                let off: Value = spectrum
                    .terms()
                    .iter()
                    .filter(|(e, _)| **e != 0)
                    .map(|(e, c)| (e.to_string(), Value::String(s(c))))
                    .collect::<serde_json::Map<_, _>>()
                    .into();
                spectra.push(json!({"shape": sh.to_string(), "k_cut": k_cut, "non_z0": off}));
            }
        }
    }
    let mut diagnostics = samples.clone();
    diagnostics.push(format!("truncation stable (k_cut 2K vs 2K+4) in {stable}/{total} pairs"));
    diagnostics.push(format!(
        "reversed index orientation: residue zero in {reversed_zeros}/{total} pairs"
    ));
    diagnostics.push(format!(
        "transport spectra (non-z^0 coefficients) for {} shapes written to the report",
        spectra.len()
    ));
    Outcome {
        pass: zeros == total && stable == total,
        summary: format!("residue exactly zero in {zeros}/{total} pairs; truncation stable {stable}/{total}"),
        diagnostics,
        report: json!({
            "pairs": total,
            "zero_residues": zeros,
            "truncation_stable": stable,
            "reversed_orientation_zero_residues": reversed_zeros,
            "samples": samples,
            "transport_spectra": spectra,
        }),
    }
}

fn c9_normalization() -> Outcome {
    let mut rng = seeded_rng(SEED + 9);
    let mut total = 0;
    let mut bad = Vec::new();
    for (l, m) in PLUCKER_SHAPES {
        let sh = shape(l, m);
        let mut seqs = vec![
            NamedWeight::unit_interval().moments(moments_needed(&sh)).unwrap(),
            NamedWeight::Gaussian.moments(moments_needed(&sh)).unwrap(),
        ];
        while seqs.len() < 7 {
            let moms = random_moments(&mut rng, moments_needed(&sh), BOUND);
            if !partition_function(&moms, &sh, Route::Hyperpfaffian).unwrap().value.is_zero() {
                seqs.push(moms);
            }
        }
        for moms in seqs {
            let v = r1_moment_integral(&moms, &sh).unwrap();
            total += 1;
            if v != int(m as i64) {
                bad.push(format!("{sh}: {}", s(&v)));
            }
        }
    }
    let r = correlation(&[ratio(1, 2)], &NamedWeight::unit_interval(), &shape(2, 2), false)
        .unwrap()
        .exact()
        .unwrap();
    // independent: R_1(x) = 2/(1! Z) * ∫_0^1 (x - y)^4 dy with Z = 1/30
    let direct = int(60) * (pow(&ratio(1, 2), 5) * int(2) / int(5)) / int(2);
    let r_ok = r.value == ratio(3, 8) && r.value == direct;
    Outcome {
        pass: bad.is_empty() && r_ok,
        summary: format!(
            "∫R_1 = M exactly for {}/{} sequences; R_1(1/2) = {} ({})",
            total - bad.len(),
            total,
            r,
            ok(r_ok)
        ),
        diagnostics: bad.iter().take(3).cloned().collect(),
        report: json!({"mismatches": bad, "r1_half": r.to_string()}),
    }
}

fn c10_monte_carlo() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut all = true;
    let mut reports = Vec::new();
    for weight in [NamedWeight::unit_interval(), NamedWeight::Gaussian] {
        for m in [2, 3] {
            let sh = shape(2, m);
            let exact = closed_form_partition(&weight, &sh).unwrap().to_f64();
            let rep = integrate_partition(&weight, &sh, Method::MonteCarlo, MC_SAMPLES, SEED).unwrap();
            let sig = rep.brackets(exact, MC_SIGMAS);
            let rel = (rep.estimate - exact).abs() / exact.abs();
            let pass = sig && rel <= MC_REL;
            all &= pass;
            lines.push(format!(
                "{} {sh}: {:.6e} ± {:.2e} vs {:.6e} (rel {:.2e}) {}",
                weight.label(),
                rep.estimate,
                rep.std_error,
                exact,
                rel,
                ok(pass)
            ));
            reports.push(serde_json::to_value(&rep).unwrap());
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: all && elapsed <= MC_TIME_LIMIT,
        summary: format!(
            "4 estimates at {MC_SAMPLES} samples, {:.1}s (limit {}s)",
            elapsed.as_secs_f64(),
            MC_TIME_LIMIT.as_secs()
        ),
        diagnostics: lines,
        report: json!({"reports": reports, "seconds": elapsed.as_secs_f64()}),
    }
}

fn c11_determinism() -> Outcome {
    let commands: [&[&str]; 7] = [
        &["verify-confluent", "--L", "2", "--M", "3", "--trials", "10"],
        &["verify-plucker", "--L", "2", "--M", "3"],
        &["verify-toeplitz", "--L", "2", "--M", "2", "--trials", "5"],
        &["verify-adjunction", "--L", "2", "--M", "3", "--trials", "5", "--no-cache"],
        &["verify-hirota", "--L", "2", "--M", "2", "--trials", "10"],
        &["transport-spectrum", "--L", "2", "--M", "2", "--weight", "uniform:0,1"],
        &[
            "oracle", "--L", "2", "--M", "2", "--weight", "gaussian", "--method", "monte_carlo",
            "--budget", "200000",
        ],
    ];
    let mut bad = Vec::new();
    for cmd in commands {
        let mut outputs = Vec::new();
        for threads in ["1", "4", "8", "4"] {
            let mut argv = vec!["hyperpf"];
            argv.extend_from_slice(cmd);
            argv.extend_from_slice(&["--seed", "7", "--threads", threads]);
            let out = run(argv);
            outputs.push((out.code, out.stdout));
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) || outputs[0].1.is_empty() {
            bad.push(cmd[0].to_string());
        }
    }
    Outcome {
        pass: bad.is_empty(),
        summary: format!(
            "{}/{} subcommands byte-identical across threads 1, 4, 8 and a repeat",
            commands.len() - bad.len(),
            commands.len()
        ),
        diagnostics: bad.clone(),
        report: json!({"differing": bad}),
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "MISMATCH"
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("confluent Vandermonde identity", c1_confluent),
        ("partition values", c2_partition_values),
        ("route equality", c3_route_equality),
        ("Pfaffian cross-check", c4_pfaffian),
        ("Plücker suites", c5_plucker),
        ("adjunction", c6_adjunction),
        ("negative-Miwa lemma", c7_negative_miwa),
        ("Hirota identity", c8_hirota),
        ("normalization", c9_normalization),
        ("Monte-Carlo oracle", c10_monte_carlo),
        ("determinism", c11_determinism),
    ];
    let mut failures = 0;
    let mut report = serde_json::Map::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let out = f();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        failures += usize::from(!out.pass);
        println!("[{tag}] {:>2}. {name}: {}", i + 1, out.summary);
        for d in &out.diagnostics {
            println!("         {d}");
        }
        report.insert(
            format!("{:02}", i + 1),
            json!({"name": name, "pass": out.pass, "summary": out.summary, "details": out.report}),
        );
    }
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance-report.json");
    let text = serde_json::to_string_pretty(&Value::Object(report)).unwrap();
    if std::fs::write(&path, text).is_ok() {
        println!("report: {}", path.display());
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
