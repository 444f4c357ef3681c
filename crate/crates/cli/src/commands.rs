use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sparsekl::certify::{estimate_kl_exponent, sample_neighborhood, KlSample, SamplingConfig, MAX_EXPONENT, MIN_CONSTANT};
use sparsekl::oracle::{
    agrees, global_min_enum, prox_bruteforce, prox_objective, subdiff_distance_bruteforce, PROX_LIMIT,
    SUBDIFF_LIMIT,
};
use sparsekl::solver::{
    fit_linear_rate, prox_theta_h, proximal_gradient, random_feasible_point, stable_from, RateOutcome,
    SolverConfig, StepRule,
};
use sparsekl::sphere_quadratic::crit_points_general;
use sparsekl::subdiff::{check_critical, objective, subdiff_distance};
use sparsekl::{sym_eig, Error, HKind, ProblemSpec, SupportSet, ThetaKind};

use crate::problem::{load, parse_vector, ProblemFile};
use crate::Failure;

pub const TRACE_HEADER: [&str; 5] = ["k", "theta", "gap", "support_size", "step_norm"];
pub const SAMPLES_HEADER: [&str; 5] = ["radius", "gap", "dist", "ratio", "same_support"];
/// Criticality tolerance used when annotating points.
const CRITICAL_TOL: f64 = 1e-9;
/// Largest dimension for which `solve` asks the oracle for `θ*`.
const SOLVE_ORACLE_LIMIT: usize = 10;
const ENUMERATE_LIMIT: usize = 12;

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_support(s: &SupportSet) -> String {
    let parts: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

pub struct SolveArgs {
    pub file: PathBuf,
    pub max_iters: usize,
    pub step: StepRule,
    pub tol: f64,
    pub seed: u64,
    pub trace_out: Option<PathBuf>,
}

pub fn solve(args: &SolveArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let loaded = load(&args.file)?;
    let spec = &loaded.spec;
    let config = SolverConfig { max_iters: args.max_iters, step: args.step, tol: args.tol, seed: args.seed };
    let x0 = loaded.x0.clone().unwrap_or_else(|| random_feasible_point(spec, args.seed));
    let trace = proximal_gradient(spec, &x0, &config)?;
    let best = trace.values().into_iter().fold(f64::INFINITY, f64::min);
    let theta_star = if spec.dim() <= SOLVE_ORACLE_LIMIT {
        match global_min_enum(spec) {
            Ok(r) => r.value,
            Err(Error::Unbounded(_)) => best,
            Err(e) => return Err(e.into()),
        }
    } else {
        best
    };
    let last = trace.last();
    let residual = subdiff_distance(spec, &last.x)?.distance;
    writeln!(out, "Theta = {}", last.value)?;
    writeln!(out, "x = {}", fmt_vec(&last.x))?;
    writeln!(out, "support = {}", fmt_support(&last.support))?;
    writeln!(out, "iterations = {}", last.k)?;
    writeln!(out, "residual = {residual}")?;
    writeln!(out, "theta_star = {theta_star}")?;
    if let Some(path) = &args.trace_out {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(TRACE_HEADER)?;
        for e in &trace.entries {
            w.write_record([
                e.k.to_string(),
                e.value.to_string(),
                (e.value - theta_star).to_string(),
                e.support.len().to_string(),
                e.step_norm.to_string(),
            ])?;
        }
        w.flush()?;
    }
    Ok(())
}

pub struct CertifyArgs {
    pub file: PathBuf,
    pub delta: f64,
    pub eta: f64,
    pub n: usize,
    pub seed: u64,
    pub samples_out: Option<PathBuf>,
}

fn write_samples(path: &Path, samples: &[KlSample]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SAMPLES_HEADER)?;
    for s in samples {
        w.write_record([
            s.radius.to_string(),
            s.gap.to_string(),
            s.dist.to_string(),
            s.ratio().to_string(),
            s.same_support.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn certify(args: &CertifyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let loaded = load(&args.file)?;
    let xbar = loaded.xbar.ok_or_else(|| Failure::new(2, "problem file has no \"xbar\""))?;
    let cfg = SamplingConfig { delta: args.delta, eta: args.eta, n: args.n, seed: args.seed };
    let samples = match sample_neighborhood(&loaded.spec, &xbar, &cfg) {
        Err(Error::NotCritical { residual }) => {
            return Err(Failure::new(4, format!("xbar is not critical: residual = {residual}")));
        }
        Err(Error::NotInDomain(m)) => return Err(Failure::new(4, format!("xbar is not in dom Θ: {m}"))),
        other => other?,
    };
    if let Some(path) = &args.samples_out {
        write_samples(path, &samples)?;
    }
    writeln!(out, "samples = {}", samples.len())?;
    if samples.is_empty() {
        writeln!(out, "verdict = VACUOUS (no point of the window has a positive gap)")?;
        return Ok(());
    }
    match estimate_kl_exponent(&samples, &cfg) {
        Ok(est) => {
            let holds = est.constant_hat >= MIN_CONSTANT && est.exponent_fit <= MAX_EXPONENT;
            writeln!(out, "c_hat = {}", est.constant_hat)?;
            writeln!(out, "alpha_hat = {}", est.exponent_fit)?;
            let verdict = if holds { "HOLDS (empirical)" } else { "FAILS (empirical)" };
            writeln!(out, "verdict = {verdict}")?;
        }
        Err(Error::Estimation { reason, partial }) => {
            if let Some(c) = partial {
                writeln!(out, "c_hat = {c}")?;
            }
            writeln!(out, "verdict = INSUFFICIENT ({reason})")?;
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

pub fn critical(file: &Path, enumerate: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let loaded = load(file)?;
    let spec = &loaded.spec;
    if spec.theta() != ThetaKind::Sphere {
        return Err(Failure::new(
            5,
            format!("critical-point enumeration supports theta = sphere only, got {}", spec.theta().name()),
        ));
    }
    let set = crit_points_general(spec.a());
    for f in &set.families {
        if f.basis.len() > 1 {
            writeln!(
                out,
                "family eigenvalue = {} dim = {}: every unit vector of this eigenspace is critical",
                f.eigenvalue,
                f.basis.len()
            )?;
        } else {
            writeln!(out, "family eigenvalue = {} dim = 1", f.eigenvalue)?;
        }
    }
    for z in &set.representatives {
        writeln!(out, "representative {} {}", fmt_vec(z), annotate(spec, z)?)?;
    }
    if enumerate {
        let p = spec.dim();
        if p > ENUMERATE_LIMIT {
            return Err(Error::Size { operation: "critical --enumerate", size: p, limit: ENUMERATE_LIMIT }.into());
        }
        let max_size = match spec.h() {
            HKind::ZeroNorm { .. } => p,
            HKind::SparsityBall { kappa } => kappa,
        };
        for mask in 1u64..(1 << p) {
            let idx: Vec<usize> = (0..p).filter(|i| mask >> i & 1 == 1).collect();
            if idx.len() > max_size {
                continue;
            }
            let support = SupportSet::new(idx, p)?;
            let eig = sym_eig(&spec.a().submatrix(support.indices()));
            for k in 0..support.len() {
                let x = support.scatter(&eig.eigenvector(k));
                if SupportSet::of(&x) != support || !check_critical(spec, &x, CRITICAL_TOL)? {
                    continue;
                }
                writeln!(out, "sparse {} support = {} Theta = {}", fmt_vec(&x), fmt_support(&support), objective(spec, &x))?;
            }
        }
    }
    Ok(())
}

fn annotate(spec: &ProblemSpec, z: &[f64]) -> Result<String, Failure> {
    if !spec.in_domain(z) {
        return Ok("outside dom h".to_string());
    }
    let d = subdiff_distance(spec, z)?.distance;
    let tag = if d <= CRITICAL_TOL { "critical for Theta" } else { "not critical for Theta" };
    Ok(format!("{tag} (dist = {d})"))
}

pub fn prox(file: &Path, u: &str, t: f64, out: &mut dyn Write) -> Result<(), Failure> {
    let loaded = load(file)?;
    let u = parse_vector(u)?;
    if u.len() != loaded.spec.dim() {
        return Err(Failure::new(2, format!("--u has {} entries, expected {}", u.len(), loaded.spec.dim())));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Failure::new(2, format!("--t = {t} must be positive")));
    }
    let x = prox_theta_h(loaded.spec.theta(), loaded.spec.h(), &u, t)?;
    writeln!(out, "x = {}", fmt_vec(&x))?;
    Ok(())
}

/// Random point of `dom Θ` with a random support size.
fn random_point(spec: &ProblemSpec, rng: &mut ChaCha8Rng) -> Result<Vec<f64>, Failure> {
    let cap = match spec.h() {
        HKind::ZeroNorm { .. } => spec.dim(),
        HKind::SparsityBall { kappa } => kappa,
    };
    let k = rng.random_range(1..=cap);
    let sparse = ProblemSpec::new(spec.a().clone(), spec.theta(), HKind::SparsityBall { kappa: k })?;
    Ok(random_feasible_point(&sparse, rng.random()))
}

pub fn oracle_check(file: &Path, trials: usize, seed: u64, out: &mut dyn Write) -> Result<(), Failure> {
    let loaded = load(file)?;
    let spec = &loaded.spec;
    let p = spec.dim();
    if p > SUBDIFF_LIMIT {
        return Err(Error::Size { operation: "oracle-check", size: p, limit: SUBDIFF_LIMIT }.into());
    }
    let mut prox_checked = 0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        let x = random_point(spec, &mut rng)?;
        let exact = subdiff_distance(spec, &x)?.distance;
        let brute = subdiff_distance_bruteforce(spec, &x)?.value;
        if !agrees(exact, brute, 1e-7) {
            writeln!(out, "{}", ProblemFile::from_spec(spec, Some(x)).to_json())?;
            return Err(Failure::new(
                6,
                format!("trial {trial}: subdifferential distance {exact} vs brute force {brute} at xbar"),
            ));
        }
        if p <= PROX_LIMIT {
            let u: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
            let t: f64 = rng.random_range(0.1..2.0);
            let x = prox_theta_h(spec.theta(), spec.h(), &u, t)?;
            let fast = prox_objective(spec.h(), &u, t, &x);
            let brute = prox_bruteforce(spec.theta(), spec.h(), &u, t)?.value;
            if !spec.in_theta_domain(&x) || (fast - brute).abs() > 1e-9 {
                let mut dump = ProblemFile::from_spec(spec, None);
                dump.x0 = Some(u);
                writeln!(out, "{}", dump.to_json())?;
                return Err(Failure::new(
                    6,
                    format!("trial {trial}: prox objective {fast} vs brute force {brute} at x0 with t = {t}"),
                ));
            }
            prox_checked += 1;
        }
    }
    writeln!(out, "trials = {trials} distance checks agree, {prox_checked} prox checks agree")?;
    Ok(())
}

pub fn rate(trace: &Path, theta_star: f64, out: &mut dyn Write) -> Result<(), Failure> {
    let mut r = csv::Reader::from_path(trace)?;
    let header = r.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != TRACE_HEADER {
        return Err(Failure::new(2, format!("trace header must be {}", TRACE_HEADER.join(","))));
    }
    let mut values = Vec::new();
    let mut sizes = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |i: usize| -> Result<&str, Failure> {
            rec.get(i).ok_or_else(|| Failure::new(2, format!("trace row {}: missing column {i}", line + 2)))
        };
        let v: f64 = field(1)?
            .parse()
            .map_err(|_| Failure::new(2, format!("trace row {}: bad theta value", line + 2)))?;
        let s: usize = field(3)?
            .parse()
            .map_err(|_| Failure::new(2, format!("trace row {}: bad support_size", line + 2)))?;
        values.push(v);
        sizes.push(s);
    }
    // only support sizes are recorded, so stabilization is read off them
    let from = stable_from(&sizes).unwrap_or(0);
    match fit_linear_rate(&values, from, theta_star)? {
        RateOutcome::Fit(f) => {
            writeln!(out, "slope = {}", f.slope)?;
            writeln!(out, "rate = {}", f.slope.exp())?;
            writeln!(out, "r_squared = {}", f.r_squared)?;
            writeln!(out, "tail = {}", f.tail_len)?;
        }
        RateOutcome::GapExhausted { usable } => {
            writeln!(out, "GAP-EXHAUSTED ({usable} gaps above the floor)")?;
        }
    }
    Ok(())
}
