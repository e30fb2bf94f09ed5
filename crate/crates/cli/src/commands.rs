use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;

use mixcone::classical::{self, classify_reversible, is_isometry, verify_stochastic, StochasticMatrix};
use mixcone::cone::{ConeElement, HermitianOperator, MinimalDecomposition, SignedMeasure, State};
use mixcone::dynamics::damped::{damped_flow, motion_reversal_defect, PhasePoint};
use mixcone::dynamics::fokker_planck::{ou_stationary, relaxation_run, DensityGrid, FokkerPlanck};
use mixcone::dynamics::shift::{
    finite_window_illustration, shift_inverse_on_range, shift_map, shift_surjectivity_witness, ShiftState,
};
use mixcone::linalg::random_unitary;
use mixcone::mixdist::{self, dominates_with_grid, mixing_profile_with_grid};
use mixcone::quantum::{
    build_inverse_channel, build_isometric_channel, is_isometry_channel, is_surjective, IsometryBlueprint,
    KrausChannel,
};
use mixcone::sample;
use mixcone::transport::{self, find_transport_with, rss_sweep, LpMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{BlueprintArgs, Cli, CliResult, Format, Verb};
use crate::error::CliError;

/// Default tolerance of the randomized channel isometry test.
const CHANNEL_TOL: f64 = 1e-9;

pub fn run(cli: &Cli) -> CliResult<String> {
    let c = &cli.common;
    let tol = |default: f64| c.tol.unwrap_or(default);
    let fmt = |default: Format| c.format.unwrap_or(default);
    match &cli.verb {
        Verb::Decompose => decompose(&read_input(cli)?),
        Verb::Mixdist { grid } => mixdist_profile(&read_input(cli)?, *grid, fmt(Format::Json)),
        Verb::Dominates { grid } => dominance(&read_input(cli)?, *grid, tol(mixdist::DEFAULT_TOL)),
        Verb::FindMap { exact } => find_map(&read_input(cli)?, *exact),
        Verb::RssSweep { dim, count } => sweep(*dim, *count, c.seed, tol(mixdist::DEFAULT_TOL), fmt(Format::Csv)),
        Verb::CheckStochastic => check_stochastic(&read_input(cli)?, tol(classical::STOCHASTIC_TOL)),
        Verb::CheckIsometry => {
            let phi: StochasticMatrix = parse(&read_input(cli)?)?;
            to_json(&is_isometry(&phi, tol(classical::SUPPORT_TOL)))
        }
        Verb::Classify => {
            let phi: StochasticMatrix = parse(&read_input(cli)?)?;
            to_json(&classify_reversible(&phi, tol(classical::SUPPORT_TOL))?)
        }
        Verb::BuildIsometry(args) => {
            let b = blueprint(cli, args)?;
            to_json(&build_isometric_channel(&b)?)
        }
        Verb::InvertIsometry(args) => {
            let b = blueprint(cli, args)?;
            to_json(&build_inverse_channel(&b, &State::maximally_mixed(b.dim_in()))?)
        }
        Verb::CheckChannel { samples } => check_channel(&read_input(cli)?, *samples, c.seed, tol(CHANNEL_TOL)),
        Verb::DemoDamped {
            x0,
            v0,
            kappa,
            t_max,
            steps,
        } => demo_damped(*x0, *v0, *kappa, *t_max, *steps, fmt(Format::Csv)),
        Verb::DemoFp {
            lower,
            upper,
            cells,
            theta,
            sigma,
            dt,
            t_max,
            samples,
            center,
            width,
        } => demo_fp(
            FpConfig {
                lower: *lower,
                upper: *upper,
                cells: *cells,
                theta: *theta,
                sigma: *sigma,
                dt: *dt,
                t_max: *t_max,
                samples: *samples,
                center: *center,
                width: *width,
            },
            fmt(Format::Csv),
        ),
        Verb::DemoShift { steps, radius } => demo_shift(*steps, *radius, c.seed, fmt(Format::Csv)),
    }
}

fn read_input(cli: &Cli) -> CliResult<String> {
    match &cli.common.input {
        Some(path) => std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|source| CliError::Io {
                path: "<stdin>".into(),
                source,
            })?;
            Ok(s)
        }
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> CliResult<T> {
    Ok(serde_json::from_str(text)?)
}

fn to_json<T: Serialize>(v: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn field<'a>(doc: &'a Value, name: &str) -> CliResult<&'a Value> {
    doc.get(name)
        .ok_or_else(|| CliError::Usage(format!("input document lacks the field \"{name}\"")))
}

/// Classical documents carry "weights", quantum ones "re"/"im".
fn is_classical(v: &Value) -> bool {
    v.get("weights").is_some()
}

fn states<E: ConeElement + for<'de> Deserialize<'de>>(doc: &Value, names: &[&str]) -> CliResult<Vec<State<E>>> {
    names
        .iter()
        .map(|n| Ok(serde_json::from_value(field(doc, n)?.clone())?))
        .collect()
}

#[derive(Serialize)]
struct DecompositionReport<E> {
    charge: f64,
    one_norm: f64,
    positive: E,
    negative: E,
}

fn report<E: ConeElement>(z: &E) -> CliResult<DecompositionReport<E>> {
    let MinimalDecomposition { positive, negative } = z.minimal_decomposition()?;
    Ok(DecompositionReport {
        charge: z.charge(),
        one_norm: z.one_norm()?,
        positive,
        negative,
    })
}

fn decompose(text: &str) -> CliResult<String> {
    let doc: Value = parse(text)?;
    if is_classical(&doc) {
        to_json(&report(&serde_json::from_value::<SignedMeasure>(doc)?)?)
    } else {
        to_json(&report(&serde_json::from_value::<HermitianOperator>(doc)?)?)
    }
}

fn mixdist_profile(text: &str, grid: usize, format: Format) -> CliResult<String> {
    let doc: Value = parse(text)?;
    let profile = if is_classical(field(&doc, "x")?) {
        let s = states::<SignedMeasure>(&doc, &["x", "y"])?;
        mixing_profile_with_grid(&s[0], &s[1], grid)?
    } else {
        let s = states::<HermitianOperator>(&doc, &["x", "y"])?;
        mixing_profile_with_grid(&s[0], &s[1], grid)?
    };
    match format {
        Format::Csv => Ok(profile.to_csv()),
        Format::Json => to_json(&profile),
    }
}

fn dominance(text: &str, grid: usize, tol: f64) -> CliResult<String> {
    let doc: Value = parse(text)?;
    let names = ["x", "y", "xp", "yp"];
    let verdict = if is_classical(field(&doc, "x")?) {
        let s = states::<SignedMeasure>(&doc, &names)?;
        dominates_with_grid((&s[0], &s[1]), (&s[2], &s[3]), tol, grid)?
    } else {
        let s = states::<HermitianOperator>(&doc, &names)?;
        dominates_with_grid((&s[0], &s[1]), (&s[2], &s[3]), tol, grid)?
    };
    to_json(&verdict)
}

fn find_map(text: &str, exact: bool) -> CliResult<String> {
    let doc: Value = parse(text)?;
    let s = states::<SignedMeasure>(&doc, &["x", "y", "xp", "yp"])?;
    let mode = if exact { LpMode::Exact } else { LpMode::Float };
    to_json(&find_transport_with(&s[0], &s[1], &s[2], &s[3], mode)?)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn sweep(dim: usize, count: usize, seed: u64, tol: f64, format: Format) -> CliResult<String> {
    if dim == 0 {
        return Err(CliError::Usage("--dim must be at least 1".into()));
    }
    if dim > transport::MAX_DIM {
        return Err(mixcone::Error::DimensionBound {
            dim,
            max: transport::MAX_DIM,
        }
        .into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = rss_sweep(&mut rng, dim, count, tol)?;
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut out = String::from("index,feasible,dominates,agree,witness_t,gap\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.index,
                    r.feasible,
                    r.dominates,
                    r.agree,
                    opt(r.witness_t),
                    opt(r.gap)
                );
            }
            Ok(out)
        }
    }
}

/// Matrix document read without validation, so that broken matrices can be
/// diagnosed rather than rejected.
#[derive(Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<f64>>,
}

fn check_stochastic(text: &str, tol: f64) -> CliResult<String> {
    let m: RawMatrix = parse(text)?;
    if m.entries.len() != m.rows || m.entries.iter().any(|r| r.len() != m.cols) {
        return Err(CliError::Usage(format!(
            "entries do not form a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    to_json(&verify_stochastic(&m.entries, tol))
}

fn blueprint(cli: &Cli, args: &BlueprintArgs) -> CliResult<IsometryBlueprint> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.common.seed);
    let base = if cli.common.input.is_some() {
        parse::<IsometryBlueprint>(&read_input(cli)?)?
    } else {
        let n = args.weights.len();
        if let Some(&k) = args.antilinear.iter().find(|&&k| k >= n) {
            return Err(CliError::Usage(format!("antilinear block {k} does not exist ({n} blocks)")));
        }
        let anti = (0..n).map(|k| args.antilinear.contains(&k)).collect();
        IsometryBlueprint::block_embedding(args.dim, args.weights.clone(), args.extra, anti)?
    };
    if args.rotate {
        let w = random_unitary(base.dim_out(), &mut rng);
        Ok(base.rotated(&w)?)
    } else {
        Ok(base)
    }
}

#[derive(Serialize)]
struct ChannelReport {
    dim_in: usize,
    dim_out: usize,
    trace_preservation_defect: f64,
    surjectivity: mixcone::quantum::SurjectivityReport,
    isometry: mixcone::quantum::ChannelIsometryVerdict,
}

fn check_channel(text: &str, samples: usize, seed: u64, tol: f64) -> CliResult<String> {
    let ch: KrausChannel = parse(text)?;
    to_json(&ChannelReport {
        dim_in: ch.dim_in(),
        dim_out: ch.dim_out(),
        trace_preservation_defect: ch.trace_preservation_defect(),
        surjectivity: is_surjective(&ch)?,
        isometry: is_isometry_channel(&ch, samples, seed, tol)?,
    })
}

#[derive(Serialize)]
struct DampedRow {
    t: f64,
    x: f64,
    v: f64,
    speed: f64,
    reversal_defect: f64,
}

fn demo_damped(x0: f64, v0: f64, kappa: f64, t_max: f64, steps: usize, format: Format) -> CliResult<String> {
    if steps == 0 || t_max.is_nan() || t_max < 0.0 {
        return Err(CliError::Usage("need --steps ≥ 1 and --t-max ≥ 0".into()));
    }
    let p = PhasePoint::new(x0, v0)?;
    let rows = (0..=steps)
        .map(|k| {
            let t = t_max * k as f64 / steps as f64;
            let q = damped_flow(p, t, kappa)?;
            Ok(DampedRow {
                t,
                x: q.x,
                v: q.v,
                speed: q.v.abs(),
                reversal_defect: motion_reversal_defect(p, t, kappa)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut out = String::from("t,x,v,speed,reversal_defect\n");
            for r in &rows {
                let _ = writeln!(out, "{},{},{},{},{}", r.t, r.x, r.v, r.speed, r.reversal_defect);
            }
            Ok(out)
        }
    }
}

struct FpConfig {
    lower: f64,
    upper: f64,
    cells: usize,
    theta: f64,
    sigma: f64,
    dt: Option<f64>,
    t_max: f64,
    samples: usize,
    center: f64,
    width: f64,
}

#[derive(Serialize)]
struct FpReport {
    dt: f64,
    steps: usize,
    stability_bound: f64,
    max_mass_drift: f64,
    monotone: bool,
    max_distance_increase: f64,
    final_distance: f64,
    pairs_checked: usize,
    dominance_failures: usize,
    /// Distance between the discrete equilibrium and the Gaussian.
    stationary_vs_gaussian: f64,
    times: Vec<f64>,
    distances: Vec<f64>,
    means: Vec<f64>,
}

fn demo_fp(cfg: FpConfig, format: Format) -> CliResult<String> {
    let (theta, sigma) = (cfg.theta, cfg.sigma);
    let bound =
        FokkerPlanck::stability_bound_for(cfg.lower, cfg.upper, cfg.cells, move |x| -theta * x, move |_| sigma)?;
    let dt = cfg.dt.unwrap_or(bound);
    let op = FokkerPlanck::ornstein_uhlenbeck(cfg.lower, cfg.upper, cfg.cells, theta, sigma, dt)?;
    if cfg.t_max.is_nan() || cfg.t_max <= 0.0 || cfg.samples == 0 {
        return Err(CliError::Usage("need --t-max > 0 and --samples ≥ 1".into()));
    }
    let steps = (cfg.t_max / dt).ceil() as usize;
    let every = (steps / cfg.samples).max(1);
    let rho0 = DensityGrid::gaussian(cfg.lower, cfg.upper, cfg.cells, cfg.center, cfg.width)?;
    let tr = relaxation_run(&rho0, &op, steps, every)?;
    let gaussian = ou_stationary(cfg.lower, cfg.upper, cfg.cells, theta, sigma)?;
    match format {
        Format::Csv => {
            let mut out = String::from("t,distance,mean,mean_ou\n");
            let m0 = tr.means[0];
            for ((t, d), m) in tr.times.iter().zip(&tr.distances).zip(&tr.means) {
                let _ = writeln!(out, "{t},{d},{m},{}", m0 * (-theta * t).exp());
            }
            Ok(out)
        }
        Format::Json => to_json(&FpReport {
            dt,
            steps,
            stability_bound: op.stability_bound(),
            max_mass_drift: tr.max_mass_drift,
            monotone: tr.monotone,
            max_distance_increase: tr.max_distance_increase,
            final_distance: *tr.distances.last().expect("trace has samples"),
            pairs_checked: tr.pairs_checked,
            dominance_failures: tr.dominance_failures.len(),
            stationary_vs_gaussian: tr.stationary.l1_distance(&gaussian)?,
            times: tr.times,
            distances: tr.distances,
            means: tr.means,
        }),
    }
}

#[derive(Serialize)]
struct ShiftRow {
    n: u32,
    one_norm: f64,
    min_bin: i64,
    max_bin: i64,
    inverse_ok: bool,
    witness: ShiftState,
}

#[derive(Serialize)]
struct ShiftReport {
    initial: ShiftState,
    orbit: Vec<ShiftRow>,
    window: mixcone::dynamics::shift::WindowIllustration,
}

fn random_shift_state(rng: &mut ChaCha8Rng, radius: i64) -> CliResult<ShiftState> {
    if radius < 0 {
        return Err(CliError::Usage("--radius must be nonnegative".into()));
    }
    let size = rng.random_range(1..=5);
    let mut bins = BTreeMap::new();
    for w in sample::probability_vector(rng, size, false) {
        *bins.entry(rng.random_range(-radius..=radius)).or_insert(0.0) += w;
    }
    // renormalize exactly so that the state validates
    let total: f64 = bins.values().sum();
    bins.values_mut().for_each(|w| *w /= total);
    Ok(ShiftState::new(bins)?)
}

fn demo_shift(steps: u32, radius: i64, seed: u64, format: Format) -> CliResult<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial = random_shift_state(&mut rng, radius)?;
    let mut orbit = Vec::new();
    for n in 1..=steps {
        let img = shift_map(&initial, n)?;
        let support = img.support();
        orbit.push(ShiftRow {
            n,
            one_norm: img.one_norm(),
            min_bin: *support.first().unwrap_or(&0),
            max_bin: *support.last().unwrap_or(&0),
            inverse_ok: shift_inverse_on_range(&img, n).as_ref() == Some(&initial),
            witness: shift_surjectivity_witness(n)?,
        });
    }
    match format {
        Format::Csv => {
            let mut out = String::from("n,one_norm,min_bin,max_bin,inverse_ok,witness_bin\n");
            for r in &orbit {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.n,
                    r.one_norm,
                    r.min_bin,
                    r.max_bin,
                    r.inverse_ok,
                    r.witness.support()[0]
                );
            }
            Ok(out)
        }
        Format::Json => to_json(&ShiftReport {
            initial,
            orbit,
            window: finite_window_illustration(-3, 3)?,
        }),
    }
}
