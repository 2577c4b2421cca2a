//! One function per experiment kind. Every trial draws from its own seeded
//! stream, so records do not depend on the execution path.

use std::time::Instant;

use nonsep_core::epr::{
    condition_i_residual, condition_ii_residual, epr_condition_residual, find_epr_violation,
    make_gns_sum_difference_state, BipartiteRep, EprTarget, TwoPartyRep,
};
use nonsep_core::games::finite::play_all;
use nonsep_core::games::seesaw::{best_trace, seesaw_restarts};
use nonsep_core::games::{
    chain_decode, chain_encode, grid_strategy, orthogonal_encoding, play_epsilon, play_finite,
    play_nonseparable, random_strategy, EpsilonStrategy, FiniteStrategy, MetricDescriptor, MetricKind,
    SeesawConfig,
};
use nonsep_core::sample::{
    distinct_inputs, distinct_unit_labels, dyadic_label, random_biket, random_ket, small_label, small_params,
    sum_constrained_biket, trial_rng, unit_interval_label,
};
use nonsep_core::weyl::{
    apply_weyl, cis, eigen_residual_sq, find_momentum_eigenvector_violation, rotated_rep, HalvorsonRep,
};
use nonsep_core::{Execution, Label};
use rand::Rng;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::record::{Aggregate, RunRecord, TrialResult};
use crate::CliError;

type Outcome = (Vec<TrialResult>, Aggregate, bool);

/// Denominator cap for random inputs in `[0, 1)`.
const UNIT_DENOM: i64 = 1 << 40;

/// Resolves `config`, runs it and times the run. The record's config echo
/// leaves out the output destination.
pub fn run(config: &ExperimentConfig, exec: Execution) -> Result<RunRecord, CliError> {
    let mut config = config.clone().resolve()?;
    config.out = None;
    config.format = None;
    let start = Instant::now();
    let (trials, aggregate, pass) = match config.kind {
        ExperimentKind::CcrCheck => ccr_check(&config, exec),
        ExperimentKind::LemmaWitness => lemma_witness(&config, exec)?,
        ExperimentKind::EprWitness => epr_witness(&config, exec)?,
        ExperimentKind::GnsDemo => gns_demo(&config, exec)?,
        ExperimentKind::GameNonseparable => game_nonseparable(&config)?,
        ExperimentKind::GameFinite => game_finite(&config, exec)?,
        ExperimentKind::GameOptimize => game_optimize(&config, exec)?,
        ExperimentKind::GameEpsilon => game_epsilon(&config)?,
        ExperimentKind::ChainRoundtrip => chain_roundtrip(&config, exec)?,
    };
    let mut record = RunRecord::new(config, trials, aggregate, pass);
    record.duration_ms = start.elapsed().as_millis() as u64;
    Ok(record)
}

fn trials(c: &ExperimentConfig) -> usize {
    c.trials.expect("resolved")
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, f64::max)
}

fn ccr_check(c: &ExperimentConfig, exec: Execution) -> Outcome {
    let rep = rotated_rep(c.rotation());
    let max_support = c.max_support.expect("resolved");
    let tol = c.tolerances.amplitude;
    let results = exec.map(trials(c), |i| {
        let mut rng = trial_rng(c.seed, i as u64);
        let p = small_params(&mut rng);
        let q = small_params(&mut rng);
        let support = rng.gen_range(1..=max_support);
        let psi = random_ket(&mut rng, support);
        let lhs = apply_weyl(&rep, &p, &apply_weyl(&rep, &q, &psi));
        let phase = cis(&(p.symplectic(&q) / Label::integer(2)));
        let rhs = apply_weyl(&rep, &(&p + &q), &psi).scale(phase);
        match lhs.max_deviation(&rhs) {
            Some(d) => TrialResult::new(i, d, d <= tol),
            None => TrialResult::new(i, f64::MAX, false).with("supports", "differ"),
        }
    });
    let mut agg = Aggregate::over("amplitude-error", &results);
    agg.bound = Some(tol);
    agg.max_deviation = agg.max;
    let pass = agg.violations == 0;
    (results, agg, pass)
}

fn lemma_witness(c: &ExperimentConfig, exec: Execution) -> Result<Outcome, CliError> {
    let rep = rotated_rep(c.rotation());
    let max_support = c.max_support.expect("resolved");
    let tol = c.tolerances.amplitude;
    let gammas: Vec<f64> = (0..10).map(|k| -3.0 + 0.65 * k as f64).collect();
    let results = exec.map(trials(c), |i| -> Result<(TrialResult, f64), CliError> {
        let mut rng = trial_rng(c.seed, i as u64);
        let support = rng.gen_range(1..=max_support);
        let psi = random_ket(&mut rng, support);
        let w = find_momentum_eigenvector_violation(&rep, &psi)?;
        let overlap = psi.inner(&rep.apply(&w.params, &psi));
        let exact_zero = overlap.re == 0.0 && overlap.im == 0.0;
        let residuals: Vec<f64> = gammas
            .iter()
            .map(|&g| eigen_residual_sq(&rep, &w.params, &psi, g))
            .collect();
        let expected = w.residual_sq_lower_bound;
        let dev = max_of(residuals.iter().map(|r| (r - expected).abs()));
        let min = residuals.iter().copied().fold(f64::INFINITY, f64::min);
        let t = TrialResult::new(i, min, exact_zero && dev <= tol)
            .with("b", w.b.to_string())
            .with("support", support)
            .with("overlap-exactly-zero", exact_zero);
        Ok((t, dev))
    });
    let results: Vec<(TrialResult, f64)> = results.into_iter().collect::<Result<_, _>>()?;
    let dev = max_of(results.iter().map(|(_, d)| *d));
    let results: Vec<TrialResult> = results.into_iter().map(|(t, _)| t).collect();
    let mut agg = Aggregate::over("residual-sq", &results);
    agg.bound = Some(2.0);
    agg.max_deviation = dev;
    agg.extra("gammas", gammas.len());
    let pass = agg.violations == 0;
    Ok((results, agg, pass))
}

fn epr_witness(c: &ExperimentConfig, exec: Execution) -> Result<Outcome, CliError> {
    let rep = BipartiteRep::new(rotated_rep(c.rotation()), HalvorsonRep::position());
    let target = EprTarget::new(c.x.clone().expect("resolved"), c.p.clone().expect("resolved"));
    let max_support = c.max_support.expect("resolved");
    let tol = c.tolerances;
    let results = exec.map(trials(c), |i| -> Result<TrialResult, CliError> {
        let mut rng = trial_rng(c.seed, i as u64);
        let support = rng.gen_range(1..=max_support);
        let engineered = i % 5 == 0;
        let psi = if engineered {
            sum_constrained_biket(&mut rng, support, &target.x)
        } else {
            random_biket(&mut rng, support)
        };
        let normalized = (psi.norm() - 1.0).abs() <= tol.norm;
        let w = find_epr_violation(&rep, &target, &psi)?;
        let residual = epr_condition_residual(&rep, &target, &w.a, &w.b, &psi)?;
        let mut t = TrialResult::new(i, residual, normalized && (residual - 2.0).abs() <= tol.amplitude)
            .with("a", w.a.to_string())
            .with("b", w.b.to_string())
            .with("engineered", engineered);
        if engineered {
            let a = small_label(&mut rng, 12, 6);
            t = t.with(
                "condition-i-residual",
                condition_i_residual(&rep, &target, &a, &psi)?,
            );
        }
        Ok(t)
    });
    let results: Vec<TrialResult> = results.into_iter().collect::<Result<_, _>>()?;
    let mut agg = Aggregate::over("residual-sq", &results);
    agg.bound = Some(2.0);
    agg.max_deviation = max_of(results.iter().map(|t| (t.statistic - 2.0).abs()));
    agg.extra(
        "engineered",
        results.iter().filter(|t| t.detail["engineered"] == true).count(),
    );
    let pass = agg.violations == 0;
    Ok((results, agg, pass))
}

fn gns_demo(c: &ExperimentConfig, exec: Execution) -> Result<Outcome, CliError> {
    let target = EprTarget::new(c.x.clone().expect("resolved"), c.p.clone().expect("resolved"));
    let (state, rep) = make_gns_sum_difference_state(target.x.clone(), target.p.clone());
    let tol = c.tolerances.amplitude;
    let results = exec.map(trials(c), |i| -> Result<TrialResult, CliError> {
        let mut rng = trial_rng(c.seed, i as u64);
        let a = small_label(&mut rng, 12, 6);
        let b = small_label(&mut rng, 12, 6);
        let r1 = condition_i_residual(&rep, &target, &a, &state)?;
        let r2 = condition_ii_residual(&rep, &target, &b, &state)?;
        let r = epr_condition_residual(&rep, &target, &a, &b, &state)?;
        let worst = r1.max(r2).max(r);
        Ok(TrialResult::new(i, worst, worst <= tol)
            .with("a", a.to_string())
            .with("b", b.to_string()))
    });
    let results: Vec<TrialResult> = results.into_iter().collect::<Result<_, _>>()?;
    let mut agg = Aggregate::over("residual-sq", &results);
    agg.bound = Some(tol);
    agg.max_deviation = agg.max;

    // The same vector read in the product representation is no EPR state.
    let product = BipartiteRep::position_pair();
    let w = find_epr_violation(&product, &target, &state)?;
    let contrast = epr_condition_residual(&product, &target, &w.a, &w.b, &state)?;
    agg.extra("bipartite", rep.is_bipartite());
    agg.extra("product-rep-residual-sq", contrast);
    let pass = agg.violations == 0 && !rep.is_bipartite();
    Ok((results, agg, pass))
}

fn game_nonseparable(c: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut rng = trial_rng(c.seed, 0);
    let inputs = distinct_inputs(&mut rng, c.inputs.expect("resolved"));
    let report = play_nonseparable(&inputs)?;
    let results: Vec<TrialResult> = report
        .g
        .iter()
        .zip(&report.inputs)
        .enumerate()
        .map(|(i, (&g, x))| TrialResult::new(i, g, g == 1.0).with("input", x.as_str()))
        .collect();
    let mut agg = Aggregate::over("g", &results);
    agg.bound = Some(1.0);
    agg.max_deviation = max_of(report.g.iter().map(|g| (g - 1.0).abs()));
    let cross = report.max_cross.unwrap_or(0.0);
    agg.extra("max-cross", cross);
    let pass = agg.violations == 0 && cross == 0.0;
    Ok((results, agg, pass))
}

/// `(G, Σ g, n/|X|)` and whether the bounds hold.
fn finite_trial(i: usize, s: &FiniteStrategy, g: &[f64], valid: bool, tol: f64) -> TrialResult {
    let n = s.dim;
    let k = g.len();
    let mass: f64 = g.iter().sum();
    let mean = mass / k as f64;
    let bound = (n as f64 / k as f64).min(1.0);
    let holds = mass <= n as f64 + tol && mean <= bound + tol && g.iter().all(|&v| v <= 1.0 + tol);
    TrialResult::new(i, mean, valid && holds)
        .with("n", n)
        .with("inputs", k)
        .with("mass", mass)
        .with("bound", bound)
        .with("valid", valid)
}

fn game_finite(c: &ExperimentConfig, exec: Execution) -> Result<Outcome, CliError> {
    let tol = c.tolerances.bound;
    let results = if let Some(path) = &c.strategy {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let s: FiniteStrategy = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: not a strategy: {e}", path.display())))?;
        if s.dim == 0 || s.states.is_empty() || s.states.len() != s.effects.len() {
            return Err(CliError::Config(format!(
                "{}: malformed strategy",
                path.display()
            )));
        }
        let (g, check) = match play_all(&s) {
            Ok(report) => (report.g, None),
            Err(e) => (
                (0..s.num_inputs()).map(|x| s.guess_probability(x)).collect(),
                Some(e.to_string()),
            ),
        };
        let mut t = finite_trial(0, &s, &g, check.is_none(), tol);
        if let Some(msg) = check {
            t = t.with("error", msg);
        }
        vec![t]
    } else {
        exec.map(trials(c), |i| -> Result<TrialResult, CliError> {
            let mut rng = trial_rng(c.seed, i as u64);
            let n = c.n.unwrap_or_else(|| rng.gen_range(2..=5));
            let k = c.inputs.unwrap_or_else(|| rng.gen_range(n + 1..=50));
            let s = random_strategy(&mut rng, n, k);
            let report = play_all(&s)?;
            Ok(finite_trial(i, &s, &report.g, true, tol))
        })
        .into_iter()
        .collect::<Result<_, _>>()?
    };
    let mut agg = Aggregate::over("G", &results);
    let excess = results
        .iter()
        .map(|t| t.statistic - t.detail["bound"].as_f64().expect("bound"))
        .fold(f64::NEG_INFINITY, f64::max);
    agg.max_deviation = excess.max(0.0);
    agg.extra("max-excess", excess);
    if let [t] = results.as_slice() {
        agg.bound = t.detail["bound"].as_f64();
    }
    let pass = agg.violations == 0;
    Ok((results, agg, pass))
}

fn game_optimize(c: &ExperimentConfig, exec: Execution) -> Result<Outcome, CliError> {
    let n = c.n.expect("resolved");
    let k = c.inputs.expect("resolved");
    let config = SeesawConfig {
        iterations: c.iterations.expect("resolved"),
        restarts: c.restarts.expect("resolved"),
        ..SeesawConfig::default()
    };
    let tol = c.tolerances;
    let bound = (n as f64 / k as f64).min(1.0);
    let traces = seesaw_restarts(n, k, c.seed, &config, exec)?;
    let results: Vec<TrialResult> = traces
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let g = t.final_value();
            TrialResult::new(i, g, t.is_monotone() && g <= bound + tol.bound)
                .with("iterations", t.history.len() - 1)
                .with("monotone", t.is_monotone())
        })
        .collect();
    let mut agg = Aggregate::over("G", &results);
    agg.bound = Some(bound);
    agg.max_deviation = (agg.max - bound).abs();

    let best = best_trace(traces);
    let validated = play_all(&best.strategy);
    let explicit = play_all(&orthogonal_encoding(n, k))?;
    agg.extra("n", n);
    agg.extra("inputs", k);
    agg.extra("orthogonal-encoding-G", explicit.mean);
    agg.extra("best-valid", validated.is_ok());
    let pass = agg.violations == 0
        && validated.is_ok()
        && agg.max <= bound + tol.bound
        && agg.max >= bound - tol.attain;
    Ok((results, agg, pass))
}

fn game_epsilon(c: &ExperimentConfig) -> Result<Outcome, CliError> {
    let eps = c.epsilon.clone().expect("resolved");
    let tol = c.tolerances;
    let mut rng = trial_rng(c.seed, 0);
    let metric = c.metric.expect("resolved");
    let mut extras: Vec<(&str, serde_json::Value)> = Vec::new();
    let (report, expected, identical) = match metric {
        MetricKind::Standard => {
            let grid = grid_strategy(Label::zero(), Label::one(), &eps)?;
            extras.push(("cells", grid.cells().into()));
            let inputs = distinct_unit_labels(&mut rng, trials(c), UNIT_DENOM);
            let report = play_epsilon(
                &MetricDescriptor::unit_interval(),
                &EpsilonStrategy::Grid(grid),
                &eps,
                &inputs,
            )?;
            (report, None, None)
        }
        MetricKind::Discrete => {
            let n = c.n.expect("resolved");
            let k = c.inputs.expect("resolved");
            let strategy = random_strategy(&mut rng, n, k);
            let outcomes = distinct_inputs(&mut rng, k);
            let sharp = play_finite(&strategy, &(0..k).collect::<Vec<_>>())?;
            let relaxed = play_epsilon(
                &MetricDescriptor::Discrete,
                &EpsilonStrategy::Finite {
                    strategy,
                    outcomes: outcomes.clone(),
                },
                &eps,
                &outcomes,
            )?;
            let same = relaxed.dim == sharp.dim
                && relaxed.mean.to_bits() == sharp.mean.to_bits()
                && relaxed
                    .g
                    .iter()
                    .map(|v| v.to_bits())
                    .eq(sharp.g.iter().map(|v| v.to_bits()));
            (relaxed, Some(sharp.g), Some(same))
        }
        MetricKind::Dyadic => {
            let sites = c.sites.expect("resolved");
            let inputs = distinct_unit_labels(&mut rng, trials(c), UNIT_DENOM);
            let report = play_epsilon(
                &MetricDescriptor::Dyadic,
                &EpsilonStrategy::Chain { sites },
                &eps,
                &inputs,
            )?;
            (report, None, None)
        }
    };
    let target = |i: usize| expected.as_ref().map_or(1.0, |g| g[i]);
    let results: Vec<TrialResult> = report
        .g
        .iter()
        .zip(&report.inputs)
        .enumerate()
        .map(|(i, (&g, x))| {
            let ok = (g - target(i)).abs() <= tol.amplitude;
            TrialResult::new(i, g, ok).with("input", x.as_str())
        })
        .collect();
    let mut agg = Aggregate::over("g-epsilon", &results);
    agg.max_deviation = max_of(
        results
            .iter()
            .enumerate()
            .map(|(i, t)| (t.statistic - target(i)).abs()),
    );
    if expected.is_none() {
        agg.bound = Some(1.0);
    }
    agg.extra("metric", metric.to_string());
    agg.extra("epsilon", eps.to_string());
    for (key, value) in extras {
        agg.extra(key, value);
    }
    let mut pass = agg.violations == 0;
    if let Some(same) = identical {
        agg.extra("identical-to-sharp-game", same);
        if eps <= Label::one() {
            pass &= same;
        }
    }
    Ok((results, agg, pass))
}

fn chain_roundtrip(c: &ExperimentConfig, exec: Execution) -> Result<Outcome, CliError> {
    let sites = c.sites.expect("resolved");
    let unit = Label::dyadic(sites as u32);
    let results = exec.map(trials(c), |i| -> Result<TrialResult, CliError> {
        let mut rng = trial_rng(c.seed, i as u64);
        let dyadic = i % 4 == 0;
        let x = if dyadic {
            dyadic_label(&mut rng, sites.min(256) as u32)
        } else {
            unit_interval_label(&mut rng, UNIT_DENOM)
        };
        let decoded = chain_decode(&chain_encode(&x, sites)?);
        let err = &x - &decoded;
        let scaled = &err / &unit;
        let within = !err.is_negative() && scaled < Label::one();
        let exact = !dyadic || err.is_zero();
        Ok(TrialResult::new(i, scaled.to_f64(), within && exact)
            .with("x", x.to_string())
            .with("dyadic", dyadic))
    });
    let results: Vec<TrialResult> = results.into_iter().collect::<Result<_, _>>()?;
    let mut agg = Aggregate::over("scaled-error", &results);
    agg.bound = Some(1.0);
    agg.max_deviation = agg.max;
    agg.extra("sites", sites);
    let pass = agg.violations == 0;
    Ok((results, agg, pass))
}
