//! Acceptance criteria, one line each.
//!
//! Criteria run one after another inside a single test so their wall-clock
//! budgets are not shared with concurrently running tests. Run with
//! `--nocapture` to see the report.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nonsep_cli::record::read_json_lines;
use nonsep_cli::{run, ExperimentConfig, ExperimentKind};
use nonsep_core::epr::{
    condition_i_residual, condition_ii_residual, epr_condition_residual, find_epr_violation,
    make_gns_sum_difference_state, BipartiteRep, EprTarget, TwoPartyRep,
};
use nonsep_core::games::finite::play_all;
use nonsep_core::games::seesaw::seesaw_restarts;
use nonsep_core::games::{
    chain_decode, chain_encode, grid_strategy, orthogonal_encoding, play_epsilon, play_finite,
    play_nonseparable, random_strategy, EpsilonStrategy, MetricDescriptor, SeesawConfig, SpanProjection,
};
use nonsep_core::sample::{
    distinct_inputs, distinct_unit_labels, dyadic_label, random_biket, random_ket, small_label, small_params,
    sum_constrained_biket, trial_rng, unit_interval_label, wide_label,
};
use nonsep_core::weyl::{
    apply_weyl, cis, eigen_residual_sq, eigenbasis_overlap, find_momentum_eigenvector_violation, rotated_rep,
    HalvorsonRep, Rotation,
};
use nonsep_core::{characteristic_state, Execution, Label};
use rand::Rng;

const AMPLITUDE_TOL: f64 = 1e-12;
const BOUND_TOL: f64 = 1e-9;
const ATTAIN_TOL: f64 = 1e-6;

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pythagorean() -> Rotation {
    Rotation::pythagorean(3, 4, 5).unwrap()
}

fn ccr_conformance() -> Check {
    for rep in [HalvorsonRep::position(), rotated_rep(pythagorean())] {
        for i in 0..1000u64 {
            let mut rng = trial_rng(101, i);
            let p = small_params(&mut rng);
            let q = small_params(&mut rng);
            let support = rng.gen_range(1..=6);
            let psi = random_ket(&mut rng, support);
            let lhs = apply_weyl(&rep, &p, &apply_weyl(&rep, &q, &psi));
            let phase = cis(&(p.symplectic(&q) / Label::integer(2)));
            let rhs = apply_weyl(&rep, &(&p + &q), &psi).scale(phase);
            let dev = lhs
                .max_deviation(&rhs)
                .ok_or_else(|| format!("trial {i}: support keys differ"))?;
            ensure(dev <= AMPLITUDE_TOL, || {
                format!("trial {i}: amplitude error {dev:e}")
            })?;
        }
    }
    Ok(())
}

fn nonseparable_exact() -> Check {
    let mut rng = trial_rng(102, 0);
    let inputs = distinct_inputs(&mut rng, 100);
    let report = play_nonseparable(&inputs).map_err(|e| e.to_string())?;
    ensure(report.g.iter().all(|&g| g == 1.0), || {
        format!("g = {:?}", report.g)
    })?;
    ensure(report.max_cross == Some(0.0), || {
        format!("cross {:?}", report.max_cross)
    })?;
    for (i, x) in inputs.iter().enumerate() {
        let chi = characteristic_state(x.clone());
        for (j, y) in inputs.iter().enumerate() {
            let pr = SpanProjection::singleton(y.clone()).probability(&chi);
            let expected = if i == j { 1.0 } else { 0.0 };
            ensure(pr == expected, || format!("Pr(y = {y} | {x}) = {pr}"))?;
        }
    }
    Ok(())
}

fn separable_bound() -> Check {
    for i in 0..200u64 {
        let mut rng = trial_rng(103, i);
        let n = rng.gen_range(2..=5);
        let k = rng.gen_range(n + 1..=50);
        let s = random_strategy(&mut rng, n, k);
        let report = play_all(&s).map_err(|e| format!("trial {i}: {e}"))?;
        let mass = report.guessing_mass();
        ensure(mass <= n as f64 + BOUND_TOL, || {
            format!("trial {i}: mass {mass} > {n}")
        })?;
        let bound = n as f64 / k as f64;
        ensure(report.mean <= bound + BOUND_TOL, || {
            format!("trial {i}: G {} > {n}/{k}", report.mean)
        })?;
    }
    Ok(())
}

fn dimension_witness_attained() -> Check {
    for (n, k) in [(2usize, 3usize), (2, 4), (3, 6)] {
        let bound = n as f64 / k as f64;
        let explicit = play_all(&orthogonal_encoding(n, k)).map_err(|e| e.to_string())?;
        ensure((explicit.mean - bound).abs() <= AMPLITUDE_TOL, || {
            format!("({n},{k}): explicit G {}", explicit.mean)
        })?;
        let traces = seesaw_restarts(n, k, 104, &SeesawConfig::default(), Execution::default())
            .map_err(|e| e.to_string())?;
        ensure(traces.len() == 20, || format!("{} restarts", traces.len()))?;
        for t in &traces {
            ensure(t.is_monotone(), || {
                format!("({n},{k}): G decreased: {:?}", t.history)
            })?;
            play_all(&t.strategy).map_err(|e| format!("({n},{k}): {e}"))?;
        }
        let best = traces
            .iter()
            .map(|t| t.final_value())
            .fold(f64::NEG_INFINITY, f64::max);
        ensure(best <= bound + BOUND_TOL, || {
            format!("({n},{k}): G {best} exceeds {bound}")
        })?;
        ensure(best >= bound - ATTAIN_TOL, || {
            format!("({n},{k}): G {best} short of {bound}")
        })?;
    }
    Ok(())
}

fn overlap_dichotomy() -> Check {
    let rep = HalvorsonRep::position();
    let grid: Vec<Label> = (-10..10).map(|k| Label::ratio(k, 4)).collect();
    let mut bs: Vec<Label> = (-20..20).map(|j| Label::ratio(j, 4)).collect();
    bs.extend((1..=10).map(|j| Label::ratio(j, 3)));
    assert_eq!((grid.len(), bs.len()), (20, 50));
    let mut hits = 0;
    for b in &bs {
        for mu in &grid {
            for lambda in &grid {
                let overlap = eigenbasis_overlap(&rep, b, mu, lambda);
                let nonzero = overlap.re != 0.0 || overlap.im != 0.0;
                let shifted = mu == &(lambda + b);
                ensure(nonzero == shifted, || {
                    format!("b={b} mu={mu} lambda={lambda}: {overlap}")
                })?;
                hits += usize::from(shifted);
            }
        }
    }
    ensure(hits > 0, || "no shifted pair in the grid".into())
}

fn no_momentum_eigenvectors() -> Check {
    let rep = HalvorsonRep::position();
    let gammas: Vec<f64> = (0..10).map(|k| -3.1 + 0.7 * k as f64).collect();
    for i in 0..100u64 {
        let mut rng = trial_rng(106, i);
        let psi = random_ket(&mut rng, 1 + (i as usize % 12));
        let w = find_momentum_eigenvector_violation(&rep, &psi).map_err(|e| e.to_string())?;
        ensure(w.params.a.is_zero(), || format!("trial {i}: not a pure shift"))?;
        let overlap = psi.inner(&apply_weyl(&rep, &w.params, &psi));
        ensure(overlap.re == 0.0 && overlap.im == 0.0, || {
            format!("trial {i}: overlap {overlap}")
        })?;
        for &g in &gammas {
            let r = eigen_residual_sq(&rep, &w.params, &psi, g);
            ensure((r - 2.0).abs() <= AMPLITUDE_TOL, || {
                format!("trial {i}, gamma {g}: {r}")
            })?;
        }
    }
    Ok(())
}

fn epr_witness() -> Check {
    let target = EprTarget::new(Label::ratio(3, 2), Label::ratio(-1, 3));
    for (name, rotation) in [
        ("0", Rotation::identity()),
        ("pi/2", Rotation::quarter_turns(1)),
        ("3/5,4/5", pythagorean()),
    ] {
        let rep = BipartiteRep::new(rotated_rep(rotation), HalvorsonRep::position());
        let mut engineered = 0;
        for i in 0..1000u64 {
            let mut rng = trial_rng(107, i);
            let support = rng.gen_range(1..=6);
            let psi = if i % 5 == 0 {
                engineered += 1;
                sum_constrained_biket(&mut rng, support, &target.x)
            } else {
                random_biket(&mut rng, support)
            };
            if i % 5 == 0 && name == "0" {
                let a = small_label(&mut rng, 12, 6);
                let r = condition_i_residual(&rep, &target, &a, &psi).map_err(|e| e.to_string())?;
                ensure(r <= AMPLITUDE_TOL, || {
                    format!("trial {i}: engineered state misses (i): {r}")
                })?;
            }
            let w = find_epr_violation(&rep, &target, &psi).map_err(|e| e.to_string())?;
            let r = epr_condition_residual(&rep, &target, &w.a, &w.b, &psi).map_err(|e| e.to_string())?;
            ensure((r - 2.0).abs() <= AMPLITUDE_TOL, || {
                format!("theta {name}, trial {i}: residual {r}")
            })?;
        }
        ensure(engineered >= 200, || {
            format!("only {engineered} engineered states")
        })?;
    }
    Ok(())
}

fn gns_contrast() -> Check {
    for (x, p) in [(0, 0), (1, 2)] {
        let target = EprTarget::new(Label::integer(x), Label::integer(p));
        let (state, rep) = make_gns_sum_difference_state(target.x.clone(), target.p.clone());
        ensure(!rep.is_bipartite(), || {
            "sum/difference rep claims to be bipartite".into()
        })?;
        for i in 0..100u64 {
            let mut rng = trial_rng(108, i);
            let a = small_label(&mut rng, 12, 6);
            let b = small_label(&mut rng, 12, 6);
            let r1 = condition_i_residual(&rep, &target, &a, &state).map_err(|e| e.to_string())?;
            let r2 = condition_ii_residual(&rep, &target, &b, &state).map_err(|e| e.to_string())?;
            ensure(r1.abs() <= AMPLITUDE_TOL && r2.abs() <= AMPLITUDE_TOL, || {
                format!("(x,p)=({x},{p}), a={a}, b={b}: residuals {r1:e}, {r2:e}")
            })?;
        }
    }
    Ok(())
}

fn epsilon_dichotomy() -> Check {
    for eps in [Label::ratio(1, 2), Label::ratio(1, 10), Label::ratio(1, 100)] {
        let grid = grid_strategy(Label::zero(), Label::one(), &eps).map_err(|e| e.to_string())?;
        let mut rng = trial_rng(109, 0);
        let mut inputs = distinct_unit_labels(&mut rng, 99, 1 << 40);
        inputs.push(Label::one());
        let report = play_epsilon(
            &MetricDescriptor::unit_interval(),
            &EpsilonStrategy::Grid(grid),
            &eps,
            &inputs,
        )
        .map_err(|e| e.to_string())?;
        ensure(
            report.g.len() == 100 && report.g.iter().all(|&g| g == 1.0),
            || format!("eps {eps}: g = {:?}", report.g),
        )?;
    }
    for seed in 0..5u64 {
        let mut rng = trial_rng(109, 1 + seed);
        let strategy = random_strategy(&mut rng, 2, 3);
        let labels: Vec<Label> = (0..3).map(Label::integer).collect();
        let sharp = play_finite(&strategy, &[0, 1, 2]).map_err(|e| e.to_string())?;
        let relaxed = play_epsilon(
            &MetricDescriptor::Discrete,
            &EpsilonStrategy::Finite {
                strategy,
                outcomes: labels.clone(),
            },
            &Label::ratio(1, 2),
            &labels,
        )
        .map_err(|e| e.to_string())?;
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        ensure(
            relaxed.kind == sharp.kind
                && relaxed.dim == sharp.dim
                && relaxed.inputs == sharp.inputs
                && bits(&relaxed.g) == bits(&sharp.g)
                && relaxed.mean.to_bits() == sharp.mean.to_bits(),
            || format!("seed {seed}: {relaxed:?} vs {sharp:?}"),
        )?;
    }
    Ok(())
}

fn chain_roundtrip() -> Check {
    for sites in [4usize, 16, 64] {
        let unit = Label::dyadic(sites as u32);
        for i in 0..1000u64 {
            let mut rng = trial_rng(110, i);
            let x = if i % 2 == 0 {
                unit_interval_label(&mut rng, 1 << 40)
            } else {
                let w = wide_label(&mut rng, 200).abs();
                &w - &w.floor()
            };
            let d = chain_decode(&chain_encode(&x, sites).map_err(|e| e.to_string())?);
            let err = (&x - &d).abs();
            ensure(err < unit, || format!("N={sites}: x={x} decoded to {d}"))?;
        }
        for i in 0..250u64 {
            let mut rng = trial_rng(110, 10_000 + i);
            let x = dyadic_label(&mut rng, sites as u32);
            let d = chain_decode(&chain_encode(&x, sites).map_err(|e| e.to_string())?);
            ensure(d == x, || format!("N={sites}: dyadic {x} decoded to {d}"))?;
        }
    }
    Ok(())
}

fn cli_determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_nonsep");
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let runs: [&[&str]; 5] = [
        &["game-optimize", "--seed", "5"],
        &["epr-witness", "--trials", "100", "--theta", "3/5,4/5"],
        &["game-finite", "--trials", "50", "--seed", "2"],
        &["game-epsilon", "--metric", "discrete", "--seed", "4"],
        &["chain-roundtrip", "--sites", "64", "--trials", "200"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let out = dir.path().join(format!("run{i}.jsonl"));
        let status = Command::new(bin)
            .args(*args)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        ensure(status.code() == Some(0), || format!("{args:?} exited {status}"))?;
        let text = fs::read(&out).map_err(|e| e.to_string())?;
        let record = read_json_lines(text.as_slice())
            .map_err(|e| e.to_string())?
            .remove(0);
        for exec in [Execution::Sequential, Execution::Parallel] {
            let again = run(&record.config, exec).map_err(|e| e.to_string())?;
            ensure(again.aggregate == record.aggregate, || {
                format!("{args:?}: aggregate changed")
            })?;
            ensure(again.payload_sha256 == record.payload_sha256, || {
                format!("{args:?}: payload changed")
            })?;
        }
        let rerun = Command::new(bin)
            .arg("rerun")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(rerun.status.code() == Some(0), || {
            format!("rerun of {args:?} exited {}", rerun.status)
        })?;
    }

    for (fixture, code, pass) in [
        ("invalid_strategy.json", 1, false),
        ("valid_strategy.json", 0, true),
    ] {
        let out = dir.path().join(format!("{fixture}.jsonl"));
        let status = Command::new(bin)
            .args(["game-finite", "--strategy"])
            .arg(fixtures.join(fixture))
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        ensure(status.code() == Some(code), || {
            format!("{fixture}: exit {status}, expected {code}")
        })?;
        let text = fs::read(&out).map_err(|e| e.to_string())?;
        let record = read_json_lines(text.as_slice())
            .map_err(|e| e.to_string())?
            .remove(0);
        ensure(record.pass == pass, || {
            format!("{fixture}: pass = {}", record.pass)
        })?;
        let mut config = ExperimentConfig::new(ExperimentKind::GameFinite);
        config.strategy = Some(fixtures.join(fixture));
        let direct = run(&config, Execution::default()).map_err(|e| e.to_string())?;
        ensure(direct.aggregate == record.aggregate, || {
            format!("{fixture}: aggregate differs")
        })?;
    }
    Ok(())
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    check: fn() -> Check,
}

#[test]
fn acceptance_criteria() {
    let s = Duration::from_secs;
    let criteria = [
        Criterion {
            id: 1,
            name: "weyl relations, exact keys",
            budget: s(1),
            check: ccr_conformance,
        },
        Criterion {
            id: 2,
            name: "non-separable game, g = 1 exactly",
            budget: s(1),
            check: nonseparable_exact,
        },
        Criterion {
            id: 3,
            name: "finite strategies respect n/|X|",
            budget: s(5),
            check: separable_bound,
        },
        Criterion {
            id: 4,
            name: "n/|X| attained, never exceeded",
            budget: s(30),
            check: dimension_witness_attained,
        },
        Criterion {
            id: 5,
            name: "eigenbasis overlap dichotomy",
            budget: s(1),
            check: overlap_dichotomy,
        },
        Criterion {
            id: 6,
            name: "no conjugate eigenvectors",
            budget: s(1),
            check: no_momentum_eigenvectors,
        },
        Criterion {
            id: 7,
            name: "no EPR state in the product rep",
            budget: s(10),
            check: epr_witness,
        },
        Criterion {
            id: 8,
            name: "sum/difference EPR state",
            budget: s(1),
            check: gns_contrast,
        },
        Criterion {
            id: 9,
            name: "epsilon-game dichotomy",
            budget: s(5),
            check: epsilon_dichotomy,
        },
        Criterion {
            id: 10,
            name: "chain encoding roundtrip",
            budget: s(1),
            check: chain_roundtrip,
        },
        Criterion {
            id: 11,
            name: "cli determinism and exit status",
            budget: s(5),
            check: cli_determinism,
        },
    ];
    let mut failures = Vec::new();
    for c in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let verdict = match &outcome {
            Ok(()) if elapsed <= c.budget => Ok(()),
            Ok(()) => Err(format!("took {elapsed:.2?}, budget {:?}", c.budget)),
            Err(e) => Err(e.clone()),
        };
        match &verdict {
            Ok(()) => println!(
                "PASS  criterion {:>2}  {:<36} {:>9.3?} / {:?}",
                c.id, c.name, elapsed, c.budget
            ),
            Err(e) => {
                println!(
                    "FAIL  criterion {:>2}  {:<36} {:>9.3?} / {:?}  {e}",
                    c.id, c.name, elapsed, c.budget
                );
                failures.push(c.id);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
