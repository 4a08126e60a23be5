//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gscqc::fullsim::{monte_carlo, phase_kickback, run_shot_cooling, MonteCarloConfig};
use gscqc::optimizer::{default_params, optimize_params};
use gscqc::protocol::{
    copies_needed, gap_model_probability, measurement_bound, min_gap_probability, min_measurements,
    run_cooling, run_schedule, strategy_one, StrategyOneConfig,
};
use gscqc::thermal::{SpectrumModel, SplitAssignment, ThermalSpec};
use gscqc::verify::{
    cooling_discrepancy, random_oracle_state, random_params, run_all, VerifyConfig,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within_time(elapsed: Duration, limit: f64, detail: String) -> Outcome {
    let secs = elapsed.as_secs_f64();
    if secs < limit {
        Ok(format!("{detail}; {secs:.3}s < {limit}s"))
    } else {
        Err(format!("{detail}; took {secs:.3}s, limit {limit}s"))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn optimal_parameters() -> Outcome {
    let start = Instant::now();
    let r = optimize_params(2.0 * PI, 1).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure((0.058..=0.061).contains(&r.gamma), || {
        format!("gamma = {}", r.gamma)
    })?;
    ensure((0.235..=0.237).contains(&r.delta), || {
        format!("delta = {}", r.delta)
    })?;
    ensure((r.b0 - 1.0).abs() <= 1e-9, || format!("b0 = {}", r.b0))?;
    ensure((r.b2 - 0.0609).abs() <= 0.0005, || format!("b2 = {}", r.b2))?;
    within_time(
        elapsed,
        1.0,
        format!(
            "gamma={:.6} delta={:.6} |b0-1|={:.1e} b2={:.5}",
            r.gamma,
            r.delta,
            (r.b0 - 1.0).abs(),
            r.b2
        ),
    )
}

fn fig2_anchor() -> Outcome {
    let start = Instant::now();
    let spec = ThermalSpec::new(1e23, 0.0);
    let r = run_cooling(&spec, &default_params(), 3).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let detail = format!(
        "cooling={:.10} survival={:.10}",
        r.cooling_probability, r.survival_probability
    );
    ensure((0.9995..1.0).contains(&r.cooling_probability), || {
        format!("{detail}; cooling outside [0.9995, 1)")
    })?;
    ensure((0.4999..=0.5001).contains(&r.survival_probability), || {
        format!("{detail}; survival outside [0.4999, 0.5001]")
    })?;
    within_time(elapsed, 1.0, detail)
}

fn strategy_one_certainty() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut fid_err, mut dense_err) = (0.0f64, 0.0f64);
    for case in 0..200 {
        let p0 = 1.0 - rng.random_range(0.0..1.0);
        let p0 = if p0 >= 1.0 { 0.5 } else { p0 };
        let cfg = StrategyOneConfig {
            delta1: 0.3 - rng.random_range(0.0..0.3),
            delta2: 0.3 - rng.random_range(0.0..0.3),
            j1: rng.random_range(0..3),
            j2: rng.random_range(0..3),
        };
        let big = strategy_one(&ThermalSpec::with_p0(1e23, p0), &cfg).map_err(|e| e.to_string())?;
        fid_err = fid_err.max((big.report.conditional_fidelity - 1.0).abs());
        ensure(big.p_success <= p0, || {
            format!("case {case}: p_success {} > p0 {p0}", big.p_success)
        })?;
        let spec8 = ThermalSpec::with_p0(8.0, p0);
        let small = strategy_one(&spec8, &cfg).map_err(|e| e.to_string())?;
        let w = rng.random_range(0..8);
        let dense = run_shot_cooling(&spec8, w, &cfg.stages()).map_err(|e| e.to_string())?;
        dense_err = dense_err
            .max((dense.cooling_probability - small.report.cooling_probability).abs())
            .max((dense.survival_probability - small.report.survival_probability).abs())
            .max((dense.conditional_fidelity - 1.0).abs());
    }
    let elapsed = start.elapsed();
    ensure(fid_err <= 1e-12, || format!("fidelity error {fid_err:.3e}"))?;
    ensure(dense_err <= 1e-10, || {
        format!("dense discrepancy {dense_err:.3e}")
    })?;
    within_time(
        elapsed,
        10.0,
        format!("200 configs, max |F-1|={fid_err:.1e}, dense N=8 err={dense_err:.1e}"),
    )
}

fn copies_calculus() -> Outcome {
    let a = copies_needed(0.5, 0.99).map_err(|e| e.to_string())?;
    let b = copies_needed(0.1, 0.99).map_err(|e| e.to_string())?;
    ensure(a == 7 && b == 44, || format!("got {a} and {b}"))?;
    Ok(format!("K(0.5)={a} K(0.1)={b}"))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut err = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(4..=32usize);
        let w = rng.random_range(0..n);
        let dt = rng.random_range(0.0..9.0);
        let m = rng.random_range(0..=5usize);
        let stages = vec![random_params(&mut rng); m];
        let spec = ThermalSpec::new(n as f64, dt);
        err = err.max(cooling_discrepancy(w, &spec, &stages).map_err(|e| e.to_string())?);
    }
    let elapsed = start.elapsed();
    ensure(err <= 1e-10, || format!("max discrepancy {err:.3e}"))?;
    within_time(
        elapsed,
        60.0,
        format!("100 cases, max discrepancy {err:.1e}"),
    )
}

fn bound_dominance() -> Outcome {
    let params = default_params();
    let b2 = params.retention(1.0, 1.0);
    let mut cells = 0;
    for n in [1e6, 1e12, 1e23] {
        for dt in [0.0, 1.0, 3.0, 9.0] {
            for target in [0.5, 0.9] {
                let spec = ThermalSpec::new(n, dt);
                let Ok(bound) = measurement_bound(&spec, b2, target) else {
                    continue;
                };
                let m = min_measurements(&spec, &params, target).map_err(|e| e.to_string())?;
                ensure(f64::from(m) <= bound.ceil(), || {
                    format!("N={n:e} dT={dt} P={target}: M_min {m} > ceil({bound})")
                })?;
                cells += 1;
            }
        }
    }
    let anchor =
        min_measurements(&ThermalSpec::new(1e23, 1.0), &params, 0.9).map_err(|e| e.to_string())?;
    ensure(anchor == 11, || format!("anchor M_min = {anchor}"))?;
    Ok(format!("{cells} cells dominated, anchor M_min=11"))
}

fn monte_carlo_consistency() -> Outcome {
    let spec = ThermalSpec::new(16.0, 0.0);
    let stages = [default_params(); 3];
    let cfg = MonteCarloConfig::new(10_000, 42);
    let stats = monte_carlo(&spec, 0, &stages, &cfg).map_err(|e| e.to_string())?;
    let analytic = run_schedule(&spec, &stages).map_err(|e| e.to_string())?;
    let (ps, pf) = (analytic.survival_probability, analytic.conditional_fidelity);
    let zs = (stats.empirical_survival() - ps).abs() / stats.survival_sigma(ps);
    let zf = (stats.empirical_fidelity() - pf).abs() / stats.fidelity_sigma(pf);
    ensure(zs <= 3.0 && zf <= 3.0, || {
        format!("survival z={zs:.2}, fidelity z={zf:.2}")
    })?;
    let again = monte_carlo(&spec, 0, &stages, &cfg).map_err(|e| e.to_string())?;
    ensure(again == stats, || "rerun differs".to_string())?;
    let run = || {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = gscqc::cli::run(
            [
                "gscqc",
                "trajectory",
                "--N",
                "16",
                "--trials",
                "10000",
                "--seed",
                "42",
            ],
            &mut out,
            &mut err,
        );
        (code, out)
    };
    let (c1, a) = run();
    let (c2, b) = run();
    ensure(c1 == 0 && c2 == 0 && a == b, || {
        "CSV reruns differ".to_string()
    })?;
    Ok(format!(
        "survival z={zs:.2}, fidelity z={zf:.2}, reruns byte-identical"
    ))
}

fn gap_model() -> Outcome {
    let params = default_params();
    let mut reduce = 0.0f64;
    for dt in [0.0, 1.0, 3.0, 9.0] {
        let spec = ThermalSpec::new(1e23, dt);
        let degenerate = run_cooling(&spec, &params, 4).map_err(|e| e.to_string())?;
        let at_zero = min_gap_probability(&spec, &params, 4, 0.0).map_err(|e| e.to_string())?;
        reduce = reduce.max((at_zero - degenerate.cooling_probability).abs());
    }
    ensure(reduce <= 1e-12, || {
        format!("r=0 reduction error {reduce:.3e}")
    })?;

    let spec = ThermalSpec::new(1e23, 0.0);
    let mut worst = 1.0f64;
    for i in 0..=50 {
        let r = i as f64 * 0.001;
        worst = worst.min(min_gap_probability(&spec, &params, 4, r).map_err(|e| e.to_string())?);
    }
    ensure(worst > 0.9, || format!("minimum {worst} for r <= 0.05"))?;

    let mut dense = 0.0f64;
    for dt in [0.0, 1.0] {
        for r in [0.0, 0.01, 0.03, 0.05, 0.1] {
            for assignment in SplitAssignment::corners() {
                let spec = ThermalSpec::new(16.0, dt)
                    .with_spectrum(SpectrumModel::Split { r, assignment });
                let full = run_shot_cooling(&spec, 5, &[params; 4]).map_err(|e| e.to_string())?;
                let block = gap_model_probability(&spec, &params, 4).map_err(|e| e.to_string())?;
                dense = dense.max((full.cooling_probability - block).abs());
            }
        }
    }
    ensure(dense <= 1e-10, || format!("dense discrepancy {dense:.3e}"))?;
    Ok(format!(
        "r=0 err={reduce:.1e}, min over r<=0.05 = {worst:.6}, dense N=16 err={dense:.1e}"
    ))
}

fn kickback() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut p_err, mut f_err) = (0.0f64, 0.0f64);
    for n in [4, 8] {
        for _ in 0..50 {
            let psi = random_oracle_state(&mut rng, n);
            let w = rng.random_range(0..n);
            let out = phase_kickback(&psi, w).map_err(|e| e.to_string())?;
            p_err = p_err.max((out.p_g - psi[w].norm_sqr()).abs());
            let post = out.post_g.ok_or("no post-measurement state")?;
            let norm: f64 = post.iter().map(|a| a.norm_sqr()).sum();
            f_err = f_err.max((post[w].norm_sqr() / norm - 1.0).abs());
        }
    }
    ensure(p_err <= 1e-12 && f_err <= 1e-12, || {
        format!("p_g error {p_err:.3e}, fidelity error {f_err:.3e}")
    })?;
    Ok(format!(
        "100 states, p_g err={p_err:.1e}, fidelity err={f_err:.1e}"
    ))
}

fn verify_suite() -> Outcome {
    let start = Instant::now();
    let results = run_all(&VerifyConfig::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name)
        .collect();
    ensure(failed.is_empty(), || {
        format!("failed checks: {}", failed.join(", "))
    })?;
    within_time(elapsed, 300.0, format!("{} checks passed", results.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC1 optimal parameters", optimal_parameters),
        ("AC2 cooling anchor at N=1e23, M=3", fig2_anchor),
        ("AC3 swap-protocol certainty", strategy_one_certainty),
        ("AC4 copies calculus", copies_calculus),
        ("AC5 block vs dense equivalence", oracle_equivalence),
        ("AC6 measurement bound dominance", bound_dominance),
        ("AC7 Monte Carlo consistency", monte_carlo_consistency),
        ("AC8 split-spectrum reduction and continuity", gap_model),
        ("AC9 phase kickback", kickback),
        ("AC10 verify suite runtime", verify_suite),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
