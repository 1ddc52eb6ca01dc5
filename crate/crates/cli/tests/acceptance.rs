//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use rtgrowth::analysis::{continuity_probe, sweep_theta, threshold_check, ThetaSweep, DEFAULT_FRACTIONS};
use rtgrowth::fixedpoint::{bvp_residual, solve_lambda, GrowthResult};
use rtgrowth::model::{theta_critical, upper_bound_m, lower_layer_bound};
use rtgrowth::modeforms::interface_ratio_profile;
use rtgrowth::oracle::dispersion_curve;
use rtgrowth::pencil::assemble_sq;
use rtgrowth::spectrum::{alpha_curve, global_alpha};
use rtgrowth::{Discretization, FluidConfig};
use rtgrowth_cli::verify::trace_inequalities;

const N: usize = 128;
const FP_TOL: f64 = 1e-8;

type Outcome = Result<String, String>;

fn disc(n: usize) -> Discretization {
    Discretization::new(n).unwrap()
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

struct Shared {
    cfg: FluidConfig,
    theta_c: f64,
    growth: Vec<GrowthResult>,
    sweep: Option<ThetaSweep>,
}

impl Shared {
    fn growth(&mut self) -> &[GrowthResult] {
        if self.growth.is_empty() {
            for t in [0.0, 0.5 * self.theta_c] {
                self.growth
                    .push(solve_lambda(&self.cfg.with_theta(t), disc(N), FP_TOL).unwrap());
            }
        }
        &self.growth
    }

    fn sweep(&mut self) -> &ThetaSweep {
        let cfg = self.cfg;
        self.sweep
            .get_or_insert_with(|| sweep_theta(&cfg, &DEFAULT_FRACTIONS, disc(N), FP_TOL).unwrap())
    }
}

fn fixed_point_certificate(sh: &mut Shared) -> Outcome {
    let cfg = sh.cfg;
    let mut detail = Vec::new();
    let mut ok = true;
    for r in sh.growth() {
        // alpha recomputed from scratch, not taken from the solver's last probe
        let a = global_alpha(&cfg.with_theta(r.theta), r.lambda, disc(N)).unwrap();
        let res = (r.lambda * r.lambda - a.alpha).abs() / (r.lambda * r.lambda).max(1.0);
        ok &= res <= FP_TOL;
        detail.push(format!("theta {}: lambda {} residual {res:e}", r.theta, r.lambda));
    }
    ensure(ok, detail.join("; "))
}

fn oracle_equivalence(sh: &mut Shared) -> Outcome {
    let ks = [1.0, std::f64::consts::SQRT_2, 2.0];
    let (mut worst, mut worst_x) = (0.0f64, 0.0f64);
    let mut roots = 0;
    let mut ok = true;
    for t in [0.0, 0.5 * sh.theta_c] {
        for r in dispersion_curve(&sh.cfg.with_theta(t), &ks, disc(N), 1e-10, true).unwrap() {
            match (r.rel_diff, r.rel_diff_extrapolated) {
                (Some(a), Some(b)) => {
                    roots += 1;
                    worst = worst.max(a);
                    worst_x = worst_x.max(b);
                }
                _ => ok &= r.lambda_oracle.is_none() && r.lambda_variational.is_none(),
            }
        }
    }
    ok &= roots > 0 && worst <= 5e-5 && worst_x <= 1e-6;
    ensure(
        ok,
        format!("{roots} growing modes, max rel diff {worst:e} (N=128), {worst_x:e} (extrapolated)"),
    )
}

fn bound_reproduction(sh: &mut Shared) -> Outcome {
    let cfg = sh.cfg;
    let m0 = upper_bound_m(&cfg).unwrap();
    let wt = lower_layer_bound(&cfg);
    let s = sh.sweep();
    let worst = s
        .points
        .iter()
        .map(|p| p.lambda / p.bound_m)
        .fold(0.0, f64::max);
    ensure(
        s.within_bound() && (m0 - 12.4336).abs() / 12.4336 < 1e-3 && m0 <= wt,
        format!("max lambda/m {worst}, m(0) {m0}, h- g [rho] / (4 mu-) {wt}"),
    )
}

fn monotonicity(sh: &mut Shared) -> Outcome {
    let cfg = sh.cfg;
    let tc = sh.theta_c;
    let grid: Vec<f64> = (1..=10).map(|i| 0.5 * i as f64).collect();
    let curve = alpha_curve(&cfg, &grid, disc(N)).unwrap();
    let a: Vec<f64> = curve.samples.iter().map(|v| v.alpha).collect();
    let alpha_ok = a.windows(2).all(|w| w[1] < w[0]);
    let sweep_ok = sh.sweep().strictly_decreasing();
    let c = continuity_probe(&cfg, 0.5 * tc, &[1e-2 * tc, 1e-3 * tc], disc(N), 1e-10).unwrap();
    ensure(
        alpha_ok && sweep_ok && c.ordering_holds(),
        format!(
            "alpha decreasing {alpha_ok}, sweep decreasing {sweep_ok}, continuity ordering {} (modulus {})",
            c.ordering_holds(),
            c.modulus
        ),
    )
}

fn threshold(sh: &mut Shared) -> Outcome {
    let stable = threshold_check(&sh.cfg, &[1.0, 1.01, 2.0], disc(N), FP_TOL).unwrap();
    let near = sweep_theta(&sh.cfg, &[0.999], disc(N), FP_TOL).unwrap();
    let p = &near.points[0];
    ensure(
        stable.iter().all(|&(_, s)| s) && p.lambda > 0.0 && p.lambda <= p.bound_m,
        format!("stable {stable:?}; at 0.999 theta_c lambda {} <= m {}", p.lambda, p.bound_m),
    )
}

fn interface_energy_ratio(sh: &mut Shared) -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (l1, l2) in [(1.0, 1.0), (3.0, 1.0), (1.0, 2.0)] {
        let cfg = FluidConfig { l1, l2, ..sh.cfg };
        let (_, ratio) = interface_ratio_profile(&cfg).unwrap();
        let want = cfg.max_period_sq();
        ok &= (ratio - want).abs() <= 1e-12 * want;
        detail.push(format!("({l1},{l2}) -> {ratio}"));
    }
    ensure(ok, detail.join(", "))
}

fn trace_suite(sh: &mut Shared) -> Outcome {
    let c = trace_inequalities(&sh.cfg, 1000).unwrap();
    ensure(c.pass, c.detail)
}

fn discretization(sh: &mut Shared) -> Outcome {
    let cfg = sh.cfg;
    let mut alphas = Vec::new();
    let mut worst_eigen: f64 = 0.0;
    for n in [8, 16, 32, 64, 128] {
        let v = global_alpha(&cfg, 1.0, disc(n)).unwrap();
        let forms = assemble_sq(v.argmax_k_sq, &cfg, disc(n)).unwrap();
        worst_eigen = worst_eigen.max(v.eigen.residual / forms.residual_scale(1.0, v.alpha));
        alphas.push(v.alpha);
    }
    let nondecreasing = alphas.windows(2).all(|w| w[1] >= w[0]);
    let fine = &sh.growth()[0];
    let r128 = bvp_residual(fine, &cfg).unwrap();
    let coarse: Vec<f64> = [32, 64]
        .iter()
        .map(|&n| bvp_residual(&solve_lambda(&cfg, disc(n), FP_TOL).unwrap(), &cfg).unwrap())
        .collect();
    let decreasing = coarse[0] > coarse[1] && coarse[1] > r128;
    ensure(
        nondecreasing && worst_eigen <= 1e-9 && decreasing && r128 < 1e-4,
        format!(
            "alpha(1) over N {alphas:?}; eigen residual {worst_eigen:e}; bvp residual {:e}, {:e}, {r128:e}",
            coarse[0], coarse[1]
        ),
    )
}

fn determinism(_: &mut Shared) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ref.json");
    std::fs::write(&cfg, serde_json::to_string(&FluidConfig::reference()).unwrap()).unwrap();
    let mut outputs = Vec::new();
    for jobs in ["1", "8"] {
        let out = dir.path().join(format!("sweep{jobs}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_rtgrowth"))
            .args(["sweep-theta", "--config"])
            .arg(&cfg)
            .args(["--jobs", jobs, "--out"])
            .arg(&out)
            .status()
            .unwrap();
        if !status.success() {
            return Err(format!("sweep-theta --jobs {jobs} exited with {status}"));
        }
        let mut report = out.clone().into_os_string();
        report.push(".report.json");
        outputs.push((std::fs::read(&out).unwrap(), std::fs::read(report).unwrap()));
    }
    ensure(
        outputs[0] == outputs[1],
        format!("{} csv bytes, {} report bytes", outputs[0].0.len(), outputs[0].1.len()),
    )
}

fn main() {
    let cfg = FluidConfig::reference();
    let mut shared = Shared {
        cfg,
        theta_c: theta_critical(&cfg),
        growth: Vec::new(),
        sweep: None,
    };
    let criteria: [(&str, fn(&mut Shared) -> Outcome); 9] = [
        ("fixed-point certificate", fixed_point_certificate),
        ("oracle equivalence", oracle_equivalence),
        ("bound reproduction", bound_reproduction),
        ("monotonicity suites", monotonicity),
        ("threshold behavior", threshold),
        ("interface energy ratio", interface_energy_ratio),
        ("trace inequalities", trace_suite),
        ("discretization soundness", discretization),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| f(&mut shared)))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {} {name}: PASS ({secs:.1}s) {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({secs:.1}s) {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
