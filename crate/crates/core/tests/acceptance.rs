//! Acceptance suite: one line per criterion, non-zero exit on any failure.

use std::f64::consts::{E, LN_2, TAU};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use distortia::acceptability::{alpha, AlphaStatus};
use distortia::choquet::{distorted_expectation, EmpiricalDistribution};
use distortia::generator::{
    concave_majorant_max, dual_generator, min_generators, scale_generator, sum_generators, Builtin, Generator,
};
use distortia::logarithm::{default_grid, existence_check, recover_generator, LogOptions, Verdict};
use distortia::portfolio::{angle, optimize, PortfolioOptions, ScenarioMatrix};
use distortia::properties::diagnose;
use distortia::semigroup::{
    build_semigroup, euler_composition, extract_generator, ClosedForm, DistortionFamily, Semigroup,
};
use distortia::{Distortion, Error};

const TIMES: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
const ACCURACY: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn xs41() -> impl Iterator<Item = f64> {
    (0..=40).map(|k| k as f64 / 40.0)
}

fn sg(g: &Generator) -> Semigroup {
    build_semigroup(g, ACCURACY).expect("semigroup builds")
}

fn builtin(b: Builtin) -> Generator {
    Generator::builtin(b)
}

fn dist(v: &[f64]) -> EmpiricalDistribution {
    EmpiricalDistribution::from_samples(v, None).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn max_diff(s: &Semigroup, oracle: impl Fn(f64, f64) -> f64) -> f64 {
    let mut worst = 0.0f64;
    for &t in &TIMES {
        for x in xs41() {
            worst = worst.max((s.psi(t, x).unwrap() - oracle(t, x)).abs());
        }
    }
    worst
}

fn closed_form_oracle() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for b in Builtin::ALL {
        let s = sg(&builtin(b));
        let fam = ClosedForm(b);
        worst = worst.max(max_diff(&s, |t, x| fam.value(t, x)));
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst <= 1e-6 && secs < 10.0, format!("max abs error {worst:.2e}, {secs:.2} s"))
}

fn semigroup_law() -> Outcome {
    let c = builtin(Builtin::Cvar);
    let a = builtin(Builtin::Aimax);
    let mut gens: Vec<(String, Generator)> = Builtin::ALL.iter().map(|&b| (b.to_string(), builtin(b))).collect();
    gens.push(("min(cvar,aimax)".into(), min_generators(&c, &a)));
    gens.push(("max(cvar,aimax)".into(), concave_majorant_max(&c, &a).unwrap()));
    gens.push(("mix(cvar,aimax)".into(), sum_generators(&c, &a)));
    let mut report = Vec::new();
    let mut worst_all = 0.0f64;
    for (name, g) in &gens {
        let s = sg(g);
        let mut worst = 0.0f64;
        for &t in &TIMES {
            for &u in &TIMES {
                for x in xs41() {
                    let lhs = s.psi(u, s.psi(t, x).unwrap()).unwrap();
                    worst = worst.max((lhs - s.psi(u + t, x).unwrap()).abs());
                }
            }
        }
        worst_all = worst_all.max(worst);
        report.push(format!("{name} {worst:.1e}"));
    }
    check(worst_all <= 1e-6, report.join(", "))
}

fn generator_extraction() -> Outcome {
    let mut worst = 0.0f64;
    for b in Builtin::ALL {
        let g = builtin(b);
        for k in 1..=19 {
            let x = 0.05 * k as f64;
            let e = extract_generator(&ClosedForm(b), x).map_err(|e| format!("{b} at {x}: {e}"))?;
            worst = worst.max(((e.value - g.eval(x)) / g.eval(x)).abs());
        }
    }
    check(worst <= 1e-4, format!("max relative error {worst:.2e}"))
}

fn euler_composition_check() -> Outcome {
    let g = builtin(Builtin::Cvar);
    let exact = E * 0.2;
    let errs: Vec<f64> =
        [16, 64, 256, 1024, 4096].iter().map(|&n| (euler_composition(&g, 1.0, n, 0.2).unwrap() - exact).abs()).collect();
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let compound = (euler_composition(&g, 1.0, 1000, 0.2).unwrap() - 1.001f64.powi(1000) * 0.2).abs();
    check(
        monotone && errs[4] <= 1e-3 && compound <= 1e-9,
        format!("errors {:?}, n=1000 vs compound growth {compound:.1e}", errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>()),
    )
}

fn logarithm_recovery() -> Outcome {
    let opts = LogOptions::default();
    let grid = default_grid();
    let mut parts = Vec::new();
    let mut ok = true;
    for b in [Builtin::Aimin, Builtin::Aimax, Builtin::Wang] {
        let psi = ClosedForm(b).at(1.0).unwrap();
        let rec = recover_generator(&psi, None, &grid, &opts).map_err(|e| format!("{b}: {e}"))?;
        let g = builtin(b);
        let rel = rec
            .estimates
            .iter()
            .filter(|e| (0.05..=0.95).contains(&e.x))
            .map(|e| ((e.g - g.eval(e.x)) / g.eval(e.x)).abs())
            .fold(0.0, f64::max);
        ok &= rel <= 1e-3 && rec.roundtrip_error <= 1e-3;
        parts.push(format!("{b} rel {rel:.1e} roundtrip {:.1e}", rec.roundtrip_error));
    }
    let kinked = Distortion::piecewise_linear(&[(0.5, 0.75)]).unwrap();
    let report = existence_check(&kinked, None, &grid, &opts).map_err(|e| e.to_string())?;
    let factor = report.recovery.jump.map_or(f64::NAN, |j| j.factor);
    ok &= report.verdict == Verdict::Rejected && (factor - 3.0).abs() <= 0.1;
    parts.push(format!("kinked: {:?} jump {factor:.6}", report.verdict));
    let cvar = ClosedForm(Builtin::Cvar).at(1.0).unwrap();
    let pre = matches!(recover_generator(&cvar, None, &grid, &opts), Err(Error::Precondition(_)));
    ok &= pre;
    parts.push(format!("cvar precondition error {pre}"));
    check(ok, parts.join("; "))
}

fn choquet_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mean_err = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(1..40);
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
        let d = EmpiricalDistribution::from_samples(&v, Some(&w)).unwrap();
        mean_err = mean_err.max((distorted_expectation(&d, &Distortion::identity()) - d.mean()).abs());
    }
    // Dyadic data keeps every operation exact.
    let v = [3.0, -7.0, 1.0, 12.0, -2.0, 5.0, 0.0, -4.0];
    let d = dist(&v);
    let mut sorted = v;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut exact = true;
    let mut flow_err = 0.0f64;
    let cvar = Arc::new(sg(&builtin(Builtin::Cvar)));
    for k in [1usize, 2, 4, 8, 3, 5] {
        let c = 8.0 / k as f64;
        let worst_k = sorted[..k].iter().sum::<f64>() / k as f64;
        let got = distorted_expectation(&d, &Distortion::clamp(c).unwrap());
        if k.is_power_of_two() {
            exact &= got == worst_k;
        } else {
            exact &= (got - worst_k).abs() <= 1e-14;
        }
        let via_flow = distorted_expectation(&d, &cvar.distortion_at(c.ln()).unwrap());
        flow_err = flow_err.max((via_flow - worst_k).abs());
    }
    let pair = distorted_expectation(&dist(&[-1.0, 3.0]), &Distortion::min_of_draws(2.0).unwrap());
    let pair_cf = distorted_expectation(&dist(&[-1.0, 3.0]), &ClosedForm(Builtin::Aimin).at(LN_2).unwrap());
    check(
        mean_err <= 1e-12 && exact && pair == 0.0 && pair_cf.abs() <= 1e-15 && flow_err <= 1e-8,
        format!("identity {mean_err:.1e}, tail means exact {exact} (flow {flow_err:.1e}), pair minimum {pair} ({pair_cf:.1e} via t = ln 2)"),
    )
}

fn index_correctness() -> Outcome {
    let tol = 1e-9;
    let cvar = sg(&builtin(Builtin::Cvar));
    let a = alpha(&cvar, &dist(&[-1.0, 3.0]), tol, 50.0).unwrap();
    let base_err = (a.value - 1.5f64.ln()).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sems: Vec<Semigroup> = Builtin::ALL.iter().map(|&b| sg(&builtin(b))).collect();
    let mut scale_exact = true;
    let mut violations = 0;
    for i in 0..1000 {
        let s = &sems[i % sems.len()];
        let n = rng.random_range(2..10);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..3.0)).collect();
        let y: Vec<f64> = x.iter().map(|&v| v + rng.random_range(0.0..0.5)).collect();
        let ax = alpha(s, &dist(&x), tol, 50.0).unwrap();
        let ay = alpha(s, &dist(&y), tol, 50.0).unwrap();
        if ax.value > ay.value + tol {
            violations += 1;
        }
        if i < 100 {
            let d = dist(&x);
            for lambda in [1e-6, 1.0, 1e6] {
                let al = alpha(s, &d.scaled(lambda).unwrap(), tol, 50.0).unwrap();
                scale_exact &= al.value == ax.value && al.status == ax.status;
            }
        }
    }
    let inf = alpha(&cvar, &dist(&[0.0, 1.0, 2.0]), tol, 50.0).unwrap().status == AlphaStatus::Infinite;
    let zero = alpha(&cvar, &dist(&[-3.0, 1.0]), tol, 50.0).unwrap();
    let zero = zero.value == 0.0 && zero.status == AlphaStatus::Zero;
    check(
        base_err <= 1e-6 && scale_exact && violations == 0 && inf && zero,
        format!(
            "alpha(-1,3) error {base_err:.1e}, scale exact {scale_exact}, monotonicity violations {violations}/1000, infinite {inf}, zero {zero}"
        ),
    )
}

fn duality_algebra() -> Outcome {
    let dual_aimin = sg(&dual_generator(&builtin(Builtin::Aimin)));
    let d1 = max_diff(&dual_aimin, |t, x| ClosedForm(Builtin::Aimax).value(t, x));
    let dual_cvar = sg(&dual_generator(&builtin(Builtin::Cvar)));
    let d2 = max_diff(&dual_cvar, |t, x| {
        if x == 0.0 {
            // Right limit at 0.
            1.0 - (-t).exp()
        } else {
            (-t).exp() * x + 1.0 - (-t).exp()
        }
    });

    let c = builtin(Builtin::Cvar);
    let a = builtin(Builtin::Aimax);
    let (sc, sa) = (sg(&c), sg(&a));
    let smin = sg(&min_generators(&c, &a));
    let smax = sg(&concave_majorant_max(&c, &a).unwrap());
    let mut order = 0.0f64;
    for &t in &TIMES {
        for x in xs41() {
            let (pc, pa) = (sc.psi(t, x).unwrap(), sa.psi(t, x).unwrap());
            order = order.max(smin.psi(t, x).unwrap() - pc.min(pa));
            order = order.max(pc.max(pa) - smax.psi(t, x).unwrap());
        }
    }

    let tol = 1e-9;
    let mut scale_err = 0.0f64;
    for b in Builtin::ALL {
        let g = builtin(b);
        let base = alpha(&sg(&g), &dist(&[-1.0, 3.0]), tol, 50.0).unwrap().value;
        for lambda in [0.5, 2.0, 3.0] {
            let scaled = alpha(&sg(&scale_generator(lambda, &g).unwrap()), &dist(&[-1.0, 3.0]), tol, 50.0).unwrap();
            scale_err = scale_err.max((scaled.value - base / lambda).abs());
        }
    }
    check(
        d1 <= 1e-6 && d2 <= 1e-6 && order <= 1e-8 && scale_err <= 2.0 * tol,
        format!("dual(aimin) {d1:.1e}, dual(cvar) {d2:.1e}, order slack {order:.1e}, scaled index {scale_err:.1e}"),
    )
}

fn property_table() -> Outcome {
    // Rows of the published table, I to IV.
    let published = [("cvar", "+---"), ("aimin", "++--"), ("aimax", "+++-"), ("wang", "++++")];
    let mut ok = true;
    let mut parts = Vec::new();
    for (b, (name, row)) in Builtin::ALL.into_iter().zip(published) {
        let r = diagnose(&builtin(b)).map_err(|e| e.to_string())?;
        let signs = r.signs();
        ok &= signs[..3] == row[..3];
        if matches!(b, Builtin::Cvar | Builtin::Aimin) {
            ok &= &signs[3..] == "+" && !r.notes.is_empty();
        } else {
            ok &= signs[3..] == row[3..];
        }
        parts.push(format!("{name} {signs}"));
    }
    check(ok, format!("{} (IV for cvar/aimin follows the endpoint criteria, noted)", parts.join(", ")))
}

fn portfolio_check() -> Outcome {
    let s = sg(&builtin(Builtin::Aimin));
    let vals = [-1.0, -0.2, 0.6, 1.5];
    let ps = [0.2, 0.3, 0.3, 0.2];
    let mut gains = Vec::new();
    let mut probs = Vec::new();
    for (&a, &pa) in vals.iter().zip(&ps) {
        for (&b, &pb) in vals.iter().zip(&ps) {
            gains.push(vec![a, b]);
            probs.push(pa * pb);
        }
    }
    let m = ScenarioMatrix::new(gains, probs).unwrap();
    let sol = optimize(&s, &m, &PortfolioOptions::default()).map_err(|e| e.to_string())?;
    let target = [0.5f64.sqrt(); 2];
    let worst_angle = sol.starts.iter().map(|r| angle(&r.direction, &target)).fold(0.0, f64::max);
    let mut grid_best = 0.0f64;
    for k in 0..3600 {
        let th = k as f64 * TAU / 3600.0;
        let d = m.portfolio(&[th.cos(), th.sin()]).unwrap();
        grid_best = grid_best.max(alpha(&s, &d, 1e-9, 50.0).unwrap().value);
    }
    let gap = (grid_best - sol.alpha_star).abs();
    let zero_mean = ScenarioMatrix::uniform(vec![vec![-1.0, 2.0], vec![1.0, -2.0], vec![0.0, 0.0]]).unwrap();
    let z = optimize(&s, &zero_mean, &PortfolioOptions::default()).map_err(|e| e.to_string())?;
    check(
        sol.starts.len() == 16 && worst_angle <= 1e-2 && gap <= 2e-3 && z.alpha_star == 0.0,
        format!(
            "alpha* {:.6}, worst start angle {worst_angle:.1e} rad, grid oracle gap {gap:.1e}, zero-mean alpha* {}",
            sol.alpha_star, z.alpha_star
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("closed-form oracle equivalence", closed_form_oracle),
        ("semigroup law", semigroup_law),
        ("generator extraction", generator_extraction),
        ("Euler composition", euler_composition_check),
        ("logarithm recovery", logarithm_recovery),
        ("Choquet correctness", choquet_correctness),
        ("index correctness", index_correctness),
        ("duality and algebra", duality_algebra),
        ("property table", property_table),
        ("portfolio", portfolio_check),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
