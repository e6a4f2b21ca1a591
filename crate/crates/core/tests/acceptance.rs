//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails or overruns its time budget.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use polya_cert::bounds::{self, VerifyOptions};
use polya_cert::geometry::{ConvexPolygon, Point};
use polya_cert::lattice::find_shift;
use polya_cert::special_functions::{bessel_zero, j0_zero, lemma21_gap};
use polya_cert::spectrum::{pairs_for_lambda, NeumannSpectrum};
use polya_cert::test_functions::{rayleigh_quotient, TestProfile, DEFAULT_N_ANGLES, DEFAULT_N_RADIAL};

// Independent oracles: plain ascending series for integer orders and Newton
// iteration on them. Accurate to ~1e-15 for x ≤ 4.

fn series_j(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..60 {
        term *= -half * half / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn newton(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, mut x: f64) -> f64 {
    for _ in 0..50 {
        let step = f(x) / df(x);
        x -= step;
        if step.abs() < 1e-16 * x.abs() {
            break;
        }
    }
    x
}

/// First zero of J₀ (J₀' = −J₁).
fn oracle_j0() -> f64 {
    newton(|x| series_j(0, x), |x| -series_j(1, x), 2.4)
}

/// First positive zero of J₁' = J₀ − J₁/x, with (J₁')' = −J₁ − J₁'/x + J₁/x².
fn oracle_j1_prime() -> f64 {
    let dj1 = |x: f64| series_j(0, x) - series_j(1, x) / x;
    newton(dj1, |x| -series_j(1, x) - dj1(x) / x + series_j(1, x) / (x * x), 1.8)
}

/// Sorted `π²(m² + n²)` for the unit square, by brute force.
fn square_eigenvalues(cutoff: f64) -> Vec<f64> {
    let mut v = Vec::new();
    for m in 0..100u32 {
        for n in 0..100u32 {
            let mu = PI * PI * f64::from(m * m + n * n);
            if mu <= cutoff {
                v.push(mu);
            }
        }
    }
    v.sort_by(f64::total_cmp);
    v
}

fn check(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn c1_coefficients() -> Result<String, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = polya_cert::cli::run_with(["polya-cert", "bounds"], &mut out, &mut err);
    check(code == 0, format!("bounds exited {code}"))?;
    let text = String::from_utf8(out).map_err(|e| e.to_string())?;
    let expected = [("kroger", 1.0 / (8.0 * PI), "0.0398"), ("convex", 0.0, "0.0499"), ("polya", 1.0 / (4.0 * PI), "0.0796")];
    let mut shown = Vec::new();
    for (name, exact, printed) in expected {
        let line = text
            .lines()
            .find(|l| l.starts_with(&format!("{name},")))
            .ok_or_else(|| format!("no {name} row in {text:?}"))?;
        let cells: Vec<&str> = line.split(',').collect();
        let value: f64 = cells[2].parse().map_err(|_| format!("bad value in {line}"))?;
        check(cells[3] == printed, format!("{name} printed {} not {printed}", cells[3]))?;
        if exact > 0.0 {
            check((value - exact).abs() < 1e-11 * exact, format!("{name} = {value}, expected {exact}"))?;
        } else {
            let oracle = 1.0 / (2.0 * 3f64.sqrt() * oracle_j0().powi(2));
            check((value - oracle).abs() < 1e-11 * oracle, format!("{name} = {value}, expected {oracle}"))?;
        }
        shown.push(cells[3].to_string());
    }
    Ok(shown.join(" / "))
}

fn c2_j0() -> Result<String, String> {
    let j0 = j0_zero();
    let oracle = oracle_j0();
    check((oracle - 2.404_825_557_695_773).abs() < 1e-14, format!("oracle drifted: {oracle}"))?;
    check((j0 - oracle).abs() <= 1e-10, format!("j0 = {j0}, oracle {oracle}"))?;
    check(format!("{j0:.4}") == "2.4048", format!("j0 rounds to {j0:.4}"))?;
    Ok(format!("j0 = {j0:.15}, |j0 − oracle| = {:.1e}", (j0 - oracle).abs()))
}

fn c3_lemma() -> Result<String, String> {
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut equality: f64 = 0.0;
    for nu in [0.0, 0.5, 1.0, 2.0] {
        let jn = bessel_zero(nu).map_err(|e| e.to_string())?;
        for i in 1..=10 {
            let s = jn * i as f64 / 10.0;
            let g = lemma21_gap(nu, s).map_err(|e| e.to_string())?;
            check(g.lhs <= g.rhs + 1e-9, format!("ν={nu} s={s}: lhs {} > rhs {}", g.lhs, g.rhs))?;
            worst = worst.max(g.lhs - g.rhs);
            if i == 10 {
                let gap = (g.lhs - g.rhs).abs();
                check(gap <= 1e-8, format!("ν={nu}: |lhs − rhs| = {gap:e} at s = j_ν"))?;
                equality = equality.max(gap);
            }
        }
    }
    Ok(format!("max(lhs − rhs) = {worst:.2e}, max |lhs − rhs| at j_ν = {equality:.1e}"))
}

fn c4_equality_case() -> Result<String, String> {
    let p = ConvexPolygon::rectangle(4.0, 4.0).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (r, c) in [(0.5, Point::new(2.0, 2.0)), (1.0, Point::new(1.5, 2.5)), (1.9, Point::new(2.0, 2.0))] {
        let tp = TestProfile::planar(r).map_err(|e| e.to_string())?;
        let q = rayleigh_quotient(&tp, &p, c, DEFAULT_N_ANGLES, DEFAULT_N_RADIAL).map_err(|e| e.to_string())?;
        let exact = oracle_j0().powi(2) / (r * r);
        let rel = (q.quotient - exact).abs() / exact;
        check(rel <= 1e-8, format!("r = {r}: quotient {} vs j0²/r² = {exact} (rel {rel:e})", q.quotient))?;
        worst = worst.max(rel);
    }
    Ok(format!("max relative deviation from j0²/r² = {worst:.1e}"))
}

fn c5_packing() -> Result<String, String> {
    let square = ConvexPolygon::rectangle(1.0, 1.0).map_err(|e| e.to_string())?;
    let mut shown = Vec::new();
    for r in [0.05, 0.1, 0.2] {
        let need = (1.0 / (2.0 * 3f64.sqrt() * r * r)).ceil() as usize;
        let pack = find_shift(&square, r).map_err(|e| e.to_string())?;
        check(pack.points.len() >= need, format!("r = {r}: {} points < {need}", pack.points.len()))?;
        for (i, a) in pack.points.iter().enumerate() {
            check(square.contains(*a), format!("r = {r}: point {a:?} outside"))?;
            for b in &pack.points[i + 1..] {
                let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
                check(d >= 2.0 * r * (1.0 - 1e-12), format!("r = {r}: points {d} apart"))?;
            }
        }
        if r == 0.1 {
            check(pack.points.len() >= 29, "r = 0.1 needs ≥ 29 points".into())?;
        }
        shown.push(format!("r={r}: {} ≥ {need}", pack.points.len()));
    }
    Ok(shown.join(", "))
}

fn c6_analytic() -> Result<String, String> {
    let square = ConvexPolygon::rectangle(1.0, 1.0).map_err(|e| e.to_string())?;
    let spectrum = NeumannSpectrum::rectangle_analytic(1.0, 1.0, 500.0).map_err(|e| e.to_string())?;
    let oracle = square_eigenvalues(500.0);
    let mut shown = Vec::new();
    for lambda in [25.0, 100.0, 400.0] {
        let n_oracle = oracle.iter().filter(|&&mu| mu <= lambda).count();
        let bound = lambda / (2.0 * 3f64.sqrt() * oracle_j0().powi(2));
        let report = bounds::verify_main_theorem(&square, lambda, &spectrum, &VerifyOptions::default())
            .map_err(|e| e.to_string())?;
        check(report.n_n == n_oracle, format!("λ = {lambda}: N_N = {} vs oracle {n_oracle}", report.n_n))?;
        check((report.convex - bound).abs() < 1e-10 * bound, format!("λ = {lambda}: bound {}", report.convex))?;
        check(report.pass && n_oracle as f64 >= bound, format!("λ = {lambda}: {n_oracle} < {bound}"))?;
        shown.push(format!("λ={lambda}: {n_oracle} ≥ {bound:.2}"));
    }
    check(oracle.iter().filter(|&&mu| mu <= 100.0).count() == 13, "N_N(100) ≠ 13".into())?;
    Ok(shown.join(", "))
}

fn c7_fem() -> Result<String, String> {
    let square = ConvexPolygon::rectangle(1.0, 1.0).map_err(|e| e.to_string())?;
    let fem = NeumannSpectrum::fem(&square, 0.02, 11).map_err(|e| e.to_string())?;
    let exact = square_eigenvalues(200.0);
    let mut worst: f64 = 0.0;
    for k in 2..=11 {
        let mu = fem.mu(k).ok_or("missing eigenvalue")?;
        let rel = (mu - exact[k - 1]).abs() / exact[k - 1];
        check(rel <= 0.01, format!("square μ_{k} = {mu} vs {} (rel {rel:.2e})", exact[k - 1]))?;
        worst = worst.max(rel);
    }
    let disk = ConvexPolygon::disk(1.0, 256).map_err(|e| e.to_string())?;
    let fem = NeumannSpectrum::fem(&disk, 0.02, 3).map_err(|e| e.to_string())?;
    let target = oracle_j1_prime().powi(2);
    check((target - 3.3900).abs() < 5e-5, format!("oracle j'_11² = {target}"))?;
    let mu2 = fem.mu(2).ok_or("missing eigenvalue")?;
    let rel_disk = (mu2 - target).abs() / target;
    check(rel_disk <= 0.01, format!("disk μ₂ = {mu2} vs {target} (rel {rel_disk:.2e})"))?;
    Ok(format!("square max rel err {worst:.2e}, disk μ₂ = {mu2:.5} vs {target:.5} (rel {rel_disk:.2e})"))
}

fn c8_dominance() -> Result<String, String> {
    let shapes = [
        ("square", ConvexPolygon::rectangle(1.0, 1.0)),
        ("hexagon", ConvexPolygon::hexagon(1.0)),
        ("2x1 rectangle", ConvexPolygon::rectangle(2.0, 1.0)),
    ];
    let opts = VerifyOptions::default();
    let mut shown = Vec::new();
    for (name, p) in shapes {
        let p = p.map_err(|e| e.to_string())?;
        let fem = NeumannSpectrum::fem(&p, 0.03, pairs_for_lambda(&p, 200.0 * (1.0 + opts.fem_lambda_slack)))
            .map_err(|e| e.to_string())?;
        for lambda in [50.0, 200.0] {
            let report = bounds::verify_main_theorem(&p, lambda, &fem, &opts).map_err(|e| format!("{name}: {e}"))?;
            let cert = report.certificate.ok_or(format!("{name} λ={lambda}: empty packing"))?;
            check(cert <= lambda * (1.0 + 1e-8), format!("{name} λ={lambda}: certificate {cert} > λ"))?;
            let l = report.packing_l;
            let mu_l = fem.mu(l).ok_or(format!("{name}: no μ_{l}"))?;
            check(mu_l <= cert * 1.02, format!("{name} λ={lambda}: FEM μ_{l} = {mu_l} > 1.02 · {cert}"))?;
            shown.push(format!("{name} λ={lambda}: μ_{l}={mu_l:.1} ≤ {cert:.1}"));
        }
    }
    Ok(shown.join(", "))
}

fn c9_dimensions() -> Result<String, String> {
    let table = bounds::highdim_table(3, 24).map_err(|e| e.to_string())?;
    check(table.len() == 22, format!("{} rows", table.len()))?;
    for row in &table {
        check(row.strict && row.remark_rhs < row.kroger_coeff, format!("d = {}: not strict", row.d))?;
    }
    let d3 = &table[0];
    Ok(format!("22 rows strict; d=3: {:.5} < {:.5}", d3.remark_rhs, d3.kroger_coeff))
}

type Criterion = (&'static str, Duration, fn() -> Result<String, String>);

fn main() {
    let criteria: [Criterion; 9] = [
        ("coefficient table", Duration::from_secs(1), c1_coefficients),
        ("first zero of J0", Duration::from_secs(1), c2_j0),
        ("Bessel integral inequality", Duration::from_secs(10), c3_lemma),
        ("equality case on interior disks", Duration::from_secs(5), c4_equality_case),
        ("lattice packing attainment", Duration::from_secs(30), c5_packing),
        ("analytic square counts", Duration::from_secs(1), c6_analytic),
        ("FEM validation", Duration::from_secs(120), c7_fem),
        ("certificate dominance", Duration::from_secs(180), c8_dominance),
        ("high-dimensional comparison", Duration::from_secs(5), c9_dimensions),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed <= *budget {
                Ok(detail)
            } else {
                Err(format!("took {elapsed:.2?}, budget {budget:?}"))
            }
        });
        match result {
            Ok(detail) => println!("PASS criterion {} ({name}) in {elapsed:.2?}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}) in {elapsed:.2?}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
