//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::time::Instant;

use num_complex::Complex;
use pdmahler::characters::{characters_mod, odd_characters_mod, odd_primitive_of_conductor};
use pdmahler::decomposition::{decompose_sd, verify_decomposition};
use pdmahler::dilog::bloch_wigner;
use pdmahler::golden::{check_row, constants_table, derived_constant, mpd_table, sd_table, RowCheck};
use pdmahler::lvalues::{d_chi, d_f, l2, l_prime_minus1, l_prime_via_functional_eq, reduce_imprimitive};
use pdmahler::pd_mahler::{limit_gap, m_pd, mahler_numeric, pd_poly, ray_q7, BasisId};
use pdmahler::scalar::root_of_unity;
use pdmahler::solver::{known_solutions, same_line, solve_complex_pair, solve_conductor, verify_certificate, Target};
use pdmahler::{BigReal, Cyclo, Real};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PREC: u32 = 50;

fn tol(digits: u32) -> BigReal {
    BigReal::epsilon(digits)
}

/// Outcome of one criterion: failures plus notes that must be reported.
#[derive(Default)]
struct Findings {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Findings {
    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn golden_rows(rows: Vec<pdmahler::golden::GoldenRow>, f: &mut Findings) {
    for g in rows {
        let (canonical, check) = check_row(&g, PREC).expect("row check runs");
        match check {
            RowCheck::Exact => {}
            RowCheck::NumericOnly { residual } => {
                f.notes.push(format!("{} differs from the canonical coefficients, equal numerically ({})", g.subject, residual.to_sci(3)))
            }
            RowCheck::ExactAfterErrata { errata, printed_residual } => {
                let fixes: Vec<String> = errata.iter().map(|(a, b)| format!("{a}->{b}")).collect();
                f.notes.push(format!(
                    "{} exact after label erratum {} (as printed the residual is {})",
                    g.subject,
                    fixes.join(", "),
                    printed_residual.to_sci(3)
                ));
            }
            RowCheck::Mismatch { residual } => f.failures.push(format!("{} mismatch, residual {}", g.subject, residual.to_sci(3))),
        }
        let res = verify_decomposition::<BigReal>(&canonical, PREC).expect("residual");
        f.require(res < tol(40), || format!("{} canonical residual {}", g.subject, res.to_sci(3)));
    }
}

fn criterion_1() -> Findings {
    let mut f = Findings::default();
    golden_rows(mpd_table(), &mut f);
    for c in constants_table() {
        for &d in &c.degrees {
            f.require(derived_constant(&c, d) == c.value, || format!("{} at d = {d}", c.name));
        }
    }
    f
}

fn criterion_2() -> Findings {
    let mut f = Findings::default();
    golden_rows(sd_table(), &mut f);
    // the conductor-20 expansion assembled from the divisor restrictions
    let s20 = decompose_sd(20);
    let labels: Vec<String> = s20.terms.keys().map(|c| c.label()).collect();
    f.require(labels == ["4.3", "5.2", "5.3", "20.19"], || format!("S_20 characters {labels:?}"));
    f
}

fn identities(quadratic: bool, f: &mut Findings) {
    for cert in known_solutions().into_iter().filter(|c| matches!(c.target, Target::Conductor(_)) == quadratic) {
        let v = verify_certificate(&cert, PREC).expect("verification runs");
        f.require(v.exact && v.residual < tol(40), || {
            format!("{}: exact {}, residual {}", cert.target, v.exact, v.residual.to_sci(3))
        });
    }
}

fn criterion_3() -> Findings {
    let mut f = Findings::default();
    identities(true, &mut f);
    let f24 = known_solutions().into_iter().find(|c| c.target == Target::Conductor(24)).expect("present");
    let max_exp = f24.exponents.terms().map(|(_, e)| e.abs()).max().unwrap_or(0);
    f.require(max_exp == 1269 && f24.max_degree() == 22, || format!("f = 24 shape: max |a| {max_exp}, D {}", f24.max_degree()));
    f
}

fn criterion_4() -> Findings {
    let mut f = Findings::default();
    identities(false, &mut f);
    let uses_ray: Vec<i64> = known_solutions().iter().map(|c| c.exponents.get(BasisId::RayQ7)).filter(|&e| e != 0).collect();
    f.require(uses_ray == [-539], || format!("RayQ7 exponents {uses_ray:?}"));
    f
}

fn criterion_5() -> Findings {
    let mut f = Findings::default();
    let reference = known_solutions();
    let find = |t: &Target| reference.iter().find(|c| &c.target == t).expect("present").clone();
    let mut targets: Vec<Target> = [3u64, 4, 8].iter().map(|&c| Target::Conductor(c)).collect();
    targets.extend(["5.2", "9.2"].iter().map(|l| Target::Character(l.parse().unwrap())));
    for t in targets {
        let expected = find(&t);
        let d_max = expected.max_degree();
        let outcome = match &t {
            Target::Conductor(c) => solve_conductor(*c, d_max, false),
            Target::Character(chi) => solve_complex_pair(chi, d_max, false),
        }
        .expect("solver runs");
        match outcome.certificate() {
            Some(c) => f.require(same_line(&c.exponents, &expected.exponents), || format!("{t}: got {c}")),
            None => f.failures.push(format!("{t}: no solution with D = {d_max}")),
        }
    }
    f
}

fn criterion_6() -> Findings {
    let mut f = Findings::default();
    for d in 1..=6u32 {
        let est = mahler_numeric::<f64>(&pd_poly(d), 4096, ()).expect("oracle runs");
        let diff = (est.value - m_pd::<f64>(d as u64, ())).abs();
        f.require(diff < 1e-6, || format!("P_{d}: |diff| = {diff:.3e}"));
    }
    let est = mahler_numeric::<f64>(&ray_q7(), 4096, ()).expect("oracle runs");
    let diff = (est.value * 7.0 / 8.0 - d_f::<f64>(7, ()).unwrap()).abs();
    f.require(diff < 1e-5, || format!("RayQ7: |diff| = {diff:.3e}"));
    f
}

fn criterion_7() -> Findings {
    let mut f = Findings::default();
    let gaps: Vec<f64> = [50u64, 100, 200].iter().map(|&d| limit_gap::<BigReal>(d, 30).to_f64()).collect();
    f.require(gaps[0] > gaps[1] && gaps[1] > gaps[2], || format!("gaps not decreasing: {gaps:?}"));
    for (d, g) in [50u64, 100, 200].iter().zip(&gaps) {
        let d = *d as f64;
        let scaled = g * d * d / d.ln();
        f.require(scaled <= 10.0, || format!("d = {d}: d^2/log d * gap = {scaled}"));
    }
    f
}

fn bw(z: &Complex<BigReal>) -> BigReal {
    bloch_wigner::<BigReal>(z, PREC)
}

fn criterion_8() -> Findings {
    let mut f = Findings::default();
    let t = tol(PREC - 5);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let r: f64 = rng.gen_range(0.05..4.0);
        let a: f64 = rng.gen_range(-3.1..3.1);
        let z = Complex::new(BigReal::from_f64(r * a.cos(), PREC), BigReal::from_f64(r * a.sin(), PREC));
        let n: u64 = rng.gen_range(2..=4);
        let dz = bw(&z);
        let anti = (bw(&z.conj()) + dz.clone()).abs();
        let one = Complex::new(BigReal::from_i64(1, PREC), BigReal::from_i64(0, PREC));
        let inv = (bw(&(one / z.clone())) + dz).abs();
        let mut zn = z.clone();
        for _ in 1..n {
            zn = zn * z.clone();
        }
        let mut sum = BigReal::from_i64(0, PREC);
        for k in 0..n {
            sum = sum + bw(&(root_of_unity::<BigReal>(k as i64, n, PREC) * z.clone()));
        }
        let dist = (bw(&zn) - sum * BigReal::from_i64(n as i64, PREC)).abs();
        f.require(anti < t && inv < t && dist < t, || format!("dilog relations at {z:?}, n = {n}"));
    }
    for k in 1..=60u64 {
        for chi in characters_mod(k).into_iter().filter(|c| c.is_primitive()) {
            let tau = chi.gauss_sum_exact();
            f.require(&tau * &tau.conj() == Cyclo::from_int(k as i64, 1), || format!("|tau({chi})|^2 != {k}"));
        }
    }
    let close = |a: &Complex<BigReal>, b: &Complex<BigReal>| {
        let d = Complex::new(a.re.clone() - b.re.clone(), a.im.clone() - b.im.clone());
        d.re.abs() < tol(PREC - 8) && d.im.abs() < tol(PREC - 8)
    };
    for k in 3..=40u64 {
        for chi in odd_characters_mod(k) {
            let d = d_chi::<BigReal>(&chi, PREC).unwrap();
            let red = reduce_imprimitive::<BigReal>(&chi, PREC).unwrap();
            let via_star = red.gamma.embed::<BigReal>(PREC) * d_chi::<BigReal>(&red.chi_star, PREC).unwrap();
            let via_l2 = red.beta.clone() * l2::<BigReal>(&chi.conj(), PREC).unwrap();
            f.require(close(&d, &via_star) && close(&d, &via_l2), || format!("d_chi relations for {chi}"));
        }
        for chi in odd_primitive_of_conductor(k) {
            let a = l_prime_minus1::<BigReal>(&chi, PREC).unwrap();
            let b = l_prime_via_functional_eq::<BigReal>(&chi, PREC).unwrap();
            f.require(close(&a, &b), || format!("functional equation for {chi}"));
        }
    }
    let m = |d| m_pd::<BigReal>(d, PREC);
    let r = |n, d| BigReal::from_i64(n, PREC) / BigReal::from_i64(d, PREC);
    let rel4 = m(4) + r(2, 3) * m(3) + r(2, 5) * m(2) - r(3, 1) * m(1);
    f.require(rel4.abs() < tol(PREC - 8), || format!("m(P_4) relation: {}", rel4.to_sci(3)));
    let lhs = r(66, 1) * m(10) + r(55, 1) * m(9) + r(45, 1) * m(8) + r(36, 1) * m(7) + r(28, 1) * m(6) + r(21, 1) * m(5);
    let rel10 = lhs - r(243, 1) * m(1) - r(126, 1) * m(2);
    f.require(rel10.abs() < tol(PREC - 8), || format!("d <= 10 relation: {}", rel10.to_sci(3)));
    f
}

fn main() {
    let criteria: [(&str, fn() -> Findings); 8] = [
        ("m(P_d) decompositions and constants, d <= 16", criterion_1),
        ("S_d/(2pi) decompositions", criterion_2),
        ("quadratic-character identities", criterion_3),
        ("complex-pair identities", criterion_4),
        ("solver regression", criterion_5),
        ("numeric oracle cross-check", criterion_6),
        ("limit behaviour", criterion_7),
        ("property suites", criterion_8),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let f = run();
        let secs = start.elapsed().as_secs_f64();
        let status = if f.failures.is_empty() { "PASS" } else { "FAIL" };
        let noted = if f.notes.is_empty() { String::new() } else { format!(" [{} reported discrepancies]", f.notes.len()) };
        println!("criterion {}: {status} {name} ({secs:.1}s){noted}", n + 1);
        for note in &f.notes {
            println!("    reported: {note}");
        }
        for fail in &f.failures {
            println!("    failure: {fail}");
        }
        failed += usize::from(!f.failures.is_empty());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
