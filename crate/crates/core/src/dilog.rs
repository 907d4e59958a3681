//! Dilogarithm, Bloch-Wigner dilogarithm, Clausen function and Hurwitz zeta at 2.
//!
//! Every public routine works internally with ten guard digits and rounds its
//! result back to the requested precision. Rows of values at rational angles
//! are memoized per `(k, precision)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::memo::memo;
use crate::scalar::{root_of_unity, ComplexExt, Real};

pub(crate) const GUARD: u32 = 10;

/// Bernoulli numbers `B_0..=B_n` with `B_1 = -1/2`.
pub fn bernoulli_table(n: usize) -> Arc<Vec<BigRational>> {
    let len = (n + 1).next_multiple_of(32);
    memo("bernoulli", len, || {
        // B_m = -1/(m+1) * sum_{k<m} C(m+1, k) B_k
        let mut b: Vec<BigRational> = Vec::with_capacity(len);
        b.push(BigRational::one());
        for m in 1..len {
            if m > 1 && m % 2 == 1 {
                b.push(BigRational::zero());
                continue;
            }
            let mut binom = BigInt::one();
            let mut s = BigRational::zero();
            for (k, bk) in b.iter().enumerate() {
                if !bk.is_zero() {
                    s += bk * BigRational::from_integer(binom.clone());
                }
                binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
            }
            b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
        }
        b
    })
}

pub fn bernoulli(n: usize) -> BigRational {
    bernoulli_table(n)[n].clone()
}

fn eps<T: Real>(prec: T::Precision) -> T {
    T::epsilon(prec)
}

/// `B_{2j}` for `j = 1..=count` as scalars.
fn even_bernoulli<T: Real>(count: usize, prec: T::Precision) -> Arc<Vec<T>> {
    memo("even-bernoulli", (prec, count), || {
        let table = bernoulli_table(2 * count);
        (1..=count).map(|j| T::from_ratio(&table[2 * j], prec)).collect()
    })
}

/// Coefficients `B_n / (n+1)!` of the series `Li2(z) = Σ B_n u^(n+1)/(n+1)!`, `u = -ln(1-z)`.
fn li2_bernoulli_coeffs<T: Real>(prec: T::Precision) -> Arc<Vec<T>> {
    memo("li2-bernoulli", prec, || {
        let n = (1.5 * T::digits(prec) as f64) as usize + 30;
        let table = bernoulli_table(n);
        let mut fact = BigInt::one();
        let mut out = Vec::with_capacity(n + 1);
        for (i, b) in table.iter().take(n + 1).enumerate() {
            fact *= BigInt::from(i + 1);
            out.push(T::from_ratio(&(b / BigRational::from_integer(fact.clone())), prec));
        }
        out
    })
}

fn czero<T: Real>(prec: T::Precision) -> Complex<T> {
    Complex::new(T::from_i64(0, prec), T::from_i64(0, prec))
}

fn cone<T: Real>(prec: T::Precision) -> Complex<T> {
    Complex::new(T::from_i64(1, prec), T::from_i64(0, prec))
}

fn pi2_over_6<T: Real>(prec: T::Precision) -> T {
    let pi = T::pi(prec);
    pi.clone() * pi / T::from_i64(6, prec)
}

/// `Σ z^n / n²` for `|z| ≤ 1/2`.
fn li2_direct<T: Real>(z: &Complex<T>, prec: T::Precision) -> Complex<T> {
    let tol = eps::<T>(prec);
    let mut pow = z.clone();
    let mut acc = czero::<T>(prec);
    let mut n: i64 = 1;
    loop {
        let term = pow.clone() / T::from_i64(n * n, prec);
        acc = acc + term.clone();
        if term.abs_r() < tol {
            break;
        }
        n += 1;
        pow = pow * z.clone();
    }
    acc
}

/// Bernoulli-number expansion, valid for `|ln(1-z)| < 2π`.
fn li2_bernoulli<T: Real>(z: &Complex<T>, prec: T::Precision) -> Complex<T> {
    let u = -(cone::<T>(prec) - z.clone()).ln_r();
    let coeffs = li2_bernoulli_coeffs::<T>(prec);
    let tol = eps::<T>(prec);
    let mut pow = u.clone();
    let mut acc = czero::<T>(prec);
    for (n, c) in coeffs.iter().enumerate() {
        if n > 1 && n % 2 == 1 {
            pow = pow * u.clone();
            continue;
        }
        let term = pow.clone() * c.clone();
        acc = acc + term.clone();
        if n > 2 && term.abs_r() < tol {
            break;
        }
        pow = pow * u.clone();
    }
    acc
}

/// `Li2` on the region `|z| ≤ 1`, `Re z ≤ 1/2`.
fn li2_core<T: Real>(z: &Complex<T>, prec: T::Precision) -> Complex<T> {
    let quarter = T::from_i64(1, prec) / T::from_i64(4, prec);
    if z.norm_sqr_r() <= quarter {
        li2_direct(z, prec)
    } else {
        li2_bernoulli(z, prec)
    }
}

fn li2_work<T: Real>(z: &Complex<T>, prec: T::Precision) -> Result<Complex<T>> {
    let one = T::from_i64(1, prec);
    if z.is_exact_zero() {
        return Ok(czero::<T>(prec));
    }
    if z.im.is_zero() && z.re > one {
        return Err(Error::BranchCut(format!("{}", z.re)));
    }
    if z.im.is_zero() && z.re == one {
        return Ok(Complex::new(pi2_over_6(prec), T::from_i64(0, prec)));
    }
    let half = one.clone() / T::from_i64(2, prec);
    if z.norm_sqr_r() > one {
        // Li2(z) = -Li2(1/z) - π²/6 - ln²(-z)/2
        let inv = cone::<T>(prec) / z.clone();
        let l = (-z.clone()).ln_r();
        let inner = li2_work(&inv, prec)?;
        return Ok(-inner - Complex::new(pi2_over_6(prec), T::from_i64(0, prec)) - l.clone() * l * Complex::new(half, T::from_i64(0, prec)));
    }
    if z.re > half {
        // Li2(z) = -Li2(1-z) + π²/6 - ln(z) ln(1-z)
        let w = cone::<T>(prec) - z.clone();
        let inner = li2_core(&w, prec);
        return Ok(-inner + Complex::new(pi2_over_6(prec), T::from_i64(0, prec)) - z.ln_r() * w.ln_r());
    }
    Ok(li2_core(z, prec))
}

/// The principal branch of the dilogarithm.
pub fn li2<T: Real>(z: &Complex<T>, prec: T::Precision) -> Result<Complex<T>> {
    let wp = T::widen(prec, GUARD);
    let zw = z.round_to(wp);
    Ok(li2_work(&zw, wp)?.round_to(prec))
}

/// Bloch-Wigner dilogarithm `D(z) = Im Li2(z) + Arg(1-z) log|z|`.
pub fn bloch_wigner<T: Real>(z: &Complex<T>, prec: T::Precision) -> T {
    let wp = T::widen(prec, GUARD);
    bloch_wigner_work(&z.round_to(wp), wp).round_to(prec)
}

fn bloch_wigner_work<T: Real>(z: &Complex<T>, prec: T::Precision) -> T {
    let one = T::from_i64(1, prec);
    if z.im.is_zero() {
        return T::from_i64(0, prec);
    }
    // D(1/z) = -D(z) and D(1-z) = -D(z) move z into |z| ≤ 1, Re z ≤ 1/2
    let mut w = z.clone();
    let mut negate = false;
    if w.norm_sqr_r() > one {
        w = cone::<T>(prec) / w;
        negate = !negate;
    }
    if w.re > one.clone() / T::from_i64(2, prec) {
        w = cone::<T>(prec) - w;
        negate = !negate;
    }
    let l = li2_core(&w, prec);
    let arg = (cone::<T>(prec) - w.clone()).arg_r();
    let d = l.im + arg * w.norm_sqr_r().ln() / T::from_i64(2, prec);
    if negate {
        -d
    } else {
        d
    }
}

/// Number of direct terms and Bernoulli corrections for Euler-Maclaurin at `prec`.
fn em_params<T: Real>(prec: T::Precision) -> (u64, usize) {
    let d = T::digits(prec) as u64;
    ((d * 3 / 5).max(10), (d / 2 + 20) as usize)
}

fn hurwitz_work<T: Real>(num: u64, den: u64, prec: T::Precision) -> T {
    let (n_terms, m_terms) = em_params::<T>(prec);
    let den_sq = T::from_i64((den * den) as i64, prec);
    let mut acc = T::from_i64(0, prec);
    // Σ_{n<N} 1/(n+a)² with a = num/den
    for n in (0..n_terms).rev() {
        let q = (n * den + num) as i64;
        acc = acc + den_sq.clone() / T::from_i64(q * q, prec);
    }
    let x = T::from_i64((n_terms * den + num) as i64, prec) / T::from_i64(den as i64, prec);
    let inv = T::from_i64(1, prec) / x.clone();
    let inv2 = inv.clone() * inv.clone();
    acc = acc + inv.clone() + inv2.clone() / T::from_i64(2, prec);
    let bern = even_bernoulli::<T>(m_terms, prec);
    let tol = eps::<T>(prec);
    let mut pow = inv2.clone() * inv;
    for b in bern.iter() {
        let term = b.clone() * pow.clone();
        acc = acc + term.clone();
        if term.abs() < tol {
            break;
        }
        pow = pow * inv2.clone();
    }
    acc
}

/// Hurwitz zeta `ζ(2, num/den)` for `0 < num ≤ den`, by Euler-Maclaurin summation.
pub fn hurwitz_zeta2<T: Real>(num: u64, den: u64, prec: T::Precision) -> T {
    assert!(num >= 1 && num <= den, "hurwitz_zeta2 needs 0 < num/den <= 1");
    let g = num.gcd(&den);
    let (num, den) = (num / g, den / g);
    let wp = T::widen(prec, GUARD);
    hurwitz_row::<T>(den, wp)[(num - 1) as usize].round_to(prec)
}

/// `ζ(2, a/k)` for `a = 1..=k` at working precision `prec`, stored at index `a-1`.
pub fn hurwitz_row<T: Real>(k: u64, prec: T::Precision) -> Arc<Vec<T>> {
    assert!(k >= 1, "hurwitz_row needs k >= 1");
    memo("hurwitz-row", (prec, k), || {
        (1..=k).map(|a| hurwitz_work::<T>(a, k, prec)).collect()
    })
}

/// `sin(2πm/k)` for `m = 0..k`.
pub fn sine_row<T: Real>(k: u64, prec: T::Precision) -> Arc<Vec<T>> {
    memo("sine-row", (prec, k), || {
        (0..k).map(|m| root_of_unity::<T>(m as i64, k, prec).im).collect()
    })
}

/// `Cl2(2πj/k)` for `j = 0..k` at working precision `prec`.
pub fn clausen_row<T: Real>(k: u64, prec: T::Precision) -> Arc<Vec<T>> {
    assert!(k >= 1, "clausen_row needs k >= 1");
    memo("clausen-row", (prec, k), || {
        let h = hurwitz_row::<T>(k, prec);
        let s = sine_row::<T>(k, prec);
        let k2 = T::from_i64((k * k) as i64, prec);
        // sin is odd under a -> k - a, so pair ζ(2, a/k) - ζ(2, 1 - a/k)
        let diffs: Vec<T> = (1..=(k - 1) / 2)
            .map(|a| h[(a - 1) as usize].clone() - h[(k - a - 1) as usize].clone())
            .collect();
        let mut row = vec![T::from_i64(0, prec); k as usize];
        for j in 1..=(k - 1) / 2 {
            let mut acc = T::from_i64(0, prec);
            for (i, dv) in diffs.iter().enumerate() {
                let a = i as u64 + 1;
                acc = acc + s[((a * j) % k) as usize].clone() * dv.clone();
            }
            let v = acc / k2.clone();
            row[(k - j) as usize] = -v.clone();
            row[j as usize] = v;
        }
        row
    })
}

/// `Cl2(2πj/k) = D(exp(2πij/k))`.
pub fn clausen2<T: Real>(j: i64, k: u64, prec: T::Precision) -> T {
    assert!(k >= 1, "clausen2 needs k >= 1");
    let wp = T::widen(prec, GUARD);
    let j = j.rem_euclid(k as i64) as usize;
    clausen_row::<T>(k, wp)[j].round_to(prec)
}

/// Apéry's constant via `ζ(3) = (5/2) Σ (-1)^(n+1) / (n³ C(2n, n))`.
pub fn zeta3<T: Real>(prec: T::Precision) -> T {
    let wp = T::widen(prec, GUARD);
    let v = memo("zeta3", wp, || {
        let tol = eps::<T>(wp);
        let mut acc = T::from_i64(0, wp);
        let mut binom = BigInt::from(2);
        let mut n: u64 = 1;
        loop {
            let den = &binom * BigInt::from(n * n * n);
            let term = T::from_i64(1, wp) / T::from_bigint(&den, wp);
            // alternating with decreasing terms: the tail is below the next term
            let small = term < tol;
            acc = if n % 2 == 1 { acc + term } else { acc - term };
            if small {
                break;
            }
            n += 1;
            binom = binom * BigInt::from(2 * (2 * n - 1)) / BigInt::from(n);
        }
        acc * T::from_i64(5, wp) / T::from_i64(2, wp)
    });
    v.round_to(prec)
}

/// Catalan's constant as `Cl2(π/2)`.
pub fn catalan<T: Real>(prec: T::Precision) -> T {
    clausen2::<T>(1, 4, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BigReal;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const P: u32 = 40;

    fn big(x: f64) -> BigReal {
        BigReal::from_f64(x, P)
    }

    fn c(re: f64, im: f64) -> Complex<BigReal> {
        Complex::new(big(re), big(im))
    }

    /// `Σ_{n≤N} 1/n²` plus the integral tail `1/N - 1/(2N²)` bracket.
    fn basel_oracle() -> f64 {
        let n = 1_000_000u64;
        let s: f64 = (1..=n).rev().map(|k| 1.0 / (k as f64 * k as f64)).sum();
        s + 1.0 / n as f64 - 0.5 / (n as f64 * n as f64)
    }

    #[test]
    fn bernoulli_numbers() {
        assert_eq!(bernoulli(1), BigRational::new((-1).into(), 2.into()));
        assert_eq!(bernoulli(2), BigRational::new(1.into(), 6.into()));
        assert_eq!(bernoulli(12), BigRational::new((-691).into(), 2730.into()));
        assert!(bernoulli(13).is_zero());
    }

    #[test]
    fn li2_special_values() {
        let zero = li2(&c(0.0, 0.0), P).unwrap();
        assert!(zero.is_exact_zero());
        let one = li2(&c(1.0, 0.0), P).unwrap();
        assert!((one.re.to_f64() - basel_oracle()).abs() < 1e-12);
        // direct series at 1/2 against π²/12 - ln²2/2 from the same routine's pieces
        let half: Complex<f64> = li2(&Complex::new(0.5, 0.0), ()).unwrap();
        let direct: f64 = (1..200).map(|n| 0.5f64.powi(n) / (n * n) as f64).sum();
        assert!((half.re - direct).abs() < 1e-15);
        assert!((half.re - 0.582_240_526_465_012_5).abs() < 1e-15);
        assert!(matches!(li2(&c(2.0, 0.0), P), Err(Error::BranchCut(_))));
    }

    #[test]
    fn li2_high_precision_reflection_and_inversion() {
        // Li2(-1) = -π²/12 and Li2(1/2) = π²/12 - ln²2/2 at 40 digits
        let pi = BigReal::pi(P);
        let m1 = li2(&c(-1.0, 0.0), P).unwrap();
        let expect = -(pi.clone() * pi.clone()) / BigReal::from_i64(12, P);
        assert!((m1.re - expect).abs() < BigReal::epsilon(P - 2));
        let ln2 = BigReal::from_i64(2, P).ln();
        let h = li2(&c(0.5, 0.0), P).unwrap();
        let expect = pi.clone() * pi / BigReal::from_i64(12, P) - ln2.clone() * ln2 / BigReal::from_i64(2, P);
        assert!((h.re - expect).abs() < BigReal::epsilon(P - 2));
    }

    #[test]
    fn catalan_from_both_routes() {
        // Im Li2(i) = Σ (-1)^k / (2k+1)², summed to 10^6 terms with alternating tail bound
        let n = 1_000_000;
        let oracle: f64 = (0..n).rev().map(|k| (if k % 2 == 0 { 1.0 } else { -1.0 }) / ((2 * k + 1) as f64).powi(2)).sum();
        let bw = bloch_wigner(&c(0.0, 1.0), P);
        assert!((bw.to_f64() - oracle).abs() < 1e-12);
        let cl = clausen2::<BigReal>(1, 4, P);
        assert!((bw - cl).abs() < BigReal::epsilon(P - 3));
    }

    #[test]
    fn clausen_third_turn() {
        let n = 3_000_000u64;
        let oracle: f64 = (1..=n)
            .rev()
            .map(|m| (2.0 * std::f64::consts::PI * m as f64 / 3.0).sin() / (m as f64 * m as f64))
            .sum();
        let v = clausen2::<BigReal>(1, 3, P);
        assert!((v.to_f64() - oracle).abs() < 1e-6);
        let z = root_of_unity::<BigReal>(1, 3, P + 10);
        assert!((bloch_wigner(&z, P) - v.clone()).abs() < BigReal::epsilon(P - 3));
        // distribution relation with n = 2 at ζ6: 3 D(ζ3) = 2 D(ζ6)
        let sixth = clausen2::<BigReal>(1, 6, P);
        assert!((v * BigReal::from_i64(3, P) - sixth * BigReal::from_i64(2, P)).abs() < BigReal::epsilon(P - 3));
    }

    #[test]
    fn clausen_trivial_points() {
        assert!(clausen2::<BigReal>(0, 1, P).is_zero());
        assert!(clausen2::<BigReal>(1, 2, P).is_zero());
        assert!(bloch_wigner(&c(1.0, 0.0), P).is_zero());
        assert!(bloch_wigner(&c(-3.5, 0.0), P).is_zero());
    }

    #[test]
    fn clausen_matches_fourier_series() {
        let n = 20_000u64;
        for k in 1..=60u64 {
            let row = clausen_row::<f64>(k, ());
            for j in 0..k {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
                let partial: f64 = (1..=n).map(|m| (m as f64 * theta).sin() / (m as f64).powi(2)).sum();
                assert!((row[j as usize] - partial).abs() < 1.0 / n as f64, "k={k} j={j}");
            }
        }
    }

    #[test]
    fn clausen_row_agrees_with_bloch_wigner() {
        for k in [5u64, 7, 12, 17] {
            for j in 1..k {
                let z = root_of_unity::<BigReal>(j as i64, k, P + 10);
                let d = bloch_wigner(&z, P) - clausen2::<BigReal>(j as i64, k, P);
                assert!(d.abs() < BigReal::epsilon(P - 3), "k={k} j={j}");
            }
        }
    }

    #[test]
    fn hurwitz_limits() {
        let pi = BigReal::pi(P);
        let z1 = hurwitz_zeta2::<BigReal>(1, 1, P);
        assert!((z1 - pi.clone() * pi.clone() / BigReal::from_i64(6, P)).abs() < BigReal::epsilon(P - 2));
        // ζ(2, 1/2) = 3 ζ(2) = π²/2
        let zh = hurwitz_zeta2::<BigReal>(2, 4, P);
        assert!((zh - pi.clone() * pi / BigReal::from_i64(2, P)).abs() < BigReal::epsilon(P - 2));
    }

    #[test]
    fn zeta3_against_partial_sums() {
        let n = 100_000u64;
        let s: f64 = (1..=n).rev().map(|k| 1.0 / (k as f64).powi(3)).sum();
        let oracle = s + 0.5 / (n as f64 * n as f64);
        let z = zeta3::<BigReal>(P);
        assert!((z.to_f64() - oracle).abs() < 1e-13);
        let known = BigReal::parse("1.2020569031595942853997381615114499907649862923405", P).unwrap();
        assert!((z - known).abs() < BigReal::epsilon(P - 1));
    }

    #[test]
    fn doubled_precision_recomputation() {
        let z = c(0.3, 0.8);
        let a = bloch_wigner(&z, P);
        let b = bloch_wigner(&Complex::new(z.re.round_to(2 * P), z.im.round_to(2 * P)), 2 * P);
        assert!((a - b.round_to(P)).abs() < BigReal::epsilon(P - 3));
    }

    fn random_point(rng: &mut ChaCha8Rng) -> Complex<BigReal> {
        let r: f64 = if rng.gen_bool(0.3) { 1.0 } else { rng.gen_range(0.05..3.0) };
        let t: f64 = rng.gen_range(-3.1..3.1);
        c(r * t.cos(), r * t.sin())
    }

    #[test]
    fn antisymmetry_under_conjugation() {
        let prec = 30;
        let tol = BigReal::epsilon(prec - 5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let z = random_point(&mut rng);
            let s = bloch_wigner(&z, prec) + bloch_wigner(&z.conj(), prec);
            assert!(s.abs() < tol, "z = {z}");
        }
    }

    #[test]
    fn distribution_relation() {
        // D(z^n) = n Σ_k D(ζ_n^k z)
        let prec = 30;
        let tol = BigReal::epsilon(prec - 5);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 1..=8u64 {
            for _ in 0..25 {
                let z = random_point(&mut rng);
                let mut zn = z.clone();
                for _ in 1..n {
                    zn = zn * z.clone();
                }
                let lhs = bloch_wigner(&zn, prec);
                let mut rhs = BigReal::from_i64(0, prec + 10);
                for k in 0..n {
                    let w = root_of_unity::<BigReal>(k as i64, n, prec + 10) * z.clone();
                    rhs = rhs + bloch_wigner(&w, prec + 10);
                }
                let rhs = rhs * BigReal::from_i64(n as i64, prec + 10);
                assert!((lhs - rhs).abs() < tol, "n={n} z={z}");
            }
        }
    }

    proptest! {
        #[test]
        fn bloch_wigner_vanishes_on_reals(x in -50.0f64..50.0) {
            prop_assert!(bloch_wigner(&c(x, 0.0), P).is_zero());
        }

        #[test]
        fn bloch_wigner_inversion_and_reflection(re in -2.0f64..2.0, im in 0.05f64..2.0) {
            let z = Complex::new(re, im);
            let d: f64 = bloch_wigner(&z, ());
            let di: f64 = bloch_wigner(&(Complex::new(1.0, 0.0) / z), ());
            let dr: f64 = bloch_wigner(&(Complex::new(1.0, 0.0) - z), ());
            prop_assert!((d + di).abs() < 1e-12);
            prop_assert!((d + dr).abs() < 1e-12);
        }
    }
}
