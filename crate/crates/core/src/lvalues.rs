//! Special values of Dirichlet L-functions of odd characters.
//!
//! Two independent routes to `L'(χ, -1)` for primitive odd `χ`: the Clausen
//! sum `d_χ = (k/4π) Σ χ(m) Cl2(2πm/k)`, and the functional equation
//! `L'(χ, -1) = (-i k τ(χ) / 4π) L(χ̄, 2)` with `L(χ̄, 2)` from Hurwitz zeta.

use num_complex::Complex;

use crate::arith::{factorize, is_fundamental_discriminant, kronecker};
use crate::characters::DirichletCharacter;
use crate::cyclo::Cyclo;
use crate::dilog::{clausen_row, hurwitz_row, GUARD};
use crate::error::{Error, Result};
use crate::scalar::{roots_of_unity_row, ComplexExt, Real};
use crate::BigReal;

fn czero<T: Real>(prec: T::Precision) -> Complex<T> {
    Complex::new(T::from_i64(0, prec), T::from_i64(0, prec))
}

fn value<T: Real>(chi: &DirichletCharacter, m: i64, prec: T::Precision) -> Option<Complex<T>> {
    let k = chi.exponent(m)?;
    Some(roots_of_unity_row::<T>(chi.value_field_order(), prec)[k as usize].clone())
}

fn require_odd(chi: &DirichletCharacter) -> Result<()> {
    if chi.is_odd() {
        Ok(())
    } else {
        Err(Error::EvenCharacter(chi.label()))
    }
}

fn require_primitive_odd(chi: &DirichletCharacter) -> Result<()> {
    require_odd(chi)?;
    if chi.is_primitive() {
        Ok(())
    } else {
        Err(Error::Imprimitive(chi.label()))
    }
}

fn d_chi_work<T: Real>(chi: &DirichletCharacter, wp: T::Precision) -> Complex<T> {
    let k = chi.modulus();
    let cl = clausen_row::<T>(k, wp);
    let mut acc = czero::<T>(wp);
    for m in 1..k {
        if let Some(v) = value::<T>(chi, m as i64, wp) {
            acc = acc + v * cl[m as usize].clone();
        }
    }
    let scale = T::from_i64(k as i64, wp) / (T::from_i64(4, wp) * T::pi(wp));
    acc * scale
}

/// `d_χ = (k/4π) Σ_{m=1}^{k-1} χ(m) D(e^{2πim/k})` for odd `χ` modulo `k`.
pub fn d_chi<T: Real>(chi: &DirichletCharacter, prec: T::Precision) -> Result<Complex<T>> {
    require_odd(chi)?;
    Ok(d_chi_work::<T>(chi, T::widen(prec, GUARD)).round_to(prec))
}

/// `L'(χ, -1)` for primitive odd `χ`, via the Clausen sum.
pub fn l_prime_minus1<T: Real>(chi: &DirichletCharacter, prec: T::Precision) -> Result<Complex<T>> {
    require_primitive_odd(chi)?;
    d_chi(chi, prec)
}

fn l2_work<T: Real>(chi: &DirichletCharacter, wp: T::Precision) -> Complex<T> {
    let k = chi.modulus();
    let h = hurwitz_row::<T>(k, wp);
    let mut acc = czero::<T>(wp);
    for a in 1..=k {
        if let Some(v) = value::<T>(chi, a as i64, wp) {
            acc = acc + v * h[(a - 1) as usize].clone();
        }
    }
    acc / T::from_i64((k * k) as i64, wp)
}

/// `L(χ, 2) = k⁻² Σ_{a=1}^{k} χ(a) ζ(2, a/k)`.
pub fn l2<T: Real>(chi: &DirichletCharacter, prec: T::Precision) -> Result<Complex<T>> {
    if chi.is_principal() {
        return Err(Error::Principal(chi.label()));
    }
    Ok(l2_work::<T>(chi, T::widen(prec, GUARD)).round_to(prec))
}

fn minus_i<T: Real>(z: Complex<T>) -> Complex<T> {
    Complex::new(z.im, -z.re)
}

/// `L'(χ, -1) = (-i k τ(χ) / 4π) L(χ̄, 2)` for primitive odd `χ`.
pub fn l_prime_via_functional_eq<T: Real>(chi: &DirichletCharacter, prec: T::Precision) -> Result<Complex<T>> {
    require_primitive_odd(chi)?;
    let wp = T::widen(prec, GUARD);
    let k = chi.modulus();
    let tau = chi.gauss_sum::<T>(wp);
    let l = l2_work::<T>(&chi.conj(), wp);
    let scale = T::from_i64(k as i64, wp) / (T::from_i64(4, wp) * T::pi(wp));
    Ok((minus_i(tau * l) * scale).round_to(prec))
}

/// Data relating an odd character to the primitive character inducing it:
/// `d_χ = γ d_{χ*} = β L(χ̄, 2)`.
#[derive(Debug, Clone)]
pub struct ImprimitiveReduction<T: Real = BigReal> {
    pub chi: DirichletCharacter,
    pub chi_star: DirichletCharacter,
    pub gamma: Cyclo,
    pub beta: Complex<T>,
}

/// Builds `γ` exactly and `β = -iγ c τ(χ*) / (4π ∏_{p|k}(1 - χ̄*(p)/p²))` numerically.
pub fn reduce_imprimitive<T: Real>(chi: &DirichletCharacter, prec: T::Precision) -> Result<ImprimitiveReduction<T>> {
    require_odd(chi)?;
    let wp = T::widen(prec, GUARD);
    let star = chi.induce_primitive();
    let gamma = chi.gamma_coeff();
    let c = star.modulus();
    let tau = star.gauss_sum::<T>(wp);
    let star_bar = star.conj();
    let one = Complex::new(T::from_i64(1, wp), T::from_i64(0, wp));
    let mut euler = one.clone();
    for (p, _) in factorize(chi.modulus()) {
        if let Some(v) = value::<T>(&star_bar, p as i64, wp) {
            euler = euler * (one.clone() - v / T::from_i64((p * p) as i64, wp));
        }
    }
    let g: Complex<T> = gamma.embed(wp);
    let num = minus_i(g * tau) * T::from_i64(c as i64, wp);
    let den = euler * (T::from_i64(4, wp) * T::pi(wp));
    Ok(ImprimitiveReduction {
        chi: chi.clone(),
        chi_star: star,
        gamma,
        beta: (num / den).round_to(prec),
    })
}

/// `d_f = (f/4π) Σ_{m} (-f/m) D(e^{2πim/f})` for a fundamental discriminant `-f`.
pub fn d_f<T: Real>(f: u64, prec: T::Precision) -> Result<T> {
    if !is_fundamental_discriminant(-(f as i64)) {
        return Err(Error::NotFundamental(f as i64));
    }
    let wp = T::widen(prec, GUARD);
    let cl = clausen_row::<T>(f, wp);
    let mut acc = T::from_i64(0, wp);
    for m in 1..f {
        match kronecker(-(f as i64), m as i64) {
            1 => acc = acc + cl[m as usize].clone(),
            -1 => acc = acc - cl[m as usize].clone(),
            _ => {}
        }
    }
    let scale = T::from_i64(f as i64, wp) / (T::from_i64(4, wp) * T::pi(wp));
    Ok((acc * scale).round_to(prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{characters_mod, conrey, quadratic_character};
    use crate::dilog::catalan;

    const P: u32 = 50;

    fn tol(p: u32) -> BigReal {
        BigReal::epsilon(p)
    }

    fn close(a: &Complex<BigReal>, b: &Complex<BigReal>, p: u32) -> bool {
        (a.clone() - b.clone()).abs_r() < tol(p)
    }

    #[test]
    fn d3_against_series() {
        // (3√3/4π) Σ χ_{-3}(n)/n², paired (3j+1, 3j+2) terms; tail below 1/N²
        let n = 2_000_000u64;
        let s: f64 = (0..n)
            .rev()
            .map(|j| 1.0 / ((3 * j + 1) as f64).powi(2) - 1.0 / ((3 * j + 2) as f64).powi(2))
            .sum();
        let oracle = 3.0 * 3f64.sqrt() / (4.0 * std::f64::consts::PI) * s;
        let d3 = l_prime_minus1::<BigReal>(&conrey(3, 2).unwrap(), P).unwrap();
        assert!((d3.re.to_f64() - oracle).abs() < 1e-12);
        assert!((d3.re.to_f64() - 0.323_065_947_2).abs() < 1e-10);
        assert!(d3.im.abs() < tol(P - 5));
        assert!((d_f::<BigReal>(3, P).unwrap() - d3.re).abs() < tol(P - 5));
    }

    #[test]
    fn d4_is_two_over_pi_catalan() {
        let d4 = d_chi::<BigReal>(&conrey(4, 3).unwrap(), P).unwrap();
        let expect = catalan::<BigReal>(P) * BigReal::from_i64(2, P) / BigReal::pi(P);
        assert!((d4.re.clone() - expect.clone()).abs() < tol(P - 5));
        assert!((d4.re.to_f64() - 0.583_121_808_0).abs() < 1e-10);
        let fe = l_prime_via_functional_eq::<BigReal>(&conrey(4, 3).unwrap(), P).unwrap();
        assert!((fe.re - expect).abs() < tol(P - 5));
        let l = l2::<BigReal>(&conrey(4, 3).unwrap(), P).unwrap();
        assert!((l.re - catalan::<BigReal>(P)).abs() < tol(P - 5));
    }

    #[test]
    fn l2_of_minus_three() {
        // L(χ_{-3}, 2) = (4π / 3√3) d_3
        let l = l2::<BigReal>(&conrey(3, 2).unwrap(), P).unwrap();
        let d3 = d_f::<BigReal>(3, P).unwrap();
        let three = BigReal::from_i64(3, P);
        let expect = d3 * BigReal::from_i64(4, P) * BigReal::pi(P) / (three.clone() * three.sqrt());
        assert!((l.re - expect).abs() < tol(P - 5));
    }

    #[test]
    fn errors_on_wrong_domain() {
        assert!(matches!(d_chi::<f64>(&conrey(5, 4).unwrap(), ()), Err(Error::EvenCharacter(_))));
        assert!(matches!(l_prime_minus1::<f64>(&conrey(10, 7).unwrap(), ()), Err(Error::Imprimitive(_))));
        assert!(matches!(l2::<f64>(&conrey(7, 1).unwrap(), ()), Err(Error::Principal(_))));
        assert!(matches!(d_f::<f64>(12, ()), Err(Error::NotFundamental(12))));
    }

    #[test]
    fn gamma_reduction_of_ten_seven() {
        let chi = conrey(10, 7).unwrap();
        let red = reduce_imprimitive::<BigReal>(&chi, P).unwrap();
        assert_eq!(red.chi_star, conrey(5, 2).unwrap());
        let expect = &Cyclo::one(1) - &(&Cyclo::from_int(2, 1) * &Cyclo::i());
        assert_eq!(red.gamma, expect);
        let d = d_chi::<BigReal>(&chi, P).unwrap();
        let d_star = d_chi::<BigReal>(&red.chi_star, P).unwrap();
        assert!(close(&d, &(expect.embed::<BigReal>(P) * d_star), P - 5));
        let red20 = reduce_imprimitive::<BigReal>(&conrey(20, 11).unwrap(), P).unwrap();
        assert_eq!(red20.chi_star, conrey(4, 3).unwrap());
    }

    #[test]
    fn reductions_agree_for_all_odd_characters() {
        let p = 40;
        for k in 3..=40u64 {
            for chi in characters_mod(k).into_iter().filter(DirichletCharacter::is_odd) {
                let red = reduce_imprimitive::<BigReal>(&chi, p).unwrap();
                let d = d_chi::<BigReal>(&chi, p).unwrap();
                let via_gamma = red.gamma.embed::<BigReal>(p + 10) * d_chi::<BigReal>(&red.chi_star, p + 10).unwrap();
                let via_beta = red.beta.clone() * l2::<BigReal>(&chi.conj(), p + 10).unwrap();
                assert!(close(&d, &via_gamma, p - 5), "{chi} gamma");
                assert!(close(&d, &via_beta, p - 5), "{chi} beta");
                let dc = d_chi::<BigReal>(&chi.conj(), p).unwrap();
                assert!(close(&dc, &d.conj(), p - 5), "{chi} conj");
                if chi.is_real() {
                    assert!(d.im.abs() < tol(p - 5), "{chi} real");
                }
            }
        }
    }

    #[test]
    fn functional_equation_agreement() {
        let p = 40;
        for k in 3..=40u64 {
            for chi in characters_mod(k)
                .into_iter()
                .filter(|c| c.is_odd() && c.is_primitive())
            {
                let a = l_prime_minus1::<BigReal>(&chi, p).unwrap();
                let b = l_prime_via_functional_eq::<BigReal>(&chi, p).unwrap();
                assert!(close(&a, &b, p - 5), "{chi}");
            }
        }
    }

    #[test]
    fn d_f_matches_quadratic_character() {
        for f in [3u64, 4, 7, 8, 15, 20, 24] {
            let chi = quadratic_character(f).unwrap();
            let a = d_f::<BigReal>(f, P).unwrap();
            let b = l_prime_minus1::<BigReal>(&chi, P).unwrap();
            assert!((a - b.re).abs() < tol(P - 5), "f={f}");
        }
    }
}
