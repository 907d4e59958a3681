//! Simultaneous polynomial root finding by the Aberth–Ehrlich iteration.

use num_complex::Complex;

use crate::scalar::{ComplexExt, Real};

pub const MAX_ITERATIONS: usize = 200;

/// Horner evaluation of `p` and `p'`; coefficients are low degree first.
fn eval_with_derivative<T: Real>(coeffs: &[Complex<T>], z: &Complex<T>) -> (Complex<T>, Complex<T>) {
    let n = coeffs.len() - 1;
    let mut p = coeffs[n].clone();
    let mut dp = Complex::new(T::zero(), T::zero());
    for c in coeffs[..n].iter().rev() {
        dp = dp * z.clone() + p.clone();
        p = p * z.clone() + c.clone();
    }
    (p, dp)
}

/// All roots of `Σ coeffs[j] z^j`; the top coefficient must be nonzero.
///
/// Returns `None` when the iteration fails to settle within
/// [`MAX_ITERATIONS`] sweeps to relative step size `tol`. One extra sweep is
/// run after the step size drops below `tol`; convergence is cubic there.
pub fn roots<T: Real>(coeffs: &[Complex<T>], tol: &T, prec: T::Precision) -> Option<Vec<Complex<T>>> {
    let n = coeffs.len().checked_sub(1)?;
    if n == 0 {
        return Some(Vec::new());
    }
    let lead = coeffs[n].clone();
    if lead.is_exact_zero() {
        return None;
    }
    let one = T::from_i64(1, prec);
    if n == 1 {
        return Some(vec![-(coeffs[0].clone() / lead)]);
    }
    // Fujiwara-type bound for the root radius
    let lead_abs = lead.abs_r();
    let mut radius = T::from_i64(0, prec);
    for (j, c) in coeffs[..n].iter().enumerate() {
        let ratio = c.abs_r() / lead_abs.clone();
        if ratio.is_zero() {
            continue;
        }
        let r = (ratio.ln() / T::from_i64((n - j) as i64, prec)).exp();
        radius = radius.max_of(r);
    }
    if radius.is_zero() {
        radius = one.clone();
    }
    let mut z: Vec<Complex<T>> = (0..n)
        .map(|k| {
            // spread starting points on a circle, off the real axis
            let angle = (T::pi(prec) * T::from_i64(2 * k as i64, prec) + T::from_f64(0.4, prec))
                / T::from_i64(n as i64, prec);
            Complex::new(angle.cos(), angle.sin()) * radius.clone()
        })
        .collect();
    let mut settled = false;
    for _ in 0..MAX_ITERATIONS {
        let mut max_step = T::from_i64(0, prec);
        for k in 0..n {
            let (p, dp) = eval_with_derivative(coeffs, &z[k]);
            if p.is_exact_zero() {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex::new(T::from_i64(0, prec), T::from_i64(0, prec));
            for (j, zj) in z.iter().enumerate() {
                if j != k {
                    let diff = z[k].clone() - zj.clone();
                    if !diff.is_exact_zero() {
                        s = s + Complex::new(one.clone(), T::from_i64(0, prec)) / diff;
                    }
                }
            }
            let denom = Complex::new(one.clone(), T::from_i64(0, prec)) - ratio.clone() * s;
            let w = if denom.is_exact_zero() { ratio } else { ratio / denom };
            let step = w.abs_r() / (one.clone() + z[k].abs_r());
            max_step = max_step.max_of(step);
            z[k] = z[k].clone() - w;
        }
        if settled {
            return Some(z);
        }
        settled = max_step < *tol;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BigReal;

    #[test]
    fn cyclotomic_roots() {
        // z^5 - 1
        let mut c = vec![Complex::new(0.0, 0.0); 6];
        c[0] = Complex::new(-1.0, 0.0);
        c[5] = Complex::new(1.0, 0.0);
        let r = roots::<f64>(&c, &1e-14, ()).unwrap();
        for z in &r {
            assert!((z.norm() - 1.0).abs() < 1e-12);
            assert!((z.powu(5) - Complex::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn real_roots_high_precision() {
        // (z - 1)(z - 2)(z + 3) = z³ - 7z + 6
        let p = 40;
        let c: Vec<Complex<BigReal>> = [6, -7, 0, 1]
            .iter()
            .map(|&v| Complex::new(BigReal::from_i64(v, p), BigReal::from_i64(0, p)))
            .collect();
        let tol = BigReal::epsilon(20);
        let mut r: Vec<f64> = roots::<BigReal>(&c, &tol, p).unwrap().iter().map(|z| z.re.to_f64()).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((r[0] + 3.0).abs() < 1e-15 && (r[1] - 1.0).abs() < 1e-15 && (r[2] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn linear_and_constant() {
        let c = vec![Complex::new(2.0, 0.0), Complex::new(4.0, 0.0)];
        assert_eq!(roots::<f64>(&c, &1e-14, ()).unwrap(), vec![Complex::new(-0.5, 0.0)]);
        assert!(roots::<f64>(&[Complex::new(3.0, 0.0)], &1e-14, ()).unwrap().is_empty());
    }
}
