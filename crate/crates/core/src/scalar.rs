//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All transcendental code (dilogarithms, Hurwitz zeta, L-values, the
//! quadrature oracle) is written once against [`Real`] and instantiated either
//! with `f64` for quick work or with [`BigReal`](crate::BigReal) when tens of
//! digits are required. A scalar carries its own working precision; constants
//! are built from an explicit [`Real::Precision`].

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

/// Real scalar with a configurable working precision.
pub trait Real:
    Clone + Debug + Display + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// Precision descriptor. `()` for machine floats, decimal digits for bigfloats.
    type Precision: Copy + Eq + Hash + Debug + Send + Sync + 'static;

    /// Number of reliable decimal digits at `prec`.
    fn digits(prec: Self::Precision) -> u32;

    /// `prec` widened by `guard` decimal digits.
    fn widen(prec: Self::Precision, guard: u32) -> Self::Precision;

    fn precision(&self) -> Self::Precision;

    fn from_i64(n: i64, prec: Self::Precision) -> Self;

    fn from_f64(x: f64, prec: Self::Precision) -> Self;

    fn from_bigint(n: &BigInt, prec: Self::Precision) -> Self;

    fn from_ratio(r: &BigRational, prec: Self::Precision) -> Self {
        Self::from_bigint(r.numer(), prec) / Self::from_bigint(r.denom(), prec)
    }

    fn to_f64(&self) -> f64;

    /// Rounds (or pads) the value to precision `prec`.
    fn round_to(&self, prec: Self::Precision) -> Self;

    fn pi(prec: Self::Precision) -> Self;

    fn sqrt(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;

    /// Four-quadrant arctangent of `self / x`, in `(-pi, pi]`.
    fn atan2(&self, x: &Self) -> Self;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    /// `10^(-digits(prec))`.
    fn epsilon(prec: Self::Precision) -> Self {
        let ten = Self::from_i64(10, prec);
        Self::one() / ten.powu(Self::digits(prec))
    }

    fn powu(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base.clone();
            }
            n >>= 1;
            if n > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    type Precision = ();

    fn digits(_: ()) -> u32 {
        15
    }

    fn widen(_: (), _: u32) {}

    fn precision(&self) {}

    fn from_i64(n: i64, _: ()) -> f64 {
        n as f64
    }

    fn from_f64(x: f64, _: ()) -> f64 {
        x
    }

    fn from_bigint(n: &BigInt, _: ()) -> f64 {
        n.to_f64().unwrap_or(f64::NAN)
    }

    fn from_ratio(r: &BigRational, _: ()) -> f64 {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn round_to(&self, _: ()) -> f64 {
        *self
    }

    fn pi(_: ()) -> f64 {
        std::f64::consts::PI
    }

    fn sqrt(&self) -> f64 {
        f64::sqrt(*self)
    }

    fn ln(&self) -> f64 {
        f64::ln(*self)
    }

    fn exp(&self) -> f64 {
        f64::exp(*self)
    }

    fn sin(&self) -> f64 {
        f64::sin(*self)
    }

    fn cos(&self) -> f64 {
        f64::cos(*self)
    }

    fn atan2(&self, x: &f64) -> f64 {
        f64::atan2(*self, *x)
    }

    fn abs(&self) -> f64 {
        f64::abs(*self)
    }

    fn epsilon(_: ()) -> f64 {
        1e-15
    }
}

/// Complex helpers over a generic [`Real`]; `num_complex` only offers these for `Float`.
pub trait ComplexExt<T: Real> {
    fn norm_sqr_r(&self) -> T;
    fn abs_r(&self) -> T;
    /// Principal argument in `(-pi, pi]`.
    fn arg_r(&self) -> T;
    /// Principal logarithm.
    fn ln_r(&self) -> Complex<T>;
    fn round_to(&self, prec: T::Precision) -> Complex<T>;
    fn is_exact_zero(&self) -> bool;
}

impl<T: Real> ComplexExt<T> for Complex<T> {
    fn norm_sqr_r(&self) -> T {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    fn abs_r(&self) -> T {
        self.norm_sqr_r().sqrt()
    }

    fn arg_r(&self) -> T {
        self.im.atan2(&self.re)
    }

    fn ln_r(&self) -> Complex<T> {
        Complex::new(self.abs_r().ln(), self.arg_r())
    }

    fn round_to(&self, prec: T::Precision) -> Complex<T> {
        Complex::new(self.re.round_to(prec), self.im.round_to(prec))
    }

    fn is_exact_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

/// `exp(2 pi i num / den)` at precision `prec`.
pub fn root_of_unity<T: Real>(num: i64, den: u64, prec: T::Precision) -> Complex<T> {
    let den = den as i64;
    let r = num.rem_euclid(den);
    if r == 0 {
        return Complex::new(T::one().round_to(prec), T::zero().round_to(prec));
    }
    // exact values on the axes avoid spurious tiny components
    if 4 * r == den {
        return Complex::new(T::zero().round_to(prec), T::one().round_to(prec));
    }
    if 2 * r == den {
        return Complex::new(-T::one().round_to(prec), T::zero().round_to(prec));
    }
    if 4 * r == 3 * den {
        return Complex::new(T::zero().round_to(prec), -T::one().round_to(prec));
    }
    let angle = T::pi(prec) * T::from_i64(2 * r, prec) / T::from_i64(den, prec);
    Complex::new(angle.cos(), angle.sin())
}

/// Lifts a machine float into a complex scalar at `prec`.
pub fn complex_from_f64<T: Real>(re: f64, im: f64, prec: T::Precision) -> Complex<T> {
    Complex::new(T::from_f64(re, prec), T::from_f64(im, prec))
}

/// `exp(2πij/n)` for `j = 0..n`, memoized per `(n, prec)`.
pub fn roots_of_unity_row<T: Real>(n: u64, prec: T::Precision) -> std::sync::Arc<Vec<Complex<T>>> {
    crate::memo::memo("roots-of-unity", (prec, n), || {
        (0..n).map(|j| root_of_unity::<T>(j as i64, n, prec)).collect()
    })
}
