//! Arbitrary-precision real numbers backed by `astro-float`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::scalar::Real;

const RM: RoundingMode = RoundingMode::ToEven;
const EXACT_BITS: usize = 128;
const LOG2_10: f64 = std::f64::consts::LOG2_10;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Mantissa bits needed for `digits` decimal digits.
pub fn bits_for_digits(digits: u32) -> usize {
    ((digits as f64 * LOG2_10).ceil() as usize + 8).max(64)
}

/// Real number carrying `digits` significant decimal digits.
///
/// `digits == 0` marks an exact small constant (what `Zero::zero()` and
/// `One::one()` produce); binary operations run at the larger precision of
/// their operands, so such constants adopt the precision of whatever they are
/// combined with.
#[derive(Clone)]
pub struct BigReal {
    value: BigFloat,
    digits: u32,
}

impl BigReal {
    fn raw(value: BigFloat, digits: u32) -> Self {
        BigReal { value, digits }
    }

    fn bits(&self) -> usize {
        if self.digits == 0 {
            EXACT_BITS
        } else {
            bits_for_digits(self.digits)
        }
    }

    fn joint(&self, other: &Self) -> (usize, u32) {
        let digits = self.digits.max(other.digits);
        let bits = if digits == 0 { EXACT_BITS } else { bits_for_digits(digits) };
        (bits, digits)
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn is_nan(&self) -> bool {
        self.value.is_nan()
    }

    /// Parses a decimal literal such as `-1.25e-3`.
    pub fn parse(s: &str, digits: u32) -> Option<Self> {
        let v = with_consts(|cc| BigFloat::parse(s.trim(), Radix::Dec, bits_for_digits(digits), RM, cc));
        if v.is_nan() {
            None
        } else {
            Some(BigReal::raw(v, digits))
        }
    }

    /// Largest integer not exceeding `self`.
    pub fn floor_bigint(&self) -> BigInt {
        let Some((words, _, sign, exp, _)) = self.value.as_raw_parts() else {
            return BigInt::zero();
        };
        if self.value.is_zero() {
            return BigInt::zero();
        }
        let limbs: Vec<u32> = words.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect();
        let mant = BigUint::new(limbs);
        let shift = exp as i64 - 64 * words.len() as i64;
        let positive = matches!(sign, Sign::Pos);
        let magnitude_floor = |m: &BigUint| -> BigUint {
            if shift >= 0 {
                m << (shift as usize)
            } else {
                m >> ((-shift) as usize)
            }
        };
        if positive {
            BigInt::from(magnitude_floor(&mant))
        } else if shift >= 0 {
            -BigInt::from(mant << (shift as usize))
        } else {
            let s = (-shift) as usize;
            let one = BigUint::one();
            let ceil = (&mant + ((&one << s) - &one)) >> s;
            -BigInt::from(ceil)
        }
    }

    /// Nearest integer (ties toward +inf).
    pub fn round_bigint(&self) -> BigInt {
        let half = BigReal::from_f64(0.5, self.digits.max(20));
        (self.clone() + half).floor_bigint()
    }

    /// Fixed-point rendering with `decimals` digits after the point.
    pub fn to_fixed(&self, decimals: u32) -> String {
        let scale = BigReal::from_i64(10, self.digits.max(decimals + 10)).powu(decimals);
        let scaled = (self.clone() * scale).round_bigint();
        let negative = scaled.is_negative();
        let mut s = scaled.abs().to_string();
        let d = decimals as usize;
        if s.len() <= d {
            s = "0".repeat(d + 1 - s.len()) + &s;
        }
        let (int, frac) = s.split_at(s.len() - d);
        let body = if d == 0 { int.to_string() } else { format!("{int}.{frac}") };
        if negative {
            format!("-{body}")
        } else {
            body
        }
    }

    /// Scientific rendering with `sig` significant digits, e.g. `3.2e-41`.
    pub fn to_sci(&self, sig: u32) -> String {
        if self.value.is_zero() {
            return "0".to_string();
        }
        let sig = sig.max(1);
        let ten = BigReal::from_i64(10, self.digits.max(sig + 10));
        let mag = self.abs();
        let mut exp10 = mag.ln().to_f64() / std::f64::consts::LN_10;
        if !exp10.is_finite() {
            exp10 = 0.0;
        }
        let mut e = exp10.floor() as i64;
        // scaled into [10^(sig-1), 10^sig)
        let mut scaled;
        loop {
            let shift = sig as i64 - 1 - e;
            scaled = if shift >= 0 {
                mag.clone() * ten.powu(shift as u32)
            } else {
                mag.clone() / ten.powu((-shift) as u32)
            };
            let n = scaled.round_bigint();
            let digits = n.to_string();
            if digits.len() as u32 > sig {
                e += 1;
                continue;
            }
            if (digits.len() as u32) < sig {
                e -= 1;
                continue;
            }
            let (a, b) = digits.split_at(1);
            let sign = if self.is_negative() { "-" } else { "" };
            return if b.is_empty() {
                format!("{sign}{a}e{e}")
            } else {
                format!("{sign}{a}.{b}e{e}")
            };
        }
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({}, {}d)", self.to_sci(self.digits.clamp(6, 60)), self.digits)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => f.write_str(&self.to_fixed(p as u32)),
            None => f.write_str(&self.to_sci(self.digits.max(15))),
        }
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.value.cmp(&other.value) == Some(0)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.cmp(&other.value).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:ident) => {
        impl $tr for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a BigReal> for &'a BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &'a BigReal) -> BigReal {
                let (bits, digits) = self.joint(rhs);
                BigReal::raw(self.value.$op(&rhs.value, bits, RM), digits)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Rem for BigReal {
    type Output = BigReal;
    fn rem(self, rhs: BigReal) -> BigReal {
        let q = (&self / &rhs).value.int();
        let digits = self.digits.max(rhs.digits);
        let qr = BigReal::raw(q, digits);
        &self - &(&qr * &rhs)
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::raw(self.value.neg(), self.digits)
    }
}

impl Zero for BigReal {
    fn zero() -> Self {
        BigReal::raw(BigFloat::from_i32(0, EXACT_BITS), 0)
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

impl One for BigReal {
    fn one() -> Self {
        BigReal::raw(BigFloat::from_i32(1, EXACT_BITS), 0)
    }
}

impl Num for BigReal {
    type FromStrRadixErr = String;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, String> {
        if radix != 10 {
            return Err(format!("unsupported radix {radix}"));
        }
        BigReal::parse(s, 50).ok_or_else(|| format!("invalid decimal literal {s:?}"))
    }
}

impl Real for BigReal {
    type Precision = u32;

    fn digits(prec: u32) -> u32 {
        prec
    }

    fn widen(prec: u32, guard: u32) -> u32 {
        prec + guard
    }

    fn precision(&self) -> u32 {
        self.digits
    }

    fn from_i64(n: i64, prec: u32) -> Self {
        BigReal::raw(BigFloat::from_i64(n, bits_for_digits(prec)), prec)
    }

    fn from_f64(x: f64, prec: u32) -> Self {
        BigReal::raw(BigFloat::from_f64(x, bits_for_digits(prec)), prec)
    }

    fn from_bigint(n: &BigInt, prec: u32) -> Self {
        if let Some(small) = n.to_i64() {
            return Self::from_i64(small, prec);
        }
        let (sign, words) = n.to_u64_digits();
        let s = if sign == num_bigint::Sign::Minus { Sign::Neg } else { Sign::Pos };
        let mut v = BigFloat::from_words(&words, s, 64 * words.len() as i32);
        v.set_precision(bits_for_digits(prec), RM).expect("precision within limits");
        BigReal::raw(v, prec)
    }

    fn to_f64(&self) -> f64 {
        let Some((words, _, sign, exp, _)) = self.value.as_raw_parts() else {
            return f64::NAN;
        };
        if self.value.is_zero() {
            return 0.0;
        }
        let n = words.len();
        let hi = words[n - 1] as f64;
        let lo = if n >= 2 { words[n - 2] as f64 } else { 0.0 };
        let frac = (hi + lo / 18446744073709551616.0) / 18446744073709551616.0;
        let v = frac * 2f64.powi(exp.clamp(-1100, 1100));
        if matches!(sign, Sign::Neg) {
            -v
        } else {
            v
        }
    }

    fn round_to(&self, prec: u32) -> Self {
        let mut v = self.value.clone();
        v.set_precision(bits_for_digits(prec), RM).expect("precision within limits");
        BigReal::raw(v, prec)
    }

    fn pi(prec: u32) -> Self {
        BigReal::raw(with_consts(|cc| cc.pi(bits_for_digits(prec), RM)), prec)
    }

    fn sqrt(&self) -> Self {
        BigReal::raw(self.value.sqrt(self.bits(), RM), self.digits)
    }

    fn ln(&self) -> Self {
        let bits = self.bits();
        BigReal::raw(with_consts(|cc| self.value.ln(bits, RM, cc)), self.digits)
    }

    fn exp(&self) -> Self {
        let bits = self.bits();
        BigReal::raw(with_consts(|cc| self.value.exp(bits, RM, cc)), self.digits)
    }

    fn sin(&self) -> Self {
        let bits = self.bits();
        BigReal::raw(with_consts(|cc| self.value.sin(bits, RM, cc)), self.digits)
    }

    fn cos(&self) -> Self {
        let bits = self.bits();
        BigReal::raw(with_consts(|cc| self.value.cos(bits, RM, cc)), self.digits)
    }

    fn atan2(&self, x: &Self) -> Self {
        let (bits, digits) = self.joint(x);
        let pi = || BigReal::raw(with_consts(|cc| cc.pi(bits, RM)), digits);
        let half = |v: BigReal| BigReal::raw(v.value.div(&BigFloat::from_i32(2, bits), bits, RM), digits);
        if x.value.is_zero() {
            return if self.value.is_zero() {
                BigReal::raw(BigFloat::from_i32(0, bits), digits)
            } else if self.value.is_negative() {
                -half(pi())
            } else {
                half(pi())
            };
        }
        if self.value.is_zero() {
            return if x.value.is_negative() {
                pi()
            } else {
                BigReal::raw(BigFloat::from_i32(0, bits), digits)
            };
        }
        let ratio = self.value.div(&x.value, bits, RM);
        let base = BigReal::raw(with_consts(|cc| ratio.atan(bits, RM, cc)), digits);
        if x.value.is_positive() {
            base
        } else if self.value.is_negative() {
            base - pi()
        } else {
            base + pi()
        }
    }

    fn abs(&self) -> Self {
        BigReal::raw(self.value.abs(), self.digits)
    }

    fn is_negative(&self) -> bool {
        self.value.is_negative() && !self.value.is_zero()
    }
}
