//! Sparse bivariate integer polynomials.
//!
//! Text format: `+`-joined terms, each an optional sign, an optional integer
//! coefficient and optional `x^i` / `y^j` factors joined by `*`, for example
//! `3*x^2*y - x + 7`. A `-` between terms is accepted as `+ -`. Exponents of
//! one and coefficients of one may be omitted; whitespace is ignored.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `Σ c_{ij} x^i y^j` with no stored zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BivariatePoly {
    coeffs: BTreeMap<(u32, u32), BigInt>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn x() -> Self {
        Self::monomial(1, 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(1, 0, 1)
    }

    pub fn monomial(c: i64, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, BigInt::from(c));
        p
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry((i, j)).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&(i, j));
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigInt {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_default()
    }

    /// Nonzero terms as `((i, j), c)`, ordered by `(i, j)`.
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigInt)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree_x(&self) -> u32 {
        self.coeffs.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn degree_y(&self) -> u32 {
        self.coeffs.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(1);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes `x = 1`, giving coefficients of the powers of `y`.
    pub fn at_x_one(&self) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.degree_y() as usize + 1];
        for (&(_, j), c) in &self.coeffs {
            out[j as usize] += c;
        }
        out
    }

    /// Coefficients of `y^0, y^1, …` after substituting `x`.
    pub fn y_coeffs_at<T: Real>(&self, x: &Complex<T>, prec: T::Precision) -> Vec<Complex<T>> {
        let dy = self.degree_y() as usize;
        let dx = self.degree_x() as usize;
        let mut xp = Vec::with_capacity(dx + 1);
        let mut cur = Complex::new(T::from_i64(1, prec), T::from_i64(0, prec));
        for _ in 0..=dx {
            xp.push(cur.clone());
            cur = cur * x.clone();
        }
        let mut out = vec![Complex::new(T::from_i64(0, prec), T::from_i64(0, prec)); dy + 1];
        for (&(i, j), c) in &self.coeffs {
            let cv = match c.to_i64() {
                Some(v) => T::from_i64(v, prec),
                None => T::from_bigint(c, prec),
            };
            out[j as usize] = out[j as usize].clone() + xp[i as usize].clone() * cv;
        }
        out
    }
}

impl Add for &BivariatePoly {
    type Output = BivariatePoly;
    fn add(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.coeffs {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Add for BivariatePoly {
    type Output = BivariatePoly;
    fn add(self, rhs: BivariatePoly) -> BivariatePoly {
        &self + &rhs
    }
}

impl Neg for &BivariatePoly {
    type Output = BivariatePoly;
    fn neg(self) -> BivariatePoly {
        BivariatePoly {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Sub for &BivariatePoly {
    type Output = BivariatePoly;
    fn sub(self, rhs: &BivariatePoly) -> BivariatePoly {
        self + &(-rhs)
    }
}

impl Sub for BivariatePoly {
    type Output = BivariatePoly;
    fn sub(self, rhs: BivariatePoly) -> BivariatePoly {
        &self - &rhs
    }
}

impl Mul for &BivariatePoly {
    type Output = BivariatePoly;
    fn mul(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut out = BivariatePoly::zero();
        for (&(i1, j1), c1) in &self.coeffs {
            for (&(i2, j2), c2) in &rhs.coeffs {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for BivariatePoly {
    type Output = BivariatePoly;
    fn mul(self, rhs: BivariatePoly) -> BivariatePoly {
        &self * &rhs
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, var: &str, e: u32) -> fmt::Result {
    match e {
        0 => Ok(()),
        1 => write!(f, "{var}"),
        _ => write!(f, "{var}^{e}"),
    }
}

/// Terms ordered by `y`-degree then `x`-degree, e.g. `1 + x + y`.
impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.coeffs.iter().collect();
        terms.sort_by_key(|((i, j), _)| (*j, *i));
        for (n, (&(i, j), c)) in terms.into_iter().enumerate() {
            let sep = match (n == 0, c.is_negative()) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            write!(f, "{sep}")?;
            let a = c.abs();
            let has_vars = i > 0 || j > 0;
            if !a.is_one() || !has_vars {
                write!(f, "{a}")?;
                if has_vars {
                    write!(f, "*")?;
                }
            }
            write_monomial(f, "x", i)?;
            if i > 0 && j > 0 {
                write!(f, "*")?;
            }
            write_monomial(f, "y", j)?;
        }
        Ok(())
    }
}

fn parse_term(term: &str, negative: bool) -> Result<(u32, u32, BigInt)> {
    let err = || Error::Parse(format!("cannot parse polynomial term {term:?}"));
    let mut t = term;
    let mut neg = negative;
    while let Some(rest) = t.strip_prefix('-').or_else(|| t.strip_prefix('+')) {
        if t.starts_with('-') {
            neg = !neg;
        }
        t = rest;
    }
    if t.is_empty() {
        return Err(err());
    }
    let mut coeff = BigInt::one();
    let (mut i, mut j) = (0u32, 0u32);
    for (n, factor) in t.split('*').enumerate() {
        if factor.is_empty() {
            return Err(err());
        }
        if factor.chars().all(|c| c.is_ascii_digit()) {
            if n != 0 {
                return Err(err());
            }
            coeff = factor.parse().map_err(|_| err())?;
            continue;
        }
        let (var, exp) = match factor.split_once('^') {
            Some((v, e)) => (v, e.parse::<u32>().map_err(|_| err())?),
            None => (factor, 1),
        };
        match var {
            "x" => i += exp,
            "y" => j += exp,
            _ => return Err(err()),
        }
    }
    if neg {
        coeff = -coeff;
    }
    Ok((i, j, coeff))
}

impl FromStr for BivariatePoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        // split before every '+' or '-' that does not start the string or follow an operator
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut cur_neg = false;
        let mut prev: Option<char> = None;
        for ch in cleaned.chars() {
            let binary = matches!(ch, '+' | '-') && !cur.is_empty() && !matches!(prev, Some('*' | '^' | '+' | '-'));
            if binary {
                terms.push((cur_neg, std::mem::take(&mut cur)));
                cur_neg = ch == '-';
            } else {
                cur.push(ch);
            }
            prev = Some(ch);
        }
        terms.push((cur_neg, cur));
        let mut p = BivariatePoly::zero();
        for (neg, t) in terms {
            let (i, j, c) = parse_term(&t, neg)?;
            p.add_term(i, j, c);
        }
        Ok(p)
    }
}
