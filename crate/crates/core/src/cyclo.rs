//! Exact arithmetic in cyclotomic fields `Q(ζ_n)`.
//!
//! An element is stored by its rational coordinates on the power basis
//! `1, ζ_n, …, ζ_n^(φ(n)-1)`. Elements of different orders are combined by
//! lifting both to the lcm order.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{divisors, euler_phi, lcm};
use crate::linalg;
use crate::scalar::{root_of_unity, Real};

/// Reduction data for one cyclotomic field.
#[derive(Debug)]
struct Field {
    deg: usize,
    /// `powers[j]` holds the coordinates of `ζ^j` for `0 ≤ j < n`.
    powers: Vec<Vec<i64>>,
}

fn cyclotomic_poly(n: u64) -> Vec<i64> {
    // x^n - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let den = cyclotomic_poly(d);
        num = exact_div(&num, &den);
    }
    num
}

/// Division of integer polynomials with monic divisor, low degree first.
fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut quot = vec![0i64; qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        for (i, &b) in den.iter().enumerate() {
            rem[k + i] -= c * b;
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    quot
}

fn build_field(n: u64) -> Field {
    let phi = cyclotomic_poly(n);
    let deg = phi.len() - 1;
    let mut powers = Vec::with_capacity(n as usize);
    let mut cur = vec![0i64; deg];
    cur[0] = 1;
    for _ in 0..n {
        powers.push(cur.clone());
        // multiply by x and reduce with Φ_n(x) = 0
        let top = cur[deg - 1];
        let mut next = vec![0i64; deg];
        next[1..deg].copy_from_slice(&cur[..(deg - 1)]);
        for i in 0..deg {
            next[i] -= top * phi[i];
        }
        cur = next;
    }
    Field { deg, powers }
}

fn field(n: u64) -> Arc<Field> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<Field>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(f) = cache.read().expect("cyclotomic cache poisoned").get(&n) {
        return f.clone();
    }
    let f = Arc::new(build_field(n));
    cache
        .write()
        .expect("cyclotomic cache poisoned")
        .entry(n)
        .or_insert(f)
        .clone()
}

/// Element of `Q(ζ_order)`.
#[derive(Clone, Debug)]
pub struct Cyclo {
    order: u64,
    coords: Vec<BigRational>,
}

impl Cyclo {
    pub fn zero(order: u64) -> Self {
        assert!(order >= 1, "cyclotomic order must be positive");
        let deg = field(order).deg;
        Cyclo {
            order,
            coords: vec![BigRational::zero(); deg],
        }
    }

    pub fn one(order: u64) -> Self {
        Self::from_rational(BigRational::one(), order)
    }

    pub fn from_rational(r: BigRational, order: u64) -> Self {
        let mut c = Self::zero(order);
        c.coords[0] = r;
        c
    }

    pub fn from_int(n: i64, order: u64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()), order)
    }

    pub fn from_ratio(num: i64, den: i64, order: u64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()), order)
    }

    /// `ζ_order^k`.
    pub fn root_of_unity(k: i64, order: u64) -> Self {
        let f = field(order);
        let j = k.rem_euclid(order as i64) as usize;
        Cyclo {
            order,
            coords: f.powers[j]
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        }
    }

    /// The imaginary unit, as an element of `Q(ζ_4)`.
    pub fn i() -> Self {
        Self::root_of_unity(1, 4)
    }

    /// Builds an element from coordinates, reducing any excess length modulo `Φ_order`.
    pub fn from_coords(coords: Vec<BigRational>, order: u64) -> Self {
        let f = field(order);
        let mut out = Self::zero(order);
        for (j, c) in coords.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let p = &f.powers[j % order as usize];
            for (o, &b) in out.coords.iter_mut().zip(p) {
                if b != 0 {
                    *o += &c * BigRational::from_integer(b.into());
                }
            }
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn degree(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coords[1..].iter().all(Zero::is_zero)
    }

    /// The rational value when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coords[0].clone())
    }

    /// Re-expresses the element in `Q(ζ_m)` for a multiple `m` of the order.
    pub fn lift(&self, m: u64) -> Self {
        assert!(m % self.order == 0, "lift target {m} is not a multiple of {}", self.order);
        if m == self.order {
            return self.clone();
        }
        let step = (m / self.order) as i64;
        let mut out = Self::zero(m);
        let f = field(m);
        for (j, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = ((j as i64 * step).rem_euclid(m as i64)) as usize;
            for (o, &b) in out.coords.iter_mut().zip(&f.powers[idx]) {
                if b != 0 {
                    *o += c * BigRational::from_integer(b.into());
                }
            }
        }
        out
    }

    /// Expresses the element in `Q(ζ_t)` when it lies there.
    pub fn to_order(&self, t: u64) -> Option<Self> {
        if t == self.order {
            return Some(self.clone());
        }
        let common = lcm(t, self.order);
        let me = self.lift(common);
        let deg_t = field(t).deg;
        // columns: basis ζ_t^i lifted into Q(ζ_common)
        let basis: Vec<Cyclo> = (0..deg_t)
            .map(|i| Self::root_of_unity(i as i64, t).lift(common))
            .collect();
        let a: Vec<Vec<BigRational>> = (0..me.degree())
            .map(|r| basis.iter().map(|b| b.coords[r].clone()).collect())
            .collect();
        let x = linalg::solve(&a, &me.coords)?;
        Some(Cyclo { order: t, coords: x })
    }

    /// Smallest order in which the element can be written.
    pub fn minimal_order(&self) -> Self {
        for t in divisors(self.order) {
            if euler_phi(t) as usize > self.degree() {
                continue;
            }
            if let Some(c) = self.to_order(t) {
                return c;
            }
        }
        self.clone()
    }

    fn unify(a: &Self, b: &Self) -> (Self, Self) {
        if a.order == b.order {
            (a.clone(), b.clone())
        } else {
            let m = lcm(a.order, b.order);
            (a.lift(m), b.lift(m))
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Cyclo {
            order: self.order,
            coords: self.coords.iter().map(|c| c * r).collect(),
        }
    }

    /// Complex conjugate, `ζ ↦ ζ^(-1)`.
    pub fn conj(&self) -> Self {
        let n = self.order as i64;
        let mut out = Self::zero(self.order);
        let f = field(self.order);
        for (j, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = (-(j as i64)).rem_euclid(n) as usize;
            for (o, &b) in out.coords.iter_mut().zip(&f.powers[idx]) {
                if b != 0 {
                    *o += c * BigRational::from_integer(b.into());
                }
            }
        }
        out
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let deg = self.degree();
        // column i of the multiplication-by-self matrix is self * ζ^i
        let cols: Vec<Cyclo> = (0..deg)
            .map(|i| self * &Self::root_of_unity(i as i64, self.order))
            .collect();
        let a: Vec<Vec<BigRational>> = (0..deg)
            .map(|r| cols.iter().map(|c| c.coords[r].clone()).collect())
            .collect();
        let mut e1 = vec![BigRational::zero(); deg];
        e1[0] = BigRational::one();
        let x = linalg::solve(&a, &e1)?;
        Some(Cyclo {
            order: self.order,
            coords: x,
        })
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.order);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Numeric embedding with `ζ_n = exp(2πi/n)`.
    pub fn embed<T: Real>(&self, prec: T::Precision) -> Complex<T> {
        let mut acc = Complex::new(T::from_i64(0, prec), T::from_i64(0, prec));
        for (j, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let z: Complex<T> = root_of_unity(j as i64, self.order, prec);
            let r = T::from_ratio(c, prec);
            acc = acc + z * r;
        }
        acc
    }

    /// Real and imaginary parts as rationals when the element lies in `Q(i)`.
    pub fn as_gaussian(&self) -> Option<(BigRational, BigRational)> {
        if self.is_rational() {
            return Some((self.coords[0].clone(), BigRational::zero()));
        }
        let g = self.to_order(4)?;
        Some((g.coords[0].clone(), g.coords[1].clone()))
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::unify(self, other);
        a.coords == b.coords
    }
}

impl Eq for Cyclo {}

impl<'a> Add<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: &Cyclo) -> Cyclo {
        let (mut a, b) = Cyclo::unify(self, rhs);
        for (x, y) in a.coords.iter_mut().zip(b.coords) {
            *x += y;
        }
        a
    }
}

impl Add for Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: Cyclo) -> Cyclo {
        &self + &rhs
    }
}

impl AddAssign<&Cyclo> for Cyclo {
    fn add_assign(&mut self, rhs: &Cyclo) {
        *self = &*self + rhs;
    }
}

impl<'a> Sub<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: &Cyclo) -> Cyclo {
        self + &(-rhs)
    }
}

impl Sub for Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: Cyclo) -> Cyclo {
        &self - &rhs
    }
}

impl Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo {
            order: self.order,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        -&self
    }
}

impl<'a> Mul<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: &Cyclo) -> Cyclo {
        let (a, b) = Cyclo::unify(self, rhs);
        let deg = a.degree();
        let mut prod = vec![BigRational::zero(); 2 * deg - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        Cyclo::from_coords(prod, a.order)
    }
}

impl Mul for Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: Cyclo) -> Cyclo {
        &self * &rhs
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Prints as a polynomial in `z` with the order annotated, or as a plain
/// rational when the element lies in `Q`.
impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{}", fmt_rational(&r));
        }
        let mut first = true;
        for (j, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            let sep = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let mon = match j {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{j}"),
            };
            let body = if j == 0 {
                fmt_rational(&a)
            } else if a.is_one() {
                mon
            } else {
                format!("{}*{mon}", fmt_rational(&a))
            };
            write!(f, "{sep}{body}")?;
            first = false;
        }
        write!(f, " [z=zeta_{}]", self.order)
    }
}

#[derive(Serialize, Deserialize)]
struct CycloRepr {
    order: u64,
    coords: Vec<String>,
}

impl Serialize for Cyclo {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CycloRepr {
            order: self.order,
            coords: self
                .coords
                .iter()
                .map(|c| format!("{}/{}", c.numer(), c.denom()))
                .collect(),
        }
        .serialize(s)
    }
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.trim().parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

impl<'de> Deserialize<'de> for Cyclo {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = CycloRepr::deserialize(d)?;
        if repr.order == 0 {
            return Err(D::Error::custom("cyclotomic order must be positive"));
        }
        let coords = repr
            .coords
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let deg = field(repr.order).deg;
        if coords.len() > deg {
            return Err(D::Error::custom("too many coordinates for the field degree"));
        }
        let mut c = Cyclo::zero(repr.order);
        for (o, v) in c.coords.iter_mut().zip(coords) {
            *o = v;
        }
        Ok(c)
    }
}
