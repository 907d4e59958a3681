//! Dirichlet characters in the Conrey labeling.
//!
//! `χ_q(n, ·)` is built prime power by prime power: for odd `p` from the least
//! primitive root modulo `p²`, for powers of two from the generators `-1` and
//! `5`, then glued together by CRT. Values are roots of unity of order dividing
//! `φ(q)`, returned exactly as [`Cyclo`] elements of `Q(ζ_φ(q))`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{self, divisors, euler_phi, factorize, gcd, lcm, mod_inverse, mobius, multiplicative_order};
use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::memo::memo;
use crate::scalar::{root_of_unity, Real};

/// Discrete-log data for one prime power `p^e`.
#[derive(Debug)]
struct PrimePowerTable {
    pe: u64,
    phi: u64,
    /// Odd `p`: `log_g(m)`; `p = 2`: exponent of 5 in `m = ±5^b`. `None` off units.
    log: Vec<Option<u64>>,
    /// `p = 2` only: whether `m ≡ -5^b`.
    minus: Vec<bool>,
    two: bool,
}

/// Least positive integer that is a primitive root modulo `p²`.
pub fn least_primitive_root(p: u64) -> u64 {
    let p2 = p * p;
    let target = euler_phi(p2);
    (2..p2)
        .find(|&g| gcd(g, p) == 1 && multiplicative_order(g, p2) == target)
        .expect("odd prime squares have primitive roots")
}

fn prime_power_table(p: u64, e: u32) -> Arc<PrimePowerTable> {
    memo("conrey-prime-power", (p, e), || {
        let pe = p.pow(e);
        let phi = euler_phi(pe);
        let mut log = vec![None; pe as usize];
        let mut minus = vec![false; pe as usize];
        if p == 2 {
            if e >= 2 {
                let order5 = phi / 2;
                let mut x = 1u64;
                for b in 0..order5.max(1) {
                    log[x as usize] = Some(b);
                    let neg = (pe - x) % pe;
                    log[neg as usize] = Some(b);
                    minus[neg as usize] = true;
                    x = x * 5 % pe;
                }
            } else {
                log[1 % pe as usize] = Some(0);
            }
        } else {
            let g = least_primitive_root(p);
            let mut x = 1u64;
            for a in 0..phi {
                log[x as usize] = Some(a);
                x = x * g % pe;
            }
        }
        PrimePowerTable {
            pe,
            phi,
            log,
            minus,
            two: p == 2,
        }
    })
}

#[derive(Debug)]
struct Component {
    table: Arc<PrimePowerTable>,
    /// Discrete log of the label `n` in this component.
    a: u64,
    a_minus: bool,
}

impl Component {
    /// Numerator of the value's exponent over `φ(p^e)`, or `None` off units.
    fn exponent(&self, m: u64) -> Option<u64> {
        let t = &self.table;
        let r = (m % t.pe) as usize;
        let b = t.log[r]?;
        if t.phi == 1 {
            return Some(0);
        }
        if t.two {
            // (1-ε_a)(1-ε_b)/8 + ab/2^(e-2), over φ = 2^(e-1)
            let mut num = (2 * self.a * b) % t.phi;
            if self.a_minus && t.minus[r] {
                num = (num + t.phi / 2) % t.phi;
            }
            Some(num)
        } else {
            Some(self.a * b % t.phi)
        }
    }
}

#[derive(Debug)]
struct CharacterData {
    modulus: u64,
    index: u64,
    phi: u64,
    components: Vec<Component>,
    order: u64,
    odd: bool,
    conductor: u64,
}

impl CharacterData {
    fn exponent(&self, m: i64) -> Option<u64> {
        let m = m.rem_euclid(self.modulus as i64) as u64;
        if gcd(m, self.modulus) != 1 {
            return None;
        }
        let mut total = 0u64;
        for c in &self.components {
            let num = c.exponent(m)?;
            total = (total + num * (self.phi / c.table.phi)) % self.phi;
        }
        Some(total)
    }
}

/// A Dirichlet character `χ_q(n, ·)`; cheap to clone, compared by label.
#[derive(Clone)]
pub struct DirichletCharacter(Arc<CharacterData>);

/// `χ_q(n, ·)` in the Conrey labeling.
pub fn conrey(q: u64, n: u64) -> Result<DirichletCharacter> {
    if q == 0 {
        return Err(Error::InvalidCharacter("modulus must be positive".into()));
    }
    if n == 0 || n >= q.max(2) || gcd(n, q) != 1 {
        return Err(Error::InvalidCharacter(format!("{q}.{n}")));
    }
    Ok(DirichletCharacter(memo("conrey-character", (q, n), || build(q, n))))
}

fn build(q: u64, n: u64) -> CharacterData {
    let components: Vec<Component> = factorize(q)
        .into_iter()
        .map(|(p, e)| {
            let table = prime_power_table(p, e);
            let r = (n % table.pe) as usize;
            let a = table.log[r].expect("label is a unit");
            let a_minus = table.minus[r];
            Component { table, a, a_minus }
        })
        .collect();
    let phi = euler_phi(q);
    let mut data = CharacterData {
        modulus: q,
        index: n,
        phi,
        components,
        order: 1,
        odd: false,
        conductor: 1,
    };
    let mut g = phi;
    for m in 1..q {
        if let Some(k) = data.exponent(m as i64) {
            g = gcd(g, k);
        }
    }
    data.order = phi / g;
    data.odd = q >= 3 && data.exponent(-1) == Some(phi / 2) && phi % 2 == 0;
    data.conductor = divisors(q)
        .into_iter()
        .find(|&c| {
            (0..q / c)
                .map(|t| 1 + c * t)
                .filter(|&a| gcd(a, q) == 1)
                .all(|a| data.exponent(a as i64) == Some(0))
        })
        .unwrap_or(q);
    data
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.0.modulus
    }

    pub fn index(&self) -> u64 {
        self.0.index
    }

    /// Order `N = φ(q)` of the root of unity field the values live in.
    pub fn value_field_order(&self) -> u64 {
        self.0.phi
    }

    /// `k` with `χ(m) = ζ_N^k`, `N = φ(q)`, or `None` when `gcd(m, q) > 1`.
    pub fn exponent(&self, m: i64) -> Option<u64> {
        self.0.exponent(m)
    }

    /// Exact value `χ(m)` in `Q(ζ_φ(q))`.
    pub fn eval(&self, m: i64) -> Cyclo {
        match self.exponent(m) {
            Some(k) => Cyclo::root_of_unity(k as i64, self.0.phi),
            None => Cyclo::zero(self.0.phi),
        }
    }

    /// Numeric value `χ(m)`.
    pub fn value<T: Real>(&self, m: i64, prec: T::Precision) -> Complex<T> {
        match self.exponent(m) {
            Some(k) => root_of_unity(k as i64, self.0.phi, prec),
            None => Complex::new(T::from_i64(0, prec), T::from_i64(0, prec)),
        }
    }

    pub fn is_odd(&self) -> bool {
        self.0.odd
    }

    pub fn is_even(&self) -> bool {
        !self.0.odd
    }

    pub fn order(&self) -> u64 {
        self.0.order
    }

    /// Whether all values are real.
    pub fn is_real(&self) -> bool {
        self.0.order <= 2
    }

    pub fn is_principal(&self) -> bool {
        self.0.order == 1
    }

    pub fn conductor(&self) -> u64 {
        self.0.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.0.conductor == self.0.modulus
    }

    pub fn label(&self) -> String {
        format!("{}.{}", self.0.modulus, self.0.index)
    }

    /// `χ̄ = χ_q(n⁻¹, ·)`.
    pub fn conj(&self) -> DirichletCharacter {
        let q = self.0.modulus;
        let inv = if q <= 2 { 1 } else { mod_inverse(self.0.index, q).expect("label is a unit") };
        conrey(q, inv).expect("inverse label is valid")
    }

    /// Whether two characters agree at every integer coprime to `self`'s modulus.
    fn agrees_on_units(&self, other: &DirichletCharacter) -> bool {
        let q = self.0.modulus;
        (1..=q.max(1))
            .filter(|&m| gcd(m, q) == 1)
            .all(|m| {
                let a = self.exponent(m as i64).map(|k| (k, self.0.phi));
                let b = other.exponent(m as i64).map(|k| (k, other.0.phi));
                match (a, b) {
                    (Some((k1, n1)), Some((k2, n2))) => k1 * n2 == k2 * n1,
                    _ => false,
                }
            })
    }

    /// The primitive character `χ*` inducing `χ`.
    pub fn induce_primitive(&self) -> DirichletCharacter {
        let c = self.conductor();
        if c == self.modulus() {
            return self.clone();
        }
        let first = (self.index() % c).max(1);
        let candidates = std::iter::once(first).chain((1..c.max(2)).filter(|&n| n != first));
        for n in candidates {
            if gcd(n, c) != 1 {
                continue;
            }
            let star = conrey(c, n).expect("unit label");
            if self.agrees_on_units(&star) {
                return star;
            }
        }
        unreachable!("every character is induced by one of conductor {c}")
    }

    /// Gauss sum `Σ_{a=1}^{q} χ(a) e^{2πia/q}`.
    pub fn gauss_sum<T: Real>(&self, prec: T::Precision) -> Complex<T> {
        let q = self.modulus();
        let n = lcm(self.0.phi, q);
        let mut acc = Complex::new(T::from_i64(0, prec), T::from_i64(0, prec));
        for a in 1..=q {
            if let Some(k) = self.exponent(a as i64) {
                let e = k * (n / self.0.phi) + a * (n / q);
                acc = acc + root_of_unity::<T>(e as i64, n, prec);
            }
        }
        acc
    }

    /// Exact Gauss sum in `Q(ζ_lcm(φ(q), q))`.
    pub fn gauss_sum_exact(&self) -> Cyclo {
        let q = self.modulus();
        let n = lcm(self.0.phi, q);
        let mut coords = vec![num_rational::BigRational::from_integer(0.into()); n as usize];
        for a in 1..=q {
            if let Some(k) = self.exponent(a as i64) {
                let e = (k * (n / self.0.phi) + a * (n / q)) % n;
                coords[e as usize] += num_rational::BigRational::from_integer(1.into());
            }
        }
        Cyclo::from_coords(coords, n)
    }

    /// `γ = Σ_{d | q/c} d μ(d) χ*(d)`, exact in `Q(ζ_φ(c))`.
    pub fn gamma_coeff(&self) -> Cyclo {
        let star = self.induce_primitive();
        let q = self.modulus() / self.conductor();
        let mut acc = Cyclo::zero(star.value_field_order());
        for d in divisors(q) {
            let mu = mobius(d);
            if mu == 0 {
                continue;
            }
            let v = star.eval(d as i64);
            acc += &v.scale(&num_rational::BigRational::from_integer((d as i64 * mu).into()));
        }
        acc
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.index() == other.index()
    }
}

impl Eq for DirichletCharacter {}

impl Hash for DirichletCharacter {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.modulus(), self.index()).hash(state);
    }
}

impl PartialOrd for DirichletCharacter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DirichletCharacter {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.modulus(), self.index()).cmp(&(other.modulus(), other.index()))
    }
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "χ_{}({},·)", self.modulus(), self.index())
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.modulus(), self.index())
    }
}

impl FromStr for DirichletCharacter {
    type Err = Error;

    /// Parses an LMFDB label `q.n`.
    fn from_str(s: &str) -> Result<Self> {
        let (q, n) = s
            .trim()
            .split_once('.')
            .ok_or_else(|| Error::Parse(format!("character label {s:?} is not of the form q.n")))?;
        let q: u64 = q.parse().map_err(|_| Error::Parse(format!("bad modulus in {s:?}")))?;
        let n: u64 = n.parse().map_err(|_| Error::Parse(format!("bad index in {s:?}")))?;
        conrey(q, n)
    }
}

impl Serialize for DirichletCharacter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for DirichletCharacter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All characters modulo `q`, by increasing label.
pub fn characters_mod(q: u64) -> Vec<DirichletCharacter> {
    (1..q.max(2))
        .filter(|&n| gcd(n, q) == 1)
        .map(|n| conrey(q, n).expect("unit label"))
        .collect()
}

/// Odd characters modulo `q`, by increasing label.
pub fn odd_characters_mod(q: u64) -> Vec<DirichletCharacter> {
    characters_mod(q).into_iter().filter(DirichletCharacter::is_odd).collect()
}

/// Primitive odd characters of conductor exactly `k`, by increasing label.
pub fn odd_primitive_of_conductor(k: u64) -> Vec<DirichletCharacter> {
    if k <= 2 || k % 4 == 2 {
        return Vec::new();
    }
    odd_characters_mod(k)
        .into_iter()
        .filter(DirichletCharacter::is_primitive)
        .collect()
}

/// Kronecker symbol `(d / m)`.
pub fn kronecker(d: i64, m: i64) -> i8 {
    arith::kronecker(d, m)
}

/// The odd quadratic character `χ_{-f} = (-f / ·)`, located by matching values.
pub fn quadratic_character(f: u64) -> Result<DirichletCharacter> {
    if !arith::is_fundamental_discriminant(-(f as i64)) {
        return Err(Error::NotFundamental(f as i64));
    }
    odd_primitive_of_conductor(f)
        .into_iter()
        .find(|chi| {
            chi.is_real()
                && (0..f as i64).all(|m| {
                    let expected = kronecker(-(f as i64), m);
                    match chi.exponent(m) {
                        None => expected == 0,
                        Some(0) => expected == 1,
                        Some(_) => expected == -1,
                    }
                })
        })
        .ok_or(Error::NotFundamental(f as i64))
}
