//! Exact expansion of `S_d/(2π)` and `m(P_d)` over `L'(χ, -1)` for primitive
//! odd characters `χ`.
//!
//! For each divisor `k ≥ 3` of `d`, the weights `d - 2j` of `S_d` restricted
//! to the primitive `k`-th roots of unity form an odd function on
//! `(Z/kZ)^×`. Orthogonality expands it over odd characters mod `k`, and each
//! `d_χ` is then rewritten as `γ_χ L'(χ*, -1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{divisors, euler_phi, gcd};
use crate::characters::{odd_characters_mod, DirichletCharacter};
use crate::cyclo::Cyclo;
use crate::dilog::GUARD;
use crate::error::{Error, Result};
use crate::lvalues::l_prime_minus1;
use crate::pd_mahler::{m_pd, s_d};
use crate::scalar::{ComplexExt, Real};

/// `j ↦ (d/k)(k - 2j)` on the units `j` modulo `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OddRestriction {
    pub d: u64,
    pub k: u64,
    pub values: BTreeMap<u64, BigRational>,
}

pub fn restrict(d: u64, k: u64) -> Result<OddRestriction> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("restriction needs k >= 3, got {k}")));
    }
    if d % k != 0 {
        return Err(Error::NotDivisor { d, k });
    }
    let scale = BigRational::new(BigInt::from(d), BigInt::from(k));
    let values = (1..k)
        .filter(|&j| gcd(j, k) == 1)
        .map(|j| (j, &scale * BigRational::from_integer(BigInt::from(k as i64 - 2 * j as i64))))
        .collect();
    Ok(OddRestriction { d, k, values })
}

/// `(1/φ(k)) Σ_j value(j) χ̄(j)`, accumulated by exponent of `ζ_{φ(q)}`.
fn project(chi: &DirichletCharacter, values: &BTreeMap<u64, BigRational>) -> Cyclo {
    let n = chi.value_field_order();
    let mut buckets = vec![BigRational::zero(); n as usize];
    for (&j, v) in values {
        if let Some(e) = chi.exponent(j as i64) {
            buckets[((n - e) % n) as usize] += v;
        }
    }
    let phi = BigRational::from_integer(BigInt::from(euler_phi(chi.modulus())));
    Cyclo::from_coords(buckets, n).scale(&phi.recip())
}

/// Coefficients `c_χ` with `value(j) = Σ_χ c_χ χ(j)`; zero coefficients are omitted.
pub fn decompose_restriction(r: &OddRestriction) -> BTreeMap<DirichletCharacter, Cyclo> {
    odd_characters_mod(r.k)
        .into_iter()
        .map(|chi| {
            let c = project(&chi, &r.values);
            (chi, c)
        })
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

/// What a [`PrimitiveDecomposition`] expands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subject {
    /// `S_d / (2π)`.
    SdOver2Pi(u64),
    /// `m(P_d)`.
    MPd(u64),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::SdOver2Pi(d) => write!(f, "S_{d}/(2pi)"),
            Subject::MPd(d) => write!(f, "m(P_{d})"),
        }
    }
}

impl FromStr for Subject {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown decomposition subject {s:?}"));
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("S_").and_then(|r| r.strip_suffix("/(2pi)")) {
            return rest.parse().map(Subject::SdOver2Pi).map_err(|_| bad());
        }
        if let Some(rest) = s.strip_prefix("m(P_").and_then(|r| r.strip_suffix(')')) {
            return rest.parse().map(Subject::MPd).map_err(|_| bad());
        }
        Err(bad())
    }
}

impl Serialize for Subject {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Subject {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `subject = Σ coefficient · L'(χ, -1)` over primitive odd `χ`.
///
/// Coefficients are stored per character, so a complex pair `χ, χ̄` carries
/// `c` and `conj(c)` rather than a single `Re` term. Each coefficient is kept
/// in the smallest cyclotomic field containing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveDecomposition {
    pub subject: Subject,
    pub terms: BTreeMap<DirichletCharacter, Cyclo>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    character_label: DirichletCharacter,
    coefficient: Cyclo,
}

#[derive(Serialize, Deserialize)]
struct DecompositionRepr {
    subject: Subject,
    terms: Vec<TermRepr>,
}

impl Serialize for PrimitiveDecomposition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DecompositionRepr {
            subject: self.subject,
            terms: self
                .terms
                .iter()
                .map(|(chi, c)| TermRepr {
                    character_label: chi.clone(),
                    coefficient: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PrimitiveDecomposition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = DecompositionRepr::deserialize(d)?;
        let mut terms = BTreeMap::new();
        for t in repr.terms {
            if terms.insert(t.character_label, t.coefficient).is_some() {
                return Err(serde::de::Error::custom("duplicate character in decomposition"));
            }
        }
        Ok(PrimitiveDecomposition {
            subject: repr.subject,
            terms,
        })
    }
}

impl PrimitiveDecomposition {
    pub fn coefficient(&self, chi: &DirichletCharacter) -> Cyclo {
        self.terms.get(chi).cloned().unwrap_or_else(|| Cyclo::zero(1))
    }

    /// True when `coeff(χ̄) = conj(coeff(χ))` for every key.
    pub fn is_conjugation_closed(&self) -> bool {
        self.terms
            .iter()
            .all(|(chi, c)| self.terms.get(&chi.conj()).is_some_and(|cb| *cb == c.conj()))
    }

    /// Terms in the `Re(c L')` convention: real characters keep their
    /// coefficient, and each complex pair is listed once (under the smaller
    /// label) with coefficient `2 c`.
    pub fn shorthand(&self) -> Vec<(DirichletCharacter, Cyclo, bool)> {
        let two = BigRational::from_integer(BigInt::from(2));
        let mut out = Vec::new();
        for (chi, c) in &self.terms {
            if chi.is_real() {
                out.push((chi.clone(), c.clone(), false));
            } else if *chi < chi.conj() {
                out.push((chi.clone(), c.scale(&two).minimal_order(), true));
            }
        }
        out
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `a + b i` for Gaussian rationals, otherwise the cyclotomic form.
pub fn format_coefficient(c: &Cyclo) -> String {
    if let Some(r) = c.as_rational() {
        return fmt_rational(&r);
    }
    if let Some((re, im)) = c.as_gaussian() {
        let mag = im.abs();
        let imag = if mag.is_one() { "i".to_string() } else { format!("{}i", fmt_rational(&mag)) };
        let sign = if im.is_negative() { "-" } else { "+" };
        return if re.is_zero() {
            format!("{}{imag}", if im.is_negative() { "-" } else { "" })
        } else {
            format!("{} {sign} {imag}", fmt_rational(&re))
        };
    }
    format!("({c})")
}

/// `m(P_2) = L'(4.3) - 1/2 L'(3.2)`, with complex pairs as `Re((c) L'(q.n))`.
impl fmt::Display for PrimitiveDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =", self.subject)?;
        let terms = self.shorthand();
        if terms.is_empty() {
            return write!(f, " 0");
        }
        for (n, (chi, c, pair)) in terms.iter().enumerate() {
            let sep = if n == 0 { " " } else { " + " };
            if *pair {
                write!(f, "{sep}Re(({}) L'({chi}))", format_coefficient(c))?;
            } else {
                write!(f, "{sep}({}) L'({chi})", format_coefficient(c))?;
            }
        }
        Ok(())
    }
}

fn finish(subject: Subject, acc: BTreeMap<DirichletCharacter, Cyclo>) -> PrimitiveDecomposition {
    let terms = acc
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(chi, c)| (chi, c.minimal_order()))
        .collect();
    PrimitiveDecomposition { subject, terms }
}

fn sd_terms(d: u64) -> BTreeMap<DirichletCharacter, Cyclo> {
    let mut acc: BTreeMap<DirichletCharacter, Cyclo> = BTreeMap::new();
    for k in divisors(d).into_iter().filter(|&k| k >= 3) {
        let r = restrict(d, k).expect("k divides d");
        let six_over_k = BigRational::new(BigInt::from(6), BigInt::from(k));
        for (chi, c) in decompose_restriction(&r) {
            let term = (&c * &chi.gamma_coeff()).scale(&six_over_k);
            let star = chi.induce_primitive();
            match acc.get_mut(&star) {
                Some(v) => *v += &term,
                None => {
                    acc.insert(star, term);
                }
            }
        }
    }
    acc
}

/// Canonical decomposition of `S_d / (2π)`.
pub fn decompose_sd(d: u64) -> PrimitiveDecomposition {
    finish(Subject::SdOver2Pi(d), sd_terms(d))
}

/// Canonical decomposition of `m(P_d) = (S_{d+2}/(d+1) - S_{d+1}/(d+2)) / (2π)`.
pub fn decompose_mpd(d: u64) -> PrimitiveDecomposition {
    assert!(d >= 1, "P_d is defined for d >= 1");
    let a = BigRational::new(BigInt::one(), BigInt::from(d + 1));
    let b = BigRational::new(-BigInt::one(), BigInt::from(d + 2));
    let mut acc: BTreeMap<DirichletCharacter, Cyclo> = BTreeMap::new();
    for (terms, w) in [(sd_terms(d + 2), a), (sd_terms(d + 1), b)] {
        for (chi, c) in terms {
            let term = c.scale(&w);
            match acc.get_mut(&chi) {
                Some(v) => *v += &term,
                None => {
                    acc.insert(chi, term);
                }
            }
        }
    }
    finish(Subject::MPd(d), acc)
}

/// Numeric value of the subject from the closed formulas.
pub fn subject_value<T: Real>(subject: Subject, prec: T::Precision) -> T {
    let wp = T::widen(prec, GUARD);
    let v = match subject {
        Subject::SdOver2Pi(d) => s_d::<T>(d, wp) / (T::from_i64(2, wp) * T::pi(wp)),
        Subject::MPd(d) => m_pd::<T>(d, wp),
    };
    v.round_to(prec)
}

/// `|subject - Σ coeff · L'(χ, -1)|`, imaginary part included.
pub fn verify_decomposition<T: Real>(dec: &PrimitiveDecomposition, prec: T::Precision) -> Result<T> {
    let wp = T::widen(prec, GUARD);
    let mut re = subject_value::<T>(dec.subject, wp);
    let mut im = T::from_i64(0, wp);
    for (chi, c) in &dec.terms {
        let l = l_prime_minus1::<T>(chi, wp)?;
        let term = c.embed::<T>(wp) * l;
        re = re - term.re;
        im = im - term.im;
    }
    Ok(num_complex::Complex::new(re, im).abs_r().round_to(prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{conrey, quadratic_character};
    use crate::BigReal;

    fn q(n: i64, d: i64) -> Cyclo {
        Cyclo::from_ratio(n, d, 1)
    }

    fn chi(s: &str) -> DirichletCharacter {
        s.parse().unwrap()
    }

    #[test]
    fn restriction_values() {
        let r = restrict(20, 4).unwrap();
        let expect: BTreeMap<u64, BigRational> = [(1, 10), (3, -10)]
            .into_iter()
            .map(|(j, v)| (j, BigRational::from_integer(v.into())))
            .collect();
        assert_eq!(r.values, expect);
        assert_eq!(restrict(9, 9).unwrap().values[&1], BigRational::from_integer(7.into()));
        let r = restrict(12, 3).unwrap();
        assert_eq!(r.values[&2], -r.values[&1].clone());
        assert_eq!(restrict(10, 4), Err(Error::NotDivisor { d: 10, k: 4 }));
        assert!(restrict(4, 2).is_err());
    }

    #[test]
    fn small_restrictions() {
        let m = decompose_restriction(&restrict(3, 3).unwrap());
        assert_eq!(m.len(), 1);
        assert_eq!(m[&chi("3.2")], q(1, 1));
        let m = decompose_restriction(&restrict(4, 4).unwrap());
        assert_eq!(m.len(), 1);
        assert_eq!(m[&chi("4.3")], q(2, 1));
        let zero = OddRestriction {
            d: 5,
            k: 5,
            values: (1..5).map(|j| (j, BigRational::zero())).collect(),
        };
        assert!(decompose_restriction(&zero).is_empty());
    }

    #[test]
    fn reconstruction_is_exact() {
        for d in 3..=60u64 {
            for k in divisors(d).into_iter().filter(|&k| k >= 3) {
                let r = restrict(d, k).unwrap();
                let coeffs = decompose_restriction(&r);
                for (&j, v) in &r.values {
                    let mut acc = Cyclo::zero(1);
                    for (c, x) in &coeffs {
                        acc += &(x * &c.eval(j as i64));
                    }
                    assert_eq!(acc, Cyclo::from_rational(v.clone(), 1), "d={d} k={k} j={j}");
                }
            }
        }
    }

    #[test]
    fn s_d_examples() {
        let s12 = decompose_sd(12);
        assert_eq!(s12.terms.len(), 2);
        assert_eq!(s12.coefficient(&quadratic_character(4).unwrap()), q(21, 1));
        assert_eq!(s12.coefficient(&quadratic_character(3).unwrap()), q(38, 1));
        assert!(decompose_sd(2).terms.is_empty());
        assert!(decompose_sd(1).terms.is_empty());

        let s20 = decompose_sd(20);
        let c52 = Cyclo::from_ratio(96, 5, 1) - Cyclo::i().scale(&BigRational::new(57.into(), 5.into()));
        assert_eq!(s20.coefficient(&chi("5.2")), c52);
        assert_eq!(s20.coefficient(&chi("5.3")), c52.conj());
        assert_eq!(s20.coefficient(&quadratic_character(20).unwrap()), q(3, 1));
        assert_eq!(s20.coefficient(&quadratic_character(4).unwrap()), q(15, 1));
        assert_eq!(s20.terms.len(), 4);
    }

    #[test]
    fn m_pd_examples() {
        let m1 = decompose_mpd(1);
        assert_eq!(m1.terms.len(), 1);
        assert_eq!(m1.coefficient(&chi("3.2")), q(1, 1));
        let m2 = decompose_mpd(2);
        assert_eq!(m2.terms.len(), 2);
        assert_eq!(m2.coefficient(&chi("4.3")), q(1, 1));
        assert_eq!(m2.coefficient(&chi("3.2")), q(-1, 2));
        assert_eq!(decompose_mpd(12).coefficient(&quadratic_character(7).unwrap()), q(4, 13));
        assert_eq!(m2.to_string(), "m(P_2) = (-1/2) L'(3.2) + (1) L'(4.3)");
    }

    #[test]
    fn closure_and_rationality() {
        for d in 1..=30 {
            let m = decompose_mpd(d);
            assert!(m.is_conjugation_closed(), "d={d}");
            for (c, x) in &m.terms {
                assert!(c.is_primitive() && c.is_odd());
                if c.is_real() {
                    assert!(x.is_rational(), "d={d} {c}");
                }
            }
        }
        for d in [1, 2] {
            assert!(decompose_mpd(d).terms.values().all(Cyclo::is_rational), "d={d}");
        }
    }

    #[test]
    fn coefficient_fields_are_small() {
        for d in 1..=20 {
            for (c, x) in &decompose_mpd(d).terms {
                assert_eq!(c.order() % x.order(), 0, "d={d} {c}: {x}");
            }
        }
    }

    #[test]
    fn residuals() {
        for d in 1..=16 {
            let r = verify_decomposition::<BigReal>(&decompose_mpd(d), 50).unwrap();
            assert!(r < BigReal::epsilon(40), "d={d} residual {r:?}");
        }
        let r = verify_decomposition::<BigReal>(&decompose_sd(20), 50).unwrap();
        assert!(r < BigReal::epsilon(40));
        let r = verify_decomposition::<BigReal>(&decompose_sd(2), 50).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn json_round_trip() {
        let m = decompose_mpd(4);
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with("{\"subject\":\"m(P_4)\",\"terms\":[{\"character_label\":"));
        let back: PrimitiveDecomposition = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert_eq!("S_12/(2pi)".parse::<Subject>().unwrap(), Subject::SdOver2Pi(12));
    }

    #[test]
    fn shorthand_format() {
        let s20 = decompose_sd(20);
        let short = s20.shorthand();
        let pair = short.iter().find(|(c, _, _)| *c == conrey(5, 2).unwrap()).unwrap();
        assert!(pair.2);
        assert_eq!(format_coefficient(&pair.1), "192/5 - 114/5i");
        assert_eq!(format_coefficient(&q(-3, 5)), "-3/5");
    }
}
