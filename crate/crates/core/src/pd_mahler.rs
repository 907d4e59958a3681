//! Mahler measures of `P_d(x, y) = Σ_{0≤i+j≤d} x^i y^j`.
//!
//! The closed formula `2π m(P_d) = S_{d+2}/(d+1) - S_{d+1}/(d+2)`, with
//! `S_d = 3 Σ_{k=1}^{d-1} (d - 2k) D(e^{2πik/d})`, is the precise route.
//! [`mahler_numeric`] is an independent quadrature oracle for any bivariate
//! integer polynomial.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::aberth;
use crate::characters::quadratic_character;
use crate::dilog::{clausen_row, zeta3, GUARD};
use crate::error::{Error, Result};
use crate::lvalues::l_prime_minus1;
use crate::poly::BivariatePoly;
use crate::scalar::{ComplexExt, Real};

fn s_d_work<T: Real>(d: u64, wp: T::Precision) -> T {
    if d <= 2 {
        return T::from_i64(0, wp);
    }
    let cl = clausen_row::<T>(d, wp);
    let mut acc = T::from_i64(0, wp);
    for k in 1..d {
        let w = d as i64 - 2 * k as i64;
        if w != 0 {
            acc = acc + cl[k as usize].clone() * T::from_i64(w, wp);
        }
    }
    acc * T::from_i64(3, wp)
}

/// `S_d = 3 Σ_{k=1}^{d-1} (d - 2k) D(e^{2πik/d})`.
pub fn s_d<T: Real>(d: u64, prec: T::Precision) -> T {
    s_d_work::<T>(d, T::widen(prec, GUARD)).round_to(prec)
}

fn m_pd_work<T: Real>(d: u64, wp: T::Precision) -> T {
    let a = s_d_work::<T>(d + 2, wp) / T::from_i64(d as i64 + 1, wp);
    let b = s_d_work::<T>(d + 1, wp) / T::from_i64(d as i64 + 2, wp);
    (a - b) / (T::from_i64(2, wp) * T::pi(wp))
}

/// `m(P_d)` from the closed dilogarithm formula.
pub fn m_pd<T: Real>(d: u64, prec: T::Precision) -> T {
    assert!(d >= 1, "P_d is defined for d >= 1");
    m_pd_work::<T>(d, T::widen(prec, GUARD)).round_to(prec)
}

/// `9 ζ(3) / (2π²)`, the limit of `m(P_d)`.
pub fn m_infinity<T: Real>(prec: T::Precision) -> T {
    let wp = T::widen(prec, GUARD);
    let pi = T::pi(wp);
    (zeta3::<T>(wp) * T::from_i64(9, wp) / (T::from_i64(2, wp) * pi.clone() * pi)).round_to(prec)
}

/// `|m(P_d) - 9ζ(3)/(2π²)|`.
pub fn limit_gap<T: Real>(d: u64, prec: T::Precision) -> T {
    let wp = T::widen(prec, GUARD);
    (m_pd::<T>(d, wp) - m_infinity::<T>(wp)).abs().round_to(prec)
}

pub fn pd_poly(d: u32) -> BivariatePoly {
    assert!(d >= 1, "P_d is defined for d >= 1");
    let mut p = BivariatePoly::zero();
    for i in 0..=d {
        for j in 0..=(d - i) {
            p.add_term(i, j, 1.into());
        }
    }
    p
}

fn poly(s: &str) -> BivariatePoly {
    s.parse().expect("built-in polynomial literal")
}

/// `(x^7 - 1)/(x - 1) (y - 1)² + 7x²(x + 1)² y`, with `m = (8/7) L'(χ_{-7}, -1)`.
pub fn ray_q7() -> BivariatePoly {
    let cyc = poly("1 + x + x^2 + x^3 + x^4 + x^5 + x^6");
    let y1 = poly("y - 1");
    let x1 = poly("x + 1");
    &(&cyc * &y1.pow(2)) + &(&poly("7*x^2*y") * &x1.pow(2))
}

/// Exact polynomials with `d_f = r m(Q)`: entries `(f, r as (num, den), Q)`.
pub fn ray_polynomials() -> Vec<(u64, (i64, i64), BivariatePoly)> {
    let y1sq = poly("y - 1").pow(2);
    let x2m1sq = poly("x^2 - 1").pow(2);
    vec![
        (3, (1, 1), pd_poly(1)),
        (4, (1, 2), &(&poly("x + 1").pow(2) * &poly("y^2")) + &poly("x - 1").pow(2)),
        (7, (7, 8), ray_q7()),
        (8, (1, 1), &(&poly("x^4 + 1") * &y1sq) + &poly("8*x^2*y")),
        (
            20,
            (5, 2),
            &(&poly("x^8 - x^6 + x^4 - x^2 + 1") * &y1sq) + &(&poly("20*x^2*y") * &x2m1sq),
        ),
        (
            24,
            (3, 1),
            &(&poly("x^8 - x^4 + 1") * &y1sq) + &(&poly("24*x^2*y") * &x2m1sq),
        ),
    ]
}

/// Basis element of a combination product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisId {
    P(u32),
    RayQ7,
}

impl fmt::Display for BasisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisId::P(d) => write!(f, "P{d}"),
            BasisId::RayQ7 => write!(f, "RayQ7"),
        }
    }
}

impl FromStr for BasisId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "RayQ7" {
            return Ok(BasisId::RayQ7);
        }
        let d = s
            .strip_prefix('P')
            .or_else(|| s.strip_prefix("P_"))
            .and_then(|n| n.trim_start_matches('_').parse::<u32>().ok())
            .filter(|&d| d >= 1);
        d.map(BasisId::P).ok_or_else(|| Error::UnknownBasis(s.to_string()))
    }
}

impl Serialize for BasisId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BasisId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `∏ basis^exponent` with integer exponents of either sign.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CombinationProduct {
    terms: BTreeMap<BasisId, i64>,
}

impl CombinationProduct {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (BasisId, i64)>) -> Self {
        let mut c = Self::new();
        for (id, e) in pairs {
            c.add(id, e);
        }
        c
    }

    pub fn add(&mut self, id: BasisId, e: i64) {
        let v = self.terms.entry(id).or_insert(0);
        *v += e;
        if *v == 0 {
            self.terms.remove(&id);
        }
    }

    pub fn get(&self, id: BasisId) -> i64 {
        self.terms.get(&id).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (BasisId, i64)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, *v))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }
}

/// Closed-form measure of one basis element.
pub fn basis_measure<T: Real>(id: BasisId, prec: T::Precision) -> Result<T> {
    let wp = T::widen(prec, GUARD);
    let v = match id {
        BasisId::P(d) => m_pd_work::<T>(d as u64, wp),
        BasisId::RayQ7 => {
            let chi = quadratic_character(7)?;
            l_prime_minus1::<T>(&chi, wp)?.re * T::from_i64(8, wp) / T::from_i64(7, wp)
        }
    };
    Ok(v.round_to(prec))
}

/// `Σ exponent · m(basis element)`.
pub fn combination_measure<T: Real>(c: &CombinationProduct, prec: T::Precision) -> Result<T> {
    let wp = T::widen(prec, GUARD);
    let mut acc = T::from_i64(0, wp);
    for (id, e) in c.terms() {
        acc = acc + basis_measure::<T>(id, wp)? * T::from_i64(e, wp);
    }
    Ok(acc.round_to(prec))
}

/// Quadrature estimate of a Mahler measure.
#[derive(Clone, Debug)]
pub struct MahlerEstimate<T> {
    pub value: T,
    /// `|T_N - T_{N/2}|` from the node-doubling check.
    pub error: T,
    pub nodes: usize,
    /// Nodes that were shifted off a degenerate configuration.
    pub jittered: usize,
}

#[derive(Debug)]
enum NodeFailure {
    Degenerate,
    NoConvergence,
}

const JITTER_ATTEMPTS: usize = 8;
const DEGENERACY: f64 = 1e-12;
const GAUSS_POINTS: usize = 10;

/// Jensen's formula in `y` at `x = e^{iθ}`: `log|lead| + Σ log⁺|root|`,
/// together with the number of roots outside the unit circle.
fn jensen_at<T: Real>(
    p: &BivariatePoly,
    theta: &T,
    strict: bool,
    prec: T::Precision,
) -> std::result::Result<(T, usize), NodeFailure> {
    let x = Complex::new(theta.cos(), theta.sin());
    let mut coeffs = p.y_coeffs_at::<T>(&x, prec);
    let scale = coeffs
        .iter()
        .map(ComplexExt::abs_r)
        .fold(T::from_i64(0, prec), T::max_of);
    let tiny = scale * T::from_f64(DEGENERACY, prec);
    while coeffs.len() > 1 && coeffs.last().is_some_and(Complex::is_exact_zero) {
        coeffs.pop();
    }
    let lead = coeffs.last().expect("nonempty").abs_r();
    if lead < tiny {
        return Err(NodeFailure::Degenerate);
    }
    let tol = T::epsilon(prec).sqrt();
    let roots = aberth::roots(&coeffs, &tol, prec).ok_or(NodeFailure::NoConvergence)?;
    let one = T::from_i64(1, prec);
    let near = T::from_f64(DEGENERACY, prec);
    let mut acc = lead.ln();
    let mut outside = 0;
    for r in roots {
        let a = r.abs_r();
        if strict && (a.clone() - one.clone()).abs() < near {
            return Err(NodeFailure::Degenerate);
        }
        if a > one {
            acc = acc + a.ln();
            outside += 1;
        }
    }
    Ok((acc, outside))
}

fn transpose(p: &BivariatePoly) -> BivariatePoly {
    let mut t = BivariatePoly::zero();
    for (&(i, j), c) in p.terms() {
        t.add_term(j, i, c.clone());
    }
    t
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre<T: Real>(n: usize, prec: T::Precision) -> Vec<(T, T)> {
    let one = T::from_i64(1, prec);
    let two = T::from_i64(2, prec);
    let eps = T::epsilon(prec);
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut x = T::from_f64(guess, prec);
        let mut dp = one.clone();
        for _ in 0..100 {
            // three-term recurrence for P_n and P_{n-1}
            let (mut p0, mut p1) = (one.clone(), x.clone());
            for k in 2..=n {
                let kk = T::from_i64(k as i64, prec);
                let p2 = (T::from_i64(2 * k as i64 - 1, prec) * x.clone() * p1.clone()
                    - T::from_i64(k as i64 - 1, prec) * p0)
                    / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = T::from_i64(n as i64, prec) * (x.clone() * p1.clone() - p0) / (x.clone() * x.clone() - one.clone());
            let dx = p1 / dp.clone();
            x = x - dx.clone();
            if dx.abs() < eps {
                break;
            }
        }
        let w = two.clone() / ((one.clone() - x.clone() * x.clone()) * dp.clone() * dp);
        out.push((x, w));
    }
    out
}

struct Refiner<'a, T: Real> {
    poly: &'a BivariatePoly,
    rule: Vec<(T, T)>,
    prec: T::Precision,
}

impl<T: Real> Refiner<'_, T> {
    fn count(&self, theta: &T) -> Option<usize> {
        jensen_at(self.poly, theta, false, self.prec).ok().map(|(_, c)| c)
    }

    fn gauss(&self, a: &T, b: &T) -> Option<T> {
        let half = T::from_f64(0.5, self.prec);
        let mid = (a.clone() + b.clone()) * half.clone();
        let rad = (b.clone() - a.clone()) * half;
        let mut acc = T::from_i64(0, self.prec);
        for (x, w) in &self.rule {
            let t = mid.clone() + rad.clone() * x.clone();
            acc = acc + jensen_at(self.poly, &t, false, self.prec).ok()?.0 * w.clone();
        }
        Some(acc * rad)
    }

    /// Integral over `[a, b]`, split at every change in the count of roots
    /// outside the unit circle so each piece is smooth.
    fn integrate(&self, a: T, b: T, ca: usize, cb: usize, depth: u32) -> Option<T> {
        if ca == cb || depth == 0 {
            return self.gauss(&a, &b);
        }
        let half = T::from_f64(0.5, self.prec);
        let scale = a.abs() + b.abs() + T::from_i64(1, self.prec);
        let floor = scale * T::epsilon(self.prec) * T::from_i64(16, self.prec);
        let (mut lo, mut hi) = (a.clone(), b.clone());
        let mut c_hi = cb;
        for _ in 0..4096 {
            if (hi.clone() - lo.clone()).abs() <= floor {
                break;
            }
            let mid = (lo.clone() + hi.clone()) * half.clone();
            let c = self.count(&mid)?;
            if c == ca {
                lo = mid;
            } else {
                hi = mid;
                c_hi = c;
            }
        }
        let left = self.gauss(&a, &lo)?;
        let right = self.integrate(hi, b, c_hi, cb, depth - 1)?;
        Some(left + right)
    }
}

/// Gregory end-correction weights for differences of order 1 to 5.
const GREGORY: [(i64, i64); 5] = [(1, 12), (1, 24), (19, 720), (3, 160), (863, 60480)];

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, j| acc * (n - j) as i64 / (j as i64 + 1))
}

/// Gregory correction for a trapezoid sum over `f` (nodes spaced by `h`).
fn gregory_correction<T: Real>(f: &[T], h: &T, prec: T::Precision) -> T {
    let panels = f.len().saturating_sub(1);
    let n = f.len() - 1;
    let mut acc = T::from_i64(0, prec);
    for (r, &(num, den)) in GREGORY.iter().enumerate().map(|(i, g)| (i + 1, g)).take(panels) {
        let mut fwd = T::from_i64(0, prec);
        let mut bwd = T::from_i64(0, prec);
        for j in 0..=r {
            let c = binomial(r, j);
            let sf = if (r - j) % 2 == 0 { c } else { -c };
            let sb = if j % 2 == 0 { c } else { -c };
            fwd = fwd + f[j].clone() * T::from_i64(sf, prec);
            bwd = bwd + f[n - j].clone() * T::from_i64(sb, prec);
        }
        let term = if r % 2 == 0 { bwd + fwd } else { bwd - fwd };
        acc = acc + term * T::from_i64(num, prec) / T::from_i64(den, prec);
    }
    -(acc * h.clone())
}

/// Periodic composite trapezoid sum over `values` at spacing `h`. Each
/// panel whose endpoint counts differ contains a corner of the integrand: it
/// is integrated by split Gauss–Legendre, and the smooth runs between such
/// panels get Gregory end corrections.
fn corrected_sum<T: Real>(refiner: &Refiner<'_, T>, thetas: &[T], values: &[(T, usize)], h: &T) -> T {
    let prec = refiner.prec;
    let n = values.len();
    let mut corners: Vec<(usize, T)> = Vec::new();
    for k in 0..n {
        let next = (k + 1) % n;
        let (ca, cb) = (values[k].1, values[next].1);
        if ca == cb {
            continue;
        }
        let a = thetas[k].clone();
        let b = a.clone() + h.clone();
        if let Some(exact) = refiner.integrate(a, b, ca, cb, 8) {
            corners.push((k, exact));
        }
    }
    let f: Vec<T> = values.iter().map(|(v, _)| v.clone()).collect();
    if corners.is_empty() {
        let mut acc = T::from_i64(0, prec);
        for v in &f {
            acc = acc + v.clone();
        }
        return acc * h.clone();
    }
    let half = T::from_f64(0.5, prec);
    let mut acc = T::from_i64(0, prec);
    for (idx, (k, exact)) in corners.iter().enumerate() {
        acc = acc + exact.clone();
        // smooth run from the end of this corner panel to the start of the next
        let next_k = corners[(idx + 1) % corners.len()].0;
        let first = (k + 1) % n;
        let len = (next_k + n - first) % n;
        if len == 0 {
            continue;
        }
        let run: Vec<T> = (0..=len).map(|j| f[(first + j) % n].clone()).collect();
        let mut trap = (run[0].clone() + run[len].clone()) * half.clone();
        for v in &run[1..len] {
            trap = trap + v.clone();
        }
        acc = acc + trap * h.clone() + gregory_correction(&run, h, prec);
    }
    acc
}

/// Estimate of `m(p)` from `nodes` equispaced angles.
///
/// Jensen's formula handles the inner integral exactly. The outer integral
/// uses the composite trapezoid rule; panels where a root crosses the unit
/// circle get a split Gauss–Legendre correction because the integrand has a
/// corner there. Nodes where the leading `y`-coefficient nearly vanishes, a
/// root sits within `1e-12` of the unit circle, or root finding stalls are
/// shifted by a deterministic fraction of the step.
pub fn mahler_numeric<T: Real>(p: &BivariatePoly, nodes: usize, prec: T::Precision) -> Result<MahlerEstimate<T>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if nodes < 4 || nodes % 2 != 0 {
        return Err(Error::InvalidArgument(format!("node count {nodes} must be even and at least 4")));
    }
    let q = if p.degree_y() == 0 { transpose(p) } else { p.clone() };
    let two_pi = T::pi(prec) * T::from_i64(2, prec);
    let h = two_pi.clone() / T::from_i64(nodes as i64, prec);
    let mut thetas = Vec::with_capacity(nodes);
    let mut values = Vec::with_capacity(nodes);
    let mut jittered = 0;
    for n in 0..nodes {
        let base = h.clone() * T::from_i64(n as i64, prec);
        let mut value = None;
        for attempt in 0..=JITTER_ATTEMPTS {
            let shift = h.clone() * T::from_f64(0.013 * attempt as f64, prec);
            if let Ok(v) = jensen_at(&q, &(base.clone() + shift), true, prec) {
                if attempt > 0 {
                    jittered += 1;
                }
                value = Some(v);
                break;
            }
        }
        values.push(value.ok_or(Error::NoConvergence { theta: base.to_f64() })?);
        thetas.push(base);
    }
    let refiner = Refiner {
        poly: &q,
        rule: gauss_legendre::<T>(GAUSS_POINTS, prec),
        prec,
    };
    let full = corrected_sum(&refiner, &thetas, &values, &h) / two_pi.clone();
    let even_thetas: Vec<T> = thetas.iter().step_by(2).cloned().collect();
    let even_values: Vec<(T, usize)> = values.iter().step_by(2).cloned().collect();
    let h2 = h.clone() * T::from_i64(2, prec);
    let half = corrected_sum(&refiner, &even_thetas, &even_values, &h2) / two_pi;
    Ok(MahlerEstimate {
        error: (full.clone() - half).abs(),
        value: full,
        nodes,
        jittered,
    })
}
