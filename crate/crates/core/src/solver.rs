//! Integer combinations of Mahler measures equal to rational multiples of
//! `L'(χ_{-f}, -1)` or of `2 Re L'(χ, -1)`.
//!
//! Every basis element has an exact expansion over primitive odd characters.
//! Flattening each cyclotomic coefficient into rational coordinates turns the
//! requirement "only the target character survives, with a rational
//! coefficient" into a homogeneous linear system over `Q`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{euler_phi, lcm};
use crate::characters::{quadratic_character, DirichletCharacter};
use crate::cyclo::{parse_rational, Cyclo};
use crate::decomposition::decompose_mpd;
use crate::dilog::GUARD;
use crate::error::{Error, Result};
use crate::linalg::{nullspace, primitive_integer};
use crate::lvalues::l_prime_minus1;
use crate::pd_mahler::{combination_measure, BasisId, CombinationProduct};
use crate::scalar::Real;
use crate::BigReal;

/// Exact expansion of one basis element.
pub fn basis_decomposition(id: BasisId) -> Result<BTreeMap<DirichletCharacter, Cyclo>> {
    match id {
        BasisId::P(d) => Ok(decompose_mpd(d as u64).terms),
        BasisId::RayQ7 => Ok(BTreeMap::from([(quadratic_character(7)?, Cyclo::from_ratio(8, 7, 1))])),
    }
}

/// Flattened coefficients of a list of basis elements.
#[derive(Clone, Debug)]
pub struct CoefficientMatrix {
    pub basis: Vec<BasisId>,
    pub columns: Vec<DirichletCharacter>,
    /// Cyclotomic order used to flatten each column's coefficients.
    pub orders: Vec<u64>,
    pub rows: Vec<BTreeMap<DirichletCharacter, Cyclo>>,
    /// `entries[i]` concatenates the coordinates of row `i`, column by column.
    pub entries: Vec<Vec<BigRational>>,
}

impl CoefficientMatrix {
    /// Builds the matrix from explicit expansions; any basis label may be used.
    pub fn from_rows(rows: Vec<(BasisId, BTreeMap<DirichletCharacter, Cyclo>)>) -> Self {
        let mut orders: BTreeMap<DirichletCharacter, u64> = BTreeMap::new();
        for (_, terms) in &rows {
            for (chi, c) in terms {
                let o = orders.entry(chi.clone()).or_insert(1);
                *o = lcm(*o, c.order());
            }
        }
        let columns: Vec<DirichletCharacter> = orders.keys().cloned().collect();
        let orders: Vec<u64> = orders.values().copied().collect();
        let entries = rows
            .iter()
            .map(|(_, terms)| {
                let mut flat = Vec::new();
                for (chi, &o) in columns.iter().zip(&orders) {
                    let c = terms.get(chi).map_or_else(|| Cyclo::zero(o), |c| c.lift(o));
                    flat.extend_from_slice(c.coords());
                }
                flat
            })
            .collect();
        let (basis, rows) = rows.into_iter().unzip();
        CoefficientMatrix {
            basis,
            columns,
            orders,
            rows,
            entries,
        }
    }

    /// Range of flattened positions belonging to `columns[j]`.
    pub fn block(&self, j: usize) -> std::ops::Range<usize> {
        let start: usize = self.orders[..j].iter().map(|&o| euler_phi(o) as usize).sum();
        start..start + euler_phi(self.orders[j]) as usize
    }

    pub fn column_index(&self, chi: &DirichletCharacter) -> Option<usize> {
        self.columns.iter().position(|c| c == chi)
    }

    /// Entry `(i, flattened position p)`.
    fn entry(&self, i: usize, p: usize) -> &BigRational {
        &self.entries[i][p]
    }

    pub fn width(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }
}

/// Rows for `P_1 … P_{D_max}` and optionally `RayQ7`.
pub fn coefficient_matrix(d_max: u32, include_ray_q7: bool) -> Result<CoefficientMatrix> {
    if d_max == 0 {
        return Err(Error::InvalidArgument("basis range must be at least 1".into()));
    }
    let mut ids: Vec<BasisId> = (1..=d_max).map(BasisId::P).collect();
    if include_ray_q7 {
        ids.push(BasisId::RayQ7);
    }
    let rows = ids
        .into_iter()
        .map(|id| Ok((id, basis_decomposition(id)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoefficientMatrix::from_rows(rows))
}

/// The L-value an identity certifies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// `L'(χ_{-f}, -1)`.
    Conductor(u64),
    /// `2 Re L'(χ, -1)` for a complex primitive odd `χ`.
    Character(DirichletCharacter),
}

impl Target {
    /// Characters that must carry the multiple, each with coefficient `q`.
    pub fn characters(&self) -> Result<Vec<DirichletCharacter>> {
        match self {
            Target::Conductor(f) => Ok(vec![quadratic_character(*f)?]),
            Target::Character(chi) => Ok(vec![chi.clone(), chi.conj()]),
        }
    }

    /// `L'(χ_{-f}, -1)` or `2 Re L'(χ, -1)`.
    pub fn value<T: Real>(&self, prec: T::Precision) -> Result<T> {
        let wp = T::widen(prec, GUARD);
        let v = match self {
            Target::Conductor(f) => l_prime_minus1::<T>(&quadratic_character(*f)?, wp)?.re,
            Target::Character(chi) => l_prime_minus1::<T>(chi, wp)?.re * T::from_i64(2, wp),
        };
        Ok(v.round_to(prec))
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Conductor(c) => write!(f, "L'(chi_-{c}, -1)"),
            Target::Character(chi) => write!(f, "2 Re L'({chi}, -1)"),
        }
    }
}

/// `m(∏ basis^exponent) = multiple · target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCertificate {
    pub target: Target,
    pub exponents: CombinationProduct,
    pub multiple: BigRational,
    /// Numeric residual at the precision it was checked, as a decimal string.
    pub residual: Option<String>,
    /// Whether the exact expansion check passed.
    pub exact: bool,
}

impl IdentityCertificate {
    pub fn new(target: Target, exponents: CombinationProduct, multiple: BigRational) -> Self {
        IdentityCertificate {
            target,
            exponents,
            multiple,
            residual: None,
            exact: false,
        }
    }

    /// `r` with `r · m(∏ basis^exponent) = target`.
    pub fn r(&self) -> BigRational {
        self.multiple.recip()
    }

    /// Largest `d` with a nonzero exponent on `P_d`.
    pub fn max_degree(&self) -> u32 {
        self.exponents
            .terms()
            .filter_map(|(id, _)| match id {
                BasisId::P(d) => Some(d),
                BasisId::RayQ7 => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn uses_ray_q7(&self) -> bool {
        self.exponents.get(BasisId::RayQ7) != 0
    }

    /// Exponents as a vector over `basis`.
    pub fn exponent_vector(&self, basis: &[BasisId]) -> Vec<BigInt> {
        basis.iter().map(|&id| BigInt::from(self.exponents.get(id))).collect()
    }
}

impl fmt::Display for IdentityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut num = Vec::new();
        let mut den = Vec::new();
        for (id, e) in self.exponents.terms() {
            let s = if e.abs() == 1 { id.to_string() } else { format!("{id}^{}", e.abs()) };
            if e > 0 {
                num.push(s)
            } else {
                den.push(s)
            }
        }
        let num = if num.is_empty() { "1".to_string() } else { num.join(" ") };
        let body = if den.is_empty() { num } else { format!("{num} / ({})", den.join(" ")) };
        let q = crate::decomposition::format_coefficient(&Cyclo::from_rational(self.multiple.clone(), 1));
        match self.target {
            Target::Conductor(_) => write!(f, "m({body}) = {q} {}", self.target),
            Target::Character(_) => write!(f, "m({body}) = {q} ({})", self.target),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CertificateRepr {
    target: Target,
    exponents: Vec<(BasisId, i64)>,
    multiple: String,
    residual: Option<String>,
    exact: bool,
}

impl Serialize for IdentityCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CertificateRepr {
            target: self.target.clone(),
            exponents: self.exponents.terms().collect(),
            multiple: format!("{}/{}", self.multiple.numer(), self.multiple.denom()),
            residual: self.residual.clone(),
            exact: self.exact,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IdentityCertificate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CertificateRepr::deserialize(d)?;
        let multiple = parse_rational(&repr.multiple)
            .ok_or_else(|| serde::de::Error::custom(format!("bad rational {:?}", repr.multiple)))?;
        Ok(IdentityCertificate {
            target: repr.target,
            exponents: CombinationProduct::from_pairs(repr.exponents),
            multiple,
            residual: repr.residual,
            exact: repr.exact,
        })
    }
}

/// Result of a search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Found(IdentityCertificate),
    /// The exact constraint system forces the target coefficient to zero for
    /// every combination of the basis. This is relative to the canonical
    /// expansions and the basis range.
    NoSolutionWithinRange {
        target: Target,
        basis: Vec<BasisId>,
        /// Dimension of the space of combinations with no foreign terms.
        nullity: usize,
    },
}

impl SolveOutcome {
    pub fn certificate(&self) -> Option<&IdentityCertificate> {
        match self {
            SolveOutcome::Found(c) => Some(c),
            SolveOutcome::NoSolutionWithinRange { .. } => None,
        }
    }
}

/// Constraint rows (one per flattened coordinate that must vanish) and the
/// linear form giving the rational target coefficient.
fn constraints(m: &CoefficientMatrix, target: &[DirichletCharacter]) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let n = m.basis.len();
    let primary = m.column_index(&target[0]);
    let mut rows = Vec::new();
    for j in 0..m.columns.len() {
        let block = m.block(j);
        // the conjugate column mirrors the primary one, so it adds nothing new
        if target.len() == 2 && m.columns[j] == target[1] {
            continue;
        }
        let skip_constant = Some(j) == primary;
        for p in block.clone() {
            if skip_constant && p == block.start {
                continue;
            }
            rows.push((0..n).map(|i| m.entry(i, p).clone()).collect());
        }
    }
    let form = match primary {
        Some(j) => {
            let p = m.block(j).start;
            (0..n).map(|i| m.entry(i, p).clone()).collect()
        }
        None => vec![BigRational::zero(); n],
    };
    (rows, form)
}

fn dot(a: &[BigInt], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .filter(|(x, _)| !x.is_zero())
        .fold(BigRational::zero(), |acc, (x, y)| acc + y * BigRational::from_integer(x.clone()))
}

/// Minimal-support vectors of the row space spanned by `basis`.
fn circuits(basis: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let k = basis.len();
    if k == 1 {
        return vec![basis[0].clone()];
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    for zeros in (0..n).combinations(k - 1) {
        let m: Vec<Vec<BigRational>> = zeros
            .iter()
            .map(|&z| basis.iter().map(|b| BigRational::from_integer(b[z].clone())).collect())
            .collect();
        let ns = nullspace(&m, k);
        if ns.len() != 1 {
            continue;
        }
        let y = primitive_integer(&ns[0]);
        let v: Vec<BigInt> = (0..n)
            .map(|c| basis.iter().zip(&y).fold(BigInt::zero(), |acc, (b, yi)| acc + &b[c] * yi))
            .collect();
        let support: Vec<usize> = (0..n).filter(|&c| !v[c].is_zero()).collect();
        if seen.insert(support) {
            let v: Vec<BigRational> = v.into_iter().map(BigRational::from_integer).collect();
            out.push(primitive_integer(&v));
        }
    }
    out
}

/// Picks the combination with smallest support, then the support with the
/// lowest basis indices (compared as sorted index lists), then smallest
/// largest exponent, then lexicographically smallest exponent vector. The
/// result is scaled so the multiple is positive.
fn solve_target(m: &CoefficientMatrix, target: Target) -> Result<SolveOutcome> {
    let chars = target.characters()?;
    let n = m.basis.len();
    let (rows, form) = constraints(m, &chars);
    let kernel: Vec<Vec<BigInt>> = if rows.is_empty() {
        (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect()
    } else {
        nullspace(&rows, n).iter().map(|v| primitive_integer(v)).collect()
    };
    let useful = kernel.iter().any(|v| !dot(v, &form).is_zero());
    if !useful {
        return Ok(SolveOutcome::NoSolutionWithinRange {
            target,
            basis: m.basis.clone(),
            nullity: kernel.len(),
        });
    }
    type Key = (usize, Vec<usize>, BigInt, Vec<BigInt>);
    let mut best: Option<(Key, BigRational)> = None;
    for mut v in circuits(&kernel, n) {
        let mut q = dot(&v, &form);
        if q.is_zero() {
            continue;
        }
        if q.is_negative() {
            v.iter_mut().for_each(|x| *x = -x.clone());
            q = -q;
        }
        let support: Vec<usize> = (0..n).filter(|&i| !v[i].is_zero()).collect();
        let height = v.iter().map(|x| x.abs()).max().unwrap_or_default();
        let key = (support.len(), support, height, v);
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, q));
        }
    }
    let ((_, _, _, v), q) = best.expect("a kernel vector with nonzero target yields a circuit");
    let exponents = CombinationProduct::from_pairs(
        m.basis
            .iter()
            .zip(&v)
            .filter(|(_, x)| !x.is_zero())
            .map(|(&id, x)| (id, i64::try_from(x).expect("exponent fits in i64"))),
    );
    let mut cert = IdentityCertificate::new(target, exponents, q);
    cert.exact = exact_check(&cert)?;
    Ok(SolveOutcome::Found(cert))
}

/// Searches combinations of `P_1 … P_{D_max}` (and `RayQ7`) equal to a
/// rational multiple of `L'(χ_{-f}, -1)`.
pub fn solve_conductor(f: u64, d_max: u32, include_ray_q7: bool) -> Result<SolveOutcome> {
    quadratic_character(f)?;
    let m = coefficient_matrix(d_max, include_ray_q7)?;
    solve_target(&m, Target::Conductor(f))
}

/// Searches combinations equal to a rational multiple of `2 Re L'(χ, -1)`.
pub fn solve_complex_pair(chi: &DirichletCharacter, d_max: u32, include_ray_q7: bool) -> Result<SolveOutcome> {
    if !chi.is_odd() {
        return Err(Error::EvenCharacter(chi.label()));
    }
    if !chi.is_primitive() {
        return Err(Error::Imprimitive(chi.label()));
    }
    if chi.is_real() {
        return Err(Error::InvalidCharacter(format!(
            "{} is real; search by conductor instead",
            chi.label()
        )));
    }
    let m = coefficient_matrix(d_max, include_ray_q7)?;
    solve_target(&m, Target::Character(chi.clone()))
}

/// Expansion of `Σ exponent · basis` merged per character.
pub fn combination_decomposition(c: &CombinationProduct) -> Result<BTreeMap<DirichletCharacter, Cyclo>> {
    let mut acc: BTreeMap<DirichletCharacter, Cyclo> = BTreeMap::new();
    for (id, e) in c.terms() {
        let w = BigRational::from_integer(BigInt::from(e));
        for (chi, coeff) in basis_decomposition(id)? {
            let term = coeff.scale(&w);
            match acc.get_mut(&chi) {
                Some(v) => *v += &term,
                None => {
                    acc.insert(chi, term);
                }
            }
        }
    }
    acc.retain(|_, v| !v.is_zero());
    Ok(acc)
}

/// True when the exact expansion of the product is `multiple` on each target
/// character and zero elsewhere.
pub fn exact_check(cert: &IdentityCertificate) -> Result<bool> {
    let dec = combination_decomposition(&cert.exponents)?;
    let q = Cyclo::from_rational(cert.multiple.clone(), 1);
    let chars = cert.target.characters()?;
    let expected: BTreeMap<DirichletCharacter, Cyclo> = chars.into_iter().map(|c| (c, q.clone())).collect();
    Ok(!cert.multiple.is_zero() && dec == expected)
}

/// Outcome of [`verify_certificate`].
#[derive(Clone, Debug)]
pub struct Verification {
    pub residual: BigReal,
    pub exact: bool,
}

impl Verification {
    pub fn passed(&self, prec: u32) -> bool {
        self.exact && self.residual < BigReal::epsilon(prec.saturating_sub(8))
    }
}

/// `|m(∏ basis^exponent) - multiple · target|` at `prec` digits, plus the
/// exact re-check.
pub fn verify_certificate(cert: &IdentityCertificate, prec: u32) -> Result<Verification> {
    let wp = prec + GUARD;
    let lhs = combination_measure::<BigReal>(&cert.exponents, wp)?;
    let q = BigReal::from_bigint(cert.multiple.numer(), wp) / BigReal::from_bigint(cert.multiple.denom(), wp);
    let rhs = cert.target.value::<BigReal>(wp)? * q;
    Ok(Verification {
        residual: (lhs - rhs).abs().round_to(prec),
        exact: exact_check(cert)?,
    })
}

/// Runs [`verify_certificate`] and records the outcome on the certificate.
pub fn certify(cert: &IdentityCertificate, prec: u32) -> Result<(IdentityCertificate, Verification)> {
    let v = verify_certificate(cert, prec)?;
    let mut out = cert.clone();
    out.residual = Some(v.residual.to_sci(6));
    out.exact = v.exact;
    Ok((out, v))
}

fn cert(target: Target, pairs: &[(u32, i64)], ray: i64, multiple: i64) -> IdentityCertificate {
    let mut c = CombinationProduct::from_pairs(pairs.iter().map(|&(d, e)| (BasisId::P(d), e)));
    if ray != 0 {
        c.add(BasisId::RayQ7, ray);
    }
    IdentityCertificate::new(target, c, BigRational::from_integer(BigInt::from(multiple)))
}

fn character(label: &str) -> Target {
    Target::Character(label.parse().expect("built-in label"))
}

/// Reference identities: six for quadratic characters and three for complex pairs.
pub fn known_solutions() -> Vec<IdentityCertificate> {
    use Target::Conductor;
    vec![
        cert(Conductor(3), &[(1, 1)], 0, 1),
        cert(Conductor(4), &[(1, 1), (2, 2)], 0, 2),
        cert(Conductor(8), &[(1, 33), (5, 21), (6, 28), (2, -30)], 0, 12),
        cert(
            Conductor(15),
            &[
                (13, 210),
                (12, 182),
                (11, 156),
                (8, 135),
                (7, 108),
                (6, 84),
                (5, 63),
                (4, 900),
                (2, 252),
                (1, -2394),
            ],
            0,
            45,
        ),
        cert(
            Conductor(20),
            &[
                (18, 190),
                (17, 171),
                (16, 153),
                (15, 136),
                (14, 120),
                (13, 105),
                (12, 91),
                (11, 78),
                (1, 168),
                (8, -225),
                (7, -180),
                (6, -140),
                (5, -105),
                (2, -24),
                (4, -60),
            ],
            0,
            30,
        ),
        cert(
            Conductor(24),
            &[
                (22, 276),
                (21, 253),
                (20, 231),
                (19, 210),
                (18, 190),
                (17, 171),
                (16, 153),
                (15, 136),
                (14, 120),
                (13, 105),
                (12, 91),
                (11, 78),
                (6, -252),
                (5, -189),
                (2, -234),
                (1, -1269),
            ],
            0,
            36,
        ),
        cert(character("5.2"), &[(1, 720), (8, -45), (7, -36), (6, -28), (5, -21), (4, -240)], 0, 30),
        cert(
            character("7.3"),
            &[(1, 3432), (5, 2520), (12, -728), (11, -624), (2, -1008)],
            -539,
            112,
        ),
        cert(
            character("9.2"),
            &[
                (7, 360),
                (6, 280),
                (5, 210),
                (1, 369),
                (16, -153),
                (15, -136),
                (14, -120),
                (13, -105),
                (12, -91),
                (11, -78),
                (2, -126),
            ],
            0,
            36,
        ),
    ]
}

/// True when two exponent vectors over `basis` are positive rational multiples.
pub fn same_line(a: &CombinationProduct, b: &CombinationProduct) -> bool {
    let ids: BTreeSet<BasisId> = a.terms().chain(b.terms()).map(|(id, _)| id).collect();
    let va: Vec<BigRational> = ids.iter().map(|&id| BigRational::from_integer(a.get(id).into())).collect();
    let vb: Vec<BigRational> = ids.iter().map(|&id| BigRational::from_integer(b.get(id).into())).collect();
    let pa = primitive_integer(&va);
    let pb = primitive_integer(&vb);
    // primitive_integer fixes the sign of the first entry; compare both orientations
    let sign = |v: &[BigRational]| {
        v.iter()
            .find(|x| !x.is_zero())
            .map_or(BigInt::one(), |x| if x.is_negative() { -BigInt::one() } else { BigInt::one() })
    };
    pa == pb && sign(&va) == sign(&vb)
}
