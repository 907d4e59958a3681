//! Subcommand implementations.

use std::fmt;
use std::path::Path;

use num_complex::Complex;
use pdmahler::characters::DirichletCharacter;
use pdmahler::decomposition::{
    decompose_mpd, decompose_sd, format_coefficient, subject_value, verify_decomposition,
    PrimitiveDecomposition, Subject,
};
use pdmahler::dilog::{bloch_wigner as bw, clausen2, li2 as li2_fn};
use pdmahler::golden::{self, RowCheck};
use pdmahler::lvalues::{d_chi, d_f, l_prime_minus1};
use pdmahler::pd_mahler::{mahler_numeric, ray_polynomials, s_d};
use pdmahler::poly::BivariatePoly;
use pdmahler::solver::{self, certify, known_solutions, verify_certificate, IdentityCertificate, SolveOutcome, Target};
use pdmahler::{BigReal, Error, Real};
use serde_json::{json, Value};

use crate::report::Report;

/// Fixed-point with `decimals` places, without a sign on zero.
fn fixed_f64(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => s,
    }
}

/// Oracle tolerance for the tabulated polynomial identities.
const ORACLE_TOL: f64 = 1e-5;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Parse(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::NoConvergence { .. }) => 4,
            _ => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration: {m}"),
            CliError::Parse(m) => write!(f, "parse: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

/// Validated run settings.
#[derive(Clone, Copy, Debug)]
pub struct Config {
    pub prec: u32,
    pub nodes: usize,
}

impl Config {
    pub fn new(prec: u32, nodes: usize) -> Result<Self, CliError> {
        if prec < 15 {
            return Err(CliError::Config(format!("precision must be at least 15 digits, got {prec}")));
        }
        if nodes < 64 || !nodes.is_power_of_two() {
            return Err(CliError::Config(format!("nodes must be a power of 2 and at least 64, got {nodes}")));
        }
        Ok(Config { prec, nodes })
    }

    fn tolerance(&self) -> BigReal {
        BigReal::epsilon(self.prec - 8)
    }

    fn fixed(&self, x: &BigReal) -> String {
        x.to_fixed(self.prec)
    }
}

/// A report plus an optional verification failure message.
pub struct Outcome {
    pub report: Report,
    pub failure: Option<String>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, failure: None }
    }
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` with decimal `a`, `b`.
pub fn parse_complex(s: &str, digits: u32) -> Result<Complex<BigReal>, CliError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Parse(format!("invalid complex number {s:?}"));
    let real = |part: &str| {
        let part = part.strip_prefix('+').unwrap_or(part);
        match part {
            "" => Some(BigReal::from_i64(1, digits)),
            "-" => Some(BigReal::from_i64(-1, digits)),
            p if p.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | 'e' | 'E' | '+'))
                && p.parse::<f64>().is_ok() =>
            {
                BigReal::parse(p, digits)
            }
            _ => None,
        }
    };
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        let re = real(&t).filter(|_| t != "-" && t != "+").ok_or_else(bad)?;
        return Ok(Complex::new(re, BigReal::from_i64(0, digits)));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (real(&body[..k]).ok_or_else(bad)?, real(&body[k..]).ok_or_else(bad)?),
        None => (BigReal::from_i64(0, digits), real(body).ok_or_else(bad)?),
    };
    Ok(Complex::new(re, im))
}

fn parse_label(label: &str) -> Result<DirichletCharacter, CliError> {
    Ok(label.parse::<DirichletCharacter>()?)
}

pub fn li2(cfg: &Config, z: &str) -> Result<Outcome, CliError> {
    let arg = parse_complex(z, cfg.prec)?;
    let v = li2_fn::<BigReal>(&arg, cfg.prec)?;
    let mut r = Report::new(&["function", "argument", "re", "im"]);
    r.row(vec!["Li2".into(), z.into(), cfg.fixed(&v.re), cfg.fixed(&v.im)]);
    Ok(r.into())
}

pub fn bloch_wigner(cfg: &Config, z: &str) -> Result<Outcome, CliError> {
    let arg = parse_complex(z, cfg.prec)?;
    let v = bw::<BigReal>(&arg, cfg.prec);
    let mut r = Report::new(&["function", "argument", "value"]);
    r.row(vec!["D".into(), z.into(), cfg.fixed(&v)]);
    Ok(r.into())
}

pub fn clausen(cfg: &Config, j: i64, k: i64) -> Result<Outcome, CliError> {
    if k <= 0 {
        return Err(CliError::Parse(format!("denominator must be positive, got {k}")));
    }
    let v = clausen2::<BigReal>(j, k as u64, cfg.prec);
    let mut r = Report::new(&["function", "argument", "value"]);
    r.row(vec!["Cl2".into(), format!("2pi*{j}/{k}"), cfg.fixed(&v)]);
    Ok(r.into())
}

pub fn character(cfg: &Config, label: &str) -> Result<Outcome, CliError> {
    let chi = parse_label(label)?;
    let star = chi.induce_primitive();
    let tau = star.gauss_sum::<BigReal>(cfg.prec);
    let mut r = Report::new(&[
        "label",
        "modulus",
        "conductor",
        "primitive",
        "induced_by",
        "parity",
        "order",
        "real",
        "gamma",
        "gauss_sum_re",
        "gauss_sum_im",
    ]);
    r.row(vec![
        chi.label(),
        chi.modulus().to_string(),
        chi.conductor().to_string(),
        chi.is_primitive().to_string(),
        star.label(),
        if chi.is_odd() { "odd" } else { "even" }.into(),
        chi.order().to_string(),
        chi.is_real().to_string(),
        format_coefficient(&chi.gamma_coeff()),
        cfg.fixed(&tau.re),
        cfg.fixed(&tau.im),
    ]);
    Ok(r.into())
}

pub fn lvalue(cfg: &Config, label: &str) -> Result<Outcome, CliError> {
    let chi = parse_label(label)?;
    let d = d_chi::<BigReal>(&chi, cfg.prec)?;
    let l = l_prime_minus1::<BigReal>(&chi, cfg.prec)?;
    let mut r = Report::new(&["label", "d_chi_re", "d_chi_im", "lprime_re", "lprime_im"]);
    r.row(vec![chi.label(), cfg.fixed(&d.re), cfg.fixed(&d.im), cfg.fixed(&l.re), cfg.fixed(&l.im)]);
    Ok(r.into())
}

fn decomposition_outcome(cfg: &Config, dec: PrimitiveDecomposition, extra: Option<(&'static str, BigReal)>) -> Result<Outcome, CliError> {
    let value = subject_value::<BigReal>(dec.subject, cfg.prec);
    let residual = verify_decomposition::<BigReal>(&dec, cfg.prec)?;
    let residual_s = residual.to_sci(6);
    let mut cols = vec!["subject", "value", "decomposition", "residual"];
    let mut row = vec![dec.subject.to_string(), cfg.fixed(&value), dec.to_string(), residual_s.clone()];
    let mut obj = serde_json::Map::new();
    obj.insert("subject".into(), json!(dec.subject.to_string()));
    if let Some((name, v)) = &extra {
        cols.insert(1, name);
        row.insert(1, cfg.fixed(v));
        obj.insert(name.to_string(), json!(cfg.fixed(v)));
    }
    obj.insert("value".into(), json!(cfg.fixed(&value)));
    obj.insert("decomposition".into(), serde_json::to_value(&dec).expect("decompositions serialize"));
    obj.insert("residual".into(), json!(residual_s));
    let mut r = Report::new(&cols);
    r.row(row);
    let r = r.with_json(Value::Object(obj));
    let failure = (residual >= cfg.tolerance()).then(|| format!("residual {residual_s} for {}", dec.subject));
    Ok(Outcome { report: r, failure })
}

fn positive(d: u64) -> Result<u64, CliError> {
    if d == 0 {
        Err(CliError::Parse("d must be at least 1".into()))
    } else {
        Ok(d)
    }
}

pub fn spd(cfg: &Config, d: u64) -> Result<Outcome, CliError> {
    let d = positive(d)?;
    let s = s_d::<BigReal>(d, cfg.prec);
    decomposition_outcome(cfg, decompose_sd(d), Some(("s_d", s)))
}

pub fn mpd(cfg: &Config, d: u64) -> Result<Outcome, CliError> {
    decomposition_outcome(cfg, decompose_mpd(positive(d)?), None)
}

pub fn decompose(cfg: &Config, subject: &str) -> Result<Outcome, CliError> {
    let dec = match subject.parse::<Subject>()? {
        Subject::MPd(d) => decompose_mpd(positive(d)?),
        Subject::SdOver2Pi(d) => decompose_sd(positive(d)?),
    };
    decomposition_outcome(cfg, dec, None)
}

fn exponents_string(cert: &IdentityCertificate) -> String {
    cert.exponents.terms().map(|(id, e)| format!("{id}:{e}")).collect::<Vec<_>>().join(" ")
}

fn certificate_columns() -> Report {
    Report::new(&["identity", "target", "exponents", "multiple", "residual", "exact"])
}

fn certificate_row(cert: &IdentityCertificate) -> Vec<String> {
    vec![
        cert.to_string(),
        cert.target.to_string(),
        exponents_string(cert),
        cert.multiple.to_string(),
        cert.residual.clone().unwrap_or_default(),
        cert.exact.to_string(),
    ]
}

fn solve_outcome(cfg: &Config, outcome: SolveOutcome) -> Result<Outcome, CliError> {
    match outcome {
        SolveOutcome::Found(cert) => {
            let (cert, v) = certify(&cert, cfg.prec)?;
            let mut r = certificate_columns();
            r.row(certificate_row(&cert));
            let text = format!("{cert}\nexact: {}\nresidual: {}\n", cert.exact, cert.residual.clone().unwrap_or_default());
            let r = r.with_text(text).with_json(serde_json::to_value(&cert).expect("certificates serialize"));
            let failure = (!v.passed(cfg.prec)).then(|| format!("certificate for {} did not verify", cert.target));
            Ok(Outcome { report: r, failure })
        }
        SolveOutcome::NoSolutionWithinRange { target, basis, nullity } => {
            let basis: Vec<String> = basis.iter().map(|b| b.to_string()).collect();
            let mut r = Report::new(&["target", "status", "basis", "nullity"]);
            r.row(vec![target.to_string(), "no_solution".into(), basis.join(" "), nullity.to_string()]);
            let text = format!(
                "no solution within range for {target}\nbasis: {}\nnullity: {nullity}\n",
                basis.join(" ")
            );
            let json = json!({"target": target, "status": "no_solution", "basis": basis, "nullity": nullity});
            Ok(r.with_text(text).with_json(json).into())
        }
    }
}

pub fn solve_conductor(cfg: &Config, f: u64, d_max: u32, ray: bool) -> Result<Outcome, CliError> {
    solve_outcome(cfg, solver::solve_conductor(f, d_max, ray)?)
}

pub fn solve_character(cfg: &Config, label: &str, d_max: u32, ray: bool) -> Result<Outcome, CliError> {
    let chi = parse_label(label)?;
    solve_outcome(cfg, solver::solve_complex_pair(&chi, d_max, ray)?)
}

pub fn verify(cfg: &Config, file: &Path) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", file.display())))?;
    let cert: IdentityCertificate =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("invalid certificate: {e}")))?;
    let v = verify_certificate(&cert, cfg.prec)?;
    let passed = v.passed(cfg.prec);
    let mut r = Report::new(&["identity", "residual", "exact", "passed"]);
    r.row(vec![cert.to_string(), v.residual.to_sci(6), v.exact.to_string(), passed.to_string()]);
    let failure = (!passed).then(|| format!("{cert}: residual {}, exact {}", v.residual.to_sci(6), v.exact));
    Ok(Outcome { report: r, failure })
}

fn row_status(check: &RowCheck) -> (String, bool) {
    match check {
        RowCheck::Exact => ("exact".into(), true),
        RowCheck::ExactAfterErrata { errata, printed_residual } => {
            let fixes: Vec<String> = errata.iter().map(|(a, b)| format!("{a}->{b}")).collect();
            let s = format!(
                "exact after label erratum {} (as printed: residual {})",
                fixes.join(", "),
                printed_residual.to_sci(3)
            );
            (s, true)
        }
        RowCheck::NumericOnly { residual } => (format!("numeric only, residual {}", residual.to_sci(3)), true),
        RowCheck::Mismatch { residual } => (format!("mismatch, residual {}", residual.to_sci(3)), false),
    }
}

fn decomposition_table(cfg: &Config, rows: Vec<golden::GoldenRow>, check: bool) -> Result<Outcome, CliError> {
    let mut cols = vec!["subject", "value", "decomposition"];
    if check {
        cols.push("check");
    }
    let mut r = Report::new(&cols);
    let mut failures = Vec::new();
    for g in rows {
        let value = subject_value::<BigReal>(g.subject, cfg.prec);
        let mut row = Vec::new();
        if check {
            let (canonical, c) = golden::check_row(&g, cfg.prec)?;
            let (status, ok) = row_status(&c);
            if !ok {
                failures.push(g.subject.to_string());
            }
            row.extend([g.subject.to_string(), cfg.fixed(&value), canonical.to_string(), status]);
        } else {
            let canonical = match g.subject {
                Subject::MPd(d) => decompose_mpd(d),
                Subject::SdOver2Pi(d) => decompose_sd(d),
            };
            row.extend([g.subject.to_string(), cfg.fixed(&value), canonical.to_string()]);
        }
        r.row(row);
    }
    let failure = (!failures.is_empty()).then(|| format!("mismatched rows: {}", failures.join(", ")));
    Ok(Outcome { report: r, failure })
}

fn constants_table(cfg: &Config, check: bool) -> Result<Outcome, CliError> {
    let mut cols = vec!["name", "character", "exact", "re", "im"];
    if check {
        cols.push("check");
    }
    let mut r = Report::new(&cols);
    let mut failures = Vec::new();
    for c in golden::constants_table() {
        let derived = golden::derived_constant(&c, c.degrees[0]);
        let v = derived.embed::<BigReal>(cfg.prec);
        let mut row = vec![c.name.clone(), c.character.label(), derived.to_string(), v.re.to_fixed(30), v.im.to_fixed(30)];
        if check {
            let all = c.degrees.iter().all(|&d| golden::derived_constant(&c, d) == c.value);
            let erratum = golden::LABEL_ERRATA.iter().find(|(p, _)| *p == c.character.label());
            let status = match (all, erratum) {
                (true, None) => "exact".to_string(),
                (true, Some((p, i))) => format!("exact on {i} (printed label {p})"),
                (false, _) => {
                    failures.push(c.name.clone());
                    "mismatch".to_string()
                }
            };
            row.push(status);
        }
        r.row(row);
    }
    let failure = (!failures.is_empty()).then(|| format!("mismatched constants: {}", failures.join(", ")));
    Ok(Outcome { report: r, failure })
}

fn identities_table(cfg: &Config, quadratic: bool, check: bool) -> Result<Outcome, CliError> {
    let mut r = certificate_columns();
    if check {
        r.columns.push("check");
    }
    let mut failures = Vec::new();
    for cert in known_solutions() {
        if matches!(cert.target, Target::Conductor(_)) != quadratic {
            continue;
        }
        let (cert, v) = certify(&cert, cfg.prec)?;
        let mut row = certificate_row(&cert);
        if check {
            let ok = v.passed(cfg.prec);
            if !ok {
                failures.push(cert.target.to_string());
            }
            row.push(if ok { "pass" } else { "fail" }.into());
        }
        r.row(row);
    }
    let failure = (!failures.is_empty()).then(|| format!("failed identities: {}", failures.join(", ")));
    Ok(Outcome { report: r, failure })
}

pub fn table(cfg: &Config, name: &str, check: bool) -> Result<Outcome, CliError> {
    match name {
        "mpd" => decomposition_table(cfg, golden::mpd_table(), check),
        "sd" => decomposition_table(cfg, golden::sd_table(), check),
        "constants" => constants_table(cfg, check),
        "quadratic" => identities_table(cfg, true, check),
        "complex" => identities_table(cfg, false, check),
        _ => Err(CliError::Parse(format!(
            "unknown table {name:?}; expected mpd, sd, constants, quadratic or complex"
        ))),
    }
}

pub fn oracle(cfg: &Config, poly: &str) -> Result<Outcome, CliError> {
    let p: BivariatePoly = poly.parse()?;
    let est = mahler_numeric::<f64>(&p, cfg.nodes, ())?;
    let mut r = Report::new(&["polynomial", "value", "error", "nodes", "jittered"]);
    r.row(vec![
        p.to_string(),
        fixed_f64(est.value, 12),
        format!("{:.3e}", est.error),
        est.nodes.to_string(),
        est.jittered.to_string(),
    ]);
    Ok(r.into())
}

pub fn ray_table(cfg: &Config) -> Result<Outcome, CliError> {
    let mut r = Report::new(&["f", "r", "polynomial", "r_times_m", "d_f", "difference", "check"]);
    let mut failures = Vec::new();
    for (f, (num, den), p) in ray_polynomials() {
        let est = mahler_numeric::<f64>(&p, cfg.nodes, ())?;
        let lhs = est.value * num as f64 / den as f64;
        let df = d_f::<BigReal>(f, cfg.prec)?.to_f64();
        let diff = (lhs - df).abs();
        let ok = diff < ORACLE_TOL;
        if !ok {
            failures.push(f.to_string());
        }
        let ratio = if den == 1 { num.to_string() } else { format!("{num}/{den}") };
        r.row(vec![
            f.to_string(),
            ratio,
            p.to_string(),
            fixed_f64(lhs, 12),
            fixed_f64(df, 12),
            format!("{diff:.3e}"),
            if ok { "pass" } else { "fail" }.into(),
        ]);
    }
    let failure = (!failures.is_empty()).then(|| format!("conductors {} exceed {ORACLE_TOL:e}", failures.join(", ")));
    Ok(Outcome { report: r, failure })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> (f64, f64) {
        let z = parse_complex(s, 20).unwrap();
        (z.re.to_f64(), z.im.to_f64())
    }

    #[test]
    fn complex_literals() {
        assert_eq!(c("i"), (0.0, 1.0));
        assert_eq!(c("-i"), (0.0, -1.0));
        assert_eq!(c("0.5"), (0.5, 0.0));
        assert_eq!(c("-2"), (-2.0, 0.0));
        assert_eq!(c("0.3-0.4i"), (0.3, -0.4));
        assert_eq!(c("1 + i"), (1.0, 1.0));
        assert_eq!(c("1e-3+2e1i"), (0.001, 20.0));
        for bad in ["", "x", "1+", "+", "1/2", "i+1"] {
            assert!(parse_complex(bad, 20).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn signed_zero() {
        assert_eq!(fixed_f64(-1e-17, 3), "0.000");
        assert_eq!(fixed_f64(-0.5, 1), "-0.5");
    }

    #[test]
    fn config_bounds() {
        assert!(Config::new(15, 64).is_ok());
        assert!(Config::new(14, 64).is_err());
        assert!(Config::new(50, 100).is_err());
        assert!(Config::new(50, 32).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Core(Error::NoConvergence { theta: 0.0 }).exit_code(), 4);
        assert_eq!(CliError::Parse("x".into()).exit_code(), 3);
        assert_eq!(CliError::Core(Error::ZeroPolynomial).exit_code(), 3);
    }

    #[test]
    fn mpd_value_matches_closed_form() {
        let cfg = Config::new(30, 64).unwrap();
        let out = mpd(&cfg, 3).unwrap();
        assert!(out.failure.is_none());
        assert_eq!(out.report.rows[0][1], pdmahler::pd_mahler::m_pd::<BigReal>(3, 30).to_fixed(30));
    }
}
