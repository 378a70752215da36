//! Command-line front end. Exit status: 0 success, 1 a check failed,
//! 2 usage error.

pub mod codec;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bernoulli::{make_bernoulli, BernoulliError};
use crate::exactpoly::default_names;
use crate::oracle::{self, OracleError};
use crate::shi_basis::{self, ShiError};
use crate::verify::{self, VerificationReport, VerifyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "shid",
    version,
    about = "Exact basis of the derivation module of the cone over the type D Shi arrangement"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Print theta_E, phi_1, ..., phi_l.
    Basis {
        #[arg(long)]
        ell: usize,
    },
    /// Print the Bernoulli relative B_{p,q}.
    Bernoulli {
        #[arg(long, allow_hyphen_values = true)]
        p: i64,
        #[arg(long)]
        q: i64,
    },
    /// Run Saito's criterion on the basis.
    Verify {
        #[arg(long, required_unless_present = "basis")]
        ell: Option<usize>,
        /// Verify a basis read from a JSON file written by `basis --format json`.
        #[arg(long, conflicts_with = "ell")]
        basis: Option<PathBuf>,
        /// Include per-phase timings.
        #[arg(long)]
        timing: bool,
    },
    /// Print det[phi_j(x_i)] in factored form.
    Det {
        #[arg(long)]
        ell: usize,
    },
    /// Independent brute-force checks.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
    /// Check the auxiliary polynomial identities.
    Lemmas {
        #[arg(long)]
        ell: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Graded dimensions of the derivation module for degrees 0..=D.
    Dims {
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        max_degree: usize,
        /// Also rank the span of the basis in each degree.
        #[arg(long)]
        span: bool,
    },
    /// Points of F_q^(l+1) off the arrangement.
    Charpoly {
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        q: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Basis,
    Bernoulli,
    Verify,
    Det,
    OracleDims,
    OracleCharpoly,
    Lemmas,
}

/// A parsed invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub ell: Option<usize>,
    pub p: Option<i64>,
    pub q: Option<i64>,
    pub d: Option<usize>,
    pub prime: Option<u64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub basis_file: Option<PathBuf>,
    pub timing: bool,
    pub span: bool,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        let mut c = RunConfig {
            command: Command::Basis,
            ell: None,
            p: None,
            q: None,
            d: None,
            prime: None,
            format: cli.format,
            out: cli.out,
            basis_file: None,
            timing: false,
            span: false,
        };
        match cli.command {
            CliCommand::Basis { ell } => c.ell = Some(ell),
            CliCommand::Bernoulli { p, q } => {
                c.command = Command::Bernoulli;
                (c.p, c.q) = (Some(p), Some(q));
            }
            CliCommand::Verify { ell, basis, timing } => {
                c.command = Command::Verify;
                (c.ell, c.basis_file, c.timing) = (ell, basis, timing);
            }
            CliCommand::Det { ell } => {
                c.command = Command::Det;
                c.ell = Some(ell);
            }
            CliCommand::Oracle {
                which:
                    OracleCommand::Dims {
                        ell,
                        max_degree,
                        span,
                    },
            } => {
                c.command = Command::OracleDims;
                (c.ell, c.d, c.span) = (Some(ell), Some(max_degree), span);
            }
            CliCommand::Oracle {
                which: OracleCommand::Charpoly { ell, q },
            } => {
                c.command = Command::OracleCharpoly;
                (c.ell, c.prime) = (Some(ell), Some(q));
            }
            CliCommand::Lemmas { ell } => {
                c.command = Command::Lemmas;
                c.ell = Some(ell);
            }
        }
        c
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn status(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<ShiError> for CliError {
    fn from(e: ShiError) -> Self {
        match e {
            ShiError::EllOutOfRange(_) | ShiError::IndexOutOfRange { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Shi(s) => s.into(),
            VerifyError::BasisSize { .. } | VerifyError::RankMismatch { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Shi(s) => s.into(),
            OracleError::Poly(p) => CliError::Internal(p.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<BernoulliError> for CliError {
    fn from(e: BernoulliError) -> Self {
        match e {
            BernoulliError::OutOfRange { .. } | BernoulliError::NotPolynomial => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Internal(other.to_string()),
        }
    }
}

/// Exit status and the bytes to write.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub output: Vec<u8>,
}

/// Compact JSON with fields in declaration order.
pub fn emit_json<T: Serialize + ?Sized>(report: &T) -> Vec<u8> {
    serde_json::to_vec(report).expect("reports always serialize")
}

fn need<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--{flag} is required")))
}

fn finish(text: String, json: Vec<u8>, format: Format, ok: bool) -> Outcome {
    let mut output = match format {
        Format::Text => text.into_bytes(),
        Format::Json => json,
    };
    if !output.ends_with(b"\n") {
        output.push(b'\n');
    }
    Outcome {
        status: if ok { 0 } else { 1 },
        output,
    }
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    match config.command {
        Command::Basis => run_basis(config),
        Command::Bernoulli => run_bernoulli(config),
        Command::Verify => run_verify(config),
        Command::Det => run_det(config),
        Command::OracleDims => run_dims(config),
        Command::OracleCharpoly => run_charpoly(config),
        Command::Lemmas => run_lemmas(config),
    }
}

fn run_basis(config: &RunConfig) -> Result<Outcome, CliError> {
    let ell = need(config.ell, "ell")?;
    let b = shi_basis::basis(ell)?;
    let names = default_names(ell + 1);
    let mut text = String::new();
    for d in &b {
        let _ = writeln!(text, "{}:", d.name);
        for (v, name) in names.iter().enumerate() {
            let _ = writeln!(text, "  d/d{name}: {}", d.coeff(v));
        }
    }
    Ok(finish(text, codec::basis_to_json(&b), config.format, true))
}

#[derive(Serialize)]
struct BernoulliJson {
    p: i64,
    q: i64,
    degree: i64,
    univariate: String,
    /// Ascending coefficients of `B_{p,q}(x)`.
    coeffs: Vec<crate::exactpoly::Rational>,
    homogenized: crate::exactpoly::Poly,
}

fn run_bernoulli(config: &RunConfig) -> Result<Outcome, CliError> {
    let (p, q) = (need(config.p, "p")?, need(config.q, "q")?);
    let rel = make_bernoulli(p, q)?;
    let (Some(b), Some(h)) = (&rel.univariate, &rel.homogenized) else {
        return Err(BernoulliError::NotPolynomial.into());
    };
    let json = emit_json(&BernoulliJson {
        p,
        q,
        degree: rel.degree(),
        univariate: b.to_string(),
        coeffs: b.coeffs().to_vec(),
        homogenized: h.clone(),
    });
    let text = if config.format == Format::Text {
        b.to_string()
    } else {
        String::new()
    };
    Ok(finish(text, json, config.format, true))
}

fn verify_text(r: &VerificationReport, timing: bool) -> String {
    let names = default_names(r.ell + 1);
    let yes = |b: bool| if b { "ok" } else { "FAILED" };
    let mut t = String::new();
    let checks: usize = r.membership.iter().map(|row| row.entries.len()).sum();
    let _ = writeln!(t, "l = {}", r.ell);
    let _ = writeln!(
        t,
        "membership ({} derivations x {} forms, {checks} checks): {}",
        r.membership.len(),
        r.forms.len(),
        yes(r.membership_ok)
    );
    let _ = writeln!(t, "degrees: {}", yes(r.degrees_ok));
    let _ = writeln!(t, "initial monomials: {}", yes(r.initials_ok));
    let _ = writeln!(t, "det[phi_j(x_i)] = {}", r.det_phi.render(&names));
    if let (Some(c), Some(e)) = (&r.det_leading_coeff, &r.det_initial) {
        let mono = crate::exactpoly::Monomial::from_exponents(e)
            .map(|m| m.render(&names))
            .unwrap_or_default();
        let _ = writeln!(t, "  leading term: {c}*{mono}");
    }
    let cross = match r.det_cross_check {
        Some(ok) => yes(ok),
        None => "skipped",
    };
    let _ = writeln!(t, "  route: {:?}, direct cross-check: {cross}", r.det_route);
    let _ = writeln!(t, "  closed form: {}", yes(r.det_matches_corollary));
    match &r.full_det_constant {
        Some(c) => {
            let _ = writeln!(t, "full determinant = {c} * Q: {}", yes(r.full_det_ok));
        }
        None => {
            let _ = writeln!(t, "full determinant is not a multiple of Q: FAILED");
        }
    }
    for f in &r.failures {
        let _ = writeln!(t, "failure: {f}");
    }
    if timing {
        for p in &r.timing {
            let _ = writeln!(t, "time {}: {:.3}s", p.phase, p.seconds);
        }
    }
    let _ = writeln!(t, "saito: {}", yes(r.saito_ok));
    t
}

fn run_verify(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut report = match &config.basis_file {
        Some(path) => {
            let bytes = std::fs::read(path)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let b = codec::basis_from_json(&bytes).map_err(|e| CliError::Usage(e.to_string()))?;
            if b.is_empty() {
                return Err(CliError::Usage("empty basis".into()));
            }
            verify::verify_basis(&b)?
        }
        None => verify::saito_verify(need(config.ell, "ell")?)?,
    };
    if !config.timing {
        report.timing.clear();
    }
    let ok = report.saito_ok;
    Ok(finish(
        verify_text(&report, config.timing),
        emit_json(&report),
        config.format,
        ok,
    ))
}

#[derive(Serialize)]
struct DetJson<'a> {
    ell: usize,
    det_phi: &'a verify::FactoredPoly,
    leading_coeff: Option<crate::exactpoly::Rational>,
    initial: Option<Vec<u32>>,
    matches_closed_form: bool,
}

fn run_det(config: &RunConfig) -> Result<Outcome, CliError> {
    let ell = need(config.ell, "ell")?;
    let r = verify::saito_verify(ell)?;
    let names = default_names(ell + 1);
    let text = format!("{}\n", r.det_phi.render(&names));
    let json = emit_json(&DetJson {
        ell,
        det_phi: &r.det_phi,
        leading_coeff: r.det_leading_coeff.clone(),
        initial: r.det_initial.clone(),
        matches_closed_form: r.det_matches_corollary,
    });
    Ok(finish(text, json, config.format, r.det_matches_corollary))
}

fn run_dims(config: &RunConfig) -> Result<Outcome, CliError> {
    let ell = need(config.ell, "ell")?;
    let max = need(config.d, "max-degree")?;
    let reports = (0..=max)
        .map(|d| oracle::graded_dim_report(ell, d, config.span))
        .collect::<Result<Vec<_>, _>>()?;
    let mut text = String::new();
    for r in &reports {
        let span = r
            .basis_span_dim
            .map(|s| format!(" span={s}"))
            .unwrap_or_default();
        let _ = writeln!(
            text,
            "l={} d={} computed={} expected={}{span} {}",
            r.ell,
            r.degree,
            r.computed_dim,
            r.expected_dim,
            if r.matches { "ok" } else { "MISMATCH" }
        );
    }
    let ok = reports.iter().all(|r| r.matches);
    Ok(finish(text, emit_json(&reports), config.format, ok))
}

fn run_charpoly(config: &RunConfig) -> Result<Outcome, CliError> {
    let ell = need(config.ell, "ell")?;
    let q = need(config.prime, "q")?;
    let r = oracle::charpoly_report(ell, q)?;
    let text = format!(
        "l={} q={} count={} expected={} {}\n",
        r.ell,
        r.q,
        r.count,
        r.expected,
        if r.matches { "ok" } else { "MISMATCH" }
    );
    // a mismatch is informative, not a failed check
    Ok(finish(text, emit_json(&r), config.format, true))
}

fn run_lemmas(config: &RunConfig) -> Result<Outcome, CliError> {
    let ell = need(config.ell, "ell")?;
    let r = verify::lemma_identity_checks(ell)?;
    let mut text = String::new();
    for c in r.checks.iter().filter(|c| !c.holds) {
        let _ = writeln!(
            text,
            "failed: {:?} j={:?} k={:?} eps={:?}",
            c.identity, c.j, c.k, c.eps
        );
    }
    let _ = writeln!(
        text,
        "l={} identities checked: {} {}",
        r.ell,
        r.checks.len(),
        if r.all_hold { "all hold" } else { "FAILED" }
    );
    Ok(finish(text, emit_json(&r), config.format, r.all_hold))
}

/// Parses `args`, runs, and writes the result. Returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let config = RunConfig::from(cli);
    match run(&config) {
        Ok(outcome) => {
            let written = match &config.out {
                Some(path) => std::fs::write(path, &outcome.output),
                None => {
                    use std::io::Write;
                    std::io::stdout().write_all(&outcome.output)
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return 2;
            }
            outcome.status
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.status()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<Outcome, CliError> {
        let cli = Cli::try_parse_from(std::iter::once("shid").chain(args.iter().copied())).unwrap();
        run(&RunConfig::from(cli))
    }

    #[test]
    fn bernoulli_text() {
        let o = run_args(&["bernoulli", "--p", "3", "--q", "0"]).unwrap();
        assert_eq!(String::from_utf8(o.output).unwrap(), "1/3*x^3 + 2/3*x\n");
        assert_eq!(o.status, 0);
        let neg = run_args(&["bernoulli", "--p", "-1", "--q", "1"]).unwrap();
        assert_eq!(String::from_utf8(neg.output).unwrap(), "-x\n");
        assert_eq!(
            run_args(&["bernoulli", "--p", "-1", "--q", "0"])
                .unwrap_err()
                .status(),
            2
        );
    }

    #[test]
    fn verify_statuses() {
        assert_eq!(run_args(&["verify", "--ell", "3"]).unwrap().status, 0);
        assert_eq!(run_args(&["verify", "--ell", "1"]).unwrap_err().status(), 2);
        assert_eq!(run_args(&["det", "--ell", "1"]).unwrap_err().status(), 2);
    }

    #[test]
    fn oracle_usage_errors() {
        assert_eq!(
            run_args(&["oracle", "charpoly", "--ell", "2", "--q", "3"])
                .unwrap_err()
                .status(),
            2
        );
        assert_eq!(
            run_args(&["oracle", "charpoly", "--ell", "2", "--q", "5"])
                .unwrap()
                .status,
            0
        );
        let dims = run_args(&["oracle", "dims", "--ell", "2", "--max-degree", "3"]).unwrap();
        assert_eq!(dims.status, 0);
        assert_eq!(String::from_utf8(dims.output).unwrap().lines().count(), 4);
    }

    #[test]
    fn json_is_deterministic() {
        let a = run_args(&["verify", "--ell", "2", "--format", "json"]).unwrap();
        let b = run_args(&["verify", "--ell", "2", "--format", "json"]).unwrap();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_slice(&a.output).unwrap();
        assert_eq!(v["saito_ok"], serde_json::Value::Bool(true));
        assert_eq!(
            v["det_leading_coeff"],
            serde_json::Value::String("1".into())
        );
        assert!(v.get("timing").is_none());
        let empty: Vec<u8> = emit_json(&Vec::<verify::LemmaCheck>::new());
        assert_eq!(empty, b"[]");
    }
}
