//! Saito's criterion for the basis `theta_E, phi_1, ..., phi_l`: membership of
//! every derivation, degree and initial-monomial facts for `[phi_j(x_i)]`, and
//! the closed form of its determinant.

mod det;
mod factored;
mod lemmas;
mod structured;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

pub use det::{bareiss_det, minor_expansion_det};
pub use factored::{FactoredPoly, FormPower};
pub use lemmas::{lemma_identity_checks, Identity, LemmaCheck, LemmaReport};
pub use structured::VandermondeSplit;

use crate::arrangement::{shi_d_cone, Arrangement};
use crate::bernoulli::BernoulliError;
use crate::exactpoly::{Monomial, Poly, PolyError, Rational};
use crate::shi_basis::{basis, check_ell, Derivation, ShiError};

/// Ranks up to this are also checked by plain elimination on the full matrices.
pub const DIRECT_CROSS_CHECK_MAX_ELL: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("matrix is not square: {rows} rows, a row of length {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("elimination produced an inexact division")]
    InexactPivot,
    #[error("expected {expected} derivations for l = {ell}, found {found}")]
    BasisSize {
        ell: usize,
        expected: usize,
        found: usize,
    },
    #[error("derivation {name} has rank {found}, expected {expected}")]
    RankMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("structural factorization failed: {0}")]
    Structure(String),
    #[error(transparent)]
    Shi(#[from] ShiError),
    #[error(transparent)]
    Bernoulli(#[from] BernoulliError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MembershipEntry {
    /// Index into the report's `forms`.
    pub form: usize,
    pub holds: bool,
    /// Which of the five `(s, t, e)` situations a shifted form falls in
    /// relative to the blocks of `phi_j`, `j < l`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MembershipRow {
    pub derivation: String,
    pub entries: Vec<MembershipEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DetRoute {
    /// Through [`VandermondeSplit`].
    Structured,
    /// Fraction-free elimination on the matrix itself.
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseTime {
    pub phase: &'static str,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub ell: usize,
    pub forms: Vec<crate::arrangement::LinearForm>,
    pub membership: Vec<MembershipRow>,
    pub membership_ok: bool,
    pub degrees_ok: bool,
    pub initials_ok: bool,
    pub det_phi: FactoredPoly,
    pub det_route: DetRoute,
    /// Outcome of the independent elimination check, when it was run.
    pub det_cross_check: Option<bool>,
    pub det_leading_coeff: Option<Rational>,
    pub det_initial: Option<Vec<u32>>,
    pub det_matches_corollary: bool,
    /// The full determinant is a nonzero constant times `Q`.
    pub full_det_ok: bool,
    pub full_det_constant: Option<Rational>,
    pub saito_ok: bool,
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub timing: Vec<PhaseTime>,
}

impl VerificationReport {
    /// The report with timings removed, for comparing outcomes.
    pub fn without_timing(&self) -> Self {
        VerificationReport {
            timing: Vec::new(),
            ..self.clone()
        }
    }
}

/// `alpha | theta(alpha)` for every form of `arr`.
pub fn check_membership(theta: &Derivation, arr: &Arrangement) -> Result<Vec<bool>, VerifyError> {
    arr.forms
        .iter()
        .map(|f| form_divides_image(theta, f, arr.ell))
        .collect()
}

fn form_divides_image(
    theta: &Derivation,
    form: &crate::arrangement::LinearForm,
    ell: usize,
) -> Result<bool, VerifyError> {
    if theta.ell != ell || theta.coeff_x.len() != ell {
        return Err(VerifyError::RankMismatch {
            name: theta.name.clone(),
            expected: ell,
            found: theta.ell,
        });
    }
    let nvars = ell + 1;
    // theta(alpha) = sum_v a_v theta_v for a linear alpha
    let mut image = Poly::zero(nvars);
    for (v, a) in form.coeffs().iter().enumerate() {
        if !a.is_zero() {
            image = image.try_add(&theta.coeff(v).scale(a))?;
        }
    }
    let vanished = image.substitute(form.leading_var(), &form.solve_for_leading())?;
    Ok(vanished.is_zero())
}

/// The situation of the shifted form `x_s + e x_t - z` (0-based `s < t`)
/// relative to the blocks `J`, `J1`, `J2` of `phi_j`, `1 <= j < l`:
/// 1 when `x_s` is in `J`; 2 when both lie in `J2`; 3 when `x_s` is in `J1`
/// and `x_t` in `J2`; 4 and 5 when both lie in `J1`, with `e = 1` and
/// `e = -1` respectively.
pub fn case_label(j: usize, ell: usize, s: usize, t: usize, eps: i64) -> Option<u8> {
    if j == 0 || j >= ell || s >= t || t >= ell {
        return None;
    }
    let head_end = j - 1; // J = 0..j-1, J1 = {j-1, j}, J2 = j+1..ell
    let in_pair = |v: usize| v == j - 1 || v == j;
    Some(if s < head_end {
        1
    } else if s > j {
        2
    } else if in_pair(s) && t > j {
        3
    } else if eps == 1 {
        4
    } else {
        5
    })
}

/// Rows `x_1..x_l, z`; columns follow `basis`.
pub fn coefficient_matrix(basis: &[Derivation]) -> Result<Vec<Vec<Poly>>, VerifyError> {
    let ell = basis.first().map_or(0, |d| d.ell);
    if basis.len() != ell + 1 {
        return Err(VerifyError::BasisSize {
            ell,
            expected: ell + 1,
            found: basis.len(),
        });
    }
    for d in basis {
        if d.ell != ell || d.coeff_x.len() != ell {
            return Err(VerifyError::RankMismatch {
                name: d.name.clone(),
                expected: ell,
                found: d.ell,
            });
        }
    }
    Ok((0..=ell)
        .map(|r| basis.iter().map(|d| d.coeff(r).clone()).collect())
        .collect())
}

/// `prod_{k=1}^{l-1} (2k - 1)`.
pub fn double_factorial_odd(ell: usize) -> Rational {
    (1..ell)
        .map(|k| Rational::from_int(2 * k as i64 - 1))
        .product()
}

/// `(1/(2l-3)!!) * prod_{s<t, e} (x_s + e x_t - z)(x_s + e x_t)`.
pub fn corollary_rhs(ell: usize) -> Result<FactoredPoly, VerifyError> {
    let arr = shi_d_cone(ell)?;
    let forms: Vec<Poly> = arr
        .forms
        .iter()
        .filter(|f| f.leading_var() != ell)
        .map(|f| f.to_poly())
        .collect();
    let c = double_factorial_odd(ell).recip().expect("positive");
    FactoredPoly::from_linear(ell + 1, c, &forms)
        .ok_or_else(|| VerifyError::Structure("arrangement form is not linear".into()))
}

fn expected_diagonal_initial(ell: usize, i: usize) -> Result<(Monomial, Rational), VerifyError> {
    let mut exps = vec![0u32; ell + 1];
    for e in exps.iter_mut().take(i - 1) {
        *e = 2;
    }
    exps[i - 1] = 2 * (ell - i) as u32;
    let lc = if i < ell {
        Rational::new(1, 2 * (ell - i) as i64 - 1)
    } else {
        Rational::one()
    };
    Ok((Monomial::from_exponents(&exps)?, lc))
}

struct Clock {
    phases: Vec<PhaseTime>,
    last: Instant,
}

impl Clock {
    fn new() -> Self {
        Clock {
            phases: Vec::new(),
            last: Instant::now(),
        }
    }
    fn lap(&mut self, phase: &'static str) {
        let now = Instant::now();
        self.phases.push(PhaseTime {
            phase,
            seconds: (now - self.last).as_secs_f64(),
        });
        self.last = now;
    }
}

/// Builds the basis for rank `ell` and verifies it.
pub fn saito_verify(ell: usize) -> Result<VerificationReport, VerifyError> {
    check_ell(ell)?;
    let start = Instant::now();
    let b = basis(ell)?;
    let build = start.elapsed().as_secs_f64();
    let mut report = verify_basis(&b)?;
    report.timing.insert(
        0,
        PhaseTime {
            phase: "basis",
            seconds: build,
        },
    );
    Ok(report)
}

/// Verifies an arbitrary list `[theta_0, theta_1, ..., theta_l]` against the
/// arrangement of its rank. The determinant claims concern columns `1..=l`.
pub fn verify_basis(basis: &[Derivation]) -> Result<VerificationReport, VerifyError> {
    let full = coefficient_matrix(basis)?;
    let ell = basis[0].ell;
    check_ell(ell)?;
    let nvars = ell + 1;
    let arr = shi_d_cone(ell)?;
    let mut failures = Vec::new();
    let mut clock = Clock::new();

    let pairs: Vec<(usize, usize)> = (0..basis.len())
        .flat_map(|d| (0..arr.forms.len()).map(move |f| (d, f)))
        .collect();
    let holds = pairs
        .par_iter()
        .map(|&(d, f)| form_divides_image(&basis[d], &arr.forms[f], ell))
        .collect::<Result<Vec<_>, _>>()?;
    let mut membership = Vec::with_capacity(basis.len());
    for (d, theta) in basis.iter().enumerate() {
        let entries: Vec<MembershipEntry> = (0..arr.forms.len())
            .map(|f| {
                let ok = holds[d * arr.forms.len() + f];
                if !ok {
                    failures.push(format!("{} does not preserve {}", theta.name, arr.forms[f]));
                }
                MembershipEntry {
                    form: f,
                    holds: ok,
                    case: shifted_case(d, ell, &arr.forms[f]),
                }
            })
            .collect();
        membership.push(MembershipRow {
            derivation: theta.name.clone(),
            entries,
        });
    }
    let membership_ok = holds.iter().all(|&h| h);
    clock.lap("membership");

    let m: Vec<Vec<Poly>> = full[..ell].iter().map(|row| row[1..].to_vec()).collect();
    let degree = 2 * (ell as u32 - 1);
    let mut degrees_ok = true;
    for (i, row) in m.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            if !p.is_zero() && p.homogeneous_degree() != Some(degree) {
                degrees_ok = false;
                failures.push(format!(
                    "entry ({}, {}) is not homogeneous of degree {degree}",
                    i + 1,
                    j + 1
                ));
            }
        }
    }
    let mut initials_ok = true;
    for i in 1..=ell {
        let diag = &m[i - 1][i - 1];
        let (mono, lc) = expected_diagonal_initial(ell, i)?;
        if diag.initial_monomial().ok() != Some(mono) || diag.leading_coeff().ok() != Some(&lc) {
            initials_ok = false;
            failures.push(format!("diagonal entry {i} has the wrong leading term"));
            continue;
        }
        for j in i + 1..=ell {
            let other = &m[i - 1][j - 1];
            if other.initial_monomial().is_ok_and(|o| o >= mono) {
                initials_ok = false;
                failures.push(format!(
                    "entry ({i}, {j}) does not lie below the diagonal term"
                ));
            }
        }
    }
    clock.lap("degrees");

    let target = corollary_rhs(ell)?;
    let split = VandermondeSplit::new(ell)?;
    let (det_phi, det_route) = if split.matches(&m)? {
        let known = split.known_factor()?;
        let reduced = split.reduced_det()?;
        clock.lap("reduced determinant");
        let expected = target.cancel(&known).ok_or_else(|| {
            VerifyError::Structure("prefactors missing from the closed form".into())
        })?;
        let det = if expected.expand()? == reduced {
            target.clone()
        } else {
            known.try_mul(&FactoredPoly::opaque(reduced))?
        };
        clock.lap("closed form");
        (det, DetRoute::Structured)
    } else {
        let direct = bareiss_det(&m, nvars)?;
        let det = if direct == target.expand()? {
            target.clone()
        } else {
            FactoredPoly::opaque(direct)
        };
        clock.lap("direct determinant");
        (det, DetRoute::Direct)
    };
    let det_matches_corollary = det_phi == target;
    if !det_matches_corollary {
        failures.push("det[phi_j(x_i)] differs from the closed form".into());
    }
    let det_cross_check = if det_route == DetRoute::Structured && ell <= DIRECT_CROSS_CHECK_MAX_ELL
    {
        let ok = minor_expansion_det(&m, nvars)? == det_phi.expand()?;
        if !ok {
            failures.push("structured and direct determinants disagree".into());
        }
        clock.lap("cross-check");
        Some(ok)
    } else {
        None
    };
    let det_leading_coeff = det_phi.leading_coeff().ok();
    let det_monomial = det_phi.initial_monomial().ok();
    let det_initial = det_monomial.map(|mono| mono.exponents(nvars));
    let expected_det_initial = Monomial::from_exponents(
        &(0..nvars)
            .map(|i| if i < ell { 4 * (ell - 1 - i) as u32 } else { 0 })
            .collect::<Vec<_>>(),
    )?;
    if det_monomial != Some(expected_det_initial) {
        initials_ok = false;
        failures.push("in(det) is not prod x_i^(4(l-i))".into());
    }

    // full determinant
    let z = Poly::var(nvars, ell)?;
    let z_row_simple = full[ell][0] == z && full[ell][1..].iter().all(Poly::is_zero);
    let q = FactoredPoly::from_linear(
        nvars,
        Rational::one(),
        &arr.forms.iter().map(|f| f.to_poly()).collect::<Vec<_>>(),
    )
    .ok_or_else(|| VerifyError::Structure("arrangement form is not linear".into()))?;
    let full_det = if z_row_simple {
        // Laplace expansion along the z row
        let sign = if ell.is_multiple_of(2) {
            Rational::one()
        } else {
            Rational::from_int(-1)
        };
        det_phi.try_mul(&FactoredPoly::from_linear(nvars, sign, &[z]).expect("z is linear"))?
    } else {
        FactoredPoly::opaque(bareiss_det(&full, nvars)?)
    };
    let full_det_constant = constant_multiple_of(&full_det, &q)?;
    let mut full_det_ok = full_det_constant.as_ref().is_some_and(|c| !c.is_zero());
    if ell <= DIRECT_CROSS_CHECK_MAX_ELL && z_row_simple {
        let direct = bareiss_det(&full, nvars)?;
        if direct != full_det.expand()? {
            full_det_ok = false;
            failures.push("full determinant disagrees with direct elimination".into());
        }
        clock.lap("full determinant");
    }
    if !full_det_ok {
        failures.push("full determinant is not a nonzero constant times Q".into());
    }

    let saito_ok = membership_ok && full_det_ok;
    Ok(VerificationReport {
        ell,
        forms: arr.forms.clone(),
        membership,
        membership_ok,
        degrees_ok,
        initials_ok,
        det_phi,
        det_route,
        det_cross_check,
        det_leading_coeff,
        det_initial,
        det_matches_corollary,
        full_det_ok,
        full_det_constant,
        saito_ok,
        failures,
        timing: clock.phases,
    })
}

/// `Some(c)` with `p = c * q` exactly, `None` if no such constant exists.
fn constant_multiple_of(
    p: &FactoredPoly,
    q: &FactoredPoly,
) -> Result<Option<Rational>, VerifyError> {
    if p.is_split() {
        if p.factors() != q.factors() {
            return Ok(None);
        }
        return Ok(Some(p.leading_constant() / q.leading_constant()));
    }
    let (pe, qe) = (p.expand()?, q.expand()?);
    let Ok(lq) = qe.leading_coeff() else {
        return Ok(None);
    };
    let Ok(lp) = pe.leading_coeff() else {
        return Ok(None);
    };
    let c = lp / lq;
    Ok((qe.scale(&c) == pe).then_some(c))
}

/// The case label of a shifted form for `phi_j`; derivation index `d` is `j`
/// because `theta_E` sits at index 0.
fn shifted_case(d: usize, ell: usize, form: &crate::arrangement::LinearForm) -> Option<u8> {
    let c = form.coeffs();
    if d == 0 || d >= ell || c[ell] != Rational::from_int(-1) {
        return None;
    }
    let s = form.leading_var();
    let t = (s + 1..ell).find(|&v| !c[v].is_zero())?;
    let eps = if c[t].is_negative() { -1 } else { 1 };
    case_label(d, ell, s, t, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shi_basis::{build_euler, build_phi, build_phi_ell};

    fn v(n: usize, i: usize) -> Poly {
        Poly::var(n, i).unwrap()
    }

    #[test]
    fn membership_examples() {
        let arr = shi_d_cone(2).unwrap();
        assert!(check_membership(&build_euler(2).unwrap(), &arr)
            .unwrap()
            .iter()
            .all(|&h| h));
        let phi2 = check_membership(&build_phi_ell(2).unwrap(), &arr).unwrap();
        assert!(phi2.iter().all(|&h| h));
        let phi1 = build_phi(1, 2).unwrap();
        assert!(phi1.apply(&v(3, 2)).unwrap().is_zero());
        // a derivation that moves z off its hyperplane
        let mut bad = build_euler(2).unwrap();
        bad.coeff_z = v(3, 0);
        let table = check_membership(&bad, &arr).unwrap();
        assert!(!table[0]);
        assert!(check_membership(&build_euler(3).unwrap(), &arr).is_err());
    }

    #[test]
    fn coefficient_matrix_layout() {
        let b = basis(2).unwrap();
        let m = coefficient_matrix(&b).unwrap();
        let n = 3;
        assert_eq!(m[2], vec![v(n, 2), Poly::zero(n), Poly::zero(n)]);
        assert_eq!((m[0][0].clone(), m[1][0].clone()), (v(n, 0), v(n, 1)));
        let two = Poly::constant(n, Rational::from_int(2));
        assert_eq!(
            m[0][2],
            &(&two * &(&v(n, 0) * &v(n, 1))) - &(&v(n, 1) * &v(n, 2))
        );
        assert!(coefficient_matrix(&b[..2]).is_err());
    }

    #[test]
    fn case_labels_cover_all_shifted_forms() {
        assert_eq!(case_label(1, 2, 0, 1, -1), Some(5));
        assert_eq!(case_label(1, 2, 0, 1, 1), Some(4));
        assert_eq!(case_label(2, 4, 0, 3, 1), Some(1));
        assert_eq!(case_label(1, 4, 2, 3, -1), Some(2));
        assert_eq!(case_label(1, 4, 1, 3, 1), Some(3));
        assert_eq!(case_label(3, 3, 0, 1, 1), None);
        for ell in 2..=6 {
            for j in 1..ell {
                let mut fives = 0;
                for s in 0..ell {
                    for t in s + 1..ell {
                        for eps in [1, -1] {
                            let c = case_label(j, ell, s, t, eps).unwrap();
                            if c == 5 {
                                fives += 1;
                                assert_eq!((s + 1, t + 1, eps), (j, j + 1, -1));
                            }
                        }
                    }
                }
                assert_eq!(fives, 1);
            }
        }
    }

    #[test]
    fn double_factorials() {
        let got: Vec<Rational> = (2..=6).map(double_factorial_odd).collect();
        let want: Vec<Rational> = [1, 3, 15, 105, 945]
            .iter()
            .map(|&k| Rational::from_int(k))
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn rank_two_report() {
        let r = saito_verify(2).unwrap();
        assert!(
            r.saito_ok && r.det_matches_corollary && r.degrees_ok && r.initials_ok,
            "{:?}",
            r.failures
        );
        assert_eq!(r.det_leading_coeff, Some(Rational::one()));
        assert_eq!(r.det_cross_check, Some(true));
        assert_eq!(r.det_initial, Some(vec![4, 0, 0]));
        assert_eq!(r.membership.len(), 3);
        assert!(r.membership.iter().all(|row| row.entries.len() == 5));
        assert!(matches!(
            saito_verify(1),
            Err(VerifyError::Shi(ShiError::EllOutOfRange(1)))
        ));
    }

    #[test]
    fn rank_three_report() {
        let r = saito_verify(3).unwrap();
        assert!(r.saito_ok, "{:?}", r.failures);
        assert_eq!(r.det_leading_coeff, Some(Rational::new(1, 3)));
        assert_eq!(r.det_initial, Some(vec![8, 4, 0, 0]));
    }

    #[test]
    fn a_broken_basis_fails_verification() {
        let mut b = basis(3).unwrap();
        // swap in a multiple of phi_1 for phi_2: membership survives, the determinant vanishes
        b[2] = b[1].clone();
        b[2].name = "phi_2".into();
        let r = verify_basis(&b).unwrap();
        assert!(r.membership_ok);
        assert_eq!(r.det_route, DetRoute::Direct);
        assert!(!r.det_matches_corollary && !r.full_det_ok && !r.saito_ok);
        // perturb one coefficient: membership breaks
        let mut b = basis(2).unwrap();
        b[1].coeff_x[0] = b[1].coeff_x[0].try_add(&v(3, 2).pow(2).unwrap()).unwrap();
        let r = verify_basis(&b).unwrap();
        assert!(!r.membership_ok && !r.saito_ok);
    }
}
