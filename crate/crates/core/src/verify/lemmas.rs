//! The auxiliary polynomial identities behind the membership argument,
//! checked in the ring `x_1..x_l, z, x_s, x_t` with `x_s, x_t` fresh.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::VerifyError;
use crate::bernoulli::x_times_bbar;
use crate::exactpoly::{Monomial, Poly, Rational};
use crate::shi_basis::{check_ell, enumerate_k1_k2, term_indices, Blocks};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `prod_J (x_i - x_s)(x_i - e x_t)` equals its `(K1, K2)` subset expansion.
    SubsetExpansion,
    /// The signed `sigma/tau` sum times `(e x_s)^(k+1)` equals
    /// `prod_J1 (x_i - e x_s) prod_J2 (x_i^2 - x_s^2)`.
    SymmetricExpansion,
    /// `x_s Bbar(x_s, z) - x_t Bbar(x_t, z)` is divisible by `x_s^2 - x_t^2`.
    OddDifference,
    /// The shifted combination is divisible by `x_s + e x_t - z`.
    ShiftedCombination,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub identity: Identity,
    /// `j` for the expansions, `None` for the Bernoulli identities.
    pub j: Option<usize>,
    /// `(k, k0)` for the Bernoulli identities.
    pub k: Option<(i64, i64)>,
    /// The sign `e`; `None` for the identity that does not involve it.
    pub eps: Option<i64>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub ell: usize,
    pub checks: Vec<LemmaCheck>,
    pub all_hold: bool,
}

struct Ring {
    ell: usize,
    nvars: usize,
}

impl Ring {
    fn new(ell: usize) -> Self {
        Ring {
            ell,
            nvars: ell + 3,
        }
    }
    fn z(&self) -> usize {
        self.ell
    }
    fn s(&self) -> usize {
        self.ell + 1
    }
    fn t(&self) -> usize {
        self.ell + 2
    }
    fn var(&self, v: usize) -> Poly {
        Poly::var(self.nvars, v).expect("index within ring")
    }
    fn int(&self, c: i64) -> Poly {
        Poly::constant(self.nvars, Rational::from_int(c))
    }
    /// `coeffs` as a linear form over `(var, coefficient)` pairs.
    fn lin(&self, entries: &[(usize, i64)]) -> Poly {
        let mut c = vec![Rational::zero(); self.nvars];
        for &(v, k) in entries {
            c[v] = &c[v] + &Rational::from_int(k);
        }
        Poly::linear(&c)
    }
    fn prod(&self, vars: &[usize], exp: u8) -> Poly {
        let m = vars.iter().fold(Monomial::one(), |m, &v| {
            m.checked_mul(&Monomial::var(v, exp))
                .expect("small exponents")
        });
        Poly::monomial(self.nvars, m, Rational::one())
    }
}

fn subset_expansion(r: &Ring, j: usize, eps: i64) -> Result<bool, VerifyError> {
    let head = Blocks::new(j, r.ell)?.head;
    let (s, t) = (r.s(), r.t());
    let mut lhs = r.int(1);
    for &i in &head {
        lhs = lhs
            .try_mul(&r.lin(&[(i, 1), (s, -1)]))?
            .try_mul(&r.lin(&[(i, 1), (t, -eps)]))?;
    }
    let neg_sum = r.lin(&[(s, -1), (t, -eps)]);
    let st = r.prod(&[s, t], 1).scale(&Rational::from_int(eps));
    let mut rhs = Poly::zero(r.nvars);
    for (k1, k2) in enumerate_k1_k2(&head) {
        let k0 = head.len() - k1.len() - k2.len();
        let term = r
            .prod(&k1, 1)
            .try_mul(&r.prod(&k2, 2))?
            .try_mul(&neg_sum.pow(k1.len() as u32)?)?
            .try_mul(&st.pow(k0 as u32)?)?;
        rhs = rhs.try_add(&term)?;
    }
    Ok(lhs == rhs)
}

fn symmetric_expansion(r: &Ring, j: usize, eps: i64) -> Result<bool, VerifyError> {
    let b = Blocks::new(j, r.ell)?;
    let s = r.s();
    let eps_xs = r.lin(&[(s, eps)]);
    let mut lhs = Poly::zero(r.nvars);
    for n1 in 0..=b.pair.len() {
        for n2 in 0..=b.tail.len() {
            let k_plus_one = (b.pair.len() - n1) + 2 * (b.tail.len() - n2);
            let sign = if (b.pair.len() + b.tail.len() - n1 - n2) % 2 == 0 {
                1
            } else {
                -1
            };
            let term = Poly::elementary_symmetric_pow(r.nvars, &b.pair, n1, 1)?
                .try_mul(&Poly::elementary_symmetric_pow(r.nvars, &b.tail, n2, 2)?)?
                .try_mul(&eps_xs.pow(k_plus_one as u32)?)?
                .scale(&Rational::from_int(sign));
            lhs = lhs.try_add(&term)?;
        }
    }
    let xs_sq = r.var(s).pow(2)?;
    let mut rhs = r.int(1);
    for &i in &b.pair {
        rhs = rhs.try_mul(&r.lin(&[(i, 1), (s, -eps)]))?;
    }
    for &i in &b.tail {
        rhs = rhs.try_mul(&r.var(i).pow(2)?.try_sub(&xs_sq)?)?;
    }
    Ok(lhs == rhs)
}

fn odd_difference(r: &Ring, k: i64, k0: i64) -> Result<bool, VerifyError> {
    let (s, t, z) = (r.s(), r.t(), r.z());
    let diff = x_times_bbar(k, k0, r.nvars, s, z)?.try_sub(&x_times_bbar(k, k0, r.nvars, t, z)?)?;
    let divisor = r.var(s).pow(2)?.try_sub(&r.var(t).pow(2)?)?;
    Ok(divisor.divides(&diff)?)
}

/// `(x_s - e x_t) e x_s x_t [Bbar(x_s) + e Bbar(x_t)]
///     - (x_s + e x_t) (e x_s x_t)^k0 [e x_t x_s^(k+1) - x_s (e x_t)^(k+1)]`,
/// with the first product written through `x Bbar` so that `k = -1` stays
/// polynomial.
fn shifted_combination_poly(r: &Ring, k: i64, k0: i64, eps: i64) -> Result<Poly, VerifyError> {
    let (s, t, z) = (r.s(), r.t(), r.z());
    let xb_s = x_times_bbar(k, k0, r.nvars, s, z)?;
    let xb_t = x_times_bbar(k, k0, r.nvars, t, z)?;
    let bracket = r
        .lin(&[(t, eps)])
        .try_mul(&xb_s)?
        .try_add(&r.var(s).try_mul(&xb_t)?)?;
    let first = r.lin(&[(s, 1), (t, -eps)]).try_mul(&bracket)?;
    let st = r.prod(&[s, t], 1).scale(&Rational::from_int(eps));
    let e = (k + 1) as u32;
    let inner = r
        .lin(&[(t, eps)])
        .try_mul(&r.var(s).pow(e)?)?
        .try_sub(&r.var(s).try_mul(&r.lin(&[(t, eps)]).pow(e)?)?)?;
    let second = r
        .lin(&[(s, 1), (t, eps)])
        .try_mul(&st.pow(k0 as u32)?)?
        .try_mul(&inner)?;
    Ok(first.try_sub(&second)?)
}

fn shifted_combination(r: &Ring, k: i64, k0: i64, eps: i64) -> Result<bool, VerifyError> {
    let combo = shifted_combination_poly(r, k, k0, eps)?;
    let divisor = r.lin(&[(r.s(), 1), (r.t(), eps), (r.z(), -1)]);
    Ok(divisor.divides(&combo)?)
}

/// Checks all four identities for every parameter tuple that occurs in the
/// construction at rank `ell`.
pub fn lemma_identity_checks(ell: usize) -> Result<LemmaReport, VerifyError> {
    check_ell(ell)?;
    let r = Ring::new(ell);
    let mut bernoulli_pairs = BTreeSet::new();
    for j in 1..=ell {
        for t in term_indices(j, ell)? {
            bernoulli_pairs.insert((t.k, t.k0));
        }
    }
    let mut jobs = Vec::new();
    for eps in [1, -1] {
        for j in 1..=ell {
            jobs.push((Identity::SubsetExpansion, Some(j), None, Some(eps)));
            if j < ell {
                jobs.push((Identity::SymmetricExpansion, Some(j), None, Some(eps)));
            }
        }
        for &pair in &bernoulli_pairs {
            jobs.push((Identity::ShiftedCombination, None, Some(pair), Some(eps)));
        }
    }
    for &pair in &bernoulli_pairs {
        jobs.push((Identity::OddDifference, None, Some(pair), None));
    }
    let checks = jobs
        .into_par_iter()
        .map(|(identity, j, k, eps)| -> Result<LemmaCheck, VerifyError> {
            let holds = match (identity, j, k, eps) {
                (Identity::SubsetExpansion, Some(j), _, Some(e)) => subset_expansion(&r, j, e)?,
                (Identity::SymmetricExpansion, Some(j), _, Some(e)) => {
                    symmetric_expansion(&r, j, e)?
                }
                (Identity::OddDifference, _, Some((k, k0)), _) => odd_difference(&r, k, k0)?,
                (Identity::ShiftedCombination, _, Some((k, k0)), Some(e)) => {
                    shifted_combination(&r, k, k0, e)?
                }
                _ => unreachable!("job parameters match their identity"),
            };
            Ok(LemmaCheck {
                identity,
                j,
                k,
                eps,
                holds,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let all_hold = checks.iter().all(|c| c.holds);
    Ok(LemmaReport {
        ell,
        checks,
        all_hold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_two_instances() {
        let r = Ring::new(2);
        assert!(odd_difference(&r, 1, 0).unwrap());
        assert!(odd_difference(&r, -1, 0).unwrap());
        assert!(shifted_combination(&r, -1, 1, -1).unwrap());
        assert!(subset_expansion(&r, 1, 1).unwrap());
    }

    #[test]
    fn rank_three_subset_expansion() {
        let r = Ring::new(3);
        for eps in [1, -1] {
            assert!(subset_expansion(&r, 3, eps).unwrap());
            assert!(symmetric_expansion(&r, 1, eps).unwrap());
        }
    }

    #[test]
    fn a_wrong_sign_is_rejected() {
        let r = Ring::new(2);
        let wrong = r.lin(&[(r.s(), 1), (r.t(), -1), (r.z(), -1)]);
        let mut nonzero = 0;
        for (k, k0) in [(1, 0), (3, 0), (2, 1), (3, 1), (-1, 1)] {
            let combo = shifted_combination_poly(&r, k, k0, 1).unwrap();
            if !combo.is_zero() {
                nonzero += 1;
                assert!(!wrong.divides(&combo).unwrap(), "({k}, {k0})");
            }
        }
        assert!(nonzero >= 3);
    }

    #[test]
    fn full_report_is_deterministic() {
        let a = lemma_identity_checks(3).unwrap();
        let b = lemma_identity_checks(3).unwrap();
        assert!(a.all_hold);
        assert_eq!(a, b);
    }
}
