//! Bernoulli relatives: the unique odd polynomials `B_{p,q}` whose forward
//! difference is `[(x+1)^p - (-x)^p] / [(x+1) - (-x)] * (x+1)^q (-x)^q`, and
//! their homogenizations `Bbar_{p,q}(x, z) = z^(p+2q) B_{p,q}(x/z)`.
//!
//! The pair `(p, q) = (-1, 0)` has no polynomial solution (`B = -1/x`) and is
//! represented by a flag only. Callers that need it work with `x * Bbar`,
//! which is a polynomial for every pair; see [`x_times_bbar`].

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::exactpoly::{Monomial, Poly, PolyError, Rational, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BernoulliError {
    #[error("parameters out of range: p = {p}, q = {q} (need p >= -1, q >= 0)")]
    OutOfRange { p: i64, q: i64 },
    #[error("the right-hand side is not a polynomial for (p, q) = (-1, 0)")]
    NotPolynomial,
    #[error("P(x) + P(-x) is not constant; no odd normalization exists")]
    NotAntisymmetrizable,
    #[error("solution failed its self-check: {0}")]
    Inconsistent(&'static str),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliRelative {
    pub p: i64,
    pub q: i64,
    /// `B_{p,q}(x)`; `None` exactly for `(-1, 0)`.
    pub univariate: Option<UniPoly>,
    /// `Bbar_{p,q}(x, z)` in a two-variable ring `(x, z)`; `None` exactly for `(-1, 0)`.
    pub homogenized: Option<Poly>,
}

impl BernoulliRelative {
    pub fn is_negative_one_zero(&self) -> bool {
        self.p == -1 && self.q == 0
    }

    /// Homogenization degree `p + 2q`.
    pub fn degree(&self) -> i64 {
        self.p + 2 * self.q
    }
}

fn check_range(p: i64, q: i64) -> Result<(), BernoulliError> {
    if p < -1 || q < 0 {
        return Err(BernoulliError::OutOfRange { p, q });
    }
    Ok(())
}

/// The right-hand side of the defining difference equation.
pub fn rhs_poly(p: i64, q: i64) -> Result<UniPoly, BernoulliError> {
    check_range(p, q)?;
    let x_plus_one = UniPoly::from_ints(&[1, 1]);
    let minus_x = UniPoly::from_ints(&[0, -1]);
    match p {
        -1 if q == 0 => Err(BernoulliError::NotPolynomial),
        // (1/(x+1) + 1/x) / (2x+1) = 1/(x(x+1)); the pole cancels against (x+1)^q (-x)^q
        -1 => {
            let sign = if q % 2 == 0 { 1 } else { -1 };
            let core = UniPoly::x().mul(&x_plus_one).pow(q as u32 - 1);
            Ok(core.scale(&Rational::from_int(sign)))
        }
        0 => Ok(UniPoly::zero()),
        _ => {
            let p = p as u32;
            let quotient = (0..p).fold(UniPoly::zero(), |acc, i| {
                acc.add(&x_plus_one.pow(i).mul(&minus_x.pow(p - 1 - i)))
            });
            Ok(quotient
                .mul(&x_plus_one.pow(q as u32))
                .mul(&minus_x.pow(q as u32)))
        }
    }
}

/// Binomial coefficient polynomial `C(x, n) = x(x-1)...(x-n+1)/n!`.
fn binomial_poly(n: usize) -> UniPoly {
    let mut acc = UniPoly::constant(Rational::one());
    for k in 0..n {
        let factor = UniPoly::new(vec![Rational::from_int(-(k as i64)), Rational::one()]);
        acc = acc.mul(&factor).scale(&Rational::new(1, k as i64 + 1));
    }
    acc
}

/// Solves `P(x+1) - P(x) = rhs` with `P(0) = 0`.
///
/// Expands `rhs` in the binomial basis `C(x, n)` via forward differences at
/// `0, 1, ..., deg`, then maps each `C(x, n)` to `C(x, n+1)`.
pub fn discrete_antiderivative(rhs: &UniPoly) -> UniPoly {
    let Some(deg) = rhs.degree() else {
        return UniPoly::zero();
    };
    let mut diffs: Vec<Rational> = (0..=deg as i64)
        .map(|x| rhs.eval(&Rational::from_int(x)))
        .collect();
    // after pass n, diffs[n] holds the n-th forward difference at 0
    for n in 1..=deg {
        for k in (n..=deg).rev() {
            diffs[k] = &diffs[k] - &diffs[k - 1];
        }
    }
    diffs
        .iter()
        .enumerate()
        .fold(UniPoly::zero(), |acc, (n, a)| {
            acc.add(&binomial_poly(n + 1).scale(a))
        })
}

/// Shifts `P` by the constant `-(P(x) + P(-x))/2`, making it odd.
pub fn antisymmetrize(p: &UniPoly) -> Result<UniPoly, BernoulliError> {
    let f = p.add(&p.reflect());
    if !f.is_constant() {
        return Err(BernoulliError::NotAntisymmetrizable);
    }
    let half = &f.coeff(0) * &Rational::new(1, 2);
    Ok(p.sub(&UniPoly::constant(half)))
}

fn build(p: i64, q: i64) -> Result<BernoulliRelative, BernoulliError> {
    check_range(p, q)?;
    if p == -1 && q == 0 {
        return Ok(BernoulliRelative {
            p,
            q,
            univariate: None,
            homogenized: None,
        });
    }
    let rhs = rhs_poly(p, q)?;
    let b = antisymmetrize(&discrete_antiderivative(&rhs))?;
    if b.forward_difference() != rhs {
        return Err(BernoulliError::Inconsistent("difference equation"));
    }
    if b.reflect() != b.scale(&Rational::from_int(-1)) {
        return Err(BernoulliError::Inconsistent("oddness"));
    }
    let degree = p + 2 * q;
    let homogenized = b.homogenize(degree as u32)?;
    Ok(BernoulliRelative {
        p,
        q,
        univariate: Some(b),
        homogenized: Some(homogenized),
    })
}

type Cache = RwLock<HashMap<(i64, i64), Arc<BernoulliRelative>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Memoized construction of `B_{p,q}` and `Bbar_{p,q}`.
pub fn make_bernoulli(p: i64, q: i64) -> Result<Arc<BernoulliRelative>, BernoulliError> {
    if let Some(hit) = cache().read().expect("bernoulli cache").get(&(p, q)) {
        return Ok(Arc::clone(hit));
    }
    let value = Arc::new(build(p, q)?);
    // racing builders compute identical values, so whichever lands first wins
    let mut table = cache().write().expect("bernoulli cache");
    Ok(Arc::clone(table.entry((p, q)).or_insert(value)))
}

/// `Bbar_{k,k0}(v, z)` in a ring with `nvars` variables, where `v` and `z`
/// are the variables with indices `var` and `z`.
pub fn bbar_at(
    k: i64,
    k0: i64,
    nvars: usize,
    var: usize,
    z: usize,
) -> Result<Poly, BernoulliError> {
    let rel = make_bernoulli(k, k0)?;
    let h = rel
        .homogenized
        .as_ref()
        .ok_or(BernoulliError::NotPolynomial)?;
    Ok(h.remap(nvars, &[var, z])?)
}

/// `v * Bbar_{k,k0}(v, z)`, a polynomial for every admissible pair
/// (it is `-1` for `(-1, 0)`).
pub fn x_times_bbar(
    k: i64,
    k0: i64,
    nvars: usize,
    var: usize,
    z: usize,
) -> Result<Poly, BernoulliError> {
    check_range(k, k0)?;
    if k == -1 && k0 == 0 {
        return Ok(Poly::constant(nvars, Rational::from_int(-1)));
    }
    let b = bbar_at(k, k0, nvars, var, z)?;
    Ok(b.mul_term(&Monomial::var(var, 1), &Rational::one())?)
}
