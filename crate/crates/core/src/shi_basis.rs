//! The derivations `phi_1, ..., phi_l` and the Euler derivation `theta_E`
//! that together form a basis of the module of logarithmic derivations of
//! the cone over the type `D_l` Shi arrangement.
//!
//! Variables are indexed `0..l` for `x_1..x_l` and `l` for `z`.
//!
//! `phi_j(x_i)` for `j < l` is
//!
//! ```text
//! (x_j - x_{j+1} - z) * sum_{K1, K2} (prod K1) (prod K2)^2 (-z)^|K1|
//!     * sum_{n1, n2} (-1)^(n1+n2) sigma_{n1}(J1) tau_{2 n2}(J2) Bbar_{k,k0}(x_i, z)
//! ```
//!
//! with `J = {x_1..x_{j-1}}`, `J1 = {x_j, x_{j+1}}`, `J2 = {x_{j+2}..x_l}`,
//! `K1, K2` disjoint subsets of `J`, `k0 = |J \ (K1 u K2)|` and
//! `k = (|J1| - n1) + 2(|J2| - n2) - 1`. For `phi_l`, `J = {x_1..x_{l-1}}`,
//! the prefactor is `-x_l` and the Bernoulli index is `(-1, k0)`.
//!
//! `Bbar_{-1,0} = -1/x` is never materialized: each coefficient is accumulated
//! as `x_i * phi_j(x_i)` and divided by `x_i` exactly once.

use rayon::prelude::*;

use crate::bernoulli::{x_times_bbar, BernoulliError};
use crate::exactpoly::{Monomial, Poly, PolyError, Rational, MAX_VARS};

/// Largest rank supported by the fixed-width monomials.
pub const MAX_ELL: usize = MAX_VARS - 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShiError {
    #[error("rank l = {0} out of range (need 2 <= l <= {MAX_ELL})")]
    EllOutOfRange(usize),
    #[error("index j = {j} out of range for l = {ell}")]
    IndexOutOfRange { j: usize, ell: usize },
    #[error("coefficient of d/dx{i} in phi_{j} is not divisible by x{i}")]
    NotPolynomial { i: usize, j: usize },
    #[error("derivation has {found} coefficients, ring has {expected} variables")]
    Shape { expected: usize, found: usize },
    #[error(transparent)]
    Bernoulli(#[from] BernoulliError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub fn check_ell(ell: usize) -> Result<(), ShiError> {
    if !(2..=MAX_ELL).contains(&ell) {
        return Err(ShiError::EllOutOfRange(ell));
    }
    Ok(())
}

/// A derivation `sum_i coeff_x[i] d/dx_i + coeff_z d/dz` of the polynomial
/// ring in `x_1..x_l, z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub ell: usize,
    pub name: String,
    pub coeff_x: Vec<Poly>,
    pub coeff_z: Poly,
}

impl Derivation {
    pub fn nvars(&self) -> usize {
        self.ell + 1
    }

    /// Coefficient of `d/d(var)`, with `var == ell` meaning `z`.
    pub fn coeff(&self, var: usize) -> &Poly {
        if var == self.ell {
            &self.coeff_z
        } else {
            &self.coeff_x[var]
        }
    }

    /// `theta(f) = sum_v coeff_v * df/dv`.
    pub fn apply(&self, f: &Poly) -> Result<Poly, ShiError> {
        if f.nvars() != self.nvars() || self.coeff_x.len() != self.ell {
            return Err(ShiError::Shape {
                expected: f.nvars(),
                found: self.coeff_x.len() + 1,
            });
        }
        let mut acc = Poly::zero(f.nvars());
        for var in 0..=self.ell {
            let c = self.coeff(var);
            if c.is_zero() {
                continue;
            }
            let d = f.partial_derivative(var)?;
            acc = acc.try_add(&c.try_mul(&d)?)?;
        }
        Ok(acc)
    }
}

/// Index sets of one summand of `phi_j(x_i)`. Variable sets hold 0-based
/// variable indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermIndex {
    pub j: usize,
    pub k1: Vec<usize>,
    pub k2: Vec<usize>,
    pub n1: usize,
    pub n2: usize,
    pub k0: i64,
    pub k: i64,
}

/// The blocks `J`, `J1`, `J2` for `phi_j` (1-based `j`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Blocks {
    pub j: usize,
    pub ell: usize,
    pub head: Vec<usize>,
    pub pair: Vec<usize>,
    pub tail: Vec<usize>,
}

impl Blocks {
    pub fn new(j: usize, ell: usize) -> Result<Self, ShiError> {
        check_ell(ell)?;
        if !(1..=ell).contains(&j) {
            return Err(ShiError::IndexOutOfRange { j, ell });
        }
        if j == ell {
            return Ok(Blocks {
                j,
                ell,
                head: (0..ell - 1).collect(),
                pair: vec![],
                tail: vec![],
            });
        }
        Ok(Blocks {
            j,
            ell,
            head: (0..j - 1).collect(),
            pair: vec![j - 1, j],
            tail: (j + 1..ell).collect(),
        })
    }
}

/// All ordered pairs `(K1, K2)` of disjoint subsets of `set`, via a ternary
/// counter whose least significant digit is `set[0]` (0: neither, 1: K1, 2: K2).
pub fn enumerate_k1_k2(set: &[usize]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let total = 3usize.pow(set.len() as u32);
    (0..total)
        .map(|mut code| {
            let (mut k1, mut k2) = (Vec::new(), Vec::new());
            for &v in set {
                match code % 3 {
                    1 => k1.push(v),
                    2 => k2.push(v),
                    _ => {}
                }
                code /= 3;
            }
            (k1, k2)
        })
        .collect()
}

/// Every summand index of `phi_j`, in summation order: `(K1, K2)` by the
/// ternary counter, then `(n1, n2)` lexicographically.
pub fn term_indices(j: usize, ell: usize) -> Result<Vec<TermIndex>, ShiError> {
    let blocks = Blocks::new(j, ell)?;
    let mut out = Vec::new();
    for (k1, k2) in enumerate_k1_k2(&blocks.head) {
        let k0 = (blocks.head.len() - k1.len() - k2.len()) as i64;
        for n1 in 0..=blocks.pair.len() {
            for n2 in 0..=blocks.tail.len() {
                let k = (blocks.pair.len() - n1) as i64 + 2 * (blocks.tail.len() - n2) as i64 - 1;
                out.push(TermIndex {
                    j,
                    k1: k1.clone(),
                    k2: k2.clone(),
                    n1,
                    n2,
                    k0,
                    k,
                });
            }
        }
    }
    Ok(out)
}

/// `(prod K1) (prod K2)^2 (-z)^|K1|`
fn subset_weight(nvars: usize, z: usize, k1: &[usize], k2: &[usize]) -> Result<Poly, PolyError> {
    let mut m = Monomial::one();
    for &v in k1 {
        m = m.checked_mul(&Monomial::var(v, 1))?;
    }
    for &v in k2 {
        m = m.checked_mul(&Monomial::var(v, 2))?;
    }
    m = m.checked_mul(&Monomial::var(z, k1.len() as u8))?;
    let sign = if k1.len().is_multiple_of(2) { 1 } else { -1 };
    Ok(Poly::monomial(nvars, m, Rational::from_int(sign)))
}

/// The factor in front of the sum: `x_j - x_{j+1} - z` for `j < l`, `-x_l`
/// for `j = l`. Lives in a ring of `nvars >= l + 1` variables with `z` at
/// index `l`.
pub fn prefactor(j: usize, ell: usize, nvars: usize) -> Result<Poly, ShiError> {
    Blocks::new(j, ell)?;
    let mut c = vec![Rational::zero(); nvars];
    if j < ell {
        c[j - 1] = Rational::one();
        c[j] = Rational::from_int(-1);
        c[ell] = Rational::from_int(-1);
    } else {
        c[ell - 1] = Rational::from_int(-1);
    }
    Ok(Poly::linear(&c))
}

/// `v * sum_T w_T sigma_T tau_T Bbar_{k,k0}(v, z)`, the sum in `phi_j`
/// evaluated at the variable `v` and multiplied by it, without the
/// prefactor. The ring has `nvars >= l + 1` variables, `z` at index `l`, and
/// `v` may be any variable other than `z`.
pub fn scaled_sum(j: usize, ell: usize, nvars: usize, v: usize) -> Result<Poly, ShiError> {
    let blocks = Blocks::new(j, ell)?;
    let z = ell;
    let mut acc = Poly::zero(nvars);
    for t in term_indices(j, ell)? {
        let bern = x_times_bbar(t.k, t.k0, nvars, v, z)?;
        if bern.is_zero() {
            continue;
        }
        let weight = subset_weight(nvars, z, &t.k1, &t.k2)?;
        let sigma = Poly::elementary_symmetric_pow(nvars, &blocks.pair, t.n1, 1)?;
        let tau = Poly::elementary_symmetric_pow(nvars, &blocks.tail, t.n2, 2)?;
        let sign = if (t.n1 + t.n2) % 2 == 0 { 1 } else { -1 };
        let summand = weight
            .try_mul(&sigma)?
            .try_mul(&tau)?
            .try_mul(&bern)?
            .scale(&Rational::from_int(sign));
        acc = acc.try_add(&summand)?;
    }
    Ok(acc)
}

fn build(j: usize, ell: usize) -> Result<Derivation, ShiError> {
    let nvars = ell + 1;
    let pre = prefactor(j, ell, nvars)?;
    let coeff_x = (0..ell)
        .map(|i| {
            let xi = Poly::var(nvars, i)?;
            pre.try_mul(&scaled_sum(j, ell, nvars, i)?)?
                .exact_div(&xi)
                .map_err(|_| ShiError::NotPolynomial { i: i + 1, j })
        })
        .collect::<Result<Vec<_>, ShiError>>()?;
    Ok(Derivation {
        ell,
        name: format!("phi_{j}"),
        coeff_x,
        coeff_z: Poly::zero(nvars),
    })
}

/// `phi_j` for `1 <= j <= l - 1`.
pub fn build_phi(j: usize, ell: usize) -> Result<Derivation, ShiError> {
    check_ell(ell)?;
    if !(1..ell).contains(&j) {
        return Err(ShiError::IndexOutOfRange { j, ell });
    }
    build(j, ell)
}

/// `phi_l`.
pub fn build_phi_ell(ell: usize) -> Result<Derivation, ShiError> {
    check_ell(ell)?;
    build(ell, ell)
}

/// `theta_E = z d/dz + sum_i x_i d/dx_i`.
pub fn build_euler(ell: usize) -> Result<Derivation, ShiError> {
    check_ell(ell)?;
    let nvars = ell + 1;
    Ok(Derivation {
        ell,
        name: "euler".to_string(),
        coeff_x: (0..ell)
            .map(|i| Poly::var(nvars, i))
            .collect::<Result<_, _>>()?,
        coeff_z: Poly::var(nvars, ell)?,
    })
}

/// `[theta_E, phi_1, ..., phi_l]`.
pub fn basis(ell: usize) -> Result<Vec<Derivation>, ShiError> {
    check_ell(ell)?;
    let phis = (1..=ell)
        .into_par_iter()
        .map(|j| build(j, ell))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::with_capacity(ell + 1);
    out.push(build_euler(ell)?);
    out.extend(phis);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: usize, i: usize) -> Poly {
        Poly::var(n, i).unwrap()
    }

    #[test]
    fn k1_k2_enumeration() {
        assert_eq!(enumerate_k1_k2(&[]), vec![(vec![], vec![])]);
        assert_eq!(
            enumerate_k1_k2(&[0]),
            vec![(vec![], vec![]), (vec![0], vec![]), (vec![], vec![0])]
        );
        let pairs = enumerate_k1_k2(&[0, 1, 2]);
        assert_eq!(pairs.len(), 27);
        let mut seen = pairs.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 27);
        assert!(pairs.iter().all(|(a, b)| a.iter().all(|x| !b.contains(x))));
    }

    #[test]
    fn blocks_and_indices() {
        let b = Blocks::new(2, 5).unwrap();
        assert_eq!((b.head, b.pair, b.tail), (vec![0], vec![1, 2], vec![3, 4]));
        let b = Blocks::new(4, 5).unwrap();
        assert_eq!((b.head.len(), b.pair, b.tail), (3, vec![3, 4], vec![]));
        let last = Blocks::new(5, 5).unwrap();
        assert_eq!(last.head, vec![0, 1, 2, 3]);
        for t in term_indices(3, 6).unwrap() {
            assert!(t.k0 >= 0 && t.k >= -1);
            if t.k == -1 && t.k0 == 0 {
                assert_eq!((t.n1, t.n2), (2, 2));
            }
        }
        assert!(term_indices(5, 5)
            .unwrap()
            .iter()
            .all(|t| t.k == -1 && t.n1 == 0));
        assert!(Blocks::new(0, 3).is_err());
        assert!(Blocks::new(4, 3).is_err());
    }

    #[test]
    fn phi_rank_two() {
        let n = 3;
        let (x1, x2, z) = (v(n, 0), v(n, 1), v(n, 2));
        let phi1 = build_phi(1, 2).unwrap();
        let common = &(&(&x1 - &x2) - &z) * &(&x1 - &x2);
        assert_eq!(phi1.coeff_x, vec![common.clone(), -&common]);
        assert!(phi1.coeff_z.is_zero());
        assert_eq!(phi1.coeff_x[0].homogeneous_degree(), Some(2));

        let phi2 = build_phi_ell(2).unwrap();
        let two = Poly::constant(n, Rational::from_int(2));
        assert_eq!(phi2.coeff_x[0], &(&two * &(&x1 * &x2)) - &(&x2 * &z));
        assert_eq!(
            phi2.coeff_x[1],
            &(&(&x1 * &x1) + &(&x2 * &x2)) - &(&x1 * &z)
        );
        // phi_2(x1 + x2) = (x1 + x2)(x1 + x2 - z)
        let sum = &x1 + &x2;
        assert_eq!(phi2.apply(&sum).unwrap(), &sum * &(&sum - &z));
        // phi_2(x1 - x2) = -(x1 - x2)(x1 - x2 - z)
        let diff = &x1 - &x2;
        assert_eq!(phi2.apply(&diff).unwrap(), -&(&diff * &(&diff - &z)));
        assert!(phi1.apply(&z).unwrap().is_zero());
    }

    #[test]
    fn euler_examples() {
        let e = build_euler(4).unwrap();
        let n = 5;
        assert_eq!(e.apply(&v(n, 2)).unwrap(), v(n, 2));
        assert_eq!(e.apply(&v(n, 4)).unwrap(), v(n, 4));
        let f = &(&v(n, 0) * &v(n, 0)) * &v(n, 4);
        assert_eq!(e.apply(&f).unwrap(), f.scale(&Rational::from_int(3)));
        let g = &(&v(n, 0) * &v(n, 1)) * &v(n, 4);
        assert_eq!(e.apply(&g).unwrap(), g.scale(&Rational::from_int(3)));
    }

    #[test]
    fn basis_shapes() {
        let b2 = basis(2).unwrap();
        assert_eq!(b2.len(), 3);
        let degrees: Vec<_> = b2
            .iter()
            .map(|d| d.coeff_x[0].homogeneous_degree().unwrap())
            .collect();
        assert_eq!(degrees, vec![1, 2, 2]);
        let b3 = basis(3).unwrap();
        assert_eq!(b3.len(), 4);
        for phi in &b3[1..] {
            for c in &phi.coeff_x {
                assert!(c.is_zero() || c.homogeneous_degree() == Some(4));
            }
        }
        assert_eq!(basis(1), Err(ShiError::EllOutOfRange(1)));
        assert!(build_phi(3, 3).is_err());
    }

    #[test]
    fn last_phi_initial_monomial() {
        for ell in 2..=5 {
            let phi = build_phi_ell(ell).unwrap();
            let mut exps = vec![2u32; ell - 1];
            exps.extend([0, 0]);
            let expected = Monomial::from_exponents(&exps).unwrap();
            assert_eq!(phi.coeff_x[ell - 1].initial_monomial().unwrap(), expected);
        }
    }

    #[test]
    fn apply_rejects_shape_mismatch() {
        let e = build_euler(2).unwrap();
        assert!(e.apply(&Poly::var(5, 0).unwrap()).is_err());
    }
}
