//! Brute-force checks that do not rely on the explicit basis: graded
//! dimensions of the derivation module by exact linear algebra, and point
//! counts of the arrangement complement over prime fields.

use std::collections::BTreeMap;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::arrangement::{shi_d_cone, Arrangement};
use crate::exactpoly::{Monomial, Poly, PolyError, Rational};
use crate::shi_basis::{basis, check_ell, Derivation, ShiError};

/// Largest field size `q^(l+1)` the point count will enumerate.
pub const MAX_POINTS: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("q = {q} must exceed h + 1 where h = {h} is the Coxeter number")]
    PrimeTooSmall { q: u64, h: u64 },
    #[error("{q}^{dim} points exceeds the enumeration cap of {MAX_POINTS}")]
    TooManyPoints { q: u64, dim: u32 },
    #[error("a form has a denominator divisible by {0}")]
    BadReduction(u64),
    #[error(transparent)]
    Shi(#[from] ShiError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradedDimReport {
    pub ell: usize,
    pub degree: usize,
    pub computed_dim: usize,
    pub expected_dim: usize,
    /// Rank of `{monomial * basis element}` in degree `d`, when computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_span_dim: Option<usize>,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharpolyReport {
    pub ell: usize,
    pub q: u64,
    pub count: u64,
    /// `(q - 1)(q - h)^l`.
    pub expected: u64,
    pub matches: bool,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `sum_{e in (1, h, ..., h), e <= d} C(d - e + l, l)` with `h = 2l - 2`.
pub fn expected_dim(ell: usize, d: usize) -> usize {
    let h = 2 * ell - 2;
    std::iter::once(1)
        .chain(std::iter::repeat_n(h, ell))
        .filter(|&e| e <= d)
        .map(|e| binomial(d - e + ell, ell))
        .sum()
}

/// All monomials of total degree `d` in `n` variables, lex-descending.
pub fn monomials_of_degree(n: usize, d: usize) -> Vec<Monomial> {
    fn rec(n: usize, d: usize, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == n {
            prefix.push(d as u32);
            out.push(Monomial::from_exponents(prefix).expect("degree fits"));
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e as u32);
            rec(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, d, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

/// Rank over the rationals by Gaussian elimination.
pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].recip().expect("nonzero pivot");
        let pivot: Vec<Rational> = rows[rank].iter().map(|c| c * &inv).collect();
        for row in rows.iter_mut().skip(rank + 1) {
            let f = row[col].clone();
            if f.is_zero() {
                continue;
            }
            for (x, p) in row.iter_mut().zip(&pivot).skip(col) {
                if !p.is_zero() {
                    *x -= &(&f * p);
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

/// Coordinates of degree-`d` derivations: `(variable, monomial)` pairs.
struct Coordinates {
    nvars: usize,
    monomials: Vec<Monomial>,
    index: FxHashMap<Monomial, usize>,
}

impl Coordinates {
    fn new(nvars: usize, d: usize) -> Self {
        let monomials = monomials_of_degree(nvars, d);
        let index = monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        Coordinates {
            nvars,
            monomials,
            index,
        }
    }
    fn len(&self) -> usize {
        self.nvars * self.monomials.len()
    }
    fn of(&self, var: usize, m: &Monomial) -> Option<usize> {
        self.index.get(m).map(|i| var * self.monomials.len() + i)
    }
}

/// The linear conditions `theta(alpha) = 0 on alpha = 0`, one row per
/// coefficient of the substituted image, for every form.
fn membership_equations(
    arr: &Arrangement,
    coords: &Coordinates,
) -> Result<Vec<Vec<Rational>>, OracleError> {
    let blocks = arr
        .forms
        .par_iter()
        .map(|form| -> Result<Vec<Vec<Rational>>, OracleError> {
            let lead = form.leading_var();
            let solved = form.solve_for_leading();
            let mut rows: BTreeMap<Monomial, Vec<Rational>> = BTreeMap::new();
            for (mi, m) in coords.monomials.iter().enumerate() {
                let image =
                    Poly::monomial(coords.nvars, *m, Rational::one()).substitute(lead, &solved)?;
                for (v, a) in form.coeffs().iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let col = v * coords.monomials.len() + mi;
                    for (t, c) in image.terms() {
                        let row = rows
                            .entry(*t)
                            .or_insert_with(|| vec![Rational::zero(); coords.len()]);
                        row[col] += &(a * c);
                    }
                }
            }
            Ok(rows.into_values().collect())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(blocks.into_iter().flatten().collect())
}

/// Dimension of the degree-`d` part of the derivation module, as the null
/// space of the membership conditions.
pub fn derivation_dim(ell: usize, d: usize) -> Result<usize, OracleError> {
    check_ell(ell)?;
    let arr = shi_d_cone(ell)?;
    let coords = Coordinates::new(ell + 1, d);
    let eqs = membership_equations(&arr, &coords)?;
    Ok(coords.len() - rank(eqs))
}

fn derivation_vector(
    theta: &Derivation,
    mult: &Monomial,
    coords: &Coordinates,
) -> Result<Vec<Rational>, OracleError> {
    let mut out = vec![Rational::zero(); coords.len()];
    for v in 0..coords.nvars {
        for (m, c) in theta.coeff(v).terms() {
            let prod = m.checked_mul(mult)?;
            let i = coords.of(v, &prod).ok_or_else(|| {
                OracleError::Poly(PolyError::DegreeTooLarge {
                    degree: prod.degree(),
                    target: coords.monomials.first().map_or(0, Monomial::degree),
                })
            })?;
            out[i] += c;
        }
    }
    Ok(out)
}

/// Rank of `{mu * theta : theta in basis, mu a monomial, deg(mu * theta) = d}`
/// and whether all of them satisfy the membership conditions.
pub fn basis_span_dim(ell: usize, d: usize) -> Result<(usize, bool), OracleError> {
    check_ell(ell)?;
    let arr = shi_d_cone(ell)?;
    let coords = Coordinates::new(ell + 1, d);
    let mut vectors = Vec::new();
    for theta in basis(ell)? {
        let deg = theta
            .coeff_x
            .iter()
            .chain([&theta.coeff_z])
            .find_map(Poly::degree)
            .unwrap_or(0) as usize;
        if deg > d {
            continue;
        }
        for mu in monomials_of_degree(ell + 1, d - deg) {
            vectors.push(derivation_vector(&theta, &mu, &coords)?);
        }
    }
    let eqs = membership_equations(&arr, &coords)?;
    let in_kernel = vectors.iter().all(|v| {
        eqs.iter().all(|row| {
            row.iter()
                .zip(v)
                .map(|(a, b)| a * b)
                .sum::<Rational>()
                .is_zero()
        })
    });
    Ok((rank(vectors), in_kernel))
}

/// Graded dimension report for degree `d`, including the span of the basis
/// when `with_span` is set.
pub fn graded_dim_report(
    ell: usize,
    d: usize,
    with_span: bool,
) -> Result<GradedDimReport, OracleError> {
    let computed_dim = derivation_dim(ell, d)?;
    let expected = expected_dim(ell, d);
    let basis_span_dim = if with_span {
        Some(basis_span_dim(ell, d)?.0)
    } else {
        None
    };
    let matches = computed_dim == expected && basis_span_dim.is_none_or(|s| s == computed_dim);
    Ok(GradedDimReport {
        ell,
        degree: d,
        computed_dim,
        expected_dim: expected,
        basis_span_dim,
        matches,
    })
}

fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

fn mod_pow(mut b: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1;
    b %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % q;
        }
        b = b * b % q;
        e >>= 1;
    }
    acc
}

fn reduce(c: &Rational, q: u64) -> Result<u64, OracleError> {
    use num_traits::ToPrimitive;
    let qb = num_bigint::BigInt::from(q);
    let modulo = |x: num_bigint::BigInt| -> u64 {
        let r = ((x % &qb) + &qb) % &qb;
        r.to_u64().expect("residue below q")
    };
    let den = modulo(c.denom());
    if den == 0 {
        return Err(OracleError::BadReduction(q));
    }
    Ok(modulo(c.numer()) * mod_pow(den, q - 2, q) % q)
}

/// Points of `F_q^(l+1)` on none of the hyperplanes, by enumeration.
pub fn charpoly_count(ell: usize, q: u64) -> Result<u64, OracleError> {
    check_ell(ell)?;
    if q.is_multiple_of(2) || !is_prime(q) {
        return Err(OracleError::NotOddPrime(q));
    }
    let h = 2 * ell as u64 - 2;
    if q <= h + 1 {
        return Err(OracleError::PrimeTooSmall { q, h });
    }
    let dim = ell as u32 + 1;
    if q.checked_pow(dim).is_none_or(|n| n > MAX_POINTS) {
        return Err(OracleError::TooManyPoints { q, dim });
    }
    let arr = shi_d_cone(ell)?;
    let forms = arr
        .forms
        .iter()
        .map(|f| {
            f.coeffs()
                .iter()
                .map(|c| reduce(c, q))
                .collect::<Result<Vec<u64>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = dim as usize;
    let rest = q.pow(dim - 1);
    let count = (0..q)
        .into_par_iter()
        .map(|first| {
            let mut point = vec![0u64; n];
            point[0] = first;
            let mut hits = 0u64;
            for code in 0..rest {
                let mut c = code;
                for slot in point.iter_mut().skip(1) {
                    *slot = c % q;
                    c /= q;
                }
                let off = forms
                    .iter()
                    .all(|f| f.iter().zip(&point).map(|(a, x)| a * x).sum::<u64>() % q != 0);
                if off {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    Ok(count)
}

pub fn charpoly_report(ell: usize, q: u64) -> Result<CharpolyReport, OracleError> {
    let count = charpoly_count(ell, q)?;
    let h = 2 * ell as u64 - 2;
    let expected = (q - 1) * (q - h).pow(ell as u32);
    Ok(CharpolyReport {
        ell,
        q,
        count,
        expected,
        matches: count == expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_dims() {
        assert_eq!(expected_dim(3, 0), 0);
        assert_eq!(expected_dim(3, 1), 1);
        assert_eq!(expected_dim(3, 4), 23);
        assert_eq!(expected_dim(2, 2), 5);
    }

    #[test]
    fn monomial_enumeration() {
        let m = monomials_of_degree(3, 2);
        assert_eq!(m.len(), 6);
        assert!(m.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(monomials_of_degree(4, 0), vec![Monomial::one()]);
        assert_eq!(monomials_of_degree(3, 5).len(), binomial(7, 2));
    }

    #[test]
    fn rank_examples() {
        let r = |v: &[&[i64]]| {
            v.iter()
                .map(|row| row.iter().map(|&x| Rational::from_int(x)).collect())
                .collect()
        };
        assert_eq!(rank(r(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(r(&[&[0, 1, 0], &[1, 0, 0], &[1, 1, 0]])), 2);
        assert_eq!(rank(r(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank(Vec::new()), 0);
    }

    #[test]
    fn rank_two_dims() {
        assert_eq!(derivation_dim(2, 0).unwrap(), 0);
        assert_eq!(derivation_dim(2, 1).unwrap(), 1);
        assert_eq!(derivation_dim(2, 2).unwrap(), 5);
        let (span, inside) = basis_span_dim(2, 2).unwrap();
        assert_eq!(span, 5);
        assert!(inside);
    }

    #[test]
    fn point_counts() {
        assert_eq!(charpoly_count(2, 5).unwrap(), 36);
        assert_eq!(charpoly_report(2, 7).unwrap().expected, 6 * 25);
        assert_eq!(
            charpoly_count(2, 3),
            Err(OracleError::PrimeTooSmall { q: 3, h: 2 })
        );
        assert_eq!(
            charpoly_count(3, 5),
            Err(OracleError::PrimeTooSmall { q: 5, h: 4 })
        );
        assert_eq!(charpoly_count(2, 9), Err(OracleError::NotOddPrime(9)));
        assert_eq!(charpoly_count(2, 2), Err(OracleError::NotOddPrime(2)));
        assert!(matches!(
            charpoly_count(6, 101),
            Err(OracleError::TooManyPoints { .. })
        ));
    }

    #[test]
    fn reduction_mod_q() {
        assert_eq!(reduce(&Rational::new(-1, 1), 7).unwrap(), 6);
        assert_eq!(reduce(&Rational::new(1, 2), 7).unwrap(), 4);
        assert_eq!(
            reduce(&Rational::new(1, 7), 7),
            Err(OracleError::BadReduction(7))
        );
    }
}
