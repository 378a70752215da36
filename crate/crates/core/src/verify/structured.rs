//! A factorization of `[phi_j(x_i)]` through a Vandermonde matrix in the
//! squares of the variables.
//!
//! Write `x_i * phi_j(x_i) = c_j * H_j(x_i)` where `c_j` is the linear
//! prefactor (`1` for `j = l`, whose `-x_l` is kept inside `H_l`) and
//! `H_j(y) = sum_m G[m][j] y^(2m)` is even in a fresh variable `y`. Then
//!
//! ```text
//! diag(x) * M = V * G * diag(c),   V[i][m] = x_i^(2m),
//! ```
//!
//! the first row of `G` is divisible by `x_1 ... x_l`, and
//! `det M = prod_{s<t} (x_t^2 - x_s^2) * prod c_j * det G'` where `G'` is `G`
//! with that row divided out. `G'` has far smaller entries than `M`.

use rayon::prelude::*;

use super::det::minor_expansion_det;
use super::factored::FactoredPoly;
use super::VerifyError;
use crate::exactpoly::{Poly, Rational};
use crate::shi_basis::{check_ell, prefactor, scaled_sum};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VandermondeSplit {
    pub ell: usize,
    /// `G'`, indexed `[m][j - 1]`.
    pub reduced: Vec<Vec<Poly>>,
}

fn product_of_vars(nvars: usize, ell: usize) -> Result<Poly, VerifyError> {
    let mut p = Poly::one(nvars);
    for i in 0..ell {
        p = p.try_mul(&Poly::var(nvars, i)?)?;
    }
    Ok(p)
}

/// `c_j` in the ring `x_1..x_l, z`; `None` stands for `1`.
fn column_prefactor(j: usize, ell: usize) -> Result<Option<Poly>, VerifyError> {
    Ok((j < ell).then(|| prefactor(j, ell, ell + 1)).transpose()?)
}

impl VandermondeSplit {
    pub fn new(ell: usize) -> Result<Self, VerifyError> {
        check_ell(ell)?;
        let nvars = ell + 1;
        let y = ell + 1;
        let xs = product_of_vars(nvars, ell)?;
        let columns = (1..=ell)
            .into_par_iter()
            .map(|j| -> Result<Vec<Poly>, VerifyError> {
                let mut h = scaled_sum(j, ell, ell + 2, y)?;
                if j == ell {
                    h = h.try_mul(&prefactor(ell, ell, ell + 2)?)?;
                }
                let mut col = vec![Poly::zero(nvars); ell];
                for (e, c) in h.coefficients_in(y)?.into_iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    if e % 2 == 1 || e / 2 >= ell {
                        return Err(VerifyError::Structure(format!(
                            "column {j} has a y^{e} term"
                        )));
                    }
                    col[e / 2] = c.restrict(nvars)?;
                }
                col[0] = col[0].exact_div(&xs).map_err(|_| {
                    VerifyError::Structure(format!(
                        "column {j}: constant term not divisible by x1...xl"
                    ))
                })?;
                Ok(col)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let reduced = (0..ell)
            .map(|m| columns.iter().map(|c| c[m].clone()).collect())
            .collect();
        Ok(VandermondeSplit { ell, reduced })
    }

    /// Whether `x_i * M[i][j] = c_j * H_j(x_i)` for every entry of `m`.
    pub fn matches(&self, m: &[Vec<Poly>]) -> Result<bool, VerifyError> {
        let ell = self.ell;
        let nvars = ell + 1;
        if m.len() != ell || m.iter().any(|r| r.len() != ell) {
            return Ok(false);
        }
        let xs = product_of_vars(nvars, ell)?;
        let prefs = (1..=ell)
            .map(|j| column_prefactor(j, ell))
            .collect::<Result<Vec<_>, _>>()?;
        let checks = (0..ell * ell)
            .into_par_iter()
            .map(|idx| -> Result<bool, VerifyError> {
                let (i, j) = (idx / ell, idx % ell);
                let xi = Poly::var(nvars, i)?;
                let xi_sq = xi.try_mul(&xi)?;
                // Horner in x_i^2, top row first
                let mut h = Poly::zero(nvars);
                for row in (0..ell).rev() {
                    let g = if row == 0 {
                        self.reduced[0][j].try_mul(&xs)?
                    } else {
                        self.reduced[row][j].clone()
                    };
                    h = h.try_mul(&xi_sq)?.try_add(&g)?;
                }
                if let Some(c) = &prefs[j] {
                    h = h.try_mul(c)?;
                }
                Ok(xi.try_mul(&m[i][j])? == h)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(checks.into_iter().all(|ok| ok))
    }

    /// `det G'`.
    pub fn reduced_det(&self) -> Result<Poly, VerifyError> {
        minor_expansion_det(&self.reduced, self.ell + 1)
    }

    /// `prod_{s<t} (x_t^2 - x_s^2) * prod_{j<l} c_j`, so that
    /// `det M = known_factor * det G'`.
    pub fn known_factor(&self) -> Result<FactoredPoly, VerifyError> {
        let ell = self.ell;
        let nvars = ell + 1;
        let x = |i| Poly::var(nvars, i);
        let mut forms = Vec::new();
        for s in 0..ell {
            for t in s + 1..ell {
                forms.push(x(t)?.try_sub(&x(s)?)?);
                forms.push(x(t)?.try_add(&x(s)?)?);
            }
        }
        for j in 1..ell {
            forms.push(prefactor(j, ell, nvars)?);
        }
        FactoredPoly::from_linear(nvars, Rational::one(), &forms).ok_or_else(|| {
            VerifyError::Structure("known factor is not a product of linear forms".into())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shi_basis::basis;
    use crate::verify::det::bareiss_det;

    fn phi_matrix(ell: usize) -> Vec<Vec<Poly>> {
        let b = basis(ell).unwrap();
        (0..ell)
            .map(|i| (1..=ell).map(|j| b[j].coeff_x[i].clone()).collect())
            .collect()
    }

    #[test]
    fn split_reproduces_the_matrix() {
        for ell in 2..=5 {
            let split = VandermondeSplit::new(ell).unwrap();
            assert!(split.matches(&phi_matrix(ell)).unwrap(), "l = {ell}");
            // the bottom row of G' is constant except for the last column
            assert!(split.reduced[ell - 1][..ell - 1]
                .iter()
                .all(|p| p.degree() == Some(0)));
        }
    }

    #[test]
    fn split_detects_a_perturbed_entry() {
        let ell = 3;
        let split = VandermondeSplit::new(ell).unwrap();
        let mut m = phi_matrix(ell);
        m[1][2] = m[1][2]
            .try_add(&Poly::var(ell + 1, 0).unwrap().pow(4).unwrap())
            .unwrap();
        assert!(!split.matches(&m).unwrap());
        assert!(!split.matches(&m[..2]).unwrap());
    }

    #[test]
    fn determinant_identity_against_direct_elimination() {
        for ell in 2..=4 {
            let split = VandermondeSplit::new(ell).unwrap();
            let via_split = split
                .known_factor()
                .unwrap()
                .try_mul(&FactoredPoly::opaque(split.reduced_det().unwrap()))
                .unwrap()
                .expand()
                .unwrap();
            assert_eq!(
                via_split,
                bareiss_det(&phi_matrix(ell), ell + 1).unwrap(),
                "l = {ell}"
            );
        }
    }
}
