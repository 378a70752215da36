//! Determinants of square polynomial matrices.

use rustc_hash::FxHashMap;

use super::VerifyError;
use crate::exactpoly::{Poly, PolyError};

fn check_square(m: &[Vec<Poly>], nvars: usize) -> Result<usize, VerifyError> {
    let n = m.len();
    for row in m {
        if row.len() != n {
            return Err(VerifyError::NotSquare {
                rows: n,
                cols: row.len(),
            });
        }
        if let Some(e) = row.iter().find(|e| e.nvars() != nvars) {
            return Err(VerifyError::Poly(PolyError::NvarsMismatch(
                nvars,
                e.nvars(),
            )));
        }
    }
    Ok(n)
}

/// Fraction-free Gaussian elimination. Every division is exact; a zero pivot
/// is replaced by a row swap.
pub fn bareiss_det(matrix: &[Vec<Poly>], nvars: usize) -> Result<Poly, VerifyError> {
    let n = check_square(matrix, nvars)?;
    if n == 0 {
        return Ok(Poly::one(nvars));
    }
    let mut a = matrix.to_vec();
    let mut negate = false;
    let mut prev = Poly::one(nvars);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return Ok(Poly::zero(nvars));
            };
            a.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j]
                    .try_mul(&a[k][k])?
                    .try_sub(&a[i][k].try_mul(&a[k][j])?)?;
                a[i][j] = num
                    .exact_div(&prev)
                    .map_err(|_| VerifyError::InexactPivot)?;
            }
            a[i][k] = Poly::zero(nvars);
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { -&det } else { det })
}

/// Laplace expansion, memoized over column subsets. Rows are consumed from
/// the last to the first, so put the cheapest rows at the bottom.
pub fn minor_expansion_det(matrix: &[Vec<Poly>], nvars: usize) -> Result<Poly, VerifyError> {
    let n = check_square(matrix, nvars)?;
    if n > 24 {
        return Err(VerifyError::NotSquare { rows: n, cols: n });
    }
    // minors of the bottom `depth` rows, keyed by the column set they use
    let mut minors: FxHashMap<u32, Poly> = FxHashMap::default();
    minors.insert(0, Poly::one(nvars));
    for row in (0..n).rev() {
        let mut next: FxHashMap<u32, Poly> = FxHashMap::default();
        for (&used, minor) in &minors {
            if minor.is_zero() {
                continue;
            }
            for c in (0..n).filter(|c| used & (1 << c) == 0) {
                let entry = &matrix[row][c];
                if entry.is_zero() {
                    continue;
                }
                let set = used | (1 << c);
                // columns of `set` to the left of c
                let left = (set & ((1u32 << c) - 1)).count_ones();
                let mut term = entry.try_mul(minor)?;
                if left % 2 == 1 {
                    term = -&term;
                }
                let slot = next.entry(set).or_insert_with(|| Poly::zero(nvars));
                *slot = slot.try_add(&term)?;
            }
        }
        minors = next;
    }
    Ok(minors
        .remove(&((1u32 << n) - 1))
        .unwrap_or_else(|| Poly::zero(nvars)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::{Monomial, Rational};
    use proptest::prelude::*;

    fn c(n: i64) -> Poly {
        Poly::constant(2, Rational::from_int(n))
    }

    #[test]
    fn small_integer_matrices() {
        let m = vec![vec![c(2), c(1)], vec![c(7), c(4)]];
        assert_eq!(bareiss_det(&m, 2).unwrap(), c(1));
        assert_eq!(minor_expansion_det(&m, 2).unwrap(), c(1));
        // zero leading pivot forces a swap
        let m = vec![
            vec![c(0), c(1), c(2)],
            vec![c(1), c(0), c(3)],
            vec![c(4), c(-3), c(8)],
        ];
        assert_eq!(bareiss_det(&m, 2).unwrap(), c(-2));
        assert_eq!(minor_expansion_det(&m, 2).unwrap(), c(-2));
        let singular = vec![vec![c(1), c(2)], vec![c(2), c(4)]];
        assert!(bareiss_det(&singular, 2).unwrap().is_zero());
        assert!(minor_expansion_det(&[], 2).unwrap() == Poly::one(2));
        assert_eq!(
            bareiss_det(&[vec![c(1), c(2)]], 2),
            Err(VerifyError::NotSquare { rows: 1, cols: 2 })
        );
    }

    #[test]
    fn diagonal_and_identity() {
        let n = 3;
        let x = |i| Poly::var(n, i).unwrap();
        let zero = Poly::zero(n);
        let diag = vec![vec![x(0), zero.clone()], vec![zero.clone(), x(1)]];
        assert_eq!(bareiss_det(&diag, n).unwrap(), &x(0) * &x(1));
        let id: Vec<Vec<Poly>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| if i == j { Poly::one(n) } else { zero.clone() })
                    .collect()
            })
            .collect();
        assert_eq!(bareiss_det(&id, n).unwrap(), Poly::one(n));
    }

    #[test]
    fn vandermonde() {
        let n = 4;
        let x = |i| Poly::var(n, i).unwrap();
        let m: Vec<Vec<Poly>> = (0..n)
            .map(|i| (0..n).map(|e| x(i).pow(e as u32).unwrap()).collect())
            .collect();
        let mut expected = Poly::one(n);
        for s in 0..n {
            for t in s + 1..n {
                expected = &expected * &(&x(t) - &x(s));
            }
        }
        assert_eq!(bareiss_det(&m, n).unwrap(), expected);
        assert_eq!(minor_expansion_det(&m, n).unwrap(), expected);
    }

    fn arb_entry() -> impl Strategy<Value = Poly> {
        prop::collection::vec((0u32..=2, 0u32..=2, -3i64..=3), 0..=3).prop_map(|terms| {
            Poly::from_terms(
                2,
                terms.into_iter().map(|(a, b, k)| {
                    (
                        Monomial::from_exponents(&[a, b]).unwrap(),
                        Rational::from_int(k),
                    )
                }),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn methods_agree(entries in prop::collection::vec(arb_entry(), 9)) {
            let m: Vec<Vec<Poly>> = entries.chunks(3).map(|r| r.to_vec()).collect();
            prop_assert_eq!(bareiss_det(&m, 2).unwrap(), minor_expansion_det(&m, 2).unwrap());
        }
    }
}
