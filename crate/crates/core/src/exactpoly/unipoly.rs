use std::fmt;

use super::monomial::Monomial;
use super::poly::Poly;
use super::rational::Rational;
use super::PolyError;

/// Dense univariate polynomial; `coeffs[n]` is the coefficient of `x^n`.
/// The highest stored coefficient is nonzero; zero is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_int(c)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `x`
    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Rational {
        self.coeffs.get(n).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new((0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new((0..n).map(|i| &self.coeff(i) - &other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        UniPoly::new(out)
    }

    pub fn scale(&self, c: &Rational) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, exp: u32) -> UniPoly {
        (0..exp).fold(UniPoly::constant(Rational::one()), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| &(&acc * x) + c)
    }

    /// `p(x + 1)`, by Horner's scheme over polynomials.
    pub fn shift_by_one(&self) -> UniPoly {
        let x_plus_one = UniPoly::from_ints(&[1, 1]);
        self.coeffs.iter().rev().fold(UniPoly::zero(), |acc, c| {
            acc.mul(&x_plus_one).add(&UniPoly::constant(c.clone()))
        })
    }

    /// `p(-x)`
    pub fn reflect(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| if n % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// `p(x + 1) - p(x)`
    pub fn forward_difference(&self) -> UniPoly {
        self.shift_by_one().sub(self)
    }

    /// `z^degree * p(x/z)` as a polynomial in the variables `(x, z)` of a
    /// two-variable ring. Requires `degree >= deg p`.
    pub fn homogenize(&self, degree: u32) -> Result<Poly, PolyError> {
        if let Some(d) = self.degree() {
            if d as u32 > degree {
                return Err(PolyError::DegreeTooLarge {
                    degree: d as u32,
                    target: degree,
                });
            }
        }
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| {
                Ok((
                    Monomial::from_exponents(&[n as u32, degree - n as u32])?,
                    c.clone(),
                ))
            })
            .collect::<Result<Vec<_>, PolyError>>()?;
        Ok(Poly::from_terms(2, terms))
    }

    pub fn render(&self, var: &str) -> String {
        let names = [var.to_string()];
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| (Monomial::var(0, n as u8), c.clone()));
        Poly::from_terms(1, terms).render(&names)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = UniPoly::from_ints(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(UniPoly::from_ints(&[0, 0]), UniPoly::zero());
        assert_eq!(UniPoly::zero().degree(), None);
    }

    #[test]
    fn shift_and_reflect() {
        // (x+1)^2 = x^2 + 2x + 1
        let sq = UniPoly::from_ints(&[0, 0, 1]);
        assert_eq!(sq.shift_by_one(), UniPoly::from_ints(&[1, 2, 1]));
        assert_eq!(
            UniPoly::from_ints(&[1, 2, 3, 4]).reflect(),
            UniPoly::from_ints(&[1, -2, 3, -4])
        );
        assert_eq!(sq.forward_difference(), UniPoly::from_ints(&[1, 2]));
    }

    #[test]
    fn homogenize_and_render() {
        let p = UniPoly::new(vec![
            Rational::zero(),
            Rational::new(2, 3),
            Rational::zero(),
            Rational::new(1, 3),
        ]);
        assert_eq!(p.to_string(), "1/3*x^3 + 2/3*x");
        let h = p.homogenize(3).unwrap();
        assert_eq!(h.render(&["x".into(), "z".into()]), "1/3*x^3 + 2/3*x*z^2");
        assert!(p.homogenize(2).is_err());
    }
}
