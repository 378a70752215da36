//! The cone over the type `D_l` Shi arrangement: the hyperplane `z = 0` and
//! `x_s + e x_t - k z = 0` for `1 <= s < t <= l`, `e = +-1`, `k in {0, 1}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exactpoly::{default_names, Poly, PolyError, Rational};
use crate::shi_basis::{check_ell, ShiError};

/// A nonzero linear form on `x_1..x_l, z`, scaled so that its first nonzero
/// coefficient is `1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearForm {
    coeffs: Vec<Rational>,
}

impl LinearForm {
    /// Normalizes `coeffs`; `None` if all are zero.
    pub fn new(coeffs: Vec<Rational>) -> Option<Self> {
        let lead = coeffs.iter().find(|c| !c.is_zero())?.clone();
        let inv = lead.recip().expect("nonzero");
        Some(LinearForm {
            coeffs: coeffs.iter().map(|c| c * &inv).collect(),
        })
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn nvars(&self) -> usize {
        self.coeffs.len()
    }

    /// Index of the lex-leading variable (coefficient `1`).
    pub fn leading_var(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .expect("nonzero form")
    }

    pub fn to_poly(&self) -> Poly {
        Poly::linear(&self.coeffs)
    }

    /// The expression the leading variable equals on the hyperplane.
    pub fn solve_for_leading(&self) -> Poly {
        let lead = self.leading_var();
        let mut rest: Vec<Rational> = self.coeffs.iter().map(|c| -c).collect();
        rest[lead] = Rational::zero();
        Poly::linear(&rest)
    }

    pub fn is_proportional_to(&self, other: &LinearForm) -> bool {
        self == other
    }

    pub fn render(&self, names: &[String]) -> String {
        self.to_poly().render(names)
    }

    /// Splits a linear polynomial into `(scalar, normalized form)`; `None`
    /// unless `p` is a nonzero homogeneous polynomial of degree 1.
    pub fn from_poly(p: &Poly) -> Option<(Rational, LinearForm)> {
        if p.homogeneous_degree() != Some(1) {
            return None;
        }
        let mut coeffs = vec![Rational::zero(); p.nvars()];
        for (m, c) in p.terms() {
            let var = (0..p.nvars()).find(|&v| m.exponent(v) == 1)?;
            coeffs[var] = c.clone();
        }
        let lead = coeffs.iter().find(|c| !c.is_zero())?.clone();
        Some((lead, LinearForm::new(coeffs)?))
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&default_names(self.nvars())))
    }
}

impl Serialize for LinearForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        strings.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(d)?;
        let coeffs = strings
            .iter()
            .map(|s| s.parse::<Rational>().map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        LinearForm::new(coeffs).ok_or_else(|| serde::de::Error::custom("zero linear form"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Arrangement {
    pub ell: usize,
    /// Coxeter number `2l - 2`.
    pub h: usize,
    pub forms: Vec<LinearForm>,
}

impl Arrangement {
    pub fn nvars(&self) -> usize {
        self.ell + 1
    }

    /// Product of all forms.
    pub fn defining_poly(&self) -> Result<Poly, PolyError> {
        self.product_of(|_| true)
    }

    /// Product of the forms other than `z`, i.e. `Q / z`.
    pub fn defining_poly_without_z(&self) -> Result<Poly, PolyError> {
        let z = self.ell;
        self.product_of(|f| f.leading_var() != z)
    }

    fn product_of(&self, keep: impl Fn(&LinearForm) -> bool) -> Result<Poly, PolyError> {
        // multiply in balanced pairs so that the two operands stay similar in size
        let mut layer: Vec<Poly> = self
            .forms
            .iter()
            .filter(|f| keep(f))
            .map(LinearForm::to_poly)
            .collect();
        if layer.is_empty() {
            return Ok(Poly::one(self.nvars()));
        }
        while layer.len() > 1 {
            layer = layer
                .chunks(2)
                .map(|pair| match pair {
                    [a, b] => a.try_mul(b),
                    [a] => Ok(a.clone()),
                    _ => unreachable!(),
                })
                .collect::<Result<_, _>>()?;
        }
        Ok(layer.pop().expect("nonempty"))
    }
}

/// Enumerates the forms: `z` first, then `(s, t)` lexicographically, `e = +1`
/// before `-1`, the linear form before its `-z` shift.
pub fn shi_d_cone(ell: usize) -> Result<Arrangement, ShiError> {
    check_ell(ell)?;
    let nvars = ell + 1;
    let unit = |entries: &[(usize, i64)]| {
        let mut c = vec![Rational::zero(); nvars];
        for &(i, v) in entries {
            c[i] = Rational::from_int(v);
        }
        LinearForm::new(c).expect("nonzero")
    };
    let mut forms = vec![unit(&[(ell, 1)])];
    for s in 0..ell {
        for t in s + 1..ell {
            for eps in [1, -1] {
                forms.push(unit(&[(s, 1), (t, eps)]));
                forms.push(unit(&[(s, 1), (t, eps), (ell, -1)]));
            }
        }
    }
    Ok(Arrangement {
        ell,
        h: 2 * ell - 2,
        forms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_coxeter_number() {
        let a2 = shi_d_cone(2).unwrap();
        let rendered: Vec<String> = a2.forms.iter().map(|f| f.to_string()).collect();
        assert_eq!(
            rendered,
            ["z", "x1 + x2", "x1 + x2 - z", "x1 - x2", "x1 - x2 - z"]
        );
        assert_eq!(shi_d_cone(3).unwrap().forms.len(), 13);
        assert_eq!(shi_d_cone(4).unwrap().h, 6);
        for ell in 2..=7 {
            assert_eq!(
                shi_d_cone(ell).unwrap().forms.len(),
                2 * ell * (ell - 1) + 1
            );
        }
        assert_eq!(shi_d_cone(1), Err(ShiError::EllOutOfRange(1)));
    }

    #[test]
    fn forms_are_distinct_and_vanish_somewhere() {
        for ell in 2..=5 {
            let arr = shi_d_cone(ell).unwrap();
            for (a, f) in arr.forms.iter().enumerate() {
                for g in &arr.forms[a + 1..] {
                    assert!(!f.is_proportional_to(g));
                }
                // substituting the solved variable kills the form
                let p = f.to_poly();
                let lead = f.leading_var();
                assert!(p
                    .substitute(lead, &f.solve_for_leading())
                    .unwrap()
                    .is_zero());
            }
        }
    }

    #[test]
    fn normalization_scales_to_leading_one() {
        let f = LinearForm::new(vec![
            Rational::zero(),
            Rational::from_int(-2),
            Rational::from_int(4),
        ])
        .unwrap();
        assert_eq!(f.to_string(), "x2 - 2*z");
        assert!(LinearForm::new(vec![Rational::zero(); 3]).is_none());
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"["0","1","-2"]"#);
        assert_eq!(serde_json::from_str::<LinearForm>(&json).unwrap(), f);
    }

    #[test]
    fn defining_polynomial() {
        let a2 = shi_d_cone(2).unwrap();
        let q = a2.defining_poly().unwrap();
        assert_eq!(q.homogeneous_degree(), Some(5));
        let x = |i| Poly::var(3, i).unwrap();
        let (x1, x2, z) = (x(0), x(1), x(2));
        let expected =
            &(&(&(&z * &(&x1 + &x2)) * &(&x1 - &x2)) * &(&(&x1 + &x2) - &z)) * &(&(&x1 - &x2) - &z);
        assert_eq!(q, expected);
        let a3 = shi_d_cone(3).unwrap();
        assert_eq!(a3.defining_poly().unwrap().homogeneous_degree(), Some(13));
        assert_eq!(
            a3.defining_poly_without_z().unwrap().homogeneous_degree(),
            Some(12)
        );
    }

    #[test]
    fn defining_polynomial_is_squarefree_in_each_form() {
        for ell in 2..=3 {
            let arr = shi_d_cone(ell).unwrap();
            let q = arr.defining_poly().unwrap();
            for f in &arr.forms {
                let once = q.exact_div(&f.to_poly()).unwrap();
                assert!(!f.to_poly().divides(&once).unwrap(), "{f} divides Q twice");
            }
        }
    }
}
