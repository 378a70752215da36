use std::cmp::Ordering;
use std::fmt;

use super::PolyError;

/// Maximum number of variables a [`Monomial`] can carry.
pub const MAX_VARS: usize = 16;

/// Exponent vector over at most [`MAX_VARS`] variables.
///
/// Slot 0 is the lex-greatest variable (`x1`), so the derived ordering on the
/// exponent array is exactly pure lex with `x1 > x2 > ... > z`. Slots past the
/// owning polynomial's variable count are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial([u8; MAX_VARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; MAX_VARS])
    }

    pub fn var(index: usize, exp: u8) -> Self {
        let mut e = [0; MAX_VARS];
        e[index] = exp;
        Monomial(e)
    }

    pub fn from_exponents(exps: &[u32]) -> Result<Self, PolyError> {
        if exps.len() > MAX_VARS {
            return Err(PolyError::TooManyVariables(exps.len()));
        }
        let mut e = [0; MAX_VARS];
        for (slot, &x) in e.iter_mut().zip(exps) {
            *slot = u8::try_from(x).map_err(|_| PolyError::ExponentOverflow)?;
        }
        Ok(Monomial(e))
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0[index] as u32
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        self.0[..nvars].iter().map(|&e| e as u32).collect()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; MAX_VARS]
    }

    pub fn checked_mul(&self, other: &Monomial) -> Result<Monomial, PolyError> {
        let mut e = [0; MAX_VARS];
        for (slot, (a, b)) in e.iter_mut().zip(self.0.iter().zip(&other.0)) {
            *slot = a.checked_add(*b).ok_or(PolyError::ExponentOverflow)?;
        }
        Ok(Monomial(e))
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut e = [0; MAX_VARS];
        for (slot, (a, b)) in e.iter_mut().zip(self.0.iter().zip(&other.0)) {
            *slot = a.checked_sub(*b)?;
        }
        Some(Monomial(e))
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub(crate) fn with_exponent(&self, index: usize, exp: u8) -> Monomial {
        let mut m = *self;
        m.0[index] = exp;
        m
    }

    /// Pure lex comparison: `x1 > x2 > ... > z`.
    pub fn lex_cmp(&self, other: &Monomial) -> Ordering {
        self.cmp(other)
    }

    pub fn render(&self, names: &[String]) -> String {
        let parts: Vec<String> = names
            .iter()
            .enumerate()
            .filter(|(i, _)| self.0[*i] > 0)
            .map(|(i, name)| match self.0[i] {
                1 => name.clone(),
                e => format!("{name}^{e}"),
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.0.iter().rposition(|&e| e != 0).map_or(0, |p| p + 1);
        write!(f, "{:?}", &self.0[..last])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex_prefers_earlier_variables() {
        let x1 = Monomial::var(0, 1);
        let x2_cubed = Monomial::var(1, 3);
        let z5 = Monomial::var(2, 5);
        assert!(x1 > x2_cubed);
        assert!(x2_cubed > z5);
        let x1x2 = x1.checked_mul(&Monomial::var(1, 1)).unwrap();
        let x1z = x1.checked_mul(&Monomial::var(2, 1)).unwrap();
        assert!(x1x2 > x1z);
    }

    #[test]
    fn overflow_is_reported() {
        let big = Monomial::var(0, 200);
        assert_eq!(big.checked_mul(&big), Err(PolyError::ExponentOverflow));
        assert!(Monomial::from_exponents(&[300]).is_err());
    }

    #[test]
    fn division_of_monomials() {
        let a = Monomial::from_exponents(&[2, 1, 0]).unwrap();
        let b = Monomial::from_exponents(&[1, 1, 0]).unwrap();
        assert_eq!(a.checked_div(&b), Some(Monomial::var(0, 1)));
        assert_eq!(b.checked_div(&a), None);
        assert!(b.divides(&a));
    }
}
