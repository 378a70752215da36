use serde::Serialize;

use crate::arrangement::LinearForm;
use crate::exactpoly::{Monomial, Poly, PolyError, Rational};

/// `constant * prod(form^mult) * cofactor`, with normalized forms kept sorted
/// and merged. The cofactor is `1` whenever the polynomial is known to split
/// into linear forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactoredPoly {
    nvars: usize,
    constant: Rational,
    factors: Vec<FormPower>,
    #[serde(skip_serializing_if = "is_one")]
    cofactor: Poly,
}

fn is_one(p: &Poly) -> bool {
    p.as_constant().is_some_and(|c| c.is_one())
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct FormPower {
    pub form: LinearForm,
    pub multiplicity: u32,
}

impl FactoredPoly {
    pub fn constant(nvars: usize, c: Rational) -> Self {
        FactoredPoly {
            nvars,
            constant: c,
            factors: Vec::new(),
            cofactor: Poly::one(nvars),
        }
    }

    /// `c * prod(forms)`. Each linear polynomial is normalized and its scalar
    /// folded into the constant.
    pub fn from_linear(nvars: usize, c: Rational, forms: &[Poly]) -> Option<Self> {
        let mut out = Self::constant(nvars, c);
        for p in forms {
            let (scale, form) = LinearForm::from_poly(p)?;
            if form.nvars() != nvars {
                return None;
            }
            out.constant = &out.constant * &scale;
            out.push(form, 1);
        }
        Some(out)
    }

    /// A polynomial with no known factorization.
    pub fn opaque(p: Poly) -> Self {
        let nvars = p.nvars();
        match p.as_constant() {
            Some(c) => Self::constant(nvars, c),
            None => FactoredPoly {
                nvars,
                constant: Rational::one(),
                factors: Vec::new(),
                cofactor: p,
            },
        }
    }

    fn push(&mut self, form: LinearForm, multiplicity: u32) {
        match self.factors.binary_search_by(|f| f.form.cmp(&form)) {
            Ok(i) => self.factors[i].multiplicity += multiplicity,
            Err(i) => self.factors.insert(i, FormPower { form, multiplicity }),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn leading_constant(&self) -> &Rational {
        &self.constant
    }

    pub fn factors(&self) -> &[FormPower] {
        &self.factors
    }

    pub fn cofactor(&self) -> &Poly {
        &self.cofactor
    }

    /// Whether every factor is a known linear form.
    pub fn is_split(&self) -> bool {
        is_one(&self.cofactor)
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() || self.cofactor.is_zero()
    }

    pub fn multiplicity(&self, form: &LinearForm) -> u32 {
        self.factors
            .binary_search_by(|f| f.form.cmp(form))
            .map_or(0, |i| self.factors[i].multiplicity)
    }

    pub fn try_mul(&self, other: &FactoredPoly) -> Result<FactoredPoly, PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::NvarsMismatch(self.nvars, other.nvars));
        }
        let mut out = self.clone();
        out.constant = &out.constant * &other.constant;
        for f in &other.factors {
            out.push(f.form.clone(), f.multiplicity);
        }
        out.cofactor = out.cofactor.try_mul(&other.cofactor)?;
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> FactoredPoly {
        let mut out = self.clone();
        out.constant = &out.constant * c;
        out
    }

    /// Cancels the linear factors of a split `divisor`; `None` if some factor
    /// of the divisor is missing here or the divisor is zero or not split.
    pub fn cancel(&self, divisor: &FactoredPoly) -> Option<FactoredPoly> {
        if divisor.is_zero() || !divisor.is_split() || divisor.nvars != self.nvars {
            return None;
        }
        let mut out = self.clone();
        out.constant = &out.constant / &divisor.constant;
        for f in &divisor.factors {
            let i = out.factors.binary_search_by(|g| g.form.cmp(&f.form)).ok()?;
            let have = out.factors[i].multiplicity;
            if have < f.multiplicity {
                return None;
            }
            if have == f.multiplicity {
                out.factors.remove(i);
            } else {
                out.factors[i].multiplicity -= f.multiplicity;
            }
        }
        Some(out)
    }

    pub fn degree(&self) -> u32 {
        let linear: u32 = self.factors.iter().map(|f| f.multiplicity).sum();
        linear + self.cofactor.degree().unwrap_or(0)
    }

    /// Initial monomial, multiplicatively from the factors.
    pub fn initial_monomial(&self) -> Result<Monomial, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut m = self.cofactor.initial_monomial()?;
        for f in &self.factors {
            let lead = Monomial::var(f.form.leading_var(), 1);
            for _ in 0..f.multiplicity {
                m = m.checked_mul(&lead)?;
            }
        }
        Ok(m)
    }

    /// Coefficient of the initial monomial.
    pub fn leading_coeff(&self) -> Result<Rational, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        Ok(&self.constant * self.cofactor.leading_coeff()?)
    }

    /// Squarefree when all linear factors are distinct and no cofactor is
    /// left over to hide repeated factors.
    pub fn is_squarefree_split(&self) -> bool {
        self.is_split() && self.factors.iter().all(|f| f.multiplicity == 1)
    }

    /// The expanded polynomial; multiplies in balanced pairs.
    pub fn expand(&self) -> Result<Poly, PolyError> {
        let mut layer: Vec<Poly> = Vec::new();
        for f in &self.factors {
            let p = f.form.to_poly();
            for _ in 0..f.multiplicity {
                layer.push(p.clone());
            }
        }
        layer.push(self.cofactor.scale(&self.constant));
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
        Ok(layer.pop().expect("cofactor is always present"))
    }

    /// Human-readable product, e.g. `1/3 * (x1 + x2) * (x1 - x2 - z)`.
    pub fn render(&self, names: &[String]) -> String {
        let mut parts = vec![self.constant.to_string()];
        for f in &self.factors {
            let base = format!("({})", f.form.render(names));
            parts.push(if f.multiplicity == 1 {
                base
            } else {
                format!("{base}^{}", f.multiplicity)
            });
        }
        if !self.is_split() {
            parts.push(format!("({})", self.cofactor.render(names)));
        }
        parts.join(" * ")
    }
}
