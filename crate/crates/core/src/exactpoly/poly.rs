use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rustc_hash::FxHashMap;

use super::monomial::{Monomial, MAX_VARS};
use super::rational::Rational;
use super::PolyError;

/// Sparse multivariate polynomial over the rationals.
///
/// Terms are kept sorted by pure lex, greatest first, with no zero
/// coefficients, so structural equality is polynomial equality and the
/// initial monomial is the first term.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: Vec<(Monomial, Rational)>,
}

/// Products with at least this many term pairs are split across threads.
const PAR_MUL_THRESHOLD: usize = 1 << 20;

/// Variable names `x1, ..., x{n-1}, z` for an `n`-variable ring.
pub fn default_names(nvars: usize) -> Vec<String> {
    (0..nvars)
        .map(|i| {
            if i + 1 == nvars {
                "z".to_string()
            } else {
                format!("x{}", i + 1)
            }
        })
        .collect()
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        Poly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(nvars, Monomial::one(), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn monomial(nvars: usize, m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.push((m, c));
        }
        p
    }

    /// The variable with the given 0-based index.
    pub fn var(nvars: usize, index: usize) -> Result<Self, PolyError> {
        if index >= nvars {
            return Err(PolyError::VarOutOfRange { index, nvars });
        }
        Ok(Self::monomial(
            nvars,
            Monomial::var(index, 1),
            Rational::one(),
        ))
    }

    /// Canonicalizes an arbitrary list of terms (duplicates are summed).
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut acc: FxHashMap<Monomial, Rational> = FxHashMap::default();
        for (m, c) in terms {
            acc.entry(m).and_modify(|e| *e += &c).or_insert(c);
        }
        Self::from_map(nvars, acc)
    }

    fn from_map(nvars: usize, acc: FxHashMap<Monomial, Rational>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
        Poly { nvars, terms }
    }

    /// Builds a linear form `sum coeffs[i] * var_i`.
    pub fn linear(coeffs: &[Rational]) -> Self {
        let nvars = coeffs.len();
        let mut terms: Vec<_> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (Monomial::var(i, 1), c.clone()))
            .collect();
        terms.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
        Poly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// The constant value, if this polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms
            .binary_search_by(|(t, _)| m.cmp(t))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_default()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.exponent(var)).max()
    }

    /// `Some(d)` when every term has total degree `d`; `None` otherwise or for zero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.terms.first()?.0.degree();
        self.terms.iter().all(|(m, _)| m.degree() == d).then_some(d)
    }

    /// Lex-greatest monomial.
    pub fn initial_monomial(&self) -> Result<Monomial, PolyError> {
        self.terms
            .first()
            .map(|(m, _)| *m)
            .ok_or(PolyError::ZeroPolynomial)
    }

    pub fn leading_coeff(&self) -> Result<&Rational, PolyError> {
        self.terms
            .first()
            .map(|(_, c)| c)
            .ok_or(PolyError::ZeroPolynomial)
    }

    fn check_nvars(&self, other: &Poly) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::NvarsMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    fn merge(&self, other: &Poly, negate_other: bool) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let take_b = |c: &Rational| if negate_other { -c } else { c.clone() };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push((b[j].0, take_b(&b[j].1)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate_other {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (*m, take_b(c))));
        Poly {
            nvars: self.nvars,
            terms: out,
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_nvars(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_nvars(other)?;
        Ok(self.merge(other, true))
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_nvars(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(self.nvars));
        }
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        if small.len() == 1 {
            let (m, c) = &small.terms[0];
            return large.mul_term(m, c);
        }
        if small.len() * large.len() >= PAR_MUL_THRESHOLD {
            return par_mul(small, large);
        }
        let mut acc = FxHashMap::default();
        accumulate_products(&small.terms, large, &mut acc)?;
        Ok(Poly::from_map(self.nvars, acc))
    }

    /// Multiplication by a single term; lex order is preserved, so no re-sort.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Result<Poly, PolyError> {
        if c.is_zero() {
            return Ok(Poly::zero(self.nvars));
        }
        let terms = self
            .terms
            .iter()
            .map(|(t, a)| Ok((t.checked_mul(m)?, a * c)))
            .collect::<Result<Vec<_>, PolyError>>()?;
        Ok(Poly {
            nvars: self.nvars,
            terms,
        })
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Result<Poly, PolyError> {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..exp {
            acc = acc.try_mul(self)?;
        }
        Ok(acc)
    }

    /// Multivariate division with remainder by a single divisor under pure lex.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly), PolyError> {
        self.check_nvars(divisor)?;
        let (lead_m, lead_c) = divisor.terms.first().ok_or(PolyError::DivisionByZero)?;
        let lead_inv = lead_c.recip().expect("nonzero leading coefficient");
        let tail = &divisor.terms[1..];

        let mut work: BTreeMap<Monomial, Rational> = self.terms.iter().cloned().collect();
        let mut quotient = Vec::new();
        let mut remainder = Vec::new();
        while let Some((m, c)) = work.pop_last() {
            match m.checked_div(lead_m) {
                Some(qm) => {
                    let qc = &c * &lead_inv;
                    for (tm, tc) in tail {
                        let key = tm.checked_mul(&qm)?;
                        let delta = &qc * tc;
                        match work.entry(key) {
                            std::collections::btree_map::Entry::Occupied(mut e) => {
                                *e.get_mut() -= &delta;
                                if e.get().is_zero() {
                                    e.remove();
                                }
                            }
                            std::collections::btree_map::Entry::Vacant(e) => {
                                e.insert(-delta);
                            }
                        }
                    }
                    quotient.push((qm, qc));
                }
                None => remainder.push((m, c)),
            }
        }
        Ok((
            Poly {
                nvars: self.nvars,
                terms: quotient,
            },
            Poly {
                nvars: self.nvars,
                terms: remainder,
            },
        ))
    }

    /// The quotient `self / divisor`, failing unless the division is exact.
    pub fn exact_div(&self, divisor: &Poly) -> Result<Poly, PolyError> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(PolyError::NotExact)
        }
    }

    /// Whether `self` divides `other`.
    pub fn divides(&self, other: &Poly) -> Result<bool, PolyError> {
        if self.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if other.is_zero() {
            self.check_nvars(other)?;
            return Ok(true);
        }
        Ok(other.div_rem(self)?.1.is_zero())
    }

    pub fn partial_derivative(&self, var: usize) -> Result<Poly, PolyError> {
        if var >= self.nvars {
            return Err(PolyError::VarOutOfRange {
                index: var,
                nvars: self.nvars,
            });
        }
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exponent(var) > 0)
            .map(|(m, c)| {
                let e = m.exponent(var);
                (
                    m.with_exponent(var, (e - 1) as u8),
                    c * &Rational::from_int(e as i64),
                )
            })
            .collect::<Vec<_>>();
        // d/dx keeps lex order: terms with distinct exponents in `var` remain
        // distinct after the shift, and the relative order is unchanged.
        Ok(Poly {
            nvars: self.nvars,
            terms,
        })
    }

    /// Replaces variable `var` by `g` and expands.
    pub fn substitute(&self, var: usize, g: &Poly) -> Result<Poly, PolyError> {
        if var >= self.nvars {
            return Err(PolyError::VarOutOfRange {
                index: var,
                nvars: self.nvars,
            });
        }
        self.check_nvars(g)?;
        let max_e = self.degree_in(var).unwrap_or(0) as usize;
        let mut powers = vec![Poly::one(self.nvars)];
        for k in 1..=max_e {
            powers.push(powers[k - 1].try_mul(g)?);
        }
        let mut by_power: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); max_e + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(var) as usize;
            by_power[e].push((m.with_exponent(var, 0), c.clone()));
        }
        let mut acc = FxHashMap::default();
        for (e, cofactor) in by_power.iter().enumerate() {
            if !cofactor.is_empty() {
                accumulate_products(cofactor, &powers[e], &mut acc)?;
            }
        }
        Ok(Poly::from_map(self.nvars, acc))
    }

    /// `sigma_n` of the given variables raised to `power`:
    /// `power = 1` is the elementary symmetric polynomial, `power = 2` gives
    /// `sigma_n(y_1^2, ..., y_m^2)`. Out-of-range `n` yields zero.
    pub fn elementary_symmetric_pow(
        nvars: usize,
        vars: &[usize],
        n: usize,
        power: u8,
    ) -> Result<Poly, PolyError> {
        if let Some(&bad) = vars.iter().find(|&&v| v >= nvars) {
            return Err(PolyError::VarOutOfRange { index: bad, nvars });
        }
        if n > vars.len() {
            return Ok(Poly::zero(nvars));
        }
        let mut terms = Vec::new();
        let mut chosen = Vec::with_capacity(n);
        fn rec(
            vars: &[usize],
            n: usize,
            power: u8,
            chosen: &mut Vec<usize>,
            terms: &mut Vec<(Monomial, Rational)>,
        ) {
            if chosen.len() == n {
                let mut m = Monomial::one();
                for &v in chosen.iter() {
                    m = m.with_exponent(v, m.exponent(v) as u8 + power);
                }
                terms.push((m, Rational::one()));
                return;
            }
            let need = n - chosen.len();
            for (k, &v) in vars.iter().enumerate() {
                if vars.len() - k < need {
                    break;
                }
                chosen.push(v);
                rec(&vars[k + 1..], n, power, chosen, terms);
                chosen.pop();
            }
        }
        rec(vars, n, power, &mut chosen, &mut terms);
        Ok(Poly::from_terms(nvars, terms))
    }

    pub fn elementary_symmetric(nvars: usize, vars: &[usize], n: usize) -> Result<Poly, PolyError> {
        Self::elementary_symmetric_pow(nvars, vars, n, 1)
    }

    /// Moves the polynomial into a ring with `nvars` variables, mapping old
    /// variable `i` to `mapping[i]`.
    pub fn remap(&self, nvars: usize, mapping: &[usize]) -> Result<Poly, PolyError> {
        assert_eq!(mapping.len(), self.nvars);
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; nvars];
            for (i, &target) in mapping.iter().enumerate() {
                if target >= nvars {
                    return Err(PolyError::VarOutOfRange {
                        index: target,
                        nvars,
                    });
                }
                exps[target] += m.exponent(i);
            }
            terms.push((Monomial::from_exponents(&exps)?, c.clone()));
        }
        Ok(Poly::from_terms(nvars, terms))
    }

    /// Coefficients `c_e` with `self = sum_e c_e * var^e`; `c_e` does not
    /// involve `var`.
    pub fn coefficients_in(&self, var: usize) -> Result<Vec<Poly>, PolyError> {
        if var >= self.nvars {
            return Err(PolyError::VarOutOfRange {
                index: var,
                nvars: self.nvars,
            });
        }
        let max_e = self.degree_in(var).map_or(0, |d| d as usize + 1);
        let mut out = vec![Poly::zero(self.nvars); max_e];
        // stripping `var` from a lex-sorted sequence keeps each bucket sorted
        for (m, c) in &self.terms {
            out[m.exponent(var) as usize]
                .terms
                .push((m.with_exponent(var, 0), c.clone()));
        }
        Ok(out)
    }

    /// The same polynomial in the first `nvars` variables; fails if a
    /// dropped variable occurs.
    pub fn restrict(&self, nvars: usize) -> Result<Poly, PolyError> {
        if let Some((m, _)) = self
            .terms
            .iter()
            .find(|(m, _)| (nvars..self.nvars).any(|v| m.exponent(v) > 0))
        {
            let index = (nvars..self.nvars)
                .find(|&v| m.exponent(v) > 0)
                .unwrap_or(nvars);
            return Err(PolyError::VarOutOfRange { index, nvars });
        }
        Ok(Poly {
            nvars,
            terms: self.terms.clone(),
        })
    }

    /// Canonical text with explicit variable names.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&m.render(names));
            } else {
                out.push_str(&format!("{abs}*{}", m.render(names)));
            }
        }
        out
    }
}

/// Adds `sum_i a_i * b` into `acc`.
fn accumulate_products(
    a: &[(Monomial, Rational)],
    b: &Poly,
    acc: &mut FxHashMap<Monomial, Rational>,
) -> Result<(), PolyError> {
    acc.reserve(b.terms.len());
    for (ma, ca) in a {
        for (mb, cb) in &b.terms {
            let m = ma.checked_mul(mb)?;
            let c = ca * cb;
            match acc.entry(m) {
                std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += &c,
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(c);
                }
            }
        }
    }
    Ok(())
}

fn par_mul(small: &Poly, large: &Poly) -> Result<Poly, PolyError> {
    use rayon::prelude::*;
    let chunks = rayon::current_num_threads().max(1) * 2;
    let chunk_len = small.terms.len().div_ceil(chunks).max(1);
    let partials = small
        .terms
        .par_chunks(chunk_len)
        .map(|chunk| {
            let mut acc = FxHashMap::default();
            accumulate_products(chunk, large, &mut acc)?;
            Ok(Poly::from_map(small.nvars, acc))
        })
        .collect::<Result<Vec<_>, PolyError>>()?;
    Ok(sum_tree(partials, small.nvars))
}

/// Sums polynomials pairwise in parallel.
pub fn sum_tree(mut parts: Vec<Poly>, nvars: usize) -> Poly {
    use rayon::prelude::*;
    while parts.len() > 1 {
        parts = parts
            .par_chunks(2)
            .map(|pair| match pair {
                [a, b] => a.merge(b, false),
                [a] => a.clone(),
                _ => unreachable!(),
            })
            .collect();
    }
    parts.pop().unwrap_or_else(|| Poly::zero(nvars))
}

/// Serialized as `[[exponents], "num", "den"]` per term, in canonical order.
impl serde::Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (m, c) in &self.terms {
            seq.serialize_element(&(
                m.exponents(self.nvars),
                c.numer().to_string(),
                c.denom().to_string(),
            ))?;
        }
        seq.end()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&default_names(self.nvars)))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.nvars, self)
    }
}

// Operator forms panic on mismatched variable counts; use the `try_*`
// methods where that can happen.
impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).expect("poly add")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.try_sub(rhs).expect("poly sub")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("poly mul")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
