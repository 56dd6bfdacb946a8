//! Polynomial coefficient functions in the smooth coordinates.
//!
//! These stand in for smooth functions on the body of a chart. Everything
//! the section algebra needs from a smooth function (products, partial
//! derivatives, point values, Taylor truncation around a point) is exact
//! on polynomials.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent vector over the smooth coordinates.
pub type Exponents = Vec<u32>;

/// Sparse polynomial with rational coefficients in a fixed number of variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BodyPolynomial {
    nvars: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl BodyPolynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate function `t_i`.
    pub fn variable(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rational::one())
    }

    pub fn monomial(exponents: Exponents, c: Rational) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, Rational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::ArityMismatch {
                    expected: nvars,
                    found: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, e: Exponents, c: Rational) {
        debug_assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of the constant monomial.
    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&vec![0; self.nvars])
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// `Some(c)` if this polynomial is the constant `c` (zero included).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Largest total degree of a term; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Smallest total degree of a term; `None` for the zero polynomial.
    pub fn lowest_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).min()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Partial derivative with respect to `t_i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[i] -= 1;
            out.add_term(ne, c * rat(e[i] as i64));
        }
        out
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.nvars, "point arity");
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    term *= num_traits::pow(xi.clone(), k as usize);
                }
            }
            acc += term;
        }
        acc
    }

    /// The polynomial `t ↦ p(t + x)`.
    pub fn translate(&self, x: &[Rational]) -> Self {
        assert_eq!(x.len(), self.nvars, "point arity");
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            // Π_i (t_i + x_i)^{e_i}, expanded one variable at a time.
            let mut partial: Vec<(Exponents, Rational)> = vec![(vec![0; self.nvars], c.clone())];
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let mut next = Vec::with_capacity(partial.len() * (k as usize + 1));
                let mut binom = BigInt::one();
                for j in 0..=k {
                    // C(k, j) x_i^{k-j} t_i^j
                    let factor = Rational::from_integer(binom.clone())
                        * num_traits::pow(x[i].clone(), (k - j) as usize);
                    if !factor.is_zero() {
                        for (pe, pc) in &partial {
                            let mut ne = pe.clone();
                            ne[i] += j;
                            next.push((ne, pc * &factor));
                        }
                    }
                    binom = binom * BigInt::from(k - j) / BigInt::from(j + 1);
                }
                partial = next;
            }
            for (ne, nc) in partial {
                out.add_term(ne, nc);
            }
        }
        out
    }

    /// Drops every term of total degree greater than `max_degree`.
    pub fn truncate_degree(&self, max_degree: u32) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() <= max_degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Order-`k` Taylor polynomial of `self` at `x`.
    pub fn taylor(&self, x: &[Rational], k: u32) -> Self {
        let neg: Vec<Rational> = x.iter().map(|v| -v.clone()).collect();
        self.translate(x).truncate_degree(k).translate(&neg)
    }

    pub(crate) fn fmt_with(&self, f: &mut fmt::Formatter<'_>, names: &[String]) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let is_const = e.iter().all(|&k| k == 0);
            if is_const || !c.is_one() {
                write!(f, "{c}")?;
            }
            let mut first = is_const || !c.is_one();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if first {
                    write!(f, "*")?;
                }
                first = true;
                let name = names.get(i).map(String::as_str).unwrap_or("t?");
                if k == 1 {
                    write!(f, "{name}")?;
                } else {
                    write!(f, "{name}^{k}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for BodyPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("t{i}")).collect();
        self.fmt_with(f, &names)
    }
}

impl Add for &BodyPolynomial {
    type Output = BodyPolynomial;
    fn add(self, rhs: &BodyPolynomial) -> BodyPolynomial {
        assert_eq!(self.nvars, rhs.nvars, "body arity");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &BodyPolynomial {
    type Output = BodyPolynomial;
    fn sub(self, rhs: &BodyPolynomial) -> BodyPolynomial {
        assert_eq!(self.nvars, rhs.nvars, "body arity");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &BodyPolynomial {
    type Output = BodyPolynomial;
    fn neg(self) -> BodyPolynomial {
        self.scale(&-Rational::one())
    }
}

impl Mul for &BodyPolynomial {
    type Output = BodyPolynomial;
    fn mul(self, rhs: &BodyPolynomial) -> BodyPolynomial {
        assert_eq!(self.nvars, rhs.nvars, "body arity");
        let mut out = BodyPolynomial::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}
