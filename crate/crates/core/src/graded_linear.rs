//! Degree bookkeeping for Z-graded vector spaces of finite type.
//!
//! Only dimensions and signs live here. Concrete generators and their
//! products are handled in [`crate::symmetric_algebra`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Integer degree of a homogeneous element.
///
/// Arithmetic is checked; overflow panics rather than wrapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Degree(pub i32);

impl Degree {
    pub const ZERO: Degree = Degree(0);

    pub fn is_odd(self) -> bool {
        self.0 % 2 != 0
    }

    pub fn is_even(self) -> bool {
        !self.is_odd()
    }

    pub fn checked_add(self, rhs: Degree) -> Option<Degree> {
        self.0.checked_add(rhs.0).map(Degree)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<i32> for Degree {
    fn from(v: i32) -> Self {
        Degree(v)
    }
}

impl Add for Degree {
    type Output = Degree;
    fn add(self, rhs: Degree) -> Degree {
        self.checked_add(rhs).expect("degree overflow")
    }
}

impl Sub for Degree {
    type Output = Degree;
    fn sub(self, rhs: Degree) -> Degree {
        Degree(self.0.checked_sub(rhs.0).expect("degree overflow"))
    }
}

impl Neg for Degree {
    type Output = Degree;
    fn neg(self) -> Degree {
        Degree(self.0.checked_neg().expect("degree overflow"))
    }
}

impl std::iter::Sum for Degree {
    fn sum<I: Iterator<Item = Degree>>(iter: I) -> Degree {
        iter.fold(Degree::ZERO, |a, b| a + b)
    }
}

/// A sign `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn to_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

/// `(-1)^(d1 * d2)`: the sign for transposing homogeneous elements of
/// degrees `d1` and `d2`.
pub fn koszul_sign(d1: Degree, d2: Degree) -> Sign {
    if d1.is_odd() && d2.is_odd() {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

/// Dimension sequence `(p_j)` of a graded vector space of finite type.
///
/// Zero entries are never stored, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GradedDimension {
    dims: BTreeMap<Degree, u64>,
}

impl GradedDimension {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, D>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (D, u64)>,
        D: Into<Degree>,
    {
        let mut out = Self::new();
        for (d, n) in pairs {
            out.add_at(d.into(), n);
        }
        out
    }

    fn add_at(&mut self, d: Degree, n: u64) {
        if n == 0 {
            return;
        }
        let slot = self.dims.entry(d).or_insert(0);
        *slot = slot.checked_add(n).expect("dimension overflow");
    }

    /// Dimension in degree `d`.
    pub fn get(&self, d: Degree) -> u64 {
        self.dims.get(&d).copied().unwrap_or(0)
    }

    /// Nonzero `(degree, dimension)` pairs in ascending degree.
    pub fn iter(&self) -> impl Iterator<Item = (Degree, u64)> + '_ {
        self.dims.iter().map(|(d, n)| (*d, *n))
    }

    pub fn total(&self) -> u64 {
        self.dims.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    /// `V[k]`, with `V[k]_i = V_{i-k}`.
    pub fn shift(&self, k: Degree) -> Self {
        Self {
            dims: self.dims.iter().map(|(d, n)| (*d + k, *n)).collect(),
        }
    }

    /// `ΠV`, with `(ΠV)_i = V_{-i}`.
    pub fn parity_reverse(&self) -> Self {
        Self {
            dims: self.dims.iter().map(|(d, n)| (-*d, *n)).collect(),
        }
    }

    /// `V*`, with `(V*)_i = (V_{-i})*`. Same dimensions as the parity reversal.
    pub fn dual(&self) -> Self {
        self.parity_reverse()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (d, n) in other.iter() {
            out.add_at(d, n);
        }
        out
    }

    /// Convolution of dimension sequences.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (d1, n1) in self.iter() {
            for (d2, n2) in other.iter() {
                out.add_at(d1 + d2, n1.checked_mul(n2).expect("dimension overflow"));
            }
        }
        out
    }
}

impl fmt::Display for GradedDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (d, n)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}:{n}")?;
        }
        write!(f, "}}")
    }
}
