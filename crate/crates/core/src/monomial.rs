//! Exponent vectors shared by parameter polynomials and power series.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// An exponent vector `(e_1, …, e_k)` standing for `v_1^e_1 ⋯ v_k^e_k`.
///
/// Ordering is graded: lower total degree first, and within one degree the
/// vector with the larger leading exponent comes first, so `x` precedes `y`
/// and `x²` precedes `xy`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u16; 8]>);

impl Monomial {
    pub fn one(len: usize) -> Self {
        Monomial(smallvec::smallvec![0; len])
    }

    pub fn var(len: usize, index: usize) -> Self {
        let mut m = Self::one(len);
        m.0[index] = 1;
        m
    }

    pub fn from_exponents(exponents: &[u32]) -> Self {
        Monomial(exponents.iter().map(|&e| e as u16).collect())
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.0.iter().map(|&e| u32::from(e)).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn get(&self, index: usize) -> u32 {
        u32::from(self.0[index])
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.len(), other.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when every exponent of `other` is at most the one in `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<SmallVec<_>>>()
            .map(Monomial)
    }

    /// Places exponent `i` at position `mapping[i]` of a vector of length `len`.
    pub fn remap(&self, len: usize, mapping: &[usize]) -> Monomial {
        let mut out = Self::one(len);
        for (i, &e) in self.0.iter().enumerate() {
            out.0[mapping[i]] += e;
        }
        out
    }

    pub(crate) fn set(&mut self, index: usize, value: u32) {
        self.0[index] = value as u16;
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// Writes `name^e` factors joined by `*`; returns `false` for the unit monomial.
pub(crate) fn write_factors(
    f: &mut impl fmt::Write,
    monomial: &Monomial,
    names: &[String],
) -> Result<bool, fmt::Error> {
    let mut first = true;
    for (i, &e) in monomial.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_char('*')?;
        }
        first = false;
        f.write_str(&names[i])?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(!first)
}
