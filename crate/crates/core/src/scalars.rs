//! Exact coefficient arithmetic.
//!
//! A computation runs over one fixed coefficient ring: either the rationals
//! `Q` or a polynomial ring `Q[p_1, …, p_k]` in named parameters. Values of
//! different rings never mix implicitly; [`Coefficient::embed`] is the only
//! way to move a rational into a polynomial ring.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::monomial::{write_factors, Monomial};

/// Values assigned to named parameters by an evaluation homomorphism.
pub type Assignment = BTreeMap<String, Rational>;

/// An exact rational number, always in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn checked_div(&self, other: &Rational) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(&self.0 / &other.0))
    }

    pub fn pow(&self, exp: u32) -> Self {
        Rational(num_traits::pow(self.0.clone(), exp as usize))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Nearest rational with denominator `2^bits` (ties toward +∞).
    pub fn round_to_bits(&self, bits: u32) -> Self {
        let scale = BigInt::one() << bits;
        let scaled = &self.0 * BigRational::from_integer(scale.clone());
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let n = (scaled + half).floor().to_integer();
        Rational(BigRational::new(n, scale))
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Optional sign, decimal digits, optional `/` and a positive denominator.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid rational `{s}`"));
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (t, None),
        };
        let digits = num.strip_prefix(['-', '+']).unwrap_or(num);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let numer: BigInt = num.trim_start_matches('+').parse().map_err(|_| bad())?;
        let denom = match den {
            None => BigInt::one(),
            Some(d) => {
                if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                let d: BigInt = d.parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                d
            }
        };
        Ok(Rational(BigRational::new(numer, denom)))
    }
}

macro_rules! rational_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);
rational_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// The coefficient ring of a computation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum CoefficientRing {
    Rational,
    Poly(Arc<[String]>),
}

impl CoefficientRing {
    /// `Q[params]`; an empty parameter list yields `Q`.
    pub fn polynomial<S: AsRef<str>>(params: &[S]) -> Self {
        if params.is_empty() {
            CoefficientRing::Rational
        } else {
            CoefficientRing::Poly(params.iter().map(|p| p.as_ref().to_string()).collect())
        }
    }

    pub fn params(&self) -> &[String] {
        match self {
            CoefficientRing::Rational => &[],
            CoefficientRing::Poly(p) => p,
        }
    }

    pub fn zero(&self) -> Coefficient {
        self.from_rational(Rational::zero())
    }

    pub fn one(&self) -> Coefficient {
        self.from_rational(Rational::one())
    }

    pub fn from_integer(&self, n: i64) -> Coefficient {
        self.from_rational(Rational::from_integer(n))
    }

    pub fn from_rational(&self, r: Rational) -> Coefficient {
        match self {
            CoefficientRing::Rational => Coefficient::Rational(r),
            CoefficientRing::Poly(p) => Coefficient::Poly(Poly::constant(p.clone(), r)),
        }
    }

    /// The generator named `name` of a polynomial ring.
    pub fn param(&self, name: &str) -> Result<Coefficient> {
        match self {
            CoefficientRing::Poly(p) => Poly::param(p.clone(), name).map(Coefficient::Poly),
            CoefficientRing::Rational => Err(Error::UnknownParameter(name.to_string())),
        }
    }

    /// Parses a rational or polynomial text form into this ring.
    pub fn parse(&self, s: &str) -> Result<Coefficient> {
        match self {
            CoefficientRing::Rational => s.parse().map(Coefficient::Rational),
            CoefficientRing::Poly(p) => Poly::parse(p.clone(), s).map(Coefficient::Poly),
        }
    }
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientRing::Rational => f.write_str("Q"),
            CoefficientRing::Poly(p) => write!(f, "Q[{}]", p.join(",")),
        }
    }
}

impl fmt::Debug for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn same_params(a: &Arc<[String]>, b: &Arc<[String]>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A polynomial in named parameters with rational coefficients.
#[derive(Clone)]
pub struct Poly {
    params: Arc<[String]>,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        same_params(&self.params, &other.params) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn zero(params: Arc<[String]>) -> Self {
        Poly { params, terms: BTreeMap::new() }
    }

    pub fn constant(params: Arc<[String]>, c: Rational) -> Self {
        let mut p = Self::zero(params);
        if !c.is_zero() {
            let one = Monomial::one(p.params.len());
            p.terms.insert(one, c);
        }
        p
    }

    pub fn param(params: Arc<[String]>, name: &str) -> Result<Self> {
        let idx = params
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))?;
        let mut p = Self::zero(params);
        let m = Monomial::var(p.params.len(), idx);
        p.terms.insert(m, Rational::one());
        Ok(p)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms(
        params: Arc<[String]>,
        terms: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(params);
        for (exps, c) in terms {
            if exps.len() != p.params.len() {
                return Err(Error::ShapeMismatch(format!(
                    "exponent vector of length {} for {} parameters",
                    exps.len(),
                    p.params.len()
                )));
            }
            p.add_term(Monomial::from_exponents(&exps), c);
        }
        Ok(p)
    }

    pub fn params(&self) -> &Arc<[String]> {
        &self.params
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value of a constant polynomial.
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn check_ring(&self, other: &Poly) -> Result<()> {
        if same_params(&self.params, &other.params) {
            Ok(())
        } else {
            Err(Error::RingMismatch(
                format!("Q[{}]", self.params.join(",")),
                format!("Q[{}]", other.params.join(",")),
            ))
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        if let Some(c) = other.constant_value() {
            return Ok(self.scale(&c));
        }
        if let Some(c) = self.constant_value() {
            return Ok(other.scale(&c));
        }
        let mut out = Poly::zero(self.params.clone());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.params.clone());
        }
        Poly {
            params: self.params.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            params: self.params.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), -v)).collect(),
        }
    }

    /// Exact division: returns `q` with `q · divisor = self`, or an error when
    /// the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Result<Poly> {
        self.check_ring(divisor)?;
        let (lead_m, lead_c) = match divisor.terms.iter().next_back() {
            Some(t) => t,
            None => return Err(Error::DivisionByZero),
        };
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.params.clone());
        while let Some((m, c)) = rem.terms.iter().next_back() {
            let qm = m.div(lead_m).ok_or_else(|| {
                Error::InexactDivision(format!("{self} is not a multiple of {divisor}"))
            })?;
            let qc = c / lead_c;
            for (dm, dc) in &divisor.terms {
                rem.add_term(qm.mul(dm), -(&qc * dc));
            }
            quot.add_term(qm, qc);
        }
        Ok(quot)
    }

    /// Evaluates at a full assignment of the parameters.
    pub fn eval(&self, assignment: &Assignment) -> Result<Rational> {
        let values = self
            .params
            .iter()
            .map(|p| {
                assignment
                    .get(p)
                    .ok_or_else(|| Error::UnassignedParameter(p.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = t * values[i].pow(u32::from(e));
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Substitutes the assigned parameters and keeps the rest symbolic.
    ///
    /// The result lives in `Q[remaining]`, or in `Q` when every parameter is
    /// assigned. Assignments to names outside the parameter list are ignored.
    pub fn substitute(&self, assignment: &Assignment, target: &CoefficientRing) -> Result<Coefficient> {
        let keep: Vec<Option<usize>> = self
            .params
            .iter()
            .map(|p| {
                if assignment.contains_key(p) {
                    Ok(None)
                } else {
                    target
                        .params()
                        .iter()
                        .position(|q| q == p)
                        .map(Some)
                        .ok_or_else(|| Error::UnassignedParameter(p.clone()))
                }
            })
            .collect::<Result<_>>()?;
        let mut out = target.zero();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Monomial::one(target.params().len());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match keep[i] {
                    None => coef = coef * assignment[&self.params[i]].pow(u32::from(e)),
                    Some(j) => rest.set(j, u32::from(e)),
                }
            }
            let term = match target {
                CoefficientRing::Rational => Coefficient::Rational(coef),
                CoefficientRing::Poly(p) => {
                    let mut t = Poly::zero(p.clone());
                    t.add_term(rest, coef);
                    Coefficient::Poly(t)
                }
            };
            out = out.try_add(&term)?;
        }
        Ok(out)
    }

    /// Parses the text form `coef*a^2*b + b - 1/2`.
    pub fn parse(params: Arc<[String]>, s: &str) -> Result<Poly> {
        let bad = |msg: &str| Error::Parse(format!("invalid polynomial `{s}`: {msg}"));
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(bad("empty"));
        }
        let mut out = Poly::zero(params.clone());
        let mut pieces = Vec::new();
        let mut start = 0;
        for (i, ch) in text.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !text[..i].ends_with('^') {
                pieces.push(&text[start..i]);
                start = i;
            }
        }
        pieces.push(&text[start..]);
        for piece in pieces {
            let (sign, body) = match piece.as_bytes().first() {
                Some(b'-') => (-1, &piece[1..]),
                Some(b'+') => (1, &piece[1..]),
                _ => (1, piece),
            };
            if body.is_empty() {
                return Err(bad("dangling sign"));
            }
            let mut coef = Rational::from_integer(sign);
            let mut mono = Monomial::one(params.len());
            for factor in body.split('*') {
                if factor.is_empty() {
                    return Err(bad("empty factor"));
                }
                if factor.as_bytes()[0].is_ascii_digit() {
                    coef = coef * factor.parse::<Rational>()?;
                    continue;
                }
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => (n, e.parse::<u32>().map_err(|_| bad("bad exponent"))?),
                    None => (factor, 1),
                };
                let idx = params
                    .iter()
                    .position(|p| p == name)
                    .ok_or_else(|| Error::UnknownParameter(name.to_string()))?;
                let cur = mono.get(idx);
                mono.set(idx, cur + exp);
            }
            out.add_term(mono, coef);
        }
        Ok(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| b.0.exponents().cmp(a.0.exponents())));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            write_signed_term(f, i == 0, c, m, &self.params)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Writes ` + c*m` / ` - c*m` (or the leading form without the spacer).
pub(crate) fn write_signed_term(
    f: &mut impl fmt::Write,
    first: bool,
    c: &Rational,
    m: &Monomial,
    names: &[String],
) -> fmt::Result {
    let neg = c.is_negative();
    match (first, neg) {
        (true, true) => f.write_str("-")?,
        (true, false) => {}
        (false, true) => f.write_str(" - ")?,
        (false, false) => f.write_str(" + ")?,
    }
    let abs = c.abs();
    if m.is_one() {
        return write!(f, "{abs}");
    }
    if !abs.is_one() {
        write!(f, "{abs}*")?;
    }
    write_factors(f, m, names)?;
    Ok(())
}

/// An element of the active coefficient ring.
#[derive(Clone, PartialEq, Eq)]
pub enum Coefficient {
    Rational(Rational),
    Poly(Poly),
}

impl Coefficient {
    pub fn ring(&self) -> CoefficientRing {
        match self {
            Coefficient::Rational(_) => CoefficientRing::Rational,
            Coefficient::Poly(p) => CoefficientRing::Poly(p.params.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Rational(r) => r.is_zero(),
            Coefficient::Poly(p) => p.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// The value of a constant (rational or constant polynomial).
    pub fn constant_value(&self) -> Option<Rational> {
        match self {
            Coefficient::Rational(r) => Some(r.clone()),
            Coefficient::Poly(p) => p.constant_value(),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Coefficient::Rational(r) => Some(r),
            Coefficient::Poly(_) => None,
        }
    }

    /// True when every rational coefficient involved is an integer.
    pub fn is_integral(&self) -> bool {
        match self {
            Coefficient::Rational(r) => r.is_integer(),
            Coefficient::Poly(p) => p.terms.values().all(Rational::is_integer),
        }
    }

    fn mismatch(&self, other: &Coefficient) -> Error {
        Error::RingMismatch(self.ring().to_string(), other.ring().to_string())
    }

    pub fn try_add(&self, other: &Coefficient) -> Result<Coefficient> {
        match (self, other) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => Ok(Coefficient::Rational(a + b)),
            (Coefficient::Poly(a), Coefficient::Poly(b)) => a.try_add(b).map(Coefficient::Poly),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn try_sub(&self, other: &Coefficient) -> Result<Coefficient> {
        match (self, other) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => Ok(Coefficient::Rational(a - b)),
            (Coefficient::Poly(a), Coefficient::Poly(b)) => a.try_sub(b).map(Coefficient::Poly),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn try_mul(&self, other: &Coefficient) -> Result<Coefficient> {
        match (self, other) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => Ok(Coefficient::Rational(a * b)),
            (Coefficient::Poly(a), Coefficient::Poly(b)) => a.try_mul(b).map(Coefficient::Poly),
            _ => Err(self.mismatch(other)),
        }
    }

    /// Returns `c` with `c · divisor = self`, when such `c` exists in the ring.
    pub fn div_exact(&self, divisor: &Coefficient) -> Result<Coefficient> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match (self, divisor) {
            (Coefficient::Rational(a), Coefficient::Rational(b)) => {
                a.checked_div(b).map(Coefficient::Rational)
            }
            (Coefficient::Poly(a), Coefficient::Poly(b)) => a.div_exact(b).map(Coefficient::Poly),
            _ => Err(self.mismatch(divisor)),
        }
    }

    /// The multiplicative inverse, when it exists in the ring.
    pub fn inverse(&self) -> Result<Coefficient> {
        self.ring().one().div_exact(self)
    }

    pub fn scale(&self, r: &Rational) -> Coefficient {
        match self {
            Coefficient::Rational(a) => Coefficient::Rational(a * r),
            Coefficient::Poly(p) => Coefficient::Poly(p.scale(r)),
        }
    }

    pub fn pow(&self, exp: u32) -> Coefficient {
        let mut acc = self.ring().one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// The canonical embedding `Q → Q[params]` (identity on matching rings).
    pub fn embed(&self, ring: &CoefficientRing) -> Result<Coefficient> {
        match (self, ring) {
            (Coefficient::Rational(r), CoefficientRing::Rational) => Ok(Coefficient::Rational(r.clone())),
            (Coefficient::Rational(r), CoefficientRing::Poly(p)) => {
                Ok(Coefficient::Poly(Poly::constant(p.clone(), r.clone())))
            }
            (Coefficient::Poly(p), CoefficientRing::Poly(q)) if same_params(&p.params, q) => {
                Ok(self.clone())
            }
            _ => Err(Error::RingMismatch(self.ring().to_string(), ring.to_string())),
        }
    }

    /// Evaluation homomorphism `Q[params] → Q`; the identity on rationals.
    pub fn eval_params(&self, assignment: &Assignment) -> Result<Rational> {
        match self {
            Coefficient::Rational(r) => Ok(r.clone()),
            Coefficient::Poly(p) => p.eval(assignment),
        }
    }

    /// Partial evaluation into `target`, which must hold every unassigned parameter.
    pub fn substitute(&self, assignment: &Assignment, target: &CoefficientRing) -> Result<Coefficient> {
        match self {
            Coefficient::Rational(r) => Ok(target.from_rational(r.clone())),
            Coefficient::Poly(p) => p.substitute(assignment, target),
        }
    }

    /// `self += a · b`, without intermediate clones of `self`.
    pub(crate) fn add_product(&mut self, a: &Coefficient, b: &Coefficient) {
        match (self, a, b) {
            (Coefficient::Rational(s), Coefficient::Rational(x), Coefficient::Rational(y)) => {
                s.0 += &x.0 * &y.0;
            }
            (s, a, b) => {
                let p = a * b;
                *s = &*s + &p;
            }
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Rational(r) => fmt::Display::fmt(r, f),
            Coefficient::Poly(p) => fmt::Display::fmt(p, f),
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Rational> for Coefficient {
    fn from(r: Rational) -> Self {
        Coefficient::Rational(r)
    }
}

// Operator forms are for code paths where ring agreement is already
// established (series invariants); they panic on a ring mismatch.
macro_rules! coefficient_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Coefficient> for &Coefficient {
            type Output = Coefficient;
            fn $method(self, rhs: &Coefficient) -> Coefficient {
                self.$checked(rhs).expect("coefficient ring mismatch")
            }
        }
    };
}

coefficient_binop!(Add, add, try_add);
coefficient_binop!(Sub, sub, try_sub);
coefficient_binop!(Mul, mul, try_mul);

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        match self {
            Coefficient::Rational(r) => Coefficient::Rational(-r),
            Coefficient::Poly(p) => Coefficient::Poly(p.neg()),
        }
    }
}

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        -&self
    }
}

/// `a + b` in the shared ring of two coefficients.
pub fn coef_add(a: &Coefficient, b: &Coefficient) -> Result<Coefficient> {
    a.try_add(b)
}

pub fn coef_mul(a: &Coefficient, b: &Coefficient) -> Result<Coefficient> {
    a.try_mul(b)
}

pub fn coef_div_exact(a: &Coefficient, b: &Coefficient) -> Result<Coefficient> {
    a.div_exact(b)
}

pub fn eval_params(p: &Poly, assignment: &Assignment) -> Result<Rational> {
    p.eval(assignment)
}

/// Integer binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn ab() -> CoefficientRing {
        CoefficientRing::polynomial(&["a", "b"])
    }

    #[test]
    fn rational_text_form() {
        assert_eq!(q("-11/15600").to_string(), "-11/15600");
        assert_eq!(q("4/2").to_string(), "2");
        assert_eq!(q("+3").to_string(), "3");
        assert_eq!(q("6/4").to_string(), "3/2");
        for bad in ["", "1/", "/2", "a", "1.5", "1/-2", "--1"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad}");
        }
        assert_eq!("1/0".parse::<Rational>(), Err(Error::DivisionByZero));
    }

    #[test]
    fn coef_add_examples() {
        let half = Coefficient::from(q("1/2"));
        let third = Coefficient::from(q("1/3"));
        assert_eq!(coef_add(&half, &third).unwrap(), Coefficient::from(q("5/6")));

        let r = ab();
        let p = r.parse("a^2 - 3*a*b + 1/7").unwrap();
        assert!(coef_add(&p, &-&p).unwrap().is_zero());

        let s = r.parse("1/2*a + 1/2*b").unwrap();
        assert_eq!(coef_add(&s, &s).unwrap(), r.parse("a + b").unwrap());
    }

    #[test]
    fn coef_mul_examples() {
        assert_eq!(
            coef_mul(&q("2/3").into(), &q("3/4").into()).unwrap(),
            Coefficient::from(q("1/2"))
        );
        let r = ab();
        let prod = coef_mul(&r.parse("a+b").unwrap(), &r.parse("a-b").unwrap()).unwrap();
        assert_eq!(prod, r.parse("a^2 - b^2").unwrap());
        let qr = CoefficientRing::polynomial(&["q"]);
        assert!(coef_mul(&qr.parse("q").unwrap(), &qr.zero()).unwrap().is_zero());
    }

    #[test]
    fn coef_div_examples() {
        assert_eq!(
            coef_div_exact(&q("3/2").into(), &q("1/2").into()).unwrap(),
            Coefficient::from(q("3"))
        );
        let r = ab();
        let num = r.parse("a^2 - b^2").unwrap();
        let den = r.parse("a - b").unwrap();
        let quot = coef_div_exact(&num, &den).unwrap();
        assert_eq!(quot, r.parse("a + b").unwrap());
        assert_eq!(coef_mul(&quot, &den).unwrap(), num);
        assert!(matches!(
            coef_div_exact(&r.parse("a").unwrap(), &r.parse("b").unwrap()),
            Err(Error::InexactDivision(_))
        ));
        assert_eq!(coef_div_exact(&num, &r.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let r = ab();
        let a = r.parse("a").unwrap();
        let one = Coefficient::from(Rational::one());
        assert!(matches!(coef_add(&a, &one), Err(Error::RingMismatch(..))));
        let other = CoefficientRing::polynomial(&["q"]).parse("q").unwrap();
        assert!(matches!(coef_mul(&a, &other), Err(Error::RingMismatch(..))));
        let embedded = one.embed(&r).unwrap();
        assert_eq!(coef_add(&a, &embedded).unwrap(), r.parse("a + 1").unwrap());
    }

    #[test]
    fn eval_examples() {
        let qr = CoefficientRing::polynomial(&["q"]);
        let Coefficient::Poly(p) = qr.parse("q").unwrap() else { unreachable!() };
        let mut sigma = Assignment::new();
        sigma.insert("q".into(), Rational::zero());
        assert_eq!(eval_params(&p, &sigma).unwrap(), Rational::zero());

        let r = ab();
        let Coefficient::Poly(p) = r.parse("1/4*a^2 + 1/2*a*b + 1/2*a + 1/4*b^2 + 1/2*b").unwrap() else {
            unreachable!()
        };
        let mut sigma = Assignment::new();
        sigma.insert("a".into(), q("1"));
        sigma.insert("b".into(), q("1"));
        assert_eq!(eval_params(&p, &sigma).unwrap(), q("2"));

        let Coefficient::Poly(p) = r.parse("a + b").unwrap() else { unreachable!() };
        sigma.insert("b".into(), q("2"));
        assert_eq!(eval_params(&p, &sigma).unwrap(), q("3"));

        sigma.remove("b");
        assert_eq!(eval_params(&p, &sigma), Err(Error::UnassignedParameter("b".into())));
    }

    #[test]
    fn partial_substitution() {
        let r = ab();
        let p = r.parse("a*b + b^2 + a").unwrap();
        let mut sigma = Assignment::new();
        sigma.insert("a".into(), q("2"));
        let target = CoefficientRing::polynomial(&["b"]);
        let out = p.substitute(&sigma, &target).unwrap();
        assert_eq!(out, target.parse("b^2 + 2*b + 2").unwrap());
    }

    #[test]
    fn poly_printing() {
        let r = ab();
        assert_eq!(r.parse("b - a^2 + 1/2*a*b - 3").unwrap().to_string(), "-a^2 + 1/2*a*b + b - 3");
        assert_eq!(r.zero().to_string(), "0");
    }

    #[test]
    fn combinatorics() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(factorial(5), BigInt::from(120));
        assert!(is_prime(2) && is_prime(3) && !is_prime(4) && !is_prime(1));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn rational() -> impl Strategy<Value = Rational> {
            (-20i64..20, 1i64..7).prop_map(|(n, d)| Rational::new(n, d).unwrap())
        }

        fn poly() -> impl Strategy<Value = Coefficient> {
            proptest::collection::vec(((0u32..3, 0u32..3), rational()), 0..5).prop_map(|terms| {
                let params: Arc<[String]> = vec!["a".to_string(), "b".to_string()].into();
                Coefficient::Poly(
                    Poly::from_terms(params, terms.into_iter().map(|((i, j), c)| (vec![i, j], c))).unwrap(),
                )
            })
        }

        proptest! {
            #[test]
            fn poly_ring_axioms(x in poly(), y in poly(), z in poly()) {
                prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
                prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
                prop_assert_eq!(&x * &y, &y * &x);
                prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            }

            #[test]
            fn rational_ring_axioms(x in rational(), y in rational(), z in rational()) {
                prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
                prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            }

            #[test]
            fn exact_division_recovers_factor(x in poly(), y in poly()) {
                prop_assume!(!y.is_zero());
                let prod = &x * &y;
                prop_assert_eq!(prod.div_exact(&y).unwrap(), x);
            }

            #[test]
            fn eval_is_a_homomorphism(x in poly(), y in poly(), a in rational(), b in rational()) {
                let mut s = Assignment::new();
                s.insert("a".into(), a);
                s.insert("b".into(), b);
                let lhs = (&x * &y).eval_params(&s).unwrap();
                prop_assert_eq!(lhs, x.eval_params(&s).unwrap() * y.eval_params(&s).unwrap());
                let lhs = (&x + &y).eval_params(&s).unwrap();
                prop_assert_eq!(lhs, x.eval_params(&s).unwrap() + y.eval_params(&s).unwrap());
            }
        }
    }
}
