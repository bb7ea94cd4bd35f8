//! Truncated multivariate power series.
//!
//! A [`Series`] stores the terms of total degree `≤ D` of a power series in
//! `n` variables; everything of higher total degree is discarded by every
//! operation. A [`SeriesTuple`] is a map between formal spaces: `m` series in
//! the same `n` variables.
//!
//! Composition and inversion are exact modulo degree `> D`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::monomial::{write_factors, Monomial};
use crate::scalars::{write_signed_term, Assignment, Coefficient, CoefficientRing, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    num_vars: usize,
    trunc_degree: u32,
    ring: CoefficientRing,
    terms: BTreeMap<Monomial, Coefficient>,
}

impl Series {
    pub fn zero(num_vars: usize, trunc_degree: u32, ring: CoefficientRing) -> Self {
        Series { num_vars, trunc_degree, ring, terms: BTreeMap::new() }
    }

    pub fn constant(num_vars: usize, trunc_degree: u32, c: Coefficient) -> Self {
        let mut s = Self::zero(num_vars, trunc_degree, c.ring());
        if !c.is_zero() {
            s.terms.insert(Monomial::one(num_vars), c);
        }
        s
    }

    /// The coordinate function `x_index`.
    pub fn var(num_vars: usize, index: usize, trunc_degree: u32, ring: CoefficientRing) -> Self {
        let mut s = Self::zero(num_vars, trunc_degree, ring);
        if trunc_degree >= 1 {
            let one = s.ring.one();
            s.terms.insert(Monomial::var(num_vars, index), one);
        }
        s
    }

    /// Builds a series from `(exponents, coefficient)` pairs.
    ///
    /// Repeated exponent vectors are summed; terms above the truncation
    /// degree are dropped.
    pub fn from_terms(
        num_vars: usize,
        trunc_degree: u32,
        ring: CoefficientRing,
        terms: impl IntoIterator<Item = (Vec<u32>, Coefficient)>,
    ) -> Result<Self> {
        let mut s = Self::zero(num_vars, trunc_degree, ring);
        for (exps, c) in terms {
            if exps.len() != num_vars {
                return Err(Error::ShapeMismatch(format!(
                    "exponent vector {exps:?} in a series of {num_vars} variables"
                )));
            }
            if c.ring() != s.ring {
                return Err(Error::RingMismatch(c.ring().to_string(), s.ring.to_string()));
            }
            let m = Monomial::from_exponents(&exps);
            if m.degree() <= trunc_degree {
                s.add_term(m, c);
            }
        }
        Ok(s)
    }

    /// One-variable series `Σ coeffs[k] x^k`.
    pub fn univariate(trunc_degree: u32, ring: CoefficientRing, coeffs: Vec<Coefficient>) -> Result<Self> {
        Self::from_terms(
            1,
            trunc_degree,
            ring,
            coeffs.into_iter().enumerate().map(|(k, c)| (vec![k as u32], c)),
        )
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn trunc_degree(&self) -> u32 {
        self.trunc_degree
    }

    pub fn ring(&self) -> &CoefficientRing {
        &self.ring
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Coefficient {
        self.terms
            .get(&Monomial::from_exponents(exponents))
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    pub fn constant_term(&self) -> Coefficient {
        self.coefficient(&vec![0; self.num_vars])
    }

    /// Largest total degree of a stored term.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Minimal total degree of a nonzero term; `None` stands for ∞ (the zero series).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    /// The homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Series {
        let mut out = Self::zero(self.num_vars, self.trunc_degree, self.ring.clone());
        out.terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() == d)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        out
    }

    fn add_term(&mut self, m: Monomial, c: Coefficient) {
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

    fn check_shape(&self, other: &Series) -> Result<()> {
        if self.num_vars != other.num_vars || self.trunc_degree != other.trunc_degree {
            return Err(Error::ShapeMismatch(format!(
                "({} vars, D={}) vs ({} vars, D={})",
                self.num_vars, self.trunc_degree, other.num_vars, other.trunc_degree
            )));
        }
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring.to_string(), other.ring.to_string()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Series {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -&*c;
        }
        out
    }

    /// Multiplies every coefficient by `c`, which must lie in the series' ring.
    pub fn scale(&self, c: &Coefficient) -> Result<Series> {
        if c.ring() != self.ring {
            return Err(Error::RingMismatch(c.ring().to_string(), self.ring.to_string()));
        }
        let mut out = Self::zero(self.num_vars, self.trunc_degree, self.ring.clone());
        if c.is_zero() {
            return Ok(out);
        }
        out.terms = self
            .terms
            .iter()
            .map(|(m, v)| (m.clone(), v * c))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Ok(out)
    }

    pub fn scale_rational(&self, r: &Rational) -> Series {
        let mut out = Self::zero(self.num_vars, self.trunc_degree, self.ring.clone());
        if r.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(m, v)| (m.clone(), v.scale(r))).collect();
        out
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check_shape(other)?;
        Ok(self.mul_bounded(other, self.trunc_degree))
    }

    /// Product keeping only terms of total degree `≤ bound`.
    fn mul_bounded(&self, other: &Series, bound: u32) -> Series {
        let mut out = Self::zero(self.num_vars, self.trunc_degree, self.ring.clone());
        if self.is_zero() || other.is_zero() {
            return out;
        }
        if other.terms.len() == 1 {
            let (m2, c2) = other.terms.iter().next().unwrap();
            if m2.is_one() {
                out.terms = self
                    .terms
                    .iter()
                    .filter(|(m, _)| m.degree() <= bound)
                    .map(|(m, c)| (m.clone(), c * c2))
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                return out;
            }
        }
        let lhs = degree_buckets(self, bound);
        let rhs = degree_buckets(other, bound);
        let mut acc: HashMap<Monomial, Coefficient> = HashMap::new();
        for (d1, b1) in lhs.iter().enumerate() {
            if b1.is_empty() {
                continue;
            }
            for b2 in rhs.iter().take(bound as usize - d1 + 1) {
                for (m1, c1) in b1 {
                    for (m2, c2) in b2 {
                        let m = m1.mul(m2);
                        match acc.get_mut(&m) {
                            Some(v) => v.add_product(c1, c2),
                            None => {
                                acc.insert(m, *c1 * *c2);
                            }
                        }
                    }
                }
            }
        }
        out.terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        out
    }

    pub fn pow(&self, exp: u32) -> Series {
        let mut acc = Self::constant(self.num_vars, self.trunc_degree, self.ring.one());
        for _ in 0..exp {
            acc = acc.mul_bounded(self, self.trunc_degree);
        }
        acc
    }

    /// Drops all terms of total degree `> degree` and lowers the truncation degree.
    pub fn truncate(&self, degree: u32) -> Result<Series> {
        if degree > self.trunc_degree {
            return Err(Error::PrecisionExceeded { requested: degree, available: self.trunc_degree });
        }
        Ok(self.with_trunc_degree(degree))
    }

    /// Relabels the truncation degree, dropping terms above it. Raising the
    /// degree is only sound for polynomials known to be exact.
    pub(crate) fn with_trunc_degree(&self, degree: u32) -> Series {
        Series {
            num_vars: self.num_vars,
            trunc_degree: degree,
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Reinterprets the series in `num_vars` variables, sending variable `i`
    /// to variable `mapping[i]`.
    pub fn remap(&self, num_vars: usize, mapping: &[usize]) -> Result<Series> {
        if mapping.len() != self.num_vars || mapping.iter().any(|&j| j >= num_vars) {
            return Err(Error::ShapeMismatch(format!(
                "variable mapping {mapping:?} from {} into {num_vars} variables",
                self.num_vars
            )));
        }
        let mut out = Self::zero(num_vars, self.trunc_degree, self.ring.clone());
        for (m, c) in &self.terms {
            out.add_term(m.remap(num_vars, mapping), c.clone());
        }
        Ok(out)
    }

    /// Applies `f` to every coefficient, landing in `ring`.
    pub fn map_coefficients(
        &self,
        ring: &CoefficientRing,
        f: impl Fn(&Coefficient) -> Result<Coefficient>,
    ) -> Result<Series> {
        let mut out = Self::zero(self.num_vars, self.trunc_degree, ring.clone());
        for (m, c) in &self.terms {
            let v = f(c)?;
            if v.ring() != *ring {
                return Err(Error::RingMismatch(v.ring().to_string(), ring.to_string()));
            }
            out.add_term(m.clone(), v);
        }
        Ok(out)
    }

    /// Coefficientwise evaluation of parameters (the induced map `r_*`).
    pub fn eval_params(&self, assignment: &Assignment) -> Result<Series> {
        self.map_coefficients(&CoefficientRing::Rational, |c| {
            c.eval_params(assignment).map(Coefficient::Rational)
        })
    }

    /// Moves the series into a larger ring through the canonical embedding.
    pub fn embed(&self, ring: &CoefficientRing) -> Result<Series> {
        self.map_coefficients(ring, |c| c.embed(ring))
    }

    /// Evaluates the (polynomial) series at concrete coefficient values.
    ///
    /// When values and series live in different rings, the rational side is
    /// embedded into the polynomial side.
    pub fn evaluate(&self, values: &[Coefficient]) -> Result<Coefficient> {
        if values.len() != self.num_vars {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a series in {} variables",
                values.len(),
                self.num_vars
            )));
        }
        let mut ring = self.ring.clone();
        for v in values {
            let r = v.ring();
            if r != ring {
                match (&ring, &r) {
                    (CoefficientRing::Rational, CoefficientRing::Poly(_)) => ring = r,
                    (CoefficientRing::Poly(_), CoefficientRing::Rational) => {}
                    _ => return Err(Error::RingMismatch(ring.to_string(), r.to_string())),
                }
            }
        }
        let values = values.iter().map(|v| v.embed(&ring)).collect::<Result<Vec<_>>>()?;
        let mut powers: Vec<Vec<Coefficient>> = values.iter().map(|v| vec![ring.one(), v.clone()]).collect();
        let mut acc = ring.zero();
        for (m, c) in &self.terms {
            let mut t = c.embed(&ring)?;
            for (i, &e) in m.exponents().iter().enumerate() {
                let e = usize::from(e);
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e {
                    let next = powers[i].last().unwrap() * &values[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e];
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Substitutes the components of `g` for the variables: `f(g_1, …, g_m)`.
    ///
    /// Every component of `g` must have zero constant term, so each output
    /// coefficient depends on finitely many terms.
    pub fn compose(&self, g: &SeriesTuple) -> Result<Series> {
        if g.len() != self.num_vars {
            return Err(Error::ShapeMismatch(format!(
                "substituting {} series into a series of {} variables",
                g.len(),
                self.num_vars
            )));
        }
        if g.trunc_degree() != self.trunc_degree {
            return Err(Error::ShapeMismatch(format!(
                "truncation degrees {} and {} differ",
                self.trunc_degree,
                g.trunc_degree()
            )));
        }
        if g.ring() != &self.ring {
            return Err(Error::RingMismatch(self.ring.to_string(), g.ring().to_string()));
        }
        if g.components.iter().any(|c| !c.constant_term().is_zero()) {
            return Err(Error::NonzeroConstantTerm);
        }
        Ok(self.compose_unchecked(g))
    }

    fn compose_unchecked(&self, g: &SeriesTuple) -> Series {
        let d = self.trunc_degree;
        let m = self.num_vars;
        let mut max_exp = vec![0u32; m];
        for mono in self.terms.keys() {
            for (j, e) in max_exp.iter_mut().enumerate() {
                *e = (*e).max(mono.get(j));
            }
        }
        let orders: Vec<Option<u32>> = g.components.iter().map(Series::order).collect();
        let powers: Vec<Vec<Series>> = g
            .components
            .iter()
            .zip(&max_exp)
            .map(|(gj, &k)| {
                let mut pows = vec![Series::constant(gj.num_vars, d, self.ring.one())];
                for i in 1..=k {
                    let next = pows[i as usize - 1].mul_bounded(gj, d);
                    pows.push(next);
                }
                pows
            })
            .collect();
        let mut sorted: Vec<(&Monomial, &Coefficient)> = self.terms.iter().collect();
        sorted.sort_by(|a, b| a.0.exponents().cmp(b.0.exponents()));
        let ctx = ComposeCtx { powers: &powers, orders: &orders, out_vars: g.num_vars(), d, ring: &self.ring };
        ctx.eval(&sorted, 0, d)
    }

    /// Formal partial derivative with respect to variable `index`.
    pub fn derivative(&self, index: usize) -> Series {
        let mut out = Self::zero(self.num_vars, self.trunc_degree, self.ring.clone());
        for (m, c) in &self.terms {
            let e = m.get(index);
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.set(index, e - 1);
            out.add_term(dm, c.scale(&Rational::from_integer(e)));
        }
        out
    }

    /// Display helper with explicit variable names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> SeriesDisplay<'a> {
        SeriesDisplay { series: self, names }
    }
}

/// Terms bucketed by total degree, up to `bound`.
fn degree_buckets(s: &Series, bound: u32) -> Vec<Vec<(&Monomial, &Coefficient)>> {
    let mut buckets = vec![Vec::new(); bound as usize + 1];
    for (m, c) in &s.terms {
        let d = m.degree();
        if d > bound {
            break;
        }
        buckets[d as usize].push((m, c));
    }
    buckets
}

struct ComposeCtx<'a> {
    powers: &'a [Vec<Series>],
    orders: &'a [Option<u32>],
    out_vars: usize,
    d: u32,
    ring: &'a CoefficientRing,
}

impl ComposeCtx<'_> {
    /// Horner-style evaluation over the exponent trie: the terms share the
    /// exponents of variables `< depth` and are sorted lexicographically.
    fn eval(&self, terms: &[(&Monomial, &Coefficient)], depth: usize, bound: u32) -> Series {
        if depth == self.powers.len() {
            let mut c = self.ring.zero();
            for (_, v) in terms {
                c = &c + v;
            }
            return Series::constant(self.out_vars, self.d, c);
        }
        let mut out = Series::zero(self.out_vars, self.d, self.ring.clone());
        let mut start = 0;
        while start < terms.len() {
            let k = terms[start].0.get(depth);
            let mut end = start + 1;
            while end < terms.len() && terms[end].0.get(depth) == k {
                end += 1;
            }
            let group = &terms[start..end];
            start = end;
            let shift = if k == 0 {
                0
            } else {
                match self.orders[depth] {
                    Some(o) => o * k,
                    None => continue,
                }
            };
            if shift > bound {
                continue;
            }
            let inner = self.eval(group, depth + 1, bound - shift);
            let contribution = if k == 0 {
                inner
            } else {
                self.powers[depth][k as usize].mul_bounded(&inner, bound)
            };
            for (m, c) in contribution.terms {
                out.add_term(m, c);
            }
        }
        out
    }
}

/// Default variable names: `x`, `y`, `z` for up to three variables, else `x1, …`.
pub fn default_names(num_vars: usize) -> Vec<String> {
    match num_vars {
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        n => (1..=n).map(|i| format!("x{i}")).collect(),
    }
}

/// Names for `blocks` alphabets of `dim` variables each: `x, y` when `dim = 1`,
/// else `x1…xn, y1…yn, …`.
pub fn block_names(dim: usize, blocks: usize) -> Vec<String> {
    const LETTERS: [&str; 4] = ["x", "y", "z", "w"];
    (0..blocks)
        .flat_map(|b| {
            (1..=dim).map(move |i| {
                if dim == 1 {
                    LETTERS[b % 4].to_string()
                } else {
                    format!("{}{i}", LETTERS[b % 4])
                }
            })
        })
        .collect()
}

pub struct SeriesDisplay<'a> {
    series: &'a Series,
    names: &'a [String],
}

impl fmt::Display for SeriesDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.series.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.series.terms.iter().enumerate() {
            match c {
                Coefficient::Rational(r) => write_signed_term(f, i == 0, r, m, self.names)?,
                Coefficient::Poly(p) => {
                    let single = p.num_terms() == 1;
                    if let (true, Some(r)) = (single, p.constant_value()) {
                        write_signed_term(f, i == 0, &r, m, self.names)?;
                        continue;
                    }
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "({p})")?;
                    if !m.is_one() {
                        f.write_str("*")?;
                        write_factors(f, m, self.names)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.num_vars);
        fmt::Display::fmt(&self.display_with(&names), f)
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[{} vars, D={}, {}]({self})", self.num_vars, self.trunc_degree, self.ring)
    }
}

/// An ordered tuple of series in the same variables, truncation degree and ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeriesTuple {
    components: Vec<Series>,
}

impl SeriesTuple {
    pub fn new(components: Vec<Series>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::ShapeMismatch("a series tuple needs at least one component".into()))?;
        for c in &components[1..] {
            first.check_shape(c)?;
        }
        Ok(SeriesTuple { components })
    }

    /// `(x_1, …, x_n)`.
    pub fn identity(n: usize, trunc_degree: u32, ring: CoefficientRing) -> Self {
        SeriesTuple {
            components: (0..n).map(|i| Series::var(n, i, trunc_degree, ring.clone())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn num_vars(&self) -> usize {
        self.components[0].num_vars
    }

    pub fn trunc_degree(&self) -> u32 {
        self.components[0].trunc_degree
    }

    pub fn ring(&self) -> &CoefficientRing {
        &self.components[0].ring
    }

    pub fn components(&self) -> &[Series] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Series {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<Series> {
        self.components
    }

    pub fn map(&self, f: impl Fn(&Series) -> Result<Series>) -> Result<SeriesTuple> {
        SeriesTuple::new(self.components.iter().map(f).collect::<Result<_>>()?)
    }

    pub fn add(&self, other: &SeriesTuple) -> Result<SeriesTuple> {
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch(format!("{} vs {} components", self.len(), other.len())));
        }
        SeriesTuple::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect::<Result<_>>()?,
        )
    }

    pub fn truncate(&self, degree: u32) -> Result<SeriesTuple> {
        self.map(|c| c.truncate(degree))
    }

    pub(crate) fn with_trunc_degree(&self, degree: u32) -> SeriesTuple {
        SeriesTuple { components: self.components.iter().map(|c| c.with_trunc_degree(degree)).collect() }
    }

    pub fn remap(&self, num_vars: usize, mapping: &[usize]) -> Result<SeriesTuple> {
        self.map(|c| c.remap(num_vars, mapping))
    }

    /// Concatenates the components of two tuples over the same variables.
    pub fn concat(&self, other: &SeriesTuple) -> Result<SeriesTuple> {
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        SeriesTuple::new(components)
    }

    /// Componentwise composition `self ∘ g`.
    pub fn compose(&self, g: &SeriesTuple) -> Result<SeriesTuple> {
        self.map(|c| c.compose(g))
    }

    pub fn eval_params(&self, assignment: &Assignment) -> Result<SeriesTuple> {
        self.map(|c| c.eval_params(assignment))
    }

    /// The `m × n` matrix of linear coefficients.
    pub fn linear_part(&self) -> Vec<Vec<Coefficient>> {
        let n = self.num_vars();
        self.components
            .iter()
            .map(|c| {
                (0..n)
                    .map(|k| {
                        c.terms
                            .get(&Monomial::var(n, k))
                            .cloned()
                            .unwrap_or_else(|| c.ring.zero())
                    })
                    .collect()
            })
            .collect()
    }

    /// Compositional inverse `H` with `G ∘ H = H ∘ G = id` up to degree `D`.
    ///
    /// The degree-`d` part of `H` is obtained from the lower-degree parts by
    /// solving a linear system with the linear part `J` of `G`:
    /// `H = J⁻¹ (x − N(H))`, where `N` is the nonlinear part of `G`.
    pub fn invert(&self) -> Result<SeriesTuple> {
        let n = self.len();
        if n != self.num_vars() {
            return Err(Error::ShapeMismatch(format!(
                "cannot invert {n} series in {} variables",
                self.num_vars()
            )));
        }
        if self.components.iter().any(|c| !c.constant_term().is_zero()) {
            return Err(Error::NonzeroConstantTerm);
        }
        let ring = self.ring().clone();
        let d = self.trunc_degree();
        let jinv = invert_matrix(&self.linear_part(), &ring)?;
        let identity_j = is_identity(&jinv);

        let linear = SeriesTuple::identity(n, d, ring.clone());
        let nonlinear = SeriesTuple::new(
            self.components
                .iter()
                .map(|c| {
                    let mut r = c.clone();
                    r.terms.retain(|m, _| m.degree() >= 2);
                    r
                })
                .collect(),
        )?;
        let apply_jinv = |v: &SeriesTuple| -> Result<SeriesTuple> {
            if identity_j {
                return Ok(v.clone());
            }
            let mut out = Vec::with_capacity(n);
            for row in &jinv {
                let mut acc = Series::zero(v.num_vars(), v.trunc_degree(), ring.clone());
                for (k, c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        acc = acc.add(&v.components[k].scale(c)?)?;
                    }
                }
                out.push(acc);
            }
            SeriesTuple::new(out)
        };

        let mut h = apply_jinv(&linear.with_trunc_degree(d.min(1)))?;
        for k in 2..=d {
            let hk = h.with_trunc_degree(k);
            let nk = nonlinear.with_trunc_degree(k);
            let rhs = SeriesTuple::new(
                linear
                    .with_trunc_degree(k)
                    .components
                    .iter()
                    .zip(&nk.components)
                    .map(|(x, nc)| x.sub(&nc.compose_unchecked(&hk)))
                    .collect::<Result<_>>()?,
            )?;
            h = apply_jinv(&rhs)?;
        }
        Ok(h.with_trunc_degree(d))
    }

    /// The coefficientwise difference `self − other` as `(component, exponents, lhs, rhs)`.
    pub fn differences(&self, other: &SeriesTuple) -> Vec<(usize, Vec<u32>, Coefficient, Coefficient)> {
        let mut out = Vec::new();
        for (i, (a, b)) in self.components.iter().zip(&other.components).enumerate() {
            let mut keys: Vec<&Monomial> = a.terms.keys().chain(b.terms.keys()).collect();
            keys.sort();
            keys.dedup();
            for m in keys {
                let lhs = a.terms.get(m).cloned().unwrap_or_else(|| a.ring.zero());
                let rhs = b.terms.get(m).cloned().unwrap_or_else(|| b.ring.zero());
                if lhs != rhs {
                    out.push((i, m.to_vec(), lhs, rhs));
                }
            }
        }
        out.sort_by(|x, y| Monomial::from_exponents(&x.1).cmp(&Monomial::from_exponents(&y.1)).then(x.0.cmp(&y.0)));
        out
    }
}

fn is_identity(m: &[Vec<Coefficient>]) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, c)| if i == j { c.is_one() } else { c.is_zero() })
    })
}

/// Gauss–Jordan inversion over the coefficient ring; every pivot must be a unit.
fn invert_matrix(m: &[Vec<Coefficient>], ring: &CoefficientRing) -> Result<Vec<Vec<Coefficient>>> {
    let n = m.len();
    let mut a: Vec<Vec<Coefficient>> = m.to_vec();
    let mut inv: Vec<Vec<Coefficient>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { ring.one() } else { ring.zero() }).collect())
        .collect();
    for col in 0..n {
        let (pivot_row, pivot_inv) = (col..n)
            .find_map(|r| a[r][col].inverse().ok().map(|p| (r, p)))
            .ok_or_else(|| {
                Error::SingularLinearPart(format!("no invertible pivot in column {}", col + 1))
            })?;
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        for j in 0..n {
            a[col][j] = &a[col][j] * &pivot_inv;
            inv[col][j] = &inv[col][j] * &pivot_inv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..n {
                a[r][j] = &a[r][j] - &(&factor * &a[col][j]);
                inv[r][j] = &inv[r][j] - &(&factor * &inv[col][j]);
            }
        }
    }
    Ok(inv)
}

pub fn series_add(f: &Series, g: &Series) -> Result<Series> {
    f.add(g)
}

pub fn series_mul(f: &Series, g: &Series) -> Result<Series> {
    f.mul(g)
}

pub fn compose(f: &Series, g: &SeriesTuple) -> Result<Series> {
    f.compose(g)
}

pub fn invert_tuple(g: &SeriesTuple) -> Result<SeriesTuple> {
    g.invert()
}

pub fn order(f: &Series) -> Option<u32> {
    f.order()
}

pub fn truncate(f: &Series, degree: u32) -> Result<Series> {
    f.truncate(degree)
}
