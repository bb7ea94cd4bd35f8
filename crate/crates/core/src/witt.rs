//! Generalized Witt vectors.
//!
//! A triangular ghost family `g_1(x_1), g_2(x_1,x_2), …` serves as the
//! logarithm of an `n`-dimensional formal ring. Its addition and
//! multiplication laws `Φ_i`, `Ψ_i` are solved one component at a time from
//! `g_i(Φ) = g_i(x) + g_i(y)` and `g_i(Ψ) = g_i(x)·g_i(y)`. When every
//! diagonal part of the family is linear (`c·x_i` with `c` a unit) the laws
//! are polynomials and are computed exactly.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fring::FormalRing;
use crate::monomial::Monomial;
use crate::mvps::{Series, SeriesTuple};
use crate::scalars::{is_prime, Coefficient, CoefficientRing, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GhostKind {
    Separated,
    PartiallySeparated,
    PTypical(u64),
    Universal,
    Custom,
}

impl fmt::Display for GhostKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GhostKind::Separated => f.write_str("separated"),
            GhostKind::PartiallySeparated => f.write_str("partially_separated"),
            GhostKind::PTypical(p) => write!(f, "p_typical({p})"),
            GhostKind::Universal => f.write_str("universal"),
            GhostKind::Custom => f.write_str("custom"),
        }
    }
}

/// Ghost polynomials `g_1, …, g_n`, each stored as a series in `n` variables
/// of which `g_i` uses only the first `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhostFamily {
    ghosts: Vec<Series>,
    kind: GhostKind,
}

/// `g_k = τ(x_1..x_{k−1}) + ω(x_k)`; `omega` is a one-variable series.
struct Split {
    tau: Series,
    omega: Series,
}

impl GhostFamily {
    /// Validates triangularity and an invertible linear diagonal coefficient.
    pub fn new(ghosts: Vec<Series>, kind: GhostKind) -> Result<Self> {
        let n = ghosts.len();
        if n == 0 {
            return Err(Error::InvalidGhosts("empty family".into()));
        }
        let d = ghosts.iter().map(Series::trunc_degree).max().unwrap_or(1);
        let ring = ghosts[0].ring().clone();
        let mut out = Vec::with_capacity(n);
        for (k, g) in ghosts.into_iter().enumerate() {
            if g.num_vars() != n {
                return Err(Error::InvalidGhosts(format!(
                    "ghost {} has {} variables, expected {n}",
                    k + 1,
                    g.num_vars()
                )));
            }
            if g.ring() != &ring {
                return Err(Error::RingMismatch(g.ring().to_string(), ring.to_string()));
            }
            if !g.constant_term().is_zero() {
                return Err(Error::InvalidGhosts(format!("ghost {} has a constant term", k + 1)));
            }
            if let Some((m, _)) = g.terms().find(|(m, _)| m.exponents()[k + 1..].iter().any(|&e| e > 0)) {
                return Err(Error::InvalidGhosts(format!(
                    "ghost {} involves a later variable (exponents {:?})",
                    k + 1,
                    m.to_vec()
                )));
            }
            let diag = g.coefficient(&Monomial::var(n, k).to_vec());
            if diag.inverse().is_err() {
                return Err(Error::InvalidGhosts(format!(
                    "coefficient of x_{} in ghost {} is {diag}, not a unit",
                    k + 1,
                    k + 1
                )));
            }
            out.push(g.with_trunc_degree(d));
        }
        Ok(GhostFamily { ghosts: out, kind })
    }

    pub fn n(&self) -> usize {
        self.ghosts.len()
    }

    pub fn kind(&self) -> &GhostKind {
        &self.kind
    }

    pub fn ghosts(&self) -> &[Series] {
        &self.ghosts
    }

    pub fn ring(&self) -> &CoefficientRing {
        self.ghosts[0].ring()
    }

    /// The ghosts as a logarithm tuple at precision `degree`.
    pub fn as_log(&self, degree: u32) -> SeriesTuple {
        SeriesTuple::new(self.ghosts.iter().map(|g| g.with_trunc_degree(degree)).collect()).expect("uniform shapes")
    }

    /// Largest total degree of a ghost term.
    pub fn max_degree(&self) -> u32 {
        self.ghosts.iter().filter_map(Series::max_degree).max().unwrap_or(1)
    }

    fn split(&self, k: usize) -> Option<Split> {
        let g = &self.ghosts[k];
        let n = self.n();
        let mut tau = Vec::new();
        let mut omega = Vec::new();
        for (m, c) in g.terms() {
            let e = m.get(k);
            if e == 0 {
                tau.push((m.to_vec(), c.clone()));
            } else if m.degree() == e {
                omega.push((vec![e], c.clone()));
            } else {
                return None;
            }
        }
        let d = g.trunc_degree();
        Some(Split {
            tau: Series::from_terms(n, d, g.ring().clone(), tau).expect("valid terms"),
            omega: Series::from_terms(1, d, g.ring().clone(), omega).expect("valid terms"),
        })
    }

    fn splits(&self) -> Option<Vec<Split>> {
        (0..self.n()).map(|k| self.split(k)).collect()
    }

    /// True when every ghost is a sum of one-variable pieces `χ_i(x_i)`.
    pub fn is_separated(&self) -> bool {
        self.ghosts
            .iter()
            .all(|g| g.terms().all(|(m, _)| m.exponents().iter().filter(|&&e| e > 0).count() <= 1))
    }

    /// True when each `g_k` splits as `τ(x_1..x_{k−1}) + ω(x_k)`.
    pub fn is_partially_separated(&self) -> bool {
        self.splits().is_some()
    }

    /// True when every diagonal part `ω_k` is `c·x_k`, so the laws are polynomials.
    pub fn has_linear_diagonal(&self) -> bool {
        self.splits().is_some_and(|s| s.iter().all(|sp| sp.omega.num_terms() == 1))
    }

    /// `χ_i^{(k)}`: the part of ghost `k` in variable `i` alone, as a one-variable series.
    fn piece(&self, k: usize, i: usize) -> Series {
        let g = &self.ghosts[k];
        let terms = g
            .terms()
            .filter(|(m, _)| m.get(i) > 0 && m.degree() == m.get(i))
            .map(|(m, c)| (vec![m.get(i)], c.clone()));
        Series::from_terms(1, g.trunc_degree(), g.ring().clone(), terms).expect("valid terms")
    }
}

fn monomial_series(n: usize, d: u32, terms: Vec<(Vec<u32>, Rational)>) -> Series {
    Series::from_terms(n, d, CoefficientRing::Rational, terms.into_iter().map(|(e, c)| (e, Coefficient::Rational(c))))
        .expect("valid terms")
}

/// Classical Witt polynomials `g_k = Σ_{i≤k} p^{i−1} x_i^{p^{k−i}}`.
pub fn ghosts_p_typical(p: u64, n: usize) -> Result<GhostFamily> {
    if !is_prime(p) {
        return Err(Error::CompositePrime(p));
    }
    if n == 0 {
        return Err(Error::InvalidGhosts("length must be at least 1".into()));
    }
    let d = p.checked_pow(n as u32 - 1).filter(|&d| d <= u64::from(u16::MAX)).ok_or_else(|| {
        Error::InvalidGhosts(format!("degree p^(n-1) too large for p={p}, n={n}"))
    })? as u32;
    let ghosts = (1..=n)
        .map(|k| {
            let terms = (1..=k)
                .map(|i| {
                    let mut e = vec![0; n];
                    e[i - 1] = p.pow((k - i) as u32) as u32;
                    (e, Rational::from_integer(p.pow(i as u32 - 1)))
                })
                .collect();
            monomial_series(n, d, terms)
        })
        .collect();
    GhostFamily::new(ghosts, GhostKind::PTypical(p))
}

/// Universal Witt polynomials `g_k = Σ_{d | k} d·x_d^{k/d}`.
pub fn ghosts_universal(n: usize) -> Result<GhostFamily> {
    if n == 0 {
        return Err(Error::InvalidGhosts("length must be at least 1".into()));
    }
    let ghosts = (1..=n)
        .map(|k| {
            let terms = (1..=k)
                .filter(|d| k % d == 0)
                .map(|d| {
                    let mut e = vec![0; n];
                    e[d - 1] = (k / d) as u32;
                    (e, Rational::from_integer(d as i64))
                })
                .collect();
            monomial_series(n, n as u32, terms)
        })
        .collect();
    GhostFamily::new(ghosts, GhostKind::Universal)
}

/// `g_k = Σ_{i≤k} χ_i^{(k)}(x_i)` from one-variable pieces; `chi[k−1][i−1] = χ_i^{(k)}`.
pub fn ghosts_separated(chi: &[Vec<Series>]) -> Result<GhostFamily> {
    let n = chi.len();
    let mut ghosts = Vec::with_capacity(n);
    for (k, row) in chi.iter().enumerate() {
        if row.len() != k + 1 {
            return Err(Error::InvalidGhosts(format!(
                "ghost {} needs {} pieces, got {}",
                k + 1,
                k + 1,
                row.len()
            )));
        }
        let mut g: Option<Series> = None;
        for (i, piece) in row.iter().enumerate() {
            if piece.num_vars() != 1 {
                return Err(Error::InvalidGhosts("pieces must be one-variable series".into()));
            }
            let placed = piece.remap(n, &[i])?;
            g = Some(match g {
                None => placed,
                Some(acc) => acc.add(&placed)?,
            });
        }
        ghosts.push(g.expect("nonempty row"));
    }
    GhostFamily::new(ghosts, GhostKind::Separated)
}

/// `g_1 = ω_1(x_1)`, `g_k = τ_{k−1}(x_1..x_{k−1}) + ω_k(x_k)`.
///
/// `tau[k−1]` is a series in `k` variables; `omega[k−1]` is a one-variable series.
pub fn ghosts_partially_separated(tau: &[Series], omega: &[Series]) -> Result<GhostFamily> {
    let n = omega.len();
    if tau.len() + 1 != n {
        return Err(Error::InvalidGhosts(format!("{} tau entries for {n} omegas", tau.len())));
    }
    let mut ghosts = Vec::with_capacity(n);
    for (k, w) in omega.iter().enumerate() {
        if w.num_vars() != 1 {
            return Err(Error::InvalidGhosts("omega entries must be one-variable series".into()));
        }
        let mut g = w.remap(n, &[k])?;
        if k > 0 {
            let t = &tau[k - 1];
            if t.num_vars() != k {
                return Err(Error::InvalidGhosts(format!(
                    "tau_{k} must be a series in {k} variables, got {}",
                    t.num_vars()
                )));
            }
            if !t.constant_term().is_zero() {
                return Err(Error::InvalidGhosts(format!("tau_{k} has a constant term")));
            }
            let t = t.remap(n, &(0..k).collect::<Vec<_>>())?;
            let d = g.trunc_degree().max(t.trunc_degree());
            g = g.with_trunc_degree(d).add(&t.with_trunc_degree(d))?;
        }
        ghosts.push(g);
    }
    GhostFamily::new(ghosts, GhostKind::PartiallySeparated)
}

/// Solved Witt laws `Φ_1..Φ_n`, `Ψ_1..Ψ_n` in the variables
/// `(x_1..x_n, y_1..y_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittLaws {
    pub n: usize,
    pub add_laws: SeriesTuple,
    pub mul_laws: SeriesTuple,
    /// True when the laws are polynomials with every term present.
    pub exact: bool,
}

impl WittLaws {
    pub fn trunc_degree(&self) -> u32 {
        self.add_laws.trunc_degree()
    }

    /// True when every coefficient of every law is an integer.
    pub fn is_integral(&self) -> bool {
        self.add_laws
            .components()
            .iter()
            .chain(self.mul_laws.components())
            .all(|s| s.terms().all(|(_, c)| c.is_integral()))
    }

    /// True when `Φ_i`, `Ψ_i` only involve `x_j`, `y_j` with `j ≤ i`.
    pub fn is_triangular(&self) -> bool {
        let n = self.n;
        let ok = |i: usize, s: &Series| {
            s.terms().all(|(m, _)| (0..n).filter(|&j| j > i).all(|j| m.get(j) == 0 && m.get(n + j) == 0))
        };
        (0..n).all(|i| ok(i, self.add_laws.component(i)) && ok(i, self.mul_laws.component(i)))
    }

    /// The laws as a formal ring at precision `degree`. Exact laws may be
    /// placed at any precision; series laws only at or below their own.
    pub fn to_formal_ring(&self, degree: u32) -> Result<FormalRing> {
        let (phi, psi) = if self.exact {
            (self.add_laws.with_trunc_degree(degree), self.mul_laws.with_trunc_degree(degree))
        } else {
            (self.add_laws.truncate(degree)?, self.mul_laws.truncate(degree)?)
        };
        FormalRing::from_laws(phi, psi)
    }
}

/// Degree of `f(h_1, …)` given degrees of the substituted polynomials.
fn substituted_degree(f: &Series, degrees: &[u32]) -> u32 {
    f.terms()
        .map(|(m, _)| m.exponents().iter().zip(degrees).map(|(&e, &d)| u32::from(e) * d).sum())
        .max()
        .unwrap_or(0)
}

/// Working precision at which the polynomial laws of a linear-diagonal family
/// are computed without loss.
fn exact_degree(g: &GhostFamily, splits: &[Split]) -> u32 {
    let n = g.n();
    let mut add = vec![0u32; n];
    let mut mul = vec![0u32; n];
    let mut w = 1;
    for (k, sp) in splits.iter().enumerate() {
        let dg = g.ghosts[k].max_degree().unwrap_or(1);
        add[k] = dg.max(substituted_degree(&sp.tau, &add));
        mul[k] = (2 * dg).max(substituted_degree(&sp.tau, &mul));
        w = w.max(add[k]).max(mul[k]);
    }
    w
}

/// Shared state of the component-by-component solvers.
struct Solver {
    n: usize,
    d: u32,
    ring: CoefficientRing,
    exact: bool,
}

impl Solver {
    fn new(g: &GhostFamily, degree: u32) -> Result<(Self, Vec<Split>)> {
        let splits = g
            .splits()
            .ok_or_else(|| Error::InvalidGhosts("family is not partially separated".into()))?;
        let exact = splits.iter().all(|sp| sp.omega.num_terms() == 1);
        let d = if exact { exact_degree(g, &splits).max(degree) } else { degree };
        Ok((Solver { n: g.n(), d, ring: g.ring().clone(), exact }, splits))
    }

    /// A series in `n` variables placed on block `block` of `2n`.
    fn on_block(&self, s: &Series, block: usize) -> Result<Series> {
        let mapping: Vec<usize> = (0..s.num_vars()).map(|i| block * self.n + i).collect();
        s.with_trunc_degree(self.d).remap(2 * self.n, &mapping)
    }

    /// `ω_k(x_k)` on block `block`.
    fn omega_on(&self, sp: &Split, k: usize, block: usize) -> Result<Series> {
        sp.omega.with_trunc_degree(self.d).remap(2 * self.n, &[block * self.n + k])
    }

    /// `f(h_1, …, h_m, 0, …, 0)` for a series `f` in `n` variables.
    fn substitute(&self, f: &Series, solved: &[Series]) -> Result<Series> {
        let mut args = solved.to_vec();
        args.resize(self.n, Series::zero(2 * self.n, self.d, self.ring.clone()));
        f.with_trunc_degree(self.d).compose(&SeriesTuple::new(args)?)
    }

    /// Solves `ω(u) = rhs` for `u`.
    fn solve_diagonal(&self, omega: &Series, rhs: Series) -> Result<Series> {
        let omega = omega.with_trunc_degree(self.d);
        if self.exact {
            let c = omega.coefficient(&[1]);
            return rhs.scale(&c.inverse()?);
        }
        let inv = SeriesTuple::new(vec![omega])?.invert()?;
        inv.component(0).compose(&SeriesTuple::new(vec![rhs])?)
    }

    fn finish(&self, add: Vec<Series>, mul: Vec<Series>) -> Result<WittLaws> {
        Ok(WittLaws {
            n: self.n,
            add_laws: SeriesTuple::new(add)?,
            mul_laws: SeriesTuple::new(mul)?,
            exact: self.exact,
        })
    }
}

/// Solves with the one-variable-piece recursion
/// `χ_k(Φ_k) = Σ_i (χ_i(x_i) + χ_i(y_i)) − Σ_{i<k} χ_i(Φ_i)` and
/// `χ_k(Ψ_k) = Σ_{i,j} χ_i(x_i)·χ_j(y_j) − Σ_{i<k} χ_i(Ψ_i)`.
pub fn solve_separated(g: &GhostFamily, degree: u32) -> Result<WittLaws> {
    if !g.is_separated() {
        return Err(Error::InvalidGhosts("family is not separated".into()));
    }
    let (s, splits) = Solver::new(g, degree)?;
    let n = s.n;
    let place = |piece: &Series, var: usize| piece.with_trunc_degree(s.d).remap(2 * n, &[var]);
    let mut add: Vec<Series> = Vec::with_capacity(n);
    let mut mul: Vec<Series> = Vec::with_capacity(n);
    for (k, sp) in splits.iter().enumerate() {
        let pieces: Vec<Series> = (0..=k).map(|i| g.piece(k, i)).collect();
        let xs = pieces.iter().enumerate().map(|(i, p)| place(p, i)).collect::<Result<Vec<_>>>()?;
        let ys = pieces.iter().enumerate().map(|(i, p)| place(p, n + i)).collect::<Result<Vec<_>>>()?;

        let mut rhs_add = Series::zero(2 * n, s.d, s.ring.clone());
        let mut rhs_mul = Series::zero(2 * n, s.d, s.ring.clone());
        for i in 0..=k {
            rhs_add = rhs_add.add(&xs[i])?.add(&ys[i])?;
            for yj in &ys {
                rhs_mul = rhs_mul.add(&xs[i].mul(yj)?)?;
            }
        }
        for i in 0..k {
            let chi = SeriesTuple::new(vec![pieces[i].with_trunc_degree(s.d)])?;
            rhs_add = rhs_add.sub(&chi.component(0).compose(&SeriesTuple::new(vec![add[i].clone()])?)?)?;
            rhs_mul = rhs_mul.sub(&chi.component(0).compose(&SeriesTuple::new(vec![mul[i].clone()])?)?)?;
        }
        add.push(s.solve_diagonal(&sp.omega, rhs_add)?);
        mul.push(s.solve_diagonal(&sp.omega, rhs_mul)?);
    }
    s.finish(add, mul)
}

/// Solves with `ω_k(Φ_k) = τ(x) + τ(y) + ω_k(x_k) + ω_k(y_k) − τ(Φ_1..Φ_{k−1})`
/// and `ω_k(Ψ_k) = (τ(x) + ω_k(x_k))·(τ(y) + ω_k(y_k)) − τ(Ψ_1..Ψ_{k−1})`.
pub fn solve_partially_separated(g: &GhostFamily, degree: u32) -> Result<WittLaws> {
    let (s, splits) = Solver::new(g, degree)?;
    let n = s.n;
    let mut add: Vec<Series> = Vec::with_capacity(n);
    let mut mul: Vec<Series> = Vec::with_capacity(n);
    for (k, sp) in splits.iter().enumerate() {
        let tx = s.on_block(&sp.tau, 0)?;
        let ty = s.on_block(&sp.tau, 1)?;
        let wx = s.omega_on(sp, k, 0)?;
        let wy = s.omega_on(sp, k, 1)?;

        let rhs_add = tx.add(&ty)?.add(&wx)?.add(&wy)?.sub(&s.substitute(&sp.tau, &add)?)?;
        let rhs_mul = tx
            .mul(&ty)?
            .add(&tx.mul(&wy)?)?
            .add(&ty.mul(&wx)?)?
            .add(&wx.mul(&wy)?)?
            .sub(&s.substitute(&sp.tau, &mul)?)?;
        add.push(s.solve_diagonal(&sp.omega, rhs_add)?);
        mul.push(s.solve_diagonal(&sp.omega, rhs_mul)?);
    }
    s.finish(add, mul)
}

/// Inverts the ghost tuple and builds `Φ`, `Ψ` from it as a logarithm.
/// Works for any family; the result is a series at precision `degree`.
pub fn solve_via_log(g: &GhostFamily, degree: u32) -> Result<WittLaws> {
    let ring = FormalRing::from_log(&g.as_log(degree))?;
    Ok(WittLaws { n: g.n(), add_laws: ring.phi().clone(), mul_laws: ring.psi().clone(), exact: false })
}

/// Solves the Witt equations, exactly when the family allows it.
///
/// Separated families use the piece recursion, other partially separated
/// families the `τ`/`ω` recursion, and anything else goes through the
/// inverted ghost tuple. With a linear diagonal the laws are polynomials,
/// computed at a precision of at least `degree` that holds every term.
pub fn witt_laws(g: &GhostFamily, degree: u32) -> Result<WittLaws> {
    if g.is_separated() {
        solve_separated(g, degree)
    } else if g.is_partially_separated() {
        solve_partially_separated(g, degree)
    } else {
        solve_via_log(g, degree)
    }
}

/// Like [`witt_laws`] but fails unless the laws come out as exact polynomials.
pub fn witt_laws_exact(g: &GhostFamily) -> Result<WittLaws> {
    if !g.has_linear_diagonal() {
        return Err(Error::NotExact("the diagonal of the ghost family is not linear".into()));
    }
    witt_laws(g, 1)
}

/// A finite Witt vector `(a_1, …, a_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector(pub Vec<Coefficient>);

impl WittVector {
    pub fn zero(n: usize) -> Self {
        WittVector(vec![Coefficient::Rational(Rational::zero()); n])
    }

    /// `(1, 0, …, 0)`.
    pub fn one(n: usize) -> Self {
        let mut v = Self::zero(n);
        if n > 0 {
            v.0[0] = Coefficient::Rational(Rational::one());
        }
        v
    }

    pub fn from_rationals(values: Vec<Rational>) -> Self {
        WittVector(values.into_iter().map(Coefficient::Rational).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for WittVector {
    type Err = Error;

    /// Comma-separated rationals, e.g. `1,0,-3/2`.
    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|t| t.trim().parse::<Rational>())
            .collect::<Result<Vec<_>>>()
            .map(WittVector::from_rationals)
    }
}

impl fmt::Display for WittVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// The ring that holds both the laws' coefficients and every entry.
fn common_ring(laws: &CoefficientRing, values: &[&Coefficient]) -> Result<CoefficientRing> {
    let mut ring = laws.clone();
    for v in values {
        let r = v.ring();
        if r == ring {
            continue;
        }
        match (&ring, &r) {
            (CoefficientRing::Rational, CoefficientRing::Poly(_)) => ring = r,
            (CoefficientRing::Poly(_), CoefficientRing::Rational) => {}
            _ => return Err(Error::RingMismatch(ring.to_string(), r.to_string())),
        }
    }
    Ok(ring)
}

fn check_vectors(laws: &WittLaws, vs: &[&WittVector]) -> Result<()> {
    if !laws.exact {
        return Err(Error::NotExact("Witt vector arithmetic needs polynomial laws".into()));
    }
    for v in vs {
        if v.len() != laws.n {
            return Err(Error::ShapeMismatch(format!("Witt vector of length {} for laws of length {}", v.len(), laws.n)));
        }
    }
    Ok(())
}

fn apply(laws: &SeriesTuple, a: &WittVector, b: &WittVector) -> Result<WittVector> {
    let args: Vec<Coefficient> = a.0.iter().chain(&b.0).cloned().collect();
    laws.components().iter().map(|s| s.evaluate(&args)).collect::<Result<Vec<_>>>().map(WittVector)
}

/// `(Φ_1(a,b), …, Φ_n(a,b))`.
pub fn gw_add(laws: &WittLaws, a: &WittVector, b: &WittVector) -> Result<WittVector> {
    check_vectors(laws, &[a, b])?;
    apply(&laws.add_laws, a, b)
}

/// `(Ψ_1(a,b), …, Ψ_n(a,b))`.
pub fn gw_mul(laws: &WittLaws, a: &WittVector, b: &WittVector) -> Result<WittVector> {
    check_vectors(laws, &[a, b])?;
    apply(&laws.mul_laws, a, b)
}

/// The vector `r` with `a ⊕ r = 0`, solved entry by entry: with `r_1..r_{k−1}`
/// known, `Φ_k(a, r_1..r_{k−1}, y_k)` is linear in `y_k`.
pub fn gw_neg(laws: &WittLaws, a: &WittVector) -> Result<WittVector> {
    check_vectors(laws, &[a])?;
    let n = laws.n;
    let ring = common_ring(laws.add_laws.ring(), &a.0.iter().collect::<Vec<_>>())?;
    let mut r: Vec<Coefficient> = Vec::with_capacity(n);
    for k in 0..n {
        let law = laws.add_laws.component(k);
        // coefficients of the law as a polynomial in y_k
        let mut by_power: Vec<Coefficient> = Vec::new();
        for (m, c) in law.terms() {
            let mut t = c.embed(&ring)?;
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 || v == n + k {
                    continue;
                }
                let value = if v < n {
                    a.0[v].embed(&ring)?
                } else if v - n < k {
                    r[v - n].clone()
                } else {
                    return Err(Error::NotExact(format!("law {} involves y_{}", k + 1, v - n + 1)));
                };
                t = &t * &value.pow(u32::from(e));
            }
            let power = m.get(n + k) as usize;
            if by_power.len() <= power {
                by_power.resize(power + 1, ring.zero());
            }
            by_power[power] = &by_power[power] + &t;
        }
        by_power.resize(2.max(by_power.len()), ring.zero());
        if by_power[2..].iter().any(|c| !c.is_zero()) {
            return Err(Error::NotExact(format!("law {} is not linear in y_{}", k + 1, k + 1)));
        }
        r.push((-&by_power[0]).div_exact(&by_power[1])?);
    }
    Ok(WittVector(r))
}

/// `(g_1(a), …, g_n(a))`.
pub fn ghost_map(g: &GhostFamily, a: &WittVector) -> Result<Vec<Coefficient>> {
    if a.len() != g.n() {
        return Err(Error::ShapeMismatch(format!("Witt vector of length {} for {} ghosts", a.len(), g.n())));
    }
    g.ghosts.iter().map(|s| s.evaluate(&a.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fring::verify_ring_axioms;
    use crate::scalars::binomial;

    fn q(s: &str) -> Coefficient {
        Coefficient::Rational(s.parse().unwrap())
    }

    fn v(s: &str) -> WittVector {
        s.parse().unwrap()
    }

    fn poly(n: usize, d: u32, terms: &[(&[u32], &str)]) -> Series {
        Series::from_terms(n, d, CoefficientRing::Rational, terms.iter().map(|(e, c)| (e.to_vec(), q(c)))).unwrap()
    }

    fn uni(d: u32, coeffs: &[&str]) -> Series {
        Series::univariate(d, CoefficientRing::Rational, coeffs.iter().map(|c| q(c)).collect()).unwrap()
    }

    #[test]
    fn p_typical_ghosts() {
        let g = ghosts_p_typical(2, 2).unwrap();
        assert_eq!(g.ghosts()[0], poly(2, 2, &[(&[1, 0], "1")]));
        assert_eq!(g.ghosts()[1], poly(2, 2, &[(&[2, 0], "1"), (&[0, 1], "2")]));

        let g = ghosts_p_typical(3, 1).unwrap();
        assert_eq!(g.ghosts(), &[poly(1, 1, &[(&[1], "1")])]);

        let g = ghosts_p_typical(2, 3).unwrap();
        assert_eq!(g.ghosts()[2], poly(3, 4, &[(&[4, 0, 0], "1"), (&[0, 2, 0], "2"), (&[0, 0, 1], "4")]));

        assert_eq!(ghosts_p_typical(4, 2), Err(Error::CompositePrime(4)));
    }

    #[test]
    fn universal_ghosts() {
        assert_eq!(ghosts_universal(1).unwrap().ghosts(), &[poly(1, 1, &[(&[1], "1")])]);
        let g = ghosts_universal(2).unwrap();
        assert_eq!(g.ghosts()[1], poly(2, 2, &[(&[2, 0], "1"), (&[0, 1], "2")]));
        let g = ghosts_universal(4).unwrap();
        assert_eq!(
            g.ghosts()[3],
            poly(4, 4, &[(&[4, 0, 0, 0], "1"), (&[0, 2, 0, 0], "2"), (&[0, 0, 0, 1], "4")])
        );
    }

    #[test]
    fn separated_constructor() {
        // χ_i^{(k)}(x) = p^{i−1} x^{p^{k−i}} at p = 2
        let chi = vec![
            vec![uni(2, &["0", "1"])],
            vec![uni(2, &["0", "0", "1"]), uni(2, &["0", "2"])],
        ];
        let g = ghosts_separated(&chi).unwrap();
        assert_eq!(g.ghosts(), ghosts_p_typical(2, 2).unwrap().ghosts());

        let ones = vec![vec![uni(1, &["0", "1"])], vec![uni(1, &["0", "1"]), uni(1, &["0", "1"])]];
        let g = ghosts_separated(&ones).unwrap();
        assert_eq!(g.ghosts()[1], poly(2, 1, &[(&[1, 0], "1"), (&[0, 1], "1")]));

        let bad = vec![vec![uni(2, &["0", "0", "1"])]];
        assert!(matches!(ghosts_separated(&bad), Err(Error::InvalidGhosts(_))));
    }

    #[test]
    fn non_linear_piece_matches_inverted_log() {
        let g = ghosts_separated(&[vec![uni(6, &["0", "1", "1"])]]).unwrap();
        let laws = witt_laws(&g, 6).unwrap();
        assert!(!laws.exact);
        let ring = FormalRing::from_log(&SeriesTuple::new(vec![uni(6, &["0", "1", "1"])]).unwrap()).unwrap();
        assert_eq!(&laws.add_laws, ring.phi());
        assert_eq!(&laws.mul_laws, ring.psi());
    }

    #[test]
    fn partially_separated_example() {
        let tau = vec![poly(1, 2, &[(&[2], "1")])];
        let omega = vec![uni(2, &["0", "1"]), uni(2, &["0", "1"])];
        let g = ghosts_partially_separated(&tau, &omega).unwrap();
        assert_eq!(g.ghosts()[1], poly(2, 2, &[(&[2, 0], "1"), (&[0, 1], "1")]));
        let laws = witt_laws(&g, 2).unwrap();
        assert!(laws.exact);
        let d = laws.trunc_degree();
        assert_eq!(laws.add_laws.component(0), &poly(4, d, &[(&[1, 0, 0, 0], "1"), (&[0, 0, 1, 0], "1")]));
        assert_eq!(
            laws.add_laws.component(1),
            &poly(4, d, &[(&[0, 1, 0, 0], "1"), (&[0, 0, 0, 1], "1"), (&[1, 0, 1, 0], "-2")])
        );

        let additive = ghosts_partially_separated(&[Series::zero(1, 1, CoefficientRing::Rational)], &omega).unwrap();
        let laws = witt_laws(&additive, 1).unwrap();
        assert_eq!(laws.add_laws.component(1), &poly(4, laws.trunc_degree(), &[(&[0, 1, 0, 0], "1"), (&[0, 0, 0, 1], "1")]));
    }

    #[test]
    fn solver_paths_agree() {
        for g in [ghosts_p_typical(2, 3).unwrap(), ghosts_p_typical(3, 2).unwrap(), ghosts_universal(4).unwrap()] {
            let a = solve_separated(&g, 1).unwrap();
            let b = solve_partially_separated(&g, 1).unwrap();
            assert_eq!(a, b);
            let d = 6;
            let c = solve_via_log(&g, d).unwrap();
            assert_eq!(a.add_laws.with_trunc_degree(d), c.add_laws);
            assert_eq!(a.mul_laws.with_trunc_degree(d), c.mul_laws);
        }
    }

    #[test]
    fn classical_length_two_laws() {
        for p in [2u64, 3] {
            let laws = witt_laws_exact(&ghosts_p_typical(p, 2).unwrap()).unwrap();
            let d = laws.trunc_degree();
            let pi = p as u32;
            let mut phi2: Vec<(Vec<u32>, Coefficient)> =
                vec![(vec![0, 1, 0, 0], q("1")), (vec![0, 0, 0, 1], q("1"))];
            for k in 1..pi {
                let c = Rational::new(binomial(p, u64::from(k)), p).unwrap();
                phi2.push((vec![k, 0, pi - k, 0], Coefficient::Rational(-c)));
            }
            let phi2 = Series::from_terms(4, d, CoefficientRing::Rational, phi2).unwrap();
            assert_eq!(laws.add_laws.component(1), &phi2);
            let psi2 = poly(4, d, &[(&[pi, 0, 0, 1], "1"), (&[0, 1, pi, 0], "1"), (&[0, 1, 0, 1], &p.to_string())]);
            assert_eq!(laws.mul_laws.component(1), &psi2);
        }
        let u = witt_laws_exact(&ghosts_universal(2).unwrap()).unwrap();
        let p = witt_laws_exact(&ghosts_p_typical(2, 2).unwrap()).unwrap();
        assert_eq!(u.add_laws.with_trunc_degree(4), p.add_laws.with_trunc_degree(4));
        assert_eq!(u.mul_laws.with_trunc_degree(4), p.mul_laws.with_trunc_degree(4));
    }

    #[test]
    fn integral_and_triangular() {
        for g in [ghosts_p_typical(2, 3).unwrap(), ghosts_p_typical(3, 3).unwrap(), ghosts_universal(4).unwrap()] {
            let laws = witt_laws_exact(&g).unwrap();
            assert!(laws.is_integral());
            assert!(laws.is_triangular());
        }
    }

    #[test]
    fn laws_form_a_ring() {
        let laws = witt_laws_exact(&ghosts_p_typical(2, 2).unwrap()).unwrap();
        let report = verify_ring_axioms(&laws.to_formal_ring(6).unwrap(), 6).unwrap();
        assert!(report.is_ok(), "{report}");
    }

    #[test]
    fn vector_arithmetic() {
        let g = ghosts_p_typical(2, 2).unwrap();
        let laws = witt_laws_exact(&g).unwrap();
        assert_eq!(gw_add(&laws, &v("1,0"), &v("1,0")).unwrap(), v("2,-1"));
        assert_eq!(gw_add(&laws, &v("5,-3/2"), &WittVector::zero(2)).unwrap(), v("5,-3/2"));
        assert_eq!(gw_mul(&laws, &v("5,-3/2"), &WittVector::one(2)).unwrap(), v("5,-3/2"));
        assert_eq!(gw_mul(&laws, &v("1,0"), &v("1,0")).unwrap(), v("1,0"));
        let sq = gw_mul(&laws, &v("2,-1"), &v("2,-1")).unwrap();
        assert_eq!(ghost_map(&g, &sq).unwrap(), vec![q("4"), q("4")]);
        assert_eq!(gw_neg(&laws, &WittVector::zero(2)).unwrap(), WittVector::zero(2));
        assert_eq!(gw_neg(&laws, &v("1,0")).unwrap(), v("-1,-1"));

        let laws3 = witt_laws_exact(&ghosts_p_typical(3, 2).unwrap()).unwrap();
        assert_eq!(gw_add(&laws3, &v("1,0"), &v("2,0")).unwrap(), v("3,-6"));
        assert_eq!(ghost_map(&ghosts_p_typical(3, 2).unwrap(), &v("3,-6")).unwrap(), vec![q("3"), q("9")]);
    }

    #[test]
    fn symbolic_negation() {
        let laws = witt_laws_exact(&ghosts_universal(2).unwrap()).unwrap();
        let ring = CoefficientRing::polynomial(&["a1", "a2"]);
        let a = WittVector(vec![ring.param("a1").unwrap(), ring.param("a2").unwrap()]);
        let r = gw_neg(&laws, &a).unwrap();
        assert_eq!(r.0[0], ring.parse("-a1").unwrap());
        assert_eq!(r.0[1], ring.parse("-a2 - a1^2").unwrap());
    }

    #[test]
    fn ghost_map_examples() {
        let g = ghosts_p_typical(2, 2).unwrap();
        assert_eq!(ghost_map(&g, &v("1,0")).unwrap(), vec![q("1"), q("1")]);
        assert_eq!(ghost_map(&g, &WittVector::zero(2)).unwrap(), vec![q("0"), q("0")]);
        assert_eq!(ghost_map(&ghosts_universal(2).unwrap(), &v("1,1")).unwrap(), vec![q("1"), q("3")]);
        assert!(ghost_map(&g, &v("1")).is_err());
    }

    #[test]
    fn inexact_laws_refuse_vectors() {
        let g = ghosts_separated(&[vec![uni(4, &["0", "1", "1"])]]).unwrap();
        let laws = witt_laws(&g, 4).unwrap();
        assert!(matches!(gw_add(&laws, &v("1"), &v("1")), Err(Error::NotExact(_))));
        assert!(matches!(witt_laws_exact(&g), Err(Error::NotExact(_))));
    }
}
