//! Formal rings `(Φ, Ψ)`: the multiplication induced by a logarithm, the
//! `a`-ring family, homomorphisms between rings, base change, and a numeric
//! approximation of the point where the logarithm reaches 1.

use std::thread;

use crate::error::{Error, Result};
use crate::fglaw::{
    associativity_sides, block_vars, law_on_blocks, on_block, verify_group_axioms, FormalGroup, VerificationReport,
};
use crate::mvps::{Series, SeriesTuple};
use crate::scalars::{Assignment, Coefficient, CoefficientRing, Rational};

/// A formal ring: an addition law `Φ` and a multiplication law `Ψ`, both
/// `n`-tuples in `2n` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalRing {
    dim: usize,
    add_law: FormalGroup,
    mul_law: SeriesTuple,
}

impl FormalRing {
    /// `Φ = G⁻¹(G(x)+G(y))`, `Ψ = G⁻¹(G(x)·G(y))` componentwise.
    pub fn from_log(log: &SeriesTuple) -> Result<Self> {
        let group = FormalGroup::from_log(log)?;
        let mul_law = product_via_log(log, group.exp().expect("built from a log"), None)?;
        Ok(FormalRing { dim: group.dim(), add_law: group, mul_law })
    }

    /// Pairs explicitly given laws; no logarithm is attached.
    pub fn from_laws(phi: SeriesTuple, psi: SeriesTuple) -> Result<Self> {
        Self::from_group(FormalGroup::from_law(phi)?, psi)
    }

    /// Pairs a group with a multiplication of the same shape.
    pub fn from_group(add_law: FormalGroup, mul_law: SeriesTuple) -> Result<Self> {
        let phi = add_law.law();
        if mul_law.len() != phi.len() || mul_law.num_vars() != phi.num_vars() || mul_law.trunc_degree() != phi.trunc_degree()
        {
            return Err(Error::ShapeMismatch(format!(
                "psi has {} components in {} variables at D={}, phi has {} in {} at D={}",
                mul_law.len(),
                mul_law.num_vars(),
                mul_law.trunc_degree(),
                phi.len(),
                phi.num_vars(),
                phi.trunc_degree()
            )));
        }
        if mul_law.ring() != phi.ring() {
            return Err(Error::RingMismatch(mul_law.ring().to_string(), phi.ring().to_string()));
        }
        Ok(FormalRing { dim: add_law.dim(), add_law, mul_law })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_law(&self) -> &FormalGroup {
        &self.add_law
    }

    pub fn phi(&self) -> &SeriesTuple {
        self.add_law.law()
    }

    pub fn psi(&self) -> &SeriesTuple {
        &self.mul_law
    }

    pub fn log(&self) -> Option<&SeriesTuple> {
        self.add_law.log()
    }

    pub fn exp(&self) -> Option<&SeriesTuple> {
        self.add_law.exp()
    }

    pub fn trunc_degree(&self) -> u32 {
        self.mul_law.trunc_degree()
    }

    pub fn ring(&self) -> &CoefficientRing {
        self.mul_law.ring()
    }

    /// The same additive group with multiplication `Ψ_a = G⁻¹(a·G(x)·G(y))`.
    pub fn scaled(&self, a: &Coefficient) -> Result<Self> {
        let (log, exp) = match (self.log(), self.exp()) {
            (Some(l), Some(e)) => (l, e),
            _ => return Err(Error::MissingLog),
        };
        let mul_law = product_via_log(log, exp, Some(a))?;
        Ok(FormalRing { dim: self.dim, add_law: self.add_law.clone(), mul_law })
    }

    /// Evaluates every parameter, landing in a ring over `Q`.
    pub fn eval_params(&self, assignment: &Assignment) -> Result<Self> {
        Ok(FormalRing {
            dim: self.dim,
            add_law: self.add_law.eval_params(assignment)?,
            mul_law: self.mul_law.eval_params(assignment)?,
        })
    }

    /// Lowers the precision of every stored series to `degree`.
    pub fn truncate(&self, degree: u32) -> Result<Self> {
        let t = |s: Option<&SeriesTuple>| s.map(|s| s.truncate(degree)).transpose();
        let group = FormalGroup::from_parts(self.phi().truncate(degree)?, t(self.log())?, t(self.exp())?)?;
        Ok(FormalRing { dim: self.dim, add_law: group, mul_law: self.mul_law.truncate(degree)? })
    }
}

/// `G⁻¹(a·G_i(x)·G_i(y))`, with `a = 1` when `scale` is `None`.
fn product_via_log(log: &SeriesTuple, exp: &SeriesTuple, scale: Option<&Coefficient>) -> Result<SeriesTuple> {
    let gx = on_block(log, 2, 0)?;
    let gy = on_block(log, 2, 1)?;
    let products = gx
        .components()
        .iter()
        .zip(gy.components())
        .map(|(a, b)| {
            let p = a.mul(b)?;
            match scale {
                Some(c) => p.scale(c),
                None => Ok(p),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    exp.compose(&SeriesTuple::new(products)?)
}

pub fn product_from_log(log: &SeriesTuple) -> Result<FormalRing> {
    FormalRing::from_log(log)
}

/// The `a`-ring `(Φ, Ψ_a)` of the logarithm.
pub fn psi_scaled(log: &SeriesTuple, a: &Coefficient) -> Result<FormalRing> {
    FormalRing::from_log(log)?.scaled(a)
}

pub(crate) const RING_IDENTITIES: [&str; 5] = [
    "psi associative",
    "psi left distributive",
    "psi right distributive",
    "psi commutative",
    "psi(x,0) = 0",
];

/// Checks associativity and commutativity of `Ψ`, distributivity over `Φ`
/// on both sides, and `Ψ(x,0) = 0`, coefficientwise up to `degree`.
pub fn verify_ring_axioms(ring: &FormalRing, degree: u32) -> Result<VerificationReport> {
    let d = degree.min(ring.trunc_degree());
    let phi = ring.phi().truncate(d)?;
    let psi = ring.psi().truncate(d)?;
    let n = ring.dim;
    let scalars = psi.ring().clone();

    type Check<'a> = Box<dyn FnOnce() -> Result<(SeriesTuple, SeriesTuple)> + Send + 'a>;
    let (phi, psi, scalars) = (&phi, &psi, &scalars);
    let checks: Vec<Check> = vec![
        Box::new(move || associativity_sides(psi, psi)),
        Box::new(move || {
            // Ψ(x, Φ(y,z)) = Φ(Ψ(x,y), Ψ(x,z))
            let x = block_vars(n, 3, 0, d, scalars);
            let lhs = psi.compose(&x.concat(&law_on_blocks(phi, 3, 1, 2)?)?)?;
            let rhs = phi.compose(&law_on_blocks(psi, 3, 0, 1)?.concat(&law_on_blocks(psi, 3, 0, 2)?)?)?;
            Ok((lhs, rhs))
        }),
        Box::new(move || {
            // Ψ(Φ(x,y), z) = Φ(Ψ(x,z), Ψ(y,z))
            let z = block_vars(n, 3, 2, d, scalars);
            let lhs = psi.compose(&law_on_blocks(phi, 3, 0, 1)?.concat(&z)?)?;
            let rhs = phi.compose(&law_on_blocks(psi, 3, 0, 2)?.concat(&law_on_blocks(psi, 3, 1, 2)?)?)?;
            Ok((lhs, rhs))
        }),
        Box::new(move || {
            let swapped = block_vars(n, 2, 1, d, scalars).concat(&block_vars(n, 2, 0, d, scalars))?;
            Ok((psi.compose(&swapped)?, psi.clone()))
        }),
        Box::new(move || {
            let x = SeriesTuple::identity(n, d, scalars.clone());
            let zero = x.map(|_| Ok(Series::zero(n, d, scalars.clone())))?;
            Ok((psi.compose(&x.concat(&zero)?)?, zero))
        }),
    ];
    let sides: Vec<Result<(SeriesTuple, SeriesTuple)>> = thread::scope(|s| {
        let handles: Vec<_> = checks.into_iter().map(|c| s.spawn(c)).collect();
        handles.into_iter().map(|h| h.join().expect("identity check panicked")).collect()
    });

    let mut report = VerificationReport::new(d);
    for (id, pair) in RING_IDENTITIES.iter().zip(sides) {
        let (lhs, rhs) = pair?;
        report.record(id, &lhs, &rhs);
    }
    Ok(report)
}

/// Group identities followed by ring identities.
pub fn verify_all(ring: &FormalRing, degree: u32) -> Result<VerificationReport> {
    let mut report = verify_group_axioms(&ring.add_law, degree)?;
    report.merge(verify_ring_axioms(ring, degree)?);
    Ok(report)
}

/// A map `φ` with `φ(Φ_1(x,y)) = Φ_2(φ(x),φ(y))` and
/// `φ(Ψ_1(x,y)) = Ψ_2(φ(x),φ(y))` expected to hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingHomomorphism {
    pub map: SeriesTuple,
    pub source: FormalRing,
    pub target: FormalRing,
}

impl RingHomomorphism {
    pub fn new(map: SeriesTuple, source: FormalRing, target: FormalRing) -> Result<Self> {
        if map.len() != target.dim || map.num_vars() != source.dim {
            return Err(Error::ShapeMismatch(format!(
                "map with {} components in {} variables between rings of dimension {} and {}",
                map.len(),
                map.num_vars(),
                source.dim,
                target.dim
            )));
        }
        if map.components().iter().any(|c| !c.constant_term().is_zero()) {
            return Err(Error::NonzeroConstantTerm);
        }
        Ok(RingHomomorphism { map, source, target })
    }

    pub fn identity(ring: &FormalRing) -> Self {
        let map = SeriesTuple::identity(ring.dim, ring.trunc_degree(), ring.ring().clone());
        RingHomomorphism { map, source: ring.clone(), target: ring.clone() }
    }

    /// True when the linear part of the map is the identity matrix.
    pub fn is_strict(&self) -> bool {
        let lin = self.map.linear_part();
        lin.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, c)| c.is_one() == (i == j) && (i == j || c.is_zero())))
    }
}

/// `σ_a(x) = G_2⁻¹(a·G_1(x))`.
pub fn sigma_map(log1: &SeriesTuple, log2: &SeriesTuple, a: &Coefficient) -> Result<SeriesTuple> {
    if log1.len() != log2.len() || log1.trunc_degree() != log2.trunc_degree() {
        return Err(Error::ShapeMismatch("logarithms differ in dimension or precision".into()));
    }
    log2.invert()?.compose(&log1.map(|c| c.scale(a))?)
}

/// `σ_a` packaged as a homomorphism from the `a`-ring of `G_1` to the ring
/// of `G_2`; for `a = 1` this is the canonical isomorphism.
///
/// The source carries `Ψ_a` because `σ_a(Ψ_{1,a}(x,y)) = Ψ_2(σ_a(x), σ_a(y))`.
pub fn sigma(log1: &SeriesTuple, log2: &SeriesTuple, a: &Coefficient) -> Result<RingHomomorphism> {
    let map = sigma_map(log1, log2, a)?;
    let source = FormalRing::from_log(log1)?;
    let source = if a.is_one() { source } else { source.scaled(a)? };
    RingHomomorphism::new(map, source, FormalRing::from_log(log2)?)
}

pub(crate) const HOMOMORPHISM_IDENTITIES: [&str; 2] = ["map preserves phi", "map preserves psi"];

/// Checks `φ∘Φ_1 = Φ_2(φ×φ)` and `φ∘Ψ_1 = Ψ_2(φ×φ)` up to `degree`.
pub fn verify_homomorphism(hom: &RingHomomorphism, degree: u32) -> Result<VerificationReport> {
    let d = degree
        .min(hom.map.trunc_degree())
        .min(hom.source.trunc_degree())
        .min(hom.target.trunc_degree());
    let map = hom.map.truncate(d)?;
    let pair = map.remap(2 * map.num_vars(), &(0..map.num_vars()).collect::<Vec<_>>())?;
    let pair = pair.concat(&on_block(&map, 2, 1)?)?;
    let mut report = VerificationReport::new(d);
    let laws = [
        (hom.source.phi().truncate(d)?, hom.target.phi().truncate(d)?),
        (hom.source.psi().truncate(d)?, hom.target.psi().truncate(d)?),
    ];
    for (id, (src, tgt)) in HOMOMORPHISM_IDENTITIES.iter().zip(laws) {
        report.record(id, &map.compose(&src)?, &tgt.compose(&pair)?);
    }
    Ok(report)
}

/// Base change along the evaluation `Q[params] → Q` given by `assignment`.
pub fn map_base(assignment: &Assignment, ring: &FormalRing) -> Result<FormalRing> {
    ring.eval_params(assignment)
}

/// Newton iteration for the root of `G(x) = 1` on the truncated polynomial,
/// starting from `1/2`.
///
/// Iterates are rounded to multiples of `2^-160`. The result is returned once
/// `|G(x) − 1| ≤ 2^-128`; a residual that fails to decrease, or an exhausted
/// budget, is reported as non-convergence.
pub fn approx_unit(log: &SeriesTuple, iterations: usize) -> Result<Rational> {
    if log.len() != 1 || log.num_vars() != 1 {
        return Err(Error::ShapeMismatch("approx_unit needs a one-dimensional logarithm".into()));
    }
    if *log.ring() != CoefficientRing::Rational {
        return Err(Error::RingMismatch(log.ring().to_string(), "Q".into()));
    }
    let g = log.component(0);
    let dg = g.derivative(0);
    let value = |s: &Series, x: &Rational| -> Result<Rational> {
        Ok(s.evaluate(&[Coefficient::Rational(x.clone())])?.as_rational().cloned().expect("rational series"))
    };
    let tolerance = Rational::one().checked_div(&Rational::from_integer(2).pow(128))?;

    let mut x = Rational::new(1, 2)?;
    let mut residual = (value(g, &x)? - Rational::one()).abs();
    for _ in 0..iterations {
        if residual.is_zero() || residual <= tolerance {
            return Ok(x);
        }
        let slope = value(&dg, &x)?;
        if slope.is_zero() {
            return Err(Error::DerivativeVanishes(x.to_string()));
        }
        let step = (value(g, &x)? - Rational::one()).checked_div(&slope)?;
        let next = (&x - &step).round_to_bits(160);
        let next_residual = (value(g, &next)? - Rational::one()).abs();
        if next_residual >= residual && !next_residual.is_zero() {
            return Err(Error::NonConvergence(iterations));
        }
        x = next;
        residual = next_residual;
    }
    if residual.is_zero() || residual <= tolerance {
        Ok(x)
    } else {
        Err(Error::NonConvergence(iterations))
    }
}
