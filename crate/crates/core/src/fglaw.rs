//! Formal group laws built from group logarithms, and mechanical checking of
//! the group axioms.

use std::fmt;

use crate::error::{Error, Result};
use crate::mvps::{Series, SeriesTuple};
use crate::scalars::{Assignment, Coefficient, CoefficientRing};

/// An `n`-dimensional formal group law `Φ(x, y)` in `2n` variables, laid out
/// as `(x_1, …, x_n, y_1, …, y_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalGroup {
    dim: usize,
    law: SeriesTuple,
    log: Option<SeriesTuple>,
    exp: Option<SeriesTuple>,
}

impl FormalGroup {
    /// Wraps an explicitly given law; no logarithm is attached.
    pub fn from_law(law: SeriesTuple) -> Result<Self> {
        let dim = law.len();
        if law.num_vars() != 2 * dim {
            return Err(Error::ShapeMismatch(format!(
                "a {dim}-dimensional law needs {} variables, got {}",
                2 * dim,
                law.num_vars()
            )));
        }
        Ok(FormalGroup { dim, law, log: None, exp: None })
    }

    /// `Φ(x, y) = G⁻¹(G(x) + G(y))`.
    pub fn from_log(log: &SeriesTuple) -> Result<Self> {
        let exp = log.invert()?;
        let law = add_via_log(log, &exp)?;
        Ok(FormalGroup { dim: log.len(), law, log: Some(log.clone()), exp: Some(exp) })
    }

    pub(crate) fn from_parts(law: SeriesTuple, log: Option<SeriesTuple>, exp: Option<SeriesTuple>) -> Result<Self> {
        let mut g = Self::from_law(law)?;
        g.log = log;
        g.exp = exp;
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn law(&self) -> &SeriesTuple {
        &self.law
    }

    pub fn log(&self) -> Option<&SeriesTuple> {
        self.log.as_ref()
    }

    /// The group exponential `G⁻¹`, when the law came from a logarithm.
    pub fn exp(&self) -> Option<&SeriesTuple> {
        self.exp.as_ref()
    }

    pub fn trunc_degree(&self) -> u32 {
        self.law.trunc_degree()
    }

    pub fn ring(&self) -> &CoefficientRing {
        self.law.ring()
    }

    fn log_pair(&self) -> Result<(&SeriesTuple, &SeriesTuple)> {
        match (&self.log, &self.exp) {
            (Some(l), Some(e)) => Ok((l, e)),
            _ => Err(Error::MissingLog),
        }
    }

    /// The group inverse `χ(x) = G⁻¹(−G(x))`.
    pub fn inverse_series(&self) -> Result<SeriesTuple> {
        let (log, exp) = self.log_pair()?;
        exp.compose(&log.map(|c| Ok(c.neg()))?)
    }

    /// `ρ_a(x) = G⁻¹(a·G(x))`.
    pub fn rho(&self, a: &Coefficient) -> Result<SeriesTuple> {
        let (log, exp) = self.log_pair()?;
        exp.compose(&log.map(|c| c.scale(a))?)
    }

    pub fn eval_params(&self, assignment: &Assignment) -> Result<Self> {
        let ev = |t: &Option<SeriesTuple>| t.as_ref().map(|t| t.eval_params(assignment)).transpose();
        Ok(FormalGroup {
            dim: self.dim,
            law: self.law.eval_params(assignment)?,
            log: ev(&self.log)?,
            exp: ev(&self.exp)?,
        })
    }
}

/// The variables of block `block` among `blocks` blocks of `dim` variables.
pub(crate) fn block_vars(dim: usize, blocks: usize, block: usize, d: u32, ring: &CoefficientRing) -> SeriesTuple {
    SeriesTuple::new(
        (0..dim)
            .map(|i| Series::var(dim * blocks, block * dim + i, d, ring.clone()))
            .collect(),
    )
    .expect("uniform shapes")
}

/// A tuple in `dim` variables placed on block `block` of a `blocks·dim` alphabet.
pub(crate) fn on_block(t: &SeriesTuple, blocks: usize, block: usize) -> Result<SeriesTuple> {
    let dim = t.num_vars();
    let mapping: Vec<usize> = (0..dim).map(|i| block * dim + i).collect();
    t.remap(dim * blocks, &mapping)
}

/// A binary law in `2n` variables re-expressed on blocks `(a, b)` of a
/// `blocks·n` alphabet.
pub(crate) fn law_on_blocks(law: &SeriesTuple, blocks: usize, a: usize, b: usize) -> Result<SeriesTuple> {
    let dim = law.len();
    let mapping: Vec<usize> = (0..dim).map(|i| a * dim + i).chain((0..dim).map(|i| b * dim + i)).collect();
    law.remap(dim * blocks, &mapping)
}

pub(crate) fn add_via_log(log: &SeriesTuple, exp: &SeriesTuple) -> Result<SeriesTuple> {
    let gx = on_block(log, 2, 0)?;
    let gy = on_block(log, 2, 1)?;
    exp.compose(&gx.add(&gy)?)
}

pub fn law_from_log(log: &SeriesTuple) -> Result<FormalGroup> {
    FormalGroup::from_log(log)
}

pub fn group_inverse_series(log: &SeriesTuple) -> Result<SeriesTuple> {
    FormalGroup::from_log(log)?.inverse_series()
}

pub fn rho(log: &SeriesTuple, a: &Coefficient) -> Result<SeriesTuple> {
    let exp = log.invert()?;
    exp.compose(&log.map(|c| c.scale(a))?)
}

/// One coefficient where the two sides of an identity disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub identity: String,
    pub component: usize,
    pub exponents: Vec<u32>,
    pub lhs: Coefficient,
    pub rhs: Coefficient,
}

/// Outcome of checking a list of identities coefficient by coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub checked: Vec<String>,
    pub max_degree: u32,
    pub failures: Vec<Failure>,
}

impl VerificationReport {
    pub fn new(max_degree: u32) -> Self {
        VerificationReport { checked: Vec::new(), max_degree, failures: Vec::new() }
    }

    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    /// Records the comparison `lhs = rhs` under `identity`.
    pub fn record(&mut self, identity: &str, lhs: &SeriesTuple, rhs: &SeriesTuple) {
        self.checked.push(identity.to_string());
        for (component, exponents, l, r) in lhs.differences(rhs) {
            self.failures.push(Failure { identity: identity.to_string(), component, exponents, lhs: l, rhs: r });
        }
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checked.extend(other.checked);
        self.failures.extend(other.failures);
    }

    /// Names of the identities that hold.
    pub fn passed(&self) -> Vec<&str> {
        self.checked
            .iter()
            .filter(|id| !self.failures.iter().any(|f| &f.identity == *id))
            .map(String::as_str)
            .collect()
    }

    /// The first failing coefficient of `identity`, in graded order.
    pub fn first_failure(&self, identity: &str) -> Option<&Failure> {
        self.failures.iter().find(|f| f.identity == identity)
    }

    pub fn failed_identities(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = Vec::new();
        for f in &self.failures {
            if !ids.contains(&f.identity.as_str()) {
                ids.push(&f.identity);
            }
        }
        ids
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for id in &self.checked {
            match self.first_failure(id) {
                None => writeln!(f, "  ok    {id}")?,
                Some(fail) => {
                    let count = self.failures.iter().filter(|x| &x.identity == id).count();
                    writeln!(
                        f,
                        "  FAIL  {id}: {count} coefficient(s) differ; first at component {} exponents {:?}: {} != {}",
                        fail.component + 1,
                        fail.exponents,
                        fail.lhs,
                        fail.rhs
                    )?
                }
            }
        }
        Ok(())
    }
}

pub(crate) const GROUP_IDENTITIES: [&str; 4] = ["phi(x,0) = x", "phi(0,x) = x", "phi commutative", "phi associative"];

/// Checks `Φ(x,0) = x`, `Φ(0,x) = x`, commutativity and associativity up to
/// total degree `degree` (clamped to the law's precision).
///
/// Failing coefficients are data in the report; an error only signals a
/// malformed law (nonzero constant term).
pub fn verify_group_axioms(group: &FormalGroup, degree: u32) -> Result<VerificationReport> {
    let d = degree.min(group.trunc_degree());
    let law = group.law.truncate(d)?;
    verify_law(&law, d)
}

pub(crate) fn verify_law(law: &SeriesTuple, d: u32) -> Result<VerificationReport> {
    let n = law.len();
    let ring = law.ring().clone();
    let mut report = VerificationReport::new(d);

    let x = SeriesTuple::identity(n, d, ring.clone());
    let zero = x.map(|_| Ok(Series::zero(n, d, ring.clone())))?;
    report.record(GROUP_IDENTITIES[0], &law.compose(&x.concat(&zero)?)?, &x);
    report.record(GROUP_IDENTITIES[1], &law.compose(&zero.concat(&x)?)?, &x);

    let swapped = block_vars(n, 2, 1, d, &ring).concat(&block_vars(n, 2, 0, d, &ring))?;
    report.record(GROUP_IDENTITIES[2], &law.compose(&swapped)?, law);

    let (lhs, rhs) = associativity_sides(law, law)?;
    report.record(GROUP_IDENTITIES[3], &lhs, &rhs);
    Ok(report)
}

/// `(F(F(x,y),z), F(x,F(y,z)))` in `3n` variables; `outer` and `inner` are
/// the same law except in distributivity-style checks.
pub(crate) fn associativity_sides(outer: &SeriesTuple, inner: &SeriesTuple) -> Result<(SeriesTuple, SeriesTuple)> {
    let n = outer.len();
    let d = outer.trunc_degree();
    let ring = outer.ring().clone();
    let xy = law_on_blocks(inner, 3, 0, 1)?;
    let yz = law_on_blocks(inner, 3, 1, 2)?;
    let x = block_vars(n, 3, 0, d, &ring);
    let z = block_vars(n, 3, 2, d, &ring);
    let lhs = outer.compose(&xy.concat(&z)?)?;
    let rhs = outer.compose(&x.concat(&yz)?)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Coefficient {
        Coefficient::Rational(s.parse().unwrap())
    }

    fn tuple1(d: u32, coeffs: &[&str]) -> SeriesTuple {
        let s = Series::univariate(d, CoefficientRing::Rational, coeffs.iter().map(|c| q(c)).collect()).unwrap();
        SeriesTuple::new(vec![s]).unwrap()
    }

    fn todd_log(d: u32) -> SeriesTuple {
        let coeffs: Vec<String> = (0..=d).map(|k| if k == 0 { "0".into() } else { format!("1/{k}") }).collect();
        tuple1(d, &coeffs.iter().map(String::as_str).collect::<Vec<_>>())
    }

    fn two_var(d: u32, terms: &[(&[u32], &str)]) -> Series {
        Series::from_terms(2, d, CoefficientRing::Rational, terms.iter().map(|(e, c)| (e.to_vec(), q(c)))).unwrap()
    }

    #[test]
    fn additive_law() {
        let g = law_from_log(&tuple1(6, &["0", "1"])).unwrap();
        assert_eq!(g.law().component(0), &two_var(6, &[(&[1, 0], "1"), (&[0, 1], "1")]));
        assert!(verify_group_axioms(&g, 6).unwrap().is_ok());
    }

    #[test]
    fn todd_law_is_exactly_multiplicative() {
        let g = law_from_log(&todd_log(8)).unwrap();
        let expected = two_var(8, &[(&[1, 0], "1"), (&[0, 1], "1"), (&[1, 1], "-1")]);
        assert_eq!(g.law().component(0), &expected);
        let report = verify_group_axioms(&g, 8).unwrap();
        assert!(report.is_ok(), "{report}");
        assert_eq!(report.checked.len(), 4);
    }

    #[test]
    fn group_inverse_examples() {
        let chi = group_inverse_series(&tuple1(5, &["0", "1"])).unwrap();
        assert_eq!(chi, tuple1(5, &["0", "-1"]));

        let chi = group_inverse_series(&todd_log(7)).unwrap();
        assert_eq!(chi, tuple1(7, &["0", "-1", "-1", "-1", "-1", "-1", "-1", "-1"]));
    }

    #[test]
    fn rho_examples() {
        let log = todd_log(6);
        assert_eq!(rho(&log, &q("1")).unwrap(), tuple1(6, &["0", "1"]));
        assert_eq!(rho(&log, &q("2")).unwrap(), tuple1(6, &["0", "2", "-1"]));
        assert_eq!(rho(&log, &q("0")).unwrap(), tuple1(6, &["0"]));
    }

    #[test]
    fn broken_law_fails_associativity_at_first_monomial() {
        let law = SeriesTuple::new(vec![two_var(4, &[(&[1, 0], "1"), (&[0, 1], "1"), (&[2, 0], "1")])]).unwrap();
        let g = FormalGroup::from_law(law).unwrap();
        let report = verify_group_axioms(&g, 4).unwrap();
        assert!(!report.is_ok());
        let first = report.first_failure("phi associative").unwrap();
        assert_eq!(first.exponents, vec![2, 0, 0]);
        assert_eq!((first.lhs.clone(), first.rhs.clone()), (q("2"), q("1")));
    }

    #[test]
    fn missing_log_is_reported() {
        let law = SeriesTuple::new(vec![two_var(3, &[(&[1, 0], "1"), (&[0, 1], "1")])]).unwrap();
        let g = FormalGroup::from_law(law).unwrap();
        assert_eq!(g.inverse_series(), Err(Error::MissingLog));
    }
}
