//! Curves in a formal ring: tuples of one-variable series vanishing at 0,
//! added through `Φ` and multiplied through `Ψ`.

use crate::error::{Error, Result};
use crate::fring::FormalRing;
use crate::mvps::{Series, SeriesTuple};
use crate::scalars::CoefficientRing;

/// An `n`-tuple `γ(t)` of one-variable series with `γ(0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve(SeriesTuple);

impl Curve {
    pub fn new(components: SeriesTuple) -> Result<Self> {
        if components.num_vars() != 1 {
            return Err(Error::ShapeMismatch(format!(
                "a curve has one variable, got {}",
                components.num_vars()
            )));
        }
        if components.components().iter().any(|c| !c.constant_term().is_zero()) {
            return Err(Error::NonzeroConstantTerm);
        }
        Ok(Curve(components))
    }

    pub fn from_series(components: Vec<Series>) -> Result<Self> {
        Self::new(SeriesTuple::new(components)?)
    }

    pub fn zero(dim: usize, trunc_degree: u32, ring: CoefficientRing) -> Self {
        let zero = Series::zero(1, trunc_degree, ring);
        Curve(SeriesTuple::new(vec![zero; dim]).expect("uniform shapes"))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn trunc_degree(&self) -> u32 {
        self.0.trunc_degree()
    }

    pub fn components(&self) -> &SeriesTuple {
        &self.0
    }

    pub fn into_inner(self) -> SeriesTuple {
        self.0
    }
}

fn check(ring: &FormalRing, curves: &[&Curve]) -> Result<()> {
    for c in curves {
        if c.dim() != ring.dim() {
            return Err(Error::ShapeMismatch(format!(
                "curve of dimension {} over a ring of dimension {}",
                c.dim(),
                ring.dim()
            )));
        }
        if c.trunc_degree() != ring.trunc_degree() {
            return Err(Error::ShapeMismatch(format!(
                "curve at D={} over a ring at D={}",
                c.trunc_degree(),
                ring.trunc_degree()
            )));
        }
    }
    Ok(())
}

fn apply(law: &SeriesTuple, a: &Curve, b: &Curve) -> Result<Curve> {
    Curve::new(law.compose(&a.0.concat(&b.0)?)?)
}

/// `Φ(γ_1(t), γ_2(t))`.
pub fn curve_add(ring: &FormalRing, a: &Curve, b: &Curve) -> Result<Curve> {
    check(ring, &[a, b])?;
    apply(ring.phi(), a, b)
}

/// `Ψ(γ_1(t), γ_2(t))`.
pub fn curve_mul(ring: &FormalRing, a: &Curve, b: &Curve) -> Result<Curve> {
    check(ring, &[a, b])?;
    apply(ring.psi(), a, b)
}

/// `χ(γ(t))`, the additive inverse; needs the ring's logarithm.
pub fn curve_neg(ring: &FormalRing, a: &Curve) -> Result<Curve> {
    check(ring, &[a])?;
    let chi = ring.add_law().inverse_series()?;
    Curve::new(chi.compose(&a.0)?)
}

/// Largest `m` with every component of order at least `m`; `None` is ∞.
pub fn filtration_level(curve: &Curve) -> Option<u32> {
    curve.0.components().iter().filter_map(Series::order).min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fring::product_from_log;
    use crate::scalars::Coefficient;

    fn q(s: &str) -> Coefficient {
        Coefficient::Rational(s.parse().unwrap())
    }

    fn series(d: u32, coeffs: &[&str]) -> Series {
        Series::univariate(d, CoefficientRing::Rational, coeffs.iter().map(|c| q(c)).collect()).unwrap()
    }

    fn curve(d: u32, coeffs: &[&str]) -> Curve {
        Curve::from_series(vec![series(d, coeffs)]).unwrap()
    }

    fn todd(d: u32) -> FormalRing {
        let coeffs: Vec<String> = (0..=d).map(|k| if k == 0 { "0".into() } else { format!("1/{k}") }).collect();
        let log = series(d, &coeffs.iter().map(String::as_str).collect::<Vec<_>>());
        product_from_log(&SeriesTuple::new(vec![log]).unwrap()).unwrap()
    }

    fn additive(d: u32) -> FormalRing {
        product_from_log(&SeriesTuple::new(vec![series(d, &["0", "1"])]).unwrap()).unwrap()
    }

    #[test]
    fn addition() {
        let r = todd(6);
        let t = curve(6, &["0", "1"]);
        let zero = Curve::zero(1, 6, CoefficientRing::Rational);
        assert_eq!(curve_add(&r, &t, &zero).unwrap(), t);
        assert_eq!(curve_add(&r, &t, &t).unwrap(), curve(6, &["0", "2", "-1"]));

        let r = additive(6);
        let sum = curve_add(&r, &curve(6, &["0", "0", "1"]), &curve(6, &["0", "0", "0", "1"])).unwrap();
        assert_eq!(sum, curve(6, &["0", "0", "1", "1"]));
    }

    #[test]
    fn multiplication() {
        let r = additive(6);
        let t = curve(6, &["0", "1"]);
        assert_eq!(curve_mul(&r, &t, &t).unwrap(), curve(6, &["0", "0", "1"]));
        let zero = Curve::zero(1, 6, CoefficientRing::Rational);
        assert_eq!(curve_mul(&todd(6), &t, &zero).unwrap(), zero);
    }

    #[test]
    fn negation() {
        let r = todd(6);
        let zero = Curve::zero(1, 6, CoefficientRing::Rational);
        assert_eq!(curve_neg(&r, &zero).unwrap(), zero);
        let t = curve(6, &["0", "1"]);
        assert_eq!(curve_neg(&r, &t).unwrap(), curve(6, &["0", "-1", "-1", "-1", "-1", "-1", "-1"]));
        let t2 = curve(6, &["0", "0", "1"]);
        assert_eq!(curve_neg(&additive(6), &t2).unwrap(), curve(6, &["0", "0", "-1"]));
    }

    #[test]
    fn levels() {
        assert_eq!(filtration_level(&curve(6, &["0", "0", "0", "1", "0", "1"])), Some(3));
        assert_eq!(filtration_level(&Curve::zero(2, 6, CoefficientRing::Rational)), None);
        let p = curve_mul(&todd(8), &curve(8, &["0", "0", "1"]), &curve(8, &["0", "0", "0", "1"])).unwrap();
        assert!(filtration_level(&p).unwrap() >= 5);
    }

    #[test]
    fn mixed_precision_refused() {
        let r = todd(6);
        assert!(matches!(
            curve_add(&r, &curve(5, &["0", "1"]), &curve(5, &["0", "1"])),
            Err(Error::ShapeMismatch(_))
        ));
        assert_eq!(Curve::from_series(vec![series(4, &["1", "1"])]), Err(Error::NonzeroConstantTerm));
    }
}
