//! Named formal rings with reference coefficients.
//!
//! Each entry builds its logarithm symbolically over `Q[params]`; assigned
//! parameters are substituted, unassigned ones stay symbolic. The
//! two-dimensional entry needs concrete rational parameters.

use crate::error::{Error, Result};
use crate::fring::{psi_scaled, FormalRing};
use crate::mvps::{Series, SeriesTuple};
use crate::scalars::{binomial, factorial, Assignment, Coefficient, CoefficientRing, Rational};

/// A registry entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub dim: usize,
    /// Parameter names; `lazard` has `a1..a(D-1)`, listed here as `a1..`.
    pub params: &'static [&'static str],
    pub description: &'static str,
}

const ENTRIES: [CatalogEntry; 11] = [
    CatalogEntry { name: "additive", dim: 1, params: &[], description: "x + y, log x" },
    CatalogEntry {
        name: "multiplicative",
        dim: 1,
        params: &["alpha"],
        description: "x + y + alpha*x*y, log (1/alpha) log(1 + alpha x)",
    },
    CatalogEntry { name: "todd", dim: 1, params: &[], description: "x + y - x*y, log -log(1 - x)" },
    CatalogEntry { name: "c_genus", dim: 1, params: &[], description: "log x/(1 - x)" },
    CatalogEntry { name: "l_genus", dim: 1, params: &[], description: "log artanh(x)" },
    CatalogEntry {
        name: "t_q",
        dim: 1,
        params: &["q"],
        description: "(x + y + (q-1)xy)/(1 + q xy), log' = 1/((1 - x)(1 + q x))",
    },
    CatalogEntry { name: "euler", dim: 1, params: &[], description: "log integral of (1 - s^4)^(-1/2)" },
    CatalogEntry {
        name: "abel",
        dim: 1,
        params: &["a", "b"],
        description: "exp (e^(at) - e^(bt))/(a - b)",
    },
    CatalogEntry { name: "abel_degenerate", dim: 1, params: &["a"], description: "exp t e^(at)" },
    CatalogEntry {
        name: "lazard",
        dim: 1,
        params: &["a1.."],
        description: "log x + sum a_k x^(k+1)/(k+1), symbolic a_1..a_(D-1)",
    },
    CatalogEntry {
        name: "twodim_mult",
        dim: 2,
        params: &["a", "b"],
        description: "two-dimensional biparametric multiplicative law, defaults a=1, b=2",
    },
];

pub fn entries() -> &'static [CatalogEntry] {
    &ENTRIES
}

pub fn entry(name: &str) -> Result<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownRing(name.to_string()))
}

/// Which series of a ring a fixture refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Law {
    Log,
    Exp,
    Phi,
    Psi,
}

impl std::fmt::Display for Law {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Law::Log => "log",
            Law::Exp => "exp",
            Law::Phi => "phi",
            Law::Psi => "psi",
        })
    }
}

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Printed with the construction it belongs to.
    Published,
    /// Obtained independently from a closed form by series expansion.
    Derived,
    Trivial,
}

/// An expected coefficient, written in the entry's default coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub law: Law,
    pub component: usize,
    pub exponents: Vec<u32>,
    pub expected: &'static str,
    pub origin: Origin,
}

impl Fixture {
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

fn fx(law: Law, component: usize, exponents: &[u32], expected: &'static str, origin: Origin) -> Fixture {
    Fixture { law, component, exponents: exponents.to_vec(), expected, origin }
}

/// Reference coefficients for `name`; `twodim_mult` values are at `a=1, b=2`.
pub fn fixtures(name: &str) -> Result<Vec<Fixture>> {
    use Law::*;
    use Origin::*;
    let f = match entry(name)?.name {
        "additive" => vec![
            fx(Phi, 0, &[1, 0], "1", Trivial),
            fx(Phi, 0, &[1, 1], "0", Trivial),
            fx(Psi, 0, &[1, 1], "1", Trivial),
        ],
        "multiplicative" => vec![
            fx(Phi, 0, &[1, 1], "alpha", Published),
            fx(Phi, 0, &[2, 1], "0", Published),
            fx(Psi, 0, &[2, 1], "-1/2*alpha", Derived),
            fx(Log, 0, &[2], "-1/2*alpha", Published),
        ],
        "todd" => vec![
            fx(Phi, 0, &[1, 1], "-1", Published),
            fx(Phi, 0, &[2, 1], "0", Published),
            fx(Phi, 0, &[3, 3], "0", Published),
            fx(Psi, 0, &[2, 1], "1/2", Derived),
        ],
        "c_genus" => vec![
            fx(Phi, 0, &[1, 1], "-2", Derived),
            fx(Psi, 0, &[2, 1], "1", Derived),
            fx(Psi, 0, &[1, 2], "1", Derived),
            fx(Psi, 0, &[2, 2], "0", Derived),
            fx(Exp, 0, &[2], "-1", Published),
        ],
        "l_genus" => vec![
            fx(Phi, 0, &[2, 1], "-1", Derived),
            fx(Phi, 0, &[1, 1], "0", Derived),
            fx(Psi, 0, &[3, 1], "1/3", Derived),
            fx(Log, 0, &[3], "1/3", Published),
        ],
        "t_q" => vec![
            fx(Phi, 0, &[1, 1], "q - 1", Derived),
            fx(Phi, 0, &[2, 1], "-q", Derived),
            fx(Log, 0, &[2], "1/2 - 1/2*q", Derived),
        ],
        "euler" => vec![
            fx(Log, 0, &[1], "1", Published),
            fx(Log, 0, &[5], "1/10", Published),
            fx(Log, 0, &[9], "1/24", Published),
            fx(Log, 0, &[13], "5/208", Published),
            fx(Log, 0, &[17], "35/2176", Published),
            fx(Exp, 0, &[5], "-1/10", Published),
            fx(Exp, 0, &[9], "1/120", Published),
            fx(Exp, 0, &[13], "-11/15600", Published),
            fx(Exp, 0, &[17], "211/3536000", Published),
            fx(Psi, 0, &[1, 1], "1", Published),
            fx(Psi, 0, &[1, 5], "1/10", Published),
            fx(Psi, 0, &[5, 1], "1/10", Published),
            fx(Psi, 0, &[1, 9], "1/24", Published),
            fx(Psi, 0, &[9, 1], "1/24", Published),
            fx(Psi, 0, &[5, 5], "-9/100", Published),
            fx(Psi, 0, &[5, 9], "-11/240", Published),
            fx(Psi, 0, &[9, 5], "-11/240", Published),
            fx(Psi, 0, &[1, 13], "5/208", Published),
            fx(Psi, 0, &[13, 1], "5/208", Published),
            fx(Phi, 0, &[1, 4], "-1/2", Derived),
            fx(Phi, 0, &[4, 1], "-1/2", Derived),
            fx(Phi, 0, &[3, 2], "-1", Derived),
            fx(Phi, 0, &[2, 3], "-1", Derived),
        ],
        "abel" => vec![
            fx(Log, 0, &[2], "-1/2*a - 1/2*b", Published),
            fx(Log, 0, &[3], "1/3*a^2 + 5/6*a*b + 1/3*b^2", Published),
            fx(Psi, 0, &[1, 1], "1", Published),
            fx(Psi, 0, &[1, 2], "-1/2*a - 1/2*b", Published),
            fx(Psi, 0, &[2, 1], "-1/2*a - 1/2*b", Published),
            fx(Psi, 0, &[1, 3], "1/3*a^2 + 5/6*a*b + 1/3*b^2", Published),
            fx(Psi, 0, &[3, 1], "1/3*a^2 + 5/6*a*b + 1/3*b^2", Published),
            fx(Psi, 0, &[2, 2], "1/4*a^2 + 1/2*a*b + 1/4*b^2 + 1/2*a + 1/2*b", Published),
        ],
        "abel_degenerate" => vec![
            fx(Exp, 0, &[2], "a", Published),
            fx(Log, 0, &[2], "-a", Derived),
            fx(Log, 0, &[3], "3/2*a^2", Derived),
        ],
        "lazard" => vec![
            fx(Log, 0, &[2], "1/2*a1", Published),
            fx(Phi, 0, &[1, 1], "-a1", Derived),
            fx(Psi, 0, &[2, 1], "1/2*a1", Derived),
        ],
        "twodim_mult" => {
            // x1 x2 y1 y2
            vec![
                fx(Phi, 0, &[1, 0, 0, 0], "1", Published),
                fx(Phi, 0, &[0, 0, 1, 0], "1", Published),
                fx(Phi, 0, &[1, 0, 1, 0], "1", Published),
                fx(Phi, 0, &[1, 0, 0, 1], "2", Published),
                fx(Phi, 0, &[0, 1, 1, 0], "2", Published),
                fx(Phi, 0, &[0, 1, 0, 1], "1", Published),
                fx(Phi, 0, &[2, 0, 0, 0], "0", Published),
                fx(Phi, 1, &[0, 1, 0, 0], "1", Published),
                fx(Phi, 1, &[0, 0, 0, 1], "1", Published),
                fx(Phi, 1, &[1, 0, 1, 0], "2", Published),
                fx(Phi, 1, &[1, 0, 0, 1], "1", Published),
                fx(Phi, 1, &[0, 1, 1, 0], "1", Published),
                fx(Phi, 1, &[0, 1, 0, 1], "2", Published),
                fx(Phi, 1, &[0, 2, 0, 0], "0", Published),
                fx(Exp, 0, &[1, 0], "2", Published),
                fx(Exp, 1, &[0, 1], "2", Published),
            ]
        }
        _ => unreachable!("every entry has fixtures"),
    };
    Ok(f)
}

/// One fixture compared against a constructed ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureOutcome {
    pub fixture: Fixture,
    /// `None` when the fixture lies above the ring's precision.
    pub actual: Option<Coefficient>,
    pub expected: Coefficient,
}

impl FixtureOutcome {
    pub fn passed(&self) -> bool {
        self.actual.as_ref().is_none_or(|a| *a == self.expected)
    }
}

/// Compares every fixture of `name` that fits within the ring's precision.
pub fn check_fixtures(name: &str, ring: &FormalRing) -> Result<Vec<FixtureOutcome>> {
    let d = ring.trunc_degree();
    fixtures(name)?
        .into_iter()
        .map(|f| {
            let expected = ring.ring().parse(f.expected)?;
            let series = match f.law {
                Law::Log => ring.log().ok_or(Error::MissingLog)?,
                Law::Exp => ring.exp().ok_or(Error::MissingLog)?,
                Law::Phi => ring.phi(),
                Law::Psi => ring.psi(),
            };
            let actual = (f.degree() <= d).then(|| series.component(f.component).coefficient(&f.exponents));
            Ok(FixtureOutcome { fixture: f, actual, expected })
        })
        .collect()
}

/// The logarithm of catalog entry `name` at precision `degree`.
pub fn make_log(name: &str, params: &Assignment, degree: u32) -> Result<SeriesTuple> {
    let e = entry(name)?;
    if degree == 0 {
        return Err(Error::InvalidParameter("truncation degree must be positive".into()));
    }
    if e.name == "twodim_mult" {
        return twodim_log(params, degree);
    }
    let declared: Vec<String> = match e.name {
        "lazard" => (1..degree).map(|k| format!("a{k}")).collect(),
        _ => e.params.iter().map(|s| s.to_string()).collect(),
    };
    for p in params.keys() {
        if !declared.contains(p) {
            return Err(Error::UnknownParameter(p.clone()));
        }
    }
    if e.name == "multiplicative" && params.get("alpha").is_some_and(Rational::is_zero) {
        return Err(Error::InvalidParameter("alpha must be nonzero".into()));
    }
    let symbolic = CoefficientRing::polynomial(&declared);
    let log = symbolic_log(e.name, &symbolic, degree)?;
    let remaining: Vec<&String> = declared.iter().filter(|p| !params.contains_key(*p)).collect();
    let target = CoefficientRing::polynomial(&remaining);
    if target == symbolic {
        return Ok(log);
    }
    log.map(|s| s.map_coefficients(&target, |c| c.substitute(params, &target)))
}

/// `make_log` followed by the ring construction.
pub fn make_ring(name: &str, params: &Assignment, degree: u32) -> Result<FormalRing> {
    FormalRing::from_log(&make_log(name, params, degree)?)
}

fn one_var(d: u32, ring: &CoefficientRing, coeff: impl Fn(u32) -> Result<Coefficient>) -> Result<SeriesTuple> {
    let coeffs = (0..=d).map(|k| if k == 0 { Ok(ring.zero()) } else { coeff(k) }).collect::<Result<Vec<_>>>()?;
    SeriesTuple::new(vec![Series::univariate(d, ring.clone(), coeffs)?])
}

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n, d).expect("nonzero denominator")
}

fn symbolic_log(name: &str, ring: &CoefficientRing, d: u32) -> Result<SeriesTuple> {
    let r = |x: Rational| ring.from_rational(x);
    match name {
        "additive" => one_var(d, ring, |k| Ok(if k == 1 { ring.one() } else { ring.zero() })),
        "multiplicative" => {
            // Σ (−1)^{k+1} α^{k−1} x^k / k
            let alpha = ring.param("alpha")?;
            one_var(d, ring, |k| {
                let sign = if k % 2 == 1 { 1 } else { -1 };
                Ok(alpha.pow(k - 1).scale(&ratio(sign, i64::from(k))))
            })
        }
        "todd" => one_var(d, ring, |k| Ok(r(ratio(1, i64::from(k))))),
        "c_genus" => one_var(d, ring, |_| Ok(ring.one())),
        "l_genus" => one_var(d, ring, |k| Ok(if k % 2 == 1 { r(ratio(1, i64::from(k))) } else { ring.zero() })),
        "t_q" => {
            // x^k / k · Σ_{j<k} (−q)^j
            let minus_q = -&ring.param("q")?;
            one_var(d, ring, |k| {
                let mut sum = ring.zero();
                for j in 0..k {
                    sum = &sum + &minus_q.pow(j);
                }
                Ok(sum.scale(&ratio(1, i64::from(k))))
            })
        }
        "euler" => one_var(d, ring, |k| {
            if k % 4 != 1 {
                return Ok(ring.zero());
            }
            let j = u64::from(k / 4);
            let num = binomial(2 * j, j);
            let den = num_bigint::BigInt::from(4u32).pow(j as u32) * (4 * j + 1);
            Ok(r(Rational::new(num, den)?))
        }),
        "abel" => {
            // exponential Σ h_{m−1}(a, b) t^m / m!
            let (a, b) = (ring.param("a")?, ring.param("b")?);
            let exp = one_var(d, ring, |m| {
                let mut h = ring.zero();
                for i in 0..m {
                    h = &h + &(&a.pow(i) * &b.pow(m - 1 - i));
                }
                Ok(h.scale(&Rational::new(1, factorial(u64::from(m)))?))
            })?;
            exp.invert()
        }
        "abel_degenerate" => {
            // exponential Σ a^{m−1} t^m / (m−1)!
            let a = ring.param("a")?;
            let exp = one_var(d, ring, |m| Ok(a.pow(m - 1).scale(&Rational::new(1, factorial(u64::from(m - 1)))?)))?;
            exp.invert()
        }
        "lazard" => one_var(d, ring, |k| {
            if k == 1 {
                Ok(ring.one())
            } else {
                Ok(ring.param(&format!("a{}", k - 1))?.scale(&ratio(1, i64::from(k))))
            }
        }),
        _ => Err(Error::UnknownRing(name.to_string())),
    }
}

/// `(a, b)` for the two-dimensional entry, defaulting to `(1, 2)`.
pub fn twodim_params(params: &Assignment) -> Result<(Rational, Rational)> {
    for p in params.keys() {
        if p != "a" && p != "b" {
            return Err(Error::UnknownParameter(p.clone()));
        }
    }
    let a = params.get("a").cloned().unwrap_or_else(|| Rational::from_integer(1));
    let b = params.get("b").cloned().unwrap_or_else(|| Rational::from_integer(2));
    if a.is_zero() || b.is_zero() || (&a + &b).is_zero() || (&a - &b).is_zero() {
        return Err(Error::InvalidParameter(format!("need a, b, a+b, a-b all nonzero; got a={a}, b={b}")));
    }
    Ok((a, b))
}

/// `Σ_{m≥1} c^{m−1} u^m / m!`, i.e. `(e^{cu} − 1)/c`, as a one-variable series.
fn exp_minus_one_over(c: &Rational, d: u32) -> Result<Series> {
    let coeffs = (0..=d)
        .map(|m| {
            if m == 0 {
                Ok(Coefficient::Rational(Rational::zero()))
            } else {
                Ok(Coefficient::Rational(c.pow(m - 1).checked_div(&Rational::from_integer(factorial(u64::from(m))))?))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Series::univariate(d, CoefficientRing::Rational, coeffs)
}

/// The group exponential of the two-dimensional law:
/// `E(t1+t2) ± F(t1−t2)` with `E(u) = (e^{2(a+b)u} − 1)/(2(a+b))` and
/// `F(v) = (e^{2(a−b)v} − 1)/(2(a−b))`.
pub fn twodim_exp(a: &Rational, b: &Rational, d: u32) -> Result<SeriesTuple> {
    let q = CoefficientRing::Rational;
    let two = Rational::from_integer(2);
    let t1 = Series::var(2, 0, d, q.clone());
    let t2 = Series::var(2, 1, d, q.clone());
    let u = SeriesTuple::new(vec![t1.add(&t2)?])?;
    let v = SeriesTuple::new(vec![t1.sub(&t2)?])?;
    let e = exp_minus_one_over(&(&two * &(a + b)), d)?.compose(&u)?;
    let f = exp_minus_one_over(&(&two * &(a - b)), d)?.compose(&v)?;
    SeriesTuple::new(vec![e.add(&f)?, e.sub(&f)?])
}

fn twodim_log(params: &Assignment, d: u32) -> Result<SeriesTuple> {
    let (a, b) = twodim_params(params)?;
    twodim_exp(&a, &b, d)?.invert()
}

/// The closed-form two-dimensional law
/// `Φ_1 = x1 + y1 + a x1y1 + b(x1y2 + x2y1) + a x2y2`,
/// `Φ_2 = x2 + y2 + b x1y1 + a(x1y2 + x2y1) + b x2y2`.
pub fn twodim_closed_law(a: &Rational, b: &Rational, d: u32) -> Result<SeriesTuple> {
    let q = CoefficientRing::Rational;
    let c = |r: &Rational| Coefficient::Rational(r.clone());
    let one = Rational::one();
    let mk = |lin: [Vec<u32>; 2], diag: &Rational, cross: &Rational| {
        Series::from_terms(
            4,
            d,
            q.clone(),
            vec![
                (lin[0].clone(), c(&one)),
                (lin[1].clone(), c(&one)),
                (vec![1, 0, 1, 0], c(diag)),
                (vec![1, 0, 0, 1], c(cross)),
                (vec![0, 1, 1, 0], c(cross)),
                (vec![0, 1, 0, 1], c(diag)),
            ],
        )
    };
    SeriesTuple::new(vec![
        mk([vec![1, 0, 0, 0], vec![0, 0, 1, 0]], a, b)?,
        mk([vec![0, 1, 0, 0], vec![0, 0, 0, 1]], b, a)?,
    ])
}

/// `log(1 + z)` for a series `z` without constant term.
fn log1p(z: &Series) -> Result<Series> {
    let d = z.trunc_degree();
    let coeffs = (0..=d)
        .map(|k| {
            let v = if k == 0 { Rational::zero() } else { ratio(if k % 2 == 1 { 1 } else { -1 }, i64::from(k)) };
            Coefficient::Rational(v)
        })
        .collect();
    Series::univariate(d, CoefficientRing::Rational, coeffs)?.compose(&SeriesTuple::new(vec![z.clone()])?)
}

/// `exp(z)` for a series `z` without constant term.
fn exp(z: &Series) -> Result<Series> {
    let d = z.trunc_degree();
    let coeffs = (0..=d)
        .map(|k| Ok(Coefficient::Rational(Rational::new(1, factorial(u64::from(k)))?)))
        .collect::<Result<Vec<_>>>()?;
    Series::univariate(d, CoefficientRing::Rational, coeffs)?.compose(&SeriesTuple::new(vec![z.clone()])?)
}

/// The published closed-form multiplication for the two-dimensional law,
/// `Ψ_1 = ψ + φ`, `Ψ_2 = ψ − φ`, expanded term by term as written:
///
/// `ψ = (1/a)·exp(a·L_b(x)·L_b(y)/(2b²))·exp((L_a(x) + L_a(y))/(2a)) − 1/a`,
/// `φ = (1/b)·exp(L_a(x)·L_b(y)/(2a))·exp((L_b(x) + L_a(y))/(2a)) − 1/b`,
///
/// where `L_a(x) = log(1 + a(x1+x2)/2)` and `L_b(x) = log(1 + b(x1−x2)/2)`.
pub fn twodim_closed_product(a: &Rational, b: &Rational, d: u32) -> Result<SeriesTuple> {
    let q = CoefficientRing::Rational;
    let var = |i| Series::var(4, i, d, q.clone());
    let half = ratio(1, 2);
    let la = |i: usize, j: usize| log1p(&var(i).add(&var(j))?.scale_rational(&(a * &half)));
    let lb = |i: usize, j: usize| log1p(&var(i).sub(&var(j))?.scale_rational(&(b * &half)));
    let (lax, lay, lbx, lby) = (la(0, 1)?, la(2, 3)?, lb(0, 1)?, lb(2, 3)?);
    let two_a = Rational::from_integer(2) * a.clone();
    let two_b2 = Rational::from_integer(2) * b.pow(2);
    let inv = |r: &Rational| Rational::one().checked_div(r);

    let one = Series::constant(4, d, Coefficient::Rational(Rational::one()));
    let psi = exp(&lbx.mul(&lby)?.scale_rational(&a.checked_div(&two_b2)?))?
        .mul(&exp(&lax.add(&lay)?.scale_rational(&inv(&two_a)?))?)?
        .sub(&one)?
        .scale_rational(&inv(a)?);
    let phi = exp(&lax.mul(&lby)?.scale_rational(&inv(&two_a)?))?
        .mul(&exp(&lbx.add(&lay)?.scale_rational(&inv(&two_a)?))?)?
        .sub(&one)?
        .scale_rational(&inv(b)?);
    SeriesTuple::new(vec![psi.add(&phi)?, psi.sub(&phi)?])
}

/// How the published closed-form product relates to the one built from the
/// logarithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormComparison {
    /// Number of coefficients where the closed form and `Ψ` differ.
    pub differences: usize,
    /// First differing coefficient: component, exponents, closed form, `Ψ`.
    pub first: Option<(usize, Vec<u32>, Coefficient, Coefficient)>,
    /// Whether the closed form satisfies `Ψ(x, 0) = 0`.
    pub vanishes_on_zero: bool,
    /// A scale `c` with `Ψ_c` equal to the closed form, when one exists.
    pub matching_scale: Option<Coefficient>,
}

/// Expands the closed-form product at `(a, b)` and compares it with the
/// multiplication built from the inverted exponential.
pub fn compare_twodim_closed_form(a: &Rational, b: &Rational, d: u32) -> Result<ClosedFormComparison> {
    let mut params = Assignment::new();
    params.insert("a".into(), a.clone());
    params.insert("b".into(), b.clone());
    let log = twodim_log(&params, d)?;
    let ring = FormalRing::from_log(&log)?;
    let closed = twodim_closed_product(a, b, d)?;
    let diffs = closed.differences(ring.psi());

    let q = CoefficientRing::Rational;
    let zero = Series::zero(2, d, q.clone());
    let x0 = SeriesTuple::identity(2, d, q.clone()).concat(&SeriesTuple::new(vec![zero.clone(), zero.clone()])?)?;
    let on_zero = closed.compose(&x0)?;
    let vanishes_on_zero = on_zero.components().iter().all(Series::is_zero);

    // Ψ_c has leading term c·(Ψ's leading term); try the ratio of x1y1 coefficients.
    let lead = [1, 0, 1, 0];
    let ours = ring.psi().component(0).coefficient(&lead);
    let theirs = closed.component(0).coefficient(&lead);
    let matching_scale = if ours.is_zero() {
        None
    } else {
        let c = theirs.div_exact(&ours)?;
        (!c.is_zero() && psi_scaled(&log, &c)?.psi() == &closed).then_some(c)
    };
    Ok(ClosedFormComparison {
        differences: diffs.len(),
        first: diffs.into_iter().next(),
        vanishes_on_zero,
        matching_scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fring::map_base;

    fn q(s: &str) -> Coefficient {
        Coefficient::Rational(s.parse().unwrap())
    }

    fn no_params() -> Assignment {
        Assignment::new()
    }

    fn params(kv: &[(&str, &str)]) -> Assignment {
        kv.iter().map(|(k, v)| (k.to_string(), v.parse().unwrap())).collect()
    }

    #[test]
    fn registry() {
        assert_eq!(entries().len(), 11);
        assert!(matches!(entry("nope"), Err(Error::UnknownRing(_))));
        assert!(matches!(fixtures("nope"), Err(Error::UnknownRing(_))));
        for e in entries() {
            assert!(!fixtures(e.name).unwrap().is_empty());
        }
        let euler = fixtures("euler").unwrap();
        assert!(euler.iter().any(|f| f.law == Law::Psi && f.exponents == [5, 5] && f.expected == "-9/100"));
        let add = fixtures("additive").unwrap();
        assert!(add.iter().any(|f| f.law == Law::Psi && f.exponents == [1, 1] && f.expected == "1"));
    }

    #[test]
    fn todd_law_is_polynomial() {
        let r = make_ring("todd", &no_params(), 8).unwrap();
        let expected = Series::from_terms(
            2,
            8,
            CoefficientRing::Rational,
            vec![(vec![1, 0], q("1")), (vec![0, 1], q("1")), (vec![1, 1], q("-1"))],
        )
        .unwrap();
        assert_eq!(r.phi().component(0), &expected);
    }

    #[test]
    fn c_genus_product_degree_three() {
        let r = make_ring("c_genus", &no_params(), 6).unwrap();
        let part = r.psi().component(0).homogeneous_part(3);
        let expected =
            Series::from_terms(2, 6, CoefficientRing::Rational, vec![(vec![2, 1], q("1")), (vec![1, 2], q("1"))]).unwrap();
        assert_eq!(part, expected);
    }

    #[test]
    fn abel_log_low_terms() {
        let log = make_log("abel", &no_params(), 3).unwrap();
        let ring = CoefficientRing::polynomial(&["a", "b"]);
        let expected = Series::univariate(
            3,
            ring.clone(),
            vec![
                ring.zero(),
                ring.one(),
                ring.parse("-1/2*a - 1/2*b").unwrap(),
                ring.parse("1/3*a^2 + 5/6*a*b + 1/3*b^2").unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(log.component(0), &expected);
    }

    #[test]
    fn fixtures_hold() {
        for (name, d) in [
            ("additive", 4),
            ("multiplicative", 5),
            ("todd", 6),
            ("c_genus", 5),
            ("l_genus", 5),
            ("t_q", 4),
            ("abel", 4),
            ("abel_degenerate", 4),
            ("lazard", 4),
            ("twodim_mult", 3),
        ] {
            let r = make_ring(name, &no_params(), d).unwrap();
            for o in check_fixtures(name, &r).unwrap() {
                assert!(o.actual.is_some(), "{name}: {:?} beyond D={d}", o.fixture);
                assert!(o.passed(), "{name}: {:?} got {:?}", o.fixture, o.actual);
            }
        }
    }

    #[test]
    fn parameters_are_substituted() {
        let r = make_ring("multiplicative", &params(&[("alpha", "-1")]), 6).unwrap();
        assert_eq!(r, make_ring("todd", &no_params(), 6).unwrap());
        assert!(matches!(
            make_ring("multiplicative", &params(&[("alpha", "0")]), 4),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(make_ring("todd", &params(&[("z", "1")]), 4), Err(Error::UnknownParameter(_))));

        let partial = make_log("abel", &params(&[("a", "0")]), 4).unwrap();
        assert_eq!(partial.ring(), &CoefficientRing::polynomial(&["b"]));
    }

    #[test]
    fn t_q_degenerations() {
        let tq = make_ring("t_q", &no_params(), 6).unwrap();
        for (value, name) in [("-1", "c_genus"), ("0", "todd"), ("1", "l_genus")] {
            let r = map_base(&params(&[("q", value)]), &tq).unwrap();
            let target = make_ring(name, &no_params(), 6).unwrap();
            assert_eq!(r.phi(), target.phi(), "{name}");
            assert_eq!(r.psi(), target.psi(), "{name}");
        }
        let abel = make_ring("abel", &no_params(), 5).unwrap();
        let flat = map_base(&params(&[("a", "0"), ("b", "0")]), &abel).unwrap();
        assert_eq!(flat, make_ring("additive", &no_params(), 5).unwrap());
    }

    #[test]
    fn twodim_defaults_and_validation() {
        assert_eq!(twodim_params(&no_params()).unwrap(), (Rational::from_integer(1), Rational::from_integer(2)));
        for bad in [[("a", "1"), ("b", "1")], [("a", "1"), ("b", "-1")], [("a", "0"), ("b", "2")]] {
            assert!(matches!(twodim_params(&params(&bad)), Err(Error::InvalidParameter(_))));
        }
        let log = make_log("twodim_mult", &no_params(), 4).unwrap();
        let lin = log.linear_part();
        assert_eq!(lin, vec![vec![q("1/2"), q("0")], vec![q("0"), q("1/2")]]);
    }

    #[test]
    fn twodim_law_matches_closed_form() {
        let (a, b) = (Rational::from_integer(1), Rational::from_integer(2));
        let r = make_ring("twodim_mult", &no_params(), 5).unwrap();
        assert_eq!(r.phi(), &twodim_closed_law(&a, &b, 5).unwrap());
        let (a, b) = (ratio(3, 2), ratio(-1, 3));
        let r = make_ring("twodim_mult", &params(&[("a", "3/2"), ("b", "-1/3")]), 4).unwrap();
        assert_eq!(r.phi(), &twodim_closed_law(&a, &b, 4).unwrap());
    }

    #[test]
    fn twodim_closed_form_product_is_not_a_ring_product() {
        let c = compare_twodim_closed_form(&Rational::from_integer(1), &Rational::from_integer(2), 4).unwrap();
        assert!(!c.vanishes_on_zero);
        assert!(c.differences > 0);
        assert_eq!(c.matching_scale, None);
    }

    fn bivariate(d: u32, ring: &CoefficientRing, terms: &[(&[u32], &str)]) -> Series {
        let terms: Vec<_> = terms.iter().map(|(e, c)| (e.to_vec(), ring.parse(c).unwrap())).collect();
        Series::from_terms(2, d, ring.clone(), terms).unwrap()
    }

    // Φ·den = num for the rational closed forms.
    fn check_rational_law(name: &str, d: u32, num: &[(&[u32], &str)], den: &[(&[u32], &str)]) {
        let r = make_ring(name, &no_params(), d).unwrap();
        let ring = r.ring().clone();
        let lhs = r.phi().component(0).mul(&bivariate(d, &ring, den)).unwrap();
        assert_eq!(lhs, bivariate(d, &ring, num), "{name}");
    }

    #[test]
    fn rational_closed_forms() {
        check_rational_law(
            "c_genus",
            7,
            &[(&[1, 0], "1"), (&[0, 1], "1"), (&[1, 1], "-2")],
            &[(&[0, 0], "1"), (&[1, 1], "-1")],
        );
        check_rational_law("l_genus", 7, &[(&[1, 0], "1"), (&[0, 1], "1")], &[(&[0, 0], "1"), (&[1, 1], "1")]);
        check_rational_law(
            "t_q",
            6,
            &[(&[1, 0], "1"), (&[0, 1], "1"), (&[1, 1], "q - 1")],
            &[(&[0, 0], "1"), (&[1, 1], "q")],
        );
    }

    #[test]
    fn euler_addition_formula() {
        // Φ·(1 + x²y²) = x·sqrt(1 − y⁴) + y·sqrt(1 − x⁴)
        let d = 9;
        let r = make_ring("euler", &no_params(), d).unwrap();
        let ring = CoefficientRing::Rational;
        // sqrt(1 − s) = Σ −C(2k,k)/((2k−1)4^k) s^k
        let sqrt_coeffs: Vec<Coefficient> = (0..=d / 4)
            .map(|k| {
                let k = u64::from(k);
                let num = -binomial(2 * k, k);
                let den = num_bigint::BigInt::from(4u32).pow(k as u32) * (2 * i64::try_from(k).unwrap() - 1);
                Coefficient::Rational(Rational::new(num, den).unwrap())
            })
            .collect();
        let root = |i: usize| {
            let mut acc = Series::zero(2, d, ring.clone());
            let fourth = Series::var(2, i, d, ring.clone()).pow(4);
            for (k, c) in sqrt_coeffs.iter().enumerate() {
                acc = acc.add(&fourth.pow(k as u32).scale(c).unwrap()).unwrap();
            }
            acc
        };
        let x = Series::var(2, 0, d, ring.clone());
        let y = Series::var(2, 1, d, ring.clone());
        let rhs = x.mul(&root(1)).unwrap().add(&y.mul(&root(0)).unwrap()).unwrap();
        let den = bivariate(d, &ring, &[(&[0, 0], "1"), (&[2, 2], "1")]);
        assert_eq!(r.phi().component(0).mul(&den).unwrap(), rhs);
        let quintic = bivariate(d, &ring, &[(&[1, 4], "-1/2"), (&[4, 1], "-1/2"), (&[3, 2], "-1"), (&[2, 3], "-1")]);
        assert_eq!(r.phi().component(0).homogeneous_part(5), quintic);
    }

    #[test]
    fn euler_fixtures_to_degree_seventeen() {
        let r = make_ring("euler", &no_params(), 17).unwrap();
        let outcomes = check_fixtures("euler", &r).unwrap();
        assert!(outcomes.iter().all(|o| o.actual.is_some() && o.passed()), "{outcomes:?}");
    }
}
