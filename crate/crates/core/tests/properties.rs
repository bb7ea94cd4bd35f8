use proptest::prelude::*;

use formal_rings::catalog::{make_log, make_ring};
use formal_rings::curves::{curve_add, curve_mul, curve_neg, filtration_level, Curve};
use formal_rings::fring::{map_base, psi_scaled, verify_all};
use formal_rings::json::{tuple_from_json, tuple_to_json};
use formal_rings::witt::{ghost_map, ghosts_p_typical, ghosts_universal, gw_add, gw_mul, witt_laws_exact, WittVector};
use formal_rings::{Assignment, Coefficient, CoefficientRing, FormalGroup, FormalRing, Rational, Series, SeriesTuple};

const D: u32 = 6;

fn rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |r| !r.is_zero())
}

/// One-variable log `x + Σ c_k x^k` with a few random higher terms.
fn log_1d() -> impl Strategy<Value = SeriesTuple> {
    prop::collection::vec((2u32..=D, rational()), 0..4).prop_map(|terms| {
        let mut all = vec![(vec![1], Coefficient::Rational(Rational::one()))];
        all.extend(terms.into_iter().map(|(k, c)| (vec![k], Coefficient::Rational(c))));
        SeriesTuple::new(vec![Series::from_terms(1, D, CoefficientRing::Rational, all).unwrap()]).unwrap()
    })
}

fn curve(min: u32) -> impl Strategy<Value = Curve> {
    prop::collection::vec((min..=D + 1, rational()), 0..4).prop_map(|terms| {
        let terms = terms.into_iter().map(|(k, c)| (vec![k], Coefficient::Rational(c)));
        Curve::from_series(vec![Series::from_terms(1, D, CoefficientRing::Rational, terms).unwrap()]).unwrap()
    })
}

fn on_pair(t: &SeriesTuple, f: &SeriesTuple, g: &SeriesTuple) -> SeriesTuple {
    let fx = f.remap(2, &[0]).unwrap();
    let gy = g.remap(2, &[1]).unwrap();
    t.compose(&fx.concat(&gy).unwrap()).unwrap()
}

fn level(c: &Curve) -> u32 {
    filtration_level(c).unwrap_or(u32::MAX)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn rational_text_round_trip(r in rational()) {
        prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r);
    }

    #[test]
    fn series_product_commutes_and_distributes(a in log_1d(), b in log_1d(), c in log_1d()) {
        let (a, b, c) = (a.component(0), b.component(0), c.component(0));
        prop_assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
        prop_assert_eq!(a.mul(&b.add(c).unwrap()).unwrap(), a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap());
    }

    #[test]
    fn composition_is_associative(f in log_1d(), g in log_1d(), h in log_1d()) {
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_round_trip(g in log_1d()) {
        let inv = g.invert().unwrap();
        let id = SeriesTuple::identity(1, D, CoefficientRing::Rational);
        prop_assert_eq!(g.compose(&inv).unwrap(), id.clone());
        prop_assert_eq!(inv.compose(&g).unwrap(), id);
    }

    #[test]
    fn json_round_trip(g in log_1d()) {
        let ring = FormalRing::from_log(&g).unwrap();
        prop_assert_eq!(&tuple_from_json(&tuple_to_json(ring.psi())).unwrap(), ring.psi());
    }

    #[test]
    fn module_map_composes(g in log_1d(), a in nonzero_rational(), b in nonzero_rational()) {
        let grp = FormalGroup::from_log(&g).unwrap();
        let (ca, cb) = (Coefficient::Rational(a), Coefficient::Rational(b));
        let ab = &ca * &cb;
        let composed = grp.rho(&ca).unwrap().compose(&grp.rho(&cb).unwrap()).unwrap();
        prop_assert_eq!(composed, grp.rho(&ab).unwrap());
    }

    #[test]
    fn group_inverse_cancels(g in log_1d()) {
        let grp = FormalGroup::from_log(&g).unwrap();
        let chi = grp.inverse_series().unwrap();
        let id = SeriesTuple::identity(1, D, CoefficientRing::Rational);
        let sum = grp.law().compose(&id.concat(&chi).unwrap()).unwrap();
        prop_assert!(sum.component(0).is_zero());
    }

    #[test]
    fn rescaled_log_gives_same_group(g in log_1d(), c in nonzero_rational()) {
        let scaled = g.map(|s| Ok(s.scale_rational(&c))).unwrap();
        let (g1, g2) = (FormalGroup::from_log(&g).unwrap(), FormalGroup::from_log(&scaled).unwrap());
        prop_assert_eq!(g1.law(), g2.law());
    }

    #[test]
    fn scaled_products_are_rings(g in log_1d(), a in nonzero_rational()) {
        let base = FormalRing::from_log(&g).unwrap();
        let ca = Coefficient::Rational(a.clone());
        let scaled = psi_scaled(&g, &ca).unwrap();
        prop_assert!(verify_all(&scaled, D).unwrap().is_ok());
        prop_assert_eq!(scaled.phi(), base.phi());
        if !a.is_one() {
            prop_assert_ne!(scaled.psi(), base.psi());
        }
        // Ψ_a(x, y) = ρ_a(Ψ(x, y)) = Ψ(ρ_a(x), y)
        let rho = base.add_law().rho(&ca).unwrap();
        let id = SeriesTuple::identity(1, D, CoefficientRing::Rational);
        prop_assert_eq!(scaled.psi(), &rho.compose(base.psi()).unwrap());
        prop_assert_eq!(scaled.psi(), &on_pair(base.psi(), &rho, &id));
    }

    #[test]
    fn base_change_commutes_with_construction(q in rational()) {
        let mut a = Assignment::new();
        a.insert("q".into(), q);
        let symbolic = make_ring("t_q", &Assignment::new(), 5).unwrap();
        let direct = make_ring("t_q", &a, 5).unwrap();
        let changed = map_base(&a, &symbolic).unwrap();
        prop_assert_eq!(&changed, &direct);
        prop_assert_eq!(
            verify_all(&changed, 5).unwrap().is_ok(),
            verify_all(&symbolic, 5).unwrap().is_ok()
        );
    }

    #[test]
    fn curve_filtration(x in curve(1), y in curve(1), m in 1u32..=4) {
        let ring = make_ring("todd", &Assignment::new(), D).unwrap();
        let xm = curve_mul(&ring, &x, &Curve::from_series(vec![Series::var(1, 0, D, CoefficientRing::Rational).pow(m)]).unwrap()).unwrap();
        prop_assert!(level(&xm) >= level(&x).saturating_add(m));
        prop_assert!(level(&curve_add(&ring, &x, &y).unwrap()) >= level(&x).min(level(&y)));
        prop_assert!(level(&curve_mul(&ring, &x, &y).unwrap()) >= level(&x).saturating_add(level(&y)));
        prop_assert_eq!(level(&curve_neg(&ring, &x).unwrap()), level(&x));
    }

    #[test]
    fn scaled_curve_filtration(x in curve(2), y in curve(2), a in nonzero_rational()) {
        let log = make_log("euler", &Assignment::new(), D).unwrap();
        let ring = psi_scaled(&log, &Coefficient::Rational(a)).unwrap();
        prop_assert!(level(&curve_add(&ring, &x, &y).unwrap()) >= level(&x).min(level(&y)));
        prop_assert!(level(&curve_mul(&ring, &x, &y).unwrap()) >= level(&x).saturating_add(level(&y)));
    }

    #[test]
    fn ghost_map_is_a_ring_map(
        universal in any::<bool>(),
        a in prop::collection::vec(-20i64..=20, 3),
        b in prop::collection::vec(-20i64..=20, 3),
    ) {
        let fam = if universal { ghosts_universal(3).unwrap() } else { ghosts_p_typical(3, 3).unwrap() };
        let laws = witt_laws_exact(&fam).unwrap();
        let wa = WittVector::from_rationals(a.into_iter().map(Rational::from_integer).collect());
        let wb = WittVector::from_rationals(b.into_iter().map(Rational::from_integer).collect());
        let (ga, gb) = (ghost_map(&fam, &wa).unwrap(), ghost_map(&fam, &wb).unwrap());
        let gs = ghost_map(&fam, &gw_add(&laws, &wa, &wb).unwrap()).unwrap();
        let gp = ghost_map(&fam, &gw_mul(&laws, &wa, &wb).unwrap()).unwrap();
        for k in 0..3 {
            prop_assert_eq!(&gs[k], &(&ga[k] + &gb[k]));
            prop_assert_eq!(&gp[k], &(&ga[k] * &gb[k]));
        }
    }
}
