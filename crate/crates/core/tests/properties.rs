use num_traits::{Signed, Zero};
use proptest::prelude::*;

use kstab::analysis::{analyze, AnalysisOptions, AnalysisReport};
use kstab::cone::ReebVector;
use kstab::families::{make_family, FamilyInstance, FamilyKind};
use kstab::futaki::{futaki_invariant, make_test_configuration, Sign};
use kstab::gauge::{normalize_direction, normalize_reeb, ratio_derivative};
use kstab::index_character::build_index_character;
use kstab::pdivisor::{bp_presentation, cokernel_and_splitting, integral_shift, is_integral, relations_hold, PDivisorPresentation};
use kstab::rational::{int, rat, to_f64, Rational};
use kstab::volume::{build_slice, minimize_volume_exact_1d, minimize_volume_numeric, volume, Exactness};

fn arb_kind() -> impl Strategy<Value = FamilyKind> {
    prop_oneof![
        Just(FamilyKind::BrieskornPham),
        Just(FamilyKind::YauYuII),
        Just(FamilyKind::YauYuIII),
    ]
}

fn arb_family() -> impl Strategy<Value = FamilyInstance> {
    (arb_kind(), 2i64..10, 2i64..10)
        .prop_filter_map("parameters out of range", |(k, p, q)| make_family(k, p, q).ok())
}

fn arb_positive() -> impl Strategy<Value = Rational> {
    (1i64..30, 1i64..10).prop_map(|(n, d)| rat(n, d))
}

/// Reeb field of `fam` perturbed by a small torus element.
fn arb_reeb(fam: &FamilyInstance) -> impl Strategy<Value = ReebVector> {
    let base = fam.reference_reeb();
    (-6i64..6, -6i64..6, 1i64..5).prop_map(move |(a, b, d)| base.add(&ReebVector::new(vec![rat(a, d), rat(b, d)])))
}

fn family_and_reeb() -> impl Strategy<Value = (FamilyInstance, ReebVector)> {
    arb_family()
        .prop_flat_map(|f| {
            let xi = arb_reeb(&f);
            (Just(f), xi)
        })
        .prop_filter("outside the Reeb cone", |(f, xi)| f.variety.reeb_cone_contains(xi))
}

fn ratio(f: &FamilyInstance, xi: &ReebVector) -> Rational {
    build_index_character(&f.variety, xi, None).unwrap().laurent_coefficients().unwrap().ratio()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weights_are_linear((f, x1) in family_and_reeb(), (a, b) in (-5i64..5, -5i64..5), c in arb_positive()) {
        let v = &f.variety;
        let x2 = ReebVector::new(vec![int(a), int(b)]);
        let sum = x1.add(&x2.scaled(&c));
        let lhs = v.coordinate_weights(&sum);
        let w1 = v.coordinate_weights(&x1);
        let w2 = v.coordinate_weights(&x2);
        for i in 0..lhs.len() {
            prop_assert_eq!(&lhs[i], &(&w1[i] + &c * &w2[i]));
        }
        prop_assert_eq!(v.degree(&sum).unwrap(), v.degree(&x1).unwrap() + &c * v.degree(&x2).unwrap());
        prop_assert_eq!(v.canonical_weight(&sum), v.canonical_weight(&x1) + &c * v.canonical_weight(&x2));
    }

    #[test]
    fn reeb_cone_is_a_cone((f, xi) in family_and_reeb(), c in arb_positive()) {
        prop_assert!(f.variety.reeb_cone_contains(&xi.scaled(&c)));
    }

    #[test]
    fn laurent_homogeneity((f, xi) in family_and_reeb(), c in arb_positive()) {
        let n = f.variety.dim() as i32;
        let a0 = volume(&f.variety, &xi).unwrap();
        let a0c = volume(&f.variety, &xi.scaled(&c)).unwrap();
        prop_assert_eq!(a0c, a0 * num_traits::pow::pow(c.recip(), n as usize));
        prop_assert_eq!(ratio(&f, &xi.scaled(&c)), &c * ratio(&f, &xi));
    }

    #[test]
    fn bridge_identity((f, xi) in family_and_reeb()) {
        let n = f.variety.dim() as i64;
        let ell = f.variety.canonical_weight(&xi);
        prop_assert_eq!(ratio(&f, &xi), ell * int(n - 1) / int(2));
    }

    #[test]
    fn ratfuns_restrict_to_coefficients((f, xi) in family_and_reeb(), (a, b) in (-4i64..4, -4i64..4)) {
        let v = &f.variety;
        let w = v.coordinate_weights(&ReebVector::new(vec![int(a), int(b)]));
        let ch = build_index_character(v, &xi, Some(&w)).unwrap();
        let rf = ch.laurent_ratfuns().unwrap();
        let ld = ch.laurent_coefficients().unwrap();
        let (a0, da0) = rf.a0.eval_and_derivative_at_zero().unwrap();
        prop_assert_eq!(&a0, &ld.a0);
        prop_assert_eq!(rf.a1.eval(&Rational::zero()).unwrap(), ld.a1);
        // exact evaluation at s = +-h, against the deformed field
        let h = rat(1, 1_000_000);
        let at = |s: &Rational| {
            volume(v, &xi.add(&ReebVector::new(vec![int(a) * s, int(b) * s]))).unwrap()
        };
        let fd = (at(&h) - at(&-h.clone())) / (int(2) * &h);
        let err = (fd - &da0).abs();
        prop_assert!(err <= rat(1, 10_000) * (da0.abs() + int(1)), "a0' = {}, error {}", da0, err);
    }

    #[test]
    fn normalization_is_scale_free((f, xi) in family_and_reeb(), c in arb_positive()) {
        let a = normalize_reeb(&f.variety, &xi).unwrap();
        let b = normalize_reeb(&f.variety, &xi.scaled(&c)).unwrap();
        prop_assert_eq!(&a.xi, &b.xi);
        prop_assert_eq!(normalize_reeb(&f.variety, &a.xi).unwrap().scale, int(1));
        prop_assert_eq!(f.variety.canonical_weight(&a.xi), int(f.variety.dim() as i64));
    }

    #[test]
    fn direction_projection_is_idempotent((f, xi) in family_and_reeb(), (a, b) in (-4i64..5, -4i64..5)) {
        let nr = normalize_reeb(&f.variety, &xi).unwrap();
        let w = f.variety.coordinate_weights(&ReebVector::new(vec![int(a), int(b)]));
        let once = normalize_direction(&f.variety, &nr, &w).unwrap();
        prop_assert!(ratio_derivative(&f.variety, &nr.xi, &once.w).unwrap().is_zero());
        let twice = normalize_direction(&f.variety, &nr, &once.w).unwrap();
        prop_assert_eq!(twice.w, once.w);
    }

    #[test]
    fn volume_is_convex_on_the_slice(f in arb_family(), (i, j, k) in (1i64..40, 1i64..40, 1i64..8)) {
        let v = &f.variety;
        let slice = build_slice(v).unwrap();
        let (lo, hi) = slice.interval().unwrap();
        let (lo, hi) = (lo.unwrap(), hi.unwrap());
        let at = |x: Rational| &lo + (&hi - &lo) * x;
        let (a, b) = (at(rat(i, 41)), at(rat(j, 41)));
        let h = rat(1, 41 * 8) * int(k) * (&hi - &lo);
        let m = (&a + &b) / int(2);
        let d = (&b - &a).abs() / int(2);
        let d = if d < h { d } else { h };
        let vol = |u: Rational| volume(v, &slice.point(&[u])).unwrap();
        prop_assume!(d > Rational::zero());
        let second = vol(&m + &d) + vol(&m - &d) - int(2) * vol(m.clone());
        prop_assert!(second >= Rational::zero());
    }

    #[test]
    fn futaki_scales_with_the_degeneration(f in arb_family(), k in 1i64..6, which in 0usize..2) {
        let r = analyze(&f, &AnalysisOptions::default()).unwrap();
        let nr = normalize_reeb(&f.variety, &r.xi_star).unwrap();
        let w: Vec<i64> = f.degenerations[which].iter().map(|x| x * k).collect();
        let tc = make_test_configuration(&f.variety, &w, false).unwrap();
        let fut = futaki_invariant(&tc, &nr).unwrap();
        prop_assert_eq!(&fut.fut, &(int(k) * &r.futaki[which].fut));
        prop_assert_eq!(fut.sign, r.futaki[which].sign);
        prop_assert_eq!(&fut.fut, &fut.fut_via_volume);
    }

    #[test]
    fn bp_presentations_are_consistent(p in 2i64..15, q in 2i64..15) {
        prop_assume!(p.max(q) > 2);
        let classical = bp_presentation(p, q).unwrap();
        prop_assert!(relations_hold(&classical.data));
        let canonical = PDivisorPresentation::build(cokernel_and_splitting(&classical.data.f).unwrap(), |_| 1).unwrap();
        prop_assert!(relations_hold(&canonical.data));
        prop_assert_eq!(&canonical.tail_cone, &classical.tail_cone);
        for r in &classical.rays {
            let other = canonical.rays.iter().find(|c| c.ray.coordinates == r.ray.coordinates).unwrap();
            let shift = integral_shift(&r.psi, &other.psi);
            prop_assert!(shift.as_deref().is_some_and(is_integral));
        }
        prop_assert!(classical.slopes.count_nontrivial_bound <= 2);
    }
}

fn reports(kind: FamilyKind, p: i64, q: i64) -> AnalysisReport {
    analyze(&make_family(kind, p, q).unwrap(), &AnalysisOptions::default()).unwrap()
}

#[test]
fn trivial_and_product_degenerations_have_zero_futaki() {
    for (kind, p, q) in [(FamilyKind::BrieskornPham, 5, 3), (FamilyKind::YauYuII, 5, 4), (FamilyKind::YauYuIII, 4, 3)] {
        let f = make_family(kind, p, q).unwrap();
        let r = reports(kind, p, q);
        let nr = normalize_reeb(&f.variety, &r.xi_star).unwrap();
        let zero = make_test_configuration(&f.variety, &[0, 0, 0, 0], false).unwrap();
        assert!(futaki_invariant(&zero, &nr).unwrap().fut.is_zero());
        if r.exactness != Exactness::Exact {
            continue;
        }
        let slice = build_slice(&f.variety).unwrap();
        for d in &slice.directions {
            let w: Vec<i64> = f
                .variety
                .coordinate_weights(d)
                .iter()
                .map(|x| x.to_integer().try_into().unwrap())
                .collect();
            let tc = make_test_configuration(&f.variety, &w, false).unwrap();
            assert!(tc.product);
            let fut = futaki_invariant(&tc, &nr).unwrap();
            assert_eq!(fut.sign, Sign::Zero, "{kind}({p},{q}) along {d}");
        }
    }
}

#[test]
fn exact_and_numeric_minimizers_agree() {
    for kind in FamilyKind::ALL {
        for p in 2..=12 {
            for q in 2..=12 {
                let Ok(f) = make_family(kind, p, q) else { continue };
                let slice = build_slice(&f.variety).unwrap();
                let exact = minimize_volume_exact_1d(&f.variety, &slice).unwrap();
                let numeric = minimize_volume_numeric(&f.variety, &slice, 1e-12).unwrap();
                for (x, y) in exact.xi_star.coords().iter().zip(numeric.xi_star.coords()) {
                    assert!((to_f64(x) - to_f64(y)).abs() < 1e-8, "{kind}({p},{q})");
                }
            }
        }
    }
}

#[test]
fn bp_is_symmetric() {
    for p in 2..=9 {
        for q in p + 1..=9 {
            let a = reports(FamilyKind::BrieskornPham, p, q);
            let b = reports(FamilyKind::BrieskornPham, q, p);
            assert_eq!(a.volume, b.volume);
            assert_eq!(a.verdict.is_stable(), b.verdict.is_stable());
        }
    }
}

#[test]
fn tail_cone_is_the_closed_reeb_cone() {
    for (p, q) in [(3, 2), (4, 6), (5, 7), (9, 3)] {
        let f = make_family(FamilyKind::BrieskornPham, p, q).unwrap();
        let pd = bp_presentation(p, q).unwrap();
        assert_eq!(pd.tail_cone.rays.len(), 2);
        // the presentation orders the torus basis as (e2, e1)
        for ray in &pd.tail_cone.rays {
            let xi = ReebVector::from_ints(&[ray[1], ray[0]]);
            let a = f.variety.coordinate_weights(&xi);
            assert!(a.iter().all(|x| !x.is_negative()));
            assert!(a.iter().any(Zero::is_zero));
        }
        let r = f.reference_reeb();
        let swapped = [r.coords()[1].clone(), r.coords()[0].clone()];
        assert!(pd.tail_cone.contains(&swapped));
    }
}

#[test]
fn reports_round_trip() {
    for kind in FamilyKind::ALL {
        let r = reports(kind, 5, 3);
        let back: AnalysisReport = serde_json::from_str(&serde_json::to_string_pretty(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
