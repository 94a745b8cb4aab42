use std::sync::Arc;

use num_traits::{One, Zero};
use proptest::prelude::*;
use toeplitz_core::measures::{
    an_matrix, haar_pushforward_check, limit_vectors, symbol_masses, verify_an_recursion,
};
use toeplitz_core::scalar::{fraction_string, parse_fraction};
use toeplitz_core::toeplitz::{density_sequence, essential_check};
use toeplitz_core::tower::{TowerMode, TowerOptions};
use toeplitz_core::verify::{check_constancy, check_jset_recursion, default_grid, run_check, run_suite, DEFAULT_ORBIT_LIMIT};
use toeplitz_core::{BackendSpec, DomainTower, FamilyVariant, QuotientChain, Rational, ToeplitzFamily};

fn mode() -> impl Strategy<Value = TowerMode> {
    prop_oneof![Just(TowerMode::Greedy), Just(TowerMode::Canonical)]
}

/// Small ℤ and ℤ² schedules, every index ratio at least 3.
fn backend() -> impl Strategy<Value = BackendSpec> {
    prop_oneof![
        3 => prop::collection::vec(3u64..=5, 2..=4).prop_map(|multipliers| BackendSpec::Z { multipliers }),
        1 => prop::collection::vec(prop_oneof![Just((3u64, 1u64)), Just((1, 3)), Just((2, 2))], 2..=3)
            .prop_map(|levels| BackendSpec::Zd {
                axes: vec![levels.iter().map(|l| l.0).collect(), levels.iter().map(|l| l.1).collect()],
            }),
    ]
}

fn build(spec: &BackendSpec, mode: TowerMode, variant: FamilyVariant, r: u32) -> ToeplitzFamily {
    let chain = QuotientChain::new(spec.clone()).unwrap();
    let opts = TowerOptions { mode, max_radius: None };
    let tower = DomainTower::build(&chain, spec.depth(), &opts).unwrap();
    ToeplitzFamily::build(Arc::new(tower), variant, r).unwrap()
}

fn f2(depth: usize) -> QuotientChain {
    QuotientChain::new(BackendSpec::f2_consecutive(depth)).unwrap()
}

#[test]
fn f2_quotients_are_homomorphic_and_compatible() {
    let chain = f2(2);
    let ball = chain.enumerate_ball(2);
    for n in 0..=2 {
        for g in &ball {
            for h in &ball {
                let gh = chain.multiply(g, h).unwrap();
                let lhs = chain.quotient_class(&gh, n).unwrap();
                let rhs = chain.class_mul(n, chain.quotient_class(g, n).unwrap(), chain.quotient_class(h, n).unwrap());
                assert_eq!(lhs, rhs);
            }
            if n > 0 {
                let up = chain.quotient_class(g, n).unwrap();
                assert_eq!(chain.project(up, n, n - 1).unwrap(), chain.quotient_class(g, n - 1).unwrap());
            }
        }
    }
}

#[test]
fn f2_generators_separate_the_three_ball() {
    for depth in 2..=3 {
        assert!(f2(depth).separation_check(3, depth).unwrap().passed, "depth {depth}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn f2_group_axioms(a in 0usize..161, b in 0usize..161, c in 0usize..161) {
        let chain = f2(1);
        let ball = chain.enumerate_ball(4);
        let (x, y, z) = (&ball[a], &ball[b], &ball[c]);
        let xy_z = chain.multiply(&chain.multiply(x, y).unwrap(), z).unwrap();
        let x_yz = chain.multiply(x, &chain.multiply(y, z).unwrap()).unwrap();
        prop_assert_eq!(xy_z, x_yz);
        let e = chain.identity();
        prop_assert_eq!(chain.multiply(x, &chain.invert(x).unwrap()).unwrap(), e.clone());
        prop_assert_eq!(chain.multiply(&e, x).unwrap(), x.clone());
    }

    #[test]
    fn z_quotients_are_homomorphic(spec in backend(), g in -200i64..200, h in -200i64..200) {
        let chain = QuotientChain::new(spec.clone()).unwrap();
        let ball = chain.enumerate_ball(3);
        let g = &ball[g.unsigned_abs() as usize % ball.len()];
        let h = &ball[h.unsigned_abs() as usize % ball.len()];
        let gh = chain.multiply(g, h).unwrap();
        for n in 0..=spec.depth() {
            let c = chain.class_mul(n, chain.quotient_class(g, n).unwrap(), chain.quotient_class(h, n).unwrap());
            prop_assert_eq!(chain.quotient_class(&gh, n).unwrap(), c);
            if n > 0 {
                prop_assert_eq!(
                    chain.project(chain.quotient_class(g, n).unwrap(), n, n - 1).unwrap(),
                    chain.quotient_class(g, n - 1).unwrap()
                );
            }
        }
    }

    #[test]
    fn towers_validate_and_decompose(spec in backend(), mode in mode()) {
        let f = build(&spec, mode, FamilyVariant::MultiSymbol, 2);
        let tower = f.tower();
        let report = tower.validate();
        prop_assert!(report.passed, "{:?}", report.failures().collect::<Vec<_>>());
        for w in tower.sizes().windows(2) {
            prop_assert!(w[1] >= 3 * w[0]);
        }
        let chain = f.chain();
        for g in chain.enumerate_ball(6) {
            for i in 0..=tower.depth() {
                let (gamma, d) = tower.coset_decompose(&g, i).unwrap();
                prop_assert_eq!(chain.multiply(&gamma, &d).unwrap(), g.clone());
                prop_assert!(chain.in_subgroup(&gamma, i).unwrap());
                prop_assert_eq!(d, tower.representative(&g, i).unwrap());
            }
        }
        let back = DomainTower::from_json(&tower.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.to_json().unwrap(), tower.to_json().unwrap());
    }

    #[test]
    fn construction_identities(spec in backend(), mode in mode(), r in 2u32..=3) {
        let f = build(&spec, mode, FamilyVariant::MultiSymbol, r);
        let depth = f.depth();
        for i in 0..depth {
            prop_assert!(check_jset_recursion(&f, i).unwrap().passed());
        }
        for n in 1..=depth {
            let per = f.per_set(n).unwrap();
            // J(l)Γ_{l+1}, l < n, and J(n) partition Dₙ.
            prop_assert_eq!(per.total() + f.jset_size(n).unwrap(), f.tower().size(n).unwrap());
            for w in n + 1..=depth {
                prop_assert_eq!(&f.per_set_by_definition(n, w).unwrap(), &per);
            }
            prop_assert!(essential_check(f.chain(), &per).unwrap().essential);
        }
        let rows = density_sequence::<Rational>(&f).unwrap();
        for row in &rows {
            prop_assert!(row.closed_form_holds);
            prop_assert_eq!(row.recursion_holds, Some(true));
        }
        for w in rows.windows(2) {
            prop_assert!(w[0].d <= w[1].d);
            for (a, b) in w[0].per_symbol.iter().zip(&w[1].per_symbol) {
                prop_assert!(a <= b);
            }
        }
        let chain = f.chain();
        for i in 0..depth {
            for gamma in f.tower().elements(depth).unwrap().iter().filter(|g| chain.in_subgroup(g, i).unwrap()).take(4) {
                prop_assert!(check_constancy(&f, i, gamma).unwrap().passed());
            }
        }
    }

    #[test]
    fn measure_identities(spec in backend(), mode in mode(), r in 1u32..=3) {
        let f = build(&spec, mode, FamilyVariant::MultiSymbol, r);
        let depth = f.depth();
        for m in 1..=depth {
            let s = symbol_masses::<Rational>(&f, m).unwrap();
            prop_assert!(s.agree && s.sums_to_one);
            let total = s.counted.iter().fold(Rational::zero(), |a, b| a + b);
            prop_assert!(total.is_one());
            for n in 0..m.saturating_sub(1) {
                for w in n + 2..=m {
                    prop_assert!(verify_an_recursion::<Rational>(&f, m, n, w).unwrap().zero);
                }
            }
            for n in 0..=m {
                prop_assert!(haar_pushforward_check::<Rational>(&f, m, n).unwrap().passed);
            }
        }
        for n in 0..depth {
            let a = an_matrix::<Rational>(&f, n).unwrap();
            prop_assert!(a.determinant_holds && a.column_sums_equal && a.invertible);
        }
        // Along m with α_{m+1} = i the symbol masses are t⃗ᵢ⁽ᵐ⁾.
        let simplex = limit_vectors::<Rational>(&f).unwrap();
        for level in &simplex.levels {
            prop_assert!(level.determinant_holds && level.differences_hold && level.stochastic);
            let m = level.level;
            let alpha = f.cycle().alpha(m + 1) as usize;
            let s = symbol_masses::<Rational>(&f, m).unwrap();
            prop_assert_eq!(&s.counted, &level.vectors[alpha - 1]);
        }
    }

    #[test]
    fn binary_density_identities(spec in backend(), mode in mode()) {
        let f = build(&spec, mode, FamilyVariant::RegularBinary, 2);
        for row in density_sequence::<Rational>(&f).unwrap() {
            prop_assert!(row.closed_form_holds);
            prop_assert_eq!(row.sset_size_holds, Some(true));
        }
        for m in 1..=f.depth() {
            prop_assert!(symbol_masses::<Rational>(&f, m).unwrap().agree);
        }
    }

    #[test]
    fn lemma_checks_pass_on_valid_towers(spec in backend(), mode in mode(), r in 1u32..=3) {
        let f = build(&spec, mode, FamilyVariant::MultiSymbol, r);
        let grid = default_grid(&f, &[], 5_000).unwrap();
        let suite = run_suite(&f, &grid).unwrap();
        let failed: Vec<_> = suite.reports.iter().filter(|r| !r.passed()).collect();
        prop_assert!(suite.passed, "{:?}", failed);
        for rep in &suite.reports {
            prop_assert_eq!(rep.passed(), rep.counterexample.is_none());
        }
    }

    #[test]
    fn verdict_matches_counterexample_on_broken_arrays(cell in 0usize..81, r in 2u32..=3) {
        let f = build(&BackendSpec::z_constant(3, 4), TowerMode::Canonical, FamilyVariant::MultiSymbol, r)
            .with_flipped_cell(cell)
            .unwrap();
        for spec in default_grid(&f, &[], DEFAULT_ORBIT_LIMIT).unwrap() {
            if let Ok(rep) = run_check(&f, &spec) {
                prop_assert_eq!(rep.passed(), rep.counterexample.is_none());
            }
        }
    }

    #[test]
    fn fractions_round_trip(p in -1_000_000i64..1_000_000, q in 1i64..1_000_000) {
        let x = Rational::new(p.into(), q.into());
        prop_assert_eq!(parse_fraction(&fraction_string(&x)), Some(x));
    }
}
