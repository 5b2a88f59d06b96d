mod common;

use proptest::prelude::*;

use satprob::combinatorics::{find_sunflower, sunflower_guarantee};
use satprob::dimacs::{parse_dimacs, serialize_dimacs};
use satprob::interval::{bounded_interval, interval, interval_reduction_observed, sigma_by_expansion};
use satprob::kernel::{kernel_size_bound, kernelize};
use satprob::oracle::sigma_exact;
use satprob::{CnfFormula, Dyadic, Threshold};

use common::{naive_sigma, to_formula, Raw};

fn clause(k: usize, nvars: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::btree_map(1..=nvars, any::<bool>(), 1..=k)
        .prop_map(|m| m.into_iter().map(|(v, neg)| if neg { -v } else { v }).collect())
}

fn kcnf(k: usize, nvars: i64, max_clauses: usize) -> impl Strategy<Value = Raw> {
    prop::collection::vec(clause(k, nvars), 0..=max_clauses)
}

fn with_k() -> impl Strategy<Value = (usize, Raw)> {
    (1usize..=4).prop_flat_map(|k| (Just(k), kcnf(k, 10, 12)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dimacs_round_trip((k, raw) in with_k()) {
        let phi = to_formula(&raw, k);
        let back = parse_dimacs(serialize_dimacs(&phi).as_bytes()).unwrap();
        prop_assert_eq!(back.clauses(), phi.clauses());
    }

    #[test]
    fn oracle_matches_naive_count((k, raw) in with_k()) {
        prop_assert_eq!(sigma_exact(&to_formula(&raw, k), None).unwrap(), naive_sigma(&raw));
    }

    #[test]
    fn expansion_is_exact((k, raw) in with_k()) {
        prop_assert_eq!(sigma_by_expansion(&to_formula(&raw, k)), naive_sigma(&raw));
    }

    #[test]
    fn adding_a_clause_never_raises_sigma((k, raw) in with_k(), extra in clause(4, 12)) {
        let mut more = raw.clone();
        more.push(extra);
        prop_assert!(naive_sigma(&more) <= naive_sigma(&raw));
        let phi = to_formula(&raw, k);
        let phi2 = to_formula(&more, 4);
        prop_assert!(sigma_exact(&phi2, None).unwrap() <= sigma_exact(&phi, None).unwrap());
    }

    #[test]
    fn intervals_contain_sigma((k, raw) in with_k(), e in 1u32..=7) {
        let phi = to_formula(&raw, k);
        let s = naive_sigma(&raw);
        prop_assert!(interval(&phi).contains(&s));
        let eps = Dyadic::inv_pow2(e);
        let b = bounded_interval(&phi, &eps).unwrap();
        prop_assert!(b.contains(&s));
        prop_assert!(b.width() < eps);
    }

    #[test]
    fn worklist_conserves_sigma((k, raw) in with_k(), p in 0u64..=16) {
        let phi = to_formula(&raw, k);
        let want = naive_sigma(&raw);
        let delta = Threshold::from_u64(p, 16).unwrap();
        let mut steps = 0;
        interval_reduction_observed(&phi, &delta, |items: &[CnfFormula]| {
            let parts: Vec<Dyadic> = items.iter().map(|f| naive_sigma(&f.to_signed())).collect();
            let total: Dyadic = parts.iter().sum();
            assert_eq!(total, want, "worklist sum drifted");
            steps += 1;
        });
        prop_assert!(steps >= 1);
    }

    #[test]
    fn kernel_implies_formula((k, raw) in with_k(), h in 1u32..=4) {
        let phi = to_formula(&raw, k);
        let kr = kernelize(&phi, h);
        let kappa = kr.kernel.to_signed();
        let mut both = kappa.clone();
        both.extend(raw.iter().cloned());
        // κ ⊨ φ exactly when adding φ to κ removes no model.
        prop_assert_eq!(naive_sigma(&both), naive_sigma(&kappa));
        prop_assert!(naive_sigma(&kappa) <= naive_sigma(&raw));
        prop_assert!(num_bigint::BigUint::from(kr.kernel.len()) <= kernel_size_bound(k as u32, kr.h));
        prop_assert!(find_sunflower(&kr.kernel, kr.h as usize + 1).is_none() || kr.kernel.contains_empty_clause());
    }

    #[test]
    fn large_families_contain_sunflowers(raw in kcnf(2, 9, 60)) {
        let phi = to_formula(&raw, 2);
        let guarantee = sunflower_guarantee(2, 3);
        let found = find_sunflower(&phi, 3);
        if num_bigint::BigUint::from(phi.len()) > guarantee {
            prop_assert!(found.is_some());
        }
        if let Some(s) = found {
            prop_assert!(s.is_valid());
            prop_assert!(s.petals.len() >= 3);
            prop_assert!(s.petals.iter().all(|p| phi.contains(p)));
        }
    }

    #[test]
    fn threshold_text_round_trip(p in 0u64..=1000, q in 1u64..=1000) {
        prop_assume!(p <= q);
        let t = Threshold::from_u64(p, q).unwrap();
        prop_assert_eq!(t.to_string().parse::<Threshold>().unwrap(), t);
    }

    #[test]
    fn dyadic_text_round_trip(m in 0u64..=1 << 20, e in 0u32..=24) {
        prop_assume!(m <= 1 << e);
        let x = Dyadic::from_count(m, e);
        prop_assert_eq!(x.to_string().parse::<Dyadic>().unwrap(), x.clone());
        prop_assert_eq!(x.to_pow2_string().parse::<Dyadic>().unwrap(), x);
    }
}
