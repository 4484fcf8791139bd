//! Randomized invariants, shrunk by proptest when they fail.

use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use tvcouple::bounds::{lb_all_x, lb_pointwise};
use tvcouple::combi::{check_step_inequality, Assignment, SubsetSpace};
use tvcouple::couplings::{sample, CouplingKind};
use tvcouple::exact::{
    check_dominance, clock_agreement, disagreement_bound, is_tight, race_agreement,
    tuple_agreement_floor, tuple_alpha, tuple_disagreement_bound,
};
use tvcouple::lp::optimal_pair_coupling;
use tvcouple::randomness::unit_open;
use tvcouple::{CdfSpec, DiscreteDistribution, Family, Universe};

fn universe(m: usize) -> Universe {
    let labels: Vec<String> = (0..m).map(|i| i.to_string()).collect();
    Universe::new(labels.iter().map(|s| s.as_str())).unwrap()
}

/// Nonnegative weights with zeros common, normalized to a law.
fn probs(m: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(
        prop_oneof![3 => 0.0001..1.0f64, 1 => Just(0.0)],
        m..=m,
    )
    .prop_filter_map("positive total mass", |v| {
        let total: f64 = v.iter().sum();
        if total > 1e-3 {
            Some(v.into_iter().map(|p| p / total).collect::<Vec<f64>>())
        } else {
            None
        }
    })
}

fn pair() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>)> {
    (2usize..=6).prop_flat_map(|m| (Just(m), probs(m), probs(m)))
}

fn triple() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (2usize..=6).prop_flat_map(|m| (Just(m), probs(m), probs(m), probs(m)))
}

fn dists(m: usize, lists: &[&Vec<f64>]) -> (Universe, Vec<DiscreteDistribution>) {
    let u = universe(m);
    let ds = lists
        .iter()
        .map(|p| DiscreteDistribution::from_probs(&u, (*p).clone()).unwrap())
        .collect();
    (u, ds)
}

proptest! {
    #[test]
    fn tv_is_a_bounded_metric((m, a, b, c) in triple()) {
        let (_, ds) = dists(m, &[&a, &b, &c]);
        let (p, q, r) = (&ds[0], &ds[1], &ds[2]);
        let pq = p.tv_distance(q).unwrap();
        let qr = q.tv_distance(r).unwrap();
        let pr = p.tv_distance(r).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&pq));
        prop_assert!(pr <= pq + qr + 1e-12, "triangle: {pr} > {pq} + {qr}");
        prop_assert!((pq - q.tv_distance(p).unwrap()).abs() <= 1e-15);
        prop_assert_eq!(p.tv_distance(p).unwrap(), 0.0);
    }

    #[test]
    fn overlap_sums_mirror_the_distance((m, a, b) in pair()) {
        let (_, ds) = dists(m, &[&a, &b]);
        let d = ds[0].tv_distance(&ds[1]).unwrap();
        let (lo, hi) = ds[0].overlap_sums(&ds[1]).unwrap();
        prop_assert!((lo - (1.0 - d)).abs() <= 1e-12);
        prop_assert!((hi - (1.0 + d)).abs() <= 1e-12);
    }

    #[test]
    fn couplings_never_exceed_the_bound((m, a, b) in pair()) {
        let (_, ds) = dists(m, &[&a, &b]);
        let (p, q) = (&ds[0], &ds[1]);
        let cap = disagreement_bound(p.tv_distance(q).unwrap()).unwrap();
        let clock = clock_agreement(p, q).unwrap().disagreement();
        let race = race_agreement(p, q).unwrap().disagreement();
        prop_assert!(clock <= cap + 1e-12, "clock {clock} above {cap}");
        prop_assert!(race <= cap + 1e-12, "race {race} above {cap}");
        prop_assert!(clock <= race + 1e-12, "clock {clock} worse than race {race}");
    }

    #[test]
    fn tight_pairs_attain_the_bound((m, a, b) in pair()) {
        let (_, ds) = dists(m, &[&a, &b]);
        let (p, q) = (&ds[0], &ds[1]);
        if is_tight(p, q).unwrap() {
            let cap = disagreement_bound(p.tv_distance(q).unwrap()).unwrap();
            let clock = clock_agreement(p, q).unwrap().disagreement();
            let race = race_agreement(p, q).unwrap().disagreement();
            prop_assert!((clock - cap).abs() <= 1e-12);
            prop_assert!((race - cap).abs() <= 1e-12);
        }
    }

    #[test]
    fn clock_dominates_race_per_atom((m, a, b) in pair()) {
        let (_, ds) = dists(m, &[&a, &b]);
        prop_assert_eq!(check_dominance(&ds[0], &ds[1]).unwrap(), None);
    }

    #[test]
    fn pair_lp_is_the_maximal_coupling((m, a, b) in pair()) {
        let (_, ds) = dists(m, &[&a, &b]);
        let report = optimal_pair_coupling(&ds[0], &ds[1]).unwrap();
        let tv = ds[0].tv_distance(&ds[1]).unwrap();
        prop_assert!((report.objective - tv).abs() <= 1e-12);
        let total: f64 = report.joint.weights().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
        for (coord, d) in ds.iter().enumerate() {
            let marginal = report.joint.marginal(coord);
            for a in d.universe().atoms() {
                prop_assert!((marginal[a.0 as usize] - d.prob(a)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn samples_are_reproducible_and_supported(
        (m, a, b) in pair(),
        seed in any::<u64>(),
        kind in prop_oneof![
            Just(CouplingKind::Clock),
            Just(CouplingKind::Race),
            Just(CouplingKind::Star),
        ],
    ) {
        let (u, ds) = dists(m, &[&a, &b]);
        let family = Family::new(
            u,
            vec![("P".to_string(), ds[0].clone()), ("Q".to_string(), ds[1].clone())],
        )
        .unwrap();
        let first = sample(&family, kind, seed).unwrap();
        let second = sample(&family, kind, seed).unwrap();
        prop_assert_eq!(first.values(), second.values());
        for (i, &value) in first.values().iter().enumerate() {
            prop_assert!(
                family.member(i).prob(value) > 0.0,
                "member {i} produced a zero-probability atom"
            );
        }
    }

    #[test]
    fn tuple_floor_respects_the_k_bound(
        (m, a, b, c) in triple(),
    ) {
        let (_, ds) = dists(m, &[&a, &b, &c]);
        let members: Vec<&DiscreteDistribution> = ds.iter().collect();
        let alpha = tuple_alpha(&members).unwrap();
        let floor = tuple_agreement_floor(&members).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&alpha));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&floor));
        let bound = tuple_disagreement_bound(alpha, members.len()).unwrap();
        prop_assert!(1.0 - floor <= bound + 1e-12);
    }

    #[test]
    fn lower_bounds_stay_under_f(x in 1e-6..0.999_999f64) {
        let f = disagreement_bound(x).unwrap();
        let all = lb_all_x(x).unwrap();
        let pointwise = lb_pointwise(x).unwrap();
        prop_assert!(all >= 0.0 && all <= f + 1e-12);
        prop_assert!(pointwise <= f + 1e-12);
    }

    #[test]
    fn step_inequality_holds_above_f(n in 1u64..=8, k in 1u64..=8) {
        prop_assume!(k <= n);
        let check = check_step_inequality(|x| 2.0 * x, n, k).unwrap();
        prop_assert!(check.holds, "lhs {} under rhs {}", check.lhs, check.rhs);
    }

    #[test]
    fn unit_open_lands_strictly_inside(raw in any::<u64>()) {
        let u = unit_open(raw);
        prop_assert!(u > 0.0 && u < 1.0);
    }

    #[test]
    fn assignments_roundtrip_through_json(
        n in 1u64..=4,
        k in 1u64..=3,
        picks in proptest::collection::vec(0usize..64, 64),
    ) {
        let space = std::sync::Arc::new(SubsetSpace::new(n, k).unwrap());
        let choices: Vec<u32> = (0..space.count())
            .map(|i| {
                let elements = space.elements(i);
                elements[picks[i % picks.len()] % elements.len()]
            })
            .collect();
        let assignment = Assignment::from_choices(space, choices.clone()).unwrap();
        let parsed = Assignment::from_json(&assignment.to_json()).unwrap();
        prop_assert_eq!(parsed.choices(), &choices[..]);
        let profile = assignment.disagreement_profile().unwrap();
        for m in 1..=k as u32 {
            prop_assert!(profile.at(m) <= profile.totals[&m]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn discretization_refines_upward(
        mu in -2.0..2.0f64,
        eps in 0.05..0.5f64,
    ) {
        let n0 = Normal::new(0.0, 1.0).unwrap();
        let n1 = Normal::new(mu, 1.0).unwrap();
        let lo = mu.min(0.0) - 8.5;
        let hi = mu.max(0.0) + 8.5;
        let spec0 = CdfSpec::new(lo, hi, move |x| n0.cdf(x)).unwrap();
        let spec1 = CdfSpec::new(lo, hi, move |x| n1.cdf(x)).unwrap();
        let coarse = {
            let d0 = spec0.discretize(eps).unwrap();
            let d1 = spec1.discretize(eps).unwrap();
            d0.tv_distance(&d1).unwrap()
        };
        let fine = {
            let d0 = spec0.discretize(eps / 2.0).unwrap();
            let d1 = spec1.discretize(eps / 2.0).unwrap();
            d0.tv_distance(&d1).unwrap()
        };
        // Halving the cell width refines the partition exactly.
        prop_assert!(coarse <= fine + 1e-12, "coarse {coarse} above fine {fine}");
        let analytic = 2.0 * n0.cdf(mu.abs() / 2.0) - 1.0;
        prop_assert!(fine <= analytic + 1e-9, "fine {fine} above analytic {analytic}");
    }
}
