use automeasure::conditionals::{coset_census, conditional_at_zero, conditioning_words};
use automeasure::groups::{generator_set, FiniteGroup, GroupSpec};
use automeasure::lifted::{lift_rule, mask_of, size, subsets_of_size, z_words, z_words_group};
use automeasure::measures::{kitchens, m_odd, AlphabetSpec, Measure, MeasureSpec};
use automeasure::rational::{self, q};
use automeasure::rlp::{self, Map, PQSystem, RationalPoint};
use automeasure::rules::all_words;
use automeasure::synthesis::{synthesize, SetMeasureSpec, WeightedSetSpec};
use automeasure::{Alphabet, LocalRule, Q, Word};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn small_rules() -> Vec<LocalRule> {
    let mut rules = vec![LocalRule::ledrappier(), LocalRule::triangle()];
    for (_, g) in generator_set(4) {
        if g.order() > 1 {
            rules.push(g.group_rule());
        }
    }
    rules
}

fn uniform(k: usize) -> MeasureSpec {
    MeasureSpec::Uniform {
        alphabet: AlphabetSpec::Size(k),
    }
}

/// Mixtures of a few binary building blocks with random positive weights.
fn binary_mixture() -> impl Strategy<Value = MeasureSpec> {
    prop::collection::vec(1u32..6, 4).prop_map(|w| {
        let total: u32 = w.iter().sum();
        let led = LocalRule::ledrappier();
        let parts = [
            uniform(2),
            m_odd(),
            m_odd().push_shift().push_rule(&led),
            MeasureSpec::atomic(&Alphabet::numeric(2).unwrap(), vec![1], vec![0, 1, 1]),
        ];
        MeasureSpec::mixture(
            w.iter()
                .zip(parts)
                .map(|(&c, spec)| (q(c as i64, total as i64), spec))
                .collect(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mixtures_are_consistent(spec in binary_mixture()) {
        let mu = Measure::compile(&spec).unwrap();
        prop_assert!(mu.check_consistency(6).unwrap());
        let led = LocalRule::ledrappier();
        let pushed = Measure::compile(&spec.clone().push_rule(&led)).unwrap();
        prop_assert!(pushed.check_consistency(5).unwrap());
    }

    #[test]
    fn double_push_matches_two_step_preimages(spec in binary_mixture(), w in prop::collection::vec(0u16..2, 1..5)) {
        let led = LocalRule::ledrappier();
        let mu = Measure::compile(&spec).unwrap();
        let twice = Measure::compile(&spec.push_rule(&led).push_rule(&led)).unwrap();
        let brute: Q = all_words(2, w.len() + 2)
            .into_iter()
            .filter(|v| led.iterate(v, 2).unwrap() == w)
            .map(|v| mu.evaluate(&v).unwrap())
            .sum();
        prop_assert_eq!(twice.evaluate(&w).unwrap(), brute);
    }

    #[test]
    fn iterate_composes(w in prop::collection::vec(0u16..3, 2..9), s in 0usize..4, t in 0usize..4) {
        let tri = LocalRule::triangle();
        prop_assume!(s + t < w.len());
        let direct = tri.iterate(&w, s + t).unwrap();
        let staged = tri.iterate(&tri.iterate(&w, s).unwrap(), t).unwrap();
        prop_assert_eq!(direct, staged);
    }

    #[test]
    fn diagonal_is_the_base_pq_expansion(num in 0u64..500, den in 1u64..=500) {
        let sys = PQSystem::new(2, 3).unwrap();
        let x = RationalPoint::new(num, den).unwrap();
        let d = rlp::space_time(&sys, x, 10, 10);
        let digits = rlp::expansion(x, 6, 10);
        for i in 0..10 {
            prop_assert_eq!(d[i][i], digits[i]);
        }
    }
}

#[test]
fn block_entropy_is_monotone_and_subadditive() {
    let specs = [uniform(2), kitchens(), m_odd().push_shift().push_rule(&LocalRule::ledrappier())];
    for spec in &specs {
        let mu = Measure::compile(spec).unwrap();
        let h = mu.entropy_table(8).unwrap();
        for n in 1..h.len() {
            assert!(h[n] + 1e-12 >= h[n - 1]);
        }
    }
    // subadditivity needs shift invariance
    for spec in &specs[..2] {
        let mu = Measure::compile(spec).unwrap();
        let h = mu.entropy_table(8).unwrap();
        for m in 0..=8 {
            for n in 0..=8 - m {
                assert!(h[m + n] <= h[m] + h[n] + 1e-12);
            }
        }
    }
}

#[test]
fn column_code_is_injective_for_right_permutative_rules() {
    for rule in small_rules() {
        assert!(rule.is_right_permutative());
        let k = rule.size();
        let max_len = if k <= 3 { 6 } else { 5 };
        for n in 1..=max_len {
            let mut codes: Vec<Word> = all_words(k, n).iter().map(|w| rule.column_code(w).unwrap()).collect();
            codes.sort_unstable();
            codes.dedup();
            assert_eq!(codes.len(), k.pow(n as u32));
        }
    }
}

#[test]
fn group_rules_are_bipermutative() {
    for (name, g) in generator_set(12) {
        assert!(g.group_rule().is_bipermutative(), "{name}");
    }
    assert!(LocalRule::triangle().is_bipermutative());
    assert!(!LocalRule::constant(2, 0).unwrap().is_left_permutative());
    assert!(!LocalRule::constant(2, 0).unwrap().is_right_permutative());
}

#[test]
fn coset_reports_recover_the_subgroup() {
    for (name, g) in generator_set(12) {
        for h in g.subgroups() {
            let spec = MeasureSpec::SubgroupUniform {
                group: GroupSpec::Table {
                    table: g.cayley_rows(),
                    labels: None,
                },
                subgroup: h.elements().to_vec(),
            };
            let mu = Measure::compile(&spec).unwrap();
            let census = coset_census(&mu, &g, 2).unwrap();
            assert!(census.violations.is_empty(), "{name} {:?}", h.elements());
            assert_eq!(census.subgroups.len(), 1);
            assert_eq!(census.subgroups[0].support, h.elements());
            assert!(census.subgroups[0].mass.is_one());
        }
    }
}

#[test]
fn conditional_probabilities_sum_to_one() {
    let mu = Measure::compile(&kitchens()).unwrap();
    for n in 0..=7 {
        for w in conditioning_words(&mu, n).unwrap() {
            let r = conditional_at_zero(&mu, &w).unwrap();
            let total: Q = r.probs.iter().sum();
            assert!(total.is_one());
            assert!(r.support.iter().all(|&a| !r.probs[a as usize].is_zero()));
        }
    }
}

#[test]
fn lifted_rule_bounds() {
    let mut rules = small_rules();
    let a4 = Alphabet::numeric(4).unwrap();
    rules.push(LocalRule::from_fn(a4, |a, b| (a + 3 * b + 1) % 4).unwrap());
    for rule in rules.iter().filter(|r| r.size() <= 4) {
        let lifted = lift_rule(rule).unwrap();
        let n = 1u64 << rule.size();
        for a in 1..n {
            for b in 1..n {
                let c = lifted.apply_pair(a, b);
                assert!(size(c) >= size(a).max(size(b)));
                assert!(size(c) <= size(a) * size(b));
            }
        }
    }
}

#[test]
fn group_z_words_have_constant_component_sizes() {
    for (name, g) in generator_set(8) {
        for k in (1..=g.order()).filter(|k| g.order() % k == 0) {
            let report = z_words_group(&g, k, 3, 2).unwrap();
            if g.is_abelian() {
                assert!(report.verdict, "{name} k={k}");
            }
            for w in &report.words {
                assert!(w.iter().all(|c| c.len() == k));
            }
        }
    }
    // finite words may mix cosets of a non-normal subgroup
    let d3 = FiniteGroup::dihedral(3).unwrap();
    let report = z_words_group(&d3, 2, 3, 2).unwrap();
    assert_eq!(report.words.len(), 27);
    assert!(!report.verdict);
}

#[test]
fn z_words_shrink_as_n_grows() {
    let d3 = FiniteGroup::dihedral(3).unwrap();
    for rule in [LocalRule::triangle(), d3.group_rule()] {
        for k in 1..=rule.size().min(3) {
            let mut prev = z_words(&rule, k, 4, 0).unwrap();
            for n in 1..4 {
                let cur = z_words(&rule, k, 4, n).unwrap();
                assert!(cur.iter().all(|w| prev.contains(w)));
                prev = cur;
            }
        }
    }
    // singleton words always survive
    assert_eq!(z_words(&LocalRule::triangle(), 1, 3, 2).unwrap().len(), 27);
    assert_eq!(subsets_of_size(3, 2), vec![mask_of(&[0, 1]), mask_of(&[0, 2]), mask_of(&[1, 2])]);
}

#[test]
fn synthesized_measures_are_consistent() {
    let led = LocalRule::ledrappier();
    let nu = SetMeasureSpec::Mixture {
        components: vec![
            WeightedSetSpec {
                weight: q(1, 2),
                spec: SetMeasureSpec::constant(led.alphabet(), vec![0, 1]),
            },
            WeightedSetSpec {
                weight: q(1, 2),
                spec: SetMeasureSpec::Atomic {
                    alphabet: AlphabetSpec::Size(2),
                    pre_period: vec![],
                    period: vec![vec![0], vec![1], vec![1]],
                },
            },
        ],
    };
    let mu = Measure::compile(&synthesize(&nu, &led).unwrap()).unwrap();
    assert!(mu.check_consistency(6).unwrap());
}

#[test]
fn fibers_are_bijective_for_small_denominators() {
    for (p, q) in [(2, 3), (3, 2), (2, 5), (3, 5)] {
        let sys = PQSystem::new(p, q).unwrap();
        for den in 1..=200u64 {
            for num in 0..den {
                let y = RationalPoint::new(num, den).unwrap();
                assert!(rlp::fiber_bijectivity_check(&sys, y), "p={p} q={q} y={y}");
            }
        }
    }
}

#[test]
fn refinements_are_uniform_grids() {
    for (p, q) in [(2, 3), (3, 2), (2, 5), (3, 5)] {
        let sys = PQSystem::new(p, q).unwrap();
        for map in [Map::P, Map::Q] {
            for l in 1..=5 {
                let part = rlp::refine_partition(&sys, map, l).unwrap();
                let lengths = part.lengths();
                assert!(lengths.windows(2).all(|w| w[0] == w[1]));
                let total: Q = lengths.iter().sum();
                assert!(total.is_one());
                assert_eq!(part.breakpoints()[0], rational::zero());
            }
        }
    }
}
