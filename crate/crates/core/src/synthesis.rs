//! Building `μ` from a set-valued measure `ν`:
//! `μ([a_0..a_n]) = Σ_{A_i ∋ a_i} ν([A_0..A_n]) / (|A_0|···|A_n|)`.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::groups::GroupSpec;
use crate::lifted::{self, SetMask, SetWord};
use crate::measures::{self, AlphabetSpec, Measure, MeasureSpec};
use crate::rational::{self, Q};
use crate::rules::{Alphabet, GroupRuleKind, LocalRule, RuleSpec, Symbol};
use crate::{conditionals, par, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedSetSpec {
    #[serde(with = "rational::serde_str")]
    pub weight: Q,
    pub spec: SetMeasureSpec,
}

/// Declarative construction of a measure on set words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SetMeasureSpec {
    /// Point mass on `pre (period)^∞`; each set is a list of members.
    Atomic {
        alphabet: AlphabetSpec,
        #[serde(default)]
        pre_period: Vec<Vec<Symbol>>,
        period: Vec<Vec<Symbol>>,
    },
    Mixture { components: Vec<WeightedSetSpec> },
    /// Sequences of right cosets of `H`, indexed as in
    /// [`FiniteGroup::right_cosets`](crate::groups::FiniteGroup::right_cosets)
    /// and driven by `base`.
    SubgroupCosetProcess {
        group: GroupSpec,
        subgroup: Vec<Symbol>,
        base: Box<MeasureSpec>,
    },
}

impl SetMeasureSpec {
    /// `δ` on the constant set word `(A, A, ...)`.
    pub fn constant(alphabet: &Alphabet, set: Vec<Symbol>) -> Self {
        SetMeasureSpec::Atomic {
            alphabet: alphabet.into(),
            pre_period: vec![],
            period: vec![set],
        }
    }
}

enum SetKind {
    Atomic { pre: SetWord, period: SetWord },
    Mixture(Vec<(Q, Arc<SetNode>)>),
    Cosets {
        index: HashMap<SetMask, Symbol>,
        base: Arc<measures::Node>,
    },
}

struct SetNode {
    alphabet: Alphabet,
    /// Every set that can occur, increasing.
    emitted: Vec<SetMask>,
    kind: SetKind,
}

impl SetNode {
    fn eval(&self, w: &[SetMask]) -> Q {
        if w.is_empty() {
            return Q::one();
        }
        match &self.kind {
            SetKind::Atomic { pre, period } => {
                let ok = w.iter().enumerate().all(|(i, &s)| {
                    let expected = if i < pre.len() {
                        pre[i]
                    } else {
                        period[(i - pre.len()) % period.len()]
                    };
                    s == expected
                });
                if ok {
                    Q::one()
                } else {
                    Q::zero()
                }
            }
            SetKind::Mixture(parts) => parts
                .iter()
                .map(|(c, n)| {
                    let v = n.eval(w);
                    if v.is_zero() {
                        v
                    } else {
                        c * v
                    }
                })
                .sum(),
            SetKind::Cosets { index, base } => {
                let mut idx = Vec::with_capacity(w.len());
                for s in w {
                    match index.get(s) {
                        Some(&i) => idx.push(i),
                        None => return Q::zero(),
                    }
                }
                base.eval(&idx)
            }
        }
    }
}

/// A compiled set-valued measure; also the engine behind synthesized
/// measures.
#[derive(Clone)]
pub struct SetMeasure {
    node: Arc<SetNode>,
}

impl std::fmt::Debug for SetMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SetMeasure")
            .field("alphabet", &self.node.alphabet)
            .field("emitted", &self.node.emitted)
            .finish()
    }
}

fn set_word(alphabet: &Alphabet, sets: &[Vec<Symbol>]) -> Result<SetWord> {
    sets.iter()
        .map(|s| {
            if s.is_empty() {
                return Err(Error::InvalidMeasure("empty set in set word".into()));
            }
            alphabet.check_word(s)?;
            Ok(lifted::mask_of(s))
        })
        .collect()
}

fn compile_set(spec: &SetMeasureSpec) -> Result<Arc<SetNode>> {
    match spec {
        SetMeasureSpec::Atomic {
            alphabet,
            pre_period,
            period,
        } => {
            let alphabet = alphabet.build()?;
            if alphabet.size() > lifted::MAX_LIFT_ALPHABET {
                return Err(Error::InvalidMeasure("alphabet too large for set masks".into()));
            }
            if period.is_empty() {
                return Err(Error::InvalidMeasure("atomic set measure needs a nonempty period".into()));
            }
            let pre = set_word(&alphabet, pre_period)?;
            let period = set_word(&alphabet, period)?;
            let mut emitted: Vec<SetMask> = pre.iter().chain(&period).copied().collect();
            emitted.sort_unstable();
            emitted.dedup();
            Ok(Arc::new(SetNode {
                alphabet,
                emitted,
                kind: SetKind::Atomic { pre, period },
            }))
        }
        SetMeasureSpec::Mixture { components } => {
            if components.is_empty() {
                return Err(Error::InvalidMeasure("mixture without components".into()));
            }
            let mut total = Q::zero();
            let mut parts = vec![];
            for c in components {
                if !c.weight.is_positive() {
                    return Err(Error::InvalidMeasure("mixture weights must be positive".into()));
                }
                total += &c.weight;
                parts.push((c.weight.clone(), compile_set(&c.spec)?));
            }
            if !total.is_one() {
                return Err(Error::InvalidMeasure(format!(
                    "mixture weights sum to {}",
                    rational::to_string(&total)
                )));
            }
            let alphabet = parts[0].1.alphabet.clone();
            if parts.iter().any(|(_, p)| p.alphabet.size() != alphabet.size()) {
                return Err(Error::InvalidMeasure("mixture components use different alphabets".into()));
            }
            let mut emitted: Vec<SetMask> = parts.iter().flat_map(|(_, p)| p.emitted.iter().copied()).collect();
            emitted.sort_unstable();
            emitted.dedup();
            Ok(Arc::new(SetNode {
                alphabet,
                emitted,
                kind: SetKind::Mixture(parts),
            }))
        }
        SetMeasureSpec::SubgroupCosetProcess { group, subgroup, base } => {
            let g = group.build()?;
            if g.order() > lifted::MAX_LIFT_ALPHABET {
                return Err(Error::InvalidMeasure("group too large for set masks".into()));
            }
            let h = g.subgroup(subgroup)?;
            let cosets = g.right_cosets(&h);
            let base = measures::compile_node(base)?;
            if base.alphabet.size() != cosets.len() {
                return Err(Error::InvalidMeasure(format!(
                    "base process has {} symbols, H has {} right cosets",
                    base.alphabet.size(),
                    cosets.len()
                )));
            }
            let masks: Vec<SetMask> = cosets.iter().map(|c| lifted::mask_of(c)).collect();
            let index = masks.iter().enumerate().map(|(i, &m)| (m, i as Symbol)).collect();
            let mut emitted = masks;
            emitted.sort_unstable();
            Ok(Arc::new(SetNode {
                alphabet: g.alphabet().clone(),
                emitted,
                kind: SetKind::Cosets { index, base },
            }))
        }
    }
}

impl SetMeasure {
    pub fn compile(spec: &SetMeasureSpec) -> Result<Self> {
        Ok(Self {
            node: compile_set(spec)?,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.node.alphabet
    }

    /// Sets that occur with positive probability somewhere.
    pub fn emitted(&self) -> &[SetMask] {
        &self.node.emitted
    }

    pub fn evaluate(&self, w: &[SetMask]) -> Q {
        self.node.eval(w)
    }

    /// Positive set words of length `n`, in lexicographic mask order.
    pub fn support_words(&self, n: usize) -> Vec<(SetWord, Q)> {
        if n == 0 {
            return vec![(vec![], Q::one())];
        }
        let mut out = vec![];
        let mut w = Vec::with_capacity(n);
        self.collect(&mut w, n, &mut out);
        out
    }

    fn collect(&self, w: &mut SetWord, n: usize, out: &mut Vec<(SetWord, Q)>) {
        for &a in &self.node.emitted {
            w.push(a);
            let m = self.node.eval(w);
            if !m.is_zero() {
                if w.len() == n {
                    out.push((w.clone(), m));
                } else {
                    self.collect(w, n, out);
                }
            }
            w.pop();
        }
    }

    /// `ν([W]) = Σ_A ν([W A])` for positive words shorter than `n`.
    pub fn check_consistency(&self, n: usize) -> bool {
        (0..n).all(|m| {
            self.support_words(m).into_iter().all(|(w, mass)| {
                let mut v = w.clone();
                v.push(0);
                let total: Q = self
                    .node
                    .emitted
                    .iter()
                    .map(|&a| {
                        *v.last_mut().unwrap() = a;
                        self.node.eval(&v)
                    })
                    .sum();
                total == mass
            })
        })
    }

    /// The synthesis formula at a symbol word.
    pub(crate) fn synthesized_mass(&self, w: &[Symbol]) -> Q {
        let mut total = Q::zero();
        let mut sets = Vec::with_capacity(w.len());
        self.spread(w, &mut sets, &mut total);
        total
    }

    fn spread(&self, w: &[Symbol], sets: &mut SetWord, total: &mut Q) {
        let i = sets.len();
        if i == w.len() {
            let nu = self.node.eval(sets);
            let denom: BigInt = sets.iter().map(|&s| BigInt::from(lifted::size(s))).product();
            *total += nu / Q::from_integer(denom);
            return;
        }
        for &a in &self.node.emitted {
            if a >> w[i] & 1 == 0 {
                continue;
            }
            sets.push(a);
            if !self.node.eval(sets).is_zero() {
                self.spread(w, sets, total);
            }
            sets.pop();
        }
    }
}

const CONSISTENCY_DEPTH: usize = 4;

pub(crate) fn check_synthesis_inputs(nu: &SetMeasure, rule: &LocalRule) -> Result<()> {
    if !rule.is_left_permutative() {
        return Err(Error::Precondition("synthesis needs a left-permutative rule".into()));
    }
    if nu.alphabet().size() != rule.size() {
        return Err(Error::InvalidMeasure(format!(
            "ν lives on {} symbols, the rule on {}",
            nu.alphabet().size(),
            rule.size()
        )));
    }
    if !nu.check_consistency(CONSISTENCY_DEPTH) {
        return Err(Error::InvalidMeasure("ν is not Kolmogorov-consistent".into()));
    }
    Ok(())
}

/// The synthesized measure as a spec (validated).
pub fn synthesize(nu: &SetMeasureSpec, rule: &LocalRule) -> Result<MeasureSpec> {
    check_synthesis_inputs(&SetMeasure::compile(nu)?, rule)?;
    Ok(MeasureSpec::Synthesized {
        nu: nu.clone(),
        rule: rule.into(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthesisVerdict {
    pub sigma: bool,
    pub tau: bool,
    /// Every positive set word of length `n` keeps constant component
    /// sizes under `τ′` (the outer `Z_τ` condition at this depth).
    pub in_z: bool,
}

pub fn verify_synthesis_invariance(nu: &SetMeasureSpec, rule: &LocalRule, n: usize) -> Result<SynthesisVerdict> {
    let mu = Measure::compile(&synthesize(nu, rule)?)?;
    let sigma = mu.check_shift_invariance(n)?;
    let tau = mu.check_rule_invariance(rule, n)?;
    let set = SetMeasure::compile(nu)?;
    let lift = lifted::lift_rule(rule)?;
    let in_z = set.support_words(n.max(1)).iter().all(|(w, _)| {
        let k = lifted::size(w[0]);
        let mut cur = w.clone();
        while !cur.is_empty() {
            if cur.iter().any(|&s| lifted::size(s) != k) {
                return false;
            }
            cur = lift.apply(&cur);
        }
        true
    });
    Ok(SynthesisVerdict { sigma, tau, in_z })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundTrip {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundTripReport {
    pub verdict: RoundTrip,
    pub n: usize,
    pub margin: usize,
    pub notes: Vec<String>,
    pub mismatches: Vec<RoundTripMismatch>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundTripMismatch {
    pub word: Vec<Vec<Symbol>>,
    #[serde(with = "rational::serde_str")]
    pub nu: Q,
    #[serde(with = "rational::serde_str")]
    pub pushed: Q,
}

/// Compares `ν` with the push-forward of the synthesized `μ` through the
/// finite-depth `π_μ`, on set words of length `≤ n`.
pub fn round_trip_check(nu: &SetMeasureSpec, rule: &LocalRule, n: usize, margin: usize) -> Result<RoundTripReport> {
    let set = SetMeasure::compile(nu)?;
    let mu = Measure::compile(&synthesize(nu, rule)?)?;
    mu.check_len(n + margin)?;
    let mut notes = vec![];

    // zero entropy: A_0 is determined by A_1..A_n
    let mut determined = true;
    let mut by_future: HashMap<SetWord, SetMask> = HashMap::new();
    for (w, _) in set.support_words(n + 1) {
        let prev = by_future.insert(w[1..].to_vec(), w[0]);
        if prev.is_some_and(|p| p != w[0]) {
            determined = false;
            break;
        }
    }
    if !determined {
        notes.push(format!("index-0 set of ν is not determined by the next {n} sets"));
    }
    let emitted = set.emitted();
    let injective = emitted
        .iter()
        .enumerate()
        .all(|(i, &a)| emitted[i + 1..].iter().all(|&b| a & b == 0));
    if !injective {
        notes.push("occurring sets are neither disjoint nor identical".into());
    }

    let mut mismatches = vec![];
    let mut unstable = false;
    for m in 1..=n {
        let words = mu.support_words(m + margin)?;
        let images = par::map(&words, |(x, mass)| {
            let (image, stable) = lifted::pi_of(&mu, x, margin);
            (image[..m].to_vec(), stable, mass.clone())
        });
        let mut pushed: HashMap<SetWord, Q> = HashMap::new();
        for (image, stable, mass) in images {
            unstable |= !stable;
            *pushed.entry(image).or_insert_with(Q::zero) += mass;
        }
        let mut keys: Vec<SetWord> = pushed.keys().cloned().collect();
        keys.extend(set.support_words(m).into_iter().map(|(w, _)| w));
        keys.sort_unstable();
        keys.dedup();
        for w in keys {
            let want = set.evaluate(&w);
            let got = pushed.get(&w).cloned().unwrap_or_else(Q::zero);
            if want != got {
                mismatches.push(RoundTripMismatch {
                    word: lifted::expand(&w),
                    nu: want,
                    pushed: got,
                });
            }
        }
    }
    if unstable {
        notes.push(format!("some π_μ components are not stable with margin {margin}"));
    }
    let hypotheses = determined && injective && !unstable;
    let verdict = match (mismatches.is_empty(), hypotheses) {
        (true, _) => RoundTrip::Holds,
        (false, true) => RoundTrip::Fails,
        (false, false) => RoundTrip::Inconclusive,
    };
    Ok(RoundTripReport {
        verdict,
        n,
        margin,
        notes,
        mismatches,
    })
}

const LIFT_CHECK_DEPTH: usize = 6;
const LIFT_ENTROPY_DEPTH: usize = 8;

/// Lifts a zero-entropy Ledrappier-invariant measure on `Z/2` to `D_m`
/// through `D_m / C_m ≅ Z/2` and synthesizes over `τ_{D_m}`.
pub fn dihedral_lift(m: usize, nu2: &MeasureSpec) -> Result<MeasureSpec> {
    if m.is_multiple_of(2) {
        return Err(Error::Precondition(format!("dihedral lift needs odd m, got {m}")));
    }
    let base = Measure::compile(nu2)?;
    if base.alphabet().size() != 2 {
        return Err(Error::Precondition("the base measure must live on two symbols".into()));
    }
    let led = LocalRule::ledrappier();
    let depth = LIFT_CHECK_DEPTH.min(base.depth_cap().saturating_sub(1));
    if !base.check_shift_invariance(depth)? {
        return Err(Error::Precondition("the base measure is not shift-invariant".into()));
    }
    if !base.check_rule_invariance(&led, depth)? {
        return Err(Error::Precondition("the base measure is not Ledrappier-invariant".into()));
    }
    let depth = LIFT_ENTROPY_DEPTH.min(base.depth_cap().saturating_sub(1));
    for w in conditionals::conditioning_words(&base, depth)? {
        let r = conditionals::conditional_at_zero(&base, &w)?;
        if r.support.len() != 1 {
            return Err(Error::Precondition(format!(
                "the base measure has positive entropy: x_0 is not determined by {w:?}"
            )));
        }
    }
    let group = GroupSpec::Dihedral { m };
    let nu = SetMeasureSpec::SubgroupCosetProcess {
        group: group.clone(),
        subgroup: (0..m as Symbol).collect(),
        base: Box::new(nu2.clone()),
    };
    let rule = RuleSpec::Group {
        group,
        kind: GroupRuleKind::Multiplication,
    };
    check_synthesis_inputs(&SetMeasure::compile(&nu)?, &rule.build()?)?;
    Ok(MeasureSpec::Synthesized { nu, rule })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGroup;
    use crate::rational::q;
    use crate::rules::all_words;

    fn d3_c3() -> (FiniteGroup, SetMeasureSpec) {
        let d3 = FiniteGroup::dihedral(3).unwrap();
        let nu = SetMeasureSpec::constant(d3.alphabet(), vec![0, 1, 2]);
        (d3, nu)
    }

    #[test]
    fn synthesis_examples() {
        let led = LocalRule::ledrappier();
        let full = SetMeasureSpec::constant(led.alphabet(), vec![0, 1]);
        let mu = Measure::compile(&synthesize(&full, &led).unwrap()).unwrap();
        for n in 0..=6 {
            for w in all_words(2, n) {
                assert_eq!(mu.evaluate(&w).unwrap(), rational::inverse_power(2, n));
            }
        }
        let zero = SetMeasureSpec::constant(led.alphabet(), vec![0]);
        let mu = Measure::compile(&synthesize(&zero, &led).unwrap()).unwrap();
        assert_eq!(mu.evaluate(&[0, 0, 0]).unwrap(), q(1, 1));
        assert_eq!(mu.evaluate(&[0, 1, 0]).unwrap(), q(0, 1));

        let (d3, nu) = d3_c3();
        let mu = Measure::compile(&synthesize(&nu, &d3.group_rule()).unwrap()).unwrap();
        let target = Measure::compile(&MeasureSpec::SubgroupUniform {
            group: GroupSpec::Dihedral { m: 3 },
            subgroup: vec![0, 1, 2],
        })
        .unwrap();
        for n in 0..=5 {
            for w in all_words(6, n) {
                assert_eq!(mu.eval(&w), target.eval(&w));
            }
        }
    }

    #[test]
    fn synthesis_rejects_bad_inputs() {
        let a = Alphabet::numeric(2).unwrap();
        let right_only = LocalRule::from_fn(a.clone(), |_, b| b).unwrap();
        let nu = SetMeasureSpec::constant(&a, vec![0, 1]);
        assert!(matches!(synthesize(&nu, &right_only), Err(Error::Precondition(_))));
        let bad = SetMeasureSpec::Mixture {
            components: vec![WeightedSetSpec {
                weight: q(1, 2),
                spec: nu.clone(),
            }],
        };
        assert!(synthesize(&bad, &LocalRule::ledrappier()).is_err());
        assert!(synthesize(&nu, &LocalRule::triangle()).is_err());
    }

    #[test]
    fn invariance_verdicts() {
        let led = LocalRule::ledrappier();
        let (d3, nu) = d3_c3();
        let v = verify_synthesis_invariance(&nu, &d3.group_rule(), 5).unwrap();
        assert!(v.sigma && v.tau && v.in_z);
        for set in [vec![0], vec![0, 1]] {
            let nu = SetMeasureSpec::constant(led.alphabet(), set);
            let v = verify_synthesis_invariance(&nu, &led, 5).unwrap();
            assert!(v.sigma && v.tau);
        }
        let moving = SetMeasureSpec::Atomic {
            alphabet: AlphabetSpec::Size(2),
            pre_period: vec![vec![1]],
            period: vec![vec![0]],
        };
        assert!(!verify_synthesis_invariance(&moving, &led, 5).unwrap().sigma);
    }

    #[test]
    fn round_trips() {
        let led = LocalRule::ledrappier();
        let (d3, nu) = d3_c3();
        let r = round_trip_check(&nu, &d3.group_rule(), 4, 2).unwrap();
        assert_eq!(r.verdict, RoundTrip::Holds, "{r:?}");
        for set in [vec![0], vec![0, 1]] {
            let nu = SetMeasureSpec::constant(led.alphabet(), set);
            assert_eq!(round_trip_check(&nu, &led, 4, 2).unwrap().verdict, RoundTrip::Holds);
        }
    }

    #[test]
    fn marginal_identity() {
        // Σ_a μ([a w]) equals the synthesis of σ_*ν at w.
        let led = LocalRule::ledrappier();
        let nu = SetMeasureSpec::Mixture {
            components: vec![
                WeightedSetSpec {
                    weight: q(1, 3),
                    spec: SetMeasureSpec::constant(led.alphabet(), vec![0, 1]),
                },
                WeightedSetSpec {
                    weight: q(2, 3),
                    spec: SetMeasureSpec::Atomic {
                        alphabet: AlphabetSpec::Size(2),
                        pre_period: vec![vec![1], vec![0, 1]],
                        period: vec![vec![0]],
                    },
                },
            ],
        };
        let shifted = SetMeasureSpec::Mixture {
            components: vec![
                WeightedSetSpec {
                    weight: q(1, 3),
                    spec: SetMeasureSpec::constant(led.alphabet(), vec![0, 1]),
                },
                WeightedSetSpec {
                    weight: q(2, 3),
                    spec: SetMeasureSpec::Atomic {
                        alphabet: AlphabetSpec::Size(2),
                        pre_period: vec![vec![0, 1]],
                        period: vec![vec![0]],
                    },
                },
            ],
        };
        let mu = Measure::compile(&synthesize(&nu, &led).unwrap()).unwrap();
        let mu_shift = Measure::compile(&synthesize(&shifted, &led).unwrap()).unwrap();
        for n in 0..=5 {
            for w in all_words(2, n) {
                let lhs: Q = (0..2).map(|a| {
                    let mut v = vec![a];
                    v.extend(&w);
                    mu.eval(&v)
                }).sum();
                assert_eq!(lhs, mu_shift.eval(&w));
            }
        }
    }

    #[test]
    fn dihedral_lifts() {
        let zero = MeasureSpec::atomic(&Alphabet::numeric(2).unwrap(), vec![], vec![0]);
        for m in [3usize, 5] {
            let spec = dihedral_lift(m, &zero).unwrap();
            let mu = Measure::compile(&spec).unwrap();
            let target = Measure::compile(&MeasureSpec::SubgroupUniform {
                group: GroupSpec::Dihedral { m },
                subgroup: (0..m as Symbol).collect(),
            })
            .unwrap();
            for n in 0..=3 {
                for w in all_words(2 * m, n) {
                    assert_eq!(mu.eval(&w), target.eval(&w));
                }
            }
        }
        let spec = dihedral_lift(3, &zero).unwrap();
        let mu = Measure::compile(&spec).unwrap();
        let h = mu.entropy_rate_estimate(8).unwrap();
        assert!((h - 3f64.ln()).abs() < 1e-9);
        assert!(dihedral_lift(4, &zero).is_err());
        let uniform = MeasureSpec::Uniform {
            alphabet: AlphabetSpec::Size(2),
        };
        assert!(matches!(dihedral_lift(3, &uniform), Err(Error::Precondition(_))));
    }
}
