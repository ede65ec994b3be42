//! Probability measures on one-sided sequences, represented by exact
//! cylinder oracles `w ↦ μ([w])`.
//!
//! A [`MeasureSpec`] is a declarative construction tree (and the on-disk
//! JSON format). [`Measure::compile`] validates it and produces a shared,
//! memoized oracle.

use std::sync::Arc;

use dashmap::DashMap;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::groups::GroupSpec;
use crate::rational::{self, Q};
use crate::rules::{Alphabet, LocalRule, RuleSpec, Solver, Symbol, Word};
use crate::synthesis::{SetMeasure, SetMeasureSpec};
use crate::{par, Error, Result};

pub const DEFAULT_DEPTH_CAP: usize = 14;
pub const DEPTH_CAP_ENV: &str = "AUTOMEASURE_DEPTH_CAP";

/// Depth cap from `AUTOMEASURE_DEPTH_CAP`, falling back to 14.
pub fn depth_cap_from_env() -> usize {
    std::env::var(DEPTH_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_DEPTH_CAP)
}

/// An alphabet given either by its size or by its labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphabetSpec {
    Size(usize),
    Labels(Vec<String>),
}

impl AlphabetSpec {
    pub fn build(&self) -> Result<Alphabet> {
        match self {
            AlphabetSpec::Size(n) => Alphabet::numeric(*n),
            AlphabetSpec::Labels(l) => Alphabet::new(l.iter().cloned()),
        }
    }
}

impl From<&Alphabet> for AlphabetSpec {
    fn from(a: &Alphabet) -> Self {
        if a.labels().iter().enumerate().all(|(i, l)| *l == i.to_string()) {
            AlphabetSpec::Size(a.size())
        } else {
            AlphabetSpec::Labels(a.labels().to_vec())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedSpec {
    #[serde(with = "rational::serde_str")]
    pub weight: Q,
    pub spec: MeasureSpec,
}

/// Declarative construction of a measure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MeasureSpec {
    /// i.i.d. uniform symbols.
    Uniform { alphabet: AlphabetSpec },
    /// i.i.d. uniform symbols from a subset.
    UniformOnSubset {
        alphabet: AlphabetSpec,
        subset: Vec<Symbol>,
    },
    /// i.i.d. uniform elements of a subgroup, over the group's alphabet.
    SubgroupUniform {
        group: GroupSpec,
        subgroup: Vec<Symbol>,
    },
    /// `pin` at every position congruent to `phase` mod 2, the remaining
    /// positions driven by `base`.
    PinnedInterleave {
        base: Box<MeasureSpec>,
        pin: Symbol,
        phase: u8,
    },
    /// `σ_* μ`.
    PushShift { of: Box<MeasureSpec> },
    /// `τ_* μ`.
    PushRule { of: Box<MeasureSpec>, rule: RuleSpec },
    Mixture { components: Vec<WeightedSpec> },
    /// Point mass on the eventually periodic sequence `pre (period)^∞`.
    Atomic {
        alphabet: AlphabetSpec,
        #[serde(default)]
        pre_period: Vec<Symbol>,
        period: Vec<Symbol>,
    },
    /// Independent coupling over the product alphabet (first factor most
    /// significant).
    Product { factors: Vec<MeasureSpec> },
    /// The measure built from a set-valued measure by spreading each set
    /// cylinder uniformly over its members.
    Synthesized { nu: SetMeasureSpec, rule: RuleSpec },
    /// Push-forward through the column code `x ↦ ((τ^i x)_0)_i`.
    ColumnCoded { of: Box<MeasureSpec>, rule: RuleSpec },
}

impl MeasureSpec {
    pub fn uniform(alphabet: &Alphabet) -> Self {
        MeasureSpec::Uniform {
            alphabet: alphabet.into(),
        }
    }

    pub fn atomic(alphabet: &Alphabet, pre_period: Word, period: Word) -> Self {
        MeasureSpec::Atomic {
            alphabet: alphabet.into(),
            pre_period,
            period,
        }
    }

    pub fn push_shift(self) -> Self {
        MeasureSpec::PushShift { of: Box::new(self) }
    }

    pub fn push_rule(self, rule: &LocalRule) -> Self {
        MeasureSpec::PushRule {
            of: Box::new(self),
            rule: rule.into(),
        }
    }

    pub fn column_coded(self, rule: &LocalRule) -> Self {
        MeasureSpec::ColumnCoded {
            of: Box::new(self),
            rule: rule.into(),
        }
    }

    pub fn mixture(components: Vec<(Q, MeasureSpec)>) -> Self {
        MeasureSpec::Mixture {
            components: components
                .into_iter()
                .map(|(weight, spec)| WeightedSpec { weight, spec })
                .collect(),
        }
    }
}

/// Push-forward of the uniform measure through
/// `(x_0, x_1, ...) ↦ (0, x_0, 0, x_1, ...)`.
pub fn m_odd() -> MeasureSpec {
    MeasureSpec::PinnedInterleave {
        base: Box::new(MeasureSpec::Uniform {
            alphabet: AlphabetSpec::Size(2),
        }),
        pin: 0,
        phase: 0,
    }
}

/// The four-component Ledrappier-invariant mixture
/// `¼ m + ¼ σ_*m + ¼ τ_*m + ¼ τ_*σ_*m` with `m = m_odd`.
pub fn kitchens() -> MeasureSpec {
    let led = LocalRule::ledrappier();
    let quarter = rational::q(1, 4);
    MeasureSpec::mixture(vec![
        (quarter.clone(), m_odd()),
        (quarter.clone(), m_odd().push_shift()),
        (quarter.clone(), m_odd().push_rule(&led)),
        (quarter, m_odd().push_shift().push_rule(&led)),
    ])
}

pub(crate) enum Kind {
    UniformOn {
        member: Vec<bool>,
        count: usize,
    },
    Pinned {
        base: Arc<Node>,
        pin: Symbol,
        phase: usize,
    },
    Shift(Arc<Node>),
    Rule {
        base: Arc<Node>,
        rule: LocalRule,
        left: Option<Solver>,
    },
    Mixture(Vec<(Q, Arc<Node>)>),
    Atomic {
        pre: Word,
        period: Word,
    },
    Product {
        factors: Vec<Arc<Node>>,
        radices: Vec<usize>,
    },
    Synthesized(SetMeasure),
    ColumnCoded {
        base: Arc<Node>,
        solver: Solver,
    },
}

pub(crate) struct Node {
    pub(crate) alphabet: Alphabet,
    kind: Kind,
    memo: Option<DashMap<Word, Q>>,
}

impl Node {
    fn new(alphabet: Alphabet, kind: Kind) -> Arc<Self> {
        let memoize = matches!(
            kind,
            Kind::Shift(_)
                | Kind::Rule { .. }
                | Kind::Mixture(_)
                | Kind::Synthesized(_)
                | Kind::ColumnCoded { .. }
        );
        Arc::new(Self {
            alphabet,
            kind,
            memo: memoize.then(DashMap::new),
        })
    }

    pub(crate) fn eval(&self, w: &[Symbol]) -> Q {
        if w.is_empty() {
            return Q::one();
        }
        if let Some(memo) = &self.memo {
            if let Some(v) = memo.get(w) {
                return v.clone();
            }
            let v = self.compute(w);
            memo.insert(w.to_vec(), v.clone());
            v
        } else {
            self.compute(w)
        }
    }

    fn compute(&self, w: &[Symbol]) -> Q {
        match &self.kind {
            Kind::UniformOn { member, count } => {
                if w.iter().all(|&s| member[s as usize]) {
                    rational::inverse_power(*count, w.len())
                } else {
                    Q::zero()
                }
            }
            Kind::Pinned { base, pin, phase } => {
                let mut free = Vec::with_capacity(w.len() / 2 + 1);
                for (i, &s) in w.iter().enumerate() {
                    if i % 2 == *phase {
                        if s != *pin {
                            return Q::zero();
                        }
                    } else {
                        free.push(s);
                    }
                }
                base.eval(&free)
            }
            Kind::Shift(base) => {
                let mut v = Vec::with_capacity(w.len() + 1);
                v.push(0);
                v.extend_from_slice(w);
                let mut total = Q::zero();
                for a in base.alphabet.symbols() {
                    v[0] = a;
                    total += base.eval(&v);
                }
                total
            }
            Kind::Rule { base, rule, left } => rule_preimage_mass(base, rule, left.as_ref(), w),
            Kind::Mixture(parts) => {
                let mut total = Q::zero();
                for (weight, node) in parts {
                    let v = node.eval(w);
                    if !v.is_zero() {
                        total += weight * v;
                    }
                }
                total
            }
            Kind::Atomic { pre, period } => {
                let matches = w.iter().enumerate().all(|(i, &s)| {
                    let expected = if i < pre.len() {
                        pre[i]
                    } else {
                        period[(i - pre.len()) % period.len()]
                    };
                    s == expected
                });
                if matches {
                    Q::one()
                } else {
                    Q::zero()
                }
            }
            Kind::Product { factors, radices } => {
                let mut total = Q::one();
                let mut parts: Vec<Word> = vec![Vec::with_capacity(w.len()); factors.len()];
                for &s in w {
                    let mut rest = s as usize;
                    for (j, r) in radices.iter().enumerate().rev() {
                        parts[j].push((rest % r) as Symbol);
                        rest /= r;
                    }
                }
                for (f, part) in factors.iter().zip(&parts) {
                    let v = f.eval(part);
                    if v.is_zero() {
                        return v;
                    }
                    total *= v;
                }
                total
            }
            Kind::Synthesized(nu) => nu.synthesized_mass(w),
            Kind::ColumnCoded { base, solver } => base.eval(&solver.invert_column(w)),
        }
    }
}

/// `Σ_{v : τ(v) = w} μ([v])`.
fn rule_preimage_mass(base: &Node, rule: &LocalRule, left: Option<&Solver>, w: &[Symbol]) -> Q {
    let n = w.len();
    let mut total = Q::zero();
    match left {
        Some(solver) => {
            // The last symbol is free; left permutativity fixes the rest.
            let mut v = vec![0; n + 1];
            for last in base.alphabet.symbols() {
                v[n] = last;
                for i in (0..n).rev() {
                    v[i] = solver.solve(v[i + 1], w[i]);
                }
                total += base.eval(&v);
            }
        }
        None => {
            fn extend(base: &Node, rule: &LocalRule, w: &[Symbol], v: &mut Word, total: &mut Q) {
                let j = v.len();
                for s in base.alphabet.symbols() {
                    if j > 0 && rule.get(v[j - 1], s) != w[j - 1] {
                        continue;
                    }
                    v.push(s);
                    let m = base.eval(v);
                    if !m.is_zero() {
                        if v.len() == w.len() + 1 {
                            *total += m;
                        } else {
                            extend(base, rule, w, v, total);
                        }
                    }
                    v.pop();
                }
            }
            extend(base, rule, w, &mut Vec::with_capacity(n + 1), &mut total);
        }
    }
    total
}

/// A compiled, memoized cylinder oracle.
#[derive(Clone)]
pub struct Measure {
    node: Arc<Node>,
    depth_cap: usize,
}

impl std::fmt::Debug for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Measure")
            .field("alphabet", &self.node.alphabet)
            .field("depth_cap", &self.depth_cap)
            .finish()
    }
}

impl Measure {
    pub fn compile(spec: &MeasureSpec) -> Result<Self> {
        Ok(Self {
            node: compile_node(spec)?,
            depth_cap: depth_cap_from_env(),
        })
    }

    pub fn with_depth_cap(mut self, cap: usize) -> Self {
        self.depth_cap = cap.max(1);
        self
    }

    pub fn depth_cap(&self) -> usize {
        self.depth_cap
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.node.alphabet
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if n > self.depth_cap {
            Err(Error::DepthCapExceeded {
                len: n,
                cap: self.depth_cap,
            })
        } else {
            Ok(())
        }
    }

    /// Exact `μ([w])`.
    pub fn evaluate(&self, w: &[Symbol]) -> Result<Q> {
        self.check_len(w.len())?;
        self.alphabet().check_word(w)?;
        Ok(self.node.eval(w))
    }

    pub(crate) fn eval(&self, w: &[Symbol]) -> Q {
        self.node.eval(w)
    }

    /// `σ_* μ`, sharing this measure's memo.
    pub fn push_shift(&self) -> Measure {
        Measure {
            node: Node::new(self.node.alphabet.clone(), Kind::Shift(self.node.clone())),
            depth_cap: self.depth_cap,
        }
    }

    /// `τ_* μ`, sharing this measure's memo.
    pub fn push_rule(&self, rule: &LocalRule) -> Result<Measure> {
        Ok(Measure {
            node: rule_node(self.node.clone(), rule)?,
            depth_cap: self.depth_cap,
        })
    }

    /// All words of length `n` with positive mass, in lexicographic order.
    pub fn support_words(&self, n: usize) -> Result<Vec<(Word, Q)>> {
        self.check_len(n)?;
        Ok(support_of(&self.node, n))
    }

    /// `μ([w]) = Σ_a μ([w a])` for every positive word shorter than `n`.
    pub fn check_consistency(&self, n: usize) -> Result<bool> {
        self.check_len(n)?;
        if !self.eval(&[]).is_one() {
            return Ok(false);
        }
        for m in 0..n {
            for (w, mass) in self.support_words(m)? {
                let mut v = w.clone();
                v.push(0);
                let mut total = Q::zero();
                for a in self.alphabet().symbols() {
                    *v.last_mut().unwrap() = a;
                    let x = self.eval(&v);
                    if x.is_negative() {
                        return Ok(false);
                    }
                    total += x;
                }
                if total != mass {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Exact `μ([w]) = Σ_a μ([a w])` for all `|w| ≤ n`.
    pub fn check_shift_invariance(&self, n: usize) -> Result<bool> {
        self.check_len(n + 1)?;
        let pushed = self.push_shift();
        Ok(agrees_up_to(self, &pushed, n, |v| v[1..].to_vec()))
    }

    /// Exact `μ([w]) = μ(τ⁻¹[w])` for all `|w| ≤ n`.
    pub fn check_rule_invariance(&self, rule: &LocalRule, n: usize) -> Result<bool> {
        self.check_len(n + 1)?;
        let pushed = self.push_rule(rule)?;
        Ok(agrees_up_to(self, &pushed, n, |v| rule.apply_unchecked(v)))
    }

    /// `H_n = -Σ_{|w| = n} μ(w) ln μ(w)`.
    pub fn block_entropy(&self, n: usize) -> Result<f64> {
        Ok(self
            .support_words(n)?
            .iter()
            .map(|(_, m)| rational::plogp(m))
            .sum())
    }

    /// `H_n - H_{n-1}` (with `H_0 = 0`).
    pub fn entropy_rate_estimate(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        Ok(self.block_entropy(n)? - self.block_entropy(n - 1)?)
    }

    /// `[H_0, H_1, ..., H_n]`.
    pub fn entropy_table(&self, n: usize) -> Result<Vec<f64>> {
        (0..=n).map(|m| self.block_entropy(m)).collect()
    }
}

/// Compares `mu` and `pushed` on every word of length `≤ n` that is positive
/// for either; `image` maps a positive `mu`-word of length `m + 1` to a
/// length-`m` word that may be positive for `pushed`.
fn agrees_up_to(mu: &Measure, pushed: &Measure, n: usize, image: impl Fn(&[Symbol]) -> Word + Sync) -> bool {
    for m in 0..=n {
        let mut words: Vec<Word> = support_of(&mu.node, m).into_iter().map(|(w, _)| w).collect();
        words.extend(support_of(&mu.node, m + 1).iter().map(|(v, _)| image(v)));
        words.sort_unstable();
        words.dedup();
        let ok = par::map(&words, |w| mu.eval(w) == pushed.eval(w));
        if ok.iter().any(|b| !b) {
            return false;
        }
    }
    true
}

fn support_of(node: &Arc<Node>, n: usize) -> Vec<(Word, Q)> {
    const SPLIT: usize = 64;
    let extend = |w: &Word| -> Vec<(Word, Q)> {
        node.alphabet
            .symbols()
            .filter_map(|a| {
                let mut v = w.clone();
                v.push(a);
                let m = node.eval(&v);
                (!m.is_zero()).then_some((v, m))
            })
            .collect()
    };
    let mut frontier: Vec<(Word, Q)> = vec![(vec![], Q::one())];
    let mut depth = 0;
    while depth < n && frontier.len() < SPLIT {
        frontier = frontier.iter().flat_map(|(w, _)| extend(w)).collect();
        depth += 1;
    }
    if depth == n {
        return frontier;
    }
    let remaining = n - depth;
    let parts = par::map(&frontier, |(w, _)| {
        let mut out = vec![];
        let mut stack = vec![(w.clone(), 0usize)];
        // iterative DFS keeping lexicographic order
        while let Some((w, d)) = stack.pop() {
            let children = extend(&w);
            if d + 1 == remaining {
                out.extend(children);
            } else {
                for (v, _) in children.into_iter().rev() {
                    stack.push((v, d + 1));
                }
            }
        }
        out
    });
    parts.concat()
}

fn rule_node(base: Arc<Node>, rule: &LocalRule) -> Result<Arc<Node>> {
    if rule.size() != base.alphabet.size() {
        return Err(Error::InvalidMeasure(format!(
            "rule alphabet has {} symbols, measure alphabet has {}",
            rule.size(),
            base.alphabet.size()
        )));
    }
    Ok(Node::new(
        base.alphabet.clone(),
        Kind::Rule {
            base,
            rule: rule.clone(),
            left: rule.left_solver(),
        },
    ))
}

fn uniform_on(alphabet: Alphabet, subset: &[Symbol]) -> Result<Arc<Node>> {
    let mut member = vec![false; alphabet.size()];
    for &s in subset {
        alphabet.check_symbol(s as usize)?;
        member[s as usize] = true;
    }
    let count = member.iter().filter(|&&b| b).count();
    if count == 0 {
        return Err(Error::InvalidMeasure("empty subset".into()));
    }
    Ok(Node::new(alphabet, Kind::UniformOn { member, count }))
}

pub(crate) fn compile_node(spec: &MeasureSpec) -> Result<Arc<Node>> {
    match spec {
        MeasureSpec::Uniform { alphabet } => {
            let alphabet = alphabet.build()?;
            let all: Word = alphabet.symbols().collect();
            uniform_on(alphabet, &all)
        }
        MeasureSpec::UniformOnSubset { alphabet, subset } => uniform_on(alphabet.build()?, subset),
        MeasureSpec::SubgroupUniform { group, subgroup } => {
            let g = group.build()?;
            let h = g.subgroup(subgroup)?;
            uniform_on(g.alphabet().clone(), h.elements())
        }
        MeasureSpec::PinnedInterleave { base, pin, phase } => {
            let base = compile_node(base)?;
            base.alphabet.check_symbol(*pin as usize)?;
            if *phase > 1 {
                return Err(Error::InvalidMeasure(format!("phase must be 0 or 1, got {phase}")));
            }
            Ok(Node::new(
                base.alphabet.clone(),
                Kind::Pinned {
                    base,
                    pin: *pin,
                    phase: *phase as usize,
                },
            ))
        }
        MeasureSpec::PushShift { of } => {
            let base = compile_node(of)?;
            Ok(Node::new(base.alphabet.clone(), Kind::Shift(base)))
        }
        MeasureSpec::PushRule { of, rule } => rule_node(compile_node(of)?, &rule.build()?),
        MeasureSpec::Mixture { components } => {
            if components.is_empty() {
                return Err(Error::InvalidMeasure("mixture without components".into()));
            }
            let mut parts = Vec::with_capacity(components.len());
            let mut total = Q::zero();
            for c in components {
                if !c.weight.is_positive() {
                    return Err(Error::InvalidMeasure(format!(
                        "mixture weight {} is not positive",
                        rational::to_string(&c.weight)
                    )));
                }
                total += &c.weight;
                parts.push((c.weight.clone(), compile_node(&c.spec)?));
            }
            if !total.is_one() {
                return Err(Error::InvalidMeasure(format!(
                    "mixture weights sum to {}",
                    rational::to_string(&total)
                )));
            }
            let alphabet = parts[0].1.alphabet.clone();
            if parts.iter().any(|(_, n)| n.alphabet.size() != alphabet.size()) {
                return Err(Error::InvalidMeasure("mixture components use different alphabets".into()));
            }
            Ok(Node::new(alphabet, Kind::Mixture(parts)))
        }
        MeasureSpec::Atomic {
            alphabet,
            pre_period,
            period,
        } => {
            let alphabet = alphabet.build()?;
            if period.is_empty() {
                return Err(Error::InvalidMeasure("atomic measure needs a nonempty period".into()));
            }
            alphabet.check_word(pre_period)?;
            alphabet.check_word(period)?;
            Ok(Node::new(
                alphabet,
                Kind::Atomic {
                    pre: pre_period.clone(),
                    period: period.clone(),
                },
            ))
        }
        MeasureSpec::Product { factors } => {
            if factors.is_empty() {
                return Err(Error::InvalidMeasure("product without factors".into()));
            }
            let factors: Vec<Arc<Node>> = factors.iter().map(compile_node).collect::<Result<_>>()?;
            let radices: Vec<usize> = factors.iter().map(|f| f.alphabet.size()).collect();
            let total: usize = radices.iter().product();
            if total > crate::rules::MAX_ALPHABET {
                return Err(Error::OrderTooLarge(total));
            }
            let mut labels = vec![String::new()];
            for f in &factors {
                labels = labels
                    .iter()
                    .flat_map(|prefix| {
                        f.alphabet.labels().iter().map(move |l| {
                            if prefix.is_empty() {
                                l.clone()
                            } else {
                                format!("{prefix},{l}")
                            }
                        })
                    })
                    .collect();
            }
            let labels = labels.into_iter().map(|l| format!("({l})"));
            Ok(Node::new(Alphabet::new(labels)?, Kind::Product { factors, radices }))
        }
        MeasureSpec::Synthesized { nu, rule } => {
            let rule = rule.build()?;
            let nu = SetMeasure::compile(nu)?;
            crate::synthesis::check_synthesis_inputs(&nu, &rule)?;
            Ok(Node::new(rule.alphabet().clone(), Kind::Synthesized(nu)))
        }
        MeasureSpec::ColumnCoded { of, rule } => {
            let base = compile_node(of)?;
            let rule = rule.build()?;
            if rule.size() != base.alphabet.size() {
                return Err(Error::InvalidMeasure("rule and measure alphabets differ".into()));
            }
            let solver = rule
                .right_solver()
                .ok_or_else(|| Error::Precondition("column coding needs a right-permutative rule".into()))?;
            Ok(Node::new(base.alphabet.clone(), Kind::ColumnCoded { base, solver }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGroup;
    use crate::rational::q;
    use crate::rules::all_words;

    fn compile(spec: &MeasureSpec) -> Measure {
        Measure::compile(spec).unwrap().with_depth_cap(14)
    }

    fn uniform2() -> MeasureSpec {
        MeasureSpec::Uniform {
            alphabet: AlphabetSpec::Size(2),
        }
    }

    #[test]
    fn uniform_cylinders() {
        let mu = compile(&uniform2());
        assert_eq!(mu.evaluate(&[0, 1, 1]).unwrap(), q(1, 8));
        assert_eq!(mu.evaluate(&[]).unwrap(), q(1, 1));
    }

    #[test]
    fn m_odd_cylinders() {
        let mu = compile(&m_odd());
        assert_eq!(mu.evaluate(&[0, 1]).unwrap(), q(1, 2));
        assert_eq!(mu.evaluate(&[0, 0]).unwrap(), q(1, 2));
        assert_eq!(mu.evaluate(&[1]).unwrap(), q(0, 1));
        assert_eq!(mu.evaluate(&[1, 0]).unwrap(), q(0, 1));
    }

    #[test]
    fn kitchens_one_symbol_marginals() {
        // components give μ([0]) = 1, 1/2, 1/2, 1/2
        let mu = compile(&kitchens());
        assert_eq!(mu.evaluate(&[0]).unwrap(), q(5, 8));
        assert_eq!(mu.evaluate(&[1]).unwrap(), q(3, 8));
    }

    #[test]
    fn shift_push_examples() {
        let u = compile(&uniform2().push_shift());
        for w in all_words(2, 4) {
            assert_eq!(u.evaluate(&w).unwrap(), q(1, 16));
        }
        let s = compile(&m_odd().push_shift());
        assert_eq!(s.evaluate(&[0, 0]).unwrap(), q(1, 2));
        assert_eq!(s.evaluate(&[0, 1]).unwrap(), q(0, 1));
        assert_eq!(s.evaluate(&[1, 0]).unwrap(), q(1, 2));
        let ss = compile(&m_odd().push_shift().push_shift());
        let m = compile(&m_odd());
        for n in 0..=6 {
            for w in all_words(2, n) {
                assert_eq!(ss.eval(&w), m.eval(&w));
            }
        }
    }

    #[test]
    fn rule_push_examples() {
        let led = LocalRule::ledrappier();
        let tri = LocalRule::triangle();
        let u2 = compile(&uniform2().push_rule(&led));
        let u3 = compile(&MeasureSpec::uniform(tri.alphabet()).push_rule(&tri));
        for n in 0..=6 {
            for w in all_words(2, n) {
                assert_eq!(u2.eval(&w), rational::inverse_power(2, n));
            }
            for w in all_words(3, n) {
                assert_eq!(u3.eval(&w), rational::inverse_power(3, n));
            }
        }
        let twice = compile(&m_odd().push_rule(&led).push_rule(&led));
        let m = compile(&m_odd());
        for n in 0..=6 {
            for w in all_words(2, n) {
                assert_eq!(twice.eval(&w), m.eval(&w), "word {w:?}");
            }
        }
        let once = compile(&m_odd().push_rule(&led));
        assert_eq!(once.evaluate(&[0, 0]).unwrap(), q(1, 2));
        assert_eq!(once.evaluate(&[1, 1]).unwrap(), q(1, 2));
        assert_eq!(once.evaluate(&[0, 1]).unwrap(), q(0, 1));
    }

    #[test]
    fn non_left_permutative_push_uses_search() {
        // r(a, b) = b is right- but not left-permutative: τ_* is the shift.
        let a = Alphabet::numeric(2).unwrap();
        let proj = LocalRule::from_fn(a, |_, b| b).unwrap();
        assert!(proj.left_solver().is_none());
        let via_rule = compile(&m_odd().push_rule(&proj));
        let via_shift = compile(&m_odd().push_shift());
        for n in 0..=6 {
            for w in all_words(2, n) {
                assert_eq!(via_rule.eval(&w), via_shift.eval(&w));
            }
        }
    }

    #[test]
    fn invariance_checks() {
        let led = LocalRule::ledrappier();
        let k = compile(&kitchens());
        assert!(k.check_shift_invariance(6).unwrap());
        assert!(k.check_rule_invariance(&led, 6).unwrap());
        let m = compile(&m_odd());
        assert!(!m.check_shift_invariance(1).unwrap());
        let zero = compile(&MeasureSpec::atomic(led.alphabet(), vec![], vec![0]));
        assert!(zero.check_shift_invariance(6).unwrap());
        assert!(zero.check_rule_invariance(&led, 6).unwrap());
        let one = compile(&MeasureSpec::atomic(led.alphabet(), vec![], vec![1]));
        assert!(one.check_shift_invariance(6).unwrap());
        assert!(!one.check_rule_invariance(&led, 6).unwrap());
        assert!(matches!(
            k.check_shift_invariance(14),
            Err(Error::DepthCapExceeded { len: 15, cap: 14 })
        ));
    }

    #[test]
    fn entropy_examples() {
        let u = compile(&uniform2());
        for n in 1..=10 {
            assert!((u.entropy_rate_estimate(n).unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
        }
        let zero = compile(&MeasureSpec::atomic(&Alphabet::numeric(2).unwrap(), vec![1], vec![0]));
        assert_eq!(zero.entropy_rate_estimate(8).unwrap(), 0.0);
        assert_eq!(zero.block_entropy(8).unwrap(), 0.0);
    }

    #[test]
    fn mixture_linearity() {
        let led = LocalRule::ledrappier();
        let parts = [m_odd(), m_odd().push_shift(), m_odd().push_rule(&led), uniform2()];
        let weights = [q(1, 2), q(1, 6), q(1, 12), q(1, 4)];
        let mix = compile(&MeasureSpec::mixture(
            weights.iter().cloned().zip(parts.iter().cloned()).collect(),
        ));
        let compiled: Vec<Measure> = parts.iter().map(compile).collect();
        for n in 0..=6 {
            for w in all_words(2, n) {
                let want: Q = weights
                    .iter()
                    .zip(&compiled)
                    .map(|(c, m)| c * m.eval(&w))
                    .sum();
                assert_eq!(mix.eval(&w), want);
            }
        }
    }

    #[test]
    fn compile_errors() {
        let bad_weights = MeasureSpec::mixture(vec![(q(1, 2), uniform2()), (q(1, 4), uniform2())]);
        assert!(matches!(Measure::compile(&bad_weights), Err(Error::InvalidMeasure(_))));
        let neg = MeasureSpec::mixture(vec![(q(3, 2), uniform2()), (q(-1, 2), uniform2())]);
        assert!(Measure::compile(&neg).is_err());
        let empty_period = MeasureSpec::atomic(&Alphabet::numeric(2).unwrap(), vec![], vec![]);
        assert!(Measure::compile(&empty_period).is_err());
        let wrong_rule = uniform2().push_rule(&LocalRule::triangle());
        assert!(Measure::compile(&wrong_rule).is_err());
        let not_subgroup = MeasureSpec::SubgroupUniform {
            group: GroupSpec::Cyclic { n: 4 },
            subgroup: vec![0, 1],
        };
        assert!(matches!(Measure::compile(&not_subgroup), Err(Error::NotSubgroup(_))));
        let mu = compile(&uniform2());
        assert!(matches!(mu.evaluate(&[0, 2]), Err(Error::SymbolOutOfRange { .. })));
        assert!(matches!(
            mu.evaluate(&[0; 15]),
            Err(Error::DepthCapExceeded { len: 15, cap: 14 })
        ));
    }

    #[test]
    fn product_measure() {
        let spec = MeasureSpec::Product {
            factors: vec![
                uniform2(),
                MeasureSpec::atomic(&Alphabet::numeric(3).unwrap(), vec![], vec![0]),
            ],
        };
        let mu = compile(&spec);
        assert_eq!(mu.alphabet().size(), 6);
        assert_eq!(mu.alphabet().label(5), "(1,2)");
        assert_eq!(mu.evaluate(&[0, 3]).unwrap(), q(1, 4));
        assert_eq!(mu.evaluate(&[0, 4]).unwrap(), q(0, 1));
        assert!(mu.check_consistency(5).unwrap());
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let z3 = FiniteGroup::cyclic(3).unwrap();
        let g = FiniteGroup::product(&z2, &z3).unwrap();
        assert!(mu.check_rule_invariance(&g.group_rule(), 4).unwrap());
    }

    #[test]
    fn support_enumeration_is_ordered_and_complete() {
        let mu = compile(&kitchens());
        for n in 0..=9 {
            let support = mu.support_words(n).unwrap();
            let brute: Vec<(Word, Q)> = all_words(2, n)
                .into_iter()
                .map(|w| {
                    let m = mu.eval(&w);
                    (w, m)
                })
                .filter(|(_, m)| !m.is_zero())
                .collect();
            assert_eq!(support, brute);
            let total: Q = support.iter().map(|(_, m)| m.clone()).sum();
            assert!(total.is_one());
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = kitchens();
        let text = serde_json::to_string_pretty(&spec).unwrap();
        assert!(text.contains("\"1/4\""));
        let back: MeasureSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
