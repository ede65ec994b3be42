//! The set-lifted automaton `τ′(A, B) = {r(a, b) : a ∈ A, b ∈ B}`, finite
//! outer approximations of `Z_{τ,k}`, and the empirical factor `π_μ`.
//!
//! Sets are bitmasks over the alphabet, so lifting needs `|Λ| ≤ 64`.

use num_traits::Zero;
use serde::Serialize;

use crate::groups::{FiniteGroup, Subgroup};
use crate::measures::Measure;
use crate::rational::{self, Q};
use crate::rules::{LocalRule, Symbol, Word};
use crate::{par, Error, Result};

pub type SetMask = u64;
pub type SetWord = Vec<SetMask>;

pub const MAX_LIFT_ALPHABET: usize = 64;
const TABLE_ALPHABET: usize = 8;

pub fn mask_of(symbols: &[Symbol]) -> SetMask {
    symbols.iter().fold(0, |m, &s| m | 1 << s)
}

pub fn members(mask: SetMask) -> Vec<Symbol> {
    (0..64).filter(|&s| mask >> s & 1 == 1).map(|s| s as Symbol).collect()
}

pub fn size(mask: SetMask) -> usize {
    mask.count_ones() as usize
}

/// Set words as lists of member lists, for reports.
pub fn expand(word: &[SetMask]) -> Vec<Vec<Symbol>> {
    word.iter().map(|&m| members(m)).collect()
}

/// All `k`-element subsets of `{0, ..., n-1}`, in increasing mask order.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<SetMask> {
    fn go(start: usize, n: usize, k: usize, acc: SetMask, out: &mut Vec<SetMask>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for s in start..=n - k {
            go(s + 1, n, k - 1, acc | 1 << s, out);
        }
    }
    let mut out = vec![];
    if k <= n {
        go(0, n, k, 0, &mut out);
    }
    out.sort_unstable();
    out
}

/// `τ′`, the lift of a local rule to nonempty subsets.
#[derive(Debug, Clone)]
pub struct SetRule {
    base: LocalRule,
    table: Option<Vec<SetMask>>,
}

impl SetRule {
    pub fn base(&self) -> &LocalRule {
        &self.base
    }

    #[inline]
    pub fn apply_pair(&self, a: SetMask, b: SetMask) -> SetMask {
        match &self.table {
            Some(t) => t[(a as usize) << self.base.size() | b as usize],
            None => self.compute(a, b),
        }
    }

    fn compute(&self, a: SetMask, b: SetMask) -> SetMask {
        let bs = members(b);
        members(a)
            .into_iter()
            .flat_map(|x| bs.iter().map(move |&y| (x, y)))
            .fold(0, |m, (x, y)| m | 1 << self.base.get(x, y))
    }

    /// One step of `τ′` on a finite set word.
    pub fn apply(&self, w: &[SetMask]) -> SetWord {
        w.windows(2).map(|p| self.apply_pair(p[0], p[1])).collect()
    }
}

pub fn lift_rule(rule: &LocalRule) -> Result<SetRule> {
    let k = rule.size();
    if k > MAX_LIFT_ALPHABET {
        return Err(Error::Precondition(format!(
            "set lifting supports at most {MAX_LIFT_ALPHABET} symbols, got {k}"
        )));
    }
    let mut lifted = SetRule {
        base: rule.clone(),
        table: None,
    };
    if k <= TABLE_ALPHABET {
        let n = 1usize << k;
        let mut table = vec![0; n * n];
        for a in 1..n {
            for b in 1..n {
                table[a << k | b] = lifted.compute(a as SetMask, b as SetMask);
            }
        }
        lifted.table = Some(table);
    }
    Ok(lifted)
}

/// Length-`len` words over `k`-element subsets whose `τ′`-iterates up to
/// `steps` keep every component at size `k`, in lexicographic order.
pub fn z_words(rule: &LocalRule, k: usize, len: usize, steps: usize) -> Result<Vec<SetWord>> {
    let lifted = lift_rule(rule)?;
    if k == 0 || k > rule.size() {
        return Err(Error::Precondition(format!("k must lie in 1..={}", rule.size())));
    }
    if steps >= len {
        return Err(Error::Precondition(format!("need N < L, got N={steps}, L={len}")));
    }
    let candidates = subsets_of_size(rule.size(), k);
    let parts = par::map(&candidates, |&first| {
        let mut out = vec![];
        let mut levels: Vec<SetWord> = vec![vec![]; steps + 1];
        levels[0].push(first);
        extend_z(&lifted, k, len, steps, &candidates, &mut levels, &mut out);
        out
    });
    Ok(parts.concat())
}

fn extend_z(
    lifted: &SetRule,
    k: usize,
    len: usize,
    steps: usize,
    candidates: &[SetMask],
    levels: &mut Vec<SetWord>,
    out: &mut Vec<SetWord>,
) {
    let j = levels[0].len();
    if j == len {
        out.push(levels[0].clone());
        return;
    }
    'next: for &a in candidates {
        levels[0].push(a);
        let mut pushed = 1;
        for t in 1..=steps.min(j) {
            let prev = &levels[t - 1];
            let img = lifted.apply_pair(prev[j - t], prev[j - t + 1]);
            if size(img) != k {
                for level in levels.iter_mut().take(pushed) {
                    level.pop();
                }
                continue 'next;
            }
            levels[t].push(img);
            pushed += 1;
        }
        extend_z(lifted, k, len, steps, candidates, levels, out);
        for level in levels.iter_mut().take(pushed) {
            level.pop();
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupZReport {
    pub words: Vec<Vec<Vec<Symbol>>>,
    /// Subgroups whose right cosets make up some surviving word.
    pub subgroups: Vec<Vec<Symbol>>,
    /// Every word is made of right cosets `Hg` of one subgroup `H` with
    /// `g H g⁻¹ = H`.
    pub verdict: bool,
}

/// [`z_words`] for the group rule, with the coset/normalizer verdict.
pub fn z_words_group(g: &FiniteGroup, k: usize, len: usize, steps: usize) -> Result<GroupZReport> {
    if k == 0 || !g.order().is_multiple_of(k) {
        return Err(Error::Precondition(format!(
            "k={k} does not divide the group order {}",
            g.order()
        )));
    }
    let words = z_words(&g.group_rule(), k, len, steps)?;
    let mut subgroups: Vec<Vec<Symbol>> = vec![];
    let mut verdict = true;
    for w in &words {
        match word_subgroup(g, w) {
            Some(h) => {
                if !subgroups.iter().any(|s| s.as_slice() == h.elements()) {
                    subgroups.push(h.elements().to_vec());
                }
            }
            None => verdict = false,
        }
    }
    subgroups.sort();
    Ok(GroupZReport {
        words: words.iter().map(|w| expand(w)).collect(),
        subgroups,
        verdict,
    })
}

fn word_subgroup(g: &FiniteGroup, w: &[SetMask]) -> Option<Subgroup> {
    let mut common: Option<Subgroup> = None;
    for &set in w {
        let elems = members(set);
        let h = g.as_right_coset(&elems)?;
        let rep = elems[0];
        let conj = g.conjugate(rep, &h);
        if conj != h.elements() {
            return None;
        }
        match &common {
            None => common = Some(h),
            Some(c) if c != &h => return None,
            Some(_) => {}
        }
    }
    common
}

#[derive(Debug, Clone, Serialize)]
pub struct PiEntry {
    pub word: Word,
    #[serde(with = "rational::serde_str")]
    pub mass: Q,
    pub image: Vec<Vec<Symbol>>,
    /// Every component is unchanged when the last symbol of its
    /// conditioning window is dropped.
    pub stable: bool,
}

pub const DEFAULT_MARGIN: usize = 3;

pub(crate) fn support_mask(mu: &Measure, future: &[Symbol]) -> SetMask {
    let mut v = Vec::with_capacity(future.len() + 1);
    v.push(0);
    v.extend_from_slice(future);
    let mut mask = 0;
    for a in mu.alphabet().symbols() {
        v[0] = a;
        if !mu.eval(&v).is_zero() {
            mask |= 1 << a;
        }
    }
    mask
}

/// `π_μ` on a finite word: component `i` is the support of `x_i` given
/// `x_{i+1}, ..., x_{n-1}`, for `i < n - margin`. Also reports stability.
pub(crate) fn pi_of(mu: &Measure, x: &[Symbol], margin: usize) -> (SetWord, bool) {
    let n = x.len();
    let keep = n.saturating_sub(margin);
    let mut image = Vec::with_capacity(keep);
    let mut stable = true;
    for i in 0..keep {
        let s = support_mask(mu, &x[i + 1..]);
        if stable && support_mask(mu, &x[i + 1..n - 1]) != s {
            stable = false;
        }
        image.push(s);
    }
    (image, stable)
}

fn check_lift(mu: &Measure, rule: &LocalRule, margin: usize) -> Result<()> {
    if rule.size() != mu.alphabet().size() {
        return Err(Error::Precondition("rule and measure alphabets differ".into()));
    }
    if mu.alphabet().size() > MAX_LIFT_ALPHABET {
        return Err(Error::Precondition("alphabet too large for set masks".into()));
    }
    if margin == 0 {
        return Err(Error::Precondition("margin must be at least 1".into()));
    }
    Ok(())
}

/// The finite-depth surrogate of `π_μ` over every positive word of length
/// `n`.
pub fn pi_factor(mu: &Measure, rule: &LocalRule, n: usize, margin: usize) -> Result<Vec<PiEntry>> {
    check_lift(mu, rule, margin)?;
    let words = mu.support_words(n)?;
    Ok(par::map(&words, |(w, m)| {
        let (image, stable) = pi_of(mu, w, margin);
        PiEntry {
            word: w.clone(),
            mass: m.clone(),
            image: expand(&image),
            stable,
        }
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct IntertwineReport {
    pub holds: bool,
    pub checked: usize,
    pub skipped: usize,
    pub violations: Vec<Word>,
}

/// `π_μ ∘ τ = τ′ ∘ π_μ` on stable positive words of length `n`.
pub fn intertwining_check(mu: &Measure, rule: &LocalRule, n: usize, margin: usize) -> Result<IntertwineReport> {
    check_lift(mu, rule, margin)?;
    if n < margin + 2 {
        return Err(Error::Precondition(format!("need n >= margin + 2, got n={n}")));
    }
    let lifted = lift_rule(rule)?;
    let words = mu.support_words(n)?;
    let rows = par::map(&words, |(x, _)| {
        let (pi_x, s1) = pi_of(mu, x, margin);
        let tx = rule.apply_unchecked(x);
        let (pi_tx, s2) = pi_of(mu, &tx, margin);
        if !(s1 && s2) {
            return None;
        }
        let lifted_pi = lifted.apply(&pi_x);
        Some(lifted_pi[..pi_tx.len()] == pi_tx[..])
    });
    let mut report = IntertwineReport {
        holds: true,
        checked: 0,
        skipped: 0,
        violations: vec![],
    };
    for ((x, _), row) in words.into_iter().zip(rows) {
        match row {
            None => report.skipped += 1,
            Some(true) => report.checked += 1,
            Some(false) => {
                report.checked += 1;
                report.holds = false;
                report.violations.push(x);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupSpec;
    use crate::measures::{AlphabetSpec, MeasureSpec};
    use crate::rules::Alphabet;

    fn triangle_mask(labels: &str) -> SetMask {
        let t = LocalRule::triangle();
        let syms: Vec<Symbol> = labels
            .chars()
            .map(|c| t.alphabet().index_of(&c.to_string()).unwrap())
            .collect();
        mask_of(&syms)
    }

    #[test]
    fn lift_examples() {
        let led = lift_rule(&LocalRule::ledrappier()).unwrap();
        assert_eq!(led.apply_pair(0b11, 0b11), 0b11);
        let tri = lift_rule(&LocalRule::triangle()).unwrap();
        let abc = triangle_mask("ABC");
        for pair in ["AB", "AC", "BC"] {
            let m = triangle_mask(pair);
            assert_eq!(tri.apply_pair(m, m), abc, "{pair}");
        }
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(tri.apply_pair(1 << a, 1 << b), 1 << LocalRule::triangle().get(a, b));
            }
        }
    }

    #[test]
    fn untabled_lift_matches_table() {
        let g = FiniteGroup::dihedral(5).unwrap();
        let big = lift_rule(&g.group_rule()).unwrap();
        assert!(big.table.is_none());
        let small = lift_rule(&LocalRule::triangle()).unwrap();
        assert_eq!(small.compute(0b011, 0b110), small.apply_pair(0b011, 0b110));
        let c5 = mask_of(&[0, 1, 2, 3, 4]);
        assert_eq!(big.apply_pair(c5, c5), c5);
    }

    #[test]
    fn z_word_examples() {
        assert!(z_words(&LocalRule::triangle(), 2, 3, 1).unwrap().is_empty());
        let led = LocalRule::ledrappier();
        assert_eq!(z_words(&led, 1, 4, 3).unwrap().len(), 16);
        assert_eq!(z_words(&led, 2, 4, 3).unwrap(), vec![vec![0b11; 4]]);
        assert!(z_words(&led, 3, 4, 3).is_err());
        assert!(z_words(&led, 1, 3, 3).is_err());
    }

    #[test]
    fn z_words_shrink_with_more_steps() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let rule = g.group_rule();
        let mut prev = z_words(&rule, 2, 4, 0).unwrap();
        for n in 1..4 {
            let cur = z_words(&rule, 2, 4, n).unwrap();
            assert!(cur.iter().all(|w| prev.contains(w)));
            prev = cur;
        }
    }

    #[test]
    fn group_z_examples() {
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let r = z_words_group(&z4, 2, 3, 2).unwrap();
        assert!(r.verdict);
        assert_eq!(r.subgroups, vec![vec![0, 2]]);
        assert_eq!(r.words.len(), 8);
        let d3 = FiniteGroup::dihedral(3).unwrap();
        let r = z_words_group(&d3, 3, 3, 2).unwrap();
        assert!(r.verdict);
        assert_eq!(r.subgroups, vec![vec![0, 1, 2]]);
        assert_eq!(r.words.len(), 8);
        let r = z_words_group(&d3, 6, 4, 2).unwrap();
        assert_eq!(r.words, vec![vec![vec![0, 1, 2, 3, 4, 5]; 4]]);
        assert!(r.verdict);
    }

    #[test]
    fn pi_factor_examples() {
        let led = LocalRule::ledrappier();
        let u = Measure::compile(&MeasureSpec::Uniform {
            alphabet: AlphabetSpec::Size(2),
        })
        .unwrap();
        for e in pi_factor(&u, &led, 6, 2).unwrap() {
            assert_eq!(e.image, vec![vec![0, 1]; 4]);
        }
        let z4 = GroupSpec::Cyclic { n: 4 };
        let h = Measure::compile(&MeasureSpec::SubgroupUniform {
            group: z4.clone(),
            subgroup: vec![0, 2],
        })
        .unwrap();
        let rule = z4.build().unwrap().group_rule();
        for e in pi_factor(&h, &rule, 5, 2).unwrap() {
            assert_eq!(e.image, vec![vec![0, 2]; 3]);
            assert!(e.stable);
        }
        assert!(intertwining_check(&u, &led, 6, 2).unwrap().holds);
        assert!(intertwining_check(&h, &rule, 5, 2).unwrap().holds);
    }

    #[test]
    fn lift_is_monotone_for_small_alphabets() {
        let a3 = Alphabet::numeric(3).unwrap();
        let rules = [
            LocalRule::triangle(),
            LocalRule::from_fn(a3.clone(), |a, b| (a * b) % 3).unwrap(),
            LocalRule::from_fn(a3, |a, _| a).unwrap(),
        ];
        for rule in &rules {
            let l = lift_rule(rule).unwrap();
            for a in 1..8u64 {
                for b in 1..8u64 {
                    for a2 in (1..8u64).filter(|x| x & a == a) {
                        for b2 in (1..8u64).filter(|x| x & b == b) {
                            let small = l.apply_pair(a, b);
                            assert_eq!(small & l.apply_pair(a2, b2), small);
                        }
                    }
                }
            }
        }
    }
}
