//! Exact conditional distributions of the symbol at index 0.
//!
//! Conditioning on a future `w = (x_1, ..., x_n)` gives
//! `P(x_0 = a | w) = μ([a w]) / Σ_b μ([b w])`; conditioning on the image
//! word `τ(x)_{0..n-1} = w` sums over `τ`-preimages instead.
//! Zero-mass conditioning words are skipped by every census.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::groups::{FiniteGroup, Subgroup};
use crate::measures::Measure;
use crate::rational::{self, Q};
use crate::rules::{LocalRule, Symbol, Word};
use crate::{par, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionalReport {
    pub word: Word,
    pub support: Vec<Symbol>,
    /// Indexed by symbol.
    #[serde(with = "rational::serde_str_vec")]
    pub probs: Vec<Q>,
    pub uniform: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coset_of: Option<Vec<Symbol>>,
    pub violation: bool,
    /// Mass of the conditioning event.
    #[serde(with = "rational::serde_str")]
    pub mass: Q,
}

impl ConditionalReport {
    fn from_masses(word: &[Symbol], masses: Vec<Q>) -> Result<Self> {
        let mass: Q = masses.iter().sum();
        if !mass.is_positive() {
            return Err(Error::ZeroMass { word: word.to_vec() });
        }
        let probs: Vec<Q> = masses.into_iter().map(|m| m / &mass).collect();
        let support: Vec<Symbol> = (0..probs.len())
            .filter(|&a| probs[a].is_positive())
            .map(|a| a as Symbol)
            .collect();
        let share = Q::new(1.into(), support.len().into());
        let uniform = support.iter().all(|&a| probs[a as usize] == share);
        Ok(Self {
            word: word.to_vec(),
            support,
            probs,
            uniform,
            coset_of: None,
            violation: !uniform,
            mass,
        })
    }
}

fn masses_at_zero(mu: &Measure, w: &[Symbol]) -> Vec<Q> {
    let mut v = Vec::with_capacity(w.len() + 1);
    v.push(0);
    v.extend_from_slice(w);
    mu.alphabet()
        .symbols()
        .map(|a| {
            v[0] = a;
            mu.eval(&v)
        })
        .collect()
}

fn support_at_zero(mu: &Measure, w: &[Symbol]) -> Vec<Symbol> {
    let mut v = Vec::with_capacity(w.len() + 1);
    v.push(0);
    v.extend_from_slice(w);
    mu.alphabet()
        .symbols()
        .filter(|&a| {
            v[0] = a;
            !mu.eval(&v).is_zero()
        })
        .collect()
}

/// The conditional law of `x_0` given `x_1 ... x_n = w`.
pub fn conditional_at_zero(mu: &Measure, w: &[Symbol]) -> Result<ConditionalReport> {
    mu.check_len(w.len() + 1)?;
    mu.alphabet().check_word(w)?;
    ConditionalReport::from_masses(w, masses_at_zero(mu, w))
}

/// Conditioning words of length `n`: all `w` with `Σ_a μ([a w]) > 0`,
/// sorted.
pub fn conditioning_words(mu: &Measure, n: usize) -> Result<Vec<Word>> {
    let mut words: Vec<Word> = mu
        .support_words(n + 1)?
        .into_iter()
        .map(|(v, _)| v[1..].to_vec())
        .collect();
    words.sort_unstable();
    words.dedup();
    Ok(words)
}

/// A conditioning word is stabilized when every positive one-symbol
/// extension `w b` yields the same index-0 support as `w`.
pub fn is_stabilized(mu: &Measure, w: &[Symbol]) -> Result<bool> {
    mu.check_len(w.len() + 2)?;
    mu.alphabet().check_word(w)?;
    Ok(stabilized(mu, w))
}

fn stabilized(mu: &Measure, w: &[Symbol]) -> bool {
    let base = support_at_zero(mu, w);
    let mut ext = w.to_vec();
    ext.push(0);
    mu.alphabet().symbols().all(|b| {
        *ext.last_mut().unwrap() = b;
        let s = support_at_zero(mu, &ext);
        s.is_empty() || s == base
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Census {
    pub n: usize,
    pub words: usize,
    #[serde(with = "rational::serde_str")]
    pub uniform_mass: Q,
    /// Present when `n + 2` is within the depth cap.
    #[serde(with = "rational::serde_str_opt")]
    pub stabilized_mass: Option<Q>,
    #[serde(with = "rational::serde_str_opt")]
    pub stabilized_uniform_mass: Option<Q>,
    /// Mass carried by each stabilized support.
    pub stabilized_supports: Vec<SupportMass>,
    pub failures: Vec<ConditionalReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportMass {
    pub support: Vec<Symbol>,
    #[serde(with = "rational::serde_str")]
    pub mass: Q,
}

/// Mass of length-`n` conditioning words whose conditional is exactly
/// uniform on its support, together with every failing report.
pub fn uniformity_census(mu: &Measure, n: usize) -> Result<Census> {
    let words = conditioning_words(mu, n)?;
    let with_stab = n + 2 <= mu.depth_cap();
    let rows = par::map(&words, |w| {
        let report = ConditionalReport::from_masses(w, masses_at_zero(mu, w)).expect("positive word");
        let stab = with_stab && stabilized(mu, w);
        (report, stab)
    });
    let mut uniform_mass = Q::zero();
    let mut stabilized_mass = Q::zero();
    let mut stabilized_uniform_mass = Q::zero();
    let mut supports: BTreeMap<Vec<Symbol>, Q> = BTreeMap::new();
    let mut failures = vec![];
    for (report, stab) in rows {
        if report.uniform {
            uniform_mass += &report.mass;
        }
        if stab {
            stabilized_mass += &report.mass;
            if report.uniform {
                stabilized_uniform_mass += &report.mass;
            }
            *supports.entry(report.support.clone()).or_insert_with(Q::zero) += &report.mass;
        }
        if !report.uniform {
            failures.push(report);
        }
    }
    Ok(Census {
        n,
        words: words.len(),
        uniform_mass,
        stabilized_mass: with_stab.then_some(stabilized_mass),
        stabilized_uniform_mass: with_stab.then_some(stabilized_uniform_mass),
        stabilized_supports: supports
            .into_iter()
            .map(|(support, mass)| SupportMass { support, mass })
            .collect(),
        failures,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SupportSizeReport {
    pub holds: bool,
    pub checked: usize,
    pub skipped: usize,
    #[serde(with = "rational::serde_str")]
    pub checked_mass: Q,
    #[serde(with = "rational::serde_str")]
    pub violation_mass: Q,
    pub violations: Vec<Word>,
}

/// `|Λ_{μ,x}| = |Λ_{μ,τx}|` on stabilized conditioning words of length
/// `n + 1` whose `τ`-image is stabilized too. Masses are those of the
/// conditioning events.
pub fn support_size_tau_invariance(mu: &Measure, rule: &LocalRule, n: usize) -> Result<SupportSizeReport> {
    if !rule.is_bipermutative() {
        return Err(Error::Precondition("rule is not bi-permutative".into()));
    }
    if rule.size() != mu.alphabet().size() {
        return Err(Error::Precondition("rule and measure alphabets differ".into()));
    }
    mu.check_len(n + 3)?;
    let words = conditioning_words(mu, n + 1)?;
    let rows = par::map(&words, |w| {
        let image = rule.apply_unchecked(w);
        if !stabilized(mu, w) || !stabilized(mu, &image) {
            return None;
        }
        let ok = support_at_zero(mu, w).len() == support_at_zero(mu, &image).len();
        Some((ok, masses_at_zero(mu, w).into_iter().sum::<Q>()))
    });
    let mut report = SupportSizeReport {
        holds: true,
        checked: 0,
        skipped: 0,
        checked_mass: Q::zero(),
        violation_mass: Q::zero(),
        violations: vec![],
    };
    for (w, row) in words.into_iter().zip(rows) {
        match row {
            None => report.skipped += 1,
            Some((ok, mass)) => {
                report.checked += 1;
                report.checked_mass += &mass;
                if !ok {
                    report.holds = false;
                    report.violation_mass += mass;
                    report.violations.push(w);
                }
            }
        }
    }
    Ok(report)
}

fn check_group_alphabet(mu: &Measure, g: &FiniteGroup) -> Result<()> {
    if mu.alphabet().size() != g.order() {
        return Err(Error::Precondition(format!(
            "measure alphabet has {} symbols, group has order {}",
            mu.alphabet().size(),
            g.order()
        )));
    }
    Ok(())
}

/// [`conditional_at_zero`] plus a test that the support is a right coset
/// `H g`; `coset_of` holds `H` when it is.
pub fn coset_report(mu: &Measure, g: &FiniteGroup, w: &[Symbol]) -> Result<ConditionalReport> {
    check_group_alphabet(mu, g)?;
    let mut report = conditional_at_zero(mu, w)?;
    fill_coset(g, &mut report);
    Ok(report)
}

fn fill_coset(g: &FiniteGroup, report: &mut ConditionalReport) {
    report.coset_of = g.as_right_coset(&report.support).map(|h| h.elements().to_vec());
    report.violation = !report.uniform || report.coset_of.is_none();
}

#[derive(Debug, Clone, Serialize)]
pub struct CosetCensus {
    pub n: usize,
    pub words: usize,
    /// Distinct subgroups `H` seen, with the mass of words whose support is
    /// a coset of `H`.
    pub subgroups: Vec<SupportMass>,
    pub violations: Vec<ConditionalReport>,
}

/// [`coset_report`] over every conditioning word of length `n`.
pub fn coset_census(mu: &Measure, g: &FiniteGroup, n: usize) -> Result<CosetCensus> {
    check_group_alphabet(mu, g)?;
    let words = conditioning_words(mu, n)?;
    let reports = par::map(&words, |w| {
        let mut r = ConditionalReport::from_masses(w, masses_at_zero(mu, w)).expect("positive word");
        fill_coset(g, &mut r);
        r
    });
    let mut subgroups: BTreeMap<Vec<Symbol>, Q> = BTreeMap::new();
    let mut violations = vec![];
    for r in reports {
        if let Some(h) = &r.coset_of {
            *subgroups.entry(h.clone()).or_insert_with(Q::zero) += &r.mass;
        }
        if r.violation {
            violations.push(r);
        }
    }
    Ok(CosetCensus {
        n,
        words: words.len(),
        subgroups: subgroups
            .into_iter()
            .map(|(support, mass)| SupportMass { support, mass })
            .collect(),
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct UPartition {
    /// The right coset `H w_1`.
    pub coset: Vec<Symbol>,
    /// Elements of the coset grouped by the index-0 support they force.
    pub blocks: Vec<Vec<Symbol>>,
    pub forced: Vec<Vec<Symbol>>,
    /// Elements whose conditioning word has zero mass.
    pub unreachable: Vec<Symbol>,
    pub u: Option<Vec<Symbol>>,
    pub diagnostic: Option<String>,
}

/// Splits `H w_1` by the support forced at index 0 when `w_1` is replaced
/// by each `y ∈ H w_1`, and recognizes the blocks as right cosets of some
/// `U ≤ H`.
pub fn u_subgroup_partition(mu: &Measure, g: &FiniteGroup, h: &Subgroup, w: &[Symbol]) -> Result<UPartition> {
    check_group_alphabet(mu, g)?;
    if w.is_empty() {
        return Err(Error::WordTooShort { needed: 1, got: 0 });
    }
    mu.check_len(w.len() + 1)?;
    mu.alphabet().check_word(w)?;
    let coset = g.right_coset(h, w[0]);
    let mut groups: BTreeMap<Vec<Symbol>, Vec<Symbol>> = BTreeMap::new();
    let mut unreachable = vec![];
    let mut v = w.to_vec();
    for &y in &coset {
        v[0] = y;
        let support = support_at_zero(mu, &v);
        if support.is_empty() {
            unreachable.push(y);
        } else {
            groups.entry(support).or_default().push(y);
        }
    }
    let mut pairs: Vec<(Vec<Symbol>, Vec<Symbol>)> = groups.into_iter().map(|(s, b)| (b, s)).collect();
    pairs.sort();
    let (blocks, forced): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();

    let mut diagnostic = None;
    let u = if blocks.is_empty() {
        diagnostic = Some("no element of the coset has positive mass".into());
        None
    } else {
        match g.as_right_coset(&blocks[0]) {
            None => {
                diagnostic = Some(format!("block {:?} is not a right coset", blocks[0]));
                None
            }
            Some(u) if !u.elements().iter().all(|&x| h.contains(x)) => {
                diagnostic = Some(format!("{:?} is not contained in H", u.elements()));
                None
            }
            Some(u) => {
                let bad = blocks.iter().find(|b| {
                    let mut c = g.right_coset(&u, b[0]);
                    c.sort_unstable();
                    c != **b
                });
                match bad {
                    Some(b) => {
                        diagnostic = Some(format!("block {b:?} is not a right coset of {:?}", u.elements()));
                        None
                    }
                    None => Some(u.elements().to_vec()),
                }
            }
        }
    };
    Ok(UPartition {
        coset,
        blocks,
        forced,
        unreachable,
        u,
        diagnostic,
    })
}

/// The conditional law of `x_0` given `τ(x)_{0..n-1} = w`.
pub fn conditional_given_tau(mu: &Measure, rule: &LocalRule, w: &[Symbol]) -> Result<ConditionalReport> {
    if rule.size() != mu.alphabet().size() {
        return Err(Error::Precondition("rule and measure alphabets differ".into()));
    }
    mu.check_len(w.len() + 1)?;
    mu.alphabet().check_word(w)?;
    ConditionalReport::from_masses(w, masses_given_tau(mu, rule, w))
}

fn masses_given_tau(mu: &Measure, rule: &LocalRule, w: &[Symbol]) -> Vec<Q> {
    let mut masses = vec![Q::zero(); mu.alphabet().size()];
    for v in rule.preimages(w) {
        let m = mu.eval(&v);
        if !m.is_zero() {
            masses[v[0] as usize] += m;
        }
    }
    masses
}

/// Image words of length `n`: all `w` with `μ(τ⁻¹[w]) > 0`, sorted.
pub fn image_words(mu: &Measure, rule: &LocalRule, n: usize) -> Result<Vec<Word>> {
    let mut words: Vec<Word> = mu
        .support_words(n + 1)?
        .into_iter()
        .map(|(v, _)| rule.apply_unchecked(&v))
        .collect();
    words.sort_unstable();
    words.dedup();
    Ok(words)
}

/// `Σ_w μ(τ⁻¹[w]) · H(x_0 | τ(x)_{0..n-1} = w)`, the depth-`n` surrogate
/// for `∫ -ln μ(x_0 | τ⁻¹B) dμ`.
pub fn tau_log_integral(mu: &Measure, rule: &LocalRule, n: usize) -> Result<f64> {
    if rule.size() != mu.alphabet().size() {
        return Err(Error::Precondition("rule and measure alphabets differ".into()));
    }
    let words = image_words(mu, rule, n)?;
    let terms = par::map(&words, |w| {
        let masses = masses_given_tau(mu, rule, w);
        let total: Q = masses.iter().sum();
        let h: f64 = masses.iter().map(|m| rational::plogp(&(m / &total))).sum();
        rational::to_f64(&total) * h
    });
    Ok(terms.iter().sum())
}

#[derive(Debug, Clone, Serialize)]
pub struct TailProbe {
    pub k: usize,
    pub n: usize,
    pub words: usize,
    #[serde(with = "rational::serde_str")]
    pub determined_mass: Q,
}

/// Mass of conditioning words `x_1..x_n` whose index-0 support does not
/// change when `x_1..x_{k-1}` vary over positive-mass choices with
/// `x_k..x_n` held fixed.
pub fn tail_measurability_probe(mu: &Measure, k: usize, n: usize) -> Result<TailProbe> {
    if k == 0 || k >= n {
        return Err(Error::Precondition(format!("need 1 <= k < n, got k={k}, n={n}")));
    }
    let words = conditioning_words(mu, n)?;
    let rows = par::map(&words, |w| {
        let masses = masses_at_zero(mu, w);
        let support: Vec<Symbol> = (0..masses.len())
            .filter(|&a| !masses[a].is_zero())
            .map(|a| a as Symbol)
            .collect();
        (support, masses.into_iter().sum::<Q>())
    });
    // tail -> (first support seen, all supports equal, mass)
    type Group<'a> = (Option<&'a Vec<Symbol>>, bool, Q);
    let mut by_tail: BTreeMap<&[Symbol], Group> = BTreeMap::new();
    for (w, (support, mass)) in words.iter().zip(&rows) {
        let entry = by_tail.entry(&w[k - 1..]).or_insert((None, true, Q::zero()));
        match entry.0 {
            None => entry.0 = Some(support),
            Some(first) if first != support => entry.1 = false,
            Some(_) => {}
        }
        entry.2 += mass;
    }
    let determined_mass = by_tail
        .values()
        .filter(|(_, same, _)| *same)
        .map(|(_, _, m)| m.clone())
        .sum();
    Ok(TailProbe {
        k,
        n,
        words: words.len(),
        determined_mass,
    })
}
