//! Finite groups given extensionally by their Cayley tables.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::rules::{Alphabet, LocalRule, Symbol, MAX_ALPHABET};
use crate::{Error, Result};

pub const MAX_ORDER: usize = MAX_ALPHABET;

/// A finite group. Elements are the indices `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    alphabet: Alphabet,
    cayley: Vec<Symbol>,
    identity: Symbol,
    inverse: Vec<Symbol>,
}

/// A subgroup, stored as its sorted element list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    elements: Vec<Symbol>,
}

impl Subgroup {
    pub fn elements(&self) -> &[Symbol] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: Symbol) -> bool {
        self.elements.binary_search(&g).is_ok()
    }
}

/// `G / H` together with the coset bookkeeping.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub group: FiniteGroup,
    /// `cosets[i]` is the coset represented by element `i` of the quotient.
    pub cosets: Vec<Vec<Symbol>>,
    /// `projection[g]` is the quotient element containing `g`.
    pub projection: Vec<Symbol>,
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidGroup("order must be positive".into()))
    } else if n > MAX_ORDER {
        Err(Error::OrderTooLarge(n))
    } else {
        Ok(())
    }
}

impl FiniteGroup {
    /// Validates a Cayley table: closure, a two-sided identity, inverses
    /// and associativity.
    pub fn from_table(labels: Option<Vec<String>>, rows: &[Vec<usize>]) -> Result<Self> {
        let n = rows.len();
        check_order(n)?;
        let alphabet = match labels {
            Some(l) => Alphabet::new(l)?,
            None => Alphabet::numeric(n)?,
        };
        if alphabet.size() != n {
            return Err(Error::InvalidGroup(format!(
                "{} labels for a table with {n} rows",
                alphabet.size()
            )));
        }
        let mut cayley = Vec::with_capacity(n * n);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {a} has {} entries", row.len())));
            }
            for &c in row {
                if c >= n {
                    return Err(Error::InvalidGroup(format!("entry {c} out of range in row {a}")));
                }
                cayley.push(c as Symbol);
            }
        }
        let at = |a: usize, b: usize| cayley[a * n + b] as usize;
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut inverse = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| at(a, b) == identity && at(b, a) == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {a} has no inverse")))?;
            inverse.push(inv as Symbol);
        }
        for a in 0..n {
            for b in 0..n {
                let ab = at(a, b);
                for c in 0..n {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(Error::InvalidGroup(format!(
                            "not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            alphabet,
            cayley,
            identity: identity as Symbol,
            inverse,
        })
    }

    // Trusted constructors skip the cubic associativity scan.
    fn from_fn(alphabet: Alphabet, identity: Symbol, mul: impl Fn(usize, usize) -> usize) -> Self {
        let n = alphabet.size();
        let mut cayley = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                cayley.push(mul(a, b) as Symbol);
            }
        }
        let mut inverse = vec![0; n];
        for a in 0..n {
            for b in 0..n {
                if cayley[a * n + b] == identity {
                    inverse[a] = b as Symbol;
                }
            }
        }
        Self {
            alphabet,
            cayley,
            identity,
            inverse,
        }
    }

    /// `ℤ/n` under addition.
    pub fn cyclic(n: usize) -> Result<Self> {
        check_order(n)?;
        Ok(Self::from_fn(Alphabet::numeric(n)?, 0, |a, b| (a + b) % n))
    }

    /// The dihedral group of order `2m`. Element `k` is the rotation `r^k`
    /// and element `m + k` is `r^k s`, so the rotations `C_m` are `0..m`.
    pub fn dihedral(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidGroup("dihedral group needs m >= 1".into()));
        }
        check_order(2 * m)?;
        let labels = (0..m)
            .map(|k| format!("r{k}"))
            .chain((0..m).map(|k| format!("s{k}")));
        let alphabet = Alphabet::new(labels)?;
        Ok(Self::from_fn(alphabet, 0, |a, b| {
            let (ka, ia) = (a % m, a / m);
            let (kb, ib) = (b % m, b / m);
            let k = if ia == 0 { ka + kb } else { ka + m - kb } % m;
            k + m * (ia ^ ib)
        }))
    }

    /// Direct product; `(g1, g2)` has index `g1 * |G2| + g2`.
    pub fn product(g1: &FiniteGroup, g2: &FiniteGroup) -> Result<Self> {
        let (n1, n2) = (g1.order(), g2.order());
        check_order(n1 * n2)?;
        let mut labels = Vec::with_capacity(n1 * n2);
        for a in g1.alphabet.labels() {
            for b in g2.alphabet.labels() {
                labels.push(format!("({a},{b})"));
            }
        }
        let identity = (g1.identity as usize * n2 + g2.identity as usize) as Symbol;
        Ok(Self::from_fn(Alphabet::new(labels)?, identity, |a, b| {
            let x = g1.mul((a / n2) as Symbol, (b / n2) as Symbol) as usize;
            let y = g2.mul((a % n2) as Symbol, (b % n2) as Symbol) as usize;
            x * n2 + y
        }))
    }

    pub fn order(&self) -> usize {
        self.alphabet.size()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn identity(&self) -> Symbol {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        self.cayley[a as usize * self.order() + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: Symbol) -> Symbol {
        self.inverse[a as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = Symbol> + Clone {
        self.alphabet.symbols()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn cayley_rows(&self) -> Vec<Vec<usize>> {
        self.cayley
            .chunks(self.order())
            .map(|r| r.iter().map(|&s| s as usize).collect())
            .collect()
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup {
            elements: self.elements().collect(),
        }
    }

    pub fn trivial(&self) -> Subgroup {
        Subgroup {
            elements: vec![self.identity],
        }
    }

    /// Checks that `elements` form a subgroup.
    pub fn subgroup(&self, elements: &[Symbol]) -> Result<Subgroup> {
        let set: BTreeSet<Symbol> = elements.iter().copied().collect();
        if let Some(&bad) = set.iter().find(|&&g| g as usize >= self.order()) {
            return Err(Error::SymbolOutOfRange {
                symbol: bad as usize,
                size: self.order(),
            });
        }
        if !set.contains(&self.identity) {
            return Err(Error::NotSubgroup("missing the identity".into()));
        }
        for &a in &set {
            if !set.contains(&self.inv(a)) {
                return Err(Error::NotSubgroup(format!("not closed under inverse at {a}")));
            }
            for &b in &set {
                if !set.contains(&self.mul(a, b)) {
                    return Err(Error::NotSubgroup(format!("not closed at ({a}, {b})")));
                }
            }
        }
        Ok(Subgroup {
            elements: set.into_iter().collect(),
        })
    }

    /// The subgroup generated by `gens`.
    pub fn closure(&self, gens: &[Symbol]) -> Subgroup {
        let mut member = vec![false; self.order()];
        member[self.identity as usize] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !member[y as usize] {
                    member[y as usize] = true;
                    queue.push_back(y);
                }
            }
        }
        Subgroup {
            elements: self.elements().filter(|&g| member[g as usize]).collect(),
        }
    }

    /// Every subgroup of `G`, sorted by order and then elements.
    pub fn subgroups(&self) -> Vec<Subgroup> {
        self.subgroups_within(&self.whole())
    }

    /// Every subgroup of `within` (itself a subgroup of `G`).
    pub fn subgroups_within(&self, within: &Subgroup) -> Vec<Subgroup> {
        // Each subgroup is reached from a smaller one by adjoining one element.
        let mut seen: HashSet<Vec<Symbol>> = HashSet::new();
        let mut found = vec![];
        let mut queue = VecDeque::new();
        let trivial = (self.trivial(), vec![]);
        seen.insert(trivial.0.elements.clone());
        queue.push_back(trivial);
        while let Some((h, gens)) = queue.pop_front() {
            for &g in within.elements() {
                if h.contains(g) {
                    continue;
                }
                let mut next_gens: Vec<Symbol> = gens.clone();
                next_gens.push(g);
                let k = self.closure(&next_gens);
                if seen.insert(k.elements.clone()) {
                    queue.push_back((k, next_gens));
                }
            }
            found.push(h);
        }
        found.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
        found
    }

    pub fn conjugate(&self, g: Symbol, h: &Subgroup) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = h
            .elements()
            .iter()
            .map(|&x| self.mul(self.mul(g, x), self.inv(g)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn normalizer(&self, h: &Subgroup) -> Subgroup {
        Subgroup {
            elements: self
                .elements()
                .filter(|&g| self.conjugate(g, h) == h.elements)
                .collect(),
        }
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        self.elements().all(|g| self.conjugate(g, h) == h.elements)
    }

    /// The right coset `Hg`, sorted.
    pub fn right_coset(&self, h: &Subgroup, g: Symbol) -> Vec<Symbol> {
        let mut c: Vec<Symbol> = h.elements().iter().map(|&x| self.mul(x, g)).collect();
        c.sort_unstable();
        c
    }

    /// The right cosets of `H`: `H` itself first, then by least element.
    pub fn right_cosets(&self, h: &Subgroup) -> Vec<Vec<Symbol>> {
        let mut assigned = vec![false; self.order()];
        let mut cosets = vec![];
        let starts = std::iter::once(self.identity).chain(self.elements());
        for g in starts {
            if assigned[g as usize] {
                continue;
            }
            let c = self.right_coset(h, g);
            for &x in &c {
                assigned[x as usize] = true;
            }
            cosets.push(c);
        }
        cosets
    }

    /// If `set` is a right coset `Hg`, returns `H`.
    pub fn as_right_coset(&self, set: &[Symbol]) -> Option<Subgroup> {
        let &g = set.first()?;
        let g_inv = self.inv(g);
        let mut h: Vec<Symbol> = set.iter().map(|&x| self.mul(x, g_inv)).collect();
        h.sort_unstable();
        h.dedup();
        let h = self.subgroup(&h).ok()?;
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        (self.right_coset(&h, g) == sorted).then_some(h)
    }

    pub fn quotient(&self, h: &Subgroup) -> Result<Quotient> {
        if !self.is_normal(h) {
            return Err(Error::NotNormal);
        }
        let cosets = self.right_cosets(h);
        let mut projection = vec![0 as Symbol; self.order()];
        for (i, c) in cosets.iter().enumerate() {
            for &x in c {
                projection[x as usize] = i as Symbol;
            }
        }
        let labels = cosets
            .iter()
            .map(|c| format!("{}H", self.alphabet.label(c[0])));
        let identity = projection[self.identity as usize];
        let group = Self::from_fn(Alphabet::new(labels)?, identity, |a, b| {
            projection[self.mul(cosets[a][0], cosets[b][0]) as usize] as usize
        });
        Ok(Quotient {
            group,
            cosets,
            projection,
        })
    }

    /// The multiplication automaton: `r(a, b) = a · b`.
    pub fn group_rule(&self) -> LocalRule {
        LocalRule::from_fn(self.alphabet.clone(), |a, b| self.mul(a, b)).unwrap()
    }

    /// `r(a, b) = b · a⁻¹`, i.e. `b - a` in additive notation.
    pub fn difference_rule(&self) -> Result<LocalRule> {
        if !self.is_abelian() {
            return Err(Error::NotAbelian);
        }
        Ok(LocalRule::from_fn(self.alphabet.clone(), |a, b| self.mul(b, self.inv(a))).unwrap())
    }

    /// Sufficient condition for the set-valued factor to have zero entropy:
    /// `H` normal and `|G|/|H| < |H|/C`, where `C` is the largest order of a
    /// proper subgroup of `H`. A trivial `H` has no proper subgroup and the
    /// condition holds vacuously.
    pub fn zero_ent_suff_check(&self, h: &Subgroup) -> bool {
        if !self.is_normal(h) {
            return false;
        }
        let c = self
            .subgroups_within(h)
            .iter()
            .filter(|k| k.order() < h.order())
            .map(Subgroup::order)
            .max();
        match c {
            None => true,
            Some(c) => self.order() * c < h.order() * h.order(),
        }
    }
}

/// On-disk group description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    Cyclic {
        n: usize,
    },
    Dihedral {
        m: usize,
    },
    Product {
        factors: Vec<GroupSpec>,
    },
    Table {
        table: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup> {
        match self {
            GroupSpec::Cyclic { n } => FiniteGroup::cyclic(*n),
            GroupSpec::Dihedral { m } => FiniteGroup::dihedral(*m),
            GroupSpec::Product { factors } => {
                let mut it = factors.iter();
                let first = it
                    .next()
                    .ok_or_else(|| Error::InvalidGroup("empty product".into()))?
                    .build()?;
                it.try_fold(first, |acc, f| FiniteGroup::product(&acc, &f.build()?))
            }
            GroupSpec::Table { table, labels } => FiniteGroup::from_table(labels.clone(), table),
        }
    }
}

/// The groups exercised by the test suites: all cyclic, dihedral and
/// pairwise product groups of order at most `max_order`.
pub fn generator_set(max_order: usize) -> Vec<(String, FiniteGroup)> {
    let mut out = vec![];
    for n in 1..=max_order {
        out.push((format!("Z/{n}"), FiniteGroup::cyclic(n).unwrap()));
    }
    for m in 1..=max_order / 2 {
        out.push((format!("D_{m}"), FiniteGroup::dihedral(m).unwrap()));
    }
    let small: Vec<(String, FiniteGroup)> = out.clone();
    for (i, (na, a)) in small.iter().enumerate() {
        for (nb, b) in &small[i..] {
            if a.order() > 1 && b.order() > 1 && a.order() * b.order() <= max_order {
                out.push((format!("{na} x {nb}"), FiniteGroup::product(a, b).unwrap()));
            }
        }
    }
    out
}
