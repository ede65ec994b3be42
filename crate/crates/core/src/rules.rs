//! Alphabets, radius-1 local rules and the words they act on.
//!
//! A rule `r : Λ × Λ → Λ` acts on a finite word by
//! `apply(w)_i = r(w_i, w_{i+1})`, shortening it by one symbol.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::groups::{FiniteGroup, GroupSpec};
use crate::{Error, Result};

/// Dense symbol index into an [`Alphabet`].
pub type Symbol = u16;

/// A finite word of symbol indices.
pub type Word = Vec<Symbol>;

/// Largest alphabet the crate accepts (group orders are capped at 4096).
pub const MAX_ALPHABET: usize = 4096;

/// A finite alphabet. Symbols are the indices `0..size`, labels are only
/// used for presentation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    labels: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if labels.len() > MAX_ALPHABET {
            return Err(Error::OrderTooLarge(labels.len()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// `{0, 1, ..., size-1}` labelled by their decimal indices.
    pub fn numeric(size: usize) -> Result<Self> {
        Self::new((0..size).map(|i| i.to_string()))
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, s: Symbol) -> &str {
        &self.labels[s as usize]
    }

    pub fn index_of(&self, label: &str) -> Option<Symbol> {
        self.labels.iter().position(|l| l == label).map(|i| i as Symbol)
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + Clone {
        (0..self.size()).map(|i| i as Symbol)
    }

    pub fn check_symbol(&self, s: usize) -> Result<Symbol> {
        if s < self.size() {
            Ok(s as Symbol)
        } else {
            Err(Error::SymbolOutOfRange {
                symbol: s,
                size: self.size(),
            })
        }
    }

    pub fn check_word(&self, w: &[Symbol]) -> Result<()> {
        for &s in w {
            self.check_symbol(s as usize)?;
        }
        Ok(())
    }

    /// Parses a whitespace/comma separated word of labels (or indices).
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        text.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| match self.index_of(t) {
                Some(s) => Ok(s),
                None => t
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidMeasure(format!("unknown symbol `{t}`")))
                    .and_then(|i| self.check_symbol(i)),
            })
            .collect()
    }

    pub fn format_word(&self, w: &[Symbol]) -> String {
        w.iter().map(|&s| self.label(s)).collect::<Vec<_>>().join(" ")
    }
}

/// All words of length `n` over `k` symbols in lexicographic order.
pub fn all_words(k: usize, n: usize) -> Vec<Word> {
    let mut out = vec![Vec::with_capacity(n)];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |s| {
                    let mut w = w.clone();
                    w.push(s as Symbol);
                    w
                })
            })
            .collect();
    }
    out
}

/// A radius-1 local rule given by its full `size × size` table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalRule {
    alphabet: Alphabet,
    table: Vec<Symbol>,
}

impl LocalRule {
    /// Builds a rule from row-major rows, `rows[a][b] = r(a, b)`.
    pub fn new(alphabet: Alphabet, rows: &[Vec<usize>]) -> Result<Self> {
        let k = alphabet.size();
        if rows.len() != k {
            return Err(Error::InvalidRule(format!(
                "expected {k} rows, found {}",
                rows.len()
            )));
        }
        let mut table = Vec::with_capacity(k * k);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidRule(format!(
                    "row {a} has {} entries, expected {k}",
                    row.len()
                )));
            }
            for (b, &c) in row.iter().enumerate() {
                if c >= k {
                    return Err(Error::InvalidRule(format!(
                        "entry ({a},{b}) = {c} is not a symbol of an alphabet of size {k}"
                    )));
                }
                table.push(c as Symbol);
            }
        }
        Ok(Self { alphabet, table })
    }

    pub fn from_fn(alphabet: Alphabet, f: impl Fn(Symbol, Symbol) -> Symbol) -> Result<Self> {
        let k = alphabet.size();
        let rows: Vec<Vec<usize>> = (0..k)
            .map(|a| (0..k).map(|b| f(a as Symbol, b as Symbol) as usize).collect())
            .collect();
        Self::new(alphabet, &rows)
    }

    /// `r(a, b) = a + b mod 2`.
    pub fn ledrappier() -> Self {
        Self::from_fn(Alphabet::numeric(2).unwrap(), |a, b| (a + b) % 2).unwrap()
    }

    /// The commutative, bi-permutative, non-associative rule on `{A, B, C}`
    /// given by `r(x, y) = -(x + y) mod 3` with `A = 0, B = 1, C = 2`.
    pub fn triangle() -> Self {
        let alphabet = Alphabet::new(["A", "B", "C"]).unwrap();
        Self::from_fn(alphabet, |a, b| (6 - a - b) % 3).unwrap()
    }

    pub fn constant(size: usize, value: Symbol) -> Result<Self> {
        Self::from_fn(Alphabet::numeric(size)?, |_, _| value)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.size()
    }

    #[inline]
    pub fn get(&self, a: Symbol, b: Symbol) -> Symbol {
        self.table[a as usize * self.size() + b as usize]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table
            .chunks(self.size())
            .map(|row| row.iter().map(|&s| s as usize).collect())
            .collect()
    }

    /// For every fixed `b`, `a ↦ r(a, b)` is a bijection.
    pub fn is_left_permutative(&self) -> bool {
        let k = self.size();
        (0..k).all(|b| {
            let mut seen = vec![false; k];
            (0..k).all(|a| !std::mem::replace(&mut seen[self.get(a as Symbol, b as Symbol) as usize], true))
        })
    }

    /// For every fixed `a`, `b ↦ r(a, b)` is a bijection.
    pub fn is_right_permutative(&self) -> bool {
        let k = self.size();
        (0..k).all(|a| {
            let mut seen = vec![false; k];
            (0..k).all(|b| !std::mem::replace(&mut seen[self.get(a as Symbol, b as Symbol) as usize], true))
        })
    }

    pub fn is_bipermutative(&self) -> bool {
        self.is_left_permutative() && self.is_right_permutative()
    }

    /// `solve[b][c] = a` with `r(a, b) = c`; present iff left-permutative.
    pub fn left_solver(&self) -> Option<Solver> {
        let k = self.size();
        let mut inv = vec![Symbol::MAX; k * k];
        for a in self.alphabet.symbols() {
            for b in self.alphabet.symbols() {
                let slot = &mut inv[b as usize * k + self.get(a, b) as usize];
                if *slot != Symbol::MAX {
                    return None;
                }
                *slot = a;
            }
        }
        Some(Solver { k, inv })
    }

    /// `solve[a][c] = b` with `r(a, b) = c`; present iff right-permutative.
    pub fn right_solver(&self) -> Option<Solver> {
        let k = self.size();
        let mut inv = vec![Symbol::MAX; k * k];
        for a in self.alphabet.symbols() {
            for b in self.alphabet.symbols() {
                let slot = &mut inv[a as usize * k + self.get(a, b) as usize];
                if *slot != Symbol::MAX {
                    return None;
                }
                *slot = b;
            }
        }
        Some(Solver { k, inv })
    }

    /// One step of the automaton on a finite word.
    pub fn apply(&self, w: &[Symbol]) -> Result<Word> {
        if w.len() < 2 {
            return Err(Error::WordTooShort {
                needed: 2,
                got: w.len(),
            });
        }
        self.alphabet.check_word(w)?;
        Ok(self.apply_unchecked(w))
    }

    pub(crate) fn apply_unchecked(&self, w: &[Symbol]) -> Word {
        w.windows(2).map(|p| self.get(p[0], p[1])).collect()
    }

    /// All words `v` with `apply(v) = w`, in lexicographic order.
    pub(crate) fn preimages(&self, w: &[Symbol]) -> Vec<Word> {
        let mut out = vec![];
        let mut v = Vec::with_capacity(w.len() + 1);
        self.extend_preimage(w, &mut v, &mut out);
        out
    }

    fn extend_preimage(&self, w: &[Symbol], v: &mut Word, out: &mut Vec<Word>) {
        if v.len() == w.len() + 1 {
            out.push(v.clone());
            return;
        }
        let j = v.len();
        for s in self.alphabet.symbols() {
            if j == 0 || self.get(v[j - 1], s) == w[j - 1] {
                v.push(s);
                self.extend_preimage(w, v, out);
                v.pop();
            }
        }
    }

    /// `t`-fold application; the result has length `|w| - t`.
    pub fn iterate(&self, w: &[Symbol], t: usize) -> Result<Word> {
        if t >= w.len() {
            return Err(Error::WordTooShort {
                needed: t + 1,
                got: w.len(),
            });
        }
        self.alphabet.check_word(w)?;
        let mut cur = w.to_vec();
        for _ in 0..t {
            cur = self.apply_unchecked(&cur);
        }
        Ok(cur)
    }

    /// The column code `i ↦ (τ^i w)_0` of a finite word.
    pub fn column_code(&self, w: &[Symbol]) -> Result<Word> {
        if w.is_empty() {
            return Err(Error::WordTooShort { needed: 1, got: 0 });
        }
        self.alphabet.check_word(w)?;
        let mut out = Vec::with_capacity(w.len());
        let mut cur = w.to_vec();
        loop {
            out.push(cur[0]);
            if cur.len() == 1 {
                break;
            }
            cur = self.apply_unchecked(&cur);
        }
        Ok(out)
    }

    /// Inverse of [`column_code`](Self::column_code); needs a
    /// right-permutative rule.
    pub fn inverse_column_code(&self, y: &[Symbol]) -> Result<Word> {
        let solver = self
            .right_solver()
            .ok_or_else(|| Error::Precondition("rule is not right-permutative".into()))?;
        self.alphabet.check_word(y)?;
        Ok(solver.invert_column(y))
    }
}

/// Inverse table of a permutative rule in one argument.
#[derive(Debug, Clone)]
pub struct Solver {
    k: usize,
    inv: Vec<Symbol>,
}

impl Solver {
    #[inline]
    pub fn solve(&self, fixed: Symbol, value: Symbol) -> Symbol {
        self.inv[fixed as usize * self.k + value as usize]
    }

    /// Recovers a word from its column code, given the right solver.
    pub(crate) fn invert_column(&self, y: &[Symbol]) -> Word {
        // diag[j] holds (τ^j x)_{i-j} for the current column i.
        let mut diag: Vec<Symbol> = Vec::with_capacity(y.len());
        let mut x = Vec::with_capacity(y.len());
        for (i, &yi) in y.iter().enumerate() {
            if i == 0 {
                diag.push(yi);
                x.push(yi);
                continue;
            }
            let mut next = vec![0; i + 1];
            next[i] = yi;
            for j in (0..i).rev() {
                next[j] = self.solve(diag[j], next[j + 1]);
            }
            x.push(next[0]);
            diag = next;
        }
        x
    }
}

/// On-disk rule description: either an explicit table or a group-derived rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RuleSpec {
    Table {
        alphabet: Vec<String>,
        table: Vec<Vec<usize>>,
    },
    Group {
        group: GroupSpec,
        #[serde(default)]
        kind: GroupRuleKind,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupRuleKind {
    #[default]
    Multiplication,
    Difference,
}

impl RuleSpec {
    pub fn build(&self) -> Result<LocalRule> {
        match self {
            RuleSpec::Table { alphabet, table } => {
                LocalRule::new(Alphabet::new(alphabet.iter().cloned())?, table)
            }
            RuleSpec::Group { group, kind } => {
                let g: FiniteGroup = group.build()?;
                match kind {
                    GroupRuleKind::Multiplication => Ok(g.group_rule()),
                    GroupRuleKind::Difference => g.difference_rule(),
                }
            }
        }
    }
}

impl From<&LocalRule> for RuleSpec {
    fn from(rule: &LocalRule) -> Self {
        RuleSpec::Table {
            alphabet: rule.alphabet().labels().to_vec(),
            table: rule.rows(),
        }
    }
}
