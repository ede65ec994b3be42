//! Multiplication by coprime `p` and `q` on the circle, coded in base `pq`.
//!
//! Everything is exact: points are rationals, partitions are integer grids
//! over a common denominator.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::rational::{self, Q};
use crate::{par, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PQSystem {
    p: u64,
    q: u64,
}

impl PQSystem {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p < 2 || q < 2 {
            return Err(Error::InvalidSystem(format!("p and q must be at least 2, got {p}, {q}")));
        }
        if p.gcd(&q) != 1 {
            return Err(Error::InvalidSystem(format!("p={p} and q={q} are not coprime")));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn base(&self) -> u64 {
        self.p * self.q
    }

    fn factor(&self, map: Map) -> u64 {
        match map {
            Map::P => self.p,
            Map::Q => self.q,
        }
    }
}

/// A point `num/den` of `[0, 1)`, kept reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct RationalPoint {
    num: u64,
    den: u64,
}

impl RationalPoint {
    /// Reduces `num/den` modulo 1.
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidSystem("zero denominator".into()));
        }
        let num = num % den;
        let g = num.gcd(&den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidSystem(format!("expected a rational `a/b`, got `{text}`"));
        let (n, d) = match text.trim().split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (text.trim(), "1"),
        };
        Self::new(n.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?)
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_q(&self) -> Q {
        rational::q(self.num as i64, self.den as i64)
    }

    /// `frac(k x)`.
    pub fn times(&self, k: u64) -> Self {
        let num = (self.num as u128 * k as u128 % self.den as u128) as u64;
        Self::new(num, self.den).expect("nonzero denominator")
    }

    /// First base-`b` digit.
    pub fn digit(&self, b: u64) -> u64 {
        (self.num as u128 * b as u128 / self.den as u128) as u64
    }
}

impl std::fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// The first `len` base-`b` digits of `x`.
pub fn expansion(x: RationalPoint, b: u64, len: usize) -> Vec<u64> {
    let mut cur = x;
    (0..len)
        .map(|_| {
            let d = cur.digit(b);
            cur = cur.times(b);
            d
        })
        .collect()
}

/// Entry `(i, j)` is the first base-`pq` digit of `frac(q^i p^j x)`.
pub fn space_time(sys: &PQSystem, x: RationalPoint, width: usize, height: usize) -> Vec<Vec<u64>> {
    let mut row_start = x;
    (0..height)
        .map(|_| {
            let mut cur = row_start;
            let row = (0..width)
                .map(|_| {
                    let d = cur.digit(sys.base());
                    cur = cur.times(sys.p);
                    d
                })
                .collect();
            row_start = row_start.times(sys.q);
            row
        })
        .collect()
}

/// The `k` preimages of `y` under `x ↦ kx mod 1`, sorted.
pub fn preimages(y: RationalPoint, k: u64) -> Vec<RationalPoint> {
    let den = y.den as u128 * k as u128;
    let mut out: Vec<RationalPoint> = (0..k as u128)
        .map(|i| {
            let num = y.num as u128 + i * y.den as u128;
            let g = num.gcd(&den);
            RationalPoint {
                num: (num / g) as u64,
                den: (den / g) as u64,
            }
        })
        .collect();
    out.sort();
    out
}

/// `S_p` maps the `S_q`-fiber of `y` bijectively onto the `S_q`-fiber of
/// `S_p(y)`.
pub fn fiber_bijectivity_check(sys: &PQSystem, y: RationalPoint) -> bool {
    let mut image: Vec<RationalPoint> = preimages(y, sys.q).iter().map(|z| z.times(sys.p)).collect();
    image.sort();
    let before = image.len();
    image.dedup();
    image.len() == before && image == preimages(y.times(sys.p), sys.q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Map {
    P,
    Q,
}

/// A partition of `[0, 1)` into intervals `[b_i / d, b_{i+1} / d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalPartition {
    numerators: Vec<u128>,
    denominator: u128,
}

impl IntervalPartition {
    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn breakpoints(&self) -> Vec<Q> {
        let d = BigInt::from(self.denominator);
        self.numerators
            .iter()
            .map(|&n| Q::new(BigInt::from(n), d.clone()))
            .collect()
    }

    pub fn lengths(&self) -> Vec<Q> {
        let d = BigInt::from(self.denominator);
        let mut ends: Vec<u128> = self.numerators[1..].to_vec();
        ends.push(self.denominator);
        ends.iter()
            .zip(&self.numerators)
            .map(|(&e, &s)| Q::new(BigInt::from(e - s), d.clone()))
            .collect()
    }

    fn rescaled(&self, denominator: u128) -> Vec<u128> {
        let f = denominator / self.denominator;
        self.numerators.iter().map(|&n| n * f).collect()
    }
}

fn checked_pow(b: u64, e: usize) -> Result<u128> {
    (b as u128)
        .checked_pow(e as u32)
        .ok_or_else(|| Error::InvalidSystem(format!("{b}^{e} overflows")))
}

/// `∨_{i<l} S^{-i} α`, where `α` cuts the circle into `pq` equal arcs and
/// `S` is multiplication by `p` or `q`.
pub fn refine_partition(sys: &PQSystem, map: Map, l: usize) -> Result<IntervalPartition> {
    if l == 0 {
        return Err(Error::InvalidSystem("l must be at least 1".into()));
    }
    let k = sys.factor(map);
    let base = sys.base() as u128;
    // S^{-i} α has breakpoints (a / pq + j) / k^i, all multiples of
    // 1 / (pq k^{l-1}).
    let top = checked_pow(k, l - 1)?;
    let denominator = base
        .checked_mul(top)
        .ok_or_else(|| Error::InvalidSystem("partition too fine".into()))?;
    let mut numerators = vec![];
    for i in 0..l {
        let ki = checked_pow(k, i)?;
        let scale = top / ki;
        for j in 0..ki {
            for a in 0..base {
                numerators.push((a + j * base) * scale);
            }
        }
    }
    numerators.sort_unstable();
    numerators.dedup();
    Ok(IntervalPartition {
        numerators,
        denominator,
    })
}

/// Smallest `m` with `q^m ≥ p^{l-1}`, which puts the `S_q`-refinement's arc
/// length `1/(p q^m)` inside `[1/(p^l q), 1/p^l]`.
pub fn m_of_l(sys: &PQSystem, l: usize) -> Result<usize> {
    let target = checked_pow(sys.p, l.saturating_sub(1))?;
    let mut m = 0;
    let mut qm: u128 = 1;
    while qm < target {
        qm = qm
            .checked_mul(sys.q as u128)
            .ok_or_else(|| Error::InvalidSystem("q^m overflows".into()))?;
        m += 1;
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReciprocityCounts {
    pub l: usize,
    pub m: usize,
    /// Most `S_p`-refinement arcs meeting one `S_q`-refinement arc.
    pub max_a_over_b: usize,
    /// Most `S_q`-refinement arcs meeting one `S_p`-refinement arc.
    pub max_b_over_a: usize,
    pub a_intervals: usize,
    pub b_intervals: usize,
}

/// Largest number of `inner` arcs whose interior meets one `outer` arc.
fn max_overlap(outer: &[u128], inner: &[u128], total: u128) -> usize {
    let mut best = 0;
    let mut start = 0;
    for (j, &lo) in outer.iter().enumerate() {
        let hi = outer.get(j + 1).copied().unwrap_or(total);
        // first inner arc ending after lo
        while start + 1 < inner.len() && inner[start + 1] <= lo {
            start += 1;
        }
        let mut count = 0;
        let mut i = start;
        while i < inner.len() && inner[i] < hi {
            count += 1;
            i += 1;
        }
        best = best.max(count);
    }
    best
}

pub fn reciprocity_counts(sys: &PQSystem, l: usize) -> Result<ReciprocityCounts> {
    if l < 2 {
        return Err(Error::InvalidSystem("l must be at least 2".into()));
    }
    let m = m_of_l(sys, l)?;
    let a = refine_partition(sys, Map::P, l)?;
    let b = refine_partition(sys, Map::Q, m.max(1))?;
    let total = a.denominator.lcm(&b.denominator);
    let an = a.rescaled(total);
    let bn = b.rescaled(total);
    Ok(ReciprocityCounts {
        l,
        m,
        max_a_over_b: max_overlap(&bn, &an, total),
        max_b_over_a: max_overlap(&an, &bn, total),
        a_intervals: a.len(),
        b_intervals: b.len(),
    })
}

pub const MAX_L: usize = 16;

/// [`reciprocity_counts`] for `l = 2..=l_max`.
pub fn sub_exponential_report(sys: &PQSystem, l_max: usize) -> Result<Vec<ReciprocityCounts>> {
    if l_max > MAX_L {
        return Err(Error::InvalidSystem(format!("l_max is capped at {MAX_L}")));
    }
    let ls: Vec<usize> = (2..=l_max).collect();
    par::map(&ls, |&l| reciprocity_counts(sys, l)).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(n: u64, d: u64) -> RationalPoint {
        RationalPoint::new(n, d).unwrap()
    }

    #[test]
    fn system_validation() {
        assert!(PQSystem::new(2, 4).is_err());
        assert!(PQSystem::new(1, 3).is_err());
        assert_eq!(PQSystem::new(2, 3).unwrap().base(), 6);
    }

    #[test]
    fn space_time_examples() {
        let sys = PQSystem::new(2, 3).unwrap();
        let d = space_time(&sys, pt(1, 2), 3, 3);
        assert_eq!(d[0][0], 3);
        assert_eq!(d[0][1], 0);
        assert!(space_time(&sys, pt(0, 1), 5, 4).iter().flatten().all(|&v| v == 0));
        // 1/5 in base 6 is 0.1111... since 1/5 = 1/6 · 1/(1 - 1/6)
        let x = pt(1, 5);
        assert_eq!(expansion(x, 6, 4), vec![1, 1, 1, 1]);
        let d = space_time(&sys, x, 4, 4);
        let diag: Vec<u64> = (0..4).map(|i| d[i][i]).collect();
        assert_eq!(diag, vec![1, 1, 1, 1]);
    }

    #[test]
    fn fiber_examples() {
        let sys = PQSystem::new(2, 3).unwrap();
        assert_eq!(preimages(pt(0, 1), 3), vec![pt(0, 1), pt(1, 3), pt(2, 3)]);
        assert!(fiber_bijectivity_check(&sys, pt(0, 1)));
        assert!(fiber_bijectivity_check(&sys, pt(1, 2)));
    }

    #[test]
    fn fibers_collide_without_coprimality() {
        // p = 2, q = 4 bypassing the constructor: 0 and 1/2 both map to 0.
        let bad = PQSystem { p: 2, q: 4 };
        assert!(!fiber_bijectivity_check(&bad, pt(0, 1)));
    }

    #[test]
    fn refinement_shapes() {
        let sys = PQSystem::new(2, 3).unwrap();
        let a1 = refine_partition(&sys, Map::P, 1).unwrap();
        assert_eq!(a1.len(), 6);
        assert!(a1.lengths().iter().all(|x| *x == rational::q(1, 6)));
        for l in 1..=6 {
            let a = refine_partition(&sys, Map::P, l).unwrap();
            assert_eq!(a.len(), 2usize.pow(l as u32) * 3);
            let want = rational::q(1, 3 * 2i64.pow(l as u32));
            assert!(a.lengths().iter().all(|x| *x == want));
            let b = refine_partition(&sys, Map::Q, l).unwrap();
            let want = rational::q(1, 2 * 3i64.pow(l as u32));
            assert!(b.lengths().iter().all(|x| *x == want));
        }
    }

    #[test]
    fn m_examples() {
        let sys = PQSystem::new(2, 3).unwrap();
        assert_eq!(m_of_l(&sys, 5).unwrap(), 3);
        assert_eq!(m_of_l(&sys, 3).unwrap(), 2);
        assert_eq!(m_of_l(&sys, 2).unwrap(), 1);
    }

    fn brute_counts(sys: &PQSystem, l: usize) -> (usize, usize) {
        let m = m_of_l(sys, l).unwrap();
        let a = refine_partition(sys, Map::P, l).unwrap();
        let b = refine_partition(sys, Map::Q, m).unwrap();
        let arcs = |p: &IntervalPartition| -> Vec<(Q, Q)> {
            let bp = p.breakpoints();
            let mut ends = bp[1..].to_vec();
            ends.push(rational::one());
            bp.into_iter().zip(ends).collect()
        };
        let (aa, bb) = (arcs(&a), arcs(&b));
        let meets = |x: &(Q, Q), y: &(Q, Q)| x.0 < y.1 && y.0 < x.1;
        let ab = bb.iter().map(|y| aa.iter().filter(|x| meets(x, y)).count()).max().unwrap();
        let ba = aa.iter().map(|x| bb.iter().filter(|y| meets(x, y)).count()).max().unwrap();
        (ab, ba)
    }

    #[test]
    fn sweep_matches_brute_force() {
        for (p, q) in [(2, 3), (3, 2), (2, 5), (3, 5)] {
            let sys = PQSystem::new(p, q).unwrap();
            for l in 2..=5 {
                let c = reciprocity_counts(&sys, l).unwrap();
                assert_eq!((c.max_a_over_b, c.max_b_over_a), brute_counts(&sys, l), "p={p} q={q} l={l}");
            }
        }
    }

    #[test]
    fn reciprocity_bounds() {
        for (p, q) in [(2u64, 3u64), (3, 2), (2, 5), (3, 5)] {
            let sys = PQSystem::new(p, q).unwrap();
            for c in sub_exponential_report(&sys, 12).unwrap() {
                assert!(c.max_a_over_b as u64 <= q + 1, "{c:?}");
                assert!(c.max_b_over_a <= 2, "{c:?}");
            }
        }
        let sys = PQSystem::new(2, 3).unwrap();
        let c = reciprocity_counts(&sys, 5).unwrap();
        assert_eq!(c.m, 3);
        assert!(c.max_a_over_b <= 4 && c.max_b_over_a <= 2);
        assert_eq!(sub_exponential_report(&sys, 2).unwrap().len(), 1);
        assert!(sub_exponential_report(&sys, 17).is_err());
    }
}
