//! Generators for the standard lattices and diversity constructions.
//!
//! Every constructor returns a validated [`DiversityFn`]; the theorems
//! backing each construction are restated as post-condition checks, so a
//! failed validation here is an implementation bug, not a user error.
//! Infinite examples (the divisibility lattice on all naturals, unbounded
//! multisets) are realized as explicit finite truncations.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num::rational::BigRational;
use num::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::diversity::{DiversityFn, FiniteMetric};
use crate::lattice::{downsets_lattice, FiniteLattice, LatticeError, Poset};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("lattice is not modular: witness ({a}, {b}, {c})")]
    NotModular { a: String, b: String, c: String },
    #[error("valuation is nonzero at the bottom `{0}`")]
    NonzeroAtBottom(String),
    #[error("valuation is not positive: `{a}` < `{b}` but v(`{a}`) >= v(`{b}`)")]
    NotPositive { a: String, b: String },
    #[error("not a sub-valuation: v(meet) + v(join) > v(`{a}`) + v(`{b}`)")]
    NotASubValuation { a: String, b: String },
    #[error("not a divisor lattice: {0}")]
    NotADivisorLattice(String),
    #[error("bad chain function for `{point}`: {reason}")]
    BadChainFunction { point: String, reason: String },
    #[error("multiplicity cap for `{0}` must be at least 1")]
    BadCap(String),
    #[error("metric does not cover point `{0}`")]
    MetricMismatch(String),
    #[error("not a sublattice: the {op} of `{a}` and `{b}` is missing")]
    NotASublattice {
        a: String,
        b: String,
        op: &'static str,
    },
    #[error("family must contain the empty set")]
    MissingEmptySet,
    #[error("construction produced an invalid diversity (bug): {0}")]
    NotADiversity(String),
}

fn expect_valid(
    lattice: Arc<FiniteLattice>,
    values: Vec<BigRational>,
) -> Result<DiversityFn, ConstructionError> {
    DiversityFn::new(lattice, values).map_err(|e| ConstructionError::NotADiversity(e.to_string()))
}

fn modularity_guard(lattice: &FiniteLattice) -> Result<(), ConstructionError> {
    if let Some([a, b, c]) = lattice.modularity_witness() {
        return Err(ConstructionError::NotModular {
            a: lattice.element(a).to_string(),
            b: lattice.element(b).to_string(),
            c: lattice.element(c).to_string(),
        });
    }
    Ok(())
}

/// The diversity that is 0 on the atoms and bottom and 1 elsewhere.
/// Exists on every lattice with a 0.
pub fn trivial_diversity(lattice: &Arc<FiniteLattice>) -> DiversityFn {
    let values = (0..lattice.len())
        .map(|a| {
            if a == lattice.bottom() || lattice.atoms().contains(&a) {
                BigRational::zero()
            } else {
                BigRational::one()
            }
        })
        .collect();
    expect_valid(lattice.clone(), values).expect("trivial diversity is always valid")
}

/// The strictly monotone diversity `h(a) - 1` (0 at the bottom) on a
/// modular lattice.
pub fn height_diversity(lattice: &Arc<FiniteLattice>) -> Result<DiversityFn, ConstructionError> {
    modularity_guard(lattice)?;
    let values = (0..lattice.len())
        .map(|a| {
            if a == lattice.bottom() {
                BigRational::zero()
            } else {
                BigRational::from_integer((i64::from(lattice.height(a)) - 1).into())
            }
        })
        .collect();
    expect_valid(lattice.clone(), values)
}

/// The diversity that is 0 on atoms and bottom and `h(a)` elsewhere, on a
/// modular lattice. Generalizes "cardinality on sets of two or more".
pub fn cardinality_diversity(
    lattice: &Arc<FiniteLattice>,
) -> Result<DiversityFn, ConstructionError> {
    modularity_guard(lattice)?;
    let values = (0..lattice.len())
        .map(|a| {
            if a == lattice.bottom() || lattice.atoms().contains(&a) {
                BigRational::zero()
            } else {
                BigRational::from_integer(u64::from(lattice.height(a)).into())
            }
        })
        .collect();
    expect_valid(lattice.clone(), values)
}

/// A nonnegative function on a lattice, the raw material of
/// [`valuation_diversity`]. The sub-valuation law, positivity and
/// `v(0) = 0` are checked when the diversity is built.
#[derive(Debug, Clone, PartialEq)]
pub struct Valuation {
    pub values: Vec<BigRational>,
}

impl Valuation {
    pub fn from_named_values(
        lattice: &FiniteLattice,
        values: &BTreeMap<String, BigRational>,
    ) -> Result<Self, LatticeError> {
        let ordered: Result<Vec<BigRational>, LatticeError> = lattice
            .elements()
            .iter()
            .map(|name| {
                values
                    .get(name)
                    .cloned()
                    .ok_or_else(|| LatticeError::UnknownElement(name.clone()))
            })
            .collect();
        Ok(Valuation { values: ordered? })
    }
}

/// The diversity that is 0 on atoms and `v(a)` elsewhere, for a positive
/// sub-valuation `v` with `v(0) = 0`.
pub fn valuation_diversity(
    lattice: &Arc<FiniteLattice>,
    valuation: &Valuation,
) -> Result<DiversityFn, ConstructionError> {
    let v = &valuation.values;
    let n = lattice.len();
    assert_eq!(v.len(), n, "valuation must cover every element");
    if !v[lattice.bottom()].is_zero() {
        return Err(ConstructionError::NonzeroAtBottom(
            lattice.element(lattice.bottom()).to_string(),
        ));
    }
    for a in 0..n {
        for b in 0..n {
            if lattice.lt(a, b) && v[a] >= v[b] {
                return Err(ConstructionError::NotPositive {
                    a: lattice.element(a).to_string(),
                    b: lattice.element(b).to_string(),
                });
            }
        }
    }
    for a in 0..n {
        for b in a..n {
            let lhs = &v[lattice.meet(a, b)] + &v[lattice.join(a, b)];
            let rhs = &v[a] + &v[b];
            if lhs > rhs {
                return Err(ConstructionError::NotASubValuation {
                    a: lattice.element(a).to_string(),
                    b: lattice.element(b).to_string(),
                });
            }
        }
    }
    let values = (0..n)
        .map(|a| {
            if lattice.atoms().contains(&a) {
                BigRational::zero()
            } else {
                v[a].clone()
            }
        })
        .collect();
    expect_valid(lattice.clone(), values)
}

/// Number of prime factors of `n` counted with multiplicity.
pub fn omega(n: u64) -> u32 {
    assert!(n >= 1);
    let mut n = n;
    let mut count = 0;
    let mut p = 2;
    while p * p <= n {
        while n.is_multiple_of(p) {
            n /= p;
            count += 1;
        }
        p += 1;
    }
    if n > 1 {
        count += 1;
    }
    count
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && omega(n) == 1
}

/// The lattice of divisors of `n` ordered by divisibility. The bottom is
/// 1, join is lcm, meet is gcd, and the atoms are the prime divisors.
pub fn divisor_lattice(n: u64, limit: u128) -> Result<FiniteLattice, LatticeError> {
    assert!(n >= 1);
    let mut divisors: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    if n > (1 << 20) {
        // Enumerate via the factorization instead of trial division.
        divisors = divisors_by_factorization(n);
    }
    if divisors.len() as u128 > limit {
        return Err(LatticeError::SizeLimit {
            needed: divisors.len() as u128,
            limit,
        });
    }
    let primes: Vec<u64> = divisors.iter().copied().filter(|&d| is_prime(d)).collect();
    let names: Vec<String> = divisors.iter().map(|d| d.to_string()).collect();
    let mut covers = Vec::new();
    for &d in &divisors {
        for &p in &primes {
            if let Some(m) = d.checked_mul(p) {
                if n.is_multiple_of(m) {
                    covers.push((d.to_string(), m.to_string()));
                }
            }
        }
    }
    FiniteLattice::from_covers(&names, &covers)
}

fn divisors_by_factorization(n: u64) -> Vec<u64> {
    let mut rest = n;
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut p = 2;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += 1;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    let mut divisors = vec![1u64];
    for (p, e) in factors {
        let mut next = Vec::new();
        for &d in &divisors {
            let mut power = 1u64;
            for _ in 0..=e {
                next.push(d * power);
                power = power.saturating_mul(p);
            }
        }
        divisors = next;
    }
    divisors.sort_unstable();
    divisors
}

/// The diversity `Omega(m)` on non-prime divisors, 0 on primes and 1,
/// for a lattice produced by [`divisor_lattice`].
pub fn omega_diversity(lattice: &Arc<FiniteLattice>) -> Result<DiversityFn, ConstructionError> {
    let numbers: Result<Vec<u64>, ConstructionError> = lattice
        .elements()
        .iter()
        .map(|name| {
            name.parse::<u64>().map_err(|_| {
                ConstructionError::NotADivisorLattice(format!(
                    "element `{name}` is not a positive integer"
                ))
            })
        })
        .collect();
    let numbers = numbers?;
    for (a, &m) in numbers.iter().enumerate() {
        for (b, &k) in numbers.iter().enumerate() {
            if lattice.leq(a, b) != (k % m == 0) {
                return Err(ConstructionError::NotADivisorLattice(format!(
                    "order disagrees with divisibility on ({m}, {k})"
                )));
            }
        }
    }
    let values = numbers
        .iter()
        .map(|&m| {
            if is_prime(m) {
                BigRational::zero()
            } else {
                BigRational::from_integer(u64::from(omega(m)).into())
            }
        })
        .collect();
    expect_valid(lattice.clone(), values)
}

/// A finite truncation of the multiset lattice over a point set: element
/// `{x^(k)}` keeps `0 <= k <= cap(x)` copies of `x`. Join and meet are
/// the pointwise max and min of multiplicities. Elements are named by
/// sorted `x^k` terms, so file output is deterministic.
#[derive(Debug, Clone)]
pub struct MultisetLattice {
    pub lattice: Arc<FiniteLattice>,
    points: Vec<String>,
    caps: Vec<u32>,
    /// Multiplicity vector of each lattice element, by element index.
    counts: Vec<Vec<u32>>,
}

impl MultisetLattice {
    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn counts(&self, element: usize) -> &[u32] {
        &self.counts[element]
    }
}

fn multiset_name(points: &[String], counts: &[u32]) -> String {
    let terms: Vec<String> = points
        .iter()
        .zip(counts)
        .filter(|(_, &k)| k > 0)
        .map(|(p, k)| format!("{p}^{k}"))
        .collect();
    format!("{{{}}}", terms.join(","))
}

/// Builds the capped multiset lattice. Points are sorted by name; the
/// product of `cap + 1` over all points is checked against `limit`.
pub fn multiset_lattice(
    points_with_caps: &[(String, u32)],
    limit: u128,
) -> Result<MultisetLattice, ConstructionError> {
    let mut sorted: Vec<(String, u32)> = points_with_caps.to_vec();
    sorted.sort();
    for (p, cap) in &sorted {
        if *cap == 0 {
            return Err(ConstructionError::BadCap(p.clone()));
        }
    }
    let points: Vec<String> = sorted.iter().map(|(p, _)| p.clone()).collect();
    let caps: Vec<u32> = sorted.iter().map(|(_, c)| *c).collect();
    let mut needed = 1u128;
    for &c in &caps {
        needed = needed.saturating_mul(c as u128 + 1);
    }
    if needed > limit {
        return Err(LatticeError::SizeLimit { needed, limit }.into());
    }

    let mut vectors: Vec<Vec<u32>> = vec![Vec::new()];
    for &cap in &caps {
        let mut next = Vec::new();
        for v in &vectors {
            for k in 0..=cap {
                let mut w = v.clone();
                w.push(k);
                next.push(w);
            }
        }
        vectors = next;
    }
    let names: Vec<String> = vectors.iter().map(|v| multiset_name(&points, v)).collect();
    let index: BTreeMap<&Vec<u32>, usize> =
        vectors.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut covers = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        for (pos, &k) in v.iter().enumerate() {
            if k < caps[pos] {
                let mut w = v.clone();
                w[pos] += 1;
                covers.push((names[i].clone(), names[index[&w]].clone()));
            }
        }
    }
    let lattice = Arc::new(FiniteLattice::from_covers(&names, &covers)?);
    let mut counts = vec![Vec::new(); lattice.len()];
    for (i, v) in vectors.into_iter().enumerate() {
        counts[lattice
            .index_of(&names[i])
            .expect("multiset names survive construction")] = v;
    }
    Ok(MultisetLattice {
        lattice,
        points,
        caps,
        counts,
    })
}

/// The multiset diversity
/// `max(max d(x_i, x_j), max f_{x_i}(k_i))` over the support, for a metric
/// `d` on the points and per-point chain functions `f_x` with
/// `f_x(0) = f_x(1) = 0`, `f_x(k) > 0` for `k >= 2`, monotone
/// nondecreasing. Chain tables must cover `0..=cap(x)`; shorter tables
/// are an error, not extrapolated.
pub fn multiset_diversity(
    multisets: &MultisetLattice,
    metric: &FiniteMetric,
    chain_fns: &BTreeMap<String, Vec<BigRational>>,
) -> Result<DiversityFn, ConstructionError> {
    let points = multisets.points();
    let mut point_in_metric = Vec::with_capacity(points.len());
    for p in points {
        point_in_metric.push(
            metric
                .index_of(p)
                .ok_or_else(|| ConstructionError::MetricMismatch(p.clone()))?,
        );
    }
    let mut tables = Vec::with_capacity(points.len());
    for (pos, p) in points.iter().enumerate() {
        let table = chain_fns
            .get(p)
            .ok_or_else(|| ConstructionError::BadChainFunction {
                point: p.clone(),
                reason: "no chain function given".into(),
            })?;
        let cap = multisets.caps()[pos] as usize;
        if table.len() < cap + 1 {
            return Err(ConstructionError::BadChainFunction {
                point: p.clone(),
                reason: format!("table has {} entries, cap needs {}", table.len(), cap + 1),
            });
        }
        for (k, value) in table.iter().enumerate() {
            let must_be_zero = k <= 1;
            if must_be_zero && !value.is_zero() {
                return Err(ConstructionError::BadChainFunction {
                    point: p.clone(),
                    reason: format!("f({k}) must be 0"),
                });
            }
            if !must_be_zero && value.is_zero() {
                return Err(ConstructionError::BadChainFunction {
                    point: p.clone(),
                    reason: format!("f({k}) must be positive"),
                });
            }
            if k > 0 && table[k - 1] > *value {
                return Err(ConstructionError::BadChainFunction {
                    point: p.clone(),
                    reason: "must be monotone nondecreasing".into(),
                });
            }
        }
        tables.push(table.clone());
    }

    let lattice = &multisets.lattice;
    let values = (0..lattice.len())
        .map(|e| {
            let counts = multisets.counts(e);
            let support: Vec<usize> = (0..points.len()).filter(|&i| counts[i] > 0).collect();
            let mut best = BigRational::zero();
            for (si, &i) in support.iter().enumerate() {
                for &j in &support[si + 1..] {
                    let d = metric.distance(point_in_metric[i], point_in_metric[j]);
                    if *d > best {
                        best = d.clone();
                    }
                }
                let f = &tables[i][counts[i] as usize];
                if *f > best {
                    best = f.clone();
                }
            }
            best
        })
        .collect();
    expect_valid(lattice.clone(), values)
}

/// The power-set lattice of a point set, ordered by inclusion, with
/// elements named by sorted member lists.
pub fn powerset_lattice<S: AsRef<str>>(
    points: &[S],
    limit: u128,
) -> Result<FiniteLattice, LatticeError> {
    downsets_lattice(&Poset::antichain(points)?, limit)
}

/// Restricts a classical diversity on subsets of a finite ground set to a
/// family `members` that must contain the empty set and be closed under
/// union and intersection. The result is validated; restriction to a
/// sublattice whose minimal nonempty members are not singletons can fail
/// the zero-pattern axiom, and that failure is reported.
pub fn restrict_classical(
    members: &[BTreeSet<String>],
    delta: &dyn Fn(&BTreeSet<String>) -> BigRational,
) -> Result<DiversityFn, ConstructionError> {
    let family: BTreeSet<&BTreeSet<String>> = members.iter().collect();
    if !members.iter().any(|s| s.is_empty()) {
        return Err(ConstructionError::MissingEmptySet);
    }
    let describe = |s: &BTreeSet<String>| {
        format!(
            "{{{}}}",
            s.iter().cloned().collect::<Vec<_>>().join(",")
        )
    };
    for a in members {
        for b in members {
            let union: BTreeSet<String> = a.union(b).cloned().collect();
            if !family.contains(&union) {
                return Err(ConstructionError::NotASublattice {
                    a: describe(a),
                    b: describe(b),
                    op: "union",
                });
            }
            let inter: BTreeSet<String> = a.intersection(b).cloned().collect();
            if !family.contains(&inter) {
                return Err(ConstructionError::NotASublattice {
                    a: describe(a),
                    b: describe(b),
                    op: "intersection",
                });
            }
        }
    }
    let mut keyed: Vec<(usize, Vec<String>, &BTreeSet<String>)> = members
        .iter()
        .map(|s| (s.len(), s.iter().cloned().collect(), s))
        .collect();
    keyed.sort();
    keyed.dedup_by(|a, b| a.2 == b.2);
    let names: Vec<String> = keyed
        .iter()
        .map(|(_, m, _)| format!("{{{}}}", m.join(",")))
        .collect();
    let mut covers = Vec::new();
    for (i, (_, _, a)) in keyed.iter().enumerate() {
        for (j, (_, _, b)) in keyed.iter().enumerate() {
            if a.is_subset(b) && a.len() < b.len() {
                let strictly_between = keyed.iter().any(|(_, _, c)| {
                    c != a && c != b && a.is_subset(c) && c.is_subset(b)
                });
                if !strictly_between {
                    covers.push((names[i].clone(), names[j].clone()));
                }
            }
        }
    }
    let lattice = Arc::new(FiniteLattice::from_covers(&names, &covers)?);
    let mut values = vec![BigRational::zero(); lattice.len()];
    for (i, (_, _, s)) in keyed.iter().enumerate() {
        values[lattice.index_of(&names[i]).expect("names preserved")] = delta(s);
    }
    DiversityFn::new(lattice, values).map_err(|e| ConstructionError::NotADiversity(e.to_string()))
}

/// The diameter diversity of a finite metric: `max d` over pairs of the
/// subset, 0 on small sets.
pub fn diameter_diversity(metric: &FiniteMetric) -> impl Fn(&BTreeSet<String>) -> BigRational + '_ {
    move |subset: &BTreeSet<String>| {
        let idx: Vec<usize> = subset
            .iter()
            .filter_map(|p| metric.index_of(p))
            .collect();
        let mut best = BigRational::zero();
        for (k, &i) in idx.iter().enumerate() {
            for &j in &idx[k + 1..] {
                if *metric.distance(i, j) > best {
                    best = metric.distance(i, j).clone();
                }
            }
        }
        best
    }
}

/// A random valid diversity: zero on atoms and bottom, values in a band
/// `[1, 2]` elsewhere (which makes subadditivity automatic), then scaled
/// by a random positive rational. Used to fuzz the theorem oracles.
pub fn random_diversity(lattice: &Arc<FiniteLattice>, rng: &mut impl Rng) -> DiversityFn {
    let n = lattice.len();
    let mut values = vec![BigRational::zero(); n];
    for a in 0..n {
        if a == lattice.bottom() || lattice.atoms().contains(&a) {
            continue;
        }
        let mut low = BigRational::one();
        for c in lattice.lower_covers(a) {
            if values[c] > low {
                low = values[c].clone();
            }
        }
        // A random rational in [low, 2], with denominator up to 16.
        let denom = rng.gen_range(1..=16i64);
        let step = (BigRational::from_integer(2.into()) - &low)
            / BigRational::from_integer(denom.into());
        let k = rng.gen_range(0..=denom);
        values[a] = &low + step * BigRational::from_integer(k.into());
    }
    let scale_num = rng.gen_range(1..=6i64);
    let scale_den = rng.gen_range(1..=6i64);
    let scale = BigRational::new(scale_num.into(), scale_den.into());
    for v in &mut values {
        *v *= &scale;
    }
    DiversityFn::new(lattice.clone(), values).expect("banded random diversities are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use rand::SeedableRng;

    fn m3() -> Arc<FiniteLattice> {
        Arc::new(
            FiniteLattice::from_covers(
                &["0", "a1", "a2", "a3", "a4"],
                &[
                    ("0", "a1"),
                    ("0", "a2"),
                    ("0", "a3"),
                    ("a1", "a4"),
                    ("a2", "a4"),
                    ("a3", "a4"),
                ],
            )
            .unwrap(),
        )
    }

    fn n5() -> Arc<FiniteLattice> {
        Arc::new(
            FiniteLattice::from_covers(
                &["0", "a1", "a2", "a3", "a4"],
                &[
                    ("0", "a1"),
                    ("0", "a2"),
                    ("a1", "a3"),
                    ("a3", "a4"),
                    ("a2", "a4"),
                ],
            )
            .unwrap(),
        )
    }

    #[test]
    fn trivial_on_m3_and_n5() {
        let d = trivial_diversity(&m3());
        assert_eq!(d.values(), &[rat(0), rat(0), rat(0), rat(0), rat(1)]);
        let d5 = trivial_diversity(&n5());
        let l = d5.lattice().clone();
        assert_eq!(*d5.value(l.require("a3").unwrap()), rat(1));
        assert_eq!(*d5.value(l.require("a4").unwrap()), rat(1));
        assert_eq!(*d5.value(l.require("a1").unwrap()), rat(0));
    }

    #[test]
    fn trivial_on_single_point() {
        let l = Arc::new(FiniteLattice::from_covers(&["0"], &[]).unwrap());
        let d = trivial_diversity(&l);
        assert_eq!(d.values(), &[rat(0)]);
    }

    #[test]
    fn height_diversity_on_powerset() {
        let l = Arc::new(powerset_lattice(&["1", "2", "3"], 1 << 20).unwrap());
        let d = height_diversity(&l).unwrap();
        for i in 0..l.len() {
            let name = l.element(i);
            let size = name.matches(',').count() + usize::from(name != "{}");
            let expected = if size == 0 { 0 } else { size as i64 - 1 };
            assert_eq!(*d.value(i), rat(expected), "at {name}");
        }
        assert!(d.is_strictly_monotone());
    }

    #[test]
    fn height_diversity_rejects_n5() {
        assert!(matches!(
            height_diversity(&n5()),
            Err(ConstructionError::NotModular { .. })
        ));
    }

    #[test]
    fn cardinality_diversity_values() {
        let l = Arc::new(powerset_lattice(&["1", "2", "3"], 1 << 20).unwrap());
        let d = cardinality_diversity(&l).unwrap();
        assert_eq!(*d.value(l.require("{1,2}").unwrap()), rat(2));
        assert_eq!(*d.value(l.require("{1}").unwrap()), rat(0));
        assert_eq!(*d.value(l.require("{1,2,3}").unwrap()), rat(3));

        let m = m3();
        let dm = cardinality_diversity(&m).unwrap();
        assert_eq!(*dm.value(m.require("a4").unwrap()), rat(2));

        let chain = Arc::new(FiniteLattice::from_covers(&["0", "a"], &[("0", "a")]).unwrap());
        let dc = cardinality_diversity(&chain).unwrap();
        assert!(dc.values().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn divisor_lattice_structure() {
        let l = divisor_lattice(12, 1 << 20).unwrap();
        assert_eq!(l.elements(), &["1", "2", "3", "4", "6", "12"]);
        let atom_names: Vec<&str> = l.atoms().iter().map(|&a| l.element(a)).collect();
        assert_eq!(atom_names, ["2", "3"]);
        let four = l.require("4").unwrap();
        let six = l.require("6").unwrap();
        assert_eq!(l.element(l.join(four, six)), "12");
        assert_eq!(l.element(l.meet(four, six)), "2");
        assert!(l.is_distributive());

        assert_eq!(divisor_lattice(1, 16).unwrap().len(), 1);
        let seven = divisor_lattice(7, 16).unwrap();
        assert_eq!(seven.elements(), &["1", "7"]);
    }

    #[test]
    fn omega_matches_paper_values() {
        assert_eq!(omega(1), 0);
        assert_eq!(omega(7), 1);
        assert_eq!(omega(6), 2);
        assert_eq!(omega(16), 4);
        assert_eq!(omega(360), 6);
    }

    #[test]
    fn omega_diversity_on_divisors() {
        let l = Arc::new(divisor_lattice(12, 1 << 20).unwrap());
        let d = omega_diversity(&l).unwrap();
        let val = |name: &str| d.value(l.require(name).unwrap()).clone();
        assert_eq!(val("2"), rat(0));
        assert_eq!(val("3"), rat(0));
        assert_eq!(val("4"), rat(2));
        assert_eq!(val("6"), rat(2));
        assert_eq!(val("12"), rat(3));

        let seven = Arc::new(divisor_lattice(7, 16).unwrap());
        let d7 = omega_diversity(&seven).unwrap();
        assert_eq!(*d7.value(seven.require("7").unwrap()), rat(0));
    }

    #[test]
    fn omega_diversity_rejects_other_lattices() {
        assert!(matches!(
            omega_diversity(&m3()),
            Err(ConstructionError::NotADivisorLattice(_))
        ));
    }

    #[test]
    fn height_equals_omega_on_divisor_lattices() {
        let l = divisor_lattice(360, 1 << 20).unwrap();
        assert_eq!(l.len(), 24);
        for i in 0..l.len() {
            let m: u64 = l.element(i).parse().unwrap();
            assert_eq!(l.height(i), omega(m), "h({m})");
        }
        let d = height_diversity(&Arc::new(l)).unwrap();
        let l = d.lattice().clone();
        assert_eq!(*d.value(l.require("360").unwrap()), rat(5));
    }

    #[test]
    fn omega_is_an_exact_valuation() {
        let l = divisor_lattice(360, 1 << 20).unwrap();
        for a in 0..l.len() {
            for b in 0..l.len() {
                let va = omega(l.element(a).parse().unwrap());
                let vb = omega(l.element(b).parse().unwrap());
                let vj = omega(l.element(l.join(a, b)).parse().unwrap());
                let vm = omega(l.element(l.meet(a, b)).parse().unwrap());
                assert_eq!(va + vb, vj + vm);
            }
        }
    }

    #[test]
    fn valuation_diversity_on_divisors() {
        let l = Arc::new(divisor_lattice(12, 1 << 20).unwrap());
        let values: BTreeMap<String, BigRational> = l
            .elements()
            .iter()
            .map(|name| {
                let m: u64 = name.parse().unwrap();
                (name.clone(), rat(omega(m) as i64))
            })
            .collect();
        let v = Valuation::from_named_values(&l, &values).unwrap();
        let d = valuation_diversity(&l, &v).unwrap();
        assert_eq!(*d.value(l.require("4").unwrap()), rat(2));
        assert_eq!(*d.value(l.require("2").unwrap()), rat(0));
        assert_eq!(*d.value(l.require("12").unwrap()), rat(3));
        assert!(d.is_strictly_monotone());
    }

    #[test]
    fn valuation_diversity_rejects_zero_valuation() {
        let l = Arc::new(divisor_lattice(12, 1 << 20).unwrap());
        let v = Valuation {
            values: vec![BigRational::zero(); l.len()],
        };
        assert!(matches!(
            valuation_diversity(&l, &v),
            Err(ConstructionError::NotPositive { .. })
        ));
    }

    #[test]
    fn cardinality_is_a_valuation_on_powerset() {
        let l = Arc::new(powerset_lattice(&["1", "2"], 64).unwrap());
        let values: BTreeMap<String, BigRational> = l
            .elements()
            .iter()
            .map(|name| {
                let size = name.matches(',').count() + usize::from(name != "{}");
                (name.clone(), rat(size as i64))
            })
            .collect();
        let v = Valuation::from_named_values(&l, &values).unwrap();
        let d = valuation_diversity(&l, &v).unwrap();
        assert_eq!(*d.value(l.require("{1,2}").unwrap()), rat(2));
    }

    #[test]
    fn multiset_lattice_shapes() {
        let single = multiset_lattice(&[("x".into(), 2)], 1 << 20).unwrap();
        assert_eq!(single.lattice.elements(), &["{}", "{x^1}", "{x^2}"]);

        let boolean = multiset_lattice(&[("x".into(), 1), ("y".into(), 1)], 1 << 20).unwrap();
        assert_eq!(boolean.lattice.len(), 4);
        assert_eq!(boolean.lattice.atoms().len(), 2);

        let grid = multiset_lattice(&[("x".into(), 2), ("y".into(), 2)], 1 << 20).unwrap();
        assert_eq!(grid.lattice.len(), 9);
        assert!(grid.lattice.is_distributive());
    }

    #[test]
    fn multiset_diversity_examples() {
        let zero_zero_one = vec![rat(0), rat(0), rat(1)];

        // Two points at distance 3; the pair multiset takes the metric value.
        let two = multiset_lattice(&[("x".into(), 2), ("y".into(), 2)], 1 << 20).unwrap();
        let metric = FiniteMetric::from_pairs(
            vec!["x".into(), "y".into()],
            &[("x".into(), "y".into(), rat(3))],
        )
        .unwrap();
        let chains: BTreeMap<String, Vec<BigRational>> = [
            ("x".to_string(), zero_zero_one.clone()),
            ("y".to_string(), zero_zero_one.clone()),
        ]
        .into();
        let d = multiset_diversity(&two, &metric, &chains).unwrap();
        let l = d.lattice().clone();
        assert_eq!(*d.value(l.require("{x^1,y^1}").unwrap()), rat(3));
        assert_eq!(*d.value(l.require("{x^1}").unwrap()), rat(0));

        // A single chain: only the f term contributes.
        let one = multiset_lattice(&[("x".into(), 2)], 1 << 20).unwrap();
        let unit = FiniteMetric::unit(vec!["x".into()]).unwrap();
        let chains: BTreeMap<String, Vec<BigRational>> =
            [("x".to_string(), vec![rat(0), rat(0), rat(5)])].into();
        let d = multiset_diversity(&one, &unit, &chains).unwrap();
        let l = d.lattice().clone();
        assert_eq!(*d.value(l.require("{x^2}").unwrap()), rat(5));
    }

    #[test]
    fn multiset_diversity_rejects_bad_chain_functions() {
        let one = multiset_lattice(&[("x".into(), 2)], 1 << 20).unwrap();
        let unit = FiniteMetric::unit(vec!["x".into()]).unwrap();
        for bad in [
            vec![rat(0), rat(1), rat(2)],
            vec![rat(0), rat(0), rat(0)],
            vec![rat(0), rat(0)],
            vec![rat(1), rat(0), rat(2)],
        ] {
            let chains: BTreeMap<String, Vec<BigRational>> = [("x".to_string(), bad)].into();
            assert!(matches!(
                multiset_diversity(&one, &unit, &chains),
                Err(ConstructionError::BadChainFunction { .. })
            ));
        }
    }

    #[test]
    fn restrict_classical_diameter() {
        let metric =
            FiniteMetric::unit(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let all: Vec<BTreeSet<String>> = (0u8..8)
            .map(|mask| {
                ["a", "b", "c"]
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, p)| p.to_string())
                    .collect()
            })
            .collect();
        let d = restrict_classical(&all, &diameter_diversity(&metric)).unwrap();
        let l = d.lattice().clone();
        assert_eq!(*d.value(l.require("{a,b}").unwrap()), rat(1));
        assert_eq!(*d.value(l.require("{a,b,c}").unwrap()), rat(1));
        assert_eq!(*d.value(l.require("{a}").unwrap()), rat(0));
    }

    #[test]
    fn restrict_classical_chain() {
        let family: Vec<BTreeSet<String>> = vec![
            BTreeSet::new(),
            ["a".to_string()].into(),
            ["a".to_string(), "b".to_string()].into(),
        ];
        let metric = FiniteMetric::unit(vec!["a".into(), "b".into()]).unwrap();
        let d = restrict_classical(&family, &diameter_diversity(&metric)).unwrap();
        assert_eq!(d.lattice().len(), 3);
    }

    #[test]
    fn restrict_classical_detects_missing_union() {
        let family: Vec<BTreeSet<String>> = vec![
            BTreeSet::new(),
            ["a".to_string()].into(),
            ["b".to_string()].into(),
        ];
        let metric = FiniteMetric::unit(vec!["a".into(), "b".into()]).unwrap();
        assert!(matches!(
            restrict_classical(&family, &diameter_diversity(&metric)),
            Err(ConstructionError::NotASublattice { op: "union", .. })
        ));
    }

    #[test]
    fn random_diversities_are_valid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for lattice in [
            m3(),
            n5(),
            Arc::new(divisor_lattice(12, 1 << 20).unwrap()),
            Arc::new(powerset_lattice(&["1", "2", "3"], 1 << 20).unwrap()),
        ] {
            for _ in 0..10 {
                let d = random_diversity(&lattice, &mut rng);
                assert!(d.is_valid());
            }
        }
    }
}
