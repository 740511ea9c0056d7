//! Finite lattices built from Hasse (cover) data.
//!
//! Elements carry string identifiers. Construction fixes a topological
//! order of the cover DAG (ties broken by input order) and all internal
//! computation runs on dense indices in that order, so every derived
//! table and every downstream output is deterministic. The order relation
//! is stored densely and meet/join are precomputed tables; the lattices
//! handled here are small, so the O(n^2)-O(n^3) precomputation is cheap.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bits::BitSet;

/// Default cap on derived element counts for the exponential
/// constructions (down-set lattices, power sets, multiset grids).
pub const DEFAULT_ELEMENT_LIMIT: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("a lattice needs at least one element")]
    Empty,
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("cover pair references unknown element `{0}`")]
    UnknownCoverElement(String),
    #[error("cover relation has a cycle through `{0}`")]
    Cycle(String),
    #[error("no least element: `{0}` and `{1}` are both minimal")]
    NoBottom(String, String),
    #[error("not a lattice: `{a}` and `{b}` have no unique {op}")]
    NotALattice {
        a: String,
        b: String,
        op: &'static str,
    },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("size limit exceeded: construction needs {needed} elements, limit is {limit}")]
    SizeLimit { needed: u128, limit: u128 },
}

/// A finite lattice with a least element.
///
/// Invariants established by [`FiniteLattice::from_covers`]:
/// - `leq` is the reflexive-transitive closure of the (acyclic) cover
///   relation and is a partial order;
/// - every pair has a unique join and meet, recorded in dense tables;
/// - a unique bottom exists; atoms are its upper covers; join-irreducibles
///   are the nonbottom elements with exactly one lower cover;
/// - `height(a)` is the length of the longest chain from bottom to `a`.
#[derive(Debug, Clone)]
pub struct FiniteLattice {
    elements: Vec<String>,
    index: BTreeMap<String, usize>,
    covers: Vec<(usize, usize)>,
    up: Vec<BitSet>,
    down: Vec<BitSet>,
    join: Vec<u32>,
    meet: Vec<u32>,
    atoms: Vec<usize>,
    join_irreducibles: Vec<usize>,
    heights: Vec<u32>,
}

impl PartialEq for FiniteLattice {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements && self.covers == other.covers
    }
}

impl Eq for FiniteLattice {}

/// Topologically sorts the DAG given by `edges` over `n` nodes, breaking
/// ties by node index. Returns the order, or a node on a cycle.
fn topo_order(n: usize, edges: &[(usize, usize)]) -> Result<Vec<usize>, usize> {
    let mut succ = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for &(lo, hi) in edges {
        succ[lo].push(hi);
        indegree[hi] += 1;
    }
    let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..n)
        .filter(|&i| indegree[i] == 0)
        .map(std::cmp::Reverse)
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(std::cmp::Reverse(i)) = ready.pop() {
        order.push(i);
        for &j in &succ[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.push(std::cmp::Reverse(j));
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err((0..n).find(|&i| indegree[i] > 0).unwrap())
    }
}

fn resolve_pairs<S: AsRef<str>>(
    index: &BTreeMap<String, usize>,
    pairs: &[(S, S)],
) -> Result<Vec<(usize, usize)>, LatticeError> {
    let mut out = Vec::with_capacity(pairs.len());
    for (lo, hi) in pairs {
        let lo = *index
            .get(lo.as_ref())
            .ok_or_else(|| LatticeError::UnknownCoverElement(lo.as_ref().to_string()))?;
        let hi = *index
            .get(hi.as_ref())
            .ok_or_else(|| LatticeError::UnknownCoverElement(hi.as_ref().to_string()))?;
        out.push((lo, hi));
    }
    Ok(out)
}

fn build_index<S: AsRef<str>>(elements: &[S]) -> Result<BTreeMap<String, usize>, LatticeError> {
    let mut index = BTreeMap::new();
    for (i, e) in elements.iter().enumerate() {
        if index.insert(e.as_ref().to_string(), i).is_some() {
            return Err(LatticeError::DuplicateElement(e.as_ref().to_string()));
        }
    }
    Ok(index)
}

/// Ordered elements, name index, cover pairs, and the up/down closures
/// produced by [`closure_in_topo_order`].
type OrderedClosure = (
    Vec<String>,
    BTreeMap<String, usize>,
    Vec<(usize, usize)>,
    Vec<BitSet>,
    Vec<BitSet>,
);

/// Orders elements topologically and computes the dense up/down closures
/// of the input relation. Shared between lattices and posets.
fn closure_in_topo_order<S: AsRef<str>>(
    elements: &[S],
    pairs: &[(S, S)],
) -> Result<OrderedClosure, LatticeError> {
    if elements.is_empty() {
        return Err(LatticeError::Empty);
    }
    let input_index = build_index(elements)?;
    let input_pairs = resolve_pairs(&input_index, pairs)?;
    if input_pairs.iter().any(|&(lo, hi)| lo == hi) {
        let &(lo, _) = input_pairs.iter().find(|&&(lo, hi)| lo == hi).unwrap();
        return Err(LatticeError::Cycle(elements[lo].as_ref().to_string()));
    }
    let n = elements.len();
    let order = topo_order(n, &input_pairs)
        .map_err(|i| LatticeError::Cycle(elements[i].as_ref().to_string()))?;
    let mut position = vec![0usize; n];
    for (pos, &old) in order.iter().enumerate() {
        position[old] = pos;
    }
    let names: Vec<String> = order
        .iter()
        .map(|&old| elements[old].as_ref().to_string())
        .collect();
    let index: BTreeMap<String, usize> = names
        .iter()
        .enumerate()
        .map(|(i, name)| (name.clone(), i))
        .collect();
    let mut edges: Vec<(usize, usize)> = input_pairs
        .iter()
        .map(|&(lo, hi)| (position[lo], position[hi]))
        .collect();
    edges.sort_unstable();
    edges.dedup();

    let mut up = vec![BitSet::new(n); n];
    let mut down = vec![BitSet::new(n); n];
    for a in (0..n).rev() {
        let mut set = BitSet::new(n);
        set.insert(a);
        for &(lo, hi) in &edges {
            if lo == a {
                let reach = up[hi].clone();
                set.union_with(&reach);
            }
        }
        up[a] = set;
    }
    for b in 0..n {
        let mut set = BitSet::new(n);
        set.insert(b);
        for &(lo, hi) in &edges {
            if hi == b {
                let reach = down[lo].clone();
                set.union_with(&reach);
            }
        }
        down[b] = set;
    }
    // Keep only true covers: a < b with nothing strictly between. Redundant
    // transitive pairs in the input are dropped here.
    let covers: Vec<(usize, usize)> = edges
        .into_iter()
        .filter(|&(lo, hi)| up[lo].intersect(&down[hi]).count() == 2)
        .collect();
    Ok((names, index, covers, up, down))
}

impl FiniteLattice {
    /// Builds and fully validates a lattice from element identifiers and
    /// cover pairs `(lower, upper)`. Fails fast with a witness when the
    /// input is cyclic, has no least element, or some pair lacks a unique
    /// join or meet.
    pub fn from_covers<S: AsRef<str>>(
        elements: &[S],
        covers: &[(S, S)],
    ) -> Result<Self, LatticeError> {
        let (names, index, covers, up, down) = closure_in_topo_order(elements, covers)?;
        let n = names.len();

        let minimal: Vec<usize> = (0..n).filter(|&a| down[a].count() == 1).collect();
        if minimal.len() > 1 {
            return Err(LatticeError::NoBottom(
                names[minimal[0]].clone(),
                names[minimal[1]].clone(),
            ));
        }
        let bottom = minimal[0];
        debug_assert_eq!(bottom, 0, "unique minimal element sorts first");

        let mut join = vec![0u32; n * n];
        let mut meet = vec![0u32; n * n];
        for a in 0..n {
            for b in a..n {
                let upper = up[a].intersect(&up[b]);
                let lub = match upper.first() {
                    Some(c) if upper.is_subset(&up[c]) => c,
                    _ => {
                        return Err(LatticeError::NotALattice {
                            a: names[a].clone(),
                            b: names[b].clone(),
                            op: "join",
                        })
                    }
                };
                let lower = down[a].intersect(&down[b]);
                let glb = match lower.last() {
                    Some(c) if lower.is_subset(&down[c]) => c,
                    _ => {
                        return Err(LatticeError::NotALattice {
                            a: names[a].clone(),
                            b: names[b].clone(),
                            op: "meet",
                        })
                    }
                };
                join[a * n + b] = lub as u32;
                join[b * n + a] = lub as u32;
                meet[a * n + b] = glb as u32;
                meet[b * n + a] = glb as u32;
            }
        }

        let atoms: Vec<usize> = covers
            .iter()
            .filter(|&&(lo, _)| lo == bottom)
            .map(|&(_, hi)| hi)
            .collect();
        let mut lower_cover_count = vec![0usize; n];
        for &(_, hi) in &covers {
            lower_cover_count[hi] += 1;
        }
        let join_irreducibles: Vec<usize> = (0..n)
            .filter(|&a| a != bottom && lower_cover_count[a] == 1)
            .collect();

        let mut heights = vec![0u32; n];
        for &(lo, hi) in &covers {
            // Cover pairs are sorted and the element order is topological,
            // so lo's height is final when hi is updated.
            heights[hi] = heights[hi].max(heights[lo] + 1);
        }

        Ok(FiniteLattice {
            elements: names,
            index,
            covers,
            up,
            down,
            join,
            meet,
            atoms,
            join_irreducibles,
            heights,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn element(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Index lookup that reports [`LatticeError::UnknownElement`].
    pub fn require(&self, name: &str) -> Result<usize, LatticeError> {
        self.index_of(name)
            .ok_or_else(|| LatticeError::UnknownElement(name.to_string()))
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.elements.len() - 1
    }

    /// Cover pairs `(lower, upper)` in canonical order.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.len() + b] as usize
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.len() + b] as usize
    }

    /// Join of a set of elements; the empty join is the bottom.
    pub fn join_all(&self, items: impl IntoIterator<Item = usize>) -> usize {
        items
            .into_iter()
            .fold(self.bottom(), |acc, x| self.join(acc, x))
    }

    /// Meet of a nonempty set of elements.
    pub fn meet_all(&self, items: impl IntoIterator<Item = usize>) -> Option<usize> {
        items.into_iter().reduce(|acc, x| self.meet(acc, x))
    }

    /// Down-set of `a`: all `y` with `y <= a`, in element order.
    pub fn down_set(&self, a: usize) -> Vec<usize> {
        self.down[a].iter().collect()
    }

    /// Up-set of `a`: all `y` with `a <= y`, in element order.
    pub fn up_set(&self, a: usize) -> Vec<usize> {
        self.up[a].iter().collect()
    }

    pub fn atoms(&self) -> &[usize] {
        &self.atoms
    }

    pub fn join_irreducibles(&self) -> &[usize] {
        &self.join_irreducibles
    }

    /// Length of the longest chain from the bottom to `a`.
    pub fn height(&self, a: usize) -> u32 {
        self.heights[a]
    }

    pub fn lower_covers(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.covers
            .iter()
            .filter(move |&&(_, hi)| hi == a)
            .map(|&(lo, _)| lo)
    }

    pub fn upper_covers(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.covers
            .iter()
            .filter(move |&&(lo, _)| lo == a)
            .map(|&(_, hi)| hi)
    }

    /// First triple `(a, b, c)` with `c <= a` violating the modular law
    /// `a /\ (b \/ c) = (a /\ b) \/ c`, or `None` when modular.
    pub fn modularity_witness(&self) -> Option<[usize; 3]> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.leq(c, a)
                        && self.meet(a, self.join(b, c)) != self.join(self.meet(a, b), c)
                    {
                        return Some([a, b, c]);
                    }
                }
            }
        }
        None
    }

    pub fn is_modular(&self) -> bool {
        self.modularity_witness().is_none()
    }

    /// First triple violating `a /\ (b \/ c) = (a /\ b) \/ (a /\ c)`,
    /// or `None` when distributive.
    pub fn distributivity_witness(&self) -> Option<[usize; 3]> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.meet(a, self.join(b, c))
                        != self.join(self.meet(a, b), self.meet(a, c))
                    {
                        return Some([a, b, c]);
                    }
                }
            }
        }
        None
    }

    pub fn is_distributive(&self) -> bool {
        self.distributivity_witness().is_none()
    }

    /// True when `set` is an antichain (pairwise incomparable).
    pub fn is_antichain(&self, set: &[usize]) -> bool {
        for (k, &a) in set.iter().enumerate() {
            for &b in &set[k + 1..] {
                if self.comparable(a, b) {
                    return false;
                }
            }
        }
        true
    }

    /// All antichains of `L \ {bottom}` in lexicographic index order,
    /// including the empty antichain.
    pub fn antichains_excluding_bottom(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut out = vec![Vec::new()];
        let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
        while let Some(current) = stack.pop() {
            let start = current.last().map_or(self.bottom() + 1, |&l| l + 1);
            for next in start..n {
                if current.iter().all(|&a| !self.comparable(a, next)) {
                    let mut bigger = current.clone();
                    bigger.push(next);
                    out.push(bigger.clone());
                    stack.push(bigger);
                }
            }
        }
        out.sort();
        out
    }
}

/// A finite poset: element identifiers plus the order relation. Used as
/// the input of down-set lattice construction; no join/meet validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    elements: Vec<String>,
    down: Vec<BitSet>,
}

impl Poset {
    /// Builds a poset from cover (or any order-generating) pairs.
    pub fn from_covers<S: AsRef<str>>(elements: &[S], pairs: &[(S, S)]) -> Result<Self, LatticeError> {
        let (names, _, _, _, down) = closure_in_topo_order(elements, pairs)?;
        Ok(Poset {
            elements: names,
            down,
        })
    }

    /// The sub-poset of a lattice induced on `subset` (lattice indices).
    pub fn induced(lattice: &FiniteLattice, subset: &[usize]) -> Self {
        let k = subset.len();
        let mut down = vec![BitSet::new(k); k];
        for (i, &a) in subset.iter().enumerate() {
            for (j, &b) in subset.iter().enumerate() {
                if lattice.leq(b, a) {
                    down[i].insert(j);
                }
            }
        }
        Poset {
            elements: subset
                .iter()
                .map(|&a| lattice.element(a).to_string())
                .collect(),
            down,
        }
    }

    /// An antichain poset (no relations) on the given points.
    pub fn antichain<S: AsRef<str>>(points: &[S]) -> Result<Self, LatticeError> {
        let pairs: [(S, S); 0] = [];
        Poset::from_covers(points, &pairs)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.down[b].contains(a)
    }
}

/// Canonical name of a set of poset elements: sorted member list in braces.
pub(crate) fn member_set_name(names: &[&str]) -> String {
    format!("{{{}}}", names.join(","))
}

/// The lattice of lower sets of `poset`, ordered by inclusion, with
/// elements named by their sorted member lists. Meet and join are
/// intersection and union. Checks `2^|P|` against `limit` before doing
/// any work.
pub fn downsets_lattice(poset: &Poset, limit: u128) -> Result<FiniteLattice, LatticeError> {
    downsets_lattice_with_members(poset, limit).map(|(lattice, _)| lattice)
}

/// As [`downsets_lattice`], also returning, per lattice element, the poset
/// indices of the corresponding lower set.
pub fn downsets_lattice_with_members(
    poset: &Poset,
    limit: u128,
) -> Result<(FiniteLattice, Vec<Vec<usize>>), LatticeError> {
    let k = poset.len();
    if k >= 64 || (1u128 << k) > limit {
        return Err(LatticeError::SizeLimit {
            needed: if k >= 128 { u128::MAX } else { 1u128 << k },
            limit,
        });
    }
    let mut pred_mask = vec![0u64; k];
    for i in 0..k {
        for j in 0..k {
            if poset.leq(j, i) {
                pred_mask[i] |= 1 << j;
            }
        }
    }
    let mut lower_sets = Vec::new();
    for mask in 0u64..(1 << k) {
        let closure = (0..k)
            .filter(|&i| mask >> i & 1 == 1)
            .fold(0u64, |acc, i| acc | pred_mask[i]);
        if closure == mask {
            lower_sets.push(mask);
        }
    }
    // Size-then-lexicographic member order; ascending size is topological
    // for inclusion.
    let mut keyed: Vec<(usize, Vec<usize>, u64)> = lower_sets
        .iter()
        .map(|&mask| {
            let members: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
            (members.len(), members, mask)
        })
        .collect();
    keyed.sort();
    let position: BTreeMap<u64, usize> = keyed
        .iter()
        .enumerate()
        .map(|(pos, (_, _, mask))| (*mask, pos))
        .collect();
    let names: Vec<String> = keyed
        .iter()
        .map(|(_, members, _)| {
            member_set_name(&members.iter().map(|&i| poset.element(i)).collect::<Vec<_>>())
        })
        .collect();
    let mut covers: Vec<(String, String)> = Vec::new();
    for (pos, (_, members, mask)) in keyed.iter().enumerate() {
        for &i in members {
            let smaller = mask & !(1 << i);
            if let Some(&from) = position.get(&smaller) {
                covers.push((names[from].clone(), names[pos].clone()));
            }
        }
    }
    let lattice = FiniteLattice::from_covers(&names, &covers)?;
    let mut members = vec![Vec::new(); lattice.len()];
    for (pos, (_, member_list, _)) in keyed.into_iter().enumerate() {
        let li = lattice
            .index_of(&names[pos])
            .expect("down-set names survive construction");
        members[li] = member_list;
    }
    Ok((lattice, members))
}
