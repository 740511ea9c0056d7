//! Birkhoff representation of finite distributive lattices.
//!
//! Every finite distributive lattice is isomorphic to the lattice of
//! lower sets of its join-irreducibles, via `eta(a) = J(L) /\ downset(a)`
//! with inverse `A -> join(A)`. A lattice diversity on a distributive
//! lattice then extends to a classical diversity on all subsets of
//! `J(L)`: `hat(A) = delta(join A)` for `|A| >= 2` and 0 otherwise, whose
//! restriction to the lower sets recovers the original diversity.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::rational::BigRational;
use num::Zero;
use thiserror::Error;

use crate::diversity::{DiversityError, DiversityFn};
use crate::lattice::{downsets_lattice_with_members, FiniteLattice, LatticeError, Poset};

/// Default cap on `|J(L)|` for the exhaustive extension-theorem check.
pub const DEFAULT_JIRR_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BirkhoffError {
    #[error("lattice is not distributive: witness ({a}, {b}, {c})")]
    NotDistributive { a: String, b: String, c: String },
    #[error("`{0}` is not join-irreducible")]
    NotInJ(String),
    #[error("size limit exceeded: |J(L)| = {size}, limit is {limit}")]
    SizeLimit { size: usize, limit: usize },
    #[error(transparent)]
    Diversity(#[from] DiversityError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("isomorphism law failed (bug): {0}")]
    BrokenIsomorphism(String),
}

/// The verified isomorphism between a finite distributive lattice and the
/// down-set lattice of its join-irreducibles.
#[derive(Debug, Clone)]
pub struct BirkhoffRepresentation {
    source: Arc<FiniteLattice>,
    /// Source indices of the join-irreducibles, in element order.
    jirr: Vec<usize>,
    jirr_poset: Poset,
    target: Arc<FiniteLattice>,
    /// Source element -> target element.
    eta: Vec<usize>,
    /// Target element -> source element (`join` of the lower set).
    eta_inv: Vec<usize>,
    /// Target element -> positions into `jirr` of its members.
    target_members: Vec<Vec<usize>>,
}

impl BirkhoffRepresentation {
    pub fn source(&self) -> &Arc<FiniteLattice> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteLattice> {
        &self.target
    }

    pub fn jirr(&self) -> &[usize] {
        &self.jirr
    }

    pub fn jirr_poset(&self) -> &Poset {
        &self.jirr_poset
    }

    pub fn eta(&self, source_element: usize) -> usize {
        self.eta[source_element]
    }

    pub fn eta_inv(&self, target_element: usize) -> usize {
        self.eta_inv[target_element]
    }

    /// Members of `eta(a)` as source lattice indices, ascending.
    pub fn eta_members(&self, source_element: usize) -> Vec<usize> {
        self.target_members[self.eta[source_element]]
            .iter()
            .map(|&pos| self.jirr[pos])
            .collect()
    }
}

/// Computes and fully verifies the representation. Fails with a witness
/// triple when the lattice is not distributive.
pub fn representation(
    lattice: &Arc<FiniteLattice>,
    limit: u128,
) -> Result<BirkhoffRepresentation, BirkhoffError> {
    if let Some([a, b, c]) = lattice.distributivity_witness() {
        return Err(BirkhoffError::NotDistributive {
            a: lattice.element(a).to_string(),
            b: lattice.element(b).to_string(),
            c: lattice.element(c).to_string(),
        });
    }
    let jirr: Vec<usize> = lattice.join_irreducibles().to_vec();
    let jirr_poset = Poset::induced(lattice, &jirr);
    let (target, target_members) = downsets_lattice_with_members(&jirr_poset, limit)?;
    let target = Arc::new(target);

    let members_to_target: BTreeMap<Vec<usize>, usize> = target_members
        .iter()
        .enumerate()
        .map(|(t, members)| (members.clone(), t))
        .collect();
    let mut eta = Vec::with_capacity(lattice.len());
    for a in 0..lattice.len() {
        let members: Vec<usize> = jirr
            .iter()
            .enumerate()
            .filter(|&(_, &j)| lattice.leq(j, a))
            .map(|(pos, _)| pos)
            .collect();
        let t = members_to_target.get(&members).copied().ok_or_else(|| {
            BirkhoffError::BrokenIsomorphism(format!(
                "eta({}) is not a lower set of J(L)",
                lattice.element(a)
            ))
        })?;
        eta.push(t);
    }
    if target.len() != lattice.len() {
        return Err(BirkhoffError::BrokenIsomorphism(format!(
            "|L| = {} but |O(J(L))| = {}",
            lattice.len(),
            target.len()
        )));
    }
    let mut eta_inv = vec![usize::MAX; target.len()];
    for (t, members) in target_members.iter().enumerate() {
        eta_inv[t] = lattice.join_all(members.iter().map(|&pos| jirr[pos]));
    }
    for a in 0..lattice.len() {
        if eta_inv[eta[a]] != a {
            return Err(BirkhoffError::BrokenIsomorphism(format!(
                "eta_inv(eta({0})) != {0}",
                lattice.element(a)
            )));
        }
    }
    for a in 0..lattice.len() {
        for b in 0..lattice.len() {
            if eta[lattice.join(a, b)] != target.join(eta[a], eta[b])
                || eta[lattice.meet(a, b)] != target.meet(eta[a], eta[b])
            {
                return Err(BirkhoffError::BrokenIsomorphism(format!(
                    "eta is not a homomorphism at ({}, {})",
                    lattice.element(a),
                    lattice.element(b)
                )));
            }
        }
    }
    Ok(BirkhoffRepresentation {
        source: lattice.clone(),
        jirr,
        jirr_poset,
        target,
        eta,
        eta_inv,
        target_members,
    })
}

/// The extended classical diversity on subsets of `J(L)`:
/// `delta(join A)` when `|A| >= 2`, else 0. Defined for every subset, not
/// only lower sets; `subset` holds source lattice indices.
pub fn hat_delta(
    diversity: &DiversityFn,
    subset: &[usize],
) -> Result<BigRational, BirkhoffError> {
    diversity.require_valid()?;
    let lattice = diversity.lattice();
    let mut distinct: Vec<usize> = subset.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    for &x in &distinct {
        if !lattice.join_irreducibles().contains(&x) {
            return Err(BirkhoffError::NotInJ(lattice.element(x).to_string()));
        }
    }
    if distinct.len() < 2 {
        return Ok(BigRational::zero());
    }
    Ok(diversity.value_of_join(distinct).clone())
}

/// One failed check of the extension theorem; never produced for a valid
/// diversity on a distributive lattice (the checks are theorem oracles).
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionViolation {
    pub check: &'static str,
    pub detail: String,
}

/// Outcome of [`verify_extension_theorem`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionReport {
    /// Join-irreducible element names, in element order.
    pub jirr: Vec<String>,
    pub subsets_checked: usize,
    pub violations: Vec<ExtensionViolation>,
}

impl ExtensionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustively checks, over all subsets of `J(L)`, that the extension
/// `hat` (a) is zero exactly on subsets of size <= 1, (b) is monotone,
/// (c) is subadditive on intersecting subsets, and (d) restricts along
/// `eta` to the original diversity.
pub fn verify_extension_theorem(
    diversity: &DiversityFn,
    jirr_limit: usize,
) -> Result<ExtensionReport, BirkhoffError> {
    diversity.require_valid()?;
    let lattice = diversity.lattice();
    if let Some([a, b, c]) = lattice.distributivity_witness() {
        return Err(BirkhoffError::NotDistributive {
            a: lattice.element(a).to_string(),
            b: lattice.element(b).to_string(),
            c: lattice.element(c).to_string(),
        });
    }
    let jirr = lattice.join_irreducibles();
    let k = jirr.len();
    if k > jirr_limit || k >= 64 {
        return Err(BirkhoffError::SizeLimit {
            size: k,
            limit: jirr_limit,
        });
    }
    let size = 1usize << k;
    let mut join_of = vec![lattice.bottom(); size];
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        join_of[mask] = lattice.join(join_of[mask & (mask - 1)], jirr[low]);
    }
    let hat: Vec<BigRational> = (0..size)
        .map(|mask| {
            if (mask as u32).count_ones() >= 2 {
                diversity.value(join_of[mask]).clone()
            } else {
                BigRational::zero()
            }
        })
        .collect();
    let mask_name = |mask: usize| {
        let names: Vec<&str> = (0..k)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| lattice.element(jirr[i]))
            .collect();
        format!("{{{}}}", names.join(","))
    };

    let mut violations = Vec::new();

    for (mask, value) in hat.iter().enumerate() {
        let small = (mask as u32).count_ones() <= 1;
        if value.is_zero() != small {
            violations.push(ExtensionViolation {
                check: "zero pattern",
                detail: format!("hat({}) = {}", mask_name(mask), value),
            });
            break;
        }
    }

    'monotone: for mask in 0..size {
        // Proper subsets of mask, descending.
        let mut sub = (mask.wrapping_sub(1)) & mask;
        loop {
            if hat[sub] > hat[mask] {
                violations.push(ExtensionViolation {
                    check: "monotonicity",
                    detail: format!("{} inside {}", mask_name(sub), mask_name(mask)),
                });
                break 'monotone;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
    }

    'subadd: for a in 0..size {
        for b in a..size {
            if a & b == 0 {
                continue;
            }
            let bound = &hat[a] + &hat[b];
            if hat[a | b] > bound {
                violations.push(ExtensionViolation {
                    check: "subadditivity",
                    detail: format!("{} and {}", mask_name(a), mask_name(b)),
                });
                break 'subadd;
            }
        }
    }

    for a in 0..lattice.len() {
        let mask = (0..k).fold(0usize, |acc, i| {
            if lattice.leq(jirr[i], a) {
                acc | (1 << i)
            } else {
                acc
            }
        });
        if hat[mask] != *diversity.value(a) {
            violations.push(ExtensionViolation {
                check: "restriction",
                detail: format!(
                    "hat(eta({})) = {} but delta = {}",
                    lattice.element(a),
                    hat[mask],
                    diversity.value(a)
                ),
            });
            break;
        }
    }

    Ok(ExtensionReport {
        jirr: jirr.iter().map(|&j| lattice.element(j).to_string()).collect(),
        subsets_checked: size,
        violations,
    })
}
