//! Reference implementations from the raw definitions.
//!
//! These scan *all* nonempty subsets of the lattice, with no antichain or
//! domination reductions, and decide minimality by exact per-coordinate
//! infima. They are exponential and exist only to cross-check the reduced
//! constraint machinery in `tightspan`; nothing here shares code with it.

use num::rational::BigRational;
use num::Zero;

use crate::diversity::DiversityFn;
use crate::tightspan::{LatticeFunction, TightSpanError};

const MAX_ELEMENTS: usize = 20;

fn guard(d: &DiversityFn, f: &LatticeFunction) -> Result<usize, TightSpanError> {
    d.require_valid().map_err(TightSpanError::Diversity)?;
    if f.lattice() != d.lattice() {
        return Err(TightSpanError::LatticeMismatch);
    }
    let n = d.lattice().len();
    if n > MAX_ELEMENTS {
        return Err(TightSpanError::SizeLimit {
            size: n,
            limit: MAX_ELEMENTS,
        });
    }
    Ok(n)
}

/// Membership in `P_L` straight from the definition: for every nonempty
/// subset `B` of the lattice (bottom and comparable members included),
/// `sum_{b in B} f(b) >= delta(join B)`.
pub fn in_pl_all_subsets(
    diversity: &DiversityFn,
    f: &LatticeFunction,
) -> Result<bool, TightSpanError> {
    let n = guard(diversity, f)?;
    let lattice = diversity.lattice();
    for mask in 1u64..(1 << n) {
        let members = (0..n).filter(|&i| mask >> i & 1 == 1);
        let join = lattice.join_all(members.clone());
        let sum = members.fold(BigRational::zero(), |acc, i| acc + f.value(i));
        if sum < *diversity.value(join) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The exact infimum of coordinate `a` over `P_L` with all other
/// coordinates of `f` held fixed:
/// `max(0, max_{B containing a} (delta(join B) - sum_{b in B, b != a} f(b)))`.
pub fn coordinate_infimum(
    diversity: &DiversityFn,
    f: &LatticeFunction,
    a: usize,
) -> Result<BigRational, TightSpanError> {
    let n = guard(diversity, f)?;
    let lattice = diversity.lattice();
    let mut best = BigRational::zero();
    for mask in 1u64..(1 << n) {
        if mask >> a & 1 == 0 {
            continue;
        }
        let members = (0..n).filter(|&i| mask >> i & 1 == 1);
        let join = lattice.join_all(members.clone());
        let others = members
            .filter(|&i| i != a)
            .fold(BigRational::zero(), |acc, i| acc + f.value(i));
        let bound = diversity.value(join) - others;
        if bound > best {
            best = bound;
        }
    }
    Ok(best)
}

/// Membership in `T_L` straight from the definition of minimality: `f`
/// is feasible and no `g` with `g <= f` pointwise, `g != f`, stays
/// feasible. Constraint coefficients are nonnegative, so this reduces to
/// each coordinate already sitting at its exact infimum.
pub fn in_tl_by_minimality(
    diversity: &DiversityFn,
    f: &LatticeFunction,
) -> Result<bool, TightSpanError> {
    if !in_pl_all_subsets(diversity, f)? {
        return Ok(false);
    }
    for a in 0..diversity.lattice().len() {
        if *f.value(a) != coordinate_infimum(diversity, f, a)? {
            return Ok(false);
        }
    }
    Ok(true)
}
