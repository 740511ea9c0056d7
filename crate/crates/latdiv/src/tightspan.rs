//! The tight span of a lattice diversity.
//!
//! `P_L` is the polyhedron of nonnegative functions `f` on the lattice
//! with `sum_{b in B} f(b) >= delta(join B)` for every finite subset `B`;
//! the tight span `T_L` is its set of pointwise-minimal elements. Two
//! reductions make the constraint family finite and irredundant: supports
//! containing the bottom are dominated (`f(0) >= 0` and the join is
//! unchanged), and dropping the smaller of two comparable support members
//! weakens the left side without changing the join, so only antichains
//! are needed. A constraint is dominated when a proper subset of its
//! support yields the same right-hand side.
//!
//! Because all constraint coefficients are nonnegative, a feasible `f`
//! is minimal exactly when no single coordinate can be lowered: each
//! coordinate is either 0 or appears in some tight constraint. That makes
//! `T_L` the union of the bounded faces of `P_L`, which
//! [`enumerate_tight_span`] computes exactly and cross-checks by
//! sampling.

use std::sync::Arc;

use num::rational::BigRational;
use num::Zero;
use thiserror::Error;

use crate::diversity::{DiversityError, DiversityFn};
use crate::lattice::{FiniteLattice, LatticeError};
use crate::polyhedron::{double_description, enumerate_faces, Row};
use crate::rational::format_rational;

/// Default cap on `|L|` for constraint enumeration.
pub const DEFAULT_CONSTRAINT_ELEMENTS: usize = 14;
/// Default cap on `|L|` for full tight-span enumeration.
pub const DEFAULT_ENUMERATION_ELEMENTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TightSpanError {
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("negative value {value} at `{element}`")]
    NegativeValue { element: String, value: String },
    #[error("function and constraint system live on different lattices")]
    LatticeMismatch,
    #[error("point is not in P_L: violates {0}")]
    NotInPl(String),
    #[error("point is not in T_L: {0}")]
    NotInTl(String),
    #[error("size limit exceeded: |L| = {size}, limit is {limit}")]
    SizeLimit { size: usize, limit: usize },
    #[error("self-validation failed (bug): {0}")]
    SelfValidation(String),
    #[error(transparent)]
    Diversity(#[from] DiversityError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A nonnegative rational function on the lattice elements; the points of
/// `P_L` and `T_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFunction {
    lattice: Arc<FiniteLattice>,
    values: Vec<BigRational>,
}

impl LatticeFunction {
    pub fn new(
        lattice: Arc<FiniteLattice>,
        values: Vec<BigRational>,
    ) -> Result<Self, TightSpanError> {
        if values.len() != lattice.len() {
            return Err(TightSpanError::WrongLength {
                expected: lattice.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| v < &BigRational::zero()) {
            return Err(TightSpanError::NegativeValue {
                element: lattice.element(i).to_string(),
                value: format_rational(&values[i]),
            });
        }
        Ok(LatticeFunction { lattice, values })
    }

    pub fn lattice(&self) -> &Arc<FiniteLattice> {
        &self.lattice
    }

    pub fn value(&self, element: usize) -> &BigRational {
        &self.values[element]
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// Pointwise order on functions.
    pub fn pointwise_leq(&self, other: &LatticeFunction) -> bool {
        self.values
            .iter()
            .zip(&other.values)
            .all(|(a, b)| a <= b)
    }

    /// `(v0, v1, ...)` in element order.
    pub fn tuple_string(&self) -> String {
        let coords: Vec<String> = self.values.iter().map(format_rational).collect();
        format!("({})", coords.join(", "))
    }
}

/// One irredundant constraint `sum_{b in support} f(b) >= rhs`, with
/// `rhs = delta(join of support)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub support: Vec<usize>,
    pub join: usize,
    pub rhs: BigRational,
}

/// The irredundant constraint family defining `P_L`, together with the
/// lattice and diversity it came from.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    lattice: Arc<FiniteLattice>,
    delta: Vec<BigRational>,
    constraints: Vec<Constraint>,
    /// All antichains of `L \ {bottom}` including the empty one; kept for
    /// the fixpoint characterization, which cannot use the reduced family.
    antichains: Vec<Vec<usize>>,
}

/// Enumerates all antichain constraints of Definition-style `P_L`, drops
/// right-hand sides of 0 (implied by nonnegativity) and dominated
/// supports, and returns them in lexicographic support order.
pub fn constraint_system(
    diversity: &DiversityFn,
    max_elements: usize,
) -> Result<ConstraintSystem, TightSpanError> {
    diversity.require_valid()?;
    let lattice = diversity.lattice().clone();
    if lattice.len() > max_elements {
        return Err(TightSpanError::SizeLimit {
            size: lattice.len(),
            limit: max_elements,
        });
    }
    let antichains = lattice.antichains_excluding_bottom();
    let mut constraints = Vec::new();
    for support in &antichains {
        if support.is_empty() {
            continue;
        }
        let join = lattice.join_all(support.iter().copied());
        let rhs = diversity.value(join).clone();
        if rhs.is_zero() {
            continue;
        }
        // Dominated when a proper nonempty subset already forces the same
        // right-hand side with fewer left-hand terms.
        let k = support.len();
        let mut dominated = false;
        'masks: for mask in 1..((1usize << k) - 1) {
            let subset: Vec<usize> = (0..k)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| support[i])
                .collect();
            let sub_join = lattice.join_all(subset.iter().copied());
            if *diversity.value(sub_join) >= rhs {
                dominated = true;
                break 'masks;
            }
        }
        if !dominated {
            constraints.push(Constraint {
                support: support.clone(),
                join,
                rhs,
            });
        }
    }
    constraints.sort_by(|a, b| a.support.cmp(&b.support));
    Ok(ConstraintSystem {
        lattice,
        delta: diversity.values().to_vec(),
        constraints,
        antichains,
    })
}

/// Per-coordinate witness that no single coordinate of a member of `T_L`
/// can be lowered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoordinateCertificate {
    /// The coordinate is 0.
    Zero,
    /// The constraint with this index holds with equality.
    Tight(usize),
}

/// Outcome of the `T_L` membership test.
#[derive(Debug, Clone, PartialEq)]
pub enum TlMembership {
    /// In `T_L`; one certificate per element, in element order.
    Member(Vec<CoordinateCertificate>),
    /// Violates the constraint with this index.
    NotInPl(usize),
    /// Feasible, but this element's value can be lowered.
    NotMinimal(usize),
}

impl TlMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, TlMembership::Member(_))
    }
}

impl ConstraintSystem {
    pub fn lattice(&self) -> &Arc<FiniteLattice> {
        &self.lattice
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn delta(&self) -> &[BigRational] {
        &self.delta
    }

    /// Human-readable form of one constraint.
    pub fn describe(&self, index: usize) -> String {
        let c = &self.constraints[index];
        let terms: Vec<String> = c
            .support
            .iter()
            .map(|&b| format!("f({})", self.lattice.element(b)))
            .collect();
        format!("{} >= {}", terms.join(" + "), format_rational(&c.rhs))
    }

    fn check_same_lattice(&self, f: &LatticeFunction) -> Result<(), TightSpanError> {
        if *f.lattice() == self.lattice {
            Ok(())
        } else {
            Err(TightSpanError::LatticeMismatch)
        }
    }

    fn support_sum(&self, c: &Constraint, values: &[BigRational]) -> BigRational {
        c.support
            .iter()
            .fold(BigRational::zero(), |acc, &b| acc + &values[b])
    }

    /// Membership in `P_L`: `None` when every constraint holds, otherwise
    /// the first violated constraint in canonical order.
    pub fn in_pl(&self, f: &LatticeFunction) -> Result<Option<usize>, TightSpanError> {
        self.check_same_lattice(f)?;
        for (i, c) in self.constraints.iter().enumerate() {
            if self.support_sum(c, f.values()) < c.rhs {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Membership in `T_L`, with a per-coordinate certificate. A feasible
    /// point is minimal exactly when each element is 0 or sits in a tight
    /// constraint (coefficients are nonnegative, so minimality reduces to
    /// single-coordinate non-decreasability).
    pub fn in_tl(&self, f: &LatticeFunction) -> Result<TlMembership, TightSpanError> {
        if let Some(violated) = self.in_pl(f)? {
            return Ok(TlMembership::NotInPl(violated));
        }
        let mut certificates = Vec::with_capacity(self.lattice.len());
        for a in 0..self.lattice.len() {
            if f.value(a).is_zero() {
                certificates.push(CoordinateCertificate::Zero);
                continue;
            }
            let tight = self.constraints.iter().enumerate().find(|(_, c)| {
                c.support.contains(&a) && self.support_sum(c, f.values()) == c.rhs
            });
            match tight {
                Some((i, _)) => certificates.push(CoordinateCertificate::Tight(i)),
                None => return Ok(TlMembership::NotMinimal(a)),
            }
        }
        Ok(TlMembership::Member(certificates))
    }

    /// Lowers a feasible point to a member of `T_L` below it: one pass in
    /// element order, dropping each coordinate to its exact lower bound.
    /// Lowering a later coordinate can only raise an earlier coordinate's
    /// bound up to its already-tight value, so a single pass suffices;
    /// that property is covered by tests rather than assumed.
    pub fn minimize(&self, f: &LatticeFunction) -> Result<LatticeFunction, TightSpanError> {
        if let Some(violated) = self.in_pl(f)? {
            return Err(TightSpanError::NotInPl(self.describe(violated)));
        }
        let mut values = f.values().to_vec();
        for a in 0..self.lattice.len() {
            let mut bound = BigRational::zero();
            for c in &self.constraints {
                if !c.support.contains(&a) {
                    continue;
                }
                let others: BigRational = c
                    .support
                    .iter()
                    .filter(|&&b| b != a)
                    .fold(BigRational::zero(), |acc, &b| acc + &values[b]);
                let needed = &c.rhs - others;
                if needed > bound {
                    bound = needed;
                }
            }
            values[a] = bound;
        }
        LatticeFunction::new(self.lattice.clone(), values)
    }

    /// The fixpoint characterization of `T_L`: `f` is a member exactly
    /// when, at every `a`,
    /// `f(a) = max_B (delta(a v join B) - sum_{b in B} f(b))`
    /// over finite subsets `B` (the empty `B` contributes `delta(a)`).
    /// Antichains realize the maximum. Returns the first element where
    /// the fixpoint fails, or `None` for members.
    pub fn characterization_witness(
        &self,
        f: &LatticeFunction,
    ) -> Result<Option<usize>, TightSpanError> {
        self.check_same_lattice(f)?;
        for a in 0..self.lattice.len() {
            let mut best: Option<BigRational> = None;
            for support in &self.antichains {
                let join = self
                    .lattice
                    .join(a, self.lattice.join_all(support.iter().copied()));
                let mut value = self.delta[join].clone();
                for &b in support {
                    value -= f.value(b);
                }
                if best.as_ref().is_none_or(|current| value > *current) {
                    best = Some(value);
                }
            }
            if best.expect("antichain list includes the empty set") != *f.value(a) {
                return Ok(Some(a));
            }
        }
        Ok(None)
    }
}

/// The candidate embedding `kappa(x) = a -> delta(x v a)`. Order
/// preserving; lands in `P_L` for `x != 0` and in `T_L` for atoms, while
/// `kappa(0)` is the diversity itself.
pub fn kappa(diversity: &DiversityFn, x: usize) -> Result<LatticeFunction, TightSpanError> {
    diversity.require_valid()?;
    let lattice = diversity.lattice();
    let values = (0..lattice.len())
        .map(|a| diversity.value(lattice.join(x, a)).clone())
        .collect();
    LatticeFunction::new(lattice.clone(), values)
}

/// A triple where `kappa` fails to commute with joins:
/// `h_{a v b}(c) != max(h_a(c), h_b(c))`.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaGap {
    pub a: String,
    pub b: String,
    pub witness: String,
    /// `delta(a v b v c)`.
    pub joint: BigRational,
    /// `max(delta(a v c), delta(b v c))`.
    pub separate: BigRational,
    /// `joint - separate`; always positive by monotonicity.
    pub gap: BigRational,
}

/// All triples `(a, b, c)` with `a <= b` in element order where the join
/// of `kappa(a)` and `kappa(b)` in the pointwise order differs from
/// `kappa(a v b)`. An empty list means `kappa` is join-compatible here.
pub fn kappa_homomorphism_counterexamples(
    diversity: &DiversityFn,
) -> Result<Vec<KappaGap>, TightSpanError> {
    diversity.require_valid()?;
    let lattice = diversity.lattice();
    let n = lattice.len();
    let mut gaps = Vec::new();
    for a in 0..n {
        for b in a..n {
            let ab = lattice.join(a, b);
            for c in 0..n {
                let joint = diversity.value(lattice.join(ab, c)).clone();
                let left = diversity.value(lattice.join(a, c));
                let right = diversity.value(lattice.join(b, c));
                let separate = left.max(right).clone();
                if joint != separate {
                    let gap = &joint - &separate;
                    gaps.push(KappaGap {
                        a: lattice.element(a).to_string(),
                        b: lattice.element(b).to_string(),
                        witness: lattice.element(c).to_string(),
                        joint,
                        separate,
                        gap,
                    });
                }
            }
        }
    }
    Ok(gaps)
}

/// One failed property from [`check_tl_properties`].
#[derive(Debug, Clone, PartialEq)]
pub struct TlPropertyViolation {
    pub property: &'static str,
    pub detail: String,
}

/// Outcome of the tight-span point property oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct TlPropertyReport {
    pub violations: Vec<TlPropertyViolation>,
}

impl TlPropertyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustively verifies the properties every member of `T_L` satisfies:
/// `f(0) = 0`; `f >= delta`; monotone; the mixed triangle inequality
/// `f(a v c) <= delta(a v b) + f(b v c)` for `b != 0`; subadditivity; and
/// the single-element fixpoint `f(a) = max_b (delta(a v b) - f(b))`.
/// Fails with [`TightSpanError::NotInTl`] when `f` is not a member.
pub fn check_tl_properties(
    system: &ConstraintSystem,
    f: &LatticeFunction,
) -> Result<TlPropertyReport, TightSpanError> {
    match system.in_tl(f)? {
        TlMembership::Member(_) => {}
        TlMembership::NotInPl(i) => {
            return Err(TightSpanError::NotInTl(format!(
                "violates {}",
                system.describe(i)
            )))
        }
        TlMembership::NotMinimal(a) => {
            return Err(TightSpanError::NotInTl(format!(
                "coordinate `{}` can be lowered",
                system.lattice().element(a)
            )))
        }
    }
    let lattice = system.lattice();
    let delta = system.delta();
    let n = lattice.len();
    let name = |a: usize| lattice.element(a);
    let mut violations = Vec::new();

    if !f.value(lattice.bottom()).is_zero() {
        violations.push(TlPropertyViolation {
            property: "zero at bottom",
            detail: format!("f(0) = {}", format_rational(f.value(lattice.bottom()))),
        });
    }

    if let Some(a) = (0..n).find(|&a| f.value(a) < &delta[a]) {
        violations.push(TlPropertyViolation {
            property: "dominates delta",
            detail: format!("f({}) < delta({})", name(a), name(a)),
        });
    }

    'monotone: for a in 0..n {
        for b in 0..n {
            if lattice.leq(a, b) && f.value(a) > f.value(b) {
                violations.push(TlPropertyViolation {
                    property: "monotone",
                    detail: format!("f({}) > f({})", name(a), name(b)),
                });
                break 'monotone;
            }
        }
    }

    'triangle: for a in 0..n {
        for b in 0..n {
            if b == lattice.bottom() {
                continue;
            }
            for c in 0..n {
                let lhs = f.value(lattice.join(a, c));
                let rhs = &delta[lattice.join(a, b)] + f.value(lattice.join(b, c));
                if *lhs > rhs {
                    violations.push(TlPropertyViolation {
                        property: "mixed triangle",
                        detail: format!("triple ({}, {}, {})", name(a), name(b), name(c)),
                    });
                    break 'triangle;
                }
            }
        }
    }

    'subadd: for a in 0..n {
        for b in 0..n {
            let lhs = f.value(lattice.join(a, b));
            let rhs = f.value(a) + f.value(b);
            if *lhs > rhs {
                violations.push(TlPropertyViolation {
                    property: "subadditive",
                    detail: format!("pair ({}, {})", name(a), name(b)),
                });
                break 'subadd;
            }
        }
    }

    for a in 0..n {
        let best = (0..n)
            .map(|b| &delta[lattice.join(a, b)] - f.value(b))
            .max()
            .expect("lattice is nonempty");
        if best != *f.value(a) {
            violations.push(TlPropertyViolation {
                property: "single-element fixpoint",
                detail: format!(
                    "f({}) = {} but max over b gives {}",
                    name(a),
                    format_rational(f.value(a)),
                    format_rational(&best)
                ),
            });
            break;
        }
    }

    Ok(TlPropertyReport { violations })
}

/// One bounded face of `P_L`: its equality set (tight constraints plus
/// zero coordinates) and the vertices it spans.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub dimension: usize,
    /// Indices into the complex vertex list, ascending.
    pub vertices: Vec<usize>,
    /// Indices into the constraint list, ascending.
    pub tight_constraints: Vec<usize>,
    /// Elements whose coordinate is 0 on the whole face, ascending.
    pub zero_coordinates: Vec<usize>,
}

/// The tight span as a polyhedral complex: all vertices of `P_L` (each a
/// member of `T_L`) and the maximal bounded faces, whose union is `T_L`.
#[derive(Debug, Clone)]
pub struct TightSpanComplex {
    pub system: ConstraintSystem,
    pub vertices: Vec<LatticeFunction>,
    pub faces: Vec<Face>,
}

/// Computes `P_L` by exact double description, classifies its faces by
/// boundedness, and returns the union of bounded faces. Self-validation
/// runs as part of the operation: the recession cone must be exactly the
/// coordinate directions, every vertex and every bounded-face sample must
/// lie in `T_L`, and relative-interior samples of unbounded faces must
/// not.
pub fn enumerate_tight_span(
    diversity: &DiversityFn,
    max_elements: usize,
) -> Result<TightSpanComplex, TightSpanError> {
    let system = constraint_system(diversity, max_elements)?;
    let lattice = system.lattice().clone();
    let n = lattice.len();

    let constraint_rows: Vec<Row> = system
        .constraints()
        .iter()
        .map(|c| {
            let mut coeffs = vec![BigRational::zero(); n];
            for &b in &c.support {
                coeffs[b] = BigRational::from_integer(1.into());
            }
            (coeffs, c.rhs.clone())
        })
        .collect();
    let generators = double_description(n, &constraint_rows);

    if generators.rays.len() != n
        || !(0..n).all(|a| {
            generators.rays.iter().any(|r| {
                r.iter().enumerate().all(|(i, x)| {
                    if i == a {
                        *x == BigRational::from_integer(1.into())
                    } else {
                        x.is_zero()
                    }
                })
            })
        })
    {
        return Err(TightSpanError::SelfValidation(
            "recession cone is not the coordinate orthant".into(),
        ));
    }

    // Full row list for incidence: nonnegativity rows first, then the
    // constraints, so tight-row indices split cleanly.
    let mut rows: Vec<Row> = (0..n)
        .map(|a| {
            let mut coeffs = vec![BigRational::zero(); n];
            coeffs[a] = BigRational::from_integer(1.into());
            (coeffs, BigRational::zero())
        })
        .collect();
    rows.extend(constraint_rows.iter().cloned());
    let faces = enumerate_faces(&rows, &generators);

    let as_function = |coords: &[BigRational]| {
        LatticeFunction::new(lattice.clone(), coords.to_vec())
            .expect("polyhedron points are nonnegative")
    };
    for v in &generators.vertices {
        if !system.in_tl(&as_function(v))?.is_member() {
            return Err(TightSpanError::SelfValidation(format!(
                "vertex {} is not minimal",
                as_function(v).tuple_string()
            )));
        }
    }
    for face in &faces {
        let count = BigRational::from_integer((face.vertices.len() as i64).into());
        let mut sample = vec![BigRational::zero(); n];
        for &v in &face.vertices {
            for (i, x) in generators.vertices[v].iter().enumerate() {
                sample[i] += x;
            }
        }
        for x in sample.iter_mut() {
            *x /= &count;
        }
        for &r in &face.rays {
            for (i, x) in generators.rays[r].iter().enumerate() {
                sample[i] += x;
            }
        }
        let member = system.in_tl(&as_function(&sample))?.is_member();
        if member != face.is_bounded() {
            return Err(TightSpanError::SelfValidation(format!(
                "face sample {} disagrees with boundedness",
                as_function(&sample).tuple_string()
            )));
        }
    }

    // Canonical vertex order: lexicographic by coordinates.
    let mut order: Vec<usize> = (0..generators.vertices.len()).collect();
    order.sort_by(|&a, &b| generators.vertices[a].cmp(&generators.vertices[b]));
    let mut new_id = vec![0usize; order.len()];
    for (new, &old) in order.iter().enumerate() {
        new_id[old] = new;
    }
    let vertices: Vec<LatticeFunction> = order
        .iter()
        .map(|&old| as_function(&generators.vertices[old]))
        .collect();

    let bounded: Vec<&crate::polyhedron::FaceData> =
        faces.iter().filter(|f| f.is_bounded()).collect();
    let mut complex_faces = Vec::new();
    for face in &bounded {
        let maximal = !bounded.iter().any(|other| {
            other.vertices.len() > face.vertices.len()
                && face.vertices.iter().all(|v| other.vertices.contains(v))
        });
        if !maximal {
            continue;
        }
        let mut vertex_ids: Vec<usize> = face.vertices.iter().map(|&v| new_id[v]).collect();
        vertex_ids.sort_unstable();
        let tight_constraints: Vec<usize> = face
            .tight_rows
            .iter()
            .filter(|&&r| r >= n)
            .map(|&r| r - n)
            .collect();
        let zero_coordinates: Vec<usize> =
            face.tight_rows.iter().filter(|&&r| r < n).copied().collect();
        complex_faces.push(Face {
            dimension: face.dim,
            vertices: vertex_ids,
            tight_constraints,
            zero_coordinates,
        });
    }
    complex_faces.sort_by(|a, b| a.vertices.cmp(&b.vertices));

    Ok(TightSpanComplex {
        system,
        vertices,
        faces: complex_faces,
    })
}
