//! Diversity functions on finite lattices.
//!
//! A diversity assigns an exact rational to every lattice element, is zero
//! exactly on the bottom and the atoms, is monotone, and is subadditive on
//! pairs with nonzero meet. Validation checks these axioms exhaustively
//! with exact comparisons; the triangle inequality, general subadditivity
//! and the n-way distance axioms then hold as theorems, and the
//! corresponding checks here act as cross-validation oracles.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::rational::BigRational;
use num::Zero;
use thiserror::Error;

use crate::lattice::{FiniteLattice, LatticeError};
use crate::rational::format_rational;

/// Default cap on the number of tuples scanned by the n-ary oracles.
pub const DEFAULT_TUPLE_LIMIT: u128 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiversityError {
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("no value for element `{0}`")]
    MissingValue(String),
    #[error("negative value {value} at `{element}`")]
    NegativeValue { element: String, value: String },
    #[error("diversity has not been validated; call validate() first")]
    NotValidated,
    #[error("diversity is invalid: {0}")]
    Invalid(ValidationReport),
    #[error("`{0}` is not an atom")]
    NotAnAtom(String),
    #[error("size limit exceeded: scan needs {needed} tuples, limit is {limit}")]
    SizeLimit { needed: u128, limit: u128 },
    #[error("n-way checks need n >= 2, got {0}")]
    BadArity(usize),
    #[error("invariant violated (implementation bug): {0}")]
    BrokenInvariant(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// One violated axiom of Definition 1, with the least witness in element
/// order.
#[derive(Debug, Clone, PartialEq)]
pub enum AxiomViolation {
    /// `value(a) = 0` must hold exactly on the bottom and the atoms.
    ZeroPattern {
        element: String,
        value: BigRational,
        expected_zero: bool,
    },
    /// `a <= b` requires `value(a) <= value(b)`.
    Monotonicity {
        lower: String,
        upper: String,
        lower_value: BigRational,
        upper_value: BigRational,
    },
    /// `meet(a, b) != 0` requires `value(join(a, b)) <= value(a) + value(b)`.
    Subadditivity {
        a: String,
        b: String,
        join: String,
        join_value: BigRational,
        bound: BigRational,
    },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::ZeroPattern {
                element,
                value,
                expected_zero,
            } => {
                if *expected_zero {
                    write!(
                        f,
                        "zero pattern: `{element}` is the bottom or an atom but has value {}",
                        format_rational(value)
                    )
                } else {
                    write!(f, "zero pattern: `{element}` must be positive but is 0")
                }
            }
            AxiomViolation::Monotonicity {
                lower,
                upper,
                lower_value,
                upper_value,
            } => write!(
                f,
                "monotonicity: `{lower}` <= `{upper}` but {} > {}",
                format_rational(lower_value),
                format_rational(upper_value)
            ),
            AxiomViolation::Subadditivity {
                a,
                b,
                join,
                join_value,
                bound,
            } => write!(
                f,
                "subadditivity: value(`{join}`) = {} exceeds value(`{a}`) + value(`{b}`) = {}",
                format_rational(join_value),
                format_rational(bound)
            ),
        }
    }
}

/// Outcome of axiom validation: at most one entry per violated axiom.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<AxiomViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", lines.join("; "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Validity {
    Unchecked,
    Valid,
    Invalid(ValidationReport),
}

/// A candidate diversity function: a lattice plus one exact rational per
/// element, with a tri-state validation status. Invalid functions stay
/// representable so counterexamples can be loaded and reported on, but
/// every derived operation requires the valid state.
#[derive(Debug, Clone)]
pub struct DiversityFn {
    lattice: Arc<FiniteLattice>,
    values: Vec<BigRational>,
    validity: Validity,
}

impl DiversityFn {
    /// Wraps values (indexed by lattice element order) without validating
    /// the diversity axioms. Totality and nonnegativity are still
    /// enforced; they are type invariants, not axioms.
    pub fn new_unchecked(
        lattice: Arc<FiniteLattice>,
        values: Vec<BigRational>,
    ) -> Result<Self, DiversityError> {
        if values.len() != lattice.len() {
            return Err(DiversityError::WrongLength {
                expected: lattice.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| v < &BigRational::zero()) {
            return Err(DiversityError::NegativeValue {
                element: lattice.element(i).to_string(),
                value: format_rational(&values[i]),
            });
        }
        Ok(DiversityFn {
            lattice,
            values,
            validity: Validity::Unchecked,
        })
    }

    /// Builds and validates; fails with the full report when any axiom is
    /// violated.
    pub fn new(
        lattice: Arc<FiniteLattice>,
        values: Vec<BigRational>,
    ) -> Result<Self, DiversityError> {
        let mut d = Self::new_unchecked(lattice, values)?;
        let report = d.validate().clone();
        if report.is_valid() {
            Ok(d)
        } else {
            Err(DiversityError::Invalid(report))
        }
    }

    /// Builds from a name-keyed map; every element must be covered.
    pub fn from_named_values(
        lattice: Arc<FiniteLattice>,
        values: &BTreeMap<String, BigRational>,
    ) -> Result<Self, DiversityError> {
        for key in values.keys() {
            if lattice.index_of(key).is_none() {
                return Err(LatticeError::UnknownElement(key.clone()).into());
            }
        }
        let ordered: Result<Vec<BigRational>, DiversityError> = lattice
            .elements()
            .iter()
            .map(|name| {
                values
                    .get(name)
                    .cloned()
                    .ok_or_else(|| DiversityError::MissingValue(name.clone()))
            })
            .collect();
        Self::new_unchecked(lattice, ordered?)
    }

    /// Checks Definition 1 exhaustively over elements and pairs and caches
    /// the outcome. Reports the least witness per violated axiom.
    pub fn validate(&mut self) -> &ValidationReport {
        if matches!(self.validity, Validity::Unchecked) {
            let report = axiom_report(&self.lattice, &self.values);
            self.validity = if report.is_valid() {
                Validity::Valid
            } else {
                Validity::Invalid(report)
            };
        }
        match &self.validity {
            Validity::Valid => {
                const EMPTY: &ValidationReport = &ValidationReport {
                    violations: Vec::new(),
                };
                EMPTY
            }
            Validity::Invalid(report) => report,
            Validity::Unchecked => unreachable!(),
        }
    }

    pub fn is_valid(&self) -> bool {
        matches!(self.validity, Validity::Valid)
    }

    pub fn validity(&self) -> &Validity {
        &self.validity
    }

    pub fn require_valid(&self) -> Result<(), DiversityError> {
        match &self.validity {
            Validity::Valid => Ok(()),
            Validity::Unchecked => Err(DiversityError::NotValidated),
            Validity::Invalid(report) => Err(DiversityError::Invalid(report.clone())),
        }
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

    /// Value of the join of a set of elements.
    pub fn value_of_join(&self, items: impl IntoIterator<Item = usize>) -> &BigRational {
        &self.values[self.lattice.join_all(items)]
    }

    /// True when `a < b` implies `value(a) < value(b)` for nonbottom `a`, `b`.
    pub fn is_strictly_monotone(&self) -> bool {
        let l = &self.lattice;
        for a in 1..l.len() {
            for b in 1..l.len() {
                if l.lt(a, b) && self.values[a] >= self.values[b] {
                    return false;
                }
            }
        }
        true
    }

    /// Theorem oracle: the triangle inequality
    /// `d(a v c) <= d(a v b) + d(b v c)` for all triples with `b != 0`.
    /// Always `None` for a valid diversity; any witness is a bug.
    pub fn check_triangle(&self) -> Result<Option<TriangleViolation>, DiversityError> {
        self.require_valid()?;
        Ok(triangle_scan(&self.lattice, &self.values))
    }

    /// Theorem oracle: `d(x1 v ... v xs) <= sum d(xi)` for every multiset
    /// of size 2..=k with nonbottom meet.
    pub fn check_general_subadditivity(
        &self,
        k: usize,
        limit: u128,
    ) -> Result<Option<SubadditivityViolation>, DiversityError> {
        self.require_valid()?;
        let l = &self.lattice;
        let candidates: Vec<usize> = (0..l.len()).filter(|&a| a != l.bottom()).collect();
        let mut needed = 0u128;
        for size in 2..=k {
            needed = needed.saturating_add(multiset_count(candidates.len(), size));
        }
        if needed > limit {
            return Err(DiversityError::SizeLimit { needed, limit });
        }
        let mut witness = None;
        for size in 2..=k {
            if witness.is_some() {
                break;
            }
            visit_multisets(&candidates, size, &mut |tuple| {
                let meet = l.meet_all(tuple.iter().copied()).unwrap();
                if meet == l.bottom() {
                    return false;
                }
                let join = l.join_all(tuple.iter().copied());
                let bound = tuple
                    .iter()
                    .fold(BigRational::zero(), |acc, &x| acc + &self.values[x]);
                if self.values[join] > bound {
                    witness = Some(SubadditivityViolation {
                        tuple: tuple.iter().map(|&x| l.element(x).to_string()).collect(),
                        join: l.element(join).to_string(),
                        join_value: self.values[join].clone(),
                        bound,
                    });
                    return true;
                }
                false
            });
        }
        Ok(witness)
    }

    /// The metric `d(a, b) = value(a v b)` on the atoms. All metric-space
    /// invariants are verified before returning.
    pub fn induced_metric(&self) -> Result<FiniteMetric, DiversityError> {
        self.require_valid()?;
        let l = &self.lattice;
        let atoms = l.atoms();
        let m = atoms.len();
        let points: Vec<String> = atoms.iter().map(|&a| l.element(a).to_string()).collect();
        let mut dist = Vec::with_capacity(m * m);
        for &a in atoms {
            for &b in atoms {
                dist.push(self.values[l.join(a, b)].clone());
            }
        }
        FiniteMetric::new(points, dist)
            .map_err(|e| DiversityError::BrokenInvariant(format!("induced metric: {e}")))
    }

    /// The n-way distance `d(a1, ..., an) = value(a1 v ... v an)` on atom
    /// tuples; totally symmetric by construction.
    pub fn nway_distance(&self, tuple: &[usize]) -> Result<BigRational, DiversityError> {
        self.require_valid()?;
        for &x in tuple {
            if !self.lattice.atoms().contains(&x) {
                return Err(DiversityError::NotAnAtom(
                    self.lattice.element(x).to_string(),
                ));
            }
        }
        Ok(self.values[self.lattice.join_all(tuple.iter().copied())].clone())
    }

    /// Theorem oracle: the Deza-Rosenberg n-way distance axioms for
    /// `d(a1, ..., an) = value(a1 v ... v an)` over the atoms, checked
    /// exhaustively up to tuple symmetry.
    pub fn check_nway_axioms(
        &self,
        n: usize,
        limit: u128,
    ) -> Result<Option<NWayViolation>, DiversityError> {
        self.require_valid()?;
        let l = &self.lattice;
        let atoms: Vec<usize> = l.atoms().to_vec();
        let m = atoms.len();
        if n < 2 {
            return Err(DiversityError::BadArity(n));
        }
        let needed = multiset_count(m, n + 1)
            .saturating_add((m as u128 * m as u128).saturating_mul(multiset_count(m, n - 2)));
        if needed > limit {
            return Err(DiversityError::SizeLimit { needed, limit });
        }
        let names = |tuple: &[usize]| -> Vec<String> {
            tuple.iter().map(|&x| l.element(x).to_string()).collect()
        };

        // Axiom 1: d(x, ..., x) = 0.
        for &x in &atoms {
            if !self.values[x].is_zero() {
                return Ok(Some(NWayViolation::Identity {
                    atom: l.element(x).to_string(),
                }));
            }
        }

        // Axiom 2 (simplex inequality): for points x1..x_{n+1}, the value
        // on any n of them is at most the sum over the other n faces.
        let mut witness = None;
        visit_multisets(&atoms, n + 1, &mut |tuple| {
            let mut face = BTreeMap::new();
            for &u in tuple {
                face.entry(u).or_insert_with(|| {
                    let rest: Vec<usize> = remove_one(tuple, u);
                    self.values[l.join_all(rest)].clone()
                });
            }
            let total: BigRational = tuple
                .iter()
                .fold(BigRational::zero(), |acc, &u| acc + &face[&u]);
            for &u in tuple {
                let lhs = &face[&u];
                let rhs = &total - lhs;
                if *lhs > rhs {
                    witness = Some(NWayViolation::Simplex {
                        tuple: names(tuple),
                        omitted: l.element(u).to_string(),
                    });
                    return true;
                }
            }
            false
        });
        if witness.is_some() {
            return Ok(witness);
        }

        // Axiom 3: repeating x1 in place of x2 equals repeating x3, and
        // both are bounded by the original tuple.
        let mut witness = None;
        visit_multisets(&atoms, n.saturating_sub(2), &mut |rest| {
            let join_rest = l.join_all(rest.iter().copied());
            for &x1 in &atoms {
                for &x2 in &atoms {
                    let with_x1 = self.values[l.join(x1, join_rest)].clone();
                    let original = self.values[l.join(l.join(x1, x2), join_rest)].clone();
                    if let Some(&x3) = rest.first() {
                        let with_x3 =
                            self.values[l.join(l.join(x1, x3), join_rest)].clone();
                        if with_x1 != with_x3 {
                            let mut tuple = vec![x1, x2];
                            tuple.extend_from_slice(rest);
                            witness = Some(NWayViolation::Repetition { tuple: names(&tuple) });
                            return true;
                        }
                    }
                    if with_x1 > original {
                        let mut tuple = vec![x1, x2];
                        tuple.extend_from_slice(rest);
                        witness = Some(NWayViolation::Repetition { tuple: names(&tuple) });
                        return true;
                    }
                }
            }
            false
        });
        Ok(witness)
    }
}

/// Computes the Definition 1 report for raw values.
fn axiom_report(lattice: &FiniteLattice, values: &[BigRational]) -> ValidationReport {
    let n = lattice.len();
    let mut violations = Vec::new();

    for a in 0..n {
        let expected_zero = a == lattice.bottom() || lattice.atoms().contains(&a);
        if values[a].is_zero() != expected_zero {
            violations.push(AxiomViolation::ZeroPattern {
                element: lattice.element(a).to_string(),
                value: values[a].clone(),
                expected_zero,
            });
            break;
        }
    }

    'monotone: for a in 0..n {
        for b in 0..n {
            if lattice.lt(a, b) && values[a] > values[b] {
                violations.push(AxiomViolation::Monotonicity {
                    lower: lattice.element(a).to_string(),
                    upper: lattice.element(b).to_string(),
                    lower_value: values[a].clone(),
                    upper_value: values[b].clone(),
                });
                break 'monotone;
            }
        }
    }

    'subadd: for a in 0..n {
        for b in a..n {
            if lattice.meet(a, b) == lattice.bottom() {
                continue;
            }
            let join = lattice.join(a, b);
            let bound = &values[a] + &values[b];
            if values[join] > bound {
                violations.push(AxiomViolation::Subadditivity {
                    a: lattice.element(a).to_string(),
                    b: lattice.element(b).to_string(),
                    join: lattice.element(join).to_string(),
                    join_value: values[join].clone(),
                    bound,
                });
                break 'subadd;
            }
        }
    }

    ValidationReport { violations }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleViolation {
    pub a: String,
    pub b: String,
    pub c: String,
    pub lhs: BigRational,
    pub rhs: BigRational,
}

/// Standalone triangle-inequality scan over raw values; usable on
/// functions that fail validation. Returns the least violating triple.
pub fn triangle_scan(lattice: &FiniteLattice, values: &[BigRational]) -> Option<TriangleViolation> {
    let n = lattice.len();
    for a in 0..n {
        for b in 0..n {
            if b == lattice.bottom() {
                continue;
            }
            for c in 0..n {
                let lhs = &values[lattice.join(a, c)];
                let rhs = &values[lattice.join(a, b)] + &values[lattice.join(b, c)];
                if *lhs > rhs {
                    return Some(TriangleViolation {
                        a: lattice.element(a).to_string(),
                        b: lattice.element(b).to_string(),
                        c: lattice.element(c).to_string(),
                        lhs: lhs.clone(),
                        rhs,
                    });
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubadditivityViolation {
    pub tuple: Vec<String>,
    pub join: String,
    pub join_value: BigRational,
    pub bound: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NWayViolation {
    Identity { atom: String },
    Simplex { tuple: Vec<String>, omitted: String },
    Repetition { tuple: Vec<String> },
}

/// `tuple` minus one occurrence of `u`.
fn remove_one(tuple: &[usize], u: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(tuple.len() - 1);
    let mut removed = false;
    for &x in tuple {
        if !removed && x == u {
            removed = true;
        } else {
            out.push(x);
        }
    }
    out
}

/// Number of multisets of the given size over `m` values.
fn multiset_count(m: usize, size: usize) -> u128 {
    if size == 0 {
        return 1;
    }
    if m == 0 {
        return 0;
    }
    let mut result = 1u128;
    for i in 0..size {
        result = result.saturating_mul((m + i) as u128);
        result /= (i + 1) as u128;
    }
    result
}

/// Visits all nondecreasing `size`-tuples over `values` in lexicographic
/// order. The callback returns `true` to stop early.
fn visit_multisets(values: &[usize], size: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        values: &[usize],
        size: usize,
        start: usize,
        current: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if current.len() == size {
            return f(current);
        }
        for i in start..values.len() {
            current.push(values[i]);
            if rec(values, size, i, current, f) {
                return true;
            }
            current.pop();
        }
        false
    }
    rec(values, size, 0, &mut Vec::with_capacity(size), f)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),
    #[error("distance table has wrong shape")]
    WrongShape,
    #[error("negative distance between `{a}` and `{b}`")]
    Negative { a: String, b: String },
    #[error("asymmetric distance between `{a}` and `{b}`")]
    Asymmetric { a: String, b: String },
    #[error("nonzero distance from `{0}` to itself")]
    NonzeroDiagonal(String),
    #[error("distinct points `{a}` and `{b}` at distance 0")]
    ZeroDistance { a: String, b: String },
    #[error("triangle inequality fails on (`{a}`, `{b}`, `{c}`)")]
    Triangle { a: String, b: String, c: String },
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("missing distance for pair (`{a}`, `{b}`)")]
    MissingPair { a: String, b: String },
}

/// A finite metric space with exact rational distances. All axioms are
/// verified at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetric {
    points: Vec<String>,
    index: BTreeMap<String, usize>,
    dist: Vec<BigRational>,
}

impl FiniteMetric {
    /// Builds from a dense row-major distance table and verifies symmetry,
    /// the zero diagonal, positivity off the diagonal, and all triangles.
    pub fn new(points: Vec<String>, dist: Vec<BigRational>) -> Result<Self, MetricError> {
        let n = points.len();
        let mut index = BTreeMap::new();
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(MetricError::DuplicatePoint(p.clone()));
            }
        }
        if dist.len() != n * n {
            return Err(MetricError::WrongShape);
        }
        for i in 0..n {
            if !dist[i * n + i].is_zero() {
                return Err(MetricError::NonzeroDiagonal(points[i].clone()));
            }
            for j in 0..n {
                if dist[i * n + j] < BigRational::zero() {
                    return Err(MetricError::Negative {
                        a: points[i].clone(),
                        b: points[j].clone(),
                    });
                }
                if dist[i * n + j] != dist[j * n + i] {
                    return Err(MetricError::Asymmetric {
                        a: points[i].clone(),
                        b: points[j].clone(),
                    });
                }
                if i != j && dist[i * n + j].is_zero() {
                    return Err(MetricError::ZeroDistance {
                        a: points[i].clone(),
                        b: points[j].clone(),
                    });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let direct = &dist[a * n + b];
                    let detour = &dist[a * n + c] + &dist[c * n + b];
                    if *direct > detour {
                        return Err(MetricError::Triangle {
                            a: points[a].clone(),
                            b: points[b].clone(),
                            c: points[c].clone(),
                        });
                    }
                }
            }
        }
        Ok(FiniteMetric {
            points,
            index,
            dist,
        })
    }

    /// Builds from unordered pairwise distances; each unordered pair must
    /// appear exactly once.
    pub fn from_pairs(
        points: Vec<String>,
        pairs: &[(String, String, BigRational)],
    ) -> Result<Self, MetricError> {
        let n = points.len();
        let index: BTreeMap<&str, usize> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), i))
            .collect();
        let mut dist = vec![None; n * n];
        for i in 0..n {
            dist[i * n + i] = Some(BigRational::zero());
        }
        for (a, b, value) in pairs {
            let i = *index
                .get(a.as_str())
                .ok_or_else(|| MetricError::UnknownPoint(a.clone()))?;
            let j = *index
                .get(b.as_str())
                .ok_or_else(|| MetricError::UnknownPoint(b.clone()))?;
            dist[i * n + j] = Some(value.clone());
            dist[j * n + i] = Some(value.clone());
        }
        let mut table = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                match &dist[i * n + j] {
                    Some(v) => table.push(v.clone()),
                    None => {
                        return Err(MetricError::MissingPair {
                            a: points[i].clone(),
                            b: points[j].clone(),
                        })
                    }
                }
            }
        }
        Self::new(points, table)
    }

    /// The unit metric: all distinct points at distance 1.
    pub fn unit(points: Vec<String>) -> Result<Self, MetricError> {
        let n = points.len();
        let one = BigRational::from_integer(1.into());
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                dist.push(if i == j {
                    BigRational::zero()
                } else {
                    one.clone()
                });
            }
        }
        Self::new(points, dist)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn index_of(&self, point: &str) -> Option<usize> {
        self.index.get(point).copied()
    }

    pub fn distance(&self, i: usize, j: usize) -> &BigRational {
        &self.dist[i * self.points.len() + j]
    }
}
