//! Shared test support: a catalog of small lattices and diversity suites.

#![allow(dead_code)]

use std::sync::Arc;

use num::rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use latdiv::constructions::{
    cardinality_diversity, divisor_lattice, height_diversity, multiset_lattice, omega_diversity,
    powerset_lattice, random_diversity, trivial_diversity,
};
use latdiv::diversity::DiversityFn;
use latdiv::lattice::{FiniteLattice, DEFAULT_ELEMENT_LIMIT};
use latdiv::rational::rat;
use latdiv::tightspan::LatticeFunction;

pub fn m3() -> Arc<FiniteLattice> {
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

pub fn n5() -> Arc<FiniteLattice> {
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

pub fn chain(len: usize) -> Arc<FiniteLattice> {
    let names: Vec<String> = (0..len).map(|i| format!("c{i}")).collect();
    let covers: Vec<(String, String)> = (1..len)
        .map(|i| (names[i - 1].clone(), names[i].clone()))
        .collect();
    Arc::new(FiniteLattice::from_covers(&names, &covers).unwrap())
}

pub fn m3_alpha1() -> DiversityFn {
    DiversityFn::new(m3(), vec![rat(0), rat(0), rat(0), rat(0), rat(1)]).unwrap()
}

pub fn n5_alpha1_beta2() -> DiversityFn {
    DiversityFn::new(n5(), vec![rat(0), rat(0), rat(0), rat(1), rat(2)]).unwrap()
}

/// Every catalog lattice with at most `max_elements` elements.
pub fn catalog(max_elements: usize) -> Vec<(String, Arc<FiniteLattice>)> {
    let mut out: Vec<(String, Arc<FiniteLattice>)> = vec![
        ("single".into(), chain(1)),
        ("chain-2".into(), chain(2)),
        ("chain-4".into(), chain(4)),
        ("m3".into(), m3()),
        ("n5".into(), n5()),
        (
            "boolean-2".into(),
            Arc::new(powerset_lattice(&["1", "2"], DEFAULT_ELEMENT_LIMIT).unwrap()),
        ),
        (
            "boolean-3".into(),
            Arc::new(powerset_lattice(&["1", "2", "3"], DEFAULT_ELEMENT_LIMIT).unwrap()),
        ),
        (
            "divisors-8".into(),
            Arc::new(divisor_lattice(8, DEFAULT_ELEMENT_LIMIT).unwrap()),
        ),
        (
            "divisors-12".into(),
            Arc::new(divisor_lattice(12, DEFAULT_ELEMENT_LIMIT).unwrap()),
        ),
        (
            "divisors-30".into(),
            Arc::new(divisor_lattice(30, DEFAULT_ELEMENT_LIMIT).unwrap()),
        ),
        (
            "multiset-1x2".into(),
            multiset_lattice(&[("x".into(), 1), ("y".into(), 2)], DEFAULT_ELEMENT_LIMIT)
                .unwrap()
                .lattice
                .clone(),
        ),
    ];
    out.retain(|(_, l)| l.len() <= max_elements);
    out
}

/// The shipped constructions that apply to a lattice, plus `randomized`
/// seeded random diversities. Everything returned is valid.
pub fn diversity_suite(
    name: &str,
    lattice: &Arc<FiniteLattice>,
    randomized: usize,
    seed: u64,
) -> Vec<(String, DiversityFn)> {
    let mut out = vec![(format!("{name}/trivial"), trivial_diversity(lattice))];
    if lattice.is_modular() {
        out.push((
            format!("{name}/height"),
            height_diversity(lattice).unwrap(),
        ));
        out.push((
            format!("{name}/cardinality"),
            cardinality_diversity(lattice).unwrap(),
        ));
    }
    if lattice.elements().iter().all(|e| e.parse::<u64>().is_ok()) {
        if let Ok(d) = omega_diversity(lattice) {
            out.push((format!("{name}/omega"), d));
        }
    }
    if name == "m3" {
        out.push((format!("{name}/alpha-1"), m3_alpha1()));
    }
    if name == "n5" {
        out.push((format!("{name}/alpha-1-beta-2"), n5_alpha1_beta2()));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    for i in 0..randomized {
        out.push((
            format!("{name}/random-{i}"),
            random_diversity(lattice, &mut rng),
        ));
    }
    out
}

/// A random nonnegative rational with the given denominator bound.
pub fn random_rational(rng: &mut impl Rng, max_numer: i64, max_denom: i64) -> BigRational {
    BigRational::new(
        rng.gen_range(0..=max_numer).into(),
        rng.gen_range(1..=max_denom).into(),
    )
}

/// A random point of the ambient box, not necessarily feasible.
pub fn random_point(
    lattice: &Arc<FiniteLattice>,
    rng: &mut impl Rng,
    max_numer: i64,
) -> LatticeFunction {
    let values = (0..lattice.len())
        .map(|_| random_rational(rng, max_numer, 8))
        .collect();
    LatticeFunction::new(lattice.clone(), values).unwrap()
}

/// A random feasible point: the maximum diversity value everywhere plus
/// nonnegative jitter. Any constraint sums at least one coordinate, so
/// the maximum value alone already satisfies it.
pub fn random_feasible_point(
    diversity: &DiversityFn,
    rng: &mut impl Rng,
) -> LatticeFunction {
    let lattice = diversity.lattice();
    let ceiling = diversity
        .values()
        .iter()
        .max()
        .cloned()
        .unwrap_or_else(|| rat(0));
    let values = (0..lattice.len())
        .map(|_| &ceiling + random_rational(rng, 3, 8))
        .collect();
    LatticeFunction::new(lattice.clone(), values).unwrap()
}
