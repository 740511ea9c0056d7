//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line. Everything is exact rational arithmetic, so comparisons are
//! equalities, not tolerances; the only numeric bounds are runtimes.

mod common;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num::rational::BigRational;

use latdiv::birkhoff::{representation, verify_extension_theorem, DEFAULT_JIRR_LIMIT};
use latdiv::bruteforce::{in_pl_all_subsets, in_tl_by_minimality};
use latdiv::constructions::{
    cardinality_diversity, divisor_lattice, height_diversity, omega_diversity, omega,
    powerset_lattice, valuation_diversity, Valuation,
};
use latdiv::diversity::{triangle_scan, AxiomViolation, DiversityFn, DEFAULT_TUPLE_LIMIT};
use latdiv::lattice::{FiniteLattice, DEFAULT_ELEMENT_LIMIT};
use latdiv::rational::{rat, ratio};
use latdiv::tightspan::{
    check_tl_properties, constraint_system, enumerate_tight_span, kappa,
    kappa_homomorphism_counterexamples, DEFAULT_CONSTRAINT_ELEMENTS,
    DEFAULT_ENUMERATION_ELEMENTS,
};

fn criterion<F: FnOnce() + std::panic::UnwindSafe>(number: u32, label: &str, body: F) {
    let outcome = std::panic::catch_unwind(body);
    match outcome {
        Ok(()) => println!("criterion {number} ({label}): PASS"),
        Err(payload) => {
            println!("criterion {number} ({label}): FAIL");
            std::panic::resume_unwind(payload);
        }
    }
}

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_latdiv")
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

fn vertex_set(complex: &latdiv::tightspan::TightSpanComplex) -> BTreeSet<Vec<BigRational>> {
    complex
        .vertices
        .iter()
        .map(|v| v.values().to_vec())
        .collect()
}

#[test]
fn criterion_01_m3_tight_span() {
    criterion(1, "M3 tight span", || {
        let started = Instant::now();
        let d = common::m3_alpha1();
        let complex = enumerate_tight_span(&d, DEFAULT_ENUMERATION_ELEMENTS).unwrap();

        let expected: BTreeSet<Vec<BigRational>> = [
            vec![rat(0), rat(0), rat(1), rat(1), rat(1)],
            vec![rat(0), rat(1), rat(0), rat(1), rat(1)],
            vec![rat(0), rat(1), rat(1), rat(0), rat(1)],
            vec![rat(0), ratio(1, 2), ratio(1, 2), ratio(1, 2), rat(1)],
        ]
        .into();
        assert_eq!(vertex_set(&complex), expected, "vertex set");

        assert_eq!(complex.faces.len(), 3, "exactly 3 faces");
        let center = complex
            .vertices
            .iter()
            .position(|v| *v.value(1) == ratio(1, 2))
            .expect("center vertex");
        let mut others: BTreeSet<usize> = BTreeSet::new();
        for face in &complex.faces {
            assert_eq!(face.dimension, 1, "one-dimensional faces");
            assert_eq!(face.vertices.len(), 2);
            assert!(face.vertices.contains(&center), "joins the center");
            others.extend(face.vertices.iter().filter(|&&v| v != center));
        }
        assert_eq!(others.len(), 3, "three distinct corners");

        // The CLI surface agrees, bit for bit.
        let out = Command::new(binary())
            .args(["tightspan", &fixture("m3.json"), "--enumerate"])
            .output()
            .unwrap();
        assert!(out.status.success());
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert!(stdout.contains("vertices (4):"), "{stdout}");
        assert!(stdout.contains("V1 = (0, 1/2, 1/2, 1/2, 1)"), "{stdout}");
        assert!(stdout.contains("faces (3):"), "{stdout}");

        assert!(
            started.elapsed() < Duration::from_secs(1),
            "runtime {:?}",
            started.elapsed()
        );
    });
}

#[test]
fn criterion_02_n5_tight_span() {
    criterion(2, "N5 tight span", || {
        let started = Instant::now();
        let d = common::n5_alpha1_beta2();
        let complex = enumerate_tight_span(&d, DEFAULT_ENUMERATION_ELEMENTS).unwrap();

        let expected: BTreeSet<Vec<BigRational>> = [
            vec![rat(0), rat(0), rat(2), rat(1), rat(2)],
            vec![rat(0), rat(1), rat(1), rat(1), rat(2)],
            vec![rat(0), rat(2), rat(0), rat(2), rat(2)],
        ]
        .into();
        assert_eq!(vertex_set(&complex), expected, "vertex set");
        assert_eq!(complex.faces.len(), 2, "exactly 2 segments");
        for face in &complex.faces {
            assert_eq!(face.dimension, 1);
        }
        // The family (0, x, 2-x, max(1, x), 2) breaks at x = alpha = 1:
        // the breakpoint vertex is shared by both segments.
        let breakpoint = complex
            .vertices
            .iter()
            .position(|v| v.values() == [rat(0), rat(1), rat(1), rat(1), rat(2)])
            .expect("breakpoint vertex");
        assert!(complex.faces[0].vertices.contains(&breakpoint));
        assert!(complex.faces[1].vertices.contains(&breakpoint));
        // All vertices have f_4 = beta.
        for v in &complex.vertices {
            assert_eq!(*v.value(4), rat(2));
        }

        assert!(
            started.elapsed() < Duration::from_secs(1),
            "runtime {:?}",
            started.elapsed()
        );
    });
}

#[test]
fn criterion_03_kappa_tables() {
    criterion(3, "kappa tables", || {
        let m3 = common::m3_alpha1();
        let n5 = common::n5_alpha1_beta2();
        let m3_table: [[i64; 5]; 5] = [
            [0, 0, 0, 0, 1],
            [0, 0, 1, 1, 1],
            [0, 1, 0, 1, 1],
            [0, 1, 1, 0, 1],
            [1, 1, 1, 1, 1],
        ];
        let n5_table: [[i64; 5]; 5] = [
            [0, 0, 0, 1, 2],
            [0, 0, 2, 1, 2],
            [0, 2, 0, 2, 2],
            [1, 1, 2, 1, 2],
            [2, 2, 2, 2, 2],
        ];
        let mut functions_checked = 0;
        for (d, table) in [(&m3, &m3_table), (&n5, &n5_table)] {
            let l = d.lattice().clone();
            let system = constraint_system(d, DEFAULT_CONSTRAINT_ELEMENTS).unwrap();
            for x in 0..l.len() {
                let k = kappa(d, x).unwrap();
                let expected: Vec<BigRational> = table[x].iter().map(|&v| rat(v)).collect();
                assert_eq!(k.values(), &expected[..], "kappa({})", l.element(x));
                functions_checked += 1;
                if x == l.bottom() {
                    assert_eq!(k.values(), d.values(), "kappa(0) = delta");
                } else {
                    assert_eq!(system.in_pl(&k).unwrap(), None, "kappa in P_L");
                }
                if l.atoms().contains(&x) {
                    assert!(system.in_tl(&k).unwrap().is_member(), "kappa in T_L");
                }
            }
        }
        assert_eq!(functions_checked, 10, "both printed tables in full");
    });
}

#[test]
fn criterion_04_kappa_homomorphism_counterexample() {
    criterion(4, "kappa homomorphism counterexample", || {
        let l = Arc::new(powerset_lattice(&["a", "b", "c"], DEFAULT_ELEMENT_LIMIT).unwrap());
        let with_triple = |triple: BigRational| -> DiversityFn {
            let values = l
                .elements()
                .iter()
                .map(|name| {
                    let size = name.matches(',').count() + usize::from(name != "{}");
                    match size {
                        2 => rat(1),
                        3 => triple.clone(),
                        _ => rat(0),
                    }
                })
                .collect();
            DiversityFn::new(l.clone(), values).unwrap()
        };

        let gaps = kappa_homomorphism_counterexamples(&with_triple(ratio(3, 2))).unwrap();
        let hit = gaps
            .iter()
            .find(|g| g.a == "{a}" && g.b == "{b}" && g.witness == "{c}")
            .expect("triple ({a}, {b}, {c}) reported");
        assert_eq!(hit.joint, ratio(3, 2));
        assert_eq!(hit.separate, rat(1));
        assert_eq!(hit.gap, ratio(1, 2), "gap exactly 1/2");

        let gaps = kappa_homomorphism_counterexamples(&with_triple(rat(1))).unwrap();
        assert!(
            !gaps
                .iter()
                .any(|g| g.a == "{a}" && g.b == "{b}" && g.witness == "{c}"),
            "triple absent for the diameter diversity"
        );
    });
}

#[test]
fn criterion_05_monotonicity_counterexample() {
    criterion(5, "monotonicity counterexample", || {
        let l = Arc::new(
            FiniteLattice::from_covers(
                &["0", "a1", "a2", "a3"],
                &[("0", "a1"), ("a1", "a2"), ("a2", "a3")],
            )
            .unwrap(),
        );
        let values = vec![rat(0), rat(0), rat(2), rat(1)];
        let mut d = DiversityFn::new_unchecked(l.clone(), values.clone()).unwrap();
        let report = d.validate().clone();
        assert!(!report.is_valid());
        assert!(
            report.violations.iter().any(|v| matches!(
                v,
                AxiomViolation::Monotonicity { lower, upper, .. }
                    if lower == "a2" && upper == "a3"
            )),
            "monotonicity witness (a2, a3): {report}"
        );
        assert!(
            triangle_scan(&l, &values).is_none(),
            "standalone triangle scan passes"
        );
    });
}

#[test]
fn criterion_06_theorem_oracle_suite() {
    criterion(6, "theorem oracle suite", || {
        let started = Instant::now();
        let mut rng = {
            use rand::SeedableRng;
            rand::rngs::StdRng::seed_from_u64(0xacce97)
        };
        let mut diversities_checked = 0usize;
        for (name, lattice) in common::catalog(8) {
            let suite = common::diversity_suite(&name, &lattice, 20, 0x6a7e);
            for (label, d) in suite {
                diversities_checked += 1;
                assert!(
                    d.check_triangle().unwrap().is_none(),
                    "{label}: triangle"
                );
                assert!(
                    d.check_general_subadditivity(4, DEFAULT_TUPLE_LIMIT)
                        .unwrap()
                        .is_none(),
                    "{label}: general subadditivity (k = 4)"
                );
                d.induced_metric()
                    .unwrap_or_else(|e| panic!("{label}: induced metric: {e}"));
                assert!(
                    d.check_nway_axioms(3, DEFAULT_TUPLE_LIMIT).unwrap().is_none(),
                    "{label}: n-way axioms (n = 3)"
                );
                let system = constraint_system(&d, DEFAULT_CONSTRAINT_ELEMENTS).unwrap();
                let start = common::random_feasible_point(&d, &mut rng);
                let minimized = system.minimize(&start).unwrap();
                let report = check_tl_properties(&system, &minimized).unwrap();
                assert!(report.passed(), "{label}: {:?}", report.violations);
            }
        }
        assert!(
            diversities_checked >= common::catalog(8).len() * 20,
            "only {diversities_checked} diversities"
        );
        assert!(
            started.elapsed() < Duration::from_secs(60),
            "runtime {:?}",
            started.elapsed()
        );
    });
}

#[test]
fn criterion_07_brute_force_equivalence() {
    criterion(7, "brute-force oracle equivalence", || {
        let mut rng = {
            use rand::SeedableRng;
            rand::rngs::StdRng::seed_from_u64(0x0b5e55)
        };
        let mut points_checked = 0usize;
        for (name, lattice) in common::catalog(5) {
            for (label, d) in common::diversity_suite(&name, &lattice, 5, 0x7ab1e) {
                let system = constraint_system(&d, DEFAULT_CONSTRAINT_ELEMENTS).unwrap();
                let mut points = Vec::new();
                for _ in 0..10 {
                    points.push(common::random_point(&lattice, &mut rng, 3));
                }
                for _ in 0..3 {
                    let feasible = common::random_feasible_point(&d, &mut rng);
                    points.push(system.minimize(&feasible).unwrap());
                    points.push(feasible);
                }
                for x in 0..lattice.len() {
                    points.push(kappa(&d, x).unwrap());
                }
                for f in points {
                    points_checked += 1;
                    assert_eq!(
                        system.in_pl(&f).unwrap().is_none(),
                        in_pl_all_subsets(&d, &f).unwrap(),
                        "{label}: P_L disagreement on {}",
                        f.tuple_string()
                    );
                    let reduced = system.in_tl(&f).unwrap().is_member();
                    assert_eq!(
                        reduced,
                        in_tl_by_minimality(&d, &f).unwrap(),
                        "{label}: T_L vs minimality on {}",
                        f.tuple_string()
                    );
                    assert_eq!(
                        reduced,
                        system.characterization_witness(&f).unwrap().is_none(),
                        "{label}: T_L vs characterization on {}",
                        f.tuple_string()
                    );
                }
            }
        }
        assert!(points_checked >= 200, "only {points_checked} points");
    });
}

#[test]
fn criterion_08_birkhoff() {
    criterion(8, "Birkhoff representation and extension", || {
        let started = Instant::now();
        let mut lattices = vec![
            (
                "divisors-12".to_string(),
                Arc::new(divisor_lattice(12, DEFAULT_ELEMENT_LIMIT).unwrap()),
            ),
            (
                "powerset-3".to_string(),
                Arc::new(powerset_lattice(&["1", "2", "3"], DEFAULT_ELEMENT_LIMIT).unwrap()),
            ),
        ];
        for (name, lattice) in common::catalog(8) {
            if lattice.is_distributive() && lattice.join_irreducibles().len() <= 6 {
                lattices.push((name, lattice));
            }
        }
        for (name, lattice) in &lattices {
            // representation() verifies both isomorphism laws, bijectivity
            // and the element count before returning.
            let rep = representation(lattice, DEFAULT_ELEMENT_LIMIT)
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(rep.target().len(), lattice.len(), "{name}: counts");
            for (label, d) in common::diversity_suite(name, lattice, 3, 0xb18c) {
                let report = verify_extension_theorem(&d, DEFAULT_JIRR_LIMIT).unwrap();
                assert!(report.passed(), "{label}: {:?}", report.violations);
            }
        }
        let m3 = common::m3();
        assert!(matches!(
            representation(&m3, DEFAULT_ELEMENT_LIMIT),
            Err(latdiv::birkhoff::BirkhoffError::NotDistributive { .. })
        ));
        assert!(
            started.elapsed() < Duration::from_secs(10),
            "runtime {:?}",
            started.elapsed()
        );
    });
}

#[test]
fn criterion_09_constructions() {
    criterion(9, "construction values", || {
        // Heights equal the prime Omega function on every divisor of 360.
        let d360 = divisor_lattice(360, DEFAULT_ELEMENT_LIMIT).unwrap();
        assert_eq!(d360.len(), 24);
        for i in 0..d360.len() {
            let m: u64 = d360.element(i).parse().unwrap();
            assert_eq!(d360.height(i), omega(m), "height of {m}");
        }

        // Height and cardinality diversities on the power set of a 3-set.
        let p3 = Arc::new(powerset_lattice(&["1", "2", "3"], DEFAULT_ELEMENT_LIMIT).unwrap());
        let dh = height_diversity(&p3).unwrap();
        let dc = cardinality_diversity(&p3).unwrap();
        for i in 0..p3.len() {
            let name = p3.element(i);
            let size = name.matches(',').count() + usize::from(name != "{}");
            let expected_h = if size == 0 { rat(0) } else { rat(size as i64 - 1) };
            let expected_c = if size >= 2 { rat(size as i64) } else { rat(0) };
            assert_eq!(*dh.value(i), expected_h, "height diversity at {name}");
            assert_eq!(*dc.value(i), expected_c, "cardinality diversity at {name}");
        }

        // Omega diversity values on the divisors of 12.
        let d12 = Arc::new(divisor_lattice(12, DEFAULT_ELEMENT_LIMIT).unwrap());
        let omega_d = omega_diversity(&d12).unwrap();
        let expect = [("1", 0), ("2", 0), ("3", 0), ("4", 2), ("6", 2), ("12", 3)];
        for (name, value) in expect {
            assert_eq!(
                *omega_d.value(d12.require(name).unwrap()),
                rat(value),
                "omega diversity at {name}"
            );
        }

        // The zero valuation is rejected as not positive.
        let zero = Valuation {
            values: vec![rat(0); d12.len()],
        };
        assert!(matches!(
            valuation_diversity(&d12, &zero),
            Err(latdiv::constructions::ConstructionError::NotPositive { .. })
        ));
    });
}

#[test]
fn criterion_10_cli_determinism() {
    criterion(10, "CLI determinism", || {
        let names = [
            "m3.json",
            "n5.json",
            "powerset-3.json",
            "divisors-12.json",
            "divisors-360.json",
            "multiset-2x2.json",
            "counterexample-powerset-abc.json",
        ];
        for name in names {
            let file = fixture(name);
            let mut invocations: Vec<Vec<String>> = vec![
                vec!["check".into(), file.clone()],
                vec!["metric".into(), file.clone()],
                vec!["tightspan".into(), file.clone(), "--counterexamples".into()],
            ];
            // Full enumeration only where the default size limit allows.
            if ["m3.json", "n5.json", "powerset-3.json", "divisors-12.json"]
                .contains(&name)
            {
                invocations.push(vec!["tightspan".into(), file.clone(), "--enumerate".into()]);
            }
            for args in invocations {
                let mut outputs = Vec::new();
                for threads in ["1", "4", "16"] {
                    let out = Command::new(binary())
                        .args(&args)
                        .env("RAYON_NUM_THREADS", threads)
                        .output()
                        .unwrap();
                    outputs.push((out.status.code(), out.stdout, out.stderr));
                }
                assert!(
                    outputs.windows(2).all(|w| w[0] == w[1]),
                    "nondeterministic output for {args:?}"
                );
            }
        }
    });
}
