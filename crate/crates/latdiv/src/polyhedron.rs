//! Exact polyhedral computation over the nonnegative orthant.
//!
//! Double description on the homogenization cone converts
//! `{x >= 0 : A x >= b}` into vertices plus extreme rays; faces are then
//! read off the facet/generator incidence. Arithmetic is exact big
//! rationals throughout and every result sequence is canonically sorted,
//! so outputs are reproducible bit for bit.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

use crate::bits::BitSet;

/// An inequality `coeffs . x >= rhs`.
pub(crate) type Row = (Vec<BigRational>, BigRational);

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Generators {
    pub vertices: Vec<Vec<BigRational>>,
    pub rays: Vec<Vec<BigRational>>,
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// Scales a nonzero rational vector to primitive integer form.
fn normalize(v: &mut [BigRational]) {
    let mut denom_lcm = BigInt::one();
    for x in v.iter() {
        denom_lcm = denom_lcm.lcm(x.denom());
    }
    let scale = BigRational::from_integer(denom_lcm);
    let mut numer_gcd = BigInt::zero();
    for x in v.iter_mut() {
        *x *= &scale;
        numer_gcd = numer_gcd.gcd(x.numer());
    }
    debug_assert!(!numer_gcd.is_zero(), "cannot normalize the zero vector");
    let shrink = BigRational::from_integer(numer_gcd);
    for x in v.iter_mut() {
        *x /= &shrink;
    }
}

/// Vertices and extreme rays of the pointed polyhedron
/// `{x >= 0 : row . x >= rhs for all rows}`. Nonnegativity is implicit
/// here; callers list it explicitly only for face incidence.
pub(crate) fn double_description(cols: usize, rows: &[Row]) -> Generators {
    let dim = cols + 1;
    // Start from the orthant cone of the homogenized space; its rows are
    // the identity, its extreme rays the standard basis. The last
    // coordinate is the homogenization variable.
    let mut processed: Vec<Vec<BigRational>> = (0..dim)
        .map(|i| {
            let mut row = vec![BigRational::zero(); dim];
            row[i] = BigRational::one();
            row
        })
        .collect();
    let mut rays: Vec<Vec<BigRational>> = processed.clone();

    for (coeffs, rhs) in rows {
        let mut hom = coeffs.clone();
        hom.push(-rhs.clone());

        let zero_sets: Vec<BitSet> = rays
            .iter()
            .map(|r| {
                let mut z = BitSet::new(processed.len());
                for (i, p) in processed.iter().enumerate() {
                    if dot(p, r).is_zero() {
                        z.insert(i);
                    }
                }
                z
            })
            .collect();
        let values: Vec<BigRational> = rays.iter().map(|r| dot(&hom, r)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();

        if !minus.is_empty() {
            let mut next: Vec<Vec<BigRational>> = (0..rays.len())
                .filter(|i| !values[*i].is_negative())
                .map(|i| rays[i].clone())
                .collect();
            for &u in &plus {
                for &v in &minus {
                    let common = zero_sets[u].intersect(&zero_sets[v]);
                    let blocked = (0..rays.len())
                        .any(|w| w != u && w != v && common.is_subset(&zero_sets[w]));
                    if blocked {
                        continue;
                    }
                    let mut combo: Vec<BigRational> = rays[u]
                        .iter()
                        .zip(&rays[v])
                        .map(|(ru, rv)| &values[u] * rv - &values[v] * ru)
                        .collect();
                    normalize(&mut combo);
                    next.push(combo);
                }
            }
            rays = next;
        }
        processed.push(hom);
    }

    let mut vertices = Vec::new();
    let mut recession = Vec::new();
    for r in rays {
        let t = &r[cols];
        debug_assert!(!t.is_negative(), "homogenization stays nonnegative");
        if t.is_zero() {
            let mut v: Vec<BigRational> = r[..cols].to_vec();
            normalize(&mut v);
            recession.push(v);
        } else {
            let v: Vec<BigRational> = r[..cols].iter().map(|x| x / t).collect();
            vertices.push(v);
        }
    }
    vertices.sort();
    vertices.dedup();
    recession.sort();
    recession.dedup();
    Generators {
        vertices,
        rays: recession,
    }
}

/// A face of the polyhedron, identified by the generators it contains and
/// the rows tight on all of it.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct FaceData {
    /// Indices into the vertex list.
    pub vertices: Vec<usize>,
    /// Indices into the ray list.
    pub rays: Vec<usize>,
    /// Indices into the row list (rows tight on the whole face).
    pub tight_rows: Vec<usize>,
    pub dim: usize,
}

impl FaceData {
    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }
}

/// Rank over the rationals, by Gaussian elimination.
fn rank(mut m: Vec<Vec<BigRational>>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let width = m[0].len();
    let mut r = 0;
    for col in 0..width {
        let Some(pivot) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        for i in r + 1..m.len() {
            if m[i][col].is_zero() {
                continue;
            }
            let factor = &m[i][col] / &m[r][col];
            for c in col..width {
                let delta = &factor * &m[r][c];
                m[i][c] -= delta;
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Enumerates all nonempty faces of `{x : row . x >= rhs}` from its
/// generators: the face lattice is the closure of facet incidence sets
/// under intersection. Every nonempty face of a pointed polyhedron
/// contains a vertex, so generator sets without one are discarded.
pub(crate) fn enumerate_faces(
    rows: &[Row],
    generators: &Generators,
) -> Vec<FaceData> {
    let nv = generators.vertices.len();
    let nr = generators.rays.len();
    let gens = nv + nr;

    let tight_of_gen: Vec<BitSet> = (0..gens)
        .map(|g| {
            let mut t = BitSet::new(rows.len());
            for (i, (coeffs, rhs)) in rows.iter().enumerate() {
                let tight = if g < nv {
                    dot(coeffs, &generators.vertices[g]) == *rhs
                } else {
                    dot(coeffs, &generators.rays[g - nv]).is_zero()
                };
                if tight {
                    t.insert(i);
                }
            }
            t
        })
        .collect();

    let mut sets: BTreeSet<BitSet> = BTreeSet::new();
    let mut full = BitSet::new(gens);
    for g in 0..gens {
        full.insert(g);
    }
    sets.insert(full);
    for i in 0..rows.len() {
        let mut incident = BitSet::new(gens);
        for g in 0..gens {
            if tight_of_gen[g].contains(i) {
                incident.insert(g);
            }
        }
        sets.insert(incident);
    }
    loop {
        let snapshot: Vec<BitSet> = sets.iter().cloned().collect();
        let before = sets.len();
        for (i, a) in snapshot.iter().enumerate() {
            for b in &snapshot[i + 1..] {
                sets.insert(a.intersect(b));
            }
        }
        if sets.len() == before {
            break;
        }
    }

    let mut faces = Vec::new();
    for set in sets {
        let vertices: Vec<usize> = set.iter().filter(|&g| g < nv).collect();
        if vertices.is_empty() {
            continue;
        }
        let rays: Vec<usize> = set.iter().filter(|&g| g >= nv).map(|g| g - nv).collect();
        let mut tight = BitSet::new(rows.len());
        for i in 0..rows.len() {
            tight.insert(i);
        }
        for g in set.iter() {
            tight = tight.intersect(&tight_of_gen[g]);
        }
        let base = &generators.vertices[vertices[0]];
        let mut span: Vec<Vec<BigRational>> = vertices[1..]
            .iter()
            .map(|&v| {
                generators.vertices[v]
                    .iter()
                    .zip(base)
                    .map(|(x, y)| x - y)
                    .collect()
            })
            .collect();
        for &r in &rays {
            span.push(generators.rays[r].clone());
        }
        let dim = rank(span);
        faces.push(FaceData {
            vertices,
            rays,
            tight_rows: tight.iter().collect(),
            dim,
        });
    }
    faces.sort_by(|a, b| (&a.vertices, &a.rays).cmp(&(&b.vertices, &b.rays)));
    faces
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn row(coeffs: &[i64], rhs: i64) -> Row {
        (coeffs.iter().map(|&c| rat(c)).collect(), rat(rhs))
    }

    #[test]
    fn unit_box() {
        // {x >= 0, -x >= -1} in two variables: the unit square.
        let rows = vec![row(&[-1, 0], -1), row(&[0, -1], -1)];
        let g = double_description(2, &rows);
        assert!(g.rays.is_empty());
        assert_eq!(
            g.vertices,
            vec![
                vec![rat(0), rat(0)],
                vec![rat(0), rat(1)],
                vec![rat(1), rat(0)],
                vec![rat(1), rat(1)],
            ]
        );
    }

    #[test]
    fn halfplane_above_diagonal() {
        // {x, y >= 0, x + y >= 1}: two vertices, the two axis rays.
        let rows = vec![row(&[1, 1], 1)];
        let g = double_description(2, &rows);
        assert_eq!(
            g.vertices,
            vec![vec![rat(0), rat(1)], vec![rat(1), rat(0)]]
        );
        assert_eq!(g.rays, vec![vec![rat(0), rat(1)], vec![rat(1), rat(0)]]);
    }

    #[test]
    fn faces_of_diagonal_halfplane() {
        let dd_rows = vec![row(&[1, 1], 1)];
        let g = double_description(2, &dd_rows);
        // Full rows for incidence: nonnegativity plus the constraint.
        let rows = vec![row(&[1, 0], 0), row(&[0, 1], 0), row(&[1, 1], 1)];
        let faces = enumerate_faces(&rows, &g);
        let bounded: Vec<&FaceData> = faces.iter().filter(|f| f.is_bounded()).collect();
        // The diagonal segment and its two endpoints.
        assert_eq!(bounded.len(), 3);
        let segment = bounded.iter().find(|f| f.dim == 1).unwrap();
        assert_eq!(segment.vertices, vec![0, 1]);
        assert_eq!(segment.tight_rows, vec![2]);
        let whole = faces.iter().find(|f| f.vertices.len() == 2 && f.rays.len() == 2);
        assert_eq!(whole.unwrap().dim, 2);
    }

    #[test]
    fn single_ray_no_constraints() {
        let g = double_description(1, &[]);
        assert_eq!(g.vertices, vec![vec![rat(0)]]);
        assert_eq!(g.rays, vec![vec![rat(1)]]);
    }

    #[test]
    fn rank_computation() {
        assert_eq!(rank(vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]]), 2);
        assert_eq!(rank(vec![vec![rat(1), rat(2)], vec![rat(2), rat(4)]]), 1);
        assert_eq!(rank(vec![]), 0);
        assert_eq!(rank(vec![vec![rat(0), rat(0)]]), 0);
    }
}
