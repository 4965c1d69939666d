//! Betti numbers over the two-element field.
//!
//! For a complex with face counts `f_i`, the Betti number in dimension `k`
//! is `f_k - rank(boundary_k) - rank(boundary_{k+1})`, with `boundary_0 = 0`.
//! Ranks are computed by sparse column elimination: each column stores the
//! sorted row indices of its nonzero entries, and columns sharing a lowest
//! row are combined by symmetric difference until each surviving column owns
//! a distinct pivot row.
//!
//! [`betti`] reduces the boundary matrices from the top dimension down and
//! applies clearing: a pivot row of `boundary_{d+1}` indexes a `d`-face whose
//! column in `boundary_d` is a combination of earlier columns (because the
//! composite boundary vanishes), so that column is skipped outright.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::complex::SimplicialComplex;
use crate::{precondition, Result};

/// Sorted symmetric difference of `col` and `other` into `scratch`, then
/// swapped back into `col`.
fn xor_into(col: &mut Vec<u32>, other: &[u32], scratch: &mut Vec<u32>) {
    scratch.clear();
    let mut i = 0;
    let mut j = 0;
    while i < col.len() && j < other.len() {
        match col[i].cmp(&other[j]) {
            core::cmp::Ordering::Less => {
                scratch.push(col[i]);
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                scratch.push(other[j]);
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&col[i..]);
    scratch.extend_from_slice(&other[j..]);
    core::mem::swap(col, scratch);
}

/// Column-eliminates the matrix given as sorted row-index columns. Returns
/// the rank and, via `pivots`, the set of pivot row indices.
fn reduce(columns: impl Iterator<Item = Vec<u32>>, pivots: &mut Vec<u32>) -> usize {
    let mut owner: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    let mut scratch: Vec<u32> = Vec::new();
    for mut col in columns {
        while let Some(&low) = col.last() {
            match owner.get(&low) {
                None => {
                    owner.insert(low, col);
                    break;
                }
                Some(other) => {
                    // Split the borrow: read `other`, write `col`.
                    let other = other.clone();
                    xor_into(&mut col, &other, &mut scratch);
                }
            }
        }
    }
    pivots.extend(owner.keys().copied());
    owner.len()
}

/// Boundary matrix column for one `dim`-face: positions of its facets in the
/// `(dim-1)`-face list. Positions are ascending because facet tuples of a
/// sorted tuple, ordered by dropped index descending, are lexicographically
/// ascending.
fn boundary_column(complex: &SimplicialComplex, dim: usize, face: &[u32]) -> Vec<u32> {
    let below = complex.faces(dim - 1);
    let mut col = Vec::with_capacity(face.len());
    let mut facet = Vec::with_capacity(face.len() - 1);
    for skip in (0..face.len()).rev() {
        facet.clear();
        facet.extend(face.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
        let pos = below.position(&facet).expect("downward closure") as u32;
        col.push(pos);
    }
    debug_assert!(col.windows(2).all(|w| w[0] < w[1]));
    col
}

/// Rank of the boundary map from `dim`-chains to `(dim-1)`-chains over the
/// two-element field. `boundary_0` has rank 0 by convention.
pub fn boundary_rank(complex: &SimplicialComplex, dim: usize) -> usize {
    assert!(dim <= complex.k_max(), "dimension {dim} above k_max {}", complex.k_max());
    if dim == 0 {
        return 0;
    }
    let mut pivots = Vec::new();
    reduce(
        complex.faces(dim).iter().map(|f| boundary_column(complex, dim, f)),
        &mut pivots,
    )
}

/// Betti numbers in dimensions `0..=up_to`. Requires `up_to + 1 <= k_max`,
/// because the rank of `boundary_{up_to+1}` needs the stored faces one
/// dimension higher than the last requested Betti number.
pub fn betti(complex: &SimplicialComplex, up_to: usize) -> Result<Vec<u64>> {
    precondition(up_to < complex.k_max(), || {
        format!(
            "betti up to dimension {up_to} needs faces of dimension {}, but k_max is {}",
            up_to + 1,
            complex.k_max()
        )
    })?;
    let counts = complex.face_counts();
    // Reduce from the top down so pivot rows of one level clear columns of
    // the next.
    let mut ranks = vec![0usize; up_to + 2];
    let mut cleared: Vec<u32> = Vec::new();
    for dim in (1..=up_to + 1).rev() {
        let skip: alloc::collections::BTreeSet<u32> = cleared.iter().copied().collect();
        let mut pivots = Vec::new();
        let fs = complex.faces(dim);
        ranks[dim] = reduce(
            fs.iter()
                .enumerate()
                .filter(|&(idx, _)| !skip.contains(&(idx as u32)))
                .map(|(_, f)| boundary_column(complex, dim, f)),
            &mut pivots,
        );
        cleared = pivots;
    }
    let mut out = Vec::with_capacity(up_to + 1);
    for k in 0..=up_to {
        let b = counts[k] as i64 - ranks[k] as i64 - ranks[k + 1] as i64;
        debug_assert!(b >= 0, "negative betti {b} in dimension {k}");
        out.push(b as u64);
    }
    Ok(out)
}

/// Alternating sum of stored face counts. For a complex whose top stored
/// dimension is empty this is the Euler characteristic; for a truncation it
/// is the truncated sum.
pub fn euler_characteristic(complex: &SimplicialComplex) -> i64 {
    complex
        .face_counts()
        .iter()
        .enumerate()
        .map(|(i, &f)| if i % 2 == 0 { f as i64 } else { -(f as i64) })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_rips, thin, ProbabilityVector, SimplicialComplex};
    use crate::geometry::{build_graph_all_pairs, sample_binomial, Domain, DomainKind};

    /// Dense row-echelon rank over the two-element field, as an oracle.
    fn dense_rank(rows: usize, cols: &[Vec<u32>]) -> usize {
        let mut m: Vec<Vec<bool>> = cols
            .iter()
            .map(|c| {
                let mut v = vec![false; rows];
                for &r in c {
                    v[r as usize] = true;
                }
                v
            })
            .collect();
        let mut rank = 0;
        for r in 0..rows {
            if let Some(p) = (rank..m.len()).find(|&j| m[j][r]) {
                m.swap(rank, p);
                let pivot = m[rank].clone();
                for (j, col) in m.iter_mut().enumerate() {
                    if j != rank && col[r] {
                        for (a, b) in col.iter_mut().zip(&pivot) {
                            *a ^= *b;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    fn oracle_betti(c: &SimplicialComplex, up_to: usize) -> Vec<i64> {
        let counts = c.face_counts();
        let mut ranks = vec![0usize; up_to + 2];
        for dim in 1..=up_to + 1 {
            let cols: Vec<Vec<u32>> =
                c.faces(dim).iter().map(|f| boundary_column(c, dim, f)).collect();
            ranks[dim] = dense_rank(counts[dim - 1], &cols);
        }
        (0..=up_to)
            .map(|k| counts[k] as i64 - ranks[k] as i64 - ranks[k + 1] as i64)
            .collect()
    }

    #[test]
    fn known_spaces() {
        let hollow =
            SimplicialComplex::from_faces(3, 2, &[vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap();
        assert_eq!(betti(&hollow, 1).unwrap(), vec![1, 1]);

        let full = SimplicialComplex::full_simplex(3);
        assert_eq!(betti(&full, 2).unwrap(), vec![1, 0, 0]);

        // Boundary of the tetrahedron: a 2-sphere.
        let sphere = SimplicialComplex::simplex_boundary(3);
        assert_eq!(betti(&sphere, 2).unwrap(), vec![1, 0, 1]);

        // Octahedron boundary: also a 2-sphere.
        let oct = SimplicialComplex::cross_polytope(2);
        assert_eq!(betti(&oct, 2).unwrap(), vec![1, 0, 1]);

        // 4-cycle: a circle.
        let square = SimplicialComplex::cross_polytope(1);
        assert_eq!(betti(&square, 1).unwrap(), vec![1, 1]);

        // 3-sphere.
        let s3 = SimplicialComplex::cross_polytope(3);
        assert_eq!(betti(&s3, 3).unwrap(), vec![1, 0, 0, 1]);

        // Vertices only.
        let pts = SimplicialComplex::vertices_only(5, 2);
        assert_eq!(betti(&pts, 1).unwrap(), vec![5, 0]);
    }

    #[test]
    fn betti_requires_one_extra_dimension() {
        let hollow =
            SimplicialComplex::from_faces(3, 1, &[vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap();
        assert!(betti(&hollow, 1).is_err());
        assert_eq!(betti(&hollow, 0).unwrap(), vec![1]);
    }

    #[test]
    fn disjoint_union_is_additive() {
        // Two hollow triangles plus an isolated vertex.
        let faces = vec![
            vec![0, 1],
            vec![0, 2],
            vec![1, 2],
            vec![3, 4],
            vec![3, 5],
            vec![4, 5],
        ];
        let c = SimplicialComplex::from_faces(7, 2, &faces).unwrap();
        assert_eq!(betti(&c, 1).unwrap(), vec![3, 2]);
        assert_eq!(euler_characteristic(&c), 7 - 6);
    }

    #[test]
    fn matches_dense_oracle_on_random_complexes() {
        let dom = Domain::new(DomainKind::UnitCube, 2).unwrap();
        for case in 0..300u64 {
            let n = 4 + (case % 9) as usize; // 4..=12
            let cloud = sample_binomial(&dom, n, 40_000 + case);
            let r = 0.3 + 0.5 * ((case / 9) as f64 % 7.0) / 7.0;
            let g = build_graph_all_pairs(&cloud, r).unwrap();
            let full = build_rips(&g, 4);
            let rho = ProbabilityVector::new(vec![0.8, 0.7, 0.6, 0.5]).unwrap();
            let c = thin(&full, &rho, 90_000 + case).unwrap();
            let got = betti(&c, 3).unwrap();
            let want = oracle_betti(&c, 3);
            assert_eq!(
                got.iter().map(|&b| b as i64).collect::<Vec<_>>(),
                want,
                "case {case}"
            );
            // Also cross-check the public single-matrix rank.
            for dim in 1..=4 {
                let cols: Vec<Vec<u32>> =
                    c.faces(dim).iter().map(|f| boundary_column(&c, dim, f)).collect();
                assert_eq!(
                    boundary_rank(&c, dim),
                    dense_rank(c.face_counts()[dim - 1], &cols)
                );
            }
        }
    }

    #[test]
    fn euler_identity_on_thinned_complexes() {
        // When the top stored dimension carries no faces, the alternating
        // face-count sum equals the alternating Betti sum.
        let dom = Domain::new(DomainKind::UnitCube, 2).unwrap();
        let mut checked = 0;
        for case in 0..500u64 {
            let n = 10 + (case % 20) as usize;
            let cloud = sample_binomial(&dom, n, 60_000 + case);
            let g = build_graph_all_pairs(&cloud, 0.25).unwrap();
            let full = build_rips(&g, 4);
            let rho = ProbabilityVector::new(vec![0.9, 0.5, 0.3, 0.2]).unwrap();
            let c = thin(&full, &rho, 70_000 + case).unwrap();
            if c.face_counts()[4] != 0 {
                continue;
            }
            let b = betti(&c, 3).unwrap();
            let alt: i64 = b
                .iter()
                .enumerate()
                .map(|(i, &x)| if i % 2 == 0 { x as i64 } else { -(x as i64) })
                .sum();
            assert_eq!(alt, euler_characteristic(&c), "case {case}");
            checked += 1;
        }
        assert!(checked >= 400, "only {checked} complexes had an empty top dimension");
    }

    #[test]
    fn betti_zero_counts_graph_components() {
        let dom = Domain::new(DomainKind::UnitCube, 2).unwrap();
        let cloud = sample_binomial(&dom, 400, 12_345);
        let g = crate::geometry::build_graph(&cloud, 0.08).unwrap();
        let c = build_rips(&g, 2);
        let b = betti(&c, 1).unwrap();
        // BFS component count on the underlying graph.
        let mut seen = vec![false; g.n()];
        let mut comps = 0u64;
        let mut queue = Vec::new();
        for s in 0..g.n() {
            if seen[s] {
                continue;
            }
            comps += 1;
            seen[s] = true;
            queue.push(s);
            while let Some(v) = queue.pop() {
                for &w in g.neighbors(v) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        queue.push(w as usize);
                    }
                }
            }
        }
        assert_eq!(b[0], comps);
        assert!(comps > 1, "radius chosen to leave several components");
    }
}
