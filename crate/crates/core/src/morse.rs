//! Norm-ordered discrete gradient vector field.
//!
//! Vertices are ranked by increasing Euclidean norm of their sample point
//! (ties broken by vertex id). Every face `F` proposes the pair
//! `(F, F ∪ {a(F)})` where `a(F)` is the lowest-ranked vertex below all of
//! `F`'s ranks whose join with `F` is present in the complex. Because the
//! added vertex becomes the minimum of the coface, each coface has exactly
//! one canonical proposer, and downward closure prevents a face from being
//! both a proposer and a proposee — the proposals form a matching outright.
//!
//! Along any alternating V-path the minimum rank of the lower face strictly
//! decreases, so the field is acyclic by construction; the cycle check runs
//! anyway and demotes every face on a detected cycle to critical, keeping
//! the output a valid gradient field under any circumstances.
//!
//! Unmatched faces are critical; `C_k`, the number of critical `k`-faces,
//! bounds the `k`-th Betti number from above.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::complex::SimplicialComplex;
use crate::geometry::PointCloud;
use crate::{precondition, Result};

const UNPAIRED: u32 = u32::MAX;

/// A discrete vector field on a specific complex: pairs of (face, coface)
/// indices per dimension, critical face indices per dimension, and the
/// norm-increasing vertex order that induced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseMatching {
    /// `vertex_order[i]` is the id of the vertex with the `i`-th smallest
    /// norm.
    vertex_order: Vec<u32>,
    /// `pairs[dim]` lists `(lower_index, upper_index)` into the face sets of
    /// dimensions `dim` and `dim + 1`.
    pairs: Vec<Vec<(u32, u32)>>,
    /// `critical[dim]` lists indices of unmatched `dim`-faces.
    critical: Vec<Vec<u32>>,
}

impl MorseMatching {
    pub fn vertex_order(&self) -> &[u32] {
        &self.vertex_order
    }

    /// Pairs whose lower face has the given dimension.
    pub fn pairs(&self, dim: usize) -> &[(u32, u32)] {
        &self.pairs[dim]
    }

    pub fn critical(&self, dim: usize) -> &[u32] {
        &self.critical[dim]
    }

    /// `(C_0, C_1, ..., C_k_max)`.
    pub fn critical_counts(&self) -> Vec<u64> {
        self.critical.iter().map(|c| c.len() as u64).collect()
    }

    /// Assembles a matching from explicit (face, coface) tuples, resolving
    /// them against the complex. Faces must exist and each coface must be one
    /// dimension above its face; all structural soundness beyond that (the
    /// matching property, acyclicity) is left to [`verify_gradient`], so
    /// deliberately broken fields can be built for testing.
    pub fn from_pairs(
        complex: &SimplicialComplex,
        pairs: &[(Vec<u32>, Vec<u32>)],
    ) -> Result<MorseMatching> {
        let k_max = complex.k_max();
        let mut by_dim: Vec<Vec<(u32, u32)>> = vec![Vec::new(); k_max];
        for (lo, hi) in pairs {
            precondition(!lo.is_empty() && hi.len() == lo.len() + 1, || {
                format!("pair ({lo:?}, {hi:?}) does not step up one dimension")
            })?;
            let dim = lo.len() - 1;
            precondition(dim < k_max, || {
                format!("pair ({lo:?}, {hi:?}) exceeds k_max {k_max}")
            })?;
            let li = complex.faces(dim).position(lo);
            let hi_idx = complex.faces(dim + 1).position(hi);
            match (li, hi_idx) {
                (Some(a), Some(b)) => by_dim[dim].push((a as u32, b as u32)),
                _ => {
                    return Err(crate::Error::Precondition(format!(
                        "pair ({lo:?}, {hi:?}) references faces absent from the complex"
                    )))
                }
            }
        }
        let mut matched: Vec<Vec<bool>> =
            complex.face_counts().iter().map(|&c| vec![false; c]).collect();
        for (dim, list) in by_dim.iter().enumerate() {
            for &(a, b) in list {
                matched[dim][a as usize] = true;
                matched[dim + 1][b as usize] = true;
            }
        }
        let critical = collect_critical(&matched);
        Ok(MorseMatching {
            vertex_order: (0..complex.n() as u32).collect(),
            pairs: by_dim,
            critical,
        })
    }
}

fn collect_critical(matched: &[Vec<bool>]) -> Vec<Vec<u32>> {
    matched
        .iter()
        .map(|flags| {
            flags
                .iter()
                .enumerate()
                .filter(|&(_, &m)| !m)
                .map(|(i, _)| i as u32)
                .collect()
        })
        .collect()
}

fn insert_sorted(face: &[u32], v: u32, out: &mut Vec<u32>) {
    out.clear();
    let split = face.partition_point(|&u| u < v);
    out.extend_from_slice(&face[..split]);
    out.push(v);
    out.extend_from_slice(&face[split..]);
}

fn facet_into(face: &[u32], skip: usize, out: &mut Vec<u32>) {
    out.clear();
    out.extend(face.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
}

/// Searches the V-path digraph of one dimension pair for a closed path.
/// `up[i]` is the coface index of the paired `dim`-face `i`, or [`UNPAIRED`].
/// Returns the node indices on one cycle if any exists.
fn find_vpath_cycle(complex: &SimplicialComplex, dim: usize, up: &[u32]) -> Option<Vec<u32>> {
    let fs = complex.faces(dim);
    let above = complex.faces(dim + 1);
    // 0 = unvisited, 1 = on the current path, 2 = done.
    let mut color = vec![0u8; fs.len()];
    let mut path: Vec<u32> = Vec::new();
    let mut facet = Vec::new();
    for start in 0..fs.len() {
        if color[start] != 0 || up[start] == UNPAIRED {
            continue;
        }
        // Iterative DFS; each stack frame tracks which facet of the coface
        // is explored next.
        let mut stack: Vec<(u32, usize)> = vec![(start as u32, 0)];
        color[start] = 1;
        path.push(start as u32);
        while let Some(&(node, skip_from)) = stack.last() {
            let coface = above.face(up[node as usize] as usize);
            let mut advanced = false;
            let mut skip = skip_from;
            while skip < coface.len() {
                facet_into(coface, skip, &mut facet);
                skip += 1;
                let Some(succ) = fs.position(&facet) else { continue };
                if succ == node as usize || up[succ] == UNPAIRED {
                    continue;
                }
                match color[succ] {
                    0 => {
                        stack.last_mut().expect("frame present").1 = skip;
                        color[succ] = 1;
                        path.push(succ as u32);
                        stack.push((succ as u32, 0));
                        advanced = true;
                        break;
                    }
                    1 => {
                        // Closed V-path: everything from `succ` onward.
                        let at = path.iter().position(|&x| x == succ as u32).unwrap();
                        return Some(path[at..].to_vec());
                    }
                    _ => {}
                }
            }
            if !advanced {
                color[node as usize] = 2;
                path.pop();
                stack.pop();
            }
        }
    }
    None
}

/// Builds the norm-ordered gradient field. Fails only on a vertex-count
/// mismatch between the cloud and the complex.
pub fn build_gradient_field(
    complex: &SimplicialComplex,
    cloud: &PointCloud,
) -> Result<MorseMatching> {
    precondition(cloud.len() == complex.n(), || {
        format!("cloud has {} points but complex has {} vertices", cloud.len(), complex.n())
    })?;
    let n = complex.n();
    let k_max = complex.k_max();

    let mut vertex_order: Vec<u32> = (0..n as u32).collect();
    vertex_order.sort_by(|&a, &b| {
        cloud
            .norm_sq(a as usize)
            .total_cmp(&cloud.norm_sq(b as usize))
            .then(a.cmp(&b))
    });
    let mut rank = vec![0u32; n];
    for (i, &v) in vertex_order.iter().enumerate() {
        rank[v as usize] = i as u32;
    }

    // Adjacency of the complex's 1-skeleton, each list sorted by ascending
    // rank so candidate joins are visited in the order the rule requires.
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    if k_max >= 1 {
        for e in complex.faces(1).iter() {
            adj[e[0] as usize].push(e[1]);
            adj[e[1] as usize].push(e[0]);
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&v| rank[v as usize]);
        }
    }

    let counts = complex.face_counts();
    let mut matched: Vec<Vec<bool>> = counts.iter().map(|&c| vec![false; c]).collect();
    let mut up: Vec<Vec<u32>> = counts.iter().map(|&c| vec![UNPAIRED; c]).collect();
    let mut joined = Vec::with_capacity(k_max + 1);

    for dim in 0..k_max {
        let fs = complex.faces(dim);
        let above = complex.faces(dim + 1);
        for (idx, f) in fs.iter().enumerate() {
            if matched[dim][idx] {
                continue; // already the coface of a lower pair
            }
            let min_rank = f.iter().map(|&v| rank[v as usize]).min().expect("non-empty face");
            let probe = f
                .iter()
                .copied()
                .min_by_key(|&v| adj[v as usize].len())
                .expect("non-empty face");
            for &v in &adj[probe as usize] {
                if rank[v as usize] >= min_rank {
                    break; // lists are rank-sorted: no smaller candidate left
                }
                insert_sorted(f, v, &mut joined);
                if let Some(pos) = above.position(&joined) {
                    // The added vertex out-ranks none of F, so it is the
                    // coface's minimum and F is its unique canonical
                    // proposer; the slot must still be free.
                    debug_assert!(!matched[dim + 1][pos]);
                    if !matched[dim + 1][pos] {
                        matched[dim][idx] = true;
                        matched[dim + 1][pos] = true;
                        up[dim][idx] = pos as u32;
                    }
                    break;
                }
            }
        }
    }

    // Safety net: demote every face on a closed V-path. The rank argument
    // above makes closed paths impossible, so this loop is expected to find
    // nothing.
    for dim in 0..k_max {
        while let Some(cycle) = find_vpath_cycle(complex, dim, &up[dim]) {
            for &node in &cycle {
                let coface = up[dim][node as usize];
                up[dim][node as usize] = UNPAIRED;
                matched[dim][node as usize] = false;
                matched[dim + 1][coface as usize] = false;
            }
        }
    }

    let mut pairs: Vec<Vec<(u32, u32)>> = vec![Vec::new(); k_max];
    for dim in 0..k_max {
        for (idx, &pos) in up[dim].iter().enumerate() {
            if pos != UNPAIRED {
                pairs[dim].push((idx as u32, pos));
            }
        }
    }
    let critical = collect_critical(&matched);
    Ok(MorseMatching { vertex_order, pairs, critical })
}

/// Checks that the field is a gradient vector field on the complex: indices
/// in range, every coface one dimension above and containing its face, no
/// face in two pairs, critical faces exactly the unmatched ones, and no
/// closed V-path in any dimension.
pub fn verify_gradient(matching: &MorseMatching, complex: &SimplicialComplex) -> bool {
    let k_max = complex.k_max();
    let counts = complex.face_counts();
    if matching.pairs.len() != k_max || matching.critical.len() != k_max + 1 {
        return false;
    }
    let mut used: Vec<Vec<bool>> = counts.iter().map(|&c| vec![false; c]).collect();
    let mut up: Vec<Vec<u32>> = counts.iter().map(|&c| vec![UNPAIRED; c]).collect();
    for dim in 0..k_max {
        let fs = complex.faces(dim);
        let above = complex.faces(dim + 1);
        for &(lo, hi) in &matching.pairs[dim] {
            let (lo, hi) = (lo as usize, hi as usize);
            if lo >= fs.len() || hi >= above.len() {
                return false;
            }
            // Containment: every vertex of the face appears in the coface.
            let (f, g) = (fs.face(lo), above.face(hi));
            if !f.iter().all(|v| g.binary_search(v).is_ok()) {
                return false;
            }
            // Matching property: each face at most once, in any role.
            if used[dim][lo] || used[dim + 1][hi] {
                return false;
            }
            used[dim][lo] = true;
            used[dim + 1][hi] = true;
            up[dim][lo] = hi as u32;
        }
    }
    for dim in 0..=k_max {
        let mut listed = vec![false; counts[dim]];
        for &c in &matching.critical[dim] {
            let c = c as usize;
            if c >= counts[dim] || used[dim][c] || listed[c] {
                return false;
            }
            listed[c] = true;
        }
        // Critical and matched faces partition the dimension.
        if matching.critical[dim].len() + used[dim].iter().filter(|&&u| u).count() != counts[dim]
        {
            return false;
        }
    }
    (0..k_max).all(|dim| find_vpath_cycle(complex, dim, &up[dim]).is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_rips, thin, ProbabilityVector};
    use crate::geometry::{build_graph_all_pairs, sample_binomial, Domain, DomainKind};
    use crate::homology::{betti, euler_characteristic};

    /// Points on a line with norms increasing in vertex id, so rank = id.
    fn ranked_cloud(n: usize) -> PointCloud {
        PointCloud::from_coords(1, (1..=n).map(|i| i as f64 * 0.1).collect()).unwrap()
    }

    fn pair_set(m: &MorseMatching, complex: &SimplicialComplex) -> Vec<(Vec<u32>, Vec<u32>)> {
        let mut out = Vec::new();
        for dim in 0..complex.k_max() {
            for &(lo, hi) in m.pairs(dim) {
                out.push((
                    complex.faces(dim).face(lo as usize).to_vec(),
                    complex.faces(dim + 1).face(hi as usize).to_vec(),
                ));
            }
        }
        out.sort();
        out
    }

    #[test]
    fn full_triangle_pairing() {
        let complex = SimplicialComplex::full_simplex(2);
        let m = build_gradient_field(&complex, &ranked_cloud(3)).unwrap();
        assert_eq!(m.vertex_order(), &[0, 1, 2]);
        assert_eq!(
            pair_set(&m, &complex),
            vec![
                (vec![1], vec![0, 1]),
                (vec![1, 2], vec![0, 1, 2]),
                (vec![2], vec![0, 2]),
            ]
        );
        assert_eq!(m.critical_counts(), vec![1, 0, 0]);
        assert_eq!(m.critical(0), &[0]);
        assert!(verify_gradient(&m, &complex));
    }

    #[test]
    fn hollow_triangle_pairing() {
        let complex =
            SimplicialComplex::from_faces(3, 2, &[vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap();
        let m = build_gradient_field(&complex, &ranked_cloud(3)).unwrap();
        assert_eq!(
            pair_set(&m, &complex),
            vec![(vec![1], vec![0, 1]), (vec![2], vec![0, 2])]
        );
        assert_eq!(m.critical_counts(), vec![1, 1, 0]);
        assert!(verify_gradient(&m, &complex));
    }

    #[test]
    fn isolated_vertices_all_critical() {
        let complex = SimplicialComplex::vertices_only(3, 0);
        let m = build_gradient_field(&complex, &ranked_cloud(3)).unwrap();
        assert_eq!(m.critical_counts(), vec![3]);
        assert!(m.pairs.is_empty());
        assert!(verify_gradient(&m, &complex));
        // Single vertex.
        let one = SimplicialComplex::vertices_only(1, 1);
        let m = build_gradient_field(&one, &ranked_cloud(1)).unwrap();
        assert_eq!(m.critical_counts(), vec![1, 0]);
    }

    #[test]
    fn vertex_count_mismatch_rejected() {
        let complex = SimplicialComplex::full_simplex(2);
        assert!(build_gradient_field(&complex, &ranked_cloud(4)).is_err());
    }

    #[test]
    fn rank_order_follows_norm_not_id() {
        // Vertex 2 has the smallest norm; the pairing must treat it as the
        // root of the field.
        let cloud = PointCloud::from_coords(1, vec![0.3, 0.2, 0.1]).unwrap();
        let complex = SimplicialComplex::full_simplex(2);
        let m = build_gradient_field(&complex, &cloud).unwrap();
        assert_eq!(m.vertex_order(), &[2, 1, 0]);
        assert_eq!(m.critical(0), &[2]);
        assert_eq!(m.critical_counts(), vec![1, 0, 0]);
    }

    #[test]
    fn double_pair_fails_verification() {
        let complex =
            SimplicialComplex::from_faces(3, 2, &[vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap();
        let m = MorseMatching::from_pairs(
            &complex,
            &[(vec![1], vec![0, 1]), (vec![0], vec![0, 1])],
        )
        .unwrap();
        assert!(!verify_gradient(&m, &complex));
    }

    #[test]
    fn closed_vpath_fails_verification() {
        // 4-cycle 0-2-1-3-0; pair every vertex with its clockwise edge.
        let complex = SimplicialComplex::cross_polytope(1);
        let m = MorseMatching::from_pairs(
            &complex,
            &[
                (vec![0], vec![0, 2]),
                (vec![2], vec![1, 2]),
                (vec![1], vec![1, 3]),
                (vec![3], vec![0, 3]),
            ],
        )
        .unwrap();
        assert!(!verify_gradient(&m, &complex));
        // Reversing one pair to the canonical orientation breaks the cycle.
        let m = MorseMatching::from_pairs(
            &complex,
            &[(vec![2], vec![0, 2]), (vec![1], vec![1, 2]), (vec![3], vec![1, 3])],
        )
        .unwrap();
        assert!(verify_gradient(&m, &complex));
    }

    #[test]
    fn from_pairs_rejects_absent_faces() {
        let complex = SimplicialComplex::cross_polytope(1);
        // {0,1} is a diagonal, absent from the 4-cycle.
        assert!(MorseMatching::from_pairs(&complex, &[(vec![0], vec![0, 1])]).is_err());
        // Dimension step of two.
        assert!(MorseMatching::from_pairs(&complex, &[(vec![0], vec![0, 1, 2])]).is_err());
    }

    #[test]
    fn morse_inequality_and_euler_identity_on_random_complexes() {
        let dom = Domain::new(DomainKind::UnitCube, 2).unwrap();
        for case in 0..80u64 {
            let n = 20 + (case % 25) as usize;
            let cloud = sample_binomial(&dom, n, 300_000 + case);
            let g = build_graph_all_pairs(&cloud, 0.25).unwrap();
            let full = build_rips(&g, 4);
            let rho = ProbabilityVector::new(vec![0.9, 0.6, 0.5, 0.4]).unwrap();
            let complex = thin(&full, &rho, 17_000 + case).unwrap();
            let m = build_gradient_field(&complex, &cloud).unwrap();
            assert!(verify_gradient(&m, &complex), "case {case}");
            let c = m.critical_counts();
            let b = betti(&complex, 3).unwrap();
            for k in 0..=3 {
                assert!(b[k] <= c[k], "case {case}: beta_{k} = {} > C_{k} = {}", b[k], c[k]);
            }
            // Any matching cancels in the alternating sum, so critical
            // counts reproduce the Euler characteristic exactly.
            let alt: i64 = c
                .iter()
                .enumerate()
                .map(|(i, &x)| if i % 2 == 0 { x as i64 } else { -(x as i64) })
                .sum();
            assert_eq!(alt, euler_characteristic(&complex), "case {case}");
        }
    }

    #[test]
    fn critical_vertices_bound_components() {
        let dom = Domain::new(DomainKind::UnitCube, 2).unwrap();
        for case in 0..30u64 {
            let cloud = sample_binomial(&dom, 50, 44_000 + case);
            let g = build_graph_all_pairs(&cloud, 0.12).unwrap();
            let complex = build_rips(&g, 2);
            let m = build_gradient_field(&complex, &cloud).unwrap();
            let comps = crate::census::components(&complex).len() as u64;
            assert!(m.critical_counts()[0] >= comps, "case {case}");
        }
    }

    #[test]
    fn connected_dense_complex_has_single_critical_vertex() {
        // At this density every vertex except the norm-minimal one has a
        // lower-ranked neighbor, which is the generic situation the pairing
        // is designed for.
        let dom = Domain::new(DomainKind::UnitCube, 2).unwrap();
        for case in 0..10u64 {
            let cloud = sample_binomial(&dom, 120, 95_000 + case);
            let g = build_graph_all_pairs(&cloud, 0.45).unwrap();
            let complex = build_rips(&g, 2);
            assert_eq!(crate::census::components(&complex).len(), 1, "case {case}");
            let m = build_gradient_field(&complex, &cloud).unwrap();
            assert_eq!(m.critical_counts()[0], 1, "case {case}");
        }
    }

    #[test]
    fn critical_counts_invariant_under_relabeling() {
        let dom = Domain::new(DomainKind::UnitCube, 2).unwrap();
        for case in 0..20u64 {
            let n = 30usize;
            let cloud = sample_binomial(&dom, n, 52_000 + case);
            let g = build_graph_all_pairs(&cloud, 0.3).unwrap();
            let full = build_rips(&g, 3);
            let rho = ProbabilityVector::new(vec![0.8, 0.6, 0.5]).unwrap();
            let complex = thin(&full, &rho, case).unwrap();
            let m = build_gradient_field(&complex, &cloud).unwrap();

            // Deterministic pseudo-random permutation of vertex ids.
            let mut perm: Vec<u32> = (0..n as u32).collect();
            let mut s = 0x9e37u64.wrapping_add(case);
            for i in (1..n).rev() {
                s = crate::rng::derive(s, &[i as u64]);
                perm.swap(i, (s % (i as u64 + 1)) as usize);
            }
            let mut faces = Vec::new();
            for dim in 1..=complex.k_max() {
                for f in complex.faces(dim).iter() {
                    let mut mapped: Vec<u32> = f.iter().map(|&v| perm[v as usize]).collect();
                    mapped.sort_unstable();
                    faces.push(mapped);
                }
            }
            let relabeled = SimplicialComplex::from_faces(n, complex.k_max(), &faces).unwrap();
            let mut coords = vec![0.0; n * 2];
            for (v, &w) in perm.iter().enumerate() {
                let p = cloud.point(v);
                coords[w as usize * 2] = p[0];
                coords[w as usize * 2 + 1] = p[1];
            }
            let permuted_cloud = PointCloud::from_coords(2, coords).unwrap();
            let m2 = build_gradient_field(&relabeled, &permuted_cloud).unwrap();
            assert_eq!(m.critical_counts(), m2.critical_counts(), "case {case}");
        }
    }
}
