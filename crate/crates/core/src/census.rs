//! Component decomposition and pattern counts.
//!
//! Components are those of the 1-skeleton; higher faces never join distinct
//! components because their edges are already present by downward closure.
//! On top of the partition this module counts three pattern statistics:
//!
//! - components isomorphic to the boundary of a `(k+1)`-simplex (an "empty
//!   simplex": all faces on `k+2` vertices except the top one),
//! - components isomorphic to the boundary complex of the `(k+1)`-dimensional
//!   cross-polytope,
//! - `k`-faces lying in components with at least `m` vertices.
//!
//! The recognizers work by exact counting: a component's faces are subsets of
//! cliques of its 1-skeleton, so matching the face counts of the target
//! pattern pins the face set down exactly. No generic isomorphism search is
//! performed.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::complex::SimplicialComplex;
use crate::{binomial, precondition, Result};

/// Union-find over vertex ids with path halving and union by size.
struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            let gp = self.parent[self.parent[v as usize] as usize];
            self.parent[v as usize] = gp;
            v = gp;
        }
        v
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }
}

/// Per-component data shared by all counts: a compact component label per
/// vertex, component sizes, per-component face counts by dimension, and
/// vertex degrees in the 1-skeleton.
struct ComponentData {
    label: Vec<u32>,
    sizes: Vec<u32>,
    /// `face_counts[comp][dim]`
    face_counts: Vec<Vec<u64>>,
    degree: Vec<u32>,
}

impl ComponentData {
    fn build(complex: &SimplicialComplex) -> Self {
        let n = complex.n();
        let mut uf = UnionFind::new(n);
        let mut degree = vec![0u32; n];
        if complex.k_max() >= 1 {
            for e in complex.faces(1).iter() {
                uf.union(e[0], e[1]);
                degree[e[0] as usize] += 1;
                degree[e[1] as usize] += 1;
            }
        }
        // Compact labels in order of first appearance by vertex id.
        let mut label = vec![u32::MAX; n];
        let mut root_to_label: BTreeMap<u32, u32> = BTreeMap::new();
        let mut sizes: Vec<u32> = Vec::new();
        for v in 0..n as u32 {
            let r = uf.find(v);
            let l = *root_to_label.entry(r).or_insert_with(|| {
                sizes.push(uf.size[r as usize]);
                (sizes.len() - 1) as u32
            });
            label[v as usize] = l;
        }
        let mut face_counts = vec![vec![0u64; complex.k_max() + 1]; sizes.len()];
        for v in 0..n {
            face_counts[label[v] as usize][0] += 1;
        }
        #[allow(clippy::needless_range_loop)] // dim selects both the face set and the slot
        for dim in 1..=complex.k_max() {
            for f in complex.faces(dim).iter() {
                face_counts[label[f[0] as usize] as usize][dim] += 1;
            }
        }
        ComponentData { label, sizes, face_counts, degree }
    }
}

/// Connected components of the 1-skeleton as sorted vertex lists, ordered by
/// smallest member.
pub fn components(complex: &SimplicialComplex) -> Vec<Vec<u32>> {
    let data = ComponentData::build(complex);
    let mut out: Vec<Vec<u32>> = vec![Vec::new(); data.sizes.len()];
    for (v, &l) in data.label.iter().enumerate() {
        out[l as usize].push(v as u32);
    }
    out
}

fn empty_simplex_count(data: &ComponentData, k: usize) -> u64 {
    let want_size = (k + 2) as u32;
    let mut count = 0u64;
    for (c, &size) in data.sizes.iter().enumerate() {
        if size != want_size {
            continue;
        }
        let counts = &data.face_counts[c];
        let complete_below = (1..=k).all(|i| counts[i] == binomial(k + 2, i + 1));
        if complete_below && counts[k + 1] == 0 {
            count += 1;
        }
    }
    count
}

fn cross_polytope_count(data: &ComponentData, k: usize) -> u64 {
    let want_size = (2 * k + 2) as u32;
    // Degree 2k for every member makes the component's complement graph a
    // perfect matching; matching clique counts in dimensions 2..=k then pin
    // the face set to the cross-polytope boundary exactly. Faces above
    // dimension k are impossible because that graph has no (k+2)-clique.
    let mut candidate = vec![false; data.sizes.len()];
    for (c, &size) in data.sizes.iter().enumerate() {
        candidate[c] = size == want_size;
    }
    for (v, &l) in data.label.iter().enumerate() {
        if candidate[l as usize] && data.degree[v] != (2 * k) as u32 {
            candidate[l as usize] = false;
        }
    }
    let mut count = 0u64;
    for (c, &ok) in candidate.iter().enumerate() {
        if !ok {
            continue;
        }
        let counts = &data.face_counts[c];
        if (2..=k).all(|i| counts[i] == (1u64 << (i + 1)) * binomial(k + 1, i + 1)) {
            count += 1;
        }
    }
    count
}

fn faces_in_large_count(data: &ComponentData, k: usize, m: usize) -> u64 {
    data.sizes
        .iter()
        .enumerate()
        .filter(|&(_, &size)| size as usize >= m)
        .map(|(c, _)| data.face_counts[c][k])
        .sum()
}

/// Components with exactly `k+2` vertices carrying every face of dimension
/// at most `k` on those vertices but not the single `(k+1)`-face.
pub fn count_empty_simplex_components(complex: &SimplicialComplex, k: usize) -> Result<u64> {
    precondition(k >= 1, || "empty-simplex pattern needs k >= 1".into())?;
    precondition(complex.k_max() > k, || {
        format!("pattern check in dimension {k} needs k_max >= {}, got {}", k + 1, complex.k_max())
    })?;
    Ok(empty_simplex_count(&ComponentData::build(complex), k))
}

/// Components isomorphic to the boundary complex of the `(k+1)`-dimensional
/// cross-polytope: `2k+2` vertices, complement of the 1-skeleton a perfect
/// matching, and all cliques up to dimension `k` filled.
pub fn count_cross_polytope_components(complex: &SimplicialComplex, k: usize) -> Result<u64> {
    precondition(k >= 1, || "cross-polytope pattern needs k >= 1".into())?;
    precondition(complex.k_max() >= k, || {
        format!("pattern check in dimension {k} needs k_max >= {k}, got {}", complex.k_max())
    })?;
    Ok(cross_polytope_count(&ComponentData::build(complex), k))
}

/// Number of `k`-faces whose vertices lie in a component of at least `m`
/// vertices.
pub fn count_faces_in_large_components(
    complex: &SimplicialComplex,
    k: usize,
    m: usize,
) -> Result<u64> {
    precondition(k <= complex.k_max(), || {
        format!("no faces of dimension {k} stored (k_max {})", complex.k_max())
    })?;
    precondition(m >= 1, || "component size threshold must be at least 1".into())?;
    Ok(faces_in_large_count(&ComponentData::build(complex), k, m))
}

/// Rule choosing the component-size threshold `m` for the `k`-face count.
/// The named rules both use `k + 3`, the smallest component size that can
/// carry a `k`-face without being an empty-simplex candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MRule {
    Rips,
    Cech,
    Custom(usize),
}

impl MRule {
    pub fn m_for(&self, k: usize) -> usize {
        match self {
            MRule::Rips | MRule::Cech => k + 3,
            MRule::Custom(m) => *m,
        }
    }
}

/// All census statistics for one complex.
///
/// `empty_simplex[k]` counts components equal to the boundary of a
/// `(k+1)`-simplex, `cross_polytope[k]` counts cross-polytope-boundary
/// components, and `faces_in_large[(k, m)]` counts `k`-faces in components
/// of at least `m` vertices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CensusReport {
    pub component_sizes: BTreeMap<usize, u64>,
    pub empty_simplex: BTreeMap<usize, u64>,
    pub cross_polytope: BTreeMap<usize, u64>,
    pub faces_in_large: BTreeMap<(usize, usize), u64>,
}

/// Computes every census statistic in one pass over the complex.
/// Each requested `k` must satisfy `k >= 1` and `k_max >= k + 1`.
pub fn census(complex: &SimplicialComplex, k_list: &[usize], m_rule: MRule) -> Result<CensusReport> {
    for &k in k_list {
        precondition(k >= 1, || "census needs k >= 1".into())?;
        precondition(complex.k_max() > k, || {
            format!("census at k={k} needs k_max >= {}, got {}", k + 1, complex.k_max())
        })?;
        precondition(m_rule.m_for(k) >= 1, || "component size threshold must be at least 1".into())?;
    }
    let data = ComponentData::build(complex);
    let mut report = CensusReport::default();
    for &size in &data.sizes {
        *report.component_sizes.entry(size as usize).or_insert(0) += 1;
    }
    for &k in k_list {
        report.empty_simplex.insert(k, empty_simplex_count(&data, k));
        report.cross_polytope.insert(k, cross_polytope_count(&data, k));
        let m = m_rule.m_for(k);
        report.faces_in_large.insert((k, m), faces_in_large_count(&data, k, m));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_rips, thin, ProbabilityVector};
    use crate::geometry::{build_graph_all_pairs, sample_binomial, Domain, DomainKind};

    /// Shift a face list by an offset so disjoint unions can be assembled.
    fn shifted(faces: &[Vec<u32>], offset: u32) -> Vec<Vec<u32>> {
        faces.iter().map(|f| f.iter().map(|&v| v + offset).collect()).collect()
    }

    fn hollow_triangle() -> Vec<Vec<u32>> {
        vec![vec![0, 1], vec![0, 2], vec![1, 2]]
    }

    fn four_cycle() -> Vec<Vec<u32>> {
        vec![vec![0, 1], vec![0, 2], vec![1, 3], vec![2, 3]]
    }

    #[test]
    fn components_on_small_examples() {
        // Two disjoint edges.
        let c = SimplicialComplex::from_faces(4, 1, &[vec![0, 1], vec![2, 3]]).unwrap();
        let parts = components(&c);
        assert_eq!(parts, vec![vec![0, 1], vec![2, 3]]);
        // Empty complex: singletons.
        let c = SimplicialComplex::vertices_only(4, 1);
        assert_eq!(components(&c).len(), 4);
    }

    #[test]
    fn components_match_bfs_oracle() {
        let dom = Domain::new(DomainKind::UnitCube, 2).unwrap();
        for case in 0..50u64 {
            let cloud = sample_binomial(&dom, 60, 5_000 + case);
            let g = build_graph_all_pairs(&cloud, 0.12).unwrap();
            let c = build_rips(&g, 2);
            let parts = components(&c);
            // BFS labels.
            let mut label = vec![usize::MAX; 60];
            let mut next = 0usize;
            let mut queue = Vec::new();
            for s in 0..60 {
                if label[s] != usize::MAX {
                    continue;
                }
                label[s] = next;
                queue.push(s);
                while let Some(v) = queue.pop() {
                    for &w in g.neighbors(v) {
                        if label[w as usize] == usize::MAX {
                            label[w as usize] = next;
                            queue.push(w as usize);
                        }
                    }
                }
                next += 1;
            }
            assert_eq!(parts.len(), next, "case {case}");
            for part in &parts {
                assert!(part.iter().all(|&v| label[v as usize] == label[part[0] as usize]));
            }
            let total: usize = parts.iter().map(Vec::len).sum();
            assert_eq!(total, 60);
        }
    }

    #[test]
    fn empty_simplex_recognition() {
        // Isolated hollow triangle: one match at k=1.
        let c = SimplicialComplex::from_faces(3, 2, &hollow_triangle()).unwrap();
        assert_eq!(count_empty_simplex_components(&c, 1).unwrap(), 1);
        // Hollow triangle plus a pendant vertex: component too large.
        let mut faces = hollow_triangle();
        faces.push(vec![2, 3]);
        let c = SimplicialComplex::from_faces(4, 2, &faces).unwrap();
        assert_eq!(count_empty_simplex_components(&c, 1).unwrap(), 0);
        // Full triangle: top face present.
        let c = SimplicialComplex::full_simplex(2);
        assert_eq!(count_empty_simplex_components(&c, 1).unwrap(), 0);
        // Boundary of the tetrahedron: k=2 pattern, not k=1.
        let c = SimplicialComplex::simplex_boundary(3);
        assert_eq!(count_empty_simplex_components(&c, 2).unwrap(), 1);
        assert_eq!(count_empty_simplex_components(&c, 1).unwrap(), 0);
        // Needs one dimension of headroom.
        let flat = SimplicialComplex::from_faces(3, 1, &hollow_triangle()).unwrap();
        assert!(count_empty_simplex_components(&flat, 1).is_err());
    }

    #[test]
    fn cross_polytope_recognition() {
        // Isolated 4-cycle: the k=1 cross-polytope boundary.
        let c = SimplicialComplex::from_faces(4, 2, &four_cycle()).unwrap();
        assert_eq!(count_cross_polytope_components(&c, 1).unwrap(), 1);
        // K4 clique complex: complement has no edges.
        let c = SimplicialComplex::full_simplex(3);
        assert_eq!(count_cross_polytope_components(&c, 1).unwrap(), 0);
        // Octahedron with all eight triangles: k=2 pattern.
        let c = SimplicialComplex::cross_polytope(2);
        assert_eq!(count_cross_polytope_components(&c, 2).unwrap(), 1);
        assert_eq!(count_cross_polytope_components(&c, 1).unwrap(), 0);
        // Octahedron missing one triangle no longer matches.
        let mut faces: Vec<Vec<u32>> = Vec::new();
        for dim in 1..=2 {
            for f in SimplicialComplex::cross_polytope(2).faces(dim).iter() {
                faces.push(f.to_vec());
            }
        }
        faces.retain(|f| f.len() != 3 || f != &vec![0, 2, 4]);
        let c = SimplicialComplex::from_faces(6, 3, &faces).unwrap();
        assert_eq!(count_cross_polytope_components(&c, 2).unwrap(), 0);
    }

    #[test]
    fn faces_in_large_components_examples() {
        // Path on 4 vertices: 3 edges, component size 4.
        let path = SimplicialComplex::from_faces(4, 1, &[vec![0, 1], vec![1, 2], vec![2, 3]])
            .unwrap();
        assert_eq!(count_faces_in_large_components(&path, 1, 4).unwrap(), 3);
        assert_eq!(count_faces_in_large_components(&path, 0, 4).unwrap(), 4);
        // Two disjoint full triangles: components of size 3 only.
        let mut faces = hollow_triangle();
        faces.push(vec![0, 1, 2]);
        let mut both = faces.clone();
        both.extend(shifted(&faces, 3));
        let c = SimplicialComplex::from_faces(6, 2, &both).unwrap();
        assert_eq!(count_faces_in_large_components(&c, 1, 4).unwrap(), 0);
        assert_eq!(count_faces_in_large_components(&c, 1, 3).unwrap(), 6);
        assert_eq!(count_faces_in_large_components(&c, 2, 3).unwrap(), 2);
    }

    #[test]
    fn faces_in_large_matches_per_component_recount() {
        let dom = Domain::new(DomainKind::UnitCube, 2).unwrap();
        for case in 0..30u64 {
            let cloud = sample_binomial(&dom, 70, 8_000 + case);
            let g = build_graph_all_pairs(&cloud, 0.15).unwrap();
            let full = build_rips(&g, 3);
            let rho = ProbabilityVector::new(vec![0.9, 0.6, 0.4]).unwrap();
            let c = thin(&full, &rho, case).unwrap();
            let parts = components(&c);
            for (k, m) in [(1usize, 4usize), (2, 5), (1, 2), (2, 100)] {
                let got = count_faces_in_large_components(&c, k, m).unwrap();
                // Oracle: recount faces per qualifying component.
                let mut want = 0u64;
                for part in &parts {
                    if part.len() < m {
                        continue;
                    }
                    for f in c.faces(k).iter() {
                        if part.binary_search(&f[0]).is_ok() {
                            want += 1;
                        }
                    }
                }
                assert_eq!(got, want, "case {case} k {k} m {m}");
            }
        }
    }

    #[test]
    fn census_combined_example() {
        // Hollow triangle + 4-cycle + isolated vertex on 8 vertices.
        let mut faces = hollow_triangle();
        faces.extend(shifted(&four_cycle(), 3));
        let c = SimplicialComplex::from_faces(8, 2, &faces).unwrap();
        let report = census(&c, &[1], MRule::Custom(4)).unwrap();
        let sizes: BTreeMap<usize, u64> = [(1, 1), (3, 1), (4, 1)].into_iter().collect();
        assert_eq!(report.component_sizes, sizes);
        assert_eq!(report.empty_simplex[&1], 1);
        assert_eq!(report.cross_polytope[&1], 1);
        assert_eq!(report.faces_in_large[&(1, 4)], 4);
        // The named rules use m = k + 3, same threshold here.
        let default = census(&c, &[1], MRule::Rips).unwrap();
        assert_eq!(default.faces_in_large[&(1, 4)], 4);
    }

    #[test]
    fn census_empty_complex() {
        let c = SimplicialComplex::vertices_only(9, 3);
        let report = census(&c, &[1, 2], MRule::Rips).unwrap();
        assert_eq!(report.component_sizes, [(1usize, 9u64)].into_iter().collect());
        assert!(report.empty_simplex.values().all(|&v| v == 0));
        assert!(report.cross_polytope.values().all(|&v| v == 0));
        assert!(report.faces_in_large.values().all(|&v| v == 0));
    }

    #[test]
    fn census_invariants_on_random_complexes() {
        let dom = Domain::new(DomainKind::UnitCube, 2).unwrap();
        for case in 0..40u64 {
            let n = 50 + (case % 30) as usize;
            let cloud = sample_binomial(&dom, n, 20_000 + case);
            let g = build_graph_all_pairs(&cloud, 0.12).unwrap();
            let full = build_rips(&g, 3);
            // Unthinned flag complexes contain no empty-simplex boundaries.
            let unthinned = census(&full, &[1, 2], MRule::Rips).unwrap();
            assert!(unthinned.empty_simplex.values().all(|&v| v == 0), "case {case}");

            let rho = ProbabilityVector::new(vec![0.8, 0.5, 0.4]).unwrap();
            let c = thin(&full, &rho, 31_000 + case).unwrap();
            let report = census(&c, &[1, 2], MRule::Rips).unwrap();
            // Histogram masses sum to n.
            let mass: u64 =
                report.component_sizes.iter().map(|(&s, &cnt)| s as u64 * cnt).sum();
            assert_eq!(mass, n as u64);
            // Pattern counts bounded by candidate component counts.
            for k in [1usize, 2] {
                let cand = report.component_sizes.get(&(k + 2)).copied().unwrap_or(0);
                assert!(report.empty_simplex[&k] <= cand);
                let cand = report.component_sizes.get(&(2 * k + 2)).copied().unwrap_or(0);
                assert!(report.cross_polytope[&k] <= cand);
            }
            // Report agrees with the standalone operations.
            assert_eq!(
                report.empty_simplex[&1],
                count_empty_simplex_components(&c, 1).unwrap()
            );
            assert_eq!(
                report.cross_polytope[&2],
                count_cross_polytope_components(&c, 2).unwrap()
            );
            assert_eq!(
                report.faces_in_large[&(1, 4)],
                count_faces_in_large_components(&c, 1, 4).unwrap()
            );
        }
    }
}
