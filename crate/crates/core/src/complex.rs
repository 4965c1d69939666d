//! Simplicial complexes on integer vertices with truncated dimension.
//!
//! A complex stores, for every dimension `0..=k_max`, the lexicographically
//! sorted list of faces (each face a strictly increasing vertex tuple). All
//! `n` vertices are always present as 0-faces. Complexes are immutable once
//! built; the builders guarantee downward closure, and `validate` re-checks
//! every structural invariant for loaders and tests.
//!
//! Two geometric builders are provided: the Rips complex (cliques of the
//! geometric graph up to dimension `k_max`) and the Cech complex (vertex
//! tuples whose smallest enclosing ball has radius at most `r/2`). Cech
//! candidates are enumerated through Rips cliques, which is sound because a
//! Cech face is in particular pairwise within distance `r`.
//!
//! [`thin`] applies the hierarchical survival model: vertices always survive;
//! a face of dimension `i >= 1` survives iff its entire boundary survived and
//! its own keyed uniform draw falls below `p_i`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{min_enclosing_ball_radius, GeometricGraph, PointCloud};
use crate::rng::face_uniform;
use crate::{precondition, Result};

/// Absolute tolerance on the Cech ball-radius comparison `rad <= r/2`.
pub const CECH_TIE_TOLERANCE: f64 = 1e-12;

/// Lexicographically sorted list of same-dimension faces, stored flat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceSet {
    width: usize,
    data: Vec<u32>,
}

impl FaceSet {
    pub(crate) fn new(width: usize) -> Self {
        debug_assert!(width >= 1);
        FaceSet { width, data: Vec::new() }
    }

    /// Builds from flat data that must already be lex-sorted and duplicate
    /// free (checked in debug builds).
    pub(crate) fn from_sorted(width: usize, data: Vec<u32>) -> Self {
        debug_assert!(width >= 1 && data.len().is_multiple_of(width));
        let fs = FaceSet { width, data };
        debug_assert!(fs.iter().zip(fs.iter().skip(1)).all(|(a, b)| a < b));
        fs
    }

    pub(crate) fn push(&mut self, face: &[u32]) {
        debug_assert_eq!(face.len(), self.width);
        self.data.extend_from_slice(face);
    }

    /// Number of vertices per face (dimension + 1).
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn face(&self, i: usize) -> &[u32] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u32]> + Clone {
        self.data.chunks_exact(self.width)
    }

    /// Binary search by lexicographic order.
    pub fn position(&self, face: &[u32]) -> Option<usize> {
        if face.len() != self.width {
            return None;
        }
        let mut lo = 0usize;
        let mut hi = self.len();
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match self.face(mid).cmp(face) {
                core::cmp::Ordering::Less => lo = mid + 1,
                core::cmp::Ordering::Greater => hi = mid,
                core::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn contains(&self, face: &[u32]) -> bool {
        self.position(face).is_some()
    }
}

/// Survival probabilities `p_1..p_len` for face dimensions `1..=len`.
/// Vertices (dimension 0) always survive.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        precondition(probs.iter().all(|p| p.is_finite() && (0.0..=1.0).contains(p)), || {
            format!("survival probabilities must lie in [0,1], got {probs:?}")
        })?;
        Ok(ProbabilityVector { probs })
    }

    /// The identity thinning of the given length (all probabilities 1).
    pub fn ones(len: usize) -> Self {
        ProbabilityVector { probs: vec![1.0; len] }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Survival probability for faces of dimension `dim` (1-indexed).
    pub fn p(&self, dim: usize) -> f64 {
        self.probs[dim - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }
}

/// An immutable simplicial complex truncated at dimension `k_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    n: usize,
    dims: Vec<FaceSet>,
}

impl SimplicialComplex {
    /// Complex with `n` vertices and no higher faces.
    pub fn vertices_only(n: usize, k_max: usize) -> Self {
        let mut dims = Vec::with_capacity(k_max + 1);
        dims.push(FaceSet::from_sorted(1, (0..n as u32).collect()));
        for dim in 1..=k_max {
            dims.push(FaceSet::new(dim + 1));
        }
        SimplicialComplex { n, dims }
    }

    pub(crate) fn from_parts(n: usize, dims: Vec<FaceSet>) -> Self {
        let c = SimplicialComplex { n, dims };
        debug_assert!(c.validate().is_ok());
        c
    }

    /// Builds from an explicit face list, validating every invariant:
    /// strictly increasing tuples, vertex ids below `n`, dimensions at most
    /// `k_max`, and downward closure. Vertices need not be listed; all `n`
    /// are always present.
    pub fn from_faces(n: usize, k_max: usize, faces: &[Vec<u32>]) -> Result<Self> {
        precondition(n <= u32::MAX as usize, || "vertex count exceeds u32 range".into())?;
        let mut per_dim: Vec<Vec<Vec<u32>>> = vec![Vec::new(); k_max + 1];
        for f in faces {
            precondition(!f.is_empty(), || "empty face tuple".into())?;
            precondition(f.windows(2).all(|w| w[0] < w[1]), || {
                format!("face {f:?} is not strictly increasing")
            })?;
            precondition(f.iter().all(|&v| (v as usize) < n), || {
                format!("face {f:?} references a vertex outside 0..{n}")
            })?;
            let dim = f.len() - 1;
            precondition(dim <= k_max, || {
                format!("face {f:?} has dimension {dim} above k_max {k_max}")
            })?;
            if dim >= 1 {
                per_dim[dim].push(f.clone());
            }
        }
        let mut dims = Vec::with_capacity(k_max + 1);
        dims.push(FaceSet::from_sorted(1, (0..n as u32).collect()));
        for (dim, mut list) in per_dim.into_iter().enumerate().skip(1) {
            list.sort_unstable();
            list.dedup();
            let mut flat = Vec::with_capacity(list.len() * (dim + 1));
            for f in &list {
                flat.extend_from_slice(f);
            }
            dims.push(FaceSet::from_sorted(dim + 1, flat));
        }
        let c = SimplicialComplex { n, dims };
        c.validate()?;
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_max(&self) -> usize {
        self.dims.len() - 1
    }

    /// Faces of one dimension; `dim` must be at most `k_max`.
    pub fn faces(&self, dim: usize) -> &FaceSet {
        &self.dims[dim]
    }

    pub fn face_counts(&self) -> Vec<usize> {
        self.dims.iter().map(FaceSet::len).collect()
    }

    /// Largest dimension with at least one face; `None` for `n == 0`.
    pub fn max_dim(&self) -> Option<usize> {
        (0..=self.k_max()).rev().find(|&d| !self.dims[d].is_empty())
    }

    pub fn contains_face(&self, face: &[u32]) -> bool {
        let dim = face.len().wrapping_sub(1);
        dim <= self.k_max() && self.dims[dim].contains(face)
    }

    /// Full structural check: widths, sortedness, id bounds, vertex
    /// completeness, downward closure.
    pub fn validate(&self) -> Result<()> {
        precondition(!self.dims.is_empty(), || "no dimension slots".into())?;
        for (dim, fs) in self.dims.iter().enumerate() {
            precondition(fs.width == dim + 1, || {
                format!("dimension {dim} stores width {} tuples", fs.width)
            })?;
            precondition(fs.data.len() % fs.width == 0, || "ragged face data".into())?;
            let mut prev: Option<&[u32]> = None;
            for f in fs.iter() {
                precondition(f.windows(2).all(|w| w[0] < w[1]), || {
                    format!("face {f:?} is not strictly increasing")
                })?;
                precondition(f.iter().all(|&v| (v as usize) < self.n), || {
                    format!("face {f:?} out of vertex range")
                })?;
                if let Some(p) = prev {
                    precondition(p < f, || format!("faces out of order near {f:?}"))?;
                }
                prev = Some(f);
            }
        }
        precondition(self.dims[0].len() == self.n, || {
            format!("expected all {} vertices present, found {}", self.n, self.dims[0].len())
        })?;
        let mut facet = Vec::new();
        for dim in 1..=self.k_max() {
            for f in self.dims[dim].iter() {
                for skip in 0..f.len() {
                    facet.clear();
                    facet.extend(f.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
                    precondition(self.dims[dim - 1].contains(&facet), || {
                        format!("face {f:?} is missing facet {facet:?}")
                    })?;
                }
            }
        }
        Ok(())
    }

    /// True iff every face of `self` is a face of `other`.
    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        if self.n != other.n {
            return false;
        }
        for dim in 1..=self.k_max() {
            if dim > other.k_max() {
                if !self.dims[dim].is_empty() {
                    return false;
                }
                continue;
            }
            for f in self.dims[dim].iter() {
                if !other.dims[dim].contains(f) {
                    return false;
                }
            }
        }
        true
    }

    /// The full simplex on `m + 1` vertices (all subsets are faces).
    pub fn full_simplex(m: usize) -> Self {
        let faces = all_subsets(m + 1, m + 1);
        Self::from_faces(m + 1, m, &faces).expect("full simplex is valid")
    }

    /// The boundary of the `m`-simplex: all proper subsets of `m + 1`
    /// vertices. Triangulates the (m-1)-sphere; stored with `k_max = m` so
    /// the absence of the top face is visible.
    pub fn simplex_boundary(m: usize) -> Self {
        let faces = all_subsets(m + 1, m);
        Self::from_faces(m + 1, m, &faces).expect("simplex boundary is valid")
    }

    /// The boundary complex of the (k+1)-dimensional cross-polytope: vertices
    /// are k+1 antipodal pairs `{2i, 2i+1}`, faces are the tuples with at
    /// most one vertex from each pair. Triangulates the k-sphere; stored with
    /// `k_max = k + 1`.
    pub fn cross_polytope(k: usize) -> Self {
        let pairs = k + 1;
        let mut faces: Vec<Vec<u32>> = Vec::new();
        // Choose a subset of pairs and one sign per chosen pair.
        let pair_sets = all_subsets(pairs, pairs);
        for ps in &pair_sets {
            let take = ps.len();
            for signs in 0..(1u32 << take) {
                let face: Vec<u32> = ps
                    .iter()
                    .enumerate()
                    .map(|(j, &pair)| 2 * pair + ((signs >> j) & 1))
                    .collect();
                faces.push(face);
            }
        }
        Self::from_faces(2 * pairs, k + 1, &faces).expect("cross-polytope is valid")
    }
}

/// All non-empty subsets of `0..n` with at most `max_size` elements, as
/// strictly increasing tuples.
fn all_subsets(n: usize, max_size: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::new();
    fn rec(n: usize, max_size: usize, start: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        for v in start..n {
            cur.push(v as u32);
            out.push(cur.clone());
            if cur.len() < max_size {
                rec(n, max_size, v + 1, cur, out);
            }
            cur.pop();
        }
    }
    if max_size > 0 {
        rec(n, max_size, 0, &mut cur, &mut out);
    }
    out
}

fn intersect_into(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    let mut i = 0;
    let mut j = 0;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

/// Clique enumeration shared by the Rips and Cech builders. `keep` decides
/// whether a candidate face (dimension >= 2) enters the complex; rejecting a
/// face prunes its whole subtree, which is sound for superset-monotone
/// predicates.
fn enumerate_cliques(
    graph: &GeometricGraph,
    k_max: usize,
    dims: &mut [FaceSet],
    keep: &mut dyn FnMut(&[u32]) -> bool,
) {
    let n = graph.n();
    if k_max == 0 || n == 0 {
        return;
    }
    let mut face: Vec<u32> = Vec::with_capacity(k_max + 1);
    let mut scratch: Vec<Vec<u32>> = vec![Vec::new(); k_max];

    fn extend(
        graph: &GeometricGraph,
        k_max: usize,
        face: &mut Vec<u32>,
        scratch: &mut [Vec<u32>],
        dims: &mut [FaceSet],
        keep: &mut dyn FnMut(&[u32]) -> bool,
    ) {
        let (cur, rest) = scratch.split_at_mut(1);
        for idx in 0..cur[0].len() {
            let u = cur[0][idx];
            face.push(u);
            let dim = face.len() - 1;
            let accepted = dim < 2 || keep(face);
            if accepted {
                dims[dim].push(face);
                if dim < k_max && !rest.is_empty() {
                    rest[0].clear();
                    let nb = graph.neighbors(u as usize);
                    let from = nb.partition_point(|&w| w <= u);
                    intersect_into(&cur[0][idx + 1..], &nb[from..], &mut rest[0]);
                    if !rest[0].is_empty() {
                        extend(graph, k_max, face, rest, dims, keep);
                    }
                }
            }
            face.pop();
        }
    }

    for v in 0..n as u32 {
        face.clear();
        face.push(v);
        let nb = graph.neighbors(v as usize);
        let from = nb.partition_point(|&w| w <= v);
        scratch[0].clear();
        scratch[0].extend_from_slice(&nb[from..]);
        if !scratch[0].is_empty() {
            extend(graph, k_max, &mut face, &mut scratch, dims, keep);
        }
    }
}

/// Rips complex of the geometric graph: all cliques on at most `k_max + 1`
/// vertices.
pub fn build_rips(graph: &GeometricGraph, k_max: usize) -> SimplicialComplex {
    let n = graph.n();
    let mut dims: Vec<FaceSet> = (0..=k_max).map(|d| FaceSet::new(d + 1)).collect();
    dims[0] = FaceSet::from_sorted(1, (0..n as u32).collect());
    enumerate_cliques(graph, k_max, &mut dims, &mut |_| true);
    SimplicialComplex::from_parts(n, dims)
}

/// Cech complex at scale `r`: a tuple is a face iff its smallest enclosing
/// ball has radius at most `r/2` (ties resolved inclusively with a 1e-12
/// absolute tolerance). Always a subcomplex of the Rips complex at equal `r`.
pub fn build_cech(cloud: &PointCloud, r: f64, k_max: usize) -> Result<SimplicialComplex> {
    let graph = crate::geometry::build_graph(cloud, r)?;
    let n = cloud.len();
    let mut dims: Vec<FaceSet> = (0..=k_max).map(|d| FaceSet::new(d + 1)).collect();
    dims[0] = FaceSet::from_sorted(1, (0..n as u32).collect());
    let threshold = r / 2.0 + CECH_TIE_TOLERANCE;
    let mut pts: Vec<&[f64]> = Vec::with_capacity(k_max + 1);
    enumerate_cliques(&graph, k_max, &mut dims, &mut |face| {
        pts.clear();
        pts.extend(face.iter().map(|&v| cloud.point(v as usize)));
        let rad = min_enclosing_ball_radius(&pts).expect("non-empty face");
        rad <= threshold
    });
    Ok(SimplicialComplex::from_parts(n, dims))
}

/// Hierarchical thinning. Vertices always survive; a face of dimension
/// `i >= 1` survives iff all of its facets survived and its keyed uniform
/// draw is below `p_i`. Each face's draw depends only on (seed, dimension,
/// vertex tuple), so the outcome is independent of enumeration order and
/// monotone under coupled probability increases.
pub fn thin(
    complex: &SimplicialComplex,
    rho: &ProbabilityVector,
    seed: u64,
) -> Result<SimplicialComplex> {
    let k_max = complex.k_max();
    precondition(rho.len() >= k_max, || {
        format!("need survival probabilities up to dimension {k_max}, got {}", rho.len())
    })?;
    let mut alive: Vec<Vec<bool>> = Vec::with_capacity(k_max + 1);
    alive.push(vec![true; complex.n()]);
    let mut facet = Vec::new();
    for dim in 1..=k_max {
        let p = rho.p(dim);
        let fs = complex.faces(dim);
        let below = complex.faces(dim - 1);
        let mut flags = vec![false; fs.len()];
        for (idx, f) in fs.iter().enumerate() {
            let mut boundary_ok = true;
            for skip in 0..f.len() {
                facet.clear();
                facet.extend(f.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
                let pos = below.position(&facet).expect("downward closure");
                if !alive[dim - 1][pos] {
                    boundary_ok = false;
                    break;
                }
            }
            flags[idx] = boundary_ok && face_uniform(seed, dim, f) < p;
        }
        alive.push(flags);
    }
    let mut dims = Vec::with_capacity(k_max + 1);
    dims.push(FaceSet::from_sorted(1, (0..complex.n() as u32).collect()));
    #[allow(clippy::needless_range_loop)] // dim selects both the face set and the flag row
    for dim in 1..=k_max {
        let fs = complex.faces(dim);
        let mut data = Vec::new();
        for (idx, f) in fs.iter().enumerate() {
            if alive[dim][idx] {
                data.extend_from_slice(f);
            }
        }
        dims.push(FaceSet::from_sorted(dim + 1, data));
    }
    Ok(SimplicialComplex::from_parts(complex.n(), dims))
}
