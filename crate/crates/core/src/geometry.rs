//! Point clouds in compact domains and their fixed-radius neighborhood graphs.
//!
//! Domains are the unit cube `[0,1]^d` and the unit ball `{ |x| <= 1 }`. Points
//! are sampled i.i.d. uniformly, either a fixed count (binomial process) or a
//! Poisson-distributed count (Poisson process with total intensity lambda).
//! The geometric graph joins two points iff their Euclidean distance is at
//! most `r`; neighbor search uses a uniform grid with cell side `r`, and an
//! all-pairs scan both as a fallback for tiny inputs and as a test oracle.

use alloc::vec;
use alloc::vec::Vec;

use alloc::format;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::fmath;
use crate::rng::derive;
use crate::{precondition, Error, Result};

/// Shape of the sampling domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    /// `[0, 1]^d`.
    UnitCube,
    /// Euclidean ball of radius 1 centered at the origin.
    UnitBall,
}

/// A compact convex sampling domain in dimension `d >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Domain {
    kind: DomainKind,
    d: usize,
}

impl Domain {
    pub fn new(kind: DomainKind, d: usize) -> Result<Self> {
        precondition(d >= 1, || format!("domain dimension must be >= 1, got {d}"))?;
        Ok(Domain { kind, d })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Lebesgue volume: 1 for the cube, pi^(d/2) / Gamma(d/2 + 1) for the ball.
    pub fn volume(&self) -> f64 {
        match self.kind {
            DomainKind::UnitCube => 1.0,
            DomainKind::UnitBall => {
                let hd = self.d as f64 / 2.0;
                fmath::pow(core::f64::consts::PI, hd) / fmath::tgamma(hd + 1.0)
            }
        }
    }

    /// Membership with a 1e-12 absolute slack so stored samples always pass.
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.d {
            return false;
        }
        match self.kind {
            DomainKind::UnitCube => x.iter().all(|&c| (-1e-12..=1.0 + 1e-12).contains(&c)),
            DomainKind::UnitBall => x.iter().map(|&c| c * c).sum::<f64>() <= 1.0 + 1e-12,
        }
    }
}

/// A finite set of points in `R^d`, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    d: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn from_coords(d: usize, coords: Vec<f64>) -> Result<Self> {
        precondition(d >= 1, || format!("point dimension must be >= 1, got {d}"))?;
        precondition(coords.len().is_multiple_of(d), || {
            format!("coordinate buffer length {} is not a multiple of d={d}", coords.len())
        })?;
        precondition(coords.iter().all(|c| c.is_finite()), || {
            "coordinates must be finite".into()
        })?;
        Ok(PointCloud { d, coords })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    /// Squared Euclidean norm of point `i` (used for Morse vertex ordering).
    pub fn norm_sq(&self, i: usize) -> f64 {
        self.point(i).iter().map(|&c| c * c).sum()
    }
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn sample_point_into(domain: &Domain, rng: &mut impl Rng, out: &mut Vec<f64>) {
    match domain.kind {
        DomainKind::UnitCube => {
            for _ in 0..domain.d {
                out.push(rng.random::<f64>());
            }
        }
        DomainKind::UnitBall => {
            // Gaussian direction plus a U^(1/d) radius is uniform in the ball
            // in every dimension (no rejection).
            let start = out.len();
            loop {
                out.truncate(start);
                let mut nsq = 0.0;
                for _ in 0..domain.d {
                    let g: f64 = rng.sample(StandardNormal);
                    nsq += g * g;
                    out.push(g);
                }
                if nsq > 0.0 {
                    let radius = fmath::pow(rng.random::<f64>(), 1.0 / domain.d as f64);
                    let scale = radius / fmath::sqrt(nsq);
                    for c in &mut out[start..] {
                        *c *= scale;
                    }
                    break;
                }
            }
        }
    }
}

/// `n` i.i.d. uniform points in the domain. Deterministic in `seed`.
pub fn sample_binomial(domain: &Domain, n: usize, seed: u64) -> PointCloud {
    let mut rng = crate::rng::stream(seed, &[crate::rng::STREAM_POINTS]);
    let mut coords = Vec::with_capacity(n * domain.d);
    for _ in 0..n {
        sample_point_into(domain, &mut rng, &mut coords);
    }
    PointCloud { d: domain.d, coords }
}

/// A Poisson process on the domain with total intensity `lambda`: the point
/// count is Poisson(lambda), then points are i.i.d. uniform.
pub fn sample_poisson(domain: &Domain, lambda: f64, seed: u64) -> Result<PointCloud> {
    precondition(lambda.is_finite() && lambda > 0.0, || {
        format!("poisson intensity must be positive and finite, got {lambda}")
    })?;
    let mut rng = crate::rng::stream(seed, &[crate::rng::STREAM_POINTS]);
    let pois = Poisson::new(lambda)
        .map_err(|_| Error::Precondition(format!("invalid poisson intensity {lambda}")))?;
    let n_f: f64 = pois.sample(&mut rng);
    let n = n_f as usize;
    let mut coords = Vec::with_capacity(n * domain.d);
    for _ in 0..n {
        sample_point_into(domain, &mut rng, &mut coords);
    }
    Ok(PointCloud { d: domain.d, coords })
}

/// Undirected graph joining points at Euclidean distance <= `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricGraph {
    n: usize,
    r: f64,
    /// Sorted neighbor lists, symmetric, no self-loops.
    adj: Vec<Vec<u32>>,
    /// Sorted list of edges (u, v) with u < v.
    edges: Vec<(u32, u32)>,
}

impl GeometricGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    fn from_edges(n: usize, r: f64, mut edges: Vec<(u32, u32)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        GeometricGraph { n, r, adj, edges }
    }
}

fn check_radius(r: f64) -> Result<()> {
    precondition(r.is_finite() && r > 0.0, || {
        format!("graph radius must be positive and finite, got {r}")
    })
}

/// All-pairs reference construction; also the oracle for the grid path.
pub fn build_graph_all_pairs(cloud: &PointCloud, r: f64) -> Result<GeometricGraph> {
    check_radius(r)?;
    let n = cloud.len();
    let r2 = r * r;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if dist_sq(cloud.point(i), cloud.point(j)) <= r2 {
                edges.push((i as u32, j as u32));
            }
        }
    }
    Ok(GeometricGraph::from_edges(n, r, edges))
}

/// Hash key of a grid cell. Collisions only merge candidate buckets; the
/// exact distance test keeps the result correct regardless.
fn cell_key(cell: &[i64]) -> u64 {
    let mut tags = [0u64; 8];
    for (t, &c) in tags.iter_mut().zip(cell) {
        *t = c as u64;
    }
    derive(0x4752_4944, &tags[..cell.len()])
}

/// Geometric graph via a uniform grid with cell side `r`.
///
/// Candidates for each point are drawn from its own and all adjacent cells,
/// then filtered by the exact distance predicate, so the output is identical
/// to the all-pairs construction.
pub fn build_graph(cloud: &PointCloud, r: f64) -> Result<GeometricGraph> {
    check_radius(r)?;
    let n = cloud.len();
    if n < 64 {
        return build_graph_all_pairs(cloud, r);
    }
    let d = cloud.dim();
    let r2 = r * r;

    let cell_of = |p: &[f64], buf: &mut Vec<i64>| {
        buf.clear();
        for &c in p {
            buf.push(fmath::floor(c / r) as i64);
        }
    };

    // Bucket points by hashed cell key.
    let mut keyed: Vec<(u64, u32)> = Vec::with_capacity(n);
    let mut cell = Vec::with_capacity(d);
    for i in 0..n {
        cell_of(cloud.point(i), &mut cell);
        keyed.push((cell_key(&cell), i as u32));
    }
    keyed.sort_unstable();

    let bucket = |key: u64| -> &[(u64, u32)] {
        let lo = keyed.partition_point(|&(k, _)| k < key);
        let hi = keyed.partition_point(|&(k, _)| k <= key);
        &keyed[lo..hi]
    };

    let mut edges = Vec::new();
    let mut neighbor_cell = vec![0i64; d];
    let mut offset = vec![-1i64; d];
    for i in 0..n {
        let p = cloud.point(i);
        cell_of(p, &mut cell);
        // Walk all 3^d offset combinations with an odometer.
        offset.fill(-1);
        'cells: loop {
            for k in 0..d {
                neighbor_cell[k] = cell[k] + offset[k];
            }
            for &(_, j) in bucket(cell_key(&neighbor_cell)) {
                if j as usize > i && dist_sq(p, cloud.point(j as usize)) <= r2 {
                    edges.push((i as u32, j));
                }
            }
            let mut k = 0;
            loop {
                if k == d {
                    break 'cells;
                }
                offset[k] += 1;
                if offset[k] <= 1 {
                    break;
                }
                offset[k] = -1;
                k += 1;
            }
        }
    }
    Ok(GeometricGraph::from_edges(n, r, edges))
}

/// Radius of the smallest enclosing ball of a non-empty point set, by Welzl's
/// recursion with support-set circumball solves. Intended for the small sets
/// (faces of up to a handful of vertices) tested against the Cech predicate.
pub fn min_enclosing_ball_radius(points: &[&[f64]]) -> Result<f64> {
    precondition(!points.is_empty(), || "smallest enclosing ball of an empty set".into())?;
    let d = points[0].len();
    precondition(d >= 1, || "points must have dimension >= 1".into())?;
    precondition(points.iter().all(|p| p.len() == d), || {
        "all points must share one dimension".into()
    })?;
    let mut support: Vec<&[f64]> = Vec::with_capacity(d + 1);
    let ball = welzl(d, points, points.len(), &mut support);
    Ok(fmath::sqrt(ball.r2.max(0.0)))
}

struct Ball {
    center: Vec<f64>,
    r2: f64,
}

impl Ball {
    fn contains(&self, p: &[f64]) -> bool {
        // Relative slack 1e-9 on the squared radius, absolute guard for r ~ 0.
        dist_sq(p, &self.center) <= self.r2 * (1.0 + 1e-9) + 1e-24
    }
}

fn welzl<'a>(d: usize, pts: &[&'a [f64]], m: usize, support: &mut Vec<&'a [f64]>) -> Ball {
    if m == 0 || support.len() == d + 1 {
        return ball_of_support(d, support);
    }
    let b = welzl(d, pts, m - 1, support);
    let p = pts[m - 1];
    if b.contains(p) {
        return b;
    }
    support.push(p);
    let b = welzl(d, pts, m - 1, support);
    support.pop();
    b
}

/// Ball with every support point on its boundary (circumball within the
/// support's affine hull). Degenerate systems fall back to a bounding ball of
/// the support; random inputs never hit that path.
fn ball_of_support(d: usize, support: &[&[f64]]) -> Ball {
    match support {
        [] => Ball { center: vec![0.0; d], r2: -1.0 },
        [p] => Ball { center: p.to_vec(), r2: 0.0 },
        [q0, rest @ ..] => {
            let m = rest.len();
            // Solve 2 (v_i . v_j) lambda_i = |v_j|^2 with v_i = q_i - q0.
            let mut mat = vec![vec![0.0; m + 1]; m];
            for (j, qj) in rest.iter().enumerate() {
                let vj: Vec<f64> = qj.iter().zip(*q0).map(|(a, b)| a - b).collect();
                for (i, qi) in rest.iter().enumerate() {
                    let vi = qi.iter().zip(*q0).map(|(a, b)| a - b);
                    mat[j][i] = 2.0 * vi.zip(&vj).map(|(a, b)| a * b).sum::<f64>();
                }
                mat[j][m] = vj.iter().map(|c| c * c).sum();
            }
            match solve_in_place(&mut mat) {
                Some(lambda) => {
                    let mut center = q0.to_vec();
                    for (i, qi) in rest.iter().enumerate() {
                        for (k, c) in center.iter_mut().enumerate() {
                            *c += lambda[i] * (qi[k] - q0[k]);
                        }
                    }
                    let r2 = dist_sq(&center, q0);
                    Ball { center, r2 }
                }
                None => bounding_ball(d, support),
            }
        }
    }
}

fn bounding_ball(d: usize, pts: &[&[f64]]) -> Ball {
    let mut center = vec![0.0; d];
    for p in pts {
        for (c, &x) in center.iter_mut().zip(*p) {
            *c += x;
        }
    }
    for c in &mut center {
        *c /= pts.len() as f64;
    }
    let r2 = pts.iter().map(|p| dist_sq(p, &center)).fold(0.0, f64::max);
    Ball { center, r2 }
}

/// Gaussian elimination with partial pivoting on an augmented m x (m+1)
/// system; `None` when numerically singular.
fn solve_in_place(mat: &mut [Vec<f64>]) -> Option<Vec<f64>> {
    let m = mat.len();
    let mut scale = 0.0f64;
    for row in mat.iter() {
        for &x in &row[..m] {
            scale = scale.max(x.abs());
        }
    }
    if scale == 0.0 {
        return None;
    }
    for col in 0..m {
        let pivot_row = (col..m).max_by(|&a, &b| {
            mat[a][col].abs().partial_cmp(&mat[b][col].abs()).unwrap()
        })?;
        if mat[pivot_row][col].abs() < 1e-12 * scale {
            return None;
        }
        mat.swap(col, pivot_row);
        for row in (col + 1)..m {
            let f = mat[row][col] / mat[col][col];
            #[allow(clippy::needless_range_loop)] // reads one row while writing another
            for k in col..=m {
                mat[row][k] -= f * mat[col][k];
            }
        }
    }
    let mut x = vec![0.0; m];
    for col in (0..m).rev() {
        let mut acc = mat[col][m];
        for k in (col + 1)..m {
            acc -= mat[col][k] * x[k];
        }
        x[col] = acc / mat[col][col];
    }
    Some(x)
}
