//! Monte Carlo experiment drivers.
//!
//! A [`TrialConfig`] describes one model instance: point process, domain,
//! radius, survival probabilities, complex model, and truncation dimension.
//! [`run_trial`] executes one end-to-end sample — cloud, graph, complex,
//! thinning, homology, census, gradient field — on a substream derived from
//! `(seed, trial_id)`, so trials may run in any order on any number of
//! workers with identical results.
//!
//! Every trial asserts the structural laws that must hold on each
//! realization: the component-census sandwich around each Betti number, the
//! critical-count upper bound, the Euler identities, and (for the ball
//! model) containment in the clique complex at the same radius. A violation
//! is reported as an invariant error, never silently ignored.
//!
//! On top of trials sit the estimators: sample means with three-sigma
//! confidence intervals, normalized pattern densities, the closed-form
//! survival factors they converge to, a conditional thinning check that is
//! exact at finite size, Monte Carlo evaluation of the limiting density
//! integral, and radius-scaling sweeps over a ladder of sizes.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::census::{self, census, CensusReport, MRule};
use crate::complex::{build_cech, build_rips, thin, ProbabilityVector, SimplicialComplex};
use crate::fmath;
use crate::geometry::{
    build_graph, min_enclosing_ball_radius, sample_binomial, sample_poisson, Domain, PointCloud,
};
use crate::homology::{betti, euler_characteristic};
use crate::morse::build_gradient_field;
use crate::rng::{derive, stream, STREAM_MC, STREAM_SWEEP, STREAM_TRIAL};
use crate::{binomial, precondition, Error, Result};

use rand::Rng;

/// The point process driving each trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Process {
    /// Exactly `n` independent uniform points.
    Binomial { n: usize },
    /// A Poisson number of points with the given mean.
    Poisson { lambda: f64 },
}

impl Process {
    /// Expected number of points; the size parameter used by normalizations.
    pub fn expected_points(&self) -> f64 {
        match *self {
            Process::Binomial { n } => n as f64,
            Process::Poisson { lambda } => lambda,
        }
    }
}

/// Which complex is built on the sampled cloud.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Rips,
    Cech,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Rips => "rips",
            Model::Cech => "cech",
        }
    }
}

/// Full description of one trial family.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub process: Process,
    pub domain: Domain,
    pub r: f64,
    pub rho: ProbabilityVector,
    pub model: Model,
    pub k_max: usize,
    pub census_m: MRule,
    pub seed: u64,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        precondition(self.r.is_finite() && self.r > 0.0, || {
            format!("radius must be positive and finite, got {}", self.r)
        })?;
        precondition(self.k_max >= 1, || "k_max must be at least 1".into())?;
        precondition(self.rho.len() >= self.k_max, || {
            format!(
                "need survival probabilities up to dimension {}, got {}",
                self.k_max,
                self.rho.len()
            )
        })?;
        if let Process::Poisson { lambda } = self.process {
            precondition(lambda.is_finite() && lambda > 0.0, || {
                format!("poisson intensity must be positive, got {lambda}")
            })?;
        }
        for k in 1..self.k_max {
            precondition(self.census_m.m_for(k) >= 1, || {
                "component size threshold must be at least 1".into()
            })?;
        }
        Ok(())
    }
}

/// Everything measured on one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    /// Number of sampled points (varies under the Poisson process).
    pub n_points: usize,
    /// Betti numbers of the thinned complex in dimensions `0..=k_max-1`.
    pub betti: Vec<u64>,
    pub census: CensusReport,
    /// Critical face counts `C_0..C_k_max` of the gradient field.
    pub critical: Vec<u64>,
    /// Face counts of the thinned complex.
    pub face_counts: Vec<usize>,
}

struct SampledTrial {
    cloud: PointCloud,
    unthinned: SimplicialComplex,
    thinned: SimplicialComplex,
    /// For the ball model: the clique complex and its thinning under the
    /// same draws, kept so the containment law can be asserted.
    rips_pair: Option<(SimplicialComplex, SimplicialComplex)>,
}

fn sample_trial(config: &TrialConfig, trial_id: u64) -> Result<SampledTrial> {
    let trial_seed = derive(config.seed, &[STREAM_TRIAL, trial_id]);
    let cloud = match config.process {
        Process::Binomial { n } => sample_binomial(&config.domain, n, trial_seed),
        Process::Poisson { lambda } => sample_poisson(&config.domain, lambda, trial_seed)?,
    };
    let graph = build_graph(&cloud, config.r)?;
    let (unthinned, rips_pair) = match config.model {
        Model::Rips => (build_rips(&graph, config.k_max), None),
        Model::Cech => {
            let cech = build_cech(&cloud, config.r, config.k_max)?;
            let rips = build_rips(&graph, config.k_max);
            let thinned_rips = thin(&rips, &config.rho, trial_seed)?;
            (cech, Some((rips, thinned_rips)))
        }
    };
    let thinned = thin(&unthinned, &config.rho, trial_seed)?;
    Ok(SampledTrial { cloud, unthinned, thinned, rips_pair })
}

fn invariant(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Invariant(msg()))
    }
}

/// Runs one fully assembled trial and asserts every per-realization law.
pub fn run_trial(config: &TrialConfig, trial_id: u64) -> Result<TrialOutcome> {
    config.validate()?;
    let t = sample_trial(config, trial_id)?;
    let k_max = config.k_max;

    if let Some((rips, thinned_rips)) = &t.rips_pair {
        invariant(t.unthinned.is_subcomplex_of(rips), || {
            format!("ball complex not contained in clique complex (trial {trial_id})")
        })?;
        invariant(t.thinned.is_subcomplex_of(thinned_rips), || {
            format!("thinned ball complex escaped the thinned clique complex (trial {trial_id})")
        })?;
    }

    let betti_vec = betti(&t.thinned, k_max - 1)?;
    let k_list: Vec<usize> = (1..k_max).collect();
    let report = census(&t.thinned, &k_list, config.census_m)?;

    for &k in &k_list {
        let lower = report.empty_simplex[&k];
        let f_large = match report.faces_in_large.get(&(k, k + 3)) {
            Some(&v) => v,
            None => census::count_faces_in_large_components(&t.thinned, k, k + 3)?,
        };
        let b = betti_vec[k];
        invariant(lower <= b && b <= lower + f_large, || {
            format!(
                "sandwich violated at k={k} (trial {trial_id}): {lower} <= beta={b} <= {}",
                lower + f_large
            )
        })?;
    }

    let field = build_gradient_field(&t.thinned, &t.cloud)?;
    let critical = field.critical_counts();
    for (k, &b) in betti_vec.iter().enumerate() {
        invariant(b <= critical[k], || {
            format!(
                "critical-count bound violated at k={k} (trial {trial_id}): beta={b} > C={}",
                critical[k]
            )
        })?;
    }

    let chi = euler_characteristic(&t.thinned);
    let alt_c: i64 = critical
        .iter()
        .enumerate()
        .map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum();
    invariant(alt_c == chi, || {
        format!("critical counts do not alternate to the Euler characteristic ({alt_c} vs {chi})")
    })?;
    let face_counts = t.thinned.face_counts();
    if face_counts[k_max] == 0 {
        let alt_b: i64 = betti_vec
            .iter()
            .enumerate()
            .map(|(i, &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum();
        invariant(alt_b == chi, || {
            format!("Betti numbers do not alternate to the Euler characteristic ({alt_b} vs {chi})")
        })?;
    }

    Ok(TrialOutcome {
        n_points: t.cloud.len(),
        betti: betti_vec,
        census: report,
        critical,
        face_counts,
    })
}

/// A named scalar read off a [`TrialOutcome`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    /// Betti number in the given dimension.
    Betti(usize),
    /// Indicator that the Betti number is nonzero.
    BettiNonzero(usize),
    /// Count of empty-simplex-boundary components in the given dimension.
    EmptySimplex(usize),
    /// Count of cross-polytope-boundary components.
    CrossPolytope(usize),
    /// `k`-faces in large components (threshold from the trial's census rule).
    FacesInLarge(usize),
    /// Critical face count of the gradient field.
    Critical(usize),
    /// Face count of the thinned complex in the given dimension.
    FaceCount(usize),
    /// Number of sampled points.
    PointCount,
}

impl Statistic {
    pub fn name(&self) -> String {
        match *self {
            Statistic::Betti(k) => format!("beta{k}"),
            Statistic::BettiNonzero(k) => format!("nonzero{k}"),
            Statistic::EmptySimplex(k) => format!("empty{k}"),
            Statistic::CrossPolytope(k) => format!("cross{k}"),
            Statistic::FacesInLarge(k) => format!("flarge{k}"),
            Statistic::Critical(k) => format!("crit{k}"),
            Statistic::FaceCount(dim) => format!("f{dim}"),
            Statistic::PointCount => "points".into(),
        }
    }

    pub fn extract(&self, outcome: &TrialOutcome) -> Result<f64> {
        let missing = || -> Error {
            Error::Precondition(format!("statistic {} not available in this outcome", self.name()))
        };
        Ok(match *self {
            Statistic::Betti(k) => *outcome.betti.get(k).ok_or_else(missing)? as f64,
            Statistic::BettiNonzero(k) => {
                (*outcome.betti.get(k).ok_or_else(missing)? > 0) as u8 as f64
            }
            Statistic::EmptySimplex(k) => {
                *outcome.census.empty_simplex.get(&k).ok_or_else(missing)? as f64
            }
            Statistic::CrossPolytope(k) => {
                *outcome.census.cross_polytope.get(&k).ok_or_else(missing)? as f64
            }
            Statistic::FacesInLarge(k) => {
                *outcome
                    .census
                    .faces_in_large
                    .iter()
                    .find(|((kk, _), _)| *kk == k)
                    .map(|(_, v)| v)
                    .ok_or_else(missing)? as f64
            }
            Statistic::Critical(k) => *outcome.critical.get(k).ok_or_else(missing)? as f64,
            Statistic::FaceCount(dim) => {
                *outcome.face_counts.get(dim).ok_or_else(missing)? as f64
            }
            Statistic::PointCount => outcome.n_points as f64,
        })
    }
}

/// Sample mean with variance and a three-sigma normal confidence halfwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorResult {
    pub statistic: String,
    pub trials: u64,
    pub mean: f64,
    pub variance: f64,
    pub ci_halfwidth: f64,
    pub seed: u64,
}

impl EstimatorResult {
    /// Aggregates materialized per-trial samples. The reduction is a fixed
    /// left-to-right pass, so results are identical no matter how the
    /// samples were produced.
    pub fn from_samples(statistic: String, samples: &[f64], seed: u64) -> Result<Self> {
        precondition(samples.len() >= 2, || {
            format!("need at least 2 samples, got {}", samples.len())
        })?;
        precondition(samples.iter().all(|x| x.is_finite()), || {
            "samples must be finite".into()
        })?;
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let variance = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        let ci_halfwidth = 3.0 * fmath::sqrt(variance / n);
        Ok(EstimatorResult {
            statistic,
            trials: samples.len() as u64,
            mean,
            variance,
            ci_halfwidth,
            seed,
        })
    }
}

/// Estimates one statistic over independent trial substreams.
pub fn estimate(
    statistic: Statistic,
    config: &TrialConfig,
    trials: u64,
) -> Result<EstimatorResult> {
    config.validate()?;
    precondition(trials >= 2, || format!("need at least 2 trials, got {trials}"))?;
    let mut samples = Vec::with_capacity(trials as usize);
    for trial_id in 0..trials {
        let outcome = run_trial(config, trial_id)?;
        samples.push(statistic.extract(&outcome)?);
    }
    EstimatorResult::from_samples(statistic.name(), &samples, config.seed)
}

/// Expected fraction of isolated full `(k+1)`-simplex components that thin
/// to exactly the empty-simplex boundary:
/// `(1 - p_{k+1}) * prod_{i=1..k} p_i^C(k+2, i+1)`.
pub fn predicted_thinning_factor(k: usize, rho: &ProbabilityVector) -> Result<f64> {
    precondition(k >= 1, || "pattern dimension must be at least 1".into())?;
    precondition(rho.len() > k, || {
        format!("need survival probabilities up to dimension {}, got {}", k + 1, rho.len())
    })?;
    let mut factor = 1.0 - rho.p(k + 1);
    for i in 1..=k {
        factor *= fmath::pow(rho.p(i), binomial(k + 2, i + 1) as f64);
    }
    Ok(factor)
}

/// The survival factor common to both bounds on the ball-model pattern
/// count: `prod_{i=1..k} p_i^C(k+2, i+1)`.
pub fn predicted_cech_pattern_factor(k: usize, rho: &ProbabilityVector) -> Result<f64> {
    precondition(k >= 1, || "pattern dimension must be at least 1".into())?;
    precondition(rho.len() >= k, || {
        format!("need survival probabilities up to dimension {k}, got {}", rho.len())
    })?;
    let mut factor = 1.0;
    for i in 1..=k {
        factor *= fmath::pow(rho.p(i), binomial(k + 2, i + 1) as f64);
    }
    Ok(factor)
}

/// Small geometric patterns whose counts admit a density limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKind {
    /// A single edge (two points within distance `r`).
    Edge,
    /// An induced two-edge path on three points.
    PathTwo,
    /// A triangle (three pairwise-close points).
    Triangle,
    /// An induced four-cycle (each point with exactly two neighbors).
    FourCycle,
    /// A connected component that is a complete graph on `k + 2` vertices.
    CliqueComponent(usize),
    /// A component equal to an empty-simplex boundary in the ball model.
    CechEmptyBoundary(usize),
}

impl PatternKind {
    /// Number of points in the pattern.
    pub fn order(&self) -> usize {
        match *self {
            PatternKind::Edge => 2,
            PatternKind::PathTwo | PatternKind::Triangle => 3,
            PatternKind::FourCycle => 4,
            PatternKind::CliqueComponent(k) | PatternKind::CechEmptyBoundary(k) => k + 2,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            PatternKind::Edge => "K2".into(),
            PatternKind::PathTwo => "path2".into(),
            PatternKind::Triangle => "K3".into(),
            PatternKind::FourCycle => "C4".into(),
            PatternKind::CliqueComponent(k) => format!("clique{}", k + 2),
            PatternKind::CechEmptyBoundary(k) => format!("emptyboundary{k}"),
        }
    }
}

/// Adjacency lists (sorted by id) of a complex's 1-skeleton.
fn skeleton_adjacency(complex: &SimplicialComplex) -> Vec<Vec<u32>> {
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); complex.n()];
    if complex.k_max() >= 1 {
        for e in complex.faces(1).iter() {
            adj[e[0] as usize].push(e[1]);
            adj[e[1] as usize].push(e[0]);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
    }
    adj
}

fn has_edge(adj: &[Vec<u32>], u: u32, v: u32) -> bool {
    adj[u as usize].binary_search(&v).is_ok()
}

fn triangle_count(complex: &SimplicialComplex, adj: &[Vec<u32>]) -> u64 {
    let mut count = 0u64;
    for e in complex.faces(1).iter() {
        let (u, v) = (e[0], e[1]);
        // Common neighbors above v: counts each triangle at its lowest edge.
        let a = &adj[u as usize];
        let b = &adj[v as usize];
        let (mut i, mut j) = (a.partition_point(|&x| x <= v), b.partition_point(|&x| x <= v));
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    count
}

fn induced_four_cycle_count(adj: &[Vec<u32>]) -> u64 {
    // Group wedges x-v-y by their end pair; an induced four-cycle is a pair
    // of non-adjacent middles over a non-adjacent end pair, seen once from
    // each of its two diagonals.
    let mut wedges: alloc::collections::BTreeMap<(u32, u32), Vec<u32>> =
        alloc::collections::BTreeMap::new();
    for (v, nb) in adj.iter().enumerate() {
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                let (x, y) = (nb[i], nb[j]);
                if !has_edge(adj, x, y) {
                    wedges.entry((x, y)).or_default().push(v as u32);
                }
            }
        }
    }
    let mut doubled = 0u64;
    for middles in wedges.values() {
        for i in 0..middles.len() {
            for j in i + 1..middles.len() {
                if !has_edge(adj, middles[i], middles[j]) {
                    doubled += 1;
                }
            }
        }
    }
    doubled / 2
}

fn clique_component_count(complex: &SimplicialComplex, size: usize) -> u64 {
    let parts = census::components(complex);
    let mut label = vec![u32::MAX; complex.n()];
    for (c, part) in parts.iter().enumerate() {
        for &v in part {
            label[v as usize] = c as u32;
        }
    }
    let mut edges = vec![0u64; parts.len()];
    if complex.k_max() >= 1 {
        for e in complex.faces(1).iter() {
            edges[label[e[0] as usize] as usize] += 1;
        }
    }
    let want = binomial(size, 2);
    parts
        .iter()
        .enumerate()
        .filter(|&(c, part)| part.len() == size && edges[c] == want)
        .count() as u64
}

/// Number of copies of the pattern in the (thinned) complex. Graph patterns
/// are counted as induced subgraphs of the 1-skeleton; component patterns as
/// whole components.
pub fn count_pattern(complex: &SimplicialComplex, pattern: PatternKind) -> Result<u64> {
    Ok(match pattern {
        PatternKind::Edge => complex.faces(1).len() as u64,
        PatternKind::PathTwo => {
            let adj = skeleton_adjacency(complex);
            let wedges: u64 = adj.iter().map(|nb| binomial(nb.len(), 2)).sum();
            wedges - 3 * triangle_count(complex, &adj)
        }
        PatternKind::Triangle => {
            let adj = skeleton_adjacency(complex);
            triangle_count(complex, &adj)
        }
        PatternKind::FourCycle => {
            let adj = skeleton_adjacency(complex);
            induced_four_cycle_count(&adj)
        }
        PatternKind::CliqueComponent(k) => {
            precondition(k >= 1, || "pattern dimension must be at least 1".into())?;
            clique_component_count(complex, k + 2)
        }
        PatternKind::CechEmptyBoundary(k) => census::count_empty_simplex_components(complex, k)?,
    })
}

/// How a raw pattern count is normalized into a density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityScaling {
    /// Divide by `n^order * r^(d*(order-1))`: converges to the density
    /// integral under radius scalings that keep the pattern rare.
    Subcritical,
    /// Divide by `n`: the per-point rate under constant-degree scaling.
    Critical,
}

fn density_normalization(
    pattern: PatternKind,
    scaling: DensityScaling,
    config: &TrialConfig,
) -> Result<f64> {
    if let PatternKind::CechEmptyBoundary(k) = pattern {
        precondition(config.model == Model::Cech, || {
            "the empty-boundary pattern is defined on the ball model".into()
        })?;
        precondition(k >= 1 && config.k_max > k, || {
            format!("pattern in dimension {k} needs k_max >= {}", k + 1)
        })?;
    }
    let n_eff = config.process.expected_points();
    let order = pattern.order();
    let denom = match scaling {
        DensityScaling::Subcritical => {
            fmath::pow(n_eff, order as f64)
                * fmath::pow(config.r, (config.domain.dim() * (order - 1)) as f64)
        }
        DensityScaling::Critical => n_eff,
    };
    precondition(denom.is_finite() && denom > 0.0, || {
        format!("degenerate normalization {denom}")
    })?;
    Ok(denom)
}

/// One trial's normalized pattern count; the per-sample unit that
/// [`normalized_pattern_density`] averages, exposed so callers can schedule
/// trials themselves.
pub fn pattern_density_sample(
    pattern: PatternKind,
    scaling: DensityScaling,
    config: &TrialConfig,
    trial_id: u64,
) -> Result<f64> {
    config.validate()?;
    let denom = density_normalization(pattern, scaling, config)?;
    let t = sample_trial(config, trial_id)?;
    let count = count_pattern(&t.thinned, pattern)?;
    Ok(count as f64 / denom)
}

/// Estimates the normalized pattern count over independent trials.
pub fn normalized_pattern_density(
    pattern: PatternKind,
    scaling: DensityScaling,
    config: &TrialConfig,
    trials: u64,
) -> Result<EstimatorResult> {
    config.validate()?;
    precondition(trials >= 2, || format!("need at least 2 trials, got {trials}"))?;
    density_normalization(pattern, scaling, config)?;
    let mut samples = Vec::with_capacity(trials as usize);
    for trial_id in 0..trials {
        samples.push(pattern_density_sample(pattern, scaling, config, trial_id)?);
    }
    EstimatorResult::from_samples(format!("density:{}", pattern.name()), &samples, config.seed)
}

/// Pattern indicator on explicit points at unit scale.
fn pattern_indicator(pattern: PatternKind, pts: &[Vec<f64>]) -> bool {
    let k = pts.len();
    let d2 = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
    };
    match pattern {
        PatternKind::CechEmptyBoundary(_) => {
            // Every facet fits a ball of radius 1/2; the whole set does not.
            let mut subset: Vec<&[f64]> = Vec::with_capacity(k);
            for skip in 0..k {
                subset.clear();
                subset.extend(
                    pts.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, p)| p.as_slice()),
                );
                match min_enclosing_ball_radius(&subset) {
                    Ok(rad) if rad <= 0.5 => {}
                    _ => return false,
                }
            }
            subset.clear();
            subset.extend(pts.iter().map(|p| p.as_slice()));
            matches!(min_enclosing_ball_radius(&subset), Ok(rad) if rad > 0.5)
        }
        _ => {
            let mut degree = [0u32; 8];
            let mut edges = 0u32;
            for i in 0..k {
                for j in i + 1..k {
                    if d2(&pts[i], &pts[j]) <= 1.0 {
                        degree[i] += 1;
                        degree[j] += 1;
                        edges += 1;
                    }
                }
            }
            match pattern {
                PatternKind::Edge => edges == 1,
                PatternKind::PathTwo => edges == 2,
                PatternKind::Triangle => edges == 3,
                PatternKind::FourCycle => degree[..k].iter().all(|&d| d == 2),
                PatternKind::CliqueComponent(_) => edges as u64 == binomial(k, 2),
                PatternKind::CechEmptyBoundary(_) => unreachable!(),
            }
        }
    }
}

/// Monte Carlo evaluation of the limiting density integral: one point is
/// pinned at the origin, the rest range over the box `[-k, k]^(d*(k-1))`
/// that contains the pattern's support; the density factor over the unit
/// cube is 1. Returns the estimate with `ci_halfwidth = 3 * standard error`.
pub fn mu_integral(
    pattern: PatternKind,
    d: usize,
    samples: u64,
    seed: u64,
) -> Result<EstimatorResult> {
    precondition(d >= 1, || "dimension must be at least 1".into())?;
    precondition(samples >= 2, || "need at least 2 samples".into())?;
    let k = pattern.order();
    precondition(k <= 4, || {
        format!("pattern order {k} too large for the integration preset (max 4)")
    })?;
    let side = 2.0 * k as f64;
    let free = d * (k - 1);
    let volume = fmath::pow(side, free as f64);
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    let scale = volume / factorial;

    let mut rng = stream(seed, &[STREAM_MC]);
    let mut pts: Vec<Vec<f64>> = vec![vec![0.0; d]; k];
    let mut hits = 0u64;
    for _ in 0..samples {
        for p in pts.iter_mut().skip(1) {
            for c in p.iter_mut() {
                *c = rng.random::<f64>() * side - side / 2.0;
            }
        }
        if pattern_indicator(pattern, &pts) {
            hits += 1;
        }
    }
    let n = samples as f64;
    let p_hat = hits as f64 / n;
    let mean = scale * p_hat;
    // Sample variance of the scaled Bernoulli values.
    let variance = scale * scale * p_hat * (1.0 - p_hat) * n / (n - 1.0);
    let se = fmath::sqrt(variance / n);
    Ok(EstimatorResult {
        statistic: format!("mu:{}:d{}", pattern.name(), d),
        trials: samples,
        mean,
        variance,
        ci_halfwidth: 3.0 * se,
        seed,
    })
}

/// Among components of the unthinned clique complex that are full
/// `(k+1)`-simplices on `k+2` vertices, measures the fraction whose thinned
/// image is exactly the empty-simplex boundary. This conditional identity is
/// exact at any finite size, unlike the unconditional pattern count, which
/// also receives fragments of larger components.
///
/// Fails with an insufficient-events error when fewer than 100 qualifying
/// components are observed across all trials. The returned `trials` field
/// counts qualifying components, not trials.
pub fn conditional_thinning_check(
    k: usize,
    rho: &ProbabilityVector,
    config: &TrialConfig,
    trials: u64,
) -> Result<EstimatorResult> {
    config.validate()?;
    precondition(config.model == Model::Rips, || {
        "the conditional thinning identity concerns the clique model".into()
    })?;
    precondition(k >= 1 && config.k_max > k, || {
        format!("check at k={k} needs k_max >= {}, got {}", k + 1, config.k_max)
    })?;
    precondition(rho.len() >= config.k_max, || {
        format!("need survival probabilities up to dimension {}", config.k_max)
    })?;
    let mut cfg = config.clone();
    cfg.rho = rho.clone();

    let mut events = 0u64;
    let mut successes = 0u64;
    let full_edges = binomial(k + 2, 2);
    for trial_id in 0..trials {
        let t = sample_trial(&cfg, trial_id)?;
        let parts = census::components(&t.unthinned);
        let mut label = vec![u32::MAX; t.unthinned.n()];
        let mut candidate = vec![false; parts.len()];
        for (c, part) in parts.iter().enumerate() {
            for &v in part {
                label[v as usize] = c as u32;
            }
        }
        let mut edge_counts = vec![0u64; parts.len()];
        for e in t.unthinned.faces(1).iter() {
            edge_counts[label[e[0] as usize] as usize] += 1;
        }
        for (c, part) in parts.iter().enumerate() {
            // A component of a clique complex with all pairs joined is the
            // full simplex on its vertex set.
            candidate[c] = part.len() == k + 2 && edge_counts[c] == full_edges;
        }
        if !candidate.iter().any(|&c| c) {
            continue;
        }
        // Face counts of the thinned complex inside each candidate.
        let mut thinned_counts = vec![vec![0u64; k + 2]; parts.len()];
        #[allow(clippy::needless_range_loop)] // dim selects both the face set and the slot
        for dim in 1..=k + 1 {
            for f in t.thinned.faces(dim).iter() {
                let c = label[f[0] as usize] as usize;
                if candidate[c] {
                    thinned_counts[c][dim] += 1;
                }
            }
        }
        for (c, counts) in thinned_counts.iter().enumerate() {
            if !candidate[c] {
                continue;
            }
            events += 1;
            let boundary = (1..=k).all(|i| counts[i] == binomial(k + 2, i + 1))
                && counts[k + 1] == 0;
            if boundary {
                successes += 1;
            }
        }
    }
    if events < 100 {
        return Err(Error::InsufficientEvents { observed: events, required: 100 });
    }
    let n = events as f64;
    let p_hat = successes as f64 / n;
    let variance = p_hat * (1.0 - p_hat) * n / (n - 1.0);
    Ok(EstimatorResult {
        statistic: format!("conditional-thinning:k{k}"),
        trials: events,
        mean: p_hat,
        variance,
        ci_halfwidth: 3.0 * fmath::sqrt(variance / n),
        seed: cfg.seed,
    })
}

/// Radius scaling rules for the sweep ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// `r = c * n^(-1/d - eps)`: patterns become rare.
    Subcritical { c: f64, eps: f64 },
    /// `r = (lambda / n)^(1/d)`: constant expected degree `W = lambda`.
    Critical { lambda: f64 },
    /// `r = c * n^(-1/d) * sqrt(ln n)`: slowly growing degree.
    Supercritical { c: f64 },
    /// `r = c * (ln n / n)^(1/d)`: the connectivity scaling.
    Connected { c: f64 },
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Subcritical { .. } => "subcritical",
            Regime::Critical { .. } => "critical",
            Regime::Supercritical { .. } => "supercritical",
            Regime::Connected { .. } => "connected",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Regime::Subcritical { c, eps } => c > 0.0 && c.is_finite() && eps > 0.0 && eps.is_finite(),
            Regime::Critical { lambda } => lambda > 0.0 && lambda.is_finite(),
            Regime::Supercritical { c } | Regime::Connected { c } => c > 0.0 && c.is_finite(),
        };
        precondition(ok, || format!("invalid scaling constants in {self:?}"))
    }

    /// The radius at ladder size `n` in dimension `d`. Scalings involving
    /// `ln n` need `n >= 2` to stay positive.
    pub fn radius(&self, n: usize, d: usize) -> Result<f64> {
        self.validate()?;
        precondition(d >= 1, || "dimension must be at least 1".into())?;
        let nf = n as f64;
        let r = match *self {
            Regime::Subcritical { c, eps } => {
                precondition(n >= 1, || "need n >= 1".into())?;
                c * fmath::pow(nf, -1.0 / d as f64 - eps)
            }
            Regime::Critical { lambda } => {
                precondition(n >= 1, || "need n >= 1".into())?;
                fmath::pow(lambda / nf, 1.0 / d as f64)
            }
            Regime::Supercritical { c } => {
                precondition(n >= 2, || "need n >= 2 for a logarithmic scaling".into())?;
                c * fmath::pow(nf, -1.0 / d as f64) * fmath::sqrt(fmath::ln(nf))
            }
            Regime::Connected { c } => {
                precondition(n >= 2, || "need n >= 2 for a logarithmic scaling".into())?;
                c * fmath::pow(fmath::ln(nf) / nf, 1.0 / d as f64)
            }
        };
        precondition(r.is_finite() && r > 0.0, || format!("degenerate radius {r}"))?;
        Ok(r)
    }
}

/// One aggregated sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub r: f64,
    /// `W = n * r^d`.
    pub w: f64,
    pub model: Model,
    pub k: usize,
    pub mean_beta: f64,
    pub ci_beta: f64,
    pub mean_pattern: f64,
    pub ci_pattern: f64,
    pub mean_flarge: f64,
    pub mean_crit: f64,
    pub p_nonzero: f64,
    pub trials: u64,
    pub seed: u64,
}

/// The per-point trial family of a sweep: the template resized to `n` with
/// the ladder radius and a point-specific seed.
pub fn point_config(template: &TrialConfig, n: usize, r: f64, point_seed: u64) -> TrialConfig {
    let mut cfg = template.clone();
    cfg.process = match template.process {
        Process::Binomial { .. } => Process::Binomial { n },
        Process::Poisson { .. } => Process::Poisson { lambda: n as f64 },
    };
    cfg.r = r;
    cfg.seed = point_seed;
    cfg
}

/// Seed for the `idx`-th sweep point, derived so points are independent of
/// each other and of execution order.
pub fn point_seed(template_seed: u64, idx: usize) -> u64 {
    derive(template_seed, &[STREAM_SWEEP, idx as u64])
}

/// Aggregates materialized trial outcomes (in trial order) into a row.
pub fn collect_row(
    cfg: &TrialConfig,
    k: usize,
    n: usize,
    outcomes: &[TrialOutcome],
) -> Result<SweepRow> {
    precondition(k >= 1 && k < cfg.k_max, || {
        format!("sweep at k={k} needs k_max >= {}, got {}", k + 1, cfg.k_max)
    })?;
    let pull = |stat: Statistic| -> Result<Vec<f64>> {
        outcomes.iter().map(|o| stat.extract(o)).collect()
    };
    let beta = EstimatorResult::from_samples("beta".into(), &pull(Statistic::Betti(k))?, cfg.seed)?;
    let pattern =
        EstimatorResult::from_samples("pattern".into(), &pull(Statistic::EmptySimplex(k))?, cfg.seed)?;
    let flarge =
        EstimatorResult::from_samples("flarge".into(), &pull(Statistic::FacesInLarge(k))?, cfg.seed)?;
    let crit =
        EstimatorResult::from_samples("crit".into(), &pull(Statistic::Critical(k))?, cfg.seed)?;
    let nonzero =
        EstimatorResult::from_samples("nonzero".into(), &pull(Statistic::BettiNonzero(k))?, cfg.seed)?;
    Ok(SweepRow {
        n,
        r: cfg.r,
        w: n as f64 * fmath::pow(cfg.r, cfg.domain.dim() as f64),
        model: cfg.model,
        k,
        mean_beta: beta.mean,
        ci_beta: beta.ci_halfwidth,
        mean_pattern: pattern.mean,
        ci_pattern: pattern.ci_halfwidth,
        mean_flarge: flarge.mean,
        mean_crit: crit.mean,
        p_nonzero: nonzero.mean,
        trials: outcomes.len() as u64,
        seed: cfg.seed,
    })
}

/// Runs the ladder sequentially: one row per size, in order.
pub fn sweep(
    regime: &Regime,
    n_values: &[usize],
    template: &TrialConfig,
    k: usize,
    trials: u64,
) -> Result<Vec<SweepRow>> {
    regime.validate()?;
    template.validate()?;
    precondition(!n_values.is_empty(), || "need at least one ladder size".into())?;
    precondition(trials >= 2, || format!("need at least 2 trials, got {trials}"))?;
    let mut rows = Vec::with_capacity(n_values.len());
    for (idx, &n) in n_values.iter().enumerate() {
        let r = regime.radius(n, template.domain.dim())?;
        let cfg = point_config(template, n, r, point_seed(template.seed, idx));
        let mut outcomes = Vec::with_capacity(trials as usize);
        for trial_id in 0..trials {
            outcomes.push(run_trial(&cfg, trial_id)?);
        }
        rows.push(collect_row(&cfg, k, n, &outcomes)?);
    }
    Ok(rows)
}
