//! Textual formats: a face-list format for complexes, JSON for point clouds,
//! census reports and estimates, and CSV for sweep ladders. Every writer is
//! deterministic byte-for-byte given equal inputs.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use softplex_core::census::CensusReport;
use softplex_core::complex::SimplicialComplex;
use softplex_core::experiments::{EstimatorResult, SweepRow};
use softplex_core::geometry::PointCloud;

use crate::{CliError, CliResult};

/// Serializes a complex as a face list:
///
/// ```text
/// # comment and blank lines are skipped
/// <n> <k_max>
/// <v0> <v1> [...]      one face of dimension len-1 per line, dims >= 1
/// ```
///
/// Vertices are implicit (all of `0..n` are present); faces appear by
/// ascending dimension in the complex's canonical order.
pub fn write_complex(complex: &SimplicialComplex) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", complex.n(), complex.k_max()));
    for dim in 1..=complex.k_max() {
        for face in complex.faces(dim).iter() {
            let words: Vec<String> = face.iter().map(|v| v.to_string()).collect();
            out.push_str(&words.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Parses the face-list format; any malformation is a configuration error.
pub fn read_complex(text: &str) -> CliResult<SimplicialComplex> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| {
        CliError::Config("complex file is empty; expected a '<n> <k_max>' header".into())
    })?;
    let mut parts = header.split_whitespace();
    let parse = |w: Option<&str>, what: &str| -> CliResult<usize> {
        w.ok_or_else(|| CliError::Config(format!("header is missing {what}")))?
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("header has a malformed {what}")))
    };
    let n = parse(parts.next(), "vertex count")?;
    let k_max = parse(parts.next(), "k_max")?;
    if parts.next().is_some() {
        return Err(CliError::Config("header has trailing tokens".into()));
    }
    let mut faces = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let face: Result<Vec<u32>, _> = line.split_whitespace().map(str::parse::<u32>).collect();
        let face = face.map_err(|_| {
            CliError::Config(format!("malformed face on data line {}", lineno + 1))
        })?;
        if face.len() < 2 {
            return Err(CliError::Config(format!(
                "face on data line {} has fewer than 2 vertices",
                lineno + 1
            )));
        }
        faces.push(face);
    }
    SimplicialComplex::from_faces(n, k_max, &faces)
        .map_err(|e| CliError::Config(format!("invalid complex: {e}")))
}

#[derive(Debug, Serialize, Deserialize)]
struct CloudFile {
    d: usize,
    points: Vec<Vec<f64>>,
}

/// Point cloud as JSON: `{"d": 2, "points": [[x, y], ...]}`.
pub fn write_cloud(cloud: &PointCloud) -> String {
    let file = CloudFile {
        d: cloud.dim(),
        points: cloud.iter().map(|p| p.to_vec()).collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("cloud serialization");
    s.push('\n');
    s
}

pub fn read_cloud(text: &str) -> CliResult<PointCloud> {
    let file: CloudFile = serde_json::from_str(text)
        .map_err(|e| CliError::Config(format!("malformed cloud JSON: {e}")))?;
    let mut coords = Vec::with_capacity(file.points.len() * file.d);
    for (i, p) in file.points.iter().enumerate() {
        if p.len() != file.d {
            return Err(CliError::Config(format!(
                "point {i} has {} coordinates, expected {}",
                p.len(),
                file.d
            )));
        }
        coords.extend_from_slice(p);
    }
    PointCloud::from_coords(file.d, coords)
        .map_err(|e| CliError::Config(format!("invalid cloud: {e}")))
}

/// Census report as JSON with string keys; the faces-in-large table is keyed
/// `"k,m"`.
pub fn census_json(report: &CensusReport) -> Value {
    let mut sizes = Map::new();
    for (size, count) in &report.component_sizes {
        sizes.insert(size.to_string(), json!(count));
    }
    let mut empty = Map::new();
    for (k, count) in &report.empty_simplex {
        empty.insert(k.to_string(), json!(count));
    }
    let mut cross = Map::new();
    for (k, count) in &report.cross_polytope {
        cross.insert(k.to_string(), json!(count));
    }
    let mut large = Map::new();
    for ((k, m), count) in &report.faces_in_large {
        large.insert(format!("{k},{m}"), json!(count));
    }
    json!({
        "component_sizes": sizes,
        "empty_simplex": empty,
        "cross_polytope": cross,
        "faces_in_large": large,
    })
}

/// Estimator result as JSON with its exact field names.
pub fn estimator_json(est: &EstimatorResult) -> Value {
    json!({
        "statistic": est.statistic,
        "trials": est.trials,
        "mean": est.mean,
        "variance": est.variance,
        "ci_halfwidth": est.ci_halfwidth,
        "seed": est.seed,
    })
}

/// Column order of the sweep CSV.
pub const SWEEP_HEADER: &str =
    "n,r,W,model,k,mean_beta,ci_beta,mean_pattern,ci_pattern,mean_flarge,mean_crit,p_nonzero,trials,seed";

/// Sweep rows as CSV. Floats print in Rust's shortest round-trip form, so
/// equal rows always produce equal bytes.
pub fn write_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.n,
            row.r,
            row.w,
            row.model.name(),
            row.k,
            row.mean_beta,
            row.ci_beta,
            row.mean_pattern,
            row.ci_pattern,
            row.mean_flarge,
            row.mean_crit,
            row.p_nonzero,
            row.trials,
            row.seed,
        ));
    }
    out
}
