//! Flat-key JSON run configuration.
//!
//! Every tunable of the command-line interface lives in one flat struct.
//! A `--config file.json` is parsed strictly (unknown keys are rejected);
//! explicit command-line flags override file values; anything still unset
//! falls back to a documented default at resolution time. The resolved
//! configuration is echoed as a single JSON line so a run can always be
//! reproduced from its log.

use serde::{Deserialize, Serialize};

use softplex_core::census::MRule;
use softplex_core::complex::ProbabilityVector;
use softplex_core::experiments::{
    DensityScaling, Model, PatternKind, Process, Regime, Statistic, TrialConfig,
};
use softplex_core::geometry::{Domain, DomainKind};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Complex model: "rips" or "cech".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// Point process: "binomial" or "poisson".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process: Option<String>,
    /// Number of points (binomial) or the ladder value a sweep resizes to.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Poisson intensity; defaults to `n` when the process is "poisson".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Ambient dimension.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Sampling domain: "cube" or "ball".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    /// Connection radius.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Survival probabilities, one per dimension starting at edges.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<f64>>,
    /// Analysis dimension for census patterns and sweeps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Truncation dimension of the complex; defaults to `k + 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    /// Large-component threshold rule: "rips", "cech", or an integer.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub census_m: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    /// Sweep regime: "subcritical", "critical", "supercritical", "connected".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<String>,
    /// Scaling constant for the non-critical regimes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Extra exponent of the subcritical regime.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Degree parameter of the critical regime.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime_lambda: Option<f64>,
    /// Ladder sizes for a sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_values: Option<Vec<u64>>,
    /// Statistic name for `estimate`, e.g. "beta1", "empty1", "f2".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statistic: Option<String>,
    /// Pattern name, e.g. "K2", "path2", "K3", "C4", "clique4",
    /// "emptyboundary1".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    /// Pattern-density normalization: "subcritical" or "critical".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaling: Option<String>,
    /// Monte Carlo sample count for `mu`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    /// Worker threads for trial-parallel commands.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

macro_rules! overlay_fields {
    ($base:ident, $over:ident; $($field:ident),* $(,)?) => {
        RunConfig {
            $($field: $over.$field.or($base.$field),)*
        }
    };
}

impl RunConfig {
    /// Strict parse of a flat-key JSON file.
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("bad config file: {e}")))
    }

    /// Field-wise overlay: values set in `over` win over `self`.
    pub fn overlaid_with(self, over: RunConfig) -> RunConfig {
        let base = self;
        overlay_fields!(base, over;
            model, process, n, lambda, d, domain, r, rho, k, k_max, census_m,
            seed, trials, regime, c, eps, regime_lambda, n_values, statistic,
            pattern, scaling, samples, threads,
        )
    }

    /// One-line JSON of the set fields, used as the effective-config echo.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serialization")
    }

    // ---- resolved accessors (defaults applied, strings parsed) ----

    pub fn model(&self) -> CliResult<Model> {
        match self.model.as_deref().unwrap_or("rips") {
            "rips" => Ok(Model::Rips),
            "cech" => Ok(Model::Cech),
            other => Err(CliError::Config(format!(
                "unknown model {other:?}; expected \"rips\" or \"cech\""
            ))),
        }
    }

    pub fn domain(&self) -> CliResult<Domain> {
        let kind = match self.domain.as_deref().unwrap_or("cube") {
            "cube" => DomainKind::UnitCube,
            "ball" => DomainKind::UnitBall,
            other => {
                return Err(CliError::Config(format!(
                    "unknown domain {other:?}; expected \"cube\" or \"ball\""
                )))
            }
        };
        Domain::new(kind, self.d()).map_err(CliError::from)
    }

    pub fn d(&self) -> usize {
        self.d.unwrap_or(2)
    }

    pub fn n(&self) -> usize {
        self.n.unwrap_or(200) as usize
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn trials(&self) -> u64 {
        self.trials.unwrap_or(100)
    }

    pub fn samples(&self) -> u64 {
        self.samples.unwrap_or(1_000_000)
    }

    pub fn threads(&self) -> usize {
        self.threads.unwrap_or(1).max(1)
    }

    pub fn k(&self) -> usize {
        self.k.unwrap_or(1)
    }

    pub fn k_max(&self) -> usize {
        self.k_max.unwrap_or(self.k() + 1)
    }

    pub fn process(&self) -> CliResult<Process> {
        match self.process.as_deref().unwrap_or("binomial") {
            "binomial" => Ok(Process::Binomial { n: self.n() }),
            "poisson" => Ok(Process::Poisson {
                lambda: self.lambda.unwrap_or(self.n() as f64),
            }),
            other => Err(CliError::Config(format!(
                "unknown process {other:?}; expected \"binomial\" or \"poisson\""
            ))),
        }
    }

    pub fn rho(&self) -> CliResult<ProbabilityVector> {
        let k_max = self.k_max();
        let probs = match &self.rho {
            Some(v) => v.clone(),
            None => vec![1.0; k_max],
        };
        ProbabilityVector::new(probs)
            .map_err(|e| CliError::Config(format!("invalid rho: {e}")))
    }

    pub fn census_m(&self) -> CliResult<MRule> {
        match self.census_m.as_deref() {
            None => Ok(match self.model()? {
                Model::Rips => MRule::Rips,
                Model::Cech => MRule::Cech,
            }),
            Some("rips") => Ok(MRule::Rips),
            Some("cech") => Ok(MRule::Cech),
            Some(word) => word.parse::<usize>().map(MRule::Custom).map_err(|_| {
                CliError::Config(format!(
                    "census_m must be \"rips\", \"cech\", or an integer, got {word:?}"
                ))
            }),
        }
    }

    pub fn r(&self) -> CliResult<f64> {
        // An explicit radius wins; otherwise a regime plus n determines it.
        if let Some(r) = self.r {
            return Ok(r);
        }
        if self.regime.is_some() {
            let regime = self.regime()?;
            return regime.radius(self.n(), self.d()).map_err(CliError::from);
        }
        Err(CliError::Config(
            "no radius: set \"r\" or a \"regime\" to derive it from".into(),
        ))
    }

    pub fn regime(&self) -> CliResult<Regime> {
        let name = self.regime.as_deref().ok_or_else(|| {
            CliError::Config("no regime: set \"regime\" for sweep commands".into())
        })?;
        let c = self.c.unwrap_or(1.0);
        let regime = match name {
            "subcritical" => Regime::Subcritical { c, eps: self.eps.unwrap_or(0.1) },
            "critical" => Regime::Critical { lambda: self.regime_lambda.unwrap_or(1.0) },
            "supercritical" => Regime::Supercritical { c },
            "connected" => Regime::Connected { c },
            other => {
                return Err(CliError::Config(format!(
                    "unknown regime {other:?}; expected subcritical, critical, supercritical, or connected"
                )))
            }
        };
        regime.validate().map_err(CliError::from)?;
        Ok(regime)
    }

    pub fn n_values(&self) -> CliResult<Vec<usize>> {
        let values = self
            .n_values
            .as_ref()
            .ok_or_else(|| CliError::Config("no ladder: set \"n_values\" (flag --n a,b,c)".into()))?;
        if values.is_empty() {
            return Err(CliError::Config("ladder must not be empty".into()));
        }
        Ok(values.iter().map(|&v| v as usize).collect())
    }

    pub fn statistic(&self) -> CliResult<Statistic> {
        let name = self.statistic.as_deref().ok_or_else(|| {
            CliError::Config("no statistic: set \"statistic\" (e.g. beta1)".into())
        })?;
        parse_statistic(name)
    }

    pub fn pattern(&self) -> CliResult<PatternKind> {
        let name = self
            .pattern
            .as_deref()
            .ok_or_else(|| CliError::Config("no pattern: set \"pattern\" (e.g. K2)".into()))?;
        parse_pattern(name)
    }

    pub fn scaling(&self) -> CliResult<DensityScaling> {
        match self.scaling.as_deref().unwrap_or("subcritical") {
            "subcritical" => Ok(DensityScaling::Subcritical),
            "critical" => Ok(DensityScaling::Critical),
            other => Err(CliError::Config(format!(
                "unknown scaling {other:?}; expected \"subcritical\" or \"critical\""
            ))),
        }
    }

    /// The fully resolved trial family for simulation commands.
    pub fn trial_config(&self) -> CliResult<TrialConfig> {
        let cfg = TrialConfig {
            process: self.process()?,
            domain: self.domain()?,
            r: self.r()?,
            rho: self.rho()?,
            model: self.model()?,
            k_max: self.k_max(),
            census_m: self.census_m()?,
            seed: self.seed(),
        };
        cfg.validate().map_err(CliError::from)?;
        Ok(cfg)
    }

    /// A copy with every field the simulation commands read filled in, for
    /// the reproducibility echo.
    pub fn resolved_for_echo(&self) -> CliResult<RunConfig> {
        let mut out = self.clone();
        out.model = Some(self.model()?.name().to_string());
        out.process = Some(
            match self.process()? {
                Process::Binomial { .. } => "binomial",
                Process::Poisson { .. } => "poisson",
            }
            .to_string(),
        );
        out.n = Some(self.n() as u64);
        if let Process::Poisson { lambda } = self.process()? {
            out.lambda = Some(lambda);
        }
        if let Ok(r) = self.r() {
            out.r = Some(r);
        }
        out.d = Some(self.d());
        out.domain = Some(
            match self.domain()?.kind() {
                DomainKind::UnitCube => "cube",
                DomainKind::UnitBall => "ball",
            }
            .to_string(),
        );
        out.rho = Some(self.rho()?.as_slice().to_vec());
        out.k = Some(self.k());
        out.k_max = Some(self.k_max());
        out.census_m = Some(match self.census_m()? {
            MRule::Rips => "rips".to_string(),
            MRule::Cech => "cech".to_string(),
            MRule::Custom(m) => m.to_string(),
        });
        out.seed = Some(self.seed());
        out.threads = Some(self.threads());
        Ok(out)
    }
}

/// Parses statistic names: `beta<k>`, `nonzero<k>`, `empty<k>`, `cross<k>`,
/// `flarge<k>`, `crit<k>`, `f<dim>`, `points`.
pub fn parse_statistic(name: &str) -> CliResult<Statistic> {
    if name == "points" {
        return Ok(Statistic::PointCount);
    }
    let split = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
    let (word, digits) = name.split_at(split);
    let index: usize = digits
        .parse()
        .map_err(|_| CliError::Config(format!("statistic {name:?} is missing its dimension")))?;
    match word {
        "beta" => Ok(Statistic::Betti(index)),
        "nonzero" => Ok(Statistic::BettiNonzero(index)),
        "empty" => Ok(Statistic::EmptySimplex(index)),
        "cross" => Ok(Statistic::CrossPolytope(index)),
        "flarge" => Ok(Statistic::FacesInLarge(index)),
        "crit" => Ok(Statistic::Critical(index)),
        "f" => Ok(Statistic::FaceCount(index)),
        _ => Err(CliError::Config(format!(
            "unknown statistic {name:?}; expected beta<k>, nonzero<k>, empty<k>, cross<k>, flarge<k>, crit<k>, f<dim>, or points"
        ))),
    }
}

/// Parses pattern names: `K2`, `path2`, `K3`, `C4`, `clique<order>`,
/// `emptyboundary<k>`.
pub fn parse_pattern(name: &str) -> CliResult<PatternKind> {
    match name {
        "K2" | "k2" | "edge" => return Ok(PatternKind::Edge),
        "path2" => return Ok(PatternKind::PathTwo),
        "K3" | "k3" | "triangle" => return Ok(PatternKind::Triangle),
        "C4" | "c4" => return Ok(PatternKind::FourCycle),
        _ => {}
    }
    if let Some(digits) = name.strip_prefix("clique") {
        let order: usize = digits
            .parse()
            .map_err(|_| CliError::Config(format!("malformed clique pattern {name:?}")))?;
        if order < 3 {
            return Err(CliError::Config(
                "clique pattern order must be at least 3".into(),
            ));
        }
        return Ok(PatternKind::CliqueComponent(order - 2));
    }
    if let Some(digits) = name.strip_prefix("emptyboundary") {
        let k: usize = digits
            .parse()
            .map_err(|_| CliError::Config(format!("malformed empty-boundary pattern {name:?}")))?;
        if k < 1 {
            return Err(CliError::Config("empty-boundary dimension must be >= 1".into()));
        }
        return Ok(PatternKind::CechEmptyBoundary(k));
    }
    Err(CliError::Config(format!(
        "unknown pattern {name:?}; expected K2, path2, K3, C4, clique<order>, or emptyboundary<k>"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_json(r#"{"n": 10, "bogus": 1}"#).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn overlay_prefers_flag_values() {
        let file = RunConfig::from_json(r#"{"n": 50, "seed": 3, "r": 0.1}"#).unwrap();
        let flags = RunConfig { n: Some(60), ..Default::default() };
        let merged = file.overlaid_with(flags);
        assert_eq!(merged.n, Some(60));
        assert_eq!(merged.seed, Some(3));
        assert_eq!(merged.r, Some(0.1));
    }

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig { r: Some(0.1), ..Default::default() };
        let tc = cfg.trial_config().unwrap();
        assert_eq!(tc.k_max, 2);
        assert_eq!(tc.rho.as_slice(), &[1.0, 1.0]);
        assert_eq!(tc.seed, 0);
        assert!(matches!(tc.process, Process::Binomial { n: 200 }));
    }

    #[test]
    fn regime_supplies_radius_when_r_absent() {
        let cfg = RunConfig {
            regime: Some("critical".into()),
            regime_lambda: Some(2.0),
            n: Some(200),
            ..Default::default()
        };
        let r = cfg.r().unwrap();
        assert!((r - (2.0f64 / 200.0).sqrt()).abs() < 1e-12);
        let none = RunConfig::default();
        assert!(none.r().is_err());
    }

    #[test]
    fn statistic_and_pattern_names_parse() {
        assert_eq!(parse_statistic("beta1").unwrap(), Statistic::Betti(1));
        assert_eq!(parse_statistic("f2").unwrap(), Statistic::FaceCount(2));
        assert_eq!(parse_statistic("points").unwrap(), Statistic::PointCount);
        assert_eq!(parse_statistic("flarge2").unwrap(), Statistic::FacesInLarge(2));
        assert!(parse_statistic("beta").is_err());
        assert!(parse_statistic("zeta1").is_err());

        assert_eq!(parse_pattern("K2").unwrap(), PatternKind::Edge);
        assert_eq!(parse_pattern("path2").unwrap(), PatternKind::PathTwo);
        assert_eq!(parse_pattern("clique4").unwrap(), PatternKind::CliqueComponent(2));
        assert_eq!(
            parse_pattern("emptyboundary2").unwrap(),
            PatternKind::CechEmptyBoundary(2)
        );
        assert!(parse_pattern("clique2").is_err());
        assert!(parse_pattern("blob").is_err());
    }

    #[test]
    fn echo_round_trips_through_strict_parse() {
        let cfg = RunConfig {
            r: Some(0.2),
            model: Some("cech".into()),
            rho: Some(vec![0.9, 0.5]),
            k: Some(1),
            ..Default::default()
        };
        let resolved = cfg.resolved_for_echo().unwrap();
        let echoed = resolved.echo();
        let back = RunConfig::from_json(&echoed).unwrap();
        assert_eq!(back, resolved);
    }
}
