//! Run configuration shared by every `tdq` subcommand.
//!
//! Every section is optional and defaults to the published two-interval
//! setup (Ω = 1.2, k = 1, m = 16, n = 15). Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::gates::FieldState;
use crate::oracle::{check_lambdas, FockConfig, DEFAULT_N_MAX, DEFAULT_STEPS, MIN_N_MAX};
use crate::search::{SearchGrid, DEFAULT_POLISH_TOL};
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub trajectory: TrajectoryConfig,
    pub search: SearchConfig,
    pub field: FieldConfig,
    pub coupling: CouplingConfig,
    pub oracle: OracleConfig,
    pub tradeoff: TradeoffConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectoryConfig {
    pub omega: f64,
    pub k: f64,
    pub m: u32,
    pub n: u32,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self { omega: 1.2, k: 1.0, m: 16, n: 15 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Resolution {
    Square(usize),
    Rect([usize; 2]),
}

impl Resolution {
    pub fn pair(&self) -> (usize, usize) {
        match *self {
            Resolution::Square(n) => (n, n),
            Resolution::Rect([a, b]) => (a, b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig {
    pub v_c_range: [f64; 2],
    #[serde(rename = "T_a_range")]
    pub t_a_range: [f64; 2],
    pub resolution: Resolution,
    pub polish_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            v_c_range: [0.4, 0.9],
            t_a_range: [0.0, 6.0],
            resolution: Resolution::Square(256),
            polish_tol: DEFAULT_POLISH_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    #[default]
    Vacuum,
    Coherent,
    Squeezed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct FieldConfig {
    pub kind: FieldKind,
    /// `[re, im]`.
    pub alpha: [f64; 2],
    pub r: f64,
    pub phi: f64,
}

impl FieldConfig {
    pub fn state(&self) -> Result<FieldState> {
        let s = match self.kind {
            FieldKind::Vacuum => FieldState::Vacuum,
            FieldKind::Coherent => FieldState::Coherent { alpha: Complex64::new(self.alpha[0], self.alpha[1]) },
            FieldKind::Squeezed => FieldState::Squeezed { r: self.r, phi: self.phi },
        };
        s.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CouplingConfig {
    pub lambda: f64,
    /// Spatial separation of the second detector.
    pub offset: f64,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self { lambda: 0.01, offset: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub n_max: usize,
    pub steps_per_segment: usize,
    pub lambdas: Vec<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { n_max: DEFAULT_N_MAX, steps_per_segment: DEFAULT_STEPS, lambdas: vec![0.02, 0.01, 0.005] }
    }
}

impl OracleConfig {
    pub fn fock(&self) -> FockConfig {
        FockConfig { n_max: self.n_max, steps_per_segment: self.steps_per_segment }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TradeoffConfig {
    /// Target negativity.
    pub n_star: f64,
}

impl Default for TradeoffConfig {
    fn default() -> Self {
        Self { n_star: 0.01 }
    }
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn grid(&self) -> SearchGrid {
        let t = &self.trajectory;
        SearchGrid {
            v_c_range: (self.search.v_c_range[0], self.search.v_c_range[1]),
            t_a_range: (self.search.t_a_range[0], self.search.t_a_range[1]),
            resolution: self.search.resolution.pair(),
            omega: t.omega,
            k: t.k,
            m: t.m,
            n: t.n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let t = &self.trajectory;
        if !(t.omega > 0.0 && t.k > 0.0 && t.m > 0 && t.n > 0) {
            return bad(format!("trajectory {t:?}"));
        }
        self.grid().validate().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.search.polish_tol > 0.0) {
            return bad("search.polish_tol must be positive".into());
        }
        self.field.state()?;
        if !(self.coupling.lambda > 0.0 && self.coupling.offset.is_finite()) {
            return bad(format!("coupling {:?}", self.coupling));
        }
        let o = &self.oracle;
        if o.n_max < MIN_N_MAX || o.steps_per_segment == 0 {
            return bad(format!("oracle n_max {} / steps {}", o.n_max, o.steps_per_segment));
        }
        check_lambdas(&o.lambdas).map_err(|e| Error::Config(format!("oracle.lambdas: {e}")))?;
        if !(self.tradeoff.n_star > 0.0) {
            return bad("tradeoff.n_star must be positive".into());
        }
        Ok(())
    }
}
