use std::path::Path;

use anyhow::{bail, Context, Result};
use billiard_bvp::{
    table_force, AffineField, BoxDomain, ConstantField, EnumerationConfig, ForceField,
    OracleConfig, PotentialTable, SolverConfig, ZeroField,
};
use serde::{Deserialize, Serialize};

pub const TABLE_GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub domain: DomainSection,
    pub endpoints: EndpointSection,
    pub field: FieldSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub billiard: BilliardSection,
    #[serde(default)]
    pub oracle: OracleSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointSection {
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    #[serde(rename = "B")]
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    /// `zero`, `constant`, `table:gaussian-dimple` or `custom`.
    pub name: String,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    /// Constant force vector (`constant`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Vec<f64>>,
    /// Gravity (`table:*`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    /// Row-major matrix `M` of `f(x) = M x + offset` (`custom`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<f64>>,
    /// Overrides the field's own bound constant `m`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}

fn default_horizon() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    #[serde(rename = "N")]
    pub intervals: usize,
    pub tol_fp: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub anderson_depth: usize,
    pub m_schedule: Vec<u64>,
    pub tol_residual: f64,
    pub resolve_ramps: bool,
    pub verify_tol: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverConfig::<f64>::default();
        SolverSection {
            intervals: s.intervals,
            tol_fp: s.tol_fp,
            max_iter: s.max_iter,
            damping: s.damping,
            anderson_depth: s.anderson_depth,
            m_schedule: s.m_schedule,
            tol_residual: s.tol_residual,
            resolve_ramps: s.resolve_ramps,
            verify_tol: EnumerationConfig::<f64>::default().verify_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BilliardSection {
    /// Merge window for simultaneous crossings, in absolute time.
    pub merge_tol: f64,
}

impl Default for BilliardSection {
    fn default() -> Self {
        BilliardSection { merge_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    pub step_count: usize,
    pub event_tol: f64,
}

impl Default for OracleSection {
    fn default() -> Self {
        OracleSection {
            step_count: 8192,
            event_tol: 1e-12,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let config: Config = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    fn validate(&self) -> Result<()> {
        let n = self.domain.lower.len();
        if n == 0 {
            bail!("[domain] must have at least one axis");
        }
        for (name, v) in [
            ("domain.upper", &self.domain.upper),
            ("endpoints.A", &self.endpoints.a),
            ("endpoints.B", &self.endpoints.b),
        ] {
            if v.len() != n {
                bail!("{name} has {} entries, expected {n}", v.len());
            }
        }
        if !(self.field.horizon > 0.0) {
            bail!("field.horizon must be positive");
        }
        if !(self.billiard.merge_tol >= 0.0) {
            bail!("billiard.merge_tol must be non-negative");
        }
        if !(self.solver.verify_tol > 0.0) {
            bail!("solver.verify_tol must be positive");
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.domain.lower.len()
    }

    pub fn domain(&self) -> Result<BoxDomain<f64>> {
        Ok(BoxDomain::new(
            self.domain.lower.clone(),
            self.domain.upper.clone(),
        )?)
    }

    /// The configured field in original box coordinates.
    pub fn field(&self) -> Result<Box<dyn ForceField<f64>>> {
        let f = &self.field;
        let n = self.dim();
        let horizon = f.horizon;
        if let Some(b) = f.bound {
            if !(b >= 0.0) {
                bail!("field.bound must be non-negative");
            }
        }
        let field: Box<dyn ForceField<f64>> = match f.name.as_str() {
            "zero" => Box::new(ZeroField::new(n, horizon)),
            "constant" => {
                let value = f.value.clone().context("field `constant` needs `value`")?;
                if value.len() != n {
                    bail!("field.value has {} entries, expected {n}", value.len());
                }
                let field = ConstantField::new(value, horizon);
                match f.bound {
                    Some(b) => Box::new(field.with_bound(b)),
                    None => Box::new(field),
                }
            }
            "table:gaussian-dimple" => {
                if n != 2 {
                    bail!("field `table:gaussian-dimple` lives on a 2-D table, got {n} axes");
                }
                let g = f.g.unwrap_or(TABLE_GRAVITY);
                if !(g > 0.0) {
                    bail!("field.g must be positive");
                }
                let field =
                    table_force(PotentialTable::gaussian_dimple(g), &self.domain()?, horizon)?;
                match f.bound {
                    Some(b) => Box::new(field.with_bound(b)),
                    None => Box::new(field),
                }
            }
            "custom" => {
                let matrix = f.matrix.clone().context("field `custom` needs `matrix`")?;
                let offset = f.offset.clone().unwrap_or_else(|| vec![0.0; n]);
                let field = AffineField::new(matrix, offset, horizon, &self.domain()?)?;
                match f.bound {
                    Some(b) => Box::new(field.with_bound(b)),
                    None => Box::new(field),
                }
            }
            other => bail!(
                "unknown field `{other}` (expected zero, constant, table:gaussian-dimple or custom)"
            ),
        };
        Ok(field)
    }

    pub fn enumeration(&self) -> EnumerationConfig<f64> {
        let s = &self.solver;
        EnumerationConfig {
            solver: SolverConfig {
                intervals: s.intervals,
                tol_fp: s.tol_fp,
                max_iter: s.max_iter,
                damping: s.damping,
                anderson_depth: s.anderson_depth,
                m_schedule: s.m_schedule.clone(),
                tol_residual: s.tol_residual,
                resolve_ramps: s.resolve_ramps,
            },
            merge_tol: Some(self.billiard.merge_tol),
            verify_tol: s.verify_tol,
        }
    }

    pub fn oracle(&self) -> OracleConfig<f64> {
        OracleConfig {
            step_count: self.oracle.step_count,
            event_tol: Some(self.oracle.event_tol * self.field.horizon),
        }
    }

    /// The uneven-table problem: `V(x, y) = x y exp(−x² − y²)` on `[−2, 2]²`
    /// with the analytic bound `g/2`.
    pub fn example_table() -> Self {
        Config {
            domain: DomainSection {
                lower: vec![-2.0, -2.0],
                upper: vec![2.0, 2.0],
            },
            endpoints: EndpointSection {
                a: vec![-1.0, 0.5],
                b: vec![0.5, -1.0],
            },
            field: FieldSection {
                name: "table:gaussian-dimple".into(),
                horizon: 1.0,
                value: None,
                g: Some(TABLE_GRAVITY),
                matrix: None,
                offset: None,
                bound: Some(TABLE_GRAVITY / 2.0),
            },
            solver: SolverSection {
                intervals: 4096,
                ..SolverSection::default()
            },
            billiard: BilliardSection::default(),
            oracle: OracleSection::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_round_trips_through_toml() {
        let config = Config::example_table();
        let back = Config::parse(&config.to_toml()).unwrap();
        assert_eq!(back, config);
        assert_eq!(back.field().unwrap().bound(0.0), 4.905);
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let c = Config::parse(
            "[domain]\nlower = [0.0]\nupper = [1.0]\n[endpoints]\nA = [0.5]\nB = [0.5]\n[field]\nname = \"zero\"\n",
        )
        .unwrap();
        assert_eq!(c.solver.intervals, 1024);
        assert_eq!(c.oracle.step_count, 8192);
        assert_eq!(c.field.horizon, 1.0);
    }

    #[test]
    fn rejects_unknown_keys_and_fields() {
        assert!(Config::parse("[domain]\nlower=[0.0]\nupper=[1.0]\nextra=1\n[endpoints]\nA=[0.5]\nB=[0.5]\n[field]\nname=\"zero\"\n").is_err());
        let c = Config::parse("[domain]\nlower=[0.0]\nupper=[1.0]\n[endpoints]\nA=[0.5]\nB=[0.5]\n[field]\nname=\"wind\"\n").unwrap();
        assert!(c.field().is_err());
    }

    #[test]
    fn custom_affine_field() {
        let c = Config::parse(
            "[domain]\nlower=[0.0,0.0]\nupper=[1.0,2.0]\n[endpoints]\nA=[0.5,0.5]\nB=[0.5,1.5]\n\
             [field]\nname=\"custom\"\nmatrix=[[0.0,1.0],[-1.0,0.0]]\noffset=[0.5,0.0]\n",
        )
        .unwrap();
        let field = c.field().unwrap();
        let mut out = [0.0; 2];
        field.eval(0.0, &[0.2, 1.0], &mut out);
        assert_eq!(out, [1.5, -0.2]);
        assert!(field.bound(0.0) >= 2.5 - 1e-12);
        let bad = c
            .to_toml()
            .replace("name = \"custom\"", "name = \"custom\"\nbound = -1.0");
        assert!(Config::parse(&bad).unwrap().field().is_err());
    }

    #[test]
    fn rejects_mismatched_lengths() {
        assert!(Config::parse("[domain]\nlower=[0.0,0.0]\nupper=[1.0]\n[endpoints]\nA=[0.5]\nB=[0.5]\n[field]\nname=\"zero\"\n").is_err());
    }
}
