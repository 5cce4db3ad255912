//! Experiment configuration. Strict JSON; rationals are `"num/den"` strings.
//!
//! ```json
//! {
//!   "algebra": { "p": 3, "q": -1 },
//!   "maximal_order": { "rows": [2,0,0,0, 1,1,1,1, 0,0,2,0, 0,0,0,2], "den": 2 },
//!   "order": { "kind": "eichler", "level": "5^4" },
//!   "delta": "1",
//!   "z_box": ["-1", "1", "1/2", "2"],
//!   "sweep": { "l_max": 200, "squares_only": false, "samples": 10, "seed": 7 },
//!   "threads": 4
//! }
//! ```

use std::path::Path;
use std::sync::Arc;

use num::{BigRational, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::Factored;
use crate::error::{Error, Result};
use crate::lattice::families::{eichler, ramified_level_order, scalar_order};
use crate::lattice::{Lattice4, MaximalOrder};
use crate::linalg::QMat;
use crate::quat::{QuatAlg, ZBox};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraConfig {
    pub p: i64,
    pub q: i64,
}

impl Default for AlgebraConfig {
    fn default() -> Self {
        AlgebraConfig { p: 3, q: -1 }
    }
}

/// Sixteen integers, row-major, over a common denominator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    pub rows: Vec<i64>,
    #[serde(default = "one")]
    pub den: i64,
}

fn one() -> i64 {
    1
}

impl BasisConfig {
    pub fn to_qmat(&self) -> Result<QMat> {
        if self.rows.len() != 16 || self.den <= 0 {
            return Err(Error::Config("a basis needs 16 integers and a positive denominator".into()));
        }
        let den = num::BigInt::from(self.den);
        Ok(self
            .rows
            .chunks(4)
            .map(|r| r.iter().map(|&x| BigRational::new(num::BigInt::from(x), den.clone())).collect())
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum OrderConfig {
    Maximal,
    /// Coordinates in the normalized maximal-order basis.
    Basis { rows: Vec<i64>, #[serde(default = "one")] den: i64 },
    /// `Z + f O^m`.
    Scalar { f: u64 },
    /// Eichler order of the given level, written `p1^e1*p2^e2`.
    Eichler { level: String },
    /// `Z + p P_p` at a ramified prime.
    Ramified { p: u64 },
}

impl Default for OrderConfig {
    fn default() -> Self {
        OrderConfig::Maximal
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_lmax")]
    pub l_max: u64,
    #[serde(default)]
    pub squares_only: bool,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_lmax() -> u64 {
    64
}

fn default_samples() -> usize {
    4
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { l_max: default_lmax(), squares_only: false, samples: default_samples(), seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub algebra: AlgebraConfig,
    /// Absent: saturate `Z + ZI + ZJ + ZIJ`.
    #[serde(default)]
    pub maximal_order: Option<BasisConfig>,
    #[serde(default)]
    pub order: OrderConfig,
    #[serde(default = "default_delta")]
    pub delta: String,
    #[serde(default = "default_box")]
    pub z_box: [String; 4],
    #[serde(default)]
    pub sweep: SweepConfig,
    /// 0 means unset.
    #[serde(default)]
    pub threads: usize,
}

fn default_delta() -> String {
    "1".into()
}

fn default_box() -> [String; 4] {
    ["-1".into(), "1".into(), "1/2".into(), "2".into()]
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults parse")
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Config(format!("{s:?} is not a rational \"num/den\""));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: num::BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: num::BigInt = d.trim().parse().map_err(|_| bad())?;
            if d == num::BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn rational_f64(s: &str) -> Result<f64> {
    parse_rational(s)?.to_f64().ok_or_else(|| Error::Config(format!("{s:?} out of range")))
}

/// Everything a subcommand needs, validated.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub config: ExperimentConfig,
    pub alg: QuatAlg,
    pub maximal: Arc<MaximalOrder>,
    /// True when the maximal order came from saturation.
    pub saturated: bool,
    pub order: Lattice4,
    pub delta: f64,
    pub z_box: ZBox,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn load(&self) -> Result<Loaded> {
        let alg = QuatAlg::new(self.algebra.p, self.algebra.q).map_err(|e| Error::Config(e.to_string()))?;
        let (maximal, saturated) = match &self.maximal_order {
            Some(b) => (MaximalOrder::new(&alg, &b.to_qmat()?)?, false),
            None => {
                let m = MaximalOrder::default_for(&alg)?;
                log::info!("no maximal order given; saturated Z + ZI + ZJ + ZIJ to {:?}", m.basis_rows());
                (m, true)
            }
        };
        let order = match &self.order {
            OrderConfig::Maximal => Lattice4::maximal(&maximal),
            OrderConfig::Basis { rows, den } => {
                let b = BasisConfig { rows: rows.clone(), den: *den };
                crate::lattice::hnf_canonicalize(&b.to_qmat()?, &maximal)?
            }
            OrderConfig::Scalar { f } => scalar_order(&maximal, *f)?,
            OrderConfig::Eichler { level } => eichler(&maximal, &level.parse::<Factored>()?)?,
            OrderConfig::Ramified { p } => ramified_level_order(&maximal, *p)?,
        };
        let delta = rational_f64(&self.delta)?;
        if !(delta > 0.0) {
            return Err(Error::Config(format!("delta must be positive, got {}", self.delta)));
        }
        let b: Vec<f64> = self.z_box.iter().map(|s| rational_f64(s)).collect::<Result<_>>()?;
        let z_box = ZBox::new(b[0], b[1], b[2], b[3]).map_err(|e| Error::Config(e.to_string()))?;
        Ok(Loaded { config: self.clone(), alg, maximal, saturated, order, delta, z_box })
    }
}
