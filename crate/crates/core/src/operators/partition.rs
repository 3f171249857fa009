//! Two-block model on a grid of `N` points: `H = C^N ⊕ C^N`, `K = C^N`,
//! `dA = [diag(χ₀) diag(χ∞)]` with `χ₀² + χ∞² = 1`, and `S` swapping the
//! blocks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{BuildOptions, WalkOperators};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, Operator, C64, ONE};

#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    /// `χ₀ ≡ c`.
    Constant(f64),
    /// `χ₀(x) = cos(π x / (2 (N - 1)))`, falling from 1 to 0.
    QuarterCosine,
    /// Explicit values; the grid size must match.
    Values(Vec<f64>),
}

impl Profile {
    pub fn sample(&self, grid_points: usize) -> Result<Vec<f64>> {
        let values = match self {
            Profile::Constant(c) => vec![*c; grid_points],
            Profile::QuarterCosine => (0..grid_points)
                .map(|x| {
                    if grid_points == 1 {
                        1.0
                    } else {
                        (std::f64::consts::FRAC_PI_2 * x as f64 / (grid_points - 1) as f64).cos()
                    }
                })
                .collect(),
            Profile::Values(v) => {
                if v.len() != grid_points {
                    return Err(Error::invalid(format!(
                        "profile has {} values but the grid has {grid_points} points",
                        v.len()
                    )));
                }
                v.clone()
            }
        };
        if let Some((x, v)) = values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(format!(
                "profile value {v} at grid point {x} is outside [0, 1]"
            )));
        }
        Ok(values)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Constant(c) => write!(f, "constant:{c:?}"),
            Profile::QuarterCosine => write!(f, "quarter-cosine"),
            Profile::Values(v) => {
                write!(f, "values:")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{x:?}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = s.split_once(':').unwrap_or((s, ""));
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("invalid profile value '{t}'")))
        };
        match name.trim() {
            "quarter-cosine" | "cosine" if arg.is_empty() => Ok(Profile::QuarterCosine),
            "constant" => Ok(Profile::Constant(num(arg)?)),
            "values" => Ok(Profile::Values(arg.split(';').map(num).collect::<Result<_>>()?)),
            _ => Err(Error::invalid(format!(
                "unknown profile '{s}' (expected quarter-cosine, constant:<c> or values:<a;b;...>)"
            ))),
        }
    }
}

impl Serialize for Profile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Profile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

pub fn build_partition_of_unity(grid_points: usize, profile: &Profile, opts: &BuildOptions) -> Result<WalkOperators> {
    if grid_points == 0 {
        return Err(Error::invalid("partition-of-unity needs at least one grid point"));
    }
    let chi0 = profile.sample(grid_points)?;
    let n = grid_points;
    let mut da = Vec::with_capacity(2 * n);
    let mut s = Vec::with_capacity(2 * n);
    for (x, &c) in chi0.iter().enumerate() {
        let c_inf = (1.0 - c * c).max(0.0).sqrt();
        da.push((x, x, C64::new(c, 0.0)));
        da.push((x, n + x, C64::new(c_inf, 0.0)));
        s.push((x, n + x, ONE));
        s.push((n + x, x, ONE));
    }
    let da = Operator::Sparse(CsrMatrix::from_triplets(n, 2 * n, &da));
    let s = Operator::Sparse(CsrMatrix::from_triplets(2 * n, 2 * n, &s));
    WalkOperators::compose(da, s, opts)
}
