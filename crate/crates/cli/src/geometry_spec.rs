//! `--geometry kind[:key=value,...]`

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use supertrace_core::geometry::ModelGeometry;

use crate::LabError;

/// A closed-form geometry with a known Euler characteristic.
#[derive(Debug, Clone, PartialEq)]
pub enum GeometrySpec {
    Sphere { m: usize, radius: f64 },
    Disk { m: usize },
    Hemisphere { m: usize },
    Torus { m: usize, side: f64 },
    Interval { length: f64 },
}

impl GeometrySpec {
    pub fn build(&self) -> Result<ModelGeometry, LabError> {
        Ok(match *self {
            GeometrySpec::Sphere { m, radius } => ModelGeometry::sphere(m, radius)?,
            GeometrySpec::Disk { m } => ModelGeometry::disk(m)?,
            GeometrySpec::Hemisphere { m } => ModelGeometry::hemisphere(m)?,
            GeometrySpec::Torus { m, side } => ModelGeometry::flat_torus(m, side)?,
            GeometrySpec::Interval { length } => ModelGeometry::interval(length)?,
        })
    }

    pub fn euler_characteristic(&self) -> i64 {
        match *self {
            GeometrySpec::Sphere { m, .. } => 1 + if m % 2 == 0 { 1 } else { -1 },
            GeometrySpec::Disk { .. } | GeometrySpec::Hemisphere { .. } | GeometrySpec::Interval { .. } => 1,
            GeometrySpec::Torus { .. } => 0,
        }
    }
}

impl fmt::Display for GeometrySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometrySpec::Sphere { m, radius } => write!(f, "sphere:m={m},r={radius}"),
            GeometrySpec::Disk { m } => write!(f, "disk:m={m}"),
            GeometrySpec::Hemisphere { m } => write!(f, "hemisphere:m={m}"),
            GeometrySpec::Torus { m, side } => write!(f, "torus:m={m},side={side}"),
            GeometrySpec::Interval { length } => write!(f, "interval:length={length}"),
        }
    }
}

fn take<T: FromStr>(params: &mut BTreeMap<String, String>, key: &str, default: Option<T>) -> Result<T, LabError> {
    match params.remove(key) {
        Some(v) => v.parse().map_err(|_| LabError::Usage(format!("bad value '{v}' for geometry parameter '{key}'"))),
        None => default.ok_or_else(|| LabError::Usage(format!("geometry parameter '{key}' is required"))),
    }
}

/// Parses `sphere:m=4,r=2`, `disk:m=3`, `hemisphere:m=2`, `torus:m=2,side=1`,
/// `circle` or `interval:length=2`.
impl FromStr for GeometrySpec {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = BTreeMap::new();
        for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| LabError::Usage(format!("expected key=value in geometry, got '{part}'")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        let spec = match kind.trim() {
            "sphere" => GeometrySpec::Sphere {
                m: take(&mut params, "m", Some(2))?,
                radius: take(&mut params, "r", Some(1.0))?,
            },
            "disk" => GeometrySpec::Disk { m: take(&mut params, "m", Some(2))? },
            "hemisphere" => GeometrySpec::Hemisphere { m: take(&mut params, "m", Some(2))? },
            "torus" => GeometrySpec::Torus {
                m: take(&mut params, "m", Some(2))?,
                side: take(&mut params, "side", Some(1.0))?,
            },
            "circle" => GeometrySpec::Torus {
                m: 1,
                side: 2.0 * std::f64::consts::PI,
            },
            "interval" => GeometrySpec::Interval {
                length: take(&mut params, "length", Some(1.0))?,
            },
            other => return Err(LabError::Usage(format!("unknown geometry kind '{other}'"))),
        };
        if let Some(k) = params.keys().next() {
            return Err(LabError::Usage(format!("unknown geometry parameter '{k}' for {kind}")));
        }
        Ok(spec)
    }
}
