//! Domain file format:
//! `{"chart": [...], "backend": {"type": "hpoly"|"vpoly"|"ellipsoid"|"radialgraph", ...}}`.

use serde::{Deserialize, Serialize};

use super::ConvexDomain;
use crate::error::{invalid, Result};
use crate::linalg::{matrix, vector};
use crate::projgeom::{AffineChart, DualFunctional};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    /// Coefficients of the hyperplane at infinity; length n+1.
    pub chart: Vec<f64>,
    pub backend: BackendSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum BackendSpec {
    Hpoly { halfspaces: Vec<HalfspaceSpec> },
    Vpoly { vertices: Vec<Vec<f64>> },
    Ellipsoid { center: Vec<f64>, shape: Vec<Vec<f64>> },
    Radialgraph { center: Vec<f64>, directions: Vec<Vec<f64>>, radii: Vec<f64>, simplices: Vec<Vec<usize>> },
}

fn finite<'a>(xs: impl IntoIterator<Item = &'a f64>) -> Result<()> {
    if xs.into_iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(invalid("non-finite number in domain file"))
    }
}

impl DomainSpec {
    /// Parses and checks shapes and finiteness; geometric validity is checked
    /// by [`DomainSpec::build`].
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DomainSpec = serde_json::from_str(text).map_err(|e| invalid(format!("malformed domain file: {e}")))?;
        let n = spec.chart.len().checked_sub(1).filter(|&n| n > 0).ok_or_else(|| invalid("chart needs length n+1 ≥ 2"))?;
        finite(&spec.chart)?;
        let rows_ok = |rows: &Vec<Vec<f64>>| rows.iter().all(|r| r.len() == n);
        let ok = match &spec.backend {
            BackendSpec::Hpoly { halfspaces } => {
                finite(halfspaces.iter().flat_map(|h| h.normal.iter().chain(std::iter::once(&h.offset))))?;
                halfspaces.iter().all(|h| h.normal.len() == n)
            }
            BackendSpec::Vpoly { vertices } => {
                finite(vertices.iter().flatten())?;
                rows_ok(vertices)
            }
            BackendSpec::Ellipsoid { center, shape } => {
                finite(center.iter().chain(shape.iter().flatten()))?;
                center.len() == n && shape.len() == n && rows_ok(shape)
            }
            BackendSpec::Radialgraph { center, directions, radii, .. } => {
                finite(center.iter().chain(directions.iter().flatten()).chain(radii))?;
                center.len() == n && rows_ok(directions)
            }
        };
        if !ok {
            return Err(invalid("backend data does not match chart dimension"));
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn build(&self) -> Result<ConvexDomain> {
        let chart = AffineChart::new(DualFunctional::new(vector(&self.chart))?);
        match &self.backend {
            BackendSpec::Hpoly { halfspaces } => {
                let hs: Vec<_> = halfspaces.iter().map(|h| (vector(&h.normal), h.offset)).collect();
                ConvexDomain::from_halfspaces(chart, &hs)
            }
            BackendSpec::Vpoly { vertices } => {
                let vs: Vec<_> = vertices.iter().map(|v| vector(v)).collect();
                ConvexDomain::from_vertices(chart, &vs)
            }
            BackendSpec::Ellipsoid { center, shape } => ConvexDomain::ellipsoid(chart, vector(center), matrix(shape)),
            BackendSpec::Radialgraph { center, directions, radii, simplices } => ConvexDomain::radial_graph(
                chart,
                vector(center),
                directions.iter().map(|d| vector(d)).collect(),
                radii.clone(),
                simplices.clone(),
            ),
        }
    }
}

impl ConvexDomain {
    /// Parses and builds a domain from its JSON description.
    pub fn from_json(text: &str) -> Result<Self> {
        DomainSpec::from_json(text)?.build()
    }
}
