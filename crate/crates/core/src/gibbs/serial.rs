//! JSON serialization of V-tables.
//!
//! Schema: an object {alpha, rational?, model, n, rows, certification?}
//! where rows is a flat list of {n, k, v, sigma, method} cells. Doubles
//! round-trip exactly (shortest-representation encoding).

use crate::error::{Error, Result};
use crate::gibbs::types::{Certification, Method, VTable};
use crate::stable::StabilityIndex;
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct VTableRecord {
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rational: Option<(u32, u32)>,
    pub model: String,
    pub n: usize,
    pub rows: Vec<CellRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certification: Option<Certification>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct CellRecord {
    pub n: usize,
    pub k: usize,
    pub v: f64,
    pub sigma: f64,
    pub method: Method,
}

impl VTableRecord {
    pub fn from_table(vt: &VTable) -> Self {
        let mut rows = Vec::new();
        for n in 1..=vt.n_max() {
            for k in 1..=n {
                rows.push(CellRecord {
                    n,
                    k,
                    v: vt.v(n, k),
                    sigma: vt.sigma(n, k),
                    method: vt.method(n, k),
                });
            }
        }
        VTableRecord {
            alpha: vt.alpha().alpha(),
            rational: vt.alpha().rational(),
            model: vt.model().to_string(),
            n: vt.n_max(),
            rows,
            certification: vt.certification.clone(),
        }
    }

    pub fn into_table(self) -> Result<VTable> {
        let alpha = match self.rational {
            Some((m, r)) => StabilityIndex::from_rational(m, r)?,
            None => StabilityIndex::new_unguarded(self.alpha)?,
        };
        if (alpha.alpha() - self.alpha).abs() > 0.0 {
            return Err(Error::invalid("rational form disagrees with alpha"));
        }
        let n_max = self.n;
        let expected = n_max * (n_max + 1) / 2;
        if self.rows.len() != expected {
            return Err(Error::invalid(format!(
                "expected {expected} cells for N = {n_max}, got {}",
                self.rows.len()
            )));
        }
        let mut v = (1..=n_max).map(|n| vec![f64::NAN; n]).collect::<Vec<_>>();
        let mut sigma = v.clone();
        let mut method = (1..=n_max)
            .map(|n| vec![Method::Quadrature; n])
            .collect::<Vec<_>>();
        for cell in &self.rows {
            if cell.n < 1 || cell.n > n_max || cell.k < 1 || cell.k > cell.n {
                return Err(Error::invalid(format!(
                    "cell ({}, {}) outside the triangle",
                    cell.n, cell.k
                )));
            }
            v[cell.n - 1][cell.k - 1] = cell.v;
            sigma[cell.n - 1][cell.k - 1] = cell.sigma;
            method[cell.n - 1][cell.k - 1] = cell.method;
        }
        if v.iter().flatten().any(|x| x.is_nan()) {
            return Err(Error::invalid("duplicate or missing cells"));
        }
        let mut table = VTable::from_parts(alpha, self.model, v, sigma, method)?;
        table.certification = self.certification;
        Ok(table)
    }
}

/// Serialize a table to its JSON document.
pub fn to_json(vt: &VTable) -> Result<String> {
    Ok(serde_json::to_string_pretty(&VTableRecord::from_table(vt))?)
}

/// Parse a JSON document back into a table.
pub fn from_json(s: &str) -> Result<VTable> {
    let rec: VTableRecord = serde_json::from_str(s)?;
    rec.into_table()
}
