//! Core domain types: compositions, set partitions, mixing models, and
//! the V-table of Gibbs weights.

use crate::error::{Error, Result};
use crate::stable::StabilityIndex;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// A positive function of one positive real argument, used as the h or g
/// of a mixing model.
pub type HFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// How a number was produced; carried per V-table entry and per EPPF value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    McRecursion,
    McDirect,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::McRecursion => "mc_recursion",
            Method::McDirect => "mc_direct",
        };
        f.write_str(s)
    }
}

/// A computed probability (or Gibbs weight) with its uncertainty and the
/// route that produced it, so cross-method comparisons are first-class.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EppfValue {
    pub value: f64,
    pub std_error: f64,
    pub method: Method,
}

impl EppfValue {
    pub fn exact(value: f64, method: Method) -> Self {
        EppfValue {
            value,
            std_error: 0.0,
            method,
        }
    }
}

/// Block sizes (n_1, ..., n_k) of a partition; the EPPF depends on a
/// partition only through this multiset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Composition {
    sizes: Vec<usize>,
}

impl Composition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::invalid("composition must have at least one block"));
        }
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::invalid("composition block sizes must be >= 1"));
        }
        Ok(Composition { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    /// Sizes sorted descending; the canonical multiset form.
    pub fn canonical(&self) -> Vec<usize> {
        let mut s = self.sizes.clone();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }
}

impl FromStr for Composition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let sizes = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::invalid(format!("bad block size '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Composition::new(sizes)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sizes.iter().map(|s| s.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// An explicit partition of {0, ..., n-1} into disjoint nonempty blocks,
/// kept in order of block creation (least-element order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn from_blocks(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = blocks.iter().map(|b| b.len()).sum();
        if n == 0 {
            return Err(Error::invalid("partition must cover at least one item"));
        }
        let mut seen = vec![false; n];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::invalid("partition blocks must be nonempty"));
            }
            for &i in b {
                if i >= n || seen[i] {
                    return Err(Error::invalid(
                        "partition blocks must be disjoint and cover 0..n",
                    ));
                }
                seen[i] = true;
            }
        }
        Ok(SetPartition { blocks })
    }

    /// Build from a restricted growth string: a[0] = 0 and
    /// a[i] <= 1 + max(a[0..i]).
    pub fn from_rgs(rgs: &[usize]) -> Result<Self> {
        if rgs.is_empty() {
            return Err(Error::invalid("empty growth string"));
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, &a) in rgs.iter().enumerate() {
            if i == 0 && a != 0 {
                return Err(Error::invalid("growth string must start at 0"));
            }
            if a > blocks.len() {
                return Err(Error::invalid("growth string jumps a level"));
            }
            if a == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[a].push(i);
        }
        Ok(SetPartition { blocks })
    }

    pub fn to_rgs(&self) -> Vec<usize> {
        let n = self.n();
        let mut rgs = vec![0usize; n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                rgs[i] = b;
            }
        }
        rgs
    }

    /// Growth string rendered with digits then lowercase letters
    /// (supports up to 36 blocks).
    pub fn rgs_string(&self) -> String {
        self.to_rgs()
            .iter()
            .map(|&a| std::char::from_digit(a as u32, 36).unwrap_or('?'))
            .collect()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn composition(&self) -> Composition {
        Composition::new(self.blocks.iter().map(|b| b.len()).collect()).expect("nonempty")
    }
}

/// Which mixing density gamma_alpha(t) = h(t) f_alpha(t) is in force;
/// drives the dispatch between closed forms, dedicated quadrature, and
/// the generic Monte Carlo engine.
#[derive(Clone)]
pub enum MixingModel {
    /// Point mass at t: the conditional (alpha | t) partition.
    PointMass { t: f64 },
    /// Poisson-Dirichlet (alpha, theta): h(t) proportional to t^{-theta}.
    PoissonDirichlet { theta: f64 },
    /// Exponential tilt: h(t) = exp(b^alpha - b t), exactly normalized.
    ExpTilt { b: f64 },
    /// User-supplied nonnegative h; E[h(S_alpha)] is estimated and divided out.
    GenericH { h: HFn },
    /// Law of S_{alpha,theta} given S_alpha / S_{alpha,theta} = 1.
    LampertiCond { theta: f64 },
    /// Lamperti class: h(t) = L E[g(S'_alpha / t)].
    LampertiClass { g: HFn },
    /// Mittag-Leffler tilt: h(t) proportional to exp(-lambda / t^alpha).
    MittagLefflerTilt { lambda: f64 },
    /// Beta-Gamma class: h(t) proportional to t^{-theta} E[g(G_{theta+alpha}^alpha / t^alpha)].
    BetaGamma { theta: f64, g: HFn },
    /// Hermite-type member of the Beta-Gamma class (g = exp, rate lambda).
    HermiteType { theta: f64, lambda: f64 },
    /// Brownian-bridge maximum (tanh/Kolmogorov) excursion model.
    Kolmogorov { tau: f64 },
    /// Ranked heights of a Bessel bridge of dimension 2 - 2 delta.
    BesselBridge { delta: f64, w: f64, j: u32 },
    /// h(t) proportional to K_eta(sqrt t); restricted to alpha = 1/2.
    ModifiedBessel { eta: f64 },
}

impl fmt::Debug for MixingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl MixingModel {
    /// Short textual descriptor in the model-spec grammar.
    pub fn descriptor(&self) -> String {
        match self {
            MixingModel::PointMass { t } => format!("pointmass:t={t}"),
            MixingModel::PoissonDirichlet { theta } => format!("pd:theta={theta}"),
            MixingModel::ExpTilt { b } => format!("exptilt:b={b}"),
            MixingModel::GenericH { .. } => "generich".to_string(),
            MixingModel::LampertiCond { theta } => format!("lamperticond:theta={theta}"),
            MixingModel::LampertiClass { .. } => "lamperticlass".to_string(),
            MixingModel::MittagLefflerTilt { lambda } => format!("mltilt:lambda={lambda}"),
            MixingModel::BetaGamma { theta, .. } => format!("betagamma:theta={theta}"),
            MixingModel::HermiteType { theta, lambda } => {
                format!("hermitetype:theta={theta},lambda={lambda}")
            }
            MixingModel::Kolmogorov { tau } => format!("kolmogorov:tau={tau}"),
            MixingModel::BesselBridge { delta, w, j } => {
                format!("besselbridge:delta={delta},w={w},j={j}")
            }
            MixingModel::ModifiedBessel { eta } => format!("modbessel:eta={eta}"),
        }
    }

    /// Check the variant's parameter constraints against the index.
    pub fn validate(&self, alpha: &StabilityIndex) -> Result<()> {
        let a = alpha.alpha();
        let bad = |msg: String| Err(Error::invalid(msg));
        match self {
            MixingModel::PointMass { t } if !(*t > 0.0) => bad(format!("pointmass t = {t} must be > 0")),
            MixingModel::PoissonDirichlet { theta } if !(*theta > -a) => {
                bad(format!("pd theta = {theta} must exceed -alpha = {}", -a))
            }
            MixingModel::ExpTilt { b } if !(*b > 0.0) => bad(format!("exptilt b = {b} must be > 0")),
            MixingModel::LampertiCond { theta } if !(*theta > -a) => {
                bad(format!("lamperticond theta = {theta} must exceed -alpha"))
            }
            MixingModel::MittagLefflerTilt { lambda } if !(*lambda > 0.0) => {
                bad(format!("mltilt lambda = {lambda} must be > 0"))
            }
            MixingModel::BetaGamma { theta, .. } if !(*theta > -a) => {
                bad(format!("betagamma theta = {theta} must exceed -alpha"))
            }
            MixingModel::HermiteType { theta, lambda } => {
                if !(*theta > -a) {
                    return bad(format!("hermitetype theta = {theta} must exceed -alpha"));
                }
                if !(*lambda > 0.0) {
                    return bad(format!("hermitetype lambda = {lambda} must be > 0"));
                }
                Ok(())
            }
            MixingModel::Kolmogorov { tau } if !(*tau > 0.0) => {
                bad(format!("kolmogorov tau = {tau} must be > 0"))
            }
            MixingModel::BesselBridge { delta, w, j } => {
                if !(*delta > 0.0 && *delta < 1.0) {
                    return bad(format!("besselbridge delta = {delta} must lie in (0,1)"));
                }
                if !(*w > 0.0) {
                    return bad(format!("besselbridge w = {w} must be > 0"));
                }
                if *j == 0 {
                    return bad("besselbridge j must be >= 1".to_string());
                }
                Ok(())
            }
            MixingModel::ModifiedBessel { .. } if !alpha.is_half() => {
                bad("modbessel model is defined for alpha = 1/2 only".to_string())
            }
            _ => Ok(()),
        }
    }
}

/// Cell-level certification outcome attached to a built table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certification {
    /// n at which the enumeration total-probability check ran, if any.
    pub enumeration_n: Option<usize>,
    /// |sum of EPPF over all set partitions - 1|.
    pub sum_error: Option<f64>,
    /// propagated standard error of the enumeration sum.
    pub sum_sigma: Option<f64>,
    /// worst |V_{n,k} - (n - k a) V_{n+1,k} - V_{n+1,k+1}| / V_{n,k}.
    pub worst_residual: f64,
    /// min over cells of (v - 3 sigma) / v; negative flags a cell whose
    /// positivity cannot be asserted.
    pub min_positivity_margin: f64,
    /// cells where the recursion suffered cancellation (v < 10x its
    /// propagated error) and what was done about it.
    pub alarms: Vec<String>,
    pub passed: bool,
}

/// Triangular array of Gibbs weights V[n][k] for 1 <= k <= n <= N, with
/// per-entry uncertainty and method provenance.
#[derive(Clone, Debug)]
pub struct VTable {
    alpha: StabilityIndex,
    model: String,
    v: Vec<Vec<f64>>,
    sigma: Vec<Vec<f64>>,
    method: Vec<Vec<Method>>,
    pub certification: Option<Certification>,
}

impl VTable {
    pub fn from_parts(
        alpha: StabilityIndex,
        model: String,
        v: Vec<Vec<f64>>,
        sigma: Vec<Vec<f64>>,
        method: Vec<Vec<Method>>,
    ) -> Result<Self> {
        let n_max = v.len();
        if n_max == 0 {
            return Err(Error::invalid("V-table must have at least one row"));
        }
        for (i, row) in v.iter().enumerate() {
            if row.len() != i + 1 {
                return Err(Error::invalid("V-table rows must be triangular"));
            }
        }
        if sigma.len() != n_max || method.len() != n_max {
            return Err(Error::invalid("V-table arrays must have matching shape"));
        }
        for i in 0..n_max {
            if sigma[i].len() != i + 1 || method[i].len() != i + 1 {
                return Err(Error::invalid("V-table arrays must have matching shape"));
            }
        }
        if (v[0][0] - 1.0).abs() > 1e-12 {
            return Err(Error::Certification(format!(
                "V[1][1] must equal 1, got {}",
                v[0][0]
            )));
        }
        Ok(VTable {
            alpha,
            model,
            v,
            sigma,
            method,
            certification: None,
        })
    }

    pub fn alpha(&self) -> StabilityIndex {
        self.alpha
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn n_max(&self) -> usize {
        self.v.len()
    }

    /// V_{n,k}, 1-indexed.
    pub fn v(&self, n: usize, k: usize) -> f64 {
        self.v[n - 1][k - 1]
    }

    pub fn sigma(&self, n: usize, k: usize) -> f64 {
        self.sigma[n - 1][k - 1]
    }

    pub fn method(&self, n: usize, k: usize) -> Method {
        self.method[n - 1][k - 1]
    }

    /// Worst relative backward-recursion residual over all interior cells.
    pub fn worst_backward_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        let a = self.alpha.alpha();
        for n in 1..self.n_max() {
            for k in 1..=n {
                let r = self.v(n, k)
                    - (n as f64 - k as f64 * a) * self.v(n + 1, k)
                    - self.v(n + 1, k + 1);
                let rel = r.abs() / self.v(n, k).abs().max(1e-300);
                worst = worst.max(rel);
            }
        }
        worst
    }

    /// min over cells of (v - 3 sigma)/max(v, tiny); > 0 means every cell
    /// is positive beyond its noise.
    pub fn min_positivity_margin(&self) -> f64 {
        let mut m = f64::INFINITY;
        for n in 1..=self.n_max() {
            for k in 1..=n {
                let margin = (self.v(n, k) - 3.0 * self.sigma(n, k)) / self.v(n, k).abs().max(1e-300);
                m = m.min(margin);
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_parse_and_invariants() {
        let c: Composition = "2,1,1".parse().unwrap();
        assert_eq!(c.n(), 4);
        assert_eq!(c.k(), 3);
        assert_eq!(c.canonical(), vec![2, 1, 1]);
        assert!("".parse::<Composition>().is_err());
        assert!("2,0".parse::<Composition>().is_err());
        assert!("x".parse::<Composition>().is_err());
    }

    #[test]
    fn rgs_roundtrip() {
        let p = SetPartition::from_rgs(&[0, 0, 1, 0, 2]).unwrap();
        assert_eq!(p.k(), 3);
        assert_eq!(p.n(), 5);
        assert_eq!(p.to_rgs(), vec![0, 0, 1, 0, 2]);
        assert_eq!(p.rgs_string(), "00102");
        assert!(SetPartition::from_rgs(&[0, 2]).is_err());
        assert!(SetPartition::from_rgs(&[1]).is_err());
    }

    #[test]
    fn vtable_shape_checks() {
        let alpha = StabilityIndex::new(0.5).unwrap();
        let ok = VTable::from_parts(
            alpha,
            "pd:theta=0".into(),
            vec![vec![1.0], vec![1.0, 0.5]],
            vec![vec![0.0], vec![0.0, 0.0]],
            vec![vec![Method::ClosedForm], vec![Method::ClosedForm; 2]],
        );
        assert!(ok.is_ok());
        let bad = VTable::from_parts(
            alpha,
            "pd:theta=0".into(),
            vec![vec![0.9]],
            vec![vec![0.0]],
            vec![vec![Method::ClosedForm]],
        );
        assert!(bad.is_err());
    }
}
