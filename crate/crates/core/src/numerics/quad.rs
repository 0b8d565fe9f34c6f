//! Adaptive double-exponential quadrature.
//!
//! Finite intervals use the tanh-sinh rule; the half line uses exp-sinh.
//! Both are nested (each refinement level halves the step and reuses all
//! previous abscissae). Integrable endpoint singularities of power type
//! u^p, p > -1, are removed by an explicit power substitution when the
//! caller declares the exponent in [`QuadConfig`].

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Maximum refinement level of the node tables.
const MAX_LEVEL: usize = 12;
/// Truncation of the double-exponential variable t.
const T_CUT: f64 = 6.1;

/// Tolerances and singularity hints for the quadrature routines.
#[derive(Clone, Debug)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum refinement level (step 2^-level); at least 1.
    pub max_subdivisions: usize,
    /// Power-law exponent p > -1 of the integrand at the lower endpoint.
    pub lower_singularity: Option<f64>,
    /// Power-law exponent p > -1 of the integrand at the upper endpoint.
    pub upper_singularity: Option<f64>,
}

impl QuadConfig {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        let cfg = QuadConfig {
            abs_tol,
            rel_tol,
            max_subdivisions: 10,
            lower_singularity: None,
            upper_singularity: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Default for closed-form cross-checks: rel 1e-10, abs 1e-14.
    pub fn tight() -> Self {
        QuadConfig::new(1e-14, 1e-10).unwrap()
    }

    /// Looser tolerance for integrands that themselves call nested
    /// quadrature, where the inner error compounds.
    pub fn nested() -> Self {
        QuadConfig::new(1e-12, 1e-8).unwrap()
    }

    pub fn with_lower_hint(mut self, p: f64) -> Self {
        self.lower_singularity = Some(p);
        self
    }

    pub fn with_upper_hint(mut self, p: f64) -> Self {
        self.upper_singularity = Some(p);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0) {
            return Err(Error::invalid("quadrature tolerances must be >= 0"));
        }
        if self.abs_tol == 0.0 && self.rel_tol == 0.0 {
            return Err(Error::invalid(
                "at least one of abs_tol, rel_tol must be positive",
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::invalid("max_subdivisions must be >= 1"));
        }
        for p in [self.lower_singularity, self.upper_singularity].into_iter().flatten() {
            if !(p > -1.0) {
                return Err(Error::invalid(format!(
                    "singularity exponent hint must be > -1, got {p}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig::tight()
    }
}

/// Tanh-sinh node: distance d from the nearer endpoint of (0,1) and the
/// weight factor (pi/2) cosh t / cosh^2((pi/2) sinh t), without the step h.
#[derive(Clone, Copy)]
struct TsNode {
    d: f64,
    w: f64,
}

fn ts_node(t: f64) -> Option<TsNode> {
    let a = std::f64::consts::FRAC_PI_2 * t.sinh();
    if a > 350.0 {
        return None;
    }
    let d = 1.0 / (1.0 + (2.0 * a).exp());
    let ch = a.cosh();
    let w = std::f64::consts::FRAC_PI_2 * t.cosh() / (ch * ch);
    if d == 0.0 || w == 0.0 || !w.is_finite() {
        return None;
    }
    Some(TsNode { d, w })
}

/// New tanh-sinh nodes introduced at each level (t > 0 only; t = 0 is
/// handled separately). Level 0 holds all integer t, level L > 0 the odd
/// multiples of 2^-L.
fn ts_levels() -> &'static Vec<Vec<TsNode>> {
    static LEVELS: OnceLock<Vec<Vec<TsNode>>> = OnceLock::new();
    LEVELS.get_or_init(|| {
        let mut levels = Vec::with_capacity(MAX_LEVEL + 1);
        for level in 0..=MAX_LEVEL {
            let h = 0.5f64.powi(level as i32);
            let mut nodes = Vec::new();
            let mut j = 1u64;
            loop {
                let t = j as f64 * h;
                if t > T_CUT {
                    break;
                }
                if level == 0 || j % 2 == 1 {
                    if let Some(n) = ts_node(t) {
                        nodes.push(n);
                    }
                }
                j += if level == 0 { 1 } else { 2 };
            }
            levels.push(nodes);
        }
        levels
    })
}

/// Exp-sinh node for the half line: abscissa x and weight without h.
#[derive(Clone, Copy)]
struct EsNode {
    x: f64,
    w: f64,
}

fn es_nodes_at(t: f64, out: &mut Vec<EsNode>) {
    for s in [t, -t] {
        let a = std::f64::consts::FRAC_PI_2 * s.sinh();
        if a.abs() > 700.0 {
            continue;
        }
        let x = a.exp();
        let w = std::f64::consts::FRAC_PI_2 * s.cosh() * x;
        if x > 0.0 && w > 0.0 && w.is_finite() {
            out.push(EsNode { x, w });
        }
        if t == 0.0 {
            break;
        }
    }
}

fn es_levels() -> &'static Vec<Vec<EsNode>> {
    static LEVELS: OnceLock<Vec<Vec<EsNode>>> = OnceLock::new();
    LEVELS.get_or_init(|| {
        let mut levels = Vec::with_capacity(MAX_LEVEL + 1);
        for level in 0..=MAX_LEVEL {
            let h = 0.5f64.powi(level as i32);
            let mut nodes = Vec::new();
            if level == 0 {
                es_nodes_at(0.0, &mut nodes);
            }
            let mut j = 1u64;
            loop {
                let t = j as f64 * h;
                if t > T_CUT {
                    break;
                }
                if level == 0 || j % 2 == 1 {
                    es_nodes_at(t, &mut nodes);
                }
                j += if level == 0 { 1 } else { 2 };
            }
            levels.push(nodes);
        }
        levels
    })
}

/// The full tanh-sinh grid of (0,1) at a fixed level, as (abscissa, weight)
/// pairs ready for a plain weighted sum. Used by callers that cache
/// integrand values on a fixed node set.
pub(crate) fn ts_grid01(level: usize) -> Vec<(f64, f64)> {
    let level = level.min(MAX_LEVEL);
    let h = 0.5f64.powi(level as i32);
    let mut grid = Vec::new();
    // midpoint
    grid.push((0.5, h * std::f64::consts::FRAC_PI_2 * 0.5));
    for (lvl, nodes) in ts_levels().iter().enumerate().take(level + 1) {
        let _ = lvl;
        for n in nodes {
            grid.push((n.d, h * n.w * 0.5));
            let hi = 1.0 - n.d;
            if hi < 1.0 {
                grid.push((hi, h * n.w * 0.5));
            }
        }
    }
    grid
}

struct TsSweep<'a, F: Fn(f64) -> f64> {
    f: &'a F,
    nan_at: Option<f64>,
}

impl<'a, F: Fn(f64) -> f64> TsSweep<'a, F> {
    fn eval(&mut self, xi: f64) -> f64 {
        let v = (self.f)(xi);
        if !v.is_finite() {
            if self.nan_at.is_none() {
                self.nan_at = Some(xi);
            }
            return 0.0;
        }
        v
    }

    /// phi-sum over the new nodes of `level` (weights without h).
    fn level_sum(&mut self, level: usize) -> f64 {
        let mut s = 0.0;
        for n in &ts_levels()[level] {
            s += n.w * self.eval(n.d);
            let hi = 1.0 - n.d;
            if hi < 1.0 {
                s += n.w * self.eval(hi);
            }
        }
        s
    }
}

/// Adaptive tanh-sinh integration of f over (0,1).
fn ts_integrate01<F: Fn(f64) -> f64>(f: &F, cfg: &QuadConfig) -> Result<(f64, f64)> {
    let max_level = cfg.max_subdivisions.min(MAX_LEVEL);
    let mut sweep = TsSweep { f, nan_at: None };
    // level 0
    let mid = std::f64::consts::FRAC_PI_2 * sweep.eval(0.5);
    let mut phi = mid + sweep.level_sum(0);
    let mut prev = phi * 0.5; // h = 1, and the (0,1) map contributes 1/2
    let mut best = prev;
    let mut err = f64::INFINITY;
    for level in 1..=max_level {
        phi += sweep.level_sum(level);
        let h = 0.5f64.powi(level as i32);
        let cur = h * phi * 0.5;
        err = (cur - prev).abs();
        best = cur;
        if let Some(x) = sweep.nan_at {
            return Err(Error::IntegrandNan { x });
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * cur.abs());
        if level >= 2 && err <= target {
            return Ok((cur, err));
        }
        prev = cur;
    }
    Err(Error::QuadratureNoConvergence {
        estimate: best,
        error_bound: err,
    })
}

/// Integrate f over the finite interval (a, b).
///
/// Integrable endpoint singularities of power type must be declared via
/// the hints in `cfg`; each hinted endpoint gets a power substitution that
/// makes the transformed integrand bounded there.
pub fn quad_finite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<f64> {
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::invalid(format!("bad interval [{a}, {b}]")));
    }
    let w = b - a;
    match (cfg.lower_singularity, cfg.upper_singularity) {
        (None, None) => {
            let (v, _) = ts_integrate01(&|xi: f64| f(a + w * xi) * w, cfg)?;
            Ok(v)
        }
        (Some(p), None) => {
            let sub = EndpointSubst::new(&f, a, 1.0, w, p);
            let (v, _) = ts_integrate01(&|v| sub.eval(v), cfg)?;
            Ok(v)
        }
        (None, Some(p)) => {
            let sub = EndpointSubst::new(&f, b, -1.0, w, p);
            let (v, _) = ts_integrate01(&|v| sub.eval(v), cfg)?;
            Ok(v)
        }
        (Some(pl), Some(pu)) => {
            let mid = 0.5 * (a + b);
            let hw = mid - a;
            let lo = EndpointSubst::new(&f, a, 1.0, hw, pl);
            let hi = EndpointSubst::new(&f, b, -1.0, hw, pu);
            let (v1, _) = ts_integrate01(&|v| lo.eval(v), cfg)?;
            let (v2, _) = ts_integrate01(&|v| hi.eval(v), cfg)?;
            Ok(v1 + v2)
        }
    }
}

/// Substitution u = v^s at an endpoint with declared power behavior
/// f ~ dist^p; makes the transformed integrand bounded there.
///
/// Below `y_ref` the distance to the endpoint is no longer representable
/// in the argument passed to f (it would round onto the endpoint itself),
/// so f is continued by its declared power law from the reference point.
struct EndpointSubst<'a, F: Fn(f64) -> f64> {
    f: &'a F,
    /// endpoint the substitution is anchored at
    endpoint: f64,
    /// signed direction: argument = endpoint + dir * y, y in (0, w)
    dir: f64,
    w: f64,
    p: f64,
    s: f64,
    /// below this distance the argument quantizes in ulps of the endpoint,
    /// so f is continued by y^p (c0 + c1 y) fitted at y_ref and 2 y_ref
    y_ref: f64,
    model: std::cell::Cell<Option<(f64, f64)>>,
}

impl<'a, F: Fn(f64) -> f64> EndpointSubst<'a, F> {
    fn new(f: &'a F, endpoint: f64, dir: f64, w: f64, p: f64) -> Self {
        let s = if p < 0.0 { 2.0 / (1.0 + p) } else { 1.0 };
        let y_ref = if endpoint == 0.0 || p >= 0.0 {
            0.0
        } else {
            (4.0 * f64::EPSILON * endpoint.abs()).max(1e-6 * w)
        };
        EndpointSubst {
            f,
            endpoint,
            dir,
            w,
            p,
            s,
            y_ref,
            model: std::cell::Cell::new(None),
        }
    }

    fn eval(&self, v: f64) -> f64 {
        let u = v.powf(self.s);
        let y = self.w * u;
        if y == 0.0 {
            return 0.0;
        }
        let jac = self.s * v.powf(self.s - 1.0) * self.w;
        // argument would round onto the endpoint itself and there is no
        // power model to continue with; the omitted mass is O(eps)
        if self.y_ref == 0.0 && y < 4.0 * f64::EPSILON * self.endpoint.abs() {
            return 0.0;
        }
        let fv = if y < self.y_ref {
            let (c0, c1) = match self.model.get() {
                Some(m) => m,
                None => {
                    let y1 = self.y_ref;
                    let y2 = 2.0 * self.y_ref;
                    let phi1 = (self.f)(self.endpoint + self.dir * y1) * y1.powf(-self.p);
                    let phi2 = (self.f)(self.endpoint + self.dir * y2) * y2.powf(-self.p);
                    let c1 = (phi2 - phi1) / (y2 - y1);
                    let m = (phi1 - c1 * y1, c1);
                    self.model.set(Some(m));
                    m
                }
            };
            y.powf(self.p) * (c0 + c1 * y)
        } else {
            (self.f)(self.endpoint + self.dir * y)
        };
        fv * jac
    }
}

/// Integrate f over (0, infinity) with the exp-sinh rule.
///
/// Power-law singularities at 0 (exponent > -1) are absorbed by the
/// double-exponential transform; the integrand must decay at infinity
/// (exponentially, or like x^-q with q > 1). A tail probe rejects
/// integrands whose tail visibly fails to decay.
pub fn quad_halfline<F: Fn(f64) -> f64>(f: F, cfg: &QuadConfig) -> Result<f64> {
    cfg.validate()?;
    // tail probe
    let t6 = 1e6 * f(1e6).abs();
    let t12 = 1e12 * f(1e12).abs();
    if !t6.is_finite() || !t12.is_finite() {
        return Err(Error::IntegrandNan {
            x: if t6.is_finite() { 1e12 } else { 1e6 },
        });
    }
    if t12 > 1e-280 && t12 > 0.75 * t6 {
        return Err(Error::NonDecayingTail {
            x: 1e12,
            value: t12,
        });
    }

    let max_level = cfg.max_subdivisions.min(MAX_LEVEL);
    let nan_at = std::cell::Cell::new(None::<f64>);
    let eval = |x: f64| -> f64 {
        let v = f(x);
        if !v.is_finite() {
            if nan_at.get().is_none() {
                nan_at.set(Some(x));
            }
            return 0.0;
        }
        v
    };
    let mut phi = 0.0;
    for n in &es_levels()[0] {
        phi += n.w * eval(n.x);
    }
    let mut prev = phi;
    let mut best = prev;
    let mut err = f64::INFINITY;
    for level in 1..=max_level {
        for n in &es_levels()[level] {
            phi += n.w * eval(n.x);
        }
        let h = 0.5f64.powi(level as i32);
        let cur = h * phi;
        err = (cur - prev).abs();
        best = cur;
        if let Some(x) = nan_at.get() {
            return Err(Error::IntegrandNan { x });
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * cur.abs());
        if level >= 2 && err <= target {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureNoConvergence {
        estimate: best,
        error_bound: err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_on_unit_interval() {
        let v = quad_finite(|_| 1.0, 0.0, 1.0, &QuadConfig::tight()).unwrap();
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn inverse_sqrt_with_hint() {
        let cfg = QuadConfig::tight().with_lower_hint(-0.5);
        let v = quad_finite(|u| u.powf(-0.5), 0.0, 1.0, &cfg).unwrap();
        assert!((v - 2.0).abs() < 1e-11, "got {v}");
    }

    #[test]
    fn beta_tail_integral() {
        // int_0^1 (1-u)^{n-k a-1} du with n=2, k=1, a=0.5 -> 1/(n-ka) = 2/3
        let e = 2.0 - 0.5 - 1.0;
        let cfg = QuadConfig::tight().with_upper_hint(e);
        let v = quad_finite(|u| (1.0 - u).powf(e), 0.0, 1.0, &cfg).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn beta_integrals_match_gamma_ratio() {
        use statrs::function::gamma::ln_gamma;
        for &a in &[0.3, 1.0, 2.7] {
            for &b in &[0.3, 1.0, 2.7] {
                let cfg = QuadConfig::tight()
                    .with_lower_hint(a - 1.0)
                    .with_upper_hint(b - 1.0);
                let v =
                    quad_finite(|u| u.powf(a - 1.0) * (1.0 - u).powf(b - 1.0), 0.0, 1.0, &cfg)
                        .unwrap();
                let exact = (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp();
                assert!(
                    (v - exact).abs() < 1e-10 * exact,
                    "a={a} b={b}: {v} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn exponential_halfline() {
        let v = quad_halfline(|t| (-t).exp(), &QuadConfig::tight()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_half_integral() {
        let v = quad_halfline(|t| (-0.5 * t.ln() - t).exp(), &QuadConfig::tight()).unwrap();
        let exact = std::f64::consts::PI.sqrt();
        assert!((v - exact).abs() < 1e-11 * exact, "got {v}");
    }

    #[test]
    fn nan_is_reported() {
        let r = quad_finite(|u| if u > 0.4 && u < 0.6 { f64::NAN } else { 1.0 }, 0.0, 1.0,
            &QuadConfig::tight());
        assert!(matches!(r, Err(Error::IntegrandNan { .. })));
    }

    #[test]
    fn non_decaying_tail_detected() {
        let r = quad_halfline(|x| 1.0 / (1.0 + x), &QuadConfig::tight());
        assert!(matches!(r, Err(Error::NonDecayingTail { .. })));
    }

    #[test]
    fn general_interval() {
        let v = quad_finite(|x| x.sin(), 0.0, std::f64::consts::PI, &QuadConfig::tight()).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(QuadConfig::new(0.0, 0.0).is_err());
        let mut cfg = QuadConfig::tight();
        cfg.max_subdivisions = 0;
        assert!(quad_finite(|_| 1.0, 0.0, 1.0, &cfg).is_err());
    }
}
