//! The conditional Gibbs coefficient G^{(n,k)}_alpha(t) and conditional EPPF.

use crate::error::{Error, Result};
use crate::gibbs::types::Composition;
use crate::numerics::quad::{quad_finite, QuadConfig};
use crate::specfun::{kummer_u, ln_gamma, rising};
use crate::stable::{pdf_kanter, StabilityIndex};

/// G^{(n,k)}_alpha(t) =
/// (alpha^k t^{-k a} / (Gamma(n - k a) f_a(t))) int_0^1 f_a(t u) (1-u)^{n-ka-1} du.
///
/// Dispatches to the confluent-U closed form at alpha = 1/2; otherwise the
/// density is evaluated through the Kanter integral on a cached node set.
pub fn cond_g(
    alpha: &StabilityIndex,
    n: usize,
    k: usize,
    t: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    if k < 1 || k > n {
        return Err(Error::invalid("cond_g requires 1 <= k <= n"));
    }
    if !(t > 0.0) {
        return Err(Error::invalid("cond_g requires t > 0"));
    }
    if alpha.is_half() {
        return cond_g_half_closed(n, k, t);
    }
    let a = alpha.alpha();
    let ka = k as f64 * a;
    let nn = n as f64;
    let ft = pdf_kanter(alpha, t, cfg)?;
    if !(ft > 0.0) {
        return Err(Error::invalid(format!(
            "stable density underflows at t = {t}; conditional coefficient undefined"
        )));
    }
    let mut qcfg = cfg.clone();
    qcfg.lower_singularity = None;
    qcfg.upper_singularity = Some(nn - ka - 1.0);
    let integral = quad_finite(
        |u| pdf_kanter(alpha, t * u, cfg).unwrap_or(f64::NAN) * (1.0 - u).powf(nn - ka - 1.0),
        0.0,
        1.0,
        &qcfg,
    )?;
    Ok((a.ln() * k as f64 - ka * t.ln() - ln_gamma(nn - ka)?).exp() * integral / ft)
}

/// Closed form at alpha = 1/2:
/// G^{(n,k)}_{1/2}(t) = 2^{1-k} t^{(1-k)/2} U(n - (k+1)/2, 1/2, 1/(4t)).
pub fn cond_g_half_closed(n: usize, k: usize, t: f64) -> Result<f64> {
    if k < 1 || k > n {
        return Err(Error::invalid("cond_g requires 1 <= k <= n"));
    }
    if !(t > 0.0) {
        return Err(Error::invalid("cond_g requires t > 0"));
    }
    let a = n as f64 - (k as f64 + 1.0) / 2.0;
    let u = kummer_u(a, 0.5, 1.0 / (4.0 * t))?;
    Ok(((1.0 - k as f64) * std::f64::consts::LN_2
        + (1.0 - k as f64) / 2.0 * t.ln())
    .exp()
        * u)
}

/// Conditional EPPF of the (alpha | t) partition:
/// p(n_1, ..., n_k | t) = G^{(n,k)}_alpha(t) prod_j [1 - alpha]_{n_j - 1}.
pub fn cond_eppf(
    alpha: &StabilityIndex,
    comp: &Composition,
    t: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    let g = cond_g(alpha, comp.n(), comp.k(), t, cfg)?;
    let mut w = 1.0;
    for &nj in comp.sizes() {
        w *= rising(1.0 - alpha.alpha(), nj - 1);
    }
    Ok(g * w)
}
