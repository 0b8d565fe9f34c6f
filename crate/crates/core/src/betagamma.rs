//! The Beta-Gamma class: Gibbs weights expressed through expectations of
//! gamma and beta variables only, plus the Hermite-type example.

use crate::error::{Error, Result};
use crate::gibbs::types::{EppfValue, HFn, Method};
use crate::numerics::mc::{mc_mean, McConfig};
use crate::numerics::quad::{quad_finite, quad_halfline, QuadConfig};
use crate::numerics::sampling::{sample_beta, sample_gamma};
use crate::specfun::ln_gamma;
use crate::stable::StabilityIndex;

/// Parameters of a Beta-Gamma mixing model: the index, the tilt theta,
/// and the positive function g.
#[derive(Clone)]
pub struct BetaGammaSpec {
    pub alpha: StabilityIndex,
    pub theta: f64,
    pub g: HFn,
}

impl BetaGammaSpec {
    pub fn new(alpha: StabilityIndex, theta: f64, g: HFn) -> Result<Self> {
        if !(theta > -alpha.alpha()) {
            return Err(Error::invalid(format!(
                "beta-gamma theta = {theta} must exceed -alpha"
            )));
        }
        Ok(BetaGammaSpec { alpha, theta, g })
    }
}

/// Evaluation route selector for operations that admit both quadrature
/// and Monte Carlo.
#[derive(Clone, Debug)]
pub enum EvalConfig {
    Quad(QuadConfig),
    Mc(McConfig),
}

/// Both sides of the Mellin identity
/// E[(G_{(theta+alpha)/alpha}^{1/alpha})^s] = E[(G_{theta+1}/S_{alpha,theta})^s],
/// each assembled from its own Gamma-ratio route; both equal
/// Gamma((theta+s+alpha)/alpha) / Gamma((theta+alpha)/alpha).
pub fn mellin_identity_check(
    alpha: &StabilityIndex,
    theta: f64,
    s: f64,
) -> Result<(f64, f64)> {
    let a = alpha.alpha();
    if !(theta > -a) {
        return Err(Error::invalid("mellin check requires theta > -alpha"));
    }
    if !(theta + s > -a) || !(theta + s + 1.0 > 0.0) {
        return Err(Error::invalid(
            "mellin check requires theta + s > -alpha and theta + s + 1 > 0",
        ));
    }
    // gamma-power route
    let lhs = (ln_gamma((theta + a) / a + s / a)? - ln_gamma((theta + a) / a)?).exp();
    // gamma over tilted-stable route: E[G_{theta+1}^s] * E[S_{alpha,theta}^{-s}]
    let rhs = (ln_gamma(theta + 1.0 + s)? - ln_gamma(theta + 1.0)?
        + ln_gamma((theta + s) / a + 1.0)?
        + ln_gamma(theta + 1.0)?
        - ln_gamma(theta + s + 1.0)?
        - ln_gamma(theta / a + 1.0)?)
        .exp();
    Ok((lhs, rhs))
}

/// E[g(G_shape * beta_{ba,bb}^alpha)] by nested quadrature over the gamma
/// and beta densities.
fn gamma_beta_expectation_quad(
    g: &HFn,
    shape: f64,
    a: f64,
    ba: f64,
    bb: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    let lg = ln_gamma(shape)?;
    let lbeta = ln_gamma(ba + bb)? - ln_gamma(ba)? - ln_gamma(bb)?;
    let mut inner_cfg = cfg.clone();
    inner_cfg.lower_singularity = Some(ba - 1.0);
    inner_cfg.upper_singularity = Some(bb - 1.0);
    let mut outer_cfg = cfg.clone();
    outer_cfg.lower_singularity = Some(shape - 1.0);
    outer_cfg.upper_singularity = None;
    quad_halfline(
        |x| {
            let gamma_w = ((shape - 1.0) * x.ln() - x - lg).exp();
            if gamma_w == 0.0 {
                return 0.0;
            }
            let inner = quad_finite(
                |u| {
                    (lbeta + (ba - 1.0) * u.ln() + (bb - 1.0) * (1.0 - u).ln()).exp()
                        * g(x * u.powf(a))
                },
                0.0,
                1.0,
                &inner_cfg,
            )
            .unwrap_or(f64::NAN);
            gamma_w * inner
        },
        &outer_cfg,
    )
}

/// Same expectation by Monte Carlo.
fn gamma_beta_expectation_mc(
    g: &HFn,
    shape: f64,
    a: f64,
    ba: f64,
    bb: f64,
    cfg: &McConfig,
) -> Result<crate::numerics::mc::McEstimate> {
    mc_mean(
        |rng| {
            let x = sample_gamma(shape, rng).unwrap_or(f64::NAN);
            let u = sample_beta(ba, bb, rng).unwrap_or(f64::NAN);
            g(x * u.powf(a))
        },
        cfg,
    )
}

/// 1/Sigma_{alpha,theta} = E[g(G_{theta/alpha+1} beta_{theta+alpha,1-alpha}^alpha)].
pub fn bg_normalizer(spec: &BetaGammaSpec, cfg: &QuadConfig) -> Result<f64> {
    let a = spec.alpha.alpha();
    let th = spec.theta;
    let inv = gamma_beta_expectation_quad(&spec.g, th / a + 1.0, a, th + a, 1.0 - a, cfg)?;
    if !(inv > 0.0) || !inv.is_finite() {
        return Err(Error::BadNormalizer(inv));
    }
    Ok(inv)
}

/// Beta-Gamma Gibbs weight
/// V_{n,k} = (a^{k-1} Gamma(theta+1) Gamma(theta/a+k) / (Gamma(theta/a+1) Gamma(n+theta)))
///           Sigma_{a,theta} E[g(G_{theta/a+k} beta_{theta+a,n-a}^a)],
/// by tensor quadrature or Monte Carlo according to the config.
pub fn bg_v(spec: &BetaGammaSpec, n: usize, k: usize, cfg: &EvalConfig) -> Result<EppfValue> {
    if k < 1 || k > n {
        return Err(Error::invalid("bg_v indices out of range"));
    }
    let a = spec.alpha.alpha();
    let th = spec.theta;
    if n == 1 {
        return Ok(EppfValue::exact(
            1.0,
            match cfg {
                EvalConfig::Quad(_) => Method::Quadrature,
                EvalConfig::Mc(_) => Method::McDirect,
            },
        ));
    }
    let qcfg = match cfg {
        EvalConfig::Quad(q) => q.clone(),
        EvalConfig::Mc(_) => QuadConfig::tight(),
    };
    let inv_sigma = bg_normalizer(spec, &qcfg)?;
    let pre = (a.ln() * (k as f64 - 1.0) + ln_gamma(th + 1.0)? + ln_gamma(th / a + k as f64)?
        - ln_gamma(th / a + 1.0)?
        - ln_gamma(n as f64 + th)?)
        .exp();
    let shape = th / a + k as f64;
    let (ba, bb) = (th + a, n as f64 - a);
    match cfg {
        EvalConfig::Quad(q) => {
            let e = gamma_beta_expectation_quad(&spec.g, shape, a, ba, bb, q)?;
            Ok(EppfValue {
                value: pre * e / inv_sigma,
                std_error: 0.0,
                method: Method::Quadrature,
            })
        }
        EvalConfig::Mc(m) => {
            let e = gamma_beta_expectation_mc(&spec.g, shape, a, ba, bb, m)?;
            Ok(EppfValue {
                value: pre * e.mean / inv_sigma,
                std_error: pre * e.std_error / inv_sigma,
                method: Method::McDirect,
            })
        }
    }
}

/// Hermite-type weight (the Beta-Gamma class with g(x) = e^{-lambda x}):
/// V_{n,k} = Phi^{(k)}_{a,theta}(lambda)
///           int_0^1 (1 + lambda u^a)^{-(theta/a + k)} u^{theta+a-1} (1-u)^{n-a-1} du,
/// with
/// 1/Sigma = (Gamma(theta+1)/(Gamma(theta+a) Gamma(1-a)))
///           int_0^1 (1 + lambda u^a)^{-(theta/a+1)} u^{theta+a-1} (1-u)^{-a} du.
pub fn hermite_type_v(
    alpha: &StabilityIndex,
    theta: f64,
    lambda: f64,
    n: usize,
    k: usize,
    cfg: &QuadConfig,
) -> Result<EppfValue> {
    let a = alpha.alpha();
    if !(theta > -a) {
        return Err(Error::invalid("hermite_type_v requires theta > -alpha"));
    }
    if !(lambda > 0.0) {
        return Err(Error::invalid("hermite_type_v requires lambda > 0"));
    }
    if k < 1 || k > n {
        return Err(Error::invalid("hermite_type_v indices out of range"));
    }
    if n == 1 {
        return Ok(EppfValue::exact(1.0, Method::Quadrature));
    }
    let mut norm_cfg = cfg.clone();
    norm_cfg.lower_singularity = Some(theta + a - 1.0);
    norm_cfg.upper_singularity = Some(-a);
    let inv_sigma_int = quad_finite(
        |u| {
            (-(theta / a + 1.0) * (lambda * u.powf(a)).ln_1p() + (theta + a - 1.0) * u.ln()
                - a * (1.0 - u).ln())
            .exp()
        },
        0.0,
        1.0,
        &norm_cfg,
    )?;
    let inv_sigma = (ln_gamma(theta + 1.0)? - ln_gamma(theta + a)? - ln_gamma(1.0 - a)?).exp()
        * inv_sigma_int;
    if !(inv_sigma > 0.0) || !inv_sigma.is_finite() {
        return Err(Error::BadNormalizer(inv_sigma));
    }
    let mut cfg2 = cfg.clone();
    cfg2.lower_singularity = Some(theta + a - 1.0);
    cfg2.upper_singularity = Some(n as f64 - a - 1.0);
    let int = quad_finite(
        |u| {
            (-(theta / a + k as f64) * (lambda * u.powf(a)).ln_1p()
                + (theta + a - 1.0) * u.ln()
                + (n as f64 - a - 1.0) * (1.0 - u).ln())
            .exp()
        },
        0.0,
        1.0,
        &cfg2,
    )?;
    let phi = (a.ln() * (k as f64 - 1.0) + ln_gamma(theta + 1.0)?
        + ln_gamma(theta / a + k as f64)?
        - ln_gamma(theta / a + 1.0)?
        - ln_gamma(theta + a)?
        - ln_gamma(n as f64 - a)?)
        .exp()
        / inv_sigma;
    Ok(EppfValue {
        value: phi * int,
        std_error: 0.0,
        method: Method::Quadrature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::rising;
    use std::sync::Arc;

    fn idx(a: f64) -> StabilityIndex {
        StabilityIndex::new(a).unwrap()
    }

    fn pd_weight(a: f64, theta: f64, n: usize, k: usize) -> f64 {
        let mut num = 1.0;
        for i in 1..k {
            num *= theta + i as f64 * a;
        }
        num / rising(theta + 1.0, n - 1)
    }

    #[test]
    fn mellin_identity() {
        // s = 0
        let (l, r) = mellin_identity_check(&idx(0.5), 0.5, 0.0).unwrap();
        assert_eq!((l, r), (1.0, 1.0));
        // (alpha, theta, s) = (0.5, 0.5, 1): both sides Gamma(4)/Gamma(2) = 6
        let (l, r) = mellin_identity_check(&idx(0.5), 0.5, 1.0).unwrap();
        assert!((l - 6.0).abs() < 1e-12 && (r - 6.0).abs() < 1e-12, "{l} {r}");
        // equality across a grid
        for &a in &[0.3, 0.5, 0.7] {
            for &th in &[-0.1, 0.0, 0.6, 1.5] {
                if th <= -a {
                    continue;
                }
                for &s in &[0.3, 1.0, 2.4] {
                    let (l, r) = mellin_identity_check(&idx(a), th, s).unwrap();
                    assert!(
                        (l - r).abs() < 1e-12 * l.abs(),
                        "a={a} th={th} s={s}: {l} vs {r}"
                    );
                }
            }
        }
    }

    #[test]
    fn mellin_domain_errors() {
        assert!(mellin_identity_check(&idx(0.5), 0.0, -0.6).is_err());
        assert!(mellin_identity_check(&idx(0.5), -0.6, 1.0).is_err());
    }

    #[test]
    fn bg_v_unit_g_is_poisson_dirichlet() {
        let spec = BetaGammaSpec::new(idx(0.5), 1.0, Arc::new(|_| 1.0)).unwrap();
        let cfg = EvalConfig::Quad(QuadConfig::tight());
        for n in 1..=5usize {
            for k in 1..=n {
                let v = bg_v(&spec, n, k, &cfg).unwrap().value;
                let e = pd_weight(0.5, 1.0, n, k);
                assert!((v - e).abs() < 1e-9 * e, "n={n} k={k}: {v} vs {e}");
            }
        }
    }

    #[test]
    fn bg_v_quad_vs_mc() {
        let spec =
            BetaGammaSpec::new(idx(0.6), 0.2, Arc::new(|x: f64| 1.0 / (1.0 + x))).unwrap();
        for (n, k) in [(2usize, 1usize), (3, 2), (4, 2), (5, 3), (5, 1), (4, 4)] {
            let q = bg_v(&spec, n, k, &EvalConfig::Quad(QuadConfig::tight()))
                .unwrap()
                .value;
            let m = bg_v(
                &spec,
                n,
                k,
                &EvalConfig::Mc(McConfig::new(200_000, 23).unwrap()),
            )
            .unwrap();
            assert!(
                (q - m.value).abs() < 3.0 * m.std_error.max(1e-9),
                "n={n} k={k}: quad {q} vs mc {} (se {})",
                m.value,
                m.std_error
            );
        }
    }

    #[test]
    fn bg_v_backward_recursion_mc() {
        let spec =
            BetaGammaSpec::new(idx(0.6), 0.2, Arc::new(|x: f64| 1.0 / (1.0 + x))).unwrap();
        let a = 0.6;
        let cfg = |tag: u64| EvalConfig::Mc(McConfig::new(150_000, 31).unwrap().derived(tag));
        for n in 1..=4usize {
            for k in 1..=n {
                let v = bg_v(&spec, n, k, &cfg(1)).unwrap();
                let v1 = bg_v(&spec, n + 1, k, &cfg(2)).unwrap();
                let v2 = bg_v(&spec, n + 1, k + 1, &cfg(3)).unwrap();
                let resid = v.value - (n as f64 - k as f64 * a) * v1.value - v2.value;
                let sigma = (v.std_error.powi(2)
                    + ((n as f64 - k as f64 * a) * v1.std_error).powi(2)
                    + v2.std_error.powi(2))
                .sqrt();
                assert!(
                    resid.abs() < 3.0 * sigma.max(1e-9),
                    "n={n} k={k}: resid {resid} vs sigma {sigma}"
                );
            }
        }
    }

    #[test]
    fn hermite_type_small_lambda_is_pd() {
        let alpha = idx(0.5);
        let cfg = QuadConfig::tight();
        for (n, k) in [(2usize, 1usize), (3, 2), (5, 3), (5, 1)] {
            let v = hermite_type_v(&alpha, 0.5, 1e-8, n, k, &cfg).unwrap().value;
            let e = pd_weight(0.5, 0.5, n, k);
            assert!((v - e).abs() < 1e-5 * e, "n={n} k={k}: {v} vs {e}");
        }
    }

    #[test]
    fn hermite_type_v11_exact() {
        let v = hermite_type_v(&idx(0.5), 0.5, 1.0, 1, 1, &QuadConfig::tight())
            .unwrap()
            .value;
        assert_eq!(v, 1.0);
    }

    #[test]
    fn hermite_type_equals_bg_with_exponential_g() {
        let (a, th, lam) = (0.5, 0.5, 1.0);
        let alpha = idx(a);
        let spec =
            BetaGammaSpec::new(alpha, th, Arc::new(move |x: f64| (-lam * x).exp())).unwrap();
        for (n, k) in [(4usize, 2usize), (3, 1), (5, 4)] {
            let h = hermite_type_v(&alpha, th, lam, n, k, &QuadConfig::tight())
                .unwrap()
                .value;
            let b = bg_v(&spec, n, k, &EvalConfig::Quad(QuadConfig::tight()))
                .unwrap()
                .value;
            assert!((h - b).abs() < 1e-7 * h.abs(), "n={n} k={k}: {h} vs {b}");
        }
    }

    #[test]
    fn hermite_type_unnormalized_integral_decreasing_in_lambda() {
        // the raw integral int (1 + lambda u^a)^{-(theta/a+k)} ... du is
        // strictly decreasing in lambda (integrand pointwise decreasing)
        let alpha = idx(0.5);
        let (theta, n, k) = (0.5, 4usize, 2usize);
        let a = 0.5;
        let cfg = QuadConfig::tight()
            .with_lower_hint(theta + a - 1.0)
            .with_upper_hint(n as f64 - a - 1.0);
        let raw = |lam: f64| {
            quad_finite(
                |u| {
                    (-(theta / a + k as f64) * (lam * u.powf(a)).ln_1p()
                        + (theta + a - 1.0) * u.ln()
                        + (n as f64 - a - 1.0) * (1.0 - u).ln())
                    .exp()
                },
                0.0,
                1.0,
                &cfg,
            )
            .unwrap()
        };
        let mut prev = raw(0.25);
        for i in 1..8 {
            let cur = raw(0.25 + i as f64 * 0.5);
            assert!(cur < prev);
            prev = cur;
        }
    }

    #[test]
    fn bg_v_rejects_bad_normalizer() {
        // g that integrates to zero mass
        let spec = BetaGammaSpec::new(idx(0.5), 0.5, Arc::new(|_| 0.0)).unwrap();
        assert!(bg_v(&spec, 2, 1, &EvalConfig::Quad(QuadConfig::tight())).is_err());
    }
}
