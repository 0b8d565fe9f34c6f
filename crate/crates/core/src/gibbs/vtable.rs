//! Gibbs weights: closed forms, the generic Monte Carlo engine, and the
//! forward-recursion table builder with certification.

use crate::betagamma::{bg_v, hermite_type_v, BetaGammaSpec, EvalConfig};
use crate::error::{Error, Result};
use crate::excursion::{bessel_bridge_vn1, kolmogorov_v, kolmogorov_vn1};
use crate::gibbs::enumerate::{enumerate_check, ENUMERATION_CAP};
use crate::gibbs::types::{Certification, Composition, EppfValue, HFn, Method, MixingModel, VTable};
use crate::lamperti::{lamperti_cond_v, ml_class_v, ml_class_vn1};
use crate::numerics::mc::{from_batch_means, McConfig, McEstimate};
use crate::numerics::quad::{quad_halfline, QuadConfig};
use crate::numerics::rng::RngFactory;
use crate::numerics::sampling::sample_beta;
use crate::specfun::{bessel_k, ln_gamma, ln_rising};
use crate::stable::{pdf_half, sample as stable_sample, StabilityIndex};

/// Poisson-Dirichlet (alpha, theta) weight:
/// V_{n,k} = prod_{i=1}^{k-1} (theta + i alpha) / [theta + 1]_{n-1}.
pub fn pd_v(alpha: &StabilityIndex, theta: f64, n: usize, k: usize) -> Result<f64> {
    let a = alpha.alpha();
    if !(theta > -a) {
        return Err(Error::invalid("pd_v requires theta > -alpha"));
    }
    if k < 1 || k > n {
        return Err(Error::invalid("pd_v requires 1 <= k <= n"));
    }
    let mut num = 1.0;
    for i in 1..k {
        num *= theta + i as f64 * a;
    }
    let (lden, sden) = ln_rising(theta + 1.0, n - 1);
    Ok(num * sden * (-lden).exp())
}

/// Estimate of the normalizing constant E[h(S_alpha)] of a generic h.
pub fn generic_h_normalizer(
    alpha: &StabilityIndex,
    h: &HFn,
    cfg: &McConfig,
) -> Result<McEstimate> {
    crate::numerics::mc::mc_mean(|rng| h(stable_sample(alpha, rng)), cfg)
}

/// First-column weight of a generic mixing function h:
/// V_{n,1} = E[h(S_alpha / beta_{1,n-1})] / Gamma(n),
/// self-normalized batch by batch against E[h(S_alpha)] on the same
/// draws (pass `normalized = true` when E[h(S_alpha)] = 1 exactly).
pub fn generic_vn1(
    alpha: &StabilityIndex,
    h: &HFn,
    n: usize,
    cfg: &McConfig,
) -> Result<McEstimate> {
    generic_vn1_impl(alpha, h, n, cfg, false)
}

pub(crate) fn generic_vn1_impl(
    alpha: &StabilityIndex,
    h: &HFn,
    n: usize,
    cfg: &McConfig,
    normalized: bool,
) -> Result<McEstimate> {
    cfg.validate()?;
    if n == 1 {
        return Ok(McEstimate::exact(1.0));
    }
    let factory = RngFactory::new(cfg.seed);
    let per_batch = cfg.batch_size();
    let mut ratios = Vec::with_capacity(cfg.n_batches);
    for b in 0..cfg.n_batches {
        let mut rng = factory.stream(b as u64);
        let mut num = 0.0;
        let mut den = 0.0;
        for _ in 0..per_batch {
            let s = stable_sample(alpha, &mut rng);
            let beta = sample_beta(1.0, n as f64 - 1.0, &mut rng)?;
            num += h(s / beta);
            den += h(s);
        }
        ratios.push(if normalized {
            num / per_batch as f64
        } else {
            num / den
        });
    }
    let est = from_batch_means(&ratios, per_batch * cfg.n_batches);
    let scale = inv_gamma_of_count(n)?;
    Ok(McEstimate {
        mean: est.mean * scale,
        std_error: est.std_error * scale,
        n_samples: est.n_samples,
        warning: None,
    })
}

/// 1/Gamma(n) for a count n, exact (1/(n-1)!) within f64 range.
fn inv_gamma_of_count(n: usize) -> Result<f64> {
    if n >= 1 && n <= 21 {
        let mut f = 1.0f64;
        for i in 2..n {
            f *= i as f64;
        }
        Ok(1.0 / f)
    } else {
        Ok((-ln_gamma(n as f64)?).exp())
    }
}

/// Direct Monte Carlo estimate of a generic-h weight for any k:
/// V_{n,k} = (alpha^{k-1} Gamma(k)/Gamma(n)) E[h(S_{alpha,k alpha}/beta_{ka,n-ka})],
/// the tilted expectation realized by importance weights S^{-k alpha}.
pub fn generic_vnk(
    alpha: &StabilityIndex,
    h: &HFn,
    n: usize,
    k: usize,
    cfg: &McConfig,
) -> Result<McEstimate> {
    generic_vnk_impl(alpha, h, n, k, cfg, false)
}

pub(crate) fn generic_vnk_impl(
    alpha: &StabilityIndex,
    h: &HFn,
    n: usize,
    k: usize,
    cfg: &McConfig,
    normalized: bool,
) -> Result<McEstimate> {
    cfg.validate()?;
    if k < 1 || k > n {
        return Err(Error::invalid("generic_vnk requires 1 <= k <= n"));
    }
    if n == 1 {
        return Ok(McEstimate::exact(1.0));
    }
    let a = alpha.alpha();
    let ka = k as f64 * a;
    let factory = RngFactory::new(cfg.seed);
    let per_batch = cfg.batch_size();
    let mut ratios = Vec::with_capacity(cfg.n_batches);
    let mut w_sum = 0.0f64;
    let mut w_sq = 0.0f64;
    for b in 0..cfg.n_batches {
        let mut rng = factory.stream(b as u64);
        let mut num = 0.0;
        let mut wsum = 0.0;
        let mut hnorm = 0.0;
        for _ in 0..per_batch {
            let s = stable_sample(alpha, &mut rng);
            let beta = sample_beta(ka, n as f64 - ka, &mut rng)?;
            let w = (-ka * s.ln()).exp();
            num += w * h(s / beta);
            wsum += w;
            hnorm += h(s);
            w_sum += w;
            w_sq += w * w;
        }
        let tilted = num / wsum;
        ratios.push(if normalized {
            tilted
        } else {
            tilted / (hnorm / per_batch as f64)
        });
    }
    let est = from_batch_means(&ratios, per_batch * cfg.n_batches);
    let scale = (a.ln() * (k as f64 - 1.0) + ln_gamma(k as f64)? - ln_gamma(n as f64)?).exp();
    let ess = w_sum * w_sum / w_sq;
    let warning = if ess < 0.01 * (per_batch * cfg.n_batches) as f64 {
        Some(format!("effective sample size {ess:.0} below 1% of n"))
    } else {
        None
    };
    Ok(McEstimate {
        mean: est.mean * scale,
        std_error: est.std_error * scale,
        n_samples: est.n_samples,
        warning,
    })
}

/// The h function of the exponential tilt, exactly normalized through the
/// stable Laplace transform: h(t) = exp(b^alpha - b t).
pub fn exp_tilt_h(alpha: &StabilityIndex, b: f64) -> HFn {
    let a = alpha.alpha();
    let c = b.powf(a);
    std::sync::Arc::new(move |t: f64| (c - b * t).exp())
}

/// h(t) proportional to K_eta(sqrt t) at alpha = 1/2, normalized by
/// quadrature against the closed-form density.
pub fn modified_bessel_h(eta: f64, cfg: &QuadConfig) -> Result<HFn> {
    let z = quad_halfline(
        |t| bessel_k(eta, t.sqrt()).unwrap_or(f64::NAN) * pdf_half(t),
        cfg,
    )?;
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::BadNormalizer(z));
    }
    Ok(std::sync::Arc::new(move |t: f64| {
        bessel_k(eta, t.sqrt()).map(|v| v / z).unwrap_or(0.0)
    }))
}

/// Build configuration: tolerances, Monte Carlo budget, and caps.
#[derive(Clone, Debug)]
pub struct BuildConfig {
    pub quad: QuadConfig,
    pub mc: McConfig,
    /// Largest N for Monte Carlo-sourced recursion columns; the forward
    /// recursion amplifies noise too much beyond this.
    pub max_mc_n: usize,
    /// Run the enumeration certificate when N does not exceed this.
    pub enumeration_n: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            quad: QuadConfig::tight(),
            mc: McConfig::default(),
            max_mc_n: 25,
            enumeration_n: 6,
        }
    }
}

impl BuildConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.mc.seed = seed;
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.mc.n_samples = n;
        self
    }
}

fn is_mc_model(model: &MixingModel) -> bool {
    matches!(
        model,
        MixingModel::GenericH { .. } | MixingModel::ExpTilt { .. } | MixingModel::ModifiedBessel { .. }
    )
}

/// First-column value V_{n,1} with its uncertainty and method tag.
fn column_value(
    alpha: &StabilityIndex,
    model: &MixingModel,
    h_cache: &Option<HFn>,
    n: usize,
    cfg: &BuildConfig,
) -> Result<(f64, f64, Method)> {
    let mc = cfg.mc.derived(n as u64);
    match model {
        MixingModel::PointMass { t } => {
            let v = crate::gibbs::cond::cond_g(alpha, n, 1, *t, &cfg.quad)?;
            let m = if alpha.is_half() {
                Method::ClosedForm
            } else {
                Method::Quadrature
            };
            Ok((v, 0.0, m))
        }
        MixingModel::PoissonDirichlet { theta } => {
            Ok((pd_v(alpha, *theta, n, 1)?, 0.0, Method::ClosedForm))
        }
        MixingModel::ExpTilt { .. } => {
            let h = h_cache.as_ref().expect("h prepared");
            let e = generic_vn1_impl(alpha, h, n, &mc, true)?;
            Ok((e.mean, e.std_error, Method::McDirect))
        }
        MixingModel::GenericH { .. } | MixingModel::ModifiedBessel { .. } => {
            let h = h_cache.as_ref().expect("h prepared");
            let e = generic_vn1_impl(alpha, h, n, &mc, false)?;
            Ok((e.mean, e.std_error, Method::McDirect))
        }
        MixingModel::LampertiCond { theta } => Ok((
            lamperti_cond_v(alpha, *theta, n, 1, &cfg.quad)?,
            0.0,
            Method::Quadrature,
        )),
        MixingModel::LampertiClass { g } => {
            let e = crate::lamperti::lamperti_class_v(alpha, n, 1, g.as_ref(), &cfg.quad)?;
            Ok((e.value, e.std_error, e.method))
        }
        MixingModel::MittagLefflerTilt { lambda } => Ok((
            ml_class_vn1(alpha, *lambda, n, &cfg.quad)?,
            0.0,
            Method::Quadrature,
        )),
        MixingModel::BetaGamma { theta, g } => {
            let spec = BetaGammaSpec::new(*alpha, *theta, g.clone())?;
            let e = bg_v(&spec, n, 1, &EvalConfig::Quad(cfg.quad.clone()))?;
            Ok((e.value, e.std_error, e.method))
        }
        MixingModel::HermiteType { theta, lambda } => {
            let e = hermite_type_v(alpha, *theta, *lambda, n, 1, &cfg.quad)?;
            Ok((e.value, e.std_error, e.method))
        }
        MixingModel::Kolmogorov { tau } => Ok((
            kolmogorov_vn1(alpha, *tau, n, &cfg.quad)?,
            0.0,
            Method::Quadrature,
        )),
        MixingModel::BesselBridge { delta, w, j } => Ok((
            bessel_bridge_vn1(alpha, *delta, *w, *j, n, &cfg.quad)?,
            0.0,
            Method::Quadrature,
        )),
    }
}

/// Direct (non-recursive) route to V_{n,k} for models that have one; used
/// as the fallback when the recursion hits cancellation.
fn direct_cell(
    alpha: &StabilityIndex,
    model: &MixingModel,
    h_cache: &Option<HFn>,
    n: usize,
    k: usize,
    cfg: &BuildConfig,
) -> Option<Result<(f64, f64, Method)>> {
    let mc = cfg.mc.derived((n * 1000 + k) as u64);
    match model {
        MixingModel::PointMass { t } => Some(
            crate::gibbs::cond::cond_g(alpha, n, k, *t, &cfg.quad)
                .map(|v| (v, 0.0, Method::Quadrature)),
        ),
        MixingModel::PoissonDirichlet { theta } => {
            Some(pd_v(alpha, *theta, n, k).map(|v| (v, 0.0, Method::ClosedForm)))
        }
        MixingModel::ExpTilt { .. } => {
            let h = h_cache.as_ref()?;
            Some(
                generic_vnk_impl(alpha, h, n, k, &mc, true)
                    .map(|e| (e.mean, e.std_error, Method::McDirect)),
            )
        }
        MixingModel::GenericH { .. } | MixingModel::ModifiedBessel { .. } => {
            let h = h_cache.as_ref()?;
            Some(
                generic_vnk_impl(alpha, h, n, k, &mc, false)
                    .map(|e| (e.mean, e.std_error, Method::McDirect)),
            )
        }
        MixingModel::LampertiCond { theta } => Some(
            lamperti_cond_v(alpha, *theta, n, k, &cfg.quad)
                .map(|v| (v, 0.0, Method::Quadrature)),
        ),
        MixingModel::LampertiClass { g } => Some(
            crate::lamperti::lamperti_class_v(alpha, n, k, g.as_ref(), &cfg.quad)
                .map(|e| (e.value, e.std_error, e.method)),
        ),
        MixingModel::MittagLefflerTilt { lambda } => Some(
            ml_class_v(alpha, *lambda, n, k, &cfg.quad).map(|e| (e.value, e.std_error, e.method)),
        ),
        MixingModel::BetaGamma { theta, g } => {
            let spec = match BetaGammaSpec::new(*alpha, *theta, g.clone()) {
                Ok(s) => s,
                Err(e) => return Some(Err(e)),
            };
            Some(
                bg_v(&spec, n, k, &EvalConfig::Quad(cfg.quad.clone()))
                    .map(|e| (e.value, e.std_error, e.method)),
            )
        }
        MixingModel::HermiteType { theta, lambda } => Some(
            hermite_type_v(alpha, *theta, *lambda, n, k, &cfg.quad)
                .map(|e| (e.value, e.std_error, e.method)),
        ),
        MixingModel::Kolmogorov { tau } => Some(
            kolmogorov_v(alpha, *tau, n, k, &cfg.quad, &mc)
                .map(|e| (e.value, e.std_error, e.method)),
        ),
        // the Bessel-bridge model has no direct route for k >= 2 (the
        // ranked heights are not samplable for general delta)
        MixingModel::BesselBridge { .. } => None,
    }
}

/// Build the V-table of a mixing model: fill the first column by the
/// model's V_{n,1} route, extend by the forward recursion
/// V_{n+1,k+1} = V_{n,k} - (n - k alpha) V_{n+1,k}, propagate errors,
/// raise a cancellation alarm for any cell below 10x its propagated
/// error (falling back to the model's direct route where one exists),
/// and attach the certification block.
pub fn build_vtable(
    alpha: &StabilityIndex,
    model: &MixingModel,
    n_max: usize,
    cfg: &BuildConfig,
) -> Result<VTable> {
    model.validate(alpha)?;
    if n_max == 0 {
        return Err(Error::invalid("V-table needs N >= 1"));
    }
    if is_mc_model(model) && n_max > cfg.max_mc_n {
        return Err(Error::invalid(format!(
            "N = {n_max} exceeds the cap {} for Monte Carlo-sourced recursion columns",
            cfg.max_mc_n
        )));
    }
    let a = alpha.alpha();
    // h is prepared once for the generic engine
    let h_cache: Option<HFn> = match model {
        MixingModel::ExpTilt { b } => Some(exp_tilt_h(alpha, *b)),
        MixingModel::GenericH { h } => Some(h.clone()),
        MixingModel::ModifiedBessel { eta } => Some(modified_bessel_h(*eta, &cfg.quad)?),
        _ => None,
    };

    let mut v: Vec<Vec<f64>> = Vec::with_capacity(n_max);
    let mut sigma: Vec<Vec<f64>> = Vec::with_capacity(n_max);
    let mut prop: Vec<Vec<f64>> = Vec::with_capacity(n_max);
    let mut method: Vec<Vec<Method>> = Vec::with_capacity(n_max);
    let mut alarms: Vec<String> = Vec::new();

    for n in 1..=n_max {
        let (v1, s1, m1) = column_value(alpha, model, &h_cache, n, cfg)?;
        let mut row = vec![0.0; n];
        let mut row_s = vec![0.0; n];
        let mut row_p = vec![0.0; n];
        let mut row_m = vec![m1; n];
        row[0] = v1;
        row_s[0] = s1;
        row_p[0] = s1.max(cfg.quad.abs_tol.max(cfg.quad.rel_tol * v1.abs()));
        for k in 1..n {
            // V_{n,k+1} = V_{n-1,k} - (n-1 - k a) V_{n,k}
            let c = (n - 1) as f64 - k as f64 * a;
            row[k] = v[n - 2][k - 1] - c * row[k - 1];
            row_s[k] = (sigma[n - 2][k - 1].powi(2) + (c * row_s[k - 1]).powi(2)).sqrt();
            row_p[k] = (prop[n - 2][k - 1].powi(2) + (c * row_p[k - 1]).powi(2)).sqrt();
            row_m[k] = if s1 > 0.0 {
                Method::McRecursion
            } else {
                m1
            };
            if row[k] < 10.0 * row_p[k] {
                match direct_cell(alpha, model, &h_cache, n, k + 1, cfg) {
                    Some(Ok((dv, ds, dm))) => {
                        alarms.push(format!(
                            "cell ({n},{}) recursion value {:.3e} below 10x propagated error {:.3e}; replaced by direct {}",
                            k + 1,
                            row[k],
                            row_p[k],
                            dm
                        ));
                        row[k] = dv;
                        row_s[k] = ds;
                        row_p[k] = ds.max(cfg.quad.abs_tol.max(cfg.quad.rel_tol * dv.abs()));
                        row_m[k] = dm;
                    }
                    Some(Err(e)) => {
                        alarms.push(format!(
                            "cell ({n},{}) cancellation alarm; direct fallback failed: {e}",
                            k + 1
                        ));
                    }
                    None => {
                        alarms.push(format!(
                            "cell ({n},{}) cancellation alarm; no direct route for this model",
                            k + 1
                        ));
                    }
                }
            }
        }
        v.push(row);
        sigma.push(row_s);
        prop.push(row_p);
        method.push(row_m);
    }

    let mut table = VTable::from_parts(*alpha, model.descriptor(), v, sigma, method)?;
    // certification
    let worst_residual = table.worst_backward_residual();
    let min_margin = table.min_positivity_margin();
    let (enum_n, sum_error, sum_sigma) = if n_max <= cfg.enumeration_n.min(ENUMERATION_CAP) {
        let rep = enumerate_check(&table, n_max)?;
        (Some(rep.n), Some(rep.sum_error), Some(rep.sum_sigma))
    } else if cfg.enumeration_n >= 1 {
        let n = cfg.enumeration_n.min(ENUMERATION_CAP).min(n_max);
        let rep = enumerate_check(&table, n)?;
        (Some(rep.n), Some(rep.sum_error), Some(rep.sum_sigma))
    } else {
        (None, None, None)
    };
    let sum_ok = match (sum_error, sum_sigma) {
        (Some(e), Some(s)) => e <= (3.0 * s).max(1e-5),
        _ => true,
    };
    let passed = sum_ok && min_margin > 0.0;
    table.certification = Some(Certification {
        enumeration_n: enum_n,
        sum_error,
        sum_sigma,
        worst_residual,
        min_positivity_margin: min_margin,
        alarms,
        passed,
    });
    Ok(table)
}

/// Unconditional EPPF of a composition under a built table:
/// p(n_1..n_k) = V_{n,k} prod_j [1 - alpha]_{n_j - 1}.
pub fn eppf(vt: &VTable, comp: &Composition) -> Result<EppfValue> {
    let (n, k) = (comp.n(), comp.k());
    if n > vt.n_max() {
        return Err(Error::OutOfRange { n, cap: vt.n_max() });
    }
    let a = vt.alpha().alpha();
    let mut w = 1.0;
    for &nj in comp.sizes() {
        w *= crate::specfun::rising(1.0 - a, nj - 1);
    }
    Ok(EppfValue {
        value: vt.v(n, k) * w,
        std_error: vt.sigma(n, k) * w,
        method: vt.method(n, k),
    })
}
