//! Lamperti laws: the ratio X_alpha = S_alpha / S'_alpha and its tilted
//! relatives, the Delta / vartheta / psi / zeta integral kernels, and the
//! Lamperti-conditional, Lamperti-class and Mittag-Leffler-class V-tables.

use crate::error::{Error, Result};
use crate::gibbs::types::{EppfValue, Method};
use crate::numerics::mc::{mc_mean, McConfig, McEstimate};
use crate::numerics::quad::{quad_finite, quad_halfline, QuadConfig};
use crate::numerics::sampling::{sample_beta, sample_dirichlet};
use crate::specfun::{gen_mittag_leffler, ln_gamma, mittag_leffler};
use crate::stable::{sample as stable_sample, StabilityIndex};
use std::f64::consts::PI;

/// Indices (n, k, j) of the vartheta / psi / zeta kernels.
#[derive(Clone, Copy, Debug)]
pub struct LampertiKernelArgs {
    pub alpha: StabilityIndex,
    pub n: usize,
    pub k: usize,
    pub j: usize,
}

impl LampertiKernelArgs {
    pub fn new(alpha: StabilityIndex, n: usize, k: usize, j: usize) -> Result<Self> {
        if n < 1 || k < 1 || k > n || j > k {
            return Err(Error::invalid(format!(
                "kernel indices out of range: n={n}, k={k}, j={j}"
            )));
        }
        Ok(LampertiKernelArgs { alpha, n, k, j })
    }
}

/// x^{2a} + 2 x^a cos(pi a) + 1, the recurring denominator.
fn denom(a: f64, x: f64) -> f64 {
    let xa = x.powf(a);
    xa * xa + 2.0 * xa * (PI * a).cos() + 1.0
}

/// Density of X_alpha = S_alpha / S'_alpha:
/// (sin(pi a)/pi) y^{a-1} / (y^{2a} + 2 y^a cos(pi a) + 1).
pub fn x_pdf(alpha: &StabilityIndex, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let a = alpha.alpha();
    (PI * a).sin() / PI * y.powf(a - 1.0) / denom(a, y)
}

/// Distribution function of X_alpha:
/// F(y) = 1 - (1/(pi a)) acot(cot(pi a) + y^a / sin(pi a)),
/// with acot on the principal branch (0, pi) so F is continuous and
/// increasing with F(0) = 0, F(inf) = 1.
pub fn x_cdf(alpha: &StabilityIndex, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let a = alpha.alpha();
    let arg = 1.0 / (PI * a).tan() + y.powf(a) / (PI * a).sin();
    let acot = std::f64::consts::FRAC_PI_2 - arg.atan();
    1.0 - acot / (PI * a)
}

/// Delta_theta(x | F_{X_alpha}) = (1/pi) sin(pi theta F(x)) / D(x)^{theta/(2a)}.
pub fn delta_theta(alpha: &StabilityIndex, theta: f64, x: f64) -> f64 {
    let a = alpha.alpha();
    (PI * theta * x_cdf(alpha, x)).sin() / PI / denom(a, x).powf(theta / (2.0 * a))
}

/// d/dx Delta_theta(x), in closed form (F' = x_pdf and D' are explicit).
fn delta_theta_prime(alpha: &StabilityIndex, theta: f64, x: f64) -> f64 {
    let a = alpha.alpha();
    let d = denom(a, x);
    let dp = 2.0 * a * x.powf(2.0 * a - 1.0) + 2.0 * a * x.powf(a - 1.0) * (PI * a).cos();
    let phase = PI * theta * x_cdf(alpha, x);
    let e = theta / (2.0 * a);
    (PI * theta * x_pdf(alpha, x) * phase.cos() * d.powf(-e)
        - e * dp * d.powf(-e - 1.0) * phase.sin())
        / PI
}

/// vartheta^{(n,k)}_j(x) =
/// ([sin(pi a)]^{k-j}/pi) (x^a cos(pi a) + 1)^j x^{a(k-j)} / D(x)^k.
pub fn vartheta(args: &LampertiKernelArgs, x: f64) -> f64 {
    let a = args.alpha.alpha();
    let (k, j) = (args.k, args.j);
    let xa = x.powf(a);
    let d = denom(a, x);
    (PI * a).sin().powi((k - j) as i32) / PI * (xa * (PI * a).cos() + 1.0).powi(j as i32)
        * xa.powi((k - j) as i32)
        / d.powi(k as i32)
}

/// Density of X_{alpha,theta} at 1, for theta > 0, by the convolution
/// form f(y) = int_0^y (y - x)^{theta-1} Delta'_theta(x) dx evaluated
/// at y = 1; at alpha = 1/2 the exact beta-prime form is used instead.
pub fn x_theta_pdf_at_one(alpha: &StabilityIndex, theta: f64) -> Result<f64> {
    if alpha.is_half() {
        // X_{1/2,theta} = G_{theta+1/2} / G_{1/2}
        let aa = theta + 0.5;
        return Ok((ln_gamma(aa + 0.5)? - ln_gamma(aa)? - ln_gamma(0.5)?
            - (aa + 0.5) * std::f64::consts::LN_2)
            .exp());
    }
    if !(theta > 0.0) {
        return Err(Error::invalid(
            "x_theta_pdf_at_one requires theta > 0 (theta = 0 has a closed form upstream)",
        ));
    }
    let a = alpha.alpha();
    let cfg = QuadConfig::tight()
        .with_lower_hint(a - 1.0)
        .with_upper_hint(theta - 1.0);
    quad_finite(
        |x| (1.0 - x).powf(theta - 1.0) * delta_theta_prime(alpha, theta, x),
        0.0,
        1.0,
        &cfg,
    )
}

/// Normalizing constant of the Lamperti-conditional mixing density
/// gamma(t) = C t^{1-theta} f_alpha(t)^2, i.e. the law of S_{alpha,theta}
/// given X_{alpha,theta} = 1:
/// C_{a,theta} = Gamma(theta+1) / (Gamma(theta/a + 1) f_{X_{a,theta}}(1)).
///
/// At theta = 0 this is the closed form 2 pi (1 + cos(pi a))/sin(pi a).
pub fn cond_norm_const(alpha: &StabilityIndex, theta: f64) -> Result<f64> {
    let a = alpha.alpha();
    if !(theta > -a) {
        return Err(Error::invalid("cond_norm_const requires theta > -alpha"));
    }
    if theta == 0.0 {
        return Ok(2.0 * PI * (1.0 + (PI * a).cos()) / (PI * a).sin());
    }
    if theta < 0.0 && !alpha.is_half() {
        return Err(Error::invalid(
            "cond_norm_const for theta < 0 is available only at alpha = 1/2",
        ));
    }
    let f1 = x_theta_pdf_at_one(alpha, theta)?;
    if !(f1 > 0.0) {
        return Err(Error::BadNormalizer(f1));
    }
    Ok((ln_gamma(theta + 1.0)? - ln_gamma(theta / a + 1.0)?).exp() / f1)
}

/// Lamperti-conditional Gibbs weight, theta > -alpha, n >= 1:
/// V_{n,k} = C_{a,theta} a^{k-1} Gamma(theta/a + k)/Gamma(theta + n - 1)
///           int_0^1 (1-x)^{n+theta-2} Delta_{theta + k a}(x) dx.
pub fn lamperti_cond_v(
    alpha: &StabilityIndex,
    theta: f64,
    n: usize,
    k: usize,
    cfg: &QuadConfig,
) -> Result<f64> {
    let a = alpha.alpha();
    if !(theta > -a) {
        return Err(Error::invalid("lamperti_cond_v requires theta > -alpha"));
    }
    if k < 1 || k > n || n < 1 {
        return Err(Error::invalid("lamperti_cond_v indices out of range"));
    }
    if n == 1 {
        return Ok(1.0);
    }
    let c = cond_norm_const(alpha, theta)?;
    let mut qcfg = cfg.clone();
    qcfg.lower_singularity = None;
    qcfg.upper_singularity = Some(n as f64 + theta - 2.0);
    let tka = theta + k as f64 * a;
    let integral = quad_finite(
        |x| (1.0 - x).powf(n as f64 + theta - 2.0) * delta_theta(alpha, tka, x),
        0.0,
        1.0,
        &qcfg,
    )?;
    let pre = (ln_gamma(theta / a + k as f64)? - ln_gamma(theta + n as f64 - 1.0)?).exp()
        * a.powi(k as i32 - 1);
    Ok(c * pre * integral)
}

/// The theta = 0, k = 1 weight in its reduced form:
/// V_{n,1} = (2 (1 + cos(pi a)) / Gamma(n-1)) int_0^1 (1-x)^{n-2} x^a / D(x) dx.
pub fn lamperti_cond_vn1_theta0(
    alpha: &StabilityIndex,
    n: usize,
    cfg: &QuadConfig,
) -> Result<f64> {
    if n == 1 {
        return Ok(1.0);
    }
    let a = alpha.alpha();
    let mut qcfg = cfg.clone();
    qcfg.lower_singularity = None;
    qcfg.upper_singularity = Some(n as f64 - 2.0);
    let integral = quad_finite(
        |x| (1.0 - x).powf(n as f64 - 2.0) * x.powf(a) / denom(a, x),
        0.0,
        1.0,
        &qcfg,
    )?;
    Ok(2.0 * (1.0 + (PI * a).cos()) / ln_gamma(n as f64 - 1.0)?.exp() * integral)
}

/// The theta = 0 weight through the multiple-angle expansion:
/// V_{n,k} = (a^{k-1} Gamma(k)/Gamma(n-1)) sum_j C(k,j) sin(pi (k-j)/2) phi_j
/// with phi_j = C_{a,0} int_0^1 (1-x)^{n-2} vartheta_j(x) dx.
pub fn lamperti_cond_v_theta0_expansion(
    alpha: &StabilityIndex,
    n: usize,
    k: usize,
    cfg: &QuadConfig,
) -> Result<f64> {
    if n == 1 {
        return Ok(1.0);
    }
    let a = alpha.alpha();
    let c0 = cond_norm_const(alpha, 0.0)?;
    let mut qcfg = cfg.clone();
    qcfg.lower_singularity = None;
    qcfg.upper_singularity = Some(n as f64 - 2.0);
    let mut sum = 0.0;
    for j in 0..=k {
        let sin_fac = (PI * (k - j) as f64 / 2.0).sin();
        if sin_fac == 0.0 {
            continue;
        }
        let args = LampertiKernelArgs::new(*alpha, n, k, j)?;
        let phi = c0
            * quad_finite(
                |x| (1.0 - x).powf(n as f64 - 2.0) * vartheta(&args, x),
                0.0,
                1.0,
                &qcfg,
            )?;
        sum += binom(k, j) * sin_fac * phi;
    }
    let pre = a.powi(k as i32 - 1) * (ln_gamma(k as f64)? - ln_gamma(n as f64 - 1.0)?).exp();
    Ok(pre * sum)
}

fn binom(n: usize, k: usize) -> f64 {
    let mut v = 1.0f64;
    for i in 0..k {
        v *= (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Closed form of the alpha = 1/2 Lamperti-conditional weight:
/// V_{n,k} = (2^{theta+1}/Gamma(theta+1))
///           Gamma(theta + k/2 + 1) Gamma(theta + k/2 + 1/2) / Gamma(theta + n + 1/2)
///           2F1(theta + k/2 + 1, theta + k/2 + 1/2; theta + n + 1/2; -1).
pub fn lamperti_cond_v_half_2f1(theta: f64, n: usize, k: usize) -> Result<f64> {
    if !(theta > -0.5) {
        return Err(Error::invalid("requires theta > -1/2"));
    }
    let kh = k as f64 / 2.0;
    let nn = n as f64;
    let pre = ((theta + 1.0) * std::f64::consts::LN_2 + ln_gamma(theta + kh + 1.0)?
        + ln_gamma(theta + kh + 0.5)?
        - ln_gamma(theta + 1.0)?
        - ln_gamma(theta + nn + 0.5)?)
        .exp();
    let h = crate::specfun::gauss_2f1_neg1(theta + kh + 1.0, theta + kh + 0.5, theta + nn + 0.5)?;
    Ok(pre * h)
}

/// psi^{(n,k)}_j(w) = (n-1) int_0^{1/w} (1 - w x)^{n-2} vartheta_j(x) dx,
/// a component of the density of X_{alpha,k alpha} beta_{k alpha, n - k alpha}.
pub fn psi(args: &LampertiKernelArgs, w: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::invalid("psi requires w > 0"));
    }
    if args.n < 2 {
        return Err(Error::invalid("psi requires n >= 2"));
    }
    let n = args.n as f64;
    let mut qcfg = cfg.clone();
    qcfg.lower_singularity = None;
    qcfg.upper_singularity = Some(n - 2.0);
    let v = quad_finite(
        |x| (1.0 - w * x).max(0.0).powf(n - 2.0) * vartheta(args, x),
        0.0,
        1.0 / w,
        &qcfg,
    )?;
    Ok((n - 1.0) * v)
}

/// Density of X_{alpha, k alpha} beta_{k alpha, n - k alpha} at w:
/// (n-1) int_0^{1/w} (1 - w t)^{n-2} Delta_{k a}(t | F_{X_alpha}) dt.
///
/// Evaluated through Delta directly; the per-j psi expansion is
/// equivalent but its terms individually diverge logarithmically as
/// w -> 0, which would cancel catastrophically at the extreme abscissae
/// probed during an outer half-line integration. The integration range
/// is capped at 1e13 where 1/w exceeds it; the omitted Delta tail is
/// below 1e-6 of the density scale.
pub fn xbeta_density(
    alpha: &StabilityIndex,
    n: usize,
    k: usize,
    w: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::invalid("xbeta_density requires w > 0"));
    }
    if n < 2 || k < 1 || k > n {
        return Err(Error::invalid("xbeta_density requires n >= 2, 1 <= k <= n"));
    }
    let a = alpha.alpha();
    let nn = n as f64;
    let ka = k as f64 * a;
    let hi = (1.0 / w).min(1e13);
    let mut qcfg = cfg.clone();
    qcfg.lower_singularity = None;
    qcfg.upper_singularity = Some(nn - 2.0);
    let v = quad_finite(
        |t| (1.0 - w * t).max(0.0).powf(nn - 2.0) * delta_theta(alpha, ka, t),
        0.0,
        hi,
        &qcfg,
    )?;
    Ok((nn - 1.0) * v)
}

/// zeta^{(n,k)}_{a,j} = ([sin(pi a)]^{k-j}/pi) int_0^inf
/// E[g(beta_{1,n-1} / r^{1/a})] (r cos(pi a) + 1)^j r^{k-j-1}
/// / [r^2 + 2 r cos(pi a) + 1]^k dr.
pub fn zeta<G: Fn(f64) -> f64 + ?Sized>(
    args: &LampertiKernelArgs,
    g: &G,
    cfg: &QuadConfig,
) -> Result<f64> {
    let a = args.alpha.alpha();
    let (n, k, j) = (args.n, args.k, args.j);
    let cospa = (PI * a).cos();
    let inner_cfg = {
        let mut c = cfg.clone();
        c.lower_singularity = None;
        c.upper_singularity = Some(n as f64 - 2.0);
        c
    };
    let ebeta = |r: f64| -> f64 {
        let scale = (-r.ln() / a).exp();
        if n == 1 {
            return g(scale);
        }
        let nn = n as f64;
        quad_finite(
            |v| g(v * scale) * (1.0 - v).powf(nn - 2.0),
            0.0,
            1.0,
            &inner_cfg,
        )
        .map(|x| (nn - 1.0) * x)
        .unwrap_or(f64::NAN)
    };
    let outer = quad_halfline(
        |r| {
            ebeta(r) * (r * cospa + 1.0).powi(j as i32) * r.powi(k as i32 - j as i32 - 1)
                / (r * r + 2.0 * r * cospa + 1.0).powi(k as i32)
        },
        cfg,
    )?;
    Ok((PI * a).sin().powi((k - j) as i32) / PI * outer)
}

/// Normalizer of the Lamperti class: 1/L_alpha = E[g(X_alpha)].
pub fn lamperti_class_normalizer<G: Fn(f64) -> f64 + ?Sized>(
    alpha: &StabilityIndex,
    g: &G,
    cfg: &QuadConfig,
) -> Result<f64> {
    let inv = quad_halfline(|y| g(y) * x_pdf(alpha, y), cfg)?;
    if !(inv > 0.0) || !inv.is_finite() {
        return Err(Error::BadNormalizer(inv));
    }
    Ok(1.0 / inv)
}

/// Lamperti-class Gibbs weight by the zeta-sum:
/// V_{n,k} = (a^{k-2} Gamma(k)/Gamma(n)) L_a
///           sum_j C(k,j) sin(pi (k-j)/2) zeta^{(n,k)}_{a,j}.
pub fn lamperti_class_v<G: Fn(f64) -> f64 + ?Sized>(
    alpha: &StabilityIndex,
    n: usize,
    k: usize,
    g: &G,
    cfg: &QuadConfig,
) -> Result<EppfValue> {
    if k < 1 || k > n {
        return Err(Error::invalid("lamperti_class_v indices out of range"));
    }
    if n == 1 {
        return Ok(EppfValue::exact(1.0, Method::Quadrature));
    }
    let a = alpha.alpha();
    let l = lamperti_class_normalizer(alpha, g, cfg)?;
    let mut sum = 0.0;
    for j in 0..=k {
        let sin_fac = (PI * (k - j) as f64 / 2.0).sin();
        if sin_fac == 0.0 {
            continue;
        }
        let args = LampertiKernelArgs::new(*alpha, n, k, j)?;
        sum += binom(k, j) * sin_fac * zeta(&args, g, cfg)?;
    }
    let pre = a.powi(k as i32 - 2) * (ln_gamma(k as f64)? - ln_gamma(n as f64)?).exp();
    Ok(EppfValue {
        value: pre * l * sum,
        std_error: 0.0,
        method: Method::Quadrature,
    })
}

/// Monte Carlo cross-validation of the Lamperti-class weight through the
/// Dirichlet-mixture representation
/// V_{n,k} = (a^{k-1} Gamma(k)/Gamma(n)) L_a E[g(beta_{k,n-k} sum_j X^{(j)}_a D_j)].
pub fn lamperti_class_v_mc<G: Fn(f64) -> f64 + ?Sized>(
    alpha: &StabilityIndex,
    n: usize,
    k: usize,
    g: &G,
    qcfg: &QuadConfig,
    mcfg: &McConfig,
) -> Result<McEstimate> {
    if k < 1 || k > n {
        return Err(Error::invalid("indices out of range"));
    }
    if n == 1 {
        return Ok(McEstimate::exact(1.0));
    }
    let a = alpha.alpha();
    let l = lamperti_class_normalizer(alpha, g, qcfg)?;
    let pre =
        l * a.powi(k as i32 - 1) * (ln_gamma(k as f64)? - ln_gamma(n as f64)?).exp();
    let est = mc_mean(
        |rng| {
            let b = if k == n {
                1.0
            } else {
                sample_beta(k as f64, (n - k) as f64, rng).unwrap_or(f64::NAN)
            };
            let d = sample_dirichlet(k, rng).unwrap_or_default();
            let mut m = 0.0;
            for dj in d {
                let x = stable_sample(alpha, rng) / stable_sample(alpha, rng);
                m += x * dj;
            }
            g(b * m)
        },
        mcfg,
    )?;
    Ok(McEstimate {
        mean: pre * est.mean,
        std_error: pre * est.std_error,
        n_samples: est.n_samples,
        warning: est.warning,
    })
}

/// Mittag-Leffler class (mixing density proportional to e^{-lambda/t^a} f_a(t)):
/// first-column weight
/// V_{n,1} = L_{a,lambda} E[E_{a,1}(-beta_{1,n-1}^a lambda)] / Gamma(n).
pub fn ml_class_vn1(
    alpha: &StabilityIndex,
    lambda: f64,
    n: usize,
    cfg: &QuadConfig,
) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::invalid("ml_class requires lambda > 0"));
    }
    if n == 1 {
        return Ok(1.0);
    }
    let a = alpha.alpha();
    let l = 1.0 / mittag_leffler(alpha, lambda)?;
    let nn = n as f64;
    let mut qcfg = cfg.clone();
    qcfg.lower_singularity = None;
    qcfg.upper_singularity = Some(nn - 2.0);
    let e = quad_finite(
        |v| {
            (nn - 1.0)
                * (1.0 - v).powf(nn - 2.0)
                * mittag_leffler(alpha, v.powf(a) * lambda).unwrap_or(f64::NAN)
        },
        0.0,
        1.0,
        &qcfg,
    )?;
    Ok(l * e / ln_gamma(nn)?.exp())
}

/// Mittag-Leffler class general weight by the normalized generalized
/// Mittag-Leffler functional:
/// V_{n,k} = (a^{k-1} Gamma(k)/Gamma(n)) L_{a,lambda}
///           E[ E[e^{-(beta^a lambda)^{1/a} X_{a,ka}}] ], beta = beta_{ka, n-ka}.
pub fn ml_class_v(
    alpha: &StabilityIndex,
    lambda: f64,
    n: usize,
    k: usize,
    cfg: &QuadConfig,
) -> Result<EppfValue> {
    if k < 1 || k > n {
        return Err(Error::invalid("ml_class_v indices out of range"));
    }
    if !(lambda > 0.0) {
        return Err(Error::invalid("ml_class requires lambda > 0"));
    }
    if n == 1 {
        return Ok(EppfValue::exact(1.0, Method::Quadrature));
    }
    if k == 1 {
        return Ok(EppfValue::exact(
            ml_class_vn1(alpha, lambda, n, cfg)?,
            Method::Quadrature,
        ));
    }
    let a = alpha.alpha();
    let l = 1.0 / mittag_leffler(alpha, lambda)?;
    let nn = n as f64;
    let ka = k as f64 * a;
    let mut qcfg = cfg.clone();
    qcfg.lower_singularity = Some(ka - 1.0);
    qcfg.upper_singularity = Some(nn - ka - 1.0);
    let lbeta = ln_gamma(nn)? - ln_gamma(ka)? - ln_gamma(nn - ka)?;
    let e = quad_finite(
        |v| {
            (lbeta + (ka - 1.0) * v.ln() + (nn - ka - 1.0) * (1.0 - v).ln()).exp()
                * gen_mittag_leffler(alpha, k, v.powf(a) * lambda).unwrap_or(f64::NAN)
        },
        0.0,
        1.0,
        &qcfg,
    )?;
    let pre = a.powi(k as i32 - 1) * (ln_gamma(k as f64)? - ln_gamma(nn)?).exp();
    Ok(EppfValue {
        value: pre * l * e,
        std_error: 0.0,
        method: Method::Quadrature,
    })
}
