//! Symmetric quantum hypothesis testing: the Gaussian s-overlap
//! C_s = Tr(rho0^s rho1^{1-s}), the quantum Chernoff bound (infimum over s)
//! and Bhattacharyya bound (s = 1/2), the closed-form asymptotic bounds for
//! the standard transmitters, the quantum-advantage threshold on the source
//! correlation, and the small-kappa exponent-fitting procedure.
//!
//! All determinant/power products are carried in the log domain so that
//! backgrounds of ~1e4 photons and 1e8 pulses stay inside f64 range.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::{williamson, WilliamsonDecomposition};
use crate::scenario::{
    hypothesis_pair_generic, max_correlation, ChannelSpec, HypothesisPair,
    SourceSpec,
};

/// s-overlap value with its natural log.
#[derive(Debug, Clone, Copy)]
pub struct OverlapResult {
    pub c_s: f64,
    pub log_c_s: f64,
    pub s: f64,
}

/// An error-probability bound ½ exp(-M * exponent_per_copy).
#[derive(Debug, Clone, Copy)]
pub struct BoundResult {
    /// Linear-domain bound; underflows to 0 for deep exponents by design.
    pub p_err_bound: f64,
    /// ln of the bound, always finite.
    pub log_p_err_bound: f64,
    /// Per-copy error exponent, nonnegative.
    pub exponent_per_copy: f64,
    pub m: u64,
    /// Optimal s (Chernoff) or 1/2 (Bhattacharyya and closed forms).
    pub s_star: f64,
    /// Which formula produced the bound.
    pub formula: &'static str,
}

impl BoundResult {
    fn from_exponent(exponent: f64, m: u64, s_star: f64, formula: &'static str) -> Self {
        let exponent = exponent.max(0.0);
        let log_p = (0.5_f64).ln() - m as f64 * exponent;
        BoundResult {
            p_err_bound: log_p.exp(),
            log_p_err_bound: log_p,
            exponent_per_copy: exponent,
            m,
            s_star,
            formula,
        }
    }
}

/// nu - 1/2 below this (relative to nu + 1/2) is eigensolver noise on a pure
/// mode; the s-power amplifies such noise as noise^s, so it must be zeroed.
const PURE_FLOOR: f64 = 1e-11;

/// ln G_s(nu) = -ln[(nu + 1/2)^s - (nu - 1/2)^s], the log normalization of a
/// thermal mode raised to the s-th power. The pure branch nu -> 1/2 is exact.
fn ln_g_s(nu: f64, s: f64) -> f64 {
    let hi = nu + 0.5;
    let lo = (nu - 0.5).max(0.0);
    if lo <= PURE_FLOOR * hi {
        return -s * hi.ln();
    }
    let t = lo / hi;
    // ln(hi^s (1 - t^s)) with 1 - t^s = -expm1(s ln t).
    -(s * hi.ln() + (-(s * t.ln()).exp_m1()).ln())
}

/// Lambda_s(nu) = [(nu+1/2)^s + (nu-1/2)^s] / [(nu+1/2)^s - (nu-1/2)^s];
/// twice the effective thermal variance of the normalized s-th power.
fn lambda_s(nu: f64, s: f64) -> f64 {
    let hi = nu + 0.5;
    let lo = (nu - 0.5).max(0.0);
    if lo <= PURE_FLOOR * hi {
        return 1.0;
    }
    let ts = (s * (lo / hi).ln()).exp();
    (1.0 + ts) / -(s * (lo / hi).ln()).exp_m1()
}

fn lambda_matrix(dec: &WilliamsonDecomposition, s: f64) -> DMatrix<f64> {
    let n = dec.nu.len();
    let diag = DVector::from_fn(2 * n, |i, _| lambda_s(dec.nu[i % n], s));
    &dec.s_mat * DMatrix::from_diagonal(&diag) * dec.s_mat.transpose()
}

/// Gaussian s-overlap C_s = Tr(rho0^s rho1^{1-s}) for two N-mode states,
/// computed through their Williamson forms:
///
///   ln C_s = N ln 2 + sum_k [ln G_s(nu0_k) + ln G_{1-s}(nu1_k)]
///            - ln det(Sigma_s) / 2 - d^T Sigma_s^{-1} d,
///
/// with Sigma_s = S0 Lambda_s(V0⊕) S0^T + S1 Lambda_{1-s}(V1⊕) S1^T and
/// d the mean difference. The mean-difference exponent is pinned by the
/// pure-state identity C_s(|0>, |alpha>) = e^{-|alpha|^2}.
pub fn s_overlap(rho0: &crate::gaussian::GaussianState, rho1: &crate::gaussian::GaussianState, s: f64) -> Result<OverlapResult> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::OutOfRange(format!("s = {s} outside (0, 1)")));
    }
    if rho0.n_modes != rho1.n_modes {
        return Err(Error::Dimension(format!(
            "mode counts differ: {} vs {}",
            rho0.n_modes, rho1.n_modes
        )));
    }
    let n = rho0.n_modes;
    let dec0 = williamson(&rho0.cov)?;
    let dec1 = williamson(&rho1.cov)?;

    let mut log_pi = 0.0;
    for k in 0..n {
        log_pi += ln_g_s(dec0.nu[k], s) + ln_g_s(dec1.nu[k], 1.0 - s);
    }

    let sigma = lambda_matrix(&dec0, s) + lambda_matrix(&dec1, 1.0 - s);
    let chol = sigma.clone().cholesky().ok_or(Error::SingularSigma)?;
    let ln_det_sigma: f64 = 2.0 * chol.l_dirty().diagonal().iter().map(|x| x.ln()).sum::<f64>();

    let d = &rho0.mean - &rho1.mean;
    let quad = d.dot(&chol.solve(&d));

    let log_c_s = n as f64 * std::f64::consts::LN_2 + log_pi - 0.5 * ln_det_sigma - quad;
    Ok(OverlapResult {
        c_s: log_c_s.exp(),
        log_c_s,
        s,
    })
}

const QCB_S_LO: f64 = 1e-6;
const QCB_S_HI: f64 = 1.0 - 1e-6;
const QCB_S_TOL: f64 = 1e-8;

/// Quantum Chernoff bound: ½ (inf_s C_s)^M, minimized by golden-section
/// search on ln C_s over s in [1e-6, 1 - 1e-6].
pub fn qcb(pair: &HypothesisPair, m: u64) -> Result<BoundResult> {
    if m < 1 {
        return Err(Error::OutOfRange("m must be >= 1".to_string()));
    }
    let f = |s: f64| -> Result<f64> { Ok(s_overlap(&pair.rho0, &pair.rho1, s)?.log_c_s) };

    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (QCB_S_LO, QCB_S_HI);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > QCB_S_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d)?;
        }
    }
    let mut s_star = 0.5 * (a + b);
    let mut log_min = f(s_star)?;
    let half = f(0.5)?;
    // Identical states (and numerically flat objectives) report s* = 1/2.
    if half <= log_min + 1e-12 {
        s_star = 0.5;
        log_min = half;
    }
    Ok(BoundResult::from_exponent(-log_min, m, s_star, "qcb"))
}

/// Quantum Bhattacharyya bound: ½ C_{1/2}^M.
pub fn qbb(pair: &HypothesisPair, m: u64) -> Result<BoundResult> {
    if m < 1 {
        return Err(Error::OutOfRange("m must be >= 1".to_string()));
    }
    let ov = s_overlap(&pair.rho0, &pair.rho1, 0.5)?;
    Ok(BoundResult::from_exponent(-ov.log_c_s, m, 0.5, "qbb"))
}

/// The three closed-form asymptotic bounds (valid for kappa << 1, N_b >> 1,
/// N_s << 1): TMSV, coherent-state and generic-source error bounds.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormBounds {
    pub tmsv: BoundResult,
    pub cs: BoundResult,
    pub gen: BoundResult,
}

pub fn closed_form_error_bounds(n_s: f64, n_b: f64, kappa: f64, m: u64, c: f64) -> Result<ClosedFormBounds> {
    if !(n_s > 0.0 && n_b > 0.0 && kappa > 0.0) {
        return Err(Error::OutOfRange(
            "n_s, n_b, kappa must be positive".to_string(),
        ));
    }
    let base = kappa * n_s / n_b;
    let cq2 = n_s * (n_s + 1.0);
    Ok(ClosedFormBounds {
        tmsv: BoundResult::from_exponent(base, m, 0.5, "closed-form-tmsv"),
        cs: BoundResult::from_exponent(base / 4.0, m, 0.5, "closed-form-cs"),
        gen: BoundResult::from_exponent(base * c * c / cq2, m, 0.5, "closed-form-generic"),
    })
}

/// Minimum correlation beating the coherent-state benchmark, and whether a
/// separable source (C = N_s) can reach it.
#[derive(Debug, Clone, Copy)]
pub struct AdvantageThreshold {
    /// C_min = ½ sqrt(N_s (N_s + 1)).
    pub c_min: f64,
    /// True iff N_s >= 1/3, where the separable point C = N_s reaches C_min.
    pub separable_feasible: bool,
}

pub fn advantage_threshold(n_s: f64) -> Result<AdvantageThreshold> {
    if !(n_s > 0.0) {
        return Err(Error::OutOfRange(format!("n_s = {n_s} must be > 0")));
    }
    Ok(AdvantageThreshold {
        c_min: 0.5 * max_correlation(n_s),
        separable_feasible: n_s >= 1.0 / 3.0 - 1e-12,
    })
}

/// Result of the small-kappa exponent fit.
#[derive(Debug, Clone, Copy)]
pub struct ExponentFit {
    /// Linear coefficient of 1 - 2 P(kappa) through the origin.
    pub x_coeff: f64,
    /// Normalized exponent factor g = x_coeff(C) / x_coeff(C_q), pinned to
    /// g = 1 at the maximally correlated source.
    pub g: f64,
}

/// Fits the exact Bhattacharyya bound P(kappa) of the generic pair to
/// 1 - 2P = x kappa on a small-kappa grid, through the origin. The factor
/// g is normalized by the fitted coefficient of the C = C_q source, the
/// convention that fixes g = 1 at maximal correlation; the fit then tests
/// the exact proportionality x ∝ C^2. CurvatureTooLarge rejects grids
/// where the quadratic term exceeds 1% of the linear one.
pub fn exponent_fit(n_s: f64, n_b: f64, c: f64, kappa_grid: &[f64]) -> Result<ExponentFit> {
    let x_lin = fit_linear_coefficient(n_s, n_b, c, kappa_grid)?;
    let x_ref = fit_linear_coefficient(n_s, n_b, max_correlation(n_s), kappa_grid)?;
    Ok(ExponentFit {
        x_coeff: x_lin,
        g: x_lin / x_ref,
    })
}

fn fit_linear_coefficient(n_s: f64, n_b: f64, c: f64, kappa_grid: &[f64]) -> Result<f64> {
    if kappa_grid.len() < 5 {
        return Err(Error::OutOfRange(format!(
            "kappa grid has {} points, need >= 5",
            kappa_grid.len()
        )));
    }
    for &k in kappa_grid {
        if !(k > 0.0 && k <= 1e-3) {
            return Err(Error::OutOfRange(format!("kappa = {k} outside (0, 1e-3]")));
        }
    }
    let source = SourceSpec::generic(n_s, c)?;
    let mut ys = Vec::with_capacity(kappa_grid.len());
    for &kappa in kappa_grid {
        let channel = ChannelSpec::new(kappa, n_b)?;
        let pair = hypothesis_pair_generic(&source, &channel)?;
        let log_c_half = s_overlap(&pair.rho0, &pair.rho1, 0.5)?.log_c_s;
        // 1 - 2P = 1 - C_{1/2} = -expm1(ln C_{1/2}), exact in the deep
        // small-kappa regime where ln C is ~1e-10.
        ys.push(-log_c_half.exp_m1());
    }

    // Least squares through the origin, linear and quadratic models.
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (&k, &y) in kappa_grid.iter().zip(&ys) {
        sxy += k * y;
        sxx += k * k;
    }
    let x_lin = sxy / sxx;

    // y = a k + b k^2 normal equations.
    let (mut s2, mut s3, mut s4, mut sy1, mut sy2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&k, &y) in kappa_grid.iter().zip(&ys) {
        s2 += k * k;
        s3 += k * k * k;
        s4 += k * k * k * k;
        sy1 += k * y;
        sy2 += k * k * y;
    }
    let det = s2 * s4 - s3 * s3;
    let k_max = kappa_grid.iter().cloned().fold(0.0_f64, f64::max);
    // Guard only when the linear signal is above the cancellation noise
    // floor; an uncorrelated source has no linear term at all and its
    // quadratic remainder is the correct answer, not a grid defect.
    if det.abs() > 0.0 && (x_lin * k_max).abs() > 1e-11 {
        let a = (s4 * sy1 - s3 * sy2) / det;
        let b = (s2 * sy2 - s3 * sy1) / det;
        if a != 0.0 {
            let ratio = (b * k_max / a).abs();
            if ratio > 0.01 {
                return Err(Error::CurvatureTooLarge(ratio));
            }
        }
    }
    Ok(x_lin)
}

/// Convenience: the generic-source pair for given parameters.
pub fn generic_pair(n_s: f64, c: f64, kappa: f64, n_b: f64) -> Result<HypothesisPair> {
    let source = SourceSpec::generic(n_s, c)?;
    let channel = ChannelSpec::new(kappa, n_b)?;
    hypothesis_pair_generic(&source, &channel)
}
