//! Scenario construction: the correlated two-mode source family, the
//! return-plus-idler hypothesis pairs, and the physical radar link budget
//! (Planck background occupation, range-to-reflectivity conversion, SNR).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::GaussianState;

/// Planck constant, J s (CODATA 2018, exact).
pub const PLANCK_H: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K (CODATA 2018, exact).
pub const BOLTZMANN_K: f64 = 1.380_649e-23;

/// Transmitter family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceKind {
    /// Zero-mean two-mode Gaussian source with correlation `c`.
    GenericGaussian,
    /// Single-mode coherent-state benchmark.
    Coherent,
}

/// Transmitter specification: mean signal photons per mode and, for the
/// generic family, the signal-idler quadrature correlation C.
#[derive(Debug, Clone, Copy)]
pub struct SourceSpec {
    pub kind: SourceKind,
    pub n_s: f64,
    pub c: f64,
}

impl SourceSpec {
    /// Generic Gaussian source; requires 0 <= c <= sqrt(n_s (n_s + 1)).
    pub fn generic(n_s: f64, c: f64) -> Result<Self> {
        if !(n_s >= 0.0) {
            return Err(Error::OutOfRange(format!("n_s = {n_s} must be >= 0")));
        }
        let cq = max_correlation(n_s);
        if !(0.0..=cq + 1e-12).contains(&c) {
            return Err(Error::Unphysical(format!(
                "correlation c = {c} outside [0, C_q = {cq}]"
            )));
        }
        Ok(SourceSpec {
            kind: SourceKind::GenericGaussian,
            n_s,
            c,
        })
    }

    /// Coherent-state benchmark at the same per-mode energy.
    pub fn coherent(n_s: f64) -> Result<Self> {
        if !(n_s >= 0.0) {
            return Err(Error::OutOfRange(format!("n_s = {n_s} must be >= 0")));
        }
        Ok(SourceSpec {
            kind: SourceKind::Coherent,
            n_s,
            c: 0.0,
        })
    }
}

/// Maximal quadrature correlation C_q = sqrt(N_s (N_s + 1)) at energy n_s.
pub fn max_correlation(n_s: f64) -> f64 {
    (n_s * (n_s + 1.0)).sqrt()
}

/// Target channel: reflectivity kappa and background occupation n_b.
#[derive(Debug, Clone, Copy)]
pub struct ChannelSpec {
    pub kappa: f64,
    pub n_b: f64,
}

impl ChannelSpec {
    pub fn new(kappa: f64, n_b: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::OutOfRange(format!("kappa = {kappa} outside (0, 1)")));
        }
        if !(n_b > 0.0) {
            return Err(Error::OutOfRange(format!("n_b = {n_b} must be > 0")));
        }
        Ok(ChannelSpec { kappa, n_b })
    }
}

/// Physical radar parameters tying the abstract channel to hardware.
///
/// The target cross-section never enters on its own: the ideal pencil beam
/// G = 4 pi R^2 / sigma exactly compensates the forward spreading, leaving
/// kappa = A_R / (4 pi R)^2. Priors are fixed at (1/2, 1/2); every factor
/// 1/2 in the symmetric bounds assumes them.
#[derive(Debug, Clone, Copy)]
pub struct LinkBudget {
    pub freq_hz: f64,
    pub temp_k: f64,
    pub area_rx_m2: f64,
    pub range_m: f64,
    pub pulses: u64,
    /// Free-space transmissivity form factor; fixed to 1.
    pub form_factor: f64,
    /// Prior probabilities (P(H0), P(H1)); fixed to (1/2, 1/2).
    pub priors: (f64, f64),
}

impl LinkBudget {
    pub fn new(freq_hz: f64, temp_k: f64, area_rx_m2: f64, range_m: f64, pulses: u64) -> Result<Self> {
        for (name, v) in [
            ("freq_hz", freq_hz),
            ("temp_k", temp_k),
            ("area_rx_m2", area_rx_m2),
            ("range_m", range_m),
            ("pulses", pulses as f64),
        ] {
            if !(v > 0.0) {
                return Err(Error::OutOfRange(format!("{name} = {v} must be > 0")));
            }
        }
        Ok(LinkBudget {
            freq_hz,
            temp_k,
            area_rx_m2,
            range_m,
            pulses,
            form_factor: 1.0,
            priors: (0.5, 0.5),
        })
    }
}

/// The two return-plus-idler states under H0 (target absent) and H1.
#[derive(Debug, Clone)]
pub struct HypothesisPair {
    pub rho0: GaussianState,
    pub rho1: GaussianState,
    /// Which transmitter produced the pair: "generic" or "coherent".
    pub label: &'static str,
}

/// Correlation interpolation C(p) = p C_d + (1 - p) C_q between the TMSV
/// point (p = 0) and the just-separable point (p = 1).
pub fn correlation_of_p(n_s: f64, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("p = {p} outside [0, 1]")));
    }
    Ok(p * n_s + (1.0 - p) * max_correlation(n_s))
}

/// Two-mode source state with diagonal blocks S = n_s + 1/2 and correlation
/// blocks ±c, in (q1, q2, p1, p2) ordering.
pub fn generic_source_state(n_s: f64, c: f64) -> Result<GaussianState> {
    let spec = SourceSpec::generic(n_s, c)?;
    let s = spec.n_s + 0.5;
    let cov = DMatrix::from_row_slice(
        4,
        4,
        &[
            s, c, 0.0, 0.0, //
            c, s, 0.0, 0.0, //
            0.0, 0.0, s, -c, //
            0.0, 0.0, -c, s,
        ],
    );
    GaussianState::zero_mean(cov)
}

/// Return-plus-idler pair for the generic source.
///
/// H0: diag(B, S) per quadrature with B = n_b + 1/2 (background replaces the
/// return). H1: return variance A = kappa n_s + B with off-diagonal
/// ±sqrt(kappa) c against the retained idler.
pub fn hypothesis_pair_generic(source: &SourceSpec, channel: &ChannelSpec) -> Result<HypothesisPair> {
    if source.kind != SourceKind::GenericGaussian {
        return Err(Error::OutOfRange(
            "hypothesis_pair_generic requires a generic Gaussian source".to_string(),
        ));
    }
    let s = source.n_s + 0.5;
    let b = channel.n_b + 0.5;
    let a = channel.kappa * source.n_s + b;
    let rc = channel.kappa.sqrt() * source.c;

    let cov0 = DMatrix::from_row_slice(
        4,
        4,
        &[
            b, 0.0, 0.0, 0.0, //
            0.0, s, 0.0, 0.0, //
            0.0, 0.0, b, 0.0, //
            0.0, 0.0, 0.0, s,
        ],
    );
    let cov1 = DMatrix::from_row_slice(
        4,
        4,
        &[
            a, rc, 0.0, 0.0, //
            rc, s, 0.0, 0.0, //
            0.0, 0.0, a, -rc, //
            0.0, 0.0, -rc, s,
        ],
    );
    Ok(HypothesisPair {
        rho0: GaussianState::zero_mean(cov0)?,
        rho1: GaussianState::zero_mean(cov1)?,
        label: "generic",
    })
}

/// Coherent-state benchmark pair: a single return mode, thermal CM
/// (n_b + 1/2) I under both hypotheses, displaced by (sqrt(2 kappa n_s), 0)
/// under H1.
pub fn hypothesis_pair_coherent(n_s: f64, channel: &ChannelSpec) -> Result<HypothesisPair> {
    if !(n_s >= 0.0) {
        return Err(Error::OutOfRange(format!("n_s = {n_s} must be >= 0")));
    }
    let cov = DMatrix::from_diagonal_element(2, 2, channel.n_b + 0.5);
    let mean1 = DVector::from_vec(vec![(2.0 * channel.kappa * n_s).sqrt(), 0.0]);
    Ok(HypothesisPair {
        rho0: GaussianState::zero_mean(cov.clone())?,
        rho1: GaussianState::new(mean1, cov)?,
        label: "coherent",
    })
}

/// Thermal background occupation 1 / (exp(h nu / k_B T) - 1) at carrier
/// `freq_hz` and temperature `temp_k`. Returns 0 when h nu / k_B T > 700.
pub fn planck_occupation(freq_hz: f64, temp_k: f64) -> Result<f64> {
    if !(freq_hz > 0.0 && temp_k > 0.0) {
        return Err(Error::OutOfRange(format!(
            "freq_hz = {freq_hz}, temp_k = {temp_k} must be > 0"
        )));
    }
    let x = PLANCK_H * freq_hz / (BOLTZMANN_K * temp_k);
    if x > 700.0 {
        return Ok(0.0);
    }
    Ok(1.0 / x.exp_m1())
}

/// Result of converting between range and channel reflectivity under the
/// ideal pencil-beam assumption.
#[derive(Debug, Clone, Copy)]
pub struct LinkConversion {
    pub kappa: f64,
    pub range_m: f64,
    /// G sigma = 4 pi R^2: the pencil-beam gain times the cross-section it
    /// subtends. The gain itself is only defined relative to sigma.
    pub gain_sigma_product_m2: f64,
}

/// kappa = A_R / (4 pi R)^2 for a given range.
pub fn kappa_of_range(area_rx_m2: f64, range_m: f64) -> Result<LinkConversion> {
    if !(area_rx_m2 > 0.0 && range_m > 0.0) {
        return Err(Error::OutOfRange(
            "area and range must be positive".to_string(),
        ));
    }
    let kappa = area_rx_m2 / (4.0 * std::f64::consts::PI * range_m).powi(2);
    if kappa >= 1.0 {
        return Err(Error::NotInHighLossRegime(kappa));
    }
    Ok(LinkConversion {
        kappa,
        range_m,
        gain_sigma_product_m2: 4.0 * std::f64::consts::PI * range_m * range_m,
    })
}

/// R = (1 / 4 pi) sqrt(A_R / kappa), the inverse of [`kappa_of_range`].
pub fn range_of_kappa(area_rx_m2: f64, kappa: f64) -> Result<LinkConversion> {
    if !(area_rx_m2 > 0.0 && kappa > 0.0) {
        return Err(Error::OutOfRange(
            "area and kappa must be positive".to_string(),
        ));
    }
    if kappa >= 1.0 {
        return Err(Error::NotInHighLossRegime(kappa));
    }
    let range_m = (area_rx_m2 / kappa).sqrt() / (4.0 * std::f64::consts::PI);
    Ok(LinkConversion {
        kappa,
        range_m,
        gain_sigma_product_m2: 4.0 * std::f64::consts::PI * range_m * range_m,
    })
}

/// Per-pulse signal-to-noise ratio gamma = kappa n_s / n_b.
#[derive(Debug, Clone, Copy)]
pub struct Snr {
    pub gamma: f64,
    pub gamma_db: f64,
}

pub fn snr(kappa: f64, n_s: f64, n_b: f64) -> Result<Snr> {
    if !(kappa > 0.0 && n_s > 0.0 && n_b > 0.0) {
        return Err(Error::OutOfRange(
            "kappa, n_s, n_b must be positive".to_string(),
        ));
    }
    let gamma = kappa * n_s / n_b;
    Ok(Snr {
        gamma,
        gamma_db: 10.0 * gamma.log10(),
    })
}
