//! Asymmetric quantum hypothesis testing: Gibbs matrices, the exact Gaussian
//! relative entropy D(rho0||rho1) and relative-entropy variance V, their
//! large-background expansions, the exponent-advantage ratio, and
//! second-order receiver-operating-characteristic upper bounds.
//!
//! Direction convention: rho0 is the target-absent state; the missed
//! detection probability decays as exp(-M D(rho0||rho1)).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::{symplectic_form, williamson, GaussianState};
use crate::scenario::HypothesisPair;
use crate::specfun::normal_quantile;

/// Vacuum-floor guard for the Gibbs matrix: modes with nu below this are
/// treated as pure and rejected.
const GIBBS_TOL: f64 = 1e-9;

/// Relative entropy and its variance, in nats per copy.
#[derive(Debug, Clone, Copy)]
pub struct SteinQuantities {
    pub d: f64,
    pub v: f64,
    /// "exact" (Gaussian formulas) or "asymptotic" (large-background).
    pub provenance: &'static str,
}

/// A point of a receiver operating characteristic.
#[derive(Debug, Clone, Copy)]
pub struct RocPoint {
    pub p_fa: f64,
    /// Clamped to [0, 1]; deep tails underflow to 0 in linear domain.
    pub p_md: f64,
    /// ln p_md, clamped to <= 0; the quantity ROC tables report.
    pub log_p_md: f64,
    /// Which formula produced the point; "(vacuous)" marks a clamped bound.
    pub source_tag: &'static str,
}

impl RocPoint {
    pub(crate) fn from_log(p_fa: f64, log_p_md: f64, tag: &'static str) -> RocPoint {
        let clamped = log_p_md.min(0.0);
        RocPoint {
            p_fa,
            p_md: clamped.exp(),
            log_p_md: clamped,
            source_tag: if log_p_md > 0.0 { "(vacuous)" } else { tag },
        }
    }
}

/// Gibbs matrix of a covariance matrix: the quadratic form G with
/// rho = exp(-x^T G x / 2) / Z. Through the Williamson form,
/// G = S^{-T} [g(nu) ⊕ g(nu)] S^{-1} with g(nu) = ln((nu+1/2)/(nu-1/2)).
pub fn gibbs_matrix(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let dec = williamson(cov)?;
    let n = dec.nu.len();
    for &nu in &dec.nu {
        if nu <= 0.5 + GIBBS_TOL {
            return Err(Error::SingularGibbs(nu));
        }
    }
    let diag = DVector::from_fn(2 * n, |i, _| {
        let nu = dec.nu[i % n];
        ((nu + 0.5) / (nu - 0.5)).ln()
    });
    let s_inv = dec.s_inv();
    Ok(s_inv.transpose() * DMatrix::from_diagonal(&diag) * s_inv)
}

/// ln det(V + i Omega / 2) evaluated through the symplectic spectrum as
/// sum_k ln(nu_k^2 - 1/4); real and stable for mixed states.
fn ln_det_v_plus_iomega_half(nu: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &x in nu {
        let arg = x * x - 0.25;
        if arg <= 0.0 {
            return Err(Error::SingularGibbs(x));
        }
        total += arg.ln();
    }
    Ok(total)
}

struct GibbsData {
    g: DMatrix<f64>,
    ln_det: f64,
}

fn gibbs_data(cov: &DMatrix<f64>) -> Result<GibbsData> {
    let dec = williamson(cov)?;
    for &nu in &dec.nu {
        if nu <= 0.5 + GIBBS_TOL {
            return Err(Error::SingularGibbs(nu));
        }
    }
    let n = dec.nu.len();
    let diag = DVector::from_fn(2 * n, |i, _| {
        let nu = dec.nu[i % n];
        ((nu + 0.5) / (nu - 0.5)).ln()
    });
    let s_inv = dec.s_inv();
    Ok(GibbsData {
        g: s_inv.transpose() * DMatrix::from_diagonal(&diag) * s_inv,
        ln_det: ln_det_v_plus_iomega_half(&dec.nu)?,
    })
}

/// Sigma(V0, V1) = [ln det(V1 + i Omega/2) + Tr(V0 G1) + delta^T G1 delta]/2.
fn sigma_term(v0: &DMatrix<f64>, delta: &DVector<f64>, g1: &GibbsData) -> f64 {
    let tr = (v0 * &g1.g).trace();
    let quad = delta.dot(&(&g1.g * delta));
    0.5 * (g1.ln_det + tr + quad)
}

/// Exact Gaussian relative entropy and variance for a hypothesis pair:
/// D = -Sigma(V0, V0) + Sigma(V0, V1) and
/// V = Tr[(Gamma V0)^2]/2 + Tr[(Gamma Omega)^2]/8 + delta^T G1 V0 G1 delta,
/// Gamma = G0 - G1. Requires every mode of both states mixed.
pub fn stein_quantities_exact(pair: &HypothesisPair) -> Result<SteinQuantities> {
    stein_exact_states(&pair.rho0, &pair.rho1)
}

pub(crate) fn stein_exact_states(
    rho0: &GaussianState,
    rho1: &GaussianState,
) -> Result<SteinQuantities> {
    if rho0.n_modes != rho1.n_modes {
        return Err(Error::Dimension(format!(
            "mode counts differ: {} vs {}",
            rho0.n_modes, rho1.n_modes
        )));
    }
    let delta = &rho0.mean - &rho1.mean;
    let g0 = gibbs_data(&rho0.cov)?;
    let g1 = gibbs_data(&rho1.cov)?;

    let zero = DVector::zeros(delta.len());
    let d = -sigma_term(&rho0.cov, &zero, &g0) + sigma_term(&rho0.cov, &delta, &g1);
    if d < -1e-10 {
        return Err(Error::NegativeRelativeEntropy(d));
    }

    let gamma = &g0.g - &g1.g;
    let omega = symplectic_form(rho0.n_modes).omega;
    let gv = &gamma * &rho0.cov;
    let go = &gamma * &omega;
    let quad = {
        let g1d = &g1.g * &delta;
        g1d.dot(&(&rho0.cov * &g1d))
    };
    let v = 0.5 * (&gv * &gv).trace() + 0.125 * (&go * &go).trace() + quad;

    Ok(SteinQuantities {
        d: d.max(0.0),
        v: v.max(0.0),
        provenance: "exact",
    })
}

/// Large-background expansions: d = (kappa C^2 / n_b) ln(1 + 1/n_s) and
/// v = (kappa C^2 (2 n_s + 1) / n_b) ln^2(1 + 1/n_s).
pub fn stein_quantities_asymptotic(n_s: f64, c: f64, kappa: f64, n_b: f64) -> Result<SteinQuantities> {
    if !(n_b > 0.0) {
        return Err(Error::OutOfRange(format!("n_b = {n_b} must be > 0")));
    }
    if !(n_s > 0.0) {
        return Err(Error::OutOfRange(format!("n_s = {n_s} must be > 0")));
    }
    let log_term = (1.0 + 1.0 / n_s).ln();
    let base = kappa * c * c / n_b;
    Ok(SteinQuantities {
        d: base * log_term,
        v: base * (2.0 * n_s + 1.0) * log_term * log_term,
        provenance: "asymptotic",
    })
}

/// Error-exponent ratio of the generic source over the coherent-state
/// benchmark: A = (C^2 / n_s) ln(1 + 1/n_s).
pub fn advantage_ratio(c: f64, n_s: f64) -> Result<f64> {
    if !(n_s > 0.0) {
        return Err(Error::OutOfRange(format!("n_s = {n_s} must be > 0")));
    }
    Ok(c * c / n_s * (1.0 + 1.0 / n_s).ln())
}

/// Second-order missed-detection upper bound at type-I level epsilon:
/// ln p_md = -[m d + sqrt(m v) Phi^{-1}(epsilon)], O(1) term set to zero,
/// clamped to [0, 1] where the bound is vacuous.
pub fn second_order_pmd(stein: &SteinQuantities, m: u64, epsilon: f64) -> Result<RocPoint> {
    if m < 1 {
        return Err(Error::OutOfRange("m must be >= 1".to_string()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::OutOfRange(format!("epsilon = {epsilon} outside (0, 1)")));
    }
    let mf = m as f64;
    let log_p_md = -(mf * stein.d + (mf * stein.v).sqrt() * normal_quantile(epsilon)?);
    Ok(RocPoint::from_log(epsilon, log_p_md, "gen-second-order"))
}

/// Generic-source ROC upper bound in the large-M, large-background regime;
/// algebraically identical to `second_order_pmd` applied to the asymptotic
/// Stein quantities. Documented validity: m >= ~1e7, n_b >= ~1e2.
pub fn roc_gen(p_fa: f64, m: u64, n_s: f64, c: f64, kappa: f64, n_b: f64) -> Result<RocPoint> {
    if !(p_fa > 0.0 && p_fa < 1.0) {
        return Err(Error::OutOfRange(format!("p_fa = {p_fa} outside (0, 1)")));
    }
    if m < 1 {
        return Err(Error::OutOfRange("m must be >= 1".to_string()));
    }
    let gamma = kappa * n_s / n_b;
    let root = (m as f64 * gamma / n_s).sqrt();
    let lambda = root * c + (2.0 * n_s + 1.0).sqrt() * normal_quantile(p_fa)?;
    let log_p_md = -(root * lambda * c * (1.0 + 1.0 / n_s).ln());
    Ok(RocPoint::from_log(p_fa, log_p_md, "gen-roc-ub"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{
        hypothesis_pair_coherent, hypothesis_pair_generic, max_correlation, ChannelSpec,
        SourceSpec,
    };

    fn coherent_pair(n_s: f64, kappa: f64, n_b: f64) -> HypothesisPair {
        hypothesis_pair_coherent(n_s, &ChannelSpec::new(kappa, n_b).unwrap()).unwrap()
    }

    fn generic_pair(n_s: f64, c: f64, kappa: f64, n_b: f64) -> HypothesisPair {
        let src = SourceSpec::generic(n_s, c).unwrap();
        hypothesis_pair_generic(&src, &ChannelSpec::new(kappa, n_b).unwrap()).unwrap()
    }

    #[test]
    fn gibbs_thermal_ln2() {
        let cov = DMatrix::from_diagonal_element(2, 2, 1.5);
        let g = gibbs_matrix(&cov).unwrap();
        let want = DMatrix::from_diagonal_element(2, 2, 2.0_f64.ln());
        assert!((g - want).norm() < 1e-12);
    }

    #[test]
    fn gibbs_infinite_temperature_vanishes() {
        let cov = DMatrix::from_diagonal_element(2, 2, 1e8);
        let g = gibbs_matrix(&cov).unwrap();
        assert!(g.norm() < 1e-7);
    }

    #[test]
    fn gibbs_pure_rejected() {
        let tmsv = crate::scenario::generic_source_state(1.0, max_correlation(1.0)).unwrap();
        assert!(matches!(
            gibbs_matrix(&tmsv.cov),
            Err(Error::SingularGibbs(_))
        ));
    }

    #[test]
    fn stein_identical_states_zero() {
        let pair = HypothesisPair {
            rho0: GaussianState::zero_mean(DMatrix::from_diagonal_element(2, 2, 1.7)).unwrap(),
            rho1: GaussianState::zero_mean(DMatrix::from_diagonal_element(2, 2, 1.7)).unwrap(),
            label: "generic",
        };
        let s = stein_quantities_exact(&pair).unwrap();
        assert!(s.d.abs() < 1e-14);
        assert!(s.v.abs() < 1e-14);
    }

    #[test]
    fn stein_coherent_closed_form() {
        // D_CS = kappa n_s ln(1 + 1/n_b), V_CS = kappa n_s (2 n_b + 1) ln^2.
        let (n_s, kappa, n_b) = (1.0, 0.01, 1.0);
        let s = stein_quantities_exact(&coherent_pair(n_s, kappa, n_b)).unwrap();
        let d_want = kappa * n_s * (1.0 + 1.0 / n_b).ln();
        let v_want = kappa * n_s * (2.0 * n_b + 1.0) * (1.0 + 1.0 / n_b).ln().powi(2);
        assert!((s.d - 6.931471805599e-3).abs() < 1e-12);
        assert!((s.v - 1.441359041755e-2).abs() < 1e-12);
        assert!(((s.d - d_want) / d_want).abs() < 1e-10);
        assert!(((s.v - v_want) / v_want).abs() < 1e-10);
    }

    #[test]
    fn stein_coherent_closed_form_grid() {
        for &kappa in &[1e-3, 1e-2, 0.1] {
            for &n_s in &[0.1, 1.0, 10.0] {
                for &n_b in &[0.5, 1.0, 10.0, 100.0] {
                    let s = stein_quantities_exact(&coherent_pair(n_s, kappa, n_b)).unwrap();
                    let d_want = kappa * n_s * (1.0 + 1.0 / n_b).ln();
                    let v_want =
                        kappa * n_s * (2.0 * n_b + 1.0) * (1.0 + 1.0 / n_b).ln().powi(2);
                    assert!(
                        ((s.d - d_want) / d_want).abs() < 1e-10,
                        "D at ({kappa}, {n_s}, {n_b})"
                    );
                    assert!(
                        ((s.v - v_want) / v_want).abs() < 1e-10,
                        "V at ({kappa}, {n_s}, {n_b})"
                    );
                }
            }
        }
    }

    #[test]
    fn stein_asymptotic_values() {
        let s = stein_quantities_asymptotic(1.0, max_correlation(1.0), 0.01, 100.0).unwrap();
        assert!((s.d - 1.386294e-4).abs() < 1e-9);

        let z = stein_quantities_asymptotic(1.0, 0.0, 0.01, 100.0).unwrap();
        assert_eq!(z.d, 0.0);
        assert_eq!(z.v, 0.0);
    }

    #[test]
    fn stein_exact_close_to_asymptotic_bright() {
        let (n_s, kappa, n_b) = (1.0, 1e-3, 1e3);
        let c = max_correlation(n_s);
        let exact = stein_quantities_exact(&generic_pair(n_s, c, kappa, n_b)).unwrap();
        let asym = stein_quantities_asymptotic(n_s, c, kappa, n_b).unwrap();
        assert!(((exact.d - asym.d) / exact.d).abs() < 0.02);
        assert!(((exact.v - asym.v) / exact.v).abs() < 0.02);
    }

    #[test]
    fn stein_gap_halves_when_background_doubles() {
        let (n_s, kappa) = (1.0, 1e-3);
        let c = max_correlation(n_s);
        let mut gaps = Vec::new();
        let mut n_b = 100.0;
        while n_b <= 1600.0 {
            let exact = stein_quantities_exact(&generic_pair(n_s, c, kappa, n_b)).unwrap();
            let asym = stein_quantities_asymptotic(n_s, c, kappa, n_b).unwrap();
            gaps.push(((exact.d - asym.d) / exact.d).abs());
            n_b *= 2.0;
        }
        for w in gaps.windows(2) {
            let ratio = w[1] / w[0];
            assert!((0.4..=0.6).contains(&ratio), "gap ratio {ratio}");
        }
    }

    #[test]
    fn advantage_ratio_values() {
        assert!((advantage_ratio(2.0_f64.sqrt(), 1.0).unwrap() - 2.0 * 2.0_f64.ln()).abs() < 1e-12);
        assert!((advantage_ratio(1.0, 1.0).unwrap() - 2.0_f64.ln()).abs() < 1e-12);

        // TMSV and just-separable ratios converge at moderate energies.
        let n_s = 20.0;
        let a_q = advantage_ratio(max_correlation(n_s), n_s).unwrap();
        let a_d = advantage_ratio(n_s, n_s).unwrap();
        assert!((a_q - a_d) / a_q < 0.05);
    }

    #[test]
    fn second_order_pmd_examples() {
        let s = SteinQuantities {
            d: 1e-4,
            v: 3e-4,
            provenance: "exact",
        };
        // epsilon = 1/2 removes the variance term.
        let p = second_order_pmd(&s, 1000, 0.5).unwrap();
        assert!((p.log_p_md + 0.1).abs() < 1e-9);

        // d = v = 0 gives a vacuous bound p_md = 1.
        let z = SteinQuantities {
            d: 0.0,
            v: 0.0,
            provenance: "exact",
        };
        let pz = second_order_pmd(&z, 10, 0.3).unwrap();
        assert_eq!(pz.p_md, 1.0);
        assert_eq!(pz.log_p_md, 0.0);

        // Monotone in epsilon.
        let mut prev = f64::INFINITY;
        for &eps in &[1e-3, 1e-2, 0.1, 0.3, 0.5, 0.9] {
            let pt = second_order_pmd(&s, 100_000_000, eps).unwrap();
            assert!(pt.log_p_md <= prev + 1e-12);
            prev = pt.log_p_md;
        }
    }

    #[test]
    fn roc_gen_matches_second_order_of_asymptotic() {
        let (m, n_b) = (100_000_000_u64, 6042.0);
        for &n_s in &[0.01, 1.0] {
            for &p in &[0.0, 0.5, 1.0] {
                let c = crate::scenario::correlation_of_p(n_s, p).unwrap();
                for &kappa in &[6.3326e-4, 6.3326e-2] {
                    for &p_fa in &[1e-3, 0.1, 0.5, 0.9] {
                        let direct = roc_gen(p_fa, m, n_s, c, kappa, n_b).unwrap();
                        let stein = stein_quantities_asymptotic(n_s, c, kappa, n_b).unwrap();
                        let via = second_order_pmd(&stein, m, p_fa).unwrap();
                        let diff = (direct.log_p_md - via.log_p_md).abs();
                        let scale = direct.log_p_md.abs().max(1.0);
                        assert!(diff / scale < 1e-12, "mismatch at ({n_s}, {p}, {kappa}, {p_fa})");
                    }
                }
            }
        }
    }

    #[test]
    fn roc_gen_uncorrelated_vacuous() {
        let p = roc_gen(0.1, 1000, 0.5, 0.0, 0.01, 10.0).unwrap();
        assert_eq!(p.p_md, 1.0);
    }

    #[test]
    fn roc_gen_monotone_in_p_fa_and_c() {
        let (m, n_s, kappa, n_b) = (100_000_000_u64, 0.01, 6.3326e-2, 6042.0);
        let cq = max_correlation(n_s);
        let mut prev = f64::INFINITY;
        for k in 1..40 {
            let p_fa = k as f64 / 40.0;
            let pt = roc_gen(p_fa, m, n_s, cq, kappa, n_b).unwrap();
            assert!(pt.log_p_md <= prev + 1e-12);
            prev = pt.log_p_md;
        }
        let mut prev_c = 0.0;
        for k in 0..=10 {
            let c = cq * k as f64 / 10.0;
            let pt = roc_gen(0.3, m, n_s, c, kappa, n_b).unwrap();
            assert!(pt.log_p_md <= prev_c + 1e-12);
            prev_c = pt.log_p_md;
        }
    }

    #[test]
    fn stein_nonnegative_on_random_pairs() {
        let mut state = 0xa4093822299f31d0_u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let n_s = 0.05 + 2.0 * next();
            let c = next() * max_correlation(n_s);
            let kappa = 0.05 + 0.5 * next();
            let n_b = 0.1 + 3.0 * next();
            let s = stein_quantities_exact(&generic_pair(n_s, c, kappa, n_b)).unwrap();
            assert!(s.d >= 0.0);
            assert!(s.v >= 0.0);
        }
    }
}
