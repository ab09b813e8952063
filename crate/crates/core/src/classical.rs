//! Classical benchmark ROCs: coherent states with homodyne detection and
//! coherent integration over M pulses, and the single-pulse Marcum bound
//! that overestimates non-coherent integration (a lower bound to Marcum's
//! classical performance).

use crate::asymmetric::RocPoint;
use crate::error::{Error, Result};
use crate::specfun::{erfc_inv, log_erfc, marcum_one_minus_q1};

/// Parameters of the classical benchmark ROCs.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalRocParams {
    pub m: u64,
    pub kappa: f64,
    pub n_s: f64,
    pub n_b: f64,
}

impl ClassicalRocParams {
    pub fn new(m: u64, kappa: f64, n_s: f64, n_b: f64) -> Result<Self> {
        if m < 1 {
            return Err(Error::OutOfRange("m must be >= 1".to_string()));
        }
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::OutOfRange(format!("kappa = {kappa} outside (0, 1)")));
        }
        if !(n_s >= 0.0 && n_b > 0.0) {
            return Err(Error::OutOfRange(
                "n_s must be >= 0 and n_b > 0".to_string(),
            ));
        }
        Ok(ClassicalRocParams { m, kappa, n_s, n_b })
    }
}

/// Homodyne-detection ROC with coherent integration: the false-alarm level
/// fixes the threshold x = sqrt(M (2 n_b + 1)) erfc_inv(2 p_fa), and
/// p_md = erfc[(M sqrt(2 kappa n_s) - x) / sqrt(M (2 n_b + 1))] / 2,
/// evaluated through log_erfc so deep tails stay finite in log domain.
pub fn homodyne_roc(p_fa: f64, params: &ClassicalRocParams) -> Result<RocPoint> {
    if !(p_fa > 0.0 && p_fa < 1.0) {
        return Err(Error::OutOfRange(format!("p_fa = {p_fa} outside (0, 1)")));
    }
    let mf = params.m as f64;
    let noise = (mf * (2.0 * params.n_b + 1.0)).sqrt();
    let x = noise * erfc_inv(2.0 * p_fa)?;
    let signal = mf * (2.0 * params.kappa * params.n_s).sqrt();
    let log_p_md = (0.5_f64).ln() + log_erfc((signal - x) / noise);
    Ok(RocPoint::from_log(p_fa, log_p_md, "homodyne"))
}

/// Single-pulse Marcum ROC at total SNR m_gamma = M kappa n_s / n_b:
/// p_md = 1 - Q(sqrt(2 M gamma), sqrt(-2 ln p_fa)). Labeled a lower bound
/// to the M-pulse non-coherent classical performance.
pub fn marcum_roc(p_fa: f64, m_gamma: f64) -> Result<RocPoint> {
    if !(p_fa > 0.0 && p_fa < 1.0) {
        return Err(Error::OutOfRange(format!("p_fa = {p_fa} outside (0, 1)")));
    }
    if !(m_gamma >= 0.0) {
        return Err(Error::OutOfRange(format!("m_gamma = {m_gamma} must be >= 0")));
    }
    let x = (2.0 * m_gamma).sqrt();
    let y = (-2.0 * p_fa.ln()).sqrt();
    let p_md = marcum_one_minus_q1(x, y)?;
    let log_p_md = if p_md > 0.0 { p_md.ln() } else { f64::MIN };
    Ok(RocPoint::from_log(p_fa, log_p_md, "marcum-lb"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: u64, kappa: f64, n_s: f64, n_b: f64) -> ClassicalRocParams {
        ClassicalRocParams::new(m, kappa, n_s, n_b).unwrap()
    }

    #[test]
    fn homodyne_no_signal_complementary() {
        // kappa -> 0: p_md = 1 - p_fa.
        let p = params(100, 1e-300, 0.0, 6042.0);
        for &p_fa in &[1e-6, 1e-3, 0.2, 0.5, 0.9] {
            let pt = homodyne_roc(p_fa, &p).unwrap();
            assert!(
                (pt.p_md - (1.0 - p_fa)).abs() < 1e-12,
                "p_fa = {p_fa}: {}",
                pt.p_md
            );
        }
    }

    #[test]
    fn homodyne_midpoint_threshold_zero() {
        // p_fa = 1/2 makes x = 0 and p_md = erfc(M sqrt(2 kappa n_s)/noise)/2.
        let p = params(1000, 0.01, 1.0, 10.0);
        let pt = homodyne_roc(0.5, &p).unwrap();
        let mf = 1000.0;
        let want = 0.5
            * crate::specfun::erfc(
                mf * (2.0_f64 * 0.01 * 1.0).sqrt() / (mf * 21.0_f64).sqrt(),
            );
        assert!((pt.p_md - want).abs() < 1e-15);
    }

    #[test]
    fn homodyne_improves_with_pulses() {
        let mut prev = 0.0_f64;
        for &m in &[10_u64, 100, 1000, 10000] {
            let pt = homodyne_roc(0.01, &params(m, 1e-3, 1.0, 20.0)).unwrap();
            if prev != 0.0 {
                assert!(pt.log_p_md < prev);
            }
            prev = pt.log_p_md;
        }
    }

    #[test]
    fn homodyne_threshold_roundtrip() {
        // Re-applying the forward false-alarm formula to the threshold
        // recovers p_fa.
        let p = params(50_000, 1e-4, 0.5, 100.0);
        for &p_fa in &[1e-4, 0.03, 0.4] {
            let noise = (5e4_f64 * 201.0).sqrt();
            let x = noise * erfc_inv(2.0 * p_fa).unwrap();
            let back = 0.5 * crate::specfun::erfc(x / noise);
            assert!(((back - p_fa) / p_fa).abs() < 1e-9);
        }
    }

    #[test]
    fn homodyne_deep_tail_log_domain() {
        // Strong signal: linear p_md underflows, log stays finite.
        let p = params(100_000_000, 6.3326e-2, 1.0, 6042.0);
        let pt = homodyne_roc(0.5, &p).unwrap();
        assert!(pt.log_p_md < -1e3);
        assert!(pt.log_p_md.is_finite());
        assert_eq!(pt.p_md, 0.0);
    }

    #[test]
    fn marcum_zero_snr_complementary() {
        for &p_fa in &[1e-5, 1e-2, 0.3, 0.7] {
            let pt = marcum_roc(p_fa, 0.0).unwrap();
            assert!(
                (pt.p_md - (1.0 - p_fa)).abs() < 1e-10,
                "p_fa = {p_fa}: {}",
                pt.p_md
            );
        }
    }

    #[test]
    fn marcum_high_p_fa_vanishing_p_md() {
        let pt = marcum_roc(1.0 - 1e-12, 10.48).unwrap();
        assert!(pt.p_md < 1e-6);
    }

    #[test]
    fn marcum_valid_roc_in_fig2_regime() {
        // m_gamma = 10.48: monotone nonincreasing, within [0, 1].
        let mut prev = 1.0_f64;
        for k in 1..=60 {
            let p_fa = 10f64.powf(-6.0 + 6.0 * k as f64 / 61.0);
            let pt = marcum_roc(p_fa, 10.48).unwrap();
            assert!((0.0..=1.0).contains(&pt.p_md));
            assert!(pt.p_md <= prev + 1e-10);
            prev = pt.p_md;
        }
    }

    #[test]
    fn both_rocs_monotone_and_bounded() {
        let p = params(1_000, 0.05, 0.5, 5.0);
        let mut prev_h = 1.0_f64;
        let mut prev_m = 1.0_f64;
        for k in 1..=40 {
            let p_fa = k as f64 / 41.0;
            let h = homodyne_roc(p_fa, &p).unwrap();
            let mm = marcum_roc(p_fa, 0.05 * 0.5 / 5.0 * 1000.0).unwrap();
            assert!(h.p_md <= prev_h + 1e-12 && (0.0..=1.0).contains(&h.p_md));
            assert!(mm.p_md <= prev_m + 1e-10 && (0.0..=1.0).contains(&mm.p_md));
            prev_h = h.p_md;
            prev_m = mm.p_md;
        }
    }
}
