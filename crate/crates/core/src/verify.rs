//! Oracle-equivalence suite: every Gaussian closed form checked against the
//! truncated-Fock brute force, with convergence certificates from cutoff
//! doubling. This is the anti-regression core of the crate.

use nalgebra::DMatrix;

use crate::asymmetric::stein_exact_states;
use crate::error::Result;
use crate::fock::blocks::{align, BlockMatrix};
use crate::fock::{helstrom_blocks, s_overlap_blocks, stein_blocks, synth_state, StateSpec};
use crate::scenario::{hypothesis_pair_generic, max_correlation, ChannelSpec, SourceSpec};
use crate::symmetric::{qbb, qcb, s_overlap};

/// Absolute tolerance on the s-overlap against the brute force.
pub const TOL_C_S: f64 = 1e-6;
/// Absolute tolerance on relative entropy and its variance.
pub const TOL_STEIN: f64 = 1e-5;
/// Maximum shift of any reported value when every cutoff doubles.
pub const TOL_CERTIFICATE: f64 = 1e-8;
/// Maximum deviation of synthesized-state moments from the target CM.
pub const TOL_MOMENTS: f64 = 1e-8;

const S_VALUES: [f64; 3] = [0.3, 0.5, 0.7];

/// Verification record for one parameter point.
#[derive(Debug, Clone)]
pub struct PairCheck {
    pub n_s: f64,
    pub c: f64,
    pub kappa: f64,
    pub n_b: f64,
    pub cutoffs: Vec<usize>,
    /// |Gaussian - brute| for s in {0.3, 0.5, 0.7}.
    pub c_s_dev: [f64; 3],
    pub d_dev: f64,
    pub v_dev: f64,
    /// Brute Helstrom error, and the Gaussian Chernoff/Bhattacharyya bounds.
    pub helstrom: f64,
    pub qcb_bound: f64,
    pub qbb_bound: f64,
    pub ordering_ok: bool,
    pub tail_rho0: f64,
    pub tail_rho1: f64,
    /// Largest moment deviation of the synthesized rho1 from the target CM.
    pub moment_dev: f64,
    /// Largest shift of any reported value under cutoff doubling.
    pub certificate_shift: f64,
    pub pass: bool,
}

/// Aggregate report over the verification grid.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub pairs: Vec<PairCheck>,
    pub max_c_s_dev: f64,
    pub max_d_dev: f64,
    pub max_v_dev: f64,
    pub max_moment_dev: f64,
    pub max_certificate_shift: f64,
    pub all_ordering_ok: bool,
    pub pass: bool,
}

/// The verification grid of the acceptance suite.
pub fn default_grid() -> Vec<(f64, f64, f64, f64)> {
    let mut grid = Vec::new();
    for &n_s in &[0.1, 0.3, 0.5] {
        for &n_b in &[0.3, 1.0] {
            for &kappa in &[0.05, 0.2] {
                for c_kind in 0..3 {
                    let c = match c_kind {
                        0 => 0.0,
                        1 => n_s,
                        _ => max_correlation(n_s),
                    };
                    grid.push((n_s, c, kappa, n_b));
                }
            }
        }
    }
    grid
}

struct BruteQuantities {
    c_s: [f64; 3],
    helstrom: f64,
    d: f64,
    v: f64,
    tail0: f64,
    tail1: f64,
}

fn thermal_product_blocks(n_r: f64, n_i: f64, d_r: usize, d_i: usize) -> BlockMatrix {
    let pr = thermal_probs_vec(n_r, d_r);
    let pi = thermal_probs_vec(n_i, d_i);
    let dim = d_r * d_i;
    let groups: Vec<Vec<usize>> = (0..dim).map(|i| vec![i]).collect();
    let blocks = (0..dim)
        .map(|i| DMatrix::from_element(1, 1, pr[i / d_i] * pi[i % d_i]))
        .collect();
    BlockMatrix::from_parts(dim, groups, blocks)
}

fn thermal_probs_vec(n: f64, d: usize) -> Vec<f64> {
    if n <= 0.0 {
        let mut p = vec![0.0; d];
        p[0] = 1.0;
        return p;
    }
    let t = n / (n + 1.0);
    let mut p = Vec::with_capacity(d);
    let mut cur = 1.0 / (n + 1.0);
    for _ in 0..d {
        p.push(cur);
        cur *= t;
    }
    p
}

fn brute_quantities(
    n_s: f64,
    c: f64,
    kappa: f64,
    n_b: f64,
    d_r: usize,
    d_i: usize,
) -> Result<BruteQuantities> {
    let a = kappa * n_s + n_b + 0.5;
    let s_diag = n_s + 0.5;
    let co = kappa.sqrt() * c;
    let rho1 = crate::fock::synth_standard_form_for_verify(a, s_diag, co, d_r, d_i)?;
    let rho0 = thermal_product_blocks(n_b, n_s, d_r, d_i);
    let tail0 = 1.0 - rho0.trace();
    let tail1 = 1.0 - rho1.trace();
    let (b0, b1) = align(&rho0, &rho1);
    let c_s = [
        s_overlap_blocks(&b0, &b1, S_VALUES[0]),
        s_overlap_blocks(&b0, &b1, S_VALUES[1]),
        s_overlap_blocks(&b0, &b1, S_VALUES[2]),
    ];
    let helstrom = helstrom_blocks(&b0, &b1);
    let (d, v) = stein_blocks(&b0, &b1)?;
    Ok(BruteQuantities {
        c_s,
        helstrom,
        d,
        v,
        tail0,
        tail1,
    })
}

fn auto_cutoff(n: f64) -> usize {
    if n <= 1e-6 {
        return 25;
    }
    let share = crate::fock::DEFAULT_TAIL_TOL / 16.0;
    let t = n / (n + 1.0);
    ((share.ln() / t.ln()).ceil() as usize + 2).max(25)
}

/// Checks one grid point at the given (or auto) cutoffs.
pub fn check_pair(
    n_s: f64,
    c: f64,
    kappa: f64,
    n_b: f64,
    cutoff_override: Option<usize>,
) -> Result<PairCheck> {
    let d_r = cutoff_override.unwrap_or_else(|| auto_cutoff(kappa * n_s + n_b));
    let d_i = cutoff_override.unwrap_or_else(|| auto_cutoff(n_s));

    // Gaussian-formula side.
    let source = SourceSpec::generic(n_s, c)?;
    let channel = ChannelSpec::new(kappa, n_b)?;
    let pair = hypothesis_pair_generic(&source, &channel)?;
    let gauss_c_s: Vec<f64> = S_VALUES
        .iter()
        .map(|&s| s_overlap(&pair.rho0, &pair.rho1, s).map(|o| o.c_s))
        .collect::<Result<_>>()?;
    let stein = stein_exact_states(&pair.rho0, &pair.rho1)?;
    let qcb_bound = qcb(&pair, 1)?.p_err_bound;
    let qbb_bound = qbb(&pair, 1)?.p_err_bound;

    // Brute side: moment check through the public dense interface, then the
    // block kernels at base and doubled cutoffs.
    let a = kappa * n_s + n_b + 0.5;
    let co = kappa.sqrt() * c;
    let (rho1_dense, _) = synth_state(
        StateSpec::StandardForm {
            a,
            b: n_s + 0.5,
            c: co,
        },
        Some(&[d_r, d_i]),
    )?;
    let (mean1, cov1) = crate::fock::moments(&rho1_dense);
    let moment_dev = {
        let mut worst = mean1.amax();
        let diff = &cov1 - &pair.rho1.cov;
        worst = worst.max(diff.amax());
        worst
    };

    let base = brute_quantities(n_s, c, kappa, n_b, d_r, d_i)?;
    let doubled = brute_quantities(n_s, c, kappa, n_b, 2 * d_r, 2 * d_i)?;
    let certificate_shift = {
        let mut shift = (base.helstrom - doubled.helstrom).abs();
        for k in 0..3 {
            shift = shift.max((base.c_s[k] - doubled.c_s[k]).abs());
        }
        shift = shift.max((base.d - doubled.d).abs());
        shift.max((base.v - doubled.v).abs())
    };

    let mut c_s_dev = [0.0; 3];
    for k in 0..3 {
        c_s_dev[k] = (gauss_c_s[k] - base.c_s[k]).abs();
    }
    let d_dev = (stein.d - base.d).abs();
    let v_dev = (stein.v - base.v).abs();
    let ordering_ok = base.helstrom <= qcb_bound + 1e-10 && qcb_bound <= qbb_bound + 1e-12;

    let pass = c_s_dev.iter().all(|&x| x <= TOL_C_S)
        && d_dev <= TOL_STEIN
        && v_dev <= TOL_STEIN
        && moment_dev <= TOL_MOMENTS
        && certificate_shift <= TOL_CERTIFICATE
        && ordering_ok;

    Ok(PairCheck {
        n_s,
        c,
        kappa,
        n_b,
        cutoffs: vec![d_r, d_i],
        c_s_dev,
        d_dev,
        v_dev,
        helstrom: base.helstrom,
        qcb_bound,
        qbb_bound,
        ordering_ok,
        tail_rho0: base.tail0,
        tail_rho1: base.tail1,
        moment_dev,
        certificate_shift,
        pass,
    })
}

/// Runs the full grid; `cutoff_override` forces a uniform per-mode cutoff
/// (the error path surfaces as CutoffTooSmall).
pub fn oracle_equivalence_suite(cutoff_override: Option<usize>) -> Result<OracleReport> {
    let mut pairs = Vec::new();
    for (n_s, c, kappa, n_b) in default_grid() {
        pairs.push(check_pair(n_s, c, kappa, n_b, cutoff_override)?);
    }
    let max_c_s_dev = pairs
        .iter()
        .flat_map(|p| p.c_s_dev.iter().copied())
        .fold(0.0_f64, f64::max);
    let max_d_dev = pairs.iter().map(|p| p.d_dev).fold(0.0_f64, f64::max);
    let max_v_dev = pairs.iter().map(|p| p.v_dev).fold(0.0_f64, f64::max);
    let max_moment_dev = pairs.iter().map(|p| p.moment_dev).fold(0.0_f64, f64::max);
    let max_certificate_shift = pairs
        .iter()
        .map(|p| p.certificate_shift)
        .fold(0.0_f64, f64::max);
    let all_ordering_ok = pairs.iter().all(|p| p.ordering_ok);
    let pass = pairs.iter().all(|p| p.pass);
    Ok(OracleReport {
        pairs,
        max_c_s_dev,
        max_d_dev,
        max_v_dev,
        max_moment_dev,
        max_certificate_shift,
        all_ordering_ok,
        pass,
    })
}

/// Brute check of the coherent-state benchmark pair at small occupations:
/// returns (|C_1/2 dev|, |D dev|, |V dev|) against the Gaussian formulas.
pub fn coherent_pair_deviation(n_s: f64, kappa: f64, n_b: f64) -> Result<(f64, f64, f64)> {
    let channel = ChannelSpec::new(kappa, n_b)?;
    let pair = crate::scenario::hypothesis_pair_coherent(n_s, &channel)?;
    let gauss_c = s_overlap(&pair.rho0, &pair.rho1, 0.5)?.c_s;
    let stein = stein_exact_states(&pair.rho0, &pair.rho1)?;

    let d = auto_cutoff(n_b.max(kappa * n_s + n_b));
    let (rho0, _) = synth_state(StateSpec::Thermal { n: n_b }, Some(&[d]))?;
    let (rho1, _) = synth_state(
        StateSpec::DisplacedThermal {
            alpha: (kappa * n_s).sqrt(),
            n: n_b,
        },
        Some(&[d]),
    )?;
    let brute_c = crate::fock::brute_s_overlap(&rho0, &rho1, 0.5)?;
    let (brute_d, brute_v) = crate::fock::brute_stein(&rho0, &rho1)?;
    Ok((
        (gauss_c - brute_c).abs(),
        (stein.d - brute_d).abs(),
        (stein.v - brute_v).abs(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helstrom_below_bhattacharyya_on_random_pairs() {
        // 50 random small pairs: brute minimum error under the Gaussian
        // Bhattacharyya bound.
        let mut state = 0x452821e638d01377_u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for trial in 0..50 {
            let n_s = 0.05 + 0.45 * next();
            let c = next() * max_correlation(n_s);
            let kappa = 0.02 + 0.18 * next();
            let n_b = 0.1 + 0.9 * next();
            let d_r = auto_cutoff(kappa * n_s + n_b);
            let d_i = auto_cutoff(n_s);
            let brute = brute_quantities(n_s, c, kappa, n_b, d_r, d_i).unwrap();
            let source = SourceSpec::generic(n_s, c).unwrap();
            let channel = ChannelSpec::new(kappa, n_b).unwrap();
            let pair = hypothesis_pair_generic(&source, &channel).unwrap();
            let bound = qbb(&pair, 1).unwrap().p_err_bound;
            assert!(
                brute.helstrom <= bound + 1e-10,
                "trial {trial}: helstrom {} vs qbb {bound}",
                brute.helstrom
            );
        }
    }

    #[test]
    fn single_pair_within_tolerances() {
        let p = check_pair(0.3, max_correlation(0.3), 0.2, 1.0, None).unwrap();
        assert!(p.pass, "{p:?}");
        assert!(p.c_s_dev.iter().all(|&x| x < TOL_C_S));
        assert!(p.certificate_shift < TOL_CERTIFICATE);
    }

    #[test]
    fn tiny_cutoff_refused() {
        assert!(matches!(
            check_pair(0.3, 0.3, 0.2, 1.0, Some(6)),
            Err(crate::error::Error::CutoffTooSmall(_))
        ));
    }

    #[test]
    fn coherent_pair_brute_agreement() {
        let (dc, dd, dv) = coherent_pair_deviation(0.4, 0.2, 0.5).unwrap();
        assert!(dc < TOL_C_S, "C dev {dc}");
        assert!(dd < TOL_STEIN, "D dev {dd}");
        assert!(dv < TOL_STEIN, "V dev {dv}");
    }
}
