//! Multimode Gaussian states over quadratures x = (q_1..q_N, p_1..p_N),
//! with the vacuum-variance-1/2 convention, plus the symplectic machinery
//! the rest of the crate is built on: symplectic spectra, the Williamson
//! normal form and the two-mode PPT separability test.
//!
//! Physicality of a covariance matrix V is equivalent to every symplectic
//! eigenvalue nu_k of V satisfying nu_k >= 1/2; nu_k = 1/2 marks a pure mode.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Max tolerated |V - V^T| entry before a CM is rejected as asymmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Slack below the vacuum floor 1/2 tolerated in physicality checks.
pub const PHYSICALITY_TOL: f64 = 1e-10;
/// Residual tolerance (relative Frobenius) for the Williamson invariants.
pub const DECOMPOSITION_TOL: f64 = 1e-9;
/// Condition-number ceiling beyond which `williamson` refuses the input.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Symplectic form Omega = [[0, I_N], [-I_N, 0]] in (q.., p..) ordering.
#[derive(Debug, Clone)]
pub struct SymplecticForm {
    pub omega: DMatrix<f64>,
}

/// Omega for `n_modes` modes; satisfies Omega^2 = -I and Omega^T = -Omega.
pub fn symplectic_form(n_modes: usize) -> SymplecticForm {
    assert!(n_modes >= 1, "n_modes must be positive");
    let n = n_modes;
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        omega[(k, n + k)] = 1.0;
        omega[(n + k, k)] = -1.0;
    }
    SymplecticForm { omega }
}

/// An N-mode Gaussian state: mean vector and covariance matrix.
#[derive(Debug, Clone)]
pub struct GaussianState {
    pub n_modes: usize,
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds and validates a state. Checks dimensions, symmetry of `cov`
    /// (tolerance [`SYMMETRY_TOL`]) and physicality (all nu >= 1/2 within
    /// [`PHYSICALITY_TOL`]).
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "mean length {dim} is not twice a positive mode count"
            )));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::Dimension(format!(
                "cov is {}x{}, expected {dim}x{dim}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        let state = GaussianState {
            n_modes: dim / 2,
            mean,
            cov,
        };
        validate_state(state)
    }

    /// Zero-mean state with the given covariance matrix.
    pub fn zero_mean(cov: DMatrix<f64>) -> Result<Self> {
        let dim = cov.nrows();
        Self::new(DVector::zeros(dim), cov)
    }

    /// Symplectic spectrum of this state's CM, ascending.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_eigenvalues(&self.cov)
    }
}

/// Returns the state unchanged iff its covariance matrix is symmetric and
/// physical; otherwise `AsymmetricCov` or `Unphysical`.
pub fn validate_state(state: GaussianState) -> Result<GaussianState> {
    let asym = max_asymmetry(&state.cov);
    if asym > SYMMETRY_TOL {
        return Err(Error::AsymmetricCov(asym));
    }
    let nu = symplectic_eigenvalues(&state.cov)?;
    let nu_min = nu[0];
    if nu_min < 0.5 - PHYSICALITY_TOL {
        return Err(Error::Unphysical(format!(
            "min symplectic eigenvalue {nu_min} < 1/2"
        )));
    }
    Ok(state)
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Williamson normal form V = S (diag(nu) ⊕ diag(nu)) S^T with symplectic S.
#[derive(Debug, Clone)]
pub struct WilliamsonDecomposition {
    /// Symplectic eigenvalues, ascending, each >= 1/2 for a physical CM.
    pub nu: Vec<f64>,
    /// The symplectic matrix S of the normal form.
    pub s_mat: DMatrix<f64>,
}

impl WilliamsonDecomposition {
    /// diag(nu_1..nu_N, nu_1..nu_N) in the (q.., p..) ordering.
    pub fn v_oplus(&self) -> DMatrix<f64> {
        let n = self.nu.len();
        DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            if i == j {
                self.nu[i % n]
            } else {
                0.0
            }
        })
    }

    /// Reassembles S V^⊕ S^T; equals the decomposed CM up to the residual.
    pub fn reassemble(&self) -> DMatrix<f64> {
        let vd = self.v_oplus();
        &self.s_mat * vd * self.s_mat.transpose()
    }

    /// Inverse of S without a linear solve: S^{-1} = -Omega S^T Omega.
    pub fn s_inv(&self) -> DMatrix<f64> {
        let omega = symplectic_form(self.nu.len()).omega;
        -&omega * self.s_mat.transpose() * &omega
    }
}

/// Symmetric positive-definite square root via the spectral theorem.
fn sym_sqrt(v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let se = v.clone().symmetric_eigen();
    let mut vals = se.eigenvalues.clone();
    for x in vals.iter_mut() {
        if *x <= 0.0 {
            return Err(Error::Unphysical(format!(
                "covariance matrix not positive definite: eigenvalue {x}"
            )));
        }
        *x = x.sqrt();
    }
    let q = &se.eigenvectors;
    Ok(q * DMatrix::from_diagonal(&vals) * q.transpose())
}

/// Symplectic spectrum of a symmetric positive-definite CM: the moduli of
/// the eigenvalues of i Omega V, duplicates collapsed to N values, ascending.
///
/// Computed with real arithmetic: with A = V^{1/2} Omega V^{1/2} the matrix
/// A A^T is symmetric with eigenvalues {nu_k^2}, each twice.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = cov.nrows();
    if dim == 0 || !dim.is_multiple_of(2) || cov.ncols() != dim {
        return Err(Error::Dimension(format!(
            "covariance matrix is {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    let n = dim / 2;
    let w = sym_sqrt(&symmetrize(cov))?;
    let omega = symplectic_form(n).omega;
    let a = &w * &omega * &w;
    let aat = &a * a.transpose();
    let mut lam: Vec<f64> = aat.symmetric_eigen().eigenvalues.iter().copied().collect();
    lam.sort_by(|x, y| x.partial_cmp(y).expect("non-finite eigenvalue"));
    if lam.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonConvergent);
    }
    // Eigenvalues come in numerically-split pairs; collapse each pair.
    let mut nu = Vec::with_capacity(n);
    for k in 0..n {
        let a = lam[2 * k].max(0.0).sqrt();
        let b = lam[2 * k + 1].max(0.0).sqrt();
        nu.push(0.5 * (a + b));
    }
    refine_smallest_nu(&mut nu, cov);
    Ok(nu)
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    0.5 * (m + m.transpose())
}

/// Refine the smallest symplectic eigenvalue through det V = prod nu_k^2.
///
/// The eigensolver route carries absolute error ~ ||V||^2 eps into
/// nu_min^2, which downstream log/power functions amplify by 1/(nu - 1/2);
/// the determinant identity recovers full relative accuracy for one- and
/// two-mode covariance matrices.
fn refine_smallest_nu(nu: &mut [f64], cov: &DMatrix<f64>) {
    let det = cov.clone().lu().determinant();
    if !(det > 0.0) {
        return;
    }
    match nu.len() {
        1 => nu[0] = det.sqrt(),
        2 if nu[1] > 0.0 => nu[0] = det.sqrt() / nu[1],
        _ => {}
    }
}

/// Williamson decomposition of a symmetric positive-definite CM.
///
/// Construction: with W = V^{1/2} and A = W Omega W (antisymmetric), pick an
/// orthonormal set {w_k} with A A^T w_k = nu_k^2 w_k, one per mode, pairing
/// each w_k with A^T w_k / nu_k. The orthogonal Q = [w | A^T w / nu] brings A
/// to the canonical form, and S = W Q diag(nu)^{-1/2} is symplectic with
/// S V^⊕ S^T = V. Degenerate nu (pure modes) are handled by in-eigenspace
/// orthonormalization; signs are fixed so each w_k has its first significant
/// component positive, which makes the output deterministic.
pub fn williamson(cov: &DMatrix<f64>) -> Result<WilliamsonDecomposition> {
    let dim = cov.nrows();
    if dim == 0 || !dim.is_multiple_of(2) || cov.ncols() != dim {
        return Err(Error::Dimension(format!(
            "covariance matrix is {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    let n = dim / 2;
    let v = symmetrize(cov);

    let se_v = v.clone().symmetric_eigen();
    let mut ev: Vec<f64> = se_v.eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).expect("non-finite eigenvalue"));
    if ev[0] <= 0.0 {
        return Err(Error::Unphysical(format!(
            "covariance matrix not positive definite: eigenvalue {}",
            ev[0]
        )));
    }
    let cond = ev[dim - 1] / ev[0];
    if cond > CONDITION_LIMIT {
        return Err(Error::IllConditioned(cond));
    }

    let w = {
        let vals = DVector::from_iterator(dim, se_v.eigenvalues.iter().map(|x| x.sqrt()));
        &se_v.eigenvectors * DMatrix::from_diagonal(&vals) * se_v.eigenvectors.transpose()
    };
    let omega = symplectic_form(n).omega;
    let a = &w * &omega * &w;
    let aat = &a * a.transpose();
    let se_a = aat.symmetric_eigen();

    // Sort eigenpairs of A A^T ascending.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| {
        se_a.eigenvalues[i]
            .partial_cmp(&se_a.eigenvalues[j])
            .expect("non-finite eigenvalue")
    });
    let lam: Vec<f64> = order.iter().map(|&i| se_a.eigenvalues[i]).collect();
    let vecs: Vec<DVector<f64>> = order
        .iter()
        .map(|&i| se_a.eigenvectors.column(i).clone_owned())
        .collect();

    // Group numerically equal eigenvalues. Every exact multiplicity is even
    // (each nu contributes a 2-plane), so each group holds 2m vectors.
    let scale = lam[dim - 1].max(1.0);
    let group_tol = 1e-11 * scale;
    let mut q_cols: Vec<DVector<f64>> = Vec::with_capacity(dim);
    let mut p_cols: Vec<DVector<f64>> = Vec::with_capacity(dim);
    let mut nu_out: Vec<f64> = Vec::with_capacity(n);

    let at = a.transpose();
    let mut idx = 0;
    while idx < dim {
        let mut end = idx + 1;
        while end < dim && (lam[end] - lam[idx]).abs() <= group_tol {
            end += 1;
        }
        if !(end - idx).is_multiple_of(2) {
            // A lone vector cannot form a symplectic 2-plane; widen by one.
            if end < dim {
                end += 1;
            } else {
                return Err(Error::NonConvergent);
            }
        }
        let group: Vec<DVector<f64>> = vecs[idx..end].to_vec();
        let nu_group = (lam[idx..end].iter().sum::<f64>() / (end - idx) as f64)
            .max(0.0)
            .sqrt();
        if nu_group <= 0.0 {
            return Err(Error::Unphysical(
                "zero symplectic eigenvalue".to_string(),
            ));
        }
        let pairs = extract_pairs(&at, &group, nu_group)?;
        for (wq, wp) in pairs {
            q_cols.push(wq);
            p_cols.push(wp);
            nu_out.push(nu_group);
        }
        idx = end;
    }

    refine_smallest_nu(&mut nu_out, &v);

    // Assemble Q = [w_1..w_N | p_1..p_N] and S = W Q diag(nu,nu)^{-1/2}.
    let mut q = DMatrix::zeros(dim, dim);
    for k in 0..n {
        q.set_column(k, &q_cols[k]);
        q.set_column(n + k, &p_cols[k]);
    }
    let inv_sqrt = DVector::from_fn(dim, |i, _| 1.0 / nu_out[i % n].sqrt());
    let s_mat = &w * &q * DMatrix::from_diagonal(&inv_sqrt);

    let dec = WilliamsonDecomposition { nu: nu_out, s_mat };

    // Residual checks on both defining invariants.
    let omega_res = (&dec.s_mat * &omega * dec.s_mat.transpose() - &omega).norm();
    let reass_res = (dec.reassemble() - &v).norm() / v.norm().max(1.0);
    if !omega_res.is_finite() || !reass_res.is_finite() {
        return Err(Error::NonConvergent);
    }
    if omega_res > DECOMPOSITION_TOL * scale.sqrt() || reass_res > DECOMPOSITION_TOL {
        return Err(Error::NonConvergent);
    }
    Ok(dec)
}

/// From an orthonormal eigenspace basis of A A^T at nu^2, extract canonical
/// (w, A^T w / nu) pairs spanning the space.
fn extract_pairs(
    at: &DMatrix<f64>,
    group: &[DVector<f64>],
    nu: f64,
) -> Result<Vec<(DVector<f64>, DVector<f64>)>> {
    let m = group.len() / 2;
    let mut picked: Vec<(DVector<f64>, DVector<f64>)> = Vec::with_capacity(m);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(2 * m);
    for _ in 0..m {
        // Seed: first group vector with a significant residual once the
        // already-picked 2-planes are projected out.
        let mut seed: Option<DVector<f64>> = None;
        for cand in group {
            let mut r = cand.clone();
            for b in &basis {
                let c = b.dot(&r);
                r -= b * c;
            }
            if r.norm() > 1e-6 {
                seed = Some(r.normalize());
                break;
            }
        }
        let mut wq = seed.ok_or(Error::NonConvergent)?;
        fix_sign(&mut wq);
        let mut wp = at * &wq / nu;
        // Orthogonality of wp against the picked planes holds analytically;
        // re-project to suppress rounding drift in degenerate groups.
        for b in &basis {
            let c = b.dot(&wp);
            wp -= b * c;
        }
        let c = wq.dot(&wp);
        wp -= &wq * c;
        let norm = wp.norm();
        if !(0.5..=2.0).contains(&norm) {
            return Err(Error::NonConvergent);
        }
        wp /= norm;
        basis.push(wq.clone());
        basis.push(wp.clone());
        picked.push((wq, wp));
    }
    Ok(picked)
}

/// Flip sign so the first component larger than a tenth of the max is positive.
fn fix_sign(v: &mut DVector<f64>) {
    let scale = v.amax();
    for x in v.iter() {
        if x.abs() > 0.1 * scale {
            if *x < 0.0 {
                *v *= -1.0;
            }
            return;
        }
    }
}

/// PPT separability test for a two-mode CM: partially transpose the second
/// mode (p_2 -> -p_2) and check that the transformed CM is still physical.
/// Returns true iff the state is separable.
pub fn ppt_separable_two_mode(cov: &DMatrix<f64>) -> Result<bool> {
    if cov.nrows() != 4 || cov.ncols() != 4 {
        return Err(Error::Dimension(format!(
            "expected 4x4 two-mode CM, got {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    // T = diag(1, 1, 1, -1) in (q1, q2, p1, p2) ordering.
    let mut tilde = cov.clone();
    for i in 0..4 {
        tilde[(3, i)] = -tilde[(3, i)];
        tilde[(i, 3)] = -tilde[(i, 3)];
    }
    let nu = symplectic_eigenvalues(&tilde)?;
    Ok(nu[0] >= 0.5 - PHYSICALITY_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thermal_cm(n: f64) -> DMatrix<f64> {
        DMatrix::from_diagonal_element(2, 2, n + 0.5)
    }

    /// Correlated-source CM in (q1,q2,p1,p2) ordering.
    pub(crate) fn source_cm(n_s: f64, c: f64) -> DMatrix<f64> {
        let s = n_s + 0.5;
        DMatrix::from_row_slice(
            4,
            4,
            &[
                s, c, 0.0, 0.0, //
                c, s, 0.0, 0.0, //
                0.0, 0.0, s, -c, //
                0.0, 0.0, -c, s,
            ],
        )
    }

    fn c_q(n_s: f64) -> f64 {
        (n_s * (n_s + 1.0)).sqrt()
    }

    #[test]
    fn omega_one_mode() {
        let f = symplectic_form(1);
        assert_eq!(f.omega[(0, 1)], 1.0);
        assert_eq!(f.omega[(1, 0)], -1.0);
        assert_eq!(f.omega[(0, 0)], 0.0);
        assert_eq!(f.omega[(1, 1)], 0.0);
    }

    #[test]
    fn omega_two_modes_blocks_and_square() {
        let f = symplectic_form(2);
        for k in 0..2 {
            assert_eq!(f.omega[(k, 2 + k)], 1.0);
            assert_eq!(f.omega[(2 + k, k)], -1.0);
        }
        let sq = &f.omega * &f.omega;
        let minus_id = -DMatrix::<f64>::identity(4, 4);
        assert!((sq - minus_id).norm() == 0.0);
        assert!((f.omega.transpose() + &f.omega).norm() == 0.0);
    }

    #[test]
    fn validate_vacuum_ok() {
        let st = GaussianState::zero_mean(DMatrix::from_diagonal_element(2, 2, 0.5)).unwrap();
        assert_eq!(st.n_modes, 1);
    }

    #[test]
    fn validate_overcorrelated_source_unphysical() {
        let n_s = 1.0;
        let cov = source_cm(n_s, 1.1 * c_q(n_s));
        match GaussianState::zero_mean(cov) {
            Err(Error::Unphysical(_)) => {}
            other => panic!("expected Unphysical, got {other:?}"),
        }
    }

    #[test]
    fn validate_bright_thermal_ok() {
        let st = GaussianState::zero_mean(thermal_cm(6042.0)).unwrap();
        let nu = st.symplectic_eigenvalues().unwrap();
        assert!((nu[0] - 6042.5).abs() < 1e-9 * 6042.5);
    }

    #[test]
    fn validate_asymmetric_rejected() {
        let mut cov = thermal_cm(1.0);
        cov[(0, 1)] = 1e-6;
        match GaussianState::zero_mean(cov) {
            Err(Error::AsymmetricCov(_)) => {}
            other => panic!("expected AsymmetricCov, got {other:?}"),
        }
    }

    #[test]
    fn symplectic_eigenvalues_thermal() {
        let nu = symplectic_eigenvalues(&thermal_cm(1.0)).unwrap();
        assert_eq!(nu.len(), 1);
        assert!((nu[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn symplectic_eigenvalues_tmsv_pure() {
        let cov = source_cm(1.0, c_q(1.0));
        let nu = symplectic_eigenvalues(&cov).unwrap();
        assert_eq!(nu.len(), 2);
        assert!((nu[0] - 0.5).abs() < 1e-10);
        assert!((nu[1] - 0.5).abs() < 1e-10);
    }

    /// Return-idler CM of the target-present hypothesis in (q1,q2,p1,p2).
    pub(crate) fn ri1_cm(n_s: f64, c: f64, kappa: f64, n_b: f64) -> DMatrix<f64> {
        let s = n_s + 0.5;
        let b = n_b + 0.5;
        let a = kappa * n_s + b;
        let rc = kappa.sqrt() * c;
        DMatrix::from_row_slice(
            4,
            4,
            &[
                a, rc, 0.0, 0.0, //
                rc, s, 0.0, 0.0, //
                0.0, 0.0, a, -rc, //
                0.0, 0.0, -rc, s,
            ],
        )
    }

    #[test]
    fn symplectic_eigenvalues_ri1_closed_form() {
        // Independent oracle: nu_pm^2 = (Delta ± sqrt(Delta^2 - 4 det V))/2
        // with Delta = A^2 + S^2 - 2 kappa C^2 for the standard-form CM.
        let (n_s, kappa, n_b) = (1.0, 0.1, 2.0);
        let c = c_q(n_s);
        let s = n_s + 0.5;
        let b = n_b + 0.5;
        let a = kappa * n_s + b;
        let delta = a * a + s * s - 2.0 * kappa * c * c;
        let det = (a * s - kappa * c * c).powi(2);
        let nu_p = ((delta + (delta * delta - 4.0 * det).sqrt()) / 2.0).sqrt();
        let nu_m = ((delta - (delta * delta - 4.0 * det).sqrt()) / 2.0).sqrt();

        let nu = symplectic_eigenvalues(&ri1_cm(n_s, c, kappa, n_b)).unwrap();
        assert!((nu[0] - nu_m).abs() < 1e-10, "{} vs {}", nu[0], nu_m);
        assert!((nu[1] - nu_p).abs() < 1e-10, "{} vs {}", nu[1], nu_p);
    }

    #[test]
    fn williamson_thermal_identity() {
        let dec = williamson(&thermal_cm(1.0)).unwrap();
        assert!((dec.nu[0] - 1.5).abs() < 1e-12);
        let id = DMatrix::<f64>::identity(2, 2);
        assert!((&dec.s_mat - &id).norm() < 1e-9);
    }

    #[test]
    fn williamson_tmsv_roundtrip() {
        let cov = source_cm(1.0, c_q(1.0));
        let dec = williamson(&cov).unwrap();
        assert!((dec.nu[0] - 0.5).abs() < 1e-9);
        assert!((dec.nu[1] - 0.5).abs() < 1e-9);
        let res = (dec.reassemble() - &cov).norm() / cov.norm();
        assert!(res < 1e-9, "residual {res}");
    }

    #[test]
    fn williamson_s_inverse_identity() {
        let cov = ri1_cm(0.7, 0.9, 0.3, 2.0);
        let dec = williamson(&cov).unwrap();
        let id = DMatrix::<f64>::identity(4, 4);
        assert!((dec.s_inv() * &dec.s_mat - id).norm() < 1e-9);
    }

    #[test]
    fn ppt_source_states() {
        // Just-separable C = N_s: separable; TMSV: entangled.
        assert!(ppt_separable_two_mode(&source_cm(1.0, 1.0)).unwrap());
        assert!(!ppt_separable_two_mode(&source_cm(1.0, c_q(1.0))).unwrap());
    }

    #[test]
    fn ppt_bright_return_separable() {
        let cov = ri1_cm(1.0, c_q(1.0), 0.01, 100.0);
        assert!(ppt_separable_two_mode(&cov).unwrap());
    }

    #[test]
    fn ppt_entangled_iff_c_above_ns() {
        for &n_s in &[0.01, 0.1, 1.0, 10.0] {
            let eps = 1e-6 * c_q(n_s);
            assert!(
                ppt_separable_two_mode(&source_cm(n_s, n_s - eps)).unwrap(),
                "just below C_d at N_s={n_s}"
            );
            let c_above = (n_s + 100.0 * eps).min(c_q(n_s));
            assert!(
                !ppt_separable_two_mode(&source_cm(n_s, c_above)).unwrap(),
                "just above C_d at N_s={n_s}"
            );
        }
    }

    fn rotation_symplectic(theta: f64, phi1: f64, phi2: f64) -> DMatrix<f64> {
        // Beam-splitter mixing + per-mode phase rotations; orthogonal and
        // symplectic, useful to leave standard form while staying physical.
        let (c, s) = (theta.cos(), theta.sin());
        let bs = DMatrix::from_row_slice(
            4,
            4,
            &[
                c, s, 0.0, 0.0, //
                -s, c, 0.0, 0.0, //
                0.0, 0.0, c, s, //
                0.0, 0.0, -s, c,
            ],
        );
        let rot = |f: f64| -> DMatrix<f64> {
            DMatrix::from_row_slice(2, 2, &[f.cos(), f.sin(), -f.sin(), f.cos()])
        };
        let r1 = rot(phi1);
        let r2 = rot(phi2);
        // Per-mode rotation acting as [[R_qq, R_qp],[R_pq, R_pp]] blocks.
        let mut local = DMatrix::zeros(4, 4);
        for (m, r) in [(0usize, r1), (1usize, r2)] {
            local[(m, m)] = r[(0, 0)];
            local[(m, 2 + m)] = r[(0, 1)];
            local[(2 + m, m)] = r[(1, 0)];
            local[(2 + m, 2 + m)] = r[(1, 1)];
        }
        bs * local
    }

    #[test]
    fn williamson_roundtrip_random_cms() {
        // 1000 random physical two-mode CMs, rotated out of standard form.
        let mut rng_state = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            (rng_state >> 11) as f64 / (1u64 << 53) as f64
        };
        for trial in 0..1000 {
            let n_s = 0.01 + 3.0 * next();
            let c = next() * c_q(n_s);
            let kappa = 0.01 + 0.8 * next();
            let n_b = 0.05 + 5.0 * next();
            let base = ri1_cm(n_s, c, kappa, n_b);
            let r = rotation_symplectic(
                std::f64::consts::PI * next(),
                std::f64::consts::TAU * next(),
                std::f64::consts::TAU * next(),
            );
            let cov = &r * base * r.transpose();
            let dec = williamson(&cov).unwrap();
            let res = (dec.reassemble() - &cov).norm() / cov.norm();
            assert!(res < 1e-9, "trial {trial}: residual {res}");
            let omega = symplectic_form(2).omega;
            let sres = (&dec.s_mat * &omega * dec.s_mat.transpose() - &omega).norm();
            assert!(sres < 1e-9 * cov.norm().max(1.0), "trial {trial}: omega {sres}");
        }
    }

    #[test]
    fn spectrum_invariant_under_symplectic_conjugation() {
        let base = ri1_cm(0.4, 0.5, 0.2, 1.1);
        let nu0 = symplectic_eigenvalues(&base).unwrap();
        let r = rotation_symplectic(0.7, 1.1, -0.4);
        let conj = &r * base * r.transpose();
        let nu1 = symplectic_eigenvalues(&conj).unwrap();
        for (a, b) in nu0.iter().zip(&nu1) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}
