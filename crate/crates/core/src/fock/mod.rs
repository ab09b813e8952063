//! Truncated-Fock-space brute-force oracle.
//!
//! Everything here is an independent verification path for the Gaussian
//! closed forms: states are built as dense matrices in the number basis by
//! exponentiating truncated quadratic generators, channels act by explicit
//! Kraus contraction of a beam splitter with a thermal environment, and the
//! discrimination quantities come from dense eigendecompositions (run per
//! decoupled block; see [`blocks`]). The oracle is restricted to small
//! occupations by design: it validates formulas, not bright-background
//! radar regimes.
//!
//! All states in scope have real number-basis representations (zero-mean
//! Gaussian correlations and real displacements), so matrices are stored
//! as real symmetric rather than complex Hermitian.

pub mod blocks;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use blocks::{align, BlockMatrix};

/// Maximum tolerated unrepresented probability mass (trace deficit plus
/// boundary-level mass) in a synthesized state.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;
/// Default per-mode cutoff floor.
pub const MIN_CUTOFF: usize = 25;
/// Eigenvalues of a density operator below this are outside its numerical
/// support.
pub const SUPPORT_FLOOR: f64 = 1e-14;
/// Mass of rho0 tolerated outside the support of rho1 in relative-entropy
/// computations; it biases D by at most ~32x this mass, well under the
/// verification tolerance.
pub const SUPPORT_MASS_TOL: f64 = 1e-7;

/// A density operator on a truncated multimode Fock space.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    /// Per-mode cutoff dimensions d_k; the matrix dimension is their product.
    pub cutoffs: Vec<usize>,
    /// Real symmetric matrix in the number basis, mode-major index order.
    pub matrix: DMatrix<f64>,
    /// 1 - trace before any renormalization (none is performed).
    pub tail_mass: f64,
}

impl DensityOperator {
    pub fn n_modes(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn dim(&self) -> usize {
        self.cutoffs.iter().product()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// Probability mass on basis states with any mode at its top level.
    pub fn boundary_mass(&self) -> f64 {
        let strides = strides(&self.cutoffs);
        let mut mass = 0.0;
        for i in 0..self.dim() {
            let on_boundary = (0..self.cutoffs.len())
                .any(|k| occupation(i, strides[k], self.cutoffs[k]) == self.cutoffs[k] - 1);
            if on_boundary {
                mass += self.matrix[(i, i)];
            }
        }
        mass
    }

    /// Purity Tr rho^2.
    pub fn purity(&self) -> f64 {
        let bm = BlockMatrix::from_dense(&self.matrix);
        bm.blocks.iter().map(|b| b.norm_squared()).sum()
    }
}

/// Convergence bookkeeping attached to every synthesized state.
#[derive(Debug, Clone)]
pub struct TruncationReport {
    pub cutoffs: Vec<usize>,
    pub tail_mass: f64,
    /// Tail plus boundary mass within [`DEFAULT_TAIL_TOL`].
    pub converged: bool,
}

fn strides(cutoffs: &[usize]) -> Vec<usize> {
    let n = cutoffs.len();
    let mut s = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        s[k] = s[k + 1] * cutoffs[k + 1];
    }
    s
}

fn occupation(idx: usize, stride: usize, d: usize) -> usize {
    (idx / stride) % d
}

/// Truncated ladder operators on a single mode.
#[derive(Debug, Clone)]
pub struct LadderOps {
    pub a: DMatrix<f64>,
    pub a_dagger: DMatrix<f64>,
    pub n_op: DMatrix<f64>,
}

/// a|n> = sqrt(n)|n-1>, a†|n> = sqrt(n+1)|n+1>, truncated at dimension d.
pub fn ladder_ops(d: usize) -> LadderOps {
    assert!(d >= 2, "cutoff must be at least 2");
    let mut a = DMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    let a_dagger = a.transpose();
    let n_op = &a_dagger * &a;
    LadderOps { a, a_dagger, n_op }
}

/// Quadratic generators of the Gaussian unitaries used by the oracle.
#[derive(Debug, Clone, Copy)]
pub enum Generator {
    /// exp(alpha (a† - a)) with real alpha; one mode.
    Displacement { alpha: f64 },
    /// exp(r (a†b† - ab)); two modes.
    TwoModeSqueeze { r: f64 },
    /// Transmissivity tau = cos^2(theta) of exp(theta (a†b - ab†)); two modes.
    BeamSplitter { tau: f64 },
}

/// Allowed boundary leakage of a Gaussian unitary acting on core states.
const LEAKAGE_TOL: f64 = 1e-8;

fn tms_generator_blocks(r: f64, d1: usize, d2: usize) -> BlockMatrix {
    // r (a†b† - ab) conserves n1 - n2; sector k holds |n, n-k>.
    let dim = d1 * d2;
    let mut groups = Vec::new();
    let mut mats = Vec::new();
    for k in -(d2 as i64 - 1)..=(d1 as i64 - 1) {
        let n_lo = k.max(0) as usize;
        let n_hi = ((d1 as i64 - 1).min(d2 as i64 - 1 + k)) as usize;
        let idx: Vec<usize> = (n_lo..=n_hi).map(|n| n * d2 + (n as i64 - k) as usize).collect();
        let m = idx.len();
        let mut g = DMatrix::zeros(m, m);
        for (row, n) in (n_lo..=n_hi).enumerate().skip(1) {
            // <n, n-k| from |n-1, n-k-1>: amplitude r sqrt(n (n-k)).
            let amp = r * ((n as f64) * ((n as i64 - k) as f64)).sqrt();
            g[(row, row - 1)] = amp;
            g[(row - 1, row)] = -amp;
        }
        groups.push(idx);
        mats.push(g);
    }
    BlockMatrix::from_parts(dim, groups, mats)
}

fn bs_generator_blocks(theta: f64, d1: usize, d2: usize) -> BlockMatrix {
    // theta (a†b - ab†) conserves n1 + n2; sector t holds |n, t-n>.
    let dim = d1 * d2;
    let mut groups = Vec::new();
    let mut mats = Vec::new();
    for t in 0..=(d1 + d2 - 2) {
        let n_lo = t.saturating_sub(d2 - 1);
        let n_hi = t.min(d1 - 1);
        if n_lo > n_hi {
            continue;
        }
        let idx: Vec<usize> = (n_lo..=n_hi).map(|n| n * d2 + (t - n)).collect();
        let m = idx.len();
        let mut g = DMatrix::zeros(m, m);
        for (row, n) in (n_lo..=n_hi).enumerate().skip(1) {
            // <n, t-n| a†b |n-1, t-n+1> = sqrt(n (t-n+1)).
            let amp = theta * ((n as f64) * ((t - n + 1) as f64)).sqrt();
            g[(row, row - 1)] = amp;
            g[(row - 1, row)] = -amp;
        }
        groups.push(idx);
        mats.push(g);
    }
    BlockMatrix::from_parts(dim, groups, mats)
}

fn displacement_dense(alpha: f64, d: usize) -> DMatrix<f64> {
    let l = ladder_ops(d);
    ((l.a_dagger - l.a) * alpha).exp()
}

fn unitary_blocks(gen: Generator, cutoffs: &[usize]) -> Result<BlockMatrix> {
    match gen {
        Generator::Displacement { alpha } => {
            if cutoffs.len() != 1 {
                return Err(Error::Dimension("displacement acts on one mode".into()));
            }
            let u = displacement_dense(alpha, cutoffs[0]);
            Ok(BlockMatrix::from_parts(
                cutoffs[0],
                vec![(0..cutoffs[0]).collect()],
                vec![u],
            ))
        }
        Generator::TwoModeSqueeze { r } => {
            if cutoffs.len() != 2 {
                return Err(Error::Dimension("two-mode squeezer acts on two modes".into()));
            }
            Ok(tms_generator_blocks(r, cutoffs[0], cutoffs[1]).exp())
        }
        Generator::BeamSplitter { tau } => {
            if cutoffs.len() != 2 {
                return Err(Error::Dimension("beam splitter acts on two modes".into()));
            }
            if !(0.0..=1.0).contains(&tau) {
                return Err(Error::OutOfRange(format!("tau = {tau} outside [0, 1]")));
            }
            let theta = tau.sqrt().acos();
            Ok(bs_generator_blocks(theta, cutoffs[0], cutoffs[1]).exp())
        }
    }
}

/// Gaussian unitary as a dense orthogonal matrix. CutoffTooSmall when the
/// action on core states (all occupations at most a sixth of the cutoff)
/// leaks more than 1e-8 of squared amplitude onto the top levels.
pub fn gaussian_unitary(gen: Generator, cutoffs: &[usize]) -> Result<DMatrix<f64>> {
    let bm = unitary_blocks(gen, cutoffs)?;
    let u = bm.to_dense();
    let strides_v = strides(cutoffs);
    let dim: usize = cutoffs.iter().product();
    let mut worst = 0.0_f64;
    for j in 0..dim {
        let core = (0..cutoffs.len())
            .all(|k| occupation(j, strides_v[k], cutoffs[k]) <= (cutoffs[k] / 6).max(1));
        if !core {
            continue;
        }
        let mut leak = 0.0;
        for i in 0..dim {
            let boundary = (0..cutoffs.len())
                .any(|k| occupation(i, strides_v[k], cutoffs[k]) == cutoffs[k] - 1);
            if boundary {
                leak += u[(i, j)] * u[(i, j)];
            }
        }
        worst = worst.max(leak);
    }
    if worst > LEAKAGE_TOL {
        return Err(Error::CutoffTooSmall(format!(
            "boundary leakage {worst:.3e} exceeds {LEAKAGE_TOL:.0e}"
        )));
    }
    Ok(u)
}

/// State families the oracle can synthesize.
#[derive(Debug, Clone, Copy)]
pub enum StateSpec {
    /// Thermal state with mean occupation n.
    Thermal { n: f64 },
    /// Coherent state with |alpha|^2 = n_s (real amplitude).
    Coherent { n_s: f64 },
    /// Displaced thermal state: D(alpha) rho_th(n) D(alpha)†.
    DisplacedThermal { alpha: f64, n: f64 },
    /// Two-mode zero-mean source with diagonal S = n_s + 1/2, correlation c.
    GenericGaussian { n_s: f64, c: f64 },
    /// Two-mode zero-mean state with CM blocks diag(a, b), offdiag (c, -c).
    StandardForm { a: f64, b: f64, c: f64 },
}

fn thermal_probs(n: f64, d: usize) -> Vec<f64> {
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

/// Smallest cutoff keeping the geometric tail of mean occupation `n` below
/// `share`, floored at [`MIN_CUTOFF`].
fn auto_cutoff(n: f64, share: f64) -> usize {
    if n <= 1e-6 {
        return MIN_CUTOFF;
    }
    let t = n / (n + 1.0);
    let d = (share.ln() / t.ln()).ceil() as usize + 2;
    d.max(MIN_CUTOFF)
}

/// Standard-form synthesis parameters: nu1, nu2, r with
/// nu1 - nu2 = a - b, nu1 nu2 = sqrt(det V), sinh 2r = 2c / (nu1 + nu2).
fn standard_form_params(a: f64, b: f64, c: f64) -> Result<(f64, f64, f64)> {
    let disc = (a + b) * (a + b) - 4.0 * c * c;
    if disc <= 0.0 {
        return Err(Error::Unphysical(format!(
            "standard form (a={a}, b={b}, c={c}) has no thermal decomposition"
        )));
    }
    let s = disc.sqrt();
    let nu1 = (s + (a - b)) / 2.0;
    let nu2 = (s - (a - b)) / 2.0;
    if nu2 < 0.5 - 1e-12 {
        return Err(Error::Unphysical(format!(
            "standard form (a={a}, b={b}, c={c}): nu_min = {nu2} < 1/2"
        )));
    }
    let r = 0.5 * (2.0 * c / s).asinh();
    Ok((nu1, nu2, r))
}

fn synth_standard_form_blocks(a: f64, b: f64, c: f64, d1: usize, d2: usize) -> Result<BlockMatrix> {
    let (nu1, nu2, r) = standard_form_params(a, b, c)?;
    let p1 = thermal_probs(nu1 - 0.5, d1);
    let p2 = thermal_probs(nu2 - 0.5, d2);
    let u = tms_generator_blocks(r, d1, d2).exp();
    // rho = U diag(p1 ⊗ p2) U^T, block by block.
    let mut blocks = Vec::with_capacity(u.blocks.len());
    for (g, ub) in u.groups.iter().zip(&u.blocks) {
        let m = g.len();
        let diag = DVector::from_fn(m, |row, _| {
            let idx = g[row];
            p1[idx / d2] * p2[idx % d2]
        });
        blocks.push(ub * DMatrix::from_diagonal(&diag) * ub.transpose());
    }
    Ok(BlockMatrix::from_parts(d1 * d2, u.groups.clone(), blocks))
}

/// Standard-form block synthesis for the verification suite.
pub(crate) fn synth_standard_form_for_verify(
    a: f64,
    b: f64,
    c: f64,
    d1: usize,
    d2: usize,
) -> Result<BlockMatrix> {
    let bm = synth_standard_form_blocks(a, b, c, d1, d2)?;
    // Same refusal policy as the dense interface: unrepresented mass must
    // stay inside the tolerance.
    let tail = 1.0 - bm.trace();
    let boundary = {
        let mut mass = 0.0;
        for (g, blk) in bm.groups.iter().zip(&bm.blocks) {
            for (row, &idx) in g.iter().enumerate() {
                let (n1, n2) = (idx / d2, idx % d2);
                if n1 == d1 - 1 || n2 == d2 - 1 {
                    mass += blk[(row, row)];
                }
            }
        }
        mass
    };
    if tail + boundary > DEFAULT_TAIL_TOL {
        return Err(Error::CutoffTooSmall(format!(
            "unrepresented mass {:.3e} at cutoffs [{d1}, {d2}]",
            tail + boundary
        )));
    }
    Ok(bm)
}

/// Builds a state, auto-sizing cutoffs when `cutoffs` is None; refuses with
/// CutoffTooSmall when the requested cutoffs cannot hold the state within
/// [`DEFAULT_TAIL_TOL`].
pub fn synth_state(
    spec: StateSpec,
    cutoffs: Option<&[usize]>,
) -> Result<(DensityOperator, TruncationReport)> {
    let occupations: Vec<f64> = match spec {
        StateSpec::Thermal { n } => vec![n],
        StateSpec::Coherent { n_s } => vec![n_s],
        StateSpec::DisplacedThermal { alpha, n } => vec![n + alpha * alpha],
        StateSpec::GenericGaussian { n_s, .. } => vec![n_s, n_s],
        StateSpec::StandardForm { a, b, .. } => vec![a - 0.5, b - 0.5],
    };
    let share = DEFAULT_TAIL_TOL / (8.0 * occupations.len() as f64);
    let auto: Vec<usize> = occupations.iter().map(|&n| auto_cutoff(n, share)).collect();
    let dims: Vec<usize> = match cutoffs {
        Some(c) => {
            if c.len() != occupations.len() {
                return Err(Error::Dimension(format!(
                    "{} cutoffs for {} modes",
                    c.len(),
                    occupations.len()
                )));
            }
            c.to_vec()
        }
        None => auto,
    };
    let matrix = match spec {
        StateSpec::Thermal { n } => {
            DMatrix::from_diagonal(&DVector::from_vec(thermal_probs(n, dims[0])))
        }
        StateSpec::Coherent { n_s } => {
            let u = displacement_dense(n_s.sqrt(), dims[0]);
            let col = u.column(0).clone_owned();
            &col * col.transpose()
        }
        StateSpec::DisplacedThermal { alpha, n } => {
            let u = displacement_dense(alpha, dims[0]);
            let th = DMatrix::from_diagonal(&DVector::from_vec(thermal_probs(n, dims[0])));
            &u * th * u.transpose()
        }
        StateSpec::GenericGaussian { n_s, c } => {
            let s = n_s + 0.5;
            synth_standard_form_blocks(s, s, c, dims[0], dims[1])?.to_dense()
        }
        StateSpec::StandardForm { a, b, c } => {
            synth_standard_form_blocks(a, b, c, dims[0], dims[1])?.to_dense()
        }
    };
    let rho = DensityOperator {
        cutoffs: dims.clone(),
        tail_mass: 1.0 - matrix.trace(),
        matrix,
    };
    let resolved = rho.tail_mass + rho.boundary_mass();
    let report = TruncationReport {
        cutoffs: dims,
        tail_mass: rho.tail_mass,
        converged: resolved <= DEFAULT_TAIL_TOL,
    };
    if !report.converged {
        return Err(Error::CutoffTooSmall(format!(
            "unrepresented mass {resolved:.3e} exceeds {DEFAULT_TAIL_TOL:.0e} at cutoffs {:?}",
            report.cutoffs
        )));
    }
    Ok((rho, report))
}

/// Tensor product, mode-major ordering (modes of `a` first).
pub fn tensor(a: &DensityOperator, b: &DensityOperator) -> DensityOperator {
    let matrix = a.matrix.kronecker(&b.matrix);
    let mut cutoffs = a.cutoffs.clone();
    cutoffs.extend_from_slice(&b.cutoffs);
    DensityOperator {
        cutoffs,
        tail_mass: 1.0 - matrix.trace(),
        matrix,
    }
}

/// Thermal-loss channel on the first mode: attach a thermal environment of
/// mean `n_env`, mix on a beam splitter of transmissivity `kappa`, trace
/// the environment out. The environment cutoff is auto-sized; the output
/// signal cutoff grows to hold the mixed-in background.
pub fn apply_loss_channel(
    rho: &DensityOperator,
    kappa: f64,
    n_env: f64,
) -> Result<(DensityOperator, TruncationReport)> {
    let share = DEFAULT_TAIL_TOL / 16.0;
    let d_env = auto_cutoff(n_env, share);
    apply_loss_channel_with(rho, kappa, n_env, d_env)
}

/// As [`apply_loss_channel`] with an explicit environment cutoff.
pub fn apply_loss_channel_with(
    rho: &DensityOperator,
    kappa: f64,
    n_env: f64,
    d_env: usize,
) -> Result<(DensityOperator, TruncationReport)> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::OutOfRange(format!("kappa = {kappa} outside [0, 1]")));
    }
    if !(n_env >= 0.0) {
        return Err(Error::OutOfRange(format!("n_env = {n_env} must be >= 0")));
    }
    if d_env < 2 {
        return Err(Error::CutoffTooSmall("environment cutoff below 2".into()));
    }
    let d_sig = rho.cutoffs[0];
    let rest: usize = rho.cutoffs[1..].iter().product();
    // Output occupation kappa n_in + (1 - kappa) n_env, heuristically sized.
    let in_occ = {
        let strides_v = strides(&rho.cutoffs);
        let mut acc = 0.0;
        for i in 0..rho.dim() {
            acc += occupation(i, strides_v[0], d_sig) as f64 * rho.matrix[(i, i)];
        }
        acc
    };
    let d_out = auto_cutoff(kappa * in_occ + (1.0 - kappa) * n_env, DEFAULT_TAIL_TOL / 16.0)
        .max(d_sig);

    let d_big = d_out.max(d_sig);
    let theta = kappa.sqrt().acos();
    let u = bs_generator_blocks(theta, d_big, d_env).exp().to_dense();
    let p_env = thermal_probs(n_env, d_env);

    let dim_out = d_out * rest;
    let mut out = DMatrix::<f64>::zeros(dim_out, dim_out);
    for f in 0..d_env {
        if p_env[f] < 1e-18 {
            continue;
        }
        for e in 0..d_env {
            // M_{e,f}[s, t] = U[(s,e), (t,f)], nonzero only on t = s + e - f.
            let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
            for s in 0..d_out {
                let t = s as i64 + e as i64 - f as i64;
                if t < 0 || t >= d_sig as i64 {
                    continue;
                }
                let amp = u[(s * d_env + e, t as usize * d_env + f)];
                if amp != 0.0 {
                    pairs.push((s, t as usize, amp));
                }
            }
            for &(s, t, amp) in &pairs {
                for &(sp, tp, amp_p) in &pairs {
                    let w = p_env[f] * amp * amp_p;
                    for r in 0..rest {
                        for rp in 0..rest {
                            out[(s * rest + r, sp * rest + rp)] +=
                                w * rho.matrix[(t * rest + r, tp * rest + rp)];
                        }
                    }
                }
            }
        }
    }
    let mut cutoffs = rho.cutoffs.clone();
    cutoffs[0] = d_out;
    let result = DensityOperator {
        cutoffs: cutoffs.clone(),
        tail_mass: 1.0 - out.trace(),
        matrix: out,
    };
    let resolved = result.tail_mass.abs() + result.boundary_mass();
    let report = TruncationReport {
        cutoffs,
        tail_mass: result.tail_mass,
        converged: resolved <= 1e-8,
    };
    if !report.converged {
        return Err(Error::CutoffTooSmall(format!(
            "channel output mass defect {resolved:.3e} at cutoffs {:?}",
            report.cutoffs
        )));
    }
    Ok((result, report))
}

/// First and second quadrature moments of a density operator: mean vector
/// and covariance matrix in (q_1..q_N, p_1..p_N) ordering. For the real
/// states this oracle builds, p-means and qp correlations vanish
/// identically.
pub fn moments(rho: &DensityOperator) -> (DVector<f64>, DMatrix<f64>) {
    let n = rho.n_modes();
    let strides_v = strides(&rho.cutoffs);
    let dim = rho.dim();

    // q~ = (a + a†)/sqrt(2) (symmetric), p~ = (a† - a)/sqrt(2)
    // (antisymmetric); p = i p~. Neighbor iteration in mode k with both
    // amplitude conventions.
    let neighbors = |i: usize, k: usize, lower_sign: f64| -> Vec<(usize, f64)> {
        let d = rho.cutoffs[k];
        let st = strides_v[k];
        let occ = occupation(i, st, d);
        let mut out = Vec::with_capacity(2);
        if occ + 1 < d {
            // raise: <occ+1| . |occ> = sqrt(occ + 1)
            out.push((i + st, ((occ + 1) as f64 / 2.0).sqrt()));
        }
        if occ > 0 {
            out.push((i - st, lower_sign * (occ as f64 / 2.0).sqrt()));
        }
        out
    };

    let mut mean = DVector::zeros(2 * n);
    for k in 0..n {
        let mut acc = 0.0;
        for i in 0..dim {
            for (j, amp) in neighbors(i, k, 1.0) {
                acc += rho.matrix[(i, j)] * amp;
            }
        }
        mean[k] = acc;
        // p-mean: i * Tr(rho p~) = 0, as rho is symmetric and p~
        // antisymmetric.
    }

    let mut cov = DMatrix::zeros(2 * n, 2 * n);
    // Tr(rho A B) with A = op_j, B = op_k built from ladder neighbors:
    // sum over i, i' in B-neighbors of i, i'' in A-neighbors of i' of
    // rho[i, i''] amp_B amp_A.
    let second = |j: usize, k: usize, sign_j: f64, sign_k: f64| -> f64 {
        let mut acc = 0.0;
        for i in 0..dim {
            for (ip, amp_k) in neighbors(i, k, sign_k) {
                for (ipp, amp_j) in neighbors(ip, j, sign_j) {
                    acc += rho.matrix[(i, ipp)] * amp_k * amp_j;
                }
            }
        }
        acc
    };
    for j in 0..n {
        for k in 0..n {
            let qq = 0.5 * (second(j, k, 1.0, 1.0) + second(k, j, 1.0, 1.0));
            // <p_j p_k> = -<p~_j p~_k> symmetrized (p = i p~).
            let pp = -0.5 * (second(j, k, -1.0, -1.0) + second(k, j, -1.0, -1.0));
            cov[(j, k)] = qq - mean[j] * mean[k];
            cov[(n + j, n + k)] = pp;
        }
    }
    (mean, cov)
}

// ---- brute-force discrimination kernels ----

fn aligned(r0: &DensityOperator, r1: &DensityOperator) -> Result<(BlockMatrix, BlockMatrix)> {
    if r0.cutoffs != r1.cutoffs {
        return Err(Error::Dimension(format!(
            "cutoff mismatch: {:?} vs {:?}",
            r0.cutoffs, r1.cutoffs
        )));
    }
    Ok(align(
        &BlockMatrix::from_dense(&r0.matrix),
        &BlockMatrix::from_dense(&r1.matrix),
    ))
}

/// Tr(rho0^s rho1^{1-s}) by dense eigendecomposition per decoupled block.
pub fn brute_s_overlap(r0: &DensityOperator, r1: &DensityOperator, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::OutOfRange(format!("s = {s} outside (0, 1)")));
    }
    let (b0, b1) = aligned(r0, r1)?;
    Ok(s_overlap_blocks(&b0, &b1, s))
}

pub(crate) fn s_overlap_blocks(b0: &BlockMatrix, b1: &BlockMatrix, s: f64) -> f64 {
    let e0 = b0.eigendecompose();
    let e1 = b1.eigendecompose();
    let mut total = 0.0;
    for ((lam0, u0), (lam1, u1)) in e0.parts.iter().zip(&e1.parts) {
        let m = lam0.len();
        if m == 0 {
            continue;
        }
        // Tr(A B) = sum_{ij} lam0_i^s lam1_j^{1-s} <u0_i|u1_j>^2.
        let overlap = u0.transpose() * u1;
        for i in 0..m {
            let a = lam0[i].max(0.0).powf(s);
            if a == 0.0 {
                continue;
            }
            for j in 0..m {
                let b = lam1[j].max(0.0).powf(1.0 - s);
                total += a * b * overlap[(i, j)] * overlap[(i, j)];
            }
        }
    }
    total
}

/// Minimum discrimination error ½(1 - ½||rho0 - rho1||_1) at equal priors.
pub fn brute_helstrom(r0: &DensityOperator, r1: &DensityOperator) -> Result<f64> {
    let (b0, b1) = aligned(r0, r1)?;
    Ok(helstrom_blocks(&b0, &b1))
}

pub(crate) fn helstrom_blocks(b0: &BlockMatrix, b1: &BlockMatrix) -> f64 {
    let mut trace_norm = 0.0;
    for (d0, d1) in b0.blocks.iter().zip(&b1.blocks) {
        let diff = d0 - d1;
        let se = diff.symmetric_eigen();
        trace_norm += se.eigenvalues.iter().map(|x| x.abs()).sum::<f64>();
    }
    0.5 * (1.0 - 0.5 * trace_norm)
}

/// Relative entropy D(rho0||rho1) and its variance V by dense
/// eigendecomposition, restricted to the numerical support of rho1.
pub fn brute_stein(r0: &DensityOperator, r1: &DensityOperator) -> Result<(f64, f64)> {
    let (b0, b1) = aligned(r0, r1)?;
    stein_blocks(&b0, &b1)
}

pub(crate) fn stein_blocks(b0: &BlockMatrix, b1: &BlockMatrix) -> Result<(f64, f64)> {
    let e1 = b1.eigendecompose();
    let mut dropped_mass = 0.0;
    let mut d_acc = 0.0;
    let mut v_acc = 0.0;
    for (rho0_block, (lam1, u1)) in b0.blocks.iter().zip(&e1.parts) {
        let m = lam1.len();
        // rho0 expressed in the rho1 eigenbasis.
        let b = u1.transpose() * rho0_block * u1;
        let support: Vec<usize> = (0..m).filter(|&j| lam1[j] > SUPPORT_FLOOR).collect();
        for j in 0..m {
            if lam1[j] <= SUPPORT_FLOOR {
                dropped_mass += b[(j, j)].max(0.0);
            }
        }
        let k = support.len();
        if k == 0 {
            continue;
        }
        let b_sup = DMatrix::from_fn(k, k, |r, c| b[(support[r], support[c])]);
        let ln1: Vec<f64> = support.iter().map(|&j| lam1[j].ln()).collect();

        let se0 = b_sup.clone().symmetric_eigen();
        // ln rho0 on its own support; weights lam ln lam vanish at lam -> 0,
        // so flooring tiny eigenvalues only regularizes the arithmetic.
        let lam0: Vec<f64> = se0.eigenvalues.iter().map(|x| x.max(1e-300)).collect();
        let w0 = &se0.eigenvectors;
        let ln_rho0 = {
            let diag = DVector::from_vec(lam0.iter().map(|x| x.ln()).collect());
            w0 * DMatrix::from_diagonal(&diag) * w0.transpose()
        };
        let x_op = &ln_rho0 - DMatrix::from_diagonal(&DVector::from_vec(ln1.clone()));
        let bx = &b_sup * &x_op;
        d_acc += bx.trace();
        v_acc += (&bx * &x_op).trace();
    }
    if dropped_mass > SUPPORT_MASS_TOL {
        return Err(Error::SupportMismatch(dropped_mass));
    }
    let d = d_acc;
    let v = v_acc - d * d;
    Ok((d.max(0.0), v.max(0.0)))
}
