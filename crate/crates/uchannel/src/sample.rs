//! Seeded random generators for matrices, unitaries, CP maps and channels.
//!
//! Everything is driven by an explicit 64-bit seed through ChaCha8 so that
//! property suites, the amplification sampler and the probe experiments are
//! reproducible run to run.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cmatrix::{
    hermitian_eig, is_psd, partial_trace_b, partial_transpose, ComplexMatrix, Tolerance, C64,
};
use crate::umap::{kraus_from_choi, MatrixMap};
use crate::{Error, Result};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with independent standard complex Gaussian entries.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_unit_vector(dim: usize, rng: &mut impl Rng) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let n = crate::cmatrix::vec_norm(&v);
        if n > 1e-6 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Haar-like random unitary: Gram-Schmidt on Ginibre columns, with a second
/// orthogonalization pass for stability.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    loop {
        let g = ginibre(dim, dim, rng);
        if let Some(q) = orthonormalize_columns(&g) {
            return q;
        }
    }
}

/// Modified Gram-Schmidt (two passes). Returns `None` when the input columns
/// are numerically dependent, which the callers treat as "redraw".
fn orthonormalize_columns(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let rows = m.rows();
    let mut cols: Vec<Vec<C64>> = (0..m.cols()).map(|j| m.column(j)).collect();
    for j in 0..cols.len() {
        for _pass in 0..2 {
            for k in 0..j {
                let proj = crate::cmatrix::inner(&cols[j], &cols[k]).ok()?;
                for i in 0..rows {
                    let correction = proj * cols[k][i];
                    cols[j][i] -= correction;
                }
            }
        }
        let n = crate::cmatrix::vec_norm(&cols[j]);
        if n < 1e-8 {
            return None;
        }
        for z in cols[j].iter_mut() {
            *z /= n;
        }
    }
    ComplexMatrix::from_columns(rows, &cols).ok()
}

/// PSD matrix `G G*` with `G` a `dim x rank` Ginibre draw, trace-normalized
/// to `dim`.
pub fn random_psd(dim: usize, rank: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(dim, rank.max(1), rng);
    let p = g.multiply(&g.adjoint()).expect("shapes agree");
    let t = p.trace().expect("square").re;
    if t > 0.0 {
        p.scale(C64::new(dim as f64 / t, 0.0))
    } else {
        ComplexMatrix::identity(dim)
    }
}

/// Random CP map via a Ginibre Choi matrix `G G*`, normalized to unit trace.
pub fn random_cp_map(src_dim: usize, dst_dim: usize, rng: &mut impl Rng) -> MatrixMap {
    let size = src_dim * dst_dim;
    let g = ginibre(size, size, rng);
    let mut choi = g.multiply(&g.adjoint()).expect("shapes agree");
    let t = choi.trace().expect("square").re;
    if t > 0.0 {
        choi = choi.scale(C64::new(1.0 / t, 0.0));
    }
    MatrixMap::from_choi(src_dim, dst_dim, choi).expect("choi has the right size")
}

/// Random Hermitian (generally non-CP) perturbation of a CP map: a Ginibre
/// Choi minus `alpha I`, which has visible negative eigenvalues.
pub fn random_non_cp_map(
    src_dim: usize,
    dst_dim: usize,
    alpha: f64,
    rng: &mut impl Rng,
) -> MatrixMap {
    let cp = random_cp_map(src_dim, dst_dim, rng);
    let size = src_dim * dst_dim;
    let choi = cp
        .choi()
        .sub(&ComplexMatrix::identity(size).scale(C64::new(alpha, 0.0)))
        .expect("same shape");
    MatrixMap::from_choi(src_dim, dst_dim, choi).expect("choi has the right size")
}

/// Kraus operators of a random channel in the `sum_i R_i R_i* = I_m`
/// normalization: slices of a co-isometry built from a Ginibre draw.
/// Requires `dst_dim * count >= src_dim`.
pub fn random_coisometric_kraus(
    src_dim: usize,
    dst_dim: usize,
    count: usize,
    rng: &mut impl Rng,
) -> Result<Vec<ComplexMatrix>> {
    if dst_dim * count < src_dim {
        return Err(Error::DimensionMismatch(format!(
            "need dst_dim * count >= src_dim, got {dst_dim} * {count} < {src_dim}"
        )));
    }
    let q = loop {
        let g = ginibre(dst_dim * count, src_dim, rng);
        if let Some(q) = orthonormalize_columns(&g) {
            break q;
        }
    };
    // rows of q* are orthonormal; slice into count blocks of src_dim x dst_dim
    let s = q.adjoint();
    Ok((0..count)
        .map(|i| {
            ComplexMatrix::from_fn(src_dim, dst_dim, |a, b| s.get(a, i * dst_dim + b))
        })
        .collect())
}

/// Kraus operators of a random PPT channel: rejection-sample a trace-
/// preserving Ginibre Choi until its partial transpose is PSD.
pub fn random_ppt_channel_kraus(
    src_dim: usize,
    dst_dim: usize,
    rng: &mut impl Rng,
    tol: &Tolerance,
    max_tries: usize,
) -> Result<Vec<ComplexMatrix>> {
    for _ in 0..max_tries {
        let size = src_dim * dst_dim;
        let g = ginibre(size, size, rng);
        let choi = g.multiply(&g.adjoint())?;
        // normalize the B-side partial trace to the identity so the Kraus
        // operators satisfy sum R_i R_i* = I
        let marginal = partial_trace_b(&choi, src_dim, dst_dim);
        let w = match psd_inverse_sqrt(&marginal, tol) {
            Some(w) => w,
            None => continue,
        };
        let factor = w.tensor(&ComplexMatrix::identity(dst_dim));
        let normalized = factor.multiply(&choi)?.multiply(&factor.adjoint())?;
        if is_psd(&partial_transpose(&normalized, src_dim, dst_dim)?, tol) {
            return kraus_from_choi(&normalized, src_dim, dst_dim, tol);
        }
    }
    Err(Error::CostGuard(format!(
        "no PPT channel found in {max_tries} rejection-sampling tries"
    )))
}

/// `M^{-1/2}` for a PD matrix; `None` when nearly singular.
fn psd_inverse_sqrt(m: &ComplexMatrix, tol: &Tolerance) -> Option<ComplexMatrix> {
    let eig = hermitian_eig(m, tol).ok()?;
    let lambda_max = eig.eigenvalues.first().copied()?;
    if eig.eigenvalues.iter().any(|&l| l <= 1e-10 * lambda_max.max(1.0)) {
        return None;
    }
    let v = &eig.eigenvectors;
    let d = ComplexMatrix::diagonal(
        &eig.eigenvalues.iter().map(|&l| C64::new(1.0 / l.sqrt(), 0.0)).collect::<Vec<_>>(),
    );
    v.multiply(&d).ok()?.multiply(&v.adjoint()).ok()
}
