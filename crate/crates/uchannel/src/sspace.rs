//! S-space contexts: a fundamental unitary `U`, the indefinite form
//! `[x, y] = <x, U y>`, the U-adjoint `V# = U V* U*`, and U-positivity of
//! single operators. `U` is required to be unitary but not self-adjoint; the
//! Krein-space symmetry is the special case `U = U*`.

use serde::{Deserialize, Serialize};

use crate::cmatrix::{inner, psd_check, ComplexMatrix, PsdCheck, Tolerance, C64};
use crate::{Error, Result};

/// A dimension together with a validated fundamental unitary.
#[derive(Debug, Clone, Serialize)]
pub struct SSpaceContext {
    dim: usize,
    #[serde(rename = "U")]
    u: ComplexMatrix,
}

impl SSpaceContext {
    /// Validates that `u` is square and unitary within `tol.equality_eps`.
    pub fn new(u: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "fundamental unitary must be square, got {}x{}",
                u.rows(),
                u.cols()
            )));
        }
        let id = ComplexMatrix::identity(u.rows());
        let dev_right = u.multiply(&u.adjoint())?.sub(&id)?.frobenius_norm();
        let dev_left = u.adjoint().multiply(&u)?.sub(&id)?.frobenius_norm();
        let deviation = dev_right.max(dev_left);
        if deviation > tol.equality_eps {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(SSpaceContext { dim: u.rows(), u })
    }

    /// The definite case `U = I`, an ordinary Hilbert space.
    pub fn hilbert(dim: usize) -> Self {
        SSpaceContext { dim, u: ComplexMatrix::identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn u_adjoint_matrix(&self) -> ComplexMatrix {
        self.u.adjoint()
    }

    /// Same dimension and fundamental unitary up to `eps`.
    pub fn approx_eq(&self, other: &SSpaceContext, eps: f64) -> bool {
        self.dim == other.dim && self.u.approx_eq(&other.u, eps)
    }

    /// `[x, y] = <x, U y>`, linear in `x` and conjugate-linear in `y`.
    pub fn indefinite_form(&self, x: &[C64], y: &[C64]) -> Result<C64> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "vectors of length {} and {} in dimension {}",
                x.len(),
                y.len(),
                self.dim
            )));
        }
        inner(x, &self.u.mul_vec(y)?)
    }

    /// U-adjoint `V# = U V* U*`.
    pub fn u_adjoint(&self, v: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_operator(v)?;
        self.u.multiply(&v.adjoint())?.multiply(&self.u.adjoint())
    }

    /// `V` is U-positive iff `U* V` is PSD.
    pub fn is_u_positive(&self, v: &ComplexMatrix, tol: &Tolerance) -> bool {
        self.u_positive_check(v, tol).map(|c| c.psd).unwrap_or(false)
    }

    /// PSD diagnostics of `U* V`, the matrix whose positivity defines
    /// U-positivity of `V`.
    pub fn u_positive_check(&self, v: &ComplexMatrix, tol: &Tolerance) -> Result<PsdCheck> {
        self.check_operator(v)?;
        psd_check(&self.u.adjoint().multiply(v)?, tol)
    }

    /// Context of dimension `l * dim` with fundamental unitary `I_l (x) U`
    /// (block-diagonal copies of `U`). Requires `l >= 1`.
    pub fn amplify(&self, l: usize) -> SSpaceContext {
        assert!(l >= 1, "amplification level must be positive");
        let u = ComplexMatrix::identity(l).tensor(&self.u);
        SSpaceContext { dim: l * self.dim, u }
    }

    fn check_operator(&self, v: &ComplexMatrix) -> Result<()> {
        if !v.is_square() || v.rows() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "operator must be {0}x{0}, got {1}x{2}",
                self.dim,
                v.rows(),
                v.cols()
            )));
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for SSpaceContext {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            dim: usize,
            #[serde(rename = "U")]
            u: ComplexMatrix,
        }
        let raw = Raw::deserialize(deserializer)?;
        let ctx = SSpaceContext::new(raw.u, &Tolerance::default())
            .map_err(serde::de::Error::custom)?;
        if ctx.dim != raw.dim {
            return Err(serde::de::Error::custom(format!(
                "declared dim {} does not match matrix size {}",
                raw.dim, ctx.dim
            )));
        }
        Ok(ctx)
    }
}
