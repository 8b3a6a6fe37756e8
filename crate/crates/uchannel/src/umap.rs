//! Linear maps between matrix algebras `M_m -> M_n` and their U-positivity
//! theory: plain and Choi-U matrices, Kraus and Kraus-U decompositions, the
//! correspondence `psi(X) = U_B phi(U_A* X)` between CP and U-CP maps,
//! Stinespring U-dilations, and complete (U-)co-positivity.
//!
//! A map carries exactly one of three representations (Kraus list, Choi
//! matrix, transfer matrix on column-vectorized inputs); the Choi matrix is
//! the canonical one and the others are derived views. Kraus operators `R_i`
//! are `m x n` and act as `V -> sum_i R_i* V R_i`; the U-twisted action is
//! `V -> sum_i U_B R_i* U_A* V R_i`.

use serde::{Deserialize, Serialize};

use crate::cmatrix::{hermitian_eig, is_psd, psd_check, ComplexMatrix, PsdCheck, Tolerance, C64};
use crate::sspace::SSpaceContext;
use crate::{Error, Result};

/// Relative eigenvalue cutoff below which Choi eigenvalues do not produce a
/// Kraus operator. Keeps Kraus counts reproducible on rank-deficient inputs.
const KRAUS_RANK_CUTOFF: f64 = 1e-10;

/// Block (i, j) of a square block matrix with `block_size`-sized blocks.
pub(crate) fn block_of(m: &ComplexMatrix, i: usize, j: usize, block_size: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(block_size, block_size, |a, b| {
        m.get(i * block_size + a, j * block_size + b)
    })
}

/// Assemble the block matrix whose block (i, j) is `f(i, j)` (all blocks
/// `block_size x block_size`, `outer x outer` blocks), i.e.
/// `sum_ij e_ij (x) f(i, j)`.
pub(crate) fn assemble_blocks(
    outer: usize,
    block_size: usize,
    mut f: impl FnMut(usize, usize) -> ComplexMatrix,
) -> ComplexMatrix {
    let n = outer * block_size;
    let mut data = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..outer {
        for j in 0..outer {
            let blk = f(i, j);
            for a in 0..block_size {
                for b in 0..block_size {
                    data[(i * block_size + a) * n + (j * block_size + b)] = blk.get(a, b);
                }
            }
        }
    }
    ComplexMatrix::new(n, n, data).expect("block assembly is shape-consistent")
}

/// One of the three interchangeable representations of a linear map.
#[derive(Debug, Clone)]
pub enum MapRepr {
    /// Kraus operators `R_i`, each `m x n`; the empty list is the zero map.
    Kraus(Vec<ComplexMatrix>),
    /// `(m n) x (m n)` Choi matrix with block (i, j) equal to `phi(e_ij)`.
    Choi(ComplexMatrix),
    /// `n^2 x m^2` matrix acting on column-vectorized inputs.
    Transfer(ComplexMatrix),
}

/// A linear map `M_m -> M_n` in one of three representations.
#[derive(Debug, Clone)]
pub struct MatrixMap {
    src_dim: usize,
    dst_dim: usize,
    repr: MapRepr,
}

impl MatrixMap {
    pub fn from_kraus(src_dim: usize, dst_dim: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if src_dim == 0 || dst_dim == 0 {
            return Err(Error::DimensionMismatch("map dimensions must be positive".into()));
        }
        for (idx, r) in kraus.iter().enumerate() {
            if r.rows() != src_dim || r.cols() != dst_dim {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {idx} is {}x{}, expected {src_dim}x{dst_dim}",
                    r.rows(),
                    r.cols()
                )));
            }
        }
        Ok(MatrixMap { src_dim, dst_dim, repr: MapRepr::Kraus(kraus) })
    }

    pub fn from_choi(src_dim: usize, dst_dim: usize, choi: ComplexMatrix) -> Result<Self> {
        let size = src_dim * dst_dim;
        if !choi.is_square() || choi.rows() != size {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix must be {size}x{size}, got {}x{}",
                choi.rows(),
                choi.cols()
            )));
        }
        Ok(MatrixMap { src_dim, dst_dim, repr: MapRepr::Choi(choi) })
    }

    pub fn from_transfer(src_dim: usize, dst_dim: usize, transfer: ComplexMatrix) -> Result<Self> {
        if transfer.rows() != dst_dim * dst_dim || transfer.cols() != src_dim * src_dim {
            return Err(Error::DimensionMismatch(format!(
                "transfer matrix must be {}x{}, got {}x{}",
                dst_dim * dst_dim,
                src_dim * src_dim,
                transfer.rows(),
                transfer.cols()
            )));
        }
        Ok(MatrixMap { src_dim, dst_dim, repr: MapRepr::Transfer(transfer) })
    }

    /// Build a map (in Choi representation) by evaluating an action on all
    /// matrix units.
    pub fn from_action(
        src_dim: usize,
        dst_dim: usize,
        mut action: impl FnMut(&ComplexMatrix) -> Result<ComplexMatrix>,
    ) -> Result<Self> {
        let mut blocks = Vec::with_capacity(src_dim * src_dim);
        for i in 0..src_dim {
            for j in 0..src_dim {
                let out = action(&ComplexMatrix::matrix_unit(src_dim, src_dim, i, j))?;
                if out.rows() != dst_dim || out.cols() != dst_dim {
                    return Err(Error::DimensionMismatch(format!(
                        "action returned {}x{}, expected {dst_dim}x{dst_dim}",
                        out.rows(),
                        out.cols()
                    )));
                }
                blocks.push(out);
            }
        }
        let choi = assemble_blocks(src_dim, dst_dim, |i, j| blocks[i * src_dim + j].clone());
        Self::from_choi(src_dim, dst_dim, choi)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_kraus(dim, dim, vec![ComplexMatrix::identity(dim)])
            .expect("identity Kraus is well-formed")
    }

    /// The transpose map `V -> V^t` on `M_dim`.
    pub fn transpose_map(dim: usize) -> Self {
        Self::from_action(dim, dim, |v| Ok(v.transpose())).expect("transpose action is total")
    }

    /// The completely depolarizing map `V -> Tr(V) I_n / n`.
    pub fn depolarizing(src_dim: usize, dst_dim: usize) -> Self {
        Self::from_action(src_dim, dst_dim, |v| {
            let t = v.trace()?;
            Ok(ComplexMatrix::identity(dst_dim).scale(t / dst_dim as f64))
        })
        .expect("depolarizing action is total")
    }

    pub fn src_dim(&self) -> usize {
        self.src_dim
    }

    pub fn dst_dim(&self) -> usize {
        self.dst_dim
    }

    pub fn repr(&self) -> &MapRepr {
        &self.repr
    }

    /// Apply the represented map; every representation has its own path.
    pub fn apply(&self, v: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !v.is_square() || v.rows() != self.src_dim {
            return Err(Error::DimensionMismatch(format!(
                "input must be {0}x{0}, got {1}x{2}",
                self.src_dim,
                v.rows(),
                v.cols()
            )));
        }
        match &self.repr {
            MapRepr::Kraus(kraus) => {
                let mut out = ComplexMatrix::zeros(self.dst_dim, self.dst_dim);
                for r in kraus {
                    out = out.add(&r.adjoint().multiply(v)?.multiply(r)?)?;
                }
                Ok(out)
            }
            MapRepr::Choi(choi) => {
                let n = self.dst_dim;
                let mut out = ComplexMatrix::zeros(n, n);
                for i in 0..self.src_dim {
                    for j in 0..self.src_dim {
                        let vij = v.get(i, j);
                        if vij == C64::new(0.0, 0.0) {
                            continue;
                        }
                        out = out.add(&block_of(choi, i, j, n).scale(vij))?;
                    }
                }
                Ok(out)
            }
            MapRepr::Transfer(t) => {
                let m = self.src_dim;
                let n = self.dst_dim;
                let mut vec_in = vec![C64::new(0.0, 0.0); m * m];
                for i in 0..m {
                    for j in 0..m {
                        vec_in[j * m + i] = v.get(i, j);
                    }
                }
                let vec_out = t.mul_vec(&vec_in)?;
                Ok(ComplexMatrix::from_fn(n, n, |k, l| vec_out[l * n + k]))
            }
        }
    }

    /// Choi matrix `sum_ij e_ij (x) phi(e_ij)`.
    pub fn choi(&self) -> ComplexMatrix {
        match &self.repr {
            MapRepr::Choi(c) => c.clone(),
            _ => assemble_blocks(self.src_dim, self.dst_dim, |i, j| {
                self.apply(&ComplexMatrix::matrix_unit(self.src_dim, self.src_dim, i, j))
                    .expect("matrix units have the right shape")
            }),
        }
    }

    /// Transfer matrix on column-vectorized inputs:
    /// `vec(phi(V)) = T vec(V)` with `vec(M)[j d + i] = M[i][j]`.
    pub fn transfer(&self) -> ComplexMatrix {
        let (m, n) = (self.src_dim, self.dst_dim);
        let choi = self.choi();
        ComplexMatrix::from_fn(n * n, m * m, |r, c| {
            let (l, k) = (r / n, r % n);
            let (j, i) = (c / m, c % m);
            choi.get(i * n + k, j * n + l)
        })
    }

    /// Same linear map re-represented through its Choi matrix.
    pub fn to_choi_repr(&self) -> Self {
        MatrixMap { src_dim: self.src_dim, dst_dim: self.dst_dim, repr: MapRepr::Choi(self.choi()) }
    }

    /// Same linear map re-represented through its transfer matrix.
    pub fn to_transfer_repr(&self) -> Self {
        MatrixMap {
            src_dim: self.src_dim,
            dst_dim: self.dst_dim,
            repr: MapRepr::Transfer(self.transfer()),
        }
    }

    /// Kraus representation; only defined for CP maps.
    pub fn to_kraus_repr(&self, tol: &Tolerance) -> Result<Self> {
        let kraus = kraus_from_choi(&self.choi(), self.src_dim, self.dst_dim, tol)?;
        Self::from_kraus(self.src_dim, self.dst_dim, kraus)
    }

    /// Composition `self ∘ before` (apply `before` first).
    pub fn compose(&self, before: &MatrixMap) -> Result<MatrixMap> {
        if before.dst_dim != self.src_dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose: inner map targets M_{}, outer expects M_{}",
                before.dst_dim, self.src_dim
            )));
        }
        MatrixMap::from_action(before.src_dim, self.dst_dim, |v| self.apply(&before.apply(v)?))
    }

    /// `self ∘ transpose`, the map whose Choi decides complete co-positivity.
    pub fn compose_with_transpose(&self) -> MatrixMap {
        MatrixMap::from_action(self.src_dim, self.dst_dim, |v| self.apply(&v.transpose()))
            .expect("transpose precomposition is total")
    }

    /// Frobenius distance between two maps measured on their Choi matrices.
    pub fn distance(&self, other: &MatrixMap) -> Result<f64> {
        if self.src_dim != other.src_dim || self.dst_dim != other.dst_dim {
            return Err(Error::DimensionMismatch("maps have different shapes".into()));
        }
        Ok(self.choi().sub(&other.choi())?.frobenius_norm())
    }

    /// Map-level equality to relative tolerance, representation-independent.
    pub fn approx_eq(&self, other: &MatrixMap, eps: f64) -> bool {
        self.src_dim == other.src_dim
            && self.dst_dim == other.dst_dim
            && self.choi().approx_eq(&other.choi(), eps)
    }
}

// --- serde -------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MapJson {
    src_dim: usize,
    dst_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    kraus: Option<Vec<ComplexMatrix>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    choi: Option<ComplexMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    transfer: Option<ComplexMatrix>,
}

impl Serialize for MatrixMap {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let mut json = MapJson {
            src_dim: self.src_dim,
            dst_dim: self.dst_dim,
            kraus: None,
            choi: None,
            transfer: None,
        };
        match &self.repr {
            MapRepr::Kraus(k) => json.kraus = Some(k.clone()),
            MapRepr::Choi(c) => json.choi = Some(c.clone()),
            MapRepr::Transfer(t) => json.transfer = Some(t.clone()),
        }
        json.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MatrixMap {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let raw = MapJson::deserialize(deserializer)?;
        let result = match (raw.kraus, raw.choi, raw.transfer) {
            (Some(k), None, None) => MatrixMap::from_kraus(raw.src_dim, raw.dst_dim, k),
            (None, Some(c), None) => MatrixMap::from_choi(raw.src_dim, raw.dst_dim, c),
            (None, None, Some(t)) => MatrixMap::from_transfer(raw.src_dim, raw.dst_dim, t),
            _ => Err(Error::InvalidInput(
                "map JSON must carry exactly one of `kraus`, `choi`, `transfer`".into(),
            )),
        };
        result.map_err(serde::de::Error::custom)
    }
}

// --- Kraus U-forms -------------------------------------------------------

/// Kraus operators together with source/target S-space contexts, realizing
/// `psi(V) = sum_i R_i# V R_i` with `R_i# = U_B R_i* U_A*`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KrausUForm {
    src: SSpaceContext,
    dst: SSpaceContext,
    kraus: Vec<ComplexMatrix>,
}

impl KrausUForm {
    pub fn new(src: SSpaceContext, dst: SSpaceContext, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        for (idx, r) in kraus.iter().enumerate() {
            if r.rows() != src.dim() || r.cols() != dst.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {idx} is {}x{}, expected {}x{}",
                    r.rows(),
                    r.cols(),
                    src.dim(),
                    dst.dim()
                )));
            }
        }
        Ok(KrausUForm { src, dst, kraus })
    }

    pub fn src(&self) -> &SSpaceContext {
        &self.src
    }

    pub fn dst(&self) -> &SSpaceContext {
        &self.dst
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `psi(V) = sum_i U_B R_i* U_A* V R_i`.
    pub fn apply_u(&self, v: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !v.is_square() || v.rows() != self.src.dim() {
            return Err(Error::DimensionMismatch(format!(
                "input must be {0}x{0}, got {1}x{2}",
                self.src.dim(),
                v.rows(),
                v.cols()
            )));
        }
        let ua_adj_v = self.src.u_adjoint_matrix().multiply(v)?;
        let mut out = ComplexMatrix::zeros(self.dst.dim(), self.dst.dim());
        for r in &self.kraus {
            let term = self.dst.u().multiply(&r.adjoint())?.multiply(&ua_adj_v)?.multiply(r)?;
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// The induced linear map as a representation-bearing value.
    pub fn induced_map(&self) -> MatrixMap {
        MatrixMap::from_action(self.src.dim(), self.dst.dim(), |v| self.apply_u(v))
            .expect("apply_u is total on matrix units")
    }

    /// Source and target contexts agree (same space, same fundamental
    /// unitary), so powers of the map are defined.
    pub fn is_endomorphic(&self, eps: f64) -> bool {
        self.src.approx_eq(&self.dst, eps)
    }
}

// --- the phi <-> psi correspondence ----------------------------------------

/// `psi(X) = U_B phi(U_A* X)`: the U-CP map corresponding to a CP map.
pub fn correspondence_phi_to_psi(
    phi: &MatrixMap,
    src: &SSpaceContext,
    dst: &SSpaceContext,
) -> Result<MatrixMap> {
    check_map_contexts(phi, src, dst)?;
    let ua_adj = src.u_adjoint_matrix();
    MatrixMap::from_action(phi.src_dim(), phi.dst_dim(), |x| {
        dst.u().multiply(&phi.apply(&ua_adj.multiply(x)?)?)
    })
}

/// `phi(X) = U_B* psi(U_A X)`: inverse of [`correspondence_phi_to_psi`].
pub fn correspondence_psi_to_phi(
    psi: &MatrixMap,
    src: &SSpaceContext,
    dst: &SSpaceContext,
) -> Result<MatrixMap> {
    check_map_contexts(psi, src, dst)?;
    let ub_adj = dst.u_adjoint_matrix();
    MatrixMap::from_action(psi.src_dim(), psi.dst_dim(), |x| {
        ub_adj.multiply(&psi.apply(&src.u().multiply(x)?)?)
    })
}

fn check_map_contexts(map: &MatrixMap, src: &SSpaceContext, dst: &SSpaceContext) -> Result<()> {
    if src.dim() != map.src_dim() || dst.dim() != map.dst_dim() {
        return Err(Error::DimensionMismatch(format!(
            "map is M_{} -> M_{}, contexts have dims {} and {}",
            map.src_dim(),
            map.dst_dim(),
            src.dim(),
            dst.dim()
        )));
    }
    Ok(())
}

// --- Choi matrices and positivity criteria ---------------------------------

/// Choi U-matrix `sum_ij e_ij (x) psi(U_A e_ij)`.
pub fn choi_u_matrix(psi: &MatrixMap, src: &SSpaceContext) -> Result<ComplexMatrix> {
    if src.dim() != psi.src_dim() {
        return Err(Error::DimensionMismatch(format!(
            "source context dim {} does not match map source {}",
            src.dim(),
            psi.src_dim()
        )));
    }
    let m = psi.src_dim();
    let n = psi.dst_dim();
    let mut blocks = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let unit = ComplexMatrix::matrix_unit(m, m, i, j);
            blocks.push(psi.apply(&src.u().multiply(&unit)?)?);
        }
    }
    Ok(assemble_blocks(m, n, |i, j| blocks[i * m + j].clone()))
}

/// PSD diagnostics of the plain Choi matrix; `phi` is CP iff this is PSD.
pub fn cp_check(phi: &MatrixMap, tol: &Tolerance) -> PsdCheck {
    psd_check(&phi.choi(), tol).expect("Choi matrix is square")
}

pub fn is_cp(phi: &MatrixMap, tol: &Tolerance) -> bool {
    cp_check(phi, tol).psd
}

/// PSD diagnostics of `(I_m (x) U_B*) C_psi^U`; `psi` is (U_A, U_B)-CP iff
/// this is PSD.
pub fn ucp_check(
    psi: &MatrixMap,
    src: &SSpaceContext,
    dst: &SSpaceContext,
    tol: &Tolerance,
) -> Result<PsdCheck> {
    check_map_contexts(psi, src, dst)?;
    let cu = choi_u_matrix(psi, src)?;
    let twist = ComplexMatrix::identity(psi.src_dim()).tensor(&dst.u_adjoint_matrix());
    psd_check(&twist.multiply(&cu)?, tol)
}

pub fn is_ucp(
    psi: &MatrixMap,
    src: &SSpaceContext,
    dst: &SSpaceContext,
    tol: &Tolerance,
) -> Result<bool> {
    Ok(ucp_check(psi, src, dst, tol)?.psd)
}

/// Sampling-based necessary test of (U_A, U_B)-CP-ness at amplification
/// level `l`: draws `trials` random `U_A^l`-positive inputs and checks that
/// their images are `U_B^l`-positive. An independent oracle against
/// [`is_ucp`]; `false` carries a concrete witness, `true` is only evidence.
pub fn is_ucp_by_amplification(
    psi: &MatrixMap,
    src: &SSpaceContext,
    dst: &SSpaceContext,
    l: usize,
    trials: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<bool> {
    check_map_contexts(psi, src, dst)?;
    if l == 0 || l > 4 {
        return Err(Error::CostGuard(format!("amplification level {l} outside 1..=4")));
    }
    let mut rng = crate::sample::rng(seed);
    let m = psi.src_dim();
    let n = psi.dst_dim();
    let amp_src = src.amplify(l);
    let ub_l_adj = ComplexMatrix::identity(l).tensor(&dst.u_adjoint_matrix());
    for _ in 0..trials {
        // U_A^l * (PSD sample) is U_A^l-positive by construction
        let g = crate::sample::ginibre(l * m, l * m, &mut rng);
        let mut p = g.multiply(&g.adjoint())?;
        let t = p.trace()?.re;
        if t > 0.0 {
            p = p.scale(C64::new((l * m) as f64 / t, 0.0));
        }
        let v = amp_src.u().multiply(&p)?;
        // blockwise amplified application
        let image = assemble_blocks(l, n, |i, j| {
            psi.apply(&block_of(&v, i, j, m)).expect("block has source shape")
        });
        if !is_psd(&ub_l_adj.multiply(&image)?, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Extract Kraus operators from a PSD Choi matrix by eigendecomposition.
///
/// Eigenvalues at or below `1e-10 * lambda_max` are dropped; the list is
/// ordered by descending eigenvalue with ties broken lexicographically on the
/// rounded eigenvector, so rank-deficient inputs give reproducible output.
pub fn kraus_from_choi(
    choi: &ComplexMatrix,
    src_dim: usize,
    dst_dim: usize,
    tol: &Tolerance,
) -> Result<Vec<ComplexMatrix>> {
    let size = src_dim * dst_dim;
    if !choi.is_square() || choi.rows() != size {
        return Err(Error::DimensionMismatch(format!(
            "Choi matrix must be {size}x{size}, got {}x{}",
            choi.rows(),
            choi.cols()
        )));
    }
    let check = psd_check(choi, tol)?;
    if !check.psd {
        return Err(Error::NotPsd {
            reason: format!(
                "Choi matrix has min eigenvalue {:.3e} (hermitian deviation {:.3e})",
                check.eigenvalues.last().copied().unwrap_or(0.0),
                check.hermitian_deviation
            ),
        });
    }
    let eig = hermitian_eig(&choi.hermitized()?, tol)?;
    let lambda_max = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let cutoff = KRAUS_RANK_CUTOFF * lambda_max.max(0.0);
    let mut kept: Vec<(f64, Vec<C64>)> = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > cutoff && lambda > 0.0 {
            kept.push((lambda, eig.eigenvectors.column(k)));
        }
    }
    kept.sort_by(|(la, va), (lb, vb)| {
        lb.partial_cmp(la).unwrap().then_with(|| lex_key(va).cmp(&lex_key(vb)))
    });
    let mut kraus = Vec::with_capacity(kept.len());
    for (lambda, v) in kept {
        let s = lambda.sqrt();
        kraus.push(ComplexMatrix::from_fn(src_dim, dst_dim, |i, a| {
            (v[i * dst_dim + a] * s).conj()
        }));
    }
    Ok(kraus)
}

fn lex_key(v: &[C64]) -> Vec<(i64, i64)> {
    v.iter().map(|z| ((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64)).collect()
}

/// Kraus U-decomposition of a (U_A, U_B)-CP map: converts to the plain CP
/// side, extracts Kraus operators there, and wraps them with the contexts.
pub fn kraus_u_form(
    psi: &MatrixMap,
    src: &SSpaceContext,
    dst: &SSpaceContext,
    tol: &Tolerance,
) -> Result<KrausUForm> {
    let check = ucp_check(psi, src, dst, tol)?;
    if !check.psd {
        return Err(Error::NotUcp {
            reason: format!(
                "twisted Choi U-matrix has min eigenvalue {:.3e} (hermitian deviation {:.3e})",
                check.eigenvalues.last().copied().unwrap_or(0.0),
                check.hermitian_deviation
            ),
        });
    }
    let phi = correspondence_psi_to_phi(psi, src, dst)?;
    let kraus = kraus_from_choi(&phi.choi(), psi.src_dim(), psi.dst_dim(), tol)?;
    KrausUForm::new(src.clone(), dst.clone(), kraus)
}

// --- Stinespring U-dilation -------------------------------------------------

/// Matrix-scale Stinespring data for a Kraus U-form with `l` operators: the
/// representation is `pi(V) = V (x) I_l` on the dilation S-space of dimension
/// `m l` with fundamental unitary `pi(U_A) = U_A (x) I_l`, and `R` stacks the
/// Kraus action, `R h = sum_i (R_i h) (x) e_i`.
#[derive(Debug, Clone)]
pub struct StinespringDilation {
    pub dilation_dim: usize,
    pub r: ComplexMatrix,
    pub u_dilation: ComplexMatrix,
}

impl StinespringDilation {
    /// `U_B R* U_dilation* (V (x) I_l) R`, which must reproduce `psi(V)`.
    pub fn reconstruct(&self, dst: &SSpaceContext, v: &ComplexMatrix) -> Result<ComplexMatrix> {
        let m = v.rows();
        if !v.is_square() || self.dilation_dim % m != 0 {
            return Err(Error::DimensionMismatch(format!(
                "input {}x{} incompatible with dilation dimension {}",
                v.rows(),
                v.cols(),
                self.dilation_dim
            )));
        }
        let l = self.dilation_dim / m;
        let pi_v = v.tensor(&ComplexMatrix::identity(l));
        dst.u()
            .multiply(&self.r.adjoint())?
            .multiply(&self.u_dilation.adjoint())?
            .multiply(&pi_v)?
            .multiply(&self.r)
    }
}

/// Stinespring U-dilation of a Kraus U-form.
pub fn stinespring_u_dilation(form: &KrausUForm) -> StinespringDilation {
    let m = form.src().dim();
    let n = form.dst().dim();
    let l = form.kraus().len().max(1);
    let r = ComplexMatrix::from_fn(m * l, n, |row, b| {
        let (a, i) = (row / l, row % l);
        if i < form.kraus().len() {
            form.kraus()[i].get(a, b)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let u_dilation = form.src().u().tensor(&ComplexMatrix::identity(l));
    StinespringDilation { dilation_dim: m * l, r, u_dilation }
}

// --- intertwining and co-positivity ------------------------------------------

/// Outcome of the intertwining test `phi(U_1* V) = U_2* phi(V)` and
/// `phi(U_1 V) = U_2 phi(V)` on all matrix units. When the identities hold,
/// CP and (U_1, U_2)-CP coincide, so both verdicts are carried along.
#[derive(Debug, Clone, Serialize)]
pub struct IntertwiningCheck {
    pub intertwines: bool,
    pub max_deviation: f64,
    pub cp: bool,
    pub ucp: bool,
}

pub fn check_intertwining(
    phi: &MatrixMap,
    src: &SSpaceContext,
    dst: &SSpaceContext,
    tol: &Tolerance,
) -> Result<IntertwiningCheck> {
    check_map_contexts(phi, src, dst)?;
    let m = phi.src_dim();
    let mut max_dev: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let unit = ComplexMatrix::matrix_unit(m, m, i, j);
            let image = phi.apply(&unit)?;
            let lhs1 = phi.apply(&src.u_adjoint_matrix().multiply(&unit)?)?;
            let rhs1 = dst.u_adjoint_matrix().multiply(&image)?;
            let lhs2 = phi.apply(&src.u().multiply(&unit)?)?;
            let rhs2 = dst.u().multiply(&image)?;
            max_dev = max_dev
                .max(lhs1.sub(&rhs1)?.frobenius_norm())
                .max(lhs2.sub(&rhs2)?.frobenius_norm());
        }
    }
    let intertwines = max_dev <= tol.equality_eps * 1f64.max(phi.choi().frobenius_norm());
    Ok(IntertwiningCheck {
        intertwines,
        max_deviation: max_dev,
        cp: is_cp(phi, tol),
        ucp: is_ucp(phi, src, dst, tol)?,
    })
}

/// `phi` is completely co-positive iff `phi ∘ transpose` is CP.
pub fn is_completely_co_positive(phi: &MatrixMap, tol: &Tolerance) -> bool {
    is_cp(&phi.compose_with_transpose(), tol)
}

/// `psi` is completely (U_A, U_B)-co-positive iff its plain correspondent is
/// completely co-positive.
pub fn is_u_completely_co_positive(
    psi: &MatrixMap,
    src: &SSpaceContext,
    dst: &SSpaceContext,
    tol: &Tolerance,
) -> Result<bool> {
    let phi = correspondence_psi_to_phi(psi, src, dst)?;
    Ok(is_completely_co_positive(&phi, tol))
}

/// (U_1, U_2)-PPT map: (U_1, U_2)-CP and completely (U_1, U_2)-co-positive.
pub fn is_u_ppt_map(
    psi: &MatrixMap,
    src: &SSpaceContext,
    dst: &SSpaceContext,
    tol: &Tolerance,
) -> Result<bool> {
    Ok(is_ucp(psi, src, dst, tol)? && is_u_completely_co_positive(psi, src, dst, tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::partial_transpose;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn u1_ctx() -> SSpaceContext {
        let u = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]);
        SSpaceContext::new(u, &tol()).unwrap()
    }

    #[test]
    fn apply_identity_and_kraus_units() {
        let id = MatrixMap::identity(2);
        let v = ComplexMatrix::new(2, 2, vec![c(1.0, 2.0), c(0.0, 1.0), c(3.0, 0.0), c(4.0, -4.0)])
            .unwrap();
        assert!(id.apply(&v).unwrap().approx_eq(&v, 1e-15));

        // Kraus {e12}: phi(V) = e21 V e12 = V[0][0] e22
        let e12 = ComplexMatrix::matrix_unit(2, 2, 0, 1);
        let phi = MatrixMap::from_kraus(2, 2, vec![e12]).unwrap();
        let out = phi.apply(&ComplexMatrix::identity(2)).unwrap();
        assert!(out.approx_eq(&ComplexMatrix::matrix_unit(2, 2, 1, 1), 1e-15));
    }

    #[test]
    fn apply_depolarizing_choi_vs_transfer() {
        // completely depolarizing on M_2 has Choi I_4 / 2
        let dep =
            MatrixMap::from_choi(2, 2, ComplexMatrix::identity(4).scale(c(0.5, 0.0))).unwrap();
        let e11 = ComplexMatrix::matrix_unit(2, 2, 0, 0);
        let expect = ComplexMatrix::identity(2).scale(c(0.5, 0.0));
        assert!(dep.apply(&e11).unwrap().approx_eq(&expect, 1e-15));
        // transfer-matrix oracle gives the same action
        let via_transfer = dep.to_transfer_repr();
        assert!(via_transfer.apply(&e11).unwrap().approx_eq(&expect, 1e-15));
    }

    #[test]
    fn representations_agree_on_matrix_units() {
        let kraus = vec![
            ComplexMatrix::new(2, 2, vec![c(0.6, 0.1), c(0.0, 0.3), c(0.2, 0.0), c(0.5, -0.5)])
                .unwrap(),
            ComplexMatrix::new(2, 2, vec![c(0.1, 0.0), c(0.4, 0.2), c(0.0, -0.2), c(0.3, 0.3)])
                .unwrap(),
        ];
        let phi = MatrixMap::from_kraus(2, 2, kraus).unwrap();
        let via_choi = phi.to_choi_repr();
        let via_transfer = phi.to_transfer_repr();
        for i in 0..2 {
            for j in 0..2 {
                let unit = ComplexMatrix::matrix_unit(2, 2, i, j);
                let a = phi.apply(&unit).unwrap();
                assert!(via_choi.apply(&unit).unwrap().approx_eq(&a, 1e-13));
                assert!(via_transfer.apply(&unit).unwrap().approx_eq(&a, 1e-13));
            }
        }
    }

    #[test]
    fn apply_u_reductions() {
        // identity contexts reduce apply_u to the plain Kraus action
        let id2 = SSpaceContext::hilbert(2);
        let r = ComplexMatrix::new(2, 2, vec![c(0.3, 0.1), c(0.0, 0.7), c(0.5, 0.0), c(0.2, -0.1)])
            .unwrap();
        let form = KrausUForm::new(id2.clone(), id2, vec![r.clone()]).unwrap();
        let phi = MatrixMap::from_kraus(2, 2, vec![r]).unwrap();
        let v = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(2.0, 2.0), c(0.0, -1.0), c(3.0, 1.0)])
            .unwrap();
        assert!(form.apply_u(&v).unwrap().approx_eq(&phi.apply(&v).unwrap(), 1e-14));

        // single Kraus R = I with m = n: psi(V) = U_B U_A* V
        let src = u1_ctx();
        let dst = SSpaceContext::hilbert(2);
        let form =
            KrausUForm::new(src.clone(), dst.clone(), vec![ComplexMatrix::identity(2)]).unwrap();
        let expect = dst.u().multiply(&src.u_adjoint_matrix()).unwrap().multiply(&v).unwrap();
        assert!(form.apply_u(&v).unwrap().approx_eq(&expect, 1e-14));
    }

    #[test]
    fn apply_u_on_source_unitary() {
        // psi(U_A) = sum_i U_B R_i* R_i
        let src = u1_ctx();
        let dst = u1_ctx();
        let kraus = vec![
            ComplexMatrix::new(2, 2, vec![c(0.2, 0.4), c(0.1, 0.0), c(0.0, 0.5), c(0.6, -0.2)])
                .unwrap(),
            ComplexMatrix::new(2, 2, vec![c(0.7, 0.0), c(0.0, 0.1), c(0.3, 0.3), c(0.2, 0.0)])
                .unwrap(),
        ];
        let form = KrausUForm::new(src.clone(), dst.clone(), kraus.clone()).unwrap();
        let mut expect = ComplexMatrix::zeros(2, 2);
        for r in &kraus {
            expect =
                expect.add(&dst.u().multiply(&r.adjoint()).unwrap().multiply(r).unwrap()).unwrap();
        }
        assert!(form.apply_u(src.u()).unwrap().approx_eq(&expect, 1e-14));
    }

    #[test]
    fn correspondence_round_trip() {
        let src = u1_ctx();
        let dst = u1_ctx();
        // identity contexts: psi = phi
        let id_ctx = SSpaceContext::hilbert(2);
        let phi = MatrixMap::from_kraus(
            2,
            2,
            vec![ComplexMatrix::new(
                2,
                2,
                vec![c(0.4, 0.0), c(0.2, 0.2), c(0.0, 0.1), c(0.8, 0.0)],
            )
            .unwrap()],
        )
        .unwrap();
        let psi = correspondence_phi_to_psi(&phi, &id_ctx, &id_ctx).unwrap();
        assert!(psi.approx_eq(&phi, 1e-14));

        // round trip phi -> psi -> phi'
        let psi = correspondence_phi_to_psi(&phi, &src, &dst).unwrap();
        let back = correspondence_psi_to_phi(&psi, &src, &dst).unwrap();
        assert!(back.approx_eq(&phi, 1e-13));

        // phi = identity with U_A = U_B = U_1: psi(X) = U_1 U_1* X = X
        let psi = correspondence_phi_to_psi(&MatrixMap::identity(2), &src, &src).unwrap();
        assert!(psi.approx_eq(&MatrixMap::identity(2), 1e-14));
    }

    #[test]
    fn choi_matrix_examples() {
        // identity map: Choi = sum e_ij (x) e_ij, eigenvalues (2, 0, 0, 0)
        let choi = MatrixMap::identity(2).choi();
        let eig = hermitian_eig(&choi, &tol()).unwrap();
        assert!((eig.eigenvalues[0] - 2.0).abs() < 1e-12);
        for k in 1..4 {
            assert!(eig.eigenvalues[k].abs() < 1e-12);
        }

        // depolarizing: Choi = I_4 / 2
        let dep = MatrixMap::depolarizing(2, 2);
        assert!(dep.choi().approx_eq(&ComplexMatrix::identity(4).scale(c(0.5, 0.0)), 1e-14));

        // transpose map: Choi is the swap, eigenvalues (1, 1, 1, -1), not PSD
        let tr = MatrixMap::transpose_map(2);
        let eig = hermitian_eig(&tr.choi(), &tol()).unwrap();
        for (got, want) in eig.eigenvalues.iter().zip([1.0, 1.0, 1.0, -1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(!is_cp(&tr, &tol()));
    }

    #[test]
    fn choi_u_examples() {
        let src = u1_ctx();
        // U_A = I: Choi U-matrix reduces to the plain Choi matrix
        let phi = MatrixMap::depolarizing(2, 2);
        let id_ctx = SSpaceContext::hilbert(2);
        let cu = choi_u_matrix(&phi, &id_ctx).unwrap();
        assert!(cu.approx_eq(&phi.choi(), 1e-14));

        // factorization C_psi^U = (I (x) U_B) C_phi for corresponding pairs
        let dst = u1_ctx();
        let psi = correspondence_phi_to_psi(&phi, &src, &dst).unwrap();
        let cu = choi_u_matrix(&psi, &src).unwrap();
        let factor = ComplexMatrix::identity(2).tensor(dst.u());
        assert!(cu.approx_eq(&factor.multiply(&phi.choi()).unwrap(), 1e-13));

        // psi = identity map with U_A = U_1: blocks are U_1 e_ij
        let cu = choi_u_matrix(&MatrixMap::identity(2), &src).unwrap();
        let expect = assemble_blocks(2, 2, |i, j| {
            src.u().multiply(&ComplexMatrix::matrix_unit(2, 2, i, j)).unwrap()
        });
        assert!(cu.approx_eq(&expect, 1e-14));
    }

    #[test]
    fn ucp_examples() {
        let src = u1_ctx();
        let dst = u1_ctx();
        // any Kraus U-form induces a UCP map
        let kraus = vec![ComplexMatrix::new(
            2,
            2,
            vec![c(0.5, 0.0), c(0.1, 0.3), c(0.0, 0.4), c(0.7, 0.0)],
        )
        .unwrap()];
        let form = KrausUForm::new(src.clone(), dst.clone(), kraus).unwrap();
        assert!(is_ucp(&form.induced_map(), &src, &dst, &tol()).unwrap());

        // transported depolarizing is UCP
        let psi = correspondence_phi_to_psi(&MatrixMap::depolarizing(2, 2), &src, &dst).unwrap();
        assert!(is_ucp(&psi, &src, &dst, &tol()).unwrap());

        // transported transpose keeps the swap spectrum: not UCP
        let psi = correspondence_phi_to_psi(&MatrixMap::transpose_map(2), &src, &dst).unwrap();
        assert!(!is_ucp(&psi, &src, &dst, &tol()).unwrap());
    }

    #[test]
    fn amplification_sampler() {
        let src = u1_ctx();
        let dst = u1_ctx();
        let kraus = vec![ComplexMatrix::new(
            2,
            2,
            vec![c(0.5, 0.0), c(0.1, 0.3), c(0.0, 0.4), c(0.7, 0.0)],
        )
        .unwrap()];
        let form = KrausUForm::new(src.clone(), dst.clone(), kraus).unwrap();
        assert!(
            is_ucp_by_amplification(&form.induced_map(), &src, &dst, 2, 100, 7, &tol()).unwrap()
        );

        let transported_transpose =
            correspondence_phi_to_psi(&MatrixMap::transpose_map(2), &src, &dst).unwrap();
        // a violation is found quickly at l = 2
        assert!(!is_ucp_by_amplification(&transported_transpose, &src, &dst, 2, 50, 7, &tol())
            .unwrap());
        // but the transpose is positive, so l = 1 sampling finds nothing
        assert!(is_ucp_by_amplification(&transported_transpose, &src, &dst, 1, 100, 7, &tol())
            .unwrap());

        assert!(matches!(
            is_ucp_by_amplification(&form.induced_map(), &src, &dst, 5, 1, 7, &tol()),
            Err(Error::CostGuard(_))
        ));
    }

    #[test]
    fn kraus_from_choi_examples() {
        // identity map: single Kraus = I (canonical phase)
        let kraus = kraus_from_choi(&MatrixMap::identity(2).choi(), 2, 2, &tol()).unwrap();
        assert_eq!(kraus.len(), 1);
        assert!(kraus[0].approx_eq(&ComplexMatrix::identity(2), 1e-12));

        // depolarizing on M_2: 4 Kraus operators of Frobenius norm 1/sqrt(2)
        let kraus =
            kraus_from_choi(&ComplexMatrix::identity(4).scale(c(0.5, 0.0)), 2, 2, &tol()).unwrap();
        assert_eq!(kraus.len(), 4);
        for r in &kraus {
            assert!((r.frobenius_norm() - 0.5f64.sqrt()).abs() < 1e-12);
        }
        // reassembly: sum_k R_k* e_ij R_k matches the Choi blocks
        let rebuilt = MatrixMap::from_kraus(2, 2, kraus).unwrap();
        assert!(rebuilt.choi().approx_eq(&ComplexMatrix::identity(4).scale(c(0.5, 0.0)), 1e-12));

        // swap Choi is not PSD
        assert!(matches!(
            kraus_from_choi(&MatrixMap::transpose_map(2).choi(), 2, 2, &tol()),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn kraus_from_choi_rank_two() {
        let mut rng = crate::sample::rng(11);
        let g = crate::sample::ginibre(4, 2, &mut rng);
        let choi = g.multiply(&g.adjoint()).unwrap();
        let kraus = kraus_from_choi(&choi, 2, 2, &tol()).unwrap();
        assert_eq!(kraus.len(), 2);
        let rebuilt = MatrixMap::from_kraus(2, 2, kraus).unwrap();
        assert!(rebuilt.choi().approx_eq(&choi, 1e-11));
    }

    #[test]
    fn kraus_u_form_round_trip() {
        let src = u1_ctx();
        let dst = u1_ctx();
        // identity contexts reduce to plain Kraus extraction
        let id_ctx = SSpaceContext::hilbert(2);
        let dep = MatrixMap::depolarizing(2, 2);
        let form = kraus_u_form(&dep, &id_ctx, &id_ctx, &tol()).unwrap();
        assert_eq!(form.kraus().len(), 4);
        assert!(form.induced_map().approx_eq(&dep, 1e-12));

        // transported depolarizing-type map: extraction then re-application
        let psi = correspondence_phi_to_psi(&dep, &src, &dst).unwrap();
        let form = kraus_u_form(&psi, &src, &dst, &tol()).unwrap();
        assert_eq!(form.kraus().len(), 4);
        assert!(form.induced_map().approx_eq(&psi, 1e-12));

        // round trip from a Kraus U-form: only map-level equality is promised
        let kraus = vec![
            ComplexMatrix::new(2, 2, vec![c(0.4, 0.2), c(0.0, 0.3), c(0.5, 0.0), c(0.1, -0.6)])
                .unwrap(),
            ComplexMatrix::new(2, 2, vec![c(0.2, 0.0), c(0.3, 0.1), c(0.0, 0.2), c(0.4, 0.0)])
                .unwrap(),
        ];
        let original = KrausUForm::new(src.clone(), dst.clone(), kraus).unwrap();
        let extracted = kraus_u_form(&original.induced_map(), &src, &dst, &tol()).unwrap();
        assert!(extracted.induced_map().approx_eq(&original.induced_map(), 1e-11));

        // a non-UCP map is rejected
        let bad = correspondence_phi_to_psi(&MatrixMap::transpose_map(2), &src, &dst).unwrap();
        assert!(matches!(kraus_u_form(&bad, &src, &dst, &tol()), Err(Error::NotUcp { .. })));
    }

    #[test]
    fn stinespring_examples() {
        // single Kraus R = I, U_A = U_B: dilation dim m, R = I
        let src = u1_ctx();
        let form =
            KrausUForm::new(src.clone(), src.clone(), vec![ComplexMatrix::identity(2)]).unwrap();
        let dil = stinespring_u_dilation(&form);
        assert_eq!(dil.dilation_dim, 2);
        assert!(dil.r.approx_eq(&ComplexMatrix::identity(2), 1e-15));
        let v = ComplexMatrix::new(2, 2, vec![c(1.0, 1.0), c(0.0, 2.0), c(0.5, 0.0), c(2.0, 0.0)])
            .unwrap();
        assert!(dil.reconstruct(&src, &v).unwrap().approx_eq(&form.apply_u(&v).unwrap(), 1e-13));

        // two-Kraus isometric form: R* R = I and reconstruction is exact
        let id_ctx = SSpaceContext::hilbert(2);
        let form = KrausUForm::new(
            id_ctx.clone(),
            id_ctx.clone(),
            vec![ComplexMatrix::matrix_unit(2, 2, 0, 0), ComplexMatrix::matrix_unit(2, 2, 1, 1)],
        )
        .unwrap();
        let dil = stinespring_u_dilation(&form);
        assert_eq!(dil.dilation_dim, 4);
        let rr = dil.r.adjoint().multiply(&dil.r).unwrap();
        assert!(rr.approx_eq(&ComplexMatrix::identity(2), 1e-14));
        for i in 0..2 {
            for j in 0..2 {
                let unit = ComplexMatrix::matrix_unit(2, 2, i, j);
                assert!(dil
                    .reconstruct(&id_ctx, &unit)
                    .unwrap()
                    .approx_eq(&form.apply_u(&unit).unwrap(), 1e-13));
            }
        }
    }

    #[test]
    fn stinespring_random_rectangular() {
        let mut rng = crate::sample::rng(3);
        let src = SSpaceContext::new(crate::sample::random_unitary(2, &mut rng), &tol()).unwrap();
        let dst = SSpaceContext::new(crate::sample::random_unitary(3, &mut rng), &tol()).unwrap();
        let kraus: Vec<_> = (0..3).map(|_| crate::sample::ginibre(2, 3, &mut rng)).collect();
        let form = KrausUForm::new(src, dst.clone(), kraus).unwrap();
        let dil = stinespring_u_dilation(&form);
        assert_eq!(dil.dilation_dim, 6);
        for i in 0..2 {
            for j in 0..2 {
                let unit = ComplexMatrix::matrix_unit(2, 2, i, j);
                let direct = form.apply_u(&unit).unwrap();
                let via_dilation = dil.reconstruct(&dst, &unit).unwrap();
                assert!(via_dilation.approx_eq(&direct, 1e-10));
            }
        }
    }

    #[test]
    fn intertwining_examples() {
        let src = u1_ctx();
        // identity map with U_1 = U_2 intertwines
        let check = check_intertwining(&MatrixMap::identity(2), &src, &src, &tol()).unwrap();
        assert!(check.intertwines);
        assert_eq!(check.cp, check.ucp);

        // phi(V) = W* V W for diagonal W commuting with diagonal U_1
        let w = ComplexMatrix::diagonal(&[c(0.0, 1.0), c(1.0, 0.0)]);
        let phi = MatrixMap::from_kraus(2, 2, vec![w]).unwrap();
        let check = check_intertwining(&phi, &src, &src, &tol()).unwrap();
        assert!(check.intertwines);
        assert!(check.cp && check.ucp);

        // transpose map fails the intertwining identities for U_1
        let check = check_intertwining(&MatrixMap::transpose_map(2), &src, &src, &tol()).unwrap();
        assert!(!check.intertwines);
    }

    #[test]
    fn co_positivity_examples() {
        // transpose map is completely co-positive, identity is not
        assert!(is_completely_co_positive(&MatrixMap::transpose_map(2), &tol()));
        assert!(!is_completely_co_positive(&MatrixMap::identity(2), &tol()));
        // depolarizing is CP and completely co-positive: a PPT map
        let dep = MatrixMap::depolarizing(2, 2);
        assert!(is_cp(&dep, &tol()) && is_completely_co_positive(&dep, &tol()));

        let src = u1_ctx();
        let dst = u1_ctx();
        let psi_dep = correspondence_phi_to_psi(&dep, &src, &dst).unwrap();
        assert!(is_u_ppt_map(&psi_dep, &src, &dst, &tol()).unwrap());
        let psi_id = correspondence_phi_to_psi(&MatrixMap::identity(2), &src, &dst).unwrap();
        assert!(!is_u_ppt_map(&psi_id, &src, &dst, &tol()).unwrap());
    }

    #[test]
    fn random_ppt_choi_gives_u_ppt_map() {
        let mut rng = crate::sample::rng(5);
        let src = u1_ctx();
        let dst = u1_ctx();
        // rejection-sample a PSD Choi with PSD partial transpose
        loop {
            let g = crate::sample::ginibre(4, 4, &mut rng);
            let choi = g.multiply(&g.adjoint()).unwrap();
            if is_psd(&partial_transpose(&choi, 2, 2).unwrap(), &tol()) {
                let phi = MatrixMap::from_choi(2, 2, choi).unwrap();
                let psi = correspondence_phi_to_psi(&phi, &src, &dst).unwrap();
                assert!(is_u_ppt_map(&psi, &src, &dst, &tol()).unwrap());
                break;
            }
        }
    }

    #[test]
    fn map_json_round_trip() {
        let dep = MatrixMap::depolarizing(2, 2);
        let json = serde_json::to_string(&dep).unwrap();
        let back: MatrixMap = serde_json::from_str(&json).unwrap();
        assert!(back.approx_eq(&dep, 0.0));
        assert!(json.contains("\"choi\""));

        let bad = r#"{"src_dim": 2, "dst_dim": 2}"#;
        assert!(serde_json::from_str::<MatrixMap>(bad).is_err());
    }
}
