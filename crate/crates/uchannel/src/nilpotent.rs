//! Nilpotency analysis of endomorphic U-CP maps: order detection on the full
//! map, the word criterion (every length-p product of Kraus operators
//! vanishes), the kernel filtration of `psi^k(U)` and its dimension sequence
//! `(c_1, ..., c_p)`, and the structural kernel/range identities that tie the
//! kernels of `psi(U)` to the Kraus operators.

use serde::Serialize;

use crate::cmatrix::{
    hermitian_eig, hstack, kernel_basis, projector_from_basis, range_basis, vstack, ComplexMatrix,
    Tolerance, C64,
};
use crate::sample;
use crate::umap::{KrausUForm, MatrixMap};
use crate::{Error, Result};

const WORD_COUNT_GUARD: f64 = 1e6;

/// Kernel filtration data of a nilpotent map: the order `p`, the dimension
/// sequence `(c_1, ..., c_p)` of `K_k = ker psi^k(U) (-) ker psi^{k-1}(U)`,
/// the cumulative kernel dimensions, and an orthonormal basis per `K_k`.
#[derive(Debug, Clone, Serialize)]
pub struct NilpotencyProfile {
    pub order: usize,
    #[serde(rename = "type")]
    pub type_sequence: Vec<usize>,
    pub kernel_dims: Vec<usize>,
    #[serde(skip)]
    pub filtration: Vec<Vec<Vec<C64>>>,
}

fn require_endomorphic(form: &KrausUForm, tol: &Tolerance) -> Result<()> {
    if !form.is_endomorphic(tol.equality_eps) {
        return Err(Error::DimensionMismatch(
            "form must be endomorphic (matching source and target contexts)".into(),
        ));
    }
    Ok(())
}

/// Frobenius growth scale of one application of the form; powers of it
/// absorb the k-fold product growth in vanishing thresholds.
fn growth_scale(form: &KrausUForm) -> f64 {
    1f64.max(form.kraus().iter().map(|r| r.frobenius_norm().powi(2)).sum())
}

/// `psi^k(U)` by repeated application; `psi^0(U) = U` by convention.
pub fn iterate_on_u(form: &KrausUForm, k: usize, tol: &Tolerance) -> Result<ComplexMatrix> {
    require_endomorphic(form, tol)?;
    let mut x = form.src().u().clone();
    for _ in 0..k {
        x = form.apply_u(&x)?;
    }
    Ok(x)
}

/// Smallest `p <= p_max` with `psi^p = 0` on all matrix units while
/// `psi^{p-1}` does not vanish; `None` when no such order exists in range.
pub fn nilpotent_order(form: &KrausUForm, p_max: usize, tol: &Tolerance) -> Result<Option<usize>> {
    require_endomorphic(form, tol)?;
    let psi = form.induced_map();
    let scale = growth_scale(form);
    let mut power = psi.clone();
    let mut previous_vanished = false; // psi^0 is the identity
    for p in 1..=p_max {
        let vanished = map_vanishes(&power, p, scale, tol);
        if vanished && !previous_vanished {
            return Ok(Some(p));
        }
        previous_vanished = vanished;
        if p < p_max {
            power = psi.compose(&power)?;
        }
    }
    Ok(None)
}

fn map_vanishes(power: &MatrixMap, p: usize, scale: f64, tol: &Tolerance) -> bool {
    let threshold =
        tol.equality_eps * (power.src_dim() as f64) * scale.powi(p as i32).max(1.0);
    power.choi().frobenius_norm() <= threshold
}

/// True iff every length-`p` word `R_{i_1} R_{i_2} ... R_{i_p}` in the Kraus
/// operators vanishes. Depth-first with prefix products; guards against more
/// than 10^6 words.
pub fn nilpotency_by_words(form: &KrausUForm, p: usize, tol: &Tolerance) -> Result<bool> {
    require_endomorphic(form, tol)?;
    if p == 0 {
        return Err(Error::InvalidInput("word length must be positive".into()));
    }
    let l = form.kraus().len();
    if l == 0 {
        return Ok(true);
    }
    if (l as f64).powi(p as i32) > WORD_COUNT_GUARD {
        return Err(Error::CostGuard(format!(
            "{l}^{p} words exceed the {WORD_COUNT_GUARD:.0} enumeration guard"
        )));
    }
    let max_norm = form.kraus().iter().map(|r| r.frobenius_norm()).fold(0.0f64, f64::max);
    let threshold = tol.equality_eps * 1f64.max(max_norm.powi(p as i32));
    let dim = form.src().dim();
    let start = ComplexMatrix::identity(dim);
    words_vanish(form.kraus(), &start, p, threshold)
}

fn words_vanish(
    kraus: &[ComplexMatrix],
    prefix: &ComplexMatrix,
    remaining: usize,
    threshold: f64,
) -> Result<bool> {
    if prefix.frobenius_norm() <= 1e-300 {
        return Ok(true);
    }
    if remaining == 0 {
        return Ok(prefix.frobenius_norm() <= threshold);
    }
    for r in kraus {
        if !words_vanish(kraus, &prefix.multiply(r)?, remaining - 1, threshold)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Kernel filtration of `psi^k(U)` for a map that is nilpotent within
/// `p_max`: kernels by singular-value thresholding, `c_k` as consecutive
/// dimension increments, and the `K_k` slices as orthonormal bases.
pub fn nilpotent_profile(
    form: &KrausUForm,
    p_max: usize,
    tol: &Tolerance,
) -> Result<NilpotencyProfile> {
    let order = nilpotent_order(form, p_max, tol)?.ok_or(Error::NotNilpotent { p_max })?;
    let dim = form.src().dim();
    let mut kernel_dims = Vec::with_capacity(order);
    let mut type_sequence = Vec::with_capacity(order);
    let mut filtration = Vec::with_capacity(order);
    let mut previous_projector = ComplexMatrix::zeros(dim, dim);
    let mut previous_dim = 0usize;
    let mut power = form.src().u().clone();
    for _k in 1..=order {
        power = form.apply_u(&power)?;
        let basis = kernel_basis(&power, tol.equality_eps);
        let projector = projector_from_basis(dim, &basis);
        kernel_dims.push(basis.len());
        type_sequence.push(basis.len().saturating_sub(previous_dim));
        // K_k basis: eigenvectors of P_k - P_{k-1} with eigenvalue ~ 1
        let diff = projector.sub(&previous_projector)?;
        let eig = hermitian_eig(&diff, tol)?;
        let mut slice = Vec::new();
        for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda > 0.5 {
                slice.push(eig.eigenvectors.column(idx));
            }
        }
        if slice.len() != basis.len() - previous_dim {
            return Err(Error::InvalidInput(format!(
                "kernel filtration slice has dimension {} but expected {}",
                slice.len(),
                basis.len() - previous_dim
            )));
        }
        filtration.push(slice);
        previous_projector = projector;
        previous_dim = basis.len();
    }
    if previous_dim != dim {
        return Err(Error::NotNilpotent { p_max });
    }
    Ok(NilpotencyProfile { order, type_sequence, kernel_dims, filtration })
}

/// Outcome of the four kernel/range identities relating `psi(U)` to the
/// Kraus operators, each decided by projector comparison (or membership
/// residuals) at `10 * equality_eps`.
#[derive(Debug, Clone, Serialize)]
pub struct KernelIdentitiesReport {
    /// `ker psi(U) = cap_i ker(U R_i)`
    pub kernel_identity: bool,
    /// for U-positive X: `psi(X) = 0  <=>  ran X ⊆ cap_i ker(R_i* U*)`
    pub vanishing_equivalence: bool,
    /// `{h : psi(|Uh><h|) = 0} = cap_i ker(R_i* U*)`
    pub pure_state_kernel: bool,
    /// `ran psi(U) = span{U R_i* h}`
    pub range_identity: bool,
    pub max_projector_deviation: f64,
}

impl KernelIdentitiesReport {
    pub fn all_hold(&self) -> bool {
        self.kernel_identity
            && self.vanishing_equivalence
            && self.pure_state_kernel
            && self.range_identity
    }
}

/// Check the four kernel/range identities on a form; the U-positive test
/// matrix for the vanishing equivalence is drawn from `seed`.
pub fn kernel_identities_check(
    form: &KrausUForm,
    tol: &Tolerance,
    seed: u64,
) -> Result<KernelIdentitiesReport> {
    require_endomorphic(form, tol)?;
    let dim = form.src().dim();
    let u = form.src().u();
    let threshold = 10.0 * tol.equality_eps;
    let psi_u = iterate_on_u(form, 1, tol)?;
    let mut max_dev: f64 = 0.0;

    // (1) ker psi(U) = cap ker(U R_i), both as projectors
    let lhs1 = projector_from_basis(dim, &kernel_basis(&psi_u, tol.equality_eps));
    let stacked: Vec<ComplexMatrix> = if form.kraus().is_empty() {
        vec![ComplexMatrix::zeros(dim, dim)]
    } else {
        form.kraus().iter().map(|r| u.multiply(r).expect("dims agree")).collect()
    };
    let rhs1 = projector_from_basis(dim, &kernel_basis(&vstack(&stacked)?, tol.equality_eps));
    let dev1 = lhs1.sub(&rhs1)?.frobenius_norm();
    max_dev = max_dev.max(dev1);
    let kernel_identity = dev1 <= threshold;

    // joint kernel cap_i ker(R_i* U*), used by identities (2) and (3)
    let ru_stack: Vec<ComplexMatrix> = if form.kraus().is_empty() {
        vec![ComplexMatrix::zeros(dim, dim)]
    } else {
        form.kraus()
            .iter()
            .map(|r| r.adjoint().multiply(&u.adjoint()).expect("dims agree"))
            .collect()
    };
    let joint = kernel_basis(&vstack(&ru_stack)?, tol.equality_eps);
    let joint_projector = projector_from_basis(dim, &joint);

    // (2) equivalence on a generic U-positive X and on a kernel-aligned one
    let mut rng = sample::rng(seed);
    let mut vanishing_equivalence = true;
    let mut test_cases = vec![u
        .multiply(&sample::random_psd(dim, dim, &mut rng))
        .expect("dims agree")];
    if !joint.is_empty() {
        // X = Q Q* U has range inside the joint kernel and U* X = U* Q Q* U >= 0
        test_cases.push(joint_projector.multiply(u).expect("dims agree"));
    }
    for x in &test_cases {
        let image_zero = form.apply_u(x)?.frobenius_norm()
            <= threshold * 1f64.max(x.frobenius_norm()) * growth_scale(form);
        let range_inside = ru_stack
            .iter()
            .map(|m| m.multiply(x).expect("dims agree").frobenius_norm())
            .fold(0.0f64, f64::max)
            <= threshold * 1f64.max(x.frobenius_norm());
        if image_zero != range_inside {
            vanishing_equivalence = false;
        }
    }

    // (3) pure-state kernel set vs joint kernel, basis membership both ways
    let mut pure_state_kernel = true;
    for q in &joint {
        let uq = u.mul_vec(q)?;
        let rho = crate::cmatrix::outer(&uq, q);
        let residual = form.apply_u(&rho)?.frobenius_norm();
        max_dev = max_dev.max(residual);
        if residual > threshold * growth_scale(form) {
            pure_state_kernel = false;
        }
    }
    // the defining equation psi(|Uh><h|) = 0 reduces to R_i* h = 0 for all i;
    // solve it directly and compare against the joint kernel
    let r_stack: Vec<ComplexMatrix> = if form.kraus().is_empty() {
        vec![ComplexMatrix::zeros(dim, dim)]
    } else {
        form.kraus().iter().map(|r| r.adjoint()).collect()
    };
    let solution_side = kernel_basis(&vstack(&r_stack)?, tol.equality_eps);
    if solution_side.len() != joint.len() {
        pure_state_kernel = false;
    } else {
        for b in &solution_side {
            let pb = joint_projector.mul_vec(b)?;
            let residual: f64 = b
                .iter()
                .zip(&pb)
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            max_dev = max_dev.max(residual);
            if residual > threshold {
                pure_state_kernel = false;
            }
        }
    }

    // (4) ran psi(U) = span{U R_i* h}
    let lhs4 = projector_from_basis(dim, &range_basis(&psi_u, tol.equality_eps));
    let spans: Vec<ComplexMatrix> = if form.kraus().is_empty() {
        vec![ComplexMatrix::zeros(dim, dim)]
    } else {
        form.kraus()
            .iter()
            .map(|r| u.multiply(&r.adjoint()).expect("dims agree"))
            .collect()
    };
    let rhs4 = projector_from_basis(dim, &range_basis(&hstack(&spans)?, tol.equality_eps));
    let dev4 = lhs4.sub(&rhs4)?.frobenius_norm();
    max_dev = max_dev.max(dev4);
    let range_identity = dev4 <= threshold;

    Ok(KernelIdentitiesReport {
        kernel_identity,
        vanishing_equivalence,
        pure_state_kernel,
        range_identity,
        max_projector_deviation: max_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sspace::SSpaceContext;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn id_form(kraus: Vec<ComplexMatrix>, dim: usize) -> KrausUForm {
        let ctx = SSpaceContext::hilbert(dim);
        KrausUForm::new(ctx.clone(), ctx, kraus).unwrap()
    }

    fn u1_form(kraus: Vec<ComplexMatrix>) -> KrausUForm {
        let u = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let ctx = SSpaceContext::new(u, &tol()).unwrap();
        KrausUForm::new(ctx.clone(), ctx, kraus).unwrap()
    }

    fn shift_form() -> KrausUForm {
        // strict upper shift on M_3: R = e12 + e23
        let r = ComplexMatrix::from_real_rows(&[
            &[0.0, 1.0, 0.0],
            &[0.0, 0.0, 1.0],
            &[0.0, 0.0, 0.0],
        ])
        .unwrap();
        id_form(vec![r], 3)
    }

    #[test]
    fn iterate_examples() {
        // single Kraus R = I, U = I: psi(I) = I
        let form = id_form(vec![ComplexMatrix::identity(2)], 2);
        assert!(iterate_on_u(&form, 1, &tol())
            .unwrap()
            .approx_eq(&ComplexMatrix::identity(2), 1e-14));

        // R = e12, U = I: psi(I) = e22, psi^2(I) = 0
        let form = id_form(vec![ComplexMatrix::matrix_unit(2, 2, 0, 1)], 2);
        let once = iterate_on_u(&form, 1, &tol()).unwrap();
        assert!(once.approx_eq(&ComplexMatrix::matrix_unit(2, 2, 1, 1), 1e-14));
        let twice = iterate_on_u(&form, 2, &tol()).unwrap();
        assert!(twice.frobenius_norm() < 1e-14);

        // k = 0 returns U itself
        let form = u1_form(vec![ComplexMatrix::identity(2)]);
        assert!(iterate_on_u(&form, 0, &tol()).unwrap().approx_eq(form.src().u(), 0.0));

        // non-endomorphic forms are rejected
        let src = SSpaceContext::hilbert(2);
        let dst = SSpaceContext::new(
            ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]),
            &tol(),
        )
        .unwrap();
        let bad = KrausUForm::new(src, dst, vec![ComplexMatrix::identity(2)]).unwrap();
        assert!(iterate_on_u(&bad, 1, &tol()).is_err());
    }

    #[test]
    fn order_examples() {
        let form = id_form(vec![ComplexMatrix::matrix_unit(2, 2, 0, 1)], 2);
        assert_eq!(nilpotent_order(&form, 6, &tol()).unwrap(), Some(2));

        let identity = id_form(vec![ComplexMatrix::identity(2)], 2);
        assert_eq!(nilpotent_order(&identity, 8, &tol()).unwrap(), None);

        assert_eq!(nilpotent_order(&shift_form(), 6, &tol()).unwrap(), Some(3));

        // the zero map is nilpotent of order 1
        let zero = id_form(vec![ComplexMatrix::zeros(2, 2)], 2);
        assert_eq!(nilpotent_order(&zero, 4, &tol()).unwrap(), Some(1));
    }

    #[test]
    fn word_examples() {
        let form = id_form(vec![ComplexMatrix::matrix_unit(2, 2, 0, 1)], 2);
        assert!(nilpotency_by_words(&form, 2, &tol()).unwrap());

        let mixed = id_form(
            vec![ComplexMatrix::matrix_unit(2, 2, 0, 1), ComplexMatrix::matrix_unit(2, 2, 0, 0)],
            2,
        );
        // the word e11 e11 = e11 does not vanish
        assert!(!nilpotency_by_words(&mixed, 2, &tol()).unwrap());

        assert!(nilpotency_by_words(&shift_form(), 3, &tol()).unwrap());
        assert!(!nilpotency_by_words(&shift_form(), 2, &tol()).unwrap());
    }

    #[test]
    fn word_guard() {
        let kraus: Vec<ComplexMatrix> =
            (0..10).map(|_| ComplexMatrix::zeros(2, 2)).collect();
        let form = id_form(kraus, 2);
        assert!(matches!(
            nilpotency_by_words(&form, 7, &tol()),
            Err(Error::CostGuard(_))
        ));
    }

    #[test]
    fn order_agrees_with_words_on_corpus() {
        let forms = vec![
            id_form(vec![ComplexMatrix::matrix_unit(2, 2, 0, 1)], 2),
            shift_form(),
            u1_form(vec![ComplexMatrix::matrix_unit(2, 2, 0, 1)]),
            id_form(vec![ComplexMatrix::zeros(2, 2)], 2),
        ];
        for form in &forms {
            if let Some(p) = nilpotent_order(form, 8, &tol()).unwrap() {
                assert!(nilpotency_by_words(form, p, &tol()).unwrap());
                if p > 1 {
                    assert!(!nilpotency_by_words(form, p - 1, &tol()).unwrap());
                }
            }
        }
    }

    #[test]
    fn profile_examples() {
        // R = e12, U = I: psi(I) = e22, kernel span{e1}, type (1, 1)
        let form = id_form(vec![ComplexMatrix::matrix_unit(2, 2, 0, 1)], 2);
        let profile = nilpotent_profile(&form, 6, &tol()).unwrap();
        assert_eq!(profile.order, 2);
        assert_eq!(profile.type_sequence, vec![1, 1]);
        assert_eq!(profile.kernel_dims, vec![1, 2]);
        // K_1 = span{e1}
        let k1 = &profile.filtration[0];
        assert_eq!(k1.len(), 1);
        assert!((k1[0][0].norm() - 1.0).abs() < 1e-10);
        assert!(k1[0][1].norm() < 1e-10);

        let profile = nilpotent_profile(&shift_form(), 6, &tol()).unwrap();
        assert_eq!(profile.order, 3);
        assert_eq!(profile.type_sequence, vec![1, 1, 1]);

        // zero map: order 1, everything in the first kernel
        let zero = id_form(vec![ComplexMatrix::zeros(3, 3)], 3);
        let profile = nilpotent_profile(&zero, 4, &tol()).unwrap();
        assert_eq!(profile.order, 1);
        assert_eq!(profile.type_sequence, vec![3]);

        // non-nilpotent maps are rejected
        let identity = id_form(vec![ComplexMatrix::identity(2)], 2);
        assert!(matches!(
            nilpotent_profile(&identity, 5, &tol()),
            Err(Error::NotNilpotent { .. })
        ));
    }

    #[test]
    fn filtration_is_increasing_and_complete() {
        let profile = nilpotent_profile(&shift_form(), 6, &tol()).unwrap();
        let mut prev = 0;
        for &d in &profile.kernel_dims {
            assert!(d >= prev);
            prev = d;
        }
        assert_eq!(profile.type_sequence.iter().sum::<usize>(), 3);
    }

    #[test]
    fn profile_json_shape() {
        let form = id_form(vec![ComplexMatrix::matrix_unit(2, 2, 0, 1)], 2);
        let profile = nilpotent_profile(&form, 6, &tol()).unwrap();
        let json = serde_json::to_value(&profile).unwrap();
        assert_eq!(json["order"], 2);
        assert_eq!(json["type"].as_array().unwrap().len(), 2);
        assert_eq!(json["kernel_dims"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn kernel_identities_trivial_and_shift() {
        // single Kraus R = I, U = I: all kernels trivial, all four hold
        let form = id_form(vec![ComplexMatrix::identity(2)], 2);
        let report = kernel_identities_check(&form, &tol(), 17).unwrap();
        assert!(report.all_hold(), "{report:?}");

        // R = e12 with U = U_1: nontrivial kernels on both sides match
        let form = u1_form(vec![ComplexMatrix::matrix_unit(2, 2, 0, 1)]);
        let report = kernel_identities_check(&form, &tol(), 17).unwrap();
        assert!(report.all_hold(), "{report:?}");
    }

    #[test]
    fn kernel_identities_random_forms() {
        let mut rng = sample::rng(23);
        let u3 = ComplexMatrix::from_real_rows(&[
            &[1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0],
            &[1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt(), 0.0],
            &[0.0, 0.0, 1.0],
        ])
        .unwrap();
        let ctx = SSpaceContext::new(u3, &tol()).unwrap();
        for trial in 0..5 {
            let kraus: Vec<ComplexMatrix> =
                (0..2).map(|_| sample::ginibre(3, 3, &mut rng)).collect();
            let form = KrausUForm::new(ctx.clone(), ctx.clone(), kraus).unwrap();
            let report = kernel_identities_check(&form, &tol(), trial).unwrap();
            assert!(report.all_hold(), "trial {trial}: {report:?}");
        }
    }
}
