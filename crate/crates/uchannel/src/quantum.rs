//! Quantum U-states and U-channels, the U-PPT separability criterion,
//! separable-state construction with certificates, Holevo forms, and
//! U-entanglement-breaking detection.
//!
//! A quantum U-state is `rho` with `U* rho` PSD of unit trace. A Kraus U-form
//! is a quantum U-channel when it is U-CP and its Kraus operators satisfy
//! `sum_i R_i R_i* = I`, the condition that preserves the U-weighted trace
//! and sends U_A-states to U_B-states. Separability checks transport the
//! state to the ordinary picture via `(U_A (x) U_B)*`, where PPT and CCNR
//! apply; PPT is decisive below product dimension 7.

use serde::{Deserialize, Serialize};

use crate::cmatrix::{
    hermitian_eig, outer, partial_transpose, psd_check, realignment_trace_norm, vec_norm,
    ComplexMatrix, PsdCheck, Tolerance, C64,
};
use crate::sspace::SSpaceContext;
use crate::umap::{correspondence_psi_to_phi, is_u_ppt_map, is_ucp, KrausUForm};
use crate::{Error, Result};

/// Largest product dimension at which PPT certifies separability.
const PPT_DECISIVE_DIM: usize = 6;

// --- states ---------------------------------------------------------------

/// A validated quantum U-state: `U* rho` is PSD and `Tr(U* rho) = 1`.
#[derive(Debug, Clone)]
pub struct QuantumUState {
    ctx: SSpaceContext,
    rho: ComplexMatrix,
}

impl QuantumUState {
    pub fn ctx(&self) -> &SSpaceContext {
        &self.ctx
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }
}

/// Validate `rho` as a quantum U-state over `ctx`.
pub fn make_u_state(
    ctx: &SSpaceContext,
    rho: ComplexMatrix,
    tol: &Tolerance,
) -> Result<QuantumUState> {
    let check = ctx.u_positive_check(&rho, tol)?;
    if !check.psd {
        return Err(Error::NotUPositive {
            reason: format!(
                "U* rho has min eigenvalue {:.3e} (hermitian deviation {:.3e})",
                check.eigenvalues.last().copied().unwrap_or(0.0),
                check.hermitian_deviation
            ),
        });
    }
    let trace = ctx.u_adjoint_matrix().multiply(&rho)?.trace()?;
    let deviation = (trace - C64::new(1.0, 0.0)).norm();
    if deviation > tol.equality_eps {
        return Err(Error::TraceNotOne { deviation });
    }
    Ok(QuantumUState { ctx: ctx.clone(), rho })
}

/// Separability certificate: the convex decomposition data of
/// `rho = sum_i p_i (U_A |x_i><x_i|) (x) (U_B |y_i><y_i|)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparableDecomposition {
    pub weights: Vec<f64>,
    #[serde(with = "cvec_list")]
    pub factors_a: Vec<Vec<C64>>,
    #[serde(with = "cvec_list")]
    pub factors_b: Vec<Vec<C64>>,
}

/// A validated bipartite quantum state over the product context
/// `U_A (x) U_B`, optionally carrying a separable-decomposition certificate.
#[derive(Debug, Clone)]
pub struct BipartiteUState {
    ctx_a: SSpaceContext,
    ctx_b: SSpaceContext,
    rho: ComplexMatrix,
    certificate: Option<SeparableDecomposition>,
}

impl BipartiteUState {
    pub fn new(
        ctx_a: &SSpaceContext,
        ctx_b: &SSpaceContext,
        rho: ComplexMatrix,
        certificate: Option<SeparableDecomposition>,
        tol: &Tolerance,
    ) -> Result<Self> {
        let product = product_context(ctx_a, ctx_b, tol)?;
        make_u_state(&product, rho.clone(), tol)?;
        Ok(BipartiteUState {
            ctx_a: ctx_a.clone(),
            ctx_b: ctx_b.clone(),
            rho,
            certificate,
        })
    }

    pub fn ctx_a(&self) -> &SSpaceContext {
        &self.ctx_a
    }

    pub fn ctx_b(&self) -> &SSpaceContext {
        &self.ctx_b
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn certificate(&self) -> Option<&SeparableDecomposition> {
        self.certificate.as_ref()
    }
}

/// The product S-space context with fundamental unitary `U_A (x) U_B`.
pub fn product_context(
    ctx_a: &SSpaceContext,
    ctx_b: &SSpaceContext,
    tol: &Tolerance,
) -> Result<SSpaceContext> {
    SSpaceContext::new(ctx_a.u().tensor(ctx_b.u()), tol)
}

// --- channels ----------------------------------------------------------------

/// `sum_i R_i R_i* = I`, which preserves the U-weighted trace
/// `Tr(U_A* V) = Tr(U_B* psi(V))`.
pub fn is_u_trace_preserving(form: &KrausUForm, tol: &Tolerance) -> bool {
    let m = form.src().dim();
    let mut sum = ComplexMatrix::zeros(m, m);
    for r in form.kraus() {
        match r.multiply(&r.adjoint()) {
            Ok(p) => sum = sum.add(&p).expect("square sums agree"),
            Err(_) => return false,
        }
    }
    sum.approx_eq(&ComplexMatrix::identity(m), tol.equality_eps)
}

/// Ordinary (unweighted) trace preservation, exposed as a diagnostic; the
/// channel axiom used everywhere else is the U-weighted one.
pub fn is_plain_trace_preserving(form: &KrausUForm, tol: &Tolerance) -> Result<bool> {
    let m = form.src().dim();
    for i in 0..m {
        for j in 0..m {
            let unit = ComplexMatrix::matrix_unit(m, m, i, j);
            let diff = form.apply_u(&unit)?.trace()? - unit.trace()?;
            if diff.norm() > 10.0 * tol.equality_eps {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Quantum (U_A, U_B)-channel: (U_A, U_B)-CP and U-trace preserving.
pub fn is_quantum_u_channel(form: &KrausUForm, tol: &Tolerance) -> Result<bool> {
    Ok(is_u_trace_preserving(form, tol)
        && is_ucp(&form.induced_map(), form.src(), form.dst(), tol)?)
}

/// Send a U_A-state through a quantum U-channel; the output is validated as
/// a U_B-state, and a validation failure signals a broken precondition.
pub fn channel_apply(
    form: &KrausUForm,
    state: &QuantumUState,
    tol: &Tolerance,
) -> Result<QuantumUState> {
    if !state.ctx().approx_eq(form.src(), 10.0 * tol.equality_eps) {
        return Err(Error::DimensionMismatch(
            "state context does not match the channel source".into(),
        ));
    }
    if !is_quantum_u_channel(form, tol)? {
        return Err(Error::NotAChannel(
            "form is not U-CP and U-trace preserving".into(),
        ));
    }
    make_u_state(form.dst(), form.apply_u(state.rho())?, tol)
}

// --- separable states and the U-PPT criterion ---------------------------------

/// Assemble `rho = sum_i p_i (U_A |x_i><x_i|) (x) (U_B |y_i><y_i|)` from unit
/// vectors and a probability vector; the output carries its decomposition as
/// a separability certificate.
pub fn make_u_separable(
    ctx_a: &SSpaceContext,
    ctx_b: &SSpaceContext,
    weights: &[f64],
    factors_a: &[Vec<C64>],
    factors_b: &[Vec<C64>],
    tol: &Tolerance,
) -> Result<BipartiteUState> {
    validate_decomposition(ctx_a, ctx_b, weights, factors_a, factors_b, tol)?;
    let rho = assemble_separable(ctx_a, ctx_b, weights, factors_a, factors_b)?;
    let certificate = SeparableDecomposition {
        weights: weights.to_vec(),
        factors_a: factors_a.to_vec(),
        factors_b: factors_b.to_vec(),
    };
    BipartiteUState::new(ctx_a, ctx_b, rho, Some(certificate), tol)
}

fn validate_decomposition(
    ctx_a: &SSpaceContext,
    ctx_b: &SSpaceContext,
    weights: &[f64],
    factors_a: &[Vec<C64>],
    factors_b: &[Vec<C64>],
    tol: &Tolerance,
) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidWeights("empty decomposition".into()));
    }
    if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
        return Err(Error::InvalidWeights("weights must be nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 10.0 * tol.equality_eps {
        return Err(Error::InvalidWeights(format!("weights sum to {total}, expected 1")));
    }
    if factors_a.len() != weights.len() || factors_b.len() != weights.len() {
        return Err(Error::DimensionMismatch(
            "weights and factor lists must have the same length".into(),
        ));
    }
    for (x, y) in factors_a.iter().zip(factors_b) {
        if x.len() != ctx_a.dim() || y.len() != ctx_b.dim() {
            return Err(Error::DimensionMismatch("factor vector has wrong dimension".into()));
        }
        if (vec_norm(x) - 1.0).abs() > 10.0 * tol.equality_eps
            || (vec_norm(y) - 1.0).abs() > 10.0 * tol.equality_eps
        {
            return Err(Error::InvalidInput("factor vectors must be unit vectors".into()));
        }
    }
    Ok(())
}

fn assemble_separable(
    ctx_a: &SSpaceContext,
    ctx_b: &SSpaceContext,
    weights: &[f64],
    factors_a: &[Vec<C64>],
    factors_b: &[Vec<C64>],
) -> Result<ComplexMatrix> {
    let dim = ctx_a.dim() * ctx_b.dim();
    let mut rho = ComplexMatrix::zeros(dim, dim);
    for ((&p, x), y) in weights.iter().zip(factors_a).zip(factors_b) {
        let part_a = ctx_a.u().multiply(&outer(x, x))?;
        let part_b = ctx_b.u().multiply(&outer(y, y))?;
        rho = rho.add(&part_a.tensor(&part_b).scale(C64::new(p, 0.0)))?;
    }
    Ok(rho)
}

/// PSD diagnostics of `(conj(U_A) (x) U_B*) rho^tau`, whose positivity is the
/// U-PPT property.
pub fn u_ppt_check(state: &BipartiteUState, tol: &Tolerance) -> Result<PsdCheck> {
    let twist = state.ctx_a.u().conjugate().tensor(&state.ctx_b.u_adjoint_matrix());
    let tau = partial_transpose(state.rho(), state.ctx_a.dim(), state.ctx_b.dim())?;
    psd_check(&twist.multiply(&tau)?, tol)
}

pub fn is_u_ppt_state(state: &BipartiteUState, tol: &Tolerance) -> Result<bool> {
    Ok(u_ppt_check(state, tol)?.psd)
}

/// CCNR value of the transported ordinary state `(U_A (x) U_B)* rho`;
/// values above 1 witness entanglement.
pub fn ccnr_value(state: &BipartiteUState, tol: &Tolerance) -> Result<f64> {
    let product = product_context(&state.ctx_a, &state.ctx_b, tol)?;
    let sigma = product.u_adjoint_matrix().multiply(state.rho())?;
    realignment_trace_norm(&sigma, state.ctx_a.dim(), state.ctx_b.dim())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntanglementReason {
    Ppt,
    Ccnr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeparabilityVerdict {
    SeparableCertified,
    EntangledCertified(EntanglementReason),
    Undetermined,
}

/// Verdict plus the evidence that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct SeparabilityReport {
    pub verdict: SeparabilityVerdict,
    pub ppt: PsdCheck,
    pub ccnr: f64,
    pub dimension_rule_applied: bool,
    pub certificate_checked: Option<bool>,
}

/// Decide separability of a bipartite U-state.
///
/// A valid attached certificate certifies separability; a U-PPT failure or a
/// CCNR value above `1 + 10 eps` certifies entanglement; at product dimension
/// at most 6 a passing U-PPT is decisive; otherwise the verdict is honest
/// `Undetermined`.
pub fn separability_verdict(state: &BipartiteUState, tol: &Tolerance) -> Result<SeparabilityReport> {
    let ppt = u_ppt_check(state, tol)?;
    let ccnr = ccnr_value(state, tol)?;
    let mut certificate_checked = None;
    if let Some(cert) = state.certificate() {
        let valid = revalidate_certificate(state, cert, tol).is_ok();
        certificate_checked = Some(valid);
        if valid {
            return Ok(SeparabilityReport {
                verdict: SeparabilityVerdict::SeparableCertified,
                ppt,
                ccnr,
                dimension_rule_applied: false,
                certificate_checked,
            });
        }
    }
    if !ppt.psd {
        return Ok(SeparabilityReport {
            verdict: SeparabilityVerdict::EntangledCertified(EntanglementReason::Ppt),
            ppt,
            ccnr,
            dimension_rule_applied: false,
            certificate_checked,
        });
    }
    if ccnr > 1.0 + 10.0 * tol.equality_eps {
        return Ok(SeparabilityReport {
            verdict: SeparabilityVerdict::EntangledCertified(EntanglementReason::Ccnr),
            ppt,
            ccnr,
            dimension_rule_applied: false,
            certificate_checked,
        });
    }
    if state.ctx_a.dim() * state.ctx_b.dim() <= PPT_DECISIVE_DIM {
        return Ok(SeparabilityReport {
            verdict: SeparabilityVerdict::SeparableCertified,
            ppt,
            ccnr,
            dimension_rule_applied: true,
            certificate_checked,
        });
    }
    Ok(SeparabilityReport {
        verdict: SeparabilityVerdict::Undetermined,
        ppt,
        ccnr,
        dimension_rule_applied: false,
        certificate_checked,
    })
}

fn revalidate_certificate(
    state: &BipartiteUState,
    cert: &SeparableDecomposition,
    tol: &Tolerance,
) -> Result<()> {
    validate_decomposition(
        &state.ctx_a,
        &state.ctx_b,
        &cert.weights,
        &cert.factors_a,
        &cert.factors_b,
        tol,
    )?;
    let rebuilt = assemble_separable(
        &state.ctx_a,
        &state.ctx_b,
        &cert.weights,
        &cert.factors_a,
        &cert.factors_b,
    )?;
    if !rebuilt.approx_eq(state.rho(), 10.0 * tol.equality_eps) {
        return Err(Error::InvalidInput("certificate does not reassemble the state".into()));
    }
    Ok(())
}

// --- Holevo forms and entanglement breaking --------------------------------------

/// Measure-and-prepare description `psi(rho) = sum_k D_k Tr(F_k rho)` with
/// U_B-densities `D_k` and a U_A-POVM `{F_k}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolevoForm {
    pub src: SSpaceContext,
    pub dst: SSpaceContext,
    pub terms: Vec<(ComplexMatrix, ComplexMatrix)>,
}

/// `sum_k D_k Tr(F_k rho)`.
pub fn holevo_apply(form: &HolevoForm, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !rho.is_square() || rho.rows() != form.src.dim() {
        return Err(Error::DimensionMismatch(format!(
            "input must be {0}x{0}, got {1}x{2}",
            form.src.dim(),
            rho.rows(),
            rho.cols()
        )));
    }
    let n = form.dst.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for (d, f) in &form.terms {
        let weight = f.multiply(rho)?.trace()?;
        out = out.add(&d.scale(weight))?;
    }
    Ok(out)
}

/// Diagnostics of the two Holevo-form invariants.
#[derive(Debug, Clone, Serialize)]
pub struct HolevoCheck {
    pub valid: bool,
    pub povm_sum_deviation: f64,
    pub issues: Vec<String>,
}

/// Check that each `U_B* D_k` is PSD of unit trace, each `F_k U_A` is PSD,
/// and `sum_k F_k U_A = I`.
pub fn validate_holevo(form: &HolevoForm, tol: &Tolerance) -> Result<HolevoCheck> {
    let mut issues = Vec::new();
    let m = form.src.dim();
    let n = form.dst.dim();
    if form.terms.is_empty() {
        issues.push("no terms".into());
    }
    let mut povm_sum = ComplexMatrix::zeros(m, m);
    for (k, (d, f)) in form.terms.iter().enumerate() {
        if !d.is_square() || d.rows() != n || !f.is_square() || f.rows() != m {
            issues.push(format!("term {k} has mismatched shapes"));
            continue;
        }
        let density = form.dst.u_adjoint_matrix().multiply(d)?;
        let density_check = psd_check(&density, tol)?;
        if !density_check.psd {
            issues.push(format!("term {k}: U_B* D is not PSD"));
        }
        let trace_dev = (density.trace()? - C64::new(1.0, 0.0)).norm();
        if trace_dev > 10.0 * tol.equality_eps {
            issues.push(format!("term {k}: Tr(U_B* D) deviates from 1 by {trace_dev:.3e}"));
        }
        let effect = f.multiply(form.src.u())?;
        if !psd_check(&effect, tol)?.psd {
            issues.push(format!("term {k}: F U_A is not PSD"));
        }
        povm_sum = povm_sum.add(&effect)?;
    }
    let povm_sum_deviation =
        povm_sum.sub(&ComplexMatrix::identity(m))?.frobenius_norm();
    if povm_sum_deviation > 10.0 * tol.equality_eps {
        issues.push(format!("POVM sums to deviation {povm_sum_deviation:.3e} from identity"));
    }
    Ok(HolevoCheck { valid: issues.is_empty(), povm_sum_deviation, issues })
}

/// Convert a valid Holevo form into a Kraus U-form realizing the same map:
/// factor each `U_B* D_k` and `F_k U_A` by eigendecomposition and emit one
/// Kraus operator `sqrt(d_a f_b) |v_b><u_a|` per eigenpair product.
pub fn holevo_to_kraus_u(form: &HolevoForm, tol: &Tolerance) -> Result<KrausUForm> {
    let check = validate_holevo(form, tol)?;
    if !check.valid {
        return Err(Error::InvalidHolevoForm(check.issues.join("; ")));
    }
    let mut kraus = Vec::new();
    for (d, f) in &form.terms {
        let density = form.dst.u_adjoint_matrix().multiply(d)?;
        let effect = f.multiply(form.src.u())?;
        let d_eig = hermitian_eig(&density.hermitized()?, tol)?;
        let f_eig = hermitian_eig(&effect.hermitized()?, tol)?;
        let d_max = d_eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
        let f_max = f_eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
        for (a, &da) in d_eig.eigenvalues.iter().enumerate() {
            if da <= 1e-12 * d_max.max(1.0) {
                continue;
            }
            let u_a = d_eig.eigenvectors.column(a);
            for (b, &fb) in f_eig.eigenvalues.iter().enumerate() {
                if fb <= 1e-12 * f_max.max(1.0) {
                    continue;
                }
                let v_b = f_eig.eigenvectors.column(b);
                let weight = (da * fb).sqrt();
                kraus.push(outer(&v_b, &u_a).scale(C64::new(weight, 0.0)));
            }
        }
    }
    KrausUForm::new(form.src.clone(), form.dst.clone(), kraus)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EbVerdict {
    Yes,
    No,
    Undetermined,
}

/// Verdict with the Choi-state spectrum and separability evidence.
#[derive(Debug, Clone, Serialize)]
pub struct EbReport {
    pub verdict: EbVerdict,
    pub choi_spectrum: Vec<f64>,
    pub separability: SeparabilityReport,
}

/// U-entanglement-breaking detection through the plain reduction: the Choi
/// state `C_phi / m` of the corresponding ordinary channel is separable iff
/// the channel breaks entanglement. Exact below product dimension 7; above
/// it the verdict may be `Undetermined`.
pub fn is_u_entanglement_breaking(form: &KrausUForm, tol: &Tolerance) -> Result<EbReport> {
    if !is_quantum_u_channel(form, tol)? {
        return Err(Error::NotAChannel(
            "entanglement breaking is defined for quantum U-channels".into(),
        ));
    }
    let m = form.src().dim();
    let phi = correspondence_psi_to_phi(&form.induced_map(), form.src(), form.dst())?;
    let choi_state = phi.choi().scale(C64::new(1.0 / m as f64, 0.0));
    let spectrum = psd_check(&choi_state, tol)?.eigenvalues;
    let state = BipartiteUState::new(
        &SSpaceContext::hilbert(m),
        &SSpaceContext::hilbert(form.dst().dim()),
        choi_state,
        None,
        tol,
    )?;
    let separability = separability_verdict(&state, tol)?;
    let verdict = match separability.verdict {
        SeparabilityVerdict::SeparableCertified => EbVerdict::Yes,
        SeparabilityVerdict::EntangledCertified(_) => EbVerdict::No,
        SeparabilityVerdict::Undetermined => EbVerdict::Undetermined,
    };
    Ok(EbReport { verdict, choi_spectrum: spectrum, separability })
}

// --- the PPT-squared probe ------------------------------------------------------

/// Experiment record for one composition of two U-PPT channels. This is an
/// observation harness, not a theorem: it reports what the EB detector says
/// about the composite.
#[derive(Debug, Clone, Serialize)]
pub struct PptSquaredReport {
    pub composable: bool,
    pub ppt_inputs: bool,
    pub composite_is_channel: bool,
    pub eb_verdict: Option<EbVerdict>,
    pub choi_spectrum: Vec<f64>,
}

/// Compose `second ∘ first` at the Kraus level (`R_i S_j`) and run the
/// entanglement-breaking detector on the composite.
pub fn ppt_squared_probe(
    first: &KrausUForm,
    second: &KrausUForm,
    tol: &Tolerance,
) -> Result<PptSquaredReport> {
    if first.dst().dim() != second.src().dim() {
        return Err(Error::DimensionMismatch(format!(
            "cannot compose: first targets dim {}, second expects dim {}",
            first.dst().dim(),
            second.src().dim()
        )));
    }
    let composable = first.dst().approx_eq(second.src(), 10.0 * tol.equality_eps);
    let ppt_inputs = is_u_ppt_map(&first.induced_map(), first.src(), first.dst(), tol)?
        && is_u_ppt_map(&second.induced_map(), second.src(), second.dst(), tol)?;
    if !composable {
        return Ok(PptSquaredReport {
            composable,
            ppt_inputs,
            composite_is_channel: false,
            eb_verdict: None,
            choi_spectrum: Vec::new(),
        });
    }
    let mut kraus = Vec::new();
    for r in first.kraus() {
        for s in second.kraus() {
            kraus.push(r.multiply(s)?);
        }
    }
    let composite = KrausUForm::new(first.src().clone(), second.dst().clone(), kraus)?;
    let composite_is_channel = is_quantum_u_channel(&composite, tol)?;
    if !composite_is_channel {
        let phi = correspondence_psi_to_phi(
            &composite.induced_map(),
            composite.src(),
            composite.dst(),
        )?;
        let spectrum = psd_check(&phi.choi(), tol)?.eigenvalues;
        return Ok(PptSquaredReport {
            composable,
            ppt_inputs,
            composite_is_channel,
            eb_verdict: None,
            choi_spectrum: spectrum,
        });
    }
    let report = is_u_entanglement_breaking(&composite, tol)?;
    Ok(PptSquaredReport {
        composable,
        ppt_inputs,
        composite_is_channel,
        eb_verdict: Some(report.verdict),
        choi_spectrum: report.choi_spectrum,
    })
}

/// A `No` verdict from the probe, dumped with everything needed to replay it.
#[derive(Debug, Clone, Serialize)]
pub struct PptSquaredCounterexample {
    pub trial: usize,
    pub first: KrausUForm,
    pub second: KrausUForm,
    pub report: PptSquaredReport,
}

/// Aggregated outcome of a randomized PPT-squared experiment.
#[derive(Debug, Clone, Serialize)]
pub struct PptSquaredExperiment {
    pub trials: usize,
    pub seed: u64,
    pub eb_yes: usize,
    pub eb_undetermined: usize,
    pub eb_no: usize,
    pub counterexamples: Vec<PptSquaredCounterexample>,
}

/// Run `trials` probes on random qubit U-PPT channel pairs sharing a random
/// fundamental unitary. Every `No` verdict is kept as a counterexample dump;
/// none are expected at qubit scale, where PPT channels break entanglement.
pub fn ppt_squared_experiment(
    trials: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<PptSquaredExperiment> {
    let mut rng = crate::sample::rng(seed);
    let mut experiment = PptSquaredExperiment {
        trials,
        seed,
        eb_yes: 0,
        eb_undetermined: 0,
        eb_no: 0,
        counterexamples: Vec::new(),
    };
    for trial in 0..trials {
        let ctx = SSpaceContext::new(crate::sample::random_unitary(2, &mut rng), tol)?;
        let first = KrausUForm::new(
            ctx.clone(),
            ctx.clone(),
            crate::sample::random_ppt_channel_kraus(2, 2, &mut rng, tol, 10_000)?,
        )?;
        let second = KrausUForm::new(
            ctx.clone(),
            ctx.clone(),
            crate::sample::random_ppt_channel_kraus(2, 2, &mut rng, tol, 10_000)?,
        )?;
        let report = ppt_squared_probe(&first, &second, tol)?;
        match report.eb_verdict {
            Some(EbVerdict::Yes) => experiment.eb_yes += 1,
            Some(EbVerdict::Undetermined) | None => experiment.eb_undetermined += 1,
            Some(EbVerdict::No) => {
                experiment.eb_no += 1;
                experiment.counterexamples.push(PptSquaredCounterexample {
                    trial,
                    first: first.clone(),
                    second: second.clone(),
                    report,
                });
            }
        }
    }
    Ok(experiment)
}

// --- serde ------------------------------------------------------------------

mod cvec_list {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(
        vecs: &[Vec<C64>],
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let raw: Vec<Vec<(f64, f64)>> =
            vecs.iter().map(|v| v.iter().map(|z| (z.re, z.im)).collect()).collect();
        raw.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Vec<Vec<C64>>, D::Error> {
        let raw: Vec<Vec<(f64, f64)>> = Vec::deserialize(deserializer)?;
        Ok(raw
            .into_iter()
            .map(|v| v.into_iter().map(|(re, im)| C64::new(re, im)).collect())
            .collect())
    }
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    #[serde(rename = "ctxA")]
    ctx_a: SSpaceContext,
    #[serde(rename = "ctxB")]
    ctx_b: Option<SSpaceContext>,
    rho: ComplexMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<SeparableDecomposition>,
}

impl Serialize for QuantumUState {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        StateJson {
            ctx_a: self.ctx.clone(),
            ctx_b: None,
            rho: self.rho.clone(),
            certificate: None,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuantumUState {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let raw = StateJson::deserialize(deserializer)?;
        if raw.ctx_b.is_some() {
            return Err(serde::de::Error::custom(
                "expected a single-party state (ctxB must be null)",
            ));
        }
        make_u_state(&raw.ctx_a, raw.rho, &Tolerance::default())
            .map_err(serde::de::Error::custom)
    }
}

impl Serialize for BipartiteUState {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        StateJson {
            ctx_a: self.ctx_a.clone(),
            ctx_b: Some(self.ctx_b.clone()),
            rho: self.rho.clone(),
            certificate: self.certificate.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BipartiteUState {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let raw = StateJson::deserialize(deserializer)?;
        let ctx_b = raw
            .ctx_b
            .ok_or_else(|| serde::de::Error::custom("expected a bipartite state (ctxB set)"))?;
        BipartiteUState::new(&raw.ctx_a, &ctx_b, raw.rho, raw.certificate, &Tolerance::default())
            .map_err(serde::de::Error::custom)
    }
}
