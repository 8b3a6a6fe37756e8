//! Executable worked-example corpus: the 2x2 fundamental-unitary family and
//! phase gates, U-Pauli bases, the one-parameter U_2-state family with its
//! tensor square, the U_3 family with a certified separable 9x9 state and a
//! PPT-entangled 9x9 state, closed-form U-CP maps from diagonal dilation
//! data, and an audit of the printed U_1 state family. `verify_corpus` runs
//! the whole set and aggregates machine-readable reports.

use serde::Serialize;

use crate::cmatrix::{
    hermitian_eig, partial_transpose, psd_check, solve_linear, ComplexMatrix, Tolerance, C64,
};
use crate::quantum::{
    make_u_separable, make_u_state, separability_verdict, u_ppt_check, BipartiteUState,
    QuantumUState, SeparabilityVerdict,
};
use crate::report::{digest_of, Evidence, VerificationReport, Verdict};
use crate::sspace::SSpaceContext;
use crate::umap::{is_ucp, ucp_check, MatrixMap};
use crate::{sample, Error, Result};

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

// --- fundamental unitaries --------------------------------------------------

/// General 2x2 fundamental unitary `[[a, b], [-e^{i phi} conj(b),
/// e^{i phi} conj(a)]]`; requires `|a|^2 + |b|^2 = 1`.
pub fn fundamental_unitary_2d(a: C64, b: C64, phi: f64, tol: &Tolerance) -> Result<ComplexMatrix> {
    let deviation = (a.norm_sqr() + b.norm_sqr() - 1.0).abs();
    if deviation > tol.equality_eps {
        return Err(Error::NormalizationViolation { deviation });
    }
    let phase = C64::from_polar(1.0, phi);
    ComplexMatrix::new(2, 2, vec![a, b, -phase * b.conj(), phase * a.conj()])
}

/// Phase gate `diag(1, e^{i phi})`.
pub fn phase_gate(phi: f64) -> ComplexMatrix {
    ComplexMatrix::diagonal(&[c(1.0, 0.0), C64::from_polar(1.0, phi)])
}

/// `U_1 = diag(1, i)`, the phase gate at phi = pi/2.
pub fn u1_context() -> SSpaceContext {
    SSpaceContext::new(ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]), &Tolerance::default())
        .expect("U_1 is unitary")
}

/// `U_2 = (1/sqrt2) [[1, -1], [1, 1]]`.
pub fn u2_context() -> SSpaceContext {
    let u = ComplexMatrix::from_real_rows(&[
        &[1.0 / SQRT2, -1.0 / SQRT2],
        &[1.0 / SQRT2, 1.0 / SQRT2],
    ])
    .expect("shape is fixed");
    SSpaceContext::new(u, &Tolerance::default()).expect("U_2 is unitary")
}

/// `U_3 = (1/sqrt2) [[1, -1, 0], [1, 1, 0], [0, 0, sqrt2]]`.
pub fn u3_context() -> SSpaceContext {
    let u = ComplexMatrix::from_real_rows(&[
        &[1.0 / SQRT2, -1.0 / SQRT2, 0.0],
        &[1.0 / SQRT2, 1.0 / SQRT2, 0.0],
        &[0.0, 0.0, 1.0],
    ])
    .expect("shape is fixed");
    SSpaceContext::new(u, &Tolerance::default()).expect("U_3 is unitary")
}

// --- U-Pauli bases ------------------------------------------------------------

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("shape is fixed")
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
        .expect("shape is fixed")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)])
}

/// The four U-Pauli matrices `{U*, U* sigma_x, U* sigma_y, U* sigma_z}`,
/// a basis of M_2 for every fundamental unitary U.
pub fn u_pauli_basis(ctx: &SSpaceContext) -> Result<[ComplexMatrix; 4]> {
    if ctx.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "U-Pauli basis needs dimension 2, got {}",
            ctx.dim()
        )));
    }
    let ua = ctx.u_adjoint_matrix();
    Ok([
        ua.clone(),
        ua.multiply(&pauli_x())?,
        ua.multiply(&pauli_y())?,
        ua.multiply(&pauli_z())?,
    ])
}

/// Smallest singular value of the stacked coefficient matrix; positive
/// exactly when the four matrices span M_2.
pub fn u_pauli_basis_margin(basis: &[ComplexMatrix; 4]) -> f64 {
    let stacked = ComplexMatrix::from_fn(4, 4, |i, j| basis[i].entries()[j]);
    stacked.singular_values().last().copied().unwrap_or(0.0)
}

/// Coefficients of `a` in the U-Pauli basis, so that
/// `a = sum_k coeff_k basis_k`.
pub fn expand_in_u_pauli(basis: &[ComplexMatrix; 4], a: &ComplexMatrix) -> Result<[C64; 4]> {
    if !a.is_square() || a.rows() != 2 {
        return Err(Error::DimensionMismatch("expansion needs a 2x2 matrix".into()));
    }
    // columns of the system are the flattened basis elements
    let system = ComplexMatrix::from_fn(4, 4, |i, j| basis[j].entries()[i]);
    let coeffs = solve_linear(&system, a.entries())
        .ok_or_else(|| Error::InvalidInput("U-Pauli basis is singular".into()))?;
    Ok([coeffs[0], coeffs[1], coeffs[2], coeffs[3]])
}

// --- the U_2 one-parameter family ---------------------------------------------

/// `rho_t = (1/4) [[t + sqrt2, t - sqrt2], [t + sqrt2, sqrt2 - t]]`,
/// a quantum U_2-state for `-sqrt2 <= t <= sqrt2`.
pub fn u2_state_family(t: f64, tol: &Tolerance) -> Result<QuantumUState> {
    if !(-SQRT2..=SQRT2).contains(&t) {
        return Err(Error::InvalidInput(format!(
            "t = {t} outside the admissible range [-sqrt2, sqrt2]"
        )));
    }
    make_u_state(&u2_context(), u2_family_matrix(t), tol)
}

/// The raw family matrix without validation, defined for every real t.
pub fn u2_family_matrix(t: f64) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[(t + SQRT2) / 4.0, (t - SQRT2) / 4.0],
        &[(t + SQRT2) / 4.0, (SQRT2 - t) / 4.0],
    ])
    .expect("shape is fixed")
}

/// `rho_t (x) rho_t` as a quantum U_2 (x) U_2-state.
pub fn u2_tensor_family(t: f64, tol: &Tolerance) -> Result<BipartiteUState> {
    if !(-SQRT2..=SQRT2).contains(&t) {
        return Err(Error::InvalidInput(format!(
            "t = {t} outside the admissible range [-sqrt2, sqrt2]"
        )));
    }
    let rho = u2_family_matrix(t);
    BipartiteUState::new(&u2_context(), &u2_context(), rho.tensor(&rho), None, tol)
}

/// Closed form of the tensor family: the printed 4x4 display with
/// prefactor 1/16 in terms of `t^2`, `2 sqrt2 t` and constants.
pub fn u2_tensor_display(t: f64) -> ComplexMatrix {
    let p = t * t + 2.0 * SQRT2 * t + 2.0;
    let q = t * t - 2.0;
    let r = t * t - 2.0 * SQRT2 * t + 2.0;
    ComplexMatrix::from_real_rows(&[
        &[p, q, q, r],
        &[p, -q, q, -r],
        &[p, q, -q, -r],
        &[p, -q, -q, r],
    ])
    .expect("shape is fixed")
    .scale(c(1.0 / 16.0, 0.0))
}

// --- the U_3 family ------------------------------------------------------------

/// `A = (1/3) [[0,0,0],[sqrt2,sqrt2,sqrt2],[1,1,1]]` with
/// `U_3* A = (1/3) * all-ones`.
pub fn u3_example_state(tol: &Tolerance) -> Result<QuantumUState> {
    let a = ComplexMatrix::from_real_rows(&[
        &[0.0, 0.0, 0.0],
        &[SQRT2 / 3.0, SQRT2 / 3.0, SQRT2 / 3.0],
        &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    ])
    .expect("shape is fixed");
    make_u_state(&u3_context(), a, tol)
}

/// The certified separable 9x9 state `A (x) A`, one product term built from
/// the uniform unit vector.
pub fn u3_separable_9x9(tol: &Tolerance) -> Result<BipartiteUState> {
    let uniform: Vec<C64> = (0..3).map(|_| c(1.0 / 3f64.sqrt(), 0.0)).collect();
    make_u_separable(
        &u3_context(),
        &u3_context(),
        &[1.0],
        &[uniform.clone()],
        &[uniform],
        tol,
    )
}

/// The printed 9x9 separable display: rows of 2, sqrt2 and 1 over 9.
pub fn u3_separable_display() -> ComplexMatrix {
    ComplexMatrix::from_fn(9, 9, |i, _| match i {
        4 => c(2.0 / 9.0, 0.0),
        5 | 7 => c(SQRT2 / 9.0, 0.0),
        8 => c(1.0 / 9.0, 0.0),
        _ => c(0.0, 0.0),
    })
}

/// The 3 (x) 3 PPT-entangled state `C`, scaled to unit trace by 2/21.
pub fn choi_ppt_entangled() -> ComplexMatrix {
    let rows: [[f64; 9]; 9] = [
        [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        [0.0, 2.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.5, 0.0],
        [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
    ];
    ComplexMatrix::from_fn(9, 9, |i, j| c(rows[i][j] * 2.0 / 21.0, 0.0))
}

/// `A' = (U_3 (x) U_3) C`, a U_3 (x) U_3-state that is U-PPT yet entangled.
pub fn choi_transported_u3(tol: &Tolerance) -> Result<BipartiteUState> {
    let ctx = u3_context();
    let u33 = ctx.u().tensor(ctx.u());
    let rho = u33.multiply(&choi_ppt_entangled())?;
    BipartiteUState::new(&ctx, &ctx, rho, None, tol)
}

/// The printed (1/21)-scaled matrix for `A' = (U_3 (x) U_3) C`.
pub fn choi_transported_display() -> ComplexMatrix {
    let s = SQRT2;
    let rows: [[f64; 9]; 9] = [
        [2.0, -3.0, 0.0, -1.5, 2.0, 0.0, 0.0, 0.0, 2.0],
        [0.0, 1.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0 / s, 0.0, 0.0, -2.0 * s, s, -s, 0.0],
        [0.0, -1.0, 0.0, -0.5, 0.0, 0.0, 0.0, 0.0, 0.0],
        [2.0, 3.0, 0.0, 1.5, 2.0, 0.0, 0.0, 0.0, 2.0],
        [0.0, 0.0, 1.0 / s, 0.0, 0.0, 2.0 * s, s, s, 0.0],
        [0.0, 0.0, s, 0.0, 0.0, -s, 2.0 * s, -1.0 / s, 0.0],
        [0.0, 0.0, s, 0.0, 0.0, s, 2.0 * s, 1.0 / s, 0.0],
        [2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 2.0],
    ];
    ComplexMatrix::from_fn(9, 9, |i, j| c(rows[i][j] / 21.0, 0.0))
}

// --- the U_1 family audit -------------------------------------------------------

/// Audit of the printed U_1 state family `rho_t = [[1, 0], [2t, 0]]`.
///
/// The audit records, for t in {0, 1/2, 1}: the Hermiticity deviation of
/// `U_1* rho_t` (which equals `2 sqrt2 t`), the PSD/state verdicts, and the
/// U-weighted trace of the printed (1/16)-scaled tensor display (which is
/// 1/16, not 1). It passes when the recorded values match those closed
/// forms; the printed family's own claim is documented, not asserted.
pub fn u1_family_audit(tol: &Tolerance) -> VerificationReport {
    let ctx = u1_context();
    let mut evidence = Vec::new();
    let mut consistent = true;
    for &t in &[0.0, 0.5, 1.0] {
        let rho = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(2.0 * t, 0.0), c(0.0, 0.0)])
            .expect("shape is fixed");
        let twisted = ctx.u_adjoint_matrix().multiply(&rho).expect("dims agree");
        let deviation = twisted.hermitian_deviation().expect("square");
        let expected = 2.0 * SQRT2 * t;
        evidence.push(Evidence::scalar(format!("hermiticity_deviation_t_{t}"), deviation));
        evidence.push(Evidence::scalar(format!("expected_deviation_t_{t}"), expected));
        if (deviation - expected).abs() > tol.equality_eps {
            consistent = false;
        }
        let validates = make_u_state(&ctx, rho, tol).is_ok();
        evidence.push(Evidence::flag(format!("validates_as_state_t_{t}"), validates));
        if validates != (t == 0.0) {
            consistent = false;
        }
    }
    // prefactor audit of the printed (1/16)-scaled tensor display at t = 1
    let t = 1.0;
    let display = ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[2.0 * t, 0.0, 0.0, 0.0],
        &[2.0 * t, 0.0, 0.0, 0.0],
        &[4.0 * t * t, 0.0, 0.0, 0.0],
    ])
    .expect("shape is fixed")
    .scale(c(1.0 / 16.0, 0.0));
    let u11 = ctx.u().tensor(ctx.u());
    let u_trace = u11
        .adjoint()
        .multiply(&display)
        .expect("dims agree")
        .trace()
        .expect("square");
    evidence.push(Evidence::scalar("tensor_display_u_trace_re", u_trace.re));
    evidence.push(Evidence::scalar("tensor_display_u_trace_im", u_trace.im));
    if (u_trace - c(1.0 / 16.0, 0.0)).norm() > tol.equality_eps {
        consistent = false;
    }
    VerificationReport::new(
        "u1-family-audit",
        Verdict::from_bool(consistent),
        evidence,
        digest_of(&[0.0f64, 0.5, 1.0]),
    )
}

// --- closed-form U-CP maps -------------------------------------------------------

/// The maps `A -> V# pi(A) V` with `V = diag(alpha, beta)`,
/// `pi(A) = W* A W`, `W = diag(gamma, delta)` over the U_1 and U_2 contexts,
/// verified entrywise against their printed closed forms.
#[derive(Debug, Clone)]
pub struct ClosedFormMaps {
    pub u1_map: MatrixMap,
    pub u2_map: MatrixMap,
    pub u1_closed_form_deviation: f64,
    pub u2_closed_form_deviation: f64,
    pub u1_is_ucp: bool,
    pub u2_is_ucp: bool,
}

pub fn example_ucp_closed_forms(
    alpha: C64,
    beta: C64,
    gamma: C64,
    delta: C64,
    tol: &Tolerance,
) -> Result<ClosedFormMaps> {
    for (name, z) in [("alpha", alpha), ("beta", beta), ("gamma", gamma), ("delta", delta)] {
        if (z.norm() - 1.0).abs() > tol.equality_eps {
            return Err(Error::NormalizationViolation {
                deviation: (z.norm() - 1.0).abs().max(f64::MIN_POSITIVE),
            })
            .map_err(|e| {
                let _ = name;
                e
            });
        }
    }
    let v = ComplexMatrix::diagonal(&[alpha, beta]);
    let w = ComplexMatrix::diagonal(&[gamma, delta]);
    let build = |ctx: &SSpaceContext| -> Result<MatrixMap> {
        let v_sharp = ctx.u_adjoint(&v)?;
        MatrixMap::from_action(2, 2, |a| {
            let pi_a = w.adjoint().multiply(a)?.multiply(&w)?;
            v_sharp.multiply(&pi_a)?.multiply(&v)
        })
    };
    let ctx1 = u1_context();
    let ctx2 = u2_context();
    let u1_map = build(&ctx1)?;
    let u2_map = build(&ctx2)?;

    let mut u1_dev: f64 = 0.0;
    let mut u2_dev: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let unit = ComplexMatrix::matrix_unit(2, 2, i, j);
            let dev1 = u1_map
                .apply(&unit)?
                .sub(&u1_closed_form(alpha, beta, gamma, delta, &unit))?
                .frobenius_norm();
            let dev2 = u2_map
                .apply(&unit)?
                .sub(&u2_closed_form(alpha, beta, gamma, delta, &unit))?
                .frobenius_norm();
            u1_dev = u1_dev.max(dev1);
            u2_dev = u2_dev.max(dev2);
        }
    }
    if u1_dev > 10.0 * tol.equality_eps || u2_dev > 10.0 * tol.equality_eps {
        return Err(Error::InvalidInput(format!(
            "closed forms deviate from the constructed maps by {u1_dev:.3e} / {u2_dev:.3e}"
        )));
    }
    Ok(ClosedFormMaps {
        u1_is_ucp: is_ucp(&u1_map, &ctx1, &ctx1, tol)?,
        u2_is_ucp: is_ucp(&u2_map, &ctx2, &ctx2, tol)?,
        u1_map,
        u2_map,
        u1_closed_form_deviation: u1_dev,
        u2_closed_form_deviation: u2_dev,
    })
}

/// Printed closed form over U_1 (unit-modulus parameters):
/// `[[a11, conj(alpha) conj(gamma) delta beta a12],
///   [conj(beta) conj(delta) gamma alpha a21, a22]]`.
pub fn u1_closed_form(alpha: C64, beta: C64, gamma: C64, delta: C64, a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::new(
        2,
        2,
        vec![
            a.get(0, 0),
            alpha.conj() * gamma.conj() * delta * beta * a.get(0, 1),
            beta.conj() * delta.conj() * gamma * alpha * a.get(1, 0),
            a.get(1, 1),
        ],
    )
    .expect("shape is fixed")
}

/// Printed closed form over U_2 (unit-modulus parameters).
pub fn u2_closed_form(alpha: C64, beta: C64, gamma: C64, delta: C64, a: &ComplexMatrix) -> ComplexMatrix {
    let ba = beta.conj() * alpha;
    let ab = alpha.conj() * beta;
    let dg = delta.conj() * gamma;
    let gd = gamma.conj() * delta;
    let one = c(1.0, 0.0);
    let half = c(0.5, 0.0);
    let (a11, a12, a21, a22) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    ComplexMatrix::new(
        2,
        2,
        vec![
            half * ((one + ba) * a11 + (one - ba) * dg * a21),
            half * ((ab + one) * gd * a12 + (ab - one) * a22),
            half * ((one - ba) * a11 + (one + ba) * dg * a21),
            half * ((ab - one) * gd * a12 + (ab + one) * a22),
        ],
    )
    .expect("shape is fixed")
}

// --- the aggregated corpus run ------------------------------------------------

/// Outcome of one full corpus verification.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusRun {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<VerificationReport>,
}

/// Run every worked-example reproduction plus the U_1 family audit.
///
/// Deterministic for a fixed seed. The overall verdict is the conjunction of
/// all non-audit checks; audit reports are included but judged only on their
/// own recorded values.
pub fn verify_corpus(seed: u64, tol: &Tolerance) -> CorpusRun {
    let mut checks = Vec::new();
    checks.push(check_fundamental_unitaries(tol));
    checks.push(check_u_pauli_bases(seed, tol));
    checks.push(check_u2_family(tol));
    checks.push(check_u2_tensor_family(tol));
    checks.push(check_u3_state(tol));
    checks.push(check_u3_separable(tol));
    checks.push(check_choi_state(tol));
    checks.push(check_choi_transported(tol));
    checks.push(check_closed_forms(seed, tol));
    let audit = u1_family_audit(tol);
    let passed = checks.iter().all(|r| r.verdict == Verdict::Pass);
    checks.push(audit);
    CorpusRun { seed, passed, checks }
}

fn check_fundamental_unitaries(tol: &Tolerance) -> VerificationReport {
    let mut evidence = Vec::new();
    let mut ok = true;

    // a = 1, b = 0 gives the phase gate
    let phi = 0.7;
    match fundamental_unitary_2d(c(1.0, 0.0), c(0.0, 0.0), phi, tol) {
        Ok(u) => {
            let dev = u.sub(&phase_gate(phi)).map(|d| d.frobenius_norm()).unwrap_or(f64::MAX);
            evidence.push(Evidence::scalar("phase_gate_deviation", dev));
            ok &= dev <= tol.equality_eps;
        }
        Err(_) => ok = false,
    }
    // phi = pi/2 gives U_1
    match fundamental_unitary_2d(c(1.0, 0.0), c(0.0, 0.0), std::f64::consts::FRAC_PI_2, tol) {
        Ok(u) => {
            let dev =
                u.sub(u1_context().u()).map(|d| d.frobenius_norm()).unwrap_or(f64::MAX);
            evidence.push(Evidence::scalar("u1_deviation", dev));
            ok &= dev <= tol.equality_eps;
        }
        Err(_) => ok = false,
    }
    // a = b = 1/sqrt2 is unitary
    match fundamental_unitary_2d(c(1.0 / SQRT2, 0.0), c(1.0 / SQRT2, 0.0), 1.1, tol) {
        Ok(u) => {
            let accepted = SSpaceContext::new(u, tol).is_ok();
            evidence.push(Evidence::flag("hadamard_like_accepted", accepted));
            ok &= accepted;
        }
        Err(_) => ok = false,
    }
    // normalization violations are rejected
    let rejected = matches!(
        fundamental_unitary_2d(c(1.0, 0.0), c(0.5, 0.0), 0.0, tol),
        Err(Error::NormalizationViolation { .. })
    );
    evidence.push(Evidence::flag("normalization_violation_rejected", rejected));
    ok &= rejected;

    VerificationReport::new(
        "fundamental-unitary-2d",
        Verdict::from_bool(ok),
        evidence,
        digest_of(&[0.7, std::f64::consts::FRAC_PI_2, 1.1]),
    )
}

fn check_u_pauli_bases(seed: u64, tol: &Tolerance) -> VerificationReport {
    let mut evidence = Vec::new();
    let mut ok = true;
    let mut rng = sample::rng(seed.wrapping_add(1));
    for (name, ctx) in [
        ("identity", SSpaceContext::hilbert(2)),
        ("u1", u1_context()),
        ("u2", u2_context()),
    ] {
        match u_pauli_basis(&ctx) {
            Ok(basis) => {
                // U = I reproduces the ordinary Pauli basis
                if name == "identity" {
                    let plain = [
                        ComplexMatrix::identity(2),
                        pauli_x(),
                        pauli_y(),
                        pauli_z(),
                    ];
                    for (b, p) in basis.iter().zip(&plain) {
                        ok &= b.approx_eq(p, tol.equality_eps);
                    }
                }
                let margin = u_pauli_basis_margin(&basis);
                evidence.push(Evidence::scalar(format!("{name}_basis_margin"), margin));
                ok &= margin > 1e-6;
                // expansion of a random matrix reproduces it
                let a = sample::ginibre(2, 2, &mut rng);
                match expand_in_u_pauli(&basis, &a) {
                    Ok(coeffs) => {
                        let mut rebuilt = ComplexMatrix::zeros(2, 2);
                        for (z, b) in coeffs.iter().zip(&basis) {
                            rebuilt = rebuilt.add(&b.scale(*z)).expect("dims agree");
                        }
                        let dev =
                            rebuilt.sub(&a).map(|d| d.frobenius_norm()).unwrap_or(f64::MAX);
                        evidence.push(Evidence::scalar(format!("{name}_expansion_residual"), dev));
                        ok &= dev <= 1e-10;
                    }
                    Err(_) => ok = false,
                }
            }
            Err(_) => ok = false,
        }
    }
    VerificationReport::new(
        "u-pauli-basis",
        Verdict::from_bool(ok),
        evidence,
        digest_of(&seed),
    )
}

fn check_u2_family(tol: &Tolerance) -> VerificationReport {
    let mut evidence = Vec::new();
    let mut ok = true;
    let ctx = u2_context();
    for &t in &[-SQRT2, -1.0, 0.0, 1.0, SQRT2] {
        let valid = u2_state_family(t, tol).is_ok();
        evidence.push(Evidence::flag(format!("validates_t_{t:.4}"), valid));
        ok &= valid;
        // diagonal closed form of U_2* rho_t
        let twisted = ctx
            .u_adjoint_matrix()
            .multiply(&u2_family_matrix(t))
            .expect("dims agree");
        let expect = ComplexMatrix::diagonal(&[
            c((t + SQRT2) / (2.0 * SQRT2), 0.0),
            c((SQRT2 - t) / (2.0 * SQRT2), 0.0),
        ]);
        let dev = twisted.sub(&expect).expect("dims agree").frobenius_norm();
        evidence.push(Evidence::scalar(format!("diagonal_residual_t_{t:.4}"), dev));
        ok &= dev <= 1e-9;
    }
    for &t in &[-1.5, 1.5] {
        let rejected = make_u_state(&ctx, u2_family_matrix(t), tol).is_err();
        evidence.push(Evidence::flag(format!("rejected_t_{t:.4}"), rejected));
        ok &= rejected;
    }
    VerificationReport::new(
        "u2-state-family",
        Verdict::from_bool(ok),
        evidence,
        digest_of(&[-SQRT2, -1.0, 0.0, 1.0, SQRT2, -1.5, 1.5]),
    )
}

fn check_u2_tensor_family(tol: &Tolerance) -> VerificationReport {
    let mut evidence = Vec::new();
    let mut ok = true;
    for &t in &[-SQRT2, -1.0, 0.0, 1.0, SQRT2] {
        match u2_tensor_family(t, tol) {
            Ok(state) => {
                let dev = state
                    .rho()
                    .sub(&u2_tensor_display(t))
                    .expect("dims agree")
                    .frobenius_norm();
                evidence.push(Evidence::scalar(format!("display_residual_t_{t:.4}"), dev));
                ok &= dev <= 1e-12;
            }
            Err(_) => ok = false,
        }
    }
    VerificationReport::new(
        "u2-tensor-family",
        Verdict::from_bool(ok),
        evidence,
        digest_of(&[-SQRT2, -1.0, 0.0, 1.0, SQRT2]),
    )
}

fn check_u3_state(tol: &Tolerance) -> VerificationReport {
    let mut evidence = Vec::new();
    let mut ok = true;
    match u3_example_state(tol) {
        Ok(state) => {
            let twisted = u3_context()
                .u_adjoint_matrix()
                .multiply(state.rho())
                .expect("dims agree");
            let ones = ComplexMatrix::from_fn(3, 3, |_, _| c(1.0 / 3.0, 0.0));
            let dev = twisted.sub(&ones).expect("dims agree").frobenius_norm();
            evidence.push(Evidence::scalar("all_ones_residual", dev));
            ok &= dev <= 1e-9;
            let eig = hermitian_eig(&twisted, tol).expect("Hermitian by construction");
            evidence.push(Evidence::eigenvalues("u3_adj_state_spectrum", &eig.eigenvalues));
            ok &= (eig.eigenvalues[0] - 1.0).abs() <= 1e-9
                && eig.eigenvalues[1].abs() <= 1e-9
                && eig.eigenvalues[2].abs() <= 1e-9;
            let trace = twisted.trace().expect("square");
            evidence.push(Evidence::scalar("u_trace_re", trace.re));
            ok &= (trace - c(1.0, 0.0)).norm() <= 1e-9;
        }
        Err(_) => ok = false,
    }
    VerificationReport::new(
        "u3-state",
        Verdict::from_bool(ok),
        evidence,
        digest_of(u3_context().u()),
    )
}

fn check_u3_separable(tol: &Tolerance) -> VerificationReport {
    let mut evidence = Vec::new();
    let mut ok = true;
    match u3_separable_9x9(tol) {
        Ok(state) => {
            let dev = state
                .rho()
                .sub(&u3_separable_display())
                .expect("dims agree")
                .frobenius_norm();
            evidence.push(Evidence::scalar("display_residual", dev));
            ok &= dev <= 1e-12;
            let ppt = u_ppt_check(&state, tol).expect("well-formed state");
            evidence.push(Evidence::eigenvalues("u_ppt_spectrum", &ppt.eigenvalues));
            ok &= ppt.psd;
            match separability_verdict(&state, tol) {
                Ok(report) => {
                    let certified =
                        report.verdict == SeparabilityVerdict::SeparableCertified;
                    evidence.push(Evidence::flag("separable_certified", certified));
                    evidence.push(Evidence::scalar("ccnr", report.ccnr));
                    ok &= certified;
                }
                Err(_) => ok = false,
            }
        }
        Err(_) => ok = false,
    }
    VerificationReport::new(
        "u3-separable-9x9",
        Verdict::from_bool(ok),
        evidence,
        digest_of(&u3_separable_display()),
    )
}

fn check_choi_state(tol: &Tolerance) -> VerificationReport {
    let mut evidence = Vec::new();
    let mut ok = true;
    let choi = choi_ppt_entangled();
    let trace = choi.trace().expect("square");
    evidence.push(Evidence::scalar("trace_re", trace.re));
    ok &= (trace - c(1.0, 0.0)).norm() <= 1e-12;
    let psd = psd_check(&choi, tol).expect("square");
    evidence.push(Evidence::eigenvalues("spectrum", &psd.eigenvalues));
    ok &= psd.psd;
    let tau = partial_transpose(&choi, 3, 3).expect("9 = 3 * 3");
    let tau_psd = psd_check(&tau, tol).expect("square");
    evidence.push(Evidence::eigenvalues("partial_transpose_spectrum", &tau_psd.eigenvalues));
    ok &= tau_psd.psd;
    VerificationReport::new(
        "choi-ppt-entangled",
        Verdict::from_bool(ok),
        evidence,
        digest_of(&choi),
    )
}

fn check_choi_transported(tol: &Tolerance) -> VerificationReport {
    let mut evidence = Vec::new();
    let mut ok = true;
    match choi_transported_u3(tol) {
        Ok(state) => {
            let dev = state
                .rho()
                .sub(&choi_transported_display())
                .expect("dims agree")
                .frobenius_norm();
            evidence.push(Evidence::scalar("display_residual", dev));
            ok &= dev <= 1e-12;
            let ppt = u_ppt_check(&state, tol).expect("well-formed state");
            evidence.push(Evidence::eigenvalues("u_ppt_spectrum", &ppt.eigenvalues));
            ok &= ppt.psd;
            match separability_verdict(&state, tol) {
                Ok(report) => {
                    evidence.push(Evidence::scalar("ccnr", report.ccnr));
                    evidence.push(Evidence::text(
                        "separability_verdict",
                        format!("{:?}", report.verdict),
                    ));
                    // the state is entangled, so the verdict may never
                    // certify separability; CCNR may or may not detect it
                    ok &= report.verdict != SeparabilityVerdict::SeparableCertified;
                }
                Err(_) => ok = false,
            }
        }
        Err(_) => ok = false,
    }
    VerificationReport::new(
        "choi-transported-u3",
        Verdict::from_bool(ok),
        evidence,
        digest_of(&choi_transported_display()),
    )
}

fn check_closed_forms(seed: u64, tol: &Tolerance) -> VerificationReport {
    let mut evidence = Vec::new();
    let mut ok = true;
    let mut rng = sample::rng(seed.wrapping_add(2));
    let random_phase = |r: &mut rand_chacha::ChaCha8Rng| {
        C64::from_polar(1.0, rand::Rng::random_range(r, 0.0..std::f64::consts::TAU))
    };

    // identity parameters: the U_1 map is the identity
    match example_ucp_closed_forms(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), tol) {
        Ok(maps) => {
            ok &= maps.u1_map.approx_eq(&MatrixMap::identity(2), 1e-12);
            ok &= maps.u1_is_ucp && maps.u2_is_ucp;
            let ctx1 = u1_context();
            let ctx2 = u2_context();
            if let Ok(check) = ucp_check(&maps.u1_map, &ctx1, &ctx1, tol) {
                evidence.push(Evidence::eigenvalues("u1_identity_params_spectrum", &check.eigenvalues));
            }
            if let Ok(check) = ucp_check(&maps.u2_map, &ctx2, &ctx2, tol) {
                evidence.push(Evidence::eigenvalues("u2_identity_params_spectrum", &check.eigenvalues));
            }
        }
        Err(_) => ok = false,
    }

    // alpha = 1, beta = i, gamma = delta = 1: off-diagonal scalings are +-i
    match example_ucp_closed_forms(c(1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0), tol) {
        Ok(maps) => {
            let e12 = ComplexMatrix::matrix_unit(2, 2, 0, 1);
            let out = maps.u1_map.apply(&e12).expect("dims agree");
            let dev = out.sub(&e12.scale(c(0.0, 1.0))).expect("dims agree").frobenius_norm();
            evidence.push(Evidence::scalar("u1_offdiag_scaling_residual", dev));
            ok &= dev <= 1e-12;
            ok &= maps.u1_is_ucp;
            // gamma = delta keeps the dilation representation trivial, so
            // the printed U_2 form is U-CP here as well
            evidence.push(Evidence::flag("u2_ucp_scalar_w", maps.u2_is_ucp));
            ok &= maps.u2_is_ucp;
        }
        Err(_) => ok = false,
    }

    // random unit-modulus draws with gamma = delta
    for trial in 0..3 {
        let alpha = random_phase(&mut rng);
        let beta = random_phase(&mut rng);
        let gamma = random_phase(&mut rng);
        match example_ucp_closed_forms(alpha, beta, gamma, gamma, tol) {
            Ok(maps) => {
                evidence.push(Evidence::scalar(
                    format!("closed_form_residual_trial_{trial}"),
                    maps.u1_closed_form_deviation.max(maps.u2_closed_form_deviation),
                ));
                ok &= maps.u1_is_ucp && maps.u2_is_ucp;
            }
            Err(_) => ok = false,
        }
    }

    // audit record: with gamma != delta the printed U_2 form needs the
    // dilation-side unitary pi(U_2) in the sharp; with the plain U_2 sharp
    // it is generally not U_2-CP, so the verdict is recorded, not asserted
    match example_ucp_closed_forms(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), tol) {
        Ok(maps) => {
            evidence.push(Evidence::flag("u1_ucp_nonscalar_w", maps.u1_is_ucp));
            evidence.push(Evidence::flag("u2_ucp_nonscalar_w_audit", maps.u2_is_ucp));
            let ctx2 = u2_context();
            if let Ok(check) = ucp_check(&maps.u2_map, &ctx2, &ctx2, tol) {
                evidence.push(Evidence::eigenvalues(
                    "u2_nonscalar_w_audit_spectrum",
                    &check.eigenvalues,
                ));
            }
            ok &= maps.u1_is_ucp;
        }
        Err(_) => ok = false,
    }

    VerificationReport::new(
        "ucp-closed-forms",
        Verdict::from_bool(ok),
        evidence,
        digest_of(&seed),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{is_u_ppt_state, EntanglementReason};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn fundamental_unitary_examples() {
        let u = fundamental_unitary_2d(c(1.0, 0.0), c(0.0, 0.0), 1.3, &tol()).unwrap();
        assert!(u.approx_eq(&phase_gate(1.3), 1e-15));
        let u =
            fundamental_unitary_2d(c(1.0, 0.0), c(0.0, 0.0), std::f64::consts::FRAC_PI_2, &tol())
                .unwrap();
        assert!(u.approx_eq(u1_context().u(), 1e-15));
        // oracle: U U* = I for a Hadamard-like draw
        let u = fundamental_unitary_2d(c(1.0 / SQRT2, 0.0), c(0.0, 1.0 / SQRT2), 0.4, &tol())
            .unwrap();
        assert!(u
            .multiply(&u.adjoint())
            .unwrap()
            .approx_eq(&ComplexMatrix::identity(2), 1e-14));
        assert!(matches!(
            fundamental_unitary_2d(c(0.9, 0.0), c(0.0, 0.0), 0.0, &tol()),
            Err(Error::NormalizationViolation { .. })
        ));
    }

    #[test]
    fn u_pauli_examples() {
        let basis = u_pauli_basis(&SSpaceContext::hilbert(2)).unwrap();
        assert!(basis[0].approx_eq(&ComplexMatrix::identity(2), 1e-15));
        assert!(basis[1].approx_eq(&pauli_x(), 1e-15));
        assert!(basis[2].approx_eq(&pauli_y(), 1e-15));
        assert!(basis[3].approx_eq(&pauli_z(), 1e-15));

        let basis = u_pauli_basis(&u1_context()).unwrap();
        assert!(basis[0].approx_eq(
            &ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.0, -1.0)]),
            1e-15
        ));
        assert!(u_pauli_basis_margin(&basis) > 0.5);

        let a = ComplexMatrix::new(2, 2, vec![c(0.3, 1.0), c(2.0, 0.0), c(0.0, -1.5), c(1.0, 1.0)])
            .unwrap();
        let coeffs = expand_in_u_pauli(&basis, &a).unwrap();
        let mut rebuilt = ComplexMatrix::zeros(2, 2);
        for (z, b) in coeffs.iter().zip(&basis) {
            rebuilt = rebuilt.add(&b.scale(*z)).unwrap();
        }
        assert!(rebuilt.approx_eq(&a, 1e-12));

        assert!(u_pauli_basis(&SSpaceContext::hilbert(3)).is_err());
    }

    #[test]
    fn u2_family_matches_diagonal_oracle() {
        for &t in &[-SQRT2, -0.3, 0.0, 1.0, SQRT2] {
            let state = u2_state_family(t, &tol()).unwrap();
            let twisted =
                u2_context().u_adjoint_matrix().multiply(state.rho()).unwrap();
            let expect = ComplexMatrix::diagonal(&[
                c((t + SQRT2) / (2.0 * SQRT2), 0.0),
                c((SQRT2 - t) / (2.0 * SQRT2), 0.0),
            ]);
            assert!(twisted.approx_eq(&expect, 1e-12), "t = {t}");
        }
        assert!(u2_state_family(1.5, &tol()).is_err());
        assert!(make_u_state(&u2_context(), u2_family_matrix(1.5), &tol()).is_err());
    }

    #[test]
    fn u2_tensor_display_matches() {
        for &t in &[-1.0, 0.0, 0.25, SQRT2] {
            let state = u2_tensor_family(t, &tol()).unwrap();
            let dev = state.rho().sub(&u2_tensor_display(t)).unwrap().frobenius_norm();
            assert!(dev <= 1e-13, "t = {t}: {dev:e}");
            // first entry closed form
            let expect = (t * t + 2.0 * SQRT2 * t + 2.0) / 16.0;
            assert!((state.rho().get(0, 0).re - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn u3_examples() {
        let state = u3_example_state(&tol()).unwrap();
        let twisted = u3_context().u_adjoint_matrix().multiply(state.rho()).unwrap();
        let ones = ComplexMatrix::from_fn(3, 3, |_, _| c(1.0 / 3.0, 0.0));
        assert!(twisted.approx_eq(&ones, 1e-13));

        let separable = u3_separable_9x9(&tol()).unwrap();
        assert!(separable.rho().approx_eq(&u3_separable_display(), 1e-13));
        assert!(is_u_ppt_state(&separable, &tol()).unwrap());
        let report = separability_verdict(&separable, &tol()).unwrap();
        assert_eq!(report.verdict, SeparabilityVerdict::SeparableCertified);
    }

    #[test]
    fn choi_state_examples() {
        let choi = choi_ppt_entangled();
        assert!((choi.trace().unwrap() - c(1.0, 0.0)).norm() < 1e-13);
        assert!(psd_check(&choi, &tol()).unwrap().psd);
        assert!(psd_check(&partial_transpose(&choi, 3, 3).unwrap(), &tol()).unwrap().psd);

        let transported = choi_transported_u3(&tol()).unwrap();
        assert!(transported.rho().approx_eq(&choi_transported_display(), 1e-13));
        assert!(is_u_ppt_state(&transported, &tol()).unwrap());
        let report = separability_verdict(&transported, &tol()).unwrap();
        assert_ne!(report.verdict, SeparabilityVerdict::SeparableCertified);
        // PPT passes by construction, so any entanglement certificate here
        // must come from the realignment value
        if let SeparabilityVerdict::EntangledCertified(reason) = report.verdict {
            assert_eq!(reason, EntanglementReason::Ccnr);
            assert!(report.ccnr > 1.0);
        }
    }

    #[test]
    fn closed_forms_identity_parameters() {
        let maps = example_ucp_closed_forms(
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(1.0, 0.0),
            &tol(),
        )
        .unwrap();
        assert!(maps.u1_map.approx_eq(&MatrixMap::identity(2), 1e-13));
        assert!(maps.u1_is_ucp && maps.u2_is_ucp);
        assert!(maps.u1_closed_form_deviation < 1e-13);
        assert!(maps.u2_closed_form_deviation < 1e-13);

        assert!(matches!(
            example_ucp_closed_forms(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), &tol()),
            Err(Error::NormalizationViolation { .. })
        ));
    }

    #[test]
    fn closed_forms_off_diagonal_scaling() {
        let maps = example_ucp_closed_forms(
            c(1.0, 0.0),
            c(0.0, 1.0),
            c(1.0, 0.0),
            c(1.0, 0.0),
            &tol(),
        )
        .unwrap();
        let e12 = ComplexMatrix::matrix_unit(2, 2, 0, 1);
        let e21 = ComplexMatrix::matrix_unit(2, 2, 1, 0);
        let out12 = maps.u1_map.apply(&e12).unwrap();
        let out21 = maps.u1_map.apply(&e21).unwrap();
        assert!(out12.approx_eq(&e12.scale(c(0.0, 1.0)), 1e-13));
        assert!(out21.approx_eq(&e21.scale(c(0.0, -1.0)), 1e-13));
    }

    #[test]
    fn u1_audit_passes_and_records_slip() {
        let report = u1_family_audit(&tol());
        assert_eq!(report.verdict, Verdict::Pass);
        // the t = 1 deviation is 2 sqrt2
        let dev = report
            .evidence
            .iter()
            .find_map(|e| match e {
                Evidence::Scalar { name, value } if name == "hermiticity_deviation_t_1" => {
                    Some(*value)
                }
                _ => None,
            })
            .unwrap();
        assert!((dev - 2.0 * SQRT2).abs() < 1e-12);
    }

    #[test]
    fn corpus_run_is_deterministic_and_green() {
        let run_a = verify_corpus(42, &tol());
        assert!(run_a.passed, "failing checks: {:?}", run_a
            .checks
            .iter()
            .filter(|r| r.verdict != Verdict::Pass)
            .map(|r| &r.check_name)
            .collect::<Vec<_>>());
        let run_b = verify_corpus(42, &tol());
        let a = serde_json::to_string(&run_a).unwrap();
        let b = serde_json::to_string(&run_b).unwrap();
        assert_eq!(a, b);
    }
}
