//! Closed-form U-positivity regions for the example 2x2 and 3x3 metrics,
//! checked against the numerical predicate on parameter grids. Each region
//! comes from expanding an operator in the metric-adapted basis and reading
//! off the PSD conditions of the twisted matrix by hand; the grids avoid the
//! degenerate boundaries where the leading-minor shortcuts are ambiguous.

use uchannel::cmatrix::{ComplexMatrix, Tolerance, C64};
use uchannel::corpus::{pauli_x, pauli_y, pauli_z, u1_context, u2_context, u3_context};

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn pauli_combination(a: C64, b: C64, cc: C64, d: C64) -> ComplexMatrix {
    ComplexMatrix::identity(2)
        .scale(a)
        .add(&pauli_x().scale(b))
        .unwrap()
        .add(&pauli_y().scale(cc))
        .unwrap()
        .add(&pauli_z().scale(d))
        .unwrap()
}

// Over diag(1, i), the self-adjoint operators are a I + b sx + c sy + d sz
// with d = conj(a), b = x (1 + i), c = y (1 + i) for real x, y; the twisted
// matrix is [[2 Re a, b + conj(c)], [c + conj(b), 2 Im a]], so positivity is
// Re a >= 0, Im a >= 0 and 4 Re(a) Im(a) >= |b + conj(c)|^2.
#[test]
fn u1_positivity_region_matches_closed_form() {
    let ctx = u1_context();
    let mut checked = 0usize;
    for &re_a in &[0.1, 0.4, 1.0, -0.3] {
        for &im_a in &[0.05, 0.5, 1.2, -0.2] {
            for &x in &[-0.6, -0.1, 0.0, 0.2, 0.7] {
                for &y in &[-0.5, 0.0, 0.3, 0.8] {
                    let a = c(re_a, im_a);
                    let b = c(x, x);
                    let cy = c(y, y);
                    let d = a.conj();
                    let m = pauli_combination(a, b, cy, d);
                    let off = b + cy.conj();
                    let margin = 4.0 * re_a * im_a - off.norm_sqr();
                    // skip near-boundary draws where roundoff decides
                    if margin.abs() < 1e-6 || re_a.abs() < 1e-6 || im_a.abs() < 1e-6 {
                        continue;
                    }
                    let closed_form = re_a > 0.0 && im_a > 0.0 && margin > 0.0;
                    let numeric = ctx.is_u_positive(&m, &tol());
                    assert_eq!(
                        numeric, closed_form,
                        "re_a={re_a} im_a={im_a} x={x} y={y} margin={margin}"
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 200, "grid too thin: {checked}");
}

// Over (1/sqrt2) [[1, -1], [1, 1]], the self-adjoint operators are
// [[a + d, -conj(a) + b], [conj(a) + b, a - d]] with b, d real, and
// positivity is 2 Re(a) + b + d >= 0 together with
// b^2 + d^2 <= 2 (Re(a)^2 - Im(a)^2).
#[test]
fn u2_positivity_region_matches_closed_form() {
    let ctx = u2_context();
    let mut checked = 0usize;
    for &re_a in &[0.2, 0.6, 1.1] {
        for &im_a in &[0.0, 0.15, 0.45, 0.9] {
            for &b in &[-0.9, -0.3, 0.0, 0.4, 1.0] {
                for &d in &[-0.8, -0.2, 0.3, 0.9] {
                    let a = c(re_a, im_a);
                    let m = ComplexMatrix::new(
                        2,
                        2,
                        vec![a + c(d, 0.0), -a.conj() + c(b, 0.0), a.conj() + c(b, 0.0), a - c(d, 0.0)],
                    )
                    .unwrap();
                    let diag = 2.0 * re_a + b + d;
                    let det_margin = 2.0 * (re_a * re_a - im_a * im_a) - (b * b + d * d);
                    if diag.abs() < 1e-6 || det_margin.abs() < 1e-6 {
                        continue;
                    }
                    let closed_form = diag > 0.0 && det_margin > 0.0;
                    let numeric = ctx.is_u_positive(&m, &tol());
                    assert_eq!(
                        numeric, closed_form,
                        "a={a} b={b} d={d} diag={diag} det_margin={det_margin}"
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 150, "grid too thin: {checked}");
}

// basis adapted to the 3x3 metric: twisted coordinates come out as
// U_3* (sum_i a_i mu_i) = sqrt2 [[a1, a2, a3], [a4, a5, a6], [a7, a8, a9]]
fn mu_basis() -> [ComplexMatrix; 9] {
    let r = |rows: [[f64; 3]; 3]| {
        ComplexMatrix::from_real_rows(&[&rows[0], &rows[1], &rows[2]]).unwrap()
    };
    [
        r([[1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
        r([[0.0, 1.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]]),
        r([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]),
        r([[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
        r([[0.0, -1.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]]),
        r([[0.0, 0.0, -1.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]),
        r([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [SQRT2, 0.0, 0.0]]),
        r([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, SQRT2, 0.0]]),
        r([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, SQRT2]]),
    ]
}

#[test]
fn u3_mu_basis_twists_to_coordinates() {
    let ctx = u3_context();
    let mut rng = uchannel::sample::rng(17);
    let coeffs: Vec<C64> = (0..9)
        .map(|_| {
            let g = uchannel::sample::ginibre(1, 1, &mut rng);
            g.get(0, 0)
        })
        .collect();
    let mut a = ComplexMatrix::zeros(3, 3);
    for (z, mu) in coeffs.iter().zip(mu_basis()) {
        a = a.add(&mu.scale(*z)).unwrap();
    }
    let twisted = ctx.u_adjoint_matrix().multiply(&a).unwrap();
    let expect =
        ComplexMatrix::from_fn(3, 3, |i, j| coeffs[3 * i + j] * SQRT2);
    assert!(twisted.approx_eq(&expect, 1e-12));

    // unit U-weighted trace is the closed-form constraint on the diagonal
    let trace = twisted.trace().unwrap();
    let expect_trace = (coeffs[0] + coeffs[4] + coeffs[8]) * SQRT2;
    assert!((trace - expect_trace).norm() < 1e-12);
}

// With a1, a5, a9 real, a2 = conj(a4), a3 = conj(a7), a6 = conj(a8), the
// twisted matrix is sqrt2 times the Hermitian [[a1, a2, a3], [conj(a2), a5,
// a6], [conj(a3), conj(a6), a9]], and positivity away from degenerate
// boundaries is the leading-minor chain a1 > 0, a1 a5 - |a2|^2 > 0, det > 0
// with det = a1 a5 a9 - a1 |a6|^2 - |a2|^2 a9 - |a3|^2 a5
//          + 2 Re(a2 conj(a3) a6).
#[test]
fn u3_positivity_region_matches_leading_minors() {
    let ctx = u3_context();
    let mut rng = uchannel::sample::rng(29);
    let mut checked = 0usize;
    let mut positives = 0usize;
    for _ in 0..400 {
        let draw = uchannel::sample::ginibre(2, 3, &mut rng);
        let (a1, a5, a9) = (draw.get(0, 0).re.abs(), draw.get(0, 1).re.abs(), draw.get(0, 2).re);
        let (a2, a3, a6) =
            (draw.get(1, 0) * 0.5, draw.get(1, 1) * 0.5, draw.get(1, 2) * 0.5);
        let hermitian = ComplexMatrix::new(
            3,
            3,
            vec![
                c(a1, 0.0),
                a2,
                a3,
                a2.conj(),
                c(a5, 0.0),
                a6,
                a3.conj(),
                a6.conj(),
                c(a9, 0.0),
            ],
        )
        .unwrap();
        let a = ctx.u().multiply(&hermitian).unwrap();

        let minor1 = a1;
        let minor2 = a1 * a5 - a2.norm_sqr();
        let det = a1 * a5 * a9 - a1 * a6.norm_sqr() - a2.norm_sqr() * a9
            - a3.norm_sqr() * a5
            + 2.0 * (a2 * a3.conj() * a6).re;
        if minor1.abs() < 1e-4 || minor2.abs() < 1e-4 || det.abs() < 1e-4 {
            continue;
        }
        let closed_form = minor1 > 0.0 && minor2 > 0.0 && det > 0.0;
        let numeric = ctx.is_u_positive(&a, &tol());
        assert_eq!(numeric, closed_form, "minors ({minor1}, {minor2}, {det})");
        checked += 1;
        if closed_form {
            positives += 1;
        }
    }
    assert!(checked > 200, "grid too thin: {checked}");
    assert!(positives > 10, "region sampling never hit the positive cone");
}
