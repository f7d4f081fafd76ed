//! P1 finite elements on an interval: two-point Steklov pairs via a
//! Schur complement onto the endpoint degrees of freedom, and the first
//! nonzero Neumann eigenvalue via Sturm-sequence bisection on the
//! tridiagonal pencil.

use crate::error::{Result, SteklovError};
use crate::numeric::sym2_generalized;
use crate::solver::{CoefficientFn, ReducedModeProblem, RightBc};

/// Gauss points of the 2-point rule on [0, 1].
const G1: f64 = 0.211_324_865_405_187_1;
const G2: f64 = 0.788_675_134_594_812_9;

/// Symmetric tridiagonal matrix (diagonal + subdiagonal).
struct Tridiag {
    diag: Vec<f64>,
    off: Vec<f64>,
}

/// Assemble stiffness + potential mass for (w a')' = q a on [0, L]
/// with `cells` P1 elements; element integrals use 2-point Gauss.
fn assemble(problem: &ReducedModeProblem) -> Result<Tridiag> {
    let n = problem.grid_size;
    let h = problem.length / n as f64;
    let mut diag = vec![0.0; n + 1];
    let mut off = vec![0.0; n];
    for e in 0..n {
        let t0 = e as f64 * h;
        let (tg1, tg2) = (t0 + G1 * h, t0 + G2 * h);
        let (w1, w2) = (problem.flux_weight.eval(tg1), problem.flux_weight.eval(tg2));
        let (q1, q2) = (problem.potential.eval(tg1), problem.potential.eval(tg2));
        for (t, w, q) in [(tg1, w1, q1), (tg2, w2, q2)] {
            if !(w.is_finite() && q.is_finite()) || w <= 0.0 {
                return Err(SteklovError::Numeric(format!(
                    "non-finite or non-positive coefficients at t = {t}: w = {w}, q = {q}"
                )));
            }
        }
        let s = 0.5 * (w1 + w2) / h;
        let m00 = 0.5 * h * (q1 * (1.0 - G1).powi(2) + q2 * (1.0 - G2).powi(2));
        let m01 = 0.5 * h * (q1 * G1 * (1.0 - G1) + q2 * G2 * (1.0 - G2));
        let m11 = 0.5 * h * (q1 * G1 * G1 + q2 * G2 * G2);
        diag[e] += s + m00;
        diag[e + 1] += s + m11;
        off[e] += -s + m01;
    }
    Ok(Tridiag { diag, off })
}

/// Solve the SPD tridiagonal system via LDL^T (no pivoting needed).
fn tridiag_solve(diag: &[f64], off: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = diag.len();
    let mut d = vec![0.0; n];
    let mut l = vec![0.0; n.saturating_sub(1)];
    d[0] = diag[0];
    for i in 1..n {
        if d[i - 1] <= 0.0 {
            return Err(SteklovError::Numeric(
                "interior stiffness block lost positive definiteness".into(),
            ));
        }
        l[i - 1] = off[i - 1] / d[i - 1];
        d[i] = diag[i] - l[i - 1] * off[i - 1];
    }
    for i in 1..n {
        rhs[i] -= l[i - 1] * rhs[i - 1];
    }
    rhs[n - 1] /= d[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = rhs[i] / d[i] - l[i] * rhs[i + 1];
    }
    Ok(())
}

/// Eigenpair of the two-point Steklov problem: eigenvalues ascending,
/// each with its boundary trace (a(0), a(L)).
#[derive(Debug, Clone, Copy)]
pub struct TwoPointEigen {
    pub values: [f64; 2],
    pub boundary_traces: [[f64; 2]; 2],
}

/// Both eigenvalues of the per-mode problem with Steklov conditions at
/// the two endpoints, computed by eliminating the interior onto the
/// 2x2 endpoint Schur complement.
pub fn two_point_eigen(problem: &ReducedModeProblem) -> Result<TwoPointEigen> {
    problem.validate()?;
    let RightBc::Steklov {
        boundary_mass: right_mass,
    } = problem.right_bc
    else {
        return Err(SteklovError::Config(
            "two-point Steklov eigenvalues need a Steklov right end".into(),
        ));
    };
    let n = problem.grid_size;
    let k = assemble(problem)?;

    // Interior block spans nodes 1..n-1; its coupling to the endpoints is
    // the single entry off[0] (to node 0) and off[n-1] (to node n).
    let int_diag = &k.diag[1..n];
    let int_off = &k.off[1..n - 1];
    let mut col0 = vec![0.0; n - 1];
    let mut col1 = vec![0.0; n - 1];
    col0[0] = k.off[0];
    col1[n - 2] = k.off[n - 1];
    tridiag_solve(int_diag, int_off, &mut col0)?;
    tridiag_solve(int_diag, int_off, &mut col1)?;

    let s00 = k.diag[0] - k.off[0] * col0[0];
    let s01 = -k.off[0] * col1[0];
    let s10 = -k.off[n - 1] * col0[n - 2];
    let s11 = k.diag[n] - k.off[n - 1] * col1[n - 2];
    let s01 = 0.5 * (s01 + s10);

    let ((l0, v0), (l1, v1)) = sym2_generalized(
        [[s00, s01], [s01, s11]],
        [problem.left_mass, right_mass],
    );
    for l in [l0, l1] {
        if l < -1e-9 * l.abs().max(1.0) {
            return Err(SteklovError::Numeric(format!(
                "negative two-point Steklov eigenvalue {l} from a nonnegative potential"
            )));
        }
    }
    Ok(TwoPointEigen {
        values: [l0.max(0.0), l1.max(0.0)],
        boundary_traces: [v0, v1],
    })
}

/// Number of eigenvalues of the tridiagonal pencil (K, M) below `tau`,
/// by counting negative pivots of the LDL^T of K - tau M.
fn sturm_count(k: &Tridiag, m: &Tridiag, tau: f64) -> usize {
    let n = k.diag.len();
    let pivmin = 1e-300;
    let mut count = 0;
    let mut d = k.diag[0] - tau * m.diag[0];
    if d.abs() < pivmin {
        d = -pivmin;
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let b = k.off[i - 1] - tau * m.off[i - 1];
        let mut next = (k.diag[i] - tau * m.diag[i]) - b * b / d;
        if next.abs() < pivmin {
            next = -pivmin;
        }
        if next < 0.0 {
            count += 1;
        }
        d = next;
    }
    count
}

/// First nonzero Neumann eigenvalue of -(w a')' = eta w a ... reduced to
/// -(a')' = eta a on an interval of the given length (unit coefficients:
/// the gap of the undeformed product metric). Returns ~ (pi / length)^2.
pub fn neumann_gap_interval(length: f64, cells: usize) -> Result<f64> {
    if !(length > 0.0) {
        return Err(SteklovError::Domain(format!(
            "degenerate interval of length {length}"
        )));
    }
    if cells < 64 {
        return Err(SteklovError::Domain(format!(
            "need at least 64 cells for the Neumann gap, got {cells}"
        )));
    }
    let h = length / cells as f64;
    let n = cells + 1;
    let mut k = Tridiag {
        diag: vec![0.0; n],
        off: vec![0.0; n - 1],
    };
    let mut m = Tridiag {
        diag: vec![0.0; n],
        off: vec![0.0; n - 1],
    };
    for e in 0..cells {
        k.diag[e] += 1.0 / h;
        k.diag[e + 1] += 1.0 / h;
        k.off[e] += -1.0 / h;
        m.diag[e] += h / 3.0;
        m.diag[e + 1] += h / 3.0;
        m.off[e] += h / 6.0;
    }
    // Upper bound from weak row-diagonal dominance of M (gap >= h/3 per row).
    let hi = k
        .diag
        .iter()
        .enumerate()
        .map(|(i, &kd)| {
            let row_k = kd
                + if i > 0 { k.off[i - 1].abs() } else { 0.0 }
                + if i < n - 1 { k.off[i].abs() } else { 0.0 };
            row_k / (h / 3.0)
        })
        .fold(0.0, f64::max)
        + 1.0;
    let mut lo = 0.0_f64;
    let mut hi = hi;
    // second-smallest eigenvalue: smallest tau with count(tau) >= 2
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(&k, &m, mid) >= 2 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Convenience wrapper: reduced problem with constant coefficients.
pub fn constant_problem(
    w: f64,
    q: f64,
    length: f64,
    grid_size: usize,
    right_bc: RightBc,
) -> ReducedModeProblem {
    ReducedModeProblem {
        length,
        flux_weight: CoefficientFn::constant(w),
        potential: CoefficientFn::constant(q),
        left_mass: 1.0,
        right_bc,
        grid_size,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_potential_pair_is_linear_solutions() {
        for length in [0.5, 1.0, 2.0] {
            let p = constant_problem(1.0, 0.0, length, 2048, RightBc::Steklov { boundary_mass: 1.0 });
            let eig = two_point_eigen(&p).unwrap();
            assert!(eig.values[0].abs() < 1e-10);
            assert!(
                (eig.values[1] - 2.0 / length).abs() < 1e-8,
                "L={length}: {:?}",
                eig.values
            );
        }
    }

    #[test]
    fn constant_potential_pair_matches_tanh_coth() {
        for k in [1.0f64, 2.0, 3.0] {
            let length = 1.0;
            let p = constant_problem(
                1.0,
                k * k,
                length,
                2048,
                RightBc::Steklov { boundary_mass: 1.0 },
            );
            let eig = two_point_eigen(&p).unwrap();
            let even = k * (k * length / 2.0).tanh();
            let odd = k / (k * length / 2.0).tanh();
            assert!(
                (eig.values[0] - even).abs() < 1e-6,
                "k={k}: {} vs {even}",
                eig.values[0]
            );
            assert!(
                (eig.values[1] - odd).abs() < 1e-6,
                "k={k}: {} vs {odd}",
                eig.values[1]
            );
        }
    }

    #[test]
    fn symmetric_problem_has_even_odd_traces() {
        let p = constant_problem(1.0, 4.0, 1.0, 1024, RightBc::Steklov { boundary_mass: 1.0 });
        let eig = two_point_eigen(&p).unwrap();
        let [e0, e1] = eig.boundary_traces;
        // ground state even: a(0) = a(L); first excited odd: a(0) = -a(L)
        assert!((e0[0] - e0[1]).abs() < 1e-9, "{e0:?}");
        assert!((e1[0] + e1[1]).abs() < 1e-9, "{e1:?}");
    }

    #[test]
    fn grid_convergence_is_second_order() {
        let exact = 2.0 * (2.0f64 * 0.5).tanh(); // k=2, L=1, even branch
        let err = |cells: usize| {
            let p = constant_problem(1.0, 4.0, 1.0, cells, RightBc::Steklov { boundary_mass: 1.0 });
            (two_point_eigen(&p).unwrap().values[0] - exact).abs()
        };
        let e1 = err(128);
        let e2 = err(256);
        let ratio = e1 / e2;
        assert!(
            (3.2..=4.8).contains(&ratio),
            "convergence ratio {ratio} (errors {e1}, {e2})"
        );
    }

    #[test]
    fn neumann_gap_interval_matches_pi_squared() {
        for length in [0.5f64, 1.0, 2.0] {
            let gap = neumann_gap_interval(length, 2048).unwrap();
            let exact = (std::f64::consts::PI / length).powi(2);
            assert!(
                (gap - exact).abs() < 1e-5 * exact,
                "L={length}: {gap} vs {exact}"
            );
        }
    }

    #[test]
    fn degenerate_interval_is_domain_error() {
        assert!(matches!(
            neumann_gap_interval(0.0, 2048),
            Err(SteklovError::Domain(_))
        ));
    }
}
