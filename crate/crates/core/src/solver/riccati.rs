//! Dirichlet-to-Neumann values of the reduced 1D problems via backward
//! Riccati integration.
//!
//! The per-mode equation (w a')' = q a is non-oscillatory for q >= 0 but
//! its decaying solution grows like exp(sqrt(q) t) backwards, which
//! overflows for the stiff collar potentials. The logarithmic-derivative
//! variable r = w a'/a stays bounded and solves r' = q - r^2 / w; where
//! |r| leaves the unit ball we integrate the reciprocal rho = 1/r
//! instead (rho' = 1/w - q rho^2), so Dirichlet data r = -inf is just
//! rho = 0. Integration runs from t = L down to t = 0 with an adaptive
//! Dormand-Prince 5(4) scheme, split at coefficient breakpoints.

use crate::error::{Result, SteklovError};
use crate::solver::{ReducedModeProblem, RightBc};

/// Default relative tolerance of the adaptive integrator.
pub const RICCATI_REL_TOL: f64 = 1e-10;
const ABS_TOL: f64 = 1e-13;
const MAX_STEPS: usize = 4_000_000;

#[derive(Clone, Copy, PartialEq)]
enum Chart {
    /// y = r = w a' / a
    LogDerivative,
    /// y = rho = 1/r
    Reciprocal,
}

struct RiccatiField<'a> {
    problem: &'a ReducedModeProblem,
}

impl RiccatiField<'_> {
    /// Right-hand side in the backward variable s = L - t.
    fn rhs(&self, chart: Chart, s: f64, y: f64) -> Result<f64> {
        let t = (self.problem.length - s).max(0.0);
        let w = self.problem.flux_weight.eval(t);
        let q = self.problem.potential.eval(t);
        if !w.is_finite() || !q.is_finite() || w <= 0.0 {
            return Err(SteklovError::Numeric(format!(
                "non-finite or non-positive coefficients at t = {t}: w = {w}, q = {q}"
            )));
        }
        Ok(match chart {
            Chart::LogDerivative => y * y / w - q,
            Chart::Reciprocal => q * y * y - 1.0 / w,
        })
    }
}

/// One adaptive Dormand-Prince 5(4) step; returns (y5, error_estimate).
fn dp54_step(
    field: &RiccatiField,
    chart: Chart,
    s: f64,
    y: f64,
    h: f64,
    k1: f64,
) -> Result<(f64, f64, f64)> {
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    const E1: f64 = 5179.0 / 57600.0;
    const E3: f64 = 7571.0 / 16695.0;
    const E4: f64 = 393.0 / 640.0;
    const E5: f64 = -92097.0 / 339200.0;
    const E6: f64 = 187.0 / 2100.0;
    const E7: f64 = 1.0 / 40.0;

    let k2 = field.rhs(chart, s + 0.2 * h, y + h * A21 * k1)?;
    let k3 = field.rhs(chart, s + 0.3 * h, y + h * (A31 * k1 + A32 * k2))?;
    let k4 = field.rhs(chart, s + 0.8 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3))?;
    let k5 = field.rhs(
        chart,
        s + 8.0 / 9.0 * h,
        y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4),
    )?;
    let k6 = field.rhs(
        chart,
        s + h,
        y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
    )?;
    let y5 = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    let k7 = field.rhs(chart, s + h, y5)?;
    let y4 = y + h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    Ok((y5, y5 - y4, k7))
}

/// Integrate the Riccati variable from s0 to s1 within one smooth piece.
fn integrate_piece(
    field: &RiccatiField,
    chart: &mut Chart,
    y: &mut f64,
    s0: f64,
    s1: f64,
    steps_used: &mut usize,
) -> Result<()> {
    let span = s1 - s0;
    if span <= 0.0 {
        return Ok(());
    }
    let mut s = s0;
    let mut h = (span * 1e-3).min(span);
    let mut k1 = field.rhs(*chart, s, *y)?;
    while s < s1 {
        if *steps_used > MAX_STEPS {
            return Err(SteklovError::Numeric(format!(
                "Riccati integration exceeded {MAX_STEPS} steps at t = {}",
                field.problem.length - s
            )));
        }
        *steps_used += 1;
        h = h.min(s1 - s);
        let (y_new, err, k_last) = dp54_step(field, *chart, s, *y, h, k1)?;
        let scale = ABS_TOL + RICCATI_REL_TOL * y.abs().max(y_new.abs());
        let err_ratio = (err / scale).abs();
        if err_ratio <= 1.0 || h <= 1e-14 * span {
            s += h;
            *y = y_new;
            k1 = k_last;
            if !y.is_finite() {
                return Err(SteklovError::Numeric(format!(
                    "Riccati state diverged at t = {}",
                    field.problem.length - s
                )));
            }
            // Keep the integrated variable in the unit ball by swapping
            // between r and 1/r; both charts are exact reformulations.
            if y.abs() > 1.0 {
                *y = 1.0 / *y;
                *chart = match *chart {
                    Chart::LogDerivative => Chart::Reciprocal,
                    Chart::Reciprocal => Chart::LogDerivative,
                };
                k1 = field.rhs(*chart, s, *y)?;
            }
        }
        let grow = if err_ratio > 0.0 {
            (0.9 * err_ratio.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= grow;
    }
    Ok(())
}

/// Steklov value of a reduced problem closed by a Neumann or Dirichlet
/// condition at t = L: sigma = -r(0) / boundary_mass.
pub fn dtn_value(problem: &ReducedModeProblem) -> Result<f64> {
    problem.validate()?;
    let (mut chart, mut y) = match problem.right_bc {
        RightBc::Neumann => (Chart::LogDerivative, 0.0),
        RightBc::Dirichlet => (Chart::Reciprocal, 0.0),
        RightBc::Steklov { .. } => {
            return Err(SteklovError::Config(
                "dtn_value handles Neumann or Dirichlet far ends; \
                 use mode_eigenvalues for two-point Steklov problems"
                    .into(),
            ))
        }
    };
    let field = RiccatiField { problem };
    let length = problem.length;

    // Split at coefficient breakpoints (mapped to the backward variable).
    let mut cuts: Vec<f64> = problem
        .flux_weight
        .breakpoints()
        .iter()
        .chain(problem.potential.breakpoints())
        .filter(|&&t| t > 0.0 && t < length)
        .map(|&t| length - t)
        .collect();
    cuts.push(0.0);
    cuts.push(length);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * length.max(1.0));

    let mut steps = 0usize;
    for pair in cuts.windows(2) {
        integrate_piece(&field, &mut chart, &mut y, pair[0], pair[1], &mut steps)?;
    }

    let r0 = match chart {
        Chart::LogDerivative => y,
        Chart::Reciprocal => {
            if y.abs() < 1e-300 {
                return Err(SteklovError::Numeric(
                    "Riccati variable degenerate at the Steklov end".into(),
                ));
            }
            1.0 / y
        }
    };
    let sigma = -r0 / problem.left_mass;
    if sigma < -1e-8 * sigma.abs().max(1.0) {
        return Err(SteklovError::Numeric(format!(
            "negative Steklov value {sigma} from a nonnegative potential"
        )));
    }
    Ok(sigma.max(0.0))
}
