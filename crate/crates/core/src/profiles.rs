//! Collar profile functions.
//!
//! Three parametrized families of scalar profiles drive the collar
//! metrics: a polynomial smoothstep, the cubic-in-epsilon boundary ramp
//! used by the fixed-volume construction, and the logarithmic conformal
//! step. All profiles are exact on their closed-form pieces and use C^2
//! quintic transitions on the connecting intervals.

use crate::error::{Result, SteklovError};

/// Common evaluation interface for collar profiles.
pub trait Profile {
    /// Profile value at `t >= 0`.
    fn eval(&self, t: f64) -> Result<f64>;
    /// Exact derivative of [`Profile::eval`]; matches centered finite
    /// differences to O(h^2).
    fn eval_derivative(&self, t: f64) -> Result<f64>;
    /// Knots where the piecewise definition changes; integrators split
    /// their panels here.
    fn breakpoints(&self) -> Vec<f64>;
}

fn check_nonnegative(t: f64) -> Result<()> {
    if t < 0.0 || t.is_nan() {
        return Err(SteklovError::Domain(format!(
            "profile argument t = {t} must be >= 0"
        )));
    }
    Ok(())
}

fn binom(n: u64, k: u64) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Polynomial step rising from 0 at `lo` to 1 at `hi`.
///
/// `order` is the continuity class at the knots: the derivative and its
/// first `order - 1` derivatives vanish at both `lo` and `hi`. The
/// interpolant is the classical degree-(2N+1) smoothstep, strictly
/// increasing on (lo, hi).
#[derive(Debug, Clone)]
pub struct SmoothStep {
    lo: f64,
    hi: f64,
    order: u32,
    /// Coefficients of S_N(x) for powers x^(N+1) ... x^(2N+1).
    coeffs: Vec<f64>,
}

impl SmoothStep {
    pub fn new(lo: f64, hi: f64, order: u32) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(SteklovError::Config(format!(
                "smooth step needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        if !(2..=8).contains(&order) {
            return Err(SteklovError::Config(format!(
                "smooth step order must be in 2..=8, got {order}"
            )));
        }
        let n = order as u64;
        let coeffs = (0..=n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * binom(n + j, j) * binom(2 * n + 1, n - j)
            })
            .collect();
        Ok(Self {
            lo,
            hi,
            order,
            coeffs,
        })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// S_N on the normalized coordinate x in [0, 1].
    fn unit_value(&self, x: f64) -> f64 {
        let n = self.order as i32;
        // Horner over powers N+1 .. 2N+1: x^(N+1) * sum_j c_j x^j
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc * x.powi(n + 1)
    }

    fn unit_derivative(&self, x: f64) -> f64 {
        let n = self.order as i32;
        let mut acc = 0.0;
        for (j, &c) in self.coeffs.iter().enumerate().rev() {
            acc = acc * x + c * (n as f64 + 1.0 + j as f64);
        }
        acc * x.powi(n)
    }
}

impl Profile for SmoothStep {
    fn eval(&self, t: f64) -> Result<f64> {
        check_nonnegative(t)?;
        if t <= self.lo {
            Ok(0.0)
        } else if t >= self.hi {
            Ok(1.0)
        } else {
            Ok(self.unit_value((t - self.lo) / (self.hi - self.lo)))
        }
    }

    fn eval_derivative(&self, t: f64) -> Result<f64> {
        check_nonnegative(t)?;
        if t <= self.lo || t >= self.hi {
            Ok(0.0)
        } else {
            let w = self.hi - self.lo;
            Ok(self.unit_derivative((t - self.lo) / w) / w)
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.lo, self.hi]
    }
}

/// Boundary ramp 1 + eps^-3 t near t = 0, returning to the constant 1.
///
/// The profile is exactly `1 + eps^-3 t` on `[0, ramp_end)` and exactly 1
/// on `[plateau_start, inf)`. On the gap it follows the quintic Hermite
/// interpolant that matches value, slope and curvature on both sides, so
/// the profile is C^2 everywhere and stays >= 1 (the interpolant is a
/// nonnegative combination of `1 - S_2` and `s (1-s)^3 (3s+1)`).
#[derive(Debug, Clone)]
pub struct BleeckerRamp {
    epsilon: f64,
    ramp_end: f64,
    plateau_start: f64,
    eps_inv3: f64,
}

impl BleeckerRamp {
    pub fn new(epsilon: f64, ramp_end: f64, plateau_start: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(SteklovError::Config(format!(
                "bleecker ramp epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        if !(ramp_end > 0.0 && plateau_start > ramp_end) {
            return Err(SteklovError::Config(format!(
                "bleecker ramp needs 0 < ramp_end < plateau_start, got {ramp_end}, {plateau_start}"
            )));
        }
        Ok(Self {
            epsilon,
            ramp_end,
            plateau_start,
            eps_inv3: epsilon.powi(3).recip(),
        })
    }

    /// The profile with the default knots at 1 and 2.
    pub fn with_default_knots(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 1.0, 2.0)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn ramp_end(&self) -> f64 {
        self.ramp_end
    }

    pub fn plateau_start(&self) -> f64 {
        self.plateau_start
    }

    /// Certified upper bound for the profile value over all t.
    ///
    /// The Hermite gap polynomial R(1 - S_2(s)) + W s(1-s)^3(3s+1)
    /// is bounded by R + W/5, so max f <= 1 + eps^-3 (R + W/5).
    pub fn upper_bound(&self) -> f64 {
        let w = self.plateau_start - self.ramp_end;
        1.0 + self.eps_inv3 * (self.ramp_end + 0.2 * w)
    }

    /// Gap interpolant P and its derivative on the normalized coordinate.
    fn gap(&self, s: f64) -> (f64, f64) {
        let r = self.ramp_end;
        let w = self.plateau_start - self.ramp_end;
        let c3 = -(10.0 * r + 6.0 * w);
        let c4 = 15.0 * r + 8.0 * w;
        let c5 = -(6.0 * r + 3.0 * w);
        let p = r + s * (w + s * s * (c3 + s * (c4 + s * c5)));
        let dp = w + s * s * (3.0 * c3 + s * (4.0 * c4 + s * 5.0 * c5));
        (p, dp)
    }
}

impl Profile for BleeckerRamp {
    fn eval(&self, t: f64) -> Result<f64> {
        check_nonnegative(t)?;
        if t < self.ramp_end {
            Ok(1.0 + self.eps_inv3 * t)
        } else if t < self.plateau_start {
            let w = self.plateau_start - self.ramp_end;
            let (p, _) = self.gap((t - self.ramp_end) / w);
            Ok(1.0 + self.eps_inv3 * p)
        } else {
            Ok(1.0)
        }
    }

    fn eval_derivative(&self, t: f64) -> Result<f64> {
        check_nonnegative(t)?;
        if t < self.ramp_end {
            Ok(self.eps_inv3)
        } else if t < self.plateau_start {
            let w = self.plateau_start - self.ramp_end;
            let (_, dp) = self.gap((t - self.ramp_end) / w);
            Ok(self.eps_inv3 * dp / w)
        } else {
            Ok(0.0)
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.ramp_end, self.plateau_start]
    }
}

/// Conformal exponent profile: 0 near the boundary, a fixed amplitude
/// past `rise_end`, with a monotone quintic transition in between.
#[derive(Debug, Clone)]
pub struct ConformalStep {
    epsilon: f64,
    flat_width: f64,
    rise_end: f64,
    amplitude: f64,
    step: SmoothStep,
}

impl ConformalStep {
    pub fn new(epsilon: f64, flat_width: f64, rise_end: f64, amplitude: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(SteklovError::Config(format!(
                "conformal step epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        if !(flat_width >= 0.0 && rise_end > flat_width) {
            return Err(SteklovError::Config(format!(
                "conformal step needs 0 <= flat_width < rise_end, got {flat_width}, {rise_end}"
            )));
        }
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(SteklovError::Config(format!(
                "conformal step amplitude must be finite and >= 0, got {amplitude}"
            )));
        }
        let step = SmoothStep::new(flat_width, rise_end, 2)?;
        Ok(Self {
            epsilon,
            flat_width,
            rise_end,
            amplitude,
            step,
        })
    }

    /// Zero on [0, eps), amplitude -2 log(eps) past `rise_end`.
    pub fn with_default_amplitude(epsilon: f64, rise_end: f64) -> Result<Self> {
        Self::new(epsilon, epsilon, rise_end, -2.0 * epsilon.ln())
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn flat_width(&self) -> f64 {
        self.flat_width
    }

    pub fn rise_end(&self) -> f64 {
        self.rise_end
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }
}

impl Profile for ConformalStep {
    fn eval(&self, t: f64) -> Result<f64> {
        check_nonnegative(t)?;
        if t <= self.flat_width {
            Ok(0.0)
        } else if t >= self.rise_end {
            Ok(self.amplitude)
        } else {
            Ok(self.amplitude * self.step.eval(t)?)
        }
    }

    fn eval_derivative(&self, t: f64) -> Result<f64> {
        check_nonnegative(t)?;
        Ok(self.amplitude * self.step.eval_derivative(t)?)
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.flat_width, self.rise_end]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn bleecker_ramp_matches_closed_form() {
        let f = BleeckerRamp::with_default_knots(0.1).unwrap();
        assert!(rel_close(f.eval(0.5).unwrap(), 501.0, 1e-13));
        assert_eq!(f.eval(0.0).unwrap(), 1.0);
        assert_eq!(BleeckerRamp::with_default_knots(0.37).unwrap().eval(0.0).unwrap(), 1.0);
        assert_eq!(f.eval(2.0).unwrap(), 1.0);
        assert_eq!(f.eval(2.7).unwrap(), 1.0);
    }

    #[test]
    fn bleecker_ramp_derivative_closed_form() {
        let f = BleeckerRamp::with_default_knots(0.5).unwrap();
        assert_eq!(f.eval_derivative(0.3).unwrap(), 8.0);
        assert_eq!(f.eval_derivative(2.5).unwrap(), 0.0);
    }

    #[test]
    fn conformal_step_plateau_value() {
        let d = ConformalStep::with_default_amplitude(0.1, 0.5).unwrap();
        let amp = -2.0 * 0.1f64.ln();
        assert!((amp - 4.605_170_185_988_091).abs() < 1e-12);
        assert_eq!(d.eval(0.5).unwrap(), amp);
        assert_eq!(d.eval(3.0).unwrap(), amp);
        assert_eq!(d.eval(0.05).unwrap(), 0.0);
        assert_eq!(d.eval_derivative(0.05).unwrap(), 0.0);
    }

    #[test]
    fn smooth_step_knot_derivatives_vanish() {
        for order in 2..=4 {
            let s = SmoothStep::new(0.25, 1.5, order).unwrap();
            assert_eq!(s.eval_derivative(0.25).unwrap(), 0.0);
            assert_eq!(s.eval_derivative(1.5).unwrap(), 0.0);
            assert_eq!(s.eval(0.25).unwrap(), 0.0);
            assert_eq!(s.eval(1.5).unwrap(), 1.0);
        }
    }

    #[test]
    fn negative_argument_is_domain_error() {
        let f = BleeckerRamp::with_default_knots(0.3).unwrap();
        assert!(matches!(f.eval(-0.1), Err(SteklovError::Domain(_))));
        assert!(matches!(f.eval_derivative(-1e-9), Err(SteklovError::Domain(_))));
    }

    fn sample_profiles() -> Vec<(&'static str, Box<dyn Profile>)> {
        vec![
            (
                "bleecker(0.5)",
                Box::new(BleeckerRamp::with_default_knots(0.5).unwrap()),
            ),
            (
                "bleecker(0.2)",
                Box::new(BleeckerRamp::with_default_knots(0.2).unwrap()),
            ),
            (
                "conformal(0.2)",
                Box::new(ConformalStep::with_default_amplitude(0.2, 0.5).unwrap()),
            ),
            (
                "smooth(2)",
                Box::new(SmoothStep::new(0.1, 0.9, 2).unwrap()),
            ),
            (
                "smooth(4)",
                Box::new(SmoothStep::new(0.0, 2.0, 4).unwrap()),
            ),
        ]
    }

    #[test]
    fn derivative_matches_centered_differences() {
        let h = 1e-5;
        for (name, p) in sample_profiles() {
            for i in 0..=3000 {
                let t = 3.0 * i as f64 / 3000.0;
                let d = p.eval_derivative(t).unwrap();
                let lo = (t - h).max(0.0);
                let cd = (p.eval(t + h).unwrap() - p.eval(lo).unwrap()) / (t + h - lo);
                assert!(
                    (d - cd).abs() <= 1e-6 * d.abs().max(1.0),
                    "{name}: derivative mismatch at t={t}: {d} vs {cd}"
                );
            }
        }
    }

    #[test]
    fn bleecker_ramp_stays_at_least_one() {
        for eps in [0.4, 0.2, 0.1, 0.05] {
            let f = BleeckerRamp::with_default_knots(eps).unwrap();
            let ub = f.upper_bound();
            for i in 0..=10_000 {
                let t = 3.0 * i as f64 / 10_000.0;
                let v = f.eval(t).unwrap();
                assert!(v >= 1.0, "f_eps({t}) = {v} < 1 for eps = {eps}");
                assert!(v <= ub, "f_eps({t}) = {v} above certified bound {ub}");
            }
        }
    }

    #[test]
    fn conformal_step_is_nondecreasing() {
        let d = ConformalStep::with_default_amplitude(0.1, 0.6).unwrap();
        let mut prev = -1.0;
        for i in 0..=10_000 {
            let t = 2.0 * i as f64 / 10_000.0;
            let v = d.eval(t).unwrap();
            assert!(v + 1e-15 >= prev, "conformal step decreased at t={t}");
            assert!(v >= 0.0);
            prev = v;
        }
    }

    /// Second centered differences stay stable across the knots, which a
    /// mere C^1 join would fail by a factor-of-two blowup under step halving.
    #[test]
    fn transitions_are_c2_at_knots() {
        for (name, p) in sample_profiles() {
            for knot in p.breakpoints() {
                if knot <= 0.0 {
                    continue;
                }
                let d2 = |h: f64| {
                    (p.eval(knot + h).unwrap() - 2.0 * p.eval(knot).unwrap()
                        + p.eval(knot - h).unwrap())
                        / (h * h)
                };
                // A C^1-only kink makes the second difference double under
                // step halving; a C^2 join keeps it bounded.
                let coarse = d2(1e-3);
                let fine = d2(5e-4);
                assert!(
                    fine.abs() <= coarse.abs() + 0.05 * coarse.abs().max(1.0),
                    "{name}: second difference grows at knot {knot}: {coarse} vs {fine}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn smooth_step_strictly_increasing(
            lo in 0.0f64..2.0,
            width in 0.05f64..3.0,
            order in 2u32..=6,
            x in 0.001f64..0.999,
            dx in 0.001f64..0.5,
        ) {
            let s = SmoothStep::new(lo, lo + width, order).unwrap();
            let t0 = lo + width * x;
            let t1 = lo + width * (x + dx).min(0.9995);
            prop_assume!(t1 > t0);
            let v0 = s.eval(t0).unwrap();
            let v1 = s.eval(t1).unwrap();
            prop_assert!(v1 > v0, "not increasing: S({t0})={v0}, S({t1})={v1}");
            prop_assert!((0.0..=1.0).contains(&v0));
        }
    }
}
