//! Separable collar problems reduced to weighted 1D Sturm-Liouville
//! problems, and the certified assembly of Steklov / mixed spectra.
//!
//! A collar is either a Bleecker cylinder (cross-section metric driven
//! through the Berger family by the boundary ramp, so modes see the
//! t-dependent potential mu(f(t))) or a conformally deformed product
//! cylinder (modes see the flux weight e^{(n-1) delta} and the potential
//! lambda e^{(n-1) delta}). Per-mode values come from Riccati
//! integration (one Steklov end) or a 1D finite-element Schur complement
//! (two Steklov ends); the spectrum assembler processes modes in
//! increasing mu(1) order and stops with a constant-coefficient
//! truncation certificate.

pub mod fem1d;
pub mod riccati;

use std::sync::Arc;

use crate::error::{Result, SteklovError};
use crate::modes::{BoundaryFamily, Mode, ModeLabel};
use crate::numeric::gauss_legendre_split;
use crate::profiles::{BleeckerRamp, ConformalStep, Profile, SmoothStep};

pub use fem1d::{neumann_gap_interval, two_point_eigen, TwoPointEigen};
pub use riccati::dtn_value;

/// Default number of P1 cells for the two-point and Neumann-gap solves.
pub const DEFAULT_GRID_SIZE: usize = 2048;

/// Scalar coefficient of a reduced problem, with the knots where its
/// piecewise definition changes.
#[derive(Clone)]
pub struct CoefficientFn {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    breakpoints: Vec<f64>,
}

impl CoefficientFn {
    pub fn new(eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>, breakpoints: Vec<f64>) -> Self {
        Self { eval, breakpoints }
    }

    pub fn constant(value: f64) -> Self {
        Self {
            eval: Arc::new(move |_| value),
            breakpoints: Vec::new(),
        }
    }

    /// Piecewise-constant coefficient: `values[i]` on the i-th of the
    /// equal subdivisions of [0, length].
    pub fn piecewise_constant(values: Vec<f64>, length: f64) -> Self {
        let n = values.len();
        let breakpoints = (1..n).map(|i| length * i as f64 / n as f64).collect();
        Self {
            eval: Arc::new(move |t| {
                let i = ((t / length * n as f64).floor() as usize).min(n - 1);
                values[i]
            }),
            breakpoints,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }
}

impl std::fmt::Debug for CoefficientFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoefficientFn")
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

/// Far-end closure of a reduced problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RightBc {
    Neumann,
    Dirichlet,
    Steklov { boundary_mass: f64 },
}

/// Weighted Sturm-Liouville problem for one cross-section mode:
/// (w a')' = q a on [0, L], Steklov at t = 0 with the given boundary
/// mass, and `right_bc` at t = L.
#[derive(Debug, Clone)]
pub struct ReducedModeProblem {
    pub length: f64,
    pub flux_weight: CoefficientFn,
    pub potential: CoefficientFn,
    pub left_mass: f64,
    pub right_bc: RightBc,
    pub grid_size: usize,
}

impl ReducedModeProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) {
            return Err(SteklovError::Config(format!(
                "collar length must be positive, got {}",
                self.length
            )));
        }
        if !(self.left_mass > 0.0) {
            return Err(SteklovError::Config(format!(
                "boundary mass must be positive, got {}",
                self.left_mass
            )));
        }
        if let RightBc::Steklov { boundary_mass } = self.right_bc {
            if !(boundary_mass > 0.0) {
                return Err(SteklovError::Config(format!(
                    "boundary mass must be positive, got {boundary_mass}"
                )));
            }
        }
        if self.grid_size < 64 {
            return Err(SteklovError::Config(format!(
                "grid_size must be at least 64, got {}",
                self.grid_size
            )));
        }
        Ok(())
    }
}

/// Conformal exponent delta(t) along the collar, possibly localized or
/// mirrored across the midpoint.
#[derive(Debug, Clone)]
pub enum ConformalFactor {
    /// delta = 0 (undeformed cylinder).
    Flat,
    /// Monotone step: 0 near the boundary, the amplitude past rise_end.
    Step(ConformalStep),
    /// Localized bump: the step multiplied by a smooth falloff back to 0.
    Window { step: ConformalStep, fall: SmoothStep },
    /// Profile applied in the depth coordinate from both ends.
    Symmetric { inner: Box<ConformalFactor>, length: f64 },
}

impl ConformalFactor {
    pub fn value(&self, t: f64) -> Result<f64> {
        match self {
            ConformalFactor::Flat => {
                if t < 0.0 {
                    return Err(SteklovError::Domain(format!(
                        "profile argument t = {t} must be >= 0"
                    )));
                }
                Ok(0.0)
            }
            ConformalFactor::Step(step) => step.eval(t),
            ConformalFactor::Window { step, fall } => {
                Ok(step.eval(t)? * (1.0 - fall.eval(t)?))
            }
            ConformalFactor::Symmetric { inner, length } => {
                inner.value(t.min(length - t).max(0.0))
            }
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            ConformalFactor::Flat => Vec::new(),
            ConformalFactor::Step(step) => step.breakpoints(),
            ConformalFactor::Window { step, fall } => {
                let mut b = step.breakpoints();
                b.extend(fall.breakpoints());
                b
            }
            ConformalFactor::Symmetric { inner, length } => {
                let mut b = inner.breakpoints();
                let mirrored: Vec<f64> = b.iter().map(|&t| length - t).collect();
                b.extend(mirrored);
                b.sort_by(|a, c| a.partial_cmp(c).unwrap());
                b
            }
        }
    }

    pub fn validate(&self, length: f64) -> Result<()> {
        match self {
            ConformalFactor::Flat => Ok(()),
            ConformalFactor::Step(step) => {
                if step.rise_end() > length {
                    return Err(SteklovError::Config(format!(
                        "conformal step rises until {} beyond the collar length {length}",
                        step.rise_end()
                    )));
                }
                Ok(())
            }
            ConformalFactor::Window { step, fall } => {
                if fall.lo() < step.rise_end() {
                    return Err(SteklovError::Config(format!(
                        "window falloff starts at {} before the rise ends at {}",
                        fall.lo(),
                        step.rise_end()
                    )));
                }
                if fall.hi() > length {
                    return Err(SteklovError::Config(format!(
                        "window falloff ends at {} beyond the collar length {length}",
                        fall.hi()
                    )));
                }
                Ok(())
            }
            ConformalFactor::Symmetric { inner, length: l } => {
                if (l - length).abs() > 1e-12 * length.max(1.0) {
                    return Err(SteklovError::Config(format!(
                        "symmetric factor built for length {l}, used on length {length}"
                    )));
                }
                inner.validate(length)?;
                let max_knot = inner
                    .breakpoints()
                    .into_iter()
                    .fold(0.0_f64, f64::max);
                if max_knot > 0.5 * length + 1e-12 {
                    return Err(SteklovError::Config(format!(
                        "symmetric factor must be constant past the midpoint; \
                         inner profile still varies at {max_knot} > {}",
                        0.5 * length
                    )));
                }
                Ok(())
            }
        }
    }
}

/// End condition at the deep end of a conformal cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndCondition {
    Neumann,
    Steklov,
}

/// Geometry of a separable collar problem.
#[derive(Debug, Clone)]
pub enum CollarKind {
    /// Cross-section driven through its one-parameter family by the
    /// boundary ramp; mixed problem with Neumann at the deep end.
    Bleecker { profile: BleeckerRamp, length: f64 },
    /// Product cylinder under a conformal factor e^{2 delta(t)}.
    Conformal {
        deformation: ConformalFactor,
        ambient_dim: usize,
        length: f64,
        right_end: EndCondition,
    },
}

/// A collar scenario: cross-section family plus collar geometry and
/// solver resolution knobs. Immutable once built.
#[derive(Debug, Clone)]
pub struct CollarScenario {
    pub family: BoundaryFamily,
    pub kind: CollarKind,
    /// Eigenvalue-at-t=1 ceiling for mode enumeration.
    pub mode_cap: f64,
    pub mode_budget: usize,
    pub grid_size: usize,
}

impl CollarScenario {
    pub fn length(&self) -> f64 {
        match &self.kind {
            CollarKind::Bleecker { length, .. } => *length,
            CollarKind::Conformal { length, .. } => *length,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if !(self.mode_cap > 0.0) {
            return Err(SteklovError::Config(format!(
                "mode cap must be positive, got {}",
                self.mode_cap
            )));
        }
        match &self.kind {
            CollarKind::Bleecker { length, .. } => {
                if !self.family.t_dependent() {
                    return Err(SteklovError::Config(
                        "a Bleecker collar needs a cross-section family with \
                         t-dependent eigenvalues (the Berger 3-sphere)"
                            .into(),
                    ));
                }
                if !(*length > 0.0) {
                    return Err(SteklovError::Config("collar length must be positive".into()));
                }
            }
            CollarKind::Conformal {
                deformation,
                ambient_dim,
                length,
                ..
            } => {
                if self.family.t_dependent() {
                    return Err(SteklovError::Config(
                        "a conformal cylinder needs a t-independent cross-section \
                         family (circle or flat torus)"
                            .into(),
                    ));
                }
                if *ambient_dim != self.family.dim() + 1 {
                    return Err(SteklovError::Config(format!(
                        "ambient dimension {} does not match cross-section dimension {} + 1",
                        ambient_dim,
                        self.family.dim()
                    )));
                }
                if !(*length > 0.0) {
                    return Err(SteklovError::Config("collar length must be positive".into()));
                }
                deformation.validate(*length)?;
                let at_boundary = deformation.value(0.0)?;
                if at_boundary.abs() > 1e-12 {
                    return Err(SteklovError::Config(format!(
                        "conformal factor must vanish at the Steklov boundary, \
                         got delta(0) = {at_boundary}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Reduce a scenario to the weighted 1D problem of one mode.
pub fn reduce(scenario: &CollarScenario, mode: &Mode) -> Result<ReducedModeProblem> {
    scenario.validate()?;
    match &scenario.kind {
        CollarKind::Bleecker { profile, length } => {
            let profile = profile.clone();
            let eigenvalue = mode.eigenvalue.clone();
            let breaks = profile.breakpoints();
            Ok(ReducedModeProblem {
                length: *length,
                flux_weight: CoefficientFn::constant(1.0),
                potential: CoefficientFn::new(
                    Arc::new(move |t| {
                        eigenvalue.at(profile.eval(t).expect("collar coordinate >= 0"))
                    }),
                    breaks,
                ),
                left_mass: 1.0,
                right_bc: RightBc::Neumann,
                grid_size: scenario.grid_size,
            })
        }
        CollarKind::Conformal {
            deformation,
            ambient_dim,
            length,
            right_end,
        } => {
            let n = ambient_dim - 1;
            let exponent = n as f64 - 1.0;
            let lambda = mode.mu1();
            let (flux_weight, potential) = if exponent == 0.0 {
                // dim M = 2: the reduced Dirichlet energy is conformally
                // invariant, so the weight is exactly 1.
                (
                    CoefficientFn::constant(1.0),
                    CoefficientFn::constant(lambda),
                )
            } else {
                let breaks = deformation.breakpoints();
                let d1 = deformation.clone();
                let d2 = deformation.clone();
                (
                    CoefficientFn::new(
                        Arc::new(move |t| {
                            (exponent * d1.value(t).expect("collar coordinate >= 0")).exp()
                        }),
                        breaks.clone(),
                    ),
                    CoefficientFn::new(
                        Arc::new(move |t| {
                            lambda
                                * (exponent * d2.value(t).expect("collar coordinate >= 0")).exp()
                        }),
                        breaks,
                    ),
                )
            };
            let right_bc = match right_end {
                EndCondition::Neumann => RightBc::Neumann,
                EndCondition::Steklov => RightBc::Steklov {
                    // boundary volume form of e^{2 delta} g scales by e^{n delta}
                    boundary_mass: (n as f64 * deformation.value(*length)?).exp(),
                },
            };
            Ok(ReducedModeProblem {
                length: *length,
                flux_weight,
                potential,
                left_mass: 1.0,
                right_bc,
                grid_size: scenario.grid_size,
            })
        }
    }
}

/// Provenance of one reported eigenvalue.
#[derive(Debug, Clone)]
pub struct SpectralValue {
    pub value: f64,
    pub label: ModeLabel,
    /// Which of the per-mode boundary eigenvalues this is (1 or 2).
    pub branch: u8,
    /// Multiplicity slot within the mode's eigenspace.
    pub slot: usize,
    mode_id: usize,
}

/// Sorted spectrum with a certified truncation bound: every eigenvalue
/// contributed by a mode outside the processed set exceeds
/// `truncation_bound`, and every reported value lies below it.
#[derive(Debug, Clone)]
pub struct SteklovSpectrum {
    pub values: Vec<SpectralValue>,
    pub truncation_bound: f64,
}

impl SteklovSpectrum {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.value).collect()
    }

    /// CSV dump (columns index, sigma, mode_label, multiplicity_slot,
    /// truncation_bound).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,sigma,mode_label,multiplicity_slot,truncation_bound\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}#{},{},{}\n",
                i + 1,
                crate::numeric::fmt_e12(v.value),
                v.label,
                v.branch,
                v.slot,
                crate::numeric::fmt_e12(self.truncation_bound)
            ));
        }
        out
    }
}

/// Pointwise lower bound for the potential of any not-yet-processed mode
/// with mu(1) >= mu1, over the whole collar.
fn unprocessed_potential_floor(scenario: &CollarScenario, mu1: f64) -> f64 {
    match &scenario.kind {
        // mu(f; k, m) >= 2k for every f >= 1, and mu(1) = k(k+2)
        CollarKind::Bleecker { .. } => 2.0 * ((mu1 + 1.0).max(1.0).sqrt() - 1.0),
        // delta >= 0, so q = lambda e^{(n-1) delta} >= lambda = mu(1)
        CollarKind::Conformal { .. } => mu1,
    }
}

/// Smallest eigenvalue of the constant-coefficient comparison problem
/// with w = 1 and the given potential floor; by coefficient monotonicity
/// this bounds every eigenvalue of every remaining mode from below.
fn comparison_lower_bound(scenario: &CollarScenario, q_floor: f64) -> f64 {
    if q_floor <= 0.0 {
        return 0.0;
    }
    let length = scenario.length();
    let k = q_floor.sqrt();
    match &scenario.kind {
        CollarKind::Bleecker { .. } => k * (k * length).tanh(),
        CollarKind::Conformal { right_end, .. } => match right_end {
            EndCondition::Neumann => k * (k * length).tanh(),
            EndCondition::Steklov => k * (k * length / 2.0).tanh(),
        },
    }
}

/// Assemble the k smallest Steklov (or mixed) eigenvalues of a scenario.
///
/// Modes are processed in increasing mu(1) order; once the comparison
/// bound for all remaining modes exceeds the current k-th smallest
/// value, the enumeration stops and the bound is recorded as the
/// truncation certificate. Sorting ties break by mode id and slot, so
/// the result is deterministic.
pub fn steklov_spectrum(scenario: &CollarScenario, count: usize) -> Result<SteklovSpectrum> {
    if count < 1 {
        return Err(SteklovError::Domain("requested count must be >= 1".into()));
    }
    scenario.validate()?;
    let modes = scenario
        .family
        .enumerate_modes(scenario.mode_cap, scenario.mode_budget)?;

    let mut found: Vec<SpectralValue> = Vec::new();
    let mut sorted_cache: Vec<f64> = Vec::new();
    let kth = |sorted: &[f64]| -> Option<f64> {
        (sorted.len() >= count).then(|| sorted[count - 1])
    };

    let mut certificate: Option<f64> = None;
    for mode in &modes {
        if let Some(current_kth) = kth(&sorted_cache) {
            let bound =
                comparison_lower_bound(scenario, unprocessed_potential_floor(scenario, mode.mu1()));
            if bound > current_kth {
                certificate = Some(bound);
                break;
            }
        }
        let problem = reduce(scenario, mode)?;
        let branch_values: Vec<(f64, u8)> = match problem.right_bc {
            RightBc::Steklov { .. } => {
                let eig = two_point_eigen(&problem)?;
                vec![(eig.values[0], 1), (eig.values[1], 2)]
            }
            _ => vec![(dtn_value(&problem)?, 1)],
        };
        for (value, branch) in branch_values {
            for slot in 0..mode.multiplicity {
                found.push(SpectralValue {
                    value,
                    label: mode.label.clone(),
                    branch,
                    slot,
                    mode_id: mode.id,
                });
            }
        }
        sorted_cache = found.iter().map(|v| v.value).collect();
        sorted_cache.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }

    let truncation_bound = match certificate {
        Some(bound) => bound,
        None => {
            // All enumerated modes processed; certify against the cap.
            let bound = comparison_lower_bound(
                scenario,
                unprocessed_potential_floor(scenario, scenario.mode_cap),
            );
            match kth(&sorted_cache) {
                Some(current_kth) if bound > current_kth => bound,
                _ => {
                    return Err(SteklovError::Resource(format!(
                        "mode cap {} exhausted before the truncation certificate \
                         covered {count} eigenvalues; increase mode_cap",
                        scenario.mode_cap
                    )))
                }
            }
        }
    };

    found.sort_by(|a, b| {
        a.value
            .partial_cmp(&b.value)
            .unwrap()
            .then(a.mode_id.cmp(&b.mode_id))
            .then(a.slot.cmp(&b.slot))
    });
    found.truncate(count);
    Ok(SteklovSpectrum {
        values: found,
        truncation_bound,
    })
}

/// Volume of the collar under the scenario metric.
///
/// The Bleecker family preserves the cross-section volume form (the
/// vertical factor f^n cancels the n horizontal factors f^-1), so the
/// volume is |Sigma| * L independent of the ramp; a conformal factor
/// scales the (n+1)-volume by e^{(n+1) delta}.
pub fn collar_volume(scenario: &CollarScenario) -> Result<f64> {
    scenario.validate()?;
    let sigma_vol = scenario.family.total_volume();
    match &scenario.kind {
        CollarKind::Bleecker { profile, length } => {
            let horizontal = scenario.family.dim() - 1;
            let p = profile.clone();
            let density = move |t: f64| {
                let f = p.eval(t).expect("collar coordinate >= 0");
                // sqrt(det) relative to t = 1: vertical f^n, horizontal f^-1 each
                (f.powi(horizontal as i32) * f.powi(-(horizontal as i32))).sqrt()
            };
            Ok(sigma_vol
                * gauss_legendre_split(density, 0.0, *length, &profile.breakpoints(), 64))
        }
        CollarKind::Conformal {
            deformation,
            ambient_dim,
            length,
            ..
        } => {
            let d = deformation.clone();
            let dim = *ambient_dim as f64;
            let density =
                move |t: f64| (dim * d.value(t).expect("collar coordinate >= 0")).exp();
            Ok(sigma_vol
                * gauss_legendre_split(density, 0.0, *length, &deformation.breakpoints(), 64))
        }
    }
}

/// First nonzero Neumann eigenvalue of the undeformed product
/// sub-cylinder Sigma x [t0, t1]: the smaller of the first nonzero
/// cross-section eigenvalue and the 1D interval gap (pi / (t1-t0))^2.
pub fn neumann_gap(scenario: &CollarScenario, t0: f64, t1: f64) -> Result<f64> {
    scenario.validate()?;
    if !(t0 >= 0.0 && t1 <= scenario.length() + 1e-12 && t1 > t0) {
        return Err(SteklovError::Domain(format!(
            "degenerate interval [{t0}, {t1}] within collar of length {}",
            scenario.length()
        )));
    }
    let axial = neumann_gap_interval(t1 - t0, scenario.grid_size)?;
    Ok(scenario.family.lambda2().min(axial))
}
