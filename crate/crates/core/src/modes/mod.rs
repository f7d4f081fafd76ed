//! Spectral data of the boundary cross-sections.
//!
//! A [`BoundaryFamily`] enumerates Laplace modes of the cross-section
//! (Sigma, g_Sigma) whose eigenfunctions do not depend on the family
//! parameter t, so a collar problem separates into independent 1D
//! problems indexed by these modes. The circle and flat torus have
//! t-independent eigenvalues; the Berger 3-sphere family
//! t^{-1} g + (t^2 - t^{-1}) eta (x) eta rescales the round metric along
//! the Hopf fiber and carries the t-dependent eigenvalue map
//! mu(t; k, m) = t (k(k+2) - m^2) + m^2 / t^2.

pub mod oracle;

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Result, SteklovError};

/// Default ceiling on the number of enumerated mode entries.
pub const DEFAULT_MODE_BUDGET: usize = 100_000;

/// Family-specific mode tag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ModeLabel {
    /// Circle frequency k >= 0.
    Circle(u32),
    /// Canonical torus frequency vector (first nonzero entry positive).
    Torus(Vec<i64>),
    /// Berger pair (degree k, fiber weight m).
    Berger(u32, i32),
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeLabel::Circle(k) => write!(f, "circle({k})"),
            ModeLabel::Torus(v) => {
                write!(f, "torus(")?;
                for (i, k) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{k}")?;
                }
                write!(f, ")")
            }
            ModeLabel::Berger(k, m) => write!(f, "berger({k},{m})"),
        }
    }
}

/// Eigenvalue of a mode as a function of the family parameter t.
#[derive(Debug, Clone, PartialEq)]
pub enum EigenvalueMap {
    /// t-independent families.
    Constant(f64),
    /// Berger family map mu(t; k, m).
    Berger { degree: u32, weight: i32 },
}

impl EigenvalueMap {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            EigenvalueMap::Constant(v) => *v,
            EigenvalueMap::Berger { degree, weight } => {
                berger_mu_unchecked(*degree, *weight, t)
            }
        }
    }
}

/// One cross-section Laplace mode shared by all collar problems.
#[derive(Debug, Clone)]
pub struct Mode {
    /// Position in the deterministic enumeration order.
    pub id: usize,
    pub label: ModeLabel,
    /// Dimension of the eigenspace this entry stands for.
    pub multiplicity: usize,
    /// Boundary-component tag (all shipped families are connected).
    pub component: usize,
    pub eigenvalue: EigenvalueMap,
}

impl Mode {
    /// Eigenvalue at family parameter t.
    pub fn mu(&self, t: f64) -> f64 {
        self.eigenvalue.at(t)
    }

    /// Eigenvalue at the reference parameter t = 1.
    pub fn mu1(&self) -> f64 {
        self.mu(1.0)
    }
}

/// Boundary cross-section family.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryFamily {
    Circle { radius: f64 },
    FlatTorus { edges: Vec<f64> },
    BergerS3,
}

impl BoundaryFamily {
    /// Dimension of the cross-section.
    pub fn dim(&self) -> usize {
        match self {
            BoundaryFamily::Circle { .. } => 1,
            BoundaryFamily::FlatTorus { edges } => edges.len(),
            BoundaryFamily::BergerS3 => 3,
        }
    }

    /// |Sigma| under the t-independent volume form.
    pub fn total_volume(&self) -> f64 {
        match self {
            BoundaryFamily::Circle { radius } => 2.0 * PI * radius,
            BoundaryFamily::FlatTorus { edges } => edges.iter().product(),
            BoundaryFamily::BergerS3 => 2.0 * PI * PI,
        }
    }

    /// Volumes of the connected components (all families are connected).
    pub fn component_volumes(&self) -> Vec<f64> {
        vec![self.total_volume()]
    }

    /// Whether mode eigenvalues depend on the family parameter.
    pub fn t_dependent(&self) -> bool {
        matches!(self, BoundaryFamily::BergerS3)
    }

    /// First nonzero eigenvalue at t = 1.
    pub fn lambda2(&self) -> f64 {
        match self {
            BoundaryFamily::Circle { radius } => radius.powi(-2),
            BoundaryFamily::FlatTorus { edges } => {
                let lmax = edges.iter().cloned().fold(f64::MIN, f64::max);
                4.0 * PI * PI / (lmax * lmax)
            }
            BoundaryFamily::BergerS3 => 3.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BoundaryFamily::Circle { radius } if !(*radius > 0.0) => Err(SteklovError::Config(
                format!("circle radius must be positive, got {radius}"),
            )),
            BoundaryFamily::FlatTorus { edges }
                if edges.is_empty() || edges.len() > 3 || edges.iter().any(|l| !(*l > 0.0)) =>
            {
                Err(SteklovError::Config(format!(
                    "flat torus needs 1..=3 positive edge lengths, got {edges:?}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// All modes with mu(1) <= cap, sorted by (mu(1), label), ids assigned
    /// in enumeration order.
    pub fn enumerate_modes(&self, cap: f64, budget: usize) -> Result<Vec<Mode>> {
        if !(cap > 0.0) {
            return Err(SteklovError::Domain(format!(
                "mode cap must be positive, got {cap}"
            )));
        }
        self.validate()?;
        let mut raw: Vec<(f64, ModeLabel, usize, EigenvalueMap)> = Vec::new();
        let push = |entry: (f64, ModeLabel, usize, EigenvalueMap),
                        raw: &mut Vec<(f64, ModeLabel, usize, EigenvalueMap)>|
         -> Result<()> {
            raw.push(entry);
            if raw.len() > budget {
                return Err(SteklovError::Resource(format!(
                    "mode enumeration exceeded the budget of {budget} entries; \
                     lower the eigenvalue cap or raise the budget"
                )));
            }
            Ok(())
        };
        match self {
            BoundaryFamily::Circle { radius } => {
                let mut k = 0u32;
                loop {
                    let mu = (k as f64 / radius).powi(2);
                    if mu > cap {
                        break;
                    }
                    let mult = if k == 0 { 1 } else { 2 };
                    push(
                        (mu, ModeLabel::Circle(k), mult, EigenvalueMap::Constant(mu)),
                        &mut raw,
                    )?;
                    k += 1;
                }
            }
            BoundaryFamily::FlatTorus { edges } => {
                let bounds: Vec<i64> = edges
                    .iter()
                    .map(|l| (l * cap.sqrt() / (2.0 * PI)).floor() as i64)
                    .collect();
                let mut vec = vec![0i64; edges.len()];
                enumerate_lattice(&bounds, 0, &mut vec, &mut |v: &[i64]| -> Result<()> {
                    if !is_canonical(v) {
                        return Ok(());
                    }
                    let mu = torus_eigenvalue(edges, v);
                    if mu > cap {
                        return Ok(());
                    }
                    let mult = if v.iter().all(|&k| k == 0) { 1 } else { 2 };
                    push(
                        (
                            mu,
                            ModeLabel::Torus(v.to_vec()),
                            mult,
                            EigenvalueMap::Constant(mu),
                        ),
                        &mut raw,
                    )
                })?;
            }
            BoundaryFamily::BergerS3 => {
                let mut k = 0u32;
                loop {
                    let mu1 = (k * (k + 2)) as f64;
                    if mu1 > cap {
                        break;
                    }
                    let mut m = -(k as i32);
                    while m <= k as i32 {
                        push(
                            (
                                mu1,
                                ModeLabel::Berger(k, m),
                                (k + 1) as usize,
                                EigenvalueMap::Berger { degree: k, weight: m },
                            ),
                            &mut raw,
                        )?;
                        m += 2;
                    }
                    k += 1;
                }
            }
        }
        raw.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap()
                .then_with(|| a.1.cmp(&b.1))
        });
        Ok(raw
            .into_iter()
            .enumerate()
            .map(|(id, (_, label, multiplicity, eigenvalue))| Mode {
                id,
                label,
                multiplicity,
                component: 0,
                eigenvalue,
            })
            .collect())
    }
}

fn torus_eigenvalue(edges: &[f64], k: &[i64]) -> f64 {
    let s: f64 = edges
        .iter()
        .zip(k)
        .map(|(l, &ki)| (ki as f64 / l).powi(2))
        .sum();
    4.0 * PI * PI * s
}

/// Canonical representative of the +-k pair: first nonzero entry positive.
fn is_canonical(v: &[i64]) -> bool {
    match v.iter().find(|&&k| k != 0) {
        Some(&k) => k > 0,
        None => true,
    }
}

fn enumerate_lattice<F: FnMut(&[i64]) -> Result<()>>(
    bounds: &[i64],
    axis: usize,
    current: &mut Vec<i64>,
    visit: &mut F,
) -> Result<()> {
    if axis == bounds.len() {
        return visit(current);
    }
    for k in -bounds[axis]..=bounds[axis] {
        current[axis] = k;
        enumerate_lattice(bounds, axis + 1, current, visit)?;
    }
    Ok(())
}

fn berger_mu_unchecked(k: u32, m: i32, t: f64) -> f64 {
    let kk = k as f64;
    let mm = m as f64;
    t * (kk * (kk + 2.0) - mm * mm) + mm * mm / (t * t)
}

/// Laplace eigenvalue of the Berger family for the mode (k, m):
/// mu(t; k, m) = t (k(k+2) - m^2) + m^2 / t^2, with mu(1) = k(k+2).
pub fn berger_mu(k: u32, m: i32, t: f64) -> Result<f64> {
    if m.unsigned_abs() > k || (k as i64 - m as i64) % 2 != 0 {
        return Err(SteklovError::Domain(format!(
            "berger mode needs |m| <= k and k - m even, got (k, m) = ({k}, {m})"
        )));
    }
    if !(t > 0.0) {
        return Err(SteklovError::Domain(format!(
            "berger family parameter must be positive, got t = {t}"
        )));
    }
    Ok(berger_mu_unchecked(k, m, t))
}

/// First nonzero eigenvalue of the Berger family at parameter t >= 1.
///
/// Minimizes mu(t; k, m) over nonzero modes. Since
/// mu(t; k, m) >= 2kt for t >= 1 (the m-linear part is minimized at
/// m = +-k), the search stops once 2(k+1)t exceeds the current minimum,
/// which certifies that no unexplored mode can win.
pub fn lambda2_bleecker(t: f64) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(SteklovError::Domain(format!(
            "lambda_2 bound is stated for t >= 1, got {t}"
        )));
    }
    let mut best = f64::INFINITY;
    let mut k = 1u32;
    loop {
        let mut m = -(k as i32);
        while m <= k as i32 {
            best = best.min(berger_mu_unchecked(k, m, t));
            m += 2;
        }
        if 2.0 * (k as f64 + 1.0) * t > best {
            return Ok(best);
        }
        k += 1;
    }
}

/// Sharp linear coefficient delta with lambda_2(t) >= delta t for the
/// Berger family: the winning mode (1, +-1) gives lambda_2(t) = 2t + t^-2.
pub fn bleecker_sharp_delta() -> f64 {
    2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu1_list(modes: &[Mode]) -> Vec<f64> {
        modes
            .iter()
            .flat_map(|m| std::iter::repeat(m.mu1()).take(m.multiplicity))
            .collect()
    }

    #[test]
    fn circle_enumeration_matches_squares() {
        let fam = BoundaryFamily::Circle { radius: 1.0 };
        let modes = fam.enumerate_modes(4.5, DEFAULT_MODE_BUDGET).unwrap();
        assert_eq!(mu1_list(&modes), vec![0.0, 1.0, 1.0, 4.0, 4.0]);
    }

    #[test]
    fn unit_torus_below_first_gap_has_only_zero_mode() {
        let fam = BoundaryFamily::FlatTorus {
            edges: vec![1.0, 1.0],
        };
        let modes = fam.enumerate_modes(0.5, DEFAULT_MODE_BUDGET).unwrap();
        assert_eq!(modes.len(), 1);
        assert_eq!(modes[0].label, ModeLabel::Torus(vec![0, 0]));
        assert_eq!(modes[0].multiplicity, 1);
        assert_eq!(modes[0].mu1(), 0.0);
    }

    #[test]
    fn berger_enumeration_first_shell() {
        let fam = BoundaryFamily::BergerS3;
        let modes = fam.enumerate_modes(3.5, DEFAULT_MODE_BUDGET).unwrap();
        let labels: Vec<_> = modes.iter().map(|m| m.label.clone()).collect();
        assert_eq!(
            labels,
            vec![
                ModeLabel::Berger(0, 0),
                ModeLabel::Berger(1, -1),
                ModeLabel::Berger(1, 1)
            ]
        );
        let total: usize = modes.iter().skip(1).map(|m| m.multiplicity).sum();
        assert_eq!(total, 4);
        assert!(modes.iter().skip(1).all(|m| m.mu1() == 3.0));
    }

    #[test]
    fn berger_mu_examples() {
        assert_eq!(berger_mu(1, 1, 1.0).unwrap(), 3.0);
        assert_eq!(berger_mu(0, 0, 7.3).unwrap(), 0.0);
        assert!((berger_mu(1, 1, 10.0).unwrap() - 20.01).abs() < 1e-12);
        assert!(matches!(berger_mu(2, 1, 1.0), Err(SteklovError::Domain(_))));
        assert!(matches!(berger_mu(1, 2, 1.0), Err(SteklovError::Domain(_))));
    }

    #[test]
    fn lambda2_matches_winning_mode() {
        assert_eq!(lambda2_bleecker(1.0).unwrap(), 3.0);
        assert!((lambda2_bleecker(10.0).unwrap() - 20.01).abs() < 1e-12);
        assert!((lambda2_bleecker(1000.0).unwrap() - 2000.000001).abs() < 1e-9);
        assert!(matches!(lambda2_bleecker(0.5), Err(SteklovError::Domain(_))));
    }

    #[test]
    fn lambda2_linear_lower_bound_on_log_grid() {
        for i in 0..=50 {
            let t = 10f64.powf(3.0 * i as f64 / 50.0);
            let l2 = lambda2_bleecker(t).unwrap();
            assert!(l2 >= 2.0 * t, "lambda_2({t}) = {l2} < 2t");
            let expected = 2.0 * t + t.powi(-2);
            assert!((l2 - expected).abs() <= 1e-12 * expected);
        }
    }

    #[test]
    fn mode_set_is_parameter_independent() {
        let fam = BoundaryFamily::BergerS3;
        let a = fam.enumerate_modes(35.0, DEFAULT_MODE_BUDGET).unwrap();
        let b = fam.enumerate_modes(35.0, DEFAULT_MODE_BUDGET).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.label, y.label);
            assert_eq!(x.multiplicity, y.multiplicity);
            // same boundary norm bookkeeping at t = 1 and t = 100
            assert!(x.mu(100.0) >= 0.0);
            assert_eq!(x.mu(100.0), y.mu(100.0));
        }
    }

    #[test]
    fn enumeration_is_sorted_and_budgeted() {
        let fam = BoundaryFamily::FlatTorus {
            edges: vec![1.0, 2.0],
        };
        let modes = fam.enumerate_modes(500.0, DEFAULT_MODE_BUDGET).unwrap();
        for w in modes.windows(2) {
            assert!(w[0].mu1() <= w[1].mu1());
        }
        let err = fam.enumerate_modes(500.0, 3).unwrap_err();
        assert!(matches!(err, SteklovError::Resource(_)));
        assert!(err.to_string().contains("budget of 3"));
    }

    /// Independent double-loop lattice enumeration, including both k and -k.
    #[test]
    fn torus_matches_direct_lattice_enumeration() {
        let edges = vec![1.0, 1.5];
        let cap = 300.0;
        let fam = BoundaryFamily::FlatTorus {
            edges: edges.clone(),
        };
        let modes = fam.enumerate_modes(cap, DEFAULT_MODE_BUDGET).unwrap();
        let mut expanded = mu1_list(&modes);
        expanded.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let mut direct = Vec::new();
        let b0 = (edges[0] * cap.sqrt() / (2.0 * PI)).ceil() as i64 + 1;
        let b1 = (edges[1] * cap.sqrt() / (2.0 * PI)).ceil() as i64 + 1;
        for k0 in -b0..=b0 {
            for k1 in -b1..=b1 {
                let mu = torus_eigenvalue(&edges, &[k0, k1]);
                if mu <= cap {
                    direct.push(mu);
                }
            }
        }
        direct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(expanded.len(), direct.len());
        for (a, b) in expanded.iter().zip(&direct) {
            assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        }
    }

    #[test]
    fn circle_matches_direct_enumeration() {
        let fam = BoundaryFamily::Circle { radius: 2.0 };
        let cap = 20.0;
        let modes = fam.enumerate_modes(cap, DEFAULT_MODE_BUDGET).unwrap();
        let mut expanded = mu1_list(&modes);
        expanded.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut direct = Vec::new();
        let kmax = (2.0 * cap.sqrt()).ceil() as i64 + 1;
        for k in -kmax..=kmax {
            let mu = (k as f64 / 2.0).powi(2);
            if mu <= cap {
                direct.push(mu);
            }
        }
        direct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(expanded, direct);
    }
}
