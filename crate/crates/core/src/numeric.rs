//! Small numerical utilities shared across the solvers: quadrature,
//! deterministic float formatting and symmetric 2x2 eigenvalues.

/// Nodes and weights of the 5-point Gauss-Legendre rule on [-1, 1].
///
/// Exact for polynomials of degree <= 9, which covers the quintic
/// transition pieces used by the collar profiles.
const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// Composite 5-point Gauss-Legendre quadrature of `f` on [a, b] with
/// `panels` equal subdivisions.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
            sum += w * f(mid + 0.5 * h * x);
        }
    }
    sum * 0.5 * h
}

/// Integrate over [a, b] split at the sorted `breakpoints`, so piecewise
/// definitions are never straddled by a quadrature panel.
pub fn gauss_legendre_split<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    panels_per_piece: usize,
) -> f64 {
    let mut cuts = vec![a];
    for &t in breakpoints {
        if t > a && t < b {
            cuts.push(t);
        }
    }
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut sum = 0.0;
    for w in cuts.windows(2) {
        sum += gauss_legendre(&f, w[0], w[1], panels_per_piece);
    }
    sum
}

/// Format `x` exactly like C's `%.12e` (12 fractional digits, signed
/// two-digit exponent), used for byte-deterministic CSV output.
pub fn fmt_e12(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let s = format!("{:.12e}", x);
    let (mant, exp) = s.split_once('e').expect("exponent in {:e} output");
    let (sign, digits) = match exp.strip_prefix('-') {
        Some(d) => ('-', d),
        None => ('+', exp),
    };
    if digits.len() >= 2 {
        format!("{mant}e{sign}{digits}")
    } else {
        format!("{mant}e{sign}0{digits}")
    }
}

/// Eigenvalues of a symmetric 2x2 matrix [[a, b], [b, c]], ascending.
pub fn sym2_eigenvalues(a: f64, b: f64, c: f64) -> (f64, f64) {
    let tr = a + c;
    let disc = ((a - c) * 0.5).hypot(b);
    (0.5 * tr - disc, 0.5 * tr + disc)
}

/// Generalized eigenvalues of the symmetric pencil (A, B) with B SPD,
/// for 2x2 matrices; returns eigenvalues ascending with eigenvectors.
pub fn sym2_generalized(a: [[f64; 2]; 2], d: [f64; 2]) -> ((f64, [f64; 2]), (f64, [f64; 2])) {
    let s0 = d[0].sqrt();
    let s1 = d[1].sqrt();
    // C = D^{-1/2} A D^{-1/2}
    let c00 = a[0][0] / (s0 * s0);
    let c01 = a[0][1] / (s0 * s1);
    let c11 = a[1][1] / (s1 * s1);
    let (l0, l1) = sym2_eigenvalues(c00, c01, c11);
    let vec_for = |l: f64| -> [f64; 2] {
        // eigenvector of C, mapped back through D^{-1/2}
        let (vx, vy) = if (c00 - l).abs() >= (c11 - l).abs() {
            (-c01, c00 - l)
        } else {
            (c11 - l, -c01)
        };
        let (vx, vy) = if vx.abs() + vy.abs() == 0.0 {
            (1.0, 0.0)
        } else {
            (vx, vy)
        };
        let (ux, uy) = (vx / s0, vy / s1);
        let n = ux.hypot(uy);
        [ux / n, uy / n]
    };
    ((l0, vec_for(l0)), (l1, vec_for(l1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_exact_on_quintics() {
        let exact = 1.0 / 6.0;
        let got = gauss_legendre(|x| x.powi(5), 0.0, 1.0, 1);
        assert!((got - exact).abs() < 1e-15);
    }

    #[test]
    fn quadrature_split_handles_kinks() {
        // |x| on [-1, 1]: exact with a breakpoint at 0.
        let got = gauss_legendre_split(|x: f64| x.abs(), -1.0, 1.0, &[0.0], 1);
        assert!((got - 1.0).abs() < 1e-15);
    }

    #[test]
    fn e12_format_matches_printf() {
        assert_eq!(fmt_e12(0.0), "0.000000000000e+00");
        assert_eq!(fmt_e12(501.0), "5.010000000000e+02");
        assert_eq!(fmt_e12(-0.05), "-5.000000000000e-02");
        assert_eq!(fmt_e12(1.0e-12), "1.000000000000e-12");
        assert_eq!(fmt_e12(9.999999999999e99), "9.999999999999e+99");
    }

    #[test]
    fn sym2_pencil_recovers_plain_eigenvalues() {
        let ((l0, v0), (l1, v1)) = sym2_generalized([[2.0, 1.0], [1.0, 2.0]], [1.0, 1.0]);
        assert!((l0 - 1.0).abs() < 1e-14);
        assert!((l1 - 3.0).abs() < 1e-14);
        assert!((v0[0] + v0[1]).abs() < 1e-12); // odd
        assert!((v1[0] - v1[1]).abs() < 1e-12); // even
    }
}
