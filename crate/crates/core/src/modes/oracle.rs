//! Brute-force verification oracle for the Berger-sphere weight
//! decomposition.
//!
//! Degree-k harmonic polynomials on R^4, written in the complex
//! coordinates (z1, z2) of C^2, restrict to the k-th Laplace eigenspace
//! of the round 3-sphere (eigenvalue k(k+2), dimension (k+1)^2). The
//! Hopf Killing field xi acts diagonally on the monomial basis
//! z1^a zbar1^b z2^c zbar2^d with weight m = a - b + c - d, so -xi xi
//! acts with eigenvalue m^2. The oracle computes, per weight m, the
//! kernel dimension of the Euclidean Laplacian restricted to the
//! weight-m monomials using exact fraction-free integer elimination,
//! and cross-checks the expected pattern: weights {-k, -k+2, ..., k},
//! each of multiplicity k + 1, summing to (k+1)^2.

use num_bigint::{BigInt, Sign};

use crate::error::{Result, SteklovError};

/// Largest degree the dense oracle accepts.
pub const ORACLE_MAX_DEGREE: u32 = 8;

/// One row of the oracle table.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMultiplicity {
    pub degree: u32,
    pub weight: i32,
    pub multiplicity: usize,
    /// Round-sphere eigenvalue mu(1) = k(k+2) of the eigenspace.
    pub mu1: f64,
}

/// Monomial z1^a zbar1^b z2^c zbar2^d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Monomial {
    a: u32,
    b: u32,
    c: u32,
    d: u32,
}

impl Monomial {
    fn weight(&self) -> i32 {
        self.a as i32 - self.b as i32 + self.c as i32 - self.d as i32
    }
}

fn monomials_of_degree_and_weight(degree: i64, weight: i32) -> Vec<Monomial> {
    let mut out = Vec::new();
    if degree < 0 {
        return out;
    }
    let degree = degree as u32;
    for a in 0..=degree {
        for b in 0..=(degree - a) {
            for c in 0..=(degree - a - b) {
                let d = degree - a - b - c;
                let mon = Monomial { a, b, c, d };
                if mon.weight() == weight {
                    out.push(mon);
                }
            }
        }
    }
    out
}

/// Matrix of the Euclidean Laplacian 4 (d_z1 d_zbar1 + d_z2 d_zbar2)
/// from the weight-m monomials of degree k to those of degree k - 2.
fn laplacian_block(degree: u32, weight: i32) -> (Vec<Vec<i64>>, usize) {
    let cols = monomials_of_degree_and_weight(degree as i64, weight);
    let rows = monomials_of_degree_and_weight(degree as i64 - 2, weight);
    let row_index: std::collections::HashMap<Monomial, usize> =
        rows.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut mat = vec![vec![0i64; cols.len()]; rows.len()];
    for (j, mon) in cols.iter().enumerate() {
        if mon.a > 0 && mon.b > 0 {
            let target = Monomial {
                a: mon.a - 1,
                b: mon.b - 1,
                ..*mon
            };
            mat[row_index[&target]][j] += 4 * (mon.a as i64) * (mon.b as i64);
        }
        if mon.c > 0 && mon.d > 0 {
            let target = Monomial {
                c: mon.c - 1,
                d: mon.d - 1,
                ..*mon
            };
            mat[row_index[&target]][j] += 4 * (mon.c as i64) * (mon.d as i64);
        }
    }
    (mat, cols.len())
}

/// Exact rank by fraction-free (Bareiss) Gaussian elimination.
///
/// Row swaps and zero-column skips keep the Sylvester divisibility
/// property, so every division is exact over the integers.
fn bareiss_rank(mat: &[Vec<i64>]) -> usize {
    let rows = mat.len();
    if rows == 0 {
        return 0;
    }
    let cols = mat[0].len();
    let mut a: Vec<Vec<BigInt>> = mat
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let zero = BigInt::from(0);
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| a[i][c].sign() != Sign::NoSign) else {
            continue;
        };
        a.swap(r, p);
        for i in (r + 1)..rows {
            for j in (c + 1)..cols {
                let num = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = num / &prev;
            }
            a[i][c] = zero.clone();
        }
        prev = a[r][c].clone();
        rank += 1;
        r += 1;
        if r == rows {
            break;
        }
    }
    rank
}

/// Brute-force weight decomposition of the degree-k spherical harmonics
/// for all k <= k_max.
///
/// The returned table is confirmed against the structural pattern
/// (weights {-k, ..., k} in steps of two, multiplicity k + 1 each); a
/// mismatch is reported as a numeric error rather than silently returned.
pub fn berger_oracle(k_max: u32) -> Result<Vec<WeightMultiplicity>> {
    if k_max > ORACLE_MAX_DEGREE {
        return Err(SteklovError::Resource(format!(
            "harmonic-polynomial oracle is dense and limited to degree {ORACLE_MAX_DEGREE}, \
             got k_max = {k_max}"
        )));
    }
    let mut table = Vec::new();
    for k in 0..=k_max {
        let mu1 = (k * (k + 2)) as f64;
        let mut shell_total = 0usize;
        let mut m = -(k as i32);
        while m <= k as i32 {
            let (block, n_cols) = laplacian_block(k, m);
            let multiplicity = n_cols - bareiss_rank(&block);
            if multiplicity != (k + 1) as usize {
                return Err(SteklovError::Numeric(format!(
                    "oracle: weight {m} of degree {k} has multiplicity {multiplicity}, \
                     expected {}",
                    k + 1
                )));
            }
            shell_total += multiplicity;
            table.push(WeightMultiplicity {
                degree: k,
                weight: m,
                multiplicity,
                mu1,
            });
            m += 2;
        }
        if shell_total != ((k + 1) * (k + 1)) as usize {
            return Err(SteklovError::Numeric(format!(
                "oracle: degree-{k} multiplicities sum to {shell_total}, expected {}",
                (k + 1) * (k + 1)
            )));
        }
        // Off-pattern weights must not appear: check a sample of parities.
        let (off_block, off_cols) = laplacian_block(k, k as i32 + 1);
        if off_cols != 0 || !off_block.is_empty() && off_block[0].iter().any(|&v| v != 0) {
            return Err(SteklovError::Numeric(format!(
                "oracle: unexpected monomials of weight {} in degree {k}",
                k + 1
            )));
        }
    }
    Ok(table)
}

/// CSV dump of the oracle table (columns k,m,multiplicity,mu1).
pub fn oracle_csv(table: &[WeightMultiplicity]) -> String {
    let mut out = String::from("k,m,multiplicity,mu1\n");
    for row in table {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.degree,
            row.weight,
            row.multiplicity,
            crate::numeric::fmt_e12(row.mu1)
        ));
    }
    out
}
