//! Lagrangian folding bounds.
//!
//! A shape is viewed as a Lagrangian product of a box and a simplex (or a
//! second box); wrapping the box around the torus T^n = R^n / Z^n (pi-units)
//! with a unimodular matrix folds it. The matrices:
//!
//! M(k_1, ..., k_{n-1}), k_i pairwise coprime, embeds
//! Box(1/k_1, ..., 1/k_{n-1}, k_1...k_{n-1}) into T^n;
//! N(k_2, ..., k_n), k_i >= 2, embeds Box(1/(k_2...k_n), k_2, ..., k_n).
//!
//! All matrix work is exact rational: coprimality is an integer phenomenon
//! and a floating tolerance would manufacture collisions. Floats appear
//! only at the Bound boundary.

use std::collections::HashSet;

use num::integer::{gcd, lcm};
use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

use crate::domain::{Bound, BoundMethod};

#[derive(Debug, Error, PartialEq)]
pub enum LagrangianError {
    #[error("k-vector must be pairwise coprime for the M-construction")]
    NotCoprime,
    #[error("k-vector entries must be at least {min} (got {got})")]
    InvalidK { min: u64, got: u64 },
    #[error("expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("caps too small for the prime-based construction")]
    CapTooSmall,
    #[error("k-vector must be nonempty")]
    EmptyKs,
}

pub fn pairwise_coprime(ks: &[u64]) -> bool {
    for i in 0..ks.len() {
        for j in i + 1..ks.len() {
            if gcd(ks[i], ks[j]) != 1 {
                return false;
            }
        }
    }
    true
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Dense matrix of exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMatrix {
    rows: Vec<Vec<BigRational>>,
}

impl RationalMatrix {
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let n = rows.len();
        assert!(n > 0 && rows.iter().all(|r| r.len() == n), "square only");
        Self { rows }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| self.rows[j][i].clone()).collect())
            .collect();
        Self { rows }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.dim();
        assert_eq!(n, other.dim());
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| &self.rows[i][k] * &other.rows[k][j])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Self { rows }
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.dim());
        self.rows
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Exact determinant by fraction-free-ish Gaussian elimination.
    pub fn determinant(&self) -> BigRational {
        let n = self.dim();
        let mut m = self.rows.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m[r][col].is_zero());
            let Some(p) = pivot else {
                return BigRational::zero();
            };
            if p != col {
                m.swap(p, col);
                det = -det;
            }
            det *= m[col][col].clone();
            let pivot_row = m[col].clone();
            for row in m.iter_mut().skip(col + 1) {
                if row[col].is_zero() {
                    continue;
                }
                let factor = &row[col] / &pivot_row[col];
                for (cell, pivot) in row.iter_mut().zip(&pivot_row).skip(col) {
                    let sub = &factor * pivot;
                    *cell -= sub;
                }
            }
        }
        det
    }
}

fn check_m_ks(ks: &[u64]) -> Result<(), LagrangianError> {
    if ks.is_empty() {
        return Err(LagrangianError::EmptyKs);
    }
    for &k in ks {
        if k < 1 {
            return Err(LagrangianError::InvalidK { min: 1, got: k });
        }
    }
    if !pairwise_coprime(ks) {
        return Err(LagrangianError::NotCoprime);
    }
    Ok(())
}

fn check_n_ks(ks: &[u64]) -> Result<(), LagrangianError> {
    if ks.is_empty() {
        return Err(LagrangianError::EmptyKs);
    }
    for &k in ks {
        if k < 2 {
            return Err(LagrangianError::InvalidK { min: 2, got: k });
        }
    }
    Ok(())
}

/// M(k_1, ..., k_{n-1}): identity with last column (-1/k_1, ..., -1/k_{n-1}, 1).
pub fn m_matrix(ks: &[u64]) -> Result<RationalMatrix, LagrangianError> {
    check_m_ks(ks)?;
    let n = ks.len() + 1;
    let mut m = RationalMatrix::identity(n);
    for (i, &k) in ks.iter().enumerate() {
        m.rows[i][n - 1] = rat(-1, k as i64);
    }
    Ok(m)
}

/// M* = transpose of the inverse of M: identity with last row
/// (1/k_1, ..., 1/k_{n-1}, 1).
pub fn m_star_matrix(ks: &[u64]) -> Result<RationalMatrix, LagrangianError> {
    check_m_ks(ks)?;
    let n = ks.len() + 1;
    let mut m = RationalMatrix::identity(n);
    for (i, &k) in ks.iter().enumerate() {
        m.rows[n - 1][i] = rat(1, k as i64);
    }
    Ok(m)
}

/// N(k_2, ..., k_n): unit upper bidiagonal with superdiagonal -1/k_{i+1}.
pub fn n_matrix(ks: &[u64]) -> Result<RationalMatrix, LagrangianError> {
    check_n_ks(ks)?;
    let n = ks.len() + 1;
    let mut m = RationalMatrix::identity(n);
    for (i, &k) in ks.iter().enumerate() {
        m.rows[i][i + 1] = rat(-1, k as i64);
    }
    Ok(m)
}

/// N*(k_2, ..., k_n): unit lower triangular with entry
/// (i, j) = (-1)^{i-j+1} / (k_{j+1} ... k_i) below the diagonal
/// (1-based indices, k's indexed 2..n as in the k-vector).
pub fn n_star_matrix(ks: &[u64]) -> Result<RationalMatrix, LagrangianError> {
    check_n_ks(ks)?;
    let n = ks.len() + 1;
    let mut m = RationalMatrix::identity(n);
    for i in 1..n {
        let mut denom = BigInt::one();
        for j in (0..i).rev() {
            // moving left multiplies in k_{j+2} (0-based ks[j]) and flips sign
            denom *= BigInt::from(ks[j]);
            let sign = if (i - j) % 2 == 1 { 1 } else { -1 };
            m.rows[i][j] = BigRational::new(BigInt::from(sign), denom.clone());
        }
    }
    Ok(m)
}

/// E^{2n}(pi, ..., pi, a pi) into a ball via M(k_1, ..., k_{n-1}):
/// A = max(k_max + 1, a / (k_1 ... k_{n-1})).
pub fn ball_bound_m(ks: &[u64], a: f64) -> Result<Bound, LagrangianError> {
    check_m_ks(ks)?;
    assert!(a > 0.0);
    let k_max = *ks.iter().max().unwrap();
    let product: f64 = ks.iter().map(|&k| k as f64).product();
    Ok(Bound::upper(
        ((k_max + 1) as f64).max(a / product),
        BoundMethod::LagrangianM { ks: ks.to_vec() },
    ))
}

/// P^{2n}(pi, ..., pi, a pi) into a cube via M:
/// A = max(k_max, (n-1) + a / (k_1 ... k_{n-1})).
pub fn cube_bound_m(ks: &[u64], a: f64) -> Result<Bound, LagrangianError> {
    check_m_ks(ks)?;
    assert!(a > 0.0);
    let n = ks.len() + 1;
    let k_max = *ks.iter().max().unwrap();
    let product: f64 = ks.iter().map(|&k| k as f64).product();
    Ok(Bound::upper(
        (k_max as f64).max((n - 1) as f64 + a / product),
        BoundMethod::LagrangianM { ks: ks.to_vec() },
    ))
}

/// Closed-form ball bound l_EB(a) = min_k max(k+1, a/k), evaluated through
/// its piecewise form: (k+1) on (k-1)(k+1) <= a <= k(k+1), a/k on
/// k(k+1) <= a <= k(k+2). At a breakpoint both adjoining branches agree;
/// the smaller k is certified.
pub fn l_eb(a: f64) -> Bound {
    assert!(a >= 1.0);
    let base = (a + 1.0).sqrt().floor() as u64;
    for k in [base.saturating_sub(1).max(1), base.max(1)] {
        let kf = k as f64;
        if (kf - 1.0) * (kf + 1.0) <= a && a <= kf * (kf + 1.0) {
            return Bound::upper(kf + 1.0, BoundMethod::LagrangianM { ks: vec![k] });
        }
        if kf * (kf + 1.0) <= a && a <= kf * (kf + 2.0) {
            return Bound::upper(a / kf, BoundMethod::LagrangianM { ks: vec![k] });
        }
    }
    unreachable!("branch pairs tile [1, inf)");
}

/// Closed-form cube bound l_PC(a) = min_k max(k, a/k + 1): k on
/// (k-1)^2 <= a <= k(k-1), a/k + 1 on k(k-1) <= a <= k^2.
pub fn l_pc(a: f64) -> Bound {
    assert!(a >= 1.0);
    let base = a.sqrt().floor() as u64 + 1;
    for k in [base.saturating_sub(1).max(1), base] {
        let kf = k as f64;
        if (kf - 1.0) * (kf - 1.0) <= a && a <= kf * (kf - 1.0) {
            return Bound::upper(kf, BoundMethod::LagrangianM { ks: vec![k] });
        }
        if kf * (kf - 1.0) <= a && a <= kf * kf {
            return Bound::upper(a / kf + 1.0, BoundMethod::LagrangianM { ks: vec![k] });
        }
    }
    unreachable!("branch pairs tile [1, inf)");
}

fn big_to_f64(x: &BigRational) -> f64 {
    // inputs stay desk-scale; a simple numer/denom quotient is exact enough
    let numer = x.numer().to_string().parse::<f64>().unwrap();
    let denom = x.denom().to_string().parse::<f64>().unwrap();
    numer / denom
}

/// Scale the columns of N* as the bound procedure prescribes: first column
/// by k_2...k_n, column i by (a_i/pi)/k_i. Columns are the nonzero vertices
/// of the image simplex (or box).
fn scaled_n_star(ks: &[u64], a_rest: &[f64]) -> Result<Vec<Vec<f64>>, LagrangianError> {
    check_n_ks(ks)?;
    if a_rest.len() != ks.len() {
        return Err(LagrangianError::DimensionMismatch {
            expected: ks.len(),
            got: a_rest.len(),
        });
    }
    if ks.len() < 2 {
        // the N-construction lives in half-dimension n >= 3
        return Err(LagrangianError::DimensionMismatch {
            expected: 2,
            got: ks.len(),
        });
    }
    let n = ks.len() + 1;
    let star = n_star_matrix(ks)?;
    let mut scales = Vec::with_capacity(n);
    scales.push(ks.iter().map(|&k| k as f64).product::<f64>());
    for (i, &k) in ks.iter().enumerate() {
        scales.push(a_rest[i] / k as f64);
    }
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| big_to_f64(star.entry(i, j)) * scales[j])
                .collect()
        })
        .collect())
}

/// E(pi, a_2, ..., a_n) into a ball via N(k_2, ..., k_n), n >= 3.
///
/// The scaled columns of N* are the vertices of the image simplex; shifting
/// each row so that its minimum over the vertex set (columns and the
/// origin) becomes zero translates the simplex into the positive cone, and
/// the needed ball capacity is the largest vertex coordinate sum.
pub fn ball_bound_n(ks: &[u64], a_rest: &[f64]) -> Result<Bound, LagrangianError> {
    let scaled = scaled_n_star(ks, a_rest)?;
    let n = scaled.len();
    let shifts: Vec<f64> = scaled
        .iter()
        .map(|row| -row.iter().fold(0.0f64, |m, &x| m.min(x)))
        .collect();
    let mut best = shifts.iter().sum::<f64>(); // the translated origin vertex
    for j in 0..n {
        let col_sum: f64 = scaled.iter().zip(&shifts).map(|(row, s)| row[j] + s).sum();
        best = best.max(col_sum);
    }
    Ok(Bound::upper(
        best,
        BoundMethod::LagrangianN { ks: ks.to_vec() },
    ))
}

/// P(pi, a_2, ..., a_n) into P(A_1, ..., A_n) via N: A_i is the absolute
/// row sum of the scaled N*. The max component is the cube bound.
pub fn polydisc_bound_n(ks: &[u64], a_rest: &[f64]) -> Result<Vec<f64>, LagrangianError> {
    let scaled = scaled_n_star(ks, a_rest)?;
    Ok(scaled
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).sum())
        .collect())
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while primes.len() < count {
        if primes.iter().all(|&p| candidate % p != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// Prime-based coprime search: with p_i the first n-1 primes and l the lcm
/// of their pairwise differences, numbers of the form m l - p_i are
/// coprime across i when m is shared. Each k_i is pushed as close to its
/// cap as possible (m_i maximal with m_i l < cap_i); if unequal caps break
/// coprimality the shared maximal m is used instead.
pub fn find_coprime_ks(caps: &[f64]) -> Result<Vec<u64>, LagrangianError> {
    if caps.is_empty() {
        return Err(LagrangianError::EmptyKs);
    }
    let primes = first_primes(caps.len());
    let mut l = 1u64;
    for i in 0..primes.len() {
        for j in i + 1..primes.len() {
            l = lcm(l, primes[j] - primes[i]);
        }
    }
    let max_m = |cap: f64| -> Option<u64> {
        // largest m with m * l < cap
        let m = ((cap / l as f64).ceil() - 1.0) as i64;
        (m >= 1).then_some(m as u64)
    };
    let build = |ms: &[u64]| -> Option<Vec<u64>> {
        ms.iter()
            .zip(&primes)
            .map(|(&m, &p)| {
                let k = m * l;
                (k > p).then(|| k - p)
            })
            .collect()
    };
    let ms: Vec<u64> = caps
        .iter()
        .map(|&c| max_m(c).ok_or(LagrangianError::CapTooSmall))
        .collect::<Result<_, _>>()?;
    if let Some(ks) = build(&ms) {
        if pairwise_coprime(&ks) {
            return Ok(ks);
        }
    }
    // shared m restores the coprimality argument
    let shared = *ms.iter().min().unwrap();
    let ks = build(&vec![shared; caps.len()]).ok_or(LagrangianError::CapTooSmall)?;
    if !pairwise_coprime(&ks) {
        return Err(LagrangianError::CapTooSmall);
    }
    Ok(ks)
}

/// Desk-scale injectivity check for a torus matrix: sample the open box on
/// a regular grid (cell centers, spacing box_i / resolution), map by the
/// matrix and reduce mod 1. Exact rational arithmetic throughout; any two
/// grid points landing on the same torus point is a collision.
pub fn torus_injectivity_check(
    matrix: &RationalMatrix,
    box_sides: &[BigRational],
    resolution: u32,
) -> bool {
    assert_eq!(matrix.dim(), box_sides.len(), "box must match matrix");
    assert!(resolution >= 1);
    let n = box_sides.len();
    let res = resolution as usize;
    let total = res.pow(n as u32);
    let mut seen: HashSet<Vec<BigRational>> = HashSet::with_capacity(total);
    let two_res = BigRational::new(BigInt::one(), BigInt::from(2 * resolution));
    for flat in 0..total {
        let mut idx = flat;
        let mut point = Vec::with_capacity(n);
        for side in box_sides {
            let i = idx % res;
            idx /= res;
            // cell center: (2i + 1) / (2 res) * side
            let frac = BigRational::from(BigInt::from(2 * i as u64 + 1)) * &two_res;
            point.push(frac * side);
        }
        let image = matrix.mul_vec(&point);
        let reduced: Vec<BigRational> = image.into_iter().map(|x| x.fract_nonneg()).collect();
        if !seen.insert(reduced) {
            return false;
        }
    }
    true
}

trait FractNonneg {
    fn fract_nonneg(&self) -> Self;
}

impl FractNonneg for BigRational {
    fn fract_nonneg(&self) -> Self {
        let f = self - self.floor();
        debug_assert!(!f.is_negative() && f < BigRational::one());
        f
    }
}
