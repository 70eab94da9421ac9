//! Symplectic multiple-folding upper bounds.
//!
//! The four-dimensional optimizers s_EB (ellipsoid into ball) and s_EC
//! (ellipsoid into cube) decide, for a fold point u1, whether the folded
//! tower fits; the optimal u1 is then located by bisection. Everything is
//! in pi-units. The recurrences, in those units:
//!
//!   u_2     = (a+1)/(a-1) u_1 - a/(a-1)
//!   u_{j+1} = a/(a-2) (u_j - 2 l_j)          (after an even fold index)
//!   u_{j+2} = (a+1)/(a-1) u_{j+1}            (after an odd fold index)
//!   l_j     = r_j / a,   r_j = a - sum u_i
//!
//! A feasible attempt embeds E(pi, a pi) in a ball of capacity
//! A(a, u1) = 2 + (1 - 2/a) u1. The interval of admissible fold points is
//! I_a = [a/(a+1), a/2].
//!
//! The polydisc bounds s_PB, s_PC, s_PC^{2n} and the diagonal linear map
//! are closed forms and need no iteration.
//!
//! All returned upper bounds are infima: the constructions achieve any
//! capacity strictly above the returned number.

use thiserror::Error;

use crate::domain::{Accuracy, Bound, BoundMethod};

pub mod exact;

#[derive(Debug, Error, PartialEq)]
pub enum FoldingError {
    #[error("fold point {u1} outside admissible interval [{lo}, {hi}]")]
    OutOfInterval { u1: f64, lo: f64, hi: f64 },
    #[error("parameter a = {0} outside the domain of this bound")]
    OutOfDomain(f64),
    #[error("loop guard of {0} iterations exceeded; this signals a bug, not a valid input")]
    NonTermination(u64),
}

/// Live state of the folding recurrence at loop head `j`.
///
/// Invariant at every loop head: `l == r / a` and `r` strictly decreases
/// across iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldState {
    pub j: u32,
    pub u: f64,
    pub r: f64,
    pub l: f64,
    pub l_prev: f64,
}

impl FoldState {
    /// State after the first fold: j = 2 with u_2 from the initial recurrence.
    fn first(a: f64, u1: f64) -> Self {
        let u2 = (a + 1.0) / (a - 1.0) * u1 - a / (a - 1.0);
        let r2 = a - u1 - u2;
        FoldState {
            j: 2,
            u: u2,
            r: r2,
            l: r2 / a,
            l_prev: 1.0 - u1 / a,
        }
    }
}

/// Result of one embedding attempt at a fixed fold point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldOutcome {
    pub feasible: bool,
    /// A(a, u1) = 2 + (1 - 2/a) u1 when feasible.
    pub capacity: Option<f64>,
    /// Number of folds committed. On success the trailing remainder, when
    /// nonempty, forms the last floor and counts as one more fold.
    pub folds: u32,
}

fn admissible_interval(a: f64) -> (f64, f64) {
    (a / (a + 1.0), a / 2.0)
}

/// Decides whether folding E(pi, a pi) at u1 fits into the ball of capacity
/// A(a, u1). Replicates the ball-attempt loop exactly, including its
/// deliberate negligence: the odd branch does not check the corner of the
/// floor two levels up, because a genuine overshoot makes the next even
/// branch fail anyway.
pub fn fold_feasible(a: f64, u1: f64, acc_guard: &Accuracy) -> Result<FoldOutcome, FoldingError> {
    if !(a > 2.0) {
        return Err(FoldingError::OutOfDomain(a));
    }
    let (lo, hi) = admissible_interval(a);
    if !(u1 >= lo && u1 <= hi) {
        return Err(FoldingError::OutOfInterval { u1, lo, hi });
    }
    let capacity = 2.0 + (1.0 - 2.0 / a) * u1;
    let mut st = FoldState::first(a, u1);
    for _ in 0..acc_guard.max_iter {
        if st.j % 2 == 0 {
            if st.r <= st.u {
                return Ok(success(capacity, &st));
            }
            if st.u <= 2.0 * st.l {
                return Ok(FoldOutcome {
                    feasible: false,
                    capacity: None,
                    folds: st.j - 1,
                });
            }
            st.j += 1;
            st.u = a / (a - 2.0) * (st.u - 2.0 * st.l);
            st.r -= st.u;
            st.l_prev = st.l;
            st.l = st.r / a;
        } else {
            if st.r <= st.u + st.l_prev {
                return Ok(success(capacity, &st));
            }
            st.j += 1;
            st.u *= (a + 1.0) / (a - 1.0);
            st.r -= st.u;
            st.l = st.r / a;
        }
    }
    Err(FoldingError::NonTermination(acc_guard.max_iter))
}

fn success(capacity: f64, st: &FoldState) -> FoldOutcome {
    let folds = if st.r > 0.0 { st.j } else { st.j - 1 };
    FoldOutcome {
        feasible: true,
        capacity: Some(capacity),
        folds,
    }
}

/// Best multiple-folding embedding of E(pi, a pi) into a ball: bisects for
/// the minimal feasible fold point u0 in I_a and returns
/// 2 + (1 - 2/a) u0. For a <= 2 the identity is optimal and the inclusion
/// bound a is returned.
pub fn s_eb(a: f64, acc: &Accuracy) -> Result<Bound, FoldingError> {
    if !(a >= 1.0) {
        return Err(FoldingError::OutOfDomain(a));
    }
    if a <= 2.0 {
        return Ok(Bound::upper(a, BoundMethod::Inclusion));
    }
    let (mut b, mut c) = admissible_interval(a);
    let mut u1 = 0.5 * (b + c);
    // u1 = a/2 always succeeds in one fold, so a feasible probe exists.
    let mut folds_at_best = 1u32;
    let mut iterations = 0u64;
    while (c - b) / 2.0 > acc.acc / 2.0 {
        iterations += 1;
        if iterations > acc.max_iter {
            return Err(FoldingError::NonTermination(acc.max_iter));
        }
        let outcome = fold_feasible(a, u1, acc)?;
        if outcome.feasible {
            c = u1;
            folds_at_best = outcome.folds;
        } else {
            b = u1;
        }
        u1 = 0.5 * (b + c);
    }
    Ok(Bound::upper(
        2.0 + (1.0 - 2.0 / a) * u1,
        BoundMethod::MultiFold {
            u0: u1,
            folds: folds_at_best,
        },
    ))
}

/// Closed form A_N for the optimal N-fold into a ball, N in {1, 2, 3}.
pub fn closed_form_a_n(a: f64, n: u32) -> f64 {
    assert!(a > 2.0, "closed forms require a > 2");
    match n {
        1 => 2.0 + (a - 2.0) * 0.5,
        2 => 2.0 + (a - 2.0) * (a + 1.0) / (3.0 * a + 1.0),
        3 => 2.0 + (a - 2.0) * (a + 1.0) * (a + 2.0) / (4.0 * (a * a + a + 1.0)),
        _ => panic!("closed form only known for N in {{1, 2, 3}}, got {n}"),
    }
}

fn height_loop(a: f64, u1: f64, max_iter: u64) -> Result<(f64, FoldState), FoldingError> {
    if !(a > 1.0) {
        return Err(FoldingError::OutOfDomain(a));
    }
    let (lo, hi) = admissible_interval(a);
    if !(u1 > lo && u1 <= hi) {
        return Err(FoldingError::OutOfInterval { u1, lo, hi });
    }
    let l1 = 1.0 - u1 / a;
    let mut st = FoldState::first(a, u1);
    let mut h = 2.0 * l1;
    let mut iterations = 0u64;
    while st.r > u1 + l1 - st.l {
        iterations += 1;
        if iterations > max_iter {
            return Err(FoldingError::NonTermination(max_iter));
        }
        st.j += 1;
        st.u *= (a + 1.0) / (a - 1.0);
        st.r -= st.u;
        st.l_prev = st.l;
        st.l = st.r / a;
        if st.j % 2 == 0 {
            h += 2.0 * st.l_prev;
        }
    }
    if st.j % 2 == 0 {
        h += st.l;
    } else {
        h += st.l_prev.max(2.0 * st.l);
    }
    Ok((h, st))
}

/// Height of the image of E(pi, a pi) folded at u1 with all later fold
/// points maximal, cube-target variant. The terminal increment depends on
/// the parity of the last fold index.
pub fn fold_height(a: f64, u1: f64) -> Result<f64, FoldingError> {
    height_loop(a, u1, crate::domain::DEFAULT_MAX_ITER).map(|(h, _)| h)
}

/// Best folding embedding of E(pi, a pi) into a cube: the width
/// w = 1 + (1 - 1/a) u1 increases in u1 while the height decreases, so the
/// optimum is the unique crossing, found by bisection. The one-fold
/// candidate u1 = a/2 is checked separately; it never wins but costs
/// nothing.
pub fn s_ec(a: f64, acc: &Accuracy) -> Result<Bound, FoldingError> {
    if !(a >= 1.0) {
        return Err(FoldingError::OutOfDomain(a));
    }
    if a == 1.0 {
        return Ok(Bound::upper(1.0, BoundMethod::Inclusion));
    }
    let (mut b, mut c) = admissible_interval(a);
    let mut u1 = 0.5 * (b + c);
    let mut iterations = 0u64;
    while (c - b) / 2.0 > acc.acc / 2.0 {
        iterations += 1;
        if iterations > acc.max_iter {
            return Err(FoldingError::NonTermination(acc.max_iter));
        }
        let (h, _) = height_loop(a, u1, acc.max_iter)?;
        if h > 1.0 + (1.0 - 1.0 / a) * u1 {
            b = u1;
        } else {
            c = u1;
        }
        u1 = 0.5 * (b + c);
    }
    let crossing = 1.0 + (1.0 - 1.0 / a) * u1;
    let one_fold = 0.5 * (a + 1.0);
    if one_fold < crossing {
        return Ok(Bound::upper(
            one_fold,
            BoundMethod::MultiFold {
                u0: a / 2.0,
                folds: 1,
            },
        ));
    }
    let (_, st) = height_loop(a, u1, acc.max_iter)?;
    let folds = if st.r > 0.0 { st.j } else { st.j - 1 };
    Ok(Bound::upper(
        crossing,
        BoundMethod::MultiFold { u0: u1, folds },
    ))
}

/// Folding bound for P(pi, a pi) into a ball:
/// s_PB(a) = (a-2)/(2k) + k + 2 on 2(k^2-k+1) < a <= 2(k^2+k+1).
/// For a <= 2 folding cannot reduce and the inclusion P(pi, a pi) in
/// B^4(pi + a pi) is returned.
pub fn s_pb(a: f64) -> Result<Bound, FoldingError> {
    if !(a >= 1.0) {
        return Err(FoldingError::OutOfDomain(a));
    }
    if a <= 2.0 {
        return Ok(Bound::upper(a + 1.0, BoundMethod::Inclusion));
    }
    let k = s_pb_branch(a);
    Ok(Bound::upper(
        s_pb_expression(a, k),
        BoundMethod::ClosedFormFold { k },
    ))
}

/// Branch index of s_PB at a > 2: the unique k with
/// 2(k^2-k+1) < a <= 2(k^2+k+1).
pub fn s_pb_branch(a: f64) -> u32 {
    let mut k = 1u32;
    while a > 2.0 * ((k * k + k + 1) as f64) {
        k += 1;
    }
    k
}

/// The k-branch expression of s_PB, without the range check.
pub fn s_pb_expression(a: f64, k: u32) -> f64 {
    (a - 2.0) / (2.0 * k as f64) + (k + 2) as f64
}

/// Folding bound for P(pi, a pi) into a cube: piecewise
/// (N+1) on (N-1)N+2 < a <= N^2+1 and (a+2N)/(N+1) on N^2+1 < a <= N(N+1)+2.
/// For a <= 2 the inclusion bound a is returned.
pub fn s_pc(a: f64) -> Result<Bound, FoldingError> {
    if !(a >= 1.0) {
        return Err(FoldingError::OutOfDomain(a));
    }
    if a <= 2.0 {
        return Ok(Bound::upper(a, BoundMethod::Inclusion));
    }
    let mut n = 1u32;
    loop {
        let plateau_hi = (n * n + 1) as f64;
        let ramp_hi = (n * (n + 1) + 2) as f64;
        if a <= plateau_hi {
            return Ok(Bound::upper(
                (n + 1) as f64,
                BoundMethod::ClosedFormFold { k: n },
            ));
        }
        if a <= ramp_hi {
            return Ok(Bound::upper(
                (a + 2.0 * n as f64) / (n + 1) as f64,
                BoundMethod::ClosedFormFold { k: n },
            ));
        }
        n += 1;
    }
}

/// Both branch expressions of s_PC for the continuity checks.
pub fn s_pc_plateau(n: u32) -> f64 {
    (n + 1) as f64
}

pub fn s_pc_ramp(a: f64, n: u32) -> f64 {
    (a + 2.0 * n as f64) / (n + 1) as f64
}

/// Higher-dimensional folding bound for P^{2n}(pi, ..., pi, a pi) into a
/// cube, n >= 2. Agrees with s_PC on a > 2 when n = 2.
pub fn s_pc_2n(a: f64, n: u32) -> Result<Bound, FoldingError> {
    if !(a > 2.0) || n < 2 {
        return Err(FoldingError::OutOfDomain(a));
    }
    let t = a - 2.0;
    let mut big_n = 1u32;
    loop {
        let pow_n = (big_n as f64).powi(n as i32 - 1);
        let pow_n1 = ((big_n + 1) as f64).powi(n as i32 - 1);
        let lo = (big_n as f64 - 1.0) * pow_n;
        let mid = (big_n as f64 - 1.0) * pow_n1;
        let hi = big_n as f64 * pow_n1;
        if lo < t && t <= mid {
            return Ok(Bound::upper(
                (big_n + 1) as f64,
                BoundMethod::ClosedFormFold { k: big_n },
            ));
        }
        if mid < t && t <= hi {
            return Ok(Bound::upper(
                t / pow_n1 + 2.0,
                BoundMethod::ClosedFormFold { k: big_n },
            ));
        }
        big_n += 1;
    }
}

/// Turning a long thin polydisc P^{2n}(pi, ..., pi, pi r^2) into the
/// diagonal of a cube: the linear map gives capacity 1/2 + r^2/2 + r, which
/// improves on r^2 exactly when r > 1 + sqrt(2).
pub fn diagonal_cube_bound(r: f64, n: u32) -> (f64, bool) {
    assert!(r > 0.0, "r must be positive");
    assert!(n >= 2, "diagonal trick needs half-dimension at least 2");
    let bound = 0.5 + r * r / 2.0 + r;
    (bound, bound < r * r)
}
