//! Widths, packing numbers and deficiency diagnostics.
//!
//! For simple shapes the width and the squeezing constant are reciprocal
//! (in pi-units the pi^2 factor of the raw-unit duality cancels), so every
//! upper bound from the folding and lagrangian modules turns into a width
//! and a packing number. Deficiencies measure the residual rigidity of a
//! bound over the bare volume condition.

use thiserror::Error;

use crate::domain::{factorial, Accuracy, Bound, BoundMethod};
use crate::folding::{self, FoldingError};
use crate::lagrangian;

#[derive(Debug, Error, PartialEq)]
pub enum PackingError {
    #[error("packing number {0} exceeds 1; inputs are inconsistent")]
    RatioExceedsOne(f64),
    #[error("no closed-form maxima sequence for this deficiency kind")]
    UnsupportedKind,
    #[error("cohomology class is not admissible (twisted genus-0 needs a > b/2)")]
    InvalidCohomologyClass,
    #[error(transparent)]
    Folding(#[from] FoldingError),
}

/// The four embedding problems of the comparison figures: ellipsoid or
/// polydisc source, ball or cube target, all in dimension four.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    EB,
    EC,
    PB,
    PC,
}

impl ProblemKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "EB" => Some(Self::EB),
            "EC" => Some(Self::EC),
            "PB" => Some(Self::PB),
            "PC" => Some(Self::PC),
            _ => None,
        }
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::EB => "EB",
            Self::EC => "EC",
            Self::PB => "PB",
            Self::PC => "PC",
        };
        write!(f, "{s}")
    }
}

/// Width, packing fraction and the method that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct PackingResult {
    pub width: f64,
    pub packing_number: f64,
    pub provenance: BoundMethod,
}

/// Duality: a squeezing constant s gives the width 1/s (pi-units).
pub fn width_from_squeezing(s: f64) -> f64 {
    assert!(s > 0.0);
    1.0 / s
}

/// p = width^n q_2...q_n / (n! Vol) for ellipsoid shapes, without the n!
/// for polydiscs. Values a hair above 1 are rounding noise and clamp to 1;
/// anything beyond tolerance signals inconsistent inputs.
pub fn packing_number(
    width: f64,
    weights: &[f64],
    target_volume: f64,
    shape: PackingShape,
) -> Result<f64, PackingError> {
    assert!(width > 0.0 && target_volume > 0.0);
    assert!(weights.iter().all(|&q| q > 0.0));
    let n = weights.len() + 1;
    let numerator = width.powi(n as i32) * weights.iter().product::<f64>();
    let denominator = match shape {
        PackingShape::Ellipsoid => factorial(n) * target_volume,
        PackingShape::Polydisc => target_volume,
    };
    let p = numerator / denominator;
    if p > 1.0 + 1e-9 {
        return Err(PackingError::RatioExceedsOne(p));
    }
    Ok(p.min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PackingShape {
    Ellipsoid,
    Polydisc,
}

/// Best in-scope upper bound for each problem: folding everywhere,
/// improved by the Lagrangian closed form where one exists (EB and PC).
pub fn best_upper_bound(problem: ProblemKind, a: f64, acc: &Accuracy) -> Result<Bound, FoldingError> {
    match problem {
        ProblemKind::EB => {
            let fold = folding::s_eb(a, acc)?;
            let lagr = lagrangian::l_eb(a);
            Ok(if fold.value <= lagr.value { fold } else { lagr })
        }
        ProblemKind::EC => folding::s_ec(a, acc),
        ProblemKind::PB => folding::s_pb(a),
        ProblemKind::PC => {
            let fold = folding::s_pc(a)?;
            let lagr = lagrangian::l_pc(a);
            Ok(if fold.value <= lagr.value { fold } else { lagr })
        }
    }
}

fn source_volume(problem: ProblemKind, a: f64) -> f64 {
    match problem {
        ProblemKind::EB | ProblemKind::EC => a / 2.0,
        ProblemKind::PB | ProblemKind::PC => a,
    }
}

fn target_volume_at(problem: ProblemKind, capacity: f64) -> f64 {
    match problem {
        ProblemKind::EB | ProblemKind::PB => capacity * capacity / 2.0,
        ProblemKind::EC | ProblemKind::PC => capacity * capacity,
    }
}

/// Volume fraction of the source inside the best bound's target.
pub fn asymptotic_ratio(problem: ProblemKind, a: f64, acc: &Accuracy) -> Result<f64, FoldingError> {
    Ok(packing_from_bound(problem, a, acc)?.packing_number)
}

/// Width and packing number of the dual problem, certified by the bound
/// that won.
pub fn packing_from_bound(
    problem: ProblemKind,
    a: f64,
    acc: &Accuracy,
) -> Result<PackingResult, FoldingError> {
    let bound = best_upper_bound(problem, a, acc)?;
    Ok(PackingResult {
        width: width_from_squeezing(bound.value),
        packing_number: source_volume(problem, a) / target_volume_at(problem, bound.value),
        provenance: bound.method,
    })
}

/// Excess of a bound over the volume condition, pi-units.
pub fn deficiency(kind: ProblemKind, a: f64) -> Result<f64, PackingError> {
    let acc = Accuracy::default();
    Ok(match kind {
        ProblemKind::EB => lagrangian::l_eb(a).value - a.sqrt(),
        ProblemKind::PB => folding::s_pb(a)?.value - (2.0 * a).sqrt(),
        ProblemKind::EC => folding::s_ec(a, &acc)?.value - (a / 2.0).sqrt(),
        ProblemKind::PC => folding::s_pc(a)?.value - a.sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

/// Closed-form sequence of local deficiency maxima, with the direction it
/// was checked to have and its limit.
#[derive(Debug, Clone, PartialEq)]
pub struct DeficiencyMaxima {
    pub points: Vec<(f64, f64)>,
    pub direction: Monotonicity,
    pub limit: f64,
}

/// Local maxima of the deficiency functions. EB: at a_k = k(k+2),
/// decreasing toward 1. PB: at a_k = 2(k^2 - k + 1), increasing toward 2.
/// PC: at a_N = N^2 - N + 2, increasing toward 3/2. EC has no closed form
/// and is pointwise only.
pub fn deficiency_maxima(kind: ProblemKind, k_max: u32) -> Result<DeficiencyMaxima, PackingError> {
    assert!(k_max >= 1);
    let (points, direction, limit): (Vec<(f64, f64)>, _, _) = match kind {
        ProblemKind::EB => (
            (1..=k_max as u64)
                .map(|k| {
                    let a = (k * (k + 2)) as f64;
                    ((k + 2) as f64 - a.sqrt(), a)
                })
                .map(|(d, a)| (a, d))
                .collect(),
            Monotonicity::Decreasing,
            1.0,
        ),
        ProblemKind::PB => (
            (1..=k_max as u64)
                .map(|k| {
                    let q = (k * k - k + 1) as f64;
                    ((2.0 * q), (2 * k + 1) as f64 - 2.0 * q.sqrt())
                })
                .collect(),
            Monotonicity::Increasing,
            2.0,
        ),
        ProblemKind::PC => (
            (1..=k_max as u64)
                .map(|n| {
                    let a = (n * n - n + 2) as f64;
                    (a, (n + 1) as f64 - a.sqrt())
                })
                .collect(),
            Monotonicity::Increasing,
            1.5,
        ),
        ProblemKind::EC => return Err(PackingError::UnsupportedKind),
    };
    for w in points.windows(2) {
        let ok = match direction {
            Monotonicity::Increasing => w[0].1 < w[1].1,
            Monotonicity::Decreasing => w[0].1 > w[1].1,
        };
        debug_assert!(ok, "deficiency sequence not monotone at {:?}", w);
    }
    Ok(DeficiencyMaxima {
        points,
        direction,
        limit,
    })
}

/// Packing number of a ruled surface: b/(2a) for genus 0 (factors swapped
/// so that a >= b in the trivial bundle), min(1, b/(2a)) for genus >= 1.
/// The twisted genus-0 form is admissible only for a > b/2.
pub fn ruled_surface_packing(
    genus: u32,
    a: f64,
    b: f64,
    twisted: bool,
) -> Result<f64, PackingError> {
    assert!(a > 0.0 && b > 0.0);
    if genus == 0 {
        if twisted {
            if a <= b / 2.0 {
                return Err(PackingError::InvalidCohomologyClass);
            }
            return Ok(b / (2.0 * a));
        }
        let (a, b) = if a >= b { (a, b) } else { (b, a) };
        return Ok(b / (2.0 * a));
    }
    Ok((b / (2.0 * a)).min(1.0))
}

/// Explicit-torus lower bound: p(T^2(1) x Sigma(a)) >= max(a+1-sqrt(2a+1), 2) / (4a).
pub fn jiang_lower_bound(a: f64) -> f64 {
    assert!(a >= 1.0);
    (a + 1.0 - (2.0 * a + 1.0).sqrt()).max(2.0) / (4.0 * a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acc() -> Accuracy {
        Accuracy::default()
    }

    #[test]
    fn width_examples() {
        assert_eq!(width_from_squeezing(2.0), 0.5);
        assert_eq!(width_from_squeezing(1.0), 1.0);
        let s = folding::s_eb(4.0, &acc()).unwrap().value;
        assert!((width_from_squeezing(s) - 0.37153).abs() < 1e-4);
    }

    #[test]
    fn width_round_trip() {
        // duality applied twice recovers the squeezing constant
        for s in [0.3, 1.0, 2.6916, 100.0] {
            assert!((width_from_squeezing(width_from_squeezing(s)) - s).abs() <= 1e-12 * s);
        }
    }

    #[test]
    fn packing_number_examples() {
        let p = packing_number(0.5, &[4.0], 0.5, PackingShape::Ellipsoid).unwrap();
        assert_eq!(p, 1.0);
        let p = packing_number(1.0, &[], 1.0, PackingShape::Ellipsoid).unwrap();
        assert_eq!(p, 1.0);
        let p = packing_number(0.37153, &[4.0], 0.5, PackingShape::Ellipsoid).unwrap();
        assert!((p - 0.552).abs() < 5e-3);
    }

    #[test]
    fn packing_number_rejects_inconsistent_inputs() {
        assert!(matches!(
            packing_number(2.0, &[4.0], 0.5, PackingShape::Ellipsoid),
            Err(PackingError::RatioExceedsOne(_))
        ));
    }

    #[test]
    fn deficiency_examples() {
        assert!((deficiency(ProblemKind::EB, 3.0).unwrap() - (3.0 - 3.0f64.sqrt())).abs() < 1e-12);
        assert!((deficiency(ProblemKind::PB, 2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(
            (deficiency(ProblemKind::PC, 2.0).unwrap() - (2.0 - 2.0f64.sqrt())).abs() < 1e-12
        );
    }

    #[test]
    fn deficiency_maxima_examples() {
        let eb = deficiency_maxima(ProblemKind::EB, 3).unwrap();
        assert_eq!(eb.direction, Monotonicity::Decreasing);
        let expect = [
            (3.0, 3.0 - 3.0f64.sqrt()),
            (8.0, 4.0 - 8.0f64.sqrt()),
            (15.0, 5.0 - 15.0f64.sqrt()),
        ];
        for ((a, d), (ea, ed)) in eb.points.iter().zip(expect) {
            assert_eq!(*a, ea);
            assert!((d - ed).abs() < 1e-12);
        }

        let pb = deficiency_maxima(ProblemKind::PB, 2).unwrap();
        assert_eq!(pb.points[0].0, 2.0);
        assert!((pb.points[0].1 - 1.0).abs() < 1e-12);
        assert_eq!(pb.points[1].0, 6.0);
        assert!((pb.points[1].1 - (5.0 - 2.0 * 3.0f64.sqrt())).abs() < 1e-12);

        let pc = deficiency_maxima(ProblemKind::PC, 2).unwrap();
        assert_eq!(pc.points[0].0, 2.0);
        assert!((pc.points[0].1 - (2.0 - 2.0f64.sqrt())).abs() < 1e-12);
        assert_eq!(pc.points[1].0, 4.0);
        assert!((pc.points[1].1 - 1.0).abs() < 1e-12);

        assert_eq!(
            deficiency_maxima(ProblemKind::EC, 5),
            Err(PackingError::UnsupportedKind)
        );
    }

    #[test]
    fn deficiency_maxima_match_bound_functions() {
        // the closed forms must agree with the bounds they were read off from
        for k in 1..=100u64 {
            let a = (2 * (k * k - k + 1)) as f64;
            let d = deficiency(ProblemKind::PB, a).unwrap();
            let closed = (2 * k + 1) as f64 - 2.0 * ((k * k - k + 1) as f64).sqrt();
            assert!((d - closed).abs() < 1e-9, "PB k={k}: {d} vs {closed}");
            assert!(d < 2.0);
        }
        for n in 1..=20u64 {
            let a = (n * n - n + 2) as f64;
            let d = deficiency(ProblemKind::PC, a).unwrap();
            let closed = (n + 1) as f64 - a.sqrt();
            assert!((d - closed).abs() < 1e-9, "PC n={n}: {d} vs {closed}");
        }
    }

    #[test]
    fn ruled_surface_examples() {
        assert_eq!(ruled_surface_packing(0, 2.0, 1.0, false).unwrap(), 0.25);
        assert_eq!(ruled_surface_packing(1, 1.0, 3.0, false).unwrap(), 1.0);
        assert_eq!(ruled_surface_packing(1, 2.0, 1.0, true).unwrap(), 0.25);
        // genus 0 untwisted normalizes by swapping
        assert_eq!(ruled_surface_packing(0, 1.0, 2.0, false).unwrap(), 0.25);
        assert_eq!(
            ruled_surface_packing(0, 1.0, 2.5, true),
            Err(PackingError::InvalidCohomologyClass)
        );
    }

    #[test]
    fn ruled_surface_scale_invariance() {
        for alpha in [0.1, 1.0, 17.0] {
            for (g, a, b, t) in [(0, 2.0, 1.0, false), (1, 1.0, 3.0, false), (2, 5.0, 4.0, true)] {
                assert_eq!(
                    ruled_surface_packing(g, a, b, t).unwrap(),
                    ruled_surface_packing(g, alpha * a, alpha * b, t).unwrap()
                );
            }
        }
    }

    #[test]
    fn jiang_examples() {
        assert_eq!(jiang_lower_bound(1.0), 0.5);
        assert!((jiang_lower_bound(3.0) - 1.0 / 6.0).abs() < 1e-15);
        let p = jiang_lower_bound(1e6);
        assert!((p - 0.24965).abs() < 1e-4);
    }

    #[test]
    fn asymptotic_ratio_examples() {
        let r = asymptotic_ratio(ProblemKind::EB, 4.0, &acc()).unwrap();
        assert!((r - 0.552).abs() < 5e-3, "got {r}");
        assert_eq!(asymptotic_ratio(ProblemKind::EB, 1.0, &acc()).unwrap(), 1.0);
        assert!(asymptotic_ratio(ProblemKind::EB, 1000.0, &acc()).unwrap() >= 0.95);
    }

    #[test]
    fn packing_from_bound_is_consistent() {
        let pr = packing_from_bound(ProblemKind::EB, 4.0, &acc()).unwrap();
        assert!((pr.width - 0.37153).abs() < 1e-4);
        let direct = packing_number(pr.width, &[4.0], 0.5, PackingShape::Ellipsoid).unwrap();
        assert!((pr.packing_number - direct).abs() < 1e-12);
        assert!(matches!(pr.provenance, BoundMethod::MultiFold { .. }));
    }

    #[test]
    fn packing_number_stays_below_one_on_own_bounds() {
        // ratios generated from the module's own bounds may approach but
        // never exceed 1
        let mut a = 1.0;
        while a <= 200.0 {
            for p in [ProblemKind::EB, ProblemKind::EC, ProblemKind::PB, ProblemKind::PC] {
                let r = asymptotic_ratio(p, a, &acc()).unwrap();
                assert!(r <= 1.0 + 1e-12, "{p} at {a}: {r}");
            }
            a += 0.5;
        }
    }
}
