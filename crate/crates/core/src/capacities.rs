//! Ekeland-Hofer capacity spectra and the rigidity gates built on them.
//!
//! For an ellipsoid the capacities enumerate the action spectrum
//! {m * a_i | m >= 1} in increasing order; for a polydisc c_k = k * a_1.
//! The unit targets have the closed forms c_k(B(1)) = ceil(k/n) and
//! c_k(C(1)) = k, which we use instead of spectrum merging.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::domain::{Bound, BoundMethod, Ellipsoid, Family, Shape, TargetFamily};

#[derive(Debug, Error, PartialEq)]
pub enum CapacityError {
    #[error("source half-dimension {source_dim} does not match target half-dimension {target_dim}")]
    DimensionMismatch { source_dim: usize, target_dim: usize },
}

/// The `count` smallest spectrum values of an ellipsoid, with multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPrefix {
    values: Vec<f64>,
}

impl SpectrumPrefix {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }
}

/// Spectrum element with its provenance: value = multiple * radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumElement {
    pub value: f64,
    pub multiple: u64,
    pub radius_idx: usize,
}

struct HeapEntry {
    value: f64,
    radius_idx: usize,
    multiple: u64,
}

// Min-heap ordering; ties broken by radius index for determinism.
impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .value
            .total_cmp(&self.value)
            .then(other.radius_idx.cmp(&self.radius_idx))
    }
}

/// k-way merge of the multiple streams {m * a_i : m >= 1}, smallest first,
/// keeping track of which multiple of which radius produced each element.
pub fn spectrum_prefix_elements(e: &Ellipsoid, count: usize) -> Vec<SpectrumElement> {
    assert!(count >= 1, "count must be at least 1");
    let mut heap: BinaryHeap<HeapEntry> = e
        .radii()
        .iter()
        .enumerate()
        .map(|(i, &a)| HeapEntry {
            value: a,
            radius_idx: i,
            multiple: 1,
        })
        .collect();
    let mut elements = Vec::with_capacity(count);
    while elements.len() < count {
        let top = heap.pop().expect("heap never empties");
        elements.push(SpectrumElement {
            value: top.value,
            multiple: top.multiple,
            radius_idx: top.radius_idx,
        });
        let m = top.multiple + 1;
        heap.push(HeapEntry {
            value: m as f64 * e.radii()[top.radius_idx],
            radius_idx: top.radius_idx,
            multiple: m,
        });
    }
    elements
}

/// The `count` smallest spectrum values, nondecreasing, with multiplicity.
pub fn spectrum_prefix(e: &Ellipsoid, count: usize) -> SpectrumPrefix {
    SpectrumPrefix {
        values: spectrum_prefix_elements(e, count)
            .into_iter()
            .map(|el| el.value)
            .collect(),
    }
}

/// k-th Ekeland-Hofer capacity of an ellipsoid or polydisc, pi-units.
pub fn eh_capacity(shape: &Shape, k: usize) -> f64 {
    assert!(k >= 1, "capacity index must be at least 1");
    match shape {
        Shape::Ellipsoid(e) => spectrum_prefix(e, k).values[k - 1],
        Shape::Polydisc(p) => k as f64 * p.areas()[0],
    }
}

fn check_dimensions(shape: &Shape, target: &TargetFamily) -> Result<(), CapacityError> {
    if shape.half_dimension() != target.half_dimension {
        return Err(CapacityError::DimensionMismatch {
            source_dim: shape.half_dimension(),
            target_dim: target.half_dimension,
        });
    }
    Ok(())
}

/// Capacity obstruction: sup over k <= k_max of c_k(source) / c_k(unit target).
///
/// No symplectic embedding exists into a member of the target family with
/// capacity strictly below the returned value.
///
/// Every ratio is (m/t) * radius with small integers m, t; candidates are
/// compared by integer cross-multiplication (one rounded product per side)
/// so that mathematically equal ratios never misorder and the smallest k
/// wins ties. The winning value then rounds only once when t = 1, which
/// keeps the pinched-ellipsoid bound bit-exact.
pub fn eh_lower_bound(
    source: &Shape,
    target: &TargetFamily,
    k_max: usize,
) -> Result<Bound, CapacityError> {
    check_dimensions(source, target)?;
    // (multiple, radius) per capacity index
    let numerators: Vec<(u64, f64)> = match source {
        Shape::Ellipsoid(e) => spectrum_prefix_elements(e, k_max)
            .into_iter()
            .map(|el| (el.multiple, e.radii()[el.radius_idx]))
            .collect(),
        Shape::Polydisc(p) => (1..=k_max as u64).map(|k| (k, p.areas()[0])).collect(),
    };
    let unit_target = |k: usize| -> u64 {
        match target.family {
            Family::Ball => k.div_ceil(target.half_dimension) as u64,
            Family::Cube => k as u64,
        }
    };
    let mut best_k = 1usize;
    for k in 2..=k_max {
        let (m_new, a_new) = numerators[k - 1];
        let (m_best, a_best) = numerators[best_k - 1];
        let t_new = unit_target(k);
        let t_best = unit_target(best_k);
        // m_new/t_new * a_new > m_best/t_best * a_best, cross-multiplied
        if ((m_new * t_best) as f64) * a_new > ((m_best * t_new) as f64) * a_best {
            best_k = k;
        }
    }
    let (m, a) = numerators[best_k - 1];
    let t = unit_target(best_k);
    let value = if t == 1 {
        m as f64 * a
    } else {
        (m as f64 * a) / t as f64
    };
    Ok(Bound::lower(
        value,
        BoundMethod::EkelandHofer { k: best_k as u32 },
    ))
}

/// Volume condition: smallest target capacity whose member has at least the
/// source's volume. Ball: (n! vol)^{1/n}; cube: vol^{1/n}.
pub fn volume_lower_bound(source: &Shape, target: &TargetFamily) -> Result<Bound, CapacityError> {
    check_dimensions(source, target)?;
    let n = target.half_dimension;
    let vol = source.volume();
    let value = match target.family {
        Family::Ball => (crate::domain::factorial(n) * vol).powf(1.0 / n as f64),
        Family::Cube => vol.powf(1.0 / n as f64),
    };
    Ok(Bound::lower(value, BoundMethod::Volume))
}

/// Pointwise max of the capacity and volume obstructions; ties go to
/// Ekeland-Hofer.
pub fn best_lower_bound(
    source: &Shape,
    target: &TargetFamily,
    k_max: usize,
) -> Result<Bound, CapacityError> {
    let eh = eh_lower_bound(source, target, k_max)?;
    let vol = volume_lower_bound(source, target)?;
    Ok(if eh.value >= vol.value { eh } else { vol })
}

/// Linear embedding criterion for ellipsoids: a_i <= a_i' for all i.
pub fn linear_embeds(e: &Ellipsoid, e2: &Ellipsoid) -> Result<bool, CapacityError> {
    if e.half_dimension() != e2.half_dimension() {
        return Err(CapacityError::DimensionMismatch {
            source_dim: e.half_dimension(),
            target_dim: e2.half_dimension(),
        });
    }
    Ok(e.radii()
        .iter()
        .zip(e2.radii())
        .all(|(a, a2)| a <= a2))
}

/// Pinched-ellipsoid exclusion: with a_n <= 2 a_1 no embedding exists into
/// a ball of capacity strictly below a_n.
pub fn theorem1_excludes(e: &Ellipsoid, ball_capacity: f64) -> bool {
    let radii = e.radii();
    let a1 = radii[0];
    let an = radii[radii.len() - 1];
    an <= 2.0 * a1 && ball_capacity < an
}

/// Higher-order invariants e_i of an ellipsoid: the radii themselves.
pub fn ellipsoid_e_invariants(e: &Ellipsoid) -> Vec<f64> {
    e.radii().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Direction, Polydisc};

    fn ell(radii: &[f64]) -> Ellipsoid {
        Ellipsoid::new(radii).unwrap()
    }

    fn shape_e(radii: &[f64]) -> Shape {
        Shape::Ellipsoid(ell(radii))
    }

    fn shape_p(areas: &[f64]) -> Shape {
        Shape::Polydisc(Polydisc::new(areas).unwrap())
    }

    #[test]
    fn spectrum_examples() {
        assert_eq!(
            spectrum_prefix(&ell(&[1.0, 2.0]), 4).values(),
            &[1.0, 2.0, 2.0, 3.0]
        );
        assert_eq!(
            spectrum_prefix(&ell(&[1.0, 1.0]), 4).values(),
            &[1.0, 1.0, 2.0, 2.0]
        );
        assert_eq!(
            spectrum_prefix(&ell(&[1.0, 3.0, 3.0]), 3).values(),
            &[1.0, 2.0, 3.0]
        );
    }

    #[test]
    fn eh_capacity_examples() {
        assert_eq!(eh_capacity(&shape_e(&[1.0, 2.0]), 3), 2.0);
        assert_eq!(eh_capacity(&shape_p(&[1.0, 5.0]), 3), 3.0);
        assert_eq!(eh_capacity(&shape_e(&[1.0, 1.0]), 1), 1.0);
    }

    #[test]
    fn eh_lower_bound_examples() {
        let ball2 = TargetFamily::ball(2).unwrap();
        let ball3 = TargetFamily::ball(3).unwrap();
        let b = eh_lower_bound(&shape_e(&[1.0, 1.8]), &ball2, 100).unwrap();
        assert_eq!(b.value, 1.8);
        assert_eq!(b.direction, Direction::Lower);
        let b = eh_lower_bound(&shape_e(&[1.0, 3.0, 3.0]), &ball3, 100).unwrap();
        assert_eq!(b.value, 3.0);
        let b = eh_lower_bound(&shape_e(&[1.0, 3.0]), &ball2, 100).unwrap();
        assert_eq!(b.value, 2.0);
        assert_eq!(b.method, BoundMethod::EkelandHofer { k: 2 });
    }

    #[test]
    fn eh_lower_bound_dimension_mismatch() {
        let ball3 = TargetFamily::ball(3).unwrap();
        assert!(matches!(
            eh_lower_bound(&shape_e(&[1.0, 2.0]), &ball3, 10),
            Err(CapacityError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn volume_lower_bound_examples() {
        let ball2 = TargetFamily::ball(2).unwrap();
        let cube2 = TargetFamily::cube(2).unwrap();
        assert_eq!(
            volume_lower_bound(&shape_e(&[1.0, 4.0]), &ball2).unwrap().value,
            2.0
        );
        assert_eq!(
            volume_lower_bound(&shape_p(&[1.0, 9.0]), &cube2).unwrap().value,
            3.0
        );
        assert_eq!(
            volume_lower_bound(&shape_e(&[1.0, 1.0]), &ball2).unwrap().value,
            1.0
        );
    }

    #[test]
    fn best_lower_bound_examples() {
        let ball2 = TargetFamily::ball(2).unwrap();
        let b = best_lower_bound(&shape_e(&[1.0, 1.5]), &ball2, 100).unwrap();
        assert_eq!(b.value, 1.5);
        assert!(matches!(b.method, BoundMethod::EkelandHofer { .. }));

        let b = best_lower_bound(&shape_e(&[1.0, 9.0]), &ball2, 100).unwrap();
        assert_eq!(b.value, 3.0);
        assert_eq!(b.method, BoundMethod::Volume);

        // tie at value 2: EH wins
        let b = best_lower_bound(&shape_e(&[1.0, 4.0]), &ball2, 100).unwrap();
        assert_eq!(b.value, 2.0);
        assert!(matches!(b.method, BoundMethod::EkelandHofer { .. }));
    }

    #[test]
    fn linear_embeds_examples() {
        assert!(linear_embeds(&ell(&[1.0, 2.0]), &ell(&[1.5, 2.0])).unwrap());
        assert!(!linear_embeds(&ell(&[1.0, 3.0]), &ell(&[2.0, 2.0])).unwrap());
        assert!(linear_embeds(&ell(&[1.0, 1.0]), &ell(&[1.0, 1.0])).unwrap());
        assert!(matches!(
            linear_embeds(&ell(&[1.0]), &ell(&[1.0, 1.0])),
            Err(CapacityError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn theorem1_examples() {
        assert!(theorem1_excludes(&ell(&[1.0, 1.8]), 1.7));
        assert!(!theorem1_excludes(&ell(&[1.0, 2.0]), 2.0));
        assert!(!theorem1_excludes(&ell(&[1.0, 3.0]), 2.5));
    }

    #[test]
    fn e_invariants_are_radii() {
        assert_eq!(
            ellipsoid_e_invariants(&ell(&[1.0, 2.0, 5.0])),
            vec![1.0, 2.0, 5.0]
        );
        assert_eq!(ellipsoid_e_invariants(&ell(&[1.0, 1.0])), vec![1.0, 1.0]);
        assert_eq!(
            ellipsoid_e_invariants(&ell(&[1.0, 1.9])),
            vec![1.0, 1.9]
        );
    }

    #[test]
    fn eh_bound_for_e1a_into_four_ball() {
        let ball2 = TargetFamily::ball(2).unwrap();
        for a in [1.0, 1.25, 1.5, 1.9, 2.0] {
            let b = eh_lower_bound(&shape_e(&[1.0, a]), &ball2, 100).unwrap();
            assert_eq!(b.value, a, "a = {a}");
        }
        for a in [2.1, 3.0, 7.0, 50.0] {
            let b = eh_lower_bound(&shape_e(&[1.0, a]), &ball2, 100).unwrap();
            assert_eq!(b.value, 2.0, "a = {a}");
        }
    }

    #[test]
    fn unit_target_closed_forms_match_spectra() {
        // ball: ceil(k/n) equals the equal-radii spectrum; cube: k equals
        // the polydisc capacity formula at a_1 = 1
        for n in 1..=4usize {
            let ball = ell(&vec![1.0; n]);
            let spectrum = spectrum_prefix(&ball, 30);
            for k in 1..=30usize {
                assert_eq!(spectrum.values()[k - 1], k.div_ceil(n) as f64, "n={n} k={k}");
                let cube = shape_p(&vec![1.0; n]);
                assert_eq!(eh_capacity(&cube, k), k as f64);
            }
        }
    }

    #[test]
    fn theorem1_implies_lower_bound_exceeds_capacity() {
        let ball2 = TargetFamily::ball(2).unwrap();
        for (a1, a2, cap) in [(1.0, 1.8, 1.7), (2.0, 3.5, 3.4), (1.0, 2.0, 1.99)] {
            let e = ell(&[a1, a2]);
            assert!(theorem1_excludes(&e, cap));
            let lb = best_lower_bound(&Shape::Ellipsoid(e), &ball2, 100).unwrap();
            assert!(lb.value > cap);
        }
    }
}
