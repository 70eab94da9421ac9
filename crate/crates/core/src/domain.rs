//! Core shape types and unit conventions.
//!
//! All areas and capacities are stored in units of pi: a stored value `a`
//! stands for the capacity `a * pi`. Volumes are reported as the coefficient
//! of pi^n. Radii and areas are kept sorted nondecreasing; permuting the
//! coordinate planes is a linear symplectomorphism, so nothing is lost.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DomainError {
    #[error("entries must be strictly positive, got {0}")]
    NonPositiveEntry(f64),
    #[error("half-dimension must be at least 1")]
    EmptyShape,
    #[error("value must be strictly positive, got {0}")]
    NonPositiveValue(f64),
    #[error("accuracy must be strictly positive, got {0}")]
    NonPositiveAccuracy(f64),
    #[error("max_iter must be at least 1")]
    ZeroMaxIter,
}

fn checked_sorted(entries: &[f64]) -> Result<Vec<f64>, DomainError> {
    if entries.is_empty() {
        return Err(DomainError::EmptyShape);
    }
    for &x in entries {
        if !(x > 0.0) || !x.is_finite() {
            return Err(DomainError::NonPositiveEntry(x));
        }
    }
    let mut v = entries.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Open ellipsoid E(a_1, ..., a_n), radii in pi-units, sorted nondecreasing.
///
/// A ball B^{2n}(a) is the equal-radii case.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    radii: Vec<f64>,
}

impl Ellipsoid {
    pub fn new(radii: &[f64]) -> Result<Self, DomainError> {
        Ok(Self {
            radii: checked_sorted(radii)?,
        })
    }

    pub fn ball(a: f64, half_dimension: usize) -> Result<Self, DomainError> {
        if half_dimension == 0 {
            return Err(DomainError::EmptyShape);
        }
        Self::new(&vec![a; half_dimension])
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn half_dimension(&self) -> usize {
        self.radii.len()
    }

    /// Volume as the coefficient of pi^n: (prod a_i) / n!.
    pub fn volume(&self) -> f64 {
        self.radii.iter().product::<f64>() / factorial(self.radii.len())
    }
}

/// Polydisc P(a_1, ..., a_n), factor areas in pi-units, sorted nondecreasing.
///
/// A cube C^{2n}(a) is the equal-areas case.
#[derive(Debug, Clone, PartialEq)]
pub struct Polydisc {
    areas: Vec<f64>,
}

impl Polydisc {
    pub fn new(areas: &[f64]) -> Result<Self, DomainError> {
        Ok(Self {
            areas: checked_sorted(areas)?,
        })
    }

    pub fn cube(a: f64, half_dimension: usize) -> Result<Self, DomainError> {
        if half_dimension == 0 {
            return Err(DomainError::EmptyShape);
        }
        Self::new(&vec![a; half_dimension])
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn half_dimension(&self) -> usize {
        self.areas.len()
    }

    /// Volume as the coefficient of pi^n: prod a_i.
    pub fn volume(&self) -> f64 {
        self.areas.iter().product()
    }
}

/// Either source shape. Bounds that accept both take this.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ellipsoid(Ellipsoid),
    Polydisc(Polydisc),
}

impl Shape {
    pub fn half_dimension(&self) -> usize {
        match self {
            Shape::Ellipsoid(e) => e.half_dimension(),
            Shape::Polydisc(p) => p.half_dimension(),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Shape::Ellipsoid(e) => e.volume(),
            Shape::Polydisc(p) => p.volume(),
        }
    }
}

impl From<Ellipsoid> for Shape {
    fn from(e: Ellipsoid) -> Self {
        Shape::Ellipsoid(e)
    }
}

impl From<Polydisc> for Shape {
    fn from(p: Polydisc) -> Self {
        Shape::Polydisc(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Ball,
    Cube,
}

/// Target family for the embedding problems: balls or cubes of a fixed
/// half-dimension, parametrized by their capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TargetFamily {
    pub family: Family,
    pub half_dimension: usize,
}

impl TargetFamily {
    pub fn new(family: Family, half_dimension: usize) -> Result<Self, DomainError> {
        if half_dimension == 0 {
            return Err(DomainError::EmptyShape);
        }
        Ok(Self {
            family,
            half_dimension,
        })
    }

    pub fn ball(half_dimension: usize) -> Result<Self, DomainError> {
        Self::new(Family::Ball, half_dimension)
    }

    pub fn cube(half_dimension: usize) -> Result<Self, DomainError> {
        Self::new(Family::Cube, half_dimension)
    }

    /// Volume of the member with capacity `value`, as the coefficient of pi^n.
    pub fn volume_at(&self, value: f64) -> f64 {
        let n = self.half_dimension;
        match self.family {
            Family::Ball => value.powi(n as i32) / factorial(n),
            Family::Cube => value.powi(n as i32),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Lower,
    Upper,
}

/// How a bound was produced, together with its certificate.
///
/// The certificate carries exactly the data needed to re-derive the value:
/// the fold point and fold count for the multiple-folding optimizers, the
/// branch index for the closed-form fold bounds, the k-vector for the
/// Lagrangian constructions, the capacity index for Ekeland-Hofer.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundMethod {
    Volume,
    EkelandHofer { k: u32 },
    Inclusion,
    MultiFold { u0: f64, folds: u32 },
    ClosedFormFold { k: u32 },
    LagrangianM { ks: Vec<u64> },
    LagrangianN { ks: Vec<u64> },
    Diagonal,
}

impl std::fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundMethod::Volume => write!(f, "vol"),
            BoundMethod::EkelandHofer { k } => write!(f, "EH(k={k})"),
            BoundMethod::Inclusion => write!(f, "incl"),
            BoundMethod::MultiFold { u0, folds } => write!(f, "fold(u0={u0:.9},N={folds})"),
            BoundMethod::ClosedFormFold { k } => write!(f, "cf(k={k})"),
            BoundMethod::LagrangianM { ks } => {
                write!(f, "lagM(")?;
                for (i, k) in ks.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{k}")?;
                }
                write!(f, ")")
            }
            BoundMethod::LagrangianN { ks } => {
                write!(f, "lagN(")?;
                for (i, k) in ks.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{k}")?;
                }
                write!(f, ")")
            }
            BoundMethod::Diagonal => write!(f, "diag"),
        }
    }
}

/// A certified one-sided bound on an embedding capacity, in pi-units.
///
/// Upper bounds are infima: the constructions achieve any capacity strictly
/// above `value`. Lower bounds are obstructions: no embedding exists into a
/// target of capacity strictly below `value`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub direction: Direction,
    pub method: BoundMethod,
}

impl Bound {
    pub fn new(value: f64, direction: Direction, method: BoundMethod) -> Self {
        assert!(
            value > 0.0 && value.is_finite(),
            "bound value must be positive and finite, got {value}"
        );
        Self {
            value,
            direction,
            method,
        }
    }

    pub fn lower(value: f64, method: BoundMethod) -> Self {
        Self::new(value, Direction::Lower, method)
    }

    pub fn upper(value: f64, method: BoundMethod) -> Self {
        Self::new(value, Direction::Upper, method)
    }
}

/// Bisection tolerance plus a loop guard. The guard turns a numerics bug
/// into a diagnostic instead of a hang; the folding loops are proved to
/// terminate, so hitting it signals an implementation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    pub acc: f64,
    pub max_iter: u64,
}

pub const DEFAULT_MAX_ITER: u64 = 1_000_000;

impl Accuracy {
    pub fn new(acc: f64, max_iter: u64) -> Result<Self, DomainError> {
        if !(acc > 0.0) || !acc.is_finite() {
            return Err(DomainError::NonPositiveAccuracy(acc));
        }
        if max_iter == 0 {
            return Err(DomainError::ZeroMaxIter);
        }
        Ok(Self { acc, max_iter })
    }

    pub fn from_acc(acc: f64) -> Result<Self, DomainError> {
        Self::new(acc, DEFAULT_MAX_ITER)
    }
}

impl Default for Accuracy {
    fn default() -> Self {
        Self {
            acc: 1e-9,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Sorted copy of raw radii or areas; errors on nonpositive entries.
pub fn normalize(raw: &[f64]) -> Result<Vec<f64>, DomainError> {
    checked_sorted(raw)
}
