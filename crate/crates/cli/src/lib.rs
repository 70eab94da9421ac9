//! Sweep, crossover and query plumbing behind the `symb` binary.
//!
//! Everything here is deterministic for fixed inputs: grid points are
//! indexed, worker threads write into their own slots, and the CSV emitter
//! formats with exactly nine decimals so that repeated runs are
//! byte-identical.

// flag guards are written !(x > y) so that NaN inputs fail them too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::Serialize;

use symb_core::capacities;
use symb_core::domain::{Accuracy, Bound, Ellipsoid, Polydisc, Shape, TargetFamily};
use symb_core::folding::{self, FoldingError};
use symb_core::lagrangian;
use symb_core::packing::ProblemKind;

pub const CSV_HEADER: &str = "a,vol_lb,eh_lb,lb_best,fold_ub,lagr_ub,ub_best,cert";

/// Sweep target: the four 4-dimensional problems plus the higher
/// dimensional polydisc-into-cube family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepProblem {
    Four(ProblemKind),
    PC2n { n: u32 },
}

impl SweepProblem {
    pub fn parse(s: &str, n: Option<u32>) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("pc2n") {
            let n = n.ok_or("--n is required for problem PC2n")?;
            if n < 2 {
                return Err(format!("--n must be at least 2, got {n}"));
            }
            return Ok(SweepProblem::PC2n { n });
        }
        ProblemKind::parse(s)
            .map(SweepProblem::Four)
            .ok_or_else(|| format!("unknown problem {s:?} (expected EB, EC, PB, PC or PC2n)"))
    }

    fn admits(&self, a: f64) -> bool {
        match self {
            SweepProblem::Four(_) => a >= 1.0,
            SweepProblem::PC2n { .. } => a > 2.0,
        }
    }
}

/// One grid point of a sweep. Values in pi-units; absent bounds stay None.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub a: f64,
    pub vol_lb: Option<f64>,
    pub eh_lb: Option<f64>,
    pub lb_best: Option<f64>,
    pub fold_ub: Option<f64>,
    pub lagr_ub: Option<f64>,
    pub ub_best: Option<f64>,
    pub cert: String,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Numeric(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<FoldingError> for CliError {
    fn from(e: FoldingError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

fn evaluate_row(problem: SweepProblem, a: f64, acc: &Accuracy) -> Result<SweepRow, CliError> {
    let (source, target): (Shape, TargetFamily) = match problem {
        SweepProblem::Four(ProblemKind::EB) => (
            Ellipsoid::new(&[1.0, a]).unwrap().into(),
            TargetFamily::ball(2).unwrap(),
        ),
        SweepProblem::Four(ProblemKind::EC) => (
            Ellipsoid::new(&[1.0, a]).unwrap().into(),
            TargetFamily::cube(2).unwrap(),
        ),
        SweepProblem::Four(ProblemKind::PB) => (
            Polydisc::new(&[1.0, a]).unwrap().into(),
            TargetFamily::ball(2).unwrap(),
        ),
        SweepProblem::Four(ProblemKind::PC) => (
            Polydisc::new(&[1.0, a]).unwrap().into(),
            TargetFamily::cube(2).unwrap(),
        ),
        SweepProblem::PC2n { n } => {
            let mut areas = vec![1.0; n as usize - 1];
            areas.push(a);
            (
                Polydisc::new(&areas).unwrap().into(),
                TargetFamily::cube(n as usize).unwrap(),
            )
        }
    };
    let vol = capacities::volume_lower_bound(&source, &target).expect("dimensions match");
    let eh = capacities::eh_lower_bound(&source, &target, 100).expect("dimensions match");
    let lb = if eh.value >= vol.value { eh.clone() } else { vol.clone() };

    let (fold, lagr): (Bound, Option<Bound>) = match problem {
        SweepProblem::Four(ProblemKind::EB) => (folding::s_eb(a, acc)?, Some(lagrangian::l_eb(a))),
        SweepProblem::Four(ProblemKind::EC) => (folding::s_ec(a, acc)?, None),
        SweepProblem::Four(ProblemKind::PB) => (folding::s_pb(a)?, None),
        SweepProblem::Four(ProblemKind::PC) => (folding::s_pc(a)?, Some(lagrangian::l_pc(a))),
        SweepProblem::PC2n { n } => (folding::s_pc_2n(a, n)?, None),
    };
    let ub = match &lagr {
        Some(l) if l.value < fold.value => l.clone(),
        _ => fold.clone(),
    };
    Ok(SweepRow {
        a,
        vol_lb: Some(vol.value),
        eh_lb: Some(eh.value),
        lb_best: Some(lb.value),
        fold_ub: Some(fold.value),
        lagr_ub: lagr.as_ref().map(|b| b.value),
        ub_best: Some(ub.value),
        cert: format!("lb={};ub={}", lb.method, ub.method),
    })
}

/// Evaluate the sweep grid, optionally across threads; output order is by
/// grid index regardless of scheduling.
pub fn sweep(
    problem: SweepProblem,
    a_from: f64,
    a_to: f64,
    step: f64,
    acc: &Accuracy,
    threads: usize,
) -> Result<Vec<SweepRow>, CliError> {
    if !(step > 0.0) {
        return Err(CliError::Usage(format!("--step must be positive, got {step}")));
    }
    if a_from > a_to {
        return Err(CliError::Usage(format!(
            "--a-from ({a_from}) must not exceed --a-to ({a_to})"
        )));
    }
    if !problem.admits(a_from) {
        return Err(CliError::Usage(format!(
            "grid start {a_from} below the domain of this problem"
        )));
    }
    let count = ((a_to - a_from) / step + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..count).map(|i| a_from + i as f64 * step).collect();
    let threads = threads.max(1).min(grid.len().max(1));

    if threads == 1 {
        return grid
            .iter()
            .map(|&a| evaluate_row(problem, a, acc))
            .collect();
    }

    let mut slots: Vec<Option<Result<SweepRow, CliError>>> = Vec::new();
    slots.resize_with(grid.len(), || None);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots_mutex = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= grid.len() {
                    break;
                }
                let row = evaluate_row(problem, grid[i], acc);
                slots_mutex.lock().unwrap()[i] = Some(row);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.expect("every grid slot filled"))
        .collect()
}

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.9}"),
        None => String::new(),
    }
}

/// Fixed 9-decimal CSV with LF newlines; missing values are empty fields.
pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{:.9},{},{},{},{},{},{},{}\n",
            r.a,
            fmt_opt(r.vol_lb),
            fmt_opt(r.eh_lb),
            fmt_opt(r.lb_best),
            fmt_opt(r.fold_ub),
            fmt_opt(r.lagr_ub),
            fmt_opt(r.ub_best),
            r.cert
        ));
    }
    out
}

pub fn to_json(rows: &[SweepRow]) -> String {
    let mut out = serde_json::to_string_pretty(rows).expect("rows serialize");
    out.push('\n');
    out
}

/// A pointwise bound function of the sweep parameter.
pub type BoundFn = fn(f64, &Accuracy) -> Result<f64, FoldingError>;

/// Named bound functions the crossover command can compare.
pub fn bound_function(name: &str) -> Option<BoundFn> {
    fn f_s_eb(a: f64, acc: &Accuracy) -> Result<f64, FoldingError> {
        Ok(folding::s_eb(a, acc)?.value)
    }
    fn f_s_ec(a: f64, acc: &Accuracy) -> Result<f64, FoldingError> {
        Ok(folding::s_ec(a, acc)?.value)
    }
    fn f_s_pb(a: f64, _: &Accuracy) -> Result<f64, FoldingError> {
        Ok(folding::s_pb(a)?.value)
    }
    fn f_s_pc(a: f64, _: &Accuracy) -> Result<f64, FoldingError> {
        Ok(folding::s_pc(a)?.value)
    }
    fn f_l_eb(a: f64, _: &Accuracy) -> Result<f64, FoldingError> {
        Ok(lagrangian::l_eb(a).value)
    }
    fn f_l_pc(a: f64, _: &Accuracy) -> Result<f64, FoldingError> {
        Ok(lagrangian::l_pc(a).value)
    }
    fn f_vol_eb(a: f64, _: &Accuracy) -> Result<f64, FoldingError> {
        Ok(a.sqrt())
    }
    fn f_vol_ec(a: f64, _: &Accuracy) -> Result<f64, FoldingError> {
        Ok((a / 2.0).sqrt())
    }
    fn f_vol_pb(a: f64, _: &Accuracy) -> Result<f64, FoldingError> {
        Ok((2.0 * a).sqrt())
    }
    fn f_vol_pc(a: f64, _: &Accuracy) -> Result<f64, FoldingError> {
        Ok(a.sqrt())
    }
    match name.to_ascii_lowercase().as_str() {
        "s_eb" => Some(f_s_eb),
        "s_ec" => Some(f_s_ec),
        "s_pb" => Some(f_s_pb),
        "s_pc" => Some(f_s_pc),
        "l_eb" => Some(f_l_eb),
        "l_pc" => Some(f_l_pc),
        "volume_eb" => Some(f_vol_eb),
        "volume_ec" => Some(f_vol_ec),
        "volume_pb" => Some(f_vol_pb),
        "volume_pc" => Some(f_vol_pc),
        _ => None,
    }
}

/// Bisect for a root of right(a) - left(a) on [lo, hi]. Errors if the
/// difference does not change sign on the bracket.
pub fn crossover(
    left: &str,
    right: &str,
    lo: f64,
    hi: f64,
    tol: f64,
    acc: &Accuracy,
) -> Result<f64, CliError> {
    let f = bound_function(left)
        .ok_or_else(|| CliError::Usage(format!("unknown bound function {left:?}")))?;
    let g = bound_function(right)
        .ok_or_else(|| CliError::Usage(format!("unknown bound function {right:?}")))?;
    if !(lo < hi) {
        return Err(CliError::Usage(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
    }
    let h = |a: f64| -> Result<f64, CliError> { Ok(g(a, acc)? - f(a, acc)?) };
    let mut fa = h(lo)?;
    let fb = h(hi)?;
    if !(fa * fb < 0.0) {
        return Err(CliError::Numeric(format!(
            "no sign change of {right} - {left} on [{lo}, {hi}]"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    while (b - a) / 2.0 > tol / 2.0 {
        let mid = 0.5 * (a + b);
        let fm = h(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Rigidity verdict for an ellipsoid source against a ball or cube target.
pub fn rigidity_verdict(radii: &[f64], target: &TargetFamily, capacity: f64) -> Result<String, CliError> {
    let e = Ellipsoid::new(radii).map_err(|err| CliError::Usage(err.to_string()))?;
    if e.half_dimension() != target.half_dimension {
        return Err(CliError::Usage(format!(
            "source half-dimension {} does not match target {}",
            e.half_dimension(),
            target.half_dimension
        )));
    }
    let embeds_linearly = match target.family {
        symb_core::Family::Ball => {
            let ball = Ellipsoid::ball(capacity, target.half_dimension).unwrap();
            capacities::linear_embeds(&e, &ball).expect("dimensions checked")
        }
        // E(a_1..a_n) sits inside C(A) iff its largest radius fits
        symb_core::Family::Cube => *e.radii().last().unwrap() <= capacity,
    };
    if embeds_linearly {
        return Ok("LINEARLY-EMBEDS (Eq. 2)".to_string());
    }
    if target.family == symb_core::Family::Ball && capacities::theorem1_excludes(&e, capacity) {
        return Ok("EXCLUDED (Theorem 1)".to_string());
    }
    let lb = capacities::best_lower_bound(&Shape::Ellipsoid(e), target, 100)
        .expect("dimensions checked");
    if lb.value > capacity {
        return Ok(match lb.method {
            symb_core::BoundMethod::Volume => "EXCLUDED (volume)".to_string(),
            _ => "EXCLUDED (EH)".to_string(),
        });
    }
    Ok("NOT-EXCLUDED".to_string())
}
