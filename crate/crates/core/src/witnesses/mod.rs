//! Constructive evidence that `T⁻¹` is not positive: a point `y ∈ K` whose
//! preimage `x = T⁻¹y` lies outside `K`.
//!
//! Witnesses use asymmetric tolerances. `y` must have margin `≥ −1e-9`, `x`
//! must have margin `< −1e-6`, and `T(x)` must reproduce `y` to
//! `1e-9·(1 + ‖y‖∞)`. Every reported witness is re-verified against these
//! bounds, independently of the strategy that produced it.

mod crossing;
mod decompose;
mod search;

use serde::Serialize;

pub use crossing::{boundary_crossing, CrossingResult, BISECTION_MAX_ITER, BISECTION_TOL};
pub use decompose::{decompose_2x2, CaseAnalysis, Decomposition2x2, Factorization, GridSearch, Permutation};
pub use search::{
    boundary_functional_witness, extremal_witness, interior_promotion_check, nonpositive_inverse_witness,
    smallest_scaling_n, witness_from_image, ExtremalWitness,
};

use crate::cones::{margin, ConeSpec, Point};
use crate::error::Result;
use crate::operators::LinearMap;

/// Largest admissible margin of a witness preimage.
pub const X_MARGIN_MAX: f64 = -1e-6;
/// Smallest admissible margin of a witness image.
pub const Y_MARGIN_MIN: f64 = -1e-9;
/// Relative bound on `‖T(x) − y‖∞ / (1 + ‖y‖∞)`.
pub const RESIDUAL_MAX: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Direct,
    BoundaryFunctional,
    Extremal,
    Scaling,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Direct => "direct",
            Strategy::BoundaryFunctional => "boundary_functional",
            Strategy::Extremal => "extremal",
            Strategy::Scaling => "scaling",
        }
    }
}

/// Attempts spent by each strategy of the cascade.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StrategyAttempts {
    pub direct: usize,
    pub boundary_functional: usize,
    pub extremal: usize,
    pub scaling: usize,
}

impl StrategyAttempts {
    pub fn total(&self) -> usize {
        self.direct + self.boundary_functional + self.extremal + self.scaling
    }

    fn add(&mut self, s: Strategy, n: usize) {
        match s {
            Strategy::Direct => self.direct += n,
            Strategy::BoundaryFunctional => self.boundary_functional += n,
            Strategy::Extremal => self.extremal += n,
            Strategy::Scaling => self.scaling += n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub found: bool,
    /// Strategy that produced the witness; `None` when nothing was found.
    pub strategy: Option<Strategy>,
    pub witness_y: Option<Point>,
    pub preimage_x: Option<Point>,
    pub y_margin: Option<f64>,
    pub x_margin: Option<f64>,
    /// `‖T(x) − y‖∞ / (1 + ‖y‖∞)`.
    pub residual: Option<f64>,
    pub attempts: usize,
    pub attempts_by_strategy: StrategyAttempts,
    pub scaling_n: Option<u64>,
    /// Why strategies were skipped or failed, in cascade order.
    pub notes: Vec<String>,
}

impl WitnessReport {
    pub(crate) fn not_found(attempts: StrategyAttempts, notes: Vec<String>) -> Self {
        WitnessReport {
            found: false,
            strategy: None,
            witness_y: None,
            preimage_x: None,
            y_margin: None,
            x_margin: None,
            residual: None,
            attempts: attempts.total(),
            attempts_by_strategy: attempts,
            scaling_n: None,
            notes,
        }
    }

    /// Whether the invariant triple holds for the stored witness.
    pub fn is_sound(&self, t: &LinearMap, cone: &ConeSpec) -> bool {
        match (&self.witness_y, &self.preimage_x) {
            (Some(y), Some(x)) => check_witness(t, cone, y, x).ok().flatten().is_some(),
            _ => !self.found,
        }
    }
}

/// Margins and residual of a verified witness, computed from scratch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Verified {
    pub y_margin: f64,
    pub x_margin: f64,
    pub residual: f64,
}

/// `Some` exactly when `(y, x)` satisfies the witness bounds for `T`.
pub(crate) fn check_witness(t: &LinearMap, cone: &ConeSpec, y: &Point, x: &Point) -> Result<Option<Verified>> {
    if !y.is_finite() || !x.is_finite() {
        return Ok(None);
    }
    let y_margin = margin(cone, y)?;
    let x_margin = margin(cone, x)?;
    let residual = t.apply(x)?.dist_inf(y)? / (1.0 + y.norm_inf());
    let ok = y_margin >= Y_MARGIN_MIN && x_margin < X_MARGIN_MAX && residual <= RESIDUAL_MAX;
    Ok(ok.then_some(Verified {
        y_margin,
        x_margin,
        residual,
    }))
}

pub(crate) fn found_report(
    strategy: Strategy,
    y: Point,
    x: Point,
    v: Verified,
    attempts: StrategyAttempts,
    notes: Vec<String>,
) -> WitnessReport {
    WitnessReport {
        found: true,
        strategy: Some(strategy),
        witness_y: Some(y),
        preimage_x: Some(x),
        y_margin: Some(v.y_margin),
        x_margin: Some(v.x_margin),
        residual: Some(v.residual),
        attempts: attempts.total(),
        attempts_by_strategy: attempts,
        scaling_n: None,
        notes,
    }
}
