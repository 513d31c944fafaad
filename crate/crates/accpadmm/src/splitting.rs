//! Degenerate proximal point engine.
//!
//! Everything here talks to the problem only through a [`ResolventOracle`]:
//! the map `w ↦ w̄ = (M + T)⁻¹ M w` and the seminorm `‖·‖_M`. The
//! preconditioner itself is never formed.
//!
//! The accelerated step with `α = 2` is the Halpern iteration anchored at the
//! last restart point:
//!
//! ```
//! use accpadmm::splitting::{accel_step, AccelState, ResolventOracle};
//!
//! // T̂w = w/2 on ℝ, fixed point 0.
//! struct Half;
//! impl ResolventOracle for Half {
//!     type Point = Vec<f64>;
//!     type Error = std::convert::Infallible;
//!     fn resolve(&self, w: &Vec<f64>) -> Result<Vec<f64>, Self::Error> {
//!         Ok(vec![0.5 * w[0]])
//!     }
//!     fn seminorm(&self, w: &Vec<f64>) -> f64 { w[0].abs() }
//!     fn dim(&self) -> usize { 1 }
//! }
//!
//! let mut state = AccelState::new(vec![1.0], 2.0, 1.0).unwrap();
//! for _ in 0..10 {
//!     state = accel_step(&state, &Half).unwrap().0;
//! }
//! // (k+1)wᵏ − kŵᵏ stays at the anchor
//! let k = state.k() as f64;
//! assert!(((k + 1.0) * state.w()[0] - k * state.w_hat()[0] - 1.0).abs() < 1e-12);
//! ```

use std::fmt;

/// A vector-space element the engine can combine.
pub trait Point: Clone {
    fn dim(&self) -> usize;
    /// `self ← a·self + b·other`
    fn lincomb(&mut self, a: f64, other: &Self, b: f64);
}

impl Point for Vec<f64> {
    fn dim(&self) -> usize {
        self.len()
    }

    fn lincomb(&mut self, a: f64, other: &Self, b: f64) {
        for (s, o) in self.iter_mut().zip(other) {
            *s = a * *s + b * o;
        }
    }
}

/// `w ↦ T̂w = (M + T)⁻¹ M w` together with `‖·‖_M`.
///
/// Implementations must be deterministic.
pub trait ResolventOracle {
    type Point: Point;
    type Error;

    fn resolve(&self, w: &Self::Point) -> Result<Self::Point, Self::Error>;
    fn seminorm(&self, w: &Self::Point) -> f64;
    fn dim(&self) -> usize;
}

#[derive(Debug, Clone, PartialEq)]
pub enum SplittingError<E> {
    Config(String),
    Dimension { expected: usize, found: usize },
    Oracle(E),
}

impl<E: fmt::Display> fmt::Display for SplittingError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(s) => write!(f, "invalid configuration: {s}"),
            Self::Dimension { expected, found } => {
                write!(f, "point dimension {found} does not match oracle dimension {expected}")
            }
            Self::Oracle(e) => write!(f, "resolvent evaluation failed: {e}"),
        }
    }
}

impl<E: fmt::Debug + fmt::Display> std::error::Error for SplittingError<E> {}

fn check_dim<O: ResolventOracle>(
    w: &O::Point,
    oracle: &O,
) -> Result<(), SplittingError<O::Error>> {
    if w.dim() != oracle.dim() {
        return Err(SplittingError::Dimension { expected: oracle.dim(), found: w.dim() });
    }
    Ok(())
}

/// Relaxed step `(1 − ρ)w + ρ T̂w` with `ρ ∈ (0, 2)`.
pub fn dppm_step<O: ResolventOracle>(
    w: &O::Point,
    rho: f64,
    oracle: &O,
) -> Result<O::Point, SplittingError<O::Error>> {
    if !(rho > 0.0 && rho < 2.0) {
        return Err(SplittingError::Config(format!("relaxation {rho} outside (0, 2)")));
    }
    check_dim(w, oracle)?;
    let mut out = oracle.resolve(w).map_err(SplittingError::Oracle)?;
    out.lincomb(rho, w, 1.0 - rho);
    Ok(out)
}

/// Iteration state of the accelerated scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct AccelState<P> {
    k: usize,
    w: P,
    w_hat: P,
    alpha: f64,
    rho: f64,
}

impl<P: Point> AccelState<P> {
    /// Starts at `w⁰` with `ŵ⁰ = w⁰`. Needs `α ≥ 2` and `ρ ∈ (0, 2]`.
    pub fn new(w0: P, alpha: f64, rho: f64) -> Result<Self, String> {
        if !(alpha >= 2.0) || !alpha.is_finite() {
            return Err(format!("alpha {alpha} must be finite and >= 2"));
        }
        if !(rho > 0.0 && rho <= 2.0) {
            return Err(format!("relaxation {rho} outside (0, 2]"));
        }
        Ok(Self { k: 0, w_hat: w0.clone(), w: w0, alpha, rho })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn w(&self) -> &P {
        &self.w
    }

    pub fn w_hat(&self) -> &P {
        &self.w_hat
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// One step of the accelerated scheme. Returns the new state and `w̄ᵏ = T̂wᵏ`.
///
/// ```text
/// w̄ᵏ   = T̂wᵏ
/// ŵᵏ⁺¹ = (1 − ρ)wᵏ + ρw̄ᵏ
/// wᵏ⁺¹ = wᵏ + α/(2(k+α))·(ŵᵏ⁺¹ − wᵏ) + k/(k+α)·(ŵᵏ⁺¹ − ŵᵏ)
/// ```
pub fn accel_step<O: ResolventOracle>(
    state: &AccelState<O::Point>,
    oracle: &O,
) -> Result<(AccelState<O::Point>, O::Point), SplittingError<O::Error>> {
    check_dim(&state.w, oracle)?;
    let w_bar = oracle.resolve(&state.w).map_err(SplittingError::Oracle)?;

    let mut w_hat_next = w_bar.clone();
    w_hat_next.lincomb(state.rho, &state.w, 1.0 - state.rho);

    let k = state.k as f64;
    let a = state.alpha;
    let c1 = a / (2.0 * (k + a));
    let c2 = k / (k + a);
    let mut w_next = w_hat_next.clone();
    w_next.lincomb(c1 + c2, &state.w, 1.0 - c1);
    w_next.lincomb(1.0, &state.w_hat, -c2);

    let next = AccelState {
        k: state.k + 1,
        w: w_next,
        w_hat: w_hat_next,
        alpha: state.alpha,
        rho: state.rho,
    };
    Ok((next, w_bar))
}

/// `‖wᵏ − ŵᵏ⁺¹‖_M`, paying one resolvent evaluation.
pub fn seminorm_residual<O: ResolventOracle>(
    state: &AccelState<O::Point>,
    oracle: &O,
) -> Result<f64, SplittingError<O::Error>> {
    check_dim(&state.w, oracle)?;
    let w_bar = oracle.resolve(&state.w).map_err(SplittingError::Oracle)?;
    Ok(step_residual(&state.w, &w_bar, state.rho, oracle))
}

/// `‖w − ŵ‖_M = ρ‖w − w̄‖_M` when `w̄ = T̂w` is already at hand.
pub fn step_residual<O: ResolventOracle>(w: &O::Point, w_bar: &O::Point, rho: f64, oracle: &O) -> f64 {
    let mut d = w.clone();
    d.lincomb(1.0, w_bar, -1.0);
    rho * oracle.seminorm(&d)
}

/// Resets the counter and both points to `anchor`.
pub fn restart<P: Point>(state: &AccelState<P>, anchor: P) -> AccelState<P> {
    AccelState {
        k: 0,
        w_hat: anchor.clone(),
        w: anchor,
        alpha: state.alpha,
        rho: state.rho,
    }
}
