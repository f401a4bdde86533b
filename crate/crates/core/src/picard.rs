//! Picard iteration `m^(k+1) = F m^(k)` on the truncated system.
//!
//! Iteration stops when the successive difference, measured in
//! `‖·‖_{C(κ, h_d)}`, drops to the tolerance. The true residual
//! `‖m − F m‖` is computed once at the end.

use alloc::vec::Vec;

use crate::bvp::{green_apply_forced, BvpSpec, GridFunction};
use crate::{Error, Result};

/// Ratios are only recorded where the earlier difference exceeds this.
const RATIO_FLOOR: f64 = 1e-14;
/// Divergence: growth by more than this factor …
const DIVERGENCE_GROWTH: f64 = 10.0;
/// … across this many consecutive increases.
const DIVERGENCE_WINDOW: usize = 5;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Starting iterate; zero when absent.
    pub init: Option<GridFunction>,
    /// Additive forcing `g` so that `φ` becomes `φ + g`.
    pub forcing: Option<GridFunction>,
}

impl SolveOptions {
    pub fn new(tol: f64, max_iter: usize) -> Self {
        SolveOptions {
            tol,
            max_iter,
            init: None,
            forcing: None,
        }
    }

    pub fn with_forcing(mut self, forcing: GridFunction) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn with_init(mut self, init: GridFunction) -> Self {
        self.init = Some(init);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveReport {
    pub solution: GridFunction,
    pub iterations: usize,
    /// `‖m^(k+1) − m^(k)‖_{C(κ, h_d)}` per iteration.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    /// Largest ratio of consecutive history entries.
    pub empirical_contraction: f64,
    /// `‖m − F m‖_{C(κ, h_d)}` of the returned solution.
    pub final_residual: f64,
}

pub fn picard_solve(spec: &BvpSpec, options: &SolveOptions) -> Result<SolveReport> {
    if !(options.tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: alloc::format!("tolerance must be positive, got {}", options.tol),
        });
    }
    if options.max_iter == 0 {
        return Err(Error::InvalidParameter {
            name: "max_iter",
            reason: "at least one iteration is required".into(),
        });
    }
    let d = spec.weights();
    let forcing = options.forcing.as_ref();
    let mut current = match &options.init {
        Some(init) => init.clone(),
        None => GridFunction::zeros(spec.components(), spec.grid()),
    };
    let mut history = Vec::new();
    let mut converged = false;
    while history.len() < options.max_iter {
        let next = green_apply_forced(spec, &current, forcing)?;
        if let Some((i, j)) = next.first_non_finite() {
            return Err(Error::NonFinite {
                component: i + 1,
                node: j,
            });
        }
        let diff = next.sub(&current)?.sup_hahn_norm(d);
        history.push(diff);
        current = next;
        if diff <= options.tol {
            converged = true;
            break;
        }
        if diverging(&history) {
            return Err(Error::Divergence { history });
        }
    }
    let final_residual = residual_forced(spec, &current, forcing)?;
    Ok(SolveReport {
        iterations: history.len(),
        empirical_contraction: empirical_contraction(&history),
        residual_history: history,
        converged,
        final_residual,
        solution: current,
    })
}

fn diverging(history: &[f64]) -> bool {
    if history.len() <= DIVERGENCE_WINDOW {
        return false;
    }
    let window = &history[history.len() - DIVERGENCE_WINDOW - 1..];
    window.windows(2).all(|w| w[1] > w[0]) && window[DIVERGENCE_WINDOW] > DIVERGENCE_GROWTH * window[0]
}

/// `max_k h[k+1]/h[k]` over entries with `h[k] > 1e−14`; 0 if none.
pub fn empirical_contraction(history: &[f64]) -> f64 {
    history
        .windows(2)
        .filter(|w| w[0] > RATIO_FLOOR)
        .map(|w| w[1] / w[0])
        .fold(0.0, f64::max)
}

/// `‖m − F m‖_{C(κ, h_d)}`.
pub fn residual(spec: &BvpSpec, m: &GridFunction) -> Result<f64> {
    residual_forced(spec, m, None)
}

pub fn residual_forced(spec: &BvpSpec, m: &GridFunction, forcing: Option<&GridFunction>) -> Result<f64> {
    let image = green_apply_forced(spec, m, forcing)?;
    Ok(m.sub(&image)?.sup_hahn_norm(spec.weights()))
}

/// One row of a truncation study.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TruncationRow {
    pub components: usize,
    pub solution_norm: f64,
    pub iterations: usize,
    /// `‖sol_N − sol_{N_prev}‖_{C(κ, h_d)}` over the shared leading components.
    pub delta_previous: Option<f64>,
}

/// Solves at each truncation size and compares consecutive solutions.
pub fn truncation_study(spec: &BvpSpec, sizes: &[usize], options: &SolveOptions) -> Result<Vec<TruncationRow>> {
    if sizes.is_empty() {
        return Err(Error::InvalidParameter {
            name: "Ns",
            reason: "at least one truncation size is required".into(),
        });
    }
    if sizes.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter {
            name: "Ns",
            reason: "truncation sizes must be nondecreasing".into(),
        });
    }
    let mut rows = Vec::with_capacity(sizes.len());
    let mut previous: Option<GridFunction> = None;
    for &n in sizes {
        let sized = spec.with_components(n)?;
        let opts = SolveOptions {
            init: None,
            forcing: options.forcing.as_ref().map(|g| g.leading(n)),
            ..options.clone()
        };
        if let Some(g) = &opts.forcing {
            if g.components() != n {
                return Err(Error::ShapeMismatch {
                    expected: (n, spec.grid().len()),
                    found: g.shape(),
                });
            }
        }
        let report = picard_solve(&sized, &opts)?;
        let delta_previous = previous.as_ref().map(|prev| {
            let shared = prev.components().min(n);
            prev.leading(shared)
                .sub(&report.solution.leading(shared))
                .map(|diff| diff.sup_hahn_norm(spec.weights()))
        });
        rows.push(TruncationRow {
            components: n,
            solution_norm: report.solution.sup_hahn_norm(spec.weights()),
            iterations: report.iterations,
            delta_previous: delta_previous.transpose()?,
        });
        previous = Some(report.solution);
    }
    Ok(rows)
}
