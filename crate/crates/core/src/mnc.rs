//! Hausdorff measure of noncompactness in `h_d` and Hyers–Ulam stability.
//!
//! For a bounded set `𝒜 ⊂ h_d`
//!
//! ```text
//! χ(𝒜) = lim_{k→∞} sup_{m ∈ 𝒜} Σ_{n ≥ k} d_n |Δm_n|
//! ```
//!
//! Finite supports make every tail sum exact; the limit is reported as the
//! value at `k_max` together with the whole curve.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::bvp::{check_existence, kappa, BvpSpec, GridFunction};
use crate::picard::{picard_solve, SolveOptions, SolveReport};
use crate::seqspace::{HahnVector, WeightSequence};
use crate::{Error, Result};

/// Relative slack on the stability bound for discretization error.
pub const HU_SLACK: f64 = 0.1;

/// Finite collection of Hahn vectors, possibly a sample of an infinite set.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily {
    members: Vec<HahnVector>,
    rule: String,
    sampled: bool,
}

impl VectorFamily {
    pub fn new(members: Vec<HahnVector>) -> Self {
        VectorFamily {
            members,
            rule: "explicit".into(),
            sampled: false,
        }
    }

    /// First `samples` members of an infinite generator.
    pub fn sampled(members: Vec<HahnVector>, rule: &str) -> Self {
        VectorFamily {
            members,
            rule: rule.into(),
            sampled: true,
        }
    }

    /// `{ e^(j) / (d_{j−1} + d_j) : j = 1 … samples }` with `d_0 = 0`; every
    /// member has unit norm.
    pub fn unit_sphere(d: &WeightSequence, samples: usize) -> Self {
        let members = (1..=samples)
            .map(|j| {
                let prev = if j == 1 { 0.0 } else { d.get(j - 1) };
                HahnVector::unit(j).scale(1.0 / (prev + d.get(j)))
            })
            .collect();
        VectorFamily::sampled(members, "unit-sphere")
    }

    /// State vectors `m(ξ_j)` of a grid function, one member per node.
    pub fn from_columns(m: &GridFunction) -> Result<Self> {
        let members = (0..m.nodes())
            .map(|j| HahnVector::new(m.column(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorFamily {
            members,
            rule: "grid-columns".into(),
            sampled: false,
        })
    }

    pub fn members(&self) -> &[HahnVector] {
        &self.members
    }

    pub fn rule(&self) -> &str {
        &self.rule
    }

    pub fn is_sampled(&self) -> bool {
        self.sampled
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn scale(&self, alpha: f64) -> Self {
        VectorFamily {
            members: self.members.iter().map(|m| m.scale(alpha)).collect(),
            ..self.clone()
        }
    }

    pub fn union(&self, other: &VectorFamily) -> Self {
        let mut members = self.members.clone();
        members.extend(other.members.iter().cloned());
        VectorFamily {
            members,
            rule: alloc::format!("{} ∪ {}", self.rule, other.rule),
            sampled: self.sampled || other.sampled,
        }
    }

    /// Members at the given indices.
    pub fn select(&self, indices: &[usize]) -> Self {
        VectorFamily {
            members: indices.iter().map(|&i| self.members[i].clone()).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MncEstimate {
    /// `tail_sup[k − 1] = sup_m Σ_{n ≥ k} d_n |Δm_n|` for `k = 1 … k_max`.
    pub tail_sup: Vec<f64>,
    pub limit_estimate: f64,
    pub k_max: usize,
    /// The family samples an infinite set, so the value can only be a lower bound.
    pub is_lower_bound: bool,
}

impl MncEstimate {
    /// Tail supremum at `k` (1-based).
    pub fn at(&self, k: usize) -> f64 {
        self.tail_sup[k - 1]
    }
}

/// Tails `Σ_{n ≥ k} d_n |Δm_n|` for `k = 1 … k_max`, summed from the end so
/// that they are exactly nonincreasing.
fn tails(m: &HahnVector, d: &WeightSequence, k_max: usize) -> Vec<f64> {
    let values = m.values();
    let len = values.len();
    let mut suffix = vec![0.0; len + 1];
    for n in (1..=len).rev() {
        let next = if n < len { values[n] } else { 0.0 };
        suffix[n - 1] = suffix[n] + d.get(n) * (values[n - 1] - next).abs();
    }
    (1..=k_max)
        .map(|k| if k <= len { suffix[k - 1] } else { 0.0 })
        .collect()
}

pub fn hausdorff_mnc(family: &VectorFamily, d: &WeightSequence, k_max: usize) -> Result<MncEstimate> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if k_max == 0 {
        return Err(Error::InvalidParameter {
            name: "k_max",
            reason: "k_max must be at least 1".into(),
        });
    }
    let mut tail_sup = vec![0.0f64; k_max];
    for member in family.members() {
        for (sup, t) in tail_sup.iter_mut().zip(tails(member, d, k_max)) {
            *sup = sup.max(t);
        }
    }
    Ok(MncEstimate {
        limit_estimate: tail_sup[k_max - 1],
        tail_sup,
        k_max,
        is_lower_bound: family.is_sampled(),
    })
}

/// Outcome of [`mnc_axiom_suite`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AxiomReport {
    /// `χ(subfamily) ≤ χ(family)` at every `k`.
    pub monotone: bool,
    /// `χ(θ𝒜 + (1−θ)ℬ) ≤ θχ(𝒜) + (1−θ)χ(ℬ)` for every sampled `θ` and `k`.
    pub convex: bool,
    /// Largest excess over the right-hand side of either inequality.
    pub max_violation: f64,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.monotone && self.convex
    }
}

pub const CONVEXITY_THETAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Spot-checks monotonicity and convexity of the estimator.
pub fn mnc_axiom_suite(
    family: &VectorFamily,
    subfamily: &VectorFamily,
    d: &WeightSequence,
    k_max: usize,
) -> Result<AxiomReport> {
    let full = hausdorff_mnc(family, d, k_max)?;
    let sub = hausdorff_mnc(subfamily, d, k_max)?;
    let mut max_violation = 0.0f64;

    let mut monotone = true;
    for (s, f) in sub.tail_sup.iter().zip(&full.tail_sup) {
        if s > f {
            monotone = false;
            max_violation = max_violation.max(s - f);
        }
    }

    let mut convex = true;
    for &theta in &CONVEXITY_THETAS {
        let mixed: Vec<HahnVector> = family
            .members()
            .iter()
            .flat_map(|m| {
                subfamily
                    .members()
                    .iter()
                    .map(move |x| m.combine(theta, x, 1.0 - theta))
            })
            .collect();
        let est = hausdorff_mnc(&VectorFamily::new(mixed), d, k_max)?;
        for k in 0..k_max {
            let bound = theta * full.tail_sup[k] + (1.0 - theta) * sub.tail_sup[k];
            let excess = est.tail_sup[k] - bound;
            if excess > 1e-12 * (1.0 + bound) {
                convex = false;
                max_violation = max_violation.max(excess);
            }
        }
    }
    Ok(AxiomReport {
        monotone,
        convex,
        max_violation,
    })
}

/// Stability constants `G` and `G₀ = G / (1 − G L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HuConstants {
    pub g: f64,
    pub g0: f64,
}

/// `G` is the stability bracket at `ξ = 1` (numerically the existence
/// constant); fails when `G L ≥ 1`.
pub fn hu_constants(spec: &BvpSpec, lipschitz: f64) -> Result<HuConstants> {
    let g = kappa(spec.beta(), spec.mu(), spec.rho())?;
    hu_constants_from(g, lipschitz)
}

/// `G₀` for an arbitrary `G`.
pub fn hu_constants_from(g: f64, lipschitz: f64) -> Result<HuConstants> {
    let product = g * lipschitz;
    if !(product < 1.0) {
        return Err(Error::StabilityCondition { product });
    }
    Ok(HuConstants {
        g,
        g0: g / (1.0 - product),
    })
}

/// Time profile of a perturbation, applied identically to every component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum PerturbationShape {
    Constant,
    Sine,
}

impl PerturbationShape {
    pub fn value(self, xi: f64) -> f64 {
        match self {
            PerturbationShape::Constant => 1.0,
            PerturbationShape::Sine => libm::sin(2.0 * PI * xi),
        }
    }

    /// `g_i(ξ_j) = ε · shape(ξ_j)` for every component.
    pub fn samples(self, spec: &BvpSpec, epsilon: f64) -> GridFunction {
        GridFunction::from_fn(spec.components(), spec.grid(), |_, s| epsilon * self.value(s))
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HuReport {
    pub epsilon: f64,
    /// `‖m − z‖_{C(κ, h_d)}`.
    pub gap: f64,
    /// `max_{i,j} |m_i(ξ_j) − z_i(ξ_j)|`.
    pub gap_sup: f64,
    /// `max_j ‖g(ξ_j)‖_{h_d}`.
    pub forcing_norm: f64,
    pub g: f64,
    pub g0: f64,
    /// `G₀ · ε · (1 + slack)`.
    pub bound: f64,
    /// `gap ≤ bound` and both solves converged.
    pub holds: bool,
    /// `G₀` built from the discrete operator bound, if defined.
    pub g0_kernel: Option<f64>,
    /// `g0_kernel · ε · (1 + slack)`, compared against `gap_sup`.
    pub bound_kernel: Option<f64>,
    pub holds_kernel: bool,
    pub converged: bool,
    pub unperturbed: SolveReport,
    pub perturbed: SolveReport,
}

/// Solves the problem with and without the additive perturbation `g`
/// (`|g| ≤ ε`) and compares the gap with the stability bound.
pub fn hu_experiment(spec: &BvpSpec, forcing: &GridFunction, epsilon: f64, options: &SolveOptions) -> Result<HuReport> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: alloc::format!("epsilon must be finite and >= 0, got {epsilon}"),
        });
    }
    if forcing.max_abs() > epsilon * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: alloc::format!(
                "perturbation reaches {} which exceeds epsilon = {epsilon}",
                forcing.max_abs()
            ),
        });
    }
    let report = check_existence(spec)?;
    if !report.unique_flag {
        return Err(Error::StabilityCondition {
            product: report.kappa_signed * report.lipschitz,
        });
    }
    let constants = hu_constants(spec, report.lipschitz)?;

    let base = SolveOptions {
        forcing: None,
        ..options.clone()
    };
    let unperturbed = picard_solve(spec, &base)?;
    let perturbed = picard_solve(spec, &base.clone().with_forcing(forcing.clone()))?;

    let diff = perturbed.solution.sub(&unperturbed.solution)?;
    let d = spec.weights();
    let gap = diff.sup_hahn_norm(d);
    let gap_sup = diff.max_abs();
    let forcing_norm = forcing.sup_hahn_norm(d);
    let converged = unperturbed.converged && perturbed.converged;
    let bound = constants.g0 * epsilon * (1.0 + HU_SLACK);
    let bound_kernel = report.g0_kernel.map(|g0| g0 * epsilon * (1.0 + HU_SLACK));
    Ok(HuReport {
        epsilon,
        gap,
        gap_sup,
        forcing_norm,
        g: constants.g,
        g0: constants.g0,
        bound,
        holds: converged && gap <= bound,
        g0_kernel: report.g0_kernel,
        bound_kernel,
        holds_kernel: converged && bound_kernel.is_some_and(|b| gap_sup <= b),
        converged,
        unperturbed,
        perturbed,
    })
}
