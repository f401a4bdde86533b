//! The boundary value problem, its integral operator and the constants that
//! govern existence, uniqueness and stability.
//!
//! A solution of
//!
//! ```text
//! ᶜD^β m(ξ) = φ(ξ, m(ξ)),   m(0) = 0,   m(1) = μ ∫₀^ϱ m(s) ds
//! ```
//!
//! is a fixed point of
//!
//! ```text
//! (F m)(ξ) = (1/Γ(β)) ∫₀^ξ (ξ−s)^{β−1} φ ds
//!          − 2ξ/((2−μϱ²)Γ(β)) ∫₀^1 (1−s)^{β−1} φ ds
//!          + 2μξ/((2−μϱ²)Γ(β)) ∫₀^ϱ ∫₀^s (s−n)^{β−1} φ dn ds.
//! ```
//!
//! The double integral is evaluated through the order swap
//! `∫₀^ϱ φ(n) (ϱ−n)^β / β dn`; [`double_integral_crosscheck`] compares the
//! two forms.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::fraccalc::{gamma, FractionalOrder, Grid, ProductRule};
use crate::quad::tanh_sinh;
use crate::seqspace::{tail_norm_slice, WeightSequence};
use crate::{Error, Result};

/// Smallest admissible `|2 − μϱ²|`.
pub const SINGULAR_GAP: f64 = 1e-9;

/// Right-hand side family `φ_i(s, m)`.
pub trait RhsFamily: fmt::Debug + Send + Sync {
    /// Registry identifier.
    fn key(&self) -> &str;

    /// `φ_i(s, m)` where `i = component + 1` and `m` holds every component
    /// of the state at time `s`.
    fn eval(&self, component: usize, s: f64, m: &[f64]) -> f64;

    /// Declared equibound `𝔄 = sup_i |a_i|`.
    fn equibound(&self) -> f64;

    /// Declared Lipschitz constant `𝔏`.
    fn lipschitz(&self) -> f64;
}

/// Values `m_i(ξ_j)` for `N` components on the `M + 1` grid nodes.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridFunction {
    components: usize,
    nodes: usize,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(components: usize, grid: Grid) -> Self {
        GridFunction {
            components,
            nodes: grid.len(),
            values: vec![0.0; components * grid.len()],
        }
    }

    /// Samples `f(i, ξ_j)` with 0-based component index `i`.
    pub fn from_fn<F: FnMut(usize, f64) -> f64>(components: usize, grid: Grid, mut f: F) -> Self {
        let mut values = Vec::with_capacity(components * grid.len());
        for i in 0..components {
            values.extend(grid.nodes().map(|s| f(i, s)));
        }
        GridFunction {
            components,
            nodes: grid.len(),
            values,
        }
    }

    /// Builds from per-component rows of equal length.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let components = rows.len();
        let nodes = rows.first().map_or(0, Vec::len);
        if components == 0 || nodes == 0 {
            return Err(Error::InvalidParameter {
                name: "rows",
                reason: "grid function needs at least one component and one node".into(),
            });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != nodes) {
            return Err(Error::ShapeMismatch {
                expected: (components, nodes),
                found: (components, bad.len()),
            });
        }
        Ok(GridFunction {
            components,
            nodes,
            values: rows.concat(),
        })
    }

    /// `(N, M + 1)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.components, self.nodes)
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.values[i * self.nodes..(i + 1) * self.nodes]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.nodes..(i + 1) * self.nodes]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.nodes + j]
    }

    /// State vector `(m_1(ξ_j), …, m_N(ξ_j))`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.components).map(|i| self.get(i, j)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        Ok(GridFunction {
            components: self.components,
            nodes: self.nodes,
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        GridFunction {
            components: self.components,
            nodes: self.nodes,
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    /// `max_{i,j} |m_i(ξ_j)|`.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `‖m(ξ_j)‖_{h_d}` for one node.
    pub fn hahn_norm_at(&self, j: usize, d: &WeightSequence) -> f64 {
        tail_norm_slice(&self.column(j), 1, d)
    }

    /// `‖m‖_{C(κ, h_d)} = max_j ‖m(ξ_j)‖_{h_d}`.
    pub fn sup_hahn_norm(&self, d: &WeightSequence) -> f64 {
        (0..self.nodes).fold(0.0, |acc, j| acc.max(self.hahn_norm_at(j, d)))
    }

    /// First `n` components (all of them if `n` exceeds `N`).
    pub fn leading(&self, n: usize) -> GridFunction {
        let n = n.min(self.components);
        GridFunction {
            components: n,
            nodes: self.nodes,
            values: self.values[..n * self.nodes].to_vec(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `(component, node)` of the first non-finite value, 0-based.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.values
            .iter()
            .position(|v| !v.is_finite())
            .map(|p| (p / self.nodes, p % self.nodes))
    }
}

/// Weight tables that turn `φ` samples into operator values.
#[derive(Debug, Clone)]
struct OperatorTables {
    /// kernel `(t − s)^{β−1}`
    rl: ProductRule,
    /// kernel `(t − s)^β`, divided by `β` on use
    swapped: ProductRule,
    gamma_beta: f64,
}

/// A fully specified problem instance truncated to `N` components.
#[derive(Clone)]
pub struct BvpSpec {
    beta: FractionalOrder,
    mu: f64,
    rho: f64,
    rho_index: usize,
    rhs: Arc<dyn RhsFamily>,
    weights: WeightSequence,
    components: usize,
    grid: Grid,
    tables: OperatorTables,
}

impl fmt::Debug for BvpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BvpSpec")
            .field("beta", &self.beta)
            .field("mu", &self.mu)
            .field("rho", &self.rho)
            .field("rho_effective", &self.rho_effective())
            .field("rhs", &self.rhs.key())
            .field("weights", &self.weights)
            .field("components", &self.components)
            .field("intervals", &self.grid.intervals())
            .finish()
    }
}

/// Rejects `μϱ²` within [`SINGULAR_GAP`] of 2.
pub fn check_nonsingular(mu: f64, rho: f64) -> Result<f64> {
    let denom = 2.0 - mu * rho * rho;
    if !denom.is_finite() || denom.abs() <= SINGULAR_GAP {
        return Err(Error::SingularParameters {
            product: mu * rho * rho,
        });
    }
    Ok(denom)
}

impl BvpSpec {
    /// Validates the parameters and snaps `ϱ` to the nearest interior node.
    pub fn new(
        beta: FractionalOrder,
        mu: f64,
        rho: f64,
        rhs: Arc<dyn RhsFamily>,
        weights: WeightSequence,
        components: usize,
        grid: Grid,
    ) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mu",
                reason: alloc::format!("mu must be finite, got {mu}"),
            });
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParameter {
                name: "rho",
                reason: alloc::format!("rho must lie in (0, 1), got {rho}"),
            });
        }
        if components == 0 {
            return Err(Error::InvalidParameter {
                name: "N",
                reason: "at least one component is required".into(),
            });
        }
        check_nonsingular(mu, rho)?;
        let m = grid.intervals();
        let rho_index = grid.nearest_index(rho).clamp(1, m.saturating_sub(1).max(1));
        check_nonsingular(mu, grid.node(rho_index))?;
        let tables = OperatorTables {
            rl: ProductRule::new(grid, beta.get())?,
            swapped: ProductRule::new(grid, beta.get() + 1.0)?,
            gamma_beta: gamma(beta.get())?,
        };
        Ok(BvpSpec {
            beta,
            mu,
            rho,
            rho_index,
            rhs,
            weights,
            components,
            grid,
            tables,
        })
    }

    /// Same problem with a different truncation size.
    pub fn with_components(&self, components: usize) -> Result<Self> {
        if components == 0 {
            return Err(Error::InvalidParameter {
                name: "N",
                reason: "at least one component is required".into(),
            });
        }
        Ok(BvpSpec {
            components,
            ..self.clone()
        })
    }

    /// Same problem with a different right-hand side.
    pub fn with_rhs(&self, rhs: Arc<dyn RhsFamily>) -> Self {
        BvpSpec { rhs, ..self.clone() }
    }

    pub fn beta(&self) -> FractionalOrder {
        self.beta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Requested `ϱ`.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// The grid node actually used for `ϱ`.
    pub fn rho_effective(&self) -> f64 {
        self.grid.node(self.rho_index)
    }

    pub fn rho_index(&self) -> usize {
        self.rho_index
    }

    pub fn rhs(&self) -> &Arc<dyn RhsFamily> {
        &self.rhs
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.weights
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    fn denominator(&self) -> f64 {
        let r = self.rho_effective();
        2.0 - self.mu * r * r
    }

    /// Coefficients `(c_end, c_swap)` of the two boundary terms, per unit `ξ`
    /// and already divided by `Γ(β)` and `β` where they apply.
    fn boundary_coefficients(&self) -> (f64, f64) {
        let denom = self.denominator();
        let g = self.tables.gamma_beta;
        (-2.0 / (denom * g), 2.0 * self.mu / (denom * g * self.beta.get()))
    }

    /// Weight of `φ(ξ_k)` in `(F m)(ξ_j)`.
    pub fn operator_weight(&self, j: usize, k: usize) -> f64 {
        let m = self.grid.intervals();
        let xi = self.grid.node(j);
        let (c_end, c_swap) = self.boundary_coefficients();
        let mut w = xi * c_end * self.tables.rl.weight(m, k);
        if k <= j {
            w += self.tables.rl.weight(j, k) / self.tables.gamma_beta;
        }
        if k <= self.rho_index {
            w += xi * c_swap * self.tables.swapped.weight(self.rho_index, k);
        }
        w
    }

    /// Applies the linear part of the operator to one row of `φ` samples.
    pub fn apply_linear(&self, phi: &[f64]) -> Vec<f64> {
        let m = self.grid.intervals();
        let (c_end, c_swap) = self.boundary_coefficients();
        let end = self.tables.rl.apply(m, phi);
        let swapped = self.tables.swapped.apply(self.rho_index, phi);
        let slope = c_end * end + c_swap * swapped;
        (0..=m)
            .map(|j| {
                if j == 0 {
                    0.0
                } else {
                    self.tables.rl.apply(j, phi) / self.tables.gamma_beta + self.grid.node(j) * slope
                }
            })
            .collect()
    }

    /// Samples `φ_i(ξ_j, m(ξ_j))` (+ optional additive forcing).
    pub fn rhs_samples(&self, m: &GridFunction, forcing: Option<&GridFunction>) -> Result<GridFunction> {
        let expected = (self.components, self.grid.len());
        if m.shape() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                found: m.shape(),
            });
        }
        if let Some(g) = forcing {
            if g.shape() != expected {
                return Err(Error::ShapeMismatch {
                    expected,
                    found: g.shape(),
                });
            }
        }
        let mut phi = GridFunction::zeros(self.components, self.grid);
        for j in 0..self.grid.len() {
            let state = m.column(j);
            let s = self.grid.node(j);
            for i in 0..self.components {
                let mut v = self.rhs.eval(i, s, &state);
                if let Some(g) = forcing {
                    v += g.get(i, j);
                }
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        component: i + 1,
                        node: j,
                    });
                }
                phi.component_mut(i)[j] = v;
            }
        }
        Ok(phi)
    }

    /// Operator applied to precomputed `φ` samples.
    pub fn apply_to_samples(&self, phi: &GridFunction) -> Result<GridFunction> {
        let expected = (self.components, self.grid.len());
        if phi.shape() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                found: phi.shape(),
            });
        }
        let mut out = GridFunction::zeros(self.components, self.grid);
        for i in 0..self.components {
            let row = self.apply_linear(phi.component(i));
            out.component_mut(i).copy_from_slice(&row);
        }
        Ok(out)
    }

    /// `max_j Σ_k |W_jk|`: the sup-norm operator bound of the discrete
    /// operator's linear part.
    pub fn discrete_kernel_bound(&self) -> f64 {
        let n = self.grid.len();
        (0..n)
            .map(|j| (0..n).map(|k| self.operator_weight(j, k).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// `(F m)` on the grid.
pub fn green_apply(spec: &BvpSpec, m: &GridFunction) -> Result<GridFunction> {
    green_apply_forced(spec, m, None)
}

/// `(F m)` with `φ` replaced by `φ + g`.
pub fn green_apply_forced(spec: &BvpSpec, m: &GridFunction, forcing: Option<&GridFunction>) -> Result<GridFunction> {
    let phi = spec.rhs_samples(m, forcing)?;
    spec.apply_to_samples(&phi)
}

/// Both evaluations of `∫₀^ϱ ∫₀^s (s−n)^{β−1} φ(n) dn ds` for `φ` sampled on
/// the grid (at least nodes `0 … ϱ`):
///
/// - `reduced`: the single integral `∫₀^ϱ φ(n) (ϱ−n)^β / β dn` by product
///   quadrature;
/// - `nested`: the inner integral in closed form for the piecewise-linear
///   interpolant of `φ`, the outer one by tanh-sinh on each grid interval.
pub fn double_integral_crosscheck(spec: &BvpSpec, phi: &[f64]) -> Result<(f64, f64)> {
    let r = spec.rho_index();
    if phi.len() <= r {
        return Err(Error::ShapeMismatch {
            expected: (1, r + 1),
            found: (1, phi.len()),
        });
    }
    let beta = spec.beta().get();
    let reduced = spec.tables.swapped.apply(r, phi) / beta;

    let grid = spec.grid();
    let nested = (0..r)
        .map(|k| {
            let (a, b) = (grid.node(k), grid.node(k + 1));
            tanh_sinh(|s| inner_integral(phi, grid, beta, k, s), a, b)
        })
        .sum();
    Ok((reduced, nested))
}

/// `∫₀^s (s−n)^{β−1} φ_h(n) dn` for `s ∈ (ξ_k, ξ_{k+1}]`, `φ_h` the linear
/// interpolant of the samples.
fn inner_integral(phi: &[f64], grid: Grid, beta: f64, k: usize, s: f64) -> f64 {
    let h = grid.step();
    // per-interval moments against (s−n)^{β−1} from shared breakpoint powers
    let mut big0 = libm::pow(s, beta);
    let mut big1 = big0 * s;
    let mut acc = 0.0;
    for j in 0..k {
        let small = s - grid.node(j + 1);
        let small0 = libm::pow(small, beta);
        let small1 = small0 * small;
        let m0 = (big0 - small0) / beta;
        let m1 = (big1 - small1) / (beta + 1.0);
        acc += (phi[j] * (m1 - small * m0) + phi[j + 1] * ((small + h) * m0 - m1)) / h;
        big0 = small0;
        big1 = small1;
    }
    // partial last interval [ξ_k, s]
    let width = s - grid.node(k);
    if width > 0.0 {
        let t = width / h;
        let fb = phi[k] + t * (phi[k + 1] - phi[k]);
        let m0 = big0 / beta;
        let m1 = big1 / (beta + 1.0);
        acc += (phi[k] * m1 + fb * (width * m0 - m1)) / width;
    }
    acc
}

/// Signed constant
/// `1/Γ(β+1) − 2/((2−μϱ²)Γ(β+1)) + 2μϱ^{β+1}/((2−μϱ²)Γ(β+2))`.
pub fn kappa(beta: FractionalOrder, mu: f64, rho: f64) -> Result<f64> {
    let (a, b, c) = kappa_terms(beta, mu, rho)?;
    Ok(a - b + c)
}

/// Triangle-inequality variant `1/Γ(β+1) + |2/(…)| + |2μϱ^{β+1}/(…)|`.
pub fn kappa_abs(beta: FractionalOrder, mu: f64, rho: f64) -> Result<f64> {
    let (a, b, c) = kappa_terms(beta, mu, rho)?;
    Ok(a + b.abs() + c.abs())
}

fn kappa_terms(beta: FractionalOrder, mu: f64, rho: f64) -> Result<(f64, f64, f64)> {
    let denom = check_nonsingular(mu, rho)?;
    let b = beta.get();
    let g1 = gamma(b + 1.0)?;
    let g2 = gamma(b + 2.0)?;
    Ok((
        1.0 / g1,
        2.0 / (denom * g1),
        2.0 * mu * libm::pow(rho, b + 1.0) / (denom * g2),
    ))
}

/// The stability bracket
/// `ξ^β/Γ(β+1) − 2ξ/((2−μϱ²)Γ(β+1)) + 2ξμϱ^{β+1}/((2−μϱ²)Γ(β+2))`.
///
/// At `ξ = 1` it equals [`kappa`].
pub fn stability_bracket(beta: FractionalOrder, mu: f64, rho: f64, xi: f64) -> Result<f64> {
    let (a, b, c) = kappa_terms(beta, mu, rho)?;
    Ok(a * libm::pow(xi, beta.get()) + (c - b) * xi)
}

/// `sup_{ξ ∈ [0,1]} |bracket(ξ)|`.
///
/// The bracket is `aξ^β + bξ` with `a > 0`, concave for `β < 1`, so the
/// supremum sits at `ξ = 1` or at the interior stationary point.
pub fn stability_bracket_sup(beta: FractionalOrder, mu: f64, rho: f64) -> Result<f64> {
    let (a, b, c) = kappa_terms(beta, mu, rho)?;
    let slope = c - b;
    let be = beta.get();
    let mut best = (a + slope).abs();
    if be < 1.0 && slope < 0.0 {
        let xi = libm::pow(-slope / (a * be), 1.0 / (be - 1.0));
        if xi > 0.0 && xi < 1.0 {
            best = best.max((a * libm::pow(xi, be) + slope * xi).abs());
        }
    }
    Ok(best)
}

/// Constants behind the existence, uniqueness and stability conditions.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConstantsReport {
    pub beta: f64,
    pub mu: f64,
    pub rho: f64,
    pub rho_effective: f64,
    pub kappa_signed: f64,
    pub kappa_abs: f64,
    pub equibound: f64,
    pub lipschitz: f64,
    pub product_signed: f64,
    pub product_abs: f64,
    /// `kappa_signed · 𝔄 < 1`
    pub exists_flag: bool,
    /// `kappa_signed · 𝔏 < 1`
    pub unique_flag: bool,
    /// Stability constant `G`, the bracket at `ξ = 1`.
    pub g: f64,
    /// `G / (1 − G𝔏)` when `G𝔏 < 1`.
    pub g0: Option<f64>,
    /// `sup_ξ |bracket(ξ)|`.
    pub g_bracket_sup: f64,
    /// Sup-norm bound of the discrete operator, see
    /// [`BvpSpec::discrete_kernel_bound`].
    pub g_kernel: f64,
    /// `g_kernel / (1 − g_kernel·𝔏)` when the denominator is positive.
    pub g0_kernel: Option<f64>,
}

/// `G / (1 − G L)` if `G L < 1`.
pub fn stability_g0(g: f64, lipschitz: f64) -> Option<f64> {
    (g * lipschitz < 1.0).then(|| g / (1.0 - g * lipschitz))
}

/// Evaluates every constant and condition for `spec`.
pub fn check_existence(spec: &BvpSpec) -> Result<ConstantsReport> {
    let beta = spec.beta();
    let (mu, rho) = (spec.mu(), spec.rho());
    let kappa_signed = kappa(beta, mu, rho)?;
    let kappa_abs = kappa_abs(beta, mu, rho)?;
    let equibound = spec.rhs().equibound();
    let lipschitz = spec.rhs().lipschitz();
    let g = kappa_signed;
    let g_kernel = spec.discrete_kernel_bound();
    Ok(ConstantsReport {
        beta: beta.get(),
        mu,
        rho,
        rho_effective: spec.rho_effective(),
        kappa_signed,
        kappa_abs,
        equibound,
        lipschitz,
        product_signed: kappa_signed * equibound,
        product_abs: kappa_abs * equibound,
        exists_flag: kappa_signed * equibound < 1.0,
        unique_flag: kappa_signed * lipschitz < 1.0,
        g,
        g0: stability_g0(g, lipschitz),
        g_bracket_sup: stability_bracket_sup(beta, mu, rho)?,
        g_kernel,
        g0_kernel: stability_g0(g_kernel, lipschitz),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{Constant, Zero};

    fn order(b: f64) -> FractionalOrder {
        FractionalOrder::new(b).unwrap()
    }

    #[test]
    fn kappa_vanishes_without_coupling() {
        for &b in &[0.05, 0.25, 0.5, 0.77, 1.0] {
            for &r in &[0.01, 0.3, 0.5, 0.99] {
                assert!(kappa(order(b), 0.0, r).unwrap().abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn kappa_abs_simple_case() {
        assert!((kappa_abs(order(1.0), 0.0, 0.5).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn singular_parameters_rejected() {
        let rho: f64 = 0.5;
        let mu = 2.0 / (rho * rho);
        assert!(matches!(
            kappa(order(0.5), mu, rho),
            Err(Error::SingularParameters { .. })
        ));
        assert!(kappa_abs(order(0.5), mu, rho).is_err());
        let spec = BvpSpec::new(
            order(0.5),
            mu,
            rho,
            Arc::new(Zero),
            WeightSequence::Linear,
            1,
            Grid::new(8).unwrap(),
        );
        assert!(matches!(spec, Err(Error::SingularParameters { .. })));
    }

    #[test]
    fn spec_validation() {
        let grid = Grid::new(8).unwrap();
        let mk =
            |rho: f64, n: usize| BvpSpec::new(order(0.5), 1.0, rho, Arc::new(Zero), WeightSequence::Linear, n, grid);
        assert!(mk(0.0, 1).is_err());
        assert!(mk(1.0, 1).is_err());
        assert!(mk(0.5, 0).is_err());
        let spec = mk(0.3, 2).unwrap();
        assert_eq!(spec.rho_effective(), 0.25);
        assert_eq!(spec.rho(), 0.3);
    }

    #[test]
    fn constant_rhs_with_beta_one_and_no_coupling_maps_to_zero() {
        let grid = Grid::new(32).unwrap();
        let spec = BvpSpec::new(
            order(1.0),
            0.0,
            0.5,
            Arc::new(Constant::new(1.0)),
            WeightSequence::Linear,
            3,
            grid,
        )
        .unwrap();
        let out = green_apply(&spec, &GridFunction::zeros(3, grid)).unwrap();
        assert!(out.max_abs() < 1e-14);
    }

    #[test]
    fn node_zero_is_exactly_zero() {
        let grid = Grid::new(16).unwrap();
        let spec = BvpSpec::new(
            order(0.3),
            0.7,
            0.4,
            Arc::new(Constant::new(2.5)),
            WeightSequence::Linear,
            2,
            grid,
        )
        .unwrap();
        let m = GridFunction::from_fn(2, grid, |i, s| (i as f64 + 1.0) * s);
        let out = green_apply(&spec, &m).unwrap();
        assert_eq!(out.get(0, 0), 0.0);
        assert_eq!(out.get(1, 0), 0.0);
    }

    #[test]
    fn operator_weights_match_application() {
        let grid = Grid::new(12).unwrap();
        let spec = BvpSpec::new(order(0.4), 0.9, 0.35, Arc::new(Zero), WeightSequence::Linear, 1, grid).unwrap();
        let phi: Vec<f64> = grid.nodes().map(|s| libm::cos(3.0 * s) + s).collect();
        let direct = spec.apply_linear(&phi);
        for (j, v) in direct.iter().enumerate() {
            let via_weights: f64 = (0..grid.len()).map(|k| spec.operator_weight(j, k) * phi[k]).sum();
            assert!((v - via_weights).abs() < 1e-13);
        }
    }

    #[test]
    fn shape_and_finiteness_errors() {
        #[derive(Debug)]
        struct Blowup;
        impl RhsFamily for Blowup {
            fn key(&self) -> &str {
                "blowup"
            }
            fn eval(&self, component: usize, s: f64, _m: &[f64]) -> f64 {
                if component == 1 && s > 0.5 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            fn equibound(&self) -> f64 {
                0.0
            }
            fn lipschitz(&self) -> f64 {
                0.0
            }
        }
        let grid = Grid::new(4).unwrap();
        let spec = BvpSpec::new(order(0.5), 1.0, 0.5, Arc::new(Blowup), WeightSequence::Linear, 2, grid).unwrap();
        let err = green_apply(&spec, &GridFunction::zeros(2, grid)).unwrap_err();
        assert_eq!(err, Error::NonFinite { component: 2, node: 3 });
        let wrong = GridFunction::zeros(3, grid);
        assert!(matches!(green_apply(&spec, &wrong), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn double_integral_examples() {
        let grid = Grid::new(64).unwrap();
        let mk = |b: f64, rho: f64| {
            BvpSpec::new(order(b), 1.0, rho, Arc::new(Zero), WeightSequence::Linear, 1, grid).unwrap()
        };
        let spec = mk(0.3, 0.25);
        let ones = vec![1.0; grid.len()];
        let (reduced, nested) = double_integral_crosscheck(&spec, &ones).unwrap();
        let exact = libm::pow(0.25, 1.3) / (0.3 * 1.3);
        assert!((reduced - exact).abs() < 1e-13);
        assert!((nested - exact).abs() < 1e-10, "{nested} vs {exact}");

        let spec = mk(1.0, 0.5);
        let s: Vec<f64> = grid.nodes().collect();
        let (reduced, nested) = double_integral_crosscheck(&spec, &s).unwrap();
        assert!((reduced - 1.0 / 48.0).abs() < 1e-15);
        assert!((nested - 1.0 / 48.0).abs() < 1e-13);
    }

    #[test]
    fn bracket_sup_matches_dense_sampling() {
        for &(b, mu, rho) in &[
            (0.2, 0.5, 1.0 / 6.0),
            (0.25, 1.0, 1.0 / 3.0),
            (1.0, 0.5, 0.5),
            (0.6, -1.0, 0.8),
        ] {
            let sup = stability_bracket_sup(order(b), mu, rho).unwrap();
            let sampled = (0..=20_000)
                .map(|k| stability_bracket(order(b), mu, rho, k as f64 / 20_000.0).unwrap().abs())
                .fold(0.0, f64::max);
            assert!(sup >= sampled - 1e-12);
            assert!(sup - sampled < 1e-6, "{sup} {sampled}");
        }
        let at_one = stability_bracket(order(0.2), 0.5, 1.0 / 6.0, 1.0).unwrap();
        assert!((at_one - kappa(order(0.2), 0.5, 1.0 / 6.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn g0_requires_small_product() {
        assert_eq!(stability_g0(0.5, 0.0), Some(0.5));
        assert_eq!(stability_g0(0.5, 2.0), None);
        assert!((stability_g0(0.5, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }
}
