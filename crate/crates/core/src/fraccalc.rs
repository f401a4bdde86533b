//! Fractional calculus on a uniform grid over `[0, 1]`.
//!
//! Riemann–Liouville integrals are discretized with the product trapezoidal
//! rule: the smooth factor is interpolated linearly between nodes and the
//! kernel `(t − s)^{α−1}` is integrated exactly against each hat function.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for `x > 0` (Lanczos, g = 7, nine terms; reflection below 1/2).
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(Error::Domain(alloc::format!(
            "gamma is only defined here for positive arguments, got {x}"
        )));
    }
    Ok(gamma_positive(x))
}

fn gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        return PI / (libm::sin(PI * x) * gamma_positive(1.0 - x));
    }
    if x == libm::floor(x) && x <= 21.0 {
        // exact factorials
        return (1..x as u64).fold(1.0, |acc, k| acc * k as f64);
    }
    let z = x - 1.0;
    let series = LANCZOS_COEF[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS_COEF[0], |acc, (i, c)| acc + c / (z + (i + 1) as f64));
    let t = z + LANCZOS_G + 0.5;
    // split the power so it does not overflow before the exponential damps it
    let half = libm::pow(t, 0.5 * (z + 0.5));
    libm::sqrt(2.0 * PI) * half * libm::exp(-t) * half * series
}

/// Fractional order `β ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(beta: f64) -> Result<Self> {
        if beta > 0.0 && beta <= 1.0 {
            Ok(FractionalOrder(beta))
        } else {
            Err(Error::InvalidParameter {
                name: "beta",
                reason: alloc::format!("order must lie in (0, 1], got {beta}"),
            })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Uniform grid `ξ_j = j / M`, `j = 0 … M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    intervals: usize,
}

impl Grid {
    pub fn new(intervals: usize) -> Result<Self> {
        if intervals == 0 {
            return Err(Error::InvalidParameter {
                name: "M",
                reason: "grid needs at least one interval".into(),
            });
        }
        Ok(Grid { intervals })
    }

    /// Number of intervals `M`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Number of nodes `M + 1`.
    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        1.0 / self.intervals as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 / self.intervals as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.intervals).map(|j| self.node(j))
    }

    /// Index of the node equal to `t` (within 1e−12), if any.
    pub fn node_index(&self, t: f64) -> Option<usize> {
        if !(0.0..=1.0).contains(&t) {
            return None;
        }
        let j = libm::round(t * self.intervals as f64) as usize;
        ((self.node(j) - t).abs() <= 1e-12).then_some(j)
    }

    /// Nearest node to `t ∈ [0, 1]`.
    pub fn nearest_index(&self, t: f64) -> usize {
        let j = libm::round(t.clamp(0.0, 1.0) * self.intervals as f64);
        (j as usize).min(self.intervals)
    }
}

/// Product-trapezoidal weights for `∫₀^{t_n} (t_n − s)^{α−1} f(s) ds` at every
/// node `t_n` of a grid.
///
/// The weights are Toeplitz apart from the first column, so one table of
/// size `O(M)` serves all upper limits.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductRule {
    alpha: f64,
    scale: f64,
    first: Vec<f64>,
    interior: Vec<f64>,
}

impl ProductRule {
    /// Table for kernel exponent `α − 1`, `α > 0`.
    pub fn new(grid: Grid, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: alloc::format!("kernel order must be positive, got {alpha}"),
            });
        }
        let m = grid.intervals();
        let q = alpha + 1.0;
        let scale = libm::pow(grid.step(), alpha) / (alpha * q);
        let mut first = vec![0.0; m + 1];
        let mut interior = vec![0.0; m + 1];
        for n in 1..=m {
            first[n] = scale * first_moment(n, alpha);
            interior[n] = scale * second_difference(n, q);
        }
        Ok(ProductRule {
            alpha,
            scale,
            first,
            interior,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Largest supported node index.
    pub fn intervals(&self) -> usize {
        self.first.len() - 1
    }

    /// Weight of `f(t_j)` in the integral up to `t_n`.
    pub fn weight(&self, n: usize, j: usize) -> f64 {
        debug_assert!(j <= n && n <= self.intervals());
        if n == 0 {
            0.0
        } else if j == 0 {
            self.first[n]
        } else if j == n {
            self.scale
        } else {
            self.interior[n - j]
        }
    }

    /// All weights `w_0 … w_n` for upper limit `t_n`.
    pub fn weights(&self, n: usize) -> Vec<f64> {
        (0..=n).map(|j| self.weight(n, j)).collect()
    }

    /// `Σ_j w_j f_j` with upper limit `t_n`; `f` must cover nodes `0 … n`.
    pub fn apply(&self, n: usize, f: &[f64]) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let interior: f64 = f[1..n]
            .iter()
            .enumerate()
            .map(|(k, v)| self.interior[n - 1 - k] * v)
            .sum();
        self.first[n] * f[0] + interior + self.scale * f[n]
    }
}

/// `(n−1)^{α+1} − (n−1−α)·n^α`.
fn first_moment(n: usize, alpha: f64) -> f64 {
    let q = alpha + 1.0;
    if n < 4 {
        let nf = n as f64;
        return libm::pow(nf - 1.0, q) - (nf - 1.0 - alpha) * libm::pow(nf, alpha);
    }
    // n^q · Σ_{k≥2} C(q,k)(−1/n)^k
    let x = -1.0 / n as f64;
    let mut term = q * (q - 1.0) / 2.0 * x * x;
    let mut sum = term;
    for k in 2..400 {
        term *= (q - k as f64) / (k + 1) as f64 * x;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    libm::pow(n as f64, q) * sum
}

/// `(k+1)^q − 2k^q + (k−1)^q`.
fn second_difference(k: usize, q: f64) -> f64 {
    if k < 4 {
        let kf = k as f64;
        return libm::pow(kf + 1.0, q) - 2.0 * libm::pow(kf, q) + libm::pow(kf - 1.0, q);
    }
    // k^q · 2 Σ_{m≥1} C(q,2m) k^{−2m}
    let x2 = 1.0 / (k as f64 * k as f64);
    let mut term = q * (q - 1.0) / 2.0 * x2;
    let mut sum = term;
    let mut m = 1.0;
    for _ in 0..400 {
        term *= (q - 2.0 * m) * (q - 2.0 * m - 1.0) / ((2.0 * m + 1.0) * (2.0 * m + 2.0)) * x2;
        sum += term;
        m += 1.0;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    2.0 * libm::pow(k as f64, q) * sum
}

/// Weights `w_j` with `Σ_j w_j f(ξ_j) ≈ ∫₀^upper (upper − s)^{β−1} f(s) ds`,
/// exact for piecewise-linear `f`. `upper` must be a grid node.
pub fn kernel_weights(grid: Grid, upper: f64, beta: FractionalOrder) -> Result<Vec<f64>> {
    let n = grid.node_index(upper).ok_or(Error::OffGrid {
        upper,
        intervals: grid.intervals(),
    })?;
    Ok(ProductRule::new(grid, beta.get())?.weights(n))
}

/// `I^β f(upper) = (1/Γ(β)) ∫₀^upper (upper − s)^{β−1} f(s) ds` from samples
/// of `f` on every grid node.
pub fn rl_integral(f: &[f64], grid: Grid, beta: FractionalOrder, upper: f64) -> Result<f64> {
    if f.len() != grid.len() {
        return Err(Error::ShapeMismatch {
            expected: (1, grid.len()),
            found: (1, f.len()),
        });
    }
    let w = kernel_weights(grid, upper, beta)?;
    let sum: f64 = w.iter().zip(f).map(|(w, f)| w * f).sum();
    Ok(sum / gamma_positive(beta.get()))
}

/// Closed form `I^β s^p (t) = Γ(p+1)/Γ(p+1+β) · t^{p+β}`.
pub fn rl_integral_monomial(p: f64, beta: FractionalOrder, t: f64) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::Domain(alloc::format!("monomial power must be >= 0, got {p}")));
    }
    let b = beta.get();
    Ok(gamma(p + 1.0)? / gamma(p + 1.0 + b)? * libm::pow(t, p + b))
}

/// Caputo derivative of `ξ^p`: `Γ(p+1)/Γ(p+1−β) · ξ^{p−β}` for `p ≥ 1`.
pub fn caputo_monomial(p: f64, beta: FractionalOrder, xi: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Domain(alloc::format!(
            "Caputo monomial oracle needs p >= 1, got {p}"
        )));
    }
    let b = beta.get();
    Ok(gamma(p + 1.0)? / gamma(p + 1.0 - b)? * libm::pow(xi, p - b))
}

/// Caputo derivative of a constant function.
pub fn caputo_constant(_beta: FractionalOrder) -> f64 {
    0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(b: f64) -> FractionalOrder {
        FractionalOrder::new(b).unwrap()
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        let sqrt_pi = 1.772_453_850_905_516;
        assert!((gamma(0.5).unwrap() - sqrt_pi).abs() <= 1e-12 * sqrt_pi);
        assert!((gamma(1.25).unwrap() - 0.906_402_477_055_477).abs() <= 1e-12);
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        assert!(gamma(0.0).is_err());
        assert!(gamma(-1.5).is_err());
        assert!(gamma(f64::NAN).is_err());
    }

    #[test]
    fn order_bounds() {
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(1.0).is_ok());
        assert!(FractionalOrder::new(1.01).is_err());
    }

    #[test]
    fn grid_nodes() {
        let g = Grid::new(8).unwrap();
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(8), 1.0);
        assert_eq!(g.node_index(0.375), Some(3));
        assert_eq!(g.node_index(0.3), None);
        assert_eq!(g.nearest_index(0.3), 2);
        assert!(Grid::new(0).is_err());
    }

    #[test]
    fn weights_sum_to_kernel_moment() {
        let grid = Grid::new(64).unwrap();
        for &b in &[0.1, 0.25, 0.5, 0.9, 1.0] {
            for j in [1usize, 7, 32, 64] {
                let t = grid.node(j);
                let sum: f64 = kernel_weights(grid, t, order(b)).unwrap().iter().sum();
                let exact = libm::pow(t, b) / b;
                assert!((sum - exact).abs() < 1e-13, "b={b} t={t} {sum} vs {exact}");
            }
        }
    }

    #[test]
    fn linear_integrand_examples() {
        let grid = Grid::new(16).unwrap();
        let f: Vec<f64> = grid.nodes().collect();
        let w1 = kernel_weights(grid, 1.0, order(1.0)).unwrap();
        let plain: f64 = w1.iter().zip(&f).map(|(w, f)| w * f).sum();
        assert!((plain - 0.5).abs() < 1e-15);
        let w = kernel_weights(grid, 1.0, order(0.5)).unwrap();
        let beta_fn: f64 = w.iter().zip(&f).map(|(w, f)| w * f).sum();
        assert!((beta_fn - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn off_grid_upper_is_rejected() {
        let grid = Grid::new(10).unwrap();
        assert!(matches!(
            kernel_weights(grid, 0.33, order(0.5)),
            Err(Error::OffGrid { .. })
        ));
    }

    #[test]
    fn rl_integral_examples() {
        let grid = Grid::new(32).unwrap();
        let ones = vec![1.0; grid.len()];
        let b = order(0.3);
        let t = grid.node(20);
        let expected = libm::pow(t, 0.3) / gamma(1.3).unwrap();
        assert!((rl_integral(&ones, grid, b, t).unwrap() - expected).abs() < 1e-13);
        assert!((rl_integral(&ones, grid, order(1.0), 1.0).unwrap() - 1.0).abs() < 1e-15);

        let s: Vec<f64> = grid.nodes().collect();
        let v = rl_integral(&s, grid, order(0.25), 1.0).unwrap();
        assert!((v - 0.882_610_121_056_669_8).abs() < 1e-12);
        assert!(rl_integral(&s[1..], grid, b, 1.0).is_err());
    }

    #[test]
    fn caputo_examples() {
        for xi in [0.0, 0.3, 1.0] {
            assert_eq!(caputo_monomial(1.0, order(1.0), xi).unwrap(), 1.0);
        }
        assert_eq!(caputo_constant(order(0.4)), 0.0);
        let v = caputo_monomial(2.0, order(0.25), 1.0).unwrap();
        assert!((v - 1.243_503_145_292_591).abs() < 1e-12);
        assert!(caputo_monomial(0.5, order(0.25), 1.0).is_err());
    }

    #[test]
    fn series_branches_match_direct_formulas_at_small_arguments() {
        for &q in &[1.1, 1.5, 1.99] {
            let k = 5usize;
            let kf = k as f64;
            let direct = libm::pow(kf + 1.0, q) - 2.0 * libm::pow(kf, q) + libm::pow(kf - 1.0, q);
            assert!((second_difference(k, q) - direct).abs() < 1e-13);
            let a = q - 1.0;
            let direct = libm::pow(kf - 1.0, q) - (kf - 1.0 - a) * libm::pow(kf, a);
            assert!((first_moment(k, a) - direct).abs() < 1e-13);
        }
    }
}
