//! Right-hand-side families shipped with the workbench.
//!
//! Every family acts per component: `φ_i` reads only `m_i` (or nothing).

use alloc::sync::Arc;
use core::f64::consts::FRAC_PI_2;

use crate::bvp::{check_nonsingular, BvpSpec, RhsFamily};
use crate::fraccalc::{gamma, FractionalOrder, Grid};
use crate::seqspace::WeightSequence;
use crate::Result;

/// Named problem instances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Problem {
    /// `φ_i(s, m) = e^{−4s}/(i+3)² · cos(s + e^{2s}) · m_i(s)`.
    Example71,
    /// `φ_i(s, m) = Σ_l arctan(5/(1+(5l+2)(5l−3))) · e^{−3s} · ln(8/9 + |m_i(s)|)`.
    Example72,
    /// Forcing whose exact solution is `m*(ξ) = ξ² − cξ`.
    Manufactured,
    Zero,
    Constant(f64),
}

/// Default `(β, μ, ϱ)` of a registry entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemDefaults {
    pub beta: f64,
    pub mu: f64,
    pub rho: f64,
}

impl Problem {
    pub fn from_key(key: &str, value: Option<f64>) -> Option<Problem> {
        Some(match key {
            "example71" => Problem::Example71,
            "example72" => Problem::Example72,
            "manufactured" => Problem::Manufactured,
            "zero" => Problem::Zero,
            "constant" => Problem::Constant(value.unwrap_or(1.0)),
            _ => return None,
        })
    }

    pub fn key(&self) -> &'static str {
        match self {
            Problem::Example71 => "example71",
            Problem::Example72 => "example72",
            Problem::Manufactured => "manufactured",
            Problem::Zero => "zero",
            Problem::Constant(_) => "constant",
        }
    }

    pub fn defaults(&self) -> ProblemDefaults {
        match self {
            Problem::Example71 => ProblemDefaults {
                beta: 0.25,
                mu: 1.0,
                rho: 1.0 / 3.0,
            },
            Problem::Example72 => ProblemDefaults {
                beta: 0.2,
                mu: 0.5,
                rho: 1.0 / 6.0,
            },
            Problem::Manufactured | Problem::Zero | Problem::Constant(_) => ProblemDefaults {
                beta: 0.5,
                mu: 0.5,
                rho: 0.5,
            },
        }
    }

    /// Family for the given parameters; `rho` must be the effective (grid) value
    /// for the manufactured problem to be exact on the grid.
    pub fn family(&self, beta: FractionalOrder, mu: f64, rho: f64) -> Result<Arc<dyn RhsFamily>> {
        Ok(match *self {
            Problem::Example71 => Arc::new(Example71),
            Problem::Example72 => Arc::new(Example72::new()),
            Problem::Manufactured => Arc::new(Manufactured::new(beta, mu, rho)?),
            Problem::Zero => Arc::new(Zero),
            Problem::Constant(v) => Arc::new(Constant::new(v)),
        })
    }

    /// Builds a [`BvpSpec`] for this problem.
    pub fn spec(
        &self,
        beta: FractionalOrder,
        mu: f64,
        rho: f64,
        weights: WeightSequence,
        components: usize,
        grid: Grid,
    ) -> Result<BvpSpec> {
        let spec = BvpSpec::new(beta, mu, rho, Arc::new(Zero), weights, components, grid)?;
        let family = self.family(beta, mu, spec.rho_effective())?;
        Ok(spec.with_rhs(family))
    }

    /// Spec with the registry's own `(β, μ, ϱ)`.
    pub fn default_spec(&self, weights: WeightSequence, components: usize, grid: Grid) -> Result<BvpSpec> {
        let d = self.defaults();
        self.spec(FractionalOrder::new(d.beta)?, d.mu, d.rho, weights, components, grid)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Example71;

impl RhsFamily for Example71 {
    fn key(&self) -> &str {
        "example71"
    }

    fn eval(&self, component: usize, s: f64, m: &[f64]) -> f64 {
        let i = (component + 1) as f64;
        libm::exp(-4.0 * s) / ((i + 3.0) * (i + 3.0)) * libm::cos(s + libm::exp(2.0 * s)) * m[component]
    }

    fn equibound(&self) -> f64 {
        1.0 / 9.0
    }

    fn lipschitz(&self) -> f64 {
        1.0 / 9.0
    }
}

/// The arctan series telescopes: `arctan(5l+2) − arctan(5l−3)` summed over
/// `l ≥ 1` is `π/2 − arctan 2`.
#[derive(Debug, Clone, Copy)]
pub struct Example72 {
    series: f64,
}

impl Example72 {
    pub fn new() -> Self {
        Example72 {
            series: FRAC_PI_2 - libm::atan(2.0),
        }
    }

    /// `Σ_{l ≥ 1} arctan(5 / (1 + (5l+2)(5l−3)))`.
    pub fn series(&self) -> f64 {
        self.series
    }
}

impl Default for Example72 {
    fn default() -> Self {
        Self::new()
    }
}

impl RhsFamily for Example72 {
    fn key(&self) -> &str {
        "example72"
    }

    fn eval(&self, component: usize, s: f64, m: &[f64]) -> f64 {
        self.series * libm::exp(-3.0 * s) * libm::log(8.0 / 9.0 + m[component].abs())
    }

    fn equibound(&self) -> f64 {
        1.0 / 3.0
    }

    fn lipschitz(&self) -> f64 {
        1.0 / 3.0
    }
}

/// `φ(ξ) = 2ξ^{2−β}/Γ(3−β) − c ξ^{1−β}/Γ(2−β)`, the Caputo derivative of
/// `m*(ξ) = ξ² − cξ` with `c = (1 − μϱ³/3)/(1 − μϱ²/2)`; `m*` satisfies both
/// boundary conditions.
#[derive(Debug, Clone, Copy)]
pub struct Manufactured {
    beta: f64,
    c: f64,
    g2: f64,
    g3: f64,
}

impl Manufactured {
    pub fn new(beta: FractionalOrder, mu: f64, rho: f64) -> Result<Self> {
        check_nonsingular(mu, rho)?;
        let b = beta.get();
        Ok(Manufactured {
            beta: b,
            c: (1.0 - mu * rho * rho * rho / 3.0) / (1.0 - mu * rho * rho / 2.0),
            g2: gamma(2.0 - b)?,
            g3: gamma(3.0 - b)?,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `m*(ξ)`.
    pub fn exact(&self, xi: f64) -> f64 {
        xi * xi - self.c * xi
    }

    pub fn forcing(&self, s: f64) -> f64 {
        2.0 * libm::pow(s, 2.0 - self.beta) / self.g3 - self.c * libm::pow(s, 1.0 - self.beta) / self.g2
    }
}

impl RhsFamily for Manufactured {
    fn key(&self) -> &str {
        "manufactured"
    }

    fn eval(&self, _component: usize, s: f64, _m: &[f64]) -> f64 {
        self.forcing(s)
    }

    fn equibound(&self) -> f64 {
        0.0
    }

    fn lipschitz(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl RhsFamily for Zero {
    fn key(&self) -> &str {
        "zero"
    }

    fn eval(&self, _component: usize, _s: f64, _m: &[f64]) -> f64 {
        0.0
    }

    fn equibound(&self) -> f64 {
        0.0
    }

    fn lipschitz(&self) -> f64 {
        0.0
    }
}

/// `φ_i ≡ value` for every component.
#[derive(Debug, Clone, Copy)]
pub struct Constant {
    value: f64,
}

impl Constant {
    pub fn new(value: f64) -> Self {
        Constant { value }
    }
}

impl RhsFamily for Constant {
    fn key(&self) -> &str {
        "constant"
    }

    fn eval(&self, _component: usize, _s: f64, _m: &[f64]) -> f64 {
        self.value
    }

    fn equibound(&self) -> f64 {
        0.0
    }

    fn lipschitz(&self) -> f64 {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraccalc::caputo_monomial;

    #[test]
    fn arctan_series_telescopes() {
        let partial: f64 = (1..200_000)
            .map(|l| {
                let l = l as f64;
                libm::atan(5.0 / (1.0 + (5.0 * l + 2.0) * (5.0 * l - 3.0)))
            })
            .sum();
        // tail after L terms is arctan(1/(5L+2)) ≈ 1e-6
        assert!((Example72::new().series() - partial).abs() < 2e-6);
        assert!((Example72::new().series() - libm::atan(0.5)).abs() < 1e-15);
    }

    #[test]
    fn example72_is_not_zero_at_zero_state() {
        let v = Example72::new().eval(0, 0.0, &[0.0]);
        assert!(v < 0.0);
    }

    #[test]
    fn example71_depends_only_on_own_component() {
        let f = Example71;
        let a = f.eval(1, 0.3, &[5.0, 1.0, 7.0]);
        let b = f.eval(1, 0.3, &[-2.0, 1.0, 0.0]);
        assert_eq!(a, b);
        assert_eq!(f.eval(0, 0.3, &[0.0]), 0.0);
    }

    #[test]
    fn manufactured_forcing_is_caputo_of_exact_solution() {
        let beta = FractionalOrder::new(0.3).unwrap();
        let man = Manufactured::new(beta, 1.0, 0.4).unwrap();
        for &xi in &[0.1, 0.5, 1.0] {
            let expected = caputo_monomial(2.0, beta, xi).unwrap() - man.c() * caputo_monomial(1.0, beta, xi).unwrap();
            assert!((man.forcing(xi) - expected).abs() < 1e-13);
        }
        // both boundary conditions: m*(0) = 0 and m*(1) = μ∫₀^ϱ m*
        let (mu, rho) = (1.0, 0.4);
        let integral = rho * rho * rho / 3.0 - man.c() * rho * rho / 2.0;
        assert_eq!(man.exact(0.0), 0.0);
        assert!((man.exact(1.0) - mu * integral).abs() < 1e-15);
    }

    #[test]
    fn registry_keys_round_trip() {
        for p in [
            Problem::Example71,
            Problem::Example72,
            Problem::Manufactured,
            Problem::Zero,
            Problem::Constant(2.0),
        ] {
            assert_eq!(Problem::from_key(p.key(), Some(2.0)), Some(p));
        }
        assert_eq!(Problem::from_key("nope", None), None);
    }
}
