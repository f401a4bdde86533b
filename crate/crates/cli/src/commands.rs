use hahn_fde::bvp::check_existence;
use hahn_fde::mnc::{hausdorff_mnc, hu_experiment, HuReport, MncEstimate, PerturbationShape, VectorFamily};
use hahn_fde::picard::{picard_solve, truncation_study, TruncationRow};
use hahn_fde::problems::{Manufactured, Problem};
use hahn_fde::{ConstantsReport, FractionalOrder, GridFunction, SolveOptions, SolveReport, WeightSequence};
use serde::{Deserialize, Serialize};

use crate::config::{OutputFormat, ProblemConfig};
use crate::error::{exit, CliError};
use crate::output::{csv_table, fmt_f64, fmt_opt, to_json};

/// Reference value printed for the example71 existence product.
pub const EXAMPLE71_REFERENCE: f64 = 0.370;

/// Result of a command: the document to emit, the exit code and notes for
/// stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    pub body: String,
    pub exit: i32,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub problem: String,
    pub report: ConstantsReport,
    pub advisories: Vec<String>,
}

pub fn verify(config: &ProblemConfig) -> Result<VerifyOutput, CliError> {
    let spec = config.spec()?;
    let report = check_existence(&spec)?;
    let mut advisories = Vec::new();
    if config.problem.key() == "example71" {
        advisories.push(format!(
            "reference value {EXAMPLE71_REFERENCE:.3} for this example's existence product does not match the \
             recomputed product_signed = {:.6} (product_abs = {:.6}); the recomputed value is reported",
            report.product_signed, report.product_abs
        ));
    }
    if (spec.rho_effective() - spec.rho()).abs() > 0.0 {
        advisories.push(format!(
            "rho = {} is not a grid node; the operator uses rho_effective = {}",
            spec.rho(),
            spec.rho_effective()
        ));
    }
    Ok(VerifyOutput {
        problem: config.problem.key().into(),
        report,
        advisories,
    })
}

pub fn emit_verify(out: &VerifyOutput, format: OutputFormat) -> Result<Emission, CliError> {
    let r = &out.report;
    let body = match format {
        OutputFormat::Json => to_json(out)?,
        OutputFormat::Csv => {
            let rows = [
                ("beta", fmt_f64(r.beta)),
                ("mu", fmt_f64(r.mu)),
                ("rho", fmt_f64(r.rho)),
                ("rho_effective", fmt_f64(r.rho_effective)),
                ("kappa_signed", fmt_f64(r.kappa_signed)),
                ("kappa_abs", fmt_f64(r.kappa_abs)),
                ("equibound", fmt_f64(r.equibound)),
                ("lipschitz", fmt_f64(r.lipschitz)),
                ("product_signed", fmt_f64(r.product_signed)),
                ("product_abs", fmt_f64(r.product_abs)),
                ("exists_flag", r.exists_flag.to_string()),
                ("unique_flag", r.unique_flag.to_string()),
                ("g", fmt_f64(r.g)),
                ("g0", fmt_opt(r.g0)),
                ("g_bracket_sup", fmt_f64(r.g_bracket_sup)),
                ("g_kernel", fmt_f64(r.g_kernel)),
                ("g0_kernel", fmt_opt(r.g0_kernel)),
            ];
            csv_table(
                &["quantity", "value"],
                rows.iter().map(|(k, v)| vec![k.to_string(), v.clone()]),
            )?
        }
    };
    Ok(Emission {
        body,
        exit: if r.exists_flag { exit::OK } else { exit::NOT_MET },
        notes: out.advisories.iter().map(|a| format!("advisory: {a}")).collect(),
    })
}

pub fn solve(config: &ProblemConfig) -> Result<SolveReport, CliError> {
    let spec = config.spec()?;
    Ok(picard_solve(&spec, &config.solve_options(&spec))?)
}

/// `xi, m_1, …, m_N`, one row per node.
pub fn solution_csv(solution: &GridFunction) -> Result<String, CliError> {
    let (n, nodes) = solution.shape();
    let mut headers = vec!["xi".to_string()];
    headers.extend((1..=n).map(|i| format!("m_{i}")));
    let headers: Vec<&str> = headers.iter().map(String::as_str).collect();
    let intervals = nodes - 1;
    let rows = (0..nodes).map(|j| {
        let mut row = vec![fmt_f64(j as f64 / intervals as f64)];
        row.extend((0..n).map(|i| fmt_f64(solution.get(i, j))));
        row
    });
    csv_table(&headers, rows)
}

pub fn emit_solve(report: &SolveReport, format: OutputFormat) -> Result<Emission, CliError> {
    let body = match format {
        OutputFormat::Json => to_json(report)?,
        OutputFormat::Csv => solution_csv(&report.solution)?,
    };
    let mut notes = vec![format!(
        "iterations = {}, converged = {}, final residual = {:e}, empirical contraction = {:.6}",
        report.iterations, report.converged, report.final_residual, report.empirical_contraction
    )];
    if !report.converged {
        notes.push("max_iter reached before the tolerance".into());
    }
    Ok(Emission {
        body,
        exit: if report.converged { exit::OK } else { exit::NOT_MET },
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// `e^(j) / (d_{j−1} + d_j)`, `j = 1 … samples`.
    UnitSphere,
    /// State vectors of the Picard solution, one per grid node.
    Solution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MncOutput {
    pub family: FamilyKind,
    pub members: usize,
    pub weights: WeightSequence,
    pub estimate: MncEstimate,
}

pub fn mnc(config: &ProblemConfig, family: FamilyKind, k_max: usize, samples: usize) -> Result<MncOutput, CliError> {
    let d = config.weights.clone();
    let fam = match family {
        FamilyKind::UnitSphere => {
            if samples == 0 {
                return Err(CliError::config("--samples", "must be at least 1"));
            }
            VectorFamily::unit_sphere(&d, samples)
        }
        FamilyKind::Solution => VectorFamily::from_columns(&solve(config)?.solution)?,
    };
    let estimate = hausdorff_mnc(&fam, &d, k_max)?;
    Ok(MncOutput {
        family,
        members: fam.len(),
        weights: d,
        estimate,
    })
}

pub fn emit_mnc(out: &MncOutput, format: OutputFormat) -> Result<Emission, CliError> {
    let body = match format {
        OutputFormat::Json => to_json(out)?,
        OutputFormat::Csv => csv_table(
            &["k", "tail_sup"],
            out.estimate
                .tail_sup
                .iter()
                .enumerate()
                .map(|(k, v)| vec![(k + 1).to_string(), fmt_f64(*v)]),
        )?,
    };
    let mut notes = vec![format!("limit_estimate = {}", fmt_f64(out.estimate.limit_estimate))];
    if out.estimate.is_lower_bound {
        notes.push("family samples an infinite set; the estimate is a lower bound".into());
    }
    Ok(Emission {
        body,
        exit: exit::OK,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityOutput {
    pub problem: String,
    pub shape: PerturbationShape,
    pub report: HuReport,
}

pub fn stability(config: &ProblemConfig, epsilon: f64, shape: PerturbationShape) -> Result<StabilityOutput, CliError> {
    let spec = config.spec()?;
    let g = shape.samples(&spec, epsilon);
    let report = hu_experiment(&spec, &g, epsilon, &config.solve_options(&spec))?;
    Ok(StabilityOutput {
        problem: config.problem.key().into(),
        shape,
        report,
    })
}

pub fn emit_stability(out: &StabilityOutput, format: OutputFormat) -> Result<Emission, CliError> {
    let r = &out.report;
    let body = match format {
        OutputFormat::Json => to_json(out)?,
        OutputFormat::Csv => {
            let rows = [
                ("epsilon", fmt_f64(r.epsilon)),
                ("gap", fmt_f64(r.gap)),
                ("gap_sup", fmt_f64(r.gap_sup)),
                ("forcing_norm", fmt_f64(r.forcing_norm)),
                ("g", fmt_f64(r.g)),
                ("g0", fmt_f64(r.g0)),
                ("bound", fmt_f64(r.bound)),
                ("holds", r.holds.to_string()),
                ("g0_kernel", fmt_opt(r.g0_kernel)),
                ("bound_kernel", fmt_opt(r.bound_kernel)),
                ("holds_kernel", r.holds_kernel.to_string()),
                ("converged", r.converged.to_string()),
            ];
            csv_table(
                &["quantity", "value"],
                rows.iter().map(|(k, v)| vec![k.to_string(), v.clone()]),
            )?
        }
    };
    let mut notes = vec![format!(
        "gap = {:e}, bound G0*eps*1.1 = {:e}: {}",
        r.gap,
        r.bound,
        if r.holds { "holds" } else { "VIOLATED" }
    )];
    if let Some(b) = r.bound_kernel {
        notes.push(format!(
            "sup-norm gap = {:e}, discrete-kernel bound = {:e}: {}",
            r.gap_sup,
            b,
            if r.holds_kernel { "holds" } else { "VIOLATED" }
        ));
    }
    Ok(Emission {
        body,
        exit: if r.holds { exit::OK } else { exit::NOT_MET },
        notes,
    })
}

/// One grid size of a refinement study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementRow {
    pub intervals: usize,
    pub rho_effective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `max |m − m*|` over all nodes (manufactured problem only).
    pub error_sup: Option<f64>,
    /// `|m(1) − m*(1)|` (manufactured problem only).
    pub error_end: Option<f64>,
    pub order_sup: Option<f64>,
    pub order_end: Option<f64>,
    /// `max |m_M − m_{M_prev}|` on the nodes shared with the previous grid.
    pub delta_previous: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyOutput {
    pub problem: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Vec<TruncationRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement: Option<Vec<RefinementRow>>,
}

pub fn study(config: &ProblemConfig, ns: Option<&[usize]>, ms: Option<&[usize]>) -> Result<StudyOutput, CliError> {
    if ns.is_none() && ms.is_none() {
        return Err(CliError::config("--Ns/--Ms", "give at least one of --Ns or --Ms"));
    }
    let truncation = match ns {
        Some(ns) => {
            if ns.windows(2).any(|w| w[1] < w[0]) || ns.contains(&0) {
                return Err(CliError::config("--Ns", "sizes must be positive and increasing"));
            }
            let spec = config.spec_with(ns[0], config.m)?;
            let options = SolveOptions::new(config.tol, config.max_iter);
            Some(truncation_study(&spec, ns, &options)?)
        }
        None => None,
    };
    let refinement = match ms {
        Some(ms) => Some(refinement_study(config, ms)?),
        None => None,
    };
    Ok(StudyOutput {
        problem: config.problem.key().into(),
        truncation,
        refinement,
    })
}

fn refinement_study(config: &ProblemConfig, ms: &[usize]) -> Result<Vec<RefinementRow>, CliError> {
    if ms.is_empty() || ms.contains(&0) || ms.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::config(
            "--Ms",
            "grid sizes must be positive and strictly increasing",
        ));
    }
    let problem = config.problem.resolve()?;
    let p = config.parameters()?;
    let mut rows: Vec<RefinementRow> = Vec::with_capacity(ms.len());
    let mut previous: Option<(usize, GridFunction)> = None;
    for &m in ms {
        let spec = config.spec_with(config.n, m)?;
        let report = picard_solve(&spec, &config.solve_options(&spec))?;
        let sol = &report.solution;
        let (error_sup, error_end) = if problem == Problem::Manufactured {
            let exact = Manufactured::new(FractionalOrder::new(p.beta)?, p.mu, spec.rho_effective())?;
            let grid = spec.grid();
            let mut sup = 0.0f64;
            for i in 0..sol.components() {
                for j in 0..grid.len() {
                    sup = sup.max((sol.get(i, j) - exact.exact(grid.node(j))).abs());
                }
            }
            (Some(sup), Some((sol.get(0, m) - exact.exact(1.0)).abs()))
        } else {
            (None, None)
        };
        let delta_previous = previous.as_ref().and_then(|(pm, prev)| {
            (m % pm == 0).then(|| {
                let stride = m / pm;
                let mut delta = 0.0f64;
                for i in 0..sol.components() {
                    for j in 0..=*pm {
                        delta = delta.max((sol.get(i, j * stride) - prev.get(i, j)).abs());
                    }
                }
                delta
            })
        });
        let order = |now: Option<f64>, before: Option<f64>, pm: usize| match (now, before) {
            (Some(e), Some(b)) if e > 0.0 && b > 0.0 => Some((b / e).ln() / (m as f64 / pm as f64).ln()),
            _ => None,
        };
        let (order_sup, order_end) = match (previous.as_ref(), rows.last()) {
            (Some((pm, _)), Some(last)) => (
                order(error_sup, last.error_sup, *pm),
                order(error_end, last.error_end, *pm),
            ),
            _ => (None, None),
        };
        rows.push(RefinementRow {
            intervals: m,
            rho_effective: spec.rho_effective(),
            iterations: report.iterations,
            converged: report.converged,
            error_sup,
            error_end,
            order_sup,
            order_end,
            delta_previous,
        });
        previous = Some((m, report.solution));
    }
    Ok(rows)
}

pub fn emit_study(out: &StudyOutput, format: OutputFormat) -> Result<Emission, CliError> {
    let body = match format {
        OutputFormat::Json => to_json(out)?,
        OutputFormat::Csv => {
            let mut text = String::new();
            if let Some(rows) = &out.truncation {
                text += &csv_table(
                    &["N", "solution_norm", "iterations", "delta_previous"],
                    rows.iter().map(|r| {
                        vec![
                            r.components.to_string(),
                            fmt_f64(r.solution_norm),
                            r.iterations.to_string(),
                            fmt_opt(r.delta_previous),
                        ]
                    }),
                )?;
            }
            if let Some(rows) = &out.refinement {
                if !text.is_empty() {
                    text.push('\n');
                }
                text += &csv_table(
                    &[
                        "M",
                        "rho_effective",
                        "iterations",
                        "error_sup",
                        "order_sup",
                        "error_end",
                        "order_end",
                        "delta_previous",
                    ],
                    rows.iter().map(|r| {
                        vec![
                            r.intervals.to_string(),
                            fmt_f64(r.rho_effective),
                            r.iterations.to_string(),
                            fmt_opt(r.error_sup),
                            fmt_opt(r.order_sup),
                            fmt_opt(r.error_end),
                            fmt_opt(r.order_end),
                            fmt_opt(r.delta_previous),
                        ]
                    }),
                )?;
            }
            text
        }
    };
    let all_converged = out.refinement.iter().flatten().all(|r| r.converged);
    Ok(Emission {
        body,
        exit: if all_converged { exit::OK } else { exit::NOT_MET },
        notes: Vec::new(),
    })
}
