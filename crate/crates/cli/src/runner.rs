//! Scenario execution: per-model orchestration of pole analysis,
//! time-domain evolution and decay fitting, and the file outputs.

use crate::report::{
    render_poles_csv, render_report, render_series_csv, LabeledEstimate, ReferenceEntry, RunReport,
};
use crate::scenario::{ModelSpec, OutputKind, Scenario};
use decotime_core::cpoles::PoleLocation;
use decotime_core::decofit::{
    background_ratio, envelope_ratios, estimate_from_fit, fit_series, FitOptions,
};
use decotime_core::models::{
    analyze_kernel_poles, einselection_comparison, macroscopic_decoherence_time, nbody_scaled_time,
    thermal_decoherence_time, thermal_pole_grid, two_stage_times, DecoherenceEstimate,
    MacroscopicBody, Method,
};
use decotime_core::oscint::{fluctuating_series, QuadratureConfig};
use decotime_core::vanhove::{ExpectationSeries, VanHoveObservable, VanHoveState};
use decotime_core::{Error, Result};
use std::path::Path;

/// Process exit semantics: 0 clean, 1 errors, 2 convergence warnings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    Error,
    ConvergenceWarnings,
}

impl ExitStatus {
    pub fn code(&self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Error => 1,
            ExitStatus::ConvergenceWarnings => 2,
        }
    }
}

/// Everything a scenario produces before files are written.
#[derive(Debug, Default)]
pub struct Analysis {
    pub estimates: Vec<LabeledEstimate>,
    pub poles: Vec<PoleLocation>,
    pub series: Option<ExpectationSeries>,
    pub references: Vec<ReferenceEntry>,
    pub warnings: Vec<String>,
}

impl Analysis {
    fn push(&mut self, label: &str, estimate: DecoherenceEstimate) {
        self.estimates.push(LabeledEstimate {
            label: label.to_string(),
            estimate,
        });
    }
}

fn reference(
    label: &str,
    quoted: f64,
    computed: Option<f64>,
    note: &str,
) -> ReferenceEntry {
    let within = computed
        .filter(|c| c.is_finite() && *c > 0.0)
        .map(|c| (c / quoted).log10().abs() <= 1.0);
    ReferenceEntry {
        label: label.to_string(),
        quoted_seconds: quoted,
        computed_seconds: computed,
        within_one_decade: within,
        note: note.to_string(),
    }
}

fn evolve_and_fit(
    analysis: &mut Analysis,
    state: &VanHoveState,
    obs: &VanHoveObservable,
    t_scale: f64,
    scenario: &Scenario,
) -> Result<()> {
    let spec = scenario.evolution.expect("caller checked evolution");
    let cfg = QuadratureConfig::from(scenario.quadrature);
    let t_max = spec.t_max_factor * t_scale;
    let times: Vec<f64> = (0..spec.points)
        .map(|i| t_max * i as f64 / (spec.points - 1) as f64)
        .collect();
    let series = fluctuating_series(state, obs, &times, &cfg)?;
    let unconverged = series.unconverged_indices();
    if !unconverged.is_empty() {
        analysis.warnings.push(format!(
            "{} of {} series points did not reach the quadrature tolerance",
            unconverged.len(),
            series.len()
        ));
    }
    let fit = fit_series(&series, &FitOptions::default())?;
    let mut est = estimate_from_fit(&fit);
    est.diagnostics.background_to_pole_ratio = background_ratio(&series, &fit);
    est.diagnostics.envelope_ratios = envelope_ratios(&series, est.t_d_seconds);
    analysis.push("fit", est);
    analysis.series = Some(series);
    Ok(())
}

fn analyze(scenario: &Scenario) -> Result<Analysis> {
    let mut analysis = Analysis::default();
    match &scenario.model {
        ModelSpec::Friedrichs(model) => {
            let pole = model.pole_decoherence_time()?;
            let formula = model.formula_decoherence_time()?;
            analysis.poles = pole.diagnostics.poles.clone();
            let pole_time = pole.t_d_seconds;
            let formula_time = formula.t_d_seconds;
            analysis.push("pole", pole);
            analysis.push("formula", formula);
            analysis.references.push(reference(
                "microscopic_resonance",
                1e-15,
                Some(formula_time),
                "published estimate of ~1e-15 s for a characteristic damping energy of 1 eV",
            ));
            if scenario.evolution.is_some() {
                if pole_time.is_finite() {
                    let gamma = analysis.estimates[0].estimate.gamma_ev;
                    let (state, obs) = model.pole_dominant_pair(gamma)?;
                    evolve_and_fit(&mut analysis, &state, &obs, pole_time, scenario)?;
                } else {
                    analysis.warnings.push(
                        "no resonance pole (vanishing coupling); evolution skipped".into(),
                    );
                }
            }
        }
        ModelSpec::Thermal(model) => {
            analysis.poles = thermal_pole_grid(model)?;
            let est = thermal_decoherence_time(model)?;
            let computed = est.t_d_seconds;
            analysis.push("formula", est);
            analysis.references.push(reference(
                "thermal_bath_room_temperature",
                1e-13,
                Some(computed),
                "published figure of 1e-13 s at ~100 K; the closed form gives ~6e-15 s, \
                 so the figure is flagged rather than reproduced",
            ));
            if scenario.evolution.is_some() {
                analysis.warnings.push(
                    "time-domain evolution is not available for the thermal occupation \
                     (it is singular on the real energy axis); pole and formula routes only"
                        .into(),
                );
            }
        }
        ModelSpec::Macroscopic(body) => {
            let mut any = false;
            if let Some(v_i) = body.v_i {
                let n = body.particle_count()?;
                let single = DecoherenceEstimate::from_gamma(v_i, Method::Formula);
                let scaled = nbody_scaled_time(&single, n)?;
                let computed = scaled.t_d_seconds;
                analysis.push("nbody_formula", scaled);
                analysis.references.push(reference(
                    "mole_sized_body",
                    1e-39,
                    Some(computed),
                    "published estimate of 1e-39 s for a mole of particles at 1 eV each",
                ));
                any = true;
            }
            if body.m_kg.is_some()
                && body.l_m.is_some()
                && body.upsilon_s.is_some()
                && body.t_kelvin.is_some()
            {
                let est = macroscopic_decoherence_time(body)?;
                let computed = est.t_d_seconds;
                analysis.push("action_thermal_formula", est);
                analysis.references.push(reference(
                    "thermal_mole_sized_body",
                    1e-37,
                    Some(computed),
                    "published figure of 1e-37 s for a mole-particle thermal system; \
                     inherits the same thermal-formula gap flagged above",
                ));
                any = true;
            }
            if !any {
                return Err(Error::Model(
                    "macroscopic model needs V_i with a particle count (N or M/L/Upsilon), \
                     or the full M/L/Upsilon/T set"
                        .into(),
                ));
            }
            if scenario.evolution.is_some() {
                analysis
                    .warnings
                    .push("macroscopic scaling has no time-domain evolution; formula routes only".into());
            }
        }
        ModelSpec::Einselection(sc) => {
            let einselection = einselection_comparison(sc)?;
            analysis.push("de_broglie_formula", einselection);
            let body = MacroscopicBody {
                m_kg: Some(sc.m_kg),
                l_m: Some(sc.l0_m),
                upsilon_s: Some(sc.gamma0_inv_s),
                t_kelvin: Some(sc.t_kelvin),
                ..MacroscopicBody::default()
            };
            analysis.push("action_formula", macroscopic_decoherence_time(&body)?);
            if scenario.evolution.is_some() {
                analysis
                    .warnings
                    .push("einselection comparison has no time-domain evolution; formula routes only".into());
            }
        }
        ModelSpec::TwoStage(model) => {
            let (deco, relax) = two_stage_times(model)?;
            let relax_time = relax.t_d_seconds;
            analysis.push("decoherence", deco);
            analysis.push("relaxation", relax);
            analysis.references.push(reference(
                "macroscopic_relaxation",
                1.0,
                Some(relax_time),
                "relaxation of a macroscopic body is quoted at the order of one second",
            ));
            if scenario.evolution.is_some() {
                analysis
                    .warnings
                    .push("two-stage model has no time-domain evolution; formula routes only".into());
            }
        }
        ModelSpec::CustomKernel(spec) => {
            let (state, obs) = spec.build()?;
            let kernel_analysis = analyze_kernel_poles(&state, &obs)?;
            analysis.poles = kernel_analysis.poles.clone();
            let pole_time = kernel_analysis.estimate.t_d_seconds;
            analysis.push("pole", kernel_analysis.estimate);
            if scenario.evolution.is_some() {
                let t_scale = if pole_time.is_finite() {
                    Some(pole_time)
                } else {
                    state
                        .regular()
                        .characteristic_time()
                        .or_else(|| obs.regular().characteristic_time())
                };
                match t_scale {
                    Some(t_scale) => {
                        evolve_and_fit(&mut analysis, &state, &obs, t_scale, scenario)?
                    }
                    None => analysis.warnings.push(
                        "no time scale available (no pole and no kernel width); evolution skipped"
                            .into(),
                    ),
                }
            }
        }
    }
    Ok(analysis)
}

/// Run a scenario and write the requested outputs into `out_dir`. The
/// report file is always written, even when the analysis fails.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> (RunReport, ExitStatus) {
    let mut report = RunReport {
        scenario: scenario.name.clone(),
        model_type: scenario.model.type_name().to_string(),
        ..RunReport::default()
    };

    let analysis = match analyze(scenario) {
        Ok(a) => Some(a),
        Err(e) => {
            report.error = Some(e.to_string());
            None
        }
    };

    let mut status = ExitStatus::Success;
    let mut series = None;
    let mut poles = Vec::new();
    if let Some(a) = analysis {
        report.estimates = a.estimates;
        report.paper_reference_values = a.references;
        report.warnings = a.warnings;
        series = a.series;
        poles = a.poles;
        report.compute_agreement();
    } else {
        status = ExitStatus::Error;
    }

    if let Err(e) = std::fs::create_dir_all(out_dir) {
        report.error = Some(format!("cannot create output directory: {e}"));
        return (report, ExitStatus::Error);
    }

    if scenario.wants(OutputKind::Series) {
        if let Some(series) = &series {
            let path = out_dir.join("series.csv");
            if let Err(e) = std::fs::write(&path, render_series_csv(series)) {
                report.error = Some(format!("cannot write series.csv: {e}"));
                status = ExitStatus::Error;
            } else {
                report.outputs_written.push("series.csv".into());
            }
        }
    }
    if scenario.wants(OutputKind::Poles) {
        let path = out_dir.join("poles.csv");
        if let Err(e) = std::fs::write(&path, render_poles_csv(&poles)) {
            report.error = Some(format!("cannot write poles.csv: {e}"));
            status = ExitStatus::Error;
        } else {
            report.outputs_written.push("poles.csv".into());
        }
    }

    // report.json is written last so it can list every other output, and
    // unconditionally so failures leave a record.
    report.outputs_written.push("report.json".into());
    let text = render_report(&report);
    if let Err(e) = std::fs::write(out_dir.join("report.json"), text) {
        eprintln!("cannot write report.json: {e}");
        return (report, ExitStatus::Error);
    }

    if status == ExitStatus::Success {
        if report.error.is_some() {
            status = ExitStatus::Error;
        } else if !report.all_warnings().is_empty() {
            status = ExitStatus::ConvergenceWarnings;
        }
    }
    (report, status)
}

/// Pole analysis only, for the `poles` subcommand.
pub fn poles_only(scenario: &Scenario) -> Result<Vec<PoleLocation>> {
    Ok(analyze(scenario)?.poles)
}
