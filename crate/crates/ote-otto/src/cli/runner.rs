//! Command implementations: each maps a resolved run onto one result table.
//!
//! The expensive pieces are shared deliberately: the apparent working-fluid
//! temperature is computed once per run (one composite steady state), the
//! cold-bath temperature `T_env(k omega_a)` once per grid ratio (one field
//! quadrature each, in parallel), and finite-time ramps read their rates
//! from a single interpolated table spanning `[k_min omega_a, omega_a]`
//! whose honesty metric is echoed into the output metadata. Isochore
//! endpoints always use exactly evaluated temperatures, so stroke-speed
//! ladders converge to the ideal cycle without an interpolation floor.

use chrono::{SecondsFormat, Utc};
use rayon::prelude::*;

use crate::constants::HBAR;
use crate::cycle::{
    finite_cycle, ideal_cycle, parallel_sweep, performance_metrics, si_qoc, CyclePoint,
    PerformanceMetrics, RateTable, SweepRow,
};
use crate::em_env::EffectiveTemperature;
use crate::error::{Error, Result};
use crate::lindblad::{
    emitter_temperature, local_rates, partial_trace_aux, partial_trace_q, t_env_at,
    CompositeSystem,
};

use super::config::{parse_config, CycleMode, RunConfig};
use super::table::ResultTable;

/// Bundled studies: the k-sweep families (`fig5`, `fig7`), the
/// stroke-speed metrics scan (`fig6`), and the headline summary (`sec4`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum StudyTarget {
    Fig5,
    Fig6,
    Fig7,
    Sec4,
}

impl StudyTarget {
    pub fn name(self) -> &'static str {
        match self {
            StudyTarget::Fig5 => "fig5",
            StudyTarget::Fig6 => "fig6",
            StudyTarget::Fig7 => "fig7",
            StudyTarget::Sec4 => "sec4",
        }
    }

    /// The study's run file, embedded from `presets/`.
    pub fn preset_text(self) -> &'static str {
        match self {
            StudyTarget::Fig5 => include_str!("../../presets/fig5.toml"),
            StudyTarget::Fig6 => include_str!("../../presets/fig6.toml"),
            StudyTarget::Fig7 => include_str!("../../presets/fig7.toml"),
            StudyTarget::Sec4 => include_str!("../../presets/sec4.toml"),
        }
    }
}

fn with_context(err: Error, ctx: &str) -> Error {
    match err {
        Error::Config(m) => Error::Config(format!("{ctx}: {m}")),
        Error::Numerics(m) => Error::Numerics(format!("{ctx}: {m}")),
        Error::Io(m) => Error::Io(format!("{ctx}: {m}")),
    }
}

fn stamp(table: &mut ResultTable, cfg: &RunConfig, command: &str) {
    table.set_meta("command", command);
    table.set_meta("config_digest", &cfg.digest);
    table.set_meta("version", env!("CARGO_PKG_VERSION"));
    table.set_meta(
        "timestamp",
        &Utc::now().to_rfc3339_opts(SecondsFormat::Micros, true),
    );
    for (k, v) in &cfg.defaults_applied {
        table.set_meta(&format!("default.{k}"), v);
    }
}

/// Apparent working-fluid temperature from the composite steady state.
fn hot_bath(cfg: &RunConfig) -> Result<EffectiveTemperature> {
    let sys = CompositeSystem::assemble(&cfg.environment, &cfg.emitter)?;
    sys.working_fluid_temperature()
}

/// Cold-bath temperature `T_env(k omega_a)` at the emitter height.
fn cold_bath(cfg: &RunConfig, k: f64) -> Result<EffectiveTemperature> {
    if k == 0.0 {
        // omega_b = 0: the gap closes and any bath pins p = 1/2, which is
        // what beta = 0 encodes; T_env itself has no limit there.
        return Ok(EffectiveTemperature::from_beta(0.0));
    }
    let e = &cfg.emitter;
    t_env_at(
        &cfg.environment,
        k * e.omega_a,
        e.z,
        e.dipole_moment,
        e.orientation,
    )
    .map_err(|err| with_context(err, &format!("T_env at k = {k}")))
}

/// One cold-bath temperature per grid ratio, evaluated in parallel.
fn cold_cache(cfg: &RunConfig) -> Result<Vec<EffectiveTemperature>> {
    cfg.cycle
        .ks
        .par_iter()
        .map(|&k| cold_bath(cfg, k))
        .collect()
}

/// Rate law used inside finite-time ramps.
enum RampRates {
    Table(RateTable),
    /// Degenerate sweep range (k = 1 only): constant rates at `omega_a`.
    Constant(f64, f64),
}

impl RampRates {
    fn at(&self, omega: f64) -> (f64, f64) {
        match self {
            RampRates::Table(t) => t.rates(omega),
            RampRates::Constant(gp, gm) => (*gp, *gm),
        }
    }

    fn rel_error(&self) -> f64 {
        match self {
            RampRates::Table(t) => t.max_rel_error(),
            RampRates::Constant(..) => 0.0,
        }
    }
}

fn ramp_rates(cfg: &RunConfig) -> Result<RampRates> {
    let e = &cfg.emitter;
    let k_min = cfg.cycle.ks.iter().copied().fold(f64::INFINITY, f64::min);
    if !(k_min > 0.0) {
        return Err(Error::config(
            "finite-time strokes need k > 0 (omega_b = 0 leaves no bath transition)",
        ));
    }
    let lo = k_min * e.omega_a;
    let hi = e.omega_a;
    if lo >= hi * (1.0 - 1e-12) {
        let (gp, gm) = local_rates(&cfg.environment, hi, e.z, e.dipole_moment, e.orientation)?;
        return Ok(RampRates::Constant(gp, gm));
    }
    let table = RateTable::from_fn(lo, hi, cfg.cycle.rate_table_points, |omega| {
        local_rates(&cfg.environment, omega, e.z, e.dipole_moment, e.orientation)
    })?;
    Ok(RampRates::Table(table))
}

fn cycle_columns() -> Vec<(&'static str, &'static str)> {
    vec![
        ("k", "1"),
        ("omega_b", "rad/s"),
        ("alpha", "1/s"),
        ("hot_temperature", "K"),
        ("cold_temperature", "K"),
        ("work", "J"),
        ("heat_absorbed", "J"),
        ("heat_released", "J"),
        ("efficiency", "1"),
        ("pwc", "1"),
        ("first_law_defect", "J"),
    ]
}

fn cycle_row(p: &CyclePoint) -> Vec<f64> {
    vec![
        p.k,
        p.omega_b,
        p.alpha,
        p.hot_temperature,
        p.cold_temperature,
        p.work_extracted,
        p.heat_absorbed,
        p.heat_released,
        p.efficiency.unwrap_or(f64::NAN),
        if p.pwc_satisfied { 1.0 } else { 0.0 },
        p.first_law_defect,
    ]
}

fn push_sweep_rows(table: &mut ResultTable, rows: Vec<SweepRow>, family: Option<f64>) -> Result<()> {
    for row in rows {
        let p = row
            .point
            .map_err(|e| with_context(e, &format!("sweep point k = {}", row.parameter)))?;
        let mut cells = cycle_row(&p);
        if let Some(f) = family {
            cells.insert(0, f);
        }
        table.push_row(cells)?;
    }
    Ok(())
}

/// `rates`: local exchange rates and effective temperature over the k-grid.
pub fn rates_table(cfg: &RunConfig) -> Result<ResultTable> {
    let e = &cfg.emitter;
    let mut table = ResultTable::new(&[
        ("k", "1"),
        ("omega", "rad/s"),
        ("gamma_plus", "1/s"),
        ("gamma_minus", "1/s"),
        ("t_env", "K"),
        ("p_eq", "1"),
    ])?;
    let rows: Vec<Vec<f64>> = cfg
        .cycle
        .ks
        .par_iter()
        .map(|&k| -> Result<Vec<f64>> {
            if !(k > 0.0) {
                return Err(Error::config(format!(
                    "rates need k > 0 (no transition at omega = 0), got {k}"
                )));
            }
            let omega = k * e.omega_a;
            let (gp, gm) =
                local_rates(&cfg.environment, omega, e.z, e.dipole_moment, e.orientation)
                    .map_err(|err| with_context(err, &format!("rates at k = {k}")))?;
            let t = crate::em_env::effective_temperature(gp, gm, omega)?;
            Ok(vec![k, omega, gp, gm, t.kelvin(), gm / (gp + gm)])
        })
        .collect::<Result<_>>()?;
    for row in rows {
        table.push_row(row)?;
    }
    stamp(&mut table, cfg, "rates");
    Ok(table)
}

/// `steady`: composite steady state, apparent working-fluid temperature,
/// and solver diagnostics.
pub fn steady_table(cfg: &RunConfig) -> Result<ResultTable> {
    let e = &cfg.emitter;
    let sys = CompositeSystem::assemble(&cfg.environment, &cfg.emitter)?;
    let (rho, report) = sys.steady_state()?;
    let rq = partial_trace_aux(&rho)?;
    let theta = emitter_temperature(&rq, e.omega_a)?;
    let raux = partial_trace_q(&rho)?;
    let (gp, gm) = local_rates(&cfg.environment, e.omega_a, e.z, e.dipole_moment, e.orientation)?;
    let t_env_a = crate::em_env::effective_temperature(gp, gm, e.omega_a)?;

    let mut table = ResultTable::new(&[
        ("theta_wf", "K"),
        ("p_excited", "1"),
        ("t_env_a", "K"),
        ("lambda", "rad/s"),
        ("p_aux_0", "1"),
        ("p_aux_1", "1"),
        ("p_aux_2", "1"),
        ("rotating_residual", "1/s"),
        ("lab_residual", "1/s"),
    ])?;
    table.push_row(vec![
        theta.kelvin(),
        rq[(1, 1)].re,
        t_env_a.kelvin(),
        sys.lambda,
        raux[(0, 0)].re,
        raux[(1, 1)].re,
        raux[(2, 2)].re,
        report.rotating_residual,
        report.lab_residual,
    ])?;
    stamp(&mut table, cfg, "steady");
    Ok(table)
}

/// `cycle`: a single cycle evaluation at the configured `k` (and `alpha`).
pub fn cycle_table(cfg: &RunConfig) -> Result<ResultTable> {
    let e = &cfg.emitter;
    let c = &cfg.cycle;
    if !c.k_is_single {
        return Err(Error::config(
            "the cycle command evaluates one point; set cycle.k (use sweep for grids)",
        ));
    }
    let k = c.ks[0];
    let mut rate_table_err = None;
    let point = match c.mode {
        CycleMode::Standard => si_qoc(
            e.omega_a,
            k * e.omega_a,
            cfg.environment.slab.temperature,
            cfg.environment.blackbody_temperature,
        )?,
        CycleMode::OteIdeal => {
            let hot = hot_bath(cfg)?;
            let cold = cold_bath(cfg, k)?;
            ideal_cycle(e.omega_a, k * e.omega_a, hot, cold)?
        }
        CycleMode::OteFinite => {
            if !c.alpha_is_single {
                return Err(Error::config(
                    "the cycle command evaluates one point; set cycle.alpha (use sweep for grids)",
                ));
            }
            let hot = hot_bath(cfg)?;
            let cold = cold_bath(cfg, k)?;
            let ramp = ramp_rates(cfg)?;
            rate_table_err = Some(ramp.rel_error());
            finite_cycle(
                e.omega_a,
                k * e.omega_a,
                c.alphas[0],
                hot,
                cold,
                |w| ramp.at(w),
                &c.ode,
            )?
        }
    };
    let mut table = ResultTable::new(&cycle_columns())?;
    table.push_row(cycle_row(&point))?;
    if let Some(err) = rate_table_err {
        table.set_meta("rate_table_rel_error", &format!("{err:e}"));
    }
    stamp(&mut table, cfg, "cycle");
    Ok(table)
}

/// `sweep`: the configured cycle family over the k-grid (and, for
/// finite-time runs, every configured `alpha`, slowest ladder first).
pub fn sweep_table(cfg: &RunConfig) -> Result<ResultTable> {
    let e = &cfg.emitter;
    let c = &cfg.cycle;
    let mut table = ResultTable::new(&cycle_columns())?;
    match c.mode {
        CycleMode::Standard => {
            let t1 = cfg.environment.slab.temperature;
            let t2 = cfg.environment.blackbody_temperature;
            let rows = parallel_sweep(&c.ks, |k| si_qoc(e.omega_a, k * e.omega_a, t1, t2));
            push_sweep_rows(&mut table, rows, None)?;
        }
        CycleMode::OteIdeal => {
            let hot = hot_bath(cfg)?;
            let colds = cold_cache(cfg)?;
            for (&k, &cold) in c.ks.iter().zip(&colds) {
                let p = ideal_cycle(e.omega_a, k * e.omega_a, hot, cold)
                    .map_err(|err| with_context(err, &format!("sweep point k = {k}")))?;
                table.push_row(cycle_row(&p))?;
            }
        }
        CycleMode::OteFinite => {
            let hot = hot_bath(cfg)?;
            let colds = cold_cache(cfg)?;
            let ramp = ramp_rates(cfg)?;
            table.set_meta("rate_table_rel_error", &format!("{:e}", ramp.rel_error()));
            let points = finite_family(cfg, hot, &colds, &ramp)?;
            for p in &points {
                table.push_row(cycle_row(p))?;
            }
        }
    }
    stamp(&mut table, cfg, "sweep");
    Ok(table)
}

/// Every (alpha, k) pair of the grids, alpha-major, evaluated in parallel
/// with deterministic ordering.
fn finite_family(
    cfg: &RunConfig,
    hot: EffectiveTemperature,
    colds: &[EffectiveTemperature],
    ramp: &RampRates,
) -> Result<Vec<CyclePoint>> {
    let e = &cfg.emitter;
    let c = &cfg.cycle;
    let jobs: Vec<(f64, usize)> = c
        .alphas
        .iter()
        .flat_map(|&a| (0..c.ks.len()).map(move |i| (a, i)))
        .collect();
    jobs.par_iter()
        .map(|&(alpha, i)| {
            let k = c.ks[i];
            finite_cycle(
                e.omega_a,
                k * e.omega_a,
                alpha,
                hot,
                colds[i],
                |w| ramp.at(w),
                &c.ode,
            )
            .map_err(|err| {
                with_context(err, &format!("sweep point k = {k}, alpha = {alpha:e}"))
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// bundled studies

/// Run a bundled study; returns the preset's resolved config together with
/// the table so the caller can honor its output settings.
pub fn study_table(target: StudyTarget) -> Result<(RunConfig, ResultTable)> {
    let cfg = parse_config(target.preset_text())
        .map_err(|e| with_context(e, &format!("preset {}", target.name())))?;
    let mut table = match target {
        StudyTarget::Sec4 => sec4_summary(&cfg)?,
        StudyTarget::Fig5 => family_sweep(&cfg, true)?,
        StudyTarget::Fig7 => family_sweep(&cfg, false)?,
        StudyTarget::Fig6 => metrics_vs_alpha(&cfg)?,
    };
    stamp(&mut table, &cfg, &format!("reproduce {}", target.name()));
    Ok((cfg, table))
}

/// Work/efficiency versus k for the standard cycle (optional), the ideal
/// slab-driven cycle, and the finite-time family. Family code: 0 =
/// standard, 1 = slab-driven.
fn family_sweep(cfg: &RunConfig, include_standard: bool) -> Result<ResultTable> {
    let e = &cfg.emitter;
    let c = &cfg.cycle;
    let mut cols = vec![("family", "1")];
    cols.extend(cycle_columns());
    let mut table = ResultTable::new(&cols)?;

    if include_standard {
        let t1 = cfg.environment.slab.temperature;
        let t2 = cfg.environment.blackbody_temperature;
        let rows = parallel_sweep(&c.ks, |k| si_qoc(e.omega_a, k * e.omega_a, t1, t2));
        push_sweep_rows(&mut table, rows, Some(0.0))?;
    }

    let hot = hot_bath(cfg)?;
    let colds = cold_cache(cfg)?;
    for (&k, &cold) in c.ks.iter().zip(&colds) {
        let p = ideal_cycle(e.omega_a, k * e.omega_a, hot, cold)
            .map_err(|err| with_context(err, &format!("ideal point k = {k}")))?;
        let mut cells = cycle_row(&p);
        cells.insert(0, 1.0);
        table.push_row(cells)?;
    }

    if !c.alphas.is_empty() {
        let ramp = ramp_rates(cfg)?;
        table.set_meta("rate_table_rel_error", &format!("{:e}", ramp.rel_error()));
        for p in &finite_family(cfg, hot, &colds, &ramp)? {
            let mut cells = cycle_row(p);
            cells.insert(0, 1.0);
            table.push_row(cells)?;
        }
    }
    Ok(table)
}

fn metrics_row(family: f64, alpha: f64, m: &PerformanceMetrics) -> Vec<f64> {
    vec![
        family,
        alpha,
        m.max_work,
        m.k_at_max_work,
        m.eta_at_max_work,
        m.max_efficiency,
        m.k_at_max_efficiency,
        m.work_at_max_efficiency,
    ]
}

/// Sweep metrics versus the stroke speed: one row per alpha, preceded by
/// the standard-cycle and ideal-stroke reference rows.
fn metrics_vs_alpha(cfg: &RunConfig) -> Result<ResultTable> {
    let e = &cfg.emitter;
    let c = &cfg.cycle;
    let t1 = cfg.environment.slab.temperature;
    let t2 = cfg.environment.blackbody_temperature;
    let mut table = ResultTable::new(&[
        ("family", "1"),
        ("alpha", "1/s"),
        ("max_work", "J"),
        ("k_at_max_work", "1"),
        ("eta_at_max_work", "1"),
        ("max_efficiency", "1"),
        ("k_at_max_efficiency", "1"),
        ("work_at_max_efficiency", "J"),
    ])?;

    let std_points: Vec<CyclePoint> = c
        .ks
        .iter()
        .map(|&k| si_qoc(e.omega_a, k * e.omega_a, t1, t2))
        .collect::<Result<_>>()?;
    let m_std = performance_metrics(&std_points, |k| si_qoc(e.omega_a, k * e.omega_a, t1, t2))?;
    table.push_row(metrics_row(0.0, f64::INFINITY, &m_std))?;

    let hot = hot_bath(cfg)?;
    let colds = cold_cache(cfg)?;
    let ideal_points: Vec<CyclePoint> = c
        .ks
        .iter()
        .zip(&colds)
        .map(|(&k, &cold)| ideal_cycle(e.omega_a, k * e.omega_a, hot, cold))
        .collect::<Result<_>>()?;
    let m_ideal = performance_metrics(&ideal_points, |k| {
        ideal_cycle(e.omega_a, k * e.omega_a, hot, cold_bath(cfg, k)?)
    })?;
    table.push_row(metrics_row(1.0, f64::INFINITY, &m_ideal))?;

    let ramp = ramp_rates(cfg)?;
    table.set_meta("rate_table_rel_error", &format!("{:e}", ramp.rel_error()));
    let per_alpha: Vec<PerformanceMetrics> = c
        .alphas
        .par_iter()
        .map(|&alpha| -> Result<PerformanceMetrics> {
            let points: Vec<CyclePoint> = c
                .ks
                .iter()
                .zip(colds.iter())
                .map(|(&k, &cold)| {
                    finite_cycle(
                        e.omega_a,
                        k * e.omega_a,
                        alpha,
                        hot,
                        cold,
                        |w| ramp.at(w),
                        &c.ode,
                    )
                })
                .collect::<Result<_>>()?;
            performance_metrics(&points, |k| {
                let cold = cold_bath(cfg, k)?;
                finite_cycle(
                    e.omega_a,
                    k * e.omega_a,
                    alpha,
                    hot,
                    cold,
                    |w| ramp.at(w),
                    &c.ode,
                )
            })
            .map_err(|err| with_context(err, &format!("metrics at alpha = {alpha:e}")))
        })
        .collect::<Result<_>>()?;
    for (&alpha, m) in c.alphas.iter().zip(&per_alpha) {
        table.push_row(metrics_row(1.0, alpha, m))?;
    }
    Ok(table)
}

/// Headline numbers of the reference configuration: apparent working-fluid
/// temperature, the cold-bath temperature at half the gap, and the maximum
/// extracted work of the standard and slab-driven ideal cycles.
fn sec4_summary(cfg: &RunConfig) -> Result<ResultTable> {
    let e = &cfg.emitter;
    let t1 = cfg.environment.slab.temperature;
    let t2 = cfg.environment.blackbody_temperature;

    let hot = hot_bath(cfg)?;
    let cold_half = cold_bath(cfg, 0.5)?;
    let p_hot = hot.excited_population(e.omega_a);

    let std_points: Vec<CyclePoint> = cfg
        .cycle
        .ks
        .iter()
        .map(|&k| si_qoc(e.omega_a, k * e.omega_a, t1, t2))
        .collect::<Result<_>>()?;
    let m_std = performance_metrics(&std_points, |k| si_qoc(e.omega_a, k * e.omega_a, t1, t2))?;

    let colds = cold_cache(cfg)?;
    let ideal_points: Vec<CyclePoint> = cfg
        .cycle
        .ks
        .iter()
        .zip(&colds)
        .map(|(&k, &cold)| ideal_cycle(e.omega_a, k * e.omega_a, hot, cold))
        .collect::<Result<_>>()?;
    let m_ote = performance_metrics(&ideal_points, |k| {
        ideal_cycle(e.omega_a, k * e.omega_a, hot, cold_bath(cfg, k)?)
    })?;

    let mut table = ResultTable::new(&[
        ("theta_wf", "K"),
        ("t_env_half", "K"),
        ("max_work_standard", "J"),
        ("k_at_max_work_standard", "1"),
        ("max_work_ote", "J"),
        ("k_at_max_work_ote", "1"),
        ("work_ratio", "1"),
        ("carnot_efficiency", "1"),
        ("small_k_work_limit", "J"),
    ])?;
    table.push_row(vec![
        hot.kelvin(),
        cold_half.kelvin(),
        m_std.max_work,
        m_std.k_at_max_work,
        m_ote.max_work,
        m_ote.k_at_max_work,
        m_ote.max_work / m_std.max_work,
        1.0 - t2 / t1,
        HBAR * e.omega_a * (p_hot - 0.5),
    ])?;
    Ok(table)
}
