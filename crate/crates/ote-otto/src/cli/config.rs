//! Run configuration: TOML schema, defaults, validation, digest.
//!
//! A run file has four tables — `[environment]`, `[emitter]`, `[cycle]`,
//! `[output]` — of which only `[environment]` (material + the two
//! temperatures) is mandatory. Everything else falls back to the reference
//! configuration of the bundled presets; every value that was defaulted is
//! recorded so the output metadata can echo it. Unknown keys anywhere are
//! rejected with the offending key and line. All quantities are SI:
//! lengths in m, temperatures in K, frequencies in rad/s, dipole moments in
//! C m.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::em_env::{OteEnvironment, PermittivityModel, QuadratureConfig, SlabGeometry};
use crate::error::{Error, Result};
use crate::lindblad::{DipoleOrientation, EmitterConfig};
use crate::ode::OdeOptions;

/// Which cycle family a run evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleMode {
    /// Infinite-speed standard Otto cycle between the two real temperatures.
    Standard,
    /// Ideal-stroke cycle driven by the slab field: hot isochore at the
    /// apparent working-fluid temperature, cold isochore at `T_env(omega_b)`.
    OteIdeal,
    /// Same baths, finite-duration frequency ramps (set `alpha`).
    OteFinite,
}

impl CycleMode {
    pub fn name(self) -> &'static str {
        match self {
            CycleMode::Standard => "standard",
            CycleMode::OteIdeal => "ote_ideal",
            CycleMode::OteFinite => "ote_finite",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

// ---------------------------------------------------------------------------
// raw (serde) layer

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    environment: RawEnvironment,
    emitter: Option<RawEmitter>,
    cycle: Option<RawCycle>,
    output: Option<RawOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnvironment {
    /// Material preset name; mutually exclusive with `drude_lorentz`.
    material: Option<String>,
    drude_lorentz: Option<RawDrudeLorentz>,
    thickness: Option<f64>,
    slab_temperature: f64,
    blackbody_temperature: f64,
    quadrature: Option<RawQuadrature>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrudeLorentz {
    eps_inf: f64,
    omega_longitudinal: f64,
    omega_transverse: f64,
    damping: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    rel_tolerance: Option<f64>,
    max_subdivisions: Option<usize>,
    evanescent_cutoff: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEmitter {
    omega_a: Option<f64>,
    omega_upper: Option<f64>,
    z: Option<f64>,
    separation: Option<f64>,
    dipole_moment: Option<f64>,
    orientation: Option<DipoleOrientation>,
    lambda_override: Option<f64>,
    collective_dissipation: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCycle {
    mode: Option<CycleMode>,
    k: Option<f64>,
    k_grid: Option<RawGrid>,
    alpha: Option<f64>,
    alpha_grid: Option<RawGrid>,
    rel_tolerance: Option<f64>,
    abs_tolerance: Option<f64>,
    rate_table_points: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    start: f64,
    stop: f64,
    points: usize,
    spacing: Option<GridSpacing>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum GridSpacing {
    Linear,
    Log,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<String>,
    format: Option<OutputFormat>,
    precision: Option<usize>,
}

// ---------------------------------------------------------------------------
// resolved layer

/// Cycle block after defaulting and validation.
#[derive(Clone, Debug)]
pub struct CycleSettings {
    pub mode: CycleMode,
    /// Compression ratios to evaluate (ascending for grids).
    pub ks: Vec<f64>,
    /// True when the run file gave a single `k` rather than a grid.
    pub k_is_single: bool,
    /// Stroke-speed values [1/s]; empty for the ideal-stroke modes.
    pub alphas: Vec<f64>,
    pub alpha_is_single: bool,
    /// Stroke integrator controls.
    pub ode: OdeOptions,
    /// Node count of the interpolated rate table used inside ramps.
    pub rate_table_points: usize,
}

#[derive(Clone, Debug)]
pub struct OutputSettings {
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
    /// Significant digits for CSV cells (JSON always round-trips exactly).
    pub precision: usize,
}

/// A fully resolved run: physics inputs, cycle plan, output plan, plus the
/// digest of the file it came from and the defaults that were filled in.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub environment: OteEnvironment,
    pub emitter: EmitterConfig,
    pub cycle: CycleSettings,
    pub output: OutputSettings,
    /// SHA-256 of the raw config text, hex encoded.
    pub digest: String,
    /// `(dotted.key, value)` for every field that fell back to its default.
    pub defaults_applied: Vec<(String, String)>,
}

// Reference values shared with the bundled presets.
const DEFAULT_THICKNESS: f64 = 1e-6;
const DEFAULT_OMEGA_A: f64 = 1.495e13;
const DEFAULT_OMEGA_UPPER: f64 = 1.495e14;
const DEFAULT_Z: f64 = 26e-6;
const DEFAULT_SEPARATION: f64 = 1e-6;
const DEFAULT_DIPOLE_MOMENT: f64 = 1e-29;
const DEFAULT_K_POINTS: usize = 200;
const DEFAULT_K_START: f64 = 0.005;
const DEFAULT_REL_TOL: f64 = 1e-10;
const DEFAULT_ABS_TOL: f64 = 1e-13;
const DEFAULT_RATE_TABLE_POINTS: usize = 96;
const DEFAULT_PRECISION: usize = 17;

/// SiC optical-phonon response (Drude-Lorentz single resonance).
fn sic() -> PermittivityModel {
    PermittivityModel::DrudeLorentz {
        eps_inf: 6.7,
        omega_l: 1.827e14,
        omega_t: 1.495e14,
        gamma: 0.9e12,
    }
}

/// Parse and resolve a run file. The error message for malformed input
/// carries the line and key reported by the TOML parser.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text)
        .map_err(|e| Error::config(format!("run config: {}", e.message_with_span())))?;
    let mut defaults: Vec<(String, String)> = Vec::new();

    let environment = resolve_environment(raw.environment, &mut defaults)?;
    let emitter = resolve_emitter(raw.emitter, &mut defaults)?;
    let cycle = resolve_cycle(raw.cycle, &mut defaults)?;
    let output = resolve_output(raw.output, &mut defaults)?;

    environment.validate()?;
    emitter.validate()?;

    let digest = hex::encode(Sha256::digest(text.as_bytes()));
    Ok(RunConfig {
        environment,
        emitter,
        cycle,
        output,
        digest,
        defaults_applied: defaults,
    })
}

/// Read and parse a run file from disk.
pub fn load_config(path: &std::path::Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}: {e}", path.display())))?;
    parse_config(&text)
}

trait SpannedMessage {
    fn message_with_span(&self) -> String;
}

impl SpannedMessage for toml::de::Error {
    fn message_with_span(&self) -> String {
        // toml's Display already prints "TOML parse error at line L, column C"
        // plus the offending key; flatten the multi-line rendering.
        self.to_string()
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

fn note_default(defaults: &mut Vec<(String, String)>, key: &str, value: String) {
    defaults.push((key.to_string(), value));
}

macro_rules! or_default {
    ($defaults:expr, $key:literal, $opt:expr, $value:expr, $fmt:literal) => {
        match $opt {
            Some(v) => v,
            None => {
                let v = $value;
                note_default($defaults, $key, format!($fmt, v));
                v
            }
        }
    };
}

fn resolve_environment(
    raw: RawEnvironment,
    defaults: &mut Vec<(String, String)>,
) -> Result<OteEnvironment> {
    let material = match (raw.material.as_deref(), raw.drude_lorentz) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "environment.material and environment.drude_lorentz are mutually exclusive",
            ));
        }
        (None, None) => {
            return Err(Error::config(
                "environment needs either a material preset or an explicit drude_lorentz model",
            ));
        }
        (Some("sic"), None) => sic(),
        (Some("vacuum"), None) => PermittivityModel::Vacuum,
        (Some(other), None) => {
            return Err(Error::config(format!(
                "unknown material preset '{other}' (available: sic, vacuum)"
            )));
        }
        (None, Some(dl)) => PermittivityModel::DrudeLorentz {
            eps_inf: dl.eps_inf,
            omega_l: dl.omega_longitudinal,
            omega_t: dl.omega_transverse,
            gamma: dl.damping,
        },
    };

    let thickness = or_default!(
        defaults,
        "environment.thickness",
        raw.thickness,
        DEFAULT_THICKNESS,
        "{:e}"
    );
    if !(thickness > 0.0) {
        // keep the invariant in the message: a slab must have positive depth
        return Err(Error::config(format!(
            "environment.thickness must be positive (slab thickness delta > 0), got {thickness:e}"
        )));
    }

    let qd = QuadratureConfig::default();
    let quadrature = match raw.quadrature {
        None => {
            note_default(
                defaults,
                "environment.quadrature",
                format!(
                    "rel_tolerance={:e} max_subdivisions={} evanescent_cutoff={}",
                    qd.rel_tolerance, qd.max_subdivisions, qd.evanescent_cutoff
                ),
            );
            qd
        }
        Some(q) => QuadratureConfig {
            rel_tolerance: or_default!(
                defaults,
                "environment.quadrature.rel_tolerance",
                q.rel_tolerance,
                qd.rel_tolerance,
                "{:e}"
            ),
            max_subdivisions: or_default!(
                defaults,
                "environment.quadrature.max_subdivisions",
                q.max_subdivisions,
                qd.max_subdivisions,
                "{}"
            ),
            evanescent_cutoff: or_default!(
                defaults,
                "environment.quadrature.evanescent_cutoff",
                q.evanescent_cutoff,
                qd.evanescent_cutoff,
                "{}"
            ),
        },
    };

    // NOTE: T2 > T1 is deliberately accepted — a slab colder than its
    // surroundings is a legitimate (inverted) driving configuration.
    Ok(OteEnvironment {
        material,
        slab: SlabGeometry {
            thickness,
            temperature: raw.slab_temperature,
        },
        blackbody_temperature: raw.blackbody_temperature,
        quadrature,
    })
}

fn resolve_emitter(
    raw: Option<RawEmitter>,
    defaults: &mut Vec<(String, String)>,
) -> Result<EmitterConfig> {
    let raw = raw.unwrap_or(RawEmitter {
        omega_a: None,
        omega_upper: None,
        z: None,
        separation: None,
        dipole_moment: None,
        orientation: None,
        lambda_override: None,
        collective_dissipation: None,
    });
    let orientation = match raw.orientation {
        Some(o) => o,
        None => {
            note_default(defaults, "emitter.orientation", "parallel".into());
            DipoleOrientation::Parallel
        }
    };
    Ok(EmitterConfig {
        omega_a: or_default!(defaults, "emitter.omega_a", raw.omega_a, DEFAULT_OMEGA_A, "{:e}"),
        omega_upper: or_default!(
            defaults,
            "emitter.omega_upper",
            raw.omega_upper,
            DEFAULT_OMEGA_UPPER,
            "{:e}"
        ),
        z: or_default!(defaults, "emitter.z", raw.z, DEFAULT_Z, "{:e}"),
        separation: or_default!(
            defaults,
            "emitter.separation",
            raw.separation,
            DEFAULT_SEPARATION,
            "{:e}"
        ),
        dipole_moment: or_default!(
            defaults,
            "emitter.dipole_moment",
            raw.dipole_moment,
            DEFAULT_DIPOLE_MOMENT,
            "{:e}"
        ),
        orientation,
        lambda_override: raw.lambda_override,
        collective_dissipation: or_default!(
            defaults,
            "emitter.collective_dissipation",
            raw.collective_dissipation,
            true,
            "{}"
        ),
    })
}

fn build_grid(grid: &RawGrid, key: &str, default_spacing: GridSpacing) -> Result<Vec<f64>> {
    let spacing = grid.spacing.unwrap_or(default_spacing);
    let values = match spacing {
        GridSpacing::Linear => crate::cycle::linear_grid(grid.start, grid.stop, grid.points),
        GridSpacing::Log => crate::cycle::log_grid(grid.start, grid.stop, grid.points),
    };
    values.map_err(|e| Error::config(format!("{key}: {e}")))
}

fn resolve_cycle(
    raw: Option<RawCycle>,
    defaults: &mut Vec<(String, String)>,
) -> Result<CycleSettings> {
    let raw = raw.unwrap_or(RawCycle {
        mode: None,
        k: None,
        k_grid: None,
        alpha: None,
        alpha_grid: None,
        rel_tolerance: None,
        abs_tolerance: None,
        rate_table_points: None,
    });
    let mode = match raw.mode {
        Some(m) => m,
        None => {
            note_default(defaults, "cycle.mode", CycleMode::OteIdeal.name().into());
            CycleMode::OteIdeal
        }
    };

    let (ks, k_is_single) = match (raw.k, &raw.k_grid) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "cycle.k and cycle.k_grid are mutually exclusive",
            ));
        }
        (Some(k), None) => (vec![k], true),
        (None, Some(g)) => (build_grid(g, "cycle.k_grid", GridSpacing::Linear)?, false),
        (None, None) => {
            note_default(
                defaults,
                "cycle.k_grid",
                format!("start={DEFAULT_K_START} stop=1 points={DEFAULT_K_POINTS}"),
            );
            (
                crate::cycle::linear_grid(DEFAULT_K_START, 1.0, DEFAULT_K_POINTS)?,
                false,
            )
        }
    };
    let k_floor_excluded = mode == CycleMode::OteFinite;
    for &k in &ks {
        let ok = k.is_finite() && k <= 1.0 && (k > 0.0 || (!k_floor_excluded && k == 0.0));
        if !ok {
            return Err(Error::config(format!(
                "cycle ratio k must lie in {} (omega_b cannot exceed omega_a), got {k}",
                if k_floor_excluded { "(0, 1]" } else { "[0, 1]" }
            )));
        }
    }

    let (alphas, alpha_is_single) = match (raw.alpha, &raw.alpha_grid) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "cycle.alpha and cycle.alpha_grid are mutually exclusive",
            ));
        }
        (Some(a), None) => (vec![a], true),
        (None, Some(g)) => (build_grid(g, "cycle.alpha_grid", GridSpacing::Log)?, false),
        (None, None) => (Vec::new(), false),
    };
    for &a in &alphas {
        if !(a > 0.0) || a.is_nan() {
            return Err(Error::config(format!(
                "cycle.alpha must be positive (inf selects ideal strokes), got {a}"
            )));
        }
    }
    match mode {
        CycleMode::OteFinite => {
            if alphas.is_empty() {
                return Err(Error::config(
                    "mode 'ote_finite' needs cycle.alpha or cycle.alpha_grid",
                ));
            }
        }
        _ => {
            if alphas.iter().any(|a| a.is_finite()) {
                return Err(Error::config(format!(
                    "cycle.alpha applies to mode 'ote_finite' only (mode '{}' has ideal strokes)",
                    mode.name()
                )));
            }
        }
    }

    let rel_tol = or_default!(
        defaults,
        "cycle.rel_tolerance",
        raw.rel_tolerance,
        DEFAULT_REL_TOL,
        "{:e}"
    );
    let abs_tol = or_default!(
        defaults,
        "cycle.abs_tolerance",
        raw.abs_tolerance,
        DEFAULT_ABS_TOL,
        "{:e}"
    );
    if !(rel_tol > 0.0 && rel_tol <= 1e-2) || !(abs_tol > 0.0 && abs_tol <= 1e-3) {
        return Err(Error::config(format!(
            "stroke integrator tolerances out of range: rel {rel_tol:e} (need (0, 1e-2]), abs {abs_tol:e} (need (0, 1e-3])"
        )));
    }
    let rate_table_points = or_default!(
        defaults,
        "cycle.rate_table_points",
        raw.rate_table_points,
        DEFAULT_RATE_TABLE_POINTS,
        "{}"
    );
    if !(8..=4096).contains(&rate_table_points) {
        return Err(Error::config(format!(
            "cycle.rate_table_points must lie in [8, 4096], got {rate_table_points}"
        )));
    }

    Ok(CycleSettings {
        mode,
        ks,
        k_is_single,
        alphas,
        alpha_is_single,
        ode: OdeOptions {
            rel_tol,
            abs_tol,
            ..OdeOptions::default()
        },
        rate_table_points,
    })
}

fn resolve_output(
    raw: Option<RawOutput>,
    defaults: &mut Vec<(String, String)>,
) -> Result<OutputSettings> {
    let raw = raw.unwrap_or(RawOutput {
        path: None,
        format: None,
        precision: None,
    });
    let format = match raw.format {
        Some(f) => f,
        None => {
            note_default(defaults, "output.format", "csv".into());
            OutputFormat::Csv
        }
    };
    let precision = or_default!(
        defaults,
        "output.precision",
        raw.precision,
        DEFAULT_PRECISION,
        "{}"
    );
    if !(3..=17).contains(&precision) {
        return Err(Error::config(format!(
            "output.precision must lie in [3, 17] significant digits, got {precision}"
        )));
    }
    Ok(OutputSettings {
        path: raw.path.map(PathBuf::from),
        format,
        precision,
    })
}

/// Defaults echo as ordered `key -> value` pairs (for output metadata).
pub fn defaults_as_map(cfg: &RunConfig) -> BTreeMap<String, String> {
    cfg.defaults_applied
        .iter()
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}
