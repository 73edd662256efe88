//! Otto-cycle evaluation for a two-level working fluid.
//!
//! The ideal (sudden-stroke) cycle is closed form; the finite-time variant
//! integrates the dissipative stroke equations with a linear frequency ramp.
//! Both report their results as a [`CyclePoint`], and k-sweeps are distilled
//! into [`PerformanceMetrics`] (work at maximum efficiency, efficiency at
//! maximum work).

mod finite;
mod ideal;
mod pchip;
mod sweep;

pub use finite::{finite_cycle, finite_stage, BlackbodyRates, RateTable, StageResult};
pub use ideal::{ideal_cycle, si_qoc};
pub use pchip::Pchip;
pub use sweep::{linear_grid, log_grid, parallel_sweep, SweepRow};

use serde::Serialize;

use crate::error::{Error, Result};

/// One evaluated Otto cycle at a fixed frequency ratio `k = omega_b/omega_a`.
///
/// Sign conventions: `work_extracted` is the net work delivered to the
/// external world (positive when the cycle operates as an engine),
/// `heat_absorbed` collects the positive stroke heats entering the fluid and
/// `heat_released` the remainder, so that
/// `work_extracted ≈ heat_absorbed + heat_released` up to `first_law_defect`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CyclePoint {
    /// Frequency ratio omega_b / omega_a.
    pub k: f64,
    /// Lower stroke frequency [rad/s].
    pub omega_b: f64,
    /// Adiabatic parameter [1/s]; infinite for ideal strokes.
    pub alpha: f64,
    /// Temperature of the hot isochore endpoint [K] (signed; negative when
    /// the effective bath is population inverted).
    pub hot_temperature: f64,
    /// Temperature of the cold isochore endpoint [K].
    pub cold_temperature: f64,
    /// Net work extracted over the cycle [J].
    pub work_extracted: f64,
    /// Heat absorbed by the fluid [J].
    pub heat_absorbed: f64,
    /// Heat returned to the baths [J] (non-positive in engine operation).
    pub heat_released: f64,
    /// Work-extraction efficiency; `None` when undefined (finite-time cycle
    /// with no positive work output).
    pub efficiency: Option<f64>,
    /// Whether the positive-work condition holds (hot population gap at
    /// `omega_a` at least as large as the cold one at `omega_b`).
    pub pwc_satisfied: bool,
    /// Residual of the per-cycle energy balance [J].
    pub first_law_defect: f64,
}

/// Summary statistics of a k-sweep at fixed adiabatic parameter.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PerformanceMetrics {
    /// Largest extracted work found on the (refined) sweep [J].
    pub max_work: f64,
    pub k_at_max_work: f64,
    /// Efficiency at the maximum-work point.
    pub eta_at_max_work: f64,
    /// Largest efficiency on the closure of the positive-work set.
    pub max_efficiency: f64,
    pub k_at_max_efficiency: f64,
    /// Extracted work at the maximum-efficiency point [J]; exactly zero when
    /// the efficiency maximum sits on the zero-work boundary.
    pub work_at_max_efficiency: f64,
}

/// Vertex of the parabola through three points, clamped to `[x0, x2]`.
/// Returns `None` when the data is not strictly concave around the middle.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Option<f64> {
    let f01 = (y[1] - y[0]) / (x[1] - x[0]);
    let f12 = (y[2] - y[1]) / (x[2] - x[1]);
    let curvature = (f12 - f01) / (x[2] - x[0]);
    if !(curvature < 0.0) {
        return None;
    }
    let vertex = 0.5 * (x[0] + x[1]) - f01 / (2.0 * curvature);
    Some(vertex.clamp(x[0], x[2]))
}

/// Quadratic Lagrange interpolant through three points.
fn parabola_value(x: [f64; 3], y: [f64; 3], at: f64) -> f64 {
    let l0 = (at - x[1]) * (at - x[2]) / ((x[0] - x[1]) * (x[0] - x[2]));
    let l1 = (at - x[0]) * (at - x[2]) / ((x[1] - x[0]) * (x[1] - x[2]));
    let l2 = (at - x[0]) * (at - x[1]) / ((x[2] - x[0]) * (x[2] - x[1]));
    y[0] * l0 + y[1] * l1 + y[2] * l2
}

fn efficiency_of(p: &CyclePoint) -> Result<f64> {
    p.efficiency.ok_or_else(|| {
        Error::numerics(format!(
            "efficiency undefined at k = {} despite positive work",
            p.k
        ))
    })
}

/// Distills a k-sweep (fixed alpha) into its work/efficiency extrema.
///
/// `eval` re-evaluates the cycle at an arbitrary `k`; it is used to refine
/// the efficiency maximum down to the zero-work boundary when the sweep shows
/// the positive-work set ending between two grid points (the standard-cycle
/// case, where the best efficiency is reached exactly where extracted work
/// vanishes). Interior maxima are refined by a three-point parabola instead,
/// which keeps the grid bias quadratically small.
pub fn performance_metrics<F>(points: &[CyclePoint], mut eval: F) -> Result<PerformanceMetrics>
where
    F: FnMut(f64) -> Result<CyclePoint>,
{
    let mut pts: Vec<CyclePoint> = points.to_vec();
    pts.sort_by(|a, b| a.k.partial_cmp(&b.k).expect("non-finite k in sweep"));
    if pts.windows(2).any(|w| w[0].k == w[1].k) {
        return Err(Error::config("duplicate k values in sweep"));
    }
    if !pts.iter().any(|p| p.work_extracted > 0.0) {
        return Err(Error::numerics(
            "no positive-work point in sweep; performance metrics undefined",
        ));
    }
    let n = pts.len();

    // --- maximum work, parabola-refined when the bracket allows it ---
    let m = (0..n)
        .max_by(|&a, &b| {
            pts[a]
                .work_extracted
                .partial_cmp(&pts[b].work_extracted)
                .expect("non-finite work in sweep")
        })
        .expect("non-empty sweep");
    let mut max_work = pts[m].work_extracted;
    let mut k_at_max_work = pts[m].k;
    let mut eta_at_max_work = efficiency_of(&pts[m])?;
    if m > 0 && m + 1 < n && pts[m - 1].work_extracted > 0.0 && pts[m + 1].work_extracted > 0.0 {
        let xs = [pts[m - 1].k, pts[m].k, pts[m + 1].k];
        let ws = [
            pts[m - 1].work_extracted,
            pts[m].work_extracted,
            pts[m + 1].work_extracted,
        ];
        if let Some(kv) = parabola_vertex(xs, ws) {
            max_work = parabola_value(xs, ws, kv).max(pts[m].work_extracted);
            k_at_max_work = kv;
            let etas = [
                efficiency_of(&pts[m - 1])?,
                efficiency_of(&pts[m])?,
                efficiency_of(&pts[m + 1])?,
            ];
            eta_at_max_work = parabola_value(xs, etas, kv);
        }
    }

    // --- maximum efficiency over the positive-work set ---
    let j = (0..n)
        .filter(|&i| pts[i].work_extracted > 0.0)
        .max_by(|&a, &b| {
            let ea = pts[a].efficiency.unwrap_or(f64::NEG_INFINITY);
            let eb = pts[b].efficiency.unwrap_or(f64::NEG_INFINITY);
            ea.partial_cmp(&eb).expect("non-finite efficiency in sweep")
        })
        .expect("positive-work set checked non-empty");

    let (max_efficiency, k_at_max_efficiency, work_at_max_efficiency);
    if j > 0 && pts[j - 1].work_extracted <= 0.0 {
        // The efficiency maximum rides the edge of the positive-work set:
        // bisect for the zero-work crossing and report the boundary values.
        let mut lo = pts[j - 1].k;
        let mut hi = pts[j].k;
        let mut at_hi = pts[j];
        for _ in 0..200 {
            if hi - lo <= 1e-13 * hi.abs() {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let p = eval(mid)?;
            if p.work_extracted > 0.0 {
                hi = mid;
                at_hi = p;
            } else {
                lo = mid;
            }
        }
        max_efficiency = efficiency_of(&at_hi)?;
        k_at_max_efficiency = at_hi.k;
        work_at_max_efficiency = 0.0;
    } else if j > 0
        && j + 1 < n
        && pts[j - 1].work_extracted > 0.0
        && pts[j + 1].work_extracted > 0.0
    {
        let xs = [pts[j - 1].k, pts[j].k, pts[j + 1].k];
        let es = [
            efficiency_of(&pts[j - 1])?,
            efficiency_of(&pts[j])?,
            efficiency_of(&pts[j + 1])?,
        ];
        if let Some(kv) = parabola_vertex(xs, es) {
            let ws = [
                pts[j - 1].work_extracted,
                pts[j].work_extracted,
                pts[j + 1].work_extracted,
            ];
            max_efficiency = parabola_value(xs, es, kv).max(es[1]);
            k_at_max_efficiency = kv;
            work_at_max_efficiency = parabola_value(xs, ws, kv);
        } else {
            max_efficiency = es[1];
            k_at_max_efficiency = pts[j].k;
            work_at_max_efficiency = pts[j].work_extracted;
        }
    } else {
        // boundary maximum (e.g. ideal OTE sweeps, where eta = 1 - k peaks
        // at the smallest k while work stays positive)
        max_efficiency = efficiency_of(&pts[j])?;
        k_at_max_efficiency = pts[j].k;
        work_at_max_efficiency = pts[j].work_extracted;
    }

    Ok(PerformanceMetrics {
        max_work,
        k_at_max_work,
        eta_at_max_work,
        max_efficiency,
        k_at_max_efficiency,
        work_at_max_efficiency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn si_qoc_metrics_hit_the_carnot_boundary() {
        let omega_a = 1.495e13;
        let (t1, t2) = (700.0, 200.0);
        let grid = linear_grid(0.005, 1.0, 200).unwrap();
        let pts: Vec<CyclePoint> = grid
            .iter()
            .map(|&k| si_qoc(omega_a, k * omega_a, t1, t2).unwrap())
            .collect();
        let m = performance_metrics(&pts, |k| si_qoc(omega_a, k * omega_a, t1, t2)).unwrap();
        // frozen against a 50-digit evaluation of the closed form
        assert_relative_eq!(m.max_work, 2.8184e-23, max_relative = 1e-3);
        assert_relative_eq!(m.k_at_max_work, 0.6402, max_relative = 2e-3);
        assert_relative_eq!(m.eta_at_max_work, 1.0 - m.k_at_max_work, max_relative = 1e-9);
        // the efficiency maximum is the Carnot point on the zero-work boundary
        assert_abs_diff_eq!(m.work_at_max_efficiency, 0.0);
        assert_relative_eq!(m.max_efficiency, 1.0 - t2 / t1, max_relative = 1e-11);
        assert_relative_eq!(m.k_at_max_efficiency, t2 / t1, max_relative = 1e-11);
    }

    #[test]
    fn inverted_hot_bath_peaks_efficiency_at_the_low_k_boundary() {
        use crate::em_env::EffectiveTemperature;
        let omega_a = 1.495e13;
        let hot = EffectiveTemperature::from_kelvin(-537.0);
        let cold = EffectiveTemperature::from_kelvin(250.0);
        let grid = linear_grid(0.01, 1.0, 100).unwrap();
        let pts: Vec<CyclePoint> = grid
            .iter()
            .map(|&k| ideal_cycle(omega_a, k * omega_a, hot, cold).unwrap())
            .collect();
        let m = performance_metrics(&pts, |k| ideal_cycle(omega_a, k * omega_a, hot, cold))
            .unwrap();
        // every point does positive work, so the best efficiency is at the
        // smallest grid k and the work there stays strictly positive
        assert_relative_eq!(m.max_efficiency, 1.0 - 0.01, max_relative = 1e-12);
        assert!(m.work_at_max_efficiency > 0.0);
        assert!(m.max_work > m.work_at_max_efficiency);
        assert!(m.k_at_max_work > 0.01 && m.k_at_max_work < 1.0);
    }

    #[test]
    fn parabolic_refinement_recovers_an_off_grid_vertex() {
        // synthetic sweep with a known quadratic work curve
        let exact_k = 0.47;
        let work = |k: f64| 5e-23 * (1.0 - (k - exact_k).powi(2) / 0.25);
        let point = |k: f64| CyclePoint {
            k,
            omega_b: k * 1e13,
            alpha: f64::INFINITY,
            hot_temperature: 700.0,
            cold_temperature: 200.0,
            work_extracted: work(k),
            heat_absorbed: 1e-22,
            heat_released: work(k) - 1e-22,
            efficiency: Some(1.0 - k),
            pwc_satisfied: true,
            first_law_defect: 0.0,
        };
        let pts: Vec<CyclePoint> = [0.2, 0.35, 0.5, 0.65, 0.8].iter().map(|&k| point(k)).collect();
        let m = performance_metrics(&pts, |k| Ok(point(k))).unwrap();
        assert_relative_eq!(m.k_at_max_work, exact_k, max_relative = 1e-12);
        assert_relative_eq!(m.max_work, work(exact_k), max_relative = 1e-12);
        assert_relative_eq!(m.eta_at_max_work, 1.0 - exact_k, max_relative = 1e-12);
    }

    #[test]
    fn all_negative_sweep_is_rejected() {
        let point = |k: f64| CyclePoint {
            k,
            omega_b: k * 1e13,
            alpha: f64::INFINITY,
            hot_temperature: 300.0,
            cold_temperature: 400.0,
            work_extracted: -1e-24,
            heat_absorbed: 0.0,
            heat_released: -1e-24,
            efficiency: Some(1.0 - k),
            pwc_satisfied: false,
            first_law_defect: 0.0,
        };
        let pts: Vec<CyclePoint> = [0.3, 0.6, 0.9].iter().map(|&k| point(k)).collect();
        assert!(performance_metrics(&pts, |k| Ok(point(k))).is_err());
    }

    #[test]
    fn duplicate_grid_points_are_rejected() {
        let p = si_qoc(1e13, 0.5e13, 700.0, 200.0).unwrap();
        assert!(performance_metrics(&[p, p], |_| Ok(p)).is_err());
    }
}
