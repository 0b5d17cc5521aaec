//! Gridded g² surfaces and the named figure domains.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::analytic::{self, Tolerances};
use crate::error::{JanusError, Result};
use crate::optimize::{self, evaluate_grid, Axis, GridSpec, Param, Point, Reason};

/// Which closed form fills the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formula {
    /// g² from the general moments, any parameters.
    General,
    /// Cosine form for `r = s`.
    Equal,
    /// Optimal-phase form, `r = s` and `Δ = δ = π` held fixed.
    Optimal,
    /// Boundary curve over a single `r` axis.
    Boundary,
}

impl Formula {
    pub fn as_str(self) -> &'static str {
        match self {
            Formula::General => "general",
            Formula::Equal => "equal",
            Formula::Optimal => "optimal",
            Formula::Boundary => "boundary",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [Formula::General, Formula::Equal, Formula::Optimal, Formula::Boundary]
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| JanusError::InvalidParameter(format!("unknown formula {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMeta {
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub engine_version: String,
    pub tolerances: Tolerances,
}

impl ScanMeta {
    pub fn now(tolerances: Tolerances) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            timestamp,
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            tolerances,
        }
    }
}

/// Row-major g² values over a [`GridSpec`], first axis slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub spec: GridSpec,
    pub formula: Formula,
    pub values: Vec<Option<f64>>,
    pub reasons: Vec<Option<Reason>>,
    pub meta: ScanMeta,
}

impl ScanResult {
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        let n = self.spec.len();
        if self.values.len() != n || self.reasons.len() != n {
            return Err(JanusError::InvalidParameter(format!(
                "scan holds {} values and {} reasons for {} grid points",
                self.values.len(),
                self.reasons.len(),
                n
            )));
        }
        Ok(())
    }

    /// Smallest value and its flattened index; ties go to the lowest index.
    pub fn min(&self) -> Option<(usize, f64)> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
            .fold(None, |best, (i, v)| match best {
                Some((_, b)) if b <= v => best,
                _ => Some((i, v)),
            })
    }

    pub fn feasible(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }
}

fn fixed_or_axis(spec: &GridSpec, p: Param) -> Option<f64> {
    (!spec.has_axis(p)).then(|| spec.fixed.get(p))
}

fn check_formula(spec: &GridSpec, formula: Formula) -> Result<()> {
    let equal = spec.equal_squeeze
        || (!spec.has_axis(Param::R) && !spec.has_axis(Param::S) && spec.fixed.r == spec.fixed.s);
    let mismatch = |msg: &str| Err(JanusError::FormulaMismatch(format!("{}: {msg}", formula.as_str())));
    match formula {
        Formula::General => Ok(()),
        Formula::Equal if !equal => mismatch("requires r = s"),
        Formula::Equal => Ok(()),
        Formula::Optimal => {
            if !equal {
                return mismatch("requires r = s");
            }
            for p in [Param::Orientation, Param::Phase] {
                if fixed_or_axis(spec, p) != Some(PI) {
                    return mismatch(&format!("requires {p} fixed at pi"));
                }
            }
            Ok(())
        }
        Formula::Boundary => {
            if spec.axes.len() != 1 || spec.axes[0].name != Param::R {
                return mismatch("requires a single r axis");
            }
            Ok(())
        }
    }
}

fn evaluate(p: &Point, formula: Formula, tol: &Tolerances) -> Result<f64> {
    match formula {
        Formula::General => analytic::g2_general_tol(&p.params()?, tol),
        Formula::Equal => {
            let params = p.params()?;
            analytic::g2_equal_squeeze_tol(
                p.r,
                params.orientation(),
                params.delta(),
                params.chi_mag(),
                params.eta_mag(),
                tol,
            )
        }
        Formula::Optimal => {
            let chi = optimize::optimal_chi(p.r, p.eta)?;
            analytic::g2_optimal_tol(p.r, chi, p.eta, tol)
        }
        Formula::Boundary => optimize::boundary_value(p.r),
    }
}

pub fn run_scan(spec: &GridSpec, formula: Formula) -> Result<ScanResult> {
    run_scan_tol(spec, formula, &Tolerances::default())
}

pub fn run_scan_tol(spec: &GridSpec, formula: Formula, tol: &Tolerances) -> Result<ScanResult> {
    spec.validate()?;
    check_formula(spec, formula)?;
    let raw = evaluate_grid(spec, |p| evaluate(p, formula, tol));
    let (values, reasons) = raw
        .into_iter()
        .map(|v| match v {
            Ok(g) if g.is_finite() => (Some(g), None),
            Ok(_) => (None, Some(Reason::Invalid)),
            Err(r) => (None, Some(r)),
        })
        .unzip();
    Ok(ScanResult {
        spec: spec.clone(),
        formula,
        values,
        reasons,
        meta: ScanMeta::now(*tol),
    })
}

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 10] = ["1", "2a", "2b", "3a", "3b", "3c", "3d", "4", "5", "5c"];

/// Points per axis in every preset.
pub const PRESET_POINTS: usize = 256;

/// Grid and formula behind a named figure domain.
///
/// * `1`: boundary curve, `r ∈ (0, 2]`.
/// * `2a`, `2b`: `(Δ, |η|)` at `δ = π` for `(r, s) = (0.7, 0.3)`, `(0.6, 0.4)`.
/// * `3a`–`3d`: `(Δ, |η|)` at `δ = π`, `r = s ∈ {0.3, 0.4, 0.5, 0.6}`.
/// * `4`: `(r, |η|)` at `Δ = π`, `δ = 0`.
/// * `5`: `(r, |η|)` at `Δ = δ = π`.
/// * `5c`: `(r, |η|)` at `Δ = δ = π/2`.
pub fn preset(name: &str) -> Result<(GridSpec, Formula)> {
    let n = PRESET_POINTS;
    let r_axis = |hi: f64| Axis::new(Param::R, hi / n as f64, hi, n);
    let eta_axis = Axis::new(Param::Eta, 0.0, 3.0, n)?;
    let orient_axis = Axis::new(Param::Orientation, 0.0, TAU, n)?;
    let phase_map = |r: f64, s: f64| {
        GridSpec::new(
            vec![orient_axis, eta_axis],
            Point {
                r,
                s,
                orientation: 0.0,
                delta: PI,
                eta: 0.0,
            },
            r == s,
        )
    };
    let amp_map = |orientation: f64, delta: f64| {
        GridSpec::new(
            vec![r_axis(1.0)?, eta_axis],
            Point {
                r: 0.0,
                s: 0.0,
                orientation,
                delta,
                eta: 0.0,
            },
            true,
        )
    };
    let spec = match name {
        "1" => {
            return Ok((
                GridSpec::new(vec![r_axis(2.0)?], Point::optimal_phases(0.0, 0.0), true)?,
                Formula::Boundary,
            ))
        }
        "2a" => phase_map(0.7, 0.3)?,
        "2b" => phase_map(0.6, 0.4)?,
        "3a" => phase_map(0.3, 0.3)?,
        "3b" => phase_map(0.4, 0.4)?,
        "3c" => phase_map(0.5, 0.5)?,
        "3d" => phase_map(0.6, 0.6)?,
        "4" => amp_map(PI, 0.0)?,
        "5" => amp_map(PI, PI)?,
        "5c" => amp_map(FRAC_PI_2, FRAC_PI_2)?,
        _ => {
            return Err(JanusError::InvalidParameter(format!(
                "unknown figure preset {name:?} (expected one of {})",
                PRESETS.join(", ")
            )))
        }
    };
    Ok((spec, Formula::General))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(equal: bool) -> GridSpec {
        GridSpec::new(
            vec![
                Axis::new(Param::Orientation, 0.0, TAU, 3).unwrap(),
                Axis::new(Param::Eta, 0.0, 3.0, 4).unwrap(),
            ],
            Point::optimal_phases(0.3, 0.0),
            equal,
        )
        .unwrap()
    }

    #[test]
    fn every_preset_builds() {
        for name in PRESETS {
            let (spec, formula) = preset(name).unwrap();
            check_formula(&spec, formula).unwrap();
            assert!(spec.axes.iter().all(|a| a.points == PRESET_POINTS));
        }
        assert!(preset("6").is_err());
    }

    #[test]
    fn shapes_and_reasons() {
        let res = run_scan(&small(true), Formula::General).unwrap();
        res.validate().unwrap();
        assert_eq!(res.values.len(), 12);
        for (v, r) in res.values.iter().zip(&res.reasons) {
            assert_eq!(v.is_some(), r.is_none());
        }
        // |η| = 3 at Δ = π exceeds the largest feasible amplitude
        assert_eq!(res.reasons[7], Some(Reason::Infeasible));
    }

    #[test]
    fn formulas_agree_where_they_overlap() {
        let spec = small(true);
        let g = run_scan(&spec, Formula::General).unwrap();
        let e = run_scan(&spec, Formula::Equal).unwrap();
        for (a, b) in g.values.iter().zip(&e.values) {
            match (a, b) {
                (Some(a), Some(b)) => assert!((a - b).abs() < 1e-10 * a.max(1.0)),
                (None, None) => {}
                _ => panic!("feasibility differs: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn formula_mismatch() {
        assert!(matches!(
            run_scan(&small(true), Formula::Optimal),
            Err(JanusError::FormulaMismatch(_))
        ));
        let mut spec = small(false);
        spec.fixed.s = 0.4;
        assert!(matches!(
            run_scan(&spec, Formula::Equal),
            Err(JanusError::FormulaMismatch(_))
        ));
        assert!(matches!(
            run_scan(&spec, Formula::Boundary),
            Err(JanusError::FormulaMismatch(_))
        ));
    }

    #[test]
    fn min_prefers_lowest_index() {
        let mut res = run_scan(&small(true), Formula::General).unwrap();
        res.values = vec![None, Some(2.0), Some(1.0), Some(1.0)];
        res.reasons = vec![Some(Reason::Vacuum), None, None, None];
        assert_eq!(res.min(), Some((2, 1.0)));
    }
}
