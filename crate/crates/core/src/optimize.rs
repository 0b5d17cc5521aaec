//! Constrained minimization of g² over the superposition parameters.
//!
//! Parameters are laid out as `ξ = r e^{iΔ}`, `ζ = s`, so the relative
//! orientation equals the phase of the first state. `|χ|` is never a free
//! variable: it is recovered from the normalization constraint at every
//! evaluation.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, g2_optimal_at_l, k_factor, one_minus_k};
use crate::error::{JanusError, Result};
use crate::params::{JanusParams, SqueezeParam};

/// Default simplex-diameter tolerance for [`refine_local`].
pub const DEFAULT_REFINE_TOL: f64 = 1e-6;
/// Objective-call budget for [`refine_local`].
pub const MAX_EVALUATIONS: usize = 100_000;
/// `|η|` of the fixed-amplitude slice through the sweet spot.
pub const SWEET_SPOT_ETA: f64 = 2.20070;

/// Published `(r, g²)` rows at `Δ = δ = π`, `|η| = 2.20070`.
pub const TABLE_S1: [(f64, f64); 8] = [
    (0.26, 0.58418),
    (0.28, 0.57467),
    (0.30, 0.56942),
    (0.32, 0.56770),
    (0.34, 0.56740),
    (0.36, 0.56930),
    (0.38, 0.57245),
    (0.40, 0.57723),
];

/// A scannable coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Param {
    #[serde(rename = "r")]
    R,
    #[serde(rename = "s")]
    S,
    /// Relative orientation `Δ = θ − φ`.
    #[serde(rename = "Delta")]
    Orientation,
    /// Superposition phase `δ`.
    #[serde(rename = "delta")]
    Phase,
    /// `|η|`
    #[serde(rename = "eta")]
    Eta,
}

impl Param {
    pub const ALL: [Param; 5] = [Param::R, Param::S, Param::Orientation, Param::Phase, Param::Eta];

    pub fn as_str(self) -> &'static str {
        match self {
            Param::R => "r",
            Param::S => "s",
            Param::Orientation => "Delta",
            Param::Phase => "delta",
            Param::Eta => "eta",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.as_str() == name)
            .ok_or_else(|| JanusError::InvalidParameter(format!("unknown axis name {name:?}")))
    }

    /// Initial simplex step along this coordinate.
    fn step(self) -> f64 {
        match self {
            Param::R | Param::S => 0.02,
            Param::Orientation | Param::Phase => 0.1,
            Param::Eta => 0.05,
        }
    }
}

impl std::fmt::Display for Param {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A full coordinate tuple `(r, s, Δ, δ, |η|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub r: f64,
    pub s: f64,
    #[serde(rename = "Delta")]
    pub orientation: f64,
    pub delta: f64,
    pub eta: f64,
}

impl Point {
    /// `r = s`, `Δ = δ = π`.
    pub fn optimal_phases(r: f64, eta: f64) -> Self {
        Self {
            r,
            s: r,
            orientation: PI,
            delta: PI,
            eta,
        }
    }

    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::R => self.r,
            Param::S => self.s,
            Param::Orientation => self.orientation,
            Param::Phase => self.delta,
            Param::Eta => self.eta,
        }
    }

    pub fn set(&mut self, p: Param, v: f64) {
        match p {
            Param::R => self.r = v,
            Param::S => self.s = v,
            Param::Orientation => self.orientation = v,
            Param::Phase => self.delta = v,
            Param::Eta => self.eta = v,
        }
    }

    /// The normalized state at this point, `|χ|` from the larger root.
    pub fn params(&self) -> Result<JanusParams> {
        let xi = SqueezeParam::new(self.r, self.orientation)?;
        let zeta = SqueezeParam::new(self.s, 0.0)?;
        JanusParams::normalized(xi, zeta, self.eta, self.delta)
    }

    pub fn g2(&self) -> Result<f64> {
        analytic::g2_general(&self.params()?)
    }
}

/// One discretized coordinate, `points` values spaced evenly over `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: Param,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(name: Param, lo: f64, hi: f64, points: usize) -> Result<Self> {
        let a = Self { name, lo, hi, points };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(JanusError::InvalidParameter(format!(
                "axis {} needs at least 2 points, got {}",
                self.name, self.points
            )));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(JanusError::InvalidParameter(format!(
                "axis {} needs finite lo < hi, got [{}, {}]",
                self.name, self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            return self.hi;
        }
        self.lo + (self.hi - self.lo) * i as f64 / (self.points - 1) as f64
    }
}

/// Grid over a subset of the coordinates, with the rest held fixed.
///
/// With `equal_squeeze` set, `s` always follows `r` and may not be an axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
    pub fixed: Point,
    pub equal_squeeze: bool,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>, fixed: Point, equal_squeeze: bool) -> Result<Self> {
        let g = Self {
            axes,
            fixed,
            equal_squeeze,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(JanusError::InvalidParameter("grid has no axes".into()));
        }
        for (i, a) in self.axes.iter().enumerate() {
            a.validate()?;
            if self.axes[..i].iter().any(|b| b.name == a.name) {
                return Err(JanusError::InvalidParameter(format!("axis {} repeated", a.name)));
            }
        }
        if self.equal_squeeze && self.has_axis(Param::S) {
            return Err(JanusError::InvalidParameter(
                "s cannot be an axis when s follows r".into(),
            ));
        }
        for p in Param::ALL {
            if !self.has_axis(p) && !self.fixed.get(p).is_finite() {
                return Err(JanusError::InvalidParameter(format!("fixed {p} is not finite")));
            }
        }
        Ok(())
    }

    pub fn has_axis(&self, p: Param) -> bool {
        self.axes.iter().any(|a| a.name == p)
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.points).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-axis indices of a row-major flattened index (first axis slowest).
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            idx[k] = flat % a.points;
            flat /= a.points;
        }
        idx
    }

    pub fn coords(&self, flat: usize) -> Vec<f64> {
        self.unflatten(flat)
            .into_iter()
            .zip(&self.axes)
            .map(|(i, a)| a.value(i))
            .collect()
    }

    pub fn point_at(&self, flat: usize) -> Point {
        let mut p = self.fixed;
        for (a, v) in self.axes.iter().zip(self.coords(flat)) {
            p.set(a.name, v);
        }
        if self.equal_squeeze {
            p.s = p.r;
        }
        p
    }
}

/// Why a grid point carries no g² value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reason {
    /// No `|χ| ≥ 0` satisfies the normalization constraint.
    Infeasible,
    /// Mean photon number at or below the vacuum floor.
    Vacuum,
    /// `1 − z` at the branch point.
    Singular,
    /// Parameters outside their domain.
    Invalid,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::Infeasible => "infeasible",
            Reason::Vacuum => "vacuum",
            Reason::Singular => "singular",
            Reason::Invalid => "invalid",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Reason::Infeasible, Reason::Vacuum, Reason::Singular, Reason::Invalid]
            .into_iter()
            .find(|r| r.as_str() == s)
    }
}

impl From<&JanusError> for Reason {
    fn from(e: &JanusError) -> Self {
        match e {
            JanusError::InfeasibleAmplitude { .. } | JanusError::Unnormalized { .. } => {
                Reason::Infeasible
            }
            JanusError::VacuumDominated(_) => Reason::Vacuum,
            JanusError::SingularOverlap(_) => Reason::Singular,
            _ => Reason::Invalid,
        }
    }
}

/// Evaluate `f` at every grid point in parallel; output is in row-major order.
pub fn evaluate_grid<F>(spec: &GridSpec, f: F) -> Vec<std::result::Result<f64, Reason>>
where
    F: Fn(&Point) -> Result<f64> + Sync,
{
    (0..spec.len())
        .into_par_iter()
        .map(|i| f(&spec.point_at(i)).map_err(|e| Reason::from(&e)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimumKind {
    Grid,
    Refined,
    Boundary,
    /// A single evaluation at prescribed parameters.
    Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimumRecord {
    pub r: f64,
    pub s: f64,
    #[serde(rename = "Delta")]
    pub orientation: f64,
    pub delta: f64,
    pub eta_mag: f64,
    pub chi_mag: f64,
    pub g2: f64,
    pub kind: OptimumKind,
    pub evaluations: usize,
    /// Grid points skipped as infeasible.
    pub skipped: usize,
    /// False when the evaluation budget ran out first.
    pub converged: bool,
}

impl OptimumRecord {
    pub fn point(&self) -> Point {
        Point {
            r: self.r,
            s: self.s,
            orientation: self.orientation,
            delta: self.delta,
            eta: self.eta_mag,
        }
    }

    fn at(p: &Point, kind: OptimumKind, evaluations: usize) -> Result<Self> {
        let params = p.params()?;
        Ok(Self {
            r: p.r,
            s: p.s,
            orientation: params.orientation(),
            delta: params.delta(),
            eta_mag: p.eta,
            chi_mag: params.chi_mag(),
            g2: analytic::g2_general(&params)?,
            kind,
            evaluations,
            skipped: 0,
            converged: true,
        })
    }
}

/// Smallest finite g² over the grid. Ties go to the lowest flattened index.
pub fn grid_min(spec: &GridSpec) -> Result<OptimumRecord> {
    spec.validate()?;
    let values = evaluate_grid(spec, Point::g2);
    let mut best: Option<(usize, f64)> = None;
    let mut skipped = 0;
    for (i, v) in values.iter().enumerate() {
        match v {
            Ok(g) if g.is_finite() => {
                if best.is_none_or(|(_, b)| *g < b) {
                    best = Some((i, *g));
                }
            }
            _ => skipped += 1,
        }
    }
    let (i, _) = best.ok_or(JanusError::EmptyFeasibleSet(skipped))?;
    let mut rec = OptimumRecord::at(&spec.point_at(i), OptimumKind::Grid, values.len())?;
    rec.skipped = skipped;
    Ok(rec)
}

/// `|χ| = |η| = (2(1 − K))^{−1/2}`, the equal-amplitude pair on the boundary.
pub fn boundary_amplitude(r: f64) -> f64 {
    (2.0 * one_minus_k(r)).sqrt().recip()
}

/// Boundary g² at `r`, substituting `L = K/(1 − K)` into the optimal-phase
/// formula.
pub fn boundary_value(r: f64) -> Result<f64> {
    if !r.is_finite() || r <= 0.0 {
        return Err(JanusError::InvalidParameter(format!(
            "boundary needs finite r > 0, got {r}"
        )));
    }
    let k = k_factor(r);
    let a = boundary_amplitude(r);
    let residual = 2.0 * a * a * (1.0 - k) - 1.0;
    if residual.abs() > 1e-10 * a * a.max(1.0) {
        return Err(JanusError::FormulaMismatch(format!(
            "boundary amplitudes violate the constraint at r = {r} (residual {residual:e})"
        )));
    }
    Ok(g2_optimal_at_l(r, k / one_minus_k(r)))
}

pub fn boundary_curve(r_values: &[f64]) -> Result<Vec<(f64, f64)>> {
    r_values.iter().map(|&r| Ok((r, boundary_value(r)?))).collect()
}

pub fn boundary_record(r: f64) -> Result<OptimumRecord> {
    let g2 = boundary_value(r)?;
    let a = boundary_amplitude(r);
    Ok(OptimumRecord {
        r,
        s: r,
        orientation: PI,
        delta: PI,
        eta_mag: a,
        chi_mag: a,
        g2,
        kind: OptimumKind::Boundary,
        evaluations: 1,
        skipped: 0,
        converged: true,
    })
}

/// `|χ|` from `|χ|² + |η|² − 2K|χ||η| = 1`, larger root.
pub fn optimal_chi(r: f64, eta: f64) -> Result<f64> {
    let k = k_factor(r);
    let disc = (k * eta).powi(2) - eta * eta + 1.0;
    if disc < 0.0 {
        return Err(JanusError::InfeasibleAmplitude {
            eta,
            discriminant: disc,
        });
    }
    Ok(k * eta + disc.sqrt())
}

/// Evaluate the optimal-phase formula along fixed `|η|` at each `r`.
pub fn table_s1(r_values: &[f64], eta_fixed: f64) -> Vec<Result<OptimumRecord>> {
    r_values
        .iter()
        .map(|&r| {
            let chi = optimal_chi(r, eta_fixed)?;
            Ok(OptimumRecord {
                r,
                s: r,
                orientation: PI,
                delta: PI,
                eta_mag: eta_fixed,
                chi_mag: chi,
                g2: analytic::g2_optimal(r, chi, eta_fixed)?,
                kind: OptimumKind::Point,
                evaluations: 1,
                skipped: 0,
                converged: true,
            })
        })
        .collect()
}

struct Simplex {
    x: Vec<f64>,
    evaluations: usize,
    converged: bool,
}

/// Nelder–Mead with coefficients 1, 2, 0.5, 0.5. Stops when every vertex lies
/// within `tol` of the best one. Non-finite objective values count as `+∞`.
fn nelder_mead<F>(f: F, x0: &[f64], steps: &[f64], tol: f64, max_evals: usize) -> Simplex
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += steps[i];
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p)).collect();
    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(a, b)| a + t * (b - a)).collect()
    };

    loop {
        // stable sort keeps the earlier vertex first on ties
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let diameter = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter < tol {
            return Simplex {
                x: pts.swap_remove(0),
                evaluations: evals.get(),
                converged: true,
            };
        }
        if evals.get() >= max_evals {
            return Simplex {
                x: pts.swap_remove(0),
                evaluations: evals.get(),
                converged: false,
            };
        }

        let mut centroid = vec![0.0; n];
        for p in &pts[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let worst = pts[n].clone();
        let xr = lerp(&centroid, &worst, -1.0);
        let fr = eval(&xr);
        if fr < vals[0] {
            let xe = lerp(&centroid, &worst, -2.0);
            let fe = eval(&xe);
            if fe < fr {
                (pts[n], vals[n]) = (xe, fe);
            } else {
                (pts[n], vals[n]) = (xr, fr);
            }
            continue;
        }
        if fr < vals[n - 1] {
            (pts[n], vals[n]) = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let xc = lerp(&centroid, &xr, 0.5);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = lerp(&centroid, &worst, 0.5);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < vals[n].min(fr) {
            (pts[n], vals[n]) = (xc, fc);
            continue;
        }
        for i in 1..=n {
            pts[i] = lerp(&pts[0], &pts[i], 0.5);
            vals[i] = eval(&pts[i]);
        }
    }
}

/// Simplex descent from `seed` over `free` coordinates, with `|χ|` re-solved
/// at every step.
///
/// If the seed has `r = s` and `s` is not free, `s` tracks `r`. A seed of
/// kind [`OptimumKind::Boundary`] is refined along the boundary family, which
/// only has `r` as a coordinate.
pub fn refine_local(seed: &OptimumRecord, free: &[Param], tol: f64) -> Result<OptimumRecord> {
    refine_local_with(seed, free, tol, MAX_EVALUATIONS)
}

pub fn refine_local_with(
    seed: &OptimumRecord,
    free: &[Param],
    tol: f64,
    max_evals: usize,
) -> Result<OptimumRecord> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(JanusError::InvalidParameter(format!("tolerance must be > 0, got {tol}")));
    }
    let mut axes: Vec<Param> = Vec::new();
    for &p in free {
        if !axes.contains(&p) {
            axes.push(p);
        }
    }
    if axes.is_empty() {
        return Err(JanusError::InvalidParameter("no free axes to refine".into()));
    }

    if seed.kind == OptimumKind::Boundary {
        if axes != [Param::R] {
            return Err(JanusError::InvalidParameter(
                "a boundary seed can only be refined along r".into(),
            ));
        }
        boundary_value(seed.r)?;
        let res = nelder_mead(
            |x| boundary_value(x[0]).unwrap_or(f64::INFINITY),
            &[seed.r],
            &[Param::R.step()],
            tol,
            max_evals,
        );
        let mut rec = boundary_record(res.x[0])?;
        rec.evaluations = res.evaluations;
        rec.converged = res.converged;
        return Ok(rec);
    }

    let base = seed.point();
    let tie_s = base.r == base.s && !axes.contains(&Param::S);
    let place = |x: &[f64]| {
        let mut p = base;
        for (&a, &v) in axes.iter().zip(x) {
            p.set(a, v);
        }
        if tie_s {
            p.s = p.r;
        }
        p
    };
    base.g2()?;
    let x0: Vec<f64> = axes.iter().map(|&a| base.get(a)).collect();
    let steps: Vec<f64> = axes.iter().map(|&a| a.step()).collect();
    let res = nelder_mead(
        |x| place(x).g2().unwrap_or(f64::INFINITY),
        &x0,
        &steps,
        tol,
        max_evals,
    );
    let mut rec = OptimumRecord::at(&place(&res.x), OptimumKind::Refined, res.evaluations)?;
    rec.converged = res.converged;
    Ok(rec)
}

/// Grid and refined minima of the practical sweet-spot search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweetSpot {
    /// Grid minimum over `(r, |η|)` at `Δ = δ = π`.
    pub grid: OptimumRecord,
    /// Simplex refinement of `grid` over `(r, |η|)`.
    pub refined: OptimumRecord,
    /// Minimum over `r` alone at `|η| = 2.20070`.
    pub slice: OptimumRecord,
}

pub fn sweet_spot(tol: f64) -> Result<SweetSpot> {
    let (spec, _) = crate::scan::preset("5")?;
    let grid = grid_min(&spec)?;
    let refined = refine_local(&grid, &[Param::R, Param::Eta], tol)?;

    let slice_spec = GridSpec::new(
        vec![Axis::new(Param::R, 1.0 / 256.0, 1.0, 256)?],
        Point::optimal_phases(0.0, SWEET_SPOT_ETA),
        true,
    )?;
    let slice_seed = grid_min(&slice_spec)?;
    let slice = refine_local(&slice_seed, &[Param::R], tol)?;
    Ok(SweetSpot {
        grid,
        refined,
        slice,
    })
}
