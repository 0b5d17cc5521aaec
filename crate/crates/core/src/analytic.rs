//! Closed-form overlaps, cross moments and second-order coherence.
//!
//! All fractional powers of complex arguments are taken on the principal
//! branch, `w^a = exp(a · Log w)` with the cut along `(−∞, 0]`. Since
//! `|z| < 1`, the argument `1 − z` always lies in the open right half-plane.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{JanusError, Result};
use crate::params::{JanusParams, PhaseGeometry, ReducedVars, SqueezeParam};

/// `|1 − z|` below this is treated as the branch point.
pub const SINGULAR_GUARD: f64 = 1e-14;
/// Mean photon numbers at or below this make g² undefined.
pub const VACUUM_FLOOR: f64 = 1e-12;
/// `|r − s|` at or below this counts as equal squeezing.
pub const EQUAL_SQUEEZE_EPS: f64 = 1e-14;

/// Numerical tolerances shared by the engine and the oracle comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Maximum `|norm_residual|` accepted as "normalized".
    pub norm: f64,
    /// Maximum analytic-vs-oracle g² deviation.
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm: 1e-10,
            oracle: 1e-8,
        }
    }
}

/// Which root of the normalization quadratic to take for `|χ|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootChoice {
    #[default]
    Larger,
    Smaller,
}

/// Principal-branch `w^a`.
pub fn principal_pow(w: C64, a: f64) -> C64 {
    (w.ln() * a).exp()
}

/// `(1 − x)^{1/4} = (cosh r)^{−1/2}`, evaluated through `cosh` so that it
/// stays accurate when `tanh² r` is close to one.
fn quarter_root(p: &SqueezeParam) -> f64 {
    p.r().cosh().sqrt().recip()
}

fn z_of(xi: &SqueezeParam, zeta: &SqueezeParam) -> C64 {
    xi.alpha() * zeta.alpha().conj()
}

fn one_minus_z(z: C64) -> Result<C64> {
    let w = C64::new(1.0, 0.0) - z;
    if w.norm() < SINGULAR_GUARD {
        return Err(JanusError::SingularOverlap(w.norm()));
    }
    Ok(w)
}

pub fn reduced_vars(p: &JanusParams) -> ReducedVars {
    let (r, s) = (p.xi.r(), p.zeta.r());
    let orientation = p.orientation();
    let z = C64::from_polar(r.tanh() * s.tanh(), orientation);
    let (k, l) = if (r - s).abs() <= EQUAL_SQUEEZE_EPS {
        let k = (1.0 + 2.0 * p.xi.sinh2()).sqrt().recip();
        (Some(k), Some(2.0 * k * p.chi_mag() * p.eta_mag()))
    } else {
        (None, None)
    };
    ReducedVars {
        x: p.xi.x(),
        y: p.zeta.x(),
        z,
        orientation,
        k,
        l,
    }
}

/// `⟨ζ|ξ⟩ = (1−x)^{1/4} (1−y)^{1/4} (1−z)^{−1/2}`
pub fn overlap(xi: &SqueezeParam, zeta: &SqueezeParam) -> Result<C64> {
    let w = one_minus_z(z_of(xi, zeta))?;
    Ok(principal_pow(w, -0.5) * (quarter_root(xi) * quarter_root(zeta)))
}

/// `⟨ζ|a†a|ξ⟩ = (1−x)^{1/4} (1−y)^{1/4} z (1−z)^{−3/2}`
pub fn cross_n(xi: &SqueezeParam, zeta: &SqueezeParam) -> Result<C64> {
    let z = z_of(xi, zeta);
    let w = one_minus_z(z)?;
    Ok(z * principal_pow(w, -1.5) * (quarter_root(xi) * quarter_root(zeta)))
}

/// `⟨ζ|a†²a²|ξ⟩ = (1−x)^{1/4} (1−y)^{1/4} z (2z+1) (1−z)^{−5/2}`
pub fn cross_n2(xi: &SqueezeParam, zeta: &SqueezeParam) -> Result<C64> {
    let z = z_of(xi, zeta);
    let w = one_minus_z(z)?;
    Ok(z * (2.0 * z + 1.0)
        * principal_pow(w, -2.5)
        * (quarter_root(xi) * quarter_root(zeta)))
}

/// `⟨ψ|ψ⟩ − 1`.
pub fn norm_residual(p: &JanusParams) -> Result<f64> {
    let ov = overlap(&p.xi, &p.zeta)?;
    let (c, e) = (p.chi_mag(), p.eta_mag());
    Ok(c * c + e * e + 2.0 * (p.chi_eta_conj() * ov).re - 1.0)
}

/// Recover `|χ|` from the normalization constraint for a given `|η|`.
pub fn solve_chi(eta_mag: f64, xi: &SqueezeParam, zeta: &SqueezeParam, delta: f64) -> Result<f64> {
    solve_chi_with(eta_mag, xi, zeta, delta, RootChoice::Larger)
}

/// Solves `|χ|² + 2b|χ| + (|η|² − 1) = 0` with
/// `b = |η| Re[e^{−iδ} ⟨ζ|ξ⟩]`.
///
/// For `b < 0` and `|η| > 1` both roots may be nonnegative; `root` picks
/// which one is returned.
pub fn solve_chi_with(
    eta_mag: f64,
    xi: &SqueezeParam,
    zeta: &SqueezeParam,
    delta: f64,
    root: RootChoice,
) -> Result<f64> {
    if !eta_mag.is_finite() || eta_mag < 0.0 {
        return Err(JanusError::InvalidParameter(format!(
            "|eta| must be finite and >= 0, got {eta_mag}"
        )));
    }
    let ov = overlap(xi, zeta)?;
    let b = eta_mag * (C64::from_polar(1.0, -delta) * ov).re;
    let disc = b * b - eta_mag * eta_mag + 1.0;
    if disc < 0.0 {
        return Err(JanusError::InfeasibleAmplitude {
            eta: eta_mag,
            discriminant: disc,
        });
    }
    let sq = disc.sqrt();
    let chi = match root {
        RootChoice::Larger => -b + sq,
        RootChoice::Smaller => -b - sq,
    };
    if chi < 0.0 {
        return Err(JanusError::InfeasibleAmplitude {
            eta: eta_mag,
            discriminant: disc,
        });
    }
    Ok(chi)
}

/// Norm, `⟨a†a⟩` and `⟨a†²a²⟩` of the superposition, straight from the
/// closed-form building blocks and without dividing by the norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticMoments {
    pub norm2: f64,
    /// `𝒟 = ‖a|ψ⟩‖²`
    pub mean: f64,
    /// `𝒩 = ‖a²|ψ⟩‖²`
    pub pair: f64,
}

pub fn analytic_moments(p: &JanusParams) -> Result<AnalyticMoments> {
    let (c2, e2) = (p.chi_mag().powi(2), p.eta_mag().powi(2));
    let ce = p.chi_eta_conj();
    let (u, v) = (p.xi.sinh2(), p.zeta.sinh2());
    // x/(1−x) = sinh² r and x(2x+1)/(1−x)² = sinh² r (3 sinh² r + 1)
    let mean = c2 * u + e2 * v + 2.0 * (ce * cross_n(&p.xi, &p.zeta)?).re;
    let pair = c2 * u * (3.0 * u + 1.0)
        + e2 * v * (3.0 * v + 1.0)
        + 2.0 * (ce * cross_n2(&p.xi, &p.zeta)?).re;
    let norm2 = norm_residual(p)? + 1.0;
    Ok(AnalyticMoments { norm2, mean, pair })
}

/// General g² = 𝒩 / 𝒟² of a normalized superposition.
pub fn g2_general(p: &JanusParams) -> Result<f64> {
    g2_general_tol(p, &Tolerances::default())
}

pub fn g2_general_tol(p: &JanusParams, tol: &Tolerances) -> Result<f64> {
    let residual = norm_residual(p)?;
    if residual.abs() > tol.norm {
        return Err(JanusError::Unnormalized {
            residual,
            tol: tol.norm,
        });
    }
    let m = analytic_moments(p)?;
    if m.mean <= VACUUM_FLOOR {
        return Err(JanusError::VacuumDominated(m.mean));
    }
    Ok(m.pair / (m.mean * m.mean))
}

/// Modulus `f(r,Δ)` and phase `γ` of `cosh² r − sinh² r e^{iΔ}`.
pub fn phase_geometry(r: f64, orientation: f64) -> Result<PhaseGeometry> {
    if !r.is_finite() || r < 0.0 {
        return Err(JanusError::InvalidParameter(format!(
            "squeezing magnitude must be finite and >= 0, got {r}"
        )));
    }
    let s = r.sinh().powi(2);
    let c = r.cosh().powi(2);
    let (sin_d, cos_d) = orientation.sin_cos();
    let f = c * c - 2.0 * s * c * cos_d + s * s;
    // real part c − s cosΔ ≥ 1 > 0, so γ ∈ (−π/2, π/2)
    let gamma = -(s * sin_d).atan2(c - s * cos_d);
    Ok(PhaseGeometry { f, gamma })
}

/// Equal-squeezing g² written through `f(r,Δ)`, `γ` and cosines of the
/// superposition phase.
pub fn g2_equal_squeeze(r: f64, orientation: f64, delta: f64, chi_mag: f64, eta_mag: f64) -> Result<f64> {
    g2_equal_squeeze_tol(r, orientation, delta, chi_mag, eta_mag, &Tolerances::default())
}

pub fn g2_equal_squeeze_tol(
    r: f64,
    orientation: f64,
    delta: f64,
    chi_mag: f64,
    eta_mag: f64,
    tol: &Tolerances,
) -> Result<f64> {
    let PhaseGeometry { f, gamma } = phase_geometry(r, orientation)?;
    let ce = chi_mag * eta_mag;
    let common = 1.0 - 2.0 * f.powf(-0.25) * ce * (delta + 0.5 * gamma).cos();

    let residual = chi_mag * chi_mag + eta_mag * eta_mag
        + 2.0 * f.powf(-0.25) * ce * (delta + 0.5 * gamma).cos()
        - 1.0;
    if residual.abs() > tol.norm {
        return Err(JanusError::Unnormalized {
            residual,
            tol: tol.norm,
        });
    }

    let x = r.tanh().powi(2);
    let u = r.sinh().powi(2);
    let d = orientation;
    let denom = common + 2.0 * f.powf(-0.75) * ce * (d - 1.5 * gamma - delta).cos();
    if u * denom <= VACUUM_FLOOR {
        return Err(JanusError::VacuumDominated(u * denom));
    }
    let numer = common
        + 2.0 * f.powf(-1.25) * ce / (2.0 * x + 1.0)
            * (2.0 * x * (2.0 * d - 2.5 * gamma - delta).cos()
                + (d - 2.5 * gamma - delta).cos());
    Ok((3.0 + 1.0 / u) * numer / (denom * denom))
}

/// `K = (1 + 2 sinh² r)^{−1/2}`
pub fn k_factor(r: f64) -> f64 {
    (1.0 + 2.0 * r.sinh().powi(2)).sqrt().recip()
}

/// `1 − K`, without cancellation at small `r`.
pub fn one_minus_k(r: f64) -> f64 {
    let u = r.sinh().powi(2);
    let q = (1.0 + 2.0 * u).sqrt();
    2.0 * u / (q * (q + 1.0))
}

/// g² at `r = s`, `Δ = δ = π` as a function of `L = 2K|χ||η|`.
pub fn g2_optimal_at_l(r: f64, l: f64) -> f64 {
    let u = r.sinh().powi(2);
    let t = r.tanh().powi(2);
    let k2 = 1.0 / (1.0 + 2.0 * u);
    let numer = 1.0 + l + l * k2 * k2 * (1.0 - 2.0 * t) / (1.0 + 2.0 * t);
    let denom = 1.0 + l + l * k2;
    (3.0 + 1.0 / u) * numer / (denom * denom)
}

/// g² for equal squeezing at the optimal phases `Δ = δ = π`, subject to
/// `|χ|² + |η|² − 2K|χ||η| = 1`.
pub fn g2_optimal(r: f64, chi_mag: f64, eta_mag: f64) -> Result<f64> {
    g2_optimal_tol(r, chi_mag, eta_mag, &Tolerances::default())
}

pub fn g2_optimal_tol(r: f64, chi_mag: f64, eta_mag: f64, tol: &Tolerances) -> Result<f64> {
    if !r.is_finite() || r <= 0.0 {
        return Err(JanusError::VacuumDominated(0.0));
    }
    let k = k_factor(r);
    let l = 2.0 * k * chi_mag * eta_mag;
    let residual = chi_mag * chi_mag + eta_mag * eta_mag - l - 1.0;
    if residual.abs() > tol.norm {
        return Err(JanusError::Unnormalized {
            residual,
            tol: tol.norm,
        });
    }
    let mean = r.sinh().powi(2) * (1.0 + l + l * k * k);
    if mean <= VACUUM_FLOOR {
        return Err(JanusError::VacuumDominated(mean));
    }
    Ok(g2_optimal_at_l(r, l))
}

const BOUNDARY_NUM: [f64; 6] = [2.0, 11.0, 28.0, 51.0, 40.0, 12.0];
const BOUNDARY_DEN: [f64; 6] = [4.0, 16.0, 29.0, 29.0, 16.0, 4.0];

fn horner(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
}

/// Rational boundary in `u = sinh² r`; equals 1/2 at `r = 0` and tends to 3.
pub fn g2_boundary(r: f64) -> f64 {
    let u = r.sinh().powi(2);
    horner(&BOUNDARY_NUM, u) / horner(&BOUNDARY_DEN, u)
}

const BOUNDARY_SERIES: [f64; 4] = [0.5, 0.75, 0.375, 35.0 / 16.0];

/// Small-`r` expansion of [`g2_boundary`] through `sinh^{2·order} r`.
pub fn g2_boundary_series(r: f64, order: usize) -> Result<f64> {
    if order >= BOUNDARY_SERIES.len() {
        return Err(JanusError::UnsupportedOrder(order));
    }
    let u = r.sinh().powi(2);
    Ok(horner(&BOUNDARY_SERIES[..=order], u))
}

/// Partial sums behind the closed-form cross moments.
pub mod series {
    use num_complex::Complex64 as C64;

    /// `z (1−z)^{1/2} Σ_{n<terms} (2n+1)^power C_n z^n`, with
    /// `C_n = (2n−1)!!/(2n)!!`.
    fn weighted(z: C64, terms: usize, power: i32) -> C64 {
        let mut c = 1.0;
        let mut zn = C64::new(1.0, 0.0);
        let mut acc = C64::new(0.0, 0.0);
        for n in 0..terms {
            let w = ((2 * n + 1) as f64).powi(power);
            acc += zn * (w * c);
            c *= (2 * n + 1) as f64 / (2 * n + 2) as f64;
            zn *= z;
        }
        z * super::principal_pow(C64::new(1.0, 0.0) - z, 0.5) * acc
    }

    /// Partial sum that converges to `z / (1 − z)`.
    pub fn n_weighted(z: C64, terms: usize) -> C64 {
        weighted(z, terms, 1)
    }

    /// Partial sum that converges to `z (2z+1) / (1 − z)²`.
    pub fn n2_weighted(z: C64, terms: usize) -> C64 {
        weighted(z, terms, 2)
    }

    pub fn n_closed(z: C64) -> C64 {
        z / (1.0 - z)
    }

    pub fn n2_closed(z: C64) -> C64 {
        z * (2.0 * z + 1.0) / ((1.0 - z) * (1.0 - z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn sq(r: f64, th: f64) -> SqueezeParam {
        SqueezeParam::new(r, th).unwrap()
    }

    #[test]
    fn reduced_vars_basic() {
        let v = SqueezeParam::vacuum();
        let p = JanusParams::new(v, v, 1.0, 0.0, 0.0).unwrap();
        let rv = reduced_vars(&p);
        assert_eq!((rv.x, rv.y, rv.z), (0.0, 0.0, C64::new(0.0, 0.0)));

        let p = JanusParams::new(sq(0.34, PI), sq(0.34, 0.0), 1.0, 1.0, PI).unwrap();
        let rv = reduced_vars(&p);
        let x = 0.34f64.tanh().powi(2);
        assert!((rv.z.re + x).abs() < 1e-15);
        assert!(rv.z.im.abs() < 1e-15);
        assert!((rv.z.norm_sqr() - rv.x * rv.y).abs() < 1e-15);
        assert!(rv.k.is_some() && rv.l.is_some());

        let p = JanusParams::new(sq(0.7, FRAC_PI_2), sq(0.3, 0.0), 1.0, 1.0, 0.0).unwrap();
        let rv = reduced_vars(&p);
        let expect = 0.7f64.tanh() * 0.3f64.tanh();
        assert!(rv.z.re.abs() < 1e-16);
        assert!((rv.z.im - expect).abs() < 1e-15);
        assert!(rv.k.is_none() && rv.l.is_none());
    }

    #[test]
    fn overlap_of_state_with_itself_is_one() {
        for &(r, th) in &[(0.0, 0.0), (0.3, 1.0), (1.2, 4.0), (2.5, 0.1)] {
            let p = sq(r, th);
            let ov = overlap(&p, &p).unwrap();
            assert!((ov - 1.0).norm() < 1e-13, "{r} {th} {ov}");
        }
        let ov = overlap(&SqueezeParam::vacuum(), &sq(0.0, 2.0)).unwrap();
        assert_eq!(ov, C64::new(1.0, 0.0));
    }

    #[test]
    fn overlap_anti_aligned() {
        let ov = overlap(&sq(0.5, PI), &sq(0.5, 0.0)).unwrap();
        let expect = 1.0 / 0.5f64.cosh() / (1.0 + 0.5f64.tanh().powi(2)).sqrt();
        assert!((ov.re - expect).abs() < 1e-15);
        assert!(ov.im.abs() < 1e-15);
    }

    #[test]
    fn singular_overlap_is_reported() {
        // tanh(19) rounds to within an ulp of one
        let p = sq(18.5, 0.0);
        assert!(matches!(overlap(&p, &p), Err(JanusError::SingularOverlap(_))));
    }

    #[test]
    fn norm_residual_cases() {
        let a = sq(0.8, 1.0);
        let p = JanusParams::new(a, sq(0.2, 0.0), 1.0, 0.0, 0.0).unwrap();
        assert!(norm_residual(&p).unwrap().abs() < 1e-15);
        let p = JanusParams::new(a, a, 1.0, 1.0, 0.0).unwrap();
        assert!((norm_residual(&p).unwrap() - 3.0).abs() < 1e-13);
    }

    #[test]
    fn solve_chi_cases() {
        let a = sq(0.6, 0.4);
        assert_eq!(solve_chi(0.0, &a, &sq(0.1, 0.0), 0.3).unwrap(), 1.0);
        let chi = solve_chi(1.0, &a, &a, PI).unwrap();
        assert!((chi - 2.0).abs() < 1e-12);

        let (xi, zeta) = (sq(0.34, PI), sq(0.34, 0.0));
        let chi = solve_chi(2.20070, &xi, &zeta, PI).unwrap();
        let p = JanusParams::new(xi, zeta, chi, 2.20070, PI).unwrap();
        assert!(norm_residual(&p).unwrap().abs() < 1e-12);
        // the quadratic's closed form at Δ = δ = π: χ = Kη + √(K²η² − η² + 1)
        let k = k_factor(0.34);
        let e = 2.20070;
        let expect = k * e + (k * k * e * e - e * e + 1.0).sqrt();
        assert!((chi - expect).abs() < 1e-12);
    }

    #[test]
    fn solve_chi_infeasible() {
        let (xi, zeta) = (sq(0.40, PI), sq(0.40, 0.0));
        assert!(matches!(
            solve_chi(2.20070, &xi, &zeta, PI),
            Err(JanusError::InfeasibleAmplitude { .. })
        ));
        // δ = 0 with positive overlap: larger root negative once |η| > 1
        let a = sq(0.3, 0.0);
        assert!(solve_chi(1.5, &a, &a, 0.0).is_err());
        assert!(solve_chi(-1.0, &a, &a, 0.0).is_err());
    }

    #[test]
    fn smaller_root_is_also_normalized() {
        let (xi, zeta) = (sq(0.34, PI), sq(0.34, 0.0));
        let chi = solve_chi_with(2.0, &xi, &zeta, PI, RootChoice::Smaller).unwrap();
        let big = solve_chi(2.0, &xi, &zeta, PI).unwrap();
        assert!(chi < big && chi > 0.0);
        let p = JanusParams::new(xi, zeta, chi, 2.0, PI).unwrap();
        assert!(norm_residual(&p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn diagonal_cross_moments() {
        for &r in &[0.1, 0.5, 1.3] {
            let a = sq(r, 0.7);
            let u = r.sinh().powi(2);
            assert!((cross_n(&a, &a).unwrap() - u).norm() < 1e-12 * (1.0 + u));
            let n2 = u * (3.0 * u + 1.0);
            assert!((cross_n2(&a, &a).unwrap() - n2).norm() < 1e-12 * (1.0 + n2));
        }
        let v = SqueezeParam::vacuum();
        assert_eq!(cross_n(&v, &sq(0.5, 1.0)).unwrap().norm(), 0.0);
        assert_eq!(cross_n2(&sq(0.5, 1.0), &v).unwrap().norm(), 0.0);
        let c = cross_n(&sq(0.5, PI), &sq(0.5, 0.0)).unwrap();
        assert!(c.re < 0.0 && c.im.abs() < 1e-15);
    }

    #[test]
    fn single_state_g2() {
        let p = JanusParams::new(sq(1.0, 0.0), sq(0.4, 0.0), 1.0, 0.0, 0.0).unwrap();
        let g = g2_general(&p).unwrap();
        assert!((g - (3.0 + 1.0 / 1f64.sinh().powi(2))).abs() < 1e-12);
    }

    #[test]
    fn g2_general_errors() {
        let v = SqueezeParam::vacuum();
        let p = JanusParams::new(v, v, 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(g2_general(&p), Err(JanusError::VacuumDominated(_))));
        let a = sq(0.5, 0.0);
        let p = JanusParams::new(a, a, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(g2_general(&p), Err(JanusError::Unnormalized { .. })));
    }

    #[test]
    fn phase_geometry_special_values() {
        for &r in &[0.0, 0.2, 1.0, 3.0] {
            let g = phase_geometry(r, 0.0).unwrap();
            assert!((g.f - 1.0).abs() < 1e-12 * r.cosh().powi(4));
            assert_eq!(g.gamma, 0.0);
        }
        let g = phase_geometry(0.34, PI).unwrap();
        let expect = (2.0 * 0.34f64.sinh().powi(2) + 1.0).powi(2);
        assert!((g.f - expect).abs() < 1e-14);
        assert!(g.gamma.abs() < 1e-15);
        let g = phase_geometry(0.0, 1.3).unwrap();
        assert_eq!((g.f, g.gamma), (1.0, 0.0));
        assert!(phase_geometry(-0.1, 0.0).is_err());
    }

    #[test]
    fn phase_geometry_identity_quarter_turn() {
        let r: f64 = 0.5;
        let x = r.tanh().powi(2);
        let z = C64::from_polar(x, FRAC_PI_2);
        let direct = (1.0 - x) / (1.0 - z);
        let g = phase_geometry(r, FRAC_PI_2).unwrap();
        let via = C64::from_polar(g.f.powf(-0.5), -g.gamma);
        assert!((direct - via).norm() < 1e-15);
    }

    #[test]
    fn equal_squeeze_single_state() {
        for &r in &[0.2, 0.9] {
            let g = g2_equal_squeeze(r, 1.0, 2.0, 1.0, 0.0).unwrap();
            assert!((g - (3.0 + 1.0 / r.sinh().powi(2))).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_squeeze_nonoptimal_is_super_poissonian() {
        let (xi, zeta) = (sq(0.5, PI), sq(0.5, 0.0));
        let chi = solve_chi(1.0, &xi, &zeta, 0.0).unwrap();
        let g = g2_equal_squeeze(0.5, PI, 0.0, chi, 1.0).unwrap();
        assert!(g > 1.0, "{g}");
    }

    #[test]
    fn optimal_single_state() {
        let g = g2_optimal(0.7, 1.0, 0.0).unwrap();
        assert!((g - (3.0 + 1.0 / 0.7f64.sinh().powi(2))).abs() < 1e-12);
        assert!(g2_optimal(0.7, 1.0, 1.0).is_err());
        assert!(g2_optimal(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn boundary_values() {
        assert_eq!(g2_boundary(0.0), 0.5);
        let r1 = 1f64.asinh();
        assert!((g2_boundary(r1) - 144.0 / 98.0).abs() < 1e-13);
        let g6 = g2_boundary(6.0);
        assert!(g6 < 3.0 && g6 > 2.99);
    }

    #[test]
    fn boundary_series() {
        for order in 0..=3 {
            assert_eq!(g2_boundary_series(0.0, order).unwrap(), 0.5);
        }
        let u = 0.05f64.sinh().powi(2);
        assert!((g2_boundary_series(0.05, 1).unwrap() - (0.5 + 0.75 * u)).abs() < 1e-16);
        let d = (g2_boundary_series(0.1, 3).unwrap() - g2_boundary(0.1)).abs();
        assert!(d <= 1e-7, "{d}");
        assert!(matches!(g2_boundary_series(0.1, 4), Err(JanusError::UnsupportedOrder(4))));
    }

    #[test]
    fn one_minus_k_is_stable() {
        for &r in &[1e-6, 1e-3, 0.3, 2.0] {
            let direct = 1.0 - k_factor(r);
            let stable = one_minus_k(r);
            assert!((direct - stable).abs() <= 1e-15, "{r}");
        }
        assert!(one_minus_k(1e-9) > 0.0);
    }

    #[test]
    fn series_partial_sums() {
        let z = C64::new(0.3, -0.4);
        assert!((series::n_weighted(z, 200) - series::n_closed(z)).norm() < 1e-12);
        assert!((series::n2_weighted(z, 200) - series::n2_closed(z)).norm() < 1e-12);
    }
}
