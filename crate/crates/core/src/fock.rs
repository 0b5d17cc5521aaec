//! Truncated photon-number representation of squeezed vacua and their
//! superpositions. Every moment here is a direct sum over Fock amplitudes,
//! independent of the closed forms in [`crate::analytic`].

use std::io::{self, Write};

use num_complex::Complex64 as C64;

use crate::analytic::VACUUM_FLOOR;
use crate::error::{JanusError, Result};
use crate::params::{JanusParams, SqueezeParam};

/// Default certified bound on discarded probability mass.
pub const DEFAULT_TAIL: f64 = 1e-12;
/// Largest cutoff the oracle will build.
pub const MAX_CUTOFF: usize = 16384;
/// Adaptive cutoffs grow in these steps.
pub const CUTOFF_STEP: usize = 64;

/// Complex amplitudes over `|0⟩ … |cutoff⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<C64>,
}

impl FockVector {
    pub fn from_amps(amps: Vec<C64>) -> Result<Self> {
        if amps.len() < 3 || !(amps.len() - 1).is_multiple_of(2) {
            return Err(JanusError::BadCutoff(amps.len().saturating_sub(1)));
        }
        Ok(Self { amps })
    }

    /// `|n⟩` truncated at `cutoff`.
    pub fn number_state(n: usize, cutoff: usize) -> Result<Self> {
        check_cutoff(cutoff)?;
        if n > cutoff {
            return Err(JanusError::InvalidParameter(format!(
                "photon number {n} exceeds cutoff {cutoff}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); cutoff + 1];
        amps[n] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm2(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn scale(mut self, k: C64) -> Self {
        self.amps.iter_mut().for_each(|a| *a *= k);
        self
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &FockVector) -> Result<C64> {
        cross_moment_fock(other, self, CrossOrder::Overlap)
    }

    /// Debug dump, one `n real imag` line per photon number.
    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (n, a) in self.amps.iter().enumerate() {
            writeln!(w, "{n} {:.16e} {:.16e}", a.re, a.im)?;
        }
        Ok(())
    }
}

fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff < 2 || !cutoff.is_multiple_of(2) || cutoff > MAX_CUTOFF {
        return Err(JanusError::BadCutoff(cutoff));
    }
    Ok(())
}

/// Upper bound on `Σ_{n > cutoff/2} |c_n|²` for a squeezed vacuum with
/// `r ≤ r_max`, where `c_n` is the amplitude on `|2n⟩`.
///
/// Successive ratios satisfy `|c_{n+1}/c_n|² = tanh²r (2n+1)/(2n+2) < tanh²r`,
/// so the tail is at most `|c_m|² · t/(1−t)` with `t = tanh² r_max`.
pub fn truncation_bound(r_max: f64, cutoff: usize) -> f64 {
    if r_max <= 0.0 {
        return 0.0;
    }
    let m = cutoff / 2;
    let t = r_max.tanh().powi(2);
    let cosh2 = r_max.cosh().powi(2);
    ln_last_mass(r_max, m).exp() * t * cosh2
}

/// `ln |c_m|² = −ln cosh r + m ln t + ln C_m`, `C_m = (2m−1)!!/(2m)!!`.
fn ln_last_mass(r_max: f64, m: usize) -> f64 {
    let ln_cm: f64 = (0..m)
        .map(|k| ((2 * k + 1) as f64 / (2 * k + 2) as f64).ln())
        .sum();
    -r_max.cosh().ln() + m as f64 * r_max.tanh().powi(2).ln() + ln_cm
}

/// Upper bound on the truncated part of `⟨a†²a²⟩`,
/// `Σ_{n > cutoff/2} 2n(2n−1) |c_n|²`.
///
/// Successive terms shrink by `t (2n+1)² / (2n(2n−1))`, which decreases in
/// `n`; the bound is infinite while that ratio at the first dropped term is
/// not below one.
pub fn moment_truncation_bound(r_max: f64, cutoff: usize) -> f64 {
    if r_max <= 0.0 {
        return 0.0;
    }
    let m = cutoff / 2;
    let t = r_max.tanh().powi(2);
    let (a, b) = ((2 * m + 1) as f64, (2 * m + 2) as f64);
    let q = t * (a + 2.0) * (a + 2.0) / (b * a);
    if q >= 1.0 {
        return f64::INFINITY;
    }
    ln_last_mass(r_max, m).exp() * t * a * b / (1.0 - q)
}

/// Smallest cutoff on the 64-step ladder whose tail bound meets `target`.
pub fn adaptive_cutoff(r_max: f64, target: f64) -> Result<usize> {
    ladder(target, |c| truncation_bound(r_max, c))
}

/// As [`adaptive_cutoff`], additionally bounding the truncated part of
/// `⟨a†²a²⟩` by `target` relative to its full value `u(3u+1)`,
/// `u = sinh² r_max`. Used by the g² oracle.
pub fn oracle_cutoff(r_max: f64, target: f64) -> Result<usize> {
    let u = r_max.sinh().powi(2);
    let scale = 1.0 + u * (3.0 * u + 1.0);
    ladder(target, |c| {
        truncation_bound(r_max, c).max(moment_truncation_bound(r_max, c) / scale)
    })
}

fn ladder(target: f64, bound: impl Fn(usize) -> f64) -> Result<usize> {
    let mut cutoff = CUTOFF_STEP;
    loop {
        let tail = bound(cutoff);
        if tail <= target {
            return Ok(cutoff);
        }
        if cutoff + CUTOFF_STEP > MAX_CUTOFF {
            return Err(JanusError::CutoffTooSmall {
                cutoff,
                tail,
                target,
            });
        }
        cutoff += CUTOFF_STEP;
    }
}

/// Squeezed vacuum in the Fock basis, refusing cutoffs whose certified
/// tail exceeds [`DEFAULT_TAIL`].
pub fn squeezed_fock(p: &SqueezeParam, cutoff: usize) -> Result<FockVector> {
    check_cutoff(cutoff)?;
    let tail = truncation_bound(p.r(), cutoff);
    if tail > DEFAULT_TAIL {
        return Err(JanusError::CutoffTooSmall {
            cutoff,
            tail,
            target: DEFAULT_TAIL,
        });
    }
    Ok(squeezed_fock_truncated(p, cutoff))
}

/// Same expansion without the tail certificate, for convergence studies.
pub fn squeezed_fock_truncated(p: &SqueezeParam, cutoff: usize) -> FockVector {
    let mut amps = vec![C64::new(0.0, 0.0); cutoff + 1];
    let step = -p.alpha();
    let mut c = C64::new(p.r().cosh().sqrt().recip(), 0.0);
    for n in 0..=cutoff / 2 {
        amps[2 * n] = c;
        let k = (2 * n + 1) as f64;
        c *= step * ((k * (k + 1.0)).sqrt() / (k + 1.0));
    }
    FockVector { amps }
}

/// `χ·v1 + η·v2`, not renormalized.
pub fn superpose(chi: C64, v1: &FockVector, eta: C64, v2: &FockVector) -> Result<FockVector> {
    if v1.cutoff() != v2.cutoff() {
        return Err(JanusError::CutoffMismatch(v1.cutoff(), v2.cutoff()));
    }
    let amps = v1
        .amps
        .iter()
        .zip(&v2.amps)
        .map(|(a, b)| chi * a + eta * b)
        .collect();
    Ok(FockVector { amps })
}

/// Photon-number moments of a (possibly unnormalized) vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockMoments {
    pub norm2: f64,
    /// `⟨a†a⟩`
    pub n_mean: f64,
    /// `⟨a†²a²⟩`
    pub n2_normal: f64,
}

pub fn moments(v: &FockVector) -> Result<FockMoments> {
    let (mut norm2, mut n1, mut n2) = (0.0, 0.0, 0.0);
    for (n, a) in v.amps.iter().enumerate() {
        let p = a.norm_sqr();
        let n = n as f64;
        norm2 += p;
        n1 += n * p;
        n2 += n * (n - 1.0) * p;
    }
    if norm2 < 1e-30 {
        return Err(JanusError::ZeroVector(norm2));
    }
    Ok(FockMoments {
        norm2,
        n_mean: n1 / norm2,
        n2_normal: n2 / norm2,
    })
}

pub fn g2_fock(v: &FockVector) -> Result<f64> {
    let m = moments(v)?;
    if m.n_mean <= VACUUM_FLOOR {
        return Err(JanusError::VacuumDominated(m.n_mean));
    }
    Ok(m.n2_normal / (m.n_mean * m.n_mean))
}

/// Normalized `𝒩(|S(r)⟩ − |S(−r)⟩)`; only `|2⟩, |6⟩, |10⟩, …` survive.
pub fn odd_cat(r: f64, cutoff: usize) -> Result<FockVector> {
    if !r.is_finite() || r <= 0.0 {
        return Err(JanusError::InvalidParameter(format!(
            "odd superposition needs r > 0, got {r}"
        )));
    }
    let plus = squeezed_fock(&SqueezeParam::new(r, 0.0)?, cutoff)?;
    let minus = squeezed_fock(&SqueezeParam::new(r, std::f64::consts::PI)?, cutoff)?;
    // 1 − (cosh 2r)^{−1/2} = 2 sinh²r / (cosh 2r (1 + (cosh 2r)^{−1/2}))
    let c2 = (2.0 * r).cosh();
    let gap = 2.0 * r.sinh().powi(2) / (c2 * (1.0 + c2.sqrt().recip()));
    let norm = (2.0 * gap).sqrt().recip();
    superpose(
        C64::new(norm, 0.0),
        &plus,
        C64::new(-norm, 0.0),
        &minus,
    )
}

/// Operator weight for [`cross_moment_fock`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossOrder {
    Overlap,
    /// `a†a`
    N,
    /// `a†²a²`
    N2,
}

/// `Σ conj(b_n) a_n w(n)` = `⟨v2|O|v1⟩`.
pub fn cross_moment_fock(v1: &FockVector, v2: &FockVector, order: CrossOrder) -> Result<C64> {
    if v1.cutoff() != v2.cutoff() {
        return Err(JanusError::CutoffMismatch(v1.cutoff(), v2.cutoff()));
    }
    Ok(v1
        .amps
        .iter()
        .zip(&v2.amps)
        .enumerate()
        .map(|(n, (a, b))| {
            let n = n as f64;
            let w = match order {
                CrossOrder::Overlap => 1.0,
                CrossOrder::N => n,
                CrossOrder::N2 => n * (n - 1.0),
            };
            b.conj() * a * w
        })
        .sum())
}

/// Oracle evaluation of a superposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub g2: f64,
    pub cutoff: usize,
    pub tail: f64,
    pub moments: FockMoments,
}

/// Build `χ|ξ⟩ + η e^{iδ}|ζ⟩` at an adaptively certified cutoff and reduce
/// it to g².
pub fn oracle_g2(p: &JanusParams, target_tail: f64) -> Result<OracleReport> {
    let cutoff = oracle_cutoff(p.xi.r().max(p.zeta.r()), target_tail)?;
    oracle_g2_at(p, cutoff, target_tail)
}

/// As [`oracle_g2`] at a fixed cutoff, refused if its tail bound exceeds
/// `target_tail`.
pub fn oracle_g2_at(p: &JanusParams, cutoff: usize, target_tail: f64) -> Result<OracleReport> {
    check_cutoff(cutoff)?;
    let r_max = p.xi.r().max(p.zeta.r());
    let tail = truncation_bound(r_max, cutoff);
    if tail > target_tail {
        return Err(JanusError::CutoffTooSmall {
            cutoff,
            tail,
            target: target_tail,
        });
    }
    let v1 = squeezed_fock_truncated(&p.xi, cutoff);
    let v2 = squeezed_fock_truncated(&p.zeta, cutoff);
    let psi = superpose(p.chi(), &v1, p.eta(), &v2)?;
    let moments = moments(&psi)?;
    if moments.n_mean <= VACUUM_FLOOR {
        return Err(JanusError::VacuumDominated(moments.n_mean));
    }
    Ok(OracleReport {
        g2: moments.n2_normal / (moments.n_mean * moments.n_mean),
        cutoff,
        tail,
        moments,
    })
}
