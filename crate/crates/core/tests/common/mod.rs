#![allow(dead_code)]

use std::f64::consts::TAU;

use janus_core::analytic::Tolerances;
use janus_core::optimize::{Axis, GridSpec, Param, Point, Reason};
use janus_core::scan::{Formula, ScanMeta, ScanResult};
use janus_core::{JanusParams, SqueezeParam};
use rand::seq::SliceRandom;
use rand::Rng;

/// Any finite binary64, including subnormals and signed zeros.
pub fn any_finite<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let v = f64::from_bits(rng.gen());
        if v.is_finite() {
            return v;
        }
    }
}

fn ordered_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    loop {
        let (a, b) = if rng.gen_bool(0.5) {
            (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0))
        } else {
            (any_finite(rng), any_finite(rng))
        };
        if !((b - a) * 8.0).is_finite() {
            continue;
        }
        if a < b {
            return (a, b);
        } else if b < a {
            return (b, a);
        }
    }
}

/// A structurally valid scan with arbitrary contents.
pub fn random_scan<R: Rng>(rng: &mut R) -> ScanResult {
    let mut names = Param::ALL.to_vec();
    names.shuffle(rng);
    let equal = rng.gen_bool(0.3);
    if equal {
        names.retain(|p| *p != Param::S);
    }
    let naxes = rng.gen_range(1..=2);
    let axes: Vec<Axis> = names[..naxes]
        .iter()
        .map(|&name| {
            let (lo, hi) = ordered_pair(rng);
            Axis {
                name,
                lo,
                hi,
                points: rng.gen_range(2..=6),
            }
        })
        .collect();
    let fixed = Point {
        r: any_finite(rng),
        s: any_finite(rng),
        orientation: any_finite(rng),
        delta: any_finite(rng),
        eta: any_finite(rng),
    };
    let spec = GridSpec::new(axes, fixed, equal).expect("generated spec is valid");
    let reasons_pool = [Reason::Infeasible, Reason::Vacuum, Reason::Singular, Reason::Invalid];
    let (values, reasons) = (0..spec.len())
        .map(|_| {
            if rng.gen_bool(0.2) {
                (None, Some(*reasons_pool.choose(rng).unwrap()))
            } else if rng.gen_bool(0.5) {
                (Some(rng.gen_range(0.5..10.0)), None)
            } else {
                (Some(any_finite(rng)), None)
            }
        })
        .unzip();
    let formula = *[Formula::General, Formula::Equal, Formula::Optimal, Formula::Boundary]
        .choose(rng)
        .unwrap();
    ScanResult {
        spec,
        formula,
        values,
        reasons,
        meta: ScanMeta {
            timestamp: rng.gen(),
            engine_version: format!("{}.{}.{}", rng.gen::<u8>(), rng.gen::<u8>(), rng.gen::<u8>()),
            tolerances: Tolerances {
                norm: rng.gen_range(1e-14..1e-6),
                oracle: rng.gen_range(1e-12..1e-4),
            },
        },
    }
}

/// Bitwise equality of every float in two scans.
pub fn bit_identical(a: &ScanResult, b: &ScanResult) -> bool {
    let bits = |v: &Option<f64>| v.map(f64::to_bits);
    a.spec.axes.len() == b.spec.axes.len()
        && a.spec.axes.iter().zip(&b.spec.axes).all(|(x, y)| {
            x.name == y.name && x.points == y.points && x.lo.to_bits() == y.lo.to_bits() && x.hi.to_bits() == y.hi.to_bits()
        })
        && Param::ALL
            .iter()
            .all(|&p| a.spec.fixed.get(p).to_bits() == b.spec.fixed.get(p).to_bits())
        && a.spec.equal_squeeze == b.spec.equal_squeeze
        && a.formula == b.formula
        && a.values.iter().map(bits).eq(b.values.iter().map(bits))
        && a.reasons == b.reasons
        && a.meta.timestamp == b.meta.timestamp
        && a.meta.engine_version == b.meta.engine_version
        && a.meta.tolerances.norm.to_bits() == b.meta.tolerances.norm.to_bits()
        && a.meta.tolerances.oracle.to_bits() == b.meta.tolerances.oracle.to_bits()
}

/// A normalized superposition with a defined g², with `r, s` drawn from
/// `r_range`, all phases uniform and `|η| ∈ [0, 3]`; redrawn until feasible.
pub fn random_feasible<R: Rng>(rng: &mut R, r_range: (f64, f64)) -> JanusParams {
    loop {
        let xi = SqueezeParam::new(rng.gen_range(r_range.0..=r_range.1), rng.gen_range(0.0..TAU)).unwrap();
        let zeta = SqueezeParam::new(rng.gen_range(r_range.0..=r_range.1), rng.gen_range(0.0..TAU)).unwrap();
        let eta = rng.gen_range(0.0..=3.0);
        let delta = rng.gen_range(0.0..TAU);
        if let Ok(p) = JanusParams::normalized(xi, zeta, eta, delta) {
            if janus_core::analytic::g2_general(&p).is_ok() {
                return p;
            }
        }
    }
}
