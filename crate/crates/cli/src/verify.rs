//! Seeded analytic-versus-oracle property suites.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use janus_core::analytic::{self, series, Tolerances};
use janus_core::fock::{self, CrossOrder};
use janus_core::optimize;
use janus_core::{JanusParams, Result, SqueezeParam};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SUITES: [&str; 5] = ["overlap", "cross", "g2", "series", "oddcat"];

const R_RANGE: (f64, f64) = (0.05, 1.2);
const SERIES_TERMS: usize = 500;
const SERIES_TOL: f64 = 1e-10;
const PARITY_TOL: f64 = 1e-12;

/// Worst deviation of one check over all samples.
#[derive(Debug, Clone)]
pub struct Check {
    pub label: String,
    pub samples: usize,
    pub max_dev: f64,
    pub tol: f64,
    pub worst: String,
}

impl Check {
    fn new(label: &str, tol: f64) -> Self {
        Self {
            label: label.to_string(),
            samples: 0,
            max_dev: 0.0,
            tol,
            worst: String::new(),
        }
    }

    fn record(&mut self, dev: Result<f64>, at: impl FnOnce() -> String) {
        self.samples += 1;
        let (d, note) = match dev {
            Ok(d) if d.is_finite() => (d, None),
            Ok(d) => (f64::INFINITY, Some(format!("deviation {d}"))),
            Err(e) => (f64::INFINITY, Some(e.to_string())),
        };
        if d > self.max_dev || self.samples == 1 {
            self.max_dev = d;
            self.worst = match note {
                Some(n) => format!("{} ({n})", at()),
                None => at(),
            };
        }
    }

    pub fn passed(&self) -> bool {
        self.samples > 0 && self.max_dev <= self.tol
    }
}

pub struct Settings {
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub tail: f64,
}

fn describe(p: &JanusParams) -> String {
    format!(
        "r={:.17e} s={:.17e} theta={:.17e} phi={:.17e} delta={:.17e} eta={:.17e} chi={:.17e}",
        p.xi.r(),
        p.zeta.r(),
        p.xi.theta(),
        p.zeta.theta(),
        p.delta(),
        p.eta_mag(),
        p.chi_mag()
    )
}

fn squeeze(rng: &mut ChaCha8Rng) -> SqueezeParam {
    SqueezeParam::new(rng.gen_range(R_RANGE.0..=R_RANGE.1), rng.gen_range(0.0..TAU))
        .expect("sampled range is valid")
}

/// A normalized superposition with a defined g², redrawn until feasible.
fn feasible(rng: &mut ChaCha8Rng) -> JanusParams {
    loop {
        let (xi, zeta) = (squeeze(rng), squeeze(rng));
        let eta = rng.gen_range(0.0..=3.0);
        let delta = rng.gen_range(0.0..TAU);
        if let Ok(p) = JanusParams::normalized(xi, zeta, eta, delta) {
            if analytic::g2_general(&p).is_ok() {
                return p;
            }
        }
    }
}

fn fock_pair(xi: &SqueezeParam, zeta: &SqueezeParam, tail: f64) -> Result<(fock::FockVector, fock::FockVector)> {
    let cutoff = fock::oracle_cutoff(xi.r().max(zeta.r()), tail)?;
    Ok((
        fock::squeezed_fock(xi, cutoff)?,
        fock::squeezed_fock(zeta, cutoff)?,
    ))
}

fn overlap_suite(s: &Settings, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut c = Check::new("overlap <zeta|xi>", s.tolerances.oracle);
    for _ in 0..s.samples {
        let (xi, zeta) = (squeeze(rng), squeeze(rng));
        let dev = (|| {
            let (v1, v2) = fock_pair(&xi, &zeta, s.tail)?;
            let f = fock::cross_moment_fock(&v1, &v2, CrossOrder::Overlap)?;
            Ok((analytic::overlap(&xi, &zeta)? - f).norm())
        })();
        c.record(dev, || format!("xi={xi:?} zeta={zeta:?}"));
    }
    vec![c]
}

fn cross_suite(s: &Settings, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut n = Check::new("cross <zeta|a+a|xi>", s.tolerances.oracle);
    let mut n2 = Check::new("cross <zeta|a+2a2|xi>", s.tolerances.oracle);
    for _ in 0..s.samples {
        let (xi, zeta) = (squeeze(rng), squeeze(rng));
        let pair = fock_pair(&xi, &zeta, s.tail);
        let dev = |order, closed: fn(&SqueezeParam, &SqueezeParam) -> Result<C64>| -> Result<f64> {
            let (v1, v2) = pair.clone()?;
            Ok((closed(&xi, &zeta)? - fock::cross_moment_fock(&v1, &v2, order)?).norm())
        };
        n.record(dev(CrossOrder::N, analytic::cross_n), || format!("xi={xi:?} zeta={zeta:?}"));
        n2.record(dev(CrossOrder::N2, analytic::cross_n2), || format!("xi={xi:?} zeta={zeta:?}"));
    }
    vec![n, n2]
}

fn g2_suite(s: &Settings, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut c = Check::new("g2 analytic vs oracle", s.tolerances.oracle);
    for _ in 0..s.samples {
        let p = feasible(rng);
        let dev = (|| {
            let a = analytic::g2_general_tol(&p, &s.tolerances)?;
            Ok((a - fock::oracle_g2(&p, s.tail)?.g2).abs())
        })();
        c.record(dev, || describe(&p));
    }
    vec![c]
}

fn series_suite(s: &Settings, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut n = Check::new("series z/(1-z)", SERIES_TOL);
    let mut n2 = Check::new("series z(2z+1)/(1-z)^2", SERIES_TOL);
    for _ in 0..s.samples {
        let rho = 0.9 * rng.gen_range(0.0f64..=1.0).sqrt();
        let z = C64::from_polar(rho, rng.gen_range(0.0..TAU));
        n.record(
            Ok((series::n_weighted(z, SERIES_TERMS) - series::n_closed(z)).norm()),
            || format!("z={z}"),
        );
        n2.record(
            Ok((series::n2_weighted(z, SERIES_TERMS) - series::n2_closed(z)).norm()),
            || format!("z={z}"),
        );
    }
    vec![n, n2]
}

fn oddcat_suite(s: &Settings, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut parity = Check::new("oddcat amplitudes at n = 0 mod 4", PARITY_TOL);
    let mut curve = Check::new("oddcat g2 vs boundary curve", s.tolerances.oracle);
    let mut poly = Check::new("oddcat g2 vs boundary polynomial", s.tolerances.oracle);
    for _ in 0..s.samples {
        let r = rng.gen_range(R_RANGE.0..=R_RANGE.1);
        let g = (|| {
            let v = fock::odd_cat(r, fock::oracle_cutoff(r, s.tail)?)?;
            let leak = v.amps().iter().step_by(4).map(|a| a.norm()).fold(0.0, f64::max);
            Ok((leak, fock::g2_fock(&v)?))
        })();
        let at = || format!("r={r:.17e}");
        parity.record(g.clone().map(|(leak, _)| leak), at);
        curve.record(
            g.clone().and_then(|(_, g)| Ok((g - optimize::boundary_value(r)?).abs())),
            at,
        );
        poly.record(g.map(|(_, g)| (g - analytic::g2_boundary(r)).abs()), at);
    }
    vec![parity, curve, poly]
}

/// Run the named suite (or `all`) and render the report.
pub fn run(suite: &str, s: &Settings) -> Option<(String, bool)> {
    let names: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        name if SUITES.contains(&name) => vec![name],
        _ => return None,
    };
    let mut out = String::new();
    let _ = writeln!(out, "verify seed={} samples={}", s.seed, s.samples);
    let mut ok = true;
    for name in names {
        // one stream per suite
        let stream = SUITES.iter().position(|n| *n == name).unwrap_or(0) as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        rng.set_stream(stream);
        let checks = match name {
            "overlap" => overlap_suite(s, &mut rng),
            "cross" => cross_suite(s, &mut rng),
            "g2" => g2_suite(s, &mut rng),
            "series" => series_suite(s, &mut rng),
            _ => oddcat_suite(s, &mut rng),
        };
        for c in checks {
            let pass = c.passed();
            ok &= pass;
            let _ = writeln!(
                out,
                "{:<36} samples {:>5}  max|dev| {:.3e}  tol {:.1e}  {}",
                c.label,
                c.samples,
                c.max_dev,
                c.tol,
                if pass { "ok" } else { "FAIL" }
            );
            if !pass {
                let _ = writeln!(out, "  worst: {}", c.worst);
            }
        }
    }
    let _ = writeln!(out, "{}", if ok { "all checks passed" } else { "some checks failed" });
    Some((out, ok))
}
