use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use janus_core::analytic::{self, g2_boundary};
use janus_core::export::{self, ExportError, Format};
use janus_core::fock;
use janus_core::optimize::{self, Axis, GridSpec, OptimumRecord, Param, Point, TABLE_S1};
use janus_core::scan::{self, Formula};
use janus_core::{JanusError, JanusParams, SqueezeParam};

mod config;
mod verify;

use config::{CliConfig, CutoffPolicy};

#[derive(Parser)]
#[command(
    name = "janus",
    version,
    about = "Second-order coherence of superposed squeezed vacua",
    after_help = "Angles accept radians or the shorthands pi, pi/2, 2pi, -pi/4, ...\n\
                  Exit codes: 0 ok, 1 verification failed, 2 invalid or infeasible input, \
                  3 undefined quantity, 4 I/O error."
)]
struct Cli {
    /// Settings file of `key = value` lines
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory for files written without an explicit --out
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Accepted normalization residual
    #[arg(long, global = true, value_name = "TOL", value_parser = parse_positive)]
    tol_norm: Option<f64>,
    /// Accepted analytic-vs-oracle g2 deviation
    #[arg(long, global = true, value_name = "TOL", value_parser = parse_positive)]
    tol_oracle: Option<f64>,
    /// Target truncated probability mass of the Fock oracle
    #[arg(long, global = true, value_name = "MASS", value_parser = parse_positive)]
    tail: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate g2 at one parameter point, analytically and in the Fock basis
    G2(G2Args),
    /// Run seeded analytic-vs-oracle property suites
    Verify(VerifyArgs),
    /// Fill a grid with g2 values and write it to disk
    Scan(ScanArgs),
    /// Locate minima of g2
    Optimize(OptimizeArgs),
}

#[derive(Args)]
struct G2Args {
    /// Squeezing magnitude of the first state
    #[arg(long, value_parser = parse_real)]
    r: f64,
    /// Squeezing magnitude of the second state [default: r]
    #[arg(long, value_parser = parse_real)]
    s: Option<f64>,
    /// Squeezing phase of the first state [default: phi + Delta]
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true, conflicts_with = "orientation")]
    theta: Option<f64>,
    /// Squeezing phase of the second state
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true, default_value = "0")]
    phi: f64,
    /// Relative orientation theta - phi
    #[arg(long = "Delta", id = "orientation", value_parser = parse_angle, allow_hyphen_values = true)]
    orientation: Option<f64>,
    /// Superposition phase
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true, default_value = "0")]
    delta: f64,
    /// Amplitude |eta| of the second state
    #[arg(long, value_parser = parse_real)]
    eta: f64,
    /// Amplitude |chi| of the first state [default: solved from normalization]
    #[arg(long, value_parser = parse_real)]
    chi: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// overlap, cross, g2, series, oddcat or all
    #[arg(long, default_value = "all")]
    suite: String,
    /// Samples per suite
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
#[command(group(ArgGroup::new("domain").required(true).args(["fig", "axis"])))]
struct ScanArgs {
    /// Figure preset: 1, 2a, 2b, 3a, 3b, 3c, 3d, 4, 5 or 5c
    #[arg(long, conflicts_with_all = ["fix", "equal", "formula"])]
    fig: Option<String>,
    /// Grid axis NAME:LO:HI:POINTS with NAME one of r, s, Delta, delta, eta
    #[arg(long, value_parser = parse_axis, allow_hyphen_values = true)]
    axis: Vec<Axis>,
    /// Fixed coordinate NAME=VALUE; unset coordinates are 0
    #[arg(long, value_parser = parse_fix, allow_hyphen_values = true)]
    fix: Vec<(Param, f64)>,
    /// Tie s to r
    #[arg(long)]
    equal: bool,
    /// general, equal, optimal or boundary
    #[arg(long)]
    formula: Option<String>,
    /// Output file [default: <out-dir>/fig<NAME>.<ext> or <out-dir>/scan.<ext>]
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json [default: from --out extension, then config]
    #[arg(long)]
    format: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    SweetSpot,
    Boundary,
    TableS1,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// Also write the records to this file
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json [default: from --out extension, then config]
    #[arg(long)]
    format: Option<String>,
}

enum Failure {
    Verify,
    Input(String),
    Undefined(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verify => 1,
            Failure::Input(_) => 2,
            Failure::Undefined(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

impl From<JanusError> for Failure {
    fn from(e: JanusError) -> Self {
        match e {
            JanusError::VacuumDominated(_) => Failure::Undefined(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<ExportError> for Failure {
    fn from(e: ExportError) -> Self {
        match e {
            ExportError::Io { .. } => Failure::Io(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    if !v.is_finite() {
        return Err(format!("{s:?} is not finite"));
    }
    Ok(v)
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_real(s)?;
    if v <= 0.0 {
        return Err(format!("{s:?} must be > 0"));
    }
    Ok(v)
}

/// Radians, or `[-][k]pi[/m]`.
fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let Some(i) = t.find("pi") else {
        return parse_real(t);
    };
    let (head, tail) = (&t[..i], &t[i + 2..]);
    let (sign, head) = match head.strip_prefix('-') {
        Some(h) => (-1.0, h),
        None => (1.0, head),
    };
    let k: f64 = if head.is_empty() {
        1.0
    } else {
        head.parse().map_err(|_| format!("bad angle {s:?}"))?
    };
    let m: f64 = match tail.strip_prefix('/') {
        Some(d) => d.parse().map_err(|_| format!("bad angle {s:?}"))?,
        None if tail.is_empty() => 1.0,
        None => return Err(format!("bad angle {s:?}")),
    };
    let v = sign * k * PI / m;
    if !v.is_finite() {
        return Err(format!("bad angle {s:?}"));
    }
    Ok(v)
}

fn parse_value(p: Param, s: &str) -> Result<f64, String> {
    match p {
        Param::Orientation | Param::Phase => parse_angle(s),
        _ => parse_real(s),
    }
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    let f: Vec<&str> = s.split(':').collect();
    if f.len() != 4 {
        return Err(format!("expected NAME:LO:HI:POINTS, got {s:?}"));
    }
    let name = Param::parse(f[0]).map_err(|e| e.to_string())?;
    let points = f[3].parse().map_err(|_| format!("bad point count {:?}", f[3]))?;
    Axis::new(name, parse_value(name, f[1])?, parse_value(name, f[2])?, points).map_err(|e| e.to_string())
}

fn parse_fix(s: &str) -> Result<(Param, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    let p = Param::parse(k.trim()).map_err(|e| e.to_string())?;
    Ok((p, parse_value(p, v)?))
}

fn load_config(cli: &Cli) -> Result<CliConfig, Failure> {
    let mut c = CliConfig::from_env();
    if let Some(path) = &cli.config {
        c.merge_file(path).map_err(|e| match e.line {
            0 => Failure::Io(e.to_string()),
            _ => Failure::Input(e.to_string()),
        })?;
    }
    if let Some(d) = &cli.out_dir {
        c.out_dir = d.clone();
    }
    if let Some(t) = cli.tol_norm {
        c.tolerances.norm = t;
    }
    if let Some(t) = cli.tol_oracle {
        c.tolerances.oracle = t;
    }
    if let Some(t) = cli.tail {
        c.tail = t;
    }
    Ok(c)
}

fn output_format(flag: Option<&str>, out: Option<&Path>, cfg: &CliConfig) -> Result<Format, Failure> {
    if let Some(f) = flag {
        return Format::parse(f).ok_or_else(|| Failure::Input(format!("format must be csv or json, got {f:?}")));
    }
    Ok(out.and_then(Format::from_path).unwrap_or(cfg.format))
}

fn resolve_out(out: Option<PathBuf>, default_name: &str, format: Format, cfg: &CliConfig) -> Result<PathBuf, Failure> {
    let path = out.unwrap_or_else(|| cfg.out_dir.join(format!("{default_name}.{}", format.extension())));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    }
    Ok(path)
}

fn cmd_g2(a: &G2Args, cfg: &CliConfig) -> Result<(), Failure> {
    let theta = a.theta.unwrap_or(a.phi + a.orientation.unwrap_or(0.0));
    let xi = SqueezeParam::new(a.r, theta)?;
    let zeta = SqueezeParam::new(a.s.unwrap_or(a.r), a.phi)?;
    let p = match a.chi {
        Some(chi) => JanusParams::new(xi, zeta, chi, a.eta, a.delta)?,
        None => JanusParams::normalized(xi, zeta, a.eta, a.delta)?,
    };
    let residual = analytic::norm_residual(&p)?;
    let g2 = analytic::g2_general_tol(&p, &cfg.tolerances)?;
    let mean = analytic::analytic_moments(&p)?.mean;
    let oracle = match cfg.cutoff {
        CutoffPolicy::Adaptive => fock::oracle_g2(&p, cfg.tail)?,
        CutoffPolicy::Fixed(n) => fock::oracle_g2_at(&p, n, cfg.tail)?,
    };
    println!("g2 analytic    {}", export::fmt_f64(g2));
    println!("g2 oracle      {}", export::fmt_f64(oracle.g2));
    println!("difference     {:.3e}", g2 - oracle.g2);
    println!("|chi|          {}", export::fmt_f64(p.chi_mag()));
    println!("norm residual  {:.3e}", residual);
    println!("mean photons   {}", export::fmt_f64(mean));
    println!("cutoff         {} (tail bound {:.3e})", oracle.cutoff, oracle.tail);
    Ok(())
}

fn cmd_verify(a: &VerifyArgs, cfg: &CliConfig) -> Result<(), Failure> {
    let settings = verify::Settings {
        samples: a.samples as usize,
        seed: a.seed,
        tolerances: cfg.tolerances,
        tail: cfg.tail,
    };
    let (report, ok) = verify::run(&a.suite, &settings).ok_or_else(|| {
        Failure::Input(format!(
            "unknown suite {:?} (expected {} or all)",
            a.suite,
            verify::SUITES.join(", ")
        ))
    })?;
    print!("{report}");
    if ok {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn describe_point(spec: &GridSpec, flat: usize) -> String {
    spec.axes
        .iter()
        .zip(spec.coords(flat))
        .map(|(a, v)| format!("{}={v:.6}", a.name))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_scan(a: ScanArgs, cfg: &CliConfig) -> Result<(), Failure> {
    let (spec, formula, name) = match &a.fig {
        Some(fig) => {
            let (spec, formula) = scan::preset(fig)?;
            (spec, formula, format!("fig{fig}"))
        }
        None => {
            let mut fixed = Point {
                r: 0.0,
                s: 0.0,
                orientation: 0.0,
                delta: 0.0,
                eta: 0.0,
            };
            for (p, v) in &a.fix {
                fixed.set(*p, *v);
            }
            let formula = Formula::parse(a.formula.as_deref().unwrap_or("general"))?;
            (GridSpec::new(a.axis.clone(), fixed, a.equal)?, formula, "scan".to_string())
        }
    };
    let format = output_format(a.format.as_deref(), a.out.as_deref(), cfg)?;
    let result = scan::run_scan_tol(&spec, formula, &cfg.tolerances)?;
    let path = resolve_out(a.out, &name, format, cfg)?;
    export::write_scan(&result, &path, format)?;
    println!(
        "wrote {}: {} points, {} feasible, formula {}",
        path.display(),
        result.values.len(),
        result.feasible(),
        formula.as_str()
    );
    match result.min() {
        Some((i, g)) => println!("min g2 {} at {}", export::fmt_f64(g), describe_point(&spec, i)),
        None => println!("no feasible point"),
    }
    Ok(())
}

fn print_record(label: &str, r: &OptimumRecord) {
    println!(
        "{label:<10} r={:.6} s={:.6} Delta={:.6} delta={:.6} |eta|={:.6} |chi|={:.6} g2={:.5} evaluations={} skipped={} converged={}",
        r.r, r.s, r.orientation, r.delta, r.eta_mag, r.chi_mag, r.g2, r.evaluations, r.skipped, r.converged
    );
}

fn cmd_optimize(a: OptimizeArgs, cfg: &CliConfig) -> Result<(), Failure> {
    let records: Vec<OptimumRecord> = match a.mode {
        Mode::SweetSpot => {
            let s = optimize::sweet_spot(cfg.refine_tol)?;
            print_record("grid", &s.grid);
            print_record("refined", &s.refined);
            print_record("slice", &s.slice);
            vec![s.grid, s.refined, s.slice]
        }
        Mode::Boundary => {
            let mut rs = vec![1e-4];
            rs.extend((1..=600).map(|i| i as f64 / 100.0));
            let recs = rs
                .iter()
                .map(|&r| optimize::boundary_record(r))
                .collect::<Result<Vec<_>, _>>()?;
            println!("{:>8}  {:>22}  {:>22}  {:>10}", "r", "curve", "polynomial", "difference");
            for rec in recs.iter().filter(|x| [1e-4, 0.01, 0.1, 0.34, 1.0, 2.0, 6.0].contains(&x.r)) {
                let poly = g2_boundary(rec.r);
                println!(
                    "{:>8}  {:>22}  {:>22}  {:>10.3e}",
                    rec.r,
                    export::fmt_f64(rec.g2),
                    export::fmt_f64(poly),
                    rec.g2 - poly
                );
            }
            recs
        }
        Mode::TableS1 => {
            let rs: Vec<f64> = TABLE_S1.iter().map(|(r, _)| *r).collect();
            let rows = optimize::table_s1(&rs, optimize::SWEET_SPOT_ETA);
            println!("|eta| = {:.5}, Delta = delta = pi", optimize::SWEET_SPOT_ETA);
            println!("{:>5}  {:>9}  {:>9}  {:>10}  within 5e-5", "r", "g2", "published", "deviation");
            let mut hits = 0;
            let mut recs = Vec::new();
            for ((r, published), row) in TABLE_S1.iter().zip(rows) {
                match row {
                    Ok(rec) => {
                        let dev = rec.g2 - published;
                        let ok = dev.abs() <= 5e-5;
                        hits += ok as usize;
                        println!(
                            "{r:>5.2}  {:>9.5}  {published:>9.5}  {dev:>+10.5}  {}",
                            rec.g2,
                            if ok { "yes" } else { "no" }
                        );
                        recs.push(rec);
                    }
                    Err(e) => println!("{r:>5.2}  {:>9}  {published:>9.5}  {:>10}  no ({e})", "-", "-"),
                }
            }
            println!("rows within 5e-5: {hits}/{}", TABLE_S1.len());
            recs
        }
    };
    if let Some(out) = a.out {
        let format = output_format(a.format.as_deref(), Some(&out), cfg)?;
        let path = resolve_out(Some(out), "", format, cfg)?;
        export::write_records(&records, &path, format)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_config(&cli).and_then(|cfg| match cli.command {
        Command::G2(a) => cmd_g2(&a, &cfg),
        Command::Verify(a) => cmd_verify(&a, &cfg),
        Command::Scan(a) => cmd_scan(a, &cfg),
        Command::Optimize(a) => cmd_optimize(a, &cfg),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Verify => {}
                Failure::Input(m) | Failure::Undefined(m) | Failure::Io(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
