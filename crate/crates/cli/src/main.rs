//! `lorpto`: batch front end for Ptolemy scans, witness construction,
//! inversion, curvature diagnostics, cones and causal sets.
//!
//! Exit codes: 0 when nothing was violated, 2 when a check found a
//! violation, 1 on usage or runtime errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use lorpto::backend::{Backend, SpaceSpec};
use lorpto::causet::{exhaustive_ptolemy, sprinkle, CausalSet, CausalSetJson};
use lorpto::cone::{cone_isometry_residual, cone_time_sep, ConePoint, FnMetric};
use lorpto::curvature::{estimate_sectional, four_point_check, SectionalGrid};
use lorpto::inversion::{invert_point, set_identity_check, InversionSpec};
use lorpto::io::parse_point_set;
use lorpto::report::{canonical_json, report_emit, Format};
use lorpto::sampling::{substream_rng, Diamond, DiamondSampler};
use lorpto::scan::{scan, with_threads, ScanOptions, ScanReport};
use lorpto::witness::{witness_positive_curvature, WitnessConfig};
use lorpto::{Event, GeodesicSpace, LorentzianSpace, Separations6};

#[derive(Parser)]
#[command(name = "lorpto", version, about = "Lorentzian Ptolemy inequality and timelike curvature checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Seeded Ptolemy scan of quadruples drawn from a diamond.
    Check(CheckArgs),
    /// Hyperbola witness quadruple pushed through the exponential map.
    Witness(WitnessArgs),
    /// Hyperbolic inversion of points, or the set identities of the inversion.
    Invert(InvertArgs),
    /// Curvature diagnostics.
    #[command(subcommand)]
    Curvature(CurvatureCommand),
    /// Minkowski cone separations and the cone isometry residual.
    Cone(ConeArgs),
    /// Finite causal sets.
    #[command(subcommand)]
    Causet(CausetCommand),
}

#[derive(Args)]
struct SpaceArgs {
    /// `minkowski:N` or `model:K`.
    #[arg(long, default_value = "minkowski:1")]
    space: String,
}

impl SpaceArgs {
    fn backend(&self) -> Result<Backend> {
        Ok(Backend::new(self.space.parse::<SpaceSpec>()?)?)
    }
}

#[derive(Args)]
struct RegionArgs {
    /// Diamond corners `past;future`, each a comma list: inertial coordinates
    /// for flat space, conformal `T,X` for models.
    #[arg(long, allow_hyphen_values = true)]
    region: Option<String>,
    /// Height of the centered diamond used when no region is given.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

impl RegionArgs {
    fn diamond(&self, b: &Backend) -> Result<Diamond> {
        match &self.region {
            Some(r) => {
                let (p, f) = r.split_once(';').ok_or_else(|| anyhow!("region must be 'past;future'"))?;
                Ok(b.region_from_corners(&parse_list(p)?, &parse_list(f)?)?)
            }
            None => Ok(b.centered_region(self.scale)?),
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit wall-clock timing so reports are byte-reproducible.
    #[arg(long)]
    no_timing: bool,
    /// Worker threads; defaults to LORPTO_THREADS, then to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[command(flatten)]
    region: RegionArgs,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Margin for the robust slack.
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// `json` or `csv`.
    #[arg(long, default_value = "json")]
    format: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct WitnessArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    center_x: f64,
    /// Two slopes `k1,k2` of the lines `x = k t`.
    #[arg(long, default_value = "0,0.5", allow_hyphen_values = true)]
    slopes: String,
    /// Scale of the tangent vectors.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InvertArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// Center coordinates; the origin when absent.
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// A point to invert (repeatable).
    #[arg(long = "point", allow_hyphen_values = true)]
    points: Vec<String>,
    /// Point-set JSON file of points to invert.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Instead of inverting points, sample the set identities
    /// `H(I(x,z)) ⊆ I⁺(z)` and `H(I⁺(z)) ⊆ I(x,z)` with `z` at `radius` along
    /// the time axis of the center.
    #[arg(long)]
    check_sets: bool,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CurvatureCommand {
    /// Sectional curvature from the second-order expansion of ℓ at the origin.
    Estimate(EstimateArgs),
    /// Flat four-point test on six separations or four points.
    Fourpoint(FourPointArgs),
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// Frame components `t,x` of v.
    #[arg(long, default_value = "1,0.1", allow_hyphen_values = true)]
    v: String,
    /// Frame components `t,x` of w.
    #[arg(long, default_value = "0.8,0.5", allow_hyphen_values = true)]
    w: String,
    /// Largest grid parameter t.
    #[arg(long, default_value_t = 0.1)]
    max_param: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FourPointArgs {
    /// `l12,l13,l14,l23,l24,l34`.
    #[arg(long)]
    seps: Option<String>,
    /// Point-set JSON file with four causally ordered points.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConeArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// With `--t` and `--dist`: evaluate ℓ_C((s, x), (t, y)) for d(x, y) = dist.
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    dist: Option<f64>,
    /// Pairs sampled from I(o, exp_o(scale e_t)) for the residual.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CausetCommand {
    /// Sprinkle points into a diamond and write the causal set.
    Sprinkle(SprinkleArgs),
    /// Exhaustive Ptolemy scan of a causal-set file.
    Check(CausetCheckArgs),
}

#[derive(Args)]
struct SprinkleArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[command(flatten)]
    region: RegionArgs,
    #[arg(short, long, default_value_t = 60)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CausetCheckArgs {
    /// Causal-set JSON file.
    #[arg(long)]
    input: PathBuf,
    /// Use longest chains over the stored weights instead of the file's table.
    #[arg(long)]
    longest_path: bool,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad number '{v}'")))
        .collect()
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn verdict(violated: bool) -> ExitCode {
    if violated {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn summarize(r: &ScanReport) {
    eprintln!(
        "{}: {} quadruples, min slack {}, {} violations",
        r.space,
        r.samples,
        r.min_slack.map_or("n/a".into(), |v| format!("{v:e}")),
        r.violations
    );
}

fn run_check(a: CheckArgs) -> Result<ExitCode> {
    let b = a.space.backend()?;
    let region = a.region.diamond(&b)?;
    let format: Format = a.format.parse()?;
    let opts = ScanOptions {
        delta: a.delta,
        threads: a.output.threads,
        keep_rows: format == Format::Csv,
    };
    let mut r = scan(&b, &b.to_string(), &region, a.samples, a.seed, &opts)?;
    if a.output.no_timing {
        r = r.without_timing();
    }
    emit(&a.output.out, &report_emit(&r, format)?)?;
    summarize(&r);
    if let Some(e) = &r.error {
        bail!("scan stopped early: {e}");
    }
    Ok(verdict(r.violations > 0))
}

fn run_witness(a: WitnessArgs) -> Result<ExitCode> {
    let b = a.space.backend()?;
    let slopes = parse_list(&a.slopes)?;
    if slopes.len() != 2 {
        bail!("--slopes needs two values");
    }
    let cfg = WitnessConfig {
        a: a.a,
        center_x: a.center_x,
        slopes: [slopes[0], slopes[1]],
        scale: a.scale,
    };
    if let SpaceSpec::Model(k) = b.spec() {
        cfg.check_for_curvature(k)?;
    }
    let v = witness_positive_curvature(&b, &b.origin(), &cfg, a.delta)?;
    let out = json!({
        "space": b.to_string(),
        "config": cfg,
        "tangent_points": cfg.tangent_points()?,
        "separations": v.separations,
        "slack": v.slack,
        "robust_slack": v.robust_slack,
        "delta": v.delta,
        "witness": v.witness,
        "violation": v.is_violation(),
    });
    emit(&a.out, canonical_json(&out)?.as_bytes())?;
    eprintln!("{}: witness slack {:e}", b, v.slack);
    Ok(verdict(v.is_violation()))
}

fn run_invert(a: InvertArgs) -> Result<ExitCode> {
    let b = a.space.backend()?;
    let center = match &a.center {
        Some(c) => b.event(parse_list(c)?)?,
        None => b.origin(),
    };
    let spec = InversionSpec::new(center.clone(), a.radius)?;
    if a.check_sets {
        let (et, _) = b.timelike_frame(&center);
        let z = b.exp(&center, &et.iter().map(|c| c * a.radius).collect::<Vec<_>>())?;
        let rep = set_identity_check(&b, &center, &z, a.samples, a.seed)?;
        let out = json!({"space": b.to_string(), "center": center, "z": z, "seed": a.seed, "report": rep});
        emit(&a.out, canonical_json(&out)?.as_bytes())?;
        eprintln!("{}: {} set-identity violations", b, rep.violations());
        return Ok(verdict(rep.violations() > 0));
    }
    let mut pts = Vec::new();
    if let Some(path) = &a.input {
        let (pb, p) = parse_point_set(&fs::read_to_string(path)?)?;
        if pb.spec() != b.spec() {
            bail!("point file is for {}, not {}", pb, b);
        }
        pts.extend(p);
    }
    for p in &a.points {
        pts.push(b.event(parse_list(p)?)?);
    }
    if pts.is_empty() {
        bail!("nothing to invert; pass --point or --input");
    }
    let mut rows = Vec::new();
    for p in &pts {
        let h = invert_point(&b, &spec, p)?;
        rows.push(json!({
            "point": p,
            "image": h,
            "product": b.time_separation(&center, p) * b.time_separation(&center, &h),
        }));
    }
    let out = json!({"space": b.to_string(), "center": center, "radius": a.radius, "points": rows});
    emit(&a.out, canonical_json(&out)?.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn run_estimate(a: EstimateArgs) -> Result<ExitCode> {
    let b = a.space.backend()?;
    let (v, w) = (parse_list(&a.v)?, parse_list(&a.w)?);
    if v.len() != 2 || w.len() != 2 {
        bail!("--v and --w take frame components t,x");
    }
    let p = b.origin();
    let est = estimate_sectional(
        &b,
        &p,
        &b.frame_vector(&p, v[0], v[1]),
        &b.frame_vector(&p, w[0], w[1]),
        &SectionalGrid::with_max(a.max_param),
    )?;
    let out = json!({"space": b.to_string(), "max_param": a.max_param, "estimate": est});
    emit(&a.out, canonical_json(&out)?.as_bytes())?;
    eprintln!("{}: K_hat = {}", b, est.k_hat);
    Ok(ExitCode::SUCCESS)
}

fn run_fourpoint(a: FourPointArgs) -> Result<ExitCode> {
    let seps = match (&a.seps, &a.input) {
        (Some(s), None) => {
            let l = parse_list(s)?;
            let arr: [f64; 6] = l.try_into().map_err(|_| anyhow!("--seps needs six values"))?;
            Separations6::from_array(arr)
        }
        (None, Some(path)) => {
            let (b, pts) = parse_point_set(&fs::read_to_string(path)?)?;
            let q: [Event; 4] = pts.try_into().map_err(|_| anyhow!("need exactly four points"))?;
            lorpto::space::check_causal_chain(&b, &q)?;
            b.separations(&q)
        }
        _ => bail!("pass exactly one of --seps or --input"),
    };
    let v = four_point_check(&seps)?;
    let out = json!({"separations": seps, "verdict": v, "passes": v.passes()});
    emit(&a.out, canonical_json(&out)?.as_bytes())?;
    Ok(verdict(!v.passes()))
}

fn run_cone(a: ConeArgs) -> Result<ExitCode> {
    if let (Some(s), Some(t), Some(d)) = (a.s, a.t, a.dist) {
        let m = FnMetric::new(move |_: &(), _: &()| d);
        let l = cone_time_sep(&m, &ConePoint::new(s, ()), &ConePoint::new(t, ()))?;
        emit(&a.out, canonical_json(&json!({"s": s, "t": t, "dist": d, "ell": l}))?.as_bytes())?;
        return Ok(ExitCode::SUCCESS);
    }
    let b = a.space.backend()?;
    let o = b.origin();
    let (et, _) = b.timelike_frame(&o);
    let top = b.exp(&o, &et.iter().map(|c| c * a.scale).collect::<Vec<_>>())?;
    let mut rng = substream_rng(a.seed, 0);
    let mut worst = (0.0f64, None);
    for _ in 0..a.samples {
        let x = b.sample_in_diamond(&o, &top, &mut rng)?;
        let y = b.sample_in_diamond(&o, &top, &mut rng)?;
        let pair = [(x, y)];
        let r = cone_isometry_residual(&b, &o, &pair)?;
        if r > worst.0 || worst.1.is_none() {
            let [(x, y)] = pair;
            worst = (r, Some([x, y]));
        }
    }
    let out = json!({
        "space": b.to_string(),
        "samples": a.samples,
        "seed": a.seed,
        "scale": a.scale,
        "max_residual": worst.0,
        "worst_pair": worst.1,
    });
    emit(&a.out, canonical_json(&out)?.as_bytes())?;
    eprintln!("{}: max cone residual {:e}", b, worst.0);
    Ok(ExitCode::SUCCESS)
}

fn run_sprinkle(a: SprinkleArgs) -> Result<ExitCode> {
    let b = a.space.backend()?;
    let region = a.region.diamond(&b)?;
    let cs = sprinkle(&b, &b.to_string(), &region, a.n, a.seed)?;
    emit(&a.out, canonical_json(&cs.to_json())?.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn run_causet_check(a: CausetCheckArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let j: CausalSetJson = serde_json::from_str(&text).context("parsing causal set")?;
    let mut cs = CausalSet::from_json(j)?;
    let convergence = cs.convergence()?;
    if a.longest_path {
        cs = cs.with_longest_path()?;
    }
    let mut r = with_threads(a.output.threads, || exhaustive_ptolemy(&cs, a.delta, a.output.threads))??;
    if a.output.no_timing {
        r = r.without_timing();
    }
    emit(&a.output.out, &report_emit(&r, Format::Json)?)?;
    summarize(&r);
    if let Some((d, [i, j, k])) = cs.reverse_triangle_min() {
        eprintln!("reverse triangle: min deficit {d:e} at ({i}, {j}, {k})");
    }
    if let Some(c) = convergence {
        eprintln!(
            "longest chain / ambient separation over {} pairs: mean {:.4}, min {:.4}, max {:.4}",
            c.pairs, c.mean_ratio, c.min_ratio, c.max_ratio
        );
    }
    Ok(verdict(r.violations > 0))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check(a) => run_check(a),
        Command::Witness(a) => run_witness(a),
        Command::Invert(a) => run_invert(a),
        Command::Curvature(CurvatureCommand::Estimate(a)) => run_estimate(a),
        Command::Curvature(CurvatureCommand::Fourpoint(a)) => run_fourpoint(a),
        Command::Cone(a) => run_cone(a),
        Command::Causet(CausetCommand::Sprinkle(a)) => run_sprinkle(a),
        Command::Causet(CausetCommand::Check(a)) => run_causet_check(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
