use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lempert_lab::ambient::{norm, AmbientDomain, Ball};
use lempert_lab::conformal::{build_riemann_map_with, MapMethod, MapOptions};
use lempert_lab::disc::{lempert_upper_bound_with, UpperBoundOptions};
use lempert_lab::domain::{build_domain, DomainSpec};
use lempert_lab::experiments::{run_file, Experiment};
use lempert_lab::metrics::{lempert_ball_full, lempert_planar_full};
use lempert_lab::C64;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "lempert-lab", version, about = "Lempert function and invariant metric experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Boundary decay on the logarithmic domain against the disc.
    Example4(RunArgs),
    /// `(1 - l)/(d_z d_w)` sweeps and constructed-disc certificates.
    Theorem1(RunArgs),
    /// Derivative envelopes of a converging family of Riemann maps.
    Proposition2(RunArgs),
    /// Koebe, normal-ray and pair-comparison estimates.
    Estimates(RunArgs),
    /// Certified upper bound for `l(z, w)` from an explicit disc.
    Certify(CertifyArgs),
    /// Boundary correspondence of a Riemann map as CSV.
    MapExport(MapExportArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CertifyArgs {
    /// Planar domain as JSON; omit for the ball.
    #[arg(long, conflicts_with = "ball")]
    domain: Option<PathBuf>,
    /// Unit ball of this dimension.
    #[arg(long)]
    ball: Option<usize>,
    /// Points as `re,im` per coordinate, coordinates separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    #[arg(long, allow_hyphen_values = true)]
    w: String,
    /// Boundary points; the nearest ones to `z` and `w` when omitted.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, default_value_t = 1024)]
    nodes: usize,
    /// Write the certificate here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MapExportArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    center: String,
    #[arg(long, default_value_t = 512)]
    points: usize,
    #[arg(long, value_enum, default_value = "auto")]
    method: Method,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Method {
    Auto,
    Szego,
    Theodorsen,
}

fn parse_point(s: &str) -> Result<Vec<C64>> {
    s.split(';')
        .map(|c| {
            let (re, im) = c.split_once(',').with_context(|| format!("expected re,im in {c:?}"))?;
            Ok(C64::new(re.trim().parse()?, im.trim().parse()?))
        })
        .collect()
}

fn run_experiment(experiment: Experiment, args: &RunArgs) -> Result<ExitCode> {
    let start = Instant::now();
    let report = run_file(experiment, &args.config).with_context(|| format!("running {}", experiment.name()))?;
    report.write(&args.out)?;
    for v in &report.verdicts {
        println!("{} {}: {}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    eprintln!(
        "{}: {} rows, {} failures recorded, {:.1} s, output in {}",
        experiment.name(),
        report.table.rows.len(),
        report.failures.len(),
        start.elapsed().as_secs_f64(),
        args.out.display()
    );
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn certify(args: &CertifyArgs) -> Result<ExitCode> {
    let (z, w) = (parse_point(&args.z)?, parse_point(&args.w)?);
    let opts = UpperBoundOptions {
        nodes: args.nodes,
        ..UpperBoundOptions::default()
    };
    let (domain, ball): (Option<_>, Option<Ball>) = match (&args.domain, args.ball) {
        (Some(p), None) => (Some(build_domain(&DomainSpec::load(p)?)?), None),
        (None, Some(n)) => (None, Some(Ball::new(n)?)),
        _ => bail!("give exactly one of --domain and --ball"),
    };
    let ambient: &dyn AmbientDomain = match (&domain, &ball) {
        (Some(d), _) => d,
        (_, Some(b)) => b,
        _ => unreachable!(),
    };
    if z.len() != ambient.dimension() || w.len() != z.len() {
        bail!("points must have {} coordinates", ambient.dimension());
    }
    let nearest = |p: &[C64]| -> Vec<C64> {
        match &domain {
            Some(d) => vec![d.curve().point(d.nearest(p[0]).t)],
            None => {
                let n = norm(p);
                p.iter().map(|c| c / n).collect()
            }
        }
    };
    let a = args.a.as_deref().map(parse_point).transpose()?.unwrap_or_else(|| nearest(&z));
    let b = args.b.as_deref().map(parse_point).transpose()?.unwrap_or_else(|| nearest(&w));
    let (_, cert) = lempert_upper_bound_with(ambient, &z, &w, &a, &b, &opts)?;
    let oracle = match &domain {
        Some(d) => {
            let map = build_riemann_map_with(d, AmbientDomain::deepest_point(d)[0], &MapOptions::default())?;
            lempert_planar_full(&map, z[0], w[0]).ok()
        }
        None => lempert_ball_full(&z, &w).ok(),
    };
    let out = serde_json::json!({
        "certificate": cert,
        "oracle": oracle.map(|l| l.value),
    });
    let text = serde_json::to_string_pretty(&out)?;
    match &args.out {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(if cert.bound_holds { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn map_export(args: &MapExportArgs) -> Result<ExitCode> {
    let domain = build_domain(&DomainSpec::load(&args.domain)?)?;
    let center = parse_point(&args.center)?;
    if center.len() != 1 {
        bail!("the centre is a single complex number");
    }
    let method = match args.method {
        Method::Auto => MapMethod::Auto,
        Method::Szego => MapMethod::Szego,
        Method::Theodorsen => MapMethod::Theodorsen,
    };
    let map = build_riemann_map_with(&domain, center[0], &MapOptions { method, nodes: None })?;
    map.export_correspondence(args.points, &args.out)?;
    eprintln!("{} map, {} points written to {}", map.method(), args.points, args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Example4(a) => run_experiment(Experiment::Example4, a),
        Command::Theorem1(a) => run_experiment(Experiment::Theorem1, a),
        Command::Proposition2(a) => run_experiment(Experiment::Proposition2, a),
        Command::Estimates(a) => run_experiment(Experiment::Estimates, a),
        Command::Certify(a) => certify(a),
        Command::MapExport(a) => map_export(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
