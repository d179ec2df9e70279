use std::ffi::OsString;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acceptance;
use crate::format::{coords, Cell, Table};
use crate::range::{parse_coords, parse_grid, parse_u32_list, parse_window};
use mfdm_gallery::{
    gallery_appendix_a, gallery_h_gt_q, gallery_one_point, gallery_q_gt_h, minimal_m, ring_atoms_for, MeasureDef,
};
use mfdm_geometry::{cone_mass_ratio, por_measure, por_set, random_frames, Cone, HoleDomain, PorosityQuery};
use mfdm_homogeneity::{counting_measure, hom_count_atomic, hom_delta_profile, HomogeneityQuery, ProfileSettings};
use mfdm_measures::Measure;
use mfdm_metric::{Error as MathError, Point};
use mfdm_moran::{exact_spectrum, solve_tau, spectrum_point, validate_moran, SelfSimilarSpec};
use mfdm_spectrum::{
    curve_alphas, default_q_grid, dimension_report_on, entropy_dim_on, ladder, legendre, spectrum_curve_on, Backend,
};

// Aliases keep clap from reading a parsed list as repeated scalar values.
type Values = Vec<f64>;
type Ids = Vec<u32>;

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// A command line that parsed but does not make sense.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// Some validation or acceptance check did not hold.
#[derive(Debug)]
pub struct ChecksFailed(pub usize);

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} check(s) failed", self.0)
    }
}

impl std::error::Error for ChecksFailed {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Usage(msg.into()))
}

#[derive(Debug, Parser)]
#[command(name = "mfdm", version, about = "Multifractal and homogeneity analysis of finite measures")]
#[command(args_conflicts_with_subcommands = true)]
pub struct Cli {
    /// Seed for every random choice (sample points, frames, rotations).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the CSV here instead of stdout; the manifest goes to <OUT>.manifest.json.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Manifest path when the CSV goes to stdout.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// Worker threads for grid sweeps. Output order does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Re-run the command recorded in a manifest.
    #[arg(long)]
    pub replay: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MeasureArgs {
    /// Measure definition JSON (path, or - for stdin).
    #[arg(long, short = 'm')]
    pub measure: String,
    /// Override the depth of a selfsimilar or appendix-a definition.
    #[arg(long)]
    pub depth: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// Query point, comma-separated coordinates (repeatable).
    #[arg(long = "at", value_parser = parse_coords, allow_hyphen_values = true)]
    pub at: Vec<Vec<f64>>,
    /// Add this many support points drawn with --seed.
    #[arg(long, default_value_t = 0)]
    pub points: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// L^q spectrum: columns q,tau_est,tau_exact,residual,min_inc,max_inc.
    Tau {
        #[command(flatten)]
        m: MeasureArgs,
        /// q grid (a:b:step or list); default -2:4:0.25 on trees, 0:4:0.25 on atoms.
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        q: Option<Values>,
        /// Local spectrum at this point.
        #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
        at: Option<Values>,
        #[arg(long, default_value_t = 1e-3)]
        radius: f64,
        /// Ladder levels a:b used by the fit.
        #[arg(long, value_parser = parse_window)]
        window: Option<(usize, usize)>,
    },
    /// Local dimensions: columns x,ldim_ball,udim_ball,ldim_part,udim_part,ball_slope,part_slope,entropy_lower,entropy_upper.
    Dim {
        #[command(flatten)]
        m: MeasureArgs,
        #[command(flatten)]
        p: PointArgs,
        #[arg(long, default_value_t = 1e-3)]
        radius: f64,
        #[arg(long, value_parser = parse_window)]
        window: Option<(usize, usize)>,
    },
    /// Entropy dimension: columns x,r,lower,upper,slope. Global without --at.
    Entropy {
        #[command(flatten)]
        m: MeasureArgs,
        #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
        at: Option<Values>,
        #[arg(long, default_value_t = 1e-3)]
        radius: f64,
        #[arg(long, value_parser = parse_window)]
        window: Option<(usize, usize)>,
    },
    /// Homogeneity profile: columns x,delta,count,epsilon,r,exact,stable,min_count,slope.
    Homog {
        #[command(flatten)]
        m: MeasureArgs,
        #[command(flatten)]
        p: PointArgs,
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "0.25,0.125,0.0625,0.03125")]
        delta: Values,
        /// Largest radius of the default halving radius grid.
        #[arg(long, default_value_t = 0.1)]
        r0: f64,
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        radii: Option<Values>,
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        epsilons: Option<Values>,
        #[arg(long, default_value_t = mfdm_homogeneity::DEFAULT_GAMMA)]
        gamma: f64,
    },
    /// Porosity: columns x,r,k,mode,epsilon,rho,exact,threshold. Set porosity without --epsilon.
    Porosity {
        #[command(flatten)]
        m: MeasureArgs,
        #[command(flatten)]
        p: PointArgs,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = mfdm_geometry::DEFAULT_FRAMES)]
        frames: usize,
        /// Let hole centres leave the bounding box of the support.
        #[arg(long)]
        ambient: bool,
    },
    /// Cone mass ratio: columns frame,ratio. Frame 0 is the cone as given.
    Cone {
        #[command(flatten)]
        m: MeasureArgs,
        #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
        apex: Values,
        #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
        theta: Values,
        /// Basis vector of V (repeatable).
        #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
        basis: Vec<Vec<f64>>,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        radius: f64,
        /// Extra random rotations of the cone about its apex.
        #[arg(long, default_value_t = 0)]
        rotations: usize,
    },
    /// Spectrum curve: columns q,tau,alpha,f,tau_exact,alpha_exact,f_exact.
    Spectrum {
        #[command(flatten)]
        m: MeasureArgs,
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        q: Option<Values>,
        #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
        at: Option<Values>,
        #[arg(long, default_value_t = 1e-3)]
        radius: f64,
        #[arg(long, value_parser = parse_window)]
        window: Option<(usize, usize)>,
    },
    /// Legendre transform of the sampled curve: columns alpha,f,q,boundary,f_exact.
    Legendre {
        #[command(flatten)]
        m: MeasureArgs,
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        alpha: Values,
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        q: Option<Values>,
        #[arg(long, value_parser = parse_window)]
        window: Option<(usize, usize)>,
    },
    /// Print the definition of a gallery measure as JSON.
    Example {
        /// dirac-cascade, dirac-lebesgue, h-gt-q, q-gt-h, one-point, rings, appendix-a or selfsimilar.
        name: String,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        stages: Option<usize>,
        #[arg(long, value_parser = parse_u32_list)]
        schedule: Option<Ids>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        atoms: Option<usize>,
        #[arg(long)]
        rings: Option<usize>,
        #[arg(long)]
        atoms_per_ring: Option<usize>,
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        ratios: Option<Values>,
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        weights: Option<Values>,
    },
    /// Check the construction behind a definition: columns check,subject,value,expected,pass.
    Validate {
        /// Measure definition JSON (path, or - for stdin).
        #[arg(long, short = 'm', default_value = "-")]
        measure: String,
    },
    /// Run the acceptance criteria: columns id,criterion,pass,seconds,detail.
    Report {
        /// Criterion ids, comma-separated; all by default.
        #[arg(long, value_parser = parse_u32_list)]
        only: Option<Ids>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Tau { .. } => "tau",
            Command::Dim { .. } => "dim",
            Command::Entropy { .. } => "entropy",
            Command::Homog { .. } => "homog",
            Command::Porosity { .. } => "porosity",
            Command::Cone { .. } => "cone",
            Command::Spectrum { .. } => "spectrum",
            Command::Legendre { .. } => "legendre",
            Command::Example { .. } => "example",
            Command::Validate { .. } => "validate",
            Command::Report { .. } => "report",
        }
    }
}

/// Record of one run, written next to the CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name, without output options.
    pub argv: Vec<String>,
    pub seed: u64,
    pub jobs: usize,
    /// The measure definition actually analysed, after overrides.
    pub measure: Option<MeasureDef>,
    pub columns: Vec<String>,
    pub rows: usize,
    pub summary: serde_json::Value,
    /// FNV-1a of the emitted bytes.
    pub output_fnv1a: String,
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf29ce484222325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

struct Output {
    text: String,
    columns: Vec<String>,
    rows: usize,
    measure: Option<MeasureDef>,
    summary: serde_json::Value,
    failed: usize,
}

impl Output {
    fn table(t: Table, measure: Option<MeasureDef>, summary: serde_json::Value) -> Self {
        Output {
            text: t.to_csv(),
            columns: t.columns.iter().map(|c| c.to_string()).collect(),
            rows: t.rows.len(),
            measure,
            summary,
            failed: 0,
        }
    }
}

/// Parse, run and report; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let rest: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(cli, rest) {
        Ok(0) => EXIT_OK,
        Ok(_) => EXIT_NUMERIC,
        Err(e) => {
            eprintln!("mfdm: {e:#}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &anyhow::Error) -> i32 {
    for cause in e.chain() {
        if cause.is::<Usage>() {
            return EXIT_USAGE;
        }
        if cause.is::<ChecksFailed>() {
            return EXIT_NUMERIC;
        }
        if let Some(m) = cause.downcast_ref::<MathError>() {
            return if m.is_domain_like() { EXIT_DOMAIN } else { EXIT_NUMERIC };
        }
    }
    EXIT_DOMAIN
}

/// Drop output options so a manifest replays to wherever the caller asks.
fn replay_argv(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
            continue;
        }
        if a == "--out" || a == "--manifest" || a == "--replay" {
            skip = true;
            continue;
        }
        if a.starts_with("--out=") || a.starts_with("--manifest=") || a.starts_with("--replay=") {
            continue;
        }
        out.push(a.clone());
    }
    out
}

fn execute(cli: Cli, rest: Vec<String>) -> Result<usize> {
    let (command, argv, recorded, seed, jobs) = match (cli.replay, cli.command) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let man: Manifest = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            let mut args = vec!["mfdm".to_string()];
            args.extend(man.argv.iter().cloned());
            let again = Cli::try_parse_from(&args).map_err(|e| usage(format!("manifest argv: {e}")))?;
            let cmd = again.command.ok_or_else(|| usage("the manifest records no subcommand"))?;
            (cmd, man.argv, man.measure, again.seed, again.jobs)
        }
        (None, Some(cmd)) => (cmd, replay_argv(&rest), None, cli.seed, cli.jobs),
        (None, None) => return Err(usage("a subcommand or --replay is required (see --help)")),
    };
    if jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().context("building the thread pool")?;
    let name = command.name();
    let out = pool.install(|| dispatch(command, recorded, seed))?;

    match &cli.out {
        Some(p) => std::fs::write(p, &out.text).with_context(|| format!("writing {}", p.display()))?,
        None => {
            use std::io::Write;
            let mut so = std::io::stdout().lock();
            match so.write_all(out.text.as_bytes()).and_then(|_| so.flush()) {
                // a closed reader (e.g. `| head`) is not an error
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                r => r.context("writing to stdout")?,
            }
        }
    }
    let man_path = cli.manifest.clone().or_else(|| cli.out.as_ref().map(|p| manifest_path(p)));
    if let Some(mp) = man_path {
        let man = Manifest {
            tool: "mfdm".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: name.into(),
            argv,
            seed,
            jobs,
            measure: out.measure.clone(),
            columns: out.columns.clone(),
            rows: out.rows,
            summary: out.summary.clone(),
            output_fnv1a: format!("{:016x}", fnv1a(out.text.as_bytes())),
        };
        let json = serde_json::to_string_pretty(&man)? + "\n";
        std::fs::write(&mp, json).with_context(|| format!("writing {}", mp.display()))?;
    }
    if out.failed > 0 {
        eprintln!("mfdm: {}", ChecksFailed(out.failed));
    }
    Ok(out.failed)
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn read_def(src: &str) -> Result<MeasureDef> {
    let text = if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading the measure from stdin")?;
        s
    } else {
        std::fs::read_to_string(src).with_context(|| format!("reading {src}"))?
    };
    serde_json::from_str(&text).with_context(|| format!("malformed measure definition in {src}"))
}

fn load(args: &MeasureArgs, recorded: &Option<MeasureDef>) -> Result<(MeasureDef, Measure)> {
    let mut def = match recorded {
        Some(d) => d.clone(),
        None => read_def(&args.measure)?,
    };
    if let Some(d) = args.depth {
        match &mut def {
            MeasureDef::SelfSimilar { depth, .. } | MeasureDef::AppendixA { depth } => *depth = d,
            other => return Err(usage(format!("--depth does not apply to a {} measure", other.name()))),
        }
    }
    let m = def.build().with_context(|| format!("building the {} measure", def.name()))?;
    Ok((def, m))
}

fn selfsimilar_spec(def: &MeasureDef) -> Option<SelfSimilarSpec> {
    match def {
        MeasureDef::SelfSimilar { ratios, weights, .. } => SelfSimilarSpec::new(ratios.clone(), weights.clone()).ok(),
        _ => None,
    }
}

/// Coordinates of a support point: atom coordinates or a leaf representative.
fn support_points(m: &Measure, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match m {
        Measure::Tree(t) => {
            if !t.is_embedded() {
                bail!(MathError::Unsupported("an abstract tree has no point coordinates".into()));
            }
            let leaves = t.leaves();
            Ok((0..n).map(|_| vec![t.cell(leaves[rng.gen_range(0..leaves.len())]).rep]).collect())
        }
        Measure::Atomic(a) => (0..n)
            .map(|_| {
                let i = rng.gen_range(0..a.len());
                a.space()
                    .coords(i)
                    .map(|c| c.to_vec())
                    .ok_or_else(|| anyhow!(MathError::Unsupported("sample points need coordinates".into())))
            })
            .collect(),
    }
}

fn query_points(p: &PointArgs, m: &Measure, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut pts = p.at.clone();
    pts.extend(support_points(m, p.points, seed)?);
    if pts.is_empty() {
        return Err(usage("give --at and/or --points"));
    }
    Ok(pts)
}

fn dispatch(cmd: Command, recorded: Option<MeasureDef>, seed: u64) -> Result<Output> {
    use serde_json::json;
    match cmd {
        Command::Tau { m, q, at, radius, window } => {
            let (def, meas) = load(&m, &recorded)?;
            let backend = Backend::of(&meas);
            let qs = q.unwrap_or_else(|| default_q_grid(backend));
            let l = ladder(&meas)?;
            let exact = selfsimilar_spec(&def);
            let centre = at.as_deref().map(|x| (x, radius));
            let rows: Vec<Vec<Cell>> = qs
                .par_iter()
                .map(|&q| -> Result<Vec<Cell>> {
                    let s = spectrum_curve_on(&l, backend, centre, &[q], window)?.samples[0];
                    let ex = exact.as_ref().map(|sp| solve_tau(sp, q)).transpose()?;
                    Ok(vec![q.into(), s.tau.into(), ex.into(), s.residual.into(), s.min_inc.into(), s.max_inc.into()])
                })
                .collect::<Result<_>>()?;
            let mut t = Table::new(&["q", "tau_est", "tau_exact", "residual", "min_inc", "max_inc"]);
            rows.into_iter().for_each(|r| t.push(r));
            Ok(Output::table(t, Some(def), json!({ "backend": backend.name(), "local": at.is_some() })))
        }
        Command::Dim { m, p, radius, window } => {
            let (def, meas) = load(&m, &recorded)?;
            let pts = query_points(&p, &meas, seed)?;
            let l = ladder(&meas)?;
            let rows: Vec<Vec<Cell>> = pts
                .par_iter()
                .map(|x| -> Result<Vec<Cell>> {
                    let r = dimension_report_on(&meas, &l, x, radius, window)?;
                    Ok(vec![
                        coords(x).into(),
                        r.ldim_ball.into(),
                        r.udim_ball.into(),
                        r.ldim_part.into(),
                        r.udim_part.into(),
                        r.ball.slope.into(),
                        r.part.slope.into(),
                        r.entropy_lower.into(),
                        r.entropy_upper.into(),
                    ])
                })
                .collect::<Result<_>>()?;
            let mut t = Table::new(&[
                "x",
                "ldim_ball",
                "udim_ball",
                "ldim_part",
                "udim_part",
                "ball_slope",
                "part_slope",
                "entropy_lower",
                "entropy_upper",
            ]);
            rows.into_iter().for_each(|r| t.push(r));
            Ok(Output::table(t, Some(def), json!({ "points": pts.len() })))
        }
        Command::Entropy { m, at, radius, window } => {
            let (def, meas) = load(&m, &recorded)?;
            let l = ladder(&meas)?;
            // without a point the ball covers everything
            let (x, r) = match at {
                Some(x) => (x, radius),
                None => (support_points(&meas, 1, seed)?.remove(0), f64::MAX),
            };
            let e = entropy_dim_on(&l, &x, r, window)?;
            let (xc, rc) = if r == f64::MAX { (Cell::Empty, Cell::Empty) } else { (coords(&x).into(), r.into()) };
            let mut t = Table::new(&["x", "r", "lower", "upper", "slope"]);
            t.push(vec![xc, rc, e.lower.into(), e.upper.into(), e.slope.into()]);
            Ok(Output::table(t, Some(def), json!({ "window": [e.window.0, e.window.1] })))
        }
        Command::Homog { m, p, delta, r0, radii, epsilons, gamma } => {
            let (def, meas) = load(&m, &recorded)?;
            let pts = query_points(&p, &meas, seed)?;
            let mut s = ProfileSettings::new(delta, r0).with_gamma(gamma);
            if let Some(r) = radii {
                s = s.with_radii(r);
            }
            if let Some(e) = epsilons {
                s = s.with_epsilons(e);
            }
            let profiles: Vec<(Vec<f64>, mfdm_homogeneity::HomogeneityProfile)> = pts
                .par_iter()
                .map(|x| Ok((x.clone(), hom_delta_profile(&meas, &Point::Coords(x.clone()), &s)?)))
                .collect::<Result<_>>()?;
            let mut t =
                Table::new(&["x", "delta", "count", "epsilon", "r", "exact", "stable", "min_count", "slope"]);
            let mut slopes = Vec::new();
            for (x, prof) in &profiles {
                let slope = prof.estimate.map(|e| e.slope);
                slopes.push(slope);
                for e in &prof.entries {
                    t.push(vec![
                        coords(x).into(),
                        e.delta.into(),
                        e.count.into(),
                        e.epsilon.into(),
                        e.r.into(),
                        e.exact.into(),
                        e.stable.into(),
                        e.min_count.into(),
                        slope.into(),
                    ]);
                }
            }
            Ok(Output::table(t, Some(def), json!({ "gamma": gamma, "slopes": slopes })))
        }
        Command::Porosity { m, p, r, k, epsilon, frames, ambient } => {
            let (def, meas) = load(&m, &recorded)?;
            let pts = query_points(&p, &meas, seed)?;
            let domain = if ambient { HoleDomain::Ambient } else { HoleDomain::SupportBox };
            let rows: Vec<Vec<Cell>> = pts
                .par_iter()
                .map(|x| -> Result<Vec<Cell>> {
                    let base = match epsilon {
                        Some(e) => PorosityQuery::measure(Point::Coords(x.clone()), r, k, e),
                        None => PorosityQuery::set(Point::Coords(x.clone()), r, k),
                    };
                    let q = base.with_domain(domain).with_frames(frames).with_seed(seed);
                    let res = match epsilon {
                        Some(_) => por_measure(&meas, &q)?,
                        None => por_set(meas.to_atomic()?.space(), &q)?,
                    };
                    Ok(vec![
                        coords(x).into(),
                        r.into(),
                        k.into(),
                        (if epsilon.is_some() { "measure" } else { "set" }).into(),
                        epsilon.into(),
                        res.rho.into(),
                        res.exact.into(),
                        res.threshold.into(),
                    ])
                })
                .collect::<Result<_>>()?;
            let mut t = Table::new(&["x", "r", "k", "mode", "epsilon", "rho", "exact", "threshold"]);
            rows.into_iter().for_each(|r| t.push(r));
            Ok(Output::table(t, Some(def), json!({ "frames": frames, "ambient": ambient })))
        }
        Command::Cone { m, apex, theta, basis, alpha, radius, rotations } => {
            let (def, meas) = load(&m, &recorded)?;
            let cone = Cone::new(basis, theta, alpha, apex.clone(), radius)?;
            let mut cones = vec![cone.clone()];
            for rot in random_frames(apex.len(), rotations, seed) {
                cones.push(cone.rotated(&rot)?);
            }
            let ratios: Vec<f64> = cones.par_iter().map(|c| Ok(cone_mass_ratio(&meas, c)?)).collect::<Result<_>>()?;
            let mut t = Table::new(&["frame", "ratio"]);
            for (i, r) in ratios.iter().enumerate() {
                t.push(vec![i.into(), (*r).into()]);
            }
            let spread = ratios.iter().map(|r| (r - ratios[0]).abs()).fold(0.0, f64::max);
            Ok(Output::table(t, Some(def), json!({ "rotation_spread": spread })))
        }
        Command::Spectrum { m, q, at, radius, window } => {
            let (def, meas) = load(&m, &recorded)?;
            let backend = Backend::of(&meas);
            let qs = q.unwrap_or_else(|| default_q_grid(backend));
            let l = ladder(&meas)?;
            let c = spectrum_curve_on(&l, backend, at.as_deref().map(|x| (x, radius)), &qs, window)?;
            let alphas = curve_alphas(&c);
            let exact = selfsimilar_spec(&def);
            let mut t = Table::new(&["q", "tau", "alpha", "f", "tau_exact", "alpha_exact", "f_exact"]);
            for s in &c.samples {
                let a = alphas.iter().find(|(q, _)| *q == s.q).map(|v| v.1);
                let (te, ae, fe) = match &exact {
                    Some(sp) => {
                        let (ae, fe) = spectrum_point(sp, s.q)?;
                        (Some(solve_tau(sp, s.q)?), Some(ae), Some(fe))
                    }
                    None => (None, None, None),
                };
                t.push(vec![
                    s.q.into(),
                    s.tau.into(),
                    a.into(),
                    a.map(|a| s.q * a - s.tau).into(),
                    te.into(),
                    ae.into(),
                    fe.into(),
                ]);
            }
            let conc = c.concavity_violations(1e-6).len();
            Ok(Output::table(t, Some(def), json!({ "concavity_violations": conc, "backend": backend.name() })))
        }
        Command::Legendre { m, alpha, q, window } => {
            let (def, meas) = load(&m, &recorded)?;
            let backend = Backend::of(&meas);
            let qs = q.unwrap_or_else(|| default_q_grid(backend));
            let l = ladder(&meas)?;
            let c = spectrum_curve_on(&l, backend, None, &qs, window)?;
            let pts = legendre(&c, &alpha)?;
            let exact = match selfsimilar_spec(&def) {
                Some(sp) => {
                    let (lo, hi) = mfdm_moran::alpha_range(&sp);
                    let inside: Vec<f64> = alpha.iter().copied().filter(|a| *a >= lo && *a <= hi).collect();
                    let vals = exact_spectrum(&sp, &inside)?;
                    Some(inside.into_iter().zip(vals.into_iter().map(|v| v.1)).collect::<Vec<_>>())
                }
                None => None,
            };
            let mut t = Table::new(&["alpha", "f", "q", "boundary", "f_exact"]);
            for p in pts {
                let fe = exact.as_ref().and_then(|v| v.iter().find(|(a, _)| *a == p.alpha).map(|v| v.1));
                t.push(vec![p.alpha.into(), p.f.into(), p.q.into(), p.boundary.into(), fe.into()]);
            }
            Ok(Output::table(t, Some(def), json!({ "samples": qs.len() })))
        }
        Command::Example { name, depth, stages, schedule, dim, atoms, rings, atoms_per_ring, ratios, weights } => {
            let def = match name.as_str() {
                "dirac-cascade" => {
                    MeasureDef::DiracCascade { schedule: schedule.unwrap_or_else(|| vec![1, 2, 16]), dim: dim.unwrap_or(1) }
                }
                "dirac-lebesgue" => MeasureDef::DiracLebesgue { n_atoms: atoms.unwrap_or(4096) },
                "h-gt-q" => MeasureDef::HGtQ { stages: stages.unwrap_or(3) },
                "q-gt-h" => MeasureDef::QGtH { stages: stages.unwrap_or(2) },
                "one-point" => MeasureDef::OnePoint { stages: stages.unwrap_or(2) },
                "rings" => MeasureDef::Rings {
                    rings: rings.unwrap_or(13),
                    atoms_per_ring: match atoms_per_ring {
                        Some(n) => n,
                        None => ring_atoms_for(1.0 / 32.0)?,
                    },
                },
                "appendix-a" => MeasureDef::AppendixA { depth: depth.unwrap_or(3) },
                "selfsimilar" => MeasureDef::SelfSimilar {
                    ratios: ratios.unwrap_or_else(|| vec![1.0 / 3.0, 1.0 / 3.0]),
                    weights: weights.unwrap_or_else(|| vec![0.7, 0.3]),
                    depth: depth.unwrap_or(12),
                },
                other => return Err(usage(format!("unknown example '{other}'"))),
            };
            // fail early on parameters the generator rejects
            def.build().with_context(|| format!("building the {name} example"))?;
            let text = serde_json::to_string(&def)? + "\n";
            Ok(Output { text, columns: Vec::new(), rows: 0, measure: Some(def), summary: json!({}), failed: 0 })
        }
        Command::Validate { measure } => {
            let def = match recorded {
                Some(d) => d,
                None => read_def(&measure)?,
            };
            let t = validate(&def)?;
            let failed = t.rows.iter().filter(|r| r.last() == Some(&Cell::Bool(false))).count();
            let mut out = Output::table(t, Some(def), json!({ "failed": failed }));
            out.failed = failed;
            Ok(out)
        }
        Command::Report { only } => {
            let ids: Vec<u8> = match only {
                Some(v) => v.into_iter().map(|i| i as u8).collect(),
                None => acceptance::CRITERIA.iter().map(|c| c.0).collect(),
            };
            if let Some(bad) = ids.iter().find(|&&i| !(1..=12).contains(&i)) {
                return Err(usage(format!("no acceptance criterion {bad}")));
            }
            let outcomes: Vec<acceptance::Outcome> = ids.par_iter().map(|&i| acceptance::run(i, seed)).collect();
            let mut t = Table::new(&["id", "criterion", "pass", "seconds", "detail"]);
            for o in &outcomes {
                eprintln!("{}", o.line());
                t.push(vec![(o.id as usize).into(), o.title.into(), o.pass.into(), o.seconds.into(), o.detail.clone().into()]);
            }
            let failed = outcomes.iter().filter(|o| !o.pass).count();
            let mut out = Output::table(t, None, json!({ "failed": failed }));
            out.failed = failed;
            Ok(out)
        }
    }
}

fn check_row(t: &mut Table, check: &str, subject: String, value: f64, expected: impl Into<Cell>, pass: bool) {
    t.push(vec![check.into(), subject.into(), value.into(), expected.into(), pass.into()]);
}

/// Construction-specific checks behind `validate`.
pub fn validate(def: &MeasureDef) -> Result<Table> {
    let mut t = Table::new(&["check", "subject", "value", "expected", "pass"]);
    match def {
        MeasureDef::AppendixA { depth } => {
            let a = gallery_appendix_a(*depth)?;
            let tm = a.measure.total_mass();
            check_row(&mut t, "total-mass", "measure".into(), tm, 1.0, (tm - 1.0).abs() <= 1e-12);
            for r in a.ratio_rows()? {
                let word: Vec<String> =
                    a.space().word(r.atom).unwrap_or_default().iter().map(|s| s.to_string()).collect();
                let subject = format!("word {} n={}", word.join("."), r.n);
                let ok = (r.cylinder_ratio - r.formula).abs() <= 1e-12;
                check_row(&mut t, "cylinder-ratio", subject.clone(), r.cylinder_ratio, r.formula, ok);
                // A misses the cylinder words with a zero further down
                let tail: f64 = (r.n + 1..=*depth).map(|m| 1.0 - 0.5f64.powi(m as i32)).product();
                let want = tail * r.formula;
                check_row(&mut t, "set-ratio", subject, r.set_ratio, want, (r.set_ratio - want).abs() <= 1e-12);
            }
        }
        MeasureDef::SelfSimilar { ratios, weights, depth } => {
            let spec = SelfSimilarSpec::new(ratios.clone(), weights.clone())?;
            let tree = mfdm_gallery::gallery_selfsimilar(ratios, weights, *depth)?;
            let v = validate_moran(&tree, Some(&spec))?;
            for c in &v.checks {
                check_row(&mut t, c.name, c.witness.clone().unwrap_or_default(), c.value, Cell::Empty, c.pass);
            }
            for q in [-1.0, 0.0, 2.0] {
                let tau = solve_tau(&spec, q)?;
                let res = mfdm_moran::tau_residual(&spec, q, tau);
                check_row(&mut t, "pressure-residual", format!("q={q}"), res, 0.0, res.abs() <= 1e-10);
            }
        }
        MeasureDef::HGtQ { stages } => {
            let b = gallery_h_gt_q(*stages)?;
            for s in &b.stages {
                check_row(&mut t, "count-ratio", format!("stage {}", s.k), s.ratio, s.epsilon, s.ratio < s.epsilon);
            }
        }
        MeasureDef::QGtH { stages } => {
            let p = gallery_q_gt_h(*stages)?;
            for s in &p.stages {
                let worst = p.designed_ratios(s.k as usize)?.into_iter().fold(f64::INFINITY, f64::min);
                check_row(&mut t, "designed-level", format!("stage {}", s.k), worst, s.target, worst > s.target);
                let m = minimal_m(s.k, s.start_exp, s.min_mass)?;
                check_row(&mut t, "minimal-m", format!("stage {}", s.k), s.m as f64, m as f64, m == s.m);
            }
        }
        MeasureDef::OnePoint { stages } => {
            let op = gallery_one_point(*stages)?;
            let x = Point::Coords(vec![0.0]);
            for s in &op.stages {
                let k = s.k as i32;
                for n in k..=*stages as i32 {
                    let eps = 0.5f64.powi(k) * s.sqrt_lambda() / 2.0;
                    let q = HomogeneityQuery::new(x.clone(), s.lambda / 3.0, eps, 10f64.powi(-n))?;
                    let h = hom_count_atomic(&op.measure, &q)?;
                    let want = s.inv_sqrt as f64;
                    let subject = format!("k={} n={n}", s.k);
                    check_row(&mut t, "lower-count", subject.clone(), h.count as f64, want, h.exact && h.count as f64 >= want);
                    let q = HomogeneityQuery::new(x.clone(), 2.0 * s.sqrt_lambda(), 1e-12, 10f64.powi(-n))?;
                    let h = hom_count_atomic(&op.measure, &q)?;
                    let bound = s.lambda.powf(-0.125);
                    check_row(&mut t, "upper-count", subject, h.count as f64, bound, h.exact && h.count as f64 <= bound + 1e-9);
                }
            }
        }
        other => {
            let m = other.build()?;
            let tm = m.total_mass();
            check_row(&mut t, "total-mass", other.name().into(), tm, Cell::Empty, tm.is_finite() && tm > 0.0);
            let atoms = counting_measure(&m)?.len();
            check_row(&mut t, "atoms", other.name().into(), atoms as f64, Cell::Empty, atoms > 0);
        }
    }
    Ok(t)
}
