//! The `swk` command-line front end.
//!
//! Every command resolves a [`RunConfig`] (defaults, then `--config`, then
//! flags), writes its outputs into `--out`, and maps errors to exit codes:
//! 0 success, 2 usage or input error, 3 verification failure, 4 resource
//! limit, 1 internal failure.

pub mod config;
pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::battery::battery;
use crate::dynamics::{
    arc_state, evolve, finding_distribution, local_state, localization_verdict, random_local_state, start_vertex,
    time_averaged_return, Convention, NORM_TOL, SUPPORT_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::graph::{save_graph, GraphSpec};
use crate::linalg::C64;
use crate::mapping::{full_spectrum_check, spectrum_report, MappingVerdict, SubspaceDims};
use crate::operators::{build_instance, export_operators, identity_suite, BuildOptions, IdentityReport, Instance};
use crate::sierpinski::{
    compare_finite_level, coverage_sweep, generate_spectral_set, map_to_unitary_spectrum, verify_closure,
    CoverageReport, CLOSURE_TOL,
};
pub use config::RunConfig;
use output::{num, point_records, records, EigenRecord, Writer};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAIL: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

/// Size of the perturbation added to `U[0, 1]` by `--inject-corruption`.
pub const CORRUPTION: f64 = 1e-3;

/// Number of consecutive windows the return series is averaged over.
pub const RETURN_WINDOWS: usize = 4;

#[derive(Parser, Debug)]
#[command(
    name = "swk",
    version,
    about = "Szegedy walk operators, discriminant spectra, mapping verification, Sierpinski spectral sets and walk dynamics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct Common {
    /// TOML run configuration; flags given on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, short = 'o', global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for random initial states.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Arc count above which operators are stored sparsely.
    #[arg(long, global = true)]
    pub dense_limit: Option<usize>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    pub plot: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eigenvalues of U and T and the subspace dimensions.
    Spectrum {
        /// Graph spec, e.g. `cycle:5`, `torus:d=2,side=3`, `file:g.txt`.
        #[arg(long)]
        graph: Option<GraphSpec>,
    },
    /// Operator identities and the full spectral mapping check.
    Verify {
        /// Graph spec; repeat for several instances.
        #[arg(long)]
        graph: Vec<GraphSpec>,
        /// Named battery of instances (`acceptance`, `small`).
        #[arg(long)]
        battery: Option<String>,
        /// Worker threads for independent instances.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: Option<u64>,
        /// Perturb U before checking (negative control).
        #[arg(long, hide = true)]
        inject_corruption: bool,
    },
    /// Sierpinski spectral set, its unit-circle image and finite-level coverage.
    Sierpinski {
        /// Lattice dimension (at least 2).
        #[arg(long)]
        d: Option<usize>,
        /// Preimage depth.
        #[arg(long)]
        depth: Option<usize>,
        /// Compare with the discriminant spectrum of this finite level.
        #[arg(long)]
        compare_level: Option<usize>,
        /// Coverage radius.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Coverage for all levels up to --compare-level and all depths up to --depth.
        #[arg(long, requires = "compare_level")]
        sweep: bool,
    },
    /// Walk evolution, finding probabilities and the time-averaged return.
    Dynamics {
        /// Graph spec.
        #[arg(long)]
        graph: Option<GraphSpec>,
        /// Number of walk steps.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        steps: Option<u64>,
        /// Start on a single arc.
        #[arg(long, conflicts_with = "start_vertex")]
        start_arc: Option<usize>,
        /// Start localized at a vertex; without either flag a seeded random vertex is used.
        #[arg(long)]
        start_vertex: Option<usize>,
        /// Localization floor for the second-half return average.
        #[arg(long)]
        floor: Option<f64>,
        /// Vertex an arc is attributed to: `terminus` or `origin`.
        #[arg(long)]
        convention: Option<Convention>,
        /// Record every n-th state in the trajectory file.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        thin: Option<u64>,
    },
    /// Operators as Matrix Market files, plus the graph file.
    Export {
        /// Graph spec.
        #[arg(long)]
        graph: Option<GraphSpec>,
        /// File name stem.
        #[arg(long)]
        name: Option<String>,
    },
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_)
        | Error::Parse { .. }
        | Error::Domain(_)
        | Error::Dimension(_)
        | Error::NotCoisometry { .. }
        | Error::NotInvolution { .. }
        | Error::Io(_) => EXIT_USAGE,
        Error::ResourceLimit(_) => EXIT_RESOURCE,
        _ => EXIT_INTERNAL,
    }
}

pub fn execute(cli: Cli) -> Result<i32> {
    let config = resolve(&cli)?;
    match config.command.as_str() {
        "spectrum" => cmd_spectrum(&config),
        "verify" => cmd_verify(&config),
        "sierpinski" => cmd_sierpinski(&config),
        "dynamics" => cmd_dynamics(&config),
        "export" => cmd_export(&config),
        other => Err(Error::InvalidParameter(format!("unknown command '{other}'"))),
    }
}

/// Defaults, then the config file, then command-line flags.
pub fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut c = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let common = &cli.common;
    if let Some(out) = &common.out {
        c.out_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        c.seed = seed;
    }
    if let Some(limit) = common.dense_limit {
        c.dense_limit = limit;
    }
    c.plot |= common.plot;
    let single = |c: &mut RunConfig, graph: &Option<GraphSpec>| {
        if let Some(g) = graph {
            c.graphs = vec![g.clone()];
        }
    };
    match &cli.command {
        Command::Spectrum { graph } => {
            c.command = "spectrum".into();
            single(&mut c, graph);
        }
        Command::Verify {
            graph,
            battery,
            jobs,
            inject_corruption,
        } => {
            c.command = "verify".into();
            if !graph.is_empty() {
                c.graphs = graph.clone();
            }
            if battery.is_some() {
                c.battery = battery.clone();
            }
            if let Some(j) = jobs {
                c.jobs = *j as usize;
            }
            c.inject_corruption |= inject_corruption;
        }
        Command::Sierpinski {
            d,
            depth,
            compare_level,
            epsilon,
            sweep,
        } => {
            c.command = "sierpinski".into();
            let s = &mut c.sierpinski;
            s.d = d.unwrap_or(s.d);
            s.depth = depth.unwrap_or(s.depth);
            s.compare_level = compare_level.or(s.compare_level);
            s.epsilon = epsilon.unwrap_or(s.epsilon);
            s.sweep |= sweep;
        }
        Command::Dynamics {
            graph,
            steps,
            start_arc,
            start_vertex,
            floor,
            convention,
            thin,
        } => {
            c.command = "dynamics".into();
            single(&mut c, graph);
            let dy = &mut c.dynamics;
            if let Some(s) = steps {
                dy.steps = *s as usize;
            }
            if start_arc.is_some() || start_vertex.is_some() {
                dy.start_arc = *start_arc;
                dy.start_vertex = *start_vertex;
            }
            dy.floor = floor.unwrap_or(dy.floor);
            dy.convention = convention.unwrap_or(dy.convention);
            if let Some(t) = thin {
                dy.thin = *t as usize;
            }
        }
        Command::Export { graph, name } => {
            c.command = "export".into();
            single(&mut c, graph);
            if let Some(n) = name {
                c.export_name = n.clone();
            }
        }
    }
    validate(&c)?;
    Ok(c)
}

fn validate(c: &RunConfig) -> Result<()> {
    if c.jobs == 0 {
        return Err(Error::InvalidParameter("jobs must be at least 1".into()));
    }
    if c.dynamics.steps == 0 || c.dynamics.thin == 0 {
        return Err(Error::InvalidParameter("steps and thin must be at least 1".into()));
    }
    if c.dynamics.start_arc.is_some() && c.dynamics.start_vertex.is_some() {
        return Err(Error::InvalidParameter(
            "start_arc and start_vertex are exclusive".into(),
        ));
    }
    if c.dynamics.floor.is_nan()
        || c.dynamics.floor < 0.0
        || c.sierpinski.epsilon.is_nan()
        || c.sierpinski.epsilon < 0.0
    {
        return Err(Error::InvalidParameter("floor and epsilon must be non-negative".into()));
    }
    let t = &c.tolerances;
    for (name, v) in [
        ("construction", t.construction),
        ("eigen_residual", t.eigen_residual),
        ("cluster", t.cluster),
        ("kernel", t.kernel),
        ("matching", t.matching),
        ("boundary", t.boundary),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance {name} must be positive, got {v}"
            )));
        }
    }
    Ok(())
}

fn build_options(c: &RunConfig) -> BuildOptions {
    BuildOptions {
        dense_limit: c.dense_limit,
        tolerance: c.tolerances.construction,
    }
}

fn single_graph(c: &RunConfig) -> Result<&GraphSpec> {
    match c.graphs.as_slice() {
        [g] => Ok(g),
        [] => Err(Error::InvalidParameter(format!("{} needs --graph", c.command))),
        _ => Err(Error::InvalidParameter(format!(
            "{} takes exactly one graph",
            c.command
        ))),
    }
}

fn storage(inst: &Instance) -> &'static str {
    if inst.ops.is_sparse() {
        "sparse"
    } else {
        "dense"
    }
}

#[derive(Serialize)]
struct SpectrumResults {
    graph: String,
    dim_h: usize,
    dim_k: usize,
    storage: &'static str,
    dims: SubspaceDims,
    evolution_count: usize,
    discriminant_count: usize,
    evolution: Vec<EigenRecord>,
    discriminant: Vec<EigenRecord>,
    evolution_residual: f64,
    discriminant_residual: f64,
}

#[derive(Serialize)]
struct ResidualVerdict {
    residual_bound: f64,
    residuals_ok: bool,
}

pub fn cmd_spectrum(c: &RunConfig) -> Result<i32> {
    let spec = single_graph(c)?;
    let inst = build_instance(spec, &build_options(c))?;
    let report = spectrum_report(&inst.ops, &c.tolerances)?;
    let results = SpectrumResults {
        graph: spec.to_string(),
        dim_h: inst.ops.dim_h(),
        dim_k: inst.ops.dim_k(),
        storage: storage(&inst),
        dims: report.dims,
        evolution_count: report.evolution.total(),
        discriminant_count: report.discriminant.total(),
        evolution: records(&report.evolution),
        discriminant: records(&report.discriminant),
        evolution_residual: report.evolution_residual,
        discriminant_residual: report.discriminant_residual,
    };
    let bound = c.tolerances.eigen_residual;
    let verdict = ResidualVerdict {
        residual_bound: bound,
        residuals_ok: report.evolution_residual <= bound && report.discriminant_residual <= bound,
    };
    let mut w = Writer::new(c)?;
    let rows: Vec<String> = results
        .evolution
        .iter()
        .map(|r| ("U", r))
        .chain(results.discriminant.iter().map(|r| ("T", r)))
        .map(|(op, r)| format!("{op},{},{},{}", num(r.re), num(r.im), r.multiplicity))
        .collect();
    w.csv("spectrum.csv", "operator,re,im,multiplicity", &rows)?;
    let json = w.json("spectrum.json", &results, &verdict)?;
    if c.plot {
        w.raw(
            "spectrum.svg",
            &svg::unit_circle(&report.evolution_values, &report.discriminant_values, &results.graph),
        )?;
    }
    println!(
        "{}: {} eigenvalues of U, {} of T -> {}",
        results.graph,
        results.evolution_count,
        results.discriminant_count,
        json.display()
    );
    Ok(EXIT_OK)
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceResult {
    pub graph: String,
    pub dim_h: usize,
    pub dim_k: usize,
    pub storage: &'static str,
    pub corrupted: bool,
    pub identities: Option<IdentityReport>,
    pub mapping: Option<MappingVerdict>,
    pub error: Option<String>,
    pub pass: bool,
}

#[derive(Serialize)]
struct BatchVerdict {
    pass: bool,
    instances: usize,
    passed: usize,
    failed: Vec<String>,
}

/// Errors that stop the whole run rather than failing one instance.
fn aborts(e: &Error) -> bool {
    matches!(
        e,
        Error::ResourceLimit(_) | Error::Parse { .. } | Error::InvalidParameter(_) | Error::Io(_)
    )
}

/// Identities and the full mapping check for one instance.
pub fn verify_instance(spec: &GraphSpec, c: &RunConfig) -> Result<InstanceResult> {
    let mut inst = build_instance(spec, &build_options(c))?;
    if c.inject_corruption {
        inst.ops.corrupt_evolution(0, 1, C64::new(CORRUPTION, 0.0));
    }
    let identities = identity_suite(&inst.ops, c.tolerances.construction);
    let (mapping, error) = match full_spectrum_check(&inst.ops, &c.tolerances) {
        Ok(v) => (Some(v), None),
        Err(e) if aborts(&e) => return Err(e),
        Err(e) => (None, Some(e.to_string())),
    };
    let pass = identities.pass() && mapping.as_ref().is_some_and(|m| m.pass);
    Ok(InstanceResult {
        graph: spec.to_string(),
        dim_h: inst.ops.dim_h(),
        dim_k: inst.ops.dim_k(),
        storage: storage(&inst),
        corrupted: c.inject_corruption,
        identities: Some(identities),
        mapping,
        error,
        pass,
    })
}

fn verify_or_record(spec: &GraphSpec, c: &RunConfig) -> Result<InstanceResult> {
    match verify_instance(spec, c) {
        Err(e) if !aborts(&e) => Ok(InstanceResult {
            graph: spec.to_string(),
            dim_h: 0,
            dim_k: 0,
            storage: "none",
            corrupted: c.inject_corruption,
            identities: None,
            mapping: None,
            error: Some(e.to_string()),
            pass: false,
        }),
        other => other,
    }
}

/// Verifies every instance on `jobs` threads; results keep input order.
pub fn verify_all(specs: &[GraphSpec], c: &RunConfig) -> Result<Vec<InstanceResult>> {
    let next = AtomicUsize::new(0);
    let jobs = c.jobs.clamp(1, specs.len().max(1));
    let mut slots: Vec<Option<Result<InstanceResult>>> = (0..specs.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= specs.len() {
                            break done;
                        }
                        done.push((i, verify_or_record(&specs[i], c)));
                    }
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("verification worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots.into_iter().map(|s| s.expect("every instance visited")).collect()
}

pub fn cmd_verify(c: &RunConfig) -> Result<i32> {
    let mut specs = c.graphs.clone();
    if let Some(name) = &c.battery {
        specs.extend(battery(name)?);
    }
    if specs.is_empty() {
        return Err(Error::InvalidParameter("verify needs --graph or --battery".into()));
    }
    let results = verify_all(&specs, c)?;
    let failed: Vec<String> = results.iter().filter(|r| !r.pass).map(|r| r.graph.clone()).collect();
    let verdict = BatchVerdict {
        pass: failed.is_empty(),
        instances: results.len(),
        passed: results.len() - failed.len(),
        failed,
    };
    let mut w = Writer::new(c)?;
    let path = w.json("verdict.json", &results, &verdict)?;
    for r in results.iter().filter(|r| !r.pass) {
        eprintln!("FAIL {}", r.graph);
        if let Some(e) = &r.error {
            eprintln!("  error: {e}");
        }
        for f in r.identities.iter().flat_map(|i| i.failures()) {
            eprintln!("  identity {}: residual {:e}", f.name, f.residual);
        }
        for f in r.mapping.iter().flat_map(|m| m.failed_checks()) {
            eprintln!("  {}: {}", f.name, f.detail);
        }
    }
    println!(
        "verify: {}/{} instances pass -> {}",
        verdict.passed,
        verdict.instances,
        path.display()
    );
    Ok(if verdict.pass { EXIT_OK } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct SierpinskiResults {
    set: crate::sierpinski::SpectralSet,
    size_bound: usize,
    closure: crate::sierpinski::ClosureReport,
    unitary_image: Vec<EigenRecord>,
}

#[derive(Serialize)]
struct CoverageVerdict {
    level: usize,
    depth: usize,
    epsilon: f64,
    covered_fraction: f64,
    worst_distance: f64,
    /// Per level, whether the worst distance never grows with depth.
    worst_non_increasing: Option<Vec<(usize, bool)>>,
}

pub fn cmd_sierpinski(c: &RunConfig) -> Result<i32> {
    let s = &c.sierpinski;
    let set = generate_spectral_set(s.d, s.depth)?;
    let closure = verify_closure(&set, CLOSURE_TOL);
    let image = map_to_unitary_spectrum(&set);
    let mut w = Writer::new(c)?;
    let rows: Vec<String> = set
        .points
        .iter()
        .map(|p| {
            let seed = p.seed.map_or("isolated".to_string(), |i| i.to_string());
            format!("{},{seed},{}", num(p.value), p.level)
        })
        .collect();
    w.csv("sierpinski_set.csv", "value,seed,level", &rows)?;
    let rows: Vec<String> = image.iter().map(|z| format!("{},{}", num(z.re), num(z.im))).collect();
    w.csv("sierpinski_unitary.csv", "re,im", &rows)?;
    if c.plot {
        let pts: Vec<(f64, usize)> = set.points.iter().map(|p| (p.value, p.level)).collect();
        w.raw(
            "sierpinski.svg",
            &svg::number_line(&pts, &format!("d={} depth={}", s.d, s.depth)),
        )?;
    }
    let closure_pass = closure.pass;
    let points = set.len();
    let results = SierpinskiResults {
        size_bound: set.size_bound(),
        set,
        closure,
        unitary_image: point_records(&image),
    };
    w.json(
        "sierpinski.json",
        &results,
        serde_json::json!({ "closure_pass": closure_pass }),
    )?;
    println!("sierpinski: d={} depth={} -> {points} points", s.d, s.depth);

    if let Some(level) = s.compare_level {
        let (report, trend, sweep): (CoverageReport, _, _) = if s.sweep {
            let levels: Vec<usize> = (0..=level).collect();
            let depths: Vec<usize> = (0..=s.depth).collect();
            let sweep = coverage_sweep(s.d, &levels, &depths, s.epsilon)?;
            let last = sweep.reports.last().cloned().expect("sweep covers at least one pair");
            (last, Some(sweep.worst_non_increasing.clone()), Some(sweep))
        } else {
            (compare_finite_level(s.d, level, s.depth, s.epsilon)?, None, None)
        };
        let rows: Vec<String> = report
            .eigenvalues
            .iter()
            .map(|e| format!("{},{},{}", num(e.eigenvalue), num(e.nearest), num(e.distance)))
            .collect();
        w.csv("coverage.csv", "eigenvalue,nearest,distance", &rows)?;
        if let Some(sw) = &sweep {
            let rows: Vec<String> = sw
                .reports
                .iter()
                .map(|r| {
                    format!(
                        "{},{},{},{},{}",
                        r.level,
                        r.depth,
                        num(r.covered_fraction),
                        num(r.worst_distance),
                        num(r.mean_distance)
                    )
                })
                .collect();
            w.csv(
                "coverage_sweep.csv",
                "level,depth,covered_fraction,worst_distance,mean_distance",
                &rows,
            )?;
        }
        let verdict = CoverageVerdict {
            level: report.level,
            depth: report.depth,
            epsilon: report.epsilon,
            covered_fraction: report.covered_fraction,
            worst_distance: report.worst_distance,
            worst_non_increasing: trend,
        };
        println!(
            "coverage: level {} depth {} -> {:.4} of eigenvalues within {}",
            report.level, report.depth, report.covered_fraction, report.epsilon
        );
        w.json(
            "coverage.json",
            serde_json::json!({ "report": report, "sweep": sweep }),
            &verdict,
        )?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct DynamicsResults {
    graph: String,
    dim_h: usize,
    storage: &'static str,
    initial_state: String,
    start_vertex: usize,
    convention: Convention,
    steps: usize,
    thin: usize,
    average: f64,
    second_half_average: f64,
    window_averages: Vec<f64>,
    window_averages_non_increasing: bool,
    max_norm_deviation: f64,
    operations: usize,
}

#[derive(Serialize)]
struct DynamicsVerdict {
    localization: &'static str,
    floor: f64,
    floor_is_heuristic: bool,
    second_half_average: f64,
    norm_conserved: bool,
}

/// Means of `series` over `count` consecutive, nearly equal windows.
pub fn window_averages(series: &[f64], count: usize) -> Vec<f64> {
    let n = series.len();
    (0..count)
        .map(|k| (k * n / count, (k + 1) * n / count))
        .filter(|(a, b)| b > a)
        .map(|(a, b)| series[a..b].iter().sum::<f64>() / (b - a) as f64)
        .collect()
}

/// Non-increasing up to [`SUPPORT_THRESHOLD`], below which probabilities
/// are roundoff.
pub fn non_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|p| p[1] <= p[0] + SUPPORT_THRESHOLD)
}

pub fn cmd_dynamics(c: &RunConfig) -> Result<i32> {
    let spec = single_graph(c)?;
    let inst = build_instance(spec, &build_options(c))?;
    let graph = inst
        .graph
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter(format!("dynamics needs a graph, got {}", spec.family())))?;
    let dy = &c.dynamics;
    let conv = dy.convention;
    let (initial, vertex, psi0) = match (dy.start_arc, dy.start_vertex) {
        (Some(arc), _) => {
            let psi = arc_state(&inst.ops, arc)?;
            (format!("arc {arc}"), start_vertex(graph, &psi, conv), psi)
        }
        (None, Some(v)) => (format!("vertex {v}"), v, local_state(graph, v, conv)?),
        (None, None) => {
            let (v, psi) = random_local_state(graph, c.seed, conv)?;
            (format!("random local state, seed {}", c.seed), v, psi)
        }
    };
    let ret = time_averaged_return(&inst.ops, graph, &psi0, vertex, dy.steps, conv)?;
    let traj = evolve(&inst.ops, &psi0, dy.steps, dy.thin)?;
    let loc = localization_verdict(&ret, dy.floor);

    let mut w = Writer::new(c)?;
    let mut rows = Vec::new();
    for state in &traj.states {
        let mu = finding_distribution(graph, &state.psi, conv);
        for (v, p) in mu.probabilities.iter().enumerate() {
            rows.push(format!("{},{v},{}", state.step, num(*p)));
        }
    }
    w.csv("dynamics_trajectory.csv", "n,vertex,probability", &rows)?;
    let mut running = 0.0;
    let rows: Vec<String> = ret
        .series
        .iter()
        .enumerate()
        .map(|(k, &mu)| {
            running += mu;
            format!("{},{},{}", k + 1, num(mu), num(running / (k + 1) as f64))
        })
        .collect();
    w.csv("dynamics_return.csv", "n,return_probability,return_avg", &rows)?;

    let windows = window_averages(&ret.series, RETURN_WINDOWS);
    let max_dev = ret.max_norm_deviation.max(traj.max_norm_deviation);
    let results = DynamicsResults {
        graph: spec.to_string(),
        dim_h: inst.ops.dim_h(),
        storage: storage(&inst),
        initial_state: initial,
        start_vertex: vertex,
        convention: conv,
        steps: dy.steps,
        thin: dy.thin,
        average: ret.average,
        second_half_average: ret.second_half_average,
        window_averages_non_increasing: non_increasing(&windows),
        window_averages: windows,
        max_norm_deviation: max_dev,
        operations: ret.operations + traj.operations,
    };
    let verdict = DynamicsVerdict {
        localization: if loc.localized { "yes" } else { "no" },
        floor: loc.floor,
        floor_is_heuristic: loc.floor_is_heuristic,
        second_half_average: loc.second_half_average,
        norm_conserved: max_dev <= NORM_TOL,
    };
    w.json("dynamics.json", &results, &verdict)?;
    println!(
        "localization: {} (second-half return average {:e}, floor {:e})",
        verdict.localization, verdict.second_half_average, verdict.floor
    );
    Ok(EXIT_OK)
}

pub fn cmd_export(c: &RunConfig) -> Result<i32> {
    let spec = single_graph(c)?;
    let inst = build_instance(spec, &build_options(c))?;
    let mut w = Writer::new(c)?;
    for p in export_operators(&inst.ops, &c.out_dir, &c.export_name)? {
        w.record(&p);
    }
    if let Some(g) = &inst.graph {
        let p = w.path(&format!("{}.graph", c.export_name));
        save_graph(g, &p)?;
        w.record(&p);
    }
    let files: Vec<String> = w
        .written()
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    let results = serde_json::json!({
        "graph": spec.to_string(),
        "dim_h": inst.ops.dim_h(),
        "dim_k": inst.ops.dim_k(),
        "files": files,
    });
    w.json("export.json", results, ())?;
    println!("export: {} files -> {}", files.len(), c.out_dir.display());
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        let cli = Cli::try_parse_from(std::iter::once("swk").chain(args.iter().copied())).unwrap();
        resolve(&cli).unwrap()
    }

    #[test]
    fn flags_fill_the_config() {
        let c = parse(&[
            "dynamics",
            "--graph",
            "cycle:7",
            "--steps",
            "30",
            "--start-arc",
            "2",
            "--seed",
            "9",
        ]);
        assert_eq!(c.command, "dynamics");
        assert_eq!(c.graphs, vec![GraphSpec::Cycle { n: 7 }]);
        assert_eq!(c.dynamics.steps, 30);
        assert_eq!(c.dynamics.start_arc, Some(2));
        assert_eq!(c.seed, 9);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(
            run(["swk", "dynamics", "--graph", "cycle:5", "--steps", "-1"]),
            EXIT_USAGE
        );
        assert_eq!(run(["swk", "spectrum", "--graph", "cycle:x"]), EXIT_USAGE);
        assert_eq!(run(["swk", "bogus"]), EXIT_USAGE);
        assert_eq!(run(["swk", "--version"]), EXIT_OK);
    }

    #[test]
    fn error_classes_map_to_codes() {
        assert_eq!(exit_code(&Error::ResourceLimit("x".into())), EXIT_RESOURCE);
        assert_eq!(
            exit_code(&Error::Parse {
                line: 1,
                message: "x".into()
            }),
            EXIT_USAGE
        );
        assert_eq!(exit_code(&Error::NoConvergence(3)), EXIT_INTERNAL);
    }

    #[test]
    fn windows_partition_the_series() {
        assert_eq!(
            window_averages(&[4.0, 2.0, 3.0, 1.0, 0.0, 0.0, 1.0, 1.0], 4),
            vec![3.0, 2.0, 0.0, 1.0]
        );
        assert_eq!(window_averages(&[1.0], 4), vec![1.0]);
    }

    #[test]
    fn parallel_results_keep_input_order() {
        let specs: Vec<GraphSpec> = (3..8).map(|n| GraphSpec::Cycle { n }).collect();
        let c = RunConfig {
            jobs: 3,
            ..RunConfig::default()
        };
        let out = verify_all(&specs, &c).unwrap();
        let names: Vec<String> = out.iter().map(|r| r.graph.clone()).collect();
        let expected: Vec<String> = specs.iter().map(|s| s.to_string()).collect();
        assert_eq!(names, expected);
        assert!(out.iter().all(|r| r.pass));
    }
}
