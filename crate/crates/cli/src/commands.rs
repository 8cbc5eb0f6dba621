use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use witnesskit::complexes::{default_max_dim, delaunay_strong_with, delaunay_weak_with, DelaunayOptions, SamplingOptions};
use witnesskit::sampling;
use witnesskit::{
    check_axioms, counterexample, maxmin_landmarks, random_landmarks, sphere_generic, witness_complex, AxiomReport,
    Counterexample, CounterexampleKind, Geometry, GeometryKind, Point, Simplex, SimplicialComplex, WitnessCertificate,
};

use crate::config::RunConfig;
use crate::input::parse_points;
use crate::output::to_json;
use crate::{CliError, Command, Common, CounterexampleArg, GeometryArg, MethodArg, RegressionArg};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Delaunay {
            input,
            geometry,
            dim,
            max_dim,
            weak,
            certificates,
            resolution,
            common,
        } => delaunay(&input, geometry, dim, max_dim, weak, certificates, resolution, &common),
        Command::Verify {
            trials,
            sizes,
            dims,
            geometry,
            regression,
            resolution,
            common,
        } => verify(trials, sizes, dims, geometry, regression, resolution, &common),
        Command::WitnessComplex {
            input,
            geometry,
            dim,
            landmarks,
            method,
            max_dim,
            common,
        } => witness(&input, geometry, dim, landmarks, method, max_dim, &common),
        Command::Genericity { input, dim, common } => genericity(&input, dim, &common),
        Command::CheckAxioms {
            geometry,
            dim,
            trials,
            common,
        } => axioms(geometry, dim, trials, &common),
        Command::Counterexample {
            kind,
            p,
            latitude,
            n,
            k,
            epsilon,
            epsilon_prime,
            check,
            resolution,
            common,
        } => {
            let kind = match kind {
                CounterexampleArg::PolarCaps => CounterexampleKind::PolarCaps { p, latitude },
                CounterexampleArg::TwinSimplex => CounterexampleKind::TwinSimplex {
                    n,
                    k,
                    epsilon,
                    epsilon_prime,
                },
            };
            counterexample_cmd(kind, check, resolution, &common)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load(path: &Path, kind: GeometryKind, dim: Option<usize>) -> Result<(Geometry, Vec<Point>)> {
    let text = read(path)?;
    parse_points(&text, kind, dim).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn emit<T: Serialize>(report: &T, out: Option<&Path>) -> Result<()> {
    let json = to_json(report)?;
    match out {
        Some(path) => fs::write(path, json).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn with_tolerance(g: Geometry, tol: Option<f64>) -> Result<Geometry> {
    match tol {
        Some(t) if !(t.is_finite() && t >= 0.0) => Err(CliError::Usage(format!("--tolerance {t} must be finite and >= 0"))),
        Some(t) => Ok(g.with_tolerance(t)),
        None => Ok(g),
    }
}

fn base_config(command: &str, g: &Geometry, common: &Common) -> RunConfig {
    RunConfig {
        command: command.into(),
        geometry: Some(g.kind.name().into()),
        dim: Some(g.dim),
        output: common.out.as_ref().map(|p| p.display().to_string()),
        seed: common.seed,
        tolerance: g.tolerance,
        certify_tolerance: g.certify_tolerance,
        ..RunConfig::default()
    }
}

fn is_sampled(kind: GeometryKind) -> bool {
    !kind.is_linear()
}

fn sampling_options(resolution: Option<Vec<usize>>, seed: u64) -> Result<SamplingOptions> {
    let mut s = SamplingOptions {
        seed,
        ..SamplingOptions::default()
    };
    if let Some(r) = resolution {
        if r.is_empty() || r.contains(&0) {
            return Err(CliError::Usage("--resolution values must be positive".into()));
        }
        s.resolutions = r;
    }
    Ok(s)
}

fn caveat(kind: GeometryKind, s: &SamplingOptions) -> Option<String> {
    is_sampled(kind).then(|| {
        format!(
            "witnesses are searched over sampled candidate sets (resolutions {:?}); a simplex reported absent may have \
             a witness the samples missed",
            s.resolutions
        )
    })
}

#[derive(Debug, Serialize)]
struct CertificateOut {
    simplex: Simplex,
    kind: witnesskit::WitnessKind,
    point: Vec<f64>,
    min_margin: Option<f64>,
    spread: f64,
}

impl From<&WitnessCertificate> for CertificateOut {
    fn from(c: &WitnessCertificate) -> Self {
        let m = c.min_margin();
        CertificateOut {
            simplex: c.simplex.clone(),
            kind: c.kind,
            point: c.point.coords.clone(),
            min_margin: m.is_finite().then_some(m),
            spread: c.spread,
        }
    }
}

#[derive(Debug, Serialize)]
struct ComplexReport {
    config: RunConfig,
    points: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    simplices: Vec<Simplex>,
    f_vector: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificates: Option<Vec<CertificateOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    caveat: Option<String>,
}

#[allow(clippy::too_many_arguments)]
fn delaunay(
    input: &Path,
    geometry: GeometryArg,
    dim: Option<usize>,
    max_dim: Option<usize>,
    weak: bool,
    certificates: bool,
    resolution: Option<Vec<usize>>,
    common: &Common,
) -> Result<u8> {
    let (g, sites) = load(input, geometry.into(), dim)?;
    let g = with_tolerance(g, common.tolerance)?;
    let max_dim = max_dim.unwrap_or_else(|| default_max_dim(&g));
    let sampling = sampling_options(resolution, common.seed)?;
    let opts = DelaunayOptions {
        certificates,
        sampling,
        ..DelaunayOptions::default()
    };
    let complex = if weak {
        delaunay_weak_with(&sites, &g, max_dim, &opts)?
    } else {
        delaunay_strong_with(&sites, &g, max_dim, &opts)?
    };
    let mut config = base_config("delaunay", &g, common);
    config.input = Some(input.display().to_string());
    config.max_dim = Some(max_dim);
    config.weak = Some(weak);
    if is_sampled(g.kind) {
        config.resolutions = Some(opts.sampling.resolutions.clone());
        config.sampling_tolerance = Some(opts.sampling.tolerance);
    }
    let report = ComplexReport {
        caveat: caveat(g.kind, &opts.sampling),
        config,
        weights: (g.kind == GeometryKind::Weighted).then(|| sites.iter().map(|p| p.weight).collect()),
        points: sites.iter().map(|p| p.coords.clone()).collect(),
        simplices: complex.simplices().cloned().collect(),
        f_vector: complex.f_vector(),
        certificates: certificates.then(|| complex.certificates().values().map(CertificateOut::from).collect()),
    };
    emit(&report, common.out.as_deref())?;
    Ok(0)
}

#[derive(Debug, Serialize)]
struct Mismatch {
    simplex: Simplex,
    dimension: usize,
    in_weak: bool,
    in_strong: bool,
    weak_certificate: Option<CertificateOut>,
    strong_certificate: Option<CertificateOut>,
}

#[derive(Debug, Serialize)]
struct TrialReport {
    trial: usize,
    seed: u64,
    dim: usize,
    size: usize,
    matched: bool,
    /// `match`, `expected` (only above dimension n on the full sphere) or `unexpected`.
    classification: &'static str,
    mismatches: usize,
    mismatch_dimensions: Vec<usize>,
    first_mismatch: Option<Mismatch>,
}

#[derive(Debug, Serialize)]
struct VerifySummary {
    trials: usize,
    matched: usize,
    expected_mismatches: usize,
    unexpected_mismatches: usize,
    claim_holds: bool,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    config: RunConfig,
    summary: VerifySummary,
    trials: Vec<TrialReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    explanation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    caveat: Option<String>,
}

const SPHERE_EXPLANATION: &str = "on the full sphere weak witnesses for every face need not give a strong witness; \
    mismatches above dimension n are expected and do not fail the run";

fn compare(trial: usize, seed: u64, g: &Geometry, sites: &[Point], opts: &DelaunayOptions) -> Result<TrialReport> {
    let max_dim = sites.len() - 1;
    let weak = delaunay_weak_with(sites, g, max_dim, opts)?;
    let strong = delaunay_strong_with(sites, g, max_dim, opts)?;
    Ok(classify(trial, seed, g, sites.len(), &weak, &strong))
}

fn classify(trial: usize, seed: u64, g: &Geometry, size: usize, weak: &SimplicialComplex, strong: &SimplicialComplex) -> TrialReport {
    let mut diff: Vec<&Simplex> = weak.symmetric_difference(strong);
    diff.sort();
    let mut dims: Vec<usize> = diff.iter().map(|s| s.dim()).collect();
    dims.sort_unstable();
    dims.dedup();
    let classification = if diff.is_empty() {
        "match"
    } else if g.kind == GeometryKind::Sphere && dims.iter().all(|&d| d > g.dim) {
        "expected"
    } else {
        "unexpected"
    };
    let first_mismatch = diff.first().map(|s| Mismatch {
        simplex: (*s).clone(),
        dimension: s.dim(),
        in_weak: weak.contains(s),
        in_strong: strong.contains(s),
        weak_certificate: weak.certificate(s).map(CertificateOut::from),
        strong_certificate: strong.certificate(s).map(CertificateOut::from),
    });
    TrialReport {
        trial,
        seed,
        dim: g.dim,
        size,
        matched: diff.is_empty(),
        classification,
        mismatches: diff.len(),
        mismatch_dimensions: dims,
        first_mismatch,
    }
}

fn verify(
    trials: Option<usize>,
    sizes: Vec<usize>,
    dims: Vec<usize>,
    geometry: GeometryArg,
    regression: Option<RegressionArg>,
    resolution: Option<Vec<usize>>,
    common: &Common,
) -> Result<u8> {
    let kind: GeometryKind = geometry.into();
    let sampling = sampling_options(resolution, common.seed)?;
    let opts = DelaunayOptions {
        certificates: true,
        parallel: false,
        sampling,
        ..DelaunayOptions::default()
    };
    let (config, reports) = match regression {
        Some(RegressionArg::PolarCaps) => {
            let c = counterexample(CounterexampleKind::PolarCaps {
                p: 3,
                latitude: std::f64::consts::FRAC_PI_3,
            })?;
            let g = with_tolerance(c.geometry, common.tolerance)?;
            let mut config = base_config("verify", &g, common);
            config.regression = Some("polar-caps".into());
            config.resolutions = Some(opts.sampling.resolutions.clone());
            config.sampling_tolerance = Some(opts.sampling.tolerance);
            let report = compare(0, common.seed, &g, &c.sites, &opts)?;
            (config, vec![report])
        }
        None => {
            let n_trials = trials.ok_or_else(|| CliError::Usage("--trials is required without --regression".into()))?;
            if n_trials == 0 {
                return Err(CliError::Usage("--trials must be at least 1".into()));
            }
            if sizes.is_empty() || dims.is_empty() || dims.contains(&0) {
                return Err(CliError::Usage("--sizes and --dims must be nonempty with positive dimensions".into()));
            }
            if let Some(&s) = sizes.iter().find(|&&s| s < 2) {
                return Err(CliError::Usage(format!("--sizes entry {s} is below 2")));
            }
            let proto = with_tolerance(Geometry::new(kind, dims[0])?, common.tolerance)?;
            if is_sampled(kind) && dims.iter().any(|&d| d > witnesskit::complexes::MAX_SAMPLED_DIM) {
                return Err(CliError::Usage(format!(
                    "{kind} verification supports dimensions up to {}",
                    witnesskit::complexes::MAX_SAMPLED_DIM
                )));
            }
            let mut config = base_config("verify", &proto, common);
            config.dim = None;
            config.trials = Some(n_trials);
            config.sizes = Some(sizes.clone());
            config.dims = Some(dims.clone());
            if is_sampled(kind) {
                config.resolutions = Some(opts.sampling.resolutions.clone());
                config.sampling_tolerance = Some(opts.sampling.tolerance);
            }
            let reports = (0..n_trials)
                .into_par_iter()
                .map(|t| {
                    let dim = dims[t % dims.len()];
                    let size = sizes[(t / dims.len()) % sizes.len()];
                    let g = Geometry::new(kind, dim)?.with_tolerance(proto.tolerance);
                    let seed = sampling::sub_seed(common.seed, t as u64);
                    let mut rng = sampling::rng(seed);
                    let sites: Vec<Point> = (0..size).map(|_| sampling::random_point(&g, &mut rng)).collect();
                    let mut opts = opts.clone();
                    opts.sampling.seed = seed;
                    compare(t, seed, &g, &sites, &opts)
                })
                .collect::<Result<Vec<_>>>()?;
            (config, reports)
        }
    };
    let matched = reports.iter().filter(|r| r.matched).count();
    let expected = reports.iter().filter(|r| r.classification == "expected").count();
    let unexpected = reports.iter().filter(|r| r.classification == "unexpected").count();
    let report = VerifyReport {
        explanation: (kind == GeometryKind::Sphere || regression.is_some()).then(|| SPHERE_EXPLANATION.to_string()),
        caveat: caveat(if regression.is_some() { GeometryKind::Sphere } else { kind }, &opts.sampling),
        config,
        summary: VerifySummary {
            trials: reports.len(),
            matched,
            expected_mismatches: expected,
            unexpected_mismatches: unexpected,
            claim_holds: unexpected == 0,
        },
        trials: reports,
    };
    emit(&report, common.out.as_deref())?;
    Ok(if unexpected == 0 { 0 } else { 1 })
}

#[derive(Debug, Serialize)]
struct WitnessComplexReport {
    config: RunConfig,
    landmarks: Vec<usize>,
    simplices: Vec<Simplex>,
    f_vector: Vec<usize>,
    connected_components: usize,
    cycle_rank: i64,
}

fn witness(
    input: &Path,
    geometry: GeometryArg,
    dim: Option<usize>,
    m: usize,
    method: MethodArg,
    max_dim: usize,
    common: &Common,
) -> Result<u8> {
    let (g, sites) = load(input, geometry.into(), dim)?;
    let g = with_tolerance(g, common.tolerance)?;
    let landmarks = match method {
        MethodArg::Maxmin => maxmin_landmarks(&sites, &g, m, common.seed)?,
        MethodArg::Random => random_landmarks(sites.len(), m, common.seed)?,
    };
    let complex = witness_complex(&landmarks, &sites, &g, max_dim)?;
    let mut config = base_config("witness-complex", &g, common);
    config.input = Some(input.display().to_string());
    config.max_dim = Some(max_dim);
    config.landmarks = Some(m);
    config.method = Some(format!("{method:?}").to_lowercase());
    let report = WitnessComplexReport {
        config,
        landmarks: landmarks.indices.clone(),
        simplices: complex.simplices().cloned().collect(),
        f_vector: complex.f_vector(),
        connected_components: complex.connected_components(),
        cycle_rank: complex.graph_cycle_rank(),
    };
    emit(&report, common.out.as_deref())?;
    Ok(0)
}

#[derive(Debug, Serialize)]
struct GenericityReport {
    config: RunConfig,
    generic: bool,
    k: Option<usize>,
    violating_subset: Option<Vec<usize>>,
}

/// Rank tolerance of the genericity test when `--tolerance` is not given.
const GENERICITY_TOLERANCE: f64 = 1e-9;

fn genericity(input: &Path, dim: Option<usize>, common: &Common) -> Result<u8> {
    let (g, sites) = load(input, GeometryKind::Sphere, dim)?;
    let tol = common.tolerance.unwrap_or(GENERICITY_TOLERANCE);
    let g = with_tolerance(g, Some(tol))?;
    let r = sphere_generic(&sites, tol);
    if let (Some(k), Some(subset)) = (r.k, &r.violating_subset) {
        eprintln!("not generic: sites {subset:?} lie on a common {k}-sphere");
    }
    let report = GenericityReport {
        config: {
            let mut c = base_config("genericity", &g, common);
            c.input = Some(input.display().to_string());
            c
        },
        generic: r.generic,
        k: r.k,
        violating_subset: r.violating_subset,
    };
    emit(&report, common.out.as_deref())?;
    Ok(if r.generic { 0 } else { 1 })
}

#[derive(Debug, Serialize)]
struct AxiomsOut {
    config: RunConfig,
    report: AxiomReport,
    total_failures: usize,
}

fn axioms(geometry: GeometryArg, dim: usize, samples: usize, common: &Common) -> Result<u8> {
    if samples == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let g = with_tolerance(Geometry::new(geometry.into(), dim)?, common.tolerance)?;
    let report = check_axioms(&g, samples, common.seed);
    let mut config = base_config("check-axioms", &g, common);
    config.trials = Some(samples);
    let failures = report.total_failures();
    emit(
        &AxiomsOut {
            config,
            report,
            total_failures: failures,
        },
        common.out.as_deref(),
    )?;
    Ok(if failures == 0 { 0 } else { 1 })
}

#[derive(Debug, Serialize)]
struct CounterexampleOut {
    config: RunConfig,
    counterexample: Counterexample,
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<witnesskit::complexes::ExpectationCheck>,
}

fn counterexample_cmd(kind: CounterexampleKind, check: bool, resolution: usize, common: &Common) -> Result<u8> {
    let c = counterexample(kind)?;
    let g = with_tolerance(c.geometry, common.tolerance)?;
    let result = if check { Some(c.check(resolution, common.seed)?) } else { None };
    let mut config = base_config("counterexample", &g, common);
    config.parameters = Some(serde_json::to_value(kind)?);
    if check {
        config.resolutions = Some(vec![resolution]);
    }
    let holds = result.as_ref().is_none_or(|r| r.holds);
    emit(
        &CounterexampleOut {
            config,
            counterexample: c,
            check: result,
        },
        common.out.as_deref(),
    )?;
    Ok(if holds { 0 } else { 1 })
}
