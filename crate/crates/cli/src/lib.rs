//! Experiment commands behind the `polyaccess` binary. Each command returns
//! its output as text so it can be tested without a process boundary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde_json::{json, Value};

use polyaccess_core::access::{boundary_curves, Classifier, DEFAULT_TOL};
use polyaccess_core::builtins::{builtin, Reference};
use polyaccess_core::channel::{eigenvalues, Representation};
use polyaccess_core::dynamics::{trajectory_csv, uniform_grid, weight_trajectory, RateSchedule};
use polyaccess_core::group::GroupFile;
use polyaccess_core::io::{matrix_from_csv, matrix_from_json, parse_list, parse_weights};
use polyaccess_core::polytope::{
    b3_cross_sections, b3_projections, embed, mc_accessible_fraction_with, uniform_sample, McConfig, Method, SectionPlane,
    DEFAULT_WORKERS,
};
use polyaccess_core::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "polyaccess", version, about = "Accessibility of group-covariant channels from Markovian dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Order, element orders, subgroups, affine dimension and distances.
    Group(Common),
    /// Mixture weights w(t) along a rate schedule.
    Trajectory(Common),
    /// Accessibility verdict for a mixture or a channel matrix.
    Access {
        #[command(flatten)]
        common: Common,
        /// Mixture weights as `p0,p1,…` or a JSON array.
        #[arg(long, conflicts_with = "matrix")]
        weights: Option<String>,
        /// Channel matrix file, CSV or JSON by extension.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Monte Carlo accessible volume fraction.
    Volume {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Eigenvalues of uniformly sampled mixtures, tagged by accessibility.
    Spectra(Common),
    /// Boundary curves, or for the Birkhoff polytope projections and cross-sections.
    Boundary {
        #[command(flatten)]
        common: Common,
        /// Cross-section plane through `--offset` instead of projections.
        #[arg(long, value_enum)]
        section: Option<PlaneArg>,
        /// 3×3 bistochastic offset file; defaults to the centroid.
        #[arg(long, requires = "section")]
        offset: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Builtin group: z2…z64, z4-independent, z4-nonregular, noncyclic4,
    /// noncyclic4-nonregular, pauli, pauli-tensor-k, weyl-N, s3, birkhoff3.
    #[arg(long, conflicts_with = "group_file", required_unless_present = "group_file")]
    pub builtin: Option<String>,
    /// JSON group file: {"generators": [...], "realization": "quantum" | "classical" | "unistochastic" | "regular"}.
    #[arg(long)]
    pub group_file: Option<PathBuf>,
    /// Sample count (at least 1000 for volume).
    #[arg(short = 'n', long = "samples")]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Residual tolerance per matrix dimension.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// End of the time grid.
    #[arg(long, default_value_t = 5.0)]
    pub t_max: f64,
    /// Grid intervals between 0 and t-max.
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Rates `q1,…` (or `q0,q1,…` with `q0 = 0`); unit rates by default.
    #[arg(long)]
    pub rates: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Sampling workers; results depend on (seed, n, workers).
    #[arg(long, default_value_t = DEFAULT_WORKERS)]
    pub workers: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Triangulation,
    HitAndRun,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PlaneArg {
    Even,
    Odd,
}

/// One output document; `suffix` distinguishes sibling files under `--out`.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub suffix: Option<&'static str>,
    pub body: String,
}

impl Artifact {
    fn single(body: String) -> Vec<Artifact> {
        vec![Artifact { suffix: None, body }]
    }
}

/// Resolved group, realization and analytic reference.
pub struct Loaded {
    pub name: String,
    pub rep: Representation,
    pub reference: Option<Reference>,
}

impl Common {
    pub fn load(&self) -> Result<Loaded> {
        if let Some(name) = &self.builtin {
            let b = builtin(name)?;
            return Ok(Loaded { name: b.name.clone(), rep: b.representation()?, reference: b.reference });
        }
        let path = self.group_file.as_ref().ok_or_else(|| Error::InvalidArgument("--builtin or --group-file is required".into()))?;
        let file = GroupFile::from_json(&read(path)?)?;
        let rep = Representation::from_specs(&file.generators, file.realization())?;
        Ok(Loaded { name: path.display().to_string(), rep, reference: None })
    }

    fn check(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.samples == Some(0) {
            return Err(Error::InvalidArgument("--samples must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidArgument("--workers must be at least 1".into()));
        }
        Ok(())
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn schedule(&self, g: usize) -> Result<RateSchedule> {
        let q = match &self.rates {
            None => (0..g).map(|mu| if mu == 0 { 0.0 } else { 1.0 }).collect(),
            Some(s) => {
                let mut q = parse_list(s)?;
                if q.len() + 1 == g {
                    q.insert(0, 0.0);
                }
                if q.len() != g {
                    return Err(Error::LengthMismatch { expected: g, got: q.len() });
                }
                q
            }
        };
        RateSchedule::new(q, 0.0)
    }
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Group(c) | Command::Trajectory(c) | Command::Spectra(c) => c,
            Command::Access { common, .. } | Command::Volume { common, .. } | Command::Boundary { common, .. } => common,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn run(cli: &Cli) -> Result<Vec<Artifact>> {
    let common = cli.command.common();
    common.check()?;
    match &cli.command {
        Command::Group(c) => cmd_group(c),
        Command::Trajectory(c) => cmd_trajectory(c),
        Command::Access { common, weights, matrix } => cmd_access(common, weights.as_deref(), matrix.as_deref()),
        Command::Volume { common, method } => cmd_volume(common, *method),
        Command::Spectra(c) => cmd_spectra(c),
        Command::Boundary { common, section, offset } => cmd_boundary(common, *section, offset.as_deref()),
    }
}

pub fn cmd_group(c: &Common) -> Result<Vec<Artifact>> {
    let l = c.load()?;
    let table = l.rep.group();
    let distances = l.rep.distance_table();
    if c.format_or(Format::Json) == Format::Csv {
        let mut out = String::from("element");
        for label in table.labels() {
            let _ = write!(out, ",{label}");
        }
        out.push('\n');
        for (label, row) in table.labels().iter().zip(&distances) {
            out.push_str(label);
            for d in row {
                let _ = write!(out, ",{d:?}");
            }
            out.push('\n');
        }
        return Ok(Artifact::single(out));
    }
    let subgroups = table.enumerate_subgroups()?;
    let report = json!({
        "name": l.name,
        "order": table.order(),
        "labels": table.labels(),
        "element_orders": table.element_orders(),
        "abelian": table.is_abelian(),
        "subgroup_orders": subgroups.orders(),
        "subgroups": subgroups.iter().map(|h| json!({"elements": h.elements, "order": h.order, "cyclic": h.cyclic})).collect::<Vec<_>>(),
        "representation": l.rep.kind().to_string(),
        "dim": l.rep.dim(),
        "affine_dimension": l.rep.affine_dimension(),
        "distances": distances,
        "reference": l.reference,
    });
    Ok(Artifact::single(to_json(&report)))
}

pub fn cmd_trajectory(c: &Common) -> Result<Vec<Artifact>> {
    let l = c.load()?;
    let q = c.schedule(l.rep.order())?;
    let rows = weight_trajectory(l.rep.group(), &q, &uniform_grid(c.t_max, c.steps))?;
    Ok(Artifact::single(match c.format_or(Format::Csv) {
        Format::Csv => trajectory_csv(&rows),
        Format::Json => to_json(&json!({
            "rates": q.rates(),
            "points": rows.iter().map(|(t, w)| json!({"t": t, "weights": w})).collect::<Vec<_>>(),
        })),
    }))
}

pub fn cmd_access(c: &Common, weights: Option<&str>, matrix: Option<&Path>) -> Result<Vec<Artifact>> {
    let l = c.load()?;
    let classifier = Classifier::new(l.rep, c.tol)?;
    let verdict = match (weights, matrix) {
        (Some(w), _) => classifier.classify_weights(&parse_weights(w)?)?,
        (None, Some(path)) => {
            let text = read(path)?;
            let m = if path.extension().is_some_and(|e| e == "json") { matrix_from_json(&text)? } else { matrix_from_csv(&text)? };
            classifier.classify_map(&m)?
        }
        (None, None) => return Err(Error::InvalidArgument("access needs --weights or --matrix".into())),
    };
    let body = match c.format_or(Format::Json) {
        Format::Json => to_json(&serde_json::to_value(&verdict).expect("verdict serializes")),
        Format::Csv => format!(
            "accessible,residual,det_sign,log_ok\n{},{:?},{},{}\n",
            u8::from(verdict.accessible),
            verdict.residual,
            verdict.det_sign,
            u8::from(verdict.log_ok)
        ),
    };
    Ok(Artifact::single(body))
}

pub fn cmd_volume(c: &Common, method: Option<MethodArg>) -> Result<Vec<Artifact>> {
    let l = c.load()?;
    let cfg = McConfig {
        n: c.samples.unwrap_or(100_000),
        seed: c.seed,
        tol: c.tol,
        workers: c.workers,
        method: method.map(|m| match m {
            MethodArg::Triangulation => Method::Triangulation,
            MethodArg::HitAndRun => Method::HitAndRun,
        }),
    };
    let est = mc_accessible_fraction_with(&l.rep, &cfg)?;
    // Exact references are compared at 3σ, empirical ones at their own tolerance.
    let matches = l.reference.as_ref().map(|r| match *r {
        Reference::Exact { value } => est.within(value, 3.0),
        Reference::Empirical { value, tolerance } => (est.fraction - value).abs() <= tolerance,
    });
    let body = match c.format_or(Format::Json) {
        Format::Json => {
            let mut v = serde_json::to_value(&est).expect("estimate serializes");
            v["group"] = json!(l.name);
            v["reference"] = json!(l.reference);
            v["matches_reference"] = json!(matches);
            to_json(&v)
        }
        Format::Csv => format!(
            "fraction,std_error,n,n_accessible,seed,method,workers,reference,matches_reference\n{:?},{:?},{},{},{},{},{},{},{}\n",
            est.fraction,
            est.std_error,
            est.n_samples,
            est.n_accessible,
            est.seed,
            est.method,
            est.workers,
            l.reference.map(|r| format!("{:?}", r.value())).unwrap_or_default(),
            matches.map(|m| u8::from(m).to_string()).unwrap_or_default(),
        ),
    };
    Ok(Artifact::single(body))
}

pub fn cmd_spectra(c: &Common) -> Result<Vec<Artifact>> {
    let l = c.load()?;
    let n = c.samples.unwrap_or(2000);
    let poly = embed(&l.rep)?;
    let points = uniform_sample(&poly, n, c.seed)?;
    let classifier = Classifier::new(l.rep.clone(), c.tol)?;
    let mut rows = Vec::with_capacity(n * l.rep.dim());
    for (k, p) in points.iter().enumerate() {
        let m = l.rep.mixture(&p.weights)?;
        let accessible = classifier.classify_map(&m)?.accessible;
        for z in eigenvalues(&m) {
            rows.push((k, z.re, z.im, accessible));
        }
    }
    let body = match c.format_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from("sample,re,im,accessible\n");
            for (k, re, im, a) in rows {
                let _ = writeln!(out, "{k},{re:?},{im:?},{}", u8::from(a));
            }
            out
        }
        Format::Json => to_json(&json!(rows
            .iter()
            .map(|&(k, re, im, a)| json!({"sample": k, "re": re, "im": im, "accessible": a}))
            .collect::<Vec<_>>())),
    };
    Ok(Artifact::single(body))
}

fn is_birkhoff(l: &Loaded) -> bool {
    l.rep.order() == 6 && l.rep.dim() == 3 && l.rep.is_real() && !l.rep.group().is_abelian()
}

pub fn cmd_boundary(c: &Common, section: Option<PlaneArg>, offset: Option<&Path>) -> Result<Vec<Artifact>> {
    let l = c.load()?;
    if is_birkhoff(&l) {
        return match section {
            Some(plane) => b3_section(c, plane, offset),
            None => b3_projection_clouds(c, &l),
        };
    }
    if section.is_some() {
        return Err(Error::InvalidArgument("--section applies to the Birkhoff polytope (s3, birkhoff3)".into()));
    }
    let table = l.rep.group();
    let g = table.order();
    // Single-generator supports trace the edges of the accessible region.
    let supports: Vec<Vec<usize>> = (1..g).map(|mu| vec![mu]).collect();
    let curves = boundary_curves(table, &supports, &uniform_grid(c.t_max, c.steps))?;
    // Cyclic groups also get the nontrivial Fourier coefficient Σ w_k ω^k.
    let cyclic = table.element_orders().contains(&g) && g > 1;
    let generator = table.element_orders().iter().position(|&o| o == g);
    let fourier = |w: &[f64]| {
        let gen = generator.expect("cyclic");
        let (mut re, mut im, mut pow) = (0.0, 0.0, 0usize);
        for k in 0..g {
            let angle = std::f64::consts::TAU * k as f64 / g as f64;
            re += w[pow] * angle.cos();
            im += w[pow] * angle.sin();
            pow = table.mul(pow, gen);
        }
        (re, im)
    };
    match c.format_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from("curve,t");
            for mu in 0..g {
                let _ = write!(out, ",w_{mu}");
            }
            out.push_str(if cyclic { ",re,im\n" } else { "\n" });
            for curve in &curves {
                let name = table.label(curve.support[0]);
                for (t, w) in &curve.samples {
                    let _ = write!(out, "{name},{t:?}");
                    for x in w.as_slice() {
                        let _ = write!(out, ",{x:?}");
                    }
                    if cyclic {
                        let (re, im) = fourier(w.as_slice());
                        let _ = write!(out, ",{re:?},{im:?}");
                    }
                    out.push('\n');
                }
            }
            Ok(Artifact::single(out))
        }
        Format::Json => Ok(Artifact::single(to_json(&serde_json::to_value(&curves).expect("curves serialize")))),
    }
}

fn b3_projection_clouds(c: &Common, l: &Loaded) -> Result<Vec<Artifact>> {
    let n = c.samples.unwrap_or(20_000);
    let poly = embed(&l.rep)?;
    let classifier = Classifier::new(l.rep.clone(), c.tol)?;
    let mut mats = Vec::with_capacity(n);
    let mut flags = Vec::with_capacity(n);
    for p in uniform_sample(&poly, n, c.seed)? {
        let m = l.rep.mixture(&p.weights)?;
        flags.push(classifier.classify_map(&m)?.accessible);
        mats.push(m.map(|z| z.re));
    }
    let (even, odd) = b3_projections(&mats)?;
    let cloud = |pts: &[[f64; 2]], plane: Option<&str>| {
        let mut out = String::from(if plane.is_some() { "plane,x,y,accessible\n" } else { "x,y,accessible\n" });
        for (p, &a) in pts.iter().zip(&flags) {
            if let Some(name) = plane {
                let _ = write!(out, "{name},");
            }
            let _ = writeln!(out, "{:?},{:?},{}", p[0], p[1], u8::from(a));
        }
        out
    };
    if c.out.is_some() {
        return Ok(vec![
            Artifact { suffix: Some("even"), body: cloud(&even, None) },
            Artifact { suffix: Some("odd"), body: cloud(&odd, None) },
        ]);
    }
    let mut body = cloud(&even, Some("even"));
    let odd_rows = cloud(&odd, Some("odd"));
    body.push_str(odd_rows.split_once('\n').map_or("", |(_, rest)| rest));
    Ok(Artifact::single(body))
}

fn b3_section(c: &Common, plane: PlaneArg, offset: Option<&Path>) -> Result<Vec<Artifact>> {
    let offset = match offset {
        Some(path) => {
            let text = read(path)?;
            let m = if path.extension().is_some_and(|e| e == "json") { matrix_from_json(&text)? } else { matrix_from_csv(&text)? };
            if m.iter().any(|z| z.im != 0.0) {
                return Err(Error::InvalidArgument("offset must be real".into()));
            }
            m.map(|z| z.re)
        }
        None => DMatrix::from_element(3, 3, 1.0 / 3.0),
    };
    let plane = match plane {
        PlaneArg::Even => SectionPlane::Even,
        PlaneArg::Odd => SectionPlane::Odd,
    };
    let s = b3_cross_sections(&offset, plane, c.samples.unwrap_or(100_000), c.seed, c.tol)?;
    let body = match c.format_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from("x,y,accessible\n");
            for p in &s.points {
                let _ = writeln!(out, "{:?},{:?},{}", p.x, p.y, u8::from(p.accessible));
            }
            out
        }
        Format::Json => to_json(&serde_json::to_value(&s).expect("section serializes")),
    };
    Ok(Artifact::single(body))
}

/// `out` itself for a single artifact, `<stem>-<suffix>.<ext>` for siblings.
pub fn artifact_path(out: &Path, suffix: Option<&str>) -> PathBuf {
    let Some(suffix) = suffix else { return out.to_path_buf() };
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}-{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{suffix}"),
    };
    out.with_file_name(name)
}

/// Machine-readable error report for stderr.
pub fn error_json(kind: &str, message: &str) -> String {
    json!({"error": kind, "message": message}).to_string()
}

/// 2 for invalid input, 3 for numeric failures.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numeric() {
        3
    } else {
        2
    }
}
