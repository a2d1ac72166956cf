use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use num_traits::Zero;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use toral_core::automorphism::{Mat2, RationalPoint, ToralAuto};
use toral_core::boxconstruct::{build_box as construct, check_certificate, default_y0, BoxB, BoxPrimeSpec, ConstructionCertificate};
use toral_core::fractal::{find_segment as search, verify_segment, Face, FoundSegment, FractalView, Step};
use toral_core::numbers::{Scalar, TowerExt};
use toral_core::torusgeom::{Axis, EigenSegment, Pt};
use toral_core::tubeverify::{
    check_slice_lemmas, make_tubes, region_verdict, scan_no_proper_overlap, OverlapReport, Region, SliceLemmaReport,
};
use toral_core::witness::{check_report, default_center, make_probe, make_witness, WitnessOptions, WitnessReport};

use crate::config::{self, ConfigFile};
use crate::decimal::decimal;
use crate::envelope::{hash_inputs, sha256_hex, Envelope};
use crate::render;

type K = TowerExt;

pub struct Ctx {
    pub cfg: ConfigFile,
    pub out_dir: PathBuf,
}

impl Ctx {
    fn out_path(&self, out: &Option<PathBuf>, default: &str) -> PathBuf {
        out.clone().unwrap_or_else(|| self.out_dir.join(default))
    }
}

fn num(x: &K) -> Value {
    json!({ "exact": x.to_string(), "decimal": decimal(x) })
}

fn point_json(p: &Pt<K>) -> Value {
    json!([num(&p.0), num(&p.1)])
}

/// The resolved arguments without output paths, which do not affect results.
fn inputs_of<T: Serialize>(args: &T) -> Value {
    let mut v = serde_json::to_value(args).expect("arguments serialize");
    if let Value::Object(m) = &mut v {
        m.retain(|k, v| !k.starts_with("out") && !v.is_null());
    }
    v
}

fn finish(mut file: File, path: &Path, env: &Envelope) -> Result<()> {
    let text = serde_json::to_string_pretty(env)?;
    file.write_all(text.as_bytes()).with_context(|| format!("writing {}", path.display()))?;
    file.write_all(b"\n")?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

/// Prints to stdout, ignoring a closed pipe.
fn show(v: &Value) {
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(v).expect("json value serializes"));
}

fn elapsed_ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxPayload {
    /// The matrix given on the command line.
    pub input_matrix: Mat2,
    /// `box.t` is `input_matrix^power`.
    pub power: u32,
    #[serde(rename = "box")]
    pub bx: BoxB,
    pub certificate: ConstructionCertificate,
    pub readable: Value,
}

/// Box and the sha256 of the file it came from.
fn load_box(path: &Option<PathBuf>) -> Result<(BoxB, String)> {
    let path = path.as_deref().context("missing --box (a file written by `toral build-box`)")?;
    let env = Envelope::read(path)?;
    let p: BoxPayload = env.payload_as("box")?;
    let bytes = std::fs::read(path)?;
    Ok((p.bx, sha256_hex(&bytes)))
}

// ---------------------------------------------------------------- analyze

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct AnalyzeArgs {
    /// Row-major `a,b,c,d`.
    #[arg(long)]
    pub matrix: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn analysis_payload(t: &ToralAuto) -> Value {
    let (p, e) = t.positivize();
    let q = |x: &toral_core::QuadExt| num(&K::from_quad(x));
    json!({
        "auto": t,
        "residuals_zero": t.eigen_residuals().iter().all(|r| r.sign().is_zero()),
        "positivized": { "matrix": p.matrix, "power": e },
        "readable": {
            "lambda_plus": q(&t.lambda_plus),
            "lambda_minus": q(&t.lambda_minus),
            "slope_plus": q(&t.slope_plus),
            "slope_minus": q(&t.slope_minus),
        },
    })
}

pub fn analyze(ctx: &Ctx, cli: &AnalyzeArgs) -> Result<bool> {
    let a = ctx.cfg.resolve("analyze", cli)?;
    let m = config::matrix(&a.matrix, "matrix")?;
    let path = ctx.out_path(&a.out, "analysis.json");
    let file = config::open_output(&path)?;
    let start = Instant::now();
    let t = ToralAuto::analyze(m).with_context(|| format!("matrix {m:?}"))?;
    let payload = analysis_payload(&t);
    let ok = payload["residuals_zero"] == json!(true);
    let env = Envelope::new("analysis", inputs_of(&a), payload, elapsed_ms(start));
    finish(file, &path, &env)?;
    show(&env.payload["readable"]);
    Ok(ok)
}

// ---------------------------------------------------------------- build-box

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct BuildBoxArgs {
    #[arg(long)]
    pub matrix: Option<String>,
    /// Expanding edge of B′ (default 1/10).
    #[arg(long)]
    pub u_max: Option<String>,
    /// Contracting edge of B′ (default 1/10).
    #[arg(long)]
    pub w_max: Option<String>,
    /// Periodic point `x,y`; default is the smallest-denominator point inside B′.
    #[arg(long)]
    pub y0: Option<String>,
    /// Euclidean length cap for the face B_x (default min(u_max, w_max)/2).
    #[arg(long)]
    pub bx_cap: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn build_box(ctx: &Ctx, cli: &BuildBoxArgs) -> Result<bool> {
    let a = ctx.cfg.resolve("build-box", cli)?;
    let m = config::matrix(&a.matrix, "matrix")?;
    let u_max = config::rational(&a.u_max, "u-max", Some("1/10"))?;
    let w_max = config::rational(&a.w_max, "w-max", Some("1/10"))?;
    let y0 = config::opt_point(&a.y0, "y0")?;
    let cap = match &a.bx_cap {
        Some(_) => config::rational(&a.bx_cap, "bx-cap", None)?,
        None => u_max.clone().min(w_max.clone()) / toral_core::numbers::int(2),
    };
    let path = ctx.out_path(&a.out, "box.json");
    let file = config::open_output(&path)?;
    let start = Instant::now();
    let t0 = ToralAuto::analyze(m)?;
    let (t, power) = t0.positivize();
    if power != 1 {
        eprintln!("note: {t0} has a negative eigenvalue; building the box for its square {t}");
    }
    let y0 = match y0 {
        Some(p) => p,
        None => default_y0(&u_max, &w_max, &t, 200).context("no rational point of denominator ≤ 200 inside B′; pass --y0")?,
    };
    let spec = BoxPrimeSpec::new(u_max, w_max, y0)?;
    let (bx, cert) = construct(&spec, &t, &cap)?;
    let check = check_certificate(&cert);
    let readable = json!({
        "u_star": num(&bx.u_star),
        "c": num(&bx.c),
        "alpha_star": num(&bx.alpha_star),
        "case": bx.case,
        "y0": spec.y0.to_string(),
        "certificate_check": check.as_ref().err(),
    });
    let payload = BoxPayload { input_matrix: m, power, bx, certificate: cert, readable };
    let env = Envelope::new("box", inputs_of(&a), serde_json::to_value(&payload)?, elapsed_ms(start));
    finish(file, &path, &env)?;
    show(&payload.readable);
    Ok(check.is_ok())
}

// ---------------------------------------------------------------- verify-overlaps

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct OverlapArgs {
    /// Box artifact from `build-box`.
    #[arg(long = "box")]
    #[serde(rename = "box")]
    pub bx: Option<PathBuf>,
    /// Largest tube depth (default 10).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Sampled intersecting slice pairs (default 100).
    #[arg(long)]
    pub slice_samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapPayload {
    #[serde(rename = "box")]
    pub bx: BoxB,
    pub overlap: OverlapReport,
    pub slices: SliceLemmaReport,
    pub slice_seed: u64,
    pub slice_samples: usize,
}

pub fn verify_overlaps(ctx: &Ctx, cli: &OverlapArgs) -> Result<bool> {
    let a = ctx.cfg.resolve("verify-overlaps", cli)?;
    let (bx, box_hash) = load_box(&a.bx)?;
    let depth = a.depth.unwrap_or(10);
    let samples = a.slice_samples.unwrap_or(100);
    let seed = a.seed.unwrap_or(0);
    let path = ctx.out_path(&a.out, "overlaps.json");
    let file = config::open_output(&path)?;
    let start = Instant::now();
    let overlap = scan_no_proper_overlap(&bx, depth);
    let slices = check_slice_lemmas(&bx, depth, samples, seed);
    let ok = overlap.pass && slices.pass;
    let summary = json!({
        "regions": overlap.total_regions,
        "proper": overlap.proper_count,
        "overlap_pass": overlap.pass,
        "slice_lemmas_pass": slices.pass,
    });
    let payload = OverlapPayload { bx, overlap, slices, slice_seed: seed, slice_samples: samples };
    let mut inputs = inputs_of(&a);
    inputs["box_sha256"] = json!(box_hash);
    let env = Envelope::new("overlaps", inputs, serde_json::to_value(&payload)?, elapsed_ms(start));
    finish(file, &path, &env)?;
    show(&summary);
    Ok(ok)
}

// ---------------------------------------------------------------- find-segment

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct FindSegmentArgs {
    #[arg(long = "box")]
    #[serde(rename = "box")]
    pub bx: Option<PathBuf>,
    /// Rational center `x,y` in F_N; default is the first small-denominator point of F_N.
    #[arg(long)]
    pub center: Option<String>,
    /// Search radius (default 1/20).
    #[arg(long)]
    pub radius: Option<String>,
    /// Fractal depth N (default 10).
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentOut {
    pub anchor: Pt<K>,
    pub t: (K, K),
    pub open: (bool, bool),
    pub tube: usize,
    pub face: Face,
    pub certified_depth: usize,
    pub steps: Vec<Step>,
    pub center: RationalPoint,
    #[serde(with = "toral_core::numbers::serde_rational")]
    pub radius: toral_core::Rational,
}

impl SegmentOut {
    pub fn segment(&self, bx: &BoxB) -> EigenSegment<K> {
        EigenSegment { frame: bx.frame(), anchor: self.anchor.clone(), axis: Axis::Minus, t: self.t.clone(), open: self.open }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentPayload {
    #[serde(rename = "box")]
    pub bx: BoxB,
    pub segment: SegmentOut,
    pub verified: bool,
    pub readable: Value,
}

pub fn find_segment(ctx: &Ctx, cli: &FindSegmentArgs) -> Result<bool> {
    let a = ctx.cfg.resolve("find-segment", cli)?;
    let (bx, box_hash) = load_box(&a.bx)?;
    let center = config::opt_point(&a.center, "center")?;
    let radius = config::rational(&a.radius, "radius", Some("1/20"))?;
    let depth = a.depth.unwrap_or(10);
    let path = ctx.out_path(&a.out, "segment.json");
    let file = config::open_output(&path)?;
    let start = Instant::now();
    let view = FractalView::new(bx.clone(), depth);
    let center = center.unwrap_or_else(|| default_center(&view));
    let f = search(&center.to_tower(), &radius, &view).with_context(|| format!("center {center}"))?;
    let verified = verify_segment(&f, &view);
    let (e0, e1) = f.segment.endpoints();
    let readable = json!({ "endpoints": [point_json(&e0), point_json(&e1)], "tube": f.tube, "face": f.face });
    let out = SegmentOut {
        anchor: f.segment.anchor.clone(),
        t: f.segment.t.clone(),
        open: f.segment.open,
        tube: f.tube,
        face: f.face,
        certified_depth: f.certified_depth,
        steps: f.steps.clone(),
        center,
        radius,
    };
    let payload = SegmentPayload { bx, segment: out, verified, readable };
    let mut inputs = inputs_of(&a);
    inputs["box_sha256"] = json!(box_hash);
    let env = Envelope::new("segment", inputs, serde_json::to_value(&payload)?, elapsed_ms(start));
    finish(file, &path, &env)?;
    show(&payload.readable);
    Ok(verified)
}

// ---------------------------------------------------------------- witness

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct WitnessArgs {
    #[arg(long = "box")]
    #[serde(rename = "box")]
    pub bx: Option<PathBuf>,
    /// T; defaults to the box's matrix.
    #[arg(long)]
    pub matrix: Option<String>,
    /// S, whose orbit should be dense.
    #[arg(long)]
    pub s_matrix: Option<String>,
    /// Probe `x,y` or `x,y,ell` (ell defaults to 4); repeatable.
    #[arg(long = "probe")]
    #[serde(rename = "probe", skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<String>,
    /// Fractal depth for the segment (default 10).
    #[arg(long)]
    pub fractal_depth: Option<usize>,
    #[arg(long)]
    pub center: Option<String>,
    #[arg(long)]
    pub radius: Option<String>,
    /// Iterates of T checked against the box (default 200).
    #[arg(long)]
    pub avoid_depth: Option<usize>,
    /// Largest S-iterate searched for probe visits (default 5000).
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Density grid is grid-k × grid-k (default 8).
    #[arg(long)]
    pub grid_k: Option<u32>,
    /// Skip the auxiliary per-cell probes.
    #[arg(long, action = clap::ArgAction::SetTrue)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub no_grid_probes: bool,
    /// Leaf-cut rounds per probe (default 64).
    #[arg(long)]
    pub max_rounds: Option<u32>,
    /// Periodic point replacing the origin; the box must be built for the matching power of T.
    #[arg(long)]
    pub base_point: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessPayload {
    #[serde(rename = "box")]
    pub bx: BoxB,
    pub report: WitnessReport,
    pub readable: Value,
}

pub fn witness(ctx: &Ctx, cli: &WitnessArgs) -> Result<bool> {
    let a = ctx.cfg.resolve("witness", cli)?;
    let (bx, box_hash) = load_box(&a.bx)?;
    let t = match &a.matrix {
        Some(_) => ToralAuto::analyze(config::matrix(&a.matrix, "matrix")?)?,
        None => bx.t.clone(),
    };
    let s = ToralAuto::analyze(config::matrix(&a.s_matrix, "s-matrix")?)?;
    let d = WitnessOptions::default();
    let opts = WitnessOptions {
        fractal_depth: a.fractal_depth.unwrap_or(d.fractal_depth),
        center: config::opt_point(&a.center, "center")?,
        radius: match &a.radius {
            Some(_) => config::rational(&a.radius, "radius", None)?,
            None => d.radius,
        },
        avoid_depth: a.avoid_depth.unwrap_or(d.avoid_depth),
        horizon: a.horizon.unwrap_or(d.horizon),
        grid_k: a.grid_k.unwrap_or(d.grid_k),
        grid_probes: !a.no_grid_probes,
        max_rounds: a.max_rounds.unwrap_or(d.max_rounds),
        base_point: config::opt_point(&a.base_point, "base-point")?,
    };
    let mut probes = vec![];
    for p in &a.probes {
        let (r, ell) = config::probe(p, 4)?;
        probes.push(make_probe(&r, ell, &s)?);
    }
    let path = ctx.out_path(&a.out, "witness.json");
    let file = config::open_output(&path)?;
    let start = Instant::now();
    let rep = make_witness(&t, &s, &bx, &probes, &opts)?;
    let check = check_report(&rep, &bx);
    let missed: Vec<usize> = rep.visits.iter().filter(|v| !v.auxiliary && v.iterate.is_none()).map(|v| v.probe).collect();
    let readable = json!({
        "point": point_json(&rep.point),
        "probe_visits": rep.visits.iter().filter(|v| !v.auxiliary).map(|v| json!({"r": v.r.to_string(), "ell": v.ell, "iterate": v.iterate})).collect::<Vec<_>>(),
        "grid_cells_visited": rep.density.cells_visited,
        "first_full_cover": rep.density.first_full_cover,
        "avoidance_depth": rep.avoidance.depth,
        "report_check": check.as_ref().err(),
    });
    let payload = WitnessPayload { bx, report: rep, readable };
    let mut inputs = inputs_of(&a);
    inputs["box_sha256"] = json!(box_hash);
    let env = Envelope::new("witness", inputs, serde_json::to_value(&payload)?, elapsed_ms(start));
    finish(file, &path, &env)?;
    show(&payload.readable);
    if !missed.is_empty() {
        eprintln!("probes {missed:?} were not visited within the horizon");
    }
    Ok(check.is_ok() && missed.is_empty())
}

// ---------------------------------------------------------------- verify

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct VerifyArgs {
    /// Any artifact written by this tool.
    #[arg(long = "in")]
    #[serde(rename = "in")]
    pub input: Option<PathBuf>,
}

/// Replays an overlap report region by region, without re-enumerating.
fn replay_overlaps(p: &OverlapPayload) -> Result<(), String> {
    let r = &p.overlap;
    let tubes = make_tubes(&p.bx, r.max_depth);
    let frame = p.bx.frame();
    let mut proper = 0;
    for reg in &r.regions {
        if reg.m >= reg.n || reg.n > r.max_depth {
            return Err(format!("region ({}, {}) has bad depths", reg.m, reg.n));
        }
        let (old, new) = (&tubes[reg.m], &tubes[reg.n]);
        let (um, wm, un, wn) = (old.u_len(), old.w_len(), new.u_len(), new.w_len());
        let (ku, kw) = frame.lattice_frame(reg.k);
        let meets = (-un.clone()).lt(&ku) && ku.lt(&um) && (-wn.clone()).lt(&kw) && kw.lt(&wm);
        if !meets {
            return Err(format!("region ({}, {}, {:?}) is empty", reg.m, reg.n, reg.k));
        }
        let region = Region {
            m: reg.m,
            n: reg.n,
            k: reg.k,
            u: (K::max_of(K::zero(), ku.clone()), K::min_of(um, ku + un)),
            w: (K::max_of(K::zero(), kw.clone()), K::min_of(wm, kw + wn)),
        };
        let v = region_verdict(old, new, &region);
        if v != reg.verdict {
            return Err(format!("region ({}, {}, {:?}): verdict {:?}, recorded {:?}", reg.m, reg.n, reg.k, v, reg.verdict));
        }
        if matches!(v, toral_core::tubeverify::OverlapVerdict::Proper(_)) {
            proper += 1;
        }
    }
    if proper != r.proper_count || r.total_regions != r.regions.len() {
        return Err("region counts do not add up".into());
    }
    if r.pass != (proper == 0 && r.regions.iter().all(|x| x.samples_agree)) {
        return Err("pass flag disagrees with the regions".into());
    }
    let s = check_slice_lemmas(&p.bx, p.slices.max_depth, p.slice_samples, p.slice_seed);
    if s != p.slices {
        return Err("slice lemma report does not replay".into());
    }
    if !(r.pass && s.pass) {
        return Err("recorded scan failed".into());
    }
    Ok(())
}

fn verify_payload(env: &Envelope) -> Result<Result<(), String>> {
    Ok(match env.kind.as_str() {
        "analysis" => {
            let m: Mat2 = serde_json::from_value(env.payload["auto"]["matrix"].clone()).context("analysis payload has no matrix")?;
            let t = ToralAuto::analyze(m)?;
            if analysis_payload(&t) == env.payload {
                Ok(())
            } else {
                Err("analysis does not replay".into())
            }
        }
        "box" => {
            let p: BoxPayload = env.payload_as("box")?;
            let c = &p.certificate;
            if p.bx.t.matrix != c.matrix || p.bx.u_star != c.u_star || p.bx.c != c.c || p.bx.alpha_star != c.alpha_star {
                Err("box does not match its certificate".into())
            } else if toral_core::automorphism::mat_pow(&p.input_matrix, p.power) != c.matrix {
                Err("certificate matrix is not the recorded power of the input".into())
            } else {
                check_certificate(c)
            }
        }
        "overlaps" => replay_overlaps(&env.payload_as("overlaps")?),
        "segment" => {
            let p: SegmentPayload = env.payload_as("segment")?;
            let f = FoundSegment {
                segment: p.segment.segment(&p.bx),
                certified_depth: p.segment.certified_depth,
                tube: p.segment.tube,
                face: p.segment.face,
                steps: p.segment.steps.clone(),
            };
            let view = FractalView::new(p.bx.clone(), p.segment.certified_depth);
            if verify_segment(&f, &view) == p.verified && p.verified {
                Ok(())
            } else {
                Err("segment meets a tube".into())
            }
        }
        "witness" => {
            let p: WitnessPayload = env.payload_as("witness")?;
            check_report(&p.report, &p.bx)
        }
        "render" => {
            let path = PathBuf::from(env.payload["svg"].as_str().context("render payload has no svg path")?);
            match std::fs::read(&path) {
                Ok(b) if Some(sha256_hex(&b).as_str()) == env.payload["svg_sha256"].as_str() => Ok(()),
                Ok(_) => Err(format!("{} changed since it was rendered", path.display())),
                Err(e) => Err(format!("{}: {e}", path.display())),
            }
        }
        other => bail!("unknown artifact kind `{other}`"),
    })
}

pub fn verify(ctx: &Ctx, cli: &VerifyArgs) -> Result<bool> {
    let a = ctx.cfg.resolve("verify", cli)?;
    let path = a.input.as_deref().context("missing --in (an artifact written by this tool)")?;
    let env = Envelope::read(path)?;
    let hash_ok = hash_inputs(&env.inputs) == env.input_hash;
    let result = verify_payload(&env)?;
    let pass = hash_ok && result.is_ok();
    let mut out = json!({ "kind": env.kind, "input_hash_ok": hash_ok, "pass": pass });
    if let Err(e) = &result {
        out["failure"] = json!(e);
    }
    show(&out);
    Ok(pass)
}

// ---------------------------------------------------------------- render

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct RenderArgs {
    #[arg(long = "box")]
    #[serde(rename = "box")]
    pub bx: Option<PathBuf>,
    /// Tubes 0..=depth are drawn, one layer each (default 3).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Segment artifact to overlay.
    #[arg(long)]
    pub segment: Option<PathBuf>,
    /// Witness artifact to overlay (segment, probes and orbits).
    #[arg(long)]
    pub witness: Option<PathBuf>,
    /// Orbit points drawn for a witness (default 200).
    #[arg(long)]
    pub orbit: Option<usize>,
    /// Image width and height in pixels (default 800).
    #[arg(long)]
    pub size: Option<u32>,
    /// Comma-separated subset of tubes,segment,probes,orbits (default all).
    #[arg(long)]
    pub layers: Option<String>,
    /// SVG output (default <out-dir>/figure.svg).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON manifest (default <out-dir>/render.json).
    #[arg(long)]
    pub out_manifest: Option<PathBuf>,
}

pub fn render(ctx: &Ctx, cli: &RenderArgs) -> Result<bool> {
    let a = ctx.cfg.resolve("render", cli)?;
    let (bx, box_hash) = load_box(&a.bx)?;
    let layers = render::Layers::parse(a.layers.as_deref().unwrap_or("tubes,segment,probes,orbits"))?;
    let segment = match &a.segment {
        Some(p) => Some(Envelope::read(p)?.payload_as::<SegmentPayload>("segment")?.segment.segment(&bx)),
        None => None,
    };
    let witness = match &a.witness {
        Some(p) => Some(Envelope::read(p)?.payload_as::<WitnessPayload>("witness")?.report),
        None => None,
    };
    let opts = render::Options { depth: a.depth.unwrap_or(3), size: a.size.unwrap_or(800), orbit: a.orbit.unwrap_or(200), layers };
    let svg_path = ctx.out_path(&a.out, "figure.svg");
    let manifest_path = ctx.out_path(&a.out_manifest, "render.json");
    let mut svg_file = config::open_output(&svg_path)?;
    let manifest = config::open_output(&manifest_path)?;
    let start = Instant::now();
    let fig = render::figure(&bx, segment.as_ref(), witness.as_ref(), &opts)?;
    svg_file.write_all(fig.svg.as_bytes())?;
    eprintln!("wrote {}", svg_path.display());
    let payload = json!({
        "svg": svg_path.to_string_lossy(),
        "svg_sha256": sha256_hex(fig.svg.as_bytes()),
        "tube_layers": fig.tube_layers,
        "polygons": fig.polygons,
    });
    let mut inputs = inputs_of(&a);
    inputs["box_sha256"] = json!(box_hash);
    let env = Envelope::new("render", inputs, payload, elapsed_ms(start));
    finish(manifest, &manifest_path, &env)?;
    Ok(true)
}
