//! SVG 1.1 figures on the unit square. Coordinates are evaluated from exact
//! values at 128 bits and used for drawing only.

use std::fmt::Write;

use anyhow::{bail, Result};
use num_traits::Zero;
use toral_core::automorphism::{apply_matrix, reduce_mod1, ToralAuto};
use toral_core::boxconstruct::BoxB;
use toral_core::torusgeom::{lattice_candidates, plattice, EigenParallelogram, EigenSegment, Pt};
use toral_core::tubeverify::make_tubes;
use toral_core::witness::{make_probe, WitnessReport};
use toral_core::TowerExt;

type K = TowerExt;

const PREC: u32 = 128;

#[derive(Clone, Copy, Debug)]
pub struct Layers {
    pub tubes: bool,
    pub segment: bool,
    pub probes: bool,
    pub orbits: bool,
}

impl Layers {
    pub fn parse(s: &str) -> Result<Self> {
        let mut l = Layers { tubes: false, segment: false, probes: false, orbits: false };
        for name in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match name {
                "tubes" => l.tubes = true,
                "segment" => l.segment = true,
                "probes" => l.probes = true,
                "orbits" => l.orbits = true,
                _ => bail!("--layers: unknown layer {name:?}; use tubes, segment, probes, orbits"),
            }
        }
        Ok(l)
    }
}

pub struct Options {
    pub depth: usize,
    pub size: u32,
    pub orbit: usize,
    pub layers: Layers,
}

pub struct Figure {
    pub svg: String,
    pub tube_layers: usize,
    pub polygons: usize,
}

fn f(x: &K) -> f64 {
    x.enclose(PREC).to_f64()
}

fn fp(p: &Pt<K>) -> (f64, f64) {
    (f(&p.0), f(&p.1))
}

fn unit_square() -> Vec<Pt<K>> {
    let (z, o) = (K::zero(), K::from_int(1));
    vec![(z.clone(), z.clone()), (o.clone(), z.clone()), (o.clone(), o.clone()), (z, o)]
}

/// Every translate `p − k` that can meet the unit square, as float polygons.
fn translates(p: &EigenParallelogram<K>) -> Vec<[(f64, f64); 4]> {
    let verts = p.vertices();
    lattice_candidates(p, &unit_square())
        .into_iter()
        .map(|h| {
            let k = (-h.k.0, -h.k.1);
            let v: Vec<(f64, f64)> = verts.iter().map(|v| fp(&plattice(v, k))).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect()
}

fn polygon(out: &mut String, v: &[(f64, f64); 4]) {
    let pts: Vec<String> = v.iter().map(|(x, y)| format!("{x:.9},{y:.9}")).collect();
    let _ = writeln!(out, "    <polygon points=\"{}\"/>", pts.join(" "));
}

/// Lifts of a segment meeting the unit square, as float line segments.
fn segment_lines(s: &EigenSegment<K>) -> Vec<((f64, f64), (f64, f64))> {
    let (a, b) = s.endpoints();
    let (a, b) = (fp(&a), fp(&b));
    let (x0, x1) = (a.0.min(b.0).floor() as i64, a.0.max(b.0).ceil() as i64);
    let (y0, y1) = (a.1.min(b.1).floor() as i64, a.1.max(b.1).ceil() as i64);
    let mut out = vec![];
    for kx in x0 - 1..=x1 {
        for ky in y0 - 1..=y1 {
            let (dx, dy) = (kx as f64, ky as f64);
            out.push(((a.0 - dx, a.1 - dy), (b.0 - dx, b.1 - dy)));
        }
    }
    out
}

const TUBE_COLORS: [&str; 6] = ["#1b4f72", "#2874a6", "#3498db", "#5dade2", "#85c1e9", "#aed6f1"];

pub fn figure(bx: &BoxB, segment: Option<&EigenSegment<K>>, witness: Option<&WitnessReport>, o: &Options) -> Result<Figure> {
    let mut svg = String::new();
    let px = o.size;
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{px}" height="{px}" viewBox="0 0 1 1">"#
    );
    let _ = writeln!(svg, r#"  <title>box for {} with tubes 0..={}</title>"#, bx.t, o.depth);
    let _ = writeln!(svg, r#"  <defs><clipPath id="torus"><rect x="0" y="0" width="1" height="1"/></clipPath></defs>"#);
    let _ = writeln!(svg, r#"  <rect x="0" y="0" width="1" height="1" fill="white" stroke="black" stroke-width="0.002"/>"#);
    // y up
    let _ = writeln!(svg, r#"  <g clip-path="url(#torus)" transform="matrix(1 0 0 -1 0 1)">"#);
    let (mut tube_layers, mut polygons) = (0, 0);
    if o.layers.tubes {
        for tube in make_tubes(bx, o.depth).iter().rev() {
            let color = TUBE_COLORS[tube.depth.min(TUBE_COLORS.len() - 1)];
            let _ = writeln!(
                svg,
                r#"   <g id="tube-{}" class="tube-layer" fill="{color}" fill-opacity="0.55" stroke="none">"#,
                tube.depth
            );
            for v in translates(&tube.pgram) {
                polygon(&mut svg, &v);
                polygons += 1;
            }
            let _ = writeln!(svg, "   </g>");
            tube_layers += 1;
        }
    }
    let seg = segment.cloned().or_else(|| {
        witness.map(|w| EigenSegment {
            frame: bx.frame(),
            anchor: w.segment.anchor.clone(),
            axis: toral_core::torusgeom::Axis::Minus,
            t: w.segment.t.clone(),
            open: (true, true),
        })
    });
    if let (true, Some(s)) = (o.layers.segment, &seg) {
        let _ = writeln!(svg, r##"   <g id="segment" stroke="#c0392b" stroke-width="0.003">"##);
        for ((x0, y0), (x1, y1)) in segment_lines(s) {
            let _ = writeln!(svg, r#"    <line x1="{x0:.9}" y1="{y0:.9}" x2="{x1:.9}" y2="{y1:.9}"/>"#);
        }
        let _ = writeln!(svg, "   </g>");
    }
    if let Some(w) = witness {
        let s = ToralAuto::analyze(w.s_matrix)?;
        if o.layers.probes {
            let _ = writeln!(svg, r##"   <g id="probes" fill="#27ae60" fill-opacity="0.35" stroke="#1e8449" stroke-width="0.001">"##);
            for v in w.visits.iter().filter(|v| !v.auxiliary) {
                let p = make_probe(&v.r, v.ell, &s)?;
                for poly in translates(&p.pgram) {
                    polygon(&mut svg, &poly);
                }
            }
            let _ = writeln!(svg, "   </g>");
        }
        if o.layers.orbits {
            for (id, m, color) in [("t-orbit", w.t_matrix, "#7d3c98"), ("s-orbit", w.s_matrix, "#d35400")] {
                let _ = writeln!(svg, r#"   <g id="{id}" fill="{color}">"#);
                let mut cur = reduce_mod1(&w.point);
                for _ in 0..o.orbit {
                    let (x, y) = fp(&cur);
                    let _ = writeln!(svg, r#"    <circle cx="{x:.9}" cy="{y:.9}" r="0.003"/>"#);
                    cur = reduce_mod1(&apply_matrix(&m, &cur));
                }
                let _ = writeln!(svg, "   </g>");
            }
        }
    }
    let _ = writeln!(svg, "  </g>");
    let _ = writeln!(svg, "</svg>");
    Ok(Figure { svg, tube_layers, polygons })
}
