//! SVG figures: polytope outline, thick carrier faces, carrier points and
//! arrowed gradient-tree leaves.

use std::fmt::Write;

use crate::compose::{CompositionTable, TreeTrace};
use crate::geometry::Geometry;
use crate::morse::{Carrier, Component, HomSpace};

pub const SIZE: f64 = 800.0;
const PANEL: f64 = 400.0;
const PAD: f64 = 40.0;

/// Maps display coordinates of P into a square panel.
struct Viewport {
    x0: f64,
    y0: f64,
    scale: f64,
    ox: f64,
    oy: f64,
}

impl Viewport {
    fn new(geom: &Geometry, ox: f64, oy: f64, size: f64) -> Self {
        let pts: Vec<[f64; 2]> = (0..geom.surface.vertices.len()).map(|v| geom.surface.frame.apply(geom.surface.vertex_f64(v))).collect();
        let (x0, x1) = pts.iter().fold((f64::MAX, f64::MIN), |a, p| (a.0.min(p[0]), a.1.max(p[0])));
        let (y0, y1) = pts.iter().fold((f64::MAX, f64::MIN), |a, p| (a.0.min(p[1]), a.1.max(p[1])));
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        Self { x0, y0: y0 + span, scale: (size - 2.0 * PAD) / span, ox: ox + PAD, oy: oy + PAD }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (self.ox + (p[0] - self.x0) * self.scale, self.oy + (self.y0 - p[1]) * self.scale)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
         <defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"8\" markerHeight=\"8\" orient=\"auto\">\
         <path d=\"M0,0 L10,5 L0,10 z\" fill=\"#c0392b\"/></marker></defs>\n\
         <rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n<title>{}</title>\n",
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn outline(out: &mut String, geom: &Geometry, vp: &Viewport) {
    let s = &geom.surface;
    for e in &s.edges {
        let a = vp.map(s.frame.apply(s.vertex_f64(e.start)));
        let b = vp.map(s.frame.apply(s.vertex_f64(e.end)));
        let _ = writeln!(out, "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#888\" stroke-dasharray=\"6,4\"/>", a.0, a.1, b.0, b.1);
        let mid = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
        let n = e.normal;
        let len = (n.0 as f64).hypot(n.1 as f64);
        let (lx, ly) = (mid.0 + 14.0 * n.0 as f64 / len, mid.1 - 14.0 * n.1 as f64 / len);
        let _ = writeln!(out, "<text x=\"{lx:.2}\" y=\"{ly:.2}\" font-size=\"11\" fill=\"#555\" text-anchor=\"middle\">{}</text>", e.name);
    }
}

fn carrier(out: &mut String, geom: &Geometry, vp: &Viewport, c: &Carrier, label: &str) {
    let s = &geom.surface;
    if c.whole {
        let pts: Vec<String> = (0..s.vertices.len())
            .map(|v| {
                let p = vp.map(s.frame.apply(s.vertex_f64(v)));
                format!("{:.2},{:.2}", p.0, p.1)
            })
            .collect();
        let _ = writeln!(out, "<polygon points=\"{}\" fill=\"#2c3e50\" fill-opacity=\"0.15\"/>", pts.join(" "));
        return;
    }
    for &e in &c.edges {
        let a = vp.map(s.frame.apply(s.vertex_f64(s.edges[e].start)));
        let b = vp.map(s.frame.apply(s.vertex_f64(s.edges[e].end)));
        let _ = writeln!(out, "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"5\"/>", a.0, a.1, b.0, b.1);
    }
    let on_edge: Vec<usize> = c.edges.iter().flat_map(|&e| [s.edges[e].start, s.edges[e].end]).collect();
    for site in c.point_sites(geom) {
        if let crate::morse::Site::Vertex(v) = site {
            if on_edge.contains(&v) {
                continue;
            }
        }
        let p = vp.map(site.display(geom));
        let _ = writeln!(out, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"black\"/>", p.0, p.1);
    }
    if !label.is_empty() {
        let anchor = match c.point_sites(geom).first() {
            _ if !c.edges.is_empty() => {
                let e = &s.edges[*c.edges.iter().next().unwrap()];
                let a = s.frame.apply(s.vertex_f64(e.start));
                let b = s.frame.apply(s.vertex_f64(e.end));
                vp.map([(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0])
            }
            Some(site) => vp.map(site.display(geom)),
            None => return,
        };
        let _ = writeln!(out, "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"#1a5276\">{}</text>", anchor.0 + 6.0, anchor.1 - 6.0, escape(label));
    }
}

fn tree(out: &mut String, vp: &Viewport, t: &TreeTrace) {
    if let TreeTrace::Traced { leaves, root, .. } = t {
        for l in leaves {
            let pts: Vec<String> = l
                .path
                .iter()
                .map(|p| {
                    let q = vp.map(*p);
                    format!("{:.2},{:.2}", q.0, q.1)
                })
                .collect();
            let _ = writeln!(out, "<polyline points=\"{}\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" marker-end=\"url(#arrow)\"/>", pts.join(" "));
        }
        let r = vp.map(*root);
        let _ = writeln!(out, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"5\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\"/>", r.0, r.1);
    }
}

fn label_of(c: &Component, prefix: &str) -> String {
    format!("{prefix}({},{})", c.i.0, c.i.1)
}

fn panel_title(out: &mut String, x: f64, y: f64, text: &str) {
    let _ = writeln!(out, "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" font-family=\"sans-serif\">{}</text>", x + 10.0, y + 20.0, escape(text));
}

/// One morphism space: polytope with every generator carrier in black and
/// rejected carriers in grey.
pub fn hom_figure(geom: &Geometry, h: &HomSpace) -> String {
    let mut out = String::new();
    header(&mut out, &format!("Hom({}, {})", h.from, h.to));
    let vp = Viewport::new(geom, 0.0, 0.0, SIZE);
    outline(&mut out, geom, &vp);
    for g in &h.generators {
        carrier(&mut out, geom, &vp, &g.carrier, &label_of(g, "V"));
    }
    panel_title(&mut out, 0.0, 0.0, &format!("{} → {}: {} generator(s)", h.from, h.to, h.dim()));
    out.push_str("</svg>\n");
    out
}

/// One triple `L1 → L2 → L3`: carriers of `Z`, `W`, `V` and the traced
/// non-trivial gradient trees.
pub fn triple_figure(geom: &Geometry, t: &CompositionTable, z: &HomSpace, w: &HomSpace, v: &HomSpace) -> String {
    let mut out = String::new();
    let title = format!("{} → {} → {}", t.triple[0], t.triple[1], t.triple[2]);
    header(&mut out, &title);
    let panels = [(0.0, 0.0, "Z", z), (PANEL, 0.0, "W", w), (0.0, PANEL, "V", v)];
    for (x, y, name, h) in panels {
        let vp = Viewport::new(geom, x, y, PANEL);
        outline(&mut out, geom, &vp);
        for g in &h.generators {
            carrier(&mut out, geom, &vp, &g.carrier, &label_of(g, name));
        }
        panel_title(&mut out, x, y, &format!("{name}: {} → {}", h.from, h.to));
    }
    let vp = Viewport::new(geom, PANEL, PANEL, PANEL);
    outline(&mut out, geom, &vp);
    for e in &t.entries {
        if let Some(tr) = &e.tree {
            if !tr.is_trivial() {
                carrier(&mut out, geom, &vp, &e.z_carrier, "");
                carrier(&mut out, geom, &vp, &e.w_carrier, "");
                tree(&mut out, &vp, tr);
            }
        }
    }
    panel_title(&mut out, PANEL, PANEL, "non-trivial trees");
    let _ = writeln!(out, "<line x1=\"{PANEL}\" y1=\"0\" x2=\"{PANEL}\" y2=\"{SIZE}\" stroke=\"#ddd\"/><line x1=\"0\" y1=\"{PANEL}\" x2=\"{SIZE}\" y2=\"{PANEL}\" stroke=\"#ddd\"/>");
    out.push_str("</svg>\n");
    out
}
