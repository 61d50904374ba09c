//! Static SVG 1.1 drawing of a portrait: direction field on a lattice,
//! trajectories, highlighted saddle branches and the equilibria.

use std::fmt::Write;

use vdp_conley::model::{vector_field, EquilibriumReport, StabilityClass, State, SystemParams};

use crate::portrait::{Branch, BranchRole};
use crate::report::ViewBox;

const WIDTH: f64 = 900.0;
const ARROWS_ACROSS: usize = 24;

struct Frame {
    view: ViewBox,
    width: f64,
    height: f64,
}

impl Frame {
    fn px(&self, s: State) -> (f64, f64) {
        let v = &self.view;
        (
            (s.x - v.x_min) / (v.x_max - v.x_min) * self.width,
            (v.y_max - s.y) / (v.y_max - v.y_min) * self.height,
        )
    }
}

fn style(role: BranchRole) -> (&'static str, f64) {
    match role {
        BranchRole::Grid => ("#9a9a9a", 0.8),
        BranchRole::NearSource => ("#2a8a2a", 1.2),
        BranchRole::Unstable => ("#c62828", 2.0),
        BranchRole::Stable => ("#1f5fbf", 2.0),
    }
}

pub fn render(p: &SystemParams, view: &ViewBox, branches: &[Branch], equilibria: &[EquilibriumReport]) -> String {
    let height = WIDTH * (view.y_max - view.y_min) / (view.x_max - view.x_min);
    let f = Frame { view: *view, width: WIDTH, height };
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}">"#
    );
    let _ = writeln!(
        w,
        r#"<title>d = {}, e = {}, theta = {}</title>"#,
        p.d(),
        p.e(),
        p.theta()
    );
    let _ = writeln!(w, r#"<defs><clipPath id="view"><rect x="0" y="0" width="{WIDTH:.0}" height="{height:.0}"/></clipPath></defs>"#);
    let _ = writeln!(w, r#"<rect x="0" y="0" width="{WIDTH:.0}" height="{height:.0}" fill="white" stroke="black"/>"#);

    // axes
    let (ox, oy) = f.px(State::new(0.0, 0.0));
    let _ = writeln!(w, r##"<g stroke="#dddddd" stroke-width="1">"##);
    let _ = writeln!(w, r#"<line x1="0" y1="{oy:.2}" x2="{WIDTH:.0}" y2="{oy:.2}"/>"#);
    let _ = writeln!(w, r#"<line x1="{ox:.2}" y1="0" x2="{ox:.2}" y2="{height:.0}"/>"#);
    let _ = writeln!(w, "</g>");

    // direction field, unit arrows in screen space
    let cell = WIDTH / ARROWS_ACROSS as f64;
    let rows = (height / cell).floor().max(1.0) as usize;
    let _ = writeln!(w, r##"<g stroke="#b0b0b0" stroke-width="0.8" fill="none">"##);
    for i in 0..ARROWS_ACROSS {
        for j in 0..rows {
            let (cx, cy) = ((i as f64 + 0.5) * cell, (j as f64 + 0.5) * height / rows as f64);
            let x = view.x_min + cx / WIDTH * (view.x_max - view.x_min);
            let y = view.y_max - cy / height * (view.y_max - view.y_min);
            let v = vector_field(p, State::new(x, y));
            let (dx, dy) = (v.x / (view.x_max - view.x_min) * WIDTH, -v.y / (view.y_max - view.y_min) * height);
            let n = dx.hypot(dy);
            if n == 0.0 || !n.is_finite() {
                continue;
            }
            let (ux, uy) = (dx / n, dy / n);
            let len = 0.35 * cell;
            let (x0, y0, x1, y1) = (cx - ux * len, cy - uy * len, cx + ux * len, cy + uy * len);
            let head = 0.3 * len;
            let (hx1, hy1) = (x1 - head * (ux - 0.5 * uy), y1 - head * (uy + 0.5 * ux));
            let (hx2, hy2) = (x1 - head * (ux + 0.5 * uy), y1 - head * (uy - 0.5 * ux));
            let _ = writeln!(
                w,
                r#"<path d="M{x0:.2},{y0:.2} L{x1:.2},{y1:.2} M{hx1:.2},{hy1:.2} L{x1:.2},{y1:.2} L{hx2:.2},{hy2:.2}"/>"#
            );
        }
    }
    let _ = writeln!(w, "</g>");

    // grid trajectories first so the saddle branches end up on top
    let _ = writeln!(w, r#"<g clip-path="url(#view)" fill="none">"#);
    let order = [BranchRole::Grid, BranchRole::NearSource, BranchRole::Stable, BranchRole::Unstable];
    for role in order {
        for b in branches.iter().filter(|b| b.role == role && b.rows.len() > 1) {
            let (color, width) = style(role);
            let mut points = String::new();
            for r in &b.rows {
                let (x, y) = f.px(r.state);
                let _ = write!(points, "{x:.2},{y:.2} ");
            }
            let _ = writeln!(
                w,
                r#"<polyline id="{}" stroke="{color}" stroke-width="{width}" points="{}"/>"#,
                b.id,
                points.trim_end()
            );
        }
    }
    let _ = writeln!(w, "</g>");

    for r in equilibria {
        let (x, y) = f.px(r.location);
        let fill = match r.class {
            StabilityClass::Sink | StabilityClass::WeakSink => "black",
            StabilityClass::Source => "white",
            StabilityClass::Saddle | StabilityClass::Degenerate(_) => "#808080",
        };
        let _ = writeln!(w, r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="{fill}" stroke="black"/>"#);
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="13">{} {}</text>"#,
            x + 7.0,
            y - 7.0,
            r.which,
            r.class
        );
    }
    let _ = writeln!(w, "</svg>");
    s
}
