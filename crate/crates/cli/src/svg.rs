//! Static SVG plot of a run: dash-dot trajectories, square start markers,
//! cross goal markers, and safety-radius circles and velocity arrows at the
//! final positions.

use hetsafe_core::{Scenario, TrajectoryLog, Vec2};
use std::fmt::Write;

const WIDTH_PX: f64 = 640.0;
const PAD_PX: f64 = 24.0;
const MARKER_PX: f64 = 8.0;
/// Seconds of travel drawn by a velocity arrow.
const ARROW_S: f64 = 1.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

struct Frame {
    min: Vec2,
    scale: f64,
    height: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = Vec2>, margin: f64) -> Self {
        let mut min = Vec2::repeat(f64::INFINITY);
        let mut max = Vec2::repeat(f64::NEG_INFINITY);
        for p in points {
            min = min.inf(&p);
            max = max.sup(&p);
        }
        min -= Vec2::repeat(margin);
        max += Vec2::repeat(margin);
        let span = (max - min).map(|s| s.max(1e-9));
        let scale = (WIDTH_PX - 2.0 * PAD_PX) / span.x;
        Self {
            min,
            scale,
            height: span.y * scale + 2.0 * PAD_PX,
        }
    }

    /// World metres to pixels, y axis pointing up.
    fn px(&self, p: &Vec2) -> (f64, f64) {
        let x = PAD_PX + (p.x - self.min.x) * self.scale;
        let y = self.height - PAD_PX - (p.y - self.min.y) * self.scale;
        (x, y)
    }
}

pub fn render_svg(log: &TrajectoryLog, scenario: &Scenario) -> String {
    let n = scenario.n_agents();
    let path = |i: usize| -> Vec<Vec2> {
        let mut pts: Vec<Vec2> = log.records.iter().map(|r| r.agents[i].state.p).collect();
        pts.push(log.final_states[i].p);
        pts
    };
    let paths: Vec<Vec<Vec2>> = (0..n).map(path).collect();
    let margin = scenario
        .agents
        .iter()
        .map(|a| a.params.radius)
        .fold(0.0, f64::max)
        + 0.1;
    let frame = Frame::fit(
        paths
            .iter()
            .flatten()
            .copied()
            .chain(scenario.agents.iter().map(|a| a.goal)),
        margin,
    );

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}">"#,
        WIDTH_PX, frame.height, WIDTH_PX, frame.height
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, (pts, spec)) in paths.iter().zip(&scenario.agents).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let id = spec.params.id;
        let _ = writeln!(s, r#"<g id="agent-{id}" stroke="{color}" fill="none">"#);
        let coords: Vec<String> = pts
            .iter()
            .map(|p| {
                let (x, y) = frame.px(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="trajectory" stroke-dasharray="8 3 2 3" points="{}"/>"#,
            coords.join(" ")
        );
        let (sx, sy) = frame.px(&pts[0]);
        let h = MARKER_PX / 2.0;
        let _ = writeln!(
            s,
            r#"<rect class="start" x="{:.2}" y="{:.2}" width="{MARKER_PX:.0}" height="{MARKER_PX:.0}"/>"#,
            sx - h,
            sy - h
        );
        let (gx, gy) = frame.px(&spec.goal);
        let _ = writeln!(
            s,
            r#"<path class="goal" d="M{:.2},{:.2}L{:.2},{:.2}M{:.2},{:.2}L{:.2},{:.2}"/>"#,
            gx - h,
            gy - h,
            gx + h,
            gy + h,
            gx - h,
            gy + h,
            gx + h,
            gy - h
        );
        let last = &log.final_states[i];
        let (cx, cy) = frame.px(&last.p);
        let _ = writeln!(
            s,
            r#"<circle class="radius" cx="{cx:.2}" cy="{cy:.2}" r="{:.2}"/>"#,
            spec.params.radius * frame.scale
        );
        let (ax, ay) = frame.px(&(last.p + last.v * ARROW_S));
        let _ = writeln!(
            s,
            r#"<line class="velocity" x1="{cx:.2}" y1="{cy:.2}" x2="{ax:.2}" y2="{ay:.2}"/>"#
        );
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}
