//! Diagram description and a small deterministic SVG writer.
//!
//! Horizontal axis `1/ρ`, vertical axis `r`. The shaded area is the region
//! strictly below the envelope; its boundary is open and drawn dashed.

use std::fmt::Write as _;

use serde::Deserialize;

use super::{FiniteRational, InputError};
use crate::envelope::{Envelope, RegularityAssertion};
use crate::exactnum::{ExtRat, Rational};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Style {
    #[default]
    Solid,
    Dashed,
    Dotted,
}

impl Style {
    fn dash(self) -> &'static str {
        match self {
            Style::Solid => "",
            Style::Dashed => " stroke-dasharray=\"6 4\"",
            Style::Dotted => " stroke-dasharray=\"2 3\"",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct PointSpec {
    pub x: FiniteRational,
    pub y: FiniteRational,
    #[serde(default)]
    pub label: String,
    /// Excluded point, drawn as a hollow circle.
    #[serde(default)]
    pub open: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct LineSpec {
    pub through: [[FiniteRational; 2]; 2],
    #[serde(default)]
    pub style: Style,
    #[serde(default)]
    pub label: String,
    /// Draw the whole line across the viewport instead of the segment.
    #[serde(default)]
    pub extend: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct RaySpec {
    #[serde(rename = "invP")]
    pub inv_p: FiniteRational,
    pub d: Option<u32>,
    #[serde(default)]
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Viewport {
    pub x_min: FiniteRational,
    pub x_max: FiniteRational,
    pub y_min: FiniteRational,
    pub y_max: FiniteRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct RegionSpec {
    pub assertions: Vec<super::profile::AssertionSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagramSpec {
    pub dimension: u32,
    #[serde(default)]
    pub region: Option<RegionSpec>,
    #[serde(default)]
    pub points: Vec<PointSpec>,
    #[serde(default)]
    pub lines: Vec<LineSpec>,
    #[serde(default)]
    pub adaptivity_rays: Vec<RaySpec>,
    #[serde(default)]
    pub viewport: Option<Viewport>,
}

#[derive(Debug, Clone)]
pub struct Marker {
    pub x: Rational,
    pub y: Rational,
    pub label: String,
    pub open: bool,
}

#[derive(Debug, Clone)]
pub struct Stroke {
    pub ends: [(Rational, Rational); 2],
    pub style: Style,
    pub label: String,
    pub extend: bool,
}

/// Adaptivity ray of slope `d` from `(1/p, 0)`.
#[derive(Debug, Clone)]
pub struct Ray {
    pub inv_p: Rational,
    pub d: u32,
    pub label: String,
}

/// Resolved diagram ready to render.
#[derive(Debug, Clone, Default)]
pub struct Diagram {
    pub d: u32,
    pub envelope: Option<Envelope>,
    pub points: Vec<Marker>,
    pub lines: Vec<Stroke>,
    pub rays: Vec<Ray>,
    pub viewport: Option<[Rational; 4]>,
    pub title: String,
}

impl Diagram {
    pub fn new(d: u32, title: impl Into<String>) -> Self {
        Diagram {
            d,
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn region(mut self, assertions: &[RegularityAssertion]) -> Self {
        let d = Rational::from_integer(self.d.into());
        self.envelope = Some(Envelope::from_assertions(assertions, &d));
        self
    }

    pub fn point(mut self, x: &Rational, y: &Rational, label: impl Into<String>, open: bool) -> Self {
        self.points.push(Marker {
            x: x.clone(),
            y: y.clone(),
            label: label.into(),
            open,
        });
        self
    }

    pub fn line(
        mut self,
        a: (&Rational, &Rational),
        b: (&Rational, &Rational),
        style: Style,
        label: impl Into<String>,
        extend: bool,
    ) -> Self {
        self.lines.push(Stroke {
            ends: [(a.0.clone(), a.1.clone()), (b.0.clone(), b.1.clone())],
            style,
            label: label.into(),
            extend,
        });
        self
    }

    pub fn ray(mut self, inv_p: &Rational, label: impl Into<String>) -> Self {
        self.rays.push(Ray {
            inv_p: inv_p.clone(),
            d: self.d,
            label: label.into(),
        });
        self
    }

    pub fn from_spec(spec: &DiagramSpec) -> Result<Diagram, InputError> {
        if spec.dimension == 0 {
            return Err(InputError::new("dimension must be positive"));
        }
        let mut diagram = Diagram::new(spec.dimension, "");
        if let Some(region) = &spec.region {
            let rays = region
                .assertions
                .iter()
                .map(|a| a.to_assertion())
                .collect::<Result<Vec<_>, _>>()?;
            diagram = diagram.region(&rays);
        }
        for p in &spec.points {
            diagram = diagram.point(&p.x.0, &p.y.0, p.label.clone(), p.open);
        }
        for l in &spec.lines {
            let [a, b] = &l.through;
            if a[0].0 == b[0].0 && a[1].0 == b[1].0 {
                return Err(InputError::new("a line needs two distinct points"));
            }
            diagram = diagram.line((&a[0].0, &a[1].0), (&b[0].0, &b[1].0), l.style, l.label.clone(), l.extend);
        }
        for r in &spec.adaptivity_rays {
            if r.inv_p.0 < Rational::from_integer(0.into()) {
                return Err(InputError::new("adaptivity ray needs 1/p >= 0"));
            }
            diagram.rays.push(Ray {
                inv_p: r.inv_p.0.clone(),
                d: r.d.unwrap_or(spec.dimension),
                label: r.label.clone(),
            });
        }
        if let Some(v) = &spec.viewport {
            let vp = [v.x_min.0.clone(), v.x_max.0.clone(), v.y_min.0.clone(), v.y_max.0.clone()];
            if vp[0] >= vp[1] || vp[2] >= vp[3] {
                return Err(InputError::new("viewport must have x_min < x_max and y_min < y_max"));
            }
            for (x, y) in diagram.anchors() {
                if x < vp[0] || x > vp[1] || y < vp[2] || y > vp[3] {
                    return Err(InputError::new(format!(
                        "viewport does not contain ({}, {})",
                        ExtRat::from(x),
                        ExtRat::from(y)
                    )));
                }
            }
            diagram.viewport = Some(vp);
        }
        Ok(diagram)
    }

    /// Every point the viewport must contain.
    fn anchors(&self) -> Vec<(Rational, Rational)> {
        let zero = Rational::from_integer(0.into());
        let mut out = Vec::new();
        if let Some(Envelope::Finite(b)) = &self.envelope {
            out.extend(b.iter().map(|p| (p.x.clone(), p.y.clone())));
        }
        out.extend(self.points.iter().map(|p| (p.x.clone(), p.y.clone())));
        for l in &self.lines {
            out.extend(l.ends.iter().cloned());
        }
        out.extend(self.rays.iter().map(|r| (r.inv_p.clone(), zero.clone())));
        out
    }

    fn auto_viewport(&self) -> [f64; 4] {
        let pts: Vec<(f64, f64)> = self
            .anchors()
            .iter()
            .map(|(x, y)| (ExtRat::from(x).to_f64(), ExtRat::from(y).to_f64()))
            .collect();
        let mut vp = [0.0f64, 1.0, 0.0, 1.0];
        for (x, y) in pts {
            vp[0] = vp[0].min(x);
            vp[1] = vp[1].max(x);
            vp[2] = vp[2].min(y);
            vp[3] = vp[3].max(y);
        }
        vp
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        (x - self.x0) / (self.x1 - self.x0) * WIDTH
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - (y - self.y0) / (self.y1 - self.y0) * HEIGHT
    }

    /// Clip `p + t (q - p)` for `t` in `[t_lo, t_hi]` to the frame.
    fn clip(&self, p: (f64, f64), q: (f64, f64), t_lo: f64, t_hi: f64) -> Option<((f64, f64), (f64, f64))> {
        let (dx, dy) = (q.0 - p.0, q.1 - p.1);
        let (mut lo, mut hi) = (t_lo, t_hi);
        for (step, dist) in [
            (-dx, p.0 - self.x0),
            (dx, self.x1 - p.0),
            (-dy, p.1 - self.y0),
            (dy, self.y1 - p.1),
        ] {
            if step == 0.0 {
                if dist < 0.0 {
                    return None;
                }
                continue;
            }
            let t = dist / step;
            if step < 0.0 {
                lo = lo.max(t);
            } else {
                hi = hi.min(t);
            }
        }
        (lo <= hi).then_some(((p.0 + lo * dx, p.1 + lo * dy), (p.0 + hi * dx, p.1 + hi * dy)))
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn f(x: &Rational) -> f64 {
    ExtRat::from(x).to_f64()
}

/// Renders the diagram. Identical input gives byte-identical output.
pub fn render(diagram: &Diagram) -> String {
    let vp = match &diagram.viewport {
        Some(v) => [f(&v[0]), f(&v[1]), f(&v[2]), f(&v[3])],
        None => diagram.auto_viewport(),
    };
    let (mx, my) = ((vp[1] - vp[0]) * 0.1, (vp[3] - vp[2]) * 0.1);
    let fr = Frame {
        x0: vp[0] - mx,
        x1: vp[1] + mx,
        y0: vp[2] - my,
        y1: vp[3] + my,
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"serif\" font-size=\"13\">"
    );
    if !diagram.title.is_empty() {
        let _ = writeln!(out, "<title>{}</title>", escape(&diagram.title));
    }
    let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");

    region(&mut out, &fr, diagram);
    axes(&mut out, &fr);

    for l in &diagram.lines {
        let p = (f(&l.ends[0].0), f(&l.ends[0].1));
        let q = (f(&l.ends[1].0), f(&l.ends[1].1));
        let (lo, hi) = if l.extend { (f64::NEG_INFINITY, f64::INFINITY) } else { (0.0, 1.0) };
        if let Some((a, b)) = fr.clip(p, q, lo, hi) {
            segment(&mut out, &fr, a, b, "#333333", l.style.dash());
            if !l.label.is_empty() {
                text(&mut out, fr.px(b.0) - 4.0, fr.py(b.1) - 6.0, "end", &l.label);
            }
        }
    }
    for r in &diagram.rays {
        let p = (f(&r.inv_p), 0.0);
        let q = (p.0 + 1.0, f64::from(r.d));
        if let Some((a, b)) = fr.clip(p, q, 0.0, f64::INFINITY) {
            segment(&mut out, &fr, a, b, "#a33", Style::Dashed.dash());
            if !r.label.is_empty() {
                text(&mut out, fr.px(b.0) - 4.0, fr.py(b.1) + 14.0, "end", &r.label);
            }
        }
    }
    for m in &diagram.points {
        let (label, open) = (&m.label, m.open);
        let (cx, cy) = (fr.px(f(&m.x)), fr.py(f(&m.y)));
        let fill = if open { "white" } else { "black" };
        let _ = writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"{fill}\" stroke=\"black\"/>",
            num(cx),
            num(cy)
        );
        if !label.is_empty() {
            text(&mut out, cx + 6.0, cy - 6.0, "start", label);
        }
    }
    out.push_str("</svg>\n");
    out
}

fn segment(out: &mut String, fr: &Frame, a: (f64, f64), b: (f64, f64), colour: &str, dash: &str) {
    let _ = writeln!(
        out,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{colour}\" stroke-width=\"1.5\"{dash}/>",
        num(fr.px(a.0)),
        num(fr.py(a.1)),
        num(fr.px(b.0)),
        num(fr.py(b.1))
    );
}

fn text(out: &mut String, x: f64, y: f64, anchor: &str, s: &str) {
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\">{}</text>",
        num(x),
        num(y),
        escape(s)
    );
}

fn axes(out: &mut String, fr: &Frame) {
    if fr.y0 <= 0.0 && 0.0 <= fr.y1 {
        segment(out, fr, (fr.x0, 0.0), (fr.x1, 0.0), "black", "");
    }
    if fr.x0 <= 0.0 && 0.0 <= fr.x1 {
        segment(out, fr, (0.0, fr.y0), (0.0, fr.y1), "black", "");
    }
    let ax = fr.px(0.0f64.clamp(fr.x0, fr.x1));
    let ay = fr.py(0.0f64.clamp(fr.y0, fr.y1));
    text(out, WIDTH - 6.0, ay - 6.0, "end", "1/ρ");
    text(out, ax + 6.0, 14.0, "start", "r");
    // Integer ticks when there are few enough of them.
    let span = (fr.x1 - fr.x0).max(fr.y1 - fr.y0);
    if span <= 12.0 {
        for k in (fr.x0.ceil() as i64)..=(fr.x1.floor() as i64) {
            if k != 0 {
                let x = fr.px(k as f64);
                let _ = writeln!(
                    out,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
                    num(x),
                    num(ay - 3.0),
                    num(x),
                    num(ay + 3.0)
                );
                text(out, x, ay + 16.0, "middle", &k.to_string());
            }
        }
        for k in (fr.y0.ceil() as i64)..=(fr.y1.floor() as i64) {
            if k != 0 {
                let y = fr.py(k as f64);
                let _ = writeln!(
                    out,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
                    num(ax - 3.0),
                    num(y),
                    num(ax + 3.0),
                    num(y)
                );
                text(out, ax - 6.0, y + 4.0, "end", &k.to_string());
            }
        }
    }
}

fn region(out: &mut String, fr: &Frame, diagram: &Diagram) {
    let Some(env) = &diagram.envelope else { return };
    let bottom = fr.y0;
    let right = fr.x1;
    let top: Vec<(f64, f64)> = match env {
        Envelope::Empty => return,
        Envelope::Infinite => vec![(0.0, fr.y1), (right, fr.y1)],
        Envelope::Finite(b) => {
            let mut v: Vec<(f64, f64)> = b.iter().map(|p| (f(&p.x), f(&p.y))).collect();
            let last = v.last().map(|p| p.1).unwrap_or(0.0);
            v.push((right.max(v.last().map(|p| p.0).unwrap_or(0.0)), last));
            v
        }
    };
    let mut poly = format!("{},{}", num(fr.px(0.0)), num(fr.py(bottom)));
    for (x, y) in &top {
        let _ = write!(poly, " {},{}", num(fr.px(*x)), num(fr.py(y.clamp(fr.y0, fr.y1))));
    }
    let _ = write!(poly, " {},{}", num(fr.px(right)), num(fr.py(bottom)));
    let _ = writeln!(out, "<polygon points=\"{poly}\" fill=\"#d6e4f5\" stroke=\"none\"/>");
    let line: Vec<String> = top
        .iter()
        .map(|(x, y)| format!("{},{}", num(fr.px(*x)), num(fr.py(y.clamp(fr.y0, fr.y1)))))
        .collect();
    let _ = writeln!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f4e8c\" stroke-width=\"1.5\"{}/>",
        line.join(" "),
        Style::Dashed.dash()
    );
}
