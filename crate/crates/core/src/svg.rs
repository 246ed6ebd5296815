//! Deterministic SVG plots of ROC space and cost space.
//!
//! Panels sit side by side, each `width x height` pixels. Coordinates are
//! printed with three decimals, so equal inputs give byte-identical files.

use std::fmt::Write;

use crate::cost_model::{ConditionKind, CostLine};
use crate::curves::PiecewiseLinearCurve;
use crate::roc::RocCurve;

pub const DEFAULT_SIZE: u32 = 640;
const MARGIN: f64 = 48.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    /// ROC curve.
    Solid,
    /// Hull and optimal cost curve.
    Dashed,
    /// Cost lines.
    Faint,
    /// Rate-driven cost curve.
    Thick,
    /// Brier curve and fixed-method lines.
    Thin,
}

impl Style {
    fn attrs(self) -> &'static str {
        match self {
            Style::Solid => r##"stroke="#000" stroke-width="2""##,
            Style::Dashed => r##"stroke="#000" stroke-width="1.5" stroke-dasharray="6 4""##,
            Style::Faint => r##"stroke="#999" stroke-width="0.75""##,
            Style::Thick => r##"stroke="#c00" stroke-width="3""##,
            Style::Thin => r##"stroke="#06c" stroke-width="1""##,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// Connected vertices.
    Polyline(Vec<(f64, f64)>),
    /// Independent line pieces; jumps between pieces stay visible.
    Pieces(Vec<[(f64, f64); 2]>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Overlay {
    pub label: String,
    pub style: Style,
    pub shape: Shape,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PanelSpace {
    Roc,
    Cost(ConditionKind),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Panel {
    pub space: PanelSpace,
    pub overlays: Vec<Overlay>,
}

impl Panel {
    /// Top of the vertical axis: 1, or the largest plotted value when a
    /// cost-proportion loss exceeds 1.
    fn y_max(&self) -> f64 {
        let mut top = 1.0f64;
        for o in &self.overlays {
            match &o.shape {
                Shape::Polyline(pts) => pts.iter().for_each(|p| top = top.max(p.1)),
                Shape::Pieces(ps) => ps.iter().flatten().for_each(|p| top = top.max(p.1)),
            }
        }
        top
    }

    fn axis_labels(&self) -> (&'static str, &'static str) {
        match self.space {
            PanelSpace::Roc => ("false positive rate F1", "true positive rate F0"),
            PanelSpace::Cost(ConditionKind::CostProportion) => ("cost proportion c", "loss"),
            PanelSpace::Cost(ConditionKind::Skew) => ("skew z", "loss"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotSpec {
    pub panels: Vec<Panel>,
    pub width: u32,
    pub height: u32,
}

impl PlotSpec {
    pub fn new(panels: Vec<Panel>) -> Self {
        PlotSpec {
            panels,
            width: DEFAULT_SIZE,
            height: DEFAULT_SIZE,
        }
    }

    pub fn render(&self) -> String {
        assert!(!self.panels.is_empty(), "plot needs at least one panel");
        let total = self.width as usize * self.panels.len();
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{total}" height="{h}" viewBox="0 0 {total} {h}">"#,
            h = self.height
        );
        let _ = writeln!(out, r##"<rect width="{total}" height="{}" fill="#fff"/>"##, self.height);
        for (i, panel) in self.panels.iter().enumerate() {
            let _ = writeln!(out, r#"<g transform="translate({},0)">"#, i as u32 * self.width);
            self.render_panel(&mut out, panel);
            out.push_str("</g>\n");
        }
        out.push_str("</svg>\n");
        out
    }

    fn render_panel(&self, out: &mut String, panel: &Panel) {
        let (w, h) = (self.width as f64, self.height as f64);
        let y_max = panel.y_max();
        let px = |x: f64| MARGIN + x * (w - 2.0 * MARGIN);
        let py = |y: f64| h - MARGIN - y / y_max * (h - 2.0 * MARGIN);
        let pt = |p: (f64, f64)| format!("{:.3},{:.3}", px(p.0), py(p.1));

        let _ = writeln!(
            out,
            r##"<rect x="{m}" y="{m}" width="{:.3}" height="{:.3}" fill="none" stroke="#000" stroke-width="1"/>"##,
            w - 2.0 * MARGIN,
            h - 2.0 * MARGIN,
            m = MARGIN
        );
        for t in [0.0, 0.5, 1.0] {
            let _ = writeln!(
                out,
                r#"<text x="{:.3}" y="{:.3}" font-size="12" text-anchor="middle">{t}</text>"#,
                px(t),
                h - MARGIN + 16.0
            );
        }
        let mut ticks = vec![0.0, 0.5, 1.0];
        if y_max > 1.0 {
            ticks.push(y_max);
        }
        for t in ticks {
            let _ = writeln!(
                out,
                r#"<text x="{:.3}" y="{:.3}" font-size="12" text-anchor="end">{}</text>"#,
                MARGIN - 6.0,
                py(t) + 4.0,
                (t * 1000.0).round() / 1000.0
            );
        }
        let (xl, yl) = panel.axis_labels();
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-size="13" text-anchor="middle">{xl}</text>"#,
            w / 2.0,
            h - 12.0
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{:.3}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.3})">{yl}</text>"#,
            h / 2.0,
            h / 2.0
        );

        for o in &panel.overlays {
            match &o.shape {
                Shape::Polyline(pts) => {
                    let points: Vec<String> = pts.iter().map(|&p| pt(p)).collect();
                    let _ = writeln!(
                        out,
                        r#"<polyline class="{}" fill="none" {} points="{}"/>"#,
                        o.label,
                        o.style.attrs(),
                        points.join(" ")
                    );
                }
                Shape::Pieces(pieces) => {
                    let mut d = String::new();
                    for (i, [a, b]) in pieces.iter().enumerate() {
                        if i > 0 {
                            d.push(' ');
                        }
                        let _ = write!(d, "M{} L{}", pt(*a), pt(*b));
                    }
                    let _ = writeln!(
                        out,
                        r#"<path class="{}" fill="none" {} d="{d}"/>"#,
                        o.label,
                        o.style.attrs()
                    );
                }
            }
        }
    }
}

/// ROC curve (solid) and its convex hull (dashed).
pub fn roc_panel(roc: &RocCurve) -> Panel {
    let vertices = |c: &RocCurve| c.points().iter().map(|p| (p.fpr, p.tpr)).collect();
    Panel {
        space: PanelSpace::Roc,
        overlays: vec![
            Overlay {
                label: "roc".into(),
                style: Style::Solid,
                shape: Shape::Polyline(vertices(roc)),
            },
            Overlay {
                label: "hull".into(),
                style: Style::Dashed,
                shape: Shape::Polyline(vertices(&roc.convex_hull())),
            },
        ],
    }
}

fn curve_style(label: &str) -> Style {
    match label {
        "optimal" => Style::Dashed,
        "rate-driven" => Style::Thick,
        _ => Style::Thin,
    }
}

/// Cost lines (faint) under the given method curves.
pub fn cost_panel(kind: ConditionKind, lines: &[CostLine], curves: &[PiecewiseLinearCurve]) -> Panel {
    let mut overlays = vec![Overlay {
        label: "cost-lines".into(),
        style: Style::Faint,
        shape: Shape::Pieces(
            lines
                .iter()
                .map(|l| [(0.0, l.loss_at_0), (1.0, l.loss_at_1)])
                .collect(),
        ),
    }];
    for c in curves {
        overlays.push(Overlay {
            label: c.label().to_string(),
            style: curve_style(c.label()),
            shape: Shape::Pieces(
                c.segments()
                    .iter()
                    .map(|s| [(s.x_lo, s.y_lo), (s.x_hi, s.y_hi)])
                    .collect(),
            ),
        });
    }
    Panel {
        space: PanelSpace::Cost(kind),
        overlays,
    }
}
