//! Deterministic SVG rendering of tile graphs.
//!
//! Coordinates are written in tiling units with four decimals and the y axis
//! flipped; tiles are emitted in id order.

use std::collections::HashMap;
use std::fmt::Write;

use quasiperc::dynamics::Configuration;
use quasiperc::geom::Vec2;
use quasiperc::graph::AdjacencyGraph;
use quasiperc::Result;

const PALETTE: [&str; 12] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
    "#86bcb6", "#d37295",
];
const HEALTHY: &str = "#ffffff";
const INFECTED: &str = "#3b3b3b";
const MUTED: &str = "#e6e6e6";

pub enum Fill<'a> {
    /// Colour by rhombus shape (acute angle).
    Shape,
    State(&'a Configuration),
    /// Colour by cluster index; tiles outside every cluster are white.
    Cluster(&'a [Vec<u32>]),
    /// Alternate colours along the chains of one edge family.
    Chain(usize),
}

#[derive(Clone, Debug)]
pub struct Style {
    pub stroke_width: f64,
    /// Pixels per tiling unit.
    pub scale: f64,
    pub highlight: Vec<u32>,
    /// `[x0, y0, x1, y1]` in tiling coordinates; tiles whose centre lies
    /// outside are dropped.
    pub viewport: Option<[f64; 4]>,
}

impl Default for Style {
    fn default() -> Self {
        Self { stroke_width: 0.03, scale: 24.0, highlight: Vec::new(), viewport: None }
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn shape_colour(c: &[Vec2; 4]) -> &'static str {
    let a = c[1] - c[0];
    let b = c[3] - c[0];
    let mut deg = (a.dot(b) / (a.norm() * b.norm())).clamp(-1.0, 1.0).acos().to_degrees();
    if deg > 90.0 {
        deg = 180.0 - deg;
    }
    PALETTE[(deg / 9.0).round() as usize % PALETTE.len()]
}

pub fn render(graph: &AdjacencyGraph, fill: &Fill, style: &Style) -> Result<String> {
    let visible: Vec<u32> = (0..graph.len() as u32)
        .filter(|&t| match style.viewport {
            Some([x0, y0, x1, y1]) => {
                let c = graph.center(t);
                (x0..=x1).contains(&c.x) && (y0..=y1).contains(&c.y)
            }
            None => true,
        })
        .collect();

    let colours: Vec<&str> = match fill {
        Fill::Shape => (0..graph.len() as u32).map(|t| shape_colour(&graph.corner_positions(t))).collect(),
        Fill::State(c) => c.state.iter().map(|&s| if s != 0 { INFECTED } else { HEALTHY }).collect(),
        Fill::Cluster(clusters) => {
            let mut v = vec![HEALTHY; graph.len()];
            for (i, cl) in clusters.iter().enumerate() {
                for &t in cl {
                    v[t as usize] = PALETTE[i % PALETTE.len()];
                }
            }
            v
        }
        Fill::Chain(family) => {
            let index = graph.chain_index()?;
            let mut v = vec![MUTED; graph.len()];
            for (k, chain) in index.chains().iter().filter(|c| c.family == *family).enumerate() {
                for &t in &chain.tiles {
                    v[t as usize] = PALETTE[k % 2];
                }
            }
            v
        }
    };

    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &t in &visible {
        for p in graph.corner_positions(t) {
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
            y0 = y0.min(-p.y);
            y1 = y1.max(-p.y);
        }
    }
    if visible.is_empty() {
        (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
    }
    let pad = 0.5;
    let (vx, vy, vw, vh) = (x0 - pad, y0 - pad, x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">",
        num(vw * style.scale),
        num(vh * style.scale),
        num(vx),
        num(vy),
        num(vw),
        num(vh)
    );
    let points = |t: u32| {
        graph
            .corner_positions(t)
            .iter()
            .map(|p| format!("{},{}", num(p.x), num(-p.y)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(
        out,
        "<g stroke=\"#444444\" stroke-width=\"{}\" stroke-linejoin=\"round\">",
        num(style.stroke_width)
    );
    for &t in &visible {
        let _ = writeln!(out, "<polygon id=\"t{t}\" points=\"{}\" fill=\"{}\"/>", points(t), colours[t as usize]);
    }
    out.push_str("</g>\n");
    let shown: HashMap<u32, ()> = visible.iter().map(|&t| (t, ())).collect();
    let marked: Vec<u32> = style.highlight.iter().copied().filter(|t| shown.contains_key(t)).collect();
    if !marked.is_empty() {
        let _ = writeln!(
            out,
            "<g fill=\"none\" stroke=\"#d62728\" stroke-width=\"{}\">",
            num(style.stroke_width * 3.0)
        );
        for t in marked {
            let _ = writeln!(out, "<polygon points=\"{}\"/>", points(t));
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use quasiperc::multigrid::grid_with_hole;

    #[test]
    fn deterministic_and_filtered() {
        let g = grid_with_hole(3).unwrap();
        let a = render(&g, &Fill::Shape, &Style::default()).unwrap();
        assert_eq!(a, render(&g, &Fill::Shape, &Style::default()).unwrap());
        assert_eq!(a.matches("<polygon").count(), g.len());
        let style = Style { viewport: Some([-1.5, -1.5, 1.5, 1.5]), highlight: vec![0, 1], ..Style::default() };
        let b = render(&g, &Fill::Shape, &style).unwrap();
        assert_eq!(b.matches("<polygon id=").count(), 8);
        assert!(!b.contains("-0.0000"));
    }

    #[test]
    fn state_colours() {
        let g = grid_with_hole(2).unwrap();
        let mut c = Configuration::zeros(g.len());
        c.state[0] = 1;
        let s = render(&g, &Fill::State(&c), &Style::default()).unwrap();
        assert_eq!(s.matches(INFECTED).count(), 1);
        assert_eq!(s.matches(HEALTHY).count(), g.len() - 1);
    }
}
