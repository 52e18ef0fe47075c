use std::fmt::Write as _;

use clap::Args;
use kleinian_core::cantor::{
    cantor_circles, cantor_intervals, certify_containment, certify_self_similarity, graph_isomorphic_to_xinfty, pants_graph, CantorShape,
    CircleFamily, CircleId, PantsGraph, MAX_LEVEL,
};
use kleinian_core::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{csv, Formats};
use crate::config::{checked, config_error, module, overlay_params, CliError, Format};
use crate::output::{Artifact, Check, Outcome};
use crate::render::{outside_view, render_svg, Shape, View};

/// Levels up to which SVG output is offered; deeper families are listed only.
const SVG_LEVEL_LIMIT: u32 = 16;

pub const CIRCLES: Formats =
    Formats { default: &[Format::Json, Format::Csv, Format::Svg], supported: &[Format::Json, Format::Csv, Format::Svg] };

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CirclesParams {
    /// Deepest level of circles.
    #[arg(short, long)]
    pub k_max: Option<u32>,
    /// Half-width of the square view centred at 0.
    #[arg(long)]
    pub view_half_width: Option<f64>,
    #[arg(long)]
    pub image_width: Option<u32>,
}
overlay_params!(CirclesParams { k_max, view_half_width, image_width });

fn shapes(family: &CircleFamily) -> Vec<Shape> {
    family
        .circles()
        .iter()
        .map(|c| match c.shape() {
            CantorShape::ImaginaryAxis => Shape::VerticalLine { x: 0.0, depth: 0 },
            CantorShape::Round { center, radius } => Shape::Disk {
                center: Complex64::new(center.to_f64().unwrap_or(f64::NAN), 0.0),
                radius: radius.to_f64().unwrap_or(f64::NAN),
                depth: c.id().level as usize,
            },
        })
        .collect()
}

fn k_max(v: Option<u32>) -> Result<u32, CliError> {
    checked("k_max", v, 3, |k| (1..=MAX_LEVEL).contains(&k), &format!("in 1..={MAX_LEVEL}"))
}

pub fn circles(p: CirclesParams, formats: &[Format]) -> Result<Outcome, CliError> {
    let k = k_max(p.k_max)?;
    let half = checked("view_half_width", p.view_half_width, 1.25, |h| h.is_finite() && h > 0.0, "positive")?;
    let width = checked("image_width", p.image_width, 800, |w| (16..=16384).contains(&w), "in 16..=16384")?;
    if formats.contains(&Format::Svg) && k > SVG_LEVEL_LIMIT {
        return Err(config_error(format!("k_max = {k}: SVG output is limited to k_max <= {SVG_LEVEL_LIMIT}")));
    }
    let family = cantor_circles(k).map_err(module("building the circle family"))?;
    let containment = certify_containment(&family);
    let similarity: Vec<Result<usize, String>> =
        (1..k).take(2).map(|d| certify_self_similarity(&family, d).map_err(|e| e.to_string())).collect();
    let cert = family.certificate();
    let expected_count = (1usize << (k + 1)) - 1;
    let mut checks = vec![
        Check::new(
            "pairwise_disjoint",
            serde_json::json!({ "min_gap": cert.min_gap.to_string(), "min_axis_gap": cert.min_axis_gap.to_string() }),
            "exact positive gaps between all circles and the axis",
            true,
        ),
        Check::new("circle_count", family.circles().len(), "2^(k+1) - 1 including the axis", family.circles().len() == expected_count),
        match &containment {
            Ok(c) => Check::new("children_nested", c.min_margin.to_string(), "each circle holds exactly its two children", true),
            Err(e) => Check::new("children_nested", e.to_string(), "each circle holds exactly its two children", false),
        },
    ];
    if !similarity.is_empty() {
        checks.push(Check::new(
            "self_similar",
            similarity.iter().map(|r| r.as_ref().map_or_else(|e| e.clone(), |n| n.to_string())).collect::<Vec<_>>(),
            "configurations inside levels 1 and 2 rescale the base one",
            similarity.iter().all(Result::is_ok),
        ));
    }
    let view = View::square(half);
    let mut notes = Vec::new();
    let mut artifacts = Vec::new();
    if formats.contains(&Format::Json) {
        let body = serde_json::json!({
            "k_max": k,
            "circles": family.circles(),
            "disjointness": cert,
            "containment": containment.as_ref().ok(),
        });
        artifacts.push(Artifact::json("circles.json", &body));
    }
    if formats.contains(&Format::Csv) {
        let ivs = (1..=k).map(cantor_intervals).collect::<Result<Vec<_>, _>>().map_err(module("listing intervals"))?;
        let rows = ivs.iter().flatten().map(|iv| {
            vec![iv.level().to_string(), iv.index().to_string(), iv.left().to_string(), iv.right().to_string()]
        });
        artifacts.push(Artifact::new("intervals.csv", Format::Csv, csv(&["level", "index", "left", "right"], rows)));
    }
    if formats.contains(&Format::Svg) {
        let s = shapes(&family);
        let outside = outside_view(&s, &view);
        if outside > 0 {
            notes.push(format!("{outside} circles extend beyond the view"));
        }
        artifacts.push(Artifact::new("circles.svg", Format::Svg, render_svg(&s, &view, width)));
    }
    let config = serde_json::json!({ "k_max": k, "view_half_width": half, "image_width": width });
    Ok(Outcome { config, artifacts, checks, notes })
}

pub const GRAPH: Formats =
    Formats { default: &[Format::Json, Format::Dot], supported: &[Format::Json, Format::Dot] };

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphParams {
    #[arg(short, long)]
    pub k_max: Option<u32>,
    /// Truncation depth compared with the glued surface; defaults to k_max.
    #[arg(long)]
    pub depth: Option<u32>,
}
overlay_params!(GraphParams { k_max, depth });

fn label(c: CircleId) -> String {
    format!("C_{}^{}", c.level, c.index)
}

fn dot_node(n: i64) -> String {
    if n < 0 { format!("Pm{}", -n) } else { format!("P{n}") }
}

fn to_dot(g: &PantsGraph) -> String {
    let mut out = String::from("graph pants {\n");
    for p in &g.nodes {
        let _ = writeln!(out, "  {} [label=\"P{}\"];", dot_node(p.n), p.n);
    }
    for e in &g.edges {
        let style = if e.doubling { ", style=bold" } else { "" };
        let _ = writeln!(out, "  {} -- {} [label=\"{}\"{style}];", dot_node(e.a), dot_node(e.b), label(e.circle));
    }
    out.push_str("}\n");
    out
}

pub fn graph(p: GraphParams, formats: &[Format]) -> Result<Outcome, CliError> {
    let k = checked("k_max", p.k_max, 4, |k| (1..=20).contains(&k), "in 1..=20")?;
    let depth = checked("depth", p.depth, k, |d| d >= 1 && d <= k, "in 1..=k_max")?;
    let g = pants_graph(k).map_err(module("building the pants graph"))?;
    let iso = graph_isomorphic_to_xinfty(&g, depth);
    let trivalent = g.to_trivalent();
    let checks = vec![
        Check::new("trivalent", trivalent.node_count(), "every pants has three boundary curves", trivalent.is_trivalent()),
        Check::new(
            "isomorphic_to_glued_surface",
            if iso.is_isomorphic() { "explicit bijection".to_string() } else { format!("{iso:?}") },
            "isomorphic to the gluing graph of X_depth and its mirror",
            iso.is_isomorphic(),
        ),
    ];
    let mut artifacts = Vec::new();
    if formats.contains(&Format::Json) {
        artifacts.push(Artifact::json("graph.json", &g));
        artifacts.push(Artifact::json("isomorphism.json", &serde_json::json!({ "depth": depth, "result": iso })));
    }
    if formats.contains(&Format::Dot) {
        artifacts.push(Artifact::new("graph.dot", Format::Dot, to_dot(&g)));
    }
    Ok(Outcome { config: serde_json::json!({ "k_max": k, "depth": depth }), artifacts, checks, notes: vec![] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_lists_every_pants_and_edge() {
        let g = pants_graph(2).unwrap();
        let dot = to_dot(&g);
        assert_eq!(dot.lines().filter(|l| l.contains("[label=\"P")).count(), g.nodes.len());
        assert_eq!(dot.lines().filter(|l| l.contains(" -- ")).count(), g.edges.len());
        assert!(dot.contains("P1 -- Pm1 [label=\"C_0^0\", style=bold]"));
    }

    #[test]
    fn shapes_follow_the_family() {
        let f = cantor_circles(2).unwrap();
        let s = shapes(&f);
        assert_eq!(s.len(), 7);
        assert!(matches!(s[0], Shape::VerticalLine { x, depth: 0 } if x == 0.0));
    }
}
