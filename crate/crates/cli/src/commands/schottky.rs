use std::path::PathBuf;

use clap::{Args, ValueEnum};
use kleinian_core::schottky::{
    boundary_curve_count, classify_configuration, copy_count, detect_parabolic_cusp, disk_images, exhaustion_stats_with_budget,
    limit_set, DiskNode, DiskTree, LimitSetStop, SchottkyData, SchottkyScene, Validity, DEFAULT_NODE_BUDGET,
};
use serde::{Deserialize, Serialize};

use super::{csv, echo, Formats};
use crate::config::{checked, config_error, module, overlay_params, CliError, Format};
use crate::output::{Artifact, Check, Outcome};
use crate::render::{render_ppm, render_svg, Shape, View};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Example {
    /// `g` real pairs of radius-0.4 disks.
    Standard,
    /// Genus 2 with twisted pairings.
    TwoPair,
    /// Last pair tangent, with a parabolic generator.
    Tangent,
}

/// Where the configuration comes from: a JSON scene or a built-in example.
fn load_scene(scene: &Option<PathBuf>, example: Option<Example>, genus: Option<usize>) -> Result<SchottkyScene, CliError> {
    match (scene, example) {
        (Some(_), Some(_)) => Err(config_error("give either scene or example, not both")),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            let s: SchottkyScene = serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
            if let Some(g) = genus {
                if g != s.genus {
                    return Err(config_error(format!("genus = {g} but the scene has genus {}", s.genus)));
                }
            }
            Ok(s)
        }
        (None, ex) => {
            let ex = ex.unwrap_or(Example::Standard);
            let g = checked("genus", genus, 2, |g| (1..=64).contains(&g), "in 1..=64")?;
            let data = match ex {
                Example::Standard => SchottkyData::standard(g),
                Example::TwoPair if g == 2 => SchottkyData::two_pair_example(),
                Example::TwoPair => return Err(config_error("the two-pair example has genus 2")),
                Example::Tangent => SchottkyData::tangent_example(g),
            }
            .map_err(module("building the example"))?;
            Ok(SchottkyScene::from(&data))
        }
    }
}

pub const VALIDATE: Formats = Formats { default: &[Format::Json], supported: &[Format::Json] };

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateParams {
    /// JSON scene {"genus", "disks", "generators"}.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub example: Option<Example>,
    #[arg(long)]
    pub genus: Option<usize>,
}
overlay_params!(ValidateParams { scene, example, genus } paths: scene);

pub fn validate(p: ValidateParams, _formats: &[Format]) -> Result<Outcome, CliError> {
    let scene = load_scene(&p.scene, p.example, p.genus)?;
    let report = classify_configuration(&scene.disks, &scene.generators).map_err(module("classifying the configuration"))?;
    let cusp = match report.validity {
        Validity::Invalid => None,
        _ => scene.clone().build().ok().as_ref().and_then(detect_parabolic_cusp),
    };
    let max_residual = report.pairings.iter().map(|c| c.residual).fold(0.0, f64::max);
    let checks = vec![
        Check::new(
            "configuration_valid",
            serde_json::json!({ "validity": report.validity.to_string(), "min_gap": report.min_gap }),
            "classical or tangent_degenerate",
            report.validity != Validity::Invalid,
        ),
        Check::new("pairings_match_disks", max_residual, "every generator maps ext D_{2i-1} onto int D_{2i}", report.pairings.iter().all(|c| c.ok)),
    ];
    let body = serde_json::json!({ "genus": scene.genus, "report": report, "cusp": cusp });
    Ok(Outcome {
        config: echo(&serde_json::json!({ "scene": p.scene, "example": p.example, "genus": scene.genus })),
        artifacts: vec![Artifact::json("validation.json", &body)],
        checks,
        notes: vec![],
    })
}

pub const LIMITSET: Formats =
    Formats { default: &[Format::Json, Format::Csv, Format::Svg], supported: &[Format::Json, Format::Csv, Format::Svg, Format::Ppm] };

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitSetParams {
    #[arg(long)]
    pub scene: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub example: Option<Example>,
    #[arg(long)]
    pub genus: Option<usize>,
    /// Longest word; 1 means the root disks only.
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Stop expanding disks smaller than this.
    #[arg(long)]
    pub max_radius: Option<f64>,
    #[arg(long)]
    pub node_budget: Option<u64>,
    /// Check nesting while expanding (requires classical data).
    #[arg(long)]
    pub verify: Option<bool>,
    #[arg(long)]
    pub image_width: Option<u32>,
    /// Above this many disks SVG output is replaced by PPM.
    #[arg(long)]
    pub svg_node_limit: Option<usize>,
    /// x_min,x_max,y_min,y_max; defaults to the root disks' bounding box.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub view: Option<Vec<f64>>,
}
overlay_params!(LimitSetParams {
    scene, example, genus, max_depth, max_radius, node_budget, verify, image_width, svg_node_limit, view
} paths: scene);

#[derive(Debug, Serialize)]
struct LevelStats {
    depth: usize,
    count: usize,
    min_radius: f64,
    max_radius: f64,
}

fn view_from(v: &Option<Vec<f64>>) -> Result<Option<View>, CliError> {
    match v.as_deref() {
        None => Ok(None),
        Some([x_min, x_max, y_min, y_max]) if x_min < x_max && y_min < y_max && [x_min, x_max, y_min, y_max].iter().all(|x| x.is_finite()) => {
            Ok(Some(View { x_min: *x_min, x_max: *x_max, y_min: *y_min, y_max: *y_max }))
        }
        Some(other) => Err(config_error(format!("view = {other:?}: expected finite x_min < x_max, y_min < y_max"))),
    }
}

/// Largest radius ratio of a disk to its parent.
fn max_child_ratio(tree: &DiskTree) -> f64 {
    let mut worst = 0.0f64;
    for d in 2..=tree.depth() {
        let parents = tree.level(d - 1);
        for n in tree.level(d) {
            worst = worst.max(n.radius() / parents[n.parent().expect("non-root")].radius());
        }
    }
    worst
}

/// Image disks, with those under half a pixel drawn as points.
fn disks(tree: &DiskTree, pixel: f64) -> Vec<Shape> {
    let shape = move |n: &DiskNode, depth| {
        let c = n.center()?;
        Some(if n.radius() < pixel / 2.0 { Shape::Point { at: c, depth } } else { Shape::Disk { center: c, radius: n.radius(), depth } })
    };
    (1..=tree.depth()).flat_map(|d| tree.level(d).iter().filter_map(move |n| shape(n, d))).collect()
}

pub fn limitset(p: LimitSetParams, formats: &[Format]) -> Result<Outcome, CliError> {
    let scene = load_scene(&p.scene, p.example, p.genus)?;
    let max_depth = checked("max_depth", p.max_depth, 6, |d| (1..=64).contains(&d), "in 1..=64")?;
    let budget = checked("node_budget", p.node_budget, DEFAULT_NODE_BUDGET, |b| b >= 1, "positive")?;
    let verify = p.verify.unwrap_or(true);
    let width = checked("image_width", p.image_width, 1024, |w| (16..=16384).contains(&w), "in 16..=16384")?;
    let svg_limit = checked("svg_node_limit", p.svg_node_limit, 100_000, |n| n >= 1, "positive")?;
    if let Some(r) = p.max_radius {
        if !(r.is_finite() && r > 0.0) {
            return Err(config_error(format!("max_radius = {r}: must be positive")));
        }
    }
    let view = view_from(&p.view)?;
    let data = scene.build().map_err(module("building the Schottky data"))?;
    let mut stop = LimitSetStop::depth(max_depth).with_budget(budget);
    if let Some(r) = p.max_radius {
        stop = stop.with_radius(r);
    }
    let tree = if verify { limit_set(&data, stop) } else { disk_images(&data, stop) }.map_err(module("expanding the disk tree"))?;

    let levels: Vec<LevelStats> = (1..=tree.depth())
        .map(|d| {
            let (min_radius, max_radius) = tree.radius_range(d).unwrap_or((f64::NAN, f64::NAN));
            LevelStats { depth: d, count: tree.count_at_depth(d), min_radius, max_radius }
        })
        .collect();
    let mut checks = vec![Check::below("child_to_parent_radius_ratio", max_child_ratio(&tree), 1.0)];
    if verify {
        checks.push(Check::new("nesting_margin", tree.min_margin(), "> 0 for every child in its parent", tree.min_margin() > 0.0));
    }
    let mut notes = Vec::new();
    let mut artifacts = Vec::new();
    if formats.contains(&Format::Json) {
        let body = serde_json::json!({
            "genus": tree.genus(),
            "nodes": tree.node_count(),
            "verified": tree.is_verified(),
            "min_margin": if verify { Some(tree.min_margin()) } else { None },
            "levels": levels,
        });
        artifacts.push(Artifact::json("levels.json", &body));
    }
    if formats.contains(&Format::Csv) {
        let rows = tree.point_cloud().into_iter().map(|(z, d)| vec![format!("{}", z.re), format!("{}", z.im), d.to_string()]);
        artifacts.push(Artifact::new("points.csv", Format::Csv, csv(&["re", "im", "depth"], rows)));
    }
    let want_svg = formats.contains(&Format::Svg);
    let want_ppm = formats.contains(&Format::Ppm);
    if want_svg || want_ppm {
        let roots: Vec<Shape> =
            tree.roots().iter().filter_map(|n| n.center().map(|c| Shape::Disk { center: c, radius: n.radius(), depth: 1 })).collect();
        let view = view.unwrap_or_else(|| View::around(&roots, 0.05));
        let shapes = disks(&tree, view.width() / width as f64);
        let svg = want_svg && shapes.len() <= svg_limit;
        if want_svg && !svg {
            notes.push(format!("{} disks exceed svg_node_limit = {svg_limit}; wrote limitset.ppm instead of SVG", shapes.len()));
        }
        if svg {
            artifacts.push(Artifact::new("limitset.svg", Format::Svg, render_svg(&shapes, &view, width)));
        }
        if want_ppm || want_svg && !svg {
            artifacts.push(Artifact::new("limitset.ppm", Format::Ppm, render_ppm(&shapes, &view, width)));
        }
    }
    let config = serde_json::json!({
        "scene": p.scene, "example": p.example, "genus": tree.genus(), "max_depth": max_depth, "max_radius": p.max_radius,
        "node_budget": budget, "verify": verify, "image_width": width, "svg_node_limit": svg_limit, "view": p.view,
    });
    Ok(Outcome { config, artifacts, checks, notes })
}

pub const EXHAUST: Formats = Formats { default: &[Format::Json], supported: &[Format::Json] };

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExhaustParams {
    #[arg(long)]
    pub scene: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub example: Option<Example>,
    #[arg(short, long)]
    pub genus: Option<usize>,
    /// Levels 0..=n of the exhaustion.
    #[arg(short, long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub node_budget: Option<u64>,
}
overlay_params!(ExhaustParams { scene, example, genus, n, node_budget } paths: scene);

#[derive(Debug, Serialize)]
struct Counts {
    boundary_curves: Vec<u128>,
    copies: Vec<u128>,
}

pub fn exhaust(p: ExhaustParams, _formats: &[Format]) -> Result<Outcome, CliError> {
    let scene = load_scene(&p.scene, p.example, p.genus)?;
    let n = checked("n", p.n, 3, |n| n <= 40, "at most 40")?;
    let budget = checked("node_budget", p.node_budget, DEFAULT_NODE_BUDGET, |b| b >= 1, "positive")?;
    let data = scene.build().map_err(module("building the Schottky data"))?;
    let g = data.genus();
    let stats = exhaustion_stats_with_budget(&data, n, budget).map_err(module("computing the exhaustion"))?;
    let tree = limit_set(&data, LimitSetStop::depth(n + 1).with_budget(budget)).map_err(module("enumerating image disks"))?;
    let enumerated: Vec<u64> = (0..=n).map(|j| tree.count_at_depth(j + 1) as u64).collect();
    let formula: Vec<Option<u128>> = (0..=n).map(|j| boundary_curve_count(g, j)).collect();
    let copies_ok = (0..=n).all(|j| {
        copy_count(g, j) == Some(1 + enumerated[..j].iter().map(|&c| c as u128).sum::<u128>())
    });
    let checks = vec![
        Check::new(
            "boundary_curves_match_enumeration",
            &enumerated,
            "2g(2g-1)^n image disks of word length n+1",
            enumerated.iter().zip(&formula).all(|(&e, f)| *f == Some(e as u128)),
        ),
        Check::new("copies_match_enumeration", stats.copies().iter().map(|c| *c as u64).collect::<Vec<_>>(), "1 + boundary curves of earlier levels", copies_ok),
    ];
    let counts = Counts { boundary_curves: stats.boundary_curves(), copies: stats.copies() };
    Ok(Outcome {
        config: serde_json::json!({ "scene": p.scene, "example": p.example, "genus": g, "n": n, "node_budget": budget }),
        artifacts: vec![Artifact::json("exhaustion.json", &counts), Artifact::json("levels.json", &stats)],
        checks,
        notes: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scene_sources_are_exclusive() {
        let e = load_scene(&Some(PathBuf::from("s.json")), Some(Example::Standard), None).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(load_scene(&None, Some(Example::TwoPair), Some(3)).is_err());
        assert_eq!(load_scene(&None, None, Some(3)).unwrap().genus, 3);
    }

    #[test]
    fn views_must_be_proper_boxes() {
        assert!(view_from(&None).unwrap().is_none());
        assert!(view_from(&Some(vec![-1.0, 1.0, -2.0, 2.0])).unwrap().is_some());
        assert!(view_from(&Some(vec![1.0, -1.0, -2.0, 2.0])).is_err());
        assert!(view_from(&Some(vec![0.0, 1.0])).is_err());
    }

    #[test]
    fn child_ratios_are_below_one() {
        let data = SchottkyData::standard(2).unwrap();
        let tree = limit_set(&data, LimitSetStop::depth(4)).unwrap();
        let r = max_child_ratio(&tree);
        assert!(r > 0.0 && r < 1.0);
        let shapes = disks(&tree, 1e-3);
        assert_eq!(shapes.len(), tree.node_count());
    }
}
