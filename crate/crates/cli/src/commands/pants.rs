use clap::{Args, ValueEnum};
use kleinian_core::cantor::pants_graph;
use kleinian_core::pants::{
    build_xinfty, build_xk, collar_width, crossing_length_bound, example1_spectra, hexagon_distance, spectrum_obstruction, Length,
    LengthMode, LengthSpectrum, PantsSpec, FLOAT_FACTORIAL_LIMIT,
};
use kleinian_core::trivalent::doubled_tree_isomorphism;
use serde::{Deserialize, Serialize};

use super::{csv, Formats};
use crate::config::{checked, config_error, module, overlay_params, CliError, Format};
use crate::output::{Artifact, Check, Outcome};

pub const DISTANCE: Formats = Formats { default: &[Format::Json], supported: &[Format::Json] };

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceParams {
    #[arg(long)]
    pub l1: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub l3: Option<f64>,
}
overlay_params!(DistanceParams { l1, l2, l3 });

pub fn distance(p: DistanceParams, _formats: &[Format]) -> Result<Outcome, CliError> {
    let ls = [p.l1.unwrap_or(1.0), p.l2.unwrap_or(1.0), p.l3.unwrap_or(1.0)];
    let spec = PantsSpec::new(ls[0], ls[1], ls[2]).map_err(|e| config_error(e.to_string()))?;
    let d = spec.distances();
    // every relabelling of the boundaries must permute the distances alike
    let mut symmetry = 0.0f64;
    for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        let q = PantsSpec::new(ls[perm[0]], ls[perm[1]], ls[perm[2]]).expect("same lengths");
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let lhs = hexagon_distance(&q, i, j).expect("distinct slots");
            let rhs = hexagon_distance(&spec, perm[i], perm[j]).expect("distinct slots");
            symmetry = symmetry.max((lhs - rhs).abs() / rhs.max(1.0));
        }
    }
    let collars: Vec<f64> = ls.iter().map(|&l| collar_width(l).expect("validated")).collect();
    let crossing: Vec<f64> = ls.iter().map(|&l| crossing_length_bound(l).expect("validated")).collect();
    let body = serde_json::json!({
        "lengths": ls,
        "distances": { "d12": d[0], "d13": d[1], "d23": d[2] },
        "collar_widths": collars,
        "crossing_bounds": crossing,
    });
    Ok(Outcome {
        config: serde_json::json!({ "l1": ls[0], "l2": ls[1], "l3": ls[2] }),
        artifacts: vec![Artifact::json("distances.json", &body)],
        checks: vec![
            Check::below("relabelling_symmetry", symmetry, 1e-12),
            Check::new("distances_positive", d, "> 0", d.iter().all(|x| *x > 0.0 && x.is_finite())),
        ],
        notes: vec![],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Float,
}

pub const OBSTRUCT: Formats = Formats { default: &[Format::Json, Format::Csv], supported: &[Format::Json, Format::Csv] };

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstructParams {
    /// Curves α_0 … α_{n_max} on both surfaces.
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Distortion constant, a rational like "3" or "7/2", or a float.
    #[arg(short, long)]
    pub k: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
}
overlay_params!(ObstructParams { n_max, k, mode });

fn spectrum_rows(s: &LengthSpectrum) -> impl Iterator<Item = Vec<String>> + '_ {
    s.curves.iter().map(move |c| {
        vec![
            s.name.clone(),
            c.label.to_string(),
            c.length.to_string(),
            format!("{:e}", c.length.to_f64()),
            c.genus_inside.map_or_else(String::new, |g| g.to_string()),
        ]
    })
}

pub fn obstruct(p: ObstructParams, formats: &[Format]) -> Result<Outcome, CliError> {
    let mode = p.mode.unwrap_or(Mode::Exact);
    let limit = match mode {
        Mode::Exact => 200,
        Mode::Float => FLOAT_FACTORIAL_LIMIT,
    };
    let n_max = checked("n_max", p.n_max, 20, |n| (1..=limit).contains(&n), &format!("in 1..={limit} in this mode"))?;
    let k_text = p.k.clone().unwrap_or_else(|| "2".to_string());
    let k: Length = k_text.parse().map_err(|e: kleinian_core::pants::PantsError| config_error(format!("k = {k_text:?}: {e}")))?;
    let length_mode = match mode {
        Mode::Exact => LengthMode::Exact,
        Mode::Float => LengthMode::Float,
    };
    let (r1, r2) = example1_spectra(n_max, length_mode).map_err(module("building the spectra"))?;
    let rep = spectrum_obstruction(&r1, &r2, &k).map_err(|e| config_error(format!("k = {k_text:?}: {e}")))?;
    let kf = k.to_f64();
    let late: Vec<_> = rep.entries.iter().filter(|e| e.n as f64 > kf).collect();
    let unique = late.iter().all(|e| e.targets == vec![e.n]);
    let checks = vec![
        Check::new("exact_arithmetic", rep.exact, "true in exact mode", rep.exact || mode == Mode::Float),
        Check::new(
            "unique_targets_beyond_k",
            late.iter().filter(|e| e.targets == vec![e.n]).count(),
            "every alpha_n with n > K can only go to alpha_n",
            unique,
        ),
        Check::new("obstructed", rep.contradictions.len(), "a genus contradiction for some n", rep.obstructed),
    ];
    let mut artifacts = Vec::new();
    if formats.contains(&Format::Json) {
        artifacts.push(Artifact::json("obstruction.json", &rep));
    }
    if formats.contains(&Format::Csv) {
        let rows = spectrum_rows(&r1).chain(spectrum_rows(&r2));
        artifacts.push(Artifact::new("spectra.csv", Format::Csv, csv(&["surface", "curve", "length", "approx", "genus_inside"], rows)));
    }
    Ok(Outcome { config: serde_json::json!({ "n_max": n_max, "k": k_text, "mode": mode }), artifacts, checks, notes: vec![] })
}

pub const XINFTY: Formats = Formats { default: &[Format::Json, Format::Dot], supported: &[Format::Json, Format::Dot] };

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XinftyParams {
    /// Generations of pants on each side.
    #[arg(short, long)]
    pub k: Option<u32>,
    /// Common boundary length of the pants.
    #[arg(long)]
    pub length: Option<f64>,
}
overlay_params!(XinftyParams { k, length });

pub fn xinfty(p: XinftyParams, formats: &[Format]) -> Result<Outcome, CliError> {
    let k = checked("k", p.k, 3, |k| (1..=20).contains(&k), "in 1..=20")?;
    let length = checked("length", p.length, 1.0, |l| l.is_finite() && l > 0.0, "positive")?;
    let xk = build_xk(k, length).map_err(module("building X_k"))?;
    let doubled = build_xinfty(k, length).map_err(module("building the doubled surface"))?;
    let graph = pants_graph(k).map_err(module("building the Cantor pants graph"))?;
    let iso = doubled_tree_isomorphism(&graph.to_trivalent(), &doubled.to_trivalent());
    let boundary = xk.boundary_count();
    let checks = vec![
        Check::new("boundary_curves", boundary, "2^k + 1", boundary == (1usize << k) + 1),
        Check::new("pants_count", xk.pants_count(), "2^k - 1", xk.pants_count() == (1usize << k) - 1),
        Check::new(
            "isomorphic_to_cantor_pants",
            doubled.pants_count(),
            "doubled surface matches the pants graph of the Cantor circles",
            iso.is_isomorphic(),
        ),
    ];
    let mut artifacts = Vec::new();
    if formats.contains(&Format::Json) {
        let body = serde_json::json!({
            "k": k,
            "length": length,
            "x_k": { "pants": xk.pants_count(), "boundary_curves": boundary, "genus": xk.genus(), "surface": xk },
            "doubled": { "pants": doubled.pants_count(), "boundary_curves": doubled.boundary_count(), "surface": doubled },
            "isomorphism": iso,
        });
        artifacts.push(Artifact::json("surface.json", &body));
    }
    if formats.contains(&Format::Dot) {
        artifacts.push(Artifact::new("surface.dot", Format::Dot, doubled.to_dot("X")));
    }
    Ok(Outcome { config: serde_json::json!({ "k": k, "length": length }), artifacts, checks, notes: vec![] })
}
