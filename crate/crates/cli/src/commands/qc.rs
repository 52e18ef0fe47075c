use clap::{Args, ValueEnum};
use kleinian_core::qc::{
    build_boundary_map, extend_equivariant, glue_annulus_map, qs_constants, qs_ratio, AnnulusPair, BoundaryMap, BoundaryMapSpec,
    DeOptions, ExtensionOptions, QsGrid, BREACH_LEVEL, MIN_NODES,
};
use serde::{Deserialize, Serialize};

use super::{csv, echo, Formats};
use crate::config::{checked, config_error, module, overlay_params, CliError, Format};
use crate::output::{Artifact, Check, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Identity,
    Power,
    Random,
}

/// Flag patches over the `[params.map]` table.
struct MapPatch {
    kind: Option<MapKind>,
    k: Option<f64>,
    kappa: Option<f64>,
    alpha: Option<f64>,
    nodes: Option<usize>,
    seed: Option<u64>,
}

impl MapPatch {
    fn is_empty(&self) -> bool {
        self.kind.is_none() && self.k.is_none() && self.kappa.is_none() && self.alpha.is_none() && self.nodes.is_none() && self.seed.is_none()
    }
}

const DEFAULT_MAP: BoundaryMapSpec = BoundaryMapSpec::Power { k: 2.0, alpha: 2.0 };

/// The file's map (or a power map with k = 2, α = 2) with flags applied.
fn map_spec(base: Option<BoundaryMapSpec>, patch: MapPatch) -> Result<BoundaryMapSpec, CliError> {
    let base = base.unwrap_or(DEFAULT_MAP);
    if patch.is_empty() {
        return Ok(base);
    }
    let (base_kind, k0) = match &base {
        BoundaryMapSpec::Identity { k } => (Some(MapKind::Identity), *k),
        BoundaryMapSpec::Power { k, .. } => (Some(MapKind::Power), *k),
        BoundaryMapSpec::Random { k, .. } => (Some(MapKind::Random), *k),
        BoundaryMapSpec::Samples { k, .. } => (None, *k),
    };
    let Some(kind) = patch.kind.or(base_kind) else {
        return Err(config_error("a sampled map can only be changed in the config file; pass map_kind to replace it"));
    };
    let k = patch.k.unwrap_or(k0);
    let same = patch.kind.is_none() || patch.kind == base_kind;
    Ok(match kind {
        MapKind::Identity => BoundaryMapSpec::Identity { k },
        MapKind::Power => {
            let a0 = match (&base, same) {
                (BoundaryMapSpec::Power { alpha, .. }, true) => *alpha,
                _ => 2.0,
            };
            BoundaryMapSpec::Power { k, alpha: patch.alpha.unwrap_or(a0) }
        }
        MapKind::Random => {
            let (kappa0, nodes0, seed0) = match (&base, same) {
                (BoundaryMapSpec::Random { kappa, nodes, seed, .. }, true) => (*kappa, *nodes, *seed),
                _ => (k * k, 9, 0),
            };
            BoundaryMapSpec::Random {
                k,
                kappa: patch.kappa.unwrap_or(kappa0),
                nodes: patch.nodes.unwrap_or(nodes0),
                seed: patch.seed.unwrap_or(seed0),
            }
        }
    })
}

fn boundary_map(spec: &BoundaryMapSpec) -> Result<BoundaryMap, CliError> {
    build_boundary_map(spec).map_err(|e| config_error(format!("map: {e}")))
}

fn de_options(nodes: Option<usize>, tol: Option<f64>, max_iter: Option<usize>) -> Result<DeOptions, CliError> {
    let d = DeOptions::default();
    Ok(DeOptions {
        nodes: checked("nodes", nodes, d.nodes, |n| (MIN_NODES..=1 << 16).contains(&n), &format!("in {MIN_NODES}..=65536"))?,
        tol: checked("tol", tol, d.tol, |t| t.is_finite() && t > 0.0 && t < 1.0, "in (0, 1)")?,
        max_iter: checked("max_iter", max_iter, d.max_iter, |m| m >= 1, "positive")?,
    })
}

fn extension_options(grid: Option<usize>, de: DeOptions, breach: Option<f64>) -> Result<ExtensionOptions, CliError> {
    Ok(ExtensionOptions {
        grid: checked("grid", grid, 32, |g| (4..=512).contains(&g), "in 4..=512")?,
        de,
        breach_level: checked("breach_level", breach, BREACH_LEVEL, |b| b > 0.0 && b <= 1.0, "in (0, 1]")?,
    })
}

macro_rules! map_fields {
    ($(#[$m:meta])* pub struct $name:ident { $($(#[$fm:meta])* pub $f:ident: $t:ty,)* }) => {
        $(#[$m])*
        pub struct $name {
            /// Boundary map table; config file only.
            #[arg(skip)]
            pub map: Option<BoundaryMapSpec>,
            #[arg(long, value_enum)]
            pub map_kind: Option<MapKind>,
            /// Multiplier of the source dilation.
            #[arg(short, long)]
            pub k: Option<f64>,
            /// Multiplier of the target dilation (random maps).
            #[arg(long)]
            pub kappa: Option<f64>,
            /// Exponent of a power map, κ = k^α.
            #[arg(long)]
            pub alpha: Option<f64>,
            /// Samples per side of a random map.
            #[arg(long)]
            pub map_nodes: Option<usize>,
            #[arg(long)]
            pub seed: Option<u64>,
            $($(#[$fm])* pub $f: $t,)*
        }
        overlay_params!($name { map, map_kind, k, kappa, alpha, map_nodes, seed $(, $f)* });

        impl $name {
            fn spec(&self) -> Result<BoundaryMapSpec, CliError> {
                map_spec(
                    self.map.clone(),
                    MapPatch {
                        kind: self.map_kind,
                        k: self.k,
                        kappa: self.kappa,
                        alpha: self.alpha,
                        nodes: self.map_nodes,
                        seed: self.seed,
                    },
                )
            }
        }
    };
}

map_fields! {
    #[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct QsParams {
        #[arg(long)]
        pub x_nodes: Option<usize>,
        #[arg(long)]
        pub t_nodes: Option<usize>,
        /// t ranges over [k^-e, k^e].
        #[arg(long)]
        pub t_exponent: Option<u32>,
    }
}

map_fields! {
    #[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct ExtendParams {
        /// Cells per direction of the fundamental annulus.
        #[arg(long)]
        pub grid: Option<usize>,
        /// Quadrature nodes of each barycenter solve.
        #[arg(long)]
        pub nodes: Option<usize>,
        #[arg(long)]
        pub tol: Option<f64>,
        #[arg(long)]
        pub max_iter: Option<usize>,
        /// |μ| at or above this counts as a breach.
        #[arg(long)]
        pub breach_level: Option<f64>,
    }
}

map_fields! {
    #[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct AnnulusParams {
        #[arg(long)]
        pub grid: Option<usize>,
        #[arg(long)]
        pub nodes: Option<usize>,
        #[arg(long)]
        pub tol: Option<f64>,
        #[arg(long)]
        pub max_iter: Option<usize>,
        /// Dilatation of the map on the piece inside the annulus.
        #[arg(long)]
        pub k1: Option<f64>,
        /// Dilatation of the map on the piece outside it.
        #[arg(long)]
        pub k2: Option<f64>,
    }
}

pub const QS: Formats = Formats { default: &[Format::Json], supported: &[Format::Json] };

/// Deterministic sample of `|ρ(kx, kt) - ρ(x, t)|`, relative to `max(1, |ρ|)`.
fn scaling_error(psi: &BoundaryMap) -> f64 {
    let k = psi.k();
    let mut worst = 0.0f64;
    for i in 0..40 {
        for j in 0..40 {
            let x = k * k * (2.0 * i as f64 / 39.0 - 1.0);
            let t = k.powf(4.0 * j as f64 / 39.0 - 2.0);
            let (a, b) = (qs_ratio(psi, k * x, k * t), qs_ratio(psi, x, t));
            worst = worst.max((a - b).abs() / b.abs().max(1.0));
        }
    }
    worst
}

pub fn qs_scan(p: QsParams, _formats: &[Format]) -> Result<Outcome, CliError> {
    let spec = p.spec()?;
    let psi = boundary_map(&spec)?;
    let d = QsGrid::default();
    let grid = QsGrid {
        x_nodes: checked("x_nodes", p.x_nodes, d.x_nodes, |n| (64..=1 << 16).contains(&n), "in 64..=65536")?,
        t_nodes: checked("t_nodes", p.t_nodes, d.t_nodes, |n| (64..=1 << 16).contains(&n), "in 64..=65536")?,
        t_exponent: checked("t_exponent", p.t_exponent, d.t_exponent, |e| (1..=60).contains(&e), "in 1..=60")?,
    };
    let rep = qs_constants(&psi, &grid).map_err(module("scanning quasi-symmetry ratios"))?;
    let checks = vec![
        Check::new("ratio_at_zero_within_kappa", rep.case_iv_excess, "rho(0, t) in [1/kappa, kappa]", rep.case_iv_holds),
        Check::below("scaling_identity", scaling_error(&psi), 1e-12),
    ];
    Ok(Outcome {
        config: serde_json::json!({ "map": spec, "grid": grid }),
        artifacts: vec![Artifact::json("qs_report.json", &rep)],
        checks,
        notes: vec!["grid extrema bound the true constants from one side only".into()],
    })
}

pub const EXTEND: Formats = Formats { default: &[Format::Json, Format::Csv], supported: &[Format::Json, Format::Csv] };

pub fn de_extend(p: ExtendParams, formats: &[Format]) -> Result<Outcome, CliError> {
    let spec = p.spec()?;
    let psi = boundary_map(&spec)?;
    let opts = extension_options(p.grid, de_options(p.nodes, p.tol, p.max_iter)?, p.breach_level)?;
    let g = extend_equivariant(&psi, &opts).map_err(module("extending the boundary map"))?;
    let checks = vec![
        Check::below("equivariance_residual", g.max_equivariance_residual, 1e-6),
        Check::new("barycenter_converged", g.max_barycenter_residual, &format!("<= tol = {:e}", opts.de.tol), g.max_barycenter_residual <= opts.de.tol),
        Check::new("no_breach", g.breach_cells, &format!("|mu| < {} everywhere", opts.breach_level), !g.breach),
    ];
    let mut artifacts = Vec::new();
    if formats.contains(&Format::Json) {
        let body = serde_json::json!({
            "k": g.k, "kappa": g.kappa, "n_s": g.n_s, "n_theta": g.n_theta, "step": g.step,
            "sup_mu": g.sup_mu, "sup_dilatation": g.sup_dilatation,
            "max_equivariance_residual": g.max_equivariance_residual,
            "max_equivariance_relative": g.max_equivariance_relative,
            "max_barycenter_residual": g.max_barycenter_residual,
            "breach": g.breach, "breach_cells": g.breach_cells,
        });
        artifacts.push(Artifact::json("extension.json", &body));
    }
    if formats.contains(&Format::Csv) {
        let rows = g.points.iter().map(|q| {
            [q.z.re, q.z.im, q.value.re, q.value.im, q.mu.norm(), q.dilatation].iter().map(f64::to_string).collect()
        });
        artifacts.push(Artifact::new("extension.csv", Format::Csv, csv(&["x", "y", "re_e", "im_e", "abs_mu", "k"], rows)));
    }
    Ok(Outcome { config: serde_json::json!({ "map": spec, "extension": opts }), artifacts, checks, notes: vec![] })
}

pub const ANNULUS: Formats = Formats { default: &[Format::Json, Format::Csv], supported: &[Format::Json, Format::Csv] };

pub fn annulus_glue(p: AnnulusParams, formats: &[Format]) -> Result<Outcome, CliError> {
    let spec = p.spec()?;
    let psi = boundary_map(&spec)?;
    let opts = extension_options(p.grid, de_options(p.nodes, p.tol, p.max_iter)?, None)?;
    let k1 = checked("k1", p.k1, 1.0, |k| k >= 1.0 && k.is_finite(), "at least 1")?;
    let k2 = checked("k2", p.k2, 1.0, |k| k >= 1.0 && k.is_finite(), "at least 1")?;
    let pair = AnnulusPair::from_multipliers(psi.k(), psi.kappa()).map_err(|e| config_error(format!("map: {e}")))?;
    let rep = glue_annulus_map(&psi, &pair, &opts, (k1, k2)).map_err(module("gluing the annulus map"))?;
    let trace = rep.inner_trace.max_lifted.max(rep.outer_trace.max_lifted);
    let checks = vec![
        Check::below("boundary_traces", trace, 1e-6),
        Check::new("images_in_target", rep.images_in_target, "1 <= |w| <= rho", rep.images_in_target),
        Check::below("modulus_relation", pair.relation_residual(), 1e-9),
        Check::new("dilatation_finite", rep.interpolation_bound, "finite", rep.interpolation_bound.is_finite()),
    ];
    let mut artifacts = Vec::new();
    if formats.contains(&Format::Json) {
        let body = serde_json::json!({
            "pair": rep.pair, "sup_dilatation": rep.sup_dilatation,
            "max_equivariance_residual": rep.max_equivariance_residual, "images_in_target": rep.images_in_target,
            "inner_trace": rep.inner_trace, "outer_trace": rep.outer_trace,
            "piece_dilatations": rep.piece_dilatations, "interpolation_bound": rep.interpolation_bound,
        });
        artifacts.push(Artifact::json("annulus.json", &body));
    }
    if formats.contains(&Format::Csv) {
        let rows = rep.samples.iter().map(|s| {
            [s.source.re, s.source.im, s.image.re, s.image.im, s.dilatation].iter().map(f64::to_string).collect()
        });
        artifacts.push(Artifact::new("annulus.csv", Format::Csv, csv(&["re_z", "im_z", "re_w", "im_w", "k"], rows)));
    }
    let config = serde_json::json!({ "map": spec, "extension": opts, "k1": k1, "k2": k2 });
    Ok(Outcome { config: echo(&config), artifacts, checks, notes: vec![] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn patch() -> MapPatch {
        MapPatch { kind: None, k: None, kappa: None, alpha: None, nodes: None, seed: None }
    }

    #[test]
    fn flags_patch_the_file_map() {
        assert_eq!(map_spec(None, patch()).unwrap(), DEFAULT_MAP);
        let base = BoundaryMapSpec::Random { k: 2.5, kappa: 3.0, nodes: 17, seed: 7 };
        let s = map_spec(Some(base), MapPatch { seed: Some(9), ..patch() }).unwrap();
        assert_eq!(s, BoundaryMapSpec::Random { k: 2.5, kappa: 3.0, nodes: 17, seed: 9 });
        let s = map_spec(None, MapPatch { kind: Some(MapKind::Random), ..patch() }).unwrap();
        assert_eq!(s, BoundaryMapSpec::Random { k: 2.0, kappa: 4.0, nodes: 9, seed: 0 });
    }

    #[test]
    fn sampled_maps_need_an_explicit_kind() {
        let base = BoundaryMapSpec::Samples { k: 2.0, kappa: 4.0, positive: vec![(1.0, 1.0), (2.0, 4.0)], negative: None };
        assert!(map_spec(Some(base.clone()), MapPatch { k: Some(3.0), ..patch() }).is_err());
        let s = map_spec(Some(base), MapPatch { kind: Some(MapKind::Identity), ..patch() }).unwrap();
        assert_eq!(s, BoundaryMapSpec::Identity { k: 2.0 });
    }

    #[test]
    fn power_maps_have_no_scaling_error() {
        let psi = BoundaryMap::power(3.0, 0.7).unwrap();
        assert!(scaling_error(&psi) < 1e-13);
    }
}
