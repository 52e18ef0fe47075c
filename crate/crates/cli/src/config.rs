//! Command line, config files and their merge. A config file supplies a
//! parameter block; flags given on the command line override it field by
//! field.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::commands::{cantor, pants, qc, schottky};

/// Worker threads for the parallel parts of a run.
pub const THREADS_ENV: &str = "KLEINIAN_THREADS";

#[derive(Debug, Parser)]
#[command(name = "kleinian", version, about = "Schottky groups, Cantor pants decompositions and Douady-Earle extensions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a disk configuration and its pairing maps.
    SchottkyValidate(Invocation<schottky::ValidateParams>),
    /// Nested image disks approximating the limit set.
    SchottkyLimitset(Invocation<schottky::LimitSetParams>),
    /// Boundary-curve and copy counts of the exhaustion.
    SchottkyExhaust(Invocation<schottky::ExhaustParams>),
    /// The circles around the middle-third Cantor intervals, with certificates.
    CantorCircles(Invocation<cantor::CirclesParams>),
    /// The pants graph cut out by the Cantor circles.
    CantorGraph(Invocation<cantor::GraphParams>),
    /// Distances between boundary geodesics of one pair of pants.
    PantsDistance(Invocation<pants::DistanceParams>),
    /// Length-spectrum obstruction between the two factorial surfaces.
    SpectrumObstruct(Invocation<pants::ObstructParams>),
    /// The surfaces X_k and their doubles.
    XinftyBuild(Invocation<pants::XinftyParams>),
    /// Quasi-symmetry constants of an equivariant boundary map.
    QsScan(Invocation<qc::QsParams>),
    /// Douady-Earle extension over a fundamental annulus.
    DeExtend(Invocation<qc::ExtendParams>),
    /// The annulus map induced by the extension.
    AnnulusGlue(Invocation<qc::AnnulusParams>),
}

#[derive(Debug, Args)]
pub struct Invocation<P: Args> {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub params: P,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for artifacts and run_report.json.
    #[arg(short, long)]
    pub output_dir: Option<PathBuf>,
    /// Artifact formats, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
    Ppm,
    Dot,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
            Format::Ppm => "ppm",
            Format::Dot => "dot",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{context}: {message}")]
    Module { context: String, message: String },
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Module { .. } | CliError::Io { .. } => 3,
        }
    }
}

pub fn config_error(msg: impl fmt::Display) -> CliError {
    CliError::Config(msg.to_string())
}

/// Wraps a module error with what was being done.
pub fn module<E: fmt::Display>(context: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Module { context: context.to_string(), message: e.to_string() }
}

/// A parameter block whose fields are all optional, so that a file block
/// and a flag block can be overlaid.
pub trait Params: Args + Clone + Default + Serialize + DeserializeOwned {
    /// `flags` wins wherever it has a value.
    fn overlay(self, flags: Self) -> Self;

    /// Make relative paths read from a config file relative to its directory.
    fn rebase(self, _dir: &Path) -> Self {
        self
    }
}

macro_rules! overlay_params {
    ($t:ty { $($field:ident),* $(,)? } $(paths: $($path:ident),+)?) => {
        impl $crate::config::Params for $t {
            fn overlay(self, flags: Self) -> Self {
                Self { $($field: flags.$field.or(self.$field)),* }
            }

            $(fn rebase(mut self, dir: &std::path::Path) -> Self {
                $(self.$path = self.$path.map(|p| dir.join(p));)+
                self
            })?
        }
    };
}
pub(crate) use overlay_params;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig<P> {
    command: Option<String>,
    output_dir: Option<PathBuf>,
    formats: Option<Vec<Format>>,
    params: Option<P>,
}

/// Everything a command needs after merging file and flags.
#[derive(Debug, Clone)]
pub struct Resolved<P> {
    pub output_dir: PathBuf,
    pub formats: Vec<Format>,
    pub params: P,
}

pub fn resolve<P: Params>(command: &str, inv: Invocation<P>, defaults: &[Format], supported: &[Format]) -> Result<Resolved<P>, CliError> {
    let file = match &inv.common.config {
        Some(path) => {
            let mut f = read_config::<P>(path)?;
            let dir = path.parent().unwrap_or(Path::new(""));
            f.params = f.params.map(|p| p.rebase(dir));
            f
        }
        None => FileConfig { command: None, output_dir: None, formats: None, params: None },
    };
    if let Some(c) = &file.command {
        if c != command {
            return Err(config_error(format!("config file is for `{c}`, not `{command}`")));
        }
    }
    let params = file.params.unwrap_or_default().overlay(inv.params);
    let mut formats = inv.common.format.or(file.formats).unwrap_or_else(|| defaults.to_vec());
    formats.sort();
    formats.dedup();
    if let Some(f) = formats.iter().find(|f| !supported.contains(f)) {
        let names: Vec<String> = supported.iter().map(Format::to_string).collect();
        return Err(config_error(format!("`{command}` does not write {f}; supported: {}", names.join(", "))));
    }
    let output_dir = inv.common.output_dir.or(file.output_dir).unwrap_or_else(|| Path::new("out").join(command));
    Ok(Resolved { output_dir, formats, params })
}

fn read_config<P: DeserializeOwned>(path: &Path) -> Result<FileConfig<P>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
}

/// Applies the thread-count override, if set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| config_error(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(config_error(format!("{THREADS_ENV} must be positive")));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(config_error)
}

/// Value or default, checked against a predicate.
pub fn checked<T: fmt::Debug + Copy>(name: &str, v: Option<T>, default: T, ok: impl Fn(T) -> bool, rule: &str) -> Result<T, CliError> {
    let v = v.unwrap_or(default);
    if ok(v) {
        Ok(v)
    } else {
        Err(config_error(format!("{name} = {v:?}: must be {rule}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commands::schottky::ExhaustParams;

    fn invocation(params: ExhaustParams, format: Option<Vec<Format>>) -> Invocation<ExhaustParams> {
        Invocation { common: CommonArgs { config: None, output_dir: None, format }, params }
    }

    #[test]
    fn flags_win_field_by_field() {
        let file = ExhaustParams { genus: Some(3), n: Some(4), ..Default::default() };
        let flags = ExhaustParams { n: Some(1), ..Default::default() };
        let merged = file.overlay(flags);
        assert_eq!((merged.genus, merged.n), (Some(3), Some(1)));
    }

    #[test]
    fn formats_are_sorted_and_checked() {
        let r = resolve("x", invocation(Default::default(), Some(vec![Format::Svg, Format::Json, Format::Svg])), &[], &[Format::Json, Format::Svg])
            .unwrap();
        assert_eq!(r.formats, vec![Format::Json, Format::Svg]);
        assert_eq!(r.output_dir, Path::new("out/x"));
        let err = resolve("x", invocation(Default::default(), Some(vec![Format::Dot])), &[], &[Format::Json]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn checked_reports_the_rule() {
        assert_eq!(checked("n", None, 3, |n| n < 5, "below 5").unwrap(), 3);
        let e = checked("n", Some(9), 3, |n| n < 5, "below 5").unwrap_err();
        assert_eq!(e.to_string(), "config error: n = 9: must be below 5");
    }
}
