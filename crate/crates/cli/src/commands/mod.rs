//! One module per subject; each command resolves its parameters, runs the
//! library and hands back artifacts and checks.

pub mod cantor;
pub mod pants;
pub mod qc;
pub mod schottky;

use std::time::Instant;

use crate::config::{resolve, CliError, Command, Format, Invocation, Params};
use crate::output::{persist, Outcome, RunReport};

/// Formats written when none are requested, and all a command can write.
pub struct Formats {
    pub default: &'static [Format],
    pub supported: &'static [Format],
}

type Runner<P> = fn(P, &[Format]) -> Result<Outcome, CliError>;

fn execute<P: Params>(name: &str, inv: Invocation<P>, formats: &Formats, run: Runner<P>) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let r = resolve(name, inv, formats.default, formats.supported)?;
    let outcome = run(r.params, &r.formats)?;
    persist(name, &r.output_dir, outcome, start.elapsed().as_secs_f64())
}

pub fn dispatch(command: Command) -> Result<RunReport, CliError> {
    match command {
        Command::SchottkyValidate(i) => execute("schottky-validate", i, &schottky::VALIDATE, schottky::validate),
        Command::SchottkyLimitset(i) => execute("schottky-limitset", i, &schottky::LIMITSET, schottky::limitset),
        Command::SchottkyExhaust(i) => execute("schottky-exhaust", i, &schottky::EXHAUST, schottky::exhaust),
        Command::CantorCircles(i) => execute("cantor-circles", i, &cantor::CIRCLES, cantor::circles),
        Command::CantorGraph(i) => execute("cantor-graph", i, &cantor::GRAPH, cantor::graph),
        Command::PantsDistance(i) => execute("pants-distance", i, &pants::DISTANCE, pants::distance),
        Command::SpectrumObstruct(i) => execute("spectrum-obstruct", i, &pants::OBSTRUCT, pants::obstruct),
        Command::XinftyBuild(i) => execute("xinfty-build", i, &pants::XINFTY, pants::xinfty),
        Command::QsScan(i) => execute("qs-scan", i, &qc::QS, qc::qs_scan),
        Command::DeExtend(i) => execute("de-extend", i, &qc::EXTEND, qc::de_extend),
        Command::AnnulusGlue(i) => execute("annulus-glue", i, &qc::ANNULUS, qc::annulus_glue),
    }
}

/// The resolved parameters as they go into the report.
pub(crate) fn echo<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("parameters serialize")
}

/// CSV text from a header and rows of already formatted cells.
pub(crate) fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}
