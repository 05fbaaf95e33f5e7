//! Command line front end: JSON run configs in, JSON or CSV documents out.
//!
//! One config shape feeds three commands. `compute` reports the tilt, the
//! ideal partition function, the suppression table, the correlation length,
//! the suppressed density, and the Gaussian lower bound; `verify` certifies
//! Xi >= Xi2 by exact enumeration; `sweep` tabulates a one or two variable
//! grid as CSV. Exit codes are the machine contract: 0 ok or pass, 1 bound
//! violated, 2 configuration, 3 numerics, 4 work budget.
//!
//! Every floating point number is emitted with 17 significant digits so a
//! re-run can be audited for bit identity; non-finite values become JSON
//! null rather than invalid tokens.

use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::gaussian::{debye_huckel_limit, gaussian_bound, GaussianBound};
use crate::ideal::{
    correlation_length, eta_hat, ideal_partition_quadrature, suppressed_density, EtaCoefficients,
    PartitionResult,
};
use crate::model::{Ensemble, Geometry, KernelConfig, Species, System};
use crate::oracle::{exact_partition, verify_bound};

pub const DEFAULT_WORK_BUDGET: u64 = 100_000_000;

/// One run configuration; every command reads the same shape.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub species: Vec<Species>,
    pub geometry: GeometryConfig,
    pub ensemble: Ensemble,
    pub kernel: KernelConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_work_budget")]
    pub work_budget: u64,
    /// Also evaluate the zero-cutoff limit in `compute`.
    #[serde(default)]
    pub debye_huckel: bool,
    /// Grid request; only the `sweep` command reads it.
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

fn default_work_budget() -> u64 {
    DEFAULT_WORK_BUDGET
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    Lattice,
    Continuum,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub kind: GeometryKind,
    pub dimension: u32,
    pub side: f64,
    #[serde(default)]
    pub spacing: Option<f64>,
}

impl GeometryConfig {
    pub fn resolve(&self) -> Result<Geometry> {
        match self.kind {
            GeometryKind::Lattice => {
                let spacing = self.spacing.ok_or_else(|| {
                    Error::Config("lattice geometry requires a spacing".into())
                })?;
                Ok(Geometry::LatticeTorus { dimension: self.dimension, side: self.side, spacing })
            }
            GeometryKind::Continuum => {
                if self.spacing.is_some() {
                    return Err(Error::Config(
                        "spacing is only meaningful for lattice geometry".into(),
                    ));
                }
                Ok(Geometry::ContinuumTorus { dimension: self.dimension, side: self.side })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative target for series and quadrature evaluations.
    #[serde(default = "default_tolerance")]
    pub series: f64,
    /// Absolute cover for truncated momentum sums, relative to the result.
    #[serde(default = "default_tolerance")]
    pub mode_tail: f64,
    /// Absolute cover for the enumeration truncation (Xi >= 1, so this is
    /// also a relative cover).
    #[serde(default = "default_tolerance")]
    pub enumeration: f64,
}

fn default_tolerance() -> f64 {
    1e-12
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { series: 1e-12, mode_tail: 1e-12, enumeration: 1e-12 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variables: Vec<SweepVariable>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepVariable {
    pub name: SweepName,
    pub values: Vec<f64>,
}

/// What a sweep column varies. `z` replaces every species activity with the
/// grid value, `volume` rescales the torus (a lattice keeps its site count),
/// `beta` replaces the inverse temperature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepName {
    Z,
    Volume,
    Beta,
}

impl SweepName {
    pub fn label(self) -> &'static str {
        match self {
            SweepName::Z => "z",
            SweepName::Volume => "volume",
            SweepName::Beta => "beta",
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        for (label, value) in [
            ("series", self.tolerances.series),
            ("mode_tail", self.tolerances.mode_tail),
            ("enumeration", self.tolerances.enumeration),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Config(format!(
                    "tolerances.{label} must be positive and finite, got {value}"
                )));
            }
        }
        if self.work_budget == 0 {
            return Err(Error::Config("work_budget must be positive".into()));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.variables.is_empty() || sweep.variables.len() > 2 {
                return Err(Error::Config(format!(
                    "sweep takes one or two variables, got {}",
                    sweep.variables.len()
                )));
            }
            if sweep.variables.len() == 2 && sweep.variables[0].name == sweep.variables[1].name {
                return Err(Error::Config("sweep variables must be distinct".into()));
            }
            for var in &sweep.variables {
                if let Some(bad) = var.values.iter().find(|v| !v.is_finite()) {
                    return Err(Error::Config(format!(
                        "sweep values for {} must be finite, got {bad}",
                        var.name.label()
                    )));
                }
            }
        }
        Ok(())
    }

    /// The configured system, with no sweep variable applied.
    pub fn system(&self) -> Result<System> {
        self.validate()?;
        self.system_at(&[])
    }

    fn system_at(&self, point: &[(SweepName, f64)]) -> Result<System> {
        let mut species = self.species.clone();
        let mut ensemble = self.ensemble;
        let mut geometry = self.geometry.resolve()?;
        for &(name, value) in point {
            match name {
                SweepName::Z => {
                    for sp in &mut species {
                        sp.activity = value;
                    }
                }
                SweepName::Beta => ensemble.beta = value,
                SweepName::Volume => geometry = rescale_volume(&geometry, value)?,
            }
        }
        System::build(species, geometry, ensemble, self.kernel)
    }
}

fn rescale_volume(geometry: &Geometry, volume: f64) -> Result<Geometry> {
    if !(volume.is_finite() && volume > 0.0) {
        return Err(Error::Config(format!("swept volume must be positive, got {volume}")));
    }
    match *geometry {
        Geometry::LatticeTorus { dimension, side, spacing } => {
            // Keep the site count; the spacing scales with the side.
            let points = (side / spacing).round();
            let side = volume.powf(1.0 / f64::from(dimension));
            Ok(Geometry::LatticeTorus { dimension, side, spacing: side / points })
        }
        Geometry::ContinuumTorus { dimension, .. } => {
            Ok(Geometry::ContinuumTorus { dimension, side: volume.powf(1.0 / f64::from(dimension)) })
        }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// a JSON number, or null when the value is not finite (JSON has no
/// tokens for infinities or NaN). [`render`] gives it 17 significant
/// digits on the way out.
fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty printer whose floats carry exactly 17 significant digits, enough
/// to reproduce every f64 bit for bit on re-parse.
struct Digits17<'a>(PrettyFormatter<'a>);

impl Formatter for Digits17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

fn partition_json(p: &PartitionResult) -> Value {
    let mut doc = Map::new();
    doc.insert("value".into(), json_number(p.value));
    doc.insert("log_value".into(), json_number(p.log_value));
    doc.insert("tail_bound".into(), json_number(p.tail_bound));
    doc.insert("work".into(), Value::from(p.work));
    Value::Object(doc)
}

fn gaussian_json(g: &GaussianBound) -> Value {
    let mut doc = Map::new();
    doc.insert("value".into(), json_number(g.xi2));
    doc.insert("log_value".into(), json_number(g.log_xi2));
    doc.insert("correlation_length".into(), json_number(g.correlation_length));
    doc.insert("momentum_sum".into(), json_number(g.momentum_sum));
    doc.insert("u0_term".into(), json_number(g.u0_term));
    doc.insert("tail_bound".into(), json_number(g.tail_bound));
    doc.insert("work".into(), Value::from(g.work));
    Value::Object(doc)
}

fn eta_json(eta: &EtaCoefficients) -> Value {
    let rows = eta
        .values()
        .iter()
        .enumerate()
        .map(|(q, &v)| {
            let mut row = Map::new();
            row.insert("charge".into(), Value::from(q as u64));
            row.insert("value".into(), json_number(v));
            Value::Object(row)
        })
        .collect();
    Value::Array(rows)
}

fn render(document: Value) -> String {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, Digits17(PrettyFormatter::new()));
    document.serialize(&mut ser).expect("report serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("reports are UTF-8")
}

/// The `compute` command: one JSON document with the full apparatus.
pub fn run_compute(config: &RunConfig) -> Result<String> {
    let system = config.system()?;
    let tilt = system.tilt();
    let ideal = ideal_partition_quadrature(tilt)?;
    let eta = eta_hat(tilt, system.max_charge())?;
    let xi = correlation_length(&system, &eta)?;
    let density = suppressed_density(&system, &eta)?;
    let bound = gaussian_bound(&system, &eta, config.tolerances.mode_tail)?;

    let mut doc = Map::new();
    doc.insert("c0".into(), json_number(tilt.c0()));
    doc.insert("u0".into(), json_number(system.u0()));
    doc.insert("coupling".into(), json_number(system.coupling()));
    doc.insert("volume".into(), json_number(system.volume()));
    doc.insert("xi0".into(), partition_json(&ideal));
    doc.insert("eta".into(), eta_json(&eta));
    doc.insert("correlation_length".into(), json_number(xi));
    doc.insert("density".into(), json_number(density));
    doc.insert("xi2".into(), gaussian_json(&bound));
    if config.debye_huckel {
        let dh = debye_huckel_limit(&system, &eta, config.tolerances.mode_tail)?;
        doc.insert("debye_huckel".into(), gaussian_json(&dh));
    }
    Ok(render(Value::Object(doc)))
}

/// The `verify` command: the bound report document plus the verdict. The
/// document is emitted whether or not the bound holds; the verdict only
/// drives the exit code.
pub fn run_verify(config: &RunConfig) -> Result<(String, bool)> {
    let system = config.system()?;
    let report = verify_bound(
        &system,
        config.tolerances.mode_tail,
        config.tolerances.enumeration,
        config.work_budget,
    )?;
    let mut doc = Map::new();
    doc.insert("xi_exact".into(), partition_json(&report.exact));
    doc.insert("xi0".into(), partition_json(&report.ideal));
    doc.insert("xi2".into(), gaussian_json(&report.gaussian));
    doc.insert("correlation_length".into(), json_number(report.gaussian.correlation_length));
    doc.insert("slack".into(), json_number(report.slack));
    doc.insert("relative_slack".into(), json_number(report.relative_slack));
    doc.insert("pass".into(), Value::Bool(report.pass));
    Ok((render(Value::Object(doc)), report.pass))
}

/// The `sweep` command: an RFC 4180 table, one row per grid point. The
/// exact column is filled on lattices when the enumeration fits the work
/// budget and left empty otherwise; every other column is always present.
pub fn run_sweep(config: &RunConfig) -> Result<String> {
    config.validate()?;
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep command needs a sweep section".into()))?;

    let mut table = String::new();
    for var in &sweep.variables {
        table.push_str(var.name.label());
        table.push(',');
    }
    table.push_str("xi0,eta1,correlation_length,density,xi2,xi_exact\r\n");

    for point in grid_points(sweep) {
        let system = config.system_at(&point)?;
        let tilt = system.tilt();
        let ideal = ideal_partition_quadrature(tilt)?;
        let eta = eta_hat(tilt, system.max_charge())?;
        let eta1 = eta
            .get(1)
            .ok_or_else(|| Error::Config("suppression table is missing charge 1".into()))?;
        let xi = correlation_length(&system, &eta)?;
        let density = suppressed_density(&system, &eta)?;
        let bound = gaussian_bound(&system, &eta, config.tolerances.mode_tail)?;
        let exact = if system.geometry().is_lattice() {
            match exact_partition(&system, config.tolerances.enumeration, config.work_budget) {
                Ok(p) => Some(p.value),
                Err(Error::WorkBudgetExceeded { .. }) | Err(Error::TooLarge(_)) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };

        for &(_, value) in &point {
            table.push_str(&fmt17(value));
            table.push(',');
        }
        table.push_str(&fmt17(ideal.value));
        table.push(',');
        table.push_str(&fmt17(eta1));
        table.push(',');
        table.push_str(&fmt17(xi));
        table.push(',');
        table.push_str(&fmt17(density));
        table.push(',');
        table.push_str(&fmt17(bound.xi2));
        table.push(',');
        if let Some(value) = exact {
            table.push_str(&fmt17(value));
        }
        table.push_str("\r\n");
    }
    Ok(table)
}

fn grid_points(sweep: &SweepSpec) -> Vec<Vec<(SweepName, f64)>> {
    match sweep.variables.as_slice() {
        [a] => a.values.iter().map(|&v| vec![(a.name, v)]).collect(),
        [a, b] => a
            .values
            .iter()
            .flat_map(|&va| b.values.iter().map(move |&vb| vec![(a.name, va), (b.name, vb)]))
            .collect(),
        _ => Vec::new(),
    }
}

/// Process exit code for an error: 2 configuration, 3 numerics, 4 budget.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::InvalidSpecies(_)
        | Error::InvalidGeometry(_)
        | Error::InvalidKernel(_)
        | Error::NotSymmetrizable(_)
        | Error::Config(_) => 2,
        Error::DimensionUnsupported { .. }
        | Error::CutoffRequired(_)
        | Error::NoFiniteLimit(_)
        | Error::NonConvergence(_)
        | Error::Degenerate(_)
        | Error::NotNeutral(_) => 3,
        Error::TooLarge(_) | Error::WorkBudgetExceeded { .. } => 4,
    }
}

/// A machine readable error report for stderr.
pub fn error_document(error: &Error) -> String {
    let mut doc = Map::new();
    doc.insert("error".into(), Value::String(error.to_string()));
    doc.insert("exit_code".into(), Value::from(exit_code(error)));
    render(Value::Object(doc))
}
