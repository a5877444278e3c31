//! One-dimensional parametric sweeps and CSV output.
//!
//! Temperatures in sweep configurations are °C; everything downstream runs
//! in kelvin.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{run_analysis, AnalysisOptions, RunResult};
use crate::error::{Error, Result};
use crate::exergy::DEFAULT_STACK_T;
use crate::fuel::{builtin_fuel, load_fuel_file, BiomassFuel};
use crate::gasifier::{GasifierError, GasifierSpec, MethaneClosure};
use crate::thermo::{ReferenceEnvironment, SpeciesDb, P_STANDARD};

pub const KELVIN_OFFSET: f64 = 273.15;

pub const CSV_HEADER: [&str; 19] = [
    "param_value",
    "T0_K",
    "Tgas_K",
    "ER",
    "w",
    "z_H2",
    "z_CO",
    "z_CO2",
    "z_H2O",
    "z_CH4",
    "z_N2",
    "gas_LHV_MJ_per_kmol",
    "Ex_in_kW",
    "Ex_out_kW",
    "Ex_D_kW",
    "S_gen_kW_per_K",
    "eta",
    "psi",
    "status",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParameter {
    /// Dead-state temperature, °C.
    #[serde(rename = "ambient_T")]
    AmbientT,
    /// Gasifier temperature, °C.
    #[serde(rename = "gasifier_T")]
    GasifierT,
    #[serde(rename = "equivalence_ratio")]
    EquivalenceRatio,
    /// kg water per kg dry fuel.
    #[serde(rename = "moisture")]
    Moisture,
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParameter::AmbientT => "ambient_T",
            SweepParameter::GasifierT => "gasifier_T",
            SweepParameter::EquivalenceRatio => "equivalence_ratio",
            SweepParameter::Moisture => "moisture",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FuelSource {
    Builtin(String),
    File { file: PathBuf },
}

impl FuelSource {
    pub fn load(&self) -> Result<BiomassFuel> {
        Ok(match self {
            FuelSource::Builtin(name) => builtin_fuel(name)?,
            FuelSource::File { file } => load_fuel_file(file)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub step: Option<f64>,
}

impl SweepRange {
    pub fn with_count(lo: f64, hi: f64, count: usize) -> Self {
        Self {
            lo,
            hi,
            count: Some(count),
            step: None,
        }
    }

    /// Grid points lo + i·(hi − lo)/(n − 1).
    pub fn points(&self) -> Result<Vec<f64>> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.lo.is_finite() && self.hi.is_finite()) {
            return bad("range bounds must be finite".into());
        }
        let n = match (self.count, self.step) {
            (Some(_), Some(_)) => return bad("give either count or step, not both".into()),
            (None, None) => return bad("range needs count or step".into()),
            (Some(n), None) => n,
            (None, Some(step)) => {
                if !(step > 0.0) {
                    return bad(format!("step {step} must be positive"));
                }
                let intervals = (self.hi - self.lo) / step;
                let rounded = intervals.round();
                if (intervals - rounded).abs() > 1e-9 * rounded.max(1.0) {
                    return bad(format!(
                        "step {step} does not divide [{}, {}]",
                        self.lo, self.hi
                    ));
                }
                rounded as usize + 1
            }
        };
        if n == 1 && self.lo == self.hi {
            return Ok(vec![self.lo]);
        }
        if !(self.lo < self.hi) {
            return bad(format!(
                "range needs lo < hi, got [{}, {}]",
                self.lo, self.hi
            ));
        }
        if n < 2 {
            return bad(format!("count {n} must be at least 2"));
        }
        let span = self.hi - self.lo;
        let last = (n - 1) as f64;
        Ok((0..n).map(|i| self.lo + i as f64 * span / last).collect())
    }
}

/// Settings held constant during a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FixedSettings {
    pub t0_c: f64,
    pub p0_kpa: f64,
    pub t_gasifier_c: f64,
    pub pressure_kpa: f64,
    pub equivalence_ratio: f64,
    pub heat_loss_fraction: f64,
    pub moisture_w: f64,
    pub methane_closure: MethaneClosure,
    pub cold_gas_only: bool,
    pub t_stack_c: f64,
}

impl Default for FixedSettings {
    fn default() -> Self {
        let spec = GasifierSpec::default();
        Self {
            t0_c: 25.0,
            p0_kpa: P_STANDARD,
            t_gasifier_c: spec.t_gasifier - KELVIN_OFFSET,
            pressure_kpa: spec.pressure,
            equivalence_ratio: spec.equivalence_ratio,
            heat_loss_fraction: spec.heat_loss_fraction,
            moisture_w: spec.moisture_w,
            methane_closure: spec.methane_closure,
            cold_gas_only: false,
            t_stack_c: DEFAULT_STACK_T - KELVIN_OFFSET,
        }
    }
}

impl FixedSettings {
    pub fn spec(&self) -> GasifierSpec {
        GasifierSpec {
            t_gasifier: self.t_gasifier_c + KELVIN_OFFSET,
            pressure: self.pressure_kpa,
            equivalence_ratio: self.equivalence_ratio,
            heat_loss_fraction: self.heat_loss_fraction,
            moisture_w: self.moisture_w,
            methane_closure: self.methane_closure,
        }
    }

    pub fn env(&self) -> Result<ReferenceEnvironment> {
        Ok(ReferenceEnvironment::new(
            self.t0_c + KELVIN_OFFSET,
            self.p0_kpa,
        )?)
    }

    pub fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            cold_gas_only: self.cold_gas_only,
            t_stack: self.t_stack_c + KELVIN_OFFSET,
        }
    }

    /// Settings with the swept parameter replaced by `value`.
    pub fn with_parameter(&self, parameter: SweepParameter, value: f64) -> Self {
        let mut s = *self;
        match parameter {
            SweepParameter::AmbientT => s.t0_c = value,
            SweepParameter::GasifierT => s.t_gasifier_c = value,
            SweepParameter::EquivalenceRatio => s.equivalence_ratio = value,
            SweepParameter::Moisture => s.moisture_w = value,
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub fuel: FuelSource,
    pub parameter: SweepParameter,
    pub range: SweepRange,
    #[serde(default)]
    pub fixed: FixedSettings,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.range.points()?;
        self.fixed.spec().validate()?;
        self.fixed.env()?;
        Ok(())
    }

    /// Built-in presets: `fig2` sweeps ambient 10 to 30 °C with the gasifier at
    /// 800 °C; `fig3` sweeps the gasifier 625 to 850 °C. Both use oak wood at
    /// ER 0.35 with 21 points.
    pub fn preset(name: &str) -> Result<Self> {
        let (parameter, range, fixed) = match name {
            "fig2" => (
                SweepParameter::AmbientT,
                SweepRange::with_count(10.0, 30.0, 21),
                FixedSettings {
                    t_gasifier_c: 800.0,
                    ..Default::default()
                },
            ),
            "fig3" => (
                SweepParameter::GasifierT,
                SweepRange::with_count(625.0, 850.0, 21),
                FixedSettings::default(),
            ),
            other => {
                return Err(Error::Config(format!(
                    "unknown preset `{other}` (fig2, fig3)"
                )))
            }
        };
        Ok(Self {
            fuel: FuelSource::Builtin("oak_wood".into()),
            parameter,
            range,
            fixed: FixedSettings {
                equivalence_ratio: 0.35,
                ..fixed
            },
            output: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Ok,
    NoConvergence,
    Infeasible,
    InvalidInput,
}

impl PointStatus {
    fn of_error(e: &Error) -> Self {
        match e {
            Error::Gasifier(
                GasifierError::NonConvergence { .. } | GasifierError::Unconverged(_),
            ) => PointStatus::NoConvergence,
            Error::Gasifier(GasifierError::NegativeComposition { .. }) => PointStatus::Infeasible,
            _ => PointStatus::InvalidInput,
        }
    }
}

impl fmt::Display for PointStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointStatus::Ok => "ok",
            PointStatus::NoConvergence => "no_convergence",
            PointStatus::Infeasible => "infeasible",
            PointStatus::InvalidInput => "invalid_input",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub index: usize,
    pub param_value: f64,
    pub settings: FixedSettings,
    pub status: PointStatus,
    pub result: Option<RunResult>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Increasing,
    Decreasing,
    Constant,
    NonMonotonic,
    /// Fewer than two converged points.
    Undetermined,
}

impl Trend {
    pub fn of(values: &[f64]) -> Self {
        if values.len() < 2 {
            return Trend::Undetermined;
        }
        let pairs = || values.windows(2);
        if pairs().all(|w| w[1] > w[0]) {
            Trend::Increasing
        } else if pairs().all(|w| w[1] < w[0]) {
            Trend::Decreasing
        } else if pairs().all(|w| w[1] == w[0]) {
            Trend::Constant
        } else {
            Trend::NonMonotonic
        }
    }
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trend::Increasing => "strictly increasing",
            Trend::Decreasing => "strictly decreasing",
            Trend::Constant => "constant",
            Trend::NonMonotonic => "non-monotonic",
            Trend::Undetermined => "undetermined",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutput {
    pub parameter: SweepParameter,
    pub points: Vec<SweepPoint>,
    pub destruction_trend: Trend,
    pub psi_trend: Trend,
    pub notes: Vec<String>,
}

impl SweepOutput {
    pub fn converged(&self) -> impl Iterator<Item = &RunResult> {
        self.points.iter().filter_map(|p| p.result.as_ref())
    }

    pub fn failed_count(&self) -> usize {
        self.points.iter().filter(|p| p.result.is_none()).count()
    }
}

pub fn run_sweep(db: &SpeciesDb, cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let fuel = cfg.fuel.load()?;
    let grid = cfg.range.points()?;

    let points: Vec<SweepPoint> = grid
        .par_iter()
        .enumerate()
        .map(|(index, &value)| {
            let settings = cfg.fixed.with_parameter(cfg.parameter, value);
            let outcome = settings.env().and_then(|env| {
                run_analysis(db, &fuel, &settings.spec(), &env, &settings.options())
            });
            let (status, result, message) = match outcome {
                Ok(r) => (PointStatus::Ok, Some(r), None),
                Err(e) => (PointStatus::of_error(&e), None, Some(e.to_string())),
            };
            SweepPoint {
                index,
                param_value: value,
                settings,
                status,
                result,
                message,
            }
        })
        .collect();

    if points.iter().all(|p| p.result.is_none()) {
        return Err(Error::AllPointsFailed(points.len()));
    }

    let destruction: Vec<f64> = points
        .iter()
        .filter_map(|p| p.result.as_ref())
        .map(|r| r.balance.destruction)
        .collect();
    let psi: Vec<f64> = points
        .iter()
        .filter_map(|p| p.result.as_ref())
        .map(|r| r.psi)
        .collect();
    let destruction_trend = Trend::of(&destruction);
    let psi_trend = Trend::of(&psi);

    let mut notes = vec![
        format!(
            "{} sweep over [{}, {}] with {} points, {} failed",
            cfg.parameter,
            cfg.range.lo,
            cfg.range.hi,
            points.len(),
            points.iter().filter(|p| p.result.is_none()).count()
        ),
        format!("Ex_D is {destruction_trend} with {}", cfg.parameter),
        format!("psi is {psi_trend} with {}", cfg.parameter),
    ];
    if cfg.parameter == SweepParameter::AmbientT {
        let sgen: Vec<f64> = points
            .iter()
            .filter_map(|p| p.result.as_ref())
            .map(|r| r.balance.entropy_generation)
            .collect();
        notes.push(format!(
            "S_gen is {} with ambient_T; Ex_D = T0*S_gen, so a rising T0 raises Ex_D unless S_gen falls faster",
            Trend::of(&sgen)
        ));
    }
    for p in points.iter().filter(|p| p.result.is_none()) {
        notes.push(format!(
            "point {} ({} = {}): {}: {}",
            p.index,
            cfg.parameter,
            p.param_value,
            p.status,
            p.message.as_deref().unwrap_or("")
        ));
    }

    Ok(SweepOutput {
        parameter: cfg.parameter,
        points,
        destruction_trend,
        psi_trend,
        notes,
    })
}

fn csv_row(p: &SweepPoint) -> Vec<String> {
    let num = |v: f64| v.to_string();
    let spec = p.settings.spec();
    let mut row = vec![
        num(p.param_value),
        num(p.settings.t0_c + KELVIN_OFFSET),
        num(spec.t_gasifier),
        num(spec.equivalence_ratio),
        num(spec.moisture_w),
    ];
    match &p.result {
        Some(r) => {
            row.extend(r.mole_fractions.iter().map(|z| num(*z)));
            row.extend(
                [
                    r.gas_lhv.per_kmol_gas,
                    r.balance.exergy_in,
                    r.balance.exergy_out,
                    r.balance.destruction,
                    r.balance.entropy_generation,
                    r.eta,
                    r.psi,
                ]
                .map(num),
            );
        }
        None => row.extend(std::iter::repeat_n(String::new(), 13)),
    }
    row.push(p.status.to_string());
    row
}

/// Writes the header and one row per point.
pub fn write_csv<W: Write>(points: &[SweepPoint], out: W) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyResults);
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for p in points {
        w.write_record(csv_row(p))?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(points: &[SweepPoint], path: impl AsRef<Path>) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyResults);
    }
    let path = path.as_ref();
    let file =
        std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_csv(points, std::io::BufWriter::new(file))
}

/// Notes file path next to a CSV: `x.csv` → `x.notes.txt`.
pub fn notes_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("notes.txt")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spacing() {
        let pts = SweepRange::with_count(625.0, 850.0, 10).points().unwrap();
        assert_eq!(pts.len(), 10);
        assert_eq!(pts[0], 625.0);
        assert_eq!(pts[9], 850.0);
        for (i, p) in pts.iter().enumerate() {
            assert!((p - (625.0 + i as f64 * 25.0)).abs() < 1e-12);
        }
        let stepped = SweepRange {
            lo: 10.0,
            hi: 30.0,
            count: None,
            step: Some(1.0),
        };
        assert_eq!(stepped.points().unwrap().len(), 21);
    }

    #[test]
    fn bad_ranges() {
        assert!(SweepRange::with_count(1.0, 0.0, 5).points().is_err());
        assert!(SweepRange::with_count(0.0, 1.0, 1).points().is_err());
        assert!(SweepRange::with_count(1.0, 1.0, 3).points().is_err());
        assert_eq!(
            SweepRange::with_count(1.0, 1.0, 1).points().unwrap(),
            vec![1.0]
        );
        let both = SweepRange {
            lo: 0.0,
            hi: 1.0,
            count: Some(2),
            step: Some(0.5),
        };
        assert!(both.points().is_err());
        let uneven = SweepRange {
            lo: 0.0,
            hi: 1.0,
            count: None,
            step: Some(0.3),
        };
        assert!(uneven.points().is_err());
    }

    #[test]
    fn trend_classification() {
        assert_eq!(Trend::of(&[1.0, 2.0, 3.0]), Trend::Increasing);
        assert_eq!(Trend::of(&[3.0, 2.0, 1.0]), Trend::Decreasing);
        assert_eq!(Trend::of(&[1.0, 1.0]), Trend::Constant);
        assert_eq!(Trend::of(&[1.0, 2.0, 1.0]), Trend::NonMonotonic);
        assert_eq!(Trend::of(&[1.0]), Trend::Undetermined);
    }

    #[test]
    fn presets() {
        let fig2 = SweepConfig::preset("fig2").unwrap();
        assert_eq!(fig2.parameter, SweepParameter::AmbientT);
        assert_eq!(fig2.range.points().unwrap().len(), 21);
        assert_eq!(fig2.fixed.t_gasifier_c, 800.0);
        let fig3 = SweepConfig::preset("fig3").unwrap();
        assert_eq!(fig3.range.points().unwrap().first(), Some(&625.0));
        assert!(SweepConfig::preset("fig9").is_err());
    }

    #[test]
    fn config_json() {
        let cfg = SweepConfig::from_json(
            r#"{"fuel": "straw", "parameter": "equivalence_ratio",
                "range": {"lo": 0.25, "hi": 0.45, "count": 5},
                "fixed": {"t_gasifier_c": 850}}"#,
        )
        .unwrap();
        assert_eq!(cfg.fuel, FuelSource::Builtin("straw".into()));
        assert_eq!(cfg.fixed.t_gasifier_c, 850.0);
        assert_eq!(cfg.fixed.t0_c, 25.0);
        let file = SweepConfig::from_json(
            r#"{"fuel": {"file": "f.json"}, "parameter": "moisture", "range": {"lo": 0, "hi": 0.2, "step": 0.1}}"#,
        )
        .unwrap();
        assert_eq!(
            file.fuel,
            FuelSource::File {
                file: "f.json".into()
            }
        );
        assert!(SweepConfig::from_json(r#"{"fuel": "oak_wood", "parameter": "pressure", "range": {"lo": 0, "hi": 1, "count": 2}}"#).is_err());
        assert!(SweepConfig::from_json(r#"{"fuel": "oak_wood", "parameter": "moisture", "range": {"lo": 0, "hi": 1, "count": 2}, "fixed": {"equivalence_ratio": 2}}"#).is_err());
    }

    #[test]
    fn empty_results_rejected() {
        assert!(matches!(
            write_csv(&[], Vec::new()),
            Err(Error::EmptyResults)
        ));
    }

    #[test]
    fn notes_path_next_to_csv() {
        assert_eq!(
            notes_path(Path::new("out/fig3.csv")),
            PathBuf::from("out/fig3.notes.txt")
        );
    }
}
