//! Ideal-gas species database and molar property evaluation.
//!
//! Heat capacities come from piecewise NASA 7-coefficient polynomials. The
//! enthalpy is anchored to the formation enthalpy at 298.15 K and the
//! entropy to the polynomial value at 298.15 K; both are then integrated
//! from cp across segment boundaries, so they are continuous by construction.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Universal gas constant, J/(mol·K).
pub const GAS_CONSTANT: f64 = 8.314;

/// Standard reference temperature of the formation data, K.
pub const T_STANDARD: f64 = 298.15;

/// Standard pressure, kPa.
pub const P_STANDARD: f64 = 101.325;

/// Species every database must provide.
pub const REQUIRED_SPECIES: [&str; 11] = [
    "O2", "N2", "CO2", "H2O(g)", "H2O(l)", "CO", "H2", "CH4", "SO2", "NO", "NO2",
];

const BUNDLED_DATA: &str = include_str!("../data/species.dat");

/// Atomic masses, kg/kmol.
pub fn atomic_mass(element: &str) -> Option<f64> {
    match element {
        "C" => Some(12.011),
        "H" => Some(1.008),
        "O" => Some(15.999),
        "N" => Some(14.007),
        "S" => Some(32.06),
        "Cl" => Some(35.45),
        "Ar" => Some(39.948),
        _ => None,
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThermoError {
    #[error("species data line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("species database is missing required species `{0}`")]
    MissingSpecies(String),
    #[error(
        "species `{species}`: temperature ranges leave a gap between {gap_start} K and {gap_end} K"
    )]
    RangeGap {
        species: String,
        gap_start: f64,
        gap_end: f64,
    },
    #[error("species `{species}`: temperature ranges overlap between {start} K and {end} K")]
    RangeOverlap {
        species: String,
        start: f64,
        end: f64,
    },
    #[error("species `{species}`: {reason}")]
    InvalidRecord { species: String, reason: String },
    #[error("species `{species}`: temperature {t} K outside [{t_min}, {t_max}] K")]
    TemperatureOutOfRange {
        species: String,
        t: f64,
        t_min: f64,
        t_max: f64,
    },
    #[error("pressure must be positive, got {0} kPa")]
    NonPositivePressure(f64),
    #[error("unknown species `{0}`")]
    UnknownSpecies(String),
    #[error("invalid reference environment: {0}")]
    InvalidEnvironment(String),
    #[error("cannot read species data: {0}")]
    Io(String),
}

/// One temperature segment of a NASA 7-coefficient fit.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySegment {
    pub t_low: f64,
    pub t_high: f64,
    /// cp/R = c0 + c1 T + c2 T² + c3 T³ + c4 T⁴
    pub coeffs: [f64; 5],
    /// Enthalpy integration constant (b1), K.
    pub h_const: f64,
    /// Entropy integration constant (b2).
    pub s_const: f64,
}

impl PolySegment {
    fn contains(&self, t: f64) -> bool {
        t >= self.t_low && t <= self.t_high
    }

    /// cp/R
    pub fn cp_over_r(&self, t: f64) -> f64 {
        let c = &self.coeffs;
        c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * c[4])))
    }

    /// H/R in K, including the integration constant.
    pub fn h_over_r(&self, t: f64) -> f64 {
        let c = &self.coeffs;
        t * (c[0] + t * (c[1] / 2.0 + t * (c[2] / 3.0 + t * (c[3] / 4.0 + t * c[4] / 5.0))))
            + self.h_const
    }

    /// S°/R, including the integration constant.
    pub fn s_over_r(&self, t: f64) -> f64 {
        let c = &self.coeffs;
        c[0] * t.ln()
            + t * (c[1] + t * (c[2] / 2.0 + t * (c[3] / 3.0 + t * c[4] / 4.0)))
            + self.s_const
    }
}

/// A gas (or liquid water) species with formation and exergy reference data.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesRecord {
    pub name: String,
    pub formula: BTreeMap<String, u32>,
    /// kg/kmol
    pub molar_mass: f64,
    /// Standard formation enthalpy, kJ/mol.
    pub h_f0: f64,
    /// Standard molar chemical exergy at (T0, P0), kJ/mol.
    pub ex_ch0: f64,
    pub segments: Vec<PolySegment>,
    // Per-segment offsets that make h and s continuous, in units of R.
    h_offsets: Vec<f64>,
    s_offsets: Vec<f64>,
}

impl SpeciesRecord {
    pub fn new(
        name: &str,
        formula: &str,
        molar_mass: f64,
        h_f0: f64,
        ex_ch0: f64,
        segments: Vec<PolySegment>,
    ) -> Result<Self, ThermoError> {
        let invalid = |reason: String| ThermoError::InvalidRecord {
            species: name.to_string(),
            reason,
        };
        let formula = parse_formula(formula).map_err(invalid)?;
        if !(molar_mass > 0.0) {
            return Err(invalid(format!(
                "molar mass must be positive, got {molar_mass}"
            )));
        }
        let computed: f64 = formula
            .iter()
            .map(|(el, n)| atomic_mass(el).unwrap_or(0.0) * f64::from(*n))
            .sum();
        if (computed - molar_mass).abs() > 0.01 {
            return Err(invalid(format!(
                "molar mass {molar_mass} disagrees with formula mass {computed:.4}"
            )));
        }
        if segments.is_empty() {
            return Err(invalid("no temperature segments".into()));
        }
        for seg in &segments {
            if !(seg.t_low > 0.0) {
                return Err(invalid(format!("segment starts at {} K", seg.t_low)));
            }
            if !(seg.t_low < seg.t_high) {
                return Err(invalid(format!(
                    "segment has T_low {} >= T_high {}",
                    seg.t_low, seg.t_high
                )));
            }
        }
        for pair in segments.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if b.t_low > a.t_high {
                return Err(ThermoError::RangeGap {
                    species: name.to_string(),
                    gap_start: a.t_high,
                    gap_end: b.t_low,
                });
            }
            if b.t_low < a.t_high {
                return Err(ThermoError::RangeOverlap {
                    species: name.to_string(),
                    start: b.t_low,
                    end: a.t_high,
                });
            }
        }
        let t_min = segments[0].t_low;
        let t_max = segments[segments.len() - 1].t_high;
        if !(t_min <= T_STANDARD && T_STANDARD <= t_max) {
            return Err(invalid(format!(
                "range [{t_min}, {t_max}] K does not contain {T_STANDARD} K"
            )));
        }

        // Chain the integration constants outward from the segment holding
        // 298.15 K so that h(298.15) = h_f0 and h, s are continuous.
        let anchor = segments
            .iter()
            .position(|s| s.contains(T_STANDARD))
            .expect("checked above");
        let n = segments.len();
        let mut h_offsets = vec![0.0; n];
        let mut s_offsets = vec![0.0; n];
        h_offsets[anchor] = -segments[anchor].h_over_r(T_STANDARD);
        for k in anchor + 1..n {
            let t = segments[k].t_low;
            h_offsets[k] = segments[k - 1].h_over_r(t) + h_offsets[k - 1] - segments[k].h_over_r(t);
            s_offsets[k] = segments[k - 1].s_over_r(t) + s_offsets[k - 1] - segments[k].s_over_r(t);
        }
        for k in (0..anchor).rev() {
            let t = segments[k].t_high;
            h_offsets[k] = segments[k + 1].h_over_r(t) + h_offsets[k + 1] - segments[k].h_over_r(t);
            s_offsets[k] = segments[k + 1].s_over_r(t) + s_offsets[k + 1] - segments[k].s_over_r(t);
        }

        Ok(Self {
            name: name.to_string(),
            formula,
            molar_mass,
            h_f0,
            ex_ch0,
            segments,
            h_offsets,
            s_offsets,
        })
    }

    pub fn t_min(&self) -> f64 {
        self.segments[0].t_low
    }

    pub fn t_max(&self) -> f64 {
        self.segments[self.segments.len() - 1].t_high
    }

    /// Number of atoms of `element` per molecule.
    pub fn atoms(&self, element: &str) -> u32 {
        self.formula.get(element).copied().unwrap_or(0)
    }

    fn segment_index(&self, t: f64) -> Result<usize, ThermoError> {
        if !t.is_finite() || t < self.t_min() || t > self.t_max() {
            return Err(ThermoError::TemperatureOutOfRange {
                species: self.name.clone(),
                t,
                t_min: self.t_min(),
                t_max: self.t_max(),
            });
        }
        // Lower segment wins on a shared boundary.
        Ok(self
            .segments
            .iter()
            .position(|s| s.contains(t))
            .expect("range checked"))
    }

    /// Isobaric molar heat capacity, J/(mol·K).
    pub fn cp_molar(&self, t: f64) -> Result<f64, ThermoError> {
        let k = self.segment_index(t)?;
        Ok(GAS_CONSTANT * self.segments[k].cp_over_r(t))
    }

    /// Molar enthalpy including formation enthalpy, kJ/mol.
    pub fn enthalpy_molar(&self, t: f64) -> Result<f64, ThermoError> {
        let k = self.segment_index(t)?;
        let sensible = self.segments[k].h_over_r(t) + self.h_offsets[k];
        Ok(self.h_f0 + GAS_CONSTANT * sensible / 1000.0)
    }

    /// Standard-pressure molar entropy s°(T), J/(mol·K).
    pub fn standard_entropy(&self, t: f64) -> Result<f64, ThermoError> {
        let k = self.segment_index(t)?;
        Ok(GAS_CONSTANT * (self.segments[k].s_over_r(t) + self.s_offsets[k]))
    }

    /// Molar entropy at partial pressure `p_partial` (kPa), J/(mol·K).
    pub fn entropy_molar(
        &self,
        t: f64,
        p_partial: f64,
        env: &ReferenceEnvironment,
    ) -> Result<f64, ThermoError> {
        if !(p_partial > 0.0) {
            return Err(ThermoError::NonPositivePressure(p_partial));
        }
        Ok(self.standard_entropy(t)? - env.ru * (p_partial / env.p0).ln())
    }

    /// Standard molar Gibbs function g°(T) = h(T) − T·s°(T), kJ/mol.
    pub fn gibbs_molar(&self, t: f64) -> Result<f64, ThermoError> {
        Ok(self.enthalpy_molar(t)? - t * self.standard_entropy(t)? / 1000.0)
    }

    /// Temperature-corrected standard chemical exergy, kJ/mol:
    /// (T0/T)·ex°_ch − h_f0·(T − T0)/T.
    pub fn chemical_exergy_at_t(
        &self,
        t: f64,
        env: &ReferenceEnvironment,
    ) -> Result<f64, ThermoError> {
        // Every segment lies above 0 K, so the range check also enforces T > 0.
        self.segment_index(t)?;
        Ok(env.t0 / t * self.ex_ch0 - self.h_f0 * (t - env.t0) / t)
    }
}

fn parse_formula(formula: &str) -> Result<BTreeMap<String, u32>, String> {
    let mut out = BTreeMap::new();
    let chars: Vec<char> = formula.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].is_ascii_uppercase() {
            return Err(format!("malformed formula `{formula}`"));
        }
        let mut element = chars[i].to_string();
        i += 1;
        while i < chars.len() && chars[i].is_ascii_lowercase() {
            element.push(chars[i]);
            i += 1;
        }
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let count: u32 = if start == i {
            1
        } else {
            chars[start..i]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| format!("malformed count in `{formula}`"))?
        };
        if atomic_mass(&element).is_none() {
            return Err(format!("unknown element `{element}` in `{formula}`"));
        }
        *out.entry(element).or_insert(0) += count;
    }
    if out.is_empty() {
        return Err("empty formula".into());
    }
    Ok(out)
}

/// Dead-state definition for exergy accounting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceEnvironment {
    /// K
    pub t0: f64,
    /// kPa
    pub p0: f64,
    pub air_o2_frac: f64,
    pub air_n2_frac: f64,
    /// J/(mol·K)
    pub ru: f64,
}

impl Default for ReferenceEnvironment {
    fn default() -> Self {
        Self {
            t0: T_STANDARD,
            p0: P_STANDARD,
            air_o2_frac: 0.21,
            air_n2_frac: 0.79,
            ru: GAS_CONSTANT,
        }
    }
}

impl ReferenceEnvironment {
    pub fn new(t0: f64, p0: f64) -> Result<Self, ThermoError> {
        let env = Self {
            t0,
            p0,
            ..Self::default()
        };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<(), ThermoError> {
        if !(self.t0 > 0.0) {
            return Err(ThermoError::InvalidEnvironment(format!(
                "T0 = {} K",
                self.t0
            )));
        }
        if !(self.p0 > 0.0) {
            return Err(ThermoError::InvalidEnvironment(format!(
                "P0 = {} kPa",
                self.p0
            )));
        }
        if ((self.air_o2_frac + self.air_n2_frac) - 1.0).abs() > 1e-12 {
            return Err(ThermoError::InvalidEnvironment(
                "air fractions must sum to 1".into(),
            ));
        }
        Ok(())
    }

    /// Ru·T0 in kJ/mol.
    pub fn rt0(&self) -> f64 {
        self.ru * self.t0 / 1000.0
    }
}

/// Immutable collection of species records addressable by name.
#[derive(Debug, Clone)]
pub struct SpeciesDb {
    records: Vec<SpeciesRecord>,
    index: HashMap<String, usize>,
}

impl SpeciesDb {
    pub fn from_records(records: Vec<SpeciesRecord>) -> Result<Self, ThermoError> {
        let mut index = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if index.insert(r.name.clone(), i).is_some() {
                return Err(ThermoError::InvalidRecord {
                    species: r.name.clone(),
                    reason: "duplicate species".into(),
                });
            }
        }
        for name in REQUIRED_SPECIES {
            if !index.contains_key(name) {
                return Err(ThermoError::MissingSpecies(name.to_string()));
            }
        }
        Ok(Self { records, index })
    }

    /// Parses the line-oriented species data format.
    pub fn parse(text: &str) -> Result<Self, ThermoError> {
        Self::from_records(parse_records(text)?)
    }

    /// The database shipped with the crate.
    pub fn bundled() -> &'static SpeciesDb {
        static DB: OnceLock<SpeciesDb> = OnceLock::new();
        DB.get_or_init(|| SpeciesDb::parse(BUNDLED_DATA).expect("bundled species data is valid"))
    }

    pub fn get(&self, name: &str) -> Result<&SpeciesRecord, ThermoError> {
        self.index
            .get(name)
            .map(|&i| &self.records[i])
            .ok_or_else(|| ThermoError::UnknownSpecies(name.to_string()))
    }

    pub fn records(&self) -> &[SpeciesRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl fmt::Display for SpeciesRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (M = {} kg/kmol, h_f0 = {} kJ/mol, ex_ch0 = {} kJ/mol, {}-{} K)",
            self.name,
            self.molar_mass,
            self.h_f0,
            self.ex_ch0,
            self.t_min(),
            self.t_max()
        )
    }
}

/// Reads a species data file from disk.
pub fn load_species_db(path: impl AsRef<Path>) -> Result<SpeciesDb, ThermoError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| ThermoError::Io(format!("{}: {e}", path.as_ref().display())))?;
    SpeciesDb::parse(&text)
}

fn parse_records(text: &str) -> Result<Vec<SpeciesRecord>, ThermoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let mut records = Vec::new();
    while let Some((line, header)) = lines.next() {
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(ThermoError::Parse {
                line,
                message: format!("expected 6 header fields, found {}", fields.len()),
            });
        }
        let num = |s: &str, what: &str| -> Result<f64, ThermoError> {
            s.parse::<f64>().map_err(|_| ThermoError::Parse {
                line,
                message: format!("invalid {what} `{s}`"),
            })
        };
        let molar_mass = num(fields[2], "molar mass")?;
        let h_f0 = num(fields[3], "formation enthalpy")?;
        let ex_ch0 = num(fields[4], "chemical exergy")?;
        let n_segments: usize = fields[5].parse().map_err(|_| ThermoError::Parse {
            line,
            message: format!("invalid segment count `{}`", fields[5]),
        })?;

        let mut segments = Vec::with_capacity(n_segments);
        for _ in 0..n_segments {
            let (seg_line, text) = lines.next().ok_or(ThermoError::Parse {
                line,
                message: format!("species `{}` ends before all segments", fields[0]),
            })?;
            let values = text
                .split_whitespace()
                .map(|v| {
                    v.parse::<f64>().map_err(|_| ThermoError::Parse {
                        line: seg_line,
                        message: format!("invalid number `{v}`"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if values.len() != 9 {
                return Err(ThermoError::Parse {
                    line: seg_line,
                    message: format!("expected 9 segment fields, found {}", values.len()),
                });
            }
            segments.push(PolySegment {
                t_low: values[0],
                t_high: values[1],
                coeffs: [values[2], values[3], values[4], values[5], values[6]],
                h_const: values[7],
                s_const: values[8],
            });
        }
        records.push(SpeciesRecord::new(
            fields[0], fields[1], molar_mass, h_f0, ex_ch0, segments,
        )?);
    }
    Ok(records)
}
