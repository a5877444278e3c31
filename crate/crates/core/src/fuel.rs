//! Solid biomass fuel characterization: composition bases, heating values,
//! elemental mole content and Szargut chemical exergy.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::thermo::{atomic_mass, SpeciesDb, ThermoError};

/// Latent heat of water at 25 °C, MJ/kg.
pub const WATER_LATENT_HEAT: f64 = 2.442;

/// Szargut's correlation is fitted for O/C mass ratios up to this value.
pub const BETA_OC_VALIDITY_LIMIT: f64 = 0.667;

/// Typical as-received LHV band for biomass, MJ/kg.
pub const TYPICAL_LHV_RANGE: (f64, f64) = (14.0, 21.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuelError {
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
    #[error("expected {expected} basis, got {found}")]
    WrongBasis { expected: Basis, found: Basis },
    #[error("invalid fuel: {0}")]
    InvalidFuel(String),
    #[error("carbon content must be positive for the exergy correlation")]
    ZeroCarbon,
    #[error("exergy correlation denominator is non-positive at O/C = {oc_ratio}")]
    NonPositiveDenominator { oc_ratio: f64 },
    #[error("unknown fuel `{0}`")]
    UnknownFuel(String),
    #[error("cannot read fuel file: {0}")]
    Io(String),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
}

/// Non-fatal diagnostics attached to fuel calculations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FuelWarning {
    /// O/C mass ratio exceeds the fitted range of the β correlation.
    OxygenCarbonAboveValidity { oc_ratio: f64 },
    /// As-received LHV outside the typical biomass band.
    HeatingValueOutsideTypicalRange { lhv: f64 },
}

impl fmt::Display for FuelWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FuelWarning::OxygenCarbonAboveValidity { oc_ratio } => write!(
                f,
                "O/C mass ratio {oc_ratio:.3} exceeds the beta correlation limit {BETA_OC_VALIDITY_LIMIT}"
            ),
            FuelWarning::HeatingValueOutsideTypicalRange { lhv } => write!(
                f,
                "as-received LHV {lhv:.2} MJ/kg outside typical range {}-{} MJ/kg",
                TYPICAL_LHV_RANGE.0, TYPICAL_LHV_RANGE.1
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    AsReceived,
    Dry,
    DryAshFree,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::AsReceived => "as-received",
            Basis::Dry => "dry",
            Basis::DryAshFree => "dry-ash-free",
        })
    }
}

/// Elemental mass composition, wt%.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UltimateAnalysis {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "O")]
    pub o: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "S", default)]
    pub s: f64,
    #[serde(rename = "Cl", default)]
    pub cl: f64,
    pub basis: Basis,
}

impl UltimateAnalysis {
    pub fn new(c: f64, h: f64, o: f64, n: f64, s: f64, cl: f64, basis: Basis) -> Self {
        Self {
            c,
            h,
            o,
            n,
            s,
            cl,
            basis,
        }
    }

    pub fn sum(&self) -> f64 {
        self.c + self.h + self.o + self.n + self.s + self.cl
    }

    fn components(&self) -> [f64; 6] {
        [self.c, self.h, self.o, self.n, self.s, self.cl]
    }

    fn scaled(&self, factor: f64, basis: Basis) -> Self {
        Self {
            c: self.c * factor,
            h: self.h * factor,
            o: self.o * factor,
            n: self.n * factor,
            s: self.s * factor,
            cl: self.cl * factor,
            basis,
        }
    }

    pub fn validate(&self) -> Result<(), FuelError> {
        if self
            .components()
            .iter()
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(FuelError::InvalidComposition(
                "ultimate analysis components must be non-negative".into(),
            ));
        }
        let sum = self.sum();
        match self.basis {
            Basis::DryAshFree if !(99.0..=101.0).contains(&sum) => {
                Err(FuelError::InvalidComposition(format!(
                    "dry-ash-free ultimate analysis sums to {sum}, expected 99-101"
                )))
            }
            Basis::Dry | Basis::AsReceived if sum > 100.0 + 1e-9 => Err(
                FuelError::InvalidComposition(format!("ultimate analysis sums to {sum} > 100")),
            ),
            _ => Ok(()),
        }
    }
}

/// Volatile matter / fixed carbon / moisture / ash split, wt% as received.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProximateAnalysis {
    #[serde(rename = "VM")]
    pub volatile_matter: f64,
    #[serde(rename = "FC")]
    pub fixed_carbon: f64,
    #[serde(rename = "M")]
    pub moisture: f64,
    #[serde(rename = "A")]
    pub ash: f64,
}

impl ProximateAnalysis {
    pub fn validate(&self) -> Result<(), FuelError> {
        let parts = [
            self.volatile_matter,
            self.fixed_carbon,
            self.moisture,
            self.ash,
        ];
        if parts.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(FuelError::InvalidComposition(
                "proximate analysis components must be non-negative".into(),
            ));
        }
        let sum: f64 = parts.iter().sum();
        if !(99.0..=101.0).contains(&sum) {
            return Err(FuelError::InvalidComposition(format!(
                "proximate analysis sums to {sum}, expected 99-101"
            )));
        }
        if self.moisture + self.ash >= 100.0 {
            return Err(FuelError::InvalidComposition(
                "moisture plus ash must be below 100 wt%".into(),
            ));
        }
        Ok(())
    }

    /// Ash on a dry basis, wt%.
    pub fn ash_dry(&self) -> f64 {
        self.ash / (1.0 - self.moisture / 100.0)
    }

    /// Moisture as kg water per kg dry fuel.
    pub fn moisture_per_kg_dry(&self) -> f64 {
        let m = self.moisture / 100.0;
        m / (1.0 - m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiomassFuel {
    pub name: String,
    pub ultimate: UltimateAnalysis,
    pub proximate: ProximateAnalysis,
    /// Dry-basis feed rate, kg/s.
    #[serde(default = "default_mass_flow")]
    pub mass_flow: f64,
}

fn default_mass_flow() -> f64 {
    1.0
}

impl BiomassFuel {
    pub fn validate(&self) -> Result<(), FuelError> {
        self.ultimate.validate()?;
        self.proximate.validate()?;
        if !(self.mass_flow.is_finite() && self.mass_flow >= 0.0) {
            return Err(FuelError::InvalidFuel(format!(
                "mass flow must be non-negative, got {}",
                self.mass_flow
            )));
        }
        Ok(())
    }

    pub fn dry_ultimate(&self) -> Result<UltimateAnalysis, FuelError> {
        convert_basis(&self.ultimate, &self.proximate, Basis::Dry)
    }

    /// HHV of the dry fuel, MJ/kg dry.
    pub fn hhv_dry(&self) -> Result<f64, FuelError> {
        hhv(&self.dry_ultimate()?, self.proximate.ash_dry())
    }

    /// LHV of the dry fuel, MJ/kg dry.
    pub fn lhv_dry(&self) -> Result<f64, FuelError> {
        let u = self.dry_ultimate()?;
        lhv_from_hhv(hhv(&u, self.proximate.ash_dry())?, u.h, 0.0)
    }

    /// LHV as received, MJ/kg wet fuel.
    pub fn lhv_as_received(&self) -> Result<f64, FuelError> {
        let m = self.proximate.moisture / 100.0;
        Ok(self.lhv_dry()? * (1.0 - m) - WATER_LATENT_HEAT * m)
    }

    pub fn with_mass_flow(mut self, mass_flow: f64) -> Self {
        self.mass_flow = mass_flow;
        self
    }
}

/// Elemental content of one kg of dry fuel, kmol/kg.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct FuelElementalMoles {
    pub c: f64,
    pub h: f64,
    pub o: f64,
    pub n: f64,
    pub s: f64,
}

impl FuelElementalMoles {
    /// Mass of the bound elements plus `ash_frac`, kg per kg dry fuel.
    pub fn reconstructed_mass(&self, ash_frac: f64) -> f64 {
        let m = |el: &str| atomic_mass(el).expect("known element");
        self.c * m("C")
            + self.h * m("H")
            + self.o * m("O")
            + self.n * m("N")
            + self.s * m("S")
            + ash_frac
    }
}

/// Mass fraction of the given basis material in as-received fuel.
fn basis_fraction(basis: Basis, p: &ProximateAnalysis) -> f64 {
    let m = p.moisture / 100.0;
    let a = p.ash / 100.0;
    match basis {
        Basis::AsReceived => 1.0,
        Basis::Dry => 1.0 - m,
        Basis::DryAshFree => 1.0 - m - a,
    }
}

/// Re-expresses an ultimate analysis on another basis using the moisture and
/// ash of the proximate analysis.
pub fn convert_basis(
    u: &UltimateAnalysis,
    p: &ProximateAnalysis,
    target: Basis,
) -> Result<UltimateAnalysis, FuelError> {
    if !(p.moisture < 100.0 && p.ash < 100.0 && p.moisture + p.ash < 100.0) {
        return Err(FuelError::InvalidComposition(format!(
            "moisture {} and ash {} leave no combustible matter",
            p.moisture, p.ash
        )));
    }
    if p.moisture < 0.0 || p.ash < 0.0 {
        return Err(FuelError::InvalidComposition(
            "moisture and ash must be non-negative".into(),
        ));
    }
    if target == u.basis {
        return Ok(*u);
    }
    let factor = basis_fraction(u.basis, p) / basis_fraction(target, p);
    let out = u.scaled(factor, target);
    if out.components().iter().any(|v| *v < 0.0) {
        return Err(FuelError::InvalidComposition(
            "basis conversion produced a negative component".into(),
        ));
    }
    Ok(out)
}

/// Higher heating value from the ultimate analysis and ash content (wt%), MJ/kg.
pub fn hhv(u: &UltimateAnalysis, ash: f64) -> Result<f64, FuelError> {
    if u.components().iter().any(|v| *v < 0.0) || ash < 0.0 {
        return Err(FuelError::InvalidComposition(
            "heating value needs non-negative composition".into(),
        ));
    }
    if u.sum() + ash > 101.0 {
        return Err(FuelError::InvalidComposition(format!(
            "composition plus ash sums to {} > 101",
            u.sum() + ash
        )));
    }
    let f = |wt: f64| wt / 100.0;
    Ok(
        34.91 * f(u.c) + 117.83 * f(u.h) + 100.55 * f(u.s) + 1.51 * f(u.n)
            - 10.34 * f(u.o)
            - 2.11 * f(ash),
    )
}

/// Lower heating value by deducting the latent heat of product and moisture
/// water, MJ/kg.
pub fn lhv_from_hhv(hhv: f64, h: f64, m: f64) -> Result<f64, FuelError> {
    if h < 0.0 || m < 0.0 {
        return Err(FuelError::InvalidComposition(
            "hydrogen and moisture must be non-negative".into(),
        ));
    }
    let lhv = hhv - WATER_LATENT_HEAT * (9.0 * h / 100.0 + m / 100.0);
    if lhv < 0.0 {
        return Err(FuelError::InvalidFuel(format!("negative LHV {lhv} MJ/kg")));
    }
    Ok(lhv)
}

/// kmol of each element per kg of dry fuel.
pub fn elemental_moles(u: &UltimateAnalysis) -> Result<FuelElementalMoles, FuelError> {
    if u.basis != Basis::Dry {
        return Err(FuelError::WrongBasis {
            expected: Basis::Dry,
            found: u.basis,
        });
    }
    let per = |wt: f64, el: &str| wt / (100.0 * atomic_mass(el).expect("known element"));
    Ok(FuelElementalMoles {
        c: per(u.c, "C"),
        h: per(u.h, "H"),
        o: per(u.o, "O"),
        n: per(u.n, "N"),
        s: per(u.s, "S"),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SzargutBeta {
    pub value: f64,
    pub warning: Option<FuelWarning>,
}

/// Exergy-to-LHV coefficient of a solid fuel from its H/C and O/C mass ratios.
pub fn szargut_beta(u: &UltimateAnalysis) -> Result<SzargutBeta, FuelError> {
    if !(u.c > 0.0) {
        return Err(FuelError::ZeroCarbon);
    }
    let hc = u.h / u.c;
    let oc = u.o / u.c;
    let denominator = 1.0 - 0.4124 * oc;
    if !(denominator > 0.0) {
        return Err(FuelError::NonPositiveDenominator { oc_ratio: oc });
    }
    let value = (1.044 + 0.016 * hc - 0.3493 * oc * (1.0 + 0.0531 * hc)) / denominator;
    if !(value > 0.0) {
        return Err(FuelError::InvalidFuel(format!("non-positive beta {value}")));
    }
    let warning = (oc > BETA_OC_VALIDITY_LIMIT)
        .then_some(FuelWarning::OxygenCarbonAboveValidity { oc_ratio: oc });
    Ok(SzargutBeta { value, warning })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuelExergy {
    pub beta: f64,
    /// MJ/kg as received.
    pub specific: f64,
    /// MJ/kg dry.
    pub specific_dry: f64,
    /// MW at the fuel's dry mass flow.
    pub rate: f64,
    pub lhv_as_received: f64,
    pub hhv_as_received: f64,
    pub warnings: Vec<FuelWarning>,
}

impl FuelExergy {
    pub fn exergy_to_lhv(&self) -> f64 {
        self.specific / self.lhv_as_received
    }

    pub fn exergy_to_hhv(&self) -> f64 {
        self.specific / self.hhv_as_received
    }
}

/// Chemical exergy of liquid water, MJ/kg.
pub fn water_chemical_exergy(db: &SpeciesDb) -> Result<f64, FuelError> {
    let water = db.get("H2O(l)")?;
    Ok(water.ex_ch0 / water.molar_mass)
}

/// Chemical exergy of the fuel including its moisture, as received and as rate.
pub fn fuel_chemical_exergy(fuel: &BiomassFuel, db: &SpeciesDb) -> Result<FuelExergy, FuelError> {
    fuel.validate()?;
    let beta = szargut_beta(&fuel.ultimate)?;
    let w = fuel.proximate.moisture / 100.0;
    let lhv = fuel.lhv_as_received()?;
    let hhv = fuel.hhv_dry()? * (1.0 - w);
    let specific = beta.value * (lhv + w * WATER_LATENT_HEAT) + w * water_chemical_exergy(db)?;
    let specific_dry = specific / (1.0 - w);

    let mut warnings: Vec<FuelWarning> = beta.warning.into_iter().collect();
    if !(TYPICAL_LHV_RANGE.0..=TYPICAL_LHV_RANGE.1).contains(&lhv) {
        warnings.push(FuelWarning::HeatingValueOutsideTypicalRange { lhv });
    }
    Ok(FuelExergy {
        beta: beta.value,
        specific,
        specific_dry,
        rate: specific_dry * fuel.mass_flow,
        lhv_as_received: lhv,
        hhv_as_received: hhv,
        warnings,
    })
}

// name, VM, FC, M, A, C, O, H, N, S, Cl
const TABLE: [(&str, [f64; 10]); 6] = [
    (
        "beech_bark",
        [67.5, 17.0, 8.4, 7.1, 51.0, 41.8, 6.0, 0.7, 0.11, 0.11],
    ),
    (
        "oak_wood",
        [73.0, 20.0, 6.5, 0.3, 50.0, 42.9, 6.1, 0.3, 0.10, 0.0],
    ),
    (
        "sawdust",
        [55.1, 9.3, 34.9, 0.7, 49.0, 43.4, 6.1, 0.7, 0.11, 0.01],
    ),
    (
        "switch_grass",
        [70.8, 12.8, 11.9, 4.5, 49.0, 43.4, 6.1, 0.7, 0.11, 0.08],
    ),
    (
        "straw",
        [64.3, 13.8, 12.4, 9.5, 48.0, 44.5, 5.6, 1.0, 0.13, 0.54],
    ),
    (
        "almond_shell",
        [69.5, 20.2, 7.2, 3.1, 50.0, 42.5, 6.2, 1.0, 0.05, 0.06],
    ),
];

/// Built-in fuels with daf ultimate and as-received proximate analyses, 1 kg/s dry.
pub fn builtin_fuels() -> Vec<BiomassFuel> {
    TABLE
        .iter()
        .map(|(name, v)| BiomassFuel {
            name: (*name).to_string(),
            proximate: ProximateAnalysis {
                volatile_matter: v[0],
                fixed_carbon: v[1],
                moisture: v[2],
                ash: v[3],
            },
            ultimate: UltimateAnalysis::new(v[4], v[6], v[5], v[7], v[8], v[9], Basis::DryAshFree),
            mass_flow: 1.0,
        })
        .collect()
}

pub fn builtin_fuel(name: &str) -> Result<BiomassFuel, FuelError> {
    builtin_fuels()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| FuelError::UnknownFuel(name.to_string()))
}

/// Loads a user fuel from a JSON key-value file.
pub fn load_fuel_file(path: impl AsRef<Path>) -> Result<BiomassFuel, FuelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| FuelError::Io(format!("{}: {e}", path.display())))?;
    let fuel: BiomassFuel = serde_json::from_str(&text)
        .map_err(|e| FuelError::Io(format!("{}: {e}", path.display())))?;
    fuel.validate()?;
    Ok(fuel)
}
