//! Producer-gas composition from a stoichiometric equilibrium model and the
//! gasifier energy balance.
//!
//! The global reaction per kg of dry fuel is
//!
//! ```text
//! CcHhOoNn + w H2O + m (O2 + 3.76 N2) -> H2, CO, CO2, H2O, CH4, N2
//! ```
//!
//! closed by carbon/hydrogen/oxygen balances plus the water-gas shift and a
//! methane equilibrium. The unknowns are solved in log space with a damped
//! Newton iteration, which keeps every mole number positive.

use std::fmt;

use nalgebra::{Matrix5, Vector5};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuel::{BiomassFuel, FuelElementalMoles, FuelError};
use crate::thermo::{
    ReferenceEnvironment, SpeciesDb, ThermoError, GAS_CONSTANT, P_STANDARD, T_STANDARD,
};

/// Moles of N2 accompanying each mole of O2 in air.
pub const N2_PER_O2: f64 = 3.76;

/// Product species in solution order.
pub const PRODUCT_SPECIES: [&str; 6] = ["H2", "CO", "CO2", "H2O(g)", "CH4", "N2"];

pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 200;

const WATER_MOLAR_MASS: f64 = 18.015;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GasifierError {
    #[error("invalid gasifier specification: {0}")]
    InvalidSpec(String),
    #[error("invalid reaction inputs: {0}")]
    InvalidInputs(String),
    #[error(
        "equilibrium solve did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("infeasible composition: {species} would be negative ({detail})")]
    NegativeComposition { species: String, detail: String },
    #[error("equilibrium solution is not converged (residual {0:e})")]
    Unconverged(f64),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Fuel(#[from] FuelError),
}

/// Which relation fixes the methane content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethaneClosure {
    /// CO + 3 H2 ⇌ CH4 + H2O; equivalent to gas-phase Gibbs minimization.
    #[default]
    GasPhase,
    /// C(s) + 2 H2 ⇌ CH4 with unit graphite activity.
    Graphite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasifierSpec {
    /// K
    pub t_gasifier: f64,
    /// kPa
    pub pressure: f64,
    pub equivalence_ratio: f64,
    /// Fraction of fuel energy input lost to the surroundings.
    pub heat_loss_fraction: f64,
    /// kg water per kg dry fuel.
    pub moisture_w: f64,
    #[serde(default)]
    pub methane_closure: MethaneClosure,
}

impl Default for GasifierSpec {
    fn default() -> Self {
        Self {
            t_gasifier: 1073.15,
            pressure: P_STANDARD,
            equivalence_ratio: 0.35,
            heat_loss_fraction: 0.015,
            moisture_w: 0.1,
            methane_closure: MethaneClosure::GasPhase,
        }
    }
}

impl GasifierSpec {
    pub fn validate(&self) -> Result<(), GasifierError> {
        let err = |m: String| Err(GasifierError::InvalidSpec(m));
        if !(self.equivalence_ratio > 0.0 && self.equivalence_ratio < 1.0) {
            return err(format!(
                "equivalence ratio {} outside (0, 1)",
                self.equivalence_ratio
            ));
        }
        if !(0.0..=0.05).contains(&self.heat_loss_fraction) {
            return err(format!(
                "heat loss fraction {} outside [0, 0.05]",
                self.heat_loss_fraction
            ));
        }
        if !(600.0..=1600.0).contains(&self.t_gasifier) {
            return err(format!(
                "gasifier temperature {} K outside [600, 1600] K",
                self.t_gasifier
            ));
        }
        if !(self.pressure > 0.0) {
            return err(format!("pressure {} kPa must be positive", self.pressure));
        }
        if !(self.moisture_w.is_finite() && self.moisture_w >= 0.0) {
            return err(format!("moisture {} must be non-negative", self.moisture_w));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reaction {
    /// CO + H2O ⇌ CO2 + H2
    WaterGasShift,
    /// C(s) + 2 H2 ⇌ CH4
    Methanation,
    /// CO + 3 H2 ⇌ CH4 + H2O
    CoMethanation,
}

impl Reaction {
    /// Stoichiometric coefficients, products positive.
    pub fn stoichiometry(self) -> &'static [(&'static str, f64)] {
        match self {
            Reaction::WaterGasShift => &[("CO", -1.0), ("H2O(g)", -1.0), ("CO2", 1.0), ("H2", 1.0)],
            Reaction::Methanation => &[("C(gr)", -1.0), ("H2", -2.0), ("CH4", 1.0)],
            Reaction::CoMethanation => &[("CO", -1.0), ("H2", -3.0), ("CH4", 1.0), ("H2O(g)", 1.0)],
        }
    }
}

impl fmt::Display for Reaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reaction::WaterGasShift => "CO + H2O = CO2 + H2",
            Reaction::Methanation => "C(s) + 2 H2 = CH4",
            Reaction::CoMethanation => "CO + 3 H2 = CH4 + H2O",
        })
    }
}

/// Standard Gibbs energy of reaction, kJ/mol.
pub fn reaction_gibbs(db: &SpeciesDb, reaction: Reaction, t: f64) -> Result<f64, GasifierError> {
    reaction
        .stoichiometry()
        .iter()
        .try_fold(0.0, |acc, (name, nu)| {
            Ok(acc + nu * db.get(name)?.gibbs_molar(t)?)
        })
}

/// ln K = −ΔG°(T)/(Ru·T)
pub fn ln_equilibrium_constant(
    db: &SpeciesDb,
    reaction: Reaction,
    t: f64,
) -> Result<f64, GasifierError> {
    Ok(-reaction_gibbs(db, reaction, t)? * 1000.0 / (GAS_CONSTANT * t))
}

pub fn equilibrium_constant(
    db: &SpeciesDb,
    reaction: Reaction,
    t: f64,
) -> Result<f64, GasifierError> {
    Ok(ln_equilibrium_constant(db, reaction, t)?.exp())
}

/// O2 for complete combustion, kmol per kg dry fuel.
pub fn stoichiometric_air(m: &FuelElementalMoles) -> f64 {
    (m.c + m.h / 4.0 - m.o / 2.0).max(0.0)
}

/// Feed to the global reaction, per kg of dry fuel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReactionInputs {
    pub fuel_moles: FuelElementalMoles,
    /// kmol O2 per kg fuel
    pub air_o2: f64,
    /// kmol N2 per kg fuel
    pub air_n2: f64,
    /// kmol H2O per kg fuel
    pub moisture: f64,
}

impl ReactionInputs {
    /// Air at the given equivalence ratio and moisture in kg per kg dry fuel.
    pub fn new(fuel_moles: FuelElementalMoles, equivalence_ratio: f64, moisture_w: f64) -> Self {
        let air_o2 = equivalence_ratio * stoichiometric_air(&fuel_moles);
        Self {
            fuel_moles,
            air_o2,
            air_n2: N2_PER_O2 * air_o2,
            moisture: moisture_w / WATER_MOLAR_MASS,
        }
    }

    pub fn from_spec(fuel_moles: FuelElementalMoles, spec: &GasifierSpec) -> Self {
        Self::new(fuel_moles, spec.equivalence_ratio, spec.moisture_w)
    }

    pub fn validate(&self) -> Result<(), GasifierError> {
        let m = &self.fuel_moles;
        let all = [
            m.c,
            m.h,
            m.o,
            m.n,
            m.s,
            self.air_o2,
            self.air_n2,
            self.moisture,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(GasifierError::InvalidInputs(
                "mole amounts must be non-negative".into(),
            ));
        }
        if (self.air_n2 - N2_PER_O2 * self.air_o2).abs() > 1e-12 * self.air_n2.max(1e-300) {
            return Err(GasifierError::InvalidInputs(format!(
                "air N2/O2 ratio must be {N2_PER_O2}"
            )));
        }
        if !(m.c > 0.0) {
            return Err(GasifierError::InvalidInputs(
                "fuel contains no carbon".into(),
            ));
        }
        if !(self.hydrogen_atoms() > 0.0) {
            return Err(GasifierError::InvalidInputs(
                "feed contains no hydrogen".into(),
            ));
        }
        Ok(())
    }

    pub fn carbon_atoms(&self) -> f64 {
        self.fuel_moles.c
    }

    pub fn hydrogen_atoms(&self) -> f64 {
        self.fuel_moles.h + 2.0 * self.moisture
    }

    pub fn oxygen_atoms(&self) -> f64 {
        self.fuel_moles.o + self.moisture + 2.0 * self.air_o2
    }

    pub fn nitrogen_atoms(&self) -> f64 {
        self.fuel_moles.n + 2.0 * self.air_n2
    }
}

/// Producer-gas mole numbers, kmol per kg dry fuel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumSolution {
    pub n_h2: f64,
    pub n_co: f64,
    pub n_co2: f64,
    pub n_h2o: f64,
    pub n_ch4: f64,
    pub n_n2: f64,
    pub iterations: usize,
    pub residual_norm: f64,
}

impl EquilibriumSolution {
    /// Mole numbers in [`PRODUCT_SPECIES`] order.
    pub fn moles(&self) -> [f64; 6] {
        [
            self.n_h2, self.n_co, self.n_co2, self.n_h2o, self.n_ch4, self.n_n2,
        ]
    }

    pub fn total_moles(&self) -> f64 {
        self.moles().iter().sum()
    }

    pub fn mole_fractions(&self) -> [f64; 6] {
        let total = self.total_moles();
        self.moles().map(|n| n / total)
    }

    pub fn species(&self) -> impl Iterator<Item = (&'static str, f64)> {
        PRODUCT_SPECIES.into_iter().zip(self.moles())
    }

    /// Atom totals (C, H, O, N) in the products.
    pub fn element_totals(&self) -> [f64; 4] {
        [
            self.n_co + self.n_co2 + self.n_ch4,
            2.0 * self.n_h2 + 2.0 * self.n_h2o + 4.0 * self.n_ch4,
            self.n_co + 2.0 * self.n_co2 + self.n_h2o,
            2.0 * self.n_n2,
        ]
    }

    pub fn is_converged(&self) -> bool {
        self.residual_norm < RESIDUAL_TOLERANCE
    }
}

struct EquilibriumSystem {
    carbon: f64,
    hydrogen: f64,
    oxygen: f64,
    n_n2: f64,
    ln_k_shift: f64,
    ln_k_methane: f64,
    ln_pressure: f64,
    closure: MethaneClosure,
}

// Unknowns: ln n for H2, CO, CO2, H2O, CH4.
impl EquilibriumSystem {
    fn residual(&self, u: &Vector5<f64>) -> Vector5<f64> {
        let n = u.map(f64::exp);
        let ln_total = (n.sum() + self.n_n2).ln();
        let methane = match self.closure {
            MethaneClosure::GasPhase => {
                u[4] + u[3] - u[1] - 3.0 * u[0] + 2.0 * ln_total
                    - 2.0 * self.ln_pressure
                    - self.ln_k_methane
            }
            MethaneClosure::Graphite => {
                u[4] - 2.0 * u[0] + ln_total - self.ln_pressure - self.ln_k_methane
            }
        };
        Vector5::new(
            (n[1] + n[2] + n[4]) / self.carbon - 1.0,
            (2.0 * n[0] + 2.0 * n[3] + 4.0 * n[4]) / self.hydrogen - 1.0,
            (n[1] + 2.0 * n[2] + n[3]) / self.oxygen - 1.0,
            u[2] + u[0] - u[1] - u[3] - self.ln_k_shift,
            methane,
        )
    }

    fn jacobian(&self, u: &Vector5<f64>) -> Matrix5<f64> {
        let n = u.map(f64::exp);
        let total = n.sum() + self.n_n2;
        let mut j = Matrix5::zeros();
        for (col, coeff) in [(1, 1.0), (2, 1.0), (4, 1.0)] {
            j[(0, col)] = coeff * n[col] / self.carbon;
        }
        for (col, coeff) in [(0, 2.0), (3, 2.0), (4, 4.0)] {
            j[(1, col)] = coeff * n[col] / self.hydrogen;
        }
        for (col, coeff) in [(1, 1.0), (2, 2.0), (3, 1.0)] {
            j[(2, col)] = coeff * n[col] / self.oxygen;
        }
        j[(3, 0)] = 1.0;
        j[(3, 1)] = -1.0;
        j[(3, 2)] = 1.0;
        j[(3, 3)] = -1.0;
        let (direct, total_power) = match self.closure {
            MethaneClosure::GasPhase => ([-3.0, -1.0, 0.0, 1.0, 1.0], 2.0),
            MethaneClosure::Graphite => ([-2.0, 0.0, 0.0, 0.0, 1.0], 1.0),
        };
        for col in 0..5 {
            j[(4, col)] = direct[col] + total_power * n[col] / total;
        }
        j
    }
}

/// Solves the producer-gas composition at the gasifier temperature and pressure.
pub fn solve_producer_gas(
    db: &SpeciesDb,
    inputs: &ReactionInputs,
    spec: &GasifierSpec,
) -> Result<EquilibriumSolution, GasifierError> {
    spec.validate()?;
    inputs.validate()?;

    let carbon = inputs.carbon_atoms();
    let hydrogen = inputs.hydrogen_atoms();
    let oxygen = inputs.oxygen_atoms();
    // Without free O2 the products hold at most 2 O per C and 1 O per 2 H.
    let oxygen_capacity = 2.0 * carbon + hydrogen / 2.0;
    if oxygen >= oxygen_capacity {
        return Err(GasifierError::NegativeComposition {
            species: "H2, CO".into(),
            detail: format!(
                "oxygen feed {oxygen:.6} kmol/kg exceeds full-oxidation capacity {oxygen_capacity:.6} kmol/kg"
            ),
        });
    }

    let methane_reaction = match spec.methane_closure {
        MethaneClosure::GasPhase => Reaction::CoMethanation,
        MethaneClosure::Graphite => Reaction::Methanation,
    };
    let system = EquilibriumSystem {
        carbon,
        hydrogen,
        oxygen,
        n_n2: inputs.nitrogen_atoms() / 2.0,
        ln_k_shift: ln_equilibrium_constant(db, Reaction::WaterGasShift, spec.t_gasifier)?,
        ln_k_methane: ln_equilibrium_constant(db, methane_reaction, spec.t_gasifier)?,
        ln_pressure: (spec.pressure / P_STANDARD).ln(),
        closure: spec.methane_closure,
    };

    let h = inputs.fuel_moles.h;
    let guess = [
        h / 4.0,
        0.4 * carbon,
        0.6 * carbon,
        h / 4.0 + inputs.moisture,
        (0.1 * carbon).min(1e-4),
    ];
    let mut u = Vector5::from_iterator(guess.iter().map(|n| n.max(1e-12).ln()));
    let mut r = system.residual(&u);
    let mut norm = r.norm();
    let mut iterations = 0;

    while norm >= RESIDUAL_TOLERANCE {
        if iterations == MAX_ITERATIONS {
            return Err(GasifierError::NonConvergence {
                iterations,
                residual: norm,
            });
        }
        iterations += 1;
        let step = match system.jacobian(&u).lu().solve(&(-r)) {
            Some(s) if s.iter().all(|v| v.is_finite()) => s,
            _ => {
                return Err(GasifierError::NonConvergence {
                    iterations,
                    residual: norm,
                })
            }
        };
        // Limit log-space moves to a factor of e^5 per iteration.
        let largest = step.amax();
        let mut lambda = if largest > 5.0 { 5.0 / largest } else { 1.0 };
        let mut accepted = false;
        for _ in 0..40 {
            let trial = u + step * lambda;
            let r_trial = system.residual(&trial);
            let n_trial = r_trial.norm();
            if n_trial.is_finite() && n_trial < norm {
                u = trial;
                r = r_trial;
                norm = n_trial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(GasifierError::NonConvergence {
                iterations,
                residual: norm,
            });
        }
    }

    let n = u.map(f64::exp);
    Ok(EquilibriumSolution {
        n_h2: n[0],
        n_co: n[1],
        n_co2: n[2],
        n_h2o: n[3],
        n_ch4: n[4],
        n_n2: system.n_n2,
        iterations,
        residual_norm: norm,
    })
}

/// Formation enthalpy of the dry fuel implied by its HHV, kJ/kg.
///
/// Complete combustion products are CO2, liquid H2O, SO2 and N2.
pub fn fuel_formation_enthalpy(
    db: &SpeciesDb,
    moles: &FuelElementalMoles,
    hhv: f64,
) -> Result<f64, GasifierError> {
    let products = moles.c * db.get("CO2")?.h_f0
        + moles.h / 2.0 * db.get("H2O(l)")?.h_f0
        + moles.s * db.get("SO2")?.h_f0;
    Ok(1000.0 * (hhv + products))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBalance {
    /// Enthalpy of feed streams plus heat supplied, kW.
    pub energy_in: f64,
    /// Enthalpy of products plus heat rejected, kW.
    pub energy_out: f64,
    /// Heat that must be supplied to hold the gasifier temperature, kW.
    /// Negative values are heat released to the surroundings.
    pub heat_duty: f64,
    /// Fuel LHV flow, kW.
    pub fuel_energy_input: f64,
    /// Expected heat loss at the specified fraction, kW.
    pub heat_loss_target: f64,
    /// |heat_duty| − heat_loss_target, kW.
    pub heat_loss_residual: f64,
}

impl EnergyBalance {
    pub fn from_flows(
        inlet_enthalpy: f64,
        outlet_enthalpy: f64,
        fuel_energy_input: f64,
        heat_loss_fraction: f64,
    ) -> Self {
        let heat_duty = outlet_enthalpy - inlet_enthalpy;
        let heat_loss_target = heat_loss_fraction * fuel_energy_input;
        Self {
            energy_in: inlet_enthalpy + heat_duty.max(0.0),
            energy_out: outlet_enthalpy + (-heat_duty).max(0.0),
            heat_duty,
            fuel_energy_input,
            heat_loss_target,
            heat_loss_residual: heat_duty.abs() - heat_loss_target,
        }
    }

    pub fn closure_error(&self) -> f64 {
        (self.energy_in - self.energy_out).abs() / self.energy_in.abs().max(self.energy_out.abs())
    }
}

/// Enthalpy flows of the feed (fuel, moisture, air at T0), kW.
pub fn feed_enthalpy(
    db: &SpeciesDb,
    inputs: &ReactionInputs,
    fuel: &BiomassFuel,
    env: &ReferenceEnvironment,
) -> Result<f64, GasifierError> {
    let fuel_h = fuel_formation_enthalpy(db, &inputs.fuel_moles, fuel.hhv_dry()?)?;
    let per_kg = fuel_h
        + 1000.0
            * (inputs.moisture * db.get("H2O(l)")?.enthalpy_molar(env.t0)?
                + inputs.air_o2 * db.get("O2")?.enthalpy_molar(env.t0)?
                + inputs.air_n2 * db.get("N2")?.enthalpy_molar(env.t0)?);
    Ok(per_kg * fuel.mass_flow)
}

/// Product gas enthalpy flow at temperature `t`, kW.
pub fn product_enthalpy(
    db: &SpeciesDb,
    sol: &EquilibriumSolution,
    t: f64,
    mass_flow: f64,
) -> Result<f64, GasifierError> {
    let per_kg = sol
        .species()
        .try_fold(0.0, |acc, (name, n)| -> Result<f64, GasifierError> {
            Ok(acc + 1000.0 * n * db.get(name)?.enthalpy_molar(t)?)
        })?;
    Ok(per_kg * mass_flow)
}

/// Energy balance of the gasifier with feeds at T0 and products at the
/// gasifier temperature.
pub fn gasifier_energy_balance(
    db: &SpeciesDb,
    inputs: &ReactionInputs,
    spec: &GasifierSpec,
    sol: &EquilibriumSolution,
    fuel: &BiomassFuel,
    env: &ReferenceEnvironment,
) -> Result<EnergyBalance, GasifierError> {
    if !sol.is_converged() {
        return Err(GasifierError::Unconverged(sol.residual_norm));
    }
    let h_in = feed_enthalpy(db, inputs, fuel, env)?;
    let h_out = product_enthalpy(db, sol, spec.t_gasifier, fuel.mass_flow)?;
    let fuel_energy = 1000.0 * fuel.lhv_dry()? * fuel.mass_flow;
    Ok(EnergyBalance::from_flows(
        h_in,
        h_out,
        fuel_energy,
        spec.heat_loss_fraction,
    ))
}

/// Lower heating value of a gas mixture, kJ/mol of mixture (= MJ/kmol).
///
/// Each species is burned to CO2 and gaseous H2O at 298.15 K using the
/// database formation enthalpies.
pub fn mixture_lhv(db: &SpeciesDb, composition: &[(&str, f64)]) -> Result<f64, GasifierError> {
    let o2 = db.get("O2")?.enthalpy_molar(T_STANDARD)?;
    let co2 = db.get("CO2")?.enthalpy_molar(T_STANDARD)?;
    let h2o = db.get("H2O(g)")?.enthalpy_molar(T_STANDARD)?;
    composition.iter().try_fold(0.0, |acc, (name, z)| {
        let sp = db.get(name)?;
        let c = f64::from(sp.atoms("C"));
        let h = f64::from(sp.atoms("H"));
        let o = f64::from(sp.atoms("O"));
        let oxygen = c + h / 4.0 - o / 2.0;
        let lhv = sp.enthalpy_molar(T_STANDARD)? + oxygen * o2 - c * co2 - h / 2.0 * h2o;
        Ok(acc + z * lhv)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GasLhv {
    /// MJ per kmol of producer gas.
    pub per_kmol_gas: f64,
    /// MJ per kg of dry fuel.
    pub per_kg_fuel: f64,
}

pub fn producer_gas_lhv(
    db: &SpeciesDb,
    sol: &EquilibriumSolution,
) -> Result<GasLhv, GasifierError> {
    let z = sol.mole_fractions();
    let composition: Vec<(&str, f64)> = PRODUCT_SPECIES.into_iter().zip(z).collect();
    let per_kmol_gas = mixture_lhv(db, &composition)?;
    Ok(GasLhv {
        per_kmol_gas,
        per_kg_fuel: per_kmol_gas * sol.total_moles(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuel::{builtin_fuel, elemental_moles, Basis, UltimateAnalysis};
    use approx::assert_abs_diff_eq;

    fn db() -> &'static SpeciesDb {
        SpeciesDb::bundled()
    }

    fn oak_moles() -> FuelElementalMoles {
        elemental_moles(&builtin_fuel("oak_wood").unwrap().dry_ultimate().unwrap()).unwrap()
    }

    #[test]
    fn stoichiometric_air_cases() {
        let carbon = FuelElementalMoles {
            c: 0.08326,
            ..Default::default()
        };
        assert_eq!(stoichiometric_air(&carbon), 0.08326);
        assert_eq!(stoichiometric_air(&FuelElementalMoles::default()), 0.0);
        let oak = FuelElementalMoles {
            c: 0.04163,
            h: 0.06052,
            o: 0.02681,
            ..Default::default()
        };
        assert_abs_diff_eq!(stoichiometric_air(&oak), 0.04335, epsilon = 1e-5);
        let oxygenated = FuelElementalMoles {
            c: 0.01,
            o: 0.1,
            ..Default::default()
        };
        assert_eq!(stoichiometric_air(&oxygenated), 0.0);
    }

    #[test]
    fn spec_validation() {
        assert!(GasifierSpec::default().validate().is_ok());
        for bad in [
            GasifierSpec {
                equivalence_ratio: 1.0,
                ..Default::default()
            },
            GasifierSpec {
                equivalence_ratio: 0.0,
                ..Default::default()
            },
            GasifierSpec {
                heat_loss_fraction: 0.06,
                ..Default::default()
            },
            GasifierSpec {
                t_gasifier: 500.0,
                ..Default::default()
            },
            GasifierSpec {
                pressure: 0.0,
                ..Default::default()
            },
            GasifierSpec {
                moisture_w: -0.1,
                ..Default::default()
            },
        ] {
            assert!(matches!(bad.validate(), Err(GasifierError::InvalidSpec(_))));
        }
    }

    #[test]
    fn reaction_stoichiometry_balances_atoms() {
        for reaction in [
            Reaction::WaterGasShift,
            Reaction::Methanation,
            Reaction::CoMethanation,
        ] {
            for el in ["C", "H", "O"] {
                let net: f64 = reaction
                    .stoichiometry()
                    .iter()
                    .map(|(name, nu)| nu * f64::from(db().get(name).unwrap().atoms(el)))
                    .sum();
                assert_eq!(net, 0.0, "{reaction} {el}");
            }
        }
    }

    #[test]
    fn shift_constant_is_continuous() {
        let k = |t| equilibrium_constant(db(), Reaction::WaterGasShift, t).unwrap();
        let below = k(1000.0 - 1e-7);
        let above = k(1000.0 + 1e-7);
        assert!((below - above).abs() / below < 1e-6);
        assert!(k(700.0) > k(900.0));
        assert!(equilibrium_constant(db(), Reaction::WaterGasShift, 7000.0).is_err());
    }

    #[test]
    fn oak_solution_closes_elements() {
        let inputs = ReactionInputs::new(oak_moles(), 0.35, 0.1);
        let sol = solve_producer_gas(db(), &inputs, &GasifierSpec::default()).unwrap();
        let [c, h, o, n] = sol.element_totals();
        assert!((c - inputs.carbon_atoms()).abs() <= 1e-9 * inputs.carbon_atoms());
        assert!((h - inputs.hydrogen_atoms()).abs() <= 1e-9 * inputs.hydrogen_atoms());
        assert!((o - inputs.oxygen_atoms()).abs() <= 1e-9 * inputs.oxygen_atoms());
        assert!((n - inputs.nitrogen_atoms()).abs() <= 1e-12 * inputs.nitrogen_atoms());
        let z_sum: f64 = sol.mole_fractions().iter().sum();
        assert_abs_diff_eq!(z_sum, 1.0, epsilon = 1e-12);
        assert!(sol.iterations > 0 && sol.iterations <= MAX_ITERATIONS);
    }

    #[test]
    fn graphite_closure_converges() {
        let inputs = ReactionInputs::new(oak_moles(), 0.35, 0.1);
        let spec = GasifierSpec {
            methane_closure: MethaneClosure::Graphite,
            ..Default::default()
        };
        let sol = solve_producer_gas(db(), &inputs, &spec).unwrap();
        let z = sol.mole_fractions();
        let k = equilibrium_constant(db(), Reaction::Methanation, spec.t_gasifier).unwrap();
        let implied = z[4] / (z[0] * z[0]) * P_STANDARD / spec.pressure;
        assert!((implied / k - 1.0).abs() < 1e-8);
        // Unit carbon activity holds more methane than the gas-phase closure.
        let gas = solve_producer_gas(db(), &inputs, &GasifierSpec::default()).unwrap();
        assert!(sol.n_ch4 > gas.n_ch4);
    }

    #[test]
    fn oxygen_rich_feed_is_infeasible() {
        let u = UltimateAnalysis::new(20.0, 2.0, 78.0, 0.0, 0.0, 0.0, Basis::Dry);
        let inputs = ReactionInputs::new(elemental_moles(&u).unwrap(), 0.5, 0.0);
        assert!(matches!(
            solve_producer_gas(db(), &inputs, &GasifierSpec::default()),
            Err(GasifierError::NegativeComposition { .. })
        ));
    }

    #[test]
    fn inputs_validation() {
        let mut inputs = ReactionInputs::new(oak_moles(), 0.35, 0.1);
        inputs.air_n2 *= 1.01;
        assert!(inputs.validate().is_err());
        let empty = ReactionInputs::new(FuelElementalMoles::default(), 0.35, 0.0);
        assert!(empty.validate().is_err());
    }

    #[test]
    fn gas_lhv_cases() {
        let inert = mixture_lhv(db(), &[("N2", 0.5), ("CO2", 0.3), ("H2O(g)", 0.2)]).unwrap();
        assert_abs_diff_eq!(inert, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            mixture_lhv(db(), &[("H2", 1.0)]).unwrap(),
            241.82,
            epsilon = 1e-12
        );
        let syngas = mixture_lhv(db(), &[("H2", 0.5), ("CO", 0.5)]).unwrap();
        assert_abs_diff_eq!(syngas, 262.4, epsilon = 0.5);
        assert_abs_diff_eq!(
            mixture_lhv(db(), &[("CH4", 1.0)]).unwrap(),
            802.3,
            epsilon = 0.05
        );
    }

    #[test]
    fn energy_balance_rejects_unconverged() {
        let inputs = ReactionInputs::new(oak_moles(), 0.35, 0.1);
        let mut sol = solve_producer_gas(db(), &inputs, &GasifierSpec::default()).unwrap();
        sol.residual_norm = 1.0;
        let fuel = builtin_fuel("oak_wood").unwrap();
        assert!(matches!(
            gasifier_energy_balance(
                db(),
                &inputs,
                &GasifierSpec::default(),
                &sol,
                &fuel,
                &ReferenceEnvironment::default()
            ),
            Err(GasifierError::Unconverged(_))
        ));
    }

    #[test]
    fn energy_balance_scales_with_flow() {
        let fuel = builtin_fuel("oak_wood").unwrap();
        let spec = GasifierSpec::default();
        let env = ReferenceEnvironment::default();
        let inputs = ReactionInputs::from_spec(oak_moles(), &spec);
        let sol = solve_producer_gas(db(), &inputs, &spec).unwrap();
        let one = gasifier_energy_balance(db(), &inputs, &spec, &sol, &fuel, &env).unwrap();
        let two = gasifier_energy_balance(
            db(),
            &inputs,
            &spec,
            &sol,
            &fuel.clone().with_mass_flow(2.0),
            &env,
        )
        .unwrap();
        assert_abs_diff_eq!(two.heat_duty, 2.0 * one.heat_duty, epsilon = 1e-9);
        assert!(one.closure_error() < 1e-12);
    }

    #[test]
    fn no_state_change_means_no_heat() {
        let n2 = db().get("N2").unwrap();
        let h = 1000.0 * 0.5 * n2.enthalpy_molar(T_STANDARD).unwrap();
        let balance = EnergyBalance::from_flows(h, h, 100.0, 0.015);
        assert_eq!(balance.heat_duty, 0.0);
        assert_eq!(balance.energy_in, balance.energy_out);
    }
}
