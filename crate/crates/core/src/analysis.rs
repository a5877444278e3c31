//! Single-point pipeline: fuel → elemental moles → equilibrium → energy
//! balance → exergy balance → efficiencies.

use serde::Serialize;

use crate::error::Result;
use crate::exergy::{
    self, air_exergy_o2_basis, chemical_exergy_mixture, heat_exergy, stack_heat_recovery,
    BalanceReport, HeatFlow, MaterialFlow, Stream, DEFAULT_STACK_T,
};
use crate::fuel::{elemental_moles, fuel_chemical_exergy, BiomassFuel};
use crate::gasifier::{
    fuel_formation_enthalpy, gasifier_energy_balance, producer_gas_lhv, solve_producer_gas,
    EnergyBalance, EquilibriumSolution, GasLhv, GasifierSpec, ReactionInputs, PRODUCT_SPECIES,
};
use crate::thermo::{atomic_mass, ReferenceEnvironment, SpeciesDb};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisOptions {
    /// Count only producer-gas chemical energy as useful output.
    pub cold_gas_only: bool,
    /// K
    pub t_stack: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            cold_gas_only: false,
            t_stack: DEFAULT_STACK_T,
        }
    }
}

/// Fraction of the inert residue leaving as fly ash.
pub const FLY_ASH_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub fuel: String,
    pub spec: GasifierSpec,
    pub env: ReferenceEnvironment,
    pub options: AnalysisOptions,
    pub inputs: ReactionInputs,
    pub solution: EquilibriumSolution,
    /// Mole fractions in `PRODUCT_SPECIES` order.
    pub mole_fractions: [f64; 6],
    /// kmol/s
    pub gas_flow: f64,
    pub gas_lhv: GasLhv,
    pub energy: EnergyBalance,
    pub balance: BalanceReport,
    /// Fuel exergy entering the gasifier, kW.
    pub fuel_exergy: f64,
    /// Fuel exergy over dry LHV.
    pub beta: f64,
    /// Air exergy from the mixture form, kW.
    pub air_exergy: f64,
    /// Air exergy from the O2-based form, kW.
    pub air_exergy_o2_basis: f64,
    /// Heat recovered between gasifier and stack, kW.
    pub recovered_heat: f64,
    /// Gas exergy at the stack temperature, kW.
    pub stack_exergy: f64,
    /// Producer-gas chemical exergy, kW.
    pub gas_chemical_exergy: f64,
    pub eta: f64,
    pub psi: f64,
    /// Cold-gas chemical exergy plus recovered-heat exergy over exergy input.
    pub psi_system: f64,
    pub warnings: Vec<String>,
}

/// Runs the full pipeline at one operating point.
pub fn run_analysis(
    db: &SpeciesDb,
    fuel: &BiomassFuel,
    spec: &GasifierSpec,
    env: &ReferenceEnvironment,
    options: &AnalysisOptions,
) -> Result<RunResult> {
    env.validate()?;
    spec.validate()?;
    fuel.validate()?;
    let flow = fuel.mass_flow;

    let dry = fuel.dry_ultimate()?;
    let moles = elemental_moles(&dry)?;
    let inputs = ReactionInputs::from_spec(moles, spec);
    let solution = solve_producer_gas(db, &inputs, spec)?;
    let energy = gasifier_energy_balance(db, &inputs, spec, &solution, fuel, env)?;

    let fuel_ex = fuel_chemical_exergy(fuel, db)?;
    let lhv_dry = fuel.lhv_dry()?;
    let fuel_exergy = fuel_ex.beta * lhv_dry * 1000.0 * flow;
    let fuel_enthalpy = fuel_formation_enthalpy(db, &moles, fuel.hhv_dry()?)? * flow;

    let air_o2 = inputs.air_o2 * flow;
    let air_flow = air_o2 + inputs.air_n2 * flow;
    let air = Stream::gas(
        &[
            ("O2", inputs.air_o2 / (inputs.air_o2 + inputs.air_n2)),
            ("N2", inputs.air_n2 / (inputs.air_o2 + inputs.air_n2)),
        ],
        env.t0,
        env.p0,
        air_flow,
    )?;
    let water = Stream::water(env.t0, env.p0, inputs.moisture * flow)?;

    let mole_fractions = solution.mole_fractions();
    let composition: Vec<(&str, f64)> = PRODUCT_SPECIES.into_iter().zip(mole_fractions).collect();
    let gas_flow = solution.total_moles() * flow;
    let gas = Stream::gas(&composition, spec.t_gasifier, spec.pressure, gas_flow)?;

    let bound_mass = moles.c * element_mass("C")
        + moles.h * element_mass("H")
        + moles.o * element_mass("O")
        + moles.n * element_mass("N");
    let residue = flow * (1.0 - bound_mass);

    let feeds = vec![
        MaterialFlow::solid_at_dead_state("fuel", flow, fuel_enthalpy, fuel_exergy, env),
        MaterialFlow::from_stream("air", db, &air, env)?,
        MaterialFlow::from_stream("moisture", db, &water, env)?,
    ];
    let products = vec![
        MaterialFlow::from_stream("producer_gas", db, &gas, env)?,
        MaterialFlow::inert("fly_ash", FLY_ASH_FRACTION * residue),
        MaterialFlow::inert("bottom_ash", (1.0 - FLY_ASH_FRACTION) * residue),
    ];
    // Supplied heat enters at the bed temperature; rejected heat leaves at T0.
    let heat = HeatFlow {
        q: energy.heat_duty,
        boundary_t: if energy.heat_duty > 0.0 {
            spec.t_gasifier
        } else {
            env.t0
        },
    };
    let balance = exergy::gasifier_exergy_balance(&feeds, &[heat], &products, env)?;
    let psi = exergy::exergy_efficiency(&balance)?;

    let gas_lhv = producer_gas_lhv(db, &solution)?;
    let cold_gas_energy = gas_lhv.per_kg_fuel * 1000.0 * flow;
    let fuel_energy = lhv_dry * 1000.0 * flow;
    let stack = stack_heat_recovery(db, &gas, options.t_stack, env)?;
    let stack_exergy = exergy::stream_exergy(db, &stack.stack_stream, env)?.total;

    // The gas is delivered cold: physical exergy left at the stack is lost.
    let gas_chemical = chemical_exergy_mixture(db, &gas, env)?;
    let (eta, psi_system) = if options.cold_gas_only {
        (
            exergy::energy_efficiency(cold_gas_energy, fuel_energy)?,
            gas_chemical / balance.exergy_in,
        )
    } else {
        let heat_ex = heat_exergy(stack.recovered, stack.mean_temperature, env)?;
        (
            exergy::energy_efficiency(cold_gas_energy + stack.recovered, fuel_energy)?,
            (gas_chemical + heat_ex) / balance.exergy_in,
        )
    };

    Ok(RunResult {
        fuel: fuel.name.clone(),
        spec: *spec,
        env: *env,
        options: *options,
        inputs,
        solution,
        mole_fractions,
        gas_flow,
        gas_lhv,
        energy,
        balance,
        fuel_exergy,
        beta: fuel_ex.beta,
        air_exergy: feeds[1].exergy.total,
        air_exergy_o2_basis: air_exergy_o2_basis(db, air_o2, env)?,
        recovered_heat: stack.recovered,
        stack_exergy,
        gas_chemical_exergy: gas_chemical,
        eta,
        psi,
        psi_system,
        warnings: fuel_ex.warnings.iter().map(ToString::to_string).collect(),
    })
}

fn element_mass(el: &str) -> f64 {
    atomic_mass(el).expect("known element")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuel::builtin_fuel;

    fn oak_run(options: &AnalysisOptions) -> RunResult {
        run_analysis(
            SpeciesDb::bundled(),
            &builtin_fuel("oak_wood").unwrap(),
            &GasifierSpec::default(),
            &ReferenceEnvironment::default(),
            options,
        )
        .unwrap()
    }

    #[test]
    fn oak_defaults_close_all_balances() {
        let r = oak_run(&AnalysisOptions::default());
        let env = ReferenceEnvironment::default();
        assert!(r.balance.destruction > 0.0);
        assert!(r.balance.entropy_generation > 0.0);
        assert!(r.balance.gouy_stodola_mismatch(&env) < 1e-6);
        assert!(r.balance.mass_closure_error() < 1e-9);
        assert!(r.energy.closure_error() < 1e-12);
        assert!((r.psi - (1.0 - r.balance.destruction / r.balance.exergy_in)).abs() < 1e-12);
        assert!(r.eta > 0.0 && r.eta <= 1.0);
        assert!(r.psi_system > 0.0 && r.psi_system < r.psi);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn cold_gas_eta_is_gas_lhv_over_fuel_lhv() {
        let r = oak_run(&AnalysisOptions {
            cold_gas_only: true,
            ..Default::default()
        });
        let fuel = builtin_fuel("oak_wood").unwrap();
        let expected = r.gas_flow * r.gas_lhv.per_kmol_gas / fuel.lhv_dry().unwrap();
        assert!((r.eta - expected).abs() < 1e-12);
        let full = oak_run(&AnalysisOptions::default());
        assert!(full.eta > r.eta);
    }

    #[test]
    fn deterministic() {
        let a = oak_run(&AnalysisOptions::default());
        let b = oak_run(&AnalysisOptions::default());
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_spec_is_rejected() {
        let spec = GasifierSpec {
            equivalence_ratio: 1.5,
            ..Default::default()
        };
        let err = run_analysis(
            SpeciesDb::bundled(),
            &builtin_fuel("oak_wood").unwrap(),
            &spec,
            &ReferenceEnvironment::default(),
            &AnalysisOptions::default(),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
