//! Stream exergy, control-volume balances and efficiency metrics.
//!
//! Flow rates are kmol/s for streams and kg/s for solids; energy and exergy
//! rates are kW and entropy rates kW/K.
//!
//! Entropies entering the balance are referenced to the same dead state as
//! the chemical exergies: every material flow satisfies
//! `exergy = enthalpy − T0·entropy`. For gases this shifts the third-law
//! entropy of each species by a constant that depends only on the dead
//! state, so sensible and mixing terms are unchanged; for the solid fuel,
//! which has no entropy data, it defines the entropy from its chemical
//! exergy and formation enthalpy.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::thermo::{ReferenceEnvironment, SpeciesDb, SpeciesRecord, ThermoError};

/// Flue-gas stack temperature, K.
pub const DEFAULT_STACK_T: f64 = 428.15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExergyError {
    #[error("invalid stream: {0}")]
    InvalidStream(String),
    #[error("{0:?} streams have no species-based exergy")]
    UnsupportedStream(StreamKind),
    #[error("negative exergy destruction {destruction} kW: model inconsistency")]
    NegativeDestruction { destruction: f64 },
    #[error("efficiency denominator must be positive, got {0}")]
    ZeroInput(f64),
    #[error("gas at {gas_t} K is colder than the stack temperature {stack_t} K")]
    GasColderThanStack { gas_t: f64, stack_t: f64 },
    #[error("heat boundary temperature must be positive, got {0} K")]
    InvalidBoundary(f64),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StreamKind {
    GasMixture,
    BiomassFuel,
    Water,
    HeatCarrier,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stream {
    pub composition: BTreeMap<String, f64>,
    /// K
    pub t: f64,
    /// kPa
    pub p: f64,
    /// kmol/s
    pub molar_flow: f64,
    pub kind: StreamKind,
}

impl Stream {
    pub fn new(
        kind: StreamKind,
        composition: &[(&str, f64)],
        t: f64,
        p: f64,
        molar_flow: f64,
    ) -> Result<Self, ExergyError> {
        let mut map = BTreeMap::new();
        for (name, z) in composition {
            *map.entry((*name).to_string()).or_insert(0.0) += z;
        }
        let stream = Self {
            composition: map,
            t,
            p,
            molar_flow,
            kind,
        };
        stream.validate()?;
        Ok(stream)
    }

    pub fn gas(
        composition: &[(&str, f64)],
        t: f64,
        p: f64,
        molar_flow: f64,
    ) -> Result<Self, ExergyError> {
        Self::new(StreamKind::GasMixture, composition, t, p, molar_flow)
    }

    /// Liquid water.
    pub fn water(t: f64, p: f64, molar_flow: f64) -> Result<Self, ExergyError> {
        Self::new(StreamKind::Water, &[("H2O(l)", 1.0)], t, p, molar_flow)
    }

    pub fn validate(&self) -> Result<(), ExergyError> {
        if self
            .composition
            .values()
            .any(|z| !(z.is_finite() && *z >= 0.0))
        {
            return Err(ExergyError::InvalidStream("negative mole fraction".into()));
        }
        let sum: f64 = self.composition.values().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ExergyError::InvalidStream(format!(
                "mole fractions sum to {sum}"
            )));
        }
        if !(self.t > 0.0 && self.p > 0.0) {
            return Err(ExergyError::InvalidStream(format!(
                "non-positive state T = {} K, P = {} kPa",
                self.t, self.p
            )));
        }
        if !(self.molar_flow.is_finite() && self.molar_flow >= 0.0) {
            return Err(ExergyError::InvalidStream(format!(
                "molar flow {} must be non-negative",
                self.molar_flow
            )));
        }
        Ok(())
    }

    /// Same stream at another temperature.
    pub fn at_temperature(&self, t: f64) -> Self {
        Self { t, ..self.clone() }
    }

    pub fn with_flow(&self, molar_flow: f64) -> Self {
        Self {
            molar_flow,
            ..self.clone()
        }
    }

    fn members<'a>(
        &'a self,
        db: &'a SpeciesDb,
    ) -> Result<Vec<(&'a SpeciesRecord, f64)>, ExergyError> {
        match self.kind {
            StreamKind::GasMixture | StreamKind::Water => {}
            other => return Err(ExergyError::UnsupportedStream(other)),
        }
        self.composition
            .iter()
            .filter(|(_, z)| **z > 0.0)
            .map(|(name, z)| Ok((db.get(name)?, *z)))
            .collect()
    }

    fn partial_pressure(&self, z: f64) -> f64 {
        match self.kind {
            // Condensed phase: pressure dependence neglected.
            StreamKind::Water => f64::NAN,
            _ => z * self.p,
        }
    }

    /// Enthalpy flow including formation enthalpies, kW.
    pub fn enthalpy_flow(&self, db: &SpeciesDb) -> Result<f64, ExergyError> {
        let molar = self.members(db)?.iter().try_fold(0.0, |acc, (sp, z)| {
            Ok::<_, ExergyError>(acc + z * sp.enthalpy_molar(self.t)?)
        })?;
        Ok(1000.0 * self.molar_flow * molar)
    }

    /// Mass flow, kg/s.
    pub fn mass_flow(&self, db: &SpeciesDb) -> Result<f64, ExergyError> {
        let molar_mass: f64 = self
            .members(db)?
            .iter()
            .map(|(sp, z)| z * sp.molar_mass)
            .sum();
        Ok(self.molar_flow * molar_mass)
    }

    fn species_entropy(
        &self,
        sp: &SpeciesRecord,
        z: f64,
        t: f64,
        env: &ReferenceEnvironment,
    ) -> Result<f64, ExergyError> {
        let p = self.partial_pressure(z);
        Ok(if p.is_nan() {
            sp.standard_entropy(t)?
        } else {
            sp.entropy_molar(t, p, env)?
        })
    }

    /// Entropy flow referenced to the exergy dead state, kW/K.
    pub fn entropy_flow(
        &self,
        db: &SpeciesDb,
        env: &ReferenceEnvironment,
    ) -> Result<f64, ExergyError> {
        let molar = self.members(db)?.iter().try_fold(0.0, |acc, (sp, z)| {
            let offset = (sp.enthalpy_molar(env.t0)? - sp.ex_ch0) * 1000.0 / env.t0
                - sp.standard_entropy(env.t0)?;
            Ok::<_, ExergyError>(acc + z * (self.species_entropy(sp, *z, self.t, env)? + offset))
        })?;
        Ok(self.molar_flow * molar)
    }
}

/// Physical exergy flow, kW: Σ ṅ·z·[(h − h0) − T0(s − s0)] with each
/// species at its partial pressure in both states.
pub fn physical_exergy(
    db: &SpeciesDb,
    s: &Stream,
    env: &ReferenceEnvironment,
) -> Result<f64, ExergyError> {
    let molar = s.members(db)?.iter().try_fold(0.0, |acc, (sp, z)| {
        let dh = sp.enthalpy_molar(s.t)? - sp.enthalpy_molar(env.t0)?;
        let ds = match s.kind {
            StreamKind::Water => sp.standard_entropy(s.t)? - sp.standard_entropy(env.t0)?,
            _ => {
                sp.entropy_molar(s.t, z * s.p, env)? - sp.entropy_molar(env.t0, z * env.p0, env)?
            }
        };
        Ok::<_, ExergyError>(acc + z * (dh - env.t0 * ds / 1000.0))
    })?;
    Ok(1000.0 * s.molar_flow * molar)
}

/// Molar chemical exergy of a mixture, kJ/mol: Σ z·(ex° + Ru·T0·ln z).
pub fn molar_chemical_exergy(
    db: &SpeciesDb,
    composition: &[(&str, f64)],
    env: &ReferenceEnvironment,
) -> Result<f64, ExergyError> {
    composition
        .iter()
        .filter(|(_, z)| *z > 0.0)
        .try_fold(0.0, |acc, (name, z)| {
            Ok(acc + z * (db.get(name)?.ex_ch0 + env.rt0() * z.ln()))
        })
}

/// Chemical exergy flow of a stream, kW.
pub fn chemical_exergy_mixture(
    db: &SpeciesDb,
    s: &Stream,
    env: &ReferenceEnvironment,
) -> Result<f64, ExergyError> {
    let members = s.members(db)?;
    let molar: f64 = members
        .iter()
        .map(|(sp, z)| z * (sp.ex_ch0 + env.rt0() * z.ln()))
        .sum();
    Ok(1000.0 * s.molar_flow * molar)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ExergyBreakdown {
    pub physical: f64,
    pub chemical: f64,
    pub total: f64,
}

impl ExergyBreakdown {
    pub fn new(physical: f64, chemical: f64) -> Self {
        Self {
            physical,
            chemical,
            total: physical + chemical,
        }
    }
}

pub fn stream_exergy(
    db: &SpeciesDb,
    s: &Stream,
    env: &ReferenceEnvironment,
) -> Result<ExergyBreakdown, ExergyError> {
    Ok(ExergyBreakdown::new(
        physical_exergy(db, s, env)?,
        chemical_exergy_mixture(db, s, env)?,
    ))
}

/// Air exergy in the O2-based form: A·[ex_O2 + 3.76·ex_N2 + Ru·T0·(ln x_O2 + ln x_N2)],
/// with `air_o2_flow` in kmol O2/s.
pub fn air_exergy_o2_basis(
    db: &SpeciesDb,
    air_o2_flow: f64,
    env: &ReferenceEnvironment,
) -> Result<f64, ExergyError> {
    let bracket = db.get("O2")?.ex_ch0
        + 3.76 * db.get("N2")?.ex_ch0
        + env.rt0() * (env.air_o2_frac.ln() + env.air_n2_frac.ln());
    Ok(1000.0 * air_o2_flow * bracket)
}

/// Exergy carried by heat `q` crossing a boundary at `t_boundary`, kW.
pub fn heat_exergy(
    q: f64,
    t_boundary: f64,
    env: &ReferenceEnvironment,
) -> Result<f64, ExergyError> {
    if !(t_boundary > 0.0) {
        return Err(ExergyError::InvalidBoundary(t_boundary));
    }
    Ok((1.0 - env.t0 / t_boundary) * q)
}

/// Anything that crosses a control-volume boundary with mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaterialFlow {
    pub label: String,
    /// kg/s
    pub mass_flow: f64,
    /// kW, including formation enthalpies
    pub enthalpy: f64,
    /// kW/K, dead-state referenced
    pub entropy: f64,
    pub exergy: ExergyBreakdown,
}

impl MaterialFlow {
    pub fn from_stream(
        label: &str,
        db: &SpeciesDb,
        s: &Stream,
        env: &ReferenceEnvironment,
    ) -> Result<Self, ExergyError> {
        Ok(Self {
            label: label.to_string(),
            mass_flow: s.mass_flow(db)?,
            enthalpy: s.enthalpy_flow(db)?,
            entropy: s.entropy_flow(db, env)?,
            exergy: stream_exergy(db, s, env)?,
        })
    }

    /// A solid at T0 with known enthalpy and chemical exergy; its entropy
    /// follows from exergy = H − T0·S.
    pub fn solid_at_dead_state(
        label: &str,
        mass_flow: f64,
        enthalpy: f64,
        chemical_exergy: f64,
        env: &ReferenceEnvironment,
    ) -> Self {
        Self {
            label: label.to_string(),
            mass_flow,
            enthalpy,
            entropy: (enthalpy - chemical_exergy) / env.t0,
            exergy: ExergyBreakdown::new(0.0, chemical_exergy),
        }
    }

    /// Inert material with zero enthalpy and exergy (ash).
    pub fn inert(label: &str, mass_flow: f64) -> Self {
        Self {
            label: label.to_string(),
            mass_flow,
            enthalpy: 0.0,
            entropy: 0.0,
            exergy: ExergyBreakdown::default(),
        }
    }

    /// Only an exergy value; useful for ledger arithmetic.
    pub fn exergy_only(label: &str, exergy: f64) -> Self {
        Self {
            label: label.to_string(),
            mass_flow: 0.0,
            enthalpy: 0.0,
            entropy: 0.0,
            exergy: ExergyBreakdown::new(0.0, exergy),
        }
    }
}

/// Heat interaction; positive `q` enters the control volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatFlow {
    /// kW
    pub q: f64,
    /// K
    pub boundary_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalanceReport {
    pub exergy_in: f64,
    pub exergy_out: f64,
    pub destruction: f64,
    pub entropy_generation: f64,
    pub energy_in: f64,
    pub energy_out: f64,
    pub mass_in: f64,
    pub mass_out: f64,
}

impl BalanceReport {
    /// |Ėx_D − T0·Ṡ_gen| / Ėx_D
    pub fn gouy_stodola_mismatch(&self, env: &ReferenceEnvironment) -> f64 {
        (self.destruction - env.t0 * self.entropy_generation).abs() / self.destruction.abs()
    }

    pub fn mass_closure_error(&self) -> f64 {
        (self.mass_in - self.mass_out).abs() / self.mass_in.max(self.mass_out)
    }

    pub fn energy_closure_error(&self) -> f64 {
        (self.energy_in - self.energy_out).abs() / self.energy_in.abs().max(self.energy_out.abs())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ControlVolume {
    pub inlets: Vec<MaterialFlow>,
    pub outlets: Vec<MaterialFlow>,
    pub heat: Vec<HeatFlow>,
}

impl ControlVolume {
    /// Closes the mass, energy, entropy and exergy balances.
    pub fn balance(&self, env: &ReferenceEnvironment) -> Result<BalanceReport, ExergyError> {
        let sum =
            |flows: &[MaterialFlow], f: fn(&MaterialFlow) -> f64| flows.iter().map(f).sum::<f64>();
        let mut exergy_in = sum(&self.inlets, |m| m.exergy.total);
        let mut exergy_out = sum(&self.outlets, |m| m.exergy.total);
        let mut energy_in = sum(&self.inlets, |m| m.enthalpy);
        let mut energy_out = sum(&self.outlets, |m| m.enthalpy);
        let mut entropy_generation =
            sum(&self.outlets, |m| m.entropy) - sum(&self.inlets, |m| m.entropy);

        for h in &self.heat {
            let ex = heat_exergy(h.q, h.boundary_t, env)?;
            if h.q >= 0.0 {
                exergy_in += ex;
                energy_in += h.q;
            } else {
                exergy_out -= ex;
                energy_out -= h.q;
            }
            entropy_generation -= h.q / h.boundary_t;
        }

        let destruction = exergy_in - exergy_out;
        if destruction < -1e-9 * exergy_in.abs().max(1.0) {
            return Err(ExergyError::NegativeDestruction { destruction });
        }
        Ok(BalanceReport {
            exergy_in,
            exergy_out,
            destruction,
            entropy_generation,
            energy_in,
            energy_out,
            mass_in: sum(&self.inlets, |m| m.mass_flow),
            mass_out: sum(&self.outlets, |m| m.mass_flow),
        })
    }
}

/// Gasifier balance: feeds (fuel, air, moisture) and heat in, hot products out.
pub fn gasifier_exergy_balance(
    feeds: &[MaterialFlow],
    heat: &[HeatFlow],
    products: &[MaterialFlow],
    env: &ReferenceEnvironment,
) -> Result<BalanceReport, ExergyError> {
    ControlVolume {
        inlets: feeds.to_vec(),
        outlets: products.to_vec(),
        heat: heat.to_vec(),
    }
    .balance(env)
}

pub fn energy_efficiency(useful_out: f64, total_in: f64) -> Result<f64, ExergyError> {
    if !(total_in > 0.0) {
        return Err(ExergyError::ZeroInput(total_in));
    }
    Ok(useful_out / total_in)
}

/// ψ = Σ Ėx_out / Σ Ėx_in
pub fn exergy_efficiency(report: &BalanceReport) -> Result<f64, ExergyError> {
    if !(report.exergy_in > 0.0) {
        return Err(ExergyError::ZeroInput(report.exergy_in));
    }
    Ok(report.exergy_out / report.exergy_in)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StackRecovery {
    /// kW
    pub recovered: f64,
    /// Entropic mean temperature of the heat release, K.
    pub mean_temperature: f64,
    pub stack_stream: Stream,
}

/// Cools the gas to the stack temperature and reports the heat released.
pub fn stack_heat_recovery(
    db: &SpeciesDb,
    gas: &Stream,
    t_stack: f64,
    env: &ReferenceEnvironment,
) -> Result<StackRecovery, ExergyError> {
    if gas.t < t_stack {
        return Err(ExergyError::GasColderThanStack {
            gas_t: gas.t,
            stack_t: t_stack,
        });
    }
    let stack_stream = gas.at_temperature(t_stack);
    let recovered = gas.enthalpy_flow(db)? - stack_stream.enthalpy_flow(db)?;
    let entropy_drop = gas.entropy_flow(db, env)? - stack_stream.entropy_flow(db, env)?;
    let mean_temperature = if entropy_drop > 0.0 {
        recovered / entropy_drop
    } else {
        t_stack
    };
    Ok(StackRecovery {
        recovered,
        mean_temperature,
        stack_stream,
    })
}
