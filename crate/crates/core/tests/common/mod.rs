//! Shared fixtures and independent reference calculations.
#![allow(dead_code)]

use exergas::fuel::{builtin_fuel, elemental_moles};
use exergas::gasifier::ReactionInputs;
use exergas::thermo::{SpeciesDb, GAS_CONSTANT, P_STANDARD};

pub fn db() -> &'static SpeciesDb {
    SpeciesDb::bundled()
}

pub fn oak_inputs(er: f64, w: f64) -> ReactionInputs {
    let oak = builtin_fuel("oak_wood").unwrap();
    let moles = elemental_moles(&oak.dry_ultimate().unwrap()).unwrap();
    ReactionInputs::new(moles, er, w)
}

/// JANAF reference values.
pub mod janaf {
    /// N2 H(T) − H(298.15), kJ/mol.
    pub const N2_DH: [(f64, f64); 4] = [
        (400.0, 2.971),
        (500.0, 5.911),
        (1000.0, 21.463),
        (1100.0, 24.760),
    ];
    /// N2 S°(298.15), J/(mol·K).
    pub const N2_S298: f64 = 191.609;
    /// N2 S°(500) − S°(298.15), J/(mol·K).
    pub const N2_DS500: f64 = 15.13;
    /// Standard Gibbs energies of formation, kJ/mol.
    pub const DFG_1000: [(&str, f64); 3] =
        [("CO2", -395.886), ("CO", -200.275), ("H2O(g)", -192.590)];
    pub const DFG_298: [(&str, f64); 4] = [
        ("CO2", -394.389),
        ("CO", -137.163),
        ("H2O(g)", -228.582),
        ("CH4", -50.768),
    ];

    /// Water-gas shift K at 1000 K from the formation Gibbs energies.
    pub fn wgs_k_1000() -> f64 {
        let dg = DFG_1000[0].1 - DFG_1000[1].1 - DFG_1000[2].1;
        (-dg * 1000.0 / (super::GAS_CONSTANT * 1000.0)).exp()
    }
}

/// Gibbs energy of formation from the species database, kJ/mol.
pub fn formation_gibbs(db: &SpeciesDb, name: &str, t: f64) -> f64 {
    let sp = db.get(name).unwrap();
    let mut g = sp.gibbs_molar(t).unwrap();
    for (el, n) in &sp.formula {
        let (reference, atoms) = match el.as_str() {
            "C" => ("C(gr)", 1.0),
            "H" => ("H2", 2.0),
            "O" => ("O2", 2.0),
            "N" => ("N2", 2.0),
            other => panic!("no reference state for {other}"),
        };
        g -= f64::from(*n) / atoms * db.get(reference).unwrap().gibbs_molar(t).unwrap();
    }
    g
}

/// Equilibrium mole fractions [H2, CO, CO2, H2O, CH4, N2] by direct
/// minimization of the mixture Gibbs energy.
///
/// With C, H, O fixed the composition has two degrees of freedom, taken as
/// ln n_CH4 and n_CO2. A coarse grid is refined around the best point until
/// the cell is negligible.
pub fn gibbs_oracle(db: &SpeciesDb, inputs: &ReactionInputs, t: f64, p: f64) -> [f64; 6] {
    let c = inputs.carbon_atoms();
    let h = inputs.hydrogen_atoms();
    let o = inputs.oxygen_atoms();
    let n2 = inputs.nitrogen_atoms() / 2.0;
    let mu0: Vec<f64> = ["H2", "CO", "CO2", "H2O(g)", "CH4", "N2"]
        .iter()
        .map(|s| db.get(s).unwrap().gibbs_molar(t).unwrap() * 1000.0 / (GAS_CONSTANT * t))
        .collect();

    let moles = |ln_ch4: f64, co2: f64| -> Option<[f64; 6]> {
        let ch4 = ln_ch4.exp();
        let co = c - ch4 - co2;
        let h2o = o - co - 2.0 * co2;
        let h2 = (h - 2.0 * h2o - 4.0 * ch4) / 2.0;
        let n = [h2, co, co2, h2o, ch4, n2];
        n.iter().all(|v| *v > 0.0).then_some(n)
    };
    let gibbs = |x: f64, y: f64| -> f64 {
        match moles(x, y) {
            None => f64::INFINITY,
            Some(n) => {
                let total: f64 = n.iter().sum();
                n.iter()
                    .zip(&mu0)
                    .map(|(ni, g)| ni * (g + (ni / total * p / P_STANDARD).ln()))
                    .sum()
            }
        }
    };

    let (mut x_lo, mut x_hi) = ((c * 1e-12).ln(), c.ln());
    let (mut y_lo, mut y_hi) = (0.0, c);
    let k = 40;
    let (mut best_x, mut best_y) = (x_lo, y_lo);
    for _ in 0..60 {
        let mut best = f64::INFINITY;
        let dx = (x_hi - x_lo) / k as f64;
        let dy = (y_hi - y_lo) / k as f64;
        for i in 0..=k {
            for j in 0..=k {
                let (x, y) = (x_lo + i as f64 * dx, y_lo + j as f64 * dy);
                let g = gibbs(x, y);
                if g < best {
                    best = g;
                    best_x = x;
                    best_y = y;
                }
            }
        }
        assert!(best.is_finite(), "oracle found no feasible point");
        x_lo = best_x - 2.0 * dx;
        x_hi = best_x + 2.0 * dx;
        y_lo = (best_y - 2.0 * dy).max(0.0);
        y_hi = best_y + 2.0 * dy;
        if dy < 1e-15 * c && dx < 1e-12 {
            break;
        }
    }
    let n = moles(best_x, best_y).unwrap();
    let total: f64 = n.iter().sum();
    n.map(|v| v / total)
}
