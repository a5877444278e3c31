mod common;

use approx::assert_abs_diff_eq;
use common::{db, janaf};
use exergas::thermo::*;
use proptest::prelude::*;

const TABLE3: [(&str, f64, f64); 8] = [
    ("O2", 0.0, 3.97),
    ("N2", 0.0, 0.72),
    ("CO2", -393.52, 19.87),
    ("H2O(g)", -241.82, 9.5),
    ("H2O(l)", -285.83, 0.9),
    ("SO2", -297.10, 313.40),
    ("NO", 90.59, 88.90),
    ("NO2", 33.72, 55.60),
];

#[test]
fn reference_values_reproduced_exactly() {
    let env = ReferenceEnvironment::default();
    for (name, hf, ex) in TABLE3 {
        let sp = db().get(name).unwrap();
        assert_eq!(sp.chemical_exergy_at_t(env.t0, &env).unwrap(), ex, "{name}");
        assert_eq!(sp.enthalpy_molar(T_STANDARD).unwrap(), hf, "{name}");
    }
}

#[test]
fn nitrogen_against_janaf() {
    let n2 = db().get("N2").unwrap();
    let h298 = n2.enthalpy_molar(T_STANDARD).unwrap();
    for (t, dh) in janaf::N2_DH {
        assert_abs_diff_eq!(n2.enthalpy_molar(t).unwrap() - h298, dh, epsilon = 0.01);
    }
    assert_abs_diff_eq!(
        n2.standard_entropy(T_STANDARD).unwrap(),
        janaf::N2_S298,
        epsilon = 0.05
    );
    let ds = n2.standard_entropy(500.0).unwrap() - n2.standard_entropy(T_STANDARD).unwrap();
    assert_abs_diff_eq!(ds, janaf::N2_DS500, epsilon = 0.02);
}

#[test]
fn bundled_database_is_complete() {
    for name in REQUIRED_SPECIES {
        assert!(db().get(name).is_ok(), "{name}");
    }
    assert!(matches!(
        db().get("Xe"),
        Err(ThermoError::UnknownSpecies(_))
    ));
}

#[test]
fn database_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("species.dat");
    std::fs::write(&path, include_str!("../data/species.dat")).unwrap();
    let loaded = load_species_db(&path).unwrap();
    assert_eq!(loaded.len(), db().len());
    assert!(load_species_db(dir.path().join("missing.dat")).is_err());
}

#[test]
fn out_of_range_temperature_is_an_error() {
    let co = db().get("CO").unwrap();
    assert!(matches!(
        co.enthalpy_molar(100.0),
        Err(ThermoError::TemperatureOutOfRange { .. })
    ));
    assert!(co.enthalpy_molar(7000.0).is_err());
}

fn gas_species() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec![
        "O2", "N2", "CO2", "H2O(g)", "CO", "H2", "CH4", "NO", "NO2", "SO2",
    ])
}

proptest! {
    #[test]
    fn enthalpy_derivative_is_cp(name in gas_species(), t in 300.0f64..2900.0) {
        let sp = db().get(name).unwrap();
        let d = 1e-3;
        let dhdt = (sp.enthalpy_molar(t + d).unwrap() - sp.enthalpy_molar(t - d).unwrap()) / (2.0 * d) * 1000.0;
        let cp = sp.cp_molar(t).unwrap();
        prop_assert!((dhdt - cp).abs() <= 1e-6 * cp.max(1.0) + 1e-5, "{name} {t}: {dhdt} vs {cp}");
    }

    #[test]
    fn entropy_increases_with_temperature(name in gas_species(), t in 300.0f64..2900.0, dt in 1.0f64..100.0) {
        let sp = db().get(name).unwrap();
        prop_assert!(sp.standard_entropy(t + dt).unwrap() > sp.standard_entropy(t).unwrap());
    }

    #[test]
    fn gibbs_identity(name in gas_species(), t in 300.0f64..2900.0) {
        let sp = db().get(name).unwrap();
        let g = sp.enthalpy_molar(t).unwrap() - t * sp.standard_entropy(t).unwrap() / 1000.0;
        prop_assert!((sp.gibbs_molar(t).unwrap() - g).abs() < 1e-9);
    }

    #[test]
    fn entropy_drops_with_pressure(name in gas_species(), t in 300.0f64..2000.0, p in 1.0f64..5000.0) {
        let env = ReferenceEnvironment::default();
        let sp = db().get(name).unwrap();
        let s = sp.entropy_molar(t, p, &env).unwrap();
        let expected = sp.standard_entropy(t).unwrap() - env.ru * (p / env.p0).ln();
        prop_assert!((s - expected).abs() < 1e-9);
    }
}

#[test]
fn segments_join_smoothly() {
    for sp in db().records() {
        for pair in sp.segments.windows(2) {
            let t = pair[0].t_high;
            let below = GAS_CONSTANT * pair[0].cp_over_r(t);
            let above = GAS_CONSTANT * pair[1].cp_over_r(t);
            assert!((below - above).abs() <= 0.005 * below, "{} at {t}", sp.name);
            let h_lo = sp.enthalpy_molar(t - 1e-9).unwrap();
            let h_hi = sp.enthalpy_molar(t + 1e-9).unwrap();
            assert!((h_lo - h_hi).abs() < 1e-6, "{}", sp.name);
        }
    }
}
