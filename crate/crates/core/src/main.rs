use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use exergas::analysis::{run_analysis, AnalysisOptions, RunResult};
use exergas::error::{Error, Result};
use exergas::fuel::{builtin_fuel, builtin_fuels, fuel_chemical_exergy, load_fuel_file};
use exergas::gasifier::{GasifierSpec, MethaneClosure, PRODUCT_SPECIES};
use exergas::sweep::{emit_csv, notes_path, run_sweep, SweepConfig, KELVIN_OFFSET};
use exergas::thermo::{ReferenceEnvironment, SpeciesDb, P_STANDARD};

#[derive(Parser)]
#[command(
    name = "exergas",
    version,
    about = "Biomass gasification energy and exergy analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a single operating point.
    Analyze(AnalyzeArgs),
    /// Run a one-dimensional parametric sweep and write CSV.
    Sweep(SweepArgs),
    /// Built-in fuel data.
    Fuels {
        #[command(subcommand)]
        command: FuelsCommand,
    },
    /// Species properties at one temperature.
    Props(PropsArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Built-in fuel name.
    #[arg(long, default_value = "oak_wood", conflicts_with = "fuel_file")]
    fuel: String,
    /// JSON fuel definition instead of a built-in fuel.
    #[arg(long)]
    fuel_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0.35)]
    er: f64,
    /// Gasifier temperature, °C.
    #[arg(long, default_value_t = 800.0)]
    tgas_c: f64,
    /// Ambient (dead-state) temperature, °C.
    #[arg(long, default_value_t = 25.0)]
    t0_c: f64,
    /// Gasifier pressure, kPa.
    #[arg(long, default_value_t = P_STANDARD)]
    pressure: f64,
    #[arg(long, default_value_t = 0.015)]
    heat_loss: f64,
    /// Steam/moisture feed, kg per kg dry fuel.
    #[arg(long, default_value_t = 0.1)]
    moisture: f64,
    /// Dry fuel feed, kg/s.
    #[arg(long, default_value_t = 1.0)]
    mass_flow: f64,
    /// Stack temperature, °C.
    #[arg(long, default_value_t = 155.0)]
    t_stack_c: f64,
    #[arg(long)]
    cold_gas_only: bool,
    /// Close methane with C(s) + 2H2 instead of CO + 3H2.
    #[arg(long)]
    graphite_methane: bool,
    /// Print the full result as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Built-in preset: fig2 or fig3.
    #[arg(long, required_unless_present = "config", conflicts_with = "config")]
    preset: Option<String>,
    /// JSON sweep configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path; overrides the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FuelsCommand {
    List,
}

#[derive(Args)]
struct PropsArgs {
    #[arg(long)]
    species: String,
    /// Temperature, °C.
    #[arg(long, conflicts_with = "t_k", required_unless_present = "t_k")]
    t: Option<f64>,
    /// Temperature, K.
    #[arg(long)]
    t_k: Option<f64>,
    /// Partial pressure for the entropy, kPa.
    #[arg(long, default_value_t = P_STANDARD)]
    p: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let db = SpeciesDb::bundled();
    match cli.command {
        Command::Analyze(a) => analyze(db, a),
        Command::Sweep(s) => sweep(db, s),
        Command::Fuels {
            command: FuelsCommand::List,
        } => list_fuels(db),
        Command::Props(p) => props(db, p),
    }
}

fn analyze(db: &SpeciesDb, a: AnalyzeArgs) -> Result<()> {
    let fuel = match &a.fuel_file {
        Some(path) => load_fuel_file(path)?,
        None => builtin_fuel(&a.fuel)?,
    }
    .with_mass_flow(a.mass_flow);
    let spec = GasifierSpec {
        t_gasifier: a.tgas_c + KELVIN_OFFSET,
        pressure: a.pressure,
        equivalence_ratio: a.er,
        heat_loss_fraction: a.heat_loss,
        moisture_w: a.moisture,
        methane_closure: if a.graphite_methane {
            MethaneClosure::Graphite
        } else {
            MethaneClosure::GasPhase
        },
    };
    let env = ReferenceEnvironment::new(a.t0_c + KELVIN_OFFSET, P_STANDARD)?;
    let options = AnalysisOptions {
        cold_gas_only: a.cold_gas_only,
        t_stack: a.t_stack_c + KELVIN_OFFSET,
    };
    let r = run_analysis(db, &fuel, &spec, &env, &options)?;
    if a.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&r).map_err(|e| Error::Io(e.to_string()))?
        );
    } else {
        print_report(&r);
    }
    Ok(())
}

fn print_report(r: &RunResult) {
    println!("fuel               {}", r.fuel);
    println!(
        "gasifier           {:.2} K, {:.3} kPa, ER {}, moisture {} kg/kg",
        r.spec.t_gasifier, r.spec.pressure, r.spec.equivalence_ratio, r.spec.moisture_w
    );
    println!("dead state         {:.2} K", r.env.t0);
    println!("producer gas       {:.6} kmol/s", r.gas_flow);
    for (name, z) in PRODUCT_SPECIES.iter().zip(r.mole_fractions) {
        println!("  {name:<8} {:>10.5}", z);
    }
    println!("gas LHV            {:.4} MJ/kmol", r.gas_lhv.per_kmol_gas);
    println!("heat duty          {:.3} kW", r.energy.heat_duty);
    println!(
        "fuel exergy        {:.3} kW (beta {:.4})",
        r.fuel_exergy, r.beta
    );
    println!(
        "air exergy         {:.4} kW (O2-basis form {:.4} kW)",
        r.air_exergy, r.air_exergy_o2_basis
    );
    println!("exergy in          {:.3} kW", r.balance.exergy_in);
    println!("exergy out         {:.3} kW", r.balance.exergy_out);
    println!("exergy destroyed   {:.3} kW", r.balance.destruction);
    println!(
        "entropy generated  {:.6} kW/K",
        r.balance.entropy_generation
    );
    println!("recovered heat     {:.3} kW", r.recovered_heat);
    println!("eta                {:.5}", r.eta);
    println!("psi                {:.5}", r.psi);
    println!("psi (system)       {:.5}", r.psi_system);
    for w in &r.warnings {
        println!("warning: {w}");
    }
}

fn sweep(db: &SpeciesDb, s: SweepArgs) -> Result<()> {
    let cfg = match (&s.preset, &s.config) {
        (Some(name), _) => SweepConfig::preset(name)?,
        (None, Some(path)) => SweepConfig::load(path)?,
        (None, None) => return Err(Error::Config("need --preset or --config".into())),
    };
    let out = s
        .out
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| Error::Config("no output path: use --out".into()))?;
    let result = run_sweep(db, &cfg)?;
    emit_csv(&result.points, &out)?;
    let notes = notes_path(&out);
    std::fs::write(&notes, result.notes.join("\n") + "\n")
        .map_err(|e| Error::Io(format!("{}: {e}", notes.display())))?;
    for n in &result.notes {
        println!("{n}");
    }
    println!("wrote {} and {}", out.display(), notes.display());
    Ok(())
}

fn list_fuels(db: &SpeciesDb) -> Result<()> {
    println!(
        "{:<14} {:>9} {:>9} {:>8} {:>8}",
        "name", "HHV_dry", "LHV_dry", "beta", "M_wt%"
    );
    for fuel in builtin_fuels() {
        let ex = fuel_chemical_exergy(&fuel, db)?;
        println!(
            "{:<14} {:>9.3} {:>9.3} {:>8.4} {:>8.1}",
            fuel.name,
            fuel.hhv_dry()?,
            fuel.lhv_dry()?,
            ex.beta,
            fuel.proximate.moisture
        );
    }
    Ok(())
}

fn props(db: &SpeciesDb, p: PropsArgs) -> Result<()> {
    let t = match (p.t, p.t_k) {
        (Some(c), _) => c + KELVIN_OFFSET,
        (None, Some(k)) => k,
        (None, None) => return Err(Error::Config("need --t or --t-k".into())),
    };
    let sp = db.get(&p.species)?;
    let env = ReferenceEnvironment::default();
    println!("species   {}", sp.name);
    println!("T         {t} K");
    println!("cp        {:.4} J/mol-K", sp.cp_molar(t)?);
    println!("h         {:.4} kJ/mol", sp.enthalpy_molar(t)?);
    println!(
        "s         {:.4} J/mol-K at {} kPa",
        sp.entropy_molar(t, p.p, &env)?,
        p.p
    );
    println!("g         {:.4} kJ/mol", sp.gibbs_molar(t)?);
    println!("ex_ch(T)  {:.4} kJ/mol", sp.chemical_exergy_at_t(t, &env)?);
    Ok(())
}
