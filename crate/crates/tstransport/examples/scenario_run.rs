//! Drive the scenario layer from code: dump a preset config, run it, and
//! peek at the artifacts — the same path the command-line tool takes.

use std::fs;

use tstransport::scenario::{run_scenario, Preset};

fn main() -> Result<(), tstransport::Error> {
    let work = std::env::temp_dir().join("tstransport-scenario-demo");
    fs::create_dir_all(&work)?;

    let config_path = work.join("bernoulli.cfg");
    fs::write(&config_path, Preset::Bernoulli.dump())?;
    println!("config:\n{}", Preset::Bernoulli.dump());

    let out_dir = work.join("out");
    let outcome = run_scenario(&config_path, &out_dir, None, None)?;
    println!("artifacts:");
    for f in &outcome.files {
        println!("  {}", f.display());
    }

    let kv = fs::read_to_string(out_dir.join("conservation.kv"))?;
    println!("\nconservation.kv:");
    for line in kv.lines().filter(|l| l.ends_with("pass=true") || l.starts_with("pdf_")) {
        println!("  {line}");
    }

    let tsec = fs::read_to_string(out_dir.join("tsec_m0.csv"))?;
    println!("\nfirst rows of the origin branch's waiting-time law:");
    for line in tsec.lines().take(5) {
        println!("  {line}");
    }
    Ok(())
}
