//! The full pipeline on a scenario file, as `weakdamp run` does it.

use weakdamp::cli::{parse_config, run_scenario, write_outputs};

const CONFIG: &str = "\
[scenario]
name=example
family=power:a=0.8,b=0.9
forcing=exp:k=0.5
omega=1.2
xi0=1
xi1=0

[integration]
horizon=1500
tol=1e-10
";

fn main() -> weakdamp::Result<()> {
    let cfg = parse_config(CONFIG)?;
    let mut run = run_scenario(&cfg)?;
    let dir = std::env::temp_dir().join("weakdamp-example");
    write_outputs(&mut run, &dir)?;
    print!("{}", run.report.summary());
    println!("exit code {} ; artifacts in {}", run.report.exit_code(), dir.display());
    for a in &run.report.artifacts {
        println!("  {a}");
    }
    Ok(())
}
