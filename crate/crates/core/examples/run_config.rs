//! Driving the command pipeline from a config string, as the binary does.
//!
//! cargo run --example run_config

use finsler_blowup::cli::{execute, Command, RunConfig};

const CONFIG: &str = r#"
resolution = 64
norm = { family = "smoothed_lp", params = [4, 0.05] }
[problem]
q = 2.0
[schedules]
m = [10, 40]
"#;

fn main() -> finsler_blowup::Result<()> {
    let config = RunConfig::from_toml(CONFIG)?;
    config.validate()?;
    let out = std::env::temp_dir().join("finsler-blowup-example");
    for command in [Command::Norms, Command::Distance, Command::Solve] {
        let verdict = execute(command, &config, &out, 1)?;
        println!("{}: {} (passed {})", command.name(), verdict.summary, verdict.passed());
    }
    println!("reports in {}", out.display());
    Ok(())
}
