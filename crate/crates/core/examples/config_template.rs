//! Print the default run configuration as JSON, a starting point for
//! `--config` files.
//!
//!     cargo run --example config_template > run.json

fn main() -> extremecast::Result<()> {
    print!("{}", extremecast::io::to_canonical_string(&extremecast::io::RunConfig::default())?);
    Ok(())
}
