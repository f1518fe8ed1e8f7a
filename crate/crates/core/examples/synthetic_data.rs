//! Write a seeded synthetic daily weather CSV.
//!
//!     cargo run --example synthetic_data -- weather.csv [days] [seed]

use extremecast::synthetic::{synthetic_weather, write_csv, SyntheticConfig};

fn main() -> extremecast::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args.next().unwrap_or_else(|| "synthetic_weather.csv".into());
    let days = args.next().and_then(|s| s.parse().ok()).unwrap_or(2000);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let table = synthetic_weather(&SyntheticConfig { days, ..Default::default() }, seed)?;
    let file = std::fs::File::create(&out).map_err(|e| extremecast::Error::io(&out, e))?;
    write_csv(&table, file)?;
    println!("{} days of synthetic weather written to {out}", table.len());
    Ok(())
}
