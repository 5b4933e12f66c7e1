//! Classification of a game over all graphs from finitely many checks.

use monogamy::game::named_game;
use monogamy::report::{monogamy_report, ReportOptions};
use monogamy::Result;

fn main() -> Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "oc3".into());
    let report = monogamy_report(&named_game(&name)?, &ReportOptions::default())?;
    println!("{}", serde_json::to_string_pretty(&report.to_json())?);
    Ok(())
}
