//! One player saturating the magic square with two partners at once.

use monogamy::game::magic_square;
use monogamy::quantum::magic_square_strategy;
use monogamy::report::polygamy_report;
use monogamy::Result;

fn main() -> Result<()> {
    let r = polygamy_report(&magic_square(), &magic_square_strategy(), 7, 20)?;
    println!("{}", serde_json::to_string_pretty(&r.to_json())?);
    Ok(())
}
