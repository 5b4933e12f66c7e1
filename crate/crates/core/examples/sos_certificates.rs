//! Exact verification of the sum-of-squares certificates on P3 and P4.

use monogamy::sos::SosIdentity;
use monogamy::Result;

fn main() -> Result<()> {
    for name in ["p3", "p4", "p4-weighted", "p4-main"] {
        let id = SosIdentity::load(name)?;
        let report = id.verify();
        println!("{name}: {}", report.verdict());
        println!("  certified bound {}", id.certified_bound()?);
    }
    Ok(())
}
