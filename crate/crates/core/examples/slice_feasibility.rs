//! NPA feasibility of bias points on the six-player path.

use monogamy::npa::{bias_point_feasible, scan_csv, scan_points, slice_targets, Level};
use monogamy::{Graph, Result};

fn main() -> Result<()> {
    let p6 = Graph::path(6);
    let (x, y) = (61.0 / 26.0, 41.0 / 26.0);
    for level in [Level::ONE_EDGE_PAIRS, Level::TWO] {
        let f = bias_point_feasible(&p6, &slice_targets(x, y), level, 1e-7)?;
        println!(
            "({x:.4}, {y:.4}) at level {level}: {} (min eigenvalue {:.2e}, certificate {:.2e})",
            f.verdict.as_str(),
            f.min_eigenvalue,
            f.certificate
        );
    }

    let points: Vec<(f64, f64)> = (0..=6).map(|i| (0.5 * i as f64, 1.0)).collect();
    print!("{}", scan_csv(&scan_points(&points, Level::TWO, 1e-7, 1)?));
    Ok(())
}
