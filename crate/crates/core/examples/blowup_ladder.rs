//! Refinement ladders for singular data |x|^{-η}: divergent local mass above
//! the non-existence threshold, a stable control below it.

use frac_hardy::params::FracParams;
use frac_hardy::regimes::{blowup_experiment, BlowupConfig};
use frac_hardy::symbol::SpectralMeasure;

fn main() -> frac_hardy::Result<()> {
    let measure = SpectralMeasure::isotropic_unit(1, 1.0)?;
    let ladder = BlowupConfig {
        eta: 0.6,
        rho: 0.8,
        radius: 2.0,
        epsilon: 0.5,
        levels: 3,
        base_n: 128,
        extent: 32.0,
        base_steps: 16,
        horizon: 1e-3,
    };
    for p in [4.0, 2.0] {
        let params = FracParams::new(1, 0.9, 1.0, 0.25, p, 1.0)?;
        let rep = blowup_experiment(&params, &measure, &ladder)?;
        println!(
            "p = {p}: verdict {:?}, hypotheses hold: {}",
            rep.verdict,
            rep.hypotheses_hold()
        );
        for c in rep.hypotheses.iter().filter(|c| !c.holds) {
            println!("    fails: {}", c.text);
        }
        for (k, l) in rep.levels.iter().enumerate() {
            println!(
                "    level {k}: h = {:.4}, steps {}, completed {}, diverged at {:?}, growth {:?}",
                l.h, l.steps, l.completed, l.divergence_time, l.growth
            );
        }
    }
    Ok(())
}
