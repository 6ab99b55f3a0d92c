//! The piecewise Osgood-type lower bound f ≤ s^p, evaluated in log space.

use frac_hardy::regimes::OsgoodFunction;

fn main() -> frac_hardy::Result<()> {
    let f = OsgoodFunction::new(2.0, 3.0, 24)?;
    println!("continuity defect at breakpoints: {:.2e}", f.continuity_defect());
    for (k, (left, right)) in f.breakpoint_values().iter().take(5).enumerate() {
        println!("breakpoint {k}: ln f from the left {left:.12}, from the right {right:.12}");
    }
    for s in [3.0, 4.0, 6.75, 10.0, 100.0] {
        println!("f({s}) = {:.6}, s^p = {:.6}", f.eval(s), s.powf(2.0));
    }
    println!("ln f at s = e^40: {:.6}", f.eval_ln(40.0));
    Ok(())
}
