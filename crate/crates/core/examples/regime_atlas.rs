//! Regime verdicts over a small (α, p) sweep, with the clause that decides
//! each failing verdict.

use frac_hardy::params::FracParams;
use frac_hardy::regimes::{classify, Regime};

fn main() -> frac_hardy::Result<()> {
    print!("{:>5} {:>5} {:>8}", "alpha", "p", "q_c");
    for r in Regime::ALL {
        print!(" {:>22}", r.name());
    }
    println!();
    for alpha in [0.3, 0.5, 0.7, 0.9] {
        for p in [1.5, 3.0, 5.0] {
            let rep = classify(&FracParams::new(1, alpha, 1.0, 0.25, p, 1.0)?);
            print!("{alpha:>5} {p:>5} {:>8.4}", rep.q_c.unwrap_or(f64::NAN));
            for r in Regime::ALL {
                let v = rep.verdict(r);
                let cell = if v.boundary {
                    "boundary"
                } else if v.satisfied {
                    "yes"
                } else {
                    "no"
                };
                print!(" {cell:>22}");
            }
            println!();
        }
    }
    let rep = classify(&FracParams::new(1, 0.5, 1.0, 0.25, 3.0, 3.5)?);
    for v in &rep.verdicts {
        println!(
            "{}: {}",
            v.regime,
            v.failing().unwrap_or_else(|| "all clauses hold".into())
        );
    }
    Ok(())
}
