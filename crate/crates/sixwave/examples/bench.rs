//! Timing harness for the collision table build and the grid sweeps at
//! production scale. Run with `cargo run --release --example bench`.

use std::time::Instant;

use sixwave::collision::fast::TripleTable;
use sixwave::field::{GridData, GridSpec};
use sixwave::QuadratureSpec;

fn main() {
    let spec = GridSpec::new(65, 65, 4.3, 4.3);
    let q = QuadratureSpec::new(spec, 64);

    let t0 = Instant::now();
    let table = TripleTable::build(&q);
    println!("table build: {:?}", t0.elapsed());

    let mut data = GridData::zeros(spec);
    for i in 0..spec.nx {
        let x = spec.x(i);
        for j in 0..spec.nv {
            let v = spec.v(j);
            *data.at_mut(i, j) = 0.02 * (-x * x - v * v).exp() * (1.0 + 0.1 * (j as f64).sin());
        }
    }

    for name in ["collide", "gain", "rate"] {
        let t0 = Instant::now();
        let out = match name {
            "collide" => table.collide_grid(&data),
            "gain" => table.gain_grid(&data),
            _ => table.rate_grid(&data),
        };
        println!(
            "{name}: {:?}  (checksum {:.6e})",
            t0.elapsed(),
            out.values.iter().sum::<f64>()
        );
    }
}
