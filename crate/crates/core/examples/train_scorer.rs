//! Train the 784-8-1 scorer on MNIST and look at the two score pools.
//!
//!     cargo run --release --example train_scorer -- [DATA_DIR] [EPOCHS]

use d3f_ldp::characterize::moments;
use d3f_ldp::ingest::MnistPaths;
use d3f_ldp::model::{self, TrainingConfig};
use d3f_ldp::pipeline::score_pools;

fn main() -> d3f_ldp::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args.next().unwrap_or_else(|| "data/mnist".into());
    let epochs = args.next().map_or(3, |e| e.parse().expect("epochs"));
    let (train, test) = MnistPaths::in_dir(dir).load()?;

    let config = TrainingConfig {
        epochs,
        seed: 7,
        ..Default::default()
    };
    let run = model::train_with_checkpoints(&train, &config, &[epochs])?;
    for l in &run.log {
        println!("epoch {:>2}  loss {:.5}", l.epoch, l.loss);
    }

    for pool in score_pools(&run.params, &test, "test")? {
        let c = moments(pool)?;
        println!(
            "{}: mu {:+.3}  sigma {:.3}  range [{:+.2}, {:+.2}]",
            c.hypothesis(),
            c.mu,
            c.sigma,
            c.support_min,
            c.support_max
        );
    }
    Ok(())
}
