//! Load the four MNIST IDX files and print the digit-0-vs-rest populations.
//!
//!     cargo run --example parse_mnist -- [DATA_DIR]

use d3f_ldp::ingest::MnistPaths;
use d3f_ldp::pipeline::DATA_DIR_ENV;

fn main() -> d3f_ldp::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .or_else(|| std::env::var(DATA_DIR_ENV).ok())
        .unwrap_or_else(|| "data/mnist".into());
    let (train, test) = MnistPaths::in_dir(&dir).load()?;
    for (name, split) in [("train", &train), ("test", &test)] {
        let c = split.counts();
        println!("{name:>5}: H0 {:>5}  H1 {:>5}", c.h0, c.h1);
    }
    let all = train.counts() + test.counts();
    println!("total: H0 {:>5}  H1 {:>5}", all.h0, all.h1);
    Ok(())
}
