//! Regenerates `data/synthetic.csv`: `cargo run -p eagga-cli --example generate_synthetic [n] [seed] [path]`.

use eagga_core::data::{synthetic_monotone_interaction, write_csv};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n = args.first().map_or(500, |s| s.parse().expect("n must be an integer"));
    let seed = args.get(1).map_or(0, |s| s.parse().expect("seed must be an integer"));
    let path = args.get(2).map_or("data/synthetic.csv", String::as_str);
    let ds = synthetic_monotone_interaction(n, seed);
    write_csv(&ds, path, "y").expect("write synthetic data");
}
