//! Run a TOML config through the same path as the `iongradim` binary.
//!
//! ```text
//! cargo run --example config_run -- crates/core/configs/three_ion_spin.toml /tmp/out
//! ```

use std::path::PathBuf;

use iongradim::cli::{emit, execute, parse_config};

fn main() {
    let mut args = std::env::args().skip(1);
    let default = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/three_ion_spin.toml");
    let path = args.next().unwrap_or_else(|| default.to_string());
    let out = PathBuf::from(
        args.next()
            .unwrap_or_else(|| std::env::temp_dir().join("iongradim-example").display().to_string()),
    );

    let text = std::fs::read_to_string(&path).expect("readable config");
    let config = parse_config(&text).unwrap_or_else(|e| panic!("{path}: {e}"));
    let bundle = execute(&config).unwrap_or_else(|e| panic!("{e}"));
    println!("config hash {}", bundle.provenance.config_hash);
    for note in &bundle.annotations {
        println!("note: {note}");
    }
    for file in emit(&bundle, config.output_format, &out).expect("writable output directory") {
        println!("wrote {}", file.display());
    }
}
