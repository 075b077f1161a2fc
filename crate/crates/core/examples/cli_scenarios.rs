//! Runs the bundled scenario files through the command-line front end and
//! prints each exit code.

use std::path::Path;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let out = std::env::temp_dir().join("jmlift-scenarios");
    let runs = [
        ("integrate", "circular.toml"),
        ("integrate", "ellipse-geodesic.toml"),
        ("compare", "ellipse-compare.toml"),
        ("curvature", "curvature.toml"),
        ("transform", "bohlin.toml"),
        ("transform", "moser.toml"),
        ("transform", "milnor.toml"),
        ("transform", "anomaly.toml"),
        ("transform", "houri.toml"),
    ];
    for (command, file) in runs {
        let target = out.join(file.trim_end_matches(".toml"));
        let config = dir.join(file);
        let args = ["jmlift", command, "--config", config.to_str().unwrap(), "--out", target.to_str().unwrap()];
        let code = jmlift::cli::run(args);
        println!("== {command} {file}: exit {code}\n");
    }
}
