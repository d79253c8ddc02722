//! Regenerates the files under fixtures/ from the deterministic
//! builders.  Run after changing the fixture table or the report
//! renderer: cargo run -p paramodular --example make_fixtures

use std::fs;
use std::path::Path;

use paramodular::gen::synthetic_pipeline_table;
use paramodular::io::serialize_table;
use paramodular::pipeline::{render_report, run, PipelineConfig};

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let dir = root.join("fixtures");
    fs::create_dir_all(&dir).expect("fixtures directory");

    let table = synthetic_pipeline_table();
    fs::write(dir.join("pipeline.pfes"), serialize_table(&table)).expect("write table");

    let report = run(&table, &PipelineConfig::default()).expect("fixture reaches the scan");
    fs::write(dir.join("pipeline.report"), render_report(&report)).expect("write report");

    println!("wrote {}", dir.display());
}
