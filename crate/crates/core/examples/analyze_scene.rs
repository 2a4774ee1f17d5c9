//! The scene-file workflow behind `graspkit analyze` and `graspkit rank`:
//! load a JSON scene, analyze every grasp, rank by Q1.

use graspkit::cli::{cmd_analyze, cmd_rank, load_scene, rank_text, CommonFlags, Metric};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/two_grasps.json");
    let run = || -> graspkit::cli::CliResult<()> {
        let scene = load_scene(std::path::Path::new(path))?;
        let flags = CommonFlags {
            cone_edges: None,
            moment_scale: None,
            seed: 0,
        };
        let report = cmd_analyze(&scene, &flags, false)?;
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("serializable")
        );
        print!("{}", rank_text(&cmd_rank(&scene, &flags, Metric::Q1)?));
        Ok(())
    };
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.code);
    }
}
