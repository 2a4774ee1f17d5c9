//! Synthesis on a triangle mesh read from an OFF file. Contacts walk across
//! mesh edges; flat faces can still trap a run, so several seeds are tried.

use graspkit::cli::parse_off;
use graspkit::contact::FrictionModel;
use graspkit::synthesis::{synthesize_seeds, SynthesisConfig};

fn main() -> graspkit::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/octahedron.off");
    let text =
        std::fs::read_to_string(path).map_err(|e| graspkit::Error::InvalidInput(e.to_string()))?;
    let mesh = parse_off(&text)?;
    println!("mesh volume {:.4}", mesh.signed_volume());

    let cfg = SynthesisConfig {
        max_iters: 300,
        ..SynthesisConfig::new(3, FrictionModel::Hard { mu: 0.6 })
    };
    let seeds: Vec<u64> = (0..12).collect();
    for (seed, res) in seeds.iter().zip(synthesize_seeds(&mesh, &cfg, &seeds)) {
        // A run that never closes still reports its best iterate.
        let res = match res {
            Ok(r) => r,
            Err(graspkit::Error::NoConvergence(best)) => *best,
            Err(e) => return Err(e),
        };
        println!(
            "seed {seed:>2}: closed {:<5} iterations {:>3} measure {:+.5}",
            res.force_closure, res.iterations, res.final_measure
        );
    }
    Ok(())
}
