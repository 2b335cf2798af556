//! Run the pipeline on seeded random plants and tally the outcomes.
//!
//! cargo run --release --example random_pipeline [-- SEEDS]

use std::time::Instant;

use opacity_edit::{oracle_ic_enforcing, random_incomparable_instance, run_pipeline, PipelineConfig};

fn main() {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let t = Instant::now();
    let (mut ok, mut no, mut largest) = (0, 0, 0);
    for seed in 0..seeds {
        let m = random_incomparable_instance(seed, 6, 4);
        let run = run_pipeline(&m, &PipelineConfig::default()).unwrap();
        largest = largest.max(run.game.num_a() + run.game.num_f());
        match &run.synthesis {
            Some(s) => {
                oracle_ic_enforcing(&m.automaton, &m.profile, &run.observers, &s.transducer, None)
                    .unwrap_or_else(|c| panic!("seed {seed}: {}", c.property));
                ok += 1;
            }
            None => no += 1,
        }
    }
    println!("{seeds} plants: {ok} enforceable, {no} not; largest game {largest} states; {:.2?}", t.elapsed());
}
