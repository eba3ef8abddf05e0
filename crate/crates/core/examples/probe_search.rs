use distoric::noise::HardwareParams;
use distoric::protocols::*;
use std::time::Instant;

fn main() {
    let config = SearchConfig {
        n_m: 4,
        k_m: 7,
        hardware: HardwareParams::near_term(),
        buffer_size: 5,
        shots: 48,
        seed: 11,
        compile: CompileConfig::default(),
        t_ghz: None,
    };
    let t0 = Instant::now();
    let mut cells = 0;
    let buffer = dynamic_search(&config, None, |key, cands| {
        cells += 1;
        eprintln!(
            "cell n={} k={} nodes={:?}: {} kept, best {:.4} [{:.1?}]",
            key.0, key.1, key.2.len(), cands.len(), cands[0].score, t0.elapsed()
        );
    })
    .unwrap();
    println!("--- k=7 ranking ---");
    for c in buffer.ranked(4, 7).iter().take(5) {
        println!("score {:.4} q {} {}", c.score, c.recipe.q, c.tree.encode());
    }
    println!("--- k=6 ranking ---");
    for c in buffer.ranked(4, 6).iter().take(3) {
        println!("score {:.4} q {} {}", c.score, c.recipe.q, c.tree.encode());
    }
    let septimum = builtin_tree("septimum").unwrap();
    let iso = buffer
        .ranked(4, 7)
        .iter()
        .position(|c| c.tree.isomorphic(&septimum));
    println!("septimum reconstruction found at rank {iso:?}");
    println!("total {:?}", t0.elapsed());
}
