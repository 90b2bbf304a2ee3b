//! Simple connectivity in action: contract a random closed loop to its
//! basepoint and verify the certificate.
//!
//! Run with `cargo run --example contract_loop`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sl3_building::homotopy::moves_to_json;
use sl3_building::sampling::random_loop;
use sl3_building::{contract_loop_traced, verify_moves, DVRContext};

fn main() {
    let ctx = DVRContext::new(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let lp = random_loop(&ctx, &mut rng, 8);
    println!("closed loop with {} edges", lp.len_edges());

    let (moves, trace) = contract_loop_traced(&lp).unwrap();
    println!("contracted in {} moves:", moves.len());
    for m in &moves {
        println!("  {m}");
    }

    println!("\nmeasure (length, critical index) per phase:");
    for m in &trace {
        println!("  ({}, {})", m.length, m.n_p);
    }
    assert!(trace.windows(2).all(|w| w[1] < w[0]));
    println!("strictly decreasing: ok");

    assert!(verify_moves(&lp, &moves));
    println!("certificate verifies: ok");

    // certificates serialize to JSON for external checking
    let json = moves_to_json(&moves);
    println!("\nfirst 160 bytes of the JSON certificate:");
    println!("{}", &json[..160.min(json.len())]);
}
