//! Shortest paths in the complex: any two classes are joined by a path of
//! length exactly their distance.
//!
//! Run with `cargo run --example connecting_path`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sl3_building::sampling::random_class;
use sl3_building::{connecting_path, distance, is_adjacent, DVRContext, LatticeClass, Mat3};

fn main() {
    let ctx = DVRContext::new(2).unwrap();

    // the interpolation shrinks both leading exponents together, then the
    // first alone
    let from = LatticeClass::from_mat(&ctx, Mat3::identity()).unwrap();
    let to = LatticeClass::from_mat(&ctx, Mat3::p_diag(&ctx, 3, 1, 0)).unwrap();
    let path = connecting_path(&from, &to);
    println!(
        "distance {} realized by a path with {} edges:",
        distance(&from, &to),
        path.len_edges()
    );
    for (i, v) in path.verts().iter().enumerate() {
        println!(
            "step {i}: distance {} from the start, {} to the end",
            distance(&from, v),
            distance(v, &to)
        );
    }

    // random pairs
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        let x = random_class(&ctx, &mut rng, 5);
        let y = random_class(&ctx, &mut rng, 5);
        let p = connecting_path(&x, &y);
        assert_eq!(p.len_edges() as i64, distance(&x, &y));
        assert!(p.verts().windows(2).all(|w| is_adjacent(&w[0], &w[1])));
        println!(
            "random pair at distance {}: path of {} edges, all adjacent",
            distance(&x, &y),
            p.len_edges()
        );
    }
}
