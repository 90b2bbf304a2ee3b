//! The amalgam factorization: every determinant-1 matrix is an exact product
//! of elements of the three standard vertex stabilizers.
//!
//! Run with `cargo run --example factor_matrix`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sl3_building::sampling::random_sl3;
use sl3_building::{
    factor_in_amalgam, in_stabilizer, multiply_word, DVRContext, GroupElement, Mat3,
};

fn main() {
    let ctx = DVRContext::new(2).unwrap();

    // an elementary matrix with a denominator lies in two stabilizers at
    // once and factors as a single letter
    let mut e13 = Mat3::identity();
    e13.set(0, 2, ctx.p_pow(-1));
    let e13 = GroupElement::new(e13).unwrap();
    let w = factor_in_amalgam(&ctx, &e13).unwrap();
    println!("E13(1/p) factors as {} letter(s):", w.len());
    for l in w.letters() {
        println!("  tag {}:\n{}", l.tag, l.element.mat());
    }

    // a random product of elementary matrices
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = random_sl3(&ctx, &mut rng, 6, 2);
    println!("\nfactoring:\n{}\n", g.mat());
    let w = factor_in_amalgam(&ctx, &g).unwrap();
    println!("word with {} letters, tags:", w.len());
    let tags: Vec<String> = w.letters().iter().map(|l| l.tag.to_string()).collect();
    println!("  {}", tags.join(" "));

    // the word multiplies back to g exactly, and every letter passes the
    // valuation-pattern membership test for its tag
    assert_eq!(multiply_word(&w), g);
    for l in w.letters() {
        assert!(in_stabilizer(&ctx, &l.element, l.tag).unwrap());
    }
    println!("product check and letter memberships: ok");

    println!("\nJSON wire format (first letter):");
    let json = w.to_json();
    let head: String = json.lines().take(8).collect::<Vec<_>>().join("\n");
    println!("{head}");
}
