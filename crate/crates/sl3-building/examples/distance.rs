//! Distance between lattice classes: tight-fitting scaling and adapted
//! bases.
//!
//! Run with `cargo run --example distance`.

use sl3_building::{adapted_bases, tight_fit, DVRContext, LatticeClass, Mat3};

fn main() {
    let ctx = DVRContext::new(2).unwrap();

    let ident = LatticeClass::from_mat(&ctx, Mat3::identity()).unwrap();
    let other = LatticeClass::from_mat(
        &ctx,
        Mat3::parse_text("4 0 0\n6 2 0\n5 1 1").unwrap(),
    )
    .unwrap();

    println!("class of the identity frame:\n{ident}\n");
    println!("class of a skewed frame:\n{other}\n");

    let d = ident.distance(&other);
    println!("distance: {d}");
    assert_eq!(d, other.distance(&ident), "distance is symmetric");

    // the adapted basis exposes both elementary divisor exponents
    let (n, tight) = tight_fit(&ctx, ident.canon(), other.canon());
    let (frame, divisors) = adapted_bases(&ctx, ident.canon(), &tight).unwrap();
    println!("tight-fitting scaling exponent: {n}");
    println!("elementary divisor exponents: a = {}, b = {}", divisors.a, divisors.b);
    println!("adapted frame (columns):\n{}", frame.mat());

    // scaling a basis by any power of p does not change its class
    let scaled = LatticeClass::from_mat(&ctx, Mat3::identity().scale(&ctx.p_pow(3))).unwrap();
    assert_eq!(ident, scaled);
    println!("\nscaling by p^3 preserves the class: ok");
}
