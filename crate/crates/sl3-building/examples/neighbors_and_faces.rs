//! Local structure at a vertex: neighbor and face counts, and the directed
//! 3-cycle around every face.
//!
//! Run with `cargo run --example neighbors_and_faces`.

use sl3_building::{
    edge_orientation, faces_at_edge, faces_at_vertex, neighbors, DVRContext, LatticeClass, Mat3,
};

fn main() {
    for p in [2u64, 3, 5] {
        let ctx = DVRContext::new(p).unwrap();
        let q = ctx.q();
        let vertex = LatticeClass::from_mat(&ctx, Mat3::identity()).unwrap();

        let nbs = neighbors(&vertex);
        println!(
            "p = {p}: {} neighbors (expected 2(q^2+q+1) = {})",
            nbs.len(),
            2 * (q * q + q + 1)
        );

        let faces = faces_at_vertex(&vertex);
        println!(
            "p = {p}: {} faces at the vertex (expected (q^2+q+1)(q+1) = {})",
            faces.len(),
            (q * q + q + 1) * (q + 1)
        );

        let edge = edge_orientation(&vertex, faces[0].vertex(1)).unwrap();
        println!(
            "p = {p}: {} faces on one edge (expected q+1 = {})",
            faces_at_edge(&edge).len(),
            q + 1
        );
    }

    // around every face the directed edges close into a single cycle,
    // type 1 -> type 0 -> type 2 -> type 1
    let ctx = DVRContext::new(2).unwrap();
    let vertex = LatticeClass::from_mat(&ctx, Mat3::identity()).unwrap();
    let face = &faces_at_vertex(&vertex)[0];
    println!("\none face, vertices by type:");
    for t in 0..3u8 {
        println!("type {t}:\n{}\n", face.vertex(t));
    }
    for (from, to) in [(1u8, 0u8), (0, 2), (2, 1)] {
        let e = edge_orientation(face.vertex(from), face.vertex(to)).unwrap();
        assert_eq!(e.tail(), face.vertex(from));
        println!("edge: type {from} -> type {to}");
    }
    println!("orientation points around the face: ok");
}
