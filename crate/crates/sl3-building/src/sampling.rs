//! Seeded random generators for classes, walks, and group elements.
//!
//! Everything here is driven by a caller-supplied RNG, so CLI transcripts and
//! test runs are reproducible from a single seed.

use rand::Rng;

use crate::building::neighbors;
use crate::dvr::{scalar_from_i64, DVRContext};
use crate::group::GroupElement;
use crate::homotopy::EdgePath;
use crate::lattice::{LatticeClass, LatticeBasis};
use crate::mat::Mat3;

/// A random unimodular matrix: a short product of integer elementary
/// operations and column swaps.
pub fn random_unimodular(rng: &mut impl Rng) -> Mat3 {
    let mut m = Mat3::identity();
    for _ in 0..6 {
        let i = rng.gen_range(0..3);
        let mut j = rng.gen_range(0..3);
        while j == i {
            j = rng.gen_range(0..3);
        }
        let mut e = Mat3::identity();
        e.set(i, j, scalar_from_i64(rng.gen_range(-3i64..=3)));
        m = m.mul(&e);
        if rng.gen_bool(0.3) {
            let a = rng.gen_range(0..3);
            let mut b = rng.gen_range(0..3);
            while b == a {
                b = rng.gen_range(0..3);
            }
            m.swap_cols(a, b);
        }
    }
    m
}

/// A random class `[U diag(p^e0, p^e1, p^e2) V]` with exponents in
/// `[0, max_exp]` and unimodular `U`, `V`.
pub fn random_class(ctx: &DVRContext, rng: &mut impl Rng, max_exp: i64) -> LatticeClass {
    let u = random_unimodular(rng);
    let v = random_unimodular(rng);
    let d = Mat3::p_diag(
        ctx,
        rng.gen_range(0..=max_exp),
        rng.gen_range(0..=max_exp),
        rng.gen_range(0..=max_exp),
    );
    LatticeClass::from_mat(ctx, u.mul(&d).mul(&v)).expect("nonsingular")
}

/// A random determinant-1 element: a product of at most `letters` elementary
/// matrices whose off-diagonal entries are `c * p^e` with small `c` and
/// `e` in `[-max_val, max_val]`.
pub fn random_sl3(
    ctx: &DVRContext,
    rng: &mut impl Rng,
    letters: usize,
    max_val: i64,
) -> GroupElement {
    let mut m = Mat3::identity();
    for _ in 0..letters {
        let i = rng.gen_range(0..3);
        let mut j = rng.gen_range(0..3);
        while j == i {
            j = rng.gen_range(0..3);
        }
        let c = scalar_from_i64(rng.gen_range(1..=3i64) * if rng.gen_bool(0.5) { 1 } else { -1 });
        let e = rng.gen_range(-max_val..=max_val);
        let mut el = Mat3::identity();
        el.set(i, j, c * ctx.p_pow(e));
        m = m.mul(&el);
    }
    GroupElement::new(m).expect("elementary products are invertible")
}

/// A closed edge path: a random neighbor walk of `walk_len` steps from the
/// identity class, closed back to the basepoint along a shortest path.
pub fn random_loop(ctx: &DVRContext, rng: &mut impl Rng, walk_len: usize) -> EdgePath {
    let base = LatticeClass::from_mat(ctx, Mat3::identity()).expect("identity");
    let mut verts = vec![base.clone()];
    for _ in 0..walk_len {
        let cur = verts.last().expect("nonempty");
        let nbs = neighbors(cur);
        // avoid an immediate return to the previous vertex when possible
        let prev = verts.len().checked_sub(2).map(|i| verts[i].clone());
        let choices: Vec<&LatticeClass> = nbs
            .iter()
            .filter(|n| prev.as_ref() != Some(*n))
            .collect();
        let pick = choices[rng.gen_range(0..choices.len())].clone();
        verts.push(pick);
    }
    let last = verts.last().expect("nonempty").clone();
    if last != base {
        let back = crate::building::connecting_path(&last, &base);
        verts.extend(back.verts()[1..].iter().cloned());
    }
    EdgePath::try_new(verts).expect("walk edges are adjacent")
}

/// A random basis with bounded valuations, for parse and action tests.
pub fn random_basis(ctx: &DVRContext, rng: &mut impl Rng, max_exp: i64) -> LatticeBasis {
    let u = random_unimodular(rng);
    let v = random_unimodular(rng);
    let d = Mat3::p_diag(
        ctx,
        rng.gen_range(-max_exp..=max_exp),
        rng.gen_range(-max_exp..=max_exp),
        rng.gen_range(-max_exp..=max_exp),
    );
    LatticeBasis::new(u.mul(&d).mul(&v)).expect("nonsingular")
}
