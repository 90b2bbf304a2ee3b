//! A bounded, deterministic property suite for the `selftest` subcommand.
//!
//! Runs the core invariants at small sizes for the primes 2 and 3, printing
//! one line per property.  Returns the first failing property by name.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::building::{
    classify_step, connecting_path, edge_orientation, faces_at_edge, faces_at_vertex, neighbors,
};
use crate::dvr::DVRContext;
use crate::group::{
    act, alpha, beta, factor_in_amalgam, in_intersection, in_stabilizer, map_face_to_face,
    multiply_word, standard_face, Intersection, SubgroupTag,
};
use crate::homotopy::{contract_loop_traced, verify_moves};
use crate::lattice::{distance, LatticeClass};
use crate::mat::Mat3;
use crate::sampling::{random_class, random_loop, random_sl3};

type PropResult = std::result::Result<(), String>;

fn prop(
    out: &mut String,
    failed: &mut Option<String>,
    name: &str,
    body: impl FnOnce() -> PropResult,
) {
    if failed.is_some() {
        return;
    }
    match body() {
        Ok(()) => {
            let _ = writeln!(out, "ok {name}");
        }
        Err(msg) => {
            let _ = writeln!(out, "FAIL {name}: {msg}");
            *failed = Some(name.to_string());
        }
    }
}

fn check(cond: bool, msg: &str) -> PropResult {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

/// Runs the suite; on failure returns the name of the first failing
/// property.  The transcript is appended to `out` and is a deterministic
/// function of the seed.
pub fn run(seed: u64, out: &mut String) -> std::result::Result<(), String> {
    let mut failed = None;
    for p in [2u64, 3] {
        let ctx = DVRContext::new(p).expect("prime");
        let q = ctx.q();
        let ident = LatticeClass::from_mat(&ctx, Mat3::identity()).expect("identity");

        prop(out, &mut failed, &format!("p{p}.distance-axioms"), || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd15 ^ p);
            for _ in 0..25 {
                let x = random_class(&ctx, &mut rng, 4);
                let y = random_class(&ctx, &mut rng, 4);
                let d = distance(&x, &y);
                check(d == distance(&y, &x), "distance must be symmetric")?;
                check((d == 0) == (x == y), "distance separates classes")?;
            }
            Ok(())
        });

        prop(out, &mut failed, &format!("p{p}.neighbor-count"), || {
            let nbs = neighbors(&ident);
            let expected = (2 * (q * q + q + 1)) as usize;
            check(nbs.len() == expected, "neighbor count")?;
            check(
                nbs.iter().all(|n| distance(&ident, n) == 1),
                "neighbors at distance 1",
            )
        });

        prop(out, &mut failed, &format!("p{p}.face-counts"), || {
            let fv = faces_at_vertex(&ident);
            check(fv.len() == ((q * q + q + 1) * (q + 1)) as usize, "faces at vertex")?;
            let e = edge_orientation(&ident, fv[0].vertex(1))
                .map_err(|e| e.to_string())?;
            check(faces_at_edge(&e).len() == (q + 1) as usize, "faces at edge")
        });

        prop(out, &mut failed, &format!("p{p}.orientation-cycles"), || {
            for f in faces_at_vertex(&ident) {
                let v = f.verts();
                for (from, to) in [(1usize, 0usize), (0, 2), (2, 1)] {
                    let e = edge_orientation(&v[from], &v[to]).map_err(|e| e.to_string())?;
                    check(e.tail() == &v[from] && e.head() == &v[to], "cycle direction")?;
                }
            }
            Ok(())
        });

        prop(out, &mut failed, &format!("p{p}.connecting-paths"), || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xcafe ^ p);
            for _ in 0..10 {
                let x = random_class(&ctx, &mut rng, 4);
                let y = random_class(&ctx, &mut rng, 4);
                let path = connecting_path(&x, &y);
                check(
                    path.len_edges() as i64 == distance(&x, &y),
                    "path length equals distance",
                )?;
            }
            Ok(())
        });

        prop(out, &mut failed, &format!("p{p}.step-classifier"), || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x57e9 ^ p);
            for _ in 0..3 {
                let l = random_class(&ctx, &mut rng, 3);
                let m = loop {
                    let m = random_class(&ctx, &mut rng, 3);
                    if (1..=3).contains(&distance(&l, &m)) {
                        break m;
                    }
                };
                for n in neighbors(&m) {
                    let (_, predicted) = classify_step(&l, &m, &n).map_err(|e| e.to_string())?;
                    check(predicted == distance(&l, &n), "classifier predicts distance")?;
                }
            }
            Ok(())
        });

        prop(out, &mut failed, &format!("p{p}.loop-contraction"), || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x100b ^ p);
            let loops = if p == 2 { 4 } else { 2 };
            for _ in 0..loops {
                let lp = random_loop(&ctx, &mut rng, 6);
                let (moves, trace) = contract_loop_traced(&lp).map_err(|e| e.to_string())?;
                check(verify_moves(&lp, &moves), "certificate verifies")?;
                check(
                    trace.windows(2).all(|w| w[1] < w[0]),
                    "measure strictly decreases",
                )?;
            }
            Ok(())
        });

        prop(out, &mut failed, &format!("p{p}.action-invariance"), || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xac7 ^ p);
            let a = alpha(&ctx);
            let b = beta(&ctx);
            for _ in 0..10 {
                let g = random_sl3(&ctx, &mut rng, 4, 1);
                let x = random_class(&ctx, &mut rng, 3);
                let y = random_class(&ctx, &mut rng, 3);
                check(
                    distance(&act(&g, &x), &act(&g, &y)) == distance(&x, &y),
                    "action is an isometry",
                )?;
                check(
                    act(&g, &x).vertex_type() == x.vertex_type(),
                    "determinant-1 action preserves type",
                )?;
                check(
                    act(&a, &x).vertex_type() == (x.vertex_type() + 1) % 3,
                    "alpha shifts type by one",
                )?;
                check(
                    act(&b, &x).vertex_type() == (x.vertex_type() + 2) % 3,
                    "beta shifts type by two",
                )?;
            }
            Ok(())
        });

        prop(out, &mut failed, &format!("p{p}.stabilizer-patterns"), || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x57ab ^ p);
            let f0 = standard_face(&ctx);
            for _ in 0..20 {
                let g = random_sl3(&ctx, &mut rng, 4, 1);
                for (tag, vt) in [
                    (SubgroupTag::G1, 0u8),
                    (SubgroupTag::G2, 1),
                    (SubgroupTag::G3, 2),
                ] {
                    let by_pattern = in_stabilizer(&ctx, &g, tag).map_err(|e| e.to_string())?;
                    let by_action = act(&g, f0.vertex(vt)) == *f0.vertex(vt);
                    check(by_pattern == by_action, "pattern matches fixed vertex")?;
                }
                let g1 = in_stabilizer(&ctx, &g, SubgroupTag::G1).map_err(|e| e.to_string())?;
                let g2 = in_stabilizer(&ctx, &g, SubgroupTag::G2).map_err(|e| e.to_string())?;
                let both = in_intersection(&ctx, &g, Intersection::G12).map_err(|e| e.to_string())?;
                check(both == (g1 && g2), "intersection is the conjunction")?;
            }
            Ok(())
        });

        prop(out, &mut failed, &format!("p{p}.face-transitivity"), || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xface ^ p);
            let f0 = standard_face(&ctx);
            for _ in 0..5 {
                let g = random_sl3(&ctx, &mut rng, 4, 1);
                let target = crate::group::act_on_face(&g, &f0);
                let phi = map_face_to_face(&f0, &target);
                check(phi.is_unimodular(), "face map has determinant 1")?;
                check(
                    crate::group::act_on_face(&phi, &f0) == target,
                    "face map carries the face",
                )?;
            }
            Ok(())
        });

        prop(out, &mut failed, &format!("p{p}.amalgam-roundtrip"), || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa3a ^ p);
            let count = if p == 2 { 5 } else { 2 };
            for _ in 0..count {
                let g = random_sl3(&ctx, &mut rng, 4, 1);
                let w = factor_in_amalgam(&ctx, &g).map_err(|e| e.to_string())?;
                check(multiply_word(&w) == g, "word multiplies back")?;
                for l in w.letters() {
                    check(
                        in_stabilizer(&ctx, &l.element, l.tag).map_err(|e| e.to_string())?,
                        "letter passes its tag",
                    )?;
                }
            }
            Ok(())
        });
    }
    match failed {
        None => Ok(()),
        Some(name) => Err(name),
    }
}
