//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its runtime.  Run with `cargo test --test acceptance -- --nocapture` to
//! see the lines.

use std::collections::HashSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sl3_building::group::act_on_face;
use sl3_building::sampling::{random_class, random_loop, random_sl3, random_unimodular};
use sl3_building::{
    act, alpha, beta, check_without_inversion, classify_step, connecting_path,
    contract_loop_traced, distance, edge_orientation, faces_at_edge, faces_at_vertex,
    factor_in_amalgam, in_intersection, in_stabilizer, is_adjacent, map_face_to_face,
    multiply_word, neighbors, standard_face, tight_fit, verify_moves, DVRContext, GroupElement,
    Intersection, LatticeBasis, LatticeClass, Mat3, SubgroupTag,
};

fn ctx(p: u64) -> DVRContext {
    DVRContext::new(p).unwrap()
}

fn ident(c: &DVRContext) -> LatticeClass {
    LatticeClass::from_mat(c, Mat3::identity()).unwrap()
}

fn contains(c: &DVRContext, outer: &LatticeBasis, inner: &LatticeBasis) -> bool {
    outer
        .mat()
        .inverse()
        .unwrap()
        .mul(inner.mat())
        .is_integral(c)
}

fn same_lattice(c: &DVRContext, a: &LatticeBasis, b: &LatticeBasis) -> bool {
    contains(c, a, b) && contains(c, b, a)
}

fn report(criterion: usize, name: &str, started: Instant, limit_s: f64, detail: &str) {
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed < limit_s,
        "criterion {criterion} ({name}): FAIL - exceeded {limit_s} s budget ({elapsed:.2} s)"
    );
    println!("criterion {criterion} ({name}): PASS - {detail} ({elapsed:.2} s)");
}

#[test]
fn criterion_01_distance_axioms() {
    let started = Instant::now();
    let mut checked = 0usize;
    for p in [2u64, 3] {
        let c = ctx(p);
        let mut rng = ChaCha8Rng::seed_from_u64(1001 + p);
        for _ in 0..100 {
            let x = random_class(&c, &mut rng, 5);
            let y = random_class(&c, &mut rng, 5);
            let d = distance(&x, &y);
            assert_eq!(d, distance(&y, &x), "distance must be symmetric");
            assert_eq!(d == 0, x == y, "distance vanishes exactly on equality");
            // d = 1 iff p L properly inside tight representative properly inside L
            let (_, m) = tight_fit(&c, x.canon(), y.canon());
            let pl = x.canon().scaled(&c, 1);
            let proper = contains(&c, &m, &pl)
                && !same_lattice(&c, &m, &pl)
                && !same_lattice(&c, &m, x.canon());
            assert_eq!(d == 1, proper, "distance one is the proper sandwich");
            checked += 1;
        }
    }
    report(1, "distance axioms", started, 10.0, &format!("{checked} random pairs"));
}

#[test]
fn criterion_02_local_counts() {
    let started = Instant::now();
    for (p, nb, fv, fe) in [(2u64, 14usize, 21usize, 3usize), (3, 26, 52, 4)] {
        let c = ctx(p);
        let i = ident(&c);
        let nbs = neighbors(&i);
        assert_eq!(nbs.len(), nb, "neighbor count at p={p}");
        assert_eq!(
            nbs.iter().collect::<HashSet<_>>().len(),
            nb,
            "neighbors distinct at p={p}"
        );
        let faces = faces_at_vertex(&i);
        assert_eq!(faces.len(), fv, "face count at p={p}");
        assert_eq!(
            faces.iter().collect::<HashSet<_>>().len(),
            fv,
            "faces distinct at p={p}"
        );
        let e = edge_orientation(&i, faces[0].vertex(1)).unwrap();
        let ef = faces_at_edge(&e);
        assert_eq!(ef.len(), fe, "faces at edge at p={p}");
        assert_eq!(
            ef.iter().collect::<HashSet<_>>().len(),
            fe,
            "edge faces distinct at p={p}"
        );
    }
    report(2, "local counts", started, 5.0, "14/21/3 at p=2 and 26/52/4 at p=3");
}

#[test]
fn criterion_03_orientation_cycles() {
    let started = Instant::now();
    let mut total = 0usize;
    for p in [2u64, 3] {
        let c = ctx(p);
        let i = ident(&c);
        for f in faces_at_vertex(&i) {
            let v = f.verts();
            // the directed edges close into the single cycle
            // type 1 -> type 0 -> type 2 -> type 1
            for (from, to) in [(1usize, 0usize), (0, 2), (2, 1)] {
                let e = edge_orientation(&v[from], &v[to]).unwrap();
                assert_eq!(e.tail(), &v[from], "tail in face cycle");
                assert_eq!(e.head(), &v[to], "head in face cycle");
            }
            total += 1;
        }
    }
    report(3, "orientation cycles", started, 30.0, &format!("{total} faces, zero exceptions"));
}

#[test]
fn criterion_04_step_table() {
    let started = Instant::now();
    let mut checked = 0usize;
    for p in [2u64, 3] {
        let c = ctx(p);
        let mut rng = ChaCha8Rng::seed_from_u64(4004 + p);
        for _ in 0..25 {
            let l = random_class(&c, &mut rng, 4);
            let m = loop {
                let m = random_class(&c, &mut rng, 4);
                if (1..=4).contains(&distance(&l, &m)) {
                    break m;
                }
            };
            let a = distance(&l, &m);
            for n in neighbors(&m) {
                let (_, predicted) = classify_step(&l, &m, &n).unwrap();
                assert!(
                    (a - 1..=a + 1).contains(&predicted),
                    "prediction stays within one of a"
                );
                assert_eq!(predicted, distance(&l, &n), "prediction equals the distance");
                checked += 1;
            }
        }
    }
    report(4, "step table", started, 60.0, &format!("{checked} neighbor steps, zero tolerance"));
}

#[test]
fn criterion_05_connectivity() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5005);
    for k in 0..100 {
        let p = if k % 2 == 0 { 2 } else { 3 };
        let c = ctx(p);
        let x = random_class(&c, &mut rng, 5);
        let y = random_class(&c, &mut rng, 5);
        let path = connecting_path(&x, &y);
        assert_eq!(
            path.len_edges() as i64,
            distance(&x, &y),
            "path length equals the distance"
        );
        for w in path.verts().windows(2) {
            assert!(is_adjacent(&w[0], &w[1]), "consecutive path classes adjacent");
        }
    }
    report(5, "connectivity", started, 60.0, "100 shortest paths");
}

#[test]
fn criterion_06_simple_connectivity() {
    let started = Instant::now();
    let c = ctx(2);
    let mut rng = ChaCha8Rng::seed_from_u64(6006);
    let mut moves_total = 0usize;
    for k in 0..100 {
        let walk = 3 + (k % 10); // walk lengths 3..=12
        let lp = random_loop(&c, &mut rng, walk);
        // contract_loop fails loudly if a branch the analysis excludes is
        // ever entered or the measure fails to decrease
        let (moves, trace) = contract_loop_traced(&lp).unwrap();
        assert!(verify_moves(&lp, &moves), "certificate verifies");
        for w in trace.windows(2) {
            assert!(w[1] < w[0], "the (length, critical index) measure decreases");
        }
        moves_total += moves.len();
    }
    report(
        6,
        "simple connectivity",
        started,
        300.0,
        &format!("100 loops contracted, {moves_total} moves total"),
    );
}

#[test]
fn criterion_07_action_and_type() {
    let started = Instant::now();
    let c = ctx(2);
    let mut rng = ChaCha8Rng::seed_from_u64(7007);
    let a = alpha(&c);
    let b = beta(&c);
    for _ in 0..100 {
        let g = random_sl3(&c, &mut rng, 5, 2);
        let x = random_class(&c, &mut rng, 3);
        let y = random_class(&c, &mut rng, 3);
        assert_eq!(
            distance(&act(&g, &x), &act(&g, &y)),
            distance(&x, &y),
            "action preserves distance"
        );
        let gx = act(&g, &x);
        assert_eq!(gx.vertex_type(), x.vertex_type(), "action preserves type");
        assert_eq!(act(&a, &x).vertex_type(), (x.vertex_type() + 1) % 3);
        assert_eq!(act(&b, &x).vertex_type(), (x.vertex_type() + 2) % 3);
        // without inversion: the image is never a different vertex of a
        // common face, i.e. never adjacent to x
        if gx != x {
            assert_ne!(distance(&x, &gx), 1, "no move to a face-mate");
        }
    }
    // search form: elements preserving the standard face fix it pointwise
    let f0 = standard_face(&c);
    let mut preserved = 0;
    for _ in 0..200 {
        let s0 = random_sl3(&c, &mut rng, 2, 0);
        let s1 = a.mul(&random_sl3(&c, &mut rng, 2, 0)).mul(&a.inverse());
        let g = s0.mul(&s1);
        if act_on_face(&g, &f0) == f0 {
            preserved += 1;
            assert!(check_without_inversion(&g, &f0).unwrap());
        }
    }
    report(
        7,
        "action and type",
        started,
        120.0,
        &format!("100 elements, {preserved} face-preserving products all inversion-free"),
    );
}

#[test]
fn criterion_08_face_transitivity() {
    let started = Instant::now();
    let c = ctx(2);
    let f0 = standard_face(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(8008);
    for _ in 0..50 {
        let mut gl = || {
            GroupElement::new(random_unimodular(&mut rng).mul(&Mat3::p_diag(
                &c,
                rng.gen_range(-1..=1),
                rng.gen_range(-1..=1),
                rng.gen_range(-1..=1),
            )))
            .unwrap()
        };
        let f = act_on_face(&gl(), &f0);
        let g = act_on_face(&gl(), &f0);
        let phi = map_face_to_face(&f, &g);
        assert!(phi.is_unimodular(), "face map has determinant exactly 1");
        assert_eq!(act_on_face(&phi, &f), g, "face map carries f onto g");
        for t in 0..3u8 {
            assert_eq!(
                act(&phi, f.vertex(t)),
                *g.vertex(t),
                "vertex matching is type-preserving"
            );
        }
    }
    report(8, "face transitivity", started, 120.0, "50 random face pairs");
}

#[test]
fn criterion_09_stabilizers() {
    let started = Instant::now();
    let c = ctx(2);
    let f0 = standard_face(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(9009);
    let a = alpha(&c);
    let b = beta(&c);
    for k in 0..200 {
        let base = random_sl3(&c, &mut rng, 4, if k % 2 == 0 { 0 } else { 2 });
        let g = match k % 4 {
            0 => base,
            1 => a.mul(&base).mul(&a.inverse()),
            2 => b.mul(&base).mul(&b.inverse()),
            _ => base,
        };
        let mut by_pattern = [false; 3];
        for (idx, (tag, vt)) in [
            (SubgroupTag::G1, 0u8),
            (SubgroupTag::G2, 1),
            (SubgroupTag::G3, 2),
        ]
        .into_iter()
        .enumerate()
        {
            let pat = in_stabilizer(&c, &g, tag).unwrap();
            let action = act(&g, f0.vertex(vt)) == *f0.vertex(vt);
            assert_eq!(pat, action, "pattern equals fixed-vertex action");
            by_pattern[idx] = pat;
        }
        let [g1, g2, g3] = by_pattern;
        assert_eq!(in_intersection(&c, &g, Intersection::G12).unwrap(), g1 && g2);
        assert_eq!(in_intersection(&c, &g, Intersection::G13).unwrap(), g1 && g3);
        assert_eq!(in_intersection(&c, &g, Intersection::G23).unwrap(), g2 && g3);
        assert_eq!(
            in_intersection(&c, &g, Intersection::G123).unwrap(),
            g1 && g2 && g3
        );
    }
    report(9, "stabilizers", started, 60.0, "200 elements, patterns = actions");
}

#[test]
fn criterion_10_amalgam_factorization() {
    let started = Instant::now();
    let c = ctx(2);
    let mut rng = ChaCha8Rng::seed_from_u64(10010);
    let mut max_letters = 0usize;
    for k in 0..100 {
        let letters = 1 + (k % 8);
        let g = random_sl3(&c, &mut rng, letters, 2);
        let w = factor_in_amalgam(&c, &g).unwrap();
        assert_eq!(multiply_word(&w), g, "word multiplies back exactly");
        for l in w.letters() {
            assert!(
                in_stabilizer(&c, &l.element, l.tag).unwrap(),
                "letter passes its tagged membership"
            );
        }
        max_letters = max_letters.max(w.len());
    }
    report(
        10,
        "amalgam factorization",
        started,
        300.0,
        &format!("100 elements, longest word {max_letters} letters"),
    );
}
