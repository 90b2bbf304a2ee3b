//! Local structure of the class complex.
//!
//! Neighbors of a vertex correspond to proper nontrivial subspaces of the
//! rank-3 residue space of a representative lattice; faces at a vertex
//! correspond to complete flags.  Edges carry a direction determined by the
//! rank of the residue image, and around every face the directed edges close
//! into a single 3-cycle.  This module also builds shortest connecting paths
//! and classifies how the distance to a fixed base class changes along one
//! edge, which drives the loop contraction in [`crate::homotopy`].

use crate::dvr::{DVRContext, ResidueScalar, Scalar};
use crate::homotopy::EdgePath;
use crate::lattice::{
    adapted_bases, canonical_class, distance, hnf_columns, lattice_contains, tight_fit,
    LatticeBasis, LatticeClass,
};
use crate::mat::Mat3;
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// residue linear algebra
// ---------------------------------------------------------------------------

/// A subspace of the residue space `k^3`, stored with its reduced-echelon
/// basis so that equal subspaces compare equal structurally.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueSubspace {
    p: u64,
    dim: usize,
    basis: Vec<[ResidueScalar; 3]>,
}

impl ResidueSubspace {
    /// Builds the span of arbitrary generators and canonicalizes it.
    pub fn span(ctx: &DVRContext, generators: &[[u64; 3]]) -> ResidueSubspace {
        let p = ctx.prime();
        let rows = rref(generators, p);
        ResidueSubspace {
            p,
            dim: rows.len(),
            basis: rows
                .iter()
                .map(|r| std::array::from_fn(|i| ResidueScalar::new(r[i], p)))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[[ResidueScalar; 3]] {
        &self.basis
    }

    pub(crate) fn basis_raw(&self) -> Vec<[u64; 3]> {
        self.basis
            .iter()
            .map(|r| std::array::from_fn(|i| r[i].rep()))
            .collect()
    }

    pub fn contains_vector(&self, v: &[u64; 3]) -> bool {
        let mut rows = self.basis_raw();
        rows.push(*v);
        rref(&rows, self.p).len() == self.dim
    }

    pub fn contains(&self, other: &ResidueSubspace) -> bool {
        other.basis_raw().iter().all(|v| self.contains_vector(v))
    }
}

fn addm(a: u64, b: u64, p: u64) -> u64 {
    (a + b) % p
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn negm(a: u64, p: u64) -> u64 {
    (p - a % p) % p
}

fn invm(a: u64, p: u64) -> u64 {
    ResidueScalar::new(a, p).inv().expect("nonzero").rep()
}

/// Reduced row echelon form over `F_p`; returns the nonzero rows.
pub(crate) fn rref(rows: &[[u64; 3]], p: u64) -> Vec<[u64; 3]> {
    let mut m: Vec<[u64; 3]> = rows.iter().map(|r| r.map(|x| x % p)).collect();
    let mut pivot_row = 0usize;
    for col in 0..3 {
        let Some(r) = (pivot_row..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(pivot_row, r);
        let inv = invm(m[pivot_row][col], p);
        for x in m[pivot_row].iter_mut() {
            *x = mulm(*x, inv, p);
        }
        for r2 in 0..m.len() {
            if r2 != pivot_row && m[r2][col] != 0 {
                let f = m[r2][col];
                for c2 in 0..3 {
                    let sub = mulm(f, m[pivot_row][c2], p);
                    m[r2][c2] = addm(m[r2][c2], negm(sub, p), p);
                }
            }
        }
        pivot_row += 1;
        if pivot_row == m.len() {
            break;
        }
    }
    m.truncate(pivot_row);
    m
}

/// All subspaces of `k^3` of the given dimension (1 or 2), each exactly once,
/// in a fixed enumeration order.  There are `q^2 + q + 1` of either kind.
pub fn subspaces(ctx: &DVRContext, dim: usize) -> Vec<ResidueSubspace> {
    assert!(dim == 1 || dim == 2, "dim must be 1 or 2");
    let p = ctx.prime();
    let mut out = Vec::new();
    match dim {
        1 => {
            for x in 0..p {
                for y in 0..p {
                    out.push(ResidueSubspace::span(ctx, &[[1, x, y]]));
                }
            }
            for z in 0..p {
                out.push(ResidueSubspace::span(ctx, &[[0, 1, z]]));
            }
            out.push(ResidueSubspace::span(ctx, &[[0, 0, 1]]));
        }
        2 => {
            for a in 0..p {
                for b in 0..p {
                    out.push(ResidueSubspace::span(ctx, &[[1, 0, a], [0, 1, b]]));
                }
            }
            for a in 0..p {
                out.push(ResidueSubspace::span(ctx, &[[1, a, 0], [0, 0, 1]]));
            }
            out.push(ResidueSubspace::span(ctx, &[[0, 1, 0], [0, 0, 1]]));
        }
        _ => unreachable!(),
    }
    out
}

/// The lines contained in a plane, via the projective parametrization of the
/// plane's basis.
pub(crate) fn lines_in_plane(ctx: &DVRContext, plane: &ResidueSubspace) -> Vec<ResidueSubspace> {
    assert_eq!(plane.dim(), 2);
    let p = ctx.prime();
    let b = plane.basis_raw();
    let mut out = Vec::new();
    for t in 0..p {
        let v: [u64; 3] = std::array::from_fn(|i| addm(b[0][i], mulm(t, b[1][i], p), p));
        out.push(ResidueSubspace::span(ctx, &[v]));
    }
    out.push(ResidueSubspace::span(ctx, &[b[1]]));
    out
}

/// The planes containing a line.
pub(crate) fn planes_containing(ctx: &DVRContext, line: &ResidueSubspace) -> Vec<ResidueSubspace> {
    assert_eq!(line.dim(), 1);
    subspaces(ctx, 2)
        .into_iter()
        .filter(|pl| pl.contains(line))
        .collect()
}

/// The intersection line of two distinct planes.
pub(crate) fn intersect_planes(
    ctx: &DVRContext,
    p1: &ResidueSubspace,
    p2: &ResidueSubspace,
) -> ResidueSubspace {
    assert_eq!(p1.dim(), 2);
    assert_eq!(p2.dim(), 2);
    assert_ne!(p1, p2);
    let p = ctx.prime();
    // scan p1's projective line for a vector lying in p2
    for line in lines_in_plane(ctx, p1) {
        if p2.contains(&line) {
            return line;
        }
    }
    unreachable!("two distinct planes of k^3 meet in a line; p={p}")
}

/// The plane spanned by two distinct lines.
pub(crate) fn span_lines(
    ctx: &DVRContext,
    l1: &ResidueSubspace,
    l2: &ResidueSubspace,
) -> ResidueSubspace {
    assert_eq!(l1.dim(), 1);
    assert_eq!(l2.dim(), 1);
    assert_ne!(l1, l2);
    let mut gens = l1.basis_raw();
    gens.extend(l2.basis_raw());
    let s = ResidueSubspace::span(ctx, &gens);
    assert_eq!(s.dim(), 2);
    s
}

// ---------------------------------------------------------------------------
// lifting between residue subspaces and sublattices
// ---------------------------------------------------------------------------

/// The sublattice `W + pL` of `L` determined by a residue subspace `W`,
/// lifted with integer coefficients in `[0, p)`.
pub(crate) fn lift_subspace(
    ctx: &DVRContext,
    l: &LatticeBasis,
    w: &ResidueSubspace,
) -> LatticeBasis {
    let mut cols: Vec<[Scalar; 3]> = Vec::new();
    for v in w.basis_raw() {
        let coeffs: [Scalar; 3] =
            std::array::from_fn(|i| ctx.lift(ResidueScalar::new(v[i], ctx.prime())));
        cols.push(l.mat().mul_vec(&coeffs));
    }
    let pl = l.mat().scale(&ctx.p_pow(1));
    for j in 0..3 {
        cols.push(pl.col(j));
    }
    let m = hnf_columns(ctx, cols).expect("full lattice");
    LatticeBasis::new(m).expect("nonsingular")
}

/// The residue image in `L / pL` of a sublattice `inner` of `L`.
/// `inner` must be contained in `L`.
pub(crate) fn residue_image(
    ctx: &DVRContext,
    l: &LatticeBasis,
    inner: &LatticeBasis,
) -> ResidueSubspace {
    let c = l.mat().inverse().expect("nonsingular").mul(inner.mat());
    let r = c.residue(ctx).expect("inner lattice is contained in l");
    let cols: Vec<[u64; 3]> = (0..3).map(|j| std::array::from_fn(|i| r[i][j])).collect();
    ResidueSubspace::span(ctx, &cols)
}

// ---------------------------------------------------------------------------
// edges and faces
// ---------------------------------------------------------------------------

/// A directed edge of the complex.  The direction follows the rank rule: with
/// the head tight-fitting inside the tail, the residue image has rank 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    tail: LatticeClass,
    head: LatticeClass,
}

impl Edge {
    pub fn tail(&self) -> &LatticeClass {
        &self.tail
    }

    pub fn head(&self) -> &LatticeClass {
        &self.head
    }

    pub fn endpoints(&self) -> [&LatticeClass; 2] {
        [&self.tail, &self.head]
    }
}

/// True exactly when the classes are at distance 1.
pub fn is_adjacent(c1: &LatticeClass, c2: &LatticeClass) -> bool {
    distance(c1, c2) == 1
}

/// The directed edge on an adjacent pair.  Independent of argument order.
pub fn edge_orientation(c1: &LatticeClass, c2: &LatticeClass) -> Result<Edge> {
    if !is_adjacent(c1, c2) {
        return Err(Error::NotAdjacent);
    }
    let ctx = c1.ctx();
    let (_, m) = tight_fit(ctx, c1.canon(), c2.canon());
    let image = residue_image(ctx, c1.canon(), &m);
    match image.dim() {
        1 => Ok(Edge {
            tail: c1.clone(),
            head: c2.clone(),
        }),
        2 => Ok(Edge {
            tail: c2.clone(),
            head: c1.clone(),
        }),
        d => unreachable!("adjacent classes have residue image of rank 1 or 2, got {d}"),
    }
}

/// A face: three pairwise-adjacent classes, stored by vertex type so that
/// `verts()[t]` has type `t`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face {
    verts: [LatticeClass; 3],
}

impl Face {
    /// Validates pairwise adjacency and the type partition, then stores the
    /// vertices in type order.
    pub fn try_new(a: LatticeClass, b: LatticeClass, c: LatticeClass) -> Result<Face> {
        if !is_face(&a, &b, &c) {
            return Err(Error::NotAFace);
        }
        Ok(Face::from_verts_unchecked([a, b, c]))
    }

    /// Slots vertices by type without validation; used when decoding
    /// untrusted certificates, which are re-validated at verification time.
    pub(crate) fn from_verts_unchecked(mut verts: [LatticeClass; 3]) -> Face {
        verts.sort_by(|x, y| {
            x.vertex_type()
                .cmp(&y.vertex_type())
                .then_with(|| x.cmp(y))
        });
        Face { verts }
    }

    pub fn verts(&self) -> &[LatticeClass; 3] {
        &self.verts
    }

    /// The vertex in the given type slot.
    pub fn vertex(&self, t: u8) -> &LatticeClass {
        &self.verts[t as usize]
    }

    pub fn contains(&self, c: &LatticeClass) -> bool {
        self.verts.iter().any(|v| v == c)
    }

    /// True when the face's three vertices really are pairwise adjacent with
    /// one vertex of each type.
    pub fn is_valid(&self) -> bool {
        is_face(&self.verts[0], &self.verts[1], &self.verts[2])
    }

    /// The two vertices shared with another face, if they share an edge.
    pub fn shared_edge_verts(&self, other: &Face) -> Option<[LatticeClass; 2]> {
        let shared: Vec<&LatticeClass> =
            self.verts.iter().filter(|v| other.contains(v)).collect();
        if shared.len() == 2 {
            Some([shared[0].clone(), shared[1].clone()])
        } else {
            None
        }
    }
}

/// True exactly when the three classes are distinct and pairwise at
/// distance 1.  When true, the tight-fitting representatives of the last two
/// inside the first are nested one inside the other; this is asserted.
pub fn is_face(c1: &LatticeClass, c2: &LatticeClass, c3: &LatticeClass) -> bool {
    if c1 == c2 || c1 == c3 || c2 == c3 {
        return false;
    }
    if distance(c1, c2) != 1 || distance(c1, c3) != 1 || distance(c2, c3) != 1 {
        return false;
    }
    let ctx = c1.ctx();
    let (_, m2) = tight_fit(ctx, c1.canon(), c2.canon());
    let (_, m3) = tight_fit(ctx, c1.canon(), c3.canon());
    let nested = lattice_contains(ctx, &m2, &m3) || lattice_contains(ctx, &m3, &m2);
    assert!(
        nested,
        "pairwise-adjacent tight representatives must be nested"
    );
    let types: std::collections::BTreeSet<u8> =
        [c1, c2, c3].iter().map(|c| c.vertex_type()).collect();
    assert_eq!(types.len(), 3, "face vertices must have distinct types");
    true
}

/// All classes at distance 1 from `c`: one for each proper nontrivial
/// subspace of the residue space, so `2(q^2 + q + 1)` in total.
pub fn neighbors(c: &LatticeClass) -> Vec<LatticeClass> {
    let ctx = c.ctx();
    let mut out = Vec::new();
    for dim in [1usize, 2] {
        for w in subspaces(ctx, dim) {
            let l = lift_subspace(ctx, c.canon(), &w);
            out.push(canonical_class(ctx, &l));
        }
    }
    out
}

/// All faces containing the vertex `c`: one for each complete flag
/// line-inside-plane, so `(q^2 + q + 1)(q + 1)` in total.
pub fn faces_at_vertex(c: &LatticeClass) -> Vec<Face> {
    let ctx = c.ctx();
    let mut out = Vec::new();
    for plane in subspaces(ctx, 2) {
        let from_plane = canonical_class(ctx, &lift_subspace(ctx, c.canon(), &plane));
        for line in lines_in_plane(ctx, &plane) {
            let from_line = canonical_class(ctx, &lift_subspace(ctx, c.canon(), &line));
            out.push(
                Face::try_new(c.clone(), from_plane.clone(), from_line)
                    .expect("flag lifts form a face"),
            );
        }
    }
    out
}

/// The `q + 1` faces containing an edge.
pub fn faces_at_edge(e: &Edge) -> Vec<Face> {
    let ctx = e.tail().ctx();
    let l = e.tail().canon();
    let (_, m) = tight_fit(ctx, l, e.head().canon());
    let line = residue_image(ctx, l, &m);
    assert_eq!(line.dim(), 1, "edge orientation fixes a rank-1 image");
    planes_containing(ctx, &line)
        .into_iter()
        .map(|plane| {
            let third = canonical_class(ctx, &lift_subspace(ctx, l, &plane));
            Face::try_new(e.tail().clone(), e.head().clone(), third)
                .expect("plane through the line completes the flag")
        })
        .collect()
}

// ---------------------------------------------------------------------------
// connecting paths
// ---------------------------------------------------------------------------

/// A shortest path from `c1` to `c2`, of length exactly `distance(c1, c2)`.
///
/// With `(p^a e1, p^b e2, e3)` adapted to the pair, the interpolating
/// lattices shrink both leading exponents together until `b` is exhausted and
/// then the first alone.
pub fn connecting_path(c1: &LatticeClass, c2: &LatticeClass) -> EdgePath {
    assert_eq!(c1.ctx(), c2.ctx());
    let ctx = c1.ctx();
    if c1 == c2 {
        return EdgePath::try_new(vec![c1.clone()]).expect("single vertex");
    }
    let (_, m) = tight_fit(ctx, c1.canon(), c2.canon());
    let (e, d) = adapted_bases(ctx, c1.canon(), &m).expect("tight-fitting by construction");
    let mut verts = vec![c1.clone()];
    for i in 1..=d.a {
        let step = e.mat().mul(&Mat3::p_diag(ctx, i, i.min(d.b), 0));
        verts.push(LatticeClass::from_mat(ctx, step).expect("nonsingular"));
    }
    assert_eq!(verts.last(), Some(c2), "path ends at the target class");
    EdgePath::try_new(verts).expect("interpolating lattices are adjacent")
}

// ---------------------------------------------------------------------------
// the one-step distance classifier
// ---------------------------------------------------------------------------

/// The four positions of a neighbor `N` of `M` relative to a base class `L`:
/// by the rank of the residue image of `N` in `M`, and by whether that image
/// lies inside the span of the two scaled adapted basis vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepCase {
    A1,
    A2,
    B1,
    B2,
}

impl std::fmt::Display for StepCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StepCase::A1 => "A1",
            StepCase::A2 => "A2",
            StepCase::B1 => "B1",
            StepCase::B2 => "B2",
        };
        write!(f, "{s}")
    }
}

pub(crate) struct StepData {
    pub case: StepCase,
    pub predicted: i64,
    pub a: i64,
    pub b: i64,
    /// For the B cases: columns `(e1, e2, e3)` of a representative of `L`
    /// normalized so that the representative of `M` is spanned by
    /// `(p^a e1, p^b e2, e3)` and the tight representative of `N` inside it is
    /// spanned by `(p^(a+1) e1, p^(b+1) e2, e3)` in case B1 and by
    /// `(p^(a+1) e1, p^b e2, e3)` in case B2.
    pub frame: Option<Mat3>,
}

/// Residue image of the tight representative of `n` inside the lattice
/// spanned by `frame * diag(p^a, p^b, 1)`, as echelon rows.
fn step_image(
    ctx: &DVRContext,
    frame: &Mat3,
    a: i64,
    b: i64,
    n: &LatticeClass,
) -> Vec<[u64; 3]> {
    let bm = LatticeBasis::new(frame.mul(&Mat3::p_diag(ctx, a, b, 0))).expect("nonsingular");
    let (_, nrep) = tight_fit(ctx, &bm, n.canon());
    residue_image(ctx, &bm, &nrep).basis_raw()
}

pub(crate) fn step_data(
    l: &LatticeClass,
    m: &LatticeClass,
    n: &LatticeClass,
) -> Result<StepData> {
    assert_eq!(l.ctx(), m.ctx());
    assert_eq!(l.ctx(), n.ctx());
    let ctx = l.ctx();
    let p = ctx.prime();
    let (_, mrep) = tight_fit(ctx, l.canon(), m.canon());
    let (e, d) = adapted_bases(ctx, l.canon(), &mrep).expect("tight-fitting by construction");
    let (a, b) = (d.a, d.b);
    if a < 1 {
        return Err(Error::Precondition(
            "classify_step requires d(L, M) >= 1".into(),
        ));
    }
    if distance(m, n) != 1 {
        return Err(Error::Precondition(
            "classify_step requires d(M, N) = 1".into(),
        ));
    }
    let mut frame = e.mat().clone();
    let rows = step_image(ctx, &frame, a, b, n);
    let rank = rows.len();
    let contained = rows.iter().all(|r| r[2] == 0);
    match (rank, contained) {
        (1, true) => {
            let beta_nonzero = rows[0][1] != 0;
            let predicted = if beta_nonzero {
                if b == 0 {
                    a + 1
                } else {
                    a
                }
            } else if a == b {
                a
            } else {
                a - 1
            };
            Ok(StepData {
                case: StepCase::A1,
                predicted,
                a,
                b,
                frame: None,
            })
        }
        (2, true) => Ok(StepData {
            case: StepCase::A2,
            predicted: if b == 0 { a } else { a - 1 },
            a,
            b,
            frame: None,
        }),
        (1, false) => {
            // normalize the generator to (alpha, beta, 1) and absorb it into e3
            let g = rows[0];
            let zinv = invm(g[2], p);
            let alpha = mulm(g[0], zinv, p);
            let beta = mulm(g[1], zinv, p);
            apply_e3_change(ctx, &mut frame, a, b, alpha, beta);
            debug_assert_eq!(step_image(ctx, &frame, a, b, n), vec![[0, 0, 1]]);
            Ok(StepData {
                case: StepCase::B1,
                predicted: a + 1,
                a,
                b,
                frame: Some(frame),
            })
        }
        (2, false) => {
            // the image meets the span of the first two coordinates in a line
            // generated by (gamma, delta, 0)
            let mut swapped = false;
            loop {
                let rows = step_image(ctx, &frame, a, b, n);
                let g0 = intersection_with_first_two(&rows, p);
                let delta = g0[1];
                if delta != 0 {
                    // absorb gamma into e2, then clear the remaining
                    // coefficients of the transversal vector into e3
                    let gamma = g0[0];
                    let coeff = mulm(gamma, invm(delta, p), p);
                    apply_e2_change(ctx, &mut frame, a, b, coeff);
                    let rows = step_image(ctx, &frame, a, b, n);
                    let g1 = transversal_vector(&rows, p);
                    apply_e3_change(ctx, &mut frame, a, b, g1[0], g1[1]);
                    let final_rows = step_image(ctx, &frame, a, b, n);
                    debug_assert_eq!(final_rows, vec![[0, 1, 0], [0, 0, 1]]);
                    return Ok(StepData {
                        case: StepCase::B2,
                        predicted: a + 1,
                        a,
                        b,
                        frame: Some(frame),
                    });
                }
                if a == b && !swapped {
                    frame.swap_cols(0, 1);
                    swapped = true;
                    continue;
                }
                // delta = 0 with a > b: the distance stays at a and the
                // normalized frame is not needed
                return Ok(StepData {
                    case: StepCase::B2,
                    predicted: if a == b { a + 1 } else { a },
                    a,
                    b,
                    frame: None,
                });
            }
        }
        (r, _) => unreachable!("neighbor image has rank 1 or 2, got {r}"),
    }
}

/// Generator of the intersection of the row span with the plane of vectors
/// whose third coordinate vanishes.  The rows are echelon, rank 2, and not
/// contained in that plane.
pub(crate) fn intersection_with_first_two(rows: &[[u64; 3]], p: u64) -> [u64; 3] {
    assert_eq!(rows.len(), 2);
    let (r0, r1) = (rows[0], rows[1]);
    if r0[2] == 0 {
        return r0;
    }
    if r1[2] == 0 {
        return r1;
    }
    // t*r0 - s*r1 with third coordinates s = r0[2], t = r1[2]
    let t = r1[2];
    let s = r0[2];
    let v: [u64; 3] = std::array::from_fn(|i| addm(mulm(t, r0[i], p), negm(mulm(s, r1[i], p), p), p));
    assert!(v != [0, 0, 0]);
    v
}

/// A vector of the row span with third coordinate 1.
fn transversal_vector(rows: &[[u64; 3]], p: u64) -> [u64; 3] {
    for r in rows {
        if r[2] != 0 {
            let zinv = invm(r[2], p);
            return std::array::from_fn(|i| mulm(r[i], zinv, p));
        }
    }
    unreachable!("image is not contained in the coordinate plane")
}

/// e3 <- e3 + lift(beta) p^b e2 + lift(alpha) p^a e1
fn apply_e3_change(ctx: &DVRContext, frame: &mut Mat3, a: i64, b: i64, alpha: u64, beta: u64) {
    let la = ctx.lift(ResidueScalar::new(alpha, ctx.prime())) * ctx.p_pow(a);
    let lb = ctx.lift(ResidueScalar::new(beta, ctx.prime())) * ctx.p_pow(b);
    for i in 0..3 {
        let v = frame.at(i, 2) + &(&la * frame.at(i, 0)) + &(&lb * frame.at(i, 1));
        frame.set(i, 2, v);
    }
}

/// e2 <- e2 + lift(coeff) p^(a-b) e1
fn apply_e2_change(ctx: &DVRContext, frame: &mut Mat3, a: i64, b: i64, coeff: u64) {
    let lc = ctx.lift(ResidueScalar::new(coeff, ctx.prime())) * ctx.p_pow(a - b);
    for i in 0..3 {
        let v = frame.at(i, 1) + &(&lc * frame.at(i, 0));
        frame.set(i, 1, v);
    }
}

/// Classifies the position of `n` relative to the pair `(l, m)` and predicts
/// `distance(l, n)` from the case table.  Requires `d(l, m) >= 1` and
/// `d(m, n) = 1`; the prediction always lies in `{a-1, a, a+1}`.
pub fn classify_step(
    l: &LatticeClass,
    m: &LatticeClass,
    n: &LatticeClass,
) -> Result<(StepCase, i64)> {
    let sd = step_data(l, m, n)?;
    Ok((sd.case, sd.predicted))
}

/// The two step shapes that can occur at the critical index of a loop, where
/// the distance to the basepoint has just increased to `a + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LoopCase {
    B1,
    B2,
}

pub(crate) struct LoopStepFrame {
    pub case: LoopCase,
    /// Columns `(e1, e2, e3)` of a representative of `l` with the
    /// representative of `m` spanned by `(p^a e1, p^b1 e2, e3)` and the tight
    /// representative of `n` spanned by `(p^(a+1) e1, p^(b1+1) e2, e3)` in
    /// case B1 and `(p^(a+1) e1, p^b1 e2, e3)` in case B2.
    pub frame: Mat3,
    pub a: i64,
    pub b1: i64,
}

/// Normalized frame for a loop step with `d(l, m) = a`, `d(m, n) = 1`, and
/// `d(l, n) = a + 1`.  A rank-1 image inside the coordinate span only happens
/// with `b1 = 0`, where swapping the last two basis vectors converts it to
/// the B1 shape; everything else with a distance increase is already B1 or
/// B2.
pub(crate) fn loop_step_frame(
    l: &LatticeClass,
    m: &LatticeClass,
    n: &LatticeClass,
) -> Result<LoopStepFrame> {
    let sd = step_data(l, m, n)?;
    let (a, b1) = (sd.a, sd.b);
    if sd.predicted != a + 1 {
        return Err(Error::Contraction(format!(
            "critical step must increase the distance, got case {} with prediction {}",
            sd.case, sd.predicted
        )));
    }
    match sd.case {
        StepCase::B1 => Ok(LoopStepFrame {
            case: LoopCase::B1,
            frame: sd.frame.expect("B1 carries a frame"),
            a,
            b1,
        }),
        StepCase::B2 => Ok(LoopStepFrame {
            case: LoopCase::B2,
            frame: sd.frame.expect("B2 with a distance increase carries a frame"),
            a,
            b1,
        }),
        StepCase::A1 => {
            debug_assert_eq!(b1, 0);
            let ctx = l.ctx();
            let p = ctx.prime();
            let (_, mrep) = tight_fit(ctx, l.canon(), m.canon());
            let (e, _) = adapted_bases(ctx, l.canon(), &mrep)?;
            let mut frame = e.mat().clone();
            let rows = step_image(ctx, &frame, a, 0, n);
            debug_assert_eq!(rows.len(), 1);
            let (alpha, beta) = (rows[0][0], rows[0][1]);
            debug_assert_ne!(beta, 0);
            if alpha != 0 {
                apply_e2_change(ctx, &mut frame, a, 0, mulm(alpha, invm(beta, p), p));
            }
            frame.swap_cols(1, 2);
            debug_assert_eq!(step_image(ctx, &frame, a, 0, n), vec![[0, 0, 1]]);
            Ok(LoopStepFrame {
                case: LoopCase::B1,
                frame,
                a,
                b1: 0,
            })
        }
        StepCase::A2 => unreachable!("A2 never predicts a distance increase"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn ctx(p: u64) -> DVRContext {
        DVRContext::new(p).unwrap()
    }

    fn class(c: &DVRContext, m: Mat3) -> LatticeClass {
        LatticeClass::from_mat(c, m).unwrap()
    }

    fn p_diag(c: &DVRContext, a: i64, b: i64, d: i64) -> Mat3 {
        Mat3::p_diag(c, a, b, d)
    }

    #[test]
    fn subspace_counts() {
        // oracle for lines: all nonzero vectors up to scaling
        for p in [2u64, 3] {
            let c = ctx(p);
            let mut seen = HashSet::new();
            for x in 0..p {
                for y in 0..p {
                    for z in 0..p {
                        if (x, y, z) != (0, 0, 0) {
                            seen.insert(ResidueSubspace::span(&c, &[[x, y, z]]));
                        }
                    }
                }
            }
            let lines = subspaces(&c, 1);
            assert_eq!(lines.len(), (p * p + p + 1) as usize);
            assert_eq!(seen.len(), lines.len());
            assert_eq!(lines.iter().collect::<HashSet<_>>().len(), lines.len());

            // oracle for planes: kernels of the dual lines
            let mut dual = HashSet::new();
            for x in 0..p {
                for y in 0..p {
                    for z in 0..p {
                        if (x, y, z) == (0, 0, 0) {
                            continue;
                        }
                        let mut gens = Vec::new();
                        for u in 0..p {
                            for v in 0..p {
                                for w in 0..p {
                                    if (mulm(x, u, p) + mulm(y, v, p) + mulm(z, w, p)) % p == 0
                                        && (u, v, w) != (0, 0, 0)
                                    {
                                        gens.push([u, v, w]);
                                    }
                                }
                            }
                        }
                        dual.insert(ResidueSubspace::span(&c, &gens));
                    }
                }
            }
            let planes = subspaces(&c, 2);
            assert_eq!(planes.len(), (p * p + p + 1) as usize);
            assert_eq!(dual.len(), planes.len());
            for pl in &planes {
                assert_eq!(pl.dim(), 2);
                assert!(dual.contains(pl));
            }
        }
    }

    #[test]
    fn lines_in_plane_and_planes_through_line() {
        for p in [2u64, 5] {
            let c = ctx(p);
            let plane = ResidueSubspace::span(&c, &[[1, 0, 0], [0, 1, 0]]);
            let lines = lines_in_plane(&c, &plane);
            assert_eq!(lines.len(), (p + 1) as usize);
            for l in &lines {
                assert!(plane.contains(l));
            }
            let line = ResidueSubspace::span(&c, &[[1, 0, 0]]);
            let planes = planes_containing(&c, &line);
            assert_eq!(planes.len(), (p + 1) as usize);
        }
    }

    #[test]
    fn adjacency_examples() {
        let c = ctx(2);
        let i = class(&c, Mat3::identity());
        let lp = class(&c, p_diag(&c, 0, 0, 1));
        let lpp = class(&c, p_diag(&c, 0, 1, 1));
        assert!(is_adjacent(&i, &lp));
        assert!(is_adjacent(&i, &lpp));
        assert!(!is_adjacent(&i, &i));
        assert!(!is_adjacent(&i, &class(&c, p_diag(&c, 2, 1, 0))));
    }

    #[test]
    fn orientation_follows_the_rank_rule() {
        let c = ctx(2);
        let i = class(&c, Mat3::identity());
        let lp = class(&c, p_diag(&c, 0, 0, 1));
        let lpp = class(&c, p_diag(&c, 0, 1, 1));
        // rank-2 image: directed from the sublattice class toward the parent
        let e = edge_orientation(&i, &lp).unwrap();
        assert_eq!((e.tail(), e.head()), (&lp, &i));
        // rank-1 image: directed from the parent toward the sublattice class
        let e = edge_orientation(&i, &lpp).unwrap();
        assert_eq!((e.tail(), e.head()), (&i, &lpp));
        // argument order does not matter
        assert_eq!(edge_orientation(&lp, &i).unwrap(), edge_orientation(&i, &lp).unwrap());
        assert_eq!(
            edge_orientation(&lpp, &i).unwrap(),
            edge_orientation(&i, &lpp).unwrap()
        );
        assert_eq!(edge_orientation(&i, &i).unwrap_err(), Error::NotAdjacent);
    }

    #[test]
    fn neighbor_counts_and_distances() {
        for (p, expected) in [(2u64, 14usize), (3, 26)] {
            let c = ctx(p);
            let i = class(&c, Mat3::identity());
            let nbs = neighbors(&i);
            assert_eq!(nbs.len(), expected);
            let distinct: HashSet<_> = nbs.iter().collect();
            assert_eq!(distinct.len(), expected);
            for n in &nbs {
                assert_eq!(distance(&i, n), 1);
            }
        }
    }

    #[test]
    fn face_counts_at_vertex_and_edge() {
        for (p, at_vertex, at_edge) in [(2u64, 21usize, 3usize), (3, 52, 4)] {
            let c = ctx(p);
            let i = class(&c, Mat3::identity());
            let faces = faces_at_vertex(&i);
            assert_eq!(faces.len(), at_vertex);
            let distinct: HashSet<_> = faces.iter().collect();
            assert_eq!(distinct.len(), at_vertex);
            for f in &faces {
                assert!(f.contains(&i));
                assert!(is_face(&f.verts()[0], &f.verts()[1], &f.verts()[2]));
            }
            let lp = class(&c, p_diag(&c, 0, 0, 1));
            let e = edge_orientation(&i, &lp).unwrap();
            let ef = faces_at_edge(&e);
            assert_eq!(ef.len(), at_edge);
            for f in &ef {
                assert!(f.contains(&i) && f.contains(&lp));
            }
        }
        // q + 1 at a larger prime
        let c = ctx(5);
        let i = class(&c, Mat3::identity());
        let lp = class(&c, p_diag(&c, 0, 0, 1));
        let e = edge_orientation(&i, &lp).unwrap();
        assert_eq!(faces_at_edge(&e).len(), 6);
    }

    #[test]
    fn is_face_examples() {
        let c = ctx(2);
        let i = class(&c, Mat3::identity());
        let lp = class(&c, p_diag(&c, 0, 0, 1));
        let lpp = class(&c, p_diag(&c, 0, 1, 1));
        assert!(is_face(&i, &lp, &lpp));
        assert!(!is_face(&i, &lp, &lp));
        // cross-check an arbitrary triple against the enumeration
        let other = class(&c, p_diag(&c, 1, 1, 0));
        let by_def = is_face(&i, &lp, &other);
        let by_enum = faces_at_vertex(&i)
            .iter()
            .any(|f| f.contains(&lp) && f.contains(&other));
        assert_eq!(by_def, by_enum);
    }

    #[test]
    fn face_types_partition() {
        let c = ctx(2);
        let i = class(&c, Mat3::identity());
        for f in faces_at_vertex(&i) {
            for t in 0..3u8 {
                assert_eq!(f.vertex(t).vertex_type(), t);
            }
        }
    }

    #[test]
    fn orientation_cycles_around_faces() {
        for p in [2u64, 3] {
            let c = ctx(p);
            let i = class(&c, Mat3::identity());
            for f in faces_at_vertex(&i) {
                let v = f.verts();
                let e10 = edge_orientation(&v[1], &v[0]).unwrap();
                let e02 = edge_orientation(&v[0], &v[2]).unwrap();
                let e21 = edge_orientation(&v[2], &v[1]).unwrap();
                assert_eq!((e10.tail(), e10.head()), (&v[1], &v[0]));
                assert_eq!((e02.tail(), e02.head()), (&v[0], &v[2]));
                assert_eq!((e21.tail(), e21.head()), (&v[2], &v[1]));
            }
        }
    }

    #[test]
    fn connecting_path_examples() {
        let c = ctx(2);
        let i = class(&c, Mat3::identity());
        assert_eq!(connecting_path(&i, &i).verts().len(), 1);

        let far = class(&c, p_diag(&c, 3, 1, 0));
        let path = connecting_path(&i, &far);
        assert_eq!(path.len_edges(), 3);
        let verts = path.verts();
        for (k, v) in verts.iter().enumerate() {
            assert_eq!(distance(&i, v), k as i64);
            assert_eq!(distance(v, &far), 3 - k as i64);
        }
        for w in verts.windows(2) {
            assert!(is_adjacent(&w[0], &w[1]));
        }
    }

    #[test]
    fn connecting_path_random_pairs() {
        for p in [2u64, 3] {
            let c = ctx(p);
            let mut rng = ChaCha8Rng::seed_from_u64(61 + p);
            for _ in 0..50 {
                let x = crate::sampling::random_class(&c, &mut rng, 4);
                let y = crate::sampling::random_class(&c, &mut rng, 4);
                let path = connecting_path(&x, &y);
                assert_eq!(path.len_edges() as i64, distance(&x, &y));
                let verts = path.verts();
                let distinct: HashSet<_> = verts.iter().collect();
                assert_eq!(distinct.len(), verts.len(), "no repeated vertices");
                for w in verts.windows(2) {
                    assert!(is_adjacent(&w[0], &w[1]));
                }
            }
        }
    }

    #[test]
    fn classify_step_named_cases() {
        let c = ctx(2);
        let i = class(&c, Mat3::identity());
        // a = 2, b = 0; rank-1 neighbor off the leading direction pushes the
        // distance up.  With a vanishing second exponent the two rank-1 cases
        // are exchanged by an allowed basis change, so either label may
        // appear; the prediction is the same.
        let m = class(&c, p_diag(&c, 2, 0, 0));
        let n = class(&c, p_diag(&c, 3, 0, 1));
        let (case, predicted) = classify_step(&i, &m, &n).unwrap();
        assert!(matches!(case, StepCase::A1 | StepCase::B1));
        assert_eq!(predicted, 3);
        assert_eq!(distance(&i, &n), 3);

        // a = 2, b = 1; rank-1 image through the second scaled direction
        // keeps the distance
        let m = class(&c, p_diag(&c, 2, 1, 0));
        let n = class(&c, p_diag(&c, 3, 1, 1));
        let (case, predicted) = classify_step(&i, &m, &n).unwrap();
        assert_eq!(case, StepCase::A1);
        assert_eq!(predicted, 2);
        assert_eq!(distance(&i, &n), 2);

        // a = 2, b = 1; rank-2 image inside the span: distance drops
        let m = class(&c, p_diag(&c, 2, 1, 0));
        let n = class(&c, p_diag(&c, 2, 1, 1));
        let (case, predicted) = classify_step(&i, &m, &n).unwrap();
        assert_eq!(case, StepCase::A2);
        assert_eq!(predicted, 1);
        assert_eq!(distance(&i, &n), 1);
    }

    #[test]
    fn classify_step_rejects_bad_preconditions() {
        let c = ctx(2);
        let i = class(&c, Mat3::identity());
        let m = class(&c, p_diag(&c, 1, 0, 0));
        assert!(matches!(
            classify_step(&i, &i, &m),
            Err(Error::Precondition(_))
        ));
        let far = class(&c, p_diag(&c, 3, 0, 0));
        assert!(matches!(
            classify_step(&i, &m, &far),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn classify_step_agrees_with_distance_exhaustively() {
        for p in [2u64, 3] {
            let c = ctx(p);
            let mut rng = ChaCha8Rng::seed_from_u64(71 + p);
            for _ in 0..12 {
                let l = crate::sampling::random_class(&c, &mut rng, 4);
                let m = loop {
                    let m = crate::sampling::random_class(&c, &mut rng, 4);
                    let d = distance(&l, &m);
                    if (1..=4).contains(&d) {
                        break m;
                    }
                };
                let a = distance(&l, &m);
                for n in neighbors(&m) {
                    let (_, predicted) = classify_step(&l, &m, &n).unwrap();
                    assert!((a - 1..=a + 1).contains(&predicted));
                    assert_eq!(
                        predicted,
                        distance(&l, &n),
                        "case table must reproduce the distance"
                    );
                }
            }
        }
    }
}
