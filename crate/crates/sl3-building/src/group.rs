//! The matrix group action on the complex and the amalgam factorization.
//!
//! Invertible matrices act on classes through their action on bases; the
//! determinant-1 subgroup preserves vertex types and acts transitively on
//! faces without inversion.  The three vertices of the standard face have
//! stabilizers cut out by explicit valuation patterns, and every
//! determinant-1 matrix factors as a word in those three stabilizers: walk a
//! gallery of faces from the standard face to its image, peel off one
//! edge-stabilizer letter per gallery step, and close with a letter fixing
//! the standard face pointwise.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::building::{
    intersect_planes, lift_subspace, residue_image, span_lines, Face,
    ResidueSubspace,
};
use crate::dvr::{DVRContext, ResidueScalar, Scalar, Valuation};
use crate::lattice::{canonical_class, lattice_contains, tight_fit, LatticeBasis, LatticeClass};
use crate::mat::Mat3;
use crate::{Error, Result};

/// An invertible 3x3 matrix over the field, acting on lattices and classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    mat: Mat3,
    det: Scalar,
}

impl GroupElement {
    pub fn new(mat: Mat3) -> Result<GroupElement> {
        let det = mat.det();
        if det.is_zero() {
            return Err(Error::Singular);
        }
        Ok(GroupElement { mat, det })
    }

    pub fn identity() -> GroupElement {
        GroupElement {
            mat: Mat3::identity(),
            det: Scalar::one(),
        }
    }

    pub fn mat(&self) -> &Mat3 {
        &self.mat
    }

    pub fn det(&self) -> &Scalar {
        &self.det
    }

    pub fn det_valuation(&self, ctx: &DVRContext) -> i64 {
        ctx.val(&self.det)
    }

    /// True when the determinant is exactly 1.
    pub fn is_unimodular(&self) -> bool {
        self.det.is_one()
    }

    pub fn is_identity(&self) -> bool {
        self.mat.is_identity()
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement::new(self.mat.mul(&other.mat)).expect("product of invertibles")
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement::new(self.mat.inverse().expect("invertible")).expect("inverse")
    }

    /// Scales the whole matrix by `p^k`.
    pub fn scaled(&self, ctx: &DVRContext, k: i64) -> GroupElement {
        GroupElement::new(self.mat.scale(&ctx.p_pow(k))).expect("scaling keeps invertibility")
    }
}

/// The class of `g * L` for a representative `L`.  Preserves adjacency,
/// faces, and edge orientation.
pub fn act(g: &GroupElement, c: &LatticeClass) -> LatticeClass {
    let ctx = c.ctx();
    canonical_class(
        ctx,
        &LatticeBasis::new(g.mat.mul(c.canon().mat())).expect("invertible action"),
    )
}

/// The image face under the action.
pub fn act_on_face(g: &GroupElement, f: &Face) -> Face {
    let v = f.verts();
    Face::try_new(act(g, &v[0]), act(g, &v[1]), act(g, &v[2]))
        .expect("the action carries faces to faces")
}

/// The standard face: the classes of the identity frame and its two scaled
/// sublattices `diag(1,1,p)` and `diag(1,p,p)`, of types 0, 1, 2.
pub fn standard_face(ctx: &DVRContext) -> Face {
    let v0 = LatticeClass::from_mat(ctx, Mat3::identity()).expect("identity");
    let v1 = LatticeClass::from_mat(ctx, Mat3::p_diag(ctx, 0, 0, 1)).expect("diag");
    let v2 = LatticeClass::from_mat(ctx, Mat3::p_diag(ctx, 0, 1, 1)).expect("diag");
    Face::try_new(v0, v1, v2).expect("standard chain is a face")
}

/// `diag(1, 1, p)`: carries the type-0 standard vertex to the type-1 vertex;
/// determinant valuation 1.
pub fn alpha(ctx: &DVRContext) -> GroupElement {
    GroupElement::new(Mat3::p_diag(ctx, 0, 0, 1)).expect("invertible")
}

/// `diag(1, p, p)`: carries the type-0 standard vertex to the type-2 vertex;
/// determinant valuation 2.
pub fn beta(ctx: &DVRContext) -> GroupElement {
    GroupElement::new(Mat3::p_diag(ctx, 0, 1, 1)).expect("invertible")
}

/// Tags for the three standard vertex stabilizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubgroupTag {
    G1,
    G2,
    G3,
}

impl std::fmt::Display for SubgroupTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SubgroupTag::G1 => "G1",
            SubgroupTag::G2 => "G2",
            SubgroupTag::G3 => "G3",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for SubgroupTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<SubgroupTag> {
        match s {
            "G1" => Ok(SubgroupTag::G1),
            "G2" => Ok(SubgroupTag::G2),
            "G3" => Ok(SubgroupTag::G3),
            other => Err(Error::Parse(format!("unknown subgroup tag {other:?}"))),
        }
    }
}

/// Pairwise and triple intersections of the standard stabilizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Intersection {
    G12,
    G13,
    G23,
    G123,
}

/// Entrywise lower bounds on valuations; entry (i, j) of a member must have
/// valuation at least `bounds[i][j]`.
fn matches_bounds(ctx: &DVRContext, m: &Mat3, bounds: [[i64; 3]; 3]) -> bool {
    for i in 0..3 {
        for j in 0..3 {
            match ctx.valuation(m.at(i, j)) {
                Valuation::Infinite => {}
                Valuation::Finite(v) => {
                    if v < bounds[i][j] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn stabilizer_bounds(tag: SubgroupTag) -> [[i64; 3]; 3] {
    match tag {
        // integral entries
        SubgroupTag::G1 => [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
        // conjugate by diag(1,1,p): last column may drop by one, last row
        // gains one
        SubgroupTag::G2 => [[0, 0, -1], [0, 0, -1], [1, 1, 0]],
        // conjugate by diag(1,p,p)
        SubgroupTag::G3 => [[0, -1, -1], [1, 0, 0], [1, 0, 0]],
    }
}

fn intersection_bounds(which: Intersection) -> [[i64; 3]; 3] {
    match which {
        Intersection::G12 => [[0, 0, 0], [0, 0, 0], [1, 1, 0]],
        Intersection::G13 => [[0, 0, 0], [1, 0, 0], [1, 0, 0]],
        Intersection::G23 => [[0, 0, -1], [1, 0, 0], [1, 1, 0]],
        Intersection::G123 => [[0, 0, 0], [1, 0, 0], [1, 1, 0]],
    }
}

/// Membership in a standard vertex stabilizer, by entry valuation pattern.
/// Requires determinant exactly 1; equivalent to fixing the corresponding
/// standard vertex.
pub fn in_stabilizer(ctx: &DVRContext, g: &GroupElement, tag: SubgroupTag) -> Result<bool> {
    if !g.is_unimodular() {
        return Err(Error::NotUnimodular);
    }
    Ok(matches_bounds(ctx, &g.mat, stabilizer_bounds(tag)))
}

/// Membership in a pairwise or triple intersection of the standard
/// stabilizers, by entry valuation pattern.
pub fn in_intersection(ctx: &DVRContext, g: &GroupElement, which: Intersection) -> Result<bool> {
    if !g.is_unimodular() {
        return Err(Error::NotUnimodular);
    }
    Ok(matches_bounds(ctx, &g.mat, intersection_bounds(which)))
}

// ---------------------------------------------------------------------------
// face frames and face transitivity
// ---------------------------------------------------------------------------

fn lift_vector(ctx: &DVRContext, l: &LatticeBasis, v: &[u64; 3]) -> [Scalar; 3] {
    let coeffs: [Scalar; 3] =
        std::array::from_fn(|i| ctx.lift(ResidueScalar::new(v[i], ctx.prime())));
    l.mat().mul_vec(&coeffs)
}

/// A frame for a face anchored at one of its vertices: columns `(e1, e2, e3)`
/// of a representative `L` of the anchor such that the other two vertices are
/// the classes of `span(e1, e2, p e3)` and `span(e1, p e2, p e3)`.
fn face_frame(ctx: &DVRContext, face: &Face, anchor: &LatticeClass) -> Mat3 {
    assert!(face.contains(anchor));
    let l = anchor.canon();
    let others: Vec<&LatticeClass> = face.verts().iter().filter(|v| *v != anchor).collect();
    let (_, m0) = tight_fit(ctx, l, others[0].canon());
    let (_, m1) = tight_fit(ctx, l, others[1].canon());
    let (outer, inner) = if lattice_contains(ctx, &m0, &m1) {
        (m0, m1)
    } else {
        (m1, m0)
    };
    debug_assert!(lattice_contains(ctx, &outer, &inner));
    let plane = residue_image(ctx, l, &outer);
    let line = residue_image(ctx, l, &inner);
    debug_assert_eq!(plane.dim(), 2);
    debug_assert_eq!(line.dim(), 1);
    debug_assert!(plane.contains(&line));
    let e1r = line.basis_raw()[0];
    let e2r = *plane
        .basis_raw()
        .iter()
        .find(|v| !line.contains_vector(v))
        .expect("plane strictly contains the line");
    let e3r = *[[1u64, 0, 0], [0, 1, 0], [0, 0, 1]]
        .iter()
        .find(|s| {
            crate::building::rref(&[e1r, e2r, **s], ctx.prime()).len() == 3
        })
        .expect("some coordinate vector completes the basis");
    let cols = [
        lift_vector(ctx, l, &e1r),
        lift_vector(ctx, l, &e2r),
        lift_vector(ctx, l, &e3r),
    ];
    let f = Mat3::from_cols(cols);
    debug_assert_eq!(
        canonical_class(ctx, &LatticeBasis::new(f.clone()).unwrap()),
        *anchor
    );
    f
}

fn lex_min_vertex(face: &Face) -> &LatticeClass {
    face.verts().iter().min().expect("three vertices")
}

/// A determinant-1 element carrying the vertex set of `f` onto that of `g`,
/// matching vertices type by type.
///
/// Frames are built at deterministic anchors; the determinant valuation of
/// the raw frame map, reduced to `{0, -1, -2}`, selects how far to rotate the
/// target anchor along its face (not at all, or by the `alpha` or `beta`
/// step), after which the unit is absorbed into the first frame column and
/// the power of `p` is scaled away exactly.
pub fn map_face_to_face(f: &Face, g: &Face) -> GroupElement {
    let ctx = f.verts()[0].ctx();
    let ff = face_frame(ctx, f, lex_min_vertex(f));
    let fg0_anchor = lex_min_vertex(g);
    let fg0 = face_frame(ctx, g, fg0_anchor);
    let raw = fg0.mul(&ff.inverse().expect("frame"));
    let nv = ctx.val(&raw.det());
    // det valuation nv = 3m + r with r in {0, -1, -2}; composing with alpha
    // or beta in the target frame advances the anchor r steps along the face
    let steps = (3 - nv.rem_euclid(3)) % 3;
    let target_type = (fg0_anchor.vertex_type() + steps as u8) % 3;
    let anchor = g.vertex(target_type);
    let mut fg = face_frame(ctx, g, anchor);
    let det_ratio = fg.det() / ff.det();
    let m3 = ctx.val(&det_ratio);
    debug_assert_eq!(m3.rem_euclid(3), 0);
    let unit = &det_ratio * ctx.p_pow(-m3);
    fg.scale_col(0, &unit.recip());
    let phi = GroupElement::new(fg.mul(&ff.inverse().expect("frame"))).expect("invertible");
    let phi = phi.scaled(ctx, -m3 / 3);
    debug_assert!(phi.is_unimodular());
    debug_assert_eq!(&act_on_face(&phi, f), g);
    phi
}

/// True when `g` fixes each vertex of `f` individually.  Requires
/// determinant 1 and that `g` carry `f` onto itself; under those hypotheses
/// the vertices are always fixed pointwise, and this is asserted.
pub fn check_without_inversion(g: &GroupElement, f: &Face) -> Result<bool> {
    if !g.is_unimodular() {
        return Err(Error::NotUnimodular);
    }
    if &act_on_face(g, f) != f {
        return Err(Error::DoesNotPreserveFace);
    }
    let fixed = f.verts().iter().all(|v| act(g, v) == *v);
    assert!(
        fixed,
        "a determinant-1 element preserving a face fixes its vertices"
    );
    Ok(fixed)
}

// ---------------------------------------------------------------------------
// amalgam words
// ---------------------------------------------------------------------------

/// One letter of an amalgam word: a group element together with the tag of a
/// standard stabilizer containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmalgamLetter {
    pub tag: SubgroupTag,
    pub element: GroupElement,
}

/// A factorization of a group element as an ordered product of letters, each
/// lying in its tagged standard stabilizer.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AmalgamWord {
    letters: Vec<AmalgamLetter>,
}

impl AmalgamWord {
    pub fn letters(&self) -> &[AmalgamLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn to_json(&self) -> String {
        let recs: Vec<LetterRecord> = self
            .letters
            .iter()
            .map(|l| LetterRecord {
                tag: l.tag.to_string(),
                matrix: l.element.mat().clone(),
            })
            .collect();
        serde_json::to_string_pretty(&recs).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<AmalgamWord> {
        let recs: Vec<LetterRecord> =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut letters = Vec::with_capacity(recs.len());
        for r in recs {
            letters.push(AmalgamLetter {
                tag: r.tag.parse()?,
                element: GroupElement::new(r.matrix)?,
            });
        }
        Ok(AmalgamWord { letters })
    }
}

#[derive(Serialize, Deserialize)]
struct LetterRecord {
    tag: String,
    matrix: Mat3,
}

/// The exact ordered product of the letters; the identity for the empty word.
pub fn multiply_word(w: &AmalgamWord) -> GroupElement {
    w.letters
        .iter()
        .fold(GroupElement::identity(), |acc, l| acc.mul(&l.element))
}

// ---------------------------------------------------------------------------
// gallery construction
// ---------------------------------------------------------------------------

/// The complete flag of a face at one of its vertices: the line and plane in
/// the residue space of the vertex cut out by the other two vertices.
fn flag_at(
    ctx: &DVRContext,
    face: &Face,
    at: &LatticeClass,
) -> (ResidueSubspace, ResidueSubspace) {
    let l = at.canon();
    let mut line = None;
    let mut plane = None;
    for v in face.verts() {
        if v == at {
            continue;
        }
        let (_, m) = tight_fit(ctx, l, v.canon());
        let img = residue_image(ctx, l, &m);
        match img.dim() {
            1 => line = Some(img),
            2 => plane = Some(img),
            _ => unreachable!(),
        }
    }
    let (line, plane) = (line.expect("one rank-1 image"), plane.expect("one rank-2 image"));
    debug_assert!(plane.contains(&line));
    (line, plane)
}

fn face_of_flag(
    ctx: &DVRContext,
    at: &LatticeClass,
    line: &ResidueSubspace,
    plane: &ResidueSubspace,
) -> Face {
    let l = at.canon();
    let from_plane = canonical_class(ctx, &lift_subspace(ctx, l, plane));
    let from_line = canonical_class(ctx, &lift_subspace(ctx, l, line));
    Face::try_new(at.clone(), from_plane, from_line).expect("flag lifts to a face")
}

/// Rotates the flag of `face` at `at` until it contains `target`, one shared
/// edge per step; returns the intermediate faces, ending with one whose flag
/// contains `target`.
fn rotate_to_subspace(
    ctx: &DVRContext,
    at: &LatticeClass,
    face: &Face,
    target: &ResidueSubspace,
) -> Vec<Face> {
    let (line, plane) = flag_at(ctx, face, at);
    let mut flags: Vec<(ResidueSubspace, ResidueSubspace)> = Vec::new();
    match target.dim() {
        2 => {
            if plane != *target {
                let mid = intersect_planes(ctx, &plane, target);
                if line != mid {
                    flags.push((mid.clone(), plane.clone()));
                }
                flags.push((mid, target.clone()));
            }
        }
        1 => {
            if line != *target {
                if plane.contains(target) {
                    flags.push((target.clone(), plane.clone()));
                } else {
                    let mid = span_lines(ctx, &line, target);
                    if plane != mid {
                        flags.push((line.clone(), mid.clone()));
                    }
                    flags.push((target.clone(), mid));
                }
            }
        }
        _ => unreachable!(),
    }
    flags
        .into_iter()
        .map(|(l, p)| face_of_flag(ctx, at, &l, &p))
        .collect()
}

/// Rotates the flag of `face` at `at` onto the flag of `target` at `at`.
fn rotate_to_flag(ctx: &DVRContext, at: &LatticeClass, face: &Face, target: &Face) -> Vec<Face> {
    let (l1, p1) = flag_at(ctx, face, at);
    let (l2, p2) = flag_at(ctx, target, at);
    let mut flags: Vec<(ResidueSubspace, ResidueSubspace)> = Vec::new();
    if p1 == p2 {
        if l1 != l2 {
            flags.push((l2, p2));
        }
    } else {
        let mid = intersect_planes(ctx, &p1, &p2);
        if l1 != mid {
            flags.push((mid.clone(), p1));
        }
        flags.push((mid.clone(), p2.clone()));
        if l2 != mid {
            flags.push((l2, p2));
        }
    }
    flags
        .into_iter()
        .map(|(l, p)| face_of_flag(ctx, at, &l, &p))
        .collect()
}

/// A gallery from the standard face to `target`: a sequence of faces in
/// which consecutive members share an edge.  Walks a shortest vertex path
/// and rotates within each vertex link to pick up the next edge.
fn build_gallery(ctx: &DVRContext, target: &Face) -> Vec<Face> {
    let f0 = standard_face(ctx);
    let mut gallery = vec![f0.clone()];
    if &f0 == target {
        return gallery;
    }
    let start = f0.vertex(0).clone();
    let end = target.vertex(0).clone();
    let path = crate::building::connecting_path(&start, &end);
    let mut cur = f0;
    for w in path.verts().windows(2) {
        let (x, y) = (&w[0], &w[1]);
        let (_, ytight) = tight_fit(ctx, x.canon(), y.canon());
        let wy = residue_image(ctx, x.canon(), &ytight);
        for f in rotate_to_subspace(ctx, x, &cur, &wy) {
            if f != cur {
                gallery.push(f.clone());
                cur = f;
            }
        }
        assert!(cur.contains(y), "rotation must reach the next path vertex");
    }
    let z = path.verts().last().expect("nonempty path");
    for f in rotate_to_flag(ctx, z, &cur, target) {
        if f != cur {
            gallery.push(f.clone());
            cur = f;
        }
    }
    assert_eq!(&cur, target, "gallery must end at the target face");
    gallery
}

// ---------------------------------------------------------------------------
// edge transporters
// ---------------------------------------------------------------------------

/// A determinant-1 element fixing both standard vertices of the given types
/// and carrying the standard face to `target`, a face containing that edge.
/// Solved over the residue field and lifted with coefficients in `[0, p)`;
/// the determinant is corrected to exactly 1 by a unit scaling of the first
/// frame column, which fixes every standard lattice.
fn edge_transporter(ctx: &DVRContext, types: (u8, u8), target: &Face) -> GroupElement {
    let p = ctx.prime();
    let to_scalar = |x: u64| ctx.lift(ResidueScalar::new(x, p));
    let build = |cols: [[u64; 3]; 3]| -> Mat3 {
        Mat3::from_cols([
            std::array::from_fn(|i| to_scalar(cols[0][i])),
            std::array::from_fn(|i| to_scalar(cols[1][i])),
            std::array::from_fn(|i| to_scalar(cols[2][i])),
        ])
    };
    let mat = match types {
        (0, 1) => {
            // fix the identity lattice and span(e1, e2, p e3); move the line
            let third = target.vertex(2);
            let id = LatticeBasis::new(Mat3::identity()).expect("identity");
            let (_, t) = tight_fit(ctx, &id, third.canon());
            let line = residue_image(ctx, &id, &t);
            let v = line.basis_raw()[0];
            assert_eq!(v[2], 0, "third vertex line lies in the shared plane");
            let c1 = v;
            let c2 = if v[0] != 0 { [0, 1, 0] } else { [1, 0, 0] };
            build([c1, c2, [0, 0, 1]])
        }
        (0, 2) => {
            // fix the identity lattice and span(e1, p e2, p e3); move the plane
            let third = target.vertex(1);
            let id = LatticeBasis::new(Mat3::identity()).expect("identity");
            let (_, t) = tight_fit(ctx, &id, third.canon());
            let plane = residue_image(ctx, &id, &t);
            assert!(plane.contains_vector(&[1, 0, 0]));
            let w = plane
                .basis_raw()
                .into_iter()
                .map(|r| [0, r[1], r[2]])
                .find(|r| r[1] != 0 || r[2] != 0)
                .expect("plane strictly contains the first coordinate line");
            let c3 = if w[1] != 0 { [0, 0, 1] } else { [0, 1, 0] };
            build([[1, 0, 0], w, c3])
        }
        (1, 2) => {
            // work in coordinates of span(e1, e2, p e3): fix that lattice and
            // the plane of span(e1, p e2, p e3); move the line of the type-0
            // vertex
            let third = target.vertex(0);
            let a = LatticeBasis::new(Mat3::p_diag(ctx, 0, 0, 1)).expect("diag");
            let (_, t) = tight_fit(ctx, &a, third.canon());
            let line = residue_image(ctx, &a, &t);
            let v = line.basis_raw()[0];
            assert_eq!(v[1], 0, "type-0 line lies in the shared plane");
            let c1 = if v[2] != 0 { [1, 0, 0] } else { [0, 0, 1] };
            let sf = build([c1, [0, 1, 0], v]);
            let am = Mat3::p_diag(ctx, 0, 0, 1);
            let am_inv = Mat3::p_diag(ctx, 0, 0, -1);
            // conjugate back to standard coordinates after the det fix below
            // would break the pattern, so fix det first
            let u = sf.det();
            let mut sf = sf;
            sf.scale_col(0, &u.recip());
            return GroupElement::new(am.mul(&sf).mul(&am_inv)).expect("invertible");
        }
        other => unreachable!("not a standard edge type pair: {other:?}"),
    };
    let u = mat.det();
    let mut mat = mat;
    mat.scale_col(0, &u.recip());
    GroupElement::new(mat).expect("invertible")
}

// ---------------------------------------------------------------------------
// the factorization
// ---------------------------------------------------------------------------

/// Factors a determinant-1 matrix as a word in the three standard vertex
/// stabilizers.  Letters lying in a pairwise intersection take the
/// lower-numbered tag; the identity factors as the empty word.
pub fn factor_in_amalgam(ctx: &DVRContext, g: &GroupElement) -> Result<AmalgamWord> {
    if !g.is_unimodular() {
        return Err(Error::NotUnimodular);
    }
    if g.is_identity() {
        return Ok(AmalgamWord::default());
    }
    for tag in [SubgroupTag::G1, SubgroupTag::G2, SubgroupTag::G3] {
        if in_stabilizer(ctx, g, tag)? {
            return Ok(AmalgamWord {
                letters: vec![AmalgamLetter {
                    tag,
                    element: g.clone(),
                }],
            });
        }
    }
    let f0 = standard_face(ctx);
    let target = act_on_face(g, &f0);
    let gallery = build_gallery(ctx, &target);
    let mut letters: Vec<AmalgamLetter> = Vec::new();
    let mut h = GroupElement::identity();
    for step in gallery.windows(2) {
        let hinv = h.inverse();
        debug_assert_eq!(act_on_face(&hinv, &step[0]), f0);
        let pulled = act_on_face(&hinv, &step[1]);
        if pulled == f0 {
            continue;
        }
        let shared = f0
            .shared_edge_verts(&pulled)
            .expect("consecutive gallery faces share an edge");
        let mut types = (shared[0].vertex_type(), shared[1].vertex_type());
        if types.0 > types.1 {
            types = (types.1, types.0);
        }
        let s = edge_transporter(ctx, types, &pulled);
        debug_assert_eq!(act_on_face(&s, &f0), pulled);
        let (tag, pair) = match types {
            (0, 1) => (SubgroupTag::G1, Intersection::G12),
            (0, 2) => (SubgroupTag::G1, Intersection::G13),
            (1, 2) => (SubgroupTag::G2, Intersection::G23),
            other => unreachable!("not an edge type pair: {other:?}"),
        };
        assert!(
            in_intersection(ctx, &s, pair)?,
            "transporter must lie in the edge stabilizer"
        );
        letters.push(AmalgamLetter {
            tag,
            element: s.clone(),
        });
        h = h.mul(&s);
    }
    let t = h.inverse().mul(g);
    assert!(
        check_without_inversion(&t, &f0)?,
        "closing letter must fix the standard face"
    );
    assert!(
        in_intersection(ctx, &t, Intersection::G123)?,
        "closing letter lies in the triple intersection"
    );
    if !t.is_identity() {
        letters.push(AmalgamLetter {
            tag: SubgroupTag::G1,
            element: t,
        });
    }
    let word = AmalgamWord { letters };
    debug_assert_eq!(&multiply_word(&word), g);
    Ok(word)
}
