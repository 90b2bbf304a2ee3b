//! Loop contraction: the complex is simply connected, constructively.
//!
//! A closed edge path is driven to its basepoint by elementary moves, each
//! certified by explicit faces.  The engine finds the first index where the
//! distance to the basepoint stops growing, normalizes an adapted frame
//! there, and either pushes the path across one face (shortening it) or
//! reroutes it through a nearer intermediate vertex (the "lower route",
//! which keeps the length but moves the critical index down).  The pair
//! `(length, critical index)` decreases lexicographically at every phase,
//! which both terminates the algorithm and is checked at run time.

use serde::{Deserialize, Serialize};

use crate::building::{loop_step_frame, residue_image, Face, LoopCase};
use crate::dvr::{DVRContext, Scalar, Valuation};
use crate::lattice::{
    canonical_class, distance, lattice_contains, same_lattice, tight_fit, LatticeBasis,
    LatticeClass,
};
use crate::mat::Mat3;
use crate::{Error, Result};

/// A walk along edges: an ordered list of classes with consecutive members
/// at distance 1.  A single vertex is the trivial path.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgePath {
    verts: Vec<LatticeClass>,
}

impl EdgePath {
    pub fn try_new(verts: Vec<LatticeClass>) -> Result<EdgePath> {
        if verts.is_empty() {
            return Err(Error::InvalidPath);
        }
        for w in verts.windows(2) {
            if w[0].ctx() != w[1].ctx() || distance(&w[0], &w[1]) != 1 {
                return Err(Error::InvalidPath);
            }
        }
        Ok(EdgePath { verts })
    }

    pub fn verts(&self) -> &[LatticeClass] {
        &self.verts
    }

    pub fn len_edges(&self) -> usize {
        self.verts.len() - 1
    }

    pub fn is_closed(&self) -> bool {
        self.verts.first() == self.verts.last()
    }

    pub fn basepoint(&self) -> &LatticeClass {
        &self.verts[0]
    }

    /// Canonical matrices of the vertices, for serialization.
    pub fn to_mats(&self) -> Vec<Mat3> {
        self.verts
            .iter()
            .map(|c| c.canon().mat().clone())
            .collect()
    }

    /// Parses a vertex list, canonicalizing each matrix and validating
    /// adjacency.
    pub fn from_mats(ctx: &DVRContext, mats: &[Mat3]) -> Result<EdgePath> {
        let verts: Result<Vec<LatticeClass>> = mats
            .iter()
            .map(|m| LatticeClass::from_mat(ctx, m.clone()))
            .collect();
        EdgePath::try_new(verts?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_mats()).expect("serializable")
    }

    pub fn from_json(ctx: &DVRContext, s: &str) -> Result<EdgePath> {
        let mats: Vec<Mat3> =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        EdgePath::from_mats(ctx, &mats)
    }
}

/// One elementary homotopy step.
///
/// `BacktrackRetract` removes an immediate reversal.  `FacePushShorten`
/// replaces two sides of a face by the third; `FacePushLengthen` is its
/// inverse.  `FaceSwapMid` replaces the middle vertex of a two-edge segment
/// by another vertex adjacent to both ends; the segment crosses two faces,
/// and both are recorded so a certificate checker can validate the move
/// without re-deriving them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContractionMove {
    BacktrackRetract {
        at: usize,
    },
    FacePushShorten {
        at: usize,
        face: Face,
    },
    FacePushLengthen {
        at: usize,
        face: Face,
        via: LatticeClass,
    },
    FaceSwapMid {
        at: usize,
        via: LatticeClass,
        face_in: Face,
        face_out: Face,
    },
}

impl std::fmt::Display for ContractionMove {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ContractionMove::BacktrackRetract { at } => {
                write!(f, "retract backtrack at {at}")
            }
            ContractionMove::FacePushShorten { at, .. } => {
                write!(f, "push across face at {at} (2 edges -> 1)")
            }
            ContractionMove::FacePushLengthen { at, .. } => {
                write!(f, "lengthen through face at {at} (1 edge -> 2)")
            }
            ContractionMove::FaceSwapMid { at, .. } => {
                write!(f, "swap middle vertex at {at} (lower route)")
            }
        }
    }
}

/// The induction measure of a closed path: the edge count and the first
/// index `n` where `d(basepoint, verts[n+1]) < n + 1`.  The critical index
/// is 0 for paths with fewer than two edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ContractionMeasure {
    pub length: usize,
    pub n_p: usize,
}

/// Applies one move to a vertex list, validating it first.
fn apply_move(verts: &mut Vec<LatticeClass>, mv: &ContractionMove) -> Result<()> {
    let fail = |msg: &str| Err(Error::Contraction(msg.into()));
    match mv {
        ContractionMove::BacktrackRetract { at } => {
            let at = *at;
            if at + 2 >= verts.len() {
                return fail("backtrack index out of range");
            }
            if verts[at] != verts[at + 2] {
                return fail("no backtrack at the cited index");
            }
            verts.drain(at + 1..=at + 2);
            Ok(())
        }
        ContractionMove::FacePushShorten { at, face } => {
            let at = *at;
            if at + 2 >= verts.len() {
                return fail("face push index out of range");
            }
            let (a, b, c) = (&verts[at], &verts[at + 1], &verts[at + 2]);
            if a == b || b == c || a == c {
                return fail("face push needs three distinct vertices");
            }
            if !face.is_valid() {
                return fail("cited face is not a face");
            }
            if !(face.contains(a) && face.contains(b) && face.contains(c)) {
                return fail("cited face does not match the path segment");
            }
            verts.remove(at + 1);
            Ok(())
        }
        ContractionMove::FacePushLengthen { at, face, via } => {
            let at = *at;
            if at + 1 >= verts.len() {
                return fail("face lengthen index out of range");
            }
            let (a, b) = (&verts[at], &verts[at + 1]);
            if a == via || b == via || a == b {
                return fail("face lengthen needs three distinct vertices");
            }
            if !face.is_valid() {
                return fail("cited face is not a face");
            }
            if !(face.contains(a) && face.contains(b) && face.contains(via)) {
                return fail("cited face does not match the path segment");
            }
            verts.insert(at + 1, via.clone());
            Ok(())
        }
        ContractionMove::FaceSwapMid {
            at,
            via,
            face_in,
            face_out,
        } => {
            let at = *at;
            if at + 2 >= verts.len() {
                return fail("face swap index out of range");
            }
            let (a, b, c) = (&verts[at], &verts[at + 1], &verts[at + 2]);
            if via == b {
                return fail("face swap must change the middle vertex");
            }
            if a == b || b == c || a == via || c == via {
                return fail("face swap needs distinct vertices on each face");
            }
            if !face_in.is_valid() || !face_out.is_valid() {
                return fail("cited face is not a face");
            }
            if !(face_in.contains(a) && face_in.contains(b) && face_in.contains(via)) {
                return fail("entry face does not match the path segment");
            }
            if !(face_out.contains(b) && face_out.contains(c) && face_out.contains(via)) {
                return fail("exit face does not match the path segment");
            }
            verts[at + 1] = via.clone();
            Ok(())
        }
    }
}

/// Removes every immediate reversal, recording one retraction per removal.
pub fn remove_backtracks(p: &EdgePath) -> (EdgePath, Vec<ContractionMove>) {
    let mut verts = p.verts().to_vec();
    let mut moves = Vec::new();
    sweep_backtracks(&mut verts, &mut moves);
    (EdgePath { verts }, moves)
}

fn sweep_backtracks(verts: &mut Vec<LatticeClass>, moves: &mut Vec<ContractionMove>) {
    'outer: loop {
        for i in 0..verts.len().saturating_sub(2) {
            if verts[i] == verts[i + 2] {
                let mv = ContractionMove::BacktrackRetract { at: i };
                apply_move(verts, &mv).expect("detected backtrack applies");
                moves.push(mv);
                continue 'outer;
            }
        }
        return;
    }
}

/// The measure of a path; callers pass closed paths.
pub fn measure(p: &EdgePath) -> ContractionMeasure {
    ContractionMeasure {
        length: p.len_edges(),
        n_p: critical_index(p.verts()),
    }
}

fn critical_index(verts: &[LatticeClass]) -> usize {
    let edges = verts.len() - 1;
    if edges < 2 {
        return 0;
    }
    for n in 1..edges {
        if distance(&verts[0], &verts[n + 1]) < (n + 1) as i64 {
            return n;
        }
    }
    unreachable!("a closed path returns to distance zero");
}

/// Runs the contraction and also reports the measure at the start of every
/// phase, which must decrease strictly in lexicographic order.
pub fn contract_loop_traced(
    p: &EdgePath,
) -> Result<(Vec<ContractionMove>, Vec<ContractionMeasure>)> {
    if !p.is_closed() {
        return Err(Error::NotClosed);
    }
    let mut verts = p.verts().to_vec();
    let mut moves = Vec::new();
    let mut trace = Vec::new();
    sweep_backtracks(&mut verts, &mut moves);
    let mut prev: Option<ContractionMeasure> = None;
    loop {
        let length = verts.len() - 1;
        if length == 0 {
            return Ok((moves, trace));
        }
        assert!(length >= 3, "closed backtrack-free paths have 0 or >= 3 edges");
        let m = ContractionMeasure {
            length,
            n_p: critical_index(&verts),
        };
        if let Some(pm) = prev {
            if m >= pm {
                return Err(Error::Contraction(format!(
                    "measure did not decrease: ({}, {}) -> ({}, {})",
                    pm.length, pm.n_p, m.length, m.n_p
                )));
            }
        }
        prev = Some(m);
        trace.push(m);
        let n = m.n_p;
        if n == 1 {
            // the distance drops immediately: the first three vertices span
            // a face and the path pushes across it
            let face = Face::try_new(verts[0].clone(), verts[1].clone(), verts[2].clone())
                .map_err(|_| {
                    Error::Contraction("first three vertices must span a face".into())
                })?;
            let mv = ContractionMove::FacePushShorten { at: 0, face };
            apply_move(&mut verts, &mv)?;
            moves.push(mv);
        } else {
            deform_at(&mut verts, &mut moves, n)?;
        }
        sweep_backtracks(&mut verts, &mut moves);
    }
}

/// Contracts a closed path to its basepoint, returning the certified moves.
pub fn contract_loop(p: &EdgePath) -> Result<Vec<ContractionMove>> {
    contract_loop_traced(p).map(|(moves, _)| moves)
}

/// One deformation at critical index `n >= 2`.
fn deform_at(
    verts: &mut Vec<LatticeClass>,
    moves: &mut Vec<ContractionMove>,
    n: usize,
) -> Result<()> {
    let ctx = *verts[0].ctx();
    let base = verts[0].clone();
    debug_assert_eq!(distance(&base, &verts[n - 1]), (n - 1) as i64);
    debug_assert_eq!(distance(&base, &verts[n]), n as i64);

    let sf = loop_step_frame(&base, &verts[n - 1], &verts[n])?;
    debug_assert_eq!(sf.a, (n - 1) as i64);
    let b1 = sf.b1;
    let bb = b1 + 1; // the adapted second exponent of verts[n] inside the base
    let frame = sf.frame;
    let nn = n as i64;

    let l0 = LatticeBasis::new(frame.clone()).expect("frame is nonsingular");
    let ln_exp2 = match sf.case {
        LoopCase::B1 => bb,
        LoopCase::B2 => b1,
    };
    let ln = LatticeBasis::new(frame.mul(&Mat3::p_diag(&ctx, nn, ln_exp2, 0)))
        .expect("nonsingular");
    debug_assert_eq!(canonical_class(&ctx, &l0), base);
    debug_assert_eq!(
        canonical_class(
            &ctx,
            &LatticeBasis::new(frame.mul(&Mat3::p_diag(&ctx, nn - 1, b1, 0))).unwrap()
        ),
        verts[n - 1]
    );
    debug_assert_eq!(canonical_class(&ctx, &ln), verts[n]);

    let (_, lnp1) = tight_fit(&ctx, &ln, verts[n + 1].canon());
    let out_rank = residue_image(&ctx, &ln, &lnp1).dim();
    let pl0 = l0.scaled(&ctx, 1);
    let contained = lattice_contains(&ctx, &pl0, &lnp1);

    let impossible = |msg: &str| Err(Error::Contraction(msg.into()));
    match (sf.case, out_rank, contained) {
        (LoopCase::B1, 1, true) => {
            // the three path vertices span a face; push across it
            shorten(verts, moves, n - 1)
        }
        (LoopCase::B1, 1, false) => {
            impossible("outgoing rank-1 step outside p L0 would push the distance to n + 1")
        }
        (LoopCase::B1, 2, true) => {
            impossible("outgoing rank-2 step inside p L0 forces a backtrack")
        }
        (LoopCase::B1, 2, false) => {
            // lower route: reroute through span(p^(n-1) e1, p^b e2, e3)
            let mut fr = frame;
            normalize_e3_into(&ctx, &mut fr, bb, &lnp1, &ln)?;
            let ln2 = LatticeBasis::new(fr.mul(&Mat3::p_diag(&ctx, nn, bb, 0))).unwrap();
            debug_assert!(same_lattice(&ctx, &ln, &ln2));
            let rows = residue_image(&ctx, &ln2, &lnp1).basis_raw();
            let g0 = crate::building::intersection_with_first_two(&rows, ctx.prime());
            if g0[1] != 0 {
                return impossible(
                    "rank-2 step through the second coordinate would push the distance to n + 1",
                );
            }
            if bb == nn {
                return impossible(
                    "rank-2 step with equal exponents reduces to the previous contradiction",
                );
            }
            let via_basis =
                LatticeBasis::new(fr.mul(&Mat3::p_diag(&ctx, nn - 1, bb, 0))).unwrap();
            swap_mid(verts, moves, n - 1, canonical_class(&ctx, &via_basis))
        }
        (LoopCase::B2, 1, true) => {
            if bb > 1 {
                // lower route through span(p^n e1, p^(b-1) e2, p e3)
                let via_basis =
                    LatticeBasis::new(frame.mul(&Mat3::p_diag(&ctx, nn, b1, 1))).unwrap();
                swap_mid(verts, moves, n - 1, canonical_class(&ctx, &via_basis))
            } else {
                // with b = 1 the containment pins verts[n+1] to p times the
                // class of verts[n-1], a backtrack removed before this phase
                impossible("rank-1 step inside p L0 with b = 1 forces a backtrack")
            }
        }
        (LoopCase::B2, 1, false) => {
            impossible("outgoing rank-1 step outside p L0 would push the distance to n + 1")
        }
        (LoopCase::B2, 2, true) => {
            let expected =
                LatticeBasis::new(frame.mul(&Mat3::p_diag(&ctx, nn, b1, 1))).unwrap();
            if !same_lattice(&ctx, &lnp1, &expected) {
                return impossible("rank-2 step inside p L0 must equal the pinned lattice");
            }
            shorten(verts, moves, n - 1)
        }
        (LoopCase::B2, 2, false) => {
            let mut fr = frame;
            normalize_e3_into(&ctx, &mut fr, b1, &lnp1, &ln)?;
            let ln2 = LatticeBasis::new(fr.mul(&Mat3::p_diag(&ctx, nn, b1, 0))).unwrap();
            debug_assert!(same_lattice(&ctx, &ln, &ln2));
            let rows = residue_image(&ctx, &ln2, &lnp1).basis_raw();
            let g0 = crate::building::intersection_with_first_two(&rows, ctx.prime());
            if g0[1] != 0 {
                return impossible(
                    "rank-2 step through the second coordinate would push the distance to n + 1",
                );
            }
            let expected = LatticeBasis::new(fr.mul(&Mat3::p_diag(&ctx, nn, bb, 0))).unwrap();
            if !same_lattice(&ctx, &lnp1, &expected) {
                return impossible("rank-2 step must land on the face-completing lattice");
            }
            shorten(verts, moves, n - 1)
        }
        (_, r, _) => unreachable!("residue image rank must be 1 or 2, got {r}"),
    }
}

/// Replaces `e3` by a vector of `next` that lies outside `p L0`, normalized
/// to unit third coordinate in the `ln` basis.  `exp2` is the middle
/// exponent of `ln` in the frame; when it vanishes the last two basis
/// vectors are symmetric, and a vector with a unit second coordinate is
/// accepted by swapping them.  The basis shapes of the intermediate lattices
/// are preserved by this change.
fn normalize_e3_into(
    ctx: &DVRContext,
    frame: &mut Mat3,
    exp2: i64,
    next: &LatticeBasis,
    ln: &LatticeBasis,
) -> Result<()> {
    let l0_inv = frame.inverse().expect("nonsingular");
    let w = (0..3)
        .map(|j| next.mat().col(j))
        .find(|w| {
            let coords = l0_inv.mul_vec(w);
            coords.iter().any(|c| match ctx.valuation(c) {
                Valuation::Finite(v) => v < 1,
                Valuation::Infinite => false,
            })
        })
        .ok_or_else(|| Error::Contraction("next lattice lies inside p L0".into()))?;
    let ln_inv = ln.mat().inverse().expect("nonsingular");
    let mut coords = ln_inv.mul_vec(&w);
    let unit_third = matches!(ctx.valuation(&coords[2]), Valuation::Finite(0));
    if !unit_third {
        if exp2 != 0 || !matches!(ctx.valuation(&coords[1]), Valuation::Finite(0)) {
            return Err(Error::Contraction(
                "vector outside p L0 must have a unit coordinate on e2 or e3".into(),
            ));
        }
        frame.swap_cols(1, 2);
        coords.swap(1, 2);
    }
    let zinv = coords[2].clone().recip();
    let new_e3: [Scalar; 3] = std::array::from_fn(|i| &w[i] * &zinv);
    for (i, value) in new_e3.iter().enumerate() {
        frame.set(i, 2, value.clone());
    }
    Ok(())
}

fn shorten(
    verts: &mut Vec<LatticeClass>,
    moves: &mut Vec<ContractionMove>,
    at: usize,
) -> Result<()> {
    let face = Face::try_new(
        verts[at].clone(),
        verts[at + 1].clone(),
        verts[at + 2].clone(),
    )
    .map_err(|_| Error::Contraction("shortening segment must span a face".into()))?;
    let mv = ContractionMove::FacePushShorten { at, face };
    apply_move(verts, &mv)?;
    moves.push(mv);
    Ok(())
}

fn swap_mid(
    verts: &mut Vec<LatticeClass>,
    moves: &mut Vec<ContractionMove>,
    at: usize,
    via: LatticeClass,
) -> Result<()> {
    let base = &verts[0];
    debug_assert_eq!(distance(base, &via), at as i64);
    let face_in = Face::try_new(verts[at].clone(), verts[at + 1].clone(), via.clone())
        .map_err(|_| Error::Contraction("entry face of the lower route is missing".into()))?;
    let face_out = Face::try_new(verts[at + 1].clone(), verts[at + 2].clone(), via.clone())
        .map_err(|_| Error::Contraction("exit face of the lower route is missing".into()))?;
    let mv = ContractionMove::FaceSwapMid {
        at,
        via,
        face_in,
        face_out,
    };
    apply_move(verts, &mv)?;
    moves.push(mv);
    Ok(())
}

/// Replays a certificate against a path: every move must be locally valid
/// (real faces, indices in range) and the final path must be a single
/// vertex.
pub fn verify_moves(p: &EdgePath, moves: &[ContractionMove]) -> bool {
    let mut verts = p.verts().to_vec();
    for mv in moves {
        if apply_move(&mut verts, mv).is_err() {
            return false;
        }
    }
    verts.len() == 1
}

// ---------------------------------------------------------------------------
// wire format
// ---------------------------------------------------------------------------

/// Serialization record for a move; faces are stored as vertex matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MoveRecord {
    BacktrackRetract {
        at: usize,
    },
    FacePushShorten {
        at: usize,
        face: Vec<Mat3>,
    },
    FacePushLengthen {
        at: usize,
        face: Vec<Mat3>,
        via: Mat3,
    },
    FaceSwapMid {
        at: usize,
        via: Mat3,
        face_in: Vec<Mat3>,
        face_out: Vec<Mat3>,
    },
}

fn face_to_mats(f: &Face) -> Vec<Mat3> {
    f.verts().iter().map(|v| v.canon().mat().clone()).collect()
}

fn face_from_mats(ctx: &DVRContext, mats: &[Mat3]) -> Result<Face> {
    if mats.len() != 3 {
        return Err(Error::Parse("face needs exactly 3 matrices".into()));
    }
    let mut verts = Vec::with_capacity(3);
    for m in mats {
        verts.push(LatticeClass::from_mat(ctx, m.clone())?);
    }
    // structural decode only; semantic validity is re-checked on replay
    Ok(Face::from_verts_unchecked([
        verts[0].clone(),
        verts[1].clone(),
        verts[2].clone(),
    ]))
}

pub fn move_to_record(mv: &ContractionMove) -> MoveRecord {
    match mv {
        ContractionMove::BacktrackRetract { at } => MoveRecord::BacktrackRetract { at: *at },
        ContractionMove::FacePushShorten { at, face } => MoveRecord::FacePushShorten {
            at: *at,
            face: face_to_mats(face),
        },
        ContractionMove::FacePushLengthen { at, face, via } => MoveRecord::FacePushLengthen {
            at: *at,
            face: face_to_mats(face),
            via: via.canon().mat().clone(),
        },
        ContractionMove::FaceSwapMid {
            at,
            via,
            face_in,
            face_out,
        } => MoveRecord::FaceSwapMid {
            at: *at,
            via: via.canon().mat().clone(),
            face_in: face_to_mats(face_in),
            face_out: face_to_mats(face_out),
        },
    }
}

pub fn record_to_move(ctx: &DVRContext, rec: &MoveRecord) -> Result<ContractionMove> {
    Ok(match rec {
        MoveRecord::BacktrackRetract { at } => ContractionMove::BacktrackRetract { at: *at },
        MoveRecord::FacePushShorten { at, face } => ContractionMove::FacePushShorten {
            at: *at,
            face: face_from_mats(ctx, face)?,
        },
        MoveRecord::FacePushLengthen { at, face, via } => ContractionMove::FacePushLengthen {
            at: *at,
            face: face_from_mats(ctx, face)?,
            via: LatticeClass::from_mat(ctx, via.clone())?,
        },
        MoveRecord::FaceSwapMid {
            at,
            via,
            face_in,
            face_out,
        } => ContractionMove::FaceSwapMid {
            at: *at,
            via: LatticeClass::from_mat(ctx, via.clone())?,
            face_in: face_from_mats(ctx, face_in)?,
            face_out: face_from_mats(ctx, face_out)?,
        },
    })
}

pub fn moves_to_json(moves: &[ContractionMove]) -> String {
    let recs: Vec<MoveRecord> = moves.iter().map(move_to_record).collect();
    serde_json::to_string_pretty(&recs).expect("serializable")
}

pub fn moves_from_json(ctx: &DVRContext, s: &str) -> Result<Vec<ContractionMove>> {
    let recs: Vec<MoveRecord> =
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    recs.iter().map(|r| record_to_move(ctx, r)).collect()
}
