//! Lattices and lattice classes.
//!
//! A lattice is the module spanned over the base ring by the columns of a
//! nonsingular rational matrix; two lattices are equivalent when one is a
//! `p`-power multiple of the other.  Classes get a unique canonical
//! representative so that equality, hashing, and ordering are structural:
//! scale the determinant valuation into `{0, 1, 2}`, then column-reduce to
//! the lower-triangular Hermite form over the valuation ring with pivots
//! `p^a` and coset-canonical entries below the diagonal.

use num_traits::Zero;

use crate::dvr::{DVRContext, Scalar, Valuation};
use crate::mat::Mat3;
use crate::{Error, Result};

/// A basis of a lattice: the columns of a nonsingular 3x3 rational matrix.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeBasis {
    mat: Mat3,
}

impl LatticeBasis {
    pub fn new(mat: Mat3) -> Result<Self> {
        if mat.det().is_zero() {
            return Err(Error::Singular);
        }
        Ok(LatticeBasis { mat })
    }

    pub fn mat(&self) -> &Mat3 {
        &self.mat
    }

    /// The same lattice scaled by `p^k`.
    pub fn scaled(&self, ctx: &DVRContext, k: i64) -> LatticeBasis {
        LatticeBasis {
            mat: self.mat.scale(&ctx.p_pow(k)),
        }
    }
}

/// A vertex of the complex: the canonical representative of a homothety
/// class of lattices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeClass {
    ctx: DVRContext,
    canon: LatticeBasis,
    det_valuation_mod3: u8,
}

impl LatticeClass {
    /// Canonicalizes an arbitrary basis; see [`canonical_class`].
    pub fn new(ctx: &DVRContext, basis: &LatticeBasis) -> LatticeClass {
        canonical_class(ctx, basis)
    }

    pub fn from_mat(ctx: &DVRContext, mat: Mat3) -> Result<LatticeClass> {
        Ok(canonical_class(ctx, &LatticeBasis::new(mat)?))
    }

    pub fn ctx(&self) -> &DVRContext {
        &self.ctx
    }

    pub fn canon(&self) -> &LatticeBasis {
        &self.canon
    }

    pub fn vertex_type(&self) -> u8 {
        self.det_valuation_mod3
    }

    pub fn distance(&self, other: &LatticeClass) -> i64 {
        distance(self, other)
    }
}

impl std::fmt::Display for LatticeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.canon.mat())
    }
}

/// The adapted-basis exponents of one lattice inside another: the scaled
/// basis `(p^a e1, p^b e2, e3)` with `a >= b >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ElementaryDivisors {
    pub a: i64,
    pub b: i64,
}

/// The unique canonical representative of the class of `basis`.
///
/// Two bases map to equal results exactly when they span lattices in the
/// same class.
pub fn canonical_class(ctx: &DVRContext, basis: &LatticeBasis) -> LatticeClass {
    let det = basis.mat().det();
    let v = ctx.val(&det);
    let t = v.rem_euclid(3);
    let k = (t - v) / 3;
    let scaled = basis.scaled(ctx, k);
    let cols: Vec<[Scalar; 3]> = (0..3).map(|j| scaled.mat().col(j)).collect();
    let canon = hnf_columns(ctx, cols).expect("nonsingular basis");
    LatticeClass {
        ctx: *ctx,
        canon: LatticeBasis { mat: canon },
        det_valuation_mod3: t as u8,
    }
}

/// Column Hermite form over the valuation ring.
///
/// Accepts any generating set of a full lattice (three or more columns) and
/// returns the unique lower-triangular basis with diagonal `p^(a_i)` and,
/// below each diagonal, the canonical coset representative modulo
/// `p^(a_row)` times the ring.  Pivots take the entry of least valuation,
/// ties resolved by column index.
pub(crate) fn hnf_columns(ctx: &DVRContext, mut cols: Vec<[Scalar; 3]>) -> Result<Mat3> {
    let ncols = cols.len();
    assert!(ncols >= 3);
    let mut pivot_exp = [0i64; 3];
    for row in 0..3 {
        let mut best: Option<(i64, usize)> = None;
        for (j, col) in cols.iter().enumerate().take(ncols).skip(row) {
            if let Valuation::Finite(v) = ctx.valuation(&col[row]) {
                if best.map_or(true, |(bv, _)| v < bv) {
                    best = Some((v, j));
                }
            }
        }
        let (v, bj) = best.ok_or(Error::Singular)?;
        cols.swap(row, bj);
        pivot_exp[row] = v;
        // normalize the pivot to exactly p^v
        let unit = &cols[row][row] * ctx.p_pow(-v);
        let unit_inv = unit.recip();
        for i in 0..3 {
            cols[row][i] = &cols[row][i] * &unit_inv;
        }
        // clear this row to the right of the pivot
        for j in row + 1..ncols {
            let lam = &cols[j][row] * ctx.p_pow(-v);
            if lam.is_zero() {
                continue;
            }
            for i in 0..3 {
                cols[j][i] = &cols[j][i] - &(&lam * &cols[row][i]);
            }
        }
    }
    for col in cols.iter().skip(3) {
        debug_assert!(col.iter().all(|x| x.is_zero()));
    }
    // reduce below-pivot entries to canonical coset representatives
    for i in 0..3 {
        for j in i + 1..3 {
            let rep = ctx.coset_rep(&cols[i][j], pivot_exp[j]);
            let lam = (&cols[i][j] - &rep) * ctx.p_pow(-pivot_exp[j]);
            if lam.is_zero() {
                continue;
            }
            for r in 0..3 {
                cols[i][r] = &cols[i][r] - &(&lam * &cols[j][r]);
            }
        }
    }
    Ok(Mat3::from_cols([
        cols[0].clone(),
        cols[1].clone(),
        cols[2].clone(),
    ]))
}

/// Scales `m` by the unique `p^n` that fits it tightly inside `l`:
/// `p^n M` is contained in `L` but not in `p L`.
pub fn tight_fit(
    ctx: &DVRContext,
    l: &LatticeBasis,
    m: &LatticeBasis,
) -> (i64, LatticeBasis) {
    let c = l.mat().inverse().expect("nonsingular").mul(m.mat());
    let v = match c.min_valuation(ctx) {
        Valuation::Finite(v) => v,
        Valuation::Infinite => unreachable!("nonsingular matrix has a nonzero entry"),
    };
    let n = -v;
    (n, m.scaled(ctx, n))
}

/// Smith form over the valuation ring: returns `P` and exponents
/// `s0 <= s1 <= s2` with `C = P * diag(p^s0, p^s1, p^s2) * Q` for some
/// unimodular `P`, `Q`.  Requires an integral `C`.  Pivoting picks the entry
/// of least valuation, ties by smallest row then column.
pub(crate) fn smith_dvr(ctx: &DVRContext, c: &Mat3) -> Result<(Mat3, [i64; 3])> {
    let mut a = c.clone();
    let mut p_acc = Mat3::identity();
    let mut exps = [0i64; 3];
    for k in 0..3 {
        let mut best: Option<(i64, usize, usize)> = None;
        for i in k..3 {
            for j in k..3 {
                if let Valuation::Finite(v) = ctx.valuation(a.at(i, j)) {
                    if best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let (v, bi, bj) = best.ok_or(Error::Singular)?;
        if bi != k {
            swap_rows(&mut a, bi, k);
            p_acc.swap_cols(bi, k);
        }
        if bj != k {
            a.swap_cols(bj, k);
        }
        // pivot becomes exactly p^v
        let unit = a.at(k, k) * ctx.p_pow(-v);
        let unit_inv = unit.recip();
        scale_row(&mut a, k, &unit_inv);
        p_acc.scale_col(k, &unit);
        // the pivot has least valuation, so all quotients lie in the ring
        for i in k + 1..3 {
            let lam = a.at(i, k) * ctx.p_pow(-v);
            if !lam.is_zero() {
                row_sub(&mut a, i, k, &lam);
                let col_i = p_acc.col(i);
                for r in 0..3 {
                    let updated = p_acc.at(r, k) + &(&lam * &col_i[r]);
                    p_acc.set(r, k, updated);
                }
            }
        }
        for j in k + 1..3 {
            let lam = a.at(k, j) * ctx.p_pow(-v);
            if !lam.is_zero() {
                a.col_sub(j, k, &lam);
            }
        }
        exps[k] = v;
    }
    debug_assert!(exps[0] <= exps[1] && exps[1] <= exps[2]);
    Ok((p_acc, exps))
}

fn swap_rows(m: &mut Mat3, i: usize, j: usize) {
    for c in 0..3 {
        let a = m.at(i, c).clone();
        let b = m.at(j, c).clone();
        m.set(i, c, b);
        m.set(j, c, a);
    }
}

fn scale_row(m: &mut Mat3, i: usize, s: &Scalar) {
    for c in 0..3 {
        let v = m.at(i, c) * s;
        m.set(i, c, v);
    }
}

/// row i -= s * row k
fn row_sub(m: &mut Mat3, i: usize, k: usize, s: &Scalar) {
    for c in 0..3 {
        let v = m.at(i, c) - &(s * m.at(k, c));
        m.set(i, c, v);
    }
}

/// An adapted basis for a tight-fitting pair: a basis `(e1, e2, e3)` of `L`
/// such that `(p^a e1, p^b e2, e3)` is a basis of `M`, with `a >= b >= 0`.
///
/// Errors unless `M` is tight-fitting within `L`.
pub fn adapted_bases(
    ctx: &DVRContext,
    l: &LatticeBasis,
    m: &LatticeBasis,
) -> Result<(LatticeBasis, ElementaryDivisors)> {
    let c = l.mat().inverse().expect("nonsingular").mul(m.mat());
    match c.min_valuation(ctx) {
        Valuation::Finite(0) => {}
        _ => return Err(Error::NotTightFitting),
    }
    if !c.is_integral(ctx) {
        return Err(Error::NotTightFitting);
    }
    let (p_acc, exps) = smith_dvr(ctx, &c)?;
    debug_assert_eq!(exps[0], 0);
    let e_raw = l.mat().mul(&p_acc);
    // order columns by descending exponent to match (p^a e1, p^b e2, e3)
    let e = Mat3::from_cols([e_raw.col(2), e_raw.col(1), e_raw.col(0)]);
    Ok((
        LatticeBasis::new(e).expect("unimodular change of basis"),
        ElementaryDivisors {
            a: exps[2],
            b: exps[1],
        },
    ))
}

/// The distance between two classes: the larger adapted-basis exponent of a
/// tight-fitting pair of representatives.  Symmetric, and zero exactly on
/// equal classes.
pub fn distance(c1: &LatticeClass, c2: &LatticeClass) -> i64 {
    assert_eq!(c1.ctx, c2.ctx);
    let ctx = &c1.ctx;
    let (_, m) = tight_fit(ctx, &c1.canon, &c2.canon);
    let (_, d) = adapted_bases(ctx, &c1.canon, &m).expect("tight-fitting by construction");
    d.a
}

/// Valuation of the determinant of any representative basis, mod 3.
pub fn vertex_type(c: &LatticeClass) -> u8 {
    c.vertex_type()
}

/// True when `inner` is contained in `outer` as lattices (not classes).
pub(crate) fn lattice_contains(ctx: &DVRContext, outer: &LatticeBasis, inner: &LatticeBasis) -> bool {
    outer
        .mat()
        .inverse()
        .expect("nonsingular")
        .mul(inner.mat())
        .is_integral(ctx)
}

/// True when the two bases span exactly the same lattice.
pub(crate) fn same_lattice(ctx: &DVRContext, a: &LatticeBasis, b: &LatticeBasis) -> bool {
    lattice_contains(ctx, a, b) && lattice_contains(ctx, b, a)
}
