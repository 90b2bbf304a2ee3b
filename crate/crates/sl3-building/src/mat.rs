//! Exact 3x3 matrices over the rationals.
//!
//! Text format: three lines of three whitespace-separated scalar tokens.
//! JSON format: an array of three arrays of three strings, so that entries
//! like `"1/2"` survive serialization exactly.

use std::fmt;

use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dvr::{parse_scalar, scalar_from_i64, DVRContext, Scalar, Valuation};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mat3 {
    m: [[Scalar; 3]; 3],
}

impl Mat3 {
    pub fn new(m: [[Scalar; 3]; 3]) -> Self {
        Mat3 { m }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        Mat3 {
            m: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))),
        }
    }

    pub fn from_i64(entries: [[i64; 3]; 3]) -> Self {
        Mat3::from_fn(|i, j| scalar_from_i64(entries[i][j]))
    }

    pub fn identity() -> Self {
        Mat3::from_fn(|i, j| if i == j { Scalar::one() } else { Scalar::zero() })
    }

    pub fn diag(d0: Scalar, d1: Scalar, d2: Scalar) -> Self {
        let d = [d0, d1, d2];
        Mat3::from_fn(|i, j| if i == j { d[i].clone() } else { Scalar::zero() })
    }

    /// diag(p^a, p^b, p^c)
    pub fn p_diag(ctx: &DVRContext, a: i64, b: i64, c: i64) -> Self {
        Mat3::diag(ctx.p_pow(a), ctx.p_pow(b), ctx.p_pow(c))
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.m[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.m[i][j] = v;
    }

    pub fn col(&self, j: usize) -> [Scalar; 3] {
        std::array::from_fn(|i| self.m[i][j].clone())
    }

    pub fn from_cols(cols: [[Scalar; 3]; 3]) -> Self {
        Mat3::from_fn(|i, j| cols[j][i].clone())
    }

    pub fn mul(&self, other: &Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| {
            (0..3)
                .map(|k| &self.m[i][k] * &other.m[k][j])
                .fold(Scalar::zero(), |a, b| a + b)
        })
    }

    pub fn mul_vec(&self, v: &[Scalar; 3]) -> [Scalar; 3] {
        std::array::from_fn(|i| {
            (0..3)
                .map(|k| &self.m[i][k] * &v[k])
                .fold(Scalar::zero(), |a, b| a + b)
        })
    }

    pub fn scale(&self, s: &Scalar) -> Mat3 {
        Mat3::from_fn(|i, j| &self.m[i][j] * s)
    }

    pub fn scale_col(&mut self, j: usize, s: &Scalar) {
        for i in 0..3 {
            self.m[i][j] = &self.m[i][j] * s;
        }
    }

    /// column j -= s * column k
    pub fn col_sub(&mut self, j: usize, k: usize, s: &Scalar) {
        for i in 0..3 {
            self.m[i][j] = &self.m[i][j] - &(&self.m[i][k] * s);
        }
    }

    pub fn swap_cols(&mut self, j: usize, k: usize) {
        for i in 0..3 {
            self.m[i].swap(j, k);
        }
    }

    pub fn det(&self) -> Scalar {
        let m = &self.m;
        let t0 = &m[0][0] * &(&(&m[1][1] * &m[2][2]) - &(&m[1][2] * &m[2][1]));
        let t1 = &m[0][1] * &(&(&m[1][0] * &m[2][2]) - &(&m[1][2] * &m[2][0]));
        let t2 = &m[0][2] * &(&(&m[1][0] * &m[2][1]) - &(&m[1][1] * &m[2][0]));
        t0 - t1 + t2
    }

    /// Exact inverse by the adjugate; errors on a singular matrix.
    pub fn inverse(&self) -> Result<Mat3> {
        let d = self.det();
        if d.is_zero() {
            return Err(Error::Singular);
        }
        let m = &self.m;
        let cof = |i: usize, j: usize| {
            let r: Vec<usize> = (0..3).filter(|&x| x != i).collect();
            let c: Vec<usize> = (0..3).filter(|&x| x != j).collect();
            let minor =
                &(&m[r[0]][c[0]] * &m[r[1]][c[1]]) - &(&m[r[0]][c[1]] * &m[r[1]][c[0]]);
            if (i + j) % 2 == 0 {
                minor
            } else {
                -minor
            }
        };
        // adjugate is the transposed cofactor matrix
        Ok(Mat3::from_fn(|i, j| cof(j, i) / d.clone()))
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat3::identity()
    }

    /// Minimum valuation over all entries; `Infinite` only for the zero matrix.
    pub fn min_valuation(&self, ctx: &DVRContext) -> Valuation {
        let mut best = Valuation::Infinite;
        for i in 0..3 {
            for j in 0..3 {
                let v = ctx.valuation(&self.m[i][j]);
                if v < best {
                    best = v;
                }
            }
        }
        best
    }

    /// True when every entry has valuation >= 0.
    pub fn is_integral(&self, ctx: &DVRContext) -> bool {
        match self.min_valuation(ctx) {
            Valuation::Infinite => true,
            Valuation::Finite(v) => v >= 0,
        }
    }

    /// Reduction of an integral matrix to a 3x3 matrix over `F_p`,
    /// as rows of residue representatives.
    pub fn residue(&self, ctx: &DVRContext) -> Result<[[u64; 3]; 3]> {
        let mut out = [[0u64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = ctx.residue(&self.m[i][j])?.rep();
            }
        }
        Ok(out)
    }

    /// Parses the three-line text format.
    pub fn parse_text(s: &str) -> Result<Mat3> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        if tokens.len() != 9 {
            return Err(Error::Parse(format!(
                "expected 9 matrix entries, found {}",
                tokens.len()
            )));
        }
        let mut entries: Vec<Scalar> = Vec::with_capacity(9);
        for t in tokens {
            entries.push(parse_scalar(t)?);
        }
        Ok(Mat3::from_fn(|i, j| entries[3 * i + j].clone()))
    }

    /// Renders the three-line text format.
    pub fn to_text(&self) -> String {
        self.m
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// One-line rendering, row-major with nine tokens.
    pub fn to_line(&self) -> String {
        self.m
            .iter()
            .flat_map(|row| row.iter().map(|x| x.to_string()))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl Serialize for Mat3 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .m
            .iter()
            .map(|row| row.iter().map(|x| x.to_string()).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Mat3 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(deserializer)?;
        if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
            return Err(D::Error::custom("expected a 3x3 array of strings"));
        }
        let mut m = Mat3::identity();
        for (i, row) in rows.iter().enumerate() {
            for (j, tok) in row.iter().enumerate() {
                let s = parse_scalar(tok).map_err(|e| D::Error::custom(e.to_string()))?;
                m.set(i, j, s);
            }
        }
        Ok(m)
    }
}
