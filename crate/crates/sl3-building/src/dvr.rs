//! The base discrete valuation ring: the integers localized at a prime `p`
//! inside the rationals, with uniformizer `p` and residue field `F_p`.
//!
//! Field elements are exact rationals in lowest terms.  The context carries
//! only the prime; every operation is a pure function of its inputs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// An exact element of the field: a rational number in lowest terms.
pub type Scalar = BigRational;

/// The p-adic valuation of a scalar, with `Infinite` reserved for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl std::fmt::Display for Valuation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// The valuation context: a prime `p`, which is both the uniformizer and the
/// size of the residue field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DVRContext {
    p: u64,
}

impl DVRContext {
    /// Creates a context for the prime `p`.  Rejects composites and 0, 1.
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(DVRContext { p })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Residue field size; the residue field is the prime field `F_p`.
    pub fn q(&self) -> u64 {
        self.p
    }

    fn p_big(&self) -> BigInt {
        BigInt::from(self.p)
    }

    /// `p^k` as a scalar, for any integer `k`.
    pub fn p_pow(&self, k: i64) -> Scalar {
        let pk = self.p_big().pow(k.unsigned_abs() as u32);
        if k >= 0 {
            BigRational::from_integer(pk)
        } else {
            BigRational::new(BigInt::one(), pk)
        }
    }

    /// The exponent `v` with `x = p^v * u` for a p-adic unit `u`; zero maps
    /// to `Infinite`.
    pub fn valuation(&self, x: &Scalar) -> Valuation {
        if x.is_zero() {
            return Valuation::Infinite;
        }
        let vn = int_valuation(x.numer(), &self.p_big());
        let vd = int_valuation(x.denom(), &self.p_big());
        Valuation::Finite(vn - vd)
    }

    /// Valuation of a scalar known to be nonzero.
    pub(crate) fn val(&self, x: &Scalar) -> i64 {
        match self.valuation(x) {
            Valuation::Finite(v) => v,
            Valuation::Infinite => panic!("valuation of zero"),
        }
    }

    /// Image of an integral scalar in the residue field.
    pub fn residue(&self, x: &Scalar) -> Result<ResidueScalar> {
        match self.valuation(x) {
            Valuation::Finite(v) if v < 0 => Err(Error::NotIntegral),
            Valuation::Infinite => Ok(ResidueScalar::new(0, self.p)),
            Valuation::Finite(_) => {
                let p = self.p_big();
                let n = x.numer().mod_floor(&p);
                let d = x.denom().mod_floor(&p);
                let n64 = n.to_u64_digits().1.first().copied().unwrap_or(0);
                let d64 = d.to_u64_digits().1.first().copied().unwrap_or(0);
                let dinv = mod_inverse(d64, self.p).expect("denominator is a p-adic unit");
                Ok(ResidueScalar::new(mulmod(n64, dinv, self.p), self.p))
            }
        }
    }

    /// The integer representative of a residue class, as a scalar in `[0, p)`.
    pub fn lift(&self, r: ResidueScalar) -> Scalar {
        debug_assert_eq!(r.modulus(), self.p);
        BigRational::from_integer(BigInt::from(r.rep()))
    }

    /// Canonical representative of the coset `x + p^a O` inside the field.
    ///
    /// For integral inputs with `a >= 0` this is the integer in `[0, p^a)`
    /// congruent to `x`; in general it is `c * p^(a-t)` with `c` an integer in
    /// `[0, p^t)` coprime to `p`, where `t = a - val(x)`.
    pub(crate) fn coset_rep(&self, x: &Scalar, a: i64) -> Scalar {
        let v = match self.valuation(x) {
            Valuation::Infinite => return Scalar::zero(),
            Valuation::Finite(v) => v,
        };
        if v >= a {
            return Scalar::zero();
        }
        let t = (a - v) as u32;
        let pt = self.p_big().pow(t);
        // y = x / p^(a-t) is a unit; reduce it mod p^t by clearing the
        // denominator with a modular inverse.
        let y = x * self.p_pow(t as i64 - a);
        debug_assert_eq!(self.val(&y), 0);
        let n = y.numer().mod_floor(&pt);
        let d = y.denom().mod_floor(&pt);
        let dinv = big_mod_inverse(&d, &pt).expect("denominator is a unit mod p^t");
        let c = (n * dinv).mod_floor(&pt);
        BigRational::from_integer(c) * self.p_pow(a - t as i64)
    }
}

/// An element of the residue field `F_p`, stored as its representative in
/// `[0, p)` together with the modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueScalar {
    rep: u64,
    p: u64,
}

impl ResidueScalar {
    pub fn new(rep: u64, p: u64) -> Self {
        ResidueScalar { rep: rep % p, p }
    }

    pub fn rep(&self) -> u64 {
        self.rep
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.rep == 0
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        ResidueScalar::new(self.rep + other.rep, self.p)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        ResidueScalar::new(self.rep + self.p - other.rep, self.p)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        ResidueScalar::new(mulmod(self.rep, other.rep, self.p), self.p)
    }

    pub fn neg(&self) -> Self {
        ResidueScalar::new(self.p - self.rep, self.p)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        mod_inverse(self.rep, self.p).map(|i| ResidueScalar::new(i, self.p))
    }
}

impl std::fmt::Display for ResidueScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.rep)
    }
}

/// Parses a scalar from `"a"` or `"a/b"` with optionally signed integers.
/// Rejects a zero denominator.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid scalar {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = match den {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

pub(crate) fn scalar_from_i64(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let mut v = 0i64;
    let mut cur = n.abs();
    loop {
        let (q, r) = cur.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        cur = q;
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        return None;
    }
    // extended Euclid on (a, p)
    let (mut r0, mut r1) = (a as i128 % p as i128, p as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    Some(s0.rem_euclid(p as i128) as u64)
}

fn big_mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let egcd = a.extended_gcd(m);
    if !egcd.gcd.is_one() {
        return None;
    }
    Some(egcd.x.mod_floor(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(p: u64) -> DVRContext {
        DVRContext::new(p).unwrap()
    }

    fn rat(n: i64, d: i64) -> Scalar {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rejects_composite_primes() {
        assert_eq!(DVRContext::new(4), Err(Error::NotPrime(4)));
        assert_eq!(DVRContext::new(1), Err(Error::NotPrime(1)));
        assert_eq!(DVRContext::new(0), Err(Error::NotPrime(0)));
        assert!(DVRContext::new(101).is_ok());
    }

    #[test]
    fn valuation_of_uniformizer_is_one() {
        let c = ctx(5);
        assert_eq!(c.valuation(&rat(5, 1)), Valuation::Finite(1));
    }

    #[test]
    fn valuation_examples() {
        let c = ctx(2);
        assert_eq!(c.valuation(&rat(3, 4)), Valuation::Finite(-2));
        assert_eq!(c.valuation(&Scalar::zero()), Valuation::Infinite);
        assert_eq!(c.valuation(&rat(12, 1)), Valuation::Finite(2));
    }

    #[test]
    fn residue_examples() {
        assert_eq!(ctx(5).residue(&rat(7, 1)).unwrap().rep(), 2);
        // 1/3 = 1 mod 2 because 3 = 1
        assert_eq!(ctx(2).residue(&rat(1, 3)).unwrap().rep(), 1);
        assert_eq!(ctx(5).residue(&rat(5, 1)).unwrap().rep(), 0);
        assert_eq!(ctx(2).residue(&rat(1, 2)), Err(Error::NotIntegral));
    }

    #[test]
    fn lift_sections_residue() {
        let c = ctx(3);
        assert_eq!(c.lift(ResidueScalar::new(0, 3)), Scalar::zero());
        assert_eq!(c.lift(ResidueScalar::new(2, 3)), rat(2, 1));
        for r in 0..3 {
            let rs = ResidueScalar::new(r, 3);
            assert_eq!(c.residue(&c.lift(rs)).unwrap(), rs);
        }
    }

    fn random_nonzero(rng: &mut impl Rng, p: i64) -> Scalar {
        loop {
            let n = rng.gen_range(-40i64..=40);
            let d = rng.gen_range(1i64..=40);
            let e = rng.gen_range(-3i64..=3);
            if n != 0 {
                let base = rat(n, d);
                let shift = if e >= 0 {
                    rat(p.pow(e as u32), 1)
                } else {
                    rat(1, p.pow((-e) as u32))
                };
                return base * shift;
            }
        }
    }

    #[test]
    fn valuation_is_multiplicative_and_ultrametric() {
        for p in [2u64, 3, 5] {
            let c = ctx(p);
            let mut rng = ChaCha8Rng::seed_from_u64(7 + p);
            for _ in 0..200 {
                let x = random_nonzero(&mut rng, p as i64);
                let y = random_nonzero(&mut rng, p as i64);
                let vx = c.val(&x);
                let vy = c.val(&y);
                assert_eq!(c.val(&(x.clone() * y.clone())), vx + vy);
                let s = x.clone() + y.clone();
                match c.valuation(&s) {
                    Valuation::Infinite => assert_eq!(vx, vy),
                    Valuation::Finite(vs) => {
                        assert!(vs >= vx.min(vy));
                        if vx != vy {
                            assert_eq!(vs, vx.min(vy));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn residue_is_a_ring_homomorphism() {
        for p in [2u64, 3, 5] {
            let c = ctx(p);
            let mut rng = ChaCha8Rng::seed_from_u64(99 + p);
            for _ in 0..200 {
                // integral scalars only
                let x = loop {
                    let s = random_nonzero(&mut rng, p as i64);
                    if c.val(&s) >= 0 {
                        break s;
                    }
                };
                let y = loop {
                    let s = random_nonzero(&mut rng, p as i64);
                    if c.val(&s) >= 0 {
                        break s;
                    }
                };
                let rx = c.residue(&x).unwrap();
                let ry = c.residue(&y).unwrap();
                assert_eq!(c.residue(&(x.clone() + y.clone())).unwrap(), rx.add(&ry));
                assert_eq!(c.residue(&(x.clone() * y.clone())).unwrap(), rx.mul(&ry));
            }
        }
    }

    #[test]
    fn residue_vanishes_exactly_on_positive_valuation() {
        let c = ctx(3);
        for n in 1..40i64 {
            let x = rat(n, 1);
            let r = c.residue(&x).unwrap();
            assert_eq!(r.is_zero(), c.val(&x) >= 1);
        }
    }

    #[test]
    fn coset_reps_are_canonical() {
        let c = ctx(2);
        // integral case: integer in [0, p^a)
        assert_eq!(c.coset_rep(&rat(5, 1), 2), rat(1, 1));
        assert_eq!(c.coset_rep(&rat(4, 1), 2), Scalar::zero());
        // fractional case keeps the p-power denominator
        assert_eq!(c.coset_rep(&rat(1, 2), 0), rat(1, 2));
        assert_eq!(c.coset_rep(&rat(3, 2), 0), rat(1, 2));
        assert_eq!(c.coset_rep(&rat(7, 4), 1), rat(7, 4));
        assert_eq!(c.coset_rep(&rat(15, 4), 1), rat(7, 4));
        // the representative differs from the input by an element of p^a O
        let x = rat(29, 12);
        let r = c.coset_rep(&x, 3);
        assert!(c.val(&(x - r)) >= 3);
    }

    #[test]
    fn residue_field_inverses() {
        for p in [2u64, 3, 5, 7] {
            for a in 1..p {
                let x = ResidueScalar::new(a, p);
                let inv = x.inv().unwrap();
                assert_eq!(x.mul(&inv).rep(), 1);
            }
            assert!(ResidueScalar::new(0, p).inv().is_none());
        }
    }

    #[test]
    fn parse_scalar_formats() {
        assert_eq!(parse_scalar("3").unwrap(), rat(3, 1));
        assert_eq!(parse_scalar("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_scalar(" 7/2 ").unwrap(), rat(7, 2));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
        assert!(parse_scalar("1.5").is_err());
    }
}
