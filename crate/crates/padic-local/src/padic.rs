//! Truncated p-adic arithmetic over F = Q_p with per-element precision tracking.
//!
//! An element is stored as `p^val * unit` where the unit part is known modulo
//! `p^rel_prec` (so the element is known modulo `p^(val + rel_prec)`). Zero is
//! a separate state carrying only an absolute precision bound `O(p^abs)`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;
use thiserror::Error;

/// Default working precision (number of significant p-adic digits).
pub const DEFAULT_PRECISION: u32 = 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PAdicError {
    #[error("division by zero (zero to precision O(p^{0}))")]
    DivisionByZero(i64),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("p must be an odd prime, got {0}")]
    BadPrime(u64),
    #[error("{0}")]
    Invalid(String),
}

fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// `p^k` as a big integer.
pub fn p_pow(p: u64, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

fn mod_inverse(a: &BigUint, modulus: &BigUint) -> Option<BigUint> {
    // extended Euclid on (a, modulus), coefficients tracked over signed bigints
    use num_bigint::BigInt;
    use num_bigint::Sign;
    let mut r0 = BigInt::from_biguint(Sign::Plus, modulus.clone());
    let mut r1 = BigInt::from_biguint(Sign::Plus, a % modulus);
    let mut s0 = BigInt::from(0);
    let mut s1 = BigInt::from(1);
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
    }
    if !r0.is_one() {
        return None;
    }
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    let mut inv = s0 % &m;
    if inv.sign() == Sign::Minus {
        inv += &m;
    }
    Some(inv.to_biguint().unwrap())
}

#[derive(Clone, PartialEq, Eq)]
enum Repr {
    /// Zero up to O(p^abs).
    Zero { abs: i64 },
    /// p^val * unit with unit invertible, known mod p^rel.
    NonZero { val: i64, unit: BigUint, rel: u32 },
}

/// A truncated element of Q_p.
#[derive(Clone, PartialEq, Eq)]
pub struct PAdicElement {
    p: u64,
    repr: Repr,
}

impl fmt::Debug for PAdicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero { abs } => write!(f, "O({}^{})", self.p, abs),
            Repr::NonZero { val, unit, rel } => {
                write!(f, "{}^{} * {} (mod {}^{})", self.p, val, unit, self.p, rel)
            }
        }
    }
}

impl PAdicElement {
    pub fn zero(p: u64) -> Self {
        PAdicElement { p, repr: Repr::Zero { abs: DEFAULT_PRECISION as i64 } }
    }

    pub fn zero_prec(p: u64, abs: i64) -> Self {
        PAdicElement { p, repr: Repr::Zero { abs } }
    }

    pub fn one(p: u64) -> Self {
        Self::from_i64(p, 1)
    }

    /// Construct from an integer at default precision.
    pub fn from_i64(p: u64, n: i64) -> Self {
        Self::from_i64_prec(p, n, DEFAULT_PRECISION)
    }

    pub fn from_i64_prec(p: u64, n: i64, prec: u32) -> Self {
        assert!(is_odd_prime(p), "p must be an odd prime");
        if n == 0 {
            return PAdicElement { p, repr: Repr::Zero { abs: prec as i64 } };
        }
        let neg = n < 0;
        let mut m = n.unsigned_abs();
        let mut val = 0i64;
        while m % p == 0 {
            m /= p;
            val += 1;
        }
        let modulus = p_pow(p, prec);
        let mut unit = BigUint::from(m) % &modulus;
        if neg {
            unit = &modulus - unit;
        }
        PAdicElement { p, repr: Repr::NonZero { val, unit, rel: prec } }
    }

    /// `p^k` (k may be negative).
    pub fn from_p_power(p: u64, k: i64) -> Self {
        assert!(is_odd_prime(p));
        PAdicElement {
            p,
            repr: Repr::NonZero { val: k, unit: BigUint::one(), rel: DEFAULT_PRECISION },
        }
    }

    /// `n / d` as a p-adic number.
    pub fn from_ratio(p: u64, n: i64, d: i64) -> Self {
        assert!(d != 0);
        Self::from_i64(p, n)
            .div(&Self::from_i64(p, d))
            .expect("nonzero denominator")
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    /// Valuation; `None` for (truncated) zero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::NonZero { val, .. } => Some(*val),
        }
    }

    /// Absolute precision: the element is known modulo p^(this).
    pub fn abs_precision(&self) -> i64 {
        match &self.repr {
            Repr::Zero { abs } => *abs,
            Repr::NonZero { val, rel, .. } => val + *rel as i64,
        }
    }

    /// Relative precision of the unit part (0 for zero).
    pub fn rel_precision(&self) -> u32 {
        match &self.repr {
            Repr::Zero { .. } => 0,
            Repr::NonZero { rel, .. } => *rel,
        }
    }

    /// Unit part reduced mod p^k. Errors if zero or k exceeds the stored precision.
    pub fn unit_mod(&self, k: u32) -> Result<BigUint, PAdicError> {
        match &self.repr {
            Repr::Zero { abs } => Err(PAdicError::DivisionByZero(*abs)),
            Repr::NonZero { unit, rel, .. } => {
                if k > *rel {
                    return Err(PAdicError::PrecisionExhausted(format!(
                        "unit requested mod p^{k}, known mod p^{rel}"
                    )));
                }
                Ok(unit % p_pow(self.p, k))
            }
        }
    }

    /// The p-adic absolute value |x| = p^(-v(x)), 0 for zero.
    pub fn abs(&self) -> f64 {
        match self.valuation() {
            None => 0.0,
            Some(v) => (self.p as f64).powi(-(v as i32)),
        }
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::NonZero { val, unit, rel } => {
                let m = p_pow(self.p, *rel);
                PAdicElement {
                    p: self.p,
                    repr: Repr::NonZero { val: *val, unit: &m - unit, rel: *rel },
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs: a1 }, Repr::Zero { abs: a2 }) => {
                PAdicElement { p, repr: Repr::Zero { abs: (*a1).min(*a2) } }
            }
            (Repr::Zero { abs }, Repr::NonZero { val, unit, rel }) |
            (Repr::NonZero { val, unit, rel }, Repr::Zero { abs }) => {
                if *abs <= *val {
                    return PAdicElement { p, repr: Repr::Zero { abs: *abs } };
                }
                let new_rel = ((*abs - *val) as u32).min(*rel);
                PAdicElement {
                    p,
                    repr: Repr::NonZero {
                        val: *val,
                        unit: unit % p_pow(p, new_rel),
                        rel: new_rel,
                    },
                }
            }
            (
                Repr::NonZero { val: v1, unit: u1, rel: r1 },
                Repr::NonZero { val: v2, unit: u2, rel: r2 },
            ) => {
                let (v1, u1, r1, v2, u2, r2) = if v1 <= v2 {
                    (*v1, u1, *r1, *v2, u2, *r2)
                } else {
                    (*v2, u2, *r2, *v1, u1, *r1)
                };
                // absolute precision of the sum
                let abs = (v1 + r1 as i64).min(v2 + r2 as i64);
                let width = (abs - v1) as u32; // > 0 since v1 <= v2 < v2 + r2
                let m = p_pow(p, width);
                let shifted = u2 * p_pow(p, (v2 - v1) as u32);
                let s = (u1 + shifted) % &m;
                if s.is_zero() {
                    return PAdicElement { p, repr: Repr::Zero { abs } };
                }
                // valuation of s within the window
                let mut extra = 0u32;
                let mut sv = s;
                let pb = BigUint::from(p);
                while (&sv % &pb).is_zero() {
                    sv /= &pb;
                    extra += 1;
                }
                let val = v1 + extra as i64;
                let rel = (abs - val) as u32;
                PAdicElement { p, repr: Repr::NonZero { val, unit: sv % p_pow(p, rel), rel } }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs: a1 }, Repr::Zero { abs: a2 }) => {
                PAdicElement { p, repr: Repr::Zero { abs: a1 + a2 } }
            }
            (Repr::Zero { abs }, Repr::NonZero { val, .. }) |
            (Repr::NonZero { val, .. }, Repr::Zero { abs }) => {
                PAdicElement { p, repr: Repr::Zero { abs: abs + val } }
            }
            (
                Repr::NonZero { val: v1, unit: u1, rel: r1 },
                Repr::NonZero { val: v2, unit: u2, rel: r2 },
            ) => {
                let rel = (*r1).min(*r2);
                let unit = (u1 * u2) % p_pow(p, rel);
                PAdicElement { p, repr: Repr::NonZero { val: v1 + v2, unit, rel } }
            }
        }
    }

    pub fn inv(&self) -> Result<Self, PAdicError> {
        match &self.repr {
            Repr::Zero { abs } => Err(PAdicError::DivisionByZero(*abs)),
            Repr::NonZero { val, unit, rel } => {
                let m = p_pow(self.p, *rel);
                let iu = mod_inverse(unit, &m).expect("unit part is invertible");
                Ok(PAdicElement {
                    p: self.p,
                    repr: Repr::NonZero { val: -val, unit: iu, rel: *rel },
                })
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self, PAdicError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Multiply by p^k (exact valuation shift).
    pub fn shift(&self, k: i64) -> Self {
        match &self.repr {
            Repr::Zero { abs } => PAdicElement { p: self.p, repr: Repr::Zero { abs: abs + k } },
            Repr::NonZero { val, unit, rel } => PAdicElement {
                p: self.p,
                repr: Repr::NonZero { val: val + k, unit: unit.clone(), rel: *rel },
            },
        }
    }

    /// Integer power (negative allowed for units/nonzero).
    pub fn pow(&self, k: i64) -> Result<Self, PAdicError> {
        if k == 0 {
            return Ok(Self::one(self.p));
        }
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one(self.p);
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// True when the element is a unit (valuation 0) within precision.
    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    /// Reduce an integral element mod p^k to a small integer.
    /// Requires val >= 0 and enough precision.
    pub fn residue_u64(&self, k: u32) -> Result<u64, PAdicError> {
        let pk = p_pow(self.p, k);
        match &self.repr {
            Repr::Zero { abs } => {
                if *abs < k as i64 {
                    return Err(PAdicError::PrecisionExhausted(format!(
                        "residue mod p^{k} of O(p^{abs})"
                    )));
                }
                Ok(0)
            }
            Repr::NonZero { val, unit, rel } => {
                if *val < 0 {
                    return Err(PAdicError::Invalid("residue of non-integral element".into()));
                }
                if val + *rel as i64 + 1 <= k as i64 {
                    return Err(PAdicError::PrecisionExhausted(format!(
                        "residue mod p^{k} needs abs prec >= {k}"
                    )));
                }
                if *val >= k as i64 {
                    return Ok(0);
                }
                let r = (unit * p_pow(self.p, *val as u32)) % &pk;
                Ok(r.to_u64().expect("residue fits in u64"))
            }
        }
    }

    /// Equality modulo p^k.
    pub fn congruent_mod(&self, other: &Self, k: i64) -> bool {
        let d = self.sub(other);
        match d.valuation() {
            None => d.abs_precision() >= k,
            Some(v) => v >= k,
        }
    }
}

/// 2x2 matrix over Q_p.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat2 {
    pub e: [[PAdicElement; 2]; 2],
}

impl Mat2 {
    pub fn new(a: PAdicElement, b: PAdicElement, c: PAdicElement, d: PAdicElement) -> Self {
        Mat2 { e: [[a, b], [c, d]] }
    }

    pub fn from_i64(p: u64, m: [[i64; 2]; 2]) -> Self {
        Mat2::new(
            PAdicElement::from_i64(p, m[0][0]),
            PAdicElement::from_i64(p, m[0][1]),
            PAdicElement::from_i64(p, m[1][0]),
            PAdicElement::from_i64(p, m[1][1]),
        )
    }

    pub fn identity(p: u64) -> Self {
        Mat2::from_i64(p, [[1, 0], [0, 1]])
    }

    pub fn diag(a: PAdicElement, d: PAdicElement) -> Self {
        let p = a.prime();
        Mat2::new(a, PAdicElement::zero(p), PAdicElement::zero(p), d)
    }

    /// Upper unipotent [[1, b], [0, 1]].
    pub fn upper_unipotent(b: PAdicElement) -> Self {
        let p = b.prime();
        Mat2::new(PAdicElement::one(p), b, PAdicElement::zero(p), PAdicElement::one(p))
    }

    /// The element w_r = [[0, 1], [-p^r, 0]].
    pub fn weyl_twist(p: u64, r: u32) -> Self {
        Mat2::new(
            PAdicElement::zero(p),
            PAdicElement::one(p),
            PAdicElement::from_p_power(p, r as i64).neg(),
            PAdicElement::zero(p),
        )
    }

    pub fn prime(&self) -> u64 {
        self.e[0][0].prime()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out: Vec<PAdicElement> = Vec::with_capacity(4);
        for i in 0..2 {
            for j in 0..2 {
                let t = self.e[i][0]
                    .mul(&other.e[0][j])
                    .add(&self.e[i][1].mul(&other.e[1][j]));
                out.push(t);
            }
        }
        let d = out.pop().unwrap();
        let c = out.pop().unwrap();
        let b = out.pop().unwrap();
        let a = out.pop().unwrap();
        Mat2::new(a, b, c, d)
    }

    pub fn det(&self) -> PAdicElement {
        self.e[0][0].mul(&self.e[1][1]).sub(&self.e[0][1].mul(&self.e[1][0]))
    }

    pub fn trace(&self) -> PAdicElement {
        self.e[0][0].add(&self.e[1][1])
    }

    pub fn scale(&self, s: &PAdicElement) -> Self {
        Mat2::new(
            self.e[0][0].mul(s),
            self.e[0][1].mul(s),
            self.e[1][0].mul(s),
            self.e[1][1].mul(s),
        )
    }

    pub fn inverse(&self) -> Result<Self, PAdicError> {
        let det = self.det();
        let idet = det.inv()?;
        Ok(Mat2::new(
            self.e[1][1].mul(&idet),
            self.e[0][1].neg().mul(&idet),
            self.e[1][0].neg().mul(&idet),
            self.e[0][0].mul(&idet),
        ))
    }

    /// Entrywise integrality (valuations >= 0) within precision.
    pub fn is_integral(&self) -> bool {
        self.e.iter().flatten().all(|x| match x.valuation() {
            None => x.abs_precision() >= 0,
            Some(v) => v >= 0,
        })
    }

    /// In GL_2(Z_p): integral with unit determinant.
    pub fn is_in_gl2_zp(&self) -> bool {
        self.is_integral() && self.det().is_unit()
    }

    pub fn congruent_mod(&self, other: &Self, k: i64) -> bool {
        (0..2).all(|i| (0..2).all(|j| self.e[i][j].congruent_mod(&other.e[i][j], k)))
    }
}

/// Iwasawa decomposition g = b * k with b upper triangular and k in GL_2(Z_p).
///
/// Returns (b_diag_1, b_diag_2, k); the full upper-triangular factor is not
/// needed by callers, only the diagonal cocycle entries.
pub fn iwasawa_decompose(g: &Mat2) -> Result<(PAdicElement, PAdicElement, Mat2), PAdicError> {
    let p = g.prime();
    let c = &g.e[1][0];
    let d = &g.e[1][1];
    let (vc, vd) = (c.valuation(), d.valuation());
    let use_d = match (vc, vd) {
        (None, None) => {
            return Err(PAdicError::Invalid(
                "bottom row of matrix is zero within precision".into(),
            ))
        }
        (None, Some(_)) => true,
        (Some(_), None) => false,
        (Some(vc), Some(vd)) => vd <= vc,
    };
    let det = g.det();
    if det.is_zero() {
        return Err(PAdicError::Invalid("matrix not invertible within precision".into()));
    }
    if use_d {
        // t = c/d integral; k = [[1,0],[t,1]], b = g k^{-1} = [[det/d, *],[0, d]]
        let t = c.div(d)?;
        let k = Mat2::new(
            PAdicElement::one(p),
            PAdicElement::zero(p),
            t,
            PAdicElement::one(p),
        );
        let b1 = det.div(d)?;
        Ok((b1, d.clone(), k))
    } else {
        // t = d/c (strictly smaller valuation in c); k = [[0,-1],[1,t]], b = [[det/c, *],[0, c]]
        let t = d.div(c)?;
        let k = Mat2::new(
            PAdicElement::zero(p),
            PAdicElement::from_i64(p, -1),
            PAdicElement::one(p),
            t,
        );
        let b1 = det.div(c)?;
        Ok((b1, c.clone(), k))
    }
}

/// A point of P^1(Z/p^r), as a primitive row vector up to unit scaling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum P1Class {
    /// [y : 1] with y mod p^r.
    Affine(u64),
    /// [1 : y] with y in pZ mod p^r.
    Infinity(u64),
}

/// The coset space P^1(Z/p^r), basis of the finite-level induced model.
#[derive(Clone, Debug)]
pub struct CosetSpaceP1 {
    pub p: u64,
    pub r: u32,
    reps: Vec<P1Class>,
}

impl CosetSpaceP1 {
    pub fn new(p: u64, r: u32) -> Self {
        assert!(is_odd_prime(p));
        assert!(r >= 1, "level r >= 1 required");
        let pr = p.pow(r);
        let mut reps = Vec::with_capacity((pr + pr / p) as usize);
        for y in 0..pr {
            reps.push(P1Class::Affine(y));
        }
        for y in (0..pr).step_by(p as usize) {
            reps.push(P1Class::Infinity(y));
        }
        CosetSpaceP1 { p, r, reps }
    }

    pub fn size(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[P1Class] {
        &self.reps
    }

    pub fn index_of(&self, class: P1Class) -> usize {
        let pr = self.p.pow(self.r);
        match class {
            P1Class::Affine(y) => y as usize,
            P1Class::Infinity(y) => {
                debug_assert!(y % self.p == 0);
                pr as usize + (y / self.p) as usize
            }
        }
    }

    /// Matrix representative in GL_2(Z_p) with determinant 1.
    pub fn matrix_rep(&self, class: P1Class) -> Mat2 {
        let p = self.p;
        match class {
            // bottom row (y, 1)
            P1Class::Affine(y) => Mat2::from_i64(p, [[1, 0], [y as i64, 1]]),
            // bottom row (1, y)
            P1Class::Infinity(y) => Mat2::from_i64(p, [[0, -1], [1, y as i64]]),
        }
    }

    /// Classify the bottom row (c, d) of a matrix in GL_2(Z_p).
    pub fn classify(&self, c: &PAdicElement, d: &PAdicElement) -> Result<P1Class, PAdicError> {
        if d.is_unit() {
            let y = c.div(d)?.residue_u64(self.r)?;
            Ok(P1Class::Affine(y))
        } else if c.is_unit() {
            let y = d.div(c)?.residue_u64(self.r)?;
            if y % self.p != 0 {
                return Err(PAdicError::Invalid("row not primitive".into()));
            }
            Ok(P1Class::Infinity(y))
        } else {
            Err(PAdicError::Invalid("bottom row not primitive mod p".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_elt(rng: &mut ChaCha8Rng, p: u64) -> PAdicElement {
        let n: i64 = rng.gen_range(-10_000..10_000);
        let shift: i64 = rng.gen_range(-3..4);
        PAdicElement::from_i64(p, n).shift(shift)
    }

    #[test]
    fn arithmetic_laws_mod_pm() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &p in &[3u64, 5, 7] {
            for _ in 0..200 {
                let a = rand_elt(&mut rng, p);
                let b = rand_elt(&mut rng, p);
                let c = rand_elt(&mut rng, p);
                let lhs = a.add(&b).mul(&c);
                let rhs = a.mul(&c).add(&b.mul(&c));
                let k = lhs.abs_precision().min(rhs.abs_precision());
                assert!(lhs.congruent_mod(&rhs, k), "distributivity failed");
                let lhs = a.mul(&b).mul(&c);
                let rhs = a.mul(&b.mul(&c));
                let k = lhs.abs_precision().min(rhs.abs_precision());
                assert!(lhs.congruent_mod(&rhs, k), "associativity failed");
            }
        }
    }

    #[test]
    fn inversion_and_precision() {
        let p = 5;
        let x = PAdicElement::from_i64(p, 7);
        let xi = x.inv().unwrap();
        assert!(x.mul(&xi).congruent_mod(&PAdicElement::one(p), 40));
        assert!(PAdicElement::zero(p).inv().is_err());
        // cancellation loses valuation information
        let a = PAdicElement::from_i64(p, 25);
        let b = PAdicElement::from_i64(p, -25);
        let s = a.add(&b);
        assert!(s.is_zero());
        assert!(s.abs_precision() >= 40);
    }

    #[test]
    fn from_ratio_and_valuation() {
        let p = 3;
        let x = PAdicElement::from_ratio(p, 2, 9);
        assert_eq!(x.valuation(), Some(-2));
        let y = x.mul(&PAdicElement::from_i64(p, 9));
        assert!(y.congruent_mod(&PAdicElement::from_i64(p, 2), 35));
    }

    #[test]
    fn iwasawa_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &p in &[3u64, 5] {
            for _ in 0..100 {
                let mut g = Mat2::new(
                    rand_elt(&mut rng, p),
                    rand_elt(&mut rng, p),
                    rand_elt(&mut rng, p),
                    rand_elt(&mut rng, p),
                );
                if g.det().is_zero() || g.e[1][0].is_zero() && g.e[1][1].is_zero() {
                    continue;
                }
                let decomposed = iwasawa_decompose(&g);
                let (b1, b2, k) = match decomposed {
                    Ok(t) => t,
                    Err(_) => continue,
                };
                assert!(k.is_in_gl2_zp(), "k must be in GL2(Zp)");
                // recompose: b = g * k^{-1} must be upper triangular with the stated diagonal
                let b = g.mul(&k.inverse().unwrap());
                let prec = b.e[1][0].abs_precision();
                assert!(
                    b.e[1][0].is_zero() || b.e[1][0].valuation().unwrap() >= prec.min(30),
                    "lower-left of b not ~0: {:?}",
                    b.e[1][0]
                );
                let k_chk = b1.abs_precision().min(30);
                assert!(b.e[0][0].congruent_mod(&b1, k_chk));
                assert!(b.e[1][1].congruent_mod(&b2, k_chk));
                // and b*k = g to working precision (documented loss small)
                let g2 = b.mul(&k);
                for i in 0..2 {
                    for j in 0..2 {
                        let m = g.e[i][j].abs_precision().min(g2.e[i][j].abs_precision()).min(30);
                        assert!(g.e[i][j].congruent_mod(&g2.e[i][j], m));
                    }
                }
                g = g2; // silence unused warning path
                let _ = g;
            }
        }
    }

    #[test]
    fn iwasawa_explicit_negative_valuation() {
        // g = [[1,0],[p^{-1},1]]: b has valuations (-1, ...), k in GL2(Zp)
        let p = 5;
        let g = Mat2::new(
            PAdicElement::one(p),
            PAdicElement::zero(p),
            PAdicElement::from_p_power(p, -1),
            PAdicElement::one(p),
        );
        let (b1, b2, k) = iwasawa_decompose(&g).unwrap();
        assert!(k.is_in_gl2_zp());
        // det = 1 = b1*b2: c-branch used since v(c) = -1 < 0 = v(d)
        assert_eq!(b1.valuation(), Some(1));
        assert_eq!(b2.valuation(), Some(-1));
    }

    #[test]
    fn coset_space_size_and_lookup() {
        for &p in &[3u64, 5] {
            for r in 1..=2u32 {
                let space = CosetSpaceP1::new(p, r);
                assert_eq!(space.size() as u64, p.pow(r) + p.pow(r - 1));
                // representatives pairwise inequivalent & classify(matrix_rep) = identity
                for &cls in space.reps() {
                    let m = space.matrix_rep(cls);
                    assert!(m.is_in_gl2_zp());
                    let back = space.classify(&m.e[1][0], &m.e[1][1]).unwrap();
                    assert_eq!(back, cls);
                }
            }
        }
    }

    #[test]
    fn classify_scaling_invariance() {
        let p = 5;
        let space = CosetSpaceP1::new(p, 2);
        let c = PAdicElement::from_i64(p, 7);
        let d = PAdicElement::from_i64(p, 3);
        let u = PAdicElement::from_i64(p, 11);
        let a = space.classify(&c, &d).unwrap();
        let b = space.classify(&c.mul(&u), &d.mul(&u)).unwrap();
        assert_eq!(a, b);
    }
}
