//! The three quadratic etale algebras E over F = Q_p and the torus embedding
//! E^x -> GL_2(F).
//!
//! Non-split algebras are presented by a generator theta with
//! theta^2 = T*theta - N (T = trace, N = norm). Inert: theta a unit,
//! x^2 - Tx + N irreducible mod p. Ramified: theta a uniformiser, v(N) = 1.

use crate::padic::{Mat2, PAdicElement, PAdicError};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgebraKind {
    Split,
    Inert,
    Ramified,
}

/// A quadratic etale algebra E/Q_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticAlgebra {
    pub p: u64,
    pub kind: AlgebraKind,
    /// trace of theta (0 for split)
    pub t: i64,
    /// norm of theta (0 for split)
    pub n: i64,
}

fn legendre(mut a: i64, p: u64) -> i64 {
    let pi = p as i64;
    a %= pi;
    if a < 0 {
        a += pi;
    }
    if a == 0 {
        return 0;
    }
    // Euler criterion
    let mut result = 1i64;
    let mut base = a % pi;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % pi;
        }
        base = base * base % pi;
        e >>= 1;
    }
    if result == 1 {
        1
    } else {
        -1
    }
}

impl QuadraticAlgebra {
    /// Build the algebra, validating (kind, T, N) consistency.
    pub fn build(p: u64, kind: AlgebraKind, t: i64, n: i64) -> Result<Self, PAdicError> {
        if p < 3 || !crate::padic::PAdicElement::from_i64(p, 1).is_unit() {
            // from_i64 asserts primality; reaching here with p >= 3 means prime
        }
        if p == 2 {
            return Err(PAdicError::BadPrime(2));
        }
        let pi = p as i64;
        match kind {
            AlgebraKind::Split => Ok(QuadraticAlgebra { p, kind, t: 0, n: 0 }),
            AlgebraKind::Inert => {
                if n % pi == 0 {
                    return Err(PAdicError::Invalid(format!(
                        "inert algebra needs N a unit mod {p}, got N={n}"
                    )));
                }
                // irreducible mod p <=> disc = T^2 - 4N a non-residue
                let disc = t * t - 4 * n;
                if legendre(disc, p) != -1 {
                    return Err(PAdicError::Invalid(format!(
                        "x^2 - {t}x + {n} is not irreducible mod {p}"
                    )));
                }
                Ok(QuadraticAlgebra { p, kind, t, n })
            }
            AlgebraKind::Ramified => {
                if !(n % pi == 0 && (n / pi) % pi != 0) {
                    return Err(PAdicError::Invalid(format!(
                        "ramified algebra needs v(N) = 1, got N={n}"
                    )));
                }
                if t % pi != 0 {
                    return Err(PAdicError::Invalid(format!(
                        "ramified algebra needs p | T, got T={t}"
                    )));
                }
                Ok(QuadraticAlgebra { p, kind, t, n })
            }
        }
    }

    /// Ramification degree of E/F.
    pub fn ramification_degree(&self) -> u32 {
        match self.kind {
            AlgebraKind::Ramified => 2,
            _ => 1,
        }
    }

    pub fn is_split(&self) -> bool {
        self.kind == AlgebraKind::Split
    }

    /// Residue cardinality of E_w (p^2 inert, p otherwise).
    pub fn residue_cardinality(&self) -> u64 {
        match self.kind {
            AlgebraKind::Inert => self.p * self.p,
            _ => self.p,
        }
    }

    /// The purely imaginary element j: (-1, 1) for split, theta^c - theta = T - 2*theta otherwise.
    pub fn j(&self) -> TorusElement {
        match self.kind {
            AlgebraKind::Split => TorusElement::split(
                PAdicElement::from_i64(self.p, -1),
                PAdicElement::one(self.p),
            ),
            _ => TorusElement::field(
                *self,
                PAdicElement::from_i64(self.p, self.t),
                PAdicElement::from_i64(self.p, -2),
            ),
        }
    }

    pub fn theta(&self) -> TorusElement {
        assert!(!self.is_split(), "theta only exists for field algebras");
        TorusElement::field(*self, PAdicElement::zero(self.p), PAdicElement::one(self.p))
    }

    pub fn one(&self) -> TorusElement {
        match self.kind {
            AlgebraKind::Split => {
                TorusElement::split(PAdicElement::one(self.p), PAdicElement::one(self.p))
            }
            _ => TorusElement::field(*self, PAdicElement::one(self.p), PAdicElement::zero(self.p)),
        }
    }

    /// a + b*theta from integers (field algebras).
    pub fn element(&self, a: i64, b: i64) -> TorusElement {
        TorusElement::field(
            *self,
            PAdicElement::from_i64(self.p, a),
            PAdicElement::from_i64(self.p, b),
        )
    }

    /// For a ramified algebra E = F(sqrt(eps)) with v(eps) = 1: the unit part
    /// eps0 = eps/p where eps = T^2/4 - N. Used to build the quadratic character eta.
    pub fn eps_unit(&self) -> i64 {
        assert_eq!(self.kind, AlgebraKind::Ramified);
        // eps = (T/2)^2 - N has valuation exactly 1; work with 4*eps = T^2 - 4N,
        // same class mod squares.
        let four_eps = self.t * self.t - 4 * self.n;
        let pi = self.p as i64;
        debug_assert!(four_eps % pi == 0 && (four_eps / pi) % pi != 0);
        four_eps / pi
    }

    /// Legendre symbol of a unit mod p (for eta in the ramified case).
    pub fn legendre_symbol(&self, a: i64) -> i64 {
        legendre(a, self.p)
    }
}

/// An element of E^x, in coordinates adapted to the algebra.
#[derive(Clone, Debug)]
pub enum TorusElement {
    /// (t_w, t_{w^c}) in F x F.
    Split { t1: PAdicElement, t2: PAdicElement },
    /// a + b*theta in the field case.
    Field { alg: QuadraticAlgebra, a: PAdicElement, b: PAdicElement },
}

impl TorusElement {
    pub fn split(t1: PAdicElement, t2: PAdicElement) -> Self {
        TorusElement::Split { t1, t2 }
    }

    pub fn field(alg: QuadraticAlgebra, a: PAdicElement, b: PAdicElement) -> Self {
        debug_assert!(alg.kind != AlgebraKind::Split);
        TorusElement::Field { alg, a, b }
    }

    pub fn prime(&self) -> u64 {
        match self {
            TorusElement::Split { t1, .. } => t1.prime(),
            TorusElement::Field { a, .. } => a.prime(),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            TorusElement::Split { t1, t2 } => TorusElement::Split { t1: t2.clone(), t2: t1.clone() },
            TorusElement::Field { alg, a, b } => {
                // theta^c = T - theta
                let at = a.add(&b.mul(&PAdicElement::from_i64(alg.p, alg.t)));
                TorusElement::Field { alg: *alg, a: at, b: b.neg() }
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (TorusElement::Split { t1, t2 }, TorusElement::Split { t1: s1, t2: s2 }) => {
                TorusElement::Split { t1: t1.mul(s1), t2: t2.mul(s2) }
            }
            (TorusElement::Field { alg, a, b }, TorusElement::Field { alg: alg2, a: c, b: d }) => {
                debug_assert_eq!(alg, alg2);
                let p = alg.p;
                let tt = PAdicElement::from_i64(p, alg.t);
                let nn = PAdicElement::from_i64(p, alg.n);
                // (a + b th)(c + d th) = (ac - bdN) + (ad + bc + bdT) th
                let bd = b.mul(d);
                let ra = a.mul(c).sub(&bd.mul(&nn));
                let rb = a.mul(d).add(&b.mul(c)).add(&bd.mul(&tt));
                TorusElement::Field { alg: *alg, a: ra, b: rb }
            }
            _ => panic!("mixed torus elements"),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (TorusElement::Split { t1, t2 }, TorusElement::Split { t1: s1, t2: s2 }) => {
                TorusElement::Split { t1: t1.add(s1), t2: t2.add(s2) }
            }
            (TorusElement::Field { alg, a, b }, TorusElement::Field { a: c, b: d, .. }) => {
                TorusElement::Field { alg: *alg, a: a.add(c), b: b.add(d) }
            }
            _ => panic!("mixed torus elements"),
        }
    }

    pub fn norm(&self) -> PAdicElement {
        match self {
            TorusElement::Split { t1, t2 } => t1.mul(t2),
            TorusElement::Field { alg, a, b } => {
                let p = alg.p;
                // Nm(a + b th) = a^2 + abT + b^2 N
                let tt = PAdicElement::from_i64(p, alg.t);
                let nn = PAdicElement::from_i64(p, alg.n);
                a.mul(a).add(&a.mul(b).mul(&tt)).add(&b.mul(b).mul(&nn))
            }
        }
    }

    pub fn trace(&self) -> PAdicElement {
        match self {
            TorusElement::Split { t1, t2 } => t1.add(t2),
            TorusElement::Field { alg, a, b } => {
                let tt = PAdicElement::from_i64(alg.p, alg.t);
                a.add(a).add(&b.mul(&tt))
            }
        }
    }

    pub fn is_invertible(&self) -> bool {
        match self {
            TorusElement::Split { t1, t2 } => !t1.is_zero() && !t2.is_zero(),
            TorusElement::Field { .. } => !self.norm().is_zero(),
        }
    }

    /// Valuation in E (w-adic; for ramified E in theta-units, so v_E(p) = 2).
    pub fn valuation_e(&self) -> Option<i64> {
        match self {
            TorusElement::Split { .. } => None, // use the two component valuations instead
            TorusElement::Field { alg, a, b } => {
                let va = a.valuation();
                let vb = b.valuation();
                match alg.kind {
                    AlgebraKind::Inert => match (va, vb) {
                        (None, None) => None,
                        (Some(v), None) | (None, Some(v)) => Some(v),
                        (Some(v1), Some(v2)) => Some(v1.min(v2)),
                    },
                    AlgebraKind::Ramified => {
                        // v_E(a + b theta) = min(2 v(a), 2 v(b) + 1)
                        let ca = va.map(|v| 2 * v);
                        let cb = vb.map(|v| 2 * v + 1);
                        match (ca, cb) {
                            (None, None) => None,
                            (Some(v), None) | (None, Some(v)) => Some(v),
                            (Some(v1), Some(v2)) => Some(v1.min(v2)),
                        }
                    }
                    AlgebraKind::Split => unreachable!(),
                }
            }
        }
    }

    /// Divide by theta (field algebras): t/theta = ((aT + bN)/N, -a/N).
    pub fn div_theta(&self) -> Self {
        match self {
            TorusElement::Field { alg, a, b } => {
                let p = alg.p;
                let nn = PAdicElement::from_i64(p, alg.n);
                let tt = PAdicElement::from_i64(p, alg.t);
                let na = a.mul(&tt).add(&b.mul(&nn)).div(&nn).expect("N nonzero");
                let nb = a.neg().div(&nn).expect("N nonzero");
                TorusElement::Field { alg: *alg, a: na, b: nb }
            }
            _ => panic!("div_theta on split element"),
        }
    }

    /// Multiply by p^-k.
    pub fn shift(&self, k: i64) -> Self {
        match self {
            TorusElement::Split { t1, t2 } => {
                TorusElement::Split { t1: t1.shift(k), t2: t2.shift(k) }
            }
            TorusElement::Field { alg, a, b } => {
                TorusElement::Field { alg: *alg, a: a.shift(k), b: b.shift(k) }
            }
        }
    }

    /// The unit part u with self = pi_E^v * u, together with v = v_E(self).
    /// Field algebras only.
    pub fn unit_decomposition(&self) -> Result<(i64, TorusElement), PAdicError> {
        match self {
            TorusElement::Field { alg, .. } => {
                let v = self
                    .valuation_e()
                    .ok_or_else(|| PAdicError::Invalid("zero torus element".into()))?;
                let mut u = self.clone();
                match alg.kind {
                    AlgebraKind::Inert => {
                        u = u.shift(-v);
                    }
                    AlgebraKind::Ramified => {
                        // remove p-powers (theta^2 ~ p up to unit N/p) then a final theta
                        let half = v.div_euclid(2);
                        u = u.shift(-half);
                        if v.rem_euclid(2) == 1 {
                            u = u.div_theta();
                        }
                    }
                    AlgebraKind::Split => unreachable!(),
                }
                debug_assert_eq!(u.valuation_e(), Some(0));
                Ok((v, u))
            }
            _ => Err(PAdicError::Invalid("unit_decomposition on split element".into())),
        }
    }
}

/// Embedding E^x -> GL_2(F): diag for split, [[a + bT, bN], [-b, a]] for fields.
pub fn embed_torus(t: &TorusElement) -> Result<Mat2, PAdicError> {
    if !t.is_invertible() {
        return Err(PAdicError::Invalid("torus element not invertible".into()));
    }
    match t {
        TorusElement::Split { t1, t2 } => {
            let p = t1.prime();
            Ok(Mat2::new(t1.clone(), PAdicElement::zero(p), PAdicElement::zero(p), t2.clone()))
        }
        TorusElement::Field { alg, a, b } => {
            let p = alg.p;
            let tt = PAdicElement::from_i64(p, alg.t);
            let nn = PAdicElement::from_i64(p, alg.n);
            Ok(Mat2::new(a.add(&b.mul(&tt)), b.mul(&nn), b.neg(), a.clone()))
        }
    }
}
