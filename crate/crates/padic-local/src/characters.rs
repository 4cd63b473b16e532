//! Smooth characters of F^x and E_w^x, the level-0 additive character and its
//! base change, self-dual measures, and the Tate local factors L, epsilon,
//! gamma, together with a truncated-integral oracle for the gamma factor and
//! the Gauss-sum constant c(eta_p).
//!
//! Degenerate L-values are carried projectively: a `LocalFactor` is a leading
//! Laurent coefficient together with a vanishing order along the unramified
//! twisting family `mu |.|^s` at s = 0. All in-scope identities are ratios in
//! which matching orders cancel.

use crate::padic::{p_pow, PAdicElement, PAdicError};
use crate::quadratic::{AlgebraKind, QuadraticAlgebra, TorusElement};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

/// Tolerance for recognising degenerate (pole/zero) L-factor data.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Where a multiplicative character lives: F = Q_p itself, or a quadratic
/// field extension E_w (inert or ramified). Characters of split E are pairs
/// of F-characters, see [`EChar`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Home {
    F { p: u64 },
    EField { alg: QuadraticAlgebra },
}

impl Home {
    pub fn prime(&self) -> u64 {
        match self {
            Home::F { p } => *p,
            Home::EField { alg } => alg.p,
        }
    }

    /// Residue field cardinality q.
    pub fn q(&self) -> u64 {
        match self {
            Home::F { p } => *p,
            Home::EField { alg } => match alg.kind {
                AlgebraKind::Inert => alg.p * alg.p,
                _ => alg.p,
            },
        }
    }

    fn field_alg(&self) -> Option<QuadraticAlgebra> {
        match self {
            Home::F { .. } => None,
            Home::EField { alg } => Some(*alg),
        }
    }

    /// Uniformiser as a torus element of the ambient algebra (theta when ramified).
    fn uniformizer(&self) -> Uniformizer {
        match self {
            Home::F { .. } => Uniformizer::P,
            Home::EField { alg } => match alg.kind {
                AlgebraKind::Ramified => Uniformizer::Theta,
                _ => Uniformizer::P,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Uniformizer {
    P,
    Theta,
}

/// An element of the residue ring O_K / pi^n, in coordinates (a, b) = a + b*theta
/// (b unused over F).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RElem {
    pub a: u64,
    pub b: u64,
}

/// p-digit counts (da, db) for the two coordinates of O_K / pi^n.
fn coord_digits(home: &Home, n: u32) -> (u32, u32) {
    match home {
        Home::F { .. } => (n, 0),
        Home::EField { alg } => match alg.kind {
            AlgebraKind::Inert => (n, n),
            AlgebraKind::Ramified => (n.div_ceil(2), n / 2),
            AlgebraKind::Split => unreachable!(),
        },
    }
}

/// Moduli (p^da, p^db) for the two coordinates of O_K / pi^n.
fn coord_moduli(home: &Home, n: u32) -> (u64, u64) {
    let p = home.prime();
    let (da, db) = coord_digits(home, n);
    (p.pow(da), if db == 0 { 1 } else { p.pow(db) })
}

fn relem_mul(home: &Home, n: u32, x: RElem, y: RElem) -> RElem {
    let (ma, mb) = coord_moduli(home, n);
    match home {
        Home::F { .. } => RElem { a: (x.a as u128 * y.a as u128 % ma as u128) as u64, b: 0 },
        Home::EField { alg } => {
            let t = alg.t.rem_euclid(ma as i64) as u128;
            let nn = alg.n.rem_euclid(ma as i64) as u128;
            let (xa, xb, ya, yb) = (x.a as u128, x.b as u128, y.a as u128, y.b as u128);
            // (a + b th)(c + d th) = (ac - bdN) + (ad + bc + bdT) th
            let bd = xb * yb;
            let a = ((xa * ya + (ma as u128) * (ma as u128) - bd % (ma as u128) * (nn % ma as u128) % (ma as u128)) % ma as u128) as u64;
            let raw_b = (xa * yb + xb * ya + bd % (mb.max(1) as u128) * (t % mb.max(1) as u128)) % mb.max(1) as u128;
            RElem { a, b: raw_b as u64 }
        }
    }
}

fn relem_is_unit(home: &Home, x: RElem) -> bool {
    let p = home.prime();
    match home {
        Home::F { .. } => x.a % p != 0,
        Home::EField { alg } => match alg.kind {
            AlgebraKind::Inert => x.a % p != 0 || x.b % p != 0,
            AlgebraKind::Ramified => x.a % p != 0,
            AlgebraKind::Split => unreachable!(),
        },
    }
}

fn relem_one() -> RElem {
    RElem { a: 1, b: 0 }
}

/// Lift a residue element to an exact torus/p-adic representative.
fn relem_lift(home: &Home, x: RElem) -> TorusElement {
    match home {
        Home::F { p } => TorusElement::split(
            PAdicElement::from_i64(*p, x.a as i64),
            PAdicElement::from_i64(*p, x.a as i64),
        ),
        Home::EField { alg } => TorusElement::field(
            *alg,
            PAdicElement::from_i64(alg.p, x.a as i64),
            PAdicElement::from_i64(alg.p, x.b as i64),
        ),
    }
}

/// The unit group of O_K/pi^n with a direct-product basis and discrete logs.
#[derive(Debug)]
pub struct UnitGroup {
    pub home: Home,
    pub n: u32,
    pub generators: Vec<RElem>,
    pub orders: Vec<u64>,
    elems: Vec<RElem>,
    dlog: HashMap<RElem, Vec<u64>>,
}

impl UnitGroup {
    pub fn build(home: Home, n: u32) -> Arc<UnitGroup> {
        assert!(n >= 1);
        let (ma, mb) = coord_moduli(&home, n);
        let mut units = Vec::new();
        for a in 0..ma {
            for b in 0..mb.max(1) {
                let x = RElem { a, b: if mb == 1 { 0 } else { b } };
                if relem_is_unit(&home, x) {
                    units.push(x);
                }
            }
        }
        let mul = |x: RElem, y: RElem| relem_mul(&home, n, x, y);
        let order_of = |x: RElem| -> u64 {
            let mut k = 1u64;
            let mut y = x;
            while y != relem_one() {
                y = mul(y, x);
                k += 1;
            }
            k
        };
        // build a direct-product basis greedily, largest quotient-order first
        let mut generators: Vec<RElem> = Vec::new();
        let mut orders: Vec<u64> = Vec::new();
        let mut dlog: HashMap<RElem, Vec<u64>> = HashMap::new();
        dlog.insert(relem_one(), Vec::new());
        while dlog.len() < units.len() {
            // candidate with maximal order in the quotient by the current subgroup
            let mut best: Option<(RElem, u64)> = None;
            for &u in &units {
                if dlog.contains_key(&u) {
                    continue;
                }
                let mut k = 1u64;
                let mut y = u;
                while !dlog.contains_key(&y) {
                    y = mul(y, u);
                    k += 1;
                }
                if best.map_or(true, |(_, bk)| k > bk) {
                    best = Some((u, k));
                }
            }
            let (mut g, k) = best.expect("unit group not exhausted");
            // adjust g so that g^k = 1 (direct factor); g^k lies in the current subgroup
            let pow = |x: RElem, mut e: u64| -> RElem {
                let mut acc = relem_one();
                let mut base = x;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = mul(acc, base);
                    }
                    base = mul(base, base);
                    e >>= 1;
                }
                acc
            };
            let gk = pow(g, k);
            if gk != relem_one() {
                let current: Vec<RElem> = dlog.keys().copied().collect();
                let mut fixed = false;
                for &s in &current {
                    if mul(pow(s, k), gk) == relem_one() {
                        g = mul(g, s);
                        fixed = true;
                        break;
                    }
                }
                assert!(fixed, "failed to split off a direct factor");
                debug_assert_eq!(pow(g, k), relem_one());
            }
            debug_assert_eq!(order_of(g), k);
            // extend dlog over the enlarged subgroup
            let gi = generators.len();
            generators.push(g);
            orders.push(k);
            let current: Vec<(RElem, Vec<u64>)> =
                dlog.iter().map(|(e, v)| (*e, v.clone())).collect();
            let mut gpow = relem_one();
            for j in 1..k {
                gpow = mul(gpow, g);
                for (s, v) in &current {
                    let mut e = v.clone();
                    e.resize(gi, 0);
                    e.push(j);
                    dlog.insert(mul(*s, gpow), e);
                }
            }
            for v in dlog.values_mut() {
                v.resize(gi + 1, 0);
            }
        }
        Arc::new(UnitGroup { home, n, generators, orders, elems: units, dlog })
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[RElem] {
        &self.elems
    }

    pub fn dlog(&self, x: RElem) -> &[u64] {
        self.dlog.get(&x).expect("element not a unit in table")
    }
}

/// psi(x) = exp(2 pi i frac(lambda x)) on F = Q_p, level n = -v(lambda).
#[derive(Clone, Debug)]
pub struct AdditiveCharacter {
    pub p: u64,
    lambda: PAdicElement,
}

impl AdditiveCharacter {
    /// The standard level-0 character (lambda = 1).
    pub fn level_zero(p: u64) -> Self {
        AdditiveCharacter { p, lambda: PAdicElement::one(p) }
    }

    /// psi(c .) for a scaling c.
    pub fn twist(&self, c: &PAdicElement) -> Self {
        AdditiveCharacter { p: self.p, lambda: self.lambda.mul(c) }
    }

    /// Complex conjugate character psi(-x).
    pub fn conj(&self) -> Self {
        AdditiveCharacter { p: self.p, lambda: self.lambda.neg() }
    }

    /// The level: largest n such that psi is trivial on p^{-n} Z_p.
    pub fn level(&self) -> i64 {
        -self.lambda.valuation().expect("lambda nonzero")
    }

    pub fn eval(&self, x: &PAdicElement) -> Complex64 {
        let y = self.lambda.mul(x);
        match y.valuation() {
            None => Complex64::new(1.0, 0.0),
            Some(v) if v >= 0 => Complex64::new(1.0, 0.0),
            Some(v) => {
                let t = (-v) as u32;
                let num = y
                    .shift(t as i64)
                    .residue_u64(t)
                    .expect("enough precision for fractional part");
                let den = self.p.pow(t);
                Complex64::from_polar(1.0, 2.0 * PI * (num as f64) / (den as f64))
            }
        }
    }
}

/// psi_E = psi o Tr on a quadratic algebra (field cases; split is componentwise psi).
#[derive(Clone, Debug)]
pub struct EAdditiveCharacter {
    pub base: AdditiveCharacter,
    pub alg: QuadraticAlgebra,
}

impl EAdditiveCharacter {
    pub fn base_change(base: &AdditiveCharacter, alg: QuadraticAlgebra) -> Self {
        EAdditiveCharacter { base: base.clone(), alg }
    }

    pub fn eval(&self, t: &TorusElement) -> Complex64 {
        self.base.eval(&t.trace())
    }

    /// Level in pi_E-units: 0 for inert, base_level adjusted by the different
    /// (= 1 extra) when ramified. Verified by a triviality scan in tests.
    pub fn level(&self) -> i64 {
        match self.alg.kind {
            AlgebraKind::Inert => self.base.level(),
            AlgebraKind::Ramified => 2 * self.base.level() + 1,
            AlgebraKind::Split => self.base.level(),
        }
    }
}

/// Multiplicative Haar measure as a multiple of the self-dual-normalised pair:
/// `scale` multiplies d^x_psi y.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub scale: f64,
}

impl Default for MeasureSpec {
    fn default() -> Self {
        MeasureSpec { scale: 1.0 }
    }
}

/// A smooth character of K^x for K = F or a quadratic field extension.
///
/// The unit part is stored through its values on the fixed generators of
/// (O_K/pi^n)^x; the conductor is computed, not declared.
#[derive(Clone)]
pub struct MultiplicativeCharacter {
    pub home: Home,
    /// table depth: unit values are defined modulo pi^n (n >= 1)
    pub table: Arc<UnitGroup>,
    /// values on the table generators (roots of unity for honest characters)
    pub gen_values: Vec<Complex64>,
    pub value_at_unif: Complex64,
}

impl std::fmt::Debug for MultiplicativeCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Char({:?}, cond {}, unif -> {:.4}+{:.4}i)",
            self.home,
            self.conductor(),
            self.value_at_unif.re,
            self.value_at_unif.im
        )
    }
}

impl MultiplicativeCharacter {
    pub fn unramified(home: Home, value_at_unif: Complex64) -> Self {
        let table = UnitGroup::build(home, 1);
        let gen_values = vec![Complex64::new(1.0, 0.0); table.generators.len()];
        MultiplicativeCharacter { home, table, gen_values, value_at_unif }
    }

    pub fn trivial(home: Home) -> Self {
        Self::unramified(home, Complex64::new(1.0, 0.0))
    }

    /// |.|_K: unramified with value q^{-1} at the uniformiser.
    pub fn norm_abs(home: Home) -> Self {
        let q = home.q() as f64;
        Self::unramified(home, Complex64::new(1.0 / q, 0.0))
    }

    /// Build from exponents against the fixed generators of (O/pi^n)^x.
    pub fn from_exponents(
        home: Home,
        n: u32,
        exponents: &[u64],
        value_at_unif: Complex64,
    ) -> Self {
        let table = UnitGroup::build(home, n);
        assert_eq!(exponents.len(), table.generators.len(), "one exponent per generator");
        let gen_values = exponents
            .iter()
            .zip(&table.orders)
            .map(|(&k, &ord)| Complex64::from_polar(1.0, 2.0 * PI * (k as f64) / (ord as f64)))
            .collect();
        MultiplicativeCharacter { home, table, gen_values, value_at_unif }
    }

    /// The quadratic character attached to E/F on F^x: trivial (split),
    /// unramified with eta(p) = -1 (inert), or the ramified quadratic character.
    pub fn eta(alg: &QuadraticAlgebra) -> Self {
        let home = Home::F { p: alg.p };
        match alg.kind {
            AlgebraKind::Split => Self::trivial(home),
            AlgebraKind::Inert => Self::unramified(home, Complex64::new(-1.0, 0.0)),
            AlgebraKind::Ramified => {
                let table = UnitGroup::build(home, 1);
                // unit part = Legendre symbol; value at p from the Hilbert symbol
                let gen_values = table
                    .generators
                    .iter()
                    .map(|g| Complex64::new(alg.legendre_symbol(g.a as i64) as f64, 0.0))
                    .collect();
                let sign_p = alg.legendre_symbol(-1) * alg.legendre_symbol(alg.eps_unit());
                MultiplicativeCharacter {
                    home,
                    table,
                    gen_values,
                    value_at_unif: Complex64::new(sign_p as f64, 0.0),
                }
            }
        }
    }

    /// Evaluate the unit part on a residue element.
    pub fn eval_unit(&self, u: RElem) -> Complex64 {
        let dl = self.table.dlog(u);
        let mut z = Complex64::new(1.0, 0.0);
        for (e, (gv, ord)) in dl.iter().zip(self.gen_values.iter().zip(&self.table.orders)) {
            if *e != 0 {
                // gv is a root of unity of order dividing ord; integer power
                let _ = ord;
                z *= gv.powu(*e as u32);
            }
        }
        z
    }

    fn residue_of_f(&self, x: &PAdicElement) -> RElem {
        let u = x.unit_mod(self.table.n).expect("unit residue");
        RElem { a: u.to_u64().expect("small residue"), b: 0 }
    }

    /// Evaluate at a nonzero element of F (home F only).
    pub fn eval_f(&self, x: &PAdicElement) -> Complex64 {
        match self.home {
            Home::F { .. } => {
                let v = x.valuation().expect("nonzero argument");
                let shifted = x.shift(-v);
                self.value_at_unif.powi(v as i32) * self.eval_unit(self.residue_of_f(&shifted))
            }
            _ => panic!("eval_f on a character of E"),
        }
    }

    /// Evaluate at a nonzero torus element (home EField only).
    pub fn eval_e(&self, t: &TorusElement) -> Complex64 {
        let _ = self.home.field_alg().expect("E-character");
        let (v, u) = t.unit_decomposition().expect("nonzero argument");
        let (da, db) = coord_digits(&self.home, self.table.n);
        let (a, b) = match &u {
            TorusElement::Field { a, b, .. } => (a, b),
            _ => panic!("torus element of the wrong algebra"),
        };
        let a_res = a.residue_u64(da).expect("integral unit coordinate");
        let b_res = if db > 0 { b.residue_u64(db).expect("integral coordinate") } else { 0 };
        let u_res = RElem { a: a_res, b: b_res };
        self.value_at_unif.powi(v as i32) * self.eval_unit(u_res)
    }

    /// Conductor exponent: minimal n' with the unit part trivial on 1 + pi^{n'} O.
    pub fn conductor(&self) -> u32 {
        let p = self.home.prime();
        'outer: for np in 0..=self.table.n {
            for &u in self.table.elements() {
                // u ≡ 1 mod pi^np ?
                let congruent = match self.home {
                    Home::F { .. } => (u.a as i64 - 1).rem_euclid(p.pow(np) as i64) == 0,
                    Home::EField { alg } => {
                        let (ma, mb) = coord_moduli(&self.home, np);
                        let _ = alg;
                        (u.a as i64 - 1).rem_euclid(ma as i64) == 0
                            && (u.b as i64).rem_euclid(mb.max(1) as i64) == 0
                    }
                };
                if congruent && (self.eval_unit(u) - Complex64::new(1.0, 0.0)).norm() > 1e-8 {
                    continue 'outer;
                }
            }
            return np;
        }
        self.table.n
    }

    pub fn is_ramified(&self) -> bool {
        self.conductor() > 0
    }

    /// mu(-1).
    pub fn eval_minus_one(&self) -> Complex64 {
        let (ma, _) = coord_moduli(&self.home, self.table.n);
        self.eval_unit(RElem { a: ma - 1, b: 0 })
    }

    /// Pointwise product (tables merged at the deeper level).
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.home, other.home);
        let n = self.table.n.max(other.table.n);
        let table = UnitGroup::build(self.home, n);
        let gen_values = table
            .generators
            .iter()
            .map(|&g| self.eval_unit_deep(g, n) * other.eval_unit_deep(g, n))
            .collect();
        MultiplicativeCharacter {
            home: self.home,
            table,
            gen_values,
            value_at_unif: self.value_at_unif * other.value_at_unif,
        }
    }

    // evaluate the unit part on a residue given at depth n >= table.n
    fn eval_unit_deep(&self, u: RElem, n: u32) -> Complex64 {
        if n == self.table.n {
            return self.eval_unit(u);
        }
        let (ma, mb) = coord_moduli(&self.home, self.table.n);
        let r = RElem { a: u.a % ma, b: if mb > 1 { u.b % mb } else { 0 } };
        self.eval_unit(r)
    }

    pub fn inv(&self) -> Self {
        MultiplicativeCharacter {
            home: self.home,
            table: self.table.clone(),
            gen_values: self.gen_values.iter().map(|z| 1.0 / z).collect(),
            value_at_unif: 1.0 / self.value_at_unif,
        }
    }

    /// Twist by |.|^k.
    pub fn twist_abs(&self, k: i32) -> Self {
        let q = self.home.q() as f64;
        MultiplicativeCharacter {
            home: self.home,
            table: self.table.clone(),
            gen_values: self.gen_values.clone(),
            value_at_unif: self.value_at_unif * q.powi(-k),
        }
    }

    /// The dual-twist mu^{-1} |.| appearing in the gamma functional equation.
    pub fn dual_shift(&self) -> Self {
        self.inv().twist_abs(1)
    }

    /// Base change of an F-character to a field E: mu o Nm.
    pub fn compose_norm(&self, alg: QuadraticAlgebra, depth: u32) -> Self {
        match self.home {
            Home::F { p } => {
                assert_eq!(p, alg.p);
                let home = Home::EField { alg };
                let table = UnitGroup::build(home, depth.max(1));
                let gen_values = table
                    .generators
                    .iter()
                    .map(|&g| {
                        let t = relem_lift(&home, g);
                        self.eval_f(&t.norm())
                    })
                    .collect();
                let unif = match home.uniformizer() {
                    Uniformizer::P => {
                        // Nm(p) = p^2
                        self.value_at_unif * self.value_at_unif
                    }
                    Uniformizer::Theta => self.eval_f(&alg.theta().norm()),
                };
                MultiplicativeCharacter { home, table, gen_values, value_at_unif: unif }
            }
            _ => panic!("compose_norm from an E-character"),
        }
    }

    /// Is this exactly the trivial character (within DEGENERACY_TOL)?
    pub fn is_trivial(&self) -> bool {
        self.conductor() == 0 && (self.value_at_unif - Complex64::new(1.0, 0.0)).norm() < DEGENERACY_TOL
    }

    /// Is this |.|_K?
    pub fn is_norm_abs(&self) -> bool {
        let q = self.home.q() as f64;
        self.conductor() == 0 && (self.value_at_unif * q - Complex64::new(1.0, 0.0)).norm() < DEGENERACY_TOL
    }
}

/// Serialisable form of a character: {home, conductor, unit_exponents, value_at_p}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharacterRecord {
    pub home: Home,
    pub conductor: u32,
    pub unit_exponents: Vec<u64>,
    pub value_at_p: [f64; 2],
}

impl CharacterRecord {
    pub fn realize(&self) -> MultiplicativeCharacter {
        let n = self.conductor.max(1);
        MultiplicativeCharacter::from_exponents(
            self.home,
            n,
            &self.unit_exponents,
            Complex64::new(self.value_at_p[0], self.value_at_p[1]),
        )
    }
}

/// A character of E^x: a pair over split E, a field character otherwise.
#[derive(Clone, Debug)]
pub enum EChar {
    Split { w: MultiplicativeCharacter, wc: MultiplicativeCharacter },
    Field(MultiplicativeCharacter),
}

impl EChar {
    pub fn trivial(alg: &QuadraticAlgebra) -> Self {
        match alg.kind {
            AlgebraKind::Split => {
                let home = Home::F { p: alg.p };
                EChar::Split {
                    w: MultiplicativeCharacter::trivial(home),
                    wc: MultiplicativeCharacter::trivial(home),
                }
            }
            _ => EChar::Field(MultiplicativeCharacter::trivial(Home::EField { alg: *alg })),
        }
    }

    pub fn eval(&self, t: &TorusElement) -> Complex64 {
        match (self, t) {
            (EChar::Split { w, wc }, TorusElement::Split { t1, t2 }) => {
                w.eval_f(t1) * wc.eval_f(t2)
            }
            (EChar::Field(chi), t @ TorusElement::Field { .. }) => chi.eval_e(t),
            _ => panic!("character/element algebra mismatch"),
        }
    }

    /// Restriction to F^x.
    pub fn restrict_f(&self, x: &PAdicElement) -> Complex64 {
        match self {
            EChar::Split { w, wc } => w.eval_f(x) * wc.eval_f(x),
            EChar::Field(chi) => {
                let alg = chi.home.field_alg().unwrap();
                let t = TorusElement::field(alg, x.clone(), PAdicElement::zero(alg.p));
                chi.eval_e(&t)
            }
        }
    }

    pub fn mul(&self, other: &EChar) -> EChar {
        match (self, other) {
            (EChar::Split { w, wc }, EChar::Split { w: w2, wc: wc2 }) => {
                EChar::Split { w: w.mul(w2), wc: wc.mul(wc2) }
            }
            (EChar::Field(a), EChar::Field(b)) => EChar::Field(a.mul(b)),
            _ => panic!("mixed E-characters"),
        }
    }

    pub fn inv(&self) -> EChar {
        match self {
            EChar::Split { w, wc } => EChar::Split { w: w.inv(), wc: wc.inv() },
            EChar::Field(chi) => EChar::Field(chi.inv()),
        }
    }

    pub fn is_ramified(&self) -> bool {
        match self {
            EChar::Split { w, wc } => w.is_ramified() || wc.is_ramified(),
            EChar::Field(chi) => chi.is_ramified(),
        }
    }
}

/// Leading Laurent datum of a local factor along mu |.|^s at s = 0:
/// value `coeff * s^order`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalFactor {
    pub coeff: Complex64,
    pub order: i32,
}

impl LocalFactor {
    pub fn finite(z: Complex64) -> Self {
        LocalFactor { coeff: z, order: 0 }
    }

    pub fn one() -> Self {
        Self::finite(Complex64::new(1.0, 0.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        LocalFactor { coeff: self.coeff * other.coeff, order: self.order + other.order }
    }

    pub fn div(&self, other: &Self) -> Self {
        LocalFactor { coeff: self.coeff / other.coeff, order: self.order - other.order }
    }

    pub fn inv(&self) -> Self {
        LocalFactor { coeff: 1.0 / self.coeff, order: -self.order }
    }

    pub fn is_pole(&self) -> bool {
        self.order < 0
    }

    pub fn is_zero(&self) -> bool {
        self.order > 0
    }

    /// Finite value; exactly 0.0 when the factor vanishes to positive order.
    pub fn value(&self) -> Option<Complex64> {
        if self.is_pole() {
            None
        } else if self.is_zero() {
            Some(Complex64::new(0.0, 0.0))
        } else {
            Some(self.coeff)
        }
    }
}

/// Tate L-factor of a smooth character: (1 - mu(pi))^{-1} unramified, 1 ramified.
/// A pole is reported as leading coefficient 1/ln q at order -1.
pub fn l_factor(mu: &MultiplicativeCharacter) -> LocalFactor {
    if mu.is_ramified() {
        return LocalFactor::one();
    }
    let z = mu.value_at_unif;
    let one = Complex64::new(1.0, 0.0);
    if (z - one).norm() < DEGENERACY_TOL {
        let lnq = (mu.home.q() as f64).ln();
        LocalFactor { coeff: Complex64::new(1.0 / lnq, 0.0), order: -1 }
    } else {
        LocalFactor::finite(1.0 / (one - z))
    }
}

/// Epsilon factor for a level-0 additive character on the same field as mu,
/// with the self-dual additive measure: 1 for unramified mu, and the
/// normalised Gauss sum over the units mod pi^n for conductor n >= 1.
pub fn epsilon_factor(
    mu: &MultiplicativeCharacter,
    psi: &LocalPsi,
    measure: &MeasureSpec,
) -> Complex64 {
    assert_eq!(psi.level(), 0, "epsilon_factor requires a level-0 additive character");
    let _ = measure; // epsilon is taken w.r.t. the self-dual additive measure
    let n = mu.conductor();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let table = UnitGroup::build(mu.home, n);
    let mut sum = Complex64::new(0.0, 0.0);
    for &u in table.elements() {
        let lift = relem_lift(&mu.home, u);
        let y = psi.eval_scaled(&lift, -(n as i64));
        sum += mu.eval_unit_deep_pub(u, n).conj() * y;
    }
    mu.value_at_unif.powi(n as i32) * sum
}

impl MultiplicativeCharacter {
    // public wrapper used by the Gauss sum (unit residues at exactly depth n)
    fn eval_unit_deep_pub(&self, u: RElem, n: u32) -> Complex64 {
        self.eval_unit_deep(u, n)
    }
}

/// Additive character on the home field of a multiplicative character.
#[derive(Clone, Debug)]
pub enum LocalPsi {
    F(AdditiveCharacter),
    E(EAdditiveCharacter),
}

impl LocalPsi {
    pub fn for_home(home: &Home, base: &AdditiveCharacter) -> LocalPsi {
        match home {
            Home::F { .. } => LocalPsi::F(base.clone()),
            Home::EField { alg } => LocalPsi::E(EAdditiveCharacter::base_change(base, *alg)),
        }
    }

    /// Level in pi_K-units.
    pub fn level(&self) -> i64 {
        match self {
            LocalPsi::F(psi) => psi.level(),
            LocalPsi::E(psi) => psi.level(),
        }
    }

    /// Evaluate at pi^m * u for a lifted unit u.
    pub fn eval_scaled(&self, u: &TorusElement, m: i64) -> Complex64 {
        match self {
            LocalPsi::F(psi) => match u {
                TorusElement::Split { t1, .. } => psi.eval(&t1.shift(m)),
                _ => panic!("F-psi at an E-element"),
            },
            LocalPsi::E(psi) => {
                let alg = psi.alg;
                let shifted = match alg.kind {
                    AlgebraKind::Ramified => {
                        // pi_E = theta: theta^m = p^{m div 2} * theta^{m mod 2}
                        let half = m.div_euclid(2);
                        let mut t = u.shift(half);
                        if m.rem_euclid(2) == 1 {
                            t = t.mul(&alg.theta());
                        }
                        t
                    }
                    _ => u.shift(m),
                };
                psi.eval(&shifted)
            }
        }
    }

    /// Replace psi by psi(c .) for c in the BASE field F.
    pub fn twist(&self, c: &PAdicElement) -> LocalPsi {
        match self {
            LocalPsi::F(psi) => LocalPsi::F(psi.twist(c)),
            LocalPsi::E(psi) => LocalPsi::E(EAdditiveCharacter {
                base: psi.base.twist(c),
                alg: psi.alg,
            }),
        }
    }
}

/// gamma^{-1} over a ramified E with psi_E of level d, computed against the
/// level-0 character psi0(x) := psi_E(theta^{-d} x) (the epsilon integrand is
/// evaluated with the extra theta^{-d} shift; everything stays exact).
fn gamma_inv_ramified_level0(
    mu: &MultiplicativeCharacter,
    pe: &EAdditiveCharacter,
    d: i64,
) -> LocalFactor {
    // L-factors as usual; epsilon against psi0 computed by shifting the
    // evaluation point by theta^{-d}.
    let n = mu.conductor();
    let l_num = l_factor(mu);
    let l_den = l_factor(&mu.dual_shift());
    let eps = if n == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        let table = UnitGroup::build(mu.home, n);
        let mut sum = Complex64::new(0.0, 0.0);
        let psi = LocalPsi::E(pe.clone());
        for &u in table.elements() {
            let lift = relem_lift(&mu.home, u);
            // psi0(theta^{-n} u) = psi_E(theta^{-n-d} u)
            let y = psi.eval_scaled(&lift, -(n as i64) - d);
            sum += mu.eval_unit_deep_pub(u, n).conj() * y;
        }
        mu.value_at_unif.powi(n as i32) * sum
    };
    l_num.div(&LocalFactor::finite(eps)).div(&l_den)
}

/// Public gamma^{-1} entry point handling all homes and psi levels in scope.
pub fn gamma_inv(mu: &MultiplicativeCharacter, psi: &LocalPsi) -> LocalFactor {
    let d = psi.level();
    if d == 0 {
        let l_num = l_factor(mu);
        let eps = epsilon_factor(mu, psi, &MeasureSpec::default());
        let l_den = l_factor(&mu.dual_shift());
        return l_num.div(&LocalFactor::finite(eps)).div(&l_den);
    }
    match psi {
        LocalPsi::E(pe) if pe.alg.kind == AlgebraKind::Ramified => {
            let base = gamma_inv_ramified_level0(mu, pe, d);
            let q = mu.home.q() as f64;
            let scale = q.powf(-(d as f64) / 2.0) * mu.value_at_unif.powi(-(d as i32));
            LocalFactor { coeff: base.coeff * scale, order: base.order }
        }
        _ => panic!("unsupported additive character of level {d}"),
    }
}

/// Assembled gamma factor (projective).
pub fn gamma_factor(mu: &MultiplicativeCharacter, psi: &LocalPsi) -> LocalFactor {
    gamma_inv(mu, psi).inv()
}

/// Truncated-integral oracle: sum_{m in window} mu(pi)^m S_m plus the closed
/// geometric tail, where S_m is the exact annulus sum at valuation m with the
/// multiplicative measure `measure.scale * d^x_psi`.
///
/// Converges (and is accepted) for ramified mu, or unramified mu with
/// |mu(pi)| < 1. The identity under test: the integral equals
/// scale * mu(-1) * gamma(mu, psi)^{-1}.
pub fn gamma_integral_oracle(
    mu: &MultiplicativeCharacter,
    psi: &LocalPsi,
    window: (i64, i64),
    measure: &MeasureSpec,
) -> Result<Complex64, PAdicError> {
    let (m_lo, m_hi) = window;
    assert!(m_lo <= m_hi);
    let q = mu.home.q() as f64;
    let d = psi.level();
    let vol_units = (1.0 - 1.0 / q) * q.powf(-(d as f64) / 2.0) * measure.scale;
    let n = mu.conductor() as i64;
    let unram = n == 0;
    let zmod = mu.value_at_unif.norm();
    if unram && zmod >= 1.0 - 1e-12 {
        return Err(PAdicError::Invalid(
            "oracle needs |mu(pi)| < 1 for unramified mu".into(),
        ));
    }
    // support check: all nonzero annuli lie in [-n-d, ...); reject windows
    // that miss the critical annulus
    if m_lo > -n - d {
        return Err(PAdicError::Invalid(format!(
            "window [{m_lo}, {m_hi}] misses the critical annulus at {}",
            -n - d
        )));
    }
    let annulus = |m: i64| -> Complex64 {
        let j = (n.max(-m - d).max(1)) as u32;
        let table = UnitGroup::build(mu.home, j);
        let w = vol_units / table.len() as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for &u in table.elements() {
            let lift = relem_lift(&mu.home, u);
            s += mu.eval_unit_deep_pub(u, j) * psi.eval_scaled(&lift, m);
        }
        s * w
    };
    let mut total = Complex64::new(0.0, 0.0);
    for m in m_lo..=m_hi {
        total += mu.value_at_unif.powi(m as i32) * annulus(m);
    }
    // closed-form geometric tail for unramified mu; ramified tails vanish
    if unram {
        let z = mu.value_at_unif;
        total += z.powi((m_hi + 1) as i32) / (Complex64::new(1.0, 0.0) - z) * vol_units;
    } else {
        // verify stabilisation: annuli beyond the window must vanish
        let probe = annulus(m_hi + 1).norm();
        if probe > 1e-9 {
            return Err(PAdicError::Invalid(
                "annulus sums fail to stabilise within the window".into(),
            ));
        }
    }
    Ok(total)
}

/// The constant c(eta_p): prod_w gamma(1_{E_w}, psi_{E,w}) divided by
/// gamma(1_F, psi) gamma(eta, psi), regularised along the unramified twisting
/// family (matching pole orders cancel).
pub fn c_eta_gauss(
    alg: &QuadraticAlgebra,
    psi: &AdditiveCharacter,
) -> Result<Complex64, PAdicError> {
    let p = alg.p;
    let home_f = Home::F { p };
    let psi_f = LocalPsi::F(psi.clone());
    let gamma_1f = gamma_inv(&MultiplicativeCharacter::trivial(home_f), &psi_f).inv();
    let eta = MultiplicativeCharacter::eta(alg);
    let gamma_eta = gamma_inv(&eta, &psi_f).inv();
    let num = match alg.kind {
        AlgebraKind::Split => {
            // two copies of F
            gamma_1f.mul(&gamma_1f)
        }
        _ => {
            let home_e = Home::EField { alg: *alg };
            let psi_e = LocalPsi::for_home(&home_e, psi);
            gamma_inv(&MultiplicativeCharacter::trivial(home_e), &psi_e).inv()
        }
    };
    let ratio = num.div(&gamma_1f.mul(&gamma_eta));
    ratio.value().ok_or_else(|| {
        PAdicError::Invalid("c(eta_p) did not regularise to a finite value".into())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cnear(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn additive_character_levels() {
        let psi = AdditiveCharacter::level_zero(5);
        assert_eq!(psi.level(), 0);
        // trivial on Z_p
        assert!(cnear(psi.eval(&PAdicElement::from_i64(5, 7)), Complex64::new(1.0, 0.0), 1e-12));
        // psi(1/5) = e^{2 pi i/5}
        let x = PAdicElement::from_ratio(5, 1, 5);
        let expect = Complex64::from_polar(1.0, 2.0 * PI / 5.0);
        assert!(cnear(psi.eval(&x), expect, 1e-12));
        // twisted character has level 1
        assert_eq!(psi.twist(&PAdicElement::from_p_power(5, -1)).level(), 1);
    }

    #[test]
    fn base_change_levels_by_triviality_scan() {
        let psi = AdditiveCharacter::level_zero(3);
        for (alg, expect) in [
            (QuadraticAlgebra::build(3, AlgebraKind::Inert, 0, 1).unwrap(), 0i64),
            (QuadraticAlgebra::build(3, AlgebraKind::Ramified, 0, 3).unwrap(), 1i64),
        ] {
            let pe = EAdditiveCharacter::base_change(&psi, alg);
            assert_eq!(pe.level(), expect);
            // scan: trivial on pi^{-level} O_E, nontrivial one layer deeper
            let psi_e = LocalPsi::E(pe);
            let table = UnitGroup::build(Home::EField { alg }, 2);
            let mut max_on_level = 0.0f64;
            let mut max_below = 0.0f64;
            for &u in table.elements().iter().take(60) {
                let lift = relem_lift(&Home::EField { alg }, u);
                let z1 = (psi_e.eval_scaled(&lift, -expect) - Complex64::new(1.0, 0.0)).norm();
                let z2 =
                    (psi_e.eval_scaled(&lift, -expect - 1) - Complex64::new(1.0, 0.0)).norm();
                max_on_level = max_on_level.max(z1);
                max_below = max_below.max(z2);
            }
            assert!(max_on_level < 1e-12, "psi_E not trivial at stated level");
            assert!(max_below > 1e-3, "psi_E trivial one layer below stated level");
        }
    }

    #[test]
    fn unit_group_direct_product() {
        for (home, n) in [
            (Home::F { p: 7 }, 2u32),
            (Home::EField { alg: QuadraticAlgebra::build(5, AlgebraKind::Inert, 0, 2).unwrap() }, 2),
            (Home::EField { alg: QuadraticAlgebra::build(3, AlgebraKind::Ramified, 0, 3).unwrap() }, 3),
        ] {
            let g = UnitGroup::build(home, n);
            let expected: u64 = g.orders.iter().product();
            assert_eq!(expected as usize, g.len(), "basis must be a direct product");
        }
    }

    #[test]
    fn character_multiplicative_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let home = Home::F { p: 7 };
        let chi = MultiplicativeCharacter::from_exponents(home, 2, &[3], Complex64::new(0.5, 0.25));
        for _ in 0..100 {
            let a: i64 = rng.gen_range(1..10_000);
            let b: i64 = rng.gen_range(1..10_000);
            let xa = PAdicElement::from_i64(7, a);
            let xb = PAdicElement::from_i64(7, b);
            let lhs = chi.eval_f(&xa.mul(&xb));
            let rhs = chi.eval_f(&xa) * chi.eval_f(&xb);
            assert!(cnear(lhs, rhs, 1e-10));
        }
    }

    #[test]
    fn conductor_is_minimal() {
        let home = Home::F { p: 5 };
        // a character of (Z/25)^x nontrivial on 1 + 5Z: conductor 2
        let chi = MultiplicativeCharacter::from_exponents(home, 2, &[1], Complex64::new(1.0, 0.0));
        assert_eq!(chi.conductor(), 2);
        // exponent 4 kills the 1+5Z part ((Z/25)^x cyclic of order 20): conductor 1
        let chi = MultiplicativeCharacter::from_exponents(home, 2, &[4], Complex64::new(1.0, 0.0));
        assert_eq!(chi.conductor(), 1);
        let chi = MultiplicativeCharacter::trivial(home);
        assert_eq!(chi.conductor(), 0);
    }

    #[test]
    fn l_factor_cases() {
        let home = Home::F { p: 5 };
        // trivial character -> pole
        assert!(l_factor(&MultiplicativeCharacter::trivial(home)).is_pole());
        // unramified with mu(p) = 1/2 -> 2
        let mu = MultiplicativeCharacter::unramified(home, Complex64::new(0.5, 0.0));
        assert!(cnear(l_factor(&mu).value().unwrap(), Complex64::new(2.0, 0.0), 1e-12));
        // ramified -> 1
        let mu = MultiplicativeCharacter::from_exponents(home, 1, &[1], Complex64::new(1.0, 0.0));
        assert!(cnear(l_factor(&mu).value().unwrap(), Complex64::new(1.0, 0.0), 1e-12));
    }

    #[test]
    fn epsilon_quadratic_conductor_3() {
        // p = 3, quadratic character of conductor 3, value 1 at the uniformiser:
        // |eps| = sqrt(3) by the two-term Gauss sum
        let home = Home::F { p: 3 };
        let mu = MultiplicativeCharacter::from_exponents(home, 1, &[1], Complex64::new(1.0, 0.0));
        let psi = LocalPsi::F(AdditiveCharacter::level_zero(3));
        let eps = epsilon_factor(&mu, &psi, &MeasureSpec::default());
        assert!((eps.norm() - 3f64.sqrt()).abs() < 1e-10);
        // unramified -> 1
        let mu = MultiplicativeCharacter::unramified(home, Complex64::new(0.3, 0.1));
        assert!(cnear(
            epsilon_factor(&mu, &psi, &MeasureSpec::default()),
            Complex64::new(1.0, 0.0),
            1e-12
        ));
    }

    #[test]
    fn epsilon_duality_random_ramified() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &p in &[3u64, 5, 7] {
            let home = Home::F { p };
            let psi = LocalPsi::F(AdditiveCharacter::level_zero(p));
            let psib = LocalPsi::F(AdditiveCharacter::level_zero(p).conj());
            for _ in 0..7 {
                let n = rng.gen_range(1..=2u32);
                let table = UnitGroup::build(home, n);
                let mut exps: Vec<u64> =
                    table.orders.iter().map(|&o| rng.gen_range(0..o)).collect();
                if exps.iter().all(|&e| e == 0) {
                    exps[0] = 1;
                }
                let phase = rng.gen_range(0.0..2.0 * PI);
                let mu = MultiplicativeCharacter::from_exponents(
                    home,
                    n,
                    &exps,
                    Complex64::from_polar(1.0, phase),
                );
                if mu.conductor() == 0 {
                    continue;
                }
                let e1 = epsilon_factor(&mu, &psi, &MeasureSpec::default());
                let e2 = epsilon_factor(&mu.dual_shift(), &psib, &MeasureSpec::default());
                let lhs = e1 * e2;
                let rhs = mu.eval_minus_one();
                assert!(cnear(lhs, rhs, 1e-9), "eps duality failed: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn int_gamma_unramified_closed_form() {
        // unramified mu with mu(p) = 1/4, p = 5: integral matches gamma^{-1}
        let home = Home::F { p: 5 };
        let mu = MultiplicativeCharacter::unramified(home, Complex64::new(0.25, 0.0));
        let psi = LocalPsi::F(AdditiveCharacter::level_zero(5));
        let lhs = gamma_integral_oracle(&mu, &psi, (-3, 40), &MeasureSpec::default()).unwrap();
        let rhs = mu.eval_minus_one() * gamma_inv(&mu, &psi).value().unwrap();
        assert!(cnear(lhs, rhs, 1e-10), "{lhs} vs {rhs}");
    }

    #[test]
    fn int_gamma_ramified_single_annulus() {
        let home = Home::F { p: 5 };
        let psi = LocalPsi::F(AdditiveCharacter::level_zero(5));
        let mu = MultiplicativeCharacter::from_exponents(home, 1, &[1], Complex64::new(0.7, -0.4));
        let lhs = gamma_integral_oracle(&mu, &psi, (-2, 2), &MeasureSpec::default()).unwrap();
        let rhs = mu.eval_minus_one() * gamma_inv(&mu, &psi).value().unwrap();
        assert!(cnear(lhs, rhs, 1e-9), "{lhs} vs {rhs}");
    }

    #[test]
    fn int_gamma_measure_scaling_and_twist() {
        let home = Home::F { p: 3 };
        let mu = MultiplicativeCharacter::unramified(home, Complex64::new(0.2, 0.1));
        let psi = LocalPsi::F(AdditiveCharacter::level_zero(3));
        let scaled = MeasureSpec { scale: 2.5 };
        let a = gamma_integral_oracle(&mu, &psi, (-2, 60), &MeasureSpec::default()).unwrap();
        let b = gamma_integral_oracle(&mu, &psi, (-2, 60), &scaled).unwrap();
        assert!(cnear(b, a * 2.5, 1e-10));
        // twist psi by a unit c: both sides of int-gamma transform consistently
        let c = PAdicElement::from_i64(3, 2);
        let psic = psi.twist(&c);
        let lhs = gamma_integral_oracle(&mu, &psic, (-2, 60), &MeasureSpec::default()).unwrap();
        let rhs = mu.eval_minus_one() * gamma_inv(&mu, &psic).value().unwrap();
        assert!(cnear(lhs, rhs, 1e-9));
    }

    #[test]
    fn oracle_rejects_nonconvergent() {
        let home = Home::F { p: 5 };
        let mu = MultiplicativeCharacter::unramified(home, Complex64::new(1.0, 0.0));
        let psi = LocalPsi::F(AdditiveCharacter::level_zero(5));
        assert!(gamma_integral_oracle(&mu, &psi, (-2, 10), &MeasureSpec::default()).is_err());
    }

    #[test]
    fn gamma_duality_through_assembled_route() {
        // gamma(mu, psi) * gamma(mu^{-1}|.|, conj psi) = mu(-1)
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let home = Home::F { p: 5 };
        let psi = LocalPsi::F(AdditiveCharacter::level_zero(5));
        let psib = LocalPsi::F(AdditiveCharacter::level_zero(5).conj());
        for _ in 0..10 {
            let n = rng.gen_range(0..=2u32);
            let mu = if n == 0 {
                MultiplicativeCharacter::unramified(
                    home,
                    Complex64::from_polar(rng.gen_range(0.2..0.8), rng.gen_range(0.0..6.28)),
                )
            } else {
                let table = UnitGroup::build(home, n);
                let mut exps: Vec<u64> =
                    table.orders.iter().map(|&o| rng.gen_range(0..o)).collect();
                if exps.iter().all(|&e| e == 0) {
                    exps[0] = 1;
                }
                MultiplicativeCharacter::from_exponents(
                    home,
                    n,
                    &exps,
                    Complex64::from_polar(1.3, rng.gen_range(0.0..6.28)),
                )
            };
            let g1 = gamma_inv(&mu, &psi);
            let g2 = gamma_inv(&mu.dual_shift(), &psib);
            if g1.order != 0 || g2.order != 0 {
                continue;
            }
            let lhs = 1.0 / (g1.coeff * g2.coeff);
            let rhs = mu.eval_minus_one();
            assert!(cnear(lhs, rhs, 1e-9), "gamma duality: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn c_eta_examples() {
        let psi = AdditiveCharacter::level_zero(5);
        // split: exactly 1
        let alg = QuadraticAlgebra::build(5, AlgebraKind::Split, 0, 0).unwrap();
        let c = c_eta_gauss(&alg, &psi).unwrap();
        assert!(cnear(c, Complex64::new(1.0, 0.0), 1e-12));
        // inert: modulus 1 (closed form gives exactly 1 in this normalisation)
        let alg = QuadraticAlgebra::build(5, AlgebraKind::Inert, 0, 2).unwrap();
        let c = c_eta_gauss(&alg, &psi).unwrap();
        assert!((c.norm() - 1.0).abs() < 1e-10, "|c| = {}", c.norm());
        // ramified at p = 3: |c| = p^{+-1/2}
        let psi3 = AdditiveCharacter::level_zero(3);
        let alg = QuadraticAlgebra::build(3, AlgebraKind::Ramified, 0, 3).unwrap();
        let c = c_eta_gauss(&alg, &psi3).unwrap();
        let m = c.norm();
        assert!(
            (m - 3f64.sqrt()).abs() < 1e-9 || (m - 1.0 / 3f64.sqrt()).abs() < 1e-9,
            "|c| = {m}"
        );
    }

    #[test]
    fn gamma_over_inert_extension() {
        // the oracle and the assembled route agree over E inert
        let alg = QuadraticAlgebra::build(5, AlgebraKind::Inert, 0, 2).unwrap();
        let home = Home::EField { alg };
        let psi = LocalPsi::for_home(&home, &AdditiveCharacter::level_zero(5));
        let mu = MultiplicativeCharacter::unramified(home, Complex64::new(0.11, 0.05));
        let lhs = gamma_integral_oracle(&mu, &psi, (-2, 60), &MeasureSpec::default()).unwrap();
        let rhs = mu.eval_minus_one() * gamma_inv(&mu, &psi).value().unwrap();
        assert!(cnear(lhs, rhs, 1e-9), "{lhs} vs {rhs}");
    }

    #[test]
    fn gamma_over_ramified_extension() {
        // psi_E has level 1; oracle vs twist-reduced assembled route
        let alg = QuadraticAlgebra::build(3, AlgebraKind::Ramified, 0, 3).unwrap();
        let home = Home::EField { alg };
        let psi = LocalPsi::for_home(&home, &AdditiveCharacter::level_zero(3));
        assert_eq!(psi.level(), 1);
        let mu = MultiplicativeCharacter::unramified(home, Complex64::new(0.3, 0.0));
        let lhs = gamma_integral_oracle(&mu, &psi, (-3, 80), &MeasureSpec::default()).unwrap();
        let rhs = mu.eval_minus_one() * gamma_inv(&mu, &psi).value().unwrap();
        assert!(cnear(lhs, rhs, 1e-9), "{lhs} vs {rhs}");
    }

    #[test]
    fn character_record_round_trip() {
        let home = Home::F { p: 5 };
        let rec = CharacterRecord {
            home,
            conductor: 1,
            unit_exponents: vec![2],
            value_at_p: [0.5, 0.1],
        };
        let chi = rec.realize();
        assert_eq!(chi.conductor(), 1);
        let js = serde_json::to_string(&rec).unwrap();
        let back: CharacterRecord = serde_json::from_str(&js).unwrap();
        assert_eq!(back.unit_exponents, vec![2]);
    }
}
