//! Exact coefficient arithmetic: cyclotomic numbers Q(zeta_N) and sparse
//! Laurent polynomials in formal unit parameters q1..qk.
//!
//! `Cyclotomic` is a residue mod the N-th cyclotomic polynomial, always fully
//! reduced. `Scalar` is a sparse map from exponent vectors in Z^k to cyclotomic
//! coefficients; it is an integral domain, not a field, and division is only
//! attempted where it is exact. `UnitMonomial` (root of unity times a Laurent
//! monomial) is the canonical shape of character values and is always invertible.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Integer-coefficient cyclotomic polynomial Phi_n, ascending degree order.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    assert!(n >= 1);
    thread_local! {
        static CACHE: std::cell::RefCell<std::collections::HashMap<u64, Vec<BigInt>>> =
            std::cell::RefCell::new(std::collections::HashMap::new());
    }
    if let Some(hit) = CACHE.with(|c| c.borrow().get(&n).cloned()) {
        return hit;
    }
    // x^n - 1 divided by the product of Phi_d over proper divisors d of n.
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_polynomial(d);
            num = poly_div_exact_int(&num, &phi_d);
        }
    }
    CACHE.with(|c| c.borrow_mut().insert(n, num.clone()));
    num
}

fn poly_div_exact_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = a.to_vec();
    let db = b.len() - 1;
    assert!(b[db].is_one(), "divisor must be monic");
    let da = rem.len() - 1;
    assert!(da >= db);
    let mut quot = vec![BigInt::zero(); da - db + 1];
    for i in (0..=da - db).rev() {
        let c = rem[i + db].clone();
        if !c.is_zero() {
            quot[i] = c.clone();
            for j in 0..=db {
                rem[i + j] -= &c * &b[j];
            }
        }
    }
    assert!(rem.iter().all(|x| x.is_zero()), "inexact polynomial division");
    quot
}

/// Element of Q(zeta_N), stored reduced mod Phi_N.
#[derive(Clone)]
pub struct Cyclotomic {
    /// Conductor N.
    pub n: u64,
    /// Coefficients of 1, z, z^2, ..., length deg Phi_N.
    pub c: Vec<Rat>,
}

impl Cyclotomic {
    pub fn zero(n: u64) -> Self {
        let deg = cyclotomic_polynomial(n).len() - 1;
        Cyclotomic { n, c: vec![Rat::zero(); deg] }
    }

    pub fn from_rat(r: Rat) -> Self {
        Cyclotomic { n: 1, c: vec![r] }
    }

    pub fn from_int(k: i64) -> Self {
        Self::from_rat(rat_int(k))
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// zeta_n^j as an element of Q(zeta_n).
    pub fn root_of_unity(n: u64, j: i64) -> Self {
        let jm = j.rem_euclid(n as i64) as usize;
        let mut raw = vec![Rat::zero(); jm + 1];
        raw[jm] = Rat::one();
        Self::reduce_raw(n, raw)
    }

    fn reduce_raw(n: u64, mut raw: Vec<Rat>) -> Self {
        let phi = cyclotomic_polynomial(n);
        let deg = phi.len() - 1;
        while raw.len() > deg {
            let top = raw.len() - 1;
            let c = raw[top].clone();
            if !c.is_zero() {
                for j in 0..=deg {
                    let t = &c * Rat::from(phi[j].clone());
                    raw[top - deg + j] -= t;
                }
            }
            raw.pop();
        }
        raw.resize(deg, Rat::zero());
        Cyclotomic { n, c: raw }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_rational(&self) -> Option<Rat> {
        // Rational iff equal to the constant given by its degree-0 coefficient.
        if self.n == 1 {
            return Some(self.c[0].clone());
        }
        let cand = Cyclotomic::from_rat(self.c[0].clone()).lift(self.n);
        if cand.c == self.c {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    /// Re-express at conductor m, where n divides m.
    pub fn lift(&self, m: u64) -> Cyclotomic {
        if m == self.n {
            return self.clone();
        }
        assert!(m % self.n == 0, "conductor {} does not divide {}", self.n, m);
        let step = (m / self.n) as usize;
        let mut raw = vec![Rat::zero(); (self.c.len() - 1) * step + 1];
        for (i, ci) in self.c.iter().enumerate() {
            raw[i * step] = ci.clone();
        }
        Cyclotomic::reduce_raw(m, raw)
    }

    fn lift_pair(a: &Cyclotomic, b: &Cyclotomic) -> (Cyclotomic, Cyclotomic, u64) {
        let m = lcm(a.n, b.n);
        (a.lift(m), b.lift(m), m)
    }

    pub fn add(&self, other: &Cyclotomic) -> Cyclotomic {
        let (a, b, m) = Self::lift_pair(self, other);
        let c = a.c.iter().zip(b.c.iter()).map(|(x, y)| x + y).collect();
        Cyclotomic { n: m, c }
    }

    pub fn sub(&self, other: &Cyclotomic) -> Cyclotomic {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Cyclotomic {
        Cyclotomic { n: self.n, c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn mul(&self, other: &Cyclotomic) -> Cyclotomic {
        let (a, b, m) = Self::lift_pair(self, other);
        let mut raw = vec![Rat::zero(); a.c.len() + b.c.len() - 1];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                if !y.is_zero() {
                    raw[i + j] += x * y;
                }
            }
        }
        Cyclotomic::reduce_raw(m, raw)
    }

    pub fn scale(&self, r: &Rat) -> Cyclotomic {
        Cyclotomic { n: self.n, c: self.c.iter().map(|x| x * r).collect() }
    }

    /// Multiplicative inverse; Phi_N is irreducible over Q so every nonzero
    /// element is invertible. Panics on zero.
    pub fn inv(&self) -> Cyclotomic {
        assert!(!self.is_zero(), "inverse of zero cyclotomic");
        let phi: Vec<Rat> = cyclotomic_polynomial(self.n)
            .into_iter()
            .map(Rat::from)
            .collect();
        // Extended Euclid in Q[x]: s*self + t*phi = gcd, which must be a
        // nonzero constant since Phi_N is irreducible over Q.
        let (g, s, _t) = ext_gcd_poly(&self.c, &phi);
        assert!(
            poly_deg(&g) == Some(0),
            "gcd with Phi_N not constant; nonzero element should be invertible"
        );
        let ginv = Rat::one() / g[0].clone();
        Cyclotomic::reduce_raw(self.n, s.iter().map(|x| x * &ginv).collect())
    }

    pub fn pow(&self, m: i64) -> Cyclotomic {
        let base = if m < 0 { self.inv() } else { self.clone() };
        let mut e = m.unsigned_abs();
        let mut acc = Cyclotomic::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    /// If self is zeta_m^j for the given m, return j mod m.
    pub fn as_root_of_unity(&self, m: u64) -> Option<u64> {
        (0..m).find(|&j| self == &Cyclotomic::root_of_unity(m, j as i64))
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        // Value equality: lift both to the lcm conductor first.
        let m = lcm(self.n, other.n);
        self.lift(m).c == other.lift(m).c
    }
}

impl Eq for Cyclotomic {}

fn poly_deg(a: &[Rat]) -> Option<usize> {
    a.iter().rposition(|x| !x.is_zero())
}

fn poly_divmod(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let db = poly_deg(b).expect("division by zero polynomial");
    let mut rem = a.to_vec();
    let mut quot = vec![Rat::zero(); a.len().max(db + 1)];
    loop {
        match poly_deg(&rem) {
            Some(da) if da >= db => {
                let c = &rem[da] / &b[db];
                quot[da - db] = c.clone();
                for j in 0..=db {
                    let t = &c * &b[j];
                    rem[da - db + j] -= t;
                }
            }
            _ => break,
        }
    }
    (quot, rem)
}

fn ext_gcd_poly(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>, Vec<Rat>) {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    let mut s0 = vec![Rat::one()];
    let mut s1 = vec![Rat::zero()];
    let mut t0 = vec![Rat::zero()];
    let mut t1 = vec![Rat::one()];
    while poly_deg(&r1).is_some() {
        let (q, r) = poly_divmod(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        let t2 = poly_sub(&t0, &poly_mul(&q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    (r0, s0, t0)
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(Rat::zero);
        let y = b.get(i).cloned().unwrap_or_else(Rat::zero);
        out[i] = x - y;
    }
    out
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_cyclotomic(self))
    }
}

/// Sparse Laurent polynomial over Q(zeta): exponent vector in Z^k -> Cyclotomic.
#[derive(Clone, PartialEq, Eq)]
pub struct Scalar {
    pub k: usize,
    pub terms: BTreeMap<Vec<i64>, Cyclotomic>,
}

impl Scalar {
    pub fn zero(k: usize) -> Scalar {
        Scalar { k, terms: BTreeMap::new() }
    }

    pub fn from_cyclo(k: usize, c: Cyclotomic) -> Scalar {
        let mut s = Scalar::zero(k);
        if !c.is_zero() {
            s.terms.insert(vec![0; k], c);
        }
        s
    }

    pub fn one(k: usize) -> Scalar {
        Scalar::from_cyclo(k, Cyclotomic::one())
    }

    pub fn from_rat(k: usize, r: Rat) -> Scalar {
        Scalar::from_cyclo(k, Cyclotomic::from_rat(r))
    }

    pub fn from_int(k: usize, n: i64) -> Scalar {
        Scalar::from_rat(k, rat_int(n))
    }

    pub fn monomial(k: usize, exps: Vec<i64>, c: Cyclotomic) -> Scalar {
        assert_eq!(exps.len(), k);
        let mut s = Scalar::zero(k);
        if !c.is_zero() {
            s.terms.insert(exps, c);
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self == &Scalar::one(self.k)
    }

    /// Promote a constant (k = 0) to parameter count k; identity otherwise.
    pub fn promote(&self, k: usize) -> Scalar {
        if self.k == k {
            return self.clone();
        }
        assert!(
            self.k == 0,
            "parameter count mismatch: {} vs {} with neither constant",
            self.k,
            k
        );
        let mut s = Scalar::zero(k);
        for (_, c) in &self.terms {
            s.terms.insert(vec![0; k], c.clone());
        }
        s
    }

    fn unify(&self, other: &Scalar) -> (Scalar, Scalar) {
        let k = self.k.max(other.k);
        (self.promote(k), other.promote(k))
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        let (mut a, b) = self.unify(other);
        for (e, c) in b.terms {
            match a.terms.get_mut(&e) {
                Some(x) => {
                    let s = x.add(&c);
                    if s.is_zero() {
                        a.terms.remove(&e);
                    } else {
                        *x = s;
                    }
                }
                None => {
                    a.terms.insert(e, c);
                }
            }
        }
        a
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            k: self.k,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        let (a, b) = self.unify(other);
        let mut out = Scalar::zero(a.k);
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Vec<i64> = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                let c = ca.mul(cb);
                if c.is_zero() {
                    continue;
                }
                match out.terms.get_mut(&e) {
                    Some(x) => {
                        let s = x.add(&c);
                        if s.is_zero() {
                            out.terms.remove(&e);
                        } else {
                            *x = s;
                        }
                    }
                    None => {
                        out.terms.insert(e, c);
                    }
                }
            }
        }
        out
    }

    pub fn scale_rat(&self, r: &Rat) -> Scalar {
        if r.is_zero() {
            return Scalar::zero(self.k);
        }
        Scalar {
            k: self.k,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.scale(r))).collect(),
        }
    }

    /// Inverse of a single-term scalar (monomial times a nonzero cyclotomic
    /// constant). Multi-term scalars are not invertible here.
    pub fn monomial_inv(&self) -> Option<Scalar> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        Some(Scalar::monomial(self.k, e.iter().map(|x| -x).collect(), c.inv()))
    }

    /// Integer power; negative exponents need a single-term base.
    pub fn pow(&self, m: i64) -> Option<Scalar> {
        let base = if m >= 0 { self.clone() } else { self.monomial_inv()? };
        let mut out = Scalar::one(self.k);
        for _ in 0..m.abs() {
            out = out.mul(&base);
        }
        Some(out)
    }

    /// Single-term scalars are units; general inversion is not defined.
    pub fn as_unit(&self) -> Option<UnitMonomial> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        Some(UnitMonomial { cyclo: c.clone(), exps: e.clone() })
    }

    /// Exact division; None when other does not divide self in the Laurent ring.
    pub fn exact_div(&self, other: &Scalar) -> Option<Scalar> {
        let (a, b) = self.unify(other);
        assert!(!b.is_zero(), "exact_div by zero");
        if a.is_zero() {
            return Some(Scalar::zero(a.k));
        }
        // Divide out monomial content first: per-variable minimum exponents
        // are additive under multiplication in an integral domain, so after
        // normalizing both operands to minimum exponent zero the quotient, if
        // it exists, is an honest polynomial. Lex division on polynomials
        // terminates: the leading exponent strictly drops in a well-order,
        // and a leading term not divisible componentwise proves inexactness.
        let k = a.k;
        let min_exps = |s: &Scalar| -> Vec<i64> {
            let mut m = vec![i64::MAX; k];
            for e in s.terms.keys() {
                for (i, x) in e.iter().enumerate() {
                    m[i] = m[i].min(*x);
                }
            }
            m
        };
        let shift = |s: &Scalar, by: &[i64]| -> Scalar {
            Scalar {
                k,
                terms: s
                    .terms
                    .iter()
                    .map(|(e, c)| {
                        (e.iter().zip(by).map(|(x, y)| x + y).collect(), c.clone())
                    })
                    .collect(),
            }
        };
        let sa = min_exps(&a);
        let sb = min_exps(&b);
        let neg = |v: &[i64]| -> Vec<i64> { v.iter().map(|x| -x).collect() };
        let mut rem = shift(&a, &neg(&sa));
        let b = shift(&b, &neg(&sb));
        let (eb, cb) = b.terms.iter().next_back().unwrap();
        let eb = eb.clone();
        let cb_inv = cb.inv();
        let mut quot_terms: BTreeMap<Vec<i64>, Cyclotomic> = BTreeMap::new();
        while !rem.is_zero() {
            let (ea, ca) = rem.terms.iter().next_back().unwrap();
            if ea.iter().zip(eb.iter()).any(|(x, y)| x < y) {
                return None;
            }
            let e: Vec<i64> = ea.iter().zip(eb.iter()).map(|(x, y)| x - y).collect();
            let t = Scalar::monomial(k, e.clone(), ca.mul(&cb_inv));
            quot_terms.insert(e, ca.mul(&cb_inv));
            rem = rem.sub(&t.mul(&b));
        }
        let quot = Scalar { k, terms: quot_terms };
        let total: Vec<i64> = sa.iter().zip(sb.iter()).map(|(x, y)| x - y).collect();
        Some(shift(&quot, &total))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_scalar(self))
    }
}

/// Root of unity times a Laurent monomial; always invertible.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UnitMonomial {
    pub cyclo: Cyclotomic,
    pub exps: Vec<i64>,
}

impl UnitMonomial {
    pub fn one(k: usize) -> Self {
        UnitMonomial { cyclo: Cyclotomic::one(), exps: vec![0; k] }
    }

    pub fn from_cyclo(k: usize, c: Cyclotomic) -> Self {
        assert!(!c.is_zero(), "unit with zero cyclotomic part");
        UnitMonomial { cyclo: c, exps: vec![0; k] }
    }

    pub fn param(k: usize, i: usize) -> Self {
        let mut e = vec![0; k];
        e[i] = 1;
        UnitMonomial { cyclo: Cyclotomic::one(), exps: e }
    }

    pub fn k(&self) -> usize {
        self.exps.len()
    }

    fn promote(&self, k: usize) -> UnitMonomial {
        if self.k() == k {
            return self.clone();
        }
        assert!(self.k() == 0, "parameter count mismatch in unit");
        UnitMonomial { cyclo: self.cyclo.clone(), exps: vec![0; k] }
    }

    pub fn mul(&self, other: &UnitMonomial) -> UnitMonomial {
        let k = self.k().max(other.k());
        let (a, b) = (self.promote(k), other.promote(k));
        UnitMonomial {
            cyclo: a.cyclo.mul(&b.cyclo),
            exps: a.exps.iter().zip(b.exps.iter()).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn inv(&self) -> UnitMonomial {
        UnitMonomial {
            cyclo: self.cyclo.inv(),
            exps: self.exps.iter().map(|x| -x).collect(),
        }
    }

    pub fn pow(&self, m: i64) -> UnitMonomial {
        UnitMonomial {
            cyclo: self.cyclo.pow(m),
            exps: self.exps.iter().map(|x| x * m).collect(),
        }
    }

    pub fn to_scalar(&self, k: usize) -> Scalar {
        let u = self.promote(k.max(self.k()));
        Scalar::monomial(u.k(), u.exps.clone(), u.cyclo.clone())
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|x| *x == 0) && self.cyclo.is_rational() == Some(Rat::one())
    }

    /// Multiplicative order, if finite. Pure monomial parts have infinite order.
    pub fn order(&self) -> Option<u64> {
        if self.exps.iter().any(|x| *x != 0) {
            return None;
        }
        // Roots of unity in Q(zeta_n) are exactly the +-zeta_n^j, so any
        // finite order divides lcm(2, n).
        let n = lcm(2, self.cyclo.n.max(1));
        let mut acc = Cyclotomic::one();
        for d in 1..=n {
            acc = acc.mul(&self.cyclo);
            if acc.is_rational() == Some(Rat::one()) {
                return Some(d);
            }
        }
        None
    }
}

pub fn render_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn render_cyclotomic(c: &Cyclotomic) -> String {
    if c.is_zero() {
        return "0".into();
    }
    let mut parts = vec![];
    for (i, x) in c.c.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "z".into(),
            _ => format!("z^{}", i),
        };
        let coeff = render_rat(&x.abs());
        let body = if mono.is_empty() {
            coeff
        } else if x.abs().is_one() {
            mono
        } else {
            format!("{}*{}", coeff, mono)
        };
        let sign = if x.is_negative() { "-" } else { "+" };
        parts.push((sign.to_string(), body));
    }
    let mut out = String::new();
    for (i, (sign, body)) in parts.iter().enumerate() {
        if i == 0 {
            if sign == "-" {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {} ", sign));
        }
        out.push_str(body);
    }
    out
}

pub fn render_scalar(s: &Scalar) -> String {
    if s.is_zero() {
        return "0".into();
    }
    let mut parts: Vec<String> = vec![];
    for (e, c) in s.terms.iter().rev() {
        let mut factors: Vec<String> = vec![];
        let cs = render_cyclotomic(c);
        let simple = !cs.contains('+') && !cs.contains(" - ");
        let coeff = if simple { cs } else { format!("({})", cs) };
        if coeff != "1" || e.iter().all(|x| *x == 0) {
            factors.push(coeff);
        }
        for (i, x) in e.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            if *x == 1 {
                factors.push(format!("q{}", i + 1));
            } else {
                factors.push(format!("q{}^{}", i + 1, x));
            }
        }
        parts.push(factors.join("*"));
    }
    parts.join(" + ")
}

/// Parse the scalar grammar: sums of terms, each a `*`-product of rationals,
/// `z` powers and `q<i>` powers, e.g. `3/2*z^2*q1^-1 + 1`.
pub fn parse_scalar(text: &str, conductor: u64, k: usize) -> Result<Scalar, String> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0, conductor, k };
    p.skip_ws();
    let s = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(format!("trailing input at byte {} in scalar `{}`", p.pos, text));
    }
    Ok(s)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    conductor: u64,
    k: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn expr(&mut self) -> Result<Scalar, String> {
        let mut acc;
        self.skip_ws();
        let neg = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            if self.peek() == Some('+') {
                self.pos += 1;
            }
            false
        };
        acc = self.term()?;
        if neg {
            acc = acc.neg();
        }
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some('-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Scalar, String> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('*') {
                self.pos += 1;
                let f = self.factor()?;
                acc = acc.mul(&f);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Scalar, String> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err("expected `)`".into());
                }
                self.pos += 1;
                Ok(e)
            }
            Some('-') => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some('z') => {
                self.pos += 1;
                let e = self.opt_exponent()?;
                Ok(Scalar::from_cyclo(self.k, Cyclotomic::root_of_unity(self.conductor, e)))
            }
            Some('q') => {
                self.pos += 1;
                let idx = self.integer()? as usize;
                if idx == 0 || idx > self.k {
                    return Err(format!("parameter q{} out of range (k = {})", idx, self.k));
                }
                let e = self.opt_exponent()?;
                let mut exps = vec![0i64; self.k];
                exps[idx - 1] = e;
                Ok(Scalar::monomial(self.k, exps, Cyclotomic::one()))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                if self.peek() == Some('/') {
                    self.pos += 1;
                    let d = self.integer()?;
                    if d == 0 {
                        return Err("zero denominator".into());
                    }
                    Ok(Scalar::from_rat(self.k, rat(n, d)))
                } else {
                    let mut base = Scalar::from_int(self.k, n);
                    if self.peek() == Some('^') {
                        let e = self.opt_exponent()?;
                        if e < 0 {
                            return Err("negative power of integer".into());
                        }
                        let mut acc = Scalar::one(self.k);
                        for _ in 0..e {
                            acc = acc.mul(&base);
                        }
                        base = acc;
                    }
                    Ok(base)
                }
            }
            other => Err(format!("unexpected {:?} in scalar", other)),
        }
    }

    fn opt_exponent(&mut self) -> Result<i64, String> {
        if self.peek() == Some('^') {
            self.pos += 1;
            let neg = if self.peek() == Some('-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let n = self.integer()?;
            Ok(if neg { -n } else { n })
        } else {
            Ok(1)
        }
    }

    fn integer(&mut self) -> Result<i64, String> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err("expected integer".into());
        }
        self.chars[start..self.pos]
            .iter()
            .collect::<String>()
            .parse::<i64>()
            .map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_polynomials() {
        let as_i64 = |v: Vec<BigInt>| -> Vec<i64> {
            v.into_iter().map(|x| i64::try_from(x).unwrap()).collect()
        };
        assert_eq!(as_i64(cyclotomic_polynomial(1)), vec![-1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(2)), vec![1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(3)), vec![1, 1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(4)), vec![1, 0, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(6)), vec![1, -1, 1]);
        assert_eq!(as_i64(cyclotomic_polynomial(12)), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn zeta3_sum_vanishes() {
        let z = Cyclotomic::root_of_unity(3, 1);
        let s = Cyclotomic::one().add(&z).add(&z.mul(&z));
        assert!(s.is_zero());
    }

    #[test]
    fn zeta4_squares_to_minus_one() {
        let i = Cyclotomic::root_of_unity(4, 1);
        assert_eq!(i.mul(&i), Cyclotomic::from_int(-1).lift(4));
        assert_eq!(i.inv(), i.neg());
    }

    #[test]
    fn cross_conductor_arithmetic() {
        let z3 = Cyclotomic::root_of_unity(3, 1);
        let z2 = Cyclotomic::root_of_unity(2, 1);
        let p = z3.mul(&z2);
        assert_eq!(p.pow(6), Cyclotomic::one().lift(p.n));
        assert_eq!(p.as_root_of_unity(6), Some(5));
    }

    #[test]
    fn laurent_cancellation() {
        let q = UnitMonomial::param(1, 0);
        let s = q.pow(2).to_scalar(1).mul(&q.pow(-2).to_scalar(1));
        assert!(s.is_one());
    }

    #[test]
    fn difference_of_squares() {
        let q = UnitMonomial::param(1, 0).to_scalar(1);
        let one = Scalar::one(1);
        let lhs = one.add(&q).mul(&one.sub(&q));
        let rhs = one.sub(&q.mul(&q));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn unit_pow_and_inv() {
        let z3 = UnitMonomial::from_cyclo(1, Cyclotomic::root_of_unity(3, 1));
        let q = UnitMonomial::param(1, 0);
        let u = z3.mul(&q);
        // (zeta_3 q)^3 = q^3
        let cube = u.pow(3);
        assert_eq!(cube.to_scalar(1), q.pow(3).to_scalar(1));
        assert!(u.mul(&u.inv()).is_one());
        assert_eq!(UnitMonomial::from_cyclo(0, Cyclotomic::from_int(2)).inv().cyclo,
                   Cyclotomic::from_rat(rat(1, 2)));
    }

    #[test]
    fn unit_order() {
        let z6 = UnitMonomial::from_cyclo(0, Cyclotomic::root_of_unity(6, 1));
        assert_eq!(z6.order(), Some(6));
        assert_eq!(UnitMonomial::param(1, 0).order(), None);
        assert_eq!(UnitMonomial::one(0).order(), Some(1));
    }

    #[test]
    fn exact_division() {
        let q = UnitMonomial::param(1, 0).to_scalar(1);
        let one = Scalar::one(1);
        let a = one.sub(&q.mul(&q));
        let b = one.sub(&q);
        let c = a.exact_div(&b).unwrap();
        assert_eq!(c, one.add(&q));
        assert!(one.sub(&q.mul(&q.mul(&q))).exact_div(&b).is_some());
        assert!(one.add(&q.mul(&q)).exact_div(&b).is_none());
    }

    #[test]
    fn parse_round_trip() {
        let s = parse_scalar("3/2*z^2*q1^-1 + 1", 4, 1).unwrap();
        let z = Cyclotomic::root_of_unity(4, 2);
        let expected = Scalar::monomial(1, vec![-1], z.scale(&rat(3, 2))).add(&Scalar::one(1));
        assert_eq!(s, expected);
        let txt = render_scalar(&s);
        assert_eq!(parse_scalar(&txt, 4, 1).unwrap(), s);
        assert!(parse_scalar("q2", 1, 1).is_err());
        assert_eq!(parse_scalar("-q1 + q1", 1, 1).unwrap(), Scalar::zero(1));
    }
}
