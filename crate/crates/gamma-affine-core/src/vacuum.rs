//! Depth-truncated vacuum modules: the level-ell module induced from the
//! one-dimensional representation where nonnegative degrees act by zero and
//! the central element acts by ell. Vectors are exact sums of normal-ordered
//! creation monomials applied to the vacuum; the action is computed by moving
//! operators through the monomial with the twisted bracket. Terms whose degree
//! would exceed the truncation depth are never silently dropped: they set an
//! overflow flag that poisons equality checks.

use std::cell::RefCell;
use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::rc::Rc;

use crate::affine::{AffineElement, Affinization};
use crate::report::Report;
use crate::scalars::Scalar;

/// A creation entry (n, l): the canonical basis symbol l placed at degree -n,
/// n >= 1. Monomials are sequences of entries sorted by n descending, then
/// label ascending.
pub type Monomial = Vec<(i64, usize)>;

fn entry_le(a: (i64, usize), b: (i64, usize)) -> bool {
    (Reverse(a.0), a.1) <= (Reverse(b.0), b.1)
}

pub fn monomial_degree(m: &[(i64, usize)]) -> i64 {
    m.iter().map(|(n, _)| *n).sum()
}

/// Finite sum of normal-ordered monomials with exact coefficients. The
/// overflow flag records that some term beyond the truncation depth was
/// discarded; such vectors compare unequal to everything.
#[derive(Clone, Debug)]
pub struct PBWVector {
    pub terms: BTreeMap<Monomial, Scalar>,
    pub overflow: bool,
    k: usize,
}

impl PBWVector {
    pub fn zero(k: usize) -> Self {
        PBWVector { terms: BTreeMap::new(), overflow: false, k }
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &PBWVector) -> PBWVector {
        let mut out = self.clone();
        out.overflow |= other.overflow;
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &PBWVector) -> PBWVector {
        self.add(&other.scale_int(-1))
    }

    pub fn scale(&self, s: &Scalar) -> PBWVector {
        let mut out = PBWVector::zero(self.k);
        out.overflow = self.overflow;
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.mul(s));
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> PBWVector {
        self.scale(&Scalar::from_int(self.k, n))
    }

    pub fn is_zero(&self) -> bool {
        !self.overflow && self.terms.is_empty()
    }

    /// Exact equality; vectors that lost terms to truncation never compare
    /// equal.
    pub fn eq_exact(&self, other: &PBWVector) -> bool {
        !self.overflow && !other.overflow && self.terms == other.terms
    }

    pub fn degree(&self) -> Option<i64> {
        let mut d: Option<i64> = None;
        for m in self.terms.keys() {
            let md = monomial_degree(m);
            match d {
                None => d = Some(md),
                Some(x) if x == md => {}
                _ => return None,
            }
        }
        d
    }
}

/// Level-ell vacuum module truncated at depth D, with the graded monomial
/// basis enumerated per degree.
pub struct TruncatedModule {
    pub alg: Rc<Affinization>,
    pub depth: i64,
    pub level: Scalar,
    /// basis[d] lists the normal-ordered monomials of degree d, 0 <= d <= D.
    pub basis: Vec<Vec<Monomial>>,
    bracket_cache: RefCell<BTreeMap<((i64, usize), (i64, usize)), AffineElement>>,
}

impl TruncatedModule {
    pub fn new(alg: Rc<Affinization>, depth: i64, level: Scalar) -> Self {
        assert!(depth >= 0);
        let mut basis: Vec<Vec<Monomial>> = vec![vec![]; depth as usize + 1];
        basis[0].push(vec![]);
        // Per-degree creation labels, largest part first.
        let labels: Vec<(i64, Vec<usize>)> =
            (1..=depth).map(|n| (n, degree_labels(&alg, -n))).collect();
        let mut stack: Vec<(Monomial, i64)> = vec![(vec![], 0)];
        while let Some((mono, deg)) = stack.pop() {
            let last = mono.last().copied();
            for (n, ls) in &labels {
                if deg + n > depth {
                    continue;
                }
                for l in ls {
                    if let Some(prev) = last {
                        if !entry_le(prev, (*n, *l)) {
                            continue;
                        }
                    }
                    let mut next = mono.clone();
                    next.push((*n, *l));
                    basis[(deg + n) as usize].push(next.clone());
                    stack.push((next, deg + n));
                }
            }
        }
        for b in &mut basis {
            b.sort();
        }
        TruncatedModule { alg, depth, level, basis, bracket_cache: RefCell::new(BTreeMap::new()) }
    }

    pub fn k(&self) -> usize {
        self.alg.k()
    }

    pub fn vacuum(&self) -> PBWVector {
        let mut v = PBWVector::zero(self.k());
        v.add_term(vec![], Scalar::one(self.k()));
        v
    }

    pub fn dims(&self) -> Vec<usize> {
        self.basis.iter().map(|b| b.len()).collect()
    }

    pub fn monomial_vector(&self, m: &[(i64, usize)]) -> PBWVector {
        let mut v = PBWVector::zero(self.k());
        v.add_term(m.to_vec(), Scalar::one(self.k()));
        v
    }

    fn deposit(&self, out: &mut PBWVector, m: Monomial, c: Scalar) {
        if monomial_degree(&m) > self.depth {
            if !c.is_zero() {
                out.overflow = true;
            }
        } else {
            out.add_term(m, c);
        }
    }

    fn gen_elem(&self, m: i64, l: usize) -> AffineElement {
        let mut e = self.alg.zero();
        let zero = self.alg.pres.character().group.zero();
        e.add_term(m, zero, l, Scalar::one(self.k()));
        e
    }

    fn cached_bracket(&self, a: (i64, usize), b: (i64, usize)) -> AffineElement {
        if let Some(x) = self.bracket_cache.borrow().get(&(a, b)) {
            return x.clone();
        }
        let br =
            self.alg.gamma_bracket(&self.gen_elem(a.0, a.1), &self.gen_elem(b.0, b.1));
        self.bracket_cache.borrow_mut().insert((a, b), br.clone());
        br
    }

    /// Apply the canonical generator l at degree m to one monomial.
    fn act_single(&self, m: i64, l: usize, mu: &[(i64, usize)]) -> PBWVector {
        let k = self.k();
        let head = match mu.first() {
            None => {
                let mut out = PBWVector::zero(k);
                if m < 0 {
                    self.deposit(&mut out, vec![(-m, l)], Scalar::one(k));
                }
                return out;
            }
            Some(h) => *h,
        };
        if m < 0 && entry_le((-m, l), head) {
            let mut v = Vec::with_capacity(mu.len() + 1);
            v.push((-m, l));
            v.extend_from_slice(mu);
            let mut out = PBWVector::zero(k);
            self.deposit(&mut out, v, Scalar::one(k));
            return out;
        }
        // a(m) b(-n1) = b(-n1) a(m) + [a(m), b(-n1)].
        let tail = &mu[1..];
        let inner = self.act_single(m, l, tail);
        let mut out = self.act_vector(-head.0, head.1, &inner);
        let br = self.cached_bracket((m, l), (-head.0, head.1));
        out = out.add(&self.act_elem_on(&br, tail));
        out
    }

    fn act_vector(&self, m: i64, l: usize, w: &PBWVector) -> PBWVector {
        let mut out = PBWVector::zero(self.k());
        out.overflow = w.overflow;
        for (mu, c) in &w.terms {
            out = out.add(&self.act_single(m, l, mu).scale(c));
        }
        out
    }

    fn act_elem_on(&self, x: &AffineElement, mu: &[(i64, usize)]) -> PBWVector {
        let mut out = PBWVector::zero(self.k());
        for ((m, _g, l), c) in &x.terms {
            out = out.add(&self.act_single(*m, *l, mu).scale(c));
        }
        if !x.central.is_zero() {
            self.deposit(&mut out, mu.to_vec(), x.central.mul(&self.level));
        }
        out
    }

    /// Action of a canonical generator: label l from the degree-m canonical
    /// basis.
    pub fn act(&self, l: usize, m: i64, w: &PBWVector) -> PBWVector {
        self.act_vector(m, l, w)
    }

    /// Action of an arbitrary loop element (canonicalized first; the central
    /// part acts as the level).
    pub fn act_elem(&self, x: &AffineElement, w: &PBWVector) -> PBWVector {
        let x = self.alg.canonicalize(x);
        let mut out = PBWVector::zero(self.k());
        out.overflow = w.overflow;
        for (mu, c) in &w.terms {
            out = out.add(&self.act_elem_on(&x, mu).scale(c));
        }
        out
    }

    /// Commutator of the module action against the action of the twisted
    /// bracket, over all canonical generator pairs with |m|, |n| <= modes and
    /// all basis vectors deep enough that neither order can overflow.
    pub fn check_module_relations(&self, modes: i64) -> Report {
        self.check_relations_against(self, modes)
    }

    /// Same sweep with the bracket side acting in `rhs` (used to show that a
    /// wrong level is caught).
    pub fn check_relations_against(&self, rhs: &TruncatedModule, modes: i64) -> Report {
        let mut rep = Report::new();
        let mut checked = 0usize;
        let mut witness: Option<String> = None;
        for m in -modes..=modes {
            for n in -modes..=modes {
                let us = degree_labels(&self.alg, m);
                let vs = degree_labels(&self.alg, n);
                let room = self.depth - m.min(0).abs() - n.min(0).abs();
                for &u in &us {
                    for &v in &vs {
                        let br = self.cached_bracket((m, u), (n, v));
                        for d in 0..=room {
                            for mono in &self.basis[d as usize] {
                                let w = self.monomial_vector(mono);
                                let lhs = self
                                    .act(u, m, &self.act(v, n, &w))
                                    .sub(&self.act(v, n, &self.act(u, m, &w)));
                                let r = rhs.act_elem(&br, &w);
                                checked += 1;
                                if lhs.overflow || r.overflow {
                                    witness.get_or_insert(format!(
                                        "overflow at m={} n={} u={} v={} w={:?}",
                                        m, n, u, v, mono
                                    ));
                                } else if !lhs.eq_exact(&r) {
                                    witness.get_or_insert(format!(
                                        "mismatch at m={} n={} u={} v={} w={:?}",
                                        m, n, u, v, mono
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        match witness {
            None => rep.pass_windowed(
                "module-relations",
                format!("modes<={} depth={} checked={}", modes, self.depth, checked),
            ),
            Some(w) => rep.fail("module-relations", w),
        }
        rep
    }
}

/// Canonical basis labels of the loop algebra at one degree.
pub fn degree_labels(alg: &Affinization, m: i64) -> Vec<usize> {
    alg.degree_basis(m)
        .iter()
        .map(|e| e.terms.keys().next().expect("basis vectors are single terms").2)
        .collect()
}

/// Number of weakly ordered creation monomials per degree, given the number
/// of available symbols at each part size. Multiset counting by the usual
/// product of geometric series.
pub fn graded_monomial_counts(colors: &[usize], depth: usize) -> Vec<usize> {
    let mut ways = vec![0usize; depth + 1];
    ways[0] = 1;
    for n in 1..=depth {
        let c = if n <= colors.len() { colors[n - 1] } else { 0 };
        for _ in 0..c {
            for d in n..=depth {
                ways[d] += ways[d - n];
            }
        }
    }
    ways
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    fn module(p: crate::lie::Presentation, depth: i64, level: i64) -> TruncatedModule {
        let alg = Rc::new(Affinization::new(p));
        let k = alg.k();
        TruncatedModule::new(alg, depth, Scalar::from_int(k, level))
    }

    #[test]
    fn untwisted_rank_one_dimensions_are_partition_numbers() {
        let m = module(examples::heisenberg_untwisted(), 6, 1);
        assert_eq!(m.dims(), vec![1, 1, 2, 3, 5, 7, 11]);
        let oracle = graded_monomial_counts(&[1, 1, 1, 1, 1, 1], 6);
        assert_eq!(m.dims(), oracle);
    }

    #[test]
    fn twisted_rank_one_dimensions_count_odd_partitions() {
        let m = module(examples::heisenberg1(), 6, 1);
        assert_eq!(m.dims(), vec![1, 1, 1, 2, 2, 3, 4]);
        let oracle = graded_monomial_counts(&[1, 0, 1, 0, 1, 0], 6);
        assert_eq!(m.dims(), oracle);
    }

    #[test]
    fn depth_zero_is_just_the_vacuum() {
        let m = module(examples::sl2_chevalley(), 0, 1);
        assert_eq!(m.dims(), vec![1]);
    }

    #[test]
    fn sl2_twisted_dimensions_match_loop_degrees() {
        let m = module(examples::sl2_chevalley(), 3, 1);
        // Loop degrees alternate dim 1 (even) and 2 (odd).
        let oracle = graded_monomial_counts(&[2, 1, 2], 3);
        assert_eq!(m.dims(), oracle);
    }

    #[test]
    fn central_term_acts_as_level() {
        let m = module(examples::heisenberg_untwisted(), 4, 1);
        let w = m.monomial_vector(&[(1, 0)]);
        let out = m.act(0, 1, &w);
        assert!(out.eq_exact(&m.vacuum()));
        assert!(m.act(0, 0, &m.vacuum()).is_zero());
        assert!(m.act(0, 2, &w).is_zero());
    }

    #[test]
    fn twisted_central_term_is_doubled() {
        // [a(1), a(-1)] in the order-two twist is 2k.
        let m = module(examples::heisenberg1(), 4, 1);
        let w = m.monomial_vector(&[(1, 0)]);
        let out = m.act(0, 1, &w);
        assert!(out.eq_exact(&m.vacuum().scale_int(2)));
    }

    #[test]
    fn heisenberg_relations_hold() {
        let m = module(examples::heisenberg1(), 6, 1);
        let rep = m.check_module_relations(3);
        assert!(rep.passed(), "{}", rep.render());
    }

    #[test]
    fn heisenberg_relations_hold_at_formal_level() {
        let p = examples::heisenberg1_params(1);
        let alg = Rc::new(Affinization::new(p));
        let level = crate::scalars::UnitMonomial::param(1, 0).to_scalar(1);
        let m = TruncatedModule::new(alg, 6, level);
        let rep = m.check_module_relations(3);
        assert!(rep.passed(), "{}", rep.render());
    }

    #[test]
    fn gl_torus_relations_hold() {
        let m = module(examples::gl_torus(7, 1), 4, 1);
        let rep = m.check_module_relations(3);
        assert!(rep.passed(), "{}", rep.render());
    }

    #[test]
    fn wrong_level_is_caught_with_witness() {
        let good = module(examples::heisenberg1(), 4, 1);
        let bad = module(examples::heisenberg1(), 4, 2);
        let rep = good.check_relations_against(&bad, 2);
        assert!(!rep.passed());
        let w = rep.first_failure().unwrap().witness.clone().unwrap();
        assert!(w.contains("mismatch"));
    }

    #[test]
    fn action_is_restricted_by_grading() {
        let m = module(examples::heisenberg1(), 5, 1);
        let w = m.monomial_vector(&[(3, 0), (1, 0)]);
        for mode in [5, 7, 9] {
            assert!(m.act(0, mode, &w).is_zero());
        }
    }
}
