//! Group-equivariant Lie algebra presentations. Two shapes are supported:
//! a finite basis with the group acting through matrices, and a free-orbit
//! shape where the basis is `T_g u` for `g` in the group and `u` one of
//! finitely many orbit generators, with bracket data of finite support.
//!
//! The free-orbit shape is banded: bracket data is declared for label pairs
//! whose results stay inside the stored band, and axiom checks quantify over
//! a designated subset of generators whose brackets are guaranteed declared.
//! Looking up an undeclared pair is a hard error rather than silent zero.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::group::{AbelianGroup, Character, GroupElement, Quotient, Subgroup};
use crate::linalg::{mat_identity, mat_inverse, mat_mul, Echelon, Matrix};
use crate::report::Report;
use crate::scalars::Scalar;

/// A vector in the presented algebra: finite combination of basis symbols
/// `T_g u_label`. Finite presentations keep the group part at zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieElement {
    pub terms: BTreeMap<(GroupElement, usize), Scalar>,
}

impl LieElement {
    pub fn zero() -> Self {
        LieElement { terms: BTreeMap::new() }
    }

    pub fn basic(g: GroupElement, label: usize, c: Scalar) -> Self {
        let mut e = LieElement::zero();
        e.add_term(g, label, c);
        e
    }

    pub fn add_term(&mut self, g: GroupElement, label: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((g, label));
        use std::collections::btree_map::Entry;
        match entry {
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

    pub fn add(&self, other: &LieElement) -> LieElement {
        let mut out = self.clone();
        for ((g, l), c) in &other.terms {
            out.add_term(g.clone(), *l, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LieElement) -> LieElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LieElement {
        LieElement {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> LieElement {
        if s.is_zero() {
            return LieElement::zero();
        }
        LieElement {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.mul(s))).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Shift every group component by a.
    pub fn translate(&self, group: &AbelianGroup, a: &GroupElement) -> LieElement {
        LieElement {
            terms: self
                .terms
                .iter()
                .map(|((g, l), c)| ((group.add(g, a), *l), c.clone()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FinitePresentation {
    pub labels: Vec<String>,
    pub character: Character,
    /// Structure constants for declared ordered pairs, as sparse results.
    /// The reversed pair is derived by antisymmetry when not declared itself.
    pub bracket: BTreeMap<(usize, usize), Vec<(usize, Scalar)>>,
    pub form: BTreeMap<(usize, usize), Scalar>,
    /// One matrix per group generator; column j is the image of basis j.
    pub action: Vec<Matrix>,
    action_inv: Vec<Option<Matrix>>,
}

impl FinitePresentation {
    pub fn new(
        labels: Vec<String>,
        character: Character,
        bracket: BTreeMap<(usize, usize), Vec<(usize, Scalar)>>,
        form: BTreeMap<(usize, usize), Scalar>,
        action: Vec<Matrix>,
    ) -> Self {
        let n = labels.len();
        assert_eq!(action.len(), character.group.ngens());
        for m in &action {
            assert_eq!(m.len(), n);
        }
        let k = character.k;
        let action_inv = action.iter().map(|m| mat_inverse(m, k)).collect();
        FinitePresentation { labels, character, bracket, form, action, action_inv }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    fn k(&self) -> usize {
        self.character.k
    }

    /// [a_i, a_j] from the table, falling back to -[a_j, a_i].
    pub fn bracket_basis(&self, i: usize, j: usize) -> LieElement {
        let zero = self.character.group.zero();
        if let Some(v) = self.bracket.get(&(i, j)) {
            let mut out = LieElement::zero();
            for (l, c) in v {
                out.add_term(zero.clone(), *l, c.clone());
            }
            return out;
        }
        if let Some(v) = self.bracket.get(&(j, i)) {
            let mut out = LieElement::zero();
            for (l, c) in v {
                out.add_term(zero.clone(), *l, c.neg());
            }
            return out;
        }
        LieElement::zero()
    }

    pub fn form_basis(&self, i: usize, j: usize) -> Scalar {
        if let Some(c) = self.form.get(&(i, j)) {
            return c.clone();
        }
        if let Some(c) = self.form.get(&(j, i)) {
            return c.clone();
        }
        Scalar::zero(self.k())
    }

    /// The matrix of g acting on the basis.
    pub fn act_matrix(&self, g: &GroupElement) -> Matrix {
        let mut m = mat_identity(self.dim(), self.k());
        for (i, c) in g.coords.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let (base, e) = if *c > 0 {
                (&self.action[i], *c)
            } else {
                let inv = self.action_inv[i]
                    .as_ref()
                    .expect("action matrix is not invertible");
                (inv, -*c)
            };
            for _ in 0..e {
                m = mat_mul(&m, base);
            }
        }
        m
    }

    fn coords(&self, x: &LieElement) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(self.k()); self.dim()];
        for ((g, l), c) in &x.terms {
            assert!(self.character.group.is_zero(g), "finite presentation with shifted term");
            v[*l] = v[*l].add(c);
        }
        v
    }

    fn from_coords(&self, v: &[Scalar]) -> LieElement {
        let zero = self.character.group.zero();
        let mut out = LieElement::zero();
        for (l, c) in v.iter().enumerate() {
            out.add_term(zero.clone(), l, c.clone());
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct FreeOrbitPresentation {
    pub labels: Vec<String>,
    pub character: Character,
    /// [T_g u_i, u_j] for declared pairs (i, j): finite support over g.
    pub bracket: BTreeMap<(usize, usize), Vec<(GroupElement, LieElement)>>,
    /// <T_g u_i, u_j> for declared pairs: finite support over g.
    pub form: BTreeMap<(usize, usize), Vec<(GroupElement, Scalar)>>,
    /// Labels over which axiom checks quantify; their pairwise data, and the
    /// data of everything their brackets reach, must be declared.
    pub check_gens: Vec<usize>,
    /// Group elements used to translate check generators during checks.
    pub check_translates: Vec<GroupElement>,
}

impl FreeOrbitPresentation {
    fn k(&self) -> usize {
        self.character.k
    }

    fn group(&self) -> &AbelianGroup {
        &self.character.group
    }

    /// [T_g u_i, u_j]. Panics if neither (i, j) nor (j, i) is declared.
    pub fn bracket_at(&self, i: usize, j: usize, g: &GroupElement) -> LieElement {
        if let Some(v) = self.bracket.get(&(i, j)) {
            for (h, val) in v {
                if h == g {
                    return val.clone();
                }
            }
            return LieElement::zero();
        }
        if let Some(v) = self.bracket.get(&(j, i)) {
            // [T_g u_i, u_j] = -T_g [T_{-g} u_j, u_i]
            let ng = self.group().neg(g);
            for (h, val) in v {
                if *h == ng {
                    return val.translate(self.group(), g).neg();
                }
            }
            return LieElement::zero();
        }
        panic!(
            "bracket pair ({}, {}) not declared; band too small",
            self.labels[i], self.labels[j]
        );
    }

    /// Support of g -> [T_g u_i, u_j].
    pub fn bracket_support(&self, i: usize, j: usize) -> Vec<GroupElement> {
        if let Some(v) = self.bracket.get(&(i, j)) {
            return v.iter().map(|(h, _)| h.clone()).collect();
        }
        if let Some(v) = self.bracket.get(&(j, i)) {
            return v.iter().map(|(h, _)| self.group().neg(h)).collect();
        }
        panic!(
            "bracket pair ({}, {}) not declared; band too small",
            self.labels[i], self.labels[j]
        );
    }

    pub fn form_at(&self, i: usize, j: usize, g: &GroupElement) -> Scalar {
        if let Some(v) = self.form.get(&(i, j)) {
            for (h, val) in v {
                if h == g {
                    return val.clone();
                }
            }
            return Scalar::zero(self.k());
        }
        if let Some(v) = self.form.get(&(j, i)) {
            // <T_g u_i, u_j> = <u_j, T_g u_i> = <T_{-g} u_j, u_i>
            let ng = self.group().neg(g);
            for (h, val) in v {
                if *h == ng {
                    return val.clone();
                }
            }
        }
        Scalar::zero(self.k())
    }

    pub fn form_support(&self, i: usize, j: usize) -> Vec<GroupElement> {
        let mut out = vec![];
        if let Some(v) = self.form.get(&(i, j)) {
            out.extend(v.iter().map(|(h, _)| h.clone()));
        }
        if let Some(v) = self.form.get(&(j, i)) {
            out.extend(v.iter().map(|(h, _)| self.group().neg(h)));
        }
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug)]
pub enum Presentation {
    Finite(FinitePresentation),
    FreeOrbit(FreeOrbitPresentation),
}

impl Presentation {
    pub fn character(&self) -> &Character {
        match self {
            Presentation::Finite(p) => &p.character,
            Presentation::FreeOrbit(p) => &p.character,
        }
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.character().group
    }

    pub fn k(&self) -> usize {
        self.character().k
    }

    pub fn labels(&self) -> &[String] {
        match self {
            Presentation::Finite(p) => &p.labels,
            Presentation::FreeOrbit(p) => &p.labels,
        }
    }

    /// g acting on a vector.
    pub fn act(&self, g: &GroupElement, x: &LieElement) -> LieElement {
        match self {
            Presentation::Finite(p) => {
                let m = p.act_matrix(g);
                let v = crate::linalg::mat_apply(&m, &p.coords(x), p.k());
                p.from_coords(&v)
            }
            Presentation::FreeOrbit(p) => x.translate(p.group(), g),
        }
    }

    fn basic_bracket(
        &self,
        g1: &GroupElement,
        l1: usize,
        g2: &GroupElement,
        l2: usize,
    ) -> LieElement {
        match self {
            Presentation::Finite(p) => {
                assert!(p.character.group.is_zero(g1) && p.character.group.is_zero(g2));
                p.bracket_basis(l1, l2)
            }
            Presentation::FreeOrbit(p) => {
                // [T_a u, T_b v] = T_b [T_{a-b} u, v]
                let d = p.group().sub(g1, g2);
                p.bracket_at(l1, l2, &d).translate(p.group(), g2)
            }
        }
    }

    pub fn bracket(&self, x: &LieElement, y: &LieElement) -> LieElement {
        let mut out = LieElement::zero();
        for ((g1, l1), c1) in &x.terms {
            for ((g2, l2), c2) in &y.terms {
                let b = self.basic_bracket(g1, *l1, g2, *l2);
                out = out.add(&b.scale(&c1.mul(c2)));
            }
        }
        out
    }

    fn basic_form(&self, g1: &GroupElement, l1: usize, g2: &GroupElement, l2: usize) -> Scalar {
        match self {
            Presentation::Finite(p) => {
                assert!(p.character.group.is_zero(g1) && p.character.group.is_zero(g2));
                p.form_basis(l1, l2)
            }
            Presentation::FreeOrbit(p) => {
                let d = p.group().sub(g1, g2);
                p.form_at(l1, l2, &d)
            }
        }
    }

    pub fn form(&self, x: &LieElement, y: &LieElement) -> Scalar {
        let mut out = Scalar::zero(self.k());
        for ((g1, l1), c1) in &x.terms {
            for ((g2, l2), c2) in &y.terms {
                let f = self.basic_form(g1, *l1, g2, *l2);
                if !f.is_zero() {
                    out = out.add(&f.mul(&c1.mul(c2)));
                }
            }
        }
        out
    }

    /// Group-averaged bracket: sum over g of [g x, y]. Requires the sum to be
    /// finite (finite group, or free-orbit finite support).
    pub fn gamma_bracket(&self, x: &LieElement, y: &LieElement) -> LieElement {
        match self {
            Presentation::Finite(p) => {
                assert!(
                    p.character.group.is_finite(),
                    "group average over an infinite group"
                );
                let mut out = LieElement::zero();
                for g in p.character.group.elements() {
                    out = out.add(&self.bracket(&self.act(&g, x), y));
                }
                out
            }
            Presentation::FreeOrbit(p) => {
                let mut out = LieElement::zero();
                for ((_g1, l1), c1) in &x.terms {
                    for ((g2, l2), c2) in &y.terms {
                        // sum_g [T_g u_{l1}, T_{g2} u_{l2}] is independent of
                        // the translate on the first slot.
                        let mut s = LieElement::zero();
                        for h in p.bracket_support(*l1, *l2) {
                            s = s.add(&p.bracket_at(*l1, *l2, &h));
                        }
                        out = out.add(&s.translate(p.group(), g2).scale(&c1.mul(c2)));
                    }
                }
                out
            }
        }
    }

    pub fn gamma_form(&self, x: &LieElement, y: &LieElement) -> Scalar {
        match self {
            Presentation::Finite(p) => {
                assert!(
                    p.character.group.is_finite(),
                    "group average over an infinite group"
                );
                let mut out = Scalar::zero(self.k());
                for g in p.character.group.elements() {
                    out = out.add(&self.form(&self.act(&g, x), y));
                }
                out
            }
            Presentation::FreeOrbit(p) => {
                let mut out = Scalar::zero(self.k());
                for ((_g1, l1), c1) in &x.terms {
                    for ((_g2, l2), c2) in &y.terms {
                        let mut s = Scalar::zero(self.k());
                        for h in p.form_support(*l1, *l2) {
                            s = s.add(&p.form_at(*l1, *l2, &h));
                        }
                        out = out.add(&s.mul(&c1.mul(c2)));
                    }
                }
                out
            }
        }
    }

    /// Basis vectors over which axiom checks quantify.
    fn check_vectors(&self) -> Vec<LieElement> {
        match self {
            Presentation::Finite(p) => {
                let one = Scalar::one(p.k());
                let zero = p.character.group.zero();
                (0..p.dim())
                    .map(|l| LieElement::basic(zero.clone(), l, one.clone()))
                    .collect()
            }
            Presentation::FreeOrbit(p) => {
                let one = Scalar::one(p.k());
                let mut out = vec![];
                for l in &p.check_gens {
                    for g in &p.check_translates {
                        out.push(LieElement::basic(g.clone(), *l, one.clone()));
                    }
                }
                out
            }
        }
    }

    pub fn check_axioms(&self) -> Report {
        let mut rep = Report::new();
        let vs = self.check_vectors();
        let n = vs.len();

        let mut ok = true;
        let mut witness = String::new();
        for i in 0..n {
            for j in i..n {
                let s = self.bracket(&vs[i], &vs[j]).add(&self.bracket(&vs[j], &vs[i]));
                if !s.is_zero() {
                    ok = false;
                    witness = format!("pair ({}, {})", i, j);
                }
            }
        }
        rep.check("lie.antisymmetry", ok, witness);

        let mut ok = true;
        let mut witness = String::new();
        'jac: for i in 0..n {
            for j in i + 1..n {
                for l in j + 1..n {
                    let s = self
                        .bracket(&self.bracket(&vs[i], &vs[j]), &vs[l])
                        .add(&self.bracket(&self.bracket(&vs[j], &vs[l]), &vs[i]))
                        .add(&self.bracket(&self.bracket(&vs[l], &vs[i]), &vs[j]));
                    if !s.is_zero() {
                        ok = false;
                        witness = format!("triple ({}, {}, {})", i, j, l);
                        break 'jac;
                    }
                }
            }
        }
        rep.check("lie.jacobi", ok, witness);

        let mut ok = true;
        let mut witness = String::new();
        for i in 0..n {
            for j in i..n {
                if self.form(&vs[i], &vs[j]) != self.form(&vs[j], &vs[i]) {
                    ok = false;
                    witness = format!("pair ({}, {})", i, j);
                }
            }
        }
        rep.check("form.symmetric", ok, witness);

        let mut ok = true;
        let mut witness = String::new();
        'inv: for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    // <[x,y],z> + <y,[x,z]> = 0
                    let s = self
                        .form(&self.bracket(&vs[i], &vs[j]), &vs[l])
                        .add(&self.form(&vs[j], &self.bracket(&vs[i], &vs[l])));
                    if !s.is_zero() {
                        ok = false;
                        witness = format!("triple ({}, {}, {})", i, j, l);
                        break 'inv;
                    }
                }
            }
        }
        rep.check("form.invariant", ok, witness);

        match self {
            Presentation::Finite(p) => {
                let gens = p.character.group.generators();
                let mut ok = true;
                let mut witness = String::new();
                'aut: for (gi, g) in gens.iter().enumerate() {
                    for i in 0..n {
                        for j in 0..n {
                            let lhs = self.act(g, &self.bracket(&vs[i], &vs[j]));
                            let rhs = self.bracket(&self.act(g, &vs[i]), &self.act(g, &vs[j]));
                            if lhs != rhs {
                                ok = false;
                                witness = format!("generator {} pair ({}, {})", gi, i, j);
                                break 'aut;
                            }
                            if self.form(&self.act(g, &vs[i]), &self.act(g, &vs[j]))
                                != self.form(&vs[i], &vs[j])
                            {
                                ok = false;
                                witness = format!("generator {} form pair ({}, {})", gi, i, j);
                                break 'aut;
                            }
                        }
                    }
                }
                rep.check("action.automorphism", ok, witness);

                let mut ok = true;
                let mut witness = String::new();
                for (i, d) in p.character.group.torsion.iter().enumerate() {
                    let gi = p.character.group.free_rank + i;
                    let mut m = mat_identity(p.dim(), p.k());
                    for _ in 0..*d {
                        m = mat_mul(&m, &p.action[gi]);
                    }
                    if m != mat_identity(p.dim(), p.k()) {
                        ok = false;
                        witness = format!("torsion generator {} order {}", gi, d);
                    }
                }
                rep.check("action.order", ok, witness);
            }
            Presentation::FreeOrbit(_) => {
                // Equivariance of the action is structural in this shape: the
                // bracket of translates is defined through translation.
                rep.pass("action.automorphism");
                rep.pass("action.order");
            }
        }

        // Averaged bracket kills the augmentation ideal: sum_g [g(hx - x), y] = 0.
        if self.group().is_finite() || matches!(self, Presentation::FreeOrbit(_)) {
            let mut ok = true;
            let mut witness = String::new();
            'ideal: for g in self.group().generators() {
                for x in &vs {
                    for y in &vs {
                        let d = self.act(&g, x).sub(x);
                        if !self.gamma_bracket(&d, y).is_zero() {
                            ok = false;
                            witness = "shifted element not killed".to_string();
                            break 'ideal;
                        }
                        if !self.gamma_form(&d, y).is_zero() {
                            ok = false;
                            witness = "shifted element not killed by form".to_string();
                            break 'ideal;
                        }
                    }
                }
            }
            rep.check("average.kills_shifts", ok, witness);
        } else {
            rep.skip("average.kills_shifts", "infinite group with matrix action");
        }

        rep
    }

    /// Quotient by the span of g x - x: the coinvariant algebra, presented
    /// finitely over the trivial group, with the averaged bracket and form.
    pub fn coinvariants(&self) -> Coinvariants {
        match self {
            Presentation::Finite(p) => {
                assert!(p.character.group.is_finite());
                let k = p.k();
                let nb = p.dim();
                let mut ech = Echelon::new(nb, k);
                for g in p.character.group.elements() {
                    let m = p.act_matrix(&g);
                    for j in 0..nb {
                        let mut v: Vec<Scalar> = (0..nb).map(|i| m[i][j].clone()).collect();
                        v[j] = v[j].sub(&Scalar::one(k));
                        ech.insert(&v);
                    }
                }
                let reps = ech.non_pivots();
                let labels: Vec<String> =
                    reps.iter().map(|i| p.labels[*i].clone()).collect();
                let trivial = Character::trivial(
                    AbelianGroup::trivial(),
                    p.character.conductor,
                    k,
                );
                let mut bracket = BTreeMap::new();
                let mut form = BTreeMap::new();
                let one = Scalar::one(k);
                let zero_g = p.character.group.zero();
                for (a, &ia) in reps.iter().enumerate() {
                    for (b, &ib) in reps.iter().enumerate() {
                        let xa = LieElement::basic(zero_g.clone(), ia, one.clone());
                        let xb = LieElement::basic(zero_g.clone(), ib, one.clone());
                        let gb = self.gamma_bracket(&xa, &xb);
                        let red = ech
                            .reduce(&p.coords(&gb))
                            .expect("coinvariant reduction must be exact");
                        let entry: Vec<(usize, Scalar)> = reps
                            .iter()
                            .enumerate()
                            .filter(|(_, &i)| !red[i].is_zero())
                            .map(|(ri, &i)| (ri, red[i].clone()))
                            .collect();
                        if !entry.is_empty() {
                            bracket.insert((a, b), entry);
                        }
                        let f = self.gamma_form(&xa, &xb);
                        if !f.is_zero() {
                            form.insert((a, b), f);
                        }
                    }
                }
                let algebra = FinitePresentation::new(labels, trivial, bracket, form, vec![]);
                Coinvariants { algebra, reps, ech: Some(ech) }
            }
            Presentation::FreeOrbit(p) => {
                // Classes of T_g u depend only on the label; the averaged
                // bracket projects by forgetting group components.
                let k = p.k();
                let nb = p.labels.len();
                let trivial =
                    Character::trivial(AbelianGroup::trivial(), p.character.conductor, k);
                let mut bracket = BTreeMap::new();
                let mut form = BTreeMap::new();
                let zero_g = p.group().zero();
                let one = Scalar::one(k);
                for a in 0..nb {
                    for b in 0..nb {
                        let xa = LieElement::basic(zero_g.clone(), a, one.clone());
                        let xb = LieElement::basic(zero_g.clone(), b, one.clone());
                        let gb = self.gamma_bracket(&xa, &xb);
                        let mut flat: BTreeMap<usize, Scalar> = BTreeMap::new();
                        for ((_g, l), c) in &gb.terms {
                            let e = flat.entry(*l).or_insert_with(|| Scalar::zero(k));
                            *e = e.add(c);
                        }
                        let entry: Vec<(usize, Scalar)> = flat
                            .into_iter()
                            .filter(|(_, c)| !c.is_zero())
                            .collect();
                        if !entry.is_empty() {
                            bracket.insert((a, b), entry);
                        }
                        let f = self.gamma_form(&xa, &xb);
                        if !f.is_zero() {
                            form.insert((a, b), f);
                        }
                    }
                }
                let algebra =
                    FinitePresentation::new(p.labels.clone(), trivial, bracket, form, vec![]);
                Coinvariants { algebra, reps: (0..nb).collect(), ech: None }
            }
        }
    }

    /// Check that averaging x -> sum_g g x identifies the coinvariant algebra
    /// with the fixed-point subalgebra: equal dimensions, independent images,
    /// and the averaged bracket carried to the plain bracket of averages.
    pub fn psi_fixed_point_check(&self) -> Report {
        let mut rep = Report::new();
        let p = match self {
            Presentation::Finite(p) => p,
            Presentation::FreeOrbit(_) => {
                rep.skip("psi.iso", "free-orbit shape has no finite average");
                return rep;
            }
        };
        assert!(p.character.group.is_finite());
        let k = p.k();
        let nb = p.dim();

        // Fixed subspace: common nullspace of (M_gen - 1).
        let mut rows = vec![];
        for g in p.character.group.generators() {
            let m = p.act_matrix(&g);
            for i in 0..nb {
                let mut r = m[i].clone();
                r[i] = r[i].sub(&Scalar::one(k));
                rows.push(r);
            }
        }
        let fixed = crate::linalg::nullspace(&rows, nb, k).expect("fixed space over the rationals");

        let co = self.coinvariants();
        rep.check(
            "psi.dim_match",
            fixed.len() == co.reps.len(),
            format!("fixed {} vs coinvariant {}", fixed.len(), co.reps.len()),
        );

        // psi of each representative, checked fixed and jointly independent.
        let one = Scalar::one(k);
        let zero_g = p.character.group.zero();
        let psi: Vec<LieElement> = co
            .reps
            .iter()
            .map(|&i| {
                let x = LieElement::basic(zero_g.clone(), i, one.clone());
                let mut s = LieElement::zero();
                for g in p.character.group.elements() {
                    s = s.add(&self.act(&g, &x));
                }
                s
            })
            .collect();
        let mut ok = true;
        for im in &psi {
            for g in p.character.group.generators() {
                if self.act(&g, im) != *im {
                    ok = false;
                }
            }
        }
        rep.check("psi.lands_in_fixed", ok, "image not fixed");

        let mut ech = Echelon::new(nb, k);
        let mut independent = true;
        for im in &psi {
            if !ech.insert(&p.coords(im)) {
                independent = false;
            }
        }
        rep.check("psi.injective", independent, "dependent images");

        // psi([x, y]_avg class) = [psi x, psi y].
        let mut ok = true;
        let mut witness = String::new();
        'br: for (a, &ia) in co.reps.iter().enumerate() {
            for (b, &ib) in co.reps.iter().enumerate() {
                let xa = LieElement::basic(zero_g.clone(), ia, one.clone());
                let xb = LieElement::basic(zero_g.clone(), ib, one.clone());
                let gb = self.gamma_bracket(&xa, &xb);
                let red = co
                    .ech
                    .as_ref()
                    .unwrap()
                    .reduce(&p.coords(&gb))
                    .expect("reduction must be exact");
                let mut lhs = LieElement::zero();
                for (ri, &i) in co.reps.iter().enumerate() {
                    lhs = lhs.add(&psi[ri].scale(&red[i]));
                }
                let rhs = self.bracket(&psi[a], &psi[b]);
                if lhs != rhs {
                    ok = false;
                    witness = format!("pair ({}, {})", a, b);
                    break 'br;
                }
            }
        }
        rep.check("psi.bracket", ok, witness);
        rep
    }

    /// Quotient by a subgroup h of the symmetry group: identify h x with x and
    /// average brackets over h. The result carries the residual group action
    /// and the induced character. Errors when h is not inside the character
    /// kernel, because then the character does not descend.
    pub fn fold_by_subgroup(&self, h: &Subgroup) -> Result<Fold, String> {
        let chr = self.character();
        for g in &h.gens {
            if !chr.eval(g).is_one() {
                return Err("subgroup is not contained in the character kernel".to_string());
            }
        }
        let q = Quotient::new(&chr.group, h);
        match self {
            Presentation::Finite(p) => {
                let k = p.k();
                let nb = p.dim();
                let hs = subgroup_elements(&p.character.group, h)?;
                let mut ech = Echelon::new(nb, k);
                for g in &hs {
                    let m = p.act_matrix(g);
                    for j in 0..nb {
                        let mut v: Vec<Scalar> = (0..nb).map(|i| m[i][j].clone()).collect();
                        v[j] = v[j].sub(&Scalar::one(k));
                        ech.insert(&v);
                    }
                }
                let reps = ech.non_pivots();
                let labels: Vec<String> =
                    reps.iter().map(|i| p.labels[*i].clone()).collect();
                let project = |v: &[Scalar]| -> Vec<Scalar> {
                    let red = ech.reduce(v).expect("fold reduction must be exact");
                    reps.iter().map(|&i| red[i].clone()).collect()
                };
                // Averaged bracket and form over h.
                let mut bracket = BTreeMap::new();
                let mut form = BTreeMap::new();
                let one = Scalar::one(k);
                let zero_g = p.character.group.zero();
                for (a, &ia) in reps.iter().enumerate() {
                    for (b, &ib) in reps.iter().enumerate() {
                        let xb = LieElement::basic(zero_g.clone(), ib, one.clone());
                        let mut s = LieElement::zero();
                        for g in &hs {
                            let xa = LieElement::basic(zero_g.clone(), ia, one.clone());
                            s = s.add(&self.bracket(&self.act(g, &xa), &xb));
                        }
                        let red = project(&p.coords(&s));
                        let entry: Vec<(usize, Scalar)> = red
                            .iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .map(|(ri, c)| (ri, c.clone()))
                            .collect();
                        if !entry.is_empty() {
                            bracket.insert((a, b), entry);
                        }
                        let mut f = Scalar::zero(k);
                        for g in &hs {
                            let xa = LieElement::basic(zero_g.clone(), ia, one.clone());
                            f = f.add(&self.form(&self.act(g, &xa), &xb));
                        }
                        if !f.is_zero() {
                            form.insert((a, b), f);
                        }
                    }
                }
                // Residual action of each quotient generator.
                let mut action = vec![];
                for qg in q.quotient.generators() {
                    let m = p.act_matrix(&q.section(&qg));
                    let cols: Vec<Vec<Scalar>> = reps
                        .iter()
                        .map(|&j| {
                            let col: Vec<Scalar> = (0..nb).map(|i| m[i][j].clone()).collect();
                            project(&col)
                        })
                        .collect();
                    let nr = reps.len();
                    action.push(
                        (0..nr)
                            .map(|i| (0..nr).map(|j| cols[j][i].clone()).collect())
                            .collect(),
                    );
                }
                let images = q
                    .quotient
                    .generators()
                    .iter()
                    .map(|qg| chr.eval(&q.section(qg)))
                    .collect();
                let induced =
                    Character::new(q.quotient.clone(), chr.conductor, k, images)?;
                // Matrix carrying old coordinates to folded coordinates.
                let proj: Matrix = {
                    let cols: Vec<Vec<Scalar>> = (0..nb)
                        .map(|j| {
                            let mut e = vec![Scalar::zero(k); nb];
                            e[j] = Scalar::one(k);
                            project(&e)
                        })
                        .collect();
                    (0..reps.len())
                        .map(|i| (0..nb).map(|j| cols[j][i].clone()).collect())
                        .collect()
                };
                Ok(Fold {
                    folded: Presentation::Finite(FinitePresentation::new(
                        labels, induced, bracket, form, action,
                    )),
                    quotient: q,
                    projection: Some(proj),
                })
            }
            Presentation::FreeOrbit(p) => {
                // Project all group data; fibers over the same class add up.
                let k = p.k();
                let mut bracket = BTreeMap::new();
                for (&(i, j), v) in &p.bracket {
                    let mut acc: BTreeMap<GroupElement, LieElement> = BTreeMap::new();
                    for (g, val) in v {
                        let pg = q.project(g);
                        let pv = LieElement {
                            terms: val
                                .terms
                                .iter()
                                .fold(BTreeMap::new(), |mut m, ((gg, l), c)| {
                                    let key = (q.project(gg), *l);
                                    let e = m.entry(key).or_insert_with(|| Scalar::zero(k));
                                    *e = e.add(c);
                                    m
                                }),
                        };
                        let e = acc.entry(pg).or_insert_with(LieElement::zero);
                        *e = e.add(&pv);
                    }
                    let entry: Vec<(GroupElement, LieElement)> = acc
                        .into_iter()
                        .filter(|(_, v)| !v.is_zero())
                        .collect();
                    bracket.insert((i, j), entry);
                }
                let mut form = BTreeMap::new();
                for (&(i, j), v) in &p.form {
                    let mut acc: BTreeMap<GroupElement, Scalar> = BTreeMap::new();
                    for (g, c) in v {
                        let e = acc
                            .entry(q.project(g))
                            .or_insert_with(|| Scalar::zero(k));
                        *e = e.add(c);
                    }
                    let entry: Vec<(GroupElement, Scalar)> =
                        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                    form.insert((i, j), entry);
                }
                let images = q
                    .quotient
                    .generators()
                    .iter()
                    .map(|qg| chr.eval(&q.section(qg)))
                    .collect();
                let induced =
                    Character::new(q.quotient.clone(), chr.conductor, k, images)?;
                let translates: Vec<GroupElement> = {
                    let mut t: Vec<GroupElement> = p
                        .check_translates
                        .iter()
                        .map(|g| q.project(g))
                        .collect();
                    t.sort();
                    t.dedup();
                    t
                };
                Ok(Fold {
                    folded: Presentation::FreeOrbit(FreeOrbitPresentation {
                        labels: p.labels.clone(),
                        character: induced,
                        bracket,
                        form,
                        check_gens: p.check_gens.clone(),
                        check_translates: translates,
                    }),
                    quotient: q,
                    projection: None,
                })
            }
        }
    }
}

pub struct Fold {
    pub folded: Presentation,
    pub quotient: Quotient,
    /// Finite case only: matrix from parent coordinates to folded coordinates.
    pub projection: Option<Matrix>,
}

pub struct Coinvariants {
    pub algebra: FinitePresentation,
    /// Basis indices of the parent presentation representing the classes.
    pub reps: Vec<usize>,
    ech: Option<Echelon>,
}

/// All elements of the subgroup generated by the given generators. Errors if
/// the closure exceeds a size cap (infinite subgroup).
fn subgroup_elements(
    group: &AbelianGroup,
    h: &Subgroup,
) -> Result<Vec<GroupElement>, String> {
    let mut seen: BTreeSet<GroupElement> = BTreeSet::new();
    let mut frontier = vec![group.zero()];
    seen.insert(group.zero());
    while let Some(g) = frontier.pop() {
        for gen in &h.gens {
            for next in [group.add(&g, gen), group.sub(&g, gen)] {
                if seen.insert(next.clone()) {
                    frontier.push(next);
                }
            }
        }
        if seen.len() > 100_000 {
            return Err("subgroup closure too large".to_string());
        }
    }
    Ok(seen.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{Cyclotomic, Scalar, UnitMonomial};

    fn s(n: i64) -> Scalar {
        Scalar::from_int(0, n)
    }

    /// sl2 with the Chevalley involution e -> -f, h -> -h, f -> -e and the
    /// order-two character sending the generator to -1.
    fn sl2() -> Presentation {
        let group = AbelianGroup::new(0, vec![2]);
        let minus_one = UnitMonomial::from_cyclo(0, Cyclotomic::root_of_unity(2, 1));
        let chr = Character::new(group, 2, 0, vec![minus_one]).unwrap();
        let labels = vec!["e".to_string(), "h".to_string(), "f".to_string()];
        let mut bracket = BTreeMap::new();
        bracket.insert((0, 2), vec![(1, s(1))]); // [e,f] = h
        bracket.insert((1, 0), vec![(0, s(2))]); // [h,e] = 2e
        bracket.insert((1, 2), vec![(2, s(-2))]); // [h,f] = -2f
        let mut form = BTreeMap::new();
        form.insert((0, 2), s(1));
        form.insert((1, 1), s(2));
        let action = vec![vec![
            vec![s(0), s(0), s(-1)],
            vec![s(0), s(-1), s(0)],
            vec![s(-1), s(0), s(0)],
        ]];
        Presentation::Finite(FinitePresentation::new(labels, chr, bracket, form, action))
    }

    fn sl2_corrupted() -> Presentation {
        if let Presentation::Finite(mut p) = sl2() {
            p.bracket.insert((0, 2), vec![(1, s(1)), (0, s(1))]); // [e,f] = h + e
            Presentation::Finite(p)
        } else {
            unreachable!()
        }
    }

    #[test]
    fn sl2_axioms_pass() {
        let rep = sl2().check_axioms();
        assert!(rep.passed(), "{}", rep.render());
    }

    #[test]
    fn corrupted_sl2_fails() {
        let rep = sl2_corrupted().check_axioms();
        assert!(!rep.passed());
    }

    #[test]
    fn sl2_fixed_points_match_coinvariants() {
        let rep = sl2().psi_fixed_point_check();
        assert!(rep.passed(), "{}", rep.render());
        let co = sl2().coinvariants();
        assert_eq!(co.algebra.dim(), 1);
    }

    #[test]
    fn sl2_fold_by_whole_group() {
        // Use the trivial character so the whole group sits in the kernel.
        let p = if let Presentation::Finite(mut p) = sl2() {
            p.character = Character::trivial(p.character.group.clone(), 2, 0);
            Presentation::Finite(p)
        } else {
            unreachable!()
        };
        let h = Subgroup { gens: vec![p.group().generator(0)] };
        let folded = p.fold_by_subgroup(&h).unwrap().folded;
        if let Presentation::Finite(f) = &folded {
            assert_eq!(f.dim(), 1);
            assert!(f.character.group.is_finite());
            assert_eq!(f.character.group.order(), Some(1));
            // The surviving class pairs to -1 with itself.
            assert_eq!(f.form_basis(0, 0), s(-1));
        } else {
            panic!("expected finite fold");
        }
    }

    #[test]
    fn fold_refuses_subgroup_outside_kernel() {
        let p = sl2();
        let h = Subgroup { gens: vec![p.group().generator(0)] };
        assert!(p.fold_by_subgroup(&h).is_err());
    }

    /// Infinite matrix algebra over the integers presented on one orbit per
    /// diagonal: u_d stands for the elementary matrix E_{0,d}, and the shift
    /// T_g moves E_{a,b} to E_{a+g,b+g}.
    fn gl_band(band: i64, check: i64) -> Presentation {
        let group = AbelianGroup::new(1, vec![]);
        let chr = Character::trivial(group.clone(), 1, 0);
        let idx = |d: i64| -> usize { (d + band) as usize };
        let labels: Vec<String> = (-band..=band).map(|d| format!("u{}", d)).collect();
        let mut bracket = BTreeMap::new();
        let mut form = BTreeMap::new();
        let ge = |g: i64| group.reduce(vec![g]);
        for a in -band..=band {
            for b in -band..=band {
                if (a + b).abs() > band {
                    continue;
                }
                // [E_{g,g+a}, E_{0,b}] = delta_{g+a,0} E_{g,b} - delta_{b,g} E_{0,g+a}
                let mut entries: BTreeMap<i64, LieElement> = BTreeMap::new();
                entries
                    .entry(-a)
                    .or_insert_with(LieElement::zero)
                    .add_term(ge(-a), idx(b + a), s(1));
                entries
                    .entry(b)
                    .or_insert_with(LieElement::zero)
                    .add_term(ge(0), idx(a + b), s(-1));
                let v: Vec<(GroupElement, LieElement)> = entries
                    .into_iter()
                    .filter(|(_, e)| !e.is_zero())
                    .map(|(g, e)| (ge(g), e))
                    .collect();
                bracket.insert((idx(a), idx(b)), v);
                if b == -a {
                    form.insert((idx(a), idx(b)), vec![(ge(b), s(1))]);
                } else {
                    form.insert((idx(a), idx(b)), vec![]);
                }
            }
        }
        let check_gens: Vec<usize> = (-check..=check).map(idx).collect();
        let check_translates: Vec<GroupElement> = (-check..=check).map(ge).collect();
        Presentation::FreeOrbit(FreeOrbitPresentation {
            labels,
            character: chr,
            bracket,
            form,
            check_gens,
            check_translates,
        })
    }

    #[test]
    fn gl_band_axioms_pass() {
        let rep = gl_band(4, 1).check_axioms();
        assert!(rep.passed(), "{}", rep.render());
    }

    #[test]
    fn gl_band_average_is_translation_invariant() {
        let p = gl_band(4, 1);
        let g = p.group().reduce(vec![3]);
        let one = s(1);
        let x = LieElement::basic(p.group().zero(), 5, one.clone()); // u_1
        let xs = LieElement::basic(g, 5, one.clone());
        let y = LieElement::basic(p.group().zero(), 3, one); // u_{-1}
        assert_eq!(p.gamma_bracket(&x, &y), p.gamma_bracket(&xs, &y));
        assert_eq!(p.gamma_form(&x, &y), p.gamma_form(&xs, &y));
    }

    #[test]
    fn gl_band_fold_to_cyclic() {
        let p = gl_band(4, 1);
        let h = Subgroup { gens: vec![p.group().reduce(vec![2])] };
        let folded = p.fold_by_subgroup(&h).unwrap().folded;
        assert_eq!(folded.group().order(), Some(2));
        let rep = folded.check_axioms();
        assert!(rep.passed(), "{}", rep.render());
    }
}
