//! Bundled example presentations. These are the algebras the verification
//! suites run against: small semisimple algebras with finite symmetry, rank-1
//! Heisenberg data, the infinite matrix algebra over Z^r with its shift
//! symmetry, a shifted block copy of sl_4, and cyclic permutation data.

use std::collections::BTreeMap;

use crate::group::{AbelianGroup, Character, GroupElement};
use crate::lie::{FinitePresentation, FreeOrbitPresentation, LieElement, Presentation};
use crate::scalars::{Cyclotomic, Scalar, UnitMonomial};

fn s(n: i64) -> Scalar {
    Scalar::from_int(0, n)
}

/// sl2 with the Chevalley involution e -> -f, h -> -h, f -> -e; the symmetry
/// group is order two and its character sends the generator to -1.
pub fn sl2_chevalley() -> Presentation {
    let group = AbelianGroup::new(0, vec![2]);
    let minus_one = UnitMonomial::from_cyclo(0, Cyclotomic::root_of_unity(2, 1));
    let chr = Character::new(group, 2, 0, vec![minus_one]).unwrap();
    let labels = vec!["e".to_string(), "h".to_string(), "f".to_string()];
    let mut bracket = BTreeMap::new();
    bracket.insert((0, 2), vec![(1, s(1))]);
    bracket.insert((1, 0), vec![(0, s(2))]);
    bracket.insert((1, 2), vec![(2, s(-2))]);
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

/// sl2 with a wrong structure constant: [e,f] = h + e. Jacobi and invariance
/// break; used as a negative control.
pub fn sl2_corrupted() -> Presentation {
    match sl2_chevalley() {
        Presentation::Finite(mut p) => {
            p.bracket.insert((0, 2), vec![(1, s(1)), (0, s(1))]);
            Presentation::Finite(p)
        }
        _ => unreachable!(),
    }
}

/// Traceless n x n matrices with basis E_ij (i != j) and h_i = E_ii - E_(i+1)(i+1),
/// conjugated by diag(zeta_N^w) for given integer weights, with a chosen
/// character value on the cyclic generator.
fn sl_n_diag(
    n: usize,
    order: u64,
    weights: &[i64],
    phi_exp: i64,
    conductor: u64,
) -> Presentation {
    assert_eq!(weights.len(), n);
    let group = if order == 1 {
        AbelianGroup::trivial()
    } else {
        AbelianGroup::new(0, vec![order])
    };
    let images = if order == 1 {
        vec![]
    } else {
        vec![UnitMonomial::from_cyclo(0, Cyclotomic::root_of_unity(conductor, phi_exp))]
    };
    let chr = Character::new(group, conductor, 0, images).unwrap();

    // Basis bookkeeping: off-diagonal units first, then the h_i.
    let mut labels = vec![];
    let mut offdiag = vec![];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                labels.push(format!("E{}{}", i + 1, j + 1));
                offdiag.push((i, j));
            }
        }
    }
    for i in 0..n - 1 {
        labels.push(format!("h{}", i + 1));
    }
    let nb = labels.len();
    let hbase = offdiag.len();

    // Each basis vector as an n x n rational matrix.
    let to_matrix = |l: usize| -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; n]; n];
        if l < hbase {
            let (i, j) = offdiag[l];
            m[i][j] = 1;
        } else {
            let i = l - hbase;
            m[i][i] = 1;
            m[i + 1][i + 1] = -1;
        }
        m
    };
    // Traceless matrix back to basis coordinates: off-diagonal entries direct,
    // diagonal read off through partial sums.
    let from_matrix = |m: &Vec<Vec<i64>>| -> Vec<(usize, i64)> {
        let mut out = vec![];
        for (l, (i, j)) in offdiag.iter().enumerate() {
            if m[*i][*j] != 0 {
                out.push((l, m[*i][*j]));
            }
        }
        let mut partial = 0i64;
        for i in 0..n - 1 {
            partial += m[i][i];
            if partial != 0 {
                out.push((hbase + i, partial));
            }
        }
        out
    };

    let mut bracket = BTreeMap::new();
    let mut form = BTreeMap::new();
    for a in 0..nb {
        for b in 0..nb {
            let ma = to_matrix(a);
            let mb = to_matrix(b);
            let mut comm = vec![vec![0i64; n]; n];
            let mut tr = 0i64;
            for i in 0..n {
                for j in 0..n {
                    for t in 0..n {
                        comm[i][j] += ma[i][t] * mb[t][j] - mb[i][t] * ma[t][j];
                    }
                }
            }
            for i in 0..n {
                for t in 0..n {
                    tr += ma[i][t] * mb[t][i];
                }
            }
            let entry: Vec<(usize, Scalar)> = from_matrix(&comm)
                .into_iter()
                .map(|(l, c)| (l, s(c)))
                .collect();
            if !entry.is_empty() {
                bracket.insert((a, b), entry);
            }
            if tr != 0 {
                form.insert((a, b), s(tr));
            }
        }
    }
    // Conjugation by diag(zeta^w): E_ij scales by zeta^(w_i - w_j), h fixed.
    let mut action_m = vec![vec![s(0); nb]; nb];
    for (l, (i, j)) in offdiag.iter().enumerate() {
        let e = (weights[*i] - weights[*j]).rem_euclid(order as i64);
        action_m[l][l] = Scalar::from_cyclo(
            0,
            Cyclotomic::root_of_unity(conductor, e * (conductor as i64 / order as i64)),
        );
    }
    for l in hbase..nb {
        action_m[l][l] = s(1);
    }
    let actions = if order == 1 { vec![] } else { vec![action_m] };
    Presentation::Finite(FinitePresentation::new(labels, chr, bracket, form, actions))
}

/// sl2 with the trivial symmetry group: labels E12, E21, h1 and the trace
/// form.
pub fn sl_2_plain() -> Presentation {
    sl_n_diag(2, 1, &[0, 0], 0, 1)
}

/// sl3 twisted by conjugation with diag(1, zeta_3, zeta_3^2); the character
/// sends the order-three generator to zeta_3.
pub fn sl3_diagonal() -> Presentation {
    sl_n_diag(3, 3, &[0, 1, 2], 1, 3)
}

/// One-dimensional abelian algebra with <a,a> = 1, order-two sign symmetry,
/// character value -1. Its twisted loop algebra keeps only odd modes.
pub fn heisenberg1() -> Presentation {
    let group = AbelianGroup::new(0, vec![2]);
    let minus_one = UnitMonomial::from_cyclo(0, Cyclotomic::root_of_unity(2, 1));
    let chr = Character::new(group, 2, 0, vec![minus_one]).unwrap();
    let mut form = BTreeMap::new();
    form.insert((0, 0), s(1));
    let action = vec![vec![vec![s(-1)]]];
    Presentation::Finite(FinitePresentation::new(
        vec!["a".to_string()],
        chr,
        BTreeMap::new(),
        form,
        action,
    ))
}

/// Rank-1 Heisenberg data over scalars with `extra` unused formal parameters
/// (so e.g. a formal module level can live in the same coefficient ring).
pub fn heisenberg1_params(extra: usize) -> Presentation {
    let group = AbelianGroup::new(0, vec![2]);
    let minus_one = UnitMonomial::from_cyclo(extra, Cyclotomic::root_of_unity(2, 1));
    let chr = Character::new(group, 2, extra, vec![minus_one]).unwrap();
    let mut form = BTreeMap::new();
    form.insert((0, 0), Scalar::from_int(extra, 1));
    let action = vec![vec![vec![Scalar::from_int(extra, -1)]]];
    Presentation::Finite(FinitePresentation::new(
        vec!["a".to_string()],
        chr,
        BTreeMap::new(),
        form,
        action,
    ))
}

/// Same algebra with the trivial symmetry group: the ordinary rank-1
/// Heisenberg loop data.
pub fn heisenberg_untwisted() -> Presentation {
    let group = AbelianGroup::trivial();
    let chr = Character::trivial(group, 1, 0);
    let mut form = BTreeMap::new();
    form.insert((0, 0), s(1));
    Presentation::Finite(FinitePresentation::new(
        vec!["a".to_string()],
        chr,
        BTreeMap::new(),
        form,
        vec![],
    ))
}

/// Matrix units over Z^r: one orbit generator u_d per difference vector d in
/// the band (max-norm <= band), with u_d standing for E_{0,d} and the group
/// translating both indices. Bracket data is declared for pairs whose results
/// stay in the band; checks quantify over |d| <= check.
pub fn gl_general(r: usize, band: i64, check: i64, character: Character) -> Presentation {
    assert_eq!(character.group.free_rank, r);
    assert!(character.group.torsion.is_empty());
    let group = character.group.clone();
    let k = character.k;

    let mut vecs: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..r {
        let mut next = vec![];
        for v in &vecs {
            for c in -band..=band {
                let mut w = v.clone();
                w.push(c);
                next.push(w);
            }
        }
        vecs = next;
    }
    let index: BTreeMap<Vec<i64>, usize> =
        vecs.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let labels: Vec<String> = vecs
        .iter()
        .map(|v| {
            let coords: Vec<String> = v.iter().map(|c| c.to_string()).collect();
            format!("u({})", coords.join(","))
        })
        .collect();
    let in_band = |v: &[i64]| v.iter().all(|c| c.abs() <= band);
    let ge = |v: Vec<i64>| group.reduce(v);
    let add = |a: &[i64], b: &[i64]| -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    };
    let negv = |a: &[i64]| -> Vec<i64> { a.iter().map(|x| -x).collect() };

    let one = Scalar::one(k);
    let mut bracket = BTreeMap::new();
    let mut form = BTreeMap::new();
    for a in &vecs {
        for b in &vecs {
            let sum = add(a, b);
            if !in_band(&sum) {
                continue;
            }
            let ia = index[a];
            let ib = index[b];
            // [E_{g,g+a}, E_{0,b}] = delta_{g+a,0} E_{g,b} - delta_{b,g} E_{0,a+b}
            let mut entries: BTreeMap<GroupElement, LieElement> = BTreeMap::new();
            entries
                .entry(ge(negv(a)))
                .or_insert_with(LieElement::zero)
                .add_term(ge(negv(a)), index[&sum], one.clone());
            entries
                .entry(ge(b.clone()))
                .or_insert_with(LieElement::zero)
                .add_term(group.zero(), index[&sum], one.neg());
            let v: Vec<(GroupElement, LieElement)> = entries
                .into_iter()
                .filter(|(_, e)| !e.is_zero())
                .collect();
            bracket.insert((ia, ib), v);
            // <E_{g,g+a}, E_{0,b}> = delta_{g+a,0} delta_{b,g}
            if *b == negv(a) {
                form.insert((ia, ib), vec![(ge(b.clone()), one.clone())]);
            } else {
                form.insert((ia, ib), vec![]);
            }
        }
    }
    let mut check_gens = vec![];
    for (i, v) in vecs.iter().enumerate() {
        if v.iter().all(|c| c.abs() <= check) {
            check_gens.push(i);
        }
    }
    let mut check_translates = vec![];
    for v in &vecs {
        if v.iter().all(|c| c.abs() <= check) {
            check_translates.push(ge(v.clone()));
        }
    }
    Presentation::FreeOrbit(FreeOrbitPresentation {
        labels,
        character,
        bracket,
        form,
        check_gens,
        check_translates,
    })
}

/// gl over Z with the shift character sending 1 to the formal unit q.
pub fn gl_torus(band: i64, check: i64) -> Presentation {
    let group = AbelianGroup::new(1, vec![]);
    let chr = Character::new(group, 1, 1, vec![UnitMonomial::param(1, 0)]).unwrap();
    gl_general(1, band, check, chr)
}

/// gl over Z with the shift character value q, plus `extra` unused formal
/// parameters after q.
pub fn gl_torus_params(band: i64, check: i64, extra: usize) -> Presentation {
    let group = AbelianGroup::new(1, vec![]);
    let chr = Character::new(group, 1, 1 + extra, vec![UnitMonomial::param(1 + extra, 0)])
        .unwrap();
    gl_general(1, band, check, chr)
}

/// gl over Z with the order-two character sending the shift to -1.
pub fn gl_half_turn(band: i64, check: i64) -> Presentation {
    let group = AbelianGroup::new(1, vec![]);
    let minus_one = UnitMonomial::from_cyclo(0, Cyclotomic::root_of_unity(2, 1));
    let chr = Character::new(group, 2, 0, vec![minus_one]).unwrap();
    gl_general(1, band, check, chr)
}

/// gl over Z^2 with two independent formal units q1, q2.
pub fn gl_zk(band: i64, check: i64) -> Presentation {
    let group = AbelianGroup::new(2, vec![]);
    let chr = Character::new(
        group,
        1,
        2,
        vec![UnitMonomial::param(2, 0), UnitMonomial::param(2, 1)],
    )
    .unwrap();
    gl_general(2, band, check, chr)
}

/// Block-diagonal copies of sl_4 indexed by Z, with the shift acting by
/// moving blocks and the character sending the shift to q. Different blocks
/// commute, so the bracket data is supported at the identity only.
pub fn sl4_shift() -> Presentation {
    let inner = match sl_n_diag(4, 1, &[0, 0, 0, 0], 0, 1) {
        Presentation::Finite(p) => p,
        _ => unreachable!(),
    };
    let group = AbelianGroup::new(1, vec![]);
    let chr = Character::new(group.clone(), 1, 1, vec![UnitMonomial::param(1, 0)]).unwrap();
    let nb = inner.labels.len();
    let mut bracket = BTreeMap::new();
    let mut form = BTreeMap::new();
    for i in 0..nb {
        for j in 0..nb {
            let mut entry = vec![];
            let b = inner.bracket_basis(i, j);
            if !b.is_zero() {
                let mut val = LieElement::zero();
                for ((_, l), c) in &b.terms {
                    val.add_term(group.zero(), *l, c.promote(1));
                }
                entry.push((group.zero(), val));
            }
            bracket.insert((i, j), entry);
            let f = inner.form_basis(i, j);
            if f.is_zero() {
                form.insert((i, j), vec![]);
            } else {
                form.insert((i, j), vec![(group.zero(), f.promote(1))]);
            }
        }
    }
    // Checks sample a corner of the algebra: e/f/h of the first two nodes.
    let check_gens = vec![0, 1, 3, 12, 13];
    let check_translates: Vec<GroupElement> =
        (-1..=1).map(|g| group.reduce(vec![g])).collect();
    Presentation::FreeOrbit(FreeOrbitPresentation {
        labels: inner.labels,
        character: chr,
        bracket,
        form,
        check_gens,
        check_translates,
    })
}

/// N commuting copies of the rank-1 Heisenberg line, cyclically permuted,
/// with character value zeta_N on the cycle.
pub fn gn_permutation(n: u64) -> Presentation {
    let group = AbelianGroup::new(0, vec![n]);
    let zeta = UnitMonomial::from_cyclo(0, Cyclotomic::root_of_unity(n, 1));
    let chr = Character::new(group, n, 0, vec![zeta]).unwrap();
    let labels: Vec<String> = (0..n).map(|i| format!("a{}", i)).collect();
    let nb = n as usize;
    let mut form = BTreeMap::new();
    for i in 0..nb {
        form.insert((i, i), s(1));
    }
    // Cyclic shift: a_i -> a_(i+1 mod n).
    let mut m = vec![vec![s(0); nb]; nb];
    for j in 0..nb {
        m[(j + 1) % nb][j] = s(1);
    }
    Presentation::Finite(FinitePresentation::new(
        labels,
        chr,
        BTreeMap::new(),
        form,
        vec![m],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_finite_examples_satisfy_axioms() {
        for p in [sl2_chevalley(), sl3_diagonal(), heisenberg1(), heisenberg_untwisted(), gn_permutation(2), gn_permutation(3)] {
            let rep = p.check_axioms();
            assert!(rep.passed(), "{}", rep.render());
        }
    }

    #[test]
    fn corrupted_example_fails() {
        assert!(!sl2_corrupted().check_axioms().passed());
    }

    #[test]
    fn banded_examples_satisfy_axioms() {
        for p in [gl_torus(4, 1), gl_half_turn(4, 1)] {
            let rep = p.check_axioms();
            assert!(rep.passed(), "{}", rep.render());
        }
    }

    #[test]
    fn gl_zk_axioms() {
        let rep = gl_zk(3, 1).check_axioms();
        assert!(rep.passed(), "{}", rep.render());
    }

    #[test]
    fn sl4_shift_axioms() {
        let rep = sl4_shift().check_axioms();
        assert!(rep.passed(), "{}", rep.render());
    }

    #[test]
    fn sl3_fixed_points() {
        let rep = sl3_diagonal().psi_fixed_point_check();
        assert!(rep.passed(), "{}", rep.render());
        // Fixed subalgebra of the diagonal torus action is the Cartan.
        let co = sl3_diagonal().coinvariants();
        assert_eq!(co.algebra.dim(), 2);
    }
}
