//! End-to-end acceptance checks, one test per criterion. Every comparison
//! is exact; there are no tolerances anywhere.

use std::collections::BTreeMap;
use std::rc::Rc;

use gamma_affine_core::affine::Affinization;
use gamma_affine_core::conformal::{
    affine_conformal, loop_affine_compare, orbit_loop_check, virasoro, LoopAlgebra, LoopElement,
};
use gamma_affine_core::examples;
use gamma_affine_core::fields::{
    binom, detect_gamma_locality, generate_field_space, permutation_field, quasi_jacobi_check,
    verify_commutator_formula, y_alpha_identity, y_local_crosscheck, y_product, fields_agree,
    Field,
};
use gamma_affine_core::lie::Presentation;
use gamma_affine_core::report::Status;
use gamma_affine_core::scalars::{rat, Cyclotomic, Scalar, UnitMonomial};
use gamma_affine_core::vacuum::{graded_monomial_counts, TruncatedModule};

fn s0(n: i64) -> Scalar {
    Scalar::from_int(0, n)
}

fn module_of(p: Presentation, depth: i64, level: Scalar) -> Rc<TruncatedModule> {
    Rc::new(TruncatedModule::new(Rc::new(Affinization::new(p)), depth, level))
}

#[test]
fn criterion_01_lie_axioms_and_ideal_identity() {
    for (name, p) in [
        ("sl2_chevalley", examples::sl2_chevalley()),
        ("gl_torus", examples::gl_torus(4, 1)),
        ("gl_zk", examples::gl_zk(3, 1)),
        ("sl4_shift", examples::sl4_shift()),
        ("heisenberg1", examples::heisenberg1()),
        ("gn_permutation2", examples::gn_permutation(2)),
        ("gn_permutation3", examples::gn_permutation(3)),
    ] {
        let rep = p.check_axioms();
        assert!(rep.passed(), "{}:\n{}", name, rep.render());
    }
    let rep = examples::sl2_corrupted().check_axioms();
    assert!(!rep.passed());
    let bad = rep.first_failure().unwrap();
    assert!(bad.witness.is_some());
}

#[test]
fn criterion_02_fixed_point_isomorphism() {
    for (name, p) in [
        ("sl2_chevalley", examples::sl2_chevalley()),
        ("sl3_diagonal", examples::sl3_diagonal()),
    ] {
        let rep = p.psi_fixed_point_check();
        assert!(rep.passed(), "{}:\n{}", name, rep.render());
    }
    let alg = Affinization::new(examples::sl2_chevalley());
    for m in -4i64..=4 {
        let want = if m % 2 == 0 { 1 } else { 2 };
        assert_eq!(alg.degree_dim(m), want, "degree {}", m);
    }
    let rep = alg.fixed_point_compare(4);
    assert!(rep.passed(), "{}", rep.render());
}

#[test]
fn criterion_03_twisted_affinization_is_a_lie_algebra() {
    for (name, p) in [
        ("sl2_chevalley", examples::sl2_chevalley()),
        ("sl3_diagonal", examples::sl3_diagonal()),
        ("heisenberg1", examples::heisenberg1()),
        ("heisenberg_untwisted", examples::heisenberg_untwisted()),
        ("gn_permutation3", examples::gn_permutation(3)),
        ("gl_torus", examples::gl_torus(4, 1)),
        ("gl_half_turn", examples::gl_half_turn(4, 1)),
        ("sl4_shift", examples::sl4_shift()),
        ("gl_zk", examples::gl_zk(3, 1)),
    ] {
        let rep = Affinization::new(p).jacobi_window_check(4);
        assert!(rep.passed(), "{}:\n{}", name, rep.render());
    }

    // [u(1)(m), (T_1 u(-1))(n)] = (1 - q^-(m+n)) u(0)(m+n) + m delta_{m+n,0} k
    // in gl over Z with shift character q1; labels u(d) sit at index d + 7.
    let alg = Affinization::new(examples::gl_torus(7, 1));
    let group = alg.pres.group().clone();
    let one = Scalar::one(1);
    let q = UnitMonomial::param(1, 0).to_scalar(1);
    for m in -3i64..=3 {
        for n in -3i64..=3 {
            let mut x = alg.zero();
            x.add_term(m, group.zero(), 8, one.clone());
            let mut y = alg.zero();
            y.add_term(n, group.reduce(vec![1]), 6, one.clone());
            let got = alg.gamma_bracket(&x, &y);
            let mut want = alg.zero();
            let c = one.sub(&q.pow(-(m + n)).unwrap());
            want.add_term(m + n, group.zero(), 7, c);
            if m + n == 0 {
                want.central = Scalar::from_int(1, m);
            }
            assert_eq!(got.terms, want.terms, "terms at ({}, {})", m, n);
            assert_eq!(got.central, want.central, "central at ({}, {})", m, n);
        }
    }
}

#[test]
fn criterion_04_quotient_isomorphism() {
    let alg = Affinization::new(examples::gl_half_turn(6, 1));
    let rep = alg.quotient_iso_check(3);
    assert!(rep.passed(), "{}", rep.render());
}

#[test]
fn criterion_05_vacuum_modules() {
    // Untwisted rank-1 creation operators at every negative mode: the graded
    // dimensions are the partition numbers.
    let m = module_of(examples::heisenberg_untwisted(), 6, s0(1));
    let dims = m.dims();
    assert_eq!(dims, vec![1, 1, 2, 3, 5, 7, 11]);
    assert_eq!(dims, graded_monomial_counts(&[1, 1, 1, 1, 1, 1], 6));

    let rep = m.check_module_relations(3);
    assert!(rep.passed(), "{}", rep.render());
    let tw = module_of(examples::heisenberg1(), 6, s0(1));
    let rep = tw.check_module_relations(3);
    assert!(rep.passed(), "{}", rep.render());
    // Formal level.
    let ell = UnitMonomial::param(1, 0).to_scalar(1);
    let tw = module_of(examples::heisenberg1_params(1), 6, ell);
    let rep = tw.check_module_relations(3);
    assert!(rep.passed(), "{}", rep.render());

    let gm = module_of(examples::gl_torus(7, 1), 4, Scalar::from_int(1, 1));
    let rep = gm.check_module_relations(3);
    assert!(rep.passed(), "{}", rep.render());
    let ell2 = UnitMonomial::param(2, 1).to_scalar(2);
    let gm = module_of(examples::gl_torus_params(7, 1, 1), 4, ell2);
    let rep = gm.check_module_relations(3);
    assert!(rep.passed(), "{}", rep.render());
}

#[test]
fn criterion_06_commutator_formula() {
    let m = module_of(examples::heisenberg1(), 6, s0(1));
    let rep = verify_commutator_formula(&m, 0, 0, 3);
    assert!(rep.passed(), "{}", rep.render());
    let m = module_of(examples::heisenberg_untwisted(), 6, s0(1));
    let rep = verify_commutator_formula(&m, 0, 0, 3);
    assert!(rep.passed(), "{}", rep.render());
    let m = module_of(examples::gl_torus(7, 1), 3, Scalar::from_int(1, 1));
    for (u, v) in [(8, 6), (7, 7), (8, 7)] {
        let rep = verify_commutator_formula(&m, u, v, 3);
        assert!(rep.passed(), "pair ({}, {}):\n{}", u, v, rep.render());
    }
}

#[test]
fn criterion_07_singular_expansion_calculus() {
    let m = module_of(examples::heisenberg_untwisted(), 5, s0(1));
    let a = Field::generator(m.clone(), 0);
    let cert = detect_gamma_locality(&a, &a, &[s0(1)], 4, -3, 3).unwrap();
    assert_eq!(cert.roots.len(), 2);
    assert!(cert.roots.iter().all(|r| r.sub(&s0(1)).is_zero()));

    // a(x)_1 a(x) is the level times the identity, for two distinct levels.
    for level in [1i64, 7] {
        let m = module_of(examples::heisenberg_untwisted(), 5, s0(level));
        let a = Field::generator(m.clone(), 0);
        let p1 = y_product(&a, &a, &cert.roots, 1).unwrap();
        let id = Field::identity(m.clone()).scale(&s0(level));
        assert!(fields_agree("p1", &p1, &id, -3..=3).passed());
        for n in 2..=4 {
            let pn = y_product(&a, &a, &cert.roots, n).unwrap();
            assert!(fields_agree("pn", &pn, &Field::zero(m.clone()), -3..=3).passed());
        }
    }

    let rep = y_local_crosscheck(&a, &a, &cert.roots, -1..=2, -2..=2);
    assert!(rep.passed(), "{}", rep.render());

    let rep = y_alpha_identity(&a, &a, &cert.roots, &s0(-1), -2..=2, -2..=2);
    assert!(rep.passed(), "{}", rep.render());
    let gm = module_of(examples::gl_torus(7, 1), 3, Scalar::from_int(1, 1));
    let up = Field::generator(gm.clone(), 8);
    let un = Field::generator(gm.clone(), 6);
    let q = UnitMonomial::param(1, 0).to_scalar(1);
    let cert = detect_gamma_locality(&up, &un, &[Scalar::one(1), q.clone()], 4, -3, 3).unwrap();
    assert_eq!(cert.roots.len(), 2);
    let rep = y_alpha_identity(&up, &un, &cert.roots, &q, 0..=1, -1..=1);
    assert!(rep.passed(), "{}", rep.render());
}

#[test]
fn criterion_08_quasi_jacobi_identity() {
    let m = module_of(examples::heisenberg_untwisted(), 6, s0(1));
    let a = Field::generator(m.clone(), 0);
    let mut products = BTreeMap::new();
    products.insert(1, Field::constant(m.clone(), m.level.clone()));
    let rep = quasi_jacobi_check(&a, &a, &[s0(1), s0(1)], &products, -2..=2, 2);
    assert!(rep.passed(), "{}", rep.render());

    let m = module_of(examples::heisenberg1(), 6, s0(1));
    let a = Field::generator(m.clone(), 0);
    let mut products = BTreeMap::new();
    products.insert(1, Field::constant(m.clone(), m.level.clone()));
    let roots = vec![s0(1), s0(1), s0(-1), s0(-1)];
    let rep = quasi_jacobi_check(&a, &a, &roots, &products, -2..=2, 2);
    assert!(rep.passed(), "{}", rep.render());
}

#[test]
fn criterion_09_permutation_correspondence() {
    for n_root in [2u64, 3] {
        let m = module_of(examples::heisenberg_untwisted(), 4, s0(1));
        let a = Field::generator(m.clone(), 0);
        let omega = Scalar::from_cyclo(0, Cyclotomic::root_of_unity(n_root, 1));
        let cands: Vec<Scalar> =
            (0..n_root).map(|e| omega.pow(e as i64).unwrap()).collect();
        for j in 0..n_root as i64 {
            for jp in 0..n_root as i64 {
                let fj = permutation_field(&a, n_root, j);
                let fjp = permutation_field(&a, n_root, jp);
                let cert = detect_gamma_locality(&fj, &fjp, &cands, 3, -3, 3).unwrap();
                let want = omega.pow(j - jp).unwrap();
                assert_eq!(cert.roots.len(), 2, "N={} j={} j'={}", n_root, j, jp);
                assert!(cert.roots.iter().all(|r| r.sub(&want).is_zero()));
            }
        }
        let seeds: Vec<Field> =
            (0..n_root as i64).map(|j| permutation_field(&a, n_root, j)).collect();
        let rep = generate_field_space(&seeds, 2, &cands, 4, 0..=1, -3, 3);
        assert!(rep.passed(), "N={}:\n{}", n_root, rep.render());
    }

    // The twisted affinization of N permuted commuting copies has the same
    // structure constants as the plain affinization of a single copy.
    let single = Affinization::new(examples::heisenberg_untwisted());
    for n in [2u64, 3] {
        let alg = Affinization::new(examples::gn_permutation(n));
        let group = alg.pres.group().clone();
        for m in -3i64..=3 {
            assert_eq!(alg.degree_dim(m), 1, "N={} degree {}", n, m);
            for p in -3i64..=3 {
                let mut x = alg.zero();
                x.add_term(m, group.zero(), 0, s0(1));
                let mut y = alg.zero();
                y.add_term(p, group.zero(), 0, s0(1));
                let got = alg.gamma_bracket(&x, &y);

                let sgroup = single.pres.group().clone();
                let mut sx = single.zero();
                sx.add_term(m, sgroup.zero(), 0, s0(1));
                let mut sy = single.zero();
                sy.add_term(p, sgroup.zero(), 0, s0(1));
                let want = single.gamma_bracket(&sx, &sy);

                assert!(got.terms.is_empty() && want.terms.is_empty());
                assert_eq!(got.central, want.central, "N={} at ({}, {})", n, m, p);
            }
        }
    }
}

#[test]
fn criterion_10_conformal_layer() {
    let conf = virasoro();
    let rep = conf.check_conformal_axioms(4);
    assert!(rep.passed(), "{}", rep.render());
    let la = LoopAlgebra::new(conf);
    let rep = la.jacobi_window_check(3);
    assert!(rep.passed(), "{}", rep.render());

    // [L'(m), L'(n)] = (m - n) L'(m + n) + binom(m+1, 3) (c/2) delta_{m+n,0} k
    // with L'(m) = L at loop degree m + 1 and formal central charge c = q1.
    let c_half = Scalar::monomial(1, vec![1], Cyclotomic::one()).scale_rat(&rat(1, 2));
    for m in -3i64..=3 {
        for n in -3i64..=3 {
            let got = la.bracket(&la.generator(m + 1, 0), &la.generator(n + 1, 0));
            let mut want = LoopElement::new();
            if m != n {
                want.insert((m + n + 1, 0), Scalar::from_int(1, m - n));
            }
            if m + n == 0 {
                let coc = c_half.mul(&Scalar::from_int(1, binom(m + 1, 3)));
                if !coc.is_zero() {
                    want.insert((-1, 1), coc);
                }
            }
            assert_eq!(got, want, "at ({}, {})", m, n);
        }
    }

    for (name, p) in [
        ("sl2_chevalley", examples::sl2_chevalley()),
        ("heisenberg1", examples::heisenberg1()),
    ] {
        let fin = match p.clone() {
            Presentation::Finite(f) => f,
            _ => unreachable!(),
        };
        let conf = affine_conformal(&fin).unwrap();
        let rep = conf.check_conformal_axioms(3);
        assert!(rep.passed(), "{}:\n{}", name, rep.render());
        let rep = conf.check_gamma_conformal_axioms();
        assert!(rep.passed(), "{}:\n{}", name, rep.render());
        assert!(!conf.gamma_axioms_with_twist(0).passed(), "{}", name);
        let la = LoopAlgebra::new(conf);
        let alg = Affinization::new(p);
        let rep = loop_affine_compare(&la, &alg, 4);
        assert!(rep.passed(), "{}:\n{}", name, rep.render());
        assert_eq!(rep.records.iter().filter(|r| r.status == Status::Pass).count(), 1);
    }

    let alg = Affinization::new(examples::gl_torus(7, 1));
    let rep = orbit_loop_check(&alg, 4, 2);
    assert!(rep.passed(), "{}", rep.render());
}
