//! Finitely generated abelian groups with unit-valued characters: evaluation,
//! kernels via integer linear algebra, and quotients with canonical sections.

use crate::intlin::{self, Mat};
use crate::scalars::{lcm, UnitMonomial};
use num::{BigRational, One, Zero};

/// Z^free_rank x prod Z/d_i. Elements are coordinate vectors over the
/// generators, free coordinates first, torsion coordinates reduced mod d_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    pub coords: Vec<i64>,
}

impl AbelianGroup {
    pub fn new(free_rank: usize, torsion: Vec<u64>) -> Self {
        assert!(torsion.iter().all(|d| *d >= 2), "torsion orders must be >= 2");
        AbelianGroup { free_rank, torsion }
    }

    pub fn trivial() -> Self {
        AbelianGroup { free_rank: 0, torsion: vec![] }
    }

    pub fn ngens(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { coords: vec![0; self.ngens()] }
    }

    pub fn reduce(&self, mut coords: Vec<i64>) -> GroupElement {
        assert_eq!(coords.len(), self.ngens());
        for (i, d) in self.torsion.iter().enumerate() {
            let j = self.free_rank + i;
            coords[j] = coords[j].rem_euclid(*d as i64);
        }
        GroupElement { coords }
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        let mut c = vec![0; self.ngens()];
        c[i] = 1;
        self.reduce(c)
    }

    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.ngens()).map(|i| self.generator(i)).collect()
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.reduce(a.coords.iter().zip(b.coords.iter()).map(|(x, y)| x + y).collect())
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        self.reduce(a.coords.iter().map(|x| -x).collect())
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    pub fn is_zero(&self, a: &GroupElement) -> bool {
        self.reduce(a.coords.clone()).coords.iter().all(|x| *x == 0)
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<u64> {
        if self.is_finite() {
            Some(self.torsion.iter().product::<u64>().max(1))
        } else {
            None
        }
    }

    /// All elements; only for finite groups.
    pub fn elements(&self) -> Vec<GroupElement> {
        assert!(self.is_finite(), "cannot enumerate an infinite group");
        let mut out = vec![vec![]];
        for d in &self.torsion {
            let mut next = vec![];
            for prefix in &out {
                for v in 0..*d as i64 {
                    let mut p = prefix.clone();
                    p.push(v);
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(|coords| GroupElement { coords }).collect()
    }
}

/// Character given by one unit-monomial image per generator.
#[derive(Clone, Debug)]
pub struct Character {
    pub group: AbelianGroup,
    /// Session conductor: all root-of-unity parts live in Q(zeta_N).
    pub conductor: u64,
    /// Formal parameter count.
    pub k: usize,
    pub images: Vec<UnitMonomial>,
}

impl Character {
    pub fn new(
        group: AbelianGroup,
        conductor: u64,
        k: usize,
        images: Vec<UnitMonomial>,
    ) -> Result<Self, String> {
        if images.len() != group.ngens() {
            return Err(format!(
                "character needs {} images, got {}",
                group.ngens(),
                images.len()
            ));
        }
        let chr = Character { group, conductor, k, images };
        for (i, img) in chr.images.iter().enumerate() {
            if img.cyclo.is_zero() {
                return Err(format!("generator {} image has zero cyclotomic part", i));
            }
            if img.cyclo.as_root_of_unity(conductor).is_none() {
                return Err(format!(
                    "generator {} image is not a power of zeta_{} times a monomial",
                    i, conductor
                ));
            }
            if i >= chr.group.free_rank {
                let d = chr.group.torsion[i - chr.group.free_rank];
                if !img.pow(d as i64).is_one() {
                    return Err(format!(
                        "torsion generator {} image does not have order dividing {}",
                        i, d
                    ));
                }
            }
        }
        Ok(chr)
    }

    pub fn trivial(group: AbelianGroup, conductor: u64, k: usize) -> Self {
        let images = vec![UnitMonomial::one(k); group.ngens()];
        Character { group, conductor, k, images }
    }

    pub fn eval(&self, g: &GroupElement) -> UnitMonomial {
        let mut out = UnitMonomial::one(self.k);
        for (i, c) in g.coords.iter().enumerate() {
            if *c != 0 {
                out = out.mul(&self.images[i].pow(*c));
            }
        }
        out
    }

    /// Decompose each generator image as (zeta_N exponent, parameter exponents).
    fn image_data(&self) -> Vec<(i64, Vec<i64>)> {
        self.images
            .iter()
            .map(|img| {
                let j = img
                    .cyclo
                    .as_root_of_unity(self.conductor)
                    .expect("validated at construction") as i64;
                let mut e = img.exps.clone();
                e.resize(self.k, 0);
                (j, e)
            })
            .collect()
    }

    /// Generators of ker(character) as a subgroup.
    pub fn kernel(&self) -> Subgroup {
        let n = self.group.ngens();
        if n == 0 {
            return Subgroup { gens: vec![] };
        }
        let data = self.image_data();
        // Unknowns: one per group generator plus one slack absorbing the
        // conductor; rows: one per formal parameter plus the root-of-unity row.
        let mut m: Mat = vec![];
        for p in 0..self.k {
            let mut row: Vec<i128> = data.iter().map(|(_, e)| e[p] as i128).collect();
            row.push(0);
            m.push(row);
        }
        let mut root_row: Vec<i128> = data.iter().map(|(j, _)| *j as i128).collect();
        root_row.push(self.conductor as i128);
        m.push(root_row);
        let ker = intlin::integer_kernel(&m);
        let mut gens = vec![];
        for v in ker {
            let coords: Vec<i64> = (0..n).map(|i| v[i] as i64).collect();
            let g = self.group.reduce(coords);
            if !self.group.is_zero(&g) {
                gens.push(g);
            }
        }
        gens.sort();
        gens.dedup();
        Subgroup { gens }
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().gens.iter().all(|g| self.group.is_zero(g))
    }

    /// Finite order of the image group phi(Gamma), if it is finite.
    pub fn image_order(&self) -> Option<u64> {
        let mut ord = 1u64;
        for img in &self.images {
            ord = lcm(ord, img.order()?);
        }
        Some(ord)
    }
}

#[derive(Clone, Debug)]
pub struct Subgroup {
    pub gens: Vec<GroupElement>,
}

impl Subgroup {
    pub fn trivial() -> Self {
        Subgroup { gens: vec![] }
    }

    pub fn is_trivial(&self, group: &AbelianGroup) -> bool {
        self.gens.iter().all(|g| group.is_zero(g))
    }
}

/// Quotient Gamma/H with projection and a canonical (Smith basis) section.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: AbelianGroup,
    pub quotient: AbelianGroup,
    u: Mat,
    uinv: Mat,
    /// Per Smith coordinate: invariant factor (1 = dead, 0 = free, d = Z/d),
    /// paired with the slot in the quotient coordinate vector (if alive).
    slots: Vec<(i128, Option<usize>)>,
}

impl Quotient {
    pub fn new(group: &AbelianGroup, h: &Subgroup) -> Quotient {
        let n = group.ngens();
        // Relator lattice: torsion relations of Gamma plus the subgroup gens.
        let mut relators: Vec<Vec<i128>> = vec![];
        for (i, d) in group.torsion.iter().enumerate() {
            let mut r = vec![0i128; n];
            r[group.free_rank + i] = *d as i128;
            relators.push(r);
        }
        for g in &h.gens {
            relators.push(g.coords.iter().map(|x| *x as i128).collect());
        }
        // Columns of a span the relator lattice.
        let a: Mat = (0..n)
            .map(|i| relators.iter().map(|r| r[i]).collect::<Vec<i128>>())
            .collect();
        let (u, d) = if relators.is_empty() {
            (intlin::identity(n), vec![vec![0i128; 0]; n])
        } else {
            let (d, u, _v) = intlin::smith_normal_form(&a);
            (u, d)
        };
        let uinv = unimodular_inverse(&u);
        // In Smith coordinates y = u x the lattice is span{d_i e_i}.
        let mut factors = vec![0i128; n];
        for (i, f) in factors.iter_mut().enumerate() {
            if i < d.len() && i < d[i].len() {
                *f = d[i][i].abs();
            }
        }
        // Quotient coordinates: free slots first, then torsion slots.
        let mut slots: Vec<(i128, Option<usize>)> = factors.iter().map(|f| (*f, None)).collect();
        let mut free_rank = 0;
        for (f, slot) in slots.iter_mut() {
            if *f == 0 {
                *slot = Some(free_rank);
                free_rank += 1;
            }
        }
        let mut torsion = vec![];
        for (f, slot) in slots.iter_mut() {
            if *f >= 2 {
                *slot = Some(free_rank + torsion.len());
                torsion.push(*f as u64);
            }
        }
        Quotient {
            group: group.clone(),
            quotient: AbelianGroup::new(free_rank, torsion),
            u,
            uinv,
            slots,
        }
    }

    pub fn project(&self, g: &GroupElement) -> GroupElement {
        let n = self.group.ngens();
        assert_eq!(g.coords.len(), n);
        let mut out = vec![0i64; self.quotient.ngens()];
        for i in 0..n {
            let y: i128 = (0..n).map(|j| self.u[i][j] * g.coords[j] as i128).sum();
            if let (f, Some(slot)) = self.slots[i] {
                out[slot] = if f == 0 { y as i64 } else { y.rem_euclid(f) as i64 };
            }
        }
        self.quotient.reduce(out)
    }

    /// Canonical representative in Gamma of a quotient element.
    pub fn section(&self, q: &GroupElement) -> GroupElement {
        let n = self.group.ngens();
        let mut y = vec![0i128; n];
        for (i, (_f, slot)) in self.slots.iter().enumerate() {
            if let Some(s) = slot {
                y[i] = q.coords[*s] as i128;
            }
        }
        let x: Vec<i64> = (0..n)
            .map(|i| (0..n).map(|j| self.uinv[i][j] * y[j]).sum::<i128>() as i64)
            .collect();
        self.group.reduce(x)
    }
}

fn unimodular_inverse(u: &Mat) -> Mat {
    let n = u.len();
    // Gauss-Jordan over the rationals; the result is integral for det = +-1.
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        BigRational::from_integer(u[i][j].into())
                    } else {
                        BigRational::from_integer(i128::from(j - n == i).into())
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("singular matrix passed to unimodular_inverse");
        a.swap(col, piv);
        let p = a[col][col].clone();
        for j in 0..2 * n {
            a[col][j] = &a[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..2 * n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                }
            }
        }
    }
    (0..n)
        .map(|i| {
            (n..2 * n)
                .map(|j| {
                    let v = &a[i][j];
                    assert!(v.denom().is_one(), "non-unimodular matrix");
                    i128::try_from(v.numer().clone()).expect("inverse entry overflow")
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Cyclotomic;

    fn zchar(img: UnitMonomial, conductor: u64, k: usize) -> Character {
        Character::new(AbelianGroup::new(1, vec![]), conductor, k, vec![img]).unwrap()
    }

    #[test]
    fn eval_is_homomorphic() {
        // Gamma = Z^2, phi(e1) = q1, phi(e2) = zeta_4.
        let group = AbelianGroup::new(2, vec![]);
        let chr = Character::new(
            group.clone(),
            4,
            1,
            vec![
                UnitMonomial::param(1, 0),
                UnitMonomial::from_cyclo(1, Cyclotomic::root_of_unity(4, 1)),
            ],
        )
        .unwrap();
        let g = GroupElement { coords: vec![1, 2] };
        // phi(e1 + 2 e2) = -q1
        let v = chr.eval(&g);
        assert_eq!(v.cyclo, Cyclotomic::from_int(-1));
        assert_eq!(v.exps, vec![1]);
        for a in [-2i64, 0, 3] {
            for b in [-1i64, 2] {
                for c in [1i64, -3] {
                    for d in [0i64, 1] {
                        let x = group.reduce(vec![a, b]);
                        let y = group.reduce(vec![c, d]);
                        assert_eq!(
                            chr.eval(&group.add(&x, &y)),
                            chr.eval(&x).mul(&chr.eval(&y))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_of_zeta3_on_z() {
        let chr = zchar(UnitMonomial::from_cyclo(0, Cyclotomic::root_of_unity(3, 1)), 3, 0);
        let ker = chr.kernel();
        assert_eq!(ker.gens.len(), 1);
        assert_eq!(ker.gens[0].coords[0].abs(), 3);
        assert!(!chr.is_injective());
    }

    #[test]
    fn kernel_of_formal_parameter_is_trivial() {
        let chr = zchar(UnitMonomial::param(1, 0), 1, 1);
        assert!(chr.is_injective());
        assert_eq!(chr.image_order(), None);
    }

    #[test]
    fn kernel_of_trivial_character_on_z2() {
        let group = AbelianGroup::new(0, vec![2]);
        let chr = Character::trivial(group.clone(), 2, 0);
        let ker = chr.kernel();
        assert!(!chr.is_injective() || group.order() == Some(1));
        assert!(ker.gens.iter().any(|g| g.coords == vec![1]));
    }

    #[test]
    fn order_two_character_is_injective() {
        let group = AbelianGroup::new(0, vec![2]);
        let chr = Character::new(
            group,
            2,
            0,
            vec![UnitMonomial::from_cyclo(0, Cyclotomic::from_int(-1))],
        )
        .unwrap();
        assert!(chr.is_injective());
        assert_eq!(chr.image_order(), Some(2));
    }

    #[test]
    fn torsion_image_validation() {
        let group = AbelianGroup::new(0, vec![2]);
        assert!(Character::new(group, 2, 1, vec![UnitMonomial::param(1, 0)]).is_err());
    }

    #[test]
    fn quotient_z_by_2z() {
        let group = AbelianGroup::new(1, vec![]);
        let h = Subgroup { gens: vec![GroupElement { coords: vec![2] }] };
        let q = Quotient::new(&group, &h);
        assert_eq!(q.quotient, AbelianGroup::new(0, vec![2]));
        let one = GroupElement { coords: vec![1] };
        let two = GroupElement { coords: vec![2] };
        assert!(q.quotient.is_zero(&q.project(&two)));
        assert!(!q.quotient.is_zero(&q.project(&one)));
        // section o project fixes cosets
        let rep = q.section(&q.project(&one));
        assert!(q.quotient.is_zero(&q.quotient.sub(&q.project(&rep), &q.project(&one))));
    }

    #[test]
    fn quotient_by_whole_group() {
        let group = AbelianGroup::new(0, vec![2]);
        let h = Subgroup { gens: vec![GroupElement { coords: vec![1] }] };
        let q = Quotient::new(&group, &h);
        assert_eq!(q.quotient.order(), Some(1));
    }

    #[test]
    fn finite_enumeration() {
        let group = AbelianGroup::new(0, vec![2, 3]);
        let els = group.elements();
        assert_eq!(els.len(), 6);
    }
}
