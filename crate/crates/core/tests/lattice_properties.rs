use std::collections::HashSet;

use fpg_core::zlinalg::{
    cokernel_invariants, smith_normal_form, AbelianGroupInvariants, Int, IntMatrix, Lattice,
};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        prop::collection::vec(prop::collection::vec(-bound..=bound, c), r)
            .prop_map(|rows| IntMatrix::from_i64_rows(&rows))
    })
}

fn is_smith_diagonal(s: &IntMatrix) -> bool {
    let mut prev: Option<Int> = None;
    for i in 0..s.nrows() {
        for j in 0..s.ncols() {
            let x = &s[(i, j)];
            if i != j && !x.is_zero() {
                return false;
            }
            if i == j {
                if x.is_negative() {
                    return false;
                }
                if let Some(p) = &prev {
                    // Divisibility chain, zeros last.
                    if p.is_zero() && !x.is_zero() {
                        return false;
                    }
                    if !p.is_zero() && !(x % p).is_zero() {
                        return false;
                    }
                }
                prev = Some(x.clone());
            }
        }
    }
    true
}

fn permute_rows(m: &IntMatrix, perm: &[usize]) -> IntMatrix {
    m.select_rows(perm)
}

fn permute_cols(m: &IntMatrix, perm: &[usize]) -> IntMatrix {
    m.select_columns(perm)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn smith_form_is_certified(m in matrix(12, 9), seed in any::<u64>()) {
        let snf = smith_normal_form(&m);
        prop_assert!(snf.u.is_unimodular());
        prop_assert!(snf.v.is_unimodular());
        prop_assert_eq!(snf.u.mul(&m).unwrap().mul(&snf.v).unwrap(), snf.s.clone());
        prop_assert!(is_smith_diagonal(&snf.s));

        // Shuffling rows and columns and adding a multiple of one row to
        // another does not change the diagonal.
        let mut rows: Vec<usize> = (0..m.nrows()).collect();
        let mut cols: Vec<usize> = (0..m.ncols()).collect();
        let mut s = seed;
        let mut next = |n: usize| { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 33) as usize % n };
        for i in (1..rows.len()).rev() { let j = next(i + 1); rows.swap(i, j); }
        for i in (1..cols.len()).rev() { let j = next(i + 1); cols.swap(i, j); }
        let mut shuffled = permute_cols(&permute_rows(&m, &rows), &cols);
        if shuffled.nrows() > 1 {
            let (a, b) = (next(shuffled.nrows()), next(shuffled.nrows()));
            if a != b {
                let k = Int::from(next(7) as i64 - 3);
                let mut data = shuffled.rows().to_vec();
                let add: Vec<Int> = data[b].iter().map(|x| x * &k).collect();
                for (x, y) in data[a].iter_mut().zip(add) { *x += y; }
                shuffled = IntMatrix::from_rows(m.ncols(), data);
            }
        }
        prop_assert_eq!(smith_normal_form(&shuffled).diagonal(), snf.diagonal());
    }
}

/// A full-rank sublattice of `Z²` read modulo `d`, where `dZ² ⊆ L`.
struct ModularLattice {
    d: i64,
    members: HashSet<(i64, i64)>,
}

impl ModularLattice {
    /// Closure of the columns of `gens` under addition in `(Z/d)²`.
    fn generate(gens: &[(i64, i64)], d: i64) -> Self {
        let mut members = HashSet::from([(0, 0)]);
        let mut frontier = vec![(0, 0)];
        while let Some((x, y)) = frontier.pop() {
            for &(gx, gy) in gens {
                let p = ((x + gx).rem_euclid(d), (y + gy).rem_euclid(d));
                if members.insert(p) {
                    frontier.push(p);
                }
            }
        }
        ModularLattice { d, members }
    }

    fn contains(&self, x: i64, y: i64) -> bool {
        self.members.contains(&(x.rem_euclid(self.d), y.rem_euclid(self.d)))
    }

    fn index(&self) -> i64 {
        self.d * self.d / self.members.len() as i64
    }

    /// Invariants of `Z²/L` from its order and exponent.
    fn quotient(&self) -> AbelianGroupInvariants {
        let n = self.index();
        let e = (1..=n).find(|&e| self.contains(e, 0) && self.contains(0, e)).unwrap();
        let orders: Vec<Int> = [n / e, e].into_iter().filter(|&x| x > 1).map(Int::from).collect();
        AbelianGroupInvariants::from_cyclic_orders(&orders)
    }
}

fn det(m: &[(i64, i64); 2]) -> i64 {
    m[0].0 * m[1].1 - m[0].1 * m[1].0
}

fn lattice(cols: &[(i64, i64)]) -> Lattice {
    Lattice::from_rows(2, cols.iter().map(|&(x, y)| vec![Int::from(x), Int::from(y)]).collect())
}

fn nonsingular() -> impl Strategy<Value = [(i64, i64); 2]> {
    [(-3i64..=3, -3i64..=3), (-3i64..=3, -3i64..=3)].prop_filter("full rank", |m| det(m) != 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn two_by_two_lattices_match_enumeration(a in nonsingular(), b in nonsingular(), probe in prop::collection::vec((-40i64..40, -40i64..40), 16)) {
        let d = (det(&a) * det(&b)).abs();
        let la = ModularLattice::generate(&a, d);
        let lb = ModularLattice::generate(&b, d);
        let (ea, eb) = (lattice(&a), lattice(&b));
        let full = Lattice::full(2);

        // Index and structure of Z²/L.
        prop_assert_eq!(la.index(), det(&a).abs());
        prop_assert_eq!(full.quotient_invariants(&ea).unwrap(), la.quotient());
        let m = IntMatrix::from_i64_columns(2, &[vec![a[0].0, a[0].1], vec![a[1].0, a[1].1]]);
        prop_assert_eq!(cokernel_invariants(&m), la.quotient());

        // Sum and intersection.
        let sum_gens: Vec<(i64, i64)> = a.iter().chain(&b).copied().collect();
        let ls = ModularLattice::generate(&sum_gens, d);
        let li = ModularLattice {
            d,
            members: la.members.intersection(&lb.members).copied().collect(),
        };
        let (es, ei) = (ea.sum(&eb), ea.intersection(&eb));
        prop_assert_eq!(full.quotient_invariants(&es).unwrap(), ls.quotient());
        prop_assert_eq!(full.quotient_invariants(&ei).unwrap(), li.quotient());
        for &(x, y) in &probe {
            let v = [Int::from(x), Int::from(y)];
            prop_assert_eq!(ea.contains(&v), la.contains(x, y));
            prop_assert_eq!(es.contains(&v), ls.contains(x, y));
            prop_assert_eq!(ei.contains(&v), li.contains(x, y));
        }
        prop_assert!(es.contains_lattice(&ea) && ea.contains_lattice(&ei));
    }
}
