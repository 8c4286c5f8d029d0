use fpg_core::words::{reduce, Letter, Word};
use proptest::prelude::*;

fn letters(max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0usize..3, any::<bool>()), 0..max_len)
        .prop_map(|v| v.into_iter().map(|(gen, inverse)| Letter { gen, inverse }).collect())
}

fn word() -> impl Strategy<Value = Word> {
    letters(24).prop_map(|l| reduce(&l))
}

fn is_freely_reduced(w: &Word) -> bool {
    w.letters().windows(2).all(|p| p[0] != p[1].inv())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn reduce_is_idempotent(l in letters(60)) {
        let once = reduce(&l);
        prop_assert!(is_freely_reduced(&once));
        prop_assert_eq!(reduce(once.letters()), once);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn group_laws(u in word(), v in word(), w in word()) {
        prop_assert_eq!(u.multiply(&v).multiply(&w), u.multiply(&v.multiply(&w)));
        prop_assert!(u.multiply(&u.invert()).is_identity());
        prop_assert_eq!(u.invert().invert(), u.clone());
        prop_assert_eq!(u.multiply(&v).invert(), v.invert().multiply(&u.invert()));
    }

    #[test]
    fn commutator_and_conjugate_expand(u in word(), v in word()) {
        let c = u.invert().multiply(&v.invert()).multiply(&u).multiply(&v);
        prop_assert_eq!(u.commutator(&v), c);
        prop_assert_eq!(u.commutator(&v).invert(), v.commutator(&u));
    }

    #[test]
    fn exponent_sums_are_additive(u in word(), v in word()) {
        let a = u.exponent_sums(3).unwrap();
        let b = v.exponent_sums(3).unwrap();
        let s = u.multiply(&v).exponent_sums(3).unwrap();
        prop_assert_eq!(s, a.iter().zip(&b).map(|(x, y)| x + y).collect::<Vec<_>>());
    }

    #[test]
    fn substitution_is_a_homomorphism(u in word(), v in word(), imgs in prop::collection::vec(word(), 3)) {
        prop_assert_eq!(
            u.multiply(&v).substitute(&imgs),
            u.substitute(&imgs).multiply(&v.substitute(&imgs))
        );
    }
}
