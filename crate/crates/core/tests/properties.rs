use proptest::prelude::*;

use rhgt::algos::{conjugate_search, translation_number};
use rhgt::filling::{cyclic_class_rep, scan_alphabet};
use rhgt::graph::{exact_rel_length, rel_geodesic};
use rhgt::paths::analyze;
use rhgt::zoo::{presets, ElementId};
use rhgt::{Group, Letter, Word};

fn groups() -> Vec<Group> {
    presets::ALL
        .iter()
        .map(|(n, _)| presets::get(n).unwrap())
        .collect()
}

fn word_from(g: &Group, picks: &[usize]) -> Word {
    let alphabet: Vec<Letter> = scan_alphabet(&g.pres, 3);
    Word::new(
        picks
            .iter()
            .map(|&i| alphabet[i % alphabet.len()])
            .collect(),
    )
}

fn picks(max: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..64, 0..max)
}

fn exact_groups() -> Vec<Group> {
    vec![
        presets::zz(),
        presets::f2relx(),
        presets::fp23(),
        presets::f2(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn free_reduce_is_idempotent_and_multiplicative(gi in 0usize..5, a in picks(12), b in picks(12)) {
        let g = &groups()[gi];
        let (u, v) = (word_from(g, &a), word_from(g, &b));
        let p = &g.pres;
        let ru = p.free_reduce(&u);
        prop_assert_eq!(p.free_reduce(&ru), ru.clone());
        prop_assert!(p.is_freely_reduced(&ru));
        let rv = p.free_reduce(&v);
        prop_assert_eq!(p.free_reduce(&u.concat(&v)), p.free_reduce(&ru.concat(&rv)));
        prop_assert!(p.free_reduce(&u.concat(&p.invert(&u))).is_empty());
    }

    #[test]
    fn parse_format_round_trip(gi in 0usize..5, a in picks(12)) {
        let g = &groups()[gi];
        let w = g.pres.free_reduce(&word_from(g, &a));
        let text = g.format(&w);
        prop_assert_eq!(g.parse(&text).unwrap(), w);
    }

    #[test]
    fn oracle_group_laws(gi in 0usize..5, a in picks(8), b in picks(8), c in picks(8)) {
        let g = &groups()[gi];
        let o = &*g.oracle;
        let e = |p: &[usize]| o.normal_form(&word_from(g, p)).unwrap();
        let (x, y, z) = (e(&a), e(&b), e(&c));
        prop_assert_eq!(o.multiply(&o.multiply(&x, &y), &z), o.multiply(&x, &o.multiply(&y, &z)));
        prop_assert!(o.is_identity(&o.multiply(&x, &o.invert(&x))));
        prop_assert_eq!(o.multiply(&o.identity(), &x), x.clone());
        prop_assert_eq!(o.parse_element(&o.format_element(&x)).unwrap(), x);
    }

    #[test]
    fn free_reduction_preserves_the_element(gi in 0usize..5, a in picks(14)) {
        let g = &groups()[gi];
        let w = word_from(g, &a);
        let o = &*g.oracle;
        prop_assert_eq!(o.normal_form(&w).unwrap(), o.normal_form(&g.pres.free_reduce(&w)).unwrap());
    }

    #[test]
    fn symmetrized_set_is_closed(gi in 0usize..5, k in 0usize..64) {
        let g = &groups()[gi];
        let p = &g.pres;
        let sym = p.symmetrized();
        prop_assume!(!sym.is_empty());
        let r = &sym[k % sym.len()];
        prop_assert!(sym.contains(&p.invert(r)));
        for i in 0..r.len() {
            let rot = r.rotate(i);
            prop_assert!(rot == p.free_reduce(&rot) && sym.contains(&rot) || !p.is_cyclically_reduced(&rot));
        }
    }

    #[test]
    fn exact_distance_is_a_metric(gi in 0usize..4, a in picks(6), b in picks(6), c in picks(6)) {
        let g = &exact_groups()[gi];
        let o = &*g.oracle;
        let e = |p: &[usize]| o.normal_form(&word_from(g, p)).unwrap();
        let (x, y, z) = (e(&a), e(&b), e(&c));
        let d = |u: &ElementId, v: &ElementId| exact_rel_length(g, &o.multiply(&o.invert(u), v)).unwrap();
        prop_assert_eq!(d(&x, &x), 0);
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
        prop_assert_eq!(d(&x, &y) == 0, x == y);
        prop_assert!(d(&x, &y) <= o.x_distance(&x, &y));
    }

    #[test]
    fn geodesics_are_geodesic_with_isolated_components(gi in 0usize..4, a in picks(8)) {
        let g = &exact_groups()[gi];
        let o = &*g.oracle;
        let t = o.normal_form(&word_from(g, &a)).unwrap();
        let p = rel_geodesic(g, &o.identity(), &t).unwrap();
        prop_assert_eq!(p.end(), &t);
        prop_assert_eq!(Some(p.len()), exact_rel_length(g, &t));
        let r = analyze(g, &p);
        prop_assert!(r.isolated.iter().all(|&b| b));
        prop_assert!(!r.backtracking);
    }

    #[test]
    fn conjugate_search_is_symmetric(a in picks(4), b in picks(4)) {
        let g = presets::f2relx();
        let o = &*g.oracle;
        let f = o.normal_form(&word_from(&g, &a)).unwrap();
        let h = o.normal_form(&word_from(&g, &b)).unwrap();
        let fwd = conjugate_search(&g, &f, &h, 3).unwrap();
        let back = conjugate_search(&g, &h, &f, 3).unwrap();
        prop_assert_eq!(fwd.is_some(), back.is_some());
        if let Some(w) = fwd {
            prop_assert_eq!(o.conjugate(&f, &w.t), h);
        }
    }

    #[test]
    fn translation_estimates_are_nonincreasing(gi in 0usize..4, a in picks(5)) {
        let g = &exact_groups()[gi];
        let t = g.oracle.normal_form(&word_from(g, &a)).unwrap();
        let est = translation_number(g, &t, 6).unwrap();
        for w in est.terms.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        for w in est.raw_terms.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        prop_assert!(est.last() <= *est.raw_terms.last().unwrap());
    }

    #[test]
    fn class_rep_is_rotation_invariant(gi in 0usize..5, a in picks(8), k in 0usize..8) {
        let g = &groups()[gi];
        let w = g.pres.free_reduce(&word_from(g, &a));
        prop_assume!(!w.is_empty());
        let rep = cyclic_class_rep(&g.pres, &w);
        prop_assert_eq!(cyclic_class_rep(&g.pres, &w.rotate(k % w.len())), rep.clone());
        prop_assert_eq!(cyclic_class_rep(&g.pres, &g.pres.invert(&w)), rep);
    }
}
