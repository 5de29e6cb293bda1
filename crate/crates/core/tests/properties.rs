use cleaved::algebra::{Algebra, Element};
use cleaved::deltagen::{psi, Complex};
use cleaved::tangle::Tangle;
use cleaved::typed::{algebra, TypeD};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn diagram(seed: u64) -> Tangle {
    Tangle::random(&mut ChaCha8Rng::seed_from_u64(seed), 4, 4)
}

/// Follow `choices` through the quiver from `start`, stopping at a sink.
fn walk(alg: &Algebra, start: usize, choices: &[usize]) -> Element {
    let q = &alg.quiver;
    let mut v = start;
    let mut path = Vec::new();
    for &c in choices {
        let out = q.out_edges(v);
        if out.is_empty() {
            break;
        }
        let e = out[c % out.len()];
        path.push(e);
        v = q.edges[e].target;
    }
    Element::path(start, v, path, 1)
}

/// A sum of random paths sharing the endpoints of the first one.
fn element(alg: &Algebra, start: usize, walks: &[(Vec<usize>, i64)]) -> Element {
    let first = walk(alg, start, &walks[0].0);
    let mut x = first.scale(walks[0].1);
    for (w, c) in &walks[1..] {
        let p = walk(alg, start, w);
        if p.target == x.target {
            x.add_scaled(*c, &p);
        }
    }
    x
}

fn walks() -> impl Strategy<Value = Vec<(Vec<usize>, i64)>> {
    prop::collection::vec((prop::collection::vec(0usize..16, 0..4), -3i64..=3), 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_is_idempotent_and_equivalent(n in 2usize..=3, v in 0usize..1000, w in walks()) {
        let alg = algebra(n).unwrap();
        let x = element(&alg, v % alg.quiver.vertices.len(), &w);
        let nf = alg.normal_form(&x).unwrap();
        prop_assert_eq!(alg.normal_form(&nf).unwrap(), nf.clone());
        prop_assert!(alg.is_zero(&x.minus(&nf)).unwrap());
        prop_assert_eq!(alg.is_zero(&x).unwrap(), nf.is_structurally_zero());
    }

    #[test]
    fn differential_is_leibniz_and_squares_to_zero(n in 2usize..=3, v in 0usize..1000, a in prop::collection::vec(0usize..16, 0..3), b in prop::collection::vec(0usize..16, 0..3)) {
        let alg = algebra(n).unwrap();
        let x = walk(&alg, v % alg.quiver.vertices.len(), &a);
        let y = walk(&alg, x.target, &b);
        let h = y.grading(&alg.quiver).unwrap().map_or(0, |g| g.h);
        let sign = if h % 2 == 0 { 1 } else { -1 };
        let lhs = alg.differential(&x.mul(&y));
        let rhs = alg.differential(&x).mul(&y).scale(sign).plus(&x.mul(&alg.differential(&y)));
        prop_assert!(alg.is_zero(&lhs.minus(&rhs)).unwrap());
        prop_assert!(alg.is_zero(&alg.differential(&alg.differential(&x))).unwrap());
    }

    #[test]
    fn tangle_text_round_trips(seed in any::<u64>()) {
        let t = diagram(seed);
        let text = t.serialize();
        let back = Tangle::parse(&text).unwrap();
        prop_assert_eq!(back.serialize(), text);
    }

    #[test]
    fn random_diagrams_are_type_d(seed in any::<u64>()) {
        let c = Complex::build(&diagram(seed)).unwrap();
        prop_assert!(c.structure.verify().unwrap().is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reorder_is_intertwined_by_psi(seed in any::<u64>(), k in any::<u64>()) {
        let t = diagram(seed);
        let c = t.crossing_count();
        let mut perm: Vec<usize> = (0..c).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(k);
        rand::seq::SliceRandom::shuffle(&mut perm[..], &mut rng);
        let a = Complex::build(&t).unwrap();
        let b = Complex::build(&t.reorder(&perm).unwrap()).unwrap();
        let m = psi(&a, &b).unwrap();
        prop_assert!(m.verify(&a.structure, &b.structure).unwrap().is_empty());
    }

    #[test]
    fn reduction_is_deterministic_and_conserves_euler(seed in any::<u64>()) {
        let d = Complex::build(&diagram(seed)).unwrap().structure;
        let r1 = d.reduce(true).unwrap();
        let r2 = d.reduce(false).unwrap();
        prop_assert_eq!(r1.reduced.serialize(), r2.reduced.serialize());
        prop_assert_eq!(r1.reduced.euler(), d.euler());
        for step in &r1.steps {
            let before = step.before.as_ref().unwrap();
            let c = step.cancellation.as_ref().unwrap();
            prop_assert_eq!(before.euler(), c.reduced.euler());
            prop_assert!(c.certify(before).unwrap().ok());
        }
        prop_assert!(r1.reduced.verify().unwrap().is_empty());
    }

    #[test]
    fn serialized_structures_round_trip(seed in any::<u64>()) {
        let d = Complex::build(&diagram(seed)).unwrap().structure;
        let text = d.serialize();
        let back = TypeD::parse(&text).unwrap();
        prop_assert_eq!(back.serialize(), text);
    }
}

#[test]
fn composition_laws_on_cancellation_maps() {
    let d = Complex::build(&Tangle::parse(cleaved::fixtures::TREFOIL).unwrap()).unwrap().structure;
    let (x, y) = d.first_unit_entry().unwrap();
    let c = d.cancel(x, y).unwrap();
    let red = &c.reduced;
    let id = d.identity_morphism();
    let id_red = red.identity_morphism();
    // ι: N̄ -> N, π: N -> N̄
    assert!(id_red.then(&c.iota).equals(&c.iota, red, &d).unwrap());
    assert!(c.iota.then(&id).equals(&c.iota, red, &d).unwrap());
    assert!(id.then(&c.pi).equals(&c.pi, &d, red).unwrap());
    assert!(c.pi.then(&id_red).equals(&c.pi, &d, red).unwrap());
    let left = c.iota.then(&c.pi).then(&c.iota);
    let right = c.iota.then(&c.pi.then(&c.iota));
    assert!(left.equals(&right, red, &d).unwrap());
    let left = c.pi.then(&c.iota).then(&c.homotopy);
    let right = c.pi.then(&c.iota.then(&c.homotopy));
    assert!(left.equals(&right, &d, &d).unwrap());
}

#[test]
fn a_broken_cancellation_is_caught() {
    let d = Complex::build(&Tangle::parse(cleaved::fixtures::TREFOIL).unwrap()).unwrap().structure;
    let (x, y) = d.first_unit_entry().unwrap();
    let mut c = d.cancel(x, y).unwrap();
    let idem = c.reduced.gens[0].idem;
    c.iota.set(0, c.kept[0], Element::idempotent(idem).scale(2));
    assert!(!c.certify(&d).unwrap().ok());
}
