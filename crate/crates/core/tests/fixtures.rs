use cleaved::deltagen::Complex;
use cleaved::fixtures;
use cleaved::tangle::Tangle;

#[test]
fn fixtures_round_trip_exactly() {
    for (name, text) in fixtures::ALL {
        let t = Tangle::parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(t.serialize(), text, "{name}");
    }
}

#[test]
fn recorded_orientation_matches_the_diagram() {
    for (name, text) in fixtures::ALL {
        let t = Tangle::parse(text).unwrap();
        let (pos, neg) = t.orientation().unwrap();
        assert_eq!(pos + neg, t.crossing_count(), "{name}");
        if let Some(signs) = t.crossing_signs().unwrap() {
            assert_eq!(signs.iter().filter(|&&s| s > 0).count(), pos, "{name}");
        }
    }
}

#[test]
fn fixtures_are_type_d() {
    for (name, text) in fixtures::ALL {
        let c = Complex::build(&Tangle::parse(text).unwrap()).unwrap();
        assert!(c.structure.verify().unwrap().is_empty(), "{name}");
    }
}

