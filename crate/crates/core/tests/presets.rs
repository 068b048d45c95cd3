use tamefill::ball::CayleyBall;
use tamefill::format::{parse_presentation, print_presentation};
use tamefill::presets::{all_presets, preset, PresetError, PRESET_NAMES};
use tamefill::suite::bs12_status;

#[test]
fn names_resolve() {
    for name in PRESET_NAMES {
        assert_eq!(preset(name).unwrap().name, *name);
    }
    assert!(matches!(preset("Z7"), Err(PresetError::UnknownPreset(_))));
    assert_eq!(all_presets().len(), PRESET_NAMES.len());
}

#[test]
fn finite_orders() {
    for (name, order) in [("Z3", 3), ("Z5", 5), ("S3", 6)] {
        let p = preset(name).unwrap();
        assert_eq!(p.order, Some(order));
        let rs = p.rewriting.unwrap();
        let ball = CayleyBall::build(&rs, rs.alphabet().clone(), order + 2).unwrap();
        assert!(ball.boundary_complete(), "{name}");
        assert_eq!(ball.len(), order);
    }
}

#[test]
fn infinite_balls_keep_growing() {
    for (name, sizes) in [
        ("F1", [1, 3, 5, 7]),
        ("F2", [1, 5, 17, 53]),
        ("Z2", [1, 5, 13, 25]),
    ] {
        let rs = preset(name).unwrap().rewriting.unwrap();
        let ball = CayleyBall::build(&rs, rs.alphabet().clone(), 3).unwrap();
        for (r, &want) in sizes.iter().enumerate() {
            let got = ball.elements().filter(|&g| ball.dist(g) <= r).count();
            assert_eq!(got, want, "{name} r={r}");
        }
    }
}

#[test]
fn files_round_trip() {
    for p in all_presets() {
        let text = print_presentation(&p.presentation, p.rewriting.as_ref());
        let back = parse_presentation(&text).unwrap_or_else(|e| panic!("{}: {e}", p.name));
        assert_eq!(
            back.presentation.relators().collect::<Vec<_>>(),
            p.presentation.relators().collect::<Vec<_>>(),
            "{}",
            p.name
        );
        assert_eq!(
            back.rewriting.as_ref().map(|r| r.rules().to_vec()),
            p.rewriting.as_ref().map(|r| r.rules().to_vec()),
            "{}",
            p.name
        );
    }
}

#[test]
fn bs12_reports_open_pairs() {
    let s = bs12_status(12, 4).unwrap();
    assert!(s.rules > 0);
    assert!(
        s.predicate_mismatches.is_empty(),
        "{:?}",
        s.predicate_mismatches
    );
    assert!(s.words_checked > 0);
    assert!(preset("BS12").unwrap().experimental);
}
