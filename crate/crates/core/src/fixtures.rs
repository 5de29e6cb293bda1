//! Tangle diagrams shipped with the crate.

pub const T1: &str = include_str!("../fixtures/t1.tangle");
pub const T2: &str = include_str!("../fixtures/t2.tangle");
pub const TREFOIL: &str = include_str!("../fixtures/trefoil.tangle");
pub const RI_BEFORE: &str = include_str!("../fixtures/ri_before.tangle");
pub const RI_AFTER: &str = include_str!("../fixtures/ri_after.tangle");
pub const RI_POS_AFTER: &str = include_str!("../fixtures/ri_pos_after.tangle");
pub const RII_BEFORE: &str = include_str!("../fixtures/rii_before.tangle");
pub const RII_AFTER: &str = include_str!("../fixtures/rii_after.tangle");
pub const RIII_BEFORE: &str = include_str!("../fixtures/riii_before.tangle");
pub const RIII_AFTER: &str = include_str!("../fixtures/riii_after.tangle");

/// Every fixture with its file name.
pub const ALL: [(&str, &str); 10] = [
    ("t1.tangle", T1),
    ("t2.tangle", T2),
    ("trefoil.tangle", TREFOIL),
    ("ri_before.tangle", RI_BEFORE),
    ("ri_after.tangle", RI_AFTER),
    ("ri_pos_after.tangle", RI_POS_AFTER),
    ("rii_before.tangle", RII_BEFORE),
    ("rii_after.tangle", RII_AFTER),
    ("riii_before.tangle", RIII_BEFORE),
    ("riii_after.tangle", RIII_AFTER),
];

/// Pairs of diagrams related by one Reidemeister move.
pub const MOVES: [(&str, &str, &str); 4] = [
    ("RI-", RI_BEFORE, RI_AFTER),
    ("RI+", RI_BEFORE, RI_POS_AFTER),
    ("RII", RII_BEFORE, RII_AFTER),
    ("RIII", RIII_BEFORE, RIII_AFTER),
];
