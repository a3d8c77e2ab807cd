use aol::formula::Formula;
use aol::kripke::WitnessMode;
use proptest::prelude::*;

use super::RawModel;

/// Formulas of depth at most `depth` over `atoms`. `modal` admits K, O and
/// A; `pref` admits the conditional.
pub fn formula(atoms: Vec<String>, depth: u32, modal: bool, pref: bool) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        1 => Just(Formula::True),
        1 => Just(Formula::False),
        6 => proptest::sample::select(atoms).prop_map(Formula::Atom),
    ];
    leaf.prop_recursive(depth, 64, 2, move |inner| {
        let mut arms: Vec<(u32, BoxedStrategy<Formula>)> = vec![
            (2, inner.clone().prop_map(Formula::not).boxed()),
            (2, (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)).boxed()),
            (2, (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)).boxed()),
            (2, (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)).boxed()),
        ];
        if modal {
            arms.push((1, inner.clone().prop_map(Formula::knows).boxed()));
            arms.push((1, inner.clone().prop_map(Formula::only).boxed()));
            arms.push((1, inner.clone().prop_map(Formula::abd).boxed()));
        }
        if pref {
            arms.push((1, (inner.clone(), inner).prop_map(|(a, b)| Formula::pref(a, b)).boxed()));
        }
        proptest::strategy::Union::new_weighted(arms)
    })
    .boxed()
}

/// Atom names that are valid identifiers and not reserved words.
pub fn atom_name() -> impl Strategy<Value = String> {
    "[a-z_][a-z0-9_]{0,6}".prop_filter("reserved", |s| aol::formula::is_valid_atom_name(s))
}

pub fn witness_mode() -> impl Strategy<Value = WitnessMode> {
    prop_oneof![Just(WitnessMode::Conjunction), Just(WitnessMode::Subsets), Just(WitnessMode::Unrestricted)]
}

/// Random model with up to `max_worlds` worlds over atoms p, q, r, an
/// optional total preorder and an objective background.
pub fn raw_model(max_worlds: usize, ordered: bool) -> impl Strategy<Value = RawModel> {
    let atoms: Vec<String> = ["p", "q", "r"].iter().map(|s| s.to_string()).collect();
    (1..=max_worlds).prop_flat_map(move |n| {
        let atoms = atoms.clone();
        let k = atoms.len();
        let rank = if ordered { proptest::collection::vec(0..n, n).prop_map(Some).boxed() } else { Just(None).boxed() };
        (
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), n),
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), k), n),
            rank,
            proptest::collection::vec(formula(atoms.clone(), 2, false, false), 0..4),
            witness_mode(),
            1usize..4,
        )
            .prop_map(move |(edges, val, rank, background, mode, max_witness)| RawModel {
                edges,
                val,
                atoms: atoms.clone(),
                rank,
                background,
                mode,
                max_witness,
            })
    })
}
