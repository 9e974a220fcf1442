mod common;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use common::*;
use gosil::elaboration::elaborate;
use gosil::grounding::{build_intensional_interp, ground, GroundInterpretation};
use gosil::semantics::{find_models, parse_structure, print_structure, satisfies, Model, ModelOptions, Structure};
use gosil::syntax::{parse_formula, print_formula, Formula, Theory};
use gosil::typing::{check_sentence, initial_context, validate_derivation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Fixture {
    theory: Theory,
    interp: GroundInterpretation,
    structures: Vec<Structure>,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let theory = running_example();
        let interp = build_intensional_interp(&theory).unwrap();
        let structures = running_example_structures(&theory, 2);
        Fixture { theory, interp, structures }
    })
}

fn sentence(seed: u64, depth: usize) -> Formula {
    TypedGen::new().sentence(&mut ChaCha8Rng::seed_from_u64(seed), depth)
}

/// The grounded, elaborated form of a well-typed sentence, or `None`.
fn well_typed(f: &Formula) -> Option<Formula> {
    let fx = fixture();
    let check = check_sentence(&fx.theory, f).ok()?;
    check.result.ok()?;
    let ctx = initial_context(&fx.theory.vocabulary);
    let g = if f.is_intensional() { ground(f, &fx.interp).ok()? } else { f.clone() };
    elaborate(&fx.theory.vocabulary, &ctx, &g).ok()
}

#[test]
fn generator_mostly_yields_well_typed_sentences() {
    let ok = (0..400u64).filter(|&s| well_typed(&sentence(s, 4)).is_some()).count();
    assert!(ok >= 200, "only {ok} of 400 sentences are well-typed");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn subtyping_is_a_preorder_under_universe(seed in any::<u64>()) {
        let (vocab, edges) = random_vocabulary(&mut ChaCha8Rng::seed_from_u64(seed), 6);
        let names: Vec<String> = vocab.user_types().map(|t| t.name.clone()).collect();
        for a in &names {
            prop_assert!(vocab.conforms(a, a));
            prop_assert!(vocab.conforms(a, "Universe"));
            prop_assert!(!vocab.conforms("Universe", a));
            for b in &names {
                prop_assert_eq!(vocab.conforms(a, b), a == b || reaches(&edges, a, b));
                if a != b && vocab.conforms(a, b) {
                    prop_assert!(!vocab.conforms(b, a));
                }
                for c in &names {
                    if vocab.conforms(a, b) && vocab.conforms(b, c) {
                        prop_assert!(vocab.conforms(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn printed_formulas_parse_back(seed in any::<u64>()) {
        let th = &fixture().theory;
        let gen = SyntaxGen::new(&th.vocabulary);
        let f = gen.formula(&mut ChaCha8Rng::seed_from_u64(seed), 4, &mut Vec::new());
        let text = print_formula(&f);
        let back = parse_formula(&text, &th.vocabulary, &[]).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back, f);
    }

    #[test]
    fn checker_derivations_validate(seed in any::<u64>()) {
        let fx = fixture();
        let f = sentence(seed, 4);
        if let Ok(check) = check_sentence(&fx.theory, &f) {
            if let Ok(d) = check.result {
                prop_assert!(validate_derivation(&fx.theory.vocabulary, &d).is_ok(), "{}", print_formula(&f));
            }
        }
    }

    #[test]
    fn elaboration_removes_wrappers_and_is_idempotent(seed in any::<u64>()) {
        let fx = fixture();
        let f = sentence(seed, 4);
        if f.is_intensional() {
            return Ok(());
        }
        let vocab = &fx.theory.vocabulary;
        let ctx = initial_context(vocab);
        if let Ok(e) = elaborate(vocab, &ctx, &f) {
            prop_assert!(!e.has_guards());
            prop_assert_eq!(elaborate(vocab, &ctx, &e).unwrap(), e.clone());
            let before = check_sentence(&fx.theory, &f).unwrap().is_well_typed();
            prop_assert_eq!(check_sentence(&fx.theory, &e).unwrap().is_well_typed(), before);
        }
    }

    #[test]
    fn grounding_leaves_no_intensional_constructs(seed in any::<u64>()) {
        let fx = fixture();
        let f = sentence(seed, 4);
        if let Ok(g) = ground(&f, &fx.interp) {
            prop_assert!(!g.is_intensional(), "{}", print_formula(&g));
            prop_assert_eq!(ground(&g, &fx.interp).unwrap(), g.clone());
        }
    }

    #[test]
    fn well_typed_sentences_are_two_valued_and_grounding_preserves_truth(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let fx = fixture();
        let f = sentence(seed, 4);
        let Some(elaborated) = well_typed(&f) else { return Ok(()) };
        let s = pick.get(&fx.structures);
        let model = Model::new(&fx.interp, s).unwrap();
        let v = model.holds(&f);
        prop_assert!(v.is_ok(), "{}: {:?}", print_formula(&f), v);
        prop_assert_eq!(model.holds(&elaborated).ok(), v.clone().ok());
        if f.is_intensional() {
            let g = ground(&f, &fx.interp).unwrap();
            prop_assert_eq!(model.holds(&g).ok(), v.clone().ok());
        }
        prop_assert_eq!(model.holds(&Formula::not(f.clone())).ok(), v.clone().ok().map(|b| !b));
        prop_assert_eq!(model.holds(&Formula::or(f.clone(), Formula::not(f.clone()))).ok(), Some(true));
        prop_assert_eq!(satisfies(&fx.theory, s, &f).ok(), v.ok());
    }

    #[test]
    fn structure_text_round_trips(pick in any::<prop::sample::Index>(), bound in 0u64..5) {
        let mut s = pick.get(&fixture().structures).clone();
        s.nat_bound = Some(bound);
        s.interps.retain(|name, _| name != "soundOfKind");
        let text = print_structure(&s);
        let back = parse_structure(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(print_structure(&back), text);
        prop_assert_eq!(back.types, s.types);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn found_models_are_exactly_the_satisfying_candidates(seeds in prop::collection::vec(any::<u64>(), 1..3)) {
        let axioms: Vec<Formula> = seeds.iter().map(|&s| sentence(s, 3)).filter(|f| well_typed(f).is_some()).collect();
        let prefix = RUNNING_EXAMPLE
            .lines()
            .take_while(|l| !l.trim_start().starts_with("axiom"))
            .collect::<Vec<_>>()
            .join("\n");
        let mut source = prefix.clone();
        for (i, f) in axioms.iter().enumerate() {
            source.push_str(&format!("\naxiom a{i}: {}", print_formula(f)));
        }
        let th = gosil::syntax::parse_theory(&source).map_err(|e| TestCaseError::fail(format!("{source}: {e}")))?;
        let bounds = BTreeMap::from([("Animal".to_string(), 2)]);
        let opts = ModelOptions { nat_bound: Some(0), ..ModelOptions::default() };
        let models = find_models(&th, &bounds, None, opts).unwrap();
        let empty = gosil::syntax::parse_theory(&prefix).unwrap();
        let candidates = find_models(&empty, &bounds, None, opts).unwrap();
        let mut expected = Vec::new();
        for c in &candidates {
            let mut all = true;
            for f in &axioms {
                all &= satisfies(&th, c, f).unwrap_or(false);
            }
            if all {
                expected.push(c.clone());
            }
        }
        prop_assert_eq!(models, expected);
    }
}

fn and_shortcut(f: &Formula, g: &Formula) -> Formula {
    Formula::not(Formula::or(Formula::not(f.clone()), Formula::not(g.clone())))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn shortcuts_agree_on_all_small_structures(a in any::<u64>(), b in any::<u64>()) {
        let fx = fixture();
        let (f, g) = (sentence(a, 3), sentence(b, 3));
        if well_typed(&f).is_none() || well_typed(&g).is_none() {
            return Ok(());
        }
        let quantified = match &f {
            Formula::Forall(x, t, body) => {
                Some(Formula::not(Formula::exists(x, t, Formula::not((**body).clone()))))
            }
            Formula::Exists(x, t, body) => {
                Some(Formula::not(Formula::forall(x, t, Formula::not((**body).clone()))))
            }
            _ => None,
        };
        for s in &fx.structures {
            let m = Model::new(&fx.interp, s).unwrap();
            let both = m.holds(&Formula::and(f.clone(), g.clone())).unwrap();
            prop_assert_eq!(m.holds(&and_shortcut(&f, &g)).unwrap(), both);
            if let Some(q) = &quantified {
                prop_assert_eq!(m.holds(q).unwrap(), m.holds(&f).unwrap());
            }
        }
    }

    #[test]
    fn typing_is_deterministic_and_admits_weakening(seed in any::<u64>()) {
        let fx = fixture();
        let vocab = &fx.theory.vocabulary;
        let f = sentence(seed, 4);
        if f.is_intensional() {
            return Ok(());
        }
        let ctx = initial_context(vocab);
        let first = gosil::typing::typecheck(vocab, &ctx, &f);
        prop_assert_eq!(gosil::typing::typecheck(vocab, &ctx, &f), first.clone());
        let weak = ctx.with_var("unused_variable", "Dog");
        prop_assert_eq!(gosil::typing::typecheck(vocab, &weak, &f).is_ok(), first.is_ok());
    }

    #[test]
    fn subsumption_at_argument_positions(seed in any::<u64>()) {
        let th = &fixture().theory;
        let vocab = &th.vocabulary;
        let t = SyntaxGen::new(vocab).term(&mut ChaCha8Rng::seed_from_u64(seed), 3, &[]);
        let ctx = initial_context(vocab);
        let Ok(principal) = gosil::typing::principal_type(vocab, &ctx, &t) else { return Ok(()) };
        for (p, expected) in [("makingSound", "Animal"), ("meow", "Cat"), ("bark", "Dog")] {
            let atom = Formula::atom(p, vec![t.clone()]);
            if vocab.conforms(&principal, expected) {
                prop_assert!(gosil::typing::typecheck(vocab, &ctx, &atom).is_ok(), "{}", print_formula(&atom));
            }
        }
    }
}

#[test]
fn guards_decide_the_value_when_they_fail() {
    let th = running_example();
    let interp = build_intensional_interp(&th).unwrap();
    let laws = [
        "!a[Animal]: ~Cat(a) => ~<<c: meow(a)>> & <<i: meow(a)>>",
        "!a[Animal]: ~Dog(a) => ~<<c: bark(a)>> & <<i: bark(a)>>",
        "!a[Animal]: !s[Sound]: ~<<c: $(s)(a)>> | <<i: $(s)(a)>>",
        "!a[Animal]: <<c: meow(a)>> | <<i: ~meow(a)>>",
        "!a[Animal]: Cat(a) => (<<c: meow(a)>> <=> meow(a)) & (<<i: meow(a)>> <=> meow(a))",
    ];
    let laws: Vec<Formula> = laws.iter().map(|src| formula(&th, src)).collect();
    for s in running_example_structures(&th, 3) {
        let m = Model::new(&interp, &s).unwrap();
        for law in &laws {
            assert_eq!(m.holds(law), Ok(true), "{}", print_formula(law));
        }
    }
}

#[test]
fn wrapper_free_formulas_elaborate_to_themselves() {
    let th = running_example();
    let ctx = initial_context(&th.vocabulary);
    for src in [EQ1, EQ2, EQ3, EX3] {
        let f = formula(&th, src);
        assert_eq!(elaborate(&th.vocabulary, &ctx, &f).unwrap(), f);
    }
}
