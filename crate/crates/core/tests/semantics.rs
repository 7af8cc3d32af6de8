use drs_core::logic::{apply_primitive, instantiate_schema, Const, Formula, Predicate, Rule, SchemaId, Term, Var};
use drs_core::semantics::{
    evaluate_closed, find_model, interpretations, is_model, is_tautology, valid_in, Interpretation, SemanticsError,
    TruthValue,
};
use drs_core::text::{parse, Mode};
use proptest::prelude::*;

fn p(s: &str) -> Formula {
    parse(s, Mode::Plain).unwrap()
}

fn unary(n: &str) -> Predicate {
    Predicate::plain(n, 1)
}

/// Every interpretation over predicates A, B and constants a, b with a
/// domain of one or two individuals.
fn small_interpretations() -> Vec<Interpretation> {
    let consts = [Const::new("a"), Const::new("b")];
    let preds = [unary("A"), unary("B")];
    (1..=2).flat_map(|n| interpretations(&consts, &preds, n).unwrap()).collect()
}

#[test]
fn valuation_clauses() {
    let mut i = Interpretation::new(2);
    i.assign(Const::new("a"), 0).set(unary("A"), vec![0], true).declare(unary("B"));
    assert_eq!(evaluate_closed(&i, &Formula::Falsum), Ok(TruthValue::F));
    assert_eq!(evaluate_closed(&i, &p("A(a)")), Ok(TruthValue::T));
    assert_eq!(evaluate_closed(&i, &p("forall x. A(x)")), Ok(TruthValue::F));
    assert_eq!(evaluate_closed(&i, &p("exists x. A(x)")), Ok(TruthValue::T));
    assert_eq!(evaluate_closed(&i, &p("A(a) & ~B(a)")), Ok(TruthValue::T));
    assert!(matches!(evaluate_closed(&i, &p("A(x)")), Err(SemanticsError::NotClosed(_))));
    assert!(matches!(evaluate_closed(&i, &p("C(a)")), Err(SemanticsError::UnknownSymbol(_))));
    assert!(matches!(evaluate_closed(&i, &p("A(c)")), Err(SemanticsError::UnknownSymbol(_))));
    i.set(unary("A"), vec![1], true);
    assert_eq!(evaluate_closed(&i, &p("forall x. A(x)")), Ok(TruthValue::T));
}

#[test]
fn domain_names_denote_themselves() {
    let mut i = Interpretation::new(3);
    i.set(unary("A"), vec![2], true);
    let named = Formula::atom(unary("A"), vec![Term::Const(Interpretation::name(2))]).unwrap();
    assert_eq!(evaluate_closed(&i, &named), Ok(TruthValue::T));
    let out_of_range = Formula::atom(unary("A"), vec![Term::Const(Interpretation::name(3))]).unwrap();
    assert!(evaluate_closed(&i, &out_of_range).is_err());
}

#[test]
fn validity_and_models() {
    let mut i = Interpretation::new(2);
    i.declare(unary("A"));
    assert!(!valid_in(&i, &p("A(x)")).unwrap());
    assert!(valid_in(&i, &p("A(x) -> A(x)")).unwrap());
    assert!(is_model(&i, &[]).unwrap());
    let bad = [p("A(a)"), p("forall x. (A(x) -> B(x))"), p("~B(a)")];
    for i in small_interpretations() {
        assert!(valid_in(&i, &p("A(x) -> A(x)")).unwrap());
        assert!(!is_model(&i, &bad).unwrap());
    }
}

#[test]
fn taxonomy_has_its_natural_model() {
    let inputs = [
        "forall x. (S(x) -> TL(x))",
        "forall x. (E(x) -> TL(x))",
        "forall x. (CS(x) -> S(x))",
        "forall x. (CS(x) -> E(x))",
        "forall x. ~(E(x) & H(x))",
        "S(Doc1)",
        "AI(Doc2)",
    ];
    let mut i = Interpretation::new(2);
    i.assign(Const::new("Doc1"), 0).assign(Const::new("Doc2"), 1);
    for (cat, docs) in
        [("TL", vec![0, 1]), ("S", vec![0, 1]), ("E", vec![1]), ("CS", vec![1]), ("AI", vec![1]), ("H", vec![])]
    {
        i.declare(unary(cat));
        for d in docs {
            i.set(unary(cat), vec![d], true);
        }
    }
    let fs: Vec<Formula> = inputs.iter().map(|s| p(s)).collect();
    assert!(is_model(&i, &fs).unwrap());
}

#[test]
fn model_search_examples() {
    let m = find_model(&[p("A(a)"), p("forall x. (A(x) -> B(x))")], 3).unwrap().unwrap();
    assert_eq!(m.domain_size(), 1);
    assert_eq!(m.extension(&unary("A")).unwrap().len(), 1);
    assert_eq!(m.extension(&unary("B")).unwrap().len(), 1);
    assert_eq!(find_model(&[p("A(a)"), p("~A(a)")], 4), Ok(None));
    assert_eq!(find_model(&[], 1).unwrap().unwrap().domain_size(), 1);
    let m = find_model(&[p("A(a)"), p("~A(b)")], 3).unwrap().unwrap();
    assert_eq!(m.domain_size(), 2);
    assert!(matches!(find_model(&[], 9), Err(SemanticsError::BoundTooLarge(_))));
    assert!(matches!(find_model(&[p("R(a, b)")], 2), Err(SemanticsError::BoundTooLarge(_))));
}

#[test]
fn tautology_examples() {
    let s1 = instantiate_schema(SchemaId::S1, &[p("A(a)"), p("B(b)")], None, None).unwrap();
    assert!(is_tautology(&s1).unwrap());
    assert!(!is_tautology(&p("A(a)")).unwrap());
    assert!(is_tautology(&p("false -> A(a)")).unwrap());
    assert!(is_tautology(&p("(forall x. A(x)) | ~(forall x. A(x))")).unwrap());
    assert!(!is_tautology(&p("(forall x. A(x)) -> A(a)")).unwrap(), "quantified formulas are opaque letters");
    let wide = (0..21).map(|i| format!("A{i}(a)")).collect::<Vec<_>>().join(" & ");
    assert_eq!(is_tautology(&p(&wide)), Err(SemanticsError::TooManyLetters(21)));
}

fn small_formula() -> impl Strategy<Value = Formula> {
    let atom = (prop::sample::select(vec!["A", "B"]), prop::sample::select(vec!["x", "a", "b"])).prop_map(|(q, t)| {
        let term = if t == "x" { Term::var(t) } else { Term::constant(t) };
        Formula::atom(unary(q), vec![term]).unwrap()
    });
    prop_oneof![1 => Just(Formula::Falsum), 5 => atom].prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            inner.prop_map(|b| Formula::forall(Var::new("x"), b)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn sugar_has_its_intended_meaning(a in small_formula(), b in small_formula()) {
        let (a, b) = (close(a), close(b));
        for i in small_interpretations() {
            let va = evaluate_closed(&i, &a).unwrap().is_true();
            let vb = evaluate_closed(&i, &b).unwrap().is_true();
            let and = evaluate_closed(&i, &Formula::and(a.clone(), b.clone()).expand_sugar()).unwrap().is_true();
            let or = evaluate_closed(&i, &Formula::or(a.clone(), b.clone()).expand_sugar()).unwrap().is_true();
            let iff = evaluate_closed(&i, &Formula::iff(a.clone(), b.clone()).expand_sugar()).unwrap().is_true();
            prop_assert_eq!(and, va && vb);
            prop_assert_eq!(or, va || vb);
            prop_assert_eq!(iff, va == vb);
        }
    }

    #[test]
    fn constants_and_their_denotations_agree(f in small_formula()) {
        let x = Var::new("x");
        for i in small_interpretations() {
            let d = i.constant(&Const::new("a")).unwrap();
            let by_constant = f.substitute_one(&x, &Term::constant("a"));
            let by_name = f.substitute_one(&x, &Term::Const(Interpretation::name(d)));
            if let (Ok(c), Ok(n)) = (by_constant, by_name) {
                prop_assert_eq!(valid_in(&i, &c).unwrap(), valid_in(&i, &n).unwrap());
            }
        }
    }

    #[test]
    fn primitive_rules_preserve_validity(a in small_formula(), b in small_formula()) {
        let imp = Formula::implies(a.clone(), b.clone());
        let mp = apply_primitive(Rule::ModusPonens, &[a.clone(), imp.clone()], None).unwrap();
        let gen = apply_primitive(Rule::Generalization, std::slice::from_ref(&a), Some(&Var::new("x"))).unwrap();
        for i in small_interpretations() {
            if valid_in(&i, &a).unwrap() && valid_in(&i, &imp).unwrap() {
                prop_assert!(valid_in(&i, &mp).unwrap());
            }
            if valid_in(&i, &a).unwrap() {
                prop_assert!(valid_in(&i, &gen).unwrap());
            }
        }
    }

    #[test]
    fn model_search_agrees_with_enumeration(fs in prop::collection::vec(small_formula(), 0..4)) {
        let found = find_model(&fs, 2).unwrap();
        let exists = small_interpretations().iter().any(|i| is_model(i, &fs).unwrap());
        if let Some(m) = &found {
            prop_assert!(is_model(m, &fs).unwrap());
        }
        prop_assert_eq!(found.is_some(), exists);
    }
}

fn close(f: Formula) -> Formula {
    if f.is_closed() {
        f
    } else {
        Formula::forall(Var::new("x"), f)
    }
}
