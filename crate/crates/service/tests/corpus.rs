use drs_service::Mode;
use drs_verify::{run_corpus, soundness, CorpusReport};

fn assert_clean(r: &CorpusReport) {
    for (name, v) in [
        ("graph", &r.graph),
        ("saliency", &r.saliency),
        ("consistency", &r.consistency),
        ("normality", &r.normality),
        ("rejection", &r.rejection),
    ] {
        assert!(v.is_empty(), "{name}: {} violations, first: {}", v.len(), v[0]);
    }
}

#[test]
fn taxonomy_corpus_satisfies_every_oracle() {
    let r = run_corpus(7, Mode::Dma, 150);
    assert_clean(&r);
    assert!(r.revisions > 0 && r.rejected > 0);
}

#[test]
fn inheritance_corpus_satisfies_every_oracle() {
    let r = run_corpus(11, Mode::Mis, 150);
    assert_clean(&r);
    assert!(r.revisions > 0 && r.rejected > 0);
}

#[test]
fn rules_and_schemas_are_sound() {
    let r = soundness(3, 40);
    assert!(r.counterexamples.is_empty(), "{:?}", r.counterexamples);
}

#[test]
fn graph_oracle_catches_loops_and_shortcuts() {
    use drs_core::graph::{Link, LinkGraph, LinkKind, Node};
    use drs_core::logic::Predicate;
    let c = |n: &str| Node::Class(Predicate::plain(n, 1));
    let mut g = LinkGraph::new();
    for (a, b) in [("A", "B"), ("B", "C")] {
        g.add_node(c(a));
        g.add_node(c(b));
        g.add_link(Link::new(LinkKind::Subclass, c(a), c(b)));
    }
    assert!(drs_verify::graph_violations(&g).is_empty());
    g.add_link(Link::new(LinkKind::Subclass, c("A"), c("C")));
    assert_eq!(drs_verify::graph_violations(&g).len(), 1);
    g.add_link(Link::new(LinkKind::Subclass, c("C"), c("A")));
    assert_eq!(drs_verify::graph_violations(&g), ["path graph has a cycle"]);
}

#[test]
fn fixpoint_oracles_agree_with_the_fixtures() {
    for name in ["taxonomy", "taxonomy_retract_rule", "birds", "nixon_revised"] {
        let s = drs_verify::load(name);
        let expected = match s.mode() {
            Mode::Dma => drs_verify::dma_fixpoint(s.beliefs()),
            Mode::Mis => drs_verify::mis_fixpoint(s.beliefs()),
        };
        assert_eq!(expected, drs_verify::active_literals(s.beliefs()), "{name}");
        assert!(drs_verify::consistency_violations(&s).is_empty(), "{name}");
    }
    let birds = drs_verify::mis_fixpoint(drs_verify::load("birds").beliefs());
    assert!(birds.contains(&("CanFly^p".into(), "Opus".into(), true)));
    assert!(!birds.contains(&("CanFly^p".into(), "Opus".into(), false)), "the specific rule wins");
}

#[test]
fn consistency_oracle_sees_open_conflicts() {
    let s = drs_verify::load("taxonomy_conflict");
    assert!(!drs_verify::consistency_violations(&s).is_empty());
    let nixon = drs_verify::load("nixon");
    let v = drs_verify::consistency_violations(&nixon);
    assert!(v.iter().any(|m| m.contains("negation")), "{v:?}");
}
