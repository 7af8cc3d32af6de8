//! Fixtures, the random session corpus and the oracles run over it.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use drs_core::belief::{BeliefSet, Origin};
use drs_core::controller::Step;
use drs_core::graph::{LinkGraph, Node};
use drs_core::logic::{
    apply_derived, apply_primitive, instantiate_schema, Const, Formula, Predicate, PredicateKind, Rule, SchemaId,
    Shape, Term, Var,
};
use drs_core::semantics::{find_model, interpretations, is_tautology, valid_in, Interpretation};
use drs_service::{Mode, Session, SessionError, SessionFile};
use petgraph::algo::{has_path_connecting, is_cyclic_directed};
use petgraph::graph::DiGraph;
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

pub const FIXTURES: [&str; 7] = [
    "taxonomy",
    "taxonomy_conflict",
    "taxonomy_retract_input",
    "taxonomy_retract_rule",
    "birds",
    "nixon",
    "nixon_revised",
];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> SessionFile {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    SessionFile::from_json(&text).unwrap()
}

pub fn load(name: &str) -> Session {
    Session::from_file(&fixture(name)).unwrap()
}

/// Everything an observer can see of a session, in comparable form.
pub fn observable(s: &Session) -> String {
    let mut out = format!("mode {} auto {}\n", s.mode(), s.auto_choose());
    for e in s.beliefs().entries() {
        out += &format!("{} {} {:?}\n", e.index(), e.formula(), e.label());
    }
    out += &format!("clock {}\n", s.beliefs().clock());
    out += &format!("symbols {:?}\n", s.beliefs().symbols().symbols());
    out += &format!(
        "nodes {:?}\nlinks {:?}\n",
        s.graph().nodes().collect::<Vec<_>>(),
        s.graph().links().collect::<Vec<_>>()
    );
    out += &format!("pending {:?}\n", s.pending());
    out
}

// ---------------------------------------------------------------------------
// Random corpus

#[derive(Debug, Default)]
pub struct CorpusReport {
    pub sequences: usize,
    pub checkpoints: usize,
    pub revisions: usize,
    pub rejected: usize,
    /// Acyclicity and transitive reduction of the path graph.
    pub graph: Vec<String>,
    /// Active ground literals against the naive fixpoint.
    pub saliency: Vec<String>,
    /// Model existence and absence of complementary literals.
    pub consistency: Vec<String>,
    /// Active derived entries resting on disbelieved premises.
    pub normality: Vec<String>,
    /// Rejected operations must not change anything.
    pub rejection: Vec<String>,
}

impl CorpusReport {
    pub fn absorb(&mut self, other: CorpusReport) {
        self.sequences += other.sequences;
        self.checkpoints += other.checkpoints;
        self.revisions += other.revisions;
        self.rejected += other.rejected;
        self.graph.extend(other.graph);
        self.saliency.extend(other.saliency);
        self.consistency.extend(other.consistency);
        self.normality.extend(other.normality);
        self.rejection.extend(other.rejection);
    }
}

const CONSTANTS: [&str; 5] = ["a", "b", "c", "d", "e"];
const MAX_PROPERTY_RULES: usize = 8;

/// One random input in the controller's language.
fn random_input(rng: &mut StdRng, mode: Mode, classes: usize, props: usize, property_rules: &mut usize) -> String {
    let c = |rng: &mut StdRng| rng.random_range(0..classes);
    let k = CONSTANTS[..rng.random_range(1..=CONSTANTS.len())].choose(rng).unwrap().to_string();
    match mode {
        Mode::Dma => match rng.random_range(0..10) {
            0..=3 => format!("C{}({k})", c(rng)),
            4..=8 => format!("forall x. (C{}(x) -> C{}(x))", c(rng), c(rng)),
            _ => format!("forall x. ~(C{}(x) & C{}(x))", c(rng), c(rng)),
        },
        Mode::Mis => {
            let roll = rng.random_range(0..10);
            if roll >= 7 && *property_rules < MAX_PROPERTY_RULES {
                *property_rules += 1;
                let neg = if rng.random_bool(0.5) { "~" } else { "" };
                format!("forall x. (K{}^k(x) -> {neg}P{}^p(x))", c(rng), rng.random_range(0..props))
            } else if roll < 3 {
                format!("K{}^k({k})", c(rng))
            } else {
                format!("forall x. (K{}^k(x) -> K{}^k(x))", c(rng), c(rng))
            }
        }
    }
}

/// Runs `count` random sequences in `mode` and checks every oracle after
/// every terminated process.
pub fn run_corpus(seed: u64, mode: Mode, count: usize) -> CorpusReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut report = CorpusReport::default();
    for seq in 0..count {
        let classes = rng.random_range(2..=8);
        let props = rng.random_range(1..=3);
        let auto = rng.random_bool(0.5);
        let mut s = Session::new(mode, auto);
        let mut property_rules = 0;
        let len = rng.random_range(3..=16);
        for step in 0..len {
            let tag = format!("{mode} seq {seq} step {step}");
            let before = observable(&s);
            let seen = s.events().len();
            let result = if step > 2 && rng.random_bool(0.1) {
                let axioms: Vec<u32> = s.beliefs().active().filter(|e| e.is_axiom()).map(|e| e.index()).collect();
                match axioms.choose(&mut rng) {
                    Some(&i) => s.retract(i),
                    None => continue,
                }
            } else {
                let text = random_input(&mut rng, mode, classes, props, &mut property_rules);
                s.submit(&text)
            };
            let mut pending = match result {
                Ok(r) => r.is_pending(),
                Err(SessionError::Controller(_)) => {
                    report.rejected += 1;
                    if observable(&s) != before {
                        report.rejection.push(format!("{tag}: rejected operation changed the session"));
                    }
                    continue;
                }
                Err(e) => panic!("{tag}: generator produced an unparsable input: {e}"),
            };
            while pending {
                let culprits: Vec<u32> = s.pending().unwrap().culprits.iter().map(|c| c.index).collect();
                let mut chosen: BTreeSet<u32> = culprits.iter().copied().filter(|_| rng.random_bool(0.3)).collect();
                chosen.insert(*culprits.choose(&mut rng).unwrap());
                let r = s.choose(&chosen).unwrap_or_else(|e| panic!("{tag}: choice {chosen:?} rejected: {e}"));
                pending = r.is_pending();
                report
                    .normality
                    .extend(orphans(s.beliefs()).into_iter().map(|i| format!("{tag}: orphan {i} after revision")));
            }
            report.revisions += s.events()[seen..]
                .iter()
                .flat_map(|r| &r.steps)
                .filter(|st| matches!(st, Step::Revised { .. }))
                .count();
            report.checkpoints += 1;
            check(&s, &tag, &mut report);
        }
        report.sequences += 1;
    }
    report
}

fn check(s: &Session, tag: &str, report: &mut CorpusReport) {
    report.graph.extend(graph_violations(s.graph()).into_iter().map(|v| format!("{tag}: {v}")));
    let (expected, actual) = match s.mode() {
        Mode::Dma => (dma_fixpoint(s.beliefs()), active_literals(s.beliefs())),
        Mode::Mis => (mis_fixpoint(s.beliefs()), active_literals(s.beliefs())),
    };
    if expected != actual {
        let missing: Vec<_> = expected.difference(&actual).collect();
        let extra: Vec<_> = actual.difference(&expected).collect();
        report.saliency.push(format!("{tag}: missing {missing:?}, unexpected {extra:?}"));
    }
    report.consistency.extend(consistency_violations(s).into_iter().map(|v| format!("{tag}: {v}")));
    report.normality.extend(orphans(s.beliefs()).into_iter().map(|i| format!("{tag}: orphan {i}")));
}

/// Cycles and redundant links among path links, checked with petgraph.
pub fn graph_violations(g: &LinkGraph) -> Vec<String> {
    let path: Vec<(Node, Node)> =
        g.links().filter(|l| l.kind.is_path()).map(|l| (l.from.clone(), l.to.clone())).collect();
    let ids: BTreeMap<&Node, usize> = path
        .iter()
        .flat_map(|(a, b)| [a, b])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, n)| (n, i))
        .collect();
    let build = |skip: Option<usize>| {
        let mut dg = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..ids.len()).map(|_| dg.add_node(())).collect();
        for (i, (a, b)) in path.iter().enumerate() {
            if Some(i) != skip {
                dg.add_edge(nodes[ids[a]], nodes[ids[b]], ());
            }
        }
        (dg, nodes)
    };
    let mut out = Vec::new();
    let (full, _) = build(None);
    if is_cyclic_directed(&full) {
        out.push("path graph has a cycle".to_string());
        return out;
    }
    for (i, (a, b)) in path.iter().enumerate() {
        let (dg, nodes) = build(Some(i));
        if has_path_connecting(&dg, nodes[ids[a]], nodes[ids[b]], None) {
            out.push(format!("link {a} -> {b} is implied by another path"));
        }
    }
    out
}

/// (predicate, constant, negated), occurrence indexes dropped.
type Literal = (String, String, bool);

pub fn active_literals(bs: &BeliefSet) -> BTreeSet<Literal> {
    bs.active()
        .filter_map(|e| match e.shape() {
            Shape::GroundLiteral { predicate, constant, negated, .. } => {
                Some((predicate.to_string(), constant.to_string(), *negated))
            }
            _ => None,
        })
        .collect()
}

struct Axioms {
    members: BTreeSet<(String, String)>,
    subs: BTreeSet<(String, String)>,
    /// (class, property, negated)
    props: BTreeSet<(String, String, bool)>,
}

fn axioms(bs: &BeliefSet) -> Axioms {
    let mut ax = Axioms { members: BTreeSet::new(), subs: BTreeSet::new(), props: BTreeSet::new() };
    for e in bs.active().filter(|e| e.is_axiom()) {
        match e.shape() {
            Shape::GroundLiteral { predicate, constant, negated: false, .. } => {
                ax.members.insert((predicate.to_string(), constant.to_string()));
            }
            Shape::UniversalImplication { antecedent, consequent, negated, .. } => {
                if consequent.predicate_kind() == PredicateKind::Property {
                    ax.props.insert((antecedent.to_string(), consequent.to_string(), *negated));
                } else {
                    ax.subs.insert((antecedent.to_string(), consequent.to_string()));
                }
            }
            _ => {}
        }
    }
    ax
}

/// Reflexive-transitive closure of the subclass relation, computed naively.
fn above(subs: &BTreeSet<(String, String)>, classes: impl Iterator<Item = String>) -> BTreeSet<(String, String)> {
    let mut reach: BTreeSet<(String, String)> = classes.map(|c| (c.clone(), c)).collect();
    reach.extend(subs.iter().cloned());
    loop {
        let next: BTreeSet<_> = reach
            .iter()
            .flat_map(|(a, b)| reach.iter().filter(move |(c, _)| c == b).map(move |(_, d)| (a.clone(), d.clone())))
            .collect();
        if next.is_subset(&reach) {
            return reach;
        }
        reach.extend(next);
    }
}

fn memberships(ax: &Axioms) -> BTreeSet<(String, String)> {
    let classes =
        ax.members.iter().map(|(c, _)| c.clone()).chain(ax.subs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]));
    let reach = above(&ax.subs, classes);
    ax.members
        .iter()
        .flat_map(|(c, k)| reach.iter().filter(move |(a, _)| a == c).map(move |(_, b)| (b.clone(), k.clone())))
        .collect()
}

pub fn dma_fixpoint(bs: &BeliefSet) -> BTreeSet<Literal> {
    memberships(&axioms(bs)).into_iter().map(|(c, k)| (c, k, false)).collect()
}

/// Kind memberships, plus every property an object inherits from a kind
/// unless an opposite rule on a strictly lower kind of the object applies.
pub fn mis_fixpoint(bs: &BeliefSet) -> BTreeSet<Literal> {
    let ax = axioms(bs);
    let member = memberships(&ax);
    let classes = ax
        .members
        .iter()
        .map(|(c, _)| c.clone())
        .chain(ax.subs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]))
        .chain(ax.props.iter().map(|(k, _, _)| k.clone()));
    let reach = above(&ax.subs, classes);
    let objects: BTreeSet<&String> = member.iter().map(|(_, o)| o).collect();
    let mut out: BTreeSet<Literal> = member.iter().map(|(c, o)| (c.clone(), o.clone(), false)).collect();
    for o in objects {
        let has = |k: &String| member.contains(&(k.clone(), o.clone()));
        for (k, p, neg) in ax.props.iter().filter(|(k, _, _)| has(k)) {
            let blocked = ax.props.iter().any(|(k2, p2, neg2)| {
                p2 == p && neg2 != neg && k2 != k && has(k2) && reach.contains(&(k2.clone(), k.clone()))
            });
            if !blocked {
                out.insert((p.clone(), o.clone(), *neg));
            }
        }
    }
    out
}

/// Renames indexed property predicates apart so occurrences are distinct symbols.
fn model_formula(shape: &Shape) -> Option<Formula> {
    let rename = |p: &Predicate, occ: Option<u32>| match (p.predicate_kind(), occ) {
        (PredicateKind::Property, Some(n)) => Predicate::plain(format!("{}_{n}", p.name()), 1),
        _ => Predicate::plain(p.name(), 1),
    };
    let neg = |f: Formula, n: bool| if n { Formula::not(f) } else { f };
    match shape {
        Shape::GroundLiteral { predicate, constant, negated, occurrence } => {
            Some(neg(Formula::ground(rename(predicate, *occurrence), constant.clone()).unwrap(), *negated))
        }
        Shape::UniversalImplication { var, antecedent, consequent, negated, occurrence } => {
            let at = |p: Predicate| Formula::atom(p, vec![Term::Var(var.clone())]).unwrap();
            Some(Formula::forall(
                var.clone(),
                Formula::implies(at(rename(antecedent, None)), neg(at(rename(consequent, *occurrence)), *negated)),
            ))
        }
        _ => None,
    }
}

pub fn consistency_violations(s: &Session) -> Vec<String> {
    let bs = s.beliefs();
    let mut out = Vec::new();
    let lits = active_literals(bs);
    for (p, c, neg) in &lits {
        if !neg && lits.contains(&(p.clone(), c.clone(), true)) {
            out.push(format!("{p}({c}) and its negation are both active"));
        }
    }
    let formulas: Vec<Formula> = match s.mode() {
        Mode::Dma => bs.active().map(|e| e.formula().clone()).collect(),
        Mode::Mis => bs.active().filter_map(|e| model_formula(e.shape())).collect(),
    };
    let constants: BTreeSet<Const> = formulas.iter().flat_map(Formula::constants).collect();
    match find_model(&formulas, constants.len() + 1) {
        Ok(Some(_)) => {}
        Ok(None) => out.push(format!("no model within {} individuals", constants.len() + 1)),
        Err(e) => out.push(format!("model search failed: {e}")),
    }
    out
}

/// Active derived entries with a disbelieved premise, found by scanning from-lists.
pub fn orphans(bs: &BeliefSet) -> Vec<u32> {
    bs.active()
        .filter(|e| match &e.label().from {
            Origin::Derived { premises, .. } => premises.iter().any(|p| !bs.is_active(*p)),
            Origin::External { .. } => false,
        })
        .map(|e| e.index())
        .collect()
}

// ---------------------------------------------------------------------------
// Soundness

const PREDS: [&str; 3] = ["A", "B", "C"];

fn unary(n: &str) -> Predicate {
    Predicate::plain(n, 1)
}

fn random_term(rng: &mut StdRng, allow_var: bool) -> Term {
    match rng.random_range(0..if allow_var { 3 } else { 2 }) {
        0 => Term::constant("a"),
        1 => Term::constant("b"),
        _ => Term::var("x"),
    }
}

pub fn random_atom(rng: &mut StdRng, allow_var: bool) -> Formula {
    Formula::atom(unary(PREDS.choose(rng).unwrap()), vec![random_term(rng, allow_var)]).unwrap()
}

pub fn random_formula(rng: &mut StdRng, depth: u32, allow_var: bool) -> Formula {
    if depth == 0 || rng.random_bool(0.3) {
        return if rng.random_bool(0.1) { Formula::Falsum } else { random_atom(rng, allow_var) };
    }
    let sub = |rng: &mut StdRng| random_formula(rng, depth - 1, allow_var);
    match rng.random_range(0..6) {
        0 => Formula::not(sub(rng)),
        1 => Formula::implies(sub(rng), sub(rng)),
        2 => Formula::and(sub(rng), sub(rng)),
        3 => Formula::or(sub(rng), sub(rng)),
        4 if allow_var => Formula::forall(Var::new("x"), sub(rng)),
        _ => Formula::iff(sub(rng), sub(rng)),
    }
}

/// All interpretations of A, B, C and a, b over one or two individuals.
pub fn small_interpretations() -> Vec<Interpretation> {
    let consts = [Const::new("a"), Const::new("b")];
    let preds: Vec<Predicate> = PREDS.iter().map(|p| unary(p)).collect();
    (1..=2).flat_map(|n| interpretations(&consts, &preds, n).unwrap()).collect()
}

/// Whether every interpretation validating all premises validates all conclusions.
fn preserves(world: &[Interpretation], premises: &[Formula], conclusions: &[Formula]) -> bool {
    world.iter().all(|i| {
        !premises.iter().all(|p| valid_in(i, p).unwrap()) || conclusions.iter().all(|c| valid_in(i, c).unwrap())
    })
}

fn random_rule_application(rng: &mut StdRng) -> (Rule, Vec<Formula>) {
    let x = Var::new("x");
    let at = |p: &str, t: Term| Formula::atom(unary(p), vec![t]).unwrap();
    let pick = |rng: &mut StdRng| *PREDS.choose(rng).unwrap();
    let konst = |rng: &mut StdRng| random_term(rng, false);
    let rule = *[
        Rule::HypotheticalSyllogism,
        Rule::AristotelianSyllogism,
        Rule::Subsumption,
        Rule::AndIntro,
        Rule::AndElim,
        Rule::ConflictDetection,
        Rule::ContradictionDetection,
    ]
    .choose(rng)
    .unwrap();
    let f = |rng: &mut StdRng| random_formula(rng, 2, false);
    let premises = match rule {
        Rule::HypotheticalSyllogism => {
            let (a, b, c) = (f(rng), f(rng), f(rng));
            vec![Formula::implies(a, b.clone()), Formula::implies(b, c)]
        }
        Rule::AristotelianSyllogism => {
            let (p, q, k) = (pick(rng), pick(rng), konst(rng));
            let head = at(q, Term::Var(x.clone()));
            let head = if rng.random_bool(0.5) { Formula::not(head) } else { head };
            vec![Formula::forall(x.clone(), Formula::implies(at(p, Term::Var(x.clone())), head)), at(p, k)]
        }
        Rule::Subsumption => {
            let (p, q, r) = (pick(rng), pick(rng), pick(rng));
            let imp = |a: &str, b: &str| {
                Formula::forall(x.clone(), Formula::implies(at(a, Term::Var(x.clone())), at(b, Term::Var(x.clone()))))
            };
            vec![imp(p, q), imp(q, r)]
        }
        Rule::AndIntro => vec![f(rng), f(rng)],
        Rule::AndElim => vec![Formula::and(f(rng), f(rng))],
        Rule::ConflictDetection => {
            let (p, q, k) = (pick(rng), pick(rng), konst(rng));
            let both = Formula::and(at(p, Term::Var(x.clone())), at(q, Term::Var(x.clone())));
            vec![Formula::forall(x.clone(), Formula::not(both)), at(p, k.clone()), at(q, k)]
        }
        _ => {
            let a = random_atom(rng, false);
            vec![a.clone(), Formula::not(a)]
        }
    };
    (rule, premises)
}

#[derive(Debug, Default)]
pub struct SoundnessReport {
    pub tautologies: usize,
    pub quantifier_instances: usize,
    pub rule_applications: usize,
    pub counterexamples: Vec<String>,
}

pub fn soundness(seed: u64, per_kind: usize) -> SoundnessReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let world = small_interpretations();
    let mut r = SoundnessReport::default();
    let x = Var::new("x");
    for schema in [SchemaId::S1, SchemaId::S2, SchemaId::S3, SchemaId::S4] {
        for _ in 0..per_kind {
            let args: Vec<Formula> = (0..schema.formula_count()).map(|_| random_formula(&mut rng, 3, true)).collect();
            let inst = instantiate_schema(schema, &args, None, None).unwrap();
            r.tautologies += 1;
            if !is_tautology(&inst).unwrap() {
                r.counterexamples.push(format!("{schema:?} instance {inst} is not a tautology"));
            }
        }
    }
    for schema in [SchemaId::S5, SchemaId::S6] {
        let mut made = 0;
        while made < per_kind {
            let inst = match schema {
                SchemaId::S5 => {
                    let t = if rng.random_bool(0.2) { Term::var("y") } else { random_term(&mut rng, false) };
                    instantiate_schema(schema, &[random_formula(&mut rng, 3, true)], Some(&x), Some(&t))
                }
                _ => {
                    let a = random_formula(&mut rng, 2, false);
                    instantiate_schema(schema, &[a, random_formula(&mut rng, 3, true)], Some(&x), None)
                }
            };
            let Ok(inst) = inst else { continue };
            made += 1;
            r.quantifier_instances += 1;
            if !preserves(&world, &[], std::slice::from_ref(&inst)) {
                r.counterexamples.push(format!("{schema:?} instance {inst} fails in a small interpretation"));
            }
        }
    }
    for _ in 0..per_kind {
        let (rule, premises) = random_rule_application(&mut rng);
        r.rule_applications += 1;
        match apply_derived(rule, &premises) {
            Ok(conclusions) => {
                if !preserves(&world, &premises, &conclusions) {
                    r.counterexamples.push(format!("{rule} from {premises:?} is not validity preserving"));
                }
            }
            Err(e) => r.counterexamples.push(format!("{rule} refused well-shaped premises: {e}")),
        }
        let a = random_formula(&mut rng, 2, true);
        let b = random_formula(&mut rng, 2, true);
        let imp = Formula::implies(a.clone(), b);
        let mp = apply_primitive(Rule::ModusPonens, &[a.clone(), imp.clone()], None).unwrap();
        let gen = apply_primitive(Rule::Generalization, std::slice::from_ref(&a), Some(&x)).unwrap();
        r.rule_applications += 2;
        if !preserves(&world, &[a.clone(), imp], &[mp]) || !preserves(&world, &[a], &[gen]) {
            r.counterexamples.push("a primitive rule application is not validity preserving".into());
        }
    }
    r
}
