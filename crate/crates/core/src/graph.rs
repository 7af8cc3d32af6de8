//! Typed node/link graphs shared by both controllers.
//!
//! Element, subclass, object-kind and subkind links form the "path" digraph
//! (child to parent). Disjoint and has-property links hang off it and never
//! take part in paths.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use indexmap::IndexSet;

use crate::logic::{Const, Predicate};

/// A property occurrence in an inheritance hierarchy.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropertyNode {
    pub predicate: Predicate,
    pub negated: bool,
    pub occurrence: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    /// A document or an object.
    Individual(Const),
    /// A category or a kind.
    Class(Predicate),
    Property(PropertyNode),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Individual(c) => c.fmt(f),
            Node::Class(p) => p.fmt(f),
            Node::Property(p) => {
                if p.negated {
                    f.write_str("~")?;
                }
                write!(f, "{}#{}", p.predicate, p.occurrence)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinkKind {
    Element,
    Subclass,
    Disjoint,
    ObjectKind,
    Subkind,
    HasProperty,
}

impl LinkKind {
    pub fn is_path(self) -> bool {
        matches!(self, LinkKind::Element | LinkKind::Subclass | LinkKind::ObjectKind | LinkKind::Subkind)
    }

    pub fn name(self) -> &'static str {
        match self {
            LinkKind::Element => "element",
            LinkKind::Subclass => "subclass",
            LinkKind::Disjoint => "disjoint",
            LinkKind::ObjectKind => "object-kind",
            LinkKind::Subkind => "subkind",
            LinkKind::HasProperty => "has-property",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    pub kind: LinkKind,
    pub from: Node,
    pub to: Node,
}

impl Link {
    pub fn new(kind: LinkKind, from: Node, to: Node) -> Self {
        if kind == LinkKind::Disjoint && to < from {
            return Link { kind, from: to, to: from };
        }
        Link { kind, from, to }
    }

    pub fn touches(&self, n: &Node) -> bool {
        &self.from == n || &self.to == n
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}, {})", self.kind.name(), self.from, self.to)
    }
}

/// Nodes and links kept in creation order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkGraph {
    nodes: IndexSet<Node>,
    links: IndexSet<Link>,
}

impl LinkGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter()
    }

    pub fn links(&self) -> impl Iterator<Item = &Link> {
        self.links.iter()
    }

    pub fn links_of(&self, kind: LinkKind) -> impl Iterator<Item = &Link> {
        self.links.iter().filter(move |l| l.kind == kind)
    }

    pub fn contains_node(&self, n: &Node) -> bool {
        self.nodes.contains(n)
    }

    pub fn contains_link(&self, l: &Link) -> bool {
        self.links.contains(l)
    }

    pub fn add_node(&mut self, n: Node) -> bool {
        self.nodes.insert(n)
    }

    pub fn remove_node(&mut self, n: &Node) -> bool {
        self.nodes.shift_remove(n)
    }

    pub fn add_link(&mut self, l: Link) -> bool {
        self.links.insert(l)
    }

    pub fn remove_link(&mut self, l: &Link) -> bool {
        self.links.shift_remove(l)
    }

    /// Whether `n` has any link to a node other than `except`.
    pub fn connected_elsewhere(&self, n: &Node, except: &Node) -> bool {
        self.links.iter().any(|l| (&l.from == n && &l.to != except) || (&l.to == n && &l.from != except))
    }

    /// Direct parents of `n` through path links.
    pub fn parents<'a>(&'a self, n: &'a Node) -> impl Iterator<Item = &'a Node> + 'a {
        self.links.iter().filter(move |l| l.kind.is_path() && &l.from == n).map(|l| &l.to)
    }

    /// Direct children of `n` through path links, in link-creation order.
    pub fn children<'a>(&'a self, n: &'a Node) -> impl Iterator<Item = &'a Node> + 'a {
        self.links.iter().filter(move |l| l.kind.is_path() && &l.to == n).map(|l| &l.from)
    }

    /// Nodes reachable from `n` through one or more path links.
    pub fn ancestors(&self, n: &Node) -> BTreeSet<Node> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&Node> = self.parents(n).collect();
        while let Some(m) = stack.pop() {
            if seen.insert(m.clone()) {
                stack.extend(self.parents(m));
            }
        }
        seen
    }

    /// Path from `from` to `to` of length zero or more.
    pub fn reaches(&self, from: &Node, to: &Node) -> bool {
        from == to || self.ancestors(from).contains(to)
    }

    /// Adding `(u, v)` would close a cycle.
    pub fn would_create_loop(&self, u: &Node, v: &Node) -> bool {
        self.reaches(v, u)
    }

    /// `v` is already reachable from `u`, so a direct link would be
    /// redundant (or a duplicate of an existing parent link).
    pub fn would_create_redundant_path(&self, u: &Node, v: &Node) -> bool {
        u != v && self.ancestors(u).contains(v)
    }

    /// Adding `(u, v)` would give some existing path link a second route,
    /// leaving that link redundant.
    pub fn would_make_existing_redundant(&self, u: &Node, v: &Node) -> bool {
        self.links
            .iter()
            .filter(|l| l.kind.is_path())
            .any(|l| !(l.from == *u && l.to == *v) && self.reaches(&l.from, u) && self.reaches(v, &l.to))
    }

    /// DOT text with one `kind` attribute per edge.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph drs {\n  rankdir=BT;\n");
        for n in &self.nodes {
            let shape = match n {
                Node::Individual(_) => "box",
                Node::Class(_) => "ellipse",
                Node::Property(_) => "diamond",
            };
            let _ = writeln!(out, "  {} [label={}, shape={shape}];", dot_id(n), quote(&n.to_string()));
        }
        for l in &self.links {
            let extra = match l.kind {
                LinkKind::Disjoint => ", dir=none, style=dashed",
                LinkKind::HasProperty => ", style=dotted",
                _ => "",
            };
            let _ = writeln!(out, "  {} -> {} [kind={}{extra}];", dot_id(&l.from), dot_id(&l.to), quote(l.kind.name()));
        }
        out.push_str("}\n");
        out
    }
}

fn dot_id(n: &Node) -> String {
    let prefix = match n {
        Node::Individual(_) => "i",
        Node::Class(_) => "c",
        Node::Property(_) => "p",
    };
    quote(&format!("{prefix}:{n}"))
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(s: &str) -> Node {
        Node::Class(Predicate::plain(s, 1))
    }

    fn doc(s: &str) -> Node {
        Node::Individual(Const::new(s))
    }

    fn sub(a: &str, b: &str) -> Link {
        Link::new(LinkKind::Subclass, class(a), class(b))
    }

    #[test]
    fn redundancy_in_both_directions() {
        let mut g = LinkGraph::new();
        g.add_link(sub("CS", "S"));
        g.add_link(sub("S", "TL"));
        g.add_link(Link::new(LinkKind::Element, doc("Doc1"), class("S")));
        assert!(g.would_create_redundant_path(&doc("Doc1"), &class("TL")));
        assert!(g.would_create_redundant_path(&class("CS"), &class("TL")));
        assert!(!g.would_create_redundant_path(&doc("Doc2"), &class("S")));
        assert!(g.would_make_existing_redundant(&doc("Doc1"), &class("CS")));
        assert!(!g.would_make_existing_redundant(&doc("Doc1"), &class("E")));
        assert!(g.would_create_loop(&class("TL"), &class("CS")));
        assert!(g.would_create_loop(&class("CS"), &class("CS")));
    }

    #[test]
    fn disjoint_links_are_unordered() {
        assert_eq!(
            Link::new(LinkKind::Disjoint, class("H"), class("E")),
            Link::new(LinkKind::Disjoint, class("E"), class("H"))
        );
    }
}
