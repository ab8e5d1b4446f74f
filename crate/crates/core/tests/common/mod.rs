#![allow(dead_code)]

use std::collections::VecDeque;

use tfsc::compiler::{compile_naive, compile_program, Program};
use tfsc::descriptions::{parse_description, parse_grammar, Description, Grammar};
use tfsc::fstruct::{FeatureStructure, NodeId};
use tfsc::grammars;
use tfsc::interpreter::{query, QueryOptions, SearchStatus, Stats};
use tfsc::verify::{self, ExpandLimits};

/// Queries compared between the two encodings: (grammar, description).
pub const SUITE: &[(&str, &str)] = &[
    ("append_c", "append_c, arg1:[a, b], arg2:[c]"),
    ("append_c", "append_c, arg1:[], arg2:[a]"),
    ("append_c", "append_c, arg1:[a], arg2:[b, c]"),
    ("append_c", "append_c, arg1:[a, b, c], arg2:[]"),
    ("append_c", "append_c, arg1:[a, b], arg2:[c, a], arg3:[a, b, c, a]"),
    ("append_c", "append_c, arg1:[a, b], arg2:[c], arg3:[b]"),
    ("append_c", "append_c, arg3:[a, b]"),
    ("append_c", "append_c, arg2:[c], arg3:[a, b, c]"),
    ("append_c", "(append_c, arg1:[a], arg2:[b]) ; (append_c, arg1:[b, c], arg2:[])"),
    ("append_c", "[a, b]"),
    ("append_c", "X=[a | X]"),
    ("shared_values", "X=(c, f:X, g:X)"),
    ("shared_values", "X=(a, f:X)"),
    ("shared_values", "X=(b, f:X, g:c)"),
    ("shared_values", "c, f:(X=(c, f:X, g:X))"),
    ("diamond", "r"),
    ("diamond", "p"),
    ("diamond", "q, g:v"),
    ("diamond", "top"),
    ("diamond", "val"),
    ("sentences", "phon:[john, runs]"),
    ("sentences", "dtr1:phon:[john], dtr2:phon:[runs]"),
    ("sentences", "word, phon:[john]"),
    ("sentences", "phon:[cats, run]"),
    ("sentences", "phon:[john, run]"),
    ("sentences", "word, cat:vp"),
    ("empty", "[x, y]"),
    ("empty", "atom"),
    ("empty", "[atom | e_list]"),
];

pub fn grammar(name: &str) -> Grammar {
    let src = grammars::ALL
        .iter()
        .find(|(n, _)| n.strip_suffix(".gram") == Some(name))
        .unwrap_or_else(|| panic!("no grammar {name}"))
        .1;
    parse_grammar(src).unwrap()
}

pub fn programs(g: &Grammar) -> (Program, Program) {
    (compile_program(g).unwrap(), compile_naive(g).unwrap())
}

pub struct Run {
    pub solutions: Vec<FeatureStructure>,
    pub status: SearchStatus,
    pub stats: Stats,
}

pub fn solve(p: &Program, d: &Description, opts: QueryOptions) -> Run {
    let mut q = query(p, d, opts).unwrap();
    let solutions = q.by_ref().map(|s| s.fs).collect();
    Run { solutions, status: q.status(), stats: q.stats() }
}

pub fn depth(n: usize) -> QueryOptions {
    QueryOptions { depth_bound: Some(n), ..QueryOptions::default() }
}

pub fn desc(g: &Grammar, src: &str) -> Description {
    parse_description(g.signature(), src).unwrap()
}

/// Expanded solution keys; `None` when expansion hits its limits.
pub fn keys(g: &Grammar, sols: &[FeatureStructure]) -> Option<Vec<String>> {
    verify::expanded_keys(g.signature(), sols, ExpandLimits::default())
}

/// Description and grammar violations among `sols`, as messages.
pub fn unsound(g: &Grammar, d: &Description, sols: &[FeatureStructure]) -> Vec<String> {
    let sig = g.signature();
    let mut out = Vec::new();
    for s in sols {
        if !verify::satisfies(sig, s, s.root(), d) {
            out.push(format!("does not satisfy the query: {}", s.display(sig)));
        }
        if let Err(v) = verify::admissible(g, s) {
            out.push(format!("{v:?} in {}", s.display(sig)));
        }
        if let Err(e) = verify::well_formed(sig, s) {
            out.push(format!("{e} in {}", s.display(sig)));
        }
    }
    out
}

/// Shortest feature path to `n`, written `F:G`; empty for the root.
pub fn path_to(g: &Grammar, fs: &FeatureStructure, n: NodeId) -> Option<String> {
    let sig = g.signature();
    let graph = fs.graph();
    let target = graph.deref(n);
    let mut seen = std::collections::HashSet::new();
    let mut queue = VecDeque::from([(graph.deref(fs.root()), Vec::<String>::new())]);
    while let Some((m, path)) = queue.pop_front() {
        if m == target {
            return Some(path.join(":"));
        }
        if !seen.insert(m) {
            continue;
        }
        for &(f, v) in fs.arcs(m) {
            let mut p = path.clone();
            p.push(sig.feature_name(f).to_uppercase());
            queue.push_back((graph.deref(v), p));
        }
    }
    None
}
