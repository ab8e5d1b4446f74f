use std::collections::{BTreeSet, HashMap, HashSet};

use super::{FeatureStructure, Graph, NodeId};
use crate::signature::{FeatId, Signature};

/// Options for [`print_avm`].
#[derive(Clone, Debug)]
pub struct PrintOptions {
    /// Features left out of the output. Nodes reachable only through them are
    /// not printed and do not count towards sharing.
    pub suppress: BTreeSet<FeatId>,
    /// Nodes that always get a tag, shared or not.
    pub force_tags: Vec<NodeId>,
    /// Print `ne_list`/`e_list` chains with bracket notation.
    pub list_sugar: bool,
}

impl Default for PrintOptions {
    fn default() -> Self {
        PrintOptions { suppress: BTreeSet::new(), force_tags: Vec::new(), list_sugar: true }
    }
}

/// Result of [`print_avm`].
#[derive(Clone, Debug)]
pub struct Printed {
    pub text: String,
    /// Tag number of every tagged node, keyed by dereferenced node.
    pub tags: HashMap<NodeId, usize>,
}

/// Render a feature structure in description syntax.
///
/// Shared nodes are written `#n=value` at their first occurrence and `#n`
/// afterwards, numbered in depth-first order. The output parses back to an
/// isomorphic structure.
///
/// ```
/// use tfsc::descriptions::{parse_grammar, parse_description};
/// let g = parse_grammar("type top sub [a]. type a intro [f:top, g:top].").unwrap();
/// let fs = g.build(&parse_description(g.signature(), "f:X, g:X").unwrap()).unwrap();
/// assert_eq!(fs.display(g.signature()), "(a, F:#1=top, G:#1)");
/// ```
pub fn print_avm(sig: &Signature, fs: &FeatureStructure, opts: &PrintOptions) -> Printed {
    print_graph(sig, fs.graph(), fs.root(), opts)
}

pub(crate) fn print_graph(sig: &Signature, graph: &Graph, root: NodeId, opts: &PrintOptions) -> Printed {
    let mut p = Printer::new(sig, graph, opts);
    p.count(root);
    p.node(root);
    Printed { text: p.out, tags: p.tags }
}

/// Print several roots over one graph with a shared tag numbering, as needed
/// for clause heads and their goals.
pub(crate) struct MultiPrinter<'a> {
    inner: Printer<'a>,
}

impl<'a> MultiPrinter<'a> {
    pub(crate) fn new(sig: &'a Signature, graph: &'a Graph, roots: &[NodeId], opts: &'a PrintOptions) -> Self {
        let mut inner = Printer::new(sig, graph, opts);
        for &r in roots {
            inner.count(r);
        }
        MultiPrinter { inner }
    }

    pub(crate) fn print(&mut self, n: NodeId) -> String {
        self.inner.out.clear();
        self.inner.node(n);
        std::mem::take(&mut self.inner.out)
    }
}

struct Printer<'a> {
    sig: &'a Signature,
    graph: &'a Graph,
    opts: &'a PrintOptions,
    indegree: HashMap<NodeId, usize>,
    seen: HashSet<NodeId>,
    tags: HashMap<NodeId, usize>,
    out: String,
}

impl<'a> Printer<'a> {
    fn new(sig: &'a Signature, graph: &'a Graph, opts: &'a PrintOptions) -> Self {
        let mut indegree = HashMap::new();
        for &n in &opts.force_tags {
            *indegree.entry(graph.deref(n)).or_insert(0) += 2;
        }
        Printer { sig, graph, opts, indegree, seen: HashSet::new(), tags: HashMap::new(), out: String::new() }
    }

    fn visible(&self, n: NodeId) -> Vec<(FeatId, NodeId)> {
        let mut arcs: Vec<(FeatId, NodeId)> = self
            .graph
            .arcs(n)
            .iter()
            .filter(|(f, _)| !self.opts.suppress.contains(f))
            .map(|&(f, v)| (f, self.graph.deref(v)))
            .collect();
        arcs.sort_by_key(|&(f, _)| f);
        arcs
    }

    /// Count visible in-arcs; a root counts as one reference.
    fn count(&mut self, root: NodeId) {
        let root = self.graph.deref(root);
        *self.indegree.entry(root).or_insert(0) += 1;
        if !self.seen.insert(root) {
            return;
        }
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            for (_, v) in self.visible(n) {
                *self.indegree.entry(v).or_insert(0) += 1;
                if self.seen.insert(v) {
                    stack.push(v);
                }
            }
        }
    }

    fn shared(&self, n: NodeId) -> bool {
        self.indegree.get(&n).copied().unwrap_or(0) >= 2
    }

    fn node(&mut self, n: NodeId) {
        let n = self.graph.deref(n);
        if self.shared(n) {
            if let Some(&k) = self.tags.get(&n) {
                self.out.push_str(&format!("#{k}"));
                return;
            }
            let k = self.tags.len() + 1;
            self.tags.insert(n, k);
            self.out.push_str(&format!("#{k}="));
        }
        self.body(n);
    }

    fn list_cell(&self, n: NodeId) -> Option<(NodeId, NodeId)> {
        let lt = self.sig.list_types()?;
        if !self.opts.list_sugar || self.graph.ty(n) != lt.ne_list {
            return None;
        }
        match self.visible(n)[..] {
            [(f, h), (g, t)] if f == lt.hd && g == lt.tl => Some((h, t)),
            [(g, t), (f, h)] if f == lt.hd && g == lt.tl => Some((h, t)),
            _ => None,
        }
    }

    fn is_empty_list(&self, n: NodeId) -> bool {
        match self.sig.list_types() {
            Some(lt) => self.opts.list_sugar && self.graph.ty(n) == lt.e_list && self.visible(n).is_empty(),
            None => false,
        }
    }

    fn body(&mut self, n: NodeId) {
        if let Some((hd, mut tl)) = self.list_cell(n) {
            self.out.push('[');
            self.node(hd);
            loop {
                if !self.shared(tl) {
                    if let Some((h, t)) = self.list_cell(tl) {
                        self.out.push_str(", ");
                        self.node(h);
                        tl = t;
                        continue;
                    }
                    if self.is_empty_list(tl) {
                        break;
                    }
                }
                self.out.push_str(" | ");
                self.node(tl);
                break;
            }
            self.out.push(']');
            return;
        }
        let arcs = self.visible(n);
        let name = self.sig.type_name(self.graph.ty(n));
        if arcs.is_empty() {
            self.out.push_str(name);
            return;
        }
        self.out.push('(');
        self.out.push_str(name);
        for (f, v) in arcs {
            self.out.push_str(", ");
            self.out.push_str(&self.sig.feature_name(f).to_uppercase());
            self.out.push(':');
            self.node(v);
        }
        self.out.push(')');
    }
}
