use std::collections::HashSet;

use super::{Goal, RelId};
use crate::classifier::{Class, TypeClassification};
use crate::descriptions::Grammar;
use crate::fstruct::{fill_approp, FeatureStructure, Graph, NodeId};
use crate::signature::TypeId;

/// Walks a structure, filling hiding features and collecting the goals the
/// compiled program has to prove.
pub(crate) struct RhsBuilder<'a> {
    grammar: &'a Grammar,
    cls: &'a TypeClassification,
    seen: HashSet<NodeId>,
    pub(crate) goals: Vec<Goal>,
}

impl<'a> RhsBuilder<'a> {
    pub(crate) fn new(grammar: &'a Grammar, cls: &'a TypeClassification) -> Self {
        RhsBuilder { grammar, cls, seen: HashSet::new(), goals: Vec::new() }
    }

    /// Insert the hiding features of `n` and examine their values.
    pub(crate) fn fill(&mut self, graph: &mut Graph, n: NodeId) {
        let n = graph.deref(n);
        self.seen.insert(n);
        let ty = graph.ty(n);
        let hf = self.cls.hiding_features(ty);
        let order: Vec<_> = self.grammar.feature_order(ty).into_iter().filter(|f| hf.contains(f)).collect();
        fill_approp(graph, self.grammar.signature(), n, &order).expect("hiding features are appropriate");
        for f in order {
            let v = graph.arc(n, f).expect("just filled");
            self.examine(graph, v);
        }
    }

    /// Decide whether `n` needs a goal, further traversal, or nothing.
    pub(crate) fn examine(&mut self, graph: &mut Graph, n: NodeId) {
        let n = graph.deref(n);
        if self.seen.contains(&n) {
            return;
        }
        let ty = graph.ty(n);
        match self.cls.class(ty) {
            Class::Hiding if self.uniform(ty) => self.fill(graph, n),
            Class::Constrained | Class::Hiding => {
                self.seen.insert(n);
                self.goals.push(Goal { rel: RelId::of_type(ty), node: n });
            }
            Class::Simple => {
                self.seen.insert(n);
            }
        }
    }

    /// Every hiding subtype of `t` has the same hiding features as `t`, so
    /// the features can be filled here once and for all.
    fn uniform(&self, t: TypeId) -> bool {
        let sig = self.grammar.signature();
        let hf = self.cls.hiding_features(t);
        sig.subtypes_of(t)
            .filter(|&u| u != t && self.cls.hiding.contains(&u))
            .all(|u| self.cls.hiding_features(u) == hf)
    }
}

/// Apply the fill step to the root of `fs` and collect goals, before
/// pruning. Goal nodes refer to the returned structure.
pub fn compute_rhs(g: &Grammar, cls: &TypeClassification, fs: &FeatureStructure) -> (FeatureStructure, Vec<Goal>) {
    let mut graph = fs.graph().clone();
    let mut rhs = RhsBuilder::new(g, cls);
    rhs.fill(&mut graph, fs.root());
    graph.commit();
    let (compact, map) = graph.extract(fs.root());
    let root = map[fs.root().index()].unwrap();
    let goals = rhs.goals.iter().map(|g| Goal { rel: g.rel, node: map[g.node.index()].unwrap() }).collect();
    (FeatureStructure::from_graph(&compact, root), goals)
}

/// Drop goals whose node lies strictly below the node of another retained
/// goal. Order is preserved.
pub fn prune(goals: &[Goal], fs: &FeatureStructure) -> Vec<Goal> {
    prune_in(goals, fs.graph())
}

pub(crate) fn prune_in(goals: &[Goal], graph: &Graph) -> Vec<Goal> {
    let below = |n: NodeId| -> HashSet<NodeId> {
        let mut out = HashSet::new();
        let mut stack: Vec<NodeId> = graph.arcs(n).iter().map(|&(_, v)| graph.deref(v)).collect();
        while let Some(m) = stack.pop() {
            if out.insert(m) {
                stack.extend(graph.arcs(m).iter().map(|&(_, v)| graph.deref(v)));
            }
        }
        out
    };
    let mut kept: Vec<(Goal, HashSet<NodeId>)> = Vec::new();
    for &g in goals {
        let node = graph.deref(g.node);
        if kept.iter().any(|(k, reach)| (k.rel == g.rel && graph.deref(k.node) == node) || reach.contains(&node)) {
            continue;
        }
        let reach = below(node);
        kept.retain(|(k, _)| !reach.contains(&graph.deref(k.node)));
        kept.push((g, reach));
    }
    kept.into_iter().map(|(g, _)| g).collect()
}
