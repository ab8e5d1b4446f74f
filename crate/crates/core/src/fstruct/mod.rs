//! Typed feature structures: rooted, possibly cyclic, labelled graphs.
//!
//! Reentrancy is node identity. There is no occurs check; a structure such
//! as `#1=[a | #1]` is an ordinary value.

mod graph;
mod print;

pub use graph::{Graph, Mark, NodeId};
pub(crate) use print::MultiPrinter;
pub use print::{print_avm, PrintOptions, Printed};

use thiserror::Error;

use crate::signature::{FeatId, Signature, TypeId};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FsError {
    #[error("feature `{feature}` is not appropriate for type `{ty}`")]
    FeatureNotAppropriate { ty: String, feature: String },
}

/// A compact feature structure: every node is live and reachable from the
/// root.
#[derive(Clone, Debug)]
pub struct FeatureStructure {
    graph: Graph,
    root: NodeId,
}

impl FeatureStructure {
    /// A single node of type `ty` with no arcs.
    pub fn atomic(ty: TypeId) -> Self {
        let mut graph = Graph::new();
        let root = graph.add_node(ty);
        FeatureStructure { graph, root }
    }

    /// Compact the part of `graph` reachable from `root`.
    pub fn from_graph(graph: &Graph, root: NodeId) -> Self {
        let (graph, map) = graph.extract(root);
        let root = map[root.index()].expect("root is reachable");
        FeatureStructure { graph, root }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn ty(&self, n: NodeId) -> TypeId {
        self.graph.ty(n)
    }

    pub fn arcs(&self, n: NodeId) -> &[(FeatId, NodeId)] {
        self.graph.arcs(n)
    }

    pub fn arc(&self, n: NodeId, f: FeatId) -> Option<NodeId> {
        self.graph.arc(n, f)
    }

    /// Follow a feature path from the root.
    pub fn path(&self, feats: &[FeatId]) -> Option<NodeId> {
        feats.iter().try_fold(self.root, |n, &f| self.arc(n, f))
    }

    /// Nodes reachable from the root in depth-first order.
    pub fn nodes(&self) -> Vec<NodeId> {
        self.graph.reachable(self.root)
    }

    pub fn node_count(&self) -> usize {
        self.nodes().len()
    }

    /// Add a detached node; attach it with [`add_arc`](Self::add_arc).
    pub fn add_node(&mut self, ty: TypeId) -> NodeId {
        self.graph.add_node(ty)
    }

    /// Add an arc with no appropriateness check. Structures built this way
    /// should be checked with [`crate::verify::well_formed`].
    pub fn add_arc(&mut self, from: NodeId, f: FeatId, to: NodeId) {
        self.graph.add_arc(from, f, to);
        self.graph.commit();
    }

    /// Overwrite a node's type without any checks.
    pub fn set_type_unchecked(&mut self, n: NodeId, ty: TypeId) {
        self.graph.overwrite_type(n, ty);
        self.graph.commit();
    }

    /// Add every feature in `feats` that is missing on `n`, valued by a fresh
    /// node typed with the feature's value restriction. Existing arcs are
    /// untouched.
    pub fn fill_approp(&mut self, sig: &Signature, n: NodeId, feats: &[FeatId]) -> Result<(), FsError> {
        fill_approp(&mut self.graph, sig, n, feats)?;
        self.graph.commit();
        Ok(())
    }

    /// Meet the type of `n` with `t`. Returns `false`, leaving the structure
    /// unchanged, when the types are inconsistent.
    pub fn retype(&mut self, sig: &Signature, n: NodeId, t: TypeId) -> bool {
        let mark = self.graph.mark();
        if self.graph.retype(sig, n, t) {
            self.graph.commit();
            true
        } else {
            self.graph.undo(mark);
            false
        }
    }

    /// Isomorphic copy with fresh nodes; sharing and cycles are preserved.
    pub fn copy(&self) -> FeatureStructure {
        FeatureStructure::from_graph(&self.graph, self.root)
    }

    /// Most general structure subsumed by both, or `None` on a type clash.
    /// Neither input is modified.
    pub fn unify(sig: &Signature, a: &FeatureStructure, b: &FeatureStructure) -> Option<FeatureStructure> {
        let mut graph = a.graph.clone();
        let base = graph.import(&b.graph);
        if graph.unify(sig, a.root, b.root.offset(base)) {
            Some(FeatureStructure::from_graph(&graph, a.root))
        } else {
            None
        }
    }

    /// Render as a description; see [`print_avm`].
    pub fn display(&self, sig: &Signature) -> String {
        print_avm(sig, self, &PrintOptions::default()).text
    }
}

pub(crate) fn fill_approp(graph: &mut Graph, sig: &Signature, n: NodeId, feats: &[FeatId]) -> Result<(), FsError> {
    let ty = graph.ty(n);
    for &f in feats {
        let value = sig.approp(ty, f).ok_or_else(|| FsError::FeatureNotAppropriate {
            ty: sig.type_name(ty).to_string(),
            feature: sig.feature_name(f).to_string(),
        })?;
        if graph.arc(n, f).is_none() {
            let v = graph.add_node(value);
            graph.add_arc(n, f, v);
        }
    }
    Ok(())
}
