use crate::signature::{FeatId, Signature, TypeId};

/// Node handle within a [`Graph`] or [`FeatureStructure`](super::FeatureStructure).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn offset(self, by: usize) -> NodeId {
        NodeId(self.0 + by as u32)
    }
}

#[derive(Clone, Debug)]
struct NodeData {
    ty: TypeId,
    arcs: Vec<(FeatId, NodeId)>,
    forward: Option<NodeId>,
}

#[derive(Clone, Copy, Debug)]
enum Undo {
    Forward(NodeId),
    Type(NodeId, TypeId),
    Arc(NodeId),
}

/// Restore point for [`Graph::undo`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mark {
    nodes: usize,
    trail: usize,
}

/// Arena of feature-structure nodes with destructive, trailed unification.
///
/// Merged nodes are forwarded union-find style; every mutation is recorded on
/// the trail so a [`Mark`] can roll the graph back exactly.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    nodes: Vec<NodeData>,
    trail: Vec<Undo>,
}

enum Job {
    Unify(NodeId, NodeId),
    Check(NodeId),
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn add_node(&mut self, ty: TypeId) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(NodeData { ty, arcs: Vec::new(), forward: None });
        id
    }

    /// Add an arc without any appropriateness check.
    pub fn add_arc(&mut self, from: NodeId, f: FeatId, to: NodeId) {
        let from = self.deref(from);
        debug_assert!(self.arc(from, f).is_none());
        self.nodes[from.index()].arcs.push((f, to));
        self.trail.push(Undo::Arc(from));
    }

    pub fn deref(&self, mut n: NodeId) -> NodeId {
        while let Some(next) = self.nodes[n.index()].forward {
            n = next;
        }
        n
    }

    pub fn ty(&self, n: NodeId) -> TypeId {
        self.nodes[self.deref(n).index()].ty
    }

    /// Arcs of the dereferenced node. Targets may themselves be forwarded.
    pub fn arcs(&self, n: NodeId) -> &[(FeatId, NodeId)] {
        &self.nodes[self.deref(n).index()].arcs
    }

    pub fn arc(&self, n: NodeId, f: FeatId) -> Option<NodeId> {
        self.arcs(n).iter().find(|&&(g, _)| g == f).map(|&(_, v)| self.deref(v))
    }

    pub fn mark(&self) -> Mark {
        Mark { nodes: self.nodes.len(), trail: self.trail.len() }
    }

    pub fn undo(&mut self, mark: Mark) {
        while self.trail.len() > mark.trail {
            match self.trail.pop().unwrap() {
                Undo::Forward(n) => self.nodes[n.index()].forward = None,
                Undo::Type(n, old) => self.nodes[n.index()].ty = old,
                Undo::Arc(n) => {
                    self.nodes[n.index()].arcs.pop();
                }
            }
        }
        self.nodes.truncate(mark.nodes);
    }

    /// Forget undo information; earlier marks become invalid.
    pub fn commit(&mut self) {
        self.trail.clear();
    }

    fn set_type(&mut self, n: NodeId, ty: TypeId) {
        let old = std::mem::replace(&mut self.nodes[n.index()].ty, ty);
        self.trail.push(Undo::Type(n, old));
    }

    pub(crate) fn overwrite_type(&mut self, n: NodeId, ty: TypeId) {
        let n = self.deref(n);
        self.set_type(n, ty);
    }

    fn narrow(&mut self, sig: &Signature, n: NodeId, t: TypeId, work: &mut Vec<Job>) -> bool {
        let n = self.deref(n);
        let cur = self.nodes[n.index()].ty;
        if sig.subsumes(t, cur) {
            return true;
        }
        match sig.glb(cur, t) {
            Some(g) => {
                self.set_type(n, g);
                work.push(Job::Check(n));
                true
            }
            None => false,
        }
    }

    fn run(&mut self, sig: &Signature, mut work: Vec<Job>) -> bool {
        while let Some(job) = work.pop() {
            match job {
                Job::Unify(a, b) => {
                    let (a, b) = (self.deref(a), self.deref(b));
                    if a == b {
                        continue;
                    }
                    let Some(meet) = sig.glb(self.nodes[a.index()].ty, self.nodes[b.index()].ty) else {
                        return false;
                    };
                    self.nodes[b.index()].forward = Some(a);
                    self.trail.push(Undo::Forward(b));
                    if meet != self.nodes[a.index()].ty {
                        self.set_type(a, meet);
                    }
                    let moved = self.nodes[b.index()].arcs.clone();
                    for (f, v) in moved {
                        match self.arc(a, f) {
                            Some(w) => work.push(Job::Unify(w, v)),
                            None => {
                                self.nodes[a.index()].arcs.push((f, v));
                                self.trail.push(Undo::Arc(a));
                            }
                        }
                    }
                    work.push(Job::Check(a));
                }
                Job::Check(n) => {
                    let n = self.deref(n);
                    let ty = self.nodes[n.index()].ty;
                    for i in 0..self.nodes[n.index()].arcs.len() {
                        let (f, v) = self.nodes[n.index()].arcs[i];
                        let need = sig.approp(ty, f).expect("arc inappropriate for node type");
                        if !self.narrow(sig, v, need, &mut work) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Unify two nodes in place. On `false` the graph is left partially
    /// updated; the caller must [`undo`](Self::undo) to a prior mark.
    pub fn unify(&mut self, sig: &Signature, a: NodeId, b: NodeId) -> bool {
        self.run(sig, vec![Job::Unify(a, b)])
    }

    /// Meet the type of `n` with `t`, narrowing arc values as appropriateness
    /// requires. Same failure contract as [`unify`](Self::unify).
    pub fn retype(&mut self, sig: &Signature, n: NodeId, t: TypeId) -> bool {
        let mut work = Vec::new();
        self.narrow(sig, n, t, &mut work) && self.run(sig, work)
    }

    /// Append a compact copy of `other`'s nodes; returns the id offset.
    pub fn import(&mut self, other: &Graph) -> usize {
        let base = self.nodes.len();
        self.nodes.extend(other.nodes.iter().map(|d| NodeData {
            ty: d.ty,
            arcs: d.arcs.iter().map(|&(f, v)| (f, v.offset(base))).collect(),
            forward: d.forward.map(|v| v.offset(base)),
        }));
        base
    }

    /// Dereferenced nodes reachable from `root`, in depth-first order with
    /// arcs in stored order.
    pub fn reachable(&self, root: NodeId) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        let mut stack = vec![self.deref(root)];
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut seen[n.index()], true) {
                continue;
            }
            out.push(n);
            for &(_, v) in self.arcs(n).iter().rev() {
                stack.push(self.deref(v));
            }
        }
        out
    }

    /// Copy the structure reachable from `root` into a fresh compact graph.
    /// Returns the graph and the old-to-new node map for reachable nodes.
    pub fn extract(&self, root: NodeId) -> (Graph, Vec<Option<NodeId>>) {
        let order = self.reachable(root);
        let mut map = vec![None; self.nodes.len()];
        for (i, &n) in order.iter().enumerate() {
            map[n.index()] = Some(NodeId(i as u32));
        }
        let nodes = order
            .iter()
            .map(|&n| NodeData {
                ty: self.nodes[n.index()].ty,
                arcs: self.nodes[n.index()]
                    .arcs
                    .iter()
                    .map(|&(f, v)| (f, map[self.deref(v).index()].unwrap()))
                    .collect(),
                forward: None,
            })
            .collect();
        // Forwarded nodes map to their representative.
        for i in 0..self.nodes.len() {
            if map[i].is_none() {
                let d = self.deref(NodeId(i as u32));
                map[i] = map[d.index()];
            }
        }
        (Graph { nodes, trail: Vec::new() }, map)
    }
}
