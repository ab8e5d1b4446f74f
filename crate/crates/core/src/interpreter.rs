//! Depth-first, left-to-right resolution over a compiled [`Program`].
//!
//! A goal whose node has already been proven on the current branch, for the
//! same relation or a more specific covering one, succeeds at once. This
//! keeps shared nodes from being checked twice and lets cyclic queries
//! terminate.
//!
//! ```
//! use tfsc::{compiler::compile_program, descriptions::{parse_description, parse_grammar}, grammars};
//! use tfsc::interpreter::{query, QueryOptions};
//!
//! let g = parse_grammar(grammars::APPEND_C).unwrap();
//! let p = compile_program(&g).unwrap();
//! let d = parse_description(g.signature(), "append_c, arg1:[a, b], arg2:[c]").unwrap();
//! let mut q = query(&p, &d, QueryOptions::default()).unwrap();
//! let s = q.next().unwrap();
//! assert_eq!(
//!     s.fs.display(g.signature()),
//!     "(append_c, ARG1:[#1=a | #2=[#3=b | #4=e_list]], ARG2:#5=[c], ARG3:[#1 | #6=[#3 | #5]], \
//!      GOALS:[(append_c, ARG1:#2, ARG2:#5, ARG3:#6, GOALS:[(append_c, ARG1:#4, ARG2:#5, ARG3:#5, GOALS:e_list)])])"
//! );
//! assert!(q.next().is_none());
//! ```

use std::collections::HashMap;
use std::rc::Rc;

use crate::compiler::{Definition, Goal, Program, RelId};
use crate::descriptions::{to_dnf, Description, DnfLimitExceeded, DEFAULT_DNF_LIMIT};
use crate::fstruct::{FeatureStructure, Graph, Mark, NodeId};

#[derive(Clone, Debug)]
pub struct QueryOptions {
    pub max_solutions: Option<usize>,
    /// Maximum number of nested clause resolutions on a branch.
    pub depth_bound: Option<usize>,
    /// Succeed at once on goals already proven on the current branch.
    pub visited_check: bool,
    pub trace: bool,
}

impl Default for QueryOptions {
    fn default() -> Self {
        QueryOptions { max_solutions: None, depth_bound: None, visited_check: true, trace: false }
    }
}

/// How a search ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    /// Still producing solutions.
    Open,
    /// Every branch was explored.
    Exhausted,
    /// Every branch was explored, but some were cut by the depth bound.
    DepthLimitExceeded,
    /// The solution limit was reached.
    Stopped,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Goals selected for resolution, including dispatch steps.
    pub goal_calls: usize,
    /// Successful clause head unifications.
    pub resolutions: usize,
    /// Goals discharged by the visited list.
    pub visited_hits: usize,
    /// Clause head unifications attempted.
    pub clause_attempts: usize,
}

impl std::ops::AddAssign for Stats {
    fn add_assign(&mut self, o: Stats) {
        self.goal_calls += o.goal_calls;
        self.resolutions += o.resolutions;
        self.visited_hits += o.visited_hits;
        self.clause_attempts += o.clause_attempts;
    }
}

/// Recorded when [`QueryOptions::trace`] is set.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    /// Every clause attempt as (relation, clause index), in order.
    pub attempts: Vec<(RelId, usize)>,
    /// Successful resolutions per (relation, node).
    pub resolutions: HashMap<(RelId, NodeId), usize>,
}

#[derive(Clone, Copy, Debug)]
struct Frame {
    rel: RelId,
    node: NodeId,
    depth: usize,
}

enum GoalList {
    Nil,
    Cons(Frame, Rc<GoalList>),
}

fn push(frame: Frame, rest: &Rc<GoalList>) -> Rc<GoalList> {
    Rc::new(GoalList::Cons(frame, rest.clone()))
}

struct Choice {
    mark: Mark,
    rest: Rc<GoalList>,
    frame: Frame,
    next: usize,
    visited: usize,
}

/// Proves goals over one structure, producing solutions one at a time.
pub struct Solver<'p> {
    program: &'p Program,
    graph: Graph,
    root: NodeId,
    base: Mark,
    goals: Rc<GoalList>,
    choices: Vec<Choice>,
    visited: Vec<(RelId, NodeId)>,
    opts: QueryOptions,
    stats: Stats,
    trace: Trace,
    started: bool,
    finished: bool,
    depth_cut: bool,
}

impl<'p> Solver<'p> {
    /// Prove that `fs` is admissible: goals are derived from its root as the
    /// compiler derives clause bodies.
    pub fn new(program: &'p Program, fs: &FeatureStructure, opts: QueryOptions) -> Self {
        Self::start(program, fs, None, opts)
    }

    /// Prove the given goals, whose nodes refer to `fs`.
    pub fn with_goals(program: &'p Program, fs: &FeatureStructure, goals: &[Goal], opts: QueryOptions) -> Self {
        Self::start(program, fs, Some(goals), opts)
    }

    fn start(program: &'p Program, fs: &FeatureStructure, goals: Option<&[Goal]>, opts: QueryOptions) -> Self {
        let mut graph = fs.graph().clone();
        let root = fs.root();
        let base = graph.mark();
        let goals = match goals {
            Some(gs) => gs.to_vec(),
            None => program.seed_goals(&mut graph, root),
        };
        let mut list = Rc::new(GoalList::Nil);
        for g in goals.iter().rev() {
            list = push(Frame { rel: g.rel, node: g.node, depth: 0 }, &list);
        }
        Solver {
            program,
            graph,
            root,
            base,
            goals: list,
            choices: Vec::new(),
            visited: Vec::new(),
            opts,
            stats: Stats::default(),
            trace: Trace::default(),
            started: false,
            finished: false,
            depth_cut: false,
        }
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    /// Some branch was cut by the depth bound.
    pub fn depth_limited(&self) -> bool {
        self.depth_cut
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    /// The structure in its current state: the last solution while the
    /// search is open, the original structure once it is finished.
    pub fn current(&self) -> FeatureStructure {
        FeatureStructure::from_graph(&self.graph, self.root)
    }

    /// The next solution, or `None` when the search space is exhausted.
    pub fn next_solution(&mut self) -> Option<FeatureStructure> {
        if self.finished {
            return None;
        }
        if self.started && !self.backtrack() {
            return self.finish();
        }
        self.started = true;
        loop {
            let (frame, rest) = match &*self.goals {
                GoalList::Nil => return Some(FeatureStructure::from_graph(&self.graph, self.root)),
                GoalList::Cons(f, rest) => (*f, rest.clone()),
            };
            self.goals = rest.clone();
            self.stats.goal_calls += 1;
            if self.opts.visited_check && self.is_visited(frame) {
                self.stats.visited_hits += 1;
                continue;
            }
            let visited = self.visited.len();
            if !self.try_from(frame, rest, 0, visited) && !self.backtrack() {
                return self.finish();
            }
        }
    }

    fn finish(&mut self) -> Option<FeatureStructure> {
        self.finished = true;
        self.graph.undo(self.base);
        None
    }

    fn is_visited(&self, frame: Frame) -> bool {
        let node = self.graph.deref(frame.node);
        let goal = self.program.relation(frame.rel);
        let sig = self.program.signature();
        self.visited.iter().any(|&(r, n)| {
            if self.graph.deref(n) != node {
                return false;
            }
            if r == frame.rel {
                return true;
            }
            let seen = self.program.relation(r);
            goal.covering && seen.covering && sig.subsumes(goal.subject, seen.subject)
        })
    }

    /// Resume the most recent choice point with its next alternative.
    fn backtrack(&mut self) -> bool {
        while let Some(c) = self.choices.pop() {
            self.graph.undo(c.mark);
            self.visited.truncate(c.visited);
            if self.try_from(c.frame, c.rest, c.next, c.visited) {
                return true;
            }
        }
        false
    }

    /// Try the alternatives of `frame` from index `start` on; on success the
    /// goal stack is updated and a choice point left for the remaining ones.
    fn try_from(&mut self, frame: Frame, rest: Rc<GoalList>, start: usize, visited: usize) -> bool {
        let program = self.program;
        let rel = program.relation(frame.rel);
        let sig = program.signature();
        let node = self.graph.deref(frame.node);
        match &rel.def {
            Definition::Dispatch(alts) => {
                for (i, &alt) in alts.iter().enumerate().skip(start) {
                    if sig.glb(program.relation(alt).subject, self.graph.ty(node)).is_none() {
                        continue;
                    }
                    let mark = self.graph.mark();
                    if i + 1 < alts.len() {
                        self.choices.push(Choice { mark, rest: rest.clone(), frame, next: i + 1, visited });
                    }
                    self.goals = push(Frame { rel: alt, node, depth: frame.depth }, &rest);
                    return true;
                }
                false
            }
            Definition::Clauses(clauses) => {
                let depth = if rel.counts_depth { frame.depth + 1 } else { frame.depth };
                if self.opts.depth_bound.is_some_and(|b| depth > b) {
                    self.depth_cut = true;
                    return false;
                }
                for (i, clause) in clauses.iter().enumerate().skip(start) {
                    self.stats.clause_attempts += 1;
                    if self.opts.trace {
                        self.trace.attempts.push((frame.rel, i));
                    }
                    let mark = self.graph.mark();
                    let base = self.graph.import(clause.head.graph());
                    if !self.graph.unify(sig, node, clause.head.root().offset(base)) {
                        self.graph.undo(mark);
                        continue;
                    }
                    self.stats.resolutions += 1;
                    if self.opts.trace {
                        *self.trace.resolutions.entry((frame.rel, node)).or_insert(0) += 1;
                    }
                    if i + 1 < clauses.len() {
                        self.choices.push(Choice { mark, rest: rest.clone(), frame, next: i + 1, visited });
                    }
                    self.visited.push((frame.rel, node));
                    let mut goals = rest;
                    for g in clause.body.iter().rev() {
                        goals = push(Frame { rel: g.rel, node: g.node.offset(base), depth }, &goals);
                    }
                    self.goals = goals;
                    return true;
                }
                false
            }
        }
    }
}

/// One solution of a query.
#[derive(Clone, Debug)]
pub struct Solution {
    pub fs: FeatureStructure,
    /// Index of the disjunct of the query it solves.
    pub disjunct: usize,
}

/// A lazily evaluated query: the disjuncts of the description are solved in
/// order.
pub struct Query<'p> {
    program: &'p Program,
    disjuncts: Vec<Description>,
    index: usize,
    solver: Option<Solver<'p>>,
    opts: QueryOptions,
    emitted: usize,
    stats: Stats,
    attempts: Vec<(RelId, usize)>,
    depth_cut: bool,
    status: SearchStatus,
}

/// Start a query. Nothing is resolved until the first solution is pulled.
pub fn query<'p>(program: &'p Program, d: &Description, opts: QueryOptions) -> Result<Query<'p>, DnfLimitExceeded> {
    let disjuncts = to_dnf(d, DEFAULT_DNF_LIMIT)?;
    Ok(Query {
        program,
        disjuncts,
        index: 0,
        solver: None,
        opts,
        emitted: 0,
        stats: Stats::default(),
        attempts: Vec::new(),
        depth_cut: false,
        status: SearchStatus::Open,
    })
}

impl Query<'_> {
    pub fn status(&self) -> SearchStatus {
        self.status
    }

    /// Counters summed over all disjuncts so far.
    pub fn stats(&self) -> Stats {
        let mut s = self.stats;
        if let Some(solver) = &self.solver {
            s += solver.stats();
        }
        s
    }

    /// Clause attempts over all disjuncts so far, when tracing.
    pub fn attempts(&self) -> Vec<(RelId, usize)> {
        let mut a = self.attempts.clone();
        if let Some(solver) = &self.solver {
            a.extend(solver.trace().attempts.iter().copied());
        }
        a
    }

    fn retire(&mut self) {
        if let Some(s) = self.solver.take() {
            self.stats += s.stats();
            self.attempts.extend(s.trace().attempts.iter().copied());
            self.depth_cut |= s.depth_limited();
        }
    }
}

impl Iterator for Query<'_> {
    type Item = Solution;

    fn next(&mut self) -> Option<Solution> {
        if self.status != SearchStatus::Open {
            return None;
        }
        if self.opts.max_solutions.is_some_and(|m| self.emitted >= m) {
            self.retire();
            self.status = SearchStatus::Stopped;
            return None;
        }
        loop {
            if let Some(solver) = &mut self.solver {
                if let Some(fs) = solver.next_solution() {
                    self.emitted += 1;
                    return Some(Solution { fs, disjunct: self.index - 1 });
                }
                self.retire();
            }
            let Some(d) = self.disjuncts.get(self.index) else {
                self.status = if self.depth_cut { SearchStatus::DepthLimitExceeded } else { SearchStatus::Exhausted };
                return None;
            };
            self.index += 1;
            if let Ok(fs) = self.program.grammar().build(d) {
                self.solver = Some(Solver::new(self.program, &fs, self.opts.clone()));
            }
        }
    }
}
