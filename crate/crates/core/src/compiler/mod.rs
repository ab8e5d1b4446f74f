//! Translation of a grammar into a definite clause program.
//!
//! Every type becomes a unary relation. Constraints are inherited off-line,
//! each disjunct of the inherited description becomes one clause, and clause
//! bodies only mention nodes whose type is constrained or hides constrained
//! material. [`compile_naive`] builds the direct encoding with run-time
//! inheritance instead; it serves as a reference for the optimized program.
//!
//! ```
//! use tfsc::{compiler::compile_program, descriptions::parse_grammar, grammars};
//! let g = parse_grammar(grammars::APPEND_C).unwrap();
//! let p = compile_program(&g).unwrap();
//! let dump = p.dump();
//! assert!(dump.contains("append_c((append_c, ARG1:e_list, ARG2:#1=list, ARG3:#1, GOALS:e_list)) :- list(#1)."));
//! assert!(dump.contains("list(#1) :- e_list(#1) ; ne_list(#1)."));
//! ```

mod naive;
mod rhs;

use std::collections::HashMap;
use std::fmt::Write;

use thiserror::Error;

pub use naive::compile_naive;
pub use rhs::{compute_rhs, prune};
pub(crate) use rhs::{prune_in, RhsBuilder};

use crate::classifier::{classify, Class, TypeClassification};
use crate::descriptions::{build_into, to_dnf, Description, DnfLimitExceeded, Grammar, DEFAULT_DNF_LIMIT};
use crate::fstruct::{FeatureStructure, Graph, MultiPrinter, NodeId, PrintOptions};
use crate::signature::{Signature, TypeId};

/// Index of a relation within its [`Program`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelId(pub u32);

impl RelId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// In an optimized program every type's relation has the type's index.
    pub fn of_type(t: TypeId) -> RelId {
        RelId(t.index() as u32)
    }
}

/// A body goal: prove relation `rel` of node `node` of the clause head.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Goal {
    pub rel: RelId,
    pub node: NodeId,
}

#[derive(Clone, Debug)]
pub struct Clause {
    pub head: FeatureStructure,
    pub body: Vec<Goal>,
}

#[derive(Clone, Debug)]
pub enum Definition {
    Clauses(Vec<Clause>),
    /// The relation holds if any of these relations holds, tried in order.
    Dispatch(Vec<RelId>),
}

#[derive(Clone, Debug)]
pub struct Relation {
    pub name: String,
    /// The type whose objects this relation checks.
    pub subject: TypeId,
    /// A node proven for this relation's subject is also proven for any
    /// covering relation whose subject subsumes it.
    pub covering: bool,
    /// Resolving a clause of this relation counts towards the depth bound.
    pub counts_depth: bool,
    pub def: Definition,
}

#[derive(Clone, Debug)]
pub enum ProgramKind {
    Optimized(TypeClassification),
    Naive,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("every disjunct of the constraints inherited by `{0}` is inconsistent")]
    InconsistentConstraint(String),
    #[error(transparent)]
    DnfLimit(#[from] DnfLimitExceeded),
}

#[derive(Clone, Debug)]
pub struct Program {
    grammar: Grammar,
    relations: Vec<Relation>,
    kind: ProgramKind,
    warnings: Vec<String>,
}

impl Program {
    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub fn signature(&self) -> &Signature {
        self.grammar.signature()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation(&self, r: RelId) -> &Relation {
        &self.relations[r.index()]
    }

    pub fn relation_by_name(&self, name: &str) -> Option<RelId> {
        self.relations.iter().position(|r| r.name == name).map(|i| RelId(i as u32))
    }

    pub fn kind(&self) -> &ProgramKind {
        &self.kind
    }

    pub fn classification(&self) -> Option<&TypeClassification> {
        match &self.kind {
            ProgramKind::Optimized(cls) => Some(cls),
            ProgramKind::Naive => None,
        }
    }

    /// Disjuncts dropped during compilation because they were inconsistent.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Clauses of the relation for `t` in an optimized program.
    pub fn clauses(&self, t: TypeId) -> &[Clause] {
        match &self.relations[RelId::of_type(t).index()].def {
            Definition::Clauses(cs) => cs,
            Definition::Dispatch(_) => &[],
        }
    }

    /// Goals proving that the structure under `root` is admissible.
    pub(crate) fn seed_goals(&self, graph: &mut Graph, root: NodeId) -> Vec<Goal> {
        match &self.kind {
            ProgramKind::Optimized(cls) => {
                let mut rhs = RhsBuilder::new(&self.grammar, cls);
                rhs.examine(graph, root);
                prune_in(&rhs.goals, graph)
            }
            ProgramKind::Naive => vec![Goal { rel: naive::type_rel(graph.ty(root)), node: graph.deref(root) }],
        }
    }

    /// All clauses and dispatch lists, one per line.
    pub fn dump(&self) -> String {
        let sig = self.signature();
        let opts = PrintOptions::default();
        let mut out = String::new();
        for rel in &self.relations {
            match &rel.def {
                Definition::Clauses(cs) => {
                    for c in cs {
                        let graph = c.head.graph();
                        let forced: Vec<NodeId> = c.body.iter().map(|g| g.node).collect();
                        let opts = PrintOptions { force_tags: forced, ..opts.clone() };
                        let mut p = MultiPrinter::new(sig, graph, &[c.head.root()], &opts);
                        write!(out, "{}({})", rel.name, p.print(c.head.root())).unwrap();
                        for (i, g) in c.body.iter().enumerate() {
                            let sep = if i == 0 { " :- " } else { ", " };
                            write!(out, "{sep}{}({})", self.relation(g.rel).name, p.print(g.node)).unwrap();
                        }
                        out.push_str(".\n");
                    }
                }
                Definition::Dispatch(alts) if alts.is_empty() => {}
                Definition::Dispatch(alts) => {
                    let names: Vec<String> = alts.iter().map(|&a| format!("{}(#1)", self.relation(a).name)).collect();
                    writeln!(out, "{}(#1) :- {}.", rel.name, names.join(" ; ")).unwrap();
                }
            }
        }
        out
    }
}

/// The constraints applying to objects of type `t`: `t` itself conjoined
/// with the consequent of every constraint whose antecedent subsumes `t`,
/// most general antecedents first. Each consequent keeps its own variables.
pub fn inherit(g: &Grammar, t: TypeId) -> Description {
    let sig = g.signature();
    let mut sources: Vec<(usize, usize, TypeId)> =
        sig.supertypes_of(t).filter_map(|s| g.constraint_index(s).map(|i| (sig.depth(s), i, s))).collect();
    sources.sort_unstable();
    let mut parts = vec![Description::Type(t)];
    for (_, i, s) in sources {
        parts.push(g.constraints()[i].consequent.rename_vars(&format!("{}.", sig.type_name(s))));
    }
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        Description::Conj(parts)
    }
}

/// Clauses for a minimal type, plus a warning per dropped disjunct.
pub fn compile_type(
    g: &Grammar,
    cls: &TypeClassification,
    t: TypeId,
) -> Result<(Vec<Clause>, Vec<String>), CompileError> {
    let sig = g.signature();
    let mut warnings = Vec::new();
    let clause = |graph: &mut Graph, root: NodeId| {
        let mut rhs = RhsBuilder::new(g, cls);
        rhs.fill(graph, root);
        graph.commit();
        let (compact, map) = graph.extract(root);
        let body: Vec<Goal> =
            rhs.goals.iter().map(|goal| Goal { rel: goal.rel, node: map[goal.node.index()].unwrap() }).collect();
        let head = FeatureStructure::from_graph(&compact, map[root.index()].unwrap());
        let body = prune(&body, &head);
        Clause { head, body }
    };
    let clauses = match cls.class(t) {
        Class::Simple => vec![Clause { head: FeatureStructure::atomic(t), body: vec![] }],
        Class::Hiding => {
            let mut graph = Graph::new();
            let root = graph.add_node(t);
            vec![clause(&mut graph, root)]
        }
        Class::Constrained => {
            let disjuncts = to_dnf(&inherit(g, t), DEFAULT_DNF_LIMIT)?;
            let mut out = Vec::new();
            for (i, d) in disjuncts.iter().enumerate() {
                let mut graph = Graph::new();
                let root = graph.add_node(t);
                if build_into(sig, &mut graph, root, d, &mut HashMap::new()).is_err() {
                    warnings.push(format!(
                        "dropped inconsistent disjunct {} of the constraints on `{}`",
                        i + 1,
                        sig.type_name(t)
                    ));
                    continue;
                }
                out.push(clause(&mut graph, root));
            }
            if out.is_empty() {
                return Err(CompileError::InconsistentConstraint(sig.type_name(t).to_string()));
            }
            out
        }
    };
    Ok((clauses, warnings))
}

/// Compile with off-line inheritance, classification and pruning.
pub fn compile_program(g: &Grammar) -> Result<Program, CompileError> {
    let sig = g.signature();
    let cls = classify(g);
    let mut relations = Vec::with_capacity(sig.len());
    let mut warnings = Vec::new();
    for t in sig.types() {
        let def = if sig.is_minimal(t) {
            let (clauses, w) = compile_type(g, &cls, t)?;
            warnings.extend(w);
            Definition::Clauses(clauses)
        } else {
            Definition::Dispatch(sig.minimal_subtypes(t).iter().map(|&s| RelId::of_type(s)).collect())
        };
        relations.push(Relation {
            name: sig.type_name(t).to_string(),
            subject: t,
            covering: true,
            counts_depth: true,
            def,
        });
    }
    Ok(Program { grammar: g.clone(), relations, kind: ProgramKind::Optimized(cls), warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptions::parse_grammar;
    use crate::grammars;

    fn program(src: &str) -> Program {
        compile_program(&parse_grammar(src).unwrap()).unwrap()
    }

    fn clause_lines(p: &Program, name: &str) -> Vec<String> {
        p.dump().lines().filter(|l| l.starts_with(&format!("{name}("))).map(str::to_string).collect()
    }

    #[test]
    fn append_program() {
        let p = program(grammars::APPEND_C);
        assert_eq!(
            clause_lines(&p, "append_c"),
            [
                "append_c((append_c, ARG1:e_list, ARG2:#1=list, ARG3:#1, GOALS:e_list)) :- list(#1).",
                "append_c((append_c, ARG1:[#1=constant | #2=list], ARG2:#3=list, ARG3:[#1 | #4=list], \
                 GOALS:[#5=(append_c, ARG1:#2, ARG2:#3, ARG3:#4)])) :- append_c(#5).",
            ]
        );
        assert_eq!(clause_lines(&p, "ne_list"), ["ne_list([#1=top | #2=list]) :- top(#1), list(#2)."]);
        assert_eq!(clause_lines(&p, "e_list"), ["e_list(e_list)."]);
        assert_eq!(clause_lines(&p, "list"), ["list(#1) :- e_list(#1) ; ne_list(#1)."]);
        assert!(p.warnings().is_empty());
    }

    #[test]
    fn shared_head_in_recursive_clause() {
        let p = program(grammars::APPEND_C);
        let sig = p.signature();
        let c = &p.clauses(sig.type_id("append_c").unwrap())[1];
        let f = |n| sig.feature_id(n).unwrap();
        let hd1 = c.head.path(&[f("arg1"), f("hd")]).unwrap();
        let hd3 = c.head.path(&[f("arg3"), f("hd")]).unwrap();
        assert_eq!(hd1, hd3);
    }

    #[test]
    fn constraint_free_grammar_is_all_units() {
        let p = program(grammars::EMPTY);
        for rel in p.relations() {
            if let Definition::Clauses(cs) = &rel.def {
                assert_eq!(cs.len(), 1);
                assert!(cs[0].body.is_empty());
                assert_eq!(cs[0].head.node_count(), 1);
            }
        }
    }

    #[test]
    fn inherit_conjoins_supertypes() {
        let g = parse_grammar(grammars::SHARED_VALUES).unwrap();
        let sig = g.signature();
        let b = inherit(&g, sig.type_id("b").unwrap());
        assert_eq!(b.display(sig).to_string(), "(b, (F:a.X, G:a.X), G:a)");
        assert_eq!(inherit(&g, sig.top()), Description::Type(sig.top()));
    }

    #[test]
    fn inherit_from_both_parents() {
        let g = parse_grammar(grammars::DIAMOND).unwrap();
        let sig = g.signature();
        let r = inherit(&g, sig.type_id("r").unwrap());
        assert_eq!(r.display(sig).to_string(), "(r, F:u, G:(u ; v), (F:r.Y, G:r.Y))");
        let p = compile_program(&g).unwrap();
        assert_eq!(clause_lines(&p, "r"), ["r((r, F:#1=u, G:#1))."]);
        assert_eq!(p.warnings().len(), 1);
    }

    #[test]
    fn all_disjuncts_inconsistent() {
        let g = parse_grammar("type top sub [a, b]. a => b.").unwrap();
        assert_eq!(compile_program(&g).unwrap_err(), CompileError::InconsistentConstraint("a".into()));
    }

    #[test]
    fn sentence_grammar_compiles() {
        let p = program(grammars::SENTENCES);
        let sig = p.signature();
        assert_eq!(p.clauses(sig.type_id("phrase").unwrap()).len(), 2);
        assert_eq!(p.clauses(sig.type_id("word").unwrap()).len(), 10);
    }

    #[test]
    fn deterministic() {
        assert_eq!(program(grammars::SENTENCES).dump(), program(grammars::SENTENCES).dump());
    }
}
