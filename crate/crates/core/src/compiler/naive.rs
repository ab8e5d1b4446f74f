//! Direct encoding with run-time inheritance. For each type `t`:
//!
//! - `t_cons` imposes the constraint stated on `t`, one clause per disjunct;
//! - `t_hier` imposes `t_cons` and then descends into one subtype;
//! - `t_sub` chooses among the immediate subtypes;
//! - `t_feats` checks the value of every feature of a node of minimal type;
//! - `t_type` runs the whole hierarchy from the top, then `t_feats`.
//!
//! Constraint clauses have no bodies: every constraint on a node is
//! unified in before any of its values is checked.

use std::collections::HashMap;

use super::{Clause, CompileError, Definition, Goal, Program, ProgramKind, RelId, Relation};
use crate::descriptions::{build_into, to_dnf, Description, Grammar, DEFAULT_DNF_LIMIT};
use crate::fstruct::{fill_approp, FeatureStructure, Graph};
use crate::signature::TypeId;

const KINDS: u32 = 5;
const CONS: u32 = 0;
const HIER: u32 = 1;
const TYPE: u32 = 2;
const SUB: u32 = 3;
const FEATS: u32 = 4;

fn rel(t: TypeId, kind: u32) -> RelId {
    RelId(t.index() as u32 * KINDS + kind)
}

pub(crate) fn type_rel(t: TypeId) -> RelId {
    rel(t, TYPE)
}

fn unit(t: TypeId, body: &[RelId]) -> Clause {
    let head = FeatureStructure::atomic(t);
    let body = body.iter().map(|&r| Goal { rel: r, node: head.root() }).collect();
    Clause { head, body }
}

/// Compile without classification or off-line inheritance.
pub fn compile_naive(g: &Grammar) -> Result<Program, CompileError> {
    let sig = g.signature();
    let mut relations = Vec::with_capacity(sig.len() * KINDS as usize);
    let mut warnings = Vec::new();
    for t in sig.types() {
        let name = sig.type_name(t);
        let disjuncts = match g.constraint(t) {
            Some(c) => to_dnf(&Description::Conj(vec![Description::Type(t), c.consequent.clone()]), DEFAULT_DNF_LIMIT)?,
            None => vec![Description::Type(t)],
        };
        let mut cons = Vec::new();
        for (i, d) in disjuncts.iter().enumerate() {
            let mut graph = Graph::new();
            let root = graph.add_node(t);
            if build_into(sig, &mut graph, root, d, &mut HashMap::new()).is_err() {
                warnings.push(format!("dropped inconsistent disjunct {} of the constraint on `{name}`", i + 1));
                continue;
            }
            graph.commit();
            cons.push(Clause { head: FeatureStructure::from_graph(&graph, root), body: Vec::new() });
        }
        if cons.is_empty() {
            return Err(CompileError::InconsistentConstraint(name.to_string()));
        }

        let mut hier_body = vec![rel(t, CONS)];
        if sig.immediate_supertypes(t).len() > 1 {
            // Reached through one parent only; the others' constraints are
            // imposed here.
            let mut supers: Vec<TypeId> = sig.supertypes_of(t).filter(|&s| s != t).collect();
            supers.sort_by_key(|&s| std::cmp::Reverse(sig.depth(s)));
            hier_body.extend(supers.into_iter().map(|s| rel(s, CONS)));
        }
        if !sig.is_minimal(t) {
            hier_body.push(rel(t, SUB));
        }

        let feats = if sig.is_minimal(t) {
            let mut graph = Graph::new();
            let root = graph.add_node(t);
            let order = g.feature_order(t);
            fill_approp(&mut graph, sig, root, &order).expect("features of the type are appropriate");
            graph.commit();
            let head = FeatureStructure::from_graph(&graph, root);
            let body = order
                .iter()
                .map(|&f| head.arc(head.root(), f).expect("just filled"))
                .map(|n| Goal { rel: type_rel(head.ty(n)), node: n })
                .collect();
            Definition::Clauses(vec![Clause { head, body }])
        } else {
            Definition::Dispatch(sig.minimal_subtypes(t).iter().map(|&m| rel(m, FEATS)).collect())
        };

        let subs = sig.expansion_subtypes(t).iter().map(|&s| rel(s, HIER)).collect();
        let entries = [
            (CONS, Definition::Clauses(cons), false, false),
            (HIER, Definition::Clauses(vec![unit(t, &hier_body)]), false, false),
            (TYPE, Definition::Clauses(vec![unit(t, &[rel(sig.top(), HIER), rel(t, FEATS)])]), true, false),
            (SUB, Definition::Dispatch(subs), false, false),
            (FEATS, feats, false, true),
        ];
        for (kind, def, covering, counts_depth) in entries {
            let suffix = ["cons", "hier", "type", "sub", "feats"][kind as usize];
            relations.push(Relation { name: format!("{name}_{suffix}"), subject: t, covering, counts_depth, def });
        }
    }
    Ok(Program { grammar: g.clone(), relations, kind: ProgramKind::Naive, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptions::parse_grammar;
    use crate::grammars;

    fn lines(p: &Program, prefix: &str) -> Vec<String> {
        p.dump().lines().filter(|l| l.starts_with(prefix)).map(str::to_string).collect()
    }

    #[test]
    fn shared_values_encoding() {
        let p = compile_naive(&parse_grammar(grammars::SHARED_VALUES).unwrap()).unwrap();
        assert_eq!(lines(&p, "a_cons("), ["a_cons((a, F:#1=top, G:#1))."]);
        assert_eq!(lines(&p, "b_cons("), ["b_cons((b, G:a))."]);
        assert_eq!(lines(&p, "c_cons("), ["c_cons(c)."]);
        assert_eq!(lines(&p, "a_hier("), ["a_hier(#1=a) :- a_cons(#1), a_sub(#1)."]);
        assert_eq!(lines(&p, "a_sub("), ["a_sub(#1) :- b_hier(#1) ; c_hier(#1)."]);
        assert_eq!(lines(&p, "b_hier("), ["b_hier(#1=b) :- b_cons(#1)."]);
        assert_eq!(lines(&p, "b_type("), ["b_type(#1=b) :- top_hier(#1), b_feats(#1)."]);
        assert_eq!(lines(&p, "a_feats("), ["a_feats(#1) :- b_feats(#1) ; c_feats(#1)."]);
        assert_eq!(lines(&p, "c_feats("), ["c_feats((c, F:#1=top, G:#2=top)) :- top_type(#1), top_type(#2)."]);
    }

    #[test]
    fn list_cells_check_head_and_tail() {
        let p = compile_naive(&parse_grammar(grammars::APPEND_C).unwrap()).unwrap();
        assert_eq!(lines(&p, "ne_list_feats("), ["ne_list_feats([#1=top | #2=list]) :- top_type(#1), list_type(#2)."]);
    }

    #[test]
    fn multiple_parents_impose_all_supertypes() {
        let p = compile_naive(&parse_grammar(grammars::DIAMOND).unwrap()).unwrap();
        assert_eq!(lines(&p, "r_hier("), ["r_hier(#1=r) :- r_cons(#1), p_cons(#1), q_cons(#1), top_cons(#1)."]);
    }
}
