use std::collections::HashMap;

use thiserror::Error;

use super::Description;
use crate::fstruct::{Graph, NodeId};
use crate::signature::{FeatId, Signature};

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    /// The description is inconsistent.
    #[error("description is unsatisfiable")]
    Clash,
    #[error("description contains a disjunction; convert it to normal form first")]
    Disjunction,
}

/// Constrain `node` so that it satisfies `d`, binding variables in `env`.
///
/// All changes are trailed. On error the graph may be partially updated and
/// the caller should undo to a mark taken beforehand.
pub fn build_into(
    sig: &Signature,
    graph: &mut Graph,
    node: NodeId,
    d: &Description,
    env: &mut HashMap<String, NodeId>,
) -> Result<(), BuildError> {
    match d {
        Description::Type(t) => {
            if !graph.retype(sig, node, *t) {
                return Err(BuildError::Clash);
            }
        }
        Description::Feat(f, v) => {
            let target = feature_node(sig, graph, node, *f)?;
            build_into(sig, graph, target, v, env)?;
        }
        Description::Conj(ds) => {
            for d in ds {
                build_into(sig, graph, node, d, env)?;
            }
        }
        Description::Disj(_) => return Err(BuildError::Disjunction),
        Description::Var(v) if v == "_" => {}
        Description::Var(v) => match env.get(v) {
            Some(&bound) => {
                if !graph.unify(sig, bound, node) {
                    return Err(BuildError::Clash);
                }
            }
            None => {
                env.insert(v.clone(), node);
            }
        },
        Description::List(items, tail) => {
            let lt = sig.list_types().expect("list descriptions are only resolved when list types exist");
            let mut cur = node;
            for item in items {
                if !graph.retype(sig, cur, lt.ne_list) {
                    return Err(BuildError::Clash);
                }
                let hd = feature_node(sig, graph, cur, lt.hd)?;
                build_into(sig, graph, hd, item, env)?;
                cur = feature_node(sig, graph, cur, lt.tl)?;
            }
            match tail {
                Some(t) => build_into(sig, graph, cur, t, env)?,
                None => {
                    if !graph.retype(sig, cur, lt.e_list) {
                        return Err(BuildError::Clash);
                    }
                }
            }
        }
    }
    Ok(())
}

/// The value of `f` on `node`, creating it if absent. The node is first
/// narrowed to the type introducing `f`.
fn feature_node(sig: &Signature, graph: &mut Graph, node: NodeId, f: FeatId) -> Result<NodeId, BuildError> {
    if !graph.retype(sig, node, sig.introducer(f)) {
        return Err(BuildError::Clash);
    }
    if let Some(v) = graph.arc(node, f) {
        return Ok(v);
    }
    let value = sig.approp(graph.ty(node), f).expect("feature appropriate after narrowing to its introducer");
    let v = graph.add_node(value);
    graph.add_arc(node, f, v);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use crate::descriptions::{parse_description, parse_grammar, to_dnf, BuildError};
    use crate::grammars;

    #[test]
    fn append_base_case_structure() {
        let g = parse_grammar(grammars::APPEND_C).unwrap();
        let sig = g.signature();
        let append_c = sig.type_id("append_c").unwrap();
        let c = g.constraint(append_c).unwrap();
        let first = &to_dnf(&c.consequent, 10).unwrap()[0];
        let fs = g.build(first).unwrap();
        assert_eq!(fs.display(sig), "(append_c, ARG1:e_list, ARG2:#1=list, ARG3:#1, GOALS:e_list)");
    }

    #[test]
    fn top_literal() {
        let g = parse_grammar("type top.").unwrap();
        let fs = g.build(&parse_description(g.signature(), "top").unwrap()).unwrap();
        assert_eq!(fs.node_count(), 1);
        assert_eq!(fs.display(g.signature()), "top");
    }

    #[test]
    fn cyclic_structure() {
        let g = parse_grammar("type top sub [a]. type a intro [f:top].").unwrap();
        let fs = g.build(&parse_description(g.signature(), "X=(f:X)").unwrap()).unwrap();
        assert_eq!(fs.node_count(), 1);
        assert_eq!(fs.display(g.signature()), "#1=(a, F:#1)");
    }

    #[test]
    fn clash_and_disjunction() {
        let g = parse_grammar(grammars::APPEND_C).unwrap();
        let sig = g.signature();
        let d = parse_description(sig, "e_list, hd:a").unwrap();
        assert_eq!(g.build(&d).unwrap_err(), BuildError::Clash);
        let d = parse_description(sig, "a ; b").unwrap();
        assert_eq!(g.build(&d).unwrap_err(), BuildError::Disjunction);
    }

    #[test]
    fn feature_narrows_to_introducer() {
        let g = parse_grammar(grammars::APPEND_C).unwrap();
        let fs = g.build(&parse_description(g.signature(), "tl:[]").unwrap()).unwrap();
        assert_eq!(fs.display(g.signature()), "(ne_list, TL:e_list)");
        let fs = g.build(&parse_description(g.signature(), "[a, b | T]").unwrap()).unwrap();
        assert_eq!(fs.display(g.signature()), "[a, b | list]");
    }
}
