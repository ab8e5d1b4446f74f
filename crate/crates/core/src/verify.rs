//! Checks that work on structures directly, without the compiler or the
//! interpreter: description satisfaction, grammar admissibility,
//! isomorphism keys, subsumption and total expansion.
//!
//! A feature that is appropriate for a node but absent stands for a value
//! of the appropriate type about which nothing else is known.
//!
//! ```
//! use tfsc::{descriptions::{parse_description, parse_grammar}, grammars, verify};
//!
//! let g = parse_grammar(grammars::SHARED_VALUES).unwrap();
//! let d = parse_description(g.signature(), "b, f:X, g:X").unwrap();
//! let fs = g.build(&d).unwrap();
//! assert!(verify::satisfies(g.signature(), &fs, fs.root(), &d));
//! assert!(!verify::satisfies(g.signature(), &fs, fs.root(), &parse_description(g.signature(), "c").unwrap()));
//! ```

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::descriptions::{Description, Grammar};
use crate::fstruct::{FeatureStructure, NodeId};
use crate::signature::{FeatId, Signature, TypeId};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    Real(NodeId),
    Implicit(NodeId, Vec<FeatId>),
}

#[derive(Clone, Debug)]
struct At {
    key: Key,
    ty: TypeId,
}

type Env = HashMap<String, Key>;

struct Checker<'a> {
    sig: &'a Signature,
    fs: &'a FeatureStructure,
}

impl Checker<'_> {
    fn real(&self, n: NodeId) -> At {
        let n = self.fs.graph().deref(n);
        At { key: Key::Real(n), ty: self.fs.ty(n) }
    }

    fn child(&self, at: &At, f: FeatId) -> Option<At> {
        match &at.key {
            Key::Real(n) => match self.fs.arc(*n, f) {
                Some(v) => Some(self.real(v)),
                None => self.sig.approp(at.ty, f).map(|ty| At { key: Key::Implicit(*n, vec![f]), ty }),
            },
            Key::Implicit(n, path) => self.sig.approp(at.ty, f).map(|ty| {
                let mut path = path.clone();
                path.push(f);
                At { key: Key::Implicit(*n, path), ty }
            }),
        }
    }

    /// Every variable binding under which `at` satisfies `d`.
    fn sat(&self, at: &At, d: &Description, env: Env) -> Vec<Env> {
        match d {
            Description::Type(t) => {
                if self.sig.subsumes(*t, at.ty) {
                    vec![env]
                } else {
                    vec![]
                }
            }
            Description::Feat(f, d) => match self.child(at, *f) {
                Some(v) => self.sat(&v, d, env),
                None => vec![],
            },
            Description::Conj(ds) => {
                ds.iter().fold(vec![env], |envs, d| envs.into_iter().flat_map(|e| self.sat(at, d, e)).collect())
            }
            Description::Disj(ds) => ds.iter().flat_map(|d| self.sat(at, d, env.clone())).collect(),
            Description::Var(v) if v == "_" => vec![env],
            Description::Var(v) => match env.get(v) {
                Some(k) if *k == at.key => vec![env],
                Some(_) => vec![],
                None => {
                    let mut env = env;
                    env.insert(v.clone(), at.key.clone());
                    vec![env]
                }
            },
            Description::List(items, tail) => {
                let Some(lt) = self.sig.list_types() else { return vec![] };
                let mut envs = vec![(at.clone(), env)];
                for item in items {
                    let mut next = Vec::new();
                    for (cell, e) in envs {
                        if !self.sig.subsumes(lt.ne_list, cell.ty) {
                            continue;
                        }
                        let (Some(hd), Some(tl)) = (self.child(&cell, lt.hd), self.child(&cell, lt.tl)) else {
                            continue;
                        };
                        next.extend(self.sat(&hd, item, e).into_iter().map(|e| (tl.clone(), e)));
                    }
                    envs = next;
                }
                let end = match tail {
                    Some(t) => (**t).clone(),
                    None => Description::Type(lt.e_list),
                };
                envs.into_iter().flat_map(|(cell, e)| self.sat(&cell, &end, e)).collect()
            }
        }
    }
}

/// Node `n` of `fs` satisfies `d` under some binding of its variables.
pub fn satisfies(sig: &Signature, fs: &FeatureStructure, n: NodeId, d: &Description) -> bool {
    let c = Checker { sig, fs };
    !c.sat(&c.real(n), d, Env::new()).is_empty()
}

/// A node that fails a grammar constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Feature path from the root to the node, or to the node lacking the
    /// feature when the value is implicit.
    pub path: Vec<String>,
    pub ty: String,
    pub antecedent: String,
}

/// Check every node of `fs` against every constraint whose antecedent
/// subsumes the node's type. Each node is checked once against its own
/// constraints, so a cycle justifies itself.
///
/// An absent feature whose value type is compatible with some antecedent is
/// reported too: nothing shows that a value of that type satisfies the
/// constraint.
pub fn admissible(g: &Grammar, fs: &FeatureStructure) -> Result<(), Violation> {
    let sig = g.signature();
    let c = Checker { sig, fs };
    for (n, path) in paths(sig, fs) {
        let at = c.real(n);
        for con in g.constraints() {
            if sig.subsumes(con.antecedent, at.ty) && c.sat(&at, &con.consequent, Env::new()).is_empty() {
                return Err(Violation {
                    path: path.clone(),
                    ty: sig.type_name(at.ty).to_string(),
                    antecedent: sig.type_name(con.antecedent).to_string(),
                });
            }
        }
        for &(f, vt) in sig.appropriate(at.ty) {
            if fs.arc(n, f).is_some() {
                continue;
            }
            if let Some(con) = g.constraints().iter().find(|con| sig.glb(con.antecedent, vt).is_some()) {
                let mut path = path.clone();
                path.push(sig.feature_name(f).to_uppercase());
                return Err(Violation {
                    path,
                    ty: sig.type_name(vt).to_string(),
                    antecedent: sig.type_name(con.antecedent).to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Reachable nodes with a shortest feature path to each.
fn paths(sig: &Signature, fs: &FeatureStructure) -> Vec<(NodeId, Vec<String>)> {
    let g = fs.graph();
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::from([(g.deref(fs.root()), Vec::new())]);
    while let Some((n, path)) = queue.pop_front() {
        if seen.insert(n, ()).is_some() {
            continue;
        }
        for &(f, v) in fs.arcs(n) {
            let mut p: Vec<String> = path.clone();
            p.push(sig.feature_name(f).to_uppercase());
            queue.push_back((g.deref(v), p));
        }
        out.push((n, path));
    }
    out
}

/// Every arc is appropriate for its source, and every value is at least as
/// specific as the feature's value restriction.
pub fn well_formed(sig: &Signature, fs: &FeatureStructure) -> Result<(), String> {
    for n in fs.nodes() {
        let ty = fs.ty(n);
        for &(f, v) in fs.arcs(n) {
            let Some(want) = sig.approp(ty, f) else {
                return Err(format!("`{}` is not appropriate for `{}`", sig.feature_name(f), sig.type_name(ty)));
            };
            let got = fs.ty(v);
            if !sig.subsumes(want, got) {
                return Err(format!(
                    "`{}:{}` on `{}` is not subsumed by `{}`",
                    sig.feature_name(f),
                    sig.type_name(got),
                    sig.type_name(ty),
                    sig.type_name(want)
                ));
            }
        }
    }
    Ok(())
}

/// A string equal for two structures exactly when they are isomorphic.
pub fn canonical_key(sig: &Signature, fs: &FeatureStructure) -> String {
    let g = fs.graph();
    let mut number: HashMap<NodeId, usize> = HashMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::from([g.deref(fs.root())]);
    number.insert(g.deref(fs.root()), 0);
    while let Some(n) = queue.pop_front() {
        order.push(n);
        let mut arcs = fs.arcs(n).to_vec();
        arcs.sort_by_key(|&(f, _)| f);
        for (_, v) in arcs {
            let v = g.deref(v);
            if !number.contains_key(&v) {
                number.insert(v, number.len());
                queue.push_back(v);
            }
        }
    }
    let mut out = String::new();
    for n in order {
        let mut arcs = fs.arcs(n).to_vec();
        arcs.sort_by_key(|&(f, _)| f);
        let _ = write!(out, "{}(", sig.type_name(fs.ty(n)));
        for (f, v) in arcs {
            let _ = write!(out, "{}={},", sig.feature_name(f), number[&g.deref(v)]);
        }
        out.push_str(");");
    }
    out
}

pub fn isomorphic(sig: &Signature, a: &FeatureStructure, b: &FeatureStructure) -> bool {
    canonical_key(sig, a) == canonical_key(sig, b)
}

/// `general` subsumes `specific`: a map from the nodes of `general` into
/// `specific` sends root to root, preserves arcs and specialises types.
pub fn subsumes_fs(sig: &Signature, general: &FeatureStructure, specific: &FeatureStructure) -> bool {
    let (ga, gb) = (general.graph(), specific.graph());
    let mut map: HashMap<NodeId, NodeId> = HashMap::new();
    let mut stack = vec![(ga.deref(general.root()), gb.deref(specific.root()))];
    while let Some((a, b)) = stack.pop() {
        match map.get(&a) {
            Some(&m) if m == b => continue,
            Some(_) => return false,
            None => {
                map.insert(a, b);
            }
        }
        if !sig.subsumes(general.ty(a), specific.ty(b)) {
            return false;
        }
        for &(f, v) in general.arcs(a) {
            match specific.arc(b, f) {
                Some(w) => stack.push((ga.deref(v), gb.deref(w))),
                None => return false,
            }
        }
    }
    true
}

/// Bounds for [`expand`].
#[derive(Clone, Copy, Debug)]
pub struct ExpandLimits {
    pub max_nodes: usize,
    pub max_results: usize,
}

impl Default for ExpandLimits {
    fn default() -> Self {
        ExpandLimits { max_nodes: 200, max_results: 10_000 }
    }
}

/// Every totally well-typed, sort-resolved extension of `fs` obtained by
/// adding the missing appropriate features and choosing a minimal type for
/// every node. No constraints are applied. `None` when a limit is exceeded.
pub fn expand(sig: &Signature, fs: &FeatureStructure, limits: ExpandLimits) -> Option<Vec<FeatureStructure>> {
    let mut out = Vec::new();
    let mut stack = vec![fs.copy()];
    while let Some(mut s) = stack.pop() {
        if s.node_count() > limits.max_nodes {
            return None;
        }
        let todo = s.nodes().into_iter().find_map(|n| {
            let ty = s.ty(n);
            let missing: Vec<FeatId> =
                sig.appropriate(ty).iter().map(|&(f, _)| f).filter(|&f| s.arc(n, f).is_none()).collect();
            if !missing.is_empty() {
                Some((n, Some(missing)))
            } else if !sig.is_minimal(ty) {
                Some((n, None))
            } else {
                None
            }
        });
        match todo {
            None => {
                out.push(s);
                if out.len() > limits.max_results {
                    return None;
                }
            }
            Some((n, Some(missing))) => {
                s.fill_approp(sig, n, &missing).expect("appropriate by construction");
                stack.push(s);
            }
            Some((n, None)) => {
                for &m in sig.minimal_subtypes(s.ty(n)).iter().rev() {
                    let mut c = s.copy();
                    if c.retype(sig, n, m) {
                        stack.push(c);
                    }
                }
            }
        }
    }
    Some(out)
}

/// Canonical keys of the expansions of all `solutions`, sorted and
/// deduplicated. `None` when some expansion exceeds the limits.
pub fn expanded_keys(sig: &Signature, solutions: &[FeatureStructure], limits: ExpandLimits) -> Option<Vec<String>> {
    let mut keys = Vec::new();
    for s in solutions {
        keys.extend(expand(sig, s, limits)?.iter().map(|e| canonical_key(sig, e)));
    }
    keys.sort();
    keys.dedup();
    Some(keys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptions::{parse_description, parse_grammar};
    use crate::grammars;

    fn build(g: &Grammar, src: &str) -> (FeatureStructure, Description) {
        let d = parse_description(g.signature(), src).unwrap();
        (g.build(&d).unwrap(), d)
    }

    #[test]
    fn implicit_values_satisfy_their_type() {
        let g = parse_grammar(grammars::SHARED_VALUES).unwrap();
        let (fs, _) = build(&g, "a");
        let sig = g.signature();
        assert!(satisfies(sig, &fs, fs.root(), &parse_description(sig, "f:top").unwrap()));
        assert!(!satisfies(sig, &fs, fs.root(), &parse_description(sig, "f:a").unwrap()));
        // Two absent values are not known to be shared.
        assert!(!satisfies(sig, &fs, fs.root(), &parse_description(sig, "f:X, g:X").unwrap()));
    }

    #[test]
    fn disjunction_backtracks_over_bindings() {
        let g = parse_grammar(grammars::SHARED_VALUES).unwrap();
        let (fs, _) = build(&g, "f:(X=b), g:(Y=c)");
        let sig = g.signature();
        let d = parse_description(sig, "(f:Z ; g:Z), g:Z").unwrap();
        assert!(satisfies(sig, &fs, fs.root(), &d));
        let d = parse_description(sig, "(f:Z ; g:Z), f:Z, g:Z").unwrap();
        assert!(!satisfies(sig, &fs, fs.root(), &d));
    }

    #[test]
    fn lists_match_cell_by_cell() {
        let g = parse_grammar(grammars::APPEND_C).unwrap();
        let sig = g.signature();
        let (fs, d) = build(&g, "[a, b | T]");
        assert!(satisfies(sig, &fs, fs.root(), &d));
        assert!(!satisfies(sig, &fs, fs.root(), &parse_description(sig, "[a, b]").unwrap()));
        assert!(!satisfies(sig, &fs, fs.root(), &parse_description(sig, "[a, c | _]").unwrap()));
    }

    #[test]
    fn admissibility_checks_each_node() {
        let g = parse_grammar(grammars::SHARED_VALUES).unwrap();
        let (ok, _) = build(&g, "c, f:X=c, g:X");
        // Absent arcs of type `top` could be `a`, which is constrained.
        assert!(admissible(&g, &ok).is_err());
        let (ok, _) = build(&g, "X=(c, f:X, g:X)");
        assert_eq!(admissible(&g, &ok), Ok(()));
        let (bad, _) = build(&g, "X=(c, f:X, g:c)");
        let v = admissible(&g, &bad).unwrap_err();
        assert_eq!((v.ty.as_str(), v.antecedent.as_str()), ("c", "a"));
    }

    #[test]
    fn keys_ignore_node_numbering() {
        let g = parse_grammar(grammars::SHARED_VALUES).unwrap();
        let (a, _) = build(&g, "f:X=b, g:X");
        let (b, _) = build(&g, "g:Y, f:Y=b");
        let (c, _) = build(&g, "f:b, g:b");
        let sig = g.signature();
        assert!(isomorphic(sig, &a, &b));
        assert!(!isomorphic(sig, &a, &c));
        assert!(subsumes_fs(sig, &c, &a));
        assert!(!subsumes_fs(sig, &a, &c));
    }

    #[test]
    fn expansion_resolves_types_and_features() {
        let g = parse_grammar(grammars::EMPTY).unwrap();
        let sig = g.signature();
        let (fs, _) = build(&g, "[atom]");
        let keys = expanded_keys(sig, &[fs], ExpandLimits::default()).unwrap();
        assert_eq!(keys.len(), 2);
        let (fs, _) = build(&g, "list");
        assert!(expand(sig, &fs, ExpandLimits::default()).is_none());
    }
}
