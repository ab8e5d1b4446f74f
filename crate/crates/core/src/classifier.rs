//! Static partition of types into constrained, hiding and simple.
//!
//! A type is constrained when it has a common subtype with some constraint
//! antecedent. A hiding type is not constrained itself, but it or one of its
//! subtypes carries a feature whose value restriction is constrained or
//! hiding. Everything else is simple and never needs checking at run time.
//!
//! ```
//! use tfsc::{classifier::classify, descriptions::parse_grammar, grammars};
//! let g = parse_grammar(grammars::APPEND_C).unwrap();
//! let cls = classify(&g);
//! let names = |s: &std::collections::BTreeSet<_>| {
//!     let mut v: Vec<_> = s.iter().map(|&t| g.signature().type_name(t)).collect();
//!     v.sort();
//!     v
//! };
//! assert_eq!(names(&cls.constrained), ["append_c", "top"]);
//! assert_eq!(names(&cls.hiding), ["list", "ne_list"]);
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::descriptions::Grammar;
use crate::signature::{FeatId, Signature, TypeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Constrained,
    Hiding,
    Simple,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeClassification {
    pub defined: BTreeSet<TypeId>,
    pub constrained: BTreeSet<TypeId>,
    pub hiding: BTreeSet<TypeId>,
    pub simple: BTreeSet<TypeId>,
    /// For constrained and hiding types: features whose value restriction is
    /// constrained or hiding, in declaration order.
    pub hiding_features: BTreeMap<TypeId, Vec<FeatId>>,
}

impl TypeClassification {
    pub fn class(&self, t: TypeId) -> Class {
        if self.constrained.contains(&t) {
            Class::Constrained
        } else if self.hiding.contains(&t) {
            Class::Hiding
        } else {
            Class::Simple
        }
    }

    /// Constrained or hiding.
    pub fn needs_checking(&self, t: TypeId) -> bool {
        self.class(t) != Class::Simple
    }

    /// Empty for simple types.
    pub fn hiding_features(&self, t: TypeId) -> &[FeatId] {
        self.hiding_features.get(&t).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Three sorted class lists followed by one hiding-feature line per
    /// constrained or hiding type.
    pub fn dump(&self, sig: &Signature) -> String {
        let sorted = |set: &BTreeSet<TypeId>| {
            let mut names: Vec<&str> = set.iter().map(|&t| sig.type_name(t)).collect();
            names.sort_unstable();
            names.iter().map(|n| format!(" {n}")).collect::<String>()
        };
        let mut out = String::new();
        for (label, set) in [("constrained", &self.constrained), ("hiding", &self.hiding), ("simple", &self.simple)] {
            writeln!(out, "{label}:{}", sorted(set)).unwrap();
        }
        let mut rows: Vec<(&str, String)> = self
            .hiding_features
            .iter()
            .map(|(&t, fs)| {
                let names: String = fs.iter().map(|&f| format!(" {}", sig.feature_name(f).to_uppercase())).collect();
                (sig.type_name(t), names)
            })
            .collect();
        rows.sort_unstable();
        for (t, fs) in rows {
            writeln!(out, "hiding_features {t}:{fs}").unwrap();
        }
        out
    }
}

/// Two types interact when they have a common subtype.
pub fn interact(sig: &Signature, a: TypeId, b: TypeId) -> bool {
    sig.glb(a, b).is_some()
}

fn constrained_set(g: &Grammar) -> (BTreeSet<TypeId>, BTreeSet<TypeId>) {
    let sig = g.signature();
    let defined: BTreeSet<TypeId> = g.constraints().iter().map(|c| c.antecedent).collect();
    let constrained = sig.types().filter(|&t| defined.iter().any(|&d| interact(sig, t, d))).collect();
    (defined, constrained)
}

fn finish(
    sig: &Signature,
    defined: BTreeSet<TypeId>,
    constrained: BTreeSet<TypeId>,
    hiding: BTreeSet<TypeId>,
) -> TypeClassification {
    let checked = |t: &TypeId| constrained.contains(t) || hiding.contains(t);
    let simple = sig.types().filter(|t| !checked(t)).collect();
    let hiding_features = sig
        .types()
        .filter(checked)
        .map(|t| {
            let fs = sig.appropriate(t).iter().filter(|(_, v)| checked(v)).map(|&(f, _)| f).collect();
            (t, fs)
        })
        .collect();
    TypeClassification { defined, constrained, hiding, simple, hiding_features }
}

/// Classify with a worklist over the reverse appropriateness relation.
pub fn classify(g: &Grammar) -> TypeClassification {
    let sig = g.signature();
    let (defined, constrained) = constrained_set(g);
    // carriers[u]: types with some feature whose value restriction is u.
    let mut carriers: Vec<Vec<TypeId>> = vec![Vec::new(); sig.len()];
    for t in sig.types() {
        for &(_, v) in sig.appropriate(t) {
            if !carriers[v.index()].contains(&t) {
                carriers[v.index()].push(t);
            }
        }
    }
    let mut hiding = BTreeSet::new();
    let mut work: Vec<TypeId> = constrained.iter().copied().collect();
    while let Some(u) = work.pop() {
        for &t0 in &carriers[u.index()] {
            for t in sig.supertypes_of(t0) {
                if !constrained.contains(&t) && hiding.insert(t) {
                    work.push(t);
                }
            }
        }
    }
    finish(sig, defined, constrained, hiding)
}

/// Classify by recomputing the hiding condition for every type until
/// nothing changes. Agrees with [`classify`]; kept as a cross-check.
pub fn classify_round_robin(g: &Grammar) -> TypeClassification {
    let sig = g.signature();
    let (defined, constrained) = constrained_set(g);
    let mut hiding = BTreeSet::new();
    loop {
        let mut changed = false;
        for t in sig.types() {
            if constrained.contains(&t) || hiding.contains(&t) {
                continue;
            }
            let hides = sig
                .subtypes_of(t)
                .any(|t0| sig.appropriate(t0).iter().any(|(_, v)| constrained.contains(v) || hiding.contains(v)));
            if hides {
                hiding.insert(t);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    finish(sig, defined, constrained, hiding)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptions::parse_grammar;
    use crate::grammars;

    fn names(sig: &Signature, set: &BTreeSet<TypeId>) -> Vec<String> {
        let mut v: Vec<String> = set.iter().map(|&t| sig.type_name(t).to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn append_classes() {
        let g = parse_grammar(grammars::APPEND_C).unwrap();
        let sig = g.signature();
        let cls = classify(&g);
        assert_eq!(names(sig, &cls.defined), ["append_c"]);
        assert_eq!(names(sig, &cls.constrained), ["append_c", "top"]);
        assert_eq!(names(sig, &cls.hiding), ["list", "ne_list"]);
        assert_eq!(names(sig, &cls.simple), ["a", "b", "c", "constant", "e_list"]);
        let ne_list = sig.type_id("ne_list").unwrap();
        let hf: Vec<&str> = cls.hiding_features(ne_list).iter().map(|&f| sig.feature_name(f)).collect();
        assert_eq!(hf, ["hd", "tl"]);
        assert!(cls.hiding_features(sig.type_id("list").unwrap()).is_empty());
        assert_eq!(cls, classify_round_robin(&g));
    }

    #[test]
    fn interaction() {
        let g = parse_grammar(grammars::APPEND_C).unwrap();
        let sig = g.signature();
        let t = |n| sig.type_id(n).unwrap();
        assert!(interact(sig, t("list"), t("list")));
        assert!(interact(sig, t("top"), t("append_c")));
        assert!(!interact(sig, t("e_list"), t("ne_list")));
    }

    #[test]
    fn constraint_free_is_all_simple() {
        let g = parse_grammar(grammars::EMPTY).unwrap();
        let cls = classify(&g);
        assert!(cls.constrained.is_empty() && cls.hiding.is_empty() && cls.hiding_features.is_empty());
        assert_eq!(cls.simple.len(), g.signature().len());
    }

    #[test]
    fn dump_format() {
        let g = parse_grammar(grammars::APPEND_C).unwrap();
        let text = classify(&g).dump(g.signature());
        assert_eq!(
            text,
            "constrained: append_c top\n\
             hiding: list ne_list\n\
             simple: a b c constant e_list\n\
             hiding_features append_c: ARG1 ARG2 ARG3 GOALS\n\
             hiding_features list:\n\
             hiding_features ne_list: HD TL\n\
             hiding_features top:\n"
        );
    }
}
