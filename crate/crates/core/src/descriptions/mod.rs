//! The description language: typed feature terms with variables,
//! conjunction, disjunction and list sugar, plus grammar loading.
//!
//! ```
//! use tfsc::descriptions::{parse_grammar, parse_description};
//!
//! let g = parse_grammar("
//!     type top sub [a].
//!     type a sub [b, c] intro [f:top, g:top].
//!     a => (f:X, g:X).
//!     b => g:a.
//! ").unwrap();
//! assert_eq!(g.constraints().len(), 2);
//! let d = parse_description(g.signature(), "f:(b ; c)").unwrap();
//! assert_eq!(tfsc::descriptions::to_dnf(&d, 10).unwrap().len(), 2);
//! ```

mod build;
mod dnf;
pub mod syntax;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use build::{build_into, BuildError};
pub use dnf::{to_dnf, DnfLimitExceeded, DEFAULT_DNF_LIMIT};
use syntax::{Pos, RawDesc, Statement, SyntaxError};

use crate::fstruct::{FeatureStructure, Graph};
use crate::signature::{FeatId, Signature, SignatureBuilder, SignatureError, TypeId};

/// A resolved description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Description {
    Type(TypeId),
    Feat(FeatId, Box<Description>),
    Conj(Vec<Description>),
    Disj(Vec<Description>),
    /// A variable; `_` is anonymous and never shared.
    Var(String),
    /// `[d1, ..., dn | tail]`; no tail means the list ends in `e_list`.
    List(Vec<Description>, Option<Box<Description>>),
}

impl Description {
    /// Copy with every named variable prefixed, so descriptions from
    /// different scopes can be conjoined without capture.
    pub fn rename_vars(&self, prefix: &str) -> Description {
        match self {
            Description::Var(v) if v == "_" => self.clone(),
            Description::Var(v) => Description::Var(format!("{prefix}{v}")),
            Description::Type(_) => self.clone(),
            Description::Feat(f, d) => Description::Feat(*f, Box::new(d.rename_vars(prefix))),
            Description::Conj(ds) => Description::Conj(ds.iter().map(|d| d.rename_vars(prefix)).collect()),
            Description::Disj(ds) => Description::Disj(ds.iter().map(|d| d.rename_vars(prefix)).collect()),
            Description::List(items, tail) => Description::List(
                items.iter().map(|d| d.rename_vars(prefix)).collect(),
                tail.as_ref().map(|t| Box::new(t.rename_vars(prefix))),
            ),
        }
    }

    pub fn is_conjunctive(&self) -> bool {
        match self {
            Description::Type(_) | Description::Var(_) => true,
            Description::Feat(_, d) => d.is_conjunctive(),
            Description::Conj(ds) => ds.iter().all(Description::is_conjunctive),
            Description::Disj(_) => false,
            Description::List(items, tail) => {
                items.iter().all(Description::is_conjunctive) && tail.as_deref().is_none_or(Description::is_conjunctive)
            }
        }
    }

    /// Render in concrete syntax.
    pub fn display<'a>(&'a self, sig: &'a Signature) -> impl fmt::Display + 'a {
        DisplayDesc { d: self, sig }
    }
}

struct DisplayDesc<'a> {
    d: &'a Description,
    sig: &'a Signature,
}

impl fmt::Display for DisplayDesc<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |d| DisplayDesc { d, sig: self.sig };
        match self.d {
            Description::Type(t) => f.write_str(self.sig.type_name(*t)),
            Description::Var(v) => f.write_str(v),
            Description::Feat(g, d) => write!(f, "{}:{}", self.sig.feature_name(*g).to_uppercase(), sub(d)),
            Description::Conj(ds) | Description::Disj(ds) => {
                let sep = if matches!(self.d, Description::Conj(_)) { ", " } else { " ; " };
                f.write_str("(")?;
                for (i, d) in ds.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write!(f, "{}", sub(d))?;
                }
                f.write_str(")")
            }
            Description::List(items, tail) => {
                f.write_str("[")?;
                for (i, d) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", sub(d))?;
                }
                if let Some(t) = tail {
                    write!(f, " | {}", sub(t))?;
                }
                f.write_str("]")
            }
        }
    }
}

/// An implicational constraint `antecedent => consequent`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub antecedent: TypeId,
    pub consequent: Description,
    /// Position of the first declaration.
    pub pos: Pos,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GrammarError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("unknown type `{name}` at {pos}")]
    UnknownTypeInDescription { name: String, pos: Pos },
    #[error("unknown feature `{name}` at {pos}")]
    UnknownFeature { name: String, pos: Pos },
    #[error("list notation at {pos} needs `e_list`, `ne_list` and features `hd`, `tl` on `ne_list`")]
    NoListTypes { pos: Pos },
    #[error("feature `{feature}` at {pos} is not appropriate for `{ty}`")]
    FeatureNotAppropriate { ty: String, feature: String, pos: Pos },
}

/// A signature together with its constraints and compiler directives.
#[derive(Clone, Debug)]
pub struct Grammar {
    signature: Arc<Signature>,
    constraints: Vec<Constraint>,
    by_type: Vec<Option<usize>>,
    order_feats: HashMap<TypeId, Vec<FeatId>>,
}

impl Grammar {
    /// Attach constraints to a signature. Several constraints on one type
    /// are conjoined, each keeping its own variable scope.
    pub fn new(signature: Arc<Signature>, constraints: Vec<Constraint>) -> Grammar {
        let mut merged: Vec<Constraint> = Vec::new();
        let mut parts: Vec<Vec<Description>> = Vec::new();
        let mut by_type: Vec<Option<usize>> = vec![None; signature.len()];
        for c in constraints {
            match by_type[c.antecedent.index()] {
                Some(i) => parts[i].push(c.consequent),
                None => {
                    by_type[c.antecedent.index()] = Some(merged.len());
                    parts.push(vec![c.consequent.clone()]);
                    merged.push(c);
                }
            }
        }
        for (c, ds) in merged.iter_mut().zip(parts) {
            if ds.len() > 1 {
                c.consequent = Description::Conj(
                    ds.iter().enumerate().map(|(i, d)| d.rename_vars(&format!("{}.", i + 1))).collect(),
                );
            }
        }
        Grammar { signature, constraints: merged, by_type, order_feats: HashMap::new() }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        &self.signature
    }

    /// One constraint per defined type, in order of first declaration.
    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Index into [`constraints`](Self::constraints) of the constraint on `t`.
    pub fn constraint_index(&self, t: TypeId) -> Option<usize> {
        self.by_type[t.index()]
    }

    pub fn constraint(&self, t: TypeId) -> Option<&Constraint> {
        self.constraint_index(t).map(|i| &self.constraints[i])
    }

    pub fn set_feature_order(&mut self, t: TypeId, feats: Vec<FeatId>) {
        self.order_feats.insert(t, feats);
    }

    /// The order in which features of a node of type `t` are visited: the
    /// `order_feats` list of the most specific type subsuming `t` that has
    /// one, then the remaining features in declaration order.
    pub fn feature_order(&self, t: TypeId) -> Vec<FeatId> {
        let sig = &*self.signature;
        let directive = self
            .order_feats
            .iter()
            .filter(|(&u, _)| sig.subsumes(u, t))
            .max_by_key(|(&u, _)| (sig.depth(u), std::cmp::Reverse(u)))
            .map(|(_, fs)| fs.as_slice())
            .unwrap_or(&[]);
        let mut out: Vec<FeatId> = directive.iter().copied().filter(|&f| sig.approp(t, f).is_some()).collect();
        for &(f, _) in sig.appropriate(t) {
            if !out.contains(&f) {
                out.push(f);
            }
        }
        out
    }

    /// The `order_feats` directives as declared.
    pub fn feature_directives(&self) -> &HashMap<TypeId, Vec<FeatId>> {
        &self.order_feats
    }

    /// Most general structure satisfying a conjunctive description.
    pub fn build(&self, d: &Description) -> Result<FeatureStructure, BuildError> {
        let mut graph = Graph::new();
        let root = graph.add_node(self.signature.top());
        let mut env = HashMap::new();
        build_into(&self.signature, &mut graph, root, d, &mut env)?;
        graph.commit();
        Ok(FeatureStructure::from_graph(&graph, root))
    }
}

/// Load a grammar file: type declarations, constraints and directives in any
/// order.
pub fn parse_grammar(source: &str) -> Result<Grammar, GrammarError> {
    let statements = syntax::parse_statements(source)?;
    let mut builder = SignatureBuilder::new();
    for stmt in &statements {
        match stmt {
            Statement::TypeDecl { name, subs, intro, .. } => {
                let subs: Vec<&str> = subs.iter().map(|(s, _)| s.as_str()).collect();
                let intro: Vec<(&str, &str)> = intro.iter().map(|(f, t, _)| (f.as_str(), t.as_str())).collect();
                builder.declare(name, &subs, &intro);
            }
            Statement::OrderTypes { types, .. } => {
                let types: Vec<&str> = types.iter().map(|(s, _)| s.as_str()).collect();
                builder.order_types(&types);
            }
            _ => {}
        }
    }
    let sig = Arc::new(builder.build()?);
    let mut constraints = Vec::new();
    let mut order_feats = Vec::new();
    for stmt in statements {
        match stmt {
            Statement::Constraint { antecedent, consequent, pos } => {
                let antecedent =
                    sig.type_id(&antecedent).ok_or(GrammarError::UnknownTypeInDescription { name: antecedent, pos })?;
                let consequent = resolve(&sig, &consequent)?;
                constraints.push(Constraint { antecedent, consequent, pos });
            }
            Statement::OrderFeats { ty, feats, pos } => {
                let t = sig.type_id(&ty).ok_or(GrammarError::UnknownTypeInDescription { name: ty.clone(), pos })?;
                let mut ids = Vec::new();
                for (f, fpos) in feats {
                    let id = sig.feature_id(&f).ok_or(GrammarError::UnknownFeature { name: f.clone(), pos: fpos })?;
                    if sig.approp(t, id).is_none() {
                        return Err(GrammarError::FeatureNotAppropriate { ty, feature: f, pos: fpos });
                    }
                    ids.push(id);
                }
                order_feats.push((t, ids));
            }
            _ => {}
        }
    }
    let mut g = Grammar::new(sig, constraints);
    for (t, ids) in order_feats {
        g.set_feature_order(t, ids);
    }
    Ok(g)
}

/// Parse a description over `sig`, e.g. a query.
pub fn parse_description(sig: &Signature, source: &str) -> Result<Description, GrammarError> {
    resolve(sig, &syntax::parse_raw_description(source)?)
}

fn resolve(sig: &Signature, raw: &RawDesc) -> Result<Description, GrammarError> {
    Ok(match raw {
        RawDesc::Type(name, pos) => Description::Type(
            sig.type_id(name)
                .ok_or_else(|| GrammarError::UnknownTypeInDescription { name: name.clone(), pos: *pos })?,
        ),
        RawDesc::Feat(name, d, pos) => {
            let f =
                sig.feature_id(name).ok_or_else(|| GrammarError::UnknownFeature { name: name.clone(), pos: *pos })?;
            Description::Feat(f, Box::new(resolve(sig, d)?))
        }
        RawDesc::Conj(ds) => Description::Conj(ds.iter().map(|d| resolve(sig, d)).collect::<Result<_, _>>()?),
        RawDesc::Disj(ds) => Description::Disj(ds.iter().map(|d| resolve(sig, d)).collect::<Result<_, _>>()?),
        RawDesc::Var(v, _) => Description::Var(v.clone()),
        RawDesc::List(items, tail, pos) => {
            let lt = sig.list_types().ok_or(GrammarError::NoListTypes { pos: *pos })?;
            if items.is_empty() && tail.is_none() {
                Description::Type(lt.e_list)
            } else {
                Description::List(
                    items.iter().map(|d| resolve(sig, d)).collect::<Result<_, _>>()?,
                    tail.as_deref().map(|t| resolve(sig, t)).transpose()?.map(Box::new),
                )
            }
        }
    })
}
