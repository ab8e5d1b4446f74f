//! Type hierarchy and appropriateness conditions.
//!
//! The hierarchy is read under the closed-world interpretation: every object
//! is of exactly one minimal type, and a non-minimal type denotes the union of
//! its minimal subtypes. Loading enforces the meet condition (unique greatest
//! lower bounds), so `glb` is a total function onto `Option<TypeId>`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::descriptions::syntax::{self, Statement, SyntaxError};

/// Index of a type within its [`Signature`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeId(u32);

impl TypeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn from_index(i: usize) -> Self {
        TypeId(i as u32)
    }
}

/// Index of a feature name within its [`Signature`]. Feature ids are
/// numbered in declaration order, which is the default feature order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatId(u32);

impl FeatId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unexpected statement at {0}: only type declarations and `order_types` belong in a signature")]
    NotASignatureStatement(syntax::Pos),
    #[error("type hierarchy contains a cycle through `{0}`")]
    CycleInHierarchy(String),
    #[error("no `top` type is declared")]
    MissingRoot,
    #[error("`top` cannot have a supertype (declared under `{0}`)")]
    RootHasSupertype(String),
    #[error("type `{0}` is not declared as a subtype of anything")]
    Unrooted(String),
    #[error("types `{0}` and `{1}` share subtypes but have no unique greatest common subtype")]
    NonUniqueGlb(String, String),
    #[error("feature `{feature}` is introduced at both `{first}` and `{second}`")]
    FeatureIntroductionViolation { feature: String, first: String, second: String },
    #[error("value restriction of `{feature}` on `{ty}` is not compatible with the inherited restriction")]
    NonMonotonicApprop { ty: String, feature: String },
    #[error("feature `{feature}` is declared twice on `{ty}`")]
    DuplicateFeature { ty: String, feature: String },
    #[error("unknown type `{0}`")]
    UnknownType(String),
}

/// The list encoding used by `[a, b | T]` sugar.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ListTypes {
    pub e_list: TypeId,
    pub ne_list: TypeId,
    pub hd: FeatId,
    pub tl: FeatId,
}

/// An immutable, validated type signature.
#[derive(Clone, Debug)]
pub struct Signature {
    names: Vec<String>,
    by_name: HashMap<String, TypeId>,
    top: TypeId,
    subtypes: Vec<Vec<TypeId>>,
    supertypes: Vec<Vec<TypeId>>,
    expansion: Vec<Vec<TypeId>>,
    minimal: Vec<Vec<TypeId>>,
    below: Vec<FixedBitSet>,
    depth: Vec<usize>,
    glb: Vec<Option<TypeId>>,
    features: Vec<String>,
    feat_by_name: HashMap<String, FeatId>,
    approp: Vec<Vec<(FeatId, TypeId)>>,
    introducer: Vec<TypeId>,
}

/// Collects declarations and validates them into a [`Signature`].
#[derive(Clone, Debug, Default)]
pub struct SignatureBuilder {
    order: Vec<String>,
    subs: HashMap<String, Vec<String>>,
    intro: HashMap<String, Vec<(String, String)>>,
    type_order: Vec<String>,
}

impl SignatureBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn mention(&mut self, name: &str) {
        if !self.subs.contains_key(name) {
            self.order.push(name.to_string());
            self.subs.insert(name.to_string(), Vec::new());
            self.intro.insert(name.to_string(), Vec::new());
        }
    }

    /// Declare `name` with immediate subtypes and locally introduced (or
    /// narrowed) features. Repeated declarations of one type accumulate.
    pub fn declare<S: AsRef<str>>(&mut self, name: &str, subs: &[S], intro: &[(S, S)]) -> &mut Self {
        self.mention(name);
        for s in subs {
            self.mention(s.as_ref());
            let list = self.subs.get_mut(name).unwrap();
            if !list.iter().any(|x| x == s.as_ref()) {
                list.push(s.as_ref().to_string());
            }
        }
        let list = self.intro.get_mut(name).unwrap();
        for (f, t) in intro {
            list.push((f.as_ref().to_ascii_lowercase(), t.as_ref().to_string()));
        }
        self
    }

    /// Preferred expansion order of sibling types (`order_types` directive).
    pub fn order_types<S: AsRef<str>>(&mut self, types: &[S]) -> &mut Self {
        self.type_order.extend(types.iter().map(|s| s.as_ref().to_string()));
        self
    }

    pub fn build(&self) -> Result<Signature, SignatureError> {
        let n = self.order.len();
        let names = self.order.clone();
        let by_name: HashMap<String, TypeId> =
            names.iter().enumerate().map(|(i, s)| (s.clone(), TypeId::from_index(i))).collect();
        let top = *by_name.get("top").ok_or(SignatureError::MissingRoot)?;

        let mut subtypes = vec![Vec::new(); n];
        let mut supertypes = vec![Vec::new(); n];
        for (i, name) in names.iter().enumerate() {
            for s in &self.subs[name] {
                let j = by_name[s];
                subtypes[i].push(j);
                supertypes[j.index()].push(TypeId::from_index(i));
            }
        }

        // Kahn's algorithm from parentless types; leftovers lie on a cycle.
        let mut indeg: Vec<usize> = supertypes.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(i) = queue.pop_front() {
            topo.push(TypeId::from_index(i));
            for s in &subtypes[i] {
                indeg[s.index()] -= 1;
                if indeg[s.index()] == 0 {
                    queue.push_back(s.index());
                }
            }
        }
        if topo.len() < n {
            let stuck = (0..n).find(|&i| indeg[i] > 0).unwrap();
            return Err(SignatureError::CycleInHierarchy(names[stuck].clone()));
        }
        if let Some(p) = supertypes[top.index()].first() {
            return Err(SignatureError::RootHasSupertype(names[p.index()].clone()));
        }
        if let Some(i) = (0..n).find(|&i| i != top.index() && supertypes[i].is_empty()) {
            return Err(SignatureError::Unrooted(names[i].clone()));
        }

        let mut depth = vec![0usize; n];
        for &t in &topo {
            for s in &subtypes[t.index()] {
                depth[s.index()] = depth[s.index()].max(depth[t.index()] + 1);
            }
        }

        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for &t in topo.iter().rev() {
            let mut set = FixedBitSet::with_capacity(n);
            set.insert(t.index());
            for s in &subtypes[t.index()] {
                set.union_with(&below[s.index()]);
            }
            below[t.index()] = set;
        }

        let mut glb = vec![None; n * n];
        for i in 0..n {
            glb[i * n + i] = Some(TypeId::from_index(i));
            for j in (i + 1)..n {
                let mut common = below[i].clone();
                common.intersect_with(&below[j]);
                let size = common.count_ones(..);
                if size == 0 {
                    continue;
                }
                let meet = common
                    .ones()
                    .find(|&g| below[g].count_ones(..) == size && below[g].is_superset(&common))
                    .ok_or_else(|| SignatureError::NonUniqueGlb(names[i].clone(), names[j].clone()))?;
                glb[i * n + j] = Some(TypeId::from_index(meet));
                glb[j * n + i] = Some(TypeId::from_index(meet));
            }
        }

        // Features are numbered by first appearance in an `intro` list.
        let mut features = Vec::new();
        let mut feat_by_name = HashMap::new();
        for name in &names {
            for (f, _) in &self.intro[name] {
                if !feat_by_name.contains_key(f) {
                    feat_by_name.insert(f.clone(), FeatId(features.len() as u32));
                    features.push(f.clone());
                }
            }
        }

        let glb_of = |a: TypeId, b: TypeId| glb[a.index() * n + b.index()];
        let subsumes = |a: TypeId, b: TypeId| below[a.index()].contains(b.index());

        let mut approp: Vec<Vec<(FeatId, TypeId)>> = vec![Vec::new(); n];
        let mut introducer: Vec<Option<TypeId>> = vec![None; features.len()];
        for &t in &topo {
            let mut table: BTreeMap<FeatId, TypeId> = BTreeMap::new();
            for p in &supertypes[t.index()] {
                for &(f, v) in &approp[p.index()] {
                    let merged = match table.get(&f) {
                        Some(&w) => glb_of(v, w).ok_or_else(|| SignatureError::NonMonotonicApprop {
                            ty: names[t.index()].clone(),
                            feature: features[f.index()].clone(),
                        })?,
                        None => v,
                    };
                    table.insert(f, merged);
                }
            }
            let mut local_seen = Vec::new();
            for (fname, vname) in &self.intro[&names[t.index()]] {
                let f = feat_by_name[fname];
                if local_seen.contains(&f) {
                    return Err(SignatureError::DuplicateFeature {
                        ty: names[t.index()].clone(),
                        feature: fname.clone(),
                    });
                }
                local_seen.push(f);
                let v = *by_name.get(vname).ok_or_else(|| SignatureError::UnknownType(vname.clone()))?;
                match table.get(&f) {
                    Some(&inherited) => {
                        if !subsumes(inherited, v) {
                            return Err(SignatureError::NonMonotonicApprop {
                                ty: names[t.index()].clone(),
                                feature: fname.clone(),
                            });
                        }
                    }
                    None => {
                        if let Some(first) = introducer[f.index()] {
                            return Err(SignatureError::FeatureIntroductionViolation {
                                feature: fname.clone(),
                                first: names[first.index()].clone(),
                                second: names[t.index()].clone(),
                            });
                        }
                        introducer[f.index()] = Some(t);
                    }
                }
                table.insert(f, v);
            }
            approp[t.index()] = table.into_iter().collect();
        }

        let rank: HashMap<&str, usize> =
            self.type_order.iter().enumerate().rev().map(|(i, s)| (s.as_str(), i)).collect();
        for name in &self.type_order {
            if !by_name.contains_key(name) {
                return Err(SignatureError::UnknownType(name.clone()));
            }
        }
        let expansion: Vec<Vec<TypeId>> = subtypes
            .iter()
            .map(|subs| {
                let mut v = subs.clone();
                v.sort_by_key(|s| rank.get(names[s.index()].as_str()).copied().unwrap_or(usize::MAX));
                v
            })
            .collect();

        let mut sig = Signature {
            names,
            by_name,
            top,
            subtypes,
            supertypes,
            expansion,
            minimal: Vec::new(),
            below,
            depth,
            glb,
            features,
            feat_by_name,
            approp,
            introducer: introducer.into_iter().map(|t| t.expect("every feature has an introducer")).collect(),
        };
        sig.minimal = (0..n).map(|i| sig.collect_minimal(TypeId::from_index(i))).collect();
        Ok(sig)
    }
}

/// Parse and validate a signature from grammar text containing only type
/// declarations (and optionally an `order_types` directive).
pub fn load_signature(source: &str) -> Result<Signature, SignatureError> {
    let mut builder = SignatureBuilder::new();
    for stmt in syntax::parse_statements(source)? {
        match stmt {
            Statement::TypeDecl { name, subs, intro, .. } => {
                let subs: Vec<String> = subs.into_iter().map(|(s, _)| s).collect();
                let intro: Vec<(String, String)> = intro.into_iter().map(|(f, t, _)| (f, t)).collect();
                builder.declare(&name, &subs, &intro);
            }
            Statement::OrderTypes { types, .. } => {
                let types: Vec<String> = types.into_iter().map(|(s, _)| s).collect();
                builder.order_types(&types);
            }
            Statement::Constraint { pos, .. } | Statement::OrderFeats { pos, .. } => {
                return Err(SignatureError::NotASignatureStatement(pos))
            }
        }
    }
    builder.build()
}

impl Signature {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn top(&self) -> TypeId {
        self.top
    }

    /// All types in declaration order.
    pub fn types(&self) -> impl Iterator<Item = TypeId> + '_ {
        (0..self.names.len()).map(TypeId::from_index)
    }

    pub fn type_name(&self, t: TypeId) -> &str {
        &self.names[t.index()]
    }

    pub fn type_id(&self, name: &str) -> Option<TypeId> {
        self.by_name.get(name).copied()
    }

    pub fn lookup(&self, name: &str) -> Result<TypeId, SignatureError> {
        self.type_id(name).ok_or_else(|| SignatureError::UnknownType(name.to_string()))
    }

    /// `true` iff `specific` is reachable from `general` through immediate
    /// subtype links (reflexive).
    pub fn subsumes(&self, general: TypeId, specific: TypeId) -> bool {
        self.below[general.index()].contains(specific.index())
    }

    /// Greatest common subtype, or `None` when the types are inconsistent.
    pub fn glb(&self, a: TypeId, b: TypeId) -> Option<TypeId> {
        self.glb[a.index() * self.names.len() + b.index()]
    }

    pub fn is_minimal(&self, t: TypeId) -> bool {
        self.subtypes[t.index()].is_empty()
    }

    /// Minimal types below `t` in depth-first expansion order.
    pub fn minimal_subtypes(&self, t: TypeId) -> &[TypeId] {
        &self.minimal[t.index()]
    }

    /// Immediate subtypes in declaration order.
    pub fn immediate_subtypes(&self, t: TypeId) -> &[TypeId] {
        &self.subtypes[t.index()]
    }

    /// Immediate subtypes reordered by the `order_types` directive.
    pub fn expansion_subtypes(&self, t: TypeId) -> &[TypeId] {
        &self.expansion[t.index()]
    }

    pub fn immediate_supertypes(&self, t: TypeId) -> &[TypeId] {
        &self.supertypes[t.index()]
    }

    /// Every type subsumed by `t`, including `t`, in declaration order.
    pub fn subtypes_of(&self, t: TypeId) -> impl Iterator<Item = TypeId> + '_ {
        self.below[t.index()].ones().map(TypeId::from_index)
    }

    /// Every type subsuming `t`, including `t`, in declaration order.
    pub fn supertypes_of(&self, t: TypeId) -> impl Iterator<Item = TypeId> + '_ {
        self.types().filter(move |&s| self.subsumes(s, t))
    }

    /// Length of the longest subtype chain from `top` down to `t`.
    pub fn depth(&self, t: TypeId) -> usize {
        self.depth[t.index()]
    }

    pub fn num_features(&self) -> usize {
        self.features.len()
    }

    pub fn features(&self) -> impl Iterator<Item = FeatId> {
        (0..self.features.len() as u32).map(FeatId)
    }

    pub fn feature_id(&self, name: &str) -> Option<FeatId> {
        self.feat_by_name.get(&name.to_ascii_lowercase()).copied()
    }

    /// Canonical (lowercase) feature name.
    pub fn feature_name(&self, f: FeatId) -> &str {
        &self.features[f.index()]
    }

    /// The most general type on which `f` is appropriate.
    pub fn introducer(&self, f: FeatId) -> TypeId {
        self.introducer[f.index()]
    }

    /// Value restriction of `f` on `t`, if `f` is appropriate for `t`.
    pub fn approp(&self, t: TypeId, f: FeatId) -> Option<TypeId> {
        let table = &self.approp[t.index()];
        table.binary_search_by_key(&f, |&(g, _)| g).ok().map(|i| table[i].1)
    }

    /// Appropriate features of `t` with their value restrictions, in feature
    /// declaration order.
    pub fn appropriate(&self, t: TypeId) -> &[(FeatId, TypeId)] {
        &self.approp[t.index()]
    }

    /// The list encoding, when the signature declares `e_list`, `ne_list`
    /// and the `hd`/`tl` features on `ne_list`.
    pub fn list_types(&self) -> Option<ListTypes> {
        let e_list = self.type_id("e_list")?;
        let ne_list = self.type_id("ne_list")?;
        let hd = self.feature_id("hd")?;
        let tl = self.feature_id("tl")?;
        (self.approp(ne_list, hd).is_some() && self.approp(ne_list, tl).is_some()).then_some(ListTypes {
            e_list,
            ne_list,
            hd,
            tl,
        })
    }

    fn collect_minimal(&self, t: TypeId) -> Vec<TypeId> {
        let mut out = Vec::new();
        let mut seen = FixedBitSet::with_capacity(self.len());
        let mut stack = vec![t];
        while let Some(u) = stack.pop() {
            if seen.put(u.index()) {
                continue;
            }
            let subs = &self.expansion[u.index()];
            if subs.is_empty() {
                out.push(u);
            } else {
                stack.extend(subs.iter().rev());
            }
        }
        out
    }
}

impl fmt::Display for Signature {
    /// Renders the signature back into declaration syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in self.types() {
            write!(f, "type {}", self.type_name(t))?;
            let subs = self.immediate_subtypes(t);
            if !subs.is_empty() {
                let names: Vec<&str> = subs.iter().map(|&s| self.type_name(s)).collect();
                write!(f, " sub [{}]", names.join(", "))?;
            }
            let local: Vec<String> = self
                .appropriate(t)
                .iter()
                .filter(|&&(feat, v)| self.immediate_supertypes(t).iter().all(|&p| self.approp(p, feat) != Some(v)))
                .map(|&(feat, v)| format!("{}:{}", self.feature_name(feat), self.type_name(v)))
                .collect();
            if !local.is_empty() {
                write!(f, " intro [{}]", local.join(", "))?;
            }
            writeln!(f, ".")?;
        }
        Ok(())
    }
}
