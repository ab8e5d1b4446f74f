mod common;

use common::*;
use proptest::prelude::*;
use proptest::test_runner::Config;
use tfsc::classifier::{classify, classify_round_robin};
use tfsc::compiler::{compile_naive, compile_program, compute_rhs, prune};
use tfsc::descriptions::{parse_grammar, to_dnf, Constraint, Description, Grammar};
use tfsc::fstruct::{FeatureStructure, NodeId};
use tfsc::grammars;
use tfsc::interpreter::{QueryOptions, Solver};
use tfsc::signature::{SignatureBuilder, TypeId};
use tfsc::verify;

/// A random hierarchy: type `i > 0` is named `t<i>` and lists parents among
/// the earlier types; type 0 is `top`.
fn hierarchy() -> impl Strategy<Value = Vec<Vec<usize>>> {
    (2usize..9).prop_flat_map(|n| {
        (1..n).map(|i| proptest::sample::subsequence((0..i).collect::<Vec<_>>(), 1..=i.min(3))).collect::<Vec<_>>()
    })
}

fn type_name(i: usize) -> String {
    if i == 0 {
        "top".into()
    } else {
        format!("t{i}")
    }
}

/// `below[i][j]`: type j is a subtype of (or equal to) type i.
#[allow(clippy::needless_range_loop)]
fn below(parents: &[Vec<usize>]) -> Vec<Vec<bool>> {
    let n = parents.len() + 1;
    let mut b = vec![vec![false; n]; n];
    for j in 0..n {
        let mut stack = vec![j];
        while let Some(k) = stack.pop() {
            if !b[k][j] {
                b[k][j] = true;
                if k > 0 {
                    stack.extend(parents[k - 1].iter().copied());
                }
            }
        }
    }
    b
}

fn brute_glb(b: &[Vec<bool>], x: usize, y: usize) -> Result<Option<usize>, ()> {
    let n = b.len();
    let common: Vec<usize> = (0..n).filter(|&s| b[x][s] && b[y][s]).collect();
    if common.is_empty() {
        return Ok(None);
    }
    let greatest: Vec<usize> = common.iter().copied().filter(|&g| common.iter().all(|&s| b[g][s])).collect();
    match greatest.as_slice() {
        [g] => Ok(Some(*g)),
        _ => Err(()),
    }
}

proptest! {
    #![proptest_config(Config::with_cases(200))]

    #[test]
    fn glb_matches_brute_force(parents in hierarchy()) {
        let mut builder = SignatureBuilder::new();
        builder.declare::<&str>("top", &[], &[]);
        for (i, ps) in parents.iter().enumerate() {
            for &p in ps {
                builder.declare(&type_name(p), &[type_name(i + 1)], &[]);
            }
        }
        let b = below(&parents);
        let n = b.len();
        let unique = (0..n).all(|x| (0..n).all(|y| brute_glb(&b, x, y).is_ok()));
        match builder.build() {
            Err(e) => prop_assert!(!unique, "rejected a valid hierarchy: {e}"),
            Ok(sig) => {
                prop_assert!(unique);
                let id = |i: usize| sig.type_id(&type_name(i)).unwrap();
                for x in 0..n {
                    for y in 0..n {
                        let want = brute_glb(&b, x, y).unwrap().map(id);
                        prop_assert_eq!(sig.glb(id(x), id(y)), want);
                        prop_assert_eq!(sig.glb(id(y), id(x)), want);
                        prop_assert_eq!(sig.subsumes(id(x), id(y)), b[x][y]);
                    }
                }
            }
        }
    }
}

fn pick<T: Clone + std::fmt::Debug + 'static>(items: Vec<T>) -> impl Strategy<Value = T> {
    proptest::sample::select(items)
}

/// Random descriptions over the types and features of `g`.
fn description(g: &Grammar) -> impl Strategy<Value = Description> {
    let sig = g.signature();
    let types: Vec<TypeId> = sig.types().collect();
    let feats: Vec<_> = sig.features().collect();
    let leaf = prop_oneof![
        3 => pick(types).prop_map(Description::Type),
        1 => pick(vec!["X", "Y", "_"]).prop_map(|v| Description::Var(v.to_string())),
    ];
    leaf.prop_recursive(4, 24, 3, move |inner| {
        prop_oneof![
            3 => (pick(feats.clone()), inner.clone()).prop_map(|(f, d)| Description::Feat(f, Box::new(d))),
            2 => proptest::collection::vec(inner.clone(), 2..4).prop_map(Description::Conj),
            1 => proptest::collection::vec(inner, 2..3).prop_map(Description::Disj),
        ]
    })
}

fn builds(g: &Grammar, d: &Description) -> Vec<(Description, FeatureStructure)> {
    to_dnf(d, 256).unwrap().into_iter().filter_map(|c| g.build(&c).ok().map(|fs| (c, fs))).collect()
}

fn grammar_strategy() -> impl Strategy<Value = Grammar> {
    grammars_from(vec![grammars::SHARED_VALUES, grammars::APPEND_C, grammars::DIAMOND, grammars::SENTENCES])
}

fn grammars_from(sources: Vec<&'static str>) -> impl Strategy<Value = Grammar> {
    pick(sources).prop_map(|src| parse_grammar(src).unwrap())
}

fn with_descriptions(k: usize) -> impl Strategy<Value = (Grammar, Vec<Description>)> {
    descriptions_over(grammar_strategy(), k)
}

fn descriptions_over(
    gs: impl Strategy<Value = Grammar>,
    k: usize,
) -> impl Strategy<Value = (Grammar, Vec<Description>)> {
    gs.prop_flat_map(move |g| {
        let ds = proptest::collection::vec(description(&g), k);
        (Just(g), ds)
    })
}

proptest! {
    #![proptest_config(Config::with_cases(150))]

    #[test]
    fn built_structures_satisfy_their_description((g, ds) in with_descriptions(1)) {
        let sig = g.signature();
        for (c, fs) in builds(&g, &ds[0]) {
            prop_assert!(verify::well_formed(sig, &fs).is_ok());
            prop_assert!(verify::satisfies(sig, &fs, fs.root(), &c), "{} vs {}", fs.display(sig), c.display(sig));
            prop_assert!(verify::satisfies(sig, &fs, fs.root(), &ds[0]));
        }
    }

    #[test]
    fn dnf_preserves_satisfaction((g, ds) in with_descriptions(2)) {
        let sig = g.signature();
        let disjuncts = to_dnf(&ds[0], 256).unwrap();
        for (_, fs) in builds(&g, &ds[1]) {
            let whole = verify::satisfies(sig, &fs, fs.root(), &ds[0]);
            let any = disjuncts.iter().any(|d| verify::satisfies(sig, &fs, fs.root(), d));
            prop_assert_eq!(whole, any);
        }
    }

    #[test]
    fn unification_laws((g, ds) in with_descriptions(2)) {
        let sig = g.signature();
        let a = builds(&g, &ds[0]);
        let b = builds(&g, &ds[1]);
        for (_, x) in a.iter().take(2) {
            let self_unified = FeatureStructure::unify(sig, x, x).unwrap();
            prop_assert!(verify::isomorphic(sig, &self_unified, x));
            prop_assert!(verify::isomorphic(sig, &x.copy(), x));
            for (_, y) in b.iter().take(2) {
                let xy = FeatureStructure::unify(sig, x, y);
                let yx = FeatureStructure::unify(sig, y, x);
                prop_assert_eq!(xy.is_some(), yx.is_some());
                if let (Some(xy), Some(yx)) = (xy, yx) {
                    prop_assert!(verify::isomorphic(sig, &xy, &yx));
                    prop_assert!(verify::subsumes_fs(sig, x, &xy));
                    prop_assert!(verify::subsumes_fs(sig, y, &xy));
                    prop_assert!(verify::well_formed(sig, &xy).is_ok());
                }
            }
        }
    }

    #[test]
    fn pruning_keeps_a_cover((g, ds) in with_descriptions(1)) {
        let cls = classify(&g);
        for (_, fs) in builds(&g, &ds[0]) {
            let (filled, goals) = compute_rhs(&g, &cls, &fs);
            let kept = prune(&goals, &filled);
            let graph = filled.graph();
            let reach = |from: NodeId| graph.reachable(from);
            for k in &kept {
                prop_assert!(goals.contains(k));
                for other in &kept {
                    if other != k {
                        let below: Vec<NodeId> = reach(graph.deref(other.node)).into_iter().skip(1).collect();
                        prop_assert!(!below.contains(&graph.deref(k.node)));
                    }
                }
            }
            for goal in &goals {
                let n = graph.deref(goal.node);
                prop_assert!(kept.iter().any(|k| reach(graph.deref(k.node)).contains(&n)));
            }
        }
    }

    #[test]
    fn classification_strategies_agree(g in grammar_strategy(), picks in proptest::collection::vec(any::<proptest::sample::Index>(), 0..4)) {
        let sig = g.signature_arc().clone();
        let types: Vec<TypeId> = sig.types().collect();
        let mut constraints: Vec<Constraint> = g.constraints().to_vec();
        for i in picks {
            let t = *i.get(&types);
            if g.constraint(t).is_none() {
                constraints.push(Constraint { antecedent: t, consequent: Description::Type(t), pos: Default::default() });
            }
        }
        let g = Grammar::new(sig, constraints);
        let a = classify(&g);
        let b = classify_round_robin(&g);
        prop_assert_eq!(a.dump(g.signature()), b.dump(g.signature()));
    }
}

/// Elements of a list of atoms, by type name.
fn read_list(g: &Grammar, fs: &FeatureStructure, mut n: NodeId) -> Vec<String> {
    let sig = g.signature();
    let lt = sig.list_types().unwrap();
    let mut out = Vec::new();
    while let (Some(hd), Some(tl)) = (fs.arc(n, lt.hd), fs.arc(n, lt.tl)) {
        out.push(sig.type_name(fs.ty(hd)).to_string());
        n = tl;
    }
    out
}

fn atoms() -> impl Strategy<Value = Vec<&'static str>> {
    proptest::collection::vec(pick(vec!["a", "b", "c"]), 0..5)
}

proptest! {
    #![proptest_config(Config::with_cases(60))]

    #[test]
    fn append_matches_list_concatenation(xs in atoms(), ys in atoms(), naive in any::<bool>()) {
        let g = grammar("append_c");
        let p = if naive { compile_naive(&g).unwrap() } else { compile_program(&g).unwrap() };
        let q = format!("append_c, arg1:[{}], arg2:[{}]", xs.join(", "), ys.join(", "));
        let d = desc(&g, &q);
        let run = solve(&p, &d, QueryOptions::default());
        prop_assert_eq!(run.solutions.len(), 1);
        let s = &run.solutions[0];
        let arg3 = s.arc(s.root(), g.signature().feature_id("arg3").unwrap()).unwrap();
        let want: Vec<String> = xs.iter().chain(ys.iter()).map(|s| s.to_string()).collect();
        prop_assert_eq!(read_list(&g, s, arg3), want);
        prop_assert!(unsound(&g, &d, &run.solutions).is_empty());
    }

    #[test]
    fn splitting_a_list_gives_every_prefix(zs in atoms()) {
        let g = grammar("append_c");
        let p = compile_program(&g).unwrap();
        let d = desc(&g, &format!("append_c, arg3:[{}]", zs.join(", ")));
        let run = solve(&p, &d, QueryOptions::default());
        let arg1 = g.signature().feature_id("arg1").unwrap();
        let prefixes: Vec<Vec<String>> =
            run.solutions.iter().map(|s| read_list(&g, s, s.arc(s.root(), arg1).unwrap())).collect();
        let want: Vec<Vec<String>> = (0..=zs.len()).map(|k| zs[..k].iter().map(|s| s.to_string()).collect()).collect();
        prop_assert_eq!(prefixes, want);
    }

    #[test]
    fn search_restores_the_query(
        (g, ds) in descriptions_over(grammars_from(vec![grammars::SHARED_VALUES, grammars::APPEND_C, grammars::DIAMOND]), 1)
    ) {
        let sig = g.signature();
        let p = compile_program(&g).unwrap();
        for (_, fs) in builds(&g, &ds[0]).into_iter().take(2) {
            let mut solver = Solver::new(&p, &fs, depth(5));
            let mut n = 0;
            while let Some(s) = solver.next_solution() {
                prop_assert!(verify::subsumes_fs(sig, &fs, &s));
                n += 1;
                if n == 20 {
                    break;
                }
            }
            if solver.is_finished() {
                prop_assert!(verify::isomorphic(sig, &solver.current(), &fs));
            }
        }
    }
}
