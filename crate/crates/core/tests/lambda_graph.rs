use std::collections::BTreeSet;
use std::sync::Arc;

use lambda_sync::builtins::builtin;
use lambda_sync::certificate::Status;
use lambda_sync::lambda_graph::*;
use lambda_sync::language::{enumerate_language, enumerate_up_to, gamma_minus, gamma_plus};
use lambda_sync::presentations::sofic::{LabeledGraph, SoficOracle};
use lambda_sync::synchronization::{check_sync_condition_i, check_synchronized_irreducible, sync_tables};
use lambda_sync::{Alphabet, Language, Oracle, Word, WordSet};

fn brute_sync(o: &dyn Language, v: &Word, l: usize, h: usize) -> bool {
    let bs = gamma_minus(o, v, l).unwrap();
    (0..=h).all(|k| {
        gamma_plus(o, v, k)
            .unwrap()
            .iter()
            .all(|c| bs.iter().all(|b| o.admits(&b.concat(v).concat(c))))
    })
}

// Signatures of the brute-force l-synchronizing words of length ≤ n.
fn brute_signatures(o: &dyn Language, l: usize, n: usize, h: usize) -> BTreeSet<Vec<Word>> {
    enumerate_up_to(o, n)
        .unwrap()
        .into_iter()
        .filter(|v| brute_sync(o, v, l, h))
        .map(|v| {
            enumerate_language(o, l)
                .unwrap()
                .iter()
                .filter(|b| o.admits(&b.concat(&v)))
                .cloned()
                .collect()
        })
        .collect()
}

fn level_signatures(g: &LambdaGraphSystem, l: usize) -> BTreeSet<Vec<Word>> {
    g.levels[l]
        .vertices
        .iter()
        .map(|v| v.signature.iter().cloned().collect())
        .collect()
}

fn disjoint_full_shifts() -> Oracle {
    let alphabet = Alphabet::new(["a", "b", "c", "d"]).unwrap();
    let graph = LabeledGraph::from_edges(alphabet, 2, vec![(0, 0, 0), (0, 1, 0), (1, 2, 1), (1, 3, 1)]).unwrap();
    Arc::new(SoficOracle::new(graph, "two-full-shifts"))
}

#[test]
fn full_shift_has_one_vertex_per_level() {
    let o = builtin("full-2").unwrap();
    let g = build_lambda_sync_system(o.as_ref(), 4, 8, 8).unwrap();
    assert_eq!(g.vertex_counts(), vec![1; 5]);
    for el in &g.edges {
        let labels: Vec<_> = el.iter().map(|e| (e.source, e.label, e.target)).collect();
        assert_eq!(labels, vec![(0, 0, 0), (0, 1, 0)]);
    }
    assert!(verify_axioms(&g).passed());
    assert!(structural_checks(&g, None).passed());
}

#[test]
fn golden_mean_repeats_the_left_fischer_cover() {
    let o = builtin("golden-mean").unwrap();
    let g = build_lambda_sync_system(o.as_ref(), 4, 8, 8).unwrap();
    assert_eq!(g.vertex_counts(), vec![1, 2, 2, 2, 2]);
    let cover = o.sofic().unwrap().left_fischer_cover().unwrap();
    assert_eq!(cover.num_states(), 2);
    for l in 1..4 {
        assert!(matches_cover(&g, &cover, l), "level {l}");
    }
    for l in 1..=4 {
        assert_eq!(level_signatures(&g, l), brute_signatures(o.as_ref(), l, 8, 8), "level {l}");
    }
    let mut broken = g.clone();
    broken.edges[2].pop();
    assert!(!matches_cover(&broken, &cover, 2));
}

#[test]
fn even_shift_matches_its_left_fischer_cover() {
    for name in ["even-shift", "reversed-even-shift"] {
        let o = builtin(name).unwrap();
        let g = build_lambda_sync_system(o.as_ref(), 5, 8, 8).unwrap();
        let cover = o.sofic().unwrap().left_fischer_cover().unwrap();
        assert_eq!(g.levels[5].len(), cover.num_states(), "{name}");
        for l in 1..5 {
            assert!(matches_cover(&g, &cover, l), "{name} level {l}");
        }
    }
}

#[test]
fn dyck_vertex_counts_increase_and_match_brute_force() {
    let o = builtin("dyck-2").unwrap();
    let g = build_lambda_sync_system(o.as_ref(), 3, 8, 8).unwrap();
    let counts = g.vertex_counts();
    assert!(counts.windows(2).all(|w| w[0] < w[1]), "{counts:?}");
    // Cancelling a symbol of b needs followers of length |v| + l.
    let g = build_lambda_sync_system(o.as_ref(), 3, 4, 4).unwrap();
    for l in 0..=3 {
        assert_eq!(level_signatures(&g, l), brute_signatures(o.as_ref(), l, 4, 4 + l), "level {l}");
    }
}

#[test]
fn corpus_systems_pass_axioms_and_structure() {
    for name in [
        "full-2",
        "full-3",
        "golden-mean",
        "even-shift",
        "dyck-2",
        "markov-dyck",
        "fibonacci",
        "thue-morse",
        "beta-golden",
        "beta-21",
        "reversed-even-shift",
    ] {
        let o = builtin(name).unwrap();
        let g = build_lambda_sync_system(o.as_ref(), 4, 8, 8).unwrap();
        let report = verify_axioms(&g);
        assert!(report.passed(), "{name}: {:?}", report.failures);
        let s = structural_checks(&g, None);
        assert!(s.passed(), "{name}: {:?}", s.failures);
    }
}

#[test]
fn coded_example_has_no_level_four_words_at_default_horizon() {
    let o = builtin("coded-example").unwrap();
    match build_lambda_sync_system(o.as_ref(), 4, 8, 8) {
        Err(lambda_sync::Error::EmptySyncLevel(4)) => {}
        other => panic!("unexpected: {other:?}"),
    }
}

#[test]
fn deleting_an_edge_is_located() {
    let o = builtin("golden-mean").unwrap();
    let mut g = build_lambda_sync_system(o.as_ref(), 4, 8, 8).unwrap();
    let removed = g.edges[2].remove(0);
    let report = verify_axioms(&g);
    assert!(!report.passed());
    assert!(report
        .failures
        .iter()
        .any(|f| (f.level == 2 || f.level == 3) && f.label.as_deref() == Some(g.alphabet.name(removed.label))));
}

#[test]
fn duplicated_signature_breaks_predecessor_separation() {
    let o = builtin("golden-mean").unwrap();
    let mut g = build_lambda_sync_system(o.as_ref(), 3, 8, 8).unwrap();
    let dup = g.levels[2].vertices[0].signature.clone();
    g.levels[2].vertices[1].signature = dup;
    let s = structural_checks(&g, None);
    assert!(!s.predecessor_separated);
    assert!(s.left_resolving);
}

#[test]
fn systems_present_their_languages() {
    for (name, l) in [("full-2", 4), ("golden-mean", 4), ("even-shift", 4), ("dyck-2", 4), ("beta-21", 4)] {
        let o = builtin(name).unwrap();
        let g = build_lambda_sync_system(o.as_ref(), l, 8, 8).unwrap();
        for n in 1..=l {
            let r = verify_presents(&g, o.as_ref(), n).unwrap();
            assert!(r.passed(), "{name} n={n}: missing {:?} extra {:?}", r.missing, r.extra);
            assert_eq!(r.language_size, enumerate_language(o.as_ref(), n).unwrap().len());
        }
    }
    let o = builtin("golden-mean").unwrap();
    let g = build_lambda_sync_system(o.as_ref(), 4, 8, 8).unwrap();
    assert_eq!(verify_presents(&g, o.as_ref(), 4).unwrap().path_labels, 8);
    assert!(verify_presents(&g, o.as_ref(), 5).is_err());
}

#[test]
fn canonical_systems() {
    let full = builtin("full-3").unwrap();
    assert_eq!(build_canonical_system(full.as_ref(), 4, 8).unwrap().vertex_counts(), vec![1; 5]);

    let golden = builtin("golden-mean").unwrap();
    let c = build_canonical_system(golden.as_ref(), 4, 8).unwrap();
    let s = build_lambda_sync_system(golden.as_ref(), 4, 8, 8).unwrap();
    assert!(c.isomorphic(&s));
    assert!(!c.provenance.approximate);
    assert_eq!(structural_checks(&s, Some(&c)).embeds_in_canonical, Some(true));

    // Vertices at the top level are the distinct predecessor-state sets.
    let even = builtin("even-shift").unwrap();
    let c = build_canonical_system(even.as_ref(), 4, 8).unwrap();
    assert!(verify_axioms(&c).passed());
    let g = even.sofic().unwrap();
    let past: BTreeSet<_> = enumerate_language(even.as_ref(), 8)
        .unwrap()
        .iter()
        .map(|x| g.backward_set(x))
        .collect();
    assert_eq!(c.levels[4].len(), past.len());
    let s = build_lambda_sync_system(even.as_ref(), 4, 8, 8).unwrap();
    assert_eq!(structural_checks(&s, Some(&c)).embeds_in_canonical, Some(true));
}

#[test]
fn lambda_condition_i() {
    let full = builtin("full-2").unwrap();
    let g = build_lambda_sync_system(full.as_ref(), 4, 8, 8).unwrap();
    assert_eq!(check_lambda_condition_i(&g).status, Status::Verified);

    // The class of words starting with 1 needs paths of length 3.
    let golden = builtin("golden-mean").unwrap();
    let g = build_lambda_sync_system(golden.as_ref(), 4, 8, 8).unwrap();
    assert_eq!(check_lambda_condition_i(&g).status, Status::Inconclusive);
    let g = build_lambda_sync_system(golden.as_ref(), 6, 8, 8).unwrap();
    assert_eq!(check_lambda_condition_i(&g).status, Status::Verified);

    let trivial = builtin("full-1").unwrap();
    let g = build_lambda_sync_system(trivial.as_ref(), 4, 8, 8).unwrap();
    assert!(!check_lambda_condition_i(&g).holds());
}

#[test]
fn condition_i_variants_agree() {
    for name in ["full-1", "full-2", "golden-mean", "even-shift"] {
        let o = builtin(name).unwrap();
        let tables = sync_tables(o.as_ref(), 6, 8, 8).unwrap();
        let g = build_from_tables(o.as_ref(), &tables).unwrap();
        let a = check_sync_condition_i(o.as_ref(), &tables).status;
        let b = check_lambda_condition_i(&g).status;
        assert_eq!(a, b, "{name}");
        let a = check_synchronized_irreducible(o.as_ref(), &tables).status;
        let b = check_lambda_irreducible(&g).status;
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn lambda_irreducibility() {
    let full = builtin("full-2").unwrap();
    let g = build_lambda_sync_system(full.as_ref(), 4, 8, 8).unwrap();
    let c = check_lambda_irreducible(&g);
    assert_eq!(c.status, Status::Verified);
    assert!(c.notes[0].contains("(0,0)=1"));

    let golden = builtin("golden-mean").unwrap();
    let g = build_lambda_sync_system(golden.as_ref(), 6, 8, 8).unwrap();
    assert_eq!(check_lambda_irreducible(&g).status, Status::Verified);

    let two = disjoint_full_shifts();
    let tables = sync_tables(two.as_ref(), 6, 8, 8).unwrap();
    let g = build_from_tables(two.as_ref(), &tables).unwrap();
    assert!(verify_axioms(&g).passed());
    assert!(!check_lambda_irreducible(&g).holds());
    assert!(!check_synchronized_irreducible(two.as_ref(), &tables).holds());
}

#[test]
fn stability_recheck() {
    let o = builtin("golden-mean").unwrap();
    let g = build_with_stability_recheck(o.as_ref(), 4, 8, 8).unwrap();
    assert_eq!(g.provenance.stable, Some(true));
}

#[test]
fn exports() {
    let o = builtin("golden-mean").unwrap();
    let g = build_lambda_sync_system(o.as_ref(), 2, 8, 8).unwrap();
    let json = to_json(&g);
    assert_eq!(json["vertex_counts"], serde_json::json!([1, 2, 2]));
    assert_eq!(json["provenance"]["max_word_len"], 8);
    assert_eq!(json["levels"][1][0]["representative"], "0");
    let dot = to_dot(&g);
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("subgraph cluster_2"));
    assert!(dot.contains("style=dashed"));
    assert_eq!(dot.matches("->").count(), g.edges.iter().map(Vec::len).sum::<usize>() + 4);
    assert!(to_text(&g).contains("level 1: 2 vertices"));
    let _: WordSet = g.levels[0].vertices[0].signature.clone();
}
