use lambda_sync::builtins::{builtin, CORPUS};
use lambda_sync::certificate::{Horizon, Status};
use lambda_sync::language::{enumerate_language, enumerate_up_to, gamma_minus, gamma_plus, reverse_oracle};
use lambda_sync::synchronization::*;
use lambda_sync::{Alphabet, Exactness, Language, Oracle, Sym, Word};

/// Hides exact hooks, keys and the sofic graph: only `admits` is visible.
struct Plain(Oracle);

impl Language for Plain {
    fn alphabet(&self) -> &Alphabet {
        self.0.alphabet()
    }
    fn exactness(&self) -> Exactness {
        self.0.exactness()
    }
    fn admits(&self, w: &[Sym]) -> bool {
        self.0.admits(w)
    }
    fn name(&self) -> String {
        "plain".into()
    }
}

fn parse(o: &Oracle, s: &str) -> Word {
    o.alphabet().parse(s).unwrap()
}

// Γ⁻_l(v) ⊆ ω⁻_l(v) by brute force over followers of length ≤ h.
fn brute_sync(o: &dyn Language, v: &Word, l: usize, h: usize) -> bool {
    let bs = gamma_minus(o, v, l).unwrap();
    (0..=h).all(|k| {
        gamma_plus(o, v, k)
            .unwrap()
            .iter()
            .all(|c| bs.iter().all(|b| o.admits(&b.concat(v).concat(c))))
    })
}

#[test]
fn golden_mean_words_are_all_synchronizing() {
    let o = builtin("golden-mean").unwrap();
    for v in enumerate_up_to(o.as_ref(), 6).unwrap().into_iter().skip(1) {
        for l in 0..=3 {
            assert_eq!(is_l_synchronizing(o.as_ref(), &v, l, 8).unwrap(), SyncAnswer::YesExact);
            assert!(brute_sync(o.as_ref(), &v, l, 6));
        }
    }
}

#[test]
fn full_shift_is_synchronizing() {
    let o = builtin("full-3").unwrap();
    for v in enumerate_up_to(o.as_ref(), 3).unwrap() {
        assert_eq!(is_l_synchronizing(o.as_ref(), &v, 2, 8).unwrap(), SyncAnswer::YesExact);
    }
}

#[test]
fn sofic_decision_matches_brute_force() {
    for name in ["even-shift", "beta-21", "reversed-even-shift"] {
        let o = builtin(name).unwrap();
        let plain = Plain(o.clone());
        for v in enumerate_up_to(o.as_ref(), 4).unwrap() {
            for l in 1..=2 {
                let exact = is_l_synchronizing(o.as_ref(), &v, l, 8).unwrap();
                assert_eq!(exact.is_yes(), brute_sync(&plain, &v, l, 7), "{name} {v:?} l={l}");
                if let SyncAnswer::No { b, c } = exact {
                    assert!(o.admits(&v.concat(&c)) && !o.admits(&b.concat(&v).concat(&c)));
                }
            }
        }
    }
}

#[test]
fn even_shift_odd_ones_are_not_synchronizing() {
    let o = builtin("even-shift").unwrap();
    let ans = is_l_synchronizing(o.as_ref(), &parse(&o, "1"), 1, 8).unwrap();
    assert!(matches!(ans, SyncAnswer::No { .. }));
    assert!(is_l_synchronizing(o.as_ref(), &parse(&o, "0"), 3, 8).unwrap().is_yes());
}

#[test]
fn coded_example_beta_alpha_is_refuted_by_a_gamma_pattern() {
    let o = builtin("coded-example").unwrap();
    let ans = is_l_synchronizing(o.as_ref(), &parse(&o, "0"), 2, 8).unwrap();
    let SyncAnswer::No { b, c } = ans else { panic!("expected a refutation") };
    assert!(b.contains(&lambda_sync::presentations::coded::BETA));
    let rendered = o.alphabet().render(&c);
    assert!(rendered.ends_with('γ') && rendered.contains("γ0"), "{rendered}");
    let v = parse(&o, "0");
    assert!(o.admits(&v.concat(&c)) && !o.admits(&b.concat(&v).concat(&c)));
}

#[test]
fn non_admissible_word_is_an_error() {
    let o = builtin("golden-mean").unwrap();
    assert!(is_l_synchronizing(o.as_ref(), &parse(&o, "11"), 1, 8).is_err());
}

#[test]
fn horizon_is_enforced() {
    let mut p = lambda_sync::presentations::substitution::SubstitutionPresentation::fibonacci();
    p.max_len = 10;
    let o = p.oracle().unwrap();
    let err = is_l_synchronizing(o.as_ref(), &parse(&o, "ab"), 2, 8).unwrap_err();
    assert!(matches!(err, lambda_sync::Error::HorizonExceeded { .. }));
}

#[test]
fn golden_table_holds_every_short_word() {
    let o = builtin("golden-mean").unwrap();
    let t = sync_word_table(o.as_ref(), 1, 3, 8).unwrap();
    // Every nonempty word; the empty word fails through 1·ε·1.
    assert_eq!(t.members, enumerate_up_to(o.as_ref(), 3).unwrap()[1..]);
    assert!(t.exact);
    // Words starting with 1 only admit 0 in front.
    assert_eq!(t.signatures.len(), 2);
    let eps = is_l_synchronizing(o.as_ref(), &Word::empty(), 1, 8).unwrap();
    assert_eq!(eps, SyncAnswer::No { b: parse(&o, "1"), c: parse(&o, "1") });
}

#[test]
fn substitution_tables_are_nonempty() {
    for name in ["fibonacci", "thue-morse"] {
        let o = builtin(name).unwrap();
        let t = sync_word_table(o.as_ref(), 1, 8, 8).unwrap();
        assert!(!t.is_empty(), "{name}");
        assert!(!t.exact);
    }
}

#[test]
fn tables_are_nested() {
    for name in ["golden-mean", "even-shift", "dyck-2", "fibonacci", "coded-example"] {
        let o = builtin(name).unwrap();
        let mut prev: Option<SyncWordTable> = None;
        for l in 0..=3 {
            let t = sync_word_table(o.as_ref(), l, 6, 6).unwrap();
            if let Some(p) = &prev {
                assert!(t.members.iter().all(|w| p.contains(w)), "{name} l={l}");
            }
            prev = Some(t);
        }
        let tables = sync_tables(o.as_ref(), 3, 6, 6).unwrap();
        for l in 1..=3 {
            let below: Vec<&Word> = tables.levels[l - 1].entries.iter().map(|(w, _)| w).collect();
            assert!(tables.levels[l].entries.iter().all(|(w, _)| below.contains(&w)));
        }
    }
}

#[test]
fn table_members_satisfy_the_definition() {
    let o = builtin("dyck-2").unwrap();
    let t = sync_word_table(o.as_ref(), 2, 4, 6).unwrap();
    let plain = Plain(o.clone());
    for (i, v) in t.members.iter().enumerate() {
        assert!(brute_sync(&plain, v, 2, 6), "{v:?}");
        assert_eq!(*t.signature(i), gamma_minus(o.as_ref(), v, 2).unwrap());
    }
}

#[test]
fn word_classes_cover_every_word() {
    let o = builtin("dyck-2").unwrap();
    let classes = word_classes(o.as_ref(), 5).unwrap();
    assert!(classes.grouped);
    let keys: std::collections::HashSet<_> =
        classes.reps.iter().map(|w| o.syntactic_key(w).unwrap()).collect();
    assert_eq!(keys.len(), classes.reps.len());
    for w in enumerate_up_to(o.as_ref(), 5).unwrap() {
        assert!(keys.contains(&o.syntactic_key(&w).unwrap()));
    }
    assert!(classes.reps.windows(2).all(|p| p[0] < p[1]));
}

#[test]
fn property_d_examples() {
    let h = Horizon::default();
    for name in ["full-2", "golden-mean", "even-shift"] {
        let c = check_property_d(builtin(name).unwrap().as_ref(), h);
        assert_eq!(c.status, Status::Verified, "{name}");
        assert!(c.exact);
    }
    let coded = check_property_d(builtin("coded-example").unwrap().as_ref(), h);
    assert_eq!(coded.status, Status::Verified, "{:?}", coded.failures);
    assert!(!coded.exact);
}

#[test]
fn lambda_sync_examples() {
    let h = Horizon::default();
    for name in ["full-2", "golden-mean", "even-shift", "beta-21", "fibonacci", "thue-morse", "dyck-2"] {
        let c = check_lambda_synchronizing(builtin(name).unwrap().as_ref(), h);
        assert_eq!(c.status, Status::Verified, "{name}: {:?}", c.failures);
    }
}

#[test]
fn coded_example_fails_condition_iii_from_beta() {
    let o = builtin("coded-example").unwrap();
    let h = Horizon::new(4, 8);
    let search = condition_iii_search(o.as_ref(), h);
    assert_eq!(search.certificate.status, Status::Inconclusive);
    let beta_alpha = parse(&o, "βα");
    assert!(search.failing.contains(&beta_alpha));
    let roots: Vec<&str> = search.certificate.failures.iter().map(|f| f.subject.as_str()).collect();
    assert_eq!(roots, ["β"]);
    // Exactly the words containing β fail.
    for n in 1..=4 {
        for w in enumerate_language(o.as_ref(), n).unwrap() {
            assert_eq!(search.failing.contains(&w), w.contains(&lambda_sync::presentations::coded::BETA));
        }
    }
    let ev = condition_iii_evidence(o.as_ref(), &beta_alpha, h);
    assert!(!ev.is_empty());
    for (a, c) in ev {
        let c = c.expect("every a is refuted");
        let rendered = o.alphabet().render(&c);
        assert!(rendered.ends_with('γ') && rendered.contains('γ'));
        let ac = a.concat(&c);
        assert!(o.admits(&ac) && !o.admits(&beta_alpha.concat(&ac)));
    }
}

#[test]
fn property_d_of_reversal_matches_lambda_sync_on_exact_classes() {
    let h = Horizon::default();
    for name in CORPUS {
        let o = builtin(name).unwrap();
        if o.sofic().is_none() {
            continue;
        }
        let d = check_property_d(reverse_oracle(&o).as_ref(), h);
        let lam = check_lambda_synchronizing(o.as_ref(), h);
        assert_eq!(d.status, lam.status, "{name}");
        assert!(d.exact && lam.exact);
    }
}

#[test]
fn exact_and_horizon_checks_agree_on_sofic_shifts() {
    let h = Horizon::new(5, 6);
    for name in ["golden-mean", "even-shift", "beta-21"] {
        let o = builtin(name).unwrap();
        let plain = Plain(o.clone());
        assert_eq!(
            check_lambda_synchronizing(o.as_ref(), h).status,
            check_lambda_synchronizing(&plain, h).status,
            "{name}"
        );
        assert_eq!(
            check_property_d(o.as_ref(), h).status,
            check_property_d(&plain, h).status,
            "{name}"
        );
    }
}

#[test]
fn extension_witnesses_are_complete() {
    for name in ["golden-mean", "full-2", "full-3", "dyck-2"] {
        let o = builtin(name).unwrap();
        for l in 1..=2 {
            let t = sync_word_table(o.as_ref(), l, 6, 8).unwrap();
            let rep = extension_witnesses(o.as_ref(), &t).unwrap();
            assert!(rep.complete(), "{name} l={l}: {} {}", rep.missing_mu_prime, rep.missing_beta_nu);
            for (i, e) in rep.entries.iter().enumerate() {
                let sig = t.signature(i);
                let mp = parse(&o, e.mu_prime.as_ref().unwrap());
                assert!(is_l_synchronizing(o.as_ref(), &mp, l + 1, 8).unwrap().is_yes());
                assert_eq!(gamma_minus(o.as_ref(), &mp, l).unwrap(), *sig);
                if name == "dyck-2" {
                    assert!(mp.len() <= l + t.members[i].len() + 1);
                }
                let (b, nu) = e.beta_nu.as_ref().unwrap();
                let nu = parse(&o, nu);
                assert!(is_l_synchronizing(o.as_ref(), &nu, l + 1, 8).unwrap().is_yes());
                let bn = parse(&o, b).concat(&nu);
                assert_eq!(gamma_minus(o.as_ref(), &bn, l).unwrap(), *sig);
            }
        }
    }
}

#[test]
fn golden_extension_witness_first_entries() {
    let o = builtin("golden-mean").unwrap();
    let t = sync_word_table(o.as_ref(), 1, 3, 8).unwrap();
    let rep = extension_witnesses(o.as_ref(), &t).unwrap();
    let zero = rep.entries.iter().find(|e| e.mu == "0").unwrap();
    let mp = parse(&o, zero.mu_prime.as_ref().unwrap());
    assert_eq!(gamma_minus(o.as_ref(), &mp, 1).unwrap(), gamma_minus(o.as_ref(), &parse(&o, "00"), 1).unwrap());
}

#[test]
fn sync_condition_i_and_synchronized_irreducibility() {
    for name in ["full-2", "golden-mean", "even-shift"] {
        let o = builtin(name).unwrap();
        let t = sync_tables(o.as_ref(), 6, 8, 8).unwrap();
        assert_eq!(check_sync_condition_i(o.as_ref(), &t).status, Status::Verified, "{name}");
        assert_eq!(check_synchronized_irreducible(o.as_ref(), &t).status, Status::Verified, "{name}");
    }
    let one = builtin("full-1").unwrap();
    let t = sync_tables(one.as_ref(), 4, 8, 8).unwrap();
    assert_eq!(check_sync_condition_i(one.as_ref(), &t).status, Status::Inconclusive);
}
