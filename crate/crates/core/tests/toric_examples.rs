use mtoric::catalog::{
    load_catalog, p3_of_7, parse_catalog, scan_3_connected, table1, table1_entry, CatalogError,
};
use mtoric::groebner::{certify, TermOrder};
use mtoric::toric::*;
use mtoric::{Basis, Matroid, MatroidError};

fn b(label: &str) -> Basis {
    Basis::parse_label(label).unwrap()
}

fn entry(id: &str) -> (Matroid, Option<Vec<Basis>>) {
    let e = table1_entry(id).unwrap();
    (e.matroid, e.embedded_order)
}

#[test]
fn graph_ideal_of_fano() {
    let (m, _) = entry("M_14");
    let j = build_graph_ideal(&m);
    assert_eq!(j.generators.len(), 28);
    assert_eq!(j.universe.len(), 7 + 28);
    assert_eq!(j.universe.t_indices().len(), 7);
}

#[test]
fn fano_fibers_are_exchange_connected() {
    let (m, _) = entry("M_14");
    for d in [2, 3] {
        let fc = fiber_graph_connected(&m, d).unwrap();
        assert!(fc.connected(), "degree {d}");
        assert!(fc.nontrivial > 0);
    }
}

#[test]
fn embedded_orders_give_white_bases() {
    for id in ["M_9", "M_11", "M_18"] {
        let (m, order) = entry(id);
        let w = verify_white(&m, &order.unwrap()).unwrap();
        assert_eq!(w.report.verdict, Verdict::WhiteGbOk, "{id}");
        assert!(w.report.degree_histogram.keys().all(|&d| d == 2));
        assert!(w
            .gb
            .elements
            .iter()
            .all(|e| in_kernel(e, &w.gb.universe, 7)));
    }
}

#[test]
fn m6_basis_is_certified() {
    let (m, order) = entry("M_6");
    let t = toric_gb(&m, &order.unwrap()).unwrap();
    assert!(t.gb.elements.iter().all(|e| e.degree() == 2));
    let cert = certify(&t.gb).unwrap();
    assert_eq!(cert.pairs_checked, t.gb.len() * (t.gb.len() - 1) / 2);
    assert_eq!(
        certify_toric(&m, &t.gb, 200, 1).unwrap(),
        cert.pairs_checked
    );
}

#[test]
fn sorting_bases_of_uniform_and_m16() {
    for id in ["M_1", "M_16"] {
        let (m, _) = entry(id);
        let s = sorting_gb(&m).unwrap();
        assert_eq!(s.report.verdict, Verdict::WhiteGbOk, "{id}");
        assert!(s.pairs_checked > 0 && s.monomials_checked > 0);
    }
}

#[test]
fn sorting_basis_matches_lex_basis_for_compatible_order() {
    let m = Matroid::uniform(2, 4);
    let s = sorting_gb(&m).unwrap();
    assert_eq!(
        s.gb.format_elements(),
        vec!["x12*x34 - x13*x24", "x14*x23 - x13*x24"]
    );
    let order: Vec<Basis> = ["12", "14", "23", "34", "13", "24"]
        .iter()
        .map(|l| b(l))
        .collect();
    let t = toric_gb(&m, &order).unwrap();
    let mut a = s.gb.format_elements();
    let mut c = t.gb.format_elements();
    a.sort();
    c.sort();
    assert_eq!(a, c);
}

#[test]
fn elimination_chains_reach_table_children() {
    let (m11, order) = entry("M_11");
    let links = elimination_chain(&m11, order.as_ref().unwrap(), &[b("347"), b("257")]).unwrap();
    assert_eq!(links[0].child, entry("M_12").0);
    assert_eq!(links[1].child, entry("M_13").0);
    for l in &links {
        assert_eq!(l.report.verdict, Verdict::WhiteGbOk);
        assert_eq!(l.gb.universe.len(), l.child.num_bases());
    }
    // reduced bases are unique: eliminating equals computing directly
    let direct_order: Vec<Basis> = order.unwrap().into_iter().skip(2).collect();
    let direct = toric_gb(&links[1].child, &direct_order).unwrap().gb;
    assert_eq!(direct.format_elements(), links[1].gb.format_elements());
}

#[test]
fn elimination_chain_errors() {
    let (m7, order) = entry("M_7");
    let order = order.unwrap();
    assert!(matches!(
        elimination_chain(&m7, &order, &[b("356")]),
        Err(ToricError::ChainPrefix { position: 0, .. })
    ));
    // the second child is valid exactly when its basis set passes validation
    let rest: Vec<Basis> = m7
        .bases()
        .iter()
        .copied()
        .filter(|x| *x != b("357") && *x != b("356"))
        .collect();
    let child_valid = Matroid::new(7, rest).is_ok();
    match elimination_chain(&m7, &order, &[b("357"), b("356")]) {
        Ok(links) => assert!(child_valid && links.len() == 2),
        Err(ToricError::ChildInvalid { removed, .. }) => {
            assert!(!child_valid);
            assert_eq!(removed, b("356"));
        }
        Err(e) => panic!("{e}"),
    }
    let u = Matroid::uniform(2, 4);
    let order: Vec<Basis> = u.bases().to_vec();
    // dropping {1,2} from U_{2,4} leaves a matroid; dropping {1,3} too does not
    assert!(matches!(
        elimination_chain(&u, &order, &[b("12"), b("13")]),
        Err(ToricError::ChildInvalid { .. })
    ));
}

#[test]
fn order_search_examples() {
    let (m6, order) = entry("M_6");
    let out = order_search(&m6, order.as_deref(), SearchStrategy::HillClimb, 50, 3).unwrap();
    assert_eq!(out.best.verdict, Verdict::WhiteGbOk);
    assert_eq!(out.evaluations, 1, "the embedded order is tried first");

    let (m14, _) = entry("M_14");
    let a = order_search(&m14, None, SearchStrategy::Random, 1, 9).unwrap();
    let c = order_search(&m14, None, SearchStrategy::Random, 1, 9).unwrap();
    assert_eq!(a.evaluations, 1);
    assert_eq!(a.best_order, c.best_order);
    assert_eq!(a.trace, c.trace);
    let h1 = order_search(&m14, None, SearchStrategy::HillClimb, 4, 11).unwrap();
    let h2 = order_search(&m14, None, SearchStrategy::HillClimb, 4, 11).unwrap();
    assert_eq!(h1.best_order, h2.best_order);
    assert_eq!(h1.trace, h2.trace);
}

#[test]
fn fano_duality_transport() {
    let (m14, _) = entry("M_14");
    let t = duality_transport(&m14).unwrap();
    assert!(t.holds());
    assert!(t.fibers > 0);
}

#[test]
fn rank3_collisions_are_single_exchanges() {
    for e in table1() {
        assert!(
            degree2_exchange_complete(&e.matroid).unwrap().is_ok(),
            "{}",
            e.id
        );
    }
}

#[test]
fn weighted_order_marks_sorting_relations() {
    let s = sorting_gb(&Matroid::uniform(2, 5)).unwrap();
    assert!(s.gb.order.weights().is_some());
    assert!(!s.gb.order.is_lex());
    let lex = TermOrder::natural(3);
    assert!(lex.is_lex());
}

#[test]
fn catalog_loading() {
    let ms = load_catalog("4 2\n12 13 14 23 24 34\n".as_bytes()).unwrap();
    assert_eq!(ms.len(), 1);
    assert_eq!(ms[0].num_bases(), 6);
    match parse_catalog("7 3\n1,2,3\n1,2,9\n") {
        Err(CatalogError::Parse(MatroidError::Parse { line, .. })) => assert_eq!(line, 3),
        Err(CatalogError::Invalid { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    let sum = Matroid::uniform(1, 1)
        .direct_sum(&Matroid::uniform(2, 3))
        .unwrap();
    assert_eq!(scan_3_connected(&[sum]).counts(), (0, 1));
    let all: Vec<Matroid> = table1().into_iter().map(|e| e.matroid).collect();
    assert_eq!(scan_3_connected(&all).counts(), (18, 0));
}

#[test]
fn fano_has_28_bases_in_p3_of_7() {
    let e = table1_entry("M_14").unwrap();
    let rest: Vec<Basis> = p3_of_7()
        .into_iter()
        .filter(|x| !e.removed.contains(x))
        .collect();
    assert_eq!(rest.len(), 28);
    assert_eq!(rest, e.matroid.bases());
}
