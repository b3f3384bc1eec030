//! The six-vertex event sequence in `fixtures/`, replayed end to end.

use rrtlab::kingman::{replay, selection_records, tau_k, CoalescentEvents};
use rrtlab::RootedTree;

fn fixture() -> CoalescentEvents {
    let text = include_str!("fixtures/six_vertex_chain.json");
    serde_json::from_str(text).unwrap()
}

#[test]
fn final_and_relabelled_trees() {
    let out = replay(&fixture());
    let final_tree = RootedTree::from_edges(6, &[(5, 2), (1, 6), (4, 6), (3, 2), (6, 2)]).unwrap();
    assert_eq!(out.final_tree, final_tree);
    assert_eq!(out.final_tree.root(), 2);

    let times: Vec<Option<u32>> = (1..=6).map(|u| out.edge_time(u)).collect();
    assert_eq!(
        times,
        vec![Some(2), None, Some(4), Some(3), Some(1), Some(5)]
    );
    // the root gets label 1, every other vertex n + 1 - (its edge time)
    let labels: Vec<u32> = (1..=6).map(|u| out.relabel(u)).collect();
    assert_eq!(labels, vec![5, 1, 3, 4, 6, 2]);

    let phi = RootedTree::from_edges(6, &[(2, 1), (3, 1), (6, 1), (4, 2), (5, 2)]).unwrap();
    assert_eq!(out.phi_tree, phi);
    assert!(phi.is_increasing());
    assert_eq!(phi.degree_multiset(), out.final_tree.degree_multiset());
}

#[test]
fn selection_sets() {
    let records = selection_records(&fixture());
    let view: Vec<(Vec<u32>, Option<u32>, u32)> = records
        .iter()
        .map(|r| (r.times.clone(), r.stop, r.degree))
        .collect();
    assert_eq!(
        view,
        vec![
            (vec![2, 3, 5], Some(2), 0),
            (vec![1, 4, 5], None, 3),
            (vec![4, 5], Some(4), 0),
            (vec![3, 5], Some(3), 0),
            (vec![1, 4, 5], Some(1), 0),
            (vec![2, 3, 5], Some(5), 2),
        ]
    );
    let degrees = replay(&fixture()).final_tree.child_counts();
    for r in &records {
        assert_eq!(r.degree, degrees.get(r.vertex));
    }
}

#[test]
fn first_merges_inside_small_index_sets() {
    let e = fixture();
    assert_eq!(tau_k(&e, 2).unwrap(), Some(5));
    assert_eq!(tau_k(&e, 3).unwrap(), Some(4));
    assert_eq!(tau_k(&e, 6).unwrap(), Some(1));
}

#[test]
fn wire_format_round_trip() {
    let e = fixture();
    let json = serde_json::to_string(&e).unwrap();
    assert_eq!(
        json,
        r#"{"n":6,"pairs":[[2,5],[1,5],[1,4],[2,3],[1,2]],"coins":[1,0,1,1,0]}"#
    );
    let bad = r#"{"n":6,"pairs":[[2,5],[1,5],[1,4],[2,3],[1,3]],"coins":[1,0,1,1,0]}"#;
    assert!(serde_json::from_str::<CoalescentEvents>(bad).is_err());
}
