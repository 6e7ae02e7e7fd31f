//! Property tests for invariants that must hold on arbitrary inputs, not
//! just the fixtures the unit tests pick. Each block states the contract
//! it falsifies; oracles are recomputed locally from the definition.

use std::collections::{BTreeMap, HashSet};

use proptest::prelude::*;

use gf_core::baselines::h_index;
use gf_core::gfgraph::{
    extract_core_profile, AttributeMask, GFEdge, GFNode, GFProfile, ProfileView,
};
use gf_core::metrics::{best_f1_threshold, f1_score};
use gf_core::node_profile::null_alpha_rate;

/// A populated full profile: nodes dated in index order, edges only from
/// an earlier index to a strictly later one, so the graph is acyclic by
/// construction and ids sort the same way indices do.
fn populated_profile() -> impl Strategy<Value = GFProfile> {
    let nodes = prop::collection::vec((0i32..30, 0u64..50, 1usize..=5, 0.0f64..=1.0), 1..=10);
    let raw_edges = prop::collection::vec((0usize..10, 0usize..10, 0.0f64..=1.0), 0..=20);
    (nodes, raw_edges).prop_map(|(node_parts, raw_edges)| {
        let nodes: Vec<GFNode> = node_parts
            .iter()
            .enumerate()
            .map(|(i, &(dy, cites, order, p))| GFNode {
                paper_id: format!("p{i:02}"),
                year: 1990 + dy,
                citation_count: cites,
                author_order: order,
                topic_vector: vec![0.0; 2],
                p_cont: Some(p),
            })
            .collect();
        let mut seen = HashSet::new();
        let mut edges = Vec::new();
        for (a, b, p) in raw_edges {
            let (i, j) = (a.min(b), a.max(b));
            if i == j || j >= nodes.len() || !seen.insert((i, j)) {
                continue;
            }
            edges.push(GFEdge {
                src: nodes[i].paper_id.clone(),
                dst: nodes[j].paper_id.clone(),
                p_extend: Some(p),
            });
        }
        edges.sort_by(|a, b| (&a.src, &a.dst).cmp(&(&b.src, &b.dst)));
        GFProfile {
            scholar_id: "s".into(),
            nodes,
            edges,
            view: ProfileView::Full,
            attribute_selection: AttributeMask::default(),
            dropped_future_edges: 0,
            dropped_cycle_edges: 0,
        }
    })
}

proptest! {
    // h = max h such that at least h papers have >= h citations; order
    // of the input must not matter.
    #[test]
    fn h_index_matches_its_definition(mut counts in prop::collection::vec(0u64..200, 0..60)) {
        let h = h_index(&counts);
        let at_least = |t: u64| counts.iter().filter(|&&c| c >= t).count() as u64;
        prop_assert!(at_least(h) >= h);
        prop_assert!(at_least(h + 1) < h + 1);
        counts.reverse();
        prop_assert_eq!(h_index(&counts), h);
    }

    // The null rate is a (count-weighted) mean of 1/k! terms, so it sits
    // in (0, 1] and pooling two tables can never leave the hull of the
    // two per-table rates.
    #[test]
    fn null_alpha_rate_is_convex_under_pooling(
        a in prop::collection::btree_map(1usize..12, 1usize..40, 1..6),
        b in prop::collection::btree_map(1usize..12, 1usize..40, 1..6),
    ) {
        let ra = null_alpha_rate(&a).unwrap();
        let rb = null_alpha_rate(&b).unwrap();
        prop_assert!(ra > 0.0 && ra <= 1.0);
        let mut pooled: BTreeMap<usize, usize> = a.clone();
        for (k, c) in &b {
            *pooled.entry(*k).or_insert(0) += c;
        }
        let rp = null_alpha_rate(&pooled).unwrap();
        prop_assert!(rp >= ra.min(rb) - 1e-12 && rp <= ra.max(rb) + 1e-12);
    }

    // Thresholding at each distinct score realises every achievable
    // prediction vector, so the returned F1 must dominate all of them
    // and must agree with f1_score at the returned threshold.
    #[test]
    fn best_f1_threshold_is_optimal(
        pairs in prop::collection::vec((0.0f64..=1.0, any::<bool>()), 1..40),
    ) {
        let scores: Vec<f64> = pairs.iter().map(|(s, _)| *s).collect();
        let labels: Vec<bool> = pairs.iter().map(|(_, l)| *l).collect();
        let (t, best) = best_f1_threshold(&scores, &labels);
        let f1_at = |t: f64| {
            let preds: Vec<bool> = scores.iter().map(|&s| s >= t).collect();
            f1_score(&preds, &labels)
        };
        prop_assert!((f1_at(t) - best).abs() < 1e-12);
        for &s in &scores {
            prop_assert!(f1_at(s) <= best + 1e-12);
        }
    }

    // Core extraction keeps exactly the nodes with p_cont above the
    // threshold, exactly ceil(q * m) of the m edges surviving the node
    // cut (highest p_extend first), stays sorted and acyclic, and is
    // idempotent at the same parameters.
    #[test]
    fn core_extraction_honours_its_contract(
        profile in populated_profile(),
        threshold in 0.0f64..=1.0,
        fraction in prop::sample::select(vec![0.1f64, 0.25, 0.5, 0.75, 1.0]),
    ) {
        let core = extract_core_profile(&profile, threshold, fraction).unwrap();

        let expect_nodes: Vec<&str> = profile
            .nodes
            .iter()
            .filter(|n| n.p_cont.unwrap() > threshold)
            .map(|n| n.paper_id.as_str())
            .collect();
        let got_nodes: Vec<&str> = core.nodes.iter().map(|n| n.paper_id.as_str()).collect();
        prop_assert_eq!(got_nodes, expect_nodes);

        let kept: HashSet<&str> = core.nodes.iter().map(|n| n.paper_id.as_str()).collect();
        let mut surviving: Vec<&GFEdge> = profile
            .edges
            .iter()
            .filter(|e| kept.contains(e.src.as_str()) && kept.contains(e.dst.as_str()))
            .collect();
        let quota = (fraction * surviving.len() as f64).ceil() as usize;
        prop_assert_eq!(core.edges.len(), quota);
        surviving.sort_by(|a, b| {
            b.p_extend
                .unwrap()
                .partial_cmp(&a.p_extend.unwrap())
                .unwrap()
                .then_with(|| (&a.src, &a.dst).cmp(&(&b.src, &b.dst)))
        });
        let mut expect_edges: Vec<GFEdge> =
            surviving.into_iter().take(quota).cloned().collect();
        expect_edges.sort_by(|a, b| (&a.src, &a.dst).cmp(&(&b.src, &b.dst)));
        prop_assert_eq!(&core.edges, &expect_edges);

        prop_assert!(core.topological_order().is_some());
        let again = extract_core_profile(&core, threshold, fraction).unwrap();
        prop_assert_eq!(again, core);
    }
}
