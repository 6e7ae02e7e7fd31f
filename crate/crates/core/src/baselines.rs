//! Baselines the profile method is compared against: scalar author
//! indicators (paper count, citation count, h-index) scored by a
//! class-weighted logistic regression, and the three classic
//! bibliometric ego networks (co-citation, bibliographic coupling,
//! co-authorship) scored by the same graph model as the profiles.

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{GfError, Result};
use crate::gfgraph::{GFNode, GFProfile};
use crate::metrics::{run_cv, CvConfig, CvReport, SplitScores};

/// The three scalar indicators used as the non-graph baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorVector {
    pub n_papers: u64,
    pub n_citations: u64,
    pub h_index: u64,
}

impl IndicatorVector {
    pub fn as_features(&self) -> Vec<f64> {
        vec![
            self.n_papers as f64,
            self.n_citations as f64,
            self.h_index as f64,
        ]
    }
}

/// Largest h such that at least h papers have at least h citations.
pub fn h_index(citation_counts: &[u64]) -> u64 {
    let mut sorted = citation_counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted
        .iter()
        .enumerate()
        .take_while(|(i, &c)| c >= (*i as u64) + 1)
        .count() as u64
}

pub fn compute_indicators(corpus: &Corpus, scholar: &str) -> Result<IndicatorVector> {
    if !corpus.is_known_author(scholar) {
        return Err(GfError::UnknownAuthor(scholar.to_string()));
    }
    let counts: Vec<u64> = corpus
        .papers_of_author(scholar)
        .iter()
        .map(|&idx| corpus.citation_count(idx))
        .collect();
    Ok(IndicatorVector {
        n_papers: counts.len() as u64,
        n_citations: counts.iter().sum(),
        h_index: h_index(&counts),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetworkKind {
    CoCitation,
    BibCoupling,
    CoAuthorship,
}

/// Undirected weighted edge between node positions `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiblioEdge {
    pub a: usize,
    pub b: usize,
    pub weight: u32,
}

/// Co-author node: activity accumulated within the scholar's paper set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaNode {
    pub author_id: String,
    pub n_papers: u64,
    pub n_citations: u64,
}

/// One bibliometric ego network. Co-citation and coupling networks share
/// the profile's paper nodes (with the same attributes); the
/// co-authorship network has author nodes instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiblioNetwork {
    pub kind: NetworkKind,
    pub scholar_id: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub paper_nodes: Vec<GFNode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub author_nodes: Vec<CaNode>,
    pub edges: Vec<BiblioEdge>,
}

/// Size of the intersection of two sorted index slices.
fn sorted_intersection_count(a: &[usize], b: &[usize]) -> u32 {
    let (mut i, mut j, mut n) = (0usize, 0usize, 0u32);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Build the ego network of the profile's scholar.
///
/// Co-citation weight: papers citing both endpoints. Coupling weight:
/// references shared by both endpoints. Co-authorship weight: papers of
/// the scholar on which both authors appear. Zero-weight pairs get no
/// edge.
pub fn build_bibliometric_network(
    corpus: &Corpus,
    profile: &GFProfile,
    kind: NetworkKind,
) -> Result<BiblioNetwork> {
    match kind {
        NetworkKind::CoCitation | NetworkKind::BibCoupling => {
            let idxs: Vec<usize> = profile
                .nodes
                .iter()
                .map(|n| corpus.paper_idx(&n.paper_id))
                .collect::<Result<_>>()?;
            let neighbor_list = |i: usize| -> &[usize] {
                match kind {
                    NetworkKind::CoCitation => corpus.citers_of(i),
                    _ => corpus.refs_of(i),
                }
            };
            let mut edges = Vec::new();
            for a in 0..idxs.len() {
                for b in (a + 1)..idxs.len() {
                    let weight =
                        sorted_intersection_count(neighbor_list(idxs[a]), neighbor_list(idxs[b]));
                    if weight > 0 {
                        edges.push(BiblioEdge { a, b, weight });
                    }
                }
            }
            Ok(BiblioNetwork {
                kind,
                scholar_id: profile.scholar_id.clone(),
                paper_nodes: profile.nodes.clone(),
                author_nodes: vec![],
                edges,
            })
        }
        NetworkKind::CoAuthorship => {
            // Scholar first, co-authors in sorted order.
            let mut coauthors: Vec<String> = Vec::new();
            for n in &profile.nodes {
                let idx = corpus.paper_idx(&n.paper_id)?;
                for a in &corpus.paper_by_idx(idx).authors {
                    if a != &profile.scholar_id && !coauthors.contains(a) {
                        coauthors.push(a.clone());
                    }
                }
            }
            coauthors.sort_unstable();
            let mut ids = vec![profile.scholar_id.clone()];
            ids.extend(coauthors);

            let mut author_nodes: Vec<CaNode> = ids
                .iter()
                .map(|id| CaNode {
                    author_id: id.clone(),
                    n_papers: 0,
                    n_citations: 0,
                })
                .collect();
            let position: std::collections::HashMap<&str, usize> = ids
                .iter()
                .enumerate()
                .map(|(i, id)| (id.as_str(), i))
                .collect();

            let mut pair_counts: std::collections::HashMap<(usize, usize), u32> =
                std::collections::HashMap::new();
            for n in &profile.nodes {
                let idx = corpus.paper_idx(&n.paper_id)?;
                let members: Vec<usize> = corpus.paper_by_idx(idx).authors.iter()
                    .map(|a| position[a.as_str()])
                    .collect();
                for &m in &members {
                    author_nodes[m].n_papers += 1;
                    author_nodes[m].n_citations += n.citation_count;
                }
                for (i, &u) in members.iter().enumerate() {
                    for &v in &members[i + 1..] {
                        let key = (u.min(v), u.max(v));
                        *pair_counts.entry(key).or_insert(0) += 1;
                    }
                }
            }
            let mut edges: Vec<BiblioEdge> = pair_counts
                .into_iter()
                .map(|((a, b), weight)| BiblioEdge { a, b, weight })
                .collect();
            edges.sort_unstable_by_key(|e| (e.a, e.b));
            Ok(BiblioNetwork {
                kind,
                scholar_id: profile.scholar_id.clone(),
                paper_nodes: vec![],
                author_nodes,
                edges,
            })
        }
    }
}

/// Sigmoid that never returns exactly 0 or 1.
fn sigmoid(z: f64) -> f64 {
    let p = 1.0 / (1.0 + (-z).exp());
    p.clamp(1e-12, 1.0 - 1e-12)
}

/// Class-weighted logistic regression trained by full-batch gradient
/// descent. Features must already be standardized. Deterministic: zero
/// initialization, fixed iteration count.
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

const LOGISTIC_ITERS: usize = 800;
const LOGISTIC_LR: f64 = 0.5;
const LOGISTIC_L2: f64 = 1e-6;

pub fn train_weighted_logistic(x: &[Vec<f64>], y: &[bool]) -> Result<LogisticModel> {
    if x.is_empty() {
        return Err(GfError::EmptyTrainingData);
    }
    let n_pos = y.iter().filter(|l| **l).count();
    if n_pos == 0 || n_pos == y.len() {
        return Err(GfError::SingleClass);
    }
    let dim = x[0].len();
    let n = x.len() as f64;
    let w_pos = n / (2.0 * n_pos as f64);
    let w_neg = n / (2.0 * (y.len() - n_pos) as f64);
    let total_weight: f64 = y.iter().map(|&l| if l { w_pos } else { w_neg }).sum();

    let mut weights = vec![0.0f64; dim];
    let mut bias = 0.0f64;
    for _ in 0..LOGISTIC_ITERS {
        let mut grad_w = vec![0.0f64; dim];
        let mut grad_b = 0.0f64;
        for (xi, &yi) in x.iter().zip(y) {
            let z = xi.iter().zip(&weights).map(|(a, b)| a * b).sum::<f64>() + bias;
            let err = (sigmoid(z) - yi as u8 as f64) * if yi { w_pos } else { w_neg };
            for (g, v) in grad_w.iter_mut().zip(xi) {
                *g += err * v;
            }
            grad_b += err;
        }
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= LOGISTIC_LR * (g / total_weight + LOGISTIC_L2 * *w);
        }
        bias -= LOGISTIC_LR * grad_b / total_weight;
    }
    Ok(LogisticModel { weights, bias })
}

impl LogisticModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let z = x.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>() + self.bias;
        sigmoid(z)
    }
}

/// Per-column mean/std fit on the training split only.
pub struct Standardizer {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Standardizer {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        let n = rows.len().max(1) as f64;
        let mut mean = vec![0.0; dim];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut std = vec![0.0; dim];
        for r in rows {
            for ((s, v), m) in std.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        for s in std.iter_mut() {
            *s = (*s / n).sqrt();
            if *s == 0.0 {
                *s = 1.0; // constant column maps to 0 after centering
            }
        }
        Standardizer { mean, std }
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

/// Cross-validate a weighted logistic regression over raw feature rows.
pub fn logistic_cv(
    features: &[Vec<f64>],
    labels: &[bool],
    cfg: &CvConfig,
    seed: u64,
) -> Result<CvReport> {
    run_cv(labels, cfg, seed, |train_idx, test_idx, _| {
        let train_rows: Vec<Vec<f64>> = train_idx.iter().map(|&i| features[i].clone()).collect();
        let scaler = Standardizer::fit(&train_rows);
        let x: Vec<Vec<f64>> = train_rows.iter().map(|r| scaler.apply(r)).collect();
        let y: Vec<bool> = train_idx.iter().map(|&i| labels[i]).collect();
        let model = train_weighted_logistic(&x, &y)?;
        Ok(SplitScores {
            train_scores: x.iter().map(|r| model.predict(r)).collect(),
            test_scores: test_idx
                .iter()
                .map(|&i| model.predict(&scaler.apply(&features[i])))
                .collect(),
        })
    })
}

/// The indicator baseline: standardized (papers, citations, h-index)
/// under the same protocol as every other method.
pub fn indicator_baseline_eval(
    indicators: &[IndicatorVector],
    labels: &[bool],
    cfg: &CvConfig,
    seed: u64,
) -> Result<CvReport> {
    let features: Vec<Vec<f64>> = indicators.iter().map(|v| v.as_features()).collect();
    logistic_cv(&features, labels, cfg, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CitationRecord, PaperRecord};
    use crate::gfgraph::build_full_profile;
    use crate::topic_embed::TopicEmbedding;

    fn paper(id: &str, year: i32, authors: &[&str]) -> PaperRecord {
        PaperRecord {
            paper_id: id.to_string(),
            title: id.to_string(),
            year,
            venue: None,
            authors: authors.iter().map(|s| s.to_string()).collect(),
            topic_ids: vec![],
            abstract_text: None,
            external_citations: None,
        }
    }

    fn cite(citing: &str, cited: &str) -> CitationRecord {
        CitationRecord {
            citing_id: citing.to_string(),
            cited_id: cited.to_string(),
        }
    }

    fn h_index_oracle(counts: &[u64]) -> u64 {
        (0..=counts.len() as u64)
            .filter(|&h| counts.iter().filter(|&&c| c >= h).count() as u64 >= h)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn h_index_hand_cases() {
        assert_eq!(h_index(&[10, 8, 5, 4, 3]), 4);
        assert_eq!(h_index(&[]), 0);
        assert_eq!(h_index(&[1, 1, 1]), 1);
        assert_eq!(h_index(&[0, 0]), 0);
        assert_eq!(h_index(&[100]), 1);
    }

    #[test]
    fn h_index_matches_brute_force_and_is_monotone() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let n = rng.gen_range(0..40usize);
            let counts: Vec<u64> = (0..n).map(|_| rng.gen_range(0..50u64)).collect();
            assert_eq!(h_index(&counts), h_index_oracle(&counts));
            let bumped: Vec<u64> = counts.iter().map(|c| c + 1).collect();
            assert!(h_index(&bumped) >= h_index(&counts));
        }
    }

    #[test]
    fn indicators_accumulate_over_scholar_papers() {
        let corpus = Corpus::from_records(
            vec![
                paper("A", 2010, &["s"]),
                paper("B", 2011, &["s"]),
                paper("X1", 2012, &["o"]),
                paper("X2", 2012, &["o"]),
            ],
            vec![cite("X1", "A"), cite("X2", "A"), cite("X1", "B")],
            vec![],
            vec![],
            true,
        )
        .unwrap();
        let v = compute_indicators(&corpus, "s").unwrap();
        assert_eq!(v.n_papers, 2);
        assert_eq!(v.n_citations, 3);
        assert_eq!(v.h_index, 1); // counts [2, 1]: only one paper has >= 2
        assert!(compute_indicators(&corpus, "nobody").is_err());
    }

    fn cc_bc_fixture() -> (Corpus, GFProfile) {
        // Scholar papers A, B; outsiders P, Q, R cite them; A and B
        // share two references out of three.
        let corpus = Corpus::from_records(
            vec![
                paper("R1", 2000, &["z"]),
                paper("R2", 2000, &["z"]),
                paper("R3", 2000, &["z"]),
                paper("A", 2010, &["s"]),
                paper("B", 2011, &["s"]),
                paper("P", 2012, &["o"]),
                paper("Q", 2012, &["o"]),
                paper("R", 2012, &["o"]),
            ],
            vec![
                cite("A", "R1"),
                cite("A", "R2"),
                cite("B", "R1"),
                cite("B", "R2"),
                cite("B", "R3"),
                cite("P", "A"),
                cite("P", "B"),
                cite("Q", "A"),
                cite("Q", "B"),
                cite("R", "A"),
                cite("R", "B"),
            ],
            vec![],
            vec![],
            true,
        )
        .unwrap();
        let profile = build_full_profile(&corpus, "s", &TopicEmbedding::empty()).unwrap();
        (corpus, profile)
    }

    #[test]
    fn cocitation_counts_common_citers() {
        let (corpus, profile) = cc_bc_fixture();
        let net = build_bibliometric_network(&corpus, &profile, NetworkKind::CoCitation).unwrap();
        assert_eq!(net.paper_nodes.len(), profile.nodes.len());
        assert_eq!(net.edges, vec![BiblioEdge { a: 0, b: 1, weight: 3 }]);
    }

    #[test]
    fn coupling_counts_shared_references() {
        let (corpus, profile) = cc_bc_fixture();
        let net = build_bibliometric_network(&corpus, &profile, NetworkKind::BibCoupling).unwrap();
        assert_eq!(net.edges, vec![BiblioEdge { a: 0, b: 1, weight: 2 }]);
    }

    #[test]
    fn disjoint_references_produce_no_coupling_edge() {
        let corpus = Corpus::from_records(
            vec![
                paper("R1", 2000, &["z"]),
                paper("R2", 2000, &["z"]),
                paper("A", 2010, &["s"]),
                paper("B", 2011, &["s"]),
            ],
            vec![cite("A", "R1"), cite("B", "R2")],
            vec![],
            vec![],
            true,
        )
        .unwrap();
        let profile = build_full_profile(&corpus, "s", &TopicEmbedding::empty()).unwrap();
        let net = build_bibliometric_network(&corpus, &profile, NetworkKind::BibCoupling).unwrap();
        assert!(net.edges.is_empty());
    }

    #[test]
    fn coauthorship_aggregates_within_scholar_papers() {
        let corpus = Corpus::from_records(
            (0..4)
                .map(|i| paper(&format!("P{i}"), 2010 + i, &["s", "w"]))
                .collect(),
            vec![cite("P1", "P0"), cite("P2", "P0")],
            vec![],
            vec![],
            true,
        )
        .unwrap();
        let profile = build_full_profile(&corpus, "s", &TopicEmbedding::empty()).unwrap();
        let net =
            build_bibliometric_network(&corpus, &profile, NetworkKind::CoAuthorship).unwrap();
        assert_eq!(net.author_nodes.len(), 2);
        assert_eq!(net.author_nodes[0].author_id, "s");
        assert_eq!(net.author_nodes[0].n_papers, 4);
        assert_eq!(net.author_nodes[0].n_citations, 2); // P0 cited twice
        assert_eq!(net.edges, vec![BiblioEdge { a: 0, b: 1, weight: 4 }]);
    }

    #[test]
    fn pairwise_weights_are_symmetric_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let papers: Vec<PaperRecord> = (0..30)
            .map(|i| {
                let authors: Vec<&str> = if i < 10 { vec!["s"] } else { vec!["o"] };
                paper(&format!("p{i:02}"), 2000 + (i % 10) as i32, &authors)
            })
            .collect();
        let ids: Vec<String> = papers.iter().map(|p| p.paper_id.clone()).collect();
        let mut citations = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for _ in 0..150 {
            let a = rng.gen_range(0..30usize);
            let b = rng.gen_range(0..30usize);
            if a != b && seen.insert((a, b)) {
                citations.push(cite(&ids[a], &ids[b]));
            }
        }
        let corpus = Corpus::from_records(papers, citations, vec![], vec![], true).unwrap();
        // Brute-force common-citer and shared-reference counts for both
        // orders of every pair.
        for u in 0..10 {
            for v in 0..10 {
                let cc_uv = sorted_intersection_count(corpus.citers_of(u), corpus.citers_of(v));
                let cc_vu = sorted_intersection_count(corpus.citers_of(v), corpus.citers_of(u));
                assert_eq!(cc_uv, cc_vu);
                let bc_uv = sorted_intersection_count(corpus.refs_of(u), corpus.refs_of(v));
                let brute = corpus
                    .refs_of(u)
                    .iter()
                    .filter(|r| corpus.refs_of(v).contains(r))
                    .count() as u32;
                assert_eq!(bc_uv, brute);
            }
        }
    }

    #[test]
    fn separable_indicators_reach_perfect_f1() {
        // Awardees have strictly larger h-index.
        let indicators: Vec<IndicatorVector> = (0..60)
            .map(|i| {
                let awarded = i % 4 == 0;
                IndicatorVector {
                    n_papers: 20,
                    n_citations: 300 + i as u64,
                    h_index: if awarded { 20 + (i % 3) as u64 } else { 5 + (i % 3) as u64 },
                }
            })
            .collect();
        let labels: Vec<bool> = (0..60).map(|i| i % 4 == 0).collect();
        let cfg = CvConfig { folds: 5, repeats: 2, threshold_on_test: false };
        let report = indicator_baseline_eval(&indicators, &labels, &cfg, 3).unwrap();
        assert_eq!(report.f1_mean, 1.0);
        assert_eq!(report.auc_mean, 1.0);
    }

    #[test]
    fn shuffled_labels_score_at_chance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let indicators: Vec<IndicatorVector> = (0..200)
            .map(|_| IndicatorVector {
                n_papers: rng.gen_range(5..50),
                n_citations: rng.gen_range(10..2000),
                h_index: rng.gen_range(1..30),
            })
            .collect();
        let labels: Vec<bool> = (0..200).map(|_| rng.gen_bool(0.25)).collect();
        let cfg = CvConfig { folds: 5, repeats: 4, threshold_on_test: false };
        let report = indicator_baseline_eval(&indicators, &labels, &cfg, 5).unwrap();
        assert!(
            (report.auc_mean - 0.5).abs() < 0.08,
            "independent labels should score near chance, AUC = {}",
            report.auc_mean
        );
    }

    #[test]
    fn constant_indicators_score_exactly_at_chance() {
        let indicators: Vec<IndicatorVector> = (0..40)
            .map(|_| IndicatorVector { n_papers: 10, n_citations: 100, h_index: 5 })
            .collect();
        let labels: Vec<bool> = (0..40).map(|i| i % 4 == 0).collect();
        let cfg = CvConfig { folds: 5, repeats: 2, threshold_on_test: false };
        let report = indicator_baseline_eval(&indicators, &labels, &cfg, 5).unwrap();
        assert_eq!(report.auc_mean, 0.5);
    }

    #[test]
    fn single_class_training_is_rejected() {
        let x = vec![vec![1.0], vec![2.0]];
        assert!(matches!(
            train_weighted_logistic(&x, &[true, true]),
            Err(GfError::SingleClass)
        ));
        assert!(matches!(
            train_weighted_logistic(&[], &[]),
            Err(GfError::EmptyTrainingData)
        ));
    }
}
