//! Topic-hierarchy embedding.
//!
//! The topic taxonomy is a rooted tree. Each topic gets a low-dimensional
//! vector by classical multidimensional scaling over squared hop
//! distances, and each paper gets the mean of its topics' vectors. The
//! eigensolver is a shifted power iteration with deflation, so results
//! are deterministic for a given seed and need no external linear
//! algebra.

use std::collections::{HashMap, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, TopicRecord};
use crate::error::{GfError, Result};
use crate::jsonl;
use crate::rng;

/// Rooted topic tree, validated: exactly one root, every node reachable
/// from it, no cycles in the parent relation.
#[derive(Debug, Clone)]
pub struct TopicHierarchy {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    /// Undirected adjacency (parent links + their reverses).
    adj: Vec<Vec<usize>>,
    root: usize,
}

impl TopicHierarchy {
    pub fn from_records(records: &[TopicRecord]) -> Result<TopicHierarchy> {
        if records.is_empty() {
            return Err(GfError::InvalidHierarchy("no topics".into()));
        }
        let ids: Vec<String> = records.iter().map(|r| r.topic_id.clone()).collect();
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(GfError::DuplicateTopicId(id.clone()));
            }
        }
        let mut adj = vec![Vec::new(); ids.len()];
        let mut root = None;
        for (i, r) in records.iter().enumerate() {
            match &r.parent_id {
                None => match root {
                    None => root = Some(i),
                    Some(other) => {
                        return Err(GfError::InvalidHierarchy(format!(
                            "multiple roots: `{}` and `{}`",
                            ids[other], ids[i]
                        )))
                    }
                },
                Some(pid) => {
                    let p = *index.get(pid).ok_or_else(|| {
                        GfError::InvalidHierarchy(format!(
                            "topic `{}` has unknown parent `{pid}`",
                            r.topic_id
                        ))
                    })?;
                    if p == i {
                        return Err(GfError::InvalidHierarchy(format!(
                            "topic `{}` is its own parent",
                            r.topic_id
                        )));
                    }
                    adj[i].push(p);
                    adj[p].push(i);
                }
            }
        }
        let root = root.ok_or_else(|| GfError::InvalidHierarchy("no root topic".into()))?;

        // Every node has one parent edge except the root, so reaching all
        // n nodes from the root over n-1 edges certifies a tree; a cycle
        // would leave its members unreachable.
        let hierarchy = TopicHierarchy { ids, index, adj, root };
        let reached = hierarchy.hop_distances(root).iter().filter(|d| **d < usize::MAX).count();
        if reached != hierarchy.ids.len() {
            return Err(GfError::InvalidHierarchy(
                "hierarchy is disconnected or cyclic".into(),
            ));
        }
        Ok(hierarchy)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn root_id(&self) -> &str {
        &self.ids[self.root]
    }

    pub fn topic_idx(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// BFS hop distances from `start`; unreachable nodes get usize::MAX.
    fn hop_distances(&self, start: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.adj.len()];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

/// Map topic_id -> d-dimensional coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopicEmbedding {
    pub dimension: usize,
    pub vectors: HashMap<String, Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct EmbeddingRow {
    topic_id: String,
    vector: Vec<f64>,
}

impl TopicEmbedding {
    pub fn get(&self, topic_id: &str) -> Option<&[f64]> {
        self.vectors.get(topic_id).map(Vec::as_slice)
    }

    /// Zero-dimensional embedding for corpora without a topic file.
    pub fn empty() -> TopicEmbedding {
        TopicEmbedding {
            dimension: 0,
            vectors: HashMap::new(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut rows: Vec<EmbeddingRow> = self
            .vectors
            .iter()
            .map(|(id, v)| EmbeddingRow {
                topic_id: id.clone(),
                vector: v.clone(),
            })
            .collect();
        rows.sort_by(|a, b| a.topic_id.cmp(&b.topic_id));
        jsonl::write_jsonl(path, &rows)
    }

    pub fn load(path: &Path) -> Result<TopicEmbedding> {
        let rows: Vec<EmbeddingRow> = jsonl::read_jsonl(path)?;
        let dimension = rows.first().map(|r| r.vector.len()).unwrap_or(0);
        for r in &rows {
            if r.vector.len() != dimension {
                return Err(GfError::InvalidRecord(format!(
                    "embedding vector for `{}` has length {}, expected {dimension}",
                    r.topic_id,
                    r.vector.len()
                )));
            }
        }
        Ok(TopicEmbedding {
            dimension,
            vectors: rows.into_iter().map(|r| (r.topic_id, r.vector)).collect(),
        })
    }
}

/// Classical MDS of the hierarchy's hop metric.
///
/// Double-centers the squared-distance matrix and extracts the top `d`
/// eigenpairs with shifted power iteration plus deflation; coordinate j
/// is eigenvector_j * sqrt(max(eigenvalue_j, 0)). Axes past the positive
/// spectrum contribute zero columns (hop metrics of trees need not be
/// Euclidean). Deterministic for a given seed.
pub fn classical_mds(hierarchy: &TopicHierarchy, d: usize, seed: u64) -> Result<TopicEmbedding> {
    let n = hierarchy.len();
    if d == 0 || d >= n {
        return Err(GfError::DimensionOutOfRange { dim: d, nodes: n });
    }

    // Squared hop distances.
    let mut sq = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        let dist = hierarchy.hop_distances(i);
        for j in 0..n {
            let h = dist[j] as f64;
            sq[i][j] = h * h;
        }
    }

    // Double-centering: B = -1/2 * C * D2 * C with C = I - 11^T/n.
    let row_mean: Vec<f64> = sq.iter().map(|r| r.iter().sum::<f64>() / n as f64).collect();
    let grand_mean = row_mean.iter().sum::<f64>() / n as f64;
    let mut b = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            b[i][j] = -0.5 * (sq[i][j] - row_mean[i] - row_mean[j] + grand_mean);
        }
    }

    let pairs = top_eigenpairs(&mut b, d, seed);
    let mut vectors: HashMap<String, Vec<f64>> = hierarchy
        .ids
        .iter()
        .map(|id| (id.clone(), vec![0.0; d]))
        .collect();
    for (axis, (value, vector)) in pairs.iter().enumerate() {
        let scale = value.max(0.0).sqrt();
        for (i, id) in hierarchy.ids.iter().enumerate() {
            vectors.get_mut(id).unwrap()[axis] = vector[i] * scale;
        }
    }
    Ok(TopicEmbedding {
        dimension: d,
        vectors,
    })
}

const POWER_TOL: f64 = 1e-9;
const POWER_MAX_ITERS: usize = 10_000;

/// Top-d eigenpairs of a symmetric matrix in descending algebraic order.
///
/// Power iteration on B + sigma*I with sigma an infinity-norm bound on
/// the spectrum, so the dominant eigenvalue of the shifted matrix is the
/// algebraically largest of B; deflation removes each found pair. The
/// matrix is consumed.
fn top_eigenpairs(b: &mut [Vec<f64>], d: usize, seed: u64) -> Vec<(f64, Vec<f64>)> {
    use rand::Rng;
    let n = b.len();
    let sigma = b
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0f64, f64::max)
        .max(1e-12);

    let mut rng = rng::substream(seed, "mds-power");
    let mut pairs = Vec::with_capacity(d);
    for _ in 0..d {
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        normalize(&mut x);
        for _ in 0..POWER_MAX_ITERS {
            let mut y = mat_vec(b, &x);
            for i in 0..n {
                y[i] += sigma * x[i];
            }
            normalize(&mut y);
            let delta = x
                .iter()
                .zip(&y)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            x = y;
            if delta < POWER_TOL {
                break;
            }
        }
        // Deterministic sign: largest-magnitude entry positive.
        let lead = x
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        if x[lead] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        let bx = mat_vec(b, &x);
        let lambda: f64 = x.iter().zip(&bx).map(|(a, b)| a * b).sum();
        for i in 0..n {
            for j in 0..n {
                b[i][j] -= lambda * x[i] * x[j];
            }
        }
        pairs.push((lambda, x));
    }
    pairs
}

fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

/// Mean of the paper's topic vectors; the zero vector when the paper has
/// no topics. Returns the vector and the count of topic ids that were
/// missing from the embedding (skipped).
pub fn paper_topic_vector(
    corpus: &Corpus,
    emb: &TopicEmbedding,
    paper: &str,
) -> Result<(Vec<f64>, usize)> {
    let idx = corpus.paper_idx(paper)?;
    Ok(paper_topic_vector_idx(corpus, emb, idx))
}

pub fn paper_topic_vector_idx(
    corpus: &Corpus,
    emb: &TopicEmbedding,
    idx: usize,
) -> (Vec<f64>, usize) {
    let mut acc = vec![0.0; emb.dimension];
    let mut found = 0usize;
    let mut skipped = 0usize;
    for tid in &corpus.paper_by_idx(idx).topic_ids {
        match emb.get(tid) {
            Some(v) => {
                found += 1;
                for (a, x) in acc.iter_mut().zip(v) {
                    *a += x;
                }
            }
            None => skipped += 1,
        }
    }
    if found > 0 {
        let inv = 1.0 / found as f64;
        acc.iter_mut().for_each(|a| *a *= inv);
    }
    (acc, skipped)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn topic(id: &str, parent: Option<&str>) -> TopicRecord {
        TopicRecord {
            topic_id: id.to_string(),
            parent_id: parent.map(|s| s.to_string()),
            name: id.to_string(),
        }
    }

    fn embedded_dist(emb: &TopicEmbedding, a: &str, b: &str) -> f64 {
        let (va, vb) = (emb.get(a).unwrap(), emb.get(b).unwrap());
        va.iter()
            .zip(vb)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn path_of_three_embeds_on_a_line() {
        let h = TopicHierarchy::from_records(&[
            topic("A", None),
            topic("B", Some("A")),
            topic("C", Some("B")),
        ])
        .unwrap();
        let emb = classical_mds(&h, 1, 42).unwrap();
        assert!((embedded_dist(&emb, "A", "B") - 1.0).abs() < 1e-6);
        assert!((embedded_dist(&emb, "B", "C") - 1.0).abs() < 1e-6);
        assert!((embedded_dist(&emb, "A", "C") - 2.0).abs() < 1e-6);
    }

    #[test]
    fn two_leaf_star_reproduces_hops_in_2d() {
        let h = TopicHierarchy::from_records(&[
            topic("root", None),
            topic("L1", Some("root")),
            topic("L2", Some("root")),
        ])
        .unwrap();
        let emb = classical_mds(&h, 2, 7).unwrap();
        assert!((embedded_dist(&emb, "root", "L1") - 1.0).abs() < 1e-6);
        assert!((embedded_dist(&emb, "root", "L2") - 1.0).abs() < 1e-6);
        assert!((embedded_dist(&emb, "L1", "L2") - 2.0).abs() < 1e-6);
    }

    #[test]
    fn paths_embed_exactly_at_full_dimension() {
        // Path hop metrics are line metrics, so classical MDS recovers
        // them exactly at d = n-1.
        for n in 2..=4usize {
            let mut records = vec![topic("t0", None)];
            for i in 1..n {
                records.push(topic(&format!("t{i}"), Some(&format!("t{}", i - 1))));
            }
            let h = TopicHierarchy::from_records(&records).unwrap();
            let emb = classical_mds(&h, n - 1, 3).unwrap();
            for i in 0..n {
                for j in (i + 1)..n {
                    let want = (j - i) as f64;
                    let got = embedded_dist(&emb, &format!("t{i}"), &format!("t{j}"));
                    assert!(
                        (got - want).abs() < 1e-6,
                        "path n={n}: d(t{i},t{j}) = {got}, want {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn three_leaf_star_is_not_euclidean_and_gets_best_strain() {
        // The 3-leaf star's hop metric cannot be realized in any
        // Euclidean space: leaves are pairwise 2 apart (equilateral,
        // circumradius 2/sqrt(3) > 1) yet the center should sit at
        // distance 1 from all three. Classical MDS therefore inflates
        // center-leaf distances to 2/sqrt(3) while keeping leaf-leaf
        // distances exact; the double-centered matrix has eigenvalues
        // {2, 2, 0, -1/4}.
        let h = TopicHierarchy::from_records(&[
            topic("c", None),
            topic("l1", Some("c")),
            topic("l2", Some("c")),
            topic("l3", Some("c")),
        ])
        .unwrap();
        let emb = classical_mds(&h, 3, 9).unwrap();
        let want_cl = 2.0 / 3.0f64.sqrt();
        for leaf in ["l1", "l2", "l3"] {
            assert!((embedded_dist(&emb, "c", leaf) - want_cl).abs() < 1e-6);
        }
        assert!((embedded_dist(&emb, "l1", "l2") - 2.0).abs() < 1e-6);
        assert!((embedded_dist(&emb, "l1", "l3") - 2.0).abs() < 1e-6);
        assert!((embedded_dist(&emb, "l2", "l3") - 2.0).abs() < 1e-6);
    }

    #[test]
    fn relabeling_preserves_pairwise_distances() {
        let records = [
            topic("a", None),
            topic("b", Some("a")),
            topic("c", Some("a")),
            topic("d", Some("b")),
            topic("e", Some("b")),
            topic("f", Some("c")),
        ];
        // Same tree, nodes listed in a different order under new names.
        let relabeled = [
            topic("w", Some("z")),
            topic("z", None),
            topic("y", Some("z")),
            topic("x", Some("w")),
            topic("v", Some("w")),
            topic("u", Some("y")),
        ];
        let h1 = TopicHierarchy::from_records(&records).unwrap();
        let h2 = TopicHierarchy::from_records(&relabeled).unwrap();
        let e1 = classical_mds(&h1, 5, 5).unwrap();
        let e2 = classical_mds(&h2, 5, 5).unwrap();
        // a=z, b=w, c=y, d=x, e=v, f=u.
        let map = [("a", "z"), ("b", "w"), ("c", "y"), ("d", "x"), ("e", "v"), ("f", "u")];
        for (i, (p1, q1)) in map.iter().enumerate() {
            for (p2, q2) in map.iter().skip(i + 1) {
                let d1 = embedded_dist(&e1, p1, p2);
                let d2 = embedded_dist(&e2, q1, q2);
                assert!((d1 - d2).abs() < 1e-6, "{p1}-{p2}: {d1} vs {d2}");
            }
        }
    }

    #[test]
    fn dimension_bounds_are_checked() {
        let h = TopicHierarchy::from_records(&[topic("a", None), topic("b", Some("a"))]).unwrap();
        assert!(matches!(
            classical_mds(&h, 2, 1),
            Err(GfError::DimensionOutOfRange { .. })
        ));
        assert!(matches!(
            classical_mds(&h, 0, 1),
            Err(GfError::DimensionOutOfRange { .. })
        ));
    }

    #[test]
    fn bad_hierarchies_are_rejected() {
        // Two roots.
        let two_roots = TopicHierarchy::from_records(&[topic("a", None), topic("b", None)]);
        assert!(matches!(two_roots, Err(GfError::InvalidHierarchy(_))));
        // Parent cycle, unreachable from the root.
        let cyclic = TopicHierarchy::from_records(&[
            topic("r", None),
            topic("a", Some("b")),
            topic("b", Some("a")),
        ]);
        assert!(matches!(cyclic, Err(GfError::InvalidHierarchy(_))));
        // Unknown parent.
        let dangling = TopicHierarchy::from_records(&[topic("a", None), topic("b", Some("zz"))]);
        assert!(matches!(dangling, Err(GfError::InvalidHierarchy(_))));
    }

    #[test]
    fn paper_vectors_average_topic_vectors() {
        use crate::corpus::{Corpus, PaperRecord};
        let mk = |id: &str, topics: Vec<&str>| PaperRecord {
            paper_id: id.into(),
            title: id.into(),
            year: 2010,
            venue: None,
            authors: vec!["x".into()],
            topic_ids: topics.into_iter().map(String::from).collect(),
            abstract_text: None,
            external_citations: None,
        };
        let corpus = Corpus::from_records(
            vec![
                mk("P", vec!["t1", "t2"]),
                mk("Q", vec![]),
                mk("R", vec!["t1"]),
                mk("S", vec!["t1", "ghost"]),
            ],
            vec![],
            vec![],
            vec![],
            true,
        )
        .unwrap();
        let emb = TopicEmbedding {
            dimension: 2,
            vectors: HashMap::from([
                ("t1".to_string(), vec![1.0, 0.0]),
                ("t2".to_string(), vec![0.0, 1.0]),
            ]),
        };
        let (v, skipped) = paper_topic_vector(&corpus, &emb, "P").unwrap();
        assert_eq!(v, vec![0.5, 0.5]);
        assert_eq!(skipped, 0);

        let (v, _) = paper_topic_vector(&corpus, &emb, "Q").unwrap();
        assert_eq!(v, vec![0.0, 0.0]);

        let (v, _) = paper_topic_vector(&corpus, &emb, "R").unwrap();
        assert_eq!(v, vec![1.0, 0.0]);

        let (v, skipped) = paper_topic_vector(&corpus, &emb, "S").unwrap();
        assert_eq!(v, vec![1.0, 0.0]);
        assert_eq!(skipped, 1);

        assert!(paper_topic_vector(&corpus, &emb, "missing").is_err());
    }

    #[test]
    fn embedding_save_load_round_trip() {
        let h = TopicHierarchy::from_records(&[
            topic("A", None),
            topic("B", Some("A")),
            topic("C", Some("B")),
        ])
        .unwrap();
        let emb = classical_mds(&h, 2, 42).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("topic_embedding.jsonl");
        emb.save(&path).unwrap();
        let back = TopicEmbedding::load(&path).unwrap();
        assert_eq!(back.dimension, 2);
        for id in ["A", "B", "C"] {
            assert_eq!(emb.get(id).unwrap(), back.get(id).unwrap());
        }
    }
}
