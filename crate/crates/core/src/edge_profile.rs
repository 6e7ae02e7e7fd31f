//! Edge profiling: is a self-citation an extend-type link?
//!
//! Every citation link gets a 20-feature vector (paper metadata,
//! citation-network overlap, citation time-series correlation, and
//! in-text content signals when citation contexts are available) and an
//! extremely-randomized-trees classifier turns it into an extend-type
//! probability. Tree growth is fully derandomized by seeding every node
//! from (model seed, tree index, node counter), so retraining with the
//! same inputs is bit-identical.

use std::collections::HashMap;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{GfError, Result};
use crate::metrics::{run_cv, CvConfig, CvReport, SplitScores};
use crate::rng;

pub const N_FEATURES: usize = 20;

/// Feature layout. Indexes 9..20 are the content group, masked out when
/// the corpus carries no citation context for the link.
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "citations_cited",
    "year_diff",
    "shared_authors",
    "cocite_count",
    "cocite_jaccard",
    "bibcoupling_count",
    "xcorr_lag0",
    "xcorr_lag_yd",
    "xcorr_max",
    "content_similarity",
    "cite_occurrences",
    "occ_intro",
    "occ_method",
    "occ_eval",
    "pos_paper",
    "pos_section",
    "pos_subsection",
    "pos_sentence",
    "lex_extension",
    "lex_ourprevious",
];

pub const CONTENT_FEATURES: std::ops::Range<usize> = 9..20;

/// Which features are available. Masked-out entries carry 0.0 as the
/// imputation sentinel and are never offered to the trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMask(pub [bool; N_FEATURES]);

impl FeatureMask {
    pub fn full() -> FeatureMask {
        FeatureMask([true; N_FEATURES])
    }

    /// Mask for corpora without citation contexts.
    pub fn no_content() -> FeatureMask {
        let mut m = [true; N_FEATURES];
        for i in CONTENT_FEATURES {
            m[i] = false;
        }
        FeatureMask(m)
    }

    pub fn available(&self) -> Vec<usize> {
        (0..N_FEATURES).filter(|&i| self.0[i]).collect()
    }

    /// Does a model trained with `self` accept a vector carrying `other`?
    pub fn accepts(&self, other: &FeatureMask) -> bool {
        (0..N_FEATURES).all(|i| !self.0[i] || other.0[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeFeatureVector {
    pub values: [f64; N_FEATURES],
    pub mask: FeatureMask,
}

impl EdgeFeatureVector {
    /// Copy with a narrower mask; newly masked entries reset to the
    /// sentinel. Used for content-ablation experiments.
    pub fn with_mask(&self, mask: FeatureMask) -> EdgeFeatureVector {
        let mut values = self.values;
        for i in 0..N_FEATURES {
            if !mask.0[i] {
                values[i] = 0.0;
            }
        }
        EdgeFeatureVector { values, mask }
    }
}

/// Corpus-wide token statistics for tf-idf similarity over title +
/// abstract. Tokens are lowercased alphanumeric runs of length >= 2.
pub struct TextIndex {
    n_docs: usize,
    doc_freq: HashMap<String, u32>,
    term_counts: Vec<HashMap<String, u32>>,
}

fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.len() >= 2)
        .map(str::to_string)
        .collect()
}

impl TextIndex {
    pub fn build(corpus: &Corpus) -> TextIndex {
        let mut doc_freq: HashMap<String, u32> = HashMap::new();
        let mut term_counts = Vec::with_capacity(corpus.n_papers());
        for p in corpus.papers() {
            let mut text = p.title.clone();
            if let Some(a) = &p.abstract_text {
                text.push(' ');
                text.push_str(a);
            }
            let mut counts: HashMap<String, u32> = HashMap::new();
            for token in tokenize(&text) {
                *counts.entry(token).or_insert(0) += 1;
            }
            for term in counts.keys() {
                *doc_freq.entry(term.clone()).or_insert(0) += 1;
            }
            term_counts.push(counts);
        }
        TextIndex {
            n_docs: corpus.n_papers(),
            doc_freq,
            term_counts,
        }
    }

    fn idf(&self, term: &str) -> f64 {
        let df = self.doc_freq.get(term).copied().unwrap_or(0) as f64;
        ((1.0 + self.n_docs as f64) / (1.0 + df)).ln() + 1.0
    }

    /// Cosine similarity of tf-idf vectors; 0 when either side is empty.
    pub fn tfidf_cosine(&self, a: usize, b: usize) -> f64 {
        let (ca, cb) = (&self.term_counts[a], &self.term_counts[b]);
        if ca.is_empty() || cb.is_empty() {
            return 0.0;
        }
        let mut dot = 0.0f64;
        for (term, &tf_a) in ca {
            if let Some(&tf_b) = cb.get(term) {
                let idf = self.idf(term);
                dot += (tf_a as f64 * idf) * (tf_b as f64 * idf);
            }
        }
        if dot == 0.0 {
            return 0.0;
        }
        let norm = |counts: &HashMap<String, u32>| {
            counts
                .iter()
                .map(|(t, &tf)| {
                    let w = tf as f64 * self.idf(t);
                    w * w
                })
                .sum::<f64>()
                .sqrt()
        };
        (dot / (norm(ca) * norm(cb))).clamp(0.0, 1.0)
    }
}

/// Pearson correlation; 0 when either side has zero variance or the
/// series are shorter than 2.
fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(xs), mean(ys));
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    (cov / (vx.sqrt() * vy.sqrt())).clamp(-1.0, 1.0)
}

/// Correlation of x[t] against y[t + lag] over the overlap of the two
/// equally long, zero-padded series.
fn xcorr_at_lag(x: &[f64], y: &[f64], lag: i64) -> f64 {
    let n = x.len() as i64;
    let t0 = 0.max(-lag);
    let t1 = n.min(n - lag);
    if t1 <= t0 {
        return 0.0;
    }
    let (a, b) = (t0 as usize, t1 as usize);
    let (c, d) = ((t0 + lag) as usize, (t1 + lag) as usize);
    pearson(&x[a..b], &y[c..d])
}

/// Yearly citation counts of both papers zero-padded onto their common
/// year span. Empty when neither paper has citations.
fn padded_series(corpus: &Corpus, a: usize, b: usize) -> (Vec<f64>, Vec<f64>) {
    let sa = corpus.citation_time_series_idx(a);
    let sb = corpus.citation_time_series_idx(b);
    let years: Vec<i32> = sa.keys().chain(sb.keys()).copied().collect();
    let (Some(&first), Some(&last)) = (years.iter().min(), years.iter().max()) else {
        return (vec![], vec![]);
    };
    let span = (last - first + 1) as usize;
    let fill = |s: &std::collections::BTreeMap<i32, u32>| {
        let mut v = vec![0.0f64; span];
        for (&year, &count) in s {
            v[(year - first) as usize] = count as f64;
        }
        v
    };
    (fill(&sa), fill(&sb))
}

const XCORR_MAX_LAG: i64 = 3;

fn section_matches(name: &str, prefixes: &[&str]) -> bool {
    let trimmed = name.trim_start_matches(|c: char| !c.is_alphabetic());
    let lower = trimmed.to_lowercase();
    prefixes.iter().any(|p| lower.starts_with(p))
}

const EXTENSION_CUES: [&str; 3] = ["extension", "extends", "extend"];
const PRIOR_WORK_CUES: [&str; 3] = ["our previous", "we previously", "earlier work"];

/// Extract the 20 features for one citation link (citing -> cited).
///
/// Citer sets for the overlap features exclude the two endpoint papers
/// themselves: the citing paper is by definition a citer of the cited
/// one, and counting it would shift every pair by a constant.
pub fn extract_features(
    corpus: &Corpus,
    text: &TextIndex,
    citing: &str,
    cited: &str,
) -> Result<EdgeFeatureVector> {
    let citing_idx = corpus.paper_idx(citing)?;
    let cited_idx = corpus.paper_idx(cited)?;
    if !corpus.has_citation(citing_idx, cited_idx) {
        return Err(GfError::DanglingCitation {
            citing: citing.to_string(),
            cited: cited.to_string(),
        });
    }
    let mut values = [0.0f64; N_FEATURES];
    let mut mask = FeatureMask::no_content();

    values[0] = corpus.citation_count(cited_idx) as f64;
    values[1] = (corpus.paper_by_idx(citing_idx).year - corpus.paper_by_idx(cited_idx).year) as f64;
    values[2] = corpus.shared_author_count_idx(citing_idx, cited_idx) as f64;

    let strip = |of: usize, other: usize| -> Vec<usize> {
        corpus
            .citers_of(of)
            .iter()
            .copied()
            .filter(|&c| c != other)
            .collect()
    };
    let citers_cited = strip(cited_idx, citing_idx);
    let citers_citing = strip(citing_idx, cited_idx);
    let cocite = citers_cited
        .iter()
        .filter(|c| citers_citing.binary_search(c).is_ok())
        .count();
    let union = citers_cited.len() + citers_citing.len() - cocite;
    values[3] = cocite as f64;
    values[4] = if union > 0 { cocite as f64 / union as f64 } else { 0.0 };
    let shared_refs = corpus
        .refs_of(citing_idx)
        .iter()
        .filter(|&&r| r != cited_idx && r != citing_idx)
        .filter(|r| corpus.refs_of(cited_idx).binary_search(r).is_ok())
        .count();
    values[5] = shared_refs as f64;

    let (series_cited, series_citing) = padded_series(corpus, cited_idx, citing_idx);
    if !series_cited.is_empty() {
        values[6] = xcorr_at_lag(&series_cited, &series_citing, 0);
        values[7] = xcorr_at_lag(&series_cited, &series_citing, values[1] as i64);
        values[8] = (-XCORR_MAX_LAG..=XCORR_MAX_LAG)
            .map(|lag| xcorr_at_lag(&series_cited, &series_citing, lag))
            .fold(f64::NEG_INFINITY, f64::max);
    }

    if let Some(ctx) = corpus.context_for(citing_idx, cited_idx) {
        mask = FeatureMask::full();
        values[9] = text.tfidf_cosine(citing_idx, cited_idx);
        let occs = &ctx.occurrences;
        values[10] = occs.len() as f64;
        values[11] = occs
            .iter()
            .filter(|o| section_matches(&o.section_name, &["intro"]))
            .count() as f64;
        values[12] = occs
            .iter()
            .filter(|o| section_matches(&o.section_name, &["method", "approach"]))
            .count() as f64;
        values[13] = occs
            .iter()
            .filter(|o| section_matches(&o.section_name, &["experiment", "evaluation", "result"]))
            .count() as f64;
        let mean_of = |f: fn(&crate::corpus::CiteOccurrence) -> f64| {
            occs.iter().map(f).sum::<f64>() / occs.len() as f64
        };
        values[14] = mean_of(|o| o.rel_pos_paper);
        values[15] = mean_of(|o| o.rel_pos_section);
        values[16] = mean_of(|o| o.rel_pos_subsection);
        values[17] = mean_of(|o| o.rel_pos_sentence);
        let any_cue = |cues: &[&str]| {
            occs.iter().any(|o| {
                let s = o.sentence_text.to_lowercase();
                cues.iter().any(|c| s.contains(c))
            })
        };
        values[18] = any_cue(&EXTENSION_CUES) as u8 as f64;
        values[19] = any_cue(&PRIOR_WORK_CUES) as u8 as f64;
    }

    Ok(EdgeFeatureVector { values, mask })
}

/// Extra-trees hyperparameters. `k_features` defaults to ceil(sqrt(20))
/// and `min_leaf` is the minimum node size eligible for splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendConfig {
    pub n_trees: usize,
    pub k_features: usize,
    pub min_leaf: usize,
    pub seed: u64,
}

impl Default for ExtendConfig {
    fn default() -> Self {
        ExtendConfig {
            n_trees: 500,
            k_features: (N_FEATURES as f64).sqrt().ceil() as usize,
            min_leaf: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum TreeNode {
    Leaf {
        pos_weight: f64,
        neg_weight: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        /// Samples with value <= threshold go left.
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Tree {
    nodes: Vec<TreeNode>,
}

impl Tree {
    fn leaf_fraction(&self, values: &[f64; N_FEATURES]) -> f64 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { pos_weight, neg_weight } => {
                    return pos_weight / (pos_weight + neg_weight);
                }
                TreeNode::Split { feature, threshold, left, right } => {
                    at = if values[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Trained extend-type classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendModel {
    pub format_version: u32,
    pub config: ExtendConfig,
    pub mask: FeatureMask,
    pub class_weights: (f64, f64),
    trees: Vec<Tree>,
}

struct TreeBuilder<'a> {
    data: &'a [(&'a EdgeFeatureVector, bool)],
    available: &'a [usize],
    weights: (f64, f64),
    k_features: usize,
    min_leaf: usize,
    tree_seed: u64,
    nodes: Vec<TreeNode>,
    node_counter: u64,
}

impl TreeBuilder<'_> {
    fn weighted_counts(&self, samples: &[usize]) -> (f64, f64) {
        let mut pos = 0.0;
        let mut neg = 0.0;
        for &s in samples {
            if self.data[s].1 {
                pos += self.weights.0;
            } else {
                neg += self.weights.1;
            }
        }
        (pos, neg)
    }

    /// Weighted Gini impurity mass: total weight * (1 - p^2 - q^2).
    fn impurity_mass(pos: f64, neg: f64) -> f64 {
        let total = pos + neg;
        if total == 0.0 {
            return 0.0;
        }
        let (p, q) = (pos / total, neg / total);
        total * (1.0 - p * p - q * q)
    }

    fn grow(&mut self, samples: Vec<usize>) -> usize {
        let node_id = self.node_counter;
        self.node_counter += 1;
        let mut node_rng = ChaCha8Rng::seed_from_u64(rng::mix(self.tree_seed, node_id));

        let (pos, neg) = self.weighted_counts(&samples);
        let make_leaf = |nodes: &mut Vec<TreeNode>| {
            nodes.push(TreeNode::Leaf { pos_weight: pos, neg_weight: neg });
            nodes.len() - 1
        };
        if pos == 0.0 || neg == 0.0 || samples.len() < self.min_leaf {
            return make_leaf(&mut self.nodes);
        }

        // Draw k candidate features uniformly without replacement, one
        // uniform threshold each inside the node's observed range.
        let mut pool: Vec<usize> = self.available.to_vec();
        let k = self.k_features.min(pool.len());
        for i in 0..k {
            let j = node_rng.gen_range(i..pool.len());
            pool.swap(i, j);
        }
        let mut best: Option<(f64, usize, f64)> = None; // (reduction, feature, threshold)
        let parent_mass = Self::impurity_mass(pos, neg);
        for &feature in &pool[..k] {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &s in &samples {
                let v = self.data[s].0.values[feature];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if !(hi > lo) {
                continue; // constant in this node
            }
            let threshold = node_rng.gen_range(lo..hi);
            let mut left = (0.0f64, 0.0f64);
            let mut right = (0.0f64, 0.0f64);
            for &s in &samples {
                let w = if self.data[s].1 {
                    (self.weights.0, 0.0)
                } else {
                    (0.0, self.weights.1)
                };
                if self.data[s].0.values[feature] <= threshold {
                    left = (left.0 + w.0, left.1 + w.1);
                } else {
                    right = (right.0 + w.0, right.1 + w.1);
                }
            }
            let reduction = parent_mass
                - Self::impurity_mass(left.0, left.1)
                - Self::impurity_mass(right.0, right.1);
            let better = match best {
                None => true,
                Some((r, _, _)) => reduction > r,
            };
            if better {
                best = Some((reduction, feature, threshold));
            }
        }
        let Some((_, feature, threshold)) = best else {
            return make_leaf(&mut self.nodes);
        };

        let (left_samples, right_samples): (Vec<usize>, Vec<usize>) = samples
            .into_iter()
            .partition(|&s| self.data[s].0.values[feature] <= threshold);
        // Threshold lies in [lo, hi) of an observed spread, so both
        // children are nonempty.
        let placeholder = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { pos_weight: 0.0, neg_weight: 0.0 });
        let left = self.grow(left_samples);
        let right = self.grow(right_samples);
        self.nodes[placeholder] = TreeNode::Split { feature, threshold, left, right };
        placeholder
    }
}

/// Train the forest. Every tree sees the full sample; all randomness is
/// derived from (seed, tree index, node counter), so training is
/// reproducible bit for bit at any thread count.
pub fn train_extend_classifier(
    data: &[(EdgeFeatureVector, bool)],
    config: &ExtendConfig,
) -> Result<ExtendModel> {
    if data.is_empty() {
        return Err(GfError::EmptyTrainingData);
    }
    if config.n_trees == 0 || config.k_features == 0 || config.min_leaf == 0 {
        return Err(GfError::InvalidArgument(
            "tree count, candidate features, and min leaf must be positive".into(),
        ));
    }
    let mask = data[0].0.mask;
    if data.iter().any(|(fv, _)| fv.mask != mask) {
        return Err(GfError::MaskMismatch(
            "training vectors must share one availability mask".into(),
        ));
    }
    let n_pos = data.iter().filter(|(_, l)| *l).count();
    if n_pos == 0 || n_pos == data.len() {
        return Err(GfError::SingleClass);
    }
    let n = data.len() as f64;
    let class_weights = (n / (2.0 * n_pos as f64), n / (2.0 * (data.len() - n_pos) as f64));
    let available = mask.available();
    let borrowed: Vec<(&EdgeFeatureVector, bool)> =
        data.iter().map(|(fv, l)| (fv, *l)).collect();

    let trees: Vec<Tree> = (0..config.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut builder = TreeBuilder {
                data: &borrowed,
                available: &available,
                weights: class_weights,
                k_features: config.k_features,
                min_leaf: config.min_leaf,
                tree_seed: rng::derive_seed_indexed(config.seed, "extend-tree", t as u64),
                nodes: Vec::new(),
                node_counter: 0,
            };
            let all: Vec<usize> = (0..borrowed.len()).collect();
            builder.grow(all);
            Tree { nodes: builder.nodes }
        })
        .collect();

    Ok(ExtendModel {
        format_version: MODEL_FORMAT_VERSION,
        config: *config,
        mask,
        class_weights,
        trees,
    })
}

/// Mean over trees of the leaf's weighted positive fraction.
pub fn predict_extend_prob(model: &ExtendModel, fv: &EdgeFeatureVector) -> Result<f64> {
    if !model.mask.accepts(&fv.mask) {
        let missing = (0..N_FEATURES)
            .find(|&i| model.mask.0[i] && !fv.mask.0[i])
            .map(|i| FEATURE_NAMES[i])
            .unwrap_or("?");
        return Err(GfError::MaskMismatch(missing.to_string()));
    }
    let sum: f64 = model
        .trees
        .iter()
        .map(|t| t.leaf_fraction(&fv.values))
        .sum();
    Ok(sum / model.trees.len() as f64)
}

impl ExtendModel {
    pub fn save_json(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| GfError::io(path, e))?;
        serde_json::to_writer(std::io::BufWriter::new(file), self)
            .map_err(|e| GfError::InvalidRecord(format!("model serialization: {e}")))
    }

    pub fn load_json(path: &Path) -> Result<ExtendModel> {
        let file = std::fs::File::open(path).map_err(|e| GfError::io(path, e))?;
        let model: ExtendModel = serde_json::from_reader(std::io::BufReader::new(file))
            .map_err(|e| GfError::Malformed {
                path: path.display().to_string(),
                line: 0,
                message: e.to_string(),
            })?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(GfError::InvalidRecord(format!(
                "unsupported model format version {}",
                model.format_version
            )));
        }
        Ok(model)
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }
}

/// Stratified repeated cross-validation of the extend classifier.
pub fn cross_validate_classifier(
    data: &[(EdgeFeatureVector, bool)],
    config: &ExtendConfig,
    cv: &CvConfig,
    seed: u64,
) -> Result<CvReport> {
    let labels: Vec<bool> = data.iter().map(|(_, l)| *l).collect();
    run_cv(&labels, cv, seed, |train_idx, test_idx, split_seed| {
        let train: Vec<(EdgeFeatureVector, bool)> =
            train_idx.iter().map(|&i| data[i].clone()).collect();
        let cfg = ExtendConfig { seed: split_seed, ..*config };
        let model = train_extend_classifier(&train, &cfg)?;
        let score = |idx: &[usize]| -> Result<Vec<f64>> {
            idx.iter()
                .map(|&i| predict_extend_prob(&model, &data[i].0))
                .collect()
        };
        Ok(SplitScores {
            train_scores: score(train_idx)?,
            test_scores: score(test_idx)?,
        })
    })
}

/// Fill `p_extend` on every edge of a profile using a trained model.
pub fn score_profile_edges(
    corpus: &Corpus,
    text: &TextIndex,
    model: &ExtendModel,
    profile: &mut crate::gfgraph::GFProfile,
) -> Result<()> {
    for edge in profile.edges.iter_mut() {
        let fv = extract_features(corpus, text, &edge.dst, &edge.src)?;
        edge.p_extend = Some(predict_extend_prob(model, &fv)?);
    }
    Ok(())
}

/// All self-citation links of the corpus (citing, cited, shared-author
/// scholar exists), paired with context availability. Used to assemble
/// training sets from label files.
pub fn feature_vectors_for_labels(
    corpus: &Corpus,
    text: &TextIndex,
    labels: &[crate::corpus::ExtendLabel],
) -> Result<Vec<(EdgeFeatureVector, bool)>> {
    labels
        .iter()
        .map(|l| {
            let fv = extract_features(corpus, text, &l.citing_id, &l.cited_id)?;
            Ok((fv, l.label != 0))
        })
        .collect()
}
