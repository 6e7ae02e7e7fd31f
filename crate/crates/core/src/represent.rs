//! Graph representation learning over scholar profiles.
//!
//! Profiles (and the baseline bibliometric networks) become attributed
//! graphs; a small message-passing network with mean neighbor
//! aggregation and a mean readout scores each graph with an award
//! probability. Forward, backward, and Adam are written out by hand so
//! the whole pipeline stays deterministic and auditable; a finite-
//! difference gradient check guards the backward pass.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{BiblioNetwork, NetworkKind};
use crate::error::{GfError, Result};
use crate::gfgraph::{AttributeMask, GFNode, GFProfile};
use crate::rng;
use rand::Rng;

/// Dense node-attributed undirected graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributedGraph {
    pub n_features: usize,
    /// Row i holds the feature vector of node i.
    pub features: Vec<Vec<f64>>,
    /// Sorted neighbor lists; symmetric by construction.
    pub adjacency: Vec<Vec<usize>>,
}

impl AttributedGraph {
    pub fn n_nodes(&self) -> usize {
        self.features.len()
    }

    pub fn from_edges(features: Vec<Vec<f64>>, n_features: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![Vec::new(); features.len()];
        for &(a, b) in edges {
            if a != b {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        AttributedGraph { n_features, features, adjacency }
    }

    /// Reorder nodes by `perm` (new index -> old index). Test helper for
    /// the permutation-invariance contract.
    pub fn permuted(&self, perm: &[usize]) -> AttributedGraph {
        let mut inverse = vec![0usize; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let features = perm.iter().map(|&old| self.features[old].clone()).collect();
        let mut adjacency: Vec<Vec<usize>> = perm
            .iter()
            .map(|&old| self.adjacency[old].iter().map(|&n| inverse[n]).collect())
            .collect();
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        AttributedGraph { n_features: self.n_features, features, adjacency }
    }
}

/// Paper-node encoding shared by profiles and the paper-based baseline
/// networks: [log(1 + citations), year scaled to the node span,
/// 1 / author_order, topic vector]. Masked attributes encode as zero.
fn encode_paper_nodes(nodes: &[GFNode], mask: &AttributeMask, topic_dim: usize) -> Vec<Vec<f64>> {
    let min_year = nodes.iter().map(|n| n.year).min().unwrap_or(0);
    let max_year = nodes.iter().map(|n| n.year).max().unwrap_or(0);
    let span = ((max_year - min_year) as f64).max(1.0);
    nodes
        .iter()
        .map(|n| {
            let mut row = Vec::with_capacity(3 + topic_dim);
            row.push(if mask.citations {
                (1.0 + n.citation_count as f64).ln()
            } else {
                0.0
            });
            row.push(if mask.date {
                (n.year - min_year) as f64 / span
            } else {
                0.0
            });
            row.push(if mask.order { 1.0 / n.author_order as f64 } else { 0.0 });
            for d in 0..topic_dim {
                row.push(if mask.topic {
                    n.topic_vector.get(d).copied().unwrap_or(0.0)
                } else {
                    0.0
                });
            }
            row
        })
        .collect()
}

/// Encode a profile for the network. `topic_dim` pads or truncates every
/// topic vector to one width so mixed corpora cannot disagree.
pub fn encode_profile(profile: &GFProfile, topic_dim: usize) -> AttributedGraph {
    let features = encode_paper_nodes(&profile.nodes, &profile.attribute_selection, topic_dim);
    let index: std::collections::HashMap<&str, usize> = profile
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.paper_id.as_str(), i))
        .collect();
    let edges: Vec<(usize, usize)> = profile
        .edges
        .iter()
        .map(|e| (index[e.src.as_str()], index[e.dst.as_str()]))
        .collect();
    AttributedGraph::from_edges(features, 3 + topic_dim, &edges)
}

/// Encode a baseline network. Paper-node networks reuse the profile
/// encoding; the co-authorship network encodes each author as
/// [log(1 + papers), log(1 + citations)].
pub fn encode_bibliometric(network: &BiblioNetwork, topic_dim: usize) -> AttributedGraph {
    let edges: Vec<(usize, usize)> = network.edges.iter().map(|e| (e.a, e.b)).collect();
    match network.kind {
        NetworkKind::CoCitation | NetworkKind::BibCoupling => {
            let features =
                encode_paper_nodes(&network.paper_nodes, &AttributeMask::default(), topic_dim);
            AttributedGraph::from_edges(features, 3 + topic_dim, &edges)
        }
        NetworkKind::CoAuthorship => {
            let features = network
                .author_nodes
                .iter()
                .map(|a| {
                    vec![
                        (1.0 + a.n_papers as f64).ln(),
                        (1.0 + a.n_citations as f64).ln(),
                    ]
                })
                .collect();
            AttributedGraph::from_edges(features, 2, &edges)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnnConfig {
    pub hidden: usize,
    pub layers: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for GnnConfig {
    fn default() -> Self {
        GnnConfig {
            hidden: 32,
            layers: 2,
            learning_rate: 0.01,
            epochs: 200,
            seed: 0,
        }
    }
}

/// Flat parameter layout: for each message-passing layer, W_self
/// (out x in, row-major), W_nbr (out x in), bias (out); then the head's
/// hidden weights (h x h) and bias (h), and the scalar output weight (h)
/// and bias (1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnnModel {
    pub config: GnnConfig,
    pub n_features: usize,
    pub params: Vec<f64>,
    pub loss_curve: Vec<f64>,
}

fn param_count(n_features: usize, hidden: usize, layers: usize) -> usize {
    let mut total = 0;
    let mut dim_in = n_features;
    for _ in 0..layers {
        total += 2 * hidden * dim_in + hidden;
        dim_in = hidden;
    }
    total + hidden * hidden + hidden + hidden + 1
}

/// Borrowed views of each parameter block inside the flat vector.
struct Blocks<'a> {
    w_self: Vec<&'a [f64]>,
    w_nbr: Vec<&'a [f64]>,
    bias: Vec<&'a [f64]>,
    w_head: &'a [f64],
    b_head: &'a [f64],
    w_out: &'a [f64],
    b_out: f64,
}

fn split_blocks<'a>(params: &'a [f64], n_features: usize, cfg: &GnnConfig) -> Blocks<'a> {
    let h = cfg.hidden;
    let mut at = 0;
    let mut take = |len: usize| {
        let s = &params[at..at + len];
        at += len;
        s
    };
    let mut w_self = Vec::with_capacity(cfg.layers);
    let mut w_nbr = Vec::with_capacity(cfg.layers);
    let mut bias = Vec::with_capacity(cfg.layers);
    let mut dim_in = n_features;
    for _ in 0..cfg.layers {
        w_self.push(take(h * dim_in));
        w_nbr.push(take(h * dim_in));
        bias.push(take(h));
        dim_in = h;
    }
    let w_head = take(h * h);
    let b_head = take(h);
    let w_out = take(h);
    let b_out = take(1)[0];
    Blocks { w_self, w_nbr, bias, w_head, b_head, w_out, b_out }
}

fn matvec(w: &[f64], rows: usize, cols: usize, x: &[f64], out: &mut [f64]) {
    for r in 0..rows {
        let mut acc = 0.0;
        let row = &w[r * cols..(r + 1) * cols];
        for c in 0..cols {
            acc += row[c] * x[c];
        }
        out[r] += acc;
    }
}

/// out[j] += w^T y, with w of shape rows x cols.
fn matvec_transposed(w: &[f64], rows: usize, cols: usize, y: &[f64], out: &mut [f64]) {
    for r in 0..rows {
        let row = &w[r * cols..(r + 1) * cols];
        for c in 0..cols {
            out[c] += row[c] * y[r];
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Per-graph forward pass cache: layer activations and neighbor means,
/// kept for the backward pass.
struct ForwardPass {
    activations: Vec<Vec<Vec<f64>>>,
    nbr_means: Vec<Vec<Vec<f64>>>,
    readout: Vec<f64>,
    head_act: Vec<f64>,
    logit: f64,
}

fn neighbor_mean(rows: &[Vec<f64>], neighbors: &[usize], dim: usize) -> Vec<f64> {
    let mut mean = vec![0.0; dim];
    if neighbors.is_empty() {
        return mean; // isolated node: zero neighbor term
    }
    for &j in neighbors {
        for (m, v) in mean.iter_mut().zip(&rows[j]) {
            *m += v;
        }
    }
    let inv = 1.0 / neighbors.len() as f64;
    for m in mean.iter_mut() {
        *m *= inv;
    }
    mean
}

fn forward(graph: &AttributedGraph, blocks: &Blocks, cfg: &GnnConfig) -> ForwardPass {
    let h = cfg.hidden;
    let n = graph.n_nodes();
    let mut activations: Vec<Vec<Vec<f64>>> = vec![graph.features.clone()];
    let mut nbr_means: Vec<Vec<Vec<f64>>> = Vec::with_capacity(cfg.layers);
    let mut dim_in = graph.n_features;
    for l in 0..cfg.layers {
        let prev = &activations[l];
        let means: Vec<Vec<f64>> = (0..n)
            .map(|i| neighbor_mean(prev, &graph.adjacency[i], dim_in))
            .collect();
        let next: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut pre = blocks.bias[l].to_vec();
                matvec(blocks.w_self[l], h, dim_in, &prev[i], &mut pre);
                matvec(blocks.w_nbr[l], h, dim_in, &means[i], &mut pre);
                pre.iter().map(|v| v.tanh()).collect()
            })
            .collect();
        nbr_means.push(means);
        activations.push(next);
        dim_in = h;
    }
    let last = &activations[cfg.layers];
    let mut readout = vec![0.0; h];
    for row in last {
        for (r, v) in readout.iter_mut().zip(row) {
            *r += v;
        }
    }
    let inv = 1.0 / n as f64;
    for r in readout.iter_mut() {
        *r *= inv;
    }
    let mut head_pre = blocks.b_head.to_vec();
    matvec(blocks.w_head, h, h, &readout, &mut head_pre);
    let head_act: Vec<f64> = head_pre.iter().map(|v| v.tanh()).collect();
    let logit = blocks.b_out
        + blocks
            .w_out
            .iter()
            .zip(&head_act)
            .map(|(w, a)| w * a)
            .sum::<f64>();
    ForwardPass { activations, nbr_means, readout, head_act, logit }
}

/// Gradient of the (unweighted) loss of one graph with respect to every
/// parameter, scaled by `dlogit` = d loss / d logit.
fn backward(
    graph: &AttributedGraph,
    blocks: &Blocks,
    cfg: &GnnConfig,
    pass: &ForwardPass,
    dlogit: f64,
    grad: &mut [f64],
) {
    let h = cfg.hidden;
    let n = graph.n_nodes();
    // Mirror the block layout over the gradient buffer.
    let mut offsets = Vec::with_capacity(cfg.layers);
    let mut at = 0;
    let mut dim_in = graph.n_features;
    for _ in 0..cfg.layers {
        offsets.push((at, at + h * dim_in, at + 2 * h * dim_in, dim_in));
        at += 2 * h * dim_in + h;
        dim_in = h;
    }
    let head_w_at = at;
    let head_b_at = at + h * h;
    let out_w_at = head_b_at + h;
    let out_b_at = out_w_at + h;

    // Head: logit = w_out . tanh(W_head z + b_head) + b_out.
    grad[out_b_at] += dlogit;
    let mut d_head = vec![0.0; h];
    for i in 0..h {
        grad[out_w_at + i] += dlogit * pass.head_act[i];
        d_head[i] = dlogit * blocks.w_out[i] * (1.0 - pass.head_act[i] * pass.head_act[i]);
    }
    let mut d_readout = vec![0.0; h];
    for r in 0..h {
        grad[head_b_at + r] += d_head[r];
        for c in 0..h {
            grad[head_w_at + r * h + c] += d_head[r] * pass.readout[c];
        }
    }
    matvec_transposed(blocks.w_head, h, h, &d_head, &mut d_readout);

    // Mean readout spreads the gradient evenly over nodes.
    let inv_n = 1.0 / n as f64;
    let mut d_act: Vec<Vec<f64>> = vec![d_readout.iter().map(|v| v * inv_n).collect(); n];

    for l in (0..cfg.layers).rev() {
        let (self_at, nbr_at, bias_at, dim) = offsets[l];
        let prev = &pass.activations[l];
        let means = &pass.nbr_means[l];
        let act = &pass.activations[l + 1];
        let mut d_pre: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            d_pre.push(
                d_act[i]
                    .iter()
                    .zip(&act[i])
                    .map(|(d, a)| d * (1.0 - a * a))
                    .collect(),
            );
        }
        let mut d_prev: Vec<Vec<f64>> = vec![vec![0.0; dim]; n];
        for i in 0..n {
            for r in 0..h {
                let dp = d_pre[i][r];
                if dp == 0.0 {
                    continue;
                }
                grad[bias_at + r] += dp;
                let self_row = self_at + r * dim;
                let nbr_row = nbr_at + r * dim;
                for c in 0..dim {
                    grad[self_row + c] += dp * prev[i][c];
                    grad[nbr_row + c] += dp * means[i][c];
                }
            }
            matvec_transposed(blocks.w_self[l], h, dim, &d_pre[i], &mut d_prev[i]);
            // The neighbor mean of node i pulls on every neighbor j with
            // weight 1/deg(i); adjacency is symmetric so push directly.
            let deg = graph.adjacency[i].len();
            if deg > 0 {
                let mut d_mean = vec![0.0; dim];
                matvec_transposed(blocks.w_nbr[l], h, dim, &d_pre[i], &mut d_mean);
                let inv_deg = 1.0 / deg as f64;
                for &j in &graph.adjacency[i] {
                    for c in 0..dim {
                        d_prev[j][c] += d_mean[c] * inv_deg;
                    }
                }
            }
        }
        d_act = d_prev;
    }
}

/// Numerically stable weighted binary cross entropy from the logit.
fn bce_from_logit(logit: f64, y: f64) -> f64 {
    logit.max(0.0) - logit * y + (-logit.abs()).exp().ln_1p()
}

fn class_weights(labels: &[bool]) -> Result<(f64, f64)> {
    let n_pos = labels.iter().filter(|&&l| l).count();
    if n_pos == 0 || n_pos == labels.len() {
        return Err(GfError::SingleClass);
    }
    let n = labels.len() as f64;
    Ok((
        n / (2.0 * n_pos as f64),
        n / (2.0 * (labels.len() - n_pos) as f64),
    ))
}

/// Weighted loss and full gradient over a set of graphs. Per-graph
/// gradients are computed in parallel and reduced in index order so the
/// result does not depend on thread scheduling.
fn loss_and_grad(
    graphs: &[AttributedGraph],
    labels: &[bool],
    weights: (f64, f64),
    params: &[f64],
    n_features: usize,
    cfg: &GnnConfig,
) -> (f64, Vec<f64>) {
    let blocks = split_blocks(params, n_features, cfg);
    let inv_n = 1.0 / graphs.len() as f64;
    let per_graph: Vec<(f64, Vec<f64>)> = graphs
        .par_iter()
        .zip(labels.par_iter())
        .map(|(g, &label)| {
            let pass = forward(g, &blocks, cfg);
            let y = label as u8 as f64;
            let w = if label { weights.0 } else { weights.1 };
            let loss = w * bce_from_logit(pass.logit, y) * inv_n;
            let dlogit = w * (sigmoid(pass.logit) - y) * inv_n;
            let mut grad = vec![0.0; params.len()];
            backward(g, &blocks, cfg, &pass, dlogit, &mut grad);
            (loss, grad)
        })
        .collect();
    let mut loss = 0.0;
    let mut grad = vec![0.0; params.len()];
    for (l, g) in per_graph {
        loss += l;
        for (acc, v) in grad.iter_mut().zip(&g) {
            *acc += v;
        }
    }
    (loss, grad)
}

fn init_params(n_features: usize, cfg: &GnnConfig) -> Vec<f64> {
    let mut rng = rng::substream(cfg.seed, "gnn-init");
    let total = param_count(n_features, cfg.hidden, cfg.layers);
    let scale = (6.0 / (n_features + cfg.hidden) as f64).sqrt();
    (0..total).map(|_| rng.gen_range(-scale..scale)).collect()
}

fn validate_graphs(graphs: &[AttributedGraph], labels: &[bool], n_features: usize) -> Result<()> {
    if graphs.is_empty() {
        return Err(GfError::EmptyTrainingData);
    }
    if graphs.len() != labels.len() {
        return Err(GfError::InvalidArgument(
            "one label per graph is required".into(),
        ));
    }
    for g in graphs {
        if g.n_nodes() == 0 {
            return Err(GfError::InvalidArgument("empty graph".into()));
        }
        if g.n_features != n_features || g.features.iter().any(|r| r.len() != n_features) {
            return Err(GfError::MaskMismatch(format!(
                "expected {n_features}-dimensional node features"
            )));
        }
    }
    Ok(())
}

/// Full-batch Adam on class-weighted cross entropy. Training is
/// deterministic for a fixed config; a non-finite loss aborts with
/// `Diverged`.
pub fn train_gnn(
    graphs: &[AttributedGraph],
    labels: &[bool],
    cfg: &GnnConfig,
) -> Result<GnnModel> {
    if cfg.hidden == 0 || cfg.layers == 0 || cfg.epochs == 0 {
        return Err(GfError::InvalidArgument(
            "hidden width, layer count, and epochs must be positive".into(),
        ));
    }
    let n_features = graphs.first().map(|g| g.n_features).unwrap_or(0);
    validate_graphs(graphs, labels, n_features)?;
    let weights = class_weights(labels)?;

    let mut params = init_params(n_features, cfg);
    let mut m = vec![0.0; params.len()];
    let mut v = vec![0.0; params.len()];
    let (beta1, beta2, eps): (f64, f64, f64) = (0.9, 0.999, 1e-8);
    let mut loss_curve = Vec::with_capacity(cfg.epochs);

    for step in 0..cfg.epochs {
        let (loss, grad) = loss_and_grad(graphs, labels, weights, &params, n_features, cfg);
        if !loss.is_finite() {
            return Err(GfError::Diverged { step, loss });
        }
        loss_curve.push(loss);
        let t = (step + 1) as i32;
        let bc1 = 1.0 - beta1.powi(t);
        let bc2 = 1.0 - beta2.powi(t);
        for i in 0..params.len() {
            m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
            params[i] -= cfg.learning_rate * (m[i] / bc1) / ((v[i] / bc2).sqrt() + eps);
        }
    }

    Ok(GnnModel {
        config: *cfg,
        n_features,
        params,
        loss_curve,
    })
}

/// Award probability for one graph.
pub fn gnn_predict(model: &GnnModel, graph: &AttributedGraph) -> Result<f64> {
    validate_graphs(std::slice::from_ref(graph), &[false], model.n_features)?;
    let blocks = split_blocks(&model.params, model.n_features, &model.config);
    let pass = forward(graph, &blocks, &model.config);
    Ok(sigmoid(pass.logit))
}

/// Compare analytic gradients against central finite differences on a
/// random parameter sample. Returns the worst relative error
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
pub fn gradient_check(
    graphs: &[AttributedGraph],
    labels: &[bool],
    cfg: &GnnConfig,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    let n_features = graphs.first().map(|g| g.n_features).unwrap_or(0);
    validate_graphs(graphs, labels, n_features)?;
    let weights = class_weights(labels)?;
    let params = init_params(n_features, cfg);
    let (_, grad) = loss_and_grad(graphs, labels, weights, &params, n_features, cfg);

    let loss_at = |p: &[f64]| -> f64 {
        let blocks = split_blocks(p, n_features, cfg);
        let inv_n = 1.0 / graphs.len() as f64;
        graphs
            .iter()
            .zip(labels)
            .map(|(g, &label)| {
                let pass = forward(g, &blocks, cfg);
                let w = if label { weights.0 } else { weights.1 };
                w * bce_from_logit(pass.logit, label as u8 as f64) * inv_n
            })
            .sum()
    };

    let step = 1e-5;
    let mut check_rng = rng::substream(seed, "gradcheck");
    let mut indices: Vec<usize> = (0..params.len()).collect();
    for i in 0..n_samples.min(indices.len()) {
        let j = check_rng.gen_range(i..indices.len());
        indices.swap(i, j);
    }
    let sampled = &indices[..n_samples.min(params.len())];
    let mut worst = 0.0f64;
    for &idx in sampled {
        let mut plus = params.clone();
        plus[idx] += step;
        let mut minus = params.clone();
        minus[idx] -= step;
        let numeric = (loss_at(&plus) - loss_at(&minus)) / (2.0 * step);
        let analytic = grad[idx];
        let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6);
        worst = worst.max(rel);
    }
    Ok(worst)
}
