//! Scholar profile graphs.
//!
//! A profile is the timed DAG of one scholar's papers connected by
//! reversed self-citations: an edge runs from the cited (earlier) paper
//! to the citing (later) one. The full profile carries every paper and
//! every surviving self-citation; the core view keeps only nodes with
//! high contribution probability and the strongest extend-type edges.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{GfError, Result};
use crate::topic_embed::{paper_topic_vector_idx, TopicEmbedding};

/// Which node attributes downstream encoders may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeMask {
    pub citations: bool,
    pub date: bool,
    pub order: bool,
    pub topic: bool,
}

impl Default for AttributeMask {
    fn default() -> Self {
        AttributeMask {
            citations: true,
            date: true,
            order: true,
            topic: true,
        }
    }
}

/// One paper of the scholar, with its node attributes. `p_cont` is
/// filled by contribution profiling; `None` until then.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GFNode {
    pub paper_id: String,
    pub year: i32,
    pub citation_count: u64,
    /// 1-based byline position of the scholar on this paper.
    pub author_order: usize,
    pub topic_vector: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_cont: Option<f64>,
}

/// A reversed self-citation: `src` (cited, earlier) -> `dst` (citing,
/// later). `p_extend` is filled by edge profiling; `None` until then.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GFEdge {
    pub src: String,
    pub dst: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_extend: Option<f64>,
}

/// Whether a profile is the full graph or a core extraction, and with
/// which parameters the core was cut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileView {
    Full,
    Core {
        node_threshold: f64,
        edge_fraction: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GFProfile {
    pub scholar_id: String,
    pub nodes: Vec<GFNode>,
    pub edges: Vec<GFEdge>,
    pub view: ProfileView,
    pub attribute_selection: AttributeMask,
    /// Citations pointing at a later-dated paper, dropped at build time.
    pub dropped_future_edges: usize,
    /// Same-year cycle edges removed to restore acyclicity.
    pub dropped_cycle_edges: usize,
}

/// Build the full profile: every paper of the scholar, every
/// self-citation oriented cited -> citing.
///
/// A citation whose citing paper predates the cited paper is dropped and
/// counted. Same-year citations are kept; if they close a cycle, the
/// edge with the lexicographically largest (src, dst) id pair inside the
/// cycle is dropped, repeatedly, until the graph is acyclic.
pub fn build_full_profile(
    corpus: &Corpus,
    scholar: &str,
    emb: &TopicEmbedding,
) -> Result<GFProfile> {
    if !corpus.is_known_author(scholar) {
        return Err(GfError::UnknownAuthor(scholar.to_string()));
    }
    let paper_idxs = corpus.papers_of_author(scholar);
    if paper_idxs.is_empty() {
        return Err(GfError::NoPapers(scholar.to_string()));
    }

    let mut nodes: Vec<(usize, GFNode)> = paper_idxs
        .iter()
        .map(|&idx| {
            let p = corpus.paper_by_idx(idx);
            let (topic_vector, _skipped) = paper_topic_vector_idx(corpus, emb, idx);
            let node = GFNode {
                paper_id: p.paper_id.clone(),
                year: p.year,
                citation_count: corpus.citation_count(idx),
                author_order: corpus.author_order(idx, scholar).unwrap(),
                topic_vector,
                p_cont: None,
            };
            (idx, node)
        })
        .collect();
    nodes.sort_by(|a, b| (a.1.year, &a.1.paper_id).cmp(&(b.1.year, &b.1.paper_id)));

    let node_of_paper: HashMap<usize, usize> = nodes
        .iter()
        .enumerate()
        .map(|(n, (idx, _))| (*idx, n))
        .collect();

    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut dropped_future_edges = 0usize;
    for (citing_node, (citing_paper, _)) in nodes.iter().enumerate() {
        for &cited_paper in corpus.refs_of(*citing_paper) {
            let Some(&cited_node) = node_of_paper.get(&cited_paper) else {
                continue; // not a self-citation
            };
            if nodes[citing_node].1.year < nodes[cited_node].1.year {
                dropped_future_edges += 1;
                continue;
            }
            edges.push((cited_node, citing_node));
        }
    }
    let nodes: Vec<GFNode> = nodes.into_iter().map(|(_, n)| n).collect();
    edges.sort_by(|a, b| edge_key(&nodes, *a).cmp(&edge_key(&nodes, *b)));

    let dropped_cycle_edges = break_same_year_cycles(&nodes, &mut edges);

    Ok(GFProfile {
        scholar_id: scholar.to_string(),
        edges: edges
            .into_iter()
            .map(|(s, d)| GFEdge {
                src: nodes[s].paper_id.clone(),
                dst: nodes[d].paper_id.clone(),
                p_extend: None,
            })
            .collect(),
        nodes,
        view: ProfileView::Full,
        attribute_selection: AttributeMask::default(),
        dropped_future_edges,
        dropped_cycle_edges,
    })
}

fn edge_key<'a>(nodes: &'a [GFNode], (s, d): (usize, usize)) -> (&'a str, &'a str) {
    (&nodes[s].paper_id, &nodes[d].paper_id)
}

/// Remove same-year cycles deterministically; returns how many edges
/// were dropped. Cycles can only involve same-year nodes because every
/// other edge strictly increases the year.
fn break_same_year_cycles(nodes: &[GFNode], edges: &mut Vec<(usize, usize)>) -> usize {
    let mut dropped = 0usize;
    loop {
        let sccs = strongly_connected_components(nodes.len(), edges);
        let mut component_of = vec![usize::MAX; nodes.len()];
        let mut cyclic = vec![false; sccs.len()];
        for (c, members) in sccs.iter().enumerate() {
            for &m in members {
                component_of[m] = c;
            }
            cyclic[c] = members.len() > 1;
        }
        if !cyclic.iter().any(|&c| c) {
            return dropped;
        }
        // In every cyclic component, drop the largest (src, dst) id pair
        // among its internal edges; that edge lies on a cycle and is the
        // maximal edge of that cycle.
        let mut victims: HashMap<usize, (usize, usize)> = HashMap::new();
        for &(s, d) in edges.iter() {
            let c = component_of[s];
            if c == component_of[d] && cyclic[c] {
                let better = match victims.get(&c) {
                    None => true,
                    Some(&cur) => edge_key(nodes, (s, d)) > edge_key(nodes, cur),
                };
                if better {
                    victims.insert(c, (s, d));
                }
            }
        }
        dropped += victims.len();
        let doomed: Vec<(usize, usize)> = victims.into_values().collect();
        edges.retain(|e| !doomed.contains(e));
    }
}

/// Iterative Tarjan over an edge list.
fn strongly_connected_components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(s, d) in edges {
        adj[s].push(d);
    }
    let mut index = vec![usize::MAX; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut sccs: Vec<Vec<usize>> = Vec::new();
    // Explicit DFS frames: (node, next child position).
    let mut frames: Vec<(usize, usize)> = Vec::new();

    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        frames.push((start, 0));
        index[start] = next_index;
        lowlink[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;

        while let Some(&mut (v, ref mut child)) = frames.last_mut() {
            if *child < adj[v].len() {
                let w = adj[v][*child];
                *child += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    sccs.push(component);
                }
            }
        }
    }
    sccs
}

/// Cut the core view: keep nodes with `p_cont > node_threshold`, then
/// the top `ceil(q * m)` surviving edges by `p_extend` (ties broken by
/// descending p_extend, then ascending (src, dst)).
///
/// Re-extracting with the parameters already recorded on a core profile
/// is the identity: the edge quota is defined against the edges that
/// survived node removal in the original cut, so re-applying the cut to
/// its own output would otherwise shrink it again.
pub fn extract_core_profile(
    profile: &GFProfile,
    node_threshold: f64,
    edge_fraction: f64,
) -> Result<GFProfile> {
    if !(0.0..=1.0).contains(&edge_fraction) || edge_fraction == 0.0 {
        return Err(GfError::InvalidArgument(format!(
            "edge fraction must be in (0, 1], got {edge_fraction}"
        )));
    }
    if let ProfileView::Core {
        node_threshold: t,
        edge_fraction: q,
    } = profile.view
    {
        if t == node_threshold && q == edge_fraction {
            return Ok(profile.clone());
        }
    }
    for n in &profile.nodes {
        if n.p_cont.is_none() {
            return Err(GfError::Unpopulated(format!(
                "node `{}` has no contribution probability",
                n.paper_id
            )));
        }
    }
    for e in &profile.edges {
        if e.p_extend.is_none() {
            return Err(GfError::Unpopulated(format!(
                "edge {} -> {} has no extend probability",
                e.src, e.dst
            )));
        }
    }

    let nodes: Vec<GFNode> = profile
        .nodes
        .iter()
        .filter(|n| n.p_cont.unwrap() > node_threshold)
        .cloned()
        .collect();
    let kept_ids: std::collections::HashSet<&str> =
        nodes.iter().map(|n| n.paper_id.as_str()).collect();

    let mut surviving: Vec<&GFEdge> = profile
        .edges
        .iter()
        .filter(|e| kept_ids.contains(e.src.as_str()) && kept_ids.contains(e.dst.as_str()))
        .collect();
    let quota = (edge_fraction * surviving.len() as f64).ceil() as usize;
    surviving.sort_by(|a, b| {
        b.p_extend
            .unwrap()
            .partial_cmp(&a.p_extend.unwrap())
            .unwrap()
            .then_with(|| (&a.src, &a.dst).cmp(&(&b.src, &b.dst)))
    });
    let mut edges: Vec<GFEdge> = surviving.into_iter().take(quota).cloned().collect();
    edges.sort_by(|a, b| (&a.src, &a.dst).cmp(&(&b.src, &b.dst)));

    Ok(GFProfile {
        scholar_id: profile.scholar_id.clone(),
        nodes,
        edges,
        view: ProfileView::Core {
            node_threshold,
            edge_fraction,
        },
        attribute_selection: profile.attribute_selection,
        dropped_future_edges: profile.dropped_future_edges,
        dropped_cycle_edges: profile.dropped_cycle_edges,
    })
}

impl GFProfile {
    /// Kahn topological order; `None` if a cycle survived (it must not).
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let index: HashMap<&str, usize> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.paper_id.as_str(), i))
            .collect();
        let mut indegree = vec![0usize; self.nodes.len()];
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            let (s, d) = (index[e.src.as_str()], index[e.dst.as_str()]);
            adj[s].push(d);
            indegree[d] += 1;
        }
        let mut queue: Vec<usize> = (0..self.nodes.len()).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(v) = queue.pop() {
            order.push(v);
            for &w in &adj[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push(w);
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }

    pub fn node_index(&self) -> HashMap<&str, usize> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.paper_id.as_str(), i))
            .collect()
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| GfError::io(path, e))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)
            .map_err(|e| GfError::InvalidRecord(format!("profile serialization: {e}")))
    }

    pub fn load_json(path: &Path) -> Result<GFProfile> {
        let file = std::fs::File::open(path).map_err(|e| GfError::io(path, e))?;
        serde_json::from_reader(std::io::BufReader::new(file)).map_err(|e| {
            GfError::Malformed {
                path: path.display().to_string(),
                line: 0,
                message: e.to_string(),
            }
        })
    }
}

/// 4x4 palette indexed by the quantized first two topic components:
/// rows pick a hue family, columns a lightness step.
const PALETTE: [&str; 16] = [
    "#4575b4", "#74add1", "#abd9e9", "#e0f3f8",
    "#8c510a", "#bf812d", "#dfc27d", "#f6e8c3",
    "#00441b", "#1b7837", "#5aae61", "#a6dba0",
    "#67001f", "#b2182b", "#d6604d", "#f4a582",
];

fn quantize(value: f64, min: f64, max: f64) -> usize {
    if !(max > min) {
        return 0;
    }
    let t = ((value - min) / (max - min) * 4.0) as usize;
    t.min(3)
}

fn dot_escape(id: &str) -> String {
    id.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Write the profile as a Graphviz digraph: label `paper_id:year`, fill
/// color from the first two topic components, outline width bucketed by
/// citation count (<10, <100, >=100), edge width scaled by p_extend.
pub fn export_dot(profile: &GFProfile, out: &Path) -> Result<()> {
    let file = std::fs::File::create(out).map_err(|e| GfError::io(out, e))?;
    let mut w = std::io::BufWriter::new(file);
    let component = |node: &GFNode, axis: usize| node.topic_vector.get(axis).copied().unwrap_or(0.0);
    let range = |axis: usize| {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for n in &profile.nodes {
            min = min.min(component(n, axis));
            max = max.max(component(n, axis));
        }
        (min, max)
    };
    let (min0, max0) = range(0);
    let (min1, max1) = range(1);

    let write = |w: &mut std::io::BufWriter<std::fs::File>, s: String| {
        w.write_all(s.as_bytes()).map_err(|e| GfError::io(out, e))
    };
    write(&mut w, format!("digraph \"{}\" {{\n", dot_escape(&profile.scholar_id)))?;
    write(&mut w, "  rankdir=LR;\n  node [style=filled];\n".to_string())?;
    for n in &profile.nodes {
        let row = quantize(component(n, 0), min0, max0);
        let col = quantize(component(n, 1), min1, max1);
        let outline = match n.citation_count {
            0..=9 => 1.0,
            10..=99 => 2.0,
            _ => 3.0,
        };
        write(
            &mut w,
            format!(
                "  \"{}\" [label=\"{}:{}\", fillcolor=\"{}\", penwidth={:.1}];\n",
                dot_escape(&n.paper_id),
                dot_escape(&n.paper_id),
                n.year,
                PALETTE[row * 4 + col],
                outline
            ),
        )?;
    }
    for e in &profile.edges {
        let width = 0.5 + 2.5 * e.p_extend.unwrap_or(0.2);
        write(
            &mut w,
            format!(
                "  \"{}\" -> \"{}\" [penwidth={:.2}];\n",
                dot_escape(&e.src),
                dot_escape(&e.dst),
                width
            ),
        )?;
    }
    write(&mut w, "}\n".to_string())?;
    w.flush().map_err(|e| GfError::io(out, e))
}
