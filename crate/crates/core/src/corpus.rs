//! Bibliographic corpus: record types, loading, validation, and indexes.
//!
//! The corpus is the single source of truth for every downstream stage.
//! It is loaded once from JSON Lines files, validated, indexed, and then
//! treated as immutable — all profiling operations are pure reads.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{GfError, Result};
use crate::jsonl;

/// Earliest publication year accepted as plausible.
pub const MIN_YEAR: i32 = 1900;

/// One paper. `authors` is ordered: position in the list is the byline
/// rank used throughout contribution analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub paper_id: String,
    pub title: String,
    pub year: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub venue: Option<String>,
    pub authors: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub topic_ids: Vec<String>,
    #[serde(
        default,
        rename = "abstract",
        skip_serializing_if = "Option::is_none"
    )]
    pub abstract_text: Option<String>,
    /// Global citation count from the source database, when it differs
    /// from the in-corpus count. Honored by [`Corpus::citation_count`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external_citations: Option<u64>,
}

/// A directed citation: `citing_id` cites `cited_id`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationRecord {
    pub citing_id: String,
    pub cited_id: String,
}

/// One in-text occurrence of a citation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CiteOccurrence {
    pub section_name: String,
    pub rel_pos_paper: f64,
    pub rel_pos_section: f64,
    pub rel_pos_subsection: f64,
    pub rel_pos_sentence: f64,
    pub sentence_text: String,
}

/// All in-text occurrences of one citation link, pre-extracted from the
/// citing paper's full text by an upstream tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CitationContextRecord {
    pub citing_id: String,
    pub cited_id: String,
    pub occurrences: Vec<CiteOccurrence>,
}

/// One node of the topic hierarchy. `parent_id = None` marks the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicRecord {
    pub topic_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<String>,
    pub name: String,
}

/// Award ground truth for one scholar (`awarded` is 0 or 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AwardLabel {
    pub author_id: String,
    pub awarded: u8,
}

/// Advisor-advisee ground truth for one ordered pair at a year.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AaLabel {
    pub advisor_id: String,
    pub advisee_id: String,
    pub year: i32,
    pub label: u8,
}

/// Extend-type ground truth for one citation link.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendLabel {
    pub citing_id: String,
    pub cited_id: String,
    pub label: u8,
}

/// Input file set for [`load_corpus`]. Contexts and topics are optional.
#[derive(Debug, Clone)]
pub struct CorpusPaths {
    pub papers: PathBuf,
    pub citations: PathBuf,
    pub contexts: Option<PathBuf>,
    pub topics: Option<PathBuf>,
}

impl CorpusPaths {
    /// Conventional file names under one directory; the optional files
    /// are picked up only when present.
    pub fn in_dir(dir: &Path) -> Self {
        let opt = |name: &str| {
            let p = dir.join(name);
            p.exists().then_some(p)
        };
        CorpusPaths {
            papers: dir.join("papers.jsonl"),
            citations: dir.join("citations.jsonl"),
            contexts: opt("contexts.jsonl"),
            topics: opt("topics.jsonl"),
        }
    }
}

/// What lenient loading discarded. Strict loading errors instead, so a
/// strict report is all zeros.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    /// Citations with an endpoint missing from `papers.jsonl`.
    pub dropped_dangling_citations: usize,
    /// Citations where a paper cited itself.
    pub dropped_self_loops: usize,
    /// Exact duplicates of an earlier citation record.
    pub dropped_duplicate_citations: usize,
    /// Context records without a matching citation.
    pub dropped_contexts: usize,
}

/// Immutable, fully indexed corpus.
#[derive(Debug, Clone)]
pub struct Corpus {
    papers: Vec<PaperRecord>,
    citations: Vec<CitationRecord>,
    contexts: Vec<CitationContextRecord>,
    topics: Vec<TopicRecord>,
    paper_index: HashMap<String, usize>,
    /// Outgoing reference lists: `refs_out[i]` = papers that paper i cites.
    refs_out: Vec<Vec<usize>>,
    /// Incoming citation lists: `cites_in[i]` = papers citing paper i.
    cites_in: Vec<Vec<usize>>,
    author_papers: HashMap<String, Vec<usize>>,
    context_index: HashMap<(usize, usize), usize>,
    report: LoadReport,
}

/// Read and index a corpus from disk.
///
/// In strict mode a citation with an unresolvable endpoint is an error;
/// in lenient mode it is dropped and tallied in the [`LoadReport`].
/// Record-level invariant violations (empty author list, implausible
/// year, repeated author within one paper) are errors in both modes.
pub fn load_corpus(paths: &CorpusPaths, strict: bool) -> Result<Corpus> {
    let papers: Vec<PaperRecord> = jsonl::read_jsonl(&paths.papers)?;
    let citations: Vec<CitationRecord> = jsonl::read_jsonl(&paths.citations)?;
    let contexts: Vec<CitationContextRecord> = match &paths.contexts {
        Some(p) => jsonl::read_jsonl(p)?,
        None => Vec::new(),
    };
    let topics: Vec<TopicRecord> = match &paths.topics {
        Some(p) => jsonl::read_jsonl(p)?,
        None => Vec::new(),
    };
    Corpus::from_records(papers, citations, contexts, topics, strict)
}

impl Corpus {
    /// Validate and index in-memory records. Used by [`load_corpus`] and
    /// by the synthetic generator.
    pub fn from_records(
        papers: Vec<PaperRecord>,
        citations: Vec<CitationRecord>,
        contexts: Vec<CitationContextRecord>,
        topics: Vec<TopicRecord>,
        strict: bool,
    ) -> Result<Corpus> {
        let current_year = time::OffsetDateTime::now_utc().year();
        let mut paper_index = HashMap::with_capacity(papers.len());
        for (i, p) in papers.iter().enumerate() {
            if p.authors.is_empty() {
                return Err(GfError::InvalidRecord(format!(
                    "paper `{}` has no authors",
                    p.paper_id
                )));
            }
            if p.year < MIN_YEAR || p.year > current_year {
                return Err(GfError::InvalidRecord(format!(
                    "paper `{}` has implausible year {}",
                    p.paper_id, p.year
                )));
            }
            let distinct: HashSet<&str> = p.authors.iter().map(String::as_str).collect();
            if distinct.len() != p.authors.len() {
                return Err(GfError::InvalidRecord(format!(
                    "paper `{}` repeats an author id",
                    p.paper_id
                )));
            }
            if paper_index.insert(p.paper_id.clone(), i).is_some() {
                return Err(GfError::DuplicatePaperId(p.paper_id.clone()));
            }
        }

        let mut seen_topics = HashSet::new();
        for t in &topics {
            if !seen_topics.insert(t.topic_id.as_str()) {
                return Err(GfError::DuplicateTopicId(t.topic_id.clone()));
            }
        }

        let mut report = LoadReport::default();
        let mut kept_citations = Vec::with_capacity(citations.len());
        let mut seen_pairs = HashSet::with_capacity(citations.len());
        for c in citations {
            let citing = paper_index.get(&c.citing_id).copied();
            let cited = paper_index.get(&c.cited_id).copied();
            let (citing, cited) = match (citing, cited) {
                (Some(a), Some(b)) => (a, b),
                _ if strict => {
                    return Err(GfError::DanglingCitation {
                        citing: c.citing_id,
                        cited: c.cited_id,
                    })
                }
                _ => {
                    report.dropped_dangling_citations += 1;
                    continue;
                }
            };
            if citing == cited {
                if strict {
                    return Err(GfError::InvalidRecord(format!(
                        "paper `{}` cites itself",
                        c.citing_id
                    )));
                }
                report.dropped_self_loops += 1;
                continue;
            }
            if !seen_pairs.insert((citing, cited)) {
                report.dropped_duplicate_citations += 1;
                continue;
            }
            kept_citations.push((c, citing, cited));
        }

        let mut refs_out = vec![Vec::new(); papers.len()];
        let mut cites_in = vec![Vec::new(); papers.len()];
        for &(_, citing, cited) in &kept_citations {
            refs_out[citing].push(cited);
            cites_in[cited].push(citing);
        }
        for list in refs_out.iter_mut().chain(cites_in.iter_mut()) {
            list.sort_unstable();
        }

        let mut kept_contexts = Vec::with_capacity(contexts.len());
        let mut context_index = HashMap::new();
        for ctx in contexts {
            if ctx.occurrences.is_empty() {
                return Err(GfError::InvalidRecord(format!(
                    "context {} -> {} has no occurrences",
                    ctx.citing_id, ctx.cited_id
                )));
            }
            for occ in &ctx.occurrences {
                let positions = [
                    occ.rel_pos_paper,
                    occ.rel_pos_section,
                    occ.rel_pos_subsection,
                    occ.rel_pos_sentence,
                ];
                if positions.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    return Err(GfError::InvalidRecord(format!(
                        "context {} -> {} has a position outside [0,1]",
                        ctx.citing_id, ctx.cited_id
                    )));
                }
            }
            let citing = paper_index.get(&ctx.citing_id).copied();
            let cited = paper_index.get(&ctx.cited_id).copied();
            let key = match (citing, cited) {
                (Some(a), Some(b)) if seen_pairs.contains(&(a, b)) => (a, b),
                _ if strict => {
                    return Err(GfError::DanglingCitation {
                        citing: ctx.citing_id,
                        cited: ctx.cited_id,
                    })
                }
                _ => {
                    report.dropped_contexts += 1;
                    continue;
                }
            };
            context_index.insert(key, kept_contexts.len());
            kept_contexts.push(ctx);
        }

        let mut author_papers: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, p) in papers.iter().enumerate() {
            for a in &p.authors {
                author_papers.entry(a.clone()).or_default().push(i);
            }
        }

        Ok(Corpus {
            papers,
            citations: kept_citations.into_iter().map(|(c, _, _)| c).collect(),
            contexts: kept_contexts,
            topics,
            paper_index,
            refs_out,
            cites_in,
            author_papers,
            context_index,
            report,
        })
    }

    /// Write the corpus back as the canonical four-file layout. The
    /// output is byte-stable: records are emitted in stored order.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| GfError::io(dir, e))?;
        jsonl::write_jsonl(&dir.join("papers.jsonl"), &self.papers)?;
        jsonl::write_jsonl(&dir.join("citations.jsonl"), &self.citations)?;
        if !self.contexts.is_empty() {
            jsonl::write_jsonl(&dir.join("contexts.jsonl"), &self.contexts)?;
        }
        if !self.topics.is_empty() {
            jsonl::write_jsonl(&dir.join("topics.jsonl"), &self.topics)?;
        }
        Ok(())
    }

    pub fn load_report(&self) -> &LoadReport {
        &self.report
    }

    pub fn n_papers(&self) -> usize {
        self.papers.len()
    }

    pub fn papers(&self) -> &[PaperRecord] {
        &self.papers
    }

    pub fn citations(&self) -> &[CitationRecord] {
        &self.citations
    }

    pub fn contexts(&self) -> &[CitationContextRecord] {
        &self.contexts
    }

    pub fn topics(&self) -> &[TopicRecord] {
        &self.topics
    }

    /// Dense index of a paper id.
    pub fn paper_idx(&self, id: &str) -> Result<usize> {
        self.paper_index
            .get(id)
            .copied()
            .ok_or_else(|| GfError::UnknownPaper(id.to_string()))
    }

    pub fn paper_by_idx(&self, idx: usize) -> &PaperRecord {
        &self.papers[idx]
    }

    pub fn paper(&self, id: &str) -> Result<&PaperRecord> {
        Ok(&self.papers[self.paper_idx(id)?])
    }

    /// Indexes of papers citing `idx`.
    pub fn citers_of(&self, idx: usize) -> &[usize] {
        &self.cites_in[idx]
    }

    /// Indexes of papers that `idx` cites.
    pub fn refs_of(&self, idx: usize) -> &[usize] {
        &self.refs_out[idx]
    }

    pub fn has_citation(&self, citing: usize, cited: usize) -> bool {
        self.refs_out[citing].binary_search(&cited).is_ok()
    }

    /// Number of papers in the corpus citing this paper.
    pub fn in_corpus_citations(&self, idx: usize) -> u64 {
        self.cites_in[idx].len() as u64
    }

    /// Citation count used as a node attribute and for indicator
    /// baselines: the external override when supplied, otherwise the
    /// in-corpus count.
    pub fn citation_count(&self, idx: usize) -> u64 {
        self.papers[idx]
            .external_citations
            .unwrap_or_else(|| self.in_corpus_citations(idx))
    }

    /// Indexes of the papers authored by `author`, in corpus order.
    /// Unknown author ids resolve to the empty slice.
    pub fn papers_of_author(&self, author: &str) -> &[usize] {
        self.author_papers
            .get(author)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn is_known_author(&self, author: &str) -> bool {
        self.author_papers.contains_key(author)
    }

    /// All author ids, sorted for deterministic iteration.
    pub fn author_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.author_papers.keys().map(String::as_str).collect();
        ids.sort_unstable();
        ids
    }

    /// 1-based byline position of `author` on paper `idx`.
    pub fn author_order(&self, idx: usize, author: &str) -> Option<usize> {
        self.papers[idx]
            .authors
            .iter()
            .position(|a| a == author)
            .map(|p| p + 1)
    }

    /// In-text context for one citation link, when supplied.
    pub fn context_for(&self, citing: usize, cited: usize) -> Option<&CitationContextRecord> {
        self.context_index
            .get(&(citing, cited))
            .map(|&i| &self.contexts[i])
    }

    /// In-corpus citations of a paper grouped by the citing paper's
    /// publication year. Years with no citations are absent.
    pub fn citation_time_series(&self, id: &str) -> Result<BTreeMap<i32, u32>> {
        let idx = self.paper_idx(id)?;
        Ok(self.citation_time_series_idx(idx))
    }

    pub fn citation_time_series_idx(&self, idx: usize) -> BTreeMap<i32, u32> {
        let mut series = BTreeMap::new();
        for &citer in &self.cites_in[idx] {
            *series.entry(self.papers[citer].year).or_insert(0) += 1;
        }
        series
    }

    /// Number of authors shared by two papers.
    pub fn shared_author_count(&self, p1: &str, p2: &str) -> Result<usize> {
        let a = self.paper_idx(p1)?;
        let b = self.paper_idx(p2)?;
        Ok(self.shared_author_count_idx(a, b))
    }

    pub fn shared_author_count_idx(&self, a: usize, b: usize) -> usize {
        let set: HashSet<&str> = self.papers[a].authors.iter().map(String::as_str).collect();
        self.papers[b]
            .authors
            .iter()
            .filter(|x| set.contains(x.as_str()))
            .count()
    }
}

pub fn load_award_labels(path: &Path) -> Result<Vec<AwardLabel>> {
    jsonl::read_jsonl(path)
}

pub fn load_aa_labels(path: &Path) -> Result<Vec<AaLabel>> {
    jsonl::read_jsonl(path)
}

pub fn load_extend_labels(path: &Path) -> Result<Vec<ExtendLabel>> {
    jsonl::read_jsonl(path)
}
