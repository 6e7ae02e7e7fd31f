//! Synthetic corpus generation with planted ground truth.
//!
//! The generator scripts scholar careers so that every label file is
//! true by construction: planted advisor-advisee pairs satisfy the
//! mentorship definitions exactly, awardees carry extend-type
//! self-citation chains, and the award signal is purely structural —
//! paper counts, citation budgets, and byline positions are drawn from
//! the same distributions for both award groups, so scalar indicators
//! cannot separate them. Output is byte-identical for a fixed seed.

use std::path::Path;

use rand::Rng;

use crate::corpus::{
    AaLabel, AwardLabel, CitationContextRecord, CitationRecord, CiteOccurrence, Corpus,
    ExtendLabel, PaperRecord, TopicRecord,
};
use crate::error::{GfError, Result};
use crate::jsonl;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub n_scholars: usize,
    pub awardee_fraction: f64,
    pub planted_aa_pairs: usize,
    /// Extend-chain length range for awardees (inclusive).
    pub chain_len_min: usize,
    pub chain_len_max: usize,
    /// Papers per scholar range (inclusive), one paper per year.
    pub papers_min: usize,
    pub papers_max: usize,
    /// Probability of a misleading citation context (cue dropped from an
    /// extend link or added to a background one).
    pub noise_rate: f64,
    pub start_year_min: i32,
    pub start_year_max: i32,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_scholars: 200,
            awardee_fraction: 0.25,
            planted_aa_pairs: 30,
            chain_len_min: 5,
            chain_len_max: 8,
            papers_min: 10,
            papers_max: 14,
            noise_rate: 0.05,
            start_year_min: 1985,
            start_year_max: 1996,
            seed: 0,
        }
    }
}

/// Latest year the generator may assign (filler citers land a few years
/// after the papers they cite; stay clear of the current year).
const YEAR_HORIZON: i32 = 2024;
/// Years between an advisor's first paper and the advisee's.
const ADVISEE_DELAY: i32 = 8;
/// Joint first-author papers planted at the start of an advisee career.
const JOINT_PAPERS: usize = 3;

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(GfError::InvalidArgument(msg));
        if self.n_scholars < 4 {
            return fail("need at least 4 scholars".into());
        }
        let n_awardees = self.n_awardees();
        if n_awardees == 0 || n_awardees >= self.n_scholars {
            return fail(format!(
                "awardee fraction {} leaves {} awardees of {}",
                self.awardee_fraction, n_awardees, self.n_scholars
            ));
        }
        if self.planted_aa_pairs * 4 > self.n_scholars {
            return fail(format!(
                "{} planted pairs need {} distinct scholars, have {}",
                self.planted_aa_pairs,
                self.planted_aa_pairs * 4,
                self.n_scholars
            ));
        }
        if self.chain_len_min < 2 || self.chain_len_min > self.chain_len_max {
            return fail("chain length range is empty or too short".into());
        }
        if self.papers_min < JOINT_PAPERS + 2 || self.papers_min > self.papers_max {
            return fail("papers range too small for planted careers".into());
        }
        if self.chain_len_max + 2 > self.papers_min {
            return fail("chains must leave room for background self-citations".into());
        }
        if !(0.0..=1.0).contains(&self.noise_rate) || !(0.0..=1.0).contains(&self.awardee_fraction)
        {
            return fail("rates must lie in [0, 1]".into());
        }
        if self.start_year_min > self.start_year_max {
            return fail("empty start-year range".into());
        }
        let horizon =
            self.start_year_max + ADVISEE_DELAY + self.papers_max as i32 + FILLER_MAX_DELAY;
        if horizon > YEAR_HORIZON {
            return fail(format!(
                "careers would reach year {horizon}, beyond {YEAR_HORIZON}"
            ));
        }
        Ok(())
    }

    pub fn n_awardees(&self) -> usize {
        (self.awardee_fraction * self.n_scholars as f64).round() as usize
    }
}

/// Generated corpus plus every ground-truth label set.
pub struct SyntheticData {
    pub corpus: Corpus,
    pub award_labels: Vec<AwardLabel>,
    pub aa_labels: Vec<AaLabel>,
    pub extend_labels: Vec<ExtendLabel>,
}

const N_TOPIC_LEAVES: usize = 8;
const BG_PER_LEAF: usize = 50;
const FILLER_MAX_DELAY: i32 = 3;
const COAUTHOR_POOL: usize = 300;
const FILLER_AUTHOR_POOL: usize = 400;

/// Word pools per leaf topic; titles and abstracts are drawn from the
/// paper's leaf so text similarity tracks topical proximity.
const LEAF_VOCAB: [[&str; 8]; N_TOPIC_LEAVES] = [
    ["kernel", "margin", "classifier", "gradient", "sparse", "embedding", "logit", "batch"],
    ["agent", "policy", "reward", "planner", "bandit", "horizon", "rollout", "critic"],
    ["index", "query", "shard", "transaction", "join", "columnar", "cache", "log"],
    ["stream", "window", "operator", "backpressure", "lattice", "sketch", "join", "state"],
    ["cipher", "nonce", "proof", "adversary", "leakage", "oracle", "padding", "forgery"],
    ["sandbox", "fuzzing", "taint", "exploit", "patch", "binary", "symbolic", "heap"],
    ["router", "latency", "congestion", "packet", "overlay", "queue", "telemetry", "flow"],
    ["spectrum", "beam", "fading", "relay", "antenna", "uplink", "handover", "slice"],
];

struct ScholarPlan {
    id: String,
    start_year: i32,
    n_papers: usize,
    awarded: bool,
    leaf: usize,
    /// Extend-chain length; 0 for non-awardees.
    chain_len: usize,
    /// Index into the plans vector of the planted advisor, if this
    /// scholar is a planted advisee.
    advisor: Option<usize>,
    coauthors: Vec<String>,
}

fn topic_records() -> Vec<TopicRecord> {
    let mut topics = vec![TopicRecord {
        topic_id: "area".into(),
        parent_id: None,
        name: "computing".into(),
    }];
    let branches = ["learning", "data", "security", "networks"];
    for name in branches {
        topics.push(TopicRecord {
            topic_id: format!("area/{name}"),
            parent_id: Some("area".into()),
            name: name.into(),
        });
        for sub in 0..2 {
            topics.push(TopicRecord {
                topic_id: format!("area/{name}/{sub}"),
                parent_id: Some(format!("area/{name}")),
                name: format!("{name} subfield {sub}"),
            });
        }
    }
    debug_assert_eq!(topics.len(), 1 + branches.len() * 3);
    topics
}

fn leaf_topic_id(leaf: usize) -> String {
    let branches = ["learning", "data", "security", "networks"];
    format!("area/{}/{}", branches[leaf / 2], leaf % 2)
}

fn words(rng: &mut impl Rng, leaf: usize, n: usize) -> String {
    let vocab = &LEAF_VOCAB[leaf];
    (0..n)
        .map(|_| vocab[rng.gen_range(0..vocab.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

/// Per-paper citation budget: a shared heavy-tailed distribution so the
/// count multiset of a scholar never depends on the award group.
fn citation_budget(rng: &mut impl Rng) -> u32 {
    let z: f64 = rng.gen_range(-1.2..1.2);
    (4.0 * z.exp()).floor() as u32
}

pub fn generate_synthetic_corpus(spec: &SynthSpec) -> Result<SyntheticData> {
    spec.validate()?;

    // ---- career planning -------------------------------------------------
    let mut career_rng = rng::substream(spec.seed, "synth-career");
    let mut plans: Vec<ScholarPlan> = (0..spec.n_scholars)
        .map(|i| ScholarPlan {
            id: format!("s{i:03}"),
            start_year: career_rng.gen_range(spec.start_year_min..=spec.start_year_max),
            n_papers: career_rng.gen_range(spec.papers_min..=spec.papers_max),
            awarded: false,
            leaf: i % N_TOPIC_LEAVES,
            chain_len: 0,
            advisor: None,
            coauthors: (0..3)
                .map(|k| format!("c{:03}", (3 * i + k) % COAUTHOR_POOL))
                .collect(),
        })
        .collect();

    let mut award_rng = rng::substream(spec.seed, "synth-award");
    let mut order: Vec<usize> = (0..spec.n_scholars).collect();
    crate::metrics::shuffle(&mut order, &mut award_rng);
    for &i in order.iter().take(spec.n_awardees()) {
        plans[i].awarded = true;
    }

    let mut chain_rng = rng::substream(spec.seed, "synth-chain");
    for plan in plans.iter_mut() {
        if plan.awarded {
            plan.chain_len = chain_rng.gen_range(spec.chain_len_min..=spec.chain_len_max);
        }
    }

    // Planted pairs use disjoint scholars; the remaining pool supplies
    // unrelated negative pairs.
    let mut aa_rng = rng::substream(spec.seed, "synth-aa");
    let mut pool: Vec<usize> = (0..spec.n_scholars).collect();
    crate::metrics::shuffle(&mut pool, &mut aa_rng);
    let p = spec.planted_aa_pairs;
    for k in 0..p {
        let advisor = pool[2 * k];
        let advisee = pool[2 * k + 1];
        plans[advisee].advisor = Some(advisor);
        plans[advisee].start_year = plans[advisor].start_year + ADVISEE_DELAY;
    }

    // ---- papers -----------------------------------------------------------
    let mut papers: Vec<PaperRecord> = Vec::new();
    let mut text_rng = rng::substream(spec.seed, "synth-text");
    let mut byline_rng = rng::substream(spec.seed, "synth-byline");

    // Background literature: reference targets that give papers of one
    // leaf a shared bibliography.
    for leaf in 0..N_TOPIC_LEAVES {
        for j in 0..BG_PER_LEAF {
            let n = leaf * BG_PER_LEAF + j;
            papers.push(PaperRecord {
                paper_id: format!("bg{n:04}"),
                title: words(&mut text_rng, leaf, 4),
                year: 1970 + (n % 12) as i32,
                venue: None,
                authors: vec![format!("bga{n:04}")],
                topic_ids: vec![leaf_topic_id(leaf)],
                abstract_text: None,
                external_citations: None,
            });
        }
    }

    // Scholar papers: one per year; planted advisees open their career
    // with JOINT_PAPERS first-author papers carrying the advisor second.
    let scholar_paper_ids: Vec<Vec<String>> = plans
        .iter()
        .map(|plan| {
            (0..plan.n_papers)
                .map(|j| format!("{}-p{j:02}", plan.id))
                .collect()
        })
        .collect();
    for (i, plan) in plans.iter().enumerate() {
        for j in 0..plan.n_papers {
            let year = plan.start_year + j as i32;
            let joint = plan.advisor.filter(|_| j < JOINT_PAPERS);
            let authors = match joint {
                Some(advisor) => vec![plan.id.clone(), plans[advisor].id.clone()],
                None => {
                    // Byline position from one shared distribution: the
                    // scholar leads 70% of their papers.
                    let u: f64 = byline_rng.gen_range(0.0..1.0);
                    let position = if u < 0.7 { 1 } else if u < 0.9 { 2 } else { 3 };
                    let mut authors: Vec<String> = plan
                        .coauthors
                        .iter()
                        .take(position.max(2) - 1)
                        .cloned()
                        .collect();
                    authors.insert(position - 1, plan.id.clone());
                    authors
                }
            };
            let in_chain = j < plan.chain_len;
            // Chain papers share a distinctive project token so their
            // pairwise text similarity is high; other papers get a token
            // of their own.
            let marker = if in_chain {
                format!("proj{i:03}")
            } else {
                format!("note{i:03}x{j:02}")
            };
            let title = format!("{} {marker}", words(&mut text_rng, plan.leaf, 3));
            let abstract_text = format!(
                "{} {marker} {}",
                words(&mut text_rng, plan.leaf, 6),
                words(&mut text_rng, plan.leaf, 6)
            );
            papers.push(PaperRecord {
                paper_id: scholar_paper_ids[i][j].clone(),
                title,
                year,
                venue: Some("synthetic venue".into()),
                authors,
                topic_ids: vec![leaf_topic_id(plan.leaf)],
                abstract_text: Some(abstract_text),
                external_citations: None,
            });
        }
    }

    // ---- self-citations and their labels ----------------------------------
    let mut citations: Vec<CitationRecord> = Vec::new();
    let mut contexts: Vec<CitationContextRecord> = Vec::new();
    let mut extend_labels: Vec<ExtendLabel> = Vec::new();
    let mut ctx_rng = rng::substream(spec.seed, "synth-context");
    let mut self_received: std::collections::HashMap<String, u32> =
        std::collections::HashMap::new();

    let plant_self_citation =
        |citing: &str,
         cited: &str,
         is_extend: bool,
         citations: &mut Vec<CitationRecord>,
         contexts: &mut Vec<CitationContextRecord>,
         extend_labels: &mut Vec<ExtendLabel>,
         self_received: &mut std::collections::HashMap<String, u32>,
         rng: &mut rand_chacha::ChaCha20Rng| {
            citations.push(CitationRecord {
                citing_id: citing.to_string(),
                cited_id: cited.to_string(),
            });
            *self_received.entry(cited.to_string()).or_insert(0) += 1;
            extend_labels.push(ExtendLabel {
                citing_id: citing.to_string(),
                cited_id: cited.to_string(),
                label: is_extend as u8,
            });
            let noisy = rng.gen_range(0.0..1.0) < spec.noise_rate;
            let occurrences = if is_extend {
                let method_sentence = if noisy {
                    "The setup of [ref] is summarized for completeness.".to_string()
                } else if rng.gen_bool(0.5) {
                    "We extend the system of [ref] with additional stages.".to_string()
                } else {
                    "This builds directly on our previous results in [ref].".to_string()
                };
                vec![
                    CiteOccurrence {
                        section_name: if rng.gen_bool(0.5) {
                            "Methodology".into()
                        } else {
                            "Approach".into()
                        },
                        rel_pos_paper: rng.gen_range(0.35..0.60),
                        rel_pos_section: rng.gen_range(0.2..0.8),
                        rel_pos_subsection: rng.gen_range(0.2..0.8),
                        rel_pos_sentence: rng.gen_range(0.1..0.9),
                        sentence_text: method_sentence,
                    },
                    CiteOccurrence {
                        section_name: "Experiments".into(),
                        rel_pos_paper: rng.gen_range(0.65..0.90),
                        rel_pos_section: rng.gen_range(0.2..0.8),
                        rel_pos_subsection: rng.gen_range(0.2..0.8),
                        rel_pos_sentence: rng.gen_range(0.1..0.9),
                        sentence_text: "We reuse the evaluation protocol of [ref].".into(),
                    },
                ]
            } else {
                let intro_sentence = if noisy {
                    "A different line of work extends [ref].".to_string()
                } else {
                    "Prior approaches include [ref].".to_string()
                };
                vec![CiteOccurrence {
                    section_name: "Introduction".into(),
                    rel_pos_paper: rng.gen_range(0.02..0.15),
                    rel_pos_section: rng.gen_range(0.05..0.5),
                    rel_pos_subsection: rng.gen_range(0.05..0.5),
                    rel_pos_sentence: rng.gen_range(0.1..0.9),
                    sentence_text: intro_sentence,
                }]
            };
            contexts.push(CitationContextRecord {
                citing_id: citing.to_string(),
                cited_id: cited.to_string(),
                occurrences,
            });
        };

    for (i, plan) in plans.iter().enumerate() {
        let ids = &scholar_paper_ids[i];
        // Extend chain: each chain paper cites its predecessor.
        for j in 1..plan.chain_len {
            plant_self_citation(
                &ids[j],
                &ids[j - 1],
                true,
                &mut citations,
                &mut contexts,
                &mut extend_labels,
                &mut self_received,
                &mut ctx_rng,
            );
        }
        // Two background self-citations with long gaps, never adjacent
        // papers, so they cannot collide with chain links.
        for k in 0..2usize {
            let citing_idx = plan.n_papers - 1 - k;
            let cited_idx = citing_idx.saturating_sub(4 + k);
            if citing_idx > cited_idx {
                plant_self_citation(
                    &ids[citing_idx],
                    &ids[cited_idx],
                    false,
                    &mut citations,
                    &mut contexts,
                    &mut extend_labels,
                    &mut self_received,
                    &mut ctx_rng,
                );
            }
        }
    }

    // ---- references into background literature ----------------------------
    // Chain papers draw from a 5-paper pool so consecutive chain papers
    // share bibliography; others sample the whole leaf slice.
    let mut ref_rng = rng::substream(spec.seed, "synth-refs");
    for (i, plan) in plans.iter().enumerate() {
        let slice_base = plan.leaf * BG_PER_LEAF;
        let pool_base = slice_base + (i * 7) % (BG_PER_LEAF - 5);
        for (j, paper_id) in scholar_paper_ids[i].iter().enumerate() {
            let mut picked: Vec<usize> = Vec::with_capacity(3);
            while picked.len() < 3 {
                let n = if j < plan.chain_len {
                    pool_base + ref_rng.gen_range(0..5)
                } else {
                    slice_base + ref_rng.gen_range(0..BG_PER_LEAF)
                };
                if !picked.contains(&n) {
                    picked.push(n);
                }
            }
            for n in picked {
                citations.push(CitationRecord {
                    citing_id: paper_id.clone(),
                    cited_id: format!("bg{n:04}"),
                });
            }
        }
    }

    // ---- citation budgets and filler citers --------------------------------
    // Budgets are drawn per scholar from one distribution and assigned
    // largest-first along the career for everyone, so the only or
    // difference between award groups is the chain structure itself.
    let mut cite_rng = rng::substream(spec.seed, "synth-cites");
    let mut filler_count = 0usize;
    for (i, plan) in plans.iter().enumerate() {
        let mut budgets: Vec<u32> = (0..plan.n_papers)
            .map(|_| citation_budget(&mut cite_rng))
            .collect();
        budgets.sort_unstable_by(|a, b| b.cmp(a));
        for (j, paper_id) in scholar_paper_ids[i].iter().enumerate() {
            let received = self_received.get(paper_id).copied().unwrap_or(0);
            let fillers = budgets[j].saturating_sub(received);
            let year = plan.start_year + j as i32;
            for f in 0..fillers {
                let fid = format!("fl{filler_count:06}");
                filler_count += 1;
                let mut refs = vec![paper_id.clone()];
                // Half the fillers co-cite a second paper of the same
                // scholar, giving the co-citation baseline its edges.
                if cite_rng.gen_bool(0.5) {
                    let other = cite_rng.gen_range(0..plan.n_papers);
                    if scholar_paper_ids[i][other] != *paper_id {
                        refs.push(scholar_paper_ids[i][other].clone());
                    }
                }
                papers.push(PaperRecord {
                    paper_id: fid.clone(),
                    title: words(&mut cite_rng, plan.leaf, 4),
                    year: year + 1 + (f as i32 % FILLER_MAX_DELAY),
                    venue: None,
                    authors: vec![format!(
                        "fa{:03}",
                        cite_rng.gen_range(0..FILLER_AUTHOR_POOL)
                    )],
                    topic_ids: vec![leaf_topic_id(plan.leaf)],
                    abstract_text: None,
                    external_citations: None,
                });
                for r in refs {
                    citations.push(CitationRecord {
                        citing_id: fid.clone(),
                        cited_id: r,
                    });
                }
            }
        }
    }

    // ---- labels -------------------------------------------------------------
    let award_labels: Vec<AwardLabel> = plans
        .iter()
        .map(|p| AwardLabel {
            author_id: p.id.clone(),
            awarded: p.awarded as u8,
        })
        .collect();

    let mut aa_labels: Vec<AaLabel> = Vec::new();
    for k in 0..p {
        let advisor = &plans[pool[2 * k]];
        let advisee = &plans[pool[2 * k + 1]];
        let year = advisee.start_year + JOINT_PAPERS as i32 - 1;
        aa_labels.push(AaLabel {
            advisor_id: advisor.id.clone(),
            advisee_id: advisee.id.clone(),
            year,
            label: 1,
        });
        // Hard negative: the same pair reversed.
        aa_labels.push(AaLabel {
            advisor_id: advisee.id.clone(),
            advisee_id: advisor.id.clone(),
            year,
            label: 0,
        });
        // Easy negative: two scholars who never co-author.
        let a = &plans[pool[2 * p + 2 * k]];
        let b = &plans[pool[2 * p + 2 * k + 1]];
        aa_labels.push(AaLabel {
            advisor_id: a.id.clone(),
            advisee_id: b.id.clone(),
            year: a.start_year + 10,
            label: 0,
        });
    }

    let corpus = Corpus::from_records(papers, citations, contexts, topic_records(), true)?;
    Ok(SyntheticData {
        corpus,
        award_labels,
        aa_labels,
        extend_labels,
    })
}

/// Generate and write the corpus plus all label files into `dir`.
pub fn write_synthetic_corpus(spec: &SynthSpec, dir: &Path) -> Result<()> {
    let data = generate_synthetic_corpus(spec)?;
    data.corpus.save(dir)?;
    jsonl::write_jsonl(&dir.join("labels_award.jsonl"), &data.award_labels)?;
    jsonl::write_jsonl(&dir.join("labels_aa.jsonl"), &data.aa_labels)?;
    jsonl::write_jsonl(&dir.join("labels_extend.jsonl"), &data.extend_labels)?;
    Ok(())
}

/// Small random citation corpus for fuzzing graph construction: random
/// authorship, citations point backward in time except for occasional
/// same-year links that exercise cycle breaking.
pub fn random_corpus(seed: u64, n_papers: usize, n_authors: usize, cite_prob: f64) -> Corpus {
    let mut rng = rng::substream(seed, "fuzz-corpus");
    let mut papers = Vec::with_capacity(n_papers);
    for i in 0..n_papers {
        let n_auth = rng.gen_range(1..=3.min(n_authors));
        let mut authors: Vec<String> = Vec::with_capacity(n_auth);
        while authors.len() < n_auth {
            let a = format!("a{}", rng.gen_range(0..n_authors));
            if !authors.contains(&a) {
                authors.push(a);
            }
        }
        papers.push(PaperRecord {
            paper_id: format!("p{i}"),
            title: format!("paper {i}"),
            year: 2000 + rng.gen_range(0..12),
            venue: None,
            authors,
            topic_ids: vec![],
            abstract_text: None,
            external_citations: None,
        });
    }
    let mut citations = Vec::new();
    for i in 0..n_papers {
        for j in 0..n_papers {
            if i == j {
                continue;
            }
            // Backward or same-year citations only, so strict loading
            // accepts the corpus; same-year pairs may form 2-cycles.
            if papers[i].year >= papers[j].year && rng.gen_range(0.0..1.0) < cite_prob {
                citations.push(CitationRecord {
                    citing_id: format!("p{i}"),
                    cited_id: format!("p{j}"),
                });
            }
        }
    }
    Corpus::from_records(papers, citations, vec![], vec![], true)
        .expect("random corpus construction is valid by design")
}
