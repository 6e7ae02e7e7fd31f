//! Node profiling: which papers did the scholar actually drive?
//!
//! Three pieces work together. An alphabetical-authorship test flags
//! whole fields where byline order does not encode contribution (those
//! are excluded from order-based profiling). Advisor-advisee detection
//! scores ordered author pairs by combining the senior author's solo
//! experience with the share of the junior author's early major papers
//! they supervised. Finally, each paper node gets a contribution
//! probability: the scholar's harmonic byline credit, raised when a
//! top-ranked co-author is likely their advisee.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{GfError, Result};
use crate::gfgraph::GFProfile;

/// Fields whose alphabetical bias exceeds this are excluded from
/// order-based node profiling.
pub const ALPHA_BIAS_EXCLUSION: f64 = 0.13;

/// Outcome of the alphabetical-authorship hypothesis test on one field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaTestResult {
    pub n_papers: usize,
    /// Papers per author-list size k.
    pub size_counts: BTreeMap<usize, usize>,
    /// Fraction of papers whose byline is already in alphabetical order.
    pub observed_rate: f64,
    /// Expected alphabetical fraction under random byline order.
    pub null_rate: f64,
    pub bias: f64,
    pub excluded: bool,
}

/// Calibration knobs for advisor-advisee detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AAConfig {
    /// Minimum supervision window length in years (t1 - t0).
    pub s_len: i32,
    /// Minimum weighted advised output inside a window.
    pub s_adr: f64,
    /// p_AA at or above this counts as a detected pair.
    pub decision_boundary: f64,
    /// Career years before the seniority decay starts.
    pub mod_year_limit: i32,
    /// Cumulative weighted majors before the decay starts.
    pub mod_paper_limit: f64,
    /// Exponential decay rate per unit of excess.
    pub mod_decay: f64,
}

impl Default for AAConfig {
    fn default() -> Self {
        AAConfig {
            s_len: 2,
            s_adr: 1.5,
            decision_boundary: 0.5,
            mod_year_limit: 6,
            mod_paper_limit: 10.0,
            mod_decay: 0.5,
        }
    }
}

impl AAConfig {
    pub fn validate(&self) -> Result<()> {
        if self.s_len < 1 {
            return Err(GfError::InvalidArgument("s_len must be >= 1".into()));
        }
        if !(self.s_adr > 0.0) {
            return Err(GfError::InvalidArgument("s_adr must be > 0".into()));
        }
        if !(self.decision_boundary > 0.0 && self.decision_boundary < 1.0) {
            return Err(GfError::InvalidArgument(
                "decision boundary must be in (0, 1)".into(),
            ));
        }
        if self.mod_decay < 0.0 {
            return Err(GfError::InvalidArgument("decay rate must be >= 0".into()));
        }
        Ok(())
    }
}

/// Full advisor-advisee assessment for one ordered pair at one year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AAScore {
    pub advisor: String,
    pub advisee: String,
    pub at_year: i32,
    pub p_adr: f64,
    pub p_ade: f64,
    pub p_aa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_window: Option<(i32, i32)>,
}

/// Resolves author ids to (surname, given) sort keys, case-folded.
///
/// Corpora rarely ship a separate name file, so by default the table is
/// parsed from the author id itself: the last whitespace token is the
/// surname, the rest the given name. Explicit entries can override.
#[derive(Debug, Clone, Default)]
pub struct AuthorNameTable {
    map: HashMap<String, (String, String)>,
}

impl AuthorNameTable {
    pub fn from_corpus(corpus: &Corpus) -> AuthorNameTable {
        let mut table = AuthorNameTable::default();
        for id in corpus.author_ids() {
            let (surname, given) = parse_name(id);
            table.map.insert(id.to_string(), (surname, given));
        }
        table
    }

    pub fn insert(&mut self, id: &str, surname: &str, given: &str) {
        self.map.insert(
            id.to_string(),
            (surname.to_lowercase(), given.to_lowercase()),
        );
    }

    pub fn key(&self, id: &str) -> Option<&(String, String)> {
        self.map.get(id)
    }
}

/// (surname, given) from an author id, case-folded.
fn parse_name(id: &str) -> (String, String) {
    let lower = id.to_lowercase();
    let mut tokens: Vec<&str> = lower.split_whitespace().collect();
    match tokens.pop() {
        Some(surname) => (surname.to_string(), tokens.join(" ")),
        None => (String::new(), String::new()),
    }
}

const MAX_EXACT_FACTORIAL: usize = 20;

/// 1/k! with exact integer factorials up to k = 20; larger k contributes
/// nothing (the probability of a random alphabetical order is below
/// 2^-61 there).
fn inv_factorial(k: usize) -> f64 {
    if k > MAX_EXACT_FACTORIAL {
        return 0.0;
    }
    let mut f = 1u64;
    for i in 2..=k as u64 {
        f *= i;
    }
    1.0 / f as f64
}

/// Expected fraction of alphabetically ordered bylines when every order
/// is equally likely: sum over sizes k of (N_k / N) / k!.
pub fn null_alpha_rate(paper_sizes: &BTreeMap<usize, usize>) -> Result<f64> {
    let n: usize = paper_sizes.values().sum();
    if n == 0 {
        return Err(GfError::InvalidArgument("no papers in size table".into()));
    }
    if paper_sizes.contains_key(&0) {
        return Err(GfError::InvalidArgument("paper with zero authors".into()));
    }
    Ok(paper_sizes
        .iter()
        .map(|(&k, &count)| (count as f64 / n as f64) * inv_factorial(k))
        .sum())
}

/// Test a paper set for alphabetical-authorship bias. A field whose
/// observed alphabetical fraction exceeds the random-order expectation
/// by more than [`ALPHA_BIAS_EXCLUSION`] is flagged excluded.
pub fn alpha_bias_test(
    corpus: &Corpus,
    paper_idxs: &[usize],
    names: &AuthorNameTable,
) -> Result<AlphaTestResult> {
    if paper_idxs.is_empty() {
        return Err(GfError::InvalidArgument("empty paper set".into()));
    }
    let mut size_counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut alphabetical = 0usize;
    for &idx in paper_idxs {
        let authors = &corpus.paper_by_idx(idx).authors;
        *size_counts.entry(authors.len()).or_insert(0) += 1;
        let mut keys = Vec::with_capacity(authors.len());
        for a in authors {
            let key = names.key(a).ok_or_else(|| {
                GfError::InvalidArgument(format!("name table has no entry for `{a}`"))
            })?;
            keys.push(key);
        }
        // Non-strict comparison: identical names tie and still count as
        // alphabetical, matching the 1/k! null which counts one order
        // per distinct arrangement.
        if keys.windows(2).all(|w| w[0] <= w[1]) {
            alphabetical += 1;
        }
    }
    let n_papers = paper_idxs.len();
    let observed_rate = alphabetical as f64 / n_papers as f64;
    let null_rate = null_alpha_rate(&size_counts)?;
    let bias = observed_rate - null_rate;
    Ok(AlphaTestResult {
        n_papers,
        size_counts,
        observed_rate,
        null_rate,
        bias,
        excluded: bias > ALPHA_BIAS_EXCLUSION,
    })
}

/// Advisor competency: how much solo experience the candidate advisor
/// had by year `t`, relative to the advising collaboration.
///
/// With N_ak = the advisor's papers up to t and N_joint = the advising
/// papers up to t (advisee in the top 3, advisor ranked after them),
/// returns (N_ak - N_joint) / N_joint, or 0 when there are no advising
/// papers at all.
pub fn advisor_competency(corpus: &Corpus, a_k: &str, a_l: &str, t: i32) -> Result<f64> {
    for author in [a_k, a_l] {
        if !corpus.is_known_author(author) {
            return Err(GfError::UnknownAuthor(author.to_string()));
        }
    }
    let mut n_ak = 0usize;
    let mut n_joint = 0usize;
    for &idx in corpus.papers_of_author(a_k) {
        if corpus.paper_by_idx(idx).year > t {
            continue;
        }
        n_ak += 1;
        if is_advising_paper(corpus, idx, a_k, a_l) {
            n_joint += 1;
        }
    }
    if n_joint == 0 {
        return Ok(0.0);
    }
    Ok((n_ak - n_joint) as f64 / n_joint as f64)
}

/// An advising paper: the advisee within the top 3 authors and the
/// advisor ranked after them.
fn is_advising_paper(corpus: &Corpus, idx: usize, advisor: &str, advisee: &str) -> bool {
    match (
        corpus.author_order(idx, advisee),
        corpus.author_order(idx, advisor),
    ) {
        (Some(pos_l), Some(pos_k)) => pos_l <= 3 && pos_k > pos_l,
        _ => false,
    }
}

/// Harmonic byline credit: 1, 1/2, 1/3 for the top three ranks, 0 after.
fn harmonic_weight(rank: usize) -> f64 {
    match rank {
        1 => 1.0,
        2 => 0.5,
        3 => 1.0 / 3.0,
        _ => 0.0,
    }
}

/// Advisee probability: the largest fraction of the advisee's weighted
/// major output, inside any qualifying window containing `t`, that was
/// supervised by the advisor.
///
/// Windows [t0, t1] run over the advisee's active span, must contain t,
/// span at least `s_len` years, and carry at least `s_adr` weighted
/// supervised output; the supervised share of each year is damped by a
/// seniority modifier that decays exponentially once the advisee's
/// career length or cumulative weighted output stops looking junior.
/// Returns the best ratio and its window, or (0, None) when no window
/// qualifies.
pub fn advisee_prob(
    corpus: &Corpus,
    a_k: &str,
    a_l: &str,
    t: i32,
    cfg: &AAConfig,
) -> Result<(f64, Option<(i32, i32)>)> {
    cfg.validate()?;
    for author in [a_k, a_l] {
        if !corpus.is_known_author(author) {
            return Err(GfError::UnknownAuthor(author.to_string()));
        }
    }
    let advisee_papers = corpus.papers_of_author(a_l);
    let first = advisee_papers
        .iter()
        .map(|&i| corpus.paper_by_idx(i).year)
        .min()
        .unwrap();
    let last = advisee_papers
        .iter()
        .map(|&i| corpus.paper_by_idx(i).year)
        .max()
        .unwrap();
    if t < first || t > last {
        return Ok((0.0, None));
    }

    let span = (last - first + 1) as usize;
    let mut h_advisee = vec![0.0f64; span]; // weighted majors per year
    let mut h_joint = vec![0.0f64; span]; // supervised weighted majors per year
    for &idx in advisee_papers {
        let year = corpus.paper_by_idx(idx).year;
        let rank = corpus.author_order(idx, a_l).unwrap();
        let w = harmonic_weight(rank);
        let slot = (year - first) as usize;
        h_advisee[slot] += w;
        if is_advising_paper(corpus, idx, a_k, a_l) {
            h_joint[slot] += w;
        }
    }

    // Seniority modifier per year: 1 while the advisee is junior, then
    // exp(-decay * excess) with excess the larger of career years past
    // the year limit and cumulative weighted majors past the paper
    // limit (both measured through that year).
    let mut damped_joint = vec![0.0f64; span];
    let mut cumulative = 0.0f64;
    for slot in 0..span {
        cumulative += h_advisee[slot];
        let career_years = slot as i32; // years since first paper
        let excess_years = (career_years - cfg.mod_year_limit).max(0) as f64;
        let excess_papers = (cumulative - cfg.mod_paper_limit).max(0.0);
        let excess = excess_years.max(excess_papers);
        let modifier = if excess > 0.0 {
            (-cfg.mod_decay * excess).exp()
        } else {
            1.0
        };
        damped_joint[slot] = h_joint[slot] * modifier;
    }

    // Prefix sums for O(1) window evaluation.
    let prefix = |v: &[f64]| {
        let mut p = vec![0.0f64; v.len() + 1];
        for (i, x) in v.iter().enumerate() {
            p[i + 1] = p[i] + x;
        }
        p
    };
    let num_prefix = prefix(&damped_joint);
    let den_prefix = prefix(&h_advisee);

    let mut best: Option<(f64, i32, i32)> = None;
    for t0 in first..=t {
        for t1 in t.max(t0 + cfg.s_len)..=last {
            let (s0, s1) = ((t0 - first) as usize, (t1 - first) as usize);
            let numerator = num_prefix[s1 + 1] - num_prefix[s0];
            if numerator < cfg.s_adr {
                continue;
            }
            let denominator = den_prefix[s1 + 1] - den_prefix[s0];
            // Mathematically numerator <= denominator (damping only
            // shrinks), but the two prefix sums round differently, so
            // the quotient can poke one ulp above 1.
            let ratio = (numerator / denominator).min(1.0);
            let better = match best {
                None => true,
                Some((r, b0, b1)) => {
                    // Prefer the higher ratio, then the longer window,
                    // then the earlier start.
                    ratio > r
                        || (ratio == r && (t1 - t0 > b1 - b0 || (t1 - t0 == b1 - b0 && t0 < b0)))
                }
            };
            if better {
                best = Some((ratio, t0, t1));
            }
        }
    }
    Ok(match best {
        Some((ratio, t0, t1)) => (ratio, Some((t0, t1))),
        None => (0.0, None),
    })
}

/// Combine competency and supervision into the advisor-advisee rate:
/// min(1, p_adr) * min(1, p_ade).
pub fn advisor_advisee_rate(p_adr: f64, p_ade: f64) -> Result<f64> {
    if p_adr < 0.0 || p_ade < 0.0 {
        return Err(GfError::InvalidArgument(format!(
            "advisor-advisee inputs must be nonnegative, got ({p_adr}, {p_ade})"
        )));
    }
    Ok(p_adr.min(1.0) * p_ade.min(1.0))
}

/// Full assessment of one ordered pair at one year.
pub fn aa_score(
    corpus: &Corpus,
    advisor: &str,
    advisee: &str,
    t: i32,
    cfg: &AAConfig,
) -> Result<AAScore> {
    let p_adr = advisor_competency(corpus, advisor, advisee, t)?;
    let (p_ade, best_window) = advisee_prob(corpus, advisor, advisee, t, cfg)?;
    let p_aa = advisor_advisee_rate(p_adr, p_ade)?;
    Ok(AAScore {
        advisor: advisor.to_string(),
        advisee: advisee.to_string(),
        at_year: t,
        p_adr,
        p_ade,
        p_aa,
        best_window,
    })
}

/// Source of pairwise advisor-advisee rates for contribution scoring.
pub trait AaProvider {
    fn p_aa(&mut self, advisor: &str, advisee: &str, t: i32) -> Result<f64>;
}

impl<F: FnMut(&str, &str, i32) -> f64> AaProvider for F {
    fn p_aa(&mut self, advisor: &str, advisee: &str, t: i32) -> Result<f64> {
        Ok(self(advisor, advisee, t))
    }
}

/// Memoizing provider over a corpus: scores are deterministic, so the
/// cache is a plain map keyed by (advisor, advisee, year).
pub struct AaCache<'a> {
    corpus: &'a Corpus,
    cfg: AAConfig,
    cache: HashMap<(String, String, i32), f64>,
}

impl<'a> AaCache<'a> {
    pub fn new(corpus: &'a Corpus, cfg: AAConfig) -> AaCache<'a> {
        AaCache {
            corpus,
            cfg,
            cache: HashMap::new(),
        }
    }
}

impl AaProvider for AaCache<'_> {
    fn p_aa(&mut self, advisor: &str, advisee: &str, t: i32) -> Result<f64> {
        let key = (advisor.to_string(), advisee.to_string(), t);
        if let Some(&v) = self.cache.get(&key) {
            return Ok(v);
        }
        let score = aa_score(self.corpus, advisor, advisee, t, &self.cfg)?;
        self.cache.insert(key, score.p_aa);
        Ok(score.p_aa)
    }
}

/// Contribution probability of `scholar` (at byline rank k) to one
/// paper: the harmonic credit 1/k, or more when a co-author at rank l is
/// plausibly the scholar's advisee (then p_AA / l).
pub fn author_contribution<P: AaProvider>(
    corpus: &Corpus,
    paper_idx: usize,
    scholar: &str,
    aa: &mut P,
) -> Result<f64> {
    let paper = corpus.paper_by_idx(paper_idx);
    let k = corpus.author_order(paper_idx, scholar).ok_or_else(|| {
        GfError::NotAnAuthor {
            author: scholar.to_string(),
            paper: paper.paper_id.clone(),
        }
    })?;
    let mut best = 1.0 / k as f64;
    for (pos, coauthor) in paper.authors.iter().enumerate() {
        let l = pos + 1;
        if l == k {
            continue;
        }
        let p = aa.p_aa(scholar, coauthor, paper.year)? / l as f64;
        if p > best {
            best = p;
        }
    }
    Ok(best)
}

/// Fill `p_cont` on every node of a profile.
pub fn fill_contributions<P: AaProvider>(
    corpus: &Corpus,
    profile: &mut GFProfile,
    aa: &mut P,
) -> Result<()> {
    let scholar = profile.scholar_id.clone();
    for node in profile.nodes.iter_mut() {
        let idx = corpus.paper_idx(&node.paper_id)?;
        node.p_cont = Some(author_contribution(corpus, idx, &scholar, aa)?);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CitationRecord, PaperRecord};

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

    fn corpus(papers: Vec<PaperRecord>) -> Corpus {
        Corpus::from_records(papers, Vec::<CitationRecord>::new(), vec![], vec![], true).unwrap()
    }

    fn sizes(entries: &[(usize, usize)]) -> BTreeMap<usize, usize> {
        entries.iter().copied().collect()
    }

    #[test]
    fn null_rate_of_simple_distributions() {
        assert_eq!(null_alpha_rate(&sizes(&[(1, 10)])).unwrap(), 1.0);
        assert_eq!(null_alpha_rate(&sizes(&[(2, 7)])).unwrap(), 0.5);
        // (1 + 1/2 + 2/6) / 4
        let got = null_alpha_rate(&sizes(&[(1, 1), (2, 1), (3, 2)])).unwrap();
        assert!((got - 11.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn huge_author_lists_contribute_nothing() {
        assert_eq!(null_alpha_rate(&sizes(&[(25, 10)])).unwrap(), 0.0);
        let mixed = null_alpha_rate(&sizes(&[(1, 1), (30, 1)])).unwrap();
        assert_eq!(mixed, 0.5);
    }

    #[test]
    fn empty_size_table_is_an_error() {
        assert!(null_alpha_rate(&BTreeMap::new()).is_err());
    }

    #[test]
    fn observed_rate_counts_sorted_bylines() {
        let c = corpus(vec![
            // Sorted by surname (case-folded): adams < young < Zhou.
            paper("P1", 2010, &["Alice Adams", "bob young", "Carol Zhou"]),
            // zhou before adams: not alphabetical.
            paper("P2", 2011, &["Carol Zhou", "Alice Adams"]),
            // Single author is trivially alphabetical.
            paper("P3", 2012, &["Dan Quist"]),
            // Same surname: given names break the tie, alice < zed.
            paper("P4", 2013, &["alice smith", "zed smith"]),
        ]);
        let names = AuthorNameTable::from_corpus(&c);
        let idxs: Vec<usize> = (0..c.n_papers()).collect();
        let result = alpha_bias_test(&c, &idxs, &names).unwrap();
        assert_eq!(result.n_papers, 4);
        assert_eq!(result.observed_rate, 0.75);
        assert_eq!(result.size_counts, sizes(&[(1, 1), (2, 2), (3, 1)]));
        // null = (1 + 1/2 + 1/2 + 1/6) / 4
        assert!((result.null_rate - (13.0 / 6.0) / 4.0).abs() < 1e-15);
        // bias = 0.75 - 0.5417 = 0.2083 > 0.13: this little fixture is
        // heavily alphabetical and gets flagged.
        assert!(result.excluded);
    }

    #[test]
    fn shuffled_bylines_show_no_bias() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let pool: Vec<String> = (0..200)
            .map(|i| format!("given{i:03} surname{i:03}"))
            .collect();
        let mut papers = Vec::new();
        for i in 0..10_000 {
            let k = rng.gen_range(1..=4usize);
            let mut authors: Vec<&str> = Vec::new();
            while authors.len() < k {
                let a = pool[rng.gen_range(0..pool.len())].as_str();
                if !authors.contains(&a) {
                    authors.push(a);
                }
            }
            papers.push(paper(&format!("p{i}"), 2010, &authors));
        }
        let c = corpus(papers);
        let names = AuthorNameTable::from_corpus(&c);
        let idxs: Vec<usize> = (0..c.n_papers()).collect();
        let result = alpha_bias_test(&c, &idxs, &names).unwrap();
        assert!(
            result.bias.abs() < 0.02,
            "uniformly shuffled orders should sit on the null, bias = {}",
            result.bias
        );
    }

    fn mentorship_corpus() -> Corpus {
        // Advisor "adv" has 15 solo papers 1995-2009, then supervises
        // "stu" on 5 papers 2010-2014 (student first, advisor second).
        let mut papers: Vec<PaperRecord> = (0..15)
            .map(|i| paper(&format!("solo{i:02}"), 1995 + i, &["adv"]))
            .collect();
        for i in 0..5 {
            papers.push(paper(&format!("joint{i}"), 2010 + i, &["stu", "adv"]));
        }
        corpus(papers)
    }

    #[test]
    fn competency_counts_solo_versus_advising_experience() {
        let c = mentorship_corpus();
        // By 2014: N_ak = 20, N_joint = 5.
        assert_eq!(advisor_competency(&c, "adv", "stu", 2014).unwrap(), 3.0);
        // By 2011: N_ak = 17, N_joint = 2 -> 7.5.
        assert_eq!(advisor_competency(&c, "adv", "stu", 2011).unwrap(), 7.5);
    }

    #[test]
    fn competency_is_zero_without_solo_experience() {
        let c = corpus(vec![
            paper("j0", 2010, &["stu", "adv"]),
            paper("j1", 2011, &["stu", "adv"]),
        ]);
        assert_eq!(advisor_competency(&c, "adv", "stu", 2012).unwrap(), 0.0);
    }

    #[test]
    fn competency_is_zero_without_advising_papers() {
        // adv is ranked before stu, so nothing counts as advising.
        let c = corpus(vec![
            paper("solo", 2009, &["adv"]),
            paper("j0", 2010, &["adv", "stu"]),
        ]);
        assert_eq!(advisor_competency(&c, "adv", "stu", 2012).unwrap(), 0.0);
        assert!(matches!(
            advisor_competency(&c, "ghost", "stu", 2012),
            Err(GfError::UnknownAuthor(_))
        ));
    }

    #[test]
    fn fully_supervised_early_career_scores_one() {
        // Two advised first-author papers per year, 2010-2013, nothing
        // else: every window is fully supervised; the longest wins.
        let mut papers = vec![paper("a0", 2000, &["adv"])];
        for y in 2010..=2013 {
            for j in 0..2 {
                papers.push(paper(&format!("j{y}_{j}"), y, &["stu", "adv"]));
            }
        }
        let c = corpus(papers);
        let (p_ade, window) = advisee_prob(&c, "adv", "stu", 2012, &AAConfig::default()).unwrap();
        assert_eq!(p_ade, 1.0);
        assert_eq!(window, Some((2010, 2013)));
    }

    #[test]
    fn single_year_career_cannot_satisfy_the_window_length() {
        let c = corpus(vec![
            paper("a0", 2000, &["adv"]),
            paper("j0", 2010, &["stu", "adv"]),
            paper("j1", 2010, &["stu", "adv"]),
        ]);
        let (p_ade, window) = advisee_prob(&c, "adv", "stu", 2010, &AAConfig::default()).unwrap();
        assert_eq!(p_ade, 0.0);
        assert_eq!(window, None);
    }

    #[test]
    fn single_advised_paper_misses_the_output_floor() {
        // One advised paper (weight 1) < s_adr = 1.5; solo papers keep
        // the span long enough for windows to exist.
        let c = corpus(vec![
            paper("a0", 2000, &["adv"]),
            paper("j0", 2010, &["stu", "adv"]),
            paper("s1", 2011, &["stu"]),
            paper("s2", 2012, &["stu"]),
        ]);
        let (p_ade, window) = advisee_prob(&c, "adv", "stu", 2010, &AAConfig::default()).unwrap();
        assert_eq!(p_ade, 0.0);
        assert_eq!(window, None);
    }

    #[test]
    fn seniority_decay_dampens_late_career_supervision() {
        // One advised first-author paper per year, 2000-2008. Career
        // years pass the 6-year limit in 2007 (excess 1) and 2008
        // (excess 2); cumulative weighted output stays within the paper
        // limit. At t = 2008 every window ends in 2008, so the best is
        // [2000, 2008] with ratio (7 + e^-0.5 + e^-1) / 9.
        let mut papers = vec![paper("a0", 1990, &["adv"])];
        for y in 2000..=2008 {
            papers.push(paper(&format!("j{y}"), y, &["stu", "adv"]));
        }
        let c = corpus(papers);
        let (p_ade, window) = advisee_prob(&c, "adv", "stu", 2008, &AAConfig::default()).unwrap();
        let expected = (7.0 + (-0.5f64).exp() + (-1.0f64).exp()) / 9.0;
        assert!((p_ade - expected).abs() < 1e-12, "{p_ade} vs {expected}");
        assert_eq!(window, Some((2000, 2008)));
    }

    #[test]
    fn rate_combines_capped_factors() {
        assert_eq!(advisor_advisee_rate(3.0, 0.9).unwrap(), 0.9);
        assert_eq!(advisor_advisee_rate(0.0, 0.7).unwrap(), 0.0);
        assert_eq!(advisor_advisee_rate(2.0, 1.4).unwrap(), 1.0);
        assert!(advisor_advisee_rate(-0.1, 0.5).is_err());
    }

    #[test]
    fn contribution_defaults_to_harmonic_credit() {
        let c = corpus(vec![
            paper("solo", 2010, &["s"]),
            paper("third", 2011, &["a", "b", "s"]),
        ]);
        let mut no_aa = |_: &str, _: &str, _: i32| 0.0;
        assert_eq!(author_contribution(&c, 0, "s", &mut no_aa).unwrap(), 1.0);
        let got = author_contribution(&c, 1, "s", &mut no_aa).unwrap();
        assert_eq!(got, 1.0 / 3.0);
    }

    #[test]
    fn advisee_coauthor_raises_contribution() {
        let c = corpus(vec![paper("j", 2012, &["stu", "s"])]);
        // s is ranked 2nd; their advisee stu is ranked 1st with
        // p_AA = 0.8, so contribution = max(1/2, 0.8/1).
        let mut aa = |advisor: &str, advisee: &str, _t: i32| {
            if advisor == "s" && advisee == "stu" {
                0.8
            } else {
                0.0
            }
        };
        assert_eq!(author_contribution(&c, 0, "s", &mut aa).unwrap(), 0.8);
    }

    #[test]
    fn non_author_is_rejected() {
        let c = corpus(vec![paper("p", 2010, &["a"])]);
        let mut no_aa = |_: &str, _: &str, _: i32| 0.0;
        assert!(matches!(
            author_contribution(&c, 0, "s", &mut no_aa),
            Err(GfError::NotAnAuthor { .. })
        ));
    }

    #[test]
    fn end_to_end_mentorship_raises_advisor_contribution() {
        let c = mentorship_corpus();
        let cfg = AAConfig::default();
        let mut cache = AaCache::new(&c, cfg);
        // joint4 (2014): adv is 2nd author; stu (rank 1) is a strong
        // advisee by then, so contribution should beat 1/2.
        let idx = c.paper_idx("joint4").unwrap();
        let p_cont = author_contribution(&c, idx, "adv", &mut cache).unwrap();
        let score = aa_score(&c, "adv", "stu", 2014, &cfg).unwrap();
        assert!(score.p_aa > 0.5, "p_aa = {}", score.p_aa);
        assert_eq!(p_cont, score.p_aa);
        // And the cache returns identical values on repeat lookups.
        assert_eq!(cache.p_aa("adv", "stu", 2014).unwrap(), score.p_aa);
    }

    #[test]
    fn config_validation_catches_bad_values() {
        let bad = AAConfig { s_len: 0, ..AAConfig::default() };
        assert!(bad.validate().is_err());
        let bad = AAConfig { s_adr: 0.0, ..AAConfig::default() };
        assert!(bad.validate().is_err());
        let bad = AAConfig { decision_boundary: 1.0, ..AAConfig::default() };
        assert!(bad.validate().is_err());
        let bad = AAConfig { mod_decay: -1.0, ..AAConfig::default() };
        assert!(bad.validate().is_err());
    }
}
