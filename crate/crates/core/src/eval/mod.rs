//! Evaluation protocol: per-user UPL splits, NDCG@N over the ranked test
//! items, repeated over seeded samples.

mod metric;
mod split;

pub use metric::{dcg, ndcg_at_n, Gain};
pub use split::{sample_seeds, upl_split, UplSplit, UserSplit, MIN_TEST_ITEMS};

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preference::{build_tpg, derive_preferences, ItemId, RatingTable, TripartitePreferenceGraph};
use crate::projection::{build_variant, ProjectedGraph, Variant};
use crate::ranking::{personalized_pagerank, rank_items, PprConfig, RankedItem};

/// Which items are ranked for a user during evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateMode {
    /// The user's test items.
    #[default]
    Test,
    /// Every catalog item outside the user's training profile; unrated
    /// items are irrelevant.
    Catalog,
}

impl fmt::Display for CandidateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateMode::Test => "test",
            CandidateMode::Catalog => "catalog",
        })
    }
}

impl FromStr for CandidateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "test" => Ok(CandidateMode::Test),
            "catalog" => Ok(CandidateMode::Catalog),
            other => Err(Error::InvalidConfig(format!(
                "unknown candidate mode {other:?} (expected test or catalog)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub variants: Vec<Variant>,
    pub upls: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub top_n: usize,
    pub ppr: PprConfig,
    pub candidates: CandidateMode,
    pub gain: Gain,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            variants: Variant::EVALUATED.to_vec(),
            upls: vec![10],
            samples: 5,
            seed: 42,
            top_n: 10,
            ppr: PprConfig::default(),
            candidates: CandidateMode::Test,
            gain: Gain::Standard,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.ppr.validate()?;
        if self.variants.is_empty() || self.variants.contains(&Variant::Custom) {
            return Err(Error::InvalidConfig(
                "variants must be a non-empty subset of unc, pnc, rnc, grank".into(),
            ));
        }
        if self.upls.is_empty() || self.upls.contains(&0) {
            return Err(Error::InvalidConfig("UPL values must be at least 1".into()));
        }
        if self.samples == 0 || self.top_n == 0 {
            return Err(Error::InvalidConfig("samples and top-N must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleResult {
    pub seed: u64,
    pub ndcg: f64,
    pub users: usize,
    /// Users left out for lacking test items or relevant items.
    pub skipped: usize,
    /// Evaluated users without a single training preference.
    pub cold_users: usize,
    pub build_seconds: f64,
    pub seconds_per_user: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub variant: Variant,
    pub upl: usize,
    pub samples: Vec<SampleResult>,
    pub mean: f64,
    /// Sample standard deviation across samples; 0 for a single sample.
    pub std: f64,
    pub users: usize,
    pub seconds_per_user: f64,
}

impl MetricReport {
    fn from_samples(variant: Variant, upl: usize, samples: Vec<SampleResult>) -> Self {
        let values: Vec<f64> = samples.iter().map(|s| s.ndcg).collect();
        let (mean, std) = mean_std(&values);
        let users = samples.first().map_or(0, |s| s.users);
        let seconds_per_user = samples.iter().map(|s| s.seconds_per_user).sum::<f64>() / samples.len() as f64;
        MetricReport {
            variant,
            upl,
            samples,
            mean,
            std,
            users,
            seconds_per_user,
        }
    }
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// The preference graph of a split's training ratings.
pub fn training_graph(split: &UplSplit) -> Result<TripartitePreferenceGraph> {
    build_tpg(&derive_preferences(&split.train_ratings()))
}

/// Ranks the candidates for one user; users outside the roster score zero
/// everywhere, leaving the item-id order.
pub fn rank_for_user(
    g: &ProjectedGraph,
    user: &UserSplit,
    mode: CandidateMode,
    catalog: &[ItemId],
    ppr: &PprConfig,
) -> Result<Vec<RankedItem>> {
    let candidates: Vec<ItemId> = match mode {
        CandidateMode::Test => user.test.iter().map(|r| r.item).collect(),
        CandidateMode::Catalog => {
            let trained: BTreeSet<ItemId> = user.train.iter().map(|r| r.item).collect();
            catalog.iter().copied().filter(|i| !trained.contains(i)).collect()
        }
    };
    if g.roster().user_row(user.user).is_none() {
        let mut c = candidates;
        c.sort_unstable();
        return Ok(c.into_iter().map(|item| RankedItem { item, rank: 0.0 }).collect());
    }
    let scores = personalized_pagerank(g, user.user, ppr)?;
    Ok(rank_items(g, &scores, candidates))
}

struct UserOutcome {
    ndcg: Option<f64>,
    cold: bool,
    seconds: f64,
}

fn evaluate_sample(
    g: &ProjectedGraph,
    split: &UplSplit,
    catalog: &[ItemId],
    cfg: &ExperimentConfig,
) -> Result<Vec<UserOutcome>> {
    split
        .users
        .par_iter()
        .map(|u| {
            let start = Instant::now();
            let ranked = rank_for_user(g, u, cfg.candidates, catalog, &cfg.ppr)?;
            let seconds = start.elapsed().as_secs_f64();
            let test: HashMap<ItemId, f64> = u.test.iter().map(|r| (r.item, r.value)).collect();
            let list: Vec<ItemId> = ranked.iter().map(|r| r.item).collect();
            Ok(UserOutcome {
                ndcg: ndcg_at_n(&list, &test, cfg.top_n, cfg.gain),
                cold: g.roster().user_row(u.user).is_none(),
                seconds,
            })
        })
        .collect()
}

/// Runs every UPL × variant over `cfg.samples` seeded splits.
pub fn run_experiment(table: &RatingTable, cfg: &ExperimentConfig) -> Result<Vec<MetricReport>> {
    cfg.validate()?;
    let catalog: Vec<ItemId> = table.catalog().item_ids().collect();
    let seeds = sample_seeds(cfg.seed, cfg.samples);
    let mut reports = Vec::new();
    for &upl in &cfg.upls {
        let mut per_variant: Vec<Vec<SampleResult>> = vec![Vec::new(); cfg.variants.len()];
        for (k, &seed) in seeds.iter().enumerate() {
            let ctx = format!("UPL {upl}, sample {k} (seed {seed})");
            let split = upl_split(table, upl, seed).map_err(|e| e.context(ctx.clone()))?;
            let tpg = training_graph(&split).map_err(|e| e.context(ctx.clone()))?;
            for (v, &variant) in cfg.variants.iter().enumerate() {
                let ctx = format!("{ctx}, variant {variant}");
                let start = Instant::now();
                let pg = build_variant(&tpg, variant).map_err(|e| e.context(ctx.clone()))?;
                let build_seconds = start.elapsed().as_secs_f64();
                let outcomes = evaluate_sample(&pg, &split, &catalog, cfg).map_err(|e| e.context(ctx.clone()))?;
                let scored: Vec<f64> = outcomes.iter().filter_map(|o| o.ndcg).collect();
                let skipped = outcomes.len() - scored.len();
                if skipped > 0 {
                    warn!("{ctx}: skipped {skipped} users without enough relevant test items");
                }
                if scored.is_empty() {
                    return Err(Error::InvalidConfig(format!("{ctx}: no user could be evaluated")));
                }
                let ndcg = scored.iter().sum::<f64>() / scored.len() as f64;
                let seconds_per_user = outcomes.iter().map(|o| o.seconds).sum::<f64>() / outcomes.len() as f64;
                info!(
                    "{ctx}: NDCG@{} = {ndcg:.4} over {} users, build {build_seconds:.2}s, {seconds_per_user:.4}s/user",
                    cfg.top_n,
                    scored.len()
                );
                per_variant[v].push(SampleResult {
                    seed,
                    ndcg,
                    users: scored.len(),
                    skipped,
                    cold_users: outcomes.iter().filter(|o| o.cold).count(),
                    build_seconds,
                    seconds_per_user,
                });
            }
        }
        for (v, samples) in per_variant.into_iter().enumerate() {
            reports.push(MetricReport::from_samples(cfg.variants[v], upl, samples));
        }
    }
    Ok(reports)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeEntry {
    pub variant: Variant,
    pub users: usize,
    pub edges: usize,
    pub build_seconds: f64,
    pub seconds_per_user: f64,
}

/// Times per-user recommendation sequentially, variant by variant, on
/// one split, over at most `max_users` eligible users.
pub fn runtime_ordering(
    table: &RatingTable,
    upl: usize,
    seed: u64,
    variants: &[Variant],
    max_users: usize,
    ppr: &PprConfig,
) -> Result<Vec<RuntimeEntry>> {
    let split = upl_split(table, upl, seed)?;
    let tpg = training_graph(&split)?;
    let users = &split.users[..split.users.len().min(max_users)];
    let mut out = Vec::new();
    for &variant in variants {
        let start = Instant::now();
        let pg = build_variant(&tpg, variant)?;
        let build_seconds = start.elapsed().as_secs_f64();
        let start = Instant::now();
        for u in users {
            rank_for_user(&pg, u, CandidateMode::Test, &[], ppr)?;
        }
        let seconds_per_user = start.elapsed().as_secs_f64() / users.len().max(1) as f64;
        info!("UPL {upl}, {variant}: {} edges, {seconds_per_user:.5}s/user", pg.edge_count());
        out.push(RuntimeEntry {
            variant,
            users: users.len(),
            edges: pg.edge_count(),
            build_seconds,
            seconds_per_user,
        });
    }
    Ok(out)
}
