//! Exact samplers for labeled trees and brute-force enumerators.
//!
//! Trees are drawn as Galton–Watson trees conditioned on their edge count:
//! an i.i.d. offspring sequence of length `n + 1` conditioned to sum to `n`
//! is rotated into the unique cyclic shift that is a valid preorder child
//! sequence (cycle lemma). Label constraints are then imposed by rejecting
//! the whole (tree, labels) pair.

mod enumerate;
mod law;
mod sequence;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{LabeledTree, PlaneTree};

pub use enumerate::{enumerate, enumerate_trees, TreePredicate, MAX_ENUMERATION_N};
pub use law::OffspringLaw;
pub use sequence::{rotate_to_tree, ConditionedSequence, SequenceLaw};

/// Default cap on whole-pair redraws per accepted sample.
pub const DEFAULT_MAX_REJECTIONS: u64 = 1_000_000;

/// Seed, stream and budget for one sampler run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n: usize,
    pub seed: u64,
    pub max_rejections: u64,
    pub stream_id: u64,
}

impl SamplerConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            max_rejections: DEFAULT_MAX_REJECTIONS,
            stream_id: 0,
        }
    }

    pub fn with_stream(mut self, stream_id: u64) -> Self {
        self.stream_id = stream_id;
        self
    }

    pub fn with_max_rejections(mut self, cap: u64) -> Self {
        self.max_rejections = cap;
        self
    }

    /// The generator for this `(seed, stream_id)` pair.
    pub fn rng(&self) -> ChaCha8Rng {
        stream_rng(self.seed, self.stream_id)
    }
}

/// Independent, reproducible generator keyed by `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The two random map models: nice quadrangulations and all
/// quadrangulations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Nice,
    Plain,
}

impl Model {
    pub fn sampler(self, n: usize, max_rejections: u64) -> Result<LabeledTreeSampler> {
        match self {
            Model::Nice => LabeledTreeSampler::nice(n, max_rejections),
            Model::Plain => LabeledTreeSampler::plain(n, max_rejections),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::Nice => "nice",
            Model::Plain => "plain",
        }
    }
}

/// Uniform draw from `{-1, 0, 1}`.
fn increment<R: Rng + ?Sized>(rng: &mut R) -> i32 {
    rng.random_range(0..3) - 1
}

/// Exact sample of a μ-Galton–Watson tree conditioned on `n` edges.
pub fn sample_gw_conditioned<R: Rng + ?Sized>(
    n: usize,
    law: &OffspringLaw<f64>,
    rng: &mut R,
) -> PlaneTree {
    let seq = ConditionedSequence::new(n, SequenceLaw::Critical(*law));
    let mut counts = Vec::new();
    seq.sample_tree_into(rng, &mut counts);
    PlaneTree::from_child_counts(counts).expect("cycle lemma yields a valid tree")
}

/// The same law as [`sample_gw_conditioned`], obtained by redrawing all
/// `n + 1` offspring counts until they sum to `n`.
pub fn sample_gw_conditioned_by_rejection<R: Rng + ?Sized>(
    n: usize,
    law: &OffspringLaw<f64>,
    rng: &mut R,
    max_rejections: u64,
) -> Result<PlaneTree> {
    let p0 = law.pmf(0);
    let log_beta = law.beta().ln();
    let mut counts = Vec::with_capacity(n + 1);
    for _ in 0..max_rejections {
        counts.clear();
        let mut sum = 0;
        for _ in 0..=n {
            let k = if rng.random::<f64>() < p0 {
                0
            } else {
                // 1 + Geometric(1 - β) by inversion.
                let u: f64 = 1.0 - rng.random::<f64>();
                1 + (u.ln() / log_beta).floor() as usize
            };
            sum += k;
            if sum > n {
                break;
            }
            counts.push(k);
        }
        if counts.len() == n + 1 && sum == n {
            rotate_to_tree(&mut counts);
            return PlaneTree::from_child_counts(counts);
        }
    }
    Err(Error::RejectionBudgetExceeded {
        attempts: max_rejections,
    })
}

/// Uniform increments on every edge in preorder, then edges into non-root
/// leaves overwritten to `-1`.
pub fn attach_labels_wcirc<R: Rng + ?Sized>(tree: &PlaneTree, rng: &mut R) -> LabeledTree {
    let mut labels = vec![0; tree.vertex_count()];
    for v in 1..tree.vertex_count() {
        let p = tree.parent(v).expect("non-root");
        let inc = increment(rng);
        labels[v] = if tree.is_nonroot_leaf(v) { labels[p] - 1 } else { labels[p] + inc };
    }
    LabeledTree::new(tree.clone(), labels).expect("increments lie in {-1,0,1}")
}

/// Uniform increments on every edge.
pub fn attach_uniform_labels<R: Rng + ?Sized>(tree: &PlaneTree, rng: &mut R) -> LabeledTree {
    let mut labels = vec![0; tree.vertex_count()];
    for v in 1..tree.vertex_count() {
        labels[v] = labels[tree.parent(v).expect("non-root")] + increment(rng);
    }
    LabeledTree::new(tree.clone(), labels).expect("increments lie in {-1,0,1}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Acceptance {
    /// Leaf rule, nonnegative labels and the root condition.
    Nice,
    /// Nonnegative labels on a uniform plane tree.
    Plain,
    /// Leaf rule and labels `>= floor`.
    Wcirc { floor: i32 },
}

/// Reusable exact sampler of labeled trees with `n` edges.
#[derive(Clone, Debug)]
pub struct LabeledTreeSampler {
    acceptance: Acceptance,
    sequence: ConditionedSequence,
    max_rejections: u64,
    counts: Vec<usize>,
    labels: Vec<i32>,
    stack: Vec<(usize, usize)>,
    attempts: u64,
}

impl LabeledTreeSampler {
    fn build(n: usize, acceptance: Acceptance, law: SequenceLaw, max_rejections: u64) -> Self {
        Self {
            acceptance,
            sequence: ConditionedSequence::new(n, law),
            max_rejections,
            counts: Vec::with_capacity(n + 1),
            labels: Vec::with_capacity(n + 1),
            stack: Vec::new(),
            attempts: 0,
        }
    }

    /// Uniform over trees of nice quadrangulations with `n` faces.
    pub fn nice(n: usize, max_rejections: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition(format!(
                "nice quadrangulations with {n} faces do not exist; need n >= 2"
            )));
        }
        Ok(Self::build(
            n,
            Acceptance::Nice,
            SequenceLaw::Critical(OffspringLaw::new()),
            max_rejections,
        ))
    }

    /// Uniform over well-labeled trees with `n >= 1` edges.
    pub fn plain(n: usize, max_rejections: u64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Precondition("plain sampler needs n >= 1".into()));
        }
        Ok(Self::build(n, Acceptance::Plain, SequenceLaw::Geometric, max_rejections))
    }

    /// Uniform over trees satisfying the leaf rule whose labels are all at
    /// least `floor` (`None` for no constraint).
    pub fn wcirc(n: usize, floor: Option<i32>, max_rejections: u64) -> Self {
        Self::build(
            n,
            Acceptance::Wcirc {
                floor: floor.unwrap_or(i32::MIN),
            },
            SequenceLaw::Critical(OffspringLaw::new()),
            max_rejections,
        )
    }

    pub fn n(&self) -> usize {
        self.sequence.n()
    }

    /// Total attempts made by this sampler so far.
    pub fn attempts(&self) -> u64 {
        self.attempts
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<LabeledTree> {
        for _ in 0..self.max_rejections {
            self.attempts += 1;
            if self.try_sample(rng) {
                return LabeledTree::from_parts(self.counts.clone(), self.labels.clone());
            }
        }
        Err(Error::RejectionBudgetExceeded {
            attempts: self.max_rejections,
        })
    }

    /// Draws the tree in preorder and its labels alongside, stopping at the
    /// first label below the floor.
    fn try_sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let (leaf_rule, floor) = match self.acceptance {
            Acceptance::Nice => (true, 0),
            Acceptance::Plain => (false, 0),
            Acceptance::Wcirc { floor } => (true, floor),
        };
        let counts = &mut self.counts;
        let labels = &mut self.labels;
        let stack = &mut self.stack;
        let mut walk = self.sequence.walk(rng);
        counts.clear();
        labels.clear();
        stack.clear();

        let k_root = walk.next_count(rng);
        counts.push(k_root);
        labels.push(0);
        stack.push((0, k_root));
        while !walk.is_done() {
            let k = walk.next_count(rng);
            while stack.last().is_some_and(|&(_, left)| left == 0) {
                stack.pop();
            }
            let top = stack.last_mut().expect("walk yields a valid preorder sequence");
            top.1 -= 1;
            let parent_label = labels[top.0];
            let inc = increment(rng);
            let label = if leaf_rule && k == 0 { parent_label - 1 } else { parent_label + inc };
            if label < floor {
                return false;
            }
            stack.push((counts.len(), k));
            counts.push(k);
            labels.push(label);
        }
        if self.acceptance == Acceptance::Nice {
            return k_root >= 2 || (k_root == 1 && labels[1] == 1 && labels[1..].contains(&0));
        }
        true
    }
}

/// Uniform sample from the trees of nice quadrangulations with `cfg.n`
/// faces.
pub fn sample_nice_tree(cfg: &SamplerConfig) -> Result<LabeledTree> {
    LabeledTreeSampler::nice(cfg.n, cfg.max_rejections)?.sample(&mut cfg.rng())
}

/// Uniform sample from the well-labeled trees with `cfg.n` edges.
pub fn sample_plain_tree(cfg: &SamplerConfig) -> Result<LabeledTree> {
    LabeledTreeSampler::plain(cfg.n, cfg.max_rejections)?.sample(&mut cfg.rng())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::chi_square_p_value;
    use std::collections::HashMap;

    fn frequency_test<F>(categories: &[LabeledTree], samples: usize, mut draw: F) -> f64
    where
        F: FnMut() -> LabeledTree,
    {
        let index: HashMap<&LabeledTree, usize> =
            categories.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut counts = vec![0u64; categories.len()];
        for _ in 0..samples {
            let t = draw();
            counts[*index.get(&t).expect("sample lies in the enumerated class")] += 1;
        }
        let expected = vec![1.0 / categories.len() as f64; categories.len()];
        chi_square_p_value(&counts, &expected).unwrap()
    }

    #[test]
    fn n1_gw_is_single_edge() {
        let law = OffspringLaw::<f64>::new();
        let mut rng = stream_rng(1, 0);
        for _ in 0..20 {
            assert_eq!(sample_gw_conditioned(1, &law, &mut rng).child_counts(), &[1, 0]);
        }
    }

    #[test]
    fn n2_path_to_cherry_ratio_is_three_to_one() {
        let law = OffspringLaw::<f64>::new();
        // μ(1)²μ(0) : μ(2)μ(0)² = β²/z³·(1/3) : β²/z³·(1/9) = 3 : 1
        let ratio = (law.pmf(1).powi(2) * law.pmf(0)) / (law.pmf(2) * law.pmf(0).powi(2));
        assert!((ratio - 3.0).abs() < 1e-12);

        let mut rng = stream_rng(2, 0);
        let samples = 100_000;
        let paths = (0..samples)
            .filter(|_| sample_gw_conditioned(2, &law, &mut rng).child_counts() == [1, 1, 0])
            .count();
        let p = paths as f64 / samples as f64;
        let sd = (0.75f64 * 0.25 / samples as f64).sqrt();
        assert!((p - 0.75).abs() < 3.0 * sd, "path frequency {p}");
    }

    #[test]
    fn n3_gw_matches_product_weights() {
        let law = OffspringLaw::<f64>::new();
        let trees = enumerate_trees(3);
        let weights: Vec<f64> = trees
            .iter()
            .map(|t| t.child_counts().iter().map(|&k| law.pmf(k)).product())
            .collect();
        let total: f64 = weights.iter().sum();
        let expected: Vec<f64> = weights.iter().map(|w| w / total).collect();

        for by_rejection in [false, true] {
            let mut rng = stream_rng(3, by_rejection as u64);
            let mut counts = vec![0u64; trees.len()];
            for _ in 0..100_000 {
                let t = if by_rejection {
                    sample_gw_conditioned_by_rejection(3, &law, &mut rng, 10_000).unwrap()
                } else {
                    sample_gw_conditioned(3, &law, &mut rng)
                };
                counts[trees.iter().position(|s| *s == t).unwrap()] += 1;
            }
            for (c, e) in counts.iter().zip(&expected) {
                let p = *c as f64 / 100_000.0;
                let sd = (e * (1.0 - e) / 100_000.0).sqrt();
                assert!((p - e).abs() < 3.5 * sd, "{p} vs {e}");
            }
        }
    }

    #[test]
    fn wcirc_labels_on_small_trees() {
        let mut rng = stream_rng(4, 0);
        let edge = PlaneTree::from_child_counts(vec![1, 0]).unwrap();
        for _ in 0..10 {
            assert_eq!(attach_labels_wcirc(&edge, &mut rng).labels(), &[0, -1]);
        }
        let cherry = PlaneTree::from_child_counts(vec![2, 0, 0]).unwrap();
        assert_eq!(attach_labels_wcirc(&cherry, &mut rng).labels(), &[0, -1, -1]);

        let path = PlaneTree::from_child_counts(vec![1, 1, 0]).unwrap();
        let mut seen = HashMap::new();
        for _ in 0..30_000 {
            *seen.entry(attach_labels_wcirc(&path, &mut rng).labels().to_vec()).or_insert(0) += 1;
        }
        assert_eq!(seen.len(), 3);
        for (labels, count) in seen {
            assert_eq!(labels[2], labels[1] - 1);
            assert!((count as f64 / 30_000.0 - 1.0 / 3.0).abs() < 0.015);
        }
    }

    #[test]
    fn nice_sampler_n2_is_deterministic_shape() {
        let mut sampler = LabeledTreeSampler::nice(2, 10_000).unwrap();
        let mut rng = stream_rng(5, 0);
        for _ in 0..50 {
            let t = sampler.sample(&mut rng).unwrap();
            assert_eq!(t.tree().child_counts(), &[1, 1, 0]);
            assert_eq!(t.labels(), &[0, 1, 0]);
        }
    }

    #[test]
    fn nice_sampler_rejects_n1() {
        assert!(matches!(
            sample_nice_tree(&SamplerConfig::new(1, 0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn nice_sampler_uniform_n3() {
        let nice = enumerate(3, |t| t.classify().nice_eq).unwrap();
        let mut sampler = LabeledTreeSampler::nice(3, 100_000).unwrap();
        let mut rng = stream_rng(6, 0);
        let p = frequency_test(&nice, 100_000, || sampler.sample(&mut rng).unwrap());
        assert!(p > 0.01, "p = {p}");
    }

    #[test]
    fn plain_sampler_n1_and_n2() {
        let mut sampler = LabeledTreeSampler::plain(1, 1000).unwrap();
        let mut rng = stream_rng(7, 0);
        let ones = (0..20_000)
            .filter(|_| sampler.sample(&mut rng).unwrap().labels()[1] == 1)
            .count();
        assert!((ones as f64 / 20_000.0 - 0.5).abs() < 0.015);

        let plus = enumerate(2, |t| t.classify().in_wplus).unwrap();
        assert_eq!(plus.len(), 9);
        let mut sampler = LabeledTreeSampler::plain(2, 1000).unwrap();
        let mut paths = 0;
        let p = frequency_test(&plus, 90_000, || {
            let t = sampler.sample(&mut rng).unwrap();
            paths += (t.tree().child_counts() == [1, 1, 0]) as usize;
            t
        });
        assert!(p > 0.01, "p = {p}");
        // Paths carry 5 nonnegative labelings, cherries 4.
        assert!((paths as f64 / 90_000.0 - 5.0 / 9.0).abs() < 0.01);
    }

    #[test]
    fn whole_pair_rejection_matches_enumeration_marginals() {
        // Under the nice sampler the tree shape must follow the number of
        // nice labelings per shape, not the unconditioned GW weights.
        let nice = enumerate(4, |t| t.classify().nice_eq).unwrap();
        let mut per_shape: HashMap<Vec<usize>, usize> = HashMap::new();
        for t in &nice {
            *per_shape.entry(t.tree().child_counts().to_vec()).or_default() += 1;
        }
        let mut sampler = LabeledTreeSampler::nice(4, 100_000).unwrap();
        let mut rng = stream_rng(8, 0);
        let samples = 60_000;
        let mut observed: HashMap<Vec<usize>, usize> = HashMap::new();
        for _ in 0..samples {
            let t = sampler.sample(&mut rng).unwrap();
            *observed.entry(t.tree().child_counts().to_vec()).or_default() += 1;
        }
        for (shape, count) in &per_shape {
            let e = *count as f64 / nice.len() as f64;
            let p = *observed.get(shape).unwrap_or(&0) as f64 / samples as f64;
            let sd = (e * (1.0 - e) / samples as f64).sqrt();
            assert!((p - e).abs() < 4.0 * sd, "shape {shape:?}: {p} vs {e}");
        }
    }

    #[test]
    fn determinism_by_seed_and_stream() {
        let a: Vec<_> = {
            let mut s = LabeledTreeSampler::nice(30, 1_000_000).unwrap();
            let mut rng = SamplerConfig::new(30, 11).with_stream(3).rng();
            (0..5).map(|_| s.sample(&mut rng).unwrap()).collect()
        };
        let b: Vec<_> = {
            let mut s = LabeledTreeSampler::nice(30, 1_000_000).unwrap();
            let mut rng = SamplerConfig::new(30, 11).with_stream(3).rng();
            (0..5).map(|_| s.sample(&mut rng).unwrap()).collect()
        };
        assert_eq!(a, b);
        let c = sample_nice_tree(&SamplerConfig::new(30, 11).with_stream(4)).unwrap();
        assert_ne!(a[0], c);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mut sampler = LabeledTreeSampler::nice(400, 1).unwrap();
        let mut rng = stream_rng(9, 0);
        let failures = (0..50).filter(|_| sampler.sample(&mut rng).is_err()).count();
        assert!(failures > 0);
    }

    #[test]
    fn floor_constrained_wcirc_respects_floor() {
        let mut sampler = LabeledTreeSampler::wcirc(50, Some(-2), 1_000_000);
        let mut rng = stream_rng(10, 0);
        for _ in 0..50 {
            let t = sampler.sample(&mut rng).unwrap();
            assert!(t.min_label() >= -2);
            assert!(t.classify().in_wcirc);
        }
    }
}
