//! Monte-Carlo experiments over independent sampler streams.
//!
//! Sample `i` of every experiment draws from stream `i` of the given seed,
//! so results do not depend on the number of worker threads.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sampling::{stream_rng, LabeledTreeSampler, Model, DEFAULT_MAX_REJECTIONS};
use crate::schaeffer::{map_vertex, phi, ROOT_VERTEX};
use crate::snake::{reroot, sample_snake, RescaleConstants};
use crate::stats::{exponent_fit, mean, variance};
use crate::tree::{first_passage_split_large, LabeledTree};

/// Runs `f` on streams `0..count` in parallel, returning results in stream
/// order.
pub fn par_streams<T, F>(seed: u64, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> Result<T> + Sync,
{
    (0..count as u64)
        .into_par_iter()
        .map(|i| f(i, &mut stream_rng(seed, i)))
        .collect()
}

/// `count` independent trees of the given model, one per stream.
pub fn sample_trees(model: Model, n: usize, count: usize, seed: u64) -> Result<Vec<LabeledTree>> {
    par_streams(seed, count, |_, rng| {
        model.sampler(n, DEFAULT_MAX_REJECTIONS)?.sample(rng)
    })
}

/// Label rescaling factor of the model at size `n`.
pub fn label_scale(model: Model, n: usize) -> f64 {
    let c = RescaleConstants::<f64>::new(n);
    match model {
        Model::Nice => c.label_scale_nice,
        Model::Plain => c.label_scale_plain,
    }
}

/// Mean graph distance from ∂ to the `n + 1` other vertices of the map.
pub fn mean_root_distance(lt: &LabeledTree) -> Result<f64> {
    let q = phi(lt)?;
    let dist = q.bfs_distances(ROOT_VERTEX);
    let total: usize = dist.iter().sum();
    Ok(total as f64 / (dist.len() - 1) as f64)
}

/// One rung of a scaling ladder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub samples: usize,
    pub mean: f64,
    pub std_err: f64,
}

/// Mean of [`mean_root_distance`] at each `n` of the ladder; rung `k`
/// uses seed `seed + k`.
pub fn scaling_ladder(model: Model, ladder: &[usize], samples: usize, seed: u64) -> Result<Vec<ScalingPoint>> {
    ladder
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let values = par_streams(seed.wrapping_add(k as u64), samples, |_, rng| {
                let lt = model.sampler(n, DEFAULT_MAX_REJECTIONS)?.sample(rng)?;
                mean_root_distance(&lt)
            })?;
            Ok(ScalingPoint {
                n,
                samples,
                mean: mean(&values)?,
                std_err: (variance(&values)? / samples as f64).sqrt(),
            })
        })
        .collect()
}

/// Log–log slope of the ladder means against `n`.
pub fn ladder_exponent(points: &[ScalingPoint]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = points.iter().map(|p| (p.n as f64, p.mean)).collect();
    exponent_fit(&pts)
}

/// Paired one-point and two-point distance samples, rescaled by the
/// model's label scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoPointSample {
    /// `d(∂, u_i)` for a uniform corner `i`.
    pub one_point: Vec<f64>,
    /// `d(u_j, u_k)` for independent uniform corners `j, k`.
    pub two_point: Vec<f64>,
}

pub fn two_point_samples(model: Model, n: usize, samples: usize, seed: u64) -> Result<TwoPointSample> {
    let scale = label_scale(model, n);
    let pairs = par_streams(seed, samples, |_, rng| {
        let lt = model.sampler(n, DEFAULT_MAX_REJECTIONS)?.sample(rng)?;
        let q = phi(&lt)?;
        let corners = lt.tree().contour_exploration();
        let mut corner_vertex = || map_vertex(corners[rng.random_range(0..2 * n)]);
        let (i, j, k) = (corner_vertex(), corner_vertex(), corner_vertex());
        let one = q.bfs_distances(ROOT_VERTEX)[i];
        let two = q.bfs_distances(j)[k];
        Ok((one as f64 * scale, two as f64 * scale))
    })?;
    Ok(TwoPointSample {
        one_point: pairs.iter().map(|p| p.0).collect(),
        two_point: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Number of degree-one vertices in each sampled map.
pub fn pendant_counts(model: Model, n: usize, samples: usize, seed: u64) -> Result<Vec<usize>> {
    par_streams(seed, samples, |_, rng| {
        let lt = model.sampler(n, DEFAULT_MAX_REJECTIONS)?.sample(rng)?;
        Ok(phi(&lt)?.pendant_vertices().len())
    })
}

/// Rescaled label at contour time `1/2`, i.e. `label_scale · V_n`.
pub fn label_midpoint_marginal(model: Model, n: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    let scale = label_scale(model, n);
    par_streams(seed, samples, |_, rng| {
        let lt = model.sampler(n, DEFAULT_MAX_REJECTIONS)?.sample(rng)?;
        let corners = lt.tree().contour_exploration();
        Ok(lt.label(corners[n]) as f64 * scale)
    })
}

/// `ov Z_{1/2}` of re-rooted snake paths at resolution `m`.
pub fn snake_midpoint_marginal(m: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    par_streams(seed, samples, |_, rng| {
        let p = reroot(&sample_snake::<f64, _>(m, rng)?);
        Ok(p.label()[m / 2])
    })
}

/// Outcome of the spatial Markov spot check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialMarkovSample {
    pub n: usize,
    pub x: i32,
    pub r: f64,
    /// Trees drawn to obtain the accepted split events.
    pub attempts: usize,
    /// Edge count of each accepted lower subtree.
    pub sizes: Vec<usize>,
    /// Minimal label of each re-based lower subtree.
    pub split_minima: Vec<i32>,
    /// Minimal label of a direct sample with labels `>= -x` and the
    /// matching size.
    pub direct_minima: Vec<i32>,
}

/// Draws trees with the leaf rule and nonnegative labels until `accepted`
/// of them carry a first-passage vertex at level `x` whose subtree has at
/// least `r n` edges, and pairs each lower subtree with a direct sample of
/// the same size conditioned on labels `>= -x`.
pub fn spatial_markov(n: usize, x: i32, r: f64, accepted: usize, seed: u64) -> Result<SpatialMarkovSample> {
    let mut upper_rng = stream_rng(seed, 0);
    let mut direct_rng = stream_rng(seed, 1);
    let mut tree_sampler = LabeledTreeSampler::wcirc(n, Some(0), DEFAULT_MAX_REJECTIONS);
    let mut direct: HashMap<usize, LabeledTreeSampler> = HashMap::new();
    let mut out = SpatialMarkovSample {
        n,
        x,
        r,
        attempts: 0,
        sizes: Vec::with_capacity(accepted),
        split_minima: Vec::with_capacity(accepted),
        direct_minima: Vec::with_capacity(accepted),
    };
    while out.sizes.len() < accepted {
        out.attempts += 1;
        let lt = tree_sampler.sample(&mut upper_rng)?;
        let Some(split) = first_passage_split_large(&lt, x, r) else {
            continue;
        };
        let m = split.lower.size();
        let sampler = direct
            .entry(m)
            .or_insert_with(|| LabeledTreeSampler::wcirc(m, Some(-x), DEFAULT_MAX_REJECTIONS));
        out.sizes.push(m);
        out.split_minima.push(split.lower.min_label());
        out.direct_minima.push(sampler.sample(&mut direct_rng)?.min_label());
    }
    Ok(out)
}
