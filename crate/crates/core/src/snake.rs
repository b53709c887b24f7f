//! Discrete reference simulator for the Brownian excursion with Gaussian
//! labels, the conditioned and re-rooted pairs, and grid approximations of
//! the distances `D°` and `D*`.
//!
//! A raw path of resolution `m` is the contour of a uniform plane tree with
//! `m / 2` edges, scaled by `m^{-1/2}`, and labels obtained by summing
//! independent centered Gaussians of variance `m^{-1/2}` along tree edges.
//! Given the excursion, `z_s - z_t` is then Gaussian with variance exactly
//! `e_s + e_t - 2 min_{[s∧t, s∨t]} e`.

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{ConditionedSequence, SequenceLaw};
use crate::scalar::Scalar;
use crate::tree::PlaneTree;

/// How a [`SnakePath`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PathKind<T> {
    Raw,
    /// Conditioned on `min z > -r`.
    Conditioned(T),
    Rerooted,
}

/// Excursion and label sequences on the grid `t = i / m`, `i = 0..=m`.
#[derive(Clone, Debug, PartialEq)]
pub struct SnakePath<T> {
    excursion: Vec<T>,
    label: Vec<T>,
    kind: PathKind<T>,
}

impl<T: Scalar> SnakePath<T> {
    pub fn new(excursion: Vec<T>, label: Vec<T>, kind: PathKind<T>) -> Result<Self> {
        let path = Self {
            excursion,
            label,
            kind,
        };
        path.check_invariants()?;
        Ok(path)
    }

    pub fn m(&self) -> usize {
        self.excursion.len() - 1
    }

    pub fn excursion(&self) -> &[T] {
        &self.excursion
    }

    pub fn label(&self) -> &[T] {
        &self.label
    }

    pub fn kind(&self) -> PathKind<T> {
        self.kind
    }

    /// Label at time `t ∈ [0, 1]`, linearly interpolated.
    pub fn label_at(&self, t: T) -> T {
        interpolate(&self.label, t)
    }

    pub fn excursion_at(&self, t: T) -> T {
        interpolate(&self.excursion, t)
    }

    pub fn min_label(&self) -> T {
        self.label.iter().cloned().fold(T::infinity(), T::min)
    }

    /// Index of the minimal label, smallest index on ties.
    pub fn argmin_label(&self) -> usize {
        let mut best = 0;
        for (i, &z) in self.label.iter().enumerate() {
            if z < self.label[best] {
                best = i;
            }
        }
        best
    }

    /// Checks the invariants of this path's kind.
    pub fn check_invariants(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Precondition(msg));
        let e = &self.excursion;
        let z = &self.label;
        if e.len() < 3 || e.len() != z.len() {
            return bad(format!("path lengths {} and {}", e.len(), z.len()));
        }
        let m = e.len() - 1;
        if e[0] != T::zero() || e[m] != T::zero() {
            return bad("excursion must start and end at 0".into());
        }
        if e.iter().any(|&x| x < T::zero()) {
            return bad("excursion must be nonnegative".into());
        }
        if z[0] != T::zero() {
            return bad("labels must start at 0".into());
        }
        match self.kind {
            PathKind::Raw => {}
            PathKind::Conditioned(r) => {
                if self.min_label() <= -r {
                    return bad(format!("min label {} is not above {}", self.min_label(), -r));
                }
            }
            PathKind::Rerooted => {
                if z.iter().any(|&x| x < T::zero()) {
                    return bad("re-rooted labels must be nonnegative".into());
                }
            }
        }
        Ok(())
    }

    /// CSV rows `t,e,z`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "e", "z"])?;
        let m = T::of_usize(self.m());
        for (i, (e, z)) in self.excursion.iter().zip(&self.label).enumerate() {
            let t = T::of_usize(i) / m;
            w.write_record([t.to_string(), e.to_string(), z.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn interpolate<T: Scalar>(values: &[T], t: T) -> T {
    let m = values.len() - 1;
    let x = t.max(T::zero()).min(T::one()) * T::of_usize(m);
    let i = x.floor().to_usize().unwrap_or(0).min(m);
    if i == m {
        return values[m];
    }
    let frac = x - T::of_usize(i);
    values[i] + (values[i + 1] - values[i]) * frac
}

/// Raw snake path at resolution `m` (even, `>= 2`).
pub fn sample_snake<T: Scalar, R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<SnakePath<T>> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::Precondition(format!("snake resolution {m} must be even and >= 2")));
    }
    let edges = m / 2;
    let mut counts = Vec::with_capacity(edges + 1);
    ConditionedSequence::new(edges, SequenceLaw::Geometric).sample_tree_into(rng, &mut counts);
    let tree = PlaneTree::from_child_counts(counts)?;

    let sd = (m as f64).powf(-0.25);
    let mut vertex_label = vec![0.0f64; edges + 1];
    for v in 1..=edges {
        let g: f64 = rng.sample(StandardNormal);
        vertex_label[v] = vertex_label[tree.parent(v).expect("non-root")] + sd * g;
    }
    let scale = (m as f64).powf(-0.5);
    let walk = tree.contour_exploration();
    let excursion = walk.iter().map(|&v| T::of(tree.depth(v) as f64 * scale)).collect();
    let label = walk.iter().map(|&v| T::of(vertex_label[v])).collect();
    Ok(SnakePath {
        excursion,
        label,
        kind: PathKind::Raw,
    })
}

/// Raw paths redrawn until `min z > -r`.
pub fn condition_min<T: Scalar, R: Rng + ?Sized>(
    m: usize,
    r: T,
    rng: &mut R,
    max_rejections: u64,
) -> Result<SnakePath<T>> {
    if r.is_nan() || r <= T::zero() {
        return Err(Error::Precondition(format!("conditioning level {r} must be positive")));
    }
    for _ in 0..max_rejections {
        let mut p = sample_snake::<T, R>(m, rng)?;
        if p.min_label() > -r {
            p.kind = PathKind::Conditioned(r);
            return Ok(p);
        }
    }
    Err(Error::RejectionBudgetExceeded {
        attempts: max_rejections,
    })
}

/// Re-reads the pair from the time `s*` of the minimal label:
/// `ov e_t = e_{s*} + e_{s*⊕t} - 2 min e` between the two times and
/// `ov z_t = z_{s*⊕t} - z_{s*}`.
pub fn reroot<T: Scalar>(p: &SnakePath<T>) -> SnakePath<T> {
    let m = p.m();
    let e = &p.excursion;
    let z = &p.label;
    let s = p.argmin_label();

    // min e over [j, s] for j <= s, and over [s, j] for j >= s.
    let mut min_to = vec![T::zero(); m + 1];
    min_to[s] = e[s];
    for j in (0..s).rev() {
        min_to[j] = min_to[j + 1].min(e[j]);
    }
    for j in s + 1..=m {
        min_to[j] = min_to[j - 1].min(e[j]);
    }

    let mut excursion = Vec::with_capacity(m + 1);
    let mut label = Vec::with_capacity(m + 1);
    for t in 0..=m {
        let j = (s + t) % m;
        let two = T::of(2.0);
        let d = e[s] + e[j] - two * min_to[j];
        excursion.push(d.max(T::zero()));
        label.push((z[j] - z[s]).max(T::zero()));
    }
    SnakePath {
        excursion,
        label,
        kind: PathKind::Rerooted,
    }
}

/// `D°(s, t) = z_s + z_t - 2 min_{[s∧t, s∨t]} z` on grid indices.
pub fn d_circ<T: Scalar>(p: &SnakePath<T>, s: usize, t: usize) -> T {
    let z = &p.label;
    let (lo, hi) = (s.min(t), s.max(t));
    let min = z[lo..=hi].iter().cloned().fold(T::infinity(), T::min);
    z[s] + z[t] - T::of(2.0) * min
}

/// `D°` on a set of grid indices and its min-plus closure `D*`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceGrid<T> {
    pub indices: Vec<usize>,
    pub times: Vec<T>,
    pub d_circ: Vec<Vec<T>>,
    pub d_star: Vec<Vec<T>>,
}

impl<T: Scalar> DistanceGrid<T> {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Largest violation of `d_star[i][k] <= d_star[i][j] + d_star[j][k]`.
    pub fn triangle_defect(&self) -> T {
        let g = self.len();
        let mut worst = T::zero();
        for i in 0..g {
            for j in 0..g {
                for k in 0..g {
                    let gap = self.d_star[i][k] - (self.d_star[i][j] + self.d_star[j][k]);
                    worst = worst.max(gap);
                }
            }
        }
        worst
    }

    /// CSV rows `i,j,s,t,d_circ,d_star` over all grid pairs.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i", "j", "s", "t", "d_circ", "d_star"])?;
        for i in 0..self.len() {
            for j in 0..self.len() {
                w.write_record([
                    i.to_string(),
                    j.to_string(),
                    self.times[i].to_string(),
                    self.times[j].to_string(),
                    self.d_circ[i][j].to_string(),
                    self.d_star[i][j].to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Builds the `D°` matrix on `grid` and closes it under min-plus products.
#[allow(clippy::needless_range_loop)]
pub fn d_star_grid<T: Scalar>(p: &SnakePath<T>, grid: &[usize]) -> Result<DistanceGrid<T>> {
    let m = p.m();
    if let Some(&bad) = grid.iter().find(|&&i| i > m) {
        return Err(Error::Precondition(format!("grid index {bad} exceeds {m}")));
    }
    let g = grid.len();
    let mut circ = vec![vec![T::zero(); g]; g];
    for a in 0..g {
        for b in a + 1..g {
            let d = d_circ(p, grid[a], grid[b]);
            circ[a][b] = d;
            circ[b][a] = d;
        }
    }
    let mut star = circ.clone();
    for k in 0..g {
        for i in 0..g {
            let dik = star[i][k];
            for j in 0..g {
                let via = dik + star[k][j];
                if via < star[i][j] {
                    star[i][j] = via;
                }
            }
        }
    }
    Ok(DistanceGrid {
        indices: grid.to_vec(),
        times: grid.iter().map(|&i| T::of_usize(i) / T::of_usize(m)).collect(),
        d_circ: circ,
        d_star: star,
    })
}

/// Scaling constants that turn contour and label functions of trees with
/// `n` edges into their continuum limits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaleConstants<T> {
    pub n: usize,
    pub contour_scale: T,
    pub label_scale_nice: T,
    pub label_scale_plain: T,
    pub kappa: T,
}

impl<T: Scalar> RescaleConstants<T> {
    pub fn new(n: usize) -> Self {
        let nn = T::of_usize(n);
        let quarter = T::of(0.25);
        Self {
            n,
            contour_scale: T::of(12.0).powf(-quarter) * nn.powf(-T::of(0.5)),
            label_scale_nice: T::of(0.75).powf(T::of(0.375)) * nn.powf(-quarter),
            label_scale_plain: T::of(9.0 / 8.0).powf(quarter) * nn.powf(-quarter),
            kappa: T::of(2.0) / T::of(3.0).sqrt() * Self::sigma().powf(-T::of(0.5)) * nn.powf(quarter),
        }
    }

    /// Standard deviation of the critical offspring law, `(4/3)^{1/4}`.
    pub fn sigma() -> T {
        (T::of(2.0) / T::of(3.0).sqrt()).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::stream_rng;
    use crate::stats::{ks_statistic, mean, variance};

    #[test]
    fn raw_path_endpoints() {
        let mut rng = stream_rng(1, 0);
        for m in [2, 4, 64] {
            let p = sample_snake::<f64, _>(m, &mut rng).unwrap();
            assert_eq!(p.m(), m);
            assert_eq!(p.excursion()[0], 0.0);
            assert_eq!(p.excursion()[m], 0.0);
            assert_eq!(p.label()[0], 0.0);
            p.check_invariants().unwrap();
        }
        assert!(sample_snake::<f64, _>(3, &mut rng).is_err());
    }

    #[test]
    fn contour_steps_are_unit_scaled() {
        let mut rng = stream_rng(2, 0);
        let p = sample_snake::<f64, _>(100, &mut rng).unwrap();
        for w in p.excursion().windows(2) {
            assert!(((w[1] - w[0]).abs() - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn midpoint_label_is_centered_with_variance_of_excursion() {
        let mut rng = stream_rng(3, 0);
        let m = 4096;
        let (mut zs, mut es) = (Vec::new(), Vec::new());
        for _ in 0..10_000 {
            let p = sample_snake::<f64, _>(m, &mut rng).unwrap();
            zs.push(p.label()[m / 2]);
            es.push(p.excursion()[m / 2]);
        }
        let var = variance(&zs).unwrap();
        let sd_mean = (var / zs.len() as f64).sqrt();
        assert!(mean(&zs).unwrap().abs() < 3.0 * sd_mean);
        let target = mean(&es).unwrap();
        assert!((var / target - 1.0).abs() < 0.05, "Var z = {var}, E e = {target}");
    }

    #[test]
    fn conditioning_respects_level_and_is_monotone() {
        let mut rng = stream_rng(4, 0);
        let p = condition_min::<f64, _>(256, 0.5, &mut rng, 100_000).unwrap();
        assert!(p.min_label() > -0.5);
        assert_eq!(p.kind(), PathKind::Conditioned(0.5));

        let trials = 10_000;
        let paths: Vec<SnakePath<f64>> =
            (0..trials).map(|_| sample_snake(256, &mut rng).unwrap()).collect();
        let rates: Vec<usize> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&r| paths.iter().filter(|p| p.min_label() > -r).count())
            .collect();
        assert!(rates[0] <= rates[1] && rates[1] <= rates[2], "{rates:?}");
        assert!(condition_min::<f64, _>(256, 0.0, &mut rng, 10).is_err());
    }

    #[test]
    fn large_level_conditioning_is_nearly_raw() {
        let mut rng = stream_rng(5, 0);
        let m = 512;
        let raw: Vec<f64> = (0..4000)
            .map(|_| sample_snake::<f64, _>(m, &mut rng).unwrap().label()[m / 2])
            .collect();
        let cond: Vec<f64> = (0..4000)
            .map(|_| condition_min::<f64, _>(m, 5.0, &mut rng, 1000).unwrap().label()[m / 2])
            .collect();
        assert!(ks_statistic(&raw, &cond).unwrap() < 0.04);
    }

    #[test]
    fn reroot_invariants() {
        let mut rng = stream_rng(6, 0);
        for _ in 0..200 {
            let p = sample_snake::<f64, _>(128, &mut rng).unwrap();
            let q = reroot(&p);
            q.check_invariants().unwrap();
            assert_eq!(q.label()[0], 0.0);
            assert_eq!(q.min_label(), 0.0);
            assert_eq!(q.excursion()[128], 0.0);
        }
    }

    #[test]
    fn reroot_with_minimum_at_origin_keeps_labels() {
        let p = SnakePath::new(
            vec![0.0, 1.0, 2.0, 1.0, 0.0],
            vec![0.0, 0.5, 1.5, 0.25, 0.0],
            PathKind::Raw,
        )
        .unwrap();
        let q = reroot(&p);
        assert_eq!(q.label(), p.label());
        assert_eq!(q.excursion(), p.excursion());
    }

    #[test]
    fn reroot_moves_minimum() {
        let p = SnakePath::new(
            vec![0.0, 1.0, 2.0, 1.0, 0.0],
            vec![0.0, -0.5, -1.0, -0.5, 0.0],
            PathKind::Raw,
        )
        .unwrap();
        let q = reroot(&p);
        assert_eq!(q.label(), &[0.0, 0.5, 1.0, 0.5, 0.0][..]);
        assert_eq!(q.excursion(), &[0.0, 1.0, 2.0, 1.0, 0.0][..]);
    }

    #[test]
    fn distance_grid_properties() {
        let mut rng = stream_rng(7, 0);
        for _ in 0..50 {
            let q = reroot(&sample_snake::<f64, _>(256, &mut rng).unwrap());
            let grid: Vec<usize> = (0..=256).step_by(16).collect();
            let g = d_star_grid(&q, &grid).unwrap();
            for (i, &gi) in grid.iter().enumerate() {
                assert_eq!(g.d_circ[i][i], 0.0);
                assert!((g.d_star[0][i] - q.label()[gi]).abs() < 1e-12);
                for j in 0..g.len() {
                    assert!(g.d_star[i][j] <= g.d_circ[i][j]);
                    assert_eq!(g.d_star[i][j], g.d_star[j][i]);
                }
            }
            assert!(g.triangle_defect() <= 1e-12);
            assert_eq!(d_circ(&q, 5, 5), 0.0);
        }
    }

    #[test]
    fn rescale_identities() {
        let sigma = RescaleConstants::<f64>::sigma();
        assert!((12f64.powf(-0.25) - sigma / 2.0).abs() < 1e-12);
        assert!(((2.0f64 / 3.0).powf(-0.5) * (sigma / 2.0).sqrt() - 0.75f64.powf(0.375)).abs() < 1e-12);
        let c = RescaleConstants::<f64>::new(400);
        assert!((c.kappa * c.label_scale_nice - 1.0).abs() < 1e-12);
        assert!((c.contour_scale - 12f64.powf(-0.25) / 20.0).abs() < 1e-15);
        let c32 = RescaleConstants::<f32>::new(400);
        assert!((c32.kappa * c32.label_scale_nice - 1.0).abs() < 1e-5);
    }

    #[test]
    fn csv_exports() {
        let mut rng = stream_rng(8, 0);
        let q = reroot(&sample_snake::<f64, _>(4, &mut rng).unwrap());
        let mut buf = Vec::new();
        q.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,e,z\n"));
        assert_eq!(text.lines().count(), 6);
        let g = d_star_grid(&q, &[0, 2, 4]).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 10);
    }
}
