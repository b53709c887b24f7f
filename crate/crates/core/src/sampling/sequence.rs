use rand::Rng;

use super::law::OffspringLaw;

/// Offspring law whose conditioned sequences we can draw exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SequenceLaw {
    /// The critical law of [`OffspringLaw`].
    Critical(OffspringLaw<f64>),
    /// `Geometric(1/2)` on `{0, 1, ...}`; conditioned trees are uniform.
    Geometric,
}

/// Exact sampler of `n + 1` i.i.d. offspring counts conditioned to sum to
/// `n`, together with the cyclic shift that turns them into a tree.
///
/// For the critical law the number `z` of zeros is drawn from its exact
/// conditional distribution; given `z`, the zero positions are a uniform
/// subset and the positive entries a uniform composition of `n` into
/// `n + 1 - z` parts, because `μ(k) ∝ β^k` on `k >= 1`.
#[derive(Clone, Debug)]
pub struct ConditionedSequence {
    n: usize,
    law: SequenceLaw,
    /// Cumulative distribution of the zero count over `z = 1..=n`.
    zero_cdf: Vec<f64>,
    /// `ln k!` for `k = 0..=n + 1`.
    ln_fact: Vec<f64>,
}

fn ln_factorials(up_to: usize) -> Vec<f64> {
    let mut table = vec![0.0; up_to + 1];
    for k in 1..=up_to {
        table[k] = table[k - 1] + (k as f64).ln();
    }
    table
}

impl ConditionedSequence {
    pub fn new(n: usize, law: SequenceLaw) -> Self {
        let ln_fact = ln_factorials(n + 1);
        let zero_cdf = if n >= 1 { Self::zero_count_cdf(n, &law, &ln_fact) } else { Vec::new() };
        Self {
            n,
            law,
            zero_cdf,
            ln_fact,
        }
    }

    /// Law of the number of zeros, which is also the leaf count of the
    /// rotated tree. Given `m = n + 1 - z` positive entries, a sequence has
    /// weight `μ(0)^z (P(k >= 1)(1 - β))^m β^{n - m}`, and there are
    /// `C(n + 1, z) C(n - 1, m - 1)` of them. All sequences weigh the same
    /// under `Geometric(1/2)`.
    fn zero_count_cdf(n: usize, law: &SequenceLaw, lf: &[f64]) -> Vec<f64> {
        let ln_choose = |a: usize, b: usize| lf[a] - lf[b] - lf[a - b];
        let log_weights: Vec<f64> = (1..=n)
            .map(|z| {
                let m = n + 1 - z;
                let count = ln_choose(n + 1, z) + ln_choose(n - 1, m - 1);
                match law {
                    SequenceLaw::Geometric => count,
                    SequenceLaw::Critical(law) => {
                        let beta = law.beta();
                        count
                            + z as f64 * law.pmf(0).ln()
                            + m as f64 * (law.prob_positive().ln() + (1.0 - beta).ln())
                            + (n - m) as f64 * beta.ln()
                    }
                }
            })
            .collect();
        let top = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut cdf: Vec<f64> = Vec::with_capacity(n);
        let mut acc = 0.0;
        for w in &log_weights {
            acc += (w - top).exp();
            cdf.push(acc);
        }
        for c in &mut cdf {
            *c /= acc;
        }
        cdf
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn law(&self) -> SequenceLaw {
        self.law
    }

    /// Fills `out` with the conditioned sequence, not yet rotated.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<usize>) {
        let n = self.n;
        out.clear();
        if n == 0 {
            out.push(0);
            return;
        }
        match self.law {
            SequenceLaw::Geometric => {
                // Uniform weak composition: n balls among 2n slots, the
                // remaining n slots are bars between the n + 1 bins.
                out.push(0);
                select(rng, n, 2 * n, |_, ball| {
                    if ball {
                        *out.last_mut().expect("non-empty") += 1;
                    } else {
                        out.push(0);
                    }
                });
            }
            SequenceLaw::Critical(_) => {
                let z = self.sample_zero_count(rng);
                let m = n + 1 - z;
                let mut parts = Vec::with_capacity(m);
                let mut last_cut = 0;
                select(rng, m - 1, n - 1, |slot, cut| {
                    if cut {
                        parts.push(slot + 1 - last_cut);
                        last_cut = slot + 1;
                    }
                });
                parts.push(n - last_cut);
                let mut parts = parts.into_iter();
                select(rng, z, n + 1, |_, zero| {
                    out.push(if zero { 0 } else { parts.next().expect("m parts") });
                });
            }
        }
    }

    /// Fills `out` with the preorder child counts of a conditioned tree.
    pub fn sample_tree_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<usize>) {
        self.sample_into(rng, out);
        rotate_to_tree(out);
    }

    /// Number of zeros in a conditioned sequence (leaves of the tree).
    pub fn sample_zero_count<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.n == 0 {
            return 1;
        }
        let u: f64 = rng.random();
        1 + self.zero_cdf.partition_point(|&c| c < u).min(self.n - 1)
    }

    /// Starts a preorder walk that draws a conditioned tree one vertex at a
    /// time, so callers can stop as soon as a partial tree is rejected.
    pub fn walk<R: Rng + ?Sized>(&self, rng: &mut R) -> PreorderWalk<'_> {
        let leaves = self.sample_zero_count(rng);
        PreorderWalk {
            ln_fact: &self.ln_fact,
            vertices_left: self.n + 1,
            leaves_left: leaves,
            open: 1,
        }
    }
}

/// Lazy preorder generation of a uniform plane tree with a fixed number of
/// vertices and leaves.
///
/// With `t` vertices still to place, `l` of them leaves, and `h` open child
/// slots, the completions are the sequences of `t` child counts with `l`
/// zeros, summing to `t - h`, whose Łukasiewicz walk from `h` first reaches
/// `0` at the last step. By the cycle lemma there are
/// `(h / t) C(t, l) C(t - h - 1, t - l - 1)` of them, and each step is drawn
/// with probability proportional to the completions it leaves.
#[derive(Clone, Debug)]
pub struct PreorderWalk<'a> {
    ln_fact: &'a [f64],
    vertices_left: usize,
    leaves_left: usize,
    open: usize,
}

impl PreorderWalk<'_> {
    fn ln_choose(&self, a: usize, b: usize) -> f64 {
        self.ln_fact[a] - self.ln_fact[b] - self.ln_fact[a - b]
    }

    fn ln_completions(&self, t: usize, leaves: usize, h: usize) -> f64 {
        if t == 0 {
            return if h == 0 && leaves == 0 { 0.0 } else { f64::NEG_INFINITY };
        }
        if h == 0 || h > t || leaves > t {
            return f64::NEG_INFINITY;
        }
        let sum = t - h;
        let positive = t - leaves;
        let ln_int = |k: usize| self.ln_fact[k] - self.ln_fact[k - 1];
        let ln_ratio = ln_int(h) - ln_int(t) + self.ln_choose(t, leaves);
        if positive == 0 {
            return if sum == 0 { ln_ratio } else { f64::NEG_INFINITY };
        }
        if sum < positive {
            return f64::NEG_INFINITY;
        }
        ln_ratio + self.ln_choose(sum - 1, positive - 1)
    }

    pub fn is_done(&self) -> bool {
        self.vertices_left == 0
    }

    /// Child count of the next vertex in preorder.
    pub fn next_count<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let (t, leaves, h) = (self.vertices_left, self.leaves_left, self.open);
        debug_assert!(t > 0, "walk already complete");
        let base = self.ln_completions(t, leaves, h);
        let mut u: f64 = rng.random();
        let mut k = 0;
        if leaves == t {
            // Only leaves remain.
            self.vertices_left -= 1;
            self.leaves_left -= 1;
            self.open = h - 1;
            return 0;
        }
        if leaves > 0 {
            u -= (self.ln_completions(t - 1, leaves - 1, h - 1) - base).exp();
        }
        if u >= 0.0 || leaves == 0 {
            k = 1;
            let max = t - h;
            loop {
                let p = (self.ln_completions(t - 1, leaves, h - 1 + k) - base).exp();
                u -= p;
                if u < 0.0 || k >= max {
                    break;
                }
                k += 1;
            }
        }
        self.vertices_left -= 1;
        if k == 0 {
            self.leaves_left -= 1;
        }
        self.open = h - 1 + k;
        k
    }
}

/// Visits slots `0..total` in order, marking a uniform `k`-subset as chosen.
fn select<R: Rng + ?Sized>(rng: &mut R, k: usize, total: usize, mut visit: impl FnMut(usize, bool)) {
    let mut remaining = k;
    for slot in 0..total {
        let chosen = remaining > 0 && rng.random_range(0..total - slot) < remaining;
        if chosen {
            remaining -= 1;
        }
        visit(slot, chosen);
    }
}

/// Rotates a sequence of `n + 1` counts summing to `n` into the unique
/// cyclic shift that is a preorder child-count sequence.
pub fn rotate_to_tree(seq: &mut [usize]) {
    let len = seq.len();
    let mut sum: i64 = 0;
    let mut best = (i64::MAX, 0);
    for (k, &x) in seq.iter().enumerate() {
        sum += x as i64 - 1;
        if sum < best.0 {
            best = (sum, k + 1);
        }
    }
    debug_assert_eq!(sum, -1, "sequence must sum to its length minus one");
    seq.rotate_left(best.1 % len);
}
