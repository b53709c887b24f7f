use crate::scalar::Scalar;

/// The critical offspring law `μ(0) = 1/(3 z_β)`, `μ(k) = β^k / z_β` for
/// `k >= 1`, with `β = (√3 - 1)/2` and `z_β = (√3 + 1)/3`.
///
/// Conditioned on `n` edges, a Galton–Watson tree with this law and i.i.d.
/// uniform label increments (leaf edges forced to `-1`) is uniform over the
/// trees whose non-root leaves sit one below their parent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OffspringLaw<T> {
    beta: T,
    z_beta: T,
}

impl<T: Scalar> Default for OffspringLaw<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> OffspringLaw<T> {
    pub fn new() -> Self {
        let sqrt3 = T::of(3.0).sqrt();
        let two = T::of(2.0);
        let three = T::of(3.0);
        Self {
            beta: (sqrt3 - T::one()) / two,
            z_beta: (sqrt3 + T::one()) / three,
        }
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn z_beta(&self) -> T {
        self.z_beta
    }

    pub fn pmf(&self, k: usize) -> T {
        if k == 0 {
            T::one() / (T::of(3.0) * self.z_beta)
        } else {
            self.beta.powi(k as i32) / self.z_beta
        }
    }

    /// Probability of at least one child.
    pub fn prob_positive(&self) -> T {
        self.beta / ((T::one() - self.beta) * self.z_beta)
    }

    /// Sums `f(k) μ(k)` until the geometric tail drops below machine
    /// precision relative to the running total.
    fn series(&self, f: impl Fn(T) -> T) -> T {
        let mut total = T::zero();
        let mut k = 0usize;
        loop {
            let kk = T::of_usize(k);
            let term = f(kk) * self.pmf(k);
            total = total + term;
            if k > 8 && term.abs() <= T::epsilon() * T::of(1e-3) * total.abs().max(T::one()) {
                return total;
            }
            k += 1;
        }
    }

    /// `Σ μ(k)`, summed numerically.
    pub fn total_mass(&self) -> T {
        self.series(|_| T::one())
    }

    pub fn mean(&self) -> T {
        self.series(|k| k)
    }

    pub fn variance(&self) -> T {
        let m = self.mean();
        self.series(|k| (k - m) * (k - m))
    }

    /// `σ = (4/3)^{1/4}`, the square root of the variance in closed form.
    pub fn sigma(&self) -> T {
        (T::of(4.0) / T::of(3.0)).powf(T::of(0.25))
    }
}
