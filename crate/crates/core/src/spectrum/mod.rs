//! Rotating-frame linearization: closed-form 4×4 blocks, the dense `4n × 4n`
//! oracle, matching of the two and stability classification.

mod block;
mod classify;
mod compare;
mod oracle;

pub use block::{
    block_spectrum, block_spectrum_dense, build_block, linearize, reduced_linearization, CoupledBlock, LinearBlock,
    Linearization, ResidualBlock,
};
pub use classify::{classify, label_of, ModeLabel, StabilityVerdict, Verdict, DEFAULT_CLASSIFY_TOL};
pub use compare::{compare_spectra, MatchedPair, SpectrumComparison};
pub use oracle::{full_linearization_spectrum, linearization_matrix, mass_weighted_hessian};

use crate::scalar::{Complex, Real};

/// Multiset of complex eigenvalues, kept in canonical order: by real part,
/// then imaginary part, both rounded at `1e−8` of the spectral radius so
/// that values equal up to roundoff sort deterministically.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    values: Vec<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn new(mut values: Vec<Complex<T>>) -> Self {
        let scale = values.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        let q = T::of(1e-8) * scale.max(T::min_positive_value());
        let key = |x: T| (x / q).round();
        values.sort_by(|a, b| {
            let ka = (key(a.re), key(a.im));
            let kb = (key(b.re), key(b.im));
            ka.partial_cmp(&kb)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal))
                .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
        });
        Self { values }
    }

    pub fn union<I: IntoIterator<Item = Spectrum<T>>>(parts: I) -> Self {
        Self::new(parts.into_iter().flat_map(|s| s.values).collect())
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Spectral radius `max |s|`.
    pub fn scale(&self) -> T {
        self.values.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn max_real_part(&self) -> T {
        self.values.iter().map(|z| z.re).fold(T::neg_infinity(), T::max)
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self::new(self.values.iter().map(|&z| f(z)).collect())
    }

    /// Replaces each tight cluster of eigenvalues by its mean.
    ///
    /// A Jordan block of size `k` splits under a relative perturbation `ε`
    /// into `k` values spread over roughly `ε^{1/k}`, while their mean stays
    /// accurate to `O(ε)`. A cluster is merged only if its diameter is within
    /// `(κε)^{1/k}` of the spectral radius, with `κ = 4096` allowing for the
    /// conditioning of the dense solver, so well separated close eigenvalues
    /// survive. Candidate clusters come from single linkage; a
    /// candidate that is too wide is split again at a smaller linkage
    /// distance, so a tight pair next to an unrelated neighbour is still found.
    pub fn consolidated(&self) -> Self {
        self.consolidated_relative_to(self.scale())
    }

    /// As [`Spectrum::consolidated`], with cluster widths measured against
    /// `scale` instead of this spectrum's own radius. Used for pieces of a
    /// larger spectrum, such as a single block.
    pub fn consolidated_relative_to(&self, scale: T) -> Self {
        let n = self.values.len();
        if n < 2 || scale == T::zero() {
            return self.clone();
        }
        let mut out = self.values.clone();
        let all: Vec<usize> = (0..n).collect();
        let reach = split_width::<T>(4) * scale;
        self.consolidate_within(&all, reach, scale, &mut out);
        Self::new(out)
    }

    fn consolidate_within(&self, members: &[usize], reach: T, scale: T, out: &mut [Complex<T>]) {
        let eps = T::epsilon();
        for c in single_linkage(&self.values, members, reach) {
            if c.len() < 2 {
                continue;
            }
            let k = c.len();
            let mut diameter = T::zero();
            for &i in &c {
                for &j in &c {
                    diameter = diameter.max((self.values[i] - self.values[j]).norm());
                }
            }
            let allowed = split_width::<T>(k) * scale;
            if diameter <= allowed {
                let sum = c.iter().fold(Complex::new(T::zero(), T::zero()), |s, &i| s + self.values[i]);
                let mean = sum / T::of_usize(k);
                for &i in &c {
                    out[i] = mean;
                }
            } else {
                let smaller = reach / T::of(4.0);
                if smaller >= eps * scale {
                    self.consolidate_within(&c, smaller, scale, out);
                }
            }
        }
    }

    /// Largest distance, relative to the spectral radius, between the
    /// spectrum and its images under `s → −s` and `s → s̄`.
    pub fn hamiltonian_defect(&self) -> T {
        let scale = self.scale().max(T::min_positive_value());
        let neg = compare_spectra(self, &self.map(|z| -z), T::one());
        let conj = compare_spectra(self, &self.map(|z| z.conj()), T::one());
        neg.max_distance.max(conj.max_distance) / scale
    }

    /// Number of eigenvalues within `tol` (relative to the spectral radius) of `target`.
    pub fn count_near(&self, target: Complex<T>, tol: T) -> usize {
        let thr = tol * self.scale().max(T::min_positive_value());
        self.values.iter().filter(|z| (**z - target).norm() <= thr).count()
    }
}

const SPLIT_CONDITIONING: f64 = 4096.0;

/// Relative spread of a `k`-fold defective eigenvalue after roundoff.
fn split_width<T: Real>(k: usize) -> T {
    (T::of(SPLIT_CONDITIONING) * T::epsilon()).powf(T::one() / T::of_usize(k))
}

/// Connected components of `members` under "within `reach`".
fn single_linkage<T: Real>(values: &[Complex<T>], members: &[usize], reach: T) -> Vec<Vec<usize>> {
    let m = members.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut j = i;
        while p[j] != r {
            let next = p[j];
            p[j] = r;
            j = next;
        }
        r
    }
    for a in 0..m {
        for b in a + 1..m {
            if (values[members[a]] - values[members[b]]).norm() <= reach {
                let (x, y) = (find(&mut parent, a), find(&mut parent, b));
                parent[x.max(y)] = x.min(y);
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; m];
    for a in 0..m {
        let r = find(&mut parent, a);
        if slot[r] == usize::MAX {
            slot[r] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[slot[r]].push(members[a]);
    }
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn canonical_order_ignores_roundoff_in_real_parts() {
        let s = Spectrum::new(vec![c(1e-17, 2.0), c(-1e-17, -2.0), c(0.0, 1.0), c(-1.0, 0.0)]);
        let im: Vec<f64> = s.values().iter().map(|z| z.im).collect();
        assert_eq!(im, vec![0.0, -2.0, 1.0, 2.0]);
    }

    #[test]
    fn consolidation_merges_split_jordan_blocks_only() {
        let d = 1e-5;
        let s = Spectrum::new(vec![c(d, 0.0), c(-d, 0.0), c(0.0, d), c(0.0, -d), c(1.0, 0.0), c(1.0 + 1e-3, 0.0)]);
        let m = s.consolidated();
        assert_eq!(m.count_near(c(0.0, 0.0), 1e-14), 4);
        // distinct values 1e−3 apart are kept
        assert_eq!(m.count_near(c(1.0, 0.0), 1e-14), 1);
        // a pair 1e−5 apart is not a plausible split of a double root
        let pair = Spectrum::new(vec![c(2.0, 0.0), c(2.0 + 1e-5, 0.0)]).consolidated();
        assert_eq!(pair.count_near(c(2.0, 0.0), 1e-14), 1);
    }

    #[test]
    fn tight_pair_next_to_a_neighbour_is_merged() {
        let s = Spectrum::new(vec![c(0.0, 1.0), c(1e-8, 1.0 + 2e-8), c(0.0, 1.0 + 7e-4), c(0.0, 2.0)]).consolidated();
        assert_eq!(s.count_near(c(5e-9, 1.0 + 1e-8), 1e-14), 2, "{s:?}");
        assert_eq!(s.count_near(c(0.0, 1.0 + 7e-4), 1e-14), 1);
    }

    #[test]
    fn hamiltonian_defect_detects_asymmetry() {
        let good = Spectrum::new(vec![c(1.0, 2.0), c(-1.0, 2.0), c(1.0, -2.0), c(-1.0, -2.0)]);
        assert!(good.hamiltonian_defect() < 1e-15);
        let bad = Spectrum::new(vec![c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(bad.hamiltonian_defect() > 0.1);
    }
}
