use super::Spectrum;
use crate::scalar::{Complex, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct MatchedPair<T> {
    pub left: Complex<T>,
    pub right: Complex<T>,
    pub distance: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumComparison<T> {
    pub passed: bool,
    /// Cardinalities of the two inputs.
    pub sizes: (usize, usize),
    /// Relative tolerance requested.
    pub tolerance: T,
    /// Larger spectral radius of the two inputs; `tolerance` is relative to it.
    pub scale: T,
    pub max_distance: T,
    pub total_cost: T,
    /// Up to three matched pairs with the largest distances, worst first.
    pub worst_pairs: Vec<MatchedPair<T>>,
    pub failure: Option<String>,
}

/// Minimum-cost perfect matching on `|aᵢ − bⱼ|`; passes iff every matched
/// distance is within `tol` times the larger spectral radius.
pub fn compare_spectra<T: Real>(a: &Spectrum<T>, b: &Spectrum<T>, tol: T) -> SpectrumComparison<T> {
    let scale = a.scale().max(b.scale());
    let sizes = (a.len(), b.len());
    if a.len() != b.len() {
        return SpectrumComparison {
            passed: false,
            sizes,
            tolerance: tol,
            scale,
            max_distance: T::infinity(),
            total_cost: T::infinity(),
            worst_pairs: Vec::new(),
            failure: Some(format!("cardinality mismatch: {} vs {}", a.len(), b.len())),
        };
    }
    let n = a.len();
    let cost: Vec<Vec<T>> =
        (0..n).map(|i| (0..n).map(|j| (a.values()[i] - b.values()[j]).norm()).collect()).collect();
    let assignment = hungarian(&cost);
    let mut pairs: Vec<MatchedPair<T>> = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| MatchedPair { left: a.values()[i], right: b.values()[j], distance: cost[i][j] })
        .collect();
    let total_cost = pairs.iter().map(|p| p.distance).sum();
    pairs.sort_by(|x, y| y.distance.partial_cmp(&x.distance).unwrap_or(std::cmp::Ordering::Equal));
    let max_distance = pairs.first().map_or(T::zero(), |p| p.distance);
    let passed = max_distance <= tol * scale;
    pairs.truncate(3);
    SpectrumComparison {
        passed,
        sizes,
        tolerance: tol,
        scale,
        max_distance,
        total_cost,
        worst_pairs: pairs,
        failure: (!passed).then(|| {
            format!(
                "max matched distance {:e} exceeds {:e}",
                max_distance.to_f64_lossy(),
                (tol * scale).to_f64_lossy()
            )
        }),
    }
}

/// Shortest augmenting path assignment for a square cost matrix; returns
/// the column matched to each row.
fn hungarian<T: Real>(cost: &[Vec<T>]) -> Vec<usize> {
    let n = cost.len();
    let inf = T::infinity();
    // 1-based potentials and matching, column 0 is a sentinel
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; n];
    for j in 1..=n {
        out[p[j] - 1] = j - 1;
    }
    out
}
