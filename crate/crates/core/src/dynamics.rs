//! Nonlinear rotating-frame integration, used to confirm equilibria and to
//! measure instability growth rates independently of the spectral analysis.
//!
//! Equations of motion for body `i` in the frame rotating at `ω`:
//! `ẍᵢ = 2ωJẋᵢ + ω²xᵢ + ∇ᵢU / mᵢ` with `J = [[0, 1], [−1, 0]]`.

use crate::error::{Error, Result};
use crate::linalg::{self, complex_eigenvalues, eigenvector_for};
use crate::model::{angular_frequency_squared, gradient_flat, potential_terms_flat, BodyConfiguration, PotentialSpec};
use crate::scalar::{Complex, Real};
use crate::spectrum::linearization_matrix;

/// Collision is declared when a pair distance drops below this fraction of
/// the initial minimum distance (or the step stops resolving the encounter).
pub const COLLISION_FRACTION: f64 = 1e-6;

/// Default step as a fraction of the rotation period.
pub const STEPS_PER_PERIOD: f64 = 1e4;

#[derive(Debug, Clone, PartialEq)]
pub struct BlowUp<T> {
    pub time: T,
    pub pair: (usize, usize),
    pub distance: T,
}

/// Sampled rotating-frame trajectory. `states[k]` is positions followed by
/// velocities (`4n` entries).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub jacobi_energy: Vec<T>,
    pub blow_up: Option<BlowUp<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max_k |E_k − E_0| / |E_0|`
    pub fn relative_energy_drift(&self) -> T {
        let e0 = self.jacobi_energy.first().copied().unwrap_or(T::zero());
        let floor = e0.abs().max(T::min_positive_value());
        self.jacobi_energy.iter().fold(T::zero(), |m, &e| m.max((e - e0).abs() / floor))
    }

    /// `max_k ‖x_k − x_0‖∞` over the position part.
    pub fn position_drift(&self) -> T {
        let Some(first) = self.states.first() else { return T::zero() };
        let d = first.len() / 2;
        self.states.iter().fold(T::zero(), |m, s| m.max(linalg::max_abs(&linalg::sub(&s[..d], &first[..d]))))
    }
}

/// Rotating frame attached to a relative equilibrium.
///
/// The roundoff residual of the equations at the equilibrium is subtracted
/// from every acceleration, which makes the equilibrium an exact fixed point
/// of the discrete flow; the correction is of the order of machine epsilon
/// and leaves the dynamics otherwise unchanged.
#[derive(Debug, Clone)]
pub struct RotatingFrame<T> {
    masses: Vec<T>,
    spec: PotentialSpec<T>,
    omega: T,
    equilibrium: Vec<T>,
    residual: Vec<T>,
}

impl<T: Real> RotatingFrame<T> {
    pub fn new(config: &BodyConfiguration<T>, spec: &PotentialSpec<T>) -> Result<Self> {
        let omega = angular_frequency_squared(config, spec)?.sqrt();
        let mut frame = Self {
            masses: config.masses().to_vec(),
            spec: spec.clone(),
            omega,
            equilibrium: config.flat(),
            residual: vec![T::zero(); 2 * config.n()],
        };
        let zero = vec![T::zero(); 2 * config.n()];
        frame.residual = frame.acceleration(&frame.equilibrium.clone(), &zero);
        Ok(frame)
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn period(&self) -> T {
        T::two() * T::PI() / self.omega
    }

    pub fn equilibrium(&self) -> &[T] {
        &self.equilibrium
    }

    pub fn acceleration(&self, z: &[T], v: &[T]) -> Vec<T> {
        let grad = gradient_flat(&self.masses, z, &self.spec, None);
        let (w, w2) = (self.omega, self.omega * self.omega);
        let mut a = vec![T::zero(); z.len()];
        for i in 0..self.masses.len() {
            let (x, y) = (2 * i, 2 * i + 1);
            let m = self.masses[i];
            a[x] = T::two() * w * v[y] + w2 * z[x] + grad[x] / m - self.residual[x];
            a[y] = -T::two() * w * v[x] + w2 * z[y] + grad[y] / m - self.residual[y];
        }
        a
    }

    /// `E = Σ ½mᵢ|ẋᵢ|² − ½ω² Σ mᵢ|xᵢ|² − U`
    pub fn jacobi_energy(&self, z: &[T], v: &[T]) -> T {
        let w2 = self.omega * self.omega;
        let mut e = T::zero();
        for (i, &m) in self.masses.iter().enumerate() {
            let (x, y) = (2 * i, 2 * i + 1);
            e += T::half() * m * (v[x] * v[x] + v[y] * v[y]);
            e -= T::half() * w2 * m * (z[x] * z[x] + z[y] * z[y]);
        }
        e - potential_terms_flat(&self.masses, z, &self.spec).into_iter().sum::<T>()
    }

    fn closest_pair(&self, z: &[T]) -> (usize, usize, T) {
        let (i, j, d, _) = self.closest_approach(z, z);
        (i, j, d)
    }

    /// Smallest pair distance along the straight segment from `a` to `b`,
    /// so that a fast pass through a collision between steps is not missed.
    /// The flag marks a pair that moved by more than its separation during
    /// the step, i.e. an encounter the fixed step can no longer resolve.
    fn closest_approach(&self, a: &[T], b: &[T]) -> (usize, usize, T, bool) {
        let n = self.masses.len();
        let mut best = (0, 1, T::infinity(), false);
        for i in 0..n {
            for j in i + 1..n {
                let r0 = [a[2 * i] - a[2 * j], a[2 * i + 1] - a[2 * j + 1]];
                let r1 = [b[2 * i] - b[2 * j], b[2 * i + 1] - b[2 * j + 1]];
                let dr = [r1[0] - r0[0], r1[1] - r0[1]];
                let dd = dr[0] * dr[0] + dr[1] * dr[1];
                let s = if dd > T::zero() {
                    (-(r0[0] * dr[0] + r0[1] * dr[1]) / dd).max(T::zero()).min(T::one())
                } else {
                    T::zero()
                };
                let d = (r0[0] + s * dr[0]).hypot(r0[1] + s * dr[1]);
                let unresolved = dd.sqrt() > r0[0].hypot(r0[1]).min(r1[0].hypot(r1[1]));
                if unresolved && !best.3 || (unresolved == best.3 && d < best.2) {
                    best = (i, j, d, unresolved);
                }
            }
        }
        best
    }

    fn rk4_step(&self, z: &[T], v: &[T], dt: T) -> (Vec<T>, Vec<T>) {
        let half = dt * T::half();
        let axpy = |x: &[T], s: T, y: &[T]| -> Vec<T> { x.iter().zip(y).map(|(&a, &b)| a + s * b).collect() };
        let a1 = self.acceleration(z, v);
        let (z2, v2) = (axpy(z, half, v), axpy(v, half, &a1));
        let a2 = self.acceleration(&z2, &v2);
        let (z3, v3) = (axpy(z, half, &v2), axpy(v, half, &a2));
        let a3 = self.acceleration(&z3, &v3);
        let (z4, v4) = (axpy(z, dt, &v3), axpy(v, dt, &a3));
        let a4 = self.acceleration(&z4, &v4);
        let sixth = dt / T::of(6.0);
        let two = T::two();
        let zn = (0..z.len()).map(|k| z[k] + sixth * (v[k] + two * v2[k] + two * v3[k] + v4[k])).collect();
        let vn = (0..z.len()).map(|k| v[k] + sixth * (a1[k] + two * a2[k] + two * a3[k] + a4[k])).collect();
        (zn, vn)
    }

    /// Classical RK4 from `(z0, v0)` for `duration`, recording every
    /// `stride`-th step (and the last one). Stops early on a collision.
    pub fn integrate(&self, z0: &[T], v0: &[T], duration: T, dt: T, stride: usize) -> Result<Trajectory<T>> {
        self.run(z0, v0, duration, dt, stride, |_, _, _| true)
    }

    /// Like [`integrate`](Self::integrate) but calls `observe(t, z, v)` after
    /// every step; integration stops when it returns `false`.
    pub fn run(
        &self,
        z0: &[T],
        v0: &[T],
        duration: T,
        dt: T,
        stride: usize,
        mut observe: impl FnMut(T, &[T], &[T]) -> bool,
    ) -> Result<Trajectory<T>> {
        let dim = self.equilibrium.len();
        if z0.len() != dim || v0.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: z0.len().max(v0.len()) });
        }
        if !(dt > T::zero()) || !(duration >= T::zero()) {
            return Err(Error::InvalidArgument("dt must be positive and the duration non-negative".into()));
        }
        let (i0, j0, d0) = self.closest_pair(z0);
        if !(d0 > T::zero()) {
            return Err(Error::Collision { i: i0, j: j0, distance: d0.to_f64_lossy() });
        }
        let threshold = T::of(COLLISION_FRACTION) * d0;
        let stride = stride.max(1);
        let steps = (duration / dt).round().to_usize().unwrap_or(0);
        let state = |z: &[T], v: &[T]| -> Vec<T> { z.iter().chain(v).copied().collect() };
        let mut traj = Trajectory {
            times: vec![T::zero()],
            states: vec![state(z0, v0)],
            jacobi_energy: vec![self.jacobi_energy(z0, v0)],
            blow_up: None,
        };
        let (mut z, mut v) = (z0.to_vec(), v0.to_vec());
        for k in 1..=steps {
            let (zn, vn) = self.rk4_step(&z, &v, dt);
            let (i, j, d, unresolved) = self.closest_approach(&z, &zn);
            z = zn;
            v = vn;
            let t = dt * T::of_usize(k);
            let finite = z.iter().chain(&v).all(|x| x.is_finite());
            if !(d >= threshold) || unresolved || !finite {
                traj.blow_up = Some(BlowUp { time: t, pair: (i, j), distance: d });
                break;
            }
            let keep_going = observe(t, &z, &v);
            if k % stride == 0 || k == steps || !keep_going {
                traj.times.push(t);
                traj.states.push(state(&z, &v));
                traj.jacobi_energy.push(self.jacobi_energy(&z, &v));
            }
            if !keep_going {
                break;
            }
        }
        Ok(traj)
    }
}

/// Integrates from the configuration itself (which must be central) with the
/// given initial rotating-frame velocity.
pub fn integrate_rotating_frame<T: Real>(
    config: &BodyConfiguration<T>,
    spec: &PotentialSpec<T>,
    initial_velocity: &[T],
    duration: T,
    dt: T,
) -> Result<Trajectory<T>> {
    let frame = RotatingFrame::new(config, spec)?;
    let z0 = frame.equilibrium().to_vec();
    frame.integrate(&z0, initial_velocity, duration, dt, 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthEstimate<T> {
    /// Fitted slope of `ln ‖x(t) − x₀‖`; zero when `no_growth` is set.
    pub rate: T,
    pub no_growth: bool,
    /// Time interval of the fit window.
    pub window: Option<(T, T)>,
    pub samples: usize,
}

/// Perturbs the equilibrium by `epsilon · direction` (positions only, zero
/// velocity), integrates for at most `duration` and fits the log of the
/// position deviation against time while it lies in `(10ε, 10⁻²·radius)`.
/// Reports `no_growth` if the deviation never leaves that window from above.
pub fn estimate_growth_rate<T: Real>(
    config: &BodyConfiguration<T>,
    spec: &PotentialSpec<T>,
    direction: &[T],
    epsilon: T,
    duration: T,
) -> Result<GrowthEstimate<T>> {
    let frame = RotatingFrame::new(config, spec)?;
    let dt = frame.period() / T::of(STEPS_PER_PERIOD);
    estimate_growth_rate_with_step(&frame, config.radius(), direction, epsilon, duration, dt)
}

pub fn estimate_growth_rate_with_step<T: Real>(
    frame: &RotatingFrame<T>,
    radius: T,
    direction: &[T],
    epsilon: T,
    duration: T,
    dt: T,
) -> Result<GrowthEstimate<T>> {
    let z_eq = frame.equilibrium().to_vec();
    if direction.len() != z_eq.len() {
        return Err(Error::DimensionMismatch { expected: z_eq.len(), found: direction.len() });
    }
    let norm = linalg::norm(direction);
    if !(norm > T::zero()) || !(epsilon > T::zero()) {
        return Err(Error::InvalidArgument("direction must be non-zero and epsilon positive".into()));
    }
    let z0: Vec<T> = z_eq.iter().zip(direction).map(|(&z, &d)| z + epsilon * d / norm).collect();
    let v0 = vec![T::zero(); z0.len()];
    let (lo, hi) = (T::of(10.0) * epsilon, T::of(1e-2) * radius);
    // streaming least squares on (t, ln d)
    let (mut n, mut st, mut sy, mut stt, mut sty) = (0usize, T::zero(), T::zero(), T::zero(), T::zero());
    let (mut t_first, mut t_last) = (T::zero(), T::zero());
    let mut escaped = false;
    frame.run(&z0, &v0, duration, dt, usize::MAX, |t, z, _| {
        let d = linalg::norm(&linalg::sub(z, &z_eq));
        if d >= hi {
            escaped = true;
            return false;
        }
        if d > lo {
            if n == 0 {
                t_first = t;
            }
            t_last = t;
            let y = d.ln();
            n += 1;
            st += t;
            sy += y;
            stt += t * t;
            sty += t * y;
        }
        true
    })?;
    let nf = T::of_usize(n);
    let denom = nf * stt - st * st;
    if !escaped || n < 16 || !(denom > T::zero()) {
        return Ok(GrowthEstimate { rate: T::zero(), no_growth: true, window: None, samples: n });
    }
    let rate = (nf * sty - st * sy) / denom;
    Ok(GrowthEstimate { rate, no_growth: false, window: Some((t_first, t_last)), samples: n })
}

/// Eigenvalue of the full linearization with the largest real part, and a
/// real position-space direction for it: the position part of the
/// eigenvector, phased so that its real part has maximal norm, normalized.
pub fn dominant_mode<T: Real>(
    config: &BodyConfiguration<T>,
    spec: &PotentialSpec<T>,
) -> Result<(Complex<T>, Vec<T>)> {
    let a = linearization_matrix(config, spec)?;
    let eigs = complex_eigenvalues(&a)?;
    let s = eigs
        .iter()
        .copied()
        .fold(None, |best: Option<Complex<T>>, z| match best {
            Some(b) if b.re >= z.re => Some(b),
            _ => Some(z),
        })
        .ok_or(Error::EigenFailure)?;
    let s = if s.im < T::zero() { s.conj() } else { s };
    let v = eigenvector_for(&a, s)?;
    let d = a.rows() / 2;
    let x: Vec<T> = v[..d].iter().map(|z| z.re).collect();
    let y: Vec<T> = v[..d].iter().map(|z| z.im).collect();
    let (aa, bb, cc) = (linalg::dot(&x, &x), linalg::dot(&y, &y), linalg::dot(&x, &y));
    let phi = T::half() * (-T::two() * cc).atan2(aa - bb);
    let (sp, cp) = phi.sin_cos();
    let dir: Vec<T> = x.iter().zip(&y).map(|(&p, &q)| cp * p - sp * q).collect();
    let norm = linalg::norm(&dir);
    if !(norm > T::zero()) {
        return Err(Error::EigenFailure);
    }
    Ok((s, linalg::scale(&dir, T::one() / norm)))
}
