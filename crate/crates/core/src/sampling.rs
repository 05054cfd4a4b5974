//! The bandlimited bridge between exact CA histories and continuous time.
//!
//! A finite discreteness scale `l` makes continuum wave functions bandlimited
//! to `omega in [-pi/l, pi/l]`, so a CA history determines a continuous-time
//! signal through the sinc series
//!
//! ```text
//! psi(t) = sum_n psi_n sinc(pi (t - n l) / l)
//! ```
//!
//! and sampling at `t = n l` inverts the map. Clock shifts become time
//! shifts, `psi_{n +- 1} <-> psi(t +- l)`, so the conserved lattice
//! correlator turns into `Re psi*(t) cosh[l d/dt] psi(t)`, which expands as
//! `|psi|^2 + (l^2/2) Re psi* psi'' + O(l^4)`.
//!
//! Two evaluation paths exist. Truncated sinc sums over a stored window are
//! exact at lattice points (the tails hit sinc zeros) but their off-lattice
//! truncation error decays only like `1/(pi W)` in the distance `W` to the
//! window edge, so off-lattice comparisons either use very long windows or,
//! for periodic histories, the exact finite mode decomposition
//! ([`ModeWave::from_periodic_samples`]), which evaluates the *infinite*
//! sinc series in closed form. Derivatives are always analytic or term-wise
//! differentiated kernels, never finite differences, since finite differences
//! would confound the `l`-expansion being tested.

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{CaError, Result};
use crate::gauss::Gauss;
use crate::linalg::{Matrix, Vector};
use crate::multi::MultiCa;
use crate::scalar::{FloatScalar, IntScalar};
use crate::single::Trajectory;

/// Margin, in samples, that an evaluation point must keep from each window
/// edge before off-lattice values of a truncated sinc sum are trusted.
pub const RELIABLE_PAD: i64 = 16;

/// Normalized sinc: `sin(pi x) / (pi x)`, `1` at `x = 0`.
pub fn sinc<F: FloatScalar>(x: F) -> F {
    let z = F::PI() * x;
    if z.abs() < F::of(1e-4) {
        // 1 - z^2/6 + z^4/120
        let z2 = z * z;
        F::one() - z2 / F::of(6.0) + z2 * z2 / F::of(120.0)
    } else {
        z.sin() / z
    }
}

/// Second derivative of [`sinc`] with respect to `x`.
pub fn sinc_dd<F: FloatScalar>(x: F) -> F {
    let pi = F::PI();
    let z = pi * x;
    if z.abs() < F::of(1e-4) {
        // pi^2 (-1/3 + z^2/10 - z^4/168)
        let z2 = z * z;
        pi * pi * (-F::of(1.0 / 3.0) + z2 / F::of(10.0) - z2 * z2 / F::of(168.0))
    } else {
        // s'' = -pi sin(pi x)/x - 2 s'(x)/x,  s' = (cos(pi x) - s(x))/x
        let s = z.sin() / z;
        let sp = (z.cos() - s) / x;
        (-pi * z.sin() - sp - sp) / x
    }
}

/// Exact conversion of one integer to a float; rejects anything that would
/// round (|x| must stay below 2^53 and fit the target width).
pub fn int_to_float<T: IntScalar, F: FloatScalar>(x: &T) -> Result<F> {
    let err = || CaError::PrecisionLoss {
        value: x.to_string(),
    };
    let f = x.to_f64().ok_or_else(err)?;
    if !f.is_finite() || f.abs() >= 9007199254740992.0 {
        return Err(err());
    }
    if T::from_f64(f).as_ref() != Some(x) {
        return Err(err());
    }
    let out = F::from_f64(f).ok_or_else(err)?;
    if out.to_f64() != Some(f) {
        return Err(err());
    }
    Ok(out)
}

pub fn gauss_to_complex<T: IntScalar, F: FloatScalar>(g: &Gauss<T>) -> Result<Complex<F>> {
    Ok(Complex::new(int_to_float(&g.re)?, int_to_float(&g.im)?))
}

pub fn vector_to_complex<T: IntScalar, F: FloatScalar>(v: &Vector<T>) -> Result<Vec<Complex<F>>> {
    v.entries().iter().map(gauss_to_complex).collect()
}

/// A square complex-float matrix (the float image of an integer Hamiltonian).
#[derive(Clone, Debug, PartialEq)]
pub struct FloatMatrix<F> {
    dim: usize,
    entries: Vec<Complex<F>>,
}

impl<F: FloatScalar> FloatMatrix<F> {
    pub fn from_exact<T: IntScalar>(m: &Matrix<T>) -> Result<Self> {
        let dim = m.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(gauss_to_complex(m.get(r, c))?);
            }
        }
        Ok(FloatMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<F> {
        self.entries[r * self.dim + c]
    }

    pub fn mul_slice(&self, v: &[Complex<F>]) -> Result<Vec<Complex<F>>> {
        if v.len() != self.dim {
            return Err(CaError::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok((0..self.dim)
            .map(|r| {
                let mut acc = Complex::zero();
                for c in 0..self.dim {
                    acc = acc + self.get(r, c) * v[c];
                }
                acc
            })
            .collect())
    }
}

/// Float images of a composite system's per-part Hamiltonians and optional
/// interaction, ready for continuum residual checks.
pub fn system_to_float<T: IntScalar, F: FloatScalar>(
    sys: &MultiCa<T>,
) -> Result<(Vec<FloatMatrix<F>>, Option<FloatMatrix<F>>)> {
    let hams = sys
        .parts()
        .iter()
        .map(|p| FloatMatrix::from_exact(p.hamiltonian().matrix()))
        .collect::<Result<Vec<_>>>()?;
    let inter = match sys.interaction() {
        None => None,
        Some(i) => Some(FloatMatrix::from_exact(i.matrix())?),
    };
    Ok((hams, inter))
}

/// Common interface of the two continuum evaluation paths.
pub trait TimeWave<F: FloatScalar> {
    fn dim(&self) -> usize;
    /// The discreteness scale `l`.
    fn scale(&self) -> F;
    fn eval(&self, t: F) -> Vec<Complex<F>>;
    /// Second time derivative (analytic or term-wise kernel derivative).
    fn eval_dd(&self, t: F) -> Vec<Complex<F>>;
    /// Whether off-lattice values at `t` are trustworthy.
    fn reliable(&self, t: F) -> bool;
    /// Reliable interval in time units, for error messages.
    fn reliable_interval(&self) -> (F, F);
}

/// Truncated sinc reconstruction of a sampled history over a finite window.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuumWave<F> {
    l: F,
    n_min: i64,
    dim: usize,
    samples: Vec<Vec<Complex<F>>>,
}

impl<F: FloatScalar> ContinuumWave<F> {
    pub fn from_samples(l: F, n_min: i64, samples: Vec<Vec<Complex<F>>>) -> Result<Self> {
        if l.is_nan() || l <= F::zero() || !l.is_finite() {
            return Err(CaError::NonPositiveScale);
        }
        if samples.is_empty() {
            return Err(CaError::EmptyWindow);
        }
        let dim = samples[0].len();
        if samples.iter().any(|s| s.len() != dim) {
            return Err(CaError::DimensionMismatch {
                expected: dim,
                found: samples
                    .iter()
                    .map(Vec::len)
                    .find(|&d| d != dim)
                    .unwrap_or(dim),
            });
        }
        Ok(ContinuumWave {
            l,
            n_min,
            dim,
            samples,
        })
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.samples.len() as i64 - 1
    }

    pub fn sample(&self, n: i64) -> Result<&[Complex<F>]> {
        if n < self.n_min || n > self.n_max() {
            return Err(CaError::OutOfWindow {
                n,
                lo: self.n_min,
                hi: self.n_max(),
            });
        }
        Ok(&self.samples[(n - self.n_min) as usize])
    }

    /// Indices whose off-lattice neighbourhood is reliable.
    pub fn reliable_lattice_range(&self) -> (i64, i64) {
        (self.n_min + RELIABLE_PAD, self.n_max() - RELIABLE_PAD)
    }
}

/// Exact float conversion of a trajectory followed by sinc reconstruction.
pub fn reconstruct<T: IntScalar, F: FloatScalar>(
    traj: &Trajectory<T>,
    l: F,
) -> Result<ContinuumWave<F>> {
    let samples = (traj.n_min()..=traj.n_max())
        .map(|n| vector_to_complex(traj.state(n)?))
        .collect::<Result<Vec<_>>>()?;
    ContinuumWave::from_samples(l, traj.n_min(), samples)
}

impl<F: FloatScalar> TimeWave<F> for ContinuumWave<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn scale(&self) -> F {
        self.l
    }

    fn eval(&self, t: F) -> Vec<Complex<F>> {
        // one rounding in u = t/l; the per-term x = u - n subtraction is then
        // exact near the peak, which keeps lattice evaluations at ~1e-13
        let u = t / self.l;
        let mut acc = vec![Complex::<F>::zero(); self.dim];
        for (k, s) in self.samples.iter().enumerate() {
            let x = u - F::from_i64(self.n_min + k as i64).expect("clock fits the float");
            let w = sinc(x);
            for (a, v) in acc.iter_mut().zip(s) {
                *a = *a + v.scale(w);
            }
        }
        acc
    }

    fn eval_dd(&self, t: F) -> Vec<Complex<F>> {
        let u = t / self.l;
        let inv_l2 = F::one() / (self.l * self.l);
        let mut acc = vec![Complex::<F>::zero(); self.dim];
        for (k, s) in self.samples.iter().enumerate() {
            let x = u - F::from_i64(self.n_min + k as i64).expect("clock fits the float");
            let w = sinc_dd(x) * inv_l2;
            for (a, v) in acc.iter_mut().zip(s) {
                *a = *a + v.scale(w);
            }
        }
        acc
    }

    fn reliable(&self, t: F) -> bool {
        let (lo, hi) = self.reliable_interval();
        lo <= t && t <= hi
    }

    fn reliable_interval(&self) -> (F, F) {
        let (lo, hi) = self.reliable_lattice_range();
        (
            F::from_i64(lo).expect("clock fits the float") * self.l,
            F::from_i64(hi).expect("clock fits the float") * self.l,
        )
    }
}

/// One bandlimited mode: per-component amplitudes times `e^{-i omega n}` in
/// clock units (`|omega| <= pi`).
#[derive(Clone, Debug, PartialEq)]
pub struct Mode<F> {
    pub amplitudes: Vec<Complex<F>>,
    pub omega: F,
}

/// A finite set of modes with analytic evaluation: the exact infinite-series
/// reconstruction of `psi_n = sum_j A_j e^{-i omega_j n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeWave<F> {
    l: F,
    dim: usize,
    modes: Vec<Mode<F>>,
}

impl<F: FloatScalar> ModeWave<F> {
    pub fn new(l: F, dim: usize, modes: Vec<Mode<F>>) -> Result<Self> {
        if l.is_nan() || l <= F::zero() || !l.is_finite() {
            return Err(CaError::NonPositiveScale);
        }
        for m in &modes {
            if m.omega.abs() > F::PI() {
                return Err(CaError::OutOfBand {
                    omega: m.omega.to_f64().unwrap_or(f64::NAN),
                });
            }
            if m.amplitudes.len() != dim {
                return Err(CaError::DimensionMismatch {
                    expected: dim,
                    found: m.amplitudes.len(),
                });
            }
        }
        Ok(ModeWave { l, dim, modes })
    }

    pub fn modes(&self) -> &[Mode<F>] {
        &self.modes
    }

    /// The exact lattice sample `psi_n`.
    pub fn sample_at(&self, n: i64) -> Vec<Complex<F>> {
        self.eval(F::from_i64(n).expect("clock fits the float") * self.l)
    }

    /// Sample a window, e.g. to hand the same signal to the truncated-sinc
    /// path.
    pub fn to_continuum_window(&self, n_min: i64, n_max: i64) -> Result<ContinuumWave<F>> {
        let samples = (n_min..=n_max).map(|n| self.sample_at(n)).collect();
        ContinuumWave::from_samples(self.l, n_min, samples)
    }

    /// Recover the exact mode content of a `p`-periodic history from one
    /// period of samples (discrete Fourier transform). For even `p` a Nyquist
    /// component is split evenly between `omega = +pi` and `-pi`, which is
    /// the bandlimited reconstruction of `(-1)^n`. Coefficients below
    /// `1e-12` of the largest are dropped as float noise.
    pub fn from_periodic_samples(l: F, period: &[Vec<Complex<F>>]) -> Result<Self> {
        let p = period.len();
        if p == 0 {
            return Err(CaError::EmptyWindow);
        }
        let dim = period[0].len();
        if period.iter().any(|s| s.len() != dim) {
            return Err(CaError::DimensionMismatch {
                expected: dim,
                found: period
                    .iter()
                    .map(Vec::len)
                    .find(|&d| d != dim)
                    .unwrap_or(dim),
            });
        }
        let pf = F::from_usize(p).expect("period fits the float");
        let two_pi = F::PI() + F::PI();
        // c_k = (1/p) sum_n psi_n e^{+ 2 pi i k n / p}
        let mut coeffs: Vec<Vec<Complex<F>>> = Vec::with_capacity(p);
        for k in 0..p {
            let mut c = vec![Complex::<F>::zero(); dim];
            for (n, s) in period.iter().enumerate() {
                let theta = two_pi * F::from_usize(k * n % p).expect("index fits") / pf;
                let phase = Complex::from_polar(F::one(), theta);
                for (acc, v) in c.iter_mut().zip(s) {
                    *acc = *acc + *v * phase;
                }
            }
            for acc in &mut c {
                *acc = acc.scale(F::one() / pf);
            }
            coeffs.push(c);
        }
        let max_norm = coeffs
            .iter()
            .flat_map(|c| c.iter().map(|z| z.norm()))
            .fold(F::zero(), F::max);
        let cutoff = max_norm * F::of(1e-12);
        let mut modes = Vec::new();
        for (k, c) in coeffs.into_iter().enumerate() {
            if c.iter().all(|z| z.norm() <= cutoff) {
                continue;
            }
            let signed = if 2 * k <= p {
                k as i64
            } else {
                k as i64 - p as i64
            };
            let omega = two_pi * F::from_i64(signed).expect("index fits") / pf;
            if 2 * k == p {
                // Nyquist: split into +-pi half-amplitude modes
                let half: Vec<Complex<F>> = c.iter().map(|z| z.scale(F::of(0.5))).collect();
                modes.push(Mode {
                    amplitudes: half.clone(),
                    omega: F::PI(),
                });
                modes.push(Mode {
                    amplitudes: half,
                    omega: -F::PI(),
                });
            } else {
                modes.push(Mode {
                    amplitudes: c,
                    omega,
                });
            }
        }
        ModeWave::new(l, dim, modes)
    }
}

impl<F: FloatScalar> TimeWave<F> for ModeWave<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn scale(&self) -> F {
        self.l
    }

    fn eval(&self, t: F) -> Vec<Complex<F>> {
        let u = t / self.l;
        let mut acc = vec![Complex::<F>::zero(); self.dim];
        for m in &self.modes {
            let phase = Complex::from_polar(F::one(), -m.omega * u);
            for (a, v) in acc.iter_mut().zip(&m.amplitudes) {
                *a = *a + *v * phase;
            }
        }
        acc
    }

    fn eval_dd(&self, t: F) -> Vec<Complex<F>> {
        let u = t / self.l;
        let mut acc = vec![Complex::<F>::zero(); self.dim];
        for m in &self.modes {
            let rate = m.omega / self.l;
            let phase = Complex::from_polar(F::one(), -m.omega * u).scale(-rate * rate);
            for (a, v) in acc.iter_mut().zip(&m.amplitudes) {
                *a = *a + *v * phase;
            }
        }
        acc
    }

    fn reliable(&self, _t: F) -> bool {
        true
    }

    fn reliable_interval(&self) -> (F, F) {
        (F::neg_infinity(), F::infinity())
    }
}

/// Shift-rule check at a lattice point: `psi(n l +- l)` against the stored
/// neighbour samples. At lattice points every truncated tail lands on a sinc
/// zero, so both errors sit at float precision regardless of padding.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShiftReport<F> {
    pub forward_err: F,
    pub backward_err: F,
}

pub fn shift_check<F: FloatScalar>(w: &ContinuumWave<F>, n: i64) -> Result<ShiftReport<F>> {
    if n - 1 < w.n_min() || n + 1 > w.n_max() {
        return Err(CaError::BoundarySite { n });
    }
    let nf = F::from_i64(n).expect("clock fits the float");
    let max_err = |vals: Vec<Complex<F>>, target: &[Complex<F>]| {
        vals.iter()
            .zip(target)
            .map(|(a, b)| (*a - *b).norm())
            .fold(F::zero(), F::max)
    };
    let fwd = w.eval((nf + F::one()) * w.scale());
    let back = w.eval((nf - F::one()) * w.scale());
    Ok(ShiftReport {
        forward_err: max_err(fwd, w.sample(n + 1)?),
        backward_err: max_err(back, w.sample(n - 1)?),
    })
}

fn require_reliable<F: FloatScalar>(w: &impl TimeWave<F>, t: F) -> Result<()> {
    if w.reliable(t) {
        Ok(())
    } else {
        let (lo, hi) = w.reliable_interval();
        Err(CaError::UnreliableRegion {
            t: t.to_f64().unwrap_or(f64::NAN),
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        })
    }
}

fn dagger_dot_f<F: FloatScalar>(a: &[Complex<F>], b: &[Complex<F>]) -> Complex<F> {
    a.iter()
        .zip(b)
        .fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * *y)
}

/// The continuum correlator `Re psi*(t) cosh[l d/dt] psi(t)`, evaluated as
/// `Re psi^dag(t) (psi(t+l) + psi(t-l)) / 2` (the exact action of the shift
/// operators on a bandlimited signal). At `t = n l` it equals half the
/// doubled lattice correlator `q_symmetrized(n)`.
pub fn q_continuum<F: FloatScalar>(w: &impl TimeWave<F>, t: F) -> Result<F> {
    let l = w.scale();
    require_reliable(w, t - l)?;
    require_reliable(w, t + l)?;
    let here = w.eval(t);
    let up = w.eval(t + l);
    let down = w.eval(t - l);
    let shifted: Vec<Complex<F>> = up
        .iter()
        .zip(&down)
        .map(|(a, b)| (*a + *b).scale(F::of(0.5)))
        .collect();
    Ok(dagger_dot_f(&here, &shifted).re)
}

/// The `l`-expansion of the continuum correlator at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpansionReport<F> {
    pub q_exact: F,
    pub q_order0: F,
    pub q_order2: F,
    pub remainder: F,
}

/// Split `q_continuum` into `|psi|^2 + (l^2/2) Re psi^dag psi'' + remainder`;
/// for fixed bandlimited data the remainder scales as `O(l^4)`.
pub fn expansion_error<F: FloatScalar>(w: &impl TimeWave<F>, t: F) -> Result<ExpansionReport<F>> {
    let q_exact = q_continuum(w, t)?;
    let here = w.eval(t);
    let ddot = w.eval_dd(t);
    let q_order0 = dagger_dot_f(&here, &here).re;
    let l = w.scale();
    let q_order2 = dagger_dot_f(&here, &ddot).re * l * l * F::of(0.5);
    Ok(ExpansionReport {
        q_exact,
        q_order0,
        q_order2,
        remainder: q_exact - (q_order0 + q_order2),
    })
}

/// A complex-float tensor (continuum image of a multipartite amplitude).
#[derive(Clone, Debug, PartialEq)]
pub struct FloatTensor<F> {
    shape: Vec<usize>,
    entries: Vec<Complex<F>>,
}

impl<F: FloatScalar> FloatTensor<F> {
    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        FloatTensor {
            shape,
            entries: vec![Complex::zero(); len],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn entries(&self) -> &[Complex<F>] {
        &self.entries
    }

    pub fn max_abs(&self) -> F {
        self.entries
            .iter()
            .map(|z| z.norm())
            .fold(F::zero(), F::max)
    }

    fn kron(&self, rhs: &Self) -> Self {
        let mut shape = self.shape.clone();
        shape.extend_from_slice(&rhs.shape);
        let mut entries = Vec::with_capacity(self.entries.len() * rhs.entries.len());
        for a in &self.entries {
            for b in &rhs.entries {
                entries.push(*a * *b);
            }
        }
        FloatTensor { shape, entries }
    }

    fn add_scaled(&mut self, rhs: &Self, c: Complex<F>) {
        for (a, b) in self.entries.iter_mut().zip(&rhs.entries) {
            *a = *a + *b * c;
        }
    }

    fn apply_axis(&self, m: &FloatMatrix<F>, axis: usize) -> Result<Self> {
        let d = self.shape[axis];
        if m.dim() != d {
            return Err(CaError::DimensionMismatch {
                expected: d,
                found: m.dim(),
            });
        }
        let inner: usize = self.shape[axis + 1..].iter().product();
        let outer: usize = self.shape[..axis].iter().product();
        let mut out = vec![Complex::<F>::zero(); self.entries.len()];
        for o in 0..outer {
            let base = o * d * inner;
            for a in 0..d {
                for b in 0..d {
                    let coeff = m.get(a, b);
                    for k in 0..inner {
                        out[base + a * inner + k] =
                            out[base + a * inner + k] + coeff * self.entries[base + b * inner + k];
                    }
                }
            }
        }
        Ok(FloatTensor {
            shape: self.shape.clone(),
            entries: out,
        })
    }

    fn apply_full(&self, m: &FloatMatrix<F>) -> Result<Self> {
        let flat = m.mul_slice(&self.entries)?;
        Ok(FloatTensor {
            shape: self.shape.clone(),
            entries: flat,
        })
    }

    fn dagger_dot(&self, rhs: &Self) -> Complex<F> {
        dagger_dot_f(&self.entries, &rhs.entries)
    }
}

/// Either continuum evaluation path, so multipartite products can mix them.
#[derive(Clone, Debug)]
pub enum Signal<F> {
    Sampled(ContinuumWave<F>),
    Modes(ModeWave<F>),
}

impl<F: FloatScalar> TimeWave<F> for Signal<F> {
    fn dim(&self) -> usize {
        match self {
            Signal::Sampled(w) => w.dim(),
            Signal::Modes(w) => w.dim(),
        }
    }

    fn scale(&self) -> F {
        match self {
            Signal::Sampled(w) => w.scale(),
            Signal::Modes(w) => w.scale(),
        }
    }

    fn eval(&self, t: F) -> Vec<Complex<F>> {
        match self {
            Signal::Sampled(w) => w.eval(t),
            Signal::Modes(w) => w.eval(t),
        }
    }

    fn eval_dd(&self, t: F) -> Vec<Complex<F>> {
        match self {
            Signal::Sampled(w) => w.eval_dd(t),
            Signal::Modes(w) => w.eval_dd(t),
        }
    }

    fn reliable(&self, t: F) -> bool {
        match self {
            Signal::Sampled(w) => w.reliable(t),
            Signal::Modes(w) => w.reliable(t),
        }
    }

    fn reliable_interval(&self) -> (F, F) {
        match self {
            Signal::Sampled(w) => w.reliable_interval(),
            Signal::Modes(w) => w.reliable_interval(),
        }
    }
}

/// A multipartite continuum wave as a superposition of per-clock factor
/// products, `Psi(t) = sum_terms coeff * prod_k w_k(t_k)`.
pub struct ProductWave<F> {
    l: F,
    dims: Vec<usize>,
    terms: Vec<(Complex<F>, Vec<Signal<F>>)>,
}

impl<F: FloatScalar> ProductWave<F> {
    pub fn new(terms: Vec<(Complex<F>, Vec<Signal<F>>)>) -> Result<Self> {
        let first = terms.first().ok_or(CaError::NoSubsystems)?;
        let l = first.1.first().ok_or(CaError::NoSubsystems)?.scale();
        let dims: Vec<usize> = first.1.iter().map(|w| w.dim()).collect();
        for (_, factors) in &terms {
            if factors.len() != dims.len() {
                return Err(CaError::DimensionMismatch {
                    expected: dims.len(),
                    found: factors.len(),
                });
            }
            for (k, w) in factors.iter().enumerate() {
                if w.dim() != dims[k] {
                    return Err(CaError::ShapeMismatch {
                        expected: dims.clone(),
                        found: factors.iter().map(|f| f.dim()).collect(),
                    });
                }
                if (w.scale() - l).abs() > F::epsilon() {
                    return Err(CaError::NonPositiveScale);
                }
            }
        }
        Ok(ProductWave { l, dims, terms })
    }

    pub fn m(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn scale(&self) -> F {
        self.l
    }

    fn check_reliable(&self, ts: &[F], margin: F) -> Result<()> {
        for (_, factors) in &self.terms {
            for (k, w) in factors.iter().enumerate() {
                for t in [ts[k] - margin, ts[k], ts[k] + margin] {
                    require_reliable(w, t)?;
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, ts: &[F]) -> Result<FloatTensor<F>> {
        if ts.len() != self.m() {
            return Err(CaError::DimensionMismatch {
                expected: self.m(),
                found: ts.len(),
            });
        }
        let mut acc = FloatTensor::zeros(self.dims.clone());
        for (coeff, factors) in &self.terms {
            let mut prod = FloatTensor {
                shape: vec![],
                entries: vec![Complex::new(F::one(), F::zero())],
            };
            for (k, w) in factors.iter().enumerate() {
                let vals = w.eval(ts[k]);
                prod = prod.kron(&FloatTensor {
                    shape: vec![self.dims[k]],
                    entries: vals,
                });
            }
            acc.add_scaled(&prod, *coeff);
        }
        Ok(acc)
    }
}

/// Residual of the modified multi-time equation in the unabsorbed (lattice)
/// normalization:
///
/// ```text
/// R(t) = sum_k [Psi(.. t_k + l ..) - Psi(.. t_k - l ..)]
///      + i (sum_k H_(k) + I) Psi(t)
/// ```
///
/// The sinh form of the continuum equation carries an absorbed factor of two
/// on its right-hand side; using `2 sinh = shift difference` keeps the
/// residual aligned with the exact lattice recursion, so at lattice points it
/// reproduces the integer residual to float precision.
pub fn multi_time_residual<F: FloatScalar>(
    wave: &ProductWave<F>,
    hams: &[FloatMatrix<F>],
    interaction: Option<&FloatMatrix<F>>,
    ts: &[F],
) -> Result<FloatTensor<F>> {
    if hams.len() != wave.m() {
        return Err(CaError::DimensionMismatch {
            expected: wave.m(),
            found: hams.len(),
        });
    }
    wave.check_reliable(ts, wave.l)?;
    let here = wave.eval(ts)?;
    let i = Complex::new(F::zero(), F::one());
    let mut acc = FloatTensor::zeros(wave.dims.clone());
    for k in 0..wave.m() {
        let mut up = ts.to_vec();
        up[k] = up[k] + wave.l;
        let mut down = ts.to_vec();
        down[k] = down[k] - wave.l;
        acc.add_scaled(&wave.eval(&up)?, Complex::new(F::one(), F::zero()));
        acc.add_scaled(&wave.eval(&down)?, Complex::new(-F::one(), F::zero()));
        acc.add_scaled(&here.apply_axis(&hams[k], k)?, i);
    }
    if let Some(inter) = interaction {
        acc.add_scaled(&here.apply_full(inter)?, i);
    }
    Ok(acc)
}

/// The multipartite continuum correlator
/// `sum_k Re Psi^dag(t) (Psi(.. t_k + l ..) + Psi(.. t_k - l ..)) / 2`;
/// per clock it is the cosh action, and as `l -> 0` it tends to
/// `m |Psi(t)|^2`.
pub fn multi_q_continuum<F: FloatScalar>(wave: &ProductWave<F>, ts: &[F]) -> Result<F> {
    wave.check_reliable(ts, wave.l)?;
    let here = wave.eval(ts)?;
    let mut total = F::zero();
    for k in 0..wave.m() {
        let mut up = ts.to_vec();
        up[k] = up[k] + wave.l;
        let mut down = ts.to_vec();
        down[k] = down[k] - wave.l;
        let mut sum = wave.eval(&up)?;
        sum.add_scaled(&wave.eval(&down)?, Complex::new(F::one(), F::zero()));
        total = total + here.dagger_dot(&sum).re * F::of(0.5);
    }
    Ok(total)
}

/// Outcome of solving the dispersion relation `2 sin(omega) = E`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum DispersionMode<F> {
    /// A real frequency solves the relation: a propagating plane wave.
    Propagating { omega: F },
    /// `|E| > 2`: no real frequency; the recursion grows without bound.
    Evanescent,
}

/// Whether `(E, omega)` satisfies the plane-wave dispersion relation of the
/// recursion, `2 sin(omega) = E`, to `1e-12`.
pub fn dispersion_check<F: FloatScalar>(e: F, omega: F) -> bool {
    ((omega.sin() + omega.sin()) - e).abs() <= F::of(1e-12)
}

/// Solve `2 sin(omega) = E` for the principal frequency.
pub fn dispersion_omega<F: FloatScalar>(e: F) -> DispersionMode<F> {
    let half = e * F::of(0.5);
    if half.abs() > F::one() {
        DispersionMode::Evanescent
    } else {
        DispersionMode::Propagating { omega: half.asin() }
    }
}

/// Largest residual `|psi_{n+1} - psi_{n-1} + i E psi_n|` of the plane wave
/// `psi_n = e^{-i omega n}` over the first `steps` clocks.
pub fn mode_recursion_residual<F: FloatScalar>(e: F, omega: F, steps: usize) -> F {
    let i = Complex::new(F::zero(), F::one());
    let mode = |n: i64| {
        Complex::from_polar(
            F::one(),
            -omega * F::from_i64(n).expect("clock fits the float"),
        )
    };
    let mut worst = F::zero();
    for n in 1..=steps as i64 {
        let r = mode(n + 1) - mode(n - 1) + i * mode(n).scale(e);
        worst = worst.max(r.norm());
    }
    worst
}

/// One row of the deformation-expansion scaling study.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingRow<F> {
    pub l: F,
    pub q_exact: F,
    pub q_order0: F,
    pub q_order2: F,
    pub remainder: F,
}

impl<F: FloatScalar> ScalingRow<F> {
    pub fn csv_header() -> &'static str {
        "l,q_exact,q_order0,q_order2,remainder"
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.l, self.q_exact, self.q_order0, self.q_order2, self.remainder
        )
    }
}

/// Evaluate the correlator expansion at `t` for a fixed set of modes with
/// *physical* frequencies, sampled at each scale in `ls` (per-sample
/// frequency `omega = Omega l` must stay inside the band).
pub fn deformation_scaling<F: FloatScalar>(
    physical_modes: &[(Complex<F>, F)],
    t: F,
    ls: &[F],
) -> Result<Vec<ScalingRow<F>>> {
    if ls.is_empty() || ls.iter().any(|l| l.is_nan() || *l <= F::zero()) {
        return Err(CaError::BadScaleList);
    }
    let mut rows = Vec::with_capacity(ls.len());
    for &l in ls {
        let modes: Vec<Mode<F>> = physical_modes
            .iter()
            .map(|(amp, big_omega)| Mode {
                amplitudes: vec![*amp],
                omega: *big_omega * l,
            })
            .collect();
        let wave = ModeWave::new(l, 1, modes)?;
        let report = expansion_error(&wave, t)?;
        rows.push(ScalingRow {
            l,
            q_exact: report.q_exact,
            q_order0: report.q_order0,
            q_order2: report.q_order2,
            remainder: report.remainder,
        });
    }
    Ok(rows)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope<F: FloatScalar>(points: &[(F, F)]) -> F {
    let n = F::from_usize(points.len()).expect("point count fits the float");
    let (mut sx, mut sy) = (F::zero(), F::zero());
    for (x, y) in points {
        sx = sx + x.abs().ln();
        sy = sy + y.abs().ln();
    }
    let (mx, my) = (sx / n, sy / n);
    let (mut num, mut den) = (F::zero(), F::zero());
    for (x, y) in points {
        let dx = x.abs().ln() - mx;
        num = num + dx * (y.abs().ln() - my);
        den = den + dx * dx;
    }
    num / den
}
