//! Multipartite CA in the many-time formulation.
//!
//! Each of the `m` subsystems carries its own clock variable, so a composite
//! wave `Psi` lives on an m-dimensional clock lattice and holds a
//! Gaussian-integer tensor per clock tuple. The equations of motion constrain
//! the *sum* of the per-clock symmetric differences:
//!
//! ```text
//! sum_k [Psi(.. n_k+1 ..) - Psi(.. n_k-1 ..)]
//!     = -i (sum_k H_(k) acting on index k + I) Psi(n)
//! ```
//!
//! With no interaction term this is solved by products of single-CA solutions
//! (one factor per clock) and by their Gaussian-integer superpositions, which
//! is exactly what [`assemble`] builds. With an interaction the sum-form
//! equation does not single out a marching direction, so this module
//! constructs candidate waves and *verifies* residuals for any interaction,
//! and marches forward only in the two closed cases: no interaction, and the
//! single-clock composite recursion of [`single_time_defect`], which exists
//! precisely to demonstrate why a shared clock fails.

use serde::{Deserialize, Serialize};

use crate::error::{CaError, Result};
use crate::gauss::Gauss;
use crate::linalg::{Hermitian, Matrix, Tensor, Vector};
use crate::scalar::IntScalar;
use crate::single::{SingleCa, Trajectory};

/// Exact rank of an amplitude reshaped across a bipartition; rank at most 1
/// means the amplitude is a product across the cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub rank: usize,
    pub is_product: bool,
}

/// A composite of `m` subsystem CAs with an optional interaction, stored as a
/// self-adjoint matrix on the full product space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiCa<T: IntScalar> {
    parts: Vec<SingleCa<T>>,
    interaction: Option<Hermitian<T>>,
}

impl<T: IntScalar> MultiCa<T> {
    pub fn new(parts: Vec<SingleCa<T>>, interaction: Option<Hermitian<T>>) -> Result<Self> {
        if parts.is_empty() {
            return Err(CaError::NoSubsystems);
        }
        let product_dim: usize = parts.iter().map(|p| p.dim()).product();
        if let Some(i) = &interaction {
            if i.dim() != product_dim {
                return Err(CaError::DimensionMismatch {
                    expected: product_dim,
                    found: i.dim(),
                });
            }
        }
        Ok(MultiCa { parts, interaction })
    }

    pub fn without_interaction(parts: Vec<SingleCa<T>>) -> Result<Self> {
        Self::new(parts, None)
    }

    pub fn m(&self) -> usize {
        self.parts.len()
    }

    pub fn part(&self, k: usize) -> &SingleCa<T> {
        &self.parts[k]
    }

    pub fn parts(&self) -> &[SingleCa<T>] {
        &self.parts
    }

    pub fn interaction(&self) -> Option<&Hermitian<T>> {
        self.interaction.as_ref()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.dim()).collect()
    }

    pub fn product_dim(&self) -> usize {
        self.parts.iter().map(|p| p.dim()).product()
    }

    /// The block Hamiltonian `sum_k 1 x .. x H_(k) x .. x 1` on the product
    /// space (Kronecker sum).
    pub fn kron_sum(&self) -> Hermitian<T> {
        let dims = self.dims();
        let total = self.product_dim();
        let mut acc = Matrix::zeros(total);
        for (k, part) in self.parts.iter().enumerate() {
            let mut term = Matrix::identity(1);
            for (j, &d) in dims.iter().enumerate() {
                let factor = if j == k {
                    part.hamiltonian().matrix().clone()
                } else {
                    Matrix::identity(d)
                };
                term = term.kron(&factor);
            }
            acc = acc
                .add(&term)
                .expect("kron factors share the product dimension");
        }
        Hermitian::new(acc).expect("a Kronecker sum of self-adjoint blocks is self-adjoint")
    }

    /// Kronecker sum plus interaction: the operator whose commutant supplies
    /// conserved correlators.
    pub fn total_hamiltonian(&self) -> Hermitian<T> {
        let base = self.kron_sum();
        match &self.interaction {
            None => base,
            Some(i) => Hermitian::new(
                base.matrix()
                    .add(i.matrix())
                    .expect("interaction dimension was validated"),
            )
            .expect("sum of self-adjoint matrices is self-adjoint"),
        }
    }
}

/// A hyperrectangle of clock tuples, `lo_k ..= hi_k` per clock.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClockWindow {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl ClockWindow {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(CaError::NoSubsystems);
        }
        for (k, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if h < l {
                return Err(CaError::DegenerateWindow { clock: k });
            }
        }
        Ok(ClockWindow { lo, hi })
    }

    /// A window `[0, len-1]` in every one of `m` clock directions.
    pub fn cube(m: usize, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(CaError::EmptyWindow);
        }
        Self::new(vec![0; m], vec![len as i64 - 1; m])
    }

    pub fn m(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn len(&self, k: usize) -> usize {
        (self.hi[k] - self.lo[k] + 1) as usize
    }

    pub fn total_len(&self) -> usize {
        (0..self.m()).map(|k| self.len(k)).product()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees hi >= lo
    }

    pub fn contains(&self, tuple: &[i64]) -> bool {
        tuple.len() == self.m()
            && tuple
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(n, (l, h))| l <= n && n <= h)
    }

    /// Interior: every clock strictly between its bounds.
    pub fn is_interior(&self, tuple: &[i64]) -> bool {
        tuple.len() == self.m()
            && tuple
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(n, (l, h))| l < n && n < h)
    }

    /// The interior sub-window, one slice smaller on every face.
    pub fn interior(&self) -> Result<ClockWindow> {
        for k in 0..self.m() {
            if self.len(k) < 3 {
                return Err(CaError::DegenerateWindow { clock: k });
            }
        }
        ClockWindow::new(
            self.lo.iter().map(|l| l + 1).collect(),
            self.hi.iter().map(|h| h - 1).collect(),
        )
    }

    /// Row-major offset of a tuple inside the window.
    pub fn index_of(&self, tuple: &[i64]) -> Result<usize> {
        if !self.contains(tuple) {
            return Err(CaError::TupleOutOfWindow {
                tuple: tuple.to_vec(),
            });
        }
        let mut off = 0usize;
        for k in 0..self.m() {
            off = off * self.len(k) + (tuple[k] - self.lo[k]) as usize;
        }
        Ok(off)
    }

    /// All tuples in row-major order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        TupleIter {
            window: self,
            next: Some(self.lo.clone()),
        }
    }

    /// All interior tuples; empty if some direction has no interior.
    pub fn interior_tuples(&self) -> Box<dyn Iterator<Item = Vec<i64>> + '_> {
        match self.interior() {
            Err(_) => Box::new(std::iter::empty()),
            Ok(inner) => Box::new(self.tuples().filter(move |t| inner.contains(t))),
        }
    }
}

struct TupleIter<'a> {
    window: &'a ClockWindow,
    next: Option<Vec<i64>>,
}

impl Iterator for TupleIter<'_> {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let current = self.next.take()?;
        // odometer increment, last clock fastest
        let mut bumped = current.clone();
        for k in (0..bumped.len()).rev() {
            if bumped[k] < self.window.hi[k] {
                bumped[k] += 1;
                self.next = Some(bumped);
                return Some(current);
            }
            bumped[k] = self.window.lo[k];
        }
        self.next = None;
        Some(current)
    }
}

/// A multipartite wave: one Gaussian-integer tensor per clock tuple of a
/// window, stored densely in row-major tuple order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MultiWaveRepr<T>", into = "MultiWaveRepr<T>")]
#[serde(bound(serialize = "T: IntScalar", deserialize = "T: IntScalar"))]
pub struct MultiWave<T: IntScalar> {
    window: ClockWindow,
    shape: Vec<usize>,
    values: Vec<Tensor<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: IntScalar", deserialize = "T: IntScalar"))]
struct MultiWaveRepr<T: IntScalar> {
    m: usize,
    shape: Vec<usize>,
    lo: Vec<i64>,
    hi: Vec<i64>,
    values: Vec<WaveEntry<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: IntScalar", deserialize = "T: IntScalar"))]
struct WaveEntry<T: IntScalar> {
    n: Vec<i64>,
    tensor: Vec<Gauss<T>>,
}

impl<T: IntScalar> From<MultiWave<T>> for MultiWaveRepr<T> {
    fn from(w: MultiWave<T>) -> Self {
        let mut values = Vec::with_capacity(w.values.len());
        for (tuple, tensor) in w.window.tuples().zip(&w.values) {
            values.push(WaveEntry {
                n: tuple,
                tensor: tensor.entries().to_vec(),
            });
        }
        MultiWaveRepr {
            m: w.window.m(),
            shape: w.shape.clone(),
            lo: w.window.lo.clone(),
            hi: w.window.hi.clone(),
            values,
        }
    }
}

impl<T: IntScalar> TryFrom<MultiWaveRepr<T>> for MultiWave<T> {
    type Error = CaError;
    fn try_from(r: MultiWaveRepr<T>) -> Result<Self> {
        let window = ClockWindow::new(r.lo, r.hi)?;
        if r.m != window.m() {
            return Err(CaError::DimensionMismatch {
                expected: window.m(),
                found: r.m,
            });
        }
        if r.values.len() != window.total_len() {
            return Err(CaError::WindowTooSmall {
                required: window.total_len(),
                found: r.values.len(),
            });
        }
        let mut values = Vec::with_capacity(r.values.len());
        for (expected, entry) in window.tuples().zip(r.values) {
            if entry.n != expected {
                return Err(CaError::TupleOutOfWindow { tuple: entry.n });
            }
            values.push(Tensor::new(r.shape.clone(), entry.tensor)?);
        }
        MultiWave::new(window, r.shape, values)
    }
}

impl<T: IntScalar> MultiWave<T> {
    pub fn new(window: ClockWindow, shape: Vec<usize>, values: Vec<Tensor<T>>) -> Result<Self> {
        if values.len() != window.total_len() {
            return Err(CaError::WindowTooSmall {
                required: window.total_len(),
                found: values.len(),
            });
        }
        for t in &values {
            if t.shape() != shape.as_slice() {
                return Err(CaError::ShapeMismatch {
                    expected: shape.clone(),
                    found: t.shape().to_vec(),
                });
            }
        }
        Ok(MultiWave {
            window,
            shape,
            values,
        })
    }

    pub fn zero(window: ClockWindow, shape: Vec<usize>) -> Self {
        let values = vec![Tensor::zeros(shape.clone()); window.total_len()];
        MultiWave {
            window,
            shape,
            values,
        }
    }

    pub fn window(&self) -> &ClockWindow {
        &self.window
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn m(&self) -> usize {
        self.window.m()
    }

    pub fn value(&self, tuple: &[i64]) -> Result<&Tensor<T>> {
        Ok(&self.values[self.window.index_of(tuple)?])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Tensor::is_zero)
    }

    /// Slicewise Gaussian-integer combination `a u + b v` over a shared
    /// window; superpositions of solutions stay solutions.
    pub fn linear_combination(
        a: &Gauss<T>,
        u: &MultiWave<T>,
        b: &Gauss<T>,
        v: &MultiWave<T>,
    ) -> Result<MultiWave<T>> {
        if u.window != v.window || u.shape != v.shape {
            return Err(CaError::MismatchedTrajectories);
        }
        let values = u
            .values
            .iter()
            .zip(&v.values)
            .map(|(x, y)| x.scale(a).add(&y.scale(b)))
            .collect::<Result<Vec<_>>>()?;
        MultiWave::new(u.window.clone(), u.shape.clone(), values)
    }
}

/// One factorized term `coeff * prod_k psi^(k)(n_k)` of a multipartite wave.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductTerm<T: IntScalar> {
    pub coeff: Gauss<T>,
    pub factors: Vec<Trajectory<T>>,
}

impl<T: IntScalar> ProductTerm<T> {
    pub fn new(coeff: Gauss<T>, factors: Vec<Trajectory<T>>) -> Self {
        ProductTerm { coeff, factors }
    }
}

/// Build `Psi(n) = sum_terms coeff * prod_k psi^(k)(n_k)` over the window,
/// exactly. Every factor trajectory must cover its clock range and a window
/// of at least two slices per clock is required (the initial data of the
/// recursion).
pub fn assemble<T: IntScalar>(
    terms: &[ProductTerm<T>],
    window: &ClockWindow,
) -> Result<MultiWave<T>> {
    let m = window.m();
    for k in 0..m {
        if window.len(k) < 2 {
            return Err(CaError::WindowTooSmall {
                required: 2,
                found: window.len(k),
            });
        }
    }
    let mut shape: Option<Vec<usize>> = None;
    for term in terms {
        if term.factors.len() != m {
            return Err(CaError::DimensionMismatch {
                expected: m,
                found: term.factors.len(),
            });
        }
        let dims: Vec<usize> = term.factors.iter().map(|f| f.dim()).collect();
        match &shape {
            None => shape = Some(dims),
            Some(s) => {
                if *s != dims {
                    return Err(CaError::ShapeMismatch {
                        expected: s.clone(),
                        found: dims,
                    });
                }
            }
        }
        for (k, f) in term.factors.iter().enumerate() {
            if f.n_min() > window.lo[k] || f.n_max() < window.hi[k] {
                return Err(CaError::WindowNotCovered {
                    clock: k,
                    lo: window.lo[k],
                    hi: window.hi[k],
                });
            }
        }
    }
    let shape = match shape {
        Some(s) => s,
        None => return Err(CaError::NoSubsystems),
    };

    let mut values = Vec::with_capacity(window.total_len());
    for tuple in window.tuples() {
        let mut acc = Tensor::zeros(shape.clone());
        for term in terms {
            let mut prod = Tensor::scalar(term.coeff.clone());
            for (k, f) in term.factors.iter().enumerate() {
                prod = prod.kron(&Tensor::from_vector(f.state(tuple[k])?));
            }
            acc = acc.add(&prod)?;
        }
        values.push(acc);
    }
    MultiWave::new(window.clone(), shape, values)
}

fn check_system<T: IntScalar>(wave: &MultiWave<T>, sys: &MultiCa<T>) -> Result<()> {
    if sys.m() != wave.m() {
        return Err(CaError::DimensionMismatch {
            expected: wave.m(),
            found: sys.m(),
        });
    }
    let dims = sys.dims();
    if dims.as_slice() != wave.shape() {
        return Err(CaError::ShapeMismatch {
            expected: wave.shape().to_vec(),
            found: dims,
        });
    }
    Ok(())
}

fn shifted(tuple: &[i64], k: usize, by: i64) -> Vec<i64> {
    let mut t = tuple.to_vec();
    t[k] += by;
    t
}

/// Apply the interaction matrix to the flattened tensor and reshape.
fn apply_full<T: IntScalar>(m: &Hermitian<T>, t: &Tensor<T>) -> Result<Tensor<T>> {
    let flat = t.to_vector();
    let out = m.mul_vec(&flat)?;
    Tensor::from_flat_vector(t.shape().to_vec(), &out)
}

/// The many-time equation-of-motion residual on the interior sub-window:
///
/// ```text
/// R(n) = sum_k [Psi(.. n_k+1 ..) - Psi(.. n_k-1 ..)]
///      + i sum_k H_(k) Psi(n)  + i I Psi(n)
/// ```
///
/// identically zero exactly when `Psi` solves the equations there.
pub fn multi_eom_residual<T: IntScalar>(
    wave: &MultiWave<T>,
    sys: &MultiCa<T>,
) -> Result<MultiWave<T>> {
    check_system(wave, sys)?;
    let inner = wave.window().interior()?;
    let mut values = Vec::with_capacity(inner.total_len());
    for tuple in inner.tuples() {
        let mut acc = Tensor::zeros(wave.shape().to_vec());
        let here = wave.value(&tuple)?;
        for k in 0..sys.m() {
            let up = wave.value(&shifted(&tuple, k, 1))?;
            let down = wave.value(&shifted(&tuple, k, -1))?;
            acc = acc.add(&up.sub(down)?)?;
            let h_here = here.apply_axis(sys.part(k).hamiltonian().matrix(), k)?;
            acc = acc.add(&h_here.mul_i())?;
        }
        if let Some(i) = sys.interaction() {
            acc = acc.add(&apply_full(i, here)?.mul_i())?;
        }
        values.push(acc);
    }
    MultiWave::new(inner, wave.shape().to_vec(), values)
}

/// The integer multipartite action
///
/// ```text
/// S = sum_k sum_{n_k interior} [ Im(Psi^dag Psidot_k) + Psi^dag H_(k) Psi ]
///   + sum_n Psi^dag I Psi
/// ```
///
/// where the k-th sum runs over tuples whose k-th clock is interior (other
/// clocks over the full window) so that the difference operator is defined on
/// the same sites as the matching Hamiltonian term. Vanishes on factorized
/// (and superposed) solutions when the interaction is absent.
pub fn multi_action<T: IntScalar>(wave: &MultiWave<T>, sys: &MultiCa<T>) -> Result<T> {
    check_system(wave, sys)?;
    wave.window().interior()?; // every direction must have an interior
    let mut total = T::zero();
    for k in 0..sys.m() {
        for tuple in wave.window().tuples() {
            if tuple[k] <= wave.window().lo()[k] || tuple[k] >= wave.window().hi()[k] {
                continue;
            }
            let here = wave.value(&tuple)?;
            let dot = wave
                .value(&shifted(&tuple, k, 1))?
                .sub(wave.value(&shifted(&tuple, k, -1))?)?;
            let kinetic = here.dagger_dot(&dot)?.im;
            let potential =
                here.dagger_dot(&here.apply_axis(sys.part(k).hamiltonian().matrix(), k)?)?;
            assert!(
                potential.im.is_zero(),
                "Psi^dag H Psi must be real for self-adjoint H"
            );
            total = total + kinetic + potential.re;
        }
    }
    if let Some(i) = sys.interaction() {
        for tuple in wave.window().tuples() {
            let here = wave.value(&tuple)?;
            let v = here.dagger_dot(&apply_full(i, here)?)?;
            assert!(
                v.im.is_zero(),
                "Psi^dag I Psi must be real for self-adjoint I"
            );
            total = total + v.re;
        }
    }
    Ok(total)
}

/// The per-clock two-point correlator
/// `c_k(n) = Psi^dag(n) G Psi(.. n_k-1 ..) + Psi^dag(.. n_k-1 ..) G Psi(n)`,
/// a real integer for self-adjoint `G`. For factorized solutions it is
/// constant under shifts of `n_k` (the other clocks held fixed).
pub fn clock_correlator<T: IntScalar>(
    wave: &MultiWave<T>,
    g: &Hermitian<T>,
    k: usize,
    tuple: &[i64],
) -> Result<T> {
    if k >= wave.m() {
        return Err(CaError::InvalidAxis {
            axis: k,
            rank: wave.m(),
        });
    }
    let here = wave.value(tuple)?;
    let back = wave.value(&shifted(tuple, k, -1))?;
    let z = here.dagger_dot(&apply_full(g, back)?)?;
    // reverse-order term is the conjugate for self-adjoint G
    Ok(z.re.clone() + z.re)
}

/// The discrete continuity combination at an interior tuple:
/// `sum_k [c_k(.. n_k+1 ..) - c_k(n)]`. Zero for every solution wave and
/// every `G` commuting with the total Hamiltonian (Kronecker sum plus
/// interaction).
pub fn multi_conserved_divergence<T: IntScalar>(
    wave: &MultiWave<T>,
    g: &Hermitian<T>,
    tuple: &[i64],
) -> Result<T> {
    if !wave.window().is_interior(tuple) {
        return Err(CaError::BoundaryTuple {
            tuple: tuple.to_vec(),
        });
    }
    let mut total = T::zero();
    for k in 0..wave.m() {
        let fwd = clock_correlator(wave, g, k, &shifted(tuple, k, 1))?;
        let here = clock_correlator(wave, g, k, tuple)?;
        total = total + fwd - here;
    }
    Ok(total)
}

/// The doubled symmetrized correlator
/// `sum_k Re Psi^dag(n) [Psi(.. n_k+1 ..) + Psi(.. n_k-1 ..)]`.
///
/// Note: this pointwise quantity is *not* constant across clock tuples at
/// finite discreteness (the factors' squared norms are not conserved); what
/// the dynamics conserves is the divergence combination above and, for
/// factorized waves, each `c_k` along its own clock.
pub fn multi_q<T: IntScalar>(wave: &MultiWave<T>, tuple: &[i64]) -> Result<T> {
    if !wave.window().is_interior(tuple) {
        return Err(CaError::BoundaryTuple {
            tuple: tuple.to_vec(),
        });
    }
    let here = wave.value(tuple)?;
    let mut total = T::zero();
    for k in 0..wave.m() {
        let sum = wave
            .value(&shifted(tuple, k, 1))?
            .add(wave.value(&shifted(tuple, k, -1))?)?;
        total = total + here.dagger_dot(&sum)?.re;
    }
    Ok(total)
}

/// Per-clock defect of single-clock composite evolution against independent
/// factor evolution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectReport<T: IntScalar> {
    /// `Psi_n - prod_k psi^(k)_n` for `n = 0 ..= steps + 1`.
    pub defects: Vec<Tensor<T>>,
    /// Earliest clock with a nonzero defect.
    pub first_nonzero_n: Option<i64>,
}

impl<T: IntScalar> Serialize for DefectReport<T> {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        #[derive(Serialize)]
        #[serde(bound(serialize = "T: IntScalar"))]
        struct Entry<'a, T: IntScalar> {
            n: i64,
            tensor: &'a Tensor<T>,
        }
        let entries: Vec<Entry<'_, T>> = self
            .defects
            .iter()
            .enumerate()
            .map(|(n, tensor)| Entry {
                n: n as i64,
                tensor,
            })
            .collect();
        let mut s = serializer.serialize_struct("DefectReport", 2)?;
        s.serialize_field("first_nonzero_n", &self.first_nonzero_n)?;
        s.serialize_field("defects", &entries)?;
        s.end()
    }
}

/// Evolve factorized initial data two ways: on the product space with the
/// single shared clock (`Psi_{n+1} = Psi_{n-1} - i H_0 Psi_n`, `H_0` the
/// Kronecker sum) and factor-by-factor; report the difference per clock.
///
/// The symmetric difference does not obey the Leibniz rule, so the two
/// disagree as soon as at least two factors move: the shared clock
/// manufactures correlations that the many-time formulation avoids.
pub fn single_time_defect<T: IntScalar>(
    sys: &MultiCa<T>,
    initial: &[(Vector<T>, Vector<T>)],
    steps: usize,
) -> Result<DefectReport<T>> {
    if sys.interaction().is_some() {
        return Err(CaError::InteractionNotSupported);
    }
    if initial.len() != sys.m() {
        return Err(CaError::DimensionMismatch {
            expected: sys.m(),
            found: initial.len(),
        });
    }
    let mut factor_trajs = Vec::with_capacity(sys.m());
    for (k, (p0, p1)) in initial.iter().enumerate() {
        factor_trajs.push(sys.part(k).evolve(p0.clone(), p1.clone(), steps)?);
    }

    let product_at = |n: i64| -> Result<Tensor<T>> {
        let mut prod = Tensor::scalar(Gauss::one());
        for f in &factor_trajs {
            prod = prod.kron(&Tensor::from_vector(f.state(n)?));
        }
        Ok(prod)
    };

    let composite_ca = SingleCa::new(sys.kron_sum());
    let psi0 = product_at(0)?.to_vector();
    let psi1 = product_at(1)?.to_vector();
    let composite = composite_ca.evolve(psi0, psi1, steps)?;

    let dims = sys.dims();
    let mut defects = Vec::with_capacity(steps + 2);
    let mut first_nonzero_n = None;
    for n in 0..=(steps as i64 + 1) {
        let flat = composite.state(n)?;
        let composite_tensor = Tensor::from_flat_vector(dims.clone(), flat)?;
        let defect = composite_tensor.sub(&product_at(n)?)?;
        if first_nonzero_n.is_none() && !defect.is_zero() {
            first_nonzero_n = Some(n);
        }
        defects.push(defect);
    }
    Ok(DefectReport {
        defects,
        first_nonzero_n,
    })
}

/// The time-dependent antisymmetric two-party wave
/// `Psi(n1, n2) = a(n1) x b(n2) - b(n1) x a(n2)`
/// built from two solutions of the same two-level CA. With linearly
/// independent initial data its witness rank is 2, so it is entangled at
/// every pair of clocks; being a superposition of products of solutions it
/// solves the many-time equations exactly.
pub fn bell_state<T: IntScalar>(
    a: &Trajectory<T>,
    b: &Trajectory<T>,
    window: &ClockWindow,
) -> Result<MultiWave<T>> {
    if window.m() != 2 {
        return Err(CaError::DimensionMismatch {
            expected: 2,
            found: window.m(),
        });
    }
    if a.dim() != 2 || b.dim() != 2 {
        return Err(CaError::DimensionMismatch {
            expected: 2,
            found: a.dim().max(b.dim()),
        });
    }
    if a.ca() != b.ca() {
        return Err(CaError::MismatchedTrajectories);
    }
    // linear independence of the initial data: the stacked 2 x 4 slice
    // matrix must have full rank, otherwise every determinant witness
    // vanishes trivially
    let n0 = a.n_min().max(b.n_min());
    let mut rows = Vec::with_capacity(8);
    for t in [a, b] {
        rows.extend(t.state(n0)?.entries().iter().cloned());
        rows.extend(t.state(n0 + 1)?.entries().iter().cloned());
    }
    let stacked = crate::linalg::BipartitionMatrix {
        rows: 2,
        cols: 4,
        entries: rows,
    };
    if stacked.rank() < 2 {
        return Err(CaError::DependentInitialData);
    }

    let terms = [
        ProductTerm::new(Gauss::one(), vec![a.clone(), b.clone()]),
        ProductTerm::new(-&Gauss::one(), vec![b.clone(), a.clone()]),
    ];
    assemble(&terms, window)
}

/// Exact product test for the amplitude at one clock tuple: reshape across
/// the bipartition and compute the rank over the Gaussian integers by
/// fraction-free elimination. Rank at most 1 means the amplitude factorizes
/// across the cut; anything higher witnesses entanglement.
pub fn entanglement_witness<T: IntScalar>(
    wave: &MultiWave<T>,
    tuple: &[i64],
    row_axes: &[usize],
) -> Result<WitnessReport> {
    let tensor = wave.value(tuple)?;
    let matrix = tensor.bipartition_matrix(row_axes)?;
    let rank = matrix.rank();
    Ok(WitnessReport {
        rank,
        is_product: rank <= 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_hermitian, random_vector};
    use crate::{GaussInt, GaussVector, HermitianMatrix, Int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Ca = SingleCa<Int>;
    type Wave = MultiWave<Int>;

    fn h_one() -> HermitianMatrix {
        HermitianMatrix::of(&[&[(1, 0)]]).unwrap()
    }

    fn sigma_x() -> HermitianMatrix {
        HermitianMatrix::of(&[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]]).unwrap()
    }

    fn e(k: usize) -> GaussVector {
        GaussVector::basis(2, k)
    }

    fn h1_solution(steps: usize) -> Trajectory<Int> {
        Ca::new(h_one())
            .evolve(
                GaussVector::of(&[(1, 0)]),
                GaussVector::of(&[(1, 0)]),
                steps,
            )
            .unwrap()
    }

    fn sx_solution(p0: GaussVector, p1: GaussVector, steps: usize) -> Trajectory<Int> {
        Ca::new(sigma_x()).evolve(p0, p1, steps).unwrap()
    }

    fn random_solution(rng: &mut ChaCha8Rng, dim: usize, steps: usize) -> Trajectory<Int> {
        let h = random_hermitian(rng, dim, 3);
        let ca = Ca::new(h);
        loop {
            let t = ca
                .evolve(
                    random_vector(rng, dim, 3),
                    random_vector(rng, dim, 3),
                    steps,
                )
                .unwrap();
            // reject degenerate seeds whose product wave would have a zero slice
            if (t.n_min()..=t.n_max()).all(|n| !t.state(n).unwrap().is_zero()) {
                return t;
            }
        }
    }

    #[test]
    fn window_iteration_is_row_major() {
        let w = ClockWindow::new(vec![0, 10], vec![1, 12]).unwrap();
        let tuples: Vec<Vec<i64>> = w.tuples().collect();
        assert_eq!(
            tuples,
            vec![
                vec![0, 10],
                vec![0, 11],
                vec![0, 12],
                vec![1, 10],
                vec![1, 11],
                vec![1, 12]
            ]
        );
        for (i, t) in tuples.iter().enumerate() {
            assert_eq!(w.index_of(t).unwrap(), i);
        }
        assert!(w.interior().is_err());
        let w3 = ClockWindow::cube(2, 3).unwrap();
        assert_eq!(w3.interior_tuples().collect::<Vec<_>>(), vec![vec![1, 1]]);
    }

    #[test]
    fn assemble_constant_product_wave() {
        let free = Ca::new(HermitianMatrix::zeros(2));
        let t = free.evolve(e(0), e(0), 4).unwrap();
        let window = ClockWindow::cube(2, 4).unwrap();
        let wave = assemble(
            &[ProductTerm::new(GaussInt::one(), vec![t.clone(), t])],
            &window,
        )
        .unwrap();
        let expect = Tensor::from_vector(&e(0)).kron(&Tensor::from_vector(&e(0)));
        for tuple in window.tuples() {
            assert_eq!(*wave.value(&tuple).unwrap(), expect);
        }
    }

    #[test]
    fn assemble_matches_kron_oracle_at_a_tuple() {
        let scalar = h1_solution(3);
        let spin = sx_solution(e(0), e(0), 3);
        let window = ClockWindow::cube(2, 4).unwrap();
        let wave = assemble(
            &[ProductTerm::new(
                GaussInt::one(),
                vec![scalar.clone(), spin.clone()],
            )],
            &window,
        )
        .unwrap();
        let oracle = Tensor::from_vector(scalar.state(2).unwrap())
            .kron(&Tensor::from_vector(spin.state(2).unwrap()));
        assert_eq!(*wave.value(&[2, 2]).unwrap(), oracle);
    }

    #[test]
    fn assemble_rejects_uncovered_windows() {
        let t = h1_solution(2); // covers [0, 3]
        let window = ClockWindow::cube(2, 6).unwrap();
        let err = assemble(
            &[ProductTerm::new(GaussInt::one(), vec![t.clone(), t])],
            &window,
        )
        .unwrap_err();
        assert_eq!(
            err,
            CaError::WindowNotCovered {
                clock: 0,
                lo: 0,
                hi: 5
            }
        );
    }

    #[test]
    fn factorized_solutions_have_zero_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for m in [2usize, 3] {
            for _ in 0..4 {
                let window = ClockWindow::cube(m, 5).unwrap();
                let factors: Vec<Trajectory<Int>> = (0..m)
                    .map(|_| {
                        let dim = rng.gen_range(1..=3);
                        random_solution(&mut rng, dim, 6)
                    })
                    .collect();
                let sys =
                    MultiCa::without_interaction(factors.iter().map(|f| f.ca().clone()).collect())
                        .unwrap();
                let wave =
                    assemble(&[ProductTerm::new(GaussInt::of(1, 1), factors)], &window).unwrap();
                let residual = multi_eom_residual(&wave, &sys).unwrap();
                assert!(residual.is_zero(), "m = {m}");
            }
        }
    }

    #[test]
    fn zero_wave_has_zero_residual_and_action() {
        let sys =
            MultiCa::without_interaction(vec![Ca::new(sigma_x()), Ca::new(sigma_x())]).unwrap();
        let wave = Wave::zero(ClockWindow::cube(2, 4).unwrap(), vec![2, 2]);
        assert!(multi_eom_residual(&wave, &sys).unwrap().is_zero());
        assert_eq!(multi_action(&wave, &sys).unwrap(), Int::from(0));
    }

    #[test]
    fn non_solution_factors_leave_a_residual() {
        // constant scalar history under H = [1] is not a solution
        let flat = Trajectory::new(
            Ca::new(h_one()),
            0,
            (0..3).map(|_| GaussVector::of(&[(1, 0)])).collect(),
        )
        .unwrap();
        let sys = MultiCa::without_interaction(vec![Ca::new(h_one()), Ca::new(h_one())]).unwrap();
        let window = ClockWindow::cube(2, 3).unwrap();
        let wave = assemble(
            &[ProductTerm::new(GaussInt::one(), vec![flat.clone(), flat])],
            &window,
        )
        .unwrap();
        let residual = multi_eom_residual(&wave, &sys).unwrap();
        assert!(!residual.is_zero());
        // direct evaluation oracle at the single interior tuple (1,1):
        // all values are 1, so R = sum_k (1 - 1) + i(1 + 1) = 2i
        assert_eq!(
            *residual.value(&[1, 1]).unwrap(),
            Tensor::new(vec![1, 1], vec![GaussInt::of(0, 2)]).unwrap()
        );
    }

    #[test]
    fn residual_includes_the_interaction_term() {
        // dims (1,1), H_k = 0, I = [3]: R = i * 3 * Psi at the interior
        let parts = vec![
            Ca::new(HermitianMatrix::zeros(1)),
            Ca::new(HermitianMatrix::zeros(1)),
        ];
        let inter = HermitianMatrix::of(&[&[(3, 0)]]).unwrap();
        let sys = MultiCa::new(parts, Some(inter)).unwrap();
        let window = ClockWindow::cube(2, 3).unwrap();
        let ones = vec![Tensor::new(vec![1, 1], vec![GaussInt::one()]).unwrap(); 9];
        let wave = Wave::new(window, vec![1, 1], ones).unwrap();
        let residual = multi_eom_residual(&wave, &sys).unwrap();
        assert_eq!(
            *residual.value(&[1, 1]).unwrap(),
            Tensor::new(vec![1, 1], vec![GaussInt::of(0, 3)]).unwrap()
        );
    }

    #[test]
    fn interaction_as_extra_hamiltonian_solves_m1_system() {
        // with m = 1 the many-time equation is the single-CA recursion for
        // H + I, which the exact evolver can march directly
        let h = HermitianMatrix::of(&[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]]).unwrap();
        let i_term = HermitianMatrix::of(&[&[(1, 0), (0, -1)], &[(0, 1), (-1, 0)]]).unwrap();
        let total = HermitianMatrix::new(h.matrix().add(i_term.matrix()).unwrap()).unwrap();
        let traj = Ca::new(total.clone())
            .evolve(e(0), GaussVector::of(&[(1, 0), (1, 1)]), 6)
            .unwrap();
        let sys = MultiCa::new(vec![Ca::new(h)], Some(i_term)).unwrap();
        let window = ClockWindow::new(vec![0], vec![7]).unwrap();
        let wave = assemble(&[ProductTerm::new(GaussInt::one(), vec![traj])], &window).unwrap();
        assert!(multi_eom_residual(&wave, &sys).unwrap().is_zero());

        // divergence law with G = total Hamiltonian (commutes with itself)
        let g = sys.total_hamiltonian();
        for tuple in wave.window().interior_tuples() {
            assert_eq!(
                multi_conserved_divergence(&wave, &g, &tuple).unwrap(),
                Int::from(0)
            );
        }
    }

    #[test]
    fn residual_is_linear_in_the_wave() {
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        let window = ClockWindow::cube(2, 4).unwrap();
        // dims differ per clock: sigma_x (2) and scalar (1)
        let sys = MultiCa::without_interaction(vec![Ca::new(sigma_x()), Ca::new(h_one())]).unwrap();
        let mut rand_wave = || {
            let values = (0..window.total_len())
                .map(|_| {
                    Tensor::new(
                        vec![2, 1],
                        (0..2)
                            .map(|_| GaussInt::of(rng.gen_range(-3..=3), rng.gen_range(-3..=3)))
                            .collect(),
                    )
                    .unwrap()
                })
                .collect();
            Wave::new(window.clone(), vec![2, 1], values).unwrap()
        };
        let u = rand_wave();
        let v = rand_wave();
        let a = GaussInt::of(2, -1);
        let b = GaussInt::of(-3, 2);
        let combo = Wave::linear_combination(&a, &u, &b, &v).unwrap();
        let lhs = multi_eom_residual(&combo, &sys).unwrap();
        let rhs = Wave::linear_combination(
            &a,
            &multi_eom_residual(&u, &sys).unwrap(),
            &b,
            &multi_eom_residual(&v, &sys).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn action_vanishes_on_factorized_solutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        for m in [2usize, 3] {
            let window = ClockWindow::cube(m, 5).unwrap();
            let factors: Vec<Trajectory<Int>> =
                (0..m).map(|_| random_solution(&mut rng, 2, 6)).collect();
            let sys =
                MultiCa::without_interaction(factors.iter().map(|f| f.ca().clone()).collect())
                    .unwrap();
            let wave =
                assemble(&[ProductTerm::new(GaussInt::of(1, -2), factors)], &window).unwrap();
            assert_eq!(multi_action(&wave, &sys).unwrap(), Int::from(0));
        }
    }

    #[test]
    fn action_matches_brute_force_sum() {
        // single-term product of the constant non-solution [1,1,1] in both
        // slots, m = 2, 3x3 window, H = [1] each
        let flat = Trajectory::new(
            Ca::new(h_one()),
            0,
            (0..3).map(|_| GaussVector::of(&[(1, 0)])).collect(),
        )
        .unwrap();
        let sys = MultiCa::without_interaction(vec![Ca::new(h_one()), Ca::new(h_one())]).unwrap();
        let window = ClockWindow::cube(2, 3).unwrap();
        let wave = assemble(
            &[ProductTerm::new(GaussInt::one(), vec![flat.clone(), flat])],
            &window,
        )
        .unwrap();

        // hand-summed oracle: every amplitude is the scalar 1, differences
        // vanish, so each clock direction contributes sum over its 3 interior
        // sites of psi^dag H psi = 1; total = 2 * 3 = 6
        let mut oracle = 0i64;
        for k in 0..2usize {
            for tuple in window.tuples() {
                if tuple[k] > 0 && tuple[k] < 2 {
                    oracle += 1; // Im(1 * 0) + 1
                }
            }
        }
        assert_eq!(oracle, 6);
        assert_eq!(multi_action(&wave, &sys).unwrap(), Int::from(oracle));
    }

    #[test]
    fn divergence_vanishes_for_factorized_solutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for m in [2usize, 3] {
            let window = ClockWindow::cube(m, 4).unwrap();
            let factors: Vec<Trajectory<Int>> =
                (0..m).map(|_| random_solution(&mut rng, 2, 5)).collect();
            let sys =
                MultiCa::without_interaction(factors.iter().map(|f| f.ca().clone()).collect())
                    .unwrap();
            let wave = assemble(&[ProductTerm::new(GaussInt::one(), factors)], &window).unwrap();
            let id = HermitianMatrix::identity(sys.product_dim());
            let htot = sys.total_hamiltonian();
            for tuple in window.interior_tuples() {
                assert_eq!(
                    multi_conserved_divergence(&wave, &id, &tuple).unwrap(),
                    Int::from(0)
                );
                assert_eq!(
                    multi_conserved_divergence(&wave, &htot, &tuple).unwrap(),
                    Int::from(0)
                );
            }
        }
        // zero wave: trivially zero
        let wave = Wave::zero(ClockWindow::cube(2, 3).unwrap(), vec![2, 2]);
        let id = HermitianMatrix::identity(4);
        assert_eq!(
            multi_conserved_divergence(&wave, &id, &[1, 1]).unwrap(),
            Int::from(0)
        );
    }

    #[test]
    fn per_clock_correlator_is_constant_along_its_clock() {
        let a = h1_solution(6);
        let b = sx_solution(e(0), e(1), 6);
        let window = ClockWindow::cube(2, 6).unwrap();
        let wave = assemble(&[ProductTerm::new(GaussInt::one(), vec![a, b])], &window).unwrap();
        let id = HermitianMatrix::identity(2);
        for k in 0..2usize {
            for other in 0..6i64 {
                let mut seen: Option<Int> = None;
                for own in 1..6i64 {
                    let tuple = if k == 0 { [own, other] } else { [other, own] };
                    let c = clock_correlator(&wave, &id, k, &tuple).unwrap();
                    match &seen {
                        None => seen = Some(c),
                        Some(prev) => assert_eq!(*prev, c, "clock {k}, fixed {other}"),
                    }
                }
            }
        }
    }

    #[test]
    fn multi_q_free_composite_is_four_but_varies_in_general() {
        // both factors the alternating free trajectory e0, e0, ...
        let free = Ca::new(HermitianMatrix::zeros(2));
        let t = free.evolve(e(0), e(0), 4).unwrap();
        let window = ClockWindow::cube(2, 4).unwrap();
        let wave = assemble(
            &[ProductTerm::new(GaussInt::one(), vec![t.clone(), t])],
            &window,
        )
        .unwrap();
        for tuple in window.interior_tuples() {
            assert_eq!(multi_q(&wave, &tuple).unwrap(), Int::from(4));
        }

        // the same quantity for the H = [1] product wave is NOT a constant:
        // the factor squared norms cycle 1, 1, 2, ... and enter multiplicatively.
        // Only the divergence combination (and each c_k along its own clock)
        // is conserved at finite discreteness.
        let s = h1_solution(4);
        let wave = assemble(
            &[ProductTerm::new(GaussInt::one(), vec![s.clone(), s])],
            &ClockWindow::cube(2, 4).unwrap(),
        )
        .unwrap();
        assert_eq!(multi_q(&wave, &[1, 1]).unwrap(), Int::from(4));
        assert_eq!(multi_q(&wave, &[1, 2]).unwrap(), Int::from(6));
        assert_eq!(multi_q(&wave, &[2, 2]).unwrap(), Int::from(8));

        // boundary tuples are rejected
        assert_eq!(
            multi_q(&wave, &[0, 1]).unwrap_err(),
            CaError::BoundaryTuple { tuple: vec![0, 1] }
        );
    }

    #[test]
    fn defect_appears_at_n2_for_two_moving_factors() {
        let sys =
            MultiCa::without_interaction(vec![Ca::new(sigma_x()), Ca::new(sigma_x())]).unwrap();
        let report = single_time_defect(&sys, &[(e(0), e(0)), (e(0), e(0))], 4).unwrap();
        assert_eq!(report.first_nonzero_n, Some(2));
        // the Leibniz cross term: exactly e1 x e1
        let expect = Tensor::from_vector(&e(1)).kron(&Tensor::from_vector(&e(1)));
        assert_eq!(report.defects[2], expect);
    }

    #[test]
    fn defect_vanishes_for_free_or_single_moving_factor() {
        let free = MultiCa::without_interaction(vec![
            Ca::new(HermitianMatrix::zeros(2)),
            Ca::new(HermitianMatrix::zeros(2)),
        ])
        .unwrap();
        let report = single_time_defect(&free, &[(e(0), e(1)), (e(1), e(0))], 6).unwrap();
        assert_eq!(report.first_nonzero_n, None);

        // one trivial factor held constant: the composite still factorizes
        let half = MultiCa::without_interaction(vec![
            Ca::new(sigma_x()),
            Ca::new(HermitianMatrix::zeros(2)),
        ])
        .unwrap();
        let report = single_time_defect(&half, &[(e(0), e(0)), (e(1), e(1))], 8).unwrap();
        assert_eq!(report.first_nonzero_n, None);
    }

    #[test]
    fn defect_at_n2_matches_the_cross_term_formula() {
        // Psi_2 - psi_2 x phi_2 =
        //   -i (H psi_1) x (phi_1 - phi_0) - i (psi_1 - psi_0) x (H phi_1)
        //   + (H psi_1) x (H phi_1)
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let h1 = random_hermitian(&mut rng, 2, 2);
            let h2 = random_hermitian(&mut rng, 2, 2);
            let p0 = random_vector(&mut rng, 2, 2);
            let p1 = random_vector(&mut rng, 2, 2);
            let q0 = random_vector(&mut rng, 2, 2);
            let q1 = random_vector(&mut rng, 2, 2);
            let sys = MultiCa::without_interaction(vec![Ca::new(h1.clone()), Ca::new(h2.clone())])
                .unwrap();
            let report = single_time_defect(
                &sys,
                &[(p0.clone(), p1.clone()), (q0.clone(), q1.clone())],
                2,
            )
            .unwrap();
            let hp1 = h1.mul_vec(&p1).unwrap();
            let hq1 = h2.mul_vec(&q1).unwrap();
            let t = |v: &GaussVector| Tensor::from_vector(v);
            let cross = t(&hp1)
                .kron(&t(&q1.sub(&q0)))
                .mul_i()
                .scale(&GaussInt::of(-1, 0))
                .add(
                    &t(&p1.sub(&p0))
                        .kron(&t(&hq1))
                        .mul_i()
                        .scale(&GaussInt::of(-1, 0)),
                )
                .unwrap()
                .add(&t(&hp1).kron(&t(&hq1)))
                .unwrap();
            assert_eq!(report.defects[2], cross);
        }
    }

    #[test]
    fn bell_examples() {
        // free CA with constant factors e0, e1: the wave is the constant
        // antisymmetric unit [[0, 1], [-1, 0]]
        let free = Ca::new(HermitianMatrix::zeros(2));
        let a = free.evolve(e(0), e(0), 4).unwrap();
        let b = free.evolve(e(1), e(1), 4).unwrap();
        let window = ClockWindow::cube(2, 4).unwrap();
        let wave = bell_state(&a, &b, &window).unwrap();
        let expect = Tensor::new(
            vec![2, 2],
            vec![
                GaussInt::zero(),
                GaussInt::one(),
                GaussInt::of(-1, 0),
                GaussInt::zero(),
            ],
        )
        .unwrap();
        for tuple in window.tuples() {
            assert_eq!(*wave.value(&tuple).unwrap(), expect);
        }

        // sigma_x factors: Psi(2,2) = [[0, 2], [-2, 0]]
        let a = sx_solution(e(0), e(0), 5);
        let b = sx_solution(e(1), e(1), 5);
        let window = ClockWindow::cube(2, 6).unwrap();
        let wave = bell_state(&a, &b, &window).unwrap();
        assert_eq!(
            *wave.value(&[2, 2]).unwrap(),
            Tensor::new(
                vec![2, 2],
                vec![
                    GaussInt::zero(),
                    GaussInt::of(2, 0),
                    GaussInt::of(-2, 0),
                    GaussInt::zero()
                ]
            )
            .unwrap()
        );

        // it solves the many-time equations exactly
        let sys =
            MultiCa::without_interaction(vec![Ca::new(sigma_x()), Ca::new(sigma_x())]).unwrap();
        assert!(multi_eom_residual(&wave, &sys).unwrap().is_zero());

        // antisymmetry under simultaneous swap at equal clocks
        for n in 0..6i64 {
            let t = wave.value(&[n, n]).unwrap();
            for a_idx in 0..2 {
                for b_idx in 0..2 {
                    assert_eq!(*t.get(&[a_idx, b_idx]), -t.get(&[b_idx, a_idx]));
                }
            }
        }

        // wrong subsystem dimension is rejected
        let big = Ca::new(HermitianMatrix::zeros(3));
        let t3 = big
            .evolve(GaussVector::basis(3, 0), GaussVector::basis(3, 1), 4)
            .unwrap();
        assert!(matches!(
            bell_state(&t3, &t3, &ClockWindow::cube(2, 4).unwrap()),
            Err(CaError::DimensionMismatch { expected: 2, .. })
        ));

        // dependent initial data is rejected
        let c = free.evolve(e(0), e(0), 4).unwrap();
        let d = free
            .evolve(
                e(0).scale(&GaussInt::of(2, 0)),
                e(0).scale(&GaussInt::of(2, 0)),
                4,
            )
            .unwrap();
        assert_eq!(
            bell_state(&c, &d, &ClockWindow::cube(2, 4).unwrap()).unwrap_err(),
            CaError::DependentInitialData
        );
    }

    #[test]
    fn witness_examples() {
        // any single product term has rank 1 everywhere
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let window = ClockWindow::cube(2, 4).unwrap();
        let factors = vec![
            random_solution(&mut rng, 2, 5),
            random_solution(&mut rng, 3, 5),
        ];
        let wave = assemble(&[ProductTerm::new(GaussInt::of(0, 1), factors)], &window).unwrap();
        for tuple in window.tuples() {
            let report = entanglement_witness(&wave, &tuple, &[0]).unwrap();
            assert_eq!(report.rank, 1);
            assert!(report.is_product);
        }

        // the antisymmetric wave has rank 2 with determinant witnesses 1 and 4
        let a = sx_solution(e(0), e(0), 5);
        let b = sx_solution(e(1), e(1), 5);
        let bell = bell_state(&a, &b, &ClockWindow::cube(2, 6).unwrap()).unwrap();
        for (tuple, det) in [([0i64, 0], 1i64), ([2, 2], 4)] {
            let report = entanglement_witness(&bell, &tuple, &[0]).unwrap();
            assert_eq!(report.rank, 2);
            assert!(!report.is_product);
            // 2x2 determinant oracle ad - bc on the reshaped amplitude
            let m = bell
                .value(&tuple)
                .unwrap()
                .bipartition_matrix(&[0])
                .unwrap();
            let oracle = &(m.get(0, 0) * m.get(1, 1)) - &(m.get(0, 1) * m.get(1, 0));
            assert_eq!(oracle, GaussInt::of(det, 0));
        }

        // empty side rejected
        assert_eq!(
            entanglement_witness(&bell, &[0, 0], &[0, 1]).unwrap_err(),
            CaError::EmptyBipartition { side: "column" }
        );
    }

    #[test]
    fn no_correlations_without_interactions() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let window = ClockWindow::cube(3, 4).unwrap();
        let factors: Vec<Trajectory<Int>> =
            (0..3).map(|_| random_solution(&mut rng, 2, 5)).collect();
        let wave = assemble(&[ProductTerm::new(GaussInt::one(), factors)], &window).unwrap();
        for tuple in window.tuples() {
            for axes in [vec![0usize], vec![1], vec![2], vec![0, 1], vec![0, 2]] {
                let report = entanglement_witness(&wave, &tuple, &axes).unwrap();
                assert!(report.rank <= 1, "axes {axes:?}");
            }
        }
    }

    #[test]
    fn multiwave_json_round_trips_deterministically() {
        let free = Ca::new(HermitianMatrix::zeros(2));
        let a = free.evolve(e(0), e(0), 2).unwrap();
        let b = free.evolve(e(1), e(1), 2).unwrap();
        let wave = bell_state(&a, &b, &ClockWindow::cube(2, 2).unwrap()).unwrap();
        let text = serde_json::to_string(&wave).unwrap();
        let back: Wave = serde_json::from_str(&text).unwrap();
        assert_eq!(back, wave);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        assert!(
            text.starts_with(r#"{"m":2,"shape":[2,2],"lo":[0,0],"hi":[1,1],"values":[{"n":[0,0],"#)
        );
    }
}
