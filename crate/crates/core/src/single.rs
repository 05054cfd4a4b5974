//! A single Hamiltonian cellular automaton.
//!
//! States are Gaussian-integer vectors `psi_n` labelled by an integer clock
//! `n`; the dynamics is the two-step recursion
//!
//! ```text
//! psi_{n+1} - psi_{n-1} = -i H psi_n
//! ```
//!
//! with `H` self-adjoint and integer-valued. The recursion is derived from an
//! integer action principle, so a trajectory carries an action value, an
//! integer variation at each interior site, and a family of conserved
//! two-point correlators `psi_n^dag G psi_{n-1} + psi_{n-1}^dag G psi_n`, one
//! for each `G` commuting with `H`. All of this is exact integer arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{CaError, Result};
use crate::gauss::Gauss;
use crate::linalg::{Hermitian, Vector};
use crate::scalar::IntScalar;

/// A CA defined by its integer self-adjoint Hamiltonian.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingleCa<T: IntScalar> {
    h: Hermitian<T>,
}

impl<T: IntScalar> SingleCa<T> {
    pub fn new(h: Hermitian<T>) -> Self {
        SingleCa { h }
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn hamiltonian(&self) -> &Hermitian<T> {
        &self.h
    }

    /// March the recursion forward from the two initial slices `psi_0`,
    /// `psi_1`; the result covers the clock window `[0, steps + 1]`.
    pub fn evolve(&self, psi0: Vector<T>, psi1: Vector<T>, steps: usize) -> Result<Trajectory<T>> {
        self.check_dim(&psi0)?;
        self.check_dim(&psi1)?;
        let mut states = Vec::with_capacity(steps + 2);
        states.push(psi0);
        states.push(psi1);
        for _ in 0..steps {
            let prev = &states[states.len() - 2];
            let cur = &states[states.len() - 1];
            let next = prev.sub(&self.h.mul_vec(cur)?.mul_i());
            states.push(next);
        }
        Trajectory::new(self.clone(), 0, states)
    }

    /// March backwards: `psi_y`, `psi_z` are the slices at `n = 0`, `n = 1`
    /// (the *final* data) and the window is extended to `[-steps, 1]` via
    /// `psi_{n-1} = psi_{n+1} + i H psi_n`. The equations are time-reversal
    /// invariant, so evolving forward from the two earliest reconstructed
    /// slices reproduces the inputs exactly.
    pub fn evolve_backward(
        &self,
        psi_y: Vector<T>,
        psi_z: Vector<T>,
        steps: usize,
    ) -> Result<Trajectory<T>> {
        self.check_dim(&psi_y)?;
        self.check_dim(&psi_z)?;
        let mut rev = Vec::with_capacity(steps + 2);
        rev.push(psi_z);
        rev.push(psi_y);
        for _ in 0..steps {
            let above = &rev[rev.len() - 2]; // psi_{n+1}
            let mid = &rev[rev.len() - 1]; // psi_n
            let below = above.add(&self.h.mul_vec(mid)?.mul_i());
            rev.push(below);
        }
        rev.reverse();
        Trajectory::new(self.clone(), -(steps as i64), rev)
    }

    fn check_dim(&self, v: &Vector<T>) -> Result<()> {
        if v.dim() != self.dim() {
            return Err(CaError::DimensionMismatch {
                expected: self.dim(),
                found: v.dim(),
            });
        }
        Ok(())
    }
}

/// Which real coordinate of a state entry a variation perturbs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReIm {
    Re,
    Im,
}

/// A variation site: the action treats `psi` and its conjugate as independent
/// variables, so a site names the clock `n`, the degree of freedom `alpha`,
/// the real or imaginary coordinate, and which of the two independent copies
/// is perturbed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariationSite {
    pub n: i64,
    pub alpha: usize,
    pub part: ReIm,
    pub conjugated: bool,
}

/// Conservation status of one observable along a trajectory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound(serialize = "T: IntScalar"))]
pub struct ConservationReport<T: IntScalar> {
    pub is_conserved: bool,
    #[serde(serialize_with = "crate::single::serialize_ints")]
    pub values: Vec<T>,
    pub commutes_with_h: bool,
}

pub(crate) fn serialize_ints<S, T>(values: &[T], s: S) -> std::result::Result<S::Ok, S::Error>
where
    S: serde::Serializer,
    T: IntScalar,
{
    s.collect_seq(values.iter().map(|v| v.to_string()))
}

/// A state history over a finite clock window `[n_min, n_max]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TrajectoryRepr<T>", into = "TrajectoryRepr<T>")]
#[serde(bound(serialize = "T: IntScalar", deserialize = "T: IntScalar"))]
pub struct Trajectory<T: IntScalar> {
    ca: SingleCa<T>,
    n_min: i64,
    states: Vec<Vector<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: IntScalar", deserialize = "T: IntScalar"))]
struct TrajectoryRepr<T: IntScalar> {
    dim: usize,
    #[serde(rename = "H")]
    h: Hermitian<T>,
    n_min: i64,
    states: Vec<Vector<T>>,
}

impl<T: IntScalar> From<Trajectory<T>> for TrajectoryRepr<T> {
    fn from(t: Trajectory<T>) -> Self {
        TrajectoryRepr {
            dim: t.ca.dim(),
            h: t.ca.h.clone(),
            n_min: t.n_min,
            states: t.states,
        }
    }
}

impl<T: IntScalar> TryFrom<TrajectoryRepr<T>> for Trajectory<T> {
    type Error = CaError;
    fn try_from(r: TrajectoryRepr<T>) -> Result<Self> {
        if r.h.dim() != r.dim {
            return Err(CaError::DimensionMismatch {
                expected: r.dim,
                found: r.h.dim(),
            });
        }
        Trajectory::new(SingleCa::new(r.h), r.n_min, r.states)
    }
}

impl<T: IntScalar> Trajectory<T> {
    /// Wrap explicit state data. At least two slices are required (the
    /// initial data of the two-step recursion) and all slices must match the
    /// CA dimension.
    pub fn new(ca: SingleCa<T>, n_min: i64, states: Vec<Vector<T>>) -> Result<Self> {
        if states.len() < 2 {
            return Err(CaError::WindowTooSmall {
                required: 2,
                found: states.len(),
            });
        }
        for s in &states {
            if s.dim() != ca.dim() {
                return Err(CaError::DimensionMismatch {
                    expected: ca.dim(),
                    found: s.dim(),
                });
            }
        }
        Ok(Trajectory { ca, n_min, states })
    }

    pub fn ca(&self) -> &SingleCa<T> {
        &self.ca
    }

    pub fn dim(&self) -> usize {
        self.ca.dim()
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.states.len() as i64 - 1
    }

    pub fn is_interior(&self, n: i64) -> bool {
        n > self.n_min && n < self.n_max()
    }

    pub fn state(&self, n: i64) -> Result<&Vector<T>> {
        let idx = self.index_of(n)?;
        Ok(&self.states[idx])
    }

    fn index_of(&self, n: i64) -> Result<usize> {
        if n < self.n_min || n > self.n_max() {
            return Err(CaError::OutOfWindow {
                n,
                lo: self.n_min,
                hi: self.n_max(),
            });
        }
        Ok((n - self.n_min) as usize)
    }

    /// Iterate `(n, state)` pairs in clock order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &Vector<T>)> {
        self.states
            .iter()
            .enumerate()
            .map(move |(k, s)| (self.n_min + k as i64, s))
    }

    /// `psi_{n+1} - psi_{n-1} + i H psi_n`; zero exactly when the equation of
    /// motion holds at interior `n`.
    pub fn eom_residual(&self, n: i64) -> Result<Vector<T>> {
        if !self.is_interior(n) {
            return Err(CaError::BoundarySite { n });
        }
        let up = self.state(n + 1)?;
        let down = self.state(n - 1)?;
        let mid = self.state(n)?;
        Ok(up.sub(down).add(&self.ca.h.mul_vec(mid)?.mul_i()))
    }

    /// First interior clock at which the equation of motion fails, if any.
    pub fn first_violation(&self) -> Option<i64> {
        (self.n_min + 1..self.n_max()).find(|&n| !self.eom_residual(n).expect("interior").is_zero())
    }

    pub fn is_solution(&self) -> bool {
        self.first_violation().is_none()
    }

    fn require_solution(&self) -> Result<()> {
        match self.first_violation() {
            None => Ok(()),
            Some(n) => Err(CaError::NotASolution { n }),
        }
    }

    /// The integer action, summed over interior clock sites:
    /// `sum_n [ Im(psi_n^dag psidot_n) + psi_n^dag H psi_n ]` with
    /// `psidot_n := psi_{n+1} - psi_{n-1}`. Vanishes on solutions.
    pub fn action(&self) -> Result<T> {
        if self.states.len() < 3 {
            return Err(CaError::WindowTooSmall {
                required: 3,
                found: self.states.len(),
            });
        }
        let mut total = T::zero();
        for n in self.n_min + 1..self.n_max() {
            let mid = self.state(n)?;
            let dot = self.state(n + 1)?.sub(self.state(n - 1)?);
            let kinetic = mid.dagger_dot(&dot).im;
            let potential = mid.dagger_dot(&self.ca.h.mul_vec(mid)?);
            // self-adjointness makes the quadratic form real
            assert!(
                potential.im.is_zero(),
                "psi^dag H psi must be real for self-adjoint H"
            );
            total = total + kinetic + potential.re;
        }
        Ok(total)
    }

    /// The integer variation `[S(f + d) - S(f - d)] / (2 d)` of the action
    /// with respect to one real coordinate `f` of one state entry, with `psi`
    /// and its conjugate copy treated as independent variables.
    ///
    /// The difference only involves the action terms at clocks
    /// `site.n - 1, site.n, site.n + 1`; out-of-window neighbours enter those
    /// terms only as constants, so the result does not depend on any boundary
    /// convention as long as `site.n` is interior. At boundary sites the
    /// result would depend on the convention, so they are rejected.
    ///
    /// The value is a Gaussian integer (off the conjugate diagonal the action
    /// itself is complex); it vanishes for every interior site, every
    /// coordinate and every nonzero `d` exactly when the trajectory solves
    /// the equation of motion and its adjoint there.
    pub fn variation(&self, site: VariationSite, delta: &T) -> Result<Gauss<T>> {
        if delta.is_zero() {
            return Err(CaError::ZeroDelta);
        }
        if site.n <= self.n_min || site.n >= self.n_max() {
            return Err(CaError::BoundarySite { n: site.n });
        }
        if site.alpha >= self.dim() {
            return Err(CaError::DimensionMismatch {
                expected: self.dim(),
                found: site.alpha,
            });
        }
        let plus = self.bilinear_action_2i(site, delta, true)?;
        let minus = self.bilinear_action_2i(site, delta, false)?;
        let two_delta = delta.clone() + delta.clone();
        // [S(+d) - S(-d)] carries a factor 2d * 2i; both divisions are exact
        // because the action is at most quadratic in any single coordinate.
        let over_delta = (&plus - &minus).exact_div_scalar(&two_delta)?;
        over_delta
            .mul_neg_i()
            .exact_div_scalar(&(T::one() + T::one()))
    }

    /// `2i` times the action terms at clocks `site.n - 1, site.n, site.n + 1`,
    /// evaluated with the conjugate copy independent and the selected
    /// coordinate shifted by `+delta` or `-delta`. Out-of-window neighbours
    /// count as zero.
    fn bilinear_action_2i(
        &self,
        site: VariationSite,
        delta: &T,
        positive: bool,
    ) -> Result<Gauss<T>> {
        let dim = self.dim();
        let zero_vec = Vector::zeros(dim);
        let shift = if positive {
            delta.clone()
        } else {
            -delta.clone()
        };

        let perturb = |v: &Vector<T>| -> Vector<T> {
            let mut entries: Vec<Gauss<T>> = v.entries().to_vec();
            let g = &mut entries[site.alpha];
            match site.part {
                ReIm::Re => g.re = g.re.clone() + shift.clone(),
                ReIm::Im => g.im = g.im.clone() + shift.clone(),
            }
            Vector::new(entries)
        };
        let psi_at = |n: i64| -> Vector<T> {
            let base = match self.state(n) {
                Ok(s) => s.clone(),
                Err(_) => zero_vec.clone(),
            };
            if !site.conjugated && n == site.n {
                perturb(&base)
            } else {
                base
            }
        };
        let phi_at = |n: i64| -> Vector<T> {
            let base = match self.state(n) {
                Ok(s) => s.conj(),
                Err(_) => zero_vec.clone(),
            };
            if site.conjugated && n == site.n {
                perturb(&base)
            } else {
                base
            }
        };

        let two = T::one() + T::one();
        let mut total = Gauss::zero();
        for m in site.n - 1..=site.n + 1 {
            let phi = phi_at(m);
            let psi = psi_at(m);
            let psi_dot = psi_at(m + 1).sub(&psi_at(m - 1));
            let phi_dot = phi_at(m + 1).sub(&phi_at(m - 1));
            // (phi psidot - phidot psi) + 2i phi H psi, all plain bilinear
            let kinetic = &phi.dot(&psi_dot) - &phi_dot.dot(&psi);
            let potential = phi.dot(&self.ca.h.mul_vec(&psi)?);
            total = &total + &(&kinetic + &potential.mul_i().scale(&two));
        }
        Ok(total)
    }

    /// The two-point correlator `psi_n^dag G psi_{n-1} + psi_{n-1}^dag G psi_n`,
    /// a real integer for self-adjoint `G`; constant in `n` along solutions
    /// whenever `[G, H] = 0`.
    pub fn q_correlator(&self, g: &Hermitian<T>, n: i64) -> Result<T> {
        if g.dim() != self.dim() {
            return Err(CaError::DimensionMismatch {
                expected: self.dim(),
                found: g.dim(),
            });
        }
        let here = self.state(n)?;
        let back = self.state(n - 1)?;
        let z = here.dagger_dot(&g.mul_vec(back)?);
        // the reverse-order term is the conjugate, so the sum is 2 Re z
        Ok(z.re.clone() + z.re)
    }

    /// The symmetrized correlator `Re psi_n^dag (psi_{n+1} + psi_{n-1})`,
    /// kept doubled so it stays an integer; equals the identity correlator at
    /// every interior clock of a solution.
    pub fn q_symmetrized(&self, n: i64) -> Result<T> {
        if !self.is_interior(n) {
            return Err(CaError::BoundarySite { n });
        }
        let mid = self.state(n)?;
        let sum = self.state(n + 1)?.add(self.state(n - 1)?);
        Ok(mid.dagger_dot(&sum).re)
    }

    /// Evaluate the correlator of `G` at every admissible clock and report
    /// whether it is exactly constant, together with the commutator status
    /// (so `[G, H] = 0  =>  conserved` can be asserted by the caller).
    /// Rejects trajectories that do not solve the equation of motion.
    pub fn conservation_report(&self, g: &Hermitian<T>) -> Result<ConservationReport<T>> {
        self.require_solution()?;
        let mut values = Vec::new();
        for n in self.n_min + 1..=self.n_max() {
            values.push(self.q_correlator(g, n)?);
        }
        let is_conserved = values.windows(2).all(|w| w[0] == w[1]);
        let commutes_with_h = g.commutes(self.ca.h.matrix())?;
        Ok(ConservationReport {
            is_conserved,
            values,
            commutes_with_h,
        })
    }

    /// `|psi_n|^2`; the dynamics does not conserve it.
    pub fn norm_sq_at(&self, n: i64) -> Result<T> {
        Ok(self.state(n)?.norm_sq())
    }

    /// Slicewise Gaussian-integer combination `a u + b v` of two trajectories
    /// over the same CA and window. Solutions combine to solutions.
    pub fn linear_combination(
        a: &Gauss<T>,
        u: &Trajectory<T>,
        b: &Gauss<T>,
        v: &Trajectory<T>,
    ) -> Result<Trajectory<T>> {
        if u.ca != v.ca || u.n_min != v.n_min || u.states.len() != v.states.len() {
            return Err(CaError::MismatchedTrajectories);
        }
        let states = u
            .states
            .iter()
            .zip(&v.states)
            .map(|(x, y)| x.scale(a).add(&y.scale(b)))
            .collect();
        Trajectory::new(u.ca.clone(), u.n_min, states)
    }
}

/// A CA state in real phase-space coordinates, `psi = x + i p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealPhaseState<T> {
    pub x: Vec<T>,
    pub p: Vec<T>,
}

impl<T: IntScalar> RealPhaseState<T> {
    pub fn from_vector(v: &Vector<T>) -> Self {
        RealPhaseState {
            x: v.entries().iter().map(|g| g.re.clone()).collect(),
            p: v.entries().iter().map(|g| g.im.clone()).collect(),
        }
    }

    pub fn to_vector(&self) -> Vector<T> {
        Vector::new(
            self.x
                .iter()
                .zip(&self.p)
                .map(|(x, p)| Gauss::new(x.clone(), p.clone()))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// One step of the recursion in real coordinates. With `H = h_S + i h_A`
/// (real symmetric plus i times real antisymmetric) the update reads like a
/// network of coupled discrete oscillators:
///
/// ```text
/// x_{n+1} = x_{n-1} + h_S p_n + h_A x_n
/// p_{n+1} = p_{n-1} - h_S x_n + h_A p_n
/// ```
///
/// and agrees exactly with the complex-form step through `psi = x + i p`.
pub fn step_real_form<T: IntScalar>(
    ca: &SingleCa<T>,
    prev: &RealPhaseState<T>,
    cur: &RealPhaseState<T>,
) -> Result<RealPhaseState<T>> {
    let dim = ca.dim();
    if prev.dim() != dim || cur.dim() != dim {
        return Err(CaError::DimensionMismatch {
            expected: dim,
            found: prev.dim().max(cur.dim()),
        });
    }
    let h_s = ca.hamiltonian().re_part();
    let h_a = ca.hamiltonian().im_part();
    let sp = h_s.mul_ints(&cur.p)?;
    let ax = h_a.mul_ints(&cur.x)?;
    let sx = h_s.mul_ints(&cur.x)?;
    let ap = h_a.mul_ints(&cur.p)?;
    let x = prev
        .x
        .iter()
        .zip(sp.into_iter().zip(ax))
        .map(|(x0, (s, a))| x0.clone() + s + a)
        .collect();
    let p = prev
        .p
        .iter()
        .zip(sx.into_iter().zip(ap))
        .map(|(p0, (s, a))| p0.clone() - s + a)
        .collect();
    Ok(RealPhaseState { x, p })
}
