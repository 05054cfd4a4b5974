//! The canned verification suite: eleven independent checks, each pinning
//! the tolerances (exact equality wherever the arithmetic is exact) and a
//! runtime budget where one applies. The CLI `verify-all` subcommand and the
//! acceptance test target both run these.
//!
//! All randomness is seeded; the same seed reproduces the same systems,
//! trajectories and waves bit for bit.

use std::time::Instant;

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::linalg::Tensor;
use crate::multi::{
    assemble, bell_state, entanglement_witness, multi_conserved_divergence, multi_eom_residual,
    multi_q, single_time_defect, ClockWindow, ProductTerm,
};
use crate::sampling::{
    deformation_scaling, dispersion_check, dispersion_omega, loglog_slope, mode_recursion_residual,
    multi_time_residual, q_continuum, reconstruct, system_to_float, DispersionMode, ModeWave,
    ProductWave, Signal, TimeWave,
};
use crate::single::{ReIm, VariationSite};
use crate::{
    GaussInt, GaussMatrix, GaussVector, HermitianMatrix, Int, MultiCa, MultiWave, Real, SingleCa,
    Trajectory,
};

/// Outcome of one verification criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    pub seconds: f64,
    pub runtime_limit: Option<f64>,
}

/// Outcome of one sub-check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub details: String,
}

pub const CRITERION_COUNT: usize = 11;

pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    (1..=CRITERION_COUNT)
        .map(|id| run_criterion(id, seed))
        .collect()
}

pub fn run_criterion(id: usize, seed: u64) -> CriterionReport {
    let (name, limit, body): (_, Option<f64>, fn(u64) -> CheckOutcome) = match id {
        1 => ("correlator conservation", Some(10.0), criterion_01),
        2 => ("action nullity and stationarity", Some(10.0), criterion_02),
        3 => ("norm non-conservation", None, criterion_03),
        4 => ("many-time factorization", Some(30.0), criterion_04),
        5 => ("single-clock composition defect", None, criterion_05),
        6 => ("antisymmetric two-party wave", None, criterion_06),
        7 => ("multipartite conservation", None, criterion_07),
        8 => ("sampling bridge lattice agreement", Some(5.0), criterion_08),
        9 => ("deformation expansion scaling", Some(5.0), criterion_09),
        10 => ("multi-time continuum residual", Some(10.0), criterion_10),
        11 => ("dispersion relation", None, criterion_11),
        _ => panic!("criterion id {id} out of range 1..={CRITERION_COUNT}"),
    };
    let start = Instant::now();
    let outcome = body(seed);
    let seconds = start.elapsed().as_secs_f64();
    let runtime_ok = limit.is_none_or(|cap| seconds < cap);
    let mut details = outcome.details;
    if !runtime_ok {
        details.push_str(&format!(
            " [runtime {seconds:.2}s exceeded the {}s budget]",
            limit.unwrap()
        ));
    }
    CriterionReport {
        id,
        name,
        passed: outcome.passed && runtime_ok,
        details,
        seconds,
        runtime_limit: limit,
    }
}

fn random_gauss(rng: &mut ChaCha8Rng, bound: i64) -> GaussInt {
    GaussInt::of(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound))
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize, bound: i64) -> HermitianMatrix {
    let mut m = GaussMatrix::zeros(dim);
    for r in 0..dim {
        m.set(r, r, GaussInt::of(rng.gen_range(-bound..=bound), 0));
        for c in r + 1..dim {
            let g = random_gauss(rng, bound);
            m.set(r, c, g.clone());
            m.set(c, r, g.conj());
        }
    }
    HermitianMatrix::new(m).expect("constructed self-adjoint")
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize, bound: i64) -> GaussVector {
    GaussVector::new((0..dim).map(|_| random_gauss(rng, bound)).collect())
}

/// The 100 seeded systems shared by criteria 1 and 2: dimension at most 4,
/// couplings and initial components at most 3 in absolute value.
fn seeded_systems(seed: u64) -> Vec<(SingleCa, GaussVector, GaussVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x01);
    (0..100)
        .map(|_| {
            let dim = rng.gen_range(1..=4);
            let h = random_hermitian(&mut rng, dim, 3);
            let a = random_vector(&mut rng, dim, 3);
            let b = random_vector(&mut rng, dim, 3);
            (SingleCa::new(h), a, b)
        })
        .collect()
}

fn criterion_01(seed: u64) -> CheckOutcome {
    let mut checked = 0usize;
    for (ca, a, b) in seeded_systems(seed) {
        let traj = ca
            .evolve(a, b, 200)
            .expect("seeded initial data matches the system dimension");
        let h = ca.hamiltonian();
        let observables = [
            HermitianMatrix::identity(ca.dim()),
            h.clone(),
            HermitianMatrix::new(h.matrix().pow(2)).expect("H^2 is self-adjoint"),
        ];
        for g in &observables {
            let report = traj
                .conservation_report(g)
                .expect("evolved trajectories solve the recursion");
            if !(report.commutes_with_h && report.is_conserved) {
                return CheckOutcome {
                    passed: false,
                    details: format!("correlator varied for a commuting observable ({checked} ok)"),
                };
            }
            checked += 1;
        }
    }
    CheckOutcome {
        passed: true,
        details: format!(
            "{checked} correlators exactly constant over 200 steps (100 systems, G in {{1, H, H^2}})"
        ),
    }
}

fn criterion_02(seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x02);
    let mut variations = 0usize;
    for (ca, a, b) in seeded_systems(seed) {
        let traj = ca.evolve(a, b, 200).expect("dimension matches");
        let action = traj.action().expect("window is long enough");
        if !action.is_zero() {
            return CheckOutcome {
                passed: false,
                details: format!("action {action} != 0 on a solution"),
            };
        }
        for _ in 0..20 {
            let site = VariationSite {
                n: rng.gen_range(1..=200),
                alpha: rng.gen_range(0..ca.dim()),
                part: if rng.gen() { ReIm::Re } else { ReIm::Im },
                conjugated: rng.gen(),
            };
            for d in [1i64, 2, 7] {
                let v = traj
                    .variation(site, &Int::from(d))
                    .expect("interior site, nonzero step");
                if !v.is_zero() {
                    return CheckOutcome {
                        passed: false,
                        details: format!("variation {v} != 0 at interior site {site:?}, d = {d}"),
                    };
                }
                variations += 1;
            }
        }
    }
    CheckOutcome {
        passed: true,
        details: format!(
            "100 actions vanished; {variations} interior variations vanished (20 sites x d in {{1,2,7}} each)"
        ),
    }
}

fn criterion_03(_seed: u64) -> CheckOutcome {
    let ca = SingleCa::new(HermitianMatrix::of(&[&[(1, 0)]]).expect("1x1"));
    let one = GaussVector::of(&[(1, 0)]);
    let traj = ca.evolve(one.clone(), one, 3).expect("dimension matches");
    let norms: Vec<Int> = (0..=4)
        .map(|n| traj.norm_sq_at(n).expect("within window"))
        .collect();
    let mut distinct: Vec<&Int> = Vec::new();
    for n in &norms {
        if !distinct.contains(&n) {
            distinct.push(n);
        }
    }
    let passed = norms
        == vec![
            Int::from(1),
            Int::from(1),
            Int::from(2),
            Int::from(1),
            Int::from(1),
        ];
    CheckOutcome {
        passed,
        details: format!(
            "|psi_n|^2 over n <= 4: {norms:?} ({} distinct values)",
            distinct.len()
        ),
    }
}

/// The factorized random waves shared by criteria 4 and 7: one product term
/// of independently evolved solutions per wave, clock windows of length 6.
fn random_product_waves(seed: u64) -> Vec<(MultiCa, MultiWave)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x04);
    let mut waves = Vec::new();
    for (m, count, max_dim) in [(2usize, 10usize, 4usize), (3, 5, 3)] {
        for _ in 0..count {
            let window = ClockWindow::cube(m, 6).expect("nonempty window");
            let mut factors = Vec::with_capacity(m);
            for _ in 0..m {
                let dim = rng.gen_range(1..=max_dim);
                let ca = SingleCa::new(random_hermitian(&mut rng, dim, 3));
                // skip degenerate seeds whose product wave would carry a zero
                // slice (the rank-1 claim is about nonvanishing products)
                let traj = loop {
                    let t = ca
                        .evolve(
                            random_vector(&mut rng, dim, 3),
                            random_vector(&mut rng, dim, 3),
                            6,
                        )
                        .expect("dimension matches");
                    if (t.n_min()..=t.n_max()).all(|n| !t.state(n).expect("in window").is_zero()) {
                        break t;
                    }
                };
                factors.push(traj);
            }
            let sys =
                MultiCa::without_interaction(factors.iter().map(|f| f.ca().clone()).collect())
                    .expect("at least one part");
            let wave = assemble(&[ProductTerm::new(GaussInt::one(), factors)], &window)
                .expect("factors cover the window");
            waves.push((sys, wave));
        }
    }
    waves
}

fn criterion_04(seed: u64) -> CheckOutcome {
    let waves = random_product_waves(seed);
    let mut residual_sites = 0usize;
    let mut witness_sites = 0usize;
    for (sys, wave) in &waves {
        let residual = multi_eom_residual(wave, sys).expect("window has an interior");
        if !residual.is_zero() {
            return CheckOutcome {
                passed: false,
                details: "nonzero many-time residual for a factorized solution".into(),
            };
        }
        residual_sites += residual.window().total_len();
        for tuple in wave.window().tuples() {
            for axis in 0..sys.m() {
                let report =
                    entanglement_witness(wave, &tuple, &[axis]).expect("valid bipartition");
                if report.rank != 1 {
                    return CheckOutcome {
                        passed: false,
                        details: format!(
                            "witness rank {} != 1 at {tuple:?} across axis {axis}",
                            report.rank
                        ),
                    };
                }
                witness_sites += 1;
            }
        }
    }
    CheckOutcome {
        passed: true,
        details: format!(
            "{} waves (m = 2 and 3): residual identically zero on {residual_sites} interior tuples, witness rank 1 at {witness_sites} cuts",
            waves.len()
        ),
    }
}

fn criterion_05(_seed: u64) -> CheckOutcome {
    let sx = HermitianMatrix::of(&[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]]).expect("sigma_x");
    let e0 = GaussVector::basis(2, 0);
    let e1 = GaussVector::basis(2, 1);
    let sys = MultiCa::without_interaction(vec![SingleCa::new(sx.clone()), SingleCa::new(sx)])
        .expect("two parts");
    let report = single_time_defect(
        &sys,
        &[(e0.clone(), e0.clone()), (e0.clone(), e0.clone())],
        4,
    )
    .expect("matching dimensions");
    let expect = Tensor::from_vector(&e1).kron(&Tensor::from_vector(&e1));
    let first_ok = report.first_nonzero_n == Some(2) && report.defects[2] == expect;

    let free = MultiCa::without_interaction(vec![
        SingleCa::new(HermitianMatrix::zeros(2)),
        SingleCa::new(HermitianMatrix::zeros(2)),
    ])
    .expect("two parts");
    let control = single_time_defect(&free, &[(e0.clone(), e1.clone()), (e1, e0)], 6)
        .expect("matching dimensions");
    let control_ok = control.first_nonzero_n.is_none();

    CheckOutcome {
        passed: first_ok && control_ok,
        details: format!(
            "shared-clock defect first appears at n = {:?} and equals the cross term e1 x e1: {first_ok}; free control stays factorized: {control_ok}",
            report.first_nonzero_n
        ),
    }
}

fn bell_wave_sigma_x() -> (MultiCa, MultiWave) {
    let sx = HermitianMatrix::of(&[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]]).expect("sigma_x");
    let ca = SingleCa::new(sx.clone());
    let e0 = GaussVector::basis(2, 0);
    let e1 = GaussVector::basis(2, 1);
    let a = ca.evolve(e0.clone(), e0, 5).expect("dimension matches");
    let b = ca.evolve(e1.clone(), e1, 5).expect("dimension matches");
    let window = ClockWindow::cube(2, 6).expect("nonempty window");
    let wave = bell_state(&a, &b, &window).expect("independent data");
    let sys = MultiCa::without_interaction(vec![SingleCa::new(sx.clone()), SingleCa::new(sx)])
        .expect("two parts");
    (sys, wave)
}

fn criterion_06(_seed: u64) -> CheckOutcome {
    let (sys, wave) = bell_wave_sigma_x();
    let residual_ok = multi_eom_residual(&wave, &sys)
        .expect("window has an interior")
        .is_zero();
    let mut dets = Vec::new();
    let mut ranks_ok = true;
    for (tuple, want) in [([0i64, 0], 1i64), ([2, 2], 4)] {
        let report = entanglement_witness(&wave, &tuple, &[0]).expect("valid bipartition");
        ranks_ok &= report.rank == 2 && !report.is_product;
        let m = wave
            .value(&tuple)
            .expect("in window")
            .bipartition_matrix(&[0])
            .expect("valid bipartition");
        let det = &(m.get(0, 0) * m.get(1, 1)) - &(m.get(0, 1) * m.get(1, 0));
        ranks_ok &= det == GaussInt::of(want, 0);
        dets.push(det);
    }
    CheckOutcome {
        passed: residual_ok && ranks_ok,
        details: format!(
            "many-time residual zero: {residual_ok}; witness rank 2 with determinants {dets:?} at (0,0) and (2,2)"
        ),
    }
}

/// Divergence form of the conservation law on the criterion-4 waves, with
/// the identity and the total Hamiltonian as observables, plus the per-clock
/// correlator constancy for factorized waves. These hold exactly.
pub fn multipartite_divergence_check(seed: u64) -> CheckOutcome {
    let waves = random_product_waves(seed);
    let mut sites = 0usize;
    for (sys, wave) in &waves {
        let observables = [
            HermitianMatrix::identity(sys.product_dim()),
            sys.total_hamiltonian(),
        ];
        for g in &observables {
            for tuple in wave.window().interior_tuples() {
                let div = multi_conserved_divergence(wave, g, &tuple).expect("interior tuple");
                if !div.is_zero() {
                    return CheckOutcome {
                        passed: false,
                        details: format!("nonzero divergence {div} at {tuple:?}"),
                    };
                }
                sites += 1;
            }
        }
        // factorized waves: each per-clock correlator is constant in its own
        // clock at fixed other clocks
        let id = HermitianMatrix::identity(sys.product_dim());
        for k in 0..sys.m() {
            let mut by_rest: std::collections::BTreeMap<Vec<i64>, Int> =
                std::collections::BTreeMap::new();
            for tuple in wave.window().tuples() {
                if tuple[k] <= wave.window().lo()[k] {
                    continue;
                }
                let c = crate::multi::clock_correlator(wave, &id, k, &tuple)
                    .expect("previous clock in window");
                let mut rest = tuple.clone();
                rest.remove(k);
                match by_rest.get(&rest) {
                    None => {
                        by_rest.insert(rest, c);
                    }
                    Some(prev) => {
                        if *prev != c {
                            return CheckOutcome {
                                passed: false,
                                details: format!(
                                    "per-clock correlator varied along clock {k} at {tuple:?}"
                                ),
                            };
                        }
                    }
                }
            }
        }
    }
    CheckOutcome {
        passed: true,
        details: format!(
            "divergence exactly zero at {sites} (tuple, observable) pairs; per-clock correlators constant along their clocks"
        ),
    }
}

/// Pointwise constancy of the summed symmetrized correlator across interior
/// tuples, evaluated on the pinned factorized waves. The free composite is
/// constant; the nontrivial one is not, because the factor squared norms are
/// not conserved and enter the product multiplicatively. This check fails,
/// and is retained to document that only the divergence form (and each
/// per-clock correlator along its own clock) is conserved at finite
/// discreteness.
pub fn pointwise_multi_q_constancy() -> CheckOutcome {
    // free composite: both factors the alternating e0 history
    let free = SingleCa::new(HermitianMatrix::zeros(2));
    let e0 = GaussVector::basis(2, 0);
    let t = free.evolve(e0.clone(), e0, 4).expect("dimension matches");
    let window = ClockWindow::cube(2, 4).expect("nonempty window");
    let free_wave = assemble(
        &[ProductTerm::new(GaussInt::one(), vec![t.clone(), t])],
        &window,
    )
    .expect("covered window");
    let mut free_vals = Vec::new();
    for tuple in window.interior_tuples() {
        free_vals.push(multi_q(&free_wave, &tuple).expect("interior tuple"));
    }
    let free_const = free_vals.windows(2).all(|w| w[0] == w[1]);

    // nontrivial factors: the psi_0 = psi_1 = 1 solution of H = [1]
    let ca = SingleCa::new(HermitianMatrix::of(&[&[(1, 0)]]).expect("1x1"));
    let one = GaussVector::of(&[(1, 0)]);
    let s = ca.evolve(one.clone(), one, 4).expect("dimension matches");
    let wave = assemble(
        &[ProductTerm::new(GaussInt::one(), vec![s.clone(), s])],
        &window,
    )
    .expect("covered window");
    let mut vals = Vec::new();
    for tuple in window.interior_tuples() {
        vals.push((
            tuple.clone(),
            multi_q(&wave, &tuple).expect("interior tuple"),
        ));
    }
    let nontrivial_const = vals.windows(2).all(|w| w[0].1 == w[1].1);

    CheckOutcome {
        passed: free_const && nontrivial_const,
        details: format!(
            "free composite constant: {free_const} (values {free_vals:?}); nontrivial composite constant: {nontrivial_const} (values {vals:?})"
        ),
    }
}

fn criterion_07(seed: u64) -> CheckOutcome {
    let divergence = multipartite_divergence_check(seed);
    let pointwise = pointwise_multi_q_constancy();
    CheckOutcome {
        passed: divergence.passed && pointwise.passed,
        details: format!(
            "divergence law: {} ({}); pointwise constancy: {} ({})",
            if divergence.passed { "ok" } else { "FAILED" },
            divergence.details,
            if pointwise.passed { "ok" } else { "FAILED" },
            pointwise.details
        ),
    }
}

/// The bounded scalar solution extended across `[n_min, n_max]`.
fn h1_trajectory_over(n_min: i64, n_max: i64) -> Trajectory {
    let ca = SingleCa::new(HermitianMatrix::of(&[&[(1, 0)]]).expect("1x1"));
    let one = GaussVector::of(&[(1, 0)]);
    let back = ca
        .evolve_backward(one.clone(), one, (-n_min).max(0) as usize + 2)
        .expect("dimension matches");
    let p0 = back.state(n_min).expect("in window").clone();
    let p1 = back.state(n_min + 1).expect("in window").clone();
    let fwd = ca
        .evolve(p0, p1, (n_max - n_min - 1) as usize)
        .expect("dimension matches");
    Trajectory::new(
        ca,
        n_min,
        (0..=(n_max - n_min))
            .map(|k| fwd.state(k).expect("in window").clone())
            .collect(),
    )
    .expect("at least two slices")
}

fn criterion_08(_seed: u64) -> CheckOutcome {
    let traj = h1_trajectory_over(0, 63);
    let l = 0.25f64;
    let wave = reconstruct::<Int, Real>(&traj, l).expect("values are small");
    let (lo, hi) = wave.reliable_lattice_range();
    let mut worst_round_trip = 0f64;
    let mut worst_q = 0f64;
    for n in lo..=hi {
        let t = n as f64 * l;
        let vals = wave.eval(t);
        for (v, s) in vals.iter().zip(wave.sample(n).expect("in window")) {
            let rel = (*v - *s).norm() / s.norm().max(1.0);
            worst_round_trip = worst_round_trip.max(rel);
        }
        if n > lo && n < hi {
            let q = q_continuum(&wave, t).expect("padded interior");
            let exact: f64 = crate::sampling::int_to_float::<Int, Real>(
                &traj.q_symmetrized(n).expect("interior"),
            )
            .expect("small integer")
                / 2.0;
            let rel = (q - exact).abs() / exact.abs().max(1.0);
            worst_q = worst_q.max(rel);
        }
    }
    let passed = worst_round_trip <= 1e-12 && worst_q <= 1e-10;
    CheckOutcome {
        passed,
        details: format!(
            "round-trip relative error {worst_round_trip:.2e} (budget 1e-12); correlator lattice agreement {worst_q:.2e} (budget 1e-10)"
        ),
    }
}

fn criterion_09(_seed: u64) -> CheckOutcome {
    let modes = [
        (Complex::new(1.0, 0.0), 1.0f64),
        (Complex::new(0.45, -0.2), 2.3),
    ];
    let ls: Vec<f64> = (0..5).map(|k| 0.4 / 2f64.powi(k)).collect();
    let rows = deformation_scaling(&modes, 0.37, &ls).expect("band limit holds");
    let slope4 = loglog_slope(&rows.iter().map(|r| (r.l, r.remainder)).collect::<Vec<_>>());
    let slope2 = loglog_slope(
        &rows
            .iter()
            .map(|r| (r.l, r.q_exact - r.q_order0))
            .collect::<Vec<_>>(),
    );
    let passed = (slope4 - 4.0).abs() <= 0.3 && (slope2 - 2.0).abs() <= 0.3;
    CheckOutcome {
        passed,
        details: format!(
            "remainder slope {slope4:.3} (want 4.0 +- 0.3); without the l^2 term {slope2:.3} (want 2.0 +- 0.3)"
        ),
    }
}

fn criterion_10(_seed: u64) -> CheckOutcome {
    let sx = HermitianMatrix::of(&[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]]).expect("sigma_x");
    let ca = SingleCa::new(sx.clone());
    let e0 = GaussVector::basis(2, 0);
    let e1 = GaussVector::basis(2, 1);
    let a = ca.evolve(e0.clone(), e0, 30).expect("dimension matches");
    let b = ca.evolve(e1.clone(), e1, 30).expect("dimension matches");
    // the histories are exactly 12-periodic, verified in integer arithmetic,
    // so their finite mode decompositions ARE the infinite reconstructions
    for t in [&a, &b] {
        for n in 0..=19 {
            if t.state(n).expect("in window") != t.state(n + 12).expect("in window") {
                return CheckOutcome {
                    passed: false,
                    details: format!("history failed the exact period-12 check at n = {n}"),
                };
            }
        }
    }
    let l = 0.2f64;
    let to_modes = |t: &Trajectory| -> ModeWave<Real> {
        let period: Vec<Vec<Complex<f64>>> = (0..12)
            .map(|n| {
                crate::sampling::vector_to_complex::<Int, Real>(t.state(n).expect("in window"))
                    .expect("small integers")
            })
            .collect();
        ModeWave::from_periodic_samples(l, &period).expect("band-limited content")
    };
    let am = to_modes(&a);
    let bm = to_modes(&b);
    let wave = ProductWave::new(vec![
        (
            Complex::new(1.0, 0.0),
            vec![Signal::Modes(am.clone()), Signal::Modes(bm.clone())],
        ),
        (
            Complex::new(-1.0, 0.0),
            vec![Signal::Modes(bm), Signal::Modes(am)],
        ),
    ])
    .expect("consistent factors");
    let sys = MultiCa::without_interaction(vec![SingleCa::new(sx.clone()), SingleCa::new(sx)])
        .expect("two parts");
    let (hams, inter) = system_to_float::<Int, Real>(&sys).expect("small couplings");

    let mut worst_lattice = 0f64;
    for (n1, n2) in [(3i64, 5i64), (7, 7), (10, 2)] {
        let r = multi_time_residual(
            &wave,
            &hams,
            inter.as_ref(),
            &[n1 as f64 * l, n2 as f64 * l],
        )
        .expect("modes are reliable everywhere");
        worst_lattice = worst_lattice.max(r.max_abs());
    }
    let mut worst_mid = 0f64;
    for (t1, t2) in [(3.5, 5.5), (7.5, 2.5), (0.5, 0.5)] {
        let r = multi_time_residual(&wave, &hams, inter.as_ref(), &[t1 * l, t2 * l])
            .expect("modes are reliable everywhere");
        worst_mid = worst_mid.max(r.max_abs());
    }
    let passed = worst_lattice <= 1e-10 && worst_mid <= 1e-6;
    CheckOutcome {
        passed,
        details: format!(
            "residual {worst_lattice:.2e} at lattice points (budget 1e-10), {worst_mid:.2e} at midpoints (budget 1e-6)"
        ),
    }
}

fn criterion_11(_seed: u64) -> CheckOutcome {
    let mut worst = 0f64;
    for e in [-2.0f64, -1.0, 0.0, 1.0, 2.0] {
        match dispersion_omega(e) {
            DispersionMode::Propagating { omega } => {
                if !dispersion_check(e, omega) {
                    return CheckOutcome {
                        passed: false,
                        details: format!("2 sin(omega) != E for E = {e}"),
                    };
                }
                worst = worst.max(mode_recursion_residual(e, omega, 100));
            }
            DispersionMode::Evanescent => {
                return CheckOutcome {
                    passed: false,
                    details: format!("E = {e} wrongly classified as evanescent"),
                };
            }
        }
    }
    CheckOutcome {
        passed: worst <= 1e-10,
        details: format!(
            "plane-wave recursion residual {worst:.2e} over 100 steps for E in {{-2,-1,0,1,2}} (budget 1e-10)"
        ),
    }
}
