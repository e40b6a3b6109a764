//! Cross-check battery: closed forms against the numerical pipeline and the
//! dense oracle on seeded random draws.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closed_form::{self, ClosedFormTerms};
use crate::linalg::{max_abs_diff, C64};
use crate::measures::{self, Bipartition};
use crate::model::{self, ClusterParams, EigenTable, OraclePropagator, Site, StateVector};
use crate::sweep::{measure_state, Measure, Trajectory};

/// Largest |coupling| or |field| drawn.
pub const PARAM_BOUND: f64 = 10.0;
/// Largest time drawn.
pub const TIME_BOUND: f64 = 50.0;
/// Field values swept by the invariance check.
pub const FIELD_GRID: [f64; 3] = [-2.0, 0.0, 2.0];

/// One named check and its worst case over all samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub tolerance: f64,
    pub max_residual: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn failed_checks(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "verify seed={} samples={}", self.seed, self.samples);
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{} {:<32} max={:.3e} tol={:.1e}",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.max_residual,
                c.tolerance
            );
        }
        let passed = self.checks.iter().filter(|c| c.passed()).count();
        let _ = writeln!(
            s,
            "result: {} ({}/{} checks)",
            if self.passed() { "PASS" } else { "FAIL" },
            passed,
            self.checks.len()
        );
        s
    }
}

struct Tracker {
    checks: Vec<CheckResult>,
}

impl Tracker {
    fn new(spec: &[(&'static str, f64)]) -> Self {
        Self {
            checks: spec
                .iter()
                .map(|&(name, tolerance)| CheckResult {
                    name,
                    tolerance,
                    max_residual: 0.0,
                })
                .collect(),
        }
    }

    fn record(&mut self, name: &str, residual: f64) {
        let c = self
            .checks
            .iter_mut()
            .find(|c| c.name == name)
            .expect("check registered");
        // NaN must register as a failure
        if residual.is_nan() || residual > c.max_residual {
            c.max_residual = if residual.is_nan() { f64::INFINITY } else { residual };
        }
    }
}

const CHECKS: [(&str, f64); 10] = [
    ("eigen_residual", 1e-10),
    ("eigen_orthonormality", 1e-12),
    ("hamiltonian_commutators", 1e-12),
    ("propagator_analytic_vs_oracle", 1e-10),
    ("rho_ab_closed_vs_pipeline", 1e-12),
    ("concurrence_closed_vs_pipeline", 1e-9),
    ("single_spin_spectra", 1e-10),
    ("cubic_residual", 1e-9),
    ("field_invariance", 1e-10),
    ("side_pair_eof", 1e-10),
];

pub fn random_params(rng: &mut ChaCha8Rng) -> ClusterParams {
    let mut u = || rng.random_range(-PARAM_BOUND..=PARAM_BOUND);
    ClusterParams {
        j: u(),
        jz: u(),
        j0: u(),
        h: u(),
        hp: u(),
    }
}

pub fn random_state(rng: &mut ChaCha8Rng) -> StateVector {
    let amps = (0..model::DIM)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(amps).expect("random amplitudes are nonzero")
}

/// Eigenvalues of `rho_ab` without the one closest to zero, each fed to the cubic.
pub fn cubic_residual_max(rho_ab: &measures::DensityMatrix, b: f64) -> Result<f64, measures::MeasureError> {
    let mut spectrum = rho_ab.spectrum()?;
    let singlet = (0..spectrum.len())
        .min_by(|&x, &y| spectrum[x].abs().total_cmp(&spectrum[y].abs()))
        .expect("non-empty spectrum");
    spectrum.remove(singlet);
    Ok(spectrum
        .iter()
        .map(|&l| closed_form::cubic_residual(b, l))
        .fold(0.0, f64::max))
}

/// Runs the battery on the closed-form eigensystem.
pub fn verify(seed: u64, samples: usize) -> VerifyReport {
    verify_with_table(seed, samples, model::analytic_eigensystem)
}

/// Runs the battery with eigensystems produced by `table_fn`.
pub fn verify_with_table<F>(seed: u64, samples: usize, table_fn: F) -> VerifyReport
where
    F: Fn(&ClusterParams) -> EigenTable,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tr = Tracker::new(&CHECKS);
    let fail = f64::INFINITY;

    for _ in 0..samples {
        let p = random_params(&mut rng);
        let t = rng.random_range(0.0..=TIME_BOUND);
        let psi = random_state(&mut rng);
        let table = table_fn(&p);
        let h = model::build_hamiltonian(&p);

        tr.record("eigen_residual", table.max_residual(&h));
        tr.record("eigen_orthonormality", table.orthonormality_defect());
        tr.record("hamiltonian_commutators", model::hamiltonian_terms(&p).max_commutator());

        let trajectory = Trajectory::with_table(&p, table.clone());
        let state = trajectory.state(t);
        match OraclePropagator::new(&p) {
            Ok(oracle) => {
                let plus_x = state.max_abs_diff(&oracle.evolve(&model::initial_plus_x(), t));
                let random = model::evolve_with_table(&psi, &table, t).max_abs_diff(&oracle.evolve(&psi, t));
                tr.record("propagator_analytic_vs_oracle", plus_x.max(random));
            }
            Err(_) => tr.record("propagator_analytic_vs_oracle", fail),
        }

        let terms = ClosedFormTerms::new(&p, t);
        let rho_ab = measures::reduce(&state, &Bipartition::central_pair());
        let closed = closed_form::rho_ab_closed(&terms);
        match (&rho_ab, &closed) {
            (Ok(r), Ok(c)) => tr.record("rho_ab_closed_vs_pipeline", max_abs_diff(r.matrix().as_slice(), c.matrix().as_slice())),
            _ => tr.record("rho_ab_closed_vs_pipeline", fail),
        }

        let c_pipe = rho_ab.as_ref().ok().and_then(|r| measures::concurrence_mixed(r).ok());
        match (c_pipe, closed_form::concurrence_ab_closed(&terms)) {
            (Some(a), Ok(b)) => tr.record("concurrence_closed_vs_pipeline", (a.value - b).abs()),
            _ => tr.record("concurrence_closed_vs_pipeline", fail),
        }

        let mut spin_dev = 0.0f64;
        for site in Site::ALL {
            let (hi, lo) = match site {
                Site::A | Site::B => closed_form::lambda_pm_spin_a(&p, t),
                Site::One | Site::Two => closed_form::lambda_pm_spin_1(&p, t),
            };
            match measures::reduce(&state, &Bipartition::single(site)).and_then(|r| r.spectrum()) {
                Ok(s) => {
                    let (s_lo, s_hi) = (s[0].min(s[1]), s[0].max(s[1]));
                    spin_dev = spin_dev.max((s_hi - hi.max(lo)).abs()).max((s_lo - hi.min(lo)).abs());
                }
                Err(_) => spin_dev = fail,
            }
        }
        tr.record("single_spin_spectra", spin_dev);

        match rho_ab.as_ref().map_err(Clone::clone).and_then(|r| cubic_residual_max(r, terms.b_cos)) {
            Ok(r) => tr.record("cubic_residual", r),
            Err(_) => tr.record("cubic_residual", fail),
        }

        tr.record("field_invariance", field_invariance_defect(&p, t, &table_fn));

        match measures::reduce(&state, &Bipartition::side_pair()).and_then(|r| measures::eof_two_qubit(&r)) {
            Ok(e) => tr.record("side_pair_eof", e.abs()),
            Err(_) => tr.record("side_pair_eof", fail),
        }
    }

    VerifyReport {
        seed,
        samples,
        checks: tr.checks,
    }
}

/// Largest spread of any measure across the field grid, entropies in base 2.
pub fn field_invariance_defect<F>(p: &ClusterParams, t: f64, table_fn: &F) -> f64
where
    F: Fn(&ClusterParams) -> EigenTable,
{
    let mut lo = [f64::INFINITY; Measure::ALL.len()];
    let mut hi = [f64::NEG_INFINITY; Measure::ALL.len()];
    for h in FIELD_GRID {
        for hp in FIELD_GRID {
            let q = p.with_fields(h, hp);
            let state = Trajectory::with_table(&q, table_fn(&q)).state(t);
            for (k, m) in Measure::ALL.into_iter().enumerate() {
                match measure_state(&state, m, 2.0) {
                    Ok(v) => {
                        lo[k] = lo[k].min(v);
                        hi[k] = hi[k].max(v);
                    }
                    Err(_) => return f64::INFINITY,
                }
            }
        }
    }
    lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max)
}
