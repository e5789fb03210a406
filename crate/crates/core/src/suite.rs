//! Named example constructions and the assertion suite run over them.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::bayes::{self, Experiment, HypothesisSet};
use crate::constraints::{self, ConstraintSpec};
use crate::definetti::{self, Dictionary, Mixture, TOL_SUPPORT, WEIGHT_FLOOR};
use crate::exchange::{self, TrialSequence};
use crate::linalg::{self, basis_projector, c, identity, pauli_z};
use crate::process::{self, ChoiMap, Instrument, ProcessMatrix, StandardMap};
use crate::tensor::{permute_factors, HermOp, SiteRef, SpaceLayout};
use crate::{par, CMatrix, Error, Result};

/// `sum_j |jj><kk|`, the Choi operator of the identity channel.
pub fn identity_choi(d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d * d, d * d);
    for j in 0..d {
        for k in 0..d {
            m[(j * d + j, k * d + k)] = c(1.0, 0.);
        }
    }
    m
}

/// Single-site trial layout `[A_I, A_O]`.
pub fn comb_trial_layout(d: usize) -> SpaceLayout {
    SpaceLayout::single_site("A", d, d)
}

/// `rho ⊗ [[1]]^{⊗(n-1)} ⊗ 1`: `rho` enters trial 1, each trial's output is
/// carried to the next trial's input, the last output is discarded.
pub fn build_idle_comb(rho: &CMatrix, n: usize, d: usize) -> Result<ProcessMatrix> {
    if n == 0 {
        return Err(Error::TrialMismatch("n must be at least 1".into()));
    }
    if rho.nrows() != d {
        return Err(Error::DimensionMismatch { expected: d, found: rho.nrows() });
    }
    linalg::check_density(rho, crate::DEFAULT_ATOL)?;
    let wire = identity_choi(d);
    let mut m = rho.clone();
    for _ in 1..n {
        m = m.kronecker(&wire);
    }
    m = m.kronecker(&identity(d));
    ProcessMatrix::new(HermOp::new(comb_trial_layout(d).repeat_trials(n)?, m)?)
}

/// Largest `n` accepted by [`build_sym_comb`].
pub const MAX_SYM_COMB: usize = 5;

/// The idle comb averaged over all trial orders.
pub fn build_sym_comb(rho: &CMatrix, n: usize, d: usize) -> Result<ProcessMatrix> {
    if n > MAX_SYM_COMB {
        return Err(Error::TooLarge(format!("symmetrised comb limited to n <= {MAX_SYM_COMB}")));
    }
    let idle = build_idle_comb(rho, n, d)?;
    Ok(ProcessMatrix::unchecked(exchange::symmetrize(&idle.op, n)?))
}

/// Elements `1..=n_max` of the symmetrised comb sequence.
pub fn sym_comb_sequence(rho: &CMatrix, n_max: usize, d: usize) -> Result<TrialSequence> {
    TrialSequence::from_fn(comb_trial_layout(d), n_max, |n| Ok(build_sym_comb(rho, n, d)?.op))
}

/// Two sites `A`, `B` of one trial. `rho` enters `order[0]`, whose output is
/// wired to the input of `order[1]`, whose output is discarded. The result is
/// in reference factor order `A_I, A_O, B_I, B_O`.
pub fn build_bipartite_comb(rho: &CMatrix, d: usize, order: [&str; 2]) -> Result<ProcessMatrix> {
    let [first, second] = order;
    let names = [first, second];
    if !(names.contains(&"A") && names.contains(&"B")) {
        return Err(Error::UnknownSite(format!("order must list A and B, got {order:?}")));
    }
    linalg::check_density(rho, crate::DEFAULT_ATOL)?;
    let chain = SpaceLayout::sites(&[(first, d, d), (second, d, d)])?;
    let m = rho.kronecker(&identity_choi(d)).kronecker(&identity(d));
    let op = HermOp::new(chain, m)?;
    // factor i moves to perm[i]
    let perm = if first == "A" { vec![0, 1, 2, 3] } else { vec![2, 3, 0, 1] };
    ProcessMatrix::new(permute_factors(&op, &perm)?)
}

/// Instruments separating `A` before `B` from `B` before `A` with input `|0>`:
/// `A` measures `Z` and re-prepares the outcome state, `B` measures `X` and
/// prepares the outcome eigenstate.
pub fn discrimination_instruments() -> Vec<Instrument> {
    let z: Vec<CMatrix> = (0..2).map(|k| basis_projector(2, k)).collect();
    let x: Vec<CMatrix> = [1.0, -1.0].iter().map(|&s| linalg::bloch_state(s, 0.0, 0.0)).collect();
    vec![
        Instrument::measure_prepare("A", &z, &z).expect("valid"),
        Instrument::measure_prepare("B", &x, &x).expect("valid"),
    ]
}

/// Instruments that measure `Z` and prepare the maximally mixed state at both
/// sites; with input `1/2` every outcome is uniform under either order.
pub fn blind_instruments() -> Vec<Instrument> {
    let z: Vec<CMatrix> = (0..2).map(|k| basis_projector(2, k)).collect();
    let mixed = vec![identity(2) * c(0.5, 0.); 2];
    vec![
        Instrument::measure_prepare("A", &z, &mixed).expect("valid"),
        Instrument::measure_prepare("B", &z, &mixed).expect("valid"),
    ]
}

/// The two causal-order hypotheses with input `rho`, named `A<B` and `B<A`.
pub fn order_hypotheses(rho: &CMatrix) -> Result<HypothesisSet> {
    HypothesisSet::uniform(
        vec!["A<B".into(), "B<A".into()],
        vec![build_bipartite_comb(rho, 2, ["A", "B"])?, build_bipartite_comb(rho, 2, ["B", "A"])?],
    )
}

/// Qubit trial layout `[q]`.
pub fn qubit_layout() -> SpaceLayout {
    SpaceLayout::state("q", 2)
}

/// `(|0><0|^{⊗n} + |1><1|^{⊗n}) / 2`.
pub fn build_ghz_mixture(n: usize) -> Result<HermOp> {
    let layout = qubit_layout();
    let mix = Mixture::uniform(vec![
        HermOp::new(layout.clone(), basis_projector(2, 0))?,
        HermOp::new(layout, basis_projector(2, 1))?,
    ])?;
    definetti::construct_iid(&mix, n)
}

/// Normalised projector onto the symmetric subspace of `n` copies of `C^d`.
pub fn build_sym_subspace_state(n: usize, d: usize) -> Result<HermOp> {
    if (d as u128).checked_pow(n as u32).is_none_or(|x| x > 4096) {
        return Err(Error::TooLarge(format!("d^n exceeds 4096 for d = {d}, n = {n}")));
    }
    if n > exchange::MAX_SYMMETRIZE {
        return Err(Error::TooLarge(format!("permutation sum over S_{n}")));
    }
    let trial = SpaceLayout::state("q", d);
    let layout = trial.repeat_trials(n)?;
    let dim = layout.total_dim();
    // P_sym = (1/n!) sum_sigma U(sigma)
    let mut sum = CMatrix::zeros(dim, dim);
    let mut count = 0usize;
    for sigma in (0..n).permutations(n) {
        sum += exchange::trial_permutation(n, &sigma, &trial)?.unitary();
        count += 1;
    }
    let rank = linalg::binomial(n + d - 1, n);
    HermOp::new(layout, sum * c(1.0 / (count * rank) as f64, 0.))
}

/// Monte Carlo estimate of the Haar average of `|psi><psi|^{⊗n}`.
pub fn haar_average(n: usize, d: usize, samples: usize, seed: u64) -> CMatrix {
    const BLOCK: usize = 1000;
    let blocks = samples.div_ceil(BLOCK);
    let dim = d.pow(n as u32);
    let partial = par::map_range(blocks, |b| {
        let mut rng = linalg::seeded(seed.wrapping_mul(1_000_003).wrapping_add(b as u64));
        let count = BLOCK.min(samples - b * BLOCK);
        let mut acc = CMatrix::zeros(dim, dim);
        for _ in 0..count {
            let psi = linalg::random_pure_state(d, &mut rng);
            let mut v = psi.clone();
            for _ in 1..n {
                v = v.kronecker(&psi);
            }
            acc += &v * v.adjoint();
        }
        acc
    });
    let total = partial.into_iter().fold(CMatrix::zeros(dim, dim), |a, b| a + b);
    total * c(1.0 / samples as f64, 0.)
}

/// `count` equally spaced qubit states `(1 + x X + y Y + zbar Z) / 2` with
/// `x^2 + y^2 = radius^2`.
pub fn bloch_ring_atoms(zbar: f64, radius: f64, count: usize) -> Result<Vec<HermOp>> {
    if radius * radius + zbar * zbar > 1.0 + 1e-12 {
        return Err(Error::InvalidState(format!("ring (zbar {zbar}, radius {radius}) leaves the Bloch ball")));
    }
    let layout = qubit_layout();
    (0..count)
        .map(|k| {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
            HermOp::new(layout.clone(), linalg::bloch_state(radius * phi.cos(), radius * phi.sin(), zbar))
        })
        .collect()
}

/// Uniform mixture of `n`-fold powers of the ring states.
pub fn build_bloch_constrained(zbar: f64, radius: f64, n: usize, grid_count: usize) -> Result<HermOp> {
    definetti::construct_iid(&Mixture::uniform(bloch_ring_atoms(zbar, radius, grid_count)?)?, n)
}

/// `tr(O^{⊗n} rho)` for a single-qubit `O`.
pub fn power_expectation(rho: &HermOp, o: &CMatrix, n: usize) -> f64 {
    let full = definetti::kron_power(o, n);
    (full * rho.entries()).trace().re
}

fn qubit_op(m: CMatrix) -> HermOp {
    HermOp::new(qubit_layout(), m).expect("Hermitian")
}

fn z_spec(value: f64) -> ConstraintSpec {
    ConstraintSpec::product_expectation(vec![qubit_op(pauli_z())], vec![value]).expect("one operator")
}

/// How an assertion compares its value with its threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    AtLeast,
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub passed: bool,
}

impl Assertion {
    fn new(name: &str, value: f64, comparison: Comparison, threshold: f64) -> Self {
        let passed = match comparison {
            Comparison::AtMost => value <= threshold,
            Comparison::AtLeast => value >= threshold,
            Comparison::Above => value > threshold,
        };
        Self { name: name.into(), value, comparison, threshold, passed }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub name: String,
    pub description: String,
    pub assertions: Vec<Assertion>,
    /// Set when the case could not be evaluated.
    pub error: Option<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub cases: Vec<CaseReport>,
    pub passed: bool,
}

/// Overrides for a suite run.
#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    /// Replaces the threshold of every upper-bound assertion.
    pub tol: Option<f64>,
    pub seed: u64,
}

/// Collects assertions for one case, applying the tolerance override.
struct Checks<'a> {
    opts: &'a SuiteOptions,
    items: Vec<Assertion>,
}

impl<'a> Checks<'a> {
    fn new(opts: &'a SuiteOptions) -> Self {
        Self { opts, items: Vec::new() }
    }

    fn at_most(&mut self, name: &str, value: f64, threshold: f64) {
        let t = self.opts.tol.unwrap_or(threshold);
        self.items.push(Assertion::new(name, value, Comparison::AtMost, t));
    }

    fn at_least(&mut self, name: &str, value: f64, threshold: f64) {
        self.items.push(Assertion::new(name, value, Comparison::AtLeast, threshold));
    }

    fn above(&mut self, name: &str, value: f64, threshold: f64) {
        self.items.push(Assertion::new(name, value, Comparison::Above, threshold));
    }
}

type CaseFn = fn(&SuiteOptions) -> Result<Vec<Assertion>>;

/// A named construction with its assertions.
#[derive(Clone, Copy)]
pub struct SuiteCase {
    pub name: &'static str,
    pub description: &'static str,
    run: CaseFn,
}

impl SuiteCase {
    pub fn run(&self, opts: &SuiteOptions) -> CaseReport {
        let (assertions, error) = match (self.run)(opts) {
            Ok(a) => (a, None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
        let passed = error.is_none() && assertions.iter().all(|a| a.passed);
        CaseReport { name: self.name.into(), description: self.description.into(), assertions, error, passed }
    }
}

pub fn cases() -> Vec<SuiteCase> {
    vec![
        SuiteCase { name: "idle_comb", description: "identity-wire comb over n trials", run: case_idle_comb },
        SuiteCase { name: "sym_comb", description: "idle comb averaged over trial orders", run: case_sym_comb },
        SuiteCase { name: "ghz_mixture", description: "equal mixture of |0>^n and |1>^n", run: case_ghz },
        SuiteCase { name: "sym_subspace", description: "Haar average of pure-state powers", run: case_sym_subspace },
        SuiteCase { name: "bloch_constrained", description: "mixture over a fixed-<Z> ring", run: case_bloch },
        SuiteCase {
            name: "positive_constraint",
            description: "single-trial constraint tr(R rho) = 0 with R >= 0",
            run: case_positive,
        },
        SuiteCase { name: "order_discovery", description: "posterior over two causal orders", run: case_discovery },
    ]
}

/// Runs the cases whose name contains `filter` (all when `None`).
pub fn run_suite(filter: Option<&str>, opts: &SuiteOptions) -> Result<SuiteReport> {
    let selected: Vec<SuiteCase> = cases().into_iter().filter(|c| filter.is_none_or(|f| c.name.contains(f))).collect();
    if selected.is_empty() {
        return Err(Error::UnknownCase(filter.unwrap_or_default().to_string()));
    }
    let reports = par::map(&selected, |case| case.run(opts));
    let passed = reports.iter().all(|r| r.passed);
    Ok(SuiteReport { cases: reports, passed })
}

fn case_idle_comb(opts: &SuiteOptions) -> Result<Vec<Assertion>> {
    let mut ch = Checks::new(opts);
    let rho = basis_projector(2, 0);
    let one = build_idle_comb(&rho, 1, 2)?;
    let prep = rho.kronecker(&identity(2));
    ch.at_most("n1_equals_preparation", linalg::max_abs_diff(one.op.entries(), &prep), 1e-15);
    let two = build_idle_comb(&rho, 2, 2)?;
    ch.at_most("n2_dimension_16", (two.op.dim() as f64 - 16.0).abs(), 0.0);
    ch.at_most("n2_trace_4", (two.op.trace() - 4.0).abs(), 1e-12);
    for n in [2, 3] {
        let w = build_idle_comb(&rho, n, 2)?;
        let order: Vec<SiteRef> = (1..=n).map(|t| SiteRef::new("A", t)).collect();
        let report = process::validate_process(&w.op, &w.sites())?;
        ch.at_most(&format!("n{n}_validity_normalisation"), report.normalization_residual, 1e-9);
        ch.at_most(&format!("n{n}_validity_psd"), report.psd_residual, 1e-9);
        ch.at_most(&format!("n{n}_comb_natural_order"), constraints::comb_residual(&w.op, &order)?, 1e-12);
        let reversed: Vec<SiteRef> = order.iter().rev().cloned().collect();
        ch.above(&format!("n{n}_comb_reversed_order"), constraints::comb_residual(&w.op, &reversed)?, 0.01);
        let id = process::build_standard_choi("A", &StandardMap::Identity { d: 2 })?;
        let reduced = process::reduced_process(&w, &SiteRef::new("A", n), &id)?;
        let shorter = build_idle_comb(&rho, n - 1, 2)?;
        ch.at_most(
            &format!("n{n}_identity_reduction"),
            linalg::max_abs_diff(reduced.entries(), shorter.op.entries()),
            1e-12,
        );
    }
    Ok(ch.items)
}

/// Normalised single-trial processes `sigma ⊗ 1 / d` for the comb trial.
fn product_process_dictionary(d: usize, count: usize, seed: u64) -> Result<Dictionary> {
    definetti::sample_dictionary(&comb_trial_layout(d), None, count, seed)
}

fn case_sym_comb(opts: &SuiteOptions) -> Result<Vec<Assertion>> {
    let mut ch = Checks::new(opts);
    let rho = basis_projector(2, 0);
    let seq = sym_comb_sequence(&rho, 2, 2)?;
    let w2 = seq.get(2)?.clone();
    ch.at_most("symmetry", exchange::symmetry_residual(&w2, 2)?, 1e-12);
    let id = process::build_standard_choi("A", &StandardMap::Identity { d: 2 })?;
    ch.at_most("weak_extendibility_identity", exchange::weak_extendibility_residual(&seq, 1, &id)?, 1e-10);
    ch.above("process_extendibility", exchange::process_extendibility_residual(&seq, 1, &[])?, 0.01);
    ch.above("channel_extendibility", exchange::channel_extendibility_residual(&seq, 1, &[])?, 0.1);
    let w = ProcessMatrix::unchecked(w2.clone());
    let s = constraints::signalling_strength(&w, &[SiteRef::new("A", 2)], &[SiteRef::new("A", 1)], &[])?;
    ch.above("signalling_trial2_to_trial1", s, 0.2);
    let dict = product_process_dictionary(2, 200, opts.seed)?;
    let fit = definetti::fit_mixture(&w.normalized(), &dict, 2)?;
    ch.above("product_dictionary_fit_residual", fit.fit_residual, 0.01);
    Ok(ch.items)
}

/// Total weight on atoms whose `<k|a|k>` is at least `fidelity`.
fn weight_near_basis(dict: &Dictionary, weights: &[f64], k: usize, fidelity: f64) -> f64 {
    dict.atoms().iter().zip(weights).filter(|(a, _)| a.entries()[(k, k)].re >= fidelity).map(|(_, w)| w).sum()
}

fn case_ghz(opts: &SuiteOptions) -> Result<Vec<Assertion>> {
    let mut ch = Checks::new(opts);
    let r = basis_projector(2, 1);
    let ghz2 = build_ghz_mixture(2)?;
    let ghz3 = build_ghz_mixture(3)?;
    ch.at_most("zz_equals_one", (power_expectation(&ghz2, &pauli_z(), 2) - 1.0).abs(), 1e-12);
    ch.at_most("zzz_vanishes", power_expectation(&ghz3, &pauli_z(), 3).abs(), 1e-12);
    let rr = power_expectation(&ghz2, &r, 2);
    ch.at_most("rr_equals_half", (rr - 0.5).abs(), 1e-12);
    ch.at_least("rr_exceeds_r_squared", rr, 0.25);
    let dict = definetti::bloch_grid(&qubit_layout(), 200)?;
    let fit = definetti::fit_mixture(&ghz3, &dict, 3)?;
    ch.at_most("fit_residual", fit.fit_residual, 1e-3);
    ch.at_least("weight_near_zero_state", weight_near_basis(&dict, &fit.weights, 0, 0.95), 0.49);
    ch.at_least("weight_near_one_state", weight_near_basis(&dict, &fit.weights, 1, 0.95), 0.49);
    let low_r = dict
        .atoms()
        .iter()
        .zip(&fit.weights)
        .filter(|(a, _)| a.entries()[(1, 1)].re <= 0.05)
        .map(|(_, w)| *w)
        .fold(0.0, f64::max);
    ch.at_least("support_atom_with_small_r", low_r, 0.45);
    let mix = definetti::fitted_mixture(&dict, &fit)?;
    let report = definetti::support_report(&mix, &z_spec(0.0), WEIGHT_FLOOR, TOL_SUPPORT)?;
    ch.at_most("zero_mean_z_support_fails", if report.verdict { 1.0 } else { 0.0 }, 0.5);
    Ok(ch.items)
}

fn fibonacci_pure_dictionary(count: usize) -> Result<Dictionary> {
    let atoms = definetti::fibonacci_sphere(count)
        .into_iter()
        .map(|[x, y, z]| HermOp::new(qubit_layout(), linalg::bloch_state(x, y, z)))
        .collect::<Result<_>>()?;
    Dictionary::new(atoms)
}

fn case_sym_subspace(opts: &SuiteOptions) -> Result<Vec<Assertion>> {
    let mut ch = Checks::new(opts);
    let rho = build_sym_subspace_state(2, 2)?;
    let ranks = linalg::eigenvalues(&(rho.entries() * c(3.0, 0.)));
    let rank = ranks.iter().filter(|&&e| e > 0.5).count();
    ch.at_most("rank_three", (rank as f64 - 3.0).abs(), 0.0);
    ch.at_most("trace_one", (rho.trace() - 1.0).abs(), 1e-12);
    let mc = haar_average(2, 2, 100_000, opts.seed);
    ch.at_most("monte_carlo_agreement", linalg::max_abs_diff(&mc, rho.entries()), 1e-2);
    let marginal = crate::tensor::partial_trace(&rho, &["q#1"])?;
    ch.at_most("marginal_maximally_mixed", linalg::max_abs_diff(marginal.entries(), &(identity(2) * c(0.5, 0.))), 1e-12);
    let mut rng = linalg::seeded(opts.seed);
    let unitaries: Vec<CMatrix> = (0..20).map(|_| linalg::haar_unitary(2, &mut rng)).collect();
    let invariance = unitaries
        .iter()
        .map(|u| {
            let uu = u.kronecker(u);
            linalg::max_abs_diff(&(&uu * rho.entries() * uu.adjoint()), rho.entries())
        })
        .fold(0.0, f64::max);
    ch.at_most("unitary_invariance", invariance, 1e-9);
    let dict = fibonacci_pure_dictionary(100)?;
    let fit = definetti::fit_mixture(&rho, &dict, 2)?;
    ch.at_most("pure_dictionary_fit_residual", fit.fit_residual, 1e-3);
    let least_moved = dict
        .atoms()
        .iter()
        .zip(&fit.weights)
        .filter(|(_, &w)| w > WEIGHT_FLOOR)
        .map(|(a, _)| {
            unitaries
                .iter()
                .map(|u| linalg::max_abs_diff(&(u * a.entries() * u.adjoint()), a.entries()))
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min);
    ch.above("heavy_atoms_not_invariant", least_moved, 0.1);
    Ok(ch.items)
}

/// Ring atoms plus Fibonacci-grid distractors, `total` atoms in all.
pub fn ring_plus_grid_dictionary(zbar: f64, radius: f64, ring: usize, total: usize) -> Result<Dictionary> {
    let atoms = bloch_ring_atoms(zbar, radius, ring)?;
    Dictionary::new(atoms)?.extend(&definetti::bloch_grid(&qubit_layout(), total - ring)?)
}

fn case_bloch(opts: &SuiteOptions) -> Result<Vec<Assertion>> {
    let mut ch = Checks::new(opts);
    let (zbar, radius, ring) = (0.6, 0.5, 8);
    let rho2 = build_bloch_constrained(zbar, radius, 2, ring)?;
    ch.at_most("zz_equals_zbar_squared", (power_expectation(&rho2, &pauli_z(), 2) - zbar * zbar).abs(), 1e-9);
    let marginal = crate::tensor::partial_trace(&rho2, &["q#1"])?;
    let [x, y, z] = linalg::bloch_vector(marginal.entries());
    ch.at_most("marginal_bloch_vector", (x.abs()).max(y.abs()).max((z - zbar).abs()), 1e-12);
    let pole = build_bloch_constrained(1.0, 0.0, 3, ring)?;
    ch.at_most("pole_is_product", linalg::max_abs_diff(pole.entries(), &definetti::kron_power(&basis_projector(2, 0), 3)), 1e-12);
    let rho3 = build_bloch_constrained(zbar, radius, 3, ring)?;
    let dict = ring_plus_grid_dictionary(zbar, radius, ring, 200)?;
    let fit = definetti::fit_mixture(&rho3, &dict, 3)?;
    ch.at_most("fit_residual", fit.fit_residual, 1e-3);
    let mix = definetti::fitted_mixture(&dict, &fit)?;
    let report = definetti::support_report(&mix, &z_spec(zbar), WEIGHT_FLOOR, TOL_SUPPORT)?;
    let worst = report.entries.iter().map(|e| e.max_residual).fold(0.0, f64::max);
    ch.at_most("support_z_deviation", worst, TOL_SUPPORT);
    Ok(ch.items)
}

fn case_positive(opts: &SuiteOptions) -> Result<Vec<Assertion>> {
    let mut ch = Checks::new(opts);
    let r = basis_projector(2, 1);
    // tr(R rho) = 0 with R = |1><1| leaves |0><0| as the only single-trial state
    let atom = qubit_op(basis_projector(2, 0));
    let rho3 = definetti::construct_iid(&Mixture::uniform(vec![atom])?, 3)?;
    let marginal = crate::tensor::partial_trace(&rho3, &["q#1"])?;
    ch.at_most("marginal_constraint", (r.clone() * marginal.entries()).trace().re.abs(), 1e-12);
    let dict = definetti::bloch_grid(&qubit_layout(), 200)?;
    let fit = definetti::fit_mixture(&rho3, &dict, 3)?;
    let worst = dict
        .atoms()
        .iter()
        .zip(&fit.weights)
        .filter(|(_, &w)| w > WEIGHT_FLOOR)
        .map(|(a, _)| (&r * a.entries()).trace().re)
        .fold(0.0, f64::max);
    ch.at_most("support_r_expectation", worst, TOL_SUPPORT);
    Ok(ch.items)
}

fn case_discovery(opts: &SuiteOptions) -> Result<Vec<Assertion>> {
    let mut ch = Checks::new(opts);
    let hyp = order_hypotheses(&basis_projector(2, 0))?;
    let seeds: Vec<u64> = (0..20).map(|s| opts.seed + s).collect();
    let exp = Experiment {
        truth: hyp.processes[0].clone(),
        truth_index: Some(0),
        hypotheses: hyp,
        instruments: discrimination_instruments(),
        trials: 200,
        seeds: seeds.clone(),
        threshold: 0.99,
    };
    let report = bayes::discovery_experiment(&exp)?;
    ch.at_least("median_final_mass_truth", report.median_final_mass_truth.unwrap_or(0.0), 0.99);
    let blind_hyp = order_hypotheses(&(identity(2) * c(0.5, 0.)))?;
    let blind = Experiment {
        truth: blind_hyp.processes[0].clone(),
        truth_index: Some(0),
        hypotheses: blind_hyp,
        instruments: blind_instruments(),
        trials: 200,
        seeds,
        threshold: 0.99,
    };
    let report = bayes::discovery_experiment(&blind)?;
    let drift = report.replicas.iter().map(|r| (r.posterior[200][0] - 0.5).abs()).fold(0.0, f64::max);
    ch.at_most("blind_posterior_uniform", drift, 0.05);
    Ok(ch.items)
}

/// Choi operator of the identity channel on site `A`.
pub fn identity_map(d: usize) -> ChoiMap {
    process::build_standard_choi("A", &StandardMap::Identity { d }).expect("identity is CPTP")
}
