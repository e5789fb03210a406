//! Trial permutations, symmetrisation and extendibility residuals.
//!
//! Element `n` of a [`TrialSequence`] lives on `n` copies of the trial
//! layout, trial `j` carrying labels suffixed `#j`. All residuals are
//! max-entry norms and certify finite prefixes only.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, c};
use crate::process::{cptp_affine_span, ChoiMap};
use crate::tensor::{permute_factors, HermOp, SpaceLayout};
use crate::{par, CMatrix, Error, Result, DEFAULT_ATOL};

/// Largest `n` for which [`symmetrize`] enumerates `S_n`.
pub const MAX_SYMMETRIZE: usize = 7;

/// Operators on `1, 2, ...` copies of a single-trial layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceJson", into = "SequenceJson")]
pub struct TrialSequence {
    trial_layout: SpaceLayout,
    elements: BTreeMap<usize, HermOp>,
}

#[derive(Serialize, Deserialize)]
struct SequenceJson {
    trial_layout: SpaceLayout,
    elements: BTreeMap<usize, HermOp>,
}

impl TryFrom<SequenceJson> for TrialSequence {
    type Error = Error;

    fn try_from(json: SequenceJson) -> Result<Self> {
        let mut seq = TrialSequence::new(json.trial_layout);
        for (n, op) in json.elements {
            seq.insert(n, op)?;
        }
        Ok(seq)
    }
}

impl From<TrialSequence> for SequenceJson {
    fn from(seq: TrialSequence) -> Self {
        Self { trial_layout: seq.trial_layout, elements: seq.elements }
    }
}

impl TrialSequence {
    pub fn new(trial_layout: SpaceLayout) -> Self {
        Self { trial_layout, elements: BTreeMap::new() }
    }

    /// Builds a sequence from `f(n)` for `n = 1..=n_max`.
    pub fn from_fn<F>(trial_layout: SpaceLayout, n_max: usize, f: F) -> Result<Self>
    where
        F: Fn(usize) -> Result<HermOp>,
    {
        let mut seq = Self::new(trial_layout);
        for n in 1..=n_max {
            seq.insert(n, f(n)?)?;
        }
        Ok(seq)
    }

    /// Stores element `n`, relabelled onto `n` copies of the trial layout.
    pub fn insert(&mut self, n: usize, op: HermOp) -> Result<()> {
        if n == 0 {
            return Err(Error::TrialMismatch("element index starts at 1".into()));
        }
        let layout = self.trial_layout.repeat_trials(n)?;
        if op.dim() != layout.total_dim() {
            return Err(Error::DimensionMismatch { expected: layout.total_dim(), found: op.dim() });
        }
        let op = if op.layout().dims() == layout.dims() {
            op.with_layout(layout)?
        } else {
            return Err(Error::TrialMismatch(format!("element {n} does not factor into {n} trials")));
        };
        self.elements.insert(n, op);
        Ok(())
    }

    pub fn trial_layout(&self) -> &SpaceLayout {
        &self.trial_layout
    }

    pub fn get(&self, n: usize) -> Result<&HermOp> {
        self.elements.get(&n).ok_or(Error::MissingElement(n))
    }

    pub fn max_n(&self) -> usize {
        self.elements.keys().next_back().copied().unwrap_or(0)
    }

    pub fn elements(&self) -> impl Iterator<Item = (usize, &HermOp)> {
        self.elements.iter().map(|(&n, op)| (n, op))
    }
}

/// Conjugation by the unitary that moves trial `t` to trial `sigma[t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialPermutation {
    layout: SpaceLayout,
    factor_perm: Vec<usize>,
}

impl TrialPermutation {
    /// Factor permutation on the `n`-trial layout.
    pub fn factor_permutation(&self) -> &[usize] {
        &self.factor_perm
    }

    /// `U a U†`, keeping the layout labels of `a`.
    pub fn apply(&self, a: &HermOp) -> Result<HermOp> {
        if a.layout().dims() != self.layout.dims() {
            return Err(Error::DimensionMismatch { expected: self.layout.total_dim(), found: a.dim() });
        }
        let moved = permute_factors(&a.with_layout(self.layout.clone())?, &self.factor_perm)?;
        HermOp::from_parts_checked(a.layout().clone(), moved.into_entries())
    }

    /// The permutation matrix `U`.
    pub fn unitary(&self) -> CMatrix {
        let dims = self.layout.dims();
        let mut new_dims = vec![0; dims.len()];
        for (i, &p) in self.factor_perm.iter().enumerate() {
            new_dims[p] = dims[i];
        }
        let n = self.layout.total_dim();
        let mut u = CMatrix::zeros(n, n);
        for idx in 0..n {
            let d = linalg::digits(idx, &dims);
            let mut moved = vec![0; dims.len()];
            for (f, &p) in self.factor_perm.iter().enumerate() {
                moved[p] = d[f];
            }
            let target = moved.iter().zip(&new_dims).fold(0, |acc, (&x, &dim)| acc * dim + x);
            u[(target, idx)] = c(1., 0.);
        }
        u
    }
}

/// Permutation of whole trials: every factor of trial `t` (0-based) moves
/// to the matching position of trial `sigma[t]`.
pub fn trial_permutation(n: usize, sigma: &[usize], trial_layout: &SpaceLayout) -> Result<TrialPermutation> {
    if sigma.len() != n {
        return Err(Error::InvalidPermutation(format!("expected {n} entries, got {}", sigma.len())));
    }
    let mut seen = vec![false; n];
    for &s in sigma {
        if s >= n || std::mem::replace(&mut seen[s], true) {
            return Err(Error::InvalidPermutation(format!("{sigma:?} is not a bijection on 0..{n}")));
        }
    }
    let m = trial_layout.len();
    let factor_perm = (0..n * m).map(|i| sigma[i / m] * m + i % m).collect();
    Ok(TrialPermutation { layout: trial_layout.repeat_trials(n)?, factor_perm })
}

fn trial_layout_of(w: &HermOp, n: usize) -> Result<SpaceLayout> {
    let layout = w.layout();
    if n == 0 || !layout.len().is_multiple_of(n) {
        return Err(Error::TrialMismatch(format!("{} factors do not split into {n} trials", layout.len())));
    }
    let m = layout.len() / n;
    let first = SpaceLayout::unchecked(layout.factors()[..m].to_vec())?;
    let trial = first.with_trial(1)?;
    let trial = SpaceLayout::new(trial.factors().to_vec())?;
    let expected = trial.repeat_trials(n)?;
    if expected.dims() != layout.dims() {
        return Err(Error::TrialMismatch("trials have different dimensions".into()));
    }
    Ok(trial)
}

/// Average of `U(sigma) w U(sigma)†` over all `sigma` in `S_n`.
pub fn symmetrize(w: &HermOp, n: usize) -> Result<HermOp> {
    if n > MAX_SYMMETRIZE {
        return Err(Error::TooLarge(format!("symmetrize enumerates n! permutations; n = {n} > {MAX_SYMMETRIZE}")));
    }
    let trial = trial_layout_of(w, n)?;
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let count = perms.len() as f64;
    let mut acc = CMatrix::zeros(w.dim(), w.dim());
    // bounded memory: conjugate a block of permutations at a time, sum in order
    for block in perms.chunks(8) {
        let images = par::map(block, |sigma| -> Result<CMatrix> {
            Ok(trial_permutation(n, sigma, &trial)?.apply(w)?.into_entries())
        });
        for img in images {
            acc += img?;
        }
    }
    HermOp::from_parts_checked(w.layout().clone(), acc * c(1.0 / count, 0.))
}

/// Max over transpositions of `max |U w U† - w|`.
pub fn symmetry_residual(w: &HermOp, n: usize) -> Result<f64> {
    let trial = trial_layout_of(w, n)?;
    let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    let values = par::map(&pairs, |&(i, j)| -> Result<f64> {
        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.swap(i, j);
        let moved = trial_permutation(n, &sigma, &trial)?.apply(w)?;
        moved.max_abs_diff(w)
    });
    values.into_iter().try_fold(0.0f64, |acc, v| Ok(acc.max(v?)))
}

/// Labels of trial `t` (1-based) in an `n`-trial sequence element.
fn trial_labels(seq: &TrialSequence, t: usize) -> Vec<String> {
    seq.trial_layout.factors().iter().map(|f| format!("{}#{}", f.label, t)).collect()
}

fn kept_labels(seq: &TrialSequence, n: usize) -> Vec<String> {
    (1..=n).flat_map(|t| trial_labels(seq, t)).collect()
}

/// `max |rho^(n) - tr_{n+1} rho^(n+1)|` on unit-trace elements.
pub fn state_extendibility_residual(seq: &TrialSequence, n: usize) -> Result<f64> {
    let small = seq.get(n)?;
    let big = seq.get(n + 1)?;
    let reduced = crate::tensor::partial_trace(big, &kept_labels(seq, n))?;
    let a = small.normalized();
    let b = reduced.normalized();
    Ok(linalg::max_abs_diff(a.entries(), b.entries()))
}

/// `max |W^(n) - tr_{n+1}[W^(n+1) (1 ⊗ probe)]|` over a probe family.
fn probe_residual(seq: &TrialSequence, n: usize, probes: &[CMatrix], labels: &[String]) -> Result<f64> {
    let small = seq.get(n)?;
    let big = seq.get(n + 1)?;
    let values = par::map(probes, |m| -> Result<f64> {
        let reduced = big.contract(labels, m)?;
        Ok(linalg::max_abs_diff(small.entries(), reduced.entries()))
    });
    values.into_iter().try_fold(0.0f64, |acc, v| Ok(acc.max(v?)))
}

/// Products over the sites of one trial of each site's CPTP spanning set,
/// in trial-layout factor order.
pub fn trial_span(trial_layout: &SpaceLayout) -> Result<Vec<CMatrix>> {
    let mut tuples = vec![CMatrix::identity(1, 1)];
    let mut order = Vec::new();
    for s in trial_layout.site_refs() {
        let (d_in, d_out) = trial_layout.site_dims(&s)?;
        let span = cptp_affine_span(d_in, d_out);
        tuples = tuples.iter().flat_map(|t| span.iter().map(move |r| t.kronecker(r.entries()))).collect();
        order.extend(trial_layout.site_labels(&s)?);
    }
    // bring site-grouped factor order into layout order
    let grouped = SpaceLayout::unchecked(
        order.iter().map(|l| trial_layout.factors()[trial_layout.position(l).expect("label")].clone()).collect(),
    )?;
    let perm: Vec<usize> = order.iter().map(|l| trial_layout.position(l).expect("label")).collect();
    tuples
        .into_iter()
        .map(|t| Ok(permute_factors(&HermOp::from_parts_checked(grouped.clone(), t)?, &perm)?.into_entries()))
        .collect()
}

fn check_probe(seq: &TrialSequence, m: &ChoiMap) -> Result<()> {
    if m.op.dim() != seq.trial_layout.total_dim() {
        return Err(Error::DimensionMismatch { expected: seq.trial_layout.total_dim(), found: m.op.dim() });
    }
    let r = m.tp_residual();
    if r > DEFAULT_ATOL {
        return Err(Error::NotCptp(format!("trace-preservation residual {r:.3e}")));
    }
    Ok(())
}

/// Process extendibility from `n + 1` to `n` over `probes` (CPTP maps on one
/// trial, in trial-layout factor order). An empty slice uses [`trial_span`].
pub fn process_extendibility_residual(seq: &TrialSequence, n: usize, probes: &[ChoiMap]) -> Result<f64> {
    let mats: Vec<CMatrix> = if probes.is_empty() {
        trial_span(&seq.trial_layout)?
    } else {
        probes.iter().map(|m| check_probe(seq, m).map(|_| m.op.entries().clone())).collect::<Result<_>>()?
    };
    probe_residual(seq, n, &mats, &trial_labels(seq, n + 1))
}

/// Extendibility with a single fixed CPTP map inserted into the last trial.
pub fn weak_extendibility_residual(seq: &TrialSequence, n: usize, fixed_map: &ChoiMap) -> Result<f64> {
    check_probe(seq, fixed_map)?;
    if fixed_map.op.min_eigenvalue() < -DEFAULT_ATOL {
        return Err(Error::NotCptp("map is not completely positive".into()));
    }
    probe_residual(seq, n, std::slice::from_ref(fixed_map.op.entries()), &trial_labels(seq, n + 1))
}

/// Computational projectors and the phased superpositions
/// `(|j> + |k>)/sqrt 2`, `(|j> + i|k>)/sqrt 2`; they span all operators.
pub fn default_probe_states(d: usize) -> Vec<CMatrix> {
    let mut out: Vec<CMatrix> = (0..d).map(|k| linalg::basis_projector(d, k)).collect();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for (j, k) in (0..d).tuple_combinations() {
        for phase in [c(s, 0.), c(0., s)] {
            let mut psi = nalgebra::DVector::zeros(d);
            psi[j] = c(s, 0.);
            psi[k] = phase;
            out.push(linalg::projector(&psi));
        }
    }
    out
}

/// Extendibility over trace-and-prepare probes `1_in ⊗ rho^T` on the last
/// trial. An empty slice uses [`default_probe_states`] on the trial output.
pub fn channel_extendibility_residual(seq: &TrialSequence, n: usize, probe_states: &[CMatrix]) -> Result<f64> {
    let trial = &seq.trial_layout;
    let t = n + 1;
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    for f in trial.factors() {
        let label = format!("{}#{}", f.label, t);
        match f.role {
            crate::tensor::Role::Input => ins.push(label),
            crate::tensor::Role::Output => outs.push(label),
        }
    }
    let (d_in, d_out) = (trial.input_dim(), trial.output_dim());
    let defaults;
    let states = if probe_states.is_empty() {
        defaults = default_probe_states(d_out);
        &defaults[..]
    } else {
        probe_states
    };
    let mats = states
        .iter()
        .map(|rho| {
            if rho.nrows() != d_out {
                return Err(Error::DimensionMismatch { expected: d_out, found: rho.nrows() });
            }
            linalg::check_density(rho, DEFAULT_ATOL)?;
            Ok(linalg::identity(d_in).kronecker(&rho.transpose()))
        })
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<String> = ins.into_iter().chain(outs).collect();
    probe_residual(seq, n, &mats, &labels)
}

/// Finite-prefix exchangeability summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExchangeabilityReport {
    /// `(n, residual)` for every stored element.
    pub symmetry: Vec<(usize, f64)>,
    /// `(n, residual)` for every consecutive pair `n, n + 1`.
    pub state_extendibility: Vec<(usize, f64)>,
    pub process_extendibility: Vec<(usize, f64)>,
    /// Largest `N` such that elements `1..=N` are symmetric and each is the
    /// reduction of the next. This does not certify an infinite sequence.
    pub exchangeable_up_to: usize,
}

pub fn exchangeability_report(seq: &TrialSequence, atol: f64) -> Result<ExchangeabilityReport> {
    let mut symmetry = Vec::new();
    let mut state = Vec::new();
    let mut process = Vec::new();
    let mut up_to = 0;
    let mut chain_ok = true;
    for n in 1..=seq.max_n() {
        let Ok(w) = seq.get(n) else {
            chain_ok = false;
            continue;
        };
        let sym = symmetry_residual(w, n)?;
        symmetry.push((n, sym));
        if chain_ok && sym <= atol {
            up_to = n;
        } else {
            chain_ok = false;
        }
        if seq.get(n + 1).is_ok() {
            let s = state_extendibility_residual(seq, n)?;
            let p = process_extendibility_residual(seq, n, &[])?;
            state.push((n, s));
            process.push((n, p));
            if p > atol {
                chain_ok = false;
            }
        }
    }
    Ok(ExchangeabilityReport { symmetry, state_extendibility: state, process_extendibility: process, exchangeable_up_to: up_to })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::basis_projector;
    use crate::process::{build_standard_choi, random_cptp, StandardMap};
    use proptest::prelude::*;

    fn qubit() -> SpaceLayout {
        SpaceLayout::state("q", 2)
    }

    fn on_trials(m: CMatrix, n: usize) -> HermOp {
        HermOp::new(qubit().repeat_trials(n).unwrap(), m).unwrap()
    }

    fn power(rho: &CMatrix, n: usize) -> CMatrix {
        (1..n).fold(rho.clone(), |acc, _| acc.kronecker(rho))
    }

    fn mixture_seq(states: &[CMatrix], weights: &[f64], n_max: usize) -> TrialSequence {
        TrialSequence::from_fn(qubit(), n_max, |n| {
            let m = states.iter().zip(weights).fold(CMatrix::zeros(1 << n, 1 << n), |acc, (s, &p)| acc + power(s, n) * c(p, 0.));
            Ok(on_trials(m, n))
        })
        .unwrap()
    }

    #[test]
    fn permutation_examples() {
        let mut rng = linalg::seeded(1);
        let rho = linalg::random_density(2, &mut rng);
        let sigma = linalg::random_density(2, &mut rng);
        let id = trial_permutation(2, &[0, 1], &qubit()).unwrap();
        let rs = on_trials(rho.kronecker(&sigma), 2);
        assert_eq!(id.apply(&rs).unwrap(), rs);
        let swap = trial_permutation(2, &[1, 0], &qubit()).unwrap();
        let sr = swap.apply(&rs).unwrap();
        assert!(linalg::max_abs_diff(sr.entries(), &sigma.kronecker(&rho)) < 1e-15);
        assert!(trial_permutation(2, &[1, 1], &qubit()).is_err());

        let cycle = trial_permutation(3, &[1, 2, 0], &qubit()).unwrap();
        let w = on_trials(linalg::random_density(8, &mut rng), 3);
        let thrice = cycle.apply(&cycle.apply(&cycle.apply(&w).unwrap()).unwrap()).unwrap();
        assert!(thrice.max_abs_diff(&w).unwrap() < 1e-15);
    }

    #[test]
    fn unitary_matches_apply() {
        let mut rng = linalg::seeded(2);
        let trial = SpaceLayout::sites(&[("A", 2, 3)]).unwrap();
        let p = trial_permutation(2, &[1, 0], &trial).unwrap();
        let w = HermOp::new(trial.repeat_trials(2).unwrap(), linalg::random_hermitian(36, &mut rng)).unwrap();
        let u = p.unitary();
        let explicit = &u * w.entries() * u.adjoint();
        assert!(linalg::max_abs_diff(&explicit, p.apply(&w).unwrap().entries()) < 1e-14);
        assert!(linalg::unitarity_residual(&u) < 1e-15);
    }

    proptest! {
        #[test]
        fn permutations_form_a_homomorphism(seed in any::<u64>(), n in 2usize..5) {
            use rand::seq::SliceRandom;
            let mut rng = linalg::seeded(seed);
            let mut s: Vec<usize> = (0..n).collect();
            let mut t: Vec<usize> = (0..n).collect();
            s.shuffle(&mut rng);
            t.shuffle(&mut rng);
            let st: Vec<usize> = t.iter().map(|&x| s[x]).collect();
            let us = trial_permutation(n, &s, &qubit()).unwrap().unitary();
            let ut = trial_permutation(n, &t, &qubit()).unwrap().unitary();
            let ust = trial_permutation(n, &st, &qubit()).unwrap().unitary();
            prop_assert!(linalg::max_abs_diff(&(us * ut), &ust) < 1e-15);
        }

        #[test]
        fn permutation_is_hs_isometry(seed in any::<u64>()) {
            let mut rng = linalg::seeded(seed);
            let a = on_trials(linalg::random_hermitian(8, &mut rng), 3);
            let b = on_trials(linalg::random_hermitian(8, &mut rng), 3);
            let p = trial_permutation(3, &[2, 0, 1], &qubit()).unwrap();
            let before = crate::tensor::hs_inner(&a, &b).unwrap();
            let after = crate::tensor::hs_inner(&p.apply(&a).unwrap(), &p.apply(&b).unwrap()).unwrap();
            prop_assert!((before - after).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetrize_examples() {
        let mut rng = linalg::seeded(3);
        let rho = linalg::random_density(2, &mut rng);
        let sigma = linalg::random_density(2, &mut rng);
        let rs = on_trials(rho.kronecker(&sigma), 2);
        let sym = symmetrize(&rs, 2).unwrap();
        let want = (rho.kronecker(&sigma) + sigma.kronecker(&rho)) * c(0.5, 0.);
        assert!(linalg::max_abs_diff(sym.entries(), &want) < 1e-15);
        assert!(symmetrize(&sym, 2).unwrap().max_abs_diff(&sym).unwrap() < 1e-15);
        assert!(symmetry_residual(&sym, 2).unwrap() < 1e-15);
        assert!(symmetry_residual(&rs, 2).unwrap() > 1e-3);
        let iid = on_trials(power(&rho, 3), 3);
        assert!(symmetry_residual(&iid, 3).unwrap() < 1e-15);
        assert!((symmetrize(&iid, 3).unwrap().trace() - 1.0).abs() < 1e-14);
        let big = on_trials(linalg::identity(256), 8);
        assert!(matches!(symmetrize(&big, 8), Err(Error::TooLarge(_))));
    }

    #[test]
    fn state_extendibility_examples() {
        let mut rng = linalg::seeded(4);
        let rho = linalg::random_density(2, &mut rng);
        let iid = mixture_seq(std::slice::from_ref(&rho), &[1.0], 3);
        assert!(state_extendibility_residual(&iid, 2).unwrap() < 1e-15);
        let p0 = basis_projector(2, 0);
        let p1 = basis_projector(2, 1);
        let mix = mixture_seq(&[p0.clone(), p1.clone()], &[0.5, 0.5], 3);
        assert!(state_extendibility_residual(&mix, 1).unwrap() < 1e-15);
        assert!(state_extendibility_residual(&mix, 2).unwrap() < 1e-15);
        // different weights for n = 1 and n = 2
        let mut bad = mixture_seq(&[p0.clone(), p1.clone()], &[0.5, 0.5], 1);
        bad.insert(2, on_trials((power(&p0, 2) + power(&p1, 2) * c(2., 0.)) * c(1. / 3., 0.), 2)).unwrap();
        assert!(state_extendibility_residual(&bad, 1).unwrap() > 0.1);
        assert!(matches!(state_extendibility_residual(&bad, 2), Err(Error::MissingElement(3))));
    }

    #[test]
    fn iid_process_mixture_is_extendible() {
        // single-site trials, mixture of two random processes rho ⊗ 1
        let trial = SpaceLayout::single_site("A", 2, 2);
        let mut rng = linalg::seeded(5);
        let atoms: Vec<CMatrix> =
            (0..2).map(|_| linalg::random_density(2, &mut rng).kronecker(&linalg::identity(2))).collect();
        let seq = TrialSequence::from_fn(trial.clone(), 3, |n| {
            let m = (power(&atoms[0], n) * c(0.3, 0.)) + power(&atoms[1], n) * c(0.7, 0.);
            HermOp::new(trial.repeat_trials(n).unwrap(), m)
        })
        .unwrap();
        assert!(process_extendibility_residual(&seq, 2, &[]).unwrap() < 1e-13);
        let probe = random_cptp(2, 2, 3);
        assert!(weak_extendibility_residual(&seq, 2, &probe).unwrap() < 1e-13);
        assert!(channel_extendibility_residual(&seq, 1, &[]).unwrap() < 1e-13);
        let id = build_standard_choi("A", &StandardMap::Identity { d: 2 }).unwrap();
        assert!(weak_extendibility_residual(&seq, 1, &id.scale(2.0)).is_err());
        let report = exchangeability_report(&seq, 1e-9).unwrap();
        assert_eq!(report.exchangeable_up_to, 3);
    }

    #[test]
    fn probe_states_span() {
        let states = default_probe_states(3);
        assert_eq!(states.len(), 9);
        let layout = SpaceLayout::state("q", 3);
        let cols: Vec<_> = states
            .iter()
            .map(|s| crate::tensor::coordinates(&HermOp::new(layout.clone(), s.clone()).unwrap()))
            .collect();
        let m = nalgebra::DMatrix::from_columns(&cols);
        assert_eq!(m.rank(1e-10), 9);
    }

    #[test]
    fn trial_span_counts() {
        let trial = SpaceLayout::sites(&[("A", 2, 2), ("B", 2, 2)]).unwrap();
        let span = trial_span(&trial).unwrap();
        assert_eq!(span.len(), 169);
    }
}
