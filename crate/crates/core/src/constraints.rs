//! No-signalling residuals, signalling strength, product expectation
//! constraints and their linearised forms.
//!
//! Equation residuals use the max-entry norm. Replacing a factor by the
//! identity always means [`trace_and_replace`], which keeps the trace.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::process::{cptp_affine_span, random_cptp, ChoiMap, ProcessMatrix, StandardMap};
use crate::tensor::{coordinates, partial_trace, trace_and_replace, HermOp, SiteRef, Space, SpaceLayout, SuperOp};
use crate::{par, CMatrix, Error, Result, DEFAULT_ATOL};

/// A family `{(L_y, q_y)}` entering `sum_y q_y L_y^{⊗n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFamily {
    pub maps: Vec<SuperOp>,
    pub weights: Vec<f64>,
}

impl LinearFamily {
    pub fn new(maps: Vec<SuperOp>, weights: Vec<f64>) -> Result<Self> {
        let family = Self { maps, weights };
        family.check()?;
        Ok(family)
    }

    pub fn single(map: SuperOp) -> Self {
        Self { maps: vec![map], weights: vec![1.0] }
    }

    fn check(&self) -> Result<()> {
        if self.maps.len() != self.weights.len() {
            return Err(Error::DimensionMismatch { expected: self.maps.len(), found: self.weights.len() });
        }
        if self.maps.is_empty() {
            return Err(Error::EmptyConstraintSet("linear family without maps".into()));
        }
        if let Some(&q) = self.weights.iter().find(|&&q| q.is_nan() || q <= 0.0) {
            return Err(Error::NonPositiveWeight(q));
        }
        Ok(())
    }
}

/// Constraint families understood by [`evaluate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ConstraintSpec {
    /// No signalling in either direction between the listed sites.
    TwoWayNs { sites: Vec<SiteRef> },
    /// No signalling from `from` to `to`.
    OneWayNs { from: SiteRef, to: SiteRef },
    /// Causal order: no site signals to any earlier one.
    Comb { order: Vec<SiteRef> },
    /// `tr[(⊗ R_j) rho] = prod r_j` for every tuple of `operators`.
    ProductExpectation { operators: Vec<HermOp>, values: Vec<f64> },
    /// `sum_y q_y L_y^{⊗n}(rho) = 0` for every family.
    DefinettiType { families: Vec<LinearFamily> },
}

impl ConstraintSpec {
    pub fn product_expectation(operators: Vec<HermOp>, values: Vec<f64>) -> Result<Self> {
        if operators.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: operators.len(), found: values.len() });
        }
        Ok(Self::ProductExpectation { operators, values })
    }

    pub fn definetti_type(families: Vec<LinearFamily>) -> Result<Self> {
        for f in &families {
            f.check()?;
        }
        Ok(Self::DefinettiType { families })
    }
}

/// One named residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub residuals: Vec<Residual>,
    pub max_residual: f64,
}

impl ResidualReport {
    fn from_pairs(pairs: Vec<(String, f64)>) -> Self {
        let max_residual = pairs.iter().map(|p| p.1).fold(0.0, f64::max);
        Self { residuals: pairs.into_iter().map(|(name, value)| Residual { name, value }).collect(), max_residual }
    }
}

fn output_labels(layout: &SpaceLayout, sites: &[SiteRef]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for s in sites {
        out.extend(layout.site_output_labels(s)?);
    }
    Ok(out)
}

fn labels_except(layout: &SpaceLayout, sites: &[SiteRef]) -> Result<Vec<String>> {
    let mut removed = Vec::new();
    for s in sites {
        removed.extend(layout.site_labels(s)?);
    }
    Ok(layout.labels().into_iter().filter(|l| !removed.contains(l)).collect())
}

fn max_diff(a: &HermOp, b: &HermOp) -> f64 {
    linalg::max_abs_diff(a.entries(), b.entries())
}

/// `max |w - trace_and_replace(w, outputs of sites)|`.
pub fn ns_twoway_residual(w: &HermOp, sites: &[SiteRef]) -> Result<f64> {
    let outs = output_labels(w.layout(), sites)?;
    Ok(max_diff(w, &trace_and_replace(w, &outs)?))
}

/// Residuals of the two one-way conditions for no signalling from `from`
/// to `to`: `w` ignores the output of `from`, and the reduced operator
/// without `from` ignores the output of `to`.
pub fn ns_oneway_residuals(w: &HermOp, from: &SiteRef, to: &SiteRef) -> Result<[f64; 2]> {
    let layout = w.layout();
    layout.site_positions(to)?;
    let from_out = layout.site_output_labels(from)?;
    let first = max_diff(w, &trace_and_replace(w, &from_out)?);
    let reduced = partial_trace(w, &labels_except(layout, std::slice::from_ref(from))?)?;
    let to_out = reduced.layout().site_output_labels(to)?;
    let second = max_diff(&reduced, &trace_and_replace(&reduced, &to_out)?);
    Ok([first, second])
}

pub fn ns_oneway_residual(w: &HermOp, from: &SiteRef, to: &SiteRef) -> Result<f64> {
    let [a, b] = ns_oneway_residuals(w, from, to)?;
    Ok(a.max(b))
}

/// Per-level residuals of the comb conditions: for each `k`, the operator
/// reduced to the first `k` sites of `order` must ignore the output of site `k`.
pub fn comb_residuals(w: &HermOp, order: &[SiteRef]) -> Result<Vec<f64>> {
    let layout = w.layout();
    let mut all = order.to_vec();
    all.sort();
    all.dedup();
    let mut present = layout.site_refs();
    present.sort();
    if all != present || all.len() != order.len() {
        return Err(Error::SiteMismatch("comb order must list every site exactly once".into()));
    }
    let mut out = vec![0.0; order.len()];
    let mut current = w.clone();
    for k in (0..order.len()).rev() {
        let outs = current.layout().site_output_labels(&order[k])?;
        out[k] = max_diff(&current, &trace_and_replace(&current, &outs)?);
        if k > 0 {
            let kept = labels_except(current.layout(), std::slice::from_ref(&order[k]))?;
            current = partial_trace(&current, &kept)?;
        }
    }
    Ok(out)
}

pub fn comb_residual(w: &HermOp, order: &[SiteRef]) -> Result<f64> {
    Ok(comb_residuals(w, order)?.into_iter().fold(0.0, f64::max))
}

/// Input labels then output labels of a set of sites, with joint dims.
fn joint_site_labels(layout: &SpaceLayout, sites: &[SiteRef]) -> Result<(Vec<String>, usize, usize)> {
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    for s in sites {
        let (i, o) = layout.site_positions(s)?;
        ins.extend(i);
        outs.extend(o);
    }
    ins.sort_unstable();
    outs.sort_unstable();
    let d = |ps: &[usize]| ps.iter().map(|&p| layout.factors()[p].dim).product::<usize>();
    let (d_in, d_out) = (d(&ins), d(&outs));
    let labels = ins.iter().chain(&outs).map(|&p| layout.factors()[p].label.clone()).collect();
    Ok((labels, d_in, d_out))
}

/// Default probe family on a system `(d_in, d_out)`: trace and prepare each
/// computational basis state, plus 20 seeded random channels.
pub fn default_probes(d_in: usize, d_out: usize, seed: u64) -> Vec<ChoiMap> {
    let mut probes: Vec<ChoiMap> = (0..d_out)
        .map(|k| {
            crate::process::build_standard_choi(
                "M",
                &StandardMap::TracePrepare { d_in, state: linalg::basis_projector(d_out, k) },
            )
            .expect("basis states are valid")
        })
        .collect();
    probes.extend((0..20).map(|i| random_cptp(d_in, d_out, seed.wrapping_add(i))));
    probes
}

/// Largest change of the normalised reduced process on `to` caused by
/// swapping one probe on `from` for another, measured as half the trace
/// distance. Sites outside both sets receive the completely depolarising
/// channel. Probes act jointly on all sites of `from`; pass an empty slice
/// for [`default_probes`].
pub fn signalling_strength(w: &ProcessMatrix, from: &[SiteRef], to: &[SiteRef], probes: &[ChoiMap]) -> Result<f64> {
    if from.iter().any(|s| to.contains(s)) {
        return Err(Error::SiteMismatch("signalling sets overlap".into()));
    }
    let layout = w.layout();
    for s in to {
        layout.site_positions(s)?;
    }
    let rest: Vec<SiteRef> = layout.site_refs().into_iter().filter(|s| !from.contains(s) && !to.contains(s)).collect();
    let mut base = w.op.clone();
    if !rest.is_empty() {
        let (_, _, d_out) = joint_site_labels(layout, &rest)?;
        let kept = labels_except(layout, &rest)?;
        base = partial_trace(&base, &kept)?.scale(1.0 / d_out as f64);
    }
    let (labels, d_in, d_out) = joint_site_labels(base.layout(), from)?;
    let defaults;
    let probes = if probes.is_empty() {
        defaults = default_probes(d_in, d_out, 0);
        &defaults[..]
    } else {
        probes
    };
    for p in probes {
        if (p.d_in(), p.d_out()) != (d_in, d_out) {
            return Err(Error::SiteMismatch(format!("probe dims ({}, {}) != ({d_in}, {d_out})", p.d_in(), p.d_out())));
        }
    }
    let reduced: Vec<CMatrix> = par::map(probes, |p| -> Result<CMatrix> {
        let r = base.contract(&labels, p.op.entries())?;
        Ok(r.normalized().into_entries())
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> =
        (0..reduced.len()).flat_map(|i| (i + 1..reduced.len()).map(move |j| (i, j))).collect();
    let distances = par::map(&pairs, |&(i, j)| 0.5 * linalg::trace_norm(&(&reduced[i] - &reduced[j])));
    Ok(distances.into_iter().fold(0.0, f64::max))
}

/// Label groups of the trials `1..=n` of `rho`, checking trial dims.
fn trial_groups(rho: &HermOp, n: usize, trial_dim: usize) -> Result<Vec<Vec<String>>> {
    let layout = rho.layout();
    let trials = layout.trials();
    if trials.len() != n {
        return Err(Error::TrialMismatch(format!("operator has {} trials, expected {n}", trials.len())));
    }
    trials
        .iter()
        .map(|&t| {
            let ps = layout.trial_positions(t);
            let d: usize = ps.iter().map(|&p| layout.factors()[p].dim).product();
            if d != trial_dim {
                return Err(Error::TrialMismatch(format!("trial {t} has dimension {d}, expected {trial_dim}")));
            }
            Ok(ps.iter().map(|&p| layout.factors()[p].label.clone()).collect())
        })
        .collect()
}

/// Max over all tuples `(j_1..j_n)` of `|tr[(⊗ ops_{j_t}) rho] - prod targets_{j_t}|`.
fn tuple_residual(rho: &HermOp, groups: &[Vec<String>], ops: &[CMatrix], targets: &[f64]) -> Result<f64> {
    fn walk(rho: &HermOp, groups: &[Vec<String>], ops: &[CMatrix], targets: &[f64], acc: f64) -> Result<f64> {
        if groups.is_empty() {
            return Ok((rho.trace() - acc).abs());
        }
        let mut worst = 0.0f64;
        for (r, &t) in ops.iter().zip(targets) {
            let reduced = rho.contract(&groups[0], r)?;
            worst = worst.max(walk(&reduced, &groups[1..], ops, targets, acc * t)?);
        }
        Ok(worst)
    }
    if groups.is_empty() {
        return Ok((rho.trace() - 1.0).abs());
    }
    let top = par::map_range(ops.len(), |j| -> Result<f64> {
        let reduced = rho.contract(&groups[0], &ops[j])?;
        walk(&reduced, &groups[1..], ops, targets, targets[j])
    });
    top.into_iter().try_fold(0.0f64, |acc, r| Ok(acc.max(r?)))
}

fn product_parts(spec: &ConstraintSpec) -> Result<(&[HermOp], &[f64])> {
    match spec {
        ConstraintSpec::ProductExpectation { operators, values } => {
            if operators.len() != values.len() {
                return Err(Error::DimensionMismatch { expected: operators.len(), found: values.len() });
            }
            if operators.is_empty() {
                return Err(Error::EmptyConstraintSet("product expectation without operators".into()));
            }
            Ok((operators, values))
        }
        _ => Err(Error::InvalidConfig("expected a product_expectation constraint".into())),
    }
}

/// Max over tuples of the product expectation residual on `n` trials.
pub fn product_expectation_residual(rho_n: &HermOp, spec: &ConstraintSpec, n: usize) -> Result<f64> {
    let (ops, values) = product_parts(spec)?;
    let groups = trial_groups(rho_n, n, ops[0].dim())?;
    let mats: Vec<CMatrix> = ops.iter().map(|r| r.entries().clone()).collect();
    tuple_residual(rho_n, &groups, &mats, values)
}

/// `sigma_j = R_j - r_j 1`.
pub fn center_constraints(spec: &ConstraintSpec) -> Result<Vec<HermOp>> {
    let (ops, values) = product_parts(spec)?;
    Ok(ops
        .iter()
        .zip(values)
        .map(|(r, &v)| r.sub(&HermOp::identity(r.layout().clone()).scale(v)).expect("same layout"))
        .collect())
}

/// Both formulations of a product expectation constraint on `rho^(1..N)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    /// Residual of the product form for each `n`.
    pub product: Vec<f64>,
    /// Residual of the centred form for each `n`.
    pub centered: Vec<f64>,
    pub product_verdict: bool,
    pub centered_verdict: bool,
    pub agree: bool,
}

/// Evaluates the product and centred forms on `rho_seq[n-1] = rho^(n)`.
pub fn lemma1_check(rho_seq: &[HermOp], spec: &ConstraintSpec, threshold: f64) -> Result<Lemma1Report> {
    let (ops, _) = product_parts(spec)?;
    let sigmas: Vec<CMatrix> = center_constraints(spec)?.into_iter().map(HermOp::into_entries).collect();
    let zeros = vec![0.0; sigmas.len()];
    let mut product = Vec::with_capacity(rho_seq.len());
    let mut centered = Vec::with_capacity(rho_seq.len());
    for (k, rho) in rho_seq.iter().enumerate() {
        product.push(product_expectation_residual(rho, spec, k + 1)?);
        let groups = trial_groups(rho, k + 1, ops[0].dim())?;
        centered.push(tuple_residual_zero(rho, &groups, &sigmas, &zeros)?);
    }
    let product_verdict = product.iter().all(|&r| r <= threshold);
    let centered_verdict = centered.iter().all(|&r| r <= threshold);
    Ok(Lemma1Report { product, centered, product_verdict, centered_verdict, agree: product_verdict == centered_verdict })
}

fn tuple_residual_zero(rho: &HermOp, groups: &[Vec<String>], ops: &[CMatrix], zeros: &[f64]) -> Result<f64> {
    // targets multiply to zero for n >= 1
    tuple_residual(rho, groups, ops, zeros)
}

/// Aggregate and individual kernel residuals of a finite family of maps.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma2Report {
    /// Coordinates of `sum_y q_y L_y^T L_y (v)`.
    pub aggregate: DVector<f64>,
    pub aggregate_norm: f64,
    /// `||L_y(v)||` for each `y`.
    pub individual: Vec<f64>,
}

pub fn lemma2_aggregate(maps: &[SuperOp], weights: &[f64], v: &HermOp) -> Result<Lemma2Report> {
    LinearFamily::new(maps.to_vec(), weights.to_vec())?;
    let x = coordinates(v);
    let mut aggregate = DVector::zeros(x.len());
    let mut individual = Vec::with_capacity(maps.len());
    for (l, &q) in maps.iter().zip(weights) {
        let lx = l.apply_coords(&x)?;
        individual.push(lx.norm());
        aggregate += l.matrix.tr_mul(&lx) * q;
    }
    let aggregate_norm = aggregate.norm();
    Ok(Lemma2Report { aggregate, aggregate_norm, individual })
}

/// Max over families of `||sum_y q_y L_y^{⊗n}(rho^(n))||` (Euclidean norm of
/// coordinates, the Hilbert-Schmidt norm for operator codomains).
pub fn definetti_type_residual(rho_n: &HermOp, spec: &ConstraintSpec, n: usize) -> Result<f64> {
    let families = match spec {
        ConstraintSpec::DefinettiType { families } => families,
        _ => return Err(Error::InvalidConfig("expected a definetti_type constraint".into())),
    };
    let (coords, per_trial) = crate::tensor::trial_coordinates(rho_n)?;
    if rho_n.layout().trial_count() != n {
        return Err(Error::TrialMismatch(format!("operator has {} trials, expected {n}", rho_n.layout().trial_count())));
    }
    let mut worst = 0.0f64;
    for family in families {
        family.check()?;
        let mut total: Option<Vec<f64>> = None;
        for (l, &q) in family.maps.iter().zip(&family.weights) {
            if l.domain.dim() != per_trial {
                return Err(Error::DimensionMismatch { expected: per_trial, found: l.domain.dim() });
            }
            let out = l.apply_tensor_power(coords.as_slice(), n)?;
            match &mut total {
                None => total = Some(out.into_iter().map(|x| q * x).collect()),
                Some(t) => t.iter_mut().zip(out).for_each(|(a, b)| *a += q * b),
            }
        }
        let norm = total.unwrap_or_default().iter().map(|x| x * x).sum::<f64>().sqrt();
        worst = worst.max(norm);
    }
    Ok(worst)
}

/// Evaluates every residual of `spec` on `w`. Product expectation and
/// de Finetti-type constraints use the trial count of `w` as `n`.
pub fn evaluate(w: &HermOp, spec: &ConstraintSpec) -> Result<ResidualReport> {
    let pairs = match spec {
        ConstraintSpec::TwoWayNs { sites } => vec![("two_way_ns".to_string(), ns_twoway_residual(w, sites)?)],
        ConstraintSpec::OneWayNs { from, to } => {
            let [a, b] = ns_oneway_residuals(w, from, to)?;
            vec![(format!("one_way_ns[{from}->{to}].outputs"), a), (format!("one_way_ns[{from}->{to}].reduced"), b)]
        }
        ConstraintSpec::Comb { order } => comb_residuals(w, order)?
            .into_iter()
            .zip(order)
            .map(|(r, s)| (format!("comb[{s}]"), r))
            .collect(),
        ConstraintSpec::ProductExpectation { .. } => {
            let n = w.layout().trial_count();
            vec![("product_expectation".to_string(), product_expectation_residual(w, spec, n)?)]
        }
        ConstraintSpec::DefinettiType { .. } => {
            let n = w.layout().trial_count();
            vec![("definetti_type".to_string(), definetti_type_residual(w, spec, n)?)]
        }
    };
    Ok(ResidualReport::from_pairs(pairs))
}

/// Single-trial linear maps whose joint kernel is the constraint subspace.
///
/// No-signalling constraints map to `I - P` (two-way) or stacked residual
/// maps (one-way, comb). A product expectation constraint maps to the
/// functionals `x -> tr((R - r 1) x)`, which encode `tr(R x) = r` for unit
/// trace `x`. A de Finetti-type constraint returns its maps as given.
pub fn to_superops(spec: &ConstraintSpec, layout: &SpaceLayout) -> Result<Vec<SuperOp>> {
    match spec {
        ConstraintSpec::TwoWayNs { sites } => {
            let outs = output_labels(layout, sites)?;
            Ok(vec![SuperOp::trace_and_replace_map(layout, &outs)?.complement()?])
        }
        ConstraintSpec::OneWayNs { from, to } => {
            let (from, to) = (from.clone(), to.clone());
            let map = SuperOp::from_linear_map(layout, Space::Coordinates(2 * layout.total_dim().pow(2)), move |x| {
                oneway_vector(x, &from, &to)
            })?;
            Ok(vec![map])
        }
        ConstraintSpec::Comb { order } => {
            let order = order.clone();
            let k = order.len();
            let map = SuperOp::from_linear_map(layout, Space::Coordinates(k * layout.total_dim().pow(2)), move |x| {
                comb_vector(x, &order)
            })?;
            Ok(vec![map])
        }
        ConstraintSpec::ProductExpectation { .. } => Ok(center_constraints(spec)?
            .iter()
            .map(|s| SuperOp::expectation(&HermOp::from_parts(layout.clone(), s.entries().clone())))
            .collect()),
        ConstraintSpec::DefinettiType { families } => Ok(families.iter().flat_map(|f| f.maps.iter().cloned()).collect()),
    }
}

/// Residual operators of the one-way conditions as a padded coordinate vector.
fn oneway_vector(x: &HermOp, from: &SiteRef, to: &SiteRef) -> Result<DVector<f64>> {
    let n2 = x.dim() * x.dim();
    let mut out = DVector::zeros(2 * n2);
    let from_out = x.layout().site_output_labels(from)?;
    let first = x.sub(&trace_and_replace(x, &from_out)?)?;
    out.rows_mut(0, n2).copy_from(&coordinates(&first));
    let reduced = partial_trace(x, &labels_except(x.layout(), std::slice::from_ref(from))?)?;
    let to_out = reduced.layout().site_output_labels(to)?;
    let second = coordinates(&reduced.sub(&trace_and_replace(&reduced, &to_out)?)?);
    out.rows_mut(n2, second.len()).copy_from(&second);
    Ok(out)
}

fn comb_vector(x: &HermOp, order: &[SiteRef]) -> Result<DVector<f64>> {
    let n2 = x.dim() * x.dim();
    let mut out = DVector::zeros(order.len() * n2);
    let mut current = x.clone();
    for k in (0..order.len()).rev() {
        let outs = current.layout().site_output_labels(&order[k])?;
        let r = coordinates(&current.sub(&trace_and_replace(&current, &outs)?)?);
        out.rows_mut(k * n2, r.len()).copy_from(&r);
        if k > 0 {
            let kept = labels_except(current.layout(), std::slice::from_ref(&order[k]))?;
            current = partial_trace(&current, &kept)?;
        }
    }
    Ok(out)
}

/// Normalisation of a renormalised single-trial process `W / d_out` as a
/// product expectation constraint: `tr[(d_out ⊗_j R_j) x] = 1` for every
/// tuple of per-site spanning channels.
pub fn process_normalization_spec(layout: &SpaceLayout) -> Result<ConstraintSpec> {
    let sites = layout.site_refs();
    let d_out = layout.output_dim() as f64;
    // product elements over sites, placed on the joint (inputs, outputs) order of each site
    let mut tuples: Vec<CMatrix> = vec![CMatrix::identity(1, 1)];
    let mut labels: Vec<String> = Vec::new();
    for s in &sites {
        let (d_in, d_o) = layout.site_dims(s)?;
        let span = cptp_affine_span(d_in, d_o);
        tuples = tuples.iter().flat_map(|t| span.iter().map(move |r| t.kronecker(r.entries()))).collect();
        labels.extend(layout.site_labels(s)?);
    }
    // permute each element from site-grouped order into layout order
    let grouped = SpaceLayout::unchecked(
        labels.iter().map(|l| layout.factors()[layout.position(l).expect("label")].clone()).collect(),
    )?;
    let perm: Vec<usize> = labels.iter().map(|l| layout.position(l).expect("label")).collect();
    let operators = tuples
        .into_iter()
        .map(|t| {
            let op = HermOp::from_parts(grouped.clone(), t * linalg::c(d_out, 0.));
            crate::tensor::permute_factors(&op, &perm).map(|p| HermOp::from_parts(layout.clone(), p.into_entries()))
        })
        .collect::<Result<Vec<_>>>()?;
    let values = vec![1.0; operators.len()];
    Ok(ConstraintSpec::ProductExpectation { operators, values })
}

/// Checks that the residual `r` of a single-trial constraint is within `atol`.
pub fn satisfies(w: &HermOp, spec: &ConstraintSpec, atol: f64) -> Result<bool> {
    Ok(evaluate(w, spec)?.max_residual <= atol)
}

/// [`DEFAULT_ATOL`] variant of [`satisfies`].
pub fn satisfies_default(w: &HermOp, spec: &ConstraintSpec) -> Result<bool> {
    satisfies(w, spec, DEFAULT_ATOL)
}
