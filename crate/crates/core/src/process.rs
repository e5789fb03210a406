//! Choi operators, instruments and process matrices.
//!
//! A map `M` from site input to site output is stored as
//! `[sum_jk |j><k| ⊗ M(|j><k|)]^T` on the factors `(input, output)`. With this
//! convention the probability of outcomes `a, b, ...` on a process `W` is
//! `tr[(M_a ⊗ M_b ⊗ ...) W]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, c};
use crate::tensor::{partial_trace, HermOp, Role, SiteRef, SpaceLayout};
use crate::{par, CMatrix, Error, Result, DEFAULT_ATOL};

/// Whether a Choi operator is only completely positive or also trace preserving.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Cp,
    Cptp,
}

/// Choi operator of a CP map on one or more sites.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMap {
    pub op: HermOp,
    pub kind: MapKind,
}

impl ChoiMap {
    /// Checks positivity, and trace preservation for [`MapKind::Cptp`].
    pub fn new(op: HermOp, kind: MapKind) -> Result<Self> {
        Self::with_atol(op, kind, DEFAULT_ATOL)
    }

    pub fn with_atol(op: HermOp, kind: MapKind, atol: f64) -> Result<Self> {
        let min = op.min_eigenvalue();
        if min < -atol {
            return Err(Error::NotCptp(format!("minimum eigenvalue {min:.3e}")));
        }
        let map = Self { op, kind };
        if kind == MapKind::Cptp {
            let r = map.tp_residual();
            if r > atol {
                return Err(Error::NotCptp(format!("trace-preservation residual {r:.3e}")));
            }
        }
        Ok(map)
    }

    pub(crate) fn from_parts(op: HermOp, kind: MapKind) -> Self {
        Self { op, kind }
    }

    pub fn layout(&self) -> &SpaceLayout {
        self.op.layout()
    }

    pub fn d_in(&self) -> usize {
        self.layout().input_dim()
    }

    pub fn d_out(&self) -> usize {
        self.layout().output_dim()
    }

    /// Reduced operator on the input factors, `tr_out M`.
    pub fn input_marginal(&self) -> HermOp {
        let inputs: Vec<String> =
            self.layout().factors().iter().filter(|f| f.role == Role::Input).map(|f| f.label.clone()).collect();
        partial_trace(&self.op, &inputs).expect("labels come from the layout")
    }

    /// `max |tr_out M - 1_in|`.
    pub fn tp_residual(&self) -> f64 {
        let m = self.input_marginal();
        linalg::max_abs_diff(m.entries(), &linalg::identity(m.dim()))
    }

    /// Same operator on the single-site layout `[site_I, site_O]`.
    pub fn on_site(&self, site: &str) -> ChoiMap {
        let layout = SpaceLayout::single_site(site, self.d_in(), self.d_out());
        let op = HermOp::from_parts(layout, self.op.entries().clone());
        ChoiMap { op, kind: self.kind }
    }

    pub fn scale(&self, s: f64) -> ChoiMap {
        ChoiMap { op: self.op.scale(s), kind: MapKind::Cp }
    }
}

/// Choi operator of an arbitrary linear map given by its action on `|j><k|`.
pub fn choi_of<F>(site: &str, d_in: usize, d_out: usize, map: F) -> HermOp
where
    F: Fn(&CMatrix) -> CMatrix,
{
    let mut m = CMatrix::zeros(d_in * d_out, d_in * d_out);
    for j in 0..d_in {
        for k in 0..d_in {
            let mut e = CMatrix::zeros(d_in, d_in);
            e[(j, k)] = c(1., 0.);
            let image = map(&e);
            m += e.kronecker(&image);
        }
    }
    HermOp::from_parts(SpaceLayout::single_site(site, d_in, d_out), m.transpose())
}

/// Parameters of the standard maps understood by [`build_standard_choi`].
#[derive(Clone, Debug)]
pub enum StandardMap {
    /// Identity channel on dimension `d`.
    Identity { d: usize },
    /// `X -> U X U†`.
    Unitary(CMatrix),
    /// `X -> tr(X) 1 / d_out`.
    Depolarizing { d_in: usize, d_out: usize },
    /// `X -> sum_a tr(E_a X) sigma_a`; `states` may be omitted when each
    /// `E_a` is followed by re-preparation of the same operator normalised.
    MeasurePrepare { povm: Vec<CMatrix>, states: Vec<CMatrix> },
    /// `X -> tr(X) rho`.
    TracePrepare { d_in: usize, state: CMatrix },
}

/// Choi operator of a standard channel on site `site`.
pub fn build_standard_choi(site: &str, map: &StandardMap) -> Result<ChoiMap> {
    let op = match map {
        StandardMap::Identity { d } => choi_of(site, *d, *d, |x| x.clone()),
        StandardMap::Unitary(u) => {
            let r = linalg::unitarity_residual(u);
            if r > DEFAULT_ATOL {
                return Err(Error::NonUnitary(r));
            }
            let d = u.nrows();
            choi_of(site, d, d, |x| u * x * u.adjoint())
        }
        StandardMap::Depolarizing { d_in, d_out } => {
            let d_out = *d_out;
            choi_of(site, *d_in, d_out, |x| linalg::identity(d_out) * (x.trace() / d_out as f64))
        }
        StandardMap::MeasurePrepare { povm, states } => {
            let first = povm.first().ok_or_else(|| Error::InvalidState("empty POVM".into()))?;
            if states.len() != povm.len() {
                return Err(Error::DimensionMismatch { expected: povm.len(), found: states.len() });
            }
            for s in states {
                linalg::check_density(s, DEFAULT_ATOL)?;
            }
            let d_in = first.nrows();
            let d_out = states[0].nrows();
            choi_of(site, d_in, d_out, |x| {
                povm.iter().zip(states).fold(CMatrix::zeros(d_out, d_out), |acc, (e, s)| acc + s * (e * x).trace())
            })
        }
        StandardMap::TracePrepare { d_in, state } => {
            linalg::check_density(state, DEFAULT_ATOL)?;
            choi_of(site, *d_in, state.nrows(), |x| state * x.trace())
        }
    };
    ChoiMap::new(op, MapKind::Cptp)
}

/// A collection of CP maps, one per outcome, on a common layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Instrument {
    pub outcomes: Vec<ChoiMap>,
}

impl Instrument {
    pub fn new(outcomes: Vec<ChoiMap>) -> Result<Self> {
        let first = outcomes.first().ok_or_else(|| Error::InvalidConfig("instrument without outcomes".into()))?;
        for m in &outcomes[1..] {
            if m.layout().dims() != first.layout().dims() {
                return Err(Error::SiteMismatch("instrument elements have different layouts".into()));
            }
        }
        Ok(Self { outcomes })
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Sum of all elements; CPTP for a valid instrument.
    pub fn total(&self) -> ChoiMap {
        let mut sum = self.outcomes[0].op.clone();
        for m in &self.outcomes[1..] {
            sum = sum.add(&m.op).expect("layouts checked at construction");
        }
        ChoiMap::from_parts(sum, MapKind::Cptp)
    }

    /// Measure in the computational basis, then prepare `|a><a|` (or the
    /// given output state per outcome).
    pub fn computational(site: &str, d: usize) -> Result<Self> {
        let states: Vec<CMatrix> = (0..d).map(|a| linalg::basis_projector(d, a)).collect();
        Self::measure_prepare(site, &states, &states)
    }

    /// One outcome per POVM element `E_a`, preparing `states[a]`.
    pub fn measure_prepare(site: &str, povm: &[CMatrix], states: &[CMatrix]) -> Result<Self> {
        if povm.len() != states.len() {
            return Err(Error::DimensionMismatch { expected: povm.len(), found: states.len() });
        }
        let outcomes = povm
            .iter()
            .zip(states)
            .map(|(e, s)| {
                linalg::check_density(s, DEFAULT_ATOL)?;
                let op = choi_of(site, e.nrows(), s.nrows(), |x| s * (e * x).trace());
                ChoiMap::new(op, MapKind::Cp)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(outcomes)
    }

    /// A deterministic instrument with one outcome.
    pub fn from_channel(map: ChoiMap) -> Self {
        Self { outcomes: vec![map] }
    }

    pub fn on_site(&self, site: &str) -> Instrument {
        Instrument { outcomes: self.outcomes.iter().map(|m| m.on_site(site)).collect() }
    }
}

/// Outcome of [`validate_instrument`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstrumentReport {
    pub min_eigenvalues: Vec<f64>,
    /// Trace norm of `tr_out(sum_a M_a) - 1_in`.
    pub tp_residual: f64,
    pub valid: bool,
}

pub fn validate_instrument(ins: &Instrument) -> Result<InstrumentReport> {
    validate_instrument_with(ins, DEFAULT_ATOL)
}

pub fn validate_instrument_with(ins: &Instrument, atol: f64) -> Result<InstrumentReport> {
    let ins = Instrument::new(ins.outcomes.clone())?;
    let min_eigenvalues: Vec<f64> = ins.outcomes.iter().map(|m| m.op.min_eigenvalue()).collect();
    let marginal = ins.total().input_marginal();
    let diff = marginal.entries() - linalg::identity(marginal.dim());
    let tp_residual = linalg::trace_norm(&diff);
    let valid = tp_residual <= atol && min_eigenvalues.iter().all(|&e| e >= -atol);
    Ok(InstrumentReport { min_eigenvalues, tp_residual, valid })
}

/// Operators whose affine hull is the set of Hermitian `M` on
/// `(d_in, d_out)` with `tr_out M = 1_in`.
///
/// The first element is `1 / d_out`; the others add `G_a ⊗ T_b` for an input
/// basis element `G_a` and a traceless output basis element `T_b`.
pub fn cptp_affine_span(d_in: usize, d_out: usize) -> Vec<HermOp> {
    let layout = SpaceLayout::single_site("S", d_in, d_out);
    let base = linalg::identity(d_in * d_out) * c(1.0 / d_out as f64, 0.);
    let gin = crate::tensor::ggm_basis(d_in);
    let gout = crate::tensor::ggm_basis(d_out);
    let mut out = vec![HermOp::from_parts(layout.clone(), base.clone())];
    for g in &gin {
        for t in &gout[1..] {
            out.push(HermOp::from_parts(layout.clone(), &base + g.kronecker(t)));
        }
    }
    out
}

/// How the normalisation condition was checked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SamplingMode {
    /// Every tuple of spanning elements.
    Exhaustive { tuples: usize },
    /// Random affine combinations of the spanning elements.
    Sampled { samples: usize, seed: u64 },
}

/// Residuals of the process-matrix conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub psd_residual: f64,
    pub trace_residual: f64,
    /// Max of `|tr[(⊗ R_j) W] - 1|` over the checked tuples of TP elements.
    pub normalization_residual: f64,
    pub sampling: SamplingMode,
    pub verdict: bool,
}

/// Options for [`validate_process_with`].
#[derive(Clone, Debug)]
pub struct ValidateOptions {
    pub atol: f64,
    /// Largest number of spanning tuples checked exhaustively.
    pub max_tuples: usize,
    /// Random affine combinations drawn beyond `max_tuples`.
    pub samples: usize,
    pub seed: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self { atol: DEFAULT_ATOL, max_tuples: 100_000, samples: 2_000, seed: 0 }
    }
}

pub fn validate_process(w: &HermOp, sites: &[SiteRef]) -> Result<ValidityReport> {
    validate_process_with(w, sites, &ValidateOptions::default())
}

/// Checks positivity, trace and the normalisation condition of `w` as a
/// process on `sites`. The sites must partition the factors of `w`.
pub fn validate_process_with(w: &HermOp, sites: &[SiteRef], opts: &ValidateOptions) -> Result<ValidityReport> {
    let layout = w.layout();
    let mut covered = vec![false; layout.len()];
    let mut site_labels = Vec::with_capacity(sites.len());
    let mut spans = Vec::with_capacity(sites.len());
    for s in sites {
        let (i, o) = layout.site_positions(s)?;
        for &p in i.iter().chain(&o) {
            if covered[p] {
                return Err(Error::SiteMismatch(format!("site {s} declared twice")));
            }
            covered[p] = true;
        }
        let (d_in, d_out) = layout.site_dims(s)?;
        site_labels.push(layout.site_labels(s)?);
        spans.push(cptp_affine_span(d_in, d_out).into_iter().map(HermOp::into_entries).collect::<Vec<_>>());
    }
    if let Some(p) = covered.iter().position(|&c| !c) {
        return Err(Error::SiteMismatch(format!("factor {} belongs to no declared site", layout.factors()[p].label)));
    }

    let d_out = layout.output_dim() as f64;
    let psd_residual = (-w.min_eigenvalue()).max(0.0);
    let trace_residual = (w.trace() - d_out).abs();

    let tuples = spans.iter().try_fold(1usize, |acc, s| acc.checked_mul(s.len()));
    let (normalization_residual, sampling) = match tuples {
        Some(t) if t <= opts.max_tuples => (exhaustive_residual(w, &site_labels, &spans)?, SamplingMode::Exhaustive { tuples: t }),
        _ => (
            sampled_residual(w, &site_labels, &spans, opts.samples, opts.seed)?,
            SamplingMode::Sampled { samples: opts.samples, seed: opts.seed },
        ),
    };
    let verdict = psd_residual <= opts.atol && trace_residual <= opts.atol && normalization_residual <= opts.atol;
    Ok(ValidityReport { psd_residual, trace_residual, normalization_residual, sampling, verdict })
}

fn exhaustive_residual(w: &HermOp, labels: &[Vec<String>], spans: &[Vec<CMatrix>]) -> Result<f64> {
    if spans.is_empty() {
        return Ok((w.trace() - 1.0).abs());
    }
    let first = par::map(&spans[0], |r| -> Result<f64> {
        let reduced = w.contract(&labels[0], r)?;
        contraction_tree(&reduced, &labels[1..], &spans[1..])
    });
    first.into_iter().try_fold(0.0f64, |acc, r| Ok(acc.max(r?)))
}

fn contraction_tree(w: &HermOp, labels: &[Vec<String>], spans: &[Vec<CMatrix>]) -> Result<f64> {
    if labels.is_empty() {
        return Ok((w.trace() - 1.0).abs());
    }
    let mut worst = 0.0f64;
    for r in &spans[0] {
        let reduced = w.contract(&labels[0], r)?;
        worst = worst.max(contraction_tree(&reduced, &labels[1..], &spans[1..])?);
    }
    Ok(worst)
}

fn sampled_residual(w: &HermOp, labels: &[Vec<String>], spans: &[Vec<CMatrix>], samples: usize, seed: u64) -> Result<f64> {
    let values = par::map_range(samples, |k| -> Result<f64> {
        let mut rng = linalg::seeded(seed.wrapping_add(k as u64));
        let mut reduced = w.clone();
        for (l, span) in labels.iter().zip(spans) {
            let r = random_affine_combination(span, &mut rng);
            reduced = reduced.contract(l, &r)?;
        }
        Ok((reduced.trace() - 1.0).abs())
    });
    values.into_iter().try_fold(0.0f64, |acc, r| Ok(acc.max(r?)))
}

fn random_affine_combination(span: &[CMatrix], rng: &mut linalg::SeededRng) -> CMatrix {
    let mut out = span[0].clone();
    for r in &span[1..] {
        let lambda: f64 = rng.random_range(-1.0..1.0);
        out += (r - &span[0]) * c(lambda, 0.);
    }
    out
}

/// A Hermitian operator together with the total output dimension of its sites.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessMatrix {
    pub op: HermOp,
    pub d_out: usize,
}

impl ProcessMatrix {
    /// Validates `op` on the sites of its layout.
    pub fn new(op: HermOp) -> Result<Self> {
        let sites = op.layout().site_refs();
        let report = validate_process(&op, &sites)?;
        if !report.verdict {
            return Err(Error::InvalidProcess(format!(
                "psd {:.3e}, trace {:.3e}, normalisation {:.3e}",
                report.psd_residual, report.trace_residual, report.normalization_residual
            )));
        }
        Ok(Self::unchecked(op))
    }

    /// Wraps `op` without checking the process conditions.
    pub fn unchecked(op: HermOp) -> Self {
        let d_out = op.layout().output_dim();
        Self { op, d_out }
    }

    pub fn layout(&self) -> &SpaceLayout {
        self.op.layout()
    }

    pub fn sites(&self) -> Vec<SiteRef> {
        self.op.layout().site_refs()
    }

    /// `W / d_out`, a unit-trace operator.
    pub fn normalized(&self) -> HermOp {
        self.op.scale(1.0 / self.d_out as f64)
    }
}

fn check_site_map(w: &HermOp, site: &SiteRef, map: &ChoiMap) -> Result<Vec<String>> {
    let dims = w.layout().site_dims(site)?;
    if dims != (map.d_in(), map.d_out()) {
        return Err(Error::SiteMismatch(format!(
            "site {site} has dims {:?}, map has ({}, {})",
            dims,
            map.d_in(),
            map.d_out()
        )));
    }
    w.layout().site_labels(site)
}

/// `tr[(⊗ M_j) W]` with one map per site, in the order of `w.sites()`.
pub fn born_probability(w: &ProcessMatrix, maps: &[&ChoiMap]) -> Result<f64> {
    let sites = w.sites();
    if sites.len() != maps.len() {
        return Err(Error::SiteMismatch(format!("{} sites but {} maps", sites.len(), maps.len())));
    }
    let mut reduced = w.op.clone();
    for (s, m) in sites.iter().zip(maps) {
        let labels = check_site_map(&reduced, s, m)?;
        reduced = reduced.contract(&labels, m.op.entries())?;
    }
    Ok(reduced.trace())
}

/// `tr_site[(M ⊗ 1) W]` for a CPTP map `M` on the removed site.
pub fn reduced_process(w: &ProcessMatrix, removed: &SiteRef, map: &ChoiMap) -> Result<HermOp> {
    let r = map.tp_residual();
    if r > DEFAULT_ATOL || map.op.min_eigenvalue() < -DEFAULT_ATOL {
        return Err(Error::NotCptp(format!("trace-preservation residual {r:.3e}")));
    }
    let labels = check_site_map(&w.op, removed, map)?;
    w.op.contract(&labels, map.op.entries())
}

/// Seeded random channel from a Haar-like isometry into `d_out ⊗ env`,
/// `env = d_in * d_out`, on the single-site layout `[M_I, M_O]`.
pub fn random_cptp(d_in: usize, d_out: usize, seed: u64) -> ChoiMap {
    let mut rng = linalg::seeded(seed);
    let env = d_in * d_out;
    let v = linalg::orthonormal_columns(linalg::ginibre(d_out * env, d_in, &mut rng));
    let op = choi_of("M", d_in, d_out, |x| {
        let full = &v * x * v.adjoint();
        CMatrix::from_fn(d_out, d_out, |i, j| (0..env).map(|e| full[(i * env + e, j * env + e)]).sum())
    });
    // remove rounding asymmetry
    let entries = (op.entries() + op.entries().adjoint()) * c(0.5, 0.);
    ChoiMap::from_parts(HermOp::from_parts(op.layout().clone(), entries), MapKind::Cptp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_projector, identity};
    use crate::tensor::{kron, trace_and_replace};

    fn ket_choi(d: usize) -> CMatrix {
        // Σ |jj><kk| written out entry by entry
        let mut m = CMatrix::zeros(d * d, d * d);
        for j in 0..d {
            for k in 0..d {
                m[(j * d + j, k * d + k)] = c(1., 0.);
            }
        }
        m
    }

    #[test]
    fn identity_choi() {
        let m = build_standard_choi("A", &StandardMap::Identity { d: 2 }).unwrap();
        assert_eq!(m.op.entries(), &ket_choi(2));
        assert!((m.op.trace() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn depolarizing_choi() {
        let m = build_standard_choi("A", &StandardMap::Depolarizing { d_in: 2, d_out: 2 }).unwrap();
        assert!(linalg::max_abs_diff(m.op.entries(), &(identity(4) * c(0.5, 0.))) < 1e-15);
    }

    #[test]
    fn trace_prepare_choi() {
        let rho = linalg::bloch_state(0.3, -0.2, 0.5);
        let m = build_standard_choi("A", &StandardMap::TracePrepare { d_in: 2, state: rho.clone() }).unwrap();
        let want = identity(2).kronecker(&rho.transpose());
        assert!(linalg::max_abs_diff(m.op.entries(), &want) < 1e-15);
        assert!(m.tp_residual() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        let not_unitary = identity(2) * c(2., 0.);
        assert!(matches!(build_standard_choi("A", &StandardMap::Unitary(not_unitary)), Err(Error::NonUnitary(_))));
        let bad = StandardMap::TracePrepare { d_in: 2, state: identity(2) };
        assert!(build_standard_choi("A", &bad).is_err());
    }

    #[test]
    fn instrument_reports() {
        let ins = Instrument::computational("A", 2).unwrap();
        let r = validate_instrument(&ins).unwrap();
        assert!(r.valid && r.tp_residual < 1e-15);
        let single = Instrument::from_channel(random_cptp(2, 3, 9));
        assert!(validate_instrument(&single).unwrap().tp_residual < 1e-12);
        let id = build_standard_choi("A", &StandardMap::Identity { d: 2 }).unwrap();
        let half = Instrument::new(vec![id.scale(0.5), id.scale(0.5)]).unwrap();
        assert!(validate_instrument(&half).unwrap().valid);
        let double = Instrument::new(vec![id.clone(), id]).unwrap();
        let r = validate_instrument(&double).unwrap();
        assert!(!r.valid && (r.tp_residual - 2.0).abs() < 1e-14);
    }

    #[test]
    fn span_examples() {
        let s = cptp_affine_span(1, 1);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].entries()[(0, 0)], c(1., 0.));
        let s = cptp_affine_span(2, 2);
        assert_eq!(s.len(), 13);
        for m in &s {
            let marginal = partial_trace(m, &["S_I"]).unwrap();
            assert!(linalg::max_abs_diff(marginal.entries(), &identity(2)) < 1e-15);
        }
    }

    #[test]
    fn span_covers_tp_hermitian_operators() {
        // least squares: M - base in the linear span of (element - base)
        let span = cptp_affine_span(2, 3);
        let mut rng = linalg::seeded(21);
        let layout = span[0].layout().clone();
        let h = HermOp::new(layout.clone(), linalg::random_hermitian(6, &mut rng)).unwrap();
        let m = trace_and_replace(&h, &["S_O"]).unwrap().scale(-1.0).add(&h).unwrap().add(&span[0]).unwrap();
        let target = crate::tensor::coordinates(&m.sub(&span[0]).unwrap());
        let cols: Vec<_> = span[1..].iter().map(|e| crate::tensor::coordinates(&e.sub(&span[0]).unwrap())).collect();
        let a = nalgebra::DMatrix::from_columns(&cols);
        let x = a.clone().svd(true, true).solve(&target, 1e-12).unwrap();
        assert!((a * x - target).amax() < 1e-9);
    }

    #[test]
    fn states_are_processes() {
        let mut rng = linalg::seeded(2);
        let rho = HermOp::new(SpaceLayout::single_site("A", 3, 1), linalg::random_density(3, &mut rng)).unwrap();
        let sites = rho.layout().site_refs();
        let r = validate_process(&rho, &sites).unwrap();
        assert!(r.verdict, "{r:?}");
        let r = validate_process(&rho.scale(2.0), &sites).unwrap();
        assert!(!r.verdict);
        assert!((r.trace_residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bipartite_product_process() {
        let mut rng = linalg::seeded(8);
        let layout = SpaceLayout::sites(&[("A", 2, 2), ("B", 2, 2)]).unwrap();
        // rho on A_I B_I and identity on outputs, permuted into reference order
        let rho = HermOp::new(
            SpaceLayout::new(vec![layout.factors()[0].clone(), layout.factors()[2].clone()]).unwrap(),
            linalg::random_density(4, &mut rng),
        )
        .unwrap();
        let outs = HermOp::identity(SpaceLayout::new(vec![layout.factors()[1].clone(), layout.factors()[3].clone()]).unwrap());
        let w = crate::tensor::permute_factors(&kron(&rho, &outs).unwrap(), &[0, 2, 1, 3]).unwrap();
        assert_eq!(w.layout(), &layout);
        let r = validate_process(&w, &layout.site_refs()).unwrap();
        assert!(r.verdict, "{r:?}");
        let r = validate_process(&w.scale(2.0), &layout.site_refs()).unwrap();
        assert!((r.trace_residual - 4.0).abs() < 1e-12 && !r.verdict);
    }

    #[test]
    fn sampled_mode_agrees_on_valid_process() {
        let layout = SpaceLayout::sites(&[("A", 2, 2), ("B", 2, 2)]).unwrap();
        let w = HermOp::identity(layout.clone()).scale(0.25);
        let opts = ValidateOptions { max_tuples: 10, samples: 50, ..Default::default() };
        let r = validate_process_with(&w, &layout.site_refs(), &opts).unwrap();
        assert!(matches!(r.sampling, SamplingMode::Sampled { samples: 50, .. }));
        assert!(r.verdict);
    }

    #[test]
    fn born_rule_on_state() {
        let w = ProcessMatrix::new(HermOp::new(SpaceLayout::single_site("A", 2, 1), basis_projector(2, 0)).unwrap()).unwrap();
        let m = ChoiMap::new(HermOp::new(SpaceLayout::single_site("A", 2, 1), basis_projector(2, 0)).unwrap(), MapKind::Cp).unwrap();
        assert!((born_probability(&w, &[&m]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_cptp_examples() {
        let prep = random_cptp(1, 3, 4);
        assert!(prep.tp_residual() < 1e-12 && (prep.op.trace() - 1.0).abs() < 1e-12);
        for seed in 0..20 {
            let m = random_cptp(2, 2, seed);
            assert!(m.tp_residual() < 1e-12);
            assert!(m.op.min_eigenvalue() > -1e-12);
        }
        let a = random_cptp(2, 2, 1);
        let b = random_cptp(2, 2, 2);
        assert!(a.op.max_abs_diff(&b.op).unwrap() > 1e-3);
        assert_eq!(a, random_cptp(2, 2, 1));
    }

    #[test]
    fn reduced_process_rejects_non_tp() {
        let w = ProcessMatrix::unchecked(HermOp::identity(SpaceLayout::single_site("A", 2, 2)).scale(0.5));
        let id = build_standard_choi("A", &StandardMap::Identity { d: 2 }).unwrap();
        assert!(matches!(reduced_process(&w, &SiteRef::new("A", 1), &id.scale(2.0)), Err(Error::NotCptp(_))));
    }
}
