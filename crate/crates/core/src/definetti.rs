//! Finite mixtures of i.i.d. powers, constrained dictionaries and
//! nonnegative mixture fitting.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::constraints::{self, ConstraintSpec};
use crate::linalg::{self, c};
use crate::tensor::{coordinates, from_coordinates, HermOp, SpaceLayout};
use crate::{par, CMatrix, Error, Result, DEFAULT_ATOL};

/// Unit-trace positive single-trial operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Dictionary {
    atoms: Vec<HermOp>,
    /// Per-atom residuals against the constraint the dictionary was built for.
    pub constraint_tags: Vec<Vec<f64>>,
}

impl Dictionary {
    pub fn new(atoms: Vec<HermOp>) -> Result<Self> {
        Self::with_atol(atoms, DEFAULT_ATOL)
    }

    pub fn with_atol(atoms: Vec<HermOp>, atol: f64) -> Result<Self> {
        let first = atoms.first().ok_or_else(|| Error::InvalidConfig("empty dictionary".into()))?;
        let dims = first.layout().dims();
        for (k, a) in atoms.iter().enumerate() {
            if a.layout().dims() != dims {
                return Err(Error::DimensionMismatch { expected: first.dim(), found: a.dim() });
            }
            if (a.trace() - 1.0).abs() > atol {
                return Err(Error::InvalidState(format!("atom {k} has trace {}", a.trace())));
            }
            if a.min_eigenvalue() < -atol {
                return Err(Error::InvalidState(format!("atom {k} is not positive")));
            }
        }
        let layout = first.layout().clone();
        let atoms = atoms.into_iter().map(|a| a.with_layout(layout.clone())).collect::<Result<_>>()?;
        Ok(Self { atoms, constraint_tags: Vec::new() })
    }

    pub fn atoms(&self) -> &[HermOp] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn layout(&self) -> &SpaceLayout {
        self.atoms[0].layout()
    }

    /// Records the residuals of every atom against `spec`.
    pub fn tag(mut self, spec: &ConstraintSpec) -> Result<Self> {
        self.constraint_tags = self.atoms.iter().map(|a| single_trial_residuals(a, spec)).collect::<Result<_>>()?;
        Ok(self)
    }

    /// Concatenates two dictionaries on the same layout.
    pub fn extend(mut self, other: &Dictionary) -> Result<Self> {
        if other.layout().dims() != self.layout().dims() {
            return Err(Error::DimensionMismatch { expected: self.atoms[0].dim(), found: other.atoms[0].dim() });
        }
        let layout = self.layout().clone();
        for a in &other.atoms {
            self.atoms.push(a.with_layout(layout.clone())?);
        }
        self.constraint_tags.clear();
        Ok(self)
    }
}

/// Probability weights over a dictionary.
#[derive(Clone, Debug, PartialEq)]
pub struct Mixture {
    pub dictionary: Dictionary,
    pub weights: Vec<f64>,
}

impl Mixture {
    pub fn new(dictionary: Dictionary, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != dictionary.len() {
            return Err(Error::DimensionMismatch { expected: dictionary.len(), found: weights.len() });
        }
        if let Some(&w) = weights.iter().find(|&&w| w < -DEFAULT_ATOL || !w.is_finite()) {
            return Err(Error::InvalidConfig(format!("negative weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > DEFAULT_ATOL {
            return Err(Error::InvalidConfig(format!("weights sum to {total}")));
        }
        Ok(Self { dictionary, weights })
    }

    /// Equal weights over the given atoms.
    pub fn uniform(atoms: Vec<HermOp>) -> Result<Self> {
        let n = atoms.len();
        Self::new(Dictionary::new(atoms)?, vec![1.0 / n as f64; n])
    }
}

#[derive(Serialize, Deserialize)]
struct MixtureJson {
    weights: Vec<f64>,
    atoms: Vec<HermOp>,
}

impl Serialize for Mixture {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MixtureJson { weights: self.weights.clone(), atoms: self.dictionary.atoms.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mixture {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let json = MixtureJson::deserialize(d)?;
        Dictionary::new(json.atoms).and_then(|dict| Mixture::new(dict, json.weights)).map_err(D::Error::custom)
    }
}

/// Residuals of one single-trial operator against `spec`. De Finetti-type
/// families report `||L_y(x)||` for every map.
pub fn single_trial_residuals(x: &HermOp, spec: &ConstraintSpec) -> Result<Vec<f64>> {
    match spec {
        ConstraintSpec::DefinettiType { families } => families
            .iter()
            .flat_map(|f| f.maps.iter())
            .map(|l| Ok(l.apply(x)?.norm()))
            .collect(),
        _ => Ok(constraints::evaluate(x, spec)?.residuals.into_iter().map(|r| r.value).collect()),
    }
}

/// Qubit states on a Fibonacci sphere at Bloch radii 1, 0.5 and 0: about
/// half the atoms pure, the rest on the inner shell, plus the centre.
pub fn bloch_grid(layout: &SpaceLayout, count: usize) -> Result<Dictionary> {
    if layout.total_dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: layout.total_dim() });
    }
    if count == 0 {
        return Err(Error::InvalidConfig("empty grid".into()));
    }
    let outer = count / 2;
    let inner = count - outer - 1;
    let mut atoms = vec![HermOp::new(layout.clone(), linalg::identity(2) * c(0.5, 0.))?];
    for (radius, points) in [(1.0, outer), (0.5, inner)] {
        for [x, y, z] in fibonacci_sphere(points) {
            atoms.push(HermOp::new(layout.clone(), linalg::bloch_state(radius * x, radius * y, radius * z))?);
        }
    }
    Dictionary::new(atoms)
}

/// `n` points on the unit sphere, poles included.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = if n == 1 { 1.0 } else { 1.0 - 2.0 * i as f64 / (n - 1) as f64 };
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Affine constraint set `{x : A x = 0, tr x = 1}` in coordinates.
struct AffineSubspace {
    /// Orthonormal basis of the constraint row space (columns).
    rows: DMatrix<f64>,
    /// Minimum-norm point of the subspace.
    offset: DVector<f64>,
}

impl AffineSubspace {
    fn new(layout: &SpaceLayout, maps: &[crate::tensor::SuperOp]) -> Result<Self> {
        let dim = layout.total_dim().pow(2);
        let trace_row = coordinates(&HermOp::identity(layout.clone()));
        let total_rows: usize = maps.iter().map(|m| m.matrix.nrows()).sum::<usize>() + 1;
        let mut m = DMatrix::zeros(total_rows, dim);
        let mut r0 = 0;
        for l in maps {
            m.rows_mut(r0, l.matrix.nrows()).copy_from(&l.matrix);
            r0 += l.matrix.nrows();
        }
        m.row_mut(r0).copy_from(&trace_row.transpose());
        let mut b = DVector::zeros(total_rows);
        b[r0] = 1.0;

        let svd = m.clone().svd(true, true);
        let v_t = svd.v_t.as_ref().expect("requested");
        let smax = svd.singular_values.max();
        let tol = 1e-10 * smax.max(1.0);
        let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > tol).collect();
        let rows = DMatrix::from_fn(dim, keep.len(), |i, j| v_t[(keep[j], i)]);
        let offset = svd.solve(&b, tol).map_err(|e| Error::EmptyConstraintSet(e.to_string()))?;
        if (&m * &offset - &b).amax() > 1e-8 {
            return Err(Error::EmptyConstraintSet("constraints are inconsistent with unit trace".into()));
        }
        Ok(Self { rows, offset })
    }

    fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        x - &self.rows * (self.rows.transpose() * x) + &self.offset
    }
}

/// Seeded dictionary of `count` single-trial atoms satisfying `spec`.
///
/// Random states are projected onto the affine constraint subspace (unit
/// trace, plus process normalisation when the trial has outputs) and mixed
/// towards the projection of the maximally mixed state until positive.
/// Candidates that still violate a constraint by more than `DEFAULT_ATOL`
/// are rejected.
pub fn sample_dictionary(trial_layout: &SpaceLayout, spec: Option<&ConstraintSpec>, count: usize, seed: u64) -> Result<Dictionary> {
    if count == 0 {
        return Err(Error::InvalidConfig("count must be at least 1".into()));
    }
    let mut maps = Vec::new();
    if let Some(s) = spec {
        maps.extend(constraints::to_superops(s, trial_layout)?);
    }
    let normalization = if trial_layout.output_dim() > 1 {
        let s = constraints::process_normalization_spec(trial_layout)?;
        maps.extend(constraints::to_superops(&s, trial_layout)?);
        Some(s)
    } else {
        None
    };
    let subspace = AffineSubspace::new(trial_layout, &maps)?;
    let d = trial_layout.total_dim();
    let centre = subspace.project(&coordinates(&HermOp::identity(trial_layout.clone()).scale(1.0 / d as f64)));
    let centre_op = from_coordinates(trial_layout, centre.as_slice())?;
    if centre_op.min_eigenvalue() < -DEFAULT_ATOL {
        return Err(Error::EmptyConstraintSet("no positive operator satisfies the constraints".into()));
    }

    let mut rng = linalg::seeded(seed);
    let mut atoms = Vec::with_capacity(count);
    let mut attempts = 0;
    while atoms.len() < count {
        attempts += 1;
        if attempts > 100 * count + 100 {
            return Err(Error::EmptyConstraintSet("too many rejected samples".into()));
        }
        let raw = HermOp::from_parts(trial_layout.clone(), linalg::random_density(d, &mut rng));
        let projected = subspace.project(&coordinates(&raw));
        let candidate = mix_to_positive(trial_layout, &projected, &centre)?;
        let ok_spec = match spec {
            Some(s) => single_trial_residuals(&candidate, s)?.iter().all(|&r| r <= DEFAULT_ATOL),
            None => true,
        };
        let ok_norm = match &normalization {
            Some(s) => constraints::evaluate(&candidate, s)?.max_residual <= DEFAULT_ATOL,
            None => true,
        };
        let ok_state = candidate.min_eigenvalue() >= -DEFAULT_ATOL && (candidate.trace() - 1.0).abs() <= DEFAULT_ATOL;
        if ok_spec && ok_norm && ok_state {
            atoms.push(candidate);
        }
    }
    let dict = Dictionary::new(atoms)?;
    match spec {
        Some(s) => dict.tag(s),
        None => Ok(dict),
    }
}

/// Smallest mix `(1 - t) x + t centre` with nonnegative spectrum, by bisection.
fn mix_to_positive(layout: &SpaceLayout, x: &DVector<f64>, centre: &DVector<f64>) -> Result<HermOp> {
    let at = |t: f64| from_coordinates(layout, (x * (1.0 - t) + centre * t).as_slice());
    let first = at(0.0)?;
    if first.min_eigenvalue() >= 0.0 {
        return Ok(first);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if at(mid)?.min_eigenvalue() >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    at(hi)
}

/// `sum_i p_i atom_i^{⊗n}` on `n` copies of the dictionary layout.
pub fn construct_iid(mix: &Mixture, n: usize) -> Result<HermOp> {
    if n == 0 {
        return Err(Error::TrialMismatch("n must be at least 1".into()));
    }
    let layout = mix.dictionary.layout().repeat_trials(n)?;
    let dim = layout.total_dim();
    let mut acc = CMatrix::zeros(dim, dim);
    let pairs: Vec<(usize, f64)> = mix.weights.iter().copied().enumerate().filter(|&(_, p)| p != 0.0).collect();
    // bounded memory: a few powers at a time, accumulated in atom order
    for block in pairs.chunks(4) {
        let powers = par::map(block, |&(i, p)| kron_power(mix.dictionary.atoms[i].entries(), n) * c(p, 0.));
        for m in powers {
            acc += m;
        }
    }
    HermOp::new(layout, acc)
}

pub(crate) fn kron_power(m: &CMatrix, n: usize) -> CMatrix {
    (1..n).fold(m.clone(), |acc, _| acc.kronecker(m))
}

/// Result of [`fit_mixture`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub weights: Vec<f64>,
    /// `||rho - sum_i p_i atom_i^{⊗n}||_HS` at the returned weights.
    pub fit_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Stopping rule and iteration cap of [`fit_mixture_with`].
#[derive(Clone, Debug)]
pub struct FitOptions {
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Tolerance of the symmetry precondition.
    pub symmetry_atol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_iter: 100_000, symmetry_atol: DEFAULT_ATOL }
    }
}

pub fn fit_mixture(rho_n: &HermOp, dict: &Dictionary, n: usize) -> Result<FitResult> {
    fit_mixture_with(rho_n, dict, n, &FitOptions::default())
}

/// Nonnegative least squares over `{p >= 0, sum p <= 1}` minimising
/// `||rho - sum_i p_i atom_i^{⊗n}||_HS^2`, by accelerated projected gradient
/// with step `1 / L`, `L = 2 lambda_max(G)`, and function-value restarts.
pub fn fit_mixture_with(rho_n: &HermOp, dict: &Dictionary, n: usize, opts: &FitOptions) -> Result<FitResult> {
    let sym = crate::exchange::symmetry_residual(rho_n, n)?;
    if sym > opts.symmetry_atol {
        return Err(Error::NotSymmetric(sym));
    }
    let trial_dim = dict.layout().total_dim();
    if trial_dim.pow(n as u32) != rho_n.dim() {
        return Err(Error::TrialMismatch(format!("operator of dimension {} is not {n} trials of {trial_dim}", rho_n.dim())));
    }
    let rho = rho_n.with_layout(dict.layout().repeat_trials(n)?)?;
    let k = dict.len();
    let atoms = dict.atoms();

    let overlaps = DMatrix::from_fn(k, k, |i, j| crate::tensor::hs_inner(&atoms[i], &atoms[j]).expect("same dims"));
    let gram = overlaps.map(|x| x.powi(n as i32));
    let labels: Vec<Vec<String>> = (1..=n).map(|t| rho.layout().trial_positions(t).iter().map(|&p| rho.layout().factors()[p].label.clone()).collect()).collect();
    let b = DVector::from_vec(
        par::map(atoms, |a| -> Result<f64> {
            let mut reduced = rho.clone();
            for l in &labels {
                reduced = reduced.contract(l, a.entries())?;
            }
            Ok(reduced.trace())
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?,
    );
    let norm_sq = crate::tensor::hs_inner(&rho, &rho)?;

    let lipschitz = 2.0 * gram.clone().symmetric_eigenvalues().max().max(1e-300);
    let objective = |p: &DVector<f64>| (p.dot(&(&gram * p)) - 2.0 * b.dot(p) + norm_sq).max(0.0);

    let mut x = DVector::from_element(k, 1.0 / k as f64);
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut f_prev = objective(&x);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let grad = (&gram * &y - &b) * 2.0;
        let x_next = project_capped_simplex(&(&y - grad / lipschitz));
        let f = objective(&x_next);
        if f > f_prev {
            // restart momentum from the last accepted point
            y = x.clone();
            t = 1.0;
            continue;
        }
        let decrease = f_prev - f;
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        y = &x_next + (&x_next - &x) * ((t - 1.0) / t_next);
        x = x_next;
        t = t_next;
        let small = decrease <= opts.rel_tol * f_prev;
        f_prev = f;
        if f < 1e-28 || small {
            converged = true;
            break;
        }
    }

    let weights: Vec<f64> = x.iter().copied().collect();
    let fit_residual = explicit_residual(&rho, dict, &weights, n)?;
    Ok(FitResult { weights, fit_residual, iterations, converged })
}

fn explicit_residual(rho: &HermOp, dict: &Dictionary, weights: &[f64], n: usize) -> Result<f64> {
    let mut acc = rho.entries().clone();
    for (a, &p) in dict.atoms().iter().zip(weights) {
        if p != 0.0 {
            acc -= kron_power(a.entries(), n) * c(p, 0.);
        }
    }
    Ok(acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
}

/// Euclidean projection onto `{p >= 0, sum p <= 1}`.
pub fn project_capped_simplex(v: &DVector<f64>) -> DVector<f64> {
    let clipped = v.map(|x| x.max(0.0));
    if clipped.sum() <= 1.0 {
        return clipped;
    }
    let mut sorted: Vec<f64> = v.iter().copied().collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if s - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.map(|x| (x - theta).max(0.0))
}

/// One atom above the weight floor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportEntry {
    pub index: usize,
    pub weight: f64,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub entries: Vec<SupportEntry>,
    pub weight_floor: f64,
    pub tol_support: f64,
    pub verdict: bool,
}

/// Default weight floor of [`support_report`].
pub const WEIGHT_FLOOR: f64 = 1e-3;
/// Default support tolerance of [`support_report`].
pub const TOL_SUPPORT: f64 = 0.05;

/// Single-trial residuals of every atom with weight above `weight_floor`.
pub fn support_report(mix: &Mixture, spec: &ConstraintSpec, weight_floor: f64, tol_support: f64) -> Result<SupportReport> {
    let entries = mix
        .weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > weight_floor)
        .map(|(index, &weight)| {
            let residuals = single_trial_residuals(&mix.dictionary.atoms[index], spec)?;
            let max_residual = residuals.iter().copied().fold(0.0, f64::max);
            Ok(SupportEntry { index, weight, residuals, max_residual })
        })
        .collect::<Result<Vec<_>>>()?;
    let verdict = entries.iter().all(|e| e.max_residual <= tol_support);
    Ok(SupportReport { entries, weight_floor, tol_support, verdict })
}

/// Fitted weights as a mixture (renormalised to sum to one).
pub fn fitted_mixture(dict: &Dictionary, fit: &FitResult) -> Result<Mixture> {
    let total: f64 = fit.weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidConfig("fit returned zero weights".into()));
    }
    Mixture::new(dict.clone(), fit.weights.iter().map(|w| w / total).collect())
}

/// De Finetti-type residual of the `n`-trial power mixture built from `mix`.
pub fn theorem2_forward_check(mix: &Mixture, spec: &ConstraintSpec, n: usize) -> Result<f64> {
    let rho = construct_iid(mix, n)?;
    constraints::definetti_type_residual(&rho, spec, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::LinearFamily;
    use crate::linalg::{basis_projector, pauli_z};
    use crate::tensor::SuperOp;

    fn qubit() -> SpaceLayout {
        SpaceLayout::state("q", 2)
    }

    fn state(m: CMatrix) -> HermOp {
        HermOp::new(qubit(), m).unwrap()
    }

    #[test]
    fn capped_simplex_projection() {
        let p = project_capped_simplex(&DVector::from_vec(vec![0.2, -0.1, 0.3]));
        assert_eq!(p.as_slice(), &[0.2, 0.0, 0.3]);
        let p = project_capped_simplex(&DVector::from_vec(vec![2.0, 0.0, 1.0]));
        assert!((p.sum() - 1.0).abs() < 1e-15 && (p[0] - 1.0).abs() < 1e-15);
        let p = project_capped_simplex(&DVector::from_vec(vec![0.8, 0.6]));
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn construct_examples() {
        let rho = linalg::bloch_state(0.1, 0.3, -0.2);
        let single = Mixture::uniform(vec![state(rho.clone())]).unwrap();
        let out = construct_iid(&single, 3).unwrap();
        assert!(linalg::max_abs_diff(out.entries(), &kron_power(&rho, 3)) < 1e-15);
        let ghz = Mixture::uniform(vec![state(basis_projector(2, 0)), state(basis_projector(2, 1))]).unwrap();
        let out = construct_iid(&ghz, 3).unwrap();
        assert_eq!(out.entries()[(0, 0)], c(0.5, 0.));
        assert_eq!(out.entries()[(7, 7)], c(0.5, 0.));
        assert!((out.trace() - 1.0).abs() < 1e-15);
        assert!(crate::exchange::symmetry_residual(&out, 3).unwrap() < 1e-15);
    }

    #[test]
    fn grid_has_requested_size_and_poles() {
        let g = bloch_grid(&qubit(), 200).unwrap();
        assert_eq!(g.len(), 200);
        let zs: Vec<f64> = g.atoms().iter().map(|a| linalg::bloch_vector(a.entries())[2]).collect();
        assert!(zs.iter().any(|&z| (z - 1.0).abs() < 1e-12));
        assert!(zs.iter().any(|&z| (z + 1.0).abs() < 1e-12));
    }

    #[test]
    fn round_trip_fit() {
        let atoms = vec![
            state(linalg::bloch_state(0.1, 0.2, 0.9)),
            state(linalg::bloch_state(0.8, 0.0, -0.2)),
            state(linalg::bloch_state(-0.3, 0.5, 0.1)),
        ];
        let mix = Mixture::new(Dictionary::new(atoms.clone()).unwrap(), vec![0.5, 0.3, 0.2]).unwrap();
        let rho = construct_iid(&mix, 2).unwrap();
        let distractors = sample_dictionary(&qubit(), None, 4, 11).unwrap();
        let dict = Dictionary::new(atoms).unwrap().extend(&distractors).unwrap();
        let fit = fit_mixture(&rho, &dict, 2).unwrap();
        assert!(fit.fit_residual < 1e-7, "{fit:?}");
        for (k, want) in [0.5, 0.3, 0.2].iter().enumerate() {
            assert!((fit.weights[k] - want).abs() < 1e-4, "{:?}", &fit.weights[..3]);
        }
    }

    #[test]
    fn rejects_non_symmetric_input() {
        let a = basis_projector(2, 0);
        let b = linalg::bloch_state(0.5, 0.0, 0.0);
        let rho = HermOp::new(qubit().repeat_trials(2).unwrap(), a.kronecker(&b)).unwrap();
        let dict = bloch_grid(&qubit(), 10).unwrap();
        assert!(matches!(fit_mixture(&rho, &dict, 2), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn sampled_atoms_meet_constraints() {
        let plain = sample_dictionary(&qubit(), None, 5, 1).unwrap();
        assert_eq!(plain.len(), 5);
        let z = state(pauli_z());
        let spec = ConstraintSpec::product_expectation(vec![z], vec![0.6]).unwrap();
        let dict = sample_dictionary(&qubit(), Some(&spec), 20, 2).unwrap();
        for a in dict.atoms() {
            assert!((linalg::bloch_vector(a.entries())[2] - 0.6).abs() < 1e-9);
            assert!(a.min_eigenvalue() > -1e-12);
        }
        let impossible = ConstraintSpec::product_expectation(vec![state(pauli_z())], vec![1.5]).unwrap();
        assert!(matches!(sample_dictionary(&qubit(), Some(&impossible), 3, 0), Err(Error::EmptyConstraintSet(_))));
    }

    #[test]
    fn forward_check_detects_contamination() {
        let z = SuperOp::expectation(&state(pauli_z()));
        let spec = ConstraintSpec::definetti_type(vec![LinearFamily::single(z)]).unwrap();
        let kernel = vec![state(linalg::bloch_state(0.5, 0.0, 0.0)), state(linalg::bloch_state(0.0, -0.7, 0.0))];
        let mix = Mixture::uniform(kernel.clone()).unwrap();
        assert!(theorem2_forward_check(&mix, &spec, 2).unwrap() < 1e-15);
        let mut bad = kernel;
        bad.push(state(linalg::bloch_state(0.0, 0.0, 0.9)));
        let mix = Mixture::uniform(bad).unwrap();
        assert!(theorem2_forward_check(&mix, &spec, 2).unwrap() > 0.01);
    }

    #[test]
    fn mixture_json_round_trip() {
        let mix = Mixture::uniform(vec![state(basis_projector(2, 0)), state(basis_projector(2, 1))]).unwrap();
        let text = serde_json::to_string(&mix).unwrap();
        assert!(text.contains("\"weights\"") && text.contains("\"atoms\""));
        let back: Mixture = serde_json::from_str(&text).unwrap();
        assert_eq!(back, mix);
    }
}
