//! Bayesian discrimination between finitely many process hypotheses.
//!
//! Probabilities are handled in log space. Outcome tuples index the
//! instruments in the site order of the hypotheses.

use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::process::{born_probability, validate_instrument, ChoiMap, Instrument, ProcessMatrix};
use crate::tensor::SiteRef;
use crate::{io, linalg, par, Error, Result, DEFAULT_ATOL};

/// Outcome probabilities at or below this are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-13;

/// Finite prior over single-trial processes sharing one site structure.
#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisSet {
    pub names: Vec<String>,
    pub processes: Vec<ProcessMatrix>,
    pub log_prior: Vec<f64>,
}

impl HypothesisSet {
    pub fn new(names: Vec<String>, processes: Vec<ProcessMatrix>, log_prior: Vec<f64>) -> Result<Self> {
        if processes.is_empty() {
            return Err(Error::InvalidConfig("no hypotheses".into()));
        }
        if names.len() != processes.len() || log_prior.len() != processes.len() {
            return Err(Error::DimensionMismatch { expected: processes.len(), found: log_prior.len().min(names.len()) });
        }
        let sites = processes[0].sites();
        for w in &processes[1..] {
            if w.sites() != sites || w.layout().dims() != processes[0].layout().dims() {
                return Err(Error::SiteMismatch("hypotheses have different site structures".into()));
            }
        }
        let norm = log_sum_exp(&log_prior);
        if norm.abs() > DEFAULT_ATOL {
            return Err(Error::InvalidConfig(format!("prior is not normalised (log-sum-exp {norm})")));
        }
        Ok(Self { names, processes, log_prior })
    }

    pub fn uniform(names: Vec<String>, processes: Vec<ProcessMatrix>) -> Result<Self> {
        let k = processes.len();
        Self::new(names, processes, vec![-(k as f64).ln(); k])
    }

    pub fn len(&self) -> usize {
        self.processes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.processes.is_empty()
    }

    pub fn sites(&self) -> Vec<SiteRef> {
        self.processes[0].sites()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.log_prior.iter().map(|l| l.exp()).collect()
    }

    /// Shannon entropy of the prior, in nats.
    pub fn entropy(&self) -> f64 {
        self.log_prior.iter().filter(|l| l.is_finite()).map(|&l| -l.exp() * l).sum()
    }
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Outcome tuples of repeated trials, with the instruments that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    /// One instrument per site, in the site order of the process.
    pub instruments: Vec<Instrument>,
    pub outcomes: Vec<Vec<usize>>,
}

impl OutcomeRecord {
    pub fn new(instruments: Vec<Instrument>, outcomes: Vec<Vec<usize>>) -> Result<Self> {
        for (t, tuple) in outcomes.iter().enumerate() {
            if tuple.len() != instruments.len() {
                return Err(Error::DimensionMismatch { expected: instruments.len(), found: tuple.len() });
            }
            for (a, ins) in tuple.iter().zip(&instruments) {
                if *a >= ins.len() {
                    return Err(Error::InvalidConfig(format!("trial {t}: outcome {a} out of range")));
                }
            }
        }
        Ok(Self { instruments, outcomes })
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// The record restricted to trials `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> OutcomeRecord {
        Self { instruments: self.instruments.clone(), outcomes: self.outcomes[range].to_vec() }
    }

    fn shape(&self) -> Vec<usize> {
        self.instruments.iter().map(Instrument::len).collect()
    }
}

fn tuple_index(tuple: &[usize], shape: &[usize]) -> usize {
    tuple.iter().zip(shape).fold(0, |acc, (a, d)| acc * d + a)
}

/// `P(a|W)` for every outcome tuple, row-major over the instruments.
pub fn outcome_distribution(w: &ProcessMatrix, instruments: &[Instrument]) -> Result<Vec<f64>> {
    let sites = w.sites();
    if sites.len() != instruments.len() {
        return Err(Error::SiteMismatch(format!("{} sites but {} instruments", sites.len(), instruments.len())));
    }
    let placed: Vec<Instrument> = instruments.iter().zip(&sites).map(|(ins, s)| ins.on_site(&s.site)).collect();
    let shape: Vec<usize> = placed.iter().map(Instrument::len).collect();
    let total: usize = shape.iter().product();
    (0..total)
        .map(|k| {
            let tuple = linalg::digits(k, &shape);
            let maps: Vec<&ChoiMap> = tuple.iter().zip(&placed).map(|(&a, ins)| &ins.outcomes[a]).collect();
            born_probability(w, &maps)
        })
        .collect()
}

fn log_table(w: &ProcessMatrix, instruments: &[Instrument]) -> Result<Vec<f64>> {
    Ok(outcome_distribution(w, instruments)?
        .into_iter()
        .map(|p| if p <= ZERO_PROBABILITY { f64::NEG_INFINITY } else { p.ln() })
        .collect())
}

fn check_instruments(instruments: &[Instrument]) -> Result<()> {
    for (k, ins) in instruments.iter().enumerate() {
        let report = validate_instrument(ins)?;
        if !report.valid {
            return Err(Error::NotCptp(format!("instrument {k}: trace-preservation residual {:.3e}", report.tp_residual)));
        }
    }
    Ok(())
}

/// `trials` independent draws from `P(a|W)`, by inverse CDF on a seeded stream.
pub fn simulate_run(true_w: &ProcessMatrix, instruments: &[Instrument], trials: usize, seed: u64) -> Result<OutcomeRecord> {
    check_instruments(instruments)?;
    let probs: Vec<f64> = outcome_distribution(true_w, instruments)?.into_iter().map(|p| p.max(0.0)).collect();
    let shape: Vec<usize> = instruments.iter().map(Instrument::len).collect();
    let cdf: Vec<f64> = probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let total = *cdf.last().expect("non-empty");
    let mut rng = linalg::seeded(seed);
    let outcomes = (0..trials)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            let k = cdf.iter().position(|&c| u < c).unwrap_or_else(|| probs.iter().rposition(|&p| p > 0.0).unwrap_or(0));
            linalg::digits(k, &shape)
        })
        .collect();
    OutcomeRecord::new(instruments.to_vec(), outcomes)
}

/// `sum_t log P(a_t|W)`; `-inf` once an impossible outcome is observed.
pub fn log_likelihood(rec: &OutcomeRecord, w: &ProcessMatrix) -> Result<f64> {
    if rec.is_empty() {
        return Ok(0.0);
    }
    let table = log_table(w, &rec.instruments)?;
    let shape = rec.shape();
    Ok(rec.outcomes.iter().map(|t| table[tuple_index(t, &shape)]).sum())
}

/// Bayes rule on the whole record at once.
pub fn posterior_update(hyp: &HypothesisSet, rec: &OutcomeRecord) -> Result<HypothesisSet> {
    let loglik = par::map(&hyp.processes, |w| log_likelihood(rec, w)).into_iter().collect::<Result<Vec<_>>>()?;
    normalize(hyp, &loglik)
}

/// Bayes rule applied one trial at a time.
pub fn sequential_update(hyp: &HypothesisSet, rec: &OutcomeRecord) -> Result<HypothesisSet> {
    let mut tracker = PosteriorTracker::new(hyp, &rec.instruments)?;
    for t in &rec.outcomes {
        tracker.observe(t)?;
    }
    Ok(tracker.posterior)
}

fn normalize(hyp: &HypothesisSet, loglik: &[f64]) -> Result<HypothesisSet> {
    let joint: Vec<f64> = hyp.log_prior.iter().zip(loglik).map(|(p, l)| p + l).collect();
    let z = log_sum_exp(&joint);
    if z == f64::NEG_INFINITY || z.is_nan() {
        return Err(Error::InconsistentData);
    }
    let log_prior = joint.iter().map(|j| j - z).collect();
    Ok(HypothesisSet { names: hyp.names.clone(), processes: hyp.processes.clone(), log_prior })
}

/// Sequential posterior with per-hypothesis outcome tables computed once.
struct PosteriorTracker {
    posterior: HypothesisSet,
    tables: Vec<Vec<f64>>,
    shape: Vec<usize>,
}

impl PosteriorTracker {
    fn new(hyp: &HypothesisSet, instruments: &[Instrument]) -> Result<Self> {
        let tables = hyp.processes.iter().map(|w| log_table(w, instruments)).collect::<Result<_>>()?;
        Ok(Self { posterior: hyp.clone(), tables, shape: instruments.iter().map(Instrument::len).collect() })
    }

    fn observe(&mut self, tuple: &[usize]) -> Result<()> {
        let k = tuple_index(tuple, &self.shape);
        let loglik: Vec<f64> = self.tables.iter().map(|t| t[k]).collect();
        self.posterior = normalize(&self.posterior, &loglik)?;
        Ok(())
    }
}

/// Where the true process of an experiment comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TruthRef {
    /// Name of one of the hypotheses.
    Name(String),
    File { file: PathBuf },
}

/// An instrument given inline or by file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstrumentRef {
    File { file: PathBuf },
    Inline(Instrument),
}

/// A seed count (seeds `0..count`) or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    Count(u64),
    List(Vec<u64>),
}

impl Seeds {
    pub fn to_vec(&self) -> Vec<u64> {
        match self {
            Seeds::Count(n) => (0..*n).collect(),
            Seeds::List(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisRef {
    pub name: String,
    pub file: PathBuf,
}

/// Experiment configuration file. Relative paths resolve against the
/// directory of the configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryConfig {
    pub hypotheses: Vec<HypothesisRef>,
    /// Prior probabilities; uniform when absent.
    #[serde(default)]
    pub prior: Option<Vec<f64>>,
    pub truth: TruthRef,
    /// One instrument per site.
    pub instruments: Vec<InstrumentRef>,
    pub trials: usize,
    pub seeds: Seeds,
    /// Posterior mass that counts as identification.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_threshold() -> f64 {
    0.99
}

/// A loaded experiment.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub hypotheses: HypothesisSet,
    pub truth: ProcessMatrix,
    /// Index of the truth in the hypothesis set, when it is one of them.
    pub truth_index: Option<usize>,
    pub instruments: Vec<Instrument>,
    pub trials: usize,
    pub seeds: Vec<u64>,
    pub threshold: f64,
}

impl Experiment {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let config: DiscoveryConfig = io::read_json(path)?;
        Self::from_config(&config, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn from_config(config: &DiscoveryConfig, base: &Path) -> Result<Self> {
        let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
        let load = |p: &Path| -> Result<ProcessMatrix> {
            let (w, sites) = io::read_process(resolve(p))?;
            ProcessMatrix::new(w.op.clone()).map_err(|e| Error::InvalidConfig(format!("{}: {e} ({} sites)", p.display(), sites.len())))
        };
        let names: Vec<String> = config.hypotheses.iter().map(|h| h.name.clone()).collect();
        let processes = config.hypotheses.iter().map(|h| load(&h.file)).collect::<Result<Vec<_>>>()?;
        let log_prior = match &config.prior {
            None => vec![-(processes.len() as f64).ln(); processes.len()],
            Some(p) => {
                if p.iter().any(|&x| x < 0.0) {
                    return Err(Error::InvalidConfig("negative prior probability".into()));
                }
                p.iter().map(|x| x.ln()).collect()
            }
        };
        let hypotheses = HypothesisSet::new(names.clone(), processes, log_prior)?;
        let (truth, truth_index) = match &config.truth {
            TruthRef::Name(n) => {
                let k = names.iter().position(|m| m == n).ok_or_else(|| Error::InvalidConfig(format!("unknown hypothesis {n}")))?;
                (hypotheses.processes[k].clone(), Some(k))
            }
            TruthRef::File { file } => (load(file)?, None),
        };
        let instruments = config
            .instruments
            .iter()
            .map(|r| match r {
                InstrumentRef::Inline(i) => Ok(i.clone()),
                InstrumentRef::File { file } => io::read_json(resolve(file)),
            })
            .collect::<Result<Vec<_>>>()?;
        check_instruments(&instruments)?;
        if config.trials == 0 {
            return Err(Error::InvalidConfig("trials must be positive".into()));
        }
        let seeds = config.seeds.to_vec();
        if seeds.is_empty() {
            return Err(Error::InvalidConfig("no seeds".into()));
        }
        Ok(Self { hypotheses, truth, truth_index, instruments, trials: config.trials, seeds, threshold: config.threshold })
    }
}

/// Posterior trajectory of one seeded replica.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Replica {
    pub seed: u64,
    /// Posterior after `t` trials, `t = 0..=trials`.
    pub posterior: Vec<Vec<f64>>,
    pub entropy: Vec<f64>,
    /// Final posterior of the hypothesis with the largest final mass.
    pub final_max_mass: f64,
    pub final_mass_truth: Option<f64>,
    /// First trial at which the truth reaches the threshold.
    pub trials_to_threshold: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryReport {
    pub hypotheses: Vec<String>,
    pub truth_index: Option<usize>,
    pub trials: usize,
    pub threshold: f64,
    pub replicas: Vec<Replica>,
    /// Mean posterior entropy after each trial, over replicas.
    pub mean_entropy: Vec<f64>,
    pub median_final_mass_truth: Option<f64>,
    pub median_trials_to_threshold: Option<usize>,
    /// Hypothesis with the largest mean final posterior.
    pub map_hypothesis: String,
}

impl DiscoveryReport {
    /// `seed,trial,<hypotheses...>,entropy`, one row per replica and trial.
    pub fn to_csv(&self) -> String {
        let mut out = format!("seed,trial,{},entropy\n", self.hypotheses.join(","));
        for r in &self.replicas {
            for (t, (p, h)) in r.posterior.iter().zip(&r.entropy).enumerate() {
                let cols: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                out.push_str(&format!("{},{t},{},{h}\n", r.seed, cols.join(",")));
            }
        }
        out
    }
}

fn median<T: Copy + PartialOrd>(mut xs: Vec<T>) -> Option<T> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(|a, b| a.partial_cmp(b).expect("comparable"));
    Some(xs[xs.len() / 2])
}

/// Runs every seeded replica and summarises the posterior trajectories.
pub fn discovery_experiment(exp: &Experiment) -> Result<DiscoveryReport> {
    let replicas = par::map(&exp.seeds, |&seed| run_replica(exp, seed)).into_iter().collect::<Result<Vec<_>>>()?;
    let steps = exp.trials + 1;
    let mean_entropy =
        (0..steps).map(|t| replicas.iter().map(|r| r.entropy[t]).sum::<f64>() / replicas.len() as f64).collect();
    let median_final_mass_truth = exp.truth_index.and_then(|_| median(replicas.iter().filter_map(|r| r.final_mass_truth).collect()));
    let median_trials_to_threshold = exp.truth_index.and_then(|_| {
        // replicas that never reach the threshold count as beyond the budget
        let mut xs: Vec<usize> = replicas.iter().map(|r| r.trials_to_threshold.unwrap_or(usize::MAX)).collect();
        xs.sort_unstable();
        Some(xs[xs.len() / 2]).filter(|&x| x != usize::MAX)
    });
    let k = exp.hypotheses.len();
    let mean_final: Vec<f64> =
        (0..k).map(|i| replicas.iter().map(|r| r.posterior[exp.trials][i]).sum::<f64>() / replicas.len() as f64).collect();
    let best = (0..k).max_by(|&a, &b| mean_final[a].total_cmp(&mean_final[b])).expect("non-empty");
    Ok(DiscoveryReport {
        hypotheses: exp.hypotheses.names.clone(),
        truth_index: exp.truth_index,
        trials: exp.trials,
        threshold: exp.threshold,
        replicas,
        mean_entropy,
        median_final_mass_truth,
        median_trials_to_threshold,
        map_hypothesis: exp.hypotheses.names[best].clone(),
    })
}

fn run_replica(exp: &Experiment, seed: u64) -> Result<Replica> {
    let record = simulate_run(&exp.truth, &exp.instruments, exp.trials, seed)?;
    let mut tracker = PosteriorTracker::new(&exp.hypotheses, &exp.instruments)?;
    let mut posterior = vec![tracker.posterior.probabilities()];
    let mut entropy = vec![tracker.posterior.entropy()];
    for t in &record.outcomes {
        tracker.observe(t)?;
        posterior.push(tracker.posterior.probabilities());
        entropy.push(tracker.posterior.entropy());
    }
    let last = posterior.last().expect("initial entry");
    let final_max_mass = last.iter().copied().fold(0.0, f64::max);
    let final_mass_truth = exp.truth_index.map(|k| last[k]);
    let trials_to_threshold = exp.truth_index.and_then(|k| posterior.iter().position(|p| p[k] >= exp.threshold));
    Ok(Replica { seed, posterior, entropy, final_max_mass, final_mass_truth, trials_to_threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_projector, bloch_state, identity};
    use crate::suite::{build_bipartite_comb, discrimination_instruments};
    use crate::tensor::{HermOp, SpaceLayout};

    /// A state `rho` arriving at the input of site `A`, which has no output.
    fn preparation(rho: crate::CMatrix) -> ProcessMatrix {
        let layout = SpaceLayout::sites(&[("A", 2, 1)]).unwrap();
        ProcessMatrix::new(HermOp::new(layout, rho).unwrap()).unwrap()
    }

    fn z_measurement() -> Instrument {
        Instrument::measure_prepare("A", &[basis_projector(2, 0), basis_projector(2, 1)], &[identity(1), identity(1)]).unwrap()
    }

    #[test]
    fn computational_measurement_of_basis_state() {
        let w = preparation(basis_projector(2, 0));
        let rec = simulate_run(&w, &[z_measurement()], 50, 3).unwrap();
        assert!(rec.outcomes.iter().all(|t| t == &vec![0]));
        let single = Instrument::measure_prepare("A", &[identity(2)], &[identity(1)]).unwrap();
        let rec = simulate_run(&w, &[single], 5, 3).unwrap();
        assert!(rec.outcomes.iter().all(|t| t == &vec![0]));
    }

    #[test]
    fn likelihood_of_fair_outcomes() {
        let w = preparation(bloch_state(1.0, 0.0, 0.0));
        let empty = OutcomeRecord::new(vec![z_measurement()], vec![]).unwrap();
        assert_eq!(log_likelihood(&empty, &w).unwrap(), 0.0);
        let rec = simulate_run(&w, &[z_measurement()], 7, 5).unwrap();
        assert!((log_likelihood(&rec, &w).unwrap() - 7.0 * 0.5f64.ln()).abs() < 1e-12);
        let ins = discrimination_instruments();
        let ba = build_bipartite_comb(&basis_projector(2, 0), 2, ["B", "A"]).unwrap();
        let rec = simulate_run(&ba, &ins, 6, 0).unwrap();
        // every tuple has probability 1/4 when B acts first
        assert!((log_likelihood(&rec, &ba).unwrap() - 6.0 * 0.25f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn distributions_are_normalised() {
        let ins = discrimination_instruments();
        for order in [["A", "B"], ["B", "A"]] {
            let w = build_bipartite_comb(&bloch_state(0.3, 0.1, 0.5), 2, order).unwrap();
            let p = outcome_distribution(&w, &ins).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&x| x > -1e-12));
        }
    }

    #[test]
    fn batch_equals_sequential_and_order_free() {
        let rho = basis_projector(2, 0);
        let hyp = HypothesisSet::new(
            vec!["AB".into(), "BA".into()],
            vec![build_bipartite_comb(&rho, 2, ["A", "B"]).unwrap(), build_bipartite_comb(&rho, 2, ["B", "A"]).unwrap()],
            vec![0.3f64.ln(), 0.7f64.ln()],
        )
        .unwrap();
        let ins = discrimination_instruments();
        let rec = simulate_run(&hyp.processes[0], &ins, 40, 9).unwrap();
        let batch = posterior_update(&hyp, &rec).unwrap();
        let seq = sequential_update(&hyp, &rec).unwrap();
        for (a, b) in batch.log_prior.iter().zip(&seq.log_prior) {
            assert!((a - b).abs() < 1e-10 || (a.is_infinite() && b.is_infinite()));
        }
        let mut reversed = rec.clone();
        reversed.outcomes.reverse();
        assert_eq!(posterior_update(&hyp, &reversed).unwrap().probabilities(), batch.probabilities());
    }

    #[test]
    fn impossible_outcomes() {
        let rho = basis_projector(2, 0);
        let ab = build_bipartite_comb(&rho, 2, ["A", "B"]).unwrap();
        let ba = build_bipartite_comb(&rho, 2, ["B", "A"]).unwrap();
        let ins = discrimination_instruments();
        // outcome 1 at A is impossible when A receives |0> directly
        let rec = OutcomeRecord::new(ins.clone(), vec![vec![1, 0]]).unwrap();
        assert_eq!(log_likelihood(&rec, &ab).unwrap(), f64::NEG_INFINITY);
        let hyp = HypothesisSet::uniform(vec!["AB".into(), "BA".into()], vec![ab.clone(), ba]).unwrap();
        let post = posterior_update(&hyp, &rec).unwrap();
        assert_eq!(post.probabilities()[0], 0.0);
        let only = HypothesisSet::uniform(vec!["AB".into()], vec![ab]).unwrap();
        assert!(matches!(posterior_update(&only, &rec), Err(Error::InconsistentData)));
    }

    #[test]
    fn uniform_prior_equal_likelihoods() {
        let rho = basis_projector(2, 0);
        let w = build_bipartite_comb(&rho, 2, ["A", "B"]).unwrap();
        let hyp = HypothesisSet::uniform(vec!["x".into(), "y".into()], vec![w.clone(), w.clone()]).unwrap();
        let rec = simulate_run(&w, &discrimination_instruments(), 20, 1).unwrap();
        let p = posterior_update(&hyp, &rec).unwrap().probabilities();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_instrument() {
        let w = build_bipartite_comb(&basis_projector(2, 0), 2, ["A", "B"]).unwrap();
        let id = crate::process::build_standard_choi("A", &crate::process::StandardMap::Identity { d: 2 }).unwrap();
        let twice = Instrument::new(vec![id.clone(), id]).unwrap();
        let ins = vec![twice.clone(), twice];
        assert!(simulate_run(&w, &ins, 5, 0).is_err());
    }

    #[test]
    fn log_sum_exp_handles_infinities() {
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[0.5f64.ln(), 0.5f64.ln()])).abs() < 1e-15);
        assert!((log_sum_exp(&[-1000.0, -1000.0]) - (-1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
