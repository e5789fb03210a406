use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Input,
    Output,
}

/// One tensor factor: a labelled input or output space of a site in a trial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub label: String,
    pub site: String,
    pub role: Role,
    pub trial: usize,
    pub dim: usize,
}

impl Factor {
    pub fn new(label: impl Into<String>, site: impl Into<String>, role: Role, trial: usize, dim: usize) -> Self {
        Self { label: label.into(), site: site.into(), role, trial, dim }
    }
}

fn default_trial() -> usize {
    1
}

/// A site within a given trial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SiteRef {
    pub site: String,
    #[serde(default = "default_trial")]
    pub trial: usize,
}

impl SiteRef {
    pub fn new(site: impl Into<String>, trial: usize) -> Self {
        Self { site: site.into(), trial }
    }
}

impl fmt::Display for SiteRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.site, self.trial)
    }
}

/// Ordered list of tensor factors.
///
/// Labels are unique, dims are positive, and every trial carries the same
/// multiset of `(site, role, dim)` signatures.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Factor>", into = "Vec<Factor>")]
pub struct SpaceLayout {
    factors: Vec<Factor>,
}

impl TryFrom<Vec<Factor>> for SpaceLayout {
    type Error = Error;

    fn try_from(factors: Vec<Factor>) -> Result<Self> {
        Self::new(factors)
    }
}

impl From<SpaceLayout> for Vec<Factor> {
    fn from(layout: SpaceLayout) -> Self {
        layout.factors
    }
}

impl SpaceLayout {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        let layout = Self::unchecked(factors)?;
        layout.check_trial_signatures()?;
        Ok(layout)
    }

    /// Validates labels and dims only; used for intermediate layouts such as
    /// the result of a partial trace that keeps part of a trial.
    pub(crate) fn unchecked(factors: Vec<Factor>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for f in &factors {
            if !seen.insert(f.label.as_str()) {
                return Err(Error::LabelCollision(f.label.clone()));
            }
            if f.dim == 0 {
                return Err(Error::InvalidLayout(format!("factor `{}` has dimension 0", f.label)));
            }
            if f.trial == 0 {
                return Err(Error::InvalidLayout(format!("factor `{}` has trial index 0", f.label)));
            }
        }
        Ok(Self { factors })
    }

    pub fn empty() -> Self {
        Self { factors: Vec::new() }
    }

    fn check_trial_signatures(&self) -> Result<()> {
        let mut per_trial: BTreeMap<usize, Vec<(&str, Role, usize)>> = BTreeMap::new();
        for f in &self.factors {
            per_trial.entry(f.trial).or_default().push((f.site.as_str(), f.role, f.dim));
        }
        let mut signatures = per_trial.into_values().map(|mut s| {
            s.sort();
            s
        });
        if let Some(first) = signatures.next() {
            for other in signatures {
                if other != first {
                    return Err(Error::InvalidLayout("trials carry different factor signatures".into()));
                }
            }
        }
        Ok(())
    }

    /// Layout `[site_I, site_O]` of a single site in trial 1.
    pub fn single_site(site: &str, d_in: usize, d_out: usize) -> Self {
        Self::new(vec![
            Factor::new(format!("{site}_I"), site, Role::Input, 1, d_in),
            Factor::new(format!("{site}_O"), site, Role::Output, 1, d_out),
        ])
        .expect("single-site layout is valid")
    }

    /// A single input factor; the layout of a plain quantum state.
    pub fn state(label: &str, dim: usize) -> Self {
        Self::new(vec![Factor::new(label, label, Role::Input, 1, dim)]).expect("state layout is valid")
    }

    /// Several sites of one trial, each `(name, d_in, d_out)`, in reference order.
    pub fn sites(sites: &[(&str, usize, usize)]) -> Result<Self> {
        let mut factors = Vec::new();
        for (name, d_in, d_out) in sites {
            factors.push(Factor::new(format!("{name}_I"), *name, Role::Input, 1, *d_in));
            factors.push(Factor::new(format!("{name}_O"), *name, Role::Output, 1, *d_out));
        }
        Self::new(factors)
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|f| f.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn positions<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let p = self.position(l.as_ref())?;
            if out.contains(&p) {
                return Err(Error::LabelCollision(l.as_ref().to_string()));
            }
            out.push(p);
        }
        Ok(out)
    }

    pub fn labels(&self) -> Vec<String> {
        self.factors.iter().map(|f| f.label.clone()).collect()
    }

    /// Product of all output dimensions (`d^O`).
    pub fn output_dim(&self) -> usize {
        self.factors.iter().filter(|f| f.role == Role::Output).map(|f| f.dim).product()
    }

    pub fn input_dim(&self) -> usize {
        self.factors.iter().filter(|f| f.role == Role::Input).map(|f| f.dim).product()
    }

    pub fn concat(&self, other: &SpaceLayout) -> Result<SpaceLayout> {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Self::unchecked(factors)
    }

    /// Layout after moving factor `i` to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<SpaceLayout> {
        check_permutation(perm, self.len())?;
        let mut factors = self.factors.clone();
        for (i, f) in self.factors.iter().enumerate() {
            factors[perm[i]] = f.clone();
        }
        Ok(Self { factors })
    }

    /// Sub-layout keeping the given positions in layout order.
    pub(crate) fn select(&self, positions: &[usize]) -> SpaceLayout {
        let mut keep: Vec<usize> = positions.to_vec();
        keep.sort_unstable();
        Self { factors: keep.into_iter().map(|p| self.factors[p].clone()).collect() }
    }

    /// Distinct trial indices in ascending order.
    pub fn trials(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.factors.iter().map(|f| f.trial).collect();
        t.sort_unstable();
        t.dedup();
        t
    }

    pub fn trial_count(&self) -> usize {
        self.trials().len()
    }

    /// Positions of the factors of trial `t`, in layout order.
    pub fn trial_positions(&self, t: usize) -> Vec<usize> {
        self.factors.iter().enumerate().filter(|(_, f)| f.trial == t).map(|(i, _)| i).collect()
    }

    /// True when each trial occupies a contiguous block and blocks ascend.
    pub fn is_trial_contiguous(&self) -> bool {
        self.factors.windows(2).all(|w| w[0].trial <= w[1].trial)
    }

    /// Sites in order of first appearance.
    pub fn site_refs(&self) -> Vec<SiteRef> {
        let mut out: Vec<SiteRef> = Vec::new();
        for f in &self.factors {
            let s = SiteRef::new(f.site.clone(), f.trial);
            if !out.contains(&s) {
                out.push(s);
            }
        }
        out
    }

    /// Input and output factor positions of a site, each in layout order.
    pub fn site_positions(&self, site: &SiteRef) -> Result<(Vec<usize>, Vec<usize>)> {
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        for (i, f) in self.factors.iter().enumerate() {
            if f.site == site.site && f.trial == site.trial {
                match f.role {
                    Role::Input => inputs.push(i),
                    Role::Output => outputs.push(i),
                }
            }
        }
        if inputs.is_empty() && outputs.is_empty() {
            return Err(Error::UnknownSite(site.to_string()));
        }
        Ok((inputs, outputs))
    }

    /// Labels of a site ordered inputs first, then outputs.
    pub fn site_labels(&self, site: &SiteRef) -> Result<Vec<String>> {
        let (i, o) = self.site_positions(site)?;
        Ok(i.into_iter().chain(o).map(|p| self.factors[p].label.clone()).collect())
    }

    pub fn site_dims(&self, site: &SiteRef) -> Result<(usize, usize)> {
        let (i, o) = self.site_positions(site)?;
        let d = |ps: &[usize]| ps.iter().map(|&p| self.factors[p].dim).product::<usize>();
        Ok((d(&i), d(&o)))
    }

    /// Output labels of a site.
    pub fn site_output_labels(&self, site: &SiteRef) -> Result<Vec<String>> {
        let (_, o) = self.site_positions(site)?;
        Ok(o.into_iter().map(|p| self.factors[p].label.clone()).collect())
    }

    /// Copies of a single-trial layout for trials `1..=n`, labels suffixed `#j`.
    pub fn repeat_trials(&self, n: usize) -> Result<SpaceLayout> {
        if self.trial_count() > 1 {
            return Err(Error::TrialMismatch("repeat_trials needs a single-trial layout".into()));
        }
        let mut factors = Vec::with_capacity(self.len() * n);
        for j in 1..=n {
            for f in &self.factors {
                factors.push(Factor::new(format!("{}#{}", f.label, j), f.site.clone(), f.role, j, f.dim));
            }
        }
        Self::new(factors)
    }

    /// The layout of one trial with `#j` label suffixes removed and trial set to 1.
    pub fn single_trial(&self) -> Result<SpaceLayout> {
        let first = *self.trials().first().ok_or_else(|| Error::InvalidLayout("empty layout".into()))?;
        let factors = self
            .factors
            .iter()
            .filter(|f| f.trial == first)
            .map(|f| {
                let base = match f.label.rsplit_once('#') {
                    Some((b, suffix)) if suffix.parse::<usize>().is_ok() => b.to_string(),
                    _ => f.label.clone(),
                };
                Factor::new(base, f.site.clone(), f.role, 1, f.dim)
            })
            .collect();
        Self::new(factors)
    }

    /// Same factors with every trial index replaced by `trial`.
    pub fn with_trial(&self, trial: usize) -> Result<SpaceLayout> {
        Self::unchecked(
            self.factors
                .iter()
                .map(|f| Factor::new(f.label.clone(), f.site.clone(), f.role, trial, f.dim))
                .collect(),
        )
    }

    /// Same structure with every label given a suffix.
    pub fn with_label_suffix(&self, suffix: &str) -> SpaceLayout {
        Self {
            factors: self
                .factors
                .iter()
                .map(|f| Factor::new(format!("{}{}", f.label, suffix), f.site.clone(), f.role, f.trial, f.dim))
                .collect(),
        }
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!("length {} for {} factors", perm.len(), n)));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a bijection")));
        }
        seen[p] = true;
    }
    Ok(())
}
