use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use causal_definetti::bayes::{discovery_experiment, Experiment};
use causal_definetti::constraints::{evaluate, ConstraintSpec};
use causal_definetti::definetti::{
    bloch_grid, fit_mixture_with, single_trial_residuals, Dictionary, FitOptions, Mixture, TOL_SUPPORT, WEIGHT_FLOOR,
};
use causal_definetti::exchange::{
    channel_extendibility_residual, default_probe_states, process_extendibility_residual,
    state_extendibility_residual, symmetrize, symmetry_residual, weak_extendibility_residual, TrialSequence,
};
use causal_definetti::io::{self, MatrixJson, ProcessJson};
use causal_definetti::linalg;
use causal_definetti::process::{build_standard_choi, validate_process_with, ChoiMap, MapKind, StandardMap, ValidateOptions};
use causal_definetti::suite::{run_suite, SuiteOptions};
use causal_definetti::tensor::{HermOp, SiteRef};
use causal_definetti::DEFAULT_ATOL;

#[derive(Parser)]
#[command(name = "cdft", version, about = "Process matrices, exchangeability and de Finetti mixtures")]
struct Cli {
    /// Absolute tolerance for pass/fail decisions.
    #[arg(long, global = true, default_value_t = DEFAULT_ATOL)]
    atol: f64,
    /// Seed for sampled checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a process file describes a valid process matrix.
    Validate { process: PathBuf },
    /// Evaluate a constraint spec on a process or state.
    Constraints { process: PathBuf, spec: PathBuf },
    /// Average an n-trial operator over trial permutations.
    Symmetrize {
        input: PathBuf,
        output: PathBuf,
        /// Number of trials; defaults to the trial count of the layout.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Extendibility residuals of a trial sequence.
    Extendibility {
        sequence: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Fixed map for `weak` mode (matrix JSON on the trial layout).
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Fit a mixture of i.i.d. powers to an n-trial state.
    Fit {
        rho: PathBuf,
        #[arg(long, value_enum, default_value = "grid")]
        dict: DictSource,
        /// Atoms for `--dict file`: a mixture JSON or a list of matrices.
        #[arg(long)]
        atoms: Option<PathBuf>,
        /// Number of grid atoms.
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long)]
        n: Option<usize>,
        /// Constraint spec checked on the fitted support.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-3)]
        max_residual: f64,
        #[arg(long, default_value_t = WEIGHT_FLOOR)]
        weight_floor: f64,
        #[arg(long, default_value_t = TOL_SUPPORT)]
        tol_support: f64,
    },
    /// Run a causal-structure discovery experiment.
    Discover {
        config: PathBuf,
        /// Directory for `posterior.csv` and `summary.json`.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the named constructions and their assertions.
    Suite {
        #[arg(long)]
        case: Option<String>,
        /// Replaces the threshold of every upper-bound assertion.
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    State,
    Process,
    Weak,
    Channel,
}

#[derive(Clone, Copy, ValueEnum)]
enum DictSource {
    Grid,
    File,
}

/// Outcome of a command that ran to completion.
struct Outcome {
    passed: bool,
    report: Value,
    table: Vec<(String, String)>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.report).expect("json"));
            } else {
                print_table(&out.table);
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn print_table(rows: &[(String, String)]) {
    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    for (k, v) in rows {
        println!("{k:<width$}  {v}");
    }
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn verdict(ok: bool) -> String {
    if ok { "pass" } else { "FAIL" }.to_string()
}

fn row(k: impl Into<String>, v: impl Into<String>) -> (String, String) {
    (k.into(), v.into())
}

/// A matrix file, or a process file whose sites are checked.
fn read_operator(path: &Path) -> Result<(HermOp, Option<Vec<SiteRef>>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if value.get("sites").is_some() {
        let json: ProcessJson = serde_json::from_value(value)?;
        let (op, sites) = json.into_parts()?;
        Ok((op, Some(sites)))
    } else {
        let json: MatrixJson = serde_json::from_value(value)?;
        Ok((HermOp::try_from(json)?, None))
    }
}

fn read<T: DeserializeOwned>(path: &Path) -> Result<T> {
    io::read_json(path).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Validate { process } => validate(cli, process),
        Command::Constraints { process, spec } => constraints(cli, process, spec),
        Command::Symmetrize { input, output, n } => symmetrize_cmd(cli, input, output, *n),
        Command::Extendibility { sequence, mode, map } => extendibility(cli, sequence, *mode, map.as_deref()),
        Command::Fit { rho, dict, atoms, count, n, spec, max_residual, weight_floor, tol_support } => fit(
            cli,
            rho,
            &FitArgs {
                dict: *dict,
                atoms: atoms.as_deref(),
                count: *count,
                n: *n,
                spec: spec.as_deref(),
                max_residual: *max_residual,
                weight_floor: *weight_floor,
                tol_support: *tol_support,
            },
        ),
        Command::Discover { config, out } => discover(cli, config, out),
        Command::Suite { case, tol } => suite(cli, case.as_deref(), *tol),
    }
}

fn validate(cli: &Cli, path: &Path) -> Result<Outcome> {
    let (op, sites) = read_operator(path)?;
    let sites = sites.unwrap_or_else(|| op.layout().site_refs());
    let opts = ValidateOptions { atol: cli.atol, seed: cli.seed.unwrap_or(0), ..Default::default() };
    let report = validate_process_with(&op, &sites, &opts)?;
    let table = vec![
        row("psd_residual", sci(report.psd_residual)),
        row("trace_residual", sci(report.trace_residual)),
        row("normalization_residual", sci(report.normalization_residual)),
        row("sampling", format!("{:?}", report.sampling)),
        row("verdict", if report.verdict { "valid" } else { "INVALID" }),
    ];
    Ok(Outcome { passed: report.verdict, report: serde_json::to_value(&report)?, table })
}

fn constraints(cli: &Cli, process: &Path, spec: &Path) -> Result<Outcome> {
    let (op, _) = read_operator(process)?;
    let spec: ConstraintSpec = read(spec)?;
    let report = evaluate(&op, &spec)?;
    let passed = report.max_residual <= cli.atol;
    let mut table: Vec<_> = report.residuals.iter().map(|r| row(&r.name, sci(r.value))).collect();
    table.push(row("max_residual", sci(report.max_residual)));
    table.push(row("verdict", verdict(passed)));
    let mut value = serde_json::to_value(&report)?;
    value["atol"] = json!(cli.atol);
    value["passed"] = json!(passed);
    Ok(Outcome { passed, report: value, table })
}

fn symmetrize_cmd(cli: &Cli, input: &Path, output: &Path, n: Option<usize>) -> Result<Outcome> {
    let (op, sites) = read_operator(input)?;
    let n = n.unwrap_or_else(|| op.layout().trial_count());
    let before = symmetry_residual(&op, n)?;
    let sym = symmetrize(&op, n)?;
    let after = symmetry_residual(&sym, n)?;
    if sites.is_some() {
        io::write_process(output, &sym)?;
    } else {
        io::write_matrix(output, &sym)?;
    }
    let passed = after <= cli.atol;
    let table = vec![
        row("n", n.to_string()),
        row("input_symmetry_residual", sci(before)),
        row("output_symmetry_residual", sci(after)),
        row("written", output.display().to_string()),
    ];
    let report = json!({
        "n": n,
        "input_symmetry_residual": before,
        "output_symmetry_residual": after,
        "output": output,
        "passed": passed,
    });
    Ok(Outcome { passed, report, table })
}

/// Identity channel on the single site of a trial layout.
fn default_weak_map(seq: &TrialSequence) -> Result<ChoiMap> {
    let layout = seq.trial_layout();
    let sites = layout.site_refs();
    let [site] = sites.as_slice() else {
        bail!("weak mode on a multi-site trial needs --map");
    };
    let (d_in, d_out) = layout.site_dims(site)?;
    if d_in != d_out {
        bail!("site {site} has d_in != d_out; pass --map");
    }
    let id = build_standard_choi(&site.site, &StandardMap::Identity { d: d_in })?;
    Ok(ChoiMap::new(id.op.with_layout(layout.clone())?, MapKind::Cptp)?)
}

fn extendibility(cli: &Cli, path: &Path, mode: Mode, map: Option<&Path>) -> Result<Outcome> {
    let seq: TrialSequence = read(path)?;
    let fixed = match (mode, map) {
        (Mode::Weak, Some(p)) => {
            let (op, _) = read_operator(p)?;
            Some(ChoiMap::new(op.with_layout(seq.trial_layout().clone())?, MapKind::Cptp)?)
        }
        (Mode::Weak, None) => Some(default_weak_map(&seq)?),
        (_, Some(_)) => bail!("--map is only used in weak mode"),
        _ => None,
    };
    let d = seq.trial_layout().input_dim().max(seq.trial_layout().output_dim());
    let probe_states = default_probe_states(d);
    let mut residuals = Vec::new();
    for (n, _) in seq.elements() {
        if seq.get(n + 1).is_err() {
            continue;
        }
        let r = match mode {
            Mode::State => state_extendibility_residual(&seq, n)?,
            Mode::Process => process_extendibility_residual(&seq, n, &[])?,
            Mode::Weak => weak_extendibility_residual(&seq, n, fixed.as_ref().expect("weak map"))?,
            Mode::Channel => channel_extendibility_residual(&seq, n, &probe_states)?,
        };
        residuals.push((n, r));
    }
    if residuals.is_empty() {
        bail!("sequence has no consecutive elements n, n + 1");
    }
    let max = residuals.iter().map(|r| r.1).fold(0.0, f64::max);
    let passed = max <= cli.atol;
    let mut table: Vec<_> = residuals.iter().map(|(n, r)| row(format!("{} -> {n}", n + 1), sci(*r))).collect();
    table.push(row("max_residual", sci(max)));
    table.push(row("verdict", verdict(passed)));
    let mode_name = mode.to_possible_value().expect("named").get_name().to_string();
    let report = json!({
        "mode": mode_name,
        "residuals": residuals.iter().map(|(n, r)| json!({"n": n, "residual": r})).collect::<Vec<_>>(),
        "max_residual": max,
        "atol": cli.atol,
        "passed": passed,
    });
    Ok(Outcome { passed, report, table })
}

struct FitArgs<'a> {
    dict: DictSource,
    atoms: Option<&'a Path>,
    count: usize,
    n: Option<usize>,
    spec: Option<&'a Path>,
    max_residual: f64,
    weight_floor: f64,
    tol_support: f64,
}

fn read_dictionary(path: &Path) -> Result<Dictionary> {
    let value: Value = read(path)?;
    if value.is_array() {
        Ok(Dictionary::new(serde_json::from_value(value)?)?)
    } else {
        let mix: Mixture = serde_json::from_value(value)?;
        Ok(mix.dictionary)
    }
}

fn fit(cli: &Cli, path: &Path, args: &FitArgs) -> Result<Outcome> {
    let (rho, _) = read_operator(path)?;
    let n = args.n.unwrap_or_else(|| rho.layout().trial_count());
    let trial = rho.layout().single_trial()?;
    let dict = match (args.dict, args.atoms) {
        (DictSource::Grid, None) => bloch_grid(&trial, args.count)?,
        (DictSource::File, Some(p)) => read_dictionary(p)?,
        (DictSource::Grid, Some(_)) => bail!("--atoms needs --dict file"),
        (DictSource::File, None) => bail!("--dict file needs --atoms"),
    };
    let spec: Option<ConstraintSpec> = args.spec.map(read).transpose()?;
    let opts = FitOptions { symmetry_atol: cli.atol, ..Default::default() };
    let result = fit_mixture_with(&rho, &dict, n, &opts)?;

    let mut atoms = Vec::with_capacity(dict.len());
    let mut support_ok = true;
    let mut table = vec![
        row("n", n.to_string()),
        row("atoms", dict.len().to_string()),
        row("fit_residual", sci(result.fit_residual)),
        row("iterations", result.iterations.to_string()),
        row("converged", result.converged.to_string()),
    ];
    for (index, (atom, &weight)) in dict.atoms().iter().zip(&result.weights).enumerate() {
        let residuals = match &spec {
            Some(s) => Some(single_trial_residuals(atom, s)?),
            None => None,
        };
        let max_residual = residuals.as_ref().map(|r| r.iter().copied().fold(0.0, f64::max));
        let supported = weight > args.weight_floor;
        if supported && max_residual.is_some_and(|m| m > args.tol_support) {
            support_ok = false;
        }
        let bloch = (atom.dim() == 2).then(|| linalg::bloch_vector(atom.entries()));
        if supported {
            let mut v = format!("weight {weight:.4}");
            if let Some([x, y, z]) = bloch {
                v.push_str(&format!("  bloch ({x:.3}, {y:.3}, {z:.3})"));
            }
            if let Some(m) = max_residual {
                v.push_str(&format!("  residual {}", sci(m)));
            }
            table.push(row(format!("atom {index}"), v));
        }
        atoms.push(json!({
            "index": index,
            "weight": weight,
            "supported": supported,
            "min_eigenvalue": atom.min_eigenvalue(),
            "bloch": bloch,
            "residuals": residuals,
            "max_residual": max_residual,
        }));
    }
    let passed = result.fit_residual <= args.max_residual && support_ok;
    table.push(row("verdict", verdict(passed)));
    let report = json!({
        "n": n,
        "fit_residual": result.fit_residual,
        "iterations": result.iterations,
        "converged": result.converged,
        "max_fit_residual": args.max_residual,
        "weight_floor": args.weight_floor,
        "tol_support": args.tol_support,
        "support_verdict": spec.as_ref().map(|_| support_ok),
        "atoms": atoms,
        "passed": passed,
    });
    Ok(Outcome { passed, report, table })
}

fn discover(cli: &Cli, config: &Path, out: &Path) -> Result<Outcome> {
    let mut exp = Experiment::load(config).with_context(|| format!("loading {}", config.display()))?;
    if let Some(seed) = cli.seed {
        let count = exp.seeds.len() as u64;
        exp.seeds = (seed..seed + count).collect();
    }
    let report = discovery_experiment(&exp)?;
    fs::create_dir_all(out)?;
    let csv = out.join("posterior.csv");
    fs::write(&csv, report.to_csv())?;
    io::write_json(out.join("summary.json"), &report)?;

    let truth = report.truth_index.map(|i| report.hypotheses[i].clone());
    let passed = truth.as_ref().is_none_or(|t| *t == report.map_hypothesis);
    let opt = |x: Option<String>| x.unwrap_or_else(|| "-".into());
    let table = vec![
        row("hypotheses", report.hypotheses.join(", ")),
        row("truth", opt(truth.clone())),
        row("replicas", report.replicas.len().to_string()),
        row("trials", report.trials.to_string()),
        row("map_hypothesis", report.map_hypothesis.clone()),
        row("median_final_mass_truth", opt(report.median_final_mass_truth.map(|m| format!("{m:.4}")))),
        row(
            format!("median_trials_to_{}", report.threshold),
            opt(report.median_trials_to_threshold.map(|t| t.to_string())),
        ),
        row("posterior_csv", csv.display().to_string()),
        row("verdict", verdict(passed)),
    ];
    let summary = json!({
        "hypotheses": report.hypotheses,
        "truth": truth,
        "trials": report.trials,
        "threshold": report.threshold,
        "seeds": exp.seeds,
        "map_hypothesis": report.map_hypothesis,
        "median_final_mass_truth": report.median_final_mass_truth,
        "median_trials_to_threshold": report.median_trials_to_threshold,
        "final_mean_entropy": report.mean_entropy.last(),
        "posterior_csv": csv,
        "passed": passed,
    });
    Ok(Outcome { passed, report: summary, table })
}

fn suite(cli: &Cli, case: Option<&str>, tol: Option<f64>) -> Result<Outcome> {
    let opts = SuiteOptions { tol, seed: cli.seed.unwrap_or(0) };
    let report = run_suite(case, &opts)?;
    let mut table = Vec::new();
    for c in &report.cases {
        table.push(row(c.name.clone(), verdict(c.passed)));
        if let Some(e) = &c.error {
            table.push(row("  error", e.clone()));
        }
        for a in &c.assertions {
            let mark = if a.passed { "" } else { "  FAIL" };
            table.push(row(
                format!("  {}", a.name),
                format!("{} {:?} {}{mark}", sci(a.value), a.comparison, sci(a.threshold)),
            ));
        }
    }
    Ok(Outcome { passed: report.passed, report: serde_json::to_value(&report)?, table })
}
