//! Seeded experiment orchestration: a JSON [`ExperimentConfig`] names a
//! model and a list of tasks, [`run`] executes them in order and collects
//! bounds, identity checks, distances and per-task errors into an
//! [`ExperimentReport`].
//!
//! Task `k` (0-based, in declared order) draws from master seed
//! `derive_seed(config.seed, k)`. Together with the chunked streams of
//! [`crate::rng`] this makes every number in a report a function of the
//! config alone.

use crate::bounds::{
    self, be_iid_model, concentration_bound, dk_exchangeable, dtv_interpolation, dw_exchangeable, dw_indep,
    dw_zero_bias, BoundReport, DistanceKind, DistanceMode, GaussianFunctional, LinearFunctional,
    QuadraticFunctional, DEFAULT_QUAD_POINTS,
};
use crate::couplings::{zero_bias, ZeroBiasIndepSampler};
use crate::distances::{distances_mc, kolmogorov_exact, wasserstein_exact, EmpiricalSample};
use crate::distributions::{make_finite, standardize, FiniteDist, IndepSumModel, DEFAULT_STATE_CAP};
use crate::error::{Result, SteinError};
use crate::exchangeable::{
    antisymmetry_check, antisymmetry_exact, comb_law, example1_joint, example2_joint, generator_identity_exact,
    generator_identity_residual, pair_comb, pair_stats_exact, pair_stats_mc, regression_check,
    Adjustment, CombPairSampler, CombinatorialModel, IndepPairSampler, JointLaw, PairStats, Polynomial,
};
use crate::rng::{derive_seed, par_draws, stream};
use crate::stein_equation::{discrepancy_identity_check, TestFunction};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Minimum reps for any Monte Carlo task.
pub const MIN_REPS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSpec {
    pub atoms: Vec<f64>,
    pub masses: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomAdmissible {
    pub n: usize,
    pub seed: u64,
}

/// Which W to study. Independent-sum summands are centered and rescaled so
/// that Var W = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    IndepSum {
        /// `"rademacher"`: n iid ±1/√n summands.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        family: Option<String>,
        /// An iid summand law, standardized.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        law: Option<LawSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        /// Explicit (not necessarily identical) summand laws.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        components: Option<Vec<LawSpec>>,
    },
    Combinatorial {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix_path: Option<PathBuf>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        random_admissible: Option<RandomAdmissible>,
    },
    GaussianFunctional {
        /// `"linear"` (x₁) or `"quadratic"` ((|x|² − n)/√(2n)).
        g: String,
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// Knobs for individual tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TaskParams {
    /// Interval for the concentration task.
    pub a: f64,
    pub b: f64,
    pub reps_inner: usize,
    pub quad_points: usize,
    /// Quantile bins for Monte Carlo pair statistics; ⌈reps^{1/3}⌉ if unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    /// Enumeration cap for exact laws.
    pub state_cap: u64,
}

impl Default for TaskParams {
    fn default() -> Self {
        TaskParams {
            a: -0.25,
            b: 0.25,
            reps_inner: 100,
            quad_points: DEFAULT_QUAD_POINTS,
            bins: None,
            state_cap: DEFAULT_STATE_CAP as u64,
        }
    }
}

fn default_reps() -> usize {
    100_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub tasks: Vec<String>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    pub seed: u64,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default)]
    pub params: TaskParams,
}

/// The tasks [`run`] understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    DwIndep,
    BeIid,
    Concentration,
    DwZeroBias,
    KolmogorovExact,
    WassersteinExact,
    DistancesMc,
    Characterization,
    ZeroBiasIdentity,
    Regression,
    Antisymmetry,
    GeneratorIdentity,
    DwExchangeable,
    DkExchangeable,
    DtvInterpolation,
}

impl Task {
    pub const ALL: [Task; 15] = [
        Task::DwIndep,
        Task::BeIid,
        Task::Concentration,
        Task::DwZeroBias,
        Task::KolmogorovExact,
        Task::WassersteinExact,
        Task::DistancesMc,
        Task::Characterization,
        Task::ZeroBiasIdentity,
        Task::Regression,
        Task::Antisymmetry,
        Task::GeneratorIdentity,
        Task::DwExchangeable,
        Task::DkExchangeable,
        Task::DtvInterpolation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::DwIndep => "dw_indep",
            Task::BeIid => "be_iid",
            Task::Concentration => "concentration",
            Task::DwZeroBias => "dw_zero_bias",
            Task::KolmogorovExact => "kolmogorov_exact",
            Task::WassersteinExact => "wasserstein_exact",
            Task::DistancesMc => "distances_mc",
            Task::Characterization => "characterization",
            Task::ZeroBiasIdentity => "zero_bias_identity",
            Task::Regression => "regression",
            Task::Antisymmetry => "antisymmetry",
            Task::GeneratorIdentity => "generator_identity",
            Task::DwExchangeable => "dw_exchangeable",
            Task::DkExchangeable => "dk_exchangeable",
            Task::DtvInterpolation => "dtv_interpolation",
        }
    }

    pub fn parse(s: &str) -> Result<Task> {
        Task::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| SteinError::UnknownTask(s.to_string()))
    }

    /// Tasks that always sample.
    pub fn is_monte_carlo(self) -> bool {
        matches!(
            self,
            Task::DwZeroBias | Task::DistancesMc | Task::Antisymmetry | Task::GeneratorIdentity | Task::DtvInterpolation
        )
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text).map_err(|e| SteinError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SteinError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn parsed_tasks(&self) -> Result<Vec<Task>> {
        self.tasks.iter().map(|t| Task::parse(t)).collect()
    }

    /// Checks everything that can be checked without running a task.
    pub fn validate(&self) -> Result<()> {
        if self.tasks.is_empty() {
            return Err(SteinError::Config("task list is empty".into()));
        }
        let tasks = self.parsed_tasks()?;
        if tasks.iter().any(|t| t.is_monte_carlo()) && self.reps < MIN_REPS {
            return Err(SteinError::Config(format!("reps = {} < {MIN_REPS} for Monte Carlo tasks", self.reps)));
        }
        if self.threads == Some(0) {
            return Err(SteinError::Config("threads must be positive".into()));
        }
        Ok(())
    }
}

/// The model a config resolves to.
pub enum Model {
    Indep(IndepSumModel),
    Comb { model: CombinatorialModel, adjustment: Option<Adjustment> },
    Gauss(Box<dyn GaussianFunctional>),
}

impl Model {
    fn kind(&self) -> &'static str {
        match self {
            Model::Indep(_) => "indep_sum",
            Model::Comb { .. } => "combinatorial",
            Model::Gauss(_) => "gaussian_functional",
        }
    }

    fn describe(&self) -> String {
        match self {
            Model::Indep(m) => bounds::model_digest(m),
            Model::Comb { model, .. } => bounds::digest(&format!("combinatorial(n={})", model.n()), model.rows().concat()),
            Model::Gauss(g) => g.name(),
        }
    }

    /// Exchangeable-pair regression coefficient.
    fn lambda(&self) -> Option<f64> {
        match self {
            Model::Indep(m) => Some(1.0 / m.n() as f64),
            Model::Comb { model, .. } => Some(model.lambda()),
            Model::Gauss(_) => None,
        }
    }

    fn supports(&self, t: Task) -> bool {
        use Task::*;
        match self {
            Model::Indep(m) => match t {
                BeIid | Concentration => m.is_iid(),
                DtvInterpolation => false,
                _ => true,
            },
            Model::Comb { .. } => !matches!(t, DwIndep | BeIid | Concentration | DwZeroBias | ZeroBiasIdentity | DtvInterpolation),
            Model::Gauss(_) => matches!(t, DtvInterpolation | DistancesMc),
        }
    }
}

fn law_of(spec: &LawSpec) -> Result<FiniteDist> {
    make_finite(&spec.atoms, &spec.masses)
}

/// Resolves a [`ModelSpec`].
pub fn build_model(spec: &ModelSpec) -> Result<Model> {
    let cfg = |msg: &str| SteinError::Config(msg.to_string());
    match spec {
        ModelSpec::IndepSum { family, law, n, components } => {
            let m = match (family.as_deref(), law, n, components) {
                (Some("rademacher"), None, Some(n), None) if *n > 0 => IndepSumModel::rademacher(*n),
                (Some(f), None, _, None) => return Err(cfg(&format!("unknown family `{f}` or missing n"))),
                (None, Some(l), Some(n), None) if *n > 0 => {
                    standardize(&IndepSumModel::iid(law_of(l)?.centered(), *n)?)?
                }
                (None, None, None, Some(cs)) if !cs.is_empty() => {
                    let comps = cs.iter().map(|c| law_of(c).map(|d| d.centered())).collect::<Result<Vec<_>>>()?;
                    standardize(&IndepSumModel::new(comps)?)?
                }
                _ => return Err(cfg("indep_sum needs exactly one of {family + n, law + n, components}")),
            };
            Ok(Model::Indep(m))
        }
        ModelSpec::Combinatorial { matrix_path, random_admissible } => match (matrix_path, random_admissible) {
            (Some(p), None) => {
                let (model, adj) = CombinatorialModel::load(p).map_err(|e| SteinError::Config(format!("{}: {e}", p.display())))?;
                Ok(Model::Comb { model, adjustment: Some(adj) })
            }
            (None, Some(r)) => Ok(Model::Comb { model: random_admissible_matrix(r.n, r.seed)?, adjustment: None }),
            _ => Err(cfg("combinatorial needs exactly one of {matrix_path, random_admissible}")),
        },
        ModelSpec::GaussianFunctional { g, n } => {
            if *n == 0 {
                return Err(cfg("gaussian_functional needs n ≥ 1"));
            }
            let g: Box<dyn GaussianFunctional> = match g.as_str() {
                "linear" => Box::new(LinearFunctional::first_coordinate(*n)),
                "quadratic" => Box::new(QuadraticFunctional { n: *n }),
                other => return Err(cfg(&format!("unknown gaussian functional `{other}`"))),
            };
            Ok(Model::Gauss(g))
        }
    }
}

/// A uniform random array, double-centered and scaled to Var W = 1 with
/// Var W = Σ c²/(n − 1).
pub fn random_admissible_matrix(n: usize, seed: u64) -> Result<CombinatorialModel> {
    if n < 2 {
        return Err(SteinError::Matrix(format!("need n ≥ 2, got {n}")));
    }
    let mut rng = stream(seed, 0);
    let rows = (0..n).map(|_| (0..n).map(|_| rng.gen::<f64>()).collect()).collect();
    Ok(CombinatorialModel::admissible_from(rows)?.0)
}

/// One identity residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub task: String,
    pub name: String,
    pub residual: f64,
    /// Present for Monte Carlo checks, which pass within 3 SE.
    pub std_err: Option<f64>,
    /// Absolute tolerance for exact checks.
    pub tolerance: Option<f64>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
}

impl IdentityCheck {
    fn exact(task: Task, name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        IdentityCheck {
            task: task.name().into(),
            name: name.into(),
            residual,
            std_err: None,
            tolerance: Some(tolerance),
            passed: residual.abs() <= tolerance,
            seed: None,
            reps: None,
        }
    }

    fn mc(task: Task, name: impl Into<String>, e: crate::rng::Estimate) -> Self {
        IdentityCheck {
            task: task.name().into(),
            name: name.into(),
            residual: e.mean,
            std_err: Some(e.std_err),
            tolerance: None,
            passed: e.within(0.0, 3.0),
            seed: Some(e.seed),
            reps: Some(e.reps),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceEntry {
    pub task: String,
    pub kind: DistanceKind,
    pub value: f64,
    pub mode: DistanceMode,
    /// DKW half-width at α = 0.01 for Monte Carlo d_K.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dkw_width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskError {
    pub task: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub kind: String,
    pub digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adjustment: Option<Adjustment>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub threads: usize,
    pub model: ModelSummary,
    pub bounds: Vec<BoundReport>,
    pub checks: Vec<IdentityCheck>,
    pub distances: Vec<DistanceEntry>,
    pub errors: Vec<TaskError>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_secs: Option<f64>,
}

impl ExperimentReport {
    /// Pretty JSON including wall time.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Pretty JSON without wall time; identical across re-runs of a config.
    pub fn to_json_deterministic(&self) -> Result<String> {
        let mut r = self.clone();
        r.wall_time_secs = None;
        r.to_json()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        bounds::write_records(&self.bounds, &mut buf)?;
        Ok(String::from_utf8(buf).expect("csv is utf-8"))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    /// Some bound failed against an exactly computed distance.
    pub fn has_exact_violation(&self) -> bool {
        self.bounds.iter().any(BoundReport::exact_violation)
    }

    pub fn all_checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Lazily computed exact objects shared between tasks.
struct Ctx<'a> {
    model: &'a Model,
    cfg: &'a ExperimentConfig,
    law: Option<Result<FiniteDist>>,
    joint: Option<Result<JointLaw>>,
}

impl Ctx<'_> {
    fn cap(&self) -> u128 {
        self.cfg.params.state_cap as u128
    }

    fn exact_law(&mut self) -> Result<&FiniteDist> {
        if self.law.is_none() {
            let cap = self.cap();
            self.law = Some(match self.model {
                Model::Indep(m) => crate::distributions::convolve_all(m.components(), cap),
                Model::Comb { model, .. } => comb_law(model, cap),
                Model::Gauss(_) => Err(SteinError::TaskMismatch { task: "exact law".into(), model: "gaussian_functional".into() }),
            });
        }
        match self.law.as_ref().unwrap() {
            Ok(l) => Ok(l),
            Err(e) => Err(SteinError::Config(format!("exact law unavailable: {e}"))),
        }
    }

    fn joint(&mut self) -> Result<&JointLaw> {
        if self.joint.is_none() {
            let cap = self.cap();
            self.joint = Some(match self.model {
                Model::Indep(m) => example1_joint(m, cap),
                Model::Comb { model, .. } => example2_joint(model, cap),
                Model::Gauss(_) => Err(SteinError::TaskMismatch { task: "pair".into(), model: "gaussian_functional".into() }),
            });
        }
        match self.joint.as_ref().unwrap() {
            Ok(j) => Ok(j),
            Err(e) => Err(SteinError::Config(format!("joint law unavailable: {e}"))),
        }
    }

    fn sample_w(&self, reps: usize, seed: u64) -> Result<EmpiricalSample> {
        let values = match self.model {
            Model::Indep(m) => par_draws(reps, seed, |r| m.sample_sum(r)),
            Model::Comb { model, .. } => par_draws(reps, seed, |r| pair_comb(model, r).0),
            Model::Gauss(g) => par_draws(reps, seed, |r| {
                let mut x = vec![0.0; g.dim()];
                bounds::gaussian_vector(r, &mut x);
                g.value(&x)
            }),
        };
        EmpiricalSample::new(values, Some(seed), format!("{} draws of W", self.model.kind()))
    }

    /// Attaches the exact distance when the law is enumerable, otherwise an
    /// MC estimate from `reps` fresh draws.
    fn attach_distance(&mut self, r: BoundReport, seed: u64) -> Result<BoundReport> {
        if let Ok(law) = self.exact_law() {
            return Ok(r.with_exact_law(law));
        }
        let s = self.sample_w(self.cfg.reps.max(MIN_REPS), seed)?;
        r.with_mc(&s)
    }

    fn pair_stats(&mut self, seed: u64) -> Result<PairStats> {
        let lambda = self.model.lambda().expect("pair model");
        if let Ok(j) = self.joint() {
            return pair_stats_exact(j, lambda);
        }
        let reps = self.cfg.reps;
        let bins = self.cfg.params.bins;
        match self.model {
            Model::Indep(m) => pair_stats_mc(&IndepPairSampler(m.clone()), lambda, reps, seed, bins),
            Model::Comb { model, .. } => pair_stats_mc(&CombPairSampler(model.clone()), lambda, reps, seed, bins),
            Model::Gauss(_) => unreachable!(),
        }
    }
}

/// Executes one task, appending its outputs to `out`.
fn run_task(ctx: &mut Ctx<'_>, task: Task, seed: u64, out: &mut ExperimentReport) -> Result<()> {
    let reps = ctx.cfg.reps;
    match (task, ctx.model) {
        (Task::DwIndep, Model::Indep(m)) => {
            let r = dw_indep(m)?;
            out.bounds.push(ctx.attach_distance(r, seed)?);
        }
        (Task::BeIid, Model::Indep(m)) => {
            let r = be_iid_model(m)?;
            out.bounds.push(ctx.attach_distance(r, seed)?);
        }
        (Task::Concentration, Model::Indep(m)) => {
            out.bounds.push(concentration_bound(m, ctx.cfg.params.a, ctx.cfg.params.b)?);
        }
        (Task::DwZeroBias, Model::Indep(m)) => {
            let s = ZeroBiasIndepSampler::new(m)?;
            let r = dw_zero_bias(&s, reps, seed)?;
            let mut r = ctx.attach_distance(r, derive_seed(seed, 1))?;
            r.extras.insert("exact_bound".into(), 2.0 * s.exact_mean_abs_gap());
            out.bounds.push(r);
        }
        (Task::KolmogorovExact | Task::WassersteinExact, _) => {
            let law = ctx.exact_law()?;
            let (kind, value) = if task == Task::KolmogorovExact {
                (DistanceKind::Kolmogorov, kolmogorov_exact(law))
            } else {
                (DistanceKind::Wasserstein, wasserstein_exact(law))
            };
            out.distances.push(DistanceEntry { task: task.name().into(), kind, value, mode: DistanceMode::Exact, dkw_width: None });
        }
        (Task::DistancesMc, _) => {
            let s = ctx.sample_w(reps, seed)?;
            let mc = distances_mc(&s)?;
            let mode = |se| DistanceMode::MonteCarlo { reps, seed: Some(seed), std_err: se };
            out.distances.push(DistanceEntry {
                task: task.name().into(),
                kind: DistanceKind::Kolmogorov,
                value: mc.d_k,
                mode: mode(mc.d_k_std_err),
                dkw_width: Some(mc.dkw_width),
            });
            out.distances.push(DistanceEntry {
                task: task.name().into(),
                kind: DistanceKind::Wasserstein,
                value: mc.d_w,
                mode: mode(mc.d_w_std_err + mc.dw_grid_bias),
                dkw_width: None,
            });
        }
        (Task::Characterization, Model::Indep(_) | Model::Comb { .. }) => {
            let law = ctx.exact_law()?.clone();
            let tests = [
                TestFunction::indicator(0.0),
                TestFunction::indicator(0.5),
                TestFunction::abs(),
                TestFunction::cos(),
                TestFunction::smoothed_interval(-0.5, 0.5, 0.25),
            ];
            for h in &tests {
                let (lhs, rhs) = discrepancy_identity_check(&law, h)?;
                out.checks.push(IdentityCheck::exact(task, format!("discrepancy[{}]", h.name), lhs - rhs, 1e-7));
            }
        }
        (Task::ZeroBiasIdentity, Model::Indep(_)) => {
            let law = ctx.exact_law()?;
            let z = zero_bias(law)?;
            for k in 1..=5 {
                let (l, r) = z.identity_sides(|x| x.powi(k));
                out.checks.push(IdentityCheck::exact(task, format!("zero_bias[w^{k}]"), l - r, 1e-9));
            }
        }
        (Task::Regression, Model::Indep(_) | Model::Comb { .. }) => {
            let lambda = ctx.model.lambda().unwrap();
            let j = ctx.joint()?;
            out.checks.push(IdentityCheck::exact(task, format!("regression[lambda={lambda}]"), regression_check(j, lambda), 1e-10));
            let s = pair_stats_exact(j, lambda)?;
            out.checks.push(IdentityCheck::exact(task, "mean_sq_diff - 2 lambda", s.mean_sq_diff - 2.0 * lambda, 1e-10));
            out.checks.push(IdentityCheck::exact(task, "swap_asymmetry", j.swap_asymmetry(), 1e-12));
        }
        (Task::Antisymmetry, Model::Indep(_) | Model::Comb { .. }) => {
            let f = |w: f64| w * w;
            if let Ok(j) = ctx.joint() {
                out.checks.push(IdentityCheck::exact(task, "antisymmetry_exact[w^2]", antisymmetry_exact(j, f), 1e-12));
            }
            let e = match ctx.model {
                Model::Indep(m) => antisymmetry_check(&IndepPairSampler(m.clone()), f, reps, seed),
                Model::Comb { model, .. } => antisymmetry_check(&CombPairSampler(model.clone()), f, reps, seed),
                Model::Gauss(_) => unreachable!(),
            };
            out.checks.push(IdentityCheck::mc(task, "antisymmetry[w^2]", e));
        }
        (Task::GeneratorIdentity, Model::Indep(_) | Model::Comb { .. }) => {
            let lambda = ctx.model.lambda().unwrap();
            let f = Polynomial(vec![0.0, 0.0, 0.0, 1.0]);
            if let Ok(j) = ctx.joint() {
                out.checks.push(IdentityCheck::exact(task, "generator_exact[w^3]", generator_identity_exact(j, &f, lambda), 1e-10));
            }
            let e = match ctx.model {
                Model::Indep(m) => generator_identity_residual(&IndepPairSampler(m.clone()), &f, lambda, reps, seed),
                Model::Comb { model, .. } => generator_identity_residual(&CombPairSampler(model.clone()), &f, lambda, reps, seed),
                Model::Gauss(_) => unreachable!(),
            };
            out.checks.push(IdentityCheck::mc(task, "generator[w^3]", e));
        }
        (Task::DwExchangeable | Task::DkExchangeable, Model::Indep(_) | Model::Comb { .. }) => {
            let stats = ctx.pair_stats(seed)?;
            let r = if task == Task::DwExchangeable { dw_exchangeable(&stats)? } else { dk_exchangeable(&stats)? };
            out.bounds.push(ctx.attach_distance(r, derive_seed(seed, 1))?);
        }
        (Task::DtvInterpolation, Model::Gauss(g)) => {
            let p = &ctx.cfg.params;
            out.bounds.push(dtv_interpolation(g.as_ref(), reps, p.reps_inner, p.quad_points, seed)?);
        }
        (t, m) => return Err(SteinError::TaskMismatch { task: t.name().into(), model: m.kind().into() }),
    }
    Ok(())
}

/// Runs every task of a validated config in order. Configuration problems
/// (unknown tasks, a task that does not fit the model) are returned as
/// errors; failures inside a task are recorded and the run continues.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let tasks = config.parsed_tasks()?;
    let model = build_model(&config.model)?;
    for &t in &tasks {
        if !model.supports(t) {
            return Err(SteinError::TaskMismatch { task: t.name().into(), model: model.kind().into() });
        }
    }
    let threads = config.threads.unwrap_or_else(rayon::current_num_threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| SteinError::Config(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let adjustment = match &model {
        Model::Comb { adjustment, .. } => *adjustment,
        _ => None,
    };
    let mut report = ExperimentReport {
        version: VERSION.to_string(),
        config: config.clone(),
        threads,
        model: ModelSummary { kind: model.kind().into(), digest: model.describe(), adjustment },
        bounds: Vec::new(),
        checks: Vec::new(),
        distances: Vec::new(),
        errors: Vec::new(),
        wall_time_secs: None,
    };
    pool.install(|| {
        let mut ctx = Ctx { model: &model, cfg: config, law: None, joint: None };
        for (k, &t) in tasks.iter().enumerate() {
            if let Err(e) = run_task(&mut ctx, t, derive_seed(config.seed, k as u64), &mut report) {
                report.errors.push(TaskError { task: t.name().into(), message: e.to_string() });
            }
        }
    });
    report.wall_time_secs = Some(start.elapsed().as_secs_f64());
    Ok(report)
}

/// Exact-or-MC bound rows for the iid Rademacher family at each n:
/// be_iid against d_K, dw_indep against d_W and the zero-bias bound
/// (`reps` coupled draws) against d_W.
pub fn be_sweep(ns: &[usize], reps: usize, seed: u64, cap: u128) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for (k, &n) in ns.iter().enumerate() {
        if n == 0 {
            return Err(SteinError::Config("n must be positive".into()));
        }
        let m = IndepSumModel::rademacher(n);
        let task_seed = derive_seed(seed, k as u64);
        let law = crate::distributions::convolve_all(m.components(), cap).ok();
        let sample = if law.is_none() {
            Some(EmpiricalSample::new(par_draws(reps, derive_seed(task_seed, 1), |r| m.sample_sum(r)), Some(seed), format!("rademacher(n={n})"))?)
        } else {
            None
        };
        let attach = |r: BoundReport| -> Result<BoundReport> {
            match (&law, &sample) {
                (Some(l), _) => Ok(r.with_exact_law(l)),
                (None, Some(s)) => r.with_mc(s),
                _ => unreachable!(),
            }
        };
        out.push(attach(be_iid_model(&m)?)?);
        out.push(attach(dw_indep(&m)?)?);
        let zb = ZeroBiasIndepSampler::new(&m)?;
        out.push(attach(dw_zero_bias(&zb, reps, task_seed)?)?);
    }
    Ok(out)
}

/// Convenience for tests and the CLI: an iid Rademacher model of size n.
pub fn rademacher_spec(n: usize) -> ModelSpec {
    ModelSpec::IndepSum { family: Some("rademacher".into()), law: None, n: Some(n), components: None }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(model: ModelSpec, tasks: &[&str]) -> ExperimentConfig {
        ExperimentConfig {
            model,
            tasks: tasks.iter().map(|s| s.to_string()).collect(),
            reps: 10_000,
            seed: 7,
            output: OutputSpec::default(),
            threads: Some(1),
            params: TaskParams::default(),
        }
    }

    #[test]
    fn headline_example() {
        let r = run(&cfg(rademacher_spec(100), &["dw_indep", "be_iid", "kolmogorov_exact"])).unwrap();
        assert!(r.errors.is_empty(), "{:?}", r.errors);
        assert!((r.bounds[0].bound_value - 0.3).abs() < 1e-14);
        assert!((r.bounds[1].bound_value - 0.65).abs() < 1e-14);
        assert!(r.bounds.iter().all(|b| b.dominates == Some(true)));
        assert_eq!(r.distances.len(), 1);
        assert_eq!(r.bounds[1].empirical_distance, Some(r.distances[0].value));
    }

    #[test]
    fn config_errors() {
        let mut c = cfg(rademacher_spec(10), &[]);
        assert!(matches!(c.validate(), Err(SteinError::Config(_))));
        c.tasks = vec!["nope".into()];
        assert!(matches!(c.validate(), Err(SteinError::UnknownTask(_))));
        c.tasks = vec!["distances_mc".into()];
        c.reps = 10;
        assert!(c.validate().is_err());
        let c = cfg(ModelSpec::GaussianFunctional { g: "linear".into(), n: 3 }, &["be_iid"]);
        assert!(matches!(run(&c), Err(SteinError::TaskMismatch { .. })));
        let mixed = ModelSpec::IndepSum {
            family: None,
            law: None,
            n: None,
            components: Some(vec![
                LawSpec { atoms: vec![-1.0, 1.0], masses: vec![0.5, 0.5] },
                LawSpec { atoms: vec![-1.0, 2.0], masses: vec![2.0, 1.0] },
            ]),
        };
        assert!(matches!(run(&cfg(mixed, &["be_iid"])), Err(SteinError::TaskMismatch { .. })));
        assert!(ExperimentConfig::from_json(r#"{"model":{"type":"indep_sum","family":"rademacher","n":4},"tasks":["dw_indep"]}"#).is_err());
    }

    #[test]
    fn failures_are_isolated() {
        let mut c = cfg(rademacher_spec(4), &["concentration", "dw_indep"]);
        c.params.a = 1.0;
        c.params.b = 0.0;
        let r = run(&c).unwrap();
        assert_eq!(r.errors.len(), 1);
        assert_eq!(r.errors[0].task, "concentration");
        assert_eq!(r.bounds.len(), 1);
    }

    #[test]
    fn deterministic_across_runs_and_threads() {
        let tasks = ["dw_zero_bias", "distances_mc", "antisymmetry", "generator_identity", "dw_exchangeable"];
        let mut c = cfg(rademacher_spec(30), &tasks);
        let a = run(&c).unwrap().to_json_deterministic().unwrap();
        let b = run(&c).unwrap().to_json_deterministic().unwrap();
        assert_eq!(a, b);
        c.threads = Some(3);
        let r3 = run(&c).unwrap();
        let mut r3 = r3.clone();
        r3.threads = 1;
        r3.config.threads = Some(1);
        assert_eq!(a, r3.to_json_deterministic().unwrap());
    }

    #[test]
    fn random_admissible_matrix_properties() {
        let m = random_admissible_matrix(5, 3).unwrap();
        for i in 0..5 {
            assert!((0..5).map(|j| m.c(i, j)).sum::<f64>().abs() <= 1e-12);
            assert!((0..5).map(|j| m.c(j, i)).sum::<f64>().abs() <= 1e-12);
        }
        let law = comb_law(&m, 1000).unwrap();
        assert!((law.moments().variance - 1.0).abs() < 1e-8);
        assert_eq!(m, random_admissible_matrix(5, 3).unwrap());
        assert!(random_admissible_matrix(1, 3).is_err());
    }

    #[test]
    fn combinatorial_tasks() {
        let spec = ModelSpec::Combinatorial { matrix_path: None, random_admissible: Some(RandomAdmissible { n: 5, seed: 2 }) };
        let r = run(&cfg(spec, &["regression", "antisymmetry", "dw_exchangeable", "dk_exchangeable", "characterization"])).unwrap();
        assert!(r.errors.is_empty(), "{:?}", r.errors);
        assert!(r.all_checks_passed(), "{:?}", r.checks);
        assert!(!r.has_exact_violation());
    }
}
