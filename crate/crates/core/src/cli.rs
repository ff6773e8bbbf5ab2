//! Scenario runner: `renorm-lab run <scenario.json> [--out DIR] [--seed N]`.
//!
//! A scenario names a space, a group, the construction parameters and a
//! list of tasks. Each task writes one JSON report; `summary.json` lists
//! them. Exit codes: 0 when every assertion passes, 1 when one fails, 2 on
//! input errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounded::{cap_trace, conjugate, group_norm, m_weight, BoundedSettings};
use crate::detector::{certify, Verdict};
use crate::error::ScenarioError;
use crate::functions::{lipschitz, random_tents};
use crate::gallery;
use crate::norm::{build_matrix, delta_cross_check, dual_decompose, solve_unit, triple_norm, RenormConfig, RenormSettings};
use crate::operators::{check_sot_convergence, compose, GroupSpec, SotOptions, WeightedComposition};
use crate::space::{builtin_space, BuiltinSpace, SampledSpace, SpaceDocument};
use crate::tuples::choose_parameters;

#[derive(Parser, Debug)]
#[command(name = "renorm-lab", version, about = "Lattice renormings of C0(X) on finite samples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario file and write one report per task.
    Run {
        scenario: PathBuf,
        /// Report directory (default: `reports` next to the scenario).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print a space summary and, optionally, the m_G report of a group.
    Inspect {
        /// Builtin name or space document.
        #[arg(long)]
        space: String,
        /// Group document (JSON `GroupSpec`).
        #[arg(long)]
        bounded_group: Option<PathBuf>,
        #[arg(long)]
        mg_report: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceRef {
    /// Builtin name, or a path to a space document.
    Name(String),
    Builtin(BuiltinSpace),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupRef {
    Trivial,
    Rotation { q: usize },
    /// Swaps of the onepoint01N sample; `n_max` defaults to the whole sample.
    Onepoint { n_max: Option<usize>, word_cap: usize },
    File { path: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteOptions {
    #[serde(default = "d_functions")]
    pub functions: usize,
    #[serde(default = "d_radius_range")]
    pub radius_range: (f64, f64),
    #[serde(default = "d_dual_tuples")]
    pub dual_tuples: usize,
    pub test_depth: Option<u64>,
    #[serde(default = "d_sot_count")]
    pub sot_count: usize,
    #[serde(default = "d_bounded_functions")]
    pub bounded_functions: usize,
    #[serde(default = "d_weight_bound")]
    pub weight_bound: f64,
}

fn d_functions() -> usize {
    20
}
fn d_radius_range() -> (f64, f64) {
    (0.2, 2.0)
}
fn d_dual_tuples() -> usize {
    20
}
fn d_sot_count() -> usize {
    51
}
fn d_bounded_functions() -> usize {
    50
}
fn d_weight_bound() -> f64 {
    1e6
}

impl Default for SuiteOptions {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

fn d_c() -> f64 {
    1.1
}
fn d_depth() -> u64 {
    6
}
fn d_gamma_cap() -> u32 {
    16
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub space: SpaceRef,
    pub group: GroupRef,
    #[serde(default = "d_c")]
    pub c: f64,
    #[serde(default = "d_depth")]
    pub depth: u64,
    #[serde(default = "d_gamma_cap")]
    pub gamma_cap: u32,
    pub word_cap: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tasks: Vec<String>,
    #[serde(default)]
    pub options: SuiteOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorRef {
    Identity,
    Translation(f64),
    Scale(f64),
    Rotation(i64),
    Flip,
    /// First generator composed with the interval flip.
    RotationFlip,
    /// Element of the expanded group by index.
    Word(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Task {
    BuildConfig,
    VerifyBmap,
    NormSuite,
    DualSuite,
    Detect(OperatorRef),
    SotGallery,
    BoundedSuite,
}

impl Task {
    pub fn parse(s: &str) -> Result<Task, String> {
        let s = s.trim();
        Ok(match s {
            "build-config" => Task::BuildConfig,
            "verify-bmap" => Task::VerifyBmap,
            "norm-suite" => Task::NormSuite,
            "dual-suite" => Task::DualSuite,
            "sot-gallery" => Task::SotGallery,
            "bounded-suite" => Task::BoundedSuite,
            _ => match s.strip_prefix("detect ") {
                Some(op) => Task::Detect(parse_operator(op.trim())?),
                None => return Err(format!("unknown task {s:?}")),
            },
        })
    }

    pub fn slug(&self) -> &'static str {
        match self {
            Task::BuildConfig => "build-config",
            Task::VerifyBmap => "verify-bmap",
            Task::NormSuite => "norm-suite",
            Task::DualSuite => "dual-suite",
            Task::Detect(_) => "detect",
            Task::SotGallery => "sot-gallery",
            Task::BoundedSuite => "bounded-suite",
        }
    }
}

fn parse_operator(s: &str) -> Result<OperatorRef, String> {
    let arg = |name: &str| -> Option<&str> { s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')').map(str::trim) };
    let bad = |e: &dyn std::fmt::Display| format!("operator {s:?}: {e}");
    Ok(match s {
        "identity" => OperatorRef::Identity,
        "flip" => OperatorRef::Flip,
        "rotation-flip" => OperatorRef::RotationFlip,
        _ => {
            if let Some(a) = arg("translation") {
                OperatorRef::Translation(a.parse().map_err(|e| bad(&e))?)
            } else if let Some(a) = arg("scale") {
                OperatorRef::Scale(a.parse().map_err(|e| bad(&e))?)
            } else if let Some(a) = arg("rotation") {
                OperatorRef::Rotation(a.parse().map_err(|e| bad(&e))?)
            } else if let Some(a) = arg("word") {
                OperatorRef::Word(a.parse().map_err(|e| bad(&e))?)
            } else {
                return Err(format!("unknown operator {s:?}"));
            }
        }
    })
}

fn input(path: &Path, message: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Input { path: path.display().to_string(), message: message.to_string() }
}

fn read(path: &Path) -> Result<String, ScenarioError> {
    fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        let sc: Scenario = serde_json::from_str(&read(path)?).map_err(|e| input(path, e))?;
        sc.validate().map_err(|m| input(path, m))?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<Vec<Task>, String> {
        choose_parameters(self.c).map_err(|e| e.to_string())?;
        if self.depth < 2 {
            return Err("depth must be at least 2".into());
        }
        self.tasks
            .iter()
            .enumerate()
            .map(|(i, t)| Task::parse(t).map_err(|e| format!("tasks[{i}]: {e}")))
            .collect()
    }
}

pub fn load_space(r: &SpaceRef, base: &Path) -> Result<SampledSpace, ScenarioError> {
    match r {
        SpaceRef::Builtin(b) => Ok(builtin_space(b)?),
        SpaceRef::Name(name) => match BuiltinSpace::from_name(name) {
            Ok(b) => Ok(builtin_space(&b)?),
            Err(_) => {
                let path = base.join(name);
                let doc: SpaceDocument = serde_json::from_str(&read(&path)?).map_err(|e| input(&path, e))?;
                SampledSpace::new(doc).map_err(|e| input(&path, e))
            }
        },
    }
}

pub fn load_group_file(path: &Path, space: &SampledSpace) -> Result<GroupSpec, ScenarioError> {
    let g: GroupSpec = serde_json::from_str(&read(path)?).map_err(|e| input(path, e))?;
    let g = GroupSpec::new(g.generators, g.word_cap, g.relatively_closed).map_err(|e| input(path, e))?;
    g.validate(space).map_err(|e| input(path, e))?;
    Ok(g)
}

fn load_group(r: &GroupRef, space: &SampledSpace, base: &Path) -> Result<GroupSpec, ScenarioError> {
    let circle = space.name().starts_with("circle");
    match r {
        GroupRef::Trivial => Ok(GroupSpec::trivial(space)),
        GroupRef::Rotation { q } => {
            if !circle || *q == 0 {
                return Err(input(base, format!("rotation group of order {q} needs a circle sample")));
            }
            Ok(gallery::rotation_group(space, *q))
        }
        GroupRef::Onepoint { n_max, word_cap } => {
            if space.name() != "onepoint01N" {
                return Err(input(base, "onepoint group needs the onepoint01N space"));
            }
            let levels = (space.len() - 1) / 2;
            let n = n_max.unwrap_or(levels);
            if n < 1 || n > levels || *word_cap < 1 {
                return Err(input(base, format!("onepoint group n_max {n}, word cap {word_cap} out of range")));
            }
            Ok(gallery::onepoint_group(space, n, *word_cap))
        }
        GroupRef::File { path } => load_group_file(&base.join(path), space),
    }
}

/// Parameters needed to replay every number in a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub space: String,
    pub points: usize,
    pub resolution: f64,
    pub c: f64,
    pub lambda_rule: String,
    pub big_l: u64,
    pub depth: u64,
    pub gamma_cap: u32,
    pub word_cap: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub task: String,
    pub pass: bool,
    pub failures: Vec<String>,
    pub provenance: Provenance,
    pub details: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub task: String,
    pub file: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub provenance: Provenance,
    pub tasks: Vec<SummaryEntry>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub summary: Summary,
    pub reports: Vec<TaskReport>,
}

struct Runner<'a> {
    sc: &'a Scenario,
    space: SampledSpace,
    group: GroupSpec,
    seed: u64,
    cfg: Option<Result<RenormConfig, String>>,
}

#[derive(Default)]
struct Outcome {
    failures: Vec<String>,
    details: serde_json::Map<String, Value>,
}

impl Outcome {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn put(&mut self, key: &str, v: impl Serialize) {
        self.details.insert(key.into(), serde_json::to_value(v).expect("serialisable report"));
    }
}

impl Runner<'_> {
    fn cfg(&mut self) -> Result<&RenormConfig, String> {
        if self.cfg.is_none() {
            let settings = RenormSettings {
                c: self.sc.c,
                depth: self.sc.depth,
                gamma_cap: self.sc.gamma_cap,
                word_cap: None,
            };
            self.cfg = Some(RenormConfig::build(self.space.clone(), self.group.clone(), &settings).map_err(|e| e.to_string()));
        }
        self.cfg.as_ref().expect("built").as_ref().map_err(Clone::clone)
    }

    fn provenance(&self) -> Provenance {
        let p = choose_parameters(self.sc.c).expect("validated");
        Provenance {
            space: self.space.name().to_string(),
            points: self.space.len(),
            resolution: self.space.resolution(),
            c: p.c,
            lambda_rule: p.lambda_rule,
            big_l: p.big_l,
            depth: self.sc.depth,
            gamma_cap: self.sc.gamma_cap,
            word_cap: self.group.word_cap,
            seed: self.seed,
        }
    }

    fn rng(&self, index: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(1_000_003).wrapping_add(index as u64))
    }

    fn run_task(&mut self, index: usize, task: &Task) -> Outcome {
        let mut out = Outcome::default();
        let res = match task {
            Task::BuildConfig => self.build_config(&mut out),
            Task::VerifyBmap => self.verify_bmap(&mut out),
            Task::NormSuite => self.norm_suite(index, &mut out),
            Task::DualSuite => self.dual_suite(&mut out),
            Task::Detect(op) => self.detect(op, &mut out),
            Task::SotGallery => self.sot_gallery(&mut out),
            Task::BoundedSuite => self.bounded_suite(index, &mut out),
        };
        if let Err(e) = res {
            out.failures.push(e);
        }
        out
    }

    fn build_config(&mut self, out: &mut Outcome) -> Result<(), String> {
        let cfg = self.cfg()?;
        out.put("config", cfg.summary());
        Ok(())
    }

    fn verify_bmap(&mut self, out: &mut Outcome) -> Result<(), String> {
        let report = self.cfg()?.bmap_report().clone();
        for p in report.properties.iter().filter(|p| !p.pass) {
            out.failures.push(format!("property {} fails: {}", p.property, p.violation.as_deref().unwrap_or("")));
        }
        out.put("bmap", report);
        Ok(())
    }

    fn norm_suite(&mut self, index: usize, out: &mut Outcome) -> Result<(), String> {
        let mut rng = self.rng(index);
        let opts = self.sc.options.clone();
        let cfg = self.cfg()?;
        let c = cfg.params().c;
        let res = cfg.space().resolution();
        let gens = &cfg.group().generators;
        let mut rows = Vec::new();
        let mut worst_ratio: f64 = 0.0;
        let mut worst_slack = f64::INFINITY;
        for k in 0..opts.functions {
            let x = random_tents(cfg.space(), &mut rng, 4, opts.radius_range).eval(cfg.space());
            let nv = triple_norm(&x, cfg);
            let s = nv.sup_norm;
            out.check(s <= nv.value, || format!("function {k}: sup {s} exceeds value {}", nv.value));
            out.check(nv.upper <= c * s * (1.0 + 1e-12), || format!("function {k}: upper {} exceeds C sup {}", nv.upper, c * s));
            if s > 0.0 {
                worst_ratio = worst_ratio.max(nv.truncation_bound / s);
            }
            let mut invariance = Vec::new();
            if !gens.is_empty() {
                let lip = lipschitz(cfg.space(), &x);
                for g in gens {
                    let ng = triple_norm(&g.apply(&x), cfg);
                    let diff = (ng.value - nv.value).abs();
                    let bound = 4.0 * lip * res + nv.truncation_bound + ng.truncation_bound;
                    worst_slack = worst_slack.min(bound - diff);
                    out.check(diff <= bound, || format!("function {k}, generator {}: |gx - x| = {diff} > {bound}", g.label()));
                    invariance.push(json!({"generator": g.label(), "difference": diff, "bound": bound}));
                }
            }
            rows.push(json!({
                "sup_norm": s,
                "value": nv.value,
                "upper": nv.upper,
                "truncation_bound": nv.truncation_bound,
                "gamma_truncated": nv.gamma_truncated,
                "invariance": invariance,
            }));
        }
        out.put("functions", rows);
        out.put("max_truncation_ratio", worst_ratio);
        if worst_slack.is_finite() {
            out.put("min_invariance_slack", worst_slack);
        }
        Ok(())
    }

    fn dual_suite(&mut self, out: &mut Outcome) -> Result<(), String> {
        let n_tuples = self.sc.options.dual_tuples;
        let cfg = self.cfg()?;
        let mut rows = Vec::new();
        for t in cfg.tuples().into_iter().filter(|t| t.n() <= 2).take(n_tuples) {
            let sys = build_matrix(&t, cfg).map_err(|e| e.to_string())?;
            let a = solve_unit(&sys).map_err(|e| format!("{t}: {e}"))?;
            let resid = sys.apply(&a).iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
            out.check(resid <= 1e-12, || format!("{t}: residual {resid}"));
            let beta = vec![1.1; a.len()];
            let d = dual_decompose(&beta, &sys).map_err(|e| format!("{t}: {e}"))?;
            let gap = (d.alpha_sum - d.beta_dot_unit).abs();
            out.check(gap <= 1e-10, || format!("{t}: alpha sum differs from beta . a by {gap}"));
            rows.push(json!({"tuple": t.to_string(), "unit": a, "residual": resid, "alpha": d.alpha, "identity_gap": gap}));
        }
        let mut deltas = Vec::new();
        for &p in cfg.base_points() {
            let d = delta_cross_check(p, cfg).map_err(|e| e.to_string())?;
            out.check(d.lower <= d.analytic * (1.0 + 1e-12), || format!("delta at {p}: lower {} above {}", d.lower, d.analytic));
            deltas.push(d);
        }
        out.put("tuples", rows);
        out.put("deltas", deltas);
        Ok(())
    }

    fn detect(&mut self, op: &OperatorRef, out: &mut Outcome) -> Result<(), String> {
        let test_depth = self.sc.options.test_depth.unwrap_or(self.sc.depth);
        let cfg = self.cfg()?;
        let space = cfg.space();
        let circle = space.name().starts_with("circle");
        let need_circle = |what: &str| if circle { Ok(()) } else { Err(format!("{what} needs a circle sample")) };
        let t: WeightedComposition = match op {
            OperatorRef::Identity => WeightedComposition::identity(space),
            OperatorRef::Translation(c) => gallery::translation(space, *c),
            OperatorRef::Scale(f) => gallery::scale(space, *f),
            OperatorRef::Rotation(k) => {
                need_circle("rotation")?;
                gallery::rotation_steps(space, *k)
            }
            OperatorRef::Flip => {
                need_circle("flip")?;
                gallery::interval_flip(space)
            }
            OperatorRef::RotationFlip => {
                need_circle("rotation-flip")?;
                let r = cfg.group().generators.first().ok_or("rotation-flip needs a generator")?;
                compose(r, &gallery::interval_flip(space)).map_err(|e| e.to_string())?
            }
            OperatorRef::Word(i) => {
                cfg.expanded().elements.get(*i).ok_or_else(|| format!("no group element {i}"))?.op.clone()
            }
        };
        let v = certify(&t, cfg, test_depth).map_err(|e| e.to_string())?;
        if v.verdict != Verdict::CertifiedInG {
            let w = v.witness.as_ref().map_or(String::new(), |w| format!(", witness {}", serde_json::to_string(w).expect("serialisable")));
            out.failures.push(format!("{} is {:?}{w}", v.operator, v.verdict));
        }
        out.put("verdict", v);
        Ok(())
    }

    fn sot_gallery(&mut self, out: &mut Outcome) -> Result<(), String> {
        let space = &self.space;
        let count = self.sc.options.sot_count;
        let id = WeightedComposition::identity(space);
        let compacts = space.exhaustion_sets();
        let opts = SotOptions::default();
        if space.name() == "remark25" {
            let seq = gallery::remark25_family(space, count);
            let v = check_sot_convergence(space, &seq, &id, &compacts, &opts).map_err(|e| e.to_string())?;
            out.check(v.map_uniform.pass, || "condition (1) fails on remark25".into());
            out.check(!v.inverse_close.pass && v.inverse_close.witness.is_some(), || {
                "condition (3) holds on remark25".into()
            });
            let x = gallery::remark25_witness(space);
            let gaps: Vec<f64> = seq
                .iter()
                .map(|g| g.apply(&x).iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .collect();
            let n_max = gaps.iter().rposition(|&d| d > 0.0).map_or(0, |k| k + 1);
            out.check(gaps[..n_max].iter().all(|&d| d == 1.0), || "some |x o phi_n - x| differs from 1".into());
            out.put("remark25", v);
            out.put("witness_gaps", gaps);
        } else if space.name().starts_with("circle") {
            let seq = gallery::rotation_sequence(space, count);
            let v = check_sot_convergence(space, &seq, &id, &compacts, &opts).map_err(|e| e.to_string())?;
            out.check(v.convergent, || "rotations by 1/n do not converge".into());
            out.put("rotations", v);
        } else {
            out.put("skipped", format!("no gallery entry for {}", space.name()));
        }
        Ok(())
    }

    fn bounded_suite(&mut self, index: usize, out: &mut Outcome) -> Result<(), String> {
        let mut rng = self.rng(index);
        let opts = self.sc.options.clone();
        let settings = BoundedSettings { weight_bound: opts.weight_bound, ..Default::default() };
        let space = &self.space;
        let b = m_weight(space, &self.group, &settings).map_err(|e| e.to_string())?;
        let lo = 1.0 / b.c_g;
        out.check(b.m.iter().all(|&m| m >= lo * (1.0 - 1e-12) && m <= 1.0), || "m leaves [1/C_G, 1]".into());
        let mut max_gap: f64 = 0.0;
        let mut exact = true;
        for k in 0..opts.bounded_functions {
            let x = random_tents(space, &mut rng, 4, opts.radius_range).eval(space);
            let v = group_norm(&x, &b);
            exact &= v.value == v.direct;
            max_gap = max_gap.max((v.value - v.direct).abs());
            if v.sup_norm > 0.0 {
                let r = v.value / v.sup_norm;
                out.check(r >= lo * (1.0 - 1e-12) && r <= b.c_g * (1.0 + 1e-12), || format!("function {k}: ratio {r}"));
            }
        }
        out.check(max_gap <= 1e-12, || format!("group norm formulas differ by {max_gap}"));
        let mut worst_dev: f64 = 0.0;
        for g in b.elements() {
            worst_dev = worst_dev.max(conjugate(g, &b).weight_deviation);
        }
        if b.continuity.continuous {
            out.check(worst_dev <= 1e-12, || format!("conjugated weights deviate from 1 by {worst_dev}"));
        }
        let caps: Vec<usize> = (1..=self.group.word_cap).collect();
        let trace = cap_trace(space, &self.group, &caps, &settings).map_err(|e| e.to_string())?;
        out.check(trace.monotone, || "m increases with the cap".into());
        out.put("bounded", &b);
        out.put("formulas_exact", exact);
        out.put("max_formula_gap", max_gap);
        out.put("max_conjugate_deviation", worst_dev);
        out.put("cap_trace", trace);
        Ok(())
    }
}

/// Runs `sc`; relative paths resolve against `base`.
pub fn run(sc: &Scenario, base: &Path, seed: Option<u64>) -> Result<Bundle, ScenarioError> {
    let tasks = sc.validate().map_err(|m| input(base, m))?;
    let space = load_space(&sc.space, base)?;
    let mut group = load_group(&sc.group, &space, base)?;
    if let Some(cap) = sc.word_cap {
        if cap < 1 {
            return Err(input(base, "word cap must be at least 1"));
        }
        group = group.with_cap(cap);
    }
    let mut runner = Runner { sc, space, group, seed: seed.unwrap_or(sc.seed), cfg: None };
    let provenance = runner.provenance();
    let mut reports = Vec::new();
    let mut entries = Vec::new();
    for (i, task) in tasks.iter().enumerate() {
        let o = runner.run_task(i, task);
        let name = sc.tasks[i].trim().to_string();
        let pass = o.failures.is_empty();
        entries.push(SummaryEntry { task: name.clone(), file: format!("{:02}-{}.json", i + 1, task.slug()), pass });
        reports.push(TaskReport {
            task: name,
            pass,
            failures: o.failures,
            provenance: provenance.clone(),
            details: Value::Object(o.details),
        });
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(Bundle { summary: Summary { provenance, tasks: entries, pass }, reports })
}

pub fn write_bundle(bundle: &Bundle, dir: &Path) -> Result<(), ScenarioError> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| ScenarioError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    for (e, r) in bundle.summary.tasks.iter().zip(&bundle.reports) {
        let path = dir.join(&e.file);
        fs::write(&path, to_json(r)).map_err(io(&path))?;
    }
    let path = dir.join("summary.json");
    fs::write(&path, to_json(&bundle.summary)).map_err(io(&path))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable report");
    s.push('\n');
    s
}

fn inspect(space: &str, group: Option<&Path>, mg_report: bool) -> Result<Value, ScenarioError> {
    let cwd = Path::new(".");
    let s = load_space(&SpaceRef::Name(space.to_string()), cwd)?;
    let mut v = json!({
        "space": s.name(),
        "points": s.len(),
        "resolution": s.resolution(),
        "exhaustion": s.exhaustion().iter().map(Vec::len).collect::<Vec<_>>(),
    });
    if let Some(path) = group {
        let g = load_group_file(path, &s)?;
        v["generators"] = json!(g.generators.iter().map(|g| g.label()).collect::<Vec<_>>());
        if mg_report {
            let b = m_weight(&s, &g, &BoundedSettings::default())?;
            v["mg_report"] = serde_json::to_value(&b).expect("serialisable report");
        }
    } else if mg_report {
        return Err(input(cwd, "--mg-report needs --bounded-group"));
    }
    Ok(v)
}

pub fn main_with_args<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Run { scenario, out, seed } => {
            let base = scenario.parent().map(Path::to_path_buf).unwrap_or_default();
            let result = Scenario::load(&scenario).and_then(|sc| run(&sc, &base, seed));
            let bundle = match result {
                Ok(b) => b,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            };
            let dir = out.unwrap_or_else(|| base.join("reports"));
            if let Err(e) = write_bundle(&bundle, &dir) {
                eprintln!("error: {e}");
                return 2;
            }
            for (e, r) in bundle.summary.tasks.iter().zip(&bundle.reports) {
                println!("{} {}", if e.pass { "PASS" } else { "FAIL" }, e.task);
                for f in &r.failures {
                    println!("    {f}");
                }
            }
            if bundle.summary.pass {
                0
            } else {
                1
            }
        }
        Command::Inspect { space, bounded_group, mg_report } => match inspect(&space, bounded_group.as_deref(), mg_report) {
            Ok(v) => {
                println!("{}", to_json(&v).trim_end());
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_parsing() {
        assert_eq!(Task::parse("detect translation(0.3)").unwrap(), Task::Detect(OperatorRef::Translation(0.3)));
        assert_eq!(Task::parse("detect word(2)").unwrap(), Task::Detect(OperatorRef::Word(2)));
        assert_eq!(Task::parse("sot-gallery").unwrap(), Task::SotGallery);
        assert!(Task::parse("detect spin").is_err());
        assert!(Task::parse("frobnicate").is_err());
    }

    #[test]
    fn scenario_defaults() {
        let sc: Scenario = serde_json::from_str(r#"{"space": "line", "group": {"kind": "trivial"}}"#).unwrap();
        assert_eq!((sc.c, sc.depth, sc.gamma_cap, sc.seed), (1.1, 6, 16, 0));
        assert!(sc.tasks.is_empty());
        assert_eq!(sc.options.functions, 20);
        let bad: Result<Scenario, _> = serde_json::from_str(r#"{"space": "line", "group": {"kind": "trivial"}, "extra": 1}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn empty_task_list_passes() {
        let sc: Scenario = serde_json::from_str(r#"{"space": "circle", "group": {"kind": "trivial"}}"#).unwrap();
        let b = run(&sc, Path::new("."), None).unwrap();
        assert!(b.summary.pass && b.reports.is_empty());
        assert_eq!(b.summary.provenance.big_l, 22);
    }
}
