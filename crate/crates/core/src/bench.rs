//! Experiment orchestration: design-of-experiments campaigns, surrogate
//! training, optimization, parametric sweeps and their on-disk layout.
//!
//! One output directory per scenario holds `scenario.json`, `d1.csv`,
//! `d2.csv`, `test.csv`, `models/`, `front.csv`, `heatmap_j1.csv`,
//! `heatmap_j2.csv` and `report.txt`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pareto::{self, classify, ArchClass, MooConfig, ParetoSolution};
use crate::scenario::{DesignPoint, DesignSpace, Scenario};
use crate::simulator::{mc_estimate, McEstimate};
use crate::surrogate::{fit_all, r_squared, select_by_score, Kernel, SurrogateModel, TrainingSet};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Experiment ids at or above this offset belong to the test set.
const TEST_EXPERIMENT_BASE: u64 = 1 << 32;
const HEATMAP_RES: usize = 101;

/// Everything needed to run the pipeline for one scenario.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub scenario: Scenario,
    pub space: DesignSpace,
    /// Grid levels along (lifetime, propellant).
    pub levels: [usize; 2],
    pub replicates: usize,
    pub test_size: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub moo: MooConfig,
}

impl ExperimentPlan {
    /// Full-fidelity plan: 11 x 21 grid, 400 replicates, 30 test points,
    /// population 100 for 200 generations.
    pub fn new(scenario: Scenario, seed: u64, out_dir: impl Into<PathBuf>) -> Result<Self> {
        let space = scenario
            .design_space
            .ok_or_else(|| Error::MissingKey("design_space".into()))?;
        let plan = ExperimentPlan {
            scenario,
            space,
            levels: [11, 21],
            replicates: 400,
            test_size: 30,
            seed,
            out_dir: out_dir.into(),
            moo: MooConfig {
                seed,
                ..MooConfig::default()
            },
        };
        plan.validate()?;
        Ok(plan)
    }

    /// CI profile: 100 replicates, population 50 for 100 generations.
    pub fn fast(mut self) -> Self {
        self.replicates = 100;
        self.moo.pop_size = 50;
        self.moo.generations = 100;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.params.validate()?;
        self.space.validate()?;
        if self.replicates < 2 {
            return Err(Error::invariant("replicates", "need at least 2"));
        }
        if self.levels.iter().any(|&l| l < 2) {
            return Err(Error::invariant("levels", "need at least 2 per axis"));
        }
        if self.test_size < 2 {
            return Err(Error::invariant("test_size", "need at least 2"));
        }
        self.moo.validate()
    }

    /// Comment lines stamped at the top of every output file.
    pub fn header(&self) -> Vec<String> {
        vec![
            format!("scenario_hash={}", self.scenario.hash()),
            format!("seed={}", self.seed),
            format!("version=satarch {VERSION}"),
        ]
    }

    pub fn grid(&self) -> Vec<DesignPoint> {
        grid_points(&self.space, self.levels[0], self.levels[1])
    }

    /// Random test designs drawn uniformly from the design box.
    pub fn test_points(&self) -> Vec<DesignPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x7465_7374_7365_7473);
        let [t0, t1] = self.space.t_life_range;
        let [m0, m1] = self.space.m_p_range;
        (0..self.test_size)
            .map(|_| DesignPoint::new(rng.random_range(t0..=t1), rng.random_range(m0..=m1)))
            .collect()
    }
}

/// Full-factorial grid, lifetime-major.
pub fn grid_points(space: &DesignSpace, nt: usize, nm: usize) -> Vec<DesignPoint> {
    let lerp = |r: [f64; 2], i: usize, n: usize| {
        if n == 1 {
            r[0]
        } else {
            r[0] + (r[1] - r[0]) * i as f64 / (n - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(nt * nm);
    for i in 0..nt {
        for j in 0..nm {
            out.push(DesignPoint::new(
                lerp(space.t_life_range, i, nt),
                lerp(space.m_p_range, j, nm),
            ));
        }
    }
    out
}

/// Monte Carlo estimate at one design point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CampaignRow {
    pub x: DesignPoint,
    pub est: McEstimate,
}

/// Runs `n` replicates at every point; experiment ids are `base + index`.
pub fn run_campaign(
    scenario: &Scenario,
    points: &[DesignPoint],
    n: usize,
    seed: u64,
    base: u64,
) -> Result<Vec<CampaignRow>> {
    points
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let est = mc_estimate(&scenario.params, x, n, seed, base + i as u64)?;
            Ok(CampaignRow { x, est })
        })
        .collect()
}

fn with_header(header: &[String], body: Vec<u8>) -> Vec<u8> {
    let mut out = String::new();
    for h in header {
        writeln!(out, "# {h}").unwrap();
    }
    let mut bytes = out.into_bytes();
    bytes.extend(body);
    bytes
}

fn write_rows(
    path: &Path,
    header: &[String],
    columns: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns).map_err(|e| Error::csv(path, e))?;
    for r in rows {
        w.write_record(&r).map_err(|e| Error::csv(path, e))?;
    }
    let body = w.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    fs::write(path, with_header(header, body)).map_err(|e| Error::io(path, e))
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::invariant("csv", format!("{}: bad number `{s}`", path.display())))
            })
            .collect::<Result<Vec<f64>>>()?;
        out.push(row);
    }
    Ok(out)
}

fn campaign_rows(rows: &[CampaignRow]) -> impl Iterator<Item = Vec<String>> + '_ {
    rows.iter().map(|r| {
        vec![
            r.x.t_life_yr.to_string(),
            r.x.m_p_des.to_string(),
            r.est.mean.to_string(),
            r.est.std.to_string(),
        ]
    })
}

const CAMPAIGN_COLUMNS: [&str; 4] = ["t_life_yr", "m_p_des_kg", "mean_npv", "std_npv"];

fn read_campaign(path: &Path, n: usize) -> Result<Vec<CampaignRow>> {
    read_rows(path)?
        .into_iter()
        .map(|r| {
            if r.len() != 4 {
                return Err(Error::invariant(
                    "csv",
                    format!("{}: expected 4 columns", path.display()),
                ));
            }
            Ok(CampaignRow {
                x: DesignPoint::new(r[0], r[1]),
                est: McEstimate {
                    n,
                    mean: r[2],
                    std: r[3],
                },
            })
        })
        .collect()
}

/// Return objective data.
pub fn dataset_j1(rows: &[CampaignRow]) -> Result<TrainingSet> {
    TrainingSet::new(
        rows.iter().map(|r| r.x).collect(),
        rows.iter().map(|r| r.est.mean).collect(),
    )
}

/// Risk-adjusted objective data. Points whose NPV never varies (a design
/// that cannot even reach orbit) have no finite ratio and are left out.
pub fn dataset_j2(rows: &[CampaignRow]) -> Result<TrainingSet> {
    let keep: Vec<&CampaignRow> = rows.iter().filter(|r| r.est.std > 0.0).collect();
    TrainingSet::new(
        keep.iter().map(|r| r.x).collect(),
        keep.iter().map(|r| r.est.ratio()).collect(),
    )
}

/// Runs the training-grid campaign and writes `d1.csv` (mean and std per
/// point) and `d2.csv` (mean over std, finite points only).
pub fn cmd_simulate(plan: &ExperimentPlan) -> Result<Vec<CampaignRow>> {
    plan.validate()?;
    fs::create_dir_all(&plan.out_dir).map_err(|e| Error::io(&plan.out_dir, e))?;
    plan.scenario.save(&plan.out_dir.join("scenario.json"))?;
    let rows = run_campaign(&plan.scenario, &plan.grid(), plan.replicates, plan.seed, 0)?;
    let header = plan.header();
    write_rows(
        &plan.out_dir.join("d1.csv"),
        &header,
        &CAMPAIGN_COLUMNS,
        campaign_rows(&rows),
    )?;
    write_rows(
        &plan.out_dir.join("d2.csv"),
        &header,
        &["t_life_yr", "m_p_des_kg", "ratio"],
        rows.iter().filter(|r| r.est.std > 0.0).map(|r| {
            vec![
                r.x.t_life_yr.to_string(),
                r.x.m_p_des.to_string(),
                r.est.ratio().to_string(),
            ]
        }),
    )?;
    log::info!("simulated {} grid points x {} replicates", rows.len(), plan.replicates);
    Ok(rows)
}

/// R² of every kernel per objective and the selected kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub j1_scores: Vec<(Kernel, f64)>,
    pub j2_scores: Vec<(Kernel, f64)>,
    pub j1_selected: Kernel,
    pub j2_selected: Kernel,
}

impl TrainReport {
    pub fn render(&self) -> String {
        let mut s = String::from("surrogate performance (test R^2)\nkernel      j1        j2\n");
        for (a, b) in self.j1_scores.iter().zip(&self.j2_scores) {
            writeln!(s, "{:<10} {:>8.4} {:>8.4}", a.0.name(), a.1, b.1).unwrap();
        }
        writeln!(
            s,
            "selected   {:>8} {:>8}",
            self.j1_selected.name(),
            self.j2_selected.name()
        )
        .unwrap();
        s
    }
}

fn choose(models: Vec<SurrogateModel>, test: &TrainingSet) -> Result<(SurrogateModel, Vec<(Kernel, f64)>)> {
    let scores = models
        .iter()
        .map(|m| Ok((m.kernel, r_squared(m, test)?)))
        .collect::<Result<Vec<_>>>()?;
    let best = select_by_score(&scores);
    let model = models.into_iter().nth(best).expect("index from scores");
    Ok((model, scores))
}

/// Fits all kernels to both datasets, scores them on a fresh test
/// campaign (`test.csv`) and saves every model plus the selected pair.
pub fn cmd_train(plan: &ExperimentPlan) -> Result<TrainReport> {
    plan.validate()?;
    let dir = &plan.out_dir;
    let rows = read_campaign(&dir.join("d1.csv"), plan.replicates)?;
    let test_rows = run_campaign(
        &plan.scenario,
        &plan.test_points(),
        plan.replicates,
        plan.seed,
        TEST_EXPERIMENT_BASE,
    )?;
    let header = plan.header();
    write_rows(
        &dir.join("test.csv"),
        &header,
        &CAMPAIGN_COLUMNS,
        campaign_rows(&test_rows),
    )?;

    let (d1, d2) = (dataset_j1(&rows)?, dataset_j2(&rows)?);
    let (t1, t2) = (dataset_j1(&test_rows)?, dataset_j2(&test_rows)?);
    let (m1, m2) = (fit_all(&d1)?, fit_all(&d2)?);
    let models = dir.join("models");
    fs::create_dir_all(&models).map_err(|e| Error::io(&models, e))?;
    for (tag, set) in [("j1", &m1), ("j2", &m2)] {
        for m in set {
            m.save(&models.join(format!("{tag}_{}.json", m.kernel.name())))?;
        }
    }
    let (best1, j1_scores) = choose(m1, &t1)?;
    let (best2, j2_scores) = choose(m2, &t2)?;
    best1.save(&models.join("j1.json"))?;
    best2.save(&models.join("j2.json"))?;
    let report = TrainReport {
        j1_selected: best1.kernel,
        j2_selected: best2.kernel,
        j1_scores,
        j2_scores,
    };
    write_rows(
        &dir.join("scores.csv"),
        &header,
        &["objective", "kernel", "r2", "selected"],
        [
            ("j1", &report.j1_scores, report.j1_selected),
            ("j2", &report.j2_scores, report.j2_selected),
        ]
        .into_iter()
        .flat_map(|(tag, scores, sel)| {
            scores.iter().map(move |(k, r2)| {
                vec![
                    tag.to_string(),
                    k.name().to_string(),
                    r2.to_string(),
                    (*k == sel).to_string(),
                ]
            })
        }),
    )?;
    Ok(report)
}

pub fn load_models(dir: &Path) -> Result<(SurrogateModel, SurrogateModel)> {
    let models = dir.join("models");
    Ok((
        SurrogateModel::load(&models.join("j1.json"))?,
        SurrogateModel::load(&models.join("j2.json"))?,
    ))
}

/// Optimizes the selected surrogates and writes `front.csv` plus dense
/// long-format heatmaps of both surrogate means.
pub fn cmd_optimize(plan: &ExperimentPlan) -> Result<Vec<ParetoSolution>> {
    plan.validate()?;
    let dir = &plan.out_dir;
    let (j1, j2) = load_models(dir)?;
    let front = pareto::optimize(&j1, &j2, &plan.space, &plan.moo)?;
    let header = plan.header();
    pareto::write_front_csv(&front, &plan.scenario.params, &dir.join("front.csv"), &header)?;
    let dense = grid_points(&plan.space, HEATMAP_RES, HEATMAP_RES);
    for (name, model) in [("heatmap_j1.csv", &j1), ("heatmap_j2.csv", &j2)] {
        let values: Vec<f64> = dense.par_iter().map(|x| model.predict_mean(x)).collect();
        write_rows(
            &dir.join(name),
            &header,
            &["t_life_yr", "m_p_des_kg", "value"],
            dense
                .iter()
                .zip(&values)
                .map(|(x, v)| vec![x.t_life_yr.to_string(), x.m_p_des.to_string(), v.to_string()]),
        )?;
    }
    Ok(front)
}

/// Whether any front member belongs to the propellant-reduced class.
pub fn emergence(plan: &ExperimentPlan, front: &[ParetoSolution]) -> Result<bool> {
    for s in front {
        if classify(&plan.scenario.params, &s.x)? == ArchClass::PropellantReduced {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Reads the finished directory back and writes `report.txt`.
pub fn cmd_report(plan: &ExperimentPlan) -> Result<String> {
    let dir = &plan.out_dir;
    let mut s = String::new();
    for h in plan.header() {
        writeln!(s, "# {h}").unwrap();
    }
    writeln!(s, "scenario: {}", plan.scenario.name.as_deref().unwrap_or("unnamed")).unwrap();
    writeln!(
        s,
        "grid: {} x {} points, {} replicates, {} test points",
        plan.levels[0], plan.levels[1], plan.replicates, plan.test_size
    )
    .unwrap();
    let scores = dir.join("scores.csv");
    if scores.exists() {
        let text = fs::read_to_string(&scores).map_err(|e| Error::io(&scores, e))?;
        s.push_str("\nsurrogate performance (test R^2)\n");
        for line in text.lines().filter(|l| !l.starts_with('#')) {
            writeln!(s, "  {line}").unwrap();
        }
    }
    let front_path = dir.join("front.csv");
    if front_path.exists() {
        let front = read_front(&front_path)?;
        let reduced = front.iter().filter(|r| r.1 == "propellant_reduced").count();
        writeln!(
            s,
            "\npareto front: {} solutions, {} propellant-reduced",
            front.len(),
            reduced
        )
        .unwrap();
        writeln!(s, "  t_life_yr  m_p_des_kg        j1        j2  class").unwrap();
        for (v, class) in &front {
            writeln!(s, "  {:>9.3} {:>11.1} {:>9.2} {:>9.4}  {class}", v[0], v[1], v[2], v[3]).unwrap();
        }
        writeln!(s, "emergence: {}", if reduced > 0 { "yes" } else { "no" }).unwrap();
    }
    let path = dir.join("report.txt");
    fs::write(&path, &s).map_err(|e| Error::io(&path, e))?;
    Ok(s)
}

fn read_front(path: &Path) -> Result<Vec<(Vec<f64>, String)>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        let nums = rec
            .iter()
            .take(6)
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::invariant("csv", format!("{}: bad number `{s}`", path.display())))
            })
            .collect::<Result<Vec<f64>>>()?;
        out.push((nums, rec.get(6).unwrap_or("").to_string()));
    }
    Ok(out)
}

/// simulate, train, optimize, report.
pub fn run_pipeline(plan: &ExperimentPlan) -> Result<(TrainReport, Vec<ParetoSolution>)> {
    cmd_simulate(plan)?;
    let report = cmd_train(plan)?;
    let front = cmd_optimize(plan)?;
    cmd_report(plan)?;
    Ok((report, front))
}

/// Propulsion family of a parametric study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Chemical,
    Electric,
}

/// Service capacities by chemical capacity index (1-based).
pub const CHEMICAL_CAPACITY_KG: [f64; 4] = [100.0, 400.0, 700.0, 1000.0];
/// Cost multipliers on the base file's service cost by chemical cost index.
pub const CHEMICAL_COST_SCALE: [f64; 5] = [1.0, 0.8, 0.6, 0.4, 0.2];

/// Cost multiplier for electric cost index `i` in 1..=10 (2.0 down to 0.2).
pub fn electric_cost_scale(i: usize) -> f64 {
    (20 - 2 * (i as i64 - 1)) as f64 / 10.0
}

/// One sweep scenario. `capacity` is ignored for the electric family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepCase {
    pub capacity: usize,
    pub cost: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub family: Family,
    pub cases: Vec<SweepCase>,
}

impl SweepSpec {
    /// All 20 chemical scenarios, capacity-major.
    pub fn chemical_full() -> Self {
        let cases = (1..=4)
            .flat_map(|capacity| (1..=5).map(move |cost| SweepCase { capacity, cost }))
            .collect();
        SweepSpec {
            family: Family::Chemical,
            cases,
        }
    }

    /// All 10 electric scenarios.
    pub fn electric_full() -> Self {
        SweepSpec {
            family: Family::Electric,
            cases: (1..=10).map(|cost| SweepCase { capacity: 1, cost }).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.cases {
            let ok = match self.family {
                Family::Chemical => (1..=4).contains(&c.capacity) && (1..=5).contains(&c.cost),
                Family::Electric => (1..=10).contains(&c.cost),
            };
            if !ok {
                return Err(Error::invariant(
                    "sweep",
                    format!("case ({}, {}) is outside the table", c.capacity, c.cost),
                ));
            }
        }
        Ok(())
    }

    pub fn case_name(&self, c: &SweepCase) -> String {
        match self.family {
            Family::Chemical => format!("chem_cap{}_cost{}", c.capacity, c.cost),
            Family::Electric => format!("elec_cost{}", c.cost),
        }
    }

    /// The base scenario with this case's service capacity and cost.
    pub fn apply(&self, base: &Scenario, c: &SweepCase) -> Result<Scenario> {
        let mut s = base.clone();
        let scale = match self.family {
            Family::Chemical => {
                s.params.m_oor_cap = CHEMICAL_CAPACITY_KG[c.capacity - 1];
                CHEMICAL_COST_SCALE[c.cost - 1]
            }
            Family::Electric => electric_cost_scale(c.cost),
        };
        s.params.c_oor_f *= scale;
        s.params.c_oor_v *= scale;
        s.name = Some(self.case_name(c));
        s.params.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub case: SweepCase,
    pub name: String,
    pub emergence: bool,
    pub front: Vec<ParetoSolution>,
}

/// Runs the full pipeline per case under `plan.out_dir/<case>/` and writes
/// `emergence.csv` with one flag per case.
pub fn cmd_sweep(plan: &ExperimentPlan, spec: &SweepSpec) -> Result<Vec<SweepResult>> {
    spec.validate()?;
    fs::create_dir_all(&plan.out_dir).map_err(|e| Error::io(&plan.out_dir, e))?;
    let mut results = Vec::with_capacity(spec.cases.len());
    for c in &spec.cases {
        let name = spec.case_name(c);
        let mut sub = plan.clone();
        sub.scenario = spec.apply(&plan.scenario, c)?;
        sub.out_dir = plan.out_dir.join(&name);
        let (_, front) = run_pipeline(&sub)?;
        let flag = emergence(&sub, &front)?;
        log::info!("{name}: emergence {flag}");
        results.push(SweepResult {
            case: *c,
            name,
            emergence: flag,
            front,
        });
    }
    write_rows(
        &plan.out_dir.join("emergence.csv"),
        &plan.header(),
        &[
            "case",
            "capacity_index",
            "cost_index",
            "m_oor_cap_kg",
            "c_oor_f",
            "c_oor_v",
            "emergence",
        ],
        results.iter().map(|r| {
            let s = spec.apply(&plan.scenario, &r.case).expect("validated above");
            vec![
                r.name.clone(),
                r.case.capacity.to_string(),
                r.case.cost.to_string(),
                s.params.m_oor_cap.to_string(),
                s.params.c_oor_f.to_string(),
                s.params.c_oor_v.to_string(),
                r.emergence.to_string(),
            ]
        }),
    )?;
    Ok(results)
}
