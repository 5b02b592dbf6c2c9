//! Bi-objective search over the surrogates with a real-coded NSGA-II.
//! Both objectives are maximized.

use std::cmp::Ordering;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::{DesignPoint, DesignSpace, ScenarioParams};
use crate::surrogate::SurrogateModel;
use crate::vehicle::full_life_propellant;

/// NSGA-II settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MooConfig {
    pub pop_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub eta_c: f64,
    /// Per-variable mutation probability; `None` means 1/n_vars.
    pub mutation_prob: Option<f64>,
    pub eta_m: f64,
    pub seed: u64,
}

impl Default for MooConfig {
    fn default() -> Self {
        MooConfig {
            pop_size: 100,
            generations: 200,
            crossover_prob: 0.9,
            eta_c: 15.0,
            mutation_prob: None,
            eta_m: 20.0,
            seed: 0,
        }
    }
}

impl MooConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 4 || !self.pop_size.is_multiple_of(2) {
            return Err(Error::invariant("pop_size", "must be even and at least 4"));
        }
        Ok(())
    }
}

/// One member of a returned front.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParetoSolution {
    pub x: DesignPoint,
    pub j1: f64,
    pub j2: f64,
    pub j1_norm: f64,
    pub j2_norm: f64,
}

/// `a` dominates `b` under maximization.
pub fn dominates(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 >= b.0 && a.1 >= b.1 && (a.0 > b.0 || a.1 > b.1)
}

/// Indices of the non-dominated points, ordered by j1 descending (input
/// order among equal j1).
pub fn non_dominated(points: &[(f64, f64)]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        let (pa, pb) = (points[a], points[b]);
        pb.0.total_cmp(&pa.0).then(pb.1.total_cmp(&pa.1)).then(a.cmp(&b))
    });
    let mut out = Vec::new();
    let mut best_j2 = f64::NEG_INFINITY;
    let mut i = 0;
    while i < idx.len() {
        let j1 = points[idx[i]].0;
        let top = points[idx[i]].1;
        let mut end = i;
        while end < idx.len() && points[idx[end]].0 == j1 {
            end += 1;
        }
        if top > best_j2 {
            let mut group: Vec<usize> = idx[i..end].iter().copied().filter(|&k| points[k].1 == top).collect();
            group.sort_unstable();
            out.extend(group);
            best_j2 = top;
        }
        i = end;
    }
    out
}

/// Min-max normalizes the front in place. A flat objective maps to 1.
/// The utopia point is (1, 1) by construction.
pub fn normalize_front(front: &mut [ParetoSolution]) {
    let bounds = |f: fn(&ParetoSolution) -> f64| {
        front
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (l1, h1) = bounds(|s| s.j1);
    let (l2, h2) = bounds(|s| s.j2);
    let scale = |v: f64, lo: f64, hi: f64| if hi > lo { (v - lo) / (hi - lo) } else { 1.0 };
    for s in front.iter_mut() {
        s.j1_norm = scale(s.j1, l1, h1);
        s.j2_norm = scale(s.j2, l2, h2);
    }
}

pub const UTOPIA: (f64, f64) = (1.0, 1.0);

/// Area dominated by `points` above the reference `(0, 0)`.
pub fn hypervolume(points: &[(f64, f64)]) -> f64 {
    let pos: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.0 > 0.0 && p.1 > 0.0).collect();
    let mut hv = 0.0;
    let mut prev = 0.0;
    for i in non_dominated(&pos) {
        let (a, b) = pos[i];
        hv += a * (b - prev);
        prev = b;
    }
    hv
}

/// Architecture class of a design relative to its full-life propellant need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchClass {
    FullLife,
    PropellantReduced,
}

impl ArchClass {
    pub fn label(&self) -> &'static str {
        match self {
            ArchClass::FullLife => "full_life",
            ArchClass::PropellantReduced => "propellant_reduced",
        }
    }
}

/// Propellant-reduced when carrying less than 90% of the transfer plus
/// whole-life station-keeping propellant.
pub fn classify(p: &ScenarioParams, x: &DesignPoint) -> Result<ArchClass> {
    let full = full_life_propellant(p, x.t_life_yr)?;
    Ok(if x.m_p_des < 0.9 * full {
        ArchClass::PropellantReduced
    } else {
        ArchClass::FullLife
    })
}

#[derive(Debug, Clone)]
pub struct Individual {
    pub x: Vec<f64>,
    pub f: (f64, f64),
    rank: usize,
    crowding: f64,
}

impl Individual {
    /// Non-domination rank in the last sorted population; 0 is the front.
    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// Fronts of a population, best first.
fn fast_non_dominated_sort(pop: &[Individual]) -> Vec<Vec<usize>> {
    let n = pop.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    let mut fronts = vec![Vec::new()];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if dominates(pop[i].f, pop[j].f) {
                dominated_by[i].push(j);
            } else if dominates(pop[j].f, pop[i].f) {
                count[i] += 1;
            }
        }
        if count[i] == 0 {
            fronts[0].push(i);
        }
    }
    let mut k = 0;
    while !fronts[k].is_empty() {
        let mut next = Vec::new();
        for &i in &fronts[k] {
            for &j in &dominated_by[i] {
                count[j] -= 1;
                if count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(next);
        k += 1;
    }
    fronts.pop();
    fronts
}

fn assign_crowding(pop: &mut [Individual], front: &[usize]) {
    for &i in front {
        pop[i].crowding = 0.0;
    }
    if front.len() <= 2 {
        for &i in front {
            pop[i].crowding = f64::INFINITY;
        }
        return;
    }
    for obj in 0..2 {
        let val = |ind: &Individual| if obj == 0 { ind.f.0 } else { ind.f.1 };
        let mut order = front.to_vec();
        order.sort_by(|&a, &b| val(&pop[a]).total_cmp(&val(&pop[b])).then(a.cmp(&b)));
        let lo = val(&pop[order[0]]);
        let hi = val(&pop[*order.last().unwrap()]);
        pop[order[0]].crowding = f64::INFINITY;
        pop[*order.last().unwrap()].crowding = f64::INFINITY;
        if hi > lo {
            for w in 1..order.len() - 1 {
                let d = (val(&pop[order[w + 1]]) - val(&pop[order[w - 1]])) / (hi - lo);
                pop[order[w]].crowding += d;
            }
        }
    }
}

fn crowded_better(a: &Individual, b: &Individual) -> bool {
    a.rank < b.rank || (a.rank == b.rank && a.crowding > b.crowding)
}

fn sbx(rng: &mut ChaCha8Rng, a: f64, b: f64, lo: f64, hi: f64, eta: f64) -> (f64, f64) {
    if (a - b).abs() < 1e-14 || hi <= lo {
        return (a, b);
    }
    let (y1, y2) = if a < b { (a, b) } else { (b, a) };
    let u: f64 = rng.random();
    let child = |beta: f64| {
        let alpha = 2.0 - beta.powf(-(eta + 1.0));
        if u <= 1.0 / alpha {
            (u * alpha).powf(1.0 / (eta + 1.0))
        } else {
            (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
        }
    };
    let beta1 = 1.0 + 2.0 * (y1 - lo) / (y2 - y1);
    let c1 = 0.5 * ((y1 + y2) - child(beta1) * (y2 - y1));
    let beta2 = 1.0 + 2.0 * (hi - y2) / (y2 - y1);
    let c2 = 0.5 * ((y1 + y2) + child(beta2) * (y2 - y1));
    let (c1, c2) = (c1.clamp(lo, hi), c2.clamp(lo, hi));
    if rng.random::<bool>() {
        (c2, c1)
    } else {
        (c1, c2)
    }
}

fn poly_mutation(rng: &mut ChaCha8Rng, y: f64, lo: f64, hi: f64, eta: f64) -> f64 {
    if hi <= lo {
        return y;
    }
    let d1 = (y - lo) / (hi - lo);
    let d2 = (hi - y) / (hi - lo);
    let u: f64 = rng.random();
    let p = 1.0 / (eta + 1.0);
    let dq = if u < 0.5 {
        let v = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(eta + 1.0);
        v.powf(p) - 1.0
    } else {
        let v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(eta + 1.0);
        1.0 - v.powf(p)
    };
    (y + dq * (hi - lo)).clamp(lo, hi)
}

fn evaluate<F>(xs: Vec<Vec<f64>>, f: &F) -> Vec<Individual>
where
    F: Fn(&[f64]) -> (f64, f64) + Sync,
{
    let fs: Vec<(f64, f64)> = xs.par_iter().map(|x| f(x)).collect();
    xs.into_iter()
        .zip(fs)
        .map(|(x, f)| Individual {
            x,
            f,
            rank: 0,
            crowding: 0.0,
        })
        .collect()
}

fn rank_population(pop: &mut [Individual]) -> Vec<Vec<usize>> {
    let fronts = fast_non_dominated_sort(pop);
    for (r, front) in fronts.iter().enumerate() {
        for &i in front {
            pop[i].rank = r;
        }
        assign_crowding(pop, front);
    }
    fronts
}

/// Runs NSGA-II on a box and returns the final ranked population.
///
/// The observer sees the non-dominated archive of everything evaluated so
/// far after every generation (index 0 is the initial population). The
/// population's own rank-0 set can lose hypervolume to crowding truncation;
/// the archive cannot.
pub fn nsga2<F, O>(lower: &[f64], upper: &[f64], cfg: &MooConfig, f: F, mut observe: O) -> Result<Vec<Individual>>
where
    F: Fn(&[f64]) -> (f64, f64) + Sync,
    O: FnMut(usize, &[(f64, f64)]),
{
    cfg.validate()?;
    let nv = lower.len();
    let pm = cfg.mutation_prob.unwrap_or(1.0 / nv as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let init: Vec<Vec<f64>> = (0..cfg.pop_size)
        .map(|_| (0..nv).map(|d| rng.random_range(lower[d]..=upper[d])).collect())
        .collect();
    let mut pop = evaluate(init, &f);
    rank_population(&mut pop);
    let mut archive = Vec::new();
    update_archive(&mut archive, pop.iter().map(|i| i.f));
    observe(0, &archive);

    for gen in 1..=cfg.generations {
        let pick = |rng: &mut ChaCha8Rng| {
            let a = rng.random_range(0..pop.len());
            let b = rng.random_range(0..pop.len());
            if crowded_better(&pop[b], &pop[a]) {
                b
            } else {
                a
            }
        };
        let mut children = Vec::with_capacity(cfg.pop_size);
        while children.len() < cfg.pop_size {
            let (pa, pb) = (pick(&mut rng), pick(&mut rng));
            let mut c1 = pop[pa].x.clone();
            let mut c2 = pop[pb].x.clone();
            if rng.random::<f64>() < cfg.crossover_prob {
                for d in 0..nv {
                    if rng.random::<f64>() < 0.5 {
                        let (u, v) = sbx(&mut rng, c1[d], c2[d], lower[d], upper[d], cfg.eta_c);
                        c1[d] = u;
                        c2[d] = v;
                    }
                }
            }
            for c in [&mut c1, &mut c2] {
                for d in 0..nv {
                    if rng.random::<f64>() < pm {
                        c[d] = poly_mutation(&mut rng, c[d], lower[d], upper[d], cfg.eta_m);
                    }
                }
            }
            children.push(c1);
            children.push(c2);
        }
        let mut merged = std::mem::take(&mut pop);
        let offspring = evaluate(children, &f);
        update_archive(&mut archive, offspring.iter().map(|i| i.f));
        merged.extend(offspring);
        let fronts = rank_population(&mut merged);
        let mut keep = Vec::with_capacity(cfg.pop_size);
        for front in &fronts {
            if keep.len() + front.len() <= cfg.pop_size {
                keep.extend(front.iter().copied());
            } else {
                let mut rest = front.clone();
                rest.sort_by(|&a, &b| {
                    merged[b]
                        .crowding
                        .partial_cmp(&merged[a].crowding)
                        .unwrap_or(Ordering::Equal)
                        .then(a.cmp(&b))
                });
                keep.extend(rest.into_iter().take(cfg.pop_size - keep.len()));
                break;
            }
        }
        keep.sort_unstable();
        pop = keep.into_iter().map(|i| merged[i].clone()).collect();
        rank_population(&mut pop);
        observe(gen, &archive);
    }
    Ok(pop)
}

fn update_archive(archive: &mut Vec<(f64, f64)>, new: impl Iterator<Item = (f64, f64)>) {
    archive.extend(new);
    let keep = non_dominated(archive);
    let mut next: Vec<(f64, f64)> = Vec::with_capacity(keep.len());
    for i in keep {
        if next.last() != Some(&archive[i]) {
            next.push(archive[i]);
        }
    }
    *archive = next;
}

/// Rank-0 members of a final population, deduplicated.
pub fn first_front(pop: &[Individual]) -> Vec<&Individual> {
    let mut out: Vec<&Individual> = Vec::new();
    for ind in pop.iter().filter(|i| i.rank == 0) {
        if !out.iter().any(|o| o.x == ind.x) {
            out.push(ind);
        }
    }
    out
}

/// Optimizes arbitrary objectives over the design box.
pub fn optimize_with<F>(objectives: F, space: &DesignSpace, cfg: &MooConfig) -> Result<Vec<ParetoSolution>>
where
    F: Fn(&DesignPoint) -> (f64, f64) + Sync,
{
    space.validate()?;
    let lower = space.lower();
    let upper = space.upper();
    let pop = nsga2(
        &lower,
        &upper,
        cfg,
        |v| objectives(&DesignPoint::new(v[0], v[1])),
        |_, _| {},
    )?;
    let mut front: Vec<ParetoSolution> = first_front(&pop)
        .into_iter()
        .map(|ind| {
            let x = space.clip(DesignPoint::new(ind.x[0], ind.x[1]));
            ParetoSolution {
                x,
                j1: ind.f.0,
                j2: ind.f.1,
                j1_norm: 0.0,
                j2_norm: 0.0,
            }
        })
        .collect();
    front.sort_by(|a, b| b.j1.total_cmp(&a.j1).then(a.j2.total_cmp(&b.j2)));
    normalize_front(&mut front);
    Ok(front)
}

/// Maximizes the two surrogate means over the design box.
pub fn optimize(
    j1: &SurrogateModel,
    j2: &SurrogateModel,
    space: &DesignSpace,
    cfg: &MooConfig,
) -> Result<Vec<ParetoSolution>> {
    optimize_with(|x| (j1.predict_mean(x), j2.predict_mean(x)), space, cfg)
}

/// Writes the front with its class labels.
pub fn write_front_csv(front: &[ParetoSolution], p: &ScenarioParams, path: &Path, header: &[String]) -> Result<()> {
    let mut text = String::new();
    for h in header {
        text.push_str(&format!("# {h}\n"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e| Error::csv(path, e);
    w.write_record([
        "t_life_yr",
        "m_p_des_kg",
        "j1",
        "j2",
        "j1_norm",
        "j2_norm",
        "class_label",
    ])
    .map_err(err)?;
    for s in front {
        let class = classify(p, &s.x)?;
        w.write_record([
            s.x.t_life_yr.to_string(),
            s.x.m_p_des.to_string(),
            s.j1.to_string(),
            s.j2.to_string(),
            s.j1_norm.to_string(),
            s.j2_norm.to_string(),
            class.label().to_string(),
        ])
        .map_err(err)?;
    }
    let body = w.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    text.push_str(&String::from_utf8_lossy(&body));
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// ZDT1 as a maximization problem (both objectives negated).
pub fn zdt1(x: &[f64]) -> (f64, f64) {
    let n = x.len();
    let f1 = x[0];
    let g = 1.0 + 9.0 * x[1..].iter().sum::<f64>() / (n - 1) as f64;
    let f2 = g * (1.0 - (f1 / g).sqrt());
    (-f1, -f2)
}

/// Generational distance of minimization-space points to the ZDT1 front
/// `f2 = 1 - √f1`.
pub fn zdt1_generational_distance(points: &[(f64, f64)]) -> f64 {
    let dist = |p: (f64, f64)| {
        // Golden-section search on the squared distance along the front.
        let d2 = |t: f64| (t - p.0).powi(2) + (1.0 - t.sqrt() - p.1).powi(2);
        let (mut a, mut b) = (0.0f64, 1.0f64);
        let k = (5f64.sqrt() - 1.0) / 2.0;
        let mut best = d2(0.0).min(d2(1.0));
        let mut lo = 0.0f64;
        let coarse = 1000;
        for i in 0..=coarse {
            let t = i as f64 / coarse as f64;
            if d2(t) < best {
                best = d2(t);
                lo = t;
            }
        }
        a = a.max(lo - 1.0 / coarse as f64);
        b = b.min(lo + 1.0 / coarse as f64);
        for _ in 0..100 {
            let c = b - k * (b - a);
            let d = a + k * (b - a);
            if d2(c) < d2(d) {
                b = d;
            } else {
                a = c;
            }
        }
        best.min(d2(0.5 * (a + b))).sqrt()
    };
    let s: f64 = points.iter().map(|&p| dist(p).powi(2)).sum();
    s.sqrt() / points.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::baseline_chemical;
    use proptest::prelude::*;
    use rand::Rng;

    fn brute(points: &[(f64, f64)]) -> Vec<usize> {
        let mut keep: Vec<usize> = (0..points.len())
            .filter(|&i| !points.iter().any(|&q| dominates(q, points[i])))
            .collect();
        keep.sort_by(|&a, &b| points[b].0.total_cmp(&points[a].0).then(a.cmp(&b)));
        keep
    }

    #[test]
    fn strict_dominance() {
        assert_eq!(non_dominated(&[(1.0, 1.0), (0.0, 0.0)]), vec![0]);
    }

    #[test]
    fn mutual_non_domination() {
        assert_eq!(non_dominated(&[(1.0, 0.0), (0.0, 1.0), (0.5, 0.5)]), vec![0, 2, 1]);
    }

    #[test]
    fn random_clouds_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let pts: Vec<(f64, f64)> = (0..1000)
                .map(|_| {
                    // Coarse values force ties in both coordinates.
                    let a = (rng.random::<f64>() * 50.0).floor();
                    let b = (rng.random::<f64>() * 50.0).floor();
                    (a, b)
                })
                .collect();
            assert_eq!(non_dominated(&pts), brute(&pts));
        }
    }

    proptest! {
        #[test]
        fn filter_matches_brute_force(pts in prop::collection::vec((-5i32..5, -5i32..5), 1..60)) {
            let pts: Vec<(f64, f64)> = pts.into_iter().map(|(a, b)| (a as f64, b as f64)).collect();
            prop_assert_eq!(non_dominated(&pts), brute(&pts));
        }

        #[test]
        fn normalization_is_affine_invariant(
            raw in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 2..20),
            a in 0.1f64..10.0, b in -5.0f64..5.0,
        ) {
            let mk = |f: &dyn Fn(f64) -> f64| -> Vec<ParetoSolution> {
                let mut v: Vec<ParetoSolution> = raw.iter().map(|&(j1, j2)| ParetoSolution {
                    x: DesignPoint::new(0.0, 0.0), j1: f(j1), j2: f(j2), j1_norm: 0.0, j2_norm: 0.0,
                }).collect();
                normalize_front(&mut v);
                v
            };
            let base = mk(&|v| v);
            let moved = mk(&|v| a * v + b);
            for (p, q) in base.iter().zip(&moved) {
                prop_assert!((p.j1_norm - q.j1_norm).abs() < 1e-9);
                prop_assert!((p.j2_norm - q.j2_norm).abs() < 1e-9);
            }
        }
    }

    fn sol(j1: f64, j2: f64) -> ParetoSolution {
        ParetoSolution {
            x: DesignPoint::new(0.0, 0.0),
            j1,
            j2,
            j1_norm: 0.0,
            j2_norm: 0.0,
        }
    }

    #[test]
    fn two_point_normalization() {
        let mut f = vec![sol(0.0, 10.0), sol(5.0, 0.0)];
        normalize_front(&mut f);
        assert_eq!((f[0].j1_norm, f[0].j2_norm), (0.0, 1.0));
        assert_eq!((f[1].j1_norm, f[1].j2_norm), (1.0, 0.0));
        assert_eq!(UTOPIA, (1.0, 1.0));
        let mut one = vec![sol(3.0, 4.0)];
        normalize_front(&mut one);
        assert_eq!((one[0].j1_norm, one[0].j2_norm), (1.0, 1.0));
    }

    #[test]
    fn front_orders_are_mirrored() {
        let space = DesignSpace::new([1.0, 2.0], [0.0, 1.0]).unwrap();
        let cfg = MooConfig {
            pop_size: 40,
            generations: 40,
            ..Default::default()
        };
        let front = optimize_with(
            |x| (x.t_life_yr, 4.0 - x.t_life_yr * x.t_life_yr + 0.1 * x.m_p_des),
            &space,
            &cfg,
        )
        .unwrap();
        assert!(front.len() > 5);
        for w in front.windows(2) {
            assert!(w[0].j1_norm >= w[1].j1_norm);
            assert!(w[0].j2_norm <= w[1].j2_norm);
        }
    }

    #[test]
    fn coincident_objectives_collapse() {
        let space = DesignSpace::new([5.0, 15.0], [1500.0, 3500.0]).unwrap();
        let f = |x: &DesignPoint| -((x.t_life_yr - 12.0).powi(2) + ((x.m_p_des - 3000.0) / 200.0).powi(2));
        let cfg = MooConfig {
            pop_size: 40,
            generations: 60,
            ..Default::default()
        };
        let front = optimize_with(|x| (f(x), f(x).exp()), &space, &cfg).unwrap();
        assert_eq!(front.len(), 1);
        assert!((front[0].x.t_life_yr - 12.0).abs() < 0.05);
        assert!((front[0].x.m_p_des - 3000.0).abs() < 10.0);
    }

    #[test]
    fn bit_reproducible() {
        let space = DesignSpace::new([1.0, 2.0], [0.0, 1.0]).unwrap();
        let cfg = MooConfig {
            pop_size: 20,
            generations: 15,
            seed: 9,
            ..Default::default()
        };
        let run = || optimize_with(|x| (x.t_life_yr, 1.0 - x.t_life_yr.sqrt() + x.m_p_des), &space, &cfg).unwrap();
        assert_eq!(run(), run());
    }

    #[test]
    fn rejects_odd_population() {
        let cfg = MooConfig {
            pop_size: 7,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn hypervolume_of_staircase() {
        assert_eq!(hypervolume(&[(1.0, 0.5), (0.5, 1.0)]), 0.75);
        assert_eq!(hypervolume(&[(1.0, 1.0), (0.5, 0.5)]), 1.0);
    }

    #[test]
    fn class_threshold() {
        let p = baseline_chemical().params;
        let full = full_life_propellant(&p, 15.0).unwrap();
        assert_eq!(
            classify(&p, &DesignPoint::new(15.0, 0.95 * full)).unwrap(),
            ArchClass::FullLife
        );
        assert_eq!(
            classify(&p, &DesignPoint::new(15.0, 0.85 * full)).unwrap(),
            ArchClass::PropellantReduced
        );
    }

    #[test]
    fn zdt1_front_distance_is_zero_on_front() {
        let pts: Vec<(f64, f64)> = (0..=10)
            .map(|i| (i as f64 / 10.0, 1.0 - (i as f64 / 10.0).sqrt()))
            .collect();
        assert!(zdt1_generational_distance(&pts) < 1e-12);
        assert!((zdt1_generational_distance(&[(0.0, 1.5)]) - 0.5).abs() < 1e-9);
    }
}
