use rand::seq::index;
use rand::Rng;

use super::{TaskSpec, UnifiedMapping};
use crate::population::evaluate;
use crate::selection::select_truncation;
use crate::variation::{sbx_pair, ObScanContext, ObScanParams, SbxParams};
use crate::{Error, Genome, Individual, Population, Result, RngStream};

/// Which crossover a mating uses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OperatorPolicy {
    /// Always SBX with distribution index `eta`.
    SbxOnly { eta: f64 },
    /// A fair coin per mating between SBX (`eta`) and OB-Scan.
    SbxOrObScanEqual { eta: f64 },
}

impl OperatorPolicy {
    pub fn eta(&self) -> f64 {
        match *self {
            OperatorPolicy::SbxOnly { eta } | OperatorPolicy::SbxOrObScanEqual { eta } => eta,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operator {
    Sbx,
    ObScan,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MtecConfig {
    /// Probability that a drawn inter-task pair is allowed to mate.
    pub rmp: f64,
    pub operator_policy: OperatorPolicy,
    pub pop_size_per_task: usize,
    pub generations: usize,
}

impl MtecConfig {
    pub fn new(rmp: f64, operator_policy: OperatorPolicy, pop_size_per_task: usize, generations: usize) -> Result<Self> {
        let cfg = Self {
            rmp,
            operator_policy,
            pop_size_per_task,
            generations,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rmp) {
            return Err(Error::arg(format!("rmp must lie in [0, 1], got {}", self.rmp)));
        }
        if self.pop_size_per_task == 0 {
            return Err(Error::arg("pop_size_per_task must be positive"));
        }
        SbxParams::new(self.operator_policy.eta())?;
        Ok(())
    }
}

/// One offspring with its parentage.
#[derive(Clone, Debug, PartialEq)]
pub struct OffspringRecord {
    pub genome: Genome,
    pub task: usize,
    pub parent_tasks: [usize; 2],
    pub operator: Operator,
}

impl OffspringRecord {
    pub fn mixed_parentage(&self) -> bool {
        self.parent_tasks[0] != self.parent_tasks[1]
    }
}

/// Counters for one call of [`mtec_generation`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MatingStats {
    pub intra_task_matings: u64,
    pub inter_task_matings: u64,
    /// Inter-task pairs drawn but refused by the rmp test.
    pub rejected_pairs: u64,
    /// Inter-task offspring assigned to each task, including any later
    /// discarded because that task was already full.
    pub inter_task_assignments: Vec<u64>,
    pub discarded: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MtecOffspring {
    pub tasks: Vec<Vec<OffspringRecord>>,
    pub stats: MatingStats,
}

impl MtecOffspring {
    pub fn genomes(&self, task: usize) -> Vec<Genome> {
        self.tasks[task].iter().map(|r| r.genome.clone()).collect()
    }
}

/// Fills every task with `pop_size_per_task` offspring by assortative
/// mating over the combined parent pool.
///
/// `parents[t]` holds task `t`'s selected parents in the unified space.
/// Pairs are drawn uniformly (two distinct members) from the combined pool.
/// A same-task pair mates and its children keep the task. An inter-task
/// pair mates with probability `rmp`, otherwise it is redrawn, and each of
/// its children joins one of the two parent tasks with probability 1/2.
/// SBX yields two children and OB-Scan one; OB-Scan densities come from the
/// combined pool. Children for a task that is already full are dropped.
pub fn mtec_generation(
    parents: &[Vec<Genome>],
    mapping: &UnifiedMapping,
    cfg: &MtecConfig,
    rng: &mut RngStream,
) -> Result<MtecOffspring> {
    cfg.validate()?;
    let k = parents.len();
    if k != mapping.n_tasks() {
        return Err(Error::arg(format!(
            "{k} parent pools for a mapping of {} tasks",
            mapping.n_tasks()
        )));
    }
    if let Some(t) = parents.iter().position(Vec::is_empty) {
        return Err(Error::State(format!("task {t} has an empty parent pool")));
    }
    let space = mapping.unified_space();
    let pool: Vec<(&Genome, usize)> = parents
        .iter()
        .enumerate()
        .flat_map(|(t, p)| p.iter().map(move |g| (g, t)))
        .collect();
    if let Some(g) = pool.iter().find(|(g, _)| g.len() != space.dim()) {
        return Err(Error::arg(format!(
            "parent has length {}, unified dimension is {}",
            g.0.len(),
            space.dim()
        )));
    }
    if pool.len() < 2 {
        return Err(Error::State("mating needs at least two parents in total".into()));
    }
    if cfg.rmp == 0.0 {
        if let Some(t) = parents.iter().position(|p| p.len() < 2) {
            return Err(Error::State(format!(
                "task {t} has a single parent and rmp = 0, so it can never be filled"
            )));
        }
    }

    let sbx = SbxParams::new(cfg.operator_policy.eta())?;
    let obscan = match cfg.operator_policy {
        OperatorPolicy::SbxOrObScanEqual { .. } => {
            let context: Vec<Genome> = pool.iter().map(|(g, _)| (*g).clone()).collect();
            Some(ObScanContext::new(&context, &ObScanParams::default())?)
        }
        OperatorPolicy::SbxOnly { .. } => None,
    };

    let target = cfg.pop_size_per_task;
    let mut out: Vec<Vec<OffspringRecord>> = (0..k).map(|_| Vec::with_capacity(target)).collect();
    let mut stats = MatingStats {
        inter_task_assignments: vec![0; k],
        ..MatingStats::default()
    };
    while out.iter().any(|o| o.len() < target) {
        let pick = index::sample(rng, pool.len(), 2);
        let (a, ta) = pool[pick.index(0)];
        let (b, tb) = pool[pick.index(1)];
        let inter = ta != tb;
        if inter {
            if cfg.rmp < 1.0 && rng.random::<f64>() >= cfg.rmp {
                stats.rejected_pairs += 1;
                continue;
            }
            stats.inter_task_matings += 1;
        } else {
            stats.intra_task_matings += 1;
        }

        let (operator, children) = match &obscan {
            Some(ctx) if rng.random::<bool>() => (Operator::ObScan, vec![ctx.offspring(&[a, b], rng)?]),
            _ => {
                let (c1, c2) = sbx_pair(a, b, &sbx, &space, rng)?;
                (Operator::Sbx, vec![c1, c2])
            }
        };
        for genome in children {
            let task = if inter {
                let t = if rng.random::<bool>() { ta } else { tb };
                stats.inter_task_assignments[t] += 1;
                t
            } else {
                ta
            };
            if out[task].len() < target {
                out[task].push(OffspringRecord {
                    genome,
                    task,
                    parent_tasks: [ta, tb],
                    operator,
                });
            } else {
                stats.discarded += 1;
            }
        }
    }
    Ok(MtecOffspring { tasks: out, stats })
}

/// A full multitask run with elitist (parents + offspring) truncation per
/// task. Populations are initialised uniformly in the unified cube; each
/// task scores genomes after mapping them back to its native box.
///
/// Returns the evaluated per-task populations of every generation,
/// starting with the initial one.
pub fn mtec_run(tasks: &[TaskSpec], cfg: &MtecConfig, rng: &mut RngStream) -> Result<Vec<Vec<Population>>> {
    cfg.validate()?;
    let mapping = UnifiedMapping::from_tasks(tasks)?;
    let space = mapping.unified_space();
    let n = cfg.pop_size_per_task;

    let score = |t: usize, pop: Population| {
        let task = &tasks[t];
        let f = |u: &[f64]| match mapping.deunify(u, t) {
            Ok(x) => (task.fitness)(&x),
            Err(_) => f64::NAN,
        };
        evaluate(pop, &f)
    };

    let mut current = Vec::with_capacity(tasks.len());
    for t in 0..tasks.len() {
        let members = (0..n)
            .map(|_| Individual::with_task(space.sample_uniform(rng), t))
            .collect();
        current.push(score(t, Population::new(members, 0))?);
    }
    let mut history = vec![current.clone()];
    for gen in 1..=cfg.generations {
        let pools: Vec<Vec<Genome>> = current.iter().map(|p| p.genomes().cloned().collect()).collect();
        let offspring = mtec_generation(&pools, &mapping, cfg, rng)?;
        let mut next = Vec::with_capacity(tasks.len());
        for (t, records) in offspring.tasks.into_iter().enumerate() {
            let kids = Population::new(
                records
                    .into_iter()
                    .map(|r| Individual::with_task(r.genome, t))
                    .collect(),
                gen,
            );
            let kids = score(t, kids)?;
            let mut merged = current[t].clone();
            merged.members.extend(kids.members);
            let mut survivors = select_truncation(&merged, n)?;
            survivors.generation = gen;
            next.push(survivors);
        }
        current = next;
        history.push(current.clone());
    }
    Ok(history)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SearchSpace;

    fn mapping(k: usize) -> UnifiedMapping {
        UnifiedMapping::new(vec![SearchSpace::cube(2, -2.0, 12.0).unwrap(); k]).unwrap()
    }

    fn clouds(rng: &mut RngStream, n: usize) -> Vec<Vec<Genome>> {
        let m = mapping(2);
        let a = crate::distributions::GaussianModel::diagonal(vec![2.0, 8.0], &[0.2, 1.0]).unwrap();
        let b = crate::distributions::GaussianModel::diagonal(vec![8.0, 2.0], &[1.0, 0.2]).unwrap();
        [a, b]
            .iter()
            .enumerate()
            .map(|(t, g)| {
                g.sample(n, rng)
                    .unwrap()
                    .iter()
                    .map(|x| m.unify(x, t).unwrap())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn fills_every_task_exactly() {
        let mut rng = RngStream::new(1);
        let pools = clouds(&mut rng, 50);
        for policy in [OperatorPolicy::SbxOnly { eta: 5.0 }, OperatorPolicy::SbxOrObScanEqual { eta: 5.0 }] {
            for rmp in [0.0, 0.3, 1.0] {
                let cfg = MtecConfig::new(rmp, policy, 37, 1).unwrap();
                let off = mtec_generation(&pools, &mapping(2), &cfg, &mut rng).unwrap();
                assert!(off.tasks.iter().all(|t| t.len() == 37));
                for (t, recs) in off.tasks.iter().enumerate() {
                    assert!(recs.iter().all(|r| r.task == t && r.genome.len() == 2));
                    assert!(recs.iter().all(|r| r.genome.iter().all(|v| (0.0..=1.0).contains(v))));
                }
            }
        }
    }

    #[test]
    fn zero_rmp_means_no_transfer() {
        let mut rng = RngStream::new(2);
        let pools = clouds(&mut rng, 40);
        let cfg = MtecConfig::new(0.0, OperatorPolicy::SbxOrObScanEqual { eta: 50.0 }, 200, 1).unwrap();
        let off = mtec_generation(&pools, &mapping(2), &cfg, &mut rng).unwrap();
        assert!(off.tasks.iter().flatten().all(|r| !r.mixed_parentage()));
        assert_eq!(off.stats.inter_task_matings, 0);
        assert!(off.stats.rejected_pairs > 0);
    }

    #[test]
    fn same_task_children_keep_task() {
        let mut rng = RngStream::new(3);
        let pools = clouds(&mut rng, 40);
        let cfg = MtecConfig::new(1.0, OperatorPolicy::SbxOnly { eta: 50.0 }, 100, 1).unwrap();
        let off = mtec_generation(&pools, &mapping(2), &cfg, &mut rng).unwrap();
        for recs in &off.tasks {
            for r in recs.iter().filter(|r| !r.mixed_parentage()) {
                assert_eq!(r.parent_tasks[0], r.task);
            }
        }
    }

    #[test]
    fn inter_task_assignment_is_fair() {
        let mut rng = RngStream::new(4);
        let pools = clouds(&mut rng, 100);
        let cfg = MtecConfig::new(1.0, OperatorPolicy::SbxOnly { eta: 50.0 }, 10_000, 1).unwrap();
        let off = mtec_generation(&pools, &mapping(2), &cfg, &mut rng).unwrap();
        let a = off.stats.inter_task_assignments;
        let total = (a[0] + a[1]) as f64;
        assert!(total >= 1e4);
        let frac = a[0] as f64 / total;
        assert!((frac - 0.5).abs() <= 3.0 * (0.25 / total).sqrt(), "{frac} of {total}");
        assert!((frac - 0.5).abs() <= 0.015);
    }

    #[test]
    fn obscan_policy_uses_both_operators() {
        let mut rng = RngStream::new(5);
        let pools = clouds(&mut rng, 60);
        let cfg = MtecConfig::new(1.0, OperatorPolicy::SbxOrObScanEqual { eta: 50.0 }, 300, 1).unwrap();
        let off = mtec_generation(&pools, &mapping(2), &cfg, &mut rng).unwrap();
        let all: Vec<_> = off.tasks.iter().flatten().collect();
        assert!(all.iter().any(|r| r.operator == Operator::ObScan));
        assert!(all.iter().any(|r| r.operator == Operator::Sbx));
    }

    #[test]
    fn deterministic() {
        let pools = clouds(&mut RngStream::new(6), 30);
        let cfg = MtecConfig::new(0.5, OperatorPolicy::SbxOrObScanEqual { eta: 5.0 }, 40, 1).unwrap();
        let a = mtec_generation(&pools, &mapping(2), &cfg, &mut RngStream::new(9)).unwrap();
        let b = mtec_generation(&pools, &mapping(2), &cfg, &mut RngStream::new(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors() {
        let mut rng = RngStream::new(7);
        let cfg = MtecConfig::new(0.5, OperatorPolicy::SbxOnly { eta: 5.0 }, 10, 1).unwrap();
        let pools = vec![vec![vec![0.1, 0.2]], vec![]];
        assert!(matches!(
            mtec_generation(&pools, &mapping(2), &cfg, &mut rng),
            Err(Error::State(_))
        ));
        let pools = vec![vec![vec![0.1, 0.2]], vec![vec![0.3, 0.3]]];
        let cfg0 = MtecConfig::new(0.0, OperatorPolicy::SbxOnly { eta: 5.0 }, 10, 1).unwrap();
        assert!(mtec_generation(&pools, &mapping(2), &cfg0, &mut rng).is_err());
        assert!(MtecConfig::new(1.5, OperatorPolicy::SbxOnly { eta: 5.0 }, 10, 1).is_err());
        assert!(MtecConfig::new(0.5, OperatorPolicy::SbxOnly { eta: 5.0 }, 0, 1).is_err());
    }

    #[test]
    fn run_improves_both_tasks() {
        let s = SearchSpace::cube(2, -5.0, 5.0).unwrap();
        let tasks = vec![
            TaskSpec::new(0, s.clone(), |x: &[f64]| -((x[0] - 1.0).powi(2) + (x[1] - 1.0).powi(2))),
            TaskSpec::new(1, s, |x: &[f64]| -((x[0] + 1.0).powi(2) + (x[1] - 2.0).powi(2))),
        ];
        let cfg = MtecConfig::new(0.3, OperatorPolicy::SbxOrObScanEqual { eta: 10.0 }, 30, 40).unwrap();
        let hist = mtec_run(&tasks, &cfg, &mut RngStream::new(8)).unwrap();
        assert_eq!(hist.len(), 41);
        for t in 0..2 {
            let first = hist[0][t].best_fitness().unwrap();
            let last = hist[40][t].best_fitness().unwrap();
            assert!(last >= first);
            assert!(last > -0.01, "task {t}: {last}");
            assert_eq!(hist[40][t].len(), 30);
        }
    }
}
