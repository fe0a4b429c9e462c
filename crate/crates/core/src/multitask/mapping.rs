use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::{Error, Genome, Result, SearchSpace};

/// A task: an id, its native search box and a fitness to maximise there.
#[derive(Clone)]
pub struct TaskSpec {
    pub task_id: usize,
    pub native_space: SearchSpace,
    pub fitness: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl TaskSpec {
    pub fn new<F>(task_id: usize, native_space: SearchSpace, fitness: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            task_id,
            native_space,
            fitness: Arc::new(fitness),
        }
    }
}

impl fmt::Debug for TaskSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TaskSpec")
            .field("task_id", &self.task_id)
            .field("native_space", &self.native_space)
            .finish_non_exhaustive()
    }
}

/// Affine maps between each task's native box and the unified cube.
///
/// Task `t`'s native box is sent onto the first `d_t` coordinates of
/// `[0, 1]^d`; the remaining coordinates are set to 0.5 by [`unify`] and
/// ignored by [`deunify`]. Inputs outside their box are clipped and counted.
///
/// [`unify`]: UnifiedMapping::unify
/// [`deunify`]: UnifiedMapping::deunify
#[derive(Debug)]
pub struct UnifiedMapping {
    spaces: Vec<SearchSpace>,
    dim: usize,
    clipped: AtomicU64,
}

impl Clone for UnifiedMapping {
    fn clone(&self) -> Self {
        Self {
            spaces: self.spaces.clone(),
            dim: self.dim,
            clipped: AtomicU64::new(self.clip_count()),
        }
    }
}

impl UnifiedMapping {
    pub fn new(native_spaces: Vec<SearchSpace>) -> Result<Self> {
        let dim = native_spaces
            .iter()
            .map(SearchSpace::dim)
            .max()
            .ok_or_else(|| Error::arg("unified mapping needs at least one task"))?;
        Ok(Self {
            spaces: native_spaces,
            dim,
            clipped: AtomicU64::new(0),
        })
    }

    /// Mapping for `tasks`, indexed by position. Task ids must be unique.
    pub fn from_tasks(tasks: &[TaskSpec]) -> Result<Self> {
        for (i, t) in tasks.iter().enumerate() {
            if tasks[..i].iter().any(|o| o.task_id == t.task_id) {
                return Err(Error::arg(format!("duplicate task id {}", t.task_id)));
            }
        }
        Self::new(tasks.iter().map(|t| t.native_space.clone()).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_tasks(&self) -> usize {
        self.spaces.len()
    }

    pub fn native_space(&self, task: usize) -> Result<&SearchSpace> {
        self.spaces
            .get(task)
            .ok_or_else(|| Error::arg(format!("no task with index {task}")))
    }

    /// The unified cube `[0, 1]^d`.
    pub fn unified_space(&self) -> SearchSpace {
        SearchSpace::cube(self.dim, 0.0, 1.0).expect("positive dimension")
    }

    /// How many coordinates have been clipped so far.
    pub fn clip_count(&self) -> u64 {
        self.clipped.load(Ordering::Relaxed)
    }

    pub fn unify(&self, x: &[f64], task: usize) -> Result<Genome> {
        let space = self.native_space(task)?;
        space.check_len(x)?;
        let mut u = vec![0.5; self.dim];
        for (i, &v) in x.iter().enumerate() {
            let (lo, hi) = (space.lower()[i], space.upper()[i]);
            u[i] = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
            if !(0.0..=1.0).contains(&u[i]) {
                u[i] = u[i].clamp(0.0, 1.0);
                self.clipped.fetch_add(1, Ordering::Relaxed);
            }
        }
        Ok(u)
    }

    pub fn deunify(&self, u: &[f64], task: usize) -> Result<Genome> {
        let space = self.native_space(task)?;
        if u.len() != self.dim {
            return Err(Error::arg(format!(
                "unified genome has length {}, expected {}",
                u.len(),
                self.dim
            )));
        }
        let mut x = Vec::with_capacity(space.dim());
        for i in 0..space.dim() {
            let mut v = u[i];
            if !(0.0..=1.0).contains(&v) {
                v = v.clamp(0.0, 1.0);
                self.clipped.fetch_add(1, Ordering::Relaxed);
            }
            let (lo, hi) = (space.lower()[i], space.upper()[i]);
            x.push(lo + v * (hi - lo));
        }
        Ok(x)
    }
}
