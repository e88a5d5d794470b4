//! Thread-pool backed [`PointMap`].

use dampwave_core::quadrature::PointMap;
use dampwave_core::Result;
use rayon::prelude::*;

use crate::LabError;

/// Runs per-point evaluations on a dedicated rayon pool. Results come back in
/// index order, so output does not depend on the number of threads.
pub struct RayonMap {
    pool: rayon::ThreadPool,
}

impl RayonMap {
    pub fn new(jobs: usize) -> std::result::Result<Self, LabError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| LabError::Config(format!("cannot start {jobs} worker threads: {e}")))?;
        Ok(RayonMap { pool })
    }
}

impl PointMap for RayonMap {
    fn map_points(&self, n: usize, f: &(dyn Fn(usize) -> Result<f64> + Sync)) -> Result<Vec<f64>> {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}
