//! Independent sweep points, optionally evaluated on a rayon pool. Results
//! are returned in sweep order regardless of completion order.

use rayon::prelude::*;

use crate::error::CliError;

pub fn run_points<T, F>(values: &[f64], parallel: usize, f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(f64) -> Result<T, CliError> + Sync,
{
    if parallel <= 1 {
        return values.iter().map(|v| f(*v)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(parallel).build()?;
    pool.install(|| values.par_iter().map(|v| f(*v)).collect())
}
