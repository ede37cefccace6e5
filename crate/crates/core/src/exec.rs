//! Data-parallel map with a deterministic, order-preserving result.
//!
//! With the `parallel` feature the work is spread over the rayon pool unless
//! the caller asks for [`ExecMode::Sequential`]. Reductions are always done by
//! the caller over the ordered output, so results do not depend on scheduling.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecMode {
    #[default]
    Parallel,
    Sequential,
}

pub fn map<T, R, F>(mode: ExecMode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == ExecMode::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// Like [`map`] but short-circuits on the first error in input order.
pub fn try_map<T, R, E, F>(mode: ExecMode, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map(mode, items, f).into_iter().collect()
}
