//! Execution mode switch for the data-parallel paths.
//!
//! With the `parallel` feature disabled, [`ExecMode::Parallel`] silently runs
//! sequentially, so callers never need their own `cfg` guards.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

impl ExecMode {
    /// True when work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecMode::Parallel
    }

    /// `(0..n).map(f).collect()` in the chosen mode. Output order is by index.
    pub fn map_range<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == ExecMode::Parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// `items.iter().map(f).collect()` in the chosen mode.
    pub fn map_slice<I, T, F>(self, items: &[I], f: F) -> Vec<T>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == ExecMode::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let f = |i: usize| i * i;
        assert_eq!(
            ExecMode::Sequential.map_range(100, f),
            ExecMode::Parallel.map_range(100, f)
        );
        let xs: Vec<u32> = (0..50).collect();
        assert_eq!(
            ExecMode::Sequential.map_slice(&xs, |x| x + 1),
            ExecMode::Parallel.map_slice(&xs, |x| x + 1)
        );
    }
}
