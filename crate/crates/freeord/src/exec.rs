//! Execution mode for bulk sweeps: data-parallel via rayon when the
//! `parallel` feature is enabled, with a sequential fallback that is
//! always available and bit-identical in results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecMode {
    Sequential,
    /// Uses rayon when compiled in; otherwise behaves as `Sequential`.
    #[default]
    Parallel,
}

impl ExecMode {
    /// Maps `f` over `items`, preserving order.
    pub fn map<T, U, F>(self, items: Vec<T>, f: F) -> Vec<U>
    where
        T: Send,
        U: Send,
        F: Fn(T) -> U + Sync + Send,
    {
        match self {
            ExecMode::Sequential => items.into_iter().map(f).collect(),
            ExecMode::Parallel => {
                #[cfg(feature = "parallel")]
                {
                    items.into_par_iter().map(f).collect()
                }
                #[cfg(not(feature = "parallel"))]
                {
                    items.into_iter().map(f).collect()
                }
            }
        }
    }

    /// Whether `f` holds for every item.
    pub fn all<T, F>(self, items: Vec<T>, f: F) -> bool
    where
        T: Send,
        F: Fn(T) -> bool + Sync + Send,
    {
        match self {
            ExecMode::Sequential => items.into_iter().all(f),
            ExecMode::Parallel => {
                #[cfg(feature = "parallel")]
                {
                    items.into_par_iter().all(f)
                }
                #[cfg(not(feature = "parallel"))]
                {
                    items.into_iter().all(f)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let items: Vec<u64> = (0..1000).collect();
        let f = |x: u64| x.wrapping_mul(x).rotate_left(7);
        assert_eq!(
            ExecMode::Sequential.map(items.clone(), f),
            ExecMode::Parallel.map(items, f)
        );
    }

    #[test]
    fn all_short_circuits_consistently() {
        let items: Vec<u32> = (0..100).collect();
        assert!(!ExecMode::Sequential.all(items.clone(), |x| x < 50));
        assert!(!ExecMode::Parallel.all(items.clone(), |x| x < 50));
        assert!(ExecMode::Parallel.all(items, |x| x < 100));
    }
}
