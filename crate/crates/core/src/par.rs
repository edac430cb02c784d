//! Order-preserving batch map over independent work items. Uses rayon when
//! the `parallel` feature is on and the caller asks for it.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    #[default]
    Auto,
    Sequential,
}

impl Parallelism {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Auto
    }
}

/// `items.iter().map(f)` with results in input order.
pub fn map<T, R, F>(items: &[T], mode: Parallelism, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved_in_both_modes() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map(&xs, Parallelism::Auto, |x| x * x);
        let b = map(&xs, Parallelism::Sequential, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(a[999], 999 * 999);
    }
}
