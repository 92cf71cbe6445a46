//! Data-parallel helpers. With the `parallel` feature disabled, or when a
//! caller asks for sequential execution, everything runs on the calling
//! thread; results are identical either way.

/// `(0..n).map(f).collect()`, optionally spread over the rayon pool.
pub fn map_indices<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

/// `items.iter().map(f).collect()`, optionally in parallel.
pub fn map_slice<S, T, F>(items: &[S], parallel: bool, f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    map_indices(items.len(), parallel, |i| f(&items[i]))
}

/// Whether the crate was built with data parallelism.
pub const fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_and_parallel_agree() {
        let a = map_indices(100, false, |i| i * i);
        let b = map_indices(100, true, |i| i * i);
        assert_eq!(a, b);
        assert_eq!(map_slice(&[1, 2, 3], true, |x| x + 1), vec![2, 3, 4]);
    }
}
