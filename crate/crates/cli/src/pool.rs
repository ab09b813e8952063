//! A minimal worker pool for sweep evaluation: inputs are split into
//! contiguous chunks, each worker computes its chunk, and results are
//! reassembled in input order so output never depends on scheduling.

/// Applies `f` to every item on up to `jobs` threads, preserving order.
pub fn map_ordered<T, R, F>(jobs: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let n = items.len();
    if n == 0 {
        return Vec::new();
    }
    let workers = jobs.max(1).min(n);
    if workers == 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = n.div_ceil(workers);
    let mut parts: Vec<Vec<R>> = Vec::with_capacity(workers);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let lo = w * chunk;
            let hi = ((w + 1) * chunk).min(n);
            if lo >= hi {
                break;
            }
            let slice = &items[lo..hi];
            let f = &f;
            handles.push(scope.spawn(move || slice.iter().map(f).collect::<Vec<R>>()));
        }
        for h in handles {
            parts.push(h.join().expect("worker panicked"));
        }
    });
    parts.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_independent_of_jobs() {
        let items: Vec<u64> = (0..101).collect();
        let one = map_ordered(1, &items, |&x| x * x);
        let many = map_ordered(7, &items, |&x| x * x);
        assert_eq!(one, many);
        assert_eq!(one[100], 10000);
    }
}
