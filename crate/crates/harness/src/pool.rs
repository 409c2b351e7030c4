//! Bounded worker pool for embarrassingly parallel run grids.
//!
//! Jobs are indexed; results land in their slot regardless of completion
//! order, so parallel and serial execution produce identical output.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "SADDLE_NGD_THREADS";

/// Worker count: explicit request, else the environment cap, else the number
/// of logical CPUs.
pub fn resolve_threads(requested: Option<usize>) -> usize {
    if let Some(n) = requested {
        return n.max(1);
    }
    if let Ok(v) = std::env::var(THREADS_ENV) {
        if let Ok(n) = v.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Runs `jobs` closures over at most `threads` workers and returns their
/// results in job order.
pub fn run_jobs<T, F>(jobs: Vec<F>, threads: usize) -> Vec<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    let n = jobs.len();
    if n == 0 {
        return Vec::new();
    }
    let threads = threads.clamp(1, n);
    if threads == 1 {
        return jobs.into_iter().map(|f| f()).collect();
    }

    let jobs: Vec<Mutex<Option<F>>> = jobs.into_iter().map(|f| Mutex::new(Some(f))).collect();
    let slots: Vec<Mutex<Option<T>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let job = jobs[i].lock().unwrap().take().expect("job taken twice");
                let result = job();
                *slots[i].lock().unwrap() = Some(result);
            });
        }
    });

    slots
        .into_iter()
        .map(|s| s.into_inner().unwrap().expect("missing job result"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_arrive_in_job_order() {
        let jobs: Vec<_> = (0..32)
            .map(|i| {
                move || {
                    if i % 3 == 0 {
                        std::thread::sleep(std::time::Duration::from_millis(2));
                    }
                    i * i
                }
            })
            .collect();
        let parallel = run_jobs(jobs, 8);
        let expected: Vec<_> = (0..32).map(|i| i * i).collect();
        assert_eq!(parallel, expected);
    }

    #[test]
    fn serial_path_matches() {
        let jobs: Vec<_> = (0..5).map(|i| move || i + 1).collect();
        assert_eq!(run_jobs(jobs, 1), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn explicit_thread_request_wins() {
        assert_eq!(resolve_threads(Some(3)), 3);
        assert!(resolve_threads(None) >= 1);
    }

    #[test]
    fn environment_variable_caps_the_pool() {
        // Only this test touches the variable within the lib test binary.
        std::env::set_var(THREADS_ENV, "2");
        assert_eq!(resolve_threads(None), 2);
        std::env::set_var(THREADS_ENV, "not a number");
        assert!(resolve_threads(None) >= 1);
        std::env::remove_var(THREADS_ENV);
    }
}
