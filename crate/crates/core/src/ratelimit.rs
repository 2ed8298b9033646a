use std::sync::Mutex;
use std::time::{Duration, Instant};

/// Minimum spacing between consecutive calls; callers block in [`wait`](Self::wait)
/// or [`throttle`](Self::throttle).
#[derive(Debug)]
pub struct RateLimiter {
    min_interval: Duration,
    last: Mutex<Option<Instant>>,
}

impl RateLimiter {
    pub fn new(min_interval: Duration) -> Self {
        Self {
            min_interval,
            last: Mutex::new(None),
        }
    }

    /// `requests_per_second <= 0` disables limiting.
    pub fn per_second(requests_per_second: f64) -> Self {
        if requests_per_second <= 0.0 || !requests_per_second.is_finite() {
            Self::new(Duration::ZERO)
        } else {
            Self::new(Duration::from_secs_f64(1.0 / requests_per_second))
        }
    }

    pub fn wait(&self) {
        self.throttle(|| ());
    }

    /// Runs `f` after the spacing delay while holding the limiter, so at
    /// most one call is in flight at a time.
    pub fn throttle<T>(&self, f: impl FnOnce() -> T) -> T {
        let mut last = self.last.lock().expect("rate limiter poisoned");
        if let Some(prev) = *last {
            let elapsed = prev.elapsed();
            if elapsed < self.min_interval {
                std::thread::sleep(self.min_interval - elapsed);
            }
        }
        *last = Some(Instant::now());
        f()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spaces_calls() {
        let limiter = RateLimiter::new(Duration::from_millis(30));
        let start = Instant::now();
        limiter.wait();
        limiter.wait();
        limiter.wait();
        assert!(start.elapsed() >= Duration::from_millis(60));
    }

    #[test]
    fn zero_rate_is_unlimited() {
        let limiter = RateLimiter::per_second(0.0);
        let start = Instant::now();
        for _ in 0..100 {
            limiter.wait();
        }
        assert!(start.elapsed() < Duration::from_millis(50));
    }
}
