use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

/// Limits on a long computation. The default is unlimited.
#[derive(Clone, Debug, Default)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub deadline: Option<Instant>,
    pub cancel: Option<Arc<AtomicBool>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("budget exhausted after {0} nodes")]
pub struct BudgetExceeded(pub u64);

impl Budget {
    pub fn unlimited() -> Budget {
        Budget::default()
    }

    pub fn nodes(n: u64) -> Budget {
        Budget { max_nodes: Some(n), ..Budget::default() }
    }

    pub fn with_secs(mut self, secs: f64) -> Budget {
        self.deadline = Some(Instant::now() + Duration::from_secs_f64(secs));
        self
    }

    pub fn with_cancel(mut self, flag: Arc<AtomicBool>) -> Budget {
        self.cancel = Some(flag);
        self
    }

    /// Fails once `used` nodes exceed the limit, the deadline has passed or
    /// the cancel flag is set. The clock is read every 1024 nodes.
    pub fn check(&self, used: u64) -> Result<(), BudgetExceeded> {
        if self.max_nodes.is_some_and(|m| used > m) {
            return Err(BudgetExceeded(used));
        }
        if used.is_multiple_of(1024) {
            if self.deadline.is_some_and(|d| Instant::now() >= d) {
                return Err(BudgetExceeded(used));
            }
            if self.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed)) {
                return Err(BudgetExceeded(used));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_limit() {
        let b = Budget::nodes(10);
        assert!(b.check(10).is_ok());
        assert_eq!(b.check(11), Err(BudgetExceeded(11)));
        assert!(Budget::unlimited().check(u64::MAX - 1).is_ok());
    }

    #[test]
    fn cancel_flag() {
        let flag = Arc::new(AtomicBool::new(false));
        let b = Budget::unlimited().with_cancel(flag.clone());
        assert!(b.check(1024).is_ok());
        flag.store(true, Ordering::Relaxed);
        assert!(b.check(2048).is_err());
    }
}
