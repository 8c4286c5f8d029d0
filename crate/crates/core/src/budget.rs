//! Wall-clock and memory ceilings for long computations.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Budget {
    deadline: Option<Instant>,
    limit: Option<Duration>,
    /// Rough cap on the number of stored integer entries.
    pub max_entries: Option<usize>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget::unlimited()
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { deadline: None, limit: None, max_entries: None }
    }

    pub fn seconds(secs: f64) -> Self {
        let limit = Duration::from_secs_f64(secs.max(0.0));
        Budget { deadline: Some(Instant::now() + limit), limit: Some(limit), max_entries: None }
    }

    pub fn with_max_entries(mut self, n: usize) -> Self {
        self.max_entries = Some(n);
        self
    }

    /// Reads `FPG_BUDGET_SECONDS`; unlimited when unset or unparsable.
    pub fn from_env() -> Self {
        match std::env::var("FPG_BUDGET_SECONDS").ok().and_then(|s| s.trim().parse::<f64>().ok()) {
            Some(s) => Budget::seconds(s),
            None => Budget::unlimited(),
        }
    }

    /// A fresh budget with the same limits, starting now.
    pub fn restart(&self) -> Self {
        Budget {
            deadline: self.limit.map(|l| Instant::now() + l),
            limit: self.limit,
            max_entries: self.max_entries,
        }
    }

    /// The tighter of `self` and a fresh `secs`-second limit.
    pub fn capped(&self, secs: f64) -> Self {
        let other = Budget::seconds(secs);
        match self.deadline {
            Some(d) if d < other.deadline.unwrap() => self.clone(),
            _ => Budget { max_entries: self.max_entries, ..other },
        }
    }

    pub fn check(&self, what: &'static str) -> Result<()> {
        if let Some(d) = self.deadline {
            if Instant::now() > d {
                let secs = self.limit.map_or(0.0, |l| l.as_secs_f64());
                return Err(Error::Budget { what, detail: format!("time limit of {secs:.1}s reached") });
            }
        }
        Ok(())
    }

    pub fn check_entries(&self, what: &'static str, n: usize) -> Result<()> {
        match self.max_entries {
            Some(m) if n > m => Err(Error::Budget { what, detail: format!("{n} entries exceed the cap of {m}") }),
            _ => Ok(()),
        }
    }
}
