use std::time::Instant;

use crate::error::{Error, Result};

/// Cooperative wall-clock limit polled from inside the search loops.
#[derive(Clone, Debug, Default)]
pub(crate) struct Clock {
    deadline: Option<Instant>,
    ticks: u32,
}

impl Clock {
    pub(crate) fn new(deadline: Option<Instant>) -> Self {
        Clock { deadline, ticks: 0 }
    }

    /// Reads the time only every 256 calls.
    pub(crate) fn tick(&mut self) -> Result<()> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(256) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(Error::Timeout);
                }
            }
        }
        Ok(())
    }
}
