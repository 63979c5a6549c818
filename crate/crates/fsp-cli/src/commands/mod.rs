pub mod reconstruct;
pub mod remap;
pub mod stats;
pub mod synth;

use std::time::Instant;

/// Wall-clock stage timer behind the `--timings` flags; prints nothing
/// unless enabled.
pub(crate) struct StageClock {
    enabled: bool,
    last: Instant,
}

impl StageClock {
    pub(crate) fn new(enabled: bool) -> Self {
        StageClock {
            enabled,
            last: Instant::now(),
        }
    }

    /// Closes the current stage under `name` and starts the next one.
    pub(crate) fn stage(&mut self, name: &str) {
        let now = Instant::now();
        if self.enabled {
            let ms = now.duration_since(self.last).as_secs_f64() * 1e3;
            println!("timing {name}: {ms:.2} ms");
        }
        self.last = now;
    }
}
