use fsp_core::formats::{SkeletonFile, StatsFile};
use fsp_core::skeleton::accumulate_stats;
use fsp_core::{Error, Result};

use super::StageClock;
use crate::args::StatsArgs;
use crate::svg;

pub fn run(args: &StatsArgs) -> Result<()> {
    let mut clock = StageClock::new(args.timings);

    let file = SkeletonFile::load(&args.input)?;
    clock.stage("load");

    let skeletons = file.to_skeletons();
    let accumulators = accumulate_stats(skeletons.iter());
    let stats = StatsFile::from_accumulators(&accumulators);
    clock.stage("summarize");

    stats.save(&args.output)?;
    if let Some(path) = &args.svg {
        let chart = svg::stats_box_plots(&stats);
        std::fs::write(path, chart).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    clock.stage("write");
    Ok(())
}
