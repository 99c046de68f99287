//! Chunk-parallel drivers for the core sweeps.
//!
//! Every driver maps chunk indices to per-chunk results on a rayon pool,
//! collects them in chunk order and folds them sequentially, so the output
//! does not depend on the worker count.

use memsq_core::experiments::{
    band_chunk, escre_chunk, overlay_at, ppt_agreement_chunk, records_chunk, BandAxis, BandChunk, BandScanR, BinSeries,
    ContourReport, Ensemble, PptAgreement, SweepConfig,
};
use memsq_core::measures::{LogBase, MeasureRecord, Order};
use memsq_core::{Error, Result};
use rayon::prelude::*;
use rayon::ThreadPool;

/// Pool with `workers` threads, or one per available core.
pub fn pool(workers: Option<usize>) -> std::result::Result<ThreadPool, rayon::ThreadPoolBuildError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(k) = workers {
        b = b.num_threads(k.max(1));
    }
    b.build()
}

/// `f(0), f(1), ...` for every chunk of `config`, in chunk order.
pub fn map_chunks<T, F>(pool: &ThreadPool, config: &SweepConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    config.validate()?;
    pool.install(|| (0..config.chunk_count()).into_par_iter().map(&f).collect())
}

pub fn escre_max_sweep(pool: &ThreadPool, config: &SweepConfig) -> Result<BinSeries> {
    if config.ensemble != Ensemble::ZhslAll {
        return Err(Error::InvalidConfig("ESCRE sweep needs ensemble ZHSL_ALL"));
    }
    if !config.qset.contains(&Order::Infinity) {
        return Err(Error::InvalidConfig("ESCRE sweep needs q = inf in qset"));
    }
    let parts = map_chunks(pool, config, |k| escre_chunk(config, k))?;
    let mut total = BinSeries::new(config.binning());
    for p in &parts {
        total.merge(p)?;
    }
    Ok(total)
}

fn band(pool: &ThreadPool, config: &SweepConfig, axis: BandAxis, base: LogBase, keep: bool) -> Result<BandChunk> {
    let parts = map_chunks(pool, config, |k| band_chunk(config, axis, k, base, keep))?;
    let mut total =
        BandChunk { series: BinSeries::new(config.binning()), contours: ContourReport::default(), records: Vec::new() };
    for p in parts {
        total.merge(p)?;
    }
    Ok(total)
}

pub fn band_scan_r(pool: &ThreadPool, config: &SweepConfig, base: LogBase, keep: bool) -> Result<BandScanR> {
    if config.ensemble == Ensemble::MemsGrid {
        return Err(Error::InvalidConfig("band scan needs ensemble IH_ONLY or ZHSL_ALL"));
    }
    let scan = band(pool, config, BandAxis::ParticipationRatio, base, keep)?;
    let overlay = scan.series.bin_centers().into_iter().map(overlay_at).collect();
    Ok(BandScanR { scan, overlay })
}

pub fn band_scan_lambda(pool: &ThreadPool, config: &SweepConfig, base: LogBase, keep: bool) -> Result<BandChunk> {
    if config.ensemble != Ensemble::IhOnly {
        return Err(Error::InvalidConfig("lambda band scan needs ensemble IH_ONLY"));
    }
    band(pool, config, BandAxis::LambdaMax, base, keep)
}

/// Measure records for all samples, in draw order.
pub fn records(pool: &ThreadPool, config: &SweepConfig, base: LogBase) -> Result<Vec<MeasureRecord>> {
    let parts = map_chunks(pool, config, |k| records_chunk(config, k, base))?;
    Ok(parts.into_iter().flatten().collect())
}

pub fn ppt_agreement(pool: &ThreadPool, config: &SweepConfig) -> Result<PptAgreement> {
    let parts = map_chunks(pool, config, |k| ppt_agreement_chunk(config, k))?;
    let mut total = PptAgreement::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}
