//! Monte Carlo sweeps and analytic checks.
//!
//! Sweeps are split into fixed-size chunks. Chunk `k` always draws from
//! `split_stream(seed, k)`, and per-chunk results combine with
//! [`BinSeries::merge`], which is commutative and associative. Running the
//! chunks in any order or on any number of workers yields identical output.

use alloc::vec::Vec;
use core::ops::Range;

use crate::density::DensityMatrix4;
use crate::error::{Error, Result};
use crate::families::{ih_state, mems, mems_participation_ratio, mems_x_from_r, Spectrum4};
use crate::linalg::{hermitian_eigensystem, Subsystem};
use crate::math::sqrt;
use crate::measures::{
    concurrence, concurrence_ih, concurrence_with, conditional_renyi, eq7_bound, measure_record, participation_ratio,
    EntropyParams, LogBase, MeasureRecord, Order, StateSpectra, ENTANGLED_TOL,
};
use crate::sampler::{ih_random, ih_spectrum, split_stream, zhsl_state, SeedSpec, Stream};

/// Samples per chunk. Part of the reproducibility contract: changing it
/// changes which stream each sample comes from.
pub const CHUNK_SIZE: u64 = 4096;

/// Slack allowed on the analytic contours and on the IH concurrence bound.
pub const CONTOUR_TOL: f64 = 1e-9;

/// Upper end of the participation-ratio range on which the IH concurrence
/// bound is asserted; outside it violations are only counted.
pub const EQ7_ASSERTED_MAX_R: f64 = 1.8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ensemble {
    /// ZHSL states over all of state space.
    ZhslAll,
    /// IH states with flat-simplex spectra.
    IhOnly,
    /// `mems(x)` on an even grid `x = i / (samples - 1)`.
    MemsGrid,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub samples: u64,
    pub bins: usize,
    /// Closed interval of the binning variable.
    pub range: (f64, f64),
    /// Orders checked by the classical-inequality classifier.
    pub qset: Vec<Order>,
    pub seed: SeedSpec,
    pub ensemble: Ensemble,
}

impl SweepConfig {
    /// 10^6 ZHSL samples, 40 bins on `[1, 3]`, `q = inf` only.
    pub fn escre_default(seed: SeedSpec) -> Self {
        SweepConfig {
            samples: 1_000_000,
            bins: 40,
            range: (1.0, 3.0),
            qset: alloc::vec![Order::Infinity],
            seed,
            ensemble: Ensemble::ZhslAll,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(Error::InvalidConfig("samples must be at least 1"));
        }
        if self.bins < 2 {
            return Err(Error::InvalidConfig("bins must be at least 2"));
        }
        let (lo, hi) = self.range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidConfig("range must be a nonempty finite interval"));
        }
        if self.chunk_count() > crate::sampler::MAX_CHUNK {
            return Err(Error::InvalidConfig("too many samples"));
        }
        for o in &self.qset {
            if let Order::Finite(q) = o {
                Order::new(*q)?;
            }
        }
        Ok(())
    }

    pub fn chunk_count(&self) -> u64 {
        self.samples.div_ceil(CHUNK_SIZE)
    }

    /// Global sample indices covered by `chunk`.
    pub fn chunk_range(&self, chunk: u64) -> Range<u64> {
        let start = (chunk * CHUNK_SIZE).min(self.samples);
        let end = (start + CHUNK_SIZE).min(self.samples);
        start..end
    }

    pub fn binning(&self) -> Binning {
        Binning { lo: self.range.0, hi: self.range.1, bins: self.bins }
    }
}

/// Equal-width bins on a closed interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Binning {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl Binning {
    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }

    /// Bin holding `x`; the upper edge belongs to the last bin.
    pub fn index(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo && x <= self.hi) {
            return None;
        }
        let k = ((x - self.lo) / self.width()) as usize;
        Some(k.min(self.bins - 1))
    }

    pub fn center(&self, k: usize) -> f64 {
        self.lo + (k as f64 + 0.5) * self.width()
    }

    pub fn edges(&self, k: usize) -> (f64, f64) {
        (self.lo + k as f64 * self.width(), self.lo + (k + 1) as f64 * self.width())
    }
}

fn max_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Statistics of one bin. `max_c` and `min_c` range over the qualifying
/// states only (entangled for band scans, ESCRE for the ESCRE sweep).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BinStats {
    pub count: u64,
    pub qualifying: u64,
    pub max_c: Option<f64>,
    pub min_c: Option<f64>,
    /// Qualifying states with `S_inf(A|B) < 0`.
    pub negative_cond: u64,
}

impl BinStats {
    fn merge(&mut self, other: &BinStats) {
        self.count += other.count;
        self.qualifying += other.qualifying;
        self.max_c = max_opt(self.max_c, other.max_c);
        self.min_c = min_opt(self.min_c, other.min_c);
        self.negative_cond += other.negative_cond;
    }
}

/// Binned sweep result.
#[derive(Clone, Debug, PartialEq)]
pub struct BinSeries {
    pub binning: Binning,
    pub bins: Vec<BinStats>,
    pub samples: u64,
    pub out_of_range: u64,
}

impl BinSeries {
    pub fn new(binning: Binning) -> Self {
        BinSeries { binning, bins: alloc::vec![BinStats::default(); binning.bins], samples: 0, out_of_range: 0 }
    }

    /// Adds one sample at binning coordinate `x`.
    pub fn record(&mut self, x: f64, c: f64, qualifies: bool, negative_cond: bool) {
        self.samples += 1;
        let Some(k) = self.binning.index(x) else {
            self.out_of_range += 1;
            return;
        };
        let b = &mut self.bins[k];
        b.count += 1;
        if qualifies {
            b.qualifying += 1;
            b.max_c = max_opt(b.max_c, Some(c));
            b.min_c = min_opt(b.min_c, Some(c));
            if negative_cond {
                b.negative_cond += 1;
            }
        }
    }

    pub fn merge(&mut self, other: &BinSeries) -> Result<()> {
        if self.binning != other.binning {
            return Err(Error::InvalidConfig("cannot merge series with different binning"));
        }
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            a.merge(b);
        }
        self.samples += other.samples;
        self.out_of_range += other.out_of_range;
        Ok(())
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        (0..self.bins.len()).map(|k| self.binning.center(k)).collect()
    }

    pub fn counts(&self) -> Vec<u64> {
        self.bins.iter().map(|b| b.count).collect()
    }

    pub fn max_c(&self) -> Vec<Option<f64>> {
        self.bins.iter().map(|b| b.max_c).collect()
    }

    /// Bin with the largest `max_c`; the lowest index wins ties.
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (k, b) in self.bins.iter().enumerate() {
            if let Some(c) = b.max_c {
                if best.is_none_or(|(_, m)| c > m) {
                    best = Some((k, c));
                }
            }
        }
        best.map(|(k, _)| k)
    }

    /// Indices of bins whose sample count is below `floor`.
    pub fn undersampled(&self, floor: u64) -> Vec<usize> {
        self.bins.iter().enumerate().filter(|(_, b)| b.count < floor).map(|(k, _)| k).collect()
    }
}

fn draw(config: &SweepConfig, rng: &mut Stream, index: u64) -> Result<DensityMatrix4> {
    Ok(match config.ensemble {
        Ensemble::ZhslAll => zhsl_state(rng),
        Ensemble::IhOnly => ih_random(rng).1,
        Ensemble::MemsGrid => {
            let denom = config.samples.saturating_sub(1).max(1) as f64;
            mems((index as f64 / denom).min(1.0))?
        }
    })
}

/// Participation ratio, classical-inequality flag and concurrence of one
/// state. The concurrence is only computed when the flag holds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EscreProbe {
    pub participation_ratio: f64,
    pub classical_ineq_hold: bool,
    pub concurrence: Option<f64>,
}

impl EscreProbe {
    pub fn of(rho: &DensityMatrix4, qset: &[Order]) -> Result<Self> {
        let eig = hermitian_eigensystem(rho.matrix())?;
        let spectra = StateSpectra::from_eigenvalues(rho, eig.values)?;
        let holds = spectra.classical_inequalities_hold(qset);
        let concurrence = if holds { Some(concurrence_with(rho, &eig)?.value) } else { None };
        Ok(EscreProbe { participation_ratio: participation_ratio(rho), classical_ineq_hold: holds, concurrence })
    }

    /// Entangled while satisfying every classical inequality.
    pub fn is_escre(&self) -> bool {
        self.concurrence.is_some_and(|c| c > ENTANGLED_TOL)
    }
}

/// ESCRE statistics for one chunk, binned by participation ratio.
pub fn escre_chunk(config: &SweepConfig, chunk: u64) -> Result<BinSeries> {
    let mut series = BinSeries::new(config.binning());
    let mut rng = split_stream(config.seed, chunk);
    for i in config.chunk_range(chunk) {
        let rho = draw(config, &mut rng, i)?;
        let probe = EscreProbe::of(&rho, &config.qset)?;
        series.record(probe.participation_ratio, probe.concurrence.unwrap_or(0.0), probe.is_escre(), false);
    }
    Ok(series)
}

/// Per-bin maximum concurrence among entangled states that satisfy the
/// classical inequalities for every order in `config.qset`.
pub fn escre_max_sweep(config: &SweepConfig) -> Result<BinSeries> {
    config.validate()?;
    if !config.qset.contains(&Order::Infinity) {
        return Err(Error::InvalidConfig("ESCRE sweep needs q = inf in qset"));
    }
    let mut total = BinSeries::new(config.binning());
    for chunk in 0..config.chunk_count() {
        total.merge(&escre_chunk(config, chunk)?)?;
    }
    Ok(total)
}

/// Binning coordinate for band scans.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BandAxis {
    ParticipationRatio,
    LambdaMax,
}

/// Fig. 2 regions by largest eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Zone {
    /// `lambda_max >= 1/2`: `2 lambda - 1 <= C <= lambda`.
    I,
    /// `1/3 <= lambda_max < 1/2`: `0 <= C <= 3 lambda - 1`.
    II,
    /// `lambda_max < 1/3`: `C = 0`.
    III,
}

impl Zone {
    pub fn of(lambda_max: f64) -> Zone {
        if lambda_max >= 0.5 {
            Zone::I
        } else if lambda_max >= 1.0 / 3.0 {
            Zone::II
        } else {
            Zone::III
        }
    }

    pub fn index(self) -> usize {
        match self {
            Zone::I => 0,
            Zone::II => 1,
            Zone::III => 2,
        }
    }

    /// `(min C, max C)` allowed at `lambda_max` in this zone.
    pub fn contour(self, lambda_max: f64) -> (f64, f64) {
        match self {
            Zone::I => (2.0 * lambda_max - 1.0, lambda_max),
            Zone::II => (0.0, 3.0 * lambda_max - 1.0),
            Zone::III => (0.0, 0.0),
        }
    }
}

/// How far `c` lies outside the contours at `lambda_max`; zero inside.
pub fn contour_excess(lambda_max: f64, c: f64) -> f64 {
    let (lo, hi) = Zone::of(lambda_max).contour(lambda_max);
    (lo - c).max(c - hi).max(0.0)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ZoneStats {
    pub count: u64,
    pub violations: u64,
    pub max_excess: f64,
}

/// Contour check tallies for zones I, II, III.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ContourReport {
    pub zones: [ZoneStats; 3],
}

impl ContourReport {
    pub fn record(&mut self, lambda_max: f64, c: f64) {
        let z = &mut self.zones[Zone::of(lambda_max).index()];
        let excess = contour_excess(lambda_max, c);
        z.count += 1;
        if excess > CONTOUR_TOL {
            z.violations += 1;
        }
        z.max_excess = z.max_excess.max(excess);
    }

    pub fn merge(&mut self, other: &ContourReport) {
        for (a, b) in self.zones.iter_mut().zip(&other.zones) {
            a.count += b.count;
            a.violations += b.violations;
            a.max_excess = a.max_excess.max(b.max_excess);
        }
    }

    pub fn total_violations(&self) -> u64 {
        self.zones.iter().map(|z| z.violations).sum()
    }
}

/// Output of one band-scan chunk, or of a whole scan after merging.
#[derive(Clone, Debug, PartialEq)]
pub struct BandChunk {
    pub series: BinSeries,
    pub contours: ContourReport,
    pub records: Vec<MeasureRecord>,
}

impl BandChunk {
    pub fn merge(&mut self, other: BandChunk) -> Result<()> {
        self.series.merge(&other.series)?;
        self.contours.merge(&other.contours);
        self.records.extend(other.records);
        Ok(())
    }
}

/// Full measure records for one chunk, binned along `axis`. Entangled
/// states qualify; `negative_cond` counts those with `S_inf(A|B) < 0`.
/// With `keep_records = false` only the aggregates are returned.
pub fn band_chunk(config: &SweepConfig, axis: BandAxis, chunk: u64, base: LogBase, keep_records: bool) -> Result<BandChunk> {
    let mut out = BandChunk {
        series: BinSeries::new(config.binning()),
        contours: ContourReport::default(),
        records: Vec::new(),
    };
    let mut rng = split_stream(config.seed, chunk);
    for i in config.chunk_range(chunk) {
        let rho = draw(config, &mut rng, i)?;
        let rec = measure_record(&rho, &config.qset, base)?;
        rec.check_invariants()?;
        let x = match axis {
            BandAxis::ParticipationRatio => rec.participation_ratio,
            BandAxis::LambdaMax => rec.lambda_max,
        };
        out.series.record(x, rec.concurrence, rec.entangled, rec.cond_renyi_inf_ab < 0.0);
        out.contours.record(rec.lambda_max, rec.concurrence);
        if keep_records {
            out.records.push(rec);
        }
    }
    Ok(out)
}

fn band_scan(config: &SweepConfig, axis: BandAxis, base: LogBase, keep_records: bool) -> Result<BandChunk> {
    config.validate()?;
    let mut total = BandChunk { series: BinSeries::new(config.binning()), contours: ContourReport::default(), records: Vec::new() };
    for chunk in 0..config.chunk_count() {
        total.merge(band_chunk(config, axis, chunk, base, keep_records)?)?;
    }
    Ok(total)
}

/// One point of the analytic overlay drawn under the R band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlayPoint {
    pub r: f64,
    /// Concurrence of the MEMS with this participation ratio.
    pub mems_c: Option<f64>,
    /// IH concurrence lower bound at this participation ratio.
    pub eq7: Option<f64>,
}

pub fn overlay_at(r: f64) -> OverlayPoint {
    OverlayPoint { r, mems_c: mems_x_from_r(r).ok(), eq7: eq7_bound(r).ok() }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BandScanR {
    pub scan: BandChunk,
    pub overlay: Vec<OverlayPoint>,
}

/// Concurrence band against participation ratio with the MEMS curve and
/// the IH lower bound evaluated at every bin center.
pub fn band_scan_r(config: &SweepConfig, base: LogBase, keep_records: bool) -> Result<BandScanR> {
    if config.ensemble == Ensemble::MemsGrid {
        return Err(Error::InvalidConfig("band scan needs ensemble IH_ONLY or ZHSL_ALL"));
    }
    let scan = band_scan(config, BandAxis::ParticipationRatio, base, keep_records)?;
    let overlay = scan.series.bin_centers().into_iter().map(overlay_at).collect();
    Ok(BandScanR { scan, overlay })
}

/// Concurrence against largest eigenvalue, checked against the zone contours.
pub fn band_scan_lambda(config: &SweepConfig, base: LogBase, keep_records: bool) -> Result<BandChunk> {
    if config.ensemble != Ensemble::IhOnly {
        return Err(Error::InvalidConfig("lambda band scan needs ensemble IH_ONLY"));
    }
    band_scan(config, BandAxis::LambdaMax, base, keep_records)
}

/// Contour check on IH spectra alone; `concurrence_ih` is exact for them.
pub fn contour_check_ih(samples: u64, seed: SeedSpec) -> ContourReport {
    let mut report = ContourReport::default();
    let chunks = samples.div_ceil(CHUNK_SIZE);
    for chunk in 0..chunks {
        let mut rng = split_stream(seed, chunk);
        let n = (samples - chunk * CHUNK_SIZE).min(CHUNK_SIZE);
        for _ in 0..n {
            let p = ih_spectrum(&mut rng);
            report.record(p.max(), concurrence_ih(&p));
        }
    }
    report
}

/// `(a, (1-a)/3, (1-a)/3, (1-a)/3)`, on which the IH bound is attained.
pub fn eq7_family(a: f64) -> Result<Spectrum4> {
    if !(0.25..=1.0).contains(&a) {
        return Err(Error::OutOfRange { name: "a", value: a, expected: "[1/4, 1]" });
    }
    let rest = (1.0 - a) / 3.0;
    Spectrum4::new([a, rest, rest, rest])
}

/// `a` for which [`eq7_family`] has participation ratio `r`.
pub fn eq7_family_a(r: f64) -> Result<f64> {
    if !(1.0..=4.0).contains(&r) {
        return Err(Error::OutOfRange { name: "R", value: r, expected: "[1, 4]" });
    }
    Ok((1.0 + sqrt((12.0 / r - 3.0).max(0.0))) / 4.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eq7Row {
    pub a: f64,
    pub r: f64,
    pub concurrence: f64,
    pub bound: f64,
}

impl Eq7Row {
    pub fn at_a(a: f64) -> Result<Self> {
        let p = eq7_family(a)?;
        let r = p.participation_ratio();
        Ok(Eq7Row { a, r, concurrence: concurrence_ih(&p), bound: eq7_bound(r.min(3.0))? })
    }

    pub fn residual(&self) -> f64 {
        (self.concurrence - self.bound).abs()
    }
}

/// Random IH spectra tested against the concurrence bound.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Eq7Sampling {
    pub draws: u64,
    pub in_range: u64,
    /// `min (C - bound)` for `R` in `[1, 1.8]`.
    pub min_gap_in_range: Option<f64>,
    pub outside: u64,
    pub violations_outside: u64,
    pub min_gap_outside: Option<f64>,
}

impl Eq7Sampling {
    /// Draws until `in_range_target` spectra land in `[1, 1.8]`, giving up
    /// after `1000 * in_range_target` draws.
    pub fn run(in_range_target: u64, seed: SeedSpec) -> Result<Self> {
        let mut s = Eq7Sampling::default();
        let cap = in_range_target.saturating_mul(1000).max(1000);
        let mut chunk = 0;
        while s.in_range < in_range_target && s.draws < cap {
            let mut rng = split_stream(seed, chunk);
            for _ in 0..CHUNK_SIZE {
                let p = ih_spectrum(&mut rng);
                s.draws += 1;
                let r = p.participation_ratio();
                if r >= 3.0 {
                    continue;
                }
                let gap = concurrence_ih(&p) - eq7_bound(r)?;
                if r <= EQ7_ASSERTED_MAX_R {
                    s.in_range += 1;
                    s.min_gap_in_range = min_opt(s.min_gap_in_range, Some(gap));
                } else {
                    s.outside += 1;
                    if gap < -CONTOUR_TOL {
                        s.violations_outside += 1;
                    }
                    s.min_gap_outside = min_opt(s.min_gap_outside, Some(gap));
                }
                if s.in_range >= in_range_target {
                    break;
                }
            }
            chunk += 1;
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Eq7Report {
    pub rows: Vec<Eq7Row>,
    pub sampling: Eq7Sampling,
}

impl Eq7Report {
    pub fn max_identity_residual(&self) -> f64 {
        self.rows.iter().map(Eq7Row::residual).fold(0.0, f64::max)
    }
}

/// Evaluates the bound on an `R` grid through the equality family and
/// checks `trials_per_point * grid.len()` random IH spectra in `[1, 1.8]`.
pub fn bound_check_eq7(grid: &[f64], trials_per_point: u64, seed: SeedSpec) -> Result<Eq7Report> {
    let rows = grid
        .iter()
        .map(|&r| {
            if !(1.0..3.0).contains(&r) {
                return Err(Error::OutOfRange { name: "R", value: r, expected: "[1, 3)" });
            }
            Eq7Row::at_a(eq7_family_a(r)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let sampling = Eq7Sampling::run(trials_per_point.saturating_mul(grid.len() as u64), seed)?;
    Ok(Eq7Report { rows, sampling })
}

/// Candidate closed forms for the slope `dS_q(A|B)/dC` of MEMS at `C = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlopeForm {
    /// `-2q / ((q - 1) ln 2)`.
    Published,
    /// `-q / ((q - 1) ln 2)`, from differentiating the MEMS spectra.
    Derived,
}

impl SlopeForm {
    pub fn value(self, q: f64) -> f64 {
        let f = match self {
            SlopeForm::Published => 2.0,
            SlopeForm::Derived => 1.0,
        };
        -f * q / ((q - 1.0) * core::f64::consts::LN_2)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Eq8Report {
    pub q: f64,
    pub epsilons: Vec<f64>,
    /// Finite-difference slopes in bits per unit concurrence.
    pub raw: Vec<f64>,
    pub extrapolated: f64,
    pub published: f64,
    pub derived: f64,
    /// Form within `tolerance` (relative) of the extrapolated slope, the
    /// closer one when both are.
    pub matched: Option<SlopeForm>,
    pub tolerance: f64,
}

/// Polynomial extrapolation of `(h_i, y_i)` to `h = 0` (Neville).
pub fn richardson_to_zero(h: &[f64], y: &[f64]) -> f64 {
    let mut t: Vec<f64> = y.to_vec();
    let n = t.len();
    for m in 1..n {
        for i in 0..(n - m) {
            t[i] = (h[i] * t[i + 1] - h[i + m] * t[i]) / (h[i] - h[i + m]);
        }
    }
    t.first().copied().unwrap_or(f64::NAN)
}

/// Finite-difference slope of `S_q(A|B)` (bits) against concurrence for
/// `mems(1 - eps)` relative to the pure `mems(1)`, extrapolated to
/// `eps -> 0`.
pub fn slope_check_eq8(q: f64, epsilons: &[f64], tolerance: f64) -> Result<Eq8Report> {
    if !(q.is_finite() && q > 1.0) {
        return Err(Error::OutOfRange { name: "q", value: q, expected: "(1, inf)" });
    }
    if epsilons.is_empty() || epsilons.iter().any(|e| !(*e > 0.0 && *e < 1.0 / 3.0)) {
        return Err(Error::InvalidConfig("epsilons must lie in (0, 1/3)"));
    }
    let params = EntropyParams::new(Order::new(q)?, LogBase::Two);
    let pure = mems(1.0)?;
    let s0 = conditional_renyi(&pure, params, Subsystem::B)?;
    let c0 = concurrence(&pure)?.value;
    let raw = epsilons
        .iter()
        .map(|&e| {
            let rho = mems(1.0 - e)?;
            let s = conditional_renyi(&rho, params, Subsystem::B)?;
            let c = concurrence(&rho)?.value;
            Ok((s - s0) / (c - c0))
        })
        .collect::<Result<Vec<_>>>()?;
    let extrapolated = richardson_to_zero(epsilons, &raw);
    let published = SlopeForm::Published.value(q);
    let derived = SlopeForm::Derived.value(q);
    let rel = |target: f64| ((extrapolated - target) / target).abs();
    let matched = [SlopeForm::Derived, SlopeForm::Published]
        .into_iter()
        .filter(|f| rel(f.value(q)) <= tolerance)
        .min_by(|a, b| rel(a.value(q)).total_cmp(&rel(b.value(q))));
    Ok(Eq8Report { q, epsilons: epsilons.to_vec(), raw, extrapolated, published, derived, matched, tolerance })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfilePoint {
    pub x: f64,
    pub r: f64,
    /// `S_inf(A|B)` of `mems(x)` in bits.
    pub s_inf_ab: f64,
}

/// `(R, S_inf(A|B))` along the MEMS family.
pub fn mems_conditional_profile(xs: &[f64]) -> Result<Vec<ProfilePoint>> {
    let params = EntropyParams::new(Order::Infinity, LogBase::Two);
    xs.iter()
        .map(|&x| {
            let rho = mems(x)?;
            Ok(ProfilePoint { x, r: mems_participation_ratio(x), s_inf_ab: conditional_renyi(&rho, params, Subsystem::B)? })
        })
        .collect()
}

/// IH state for the sorted eigenvalues of `rho`.
pub fn ih_of_spectrum(rho: &DensityMatrix4) -> Result<DensityMatrix4> {
    let ev = crate::linalg::hermitian_eigenvalues(rho.matrix())?;
    Ok(ih_state(&Spectrum4::sorted(ev.map(|v| v.max(0.0)))?))
}

/// Measure records for every sample of one chunk, in draw order.
pub fn records_chunk(config: &SweepConfig, chunk: u64, base: LogBase) -> Result<Vec<MeasureRecord>> {
    let mut rng = split_stream(config.seed, chunk);
    config
        .chunk_range(chunk)
        .map(|i| {
            let rec = measure_record(&draw(config, &mut rng, i)?, &config.qset, base)?;
            rec.check_invariants()?;
            Ok(rec)
        })
        .collect()
}

/// Agreement between `C > 1e-10` and a partial-transpose eigenvalue below
/// `-1e-10`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PptAgreement {
    pub samples: u64,
    pub entangled: u64,
    /// Entangled by concurrence but PPT.
    pub entangled_but_ppt: u64,
    /// Separable by concurrence but NPT.
    pub separable_but_npt: u64,
}

impl PptAgreement {
    pub fn exceptions(&self) -> u64 {
        self.entangled_but_ppt + self.separable_but_npt
    }

    pub fn merge(&mut self, other: &PptAgreement) {
        self.samples += other.samples;
        self.entangled += other.entangled;
        self.entangled_but_ppt += other.entangled_but_ppt;
        self.separable_but_npt += other.separable_but_npt;
    }
}

pub fn ppt_agreement_chunk(config: &SweepConfig, chunk: u64) -> Result<PptAgreement> {
    const TOL: f64 = 1e-10;
    let mut out = PptAgreement::default();
    let mut rng = split_stream(config.seed, chunk);
    for i in config.chunk_range(chunk) {
        let rho = draw(config, &mut rng, i)?;
        let c = concurrence(&rho)?.value;
        let npt = crate::measures::min_partial_transpose_eigenvalue(&rho)? < -TOL;
        out.samples += 1;
        match (c > TOL, npt) {
            (true, true) => out.entangled += 1,
            (true, false) => {
                out.entangled += 1;
                out.entangled_but_ppt += 1;
            }
            (false, true) => out.separable_but_npt += 1,
            (false, false) => {}
        }
    }
    Ok(out)
}

pub fn ppt_agreement(config: &SweepConfig) -> Result<PptAgreement> {
    config.validate()?;
    let mut total = PptAgreement::default();
    for chunk in 0..config.chunk_count() {
        total.merge(&ppt_agreement_chunk(config, chunk)?);
    }
    Ok(total)
}
