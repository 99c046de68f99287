//! File formats: density-matrix JSON, record CSV/JSON and binned series.
//!
//! CSV files open with one `# manifest {...}` comment line followed by a
//! header row. Floats in CSV carry 17 significant digits; JSON uses the
//! shortest representation that parses back to the same double.

use std::fs;
use std::io::Write;
use std::path::Path;

use memsq_core::experiments::BinSeries;
use memsq_core::linalg::{Matrix4, C64};
use memsq_core::measures::{LogBase, MeasureRecord};
use memsq_core::DensityMatrix4;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::manifest::RunManifest;

/// Fixed record column order.
pub const RECORD_COLUMNS: [&str; 10] =
    ["C", "E", "R", "lambda_max", "SL", "Sinf_AB", "Sinf_BA", "F_EF", "entangled", "classical_ineq"];

/// `{"dim":4,"entries":[[re,im], ...]}`, 16 row-major pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl DensityFile {
    pub fn from_matrix(m: &Matrix4) -> Self {
        DensityFile { dim: 4, entries: m.row_major().map(|z| [z.re, z.im]).collect() }
    }

    pub fn to_matrix(&self) -> Result<Matrix4> {
        if self.dim != 4 {
            return Err(CliError::Input(format!("dim must be 4, got {}", self.dim)));
        }
        let flat: Vec<C64> = self.entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        Matrix4::from_row_major(&flat)
            .ok_or_else(|| CliError::Input(format!("expected 16 entries, got {}", self.entries.len())))
    }
}

/// Reads and validates a density matrix file.
pub fn read_density(path: &Path, tol: f64) -> Result<DensityMatrix4> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    let file: DensityFile =
        serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.to_owned(), source })?;
    Ok(DensityMatrix4::validate(&file.to_matrix()?, tol)?)
}

/// 17 significant digits; `null` for missing or non-finite values.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_owned()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "null".to_owned(), fmt_f64)
}

fn units(base: LogBase) -> &'static str {
    match base {
        LogBase::Two => "bits",
        LogBase::E => "nats",
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TsallisRow {
    pub q: f64,
    #[serde(rename = "A_given_B")]
    pub a_given_b: f64,
    #[serde(rename = "B_given_A")]
    pub b_given_a: f64,
}

/// JSON view of a [`MeasureRecord`]; keys follow [`RECORD_COLUMNS`].
#[derive(Clone, Debug, Serialize)]
pub struct RecordRow {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub lambda_max: f64,
    #[serde(rename = "SL")]
    pub sl: f64,
    #[serde(rename = "Sinf_AB")]
    pub sinf_ab: f64,
    #[serde(rename = "Sinf_BA")]
    pub sinf_ba: f64,
    #[serde(rename = "F_EF")]
    pub f_ef: f64,
    pub entangled: bool,
    pub classical_ineq: bool,
    pub ppt: bool,
    pub units: &'static str,
    pub cond_tsallis: Vec<TsallisRow>,
}

impl From<&MeasureRecord> for RecordRow {
    fn from(r: &MeasureRecord) -> Self {
        RecordRow {
            c: r.concurrence,
            e: r.entanglement_of_formation,
            r: r.participation_ratio,
            lambda_max: r.lambda_max,
            sl: r.linear_entropy,
            sinf_ab: r.cond_renyi_inf_ab,
            sinf_ba: r.cond_renyi_inf_ba,
            f_ef: r.fully_entangled_fraction,
            entangled: r.entangled,
            classical_ineq: r.classical_ineq_hold,
            ppt: r.ppt,
            units: units(r.base),
            cond_tsallis: r
                .cond_tsallis
                .iter()
                .map(|t| TsallisRow { q: t.q, a_given_b: t.a_given_b, b_given_a: t.b_given_a })
                .collect(),
        }
    }
}

pub fn record_csv_row(r: &MeasureRecord) -> [String; 10] {
    [
        fmt_f64(r.concurrence),
        fmt_f64(r.entanglement_of_formation),
        fmt_f64(r.participation_ratio),
        fmt_f64(r.lambda_max),
        fmt_f64(r.linear_entropy),
        fmt_f64(r.cond_renyi_inf_ab),
        fmt_f64(r.cond_renyi_inf_ba),
        fmt_f64(r.fully_entangled_fraction),
        r.entangled.to_string(),
        r.classical_ineq_hold.to_string(),
    ]
}

/// Writes the manifest comment line, a header and the rows.
pub fn write_csv<W, H, R, I>(out: &mut W, manifest: &RunManifest, header: H, rows: I) -> Result<()>
where
    W: Write + ?Sized,
    H: IntoIterator,
    H::Item: AsRef<[u8]>,
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    writeln!(out, "# manifest {}", serde_json::to_string(manifest).expect("manifest serializes"))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records_csv<W: Write + ?Sized>(out: &mut W, manifest: &RunManifest, records: &[MeasureRecord]) -> Result<()> {
    write_csv(out, manifest, RECORD_COLUMNS, records.iter().map(record_csv_row))
}

pub fn write_json<W: Write + ?Sized, T: Serialize>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

/// Per-bin aggregates beyond count and maximum.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesAux {
    pub qualifying: Vec<u64>,
    #[serde(rename = "min_C")]
    pub min_c: Vec<Option<f64>>,
    pub negative_cond: Vec<u64>,
    pub undersampled: Vec<bool>,
}

/// JSON view of a [`BinSeries`]; empty bins have `max_C = null`.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesJson {
    pub bin_centers: Vec<f64>,
    pub counts: Vec<u64>,
    #[serde(rename = "max_C")]
    pub max_c: Vec<Option<f64>>,
    pub aux: SeriesAux,
    pub samples: u64,
    pub out_of_range: u64,
    pub argmax_center: Option<f64>,
}

impl SeriesJson {
    pub fn new(s: &BinSeries, floor: u64) -> Self {
        SeriesJson {
            bin_centers: s.bin_centers(),
            counts: s.counts(),
            max_c: s.max_c(),
            aux: SeriesAux {
                qualifying: s.bins.iter().map(|b| b.qualifying).collect(),
                min_c: s.bins.iter().map(|b| b.min_c).collect(),
                negative_cond: s.bins.iter().map(|b| b.negative_cond).collect(),
                undersampled: s.bins.iter().map(|b| b.count < floor).collect(),
            },
            samples: s.samples,
            out_of_range: s.out_of_range,
            argmax_center: s.argmax().map(|k| s.binning.center(k)),
        }
    }
}

pub const SERIES_COLUMNS: [&str; 7] = ["bin_center", "count", "qualifying", "max_C", "min_C", "negative_cond", "undersampled"];

/// Series rows with `extra` columns appended per bin.
pub fn series_csv_rows(s: &BinSeries, floor: u64, extra: &[Vec<String>]) -> Vec<Vec<String>> {
    s.bins
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let mut row = vec![
                fmt_f64(s.binning.center(k)),
                b.count.to_string(),
                b.qualifying.to_string(),
                fmt_opt(b.max_c),
                fmt_opt(b.min_c),
                b.negative_cond.to_string(),
                (b.count < floor).to_string(),
            ];
            if let Some(e) = extra.get(k) {
                row.extend(e.iter().cloned());
            }
            row
        })
        .collect()
}
