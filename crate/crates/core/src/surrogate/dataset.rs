//! Labelled records `[γ_th, γ̄, σ_S,R, σ_R,D, σ_I,R, σ_I,D, N] → P_out`.

use crate::analytic::{op_by_method, OutageMethod};
use crate::error::{Error, Result};
use crate::model::{Sigmas, SystemParams};
use crate::montecarlo::{estimate_op_mc, McConfig};
use crate::rng;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

pub const CSV_HEADER: [&str; 8] = [
    "gamma_th_db",
    "gamma_bar_db",
    "sigma_sr",
    "sigma_rd",
    "sigma_ir",
    "sigma_id",
    "n_elements",
    "p_out",
];

/// Records labelled per parallel batch; also the unit of streamed output.
const LABEL_BATCH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    /// `[γ_th dB, γ̄ dB, σ_S,R, σ_R,D, σ_I,R, σ_I,D, N]`.
    pub input: [f64; 7],
    pub target: f64,
}

impl DatasetRecord {
    pub fn new(input: [f64; 7], target: f64) -> Result<Self> {
        let r = DatasetRecord { input, target };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.target) {
            return Err(Error::Data(format!("target {} outside [0, 1]", self.target)));
        }
        let n = self.input[6];
        if n.fract() != 0.0 || n < 1.0 {
            return Err(Error::Data(format!("n_elements {n} is not a positive integer")));
        }
        if self.input.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite input {:?}", self.input)));
        }
        Ok(())
    }

    /// Scenario described by the input vector; only `γ̄` in dB matters, so
    /// it is carried as the SNR with a 0 dB INR.
    pub fn params(&self) -> Result<SystemParams> {
        params_from_input(&self.input)
    }
}

pub fn params_from_input(x: &[f64; 7]) -> Result<SystemParams> {
    SystemParams::new(
        x[6] as u32,
        Sigmas {
            sr: x[2],
            rd: x[3],
            ir: x[4],
            id: x[5],
        },
        x[1],
        0.0,
        x[0],
    )
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub records: Vec<DatasetRecord>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn inputs(&self) -> impl Iterator<Item = &[f64; 7]> {
        self.records.iter().map(|r| &r.input)
    }

    pub fn targets(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.target).collect()
    }
}

/// Uniform sampling box for the scenario inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingRanges {
    pub gamma_th_db: (f64, f64),
    pub snr_db: (f64, f64),
    pub inr_db: (f64, f64),
    pub sigma: (f64, f64),
    pub n_elements: (u32, u32),
}

impl Default for SamplingRanges {
    fn default() -> Self {
        SamplingRanges {
            gamma_th_db: (-10.0, 10.0),
            snr_db: (0.0, 30.0),
            inr_db: (-10.0, 15.0),
            sigma: (0.5, 2.0),
            n_elements: (2, 64),
        }
    }
}

impl SamplingRanges {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [
            ("gamma_th_db", self.gamma_th_db),
            ("snr_db", self.snr_db),
            ("inr_db", self.inr_db),
            ("sigma", self.sigma),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidParams(format!("range {name} = ({lo}, {hi}) is not ordered")));
            }
        }
        if self.sigma.0 <= 0.0 {
            return Err(Error::InvalidParams("sigma range must be positive".into()));
        }
        let (a, b) = self.n_elements;
        if a == 0 || a > b {
            return Err(Error::InvalidParams(format!("n_elements range ({a}, {b}) is invalid")));
        }
        Ok(())
    }

    fn draw(&self, r: &mut impl Rng) -> [f64; 7] {
        let mut u = |(lo, hi): (f64, f64)| if lo == hi { lo } else { r.random_range(lo..=hi) };
        let th = u(self.gamma_th_db);
        let snr = u(self.snr_db);
        let inr = u(self.inr_db);
        let s = [u(self.sigma), u(self.sigma), u(self.sigma), u(self.sigma)];
        let n = r.random_range(self.n_elements.0..=self.n_elements.1) as f64;
        [th, snr - inr, s[0], s[1], s[2], s[3], n]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMethod {
    ExactNumeric,
    GammaNumeric,
    MonteCarlo { n_samples: u64 },
}

impl LabelMethod {
    pub fn parse(s: &str, mc_samples: u64) -> Result<Self> {
        match s {
            "exact_numeric" | "exact" => Ok(LabelMethod::ExactNumeric),
            "gamma_numeric" | "gamma-numeric" => Ok(LabelMethod::GammaNumeric),
            "monte_carlo" | "mc" => Ok(LabelMethod::MonteCarlo { n_samples: mc_samples }),
            other => Err(Error::InvalidParams(format!("unknown label method '{other}'"))),
        }
    }

    /// Label one input; `seed` only matters for Monte Carlo labels.
    pub fn label(&self, input: &[f64; 7], seed: u64) -> Result<f64> {
        let p = params_from_input(input)?;
        let est = match *self {
            LabelMethod::ExactNumeric => op_by_method(&p, OutageMethod::ExactNumeric)?,
            LabelMethod::GammaNumeric => op_by_method(&p, OutageMethod::GammaNumeric)?,
            LabelMethod::MonteCarlo { n_samples } => estimate_op_mc(&p, &McConfig::new(n_samples, seed)?)?,
        };
        Ok(est.value)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub written: usize,
    pub skipped: usize,
}

/// Draw and label records until `n_records` succeed, handing each to `sink`
/// in draw order. Failing labels are logged and skipped; more than
/// `n_records` failures abort with a data error.
pub fn generate_dataset_with(
    n_records: usize,
    ranges: &SamplingRanges,
    method: LabelMethod,
    seed: u64,
    mut sink: impl FnMut(&DatasetRecord) -> Result<()>,
) -> Result<GenerationReport> {
    if n_records < 100 {
        return Err(Error::InvalidParams(format!("n_records must be at least 100, got {n_records}")));
    }
    ranges.validate()?;
    let mut draws = rng::aux_stream(seed, 1);
    let mut report = GenerationReport::default();
    let mut index = 0u64;
    while report.written < n_records {
        let batch: Vec<(u64, [f64; 7])> = (0..LABEL_BATCH)
            .map(|_| {
                index += 1;
                (index, ranges.draw(&mut draws))
            })
            .collect();
        let labels: Vec<Result<f64>> = batch
            .par_iter()
            .map(|(i, x)| method.label(x, seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
            .collect();
        for ((i, x), label) in batch.into_iter().zip(labels) {
            if report.written == n_records {
                break;
            }
            match label.and_then(|t| DatasetRecord::new(x, t)) {
                Ok(rec) => {
                    sink(&rec)?;
                    report.written += 1;
                }
                Err(e) => {
                    log::warn!("skipping record {i} {x:?}: {e}");
                    report.skipped += 1;
                    if report.skipped > n_records {
                        return Err(Error::Data(format!("{} label failures, giving up", report.skipped)));
                    }
                }
            }
        }
    }
    Ok(report)
}

pub fn generate_dataset(
    n_records: usize,
    ranges: &SamplingRanges,
    method: LabelMethod,
    seed: u64,
) -> Result<(Dataset, GenerationReport)> {
    let mut ds = Dataset::default();
    let report = generate_dataset_with(n_records, ranges, method, seed, |r| {
        ds.records.push(*r);
        Ok(())
    })?;
    Ok((ds, report))
}

/// Seeded shuffle split into `(train, test, validation)`.
pub fn split_dataset(ds: &Dataset, fractions: (f64, f64, f64), seed: u64) -> Result<(Dataset, Dataset, Dataset)> {
    let (a, b, c) = fractions;
    if [a, b, c].iter().any(|f| !(0.0..=1.0).contains(f)) || (a + b + c - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParams(format!("split fractions {fractions:?} must be in [0, 1] and sum to 1")));
    }
    let n = ds.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::aux_stream(seed, 2));
    let n_train = ((a * n as f64).round() as usize).min(n);
    let n_test = ((b * n as f64).round() as usize).min(n - n_train);
    let take = |r: &[usize]| Dataset {
        records: r.iter().map(|&i| ds.records[i]).collect(),
    };
    Ok((
        take(&idx[..n_train]),
        take(&idx[n_train..n_train + n_test]),
        take(&idx[n_train + n_test..]),
    ))
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Streaming CSV writer for [`generate_dataset_with`].
pub struct DatasetWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> DatasetWriter<W> {
    pub fn new(writer: W) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(writer);
        inner
            .write_record(CSV_HEADER)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        Ok(DatasetWriter { inner })
    }

    pub fn push(&mut self, r: &DatasetRecord) -> Result<()> {
        let mut row: Vec<String> = r.input[..6].iter().map(|&v| fmt(v)).collect();
        row.push((r.input[6] as u32).to_string());
        row.push(fmt(r.target));
        self.inner
            .write_record(&row)
            .map_err(|e| Error::Io(std::io::Error::other(e)))
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

/// Write records as CSV with [`CSV_HEADER`].
pub fn write_dataset<W: Write>(writer: W, records: impl IntoIterator<Item = DatasetRecord>) -> Result<()> {
    let mut w = DatasetWriter::new(writer)?;
    for r in records {
        w.push(&r)?;
    }
    w.finish()
}

/// Parse a CSV written by [`write_dataset`]; the header must match exactly.
pub fn read_dataset<R: Read>(reader: R) -> Result<Dataset> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rd.headers().map_err(|e| Error::Format(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::Format(format!(
            "dataset header {:?} does not match {}",
            header.iter().collect::<Vec<_>>(),
            CSV_HEADER.join(",")
        )));
    }
    let mut ds = Dataset::default();
    for (line, row) in rd.records().enumerate() {
        let row = row.map_err(|e| Error::Format(e.to_string()))?;
        let mut v = [0.0; 8];
        for (slot, field) in v.iter_mut().zip(row.iter()) {
            *slot = field
                .trim()
                .parse()
                .map_err(|e| Error::Format(format!("record {}: '{field}': {e}", line + 1)))?;
        }
        if row.len() != 8 {
            return Err(Error::Format(format!("record {} has {} fields", line + 1, row.len())));
        }
        let input = [v[0], v[1], v[2], v[3], v[4], v[5], v[6]];
        ds.records.push(DatasetRecord::new(input, v[7]).map_err(|e| Error::Format(format!("record {}: {e}", line + 1)))?);
    }
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize) -> Dataset {
        Dataset {
            records: (0..n)
                .map(|i| DatasetRecord::new([i as f64, 0.0, 1.0, 1.0, 1.0, 1.0, 4.0], 0.5).unwrap())
                .collect(),
        }
    }

    #[test]
    fn split_sizes_and_determinism() {
        let ds = toy(10);
        let (a, b, c) = split_dataset(&ds, (0.7, 0.1, 0.2), 3).unwrap();
        assert_eq!((a.len(), b.len(), c.len()), (7, 1, 2));
        let again = split_dataset(&ds, (0.7, 0.1, 0.2), 3).unwrap();
        assert_eq!((a.clone(), b.clone(), c.clone()), again);
        let mut all: Vec<f64> = a.inputs().chain(b.inputs()).chain(c.inputs()).map(|x| x[0]).collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, (0..10).map(|i| i as f64).collect::<Vec<_>>());
        assert!(split_dataset(&ds, (0.7, 0.2, 0.2), 3).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let ds = Dataset {
            records: vec![DatasetRecord::new([-3.25, 17.0 / 3.0, 0.5, 1.9, 0.7, 1.123456789012345, 12.0], 1.0 / 7.0).unwrap()],
        };
        let mut buf = Vec::new();
        write_dataset(&mut buf, ds.records.clone()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&CSV_HEADER.join(",")));
        assert_eq!(read_dataset(&buf[..]).unwrap(), ds);
    }

    #[test]
    fn bad_header_and_label_rejected() {
        assert!(matches!(read_dataset("a,b\n1,2\n".as_bytes()), Err(Error::Format(_))));
        assert!(DatasetRecord::new([0.0; 7], 0.5).is_err());
        assert!(DatasetRecord::new([0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 2.0], 1.5).is_err());
    }

    #[test]
    fn generation_is_seeded_and_in_range() {
        let ranges = SamplingRanges::default();
        let (a, rep) = generate_dataset(100, &ranges, LabelMethod::GammaNumeric, 11).unwrap();
        let (b, _) = generate_dataset(100, &ranges, LabelMethod::GammaNumeric, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(rep.written, 100);
        for r in &a.records {
            assert!((0.0..=1.0).contains(&r.target));
            assert!((2.0..=64.0).contains(&r.input[6]));
            assert!((-25.0..=40.0).contains(&r.input[1]));
        }
        assert!(generate_dataset(99, &ranges, LabelMethod::GammaNumeric, 11).is_err());
    }
}
