//! Density carriers.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdfMethod {
    CfFft,
    Hankel,
    Series,
    GammaFit,
    Histogram,
}

impl PdfMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            PdfMethod::CfFft => "cf_fft",
            PdfMethod::Hankel => "hankel",
            PdfMethod::Series => "series",
            PdfMethod::GammaFit => "gamma_fit",
            PdfMethod::Histogram => "mc",
        }
    }
}

/// Requested support of a density grid.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GridSpec {
    /// Number of points; `None` selects a per-method default.
    pub points: Option<usize>,
    /// Upper end of the support; `None` derives it from a tail bound.
    pub upper: Option<f64>,
}

impl GridSpec {
    pub fn new(points: usize, upper: f64) -> Self {
        GridSpec {
            points: Some(points),
            upper: Some(upper),
        }
    }
}

/// A density sampled on a monotone support.
///
/// Histogram grids carry `bin_edges` (one more than `support`) and store the
/// bin centres in `support`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdfGrid {
    pub support: Vec<f64>,
    pub density: Vec<f64>,
    pub method: PdfMethod,
    pub bin_edges: Option<Vec<f64>>,
}

impl PdfGrid {
    pub fn new(support: Vec<f64>, density: Vec<f64>, method: PdfMethod) -> Self {
        debug_assert_eq!(support.len(), density.len());
        PdfGrid {
            support,
            density,
            method,
            bin_edges: None,
        }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Total mass: trapezoid rule, or bin masses for histograms.
    pub fn integral(&self) -> f64 {
        if let Some(edges) = &self.bin_edges {
            return edges
                .windows(2)
                .zip(&self.density)
                .map(|(w, d)| (w[1] - w[0]) * d)
                .sum();
        }
        self.support
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, d)| 0.5 * (x[1] - x[0]) * (d[0] + d[1]))
            .sum()
    }

    /// Mass on `[a, b]` of the piecewise-linear (or piecewise-constant for
    /// histograms) interpolant.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        self.cumulative(b) - self.cumulative(a)
    }

    fn cumulative(&self, x: f64) -> f64 {
        if let Some(edges) = &self.bin_edges {
            let mut acc = 0.0;
            for (w, d) in edges.windows(2).zip(&self.density) {
                if x <= w[0] {
                    break;
                }
                acc += (x.min(w[1]) - w[0]) * d;
            }
            return acc;
        }
        let s = &self.support;
        if s.is_empty() || x <= s[0] {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 1..s.len() {
            let (x0, x1) = (s[i - 1], s[i]);
            let (d0, d1) = (self.density[i - 1], self.density[i]);
            if x >= x1 {
                acc += 0.5 * (x1 - x0) * (d0 + d1);
            } else {
                let t = (x - x0) / (x1 - x0);
                let dx = x - x0;
                acc += dx * (d0 + 0.5 * t * (d1 - d0));
                return acc;
            }
        }
        acc
    }

    /// Linear interpolation of the density (zero outside the support).
    pub fn density_at(&self, x: f64) -> f64 {
        let s = &self.support;
        if s.is_empty() || x < s[0] || x > s[s.len() - 1] {
            return 0.0;
        }
        let i = s.partition_point(|&v| v <= x).clamp(1, s.len() - 1);
        let t = (x - s[i - 1]) / (s[i] - s[i - 1]);
        self.density[i - 1] + t * (self.density[i] - self.density[i - 1])
    }

    /// Location of the largest density value.
    pub fn mode(&self) -> f64 {
        let i = self
            .density
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.support[i]
    }
}

/// L1 distance between a histogram and a reference law, measured on the
/// histogram bins: `Σ_b |h_b − r_b|` plus the reference mass outside the
/// binned range. `reference_mass(a, b)` is the reference probability of `[a, b]`.
pub fn binned_l1(histogram: &PdfGrid, reference_mass: impl Fn(f64, f64) -> f64) -> f64 {
    let edges = histogram
        .bin_edges
        .as_ref()
        .expect("binned_l1 needs a histogram grid");
    let mut total = 0.0;
    let mut covered = 0.0;
    for (w, d) in edges.windows(2).zip(&histogram.density) {
        let m = reference_mass(w[0], w[1]);
        covered += m;
        total += ((w[1] - w[0]) * d - m).abs();
    }
    total + (1.0 - covered).abs()
}
