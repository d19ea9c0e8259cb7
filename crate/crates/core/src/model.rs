//! Scenario parameters, fading draws and the interference-limited SIR.
//!
//! Every channel coefficient is zero-mean circularly symmetric complex
//! Gaussian with variance `σ²`, so magnitudes are Rayleigh with
//! `E[|·|²] = σ²`. The RIS phases are aligned to the desired cascade, which
//! leaves the desired cascade co-phased and each reflected-interference term
//! with a residual phase uniform on `[0, 2π)`.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// Amplitude standard deviations of the four links (S→R, R→D, I→R, I→D).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sigmas {
    pub sr: f64,
    pub rd: f64,
    pub ir: f64,
    pub id: f64,
}

impl Default for Sigmas {
    fn default() -> Self {
        Sigmas {
            sr: 1.0,
            rd: 1.0,
            ir: 1.0,
            id: 1.0,
        }
    }
}

/// One validated scenario. Construct with [`SystemParams::new`]; the fields
/// are private so the invariants (`N ≥ 1`, every σ > 0, finite dB values)
/// hold for every value in circulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct SystemParams {
    n_elements: u32,
    sigmas: Sigmas,
    snr_db: f64,
    inr_db: f64,
    gamma_th_db: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    n_elements: u32,
    sigma_sr: f64,
    sigma_rd: f64,
    sigma_ir: f64,
    sigma_id: f64,
    snr_db: f64,
    inr_db: f64,
    gamma_th_db: f64,
}

impl TryFrom<RawParams> for SystemParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        SystemParams::new(
            r.n_elements,
            Sigmas {
                sr: r.sigma_sr,
                rd: r.sigma_rd,
                ir: r.sigma_ir,
                id: r.sigma_id,
            },
            r.snr_db,
            r.inr_db,
            r.gamma_th_db,
        )
    }
}

impl From<SystemParams> for RawParams {
    fn from(p: SystemParams) -> Self {
        RawParams {
            n_elements: p.n_elements,
            sigma_sr: p.sigmas.sr,
            sigma_rd: p.sigmas.rd,
            sigma_ir: p.sigmas.ir,
            sigma_id: p.sigmas.id,
            snr_db: p.snr_db,
            inr_db: p.inr_db,
            gamma_th_db: p.gamma_th_db,
        }
    }
}

impl SystemParams {
    pub fn new(
        n_elements: u32,
        sigmas: Sigmas,
        snr_db: f64,
        inr_db: f64,
        gamma_th_db: f64,
    ) -> Result<Self> {
        if n_elements < 1 {
            return Err(Error::InvalidParams("n_elements must be at least 1".into()));
        }
        for (name, s) in [
            ("sigma_sr", sigmas.sr),
            ("sigma_rd", sigmas.rd),
            ("sigma_ir", sigmas.ir),
            ("sigma_id", sigmas.id),
        ] {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} must be positive and finite, got {s}")));
            }
        }
        for (name, v) in [("snr_db", snr_db), ("inr_db", inr_db), ("gamma_th_db", gamma_th_db)] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite, got {v}")));
            }
        }
        let p = SystemParams {
            n_elements,
            sigmas,
            snr_db,
            inr_db,
            gamma_th_db,
        };
        if !(p.gamma_bar() > 0.0 && p.gamma_bar().is_finite()) {
            return Err(Error::InvalidParams("average SIR must be positive and finite".into()));
        }
        Ok(p)
    }

    /// Unit-variance channels on every link.
    pub fn unit(n_elements: u32, snr_db: f64, inr_db: f64, gamma_th_db: f64) -> Result<Self> {
        Self::new(n_elements, Sigmas::default(), snr_db, inr_db, gamma_th_db)
    }

    pub fn n_elements(&self) -> u32 {
        self.n_elements
    }
    pub fn sigmas(&self) -> Sigmas {
        self.sigmas
    }
    pub fn sigma_sr(&self) -> f64 {
        self.sigmas.sr
    }
    pub fn sigma_rd(&self) -> f64 {
        self.sigmas.rd
    }
    pub fn sigma_ir(&self) -> f64 {
        self.sigmas.ir
    }
    pub fn sigma_id(&self) -> f64 {
        self.sigmas.id
    }
    pub fn snr_db(&self) -> f64 {
        self.snr_db
    }
    pub fn inr_db(&self) -> f64 {
        self.inr_db
    }
    pub fn gamma_th_db(&self) -> f64 {
        self.gamma_th_db
    }

    /// Average SIR `γ̄ = γ̄_S / γ̄_I` (linear).
    pub fn gamma_bar(&self) -> f64 {
        db_to_linear(self.snr_db - self.inr_db)
    }

    pub fn gamma_bar_db(&self) -> f64 {
        self.snr_db - self.inr_db
    }

    /// Threshold `γ_th` (linear).
    pub fn gamma_th(&self) -> f64 {
        db_to_linear(self.gamma_th_db)
    }

    /// Product of the desired-cascade amplitude std-devs `σ_S,R σ_R,D`.
    pub fn desired_scale(&self) -> f64 {
        self.sigmas.sr * self.sigmas.rd
    }

    /// Product of the reflected-interference std-devs `σ_I,R σ_R,D`.
    pub fn interference_scale(&self) -> f64 {
        self.sigmas.ir * self.sigmas.rd
    }

    pub fn with_snr_db(self, snr_db: f64) -> Result<Self> {
        Self::new(self.n_elements, self.sigmas, snr_db, self.inr_db, self.gamma_th_db)
    }
    pub fn with_inr_db(self, inr_db: f64) -> Result<Self> {
        Self::new(self.n_elements, self.sigmas, self.snr_db, inr_db, self.gamma_th_db)
    }
    pub fn with_gamma_th_db(self, gamma_th_db: f64) -> Result<Self> {
        Self::new(self.n_elements, self.sigmas, self.snr_db, self.inr_db, gamma_th_db)
    }
    pub fn with_n_elements(self, n_elements: u32) -> Result<Self> {
        Self::new(n_elements, self.sigmas, self.snr_db, self.inr_db, self.gamma_th_db)
    }
    pub fn with_sigmas(self, sigmas: Sigmas) -> Result<Self> {
        Self::new(self.n_elements, sigmas, self.snr_db, self.inr_db, self.gamma_th_db)
    }
}

/// One realization of every channel magnitude plus the residual phases.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    pub h_mag: Vec<f64>,
    pub g_mag: Vec<f64>,
    pub alpha_mag: Vec<f64>,
    pub beta_mag: Vec<f64>,
    /// Residual phase of each reflected interference term, in `[0, 2π)`.
    pub theta_prime: Vec<f64>,
    pub h_i_mag: f64,
    /// Phase of the direct interference channel, in `[0, 2π)`.
    pub h_i_phase: f64,
}

#[inline]
fn rayleigh<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> f64 {
    // |h|² ~ Exp(mean σ²); 1 - u keeps the log argument in (0, 1].
    let u: f64 = rng.random();
    sigma * (-(1.0 - u).ln()).sqrt()
}

#[inline]
fn phase<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    u * TAU
}

impl ChannelDraw {
    pub fn zeros(n: usize) -> Self {
        ChannelDraw {
            h_mag: vec![0.0; n],
            g_mag: vec![0.0; n],
            alpha_mag: vec![0.0; n],
            beta_mag: vec![0.0; n],
            theta_prime: vec![0.0; n],
            h_i_mag: 0.0,
            h_i_phase: 0.0,
        }
    }

    pub fn n_elements(&self) -> usize {
        self.h_mag.len()
    }

    /// Overwrite this draw in place with a fresh realization.
    ///
    /// Per element the order of consumption is `h, g, α, β, θ′`, followed by
    /// `|h_I|` and its phase; that order is part of the determinism contract.
    pub fn resample<R: Rng + ?Sized>(&mut self, params: &SystemParams, rng: &mut R) {
        let n = params.n_elements() as usize;
        if self.h_mag.len() != n {
            *self = ChannelDraw::zeros(n);
        }
        let s = params.sigmas();
        for i in 0..n {
            self.h_mag[i] = rayleigh(s.sr, rng);
            self.g_mag[i] = rayleigh(s.rd, rng);
            self.alpha_mag[i] = rayleigh(s.ir, rng);
            self.beta_mag[i] = rayleigh(s.rd, rng);
            self.theta_prime[i] = phase(rng);
        }
        self.h_i_mag = rayleigh(s.id, rng);
        self.h_i_phase = phase(rng);
    }
}

/// Draw one realization of all channels for `params`.
pub fn sample_channels<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> ChannelDraw {
    let mut d = ChannelDraw::zeros(params.n_elements() as usize);
    d.resample(params, rng);
    d
}

/// `X`, `Y` and the SIR for one draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirSample {
    pub x_value: f64,
    pub y_value: f64,
    pub sir: f64,
}

/// Desired amplitude `X = Σ|g||h|` and interference envelope
/// `Y = |Σ|β||α|e^{jθ′} + h_I|` without dimension checks.
#[inline]
pub(crate) fn x_and_y(draw: &ChannelDraw) -> (f64, f64) {
    let mut x = 0.0;
    let mut re = draw.h_i_mag * draw.h_i_phase.cos();
    let mut im = draw.h_i_mag * draw.h_i_phase.sin();
    for i in 0..draw.h_mag.len() {
        x += draw.g_mag[i] * draw.h_mag[i];
        let a = draw.beta_mag[i] * draw.alpha_mag[i];
        let (s, c) = draw.theta_prime[i].sin_cos();
        re += a * c;
        im += a * s;
    }
    (x, re.hypot(im))
}

/// Interference-limited SIR `γ = γ̄ X² / Y²`.
pub fn instantaneous_sir(params: &SystemParams, draw: &ChannelDraw) -> Result<SirSample> {
    let n = params.n_elements() as usize;
    let lens = [
        draw.h_mag.len(),
        draw.g_mag.len(),
        draw.alpha_mag.len(),
        draw.beta_mag.len(),
        draw.theta_prime.len(),
    ];
    if lens.iter().any(|&l| l != n) {
        return Err(Error::Contract(format!(
            "channel draw dimensions {lens:?} do not match n_elements = {n}"
        )));
    }
    let (x_value, y_value) = x_and_y(draw);
    let sir = params.gamma_bar() * x_value * x_value / (y_value * y_value);
    Ok(SirSample {
        x_value,
        y_value,
        sir,
    })
}
