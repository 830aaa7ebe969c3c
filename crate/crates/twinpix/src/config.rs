//! Simulation configuration: detector response, pair source and frame geometry.
//!
//! A run is described by a single TOML document with three tables:
//!
//! ```toml
//! [grid]
//! width_px = 64
//! height_px = 64
//! frames = 100
//!
//! [detector]
//! kind = "emccd"            # "emccd" | "iccd"; presets eta/p_n, both overridable
//! quantum_efficiency = 0.9
//! noise_prob = 0.01
//!
//! [source]
//! mean_photoelectrons = 0.15   # target detected mean per pixel per frame, pre pile-up
//! temporal_modes = 1000
//! coherence_cell_px = 1        # C, a perfect square; cell side must divide the grid
//! envelope = "uniform"         # "uniform" | "gaussian"
//! # envelope_waist_px = 10.0   # required for "gaussian"
//! geometry = "near_field"      # "near_field" | "far_field"
//! fluorescence_ratio = 0.0
//! ```
//!
//! Keys carry explicit units (`_px`, counts, probabilities) so a config file is
//! unambiguous without reading the docs. Unknown keys are rejected with the key
//! name in the error message.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Upper bound on the per-pixel noise probability accepted by the simulator.
///
/// Noise is injected as one Bernoulli event per pixel, a first-order stand-in
/// for Poisson clock-induced charge; the two are indistinguishable below this
/// level.
pub const MAX_NOISE_PROB: f64 = 0.05;

/// Upper bound on the per-mode photon number `v^2 = m / (eta * M)`.
///
/// Above this the low-gain approximation behind the pair statistics breaks
/// down and configs are rejected.
pub const MAX_PHOTONS_PER_MODE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    Emccd,
    Iccd,
}

/// On-off single-photon detector model: quantum efficiency plus a per-pixel
/// spurious event probability. The `kind` selects presets only; the model
/// equations are identical for both camera types.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    pub kind: DetectorKind,
    /// Probability that an incident photon yields a photoelectron above
    /// threshold.
    #[serde(default)]
    pub quantum_efficiency: Option<f64>,
    /// Probability of a spurious detection per pixel per frame (clock-induced
    /// charge for an EMCCD, residual dark/stray events for an ICCD).
    #[serde(default)]
    pub noise_prob: Option<f64>,
}

impl DetectorConfig {
    pub fn emccd() -> Self {
        DetectorConfig {
            kind: DetectorKind::Emccd,
            quantum_efficiency: None,
            noise_prob: None,
        }
    }

    pub fn iccd() -> Self {
        DetectorConfig {
            kind: DetectorKind::Iccd,
            quantum_efficiency: None,
            noise_prob: None,
        }
    }

    pub fn with_params(kind: DetectorKind, eta: f64, p_n: f64) -> Self {
        DetectorConfig {
            kind,
            quantum_efficiency: Some(eta),
            noise_prob: Some(p_n),
        }
    }

    /// Effective quantum efficiency, falling back to the preset for `kind`.
    pub fn eta(&self) -> f64 {
        self.quantum_efficiency.unwrap_or(match self.kind {
            DetectorKind::Emccd => 0.9,
            DetectorKind::Iccd => 0.5,
        })
    }

    /// Effective noise probability, falling back to the preset for `kind`.
    pub fn p_n(&self) -> f64 {
        self.noise_prob.unwrap_or(match self.kind {
            DetectorKind::Emccd => 1e-2,
            DetectorKind::Iccd => 1e-5,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let eta = self.eta();
        let p_n = self.p_n();
        if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "detector.quantum_efficiency must lie in [0, 1], got {eta}"
            )));
        }
        if !(0.0..1.0).contains(&p_n) || !p_n.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "detector.noise_prob must lie in [0, 1), got {p_n}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    /// Flat illumination over the whole grid.
    Uniform,
    /// Gaussian beam intensity profile centred on the grid,
    /// `I(r) ~ exp(-2 r^2 / waist^2)`.
    Gaussian,
}

/// Twin-position rule relating signal and idler coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    /// Position correlation: the twin lands on the same pixel index.
    NearField,
    /// Momentum anti-correlation: the twin lands at the point reflection
    /// about the beam centre.
    FarField,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    /// Target mean number of detected photoelectrons per pixel per frame
    /// (before pile-up losses). The pair emission rate is derived as
    /// `mean_photoelectrons / eta`.
    pub mean_photoelectrons: f64,
    /// Number of temporal modes contributing to each frame.
    pub temporal_modes: u32,
    /// Coherence cell size C in pixels (a perfect square). The twin photon
    /// lands uniformly within the sqrt(C) x sqrt(C) cell containing its
    /// nominal twin pixel; cells tile the grid.
    pub coherence_cell_px: u32,
    pub envelope: EnvelopeKind,
    /// Beam waist in pixels; required when `envelope = "gaussian"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope_waist_px: Option<f64>,
    pub geometry: Geometry,
    /// Ratio of uncorrelated fluorescence singles to pair photons.
    pub fluorescence_ratio: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        SourceConfig {
            mean_photoelectrons: 0.15,
            temporal_modes: 1000,
            coherence_cell_px: 1,
            envelope: EnvelopeKind::Uniform,
            envelope_waist_px: None,
            geometry: Geometry::NearField,
            fluorescence_ratio: 0.0,
        }
    }
}

impl SourceConfig {
    /// Side length of a coherence cell, `sqrt(C)`.
    pub fn cell_side(&self) -> u32 {
        (self.coherence_cell_px as f64).sqrt().round() as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub width_px: u32,
    pub height_px: u32,
    /// Number of frames K acquired per arm.
    pub frames: u32,
}

impl Grid {
    pub fn new(width: u32, height: u32, frames: u32) -> Self {
        Grid {
            width_px: width,
            height_px: height,
            frames,
        }
    }

    /// Total pixel count D per frame.
    pub fn pixels(&self) -> usize {
        self.width_px as usize * self.height_px as usize
    }
}

/// Full description of a simulation run. Serialises to the canonical TOML
/// document; the SHA-256 of that document keys stack files to their config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub grid: Grid,
    pub detector: DetectorConfig,
    pub source: SourceConfig,
}

impl SimulationConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimulationConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Canonical serialised form; field order is fixed by the struct layout.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// First eight bytes (little endian) of the SHA-256 of the canonical TOML.
    pub fn config_hash(&self) -> u64 {
        let digest = Sha256::digest(self.to_toml_string().as_bytes());
        u64::from_le_bytes(digest[..8].try_into().unwrap())
    }

    /// Per-mode photon number `v^2 = m / (eta * M)`.
    pub fn photons_per_mode(&self) -> f64 {
        let eta = self.detector.eta();
        let m = self.source.mean_photoelectrons;
        if m == 0.0 {
            0.0
        } else {
            m / (eta * self.source.temporal_modes as f64)
        }
    }

    /// Mean pair emissions per pixel per frame, `m / eta`.
    pub fn pair_rate(&self) -> f64 {
        let m = self.source.mean_photoelectrons;
        if m == 0.0 {
            0.0
        } else {
            m / self.detector.eta()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if g.width_px == 0 || g.height_px == 0 {
            return Err(Error::InvalidConfig(
                "grid.width_px and grid.height_px must be positive".into(),
            ));
        }
        if g.width_px > 1 << 14 || g.height_px > 1 << 14 {
            return Err(Error::InvalidConfig(format!(
                "grid dimensions {}x{} exceed the supported 16384 limit",
                g.width_px, g.height_px
            )));
        }
        if g.frames == 0 {
            return Err(Error::InvalidConfig("grid.frames must be positive".into()));
        }

        self.detector.validate()?;
        let eta = self.detector.eta();
        let p_n = self.detector.p_n();
        if p_n >= MAX_NOISE_PROB {
            return Err(Error::InvalidConfig(format!(
                "detector.noise_prob {p_n} is outside the Bernoulli noise domain (< {MAX_NOISE_PROB})"
            )));
        }

        let s = &self.source;
        if !(s.mean_photoelectrons >= 0.0) || !s.mean_photoelectrons.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "source.mean_photoelectrons must be >= 0, got {}",
                s.mean_photoelectrons
            )));
        }
        if s.mean_photoelectrons > 0.0 && eta == 0.0 {
            return Err(Error::InvalidConfig(
                "source.mean_photoelectrons > 0 requires quantum_efficiency > 0".into(),
            ));
        }
        if s.temporal_modes == 0 {
            return Err(Error::InvalidConfig(
                "source.temporal_modes must be positive".into(),
            ));
        }
        let v2 = self.photons_per_mode();
        if v2 >= MAX_PHOTONS_PER_MODE {
            return Err(Error::InvalidConfig(format!(
                "per-mode photon number v^2 = m/(eta*M) = {v2:.4} violates the \
                 low-gain assumption (must be < {MAX_PHOTONS_PER_MODE}); lower \
                 mean_photoelectrons or raise temporal_modes"
            )));
        }

        let c = s.coherence_cell_px;
        if c == 0 {
            return Err(Error::InvalidConfig(
                "source.coherence_cell_px must be positive".into(),
            ));
        }
        let side = s.cell_side();
        if side * side != c {
            return Err(Error::InvalidConfig(format!(
                "source.coherence_cell_px = {c} is not a perfect square"
            )));
        }
        if g.width_px % side != 0 || g.height_px % side != 0 {
            return Err(Error::InvalidConfig(format!(
                "coherence cell side {side} must divide the grid ({}x{})",
                g.width_px, g.height_px
            )));
        }

        match s.envelope {
            EnvelopeKind::Uniform => {
                if s.envelope_waist_px.is_some() {
                    return Err(Error::InvalidConfig(
                        "source.envelope_waist_px is only meaningful for envelope = \"gaussian\""
                            .into(),
                    ));
                }
            }
            EnvelopeKind::Gaussian => {
                let waist = s.envelope_waist_px.ok_or_else(|| {
                    Error::InvalidConfig(
                        "envelope = \"gaussian\" requires source.envelope_waist_px".into(),
                    )
                })?;
                if !(waist > 0.0) || !waist.is_finite() {
                    return Err(Error::InvalidConfig(format!(
                        "source.envelope_waist_px must be positive, got {waist}"
                    )));
                }
                let half = g.width_px.min(g.height_px) as f64 / 2.0;
                if waist > half {
                    return Err(Error::InvalidConfig(format!(
                        "source.envelope_waist_px = {waist} exceeds the grid half-size {half}; \
                         the envelope would be truncated"
                    )));
                }
            }
        }

        if !(s.fluorescence_ratio >= 0.0) || !s.fluorescence_ratio.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "source.fluorescence_ratio must be >= 0, got {}",
                s.fluorescence_ratio
            )));
        }
        Ok(())
    }
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            grid: Grid::new(64, 64, 100),
            detector: DetectorConfig::emccd(),
            source: SourceConfig::default(),
        }
    }
}
