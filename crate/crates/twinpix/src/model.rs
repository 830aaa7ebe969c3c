//! Closed-form pair-detection probabilities of the idealized imaging model.
//!
//! In the idealized picture every photon of a pair lands on a definite pixel:
//! the idler twin of a signal photon at `i` arrives at the geometric twin
//! position of `i` (the same pixel in the near field, the point reflection
//! about the beam centre in the far field). The mean coincidence count for a
//! pixel couple then splits into an accidental floor shared by all couples
//! plus a twin excess on the matched couple only.

use crate::config::{DetectorConfig, Geometry, Grid, SourceConfig};
use crate::error::{Error, Result};

/// Pixel coordinate on the detector grid, `(x, y)` with `x` along the width.
pub type Pixel = (u32, u32);

/// Twin position of `p` under the given geometry, for a beam centred on the
/// grid. Identity in the near field; point reflection in the far field.
pub fn twin_pixel(geometry: Geometry, grid: &Grid, p: Pixel) -> Pixel {
    match geometry {
        Geometry::NearField => p,
        Geometry::FarField => (grid.width_px - 1 - p.0, grid.height_px - 1 - p.1),
    }
}

/// Accidental coincidence floor `(m + p_n)^2`: joint detections from
/// unrelated photons, photon-noise or noise-noise events.
pub fn accidental_floor(m: f64, p_n: f64) -> Result<f64> {
    if !(m >= 0.0&& p_n >= 0.0) || !(m + p_n).is_finite() {
        return Err(Error::OutOfDomain(format!(
            "accidental floor needs m >= 0 and p_n >= 0, got m={m}, p_n={p_n}"
        )));
    }
    if m + p_n >= 1.0 {
        return Err(Error::OutOfDomain(format!(
            "m + p_n = {} >= 1: probability interpretation breaks down",
            m + p_n
        )));
    }
    Ok((m + p_n) * (m + p_n))
}

/// Twin excess on a matched pixel couple: `m^2 / M + eta * m`.
pub fn twin_excess(src: &SourceConfig, det: &DetectorConfig) -> f64 {
    let m = src.mean_photoelectrons;
    m * m / src.temporal_modes as f64 + det.eta() * m
}

/// Mean coincidence count between pixels `i` (signal arm) and `j` (idler arm):
/// the accidental floor `(m + p_n)^2` plus, when `j` is the geometric twin of
/// `i`, the twin excess `m^2 / M + eta * m`.
///
/// Only valid when multiple detections per pixel are negligible; rejects
/// `m + p_n >= 1` (use the detector module's pile-up corrections there).
pub fn coincidence_probability(
    i: Pixel,
    j: Pixel,
    grid: &Grid,
    src: &SourceConfig,
    det: &DetectorConfig,
) -> Result<f64> {
    det.validate()?;
    let m = src.mean_photoelectrons;
    let floor = accidental_floor(m, det.p_n())?;
    let twin = twin_pixel(src.geometry, grid, i);
    let delta = if j == twin { 1.0 } else { 0.0 };
    Ok(floor + delta * twin_excess(src, det))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{DetectorKind, SimulationConfig};
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;

    fn setup(m: f64, eta: f64, p_n: f64, modes: u32) -> (Grid, SourceConfig, DetectorConfig) {
        let grid = Grid::new(16, 16, 1);
        let src = SourceConfig {
            mean_photoelectrons: m,
            temporal_modes: modes,
            ..SourceConfig::default()
        };
        let det = DetectorConfig::with_params(DetectorKind::Emccd, eta, p_n);
        (grid, src, det)
    }

    #[test]
    fn off_diagonal_is_squared_mean() {
        let (grid, src, det) = setup(0.1, 0.9, 0.0, 1000);
        let p = coincidence_probability((1, 1), (2, 1), &grid, &src, &det).unwrap();
        assert_relative_eq!(p, 0.01, max_relative = 1e-12);
    }

    #[test]
    fn no_light_no_noise_gives_zero() {
        let (grid, src, det) = setup(0.0, 0.7, 0.0, 1000);
        let p = coincidence_probability((3, 3), (3, 3), &grid, &src, &det).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn diagonal_matches_direct_evaluation() {
        // m^2 + m^2/M + eta*m = 0.01 + 0.00001 + 0.05
        let (grid, src, det) = setup(0.1, 0.5, 0.0, 1000);
        let p = coincidence_probability((5, 9), (5, 9), &grid, &src, &det).unwrap();
        assert_relative_eq!(p, 0.06001, max_relative = 1e-12);
    }

    /// Monte Carlo cross-check of the diagonal coincidence value: sample the
    /// generative picture behind the formula (thermal pair statistics per
    /// temporal mode, independent Bernoulli detection on each arm) and
    /// average the product of the two detected counts on one pixel.
    #[test]
    fn diagonal_matches_pair_sampling_oracle() {
        let m: f64 = 0.1;
        let eta = 0.5;
        let modes = 1000u32;
        let v2 = m / (eta * modes as f64); // photons per mode
        let q = v2 / (1.0 + v2); // geometric parameter, mean v2

        let trials = 10_000_000u64;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        // Modes with at least one pair occur with probability q each; their
        // count over M modes is Binomial(M, q), and each active mode carries
        // 1 + Geometric(q) pairs.
        let binom = rand_distr::Binomial::new(modes as u64, q).unwrap();
        let mut sum_products = 0.0f64;
        for _ in 0..trials {
            let active: u64 = rand::distributions::Distribution::sample(&binom, &mut rng);
            let mut detected_s = 0u64;
            let mut detected_i = 0u64;
            for _ in 0..active {
                let mut pairs = 1u64;
                while rng.gen::<f64>() < q {
                    pairs += 1;
                }
                for _ in 0..pairs {
                    if rng.gen::<f64>() < eta {
                        detected_s += 1;
                    }
                    if rng.gen::<f64>() < eta {
                        detected_i += 1;
                    }
                }
            }
            sum_products += (detected_s * detected_i) as f64;
        }
        let estimate = sum_products / trials as f64;
        let expected = 0.06001;
        // var(S*I) is close to E[S*I] here; allow 4 standard errors.
        let sigma = (0.075f64 / trials as f64).sqrt();
        assert!(
            (estimate - expected).abs() < 4.0 * sigma,
            "MC estimate {estimate} vs {expected} (sigma {sigma:.2e})"
        );
    }

    #[test]
    fn accidental_floor_examples() {
        assert_relative_eq!(accidental_floor(0.15, 0.01).unwrap(), 0.0256);
        assert_eq!(accidental_floor(0.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(accidental_floor(0.0, 0.1).unwrap(), 0.01);
        assert!(accidental_floor(0.9, 0.2).is_err());
        assert!(accidental_floor(-0.1, 0.0).is_err());
    }

    #[test]
    fn off_diagonal_independent_of_eta() {
        let (grid, src, det_a) = setup(0.1, 0.9, 0.004, 1000);
        let det_b = DetectorConfig::with_params(DetectorKind::Iccd, 0.2, 0.004);
        let a = coincidence_probability((0, 0), (4, 4), &grid, &src, &det_a).unwrap();
        let b = coincidence_probability((0, 0), (4, 4), &grid, &src, &det_b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn twin_excess_identity() {
        let (grid, src, det) = setup(0.12, 0.8, 0.01, 500);
        let on = coincidence_probability((7, 2), (7, 2), &grid, &src, &det).unwrap();
        let off = coincidence_probability((7, 2), (8, 2), &grid, &src, &det).unwrap();
        assert_relative_eq!(on - off, twin_excess(&src, &det), max_relative = 1e-12);
    }

    #[test]
    fn twin_excess_decreases_to_eta_m_with_modes() {
        let m = 0.1;
        let eta = 0.6;
        let mut last = f64::INFINITY;
        for modes in [10u32, 100, 1000, 10_000] {
            let (_, src, det) = setup(m, eta, 0.0, modes);
            let excess = twin_excess(&src, &det);
            assert!(excess > eta * m);
            assert!(excess < last);
            last = excess;
        }
        let (_, src, det) = setup(m, eta, 0.0, u32::MAX);
        assert_relative_eq!(twin_excess(&src, &det), eta * m, max_relative = 1e-6);
    }

    #[test]
    fn far_field_twin_is_point_reflection() {
        let grid = Grid::new(32, 16, 1);
        assert_eq!(twin_pixel(Geometry::FarField, &grid, (0, 0)), (31, 15));
        assert_eq!(twin_pixel(Geometry::FarField, &grid, (5, 3)), (26, 12));
        assert_eq!(twin_pixel(Geometry::NearField, &grid, (5, 3)), (5, 3));
    }

    #[test]
    fn far_field_coincidence_uses_reflection() {
        let grid = Grid::new(16, 16, 1);
        let mut cfg = SimulationConfig::default();
        cfg.source.geometry = Geometry::FarField;
        cfg.source.mean_photoelectrons = 0.1;
        let det = DetectorConfig::with_params(DetectorKind::Emccd, 0.5, 0.0);
        let on =
            coincidence_probability((2, 3), (13, 12), &grid, &cfg.source, &det).unwrap();
        let off = coincidence_probability((2, 3), (2, 3), &grid, &cfg.source, &det).unwrap();
        assert!(on > off);
    }
}
