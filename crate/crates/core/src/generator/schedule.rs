//! Cosine variance-preserving noise schedule and the index↔time map.
//!
//! Signal retention follows the squared-cosine profile
//! `α̅(t) = cos²(π/2 · (t+s)/(1+s)) / cos²(π/2 · s/(1+s))` with `s = 0.008`,
//! so `α̅(0) = 1` exactly and `α̅(1) ≈ 0`. The rate `β(t) = -d log α̅/dt`
//! diverges at `t → 1`; α̅ is floored at 1e-6 and β is set to zero beyond the
//! floor time, which freezes the (numerically untreatable, physically empty)
//! final sliver of the forward process and keeps fixed-step integrators
//! stable. Kernel, score, and integrators all share the floored α̅, so the
//! pieces stay mutually consistent.

use super::GeneratorError;
use serde::{Deserialize, Serialize};

const COSINE_S: f64 = 0.008;
pub const ALPHA_BAR_FLOOR: f64 = 1e-6;

/// Cosine schedule over t ∈ [0, 1] with a discrete index ladder:
/// index 0 is fully noisy (t = 1), index `n_indices` fully clean (t = 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSchedule {
    n_indices: u32,
}

impl Default for NoiseSchedule {
    fn default() -> Self {
        Self { n_indices: 50 }
    }
}

impl NoiseSchedule {
    pub fn cosine(n_indices: u32) -> Result<Self, GeneratorError> {
        if n_indices == 0 {
            return Err(GeneratorError::BadConfig(
                "n_indices must be at least 1".into(),
            ));
        }
        Ok(Self { n_indices })
    }

    pub fn n_indices(&self) -> u32 {
        self.n_indices
    }

    fn angle(t: f64) -> f64 {
        std::f64::consts::FRAC_PI_2 * (t + COSINE_S) / (1.0 + COSINE_S)
    }

    fn raw_alpha_bar(t: f64) -> f64 {
        let c = Self::angle(t).cos();
        let c0 = Self::angle(0.0).cos();
        (c * c) / (c0 * c0)
    }

    /// Retained signal fraction, floored at 1e-6.
    pub fn alpha_bar(&self, t: f64) -> f64 {
        Self::raw_alpha_bar(t).clamp(ALPHA_BAR_FLOOR, 1.0)
    }

    pub fn log_alpha_bar(&self, t: f64) -> f64 {
        self.alpha_bar(t).ln()
    }

    /// Instantaneous noising rate; zero beyond the α̅ floor time.
    pub fn beta(&self, t: f64) -> f64 {
        if Self::raw_alpha_bar(t) <= ALPHA_BAR_FLOOR {
            0.0
        } else {
            std::f64::consts::PI / (1.0 + COSINE_S) * Self::angle(t).tan()
        }
    }

    /// The time above which α̅ sits on its floor and β is zeroed.
    pub fn floor_time(&self) -> f64 {
        let c0 = Self::angle(0.0).cos();
        let target = (ALPHA_BAR_FLOOR * c0 * c0).sqrt();
        target.acos() * 2.0 * (1.0 + COSINE_S) / std::f64::consts::PI - COSINE_S
    }

    /// t = 1 − index / n_indices.
    pub fn index_to_time(&self, index: u32) -> Result<f64, GeneratorError> {
        if index > self.n_indices {
            return Err(GeneratorError::IndexOutOfRange {
                index,
                max: self.n_indices,
            });
        }
        Ok(1.0 - index as f64 / self.n_indices as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_bar_endpoints() {
        let s = NoiseSchedule::default();
        assert_eq!(s.alpha_bar(0.0), 1.0);
        assert!(s.alpha_bar(1.0) <= 1e-3);
        assert!(s.alpha_bar(1.0) >= ALPHA_BAR_FLOOR);
    }

    #[test]
    fn alpha_bar_is_monotone_decreasing() {
        let s = NoiseSchedule::default();
        let mut prev = s.alpha_bar(0.0);
        for i in 1..=100 {
            let ab = s.alpha_bar(i as f64 / 100.0);
            assert!(ab <= prev);
            prev = ab;
        }
    }

    #[test]
    fn beta_positive_below_floor_time() {
        let s = NoiseSchedule::default();
        let clip = s.floor_time();
        for i in 1..100 {
            let t = i as f64 / 100.0;
            if t < clip {
                assert!(s.beta(t) > 0.0, "beta({t}) not positive");
            }
        }
        assert_eq!(s.beta(1.0), 0.0);
        assert!(clip > 0.99 && clip < 1.0, "floor time {clip}");
    }

    #[test]
    fn beta_matches_log_alpha_bar_derivative() {
        // β = -d log α̅ / dt away from the floor
        let s = NoiseSchedule::default();
        for &t in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let h = 1e-6;
            let fd = -(s.log_alpha_bar(t + h) - s.log_alpha_bar(t - h)) / (2.0 * h);
            let rel = (s.beta(t) - fd).abs() / fd.abs();
            assert!(rel < 1e-6, "t={t}: beta {} vs fd {fd}", s.beta(t));
        }
    }

    #[test]
    fn index_time_map() {
        let s = NoiseSchedule::default();
        assert_eq!(s.index_to_time(0).unwrap(), 1.0);
        assert_eq!(s.index_to_time(50).unwrap(), 0.0);
        assert_eq!(s.index_to_time(25).unwrap(), 0.5);
        assert!(s.index_to_time(51).is_err());
        // monotone: larger index, smaller time
        let mut prev = 2.0;
        for i in 0..=50 {
            let t = s.index_to_time(i).unwrap();
            assert!(t < prev);
            prev = t;
        }
    }
}
