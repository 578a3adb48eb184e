//! Analytic Gaussian-mixture prior over latents, with its closed-form
//! time-diffused score.
//!
//! Under the VP forward process each component `N(M_c, σ²I)` diffuses to
//! `N(√α̅ M_c, (α̅σ² + 1−α̅) I)`, so `∇_z log p_t(z)` is available exactly:
//! posterior component responsibilities (log-sum-exp stabilized) weight the
//! per-component Gaussian scores.

use super::schedule::NoiseSchedule;
use super::GeneratorError;
use crate::structure::Structure;

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureComponent {
    /// Flattened N×d mean, row-major.
    pub mean: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixturePrior {
    components: Vec<MixtureComponent>,
    sigma: f64,
    n_residues: usize,
    dim: usize,
}

impl MixturePrior {
    pub fn new(
        components: Vec<MixtureComponent>,
        sigma: f64,
        n_residues: usize,
        dim: usize,
    ) -> Result<Self, GeneratorError> {
        if components.is_empty() {
            return Err(GeneratorError::BadConfig("mixture has no components".into()));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(GeneratorError::BadConfig(format!(
                "mixture sigma must be positive, got {sigma}"
            )));
        }
        let len = n_residues * dim;
        let mut total = 0.0;
        for (i, c) in components.iter().enumerate() {
            if c.mean.len() != len {
                return Err(GeneratorError::ShapeMismatch {
                    expected: format!("{n_residues}x{dim}"),
                    got: format!("component {i} with {} values", c.mean.len()),
                });
            }
            if !(c.weight > 0.0) {
                return Err(GeneratorError::BadConfig(format!(
                    "component {i} weight must be positive, got {}",
                    c.weight
                )));
            }
            total += c.weight;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(GeneratorError::BadConfig(format!(
                "component weights sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            components,
            sigma,
            n_residues,
            dim,
        })
    }

    /// A component mean is the whitened CA trace of a reference conformation.
    pub fn from_structures(
        references: &[(&Structure, f64)],
        sigma: f64,
        decode_scale: f64,
    ) -> Result<Self, GeneratorError> {
        if references.is_empty() {
            return Err(GeneratorError::BadConfig("mixture has no components".into()));
        }
        if !(decode_scale > 0.0) {
            return Err(GeneratorError::BadConfig(format!(
                "decode_scale must be positive, got {decode_scale}"
            )));
        }
        let n = references[0].0.n_residues();
        let mut components = Vec::with_capacity(references.len());
        for (s, w) in references {
            if s.n_residues() != n {
                return Err(GeneratorError::ShapeMismatch {
                    expected: format!("{n} residues"),
                    got: format!("{} residues", s.n_residues()),
                });
            }
            let mean: Vec<f64> = s
                .ca_trace()?
                .iter()
                .flat_map(|p| p.iter().map(|c| c / decode_scale))
                .collect();
            components.push(MixtureComponent { mean, weight: *w });
        }
        Self::new(components, sigma, n, 3)
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn n_residues(&self) -> usize {
        self.n_residues
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Per-dimension marginal variance of the diffused mixture component.
    pub fn diffused_variance(&self, schedule: &NoiseSchedule, t: f64) -> f64 {
        let ab = schedule.alpha_bar(t);
        ab * self.sigma * self.sigma + (1.0 - ab)
    }

    /// Posterior component responsibilities of `z` at time `t`.
    pub fn responsibilities(&self, schedule: &NoiseSchedule, values: &[f64], t: f64) -> Vec<f64> {
        let ab = schedule.alpha_bar(t);
        let sab = ab.sqrt();
        let v = self.diffused_variance(schedule, t);
        let logits: Vec<f64> = self
            .components
            .iter()
            .map(|c| {
                let sq: f64 = values
                    .iter()
                    .zip(&c.mean)
                    .map(|(z, m)| {
                        let d = z - sab * m;
                        d * d
                    })
                    .sum();
                c.weight.ln() - sq / (2.0 * v)
            })
            .collect();
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut out: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
        let sum: f64 = out.iter().sum();
        for r in &mut out {
            *r /= sum;
        }
        out
    }

    /// Closed-form ∇_z log p_t(z), written into `out`.
    pub fn score_into(&self, schedule: &NoiseSchedule, values: &[f64], t: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), values.len());
        let ab = schedule.alpha_bar(t);
        let sab = ab.sqrt();
        let v = self.diffused_variance(schedule, t);
        let resp = self.responsibilities(schedule, values, t);
        out.fill(0.0);
        for (c, r) in self.components.iter().zip(&resp) {
            for ((o, z), m) in out.iter_mut().zip(values).zip(&c.mean) {
                *o += r * (sab * m - z) / v;
            }
        }
    }

    pub fn score(&self, schedule: &NoiseSchedule, values: &[f64], t: f64) -> Vec<f64> {
        let mut out = vec![0.0; values.len()];
        self.score_into(schedule, values, t, &mut out);
        out
    }

    /// Index of the component whose mean is nearest to a clean latent.
    pub fn nearest_component(&self, values: &[f64]) -> usize {
        let mut best = 0;
        let mut best_sq = f64::INFINITY;
        for (i, c) in self.components.iter().enumerate() {
            let sq: f64 = values
                .iter()
                .zip(&c.mean)
                .map(|(z, m)| (z - m) * (z - m))
                .sum();
            if sq < best_sq {
                best_sq = sq;
                best = i;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_component(n: usize) -> MixturePrior {
        let a = vec![1.0; n * 3];
        let b = vec![-1.0; n * 3];
        MixturePrior::new(
            vec![
                MixtureComponent { mean: a, weight: 0.5 },
                MixtureComponent { mean: b, weight: 0.5 },
            ],
            0.15,
            n,
            3,
        )
        .unwrap()
    }

    #[test]
    fn single_component_unit_sigma_score_is_mean_minus_z() {
        let prior = MixturePrior::new(
            vec![MixtureComponent {
                mean: vec![0.5, -0.25, 2.0],
                weight: 1.0,
            }],
            1.0,
            1,
            3,
        )
        .unwrap();
        let sched = NoiseSchedule::default();
        let z = [0.1, 0.2, 0.3];
        let score = prior.score(&sched, &z, 0.0);
        for (k, s) in score.iter().enumerate() {
            let expected = prior.components()[0].mean[k] - z[k];
            assert!((s - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn responsibilities_saturate_deep_in_a_basin() {
        let prior = two_component(4);
        let sched = NoiseSchedule::default();
        let z = vec![1.0; 12]; // exactly component 0's mean
        let r = prior.responsibilities(&sched, &z, 0.0);
        assert!(r[0] > 1.0 - 1e-12);
        assert!(r[1] < 1e-12);
    }

    #[test]
    fn weights_must_sum_to_one() {
        let err = MixturePrior::new(
            vec![
                MixtureComponent {
                    mean: vec![0.0; 3],
                    weight: 0.6,
                },
                MixtureComponent {
                    mean: vec![1.0; 3],
                    weight: 0.6,
                },
            ],
            0.1,
            1,
            3,
        )
        .unwrap_err();
        assert!(err.to_string().contains("sum"));
    }

    #[test]
    fn score_matches_finite_differences_of_log_density() {
        // independent log p_t: direct log-sum-exp over diffused components
        use rand::{Rng, SeedableRng};
        let sched = NoiseSchedule::default();
        let prior = two_component(2);
        let log_pt = |values: &[f64], t: f64| -> f64 {
            let ab = sched.alpha_bar(t);
            let v = ab * prior.sigma() * prior.sigma() + (1.0 - ab);
            let terms: Vec<f64> = prior
                .components()
                .iter()
                .map(|c| {
                    let sq: f64 = values
                        .iter()
                        .zip(&c.mean)
                        .map(|(z, m)| (z - ab.sqrt() * m) * (z - ab.sqrt() * m))
                        .sum();
                    c.weight.ln()
                        - sq / (2.0 * v)
                        - 0.5 * values.len() as f64 * (2.0 * std::f64::consts::PI * v).ln()
                })
                .collect();
            let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            max + terms.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let t: f64 = rng.random_range(0.0..1.0);
            let z: Vec<f64> = (0..6).map(|_| rng.random_range(-2.0..2.0)).collect();
            let score = prior.score(&sched, &z, t);
            let h = 1e-5;
            for k in 0..6 {
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[k] += h;
                zm[k] -= h;
                let fd = (log_pt(&zp, t) - log_pt(&zm, t)) / (2.0 * h);
                let denom = fd.abs().max(1e-3);
                assert!(
                    (score[k] - fd).abs() / denom < 1e-5,
                    "t={t} k={k}: score {} vs fd {fd}",
                    score[k]
                );
            }
        }
    }
}
