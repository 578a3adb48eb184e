//! Residue-wise latent state: an N×d matrix tagged with its diffusion time.

use super::GeneratorError;

#[derive(Debug, Clone, PartialEq)]
pub struct Latent {
    values: Vec<f64>, // row-major, n_residues × dim
    n_residues: usize,
    dim: usize,
    time: f64,
}

impl Latent {
    pub fn new(
        values: Vec<f64>,
        n_residues: usize,
        dim: usize,
        time: f64,
    ) -> Result<Self, GeneratorError> {
        if values.len() != n_residues * dim {
            return Err(GeneratorError::ShapeMismatch {
                expected: format!("{n_residues}x{dim}"),
                got: format!("{} values", values.len()),
            });
        }
        if !(0.0..=1.0).contains(&time) {
            return Err(GeneratorError::TimeOutOfRange { t: time });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(GeneratorError::NonFiniteState { t: time });
        }
        Ok(Self {
            values,
            n_residues,
            dim,
            time,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_residues(&self) -> usize {
        self.n_residues
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Row of residue `i` (0-based).
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn set_row(&mut self, i: usize, row: &[f64]) {
        assert_eq!(row.len(), self.dim);
        self.values[i * self.dim..(i + 1) * self.dim].copy_from_slice(row);
    }

    pub(crate) fn from_parts(values: Vec<f64>, n_residues: usize, dim: usize, time: f64) -> Self {
        debug_assert_eq!(values.len(), n_residues * dim);
        Self {
            values,
            n_residues,
            dim,
            time,
        }
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub(crate) fn set_time(&mut self, t: f64) {
        self.time = t;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_is_checked() {
        assert!(Latent::new(vec![0.0; 5], 2, 3, 0.0).is_err());
        assert!(Latent::new(vec![0.0; 6], 2, 3, 0.0).is_ok());
    }

    #[test]
    fn rejects_non_finite_and_bad_time() {
        assert!(Latent::new(vec![f64::NAN; 3], 1, 3, 0.0).is_err());
        assert!(Latent::new(vec![0.0; 3], 1, 3, 1.5).is_err());
    }

    #[test]
    fn row_access() {
        let mut z = Latent::new(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 2, 3, 0.5).unwrap();
        assert_eq!(z.row(1), &[4.0, 5.0, 6.0]);
        z.set_row(0, &[9.0, 8.0, 7.0]);
        assert_eq!(z.row(0), &[9.0, 8.0, 7.0]);
        assert_eq!(z.time(), 0.5);
    }
}
