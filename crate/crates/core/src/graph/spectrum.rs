//! Dense Laplacian spectra for desk-scale graphs.

use nalgebra::{DMatrix, SymmetricEigen};

use super::Graph;
use crate::error::{Error, Result};

/// Eigenvalues with magnitude at or below this count as zero.
pub const ZERO_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    /// Refuse graphs with more vertices than this.
    pub max_vertices: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            max_vertices: 20_000,
        }
    }
}

/// The `num_values` smallest eigenvalues of `D - A`, ascending.
///
/// Edge weights are ignored; this is the combinatorial Laplacian of the
/// underlying simple graph.
pub fn laplacian_spectrum(
    graph: &Graph,
    num_values: usize,
    opts: SpectrumOptions,
) -> Result<Vec<f64>> {
    let n = graph.vertex_count();
    if n > opts.max_vertices {
        return Err(Error::GraphTooLarge {
            vertex_count: n,
            cap: opts.max_vertices,
        });
    }
    if num_values > n {
        return Err(Error::TooManyEigenvalues {
            requested: num_values,
            vertex_count: n,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for (u, v) in graph.edges().iter() {
        let (u, v) = (u as usize, v as usize);
        lap[(u, v)] = -1.0;
        lap[(v, u)] = -1.0;
        lap[(u, u)] += 1.0;
        lap[(v, v)] += 1.0;
    }
    let mut values: Vec<f64> = SymmetricEigen::new(lap)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    values.truncate(num_values);
    Ok(values)
}

/// Number of eigenvalues within `tol` of zero.
pub fn zero_multiplicity(eigenvalues: &[f64], tol: f64) -> usize {
    eigenvalues.iter().filter(|x| x.abs() <= tol).count()
}
