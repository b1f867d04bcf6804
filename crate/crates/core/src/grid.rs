//! Finite-difference representation of [0,1] with Dirichlet ends: uniform
//! grid, on-grid delta potentials, symmetric tridiagonal Schrödinger
//! operators.

use crate::disorder::DisorderSample;
use crate::error::{Error, Result};
use crate::params::Sigma;

/// Uniform interior grid: M nodes z_i = i*h, i = 1..M, spacing h = 1/(M+1).
/// The boundary values psi(0) = psi(1) = 0 are implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub m: usize,
    pub h: f64,
    pub nodes: Vec<f64>,
}

impl Grid {
    pub fn new(m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::domain(format!("grid needs at least 3 interior nodes, got {m}")));
        }
        let h = 1.0 / (m as f64 + 1.0);
        let nodes = (1..=m).map(|i| i as f64 * h).collect();
        Ok(Grid { m, h, nodes })
    }

    /// Default resolution: resolve the shortest typical gap (~1/nu) and the
    /// healing length (~1/sqrt(mu)).
    pub fn auto(nu: f64, mu_estimate: f64) -> Grid {
        let by_nu = (40.0 * nu).ceil() as usize;
        let by_mu = ((8.0 * mu_estimate.max(0.0).sqrt()).ceil() as usize) * 10;
        Grid::new(4000usize.max(by_nu).max(by_mu)).expect("auto grid is always >= 4000 nodes")
    }
}

/// A nonnegative potential sampled on the grid, with its cached integral
/// (h times the value sum), needed by the spectral-gap bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialOnGrid {
    pub values: Vec<f64>,
    pub integral: f64,
}

impl PotentialOnGrid {
    pub fn zero(grid: &Grid) -> Self {
        PotentialOnGrid { values: vec![0.0; grid.m], integral: 0.0 }
    }
}

/// Symmetric tridiagonal operator: the discrete -d^2/dz^2 plus a diagonal
/// potential. Off-diagonal entries are constant -1/h^2; Dirichlet conditions
/// are implicit in the truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    pub diagonal: Vec<f64>,
    pub off_diagonal: Vec<f64>,
}

impl TridiagonalOperator {
    pub fn n(&self) -> usize {
        self.diagonal.len()
    }

    pub fn matvec(&self, v: &[f64], out: &mut [f64]) {
        let n = self.n();
        debug_assert_eq!(v.len(), n);
        for i in 0..n {
            let mut acc = self.diagonal[i] * v[i];
            if i > 0 {
                acc += self.off_diagonal[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.off_diagonal[i] * v[i + 1];
            }
            out[i] = acc;
        }
    }

    /// Infinity norm (max absolute row sum); the scale used in residual and
    /// cluster thresholds.
    pub fn norm_inf(&self) -> f64 {
        let n = self.n();
        let mut best = 0.0f64;
        for i in 0..n {
            let mut row = self.diagonal[i].abs();
            if i > 0 {
                row += self.off_diagonal[i - 1].abs();
            }
            if i + 1 < n {
                row += self.off_diagonal[i].abs();
            }
            best = best.max(row);
        }
        best
    }

    /// Add a constant to the diagonal.
    pub fn shifted(&self, c: f64) -> TridiagonalOperator {
        TridiagonalOperator {
            diagonal: self.diagonal.iter().map(|d| d + c).collect(),
            off_diagonal: self.off_diagonal.clone(),
        }
    }
}

/// Deposit the delta scatterers on the grid.
///
/// Each delta at z_j carries total weight multiplicity*sigma/h, split linearly
/// between the two adjacent nodes (proximity weighting preserves the first
/// moment of the delta). A delta falling in a boundary cell gives its full
/// weight to the single adjacent interior node: weight on the wall itself
/// would multiply psi = 0 and silently lose mass.
pub fn assemble_potential(
    sample: &DisorderSample,
    sigma: Sigma,
    grid: &Grid,
) -> Result<PotentialOnGrid> {
    let s = match sigma.validate()? {
        Sigma::Infinite => {
            return Err(Error::usage(
                "assemble_potential requires finite sigma; the hard wall is handled by domain decomposition",
            ))
        }
        Sigma::Finite(s) => s,
    };
    let h = grid.h;
    let m = grid.m;
    let mut values = vec![0.0; m];
    for (&z, &mult) in sample.positions.iter().zip(&sample.multiplicities) {
        let w = mult as f64 * s / h;
        // Node z_i = (i+1) h  =>  left node index of the cell containing z.
        let fi = z / h - 1.0;
        if fi < 0.0 {
            values[0] += w;
        } else if fi >= (m - 1) as f64 {
            values[m - 1] += w;
        } else {
            let i = fi.floor() as usize;
            let t = fi - i as f64;
            // Snap to the node when rounding noise puts an on-node delta a few
            // ulps into a neighboring cell.
            if t < 1e-9 {
                values[i] += w;
            } else if t > 1.0 - 1e-9 {
                values[i + 1] += w;
            } else {
                values[i] += w * (1.0 - t);
                values[i + 1] += w * t;
            }
        }
    }
    let integral = h * values.iter().sum::<f64>();
    Ok(PotentialOnGrid { values, integral })
}

/// diagonal = 2/h^2 + V + extra, off-diagonal = -1/h^2.
pub fn schrodinger_operator(
    potential: &PotentialOnGrid,
    extra: Option<&[f64]>,
    grid: &Grid,
) -> Result<TridiagonalOperator> {
    let m = grid.m;
    if potential.values.len() != m {
        return Err(Error::usage(format!(
            "potential has {} values for a grid of {} nodes",
            potential.values.len(),
            m
        )));
    }
    if let Some(e) = extra {
        if e.len() != m {
            return Err(Error::usage(format!(
                "extra diagonal has length {}, expected {}",
                e.len(),
                m
            )));
        }
    }
    let inv_h2 = 1.0 / (grid.h * grid.h);
    let mut diagonal = Vec::with_capacity(m);
    for i in 0..m {
        let mut d = 2.0 * inv_h2 + potential.values[i];
        if let Some(e) = extra {
            d += e[i];
        }
        diagonal.push(d);
    }
    Ok(TridiagonalOperator { diagonal, off_diagonal: vec![-inv_h2; m - 1] })
}
