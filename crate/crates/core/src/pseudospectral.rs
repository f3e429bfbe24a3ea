//! Sinc-DVR discretization on a uniform square grid of interior points.
//!
//! Potential and perturbation are diagonal (pointwise values at the
//! nodes); the kinetic term uses the dense closed-form sinc second
//! derivative. The error structure is unrelated to that of the oscillator
//! basis, which makes the two a meaningful cross-check.

use std::f64::consts::PI;

use faer::{c64, Mat};

use crate::discretization::Discretization;
use crate::eigensolver::Spectrum;
use crate::error::{invalid, Error, Result};
use crate::hamiltonian2d::{ModelParams, ProductBasis, DEFAULT_MAX_DIMENSION};
use crate::operator::{separable_sum, OperatorMatrix, Representation};
use crate::symmetry::{SignedPermutation, SpatialOp, SymmetryAction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    half_width: f64,
    points_per_axis: usize,
    max_dimension: usize,
}

impl Grid2D {
    pub fn new(half_width: f64, points_per_axis: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(invalid(format!(
                "grid half-width must be positive, got {half_width}"
            )));
        }
        if points_per_axis < 3 {
            return Err(invalid(format!(
                "grid needs at least 3 points per axis, got {points_per_axis}"
            )));
        }
        Ok(Self {
            half_width,
            points_per_axis,
            max_dimension: DEFAULT_MAX_DIMENSION,
        })
    }

    pub fn with_max_dimension(mut self, max_dimension: usize) -> Self {
        self.max_dimension = max_dimension;
        self
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points_per_axis as f64 + 1.0)
    }

    pub fn dim(&self) -> usize {
        self.points_per_axis * self.points_per_axis
    }

    /// `x_i = −L + (i+1) h`, `i = 0..N`.
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points_per_axis)
            .map(|i| -self.half_width + (i as f64 + 1.0) * h)
            .collect()
    }

    /// Flat index of node `(i, j)`, `x` index fastest.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.points_per_axis + i
    }

    pub fn check_limit(&self) -> Result<()> {
        let n = self.points_per_axis;
        let dim = n.saturating_mul(n);
        if dim > self.max_dimension {
            return Err(Error::ResourceLimit {
                requested: dim,
                limit: self.max_dimension,
            });
        }
        Ok(())
    }

    fn representation(&self) -> Representation {
        Representation::SincGrid2d {
            points_per_axis: self.points_per_axis,
            half_width: self.half_width,
        }
    }
}

/// Sinc-DVR `d²/dx²` on one axis.
pub fn second_derivative_matrix(grid: &Grid2D) -> OperatorMatrix<f64> {
    let n = grid.points_per_axis;
    let h2 = grid.spacing() * grid.spacing();
    let m = Mat::from_fn(n, n, |i, j| {
        if i == j {
            -PI * PI / (3.0 * h2)
        } else {
            let d = i.abs_diff(j) as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            -2.0 * sign / (h2 * d * d)
        }
    });
    OperatorMatrix::new(
        m,
        Representation::SincGrid1d {
            points: n,
            half_width: grid.half_width,
        },
    )
}

/// `−½ d²/dx² + α x⁴` on one axis.
pub fn axis_hamiltonian(grid: &Grid2D, alpha: f64) -> Mat<f64> {
    let d2 = second_derivative_matrix(grid);
    let x = grid.nodes();
    let n = grid.points_per_axis;
    Mat::from_fn(n, n, |i, j| {
        let v = if i == j { alpha * x[i].powi(4) } else { 0.0 };
        -0.5 * d2.get(i, j) + v
    })
}

pub fn build_h0_grid(params: &ModelParams, grid: &Grid2D) -> Result<OperatorMatrix<f64>> {
    params.validate()?;
    grid.check_limit()?;
    let hx = axis_hamiltonian(grid, params.alpha_x);
    let hy = axis_hamiltonian(grid, params.alpha_y);
    Ok(OperatorMatrix::new(
        separable_sum(&hx, &hy),
        grid.representation(),
    ))
}

/// `W(x_i, y_j)` at every node, in flat order.
pub fn perturbation_diagonal(params: &ModelParams, grid: &Grid2D) -> Vec<f64> {
    let x = grid.nodes();
    let n = grid.points_per_axis;
    (0..grid.dim())
        .map(|k| params.perturbation.evaluate(x[k % n], x[k / n]))
        .collect()
}

pub fn build_h_grid(params: &ModelParams, grid: &Grid2D) -> Result<OperatorMatrix<c64>> {
    let h0 = build_h0_grid(params, grid)?;
    let w = perturbation_diagonal(params, grid);
    let a = h0.matrix();
    let lambda = params.lambda;
    Ok(OperatorMatrix::new(
        Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
            let im = if i == j { lambda * w[i] } else { 0.0 };
            c64::new(a[(i, j)], im)
        }),
        grid.representation(),
    ))
}

impl SymmetryAction for Grid2D {
    fn state_dimension(&self) -> usize {
        self.dim()
    }

    /// Node permutations: `(g ψ)(r) = ψ(g⁻¹ r)` maps the delta at
    /// `(i, j)` onto the delta at the image node. All signs are `+1`.
    fn action(&self, op: SpatialOp) -> Option<SignedPermutation> {
        let n = self.points_per_axis;
        let r = |i: usize| n - 1 - i;
        let image = |i: usize, j: usize| -> (usize, usize) {
            match op {
                SpatialOp::Identity => (i, j),
                SpatialOp::Inversion => (r(i), r(j)),
                SpatialOp::ReflectX => (r(i), j),
                SpatialOp::ReflectY => (i, r(j)),
                SpatialOp::Swap => (j, i),
                SpatialOp::AntiSwap => (r(j), r(i)),
                SpatialOp::Rotate90 => (r(j), i),
                SpatialOp::Rotate270 => (j, r(i)),
            }
        };
        let target = (0..self.dim())
            .map(|k| {
                let (i, j) = image(k % n, k / n);
                self.index(i, j)
            })
            .collect();
        Some(SignedPermutation::new(target, vec![1; self.dim()]))
    }
}

/// Outcome of comparing the low spectra of two discretizations.
#[derive(Debug, Clone)]
pub struct CrossValidation {
    pub lambda: f64,
    pub basis_values: Vec<c64>,
    pub grid_values: Vec<c64>,
    /// `grid_values[matching[i]]` is paired with `basis_values[i]`.
    pub matching: Vec<usize>,
    pub max_distance: f64,
    pub tol: f64,
    pub passed: bool,
}

/// The `k` lowest levels ordered by `|Re E|`. Ties between conjugate
/// partners are kept together because the ordering key is identical.
pub fn lowest_by_real_part(spec: &Spectrum, k: usize) -> Vec<c64> {
    let mut v = spec.eigenvalues().to_vec();
    v.sort_by(|a, b| {
        a.re.abs()
            .total_cmp(&b.re.abs())
            .then(a.im.total_cmp(&b.im))
    });
    v.truncate(k);
    v
}

/// Pair two low spectra. Each side keeps `k` values; the other side
/// offers `k + margin` candidates so that a level sitting exactly at the
/// cut on one side still finds its partner.
pub fn compare_spectra(
    lambda: f64,
    basis: &Spectrum,
    grid: &Spectrum,
    k: usize,
    tol: f64,
) -> Result<CrossValidation> {
    if k == 0 {
        return Err(invalid("cross-validation needs at least one level"));
    }
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(invalid(format!(
            "tolerance must be non-negative, got {tol}"
        )));
    }
    let extra = 2;
    let a = lowest_by_real_part(basis, k);
    let b = lowest_by_real_part(grid, k);
    if a.len() < k || b.len() < k {
        return Err(invalid(format!("spectra hold fewer than {k} levels")));
    }
    let b_wide = lowest_by_real_part(grid, k + extra);
    let a_wide = lowest_by_real_part(basis, k + extra);

    let forward = matched(&a, &b_wide);
    let backward = matched(&b, &a_wide);
    let max_forward = forward.iter().map(|&(_, d)| d).fold(0.0, f64::max);
    let max_backward = backward.iter().map(|&(_, d)| d).fold(0.0, f64::max);
    let max_distance = max_forward.max(max_backward);
    let limit = 10.0 * tol;
    if max_distance > limit {
        return Err(Error::MethodDisagreement {
            distance: max_distance,
            limit,
        });
    }
    Ok(CrossValidation {
        lambda,
        basis_values: a,
        grid_values: b_wide,
        matching: forward.iter().map(|&(j, _)| j).collect(),
        max_distance,
        tol,
        passed: max_distance <= tol,
    })
}

fn matched(rows: &[c64], cols: &[c64]) -> Vec<(usize, f64)> {
    let costs: Vec<Vec<f64>> = rows
        .iter()
        .map(|x| cols.iter().map(|y| (x - y).norm()).collect())
        .collect();
    crate::assignment::minimise(&costs)
        .into_iter()
        .enumerate()
        .map(|(i, j)| (j, costs[i][j]))
        .collect()
}

/// Solve `H(λ)` on both discretizations and compare the `k` lowest levels.
pub fn cross_validate(
    params: &ModelParams,
    basis: &ProductBasis,
    grid: &Grid2D,
    k: usize,
    tol: f64,
) -> Result<CrossValidation> {
    if k == 0 {
        return Err(invalid("cross-validation needs at least one level"));
    }
    let a = Discretization::Basis(*basis).solve(params, false)?;
    let b = Discretization::Grid(*grid).solve(params, false)?;
    compare_spectra(params.lambda, &a, &b, k, tol)
}
