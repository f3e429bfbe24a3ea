//! A common face for the two discretizations, so that continuation and
//! comparison code does not care which one produced a spectrum.

use std::fmt;
use std::str::FromStr;

use faer::{c64, Mat};

use crate::eigensolver::{self, Spectrum};
use crate::error::{invalid, Error, Result};
use crate::hamiltonian2d::{self, BasisIndex, ModelParams, ProductBasis};
use crate::operator::OperatorMatrix;
use crate::pseudospectral::{self, Grid2D};
use crate::symmetry::{SignedPermutation, SpatialOp, SymmetryAction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    BasisDm,
    Pseudospectral,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::BasisDm => "basis-dm",
            Method::Pseudospectral => "pseudospectral",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basis-dm" | "dm" => Ok(Method::BasisDm),
            "pseudospectral" | "dvr" => Ok(Method::Pseudospectral),
            _ => Err(invalid(format!(
                "unknown method {s:?} (expected basis-dm or pseudospectral)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Discretization {
    Basis(ProductBasis),
    Grid(Grid2D),
}

impl Discretization {
    pub fn method(&self) -> Method {
        match self {
            Discretization::Basis(_) => Method::BasisDm,
            Discretization::Grid(_) => Method::Pseudospectral,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Discretization::Basis(b) => b.dim(),
            Discretization::Grid(g) => g.dim(),
        }
    }

    /// Provenance string naming the method and every parameter.
    pub fn describe(&self) -> String {
        match self {
            Discretization::Basis(b) => format!(
                "basis-dm nx={} ny={} beta_x={} beta_y={}",
                b.x().size(),
                b.y().size(),
                b.x().scale(),
                b.y().scale()
            ),
            Discretization::Grid(g) => format!(
                "pseudospectral n={} half_width={} spacing={}",
                g.points_per_axis(),
                g.half_width(),
                g.spacing()
            ),
        }
    }

    pub fn h0(&self, params: &ModelParams) -> Result<OperatorMatrix<f64>> {
        match self {
            Discretization::Basis(b) => hamiltonian2d::build_h0(params, b),
            Discretization::Grid(g) => pseudospectral::build_h0_grid(params, g),
        }
    }

    pub fn hamiltonian(&self, params: &ModelParams) -> Result<OperatorMatrix<c64>> {
        match self {
            Discretization::Basis(b) => hamiltonian2d::build_h(params, b),
            Discretization::Grid(g) => pseudospectral::build_h_grid(params, g),
        }
    }

    /// The two one-dimensional factors of `H0`.
    pub fn axis_factors(&self, params: &ModelParams) -> Result<(Mat<f64>, Mat<f64>)> {
        match self {
            Discretization::Basis(b) => hamiltonian2d::axis_hamiltonians(params, b),
            Discretization::Grid(g) => {
                params.validate()?;
                Ok((
                    pseudospectral::axis_hamiltonian(g, params.alpha_x),
                    pseudospectral::axis_hamiltonian(g, params.alpha_y),
                ))
            }
        }
    }

    fn axis_sizes(&self) -> (usize, usize) {
        match self {
            Discretization::Basis(b) => (b.x().size(), b.y().size()),
            Discretization::Grid(g) => (g.points_per_axis(), g.points_per_axis()),
        }
    }

    /// Full spectrum of `H(λ)`.
    ///
    /// On the oscillator basis the matrix is split into the parity classes
    /// that survive the perturbation (all four at `λ = 0`), which keeps
    /// eigenvectors parity-pure inside degenerate subspaces. The grid is
    /// solved whole.
    pub fn solve(&self, params: &ModelParams, with_vectors: bool) -> Result<Spectrum> {
        params.validate()?;
        match self {
            Discretization::Basis(b) => {
                if params.lambda == 0.0 {
                    let h0 = hamiltonian2d::build_h0(params, b)?;
                    let ops = hamiltonian2d::unperturbed_symmetries();
                    let blocks = hamiltonian2d::symmetry_blocks(&h0, b, &ops)?;
                    let parts = blocks
                        .into_iter()
                        .map(|blk| {
                            let s = if with_vectors {
                                eigensolver::eig_symmetric(&blk.matrix)?
                            } else {
                                eigensolver::eigenvalues_symmetric(&blk.matrix)?
                            };
                            Ok((s, blk.indices))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Spectrum::from_blocks(b.dim(), parts))
                } else {
                    let h = hamiltonian2d::build_h(params, b)?;
                    let ops = hamiltonian2d::residual_unitary_symmetries(params.perturbation);
                    let blocks = hamiltonian2d::symmetry_blocks(&h, b, &ops)?;
                    let parts = blocks
                        .into_iter()
                        .map(|blk| {
                            let s = if with_vectors {
                                eigensolver::eig_general(&blk.matrix)?
                            } else {
                                eigensolver::eigenvalues_general(&blk.matrix)?
                            };
                            Ok((s, blk.indices))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Spectrum::from_blocks(b.dim(), parts))
                }
            }
            Discretization::Grid(g) => {
                if params.lambda == 0.0 {
                    let h0 = pseudospectral::build_h0_grid(params, g)?;
                    if with_vectors {
                        eigensolver::eig_symmetric(&h0)
                    } else {
                        eigensolver::eigenvalues_symmetric(&h0)
                    }
                } else {
                    let h = pseudospectral::build_h_grid(params, g)?;
                    if with_vectors {
                        eigensolver::eig_general(&h)
                    } else {
                        eigensolver::eigenvalues_general(&h)
                    }
                }
            }
        }
    }

    /// `λ = 0` ancestry of each eigenvector: the product of 1D eigenstates
    /// with the largest overlap. Returns the parent index and its weight.
    pub fn parents(
        &self,
        params: &ModelParams,
        spec: &Spectrum,
        count: usize,
    ) -> Result<Vec<(BasisIndex, f64)>> {
        let vectors = spec
            .eigenvectors()
            .ok_or_else(|| invalid("ancestry needs eigenvectors"))?;
        let (hx, hy) = self.axis_factors(params)?;
        let ux = eigensolver::eig_symmetric(&OperatorMatrix::plain(hx))?;
        let uy = eigensolver::eig_symmetric(&OperatorMatrix::plain(hy))?;
        let (ux, uy) = (ux.eigenvectors().unwrap(), uy.eigenvectors().unwrap());
        let (nx, ny) = self.axis_sizes();
        let count = count.min(spec.len());
        // only low 1D states can be parents of low 2D states
        let kx = nx.min(count + 4);
        let ky = ny.min(count + 4);
        let mut out = Vec::with_capacity(count);
        for col in 0..count {
            // C[i, j] = v[j nx + i];  overlap(a, b) = Σ ux[i,a] C[i,j] uy[j,b]
            let c = Mat::from_fn(nx, ny, |i, j| vectors[(j * nx + i, col)]);
            let ux_t = Mat::from_fn(kx, nx, |a, i| ux[(i, a)]);
            let uy_k = Mat::from_fn(ny, ky, |j, b| uy[(j, b)]);
            let proj = &ux_t * &c * &uy_k;
            let mut best = (BasisIndex::new(0, 0), -1.0f64);
            for b in 0..ky {
                for a in 0..kx {
                    let w = proj[(a, b)].norm_sqr();
                    if w > best.1 {
                        best = (BasisIndex::new(a, b), w);
                    }
                }
            }
            out.push(best);
        }
        Ok(out)
    }
}

impl SymmetryAction for Discretization {
    fn state_dimension(&self) -> usize {
        self.dim()
    }

    fn action(&self, op: SpatialOp) -> Option<SignedPermutation> {
        match self {
            Discretization::Basis(b) => b.action(op),
            Discretization::Grid(g) => g.action(op),
        }
    }
}
