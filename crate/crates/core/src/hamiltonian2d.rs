//! Tensor-product assembly of `H0`, `W` and `H = H0 + iλW` on the
//! oscillator basis `|n_x⟩ ⊗ |n_y⟩`, and parity block reduction.

use std::fmt;
use std::str::FromStr;

use faer::{c64, Mat};

use crate::basis1d::{self, Basis1D};
use crate::error::{invalid, Error, Result};
use crate::operator::{product_operator, separable_sum, OperatorMatrix, Representation};
use crate::symmetry::{SignedPermutation, SpatialOp, SymmetryAction};

/// Largest product dimension assembled unless raised explicitly.
pub const DEFAULT_MAX_DIMENSION: usize = 6400;

/// Quantum numbers `(n_x, n_y)` of a product state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    pub nx: usize,
    pub ny: usize,
}

impl BasisIndex {
    pub fn new(nx: usize, ny: usize) -> Self {
        Self { nx, ny }
    }

    pub fn swapped(self) -> Self {
        Self::new(self.ny, self.nx)
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.nx, self.ny)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Perturbation {
    Xy,
    X2y,
    Xy2,
    X2yPlusXy2,
}

impl Perturbation {
    pub const ALL: [Perturbation; 4] = [
        Perturbation::Xy,
        Perturbation::X2y,
        Perturbation::Xy2,
        Perturbation::X2yPlusXy2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Perturbation::Xy => "xy",
            Perturbation::X2y => "x2y",
            Perturbation::Xy2 => "xy2",
            Perturbation::X2yPlusXy2 => "x2y+xy2",
        }
    }

    /// `W(x, y)` as a function.
    pub fn evaluate(self, x: f64, y: f64) -> f64 {
        match self {
            Perturbation::Xy => x * y,
            Perturbation::X2y => x * x * y,
            Perturbation::Xy2 => x * y * y,
            Perturbation::X2yPlusXy2 => x * x * y + x * y * y,
        }
    }

    /// Monomials `x^a y^b` making up `W`.
    pub fn monomials(self) -> &'static [(u32, u32)] {
        match self {
            Perturbation::Xy => &[(1, 1)],
            Perturbation::X2y => &[(2, 1)],
            Perturbation::Xy2 => &[(1, 2)],
            Perturbation::X2yPlusXy2 => &[(2, 1), (1, 2)],
        }
    }
}

impl fmt::Display for Perturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Perturbation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(' ', "").as_str() {
            "xy" => Ok(Perturbation::Xy),
            "x2y" => Ok(Perturbation::X2y),
            "xy2" => Ok(Perturbation::Xy2),
            "x2y+xy2" | "xy2+x2y" => Ok(Perturbation::X2yPlusXy2),
            other => Err(invalid(format!(
                "unknown perturbation '{other}' (expected xy, x2y, xy2 or x2y+xy2)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub alpha_x: f64,
    pub alpha_y: f64,
    pub perturbation: Perturbation,
    pub lambda: f64,
}

impl ModelParams {
    pub fn new(
        alpha_x: f64,
        alpha_y: f64,
        perturbation: Perturbation,
        lambda: f64,
    ) -> Result<Self> {
        let p = Self {
            alpha_x,
            alpha_y,
            perturbation,
            lambda,
        };
        p.validate()?;
        Ok(p)
    }

    /// `αx = 1`, `αy = √2`.
    pub fn anisotropic(perturbation: Perturbation, lambda: f64) -> Result<Self> {
        Self::new(1.0, std::f64::consts::SQRT_2, perturbation, lambda)
    }

    /// `αx = αy = 1`, the square-symmetric case.
    pub fn isotropic(perturbation: Perturbation, lambda: f64) -> Result<Self> {
        Self::new(1.0, 1.0, perturbation, lambda)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("alpha_x", self.alpha_x), ("alpha_y", self.alpha_y)] {
            if !(a.is_finite() && a > 0.0) {
                return Err(invalid(format!(
                    "{name} must be positive and finite, got {a}"
                )));
            }
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(invalid(format!(
                "lambda must be finite and non-negative, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.alpha_x, self.alpha_y, self.perturbation, lambda)
    }
}

/// Rectangular product of two oscillator bases; index `n_y · x_size + n_x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductBasis {
    x: Basis1D,
    y: Basis1D,
    max_dimension: usize,
}

impl ProductBasis {
    pub fn new(x: Basis1D, y: Basis1D) -> Self {
        Self {
            x,
            y,
            max_dimension: DEFAULT_MAX_DIMENSION,
        }
    }

    /// Same size on both axes, scales from [`Basis1D::quartic_default_scale`].
    pub fn for_model(size: usize, params: &ModelParams) -> Result<Self> {
        Ok(Self::new(
            Basis1D::for_quartic(size, params.alpha_x)?,
            Basis1D::for_quartic(size, params.alpha_y)?,
        ))
    }

    pub fn with_max_dimension(mut self, max_dimension: usize) -> Self {
        self.max_dimension = max_dimension;
        self
    }

    pub fn x(&self) -> &Basis1D {
        &self.x
    }

    pub fn y(&self) -> &Basis1D {
        &self.y
    }

    pub fn dim(&self) -> usize {
        self.x.size() * self.y.size()
    }

    pub fn max_dimension(&self) -> usize {
        self.max_dimension
    }

    pub fn index(&self, n: BasisIndex) -> usize {
        debug_assert!(n.nx < self.x.size() && n.ny < self.y.size());
        n.ny * self.x.size() + n.nx
    }

    pub fn index_of(&self, k: usize) -> BasisIndex {
        BasisIndex::new(k % self.x.size(), k / self.x.size())
    }

    pub fn indices(&self) -> impl Iterator<Item = BasisIndex> + '_ {
        (0..self.dim()).map(|k| self.index_of(k))
    }

    pub fn check_limit(&self) -> Result<()> {
        let dim = self
            .x
            .size()
            .checked_mul(self.y.size())
            .ok_or(Error::ResourceLimit {
                requested: usize::MAX,
                limit: self.max_dimension,
            })?;
        if dim > self.max_dimension {
            return Err(Error::ResourceLimit {
                requested: dim,
                limit: self.max_dimension,
            });
        }
        Ok(())
    }

    fn representation(&self) -> Representation {
        Representation::OscillatorProduct {
            x: self.x,
            y: self.y,
        }
    }

    /// Axis exchange is only a symmetry of the basis itself when both axes
    /// use identical functions.
    fn is_square(&self) -> bool {
        self.x == self.y
    }
}

impl SymmetryAction for ProductBasis {
    fn state_dimension(&self) -> usize {
        self.dim()
    }

    fn action(&self, op: SpatialOp) -> Option<SignedPermutation> {
        let dim = self.dim();
        if op.parity_sign(BasisIndex::new(0, 0)).is_some() {
            let sign = self.indices().map(|n| op.parity_sign(n).unwrap()).collect();
            return Some(SignedPermutation::new((0..dim).collect(), sign));
        }
        if !self.is_square() {
            return None;
        }
        let odd = |k: usize| if k.is_multiple_of(2) { 1i8 } else { -1 };
        let mut target = Vec::with_capacity(dim);
        let mut sign = Vec::with_capacity(dim);
        for n in self.indices() {
            target.push(self.index(n.swapped()));
            sign.push(match op {
                SpatialOp::Swap => 1,
                SpatialOp::AntiSwap => odd(n.nx + n.ny),
                SpatialOp::Rotate90 => odd(n.ny),
                SpatialOp::Rotate270 => odd(n.nx),
                _ => unreachable!("axis parities handled above"),
            });
        }
        Some(SignedPermutation::new(target, sign))
    }
}

/// The one-dimensional factors `½p² + αx⁴` on each axis.
pub fn axis_hamiltonians(
    params: &ModelParams,
    basis: &ProductBasis,
) -> Result<(Mat<f64>, Mat<f64>)> {
    params.validate()?;
    let hx = basis1d::quartic_hamiltonian(basis.x(), params.alpha_x)?.into_matrix();
    let hy = basis1d::quartic_hamiltonian(basis.y(), params.alpha_y)?.into_matrix();
    Ok((hx, hy))
}

pub fn build_h0(params: &ModelParams, basis: &ProductBasis) -> Result<OperatorMatrix<f64>> {
    basis.check_limit()?;
    let (hx, hy) = axis_hamiltonians(params, basis)?;
    Ok(OperatorMatrix::new(
        separable_sum(&hx, &hy),
        basis.representation(),
    ))
}

pub fn build_w(kind: Perturbation, basis: &ProductBasis) -> Result<OperatorMatrix<f64>> {
    basis.check_limit()?;
    let dim = basis.dim();
    let mut w = Mat::<f64>::zeros(dim, dim);
    for &(px, py) in kind.monomials() {
        let xm = basis1d::position_power_matrix(basis.x(), px)?;
        let ym = basis1d::position_power_matrix(basis.y(), py)?;
        w += product_operator(xm.matrix(), ym.matrix());
    }
    Ok(OperatorMatrix::new(w, basis.representation()))
}

pub fn build_h(params: &ModelParams, basis: &ProductBasis) -> Result<OperatorMatrix<c64>> {
    let h0 = build_h0(params, basis)?;
    let w = build_w(params.perturbation, basis)?;
    let lambda = params.lambda;
    let (a, b) = (h0.matrix(), w.matrix());
    Ok(OperatorMatrix::new(
        Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
            c64::new(a[(i, j)], lambda * b[(i, j)])
        }),
        basis.representation(),
    ))
}

/// Axis parities commuting with both `H0` and `W`.
pub fn residual_unitary_symmetries(kind: Perturbation) -> Vec<SpatialOp> {
    use SpatialOp::*;
    match kind {
        Perturbation::Xy => vec![Identity, Inversion],
        Perturbation::X2y => vec![Identity, ReflectX],
        Perturbation::Xy2 => vec![Identity, ReflectY],
        Perturbation::X2yPlusXy2 => vec![Identity],
    }
}

/// All four axis parities: the symmetry of `H0` alone.
pub fn unperturbed_symmetries() -> Vec<SpatialOp> {
    use SpatialOp::*;
    vec![Identity, Inversion, ReflectX, ReflectY]
}

/// Restriction of an operator to one parity class.
#[derive(Debug, Clone)]
pub struct SymmetryBlock<T> {
    pub matrix: OperatorMatrix<T>,
    /// Eigenvalue of each retained operation, in the order they were given.
    pub signature: Vec<i8>,
    /// Position of each block row in the full basis.
    pub indices: Vec<usize>,
}

pub trait MatrixEntry: Copy {
    fn is_zero(&self) -> bool;
}

impl MatrixEntry for f64 {
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl MatrixEntry for c64 {
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

/// Partition the basis by parity signature under `ops` and split `h`
/// accordingly. Every entry coupling two different classes must be exactly
/// zero, otherwise the claimed symmetry does not hold.
pub fn symmetry_blocks<T: MatrixEntry>(
    h: &OperatorMatrix<T>,
    basis: &ProductBasis,
    ops: &[SpatialOp],
) -> Result<Vec<SymmetryBlock<T>>> {
    if h.dim() != basis.dim() {
        return Err(invalid(format!(
            "operator dimension {} does not match basis {}",
            h.dim(),
            basis.dim()
        )));
    }
    let signature_of = |n: BasisIndex| -> Result<Vec<i8>> {
        ops.iter()
            .map(|op| {
                op.parity_sign(n).ok_or_else(|| {
                    invalid(format!(
                        "{} is not diagonal on the product basis",
                        op.name()
                    ))
                })
            })
            .collect()
    };
    let signatures: Vec<Vec<i8>> = basis.indices().map(signature_of).collect::<Result<_>>()?;
    let mut classes: Vec<Vec<i8>> = signatures.clone();
    classes.sort_by(|a, b| b.cmp(a));
    classes.dedup();

    let class_of: Vec<usize> = signatures
        .iter()
        .map(|s| classes.iter().position(|c| c == s).unwrap())
        .collect();
    let m = h.matrix();
    for i in 0..h.dim() {
        for j in 0..h.dim() {
            if class_of[i] != class_of[j] && !m[(i, j)].is_zero() {
                return Err(Error::InternalConsistency(format!(
                    "entry ({}, {}) couples parity classes {:?} and {:?}",
                    basis.index_of(i),
                    basis.index_of(j),
                    signatures[i],
                    signatures[j]
                )));
            }
        }
    }

    Ok(classes
        .into_iter()
        .enumerate()
        .map(|(c, signature)| {
            let indices: Vec<usize> = (0..h.dim()).filter(|&i| class_of[i] == c).collect();
            let block = Mat::from_fn(indices.len(), indices.len(), |a, b| {
                m[(indices[a], indices[b])]
            });
            SymmetryBlock {
                matrix: OperatorMatrix::new(
                    block,
                    Representation::SymmetryBlock {
                        x: basis.x,
                        y: basis.y,
                        signature: signature.clone(),
                    },
                ),
                signature,
                indices,
            }
        })
        .collect())
}
