use faer::{c64, Mat};

use crate::basis1d::Basis1D;

/// What the rows and columns of an [`OperatorMatrix`] refer to.
#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    /// One-dimensional harmonic-oscillator functions `φ_n(βx)√β`.
    Oscillator1d(Basis1D),
    /// Product `|n_x⟩ ⊗ |n_y⟩` of oscillator functions, `n_x` fastest.
    OscillatorProduct { x: Basis1D, y: Basis1D },
    /// Interior points of a uniform grid on `[-L, L]`.
    SincGrid1d { points: usize, half_width: f64 },
    /// Square product grid, `x` index fastest.
    SincGrid2d {
        points_per_axis: usize,
        half_width: f64,
    },
    /// Restriction of a product-basis operator to one parity class.
    SymmetryBlock {
        x: Basis1D,
        y: Basis1D,
        signature: Vec<i8>,
    },
    /// No basis metadata (synthetic test matrices).
    Plain,
}

/// Dense square matrix together with the basis it is expressed in.
#[derive(Debug, Clone)]
pub struct OperatorMatrix<T> {
    matrix: Mat<T>,
    repr: Representation,
}

impl<T> OperatorMatrix<T> {
    pub fn new(matrix: Mat<T>, repr: Representation) -> Self {
        assert_eq!(
            matrix.nrows(),
            matrix.ncols(),
            "operator matrices are square"
        );
        Self { matrix, repr }
    }

    pub fn plain(matrix: Mat<T>) -> Self {
        Self::new(matrix, Representation::Plain)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.matrix
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn into_matrix(self) -> Mat<T> {
        self.matrix
    }
}

impl OperatorMatrix<f64> {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.matrix.norm_l2()
    }

    pub fn is_exactly_symmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..i).all(|j| self.matrix[(i, j)] == self.matrix[(j, i)]))
    }

    pub fn to_complex(&self) -> OperatorMatrix<c64> {
        let m = &self.matrix;
        OperatorMatrix::new(
            Mat::from_fn(m.nrows(), m.ncols(), |i, j| c64::new(m[(i, j)], 0.0)),
            self.repr.clone(),
        )
    }
}

impl OperatorMatrix<c64> {
    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.matrix[(i, j)]
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm_l2()
    }

    /// `A == Aᵀ` entry by entry.
    pub fn is_complex_symmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..i).all(|j| self.matrix[(i, j)] == self.matrix[(j, i)]))
    }

    pub fn conj(&self) -> OperatorMatrix<c64> {
        let m = &self.matrix;
        OperatorMatrix::new(
            Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].conj()),
            self.repr.clone(),
        )
    }

    pub fn real_part(&self) -> Mat<f64> {
        let m = &self.matrix;
        Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re)
    }

    pub fn imag_part(&self) -> Mat<f64> {
        let m = &self.matrix;
        Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].im)
    }
}

/// Matrix of `a ⊗ b` in the product ordering used throughout the crate:
/// `a` acts on the x factor, `b` on the y factor, and the combined index is
/// `n_y · dim(a) + n_x`.
pub fn product_operator(a_x: &Mat<f64>, b_y: &Mat<f64>) -> Mat<f64> {
    let nx = a_x.nrows();
    let ny = b_y.nrows();
    Mat::from_fn(nx * ny, nx * ny, |r, c| {
        let (rx, ry) = (r % nx, r / nx);
        let (cx, cy) = (c % nx, c / nx);
        a_x[(rx, cx)] * b_y[(ry, cy)]
    })
}

/// `a ⊗ 1 + 1 ⊗ b` in the same ordering as [`product_operator`].
pub fn separable_sum(a_x: &Mat<f64>, b_y: &Mat<f64>) -> Mat<f64> {
    let nx = a_x.nrows();
    let ny = b_y.nrows();
    let mut m = Mat::<f64>::zeros(nx * ny, nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let r = iy * nx + ix;
            for cx in 0..nx {
                m[(r, iy * nx + cx)] += a_x[(ix, cx)];
            }
            for cy in 0..ny {
                m[(r, cy * nx + ix)] += b_y[(iy, cy)];
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_ordering_is_x_fastest() {
        let a = Mat::from_fn(2, 2, |i, j| (1 + 2 * i + j) as f64);
        let b = Mat::from_fn(
            3,
            3,
            |i, j| if i == j { 10.0 * (i + 1) as f64 } else { 0.0 },
        );
        let k = product_operator(&a, &b);
        // row (x=1, y=2) -> 2*2+1 = 5, col (x=0, y=2) -> 4
        assert_eq!(k[(5, 4)], a[(1, 0)] * b[(2, 2)]);
        assert_eq!(k[(5, 0)], 0.0);
    }

    #[test]
    fn separable_sum_matches_kronecker_with_identity() {
        let a = Mat::from_fn(3, 3, |i, j| (i * 3 + j) as f64 * 0.5);
        let b = Mat::from_fn(2, 2, |i, j| (i + j) as f64 - 1.0);
        let ia = Mat::<f64>::identity(3, 3);
        let ib = Mat::<f64>::identity(2, 2);
        let expected = product_operator(&a, &ib) + product_operator(&ia, &b);
        let got = separable_sum(&a, &b);
        assert_eq!(expected, got);
    }
}
