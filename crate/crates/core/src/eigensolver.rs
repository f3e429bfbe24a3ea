//! Dense eigendecompositions with residual certification, plus the
//! real / complex-conjugate partition of a spectrum.
//!
//! Both solvers are backed by `faer`: the symmetric one by tridiagonal
//! reduction and divide-and-conquer, the general one by Hessenberg
//! reduction followed by the implicitly shifted QR iteration. This module
//! owns the contract on top: ordering, normalisation, residual bounds.

use faer::linalg::solvers::Eigen;
use faer::{c64, Mat, Side};

use crate::assignment;
use crate::error::{invalid, Error, Result};
use crate::operator::OperatorMatrix;

/// Relative residual accepted from the symmetric solver.
pub const SYMMETRIC_RESIDUAL_TOL: f64 = 1e-12;
/// Relative residual accepted from the general solver.
pub const GENERAL_RESIDUAL_TOL: f64 = 1e-10;
/// Default relative threshold below which `|Im E|` counts as zero.
pub const DEFAULT_REALITY_EPS: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<c64>,
    eigenvectors: Option<Mat<c64>>,
    /// `‖A v − λ v‖ / ‖A‖_F` per eigenpair.
    residuals: Option<Vec<f64>>,
    norm: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[c64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> Option<&Mat<c64>> {
        self.eigenvectors.as_ref()
    }

    pub fn residuals(&self) -> Option<&[f64]> {
        self.residuals.as_deref()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals()
            .map_or(0.0, |r| r.iter().copied().fold(0.0, f64::max))
    }

    /// Frobenius norm of the decomposed matrix.
    pub fn matrix_norm(&self) -> f64 {
        self.norm
    }

    pub fn eigenvector(&self, j: usize) -> Option<Vec<c64>> {
        let v = self.eigenvectors.as_ref()?;
        Some((0..v.nrows()).map(|i| v[(i, j)]).collect())
    }

    /// Keep only the first `k` eigenpairs in the current order.
    pub fn truncated(&self, k: usize) -> Spectrum {
        let k = k.min(self.len());
        Spectrum {
            eigenvalues: self.eigenvalues[..k].to_vec(),
            eigenvectors: self
                .eigenvectors
                .as_ref()
                .map(|v| Mat::from_fn(v.nrows(), k, |i, j| v[(i, j)])),
            residuals: self.residuals.as_ref().map(|r| r[..k].to_vec()),
            norm: self.norm,
        }
    }

    /// Reassemble the spectrum of a block-diagonal matrix. Each part comes
    /// with the full-basis positions of its block rows.
    pub fn from_blocks(dim: usize, parts: Vec<(Spectrum, Vec<usize>)>) -> Spectrum {
        let with_vectors = parts.iter().all(|(s, _)| s.eigenvectors.is_some());
        let with_residuals = parts.iter().all(|(s, _)| s.residuals.is_some());
        let norm = parts
            .iter()
            .map(|(s, _)| s.norm * s.norm)
            .sum::<f64>()
            .sqrt();
        let mut values = Vec::with_capacity(dim);
        let mut residuals = Vec::with_capacity(dim);
        let mut columns: Vec<(usize, usize)> = Vec::with_capacity(dim);
        for (p, (s, _)) in parts.iter().enumerate() {
            for j in 0..s.len() {
                values.push(s.eigenvalues[j]);
                if let Some(r) = &s.residuals {
                    // rescale to the norm of the full matrix
                    residuals.push(r[j] * s.norm / norm.max(f64::MIN_POSITIVE));
                }
                columns.push((p, j));
            }
        }
        let vectors = with_vectors.then(|| {
            let mut v = Mat::<c64>::zeros(dim, values.len());
            for (col, &(p, j)) in columns.iter().enumerate() {
                let (s, idx) = &parts[p];
                let sv = s.eigenvectors.as_ref().unwrap();
                for (r, &full) in idx.iter().enumerate() {
                    v[(full, col)] = sv[(r, j)];
                }
            }
            v
        });
        let mut spec = Spectrum {
            eigenvalues: values,
            eigenvectors: vectors,
            residuals: with_residuals.then_some(residuals),
            norm,
        };
        spec.sort();
        spec
    }

    /// Order by `(Re, Im)` lexicographically.
    fn sort(&mut self) {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (self.eigenvalues[a], self.eigenvalues[b]);
            x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
        });
        self.eigenvalues = order.iter().map(|&k| self.eigenvalues[k]).collect();
        if let Some(r) = &self.residuals {
            self.residuals = Some(order.iter().map(|&k| r[k]).collect());
        }
        if let Some(v) = &self.eigenvectors {
            self.eigenvectors = Some(Mat::from_fn(v.nrows(), order.len(), |i, j| {
                v[(i, order[j])]
            }));
        }
    }
}

fn frobenius_real(a: &Mat<f64>) -> f64 {
    a.norm_l2()
}

/// Unit 2-norm with the largest component real and positive.
fn normalise_columns(v: &mut Mat<c64>) {
    for j in 0..v.ncols() {
        let mut norm2 = 0.0;
        let mut peak = (0usize, 0.0f64);
        for i in 0..v.nrows() {
            let m = v[(i, j)].norm_sqr();
            norm2 += m;
            if m > peak.1 {
                peak = (i, m);
            }
        }
        if norm2 == 0.0 {
            continue;
        }
        let anchor = v[(peak.0, j)];
        let phase = anchor.conj() / anchor.norm();
        let scale = phase / norm2.sqrt();
        for i in 0..v.nrows() {
            v[(i, j)] *= scale;
        }
    }
}

fn residuals_of(a: &Mat<c64>, values: &[c64], vectors: &Mat<c64>, norm: f64) -> Vec<f64> {
    let av = a * vectors;
    (0..values.len())
        .map(|j| {
            let mut s = 0.0;
            for i in 0..a.nrows() {
                s += (av[(i, j)] - values[j] * vectors[(i, j)]).norm_sqr();
            }
            s.sqrt() / norm.max(f64::MIN_POSITIVE)
        })
        .collect()
}

fn check_finite<T: Copy>(m: &Mat<T>, finite: impl Fn(T) -> bool) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !finite(m[(i, j)]) {
                return Err(invalid(format!("non-finite matrix entry at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

/// Full eigendecomposition of a real symmetric matrix, eigenvalues ascending.
pub fn eig_symmetric(a: &OperatorMatrix<f64>) -> Result<Spectrum> {
    let m = a.matrix();
    check_finite(m, f64::is_finite)?;
    let norm = frobenius_real(m);
    let n = a.dim();
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asym > 1e-13 * norm {
        return Err(invalid(format!(
            "matrix is not symmetric: max |A - Aᵀ| = {asym:.3e}"
        )));
    }
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: Some(Mat::zeros(0, 0)),
            residuals: Some(Vec::new()),
            norm,
        });
    }
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|e| {
        Error::SolverFailure(format!(
            "symmetric eigensolver on {n}×{n} (‖A‖_F = {norm:.3e}): {e:?}"
        ))
    })?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let values: Vec<c64> = (0..n).map(|i| c64::new(s[i], 0.0)).collect();
    let mut vectors = Mat::from_fn(n, n, |i, j| c64::new(u[(i, j)], 0.0));
    normalise_columns(&mut vectors);

    let uv = m * u;
    let residuals: Vec<f64> = (0..n)
        .map(|j| {
            let mut acc = 0.0;
            for i in 0..n {
                let r = uv[(i, j)] - s[j] * u[(i, j)];
                acc += r * r;
            }
            acc.sqrt() / norm.max(f64::MIN_POSITIVE)
        })
        .collect();
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if worst > SYMMETRIC_RESIDUAL_TOL {
        return Err(Error::SolverFailure(format!(
            "symmetric eigensolver residual {worst:.3e} exceeds {SYMMETRIC_RESIDUAL_TOL:.0e}"
        )));
    }
    // already ascending
    Ok(Spectrum {
        eigenvalues: values,
        eigenvectors: Some(vectors),
        residuals: Some(residuals),
        norm,
    })
}

/// Full eigendecomposition of a complex matrix, sorted by `(Re, Im)`.
pub fn eig_general(a: &OperatorMatrix<c64>) -> Result<Spectrum> {
    let m = a.matrix();
    check_finite(m, |z: c64| z.re.is_finite() && z.im.is_finite())?;
    let n = a.dim();
    let norm = m.norm_l2();
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: Some(Mat::zeros(0, 0)),
            residuals: Some(Vec::new()),
            norm,
        });
    }
    let evd = Eigen::new(m.as_ref()).map_err(|e| {
        Error::SolverFailure(format!(
            "general eigensolver on {n}×{n} (‖A‖_F = {norm:.3e}): {e:?}"
        ))
    })?;
    let s = evd.S().column_vector();
    let values: Vec<c64> = (0..n).map(|i| s[i]).collect();
    let mut vectors = evd.U().to_owned();
    normalise_columns(&mut vectors);
    let residuals = residuals_of(m, &values, &vectors, norm);
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if worst > GENERAL_RESIDUAL_TOL {
        return Err(Error::SolverFailure(format!(
            "general eigensolver residual {worst:.3e} exceeds {GENERAL_RESIDUAL_TOL:.0e}"
        )));
    }
    let mut spec = Spectrum {
        eigenvalues: values,
        eigenvectors: Some(vectors),
        residuals: Some(residuals),
        norm,
    };
    spec.sort();
    Ok(spec)
}

/// Eigenvalues only, sorted by `(Re, Im)`. No residual certification.
pub fn eigenvalues_general(a: &OperatorMatrix<c64>) -> Result<Spectrum> {
    let m = a.matrix();
    check_finite(m, |z: c64| z.re.is_finite() && z.im.is_finite())?;
    let n = a.dim();
    let values = if n == 0 {
        Vec::new()
    } else {
        m.eigenvalues()
            .map_err(|e| Error::SolverFailure(format!("general eigensolver on {n}×{n}: {e:?}")))?
    };
    let mut spec = Spectrum {
        eigenvalues: values,
        eigenvectors: None,
        residuals: None,
        norm: m.norm_l2(),
    };
    spec.sort();
    Ok(spec)
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn eigenvalues_symmetric(a: &OperatorMatrix<f64>) -> Result<Spectrum> {
    let m = a.matrix();
    check_finite(m, f64::is_finite)?;
    let n = a.dim();
    let values = if n == 0 {
        Vec::new()
    } else {
        m.self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::SolverFailure(format!("symmetric eigensolver on {n}×{n}: {e:?}")))?
    };
    Ok(Spectrum {
        eigenvalues: values.into_iter().map(|v| c64::new(v, 0.0)).collect(),
        eigenvectors: None,
        residuals: None,
        norm: frobenius_real(m),
    })
}

/// Indices into a spectrum split into real levels and conjugate pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct RealityPartition {
    pub real: Vec<usize>,
    /// `(upper, lower)`: `Im > 0` member first.
    pub pairs: Vec<(usize, usize)>,
}

/// `scale = max(1, |Re z|)` used by every reality decision.
pub fn reality_scale(z: c64) -> f64 {
    z.re.abs().max(1.0)
}

pub fn is_real(z: c64, eps: f64) -> bool {
    z.im.abs() <= eps * reality_scale(z)
}

pub fn classify_reality(values: &[c64], eps: f64) -> Result<RealityPartition> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid(format!(
            "reality threshold must be positive, got {eps}"
        )));
    }
    let mut real = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for (i, &z) in values.iter().enumerate() {
        if is_real(z, eps) {
            real.push(i);
        } else if z.im > 0.0 {
            upper.push(i);
        } else {
            lower.push(i);
        }
    }
    // match each member of the smaller side into the larger one
    let (small, large, flipped) = if upper.len() <= lower.len() {
        (&upper, &lower, false)
    } else {
        (&lower, &upper, true)
    };
    let mut pairs = Vec::new();
    let mut matched = vec![false; large.len()];
    if !small.is_empty() {
        let costs: Vec<Vec<f64>> = small
            .iter()
            .map(|&i| {
                large
                    .iter()
                    .map(|&j| (values[i] - values[j].conj()).norm())
                    .collect()
            })
            .collect();
        let assign = assignment::minimise(&costs);
        for (a, &b) in assign.iter().enumerate() {
            let (i, j) = (small[a], large[b]);
            let d = costs[a][b];
            let limit = 10.0 * eps * reality_scale(values[i]);
            if d > limit {
                return Err(Error::BrokenConjugacy {
                    re: values[i].re,
                    im: values[i].im,
                    distance: d,
                    limit,
                });
            }
            matched[b] = true;
            pairs.push(if flipped { (j, i) } else { (i, j) });
        }
    }
    if let Some(b) = matched.iter().position(|m| !m) {
        let z = values[large[b]];
        return Err(Error::BrokenConjugacy {
            re: z.re,
            im: z.im,
            distance: f64::INFINITY,
            limit: 10.0 * eps * reality_scale(z),
        });
    }
    pairs.sort();
    Ok(RealityPartition { real, pairs })
}

/// Optimal-matching distance between two equal-size multisets: the
/// largest pair distance under the assignment minimising the total.
pub fn multiset_distance(a: &[c64], b: &[c64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(invalid(format!(
            "multisets differ in size: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let costs: Vec<Vec<f64>> = a
        .iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).collect())
        .collect();
    let assign = assignment::minimise(&costs);
    Ok(assign
        .iter()
        .enumerate()
        .map(|(i, &j)| costs[i][j])
        .fold(0.0, f64::max))
}

pub fn conj_all(values: &[c64]) -> Vec<c64> {
    values.iter().map(|z| z.conj()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_op(rows: &[&[f64]]) -> OperatorMatrix<f64> {
        let n = rows.len();
        OperatorMatrix::plain(Mat::from_fn(n, n, |i, j| rows[i][j]))
    }

    #[test]
    fn symmetric_two_by_two() {
        let s = eig_symmetric(&real_op(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert!((s.eigenvalues()[0].re + 1.0).abs() < 1e-15);
        assert!((s.eigenvalues()[1].re - 1.0).abs() < 1e-15);
        let id = eig_symmetric(&OperatorMatrix::plain(Mat::<f64>::identity(5, 5))).unwrap();
        assert!(id.eigenvalues().iter().all(|z| (z.re - 1.0).abs() < 1e-15));
    }

    #[test]
    fn symmetric_rejects_asymmetric() {
        let err = eig_symmetric(&real_op(&[&[0.0, 1.0], &[2.0, 0.0]])).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn general_two_by_two() {
        let i = c64::new(0.0, 1.0);
        let z = c64::new(0.0, 0.0);
        let a = OperatorMatrix::plain(Mat::from_fn(2, 2, |r, c| if r == c { z } else { i }));
        let s = eig_general(&a).unwrap();
        assert!((s.eigenvalues()[0] - c64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((s.eigenvalues()[1] - c64::new(0.0, 1.0)).norm() < 1e-14);
        assert!(s.max_residual() < 1e-14);
    }

    #[test]
    fn general_rejects_nan() {
        let mut m = Mat::<c64>::zeros(2, 2);
        m[(0, 1)] = c64::new(f64::NAN, 0.0);
        assert!(matches!(
            eig_general(&OperatorMatrix::plain(m)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn general_agrees_with_symmetric() {
        let n = 12;
        let a = OperatorMatrix::plain(Mat::from_fn(n, n, |i, j| {
            1.0 / (1.0 + i as f64 + j as f64) + if i == j { i as f64 } else { 0.0 }
        }));
        let s1 = eig_symmetric(&a).unwrap();
        let s2 = eig_general(&a.to_complex()).unwrap();
        for (x, y) in s1.eigenvalues().iter().zip(s2.eigenvalues()) {
            assert!((x - y).norm() < 1e-10);
        }
        assert!(s1.max_residual() < SYMMETRIC_RESIDUAL_TOL);
    }

    #[test]
    fn partition_examples() {
        let vals = [c64::new(2.0, 3.0), c64::new(2.0, -3.0), c64::new(5.0, 0.0)];
        let p = classify_reality(&vals, 1e-8).unwrap();
        assert_eq!(p.real, vec![2]);
        assert_eq!(p.pairs, vec![(0, 1)]);
        let all_real = [c64::new(1.0, 1e-12), c64::new(3.0, 0.0)];
        assert!(classify_reality(&all_real, 1e-8).unwrap().pairs.is_empty());
        let broken = [c64::new(2.0, 3.0), c64::new(2.5, -3.0)];
        assert!(matches!(
            classify_reality(&broken, 1e-8),
            Err(Error::BrokenConjugacy { .. })
        ));
        let lonely = [c64::new(2.0, 3.0), c64::new(1.0, 0.0)];
        assert!(matches!(
            classify_reality(&lonely, 1e-8),
            Err(Error::BrokenConjugacy { .. })
        ));
        assert!(classify_reality(&vals, 0.0).is_err());
    }

    #[test]
    fn multiset_distance_ignores_order() {
        let a = [c64::new(1.0, 0.0), c64::new(2.0, 1.0)];
        let b = [c64::new(2.0, 1.0 + 1e-9), c64::new(1.0, 0.0)];
        assert!(multiset_distance(&a, &b).unwrap() < 2e-9);
        assert!(multiset_distance(&a, &b[..1]).is_err());
    }

    #[test]
    fn block_reassembly_sorts_and_embeds() {
        let s1 = eig_symmetric(&real_op(&[&[3.0]])).unwrap();
        let s2 = eig_symmetric(&real_op(&[&[1.0]])).unwrap();
        let merged = Spectrum::from_blocks(2, vec![(s1, vec![0]), (s2, vec![1])]);
        assert_eq!(merged.eigenvalues()[0].re, 1.0);
        assert_eq!(
            merged.eigenvector(0).unwrap(),
            vec![c64::new(0.0, 0.0), c64::new(1.0, 0.0)]
        );
    }
}
