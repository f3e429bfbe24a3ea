//! Matrix elements of `x^k` and `½p²` in the eigenbasis of the harmonic
//! oscillator `p² + q²`, stretched by a length scale β.
//!
//! Basis functions are `φ_n(βx)√β` with `q = (a + a†)/√2`, so
//! `x = q/β` and `p_x = β p_q`. Every element is evaluated from the
//! normal-ordered ladder expansion of the full operator power, i.e. the
//! result is the exact top-left block of the infinite matrix.

use faer::Mat;

use crate::error::{invalid, Result};
use crate::operator::{OperatorMatrix, Representation};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Basis1D {
    size: usize,
    scale: f64,
}

impl Basis1D {
    pub fn new(size: usize, scale: f64) -> Result<Self> {
        if size == 0 {
            return Err(invalid("basis size must be at least 1"));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(invalid(format!(
                "basis scale must be positive and finite, got {scale}"
            )));
        }
        Ok(Self { size, scale })
    }

    /// Scale `(4 α N)^(1/6)` for the quartic oscillator `½p² + αx⁴`.
    ///
    /// `(4α)^(1/6)` is where a single Gaussian balances kinetic and quartic
    /// energy; the extra `N^(1/6)` widens the momentum range as the basis
    /// grows so that the highest retained functions still resolve the
    /// classically allowed region of the wanted states.
    pub fn quartic_default_scale(alpha: f64, size: usize) -> f64 {
        (4.0 * alpha * size as f64).powf(1.0 / 6.0)
    }

    pub fn for_quartic(size: usize, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(invalid(format!(
                "quartic coefficient must be positive, got {alpha}"
            )));
        }
        Self::new(size, Self::quartic_default_scale(alpha, size.max(1)))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

/// `⟨n + offset | (a + a†)^power | n⟩ / 2^(power/2)` for `offset ≥ 0`.
fn q_power_element(power: u32, n: usize, offset: usize) -> f64 {
    let n = n as f64;
    let s = std::f64::consts::SQRT_2;
    match (power, offset) {
        (1, 1) => (n + 1.0).sqrt() / s,
        (2, 0) => (2.0 * n + 1.0) / 2.0,
        (2, 2) => ((n + 1.0) * (n + 2.0)).sqrt() / 2.0,
        (3, 1) => 3.0 * (n + 1.0) * (n + 1.0).sqrt() / (2.0 * s),
        (3, 3) => ((n + 1.0) * (n + 2.0) * (n + 3.0)).sqrt() / (2.0 * s),
        (4, 0) => (6.0 * n * n + 6.0 * n + 3.0) / 4.0,
        (4, 2) => (2.0 * n + 3.0) * ((n + 1.0) * (n + 2.0)).sqrt() / 2.0,
        (4, 4) => ((n + 1.0) * (n + 2.0) * (n + 3.0) * (n + 4.0)).sqrt() / 4.0,
        _ => 0.0,
    }
}

/// `⟨m| x^power |n⟩` in the scaled basis.
pub fn position_power_matrix(basis: &Basis1D, power: u32) -> Result<OperatorMatrix<f64>> {
    if !(1..=4).contains(&power) {
        return Err(invalid(format!(
            "position power must be in 1..=4, got {power}"
        )));
    }
    let n = basis.size;
    let factor = basis.scale.powi(-(power as i32));
    let mut m = Mat::<f64>::zeros(n, n);
    for col in 0..n {
        for offset in 0..=(power as usize) {
            let row = col + offset;
            if row >= n {
                break;
            }
            let v = q_power_element(power, col, offset) * factor;
            if v != 0.0 {
                m[(row, col)] = v;
                m[(col, row)] = v;
            }
        }
    }
    Ok(OperatorMatrix::new(m, Representation::Oscillator1d(*basis)))
}

/// `⟨m| ½p² |n⟩` in the scaled basis.
pub fn kinetic_matrix(basis: &Basis1D) -> OperatorMatrix<f64> {
    let n = basis.size;
    let b2 = basis.scale * basis.scale;
    let mut m = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        let fi = i as f64;
        m[(i, i)] = b2 * (2.0 * fi + 1.0) / 4.0;
        if i + 2 < n {
            let v = -b2 * ((fi + 1.0) * (fi + 2.0)).sqrt() / 4.0;
            m[(i + 2, i)] = v;
            m[(i, i + 2)] = v;
        }
    }
    OperatorMatrix::new(m, Representation::Oscillator1d(*basis))
}

/// `½p² + αx⁴` on one axis.
pub fn quartic_hamiltonian(basis: &Basis1D, alpha: f64) -> Result<OperatorMatrix<f64>> {
    let kin = kinetic_matrix(basis);
    let x4 = position_power_matrix(basis, 4)?;
    let n = basis.size;
    let m = Mat::from_fn(n, n, |i, j| kin.get(i, j) + alpha * x4.get(i, j));
    Ok(OperatorMatrix::new(m, Representation::Oscillator1d(*basis)))
}
