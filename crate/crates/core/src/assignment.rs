//! Optimal bipartite assignment on dense score matrices.
//!
//! Scores are quantised to integers before running Kuhn–Munkres so that the
//! search is exact and terminates; the relative quantum is 1e-12 of the
//! largest score, far below any difference that matters to the callers.

use pathfinding::kuhn_munkres::{kuhn_munkres, kuhn_munkres_min};
use pathfinding::matrix::Matrix;

const QUANTA: f64 = 1e12;

fn quantise(scores: &[Vec<f64>]) -> Option<Matrix<i64>> {
    let rows = scores.len();
    let cols = scores.first()?.len();
    let peak = scores.iter().flatten().fold(
        0.0f64,
        |m, &s| if s.is_finite() { m.max(s.abs()) } else { m },
    );
    let unit = if peak > 0.0 { QUANTA / peak } else { 1.0 };
    let data: Vec<i64> = scores
        .iter()
        .flatten()
        .map(|&s| {
            let v = if s.is_finite() { s } else { peak.copysign(s) };
            (v * unit).round() as i64
        })
        .collect();
    Matrix::from_vec(rows, cols, data).ok()
}

/// Row → column assignment maximising the total score. Requires
/// `rows ≤ columns`; every row receives a distinct column.
pub fn maximise(scores: &[Vec<f64>]) -> Vec<usize> {
    if scores.is_empty() {
        return Vec::new();
    }
    assert!(
        scores.len() <= scores[0].len(),
        "assignment needs at least as many columns as rows"
    );
    let m = quantise(scores).expect("rectangular score matrix");
    kuhn_munkres(&m).1
}

/// Row → column assignment minimising the total cost.
pub fn minimise(costs: &[Vec<f64>]) -> Vec<usize> {
    if costs.is_empty() {
        return Vec::new();
    }
    assert!(
        costs.len() <= costs[0].len(),
        "assignment needs at least as many columns as rows"
    );
    let m = quantise(costs).expect("rectangular cost matrix");
    kuhn_munkres_min(&m).1
}
