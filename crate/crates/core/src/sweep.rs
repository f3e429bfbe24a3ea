//! Continuation of eigenvalue branches in λ, exceptional-point bracketing
//! and phase-transition counting.
//!
//! Branches are linked between neighbouring λ values by a global optimal
//! assignment on the eigenvector overlap matrix. Whether two branches
//! form a complex-conjugate pair is decided by [`classify_reality`] on the
//! spectrum at that λ; an exceptional point is a change of that predicate,
//! and is bracketed by bisection on it.

use std::collections::HashMap;

use faer::c64;

use crate::assignment;
use crate::discretization::{Discretization, Method};
use crate::eigensolver::{self, classify_reality, reality_scale, Spectrum};
use crate::error::{invalid, Error, Result};
use crate::hamiltonian2d::{BasisIndex, ModelParams};
use crate::symmetry::{basis_irrep, state_irrep, Group, IrrepLabel};

/// Overlap gap below which an assignment counts as ambiguous.
pub const AMBIGUITY_GAP: f64 = 1e-3;
/// Consecutive overlaps along a branch expected away from EPs.
pub const MIN_OVERLAP: f64 = 0.9;
/// Grid steps around a detected EP exempt from continuity checks.
pub const EP_EXEMPT_STEPS: usize = 2;
/// Purity required for a definite per-point symmetry label.
pub const PURITY_THRESHOLD: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub lambda_start: f64,
    pub lambda_end: f64,
    pub steps: usize,
    pub tracked_levels: usize,
    pub reality_eps: f64,
    /// Bracket width at which EP bisection stops.
    pub ep_tol: f64,
}

impl SweepConfig {
    pub fn new(
        lambda_start: f64,
        lambda_end: f64,
        steps: usize,
        tracked_levels: usize,
    ) -> Result<Self> {
        let cfg = Self {
            lambda_start,
            lambda_end,
            steps,
            tracked_levels,
            reality_eps: eigensolver::DEFAULT_REALITY_EPS,
            ep_tol: 1e-8,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_reality_eps(mut self, eps: f64) -> Result<Self> {
        self.reality_eps = eps;
        self.validate()?;
        Ok(self)
    }

    pub fn with_ep_tol(mut self, tol: f64) -> Result<Self> {
        self.ep_tol = tol;
        self.validate()?;
        Ok(self)
    }

    /// Same range with `2(steps − 1) + 1` points: every old point is kept.
    pub fn doubled(&self) -> Self {
        Self {
            steps: 2 * (self.steps - 1) + 1,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.lambda_start,
            self.lambda_end,
            self.reality_eps,
            self.ep_tol,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(invalid("sweep parameters must be finite"));
        }
        if self.lambda_start < 0.0 {
            return Err(invalid(format!(
                "lambda must be non-negative, got start {}",
                self.lambda_start
            )));
        }
        if !(self.lambda_start < self.lambda_end) {
            return Err(invalid(format!(
                "lambda range must satisfy start < end, got [{}, {}]",
                self.lambda_start, self.lambda_end
            )));
        }
        if self.steps < 2 {
            return Err(invalid(format!(
                "a sweep needs at least 2 points, got {}",
                self.steps
            )));
        }
        if self.tracked_levels == 0 {
            return Err(invalid("at least one level must be tracked"));
        }
        if !(self.reality_eps > 0.0) || !(self.ep_tol > 0.0) {
            return Err(invalid(
                "reality threshold and EP tolerance must be positive",
            ));
        }
        Ok(())
    }

    pub fn lambdas(&self) -> Vec<f64> {
        uniform_grid(self.lambda_start, self.lambda_end, self.steps)
    }
}

fn uniform_grid(start: f64, end: f64, steps: usize) -> Vec<f64> {
    let n = steps - 1;
    (0..steps)
        .map(|i| {
            if i == n {
                end
            } else {
                start + (end - start) * i as f64 / n as f64
            }
        })
        .collect()
}

/// One eigenvalue on one branch at one λ.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledLevel {
    pub lambda: f64,
    pub energy: c64,
    pub residual: f64,
    /// Inversion label of the state at this λ.
    pub ci: IrrepLabel,
    pub ci_purity: f64,
    /// `|⟨v(λ_prev) | v(λ)⟩|`; 1 at the first point.
    pub overlap_prev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub id: usize,
    /// Product state the branch starts from.
    pub parent: BasisIndex,
    pub parent_weight: f64,
    pub parent_ci: IrrepLabel,
    pub parent_d2h: IrrepLabel,
    pub levels: Vec<LabeledLevel>,
}

impl Branch {
    pub fn ancestry(&self) -> String {
        format!("{} {}/{}", self.parent, self.parent_ci, self.parent_d2h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingWarning {
    pub lambda: f64,
    pub branch: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExceptionalPoint {
    pub lambda_low: f64,
    pub lambda_high: f64,
    pub branch_ids: (usize, usize),
    /// Smallest `|E_i − E_j|` seen during bisection.
    pub gap_at_bracket: f64,
    /// `true` for real → complex with increasing λ.
    pub breaks_reality: bool,
    /// Bracket width after each bisection step.
    pub widths: Vec<f64>,
}

impl ExceptionalPoint {
    pub fn lambda(&self) -> f64 {
        0.5 * (self.lambda_low + self.lambda_high)
    }

    pub fn width(&self) -> f64 {
        self.lambda_high - self.lambda_low
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionCount {
    pub count: usize,
    pub transitions: Vec<ExceptionalPoint>,
}

/// Whether a tracked pair is real-split or a complex-conjugate pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairState {
    RealSplit,
    ConjugatePair,
}

impl PairState {
    fn name(self) -> &'static str {
        match self {
            PairState::RealSplit => "real-split",
            PairState::ConjugatePair => "a conjugate pair",
        }
    }
}

/// A pair of eigenvalues that can be evaluated at any λ.
pub trait PairFamily {
    fn branch_ids(&self) -> (usize, usize) {
        (0, 1)
    }

    /// The pair's two eigenvalues at `lambda`.
    fn pair(&mut self, lambda: f64) -> Result<(c64, c64)>;

    fn reality_eps(&self) -> f64;

    fn state(&mut self, lambda: f64) -> Result<(PairState, f64)> {
        let (a, b) = self.pair(lambda)?;
        Ok((pair_state(a, b, self.reality_eps()), (a - b).norm()))
    }
}

/// Reality predicate for two eigenvalues: a conjugate pair iff both are
/// non-real at `eps`, on opposite sides of the axis, and conjugate images
/// of each other within `10 eps`.
pub fn pair_state(a: c64, b: c64, eps: f64) -> PairState {
    let partition = classify_reality(&[a, b], eps);
    match partition {
        Ok(p) if p.pairs.len() == 1 => PairState::ConjugatePair,
        _ => PairState::RealSplit,
    }
}

/// Closure-backed family, e.g. for closed-form test matrices.
pub struct FnFamily<F> {
    f: F,
    eps: f64,
}

impl<F: FnMut(f64) -> Result<(c64, c64)>> FnFamily<F> {
    pub fn new(f: F, eps: f64) -> Self {
        Self { f, eps }
    }
}

impl<F: FnMut(f64) -> Result<(c64, c64)>> PairFamily for FnFamily<F> {
    fn pair(&mut self, lambda: f64) -> Result<(c64, c64)> {
        (self.f)(lambda)
    }

    fn reality_eps(&self) -> f64 {
        self.eps
    }
}

/// The two eigenvalues of a 2×2 matrix given row-major.
pub fn eig2(m: [[c64; 2]; 2]) -> Result<(c64, c64)> {
    let op = crate::operator::OperatorMatrix::plain(faer::Mat::from_fn(2, 2, |i, j| m[i][j]));
    let s = eigensolver::eigenvalues_general(&op)?;
    Ok((s.eigenvalues()[0], s.eigenvalues()[1]))
}

/// Bisection on the reality predicate. The predicate must differ at the
/// two ends of `[low, high]`.
pub fn find_exceptional_point(
    family: &mut impl PairFamily,
    low: f64,
    high: f64,
    tol: f64,
) -> Result<ExceptionalPoint> {
    if !(low < high) || !low.is_finite() || !high.is_finite() {
        return Err(invalid(format!(
            "bracket must satisfy low < high, got [{low}, {high}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(invalid("bracket tolerance must be positive"));
    }
    let (s_lo, g_lo) = family.state(low)?;
    let (s_hi, g_hi) = family.state(high)?;
    if s_lo == s_hi {
        return Err(Error::InvalidBracket {
            low,
            high,
            state: s_lo.name(),
        });
    }
    let (mut lo, mut hi) = (low, high);
    let mut gap = g_lo.min(g_hi);
    let mut widths = vec![hi - lo];
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (s, g) = family.state(mid)?;
        gap = gap.min(g);
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        widths.push(hi - lo);
    }
    Ok(ExceptionalPoint {
        lambda_low: lo,
        lambda_high: hi,
        branch_ids: family.branch_ids(),
        gap_at_bracket: gap,
        breaks_reality: s_lo == PairState::RealSplit,
        widths,
    })
}

/// Changes of the reality predicate on a uniform grid of `steps` points
/// over `[start, end]`, each refined to a bracket of width `tol`.
pub fn count_phase_transitions(
    family: &mut impl PairFamily,
    start: f64,
    end: f64,
    steps: usize,
    tol: f64,
) -> Result<TransitionCount> {
    if !(start < end) || steps < 2 {
        return Err(invalid(
            "transition count needs start < end and at least 2 points",
        ));
    }
    let grid = uniform_grid(start, end, steps);
    let mut states = Vec::with_capacity(steps);
    for &l in &grid {
        states.push(family.state(l)?.0);
    }
    let mut transitions = Vec::new();
    for i in 1..steps {
        if states[i] != states[i - 1] {
            transitions.push(find_exceptional_point(family, grid[i - 1], grid[i], tol)?);
        }
    }
    Ok(TransitionCount {
        count: transitions.len(),
        transitions,
    })
}

/// Result of [`run_sweep`].
#[derive(Debug, Clone)]
pub struct Sweep {
    pub config: SweepConfig,
    pub params: ModelParams,
    pub method: Method,
    pub discretization: String,
    pub lambdas: Vec<f64>,
    pub branches: Vec<Branch>,
    pub warnings: Vec<TrackingWarning>,
    /// Branch pairs that are complex-conjugate partners at each λ.
    pub conjugate_pairs: Vec<Vec<(usize, usize)>>,
    disc: Discretization,
}

pub fn run_sweep(cfg: &SweepConfig, params: &ModelParams, disc: &Discretization) -> Result<Sweep> {
    cfg.validate()?;
    params.validate()?;
    let k = cfg.tracked_levels;
    let dim = disc.dim();
    if k > dim {
        return Err(invalid(format!(
            "cannot track {k} levels in a {dim}-dimensional discretization"
        )));
    }
    let candidates = dim.min(2 * k + 4);
    let lambdas = cfg.lambdas();

    let mut branches: Vec<Branch> = Vec::with_capacity(k);
    let mut warnings = Vec::new();
    let mut conjugate_pairs = Vec::with_capacity(lambdas.len());
    let mut prev: Option<Vec<Vec<c64>>> = None;

    for &lambda in &lambdas {
        let p = params.with_lambda(lambda)?;
        let spec = disc.solve(&p, true)?;
        let vectors: Vec<Vec<c64>> = (0..candidates)
            .map(|j| spec.eigenvector(j).unwrap())
            .collect();
        let values = &spec.eigenvalues()[..candidates];
        let residuals = spec.residuals().unwrap();

        let chosen: Vec<usize> = match &prev {
            None => {
                let parents = disc.parents(&p, &spec, k)?;
                for (id, &(parent, weight)) in parents.iter().enumerate() {
                    branches.push(Branch {
                        id,
                        parent,
                        parent_weight: weight,
                        parent_ci: basis_irrep(parent, Group::Ci)?,
                        parent_d2h: basis_irrep(parent, Group::D2h)?,
                        levels: Vec::with_capacity(lambdas.len()),
                    });
                }
                (0..k).collect()
            }
            Some(prev_vectors) => {
                let overlaps: Vec<Vec<f64>> = prev_vectors
                    .iter()
                    .map(|u| vectors.iter().map(|v| inner(u, v).norm()).collect())
                    .collect();
                let assign = assignment::maximise(&overlaps);
                for (b, row) in overlaps.iter().enumerate() {
                    if let Some(msg) = ambiguity(row, assign[b], values) {
                        warnings.push(TrackingWarning {
                            lambda,
                            branch: b,
                            message: msg,
                        });
                    }
                }
                assign
            }
        };

        for (b, &c) in chosen.iter().enumerate() {
            let overlap_prev = match &prev {
                None => 1.0,
                Some(pv) => inner(&pv[b], &vectors[c]).norm(),
            };
            let label = state_irrep(&vectors[c], disc, Group::Ci, PURITY_THRESHOLD)?;
            branches[b].levels.push(LabeledLevel {
                lambda,
                energy: values[c],
                residual: residuals[c],
                ci: label.label,
                ci_purity: label.purity,
                overlap_prev,
            });
        }

        let partition = classify_reality(
            &spec.eigenvalues()[..closed_window(spec.eigenvalues(), candidates, cfg.reality_eps)],
            cfg.reality_eps,
        )?;
        let owner: HashMap<usize, usize> =
            chosen.iter().enumerate().map(|(b, &c)| (c, b)).collect();
        let mut pairs: Vec<(usize, usize)> = partition
            .pairs
            .iter()
            .filter_map(|&(u, l)| match (owner.get(&u), owner.get(&l)) {
                (Some(&a), Some(&b)) => Some((a.min(b), a.max(b))),
                _ => None,
            })
            .collect();
        pairs.sort();
        conjugate_pairs.push(pairs);

        prev = Some(chosen.iter().map(|&c| vectors[c].clone()).collect());
    }

    Ok(Sweep {
        config: cfg.clone(),
        params: *params,
        method: disc.method(),
        discretization: disc.describe(),
        lambdas,
        branches,
        warnings,
        conjugate_pairs,
        disc: *disc,
    })
}

/// Grow `len` by one if the cut would separate a conjugate pair.
fn closed_window(values: &[c64], len: usize, eps: f64) -> usize {
    if len < values.len() {
        let (a, b) = (values[len - 1], values[len]);
        if !eigensolver::is_real(a, eps) && (a - b.conj()).norm() <= 10.0 * eps * reality_scale(a) {
            return len + 1;
        }
    }
    len
}

fn inner(u: &[c64], v: &[c64]) -> c64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn ambiguity(row: &[f64], chosen: usize, values: &[c64]) -> Option<String> {
    let best = row[chosen];
    if best < 0.1 {
        return None;
    }
    for (c, &o) in row.iter().enumerate() {
        if c == chosen || (best - o).abs() > AMBIGUITY_GAP {
            continue;
        }
        let scale = reality_scale(values[chosen]);
        // which member of a fresh conjugate pair continues a branch is a
        // convention, not a tracking ambiguity
        if (values[c] - values[chosen].conj()).norm() <= 1e-6 * scale {
            continue;
        }
        // genuinely degenerate candidates are interchangeable
        if (values[c] - values[chosen]).norm() > 1e-6 * scale {
            return Some(format!(
                "overlaps {best:.6} and {o:.6} within {AMBIGUITY_GAP:e} for candidates {} and {}",
                fmt_c(values[chosen]),
                fmt_c(values[c])
            ));
        }
    }
    None
}

fn fmt_c(z: c64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

/// Per-branch continuity diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityReport {
    /// 90th percentile of `|ΔRe E| / Δλ` over all branches and steps.
    pub slope_scale: f64,
    /// Steps with `|ΔRe E| > 10 C Δλ`, as `(branch, step index)`.
    pub jumps: Vec<(usize, usize)>,
    /// Steps with overlap below [`MIN_OVERLAP`], as `(branch, step index)`.
    pub low_overlaps: Vec<(usize, usize)>,
    /// Smallest overlap per branch outside the exempt windows.
    pub min_overlap: Vec<f64>,
}

impl ContinuityReport {
    pub fn is_clean(&self) -> bool {
        self.jumps.is_empty() && self.low_overlaps.is_empty()
    }
}

/// A coalescing pair of branches and its transitions.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTransitions {
    pub branch_ids: (usize, usize),
    pub count: TransitionCount,
}

impl Sweep {
    pub fn lambda_step(&self) -> f64 {
        self.lambdas[1] - self.lambdas[0]
    }

    /// Branch pairs that are conjugate partners at some grid point.
    pub fn coalescing_pairs(&self) -> Vec<(usize, usize)> {
        let mut all: Vec<(usize, usize)> = self.conjugate_pairs.iter().flatten().copied().collect();
        all.sort();
        all.dedup();
        all
    }

    fn state_at(&self, pair: (usize, usize), step: usize) -> PairState {
        if self.conjugate_pairs[step].contains(&pair) {
            PairState::ConjugatePair
        } else {
            PairState::RealSplit
        }
    }

    /// Transition count for one pair: predicate changes on the sweep grid,
    /// each refined by bisection with fresh solves.
    pub fn count_transitions(&self, pair: (usize, usize)) -> Result<TransitionCount> {
        let mut family = SweepPair::new(self, pair);
        let mut transitions = Vec::new();
        for step in 1..self.lambdas.len() {
            if self.state_at(pair, step) != self.state_at(pair, step - 1) {
                transitions.push(find_exceptional_point(
                    &mut family,
                    self.lambdas[step - 1],
                    self.lambdas[step],
                    self.config.ep_tol,
                )?);
            }
        }
        Ok(TransitionCount {
            count: transitions.len(),
            transitions,
        })
    }

    pub fn all_transitions(&self) -> Result<Vec<PairTransitions>> {
        self.coalescing_pairs()
            .into_iter()
            .map(|pair| {
                Ok(PairTransitions {
                    branch_ids: pair,
                    count: self.count_transitions(pair)?,
                })
            })
            .collect()
    }

    /// Grid steps lying within [`EP_EXEMPT_STEPS`] of a predicate change of
    /// any pair involving `branch`.
    fn exempt_steps(&self, branch: usize) -> Vec<bool> {
        let n = self.lambdas.len();
        let mut exempt = vec![false; n];
        for pair in self.coalescing_pairs() {
            if pair.0 != branch && pair.1 != branch {
                continue;
            }
            for step in 1..n {
                if self.state_at(pair, step) != self.state_at(pair, step - 1) {
                    let lo = step.saturating_sub(EP_EXEMPT_STEPS + 1);
                    let hi = (step + EP_EXEMPT_STEPS).min(n - 1);
                    for e in exempt.iter_mut().take(hi + 1).skip(lo) {
                        *e = true;
                    }
                }
            }
        }
        exempt
    }

    pub fn continuity(&self) -> ContinuityReport {
        let dl = self.lambda_step();
        let mut slopes: Vec<f64> = Vec::new();
        for b in &self.branches {
            for w in b.levels.windows(2) {
                slopes.push((w[1].energy.re - w[0].energy.re).abs() / dl);
            }
        }
        slopes.sort_by(|a, b| a.total_cmp(b));
        let slope_scale = if slopes.is_empty() {
            0.0
        } else {
            slopes[((slopes.len() - 1) as f64 * 0.9).round() as usize]
        };
        let mut jumps = Vec::new();
        let mut low_overlaps = Vec::new();
        let mut min_overlap = Vec::new();
        for b in &self.branches {
            let exempt = self.exempt_steps(b.id);
            let mut worst = 1.0f64;
            for (step, &skip) in exempt.iter().enumerate().skip(1) {
                if skip {
                    continue;
                }
                let d = (b.levels[step].energy.re - b.levels[step - 1].energy.re).abs();
                if d > 10.0 * slope_scale * dl && d > 1e-12 {
                    jumps.push((b.id, step));
                }
                let o = b.levels[step].overlap_prev;
                worst = worst.min(o);
                if o < MIN_OVERLAP {
                    low_overlaps.push((b.id, step));
                }
            }
            min_overlap.push(worst);
        }
        ContinuityReport {
            slope_scale,
            jumps,
            low_overlaps,
            min_overlap,
        }
    }

    /// Largest `|Im E|` on either member of `pair` before its first
    /// predicate change (the whole sweep if it never changes).
    pub fn max_imag_before_first_transition(&self, pair: (usize, usize)) -> f64 {
        let mut worst = 0.0f64;
        for step in 0..self.lambdas.len() {
            if self.state_at(pair, step) == PairState::ConjugatePair {
                break;
            }
            for id in [pair.0, pair.1] {
                worst = worst.max(self.branches[id].levels[step].energy.im.abs());
            }
        }
        worst
    }

    /// Largest `|E_i − conj E_j|` over grid points where `pair` is complex.
    pub fn max_conjugate_mismatch(&self, pair: (usize, usize)) -> f64 {
        let mut worst = 0.0f64;
        for step in 0..self.lambdas.len() {
            if self.state_at(pair, step) == PairState::ConjugatePair {
                let a = self.branches[pair.0].levels[step].energy;
                let b = self.branches[pair.1].levels[step].energy;
                worst = worst.max((a - b.conj()).norm());
            }
        }
        worst
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }
}

/// A branch pair of a finished sweep as a [`PairFamily`]. Grid points use
/// the stored classification; other λ values are solved afresh and the
/// pair is taken as the two eigenvalues closest to the pair's mean,
/// interpolated linearly from the neighbouring grid points.
struct SweepPair<'a> {
    sweep: &'a Sweep,
    pair: (usize, usize),
    cache: HashMap<u64, Vec<c64>>,
}

impl<'a> SweepPair<'a> {
    fn new(sweep: &'a Sweep, pair: (usize, usize)) -> Self {
        Self {
            sweep,
            pair,
            cache: HashMap::new(),
        }
    }

    fn anchor(&self, lambda: f64) -> c64 {
        let ls = &self.sweep.lambdas;
        let i = match ls.iter().position(|&l| l >= lambda) {
            Some(0) => 1,
            Some(i) => i,
            None => ls.len() - 1,
        };
        let mean = |s: usize| {
            let a = self.sweep.branches[self.pair.0].levels[s].energy;
            let b = self.sweep.branches[self.pair.1].levels[s].energy;
            0.5 * (a.re + b.re)
        };
        let t = (lambda - ls[i - 1]) / (ls[i] - ls[i - 1]);
        c64::new(mean(i - 1) + t * (mean(i) - mean(i - 1)), 0.0)
    }

    fn spectrum(&mut self, lambda: f64) -> Result<Vec<c64>> {
        if let Some(v) = self.cache.get(&lambda.to_bits()) {
            return Ok(v.clone());
        }
        let p = self.sweep.params.with_lambda(lambda)?;
        let spec: Spectrum = self.sweep.disc.solve(&p, false)?;
        let eps = self.sweep.config.reality_eps;
        let window = closed_window(
            spec.eigenvalues(),
            (2 * self.sweep.config.tracked_levels + 4).min(spec.len()),
            eps,
        );
        let v = spec.eigenvalues()[..window].to_vec();
        self.cache.insert(lambda.to_bits(), v.clone());
        Ok(v)
    }
}

impl PairFamily for SweepPair<'_> {
    fn branch_ids(&self) -> (usize, usize) {
        self.pair
    }

    fn pair(&mut self, lambda: f64) -> Result<(c64, c64)> {
        if let Some(step) = self.sweep.lambdas.iter().position(|&l| l == lambda) {
            let a = self.sweep.branches[self.pair.0].levels[step].energy;
            let b = self.sweep.branches[self.pair.1].levels[step].energy;
            return Ok((a, b));
        }
        let anchor = self.anchor(lambda);
        let mut values = self.spectrum(lambda)?;
        values.sort_by(|a, b| (a - anchor).norm().total_cmp(&(b - anchor).norm()));
        Ok((values[0], values[1]))
    }

    fn reality_eps(&self) -> f64 {
        self.sweep.config.reality_eps
    }

    fn state(&mut self, lambda: f64) -> Result<(PairState, f64)> {
        if let Some(step) = self.sweep.lambdas.iter().position(|&l| l == lambda) {
            let (a, b) = self.pair(lambda)?;
            return Ok((self.sweep.state_at(self.pair, step), (a - b).norm()));
        }
        let (a, b) = self.pair(lambda)?;
        Ok((pair_state(a, b, self.reality_eps()), (a - b).norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(lambda: f64) -> Result<(c64, c64)> {
        let i = c64::new(0.0, lambda);
        eig2([[c64::new(1.0, 0.0), i], [i, c64::new(-1.0, 0.0)]])
    }

    #[test]
    fn synthetic_ep_at_one() {
        let mut fam = FnFamily::new(synthetic, 1e-8);
        let ep = find_exceptional_point(&mut fam, 0.5, 1.5, 1e-10).unwrap();
        assert!(ep.lambda_low <= 1.0 + 1e-12 && 1.0 - 1e-12 <= ep.lambda_high);
        assert!(ep.width() <= 1e-10);
        assert!(ep.breaks_reality);
    }

    #[test]
    fn bracket_with_equal_ends_is_rejected() {
        let mut fam = FnFamily::new(synthetic, 1e-8);
        let err = find_exceptional_point(&mut fam, 0.1, 0.5, 1e-10).unwrap_err();
        assert!(matches!(err, Error::InvalidBracket { .. }));
    }

    #[test]
    fn counts_on_synthetic_family() {
        let mut fam = FnFamily::new(synthetic, 1e-8);
        let c = count_phase_transitions(&mut fam, 0.0, 2.0, 41, 1e-10).unwrap();
        assert_eq!(c.count, 1);
    }

    #[test]
    fn config_validation() {
        assert!(SweepConfig::new(0.0, 0.0, 10, 8).is_err());
        assert!(SweepConfig::new(0.0, 1.0, 1, 8).is_err());
        assert!(SweepConfig::new(0.0, 1.0, 10, 0).is_err());
        assert!(SweepConfig::new(-1.0, 1.0, 10, 1).is_err());
        let c = SweepConfig::new(0.0, 1.0, 11, 2).unwrap();
        assert_eq!(c.lambdas().len(), 11);
        assert_eq!(c.doubled().lambdas().len(), 21);
        assert_eq!(c.doubled().lambdas()[2], c.lambdas()[1]);
    }
}
