use nhspec::eigensolver::DEFAULT_REALITY_EPS;
use nhspec::oracle1d::parse_decimal;
use nhspec::sweep::{
    count_phase_transitions, eig2, find_exceptional_point, pair_state, run_sweep, FnFamily,
    PairFamily, PairState, SweepConfig,
};
use nhspec::{
    c64, BasisIndex, Discretization, Error, Grid2D, ModelParams, Perturbation, ProductBasis,
};

/// First exceptional point for `W = x²y + xy²`, `α = (1, √2)`.
const FIRST_EP: f64 = 1.89495826;

fn synthetic(lambda: f64) -> nhspec::Result<(c64, c64)> {
    let i = c64::new(0.0, lambda);
    eig2([[c64::new(1.0, 0.0), i], [i, c64::new(-1.0, 0.0)]])
}

fn hermitian(lambda: f64) -> nhspec::Result<(c64, c64)> {
    let l = c64::new(lambda, 0.0);
    eig2([[c64::new(1.0, 0.0), l], [l, c64::new(-1.0, 0.0)]])
}

#[test]
fn synthetic_ep_is_located() {
    let mut f = FnFamily::new(synthetic, 1e-10);
    let ep = find_exceptional_point(&mut f, 0.5, 1.5, 1e-10).unwrap();
    assert!(ep.lambda_low <= 1.0 && 1.0 <= ep.lambda_high);
    assert!(ep.width() <= 1e-10);
    assert!(ep.breaks_reality);
    for w in ep.widths.windows(2) {
        assert_eq!(w[1], 0.5 * w[0]);
    }
    let n = count_phase_transitions(&mut f, 0.0, 2.0, 21, 1e-9).unwrap();
    assert_eq!(n.count, 1);
}

#[test]
fn hermitian_family_never_breaks() {
    let mut f = FnFamily::new(hermitian, DEFAULT_REALITY_EPS);
    let n = count_phase_transitions(&mut f, 0.0, 5.0, 101, 1e-9).unwrap();
    assert_eq!(n.count, 0);
    assert!(matches!(
        find_exceptional_point(&mut f, 0.0, 5.0, 1e-6),
        Err(Error::InvalidBracket { .. })
    ));
}

#[test]
fn degenerate_range_rejected() {
    assert!(SweepConfig::new(0.0, 0.0, 11, 8).is_err());
    assert!(SweepConfig::new(0.0, 1.0, 1, 8).is_err());
    assert!(SweepConfig::new(0.0, 1.0, 11, 0).is_err());
}

#[test]
fn first_point_reproduces_unperturbed_levels() {
    let params = ModelParams::anisotropic(Perturbation::X2yPlusXy2, 0.0).unwrap();
    let disc = Discretization::Basis(ProductBasis::for_model(24, &params).unwrap());
    let cfg = SweepConfig::new(0.0, 0.01, 2, 8).unwrap();
    let sweep = run_sweep(&cfg, &params, &disc).unwrap();
    let rows: Vec<(BasisIndex, f64)> = include_str!("data/table1.csv")
        .lines()
        .skip(1)
        .take(8)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let e = parse_decimal(f[2]).unwrap();
            (
                BasisIndex::new(f[0].parse().unwrap(), f[1].parse().unwrap()),
                e.hi(),
            )
        })
        .collect();
    for (b, (idx, e)) in sweep.branches.iter().zip(&rows) {
        assert_eq!(b.parent, *idx);
        assert!((b.levels[0].energy.re - e).abs() < 1e-8);
        assert!(b.parent_weight > 1.0 - 1e-12);
    }
}

#[test]
fn bilinear_branches_keep_inversion_parity() {
    let params = ModelParams::anisotropic(Perturbation::Xy, 0.0).unwrap();
    let disc = Discretization::Basis(ProductBasis::for_model(12, &params).unwrap());
    let cfg = SweepConfig::new(0.0, 1.0, 21, 8).unwrap();
    let sweep = run_sweep(&cfg, &params, &disc).unwrap();
    for b in &sweep.branches {
        for l in &b.levels {
            assert_eq!(l.ci, b.parent_ci, "branch {} at {}", b.id, l.lambda);
            assert!(l.ci_purity > 1.0 - 1e-10);
        }
    }
    assert!(sweep.continuity().is_clean());
}

#[test]
fn square_doublets_are_complex_for_any_coupling() {
    let params = ModelParams::isotropic(Perturbation::Xy, 0.0).unwrap();
    let disc = Discretization::Basis(ProductBasis::for_model(14, &params).unwrap());
    let cfg = SweepConfig::new(0.0, 0.05, 11, 8).unwrap();
    let sweep = run_sweep(&cfg, &params, &disc).unwrap();
    let doublet: Vec<usize> = sweep
        .branches
        .iter()
        .filter(|b| [(1, 0), (0, 1)].contains(&(b.parent.nx, b.parent.ny)))
        .map(|b| b.id)
        .collect();
    assert_eq!(doublet.len(), 2);
    for id in doublet {
        for l in &sweep.branches[id].levels[1..] {
            assert!(l.energy.im.abs() > 0.0 && l.energy.im.abs() > 1e-8, "{l:?}");
        }
    }
}

#[test]
fn first_exceptional_point_agrees_across_methods() {
    let params = ModelParams::anisotropic(Perturbation::X2yPlusXy2, 0.0).unwrap();
    let disc = Discretization::Basis(ProductBasis::for_model(20, &params).unwrap());
    let cfg = SweepConfig::new(0.0, 2.0, 41, 8)
        .unwrap()
        .with_ep_tol(1e-8)
        .unwrap();
    let sweep = run_sweep(&cfg, &params, &disc).unwrap();
    let all = sweep.all_transitions().unwrap();
    let first = all
        .iter()
        .flat_map(|p| p.count.transitions.iter())
        .min_by(|a, b| a.lambda().total_cmp(&b.lambda()))
        .unwrap();
    assert!(
        (first.lambda() - FIRST_EP).abs() < 1e-6,
        "{}",
        first.lambda()
    );
    assert!(first.breaks_reality);
    let (i, j) = first.branch_ids;
    let step = sweep
        .lambdas
        .iter()
        .position(|&l| l >= first.lambda())
        .unwrap();
    let anchor =
        0.5 * (sweep.branches[i].levels[step].energy.re + sweep.branches[j].levels[step].energy.re);

    let grid = Discretization::Grid(Grid2D::new(4.0, 28).unwrap());
    let mut family = FnFamily::new(
        |lambda: f64| {
            let p = params.with_lambda(lambda)?;
            let mut v = grid.solve(&p, false)?.eigenvalues().to_vec();
            v.sort_by(|a, b| (a.re - anchor).abs().total_cmp(&(b.re - anchor).abs()));
            Ok((v[0], v[1]))
        },
        DEFAULT_REALITY_EPS,
    );
    let ep = find_exceptional_point(
        &mut family,
        first.lambda() - 0.01,
        first.lambda() + 0.01,
        2e-5,
    )
    .unwrap();
    assert!(
        (ep.lambda() - first.lambda()).abs() < 1e-4,
        "{}",
        ep.lambda()
    );
    let (a, b) = family.pair(ep.lambda_high).unwrap();
    assert_eq!(
        pair_state(a, b, DEFAULT_REALITY_EPS),
        PairState::ConjugatePair
    );
}
