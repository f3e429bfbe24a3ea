use nhspec::basis1d::{position_power_matrix, quartic_hamiltonian};
use nhspec::eigensolver::{
    classify_reality, conj_all, eig_general, eigenvalues_general, multiset_distance,
    DEFAULT_REALITY_EPS,
};
use nhspec::hamiltonian2d::{build_h, build_h0, build_w};
use nhspec::symmetry::SymmetryAction;
use nhspec::{
    c64, Basis1D, Discretization, Grid2D, ModelParams, Perturbation, ProductBasis, SpatialOp,
};
use proptest::prelude::*;

fn perturbation() -> impl Strategy<Value = Perturbation> {
    prop::sample::select(Perturbation::ALL.to_vec())
}

fn model() -> impl Strategy<Value = (ModelParams, usize)> {
    (
        0.5f64..2.0,
        0.5f64..2.0,
        perturbation(),
        0.0f64..2.0,
        4usize..10,
    )
        .prop_map(|(ax, ay, w, lambda, n)| (ModelParams::new(ax, ay, w, lambda).unwrap(), n))
}

fn matvec(h: &faer::Mat<c64>, v: &[c64]) -> Vec<c64> {
    (0..h.nrows())
        .map(|i| (0..h.ncols()).map(|j| h[(i, j)] * v[j]).sum())
        .collect()
}

fn l2(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn frobenius(h: &faer::Mat<c64>) -> f64 {
    let mut s = 0.0;
    for j in 0..h.ncols() {
        for i in 0..h.nrows() {
            s += h[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

/// `(-1)^k` as f64.
fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn eigenpair_residuals((params, n) in model()) {
        let basis = ProductBasis::for_model(n, &params).unwrap();
        let h = build_h(&params, &basis).unwrap();
        let spec = eig_general(&h).unwrap();
        let norm = frobenius(h.matrix());
        for j in 0..spec.len() {
            let v = spec.eigenvector(j).unwrap();
            let hv = matvec(h.matrix(), &v);
            let e = spec.eigenvalues()[j];
            let r: Vec<c64> = hv.iter().zip(&v).map(|(a, b)| a - e * b).collect();
            prop_assert!(l2(&r) / l2(&v) <= 1e-10 * norm);
        }
    }

    #[test]
    fn blocked_solve_residuals((params, n) in model()) {
        let basis = ProductBasis::for_model(n, &params).unwrap();
        let spec = Discretization::Basis(basis).solve(&params, true).unwrap();
        prop_assert_eq!(spec.len(), basis.dim());
        prop_assert!(spec.max_residual() <= 1e-10);
    }

    #[test]
    fn spectrum_is_closed_under_conjugation((params, n) in model()) {
        let basis = ProductBasis::for_model(n, &params).unwrap();
        let h = build_h(&params, &basis).unwrap();
        let e = eigenvalues_general(&h).unwrap();
        let d = multiset_distance(e.eigenvalues(), &conj_all(e.eigenvalues())).unwrap();
        // eigenvalues of non-normal matrices can be ill-conditioned near coalescence
        prop_assert!(d <= 1e-6 * h.norm(), "distance {d}");
        let part = classify_reality(e.eigenvalues(), DEFAULT_REALITY_EPS);
        if d <= 1e-10 * h.norm() {
            let part = part.unwrap();
            prop_assert_eq!(part.real.len() + 2 * part.pairs.len(), e.len());
        }
    }

    #[test]
    fn grid_spectrum_is_closed_under_conjugation(
        w in perturbation(),
        lambda in 0.0f64..2.0,
        n in 5usize..12,
    ) {
        let params = ModelParams::anisotropic(w, lambda).unwrap();
        let grid = Grid2D::new(4.0, n).unwrap();
        let e = Discretization::Grid(grid).solve(&params, false).unwrap();
        let d = multiset_distance(e.eigenvalues(), &conj_all(e.eigenvalues())).unwrap();
        prop_assert!(d <= 1e-6 * e.matrix_norm(), "distance {d}");
    }

    #[test]
    fn blocked_and_full_spectra_agree((params, n) in model()) {
        let basis = ProductBasis::for_model(n, &params).unwrap();
        let h = build_h(&params, &basis).unwrap();
        let full = eigenvalues_general(&h).unwrap();
        let blocked = Discretization::Basis(basis).solve(&params, false).unwrap();
        let d = multiset_distance(full.eigenvalues(), blocked.eigenvalues()).unwrap();
        let conditioned = multiset_distance(full.eigenvalues(), &conj_all(full.eigenvalues()))
            .unwrap() <= 1e-12 * h.norm();
        if conditioned {
            prop_assert!(d <= 1e-10 * h.norm(), "distance {d}");
        } else {
            prop_assert!(d <= 1e-6 * h.norm(), "distance {d}");
        }
    }

    #[test]
    fn trace_is_sum_of_eigenvalues((params, n) in model()) {
        let basis = ProductBasis::for_model(n, &params).unwrap();
        let h = build_h(&params, &basis).unwrap();
        let e = eigenvalues_general(&h).unwrap();
        let tr: c64 = (0..h.dim()).map(|i| h.get(i, i)).sum();
        let s: c64 = e.eigenvalues().iter().sum();
        prop_assert!((tr - s).norm() <= 1e-10 * h.norm() * h.dim() as f64);
    }

    #[test]
    fn hamiltonian_is_complex_symmetric((params, n) in model()) {
        let basis = ProductBasis::for_model(n, &params).unwrap();
        let h = build_h(&params, &basis).unwrap();
        prop_assert!(h.is_complex_symmetric());
        let w = build_w(params.perturbation, &basis).unwrap();
        let h0 = build_h0(&params, &basis).unwrap();
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                let z = h.get(i, j);
                prop_assert_eq!(z.re, h0.get(i, j));
                prop_assert_eq!(z.im, params.lambda * w.get(i, j));
            }
        }
    }

    #[test]
    fn scaling_identity_one_dimensional(alpha in 0.05f64..20.0, size in 20usize..40) {
        // with β ∝ α^(1/6) the matrices are exactly proportional
        let unit = Basis1D::for_quartic(size, 1.0).unwrap();
        let scaled = Basis1D::for_quartic(size, alpha).unwrap();
        let a = nhspec::eigensolver::eigenvalues_symmetric(&quartic_hamiltonian(&unit, 1.0).unwrap()).unwrap();
        let b = nhspec::eigensolver::eigenvalues_symmetric(&quartic_hamiltonian(&scaled, alpha).unwrap()).unwrap();
        let f = alpha.cbrt();
        for k in 0..5 {
            let (ea, eb) = (a.eigenvalues()[k].re, b.eigenvalues()[k].re);
            prop_assert!((eb - f * ea).abs() <= 1e-13 * eb.abs(), "{k}: {eb} vs {}", f * ea);
        }
    }

    #[test]
    fn position_powers_obey_parity(power in 1u32..5, size in 2usize..16, scale in 0.3f64..3.0) {
        let b = Basis1D::new(size, scale).unwrap();
        let m = position_power_matrix(&b, power).unwrap();
        for i in 0..size {
            for j in 0..size {
                let forbidden = (i + j + power as usize) % 2 == 1 || i.abs_diff(j) > power as usize;
                if forbidden {
                    prop_assert_eq!(m.get(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn perturbation_obeys_axis_parities(w in perturbation(), n in 2usize..8) {
        let params = ModelParams::anisotropic(w, 1.0).unwrap();
        let basis = ProductBasis::for_model(n, &params).unwrap();
        let m = build_w(w, &basis).unwrap();
        for i in 0..basis.dim() {
            for j in 0..basis.dim() {
                let (a, b) = (basis.index_of(i), basis.index_of(j));
                let px = sign(a.nx + b.nx);
                let py = sign(a.ny + b.ny);
                // ⟨a|W|b⟩ can be non-zero only if some monomial has matching parities
                let allowed = w.monomials().iter().any(|&(p, q)| {
                    px == sign(p as usize) && py == sign(q as usize)
                });
                if !allowed {
                    prop_assert_eq!(m.get(i, j), 0.0, "{} {}", a, b);
                }
            }
        }
    }

    #[test]
    fn grid_h0_commutes_with_axis_parities(n in 3usize..9, ax in 0.5f64..2.0, ay in 0.5f64..2.0) {
        let params = ModelParams::new(ax, ay, Perturbation::Xy, 0.0).unwrap();
        let grid = Grid2D::new(3.0, n).unwrap();
        let h0 = Discretization::Grid(grid).h0(&params).unwrap().to_complex();
        let v: Vec<c64> = (0..grid.dim()).map(|k| c64::new((k as f64).sin(), (k as f64 * 0.37).cos())).collect();
        for op in [SpatialOp::Inversion, SpatialOp::ReflectX, SpatialOp::ReflectY] {
            let g = grid.action(op).unwrap();
            let lhs = matvec(h0.matrix(), &g.apply(&v));
            let rhs = g.apply(&matvec(h0.matrix(), &v));
            let err: f64 = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            prop_assert!(err <= 1e-12 * h0.norm());
        }
        let square = ModelParams::new(ax, ax, Perturbation::Xy, 0.0).unwrap();
        let h0 = Discretization::Grid(grid).h0(&square).unwrap().to_complex();
        for op in [SpatialOp::Swap, SpatialOp::AntiSwap, SpatialOp::Rotate90] {
            let g = grid.action(op).unwrap();
            let lhs = matvec(h0.matrix(), &g.apply(&v));
            let rhs = g.apply(&matvec(h0.matrix(), &v));
            let err: f64 = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            prop_assert!(err <= 1e-12 * h0.norm());
        }
    }

    #[test]
    fn eigenvalues_are_ordered((params, n) in model()) {
        let basis = ProductBasis::for_model(n, &params).unwrap();
        let e = Discretization::Basis(basis).solve(&params, false).unwrap();
        for w in e.eigenvalues().windows(2) {
            prop_assert!(w[0].re < w[1].re || (w[0].re == w[1].re && w[0].im <= w[1].im));
        }
    }
}

#[test]
fn solve_is_deterministic() {
    let params = ModelParams::anisotropic(Perturbation::X2yPlusXy2, 0.7).unwrap();
    let basis = ProductBasis::for_model(10, &params).unwrap();
    let a = Discretization::Basis(basis).solve(&params, true).unwrap();
    let b = Discretization::Basis(basis).solve(&params, true).unwrap();
    assert_eq!(a.eigenvalues(), b.eigenvalues());
}
