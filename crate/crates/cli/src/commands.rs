//! The five subcommands. Each builds a [`Report`]; [`execute`] writes it.

use std::io::Write;
use std::path::PathBuf;

use nhspec::eigensolver::{reality_scale, GENERAL_RESIDUAL_TOL};
use nhspec::oracle1d::{compose_separable, format_significant, quartic_levels, sqrt2, TwoFloat};
use nhspec::pseudospectral::compare_spectra;
use nhspec::sweep::{run_sweep, Sweep};
use nhspec::symmetry::{c4v_degenerate_pairs, state_irrep};
use nhspec::{c64, Discretization, Error, Group, ModelParams};

use crate::config::{Command, RunConfig};
use crate::output::{float, write_file, Cell, Check, Report, Table};
use crate::CliError;

/// Absolute agreement asked of both discretizations against the oracle
/// at zero coupling.
pub const ORACLE_TOL: f64 = 1e-10;

/// Purity a C₂ᵥ label must reach in `c4v-demo`.
const LABEL_PURITY: f64 = 0.99;

fn oracle_alpha(a: f64) -> TwoFloat {
    // the double nearest √2 stands for √2 itself
    if a == std::f64::consts::SQRT_2 {
        sqrt2()
    } else {
        TwoFloat::from(a)
    }
}

/// The `count` lowest separable levels, asking the 1D oracle for more
/// levels per axis until the set is provably complete.
pub fn oracle_levels(
    alpha_x: f64,
    alpha_y: f64,
    count: usize,
    digits: u32,
) -> Result<Vec<nhspec::oracle1d::SeparableLevel>, CliError> {
    let mut per_axis = ((2 * count) as f64).sqrt().ceil() as usize + 1;
    loop {
        let x = quartic_levels(oracle_alpha(alpha_x), per_axis, digits)?;
        let y = quartic_levels(oracle_alpha(alpha_y), per_axis, digits)?;
        match compose_separable(&x, &y, count) {
            Err(Error::NeedMoreLevels(_)) if per_axis < 4 * count + 4 => per_axis += 2,
            other => return Ok(other?),
        }
    }
}

fn oracle_provenance(cfg: &RunConfig, digits: u32) -> String {
    format!(
        "oracle1d taylor-shooting double-double digits={digits} alpha_x={} alpha_y={}",
        float(cfg.alpha_x),
        float(cfg.alpha_y)
    )
}

pub fn cmd_table0(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let mut report = Report::new(cfg);
    let levels = oracle_levels(cfg.alpha_x, cfg.alpha_y, cfg.levels, cfg.digits)?;
    let params = cfg.model(0.0)?;
    let disc = Discretization::Basis(cfg.product_basis()?);
    let spec = disc.solve(&params, true)?;
    if spec.len() < cfg.levels {
        return Err(CliError::Config(format!(
            "basis holds {} states, {} rows requested",
            spec.len(),
            cfg.levels
        )));
    }
    let parents = disc.parents(&params, &spec, cfg.levels)?;
    report.provenance.push(oracle_provenance(cfg, cfg.digits));
    report.provenance.push(disc.describe());

    let mut table = Table::new(
        "table0",
        vec![
            "nx",
            "ny",
            "energy",
            "ci",
            "d2h",
            "energy_dm",
            "abs_diff",
            "dm_parent",
            "dm_d2h",
            "dm_purity",
        ],
    );
    let mut worst = 0.0f64;
    let mut labels_agree = true;
    for (k, lvl) in levels.iter().enumerate() {
        let dm = spec.eigenvalues()[k];
        let diff = (lvl.energy - TwoFloat::from(dm.re))
            .hi()
            .abs()
            .max(dm.im.abs());
        worst = worst.max(diff);
        let v = spec.eigenvector(k).expect("vectors were requested");
        let label = state_irrep(&v, &disc, Group::D2h, 0.99)?;
        labels_agree &= parents[k].0 == lvl.index && label.label == lvl.d2h && label.definite;
        table.push(vec![
            lvl.index.nx.into(),
            lvl.index.ny.into(),
            Cell::Exact(format_significant(lvl.energy, cfg.digits)),
            lvl.ci.to_string().into(),
            lvl.d2h.to_string().into(),
            dm.re.into(),
            diff.into(),
            parents[k].0.to_string().into(),
            label.label.to_string().into(),
            label.purity.into(),
        ]);
    }
    report.tables.push(table);
    report
        .checks
        .push(Check::at_most("max_abs_diff", worst, cfg.tol));
    report
        .checks
        .push(Check::flag("dm_labels_match_oracle", labels_agree));
    Ok(report)
}

fn closest_pair_to(values: &[c64], target: f64) -> (usize, usize) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        (values[a].re - target)
            .abs()
            .total_cmp(&(values[b].re - target).abs())
    });
    (idx[0].min(idx[1]), idx[0].max(idx[1]))
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let mut report = Report::new(cfg);
    let basis = Discretization::Basis(cfg.product_basis()?);
    let grid = Discretization::Grid(cfg.grid()?);
    report.provenance.push(basis.describe());
    report.provenance.push(grid.describe());
    let k = cfg.levels;
    let needs_oracle = cfg.lambdas.contains(&0.0);
    let oracle = if needs_oracle {
        report.provenance.push(oracle_provenance(cfg, 16));
        Some(oracle_levels(cfg.alpha_x, cfg.alpha_y, k, 16)?)
    } else {
        None
    };
    let mut table = Table::new(
        "validate",
        vec![
            "lambda",
            "level",
            "dm_re",
            "dm_im",
            "dvr_re",
            "dvr_im",
            "distance",
            "oracle",
            "dm_oracle_diff",
            "dvr_oracle_diff",
        ],
    );
    for &lambda in &cfg.lambdas {
        let params = cfg.model(lambda)?;
        let a = basis.solve(&params, false)?;
        let b = grid.solve(&params, false)?;
        // the tolerance is applied below so that failures still report values
        let cv = compare_spectra(lambda, &a, &b, k, f64::MAX)?;
        let at_zero = oracle.as_ref().filter(|_| lambda == 0.0);
        let (mut worst_dm, mut worst_dvr) = (0.0f64, 0.0f64);
        for (i, (&x, &j)) in cv.basis_values.iter().zip(&cv.matching).enumerate() {
            let y = cv.grid_values[j];
            let mut row = vec![
                Cell::Float(lambda),
                i.into(),
                x.re.into(),
                x.im.into(),
                y.re.into(),
                y.im.into(),
                (x - y).norm().into(),
            ];
            match at_zero {
                Some(levels) => {
                    let e = levels[i].energy;
                    let dm = (e - TwoFloat::from(x.re)).hi().abs().max(x.im.abs());
                    let dvr = (e - TwoFloat::from(y.re)).hi().abs().max(y.im.abs());
                    worst_dm = worst_dm.max(dm);
                    worst_dvr = worst_dvr.max(dvr);
                    row.extend([
                        Cell::Exact(format_significant(e, 16)),
                        dm.into(),
                        dvr.into(),
                    ]);
                }
                None => row.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
            }
            table.push(row);
        }
        report.checks.push(Check::at_most(
            format!("max_distance[lambda={}]", float(lambda)),
            cv.max_distance,
            cfg.tol,
        ));
        if at_zero.is_some() {
            report.checks.push(Check::at_most(
                "dm_vs_oracle[lambda=0]",
                worst_dm,
                ORACLE_TOL,
            ));
            report.checks.push(Check::at_most(
                "dvr_vs_oracle[lambda=0]",
                worst_dvr,
                ORACLE_TOL,
            ));
        }
    }
    report.tables.push(table);
    Ok(report)
}

/// Largest `|Im E| / max(1, |Re E|)` on a list of values.
fn worst_relative_imag(values: &[c64]) -> f64 {
    values
        .iter()
        .map(|z| z.im.abs() / reality_scale(*z))
        .fold(0.0, f64::max)
}

pub fn cmd_c4v_demo(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    if cfg.alpha_x != cfg.alpha_y {
        return Err(CliError::Config(format!(
            "c4v-demo needs alpha-x = alpha-y, got {} and {}",
            cfg.alpha_x, cfg.alpha_y
        )));
    }
    let mut report = Report::new(cfg);
    let basis = cfg.product_basis()?;
    let disc = Discretization::Basis(basis);
    report.provenance.push(disc.describe());
    let square = cfg.model(0.0)?;
    let spec0 = disc.solve(&square, true)?;
    let doublets = c4v_degenerate_pairs(&spec0.truncated(cfg.levels), &basis, 1e-8)?;
    let perturbed = square.with_lambda(cfg.lambda)?;
    let spec = disc.solve(&perturbed, true)?;

    let mut table = Table::new(
        "c4v",
        vec![
            "case", "parents", "e0", "member", "lambda", "re", "im", "label", "purity",
        ],
    );
    report
        .checks
        .push(Check::flag("e_doublets_found", !doublets.is_empty()));
    for d in &doublets {
        let parents = format!("{}/{}", d.parents.0, d.parents.1);
        let (i, j) = closest_pair_to(spec.eigenvalues(), d.energy);
        for (m, k) in [i, j].into_iter().enumerate() {
            let z = spec.eigenvalues()[k];
            let v = spec.eigenvector(k).expect("vectors were requested");
            let l = state_irrep(&v, &disc, Group::C2v, LABEL_PURITY)?;
            table.push(vec![
                "square".into(),
                parents.clone().into(),
                d.energy.into(),
                m.into(),
                cfg.lambda.into(),
                z.re.into(),
                z.im.into(),
                l.label.to_string().into(),
                l.purity.into(),
            ]);
            report.checks.push(Check::above(
                format!("abs_im[{parents} member {m}]"),
                z.im.abs(),
                cfg.tol,
            ));
        }
    }

    // the same coupling on the anisotropic oscillator
    let aniso = ModelParams::new(
        cfg.alpha_x,
        cfg.alpha_x * std::f64::consts::SQRT_2,
        cfg.perturbation,
        cfg.lambda,
    )?;
    let adisc = Discretization::Basis(nhspec::ProductBasis::for_model(cfg.basis_size, &aniso)?);
    report
        .provenance
        .push(format!("anisotropic {}", adisc.describe()));
    let aspec = adisc.solve(&aniso, false)?;
    let low = &aspec.eigenvalues()[..cfg.levels.min(aspec.len())];
    for (k, z) in low.iter().enumerate() {
        table.push(vec![
            "anisotropic".into(),
            Cell::Empty,
            Cell::Empty,
            k.into(),
            cfg.lambda.into(),
            z.re.into(),
            z.im.into(),
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    report.checks.push(Check::at_most(
        "anisotropic_max_rel_im",
        worst_relative_imag(low),
        cfg.reality_eps,
    ));
    report.tables.push(table);
    Ok(report)
}

fn sweep_for(cfg: &RunConfig) -> Result<(Sweep, Discretization), CliError> {
    let disc = cfg.discretization()?;
    let params = cfg.model(0.0)?;
    Ok((run_sweep(&cfg.sweep_config()?, &params, &disc)?, disc))
}

/// Tables and checks shared by `sweep` and `ep`.
fn transition_tables(sweep: &Sweep, report: &mut Report) -> Result<(), CliError> {
    let pairs = sweep.all_transitions()?;
    let mut summary = Table::new(
        "pairs",
        vec![
            "branch_a",
            "branch_b",
            "ancestry_a",
            "ancestry_b",
            "transitions",
            "first_ep",
            "max_imag_before_first",
            "max_conjugate_mismatch",
        ],
    );
    let mut eps = Table::new(
        "exceptional_points",
        vec![
            "branch_a",
            "branch_b",
            "lambda",
            "lambda_low",
            "lambda_high",
            "width",
            "gap",
            "breaks_reality",
        ],
    );
    let mut worst_width = 0.0f64;
    let mut worst_mismatch = 0.0f64;
    for p in &pairs {
        let (a, b) = p.branch_ids;
        let mismatch = sweep.max_conjugate_mismatch(p.branch_ids);
        let scale = sweep.branches[a]
            .levels
            .iter()
            .map(|l| reality_scale(l.energy))
            .fold(1.0, f64::max);
        worst_mismatch = worst_mismatch.max(mismatch / scale);
        summary.push(vec![
            a.into(),
            b.into(),
            sweep.branches[a].ancestry().into(),
            sweep.branches[b].ancestry().into(),
            p.count.count.into(),
            p.count
                .transitions
                .first()
                .map_or(Cell::Empty, |e| e.lambda().into()),
            sweep.max_imag_before_first_transition(p.branch_ids).into(),
            mismatch.into(),
        ]);
        for e in &p.count.transitions {
            worst_width = worst_width.max(e.width());
            eps.push(vec![
                a.into(),
                b.into(),
                e.lambda().into(),
                e.lambda_low.into(),
                e.lambda_high.into(),
                e.width().into(),
                e.gap_at_bracket.into(),
                e.breaks_reality.into(),
            ]);
        }
        report.notes.push(format!(
            "pair ({a},{b}) [{} | {}] transitions={}",
            sweep.branches[a].ancestry(),
            sweep.branches[b].ancestry(),
            p.count.count
        ));
    }
    report.checks.push(Check::at_most(
        "ep_bracket_width",
        worst_width,
        sweep.config.ep_tol,
    ));
    report.checks.push(Check::at_most(
        "conjugate_mismatch_rel",
        worst_mismatch,
        10.0 * sweep.config.reality_eps,
    ));
    report.tables.push(summary);
    report.tables.push(eps);
    Ok(())
}

pub fn cmd_ep(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let mut report = Report::new(cfg);
    let (sweep, disc) = sweep_for(cfg)?;
    report.provenance.push(disc.describe());
    transition_tables(&sweep, &mut report)?;
    // only the exceptional points are emitted
    report.tables.retain(|t| t.name == "exceptional_points");
    Ok(report)
}

/// Full sweep report. Branch tables are named `branch_NN`.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let mut report = Report::new(cfg);
    let (sweep, disc) = sweep_for(cfg)?;
    report.provenance.push(disc.describe());
    for b in &sweep.branches {
        let mut t = Table::new(
            format!("branch_{:02}", b.id),
            vec![
                "lambda",
                "re",
                "im",
                "ancestry",
                "ci",
                "purity",
                "overlap_prev",
                "residual",
            ],
        );
        for l in &b.levels {
            t.push(vec![
                l.lambda.into(),
                l.energy.re.into(),
                l.energy.im.into(),
                b.ancestry().into(),
                l.ci.to_string().into(),
                l.ci_purity.into(),
                l.overlap_prev.into(),
                l.residual.into(),
            ]);
        }
        report.tables.push(t);
    }
    transition_tables(&sweep, &mut report)?;
    let mut warnings = Table::new("warnings", vec!["lambda", "branch", "message"]);
    for w in &sweep.warnings {
        warnings.push(vec![
            w.lambda.into(),
            w.branch.into(),
            w.message.clone().into(),
        ]);
    }
    report.tables.push(warnings);

    let max_residual = sweep
        .branches
        .iter()
        .flat_map(|b| b.levels.iter().map(|l| l.residual))
        .fold(0.0, f64::max);
    report.checks.push(Check::at_most(
        "max_residual",
        max_residual,
        GENERAL_RESIDUAL_TOL,
    ));
    let cont = sweep.continuity();
    report.notes.push(format!(
        "continuity slope_scale={} jumps={} low_overlaps={} min_overlap={}",
        float(cont.slope_scale),
        cont.jumps.len(),
        cont.low_overlaps.len(),
        float(cont.min_overlap.iter().copied().fold(1.0, f64::min))
    ));
    report
        .notes
        .push(format!("tracking_warnings={}", sweep.warnings.len()));
    report
        .checks
        .push(Check::flag("continuity", cont.is_clean()));
    Ok(report)
}

pub fn build_report(cfg: &RunConfig) -> Result<Report, CliError> {
    match cfg.command {
        Command::Table0 => cmd_table0(cfg),
        Command::Sweep => cmd_sweep(cfg),
        Command::Ep => cmd_ep(cfg),
        Command::Validate => cmd_validate(cfg),
        Command::C4vDemo => cmd_c4v_demo(cfg),
    }
}

/// Directory used by `sweep` when `--out` is not given.
pub const DEFAULT_SWEEP_DIR: &str = "nhspec-sweep";

/// Write the sweep as one file per branch plus `summary.<ext>`.
pub fn write_sweep(report: &Report, dir: &std::path::Path) -> Result<Vec<PathBuf>, CliError> {
    let ext = report.config.format.extension();
    let mut written = Vec::new();
    let mut summary = Vec::new();
    for t in &report.tables {
        if t.name.starts_with("branch_") {
            let path = dir.join(format!("{}.{ext}", t.name));
            write_file(&path, &report.render(report.config.format, &[t])?)?;
            written.push(path);
        } else {
            summary.push(t);
        }
    }
    let path = dir.join(format!("summary.{ext}"));
    write_file(&path, &report.render(report.config.format, &summary)?)?;
    written.push(path);
    Ok(written)
}

/// Run the configured command and write its output. Returns whether every
/// check passed.
pub fn execute(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let report = build_report(cfg)?;
    if cfg.command == Command::Sweep {
        let dir = cfg
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_SWEEP_DIR));
        for p in write_sweep(&report, &dir)? {
            writeln!(stdout, "{}", p.display())?;
        }
        let status = if report.passed() { "pass" } else { "FAIL" };
        for c in &report.checks {
            writeln!(
                stdout,
                "{} {} (limit {})",
                c.name,
                float(c.value),
                float(c.limit)
            )?;
        }
        writeln!(stdout, "status {status}")?;
    } else {
        report.emit(stdout)?;
    }
    Ok(report.passed())
}
