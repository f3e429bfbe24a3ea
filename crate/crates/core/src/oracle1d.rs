//! Extended-precision levels of the one-dimensional quartic oscillator
//! `−½ψ'' + αx⁴ψ = Eψ`, and their separable sums.
//!
//! Each level is found by shooting from the origin with an even or odd
//! start and bisecting on the node count of the solution on `(0, X]`.
//! The integrator is a fixed-order Taylor series in double-double
//! arithmetic (~32 significant digits). Bisecting on the node count
//! converges to the eigenvalue of the problem with a wall at `X`; `X` is
//! placed where the WKB decay action reaches a prescribed value, so the
//! wall shift `~exp(−2S)` is far below the working precision.
//!
//! A level is accepted when two runs with different wall positions, step
//! sizes and series orders agree to the requested number of digits.

use std::cmp::Ordering;
use std::fmt;

pub use twofloat::TwoFloat;

use crate::error::{invalid, Error, Result};
use crate::hamiltonian2d::BasisIndex;
use crate::symmetry::{basis_irrep, Group, IrrepLabel};

/// Largest certifiable precision.
pub const MAX_DIGITS: u32 = 18;

#[derive(Debug, Clone, Copy)]
struct Refinement {
    /// Decay action beyond the turning point up to the wall.
    action: f64,
    /// Largest `h · √(2 max V)` over the integration interval.
    step_factor: f64,
    order: usize,
}

const COARSE: Refinement = Refinement {
    action: 42.0,
    step_factor: 1.5,
    order: 40,
};

const FINE: Refinement = Refinement {
    action: 50.0,
    step_factor: 0.75,
    order: 34,
};

#[derive(Debug, Clone, Copy)]
pub struct Level1D {
    pub n: usize,
    pub alpha: TwoFloat,
    pub energy: TwoFloat,
    /// Relative difference between the two refinements.
    pub certified_error: f64,
}

impl Level1D {
    pub fn energy_f64(&self) -> f64 {
        self.energy.hi() + self.energy.lo()
    }
}

/// `√2` in double-double.
pub fn sqrt2() -> TwoFloat {
    TwoFloat::from(2.0).sqrt()
}

fn dd(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

/// Quotient with two Newton corrections on top of `twofloat`'s
/// multiplication; the crate's own division loses the low word.
fn div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q0 = a.hi() / b.hi();
    let mut q = dd(q0);
    for _ in 0..2 {
        let r = a - b * q;
        q += r.hi() / b.hi();
    }
    q
}

/// Number of sign changes of the shooting solution sampled at the step
/// endpoints on `(0, wall]`.
fn node_count(
    alpha: TwoFloat,
    energy: TwoFloat,
    odd: bool,
    wall_steps: usize,
    h: f64,
    order: usize,
) -> usize {
    let two_alpha = alpha * 2.0;
    let two_e = energy * 2.0;
    let hd = dd(h);
    let (mut psi, mut dpsi) = if odd {
        (dd(0.0), dd(1.0))
    } else {
        (dd(1.0), dd(0.0))
    };
    let mut positive = true;
    let mut nodes = 0;
    let mut d = vec![dd(0.0); order + 1];
    let inv: Vec<TwoFloat> = (0..order)
        .map(|k| div(dd(1.0), dd(((k + 1) * (k + 2)) as f64)))
        .collect();
    for step in 0..wall_steps {
        // steps are dyadic, so x0 is exact
        let x0 = dd(step as f64 * h);
        let x2 = x0 * x0;
        let x3 = x2 * x0;
        let h2 = hd * hd;
        let u = [
            (two_alpha * x2 * x2 - two_e) * h2,
            two_alpha * x3 * 4.0 * h2 * hd,
            two_alpha * x2 * 6.0 * h2 * h2,
            two_alpha * x0 * 4.0 * h2 * h2 * hd,
            two_alpha * h2 * h2 * h2,
        ];
        d[0] = psi;
        d[1] = dpsi * hd;
        for k in 0..order - 1 {
            let mut acc = dd(0.0);
            for (j, &uj) in u.iter().enumerate() {
                if j > k {
                    break;
                }
                acc += uj * d[k - j];
            }
            d[k + 2] = acc * inv[k];
        }
        let mut value = dd(0.0);
        let mut slope = dd(0.0);
        for k in (0..=order).rev() {
            value += d[k];
            if k > 0 {
                slope += d[k] * (k as f64);
            }
        }
        psi = value;
        dpsi = slope * (1.0 / h);
        let now_positive = psi.hi() > 0.0 || (psi.hi() == 0.0 && positive);
        if now_positive != positive {
            nodes += 1;
            positive = now_positive;
        }
    }
    nodes
}

/// WKB action `∫ √(2(αx⁴ − E)) dx` from the turning point to `x`.
fn decay_action(alpha: f64, energy: f64, x: f64) -> f64 {
    let turning = (energy.max(0.0) / alpha).powf(0.25);
    if x <= turning {
        return 0.0;
    }
    let n = 400;
    let dx = (x - turning) / n as f64;
    (0..n)
        .map(|i| {
            let s = turning + (i as f64 + 0.5) * dx;
            (2.0 * (alpha * s.powi(4) - energy)).max(0.0).sqrt() * dx
        })
        .sum()
}

struct Integration {
    steps: usize,
    h: f64,
    order: usize,
}

fn integration_for(alpha: f64, energy: f64, cfg: Refinement) -> Integration {
    let mut wall = (energy.max(0.0) / alpha).powf(0.25) + 0.5;
    while decay_action(alpha, energy, wall) < cfg.action {
        wall += 0.125;
    }
    let kappa = (2.0 * alpha * wall.powi(4) + 2.0 * energy.abs()).sqrt();
    // keep at least ~6 samples per half wavelength for node counting
    let wavelength_limit = std::f64::consts::PI / (6.0 * (2.0 * energy.abs() + 1.0).sqrt());
    let mut h = 0.5;
    while h * kappa > cfg.step_factor || h > wavelength_limit {
        h *= 0.5;
    }
    Integration {
        steps: (wall / h).ceil() as usize,
        h,
        order: cfg.order,
    }
}

/// WKB estimate from `∫ √(2(E − αx⁴)) dx = π(n + ½)` between the turning
/// points: `E = α^(1/3) (π(n + ½) / (√2 I))^(4/3)` with `I = ∫₋₁¹ √(1 − t⁴) dt`.
fn wkb_estimate(alpha: f64, n: usize) -> f64 {
    const I: f64 = 1.748_038_6;
    let base = std::f64::consts::PI * (n as f64 + 0.5) / (std::f64::consts::SQRT_2 * I);
    alpha.cbrt() * base.powf(4.0 / 3.0)
}

fn solve_level(alpha: TwoFloat, n: usize, cfg: Refinement) -> Result<TwoFloat> {
    let a = alpha.hi();
    let odd = n % 2 == 1;
    let k = n / 2;
    let mut hi = 1.5 * wkb_estimate(a, n) + 1.0;
    let mut integ = integration_for(a, hi, cfg);
    let count = |e: TwoFloat, it: &Integration| node_count(alpha, e, odd, it.steps, it.h, it.order);
    let mut tries = 0;
    while count(dd(hi), &integ) <= k {
        hi *= 2.0;
        integ = integration_for(a, hi, cfg);
        tries += 1;
        if tries > 20 {
            return Err(Error::SolverFailure(format!(
                "could not bracket quartic level {n}"
            )));
        }
    }
    let mut lo = dd(0.0);
    let mut hi = dd(hi);
    for _ in 0..120 {
        let mid = (lo + hi) * 0.5;
        if mid == lo || mid == hi {
            break;
        }
        if count(mid, &integ) > k {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo).hi() <= 1e-31 * hi.hi() {
            break;
        }
    }
    Ok((lo + hi) * 0.5)
}

/// The `count` lowest levels of `−½d²/dx² + αx⁴`, each certified to
/// `target_digits` significant digits.
pub fn quartic_levels(alpha: TwoFloat, count: usize, target_digits: u32) -> Result<Vec<Level1D>> {
    if count == 0 {
        return Err(invalid("level count must be at least 1"));
    }
    if target_digits == 0 || target_digits > MAX_DIGITS {
        return Err(invalid(format!(
            "target digits must lie in 1..={MAX_DIGITS}, got {target_digits}"
        )));
    }
    if !(alpha.hi().is_finite() && alpha.hi() > 0.0) {
        return Err(invalid(format!(
            "quartic coefficient must be positive, got {}",
            alpha.hi()
        )));
    }
    let limit = 10f64.powi(-(target_digits as i32));
    let mut out: Vec<Level1D> = Vec::with_capacity(count);
    for n in 0..count {
        let coarse = solve_level(alpha, n, COARSE)?;
        let fine = solve_level(alpha, n, FINE)?;
        let rel = (coarse - fine).abs().hi() / fine.hi();
        if rel > limit {
            return Err(Error::PrecisionNotReached {
                achieved: -rel.log10(),
                target: target_digits,
            });
        }
        if let Some(prev) = out.last() {
            if fine <= prev.energy {
                return Err(Error::InternalConsistency(format!(
                    "quartic level {n} not above level {}",
                    n - 1
                )));
            }
        }
        out.push(Level1D {
            n,
            alpha,
            energy: fine,
            certified_error: rel,
        });
    }
    Ok(out)
}

/// One row of the separable `λ = 0` spectrum.
#[derive(Debug, Clone, Copy)]
pub struct SeparableLevel {
    pub index: BasisIndex,
    pub energy: TwoFloat,
    pub ci: IrrepLabel,
    pub d2h: IrrepLabel,
}

impl SeparableLevel {
    pub fn energy_f64(&self) -> f64 {
        self.energy.hi() + self.energy.lo()
    }
}

/// The `count` smallest sums `E_nx(αx) + E_ny(αy)` in ascending order.
pub fn compose_separable(
    x_levels: &[Level1D],
    y_levels: &[Level1D],
    count: usize,
) -> Result<Vec<SeparableLevel>> {
    if x_levels.is_empty() || y_levels.is_empty() {
        return Err(Error::NeedMoreLevels("no 1D levels supplied".into()));
    }
    let mut sums = Vec::with_capacity(x_levels.len() * y_levels.len());
    for ly in y_levels {
        for lx in x_levels {
            sums.push((BasisIndex::new(lx.n, ly.n), lx.energy + ly.energy));
        }
    }
    sums.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal));
    if sums.len() < count {
        return Err(Error::NeedMoreLevels(format!(
            "{} sums available, {count} requested",
            sums.len()
        )));
    }
    // every sum not formed here exceeds one of these
    let bound_x = x_levels.last().unwrap().energy + y_levels[0].energy;
    let bound_y = y_levels.last().unwrap().energy + x_levels[0].energy;
    let bound = if bound_x < bound_y { bound_x } else { bound_y };
    if count > 0 && sums[count - 1].1 > bound {
        return Err(Error::NeedMoreLevels(format!(
            "level {count} at {} lies above the completeness bound {}",
            format_significant(sums[count - 1].1, 12),
            format_significant(bound, 12)
        )));
    }
    sums.into_iter()
        .take(count)
        .map(|(index, energy)| {
            Ok(SeparableLevel {
                index,
                energy,
                ci: basis_irrep(index, Group::Ci)?,
                d2h: basis_irrep(index, Group::D2h)?,
            })
        })
        .collect()
}

/// Positive double-double rounded to `digits` significant decimal digits.
pub fn format_significant(value: TwoFloat, digits: u32) -> String {
    assert!((1..=30).contains(&digits));
    if value.hi() == 0.0 {
        return "0".into();
    }
    let negative = value.hi() < 0.0;
    let v = value.abs();
    let mut exp10 = v.hi().log10().floor() as i32;
    let (mantissa, exp10) = loop {
        let shift = digits as i32 - 1 - exp10;
        let scaled = v * pow10(shift);
        let r = scaled.round();
        let m = r.hi() as i128 + r.lo() as i128;
        let upper = 10i128.pow(digits);
        if m >= upper {
            exp10 += 1;
        } else if m < upper / 10 {
            exp10 -= 1;
        } else {
            break (m, exp10);
        }
    };
    let s = mantissa.to_string();
    let point = exp10 + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), s)
    } else if point as usize >= s.len() {
        format!("{}{}", s, "0".repeat(point as usize - s.len()))
    } else {
        format!("{}.{}", &s[..point as usize], &s[point as usize..])
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn pow10(k: i32) -> TwoFloat {
    let mut p = dd(1.0);
    for _ in 0..k.unsigned_abs() {
        p *= 10.0;
    }
    if k < 0 {
        div(dd(1.0), p)
    } else {
        p
    }
}

/// Parse a plain decimal literal such as `"1.4177754838502863327"`
/// without going through `f64`.
pub fn parse_decimal(text: &str) -> Result<TwoFloat> {
    let t = text.trim();
    let (negative, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    let digits: String = format!("{int}{frac}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.len() > 30 {
        return Err(invalid(format!("not a plain decimal literal: {text:?}")));
    }
    // split into two chunks that each fit an f64 exactly
    let split = digits.len().saturating_sub(15);
    let high: u64 = if split == 0 {
        0
    } else {
        digits[..split].parse().unwrap()
    };
    let low: u64 = digits[split..].parse().unwrap();
    let value = dd(high as f64) * pow10((digits.len() - split) as i32) + dd(low as f64);
    let value = div(value, pow10(frac.len() as i32));
    Ok(if negative { -value } else { value })
}

/// Display adaptor printing 18 significant digits.
pub struct Significant(pub TwoFloat);

impl fmt::Display for Significant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_significant(self.0, MAX_DIGITS))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_round_trips() {
        let v = parse_decimal("1.4177754838502863327").unwrap();
        assert_eq!(format_significant(v, 18), "1.41777548385028633");
        assert_eq!(format_significant(v, 20), "1.4177754838502863327");
        assert_eq!(
            format_significant(parse_decimal("12.166833711560609078").unwrap(), 20),
            "12.166833711560609078"
        );
        assert_eq!(format_significant(dd(0.5), 3), "0.500");
        assert_eq!(format_significant(dd(9.9999), 3), "10.0");
        assert_eq!(format_significant(dd(-2.0), 2), "-2.0");
        assert!(parse_decimal("1e5").is_err());
    }

    #[test]
    fn harmonic_like_ordering() {
        let levels = quartic_levels(dd(1.0), 3, 16).unwrap();
        assert!(levels[0].energy < levels[1].energy && levels[1].energy < levels[2].energy);
        assert!((levels[0].energy_f64() - 0.667_986_259_155_777_1).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(quartic_levels(dd(1.0), 0, 10).is_err());
        assert!(quartic_levels(dd(1.0), 1, 19).is_err());
        assert!(quartic_levels(dd(-1.0), 1, 10).is_err());
    }

    #[test]
    fn completeness_check() {
        let x = quartic_levels(dd(1.0), 2, 12).unwrap();
        let y = quartic_levels(sqrt2(), 2, 12).unwrap();
        let rows = compose_separable(&x, &y, 2).unwrap();
        assert_eq!(rows[0].index, BasisIndex::new(0, 0));
        assert_eq!(rows[1].index, BasisIndex::new(1, 0));
        // (0,1) is third, but (2,0) cannot be excluded from two levels alone
        assert!(matches!(
            compose_separable(&x, &y, 3),
            Err(Error::NeedMoreLevels(_))
        ));
    }
}
