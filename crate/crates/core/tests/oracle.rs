use nhspec::oracle1d::{
    compose_separable, format_significant, parse_decimal, quartic_levels, sqrt2, TwoFloat,
};
use nhspec::{BasisIndex, Error};

struct Row {
    index: BasisIndex,
    energy: &'static str,
    ci: &'static str,
    d2h: &'static str,
}

fn table() -> Vec<Row> {
    include_str!("data/table1.csv")
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&'static str> = l.split(',').collect();
            Row {
                index: BasisIndex::new(f[0].parse().unwrap(), f[1].parse().unwrap()),
                energy: f[2],
                ci: f[3],
                d2h: f[4],
            }
        })
        .collect()
}

fn rel(a: TwoFloat, b: TwoFloat) -> f64 {
    let d = a - b;
    (d.hi() / b.hi()).abs()
}

#[test]
fn reproduces_lowest_h0_levels() {
    let rows = table();
    assert_eq!(rows.len(), 23);
    let x = quartic_levels(TwoFloat::from(1.0), 8, 18).unwrap();
    let y = quartic_levels(sqrt2(), 8, 18).unwrap();
    let levels = compose_separable(&x, &y, rows.len()).unwrap();
    for (row, lvl) in rows.iter().zip(&levels) {
        assert_eq!(lvl.index, row.index);
        assert_eq!(lvl.ci.to_string(), row.ci, "{}", row.index);
        assert_eq!(lvl.d2h.to_string(), row.d2h, "{}", row.index);
        let printed = parse_decimal(row.energy).unwrap();
        let err = rel(lvl.energy, printed);
        // printed values carry 19-20 digits; ask for 17
        assert!(
            err < 1e-17,
            "{}: {} vs {}",
            row.index,
            format_significant(lvl.energy, 20),
            row.energy
        );
    }
    // E(1,0) < E(0,1)
    assert_eq!(levels[1].index, BasisIndex::new(1, 0));
    assert_eq!(levels[2].index, BasisIndex::new(0, 1));
}

fn sixth_root_of_two() -> TwoFloat {
    let mut y = TwoFloat::from(2f64.powf(1.0 / 6.0));
    for _ in 0..2 {
        let y2 = y * y;
        let y5 = y2 * y2 * y;
        let f = y5 * y - TwoFloat::from(2.0);
        y -= f / (y5 * 6.0);
    }
    y
}

#[test]
fn scaling_identity_in_double_double() {
    let r = sixth_root_of_two();
    assert!(rel(r * r * r * r * r * r, TwoFloat::from(2.0)) < 1e-30);
    let one = quartic_levels(TwoFloat::from(1.0), 4, 18).unwrap();
    let root2 = quartic_levels(sqrt2(), 4, 18).unwrap();
    for (a, b) in one.iter().zip(&root2) {
        // α = √2 ⇒ α^(1/3) = 2^(1/6)
        assert!(rel(b.energy, a.energy * r) < 1e-18, "level {}", a.n);
    }
}

#[test]
fn levels_alternate_parity_and_increase() {
    let lv = quartic_levels(TwoFloat::from(3.0), 6, 16).unwrap();
    for (k, l) in lv.iter().enumerate() {
        assert_eq!(l.n, k);
        assert!(l.certified_error < 1e-16);
    }
    for w in lv.windows(2) {
        assert!(w[0].energy < w[1].energy);
    }
}

#[test]
fn ground_state_of_unit_quartic() {
    // independent literature value for -½ψ'' + x⁴ψ
    let lv = quartic_levels(TwoFloat::from(1.0), 1, 18).unwrap();
    let e = parse_decimal("0.66798625915577710").unwrap();
    assert!(rel(lv[0].energy, e) < 1e-16);
}

#[test]
fn bad_inputs_rejected() {
    assert!(quartic_levels(TwoFloat::from(1.0), 0, 10).is_err());
    assert!(quartic_levels(TwoFloat::from(-1.0), 2, 10).is_err());
    assert!(quartic_levels(TwoFloat::from(1.0), 2, 19).is_err());
    let x = quartic_levels(TwoFloat::from(1.0), 2, 12).unwrap();
    assert!(matches!(
        compose_separable(&x, &x, 5),
        Err(Error::NeedMoreLevels(_))
    ));
}

#[test]
fn decimal_round_trip() {
    for row in table() {
        let v = parse_decimal(row.energy).unwrap();
        let digits = row.energy.replace('.', "").trim_start_matches('0').len() as u32;
        assert_eq!(format_significant(v, digits), row.energy);
    }
}
