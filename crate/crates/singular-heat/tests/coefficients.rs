use num_complex::Complex64;
use singular_heat::coeff::{base_epsilon, build_table, BoundaryConditionKind, ExponentPair};
use singular_heat::Error;
use statrs::function::beta::beta;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

struct OracleTable {
    bc: BoundaryConditionKind,
    alpha1: Complex64,
    alpha2: Complex64,
    eps: Vec<Complex64>,
}

fn parse_complex(s: &str) -> Complex64 {
    let (re, im) = s.split_once(',').unwrap();
    Complex64::new(re.parse().unwrap(), im.parse().unwrap())
}

fn oracle_tables() -> Vec<OracleTable> {
    let text = include_str!("data/coeff_oracle.txt");
    let mut out: Vec<OracleTable> = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let f: Vec<&str> = line.split_whitespace().collect();
        match f[0] {
            "robin" | "dirichlet" => out.push(OracleTable {
                bc: if f[0] == "robin" {
                    BoundaryConditionKind::Robin
                } else {
                    BoundaryConditionKind::Dirichlet
                },
                alpha1: parse_complex(f[1]),
                alpha2: parse_complex(f[2]),
                eps: Vec::new(),
            }),
            re => out
                .last_mut()
                .unwrap()
                .eps
                .push(Complex64::new(re.parse().unwrap(), f[1].parse().unwrap())),
        }
    }
    out
}

#[test]
fn tables_match_high_precision_reference() {
    let tables = oracle_tables();
    assert_eq!(tables.len(), 4);
    for o in tables {
        let t = build_table(o.bc, &ExponentPair::new(o.alpha1, o.alpha2).unwrap()).unwrap();
        assert_eq!(t.len(), o.eps.len());
        let scale = o.eps[0].norm();
        for (nu, want) in o.eps.iter().enumerate() {
            let got = t.get(nu).unwrap();
            let err = (got - want).norm() / want.norm().max(scale);
            assert!(
                err < 1e-12,
                "{:?} ({}, {}) eps{nu}: {got} vs {want}",
                o.bc,
                o.alpha1,
                o.alpha2
            );
        }
    }
}

/// Half-line Neumann heat content of pure powers, differentiated in the
/// exponents, gives ε^15 and ε^16 in closed form.
#[test]
fn robin_tail_entries_match_halfline_closed_forms() {
    for (a1, a2) in [(0.3, 0.4), (-1.3, 0.45), (0.25, 0.5), (-0.6, -0.2)] {
        let s: f64 = a1 + a2;
        let b = beta(1.0 - a1, 1.0 - a2);
        let e15 = b / (2.0 - s) / PI.sqrt() * 2f64.powf(2.0 - s) * gamma((3.0 - s) / 2.0);
        let e16 = b * beta(2.0 - s, 2.0) / PI.sqrt() * 2f64.powf(3.0 - s) * gamma((4.0 - s) / 2.0);
        let t = build_table(BoundaryConditionKind::Robin, &ExponentPair::real(a1, a2).unwrap()).unwrap();
        let r15 = (t.eps[15].re - e15).abs() / e15.abs();
        let r16 = (t.eps[16].re - e16).abs() / e16.abs();
        assert!(r15 < 1e-12 && r16 < 1e-12, "({a1}, {a2}): {r15:e} {r16:e}");
    }
}

/// Neumann minus Dirichlet leading coefficient on the half-line.
#[test]
fn base_coefficients_difference() {
    for (a1, a2) in [(0.3, 0.4), (-0.5, 0.2), (0.6, -0.9)] {
        let s: f64 = a1 + a2;
        let want = 2f64.powf(1.0 - s) / PI.sqrt() * gamma((2.0 - s) / 2.0) * gamma(1.0 - a1) * gamma(1.0 - a2)
            / gamma(2.0 - s);
        let a = ExponentPair::real(a1, a2).unwrap();
        let d = base_epsilon(BoundaryConditionKind::Robin, &a).unwrap()
            - base_epsilon(BoundaryConditionKind::Dirichlet, &a).unwrap();
        assert!(
            (d.re - want).abs() < 1e-13 * want.abs(),
            "({a1}, {a2}): {} vs {want}",
            d.re
        );
    }
}

#[test]
fn eps13_vanishes() {
    for bc in [BoundaryConditionKind::Dirichlet, BoundaryConditionKind::Robin] {
        let t = build_table(
            bc,
            &ExponentPair::new(Complex64::new(0.3, 0.2), Complex64::new(0.4, -0.1)).unwrap(),
        )
        .unwrap();
        assert_eq!(t.eps[13], Complex64::new(0.0, 0.0));
    }
}

#[test]
fn dirichlet_table_has_fifteen_entries() {
    let t = build_table(BoundaryConditionKind::Dirichlet, &ExponentPair::real(0.3, 0.4).unwrap()).unwrap();
    assert_eq!(t.len(), 15);
    assert!(t.get(15).is_none());
    assert!(t.to_json().get("eps15").is_none());
}

#[test]
fn inadmissible_pairs_are_rejected() {
    for (a1, a2) in [(0.5, 0.5), (1.0, -0.5), (0.2, 1.3), (-1.0, -1.0)] {
        assert!(
            matches!(ExponentPair::real(a1, a2), Err(Error::Admissibility(_))),
            "({a1}, {a2})"
        );
    }
}

#[test]
fn table_json_uses_re_im_pairs() {
    let t = build_table(BoundaryConditionKind::Robin, &ExponentPair::real(0.3, 0.4).unwrap()).unwrap();
    let v = t.to_json();
    let e0 = v["eps0"].as_array().unwrap();
    assert_eq!(e0.len(), 2);
    assert!((e0[0].as_f64().unwrap() + 1.2177607218320594706).abs() < 1e-14);
    assert_eq!(v["eps13"], serde_json::json!([0.0, 0.0]));
}
