//! Plot-ready CSV tables.

use std::fmt::Write as _;

use crate::error::Result;
use crate::flow_engine::FlowOrbitComparison;
use crate::metric_family::{big_f, f_eval, Grid, MonotoneFunctionSpec};

/// `t` on `steps` points `k / steps`, `k = 1..=steps`, and one column
/// `f_familyA(A)(t)` per value of `A`.
pub fn f_curves(values_a: &[f64], steps: usize) -> Result<String> {
    let specs: Vec<MonotoneFunctionSpec> = values_a
        .iter()
        .map(|&a| MonotoneFunctionSpec::FamilyA(a))
        .collect();
    let ts: Vec<f64> = (1..=steps).map(|k| k as f64 / steps as f64).collect();
    table("t", "f", &specs, &ts, f_eval)
}

/// `r` on the grid and one column `F_spec(r)` per spec.
pub fn big_f_curves(specs: &[MonotoneFunctionSpec], grid: &Grid) -> Result<String> {
    table("r", "F", specs, &grid.points(), big_f)
}

fn table(
    x_name: &str,
    fn_name: &str,
    specs: &[MonotoneFunctionSpec],
    xs: &[f64],
    eval: fn(&MonotoneFunctionSpec, f64) -> Result<f64>,
) -> Result<String> {
    let mut out = x_name.to_string();
    for s in specs {
        let _ = write!(out, ",{fn_name}_{}", s.name());
    }
    out.push('\n');
    for &x in xs {
        let _ = write!(out, "{x}");
        for s in specs {
            let _ = write!(out, ",{}", eval(s, x)?);
        }
        out.push('\n');
    }
    Ok(out)
}

/// Flow and orbit side by side with their Euclidean gap.
pub fn flow_orbit_overlay(c: &FlowOrbitComparison) -> String {
    let mut out = String::from("t,flow_x,flow_y,flow_z,orbit_x,orbit_y,orbit_z,gap\n");
    for i in 0..c.flow.len() {
        let f = c.flow.points[i];
        let o = c.orbit.points[i];
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            c.flow.times[i], f[0], f[1], f[2], o[0], o[1], o[2], c.gaps[i]
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow_engine::compare_flow_to_orbit;
    use crate::group_actions::AlphaAction;
    use crate::state_space::{state_from_bloch, TracelessObservable};
    use crate::vector_fields::rescaled_gradient_field;

    #[test]
    fn f_curve_shape() {
        let csv = f_curves(&[0.25, 1.0, 4.0], 200).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,f_familyA(0.25),f_familyA(1),f_familyA(4)");
        assert_eq!(lines.len(), 201);
        assert!(lines.iter().all(|l| l.split(',').count() == 4));
        assert_eq!(lines[200], "1,1,1,1");
    }

    #[test]
    fn big_f_curves_flat_for_catalog() {
        let specs: Vec<MonotoneFunctionSpec> = ["bkm", "bh", "wy", "rld"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let csv = big_f_curves(&specs, &Grid::new(0.05, 0.95, 50)).unwrap();
        let rows: Vec<Vec<f64>> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect();
        let width = |col: usize| {
            let v: Vec<f64> = rows.iter().map(|r| r[col]).collect();
            v.iter().copied().fold(f64::MIN, f64::max) - v.iter().copied().fold(f64::MAX, f64::min)
        };
        assert!(width(1) < 1e-6 && width(2) < 1e-6 && width(3) < 1e-6);
        assert!(width(4) > 0.1);
    }

    #[test]
    fn overlay_has_gap_column() {
        let a = TracelessObservable::new(0.0, 0.0, 1.0);
        let z = TracelessObservable::zero();
        let start = state_from_bloch(0.3, 0.0, 0.0).unwrap();
        let c = compare_flow_to_orbit(
            &rescaled_gradient_field(a, 1.0).unwrap(),
            &AlphaAction { big_a: 1.0 },
            (&a, &z),
            &start,
            1.0,
            100,
            1.0,
        )
        .unwrap();
        let csv = flow_orbit_overlay(&c);
        assert!(csv.starts_with("t,flow_x,flow_y,flow_z,orbit_x,orbit_y,orbit_z,gap\n"));
        assert_eq!(csv.lines().count(), 102);
    }
}
