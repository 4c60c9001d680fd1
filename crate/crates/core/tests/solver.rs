mod common;

use common::{scenario, window};
use lambda_mb::algebra::{outer, Vector3};
use lambda_mb::analytic::{evaluate, solution_grid, Scenario};
use lambda_mb::mbsolver::{propagate, propagate_with, Boundary, GridSpec};
use lambda_mb::model::{background_fields, FieldPair};
use lambda_mb::verify::{density_audit, RelativeFieldError};

fn two_soliton_error(n_tau: usize, n_zeta: usize) -> f64 {
    let sp = scenario(Scenario::TwoSoliton);
    let g = window(n_tau, n_zeta);
    let taus = g.taus();
    let init: Vec<FieldPair> = taus.iter().map(|&t| evaluate(&sp, 0.0, t).unwrap().0).collect();
    let rule = |z: f64| evaluate(&sp, z, g.tau_min).unwrap().1.density().unwrap();
    let mut err = RelativeFieldError::default();
    propagate_with(&init, &Boundary::Rule(&rule), init[0], &sp.p, &g, |i, f, _| {
        let z = g.zeta(i);
        let exact: Vec<FieldPair> = taus.iter().map(|&t| evaluate(&sp, z, t).unwrap().0).collect();
        err.update(f, &exact);
        Ok(())
    })
    .unwrap();
    err.value()
}

#[test]
fn numeric_march_tracks_two_soliton_at_second_order() {
    let coarse = two_soliton_error(501, 201);
    let fine = two_soliton_error(1001, 401);
    let ratio = coarse / fine;
    assert!(fine < 1e-2, "{fine}");
    assert!((3.4..4.6).contains(&ratio), "{ratio}");
}

#[test]
fn dark_medium_is_transparent_to_the_fast_soliton() {
    let sp = scenario(Scenario::Fast);
    let g = window(401, 81);
    let init: Vec<FieldPair> = g.taus().iter().map(|&t| evaluate(&sp, 0.0, t).unwrap().0).collect();
    let dark = outer(&Vector3::basis(1), &Vector3::basis(1));
    // the dressed pulse sits on the background flipped by a constant phase
    let edge = init[0];
    assert!((edge.omega_a + background_fields(&sp.p, 0.0).omega_a).norm() < 1e-12);
    let sol = propagate(&init, &Boundary::Fixed(dark), edge, &sp.p, &g).unwrap();
    for (n, rho) in sol.rho.iter().enumerate() {
        assert!(rho[(0, 0)].re.abs() < 1e-8 && rho[(2, 2)].re.abs() < 1e-8, "node {n}");
    }
    let out = sol.field_row(g.n_zeta - 1);
    for (a, b) in out.iter().zip(&init) {
        assert!(a.max_abs_diff(b) < 1e-6);
    }
}

#[test]
fn numeric_grids_stay_physical_and_reproducible() {
    let sp = scenario(Scenario::Slow);
    let g = GridSpec::new((-10.0, 10.0, 401), (0.0, 2.0, 41)).unwrap();
    let exact = solution_grid(&sp, g).unwrap();
    let init = exact.field_row(0).to_vec();
    let rule = |z: f64| evaluate(&sp, z, g.tau_min).unwrap().1.density().unwrap();
    let run = || propagate(&init, &Boundary::Rule(&rule), init[0], &sp.p, &g).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    let audit = density_audit(&a);
    assert!(audit.trace < 1e-9 && audit.hermiticity == 0.0 && audit.negativity < 1e-8);
}
