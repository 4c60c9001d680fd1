#![allow(dead_code)]

use lambda_mb::analytic::{Constants, Scenario, ScenarioParams};
use lambda_mb::darboux::{DressConstants, DressingEngine, SeedMedium};
use lambda_mb::mbsolver::GridSpec;
use lambda_mb::model::{LambdaParams, SpectralData};

pub fn ones() -> Constants {
    Constants::Dress(DressConstants::new(1.0, 1.0, 1.0).unwrap())
}

/// Shared plotting parameters, with the background and eigenvalue varied
/// per scenario.
pub fn scenario(sc: Scenario) -> ScenarioParams {
    let (omega0, eps0, k) = match sc {
        Scenario::ZeroBackground => (0.0, 2.0, 0.0),
        Scenario::Exulton => (1.0, 1.0, 0.0),
        Scenario::ExultonK => (1.0, 1.0, 0.2),
        _ => (1.0, 2.0, 0.0),
    };
    let p = LambdaParams::new(3.0, 0.0, omega0).unwrap().with_k(k).unwrap();
    let s = SpectralData::new(eps0, omega0).unwrap();
    ScenarioParams::new(p, s, ones(), sc).unwrap()
}

pub fn engine(sp: &ScenarioParams) -> DressingEngine {
    let c = sp.dress_constants().unwrap();
    DressingEngine::new(&sp.p, &sp.s, &c, SeedMedium::Positive).unwrap()
}

pub fn window(n_tau: usize, n_zeta: usize) -> GridSpec {
    GridSpec::new((-20.0, 20.0, n_tau), (0.0, 8.0, n_zeta)).unwrap()
}
