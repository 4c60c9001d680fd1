//! Closed-form solutions on top of the background field.
//!
//! All exponentials are evaluated relative to the largest one that appears
//! in a denominator, so the evaluators stay finite for any `(zeta, tau)`.

use crate::algebra::{Matrix3, Vector3, C64, I, ONE, ZERO};
use crate::darboux::{
    dress_rank_one, map_constants, unmap_constants, DressConstants, Seed, SeedMedium,
    SolitonConstants,
};
use crate::error::{Error, Result};
use crate::mbsolver::{GridSpec, SolutionGrid};
use crate::model::{AtomState, FieldPair, LambdaParams, SpectralData};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    TwoSoliton,
    Slow,
    Fast,
    ZeroBackground,
    Exulton,
    ExultonK,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::TwoSoliton,
        Scenario::Slow,
        Scenario::Fast,
        Scenario::ZeroBackground,
        Scenario::Exulton,
        Scenario::ExultonK,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::TwoSoliton => "two_soliton",
            Scenario::Slow => "slow",
            Scenario::Fast => "fast",
            Scenario::ZeroBackground => "zero_background",
            Scenario::Exulton => "exulton",
            Scenario::ExultonK => "exulton_k",
        }
    }

    pub fn from_name(name: &str) -> Option<Scenario> {
        Scenario::ALL.iter().copied().find(|s| s.name() == name)
    }
}

/// Either form of the integration constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Constants {
    Soliton(SolitonConstants),
    Dress(DressConstants),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScenarioParams {
    pub p: LambdaParams,
    pub s: SpectralData,
    pub constants: Constants,
    pub scenario: Scenario,
}

/// Intensities and level populations at one point.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Observables {
    pub ia: f64,
    pub ib: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

fn guard(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::ParameterGuard(msg()))
    }
}

impl ScenarioParams {
    pub fn new(p: LambdaParams, s: SpectralData, constants: Constants, scenario: Scenario) -> Result<Self> {
        let sp = ScenarioParams {
            p,
            s,
            constants,
            scenario,
        };
        sp.validate()?;
        Ok(sp)
    }

    /// Scenario-specific regime guards.
    pub fn validate(&self) -> Result<()> {
        self.p.validate()?;
        let (p, e) = (&self.p, self.s.eps0);
        let plain = || p.k == 0.0 && p.eta == 0.0;
        match self.scenario {
            Scenario::TwoSoliton | Scenario::Fast => {
                guard(e > p.omega0 && p.omega0 > 0.0, || {
                    format!("{} needs eps0 > omega0 > 0", self.scenario.name())
                })?;
                guard(plain(), || "closed forms assume k = 0, eta = 0".into())
            }
            Scenario::Slow => {
                guard(e >= p.omega0 && p.omega0 > 0.0, || "slow needs eps0 >= omega0 > 0".into())?;
                guard(plain(), || "closed forms assume k = 0, eta = 0".into())
            }
            Scenario::ZeroBackground => {
                guard(p.omega0 == 0.0, || "zero_background needs omega0 = 0".into())?;
                guard(plain(), || "closed forms assume k = 0, eta = 0".into())?;
                guard(matches!(self.constants, Constants::Dress(_)), || {
                    "zero_background takes c-constants".into()
                })
            }
            Scenario::Exulton | Scenario::ExultonK => {
                guard(p.omega0 > 0.0 && (e - p.omega0).abs() < crate::darboux::DEGENERACY_TOL, || {
                    format!("{} needs eps0 = omega0 > 0", self.scenario.name())
                })?;
                guard(p.eta == 0.0, || "closed forms assume eta = 0".into())?;
                if self.scenario == Scenario::Exulton {
                    guard(p.k == 0.0, || "exulton needs k = 0 (see exulton_k)".into())?;
                }
                guard(matches!(self.constants, Constants::Dress(_)), || {
                    format!("{} takes c-constants", self.scenario.name())
                })
            }
        }
    }

    /// Soliton constants, converting from c-form if necessary.
    pub fn soliton_constants(&self) -> Result<SolitonConstants> {
        match self.constants {
            Constants::Soliton(a) => Ok(a),
            Constants::Dress(c) => unmap_constants(&c, &self.s, self.p.omega0),
        }
    }

    /// Dressing constants, mapping from a-form if necessary. The slow and
    /// fast reductions drop the other soliton's constant; `exulton_k`
    /// always dresses with `c = (0, 0, 1)`.
    pub fn dress_constants(&self) -> Result<DressConstants> {
        if self.scenario == Scenario::ExultonK {
            return DressConstants::new(0.0, 0.0, 1.0);
        }
        let c = match self.constants {
            Constants::Dress(c) => match self.scenario {
                Scenario::Slow => DressConstants { c3: 0.0, ..c },
                Scenario::Fast => DressConstants { c1: 0.0, ..c },
                _ => c,
            },
            Constants::Soliton(a) => {
                let a = match self.scenario {
                    Scenario::Slow => SolitonConstants { a3: 0.0, ..a },
                    Scenario::Fast => SolitonConstants { a1: 0.0, ..a },
                    _ => a,
                };
                map_constants(&a, &self.s, self.p.omega0)?
            }
        };
        DressConstants::new(c.c1, c.c2, c.c3)
    }

    fn dress_c(&self) -> Result<DressConstants> {
        match self.constants {
            Constants::Dress(c) => Ok(c),
            Constants::Soliton(_) => Err(Error::ParameterGuard(format!(
                "{} takes c-constants",
                self.scenario.name()
            ))),
        }
    }
}

fn r_of(p: &LambdaParams, eps0: f64) -> f64 {
    (p.delta * p.delta + eps0 * eps0).sqrt()
}

/// Largest exponent among terms with non-zero coefficient.
fn top(terms: &[(f64, f64)]) -> f64 {
    let m = terms
        .iter()
        .filter(|(c, _)| *c != 0.0)
        .map(|(_, x)| *x)
        .fold(f64::NEG_INFINITY, f64::max);
    if m.is_finite() {
        m
    } else {
        0.0
    }
}

fn cexp(re: f64, im: f64) -> C64 {
    C64::from_polar(re.exp(), im)
}

/// Two-soliton (slow + fast) solution on the background `omega0`.
pub fn two_soliton(sp: &ScenarioParams, zeta: f64, tau: f64) -> Result<(FieldPair, AtomState)> {
    ScenarioParams { scenario: Scenario::TwoSoliton, ..*sp }.validate()?;
    let a = sp.soliton_constants()?;
    let (p, e) = (&sp.p, sp.s.eps0);
    let om = p.omega0;
    let s = sp.s.s();
    let r = r_of(p, e);
    let r2 = r * r;
    let x1 = tau * s;
    let x2 = -tau * s;
    let x4 = -tau * e + zeta * p.nu0 * e / r2;
    let c1 = a.a3 * a.a3;
    let c2 = a.a2 * a.a2;
    let c3 = 2.0 * a.a2 * a.a3 * om / e;
    let c4 = a.a1 * a.a1;
    let m = top(&[(c1, x1), (c2, x2), (c3, 0.0), (c4, x4)]);
    let den = c1 * (x1 - m).exp() + c2 * (x2 - m).exp() + c3 * (-m).exp() + c4 * (x4 - m).exp();
    let num = om * c1 * (x1 - m).exp() + om * c2 * (x2 - m).exp() + 2.0 * a.a2 * a.a3 * e * (-m).exp();
    let omega_a = C64::new(om - 2.0 * num / den, 0.0);
    let theta = zeta * p.nu0 * p.delta / (2.0 * r2);
    let fast = a.a3 * (e + s).sqrt() * (0.5 * (x4 + x1) - m).exp();
    let slow = a.a2 * (e - s).sqrt() * (0.5 * (x4 + x2) - m).exp();
    let pre = C64::new(0.0, -2.0 * (2.0 * e).sqrt() * a.a1) * C64::from_polar(1.0, theta);
    let omega_b = pre * ((fast + slow) / den);

    let mix = a.a2 / (e - s).sqrt() * (0.5 * (x4 + x2) - m).exp()
        + a.a3 / (e + s).sqrt() * (0.5 * (x4 + x1) - m).exp();
    let comp1 = pre * I * om * (mix / (2.0 * r * den));
    let comp2 = (C64::new(p.delta, e) - I * (2.0 * e * c4 * (x4 - m).exp() / den)) / r;
    let comp3 = omega_b / (2.0 * r);
    Ok((
        FieldPair::new(omega_a, omega_b),
        AtomState::Pure(Vector3::new(comp1, comp2, comp3)),
    ))
}

/// Phase of the slow soliton.
pub fn slow_phase(p: &LambdaParams, s: &SpectralData, a1: f64, zeta: f64, tau: f64) -> f64 {
    let e = s.eps0;
    let r2 = p.delta * p.delta + e * e;
    zeta * e * p.nu0 / (2.0 * r2) - 0.5 * tau * (e - s.s()) + a1.abs().ln()
}

/// Slow soliton: kink in channel a, bright pulse in channel b.
pub fn slow_soliton(sp: &ScenarioParams, zeta: f64, tau: f64) -> Result<(FieldPair, AtomState)> {
    ScenarioParams { scenario: Scenario::Slow, ..*sp }.validate()?;
    let a = sp.soliton_constants()?;
    let (p, e) = (&sp.p, sp.s.eps0);
    let om = p.omega0;
    let s = sp.s.s();
    let r = r_of(p, e);
    let phi = slow_phase(p, &sp.s, a.a1 / a.a2, zeta, tau);
    let omega_a = C64::new(om * phi.tanh(), 0.0);
    let theta = zeta * p.nu0 * p.delta / (2.0 * r * r);
    let amp = (2.0 * e * (e - s)).sqrt() / phi.cosh();
    let omega_b = C64::new(0.0, -amp) * C64::from_polar(1.0, theta);
    let comp1 = I * ((e + s) / (e - s)).sqrt() * omega_b / (2.0 * r);
    let comp2 = (p.delta - I * e * omega_a / om) / r;
    let comp3 = omega_b / (2.0 * r);
    Ok((
        FieldPair::new(omega_a, omega_b),
        AtomState::Pure(Vector3::new(comp1, comp2, comp3)),
    ))
}

/// `omega0^2 (delta^2 + eps0^2) / (2 eps0^2 nu0)`, in units of `c`.
pub fn slow_group_velocity(p: &LambdaParams, s: &SpectralData) -> f64 {
    let e = s.eps0;
    p.omega0 * p.omega0 * (p.delta * p.delta + e * e) / (2.0 * e * e * p.nu0)
}

/// Fast soliton: a dip on the background travelling at the speed of light.
pub fn fast_soliton(sp: &ScenarioParams, tau: f64) -> Result<FieldPair> {
    ScenarioParams { scenario: Scenario::Fast, ..*sp }.validate()?;
    let a = sp.soliton_constants()?;
    let (om, e) = (sp.p.omega0, sp.s.eps0);
    let ratio = a.a3 / a.a2;
    let sgn = if ratio < 0.0 { -1.0 } else { 1.0 };
    let phi = tau * sp.s.s() + ratio.abs().ln();
    // (cosh + A) / (cosh + B) written with sech so that it stays finite
    let sech = 1.0 / phi.cosh();
    let q = (1.0 + sgn * e / om * sech) / (1.0 + sgn * om / e * sech);
    Ok(FieldPair::new(C64::new(om * (1.0 - 2.0 * q), 0.0), ZERO))
}

/// Solution on a vanishing background (stored polarization).
pub fn zero_background(sp: &ScenarioParams, zeta: f64, tau: f64) -> Result<(FieldPair, AtomState)> {
    ScenarioParams { scenario: Scenario::ZeroBackground, ..*sp }.validate()?;
    let c = sp.dress_c()?;
    if c.c3 == 0.0 {
        return Err(Error::DegenerateConstants("c3 = 0 leaves the slow phase undefined".into()));
    }
    let (p, e) = (&sp.p, sp.s.eps0);
    let r = r_of(p, e);
    let r2 = r * r;
    let q = zeta * e * p.nu0 / (2.0 * r2);
    let (k1, k2, k3) = (c.c1 * c.c1, c.c2 * c.c2, c.c3 * c.c3);
    let xf = 2.0 * e * tau - q;
    let m = top(&[(k2, q), (k3, -q), (k1, xf)]);
    let den = k2 * (q - m).exp() + k3 * (-q - m).exp() + k1 * (xf - m).exp();
    // exponent i zeta nu0 / (2 (delta + i eps0)); its real part equals q
    let eb = I * zeta * p.nu0 / (C64::new(p.delta, e) * 2.0);
    // exponent i nu0 zeta / (2 (lambda0 - delta))
    let ef = I * zeta * p.nu0 / (C64::new(-p.delta, e) * 2.0);
    let amp = C64::new(0.0, -4.0 * e) / den;
    let omega_a = if c.c1 == 0.0 {
        ZERO
    } else {
        amp * c.c1 * c.c3 * (e * tau - q - m).exp()
    };
    let omega_b = if c.c1 == 0.0 {
        ZERO
    } else {
        amp * c.c1 * c.c2 * (eb + e * tau - q - m).exp()
    };
    let comp1 = amp * c.c2 * c.c3 * (eb - q - m).exp() / (2.0 * r);
    let comp2 = C64::new(p.delta, e) / r + amp * k2 * (eb + ef - q - m).exp() / (2.0 * r);
    let comp3 = omega_b / (2.0 * r);
    Ok((
        FieldPair::new(omega_a, omega_b),
        AtomState::Pure(Vector3::new(comp1, comp2, comp3)),
    ))
}

/// Phase of the slow component at `eps0 = omega0` (no constant offset).
pub fn exulton_phase(p: &LambdaParams, zeta: f64, tau: f64) -> f64 {
    let om = p.omega0;
    let r2 = p.delta * p.delta + om * om;
    zeta * om * p.nu0 / (2.0 * r2) - 0.5 * tau * om
}

/// Rational (exulton) solution at `eps0 = omega0`, `k = 0`.
pub fn exulton(sp: &ScenarioParams, zeta: f64, tau: f64) -> Result<(FieldPair, AtomState)> {
    ScenarioParams { scenario: Scenario::Exulton, ..*sp }.validate()?;
    let c = sp.dress_c()?;
    let p = &sp.p;
    let om = p.omega0;
    let r = r_of(p, om);
    let r2 = r * r;
    let phi = exulton_phase(p, zeta, tau);
    let lin = c.c2 + c.c3 * tau * om;
    let quad = lin * lin + c.c3 * c.c3;
    let quad_minus = lin * lin - 3.0 * c.c3 * c.c3;
    let k1 = c.c1 * c.c1;
    let m = top(&[(k1, phi), (quad, -phi)]);
    let den = k1 * (phi - m).exp() + 2.0 * quad * (-phi - m).exp();
    let omega_a = C64::new(om * (k1 * (phi - m).exp() - 2.0 * quad_minus * (-phi - m).exp()) / den, 0.0);
    let theta = zeta * p.nu0 * p.delta / (2.0 * r2);
    // omega_b / (c2 + c3 + c3 tau omega0)
    let reduced = if c.c1 == 0.0 {
        ZERO
    } else {
        C64::new(0.0, -4.0 * om * c.c1) * cexp(-m, theta) / den
    };
    let omega_b = reduced * (c.c2 + c.c3 * (1.0 + tau * om));
    let ef = I * zeta * p.nu0 / (C64::new(-p.delta, om) * 2.0);
    let comp1 = reduced * I * (c.c2 - c.c3 + c.c3 * tau * om) / (2.0 * r);
    let tail = if c.c1 == 0.0 {
        ZERO
    } else {
        C64::new(0.0, -4.0 * om * k1) * (C64::new(-m - 0.5 * om * tau, theta) + ef).exp() / den
    };
    let comp2 = C64::new(p.delta, om) / r + tail / (2.0 * r);
    let comp3 = omega_b / (2.0 * r);
    Ok((
        FieldPair::new(omega_a, omega_b),
        AtomState::Pure(Vector3::new(comp1, comp2, comp3)),
    ))
}

/// Exulton on a background with `k != 0`, constants `c1 = c2 = 0`.
pub fn exulton_k(sp: &ScenarioParams, zeta: f64, tau: f64) -> Result<FieldPair> {
    ScenarioParams { scenario: Scenario::ExultonK, ..*sp }.validate()?;
    let p = &sp.p;
    let (om, d, kz) = (p.omega0, p.delta, p.k * zeta);
    let f1 = I * d * (1.0 + tau * om) + om * (1.0 - I * kz + tau * om);
    let f2 = I * d * (1.0 - tau * om) + om * (-1.0 + I * kz + tau * om);
    let den = d * d + (1.0 + (kz - d * tau).powi(2)) * om * om + tau * tau * om.powi(4);
    let omega_a = C64::from_polar(om, kz) * (ONE - f1 * f2 * (2.0 / den));
    Ok(FieldPair::new(omega_a, ZERO))
}

/// Medium state accompanying [`exulton_k`]: the seed medium conjugated by
/// the rank-one dressing matrix built on
/// `psi3 = (i (omega0 w - 1) e^{-ikz/2}, 0, (omega0 w + 1) e^{ikz/2})`,
/// `w = tau + k zeta / (lambda0 - delta)`.
pub fn exulton_k_density(sp: &ScenarioParams, zeta: f64, tau: f64) -> Result<Matrix3> {
    ScenarioParams { scenario: Scenario::ExultonK, ..*sp }.validate()?;
    let p = &sp.p;
    let om = p.omega0;
    let l0 = C64::new(0.0, om);
    let w = C64::new(tau, 0.0) + p.k * zeta / (l0 - p.delta);
    let ph = C64::from_polar(1.0, -0.5 * p.k * zeta);
    let psi3 = Vector3::new(I * (w * om - 1.0) * ph, ZERO, (w * om + 1.0) * ph.conj());
    let seed = Seed::new(p, &sp.s, SeedMedium::Positive)?;
    let (_, rho) = dress_rank_one(&seed.hamiltonian(zeta), &seed.density(zeta), &psi3, l0, p.delta)?;
    Ok(rho)
}

/// Dispatches on the scenario tag.
pub fn evaluate(sp: &ScenarioParams, zeta: f64, tau: f64) -> Result<(FieldPair, AtomState)> {
    match sp.scenario {
        Scenario::TwoSoliton => two_soliton(sp, zeta, tau),
        Scenario::Slow => slow_soliton(sp, zeta, tau),
        Scenario::Fast => Ok((
            fast_soliton(sp, tau)?,
            AtomState::Pure(Vector3::basis(1)),
        )),
        Scenario::ZeroBackground => zero_background(sp, zeta, tau),
        Scenario::Exulton => exulton(sp, zeta, tau),
        Scenario::ExultonK => Ok((
            exulton_k(sp, zeta, tau)?,
            AtomState::Density(exulton_k_density(sp, zeta, tau)?),
        )),
    }
}

/// Closed-form solution sampled on a grid.
pub fn solution_grid(sp: &ScenarioParams, grid: GridSpec) -> Result<SolutionGrid> {
    sp.validate()?;
    let pure = sp.scenario != Scenario::ExultonK;
    SolutionGrid::from_fn(grid, pure, |z, t| {
        let (f, st) = evaluate(sp, z, t)?;
        Ok((f, st.density()?))
    })
}

/// `I_a = |Omega_a|^2`, `I_b = |Omega_b|^2`, `P_i = rho_ii`.
pub fn intensities_and_populations(f: &FieldPair, st: &AtomState) -> Result<Observables> {
    let rho = st.density()?;
    Ok(observables(f, &rho))
}

pub fn observables(f: &FieldPair, rho: &Matrix3) -> Observables {
    Observables {
        ia: f.omega_a.norm_sqr(),
        ib: f.omega_b.norm_sqr(),
        p1: rho[(0, 0)].re,
        p2: rho[(1, 1)].re,
        p3: rho[(2, 2)].re,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darboux::DressingEngine;
    use crate::model::density_from_pure;

    fn fig2(a1: f64, a3: f64, scenario: Scenario) -> ScenarioParams {
        ScenarioParams::new(
            LambdaParams::default(),
            SpectralData::new(2.0, 1.0).unwrap(),
            Constants::Soliton(SolitonConstants::new(a1, a3)),
            scenario,
        )
        .unwrap()
    }

    fn pure(st: AtomState) -> Vector3 {
        match st {
            AtomState::Pure(v) => v,
            AtomState::Density(_) => panic!("expected a pure state"),
        }
    }

    fn grid() -> impl Iterator<Item = (f64, f64)> {
        (0..=20).flat_map(|i| (0..=40).map(move |j| (0.4 * i as f64, -20.0 + j as f64)))
    }

    #[test]
    fn reductions() {
        let slow = fig2(0.7, 0.0, Scenario::Slow);
        let two = fig2(0.7, 0.0, Scenario::TwoSoliton);
        let fast = fig2(0.0, 1.3, Scenario::Fast);
        let two_f = fig2(0.0, 1.3, Scenario::TwoSoliton);
        for (z, t) in grid() {
            let (a, sa) = two_soliton(&two, z, t).unwrap();
            let (b, sb) = slow_soliton(&slow, z, t).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12, "{z} {t}");
            assert!((pure(sa) - pure(sb)).max_abs() < 1e-12);
            let (a, _) = two_soliton(&two_f, z, t).unwrap();
            let b = fast_soliton(&fast, t).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12);
            assert_eq!(a.omega_b, ZERO);
        }
    }

    #[test]
    fn two_soliton_matches_dressing() {
        let sp = fig2(1.0, 1.0, Scenario::TwoSoliton);
        let eng = DressingEngine::new(&sp.p, &sp.s, &sp.dress_constants().unwrap(), SeedMedium::Positive).unwrap();
        for (z, t) in grid() {
            let (f, st) = two_soliton(&sp, z, t).unwrap();
            let (g, rho) = eng.fields(z, t).unwrap();
            assert!(f.max_abs_diff(&g) < 1e-12, "{z} {t}: {f:?} {g:?}");
            let v = pure(st);
            assert!((v.norm() - 1.0).abs() < 1e-12);
            assert!((density_from_pure(&v).unwrap() - rho).max_abs() < 1e-12);
        }
    }

    #[test]
    fn slow_examples() {
        let sp = fig2(1.0, 0.0, Scenario::Slow);
        let (f, _) = slow_soliton(&sp, 0.0, 0.0).unwrap();
        assert!(f.omega_a.norm() < 1e-15);
        assert!((f.omega_b.norm() - (4.0 * (2.0 - 3f64.sqrt())).sqrt()).abs() < 1e-12);
        assert!((f.omega_b.norm() - 1.035276).abs() < 1e-6);
        let (f, _) = slow_soliton(&sp, 0.0, 1e3).unwrap();
        assert!((f.omega_a.re + 1.0).abs() < 1e-15 && f.omega_b.norm() < 1e-15);
        for (z, t) in grid() {
            let (_, st) = slow_soliton(&sp, z, t).unwrap();
            assert!((pure(st).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn slow_phase_matches_two_soliton_exponentials() {
        let sp = fig2(0.8, 0.0, Scenario::Slow);
        let (p, s) = (sp.p, sp.s);
        for (z, t) in [(0.0, 0.0), (1.0, -2.0), (3.0, 4.0)] {
            let phi = slow_phase(&p, &s, 0.8, z, t);
            let e = s.eps0;
            let ratio = 0.64 * (-t * e + z * p.nu0 * e / (e * e)).exp() / (-t * s.s()).exp();
            assert!(((2.0 * phi).exp() - ratio).abs() < 1e-12 * ratio.max(1.0));
        }
    }

    #[test]
    fn group_velocity_examples() {
        let s = SpectralData::new(2.0, 1.0).unwrap();
        let p = LambdaParams::default();
        assert!((slow_group_velocity(&p, &s) - 1.0 / 6.0).abs() < 1e-15);
        let zero = LambdaParams { omega0: 0.0, ..p };
        assert_eq!(slow_group_velocity(&zero, &s), 0.0);
        let double = LambdaParams { omega0: 2.0, ..p };
        assert!((slow_group_velocity(&double, &s) - 4.0 / 6.0).abs() < 1e-15);
        let weak = LambdaParams { omega0: 0.2, ..p };
        assert!((slow_group_velocity(&weak, &s) - 1.0 / 150.0).abs() < 1e-15);
    }

    #[test]
    fn fast_examples() {
        let sp = fig2(0.0, 1.0, Scenario::Fast);
        let f = fast_soliton(&sp, 0.0).unwrap();
        assert!((f.omega_a.re + 3.0).abs() < 1e-14);
        for t in [-1e3, 1e3] {
            assert!((fast_soliton(&sp, t).unwrap().omega_a.re + 1.0).abs() < 1e-14);
        }
        let neg = fig2(0.0, -1.0, Scenario::TwoSoliton);
        let negf = ScenarioParams { scenario: Scenario::Fast, ..neg };
        for t in [-3.0, 0.0, 0.7] {
            let a = two_soliton(&neg, 0.0, t).unwrap().0;
            let b = fast_soliton(&negf, t).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }

    fn fig3(c: (f64, f64, f64)) -> ScenarioParams {
        ScenarioParams::new(
            LambdaParams::new(3.0, 0.0, 0.0).unwrap(),
            SpectralData::new(2.0, 0.0).unwrap(),
            Constants::Dress(DressConstants::new(c.0, c.1, c.2).unwrap()),
            Scenario::ZeroBackground,
        )
        .unwrap()
    }

    #[test]
    fn zero_background_examples() {
        let (f, _) = zero_background(&fig3((1.0, 1.0, 1.0)), 0.0, 0.0).unwrap();
        assert!((f.omega_a - C64::new(0.0, -8.0 / 3.0)).norm() < 1e-14);
        assert!((f.omega_b.norm() / f.omega_a.norm() - 1.0).abs() < 1e-14);
        let (f, st) = zero_background(&fig3((0.0, 1.0, 1.0)), 1.0, 2.0).unwrap();
        assert_eq!(f, FieldPair::zero());
        assert!((pure(st).norm() - 1.0).abs() < 1e-12);
        let bad = ScenarioParams {
            constants: Constants::Dress(DressConstants { c1: 1.0, c2: 1.0, c3: 0.0 }),
            ..fig3((1.0, 1.0, 1.0))
        };
        assert_eq!(zero_background(&bad, 0.0, 0.0).unwrap_err().name(), "DegenerateConstants");
    }

    #[test]
    fn zero_background_matches_dressing() {
        for c in [(1.0, 1.0, 1.0), (0.0, 1.0, 1.0), (0.7, 1.2, -0.5)] {
            let sp = ScenarioParams {
                p: LambdaParams { delta: 0.4, ..fig3(c).p },
                ..fig3(c)
            };
            let eng = DressingEngine::new(&sp.p, &sp.s, &sp.dress_constants().unwrap(), SeedMedium::Positive).unwrap();
            for (z, t) in grid() {
                let (f, st) = zero_background(&sp, z, t).unwrap();
                let (g, rho) = eng.fields(z, t).unwrap();
                assert!(f.max_abs_diff(&g) < 1e-12, "{c:?} {z} {t}");
                let v = pure(st);
                assert!((v.norm() - 1.0).abs() < 1e-12);
                assert!((density_from_pure(&v).unwrap() - rho).max_abs() < 1e-12);
            }
        }
    }

    fn fig4(c: (f64, f64, f64), delta: f64) -> ScenarioParams {
        ScenarioParams::new(
            LambdaParams::new(3.0, delta, 1.0).unwrap(),
            SpectralData::new(1.0, 1.0).unwrap(),
            Constants::Dress(DressConstants::new(c.0, c.1, c.2).unwrap()),
            Scenario::Exulton,
        )
        .unwrap()
    }

    #[test]
    fn exulton_matches_dressing() {
        for c in [(1.0, 1.0, 1.0), (0.0, 1.0, 1.0), (0.9, 1.0, -1.2), (1.0, 1.0, 0.0)] {
            let sp = fig4(c, 0.4);
            let eng = DressingEngine::new(&sp.p, &sp.s, &sp.dress_constants().unwrap(), SeedMedium::Positive).unwrap();
            for (z, t) in grid() {
                let (f, st) = exulton(&sp, z, t).unwrap();
                let (g, rho) = eng.fields(z, t).unwrap();
                assert!(f.max_abs_diff(&g) < 1e-11, "{c:?} {z} {t}: {f:?} {g:?}");
                let v = pure(st);
                assert!((v.norm() - 1.0).abs() < 1e-11);
                assert!((density_from_pure(&v).unwrap() - rho).max_abs() < 1e-11);
            }
        }
    }

    #[test]
    fn exulton_without_c3_is_slow_soliton() {
        let (c1, c2) = (0.9, 1.3);
        let ex = fig4((c1, c2, 0.0), 0.0);
        let slow = ScenarioParams::new(
            ex.p,
            ex.s,
            Constants::Soliton(SolitonConstants { a1: c1 / (2f64.sqrt() * c2), a2: 1.0, a3: 0.0 }),
            Scenario::Slow,
        )
        .unwrap();
        for (z, t) in grid() {
            let (a, _) = exulton(&ex, z, t).unwrap();
            let (b, _) = slow_soliton(&slow, z, t).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }

    #[test]
    fn exulton_asymptotics() {
        let sp = fig4((1.0, 1.0, 1.0), 0.0);
        let (lo, _) = exulton(&sp, 0.0, -200.0).unwrap();
        let (hi, _) = exulton(&sp, 0.0, 200.0).unwrap();
        assert!((lo.omega_a.re - 1.0).abs() < 1e-10);
        assert!((hi.omega_a.re.abs() - 1.0).abs() < 1e-3);
    }

    fn exk(k: f64, delta: f64) -> ScenarioParams {
        ScenarioParams::new(
            LambdaParams::new(3.0, delta, 1.0).unwrap().with_k(k).unwrap(),
            SpectralData::new(1.0, 1.0).unwrap(),
            Constants::Dress(DressConstants::new(0.0, 0.0, 1.0).unwrap()),
            Scenario::ExultonK,
        )
        .unwrap()
    }

    #[test]
    fn exulton_k_examples() {
        let f = exulton_k(&exk(0.2, 0.0), 0.0, 0.0).unwrap();
        assert!((f.omega_a - C64::new(3.0, 0.0)).norm() < 1e-14);
        for t in [-1e4, 1e4] {
            let f = exulton_k(&exk(0.2, 0.3), 2.0, t).unwrap();
            assert!((f.omega_a.norm() - 1.0).abs() < 1e-3);
        }
        for t in [-2.0, 0.5, 3.0] {
            let a = exulton_k(&exk(0.7, 0.3), 0.0, t).unwrap();
            let b = exulton_k(&exk(0.0, 0.3), 0.0, t).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-15);
        }
    }

    #[test]
    fn exulton_k_matches_dressing() {
        for (k, d) in [(0.2, 0.0), (0.2, 0.4), (-0.3, 0.4)] {
            let sp = exk(k, d);
            let eng = DressingEngine::new(&sp.p, &sp.s, &sp.dress_constants().unwrap(), SeedMedium::Positive).unwrap();
            for (z, t) in grid() {
                let f = exulton_k(&sp, z, t).unwrap();
                let (g, rho) = eng.fields(z, t).unwrap();
                assert!(f.max_abs_diff(&g) < 1e-12, "{k} {z} {t}: {f:?} {g:?}");
                let r = exulton_k_density(&sp, z, t).unwrap();
                assert!((r - rho).max_abs() < 1e-12);
                assert!(r.hermiticity_defect() < 1e-12);
                assert!((r.trace() - ONE).norm() < 1e-12);
                assert!(r.hermitian_eigenvalues()[0] > -1e-12);
            }
        }
    }

    #[test]
    fn observables_examples() {
        let obs = intensities_and_populations(&FieldPair::real(1.0, 0.0), &AtomState::Pure(Vector3::basis(1))).unwrap();
        assert_eq!(obs, Observables { ia: 1.0, ib: 0.0, p1: 0.0, p2: 1.0, p3: 0.0 });
        // slow soliton centre, eps0 >> omega0: P3 scales with the background intensity
        let sp_small = ScenarioParams::new(
            LambdaParams::new(3.0, 0.0, 0.2).unwrap(),
            SpectralData::new(2.0, 0.2).unwrap(),
            Constants::Soliton(SolitonConstants::new(1.0, 0.0)),
            Scenario::Slow,
        )
        .unwrap();
        let (f, st) = slow_soliton(&sp_small, 0.0, 0.0).unwrap();
        let o = intensities_and_populations(&f, &st).unwrap();
        assert!(o.p3 < 0.01 && (o.p3 / 0.04 - 1.0 / 16.0).abs() < 1e-3);
        assert!((o.p1 + o.p2 + o.p3 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn guards() {
        let mut sp = fig2(1.0, 1.0, Scenario::TwoSoliton);
        sp.p.k = 0.1;
        assert_eq!(two_soliton(&sp, 0.0, 0.0).unwrap_err().name(), "ParameterGuard");
        let ex = ScenarioParams { scenario: Scenario::Exulton, ..fig2(1.0, 1.0, Scenario::TwoSoliton) };
        assert_eq!(exulton(&ex, 0.0, 0.0).unwrap_err().name(), "ParameterGuard");
        assert_eq!(Scenario::from_name("exulton_k"), Some(Scenario::ExultonK));
    }
}
