//! Physical parameters and the dictionary between field/atom quantities and
//! 3x3 matrices: interaction Hamiltonian, Lax matrices, density matrices.

use std::f64::consts::FRAC_PI_2;

use crate::algebra::{outer, Matrix3, Vector3, C64, I, ONE, ZERO};
use crate::error::{Error, Result};

/// `D = diag(1, 1, -1)`.
pub const D: Matrix3 = Matrix3([
    [ONE, ZERO, ZERO],
    [ZERO, ONE, ZERO],
    [ZERO, ZERO, C64::new(-1.0, 0.0)],
]);

/// Tolerance on the Lambda-structure check in [`extract_fields`].
pub const STRUCTURE_TOL: f64 = 1e-8;
/// Minimum distance of a spectral parameter from the detuning.
pub const POLE_GUARD: f64 = 1e-9;

/// Model constants. `omega12_hz` and `lambda_nm` are carried along for
/// provenance only and never enter a computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaParams {
    pub nu0: f64,
    pub delta: f64,
    pub omega0: f64,
    pub eta: f64,
    pub k: f64,
    pub omega12_hz: f64,
    pub lambda_nm: f64,
}

impl Default for LambdaParams {
    fn default() -> Self {
        LambdaParams {
            nu0: 3.0,
            delta: 0.0,
            omega0: 1.0,
            eta: 0.0,
            k: 0.0,
            omega12_hz: 2.0 * std::f64::consts::PI * 1.772e9,
            lambda_nm: 589.0,
        }
    }
}

impl LambdaParams {
    pub fn new(nu0: f64, delta: f64, omega0: f64) -> Result<Self> {
        let p = LambdaParams {
            nu0,
            delta,
            omega0,
            ..Default::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        self.eta = eta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_k(mut self, k: f64) -> Result<Self> {
        self.k = k;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.nu0, self.delta, self.omega0, self.eta, self.k]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("non-finite model constant".into()));
        }
        if self.nu0 <= 0.0 {
            return Err(Error::InvalidParameter(format!("nu0 = {} must be > 0", self.nu0)));
        }
        if self.omega0 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega0 = {} must be >= 0",
                self.omega0
            )));
        }
        if !(0.0..=FRAC_PI_2).contains(&self.eta) {
            return Err(Error::InvalidParameter(format!(
                "eta = {} must lie in [0, pi/2]",
                self.eta
            )));
        }
        Ok(())
    }
}

/// Discrete eigenvalue `lambda0 = i eps0` and the root `s = sqrt(eps0^2 - omega0^2)`.
///
/// For `eps0 >= omega0` the root is real and non-negative; below that it is
/// `+i sqrt(omega0^2 - eps0^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralData {
    pub lambda0: C64,
    pub eps0: f64,
    pub root: C64,
}

impl SpectralData {
    pub fn new(eps0: f64, omega0: f64) -> Result<Self> {
        if !(eps0 > 0.0) || !eps0.is_finite() {
            return Err(Error::InvalidParameter(format!("eps0 = {eps0} must be > 0")));
        }
        let d = eps0 * eps0 - omega0 * omega0;
        let root = if d >= 0.0 {
            C64::new(d.sqrt(), 0.0)
        } else {
            C64::new(0.0, (-d).sqrt())
        };
        Ok(SpectralData {
            lambda0: C64::new(0.0, eps0),
            eps0,
            root,
        })
    }

    /// `s` as a real number; only meaningful when `eps0 >= omega0`.
    pub fn s(&self) -> f64 {
        self.root.re
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct FieldPair {
    pub omega_a: C64,
    pub omega_b: C64,
}

impl FieldPair {
    pub const fn new(omega_a: C64, omega_b: C64) -> Self {
        FieldPair { omega_a, omega_b }
    }

    pub fn real(a: f64, b: f64) -> Self {
        FieldPair::new(C64::new(a, 0.0), C64::new(b, 0.0))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_finite(&self) -> bool {
        [self.omega_a, self.omega_b]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs_diff(&self, other: &FieldPair) -> f64 {
        (self.omega_a - other.omega_a)
            .norm()
            .max((self.omega_b - other.omega_b).norm())
    }

    pub fn max_abs(&self) -> f64 {
        self.omega_a.norm().max(self.omega_b.norm())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AtomState {
    Pure(Vector3),
    Density(Matrix3),
}

impl AtomState {
    /// The density matrix, normalizing a pure state if it is within 1e-4 of unit norm.
    pub fn density(&self) -> Result<Matrix3> {
        match self {
            AtomState::Pure(v) => density_from_pure(v),
            AtomState::Density(m) => Ok(*m),
        }
    }

    pub fn is_pure_claim(&self) -> bool {
        matches!(self, AtomState::Pure(_))
    }
}

/// `-1/2 (Omega_a |3><1| + Omega_b |3><2|) + h.c.`
pub fn interaction_hamiltonian(f: FieldPair) -> Matrix3 {
    let h = -0.5;
    let a = f.omega_a * h;
    let b = f.omega_b * h;
    Matrix3([
        [ZERO, ZERO, a.conj()],
        [ZERO, ZERO, b.conj()],
        [a, b, ZERO],
    ])
}

/// Reads `(Omega_a, Omega_b) = (-2 h31, -2 h32)` after checking the Lambda structure.
pub fn extract_fields(h: &Matrix3) -> Result<FieldPair> {
    let herm = h.hermiticity_defect();
    if !(herm <= STRUCTURE_TOL) {
        return Err(Error::NotLambdaStructured(format!(
            "hermiticity defect {herm:.3e}"
        )));
    }
    for (i, j) in [(0, 0), (1, 1), (2, 2), (0, 1)] {
        let v = h[(i, j)].norm();
        if !(v <= STRUCTURE_TOL) {
            return Err(Error::NotLambdaStructured(format!(
                "entry ({},{}) = {v:.3e}",
                i + 1,
                j + 1
            )));
        }
    }
    Ok(FieldPair::new(h[(2, 0)] * -2.0, h[(2, 1)] * -2.0))
}

/// `U(lambda) = (i/2) lambda D - i h`.
pub fn lax_u(lambda: C64, h: &Matrix3) -> Matrix3 {
    D * (I * lambda * 0.5) - *h * I
}

/// `V(lambda) = i nu0 rho / (2 (lambda - delta))`.
pub fn lax_v(lambda: C64, rho: &Matrix3, p: &LambdaParams) -> Result<Matrix3> {
    let gap = lambda - p.delta;
    if gap.norm() <= POLE_GUARD {
        return Err(Error::SpectralPole {
            lambda: format!("{lambda}"),
            delta: p.delta,
        });
    }
    Ok(*rho * (I * p.nu0 / (gap * 2.0)))
}

/// `cos(eta)|2> - sin(eta)|1>`.
pub fn dark_state(eta: f64) -> AtomState {
    AtomState::Pure(Vector3::from_real(-eta.sin(), eta.cos(), 0.0))
}

/// `|psi><psi|`; states within 1e-4 of unit norm are renormalized first.
pub fn density_from_pure(psi: &Vector3) -> Result<Matrix3> {
    let norm = psi.norm();
    if !((norm - 1.0).abs() <= 1e-4) {
        return Err(Error::NotNormalized { norm });
    }
    let v = psi.scale(C64::new(1.0 / norm, 0.0));
    Ok(outer(&v, &v))
}

/// `(cos(eta), sin(eta)) * omega0 * exp(i k zeta)`.
pub fn background_fields(p: &LambdaParams, zeta: f64) -> FieldPair {
    let w = C64::from_polar(p.omega0, p.k * zeta);
    FieldPair::new(w * p.eta.cos(), w * p.eta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hamiltonian_examples() {
        assert_eq!(interaction_hamiltonian(FieldPair::zero()), Matrix3::zero());
        let h = interaction_hamiltonian(FieldPair::real(2.0, 0.0));
        let mut want = Matrix3::zero();
        want[(2, 0)] = c(-1.0, 0.0);
        want[(0, 2)] = c(-1.0, 0.0);
        assert_eq!(h, want);
        let h = interaction_hamiltonian(FieldPair::new(c(1.0, 1.0), c(0.0, 2.0)));
        assert_eq!(h[(2, 0)], c(-0.5, -0.5));
        assert_eq!(h[(2, 1)], c(0.0, -1.0));
        assert_eq!(h[(0, 2)], c(-0.5, 0.5));
        assert_eq!(h[(1, 2)], c(0.0, 1.0));
        assert_eq!(h.hermiticity_defect(), 0.0);
    }

    #[test]
    fn extract_examples() {
        assert_eq!(extract_fields(&Matrix3::zero()).unwrap(), FieldPair::zero());
        let f = FieldPair::new(ONE, -I);
        assert_eq!(extract_fields(&interaction_hamiltonian(f)).unwrap(), f);
        let mut bad = interaction_hamiltonian(f);
        bad[(1, 1)] = c(1e-6, 0.0);
        assert_eq!(extract_fields(&bad).unwrap_err().name(), "NotLambdaStructured");
    }

    #[test]
    fn lax_u_examples() {
        assert_eq!(lax_u(ZERO, &Matrix3::zero()), Matrix3::zero());
        assert_eq!(
            lax_u(c(0.0, 2.0), &Matrix3::zero()),
            Matrix3::diag_real(-1.0, -1.0, 1.0)
        );
        let u = lax_u(I, &interaction_hamiltonian(FieldPair::real(1.0, 0.0)));
        let mut want = Matrix3::diag_real(-0.5, -0.5, 0.5);
        want[(0, 2)] = c(0.0, 0.5);
        want[(2, 0)] = c(0.0, 0.5);
        assert!((u - want).max_abs() < 1e-15);
    }

    #[test]
    fn lax_v_examples() {
        let p = LambdaParams::new(3.0, 0.0, 1.0).unwrap();
        let rho = Matrix3::unit(1, 1);
        let v = lax_v(c(0.0, 2.0), &rho, &p).unwrap();
        assert!((v - Matrix3::unit(1, 1) * 0.75).max_abs() < 1e-15);
        let tiny = LambdaParams { nu0: 1e-300, ..p };
        assert!(lax_v(c(0.0, 2.0), &rho, &tiny).unwrap().max_abs() < 1e-299);
        assert_eq!(lax_v(c(0.0, 0.0), &rho, &p).unwrap_err().name(), "SpectralPole");
    }

    #[test]
    fn dark_state_examples() {
        let AtomState::Pure(v) = dark_state(0.0) else { unreachable!() };
        assert_eq!(v, Vector3::basis(1));
        let AtomState::Pure(v) = dark_state(FRAC_PI_2) else { unreachable!() };
        assert!((v - Vector3::from_real(-1.0, 0.0, 0.0)).max_abs() < 1e-16);
        let AtomState::Pure(v) = dark_state(FRAC_PI_2 / 2.0) else { unreachable!() };
        let r = 0.5f64.sqrt();
        assert!((v - Vector3::from_real(-r, r, 0.0)).max_abs() < 1e-15);
    }

    #[test]
    fn density_examples() {
        assert_eq!(density_from_pure(&Vector3::basis(1)).unwrap(), Matrix3::unit(1, 1));
        let r = 0.5f64.sqrt();
        let rho = density_from_pure(&Vector3::from_real(r, 0.0, r)).unwrap();
        let want = (Matrix3::unit(0, 0) + Matrix3::unit(0, 2) + Matrix3::unit(2, 0) + Matrix3::unit(2, 2)) * 0.5;
        assert!((rho - want).max_abs() < 1e-15);
        let err = density_from_pure(&Vector3::from_real(1.1, 0.0, 0.0)).unwrap_err();
        assert_eq!(err.name(), "NotNormalized");
    }

    #[test]
    fn background_examples() {
        let p = LambdaParams::default();
        assert_eq!(background_fields(&p, 3.7), FieldPair::real(1.0, 0.0));
        let zero = LambdaParams { omega0: 0.0, ..p };
        assert_eq!(background_fields(&zero, 1.0), FieldPair::zero());
        let pk = p.with_k(0.5).unwrap();
        let f = background_fields(&pk, std::f64::consts::PI);
        assert!((f.omega_a - I).norm() < 1e-15);
    }

    #[test]
    fn dark_state_is_annihilated_by_background() {
        let h = interaction_hamiltonian(background_fields(&LambdaParams::default(), 0.0));
        let AtomState::Pure(v) = dark_state(0.0) else { unreachable!() };
        assert!(h.mul_vec(&v).max_abs() < 1e-15);
    }

    #[test]
    fn params_guards() {
        assert!(LambdaParams::new(0.0, 0.0, 1.0).is_err());
        assert!(LambdaParams::new(1.0, 0.0, -1.0).is_err());
        assert!(LambdaParams::default().with_eta(2.0).is_err());
        let s = SpectralData::new(2.0, 1.0).unwrap();
        assert!((s.root.re - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(SpectralData::new(1.0, 1.0).unwrap().root, ZERO);
        assert!(SpectralData::new(0.5, 1.0).unwrap().root.im > 0.0);
    }

    proptest! {
        #[test]
        fn field_round_trip(a in -5.0..5.0f64, b in -5.0..5.0f64, c_ in -5.0..5.0f64, d in -5.0..5.0f64) {
            let f = FieldPair::new(C64::new(a, b), C64::new(c_, d));
            prop_assert_eq!(extract_fields(&interaction_hamiltonian(f)).unwrap(), f);
        }

        #[test]
        fn pure_density_is_idempotent(v in proptest::array::uniform3((-1.0..1.0f64, -1.0..1.0f64))) {
            let psi = Vector3(v.map(|(a, b)| C64::new(a, b)));
            prop_assume!(psi.norm() > 1e-3);
            let psi = psi.scale(C64::new(1.0 / psi.norm(), 0.0));
            let rho = density_from_pure(&psi).unwrap();
            prop_assert!((rho * rho - rho).max_abs() < 1e-10);
            prop_assert!((rho.trace() - ONE).norm() < 1e-12);
        }

        #[test]
        fn lax_v_trace_passthrough(lr in -3.0..3.0f64, li in 0.1..3.0f64) {
            let p = LambdaParams::default();
            let lam = C64::new(lr, li);
            let rho = Matrix3::diag_real(0.2, 0.5, 0.3);
            let t = lax_v(lam, &rho, &p).unwrap().trace();
            let want = I * p.nu0 / ((lam - p.delta) * 2.0);
            prop_assert!((t - want).norm() < 1e-12);
        }
    }
}
