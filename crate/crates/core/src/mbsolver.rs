//! Direct numerical integration of the reduced Maxwell-Bloch system.
//!
//! The march goes forward in ζ (Heun predictor-corrector on the field
//! equations) and, on every ζ slice, the Liouville equation is integrated
//! along τ with classic RK4 starting from a prescribed boundary density at
//! `tau_min`.

use rayon::prelude::*;

use crate::algebra::{Matrix3, C64, I};
use crate::analytic::{observables, Observables};
use crate::error::{Error, Result};
use crate::model::{interaction_hamiltonian, FieldPair, LambdaParams, D};

/// Width of the tolerated band outside `[0, 1]` for density eigenvalues.
pub const EIGEN_BAND: f64 = 1e-4;
/// Allowed deviation between the initial field at `tau_min` and the declared
/// edge (background) field.
pub const BOUNDARY_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub tau_min: f64,
    pub tau_max: f64,
    pub n_tau: usize,
    pub zeta_min: f64,
    pub zeta_max: f64,
    pub n_zeta: usize,
}

impl GridSpec {
    pub fn new(
        (tau_min, tau_max, n_tau): (f64, f64, usize),
        (zeta_min, zeta_max, n_zeta): (f64, f64, usize),
    ) -> Result<Self> {
        let g = GridSpec { tau_min, tau_max, n_tau, zeta_min, zeta_max, n_zeta };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tau < 3 || self.n_zeta < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs n_tau >= 3 and n_zeta >= 2 (got {} x {})",
                self.n_tau, self.n_zeta
            )));
        }
        let finite = [self.tau_min, self.tau_max, self.zeta_min, self.zeta_max]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.tau_max <= self.tau_min || self.zeta_max <= self.zeta_min {
            return Err(Error::InvalidParameter(
                "grid bounds must be finite with max > min".into(),
            ));
        }
        Ok(())
    }

    pub fn h_tau(&self) -> f64 {
        (self.tau_max - self.tau_min) / (self.n_tau - 1) as f64
    }

    pub fn h_zeta(&self) -> f64 {
        (self.zeta_max - self.zeta_min) / (self.n_zeta - 1) as f64
    }

    pub fn tau(&self, j: usize) -> f64 {
        if j + 1 == self.n_tau {
            self.tau_max
        } else {
            self.tau_min + j as f64 * self.h_tau()
        }
    }

    pub fn zeta(&self, i: usize) -> f64 {
        if i + 1 == self.n_zeta {
            self.zeta_max
        } else {
            self.zeta_min + i as f64 * self.h_zeta()
        }
    }

    pub fn taus(&self) -> Vec<f64> {
        (0..self.n_tau).map(|j| self.tau(j)).collect()
    }

    pub fn len(&self) -> usize {
        self.n_tau * self.n_zeta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same bounds, both spacings halved.
    pub fn refined(&self) -> Self {
        GridSpec {
            n_tau: 2 * self.n_tau - 1,
            n_zeta: 2 * self.n_zeta - 1,
            ..*self
        }
    }
}

/// Fields and density on every node, row-major in ζ then τ.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionGrid {
    pub grid: GridSpec,
    pub fields: Vec<FieldPair>,
    pub rho: Vec<Matrix3>,
    /// Whether every stored density is claimed to be a pure-state projector.
    pub pure: bool,
}

impl SolutionGrid {
    /// Fill a grid by pointwise evaluation. Nodes are evaluated in parallel;
    /// the result is independent of the worker count.
    pub fn from_fn<F>(grid: GridSpec, pure: bool, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<(FieldPair, Matrix3)> + Sync,
    {
        grid.validate()?;
        let nodes: Vec<(FieldPair, Matrix3)> = (0..grid.len())
            .into_par_iter()
            .map(|n| f(grid.zeta(n / grid.n_tau), grid.tau(n % grid.n_tau)))
            .collect::<Result<_>>()?;
        let (fields, rho) = nodes.into_iter().unzip();
        Ok(SolutionGrid { grid, fields, rho, pure })
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.grid.n_tau + j
    }

    pub fn field(&self, i: usize, j: usize) -> FieldPair {
        self.fields[self.index(i, j)]
    }

    pub fn density(&self, i: usize, j: usize) -> &Matrix3 {
        &self.rho[self.index(i, j)]
    }

    pub fn observables(&self, i: usize, j: usize) -> Observables {
        let n = self.index(i, j);
        observables(&self.fields[n], &self.rho[n])
    }

    pub fn field_row(&self, i: usize) -> &[FieldPair] {
        let n = self.grid.n_tau;
        &self.fields[i * n..(i + 1) * n]
    }

    pub fn rho_row(&self, i: usize) -> &[Matrix3] {
        let n = self.grid.n_tau;
        &self.rho[i * n..(i + 1) * n]
    }
}

/// τ-boundary density, possibly depending on ζ.
pub enum Boundary<'a> {
    Fixed(Matrix3),
    Rule(&'a (dyn Fn(f64) -> Matrix3 + Sync)),
}

impl Boundary<'_> {
    pub fn at(&self, zeta: f64) -> Matrix3 {
        match self {
            Boundary::Fixed(m) => *m,
            Boundary::Rule(f) => f(zeta),
        }
    }
}

fn liouville_generator(f: &FieldPair, delta: f64) -> Matrix3 {
    D * (0.5 * delta) - interaction_hamiltonian(*f)
}

// i[A, ρ] with A, ρ Hermitian: ρA = (Aρ)†, so one product suffices and the
// result is Hermitian by construction.
fn rhs_with(a: &Matrix3, rho: &Matrix3) -> Matrix3 {
    let x = *a * *rho;
    (x - x.adjoint()) * I
}

/// Right-hand side of the Liouville equation, `i[(Δ/2)D − H(f), ρ]`.
pub fn bloch_rhs(rho: &Matrix3, f: FieldPair, delta: f64) -> Matrix3 {
    let a = liouville_generator(&f, delta);
    let x = a * *rho;
    (x - *rho * a) * I
}

fn check_band(rho: &Matrix3, zeta: f64, tau: f64) -> Result<()> {
    let e = rho.hermitian_eigenvalues_fast();
    let bad = if e[0] < -EIGEN_BAND {
        Some(e[0])
    } else if e[2] > 1.0 + EIGEN_BAND {
        Some(e[2])
    } else if !(e[0].is_finite() && e[2].is_finite()) {
        Some(f64::NAN)
    } else {
        None
    };
    match bad {
        Some(eigenvalue) => Err(Error::StepUnstable { eigenvalue, zeta, tau }),
        None => Ok(()),
    }
}

fn integrate_slice_at(
    fields: &[FieldPair],
    rho0: Matrix3,
    delta: f64,
    grid: &GridSpec,
    zeta: f64,
    out: &mut Vec<Matrix3>,
) -> Result<()> {
    if fields.len() != grid.n_tau {
        return Err(Error::GridMismatch(format!(
            "slice has {} field samples, grid expects {}",
            fields.len(),
            grid.n_tau
        )));
    }
    let h = grid.h_tau();
    out.clear();
    out.reserve(grid.n_tau);
    let mut rho = rho0.hermitian_part();
    check_band(&rho, zeta, grid.tau_min)?;
    out.push(rho);
    let mut a0 = liouville_generator(&fields[0], delta);
    for j in 0..grid.n_tau - 1 {
        let a1 = liouville_generator(&fields[j + 1], delta);
        let am = (a0 + a1) * 0.5;
        let k1 = rhs_with(&a0, &rho);
        let k2 = rhs_with(&am, &(rho + k1 * (0.5 * h)));
        let k3 = rhs_with(&am, &(rho + k2 * (0.5 * h)));
        let k4 = rhs_with(&a1, &(rho + k3 * h));
        rho += (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
        rho = rho.hermitian_part();
        check_band(&rho, zeta, grid.tau(j + 1))?;
        out.push(rho);
        a0 = a1;
    }
    Ok(())
}

/// RK4 along τ from `rho_initial` at `tau_min`, with the fields linearly
/// interpolated to half steps.
pub fn integrate_bloch_slice(
    f_of_tau: &[FieldPair],
    rho_initial: &Matrix3,
    delta: f64,
    grid: &GridSpec,
) -> Result<Vec<Matrix3>> {
    let mut out = Vec::new();
    integrate_slice_at(f_of_tau, *rho_initial, delta, grid, grid.zeta_min, &mut out)?;
    Ok(out)
}

fn polarization_drive(rho: &Matrix3, nu0: f64) -> (C64, C64) {
    (I * nu0 * rho[(2, 0)], I * nu0 * rho[(2, 1)])
}

/// Working buffers for the march; reused across steps.
struct Stepper<'a> {
    p: &'a LambdaParams,
    grid: &'a GridSpec,
    h: f64,
    predicted: Vec<FieldPair>,
    rho_pred: Vec<Matrix3>,
}

impl Stepper<'_> {
    /// One Heun step; on return `fields` and `rho` hold the new slice.
    fn step(
        &mut self,
        fields: &mut [FieldPair],
        rho: &mut Vec<Matrix3>,
        boundary_next: Matrix3,
        zeta_next: f64,
    ) -> Result<()> {
        let (nu0, h) = (self.p.nu0, self.h);
        self.predicted.clear();
        self.predicted.extend(fields.iter().zip(rho.iter()).map(|(f, r)| {
            let (da, db) = polarization_drive(r, nu0);
            FieldPair::new(f.omega_a + da * h, f.omega_b + db * h)
        }));
        integrate_slice_at(
            &self.predicted,
            boundary_next,
            self.p.delta,
            self.grid,
            zeta_next,
            &mut self.rho_pred,
        )?;
        for ((f, r0), r1) in fields.iter_mut().zip(rho.iter()).zip(&self.rho_pred) {
            let (a0, b0) = polarization_drive(r0, nu0);
            let (a1, b1) = polarization_drive(r1, nu0);
            f.omega_a += (a0 + a1) * (0.5 * h);
            f.omega_b += (b0 + b1) * (0.5 * h);
        }
        integrate_slice_at(fields, boundary_next, self.p.delta, self.grid, zeta_next, rho)
    }
}

/// Advance the fields of one slice by `h_zeta` (Heun). `boundary_next` is
/// the τ-boundary density of the target slice. Returns the new fields and
/// the density re-integrated under them.
pub fn maxwell_step(
    rho_slice: &[Matrix3],
    f_slice: &[FieldPair],
    p: &LambdaParams,
    h_zeta: f64,
    boundary_next: &Matrix3,
    grid: &GridSpec,
) -> Result<(Vec<FieldPair>, Vec<Matrix3>)> {
    if rho_slice.len() != f_slice.len() || f_slice.len() != grid.n_tau {
        return Err(Error::GridMismatch("inconsistent slice lengths".into()));
    }
    let mut st = Stepper {
        p,
        grid,
        h: h_zeta,
        predicted: Vec::new(),
        rho_pred: Vec::new(),
    };
    let mut fields = f_slice.to_vec();
    let mut rho = rho_slice.to_vec();
    st.step(&mut fields, &mut rho, *boundary_next, grid.zeta_min + h_zeta)?;
    Ok((fields, rho))
}

/// Explicit Euler variant of [`maxwell_step`]; first order, kept for
/// convergence comparisons.
pub fn maxwell_euler_step(
    rho_slice: &[Matrix3],
    f_slice: &[FieldPair],
    p: &LambdaParams,
    h_zeta: f64,
) -> Vec<FieldPair> {
    f_slice
        .iter()
        .zip(rho_slice)
        .map(|(f, r)| {
            let (da, db) = polarization_drive(r, p.nu0);
            FieldPair::new(f.omega_a + da * h_zeta, f.omega_b + db * h_zeta)
        })
        .collect()
}

/// March the whole grid, handing each finished slice to `observer`
/// (slice index, fields, densities) instead of storing it. Memory use is
/// O(n_tau).
pub fn propagate_with<O>(
    initial_fields: &[FieldPair],
    boundary: &Boundary<'_>,
    edge_field: FieldPair,
    p: &LambdaParams,
    grid: &GridSpec,
    mut observer: O,
) -> Result<()>
where
    O: FnMut(usize, &[FieldPair], &[Matrix3]) -> Result<()>,
{
    grid.validate()?;
    p.validate()?;
    if initial_fields.len() != grid.n_tau {
        return Err(Error::GridMismatch(format!(
            "initial slice has {} samples, grid expects {}",
            initial_fields.len(),
            grid.n_tau
        )));
    }
    let deviation = initial_fields[0].max_abs_diff(&edge_field);
    if !(deviation < BOUNDARY_TOL) {
        return Err(Error::BoundaryMismatch { deviation });
    }
    let mut fields = initial_fields.to_vec();
    let mut rho = Vec::new();
    integrate_slice_at(&fields, boundary.at(grid.zeta_min), p.delta, grid, grid.zeta_min, &mut rho)?;
    observer(0, &fields, &rho)?;
    let mut st = Stepper {
        p,
        grid,
        h: grid.h_zeta(),
        predicted: Vec::with_capacity(grid.n_tau),
        rho_pred: Vec::with_capacity(grid.n_tau),
    };
    for i in 1..grid.n_zeta {
        let z = grid.zeta(i);
        st.step(&mut fields, &mut rho, boundary.at(z), z)?;
        observer(i, &fields, &rho)?;
    }
    Ok(())
}

/// March the whole grid and keep every node.
pub fn propagate(
    initial_fields: &[FieldPair],
    boundary: &Boundary<'_>,
    edge_field: FieldPair,
    p: &LambdaParams,
    grid: &GridSpec,
) -> Result<SolutionGrid> {
    let mut fields = Vec::with_capacity(grid.len());
    let mut rho = Vec::with_capacity(grid.len());
    propagate_with(initial_fields, boundary, edge_field, p, grid, |_, f, r| {
        fields.extend_from_slice(f);
        rho.extend_from_slice(r);
        Ok(())
    })?;
    Ok(SolutionGrid { grid: *grid, fields, rho, pure: false })
}
