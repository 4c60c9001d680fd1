//! Residual and property checks over solution grids: zero curvature, PDE
//! residuals, density audits, oracle comparison and feature tracking.
//!
//! All checks are read-only and may run concurrently. Row partial results
//! are reduced in a fixed order, so reports are reproducible regardless of
//! the worker count.

use std::fmt;
use std::ops::Range;

use rayon::prelude::*;

use crate::algebra::{commutator, Matrix3, C64, I};
use crate::error::{Error, Result};
use crate::mbsolver::{bloch_rhs, GridSpec, SolutionGrid};
use crate::model::{interaction_hamiltonian, lax_u, lax_v, FieldPair, LambdaParams, D};

/// Probe values of the spectral parameter used for zero-curvature checks.
pub const PROBE_LAMBDAS: [(f64, f64); 3] = [(1.0, 1.0), (0.0, 0.7), (-2.0, 0.5)];

pub fn probe_lambdas() -> [C64; 3] {
    PROBE_LAMBDAS.map(|(re, im)| C64::new(re, im))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub max_abs: f64,
    /// Root-mean-square over the nodes that were checked.
    pub l2: f64,
    pub grid_h: (f64, f64),
    pub lambda_probe: Option<C64>,
    pub convergence_order: Option<f64>,
}

impl ResidualReport {
    fn new(acc: Acc, grid: &GridSpec, lambda_probe: Option<C64>) -> Self {
        ResidualReport {
            max_abs: acc.max,
            l2: if acc.count > 0 { (acc.sumsq / acc.count as f64).sqrt() } else { 0.0 },
            grid_h: (grid.h_tau(), grid.h_zeta()),
            lambda_probe,
            convergence_order: None,
        }
    }

    /// Attach the order measured against the same check on a grid with
    /// twice the spacing.
    pub fn with_order_from(mut self, coarse: &ResidualReport) -> Self {
        self.convergence_order = Some(convergence_order(coarse.max_abs, self.max_abs));
        self
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "max_abs: {:.6e}", self.max_abs)?;
        writeln!(f, "l2: {:.6e}", self.l2)?;
        writeln!(f, "h_tau: {:.6e}", self.grid_h.0)?;
        writeln!(f, "h_zeta: {:.6e}", self.grid_h.1)?;
        match self.lambda_probe {
            Some(l) => writeln!(f, "lambda_probe: {}{:+}i", l.re, l.im)?,
            None => writeln!(f, "lambda_probe: none")?,
        }
        match self.convergence_order {
            Some(o) => writeln!(f, "convergence_order: {o:.4}"),
            None => writeln!(f, "convergence_order: none"),
        }
    }
}

/// Observed order for a halving of the step: `log2(coarse / fine)`.
pub fn convergence_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    max: f64,
    sumsq: f64,
    count: usize,
}

impl Acc {
    fn push(&mut self, x: f64) {
        // NaN must not be swallowed by max()
        self.max = if x.is_nan() || self.max.is_nan() { f64::NAN } else { self.max.max(x) };
        self.sumsq += x * x;
        self.count += 1;
    }

    fn merge(mut self, o: Acc) -> Acc {
        self.max = if o.max.is_nan() || self.max.is_nan() { f64::NAN } else { self.max.max(o.max) };
        self.sumsq += o.sumsq;
        self.count += o.count;
        self
    }
}

/// Evaluate `node(i, j)` over the interior, one row per task, reducing in
/// row order.
fn over_interior<F>(g: &GridSpec, node: F) -> Result<Acc>
where
    F: Fn(usize, usize) -> Result<f64> + Sync,
{
    if g.n_tau < 3 || g.n_zeta < 3 {
        return Err(Error::InvalidParameter(
            "residual checks need at least a 3x3 grid".into(),
        ));
    }
    let rows: Vec<Acc> = (1..g.n_zeta - 1)
        .into_par_iter()
        .map(|i| {
            let mut acc = Acc::default();
            for j in 1..g.n_tau - 1 {
                acc.push(node(i, j)?);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().fold(Acc::default(), Acc::merge))
}

fn over_all<F>(g: &GridSpec, node: F) -> Acc
where
    F: Fn(usize) -> f64 + Sync,
{
    let rows: Vec<Acc> = (0..g.n_zeta)
        .into_par_iter()
        .map(|i| {
            let mut acc = Acc::default();
            for j in 0..g.n_tau {
                acc.push(node(i * g.n_tau + j));
            }
            acc
        })
        .collect();
    rows.into_iter().fold(Acc::default(), Acc::merge)
}

/// Central-difference residual of `U_ζ − V_τ + [U, V]` at the interior
/// nodes, max over matrix entries.
pub fn zero_curvature_residual(
    sol: &SolutionGrid,
    lambda: C64,
    p: &LambdaParams,
) -> Result<ResidualReport> {
    let g = &sol.grid;
    // surface the pole before touching the grid
    lax_v(lambda, &Matrix3::zero(), p)?;
    let (hz, ht) = (g.h_zeta(), g.h_tau());
    let u = |i, j| lax_u(lambda, &interaction_hamiltonian(sol.field(i, j)));
    let v = |i, j| lax_v(lambda, sol.density(i, j), p);
    let acc = over_interior(g, |i, j| {
        let u_z = (u(i + 1, j) - u(i - 1, j)) * (0.5 / hz);
        let v_t = (v(i, j + 1)? - v(i, j - 1)?) * (0.5 / ht);
        let r = u_z - v_t + commutator(&u(i, j), &v(i, j)?);
        Ok(r.max_abs())
    })?;
    Ok(ResidualReport::new(acc, g, Some(lambda)))
}

/// Central-difference residual of the matrix Maxwell equation
/// `H_ζ = i(ν0/4)[D, ρ]` and the Liouville equation, combined by max.
pub fn pde_residual(sol: &SolutionGrid, p: &LambdaParams) -> Result<ResidualReport> {
    let g = &sol.grid;
    let (hz, ht) = (g.h_zeta(), g.h_tau());
    let h = |i, j| interaction_hamiltonian(sol.field(i, j));
    let acc = over_interior(g, |i, j| {
        let rho = sol.density(i, j);
        let maxwell = (h(i + 1, j) - h(i - 1, j)) * (0.5 / hz)
            - commutator(&D, rho) * (I * (0.25 * p.nu0));
        let liouville = (*sol.density(i, j + 1) - *sol.density(i, j - 1)) * (0.5 / ht)
            - bloch_rhs(rho, sol.field(i, j), p.delta);
        Ok(maxwell.max_abs().max(liouville.max_abs()))
    })?;
    Ok(ResidualReport::new(acc, g, None))
}

/// Per-metric maxima of [`audit_density`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityAudit {
    pub hermiticity: f64,
    pub trace: f64,
    /// Largest eigenvalue excursion outside `[0, 1]`.
    pub negativity: f64,
    /// `|‖ρ‖_F² − 1|`; only when the grid claims pure states.
    pub purity: Option<f64>,
}

impl DensityAudit {
    pub fn worst(&self) -> f64 {
        let m = [self.hermiticity, self.trace, self.negativity, self.purity.unwrap_or(0.0)];
        if m.iter().any(|x| x.is_nan()) {
            return f64::NAN;
        }
        m.into_iter().fold(0.0, f64::max)
    }
}

pub fn density_audit(sol: &SolutionGrid) -> DensityAudit {
    let g = &sol.grid;
    let herm = over_all(g, |n| sol.rho[n].hermiticity_defect());
    let trace = over_all(g, |n| (sol.rho[n].trace() - 1.0).norm());
    let neg = over_all(g, |n| {
        let e = sol.rho[n].hermitian_eigenvalues();
        (-e[0]).max(e[2] - 1.0).max(0.0)
    });
    let purity = sol
        .pure
        .then(|| over_all(g, |n| (sol.rho[n].frobenius_sqr() - 1.0).abs()).max);
    DensityAudit {
        hermiticity: herm.max,
        trace: trace.max,
        negativity: neg.max,
        purity,
    }
}

/// Worst density-matrix invariant violation over all nodes.
pub fn audit_density(sol: &SolutionGrid) -> ResidualReport {
    let a = density_audit(sol);
    ResidualReport {
        max_abs: a.worst(),
        // no meaningful mean across heterogeneous metrics; report the bound
        l2: a.worst(),
        grid_h: (sol.grid.h_tau(), sol.grid.h_zeta()),
        lambda_probe: None,
        convergence_order: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Comparison {
    /// Complex fields and full densities.
    #[default]
    Exact,
    /// Field moduli and populations only; blind to constant phases.
    GaugeInvariant,
}

pub fn compare_solutions(a: &SolutionGrid, b: &SolutionGrid, mode: Comparison) -> Result<ResidualReport> {
    if a.grid != b.grid || a.fields.len() != b.fields.len() || a.rho.len() != b.rho.len() {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", a.grid, b.grid)));
    }
    let acc = over_all(&a.grid, |n| {
        let (fa, fb) = (&a.fields[n], &b.fields[n]);
        let (ra, rb) = (&a.rho[n], &b.rho[n]);
        match mode {
            Comparison::Exact => fa.max_abs_diff(fb).max((*ra - *rb).max_abs()),
            Comparison::GaugeInvariant => {
                let mut d = (fa.omega_a.norm() - fb.omega_a.norm())
                    .abs()
                    .max((fa.omega_b.norm() - fb.omega_b.norm()).abs());
                for k in 0..3 {
                    d = d.max((ra[(k, k)].re - rb[(k, k)].re).abs());
                }
                d
            }
        }
    });
    Ok(ResidualReport::new(acc, &a.grid, None))
}

/// Running `max |f − f_ref| / max |f_ref|` over field slices (both channels),
/// for streaming comparisons.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RelativeFieldError {
    pub max_diff: f64,
    pub max_ref: f64,
}

impl RelativeFieldError {
    pub fn update(&mut self, fields: &[FieldPair], reference: &[FieldPair]) {
        for (f, r) in fields.iter().zip(reference) {
            self.max_diff = self.max_diff.max(f.max_abs_diff(r));
            self.max_ref = self.max_ref.max(r.max_abs());
        }
    }

    pub fn value(&self) -> f64 {
        self.max_diff / self.max_ref
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tracker {
    MinIa,
    MaxIb,
    MaxP1,
    MaxP3,
}

/// Which coordinate the feature position is recorded against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// τ*(ζ) from each ζ row; `v = 1/(1 + dτ*/dζ)`.
    TauOfZeta,
    /// ζ*(τ) from each τ column; `v = n/(1 + n)`, `n = dζ*/dτ`.
    ZetaOfTau,
}

impl Tracker {
    pub fn default_axis(self) -> Axis {
        match self {
            Tracker::MinIa | Tracker::MaxIb | Tracker::MaxP3 => Axis::TauOfZeta,
            Tracker::MaxP1 => Axis::ZetaOfTau,
        }
    }

    // signed so that the feature is always a maximum
    fn value(self, sol: &SolutionGrid, i: usize, j: usize) -> f64 {
        let o = sol.observables(i, j);
        match self {
            Tracker::MinIa => -o.ia,
            Tracker::MaxIb => o.ib,
            Tracker::MaxP1 => o.p1,
            Tracker::MaxP3 => o.p3,
        }
    }
}

/// Sub-grid position (in samples) of the unique prominent maximum of `g`.
fn locate_peak(g: &[f64]) -> std::result::Result<f64, String> {
    let n = g.len();
    let (jm, &gm) = g
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or("empty line")?;
    if jm == 0 || jm + 1 == n {
        return Err(format!("extremum at the edge (index {jm})"));
    }
    let edge = g[0].max(g[n - 1]);
    let scale = g[0].abs().max(g[n - 1].abs()).max(gm.abs());
    if !(gm - edge > 1e-3 * scale) {
        return Err(format!("prominence {:.3e} below threshold", gm - edge));
    }
    let tie = 1e-14 * scale;
    if g.iter().enumerate().any(|(k, &x)| k.abs_diff(jm) > 1 && x >= gm - tie) {
        return Err("extremum is not unique".into());
    }
    let (l, c, r) = (g[jm - 1], gm, g[jm + 1]);
    let curv = l - 2.0 * c + r;
    let off = if curv < 0.0 { 0.5 * (l - r) / curv } else { 0.0 };
    Ok(jm as f64 + off.clamp(-0.5, 0.5))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Lab-frame velocity (units of c) of the tracked feature over all lines of
/// the tracker's default axis.
pub fn measure_velocity(sol: &SolutionGrid, tracker: Tracker) -> Result<f64> {
    let axis = tracker.default_axis();
    let n = match axis {
        Axis::TauOfZeta => sol.grid.n_zeta,
        Axis::ZetaOfTau => sol.grid.n_tau,
    };
    measure_velocity_along(sol, tracker, axis, 0..n)
}

/// As [`measure_velocity`], restricted to a range of lines (ζ rows for
/// [`Axis::TauOfZeta`], τ columns otherwise).
pub fn measure_velocity_along(
    sol: &SolutionGrid,
    tracker: Tracker,
    axis: Axis,
    lines: Range<usize>,
) -> Result<f64> {
    let g = &sol.grid;
    let (n_lines, n_pts) = match axis {
        Axis::TauOfZeta => (g.n_zeta, g.n_tau),
        Axis::ZetaOfTau => (g.n_tau, g.n_zeta),
    };
    if lines.end > n_lines || lines.len() < 2 {
        return Err(Error::FeatureLost(format!(
            "need at least two lines within 0..{n_lines}, got {lines:?}"
        )));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for l in lines {
        let line: Vec<f64> = (0..n_pts)
            .map(|k| match axis {
                Axis::TauOfZeta => tracker.value(sol, l, k),
                Axis::ZetaOfTau => tracker.value(sol, k, l),
            })
            .collect();
        let pos = locate_peak(&line)
            .map_err(|m| Error::FeatureLost(format!("{tracker:?} on line {l}: {m}")))?;
        match axis {
            Axis::TauOfZeta => {
                xs.push(g.zeta(l));
                ys.push(g.tau_min + pos * g.h_tau());
            }
            Axis::ZetaOfTau => {
                xs.push(g.tau(l));
                ys.push(g.zeta_min + pos * g.h_zeta());
            }
        }
    }
    let m = slope(&xs, &ys);
    Ok(match axis {
        Axis::TauOfZeta => 1.0 / (1.0 + m),
        Axis::ZetaOfTau => m / (1.0 + m),
    })
}
