//! Mass-conservative implicit finite-difference solver for
//! v_t = q0 (v^gamma0 |v_x|^m v_x)_x on [-x_max, x_max] with zero-flux
//! boundaries.
//!
//! Time integration is backward Euler. Each step solves the nonlinear system
//! by Picard iteration: the interface diffusivity is lagged to the previous
//! iterate while the gradient stays implicit, giving one tridiagonal solve
//! per iteration. The update is written in conservative flux form, so the
//! discrete mass telescopes exactly under the zero-flux boundary conditions.

use crate::error::{Error, Result};
use crate::grid::{Grid, Snapshot};
use crate::params::DivParams;
use crate::tridiag;
use serde::{Deserialize, Serialize};

/// Undershoots below this abort the step; values in [-UNDERSHOOT_ABORT, 0)
/// are clamped to zero.
pub const UNDERSHOOT_ABORT: f64 = -1e-12;

/// Number of cells adjacent to each boundary watched by the guard.
pub const GUARD_CELLS: usize = 5;

/// Field level that counts as the front reaching the guard band.
pub const GUARD_LEVEL: f64 = 1e-10;

/// Time-stepping plan: horizon, step-size bounds, output times and the
/// Picard controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub t_end: f64,
    pub dt_initial: f64,
    pub dt_max: f64,
    pub snapshot_times: Vec<f64>,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
}

impl Schedule {
    pub fn new(
        t_end: f64,
        dt_initial: f64,
        dt_max: f64,
        snapshot_times: Vec<f64>,
        picard_tol: f64,
        picard_max_iters: usize,
    ) -> Result<Self> {
        if !(t_end > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be positive, got {t_end}"
            )));
        }
        if !(dt_initial > 0.0 && dt_initial <= dt_max) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < dt_initial <= dt_max, got dt_initial = {dt_initial}, dt_max = {dt_max}"
            )));
        }
        if !(picard_tol > 0.0) || picard_max_iters == 0 {
            return Err(Error::InvalidParameter(
                "picard_tol must be positive and picard_max_iters at least 1".into(),
            ));
        }
        for w in snapshot_times.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidParameter(
                    "snapshot_times must be strictly increasing".into(),
                ));
            }
        }
        if let (Some(first), Some(last)) = (snapshot_times.first(), snapshot_times.last()) {
            if !(*first > 0.0 && *last <= t_end) {
                return Err(Error::InvalidParameter(format!(
                    "snapshot_times must lie in (0, t_end]; got range [{first}, {last}]"
                )));
            }
        }
        Ok(Self {
            t_end,
            dt_initial,
            dt_max,
            snapshot_times,
            picard_tol,
            picard_max_iters,
        })
    }

    /// Logarithmically spaced snapshots from `t_first` to `t_end`, with the
    /// default Picard controls (tol 1e-10, 100 iterations).
    pub fn log_spaced(t_end: f64, t_first: f64, count: usize) -> Result<Self> {
        if !(t_first > 0.0 && t_first < t_end) || count < 2 {
            return Err(Error::InvalidParameter(format!(
                "log schedule needs 0 < t_first < t_end and count >= 2, \
                 got t_first = {t_first}, t_end = {t_end}, count = {count}"
            )));
        }
        let log_lo = t_first.ln();
        let log_hi = t_end.ln();
        let mut times: Vec<f64> = (0..count)
            .map(|i| (log_lo + (log_hi - log_lo) * i as f64 / (count - 1) as f64).exp())
            .collect();
        // Land the last snapshot on t_end exactly.
        *times.last_mut().unwrap() = t_end;
        Schedule::new(t_end, t_first / 10.0, t_end / 500.0, times, 1e-10, 100)
    }
}

/// Per accepted step bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub t: f64,
    pub dt: f64,
    pub picard_iters: usize,
    pub residual: f64,
}

/// Output of a completed run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: DivParams,
    pub grid: Grid,
    pub snapshots: Vec<Snapshot>,
    pub solver_stats: Vec<StepStats>,
    /// Step attempts rejected by Picard failure or undershoot.
    pub rejected_steps: usize,
    /// Most negative pre-clamp value seen anywhere in the run.
    pub min_before_clamp: f64,
}

/// The mound profile (3/(4 x0)) (1 - (x/x0)^2) on |x| <= x0, zero outside.
/// Unit area; the gradient stays defined at the support edge.
pub fn mound_value(x: f64, x0: f64) -> f64 {
    if x.abs() <= x0 {
        0.75 / x0 * (1.0 - (x / x0) * (x / x0))
    } else {
        0.0
    }
}

/// Compactly supported unit-mass mound initial condition.
pub fn mound_ic(grid: &Grid, x0: f64) -> Result<Snapshot> {
    if !(x0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mound half-width must be positive, got {x0}"
        )));
    }
    if x0 >= grid.x_max() {
        return Err(Error::InvalidParameter(format!(
            "mound support [-{x0}, {x0}] must be interior to the domain (x_max = {})",
            grid.x_max()
        )));
    }
    let values = grid.cell_centers().iter().map(|&x| mound_value(x, x0)).collect();
    Ok(Snapshot::new(0.0, values))
}

/// Narrow mound of the given half-width with discrete mass renormalized to
/// exactly one; stands in for a point source on the grid.
pub fn point_source_ic(grid: &Grid, width: f64) -> Result<Snapshot> {
    if width < 2.0 * grid.dx() {
        return Err(Error::InvalidParameter(format!(
            "point-source width {width} is below 2 dx = {}",
            2.0 * grid.dx()
        )));
    }
    if width >= grid.x_max() / 4.0 {
        return Err(Error::InvalidParameter(format!(
            "point-source width {width} must stay below x_max/4 = {}",
            grid.x_max() / 4.0
        )));
    }
    let mut snap = mound_ic(grid, width)?;
    let mass = snap.mass(grid);
    for v in &mut snap.values {
        *v /= mass;
    }
    Ok(snap)
}

#[inline]
fn pow_fast(base: f64, exponent: f64) -> f64 {
    if exponent == 0.0 {
        1.0
    } else if exponent == 1.0 {
        base
    } else if exponent == 2.0 {
        base * base
    } else {
        base.powf(exponent)
    }
}

/// Interface diffusivity D = ((vL+vR)/2)^gamma0 * |g|^m with g = (vR-vL)/dx.
///
/// For m >= 0 no regularization is applied, so the degeneracy is genuine and
/// the diffusivity vanishes exactly in vacuum. For m in (-1, 0), |g|^m blows
/// up at extrema and a small gradient floor proportional to the local value
/// scale is added.
pub fn interface_diffusivity(v_left: f64, v_right: f64, dx: f64, params: &DivParams) -> f64 {
    let avg = 0.5 * (v_left + v_right);
    let v_factor = pow_fast(avg, params.gamma0);
    let m = params.m;
    let grad_factor = if m == 0.0 {
        1.0
    } else if m > 0.0 {
        pow_fast(((v_right - v_left) / dx).abs(), m)
    } else {
        let scale = v_left.max(v_right);
        if scale == 0.0 {
            return 0.0;
        }
        let eps_g = 1e-12 * scale / dx;
        (((v_right - v_left) / dx).abs() + eps_g).powf(m)
    };
    v_factor * grad_factor
}

/// Interface flux F = D * (vR - vL)/dx; exactly zero when vL = vR = 0.
pub fn interface_flux(v_left: f64, v_right: f64, dx: f64, params: &DivParams) -> f64 {
    interface_diffusivity(v_left, v_right, dx, params) * (v_right - v_left) / dx
}

/// Result of one accepted backward-Euler step.
#[derive(Debug, Clone)]
pub struct StepResult {
    pub snapshot: Snapshot,
    pub picard_iters: usize,
    pub residual: f64,
    /// Most negative value before clamping.
    pub min_before_clamp: f64,
}

/// One backward-Euler step of size `dt` from `state`.
///
/// Errors with [`Error::StepFailure`] when Picard does not converge and with
/// [`Error::NegativeValue`] when the converged iterate undershoots below the
/// abort level; the caller halves dt and retries in both cases.
pub fn step(
    state: &Snapshot,
    dt: f64,
    params: &DivParams,
    grid: &Grid,
    tol: f64,
    max_iters: usize,
) -> Result<StepResult> {
    let n = grid.n_cells();
    assert_eq!(state.values.len(), n, "state does not match the grid");
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dt must be positive, got {dt}"
        )));
    }

    let dx = grid.dx();
    let r = params.q0 * dt / (dx * dx);

    let mut current = state.values.clone();
    let mut next = vec![0.0; n];
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut diffusivity = vec![0.0; n - 1];
    let mut scratch = Vec::new();

    let mut residual = f64::INFINITY;
    for iter in 1..=max_iters {
        for i in 0..n - 1 {
            diffusivity[i] = interface_diffusivity(current[i], current[i + 1], dx, params);
        }
        for i in 0..n {
            let d_left = if i == 0 { 0.0 } else { diffusivity[i - 1] };
            let d_right = if i == n - 1 { 0.0 } else { diffusivity[i] };
            lower[i] = -r * d_left;
            diag[i] = 1.0 + r * (d_left + d_right);
            upper[i] = -r * d_right;
        }
        next.copy_from_slice(&state.values);
        tridiag::solve_in_place(&lower, &diag, &upper, &mut next, &mut scratch);

        residual = current
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut current, &mut next);
        if residual < tol {
            let min_before_clamp = current.iter().copied().fold(f64::INFINITY, f64::min);
            if min_before_clamp < UNDERSHOOT_ABORT {
                let index = current
                    .iter()
                    .position(|&v| v == min_before_clamp)
                    .unwrap_or(0);
                return Err(Error::NegativeValue {
                    index,
                    value: min_before_clamp,
                });
            }
            for v in &mut current {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
            return Ok(StepResult {
                snapshot: Snapshot::new(state.t + dt, current),
                picard_iters: iter,
                residual,
                min_before_clamp,
            });
        }
    }

    Err(Error::StepFailure {
        residual,
        iters: max_iters,
    })
}

fn check_boundary_guard(values: &[f64], grid: &Grid, t: f64) -> Result<()> {
    let n = values.len();
    for i in 0..GUARD_CELLS.min(n) {
        if values[i] > GUARD_LEVEL {
            return Err(Error::BoundaryContact {
                t,
                value: values[i],
                cells: GUARD_CELLS,
                side: -grid.x_max(),
            });
        }
        if values[n - 1 - i] > GUARD_LEVEL {
            return Err(Error::BoundaryContact {
                t,
                value: values[n - 1 - i],
                cells: GUARD_CELLS,
                side: grid.x_max(),
            });
        }
    }
    Ok(())
}

/// Advance the initial condition through the schedule, recording snapshots
/// exactly at the requested times.
///
/// The step size halves on a rejected step and grows by 1.2x on success, up
/// to `dt_max`. The run aborts if dt underflows below 1e-12 t_end or if the
/// front enters the boundary guard band (the Neumann boundaries must stay
/// irrelevant to the interior dynamics).
pub fn run(
    ic: &Snapshot,
    params: &DivParams,
    grid: &Grid,
    schedule: &Schedule,
) -> Result<Trajectory> {
    if ic.t != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "initial snapshot must be at t = 0, got {}",
            ic.t
        )));
    }
    if ic.values.len() != grid.n_cells() {
        return Err(Error::InvalidParameter(format!(
            "initial snapshot has {} cells, grid has {}",
            ic.values.len(),
            grid.n_cells()
        )));
    }
    if let Some(&value) = ic.values.iter().find(|&&v| v < 0.0) {
        let index = ic.values.iter().position(|&v| v == value).unwrap_or(0);
        return Err(Error::NegativeValue { index, value });
    }
    check_boundary_guard(&ic.values, grid, 0.0)?;

    let dt_floor = 1e-12 * schedule.t_end;
    let mut trajectory = Trajectory {
        params: *params,
        grid: grid.clone(),
        snapshots: vec![ic.clone()],
        solver_stats: Vec::new(),
        rejected_steps: 0,
        min_before_clamp: 0.0,
    };

    let mut state = ic.clone();
    let mut t = 0.0;
    let mut dt = schedule.dt_initial;

    for &target in &schedule.snapshot_times {
        while t < target {
            let remaining = target - t;
            let lands_on_target = dt >= remaining;
            let dt_try = if lands_on_target { remaining } else { dt };
            match step(
                &state,
                dt_try,
                params,
                grid,
                schedule.picard_tol,
                schedule.picard_max_iters,
            ) {
                Ok(result) => {
                    t = if lands_on_target { target } else { t + dt_try };
                    state = result.snapshot;
                    state.t = t;
                    check_boundary_guard(&state.values, grid, t)?;
                    trajectory.min_before_clamp =
                        trajectory.min_before_clamp.min(result.min_before_clamp);
                    trajectory.solver_stats.push(StepStats {
                        t,
                        dt: dt_try,
                        picard_iters: result.picard_iters,
                        residual: result.residual,
                    });
                    dt = (dt * 1.2).min(schedule.dt_max);
                }
                Err(Error::StepFailure { .. }) | Err(Error::NegativeValue { .. }) => {
                    trajectory.rejected_steps += 1;
                    dt = dt_try * 0.5;
                    if dt < dt_floor {
                        return Err(Error::DtUnderflow {
                            t,
                            dt,
                            floor: dt_floor,
                        });
                    }
                }
                Err(other) => return Err(other),
            }
        }
        trajectory.snapshots.push(state.clone());
    }

    Ok(trajectory)
}
