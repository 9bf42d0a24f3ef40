//! Fixed-step time evolution of the extended and target systems, with
//! trajectory recording and projected observables.

use nalgebra::DVector;

use crate::embedding::{ExtendedState, PedsSystem};
use crate::error::{Error, Result};
use crate::projector::Projector;
use crate::target::TargetSystem;

/// Abort threshold on any state entry.
pub const DIVERGENCE_GUARD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExplicitEuler,
    RungeKutta4,
}

impl Method {
    pub fn token(self) -> &'static str {
        match self {
            Method::ExplicitEuler => "euler",
            Method::RungeKutta4 => "rk4",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "euler" => Some(Method::ExplicitEuler),
            "rk4" => Some(Method::RungeKutta4),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrationConfig {
    pub dt: f64,
    pub steps: usize,
    pub method: Method,
    pub record_stride: usize,
}

impl IntegrationConfig {
    pub fn new(dt: f64, steps: usize, method: Method) -> Result<Self> {
        if dt.is_nan() || dt <= 0.0 {
            return Err(Error::InvalidDimension(format!("dt must be > 0, got {dt}")));
        }
        if steps == 0 {
            return Err(Error::InvalidDimension("steps must be >= 1".into()));
        }
        Ok(Self {
            dt,
            steps,
            method,
            record_stride: 1,
        })
    }

    pub fn with_record_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride.max(1);
        self
    }
}

/// Autonomous right-hand side over a flat state vector.
pub trait OdeRhs {
    fn dim(&self) -> usize;
    fn eval(&self, y: &DVector<f64>) -> Result<DVector<f64>>;
}

impl OdeRhs for PedsSystem {
    fn dim(&self) -> usize {
        self.m() * self.n()
    }

    fn eval(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        self.rhs_flat(y)
    }
}

/// Wrap a closure as a right-hand side.
pub struct FnRhs<F> {
    pub dim: usize,
    pub f: F,
}

impl<F> OdeRhs for FnRhs<F>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        (self.f)(y)
    }
}

#[derive(Debug, Clone)]
pub struct RawTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
}

fn step(rhs: &dyn OdeRhs, y: &DVector<f64>, dt: f64, method: Method) -> Result<DVector<f64>> {
    match method {
        Method::ExplicitEuler => Ok(y + rhs.eval(y)? * dt),
        Method::RungeKutta4 => {
            let k1 = rhs.eval(y)?;
            let k2 = rhs.eval(&(y + &k1 * (dt / 2.0)))?;
            let k3 = rhs.eval(&(y + &k2 * (dt / 2.0)))?;
            let k4 = rhs.eval(&(y + &k3 * dt))?;
            Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
        }
    }
}

fn check_finite(y: &DVector<f64>, step_no: usize, time: f64) -> Result<()> {
    if y.iter()
        .any(|x| !x.is_finite() || x.abs() > DIVERGENCE_GUARD)
    {
        return Err(Error::Divergence {
            step: step_no,
            time,
            guard: DIVERGENCE_GUARD,
        });
    }
    Ok(())
}

/// Fixed-step integration recording every `record_stride`-th step (step 0 and
/// the final step always included).
pub fn integrate_ode(
    rhs: &dyn OdeRhs,
    y0: &DVector<f64>,
    cfg: &IntegrationConfig,
) -> Result<RawTrajectory> {
    if y0.len() != rhs.dim() {
        return Err(Error::DimensionMismatch {
            context: "initial state",
            expected: rhs.dim(),
            got: y0.len(),
        });
    }
    check_finite(y0, 0, 0.0)?;
    let mut times = vec![0.0];
    let mut states = vec![y0.clone()];
    let mut y = y0.clone();
    for k in 1..=cfg.steps {
        let t = k as f64 * cfg.dt;
        y = step(rhs, &y, cfg.dt, cfg.method)?;
        check_finite(&y, k, t)?;
        if k % cfg.record_stride == 0 || k == cfg.steps {
            times.push(t);
            states.push(y.clone());
        }
    }
    Ok(RawTrajectory { times, states })
}

/// Extended-system trajectory with the projected observables
/// x~_i(t) = (1/N) 1^T P X_i(t) recorded alongside the snapshots.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ExtendedState>,
    pub projected: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn terminal_projected(&self) -> &[f64] {
        self.projected.last().expect("non-empty trajectory")
    }
}

pub fn integrate(
    sys: &PedsSystem,
    x0: &ExtendedState,
    cfg: &IntegrationConfig,
) -> Result<Trajectory> {
    let raw = integrate_ode(sys, &x0.to_flat(), cfg)?;
    let mut states = Vec::with_capacity(raw.states.len());
    let mut projected = Vec::with_capacity(raw.states.len());
    for flat in &raw.states {
        let st = ExtendedState::from_flat(flat, sys.m(), sys.n())?;
        projected.push(sys.projected(&st));
        states.push(st);
    }
    Ok(Trajectory {
        times: raw.times,
        states,
        projected,
    })
}

/// Reference integration of the m-dimensional target with the same scheme;
/// the containment oracle.
#[derive(Debug, Clone)]
pub struct ScalarTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl ScalarTrajectory {
    pub fn terminal(&self) -> &[f64] {
        self.states.last().expect("non-empty trajectory")
    }
}

pub fn integrate_target(
    sys: &TargetSystem,
    x0: &[f64],
    cfg: &IntegrationConfig,
) -> Result<ScalarTrajectory> {
    let rhs = FnRhs {
        dim: sys.m(),
        f: |y: &DVector<f64>| Ok(DVector::from_vec(sys.eval(y.as_slice())?)),
    };
    let raw = integrate_ode(&rhs, &DVector::from_vec(x0.to_vec()), cfg)?;
    Ok(ScalarTrajectory {
        times: raw.times,
        states: raw.states.iter().map(|s| s.as_slice().to_vec()).collect(),
    })
}

/// ||(I - P) X_i(t)||_2 per variable per recorded time.
pub fn complement_norms(traj: &Trajectory, omega: &Projector) -> Vec<Vec<f64>> {
    traj.states
        .iter()
        .map(|st| {
            st.columns()
                .iter()
                .map(|x| omega.complement_apply(x).norm())
                .collect()
        })
        .collect()
}

/// Least-squares slope of ln(values) against time, negated: the measured
/// exponential decay rate. Entries at or below `floor` are excluded; returns
/// None with fewer than two usable samples.
pub fn fit_decay_rate(times: &[f64], values: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values.iter())
        .filter(|(_, &v)| v > floor)
        .map(|(&t, &v)| (t, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (st, sl): (f64, f64) = pts.iter().fold((0.0, 0.0), |(a, b), (t, l)| (a + t, b + l));
    let (mt, ml) = (st / n, sl / n);
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, l) in &pts {
        num += (t - mt) * (l - ml);
        den += (t - mt) * (t - mt);
    }
    if den == 0.0 {
        return None;
    }
    Some(-num / den)
}
