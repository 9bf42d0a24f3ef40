//! Canned target systems used by the scenarios and the test suites.

use crate::error::Result;
use crate::polynomial;
use crate::target::{FactorFn, TargetSystem};

/// dx/dt = a x.
pub fn linear_1d(a: f64) -> TargetSystem {
    let mut sys = TargetSystem::new(1).unwrap();
    sys.add_monomial(0, a, vec![1]).unwrap();
    sys
}

/// dx/dt = x - x^2; stable fixed point at x = 1, unstable at 0.
pub fn logistic_1d() -> TargetSystem {
    let mut sys = TargetSystem::new(1).unwrap();
    sys.add_monomial(0, 1.0, vec![1]).unwrap();
    sys.add_monomial(0, -1.0, vec![2]).unwrap();
    sys
}

/// `dx/dt = sum coeffs[k] x^k`.
pub fn polynomial_1d(coeffs: &[f64]) -> TargetSystem {
    let mut sys = TargetSystem::new(1).unwrap();
    for (k, &c) in coeffs.iter().enumerate() {
        if c != 0.0 {
            sys.add_monomial(0, c, vec![k as u32]).unwrap();
        }
    }
    if coeffs.iter().all(|&c| c == 0.0) {
        sys.add_monomial(0, 0.0, vec![0]).unwrap();
    }
    sys
}

/// V(x) = a0 + a1 x + (a2/2) x^2 + (a3/3) x^3 + (a4/4) x^4 with the gradient
/// flow dx/dt = -V'(x) = -(a1 + a2 x + a3 x^2 + a4 x^3).
#[derive(Debug, Clone, Copy)]
pub struct QuarticPotential {
    pub a: [f64; 5],
}

/// Double-well parameter set used by the barrier-escape scenario: minima near
/// x = -3.674 and x = 7.876 (global), maximum near x = 0.862.
pub const DOUBLE_WELL: QuarticPotential = QuarticPotential {
    a: [0.0, 9.85, -10.0, -2.0, 0.395],
};

/// Cubic-free variant with a single minimum near x = -5.843; used by the
/// random-projector scenario.
pub const SINGLE_WELL: QuarticPotential = QuarticPotential {
    a: [0.0, 9.85, -10.0, -2.0, 0.0],
};

impl QuarticPotential {
    pub fn new(a: [f64; 5]) -> Self {
        Self { a }
    }

    pub fn value(&self, x: f64) -> f64 {
        let [a0, a1, a2, a3, a4] = self.a;
        a0 + a1 * x + a2 / 2.0 * x * x + a3 / 3.0 * x.powi(3) + a4 / 4.0 * x.powi(4)
    }

    /// V'(x) coefficients, ascending.
    pub fn slope_coefficients(&self) -> [f64; 4] {
        [self.a[1], self.a[2], self.a[3], self.a[4]]
    }

    pub fn slope(&self, x: f64) -> f64 {
        polynomial::eval(&self.slope_coefficients(), x)
    }

    pub fn curvature(&self, x: f64) -> f64 {
        polynomial::eval(&polynomial::derivative(&self.slope_coefficients()), x)
    }

    /// dx/dt = -V'(x).
    pub fn gradient_system(&self) -> TargetSystem {
        let [a1, a2, a3, a4] = self.slope_coefficients();
        polynomial_1d(&[-a1, -a2, -a3, -a4])
    }

    /// Real critical points of V, ascending.
    pub fn critical_points(&self) -> Result<Vec<f64>> {
        polynomial::real_roots(&self.slope_coefficients(), 1e-9)
    }

    pub fn minima(&self) -> Result<Vec<f64>> {
        Ok(self
            .critical_points()?
            .into_iter()
            .filter(|&x| self.curvature(x) > 0.0)
            .collect())
    }

    pub fn maxima(&self) -> Result<Vec<f64>> {
        Ok(self
            .critical_points()?
            .into_iter()
            .filter(|&x| self.curvature(x) < 0.0)
            .collect())
    }

    pub fn global_minimum(&self) -> Result<Option<f64>> {
        let minima = self.minima()?;
        Ok(minima
            .into_iter()
            .min_by(|&a, &b| self.value(a).partial_cmp(&self.value(b)).unwrap()))
    }
}

/// Gradient flow of V(x, y) = exp(x^2/2 - y^2/2 + y^4/4): local minima at
/// (0, 1) and (0, -1), saddle at the origin.
pub fn exp_potential_2d() -> TargetSystem {
    let gx = FactorFn::exp_of_quadratic(0.5, 0.0);
    let gy = FactorFn::ExpPoly(vec![0.0, 0.0, -0.5, 0.0, 0.25]);
    let mut sys = TargetSystem::new(2).unwrap();
    // f_x = -x V
    sys.add_factorized(
        0,
        -1.0,
        vec![(0, FactorFn::Power(1)), (0, gx.clone()), (1, gy.clone())],
    )
    .unwrap();
    // f_y = (y - y^3) V
    sys.add_factorized(
        1,
        1.0,
        vec![(1, FactorFn::Power(1)), (0, gx.clone()), (1, gy.clone())],
    )
    .unwrap();
    sys.add_factorized(1, -1.0, vec![(1, FactorFn::Power(3)), (0, gx), (1, gy)])
        .unwrap();
    sys
}

pub fn exp_potential_2d_value(x: f64, y: f64) -> f64 {
    (x * x / 2.0 - y * y / 2.0 + y.powi(4) / 4.0).exp()
}

/// Damped single-particle dynamics in a quartic potential, variables (x, p):
/// dx/dt = p/mass, dp/dt = -V'(x) - chi p / mass.
pub fn dissipative_particle(mass: f64, chi: f64, potential: &QuarticPotential) -> TargetSystem {
    let [a1, a2, a3, a4] = potential.slope_coefficients();
    let mut sys = TargetSystem::new(2).unwrap();
    sys.add_monomial(0, 1.0 / mass, vec![0, 1]).unwrap();
    for (k, c) in [a1, a2, a3, a4].into_iter().enumerate() {
        if c != 0.0 {
            sys.add_monomial(1, -c, vec![k as u32, 0]).unwrap();
        }
    }
    sys.add_monomial(1, -chi / mass, vec![0, 1]).unwrap();
    sys
}

/// Single resistive-memory cell: dx/dt = alpha s / (1 - chi x) - alpha x,
/// the gradient flow of V(x) = x^2/2 + (s/chi) ln(1 - chi x) scaled by alpha.
/// Domain hint keeps x inside [0, 1).
pub fn memristor_scalar(chi: f64, s: f64, alpha: f64) -> Result<TargetSystem> {
    let mut sys = TargetSystem::new(1)?;
    sys.add_factorized(
        0,
        alpha * s,
        vec![(0, FactorFn::ReciprocalAffine { c0: 1.0, c1: -chi })],
    )?;
    sys.add_monomial(0, -alpha, vec![1])?;
    sys.with_domain(vec![(0.0, 1.0)])
}

/// V(x, s) = x^2/2 + (s/chi) ln(1 - chi x).
pub fn memristor_potential_value(x: f64, chi: f64, s: f64) -> f64 {
    if chi == 0.0 {
        // limit chi -> 0: x^2/2 - s x
        return x * x / 2.0 - s * x;
    }
    x * x / 2.0 + s / chi * (1.0 - chi * x).ln()
}

/// Stationary points of the memristor potential: roots of x (1 - chi x) = s
/// inside [0, 1), ascending. The lower root is the minimum.
pub fn memristor_stationary_points(chi: f64, s: f64) -> Result<Vec<f64>> {
    if chi == 0.0 {
        return Ok(vec![s]);
    }
    let roots = polynomial::real_roots(&[s, -1.0, chi], 1e-9)?;
    Ok(roots
        .into_iter()
        .filter(|&x| (0.0..1.0).contains(&x))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_well_has_three_critical_points() {
        let pts = DOUBLE_WELL.critical_points().unwrap();
        assert_eq!(pts.len(), 3);
        assert!((pts[0] + 3.6742099727).abs() < 1e-8);
        assert!((pts[1] - 0.8617542065).abs() < 1e-8);
        assert!((pts[2] - 7.8757469054).abs() < 1e-8);
        assert_eq!(DOUBLE_WELL.minima().unwrap().len(), 2);
        let global = DOUBLE_WELL.global_minimum().unwrap().unwrap();
        assert!((global - 7.8757469054).abs() < 1e-8);
    }

    #[test]
    fn single_well_has_one_minimum() {
        let minima = SINGLE_WELL.minima().unwrap();
        assert_eq!(minima.len(), 1);
        assert!((minima[0] + 5.8429029301).abs() < 1e-8);
    }

    #[test]
    fn memristor_stationary_point_matches_potential_gradient() {
        let (chi, s) = (0.9, 0.15);
        let pts = memristor_stationary_points(chi, s).unwrap();
        assert_eq!(pts.len(), 2);
        assert!((pts[0] - 0.17875945).abs() < 1e-7);
        // dV/dx = x - s/(1 - chi x) vanishes there.
        let dv = pts[0] - s / (1.0 - chi * pts[0]);
        assert!(dv.abs() < 1e-12);
    }

    #[test]
    fn dissipative_particle_momentum_feeds_position() {
        let sys = dissipative_particle(2.0, 0.5, &DOUBLE_WELL);
        let v = sys.eval(&[0.0, 3.0]).unwrap();
        assert!((v[0] - 1.5).abs() < 1e-15);
        // dp/dt at x=0: -a1 - chi*p/m
        assert!((v[1] - (-9.85 - 0.5 * 1.5)).abs() < 1e-12);
    }
}
