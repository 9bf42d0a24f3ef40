//! Assembly and evaluation of the extended right-hand side
//! dX_i/dt = P F_i(X_1..X_m) b_i + G_i(P; X_i) for the three matrix maps and
//! the three decay families.

use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg;
use crate::projector::Projector;
use crate::target::{FactorFn, Ordering, TargetSystem, Term};

/// Default truncation degree for mixed-map expansions of transcendental
/// terms. Polynomial terms are never truncated.
pub const DEFAULT_SERIES_ORDER: usize = 40;

const B_PROJECTION_TOL: f64 = 1e-12;
/// Below this mean, the mean-field difference quotient switches to its series.
const PHI_SERIES_THRESHOLD: f64 = 1e-4;
const PHI_SERIES_ORDER: usize = 30;
/// Shift used when a similarity-transform diagonal touches zero.
const POSITIVITY_SHIFT: f64 = 1e-9;
const NEGATIVITY_LIMIT: f64 = 1e-6;

static SHIFT_WARNED: AtomicBool = AtomicBool::new(false);

/// The m extended variables, each an N-vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedState {
    m: usize,
    n: usize,
    columns: Vec<DVector<f64>>,
}

impl ExtendedState {
    pub fn new(columns: Vec<DVector<f64>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidDimension(
                "extended state needs m >= 1".into(),
            ));
        }
        let n = columns[0].len();
        if n == 0 || columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidDimension(
                "extended state columns must share a positive length".into(),
            ));
        }
        Ok(Self {
            m: columns.len(),
            n,
            columns,
        })
    }

    /// Replicated state X_i = x_i 1 (the banality configuration).
    pub fn uniform(x: &[f64], n: usize) -> Self {
        Self {
            m: x.len(),
            n,
            columns: x.iter().map(|&xi| DVector::from_element(n, xi)).collect(),
        }
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            columns: vec![DVector::zeros(n); m],
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn column(&self, i: usize) -> &DVector<f64> {
        &self.columns[i]
    }

    pub fn column_mut(&mut self, i: usize) -> &mut DVector<f64> {
        &mut self.columns[i]
    }

    pub fn columns(&self) -> &[DVector<f64>] {
        &self.columns
    }

    /// Flat layout: column i occupies entries [i n, (i+1) n).
    pub fn to_flat(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.m * self.n);
        for (i, col) in self.columns.iter().enumerate() {
            out.rows_mut(i * self.n, self.n).copy_from(col);
        }
        out
    }

    pub fn from_flat(flat: &DVector<f64>, m: usize, n: usize) -> Result<Self> {
        if flat.len() != m * n {
            return Err(Error::DimensionMismatch {
                context: "flat extended state",
                expected: m * n,
                got: flat.len(),
            });
        }
        let columns = (0..m).map(|i| flat.rows(i * n, n).into_owned()).collect();
        Ok(Self { m, n, columns })
    }

    pub fn is_finite(&self) -> bool {
        self.columns.iter().all(|c| c.iter().all(|x| x.is_finite()))
    }

    /// Per-variable means (the projected observable for the mean-field kind).
    pub fn means(&self) -> Vec<f64> {
        self.columns.iter().map(linalg::mean).collect()
    }
}

/// Which lift of the scalar equations to matrix arguments is used.
#[derive(Debug, Clone)]
pub enum MapKind {
    /// Componentwise diagonal evaluation (the map is a linear mix of the
    /// scalar systems).
    StandardCommutative,
    /// Fractional-power form (P (X_1^{j_1}..X_m^{j_m})^{1/k})^k per monomial.
    MixedCommutative,
    /// Ordered products of (P X_i) powers under the given ordering.
    StandardNonCommutative(Ordering),
}

/// The Ker(P)-damping term G(P; X).
#[derive(Debug, Clone)]
pub enum DecayFunction {
    /// -alpha (I - P) X.
    Standard { alpha: f64 },
    /// -D (I - P) X.
    GenA { d: DVector<f64> },
    /// -(I - P) D (I - P) X.
    GenB { d: DVector<f64> },
}

impl DecayFunction {
    pub fn standard(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(Error::InvalidDimension(format!(
                "standard decay needs alpha > 0, got {alpha}"
            )));
        }
        Ok(DecayFunction::Standard { alpha })
    }

    pub fn gen_a(d: DVector<f64>) -> Result<Self> {
        check_positive_diag(&d)?;
        Ok(DecayFunction::GenA { d })
    }

    pub fn gen_b(d: DVector<f64>) -> Result<Self> {
        check_positive_diag(&d)?;
        Ok(DecayFunction::GenB { d })
    }

    fn dim_ok(&self, n: usize) -> bool {
        match self {
            DecayFunction::Standard { .. } => true,
            DecayFunction::GenA { d } | DecayFunction::GenB { d } => d.len() == n,
        }
    }

    /// The linear operator of the decay as a dense matrix (used by the
    /// closed-form Jacobian assembly).
    pub fn operator(&self, omega: &Projector) -> DMatrix<f64> {
        let n = omega.dim();
        let complement = DMatrix::identity(n, n) - omega.matrix();
        match self {
            DecayFunction::Standard { alpha } => &complement * -*alpha,
            DecayFunction::GenA { d } => {
                let mut m = complement;
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] *= -d[i];
                    }
                }
                m
            }
            DecayFunction::GenB { d } => {
                let mut mid = complement.clone();
                for i in 0..n {
                    for j in 0..n {
                        mid[(i, j)] *= d[i];
                    }
                }
                -(&complement * mid)
            }
        }
    }
}

fn check_positive_diag(d: &DVector<f64>) -> Result<()> {
    if d.is_empty() || d.iter().any(|&x| x.is_nan() || x <= 0.0) {
        return Err(Error::InvalidDimension(
            "decay diagonal must be non-empty with strictly positive entries".into(),
        ));
    }
    Ok(())
}

/// G(P; X) for a vector x.
pub fn apply_decay(
    decay: &DecayFunction,
    omega: &Projector,
    x: &DVector<f64>,
) -> Result<DVector<f64>> {
    if x.len() != omega.dim() || !decay.dim_ok(omega.dim()) {
        return Err(Error::DimensionMismatch {
            context: "apply_decay",
            expected: omega.dim(),
            got: x.len(),
        });
    }
    let xc = omega.complement_apply(x);
    Ok(match decay {
        DecayFunction::Standard { alpha } => xc * -*alpha,
        DecayFunction::GenA { d } => -d.component_mul(&xc),
        DecayFunction::GenB { d } => -omega.complement_apply(&d.component_mul(&xc)),
    })
}

struct NcTerm {
    coeff: f64,
    factors: Vec<(usize, FactorFn)>,
    orderings: Vec<(Vec<usize>, f64)>,
}

struct MixedMonomial {
    coeff: f64,
    exponents: Vec<u32>,
    degree: u32,
}

struct MixedEquation {
    constant: f64,
    monomials: Vec<MixedMonomial>,
}

/// The assembled extended system. Immutable; `rhs` is a pure function of the
/// state, so independent trajectories may be evaluated concurrently.
pub struct PedsSystem {
    target: TargetSystem,
    omega: Projector,
    map: MapKind,
    decays: Vec<DecayFunction>,
    b: Vec<DVector<f64>>,
    series_order: usize,
    nc_terms: Option<Vec<Vec<NcTerm>>>,
    mixed: Option<Vec<MixedEquation>>,
}

pub struct PedsSystemBuilder {
    target: TargetSystem,
    omega: Projector,
    map: MapKind,
    decays: Option<Vec<DecayFunction>>,
    b: Option<Vec<DVector<f64>>>,
    series_order: usize,
}

impl PedsSystemBuilder {
    pub fn map(mut self, map: MapKind) -> Self {
        self.map = map;
        self
    }

    pub fn decays(mut self, decays: Vec<DecayFunction>) -> Self {
        self.decays = Some(decays);
        self
    }

    /// Standard decay with one alpha shared by every variable.
    pub fn uniform_standard_decay(mut self, alpha: f64) -> Self {
        let m = self.target.m();
        self.decays = Some(vec![DecayFunction::Standard { alpha }; m]);
        self
    }

    pub fn b_vectors(mut self, b: Vec<DVector<f64>>) -> Self {
        self.b = Some(b);
        self
    }

    pub fn series_order(mut self, order: usize) -> Self {
        self.series_order = order;
        self
    }

    pub fn build(self) -> Result<PedsSystem> {
        let m = self.target.m();
        let n = self.omega.dim();
        let decays = self
            .decays
            .unwrap_or_else(|| vec![DecayFunction::Standard { alpha: 1.0 }; m]);
        if decays.len() != m {
            return Err(Error::DimensionMismatch {
                context: "decay functions",
                expected: m,
                got: decays.len(),
            });
        }
        for d in &decays {
            match d {
                DecayFunction::Standard { alpha } => {
                    if alpha.is_nan() || *alpha <= 0.0 {
                        return Err(Error::InvalidDimension("decay alpha must be > 0".into()));
                    }
                }
                DecayFunction::GenA { d } | DecayFunction::GenB { d } => {
                    check_positive_diag(d)?;
                    if d.len() != n {
                        return Err(Error::DimensionMismatch {
                            context: "decay diagonal",
                            expected: n,
                            got: d.len(),
                        });
                    }
                }
            }
        }
        let b = self.b.unwrap_or_else(|| vec![linalg::ones(n); m]);
        if b.len() != m {
            return Err(Error::DimensionMismatch {
                context: "b vectors",
                expected: m,
                got: b.len(),
            });
        }
        for bi in &b {
            if bi.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "b vector length",
                    expected: n,
                    got: bi.len(),
                });
            }
            if self.omega.apply(bi).norm() <= B_PROJECTION_TOL {
                return Err(Error::Unsupported(
                    "P b vanishes; the embedding requires P b != 0".into(),
                ));
            }
        }
        let nc_terms = match &self.map {
            MapKind::StandardNonCommutative(ord) => Some(build_nc_terms(&self.target, ord)?),
            _ => None,
        };
        let mixed = match &self.map {
            MapKind::MixedCommutative => Some(build_mixed(&self.target, self.series_order)?),
            _ => None,
        };
        Ok(PedsSystem {
            target: self.target,
            omega: self.omega,
            map: self.map,
            decays,
            b,
            series_order: self.series_order,
            nc_terms,
            mixed,
        })
    }
}

fn build_nc_terms(target: &TargetSystem, ord: &Ordering) -> Result<Vec<Vec<NcTerm>>> {
    let mut out = Vec::with_capacity(target.m());
    for eq in target.equations() {
        let mut terms = Vec::with_capacity(eq.len());
        for term in eq {
            let (coeff, factors) = match term {
                Term::Monomial(t) => {
                    let f: Vec<(usize, FactorFn)> = t
                        .exponents
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(v, &e)| (v, FactorFn::Power(e)))
                        .collect();
                    (t.coefficient, f)
                }
                Term::Factorized(t) => (t.coefficient, t.factors.clone()),
            };
            let orderings = ord.coefficients(factors.len())?;
            terms.push(NcTerm {
                coeff,
                factors,
                orderings,
            });
        }
        out.push(terms);
    }
    Ok(out)
}

fn build_mixed(target: &TargetSystem, order: usize) -> Result<Vec<MixedEquation>> {
    let m = target.m();
    let mut out = Vec::with_capacity(m);
    for eq in target.equations() {
        let mut constant = 0.0;
        let mut monomials = Vec::new();
        for term in eq {
            match term {
                Term::Monomial(t) => {
                    let degree: u32 = t.exponents.iter().sum();
                    if degree == 0 {
                        constant += t.coefficient;
                    } else {
                        monomials.push(MixedMonomial {
                            coeff: t.coefficient,
                            exponents: t.exponents.clone(),
                            degree,
                        });
                    }
                }
                Term::Factorized(t) => {
                    // Per-variable series; factors sharing a variable multiply.
                    let mut per_var: Vec<Option<Vec<f64>>> = vec![None; m];
                    for (v, f) in &t.factors {
                        let s = f.series(order)?;
                        per_var[*v] = Some(match per_var[*v].take() {
                            Some(existing) => {
                                crate::target::series::mul_truncated(&existing, &s, order)
                            }
                            None => s,
                        });
                    }
                    expand_product(
                        &per_var,
                        t.coefficient,
                        order,
                        &mut constant,
                        &mut monomials,
                    );
                }
            }
        }
        out.push(MixedEquation {
            constant,
            monomials,
        });
    }
    Ok(out)
}

/// Cartesian expansion of per-variable series into multivariate monomials of
/// total degree <= order.
fn expand_product(
    per_var: &[Option<Vec<f64>>],
    coeff: f64,
    order: usize,
    constant: &mut f64,
    out: &mut Vec<MixedMonomial>,
) {
    let active: Vec<usize> = (0..per_var.len())
        .filter(|&v| per_var[v].is_some())
        .collect();
    let m = per_var.len();
    let mut exps = vec![0u32; m];
    recurse(
        per_var, &active, 0, coeff, 0, order, &mut exps, constant, out,
    );

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        per_var: &[Option<Vec<f64>>],
        active: &[usize],
        idx: usize,
        coeff: f64,
        degree: usize,
        order: usize,
        exps: &mut Vec<u32>,
        constant: &mut f64,
        out: &mut Vec<MixedMonomial>,
    ) {
        if coeff == 0.0 {
            return;
        }
        if idx == active.len() {
            if degree == 0 {
                *constant += coeff;
            } else {
                out.push(MixedMonomial {
                    coeff,
                    exponents: exps.clone(),
                    degree: degree as u32,
                });
            }
            return;
        }
        let v = active[idx];
        let series = per_var[v].as_ref().unwrap();
        for (j, &c) in series.iter().enumerate() {
            if degree + j > order {
                break;
            }
            if c == 0.0 {
                continue;
            }
            exps[v] = j as u32;
            recurse(
                per_var,
                active,
                idx + 1,
                coeff * c,
                degree + j,
                order,
                exps,
                constant,
                out,
            );
            exps[v] = 0;
        }
    }
}

impl PedsSystem {
    pub fn builder(target: TargetSystem, omega: Projector) -> PedsSystemBuilder {
        PedsSystemBuilder {
            target,
            omega,
            map: MapKind::StandardNonCommutative(Ordering::Standard),
            decays: None,
            b: None,
            series_order: DEFAULT_SERIES_ORDER,
        }
    }

    /// Mean-field projector, standard decay, b = 1.
    pub fn mean_field(target: TargetSystem, n: usize, map: MapKind, alpha: f64) -> Result<Self> {
        let omega = Projector::uniform_mean_field(n)?;
        Self::builder(target, omega)
            .map(map)
            .uniform_standard_decay(alpha)
            .build()
    }

    pub fn target(&self) -> &TargetSystem {
        &self.target
    }

    pub fn omega(&self) -> &Projector {
        &self.omega
    }

    pub fn map(&self) -> &MapKind {
        &self.map
    }

    pub fn decays(&self) -> &[DecayFunction] {
        &self.decays
    }

    pub fn b_vectors(&self) -> &[DVector<f64>] {
        &self.b
    }

    pub fn m(&self) -> usize {
        self.target.m()
    }

    pub fn n(&self) -> usize {
        self.omega.dim()
    }

    pub fn series_order(&self) -> usize {
        self.series_order
    }

    /// Projected observable per variable: mean(P X_i).
    pub fn projected(&self, state: &ExtendedState) -> Vec<f64> {
        state
            .columns()
            .iter()
            .map(|x| linalg::mean(&self.omega.apply(x)))
            .collect()
    }

    /// The full mN-dimensional derivative.
    pub fn rhs(&self, state: &ExtendedState) -> Result<ExtendedState> {
        if state.m() != self.m() || state.n() != self.n() {
            return Err(Error::DimensionMismatch {
                context: "rhs state",
                expected: self.m() * self.n(),
                got: state.m() * state.n(),
            });
        }
        let m = self.m();
        let mut columns = Vec::with_capacity(m);
        for i in 0..m {
            let drive = match &self.map {
                MapKind::StandardCommutative => self.commutative_drive(i, state)?,
                MapKind::StandardNonCommutative(_) => self.noncommutative_drive(i, state)?,
                MapKind::MixedCommutative => self.mixed_drive(i, state)?,
            };
            let decay = apply_decay(&self.decays[i], &self.omega, state.column(i))?;
            columns.push(self.omega.apply(&drive) + decay);
        }
        ExtendedState::new(columns)
    }

    pub fn rhs_flat(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        let state = ExtendedState::from_flat(y, self.m(), self.n())?;
        Ok(self.rhs(&state)?.to_flat())
    }

    /// Componentwise diagonal evaluation F_i = diag(f_i(X_{1,k}, ..)).
    fn commutative_drive(&self, i: usize, state: &ExtendedState) -> Result<DVector<f64>> {
        let n = self.n();
        let m = self.m();
        let mut out = DVector::zeros(n);
        let mut point = vec![0.0; m];
        for k in 0..n {
            for (v, p) in point.iter_mut().enumerate() {
                *p = state.column(v)[k];
            }
            out[k] = self.target.eval_equation(i, &point)? * self.b[i][k];
        }
        Ok(out)
    }

    /// Weighted permutation sum of factor chains applied to b_i.
    fn noncommutative_drive(&self, i: usize, state: &ExtendedState) -> Result<DVector<f64>> {
        let terms = &self.nc_terms.as_ref().unwrap()[i];
        let mut acc = DVector::zeros(self.n());
        for term in terms {
            for (perm, weight) in &term.orderings {
                let mut u = self.b[i].clone();
                // Rightmost factor acts first.
                for &slot in perm.iter().rev() {
                    let (var, f) = &term.factors[slot];
                    u = self.apply_factor(state.column(*var), f, &u, *var)?;
                }
                acc.axpy(term.coeff * weight, &u, 1.0);
            }
        }
        Ok(acc)
    }

    /// (P (X_1^{j_1} ... X_m^{j_m})^{1/k})^k b per expanded monomial.
    fn mixed_drive(&self, i: usize, state: &ExtendedState) -> Result<DVector<f64>> {
        let eq = &self.mixed.as_ref().unwrap()[i];
        let n = self.n();
        let mut acc = &self.b[i] * eq.constant;
        for mono in &eq.monomials {
            let mut diag = DVector::from_element(n, 1.0);
            for (v, &e) in mono.exponents.iter().enumerate() {
                if e > 0 {
                    let col = state.column(v);
                    for k in 0..n {
                        diag[k] *= col[k].powi(e as i32);
                    }
                }
            }
            let root = signed_root(&diag, mono.degree)?;
            let mut u = self.b[i].clone();
            for _ in 0..mono.degree {
                u = self.omega.apply(&root.component_mul(&u));
            }
            acc.axpy(mono.coeff, &u, 1.0);
        }
        Ok(acc)
    }

    /// F(P X) v for one scalar factor, by the cheapest exact route available.
    fn apply_factor(
        &self,
        x: &DVector<f64>,
        f: &FactorFn,
        v: &DVector<f64>,
        var: usize,
    ) -> Result<DVector<f64>> {
        match f {
            FactorFn::Power(0) => Ok(v.clone()),
            FactorFn::Power(p) => {
                let mut u = v.clone();
                for _ in 0..*p {
                    u = self.omega.apply(&x.component_mul(&u));
                }
                Ok(u)
            }
            _ => {
                if self.omega.is_trivial() {
                    let mut u = v.clone();
                    for k in 0..u.len() {
                        u[k] *= f.eval(x[k], var)?;
                    }
                    Ok(u)
                } else if self.omega.is_mean_field() {
                    mean_field_fn_apply(&self.omega, x, f, v, var)
                } else {
                    similarity_fn_apply(&self.omega, x, f, v, var)
                }
            }
        }
    }
}

/// Real k-th root of a diagonal, with the odd-k sign convention. Even roots
/// of negative entries have no real branch.
fn signed_root(diag: &DVector<f64>, k: u32) -> Result<DVector<f64>> {
    if k <= 1 {
        return Ok(diag.clone());
    }
    let inv = 1.0 / k as f64;
    let mut out = diag.clone();
    for i in 0..out.len() {
        let u = out[i];
        out[i] = if u >= 0.0 {
            u.powf(inv)
        } else if k % 2 == 1 {
            -(-u).powf(inv)
        } else {
            return Err(Error::Domain {
                variable: i,
                message: format!(
                    "mixed map: fractional power ({u:.3e})^(1/{k}) of a negative diagonal entry"
                ),
            });
        };
    }
    Ok(out)
}

/// `f(P1 X) v` in closed form for the rank-1 mean-field projector:
/// `f(P1 X) = f(0) I + phi(<x>) P1 X` with `phi(z) = (f(z) - f(0)) / z`.
fn mean_field_fn_apply(
    omega: &Projector,
    x: &DVector<f64>,
    f: &FactorFn,
    v: &DVector<f64>,
    var: usize,
) -> Result<DVector<f64>> {
    let z = linalg::mean(x);
    let f0 = f.eval(0.0, var)?;
    let phi = if z.abs() >= PHI_SERIES_THRESHOLD {
        (f.eval(z, var)? - f0) / z
    } else {
        // Cancellation-safe limit via the Taylor coefficients.
        let s = f.series(PHI_SERIES_ORDER)?;
        let mut acc = 0.0;
        for &c in s.iter().skip(1).rev() {
            acc = acc * z + c;
        }
        acc
    };
    let mut out = v * f0;
    out.axpy(phi, &omega.apply(&x.component_mul(v)), 1.0);
    Ok(out)
}

/// f(P X) v through the similarity transform sqrt(X) P sqrt(X); needs a
/// symmetric projector and a positive diagonal. States touching zero are
/// shifted just inside the domain.
fn similarity_fn_apply(
    omega: &Projector,
    x: &DVector<f64>,
    f: &FactorFn,
    v: &DVector<f64>,
    var: usize,
) -> Result<DVector<f64>> {
    let shifted = ensure_positive(x)?;
    let (p, lambda, sq) = symmetrized_eigen(omega, &shifted)?;
    let mut w = sq.component_mul(v);
    w = p.transpose() * w;
    for j in 0..w.len() {
        w[j] *= f.eval(lambda[j], var)?;
    }
    w = &p * w;
    for k in 0..w.len() {
        w[k] /= sq[k];
    }
    Ok(w)
}

fn ensure_positive(x: &DVector<f64>) -> Result<DVector<f64>> {
    let min = x.min();
    if min > 0.0 {
        return Ok(x.clone());
    }
    if min < -NEGATIVITY_LIMIT {
        return Err(Error::Domain {
            variable: x.imin(),
            message: format!("similarity transform needs a positive diagonal; entry {min:.3e}"),
        });
    }
    if !SHIFT_WARNED.swap(true, AtomicOrdering::Relaxed) {
        eprintln!(
            "warning: diagonal touching zero shifted by ~{POSITIVITY_SHIFT:.0e} for the similarity transform"
        );
    }
    let shift = POSITIVITY_SHIFT - min;
    Ok(x.map(|e| e + shift))
}

/// Eigendecomposition of sqrt(X) P sqrt(X); recomputed at every call because
/// X is a dynamical variable.
fn symmetrized_eigen(
    omega: &Projector,
    x: &DVector<f64>,
) -> Result<(DMatrix<f64>, DVector<f64>, DVector<f64>)> {
    if !omega.is_symmetric() {
        return Err(Error::Unsupported(
            "similarity-transform evaluation needs a symmetric projector".into(),
        ));
    }
    let n = omega.dim();
    let sq = x.map(f64::sqrt);
    let mut core = omega.matrix().clone();
    for i in 0..n {
        for j in 0..n {
            core[(i, j)] *= sq[i] * sq[j];
        }
    }
    let eig = SymmetricEigen::new(core);
    Ok((eig.eigenvectors, eig.eigenvalues, sq))
}

/// F(P X) as a dense matrix: sqrt(X)^{-1} P_x F(Sigma) P_x^{-1} sqrt(X) with
/// sqrt(X) P sqrt(X) = P_x Sigma P_x^{-1}. The scalar f is applied to the
/// (real) spectrum Sigma.
pub fn matrix_function_eval<F>(
    omega: &Projector,
    x_diag: &DVector<f64>,
    f: F,
) -> Result<DMatrix<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    if x_diag.len() != omega.dim() {
        return Err(Error::DimensionMismatch {
            context: "matrix_function_eval",
            expected: omega.dim(),
            got: x_diag.len(),
        });
    }
    if x_diag.min() <= 0.0 {
        return Err(Error::Domain {
            variable: x_diag.imin(),
            message: "matrix_function_eval needs strictly positive diagonal entries".into(),
        });
    }
    let (p, lambda, sq) = symmetrized_eigen(omega, x_diag)?;
    let n = omega.dim();
    let mut fl = DMatrix::zeros(n, n);
    for j in 0..n {
        fl[(j, j)] = f(lambda[j])?;
    }
    let mut out = &p * fl * p.transpose();
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] *= sq[j] / sq[i];
        }
    }
    Ok(out)
}

/// The materialized weighted permutation sum of (P X)^e products; exponent 0
/// contributes the identity.
pub fn noncommutative_monomial(
    omega: &Projector,
    states: &[(DVector<f64>, u32)],
    ord: &Ordering,
) -> Result<DMatrix<f64>> {
    let n = omega.dim();
    for (x, _) in states {
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                context: "noncommutative_monomial",
                expected: n,
                got: x.len(),
            });
        }
    }
    let coefficients = ord.coefficients(states.len())?;
    // (P X)^e per slot, computed once.
    let mut powers = Vec::with_capacity(states.len());
    for (x, e) in states {
        let mut base = omega.matrix().clone();
        for i in 0..n {
            for j in 0..n {
                base[(i, j)] *= x[j];
            }
        }
        let mut pow = DMatrix::identity(n, n);
        for _ in 0..*e {
            pow = &pow * &base;
        }
        powers.push(pow);
    }
    let mut acc = DMatrix::zeros(n, n);
    for (perm, weight) in &coefficients {
        let mut prod = DMatrix::identity(n, n);
        for &slot in perm {
            prod = &prod * &powers[slot];
        }
        acc += prod * *weight;
    }
    Ok(acc)
}
