//! Projector operators: construction, validation and the identities the
//! embedding machinery relies on.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg;

/// Max allowed |P^2 - P| entry after symmetrization.
pub const IDEMPOTENCE_TOL: f64 = 1e-10;
/// Eigenvalues must sit within this distance of {0, 1}.
pub const SPECTRAL_TOL: f64 = 1e-8;
/// Condition-number cap on B B^t for Gram construction.
pub const GRAM_COND_LIMIT: f64 = 1e12;

const SYMMETRY_TOL: f64 = 1e-12;
/// Rank counts eigenvalues above this threshold; projector spectra cluster
/// at 0 and 1 so the cut is unambiguous.
const RANK_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectorKind {
    UniformMeanField,
    Trivial,
    Gram,
    Custom,
}

impl ProjectorKind {
    pub fn token(self) -> &'static str {
        match self {
            ProjectorKind::UniformMeanField => "uniform_mean_field",
            ProjectorKind::Trivial => "trivial",
            ProjectorKind::Gram => "gram",
            ProjectorKind::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "uniform_mean_field" => Some(ProjectorKind::UniformMeanField),
            "trivial" => Some(ProjectorKind::Trivial),
            "gram" => Some(ProjectorKind::Gram),
            "custom" => Some(ProjectorKind::Custom),
            _ => None,
        }
    }
}

/// A certified idempotent operator. Immutable after construction; all
/// operations are pure, so sharing across threads is safe.
#[derive(Debug, Clone)]
pub struct Projector {
    dim: usize,
    rank: usize,
    kind: ProjectorKind,
    matrix: DMatrix<f64>,
}

impl Projector {
    /// The rank-1 operator with every entry 1/n. Applying it to a vector
    /// yields the vector mean on every component.
    pub fn uniform_mean_field(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(
                "mean-field projector needs n >= 1".into(),
            ));
        }
        Ok(Self {
            dim: n,
            rank: 1,
            kind: ProjectorKind::UniformMeanField,
            matrix: DMatrix::from_element(n, n, 1.0 / n as f64),
        })
    }

    /// The identity; the only projector of full rank.
    pub fn trivial(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(
                "trivial projector needs n >= 1".into(),
            ));
        }
        Ok(Self {
            dim: n,
            rank: n,
            kind: ProjectorKind::Trivial,
            matrix: DMatrix::identity(n, n),
        })
    }

    /// Orthogonal projector onto the row space of `b` (K x N, full row rank).
    ///
    /// Built from the SVD of B^t rather than the explicit (B B^t)^{-1}: the
    /// inverse amplifies conditioning error. The result is symmetrized before
    /// validation.
    pub fn gram(b: &DMatrix<f64>) -> Result<Self> {
        let (k, n) = b.shape();
        if k == 0 || n == 0 {
            return Err(Error::InvalidDimension(
                "gram factor must be non-empty".into(),
            ));
        }
        if k > n {
            return Err(Error::SingularGram {
                cond: f64::INFINITY,
                limit: GRAM_COND_LIMIT,
            });
        }
        let svd = b.transpose().svd(true, false);
        let sv = &svd.singular_values;
        let (smax, smin) = (sv[0], sv[sv.len() - 1]);
        let cond = (smax / smin).powi(2);
        if cond.is_nan() || cond > GRAM_COND_LIMIT {
            return Err(Error::SingularGram {
                cond,
                limit: GRAM_COND_LIMIT,
            });
        }
        let u = svd
            .u
            .ok_or_else(|| Error::Numeric("SVD did not return U".into()))?;
        let mut m = &u * u.transpose();
        symmetrize(&mut m);
        Self::validated(m, ProjectorKind::Gram)
    }

    /// Validate an arbitrary matrix as a projector (kind `Custom`).
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.is_empty() {
            return Err(Error::InvalidDimension(
                "projector matrix must be square and non-empty".into(),
            ));
        }
        Self::validated(matrix, ProjectorKind::Custom)
    }

    fn validated(matrix: DMatrix<f64>, kind: ProjectorKind) -> Result<Self> {
        let defect = linalg::max_abs_diff(&(&matrix * &matrix), &matrix);
        if defect > IDEMPOTENCE_TOL {
            return Err(Error::NotIdempotent {
                defect,
                tol: IDEMPOTENCE_TOL,
            });
        }
        let rank = spectral_rank(&matrix)?;
        Ok(Self {
            dim: matrix.nrows(),
            rank,
            kind,
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn kind(&self) -> ProjectorKind {
        self.kind
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn is_mean_field(&self) -> bool {
        self.kind == ProjectorKind::UniformMeanField
    }

    pub fn is_trivial(&self) -> bool {
        self.kind == ProjectorKind::Trivial
    }

    pub fn is_symmetric(&self) -> bool {
        linalg::is_symmetric(&self.matrix, SYMMETRY_TOL)
    }

    /// P v, with O(n) fast paths for the mean-field and trivial kinds.
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        assert_eq!(v.len(), self.dim, "projector apply dimension mismatch");
        match self.kind {
            ProjectorKind::UniformMeanField => DVector::from_element(self.dim, linalg::mean(v)),
            ProjectorKind::Trivial => v.clone(),
            _ => &self.matrix * v,
        }
    }

    /// (I - P) v.
    pub fn complement_apply(&self, v: &DVector<f64>) -> DVector<f64> {
        assert_eq!(v.len(), self.dim, "complement apply dimension mismatch");
        match self.kind {
            ProjectorKind::UniformMeanField => {
                let m = linalg::mean(v);
                v.map(|x| x - m)
            }
            ProjectorKind::Trivial => DVector::zeros(self.dim),
            _ => v - &self.matrix * v,
        }
    }

    /// Dimension-checked (I - P) v; the result lies in Ker(P).
    pub fn complement_project(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "complement_project",
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(self.complement_apply(v))
    }

    /// exp(a P) = I + (e^a - 1) P.
    pub fn exponential(&self, a: f64) -> DMatrix<f64> {
        let mut out = DMatrix::identity(self.dim, self.dim);
        out += &self.matrix * (a.exp() - 1.0);
        out
    }

    /// Plain-text form: first line "N K kind", then N rows of N entries.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.dim, self.rank, self.kind.token());
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| format!("{:.17e}", self.matrix[(i, j)]))
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty projector file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!(
                "projector header must be \"N K kind\", got {header:?}"
            )));
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad N in header {header:?}")))?;
        let claimed_rank: usize = fields[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad K in header {header:?}")))?;
        let kind = ProjectorKind::parse(fields[2])
            .ok_or_else(|| Error::Parse(format!("unknown projector kind {:?}", fields[2])))?;
        let mut entries = Vec::with_capacity(n * n);
        for line in lines {
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad matrix entry {tok:?}")))?;
                entries.push(v);
            }
        }
        if entries.len() != n * n {
            return Err(Error::Parse(format!(
                "expected {} matrix entries, found {}",
                n * n,
                entries.len()
            )));
        }
        let matrix = DMatrix::from_row_slice(n, n, &entries);
        let p = match kind {
            ProjectorKind::UniformMeanField => {
                let want = 1.0 / n as f64;
                if matrix.iter().any(|&x| x != want) {
                    return Err(Error::Parse(
                        "uniform_mean_field kind requires every entry exactly 1/N".into(),
                    ));
                }
                Self::uniform_mean_field(n)?
            }
            ProjectorKind::Trivial => {
                if matrix != DMatrix::identity(n, n) {
                    return Err(Error::Parse(
                        "trivial kind requires the exact identity".into(),
                    ));
                }
                Self::trivial(n)?
            }
            _ => Self::validated(matrix, kind)?,
        };
        if p.rank != claimed_rank {
            return Err(Error::Parse(format!(
                "header claims rank {claimed_rank}, spectrum gives {}",
                p.rank
            )));
        }
        Ok(p)
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Count unit eigenvalues, rejecting spectra not clustered at {0, 1}.
fn spectral_rank(matrix: &DMatrix<f64>) -> Result<usize> {
    let mut rank = 0usize;
    let mut check = |re: f64, im: f64| -> Result<()> {
        let target = if re > RANK_THRESHOLD { 1.0 } else { 0.0 };
        let defect = ((re - target).powi(2) + im * im).sqrt();
        if defect > SPECTRAL_TOL {
            return Err(Error::BadSpectrum { value: re, defect });
        }
        if target == 1.0 {
            rank += 1;
        }
        Ok(())
    };
    if linalg::is_symmetric(matrix, SYMMETRY_TOL) {
        let eig = SymmetricEigen::new(matrix.clone());
        for &l in eig.eigenvalues.iter() {
            check(l, 0.0)?;
        }
    } else {
        for l in linalg::general_spectrum(matrix)?.iter() {
            check(l.re, l.im)?;
        }
    }
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn mean_field_n2_matches_hand_matrix() {
        let p = Projector::uniform_mean_field(2).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        assert_eq!(p.matrix(), &want);
        assert_eq!(p.rank(), 1);
    }

    #[test]
    fn mean_field_n1_degenerates_to_identity() {
        let p = Projector::uniform_mean_field(1).unwrap();
        assert_eq!(p.matrix()[(0, 0)], 1.0);
        assert_eq!(p.rank(), 1);
    }

    #[test]
    fn mean_field_n4_is_idempotent_by_direct_product() {
        let p = Projector::uniform_mean_field(4).unwrap();
        assert!(p.matrix().iter().all(|&x| x == 0.25));
        let sq = p.matrix() * p.matrix();
        assert!(linalg::max_abs_diff(&sq, p.matrix()) <= 1e-15);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(matches!(
            Projector::uniform_mean_field(0),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn gram_of_ones_row_equals_mean_field() {
        // Oracle: the explicit B^t (B B^t)^{-1} B route for B = 1^t.
        let n = 7;
        let b = DMatrix::from_element(1, n, 1.0);
        let bbt = &b * b.transpose();
        let inv = bbt.try_inverse().unwrap();
        let oracle = b.transpose() * inv * &b;
        let p = Projector::gram(&b).unwrap();
        assert!(linalg::max_abs_diff(p.matrix(), &oracle) <= 1e-12);
        let mf = Projector::uniform_mean_field(n).unwrap();
        assert!(linalg::max_abs_diff(p.matrix(), mf.matrix()) <= 1e-12);
        assert_eq!(p.rank(), 1);
    }

    #[test]
    fn gram_of_identity_is_trivial_projector() {
        let b = DMatrix::<f64>::identity(5, 5);
        let p = Projector::gram(&b).unwrap();
        assert!(linalg::max_abs_diff(p.matrix(), &DMatrix::identity(5, 5)) <= 1e-12);
        assert_eq!(p.rank(), 5);
    }

    #[test]
    fn random_gram_rank_counted_by_symmetric_eigensolver() {
        let mut rng = StdRng::seed_from_u64(11);
        let b = DMatrix::from_fn(10, 50, |_, _| rng.gen::<f64>());
        let p = Projector::gram(&b).unwrap();
        assert_eq!(p.rank(), 10);
        let sq = p.matrix() * p.matrix();
        assert!(linalg::max_abs_diff(&sq, p.matrix()) <= IDEMPOTENCE_TOL);
        // Independent count: symmetric eigensolver on the produced matrix.
        let eig = SymmetricEigen::new(p.matrix().clone());
        let ones = eig.eigenvalues.iter().filter(|&&l| l > 0.5).count();
        assert_eq!(ones, 10);
    }

    #[test]
    fn rank_deficient_gram_rejected() {
        // Duplicate rows make B B^t singular.
        let mut b = DMatrix::from_element(2, 6, 0.0);
        for j in 0..6 {
            b[(0, j)] = j as f64 + 1.0;
            b[(1, j)] = 2.0 * (j as f64 + 1.0);
        }
        assert!(matches!(
            Projector::gram(&b),
            Err(Error::SingularGram { .. })
        ));
    }

    #[test]
    fn wide_gram_factor_rejected() {
        let b = DMatrix::from_element(4, 2, 1.0);
        assert!(matches!(
            Projector::gram(&b),
            Err(Error::SingularGram { .. })
        ));
    }

    #[test]
    fn exponential_at_zero_is_identity() {
        let p = Projector::uniform_mean_field(3).unwrap();
        let e = p.exponential(0.0);
        assert!(linalg::max_abs_diff(&e, &DMatrix::identity(3, 3)) <= 1e-15);
    }

    fn taylor_exp(m: &DMatrix<f64>, terms: usize) -> DMatrix<f64> {
        let n = m.nrows();
        let mut acc = DMatrix::identity(n, n);
        let mut pow = DMatrix::identity(n, n);
        for k in 1..=terms {
            pow = (&pow * m) / k as f64;
            acc += &pow;
        }
        acc
    }

    #[test]
    fn exponential_matches_taylor_series_mean_field() {
        let p = Projector::uniform_mean_field(2).unwrap();
        let direct = p.exponential(1.0);
        let oracle = taylor_exp(&(p.matrix() * 1.0), 30);
        assert!(linalg::max_abs_diff(&direct, &oracle) <= 1e-12);
    }

    #[test]
    fn exponential_matches_taylor_series_gram() {
        let mut rng = StdRng::seed_from_u64(3);
        let b = DMatrix::from_fn(3, 6, |_, _| rng.gen::<f64>() - 0.3);
        let p = Projector::gram(&b).unwrap();
        assert_eq!(p.rank(), 3);
        let direct = p.exponential(-2.0);
        let oracle = taylor_exp(&(p.matrix() * -2.0), 30);
        assert!(linalg::max_abs_diff(&direct, &oracle) <= 1e-12);
    }

    #[test]
    fn complement_annihilates_uniform_vectors() {
        let p = Projector::uniform_mean_field(5).unwrap();
        let v = DVector::from_element(5, 3.7);
        let c = p.complement_project(&v).unwrap();
        assert!(c.amax() <= 1e-15);
    }

    #[test]
    fn complement_of_3_1_is_1_minus1() {
        let p = Projector::uniform_mean_field(2).unwrap();
        let c = p
            .complement_project(&DVector::from_vec(vec![3.0, 1.0]))
            .unwrap();
        assert!((c[0] - 1.0).abs() <= 1e-15);
        assert!((c[1] + 1.0).abs() <= 1e-15);
    }

    #[test]
    fn trivial_complement_is_zero() {
        let p = Projector::trivial(4).unwrap();
        let v = DVector::from_vec(vec![1.0, -2.0, 3.0, 0.5]);
        assert!(p.complement_project(&v).unwrap().amax() == 0.0);
    }

    #[test]
    fn complement_dimension_checked() {
        let p = Projector::uniform_mean_field(3).unwrap();
        let v = DVector::from_vec(vec![1.0, 2.0]);
        assert!(matches!(
            p.complement_project(&v),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn non_idempotent_matrix_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[0.9, 0.0, 0.0, 0.2]);
        assert!(matches!(
            Projector::from_matrix(m),
            Err(Error::BadSpectrum { .. }) | Err(Error::NotIdempotent { .. })
        ));
    }

    #[test]
    fn text_round_trip_preserves_everything() {
        let mut rng = StdRng::seed_from_u64(9);
        let b = DMatrix::from_fn(4, 9, |_, _| rng.gen::<f64>());
        let p = Projector::gram(&b).unwrap();
        let back = Projector::from_text(&p.to_text()).unwrap();
        assert_eq!(back.dim(), p.dim());
        assert_eq!(back.rank(), p.rank());
        assert_eq!(back.kind(), p.kind());
        assert_eq!(back.matrix(), p.matrix());
    }

    #[test]
    fn text_rank_claim_is_checked() {
        let p = Projector::uniform_mean_field(3).unwrap();
        let tampered = p.to_text().replacen("3 1", "3 2", 1);
        assert!(Projector::from_text(&tampered).is_err());
    }
}
