//! Projection matrices W with cached Moore-Penrose pseudo-inverses.

use super::ScaError;
use nalgebra::{DMatrix, DVector};
use rand::RngCore;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionKind {
    Identity,
    RandomGaussian,
    Pca,
}

impl ProjectionKind {
    pub fn tag(self) -> u8 {
        match self {
            ProjectionKind::Identity => 0,
            ProjectionKind::RandomGaussian => 1,
            ProjectionKind::Pca => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(ProjectionKind::Identity),
            1 => Some(ProjectionKind::RandomGaussian),
            2 => Some(ProjectionKind::Pca),
            _ => None,
        }
    }
}

/// An L x N projection with its pseudo-inverse.
#[derive(Debug, Clone)]
pub struct Projection {
    w: DMatrix<f64>,
    pinv: DMatrix<f64>,
    kind: ProjectionKind,
}

impl Projection {
    pub fn identity(n: usize) -> Self {
        Self {
            w: DMatrix::identity(n, n),
            pinv: DMatrix::identity(n, n),
            kind: ProjectionKind::Identity,
        }
    }

    /// L x N matrix of iid N(0, 1/N) entries.
    pub fn random_gaussian(l: usize, n: usize, rng: &mut dyn RngCore) -> Result<Self, ScaError> {
        let scale = 1.0 / (n as f64).sqrt();
        let w = DMatrix::from_fn(l, n, |_, _| scale * crate::math::standard_normal_sample(rng));
        let pinv = w
            .clone()
            .svd(true, true)
            .pseudo_inverse(1e-12)
            .map_err(|_| ScaError::RankDeficient)?;
        Ok(Self { w, pinv, kind: ProjectionKind::RandomGaussian })
    }

    pub fn from_parts(w: DMatrix<f64>, pinv: DMatrix<f64>, kind: ProjectionKind) -> Self {
        Self { w, pinv, kind }
    }

    pub fn w(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn pinv(&self) -> &DMatrix<f64> {
        &self.pinv
    }

    pub fn kind(&self) -> ProjectionKind {
        self.kind
    }

    /// Output dimension L.
    pub fn l(&self) -> usize {
        self.w.nrows()
    }

    /// Input dimension N.
    pub fn n(&self) -> usize {
        self.w.ncols()
    }

    pub fn project(&self, x: &DVector<f64>) -> Result<DVector<f64>, ScaError> {
        if x.len() != self.n() {
            return Err(ScaError::DimensionMismatch { expected: self.n(), got: x.len() });
        }
        Ok(&self.w * x)
    }
}

/// PCA projection from a column-per-sample data matrix (N x C).
///
/// Rows of W are unit-norm eigenvectors of the sample covariance
/// (1/C) X X^T in descending eigenvalue order; each row is oriented so
/// its largest-magnitude entry is positive.
pub fn pca_projection(data: &DMatrix<f64>) -> Result<Projection, ScaError> {
    let (n, c) = (data.nrows(), data.ncols());
    if c < n {
        return Err(ScaError::NotEnoughSamples { rows: n, cols: c });
    }
    let cov = data * data.transpose() / c as f64;
    let eig = cov.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap().then(a.cmp(&b))
    });
    let max_ev = eig.eigenvalues[order[0]];
    if !(max_ev > 0.0) || eig.eigenvalues[order[n - 1]] <= 1e-10 * max_ev {
        return Err(ScaError::RankDeficient);
    }
    let mut w = DMatrix::zeros(n, n);
    for (row, &idx) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(idx).clone_owned();
        v /= v.norm();
        // deterministic sign: largest-magnitude entry positive
        let mut lead = 0;
        for i in 1..n {
            if v[i].abs() > v[lead].abs() {
                lead = i;
            }
        }
        if v[lead] < 0.0 {
            v = -v;
        }
        w.set_row(row, &v.transpose());
    }
    let pinv = w.transpose();
    Ok(Projection::from_parts(w, pinv, ProjectionKind::Pca))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;

    fn moore_penrose_residual(p: &Projection) -> f64 {
        (p.w() * p.pinv() * p.w() - p.w()).norm()
    }

    #[test]
    fn identity_projection() {
        let p = Projection::identity(4);
        assert_eq!(p.l(), 4);
        assert_eq!(p.kind(), ProjectionKind::Identity);
        assert!(moore_penrose_residual(&p) < 1e-12);
    }

    #[test]
    fn random_gaussian_pseudo_inverse() {
        let mut rng = derive_rng(11, &["proj", "gauss"], 0);
        for (l, n) in [(12, 6), (6, 6), (4, 8)] {
            let p = Projection::random_gaussian(l, n, &mut rng).unwrap();
            assert!(moore_penrose_residual(&p) < 1e-8, "l={l} n={n}");
        }
    }

    #[test]
    fn pca_orthogonal_for_isotropic_data() {
        let mut rng = derive_rng(11, &["proj", "pca"], 0);
        let data = DMatrix::from_fn(8, 5000, |_, _| crate::math::standard_normal_sample(&mut rng));
        let p = pca_projection(&data).unwrap();
        let gram = p.w() * p.w().transpose();
        assert!((gram - DMatrix::identity(8, 8)).norm() < 1e-8);
        // orthonormal W: pseudo-inverse is the transpose
        assert!((p.pinv() - p.w().transpose()).norm() < 1e-12);
        assert!(moore_penrose_residual(&p) < 1e-8);
    }

    #[test]
    fn pca_axis_aligned_covariance() {
        let mut rng = derive_rng(11, &["proj", "pca-axis"], 0);
        // diag(4, 1) covariance: leading eigenvector is e1
        let data = DMatrix::from_fn(2, 20000, |r, _| {
            let scale = if r == 0 { 2.0 } else { 1.0 };
            scale * crate::math::standard_normal_sample(&mut rng)
        });
        let p = pca_projection(&data).unwrap();
        let first = p.w().row(0);
        assert!(first[0].abs() > 0.999, "row0 = {first:?}");
        // sign convention makes the dominant entry positive
        assert!(first[0] > 0.0);
    }

    #[test]
    fn pca_rejects_thin_data() {
        let data = DMatrix::zeros(4, 3);
        assert!(matches!(pca_projection(&data), Err(ScaError::NotEnoughSamples { .. })));
    }

    #[test]
    fn pca_rejects_rank_deficient() {
        // duplicated coordinate -> singular covariance
        let mut rng = derive_rng(11, &["proj", "pca-sing"], 0);
        let base = DMatrix::from_fn(1, 100, |_, _| crate::math::standard_normal_sample(&mut rng));
        let mut data = DMatrix::zeros(2, 100);
        data.set_row(0, &base.row(0));
        data.set_row(1, &base.row(0));
        assert!(matches!(pca_projection(&data), Err(ScaError::RankDeficient)));
    }
}
