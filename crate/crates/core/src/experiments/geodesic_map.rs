use crate::error::{Result, RotjacError};
use crate::jacobians::compounded_gradient_norm;
use crate::linalg::{Mat3, Vec3};
use crate::so3::RotationMatrix;

use super::{ExperimentReport, RecordTable, SummaryStats};

pub const DEFAULT_THETA_GRID: [f64; 11] =
    [0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, std::f64::consts::FRAC_PI_2, 2.0, 2.5, 3.0];
pub const DEFAULT_S3_GRID: [f64; 7] = [0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0];

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPoint {
    pub theta: f64,
    pub s3: f64,
    /// `None` when the point violates a Jacobian precondition.
    pub norm: Option<f64>,
    pub bound: Option<f64>,
    /// `2‖M − R*‖_F`, the direct-regression gradient norm.
    pub direct_norm: f64,
    pub flag: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicMap {
    pub points: Vec<GeodesicPoint>,
}

/// Geodesic-loss gradient through the SVD projection on the grid
/// `M = R_x(θ)·diag(1, 1, s3)`, `R* = I`, with `R_x` a rotation about the
/// first axis.
///
/// The rotation axis matters: about the first axis the error lives in the
/// (2,3) singular pair, whose gain `2/(1 + s3)` grows as `s3` shrinks. The
/// pulled-back norm is `√2/(1 + s3)` for every θ, because the projection
/// Jacobian discards the `1/sin θ`-scaled normal component of the geodesic
/// gradient; only the bound carries the `1/sin θ` factor.
pub fn geodesic_singularity_map(theta_grid: &[f64], s3_grid: &[f64]) -> Result<GeodesicMap> {
    let lo = 1e-3;
    if let Some(t) = theta_grid.iter().find(|&&t| !(t > lo && t < std::f64::consts::PI - lo)) {
        return Err(RotjacError::DomainError(format!("theta {t} outside (1e-3, π − 1e-3)")));
    }
    if let Some(s) = s3_grid.iter().find(|&&s| !(s > lo && s <= 1.0)) {
        return Err(RotjacError::DomainError(format!("s3 {s} outside (1e-3, 1]")));
    }
    if theta_grid.is_empty() || s3_grid.is_empty() {
        return Err(RotjacError::DomainError("grids must be nonempty".into()));
    }
    let r_star = RotationMatrix::identity();
    let mut points = Vec::with_capacity(theta_grid.len() * s3_grid.len());
    for &theta in theta_grid {
        let r = RotationMatrix::from_axis_angle(Vec3::new(1.0, 0.0, 0.0), theta);
        for &s3 in s3_grid {
            let m = *r.matrix() * Mat3::diag([1.0, 1.0, s3]);
            let direct_norm = 2.0 * (m - *r_star.matrix()).frobenius_norm();
            let point = match compounded_gradient_norm(&m, &r_star) {
                Ok(c) => GeodesicPoint { theta, s3, norm: Some(c.norm), bound: Some(c.bound), direct_norm, flag: None },
                Err(e @ (RotjacError::NearDegenerateSpectrum { .. } | RotjacError::AngleSingularity { .. })) => {
                    GeodesicPoint { theta, s3, norm: None, bound: None, direct_norm, flag: Some(e.to_string()) }
                }
                Err(e) => return Err(e),
            };
            points.push(point);
        }
    }
    Ok(GeodesicMap { points })
}

impl GeodesicMap {
    /// Largest `norm − bound` over evaluated points.
    pub fn max_bound_excess(&self) -> f64 {
        self.points.iter().filter_map(|p| Some(p.norm? - p.bound?)).fold(f64::NEG_INFINITY, f64::max)
    }
}

impl ExperimentReport for GeodesicMap {
    fn records(&self) -> RecordTable {
        let mut t = RecordTable::new(&["theta", "s3", "compounded_norm", "bound", "direct_norm", "flagged"]);
        for p in &self.points {
            t.push(vec![
                p.theta.into(),
                p.s3.into(),
                p.norm.into(),
                p.bound.into(),
                p.direct_norm.into(),
                p.flag.is_some().into(),
            ]);
        }
        t
    }

    fn summary(&self) -> Vec<SummaryStats> {
        let flagged = self.points.iter().filter(|p| p.flag.is_some()).count();
        vec![
            SummaryStats::single("max_norm_minus_bound", None, self.max_bound_excess()),
            SummaryStats::single("flagged_points", None, flagged as f64),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_respects_bound() {
        let map = geodesic_singularity_map(&DEFAULT_THETA_GRID, &DEFAULT_S3_GRID).unwrap();
        assert!(map.points.iter().all(|p| p.flag.is_none()));
        assert!(map.max_bound_excess() <= 1e-9);
    }

    #[test]
    fn norm_depends_on_s3_only() {
        let map = geodesic_singularity_map(&[0.01, 1.0], &[0.05, 0.5]).unwrap();
        for p in &map.points {
            let want = 2f64.sqrt() / (1.0 + p.s3);
            assert!((p.norm.unwrap() - want).abs() < 1e-9, "{p:?}");
        }
        let half_pi = geodesic_singularity_map(&[std::f64::consts::FRAC_PI_2], &[1.0]).unwrap();
        assert!((half_pi.points[0].bound.unwrap() - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range_grids() {
        assert!(geodesic_singularity_map(&[0.0], &[0.5]).is_err());
        assert!(geodesic_singularity_map(&[1.0], &[1.5]).is_err());
    }
}
