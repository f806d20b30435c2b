use crate::error::{Result, RotjacError};
use crate::linalg::{DenseMatrix, Mat3, Vec3};
use crate::scalar::Real;
use crate::so3::SixDParams;

/// Minimum `‖t1‖` and `‖r₂″‖` accepted by the Gram-Schmidt Jacobian.
pub const GS_JACOBIAN_TOL: f64 = 1e-8;

/// `∂vec(R)/∂(t1, t2)` for `R = gram_schmidt(t1, t2)`; rows follow `R`
/// row-major, columns are `t1` then `t2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian9x6<T>(DenseMatrix<T>);

impl<T: Real> Jacobian9x6<T> {
    pub fn as_dense(&self) -> &DenseMatrix<T> {
        &self.0
    }

    pub fn into_dense(self) -> DenseMatrix<T> {
        self.0
    }

    /// `∂r_col/∂t_param` as a 3×3 block (`col`, `param` zero-based).
    pub fn block(&self, col: usize, param: usize) -> Mat3<T> {
        Mat3::from_fn(|i, k| self.0[(3 * i + col, 3 * param + k)])
    }

    pub fn apply_transpose(&self, g: &Mat3<T>) -> [T; 6] {
        let v = self.0.transpose_mul_vec(g.as_row_major());
        [v[0], v[1], v[2], v[3], v[4], v[5]]
    }
}

impl<T> AsRef<DenseMatrix<T>> for Jacobian9x6<T> {
    fn as_ref(&self) -> &DenseMatrix<T> {
        &self.0
    }
}

struct Norms<T> {
    n1: T,
    n2: T,
    r1: Vec3<T>,
    r2: Vec3<T>,
}

fn norms<T: Real>(p: &SixDParams<T>) -> Result<Norms<T>> {
    let tol = T::lit(GS_JACOBIAN_TOL);
    let n1 = p.t1.norm();
    if !(n1 >= tol) {
        return Err(RotjacError::DegenerateInput(format!("‖t1‖ = {n1} is below {GS_JACOBIAN_TOL:e}")));
    }
    let r2pp = p.residual();
    let n2 = r2pp.norm();
    if !(n2 >= tol) {
        return Err(RotjacError::DegenerateInput(format!(
            "t1 and t2 are nearly parallel (‖r2''‖ = {n2} is below {GS_JACOBIAN_TOL:e})"
        )));
    }
    Ok(Norms { n1, n2, r1: p.t1.scale(T::one() / n1), r2: r2pp.scale(T::one() / n2) })
}

fn projector<T: Real>(r: Vec3<T>, scale: T) -> Mat3<T> {
    (Mat3::identity() - r.outer(r)).scale(scale)
}

/// Analytic Jacobian of Gram-Schmidt orthogonalization.
pub fn gs_jacobian<T: Real>(p: &SixDParams<T>) -> Result<Jacobian9x6<T>> {
    let Norms { n1, n2, r1, r2 } = norms(p)?;
    let u = r1.dot(p.t2);
    let d11 = projector(r1, T::one() / n1);
    let d2 = projector(r2, T::one() / n2);
    // Residual r₂″ = t2 − (r1·t2) r1.
    let dres_dt1 = -((r1.outer(p.t2) + Mat3::identity().scale(u)) * d11);
    let dres_dt2 = Mat3::identity() - r1.outer(r1);
    let blocks_r1 = [d11, Mat3::zeros()];
    let blocks_r2 = [d2 * dres_dt1, d2 * dres_dt2];
    let blocks_r3 = [0, 1].map(|k| r1.hat() * blocks_r2[k] - r2.hat() * blocks_r1[k]);

    let mut j = DenseMatrix::zeros(9, 6);
    for (col, blocks) in [blocks_r1, blocks_r2, blocks_r3].iter().enumerate() {
        for (param, b) in blocks.iter().enumerate() {
            for i in 0..3 {
                for k in 0..3 {
                    j[(3 * i + col, 3 * param + k)] = b[(i, k)];
                }
            }
        }
    }
    Ok(Jacobian9x6(j))
}

/// `‖t1‖ / ‖r₂″‖`, a lower bound on the condition number of the
/// Gram-Schmidt Jacobian restricted to its column space.
pub fn gs_condition_lower_bound<T: Real>(p: &SixDParams<T>) -> Result<T> {
    let n = norms(p)?;
    Ok(n.n1 / n.n2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobians::{finite_difference_jacobian, SpectrumReport};
    use crate::so3::gram_schmidt;

    fn p(t1: [f64; 3], t2: [f64; 3]) -> SixDParams<f64> {
        SixDParams::new(Vec3::from_array(t1), Vec3::from_array(t2))
    }

    #[test]
    fn first_column_block_structure() {
        let j = gs_jacobian(&p([2.0, 0.0, 0.0], [0.3, 1.0, -0.2])).unwrap();
        assert_eq!(j.block(0, 1), Mat3::zeros());
        assert_eq!(j.block(0, 0), Mat3::diag([0.0, 0.5, 0.5]));
        assert!(j.block(1, 0).frobenius_norm() > 0.1);
    }

    #[test]
    fn matches_finite_differences() {
        let params = p([0.7, -1.3, 0.4], [0.2, 0.9, 1.5]);
        let j = gs_jacobian(&params).unwrap();
        let fd = finite_difference_jacobian(
            |x: &[f64]| gram_schmidt(&SixDParams::from_flat(x)).map(|r| r.matrix().as_row_major().to_vec()),
            &params.to_flat(),
            1e-6,
        )
        .unwrap();
        assert!(j.as_dense().max_abs_diff(&fd) < 1e-8);
    }

    #[test]
    fn condition_bound() {
        assert_eq!(gs_condition_lower_bound(&p([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])).unwrap(), 1.0);
        let near = p([1.0, 0.0, 0.0], [1.0, 1e-3, 0.0]);
        let b = gs_condition_lower_bound(&near).unwrap();
        assert!((b - 1000.0).abs() < 1e-6);
        let rep = SpectrumReport::numerical(gs_jacobian(&near).unwrap().as_dense(), 1e-10);
        assert_eq!(rep.rank, 3);
        assert!(rep.condition_number >= b - 1e-6);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(gs_jacobian(&p([0.0; 3], [0.0, 1.0, 0.0])), Err(RotjacError::DegenerateInput(_))));
        assert!(matches!(gs_jacobian(&p([1.0, 0.0, 0.0], [2.0, 0.0, 0.0])), Err(RotjacError::DegenerateInput(_))));
    }
}
