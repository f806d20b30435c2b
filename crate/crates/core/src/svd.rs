//! Singular value decomposition of 3×3 matrices by one-sided Jacobi.

use crate::error::{Result, RotjacError};
use crate::linalg::{jacobi_rotation, Mat3, Vec3};
use crate::scalar::Real;

/// Cap on cyclic sweeps before the decomposition reports failure.
pub const MAX_SWEEPS: usize = 60;

/// `M = U · diag(s) · Vᵀ` with `s[0] ≥ s[1] ≥ s[2] ≥ 0`.
///
/// The factors are deterministic: each column of `U` has its
/// largest-magnitude entry nonnegative, and the matching column of `V`
/// carries the compensating sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdFactors<T> {
    pub u: Mat3<T>,
    pub s: [T; 3],
    pub v: Mat3<T>,
    /// Sign of `det M`; `-1` when `det M = 0` (rank deficient).
    pub det_sign: i8,
}

impl<T: Real> SvdFactors<T> {
    pub fn reconstruct(&self) -> Mat3<T> {
        self.u * Mat3::diag(self.s) * self.v.transpose()
    }

    /// Singular values with the sign of the determinant folded into the
    /// smallest one: `(s1, s2, ±s3)`. The projection onto SO(3) behaves
    /// like the polar factor of `U · diag(signed) · V'ᵀ` with `V' = V · diag(1, 1, ±1)`.
    pub fn signed_values(&self) -> [T; 3] {
        let d = if self.det_sign < 0 { -T::one() } else { T::one() };
        [self.s[0], self.s[1], d * self.s[2]]
    }

    /// `V · diag(1, 1, det_sign)`.
    pub fn v_signed(&self) -> Mat3<T> {
        let d = if self.det_sign < 0 { -T::one() } else { T::one() };
        self.v * Mat3::diag([T::one(), T::one(), d])
    }
}

/// Decomposes `m` into `U · diag(s) · Vᵀ`.
///
/// Columns of `A = M·V` are orthogonalized pairwise by plane rotations
/// (equivalently, cyclic Jacobi on `MᵀM` without forming it). A pair is
/// left alone once its inner product is below `jacobi_tol · ‖a_p‖‖a_q‖`.
pub fn svd3<T: Real>(m: &Mat3<T>) -> Result<SvdFactors<T>> {
    if !m.is_finite() {
        return Err(RotjacError::DegenerateInput("matrix has non-finite entries".into()));
    }
    let fro2 = m.frobenius_norm_squared();
    let abs_floor = fro2 * T::epsilon() * T::epsilon();
    let rel_tol = T::jacobi_tol();

    let mut a = *m;
    let mut v = Mat3::<T>::identity();
    let mut converged = fro2 == T::zero();
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let ap = a.col(p);
            let aq = a.col(q);
            let alpha = ap.norm_squared();
            let beta = aq.norm_squared();
            let gamma = ap.dot(aq);
            if gamma.abs() <= rel_tol * (alpha * beta).sqrt() || gamma.abs() <= abs_floor {
                continue;
            }
            rotated = true;
            let (c, s) = jacobi_rotation(alpha, beta, gamma);
            a.set_col(p, ap.scale(c) - aq.scale(s));
            a.set_col(q, ap.scale(s) + aq.scale(c));
            let vp = v.col(p);
            let vq = v.col(q);
            v.set_col(p, vp.scale(c) - vq.scale(s));
            v.set_col(q, vp.scale(s) + vq.scale(c));
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(RotjacError::NumericalFailure { sweeps: MAX_SWEEPS });
    }

    let mut order = [0usize, 1, 2];
    let norms = [a.col(0).norm(), a.col(1).norm(), a.col(2).norm()];
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));
    let s = [norms[order[0]], norms[order[1]], norms[order[2]]];
    let vs = Mat3::from_cols(v.col(order[0]), v.col(order[1]), v.col(order[2]));

    // A column counts as zero when it is below roundoff of the largest one.
    let tiny = s[0] * T::epsilon() * T::lit(8.0);
    let s = s.map(|x| if x > tiny { x } else { T::zero() });
    let mut cols: [Option<Vec3<T>>; 3] = [None, None, None];
    for k in 0..3 {
        if s[k] > T::zero() {
            cols[k] = Some((*m * vs.col(k)).scale(T::one() / s[k]));
        }
    }
    let mut u = orthonormalize(complete_basis(cols));

    // Sign convention on U columns, compensated in V.
    let mut vs = vs;
    for k in 0..3 {
        let col = u.col(k).to_array();
        let mut big = col[0];
        for &x in &col[1..] {
            if x.abs() > big.abs() {
                big = x;
            }
        }
        if big < T::zero() {
            u.set_col(k, -u.col(k));
            vs.set_col(k, -vs.col(k));
        }
    }

    let det_sign = if s[2] == T::zero() {
        -1
    } else if u.det() * vs.det() > T::zero() {
        1
    } else {
        -1
    };
    Ok(SvdFactors { u, s, v: vs, det_sign })
}

/// Fills missing columns so the three vectors form an orthonormal basis.
fn complete_basis<T: Real>(cols: [Option<Vec3<T>>; 3]) -> Mat3<T> {
    let e = [
        Vec3::new(T::one(), T::zero(), T::zero()),
        Vec3::new(T::zero(), T::one(), T::zero()),
        Vec3::new(T::zero(), T::zero(), T::one()),
    ];
    let c0 = cols[0].unwrap_or(e[0]);
    let c1 = match cols[1] {
        Some(c) => c,
        None => {
            // Any unit vector orthogonal to c0; pick the axis least aligned with it.
            let a = c0.to_array();
            let k = (0..3)
                .min_by(|&i, &j| a[i].abs().partial_cmp(&a[j].abs()).unwrap_or(std::cmp::Ordering::Equal))
                .unwrap_or(0);
            let w = e[k] - c0.scale(c0.dot(e[k]) / c0.norm_squared());
            w.scale(T::one() / w.norm())
        }
    };
    let c2 = match cols[2] {
        Some(c) => c,
        None => c0.cross(c1),
    };
    Mat3::from_cols(c0, c1, c2)
}

/// Modified Gram-Schmidt on the columns; repairs roundoff in U.
fn orthonormalize<T: Real>(m: Mat3<T>) -> Mat3<T> {
    let mut c0 = m.col(0);
    c0 = c0.scale(T::one() / c0.norm());
    let mut c1 = m.col(1);
    c1 = c1 - c0.scale(c0.dot(c1));
    c1 = c1.scale(T::one() / c1.norm());
    let mut c2 = m.col(2);
    c2 = c2 - c0.scale(c0.dot(c2));
    c2 = c2 - c1.scale(c1.dot(c2));
    c2 = c2.scale(T::one() / c2.norm());
    Mat3::from_cols(c0, c1, c2)
}
