use crate::linalg::DenseMatrix;
use crate::scalar::Real;

/// Central-difference Jacobian of `f` at `x`: column `j` is
/// `(f(x + h eⱼ) − f(x − h eⱼ)) / 2h`.
///
/// Each column depends only on its own two evaluations, so the result does
/// not depend on evaluation order. The first evaluation error is returned.
pub fn finite_difference_jacobian<T, E, F>(f: F, x: &[T], h: T) -> Result<DenseMatrix<T>, E>
where
    T: Real,
    F: Fn(&[T]) -> Result<Vec<T>, E>,
{
    assert!(h > T::zero(), "finite-difference step must be positive");
    let mut probe = x.to_vec();
    let mut columns = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        probe[j] = x[j] + h;
        let plus = f(&probe)?;
        probe[j] = x[j] - h;
        let minus = f(&probe)?;
        probe[j] = x[j];
        assert_eq!(plus.len(), minus.len(), "output dimension changed between evaluations");
        let two_h = h + h;
        columns.push(plus.iter().zip(&minus).map(|(&a, &b)| (a - b) / two_h).collect::<Vec<T>>());
    }
    let rows = columns.first().map_or(0, Vec::len);
    let mut j = DenseMatrix::zeros(rows, x.len());
    for (c, col) in columns.iter().enumerate() {
        j.set_column(c, col);
    }
    Ok(j)
}
