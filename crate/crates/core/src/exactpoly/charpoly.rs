use crate::matrix::Matrix;
use crate::scalar::Scalar;

use super::{Poly, PolyError};

/// `det(T·I − A)` by the Faddeev–LeVerrier recurrence.
///
/// `M_0 = 0`, `c_n = 1`, and for `k = 1..=n`:
/// `M_k = A·M_{k−1} + c_{n−k+1}·I`, `c_{n−k} = −tr(A·M_k)/k`.
/// Over an exact field every step is exact; over floats it is the classical
/// (moderately stable) variant.
pub fn charpoly<T: Scalar>(a: &Matrix<T>) -> Result<Poly<T>, PolyError> {
    if !a.is_square() {
        return Err(PolyError::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let mut c = vec![T::zero(); n + 1];
    c[n] = T::one();
    let mut m = Matrix::<T>::zeros(n, n);
    let id = Matrix::<T>::identity(n);
    for k in 1..=n {
        m = a.mul(&m).add(&id.scale(&c[n - k + 1]));
        let am = a.mul(&m);
        c[n - k] = -am.trace() / T::int(k as i64);
    }
    Ok(Poly::new(c))
}
