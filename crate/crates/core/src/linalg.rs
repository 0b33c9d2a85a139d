//! Small dense vector helpers shared by the solvers.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `y += a * x`
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn mean(a: &[f64]) -> f64 {
    if a.is_empty() {
        0.0
    } else {
        a.iter().sum::<f64>() / a.len() as f64
    }
}

/// Residual of `y` after least-squares projection onto the span of `basis`
/// columns, plus the least-squares coefficients of `y` on those columns.
///
/// Uses modified Gram-Schmidt with one reorthogonalisation pass. Columns that
/// are numerically dependent on earlier ones are dropped and get coefficient 0.
pub fn least_squares_residual(basis: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = y.len();
    let k = basis.len();
    // q: orthonormal columns; r: upper-triangular factor (k x k), row-major
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut pivots: Vec<usize> = Vec::with_capacity(k);
    let mut r = vec![0.0; k * k];
    for (c, col) in basis.iter().enumerate() {
        assert_eq!(col.len(), n, "basis column length mismatch");
        let mut v = col.clone();
        let original = norm2(&v);
        for _pass in 0..2 {
            for (qi, qcol) in q.iter().enumerate() {
                let proj = dot(qcol, &v);
                r[pivots[qi] * k + c] += proj;
                axpy(-proj, qcol, &mut v);
            }
        }
        let nv = norm2(&v);
        if original == 0.0 || nv <= 1e-10 * original.max(1.0) {
            continue;
        }
        r[c * k + c] = nv;
        v.iter_mut().for_each(|x| *x /= nv);
        q.push(v);
        pivots.push(c);
    }

    let mut resid = y.to_vec();
    let mut qty = Vec::with_capacity(q.len());
    for _pass in 0..2 {
        for (i, qcol) in q.iter().enumerate() {
            let proj = dot(qcol, &resid);
            if qty.len() <= i {
                qty.push(proj);
            } else {
                qty[i] += proj;
            }
            axpy(-proj, qcol, &mut resid);
        }
    }

    // back substitution over retained pivots
    let mut coef = vec![0.0; k];
    for (i, &pc) in pivots.iter().enumerate().rev() {
        let mut acc = qty[i];
        for &pj in &pivots[i + 1..] {
            acc -= r[pc * k + pj] * coef[pj];
        }
        coef[pc] = acc / r[pc * k + pc];
    }
    (resid, coef)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_of_exact_fit_is_zero() {
        let ones = vec![1.0; 4];
        let x = vec![1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 + 0.5 * v).collect();
        let (res, coef) = least_squares_residual(&[ones, x], &y);
        assert!(res.iter().all(|v| v.abs() < 1e-12));
        assert!((coef[0] - 3.0).abs() < 1e-12);
        assert!((coef[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dependent_columns_are_dropped() {
        let ones = vec![1.0; 3];
        let twos = vec![2.0; 3];
        let y = vec![1.0, 2.0, 6.0];
        let (res, coef) = least_squares_residual(&[ones, twos], &y);
        assert!((mean(&res)).abs() < 1e-12);
        assert_eq!(coef[1], 0.0);
        assert!((coef[0] - 3.0).abs() < 1e-12);
    }
}
