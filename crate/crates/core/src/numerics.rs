//! Damped Newton root solving with numeric Jacobians, shared by the
//! doubly robust moment equation and the UDiD normalization solves.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Central-difference Jacobian of `f` at `x`, step `1e-6 * max(1, |x_j|)`.
pub fn numeric_jacobian<F>(f: &F, x: &DVector<f64>, fdim: usize) -> DMatrix<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let n = x.len();
    let mut jac = DMatrix::zeros(fdim, n);
    for j in 0..n {
        let h = 1e-6 * x[j].abs().max(1.0);
        let mut up = x.clone();
        up[j] += h;
        let mut dn = x.clone();
        dn[j] -= h;
        let fu = f(&up);
        let fd = f(&dn);
        for i in 0..fdim {
            jac[(i, j)] = (fu[i] - fd[i]) / (2.0 * h);
        }
    }
    jac
}

/// Solve `f(x) = 0` for square `f` by damped Newton iteration started at
/// `x0`. The step is halved while the residual max-norm fails to decrease.
pub fn newton_solve<F>(
    f: &F,
    x0: DVector<f64>,
    tol: f64,
    max_iter: usize,
    context: &str,
) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let dim = x0.len();
    let mut x = x0;
    let mut r = f(&x);
    if r.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{context}: residual dimension {} against parameter dimension {dim}",
            r.len()
        )));
    }
    for _ in 0..max_iter {
        if r.amax() <= tol {
            return Ok(x);
        }
        let jac = numeric_jacobian(f, &x, dim);
        let lu = jac.lu();
        let step = lu
            .solve(&(-&r))
            .ok_or_else(|| Error::SingularJacobian(context.to_string()))?;
        if !step.iter().all(|v| v.is_finite()) {
            return Err(Error::SingularJacobian(context.to_string()));
        }
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let cand = &x + scale * &step;
            let cand_r = f(&cand);
            if cand_r.amax() < r.amax() {
                x = cand;
                r = cand_r;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if r.amax() <= tol {
        Ok(x)
    } else {
        Err(Error::NotConverged { what: context.to_string(), iterations: max_iter })
    }
}

/// Derivative-free scalar fallback: expand a bracket around 0 until the
/// residual changes sign, then bisection.
pub fn bisect_scalar<F>(f: &F, tol: f64, context: &str) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut lo = -1.0;
    let mut hi = 1.0;
    let mut flo = f(lo);
    let mut fhi = f(hi);
    let mut width = 1.0;
    for _ in 0..60 {
        if flo.is_finite() && fhi.is_finite() && flo * fhi <= 0.0 {
            break;
        }
        width *= 2.0;
        lo = -width;
        hi = width;
        flo = f(lo);
        fhi = f(hi);
        if width > 1e6 {
            return Err(Error::NotConverged { what: format!("{context} (bracketing)"), iterations: 60 });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if fmid.abs() <= tol || (hi - lo) < 1e-15 * (1.0 + mid.abs()) {
            return Ok(mid);
        }
        if flo * fmid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    let mid = 0.5 * (lo + hi);
    if f(mid).abs() <= tol {
        Ok(mid)
    } else {
        Err(Error::NotConverged { what: context.to_string(), iterations: 200 })
    }
}
