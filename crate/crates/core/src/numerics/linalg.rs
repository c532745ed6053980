use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Restarted GMRES with left Jacobi preconditioning, for dense systems too
/// large for a direct factorization.
pub fn gmres(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> Result<(DVector<f64>, GmresStats)> {
    let n = b.len();
    let inv_diag: DVector<f64> = DVector::from_fn(n, |i, _| {
        let d = a[(i, i)];
        if d != 0.0 {
            1.0 / d
        } else {
            1.0
        }
    });
    let precond = |v: &DVector<f64>| v.component_mul(&inv_diag);
    let pb = precond(b);
    let b_norm = pb.norm();
    let mut x = DVector::<f64>::zeros(n);
    if b_norm == 0.0 {
        return Ok((
            x,
            GmresStats {
                iterations: 0,
                relative_residual: 0.0,
            },
        ));
    }
    let mut total = 0;
    let mut rel;
    while total < max_iter {
        let r = precond(&(b - a * &x));
        let beta = r.norm();
        rel = beta / b_norm;
        if rel <= tol {
            break;
        }
        let m = restart.min(max_iter - total);
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(m + 1);
        basis.push(r / beta);
        let mut h = DMatrix::<f64>::zeros(m + 1, m);
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = DVector::<f64>::zeros(m + 1);
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..m {
            let mut w = precond(&(a * &basis[k]));
            // modified Gram–Schmidt
            for (j, q) in basis.iter().enumerate() {
                let hjk = w.dot(q);
                h[(j, k)] = hjk;
                w.axpy(-hjk, q, 1.0);
            }
            let wn = w.norm();
            h[(k + 1, k)] = wn;
            for j in 0..k {
                let t = cs[j] * h[(j, k)] + sn[j] * h[(j + 1, k)];
                h[(j + 1, k)] = -sn[j] * h[(j, k)] + cs[j] * h[(j + 1, k)];
                h[(j, k)] = t;
            }
            let denom = h[(k, k)].hypot(h[(k + 1, k)]);
            cs[k] = h[(k, k)] / denom;
            sn[k] = h[(k + 1, k)] / denom;
            h[(k, k)] = denom;
            h[(k + 1, k)] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;
            total += 1;
            rel = g[k + 1].abs() / b_norm;
            if rel <= tol || wn == 0.0 {
                break;
            }
            basis.push(w / wn);
        }
        // back substitution on the k_used × k_used triangle
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[(i, j)] * y[j];
            }
            y[i] = s / h[(i, i)];
        }
        for (j, yj) in y.iter().enumerate() {
            x.axpy(*yj, &basis[j], 1.0);
        }
        if rel <= tol {
            break;
        }
    }
    let true_rel = precond(&(b - a * &x)).norm() / b_norm;
    // NaN residual counts as a stall.
    if true_rel.is_nan() || true_rel > tol * 10.0 {
        return Err(Error::Solver(format!(
            "GMRES stalled at relative residual {true_rel:.3e} after {total} iterations"
        )));
    }
    Ok((
        x,
        GmresStats {
            iterations: total,
            relative_residual: true_rel,
        },
    ))
}
