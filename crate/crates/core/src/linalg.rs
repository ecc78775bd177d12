//! Dense and tridiagonal linear solves used by the absorbing-chain and
//! birth-and-death analyses. No external solver: systems here are small
//! (transient blocks of enumerated chains) and the pivot threshold doubles
//! as the singularity detector for non-absorbing structures.

use crate::error::{Error, Result};

/// Pivots below this magnitude are treated as singular.
pub const PIVOT_EPS: f64 = 1e-13;

/// Solve `A x = b` in place by Gaussian elimination with partial pivoting.
/// `a` is row-major `n x n`; both inputs are consumed.
pub fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n || b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "dense solve: matrix {} rhs {} for n = {}",
            a.len(),
            b.len(),
            n
        )));
    }
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for row in (col + 1)..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best < PIVOT_EPS {
            return Err(Error::SingularSystem(format!(
                "pivot {best:e} below {PIVOT_EPS:e} at column {col}"
            )));
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for row in (col + 1)..n {
            let f = a[row * n + col] / d;
            if f == 0.0 {
                continue;
            }
            a[row * n + col] = 0.0;
            for k in (col + 1)..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in (row + 1)..n {
            s -= a[row * n + k] * x[k];
        }
        x[row] = s / a[row * n + row];
    }
    Ok(x)
}

/// Solve a tridiagonal system by the Thomas algorithm.
///
/// `sub[i]` multiplies `x[i-1]` in row `i` (`sub[0]` unused), `diag[i]`
/// multiplies `x[i]`, `sup[i]` multiplies `x[i+1]` (`sup[n-1]` unused).
/// Falls back to the pivoted dense solve when forward elimination hits a
/// pivot under [`PIVOT_EPS`].
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if sub.len() != n || sup.len() != n || rhs.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "tridiagonal solve: bands {}/{}/{} rhs {} for n = {}",
            sub.len(),
            diag.len(),
            sup.len(),
            rhs.len(),
            n
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut ok = diag[0].abs() >= PIVOT_EPS;
    if ok {
        c[0] = sup[0] / diag[0];
        d[0] = rhs[0] / diag[0];
        for i in 1..n {
            let denom = diag[i] - sub[i] * c[i - 1];
            if denom.abs() < PIVOT_EPS {
                ok = false;
                break;
            }
            c[i] = sup[i] / denom;
            d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
        }
    }
    if !ok {
        let mut dense = vec![0.0; n * n];
        for i in 0..n {
            dense[i * n + i] = diag[i];
            if i > 0 {
                dense[i * n + i - 1] = sub[i];
            }
            if i + 1 < n {
                dense[i * n + i + 1] = sup[i];
            }
        }
        return solve_dense(dense, rhs.to_vec(), n);
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_solves_a_known_system() {
        // [2 1; 1 3] x = [5; 10] -> x = (1, 3)
        let a = vec![2.0, 1.0, 1.0, 3.0];
        let x = solve_dense(a, vec![5.0, 10.0], 2).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn dense_requires_pivoting() {
        // Leading zero pivot forces a row swap.
        let a = vec![0.0, 1.0, 1.0, 0.0];
        let x = solve_dense(a, vec![2.0, 3.0], 2).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dense_flags_singular() {
        let a = vec![1.0, 2.0, 2.0, 4.0];
        assert!(matches!(
            solve_dense(a, vec![1.0, 2.0], 2),
            Err(Error::SingularSystem(_))
        ));
    }

    #[test]
    fn tridiagonal_matches_dense_on_random_systems() {
        let mut rng = crate::rng::CounterRng::new(11, 0);
        for trial in 0..50 {
            let n = 2 + rng.below(40);
            let mut sub = vec![0.0; n];
            let mut diag = vec![0.0; n];
            let mut sup = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            for i in 0..n {
                diag[i] = 1.5 + rng.next_f64();
                if i > 0 {
                    sub[i] = rng.next_f64() - 0.5;
                }
                if i + 1 < n {
                    sup[i] = rng.next_f64() - 0.5;
                }
                rhs[i] = rng.next_f64() * 2.0 - 1.0;
            }
            let x = solve_tridiagonal(&sub, &diag, &sup, &rhs).unwrap();
            let mut dense = vec![0.0; n * n];
            for i in 0..n {
                dense[i * n + i] = diag[i];
                if i > 0 {
                    dense[i * n + i - 1] = sub[i];
                }
                if i + 1 < n {
                    dense[i * n + i + 1] = sup[i];
                }
            }
            let y = solve_dense(dense, rhs.clone(), n).unwrap();
            for i in 0..n {
                assert!((x[i] - y[i]).abs() < 1e-9, "trial {trial} entry {i}");
            }
        }
    }
}
