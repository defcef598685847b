use alloc::vec::Vec;

/// Solves `a x = b` for a dense row-major `dim x dim` matrix by Gaussian
/// elimination with partial pivoting. Returns `None` when a pivot vanishes.
pub(crate) fn solve(mut a: Vec<f64>, mut b: Vec<f64>, dim: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), dim * dim);
    debug_assert_eq!(b.len(), dim);
    let scale = a.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v))).max(1.0);
    for col in 0..dim {
        let pivot = (col..dim)
            .max_by(|&i, &j| libm::fabs(a[i * dim + col]).total_cmp(&libm::fabs(a[j * dim + col])))?;
        if libm::fabs(a[pivot * dim + col]) <= 1e-12 * scale {
            return None;
        }
        if pivot != col {
            for k in 0..dim {
                a.swap(pivot * dim + k, col * dim + k);
            }
            b.swap(pivot, col);
        }
        let diag = a[col * dim + col];
        for row in col + 1..dim {
            let factor = a[row * dim + col] / diag;
            if factor == 0.0 {
                continue;
            }
            for k in col..dim {
                a[row * dim + k] -= factor * a[col * dim + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = alloc::vec![0.0; dim];
    for row in (0..dim).rev() {
        let tail: f64 = (row + 1..dim).map(|k| a[row * dim + k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row * dim + row];
    }
    Some(x)
}
