//! Dense linear solve via Gaussian elimination with partial pivoting.
//!
//! Policy evaluation reduces to `(I − A)J = b` on systems no larger than
//! the state count, so a dependency-free direct solve is exact to
//! roundoff and plenty fast.

use crate::error::{AdpError, Result};

/// Solves `M x = b` in place for a square dense matrix.
pub fn solve_dense(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    assert_eq!(m.len(), n, "matrix/vector size mismatch");
    for row in &m {
        assert_eq!(row.len(), n, "matrix must be square");
    }
    for col in 0..n {
        // Partial pivot: largest magnitude on or below the diagonal.
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .expect("nonempty pivot range");
        if m[pivot][col].abs() < 1e-300 {
            return Err(AdpError::Numerical(format!(
                "singular linear system (pivot column {col})"
            )));
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                m[row][j] -= factor * m[col][j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in row + 1..n {
            acc -= m[row][j] * x[j];
        }
        x[row] = acc / m[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_2x2_system() {
        // x + 2y = 5, 3x − y = 1  →  x = 1, y = 2
        let m = vec![vec![1.0, 2.0], vec![3.0, -1.0]];
        let x = solve_dense(m, vec![5.0, 1.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pivots_through_a_zero_diagonal() {
        let m = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let x = solve_dense(m, vec![3.0, 4.0]).unwrap();
        assert_eq!(x, vec![4.0, 3.0]);
    }

    #[test]
    fn reports_singular_systems() {
        let m = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(matches!(
            solve_dense(m, vec![1.0, 2.0]),
            Err(AdpError::Numerical(_))
        ));
    }
}
