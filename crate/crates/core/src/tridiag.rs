//! Thomas algorithm for tridiagonal systems.

/// Solve a tridiagonal system in place.
///
/// - `lower`: sub-diagonal, `lower[i]` multiplies `x[i-1]` in row i (`lower[0]` unused)
/// - `diag`: main diagonal
/// - `upper`: super-diagonal, `upper[i]` multiplies `x[i+1]` in row i (`upper[n-1]` unused)
/// - `rhs`: right-hand side on input, solution on output
///
/// The implicit diffusion matrices solved here are strictly diagonally
/// dominant, so no pivoting is needed.
pub fn solve_in_place(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &mut [f64],
    scratch: &mut Vec<f64>,
) {
    let n = rhs.len();
    assert!(n >= 1);
    assert_eq!(lower.len(), n);
    assert_eq!(diag.len(), n);
    assert_eq!(upper.len(), n);

    scratch.clear();
    scratch.resize(n, 0.0);

    scratch[0] = upper[0] / diag[0];
    rhs[0] /= diag[0];
    for i in 1..n {
        let denom = diag[i] - lower[i] * scratch[i - 1];
        if i < n - 1 {
            scratch[i] = upper[i] / denom;
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
}
