use degdiff_core::grid::Grid;
use degdiff_core::selfsim::SelfSimilarSolution;

#[test]
fn residual_on_exact_selfsim() {
    // (gamma0, m) = (2, 1): q0-free selfsim of the divergence equation in
    // primed time tau. u = v^2 must satisfy 2 u_tau = u^(1/2) |u_x| u_xx
    // (sigma^2/2 = 1, q0 = 2) wherever v is classical.
    let s = SelfSimilarSolution::new(2.0, 1.0).unwrap();
    for &factor in &[1usize, 2, 4] {
        let n = 600 * factor;
        let grid = Grid::new(12.0, n).unwrap();
        let dx = grid.dx();
        let h = 2.0 * dx;
        let t0 = 0.5;
        let u_at = |t: f64| -> Vec<f64> {
            grid.cell_centers().iter().map(|&x| s.evaluate(x, t).unwrap().powi(2)).collect()
        };
        let (prev, curr, next) = (u_at(t0 - h), u_at(t0), u_at(t0 + h));
        let max_u = curr.iter().copied().fold(0.0f64, f64::max);
        let floor = 1e-2 * max_u;
        let xs = grid.cell_centers();
        let mut worst = 0.0f64;
        let mut argmax = 0.0f64;
        let mut at_half = 0.0f64;
        for i in 1..n - 1 {
            let smin = curr[i].min(curr[i-1]).min(curr[i+1]).min(prev[i]).min(next[i]);
            if smin <= floor { continue; }
            let u_t = 2.0 * (next[i] - prev[i]) / (2.0 * h);
            let u_x = (curr[i+1] - curr[i-1]) / (2.0 * dx);
            let u_xx = (curr[i+1] - 2.0*curr[i] + curr[i-1]) / (dx*dx);
            let res = (u_t - curr[i].powf(0.5) * u_x.abs() * u_xx).abs();
            if res > worst { worst = res; argmax = xs[i]; }
            if (xs[i] - 0.5).abs() < dx / 2.0 { at_half = res; }
        }
        println!("n = {n}: max = {worst:.4e} at x = {argmax:+.4} ({:.1} dx); res(0.5) = {at_half:.4e}", argmax.abs()/dx);
    }
}
