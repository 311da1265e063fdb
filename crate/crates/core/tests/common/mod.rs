//! Numerical oracles shared by the integration tests.

/// Unnormalized joint density of the two eigenvalues of a `2 x 2` complex
/// Wishart matrix with `2 + d` degrees of freedom and covariance
/// eigenvalues `sigma`.
pub fn wishart2_weight(l1: f64, l2: f64, d: i32, sigma: [f64; 2]) -> f64 {
    let common = (l1 * l2).powi(d) * (l2 - l1);
    if sigma[0] == sigma[1] {
        common * (l2 - l1) * (-(l1 + l2) / sigma[0]).exp()
    } else {
        let det = (-l1 / sigma[0] - l2 / sigma[1]).exp() - (-l2 / sigma[0] - l1 / sigma[1]).exp();
        common * det
    }
}

/// `E det(I + c W)^(-beta)`; trapezoid rule in `u = ln lambda` on both axes.
pub fn wishart2_expectation(c: f64, beta: f64, d: i32, sigma: [f64; 2]) -> f64 {
    let (lo, hi, h) = (-60.0, 5.0, 0.04);
    let n = ((hi - lo) / h) as usize + 1;
    let nodes: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let l = (lo + i as f64 * h).exp();
            (l, (1.0 + c * l).powf(-beta))
        })
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for &(l1, g1) in &nodes {
        for &(l2, g2) in &nodes {
            let w = wishart2_weight(l1, l2, d, sigma) * l1 * l2;
            den += w;
            num += w * g1 * g2;
        }
    }
    num / den
}
