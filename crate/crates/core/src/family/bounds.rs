//! Closed-form quantities attached to the warping gain `k`.

use std::f64::consts::PI;

use crate::exec::Execution;
use crate::trace::{MulticlassTag, SpectrumCase};

/// Upper limit on the warping gain: `k < 1/√(6 − max{1, 4ξ²})`.
pub fn gain_upper_bound(xi: f64) -> f64 {
    1.0 / (6.0 - (4.0 * xi * xi).max(1.0)).sqrt()
}

/// `Ξ₁ = 2k / (1 + √(1 + 4k²))`.
pub fn xi_1(k: f64) -> f64 {
    2.0 * k / (1.0 + (1.0 + 4.0 * k * k).sqrt())
}

/// `Ξ₂₁ = 2k / (1 + √(1 + 4k²(1 − ξ)))`.
pub fn xi_21(k: f64, xi: f64) -> f64 {
    2.0 * k / (1.0 + (1.0 + 4.0 * k * k * (1.0 - xi)).sqrt())
}

/// `Ξ₂₂ = 2kξ / (1 + √(1 + 4k²ξ²))`.
pub fn xi_22(k: f64, xi: f64) -> f64 {
    2.0 * k * xi / (1.0 + (1.0 + 4.0 * k * k * xi * xi).sqrt())
}

/// Exact minimum of the refined gap for a single repeated eigenvalue `λ`.
pub fn gap_bound_all_equal(lambda_m: f64, k: f64) -> f64 {
    let x = xi_1(k).powi(2);
    2.0 * lambda_m * (k * k).min(2.0 * x * (1.0 - x))
}

/// Exact minimum of the refined gap for the four-direction design.
pub fn gap_bound_two_large(lambda3_g: f64, xi: f64, k: f64) -> f64 {
    let a = xi_21(k, xi).powi(2);
    let b = xi_22(k, xi).powi(2);
    2.0 * lambda3_g * (a * (1.0 + (1.0 - 2.0 * xi) * (1.0 - a))).min(b * (1.0 - b) * (2.0 * xi - 1.0))
}

/// Lower bound on the refined gap for the six-direction design.
pub fn gap_bound_two_large_hexagonal(lambda3_g: f64, xi: f64, k: f64) -> f64 {
    let a = xi_21(k, xi).powi(2);
    let b = xi_22(k, xi).powi(2);
    let v3_branch = (0.5 * a * (3.0 + (1.0 - 4.0 * xi) * (1.0 - a))).max(8.0 * a * (1.0 - a) * (1.0 - xi));
    let pair_branch = 2.0 * b * (1.0 - b) * (xi - 0.25);
    lambda3_g * v3_branch.min(pair_branch)
}

/// Closed-form `δ̄_q` where one is available (items 1–3), `None` otherwise.
pub fn closed_form_gap(tag: &MulticlassTag, xi: f64, k: f64) -> Option<f64> {
    match tag.case {
        SpectrumCase::AllEqual => Some(gap_bound_all_equal(tag.lambda_m[0], k)),
        SpectrumCase::TwoLargeEqualPosMin => Some(gap_bound_two_large(tag.lambda_g[2], xi, k)),
        SpectrumCase::TwoLargeEqualAnyMin => Some(gap_bound_two_large_hexagonal(tag.lambda_g[2], xi, k)),
        SpectrumCase::TwoSmallEqual | SpectrumCase::AllDistinct => None,
    }
}

/// `F(t) = max{4(ξ − sin²t), ξ − sin²(t + π/3), ξ − sin²(t − π/3)}`.
pub fn hexagonal_envelope(xi: f64, t: f64) -> f64 {
    let f1 = 4.0 * (xi - t.sin().powi(2));
    let f2 = xi - (t + PI / 3.0).sin().powi(2);
    let f3 = xi - (t - PI / 3.0).sin().powi(2);
    f1.max(f2).max(f3)
}

/// Grid minimum of [`hexagonal_envelope`] over `t ∈ [0, π]` with `n + 1` points.
pub fn min_envelope_on_grid(xi: f64, n: usize, exec: Execution) -> f64 {
    exec.min_range(n + 1, |i| hexagonal_envelope(xi, PI * i as f64 / n as f64))
}

/// Grid check of `min_t F(t)` at one million intervals; should equal `ξ − ¼`.
pub fn min_f_check(xi: f64) -> f64 {
    min_envelope_on_grid(xi, 1_000_000, Execution::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_gap_value() {
        let d = gap_bound_two_large(0.8, 0.75, 0.465);
        assert!((d - 0.0712).abs() < 5e-4, "{d}");
        let d3 = gap_bound_two_large_hexagonal(0.8, 0.75, 0.465);
        assert!((d3 - 0.0712).abs() < 5e-4, "{d3}");
    }

    #[test]
    fn gain_bound_at_three_quarters() {
        assert!((gain_upper_bound(0.75) - 1.0 / 3.75f64.sqrt()).abs() < 1e-15);
        assert!((gain_upper_bound(1.0) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((gain_upper_bound(0.5) - 0.2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn xi_values_are_sines_below_k() {
        for k in [0.1, 0.3, 0.5, 0.7] {
            assert!(xi_1(k) < k && xi_1(k) > 0.0);
            assert!(xi_21(k, 0.75) <= k);
            assert!(xi_22(k, 0.75) <= k);
        }
    }

    #[test]
    fn envelope_minimum_examples() {
        for (xi, expected) in [(0.75, 0.5), (0.5, 0.25), (1.0, 0.75)] {
            assert!((min_f_check(xi) - expected).abs() < 1e-6);
        }
    }
}
