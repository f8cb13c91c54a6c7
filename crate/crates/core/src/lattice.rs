//! Primed double lattice sums over (ℓ, n) ∈ ℤ² \ {0} with the kernel
//! η⁴ / (ℓ² + η²n²)².
//!
//! The central object is
//!
//! ```text
//! g(η) = Σ′ η⁴ / (ℓ² + η²n²)²,
//! ```
//!
//! which satisfies g(η) = η⁴ g(1/η) (swap ℓ ↔ n). Summing ℓ in closed form
//! gives two exponentially convergent representations:
//!
//! ```text
//! direct: g(η) = 2ζ(4)η⁴ + πζ(3)η  + 2η⁴ Σₙ r(ηn)
//! dual:   g(η) = 2ζ(4)   + πζ(3)η³ + 2   Σₙ r(n/η)
//! ```
//!
//! where r(c) = Σ_ℓ (ℓ² + c²)⁻² − π/(2c³) ~ e^{−2πc}. The direct form is fast
//! for η ≳ 1 and the dual form for η ≲ 1. Naive (raw truncation) modes are kept
//! as oracles only; they converge algebraically.

use std::f64::consts::PI;

use crate::error::{CasimirError, Result};
use crate::par::{self, Execution};
use crate::specfun::{dirichlet_eta, ZETA3, ZETA4};

/// Truncation policy for infinite sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumControl {
    /// Target relative tolerance, in (0, 1e-3].
    pub rel_tol: f64,
    /// Hard cap on terms per summation index.
    pub max_terms: u64,
    pub mode: SumMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SumMode {
    /// Raw truncation of the double sum; algebraic convergence.
    Naive,
    /// Closed-form inner sum plus an exponentially convergent outer series.
    #[default]
    Accelerated,
}

impl Default for SumControl {
    fn default() -> Self {
        SumControl {
            rel_tol: 1e-10,
            max_terms: 4096,
            mode: SumMode::Accelerated,
        }
    }
}

impl SumControl {
    pub fn new(rel_tol: f64, max_terms: u64, mode: SumMode) -> Result<Self> {
        let ctl = SumControl {
            rel_tol,
            max_terms,
            mode,
        };
        ctl.validate()?;
        Ok(ctl)
    }

    pub fn accelerated(rel_tol: f64) -> Self {
        SumControl {
            rel_tol,
            ..SumControl::default()
        }
    }

    pub fn naive(rel_tol: f64, max_terms: u64) -> Self {
        SumControl {
            rel_tol,
            max_terms,
            mode: SumMode::Naive,
        }
    }

    pub fn with_mode(self, mode: SumMode) -> Self {
        SumControl { mode, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return Err(CasimirError::invalid(
                "rel_tol",
                format!("must lie in (0, 1e-3], got {}", self.rel_tol),
            ));
        }
        if self.max_terms < 8 {
            return Err(CasimirError::invalid(
                "max_terms",
                format!("must be at least 8, got {}", self.max_terms),
            ));
        }
        Ok(())
    }
}

/// A summed value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeValue {
    pub value: f64,
    pub est_error: f64,
    pub terms_used: u64,
}

impl LatticeValue {
    fn checked(self, what: &'static str, ctl: &SumControl) -> Result<Self> {
        if self.est_error <= ctl.rel_tol * self.value.abs() {
            Ok(self)
        } else {
            Err(CasimirError::Convergence {
                what,
                terms: self.terms_used,
                est_error: self.est_error,
                target: ctl.rel_tol * self.value.abs(),
            })
        }
    }
}

/// Which exponentially convergent form of g to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GRepr {
    /// Direct for η ≥ 1, dual below.
    #[default]
    Auto,
    Direct,
    Dual,
}

/// g(η) split into its algebraic part and exponentially small series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GParts {
    pub algebraic: f64,
    pub series: f64,
    pub est_error: f64,
    /// Error estimate of `series` alone.
    pub series_error: f64,
    pub terms_used: u64,
    pub repr: GRepr,
}

impl GParts {
    pub fn value(&self) -> f64 {
        self.algebraic + self.series
    }

    fn lattice_value(&self) -> LatticeValue {
        LatticeValue {
            value: self.value(),
            est_error: self.est_error,
            terms_used: self.terms_used,
        }
    }
}

fn check_positive(function: &'static str, name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CasimirError::domain(
            function,
            format!("{name} must be positive and finite, got {v}"),
        ))
    }
}

/// Σ_ℓ (ℓ² + c²)⁻² − π/(2c³): the exponentially small part of the ℓ-sum.
fn inner_remainder(c: f64) -> f64 {
    let x = 2.0 * PI * c;
    if x > 700.0 {
        return 0.0;
    }
    // q = e^{2πc} − 1; coth(πc) − 1 = 2/q, csch²(πc) = 4(q+1)/q²
    let q = x.exp_m1();
    PI / (2.0 * c * c * c) * (2.0 / q) + PI * PI / (2.0 * c * c) * (4.0 * (q + 1.0) / (q * q))
}

/// Σ_{ℓ∈ℤ} 1/(ℓ² + c²)² = (π/(2c³)) coth(πc) + (π²/(2c²)) csch²(πc).
pub fn inner_sum_sq(c: f64) -> Result<f64> {
    check_positive("inner_sum_sq", "c", c)?;
    Ok(PI / (2.0 * c * c * c) + inner_remainder(c))
}

/// Σ_{n≥1} r(c·n), summed until the geometric tail bound drops below
/// machine precision relative to the partial sum.
fn remainder_series(c: f64, ctl: &SumControl) -> Result<(f64, f64, u64)> {
    let ratio = (-2.0 * PI * c).exp();
    let mut sum = 0.0;
    let mut n: u64 = 0;
    loop {
        n += 1;
        if n > ctl.max_terms {
            return Err(CasimirError::Convergence {
                what: "lattice remainder series",
                terms: ctl.max_terms,
                est_error: f64::NAN,
                target: ctl.rel_tol * sum,
            });
        }
        let t = inner_remainder(c * n as f64);
        sum += t;
        if c * n as f64 >= 1.0 {
            let tail = t * ratio / (1.0 - ratio);
            if tail <= 0.25 * f64::EPSILON * sum || t == 0.0 {
                return Ok((sum, tail, n));
            }
        }
    }
}

fn rounding_estimate(value: f64, terms: u64) -> f64 {
    f64::EPSILON * (4.0 + (terms as f64).sqrt()) * value.abs()
}

/// g(η) in a chosen representation, without the relative-tolerance check.
pub fn g_parts(eta: f64, repr: GRepr, ctl: &SumControl) -> Result<GParts> {
    check_positive("g_sum", "eta", eta)?;
    let repr = match repr {
        GRepr::Auto if eta >= 1.0 => GRepr::Direct,
        GRepr::Auto => GRepr::Dual,
        r => r,
    };
    let (algebraic, weight, c) = match repr {
        GRepr::Direct => {
            let e4 = eta.powi(4);
            (2.0 * ZETA4 * e4 + PI * ZETA3 * eta, 2.0 * e4, eta)
        }
        _ => (2.0 * ZETA4 + PI * ZETA3 * eta.powi(3), 2.0, 1.0 / eta),
    };
    let (raw, tail, n) = remainder_series(c, ctl)?;
    let series = weight * raw;
    let value = algebraic + series;
    Ok(GParts {
        algebraic,
        series,
        est_error: weight * tail + rounding_estimate(value, n),
        series_error: weight * tail + rounding_estimate(series, n),
        terms_used: n,
        repr,
    })
}

/// g(η) in a chosen exponentially convergent representation.
pub fn g_series(eta: f64, repr: GRepr, ctl: &SumControl) -> Result<LatticeValue> {
    g_parts(eta, repr, ctl)?.lattice_value().checked("g_sum", ctl)
}

/// g(η) = Σ′ η⁴/(ℓ² + η²n²)², in the mode selected by `ctl`.
pub fn g_sum(eta: f64, ctl: &SumControl) -> Result<LatticeValue> {
    ctl.validate()?;
    match ctl.mode {
        SumMode::Accelerated => g_series(eta, GRepr::Auto, ctl),
        SumMode::Naive => {
            check_positive("g_sum", "eta", eta)?;
            naive_doubling(eta, false, ctl)?.checked("g_sum (naive)", ctl)
        }
    }
}

/// g(η) − 2ζ(4)η⁴ − πζ(3)η = 2η⁴ Σₙ r(ηn): what remains of g beyond its
/// large-η asymptotics. Exponentially small, O(e^{−2πη}).
pub fn g_high_temperature_remainder(eta: f64, ctl: &SumControl) -> Result<LatticeValue> {
    let parts = g_parts(eta, GRepr::Direct, ctl)?;
    Ok(LatticeValue {
        value: parts.series,
        est_error: parts.series_error,
        terms_used: parts.terms_used,
    })
}

/// Σ_{n≠0} (−1)ⁿ/n⁴ = −2η(4) = −7π⁴/360.
pub fn alternating_n4_sum() -> f64 {
    -2.0 * dirichlet_eta(4.0)
}

/// f(ξ) = (S(ξ) − S₀)/(2π⁴ξ³), where S is the primed alternating sum
/// Σ′(−1)ⁿ π⁴ξ⁴/(ℓ² + π²ξ²n²)² and S₀ = Σ_{n≠0}(−1)ⁿ/n⁴.
///
/// Accelerated mode splits n into even and odd parts, S(ξ) = g(2πξ)/8 − g(πξ).
/// When both arguments are below 1 the dual representation is used and the
/// algebraic parts of the two g's cancel S₀ identically, so only the
/// exponentially small series remain.
pub fn f_xi(xi: f64, ctl: &SumControl) -> Result<LatticeValue> {
    ctl.validate()?;
    check_positive("f_xi", "xi", xi)?;
    let norm = 1.0 / (2.0 * PI.powi(4) * xi.powi(3));
    match ctl.mode {
        SumMode::Accelerated => {
            let g_hot = g_parts(2.0 * PI * xi, GRepr::Auto, ctl)?;
            let g_cold = g_parts(PI * xi, GRepr::Auto, ctl)?;
            let (bracket, bracket_err) = if g_hot.repr == GRepr::Dual {
                // 2ζ(4)/8 − 2ζ(4) + 2η(4) = 0 and πζ(3)(2η)³/8 − πζ(3)η³ = 0
                (
                    g_hot.series / 8.0 - g_cold.series,
                    g_hot.series_error / 8.0 + g_cold.series_error,
                )
            } else {
                (
                    g_hot.value() / 8.0 - g_cold.value() - alternating_n4_sum(),
                    g_hot.est_error / 8.0 + g_cold.est_error,
                )
            };
            let value = norm * bracket;
            let est = norm * bracket_err + rounding_estimate(value, 1);
            LatticeValue {
                value,
                est_error: est,
                terms_used: g_hot.terms_used + g_cold.terms_used,
            }
            .checked("f_xi", ctl)
        }
        SumMode::Naive => {
            let s = alternating_sum_naive(PI * xi, ctl)?;
            LatticeValue {
                value: norm * (s.value - alternating_n4_sum()),
                est_error: norm * s.est_error,
                terms_used: s.terms_used,
            }
            .checked("f_xi (naive)", ctl)
        }
    }
}

/// Raw truncation of the primed alternating sum Σ′(−1)ⁿ η⁴/(ℓ² + η²n²)².
///
/// Rectangles |ℓ| ≤ L, |n| ≤ N grow together; consecutive N are averaged to
/// cancel the alternating boundary term. The tolerance is relative to the
/// sum itself.
pub fn alternating_sum_naive(eta: f64, ctl: &SumControl) -> Result<LatticeValue> {
    check_positive("alternating_sum_naive", "eta", eta)?;
    let v = naive_doubling(eta, true, ctl)?;
    v.checked("alternating lattice sum (naive)", ctl)
}

/// Rectangle half-widths adapted to the aspect of ℓ² + η²n².
fn rect_for(m: u64, eta: f64) -> (u64, u64) {
    let l = ((m as f64) * eta.max(1.0)).ceil() as u64;
    let n = ((m as f64) * (1.0 / eta).max(1.0)).ceil() as u64;
    (l, n)
}

/// Row sums Σ_{|ℓ|≤L} η⁴/(ℓ² + η²n²)² for n = 0..=n_max (origin excluded).
fn rows(eta: f64, l_max: u64, n_max: u64) -> Vec<f64> {
    let e4 = eta.powi(4);
    let e2 = eta * eta;
    par::map_range(Execution::Parallel, 0, n_max + 1, |n| {
        let nn = e2 * (n * n) as f64;
        let mut acc = 0.0;
        for l in (1..=l_max).rev() {
            let d = (l * l) as f64 + nn;
            acc += 2.0 * e4 / (d * d);
        }
        if n > 0 {
            acc += e4 / (nn * nn);
        }
        acc
    })
}

fn rect_total(rows: &[f64], n_max: usize, alternating: bool) -> f64 {
    let mut acc = 0.0;
    for n in (1..=n_max).rev() {
        let sign = if alternating && n % 2 == 1 { -1.0 } else { 1.0 };
        acc += 2.0 * sign * rows[n];
    }
    acc + rows[0]
}

fn naive_estimate(eta: f64, m: u64, alternating: bool) -> (f64, u64) {
    let (l, n) = rect_for(m, eta);
    let r = rows(eta, l, n + 1);
    let n = n as usize;
    let value = if alternating {
        0.5 * (rect_total(&r, n, true) + rect_total(&r, n + 1, true))
    } else {
        rect_total(&r, n, false)
    };
    (value, (2 * l + 1) * (2 * n as u64 + 1) - 1)
}

fn naive_doubling(eta: f64, alternating: bool, ctl: &SumControl) -> Result<LatticeValue> {
    let mut m = 8u64;
    let (mut prev, _) = naive_estimate(eta, m, alternating);
    loop {
        m *= 2;
        let (l, n) = rect_for(m, eta);
        if l.max(n) > ctl.max_terms {
            return Err(CasimirError::Convergence {
                what: "naive lattice sum",
                terms: ctl.max_terms,
                est_error: f64::NAN,
                target: ctl.rel_tol * prev.abs(),
            });
        }
        let (value, terms) = naive_estimate(eta, m, alternating);
        // raw square truncation of g leaves a tail ≈ (S_2M − S_M)/3
        let factor = if alternating { 1.0 } else { 0.5 };
        let est = factor * (value - prev).abs() + rounding_estimate(value, terms);
        if est <= ctl.rel_tol * value.abs() {
            return Ok(LatticeValue {
                value,
                est_error: est,
                terms_used: terms,
            });
        }
        prev = value;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn naive_inner(c: f64, l_max: i64) -> f64 {
        let mut acc = 0.0;
        for l in (1..=l_max).rev() {
            let d = (l * l) as f64 + c * c;
            acc += 2.0 / (d * d);
        }
        acc + 1.0 / c.powi(4)
    }

    #[test]
    fn inner_sum_closed_form_matches_truncation() {
        for c in [0.5, 1.0, 2.3] {
            let oracle = naive_inner(c, 1_000_000);
            assert!(rel(inner_sum_sq(c).unwrap(), oracle) < 1e-10, "c = {c}");
        }
        assert!((inner_sum_sq(1.0).unwrap() - 1.61367).abs() < 1e-5);
        let c = 40.0;
        assert!(rel(inner_sum_sq(c).unwrap(), PI / (2.0 * c * c * c)) < 1e-15);
        assert!(inner_sum_sq(0.0).is_err());
        assert!(inner_sum_sq(-1.0).is_err());
    }

    #[test]
    fn control_validation() {
        assert!(SumControl::new(1e-10, 16, SumMode::Naive).is_ok());
        assert!(SumControl::new(0.0, 16, SumMode::Naive).is_err());
        assert!(SumControl::new(1e-2, 16, SumMode::Naive).is_err());
        assert!(SumControl::new(1e-6, 7, SumMode::Naive).is_err());
    }

    /// Brute-force g over |ℓ|, |n| ≤ m (test oracle).
    fn brute_g(eta: f64, m: i64) -> f64 {
        let mut acc = 0.0;
        for n in -m..=m {
            for l in -m..=m {
                if l == 0 && n == 0 {
                    continue;
                }
                let d = (l * l) as f64 + eta * eta * (n * n) as f64;
                acc += eta.powi(4) / (d * d);
            }
        }
        acc
    }

    #[test]
    fn g_at_one_is_gaussian_lattice_constant() {
        let ctl = SumControl::default();
        let g1 = g_sum(1.0, &ctl).unwrap().value;
        let brute = brute_g(1.0, 2000);
        assert!((g1 - brute).abs() < 1e-5 * g1);
        assert!((g1 - 6.02681).abs() < 1e-5);
        // 4 ζ(2) β(2), β(2) = Catalan's constant
        assert!(rel(g1, 4.0 * PI * PI / 6.0 * 0.915_965_594_177_219) < 1e-14);
    }

    #[test]
    fn g_index_swap_scaling() {
        let ctl = SumControl::default();
        let g2 = g_sum(2.0, &ctl).unwrap().value;
        let gh = g_sum(0.5, &ctl).unwrap().value;
        assert!(rel(g2, 16.0 * gh) < 1e-14);
    }

    #[test]
    fn g_small_eta_limit() {
        let ctl = SumControl::default();
        let g = g_sum(1e-3, &ctl).unwrap().value;
        assert!(rel(g, PI.powi(4) / 45.0) < 1e-8);
        // naive oracle at η = 1e-3: the n-extent of the rectangle is 1/η times longer
        let naive = g_sum(1e-3, &SumControl::naive(1e-4, 1 << 16)).unwrap();
        assert!((naive.value - PI.powi(4) / 45.0).abs() < 5e-4 * naive.value);
    }

    #[test]
    fn representations_agree() {
        let ctl = SumControl::default();
        for eta in [0.3, 0.8, 1.0, 1.7, 3.0] {
            let d = g_series(eta, GRepr::Direct, &ctl).unwrap().value;
            let u = g_series(eta, GRepr::Dual, &ctl).unwrap().value;
            assert!(rel(d, u) < 1e-13, "eta = {eta}");
        }
    }

    #[test]
    fn reflection_with_direct_series() {
        let ctl = SumControl::default();
        let mut eta: f64 = 0.05;
        while eta <= 20.0 {
            let lhs = g_series(eta, GRepr::Direct, &ctl).unwrap().value;
            let rhs = eta.powi(4) * g_series(1.0 / eta, GRepr::Direct, &ctl).unwrap().value;
            assert!((lhs - rhs).abs() <= 1e-10 * lhs, "eta = {eta}");
            eta *= 1.37;
        }
    }

    #[test]
    fn naive_and_accelerated_agree() {
        let naive = SumControl::naive(1e-6, 1 << 14);
        let acc = SumControl::default();
        for eta in [0.1, 0.5, 1.0, 3.0, 10.0] {
            let a = g_sum(eta, &acc).unwrap();
            let n = g_sum(eta, &naive).unwrap();
            assert!(
                (a.value - n.value).abs() <= a.est_error + n.est_error,
                "eta = {eta}: {} vs {} (est {})",
                a.value,
                n.value,
                n.est_error
            );
        }
    }

    #[test]
    fn large_eta_asymptotics() {
        let ctl = SumControl::default();
        for eta in [20.0, 35.0, 80.0] {
            let g = g_series(eta, GRepr::Dual, &ctl).unwrap().value;
            let asym = 2.0 * ZETA4 * eta.powi(4) + PI * ZETA3 * eta;
            assert!((g - asym).abs() <= 1e-6 * 1e-5 * g.max(1.0) + 1e-6, "eta = {eta}");
        }
    }

    #[test]
    fn positivity() {
        let ctl = SumControl::default();
        let mut xi = 0.01;
        while xi < 50.0 {
            assert!(g_sum(PI * xi, &ctl).unwrap().value > 0.0);
            assert!(f_xi(xi, &ctl).unwrap().value > 0.0, "xi = {xi}");
            xi *= 1.5;
        }
    }

    /// Brute-force alternating sum with paired averaging in n (test oracle).
    fn brute_alternating(eta: f64, m: i64) -> f64 {
        let mut by_n = Vec::new();
        for n in 0..=m + 1 {
            let mut row = 0.0;
            for l in -m..=m {
                if l == 0 && n == 0 {
                    continue;
                }
                let d = (l * l) as f64 + eta * eta * (n * n) as f64;
                row += eta.powi(4) / (d * d);
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            by_n.push(if n == 0 { row } else { 2.0 * sign * row });
        }
        let s_m: f64 = by_n[..=m as usize].iter().sum();
        s_m + 0.5 * by_n[m as usize + 1]
    }

    #[test]
    fn even_odd_split_identity() {
        let ctl = SumControl::default();
        for xi in [0.3, 1.0] {
            let eta = PI * xi;
            let split = g_sum(2.0 * eta, &ctl).unwrap().value / 8.0 - g_sum(eta, &ctl).unwrap().value;
            let brute = brute_alternating(eta, 1500);
            assert!((split - brute).abs() < 1e-8 * split.abs().max(1.0), "xi = {xi}");
            let f = f_xi(xi, &ctl).unwrap().value;
            let via = (split - alternating_n4_sum()) / (2.0 * PI.powi(4) * xi.powi(3));
            assert!(rel(f, via) < 1e-12);
        }
    }

    #[test]
    fn f_modes_agree_at_half() {
        let acc = f_xi(0.5, &SumControl::default()).unwrap();
        let naive = f_xi(0.5, &SumControl::naive(1e-10, 1 << 14)).unwrap();
        assert!(rel(naive.value, acc.value) < 1e-9, "{} vs {}", naive.value, acc.value);
    }

    #[test]
    fn f_vanishes_at_low_temperature() {
        let ctl = SumControl::default();
        let f = f_xi(1e-3, &ctl).unwrap();
        assert!(f.value.abs() < 1e-300);
        // naive oracle: the raw alternating sum reproduces S₀ at ξ = 1e-3
        let s = alternating_sum_naive(PI * 1e-3, &SumControl::naive(1e-7, 1 << 16)).unwrap();
        assert!((s.value - alternating_n4_sum()).abs() <= 2.0 * s.est_error + 1e-12);
    }

    #[test]
    fn naive_hits_cap_cleanly() {
        let err = g_sum(1.0, &SumControl::naive(1e-10, 64)).unwrap_err();
        assert!(matches!(err, CasimirError::Convergence { .. }));
    }

    #[test]
    fn high_temperature_remainder_is_exponentially_small() {
        let ctl = SumControl::default();
        let r = g_high_temperature_remainder(3.0, &ctl).unwrap().value;
        let g = g_sum(3.0, &ctl).unwrap().value;
        let asym = 2.0 * ZETA4 * 81.0 + 3.0 * PI * ZETA3;
        assert!((g - asym - r).abs() < 1e-12 * g);
        assert!(r > 0.0 && r < 1e-5);
    }
}
