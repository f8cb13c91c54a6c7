//! Brute-force cross-checks built only from geometric series and elementary
//! functions: a Boltzmann mode sum for the thermal part and a cutoff
//! extraction of the zero-point constant.

use std::f64::consts::PI;

use crate::casimir::Slab;
use crate::error::{CasimirError, Result};

/// Cutoffs for the oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleControl {
    /// Largest odd spatial mode index m (μ = mπ/a).
    pub m_max: u64,
    /// Number of Boltzmann-series terms per mode.
    pub j_max: u64,
    /// Smallest rung of the cutoff ladder for the zero-point oracle.
    pub delta: f64,
    /// Tolerance for the first omitted term, relative to the result.
    pub rel_tol: f64,
}

impl Default for OracleControl {
    fn default() -> Self {
        OracleControl {
            m_max: 401,
            j_max: 512,
            delta: 0.01,
            rel_tol: 1e-13,
        }
    }
}

impl OracleControl {
    pub fn validate(&self) -> Result<()> {
        if self.m_max < 1 {
            return Err(CasimirError::invalid("m_max", "must be at least 1"));
        }
        if self.j_max < 1 {
            return Err(CasimirError::invalid("j_max", "must be at least 1"));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(CasimirError::invalid(
                "delta",
                format!("must be positive, got {}", self.delta),
            ));
        }
        if !(self.rel_tol > 0.0) {
            return Err(CasimirError::invalid("rel_tol", "must be positive"));
        }
        Ok(())
    }
}

/// e^{−x}(x + 1)/j³ with x = jβμ.
fn boltzmann_term(j: u64, beta_mu: f64) -> f64 {
    let x = j as f64 * beta_mu;
    (-x).exp() * (x + 1.0) / (j as f64).powi(3)
}

/// Thermal free energy per unit area from the mode sum
///
/// ```text
/// −(1/(πβ³)) Σ_{m odd} Σ_{j≥1} e^{−jβμ_m}(jβμ_m + 1)/j³,   μ_m = mπ/a,
/// ```
///
/// i.e. (1/β) Σ_modes ∫ d²κ/(2π)² ln(1 − e^{−βω}) with the κ-integral done.
pub fn thermal_oracle(slab: &Slab, ctl: &OracleControl) -> Result<f64> {
    ctl.validate()?;
    let step = slab.beta * PI / slab.a;
    let mut modes = Vec::new();
    let mut m = 1;
    while m <= ctl.m_max {
        let bm = step * m as f64;
        let s: f64 = (1..=ctl.j_max).rev().map(|j| boltzmann_term(j, bm)).sum();
        modes.push(s);
        m += 2;
    }
    let sum: f64 = modes.iter().rev().sum();
    let omitted_m = boltzmann_term(1, step * (m as f64));
    let omitted_j = boltzmann_term(ctl.j_max + 1, step);
    let omitted = omitted_m.max(omitted_j);
    if omitted > ctl.rel_tol * sum {
        return Err(CasimirError::Convergence {
            what: "thermal_oracle",
            terms: ctl.m_max.max(ctl.j_max),
            est_error: omitted / (PI * slab.beta.powi(3)),
            target: ctl.rel_tol * sum / (PI * slab.beta.powi(3)),
        });
    }
    Ok(-sum / (PI * slab.beta.powi(3)))
}

/// Cutoff-regularized zero-point energy per unit area with its bulk
/// divergence removed:
///
/// ```text
/// E(δ) = (1/2π) d²/dδ² [ 1/(2δ sinh(πδ/a)) ] − 3a/(2π²δ⁴).
/// ```
pub fn cutoff_energy(a: f64, delta: f64) -> f64 {
    cutoff_energy_raw(a, delta) - 3.0 * a / (2.0 * PI * PI * delta.powi(4))
}

/// E(δ) before the bulk subtraction.
pub fn cutoff_energy_raw(a: f64, delta: f64) -> f64 {
    let k = PI / a;
    // h = u·v/2 with u = 1/δ, v = csch(kδ)
    let u = 1.0 / delta;
    let du = -1.0 / (delta * delta);
    let ddu = 2.0 / delta.powi(3);
    let csch = 1.0 / (k * delta).sinh();
    let coth = 1.0 / (k * delta).tanh();
    let v = csch;
    let dv = -k * csch * coth;
    let ddv = k * k * csch * (1.0 + 2.0 * csch * csch);
    let h2 = 0.5 * (ddu * v + 2.0 * du * dv + u * ddv);
    h2 / (2.0 * PI)
}

/// Result of the δ → 0 extrapolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroPointEstimate {
    pub value: f64,
    /// E(δ) at δ = 4δ₀, 2δ₀, δ₀.
    pub ladder: [f64; 3],
    /// Observed convergence order, log₂ of successive ladder differences.
    pub order: f64,
    pub est_error: f64,
}

/// Zero-point energy per unit area by Richardson extrapolation of the
/// cutoff energy over δ ∈ {4δ₀, 2δ₀, δ₀}.
pub fn zero_point_ladder(a: f64, ctl: &OracleControl) -> Result<ZeroPointEstimate> {
    ctl.validate()?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(CasimirError::domain("zero_point_oracle", format!("a = {a}")));
    }
    let d = ctl.delta;
    let ladder = [cutoff_energy(a, 4.0 * d), cutoff_energy(a, 2.0 * d), cutoff_energy(a, d)];
    let d1 = ladder[1] - ladder[0];
    let d2 = ladder[2] - ladder[1];
    if d1 == 0.0 || d2 == 0.0 || d1.signum() != d2.signum() {
        return Err(CasimirError::Extrapolation(format!(
            "cutoff ladder is not monotone: {:?}",
            ladder
        )));
    }
    let order = (d1 / d2).abs().log2();
    let r1 = [(4.0 * ladder[1] - ladder[0]) / 3.0, (4.0 * ladder[2] - ladder[1]) / 3.0];
    let value = (16.0 * r1[1] - r1[0]) / 15.0;
    Ok(ZeroPointEstimate {
        value,
        ladder,
        order,
        est_error: (value - r1[1]).abs(),
    })
}

/// Zero-point energy per unit area, extrapolated from the cutoff ladder.
pub fn zero_point_oracle(a: f64, ctl: &OracleControl) -> Result<f64> {
    zero_point_ladder(a, ctl).map(|z| z.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(a: f64) -> f64 {
        7.0 * PI * PI / (720.0 * a.powi(3))
    }

    #[test]
    fn zero_point_matches_closed_form() {
        let ctl = OracleControl::default();
        let z = zero_point_ladder(1.0, &ctl).unwrap();
        assert!((z.value - exact(1.0)).abs() < 1e-6);
        assert!((z.order - 2.0).abs() < 0.2, "order {}", z.order);
        let two = zero_point_oracle(2.0, &ctl).unwrap();
        assert!((two - z.value / 8.0).abs() < 1e-7);
    }

    #[test]
    fn bulk_divergence() {
        let mut last = f64::INFINITY;
        for delta in [1e-2, 3e-3, 1e-3] {
            let scaled = cutoff_energy_raw(1.0, delta) * delta.powi(4);
            let dev = (scaled - 3.0 / (2.0 * PI * PI)).abs();
            assert!(dev < last);
            last = dev;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn thermal_oracle_low_temperature_is_single_mode() {
        let ctl = OracleControl::default();
        let slab = Slab::new(1.0, 30.0).unwrap();
        let v = thermal_oracle(&slab, &ctl).unwrap();
        let x = 30.0 * PI;
        let lead = -(-x).exp() * (x + 1.0) / (PI * 27000.0);
        assert!(((v - lead) / lead).abs() < 1e-14);
        assert!(v < 0.0);
    }

    #[test]
    fn thermal_oracle_plateau() {
        let slab = Slab::new(1.0, 0.5).unwrap();
        let base = OracleControl {
            j_max: 200,
            ..OracleControl::default()
        };
        let doubled = OracleControl { j_max: 400, ..base };
        let a = thermal_oracle(&slab, &base).unwrap();
        let b = thermal_oracle(&slab, &doubled).unwrap();
        assert!(((a - b) / b).abs() < 1e-12);
    }

    #[test]
    fn thermal_oracle_reports_short_series() {
        let slab = Slab::new(1.0, 0.05).unwrap();
        let ctl = OracleControl {
            j_max: 4,
            ..OracleControl::default()
        };
        assert!(matches!(
            thermal_oracle(&slab, &ctl),
            Err(CasimirError::Convergence { .. })
        ));
    }
}
