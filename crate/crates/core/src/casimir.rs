//! Free energy per unit transverse area of a massless scalar field that is
//! antiperiodic across a slab of width a at temperature T = 1/β, in natural
//! units.
//!
//! Three routes compute the same total:
//!
//! * **decomposition**: F = F₁ − F₂ with F₁ = F_per(2a), F₂ = F_per(a), where
//!   F_per(L) = −g(L/β)/(2π²L³) is the free energy of a periodic field of
//!   period L;
//! * **f-series**: F = 7π²/(720a³) − f(ξ)/(πβ³) with ξ = a/(πβ);
//! * **zeta**: F = (H(0) + H′(0))/(8πβ) from the generalized zeta function,
//!   expressed through ζ_R and the Epstein function at z = −1.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::epstein::{epstein2, epstein2_deriv_z_with_error, EpsteinForm};
use crate::error::{CasimirError, Result};
use crate::lattice::{
    f_xi, g_high_temperature_remainder, g_series, g_sum, GRepr, LatticeValue,
    SumControl,
};
use crate::oracle::{thermal_oracle, OracleControl};
use crate::specfun::{riemann_zeta, riemann_zeta_deriv, ZETA3};

/// Slab width and inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slab {
    pub a: f64,
    pub beta: f64,
}

impl Slab {
    pub fn new(a: f64, beta: f64) -> Result<Self> {
        for (field, v) in [("a", a), ("beta", beta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CasimirError::invalid(
                    field,
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
        Ok(Slab { a, beta })
    }

    /// The slab of width `a` at reduced temperature ξ.
    pub fn from_xi(a: f64, xi: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(CasimirError::invalid(
                "xi",
                format!("must be positive and finite, got {xi}"),
            ));
        }
        Slab::new(a, a / (PI * xi))
    }

    pub fn xi(&self) -> f64 {
        xi_of(self)
    }

    pub fn temperature(&self) -> f64 {
        1.0 / self.beta
    }

    /// The same temperature with the width scaled by `factor`.
    pub fn widened(&self, factor: f64) -> Self {
        Slab {
            a: self.a * factor,
            beta: self.beta,
        }
    }
}

/// Reduced temperature ξ = a/(πβ).
pub fn xi_of(slab: &Slab) -> f64 {
    slab.a / (PI * slab.beta)
}

/// Eigenvalue spectrum ω² = μ_m² + ω_ℓ² + κ² of the Euclidean operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpectrum {
    pub slab: Slab,
}

impl ModeSpectrum {
    pub fn new(slab: Slab) -> Self {
        ModeSpectrum { slab }
    }

    /// μ_m = (2m − 1)π/a for m ≥ 1.
    pub fn spatial_mode(&self, m: u64) -> f64 {
        assert!(m >= 1, "spatial modes start at m = 1");
        (2 * m - 1) as f64 * PI / self.slab.a
    }

    /// Each spatial mode appears twice (n and −n − 1).
    pub fn degeneracy(&self) -> u32 {
        2
    }

    /// ω_ℓ = 2πℓ/β.
    pub fn matsubara(&self, l: i64) -> f64 {
        2.0 * PI * l as f64 / self.slab.beta
    }

    /// Eigenvalue for spatial mode m, Matsubara index ℓ and transverse κ².
    pub fn eigenvalue(&self, m: u64, l: i64, kappa_sq: f64) -> f64 {
        self.spatial_mode(m).powi(2) + self.matsubara(l).powi(2) + kappa_sq
    }
}

/// How the total free energy is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    Decomposition,
    FSeries,
    Zeta,
}

impl Route {
    pub const ALL: [Route; 3] = [Route::Decomposition, Route::FSeries, Route::Zeta];

    pub fn as_str(self) -> &'static str {
        match self {
            Route::Decomposition => "decomposition",
            Route::FSeries => "f_series",
            Route::Zeta => "zeta",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Route {
    type Err = CasimirError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "decomposition" => Ok(Route::Decomposition),
            "f_series" | "f-series" => Ok(Route::FSeries),
            "zeta" => Ok(Route::Zeta),
            other => Err(CasimirError::invalid(
                "route",
                format!("unknown route '{other}'"),
            )),
        }
    }
}

/// Free energy per unit area and its pieces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEnergyBreakdown {
    pub slab: Slab,
    /// Zero-temperature (Casimir) energy 7π²/(720a³).
    pub e0: f64,
    /// F₁ = F_per(2a).
    pub f1: f64,
    /// F₂ = F_per(a).
    pub f2: f64,
    pub thermal: f64,
    pub total: f64,
    pub route: Route,
    pub est_error: f64,
}

/// Casimir energy per unit area at T = 0: 7π²/(720a³).
pub fn zero_point_antiperiodic(a: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(CasimirError::domain(
            "zero_point_antiperiodic",
            format!("a must be positive, got {a}"),
        ));
    }
    Ok(7.0 * PI * PI / (720.0 * a.powi(3)))
}

/// The zero-temperature constant as it would read with a single factor of π,
/// 7π/(720a³). Kept for reporting.
pub fn zero_point_single_pi(a: f64) -> f64 {
    7.0 * PI / (720.0 * a.powi(3))
}

fn scaled(v: LatticeValue, factor: f64) -> LatticeValue {
    LatticeValue {
        value: factor * v.value,
        est_error: factor.abs() * v.est_error,
        terms_used: v.terms_used,
    }
}

/// Free energy per unit area of a periodic field with period a:
/// −g(a/β)/(2π²a³) = −g(πξ)/(2π²a³).
pub fn free_energy_periodic(slab: &Slab, ctl: &SumControl) -> Result<LatticeValue> {
    let g = g_sum(slab.a / slab.beta, ctl)?;
    Ok(scaled(g, -1.0 / (2.0 * PI * PI * slab.a.powi(3))))
}

/// F₁ = −g(2πξ)/(16π²a³), the periodic free energy at period 2a.
pub fn f1(slab: &Slab, ctl: &SumControl) -> Result<LatticeValue> {
    let g = g_sum(2.0 * PI * slab.xi(), ctl)?;
    Ok(scaled(g, -1.0 / (16.0 * PI * PI * slab.a.powi(3))))
}

/// F₂ = −g(πξ)/(2π²a³), the periodic free energy at period a.
pub fn f2(slab: &Slab, ctl: &SumControl) -> Result<LatticeValue> {
    let g = g_sum(PI * slab.xi(), ctl)?;
    Ok(scaled(g, -1.0 / (2.0 * PI * PI * slab.a.powi(3))))
}

/// Thermal part −f(ξ)/(πβ³) = total − 7π²/(720a³). Strictly negative.
pub fn thermal_part(slab: &Slab, ctl: &SumControl) -> Result<LatticeValue> {
    let f = f_xi(slab.xi(), ctl)?;
    Ok(scaled(f, -1.0 / (PI * slab.beta.powi(3))))
}

/// Free energy per unit area by the chosen route.
pub fn free_energy_antiperiodic(
    slab: &Slab,
    route: Route,
    ctl: &SumControl,
) -> Result<FreeEnergyBreakdown> {
    ctl.validate()?;
    let e0 = zero_point_antiperiodic(slab.a)?;
    match route {
        Route::Decomposition => {
            let (p1, p2) = (f1(slab, ctl)?, f2(slab, ctl)?);
            let total = p1.value - p2.value;
            let thermal = thermal_part(slab, ctl)?;
            Ok(FreeEnergyBreakdown {
                slab: *slab,
                e0,
                f1: p1.value,
                f2: p2.value,
                thermal: thermal.value,
                total,
                route,
                est_error: p1.est_error + p2.est_error + f64::EPSILON * total.abs(),
            })
        }
        Route::FSeries => {
            // F₁ and F₂ are reported alongside; the total uses f(ξ) only
            let (p1, p2) = (f1(slab, ctl)?, f2(slab, ctl)?);
            let thermal = thermal_part(slab, ctl)?;
            let total = e0 + thermal.value;
            Ok(FreeEnergyBreakdown {
                slab: *slab,
                e0,
                f1: p1.value,
                f2: p2.value,
                thermal: thermal.value,
                total,
                route,
                est_error: thermal.est_error + 2.0 * f64::EPSILON * total.abs().max(e0),
            })
        }
        Route::Zeta => zeta_route(slab, e0),
    }
}

/// Σ_{n₁,n₂ ≥ 1} (a₁n₁² + a₂n₂²)^{−z} and its z-derivative (with error), from
/// the full primed sum minus its two axes.
fn quadrant_epstein(z: f64, a1: f64, a2: f64) -> Result<(f64, f64, f64)> {
    let form = EpsteinForm::new(z, a1, a2)?;
    let e = epstein2(form)?;
    let (de, de_err) = epstein2_deriv_z_with_error(form)?;
    let zr = riemann_zeta(2.0 * z)?;
    let zr_d = riemann_zeta_deriv(2.0 * z)?;
    let (p1, p2) = (a1.powf(-z), a2.powf(-z));
    let q = (e - 2.0 * zr * (p1 + p2)) / 4.0;
    let dq = (de - 4.0 * zr_d * (p1 + p2) + 2.0 * zr * (a1.ln() * p1 + a2.ln() * p2)) / 4.0;
    Ok((q, dq, de_err / 4.0))
}

/// Periodic free energy per unit area at period `period`, from the Epstein
/// function: (π/(8β)) [E₂(−1)(1 − 2 ln π) + ∂_zE₂(−1)] with a₁ = 4/L², a₂ = 4/β².
fn periodic_from_epstein(period: f64, beta: f64) -> Result<(f64, f64)> {
    let form = EpsteinForm::new(-1.0, 4.0 / (period * period), 4.0 / (beta * beta))?;
    let e = epstein2(form)?;
    let (de, err) = epstein2_deriv_z_with_error(form)?;
    let pref = PI / (8.0 * beta);
    Ok((pref * (e * (1.0 - 2.0 * PI.ln()) + de), pref * err))
}

fn zeta_route(slab: &Slab, e0: f64) -> Result<FreeEnergyBreakdown> {
    let Slab { a, beta } = *slab;
    let k = PI / a;
    let zeta_m2 = riemann_zeta(-2.0)?;
    let zeta_m2_d = riemann_zeta_deriv(-2.0)?;

    // H(s) = 2(π/a)^{2−2s}(1 − 2^{2−2s})ζ_R(2s − 2)
    //      + 4π^{2−2s}[Q(s − 1; 1/a², 4/β²) − Q(s − 1; 4/a², 4/β²)]
    let ln2 = std::f64::consts::LN_2;
    let h_axis = -6.0 * k * k * zeta_m2;
    let dh_axis = 2.0 * k * k * (6.0 * k.ln() * zeta_m2 + 8.0 * ln2 * zeta_m2 - 6.0 * zeta_m2_d);
    let b2 = 4.0 / (beta * beta);
    let (q_wide, dq_wide, err_wide) = quadrant_epstein(-1.0, 1.0 / (a * a), b2)?;
    let (q_narrow, dq_narrow, err_narrow) = quadrant_epstein(-1.0, 4.0 / (a * a), b2)?;
    let dq = q_wide - q_narrow;
    let h_lattice = 4.0 * PI * PI * dq;
    let dh_lattice = 4.0 * PI * PI * (-2.0 * PI.ln() * dq + (dq_wide - dq_narrow));

    let norm = 1.0 / (8.0 * PI * beta);
    let total = norm * (h_axis + dh_axis + h_lattice + dh_lattice);
    let (p1, e1) = periodic_from_epstein(2.0 * a, beta)?;
    let (p2, e2) = periodic_from_epstein(a, beta)?;
    let deriv_err = norm * 4.0 * PI * PI * (err_wide + err_narrow);
    let rounding = 64.0 * f64::EPSILON * (p1.abs() + p2.abs());
    Ok(FreeEnergyBreakdown {
        slab: *slab,
        e0,
        f1: p1,
        f2: p2,
        thermal: total - e0,
        total,
        route: Route::Zeta,
        est_error: deriv_err + e1 + e2 + rounding,
    })
}

/// All three routes, checked against each other.
///
/// Fails with [`CasimirError::RouteDisagreement`] if any two totals differ by
/// more than ten times their combined error estimates.
pub fn free_energy_all_routes(slab: &Slab, ctl: &SumControl) -> Result<Vec<FreeEnergyBreakdown>> {
    let rows = Route::ALL
        .iter()
        .map(|&r| free_energy_antiperiodic(slab, r, ctl))
        .collect::<Result<Vec<_>>>()?;
    for (i, x) in rows.iter().enumerate() {
        for y in &rows[i + 1..] {
            let diff = (x.total - y.total).abs();
            let allowed = 10.0 * (x.est_error + y.est_error);
            if diff > allowed {
                return Err(CasimirError::RouteDisagreement {
                    detail: format!(
                        "{} gives {:.17e}, {} gives {:.17e} (allowed difference {:.3e})",
                        x.route, x.total, y.route, y.total, allowed
                    ),
                });
            }
        }
    }
    Ok(rows)
}

/// Inversion-symmetry relations that can be checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TisRelation {
    /// aF₁(ξ) = (2πξ)⁴ aF₁(1/(4π²ξ)).
    F1Relation,
    /// aF₂(ξ) = (πξ)⁴ aF₂(1/(π²ξ)).
    F2Corrected,
    /// aF₂(ξ) = (πξ)⁴ aF₁(1/(π²ξ)), with F₁ on the right.
    F2AsPrinted,
    /// g(η) = η⁴ g(1/η).
    GReflection,
}

impl TisRelation {
    pub const ALL: [TisRelation; 4] = [
        TisRelation::F1Relation,
        TisRelation::F2Corrected,
        TisRelation::F2AsPrinted,
        TisRelation::GReflection,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TisRelation::F1Relation => "f1",
            TisRelation::F2Corrected => "f2-corrected",
            TisRelation::F2AsPrinted => "f2-as-printed",
            TisRelation::GReflection => "g",
        }
    }

    /// The argument mapped to by the relation.
    pub fn image(self, xi: f64) -> f64 {
        match self {
            TisRelation::F1Relation => 1.0 / (4.0 * PI * PI * xi),
            TisRelation::F2Corrected | TisRelation::F2AsPrinted => 1.0 / (PI * PI * xi),
            TisRelation::GReflection => 1.0 / xi,
        }
    }

    /// The self-dual point of the map ξ ↦ image(ξ).
    pub fn fixed_point(self) -> f64 {
        match self {
            TisRelation::F1Relation => 1.0 / (2.0 * PI),
            TisRelation::F2Corrected | TisRelation::F2AsPrinted => 1.0 / PI,
            TisRelation::GReflection => 1.0,
        }
    }
}

impl fmt::Display for TisRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TisRelation {
    type Err = CasimirError;

    fn from_str(s: &str) -> Result<Self> {
        TisRelation::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| CasimirError::invalid("relation", format!("unknown relation '{s}'")))
    }
}

/// Both sides of one inversion-symmetry relation at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TisReport {
    pub relation: TisRelation,
    pub xi: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    /// ξ is the fixed point of the map, where the two sides coincide trivially.
    pub fixed_point: bool,
}

/// Dimensionless profile aF₁ at a = 1 as a function of ξ, via the direct series.
fn profile_f1(xi: f64, ctl: &SumControl) -> Result<f64> {
    Ok(-g_series(2.0 * PI * xi, GRepr::Direct, ctl)?.value / (16.0 * PI * PI))
}

/// Dimensionless profile aF₂ at a = 1 as a function of ξ, via the direct series.
fn profile_f2(xi: f64, ctl: &SumControl) -> Result<f64> {
    Ok(-g_series(PI * xi, GRepr::Direct, ctl)?.value / (2.0 * PI * PI))
}

/// Evaluates both sides of `relation` at ξ.
///
/// Both sides use the direct (n-outer) series of g, so the check is not
/// satisfied by construction of the evaluation.
pub fn tis_check(relation: TisRelation, xi: f64, ctl: &SumControl) -> Result<TisReport> {
    ctl.validate()?;
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(CasimirError::invalid(
            "xi",
            format!("must be positive and finite, got {xi}"),
        ));
    }
    let image = relation.image(xi);
    let (lhs, rhs) = match relation {
        TisRelation::F1Relation => (
            profile_f1(xi, ctl)?,
            (2.0 * PI * xi).powi(4) * profile_f1(image, ctl)?,
        ),
        TisRelation::F2Corrected => (
            profile_f2(xi, ctl)?,
            (PI * xi).powi(4) * profile_f2(image, ctl)?,
        ),
        TisRelation::F2AsPrinted => (
            profile_f2(xi, ctl)?,
            (PI * xi).powi(4) * profile_f1(image, ctl)?,
        ),
        TisRelation::GReflection => (
            g_series(xi, GRepr::Direct, ctl)?.value,
            xi.powi(4) * g_series(image, GRepr::Direct, ctl)?.value,
        ),
    };
    let abs_residual = (lhs - rhs).abs();
    let scale = lhs.abs().max(rhs.abs());
    let fp = relation.fixed_point();
    Ok(TisReport {
        relation,
        xi,
        lhs,
        rhs,
        abs_residual,
        rel_residual: if scale > 0.0 { abs_residual / scale } else { 0.0 },
        fixed_point: (xi - fp).abs() <= 1e-12 * fp,
    })
}

/// Algebraic high-temperature terms of the free energy per unit area, as
/// (name, value) pairs: the Stefan–Boltzmann term −π²aT⁴/90, the linear term
/// 3ζ(3)T/(8πa²), and the T⁰ term, which vanishes. The remainder is
/// O(e^{−2πaT}).
pub fn high_temperature_expansion(slab: &Slab) -> Vec<(&'static str, f64)> {
    let (a, t) = (slab.a, slab.temperature());
    vec![
        ("stefan_boltzmann", -PI * PI * a * t.powi(4) / 90.0),
        ("linear_in_t", 3.0 * ZETA3 * t / (8.0 * PI * a * a)),
        ("constant", 0.0),
    ]
}

/// Thermal part at low temperature, obtained by reflecting the
/// exponentially small high-temperature remainder of g:
///
/// ```text
/// thermal = −(1/(2π²a³)) [ (2πξ)⁴ r(1/(2πξ))/8 − (πξ)⁴ r(1/(πξ)) ],
/// ```
///
/// where r(η) = g(η) − 2ζ(4)η⁴ − πζ(3)η. The result is cross-checked against
/// the Boltzmann mode sum and an error is raised if the two differ by more
/// than 1e−9 relative.
pub fn low_temperature_correction(slab: &Slab, ctl: &SumControl) -> Result<f64> {
    ctl.validate()?;
    let xi = slab.xi();
    let hot = g_high_temperature_remainder(1.0 / (2.0 * PI * xi), ctl)?.value;
    let cold = g_high_temperature_remainder(1.0 / (PI * xi), ctl)?.value;
    let bracket = (2.0 * PI * xi).powi(4) * hot / 8.0 - (PI * xi).powi(4) * cold;
    let value = -bracket / (2.0 * PI * PI * slab.a.powi(3));

    let direct = thermal_oracle(slab, &OracleControl::default())?;
    let scale = value.abs().max(direct.abs());
    if scale > 0.0 && (value - direct).abs() > 1e-9 * scale {
        return Err(CasimirError::RouteDisagreement {
            detail: format!(
                "low-temperature duality gives {value:.17e}, mode sum gives {direct:.17e}"
            ),
        });
    }
    Ok(value)
}
