//! The two-dimensional Epstein function
//!
//! ```text
//! E₂(z; a₁, a₂) = Σ′_{n₁,n₂} (a₁n₁² + a₂n₂²)^{−z},
//! ```
//!
//! summed directly for z > 1 and continued to all real z ≠ 1 through the
//! incomplete-gamma split of its Mellin representation.

use std::f64::consts::PI;

use crate::error::{CasimirError, Result};
use crate::lattice::{LatticeValue, SumControl};
use crate::par::{self, Execution};
use crate::quad;
use crate::specfun::{recip_gamma, upper_incomplete_gamma};

/// Argument package (z; a₁, a₂) of E₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsteinForm {
    pub z: f64,
    pub a1: f64,
    pub a2: f64,
}

impl EpsteinForm {
    pub fn new(z: f64, a1: f64, a2: f64) -> Result<Self> {
        let form = EpsteinForm { z, a1, a2 };
        form.validate()?;
        Ok(form)
    }

    /// The same form with a₁ and a₂ exchanged.
    pub fn swapped(self) -> Self {
        EpsteinForm {
            a1: self.a2,
            a2: self.a1,
            ..self
        }
    }

    /// The form at 1 − z with inverted coefficients, as it appears on the
    /// other side of the functional equation.
    pub fn dual(self) -> Self {
        EpsteinForm {
            z: 1.0 - self.z,
            a1: 1.0 / self.a1,
            a2: 1.0 / self.a2,
        }
    }

    pub fn at(self, z: f64) -> Self {
        EpsteinForm { z, ..self }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("a1", self.a1), ("a2", self.a2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CasimirError::invalid(
                    name,
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
        if !self.z.is_finite() {
            return Err(CasimirError::invalid("z", "must be finite"));
        }
        Ok(())
    }
}

/// Lattice points are dropped once the incomplete-gamma argument exceeds this.
const CUTOFF: f64 = 60.0;

/// Σ′ over the lattice of k(π(r n₁² + n₂²/r)), truncated at `CUTOFF`.
fn theta_half<K: Fn(f64) -> Result<f64>>(r: f64, kernel: K) -> Result<f64> {
    let k1 = (CUTOFF / (PI * r)).sqrt().floor() as i64;
    let k2 = (CUTOFF * r / PI).sqrt().floor() as i64;
    let mut acc = 0.0;
    for n1 in (0..=k1).rev() {
        for n2 in (0..=k2).rev() {
            if n1 == 0 && n2 == 0 {
                continue;
            }
            let x = PI * (r * (n1 * n1) as f64 + (n2 * n2) as f64 / r);
            if x > CUTOFF {
                continue;
            }
            let mult = match (n1, n2) {
                (0, _) | (_, 0) => 2.0,
                _ => 4.0,
            };
            acc += mult * kernel(x)?;
        }
    }
    Ok(acc)
}

/// E₂(z; a₁, a₂) for every real z ≠ 1.
///
/// With D = (a₁a₂)^{−1/2} and r = √(a₁/a₂), splitting the Mellin integral of
/// the theta series at the self-dual point gives
///
/// ```text
/// E₂(z) = (πD)^z [ (Σ′ x^{−z}Γ(z,x) + Σ′ y^{z−1}Γ(1−z,y) + 1/(z−1)) / Γ(z) − 1/Γ(z+1) ]
/// ```
///
/// where x = π(r n₁² + n₂²/r) and y is the same with r → 1/r.
pub fn epstein2(form: EpsteinForm) -> Result<f64> {
    form.validate()?;
    let EpsteinForm { z, a1, a2 } = form;
    if z == 1.0 {
        return Err(CasimirError::Pole {
            function: "epstein2",
            at: 1.0,
        });
    }
    let d = 1.0 / (a1 * a2).sqrt();
    let r = (a1 / a2).sqrt();
    let near = theta_half(r, |x| Ok(x.powf(-z) * upper_incomplete_gamma(z, x)?))?;
    let far = theta_half(1.0 / r, |y| Ok(y.powf(z - 1.0) * upper_incomplete_gamma(1.0 - z, y)?))?;
    let bracket = recip_gamma(z) * (near + far + 1.0 / (z - 1.0)) - recip_gamma(z + 1.0);
    Ok((PI * d).powf(z) * bracket)
}

const DERIV_STEP: f64 = 1e-3;

/// ∂E₂/∂z by a five-point central difference on the continuation.
pub fn epstein2_deriv_z(form: EpsteinForm) -> Result<f64> {
    form.validate()?;
    if (form.z - 1.0).abs() <= 2.0 * DERIV_STEP {
        return Err(CasimirError::Pole {
            function: "epstein2_deriv_z",
            at: 1.0,
        });
    }
    stencil(form, DERIV_STEP)
}

/// ∂E₂/∂z together with an error estimate from repeating the stencil at
/// twice the step.
pub fn epstein2_deriv_z_with_error(form: EpsteinForm) -> Result<(f64, f64)> {
    form.validate()?;
    if (form.z - 1.0).abs() <= 4.0 * DERIV_STEP {
        return Err(CasimirError::Pole {
            function: "epstein2_deriv_z",
            at: 1.0,
        });
    }
    let d = stencil(form, DERIV_STEP)?;
    let coarse = stencil(form, 2.0 * DERIV_STEP)?;
    Ok((d, (d - coarse).abs()))
}

fn stencil(form: EpsteinForm, h: f64) -> Result<f64> {
    let e = |k: f64| epstein2(form.at(form.z + k * h));
    Ok((e(-2.0)? - 8.0 * e(-1.0)? + 8.0 * e(1.0)? - e(2.0)?) / (12.0 * h))
}

/// Both sides of the functional equation
/// E₂(z) = D π^{2z−1} Γ(1−z)/Γ(z) · E₂(1−z; 1/a₁, 1/a₂).
pub fn functional_equation_sides(form: EpsteinForm) -> Result<(f64, f64)> {
    let lhs = epstein2(form)?;
    let d = 1.0 / (form.a1 * form.a2).sqrt();
    let ratio = recip_gamma(form.z) / recip_gamma(1.0 - form.z);
    let rhs = d * PI.powf(2.0 * form.z - 1.0) * ratio * epstein2(form.dual())?;
    Ok((lhs, rhs))
}

/// |lhs − rhs| / max(|lhs|, |rhs|) for the functional equation; zero at the
/// trivial zeros z = −1, −2, … where both sides vanish.
pub fn functional_equation_residual(form: EpsteinForm) -> Result<f64> {
    let (lhs, rhs) = functional_equation_sides(form)?;
    let scale = lhs.abs().max(rhs.abs());
    Ok(if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale })
}

/// Truncated sum over |n₁| ≤ N₁, |n₂| ≤ N₂, origin excluded.
fn rectangle_sum(form: &EpsteinForm, n1: u64, n2: u64) -> f64 {
    let EpsteinForm { z, a1, a2 } = *form;
    let rows = par::map_range(Execution::Parallel, 0, n2 + 1, |j| {
        let yy = a2 * (j * j) as f64;
        let mut acc = 0.0;
        for i in (1..=n1).rev() {
            acc += 2.0 * (a1 * (i * i) as f64 + yy).powf(-z);
        }
        if j > 0 {
            acc += yy.powf(-z);
        }
        acc
    });
    let mut total = 0.0;
    for j in (1..rows.len()).rev() {
        total += 2.0 * rows[j];
    }
    total + rows[0]
}

/// Continuum estimate of the lattice sum outside the rectangle
/// |x| ≤ N₁ + ½, |y| ≤ N₂ + ½: the area integral plus the leading midpoint
/// correction, expressed as a boundary flux.
fn outside_tail(form: &EpsteinForm, n1: u64, n2: u64) -> f64 {
    let EpsteinForm { z, a1, a2 } = *form;
    let (x1, x2) = (n1 as f64 + 0.5, n2 as f64 + 0.5);
    let (ua, vb) = (a1.sqrt() * x1, a2.sqrt() * x2);
    let theta_c = vb.atan2(ua);
    let p = 2.0 - 2.0 * z;
    let radial = |rad: f64| rad.powf(p) / (2.0 * z - 2.0);
    let area = 4.0 / (a1 * a2).sqrt()
        * (quad::integrate(|t| radial(ua / t.cos()), 0.0, theta_c, 4)
            + quad::integrate(|t| radial(vb / t.sin()), theta_c, PI / 2.0, 4));
    let q = |x: f64, y: f64| (a1 * x * x + a2 * y * y).powf(-z - 1.0);
    let flux_x = quad::integrate(|y| -2.0 * z * a1 * x1 * q(x1, y), 0.0, x2, 4);
    let flux_y = quad::integrate(|x| -2.0 * z * a2 * x2 * q(x, x2), 0.0, x1, 4);
    let laplacian = -4.0 * (flux_x + flux_y);
    area - laplacian / 24.0
}

fn direct_at(form: &EpsteinForm, rho: f64) -> (f64, u64, u64) {
    let n1 = ((rho / form.a1.sqrt()).ceil() as u64).max(8);
    let n2 = ((rho / form.a2.sqrt()).ceil() as u64).max(8);
    (rectangle_sum(form, n1, n2) + outside_tail(form, n1, n2), n1, n2)
}

/// E₂ by direct summation, z > 1.
///
/// The lattice is summed over a rectangle adapted to the form and the
/// remainder replaced by its continuum estimate; the rectangle is doubled
/// until successive values agree to `ctl.rel_tol`.
pub fn epstein2_direct(form: EpsteinForm, ctl: &SumControl) -> Result<LatticeValue> {
    form.validate()?;
    ctl.validate()?;
    if form.z <= 1.0 {
        return Err(CasimirError::domain(
            "epstein2_direct",
            format!("direct summation needs z > 1, got {}", form.z),
        ));
    }
    let mut rho = 16.0;
    let (mut prev, _, _) = direct_at(&form, rho);
    loop {
        rho *= 2.0;
        let (value, n1, n2) = direct_at(&form, rho);
        let terms = (2 * n1 + 1) * (2 * n2 + 1) - 1;
        let est = (value - prev).abs() + f64::EPSILON * (terms as f64).sqrt() * value.abs();
        if est <= ctl.rel_tol * value.abs() {
            return Ok(LatticeValue {
                value,
                est_error: est,
                terms_used: terms,
            });
        }
        if n1.max(n2) * 2 > ctl.max_terms {
            return Err(CasimirError::Convergence {
                what: "epstein2_direct",
                terms,
                est_error: est,
                target: ctl.rel_tol * value.abs(),
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

    #[test]
    fn special_values() {
        for (a1, a2) in [(1.0, 1.0), (0.3, 7.0), (1.0, 4.0)] {
            let e0 = epstein2(EpsteinForm::new(0.0, a1, a2).unwrap()).unwrap();
            assert!((e0 + 1.0).abs() < 1e-14, "E(0) = {e0}");
            let em1 = epstein2(EpsteinForm::new(-1.0, a1, a2).unwrap()).unwrap();
            assert!(em1.abs() < 1e-14);
        }
        let pole = epstein2(EpsteinForm::new(1.0, 1.0, 1.0).unwrap());
        assert!(matches!(pole, Err(CasimirError::Pole { .. })));
    }

    #[test]
    fn continuation_near_zero_extrapolates_to_minus_one() {
        let f = EpsteinForm::new(0.0, 1.0, 3.0).unwrap();
        let p = epstein2(f.at(1e-3)).unwrap();
        let m = epstein2(f.at(-1e-3)).unwrap();
        assert!(((p + m) / 2.0 + 1.0).abs() < 1e-5);
    }

    #[test]
    fn invalid_forms() {
        assert!(EpsteinForm::new(2.0, 0.0, 1.0).is_err());
        assert!(EpsteinForm::new(2.0, 1.0, -1.0).is_err());
        let err = epstein2_direct(
            EpsteinForm::new(0.5, 1.0, 1.0).unwrap(),
            &SumControl::default(),
        );
        assert!(matches!(err, Err(CasimirError::Domain { .. })));
    }

    #[test]
    fn derivative_pole_guard() {
        let f = EpsteinForm::new(1.001, 1.0, 1.0).unwrap();
        assert!(matches!(epstein2_deriv_z(f), Err(CasimirError::Pole { .. })));
    }

    #[test]
    fn symmetric_and_homogeneous() {
        for z in [-1.0, 0.4, 2.0] {
            let f = EpsteinForm::new(z, 1.0, 4.0).unwrap();
            let a = epstein2(f).unwrap();
            let b = epstein2(f.swapped()).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }
        let f = EpsteinForm::new(2.5, 0.7, 1.9).unwrap();
        let base = epstein2(f).unwrap();
        for lambda in [0.25f64, 4.0] {
            let scaled = epstein2(EpsteinForm::new(2.5, lambda * 0.7, lambda * 1.9).unwrap()).unwrap();
            assert!(rel(scaled, lambda.powf(-2.5) * base) < 1e-11);
        }
    }

    #[test]
    fn direct_agrees_with_continuation() {
        let ctl = SumControl::default();
        for (z, a1, a2) in [(1.5, 1.0, 1.0), (2.0, 1.0, 1.0), (3.0, 1.0, 2.0), (1.5, 0.2, 3.0)] {
            let f = EpsteinForm::new(z, a1, a2).unwrap();
            let d = epstein2_direct(f, &ctl).unwrap();
            let c = epstein2(f).unwrap();
            assert!(rel(d.value, c) < 1e-10, "z = {z}: {} vs {c}", d.value);
        }
    }

    #[test]
    fn brute_force_square_lattice() {
        // |n| ≤ M plus the continuum tail of r⁻⁴ outside the square of half-side M + ½
        let m = 2000i64;
        let mut acc = 0.0;
        for n1 in -m..=m {
            for n2 in -m..=m {
                if n1 != 0 || n2 != 0 {
                    let q = (n1 * n1 + n2 * n2) as f64;
                    acc += 1.0 / (q * q);
                }
            }
        }
        let x = m as f64 + 0.5;
        let oracle = acc + (PI / 2.0 + 1.0) / (x * x);
        let f = EpsteinForm::new(2.0, 1.0, 1.0).unwrap();
        let direct = epstein2_direct(f, &SumControl::default()).unwrap();
        assert!(rel(direct.value, oracle) < 1e-9);
        assert!(rel(epstein2(f).unwrap(), oracle) < 1e-9);
        let quarter = epstein2_direct(EpsteinForm::new(2.0, 4.0, 4.0).unwrap(), &SumControl::default())
            .unwrap();
        assert!(rel(quarter.value, direct.value / 16.0) < 1e-11);
    }

    #[test]
    fn functional_equation_holds() {
        for (a1, a2) in [(1.0, 4.0), (0.5, 3.0), (1.0, 1.0)] {
            let mut z: f64 = -2.0;
            while z <= 3.0 {
                if z.abs() > 0.05 && (z - 1.0).abs() > 0.05 {
                    let form = EpsteinForm::new(z, a1, a2).unwrap();
                    let resid = functional_equation_residual(form).unwrap();
                    assert!(resid < 1e-8, "z = {z}: residual {resid}");
                }
                z += 0.1375;
            }
        }
    }

    #[test]
    fn derivative_checks() {
        let f = EpsteinForm::new(2.0, 1.0, 2.0).unwrap();
        let ctl = SumControl::accelerated(1e-12);
        let secant = |h: f64| {
            let up = epstein2_direct(f.at(2.0 + h), &ctl).unwrap().value;
            let down = epstein2_direct(f.at(2.0 - h), &ctl).unwrap().value;
            (up - down) / (2.0 * h)
        };
        let (s1, s2) = (secant(0.01), secant(0.02));
        let d = epstein2_deriv_z(f).unwrap();
        // the h = 0.01 secant is off by O(h²); its Richardson partner removes that
        assert!((d - s1).abs() <= 2.0 * (s2 - s1).abs() / 3.0);
        assert!(rel(d, (4.0 * s1 - s2) / 3.0) < 1e-7);

        // d/dz [λ^{−z} E(z)] for the scaled form
        let lambda: f64 = 4.0;
        let scaled = EpsteinForm::new(2.0, lambda, 2.0 * lambda).unwrap();
        let product = lambda.powf(-2.0) * (d - lambda.ln() * epstein2(f).unwrap());
        assert!(rel(epstein2_deriv_z(scaled).unwrap(), product) < 1e-7);

        let g = EpsteinForm::new(-1.0, 1.0, 4.0).unwrap();
        let a = epstein2_deriv_z(g).unwrap();
        let b = epstein2_deriv_z(g.swapped()).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs());
    }
}
