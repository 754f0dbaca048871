//! Lyapunov-type functionals around rest states and steady states.
//!
//! `v_meq` measures the distance of a state from a homogeneous rest state
//! under fixed net mass and energy; `v_neq` is its affine-corrected form for
//! spatially varying references; `feireisl_relative_energy` is the relative
//! energy built on the ballistic free energy and coincides with `v_neq`.

use serde::Serialize;

use crate::calculus::{gateaux_first, Dual2, FunctionalHandle};
use crate::eos::{EosSpec, ThermoState};
use crate::error::{Error, Result};
use crate::fields::{Grid1D, StateFields};

type D1 = Dual2<f64>;

/// A spatially homogeneous rest state (ρ̂, 0, θ̂).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HomogeneousReference {
    pub theta_hat: f64,
    pub rho_hat: f64,
}

impl HomogeneousReference {
    pub fn new(theta_hat: f64, rho_hat: f64) -> Result<Self> {
        ThermoState::new(theta_hat, rho_hat)?;
        Ok(Self { theta_hat, rho_hat })
    }

    pub fn state(&self) -> ThermoState {
        ThermoState {
            theta: self.theta_hat,
            rho: self.rho_hat,
        }
    }

    pub fn rest_fields(&self, grid: &Grid1D) -> StateFields {
        StateFields::uniform_rest(grid.n_cells(), self.rho_hat, self.theta_hat)
    }
}

/// A steady, possibly inhomogeneous reference state.
#[derive(Clone, Debug, PartialEq)]
pub struct SteadyReference {
    pub fields: StateFields,
}

impl SteadyReference {
    /// Validates admissibility and pointwise thermodynamic stability.
    pub fn new(eos: &EosSpec, grid: &Grid1D, fields: StateFields) -> Result<Self> {
        fields.check_len(grid)?;
        fields.check_admissible()?;
        for i in 0..fields.len() {
            let s = ThermoState::new(fields.theta[i], fields.rho[i])?;
            if !eos.stability(s)?.stable {
                return Err(Error::Domain(format!(
                    "steady reference unstable in cell {i}: theta = {}, rho = {}",
                    s.theta, s.rho
                )));
            }
        }
        Ok(Self { fields })
    }

    pub fn homogeneous(grid: &Grid1D, reference: HomogeneousReference) -> Self {
        Self {
            fields: reference.rest_fields(grid),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Multipliers {
    pub lambda1: f64,
    pub lambda2: f64,
}

/// A functional value split into its kinetic, thermal and compositional parts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct FunctionalReport {
    pub total: f64,
    pub kinetic: f64,
    pub thermal: f64,
    pub compositional: f64,
}

impl FunctionalReport {
    fn from_parts(grid: &Grid1D, kinetic: &[f64], thermal: &[f64], compositional: &[f64]) -> Self {
        let kinetic = grid.integrate(kinetic).expect("lengths checked");
        let thermal = grid.integrate(thermal).expect("lengths checked");
        let compositional = grid.integrate(compositional).expect("lengths checked");
        Self {
            total: kinetic + thermal + compositional,
            kinetic,
            thermal,
            compositional,
        }
    }
}

/// λ₁ = 1/θ̂, λ₂ = −p̂/(θ̂ρ̂).
pub fn multipliers_closed_form(eos: &EosSpec, r: HomogeneousReference) -> Result<Multipliers> {
    let p = eos.pressure(r.theta_hat, r.rho_hat)?;
    Ok(Multipliers {
        lambda1: 1.0 / r.theta_hat,
        lambda2: -p / (r.theta_hat * r.rho_hat),
    })
}

/// The constrained-entropy functional
/// 𝓛 = ∫ρη − λ₁∫(½ρv² + ρe − ρ̂ê) − λ₂∫(ρ − ρ̂).
pub fn constrained_entropy(
    eos: &EosSpec,
    r: HomogeneousReference,
    grid: Grid1D,
    m: Multipliers,
) -> Result<FunctionalHandle> {
    let e_hat = eos.internal_energy(r.theta_hat, r.rho_hat)?;
    let eos = eos.clone();
    Ok(FunctionalHandle::new(move |w: &StateFields| {
        w.check_len(&grid)?;
        let mut s = Vec::with_capacity(w.len());
        let mut energy = Vec::with_capacity(w.len());
        let mut mass = Vec::with_capacity(w.len());
        for i in 0..w.len() {
            let (rho, v, theta) = (w.rho[i], w.v[i], w.theta[i]);
            s.push(rho * eos.entropy(theta, rho)?);
            energy.push(0.5 * rho * v * v + rho * eos.internal_energy(theta, rho)? - r.rho_hat * e_hat);
            mass.push(rho - r.rho_hat);
        }
        Ok(grid.integrate(&s)?
            - m.lambda1 * grid.integrate(&energy)?
            - m.lambda2 * grid.integrate(&mass)?)
    }))
}

/// Identifies (λ₁, λ₂) from the stationarity of [`constrained_entropy`] at
/// the rest state, probing one temperature direction in (θ, ρ) variables and
/// one pressure direction in (θ, p) variables.
pub fn multipliers_numeric(
    eos: &EosSpec,
    r: HomogeneousReference,
    grid: &Grid1D,
) -> Result<Multipliers> {
    let eos = eos.calibrate(r.state())?;
    let grid = *grid;
    let n = grid.n_cells();
    let rest = r.rest_fields(&grid);
    let p_hat = eos.pressure(r.theta_hat, r.rho_hat)?;

    let probe = |m: Multipliers| -> Result<(f64, f64)> {
        let l = constrained_entropy(&eos, r, grid, m)?;
        let mut theta_dir = StateFields::zeros(n);
        theta_dir.theta.iter_mut().for_each(|t| *t = r.theta_hat);
        let d_theta = gateaux_first(&l, &rest, &theta_dir)?;

        let p_scale = p_hat.abs().max(f64::MIN_POSITIVE);
        let curve = |s: f64| -> Result<f64> {
            let rho = eos.density_from_pressure(r.theta_hat, p_hat + s * p_scale)?;
            l.eval(&StateFields::uniform_rest(n, rho, r.theta_hat))
        };
        let d_pressure = crate::calculus::try_fd_derivative(curve, 0.0, crate::calculus::Order::First)
            .map_err(|e| match e {
                Error::Domain(msg) => Error::Inversion(msg),
                other => other,
            })?
            .value;
        Ok((d_theta, d_pressure))
    };

    // D𝓛 = c₀ + λ₁c₁ + λ₂c₂ in each direction.
    let (a0, b0) = probe(Multipliers { lambda1: 0.0, lambda2: 0.0 })?;
    let (a1, b1) = probe(Multipliers { lambda1: 1.0, lambda2: 0.0 })?;
    let (a2, b2) = probe(Multipliers { lambda1: 0.0, lambda2: 1.0 })?;
    let (a1, a2, b1, b2) = (a1 - a0, a2 - a0, b1 - b0, b2 - b0);

    let det = a1 * b2 - a2 * b1;
    let scale = (a1.abs() + a2.abs()) * (b1.abs() + b2.abs());
    if !(det.abs() > 1e-10 * scale) || !det.is_finite() {
        return Err(Error::DegenerateDirection(format!(
            "2x2 system determinant {det:e} relative to {scale:e}"
        )));
    }
    Ok(Multipliers {
        lambda1: (-a0 * b2 + a2 * b0) / det,
        lambda2: (-a1 * b0 + a0 * b1) / det,
    })
}

/// The mechanical-equilibrium functional around a homogeneous rest state:
/// −∫θ̂ρη + ∫(½ρv² + ρe − ρ̂ê) − ∫(p̂/ρ̂)(ρ − ρ̂).
///
/// The integrand is regrouped per cell as ½ρv², the thermal bracket
/// ρ(e − θ̂η)(θ, ρ) − ρψ(θ̂, ρ), and the compositional rest
/// ρψ(θ̂, ρ) − (p̂/ρ̂)(ρ − ρ̂) − ρ̂ê. The functional vanishes at the rest state
/// when ψ and η both vanish there (see [`EosSpec::normalized_at`]).
pub fn v_meq(
    eos: &EosSpec,
    r: HomogeneousReference,
    grid: &Grid1D,
    w: &StateFields,
) -> Result<FunctionalReport> {
    w.check_len(grid)?;
    let (th, rh) = (r.theta_hat, r.rho_hat);
    let e_hat = eos.internal_energy(th, rh)?;
    let p_hat = eos.pressure(th, rh)?;
    let n = w.len();
    let (mut kin, mut therm, mut comp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        let (rho, v, theta) = (w.rho[i], w.v[i], w.theta[i]);
        let e = eos.internal_energy(theta, rho)?;
        let eta = eos.entropy(theta, rho)?;
        let psi_ref = eos.psi(th, rho)?;
        kin[i] = 0.5 * rho * v * v;
        therm[i] = rho * (e - th * eta - psi_ref);
        comp[i] = rho * psi_ref - p_hat / rh * (rho - rh) - rh * e_hat;
    }
    Ok(FunctionalReport::from_parts(grid, &kin, &therm, &comp))
}

/// [`v_meq`] as a functional handle returning the total.
pub fn v_meq_functional(eos: &EosSpec, r: HomogeneousReference, grid: Grid1D) -> FunctionalHandle {
    let eos = eos.clone();
    FunctionalHandle::new(move |w: &StateFields| Ok(v_meq(&eos, r, &grid, w)?.total))
}

/// x − 1 − ln x
pub fn temperature_bracket(x: f64) -> f64 {
    x - 1.0 - x.ln()
}

/// x ln x − x + 1
pub fn density_bracket(x: f64) -> f64 {
    x * x.ln() - x + 1.0
}

/// Closed form of [`v_meq`] for the ideal gas with reference constants at
/// the rest state: ∫½ρv² + ∫ρθ̂c_V[θ/θ̂ − 1 − ln(θ/θ̂)]
/// + ∫c_V(γ − 1)θ̂ρ̂[(ρ/ρ̂)ln(ρ/ρ̂) − ρ/ρ̂ + 1].
pub fn v_meq_ideal_gas_closed(
    cv_ref: f64,
    gamma: f64,
    r: HomogeneousReference,
    grid: &Grid1D,
    w: &StateFields,
) -> Result<FunctionalReport> {
    w.check_len(grid)?;
    w.check_admissible()?;
    let (th, rh) = (r.theta_hat, r.rho_hat);
    let n = w.len();
    let (mut kin, mut therm, mut comp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        let (rho, v, theta) = (w.rho[i], w.v[i], w.theta[i]);
        kin[i] = 0.5 * rho * v * v;
        therm[i] = rho * th * cv_ref * temperature_bracket(theta / th);
        comp[i] = cv_ref * (gamma - 1.0) * th * rh * density_bracket(rho / rh);
    }
    Ok(FunctionalReport::from_parts(grid, &kin, &therm, &comp))
}

/// Second variation of [`v_meq`] at the rest state in a (θ̃, ρ̃) direction:
/// ∫(ρ̂c_V/θ̂·θ̃² + (1/ρ̂)∂p/∂ρ·ρ̃²), all coefficients at the reference.
///
/// This is d²/ds² at s = 0; the s² coefficient of the expansion is half of
/// it. The velocity part of `dir` is ignored.
pub fn quadratic_form_second_variation(
    eos: &EosSpec,
    r: HomogeneousReference,
    grid: &Grid1D,
    dir: &StateFields,
) -> Result<f64> {
    dir.check_len(grid)?;
    let q = eos.thermo(r.state())?;
    let a = r.rho_hat * q.cv / r.theta_hat;
    let b = q.dp_drho / r.rho_hat;
    Ok(grid.integrate_with(|i| a * dir.theta[i] * dir.theta[i] + b * dir.rho[i] * dir.rho[i]))
}

/// (e − θ̂η)(θ, ρ)
fn ballistic_specific(eos: &EosSpec, theta_hat: f64, theta: f64, rho: f64) -> Result<f64> {
    Ok(eos.internal_energy(theta, rho)? - theta_hat * eos.entropy(theta, rho)?)
}

/// The non-equilibrium functional around a steady reference, in total-field
/// form with ρ̃ = ρ − ρ̂(x), θ̃ = θ − θ̂(x), ṽ = v − v̂(x):
/// ∫½ρ|ṽ|² + ∫ρ[(e − θ̂η)(θ, ρ) − (e − θ̂η)(θ̂, ρ̂)] − ∫(p̂/ρ̂)ρ̃.
///
/// Invariant under ψ ↦ ψ + c − c₂θ.
pub fn v_neq(
    eos: &EosSpec,
    steady: &SteadyReference,
    grid: &Grid1D,
    w: &StateFields,
) -> Result<FunctionalReport> {
    w.check_len(grid)?;
    let s = &steady.fields;
    s.check_len(grid)?;
    let n = w.len();
    let (mut kin, mut therm, mut comp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        let (rho, v, theta) = (w.rho[i], w.v[i], w.theta[i]);
        let (rh, vh, th) = (s.rho[i], s.v[i], s.theta[i]);
        let h = ballistic_specific(eos, th, theta, rho)?;
        let h_hat = ballistic_specific(eos, th, th, rh)?;
        let psi_ref = eos.psi(th, rho)?;
        let p_hat = eos.pressure(th, rh)?;
        let dv = v - vh;
        kin[i] = 0.5 * rho * dv * dv;
        therm[i] = rho * (h - psi_ref);
        comp[i] = rho * (psi_ref - h_hat) - p_hat / rh * (rho - rh);
    }
    Ok(FunctionalReport::from_parts(grid, &kin, &therm, &comp))
}

/// H_Θ(ρ, θ) = ρ(e(θ, ρ) − Θη(θ, ρ)).
pub fn ballistic_free_energy(eos: &EosSpec, rho: f64, theta: f64, big_theta: f64) -> Result<f64> {
    eos.check(big_theta, rho)?;
    Ok(rho * ballistic_specific(eos, big_theta, theta, rho)?)
}

/// ∂H_Θ/∂ρ at (ρ, θ), by forward-mode differentiation of H.
pub fn ballistic_free_energy_drho(
    eos: &EosSpec,
    rho: f64,
    theta: f64,
    big_theta: f64,
) -> Result<f64> {
    eos.check(theta, rho)?;
    let r = D1::seed1(rho);
    let t = D1::constant(theta);
    let h = r * (eos.energy_s(t, r) - eos.entropy_s(t, r) * big_theta);
    Ok(h.d1)
}

/// Relative energy of (ρ, θ, u) with respect to (r, Θ, U):
/// ∫(½ρ|u − U|² + H_Θ(ρ, θ) − ∂H_Θ/∂ρ(r, Θ)(ρ − r) − H_Θ(r, Θ)).
pub fn feireisl_relative_energy(
    eos: &EosSpec,
    grid: &Grid1D,
    state: &StateFields,
    ref_fields: &StateFields,
) -> Result<f64> {
    state.check_len(grid)?;
    ref_fields.check_len(grid)?;
    let n = state.len();
    let mut integrand = Vec::with_capacity(n);
    for i in 0..n {
        let (rho, u, theta) = (state.rho[i], state.v[i], state.theta[i]);
        let (r, big_u, big_t) = (ref_fields.rho[i], ref_fields.v[i], ref_fields.theta[i]);
        let du = u - big_u;
        let h = ballistic_free_energy(eos, rho, theta, big_t)?;
        let h_ref = ballistic_free_energy(eos, r, big_t, big_t)?;
        let dh = ballistic_free_energy_drho(eos, r, big_t, big_t)?;
        integrand.push(0.5 * rho * du * du + h - dh * (rho - r) - h_ref);
    }
    grid.integrate(&integrand)
}

/// Worst margins of the pointwise inequalities behind nonnegativity of
/// [`v_meq`]. Negative margins are violations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PointwiseReport {
    pub samples: usize,
    /// min of ρ[ψ(θ, ρ) + ∂ψ/∂θ(θ, ρ)(θ̂ − θ)] − ρψ(θ̂, ρ)
    pub thermal: f64,
    /// min of ρψ(θ̂, ρ) − ρ̂ψ̂ − (ψ̂ + p̂/ρ̂)(ρ − ρ̂)
    pub compositional: f64,
    /// min of the sum of the two
    pub total: f64,
    pub worst: Option<ThermoState>,
}

impl PointwiseReport {
    pub fn min_margin(&self) -> f64 {
        self.thermal.min(self.compositional).min(self.total)
    }
}

/// Evaluates the pointwise thermal, compositional and full-integrand
/// inequalities at each sample. Violations are reported, not raised.
pub fn pointwise_integrand_checks(
    eos: &EosSpec,
    r: HomogeneousReference,
    samples: &[ThermoState],
) -> Result<PointwiseReport> {
    let (th, rh) = (r.theta_hat, r.rho_hat);
    let psi_hat = eos.psi(th, rh)?;
    let p_hat = eos.pressure(th, rh)?;
    let mut report = PointwiseReport {
        samples: samples.len(),
        thermal: f64::INFINITY,
        compositional: f64::INFINITY,
        total: f64::INFINITY,
        worst: None,
    };
    if samples.is_empty() {
        report.thermal = 0.0;
        report.compositional = 0.0;
        report.total = 0.0;
        return Ok(report);
    }
    for s in samples {
        let (theta, rho) = (s.theta, s.rho);
        let (psi, psi_t) = eos.psi_and_dtheta(theta, rho)?;
        let psi_ref = eos.psi(th, rho)?;
        let thermal = rho * (psi + psi_t * (th - theta)) - rho * psi_ref;
        let comp = rho * psi_ref - rh * psi_hat - (psi_hat + p_hat / rh) * (rho - rh);
        let total = thermal + comp;
        report.thermal = report.thermal.min(thermal);
        report.compositional = report.compositional.min(comp);
        if total < report.total {
            report.total = total;
            report.worst = Some(*s);
        }
    }
    Ok(report)
}
