//! Equations of state generated by a Helmholtz free energy ψ(θ, ρ).
//!
//! Every derivative-bearing quantity is obtained by hyper-dual evaluation of
//! ψ: entropy η = −∂ψ/∂θ, internal energy e = ψ − θ ∂ψ/∂θ, pressure
//! p = ρ² ∂ψ/∂ρ, heat capacity c_V = −θ ∂²ψ/∂θ². Concrete gases only write
//! ψ once, generically over [`Scalar`].

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::calculus::{Dual2, Scalar};
use crate::error::{Error, Result};

type D1 = Dual2<f64>;
type D2 = Dual2<Dual2<f64>>;

/// A temperature/density pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThermoState {
    pub theta: f64,
    pub rho: f64,
}

impl ThermoState {
    pub fn new(theta: f64, rho: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) || !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Domain(format!(
                "need theta > 0 and rho > 0, got theta = {theta}, rho = {rho}"
            )));
        }
        Ok(Self { theta, rho })
    }
}

/// A Helmholtz free energy per unit mass.
///
/// `entropy` defaults to −∂ψ/∂θ; overriding it is only meant for test
/// fixtures that deliberately break Gibbs consistency.
pub trait FreeEnergy: fmt::Debug + Send + Sync {
    fn kind(&self) -> &'static str;

    fn psi<S: Scalar>(&self, theta: S, rho: S) -> S;

    fn entropy<S: Scalar>(&self, theta: S, rho: S) -> S {
        -self.psi(Dual2::seed1(theta), Dual2::constant(rho)).d1
    }

    /// Exclusive upper bound of admissible densities.
    fn max_density(&self) -> f64 {
        f64::INFINITY
    }

    /// Starting point for pressure inversion.
    fn density_guess(&self, theta: f64, pressure: f64) -> f64 {
        pressure / theta
    }

    fn parameters(&self) -> Vec<(&'static str, f64)> {
        Vec::new()
    }
}

/// Object-safe face of [`FreeEnergy`], monomorphised for the scalar types
/// the toolkit evaluates with.
#[doc(hidden)]
pub trait Model: fmt::Debug + Send + Sync {
    fn kind(&self) -> &'static str;
    fn psi_f(&self, t: f64, r: f64) -> f64;
    fn psi_d(&self, t: D1, r: D1) -> D1;
    fn psi_dd(&self, t: D2, r: D2) -> D2;
    fn eta_f(&self, t: f64, r: f64) -> f64;
    fn eta_d(&self, t: D1, r: D1) -> D1;
    fn eta_dd(&self, t: D2, r: D2) -> D2;
    fn max_density(&self) -> f64;
    fn density_guess(&self, theta: f64, pressure: f64) -> f64;
    fn parameters(&self) -> Vec<(&'static str, f64)>;
}

impl<M: FreeEnergy> Model for M {
    fn kind(&self) -> &'static str {
        FreeEnergy::kind(self)
    }
    fn psi_f(&self, t: f64, r: f64) -> f64 {
        self.psi(t, r)
    }
    fn psi_d(&self, t: D1, r: D1) -> D1 {
        self.psi(t, r)
    }
    fn psi_dd(&self, t: D2, r: D2) -> D2 {
        self.psi(t, r)
    }
    fn eta_f(&self, t: f64, r: f64) -> f64 {
        self.entropy(t, r)
    }
    fn eta_d(&self, t: D1, r: D1) -> D1 {
        self.entropy(t, r)
    }
    fn eta_dd(&self, t: D2, r: D2) -> D2 {
        self.entropy(t, r)
    }
    fn max_density(&self) -> f64 {
        FreeEnergy::max_density(self)
    }
    fn density_guess(&self, theta: f64, pressure: f64) -> f64 {
        FreeEnergy::density_guess(self, theta, pressure)
    }
    fn parameters(&self) -> Vec<(&'static str, f64)> {
        FreeEnergy::parameters(self)
    }
}

/// Scalars an [`EosSpec`] can be evaluated with.
pub trait EosScalar: Scalar {
    #[doc(hidden)]
    fn model_psi(model: &dyn Model, theta: Self, rho: Self) -> Self;
    #[doc(hidden)]
    fn model_eta(model: &dyn Model, theta: Self, rho: Self) -> Self;
}

impl EosScalar for f64 {
    fn model_psi(m: &dyn Model, t: f64, r: f64) -> f64 {
        m.psi_f(t, r)
    }
    fn model_eta(m: &dyn Model, t: f64, r: f64) -> f64 {
        m.eta_f(t, r)
    }
}

impl EosScalar for D1 {
    fn model_psi(m: &dyn Model, t: D1, r: D1) -> D1 {
        m.psi_d(t, r)
    }
    fn model_eta(m: &dyn Model, t: D1, r: D1) -> D1 {
        m.eta_d(t, r)
    }
}

impl EosScalar for D2 {
    fn model_psi(m: &dyn Model, t: D2, r: D2) -> D2 {
        m.psi_dd(t, r)
    }
    fn model_eta(m: &dyn Model, t: D2, r: D2) -> D2 {
        m.eta_dd(t, r)
    }
}

/// Thermodynamic quantities at one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThermoQuantities {
    pub psi: f64,
    pub eta: f64,
    pub e: f64,
    pub p: f64,
    pub cv: f64,
    pub dp_drho: f64,
    pub dp_dtheta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub cv: f64,
    pub dp_drho: f64,
    pub stable: bool,
}

/// A residual together with the magnitude of the terms it was formed from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    fn from_terms(terms: &[f64]) -> Self {
        Self {
            value: terms.iter().sum(),
            scale: terms.iter().map(|t| t.abs()).sum(),
        }
    }

    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.value.abs() / self.scale
        } else {
            self.value.abs()
        }
    }
}

/// Residuals of the Gibbs relations between η, e, p and c_V.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// ∂η/∂θ − c_V/θ
    pub entropy_temperature: Residual,
    /// ∂e/∂θ − c_V
    pub energy_temperature: Residual,
    /// ∂η/∂ρ + (1/ρ²) ∂p/∂θ
    pub maxwell: Residual,
    /// −p + ρ² ∂e/∂ρ + θ ∂p/∂θ
    pub energy_density: Residual,
    /// ∂e/∂ρ − θ ∂η/∂ρ − p/ρ²
    pub energy_entropy_density: Residual,
}

impl IdentityResiduals {
    pub fn as_array(&self) -> [(&'static str, Residual); 5] {
        [
            ("entropy_temperature", self.entropy_temperature),
            ("energy_temperature", self.energy_temperature),
            ("maxwell", self.maxwell),
            ("energy_density", self.energy_density),
            ("energy_entropy_density", self.energy_entropy_density),
        ]
    }

    pub fn max_relative(&self) -> f64 {
        self.as_array()
            .iter()
            .map(|(_, r)| r.relative())
            .fold(0.0, f64::max)
    }
}

/// An equation of state: a free energy plus the gauge
/// ψ ↦ ψ − offset − slope·θ.
#[derive(Clone)]
pub struct EosSpec {
    model: Arc<dyn Model>,
    offset: f64,
    slope: f64,
}

impl fmt::Debug for EosSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EosSpec")
            .field("model", &self.model)
            .field("offset", &self.offset)
            .field("slope", &self.slope)
            .finish()
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {x}")))
    }
}

impl EosSpec {
    pub fn new<M: FreeEnergy + 'static>(model: M) -> Self {
        Self {
            model: Arc::new(model),
            offset: 0.0,
            slope: 0.0,
        }
    }

    /// Calorically perfect ideal gas, with ψ(θ_ref, ρ_ref) = 0.
    pub fn ideal_gas(cv_ref: f64, gamma: f64, theta_ref: f64, rho_ref: f64) -> Result<Self> {
        Ok(Self::new(IdealGas::new(cv_ref, gamma, theta_ref, rho_ref)?))
    }

    /// Covolume (Noble–Abel type) gas; reduces to the ideal gas at `b = 0`.
    pub fn covolume_gas(
        cv_ref: f64,
        gamma: f64,
        b: f64,
        theta_ref: f64,
        rho_ref: f64,
    ) -> Result<Self> {
        Ok(Self::new(CovolumeGas::new(cv_ref, gamma, b, theta_ref, rho_ref)?))
    }

    pub fn kind(&self) -> &'static str {
        self.model.kind()
    }

    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        self.model.parameters()
    }

    /// Constant subtracted from the model free energy.
    pub fn calibration_offset(&self) -> f64 {
        self.offset
    }

    /// Coefficient of the linear-in-θ term subtracted from the model free energy.
    pub fn entropy_shift(&self) -> f64 {
        self.slope
    }

    pub fn max_density(&self) -> f64 {
        self.model.max_density()
    }

    pub fn contains(&self, theta: f64, rho: f64) -> bool {
        theta > 0.0
            && theta.is_finite()
            && rho > 0.0
            && rho < self.model.max_density()
            && rho.is_finite()
    }

    pub fn check(&self, theta: f64, rho: f64) -> Result<()> {
        if self.contains(theta, rho) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "({} gas) theta = {theta}, rho = {rho}",
                self.kind()
            )))
        }
    }

    /// ψ at a generic scalar argument (no domain check).
    pub fn psi_s<S: EosScalar>(&self, theta: S, rho: S) -> S {
        S::model_psi(self.model.as_ref(), theta, rho) - self.offset - theta * self.slope
    }

    /// η at a generic scalar argument (no domain check).
    pub fn entropy_s<S: EosScalar>(&self, theta: S, rho: S) -> S {
        S::model_eta(self.model.as_ref(), theta, rho) + self.slope
    }

    /// e = ψ − θ ∂ψ/∂θ at a generic scalar argument.
    pub fn energy_s<S: EosScalar>(&self, theta: S, rho: S) -> S
    where
        Dual2<S>: EosScalar,
    {
        let p = self.psi_s(Dual2::seed1(theta), Dual2::constant(rho));
        p.value - theta * p.d1
    }

    /// p = ρ² ∂ψ/∂ρ at a generic scalar argument.
    pub fn pressure_s<S: EosScalar>(&self, theta: S, rho: S) -> S
    where
        Dual2<S>: EosScalar,
    {
        let p = self.psi_s(Dual2::constant(theta), Dual2::seed1(rho));
        rho * rho * p.d1
    }

    pub fn psi(&self, theta: f64, rho: f64) -> Result<f64> {
        self.check(theta, rho)?;
        Ok(self.psi_s(theta, rho))
    }

    pub fn entropy(&self, theta: f64, rho: f64) -> Result<f64> {
        self.check(theta, rho)?;
        Ok(self.entropy_s(theta, rho))
    }

    pub fn internal_energy(&self, theta: f64, rho: f64) -> Result<f64> {
        self.check(theta, rho)?;
        Ok(self.energy_s(theta, rho))
    }

    pub fn pressure(&self, theta: f64, rho: f64) -> Result<f64> {
        self.check(theta, rho)?;
        Ok(self.pressure_s(theta, rho))
    }

    /// (ψ, ∂ψ/∂θ).
    pub fn psi_and_dtheta(&self, theta: f64, rho: f64) -> Result<(f64, f64)> {
        self.check(theta, rho)?;
        let p = self.psi_s(D1::seed1(theta), D1::constant(rho));
        Ok((p.value, p.d1))
    }

    /// (e, c_V) from one second-order evaluation in θ.
    pub fn energy_and_cv(&self, theta: f64, rho: f64) -> Result<(f64, f64)> {
        self.check(theta, rho)?;
        let p = self.psi_s(D1::variable(theta), D1::constant(rho));
        Ok((p.value - theta * p.d1, -theta * p.d12))
    }

    pub fn thermo(&self, s: ThermoState) -> Result<ThermoQuantities> {
        let (theta, rho) = (s.theta, s.rho);
        self.check(theta, rho)?;
        let tt = self.psi_s(D1::variable(theta), D1::constant(rho));
        let rr = self.psi_s(D1::constant(theta), D1::variable(rho));
        let tr = self.psi_s(D1::seed1(theta), D1::seed2(rho));
        Ok(ThermoQuantities {
            psi: tt.value,
            eta: self.entropy_s(theta, rho),
            e: tt.value - theta * tt.d1,
            p: rho * rho * rr.d1,
            cv: -theta * tt.d12,
            dp_drho: 2.0 * rho * rr.d1 + rho * rho * rr.d12,
            dp_dtheta: rho * rho * tr.d12,
        })
    }

    /// Copy with the constant offset chosen so that ψ(reference) = 0.
    pub fn calibrate(&self, reference: ThermoState) -> Result<Self> {
        let psi = self.psi(reference.theta, reference.rho)?;
        Ok(Self {
            offset: self.offset + psi,
            ..self.clone()
        })
    }

    /// Copy with ψ replaced by ψ + c − c2·θ.
    pub fn with_gauge(&self, c: f64, c2: f64) -> Self {
        Self {
            offset: self.offset - c,
            slope: self.slope + c2,
            ..self.clone()
        }
    }

    /// Copy gauged so that ψ, η and e all vanish at `reference`.
    pub fn normalized_at(&self, reference: ThermoState) -> Result<Self> {
        let eta = self.entropy(reference.theta, reference.rho)?;
        Self {
            slope: self.slope - eta,
            ..self.clone()
        }
        .calibrate(reference)
    }

    pub fn stability(&self, s: ThermoState) -> Result<StabilityReport> {
        let q = self.thermo(s)?;
        Ok(StabilityReport {
            cv: q.cv,
            dp_drho: q.dp_drho,
            stable: q.cv > 0.0 && q.dp_drho > 0.0,
        })
    }

    /// Density at which p(θ, ρ) equals `p_target`, by damped Newton iteration.
    pub fn density_from_pressure(&self, theta: f64, p_target: f64) -> Result<f64> {
        if !(theta > 0.0) || !p_target.is_finite() {
            return Err(Error::Inversion(format!(
                "theta = {theta}, p = {p_target}"
            )));
        }
        let rho_max = self.max_density();
        let mut rho = self.model.density_guess(theta, p_target);
        if !(rho > 0.0 && rho.is_finite()) {
            rho = 1.0_f64.min(0.5 * rho_max);
        }
        if rho >= rho_max {
            rho = 0.999 * rho_max;
        }
        let tol = 1e-12 * p_target.abs().max(1.0);
        for _ in 0..100 {
            let d = self.psi_s(D1::constant(theta), D1::variable(rho));
            let p = rho * rho * d.d1;
            let dp = 2.0 * rho * d.d1 + rho * rho * d.d12;
            let residual = p - p_target;
            if residual.abs() <= tol && dp > 0.0 {
                // one last Newton correction, kept only if it stays in the domain
                let polished = rho - residual / dp;
                return Ok(if polished > 0.0 && polished < rho_max { polished } else { rho });
            }
            if !(dp > 0.0) {
                return Err(Error::Inversion(format!(
                    "dp/drho = {dp} at theta = {theta}, rho = {rho}"
                )));
            }
            let mut step = residual / dp;
            let mut next = rho - step;
            let mut halvings = 0;
            while !(next > 0.0 && next < rho_max) {
                step *= 0.5;
                next = rho - step;
                halvings += 1;
                if halvings > 60 {
                    return Err(Error::Inversion("step left the domain".into()));
                }
            }
            if next == rho {
                return Ok(rho);
            }
            rho = next;
        }
        Err(Error::Inversion(format!(
            "no convergence in 100 iterations for theta = {theta}, p = {p_target}"
        )))
    }

    /// Gibbs-relation residuals, each side differentiated exactly through
    /// its own defining function.
    pub fn identity_residuals(&self, s: ThermoState) -> Result<IdentityResiduals> {
        let (theta, rho) = (s.theta, s.rho);
        let q = self.thermo(s)?;

        let eta_t = self.entropy_s(D1::seed1(theta), D1::constant(rho)).d1;
        let eta_r = self.entropy_s(D1::constant(theta), D1::seed1(rho)).d1;
        let e_t = self.energy_s(D1::seed1(theta), D1::constant(rho)).d1;
        let e_r = self.energy_s(D1::constant(theta), D1::seed1(rho)).d1;
        let p_t = self.pressure_s(D1::seed1(theta), D1::constant(rho)).d1;
        let p = q.p;
        let r2 = rho * rho;

        Ok(IdentityResiduals {
            entropy_temperature: Residual::from_terms(&[eta_t, -q.cv / theta]),
            energy_temperature: Residual::from_terms(&[e_t, -q.cv]),
            maxwell: Residual::from_terms(&[eta_r, p_t / r2]),
            energy_density: Residual::from_terms(&[-p, r2 * e_r, theta * p_t]),
            energy_entropy_density: Residual::from_terms(&[e_r, -theta * eta_r, -p / r2]),
        })
    }

    /// ∂²(ρψ)/∂ρ² − (1/ρ) ∂p/∂ρ.
    pub fn convexity_residual(&self, s: ThermoState) -> Result<Residual> {
        let q = self.thermo(s)?;
        let rho = D1::variable(s.rho);
        let f = rho * self.psi_s(D1::constant(s.theta), rho);
        Ok(Residual::from_terms(&[f.d12, -q.dp_drho / s.rho]))
    }
}

/// ψ = −c_V θ (ln(θ/θ_ref) − 1) + c_V θ (γ − 1) ln(ρ/ρ_ref) − c_V θ_ref,
/// written with `ln_1p` so that evaluations near the reference keep full
/// relative precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdealGas {
    pub cv_ref: f64,
    pub gamma: f64,
    pub theta_ref: f64,
    pub rho_ref: f64,
}

impl IdealGas {
    pub fn new(cv_ref: f64, gamma: f64, theta_ref: f64, rho_ref: f64) -> Result<Self> {
        check_positive("eos.cv_ref", cv_ref)?;
        check_positive("eos.theta_ref", theta_ref)?;
        check_positive("eos.rho_ref", rho_ref)?;
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::Config(format!("eos.gamma must exceed 1, got {gamma}")));
        }
        Ok(Self {
            cv_ref,
            gamma,
            theta_ref,
            rho_ref,
        })
    }
}

fn thermal_part<S: Scalar>(cv: f64, theta_ref: f64, theta: S) -> S {
    let log_t = ((theta - theta_ref) / theta_ref).ln_1p();
    -(theta * log_t * cv) + (theta - theta_ref) * cv
}

impl FreeEnergy for IdealGas {
    fn kind(&self) -> &'static str {
        "ideal"
    }

    fn psi<S: Scalar>(&self, theta: S, rho: S) -> S {
        let log_r = ((rho - self.rho_ref) / self.rho_ref).ln_1p();
        thermal_part(self.cv_ref, self.theta_ref, theta)
            + theta * log_r * (self.cv_ref * (self.gamma - 1.0))
    }

    fn density_guess(&self, theta: f64, pressure: f64) -> f64 {
        pressure / (self.cv_ref * (self.gamma - 1.0) * theta)
    }

    fn parameters(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("cv_ref", self.cv_ref),
            ("gamma", self.gamma),
            ("theta_ref", self.theta_ref),
            ("rho_ref", self.rho_ref),
        ]
    }
}

/// Ideal gas with ln(ρ/ρ_ref) replaced by
/// ln(ρ/(1 − bρ)) − ln(ρ_ref/(1 − bρ_ref)); p = c_V(γ − 1)θρ/(1 − bρ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovolumeGas {
    pub cv_ref: f64,
    pub gamma: f64,
    pub b: f64,
    pub theta_ref: f64,
    pub rho_ref: f64,
}

impl CovolumeGas {
    pub fn new(cv_ref: f64, gamma: f64, b: f64, theta_ref: f64, rho_ref: f64) -> Result<Self> {
        IdealGas::new(cv_ref, gamma, theta_ref, rho_ref)?;
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::Config(format!("eos.b must be nonnegative, got {b}")));
        }
        if b * rho_ref >= 1.0 {
            return Err(Error::Config(format!(
                "eos.b * eos.rho_ref must be below 1, got {}",
                b * rho_ref
            )));
        }
        Ok(Self {
            cv_ref,
            gamma,
            b,
            theta_ref,
            rho_ref,
        })
    }
}

impl FreeEnergy for CovolumeGas {
    fn kind(&self) -> &'static str {
        "covolume"
    }

    fn psi<S: Scalar>(&self, theta: S, rho: S) -> S {
        let drho = rho - self.rho_ref;
        let log_r = (drho / self.rho_ref).ln_1p()
            - (drho * (-self.b / (1.0 - self.b * self.rho_ref))).ln_1p();
        thermal_part(self.cv_ref, self.theta_ref, theta)
            + theta * log_r * (self.cv_ref * (self.gamma - 1.0))
    }

    fn max_density(&self) -> f64 {
        if self.b > 0.0 {
            1.0 / self.b
        } else {
            f64::INFINITY
        }
    }

    fn density_guess(&self, theta: f64, pressure: f64) -> f64 {
        pressure / (self.cv_ref * (self.gamma - 1.0) * theta)
    }

    fn parameters(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("cv_ref", self.cv_ref),
            ("gamma", self.gamma),
            ("b", self.b),
            ("theta_ref", self.theta_ref),
            ("rho_ref", self.rho_ref),
        ]
    }
}
