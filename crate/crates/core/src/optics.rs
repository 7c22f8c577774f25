//! Analytic optics of a GST-loaded single-bus microring.
//!
//! The permittivity of partially crystallized GST comes from Lorentz-Lorenz
//! mixing of the amorphous and crystalline endpoints. The mode index of the
//! GST-loaded ring section is a blend of that bulk index with the bare
//! waveguide mode, weighted by a scalar confinement factor that replaces a
//! full mode solve. Everything downstream (attenuation, all-pass
//! transmission, linewidth, resonance positions) is closed-form.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wavelength at which the bare waveguide index is pinned, m.
pub const REFERENCE_WAVELENGTH: f64 = 1.55e-6;
/// Free spectral range measured on the 1.5 µm reference ring, m.
pub const REFERENCE_FSR: f64 = 53.1e-9;
/// Radius of the smallest (reference) ring, m.
pub const REFERENCE_RADIUS: f64 = 1.5e-6;
/// Azimuthal order of the reference ring's resonance near 1.55 µm.
pub const REFERENCE_MODE_ORDER: u32 = 15;
/// Default confinement factor of the GST overlay.
pub const DEFAULT_CONFINEMENT: f64 = 0.005;
/// Default search band for resonances, m.
pub const DEFAULT_BAND: (f64, f64) = (1.5e-6, 1.65e-6);

/// Complex refractive index `n + iκ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexIndex {
    pub n: f64,
    pub kappa: f64,
}

impl ComplexIndex {
    /// Amorphous GST at 1.55 µm.
    pub const AMORPHOUS_GST: ComplexIndex = ComplexIndex { n: 4.6, kappa: 0.18 };
    /// Crystalline GST at 1.55 µm.
    pub const CRYSTALLINE_GST: ComplexIndex = ComplexIndex { n: 7.2, kappa: 1.9 };

    pub fn new(n: f64, kappa: f64) -> Result<Self> {
        let index = ComplexIndex { n, kappa };
        index.validate()?;
        Ok(index)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n > 0.0 && self.n.is_finite()) || !(self.kappa >= 0.0 && self.kappa.is_finite())
        {
            return Err(Error::Domain(format!(
                "complex index requires n > 0 and kappa >= 0, got {} + {}i",
                self.n, self.kappa
            )));
        }
        Ok(())
    }

    /// `ε = (n + iκ)²`.
    pub fn permittivity(self) -> Complex64 {
        let z = Complex64::new(self.n, self.kappa);
        z * z
    }

    /// Square root of a permittivity on the branch with positive real part.
    pub fn from_permittivity(eps: Complex64) -> Self {
        let mut z = eps.sqrt();
        if z.re < 0.0 {
            z = -z;
        }
        ComplexIndex { n: z.re, kappa: z.im }
    }
}

/// Degree of crystallization `p` of the GST element.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct GstState(f64);

impl GstState {
    pub const AMORPHOUS: GstState = GstState(0.0);
    pub const CRYSTALLINE: GstState = GstState(1.0);

    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(GstState(p))
        } else {
            Err(Error::Domain(format!(
                "degree of crystallization must lie in [0, 1], got {p}"
            )))
        }
    }

    pub fn p(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for GstState {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        GstState::new(p)
    }
}

impl From<GstState> for f64 {
    fn from(state: GstState) -> f64 {
        state.0
    }
}

/// Endpoint optical constants of the phase-change material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GstMaterial {
    pub amorphous: ComplexIndex,
    pub crystalline: ComplexIndex,
}

impl Default for GstMaterial {
    fn default() -> Self {
        GstMaterial {
            amorphous: ComplexIndex::AMORPHOUS_GST,
            crystalline: ComplexIndex::CRYSTALLINE_GST,
        }
    }
}

impl GstMaterial {
    /// Lorentz-Lorenz effective permittivity at crystallization `p`.
    pub fn effective_permittivity(&self, p: GstState) -> Complex64 {
        let clausius = |eps: Complex64| (eps - 1.0) / (eps + 2.0);
        let p = p.p();
        let mix = clausius(self.crystalline.permittivity()) * p
            + clausius(self.amorphous.permittivity()) * (1.0 - p);
        (1.0 + 2.0 * mix) / (1.0 - mix)
    }

    /// Bulk complex index of the mixed phase.
    pub fn index(&self, p: GstState) -> ComplexIndex {
        ComplexIndex::from_permittivity(self.effective_permittivity(p))
    }
}

/// Effective permittivity of GST with the default endpoint constants.
pub fn effective_permittivity(p: GstState) -> Complex64 {
    GstMaterial::default().effective_permittivity(p)
}

/// Waveguide cross-section and dispersion parameters shared by every ring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveguideStack {
    pub n_si: f64,
    pub n_sio2: f64,
    /// Modal confinement factor of the GST overlay, in (0, 1].
    pub gamma: f64,
    /// Group index.
    pub n_g: f64,
    /// Bare waveguide mode index at `lambda_ref`.
    pub n_eff: f64,
    /// Wavelength where `n_eff` is pinned, m.
    pub lambda_ref: f64,
    /// Background propagation loss (bending, scattering), dB/cm.
    pub loss_db_per_cm: f64,
    #[serde(default)]
    pub gst: GstMaterial,
}

impl Default for WaveguideStack {
    fn default() -> Self {
        WaveguideStack::from_observed_fsr(
            REFERENCE_FSR,
            REFERENCE_RADIUS,
            REFERENCE_WAVELENGTH,
            REFERENCE_MODE_ORDER,
            DEFAULT_CONFINEMENT,
        )
    }
}

impl WaveguideStack {
    /// Back-solves the group index from an observed FSR (`FSR = λ²/(n_g L)`)
    /// and pins the bare mode index so that the ring of `radius` resonates
    /// at `lambda` in azimuthal order `mode_order`.
    pub fn from_observed_fsr(
        fsr: f64,
        radius: f64,
        lambda: f64,
        mode_order: u32,
        gamma: f64,
    ) -> Self {
        let circumference = 2.0 * PI * radius;
        WaveguideStack {
            n_si: 3.5,
            n_sio2: 1.4,
            gamma,
            n_g: lambda * lambda / (fsr * circumference),
            n_eff: f64::from(mode_order) * lambda / circumference,
            lambda_ref: lambda,
            loss_db_per_cm: 0.0,
            gst: GstMaterial::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Domain(format!("invalid waveguide stack: {what}")));
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad("gamma must lie in (0, 1]");
        }
        if !(self.n_g > 0.0 && self.n_g.is_finite()) {
            return bad("n_g must be positive");
        }
        if !(self.n_eff > 0.0 && self.n_eff.is_finite()) {
            return bad("n_eff must be positive");
        }
        if !(self.lambda_ref > 0.0 && self.lambda_ref.is_finite()) {
            return bad("lambda_ref must be positive");
        }
        if !(self.loss_db_per_cm >= 0.0 && self.loss_db_per_cm.is_finite()) {
            return bad("loss_db_per_cm must be non-negative");
        }
        self.gst.amorphous.validate()?;
        self.gst.crystalline.validate()
    }

    /// Bare mode index with first-order dispersion consistent with `n_g`.
    pub fn bare_index(&self, lambda: f64) -> f64 {
        self.n_eff - (self.n_g - self.n_eff) * (lambda - self.lambda_ref) / self.lambda_ref
    }

    /// Background amplitude attenuation coefficient, 1/m.
    pub fn background_loss_per_m(&self) -> f64 {
        self.loss_db_per_cm * std::f64::consts::LN_10 / 20.0 * 100.0
    }
}

/// Mode index of the GST-loaded section at the stack's reference wavelength.
pub fn effective_mode_index(p: GstState, stack: &WaveguideStack) -> ComplexIndex {
    mode_index_at(p, stack, stack.lambda_ref)
}

/// Mode index of the GST-loaded section at `lambda`.
pub fn mode_index_at(p: GstState, stack: &WaveguideStack, lambda: f64) -> ComplexIndex {
    let bulk = stack.gst.index(p);
    ComplexIndex {
        n: (1.0 - stack.gamma) * stack.bare_index(lambda) + stack.gamma * bulk.n,
        kappa: stack.gamma * bulk.kappa,
    }
}

/// Geometry and coupling of one ring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RingDesign {
    /// m
    pub radius: f64,
    /// GST arc length, m.
    pub l_gst: f64,
    pub width_ring: f64,
    pub width_bus: f64,
    /// Bus-ring gap, m.
    pub gap: f64,
    /// Self-coupling coefficient.
    pub r_self: f64,
    pub t_gst: f64,
    pub w_gst: f64,
}

impl Default for RingDesign {
    fn default() -> Self {
        RingDesign {
            radius: REFERENCE_RADIUS,
            l_gst: 170e-9,
            width_ring: 0.45e-6,
            width_bus: 0.35e-6,
            gap: 135e-9,
            r_self: 0.99,
            t_gst: 10e-9,
            w_gst: 0.44e-6,
        }
    }
}

impl RingDesign {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Domain(format!("ring radius must be positive, got {}", self.radius)));
        }
        if !(self.l_gst > 0.0 && self.l_gst < self.circumference()) {
            return Err(Error::Domain(format!(
                "GST length {} must lie in (0, 2πR = {})",
                self.l_gst,
                self.circumference()
            )));
        }
        if !(self.r_self > 0.0 && self.r_self < 1.0) {
            return Err(Error::Domain(format!(
                "self-coupling must lie in (0, 1), got {}",
                self.r_self
            )));
        }
        Ok(())
    }

    pub fn circumference(&self) -> f64 {
        2.0 * PI * self.radius
    }

    fn gst_fraction(&self) -> f64 {
        self.l_gst / self.circumference()
    }

    /// Real index averaged over the round trip (bare path plus GST section).
    pub fn path_index(&self, p: GstState, stack: &WaveguideStack, lambda: f64) -> f64 {
        let bare = stack.bare_index(lambda);
        let loaded = mode_index_at(p, stack, lambda).n;
        bare + self.gst_fraction() * (loaded - bare)
    }

    /// Single-pass phase `θ(λ) = 2π n L / λ`.
    pub fn phase(&self, p: GstState, stack: &WaveguideStack, lambda: f64) -> f64 {
        2.0 * PI * self.path_index(p, stack, lambda) * self.circumference() / lambda
    }

    /// Resonant wavelength of azimuthal order `order`.
    ///
    /// The path index is linear in λ, so `n(λ) L = m λ` has a closed form.
    pub fn resonance(&self, p: GstState, stack: &WaveguideStack, order: u32) -> f64 {
        let l = self.circumference();
        let fg = self.gst_fraction() * stack.gamma;
        let slope = (stack.n_g - stack.n_eff) / stack.lambda_ref;
        let bulk = stack.gst.index(p).n;
        l * ((1.0 - fg) * stack.n_g + fg * bulk) / (f64::from(order) + (1.0 - fg) * slope * l)
    }

    /// Azimuthal order whose resonance lies closest to `lambda`.
    pub fn order_near(&self, p: GstState, stack: &WaveguideStack, lambda: f64) -> u32 {
        let guess = (self.path_index(p, stack, lambda) * self.circumference() / lambda).round();
        let guess = guess.max(1.0) as u32;
        (guess.saturating_sub(1).max(1)..=guess + 1)
            .min_by(|&a, &b| {
                let da = (self.resonance(p, stack, a) - lambda).abs();
                let db = (self.resonance(p, stack, b) - lambda).abs();
                da.total_cmp(&db)
            })
            .unwrap_or(guess)
    }

    /// All-pass transmission at `lambda`.
    pub fn transmission(&self, p: GstState, stack: &WaveguideStack, lambda: f64) -> Result<f64> {
        let a = attenuation_factor(self, p, lambda, stack)?;
        Ok(pass_transmission(a, self.r_self, self.phase(p, stack, lambda)))
    }

    /// Transmission exactly on the resonance of `order` for state `p`.
    pub fn resonant_transmission(
        &self,
        p: GstState,
        stack: &WaveguideStack,
        order: u32,
    ) -> Result<f64> {
        let lambda = self.resonance(p, stack, order);
        let a = attenuation_factor(self, p, lambda, stack)?;
        let x = (a - self.r_self) / (1.0 - a * self.r_self);
        Ok(x * x)
    }
}

/// Round-trip amplitude attenuation from an effective extinction coefficient
/// over the GST section plus background loss over the full circumference.
pub fn round_trip_attenuation(
    kappa_eff: f64,
    l_gst: f64,
    lambda: f64,
    background_loss_per_m: f64,
    circumference: f64,
) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("wavelength must be positive, got {lambda}")));
    }
    let a = (-2.0 * PI * kappa_eff * l_gst / lambda).exp()
        * (-background_loss_per_m * circumference).exp();
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Internal(format!(
            "attenuation factor {a} outside (0, 1]; loss sign convention violated"
        )));
    }
    Ok(a)
}

/// Round-trip amplitude attenuation `a` of a ring at crystallization `p`.
pub fn attenuation_factor(
    design: &RingDesign,
    p: GstState,
    lambda: f64,
    stack: &WaveguideStack,
) -> Result<f64> {
    let kappa = mode_index_at(p, stack, lambda).kappa;
    round_trip_attenuation(
        kappa,
        design.l_gst,
        lambda,
        stack.background_loss_per_m(),
        design.circumference(),
    )
}

/// Pass-port power transmission of a single-bus ring.
///
/// Written as `((a-r)² + 4ar sin²(θ/2)) / ((1-ar)² + 4ar sin²(θ/2))`, which is
/// algebraically the textbook form but keeps both terms non-negative.
pub fn pass_transmission(a: f64, r_self: f64, theta: f64) -> f64 {
    let s = (theta / 2.0).sin();
    let detune = 4.0 * a * r_self * s * s;
    let num = (a - r_self) * (a - r_self) + detune;
    let den = (1.0 - a * r_self) * (1.0 - a * r_self) + detune;
    if den == 0.0 {
        // a = r = 1: lossless and uncoupled.
        return 1.0;
    }
    num / den
}

/// Linewidth `(1 - ra) λ² / (π n_g L √(ra))`.
pub fn fwhm(r_self: f64, a: f64, lambda: f64, n_g: f64, circumference: f64) -> f64 {
    let ra = r_self * a;
    (1.0 - ra) * lambda * lambda / (PI * n_g * circumference * ra.sqrt())
}

/// Free spectral range `λ² / (n_g L)`.
pub fn fsr(lambda: f64, n_g: f64, circumference: f64) -> f64 {
    lambda * lambda / (n_g * circumference)
}

/// Spectral quantities at one resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub order: u32,
    pub wavelength: f64,
    pub fsr: f64,
    pub fwhm: f64,
    pub finesse: f64,
}

/// Resonances of one ring within a band.
///
/// The scalar fields describe the resonance closest to the stack's
/// reference wavelength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub fsr: f64,
    pub fwhm: f64,
    pub finesse: f64,
    pub resonant_wavelengths: Vec<f64>,
    pub resonances: Vec<Resonance>,
}

pub fn spectral_summary(
    design: &RingDesign,
    p: GstState,
    stack: &WaveguideStack,
    band: (f64, f64),
) -> Result<SpectralSummary> {
    let (lo, hi) = band;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Domain(format!("empty or invalid band [{lo}, {hi}]")));
    }
    let l = design.circumference();
    let order_at = |lambda: f64| design.path_index(p, stack, lambda) * l / lambda;
    let m_min = order_at(hi).ceil().max(1.0) as u32;
    let m_max = order_at(lo).floor().max(0.0) as u32;

    let mut resonances = Vec::new();
    for order in m_min..=m_max {
        let wavelength = design.resonance(p, stack, order);
        if wavelength < lo || wavelength > hi {
            continue;
        }
        let a = attenuation_factor(design, p, wavelength, stack)?;
        let fsr = fsr(wavelength, stack.n_g, l);
        let fwhm = fwhm(design.r_self, a, wavelength, stack.n_g, l);
        resonances.push(Resonance {
            order,
            wavelength,
            fsr,
            fwhm,
            finesse: fsr / fwhm,
        });
    }
    resonances.sort_by(|a, b| a.wavelength.total_cmp(&b.wavelength));
    let nearest = resonances
        .iter()
        .min_by(|a, b| {
            (a.wavelength - stack.lambda_ref)
                .abs()
                .total_cmp(&(b.wavelength - stack.lambda_ref).abs())
        })
        .copied()
        .ok_or_else(|| Error::Domain(format!("no resonance in band [{lo}, {hi}]")))?;
    Ok(SpectralSummary {
        fsr: nearest.fsr,
        fwhm: nearest.fwhm,
        finesse: nearest.finesse,
        resonant_wavelengths: resonances.iter().map(|r| r.wavelength).collect(),
        resonances,
    })
}

/// Resonance shift between two GST states:
/// `Δλ = λ_in (Δn_eff / n_g) (L_GST / 2πR)`.
pub fn resonance_shift(
    design: &RingDesign,
    p_from: GstState,
    p_to: GstState,
    stack: &WaveguideStack,
    lambda_in: f64,
) -> f64 {
    let delta_n = effective_mode_index(p_to, stack).n - effective_mode_index(p_from, stack).n;
    lambda_in * (delta_n / stack.n_g) * (design.l_gst / design.circumference())
}

/// Sets `r_self` equal to the amorphous-state attenuation so that the ring is
/// critically coupled (zero transmission) at `lambda` for `p = 0`.
pub fn calibrate_critical_coupling(
    design: &RingDesign,
    stack: &WaveguideStack,
    lambda: f64,
) -> Result<RingDesign> {
    let a = attenuation_factor(design, GstState::AMORPHOUS, lambda, stack)?;
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Calibration(format!(
            "amorphous attenuation {a} leaves no feasible self-coupling in (0, 1)"
        )));
    }
    Ok(RingDesign { r_self: a, ..*design })
}
