use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{calibrate_critical_coupling, fsr, GstState, RingDesign, WaveguideStack};

/// Parameters of the WDM row: ring count, radius increment and GST length
/// search window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BankSpec {
    pub rings: usize,
    /// Radius increment between neighboring rings, m.
    pub radius_step: f64,
    pub l_gst_min: f64,
    pub l_gst_max: f64,
    /// Allowed relative deviation of each ring's crystalline transmission
    /// from the bank median.
    pub match_tolerance: f64,
}

impl Default for BankSpec {
    fn default() -> Self {
        BankSpec {
            rings: 16,
            radius_step: 6e-9,
            l_gst_min: 170e-9,
            l_gst_max: 220e-9,
            match_tolerance: 0.02,
        }
    }
}

/// One WDM row of critically coupled rings with increasing radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingBank {
    pub rings: Vec<RingDesign>,
    /// Amorphous-state resonance of each ring; these are the channel
    /// (laser) wavelengths.
    pub channel_wavelengths: Vec<f64>,
    /// Mean spacing between adjacent channels, m.
    pub channel_spacing: f64,
    /// Azimuthal order shared by every channel.
    pub mode_order: u32,
    /// FSR of the first ring at its channel wavelength, m.
    pub fsr: f64,
}

impl RingBank {
    pub fn len(&self) -> usize {
        self.rings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rings.is_empty()
    }

    /// Wavelength distance between the first and last channel.
    pub fn span(&self) -> f64 {
        match (self.channel_wavelengths.first(), self.channel_wavelengths.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Crystalline-state resonance transmission of every ring.
    pub fn crystalline_transmissions(&self, stack: &WaveguideStack) -> Result<Vec<f64>> {
        self.rings
            .iter()
            .map(|r| r.resonant_transmission(GstState::CRYSTALLINE, stack, self.mode_order))
            .collect()
    }
}

fn calibrated(design: &RingDesign, stack: &WaveguideStack, order: u32) -> Result<RingDesign> {
    let lambda = design.resonance(GstState::AMORPHOUS, stack, order);
    calibrate_critical_coupling(design, stack, lambda)
}

fn crystalline_transmission(design: &RingDesign, stack: &WaveguideStack, order: u32) -> Result<f64> {
    calibrated(design, stack, order)?.resonant_transmission(GstState::CRYSTALLINE, stack, order)
}

/// Bisection for the GST length whose crystalline transmission equals
/// `target`. Falls back to the closer bound when the target is bracketed by
/// neither end.
fn search_l_gst(
    design: &RingDesign,
    stack: &WaveguideStack,
    order: u32,
    target: f64,
    spec: &BankSpec,
) -> Result<f64> {
    let g = |l: f64| -> Result<f64> {
        Ok(crystalline_transmission(&RingDesign { l_gst: l, ..*design }, stack, order)? - target)
    };
    let (mut lo, mut hi) = (spec.l_gst_min, spec.l_gst_max);
    let (g_lo, g_hi) = (g(lo)?, g(hi)?);
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo.signum() == g_hi.signum() {
        return Ok(if g_lo.abs() <= g_hi.abs() { lo } else { hi });
    }
    let lo_sign = g_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid)?;
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if g_mid.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Designs the WDM row.
///
/// Radii grow linearly from `base.radius`. Ring 0 keeps `base.l_gst`; every
/// other ring gets the GST length in `[l_gst_min, l_gst_max]` whose
/// crystalline resonance transmission matches ring 0. All rings are then
/// critically coupled in the amorphous state at their own channel.
pub fn design_ring_bank(
    base: &RingDesign,
    stack: &WaveguideStack,
    spec: &BankSpec,
) -> Result<RingBank> {
    stack.validate()?;
    if spec.rings == 0 {
        return Err(Error::Design("a ring bank needs at least one ring".into()));
    }
    if !(spec.l_gst_min > 0.0 && spec.l_gst_max >= spec.l_gst_min) {
        return Err(Error::Design(format!(
            "invalid GST length window [{}, {}]",
            spec.l_gst_min, spec.l_gst_max
        )));
    }
    let order = base.order_near(GstState::AMORPHOUS, stack, stack.lambda_ref);
    let base = calibrated(base, stack, order)?;
    base.validate()?;
    let target = base.resonant_transmission(GstState::CRYSTALLINE, stack, order)?;

    let mut rings = Vec::with_capacity(spec.rings);
    rings.push(base);
    for i in 1..spec.rings {
        let mut design = RingDesign {
            radius: base.radius + spec.radius_step * i as f64,
            ..base
        };
        design.l_gst = search_l_gst(&design, stack, order, target, spec)?;
        let design = calibrated(&design, stack, order)?;
        design.validate()?;
        rings.push(design);
    }

    let channel_wavelengths: Vec<f64> = rings
        .iter()
        .map(|r| r.resonance(GstState::AMORPHOUS, stack, order))
        .collect();
    let fsr = fsr(channel_wavelengths[0], stack.n_g, base.circumference());
    let n = rings.len();
    let span = channel_wavelengths[n - 1] - channel_wavelengths[0];
    let channel_spacing = if n > 1 { span / (n - 1) as f64 } else { 0.0 };

    if channel_wavelengths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Design("channel wavelengths are not strictly increasing".into()));
    }
    if span >= fsr || n as f64 * channel_spacing >= fsr {
        return Err(Error::Design(format!(
            "{n} channels spaced {:.3} nm do not fit in the {:.3} nm FSR",
            channel_spacing * 1e9,
            fsr * 1e9
        )));
    }

    let bank = RingBank {
        rings,
        channel_wavelengths,
        channel_spacing,
        mode_order: order,
        fsr,
    };
    let t_full = bank.crystalline_transmissions(stack)?;
    let mid = median(&t_full);
    for (i, t) in t_full.iter().enumerate() {
        if ((t - mid) / mid).abs() > spec.match_tolerance {
            return Err(Error::Design(format!(
                "ring {i}: crystalline transmission {t:.5} deviates from the bank median {mid:.5} by more than {:.1}% within the GST length window",
                spec.match_tolerance * 100.0
            )));
        }
    }
    Ok(bank)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_bank_geometry() {
        let stack = WaveguideStack::default();
        let bank = design_ring_bank(&RingDesign::default(), &stack, &BankSpec::default()).unwrap();
        assert_eq!(bank.len(), 16);
        for (i, ring) in bank.rings.iter().enumerate() {
            let expected = 1.5e-6 + 0.006e-6 * i as f64;
            assert!((ring.radius - expected).abs() < 1e-15);
            assert!(ring.l_gst >= 170e-9 && ring.l_gst <= 220e-9);
            assert!(ring.r_self > 0.0 && ring.r_self < 1.0);
        }
        assert!(bank.span() < bank.fsr);
        assert!(16.0 * bank.channel_spacing < bank.fsr);
        // Longer wavelengths absorb less per unit length; matching pushes
        // the GST element longer on larger rings.
        assert!(bank.rings.windows(2).all(|w| w[1].l_gst >= w[0].l_gst));
    }

    #[test]
    fn single_ring_bank() {
        let stack = WaveguideStack::default();
        let spec = BankSpec { rings: 1, ..BankSpec::default() };
        let bank = design_ring_bank(&RingDesign::default(), &stack, &spec).unwrap();
        assert_eq!(bank.len(), 1);
        assert_eq!(bank.channel_spacing, 0.0);
    }

    #[test]
    fn overcrowded_bank_is_rejected() {
        let stack = WaveguideStack::default();
        let spec = BankSpec { rings: 40, ..BankSpec::default() };
        assert!(matches!(
            design_ring_bank(&RingDesign::default(), &stack, &spec),
            Err(Error::Design(_))
        ));
    }

    #[test]
    fn unreachable_match_is_a_design_error() {
        let stack = WaveguideStack { loss_db_per_cm: 60.0, ..WaveguideStack::default() };
        let spec = BankSpec {
            radius_step: 60e-9,
            rings: 3,
            l_gst_max: 171e-9,
            ..BankSpec::default()
        };
        let out = design_ring_bank(&RingDesign::default(), &stack, &spec);
        assert!(matches!(out, Err(Error::Design(_))), "{out:?}");
    }
}
