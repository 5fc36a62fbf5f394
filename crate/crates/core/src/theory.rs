//! Closed-form SINRs and gains for `P` mutually orthogonal interferences of
//! common power `π` sharing one noncircularity coefficient `γ = |γ|e^{jδ}`.
//!
//! Notation: `a = |α_Is|²`, `g = |γ|`, `B = 1 + ε(2−a) + ε²(1−g²)(1−a)`,
//! `E = (1+ε)² − ε²g²` and `D_c = 1 + (2−a)ε + (1−a)ε²`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::scenario::{spatial_coefficients, ArrayScenario, SpatialCoefficients};
use crate::{Error, Result};

/// How close `|α_Is|²` must be to 0 or 1 for the special-case bundles.
pub const CASE_TOL: f64 = 1e-12;

const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryInputs {
    pub eps_s: f64,
    pub eps: f64,
    pub alpha_is_sq: f64,
    pub alpha_i_sq: Complex64,
    pub alpha_w: f64,
    pub gamma_rate: f64,
    pub gamma_phase: f64,
}

impl TheoryInputs {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::DomainError(msg));
        if !(self.eps_s >= 0.0) || !(self.eps >= 0.0) || !self.eps.is_finite() || !self.eps_s.is_finite() {
            return bad(format!("ε_s = {}, ε = {} must be finite and nonnegative", self.eps_s, self.eps));
        }
        if !(-BOUND_SLACK..=1.0 + BOUND_SLACK).contains(&self.alpha_is_sq) {
            return bad(format!("|α_Is|² = {} outside [0, 1]", self.alpha_is_sq));
        }
        let bound = self.alpha_is_sq + BOUND_SLACK;
        if self.alpha_i_sq.norm() > bound || self.alpha_w.abs() > bound {
            return bad(format!(
                "|α_I²| = {}, |α_w| = {} exceed |α_Is|² = {}",
                self.alpha_i_sq.norm(),
                self.alpha_w.abs(),
                self.alpha_is_sq
            ));
        }
        if !(0.0..1.0).contains(&self.gamma_rate) {
            return bad(format!("|γ| = {} outside [0, 1)", self.gamma_rate));
        }
        if !self.gamma_phase.is_finite() {
            return bad("δ must be finite".into());
        }
        Ok(())
    }

    pub fn from_coefficients(sp: &SpatialCoefficients, gamma_rate: f64, gamma_phase: f64) -> Result<Self> {
        let t = Self {
            eps_s: sp.eps_s,
            eps: sp.eps,
            alpha_is_sq: sp.alpha_is_sq,
            alpha_i_sq: sp.alpha_i_sq,
            alpha_w: sp.alpha_w,
            gamma_rate,
            gamma_phase,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn from_scenario(sc: &ArrayScenario) -> Result<Self> {
        let sp = spatial_coefficients(sc)?;
        Self::from_coefficients(&sp, sc.noncircularity.rate, sc.noncircularity.phase)
    }

    pub fn gamma(&self) -> Complex64 {
        Complex64::from_polar(self.gamma_rate, self.gamma_phase)
    }

    /// Copy with a new noncircularity phase and `α_w` recomputed as
    /// `|α_I²| cos(δ + Δ)`, `Δ = arg α_I²`.
    pub fn with_phase(&self, delta: f64) -> Self {
        let w = self.alpha_i_sq.norm();
        let offset = self.alpha_i_sq.im.atan2(self.alpha_i_sq.re);
        Self { gamma_phase: delta, alpha_w: w * (delta + offset).cos(), ..*self }
    }

    /// Copy with a new rate `|γ|`.
    pub fn with_rate(&self, rate: f64) -> Self {
        Self { gamma_rate: rate, ..*self }
    }

    fn b(&self) -> f64 {
        let (e, a, g) = (self.eps, self.alpha_is_sq, self.gamma_rate);
        1.0 + e * (2.0 - a) + e * e * (1.0 - g * g) * (1.0 - a)
    }

    fn e(&self) -> f64 {
        let (e, g) = (self.eps, self.gamma_rate);
        (1.0 + e) * (1.0 + e) - e * e * g * g
    }

    fn d_capon(&self) -> f64 {
        let (e, a) = (self.eps, self.alpha_is_sq);
        1.0 + (2.0 - a) * e + (1.0 - a) * e * e
    }

    /// `|α_I|⁴`, read as the squared modulus of the complex sum `α_I²`.
    fn alpha_i_4(&self) -> f64 {
        self.alpha_i_sq.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Beamformer {
    Capon,
    Mvdr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    I,
    Q,
}

/// `ε_s (1 − a ε/(ε+1))`.
pub fn sinr_capon_closed(t: &TheoryInputs) -> Result<f64> {
    t.validate()?;
    Ok(t.eps_s * (1.0 - t.eps / (t.eps + 1.0) * t.alpha_is_sq))
}

/// `ε_s (B² − ε²|α_I|⁴g²) / (E B)`.
pub fn sinr_mvdr_closed(t: &TheoryInputs) -> Result<f64> {
    t.validate()?;
    let (b, e) = (t.b(), t.e());
    let cross = t.eps * t.eps * t.alpha_i_4() * t.gamma_rate * t.gamma_rate;
    Ok(t.eps_s * (b * b - cross) / (e * b))
}

/// Excess `G − 1` of the exact overall gain.
pub fn gain_excess_closed(t: &TheoryInputs) -> Result<f64> {
    t.validate()?;
    let (eps, a, g) = (t.eps, t.alpha_is_sq, t.gamma_rate);
    let (b, e) = (t.b(), t.e());
    let num = g * g * eps * eps * ((1.0 - a) * a * e + (a * a - t.alpha_i_4()) * (1.0 + eps));
    Ok(num / ((1.0 + eps * (1.0 - a)) * e * b))
}

/// Exact overall gain `G = SINR_MVDR / SINR_Capon`.
pub fn gain_closed(t: &TheoryInputs) -> Result<f64> {
    Ok(1.0 + gain_excess_closed(t)?)
}

/// Output IN noncircularity `γεα_I² / D_c` (Capon) or `γεα_I² / B` (WL MVDR).
pub fn gamma_q_closed(t: &TheoryInputs, which: Beamformer) -> Result<Complex64> {
    t.validate()?;
    let num = t.gamma() * t.eps * t.alpha_i_sq;
    Ok(match which {
        Beamformer::Capon => num / t.d_capon(),
        Beamformer::Mvdr => num / t.b(),
    })
}

/// Distribution coefficient `λ_I` or `λ_Q` relating channel gains to `G`.
pub fn lambda_closed(t: &TheoryInputs, which: Channel) -> Result<f64> {
    t.validate()?;
    let (eps, a, g) = (t.eps, t.alpha_is_sq, t.gamma_rate);
    let w = match which {
        Channel::I => g * t.alpha_w,
        Channel::Q => -g * t.alpha_w,
    };
    let lin = 1.0 + eps * (2.0 - a + w);
    let num = lin + eps * eps * (1.0 - a);
    let den = lin + eps * eps * (1.0 - g * g) * (1.0 - a);
    Ok(num / den * t.b() / t.d_capon())
}

/// Every exact closed-form quantity at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub sinr_capon: f64,
    pub sinr_mvdr: f64,
    pub g: f64,
    pub g_i: f64,
    pub g_q: f64,
    pub lambda_i: f64,
    pub lambda_q: f64,
    pub gamma_q_capon: Complex64,
    pub gamma_q_mvdr: Complex64,
}

pub fn closed_form(t: &TheoryInputs) -> Result<ClosedForm> {
    let g = gain_closed(t)?;
    let lambda_i = lambda_closed(t, Channel::I)?;
    let lambda_q = lambda_closed(t, Channel::Q)?;
    Ok(ClosedForm {
        sinr_capon: sinr_capon_closed(t)?,
        sinr_mvdr: sinr_mvdr_closed(t)?,
        g,
        g_i: lambda_i * g,
        g_q: lambda_q * g,
        lambda_i,
        lambda_q,
        gamma_q_capon: gamma_q_closed(t, Beamformer::Capon)?,
        gamma_q_mvdr: gamma_q_closed(t, Beamformer::Mvdr)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpatialCase {
    /// SOI orthogonal to every interference (`|α_Is|² = 0`).
    Orthogonal,
    /// SOI in the span of the interferences (`|α_Is|² = 1`).
    Combination,
}

impl SpatialCase {
    /// The case `|α_Is|²` falls into within [`CASE_TOL`], if any.
    pub fn classify(alpha_is_sq: f64) -> Option<Self> {
        if alpha_is_sq.abs() <= CASE_TOL {
            Some(Self::Orthogonal)
        } else if (alpha_is_sq - 1.0).abs() <= CASE_TOL {
            Some(Self::Combination)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialCaseBundle {
    pub sinr_capon: f64,
    pub sinr_mvdr: f64,
    pub gamma_q_capon: Complex64,
    pub gamma_q_mvdr: Complex64,
    pub g: f64,
    pub g_i: f64,
    pub g_q: f64,
}

pub fn special_case(t: &TheoryInputs, case: SpatialCase) -> Result<SpecialCaseBundle> {
    t.validate()?;
    if SpatialCase::classify(t.alpha_is_sq) != Some(case) {
        return Err(Error::CaseMismatch(format!("|α_Is|² = {} does not fit {case:?}", t.alpha_is_sq)));
    }
    let zero = Complex64::new(0.0, 0.0);
    Ok(match case {
        SpatialCase::Orthogonal => SpecialCaseBundle {
            sinr_capon: t.eps_s,
            sinr_mvdr: t.eps_s,
            gamma_q_capon: zero,
            gamma_q_mvdr: zero,
            g: 1.0,
            g_i: 1.0,
            g_q: 1.0,
        },
        SpatialCase::Combination => {
            let (eps, g) = (t.eps, t.gamma_rate);
            let a4 = t.alpha_i_4();
            let e = t.e();
            // B = D_c = 1 + ε here; the common coefficient keeps that divisor
            let gq = t.gamma() * eps * t.alpha_i_sq / (1.0 + eps);
            let gain = a4 + (1.0 - a4) * (1.0 + eps) * (1.0 + eps) / e;
            SpecialCaseBundle {
                sinr_capon: t.eps_s / (eps + 1.0),
                sinr_mvdr: t.eps_s * ((1.0 + eps) * (1.0 + eps) - eps * eps * a4 * g * g) / (e * (1.0 + eps)),
                gamma_q_capon: gq,
                gamma_q_mvdr: gq,
                g: gain,
                g_i: gain,
                g_q: gain,
            }
        }
    })
}

/// Quantities with a strong-interference (large `ε`) approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ApproxTarget {
    SinrMvdr,
    Gain,
    LambdaI,
    LambdaQ,
    GainI,
    GainQ,
}

fn check_approx_domain(t: &TheoryInputs) -> Result<()> {
    t.validate()?;
    if !(t.alpha_is_sq > 0.0 && t.alpha_is_sq < 1.0) {
        return Err(Error::DomainError(format!("approximation needs 0 < |α_Is|² < 1, got {}", t.alpha_is_sq)));
    }
    if !(t.eps > 0.0) {
        return Err(Error::DomainError("approximation needs ε > 0".into()));
    }
    Ok(())
}

/// Deviation from 1 of a gain or distribution coefficient approximation
/// (or the full value for [`ApproxTarget::SinrMvdr`]).
///
/// Kept separate from [`approx`] so small excesses survive without the
/// cancellation of subtracting 1.
pub fn approx_excess(t: &TheoryInputs, target: ApproxTarget) -> Result<f64> {
    check_approx_domain(t)?;
    let (eps, a, g, w) = (t.eps, t.alpha_is_sq, t.gamma_rate, t.alpha_w);
    let g2 = g * g;
    let k = eps * (1.0 - a) * (1.0 - g2);
    Ok(match target {
        ApproxTarget::SinrMvdr => t.eps_s * (1.0 - a + a * (eps + 1.0) / ((1.0 - g2) * eps * eps + 2.0 * eps + 1.0)),
        ApproxTarget::Gain => a * g2 * eps / ((1.0 - a) * (1.0 - g2) * eps * eps + (2.0 - a) * eps + 1.0),
        ApproxTarget::LambdaI => -g2 * g * w / k,
        ApproxTarget::LambdaQ => g2 * g * w / k,
        ApproxTarget::GainI => (-w * g2 * g + a * g2) / k,
        ApproxTarget::GainQ => (w * g2 * g + a * g2) / k,
    })
}

pub fn approx(t: &TheoryInputs, target: ApproxTarget) -> Result<f64> {
    let x = approx_excess(t, target)?;
    Ok(match target {
        ApproxTarget::SinrMvdr => x,
        _ => 1.0 + x,
    })
}

/// `dG_I/d|γ|` of the approximate I-channel gain.
pub fn gain_i_slope(t: &TheoryInputs) -> Result<f64> {
    check_approx_domain(t)?;
    if !(t.gamma_rate > 0.0) {
        return Err(Error::DomainError("slope needs 0 < |γ|".into()));
    }
    let (a, g, w) = (t.alpha_is_sq, t.gamma_rate, t.alpha_w);
    let g2 = g * g;
    let num = w * g2 * g2 - 3.0 * w * g2 + 2.0 * a * g;
    Ok(num / (t.eps * (1.0 - a) * (1.0 - g2) * (1.0 - g2)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaPoint {
    pub delta: f64,
    pub alpha_w: f64,
    pub g_i: f64,
    pub g_q: f64,
}

/// Approximate `G_I`, `G_Q` across noncircularity phases, with `α_w`
/// re-derived at each `δ` as `|α_I²| cos(δ + Δ)`.
pub fn delta_behavior(t: &TheoryInputs, delta_grid: &[f64]) -> Result<Vec<DeltaPoint>> {
    check_approx_domain(t)?;
    delta_grid
        .iter()
        .map(|&delta| {
            let td = t.with_phase(delta);
            Ok(DeltaPoint {
                delta,
                alpha_w: td.alpha_w,
                g_i: approx(&td, ApproxTarget::GainI)?,
                g_q: approx(&td, ApproxTarget::GainQ)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Trend {
    Increasing,
    Decreasing,
}

/// Phase-dependence pattern of the channel gains for one quarter period of `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseQuadrant {
    /// 0..4, counting quarter periods from `δ = −Δ − π/2`.
    pub index: usize,
    pub g_i_trend: Trend,
    pub g_q_trend: Trend,
    /// The channel whose gain grows faster with `|γ|`.
    pub faster_in_rate: Channel,
}

/// Classifies `δ` relative to the offset `Δ`; `None` on a quadrant boundary.
pub fn phase_quadrant(delta: f64, delta_offset: f64) -> Option<PhaseQuadrant> {
    let u = (delta + delta_offset + PI / 2.0).rem_euclid(2.0 * PI);
    let q = u / (PI / 2.0);
    if (q - q.round()).abs() < 1e-12 {
        return None;
    }
    let index = q.floor() as usize % 4;
    use Trend::*;
    let (g_i_trend, g_q_trend) =
        if index == 0 || index == 3 { (Decreasing, Increasing) } else { (Increasing, Decreasing) };
    // α_w > 0 on the first two quarters (cos(δ+Δ) > 0), favouring Q
    let faster_in_rate = if index < 2 { Channel::Q } else { Channel::I };
    Some(PhaseQuadrant { index, g_i_trend, g_q_trend, faster_in_rate })
}
