//! Second-order characterization of the output IN and the SINR gain
//! decomposition into in-phase and quadrature channels.
//!
//! For an output IN `q(t)`, `κ = ⟨|q|²⟩`, `κ̃ = ⟨q²⟩` and the channel powers
//! are `κ_I = ⟨(Re q)²⟩ = (κ + Re κ̃)/2`, `κ_Q = ⟨(Im q)²⟩ = (κ − Re κ̃)/2`.

use num_complex::Complex64;

use crate::beamform::BeamKind;
use crate::linalg::{hdot, hermitian_solve, quadratic_form, ComplexVector};
use crate::scenario::ArrayScenario;
use crate::stats::{population_in_stats, SecondOrderStats};
use crate::{Error, Result};

/// Channel powers below this fraction of `κ` make the per-channel gain undefined.
pub const CHANNEL_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InCharacterization {
    pub kappa: f64,
    pub kappa_tilde: Complex64,
    pub kappa_i: f64,
    pub kappa_q: f64,
    pub gamma_q: Complex64,
}

impl InCharacterization {
    pub fn from_moments(kappa: f64, kappa_tilde: Complex64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa_tilde.is_finite() {
            return Err(Error::DegenerateStatistics(format!("output IN power {kappa} must be positive")));
        }
        Ok(Self {
            kappa,
            kappa_tilde,
            kappa_i: (kappa + kappa_tilde.re) / 2.0,
            kappa_q: (kappa - kappa_tilde.re) / 2.0,
            gamma_q: kappa_tilde / kappa,
        })
    }
}

/// WL MVDR output IN from the block-inverse terms `sᴴAs` and `sᴴDs*`.
pub fn characterize_mvdr(stats: &SecondOrderStats, s: &ComplexVector) -> Result<InCharacterization> {
    let s_as = quadratic_form(s, stats.a(), s)?;
    let s_ds = quadratic_form(s, stats.d(), &s.conj())?;
    let denom = s_as.norm_sqr() - s_ds.norm_sqr();
    if !(denom > 1e-14 * s_as.norm_sqr()) {
        return Err(Error::DegenerateStatistics(format!("|sᴴAs|² − |sᴴDs*|² = {denom:.3e} is not positive")));
    }
    InCharacterization::from_moments(s_as.re / denom, -s_ds / denom)
}

/// Capon output IN: `κ = 1/(sᴴR⁻¹s)`, `κ̃ = uᴴCu* / (sᴴR⁻¹s)²` with `u = R⁻¹s`.
pub fn characterize_capon(stats: &SecondOrderStats, s: &ComplexVector) -> Result<InCharacterization> {
    let u = hermitian_solve(stats.r(), s)?;
    let srs = hdot(s, &u).re;
    if !(srs > 0.0) {
        return Err(Error::DegenerateStatistics(format!("sᴴR⁻¹s = {srs:.3e} is not positive")));
    }
    let ucu = quadratic_form(&u, stats.c(), &u.conj())?;
    InCharacterization::from_moments(1.0 / srs, ucu / (srs * srs))
}

pub fn characterize(stats: &SecondOrderStats, s: &ComplexVector, kind: BeamKind) -> Result<InCharacterization> {
    match kind {
        BeamKind::WidelyLinear => characterize_mvdr(stats, s),
        BeamKind::StrictlyLinear => characterize_capon(stats, s),
    }
}

/// Running second-order sums of an output IN sequence.
///
/// Merging is plain addition, so trials can be folded in any fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InAccumulator {
    pub count: u64,
    pub sum_re2: f64,
    pub sum_im2: f64,
    pub sum_re_im: f64,
}

impl InAccumulator {
    pub fn from_samples(q: &[Complex64]) -> Self {
        let mut acc = Self::default();
        acc.extend(q);
        acc
    }

    pub fn push(&mut self, q: Complex64) {
        self.count += 1;
        self.sum_re2 += q.re * q.re;
        self.sum_im2 += q.im * q.im;
        self.sum_re_im += q.re * q.im;
    }

    pub fn extend(&mut self, q: &[Complex64]) {
        for &z in q {
            self.push(z);
        }
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        self.sum_re2 += other.sum_re2;
        self.sum_im2 += other.sum_im2;
        self.sum_re_im += other.sum_re_im;
    }

    pub fn characterize(&self) -> Result<InCharacterization> {
        if self.count == 0 {
            return Err(Error::ZeroPower);
        }
        let n = self.count as f64;
        let (pi, pq) = (self.sum_re2 / n, self.sum_im2 / n);
        let kappa = pi + pq;
        if !(kappa > 0.0) {
            return Err(Error::ZeroPower);
        }
        let kappa_tilde = Complex64::new(pi - pq, 2.0 * self.sum_re_im / n);
        Ok(InCharacterization { kappa, kappa_tilde, kappa_i: pi, kappa_q: pq, gamma_q: kappa_tilde / kappa })
    }
}

/// Sample-average characterization of an output IN sequence.
pub fn characterize_empirical(q: &[Complex64]) -> Result<InCharacterization> {
    if q.len() < 2 {
        return Err(Error::ZeroPower);
    }
    InAccumulator::from_samples(q).characterize()
}

/// SINRs of both beamformers and the WL-over-Capon gains.
///
/// Per-channel gains are `None` when a channel power falls below
/// [`CHANNEL_FLOOR`]`·κ` for either beamformer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainReport {
    pub mvdr: InCharacterization,
    pub capon: InCharacterization,
    pub sinr_mvdr: f64,
    pub sinr_capon: f64,
    pub g: f64,
    pub g_i: Option<f64>,
    pub g_q: Option<f64>,
    pub lambda_i: f64,
    pub lambda_q: f64,
}

fn channel_gain(capon: f64, capon_kappa: f64, mvdr: f64, mvdr_kappa: f64) -> Option<f64> {
    if capon < CHANNEL_FLOOR * capon_kappa || mvdr < CHANNEL_FLOOR * mvdr_kappa {
        None
    } else {
        Some(capon / mvdr)
    }
}

pub fn gain_report(mvdr: &InCharacterization, capon: &InCharacterization, pi_s: f64) -> Result<GainReport> {
    for (name, c) in [("WL MVDR", mvdr), ("Capon", capon)] {
        if !(c.kappa > 0.0 && c.kappa_i > 0.0 && c.kappa_q > 0.0) {
            return Err(Error::DegenerateStatistics(format!(
                "{name} output IN powers κ = {}, κ_I = {}, κ_Q = {} must all be positive",
                c.kappa, c.kappa_i, c.kappa_q
            )));
        }
    }
    Ok(GainReport {
        mvdr: *mvdr,
        capon: *capon,
        sinr_mvdr: pi_s / mvdr.kappa,
        sinr_capon: pi_s / capon.kappa,
        g: capon.kappa / mvdr.kappa,
        g_i: channel_gain(capon.kappa_i, capon.kappa, mvdr.kappa_i, mvdr.kappa),
        g_q: channel_gain(capon.kappa_q, capon.kappa, mvdr.kappa_q, mvdr.kappa),
        lambda_i: (1.0 + capon.gamma_q.re) / (1.0 + mvdr.gamma_q.re),
        lambda_q: (1.0 - capon.gamma_q.re) / (1.0 - mvdr.gamma_q.re),
    })
}

/// Gain report from exact population statistics of a scenario.
pub fn population_gain_report(sc: &ArrayScenario) -> Result<GainReport> {
    let stats = population_in_stats(sc)?;
    let s = sc.soi_steering()?;
    gain_report(&characterize_mvdr(&stats, &s)?, &characterize_capon(&stats, &s)?, sc.soi_power)
}
