//! Uniform linear array geometry and the scalar spatial coefficients that
//! summarize how the SOI sits relative to the interferences.
//!
//! Element spacing is half a wavelength and the steering vector for a plane
//! wave from `θ` (degrees from broadside) has entries `exp(−jπ k sin θ)`,
//! `k = 0..N−1`. Two steering vectors are exactly orthogonal when their
//! `sin θ` values differ by a nonzero multiple of `2/N` (mod 2).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::ComplexVector;
use crate::{Error, Result};

/// Relative spread of interference powers tolerated before the uniform-power
/// assumption is declared violated.
pub const UNIFORM_POWER_TOL: f64 = 1e-9;

/// Rate `|γ|` and phase `δ` (radians) of a second-order noncircularity coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoncircularitySpec {
    pub rate: f64,
    pub phase: f64,
}

impl NoncircularitySpec {
    pub fn new(rate: f64, phase: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::InvalidRate(rate));
        }
        Ok(Self { rate, phase })
    }

    pub fn circular() -> Self {
        Self { rate: 0.0, phase: 0.0 }
    }

    /// `γ = |γ| e^{jδ}`.
    pub fn coefficient(&self) -> Complex64 {
        Complex64::from_polar(self.rate, self.phase)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interference {
    pub doa_deg: f64,
    pub power: f64,
    /// Carrier phase φ_p, radians.
    pub carrier_phase: f64,
}

/// Narrowband far-field scene seen by an `N`-element half-wavelength ULA.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayScenario {
    pub n_sensors: usize,
    pub soi_doa_deg: f64,
    pub soi_power: f64,
    /// Carrier phase φ_s, radians.
    pub soi_phase: f64,
    pub interferences: Vec<Interference>,
    pub noise_power: f64,
    /// Shared by every interference.
    pub noncircularity: NoncircularitySpec,
    /// SOI noncircularity; `None` reuses the interference rate and phase.
    #[serde(default)]
    pub soi_noncircularity: Option<NoncircularitySpec>,
}

impl ArrayScenario {
    pub fn validate(&self) -> Result<()> {
        if self.n_sensors == 0 {
            return Err(Error::InvalidParameter("array needs at least one sensor".into()));
        }
        if !(self.noise_power > 0.0) {
            return Err(Error::InvalidParameter(format!("noise power {} must be positive", self.noise_power)));
        }
        if !(self.soi_power >= 0.0) {
            return Err(Error::InvalidParameter(format!("SOI power {} must be nonnegative", self.soi_power)));
        }
        check_angle(self.soi_doa_deg)?;
        for (p, intf) in self.interferences.iter().enumerate() {
            check_angle(intf.doa_deg)?;
            if !(intf.power >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "interference {p} power {} must be nonnegative",
                    intf.power
                )));
            }
        }
        NoncircularitySpec::new(self.noncircularity.rate, self.noncircularity.phase)?;
        if let Some(s) = self.soi_noncircularity {
            NoncircularitySpec::new(s.rate, s.phase)?;
        }
        Ok(())
    }

    pub fn soi_steering(&self) -> Result<ComplexVector> {
        steering_vector(self.soi_doa_deg, self.n_sensors)
    }

    pub fn interference_steering(&self) -> Result<Vec<ComplexVector>> {
        self.interferences.iter().map(|i| steering_vector(i.doa_deg, self.n_sensors)).collect()
    }

    pub fn soi_noncircularity(&self) -> NoncircularitySpec {
        self.soi_noncircularity.unwrap_or(self.noncircularity)
    }

    /// Common interference power π, or `AssumptionViolated` when the powers
    /// differ by more than [`UNIFORM_POWER_TOL`] relative. Zero when `P = 0`.
    pub fn uniform_interference_power(&self) -> Result<f64> {
        let Some(first) = self.interferences.first() else {
            return Ok(0.0);
        };
        let spread = power_spread(&self.interferences);
        if spread > UNIFORM_POWER_TOL {
            return Err(Error::AssumptionViolated(format!("interference powers differ by {spread:.3e} relative")));
        }
        Ok(first.power)
    }

    /// Copy with every interference DOA moved to the nearest `sin θ = k·2/N`.
    pub fn snapped(&self) -> Result<Self> {
        let mut out = self.clone();
        let mut taken: Vec<i64> = Vec::new();
        for intf in &mut out.interferences {
            let (deg, k) = snap_doa(intf.doa_deg, self.n_sensors)?;
            // sin θ = ±1 coincide for even N (k = ±N/2 give identical vectors)
            let canon = canonical_grid_index(k, self.n_sensors);
            if taken.contains(&canon) {
                return Err(Error::AssumptionViolated(format!(
                    "DOA {:.4}° snaps onto an already occupied orthogonal grid point",
                    intf.doa_deg
                )));
            }
            taken.push(canon);
            intf.doa_deg = deg;
        }
        Ok(out)
    }
}

fn check_angle(doa_deg: f64) -> Result<()> {
    if !(-90.0..=90.0).contains(&doa_deg) {
        return Err(Error::InvalidAngle(doa_deg));
    }
    Ok(())
}

fn power_spread(interferences: &[Interference]) -> f64 {
    let (lo, hi) =
        interferences.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| (lo.min(i.power), hi.max(i.power)));
    if hi == 0.0 {
        0.0
    } else {
        (hi - lo) / hi
    }
}

fn canonical_grid_index(k: i64, n: usize) -> i64 {
    k.rem_euclid(n as i64)
}

/// Nearest DOA (degrees) on the exact-orthogonal grid `sin θ = k·2/N`, with `k`.
pub fn snap_doa(doa_deg: f64, n_sensors: usize) -> Result<(f64, i64)> {
    check_angle(doa_deg)?;
    let half = n_sensors as f64 / 2.0;
    let sin = doa_deg.to_radians().sin();
    let max_k = half.floor() as i64;
    let k = ((sin * half).round() as i64).clamp(-max_k, max_k);
    let snapped = (k as f64 / half).clamp(-1.0, 1.0);
    Ok((snapped.asin().to_degrees(), k))
}

/// The `N` DOAs (degrees, ascending) whose steering vectors are mutually
/// orthogonal: `sin θ = 2k/N` for `N` consecutive integers `k` ending at `⌊N/2⌋`.
pub fn orthogonal_grid(n_sensors: usize) -> Vec<f64> {
    let n = n_sensors as i64;
    let top = n / 2;
    (top - n + 1..=top).map(|k| (2.0 * k as f64 / n as f64).clamp(-1.0, 1.0).asin().to_degrees()).collect()
}

/// Half-wavelength ULA steering vector, entries `exp(−jπ k sin θ)`.
pub fn steering_vector(doa_deg: f64, n_sensors: usize) -> Result<ComplexVector> {
    check_angle(doa_deg)?;
    let phase_step = -std::f64::consts::PI * doa_deg.to_radians().sin();
    Ok(ComplexVector::from_fn(n_sensors, |k| Complex64::from_polar(1.0, phase_step * k as f64)))
}

/// Normalized correlation `j_pᴴ s / (‖j_p‖ ‖s‖)`.
pub fn spatial_correlation(j: &ComplexVector, s: &ComplexVector) -> Result<Complex64> {
    let (nj, ns) = (j.norm(), s.norm());
    if nj == 0.0 || ns == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(j.dot(s)? / (nj * ns))
}

/// Scalar summary of the SOI/interference geometry under uniform power and a
/// shared noncircularity coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialCoefficients {
    /// SOI-to-noise ratio after array gain, `N π_s / η`.
    pub eps_s: f64,
    /// Interference-to-noise ratio after array gain, `N π / η`.
    pub eps: f64,
    /// Per-interference correlation with the SOI.
    pub alpha_ps: Vec<Complex64>,
    /// `β_p = φ_p − arg α_ps` (`φ_p` when `α_ps = 0`).
    pub beta: Vec<f64>,
    /// `Σ |α_ps|²`.
    pub alpha_is_sq: f64,
    /// `Σ |α_ps|² e^{j2β_p}`.
    pub alpha_i_sq: Complex64,
    /// `Σ |α_ps|² cos(δ + 2β_p)`.
    pub alpha_w: f64,
    /// Phase offset with `α_w = |α_I²| cos(δ + Δ)`.
    pub delta_offset: f64,
}

pub fn spatial_coefficients(sc: &ArrayScenario) -> Result<SpatialCoefficients> {
    sc.validate()?;
    let pi = sc.uniform_interference_power()?;
    let n = sc.n_sensors as f64;
    let s = sc.soi_steering()?;
    let delta = sc.noncircularity.phase;

    let mut alpha_ps = Vec::with_capacity(sc.interferences.len());
    let mut beta = Vec::with_capacity(sc.interferences.len());
    for (intf, j) in sc.interferences.iter().zip(sc.interference_steering()?) {
        let a = spatial_correlation(&j, &s)?;
        let b = if a == Complex64::new(0.0, 0.0) { intf.carrier_phase } else { intf.carrier_phase - a.arg() };
        alpha_ps.push(a);
        beta.push(b);
    }

    let alpha_is_sq = alpha_ps.iter().map(|a| a.norm_sqr()).sum();
    let alpha_i_sq: Complex64 =
        alpha_ps.iter().zip(&beta).map(|(a, b)| Complex64::from_polar(a.norm_sqr(), 2.0 * b)).sum();
    let alpha_w = alpha_ps.iter().zip(&beta).map(|(a, b)| a.norm_sqr() * (delta + 2.0 * b).cos()).sum();
    let delta_offset = alpha_i_sq.im.atan2(alpha_i_sq.re);

    Ok(SpatialCoefficients {
        eps_s: n * sc.soi_power / sc.noise_power,
        eps: n * pi / sc.noise_power,
        alpha_ps,
        beta,
        alpha_is_sq,
        alpha_i_sq,
        alpha_w,
        delta_offset,
    })
}

/// Diagnostic for whether the closed-form theory applies to a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub uniform_power: bool,
    /// Relative spread `(max π_p − min π_p) / max π_p`.
    pub power_spread: f64,
    /// Worst `|j_iᴴ j_j| / N` over interference pairs; zero for `P ≤ 1`.
    pub pairwise_orthogonality: f64,
    pub tolerance: f64,
}

impl AssumptionReport {
    pub fn orthogonal(&self) -> bool {
        self.pairwise_orthogonality <= self.tolerance
    }

    pub fn holds(&self) -> bool {
        self.uniform_power && self.orthogonal()
    }
}

pub fn check_assumptions(sc: &ArrayScenario, tol: f64) -> Result<AssumptionReport> {
    sc.validate()?;
    let steer = sc.interference_steering()?;
    let n = sc.n_sensors as f64;
    let mut worst = 0.0f64;
    for i in 0..steer.len() {
        for j in i + 1..steer.len() {
            worst = worst.max(steer[i].dot(&steer[j])?.norm() / n);
        }
    }
    let power_spread = power_spread(&sc.interferences);
    Ok(AssumptionReport {
        uniform_power: power_spread <= tol.max(UNIFORM_POWER_TOL),
        power_spread,
        pairwise_orthogonality: worst,
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn scenario(n: usize, soi: f64, doas: &[f64], delta: f64) -> ArrayScenario {
        ArrayScenario {
            n_sensors: n,
            soi_doa_deg: soi,
            soi_power: 10.0,
            soi_phase: 0.0,
            interferences: doas
                .iter()
                .map(|&d| Interference { doa_deg: d, power: 100.0, carrier_phase: 0.0 })
                .collect(),
            noise_power: 1.0,
            noncircularity: NoncircularitySpec { rate: 0.8, phase: delta },
            soi_noncircularity: None,
        }
    }

    #[test]
    fn broadside_is_all_ones() {
        let s = steering_vector(0.0, 4).unwrap();
        assert!(s.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn endfire_alternates() {
        let s = steering_vector(90.0, 2).unwrap();
        assert!((s[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((s[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn steering_norm_is_n() {
        for n in 1..20 {
            let s = steering_vector(37.3, n).unwrap();
            assert!((s.norm_sqr() - n as f64).abs() < 1e-12 * n as f64);
        }
    }

    #[test]
    fn third_grid_point_entries_and_orthogonality() {
        let theta = (1.0f64 / 3.0).asin().to_degrees();
        let s = steering_vector(theta, 6).unwrap();
        for (k, z) in s.iter().enumerate() {
            let expected = Complex64::from_polar(1.0, -PI * k as f64 / 3.0);
            assert!((z - expected).norm() < 1e-12);
        }
        // Σ_k e^{jπk(1 − 1/3)} = Σ_k e^{j2πk/3} over k = 0..5 is two full turns: 0
        let e = steering_vector(90.0, 6).unwrap();
        assert!(e.dot(&s).unwrap().norm() < 1e-12);
    }

    #[test]
    fn steering_rejects_bad_angle() {
        assert!(matches!(steering_vector(91.0, 4), Err(Error::InvalidAngle(_))));
        assert!(matches!(steering_vector(-90.5, 4), Err(Error::InvalidAngle(_))));
    }

    #[test]
    fn spatial_correlation_examples() {
        let s = steering_vector(25.0, 5).unwrap();
        assert!((spatial_correlation(&s, &s).unwrap() - 1.0).norm() < 1e-12);

        let a = steering_vector(0.0, 2).unwrap();
        let b = steering_vector(90.0, 2).unwrap();
        assert!(spatial_correlation(&a, &b).unwrap().norm() < 1e-15);

        // j = (1, 1), s = (1, e^{−jπ sin 80°}): jᴴs / 2
        let s80 = steering_vector(80.0, 2).unwrap();
        let direct = (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, -PI * 80f64.to_radians().sin())) / 2.0;
        assert!((spatial_correlation(&a, &s80).unwrap() - direct).norm() < 1e-15);

        assert!(matches!(spatial_correlation(&ComplexVector::zeros(2), &a), Err(Error::ZeroVector)));
    }

    #[test]
    fn orthogonal_soi_has_zero_coefficients() {
        // N = 4 grid: sin θ ∈ {−1/2, 0, 1/2, 1}
        let sc = scenario(4, 30.0, &[0.0, 90.0], 0.3);
        let sp = spatial_coefficients(&sc).unwrap();
        assert!(sp.alpha_is_sq < 1e-24);
        assert!(sp.alpha_i_sq.norm() < 1e-12);
        assert!(sp.alpha_w.abs() < 1e-12);
        assert!((sp.eps_s - 40.0).abs() < 1e-12);
        assert!((sp.eps - 400.0).abs() < 1e-12);
    }

    #[test]
    fn spanning_interferences_give_unit_sum() {
        let sc = scenario(4, 17.0, &[-30.0, 0.0, 30.0, 90.0], 0.3);
        let sp = spatial_coefficients(&sc).unwrap();
        assert!((sp.alpha_is_sq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_w_vanishes_at_cosine_root() {
        let base = scenario(6, 25.0, &[90.0], 0.0);
        let beta = spatial_coefficients(&base).unwrap().beta[0];
        let sc = scenario(6, 25.0, &[90.0], PI / 2.0 - 2.0 * beta);
        assert!(spatial_coefficients(&sc).unwrap().alpha_w.abs() < 1e-12);
    }

    #[test]
    fn delta_offset_reconstructs_alpha_w() {
        let sc = scenario(6, 25.0, &[19.47122063449069, 41.810314895778596, 90.0], 150f64.to_radians());
        let sp = spatial_coefficients(&sc).unwrap();
        let rebuilt = sp.alpha_i_sq.norm() * (sc.noncircularity.phase + sp.delta_offset).cos();
        assert!((rebuilt - sp.alpha_w).abs() < 1e-12);
    }

    #[test]
    fn nonuniform_powers_rejected() {
        let mut sc = scenario(6, 25.0, &[0.0, 90.0], 0.0);
        sc.interferences[1].power = 101.0;
        assert!(matches!(spatial_coefficients(&sc), Err(Error::AssumptionViolated(_))));
    }

    #[test]
    fn exact_third_grid_is_orthogonal() {
        let doas: Vec<f64> = [1.0f64 / 3.0, 2.0 / 3.0, 1.0].iter().map(|s| s.asin().to_degrees()).collect();
        let rep = check_assumptions(&scenario(6, 10.0, &doas, 0.0), 1e-9).unwrap();
        assert!(rep.pairwise_orthogonality < 1e-12);
        assert!(rep.holds());
    }

    #[test]
    fn rounded_preset_doas_are_nearly_orthogonal() {
        // brute-force |j_iᴴ j_j| / N on the literal DOAs
        let doas = [19.0, 42.0, 90.0];
        let steer: Vec<_> = doas.iter().map(|&d| steering_vector(d, 6).unwrap()).collect();
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in i + 1..3 {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..6 {
                    acc += steer[i][k].conj() * steer[j][k];
                }
                worst = worst.max(acc.norm() / 6.0);
            }
        }
        let rep = check_assumptions(&scenario(6, 10.0, &doas, 0.0), 1e-6).unwrap();
        assert!((rep.pairwise_orthogonality - worst).abs() < 1e-15);
        assert!(worst > 1e-3 && worst < 0.05, "worst {worst}");
        assert!(!rep.holds());
        let snapped = check_assumptions(&scenario(6, 10.0, &doas, 0.0).snapped().unwrap(), 1e-6).unwrap();
        assert!(snapped.holds());
    }

    #[test]
    fn single_interference_vacuously_orthogonal() {
        let rep = check_assumptions(&scenario(3, 10.0, &[12.0], 0.0), 0.0).unwrap();
        assert_eq!(rep.pairwise_orthogonality, 0.0);
        assert!(rep.holds());
    }

    #[test]
    fn snapping_figure_presets() {
        let (d, k) = snap_doa(19.0, 6).unwrap();
        assert_eq!(k, 1);
        assert!((d.to_radians().sin() - 1.0 / 3.0).abs() < 1e-15);
        let (d, k) = snap_doa(49.0, 16).unwrap();
        assert_eq!(k, 6);
        assert!((d.to_radians().sin() - 0.75).abs() < 1e-15);
        assert_eq!(snap_doa(90.0, 6).unwrap().0, 90.0);
    }

    #[test]
    fn grid_points_are_mutually_orthogonal() {
        for n in 1..=9 {
            let grid = orthogonal_grid(n);
            assert_eq!(grid.len(), n);
            for i in 0..n {
                for j in i + 1..n {
                    let a = steering_vector(grid[i], n).unwrap();
                    let b = steering_vector(grid[j], n).unwrap();
                    assert!(a.dot(&b).unwrap().norm() < 1e-12, "n = {n}: {} vs {}", grid[i], grid[j]);
                }
            }
        }
        assert_eq!(*orthogonal_grid(6).last().unwrap(), 90.0);
    }

    #[test]
    fn snapping_collision_is_an_error() {
        let sc = scenario(4, 10.0, &[1.0, 2.0], 0.0);
        assert!(matches!(sc.snapped(), Err(Error::AssumptionViolated(_))));
        let sc = scenario(4, 10.0, &[-90.0, 90.0], 0.0);
        assert!(sc.snapped().is_err());
    }
}
