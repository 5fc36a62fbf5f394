//! Waveform and snapshot synthesis.
//!
//! Every random source draws from its own ChaCha8 stream of a single seed:
//! stream 0 is the SOI, stream `p + 1` interference `p`, stream `P + 1` the
//! sensor noise. A batch is therefore a pure function of `(scenario, T, seed)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexVector;
use crate::scenario::ArrayScenario;
use crate::{Error, Result};

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn check_xi(xi: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::InvalidXi(xi));
    }
    Ok(())
}

fn uqpsk_from_rng(xi: f64, delta: f64, n_symbols: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let rot = Complex64::from_polar(1.0 / (xi * xi + (1.0 - xi) * (1.0 - xi)).sqrt(), delta / 2.0);
    let sign = |b: bool| if b { 1.0 } else { -1.0 };
    (0..n_symbols)
        .map(|_| {
            let rho = sign(rng.random());
            let sigma = sign(rng.random());
            Complex64::new(xi * rho, (1.0 - xi) * sigma) * rot
        })
        .collect()
}

/// Unit-power UQPSK baseband symbols `(ξρ + j(1−ξ)σ)e^{jδ/2}`, one per snapshot.
///
/// The noncircularity coefficient of the output is
/// `(2ξ−1)/(2ξ²−2ξ+1) · e^{jδ}`.
pub fn gen_uqpsk(xi: f64, delta: f64, n_symbols: usize, seed: u64) -> Result<Vec<Complex64>> {
    check_xi(xi)?;
    Ok(uqpsk_from_rng(xi, delta, n_symbols, &mut stream_rng(seed, 0)))
}

/// Noncircularity rate of UQPSK with imbalance factor `ξ`.
pub fn uqpsk_rate(xi: f64) -> Result<f64> {
    check_xi(xi)?;
    Ok((2.0 * xi - 1.0) / (2.0 * xi * xi - 2.0 * xi + 1.0))
}

/// Inverse of [`uqpsk_rate`] on the branch `ξ ≥ 1/2`.
pub fn xi_for_rate(target_rate: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&target_rate) {
        return Err(Error::InvalidRate(target_rate));
    }
    let r = target_rate;
    Ok((1.0 + r) / (1.0 + r + (1.0 - r * r).sqrt()))
}

// rate 1 is a valid scenario setting (real symbols); only the inversion excludes it
fn xi_for_scenario_rate(rate: f64) -> Result<f64> {
    if rate == 1.0 {
        Ok(1.0)
    } else {
        xi_for_rate(rate)
    }
}

fn circular_noise_from_rng(eta: f64, len: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let sd = (eta / 2.0).sqrt();
    (0..len)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(sd * re, sd * im)
        })
        .collect()
}

/// Spatially white circular Gaussian noise, `T × N` row-major, per-entry power `η`.
pub fn gen_circular_noise(eta: f64, n_sensors: usize, n_snapshots: usize, seed: u64) -> Result<Vec<Complex64>> {
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter(format!("noise power {eta} must be positive")));
    }
    Ok(circular_noise_from_rng(eta, n_sensors * n_snapshots, &mut stream_rng(seed, 0)))
}

/// `T` array snapshots together with their SOI / IN decomposition.
///
/// Storage is row-major `T × N`; `data[t] = soi_ref[t]·s + in_ref[t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotBatch {
    n_sensors: usize,
    steering: ComplexVector,
    data: Vec<Complex64>,
    soi_ref: Vec<Complex64>,
    in_ref: Vec<Complex64>,
}

impl SnapshotBatch {
    /// Assembles `x(t) = soi_ref(t)·s + in_ref(t)`.
    pub fn new(steering: ComplexVector, soi_ref: Vec<Complex64>, in_ref: Vec<Complex64>) -> Result<Self> {
        let n = steering.len();
        if n == 0 || in_ref.len() != soi_ref.len() * n {
            return Err(Error::DimensionMismatch(format!(
                "in_ref holds {} entries, expected {} snapshots × {} sensors",
                in_ref.len(),
                soi_ref.len(),
                n
            )));
        }
        let data = in_ref
            .chunks_exact(n)
            .zip(&soi_ref)
            .flat_map(|(v, &r)| v.iter().zip(steering.iter()).map(move |(&v, &s)| r * s + v))
            .collect();
        Ok(Self { n_sensors: n, steering, data, soi_ref, in_ref })
    }

    pub fn n_sensors(&self) -> usize {
        self.n_sensors
    }

    pub fn n_snapshots(&self) -> usize {
        self.soi_ref.len()
    }

    pub fn steering(&self) -> &ComplexVector {
        &self.steering
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn soi_ref(&self) -> &[Complex64] {
        &self.soi_ref
    }

    pub fn in_ref(&self) -> &[Complex64] {
        &self.in_ref
    }

    pub fn snapshot(&self, t: usize) -> &[Complex64] {
        &self.data[t * self.n_sensors..(t + 1) * self.n_sensors]
    }

    pub fn in_snapshot(&self, t: usize) -> &[Complex64] {
        &self.in_ref[t * self.n_sensors..(t + 1) * self.n_sensors]
    }

    /// Stream of sensor `k` across all snapshots.
    pub fn sensor_stream(&self, k: usize) -> Vec<Complex64> {
        self.data.iter().skip(k).step_by(self.n_sensors).copied().collect()
    }
}

/// Draws `T` snapshots of the scenario with zero carrier residues.
pub fn synthesize(sc: &ArrayScenario, n_snapshots: usize, seed: u64) -> Result<SnapshotBatch> {
    synthesize_mapped(sc, n_snapshots, seed, |z| z)
}

/// Like [`synthesize`], with every source waveform passed through the I/Q
/// imbalance `b ↦ (μb + νb*)/√(|μ|² + |ν|²)` before it reaches the array.
///
/// This is the absorbed model of an imbalanced front end: each source keeps
/// its power and picks up the noncircularity of [`iq_noncircularity`], while
/// the sensor noise stays circular.
pub fn synthesize_iq_absorbed(
    sc: &ArrayScenario,
    n_snapshots: usize,
    seed: u64,
    imb: IqImbalance,
) -> Result<SnapshotBatch> {
    let (mu, nu) = iq_mu_nu(imb);
    let norm = (mu.norm_sqr() + nu.norm_sqr()).sqrt();
    synthesize_mapped(sc, n_snapshots, seed, |z| (mu * z + nu * z.conj()) / norm)
}

fn synthesize_mapped(
    sc: &ArrayScenario,
    n_snapshots: usize,
    seed: u64,
    map: impl Fn(Complex64) -> Complex64,
) -> Result<SnapshotBatch> {
    sc.validate()?;
    let n = sc.n_sensors;
    let s = sc.soi_steering()?;
    let soi_nc = sc.soi_noncircularity();

    let soi_amp = Complex64::from_polar(sc.soi_power.sqrt(), sc.soi_phase);
    let soi_xi = xi_for_scenario_rate(soi_nc.rate)?;
    let soi_ref: Vec<Complex64> = uqpsk_from_rng(soi_xi, soi_nc.phase, n_snapshots, &mut stream_rng(seed, 0))
        .into_iter()
        .map(|z| soi_amp * map(z))
        .collect();

    let mut in_ref = circular_noise_from_rng(
        sc.noise_power,
        n * n_snapshots,
        &mut stream_rng(seed, sc.interferences.len() as u64 + 1),
    );

    let xi = xi_for_scenario_rate(sc.noncircularity.rate)?;
    for (p, (intf, j)) in sc.interferences.iter().zip(sc.interference_steering()?).enumerate() {
        let amp = Complex64::from_polar(intf.power.sqrt(), intf.carrier_phase);
        let symbols = uqpsk_from_rng(xi, sc.noncircularity.phase, n_snapshots, &mut stream_rng(seed, p as u64 + 1));
        for (row, m) in in_ref.chunks_exact_mut(n).zip(symbols) {
            let m = amp * map(m);
            for (v, jk) in row.iter_mut().zip(j.iter()) {
                *v += m * jk;
            }
        }
    }

    SnapshotBatch::new(s, soi_ref, in_ref)
}

/// Receiver gain / phase mismatch between the I and Q branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IqImbalance {
    pub g: f64,
    /// Phase error, radians.
    pub zeta: f64,
}

impl IqImbalance {
    pub fn new(g: f64, zeta: f64) -> Result<Self> {
        if !(g > 0.0) || !zeta.is_finite() {
            return Err(Error::InvalidParameter(format!("I/Q imbalance needs g > 0, got g = {g}, ζ = {zeta}")));
        }
        Ok(Self { g, zeta })
    }

    pub fn ideal() -> Self {
        Self { g: 1.0, zeta: 0.0 }
    }
}

/// `μ = (1 + g e^{−jζ})/2`, `ν = (1 − g e^{jζ})/2`.
pub fn iq_mu_nu(imb: IqImbalance) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let mu = (one + Complex64::from_polar(imb.g, -imb.zeta)) / 2.0;
    let nu = (one - Complex64::from_polar(imb.g, imb.zeta)) / 2.0;
    (mu, nu)
}

/// Noncircularity `2μν / (|μ|² + |ν|²)` an imbalanced front end imposes on a
/// circular input.
pub fn iq_noncircularity(imb: IqImbalance) -> Complex64 {
    let (mu, nu) = iq_mu_nu(imb);
    2.0 * mu * nu / (mu.norm_sqr() + nu.norm_sqr())
}

/// Applies `x ↦ μx + νx*` to every snapshot.
///
/// The SOI reference becomes `μ·soi_ref` and the mirrored SOI term
/// `ν·soi_ref*·s*` is folded into the IN reference, so the decomposition
/// against the original steering vector still holds.
pub fn apply_iq_imbalance(batch: &SnapshotBatch, imb: IqImbalance) -> SnapshotBatch {
    let (mu, nu) = iq_mu_nu(imb);
    let n = batch.n_sensors;
    let map = |z: &Complex64| mu * z + nu * z.conj();
    let data = batch.data.iter().map(map).collect();
    let soi_ref = batch.soi_ref.iter().map(|r| mu * r).collect();
    let in_ref = batch
        .in_ref
        .chunks_exact(n)
        .zip(&batch.soi_ref)
        .flat_map(|(v, r)| {
            let mirrored = nu * r.conj();
            v.iter().zip(batch.steering.iter()).map(move |(v, s)| map(v) + mirrored * s.conj())
        })
        .collect();
    SnapshotBatch { n_sensors: n, steering: batch.steering.clone(), data, soi_ref, in_ref }
}
