//! Capon and widely linear MVDR weights, filtering and output IN extraction.
//!
//! A beamformer output is `y(t) = ω₁ᴴx(t) + ω₂ᴴx*(t)`; strictly linear
//! weights carry `ω₂ = 0`.

use num_complex::Complex64;

use crate::linalg::{hdot, hermitian_solve, invert_2x2, ComplexMatrix, ComplexVector};
use crate::signal::SnapshotBatch;
use crate::stats::{augment, SecondOrderStats};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BeamKind {
    StrictlyLinear,
    WidelyLinear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamWeights {
    pub kind: BeamKind,
    pub w1: ComplexVector,
    pub w2: ComplexVector,
}

impl BeamWeights {
    pub fn n(&self) -> usize {
        self.w1.len()
    }

    /// Stacked `[ω₁; ω₂]`.
    pub fn augmented(&self) -> ComplexVector {
        self.w1.iter().chain(self.w2.iter()).copied().collect()
    }

    /// Largest violation of the distortionless constraints: `|ω₁ᴴs − 1|`,
    /// and for widely linear weights also `|ω₂ᴴs*|`.
    pub fn constraint_residual(&self, s: &ComplexVector) -> Result<f64> {
        let distortion = (self.w1.dot(s)? - 1.0).norm();
        Ok(match self.kind {
            BeamKind::StrictlyLinear => distortion,
            BeamKind::WidelyLinear => distortion.max(self.w2.dot(&s.conj())?.norm()),
        })
    }

    /// `ω₁ᴴz + ω₂ᴴz*` for one snapshot.
    pub fn apply(&self, z: &[Complex64]) -> Complex64 {
        let conj_part: Complex64 = self.w2.iter().zip(z).map(|(w, z)| (w * z).conj()).sum();
        hdot(&self.w1, z) + conj_part
    }
}

/// `ω = R⁻¹s / (sᴴR⁻¹s)`.
pub fn capon_weights(stats: &SecondOrderStats, s: &ComplexVector) -> Result<BeamWeights> {
    let u = hermitian_solve(stats.r(), s)?;
    let denom = s.dot(&u)?;
    Ok(BeamWeights { kind: BeamKind::StrictlyLinear, w1: u.scale(denom.inv()), w2: ComplexVector::zeros(s.len()) })
}

/// `ω̃ = R̃⁻¹S (SᴴR̃⁻¹S)⁻¹ f` with `S = [[s, 0], [0, s*]]` and `f = [1, 0]ᵀ`.
pub fn wl_mvdr_weights(stats: &SecondOrderStats, s: &ComplexVector) -> Result<BeamWeights> {
    let n = s.len();
    if stats.n() != n {
        return Err(Error::DimensionMismatch(format!("statistics are {}-dimensional, steering has {n}", stats.n())));
    }
    let (r_aug, _) = augment(stats);
    let zero = Complex64::new(0.0, 0.0);
    let s1: Vec<Complex64> = s.iter().copied().chain(std::iter::repeat_n(zero, n)).collect();
    let s2: Vec<Complex64> = std::iter::repeat_n(zero, n).chain(s.iter().map(|z| z.conj())).collect();
    let z1 = hermitian_solve(&r_aug, &s1)?;
    let z2 = hermitian_solve(&r_aug, &s2)?;
    let gram = ComplexMatrix::new(2, 2, vec![hdot(&s1, &z1), hdot(&s1, &z2), hdot(&s2, &z1), hdot(&s2, &z2)])?;
    let g = invert_2x2(&gram)?;
    let (c1, c2) = (g[(0, 0)], g[(1, 0)]);
    let w: Vec<Complex64> = z1.iter().zip(z2.iter()).map(|(a, b)| a * c1 + b * c2).collect();
    Ok(BeamWeights {
        kind: BeamKind::WidelyLinear,
        w1: w[..n].iter().copied().collect(),
        w2: w[n..].iter().copied().collect(),
    })
}

fn check_dims(batch: &SnapshotBatch, w: &BeamWeights) -> Result<()> {
    if batch.n_sensors() != w.n() || w.w2.len() != w.n() {
        return Err(Error::DimensionMismatch(format!(
            "batch has {} sensors, weights have {}",
            batch.n_sensors(),
            w.n()
        )));
    }
    Ok(())
}

/// Beamformer output `y(t)` on the observed snapshots.
pub fn filter(batch: &SnapshotBatch, w: &BeamWeights) -> Result<Vec<Complex64>> {
    check_dims(batch, w)?;
    Ok(batch.data().chunks_exact(w.n()).map(|x| w.apply(x)).collect())
}

/// Output interference-plus-noise `q(t)`, the beamformer applied to the IN reference.
pub fn output_in(batch: &SnapshotBatch, w: &BeamWeights) -> Result<Vec<Complex64>> {
    check_dims(batch, w)?;
    Ok(batch.in_ref().chunks_exact(w.n()).map(|v| w.apply(v)).collect())
}
