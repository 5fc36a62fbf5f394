//! Second-order statistics of the total noise (interference plus noise).

use num_complex::Complex64;

use crate::linalg::{ComplexMatrix, Lu, HERMITIAN_TOL};
use crate::scenario::ArrayScenario;
use crate::{Error, Result};

/// Covariance `R`, complementary covariance `C` and the blocks `A`, `D` of
///
/// ```text
/// [[R, C], [C*, R*]]⁻¹ = [[A, D], [D*, A*]]
/// ```
///
/// with `A = (R − C R*⁻¹ C*)⁻¹` and `D = −A C R*⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderStats {
    r: ComplexMatrix,
    c: ComplexMatrix,
    a: ComplexMatrix,
    d: ComplexMatrix,
}

impl SecondOrderStats {
    pub fn from_r_c(r: ComplexMatrix, c: ComplexMatrix) -> Result<Self> {
        let n = r.rows();
        if !r.is_square() || c.rows() != n || c.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "R is {}×{}, C is {}×{}",
                r.rows(),
                r.cols(),
                c.rows(),
                c.cols()
            )));
        }
        let dev = r.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        if c.symmetric_deviation() > HERMITIAN_TOL {
            return Err(Error::InvalidParameter("complementary covariance is not symmetric".into()));
        }

        let r_conj_inv = Lu::factor(&r.conj())?.inverse();
        let c_rci = c.matmul(&r_conj_inv)?;
        let schur = r.sub(&c_rci.matmul(&c.conj())?)?;
        let a = Lu::factor(&schur)?.inverse();
        let d = a.matmul(&c_rci)?.scale(Complex64::new(-1.0, 0.0));
        Ok(Self { r, c, a, d })
    }

    pub fn n(&self) -> usize {
        self.r.rows()
    }

    pub fn r(&self) -> &ComplexMatrix {
        &self.r
    }

    pub fn c(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }

    /// `[[A, D], [D*, A*]]`, the inverse of the augmented covariance.
    pub fn augmented_inverse(&self) -> ComplexMatrix {
        ComplexMatrix::from_blocks(&self.a, &self.d, &self.d.conj(), &self.a.conj())
            .expect("blocks share one dimension")
    }

    /// `[[D*, A*], [A, D]]`, the inverse of the augmented complementary covariance.
    pub fn augmented_complementary_inverse(&self) -> ComplexMatrix {
        ComplexMatrix::from_blocks(&self.d.conj(), &self.a.conj(), &self.a, &self.d)
            .expect("blocks share one dimension")
    }
}

/// Sample `R = ⟨v vᴴ⟩`, `C = ⟨v vᵀ⟩` of a row-major `T × N` sequence,
/// averaged with divisor `T`.
pub fn estimate_in_stats(in_ref: &[Complex64], n_sensors: usize) -> Result<SecondOrderStats> {
    if n_sensors == 0 || !in_ref.len().is_multiple_of(n_sensors) {
        return Err(Error::DimensionMismatch(format!(
            "{} samples do not split into {n_sensors}-vectors",
            in_ref.len()
        )));
    }
    let t = in_ref.len() / n_sensors;
    if t < 2 * n_sensors {
        return Err(Error::InvalidParameter(format!("{t} snapshots; need at least {}", 2 * n_sensors)));
    }
    let n = n_sensors;
    let mut r = vec![Complex64::new(0.0, 0.0); n * n];
    let mut c = vec![Complex64::new(0.0, 0.0); n * n];
    for v in in_ref.chunks_exact(n) {
        for i in 0..n {
            let vi = v[i];
            for j in i..n {
                r[i * n + j] += vi * v[j].conj();
                c[i * n + j] += vi * v[j];
            }
        }
    }
    let inv_t = 1.0 / t as f64;
    for i in 0..n {
        for j in i..n {
            let (rij, cij) = (r[i * n + j] * inv_t, c[i * n + j] * inv_t);
            r[i * n + j] = rij;
            c[i * n + j] = cij;
            r[j * n + i] = rij.conj();
            c[j * n + i] = cij;
        }
        r[i * n + i].im = 0.0;
    }
    SecondOrderStats::from_r_c(ComplexMatrix::new(n, n, r)?, ComplexMatrix::new(n, n, c)?)
}

/// Exact `R = Σ π_p j_p j_pᴴ + ηI` and `C = Σ π_p γ e^{j2φ_p} j_p j_pᵀ`.
pub fn population_in_stats(sc: &ArrayScenario) -> Result<SecondOrderStats> {
    sc.validate()?;
    let n = sc.n_sensors;
    let gamma = sc.noncircularity.coefficient();
    let mut r = ComplexMatrix::identity(n).scale(Complex64::new(sc.noise_power, 0.0));
    let mut c = ComplexMatrix::zeros(n, n);
    for (intf, j) in sc.interferences.iter().zip(sc.interference_steering()?) {
        let jc = j.conj();
        r = r.add(&ComplexMatrix::outer(&j, &jc).scale(Complex64::new(intf.power, 0.0)))?;
        let weight = gamma * Complex64::from_polar(intf.power, 2.0 * intf.carrier_phase);
        c = c.add(&ComplexMatrix::outer(&j, &j).scale(weight))?;
    }
    SecondOrderStats::from_r_c(r, c)
}

/// Augmented covariance `[[R, C], [C*, R*]]` and complementary
/// `[[C, R], [R*, C*]]`.
pub fn augment(stats: &SecondOrderStats) -> (ComplexMatrix, ComplexMatrix) {
    let (r, c) = (&stats.r, &stats.c);
    let (rc, cc) = (r.conj(), c.conj());
    let r_aug = ComplexMatrix::from_blocks(r, c, &cc, &rc).expect("blocks share one dimension");
    let c_aug = ComplexMatrix::from_blocks(c, r, &rc, &cc).expect("blocks share one dimension");
    (r_aug, c_aug)
}

/// `⟨z²⟩ / ⟨|z|²⟩`.
pub fn scalar_noncircularity(series: &[Complex64]) -> Result<Complex64> {
    let power: f64 = series.iter().map(|z| z.norm_sqr()).sum();
    if !(power > 0.0) {
        return Err(Error::ZeroPower);
    }
    Ok(series.iter().map(|z| z * z).sum::<Complex64>() / power)
}
