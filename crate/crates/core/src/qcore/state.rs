use num_complex::Complex64;

use super::eigen::{eigh, Eigen};
use super::matrix::ComplexMatrix;
use super::QcoreError;

/// Default tolerance for the Hermitian, positivity and trace checks.
pub const STATE_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as zero in square roots and generalized inverses.
pub const EIG_CUTOFF: f64 = 1e-12;

/// A validated density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, QcoreError> {
        Self::with_tolerance(matrix, STATE_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self, QcoreError> {
        if !matrix.is_square() {
            return Err(QcoreError::NotSquare(matrix.rows(), matrix.cols()));
        }
        let defect = matrix.hermiticity_defect();
        if defect > tol {
            return Err(QcoreError::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(QcoreError::Trace(tr.re));
        }
        let min = eigh(&matrix).values.first().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(QcoreError::NotPositive(min));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// Diagonal state from a probability vector.
    pub fn classical(probs: &[f64]) -> Result<Self, QcoreError> {
        Self::new(ComplexMatrix::diagonal(probs))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> Eigen {
        eigh(&self.matrix)
    }

    /// Convex combination `w·self + (1−w)·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self, QcoreError> {
        check_dims(self, other)?;
        Ok(Self {
            matrix: &self.matrix.scale(w) + &other.matrix.scale(1.0 - w),
        })
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Self {
        Self {
            matrix: u.matmul(&self.matrix).matmul(&u.adjoint()).hermitian_part(),
        }
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.kron(&other.matrix),
        }
    }
}

/// Unit vector in a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, QcoreError> {
        Self::with_tolerance(amplitudes, STATE_TOL)
    }

    pub fn with_tolerance(amplitudes: Vec<Complex64>, tol: f64) -> Result<Self, QcoreError> {
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QcoreError::NonFinite);
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol {
            return Err(QcoreError::Norm(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self, QcoreError> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QcoreError::Norm(norm));
        }
        for z in amplitudes.iter_mut() {
            *z /= norm;
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            matrix: ComplexMatrix::outer(&self.amplitudes),
        }
    }
}

/// Local dimensions of a multipartite system, first factor most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemSpec {
    dims: Vec<usize>,
}

impl SubsystemSpec {
    pub fn new(dims: Vec<usize>) -> Result<Self, QcoreError> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(QcoreError::Subsystems(format!("{dims:?}")));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Splits a flat index into per-subsystem digits.
    pub fn digits(&self, mut idx: usize, out: &mut [usize]) {
        for k in (0..self.dims.len()).rev() {
            out[k] = idx % self.dims[k];
            idx /= self.dims[k];
        }
    }
}

fn check_dims(a: &DensityOperator, b: &DensityOperator) -> Result<(), QcoreError> {
    if a.dim() != b.dim() {
        return Err(QcoreError::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(())
}

/// Reduced state on the subsystems listed in `keep` (order preserved as in `spec`).
pub fn partial_trace(
    rho: &DensityOperator,
    spec: &SubsystemSpec,
    keep: &[usize],
) -> Result<DensityOperator, QcoreError> {
    if spec.total_dim() != rho.dim() {
        return Err(QcoreError::DimensionMismatch(spec.total_dim(), rho.dim()));
    }
    let dims = spec.dims();
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(QcoreError::Subsystems(format!("keep {keep:?}")));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let kept_dim: usize = kept.iter().map(|&k| dims[k]).product();

    let n = rho.dim();
    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    let mut di = vec![0; dims.len()];
    let mut dj = vec![0; dims.len()];
    let m = rho.matrix();
    for i in 0..n {
        spec.digits(i, &mut di);
        for j in 0..n {
            spec.digits(j, &mut dj);
            let traced_equal = (0..dims.len()).filter(|k| !kept.contains(k)).all(|k| di[k] == dj[k]);
            if !traced_equal {
                continue;
            }
            let (mut ri, mut rj) = (0, 0);
            for &k in &kept {
                ri = ri * dims[k] + di[k];
                rj = rj * dims[k] + dj[k];
            }
            out[(ri, rj)] += m[(i, j)];
        }
    }
    Ok(DensityOperator {
        matrix: out.hermitian_part(),
    })
}

/// `√A` of a positive semidefinite Hermitian matrix; eigenvalues below the cutoff become zero.
pub fn sqrt_psd(a: &ComplexMatrix) -> ComplexMatrix {
    eigh(a).apply(|x| if x > EIG_CUTOFF { x.sqrt() } else { 0.0 })
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn trace_norm_hermitian(a: &ComplexMatrix) -> f64 {
    eigh(a).values.iter().map(|v| v.abs()).sum()
}

/// Fidelity `F(ρ,σ) = ‖√ρ√σ‖₁`, clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64, QcoreError> {
    check_dims(rho, sigma)?;
    let s = sqrt_psd(rho.matrix());
    // ‖√ρ√σ‖₁ = Tr √(√ρ σ √ρ). Rank-deficient inputs leave eigenvalues of
    // rounding size, whose square roots would otherwise add ~1e-8 each.
    let inner = s.matmul(sigma.matrix()).matmul(&s);
    let f: f64 = eigh(&inner)
        .values
        .iter()
        .map(|&x| if x > EIG_CUTOFF { x.sqrt() } else { 0.0 })
        .sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `‖ρ − σ‖₁`, in `[0, 2]`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64, QcoreError> {
    check_dims(rho, sigma)?;
    let d = trace_norm_hermitian(&(rho.matrix() - sigma.matrix()));
    Ok(d.clamp(0.0, 2.0))
}

/// Purified distance `√(1 − F²)`.
pub fn purified_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64, QcoreError> {
    let f = fidelity(rho, sigma)?;
    Ok((1.0 - f * f).max(0.0).sqrt())
}

/// `‖|ψ⟩⟨ψ| − |φ⟩⟨φ|‖₁ = 2√(1 − |⟨ψ|φ⟩|²)`.
///
/// The factor 2 is the trace-norm normalization used throughout this crate; some
/// presentations drop it for the pure-state case.
pub fn pure_trace_distance(psi: &PureState, phi: &PureState) -> f64 {
    2.0 * (1.0 - psi.inner(phi).norm_sqr()).max(0.0).sqrt()
}
