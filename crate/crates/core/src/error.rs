use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JnrError {
    #[error("invalid JNR data: {0}")]
    InvalidData(String),
    #[error("poles {0} and {1} coincide within tau_sep")]
    DuplicatePoles(usize, usize),
    #[error("coefficient matrix must be {expected}x{expected}, got {rows} rows")]
    Shape { expected: usize, rows: usize },
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("anti-diagonal profile has imaginary residue {residue:.3e} at sample {sample}")]
    ImaginaryResidue { sample: usize, residue: f64 },
    #[error("section denominator vanishes off the spectral curve")]
    PoleOffCurve,
    #[error("recovered weight squared {value:.6e} at pole {index} is not positive")]
    NegativeWeight { index: usize, value: f64 },
    #[error("poles do not form a grid on the curve (defect {defect:.3e})")]
    GridMismatch { defect: f64 },
    #[error("no grid found after {seeds_tried} seeds (best defect {best_defect:.3e})")]
    NoGridFound { seeds_tried: usize, best_defect: f64 },
    #[error("scattering numerator failed to cancel degrees (residue {residue:.3e})")]
    DegreeCancellationFailure { residue: f64 },
    #[error("rational maps have incompatible degrees")]
    IncompatibleDegrees,
    #[error("rotation sends pole {0} to infinity")]
    PoleAtInfinity(usize),
    #[error("poles {0} and {1} are antipodal")]
    AntipodalDegeneracy(usize, usize),
    #[error("requested raster {nx}x{ny} exceeds the resource limit")]
    ResourceLimit { nx: usize, ny: usize },
    #[error("quadrature did not converge: estimates {coarse} and {fine} differ by {relative:.3e}")]
    QuadratureNonconvergence { coarse: f64, fine: f64, relative: f64 },
    #[error("rotation parameters are not unit: |a|^2+|b|^2 = {0}")]
    NonUnitRotation(f64),
}

pub type Result<T, E = JnrError> = std::result::Result<T, E>;
