/// Every numerical threshold used by validation and by the measure module.
///
/// Property tests tighten or loosen these uniformly; the command line exposes
/// them through `--tol-override name=value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// |‖v‖ − 1| allowed for fixed-point and basis states.
    pub normalization: f64,
    /// Max deviation of a basis Gram matrix from the identity.
    pub orthonormality: f64,
    /// Relative Frobenius residual ‖M − M†‖ / max(1, ‖M‖).
    pub hermiticity: f64,
    /// ‖U†U − I‖_F.
    pub unitarity: f64,
    /// Largest imaginary part of ΔΨ accepted before truncation.
    pub realness: f64,
    /// ΔΨ below −negativity is rejected.
    pub negativity: f64,
    /// Normalizers at or below this are degenerate.
    pub degenerate: f64,
    /// |Σ measures − 1|.
    pub measure_sum: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            normalization: 1e-12,
            orthonormality: 1e-10,
            hermiticity: 1e-12,
            unitarity: 1e-10,
            realness: 1e-9,
            negativity: 1e-12,
            degenerate: 1e-14,
            measure_sum: 1e-10,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 8] = [
        "normalization",
        "orthonormality",
        "hermiticity",
        "unitarity",
        "realness",
        "negativity",
        "degenerate",
        "measure_sum",
    ];

    /// Overrides one named tolerance. Returns `false` for an unknown name.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "normalization" => &mut self.normalization,
            "orthonormality" => &mut self.orthonormality,
            "hermiticity" => &mut self.hermiticity,
            "unitarity" => &mut self.unitarity,
            "realness" => &mut self.realness,
            "negativity" => &mut self.negativity,
            "degenerate" => &mut self.degenerate,
            "measure_sum" => &mut self.measure_sum,
            _ => return false,
        };
        *slot = value;
        true
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "normalization" => self.normalization,
            "orthonormality" => self.orthonormality,
            "hermiticity" => self.hermiticity,
            "unitarity" => self.unitarity,
            "realness" => self.realness,
            "negativity" => self.negativity,
            "degenerate" => self.degenerate,
            "measure_sum" => self.measure_sum,
            _ => return None,
        })
    }
}
