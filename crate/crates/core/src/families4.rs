//! Four-qubit PME states.
//!
//! Writing a four-qubit state as `½ Σ α_ijkl |ijkl⟩`, the two balanced
//! connected cuts (01|23 and 12|30) require the matrices
//!
//! ```text
//!     ⎛ α0000   0     0   α0011 ⎞          ⎛ α0000   0     0   α0110 ⎞
//! U = ⎜   0   α0101 α0110 α0111 ⎟      W = ⎜   0   α1010 α1100 α1110 ⎟
//!     ⎜   0   α1001 α1010 α1011 ⎟          ⎜   0   α0011 α0101 α0111 ⎟
//!     ⎝ α1100 α1101 α1110 α1111 ⎠          ⎝ α1001 α1011 α1101 α1111 ⎠
//! ```
//!
//! to be unitary simultaneously, where the zeros are the gauge positions
//! `α1000 = α0100 = α0010 = α0001 = 0` reachable by local basis changes.
//! Every solution falls into one of two families, which meet in a
//! one-parameter family of phased dimers. The classifier here replays that
//! case split on the zero pattern of the coefficients.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{input, PmeError, Result};
use crate::matrix::{ComplexMatrix, ZERO};
use crate::planar::verify_pme;
use crate::statevec::{PureState, UNITARY_TOL};

/// The sixteen `α_ijkl`, i.e. twice the amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct FourQubitCoefficients {
    alpha: [Complex64; 16],
}

/// Gauge positions that must vanish in canonical form.
pub const GAUGE_POSITIONS: [(&str, usize); 4] = [
    ("alpha_1000", 0b1000),
    ("alpha_0100", 0b0100),
    ("alpha_0010", 0b0010),
    ("alpha_0001", 0b0001),
];

// Short names for the twelve remaining coefficients.
const A: usize = 0b0000;
const B: usize = 0b0011;
const C: usize = 0b1100;
const D: usize = 0b1111;
const E: usize = 0b0101;
const F: usize = 0b0110;
const G: usize = 0b0111;
const H: usize = 0b1001;
const K: usize = 0b1010;
const L: usize = 0b1011;
const M: usize = 0b1101;
const N: usize = 0b1110;

impl FourQubitCoefficients {
    pub fn from_state(s: &PureState) -> Result<Self> {
        if s.num_sites() != 4 || s.local_dim() != 2 {
            return input(format!(
                "expected a four-qubit state, got n={} d={}",
                s.num_sites(),
                s.local_dim()
            ));
        }
        let mut alpha = [ZERO; 16];
        for (a, z) in alpha.iter_mut().zip(s.amplitudes()) {
            *a = z * 2.0;
        }
        Ok(FourQubitCoefficients { alpha })
    }

    pub fn from_alpha(alpha: [Complex64; 16]) -> Self {
        FourQubitCoefficients { alpha }
    }

    /// `α_ijkl` for bits `i, j, k, l`.
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.alpha[i << 3 | j << 2 | k << 1 | l]
    }

    pub fn as_array(&self) -> &[Complex64; 16] {
        &self.alpha
    }

    pub fn to_state(&self) -> PureState {
        let amps = self.alpha.iter().map(|a| a * 0.5).collect();
        PureState::new(4, 2, amps).expect("16 amplitudes")
    }

    fn at(&self, idx: usize) -> Complex64 {
        self.alpha[idx]
    }

    fn mag(&self, idx: usize) -> f64 {
        self.alpha[idx].norm()
    }
}

/// The coefficient matrices of the 01|23 cut (`U[ij][kl] = α_ijkl`) and of
/// the 12|30 cut (`W[li][jk] = α_ijkl`), read straight from the tensor.
pub fn uw_matrices(c: &FourQubitCoefficients) -> (ComplexMatrix, ComplexMatrix) {
    let mut u = ComplexMatrix::zeros(4, 4);
    let mut w = ComplexMatrix::zeros(4, 4);
    for idx in 0..16 {
        let (i, j, k, l) = (idx >> 3 & 1, idx >> 2 & 1, idx >> 1 & 1, idx & 1);
        u[(2 * i + j, 2 * k + l)] = c.alpha[idx];
        w[(2 * l + i, 2 * j + k)] = c.alpha[idx];
    }
    (u, w)
}

fn from_support(entries: &[(usize, Complex64)]) -> PureState {
    let mut alpha = [ZERO; 16];
    for &(idx, z) in entries {
        alpha[idx] = z;
    }
    FourQubitCoefficients::from_alpha(alpha).to_state()
}

/// `½[|0000⟩ + e^{iθ}|1010⟩ + e|0101⟩ + d|1111⟩ + g|0111⟩ + m|1101⟩]` with
/// `u2 = ((e, g), (m, d))` unitary.
pub fn family_a(theta: f64, u2: &ComplexMatrix) -> Result<PureState> {
    if u2.rows() != 2 || u2.cols() != 2 {
        return input("family A takes a 2x2 unitary");
    }
    u2.require_unitary(UNITARY_TOL, "family A block")?;
    Ok(from_support(&[
        (A, Complex64::new(1.0, 0.0)),
        (K, Complex64::from_polar(1.0, theta)),
        (E, u2[(0, 0)]),
        (G, u2[(0, 1)]),
        (M, u2[(1, 0)]),
        (D, u2[(1, 1)]),
    ]))
}

/// The five-angle family
/// `½cos φ [e^{iα}|0000⟩ + e^{-iα}|1111⟩ + e^{iβ}|0101⟩ + e^{-iβ}|1010⟩]
///  + ½sin φ [e^{iγ}|0011⟩ − e^{-iγ}|1100⟩ + e^{iδ}|0110⟩ − e^{-iδ}|1001⟩]`.
pub fn family_b(phi: f64, alpha: f64, beta: f64, gamma: f64, delta: f64) -> PureState {
    let (s, c) = phi.sin_cos();
    let p = |r: f64, angle: f64| Complex64::from_polar(r, angle);
    from_support(&[
        (A, p(c, alpha)),
        (D, p(c, -alpha)),
        (E, p(c, beta)),
        (K, p(c, -beta)),
        (B, p(s, gamma)),
        (C, -p(s, -gamma)),
        (F, p(s, delta)),
        (H, -p(s, -delta)),
    ])
}

/// `½[|0000⟩ + |1111⟩ + e^{iβ}|0101⟩ + e^{-iβ}|1010⟩]`, shared by both families.
pub fn psi_zero(beta: f64) -> PureState {
    from_support(&[
        (A, Complex64::new(1.0, 0.0)),
        (D, Complex64::new(1.0, 0.0)),
        (E, Complex64::from_polar(1.0, beta)),
        (K, Complex64::from_polar(1.0, -beta)),
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FamilyTag {
    #[serde(rename = "FamilyA")]
    FamilyA,
    /// Family A up to a cyclic relabeling of the sites.
    #[serde(rename = "FamilyA-shifted")]
    FamilyAShifted,
    #[serde(rename = "FamilyB")]
    FamilyB,
    #[serde(rename = "Intersection")]
    Intersection,
    /// PME, but outside every known zero pattern.
    #[serde(rename = "PME-unclassified")]
    PmeUnclassified,
    #[serde(rename = "NotPME")]
    NotPme,
}

impl FamilyTag {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyTag::FamilyA => "FamilyA",
            FamilyTag::FamilyAShifted => "FamilyA-shifted",
            FamilyTag::FamilyB => "FamilyB",
            FamilyTag::Intersection => "Intersection",
            FamilyTag::PmeUnclassified => "PME-unclassified",
            FamilyTag::NotPme => "NotPME",
        }
    }

    pub fn is_pme(self) -> bool {
        self != FamilyTag::NotPme
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Parameter {
    pub name: &'static str,
    pub value: f64,
}

/// Classification result with best-effort parameter recovery.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyClass {
    pub tag: FamilyTag,
    pub parameters: Vec<Parameter>,
}

impl FamilyClass {
    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters.iter().find(|p| p.name == name).map(|p| p.value)
    }
}

fn params(pairs: &[(&'static str, f64)]) -> Vec<Parameter> {
    pairs
        .iter()
        .map(|&(name, value)| Parameter { name, value })
        .collect()
}

/// Pushes the real and imaginary parts of a 2x2 block read off the
/// coefficients, after removing the global phase `phase`.
fn block_params(
    c: &FourQubitCoefficients,
    phase: Complex64,
    names: [(&'static str, &'static str); 4],
    idx: [usize; 4],
) -> Vec<Parameter> {
    let mut out = Vec::with_capacity(8);
    for ((re, im), i) in names.into_iter().zip(idx) {
        let z = c.at(i) * phase;
        out.push(Parameter { name: re, value: z.re });
        out.push(Parameter { name: im, value: z.im });
    }
    out
}

const U2_NAMES: [(&str, &str); 4] = [
    ("u00_re", "u00_im"),
    ("u01_re", "u01_im"),
    ("u10_re", "u10_im"),
    ("u11_re", "u11_im"),
];

/// Sorts a canonical-gauge four-qubit state into the two PME families.
///
/// The gauge coefficients must already vanish (within `tol`); bringing a
/// state into that gauge is left to the caller.
pub fn classify_four_qubit(s: &PureState, tol: f64) -> Result<FamilyClass> {
    let c = FourQubitCoefficients::from_state(s)?;
    for (name, idx) in GAUGE_POSITIONS {
        if c.mag(idx) > tol {
            return Err(PmeError::Precondition(format!(
                "state is not in canonical gauge: |{name}| = {:e} exceeds {tol:e}",
                c.mag(idx)
            )));
        }
    }

    let report = verify_pme(s, tol)?;
    if !report.overall_pass {
        return Ok(FamilyClass {
            tag: FamilyTag::NotPme,
            parameters: params(&[("max_deviation", report.max_deviation())]),
        });
    }

    let zero = |idx: usize| c.mag(idx) <= tol;
    // phase that makes alpha_0000 real and positive (when it is nonzero)
    let unphase = |idx: usize| {
        let z = c.at(idx);
        if z.norm() > tol {
            z.conj() / z.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    };

    if [B, C, F, G, H, L, M, N].into_iter().all(zero) {
        let ph = unphase(A);
        let arg = |idx: usize| (c.at(idx) * ph).arg();
        return Ok(FamilyClass {
            tag: FamilyTag::Intersection,
            parameters: params(&[
                ("beta", arg(E)),
                ("phase_1010", arg(K)),
                ("phase_1111", arg(D)),
            ]),
        });
    }

    if zero(C) {
        let ph = unphase(A);
        if !zero(G) && [B, F, H, L, N].into_iter().all(zero) {
            let mut p = params(&[("theta", (c.at(K) * ph).arg())]);
            p.extend(block_params(&c, ph, U2_NAMES, [E, G, M, D]));
            return Ok(FamilyClass {
                tag: FamilyTag::FamilyA,
                parameters: p,
            });
        }
        if zero(G) && [B, F, H, M].into_iter().all(zero) {
            let mut p = params(&[("theta", (c.at(E) * ph).arg())]);
            p.extend(block_params(&c, ph, U2_NAMES, [K, N, L, D]));
            return Ok(FamilyClass {
                tag: FamilyTag::FamilyAShifted,
                parameters: p,
            });
        }
    } else if !zero(B) && [G, L, M, N].into_iter().all(zero) {
        return Ok(FamilyClass {
            tag: FamilyTag::FamilyB,
            parameters: family_b_parameters(&c, tol),
        });
    }

    Ok(FamilyClass {
        tag: FamilyTag::PmeUnclassified,
        parameters: Vec::new(),
    })
}

/// Recovers `(φ, α, β, γ, δ)` with `φ ∈ [0, π/2]`; the global phase is fixed
/// from `a·d` (or `−b·c` when the cosine part vanishes), so angles are
/// determined up to a common shift by π.
fn family_b_parameters(c: &FourQubitCoefficients, tol: f64) -> Vec<Parameter> {
    let cos = (c.mag(A) + c.mag(D) + c.mag(E) + c.mag(K)) / 4.0;
    let sin = (c.mag(B) + c.mag(C) + c.mag(F) + c.mag(H)) / 4.0;
    let phi = sin.atan2(cos);
    let chi = if cos > tol {
        (c.at(A) * c.at(D)).arg() / 2.0
    } else {
        (-c.at(B) * c.at(C)).arg() / 2.0
    };
    let angle = |idx: usize| {
        if c.mag(idx) > tol {
            (c.at(idx) * Complex64::from_polar(1.0, -chi)).arg()
        } else {
            0.0
        }
    };
    params(&[
        ("phi", phi),
        ("alpha", angle(A)),
        ("beta", angle(E)),
        ("gamma", angle(B)),
        ("delta", angle(F)),
    ])
}
