//! Dense pure states of `n` qudits of local dimension `d`.
//!
//! Amplitudes are stored in mixed-radix order with site 0 as the most
//! significant digit, so the ket `|x_0, x_1, ..., x_{n-1}⟩` sits at index
//! `x_0 d^{n-1} + ... + x_{n-1}`.

use num_complex::Complex64;

use crate::error::{input, Result};
use crate::matrix::{ComplexMatrix, ZERO};

/// Amplitudes below this modulus count as zero when fixing the global phase.
pub const PHASE_THRESHOLD: f64 = 1e-12;

/// Unitarity tolerance for matrices handed to [`apply_local_unitary`].
pub const UNITARY_TOL: f64 = 1e-10;

/// A normalized (or at least nonzero) state vector of an `n`-site register.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    d: usize,
    amps: Vec<Complex64>,
}

/// `d^n`, or an error when it does not fit in memory-addressable range.
pub fn register_len(n: usize, d: usize) -> Result<usize> {
    u32::try_from(n)
        .ok()
        .and_then(|n| d.checked_pow(n))
        .filter(|&len| len <= 1 << 28)
        .map_or_else(
            || input(format!("register of {n} sites with d={d} is too large")),
            Ok,
        )
}

/// Mixed-radix index of `digits` (site 0 most significant).
pub fn index_of(d: usize, digits: &[usize]) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

/// Inverse of [`index_of`] for a register of `n` sites.
pub fn digits_of(d: usize, n: usize, mut index: usize) -> Vec<usize> {
    let mut digits = vec![0; n];
    for slot in digits.iter_mut().rev() {
        *slot = index % d;
        index /= d;
    }
    digits
}

/// Offsets into the full amplitude vector for every local basis index of
/// `sites`, where `sites[0]` is the most significant local digit.
pub(crate) fn site_offsets(n: usize, d: usize, sites: &[usize]) -> Vec<usize> {
    let strides: Vec<usize> = sites.iter().map(|&s| d.pow((n - 1 - s) as u32)).collect();
    let local = d.pow(sites.len() as u32);
    (0..local)
        .map(|m| {
            let mut rest = m;
            let mut off = 0;
            for &stride in strides.iter().rev() {
                off += (rest % d) * stride;
                rest /= d;
            }
            off
        })
        .collect()
}

/// Sites in `0..n` not listed in `sites`, ascending.
pub(crate) fn other_sites(n: usize, sites: &[usize]) -> Vec<usize> {
    (0..n).filter(|s| !sites.contains(s)).collect()
}

pub(crate) fn check_sites(n: usize, sites: &[usize]) -> Result<()> {
    for (i, &s) in sites.iter().enumerate() {
        if s >= n {
            return input(format!("site {s} out of range for {n} sites"));
        }
        if sites[..i].contains(&s) {
            return input(format!("site {s} listed twice"));
        }
    }
    Ok(())
}

impl PureState {
    pub fn new(n: usize, d: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return input("a register needs at least one site");
        }
        if d < 2 {
            return input(format!("local dimension must be at least 2, got {d}"));
        }
        let len = register_len(n, d)?;
        if amps.len() != len {
            return input(format!(
                "expected {len} amplitudes for n={n}, d={d}, got {}",
                amps.len()
            ));
        }
        Ok(PureState { n, d, amps })
    }

    #[inline]
    pub fn num_sites(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn local_dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// Amplitude of the basis ket with the given digits.
    pub fn amplitude(&self, digits: &[usize]) -> Complex64 {
        self.amps[index_of(self.d, digits)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<PureState> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return input("cannot normalize the zero vector");
        }
        Ok(self.map(|z| z / norm))
    }

    pub(crate) fn map(&self, f: impl Fn(Complex64) -> Complex64) -> PureState {
        PureState {
            n: self.n,
            d: self.d,
            amps: self.amps.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Relabels sites cyclically: site `i` of the result carries what was
    /// site `(i + shift) mod n` of `self`.
    pub fn rotate_sites(&self, shift: usize) -> PureState {
        let n = self.n;
        let order: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let offsets = site_offsets(n, self.d, &order);
        PureState {
            n,
            d: self.d,
            amps: offsets.iter().map(|&k| self.amps[k]).collect(),
        }
    }

    fn same_shape(&self, other: &PureState) -> Result<()> {
        if (self.n, self.d) != (other.n, other.d) {
            return input(format!(
                "shape mismatch: (n={}, d={}) vs (n={}, d={})",
                self.n, self.d, other.n, other.d
            ));
        }
        Ok(())
    }
}

/// Computational basis ket `|digits⟩`.
pub fn basis_state(n: usize, d: usize, digits: &[usize]) -> Result<PureState> {
    if digits.len() != n {
        return input(format!("expected {n} digits, got {}", digits.len()));
    }
    if let Some(&x) = digits.iter().find(|&&x| x >= d) {
        return input(format!("digit {x} out of range for d={d}"));
    }
    let mut amps = vec![ZERO; register_len(n, d)?];
    amps[index_of(d, digits)] = Complex64::new(1.0, 0.0);
    PureState::new(n, d, amps)
}

/// `a ⊗ b`, with the sites of `a` first.
pub fn tensor_product(a: &PureState, b: &PureState) -> Result<PureState> {
    if a.d != b.d {
        return input(format!("local dimensions differ: {} vs {}", a.d, b.d));
    }
    let mut amps = Vec::with_capacity(a.amps.len() * b.amps.len());
    for &x in &a.amps {
        amps.extend(b.amps.iter().map(|&y| x * y));
    }
    PureState::new(a.n + b.n, a.d, amps)
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner_product(a: &PureState, b: &PureState) -> Result<Complex64> {
    a.same_shape(b)?;
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// Applies `u` to the listed sites. The listed order is the digit order of
/// `u`'s row and column index, first site most significant.
pub fn apply_local_unitary(
    s: &PureState,
    sites: &[usize],
    u: &ComplexMatrix,
) -> Result<PureState> {
    check_sites(s.n, sites)?;
    if sites.is_empty() {
        return input("no sites given");
    }
    let local = register_len(sites.len(), s.d)?;
    if u.rows() != local || u.cols() != local {
        return input(format!(
            "operator is {}x{}, expected {local}x{local}",
            u.rows(),
            u.cols()
        ));
    }
    u.require_unitary(UNITARY_TOL, "operator")?;
    Ok(apply_unchecked(s, sites, u))
}

/// [`apply_local_unitary`] without the unitarity check, for callers that
/// have already validated `u` (or deliberately apply a non-unitary map).
pub(crate) fn apply_unchecked(s: &PureState, sites: &[usize], u: &ComplexMatrix) -> PureState {
    let offsets = site_offsets(s.n, s.d, sites);
    let rest = other_sites(s.n, sites);
    let bases = site_offsets(s.n, s.d, &rest);
    let mut out = vec![ZERO; s.amps.len()];
    let mut local = vec![ZERO; offsets.len()];
    for &base in &bases {
        for (slot, &off) in local.iter_mut().zip(&offsets) {
            *slot = s.amps[base + off];
        }
        for (v, &off) in u.apply(&local).into_iter().zip(&offsets) {
            out[base + off] = v;
        }
    }
    PureState {
        n: s.n,
        d: s.d,
        amps: out,
    }
}

/// Multiplies by the unit-modulus scalar that makes the first amplitude with
/// modulus above [`PHASE_THRESHOLD`] real and positive.
pub fn global_phase_canonical(s: &PureState) -> Result<PureState> {
    let Some(at) = s.amps.iter().position(|z| z.norm() > PHASE_THRESHOLD) else {
        return input("cannot fix the phase of a zero vector");
    };
    let lead = s.amps[at];
    let phase = lead.conj() / lead.norm();
    let mut out = s.map(|z| z * phase);
    out.amps[at] = Complex64::new(lead.norm(), 0.0);
    Ok(out)
}

/// `|⟨a|b⟩|² / (⟨a|a⟩⟨b|b⟩)`.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    let overlap = inner_product(a, b)?.norm_sqr();
    let norms = a.norm_sqr() * b.norm_sqr();
    if norms == 0.0 {
        return input("fidelity of a zero vector");
    }
    Ok((overlap / norms).min(1.0))
}
