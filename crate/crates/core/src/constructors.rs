//! PME constructions for any even number of qudits and any dimension:
//! Bell dimers across antipodal sites, dressed by chains of controlled-power
//! gates.
//!
//! Sites are 0-based. For a `2n`-site register the dimer pairs site `k` with
//! site `k + n`, and the gate chain runs over the second half
//! `n, n+1, ..., 2n-1`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{input, Result};
use crate::matrix::{ComplexMatrix, ZERO};
use crate::statevec::{apply_unchecked, check_sites, register_len, PureState, UNITARY_TOL};

/// `(1/√d) Σ_i |i, i, ..., i⟩` on `n` sites.
pub fn ghz(n: usize, d: usize) -> Result<PureState> {
    if d < 2 {
        return input(format!("local dimension must be at least 2, got {d}"));
    }
    let len = register_len(n, d)?;
    let mut amps = vec![ZERO; len];
    // |i,...,i⟩ sits at i·(1 + d + ... + d^{n-1})
    let step = (len - 1) / (d - 1);
    let a = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        amps[i * step] = a;
    }
    PureState::new(n, d, amps)
}

/// `(1/√d) Σ_i |i, i⟩`.
pub fn bell_pair(d: usize) -> Result<PureState> {
    ghz(2, d)
}

/// Bell pairs on `(k, k + n)` for `k < n`: amplitude `d^{-n/2}` wherever the
/// first `n` digits repeat as the last `n`.
pub fn dimerized_bell(n: usize, d: usize) -> Result<PureState> {
    if n == 0 {
        return input("dimerized Bell state needs at least one pair");
    }
    if d < 2 {
        return input(format!("local dimension must be at least 2, got {d}"));
    }
    let half = register_len(n, d)?;
    let mut amps = vec![ZERO; register_len(2 * n, d)?];
    let a = Complex64::new((half as f64).sqrt().recip(), 0.0);
    for k in 0..half {
        amps[k * half + k] = a;
    }
    PureState::new(2 * n, d, amps)
}

/// Controlled-power gate `|i⟩|j⟩ ↦ |i⟩ U^i |j⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    control: usize,
    target: usize,
    u: ComplexMatrix,
}

pub fn controlled_power_gate(control: usize, target: usize, u: ComplexMatrix) -> Result<Gate> {
    if control == target {
        return input(format!("control and target are both site {control}"));
    }
    u.require_unitary(UNITARY_TOL, "gate unitary")?;
    if u.rows() < 2 {
        return input("gate unitary must act on at least two levels");
    }
    Ok(Gate { control, target, u })
}

impl Gate {
    pub fn control(&self) -> usize {
        self.control
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn local_dim(&self) -> usize {
        self.u.rows()
    }

    /// `U^i`, built by repeated multiplication.
    pub fn power(&self, i: usize) -> ComplexMatrix {
        self.u.pow(i)
    }

    /// The `d² × d²` matrix on (control, target), control digit first.
    pub fn matrix(&self) -> ComplexMatrix {
        let d = self.local_dim();
        let mut m = ComplexMatrix::zeros(d * d, d * d);
        let mut p = ComplexMatrix::identity(d);
        for i in 0..d {
            for r in 0..d {
                for c in 0..d {
                    m[(i * d + r, i * d + c)] = p[(r, c)];
                }
            }
            p = p.matmul(&self.u);
        }
        m
    }

    /// `Λ(U)⁻¹ = Λ(U†)`.
    pub fn inverse(&self) -> Gate {
        Gate {
            control: self.control,
            target: self.target,
            u: self.u.adjoint(),
        }
    }
}

/// Gates applied in list order, first gate first.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_sites: usize,
    d: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_sites: usize, d: usize) -> Circuit {
        Circuit {
            n_sites,
            d,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        check_sites(self.n_sites, &[gate.control, gate.target])?;
        if gate.local_dim() != self.d {
            return input(format!(
                "gate acts on d={}, circuit has d={}",
                gate.local_dim(),
                self.d
            ));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn num_sites(&self) -> usize {
        self.n_sites
    }

    /// Reversed order with every gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_sites: self.n_sites,
            d: self.d,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }
}

pub fn apply_circuit(s: &PureState, c: &Circuit) -> Result<PureState> {
    if (s.num_sites(), s.local_dim()) != (c.n_sites, c.d) {
        return input(format!(
            "circuit for n={}, d={} applied to a state with n={}, d={}",
            c.n_sites,
            c.d,
            s.num_sites(),
            s.local_dim()
        ));
    }
    let mut out = s.clone();
    for g in &c.gates {
        out = apply_unchecked(&out, &[g.control, g.target], &g.matrix());
    }
    Ok(out)
}

/// Order in which the gate chain acts on the dimer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ChainOrder {
    /// Last gate first: every control still holds its dimer digit.
    BackToFront,
    /// First gate first: controls see already-rotated digits.
    FrontToBack,
}

fn chain_circuit(n: usize, d: usize, us: &[ComplexMatrix], order: ChainOrder) -> Result<Circuit> {
    if n == 0 {
        return input("need at least one pair");
    }
    if us.len() != n - 1 {
        return input(format!(
            "a {}-site chain takes {} unitaries, got {}",
            2 * n,
            n - 1,
            us.len()
        ));
    }
    let mut gates = us
        .iter()
        .enumerate()
        .map(|(m, u)| {
            if u.rows() != d {
                return input(format!("unitary {m} is {}x{}, expected d={d}", u.rows(), u.cols()));
            }
            controlled_power_gate(n + m, n + m + 1, u.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    if order == ChainOrder::BackToFront {
        gates.reverse();
    }
    let mut circuit = Circuit::new(2 * n, d);
    for g in gates {
        circuit.push(g)?;
    }
    Ok(circuit)
}

/// The circuit producing [`circuit_psi`] from the dimer.
pub fn psi_circuit(n: usize, d: usize, us: &[ComplexMatrix]) -> Result<Circuit> {
    chain_circuit(n, d, us, ChainOrder::BackToFront)
}

/// The circuit producing [`circuit_xi`] from the dimer.
pub fn xi_circuit(n: usize, d: usize, us: &[ComplexMatrix]) -> Result<Circuit> {
    chain_circuit(n, d, us, ChainOrder::FrontToBack)
}

/// `Λ_{n,n+1}(U_1) ⋯ Λ_{2n-2,2n-1}(U_{n-1})` on the dimer, rightmost first.
///
/// Every gate controls on an untouched dimer digit, so for `n = 4` the
/// amplitudes are `d^{-2}` on `|i,j,k,l, i, U^i j, V^j k, W^k l⟩`.
pub fn circuit_psi(n: usize, d: usize, us: &[ComplexMatrix]) -> Result<PureState> {
    apply_circuit(&dimerized_bell(n, d)?, &psi_circuit(n, d, us)?)
}

/// The same gates in the opposite order, so each control carries the output
/// of the previous gate: `|i,j,k,l, i, U(i,j), V(U(i,j),k), W(V(U(i,j),k),l)⟩`.
pub fn circuit_xi(n: usize, d: usize, us: &[ComplexMatrix]) -> Result<PureState> {
    apply_circuit(&dimerized_bell(n, d)?, &xi_circuit(n, d, us)?)
}

/// Haar unitary from Gram-Schmidt on a complex Ginibre matrix. Dividing out
/// the triangular factor's diagonal phases is implicit: Gram-Schmidt keeps
/// that diagonal real and positive.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|_| {
            (0..d)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect()
        })
        .collect();
    for k in 0..d {
        // two passes keep the columns orthogonal to machine precision
        for _ in 0..2 {
            for j in 0..k {
                let (done, rest) = cols.split_at_mut(k);
                let q = &done[j];
                let r: Complex64 = q.iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
                for (v, a) in rest[0].iter_mut().zip(q) {
                    *v -= r * a;
                }
            }
        }
        let norm = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for v in &mut cols[k] {
            *v /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(d, d);
    for (c, col) in cols.iter().enumerate() {
        for (r, &z) in col.iter().enumerate() {
            u[(r, c)] = z;
        }
    }
    u
}

/// Seeded [`haar_unitary`]; the same seed always yields the same matrix.
pub fn random_unitary(d: usize, seed: u64) -> ComplexMatrix {
    haar_unitary(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn random_state<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<PureState> {
    let len = register_len(n, d)?;
    let amps = (0..len)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::new(n, d, amps)?.normalized()
}

/// Random diagonal unitary with independent uniform phases.
pub fn random_diagonal_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let phases: Vec<_> = (0..d)
        .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    ComplexMatrix::diagonal(&phases)
}
