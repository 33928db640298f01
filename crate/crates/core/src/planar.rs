//! Bipartitions of the ring, reduced density matrices and the planar /
//! absolute maximal-entanglement checks.
//!
//! A state is planar maximally entangled (PME) when every connected window
//! of `⌊n/2⌋` sites on the ring is maximally mixed, and absolutely maximally
//! entangled (AME) when every subset of that size is. For odd `n` the window
//! is the smaller side of the cut and the complement the larger one.

use itertools::Itertools;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{input, PmeError, Result};
use crate::matrix::ComplexMatrix;
use crate::statevec::{check_sites, other_sites, site_offsets, PureState};

/// Default tolerance of every verification in the crate.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest register for which every `⌊n/2⌋`-subset is enumerated.
pub const AME_MAX_SITES: usize = 12;

/// States at least this long are checked window-by-window on the rayon pool.
const PARALLEL_LEN: usize = 4096;

/// Two complementary, ordered site lists covering `0..n`.
pub trait Bipartition {
    fn num_sites(&self) -> usize;
    /// The subsystem whose reduced state is examined (matrix columns).
    fn window(&self) -> &[usize];
    /// The traced-out remainder (matrix rows).
    fn complement(&self) -> &[usize];
}

/// A connected arc of the ring and the arc that remains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    start: usize,
    window: Vec<usize>,
    complement: Vec<usize>,
}

/// Arbitrary subset of sites; the complement is ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetPartition {
    n: usize,
    subset: Vec<usize>,
    complement: Vec<usize>,
}

/// `length` consecutive sites starting at `start`, wrapping modulo `n`.
/// The complement is the remaining arc, starting right after the window.
pub fn cyclic_window(n: usize, start: usize, length: usize) -> Result<Partition> {
    if start >= n {
        return input(format!("start {start} out of range for {n} sites"));
    }
    if length == 0 || length >= n {
        return input(format!(
            "window length must be in 1..{n}, got {length}"
        ));
    }
    let window = (0..length).map(|k| (start + k) % n).collect();
    let complement = (length..n).map(|k| (start + k) % n).collect();
    Ok(Partition {
        n,
        start,
        window,
        complement,
    })
}

impl Partition {
    /// Builds the partition whose window is exactly `sites`, which must be
    /// listed in ring order (each site followed by its successor mod `n`).
    pub fn from_arc(n: usize, sites: &[usize]) -> Result<Partition> {
        check_sites(n, sites)?;
        let Some(&start) = sites.first() else {
            return input("empty window");
        };
        if sites.windows(2).any(|w| w[1] != (w[0] + 1) % n) {
            return input(format!(
                "sites {sites:?} do not form a connected arc of the {n}-site ring"
            ));
        }
        cyclic_window(n, start, sites.len())
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    pub fn is_balanced(&self) -> bool {
        self.window.len() == self.complement.len()
    }
}

impl SubsetPartition {
    pub fn new(n: usize, subset: &[usize]) -> Result<SubsetPartition> {
        check_sites(n, subset)?;
        if subset.is_empty() || subset.len() >= n {
            return input("subset must be nonempty and proper");
        }
        Ok(SubsetPartition {
            n,
            subset: subset.to_vec(),
            complement: other_sites(n, subset),
        })
    }
}

impl Bipartition for Partition {
    fn num_sites(&self) -> usize {
        self.n
    }
    fn window(&self) -> &[usize] {
        &self.window
    }
    fn complement(&self) -> &[usize] {
        &self.complement
    }
}

impl Bipartition for SubsetPartition {
    fn num_sites(&self) -> usize {
        self.n
    }
    fn window(&self) -> &[usize] {
        &self.subset
    }
    fn complement(&self) -> &[usize] {
        &self.complement
    }
}

/// Amplitudes reshaped into a matrix: row index from the complement digits,
/// column index from the window digits, each in the partition's site order.
pub fn coefficient_matrix<P: Bipartition + ?Sized>(
    s: &PureState,
    p: &P,
) -> Result<ComplexMatrix> {
    if p.num_sites() != s.num_sites() {
        return input(format!(
            "partition of {} sites applied to a {}-site state",
            p.num_sites(),
            s.num_sites()
        ));
    }
    let n = s.num_sites();
    let d = s.local_dim();
    let rows = site_offsets(n, d, p.complement());
    let cols = site_offsets(n, d, p.window());
    let amps = s.amplitudes();
    let data = rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| amps[r + c]))
        .collect();
    ComplexMatrix::from_vec(rows.len(), cols.len(), data)
}

/// Reduced density matrix of the window: `ρ[k][k'] = Σ_b M[b][k] M[b][k']*`
/// for the coefficient matrix `M`, i.e. the transpose of `M†M`.
pub fn reduced_density<P: Bipartition + ?Sized>(s: &PureState, p: &P) -> Result<ComplexMatrix> {
    let m = coefficient_matrix(s, p)?;
    Ok(m.adjoint().matmul(&m).transpose())
}

/// Verdict of a single thresholded check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Check {
    pub pass: bool,
    pub deviation: f64,
}

/// Entrywise max-abs distance of `rho` from `I/D`.
pub fn is_maximally_mixed(rho: &ComplexMatrix, tol: f64) -> Result<Check> {
    if !rho.is_square() {
        return input(format!(
            "density matrix must be square, got {}x{}",
            rho.rows(),
            rho.cols()
        ));
    }
    let dim = rho.rows();
    let target = ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0));
    let deviation = rho.max_abs_diff(&target);
    Ok(Check {
        pass: deviation <= tol,
        deviation,
    })
}

/// Tests `M†M ∝ I` (or `MM† ∝ I` for wide `M`), relative to the scale
/// `trace/dim`. A zero matrix fails with infinite deviation.
pub fn is_proportional_isometry(m: &ComplexMatrix, tol: f64) -> Check {
    let gram = if m.rows() >= m.cols() {
        m.adjoint().matmul(m)
    } else {
        m.matmul(&m.adjoint())
    };
    let dim = gram.rows();
    let scale = gram.trace().re / dim as f64;
    if scale.is_nan() || scale <= 0.0 {
        return Check {
            pass: false,
            deviation: f64::INFINITY,
        };
    }
    let target = ComplexMatrix::identity(dim).scale(Complex64::new(scale, 0.0));
    let deviation = gram.max_abs_diff(&target) / scale;
    Check {
        pass: deviation <= tol,
        deviation,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerificationMode {
    Pme,
    Ame,
}

/// Outcome of one subsystem check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionCheck {
    pub sites: Vec<usize>,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub mode: VerificationMode,
    pub tolerance: f64,
    pub checks: Vec<PartitionCheck>,
    pub overall_pass: bool,
}

impl VerificationReport {
    fn from_checks(mode: VerificationMode, tolerance: f64, checks: Vec<PartitionCheck>) -> Self {
        let overall_pass = checks.iter().all(|c| c.pass);
        VerificationReport {
            mode,
            tolerance,
            checks,
            overall_pass,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &PartitionCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().map(|c| c.deviation).fold(0.0, f64::max)
    }

    /// The check on exactly this site list, if it was performed.
    pub fn check_for(&self, sites: &[usize]) -> Option<&PartitionCheck> {
        self.checks.iter().find(|c| c.sites == sites)
    }
}

fn check_subsystem<P: Bipartition>(s: &PureState, p: &P, tol: f64) -> Result<PartitionCheck> {
    let rho = reduced_density(s, p)?;
    let Check { pass, deviation } = is_maximally_mixed(&rho, tol)?;
    Ok(PartitionCheck {
        sites: p.window().to_vec(),
        deviation,
        pass,
    })
}

/// Runs `check` over `items` in order, on the thread pool for large states.
fn run_checks<T, F>(s: &PureState, items: Vec<T>, check: F) -> Result<Vec<PartitionCheck>>
where
    T: Send + Sync,
    F: Fn(&T) -> Result<PartitionCheck> + Send + Sync,
{
    if s.amplitudes().len() >= PARALLEL_LEN {
        items.par_iter().map(check).collect()
    } else {
        items.iter().map(check).collect()
    }
}

/// Checks every connected window of `⌊n/2⌋` sites (all `n` starting points).
pub fn verify_pme(s: &PureState, tol: f64) -> Result<VerificationReport> {
    let n = s.num_sites();
    if n < 2 {
        return input("PME verification needs at least two sites");
    }
    let windows = (0..n)
        .map(|start| cyclic_window(n, start, n / 2))
        .collect::<Result<Vec<_>>>()?;
    let checks = run_checks(s, windows, |p| check_subsystem(s, p, tol))?;
    Ok(VerificationReport::from_checks(VerificationMode::Pme, tol, checks))
}

/// Checks every `⌊n/2⌋`-subset in lexicographic order.
pub fn verify_ame(s: &PureState, tol: f64) -> Result<VerificationReport> {
    let n = s.num_sites();
    if n < 2 {
        return input("AME verification needs at least two sites");
    }
    if n > AME_MAX_SITES {
        return Err(PmeError::Resource(format!(
            "AME verification enumerates all subsets; {n} sites exceeds the limit of {AME_MAX_SITES}"
        )));
    }
    let subsets = (0..n)
        .combinations(n / 2)
        .map(|sub| SubsetPartition::new(n, &sub))
        .collect::<Result<Vec<_>>>()?;
    let checks = run_checks(s, subsets, |p| check_subsystem(s, p, tol))?;
    Ok(VerificationReport::from_checks(VerificationMode::Ame, tol, checks))
}
