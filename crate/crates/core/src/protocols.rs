//! Teleportation and quantum state sharing on top of a PME resource.
//!
//! Across any balanced connected cut a PME state reads
//! `(1/√D) Σ_K |K⟩_window ⊗ u|K⟩_complement` for a unitary `u`, the transfer
//! unitary. Undoing `u` on one side leaves a canonical maximally entangled
//! pair; undoing it on a set of share holders decodes a shared secret.
//!
//! In the sharing scheme the resource has `2n` sites. The distributor's site
//! `a` is contracted against the secret and the remaining `2n - 1` sites are
//! the players, labelled by their original ring positions. Players form a
//! ring of their own that closes over the gap left by `a`.

use num_complex::Complex64;

use crate::error::{input, PmeError, Result};
use crate::matrix::{ComplexMatrix, ZERO};
use crate::planar::{
    coefficient_matrix, cyclic_window, is_maximally_mixed, reduced_density, verify_pme,
    Bipartition, Partition, PartitionCheck, SubsetPartition, DEFAULT_TOL,
};
use crate::statevec::{apply_unchecked, site_offsets, PureState};

/// Tolerance on normalization of a user-supplied secret.
pub const SECRET_NORM_TOL: f64 = 1e-10;

/// The unitary linking the two halves of a balanced connected cut.
#[derive(Clone, Debug)]
pub struct TransferUnitary {
    partition: Partition,
    u: ComplexMatrix,
    deviation: f64,
}

impl TransferUnitary {
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// Maps window digits (columns) to complement digits (rows).
    pub fn unitary(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn unitarity_deviation(&self) -> f64 {
        self.deviation
    }

    /// `(1/√D) Σ_K |K⟩_window ⊗ u|K⟩_complement`.
    pub fn reconstruct(&self, d: usize) -> Result<PureState> {
        let n = self.partition.num_sites();
        let dim = self.u.rows() as f64;
        let mut amps = vec![ZERO; d.pow(n as u32)];
        let cols = site_offsets(n, d, self.partition.window());
        let rows = site_offsets(n, d, self.partition.complement());
        for (k, &c) in cols.iter().enumerate() {
            for (b, &r) in rows.iter().enumerate() {
                amps[r + c] = self.u[(b, k)] / dim.sqrt();
            }
        }
        PureState::new(n, d, amps)
    }
}

fn require_balanced(s: &PureState, p: &Partition) -> Result<()> {
    if p.num_sites() != s.num_sites() {
        return input(format!(
            "partition of {} sites applied to a {}-site state",
            p.num_sites(),
            s.num_sites()
        ));
    }
    if !p.is_balanced() {
        return input(format!(
            "transfer unitaries need equal halves, got window {:?} against {:?}",
            p.window(),
            p.complement()
        ));
    }
    Ok(())
}

/// `√D ×` the coefficient matrix, failing when it is not unitary within `tol`.
fn transfer_for(s: &PureState, p: &Partition, tol: f64) -> Result<TransferUnitary> {
    require_balanced(s, p)?;
    let m = coefficient_matrix(s, p)?;
    let u = m.scale(Complex64::new((m.rows() as f64).sqrt(), 0.0));
    let deviation = u.unitarity_deviation();
    if deviation > tol {
        return Err(PmeError::Verification {
            what: format!("coefficient matrix of window {:?} is not unitary", p.window()),
            deviation,
        });
    }
    Ok(TransferUnitary {
        partition: p.clone(),
        u,
        deviation,
    })
}

fn require_pme(s: &PureState) -> Result<()> {
    let report = verify_pme(s, DEFAULT_TOL)?;
    if !report.overall_pass {
        return Err(PmeError::Verification {
            what: "resource is not planar maximally entangled".into(),
            deviation: report.max_deviation(),
        });
    }
    Ok(())
}

/// Transfer unitary of a PME state across a balanced connected cut.
pub fn extract_transfer_unitary(s: &PureState, p: &Partition) -> Result<TransferUnitary> {
    require_balanced(s, p)?;
    require_pme(s)?;
    transfer_for(s, p, DEFAULT_TOL)
}

/// `(1/√D) Σ_K |K⟩_window |K⟩_complement`, digits paired position by position.
pub fn canonical_pair(n: usize, d: usize, p: &Partition) -> Result<PureState> {
    if !p.is_balanced() || p.num_sites() != n {
        return input("canonical pair needs a balanced partition of the register");
    }
    TransferUnitary {
        partition: p.clone(),
        u: ComplexMatrix::identity(d.pow(p.len() as u32)),
        deviation: 0.0,
    }
    .reconstruct(d)
}

/// Applies `u†` on the complement, leaving the canonical maximally entangled
/// state between the two halves.
pub fn teleport_setup(s: &PureState, p: &Partition) -> Result<PureState> {
    let tu = extract_transfer_unitary(s, p)?;
    Ok(apply_unchecked(s, p.complement(), &tu.u.adjoint()))
}

/// Encoded secret held by the `2n - 1` players.
#[derive(Clone, Debug)]
pub struct QssShares {
    n_half: usize,
    d: usize,
    distributor: usize,
    resource: PureState,
    encoded: PureState,
}

impl QssShares {
    pub fn n_half(&self) -> usize {
        self.n_half
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn distributor_site(&self) -> usize {
        self.distributor
    }

    /// Players' state; its sites are the original labels ascending, skipping
    /// the distributor.
    pub fn encoded(&self) -> &PureState {
        &self.encoded
    }

    pub fn resource(&self) -> &PureState {
        &self.resource
    }

    /// Player labels in ascending order.
    pub fn players(&self) -> Vec<usize> {
        (0..2 * self.n_half).filter(|&x| x != self.distributor).collect()
    }

    /// Position of player `site` in the encoded register.
    fn position(&self, site: usize) -> usize {
        if site < self.distributor {
            site
        } else {
            site - 1
        }
    }

    fn positions(&self, sites: &[usize]) -> Vec<usize> {
        sites.iter().map(|&s| self.position(s)).collect()
    }
}

/// `|α⟩ ↦ √d Σ_i α_i ⟨i|_a |Ψ⟩`: the secret is absorbed by contracting the
/// distributor's site of the resource.
pub fn qss_encode(resource: &PureState, distributor: usize, secret: &[Complex64]) -> Result<QssShares> {
    let sites = resource.num_sites();
    let d = resource.local_dim();
    if sites < 2 || !sites.is_multiple_of(2) {
        return input(format!("state sharing needs an even register, got {sites} sites"));
    }
    if distributor >= sites {
        return input(format!("distributor site {distributor} out of range"));
    }
    if secret.len() != d {
        return input(format!("secret must have {d} components, got {}", secret.len()));
    }
    let norm: f64 = secret.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > SECRET_NORM_TOL {
        return input(format!("secret is not normalized (norm² = {norm})"));
    }
    require_pme(resource)?;

    let players: Vec<usize> = (0..sites).filter(|&x| x != distributor).collect();
    let rest = site_offsets(sites, d, &players);
    let digit = site_offsets(sites, d, &[distributor]);
    let amps = resource.amplitudes();
    let scale = (d as f64).sqrt();
    let encoded = rest
        .iter()
        .map(|&r| {
            secret
                .iter()
                .zip(&digit)
                .map(|(a, &off)| a * amps[r + off])
                .sum::<Complex64>()
                * scale
        })
        .collect();
    Ok(QssShares {
        n_half: sites / 2,
        d,
        distributor,
        resource: resource.clone(),
        encoded: PureState::new(sites - 1, d, encoded)?,
    })
}

/// Successor of `site` on the player ring.
fn next_player(n_sites: usize, distributor: usize, site: usize) -> usize {
    let next = (site + 1) % n_sites;
    if next == distributor {
        (next + 1) % n_sites
    } else {
        next
    }
}

/// All connected player arcs of length `len`, one per starting player.
pub fn player_arcs(n_half: usize, distributor: usize, len: usize) -> Vec<Vec<usize>> {
    let n_sites = 2 * n_half;
    (0..n_sites)
        .filter(|&s| s != distributor)
        .map(|start| {
            std::iter::successors(Some(start), |&x| Some(next_player(n_sites, distributor, x)))
                .take(len)
                .collect()
        })
        .collect()
}

/// Every connected player window of at least `n` players.
pub fn recovery_windows(n_half: usize, distributor: usize) -> Vec<Vec<usize>> {
    (n_half..2 * n_half)
        .flat_map(|len| player_arcs(n_half, distributor, len))
        .collect()
}

/// The `n` players that actually decode for `window`: the leftmost run of
/// `n` players that is also an arc of the original ring. Windows that only
/// close up through the distributor's gap have no such run.
pub fn decoding_window(n_half: usize, distributor: usize, window: &[usize]) -> Result<Vec<usize>> {
    let n_sites = 2 * n_half;
    for (i, &x) in window.iter().enumerate() {
        if x >= n_sites || x == distributor {
            return Err(PmeError::Authorization(format!("{x} is not a player")));
        }
        if window[..i].contains(&x) {
            return Err(PmeError::Authorization(format!("player {x} listed twice")));
        }
    }
    if window
        .windows(2)
        .any(|w| w[1] != next_player(n_sites, distributor, w[0]))
    {
        return Err(PmeError::Authorization(format!(
            "players {window:?} are not a connected arc"
        )));
    }
    if window.len() < n_half {
        return Err(PmeError::Authorization(format!(
            "{} players cannot recover; at least {n_half} connected players are required",
            window.len()
        )));
    }
    window
        .windows(n_half)
        .find(|run| run.windows(2).all(|w| w[1] == (w[0] + 1) % n_sites))
        .map(<[usize]>::to_vec)
        .ok_or_else(|| {
            PmeError::Authorization(format!(
                "players {window:?} only connect across the distributor's position"
            ))
        })
}

/// Result of decoding on a recovery window.
#[derive(Clone, Debug)]
pub struct QssRecovery {
    /// Amplitudes of the recovered qudit.
    pub recovered: Vec<Complex64>,
    /// Player that ends up holding the secret.
    pub bob: usize,
    /// The `n` players that applied the inverse transfer unitary.
    pub decoding_window: Vec<usize>,
    /// Overlap of the decoded players' state with `recovered ⊗ (canonical
    /// pair)`; 1 for a perfect decode.
    pub fidelity: f64,
    /// `Tr ρ_bob²`.
    pub purity: f64,
}

/// Decodes the secret onto one player of `window`.
///
/// With `(b, B)` the decoding run and `(a, A)` the opposite half of the
/// resource, applying `u†` on `(b, B)` leaves `|secret⟩_b` times the
/// canonical pair between `A` and `B`.
pub fn qss_decode(shares: &QssShares, window: &[usize]) -> Result<QssRecovery> {
    let n = shares.n_half;
    let d = shares.d;
    let n_sites = 2 * n;
    let run = decoding_window(n, shares.distributor, window)?;
    let p = cyclic_window(n_sites, (run[0] + n) % n_sites, n)?;
    debug_assert_eq!(p.complement(), run.as_slice());
    let tu = transfer_for(&shares.resource, &p, DEFAULT_TOL)?;

    let slot = p
        .window()
        .iter()
        .position(|&x| x == shares.distributor)
        .expect("distributor lies opposite the decoding run");
    let bob = run[slot];
    let decoded = apply_unchecked(&shares.encoded, &shares.positions(&run), &tu.u.adjoint());

    let others = |list: &[usize], skip: usize| -> Vec<usize> {
        list.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect::<Vec<_>>()
    };
    let side_a = others(p.window(), slot);
    let side_b = others(p.complement(), slot);
    let players = n_sites - 1;
    let off_bob = site_offsets(players, d, &[shares.position(bob)]);
    let off_a = site_offsets(players, d, &shares.positions(&side_a));
    let off_b = site_offsets(players, d, &shares.positions(&side_b));
    let pair_amp = (off_a.len() as f64).sqrt().recip();
    let amps = decoded.amplitudes();
    let recovered: Vec<Complex64> = off_bob
        .iter()
        .map(|&ob| {
            off_a
                .iter()
                .zip(&off_b)
                .map(|(&oa, &obb)| amps[ob + oa + obb] * pair_amp)
                .sum()
        })
        .collect();
    let fidelity = recovered.iter().map(|z| z.norm_sqr()).sum::<f64>().min(1.0);

    let rho = reduced_density(&decoded, &SubsetPartition::new(players, &[shares.position(bob)])?)?;
    let purity = rho.matmul(&rho).trace().re;

    Ok(QssRecovery {
        recovered,
        bob,
        decoding_window: run,
        fidelity,
        purity,
    })
}

/// Player arcs whose ignorance of the secret follows from the PME property:
/// every connected sub-arc of a set `A` such that `A ∪ {a}` is a connected
/// half of the resource. Ordered by length, then by first player.
pub fn unauthorized_arcs(n_half: usize, distributor: usize) -> Vec<Vec<usize>> {
    let n_sites = 2 * n_half;
    let mut arcs: Vec<Vec<usize>> = Vec::new();
    for offset in 0..n_half {
        let start = (distributor + n_sites - offset) % n_sites;
        let side: Vec<usize> = (0..n_half)
            .map(|k| (start + k) % n_sites)
            .filter(|&x| x != distributor)
            .collect();
        for len in 1..=side.len() {
            for sub in side.windows(len) {
                if !arcs.iter().any(|a| a.as_slice() == sub) {
                    arcs.push(sub.to_vec());
                }
            }
        }
    }
    arcs.sort_by_key(|a| (a.len(), (a[0] + n_sites - distributor) % n_sites));
    arcs
}

/// Maximal-mixedness check of every arc in [`unauthorized_arcs`].
pub fn qss_security(shares: &QssShares, tol: f64) -> Result<Vec<PartitionCheck>> {
    let players = 2 * shares.n_half - 1;
    unauthorized_arcs(shares.n_half, shares.distributor)
        .into_iter()
        .map(|arc| {
            let p = SubsetPartition::new(players, &shares.positions(&arc))?;
            let check = is_maximally_mixed(&reduced_density(shares.encoded(), &p)?, tol)?;
            Ok(PartitionCheck {
                sites: arc,
                deviation: check.deviation,
                pass: check.pass,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{circuit_psi, dimerized_bell, haar_unitary, random_state};
    use crate::families4::{family_a, family_b};
    use crate::matrix::ONE;
    use crate::statevec::{fidelity, global_phase_canonical, PureState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn basis_secret(d: usize, k: usize) -> Vec<Complex64> {
        (0..d).map(|i| if i == k { ONE } else { ZERO }).collect()
    }

    fn haar_secret(d: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        random_state(1, d, rng).unwrap().into_amplitudes()
    }

    fn overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr()
    }

    #[test]
    fn dimer_transfer_unitaries_are_identity() {
        let s = dimerized_bell(2, 2).unwrap();
        for start in 0..4 {
            let p = cyclic_window(4, start, 2).unwrap();
            let tu = extract_transfer_unitary(&s, &p).unwrap();
            // ordered arcs pair site k with site k+2 position by position
            assert_eq!(tu.unitary(), &ComplexMatrix::identity(4), "start {start}");
        }
    }

    #[test]
    fn transfer_unitary_rejects_bad_input() {
        let s = dimerized_bell(2, 2).unwrap();
        assert!(extract_transfer_unitary(&s, &cyclic_window(4, 0, 1).unwrap()).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let junk = random_state(4, 2, &mut rng).unwrap();
        let err = extract_transfer_unitary(&junk, &cyclic_window(4, 0, 2).unwrap()).unwrap_err();
        assert!(matches!(err, PmeError::Verification { .. }));
        assert!(Partition::from_arc(4, &[0, 2]).is_err());
    }

    #[test]
    fn transfer_unitaries_reconstruct_the_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let us: Vec<_> = (0..3).map(|_| haar_unitary(2, &mut rng)).collect();
        let s = circuit_psi(4, 2, &us).unwrap();
        for start in 0..8 {
            let p = cyclic_window(8, start, 4).unwrap();
            let tu = extract_transfer_unitary(&s, &p).unwrap();
            assert!(tu.unitarity_deviation() <= 1e-10);
            let back = global_phase_canonical(&tu.reconstruct(2).unwrap()).unwrap();
            let orig = global_phase_canonical(&s).unwrap();
            for (x, y) in back.amplitudes().iter().zip(orig.amplitudes()) {
                assert!((x - y).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn teleport_setup_reaches_the_canonical_pair() {
        let dimer = dimerized_bell(2, 2).unwrap();
        let p = cyclic_window(4, 0, 2).unwrap();
        assert_eq!(teleport_setup(&dimer, &p).unwrap(), dimer);

        let s = family_a(0.4, &haar_unitary(2, &mut ChaCha8Rng::seed_from_u64(3))).unwrap();
        let out = teleport_setup(&s, &p).unwrap();
        let pair = canonical_pair(4, 2, &p).unwrap();
        assert!(fidelity(&out, &pair).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn encode_dimer_basis_secret() {
        let shares = qss_encode(&dimerized_bell(2, 2).unwrap(), 0, &basis_secret(2, 0)).unwrap();
        // 1/√2 Σ_j |j, 0, j⟩ on players (1, 2, 3)
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut want = vec![ZERO; 8];
        want[0b000] = Complex64::new(h, 0.0);
        want[0b101] = Complex64::new(h, 0.0);
        let want = PureState::new(3, 2, want).unwrap();
        assert!(shares.encoded().amplitudes().iter().zip(want.amplitudes()).all(|(x, y)| (x - y).norm() < 1e-15));
        assert!((shares.encoded().norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn encode_is_linear() {
        let r = dimerized_bell(2, 2).unwrap();
        let s0 = qss_encode(&r, 0, &basis_secret(2, 0)).unwrap();
        let s1 = qss_encode(&r, 0, &basis_secret(2, 1)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = qss_encode(&r, 0, &[Complex64::new(h, 0.0); 2]).unwrap();
        for ((p, a), b) in plus.encoded().amplitudes().iter().zip(s0.encoded().amplitudes()).zip(s1.encoded().amplitudes()) {
            assert!((p - (a + b) * h).norm() < 1e-15);
        }
    }

    #[test]
    fn encode_errors() {
        let r = dimerized_bell(2, 2).unwrap();
        assert!(qss_encode(&r, 0, &[ONE, ONE]).is_err());
        assert!(qss_encode(&r, 4, &basis_secret(2, 0)).is_err());
        assert!(qss_encode(&r, 0, &basis_secret(3, 0)).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let junk = random_state(4, 2, &mut rng).unwrap();
        assert!(matches!(qss_encode(&junk, 0, &basis_secret(2, 0)), Err(PmeError::Verification { .. })));
    }

    #[test]
    fn two_pair_decodes() {
        let r = dimerized_bell(2, 2).unwrap();
        let shares = qss_encode(&r, 0, &basis_secret(2, 1)).unwrap();
        let rec = qss_decode(&shares, &[2, 3]).unwrap();
        assert!(overlap(&rec.recovered, &basis_secret(2, 1)) >= 1.0 - 1e-10);
        assert!(rec.fidelity >= 1.0 - 1e-10 && (rec.purity - 1.0).abs() < 1e-10);
        assert_eq!(rec.bob, 2);

        let rec = qss_decode(&shares, &[1, 2]).unwrap();
        assert!(overlap(&rec.recovered, &basis_secret(2, 1)) >= 1.0 - 1e-10);

        for bad in [&[2][..], &[3, 1], &[1, 3], &[0, 1], &[2, 2]] {
            assert!(matches!(qss_decode(&shares, bad), Err(PmeError::Authorization(_))), "{bad:?}");
        }
    }

    #[test]
    fn round_trip_over_all_windows() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let resources = [
            family_b(0.3, 0.1, 0.2, 0.4, 0.5),
            circuit_psi(3, 3, &[haar_unitary(3, &mut rng), haar_unitary(3, &mut rng)]).unwrap(),
        ];
        for r in &resources {
            let n_half = r.num_sites() / 2;
            let d = r.local_dim();
            for a in 0..2 * n_half {
                let secret = haar_secret(d, &mut rng);
                let shares = qss_encode(r, a, &secret).unwrap();
                for w in recovery_windows(n_half, a) {
                    match decoding_window(n_half, a, &w) {
                        Ok(_) => {
                            let rec = qss_decode(&shares, &w).unwrap();
                            let got = PureState::new(1, d, rec.recovered.clone()).unwrap();
                            let want = PureState::new(1, d, secret.clone()).unwrap();
                            assert!(fidelity(&got, &want).unwrap() >= 1.0 - 1e-10);
                            // exact, phase included
                            for (x, y) in rec.recovered.iter().zip(&secret) {
                                assert!((x - y).norm() < 1e-10);
                            }
                        }
                        Err(_) => assert!(qss_decode(&shares, &w).is_err()),
                    }
                }
                for check in qss_security(&shares, 1e-10).unwrap() {
                    assert!(check.pass, "arc {:?} deviates by {}", check.sites, check.deviation);
                }
            }
        }
    }

    #[test]
    fn unauthorized_arcs_touch_the_distributor_side() {
        assert_eq!(unauthorized_arcs(2, 0), vec![vec![1], vec![3]]);
        let arcs = unauthorized_arcs(3, 0);
        assert_eq!(
            arcs,
            vec![vec![1], vec![2], vec![4], vec![5], vec![1, 2], vec![4, 5], vec![5, 1]]
        );
    }

    #[test]
    fn dimer_antipode_holds_the_secret() {
        // The player opposite the distributor is not covered by the PME
        // argument, and for the bare dimer it holds the secret outright.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let secret = haar_secret(2, &mut rng);
        let shares = qss_encode(&dimerized_bell(2, 2).unwrap(), 0, &secret).unwrap();
        let rho = reduced_density(shares.encoded(), &SubsetPartition::new(3, &[1]).unwrap()).unwrap();
        assert!((rho.matmul(&rho).trace().re - 1.0).abs() < 1e-12);
    }
}
