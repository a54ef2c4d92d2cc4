//! Lowest eigenpairs of charge-basis operators, with a cutoff convergence loop.

use std::os::raw::c_char;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
#[cfg(test)]
use crate::operator::charge_of;
use crate::operator::ChargeBasisOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "index")]
pub enum LevelLabel {
    Qubit(usize),
    InternalExcited,
    Unlabeled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Ascending, GHz.
    pub eigenvalues: Vec<f64>,
    /// E_i − E_0.
    pub excitations: Vec<f64>,
    /// Orthonormal columns in the operator's flat charge index, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    pub labels: Vec<LevelLabel>,
    pub n_cut_used: usize,
    pub dim: usize,
}

impl Spectrum {
    fn new(
        eigenvalues: Vec<f64>,
        eigenvectors: Option<Vec<Vec<f64>>>,
        op: &ChargeBasisOperator,
    ) -> Self {
        let e0 = eigenvalues.first().copied().unwrap_or(0.0);
        let excitations = eigenvalues.iter().map(|e| e - e0).collect();
        let labels = if op.cutoffs().len() == 1 {
            (0..eigenvalues.len()).map(LevelLabel::Qubit).collect()
        } else {
            vec![LevelLabel::Unlabeled; eigenvalues.len()]
        };
        Spectrum {
            eigenvalues,
            excitations,
            eigenvectors,
            labels,
            n_cut_used: op.cutoffs().iter().copied().max().unwrap_or(0),
            dim: op.dim(),
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Energies of the qubit-labeled levels in qubit order.
    pub fn qubit_levels(&self) -> Vec<f64> {
        let mut levels: Vec<(usize, f64)> = self
            .labels
            .iter()
            .zip(&self.eigenvalues)
            .filter_map(|(l, &e)| match l {
                LevelLabel::Qubit(j) => Some((*j, e)),
                _ => None,
            })
            .collect();
        levels.sort_by_key(|&(j, _)| j);
        levels.into_iter().map(|(_, e)| e).collect()
    }

    /// Qubit excitation energies E_j − E_0, j = 1, 2, ….
    pub fn qubit_excitations(&self) -> Vec<f64> {
        let levels = self.qubit_levels();
        match levels.first() {
            Some(&e0) => levels[1..].iter().map(|e| e - e0).collect(),
            None => Vec::new(),
        }
    }
}

/// Lowest `n_levels` eigenvalues (and optionally eigenvectors) of a fixed operator.
pub fn eigensolve(
    op: &ChargeBasisOperator,
    n_levels: usize,
    with_vectors: bool,
) -> Result<Spectrum> {
    let n = op.dim();
    if n_levels == 0 || n_levels > n {
        return Err(Error::Validation(format!(
            "requested {n_levels} levels from an operator of dimension {n}"
        )));
    }
    let (values, vectors) = if n >= ITERATIVE_MIN_DIM && 4 * n_levels <= n {
        shift_invert_lowest(op, n_levels, with_vectors)?
    } else {
        band_lowest(op, n_levels, with_vectors)?
    };
    Ok(Spectrum::new(values, vectors, op))
}

/// Eigenvalues with optional eigenvector columns.
type Eigenpairs = (Vec<f64>, Option<Vec<Vec<f64>>>);

fn band_lowest(
    op: &ChargeBasisOperator,
    n_levels: usize,
    with_vectors: bool,
) -> Result<Eigenpairs> {
    let n = op.dim();
    let kd = op.half_bandwidth();
    let ldab = (kd + 1) as i32;
    let mut ab = op.lower_band();
    let jobz: c_char = if with_vectors { b'V' } else { b'N' } as c_char;
    let range = b'I' as c_char;
    let uplo = b'L' as c_char;
    let ldq = if with_vectors { n } else { 1 };
    let mut q = vec![0.0; ldq * if with_vectors { n } else { 1 }];
    let ldz = if with_vectors { n } else { 1 };
    let mut z = vec![0.0; ldz * if with_vectors { n_levels } else { 1 }];
    let mut w = vec![0.0; n];
    let mut work = vec![0.0; 7 * n];
    let mut iwork = vec![0i32; 5 * n];
    let mut ifail = vec![0i32; n];
    let (mut m, mut info) = (0i32, 0i32);
    let abstol = 2.0 * f64::MIN_POSITIVE;
    let (n_i, kd_i, ldq_i, ldz_i, il, iu) = (
        n as i32,
        kd as i32,
        ldq as i32,
        ldz as i32,
        1i32,
        n_levels as i32,
    );
    // SAFETY: every buffer is sized per the dsbevx contract for these arguments.
    unsafe {
        lapack_sys::dsbevx_(
            &jobz,
            &range,
            &uplo,
            &n_i,
            &kd_i,
            ab.as_mut_ptr(),
            &ldab,
            q.as_mut_ptr(),
            &ldq_i,
            &0.0,
            &0.0,
            &il,
            &iu,
            &abstol,
            &mut m,
            w.as_mut_ptr(),
            z.as_mut_ptr(),
            &ldz_i,
            work.as_mut_ptr(),
            iwork.as_mut_ptr(),
            ifail.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack {
            routine: "dsbevx",
            info,
        });
    }
    if m as usize != n_levels {
        return Err(Error::Numeric(format!(
            "dsbevx returned {m} of {n_levels} eigenvalues"
        )));
    }
    w.truncate(n_levels);
    let vectors = with_vectors.then(|| {
        z.chunks(n)
            .take(n_levels)
            .map(|col| fix_sign(col.to_vec()))
            .collect()
    });
    Ok((w, vectors))
}

/// Fixes the sign so output is reproducible: largest component positive.
fn fix_sign(mut v: Vec<f64>) -> Vec<f64> {
    let (_, big) = v.iter().fold((0.0f64, 0.0f64), |(a, s), &x| {
        if x.abs() > a {
            (x.abs(), x)
        } else {
            (a, s)
        }
    });
    if big < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

/// Operators at least this large use the shift-invert Krylov solver.
pub const ITERATIVE_MIN_DIM: usize = 600;

const KRYLOV_BLOCK: usize = 4;
const KRYLOV_MAX_BASIS: usize = 400;
const KRYLOV_MAX_STEPS: usize = 2000;
const RESIDUAL_TOL: f64 = 1e-9;

/// Lowest eigenpairs by block Krylov iteration on (H − σ)⁻¹ with Rayleigh–Ritz
/// on H. σ lies below the Gershgorin bound, so H − σ is positive definite.
fn shift_invert_lowest(
    op: &ChargeBasisOperator,
    n_levels: usize,
    with_vectors: bool,
) -> Result<Eigenpairs> {
    let n = op.dim();
    let kd = op.half_bandwidth();
    let ldab = kd + 1;
    let lower = (0..n)
        .map(|r| {
            let off: f64 = (r.saturating_sub(kd)..=(r + kd).min(n - 1))
                .filter(|&c| c != r)
                .map(|c| op.get(r, c).abs())
                .sum();
            op.get(r, r) - off
        })
        .fold(f64::INFINITY, f64::min);
    let sigma = lower - 1e-3 * lower.abs().max(1.0);
    let mut ab = op.lower_band();
    for c in 0..n {
        ab[c * ldab] -= sigma;
    }
    let uplo = b'L' as c_char;
    let (n_i, kd_i, ldab_i) = (n as i32, kd as i32, ldab as i32);
    let mut info = 0i32;
    // SAFETY: `ab` holds the (kd + 1) × n lower band.
    unsafe { lapack_sys::dpbtrf_(&uplo, &n_i, &kd_i, ab.as_mut_ptr(), &ldab_i, &mut info) };
    if info != 0 {
        return Err(Error::Lapack {
            routine: "dpbtrf",
            info,
        });
    }
    let solve = |block: &mut [f64]| -> Result<()> {
        let nrhs = (block.len() / n) as i32;
        let mut info = 0i32;
        // SAFETY: `ab` holds the Cholesky factor from dpbtrf; `block` is n × nrhs.
        unsafe {
            lapack_sys::dpbtrs_(
                &uplo,
                &n_i,
                &kd_i,
                &nrhs,
                ab.as_ptr(),
                &ldab_i,
                block.as_mut_ptr(),
                &n_i,
                &mut info,
            )
        };
        if info != 0 {
            return Err(Error::Lapack {
                routine: "dpbtrs",
                info,
            });
        }
        Ok(())
    };

    let b = KRYLOV_BLOCK.min(n);
    let keep = (n_levels + b).min(n);
    let max_basis = KRYLOV_MAX_BASIS.max(2 * keep).min(n);
    let scale = op.max_abs().max(1.0);
    // basis columns, their images under H, and the projected matrix
    let mut v: Vec<f64> = Vec::new();
    let mut hv: Vec<f64> = Vec::new();
    let mut gram: Vec<f64> = Vec::new();
    let mut next: Vec<f64> = (0..n * b).map(start_entry).collect();
    for _ in 0..KRYLOV_MAX_STEPS {
        solve(&mut next)?;
        let added = extend_basis(&mut v, &mut next, n);
        if added == 0 {
            next = (0..n * b).map(|i| start_entry(i + v.len())).collect();
            continue;
        }
        let start = v.len() / n - added;
        for col in v[start * n..].chunks(n) {
            hv.extend(op.apply(col));
        }
        let m = v.len() / n;
        let mut grown = vec![0.0; m * m];
        for j in 0..start {
            grown[j * m..j * m + start].copy_from_slice(&gram[j * start..(j + 1) * start]);
        }
        for i in start..m {
            for j in 0..=i {
                let x = dot(&v[i * n..(i + 1) * n], &hv[j * n..(j + 1) * n]);
                grown[i + j * m] = x;
                grown[j + i * m] = x;
            }
        }
        gram = grown;
        let mut g = gram.clone();
        let theta = symmetric_eigen(&mut g, m)?;
        if m < n_levels {
            next = v[start * n..].to_vec();
            continue;
        }
        let ritz = |i: usize| {
            (
                combine(&v, &g[i * m..(i + 1) * m], n, m),
                combine(&hv, &g[i * m..(i + 1) * m], n, m),
            )
        };
        let converged = m == n
            || (0..n_levels).rev().all(|i| {
                let (x, hx) = ritz(i);
                let r: f64 = x
                    .iter()
                    .zip(&hx)
                    .map(|(xk, hk)| (hk - theta[i] * xk).powi(2))
                    .sum::<f64>()
                    .sqrt();
                r <= RESIDUAL_TOL * scale
            });
        if converged {
            let vectors =
                with_vectors.then(|| (0..n_levels).map(|i| fix_sign(ritz(i).0)).collect());
            return Ok((theta[..n_levels].to_vec(), vectors));
        }
        if m + b > max_basis {
            // restart from the lowest Ritz vectors
            let k = keep.min(m);
            v = combine(&v, &g[..m * k], n, m);
            hv = combine(&hv, &g[..m * k], n, m);
            gram = vec![0.0; k * k];
            for i in 0..k {
                gram[i * k + i] = theta[i];
            }
            next = v[..n * b.min(k)].to_vec();
        } else {
            next = v[start * n..].to_vec();
        }
    }
    Err(Error::Numeric(format!(
        "Krylov iteration did not converge in {KRYLOV_MAX_STEPS} steps"
    )))
}

/// Orthogonalizes the columns of `block` against `basis` and each other
/// (two Gram–Schmidt passes), appending those that survive. Returns the count.
fn extend_basis(basis: &mut Vec<f64>, block: &mut [f64], n: usize) -> usize {
    let mut added = 0;
    for col in block.chunks_mut(n) {
        let before = dot(col, col).sqrt();
        for _ in 0..2 {
            for q in basis.chunks(n) {
                let c = dot(q, col);
                col.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
            }
        }
        let norm = dot(col, col).sqrt();
        if norm > 1e-10 * before {
            basis.extend(col.iter().map(|x| x / norm));
            added += 1;
        }
    }
    added
}

/// Deterministic pseudo-random start block.
fn start_entry(i: usize) -> f64 {
    let mut z = (i as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Columns of `a` (n × p) combined by the leading columns of the p-row
/// column-major matrix `s`.
fn combine(a: &[f64], s: &[f64], n: usize, p: usize) -> Vec<f64> {
    let k = s.len() / p;
    let mut out = vec![0.0; n * k];
    for j in 0..k {
        let dst = &mut out[j * n..(j + 1) * n];
        for i in 0..p {
            let c = s[i + j * p];
            dst.iter_mut()
                .zip(&a[i * n..(i + 1) * n])
                .for_each(|(d, x)| *d += c * x);
        }
    }
    out
}

/// Eigenvalues (ascending) of a dense symmetric matrix; `a` is overwritten by the eigenvectors.
fn symmetric_eigen(a: &mut [f64], p: usize) -> Result<Vec<f64>> {
    let (jobz, uplo) = (b'V' as c_char, b'L' as c_char);
    let p_i = p as i32;
    let mut w = vec![0.0; p];
    let lwork = (3 * p).max(1) as i32 * 8;
    let mut work = vec![0.0; lwork as usize];
    let mut info = 0i32;
    // SAFETY: `a` is p × p and `work` exceeds the 3p − 1 minimum.
    unsafe {
        lapack_sys::dsyev_(
            &jobz,
            &uplo,
            &p_i,
            a.as_mut_ptr(),
            &p_i,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            &mut info,
        )
    };
    if info != 0 {
        return Err(Error::Lapack {
            routine: "dsyev",
            info,
        });
    }
    Ok(w)
}

/// Cutoff schedule and stopping rule for [`solve_converged`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePolicy {
    pub n_cut_start: usize,
    pub n_cut_step: usize,
    pub n_cut_max: usize,
    /// Largest allowed change of the requested eigenvalues, relative to their largest magnitude.
    pub tol: f64,
}

impl ConvergencePolicy {
    pub const SINGLE_MODE: ConvergencePolicy = ConvergencePolicy {
        n_cut_start: 25,
        n_cut_step: 5,
        n_cut_max: 80,
        tol: 1e-10,
    };

    pub const TWO_MODE: ConvergencePolicy = ConvergencePolicy {
        n_cut_start: 15,
        ..ConvergencePolicy::SINGLE_MODE
    };
}

/// A Hamiltonian that can be rebuilt at any charge cutoff.
pub trait ChargeModel {
    fn build(&self, n_cut: usize) -> Result<ChargeBasisOperator>;
}

impl<F> ChargeModel for F
where
    F: Fn(usize) -> Result<ChargeBasisOperator>,
{
    fn build(&self, n_cut: usize) -> Result<ChargeBasisOperator> {
        self(n_cut)
    }
}

fn relative_change(prev: &[f64], next: &[f64]) -> f64 {
    let scale = next.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let diff = prev
        .iter()
        .zip(next)
        .fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
    if diff == 0.0 {
        0.0
    } else if scale == 0.0 {
        f64::INFINITY
    } else {
        diff / scale
    }
}

/// Raises the cutoff by `n_cut_step` until the lowest `n_levels` eigenvalues
/// move by less than `tol` (relative), then returns the last solve.
pub fn solve_converged<M>(
    model: &M,
    n_levels: usize,
    with_vectors: bool,
    policy: &ConvergencePolicy,
) -> Result<Spectrum>
where
    M: ChargeModel + ?Sized,
{
    if policy.n_cut_step == 0 {
        return Err(Error::Validation("cutoff step must be positive".into()));
    }
    let mut n_cut = policy.n_cut_start;
    let op = model.build(n_cut)?;
    let mut prev = eigensolve(&op, n_levels, false)?;
    loop {
        let next_cut = n_cut + policy.n_cut_step;
        if next_cut > policy.n_cut_max {
            return Err(Error::Convergence {
                n_cut,
                change: f64::NAN,
                previous: Vec::new(),
                last: prev.eigenvalues,
            });
        }
        let op = model.build(next_cut)?;
        let next = eigensolve(&op, n_levels, false)?;
        let change = relative_change(&prev.eigenvalues, &next.eigenvalues);
        if change <= policy.tol {
            return if with_vectors {
                eigensolve(&op, n_levels, true)
            } else {
                Ok(next)
            };
        }
        if next_cut + policy.n_cut_step > policy.n_cut_max {
            return Err(Error::Convergence {
                n_cut: next_cut,
                change,
                previous: prev.eigenvalues,
                last: next.eigenvalues,
            });
        }
        prev = next;
        n_cut = next_cut;
    }
}

#[cfg(test)]
#[path = "../tests/common/jacobi.rs"]
mod jacobi;

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n_cut: usize, diag: impl Fn(i64) -> f64, off: f64) -> ChargeBasisOperator {
        ChargeBasisOperator::from_elements(&[n_cut], 1, |r, c| {
            if r == c {
                diag(r as i64 - n_cut as i64)
            } else {
                off
            }
        })
        .unwrap()
    }

    #[test]
    fn one_by_one() {
        let op = ChargeBasisOperator::from_elements(&[0], 0, |_, _| 3.25).unwrap();
        let s = eigensolve(&op, 1, true).unwrap();
        assert_eq!(s.eigenvalues, vec![3.25]);
        assert_eq!(s.excitations, vec![0.0]);
        assert_eq!(s.eigenvectors.unwrap(), vec![vec![1.0]]);
    }

    #[test]
    fn free_rotor_ladder() {
        let op = tridiag(6, |n| 4.0 * 0.2 * (n * n) as f64, 0.0);
        let s = eigensolve(&op, 5, false).unwrap();
        let expect = [0.0, 0.8, 0.8, 3.2, 3.2];
        for (a, b) in s.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(s.labels[3], LevelLabel::Qubit(3));
    }

    #[test]
    fn agrees_with_jacobi_oracle() {
        let op = ChargeBasisOperator::from_elements(&[7], 3, |r, c| {
            let d = r.abs_diff(c) as f64;
            if r == c {
                (r as f64 - 7.0).powi(2)
            } else {
                -1.0 / (1.0 + d)
            }
        })
        .unwrap();
        let dense = op.to_dense();
        let mut oracle = jacobi::eigenvalues(&dense);
        oracle.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let s = eigensolve(&op, 6, true).unwrap();
        for (a, b) in s.eigenvalues.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-11, "{a} vs {b}");
        }
        let vecs = s.eigenvectors.unwrap();
        for (i, v) in vecs.iter().enumerate() {
            let hv = op.apply(v);
            for (x, y) in hv.iter().zip(v) {
                assert!((x - s.eigenvalues[i] * y).abs() < 1e-10);
            }
            for (j, u) in vecs.iter().enumerate() {
                let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn too_many_levels() {
        let op = tridiag(1, |_| 0.0, 1.0);
        assert!(matches!(
            eigensolve(&op, 4, false),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            eigensolve(&op, 0, false),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn convergence_loop_reports_cutoff() {
        let model = |n_cut: usize| -> Result<ChargeBasisOperator> {
            Ok(tridiag(n_cut, |n| 0.8 * (n * n) as f64, -5.0))
        };
        let s = solve_converged(
            &model,
            4,
            true,
            &ConvergencePolicy {
                n_cut_start: 5,
                ..ConvergencePolicy::SINGLE_MODE
            },
        )
        .unwrap();
        assert!(s.n_cut_used >= 10);
        assert!(s.eigenvectors.is_some());
    }

    #[test]
    fn convergence_failure_carries_iterates() {
        // eigenvalue −n_cut never settles
        let model = |n_cut: usize| -> Result<ChargeBasisOperator> {
            Ok(tridiag(n_cut, |n| -(n.abs() as f64), 0.0))
        };
        let policy = ConvergencePolicy {
            n_cut_start: 5,
            n_cut_step: 5,
            n_cut_max: 20,
            tol: 1e-10,
        };
        match solve_converged(&model, 1, false, &policy) {
            Err(Error::Convergence {
                previous,
                last,
                n_cut,
                ..
            }) => {
                assert_eq!(n_cut, 20);
                assert_eq!(previous, vec![-15.0]);
                assert_eq!(last, vec![-20.0]);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    /// Two decoupled rotors with a transmon-like hop on the minor mode; the
    /// rotor levels are doubly degenerate.
    fn product_operator(n_cut: usize) -> ChargeBasisOperator {
        let w = 2 * n_cut + 1;
        ChargeBasisOperator::from_elements(&[n_cut, n_cut], w, |r, c| {
            let (nr, mr) = (charge_of(r / w, n_cut), charge_of(r % w, n_cut));
            let (nc, mc) = (charge_of(c / w, n_cut), charge_of(c % w, n_cut));
            if r == c {
                1.3 * (nr * nr) as f64 + 0.4 * (mr * mr) as f64
            } else if nr == nc && (mr - mc).abs() == 1 {
                -3.0
            } else {
                0.0
            }
        })
        .unwrap()
    }

    #[test]
    fn krylov_matches_band_solver_with_degeneracy() {
        let op = product_operator(13);
        assert!(op.dim() >= ITERATIVE_MIN_DIM);
        let (direct, _) = band_lowest(&op, 14, false).unwrap();
        let (krylov, vectors) = shift_invert_lowest(&op, 14, true).unwrap();
        for (a, b) in direct.iter().zip(&krylov) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        assert!((krylov[1] - krylov[2]).abs() < 1e-10);
        let vectors = vectors.unwrap();
        for (i, v) in vectors.iter().enumerate() {
            let hv = op.apply(v);
            let res: f64 = hv
                .iter()
                .zip(v)
                .map(|(h, x)| (h - krylov[i] * x).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(res <= RESIDUAL_TOL * op.max_abs(), "residual {res} at {i}");
            for u in &vectors[..i] {
                assert!(dot(u, v).abs() < 1e-10);
            }
        }
    }
}
