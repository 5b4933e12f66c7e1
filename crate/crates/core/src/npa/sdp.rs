//! Dense primal-dual interior-point solver for small semidefinite programs
//! in the standard pair
//!
//! ```text
//! (P)  min ⟨C, X⟩  s.t. ⟨A_k, X⟩ = b_k,  X ⪰ 0
//! (D)  max b·y     s.t. C − Σ_k y_k A_k = Z ⪰ 0
//! ```
//!
//! The constraint matrices are sparse lists of entries. Search directions
//! use the HKM scaling with a Mehrotra predictor-corrector step.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

/// A sparse symmetric matrix given by all of its nonzero entries
/// (both `(i, j)` and `(j, i)` are listed).
pub type SparseSym = Vec<(usize, usize, f64)>;

#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub c: DMatrix<f64>,
    pub a: Vec<SparseSym>,
    pub b: DVector<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    MaxIterations,
    Infeasible,
}

impl SdpStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SdpStatus::Optimal => "optimal",
            SdpStatus::MaxIterations => "max-iterations",
            SdpStatus::Infeasible => "infeasible",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// `⟨C, X⟩`.
    pub primal_objective: f64,
    /// `b·y`.
    pub dual_objective: f64,
    pub gap: f64,
    pub iterations: usize,
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub z: DMatrix<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            tol: 1e-8,
            max_iterations: 100,
        }
    }
}

fn inner_sparse(a: &SparseSym, m: &DMatrix<f64>) -> f64 {
    a.iter().map(|&(i, j, v)| v * m[(i, j)]).sum()
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.dot(b)
}

impl SdpProblem {
    pub fn size(&self) -> usize {
        self.c.nrows()
    }

    pub fn num_constraints(&self) -> usize {
        self.a.len()
    }

    /// `(⟨A_k, X⟩)_k`.
    pub fn apply(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|a| inner_sparse(a, x)))
    }

    /// `Σ_k y_k A_k`.
    pub fn adjoint(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for (a, &yk) in self.a.iter().zip(y.iter()) {
            for &(i, j, v) in a {
                m[(i, j)] += yk * v;
            }
        }
        m
    }

    fn check(&self) -> Result<()> {
        let n = self.size();
        if !self.c.is_square() || self.b.len() != self.a.len() {
            return Err(Error::Invalid("SDP data have inconsistent sizes".into()));
        }
        if self.a.iter().flatten().any(|&(i, j, _)| i >= n || j >= n) {
            return Err(Error::Invalid("SDP constraint entry out of range".into()));
        }
        Ok(())
    }

    /// `M_ik = Tr(A_i X A_k Z⁻¹)`, accumulated entry by entry. Uses the
    /// symmetry of `X` and `Z⁻¹` to read both along columns.
    fn schur(&self, x: &DMatrix<f64>, zinv: &DMatrix<f64>, owner: &[Vec<(usize, usize, f64)>]) -> DMatrix<f64> {
        let m = self.a.len();
        let n = x.nrows();
        let xs = x.as_slice();
        let zs = zinv.as_slice();
        let mut out = vec![0.0; m * m];
        for (i, ai) in self.a.iter().enumerate() {
            let row = &mut out[i * m..(i + 1) * m];
            for &(p, q, v) in ai {
                let xq = &xs[q * n..(q + 1) * n];
                let zp = &zs[p * n..(p + 1) * n];
                for (r, &xqr) in xq.iter().enumerate() {
                    if xqr == 0.0 {
                        continue;
                    }
                    let f = v * xqr;
                    for &(k, s, w) in &owner[r] {
                        row[k] += f * w * zp[s];
                    }
                }
            }
        }
        DMatrix::from_row_slice(m, m, &out)
    }
}

/// Largest step in `(0, 1]` keeping `m + α·d` positive definite, shortened
/// by the factor `tau`.
fn step_length(m: &DMatrix<f64>, d: &DMatrix<f64>, tau: f64) -> f64 {
    let Some(chol) = Cholesky::new(m.clone()) else {
        return 0.0;
    };
    let l = chol.l();
    let Some(linv) = l.clone().try_inverse() else {
        return 0.0;
    };
    let w = &linv * d * linv.transpose();
    let w = (&w + w.transpose()) * 0.5;
    let lmin = w.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    if lmin >= 0.0 {
        1.0
    } else {
        (tau / -lmin).min(1.0)
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Minimum eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    symmetrize(m.clone())
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn solve(problem: &SdpProblem, options: SdpOptions) -> Result<SdpSolution> {
    solve_until(problem, options, |_, _| false)
}

/// Like [`solve`], but stops as soon as `done(x, y)` holds for an iterate;
/// the status is then `MaxIterations` unless the iterate is also optimal.
pub fn solve_until(
    problem: &SdpProblem,
    options: SdpOptions,
    mut done: impl FnMut(&DMatrix<f64>, &DVector<f64>) -> bool,
) -> Result<SdpSolution> {
    problem.check()?;
    let n = problem.size();
    let m = problem.num_constraints();
    let b = &problem.b;
    let c = &problem.c;
    // owner[r] lists (k, s, w) for every entry (r, s) = w of A_k
    let mut owner: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); n];
    for (k, a) in problem.a.iter().enumerate() {
        for &(r, s, w) in a {
            owner[r].push((k, s, w));
        }
    }
    let scale = (1.0 + c.norm()).max(1.0 + b.amax()).max(n as f64).sqrt() * 2.0;
    let mut x = DMatrix::identity(n, n) * scale;
    let mut z = DMatrix::identity(n, n) * scale;
    let mut y = DVector::zeros(m);
    let norm_b = 1.0 + b.norm();
    let norm_c = 1.0 + c.norm();
    let mut status = SdpStatus::MaxIterations;
    let mut iterations = 0;
    for it in 0..options.max_iterations {
        iterations = it;
        let rp = b - problem.apply(&x);
        let rd = c - &z - problem.adjoint(&y);
        let pobj = inner(c, &x);
        let dobj = b.dot(&y);
        let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let pinf = rp.norm() / norm_b;
        let dinf = rd.norm() / norm_c;
        log::trace!("sdp it {it}: pobj {pobj:.9} dobj {dobj:.9} gap {rel_gap:.2e} pinf {pinf:.2e} dinf {dinf:.2e}");
        if rel_gap < options.tol && pinf < options.tol && dinf < options.tol {
            status = SdpStatus::Optimal;
            break;
        }
        if done(&x, &y) {
            break;
        }
        if dobj > 1e10 * norm_c && dinf < options.tol {
            // an improving ray of (D): (P) is infeasible
            status = SdpStatus::Infeasible;
            break;
        }
        let Some(zchol) = Cholesky::new(z.clone()) else {
            log::debug!("sdp: Z lost definiteness at iteration {it}");
            break;
        };
        let zinv = symmetrize(zchol.inverse());
        let schur = problem.schur(&x, &zinv, &owner);
        let chol = match Cholesky::new(schur.clone()) {
            Some(ch) => ch,
            None => {
                let ridge = 1e-12 * schur.diagonal().amax().max(1.0);
                match Cholesky::new(schur + DMatrix::identity(m, m) * ridge) {
                    Some(ch) => ch,
                    None => {
                        log::debug!("sdp: Schur complement is singular at iteration {it}");
                        break;
                    }
                }
            }
        };
        let x_rd_zinv = &x * &rd * &zinv;
        let a_x_rd_zinv = problem.apply(&x_rd_zinv);
        let direction = |r: &DMatrix<f64>| {
            let rhs = &rp - problem.apply(r) + &a_x_rd_zinv;
            let dy = chol.solve(&rhs);
            let dz = &rd - problem.adjoint(&dy);
            let dx = symmetrize(r - &x * &dz * &zinv);
            (dx, dy, dz)
        };
        let mu = inner(&x, &z) / n as f64;
        let (dx_p, _, dz_p) = direction(&(-&x));
        let ap = step_length(&x, &dx_p, 1.0);
        let ad = step_length(&z, &dz_p, 1.0);
        let mu_aff = inner(&(&x + &dx_p * ap), &(&z + &dz_p * ad)) / n as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3).max(1e-4);
        let r = &zinv * (sigma * mu) - &x - &dx_p * &dz_p * &zinv;
        let (dx, dy, dz) = direction(&r);
        let tau = 0.98;
        let ap = step_length(&x, &dx, tau);
        let ad = step_length(&z, &dz, tau);
        if ap < 1e-12 && ad < 1e-12 {
            log::debug!("sdp: no progress at iteration {it}");
            break;
        }
        x = symmetrize(&x + &dx * ap);
        y += &dy * ad;
        z = symmetrize(&z + &dz * ad);
    }
    let pobj = inner(c, &x);
    let dobj = b.dot(&y);
    Ok(SdpSolution {
        status,
        primal_objective: pobj,
        dual_objective: dobj,
        gap: (pobj - dobj).abs(),
        iterations,
        x,
        y,
        z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// max y s.t. [[1, y], [y, 1]] ⪰ 0, written with C = I, A = −(E12 + E21).
    #[test]
    fn two_by_two() {
        let p = SdpProblem {
            c: DMatrix::identity(2, 2),
            a: vec![vec![(0, 1, -1.0), (1, 0, -1.0)]],
            b: DVector::from_vec(vec![1.0]),
        };
        let s = solve(&p, SdpOptions::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert_abs_diff_eq!(s.dual_objective, 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(s.primal_objective, 1.0, epsilon = 1e-7);
    }

    /// Largest eigenvalue of S as max −t s.t. tI − S ⪰ 0: C = −S, A = −I,
    /// b = −1.
    #[test]
    fn largest_eigenvalue() {
        let s = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]);
        let p = SdpProblem {
            c: -s.clone(),
            a: vec![(0..3).map(|i| (i, i, -1.0)).collect()],
            b: DVector::from_vec(vec![-1.0]),
        };
        let sol = solve(&p, SdpOptions::default()).unwrap();
        let lmax = s.symmetric_eigenvalues().amax();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert_abs_diff_eq!(-sol.dual_objective, lmax, epsilon = 1e-7);
    }

    #[test]
    fn rejects_bad_entries() {
        let p = SdpProblem {
            c: DMatrix::identity(2, 2),
            a: vec![vec![(0, 5, 1.0)]],
            b: DVector::from_vec(vec![1.0]),
        };
        assert!(solve(&p, SdpOptions::default()).is_err());
    }
}
