//! Multipartite states over a tensor product of local spaces. Player `0`
//! is the most significant tensor factor.

use nalgebra::DVector;
use num_complex::Complex64;

use super::linalg::{c, hermitian_eigenvalues, is_hermitian, trace_re, CMat};
use crate::error::{invalid, Result};

pub type CVec = DVector<Complex64>;

/// Mixed-radix digits of a flat index.
fn digits(mut i: usize, dims: &[usize]) -> Vec<usize> {
    let mut d = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        d[k] = i % dims[k];
        i /= dims[k];
    }
    d
}

fn flat(d: &[usize], dims: &[usize]) -> usize {
    d.iter().zip(dims).fold(0, |acc, (&x, &n)| acc * n + x)
}

fn check_subset(keep: &[usize], n: usize) -> Result<()> {
    if keep.is_empty() {
        return Err(invalid!("subset of players must be non-empty"));
    }
    let mut seen = vec![false; n];
    for &k in keep {
        if k >= n || seen[k] {
            return Err(invalid!("invalid player subset {keep:?} for {n} players"));
        }
        seen[k] = true;
    }
    Ok(())
}

/// For every flat index: its index inside the `keep` factors (in the given
/// order) and inside the remaining factors (in ascending order).
fn split_indices(dims: &[usize], keep: &[usize]) -> (Vec<(usize, usize)>, usize, usize) {
    let rest: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
    let kd: Vec<usize> = keep.iter().map(|&p| dims[p]).collect();
    let rd: Vec<usize> = rest.iter().map(|&p| dims[p]).collect();
    let total: usize = dims.iter().product();
    let map = (0..total)
        .map(|i| {
            let d = digits(i, dims);
            let k: Vec<usize> = keep.iter().map(|&p| d[p]).collect();
            let r: Vec<usize> = rest.iter().map(|&p| d[p]).collect();
            (flat(&k, &kd), flat(&r, &rd))
        })
        .collect();
    (map, kd.iter().product(), rd.iter().product())
}

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    pub dims: Vec<usize>,
    pub rho: CMat,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace within `1e-12` and positivity
    /// within `1e-10`.
    pub fn new(dims: Vec<usize>, rho: CMat) -> Result<DensityMatrix> {
        let d = Self::unchecked(dims, rho)?;
        if !is_hermitian(&d.rho, 1e-12) {
            return Err(invalid!("density matrix is not Hermitian"));
        }
        if (trace_re(&d.rho) - 1.0).abs() > 1e-12 {
            return Err(invalid!("density matrix trace is {}", trace_re(&d.rho)));
        }
        if hermitian_eigenvalues(&d.rho)?[0] < -1e-10 {
            return Err(invalid!("density matrix is not positive semidefinite"));
        }
        Ok(d)
    }

    fn unchecked(dims: Vec<usize>, rho: CMat) -> Result<DensityMatrix> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || rho.nrows() != total || rho.ncols() != total {
            return Err(invalid!("dimensions {dims:?} do not match a {}x{} matrix", rho.nrows(), rho.ncols()));
        }
        Ok(DensityMatrix { dims, rho })
    }

    pub fn from_pure(psi: &PureState) -> DensityMatrix {
        DensityMatrix {
            dims: psi.dims.clone(),
            rho: &psi.amplitudes * psi.amplitudes.adjoint(),
        }
    }

    pub fn trace(&self) -> f64 {
        trace_re(&self.rho)
    }

    /// Reduced state on `keep`, factors ordered as listed.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        check_subset(keep, self.dims.len())?;
        let (map, dk, dr) = split_indices(&self.dims, keep);
        let mut inverse = vec![0; dk * dr];
        for (i, &(k, r)) in map.iter().enumerate() {
            inverse[k * dr + r] = i;
        }
        let mut out = CMat::zeros(dk, dk);
        for (i, &(k1, r)) in map.iter().enumerate() {
            for k2 in 0..dk {
                out[(k1, k2)] += self.rho[(i, inverse[k2 * dr + r])];
            }
        }
        Ok(DensityMatrix {
            dims: keep.iter().map(|&p| self.dims[p]).collect(),
            rho: out,
        })
    }

    /// Transposes the tensor factors listed in `side`.
    pub fn partial_transpose(&self, side: &[usize]) -> Result<CMat> {
        check_subset(side, self.dims.len())?;
        let total = self.rho.nrows();
        let idx: Vec<Vec<usize>> = (0..total).map(|i| digits(i, &self.dims)).collect();
        let mut out = CMat::zeros(total, total);
        for i in 0..total {
            for j in 0..total {
                let (mut di, mut dj) = (idx[i].clone(), idx[j].clone());
                for &p in side {
                    std::mem::swap(&mut di[p], &mut dj[p]);
                }
                out[(flat(&di, &self.dims), flat(&dj, &self.dims))] = self.rho[(i, j)];
            }
        }
        Ok(out)
    }
}

/// Minimum eigenvalue of the partial transpose over `side`; negative means
/// the bipartition `side | rest` is entangled.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix, side: &[usize]) -> Result<f64> {
    if side.len() >= rho.dims.len() {
        return Err(invalid!("side {side:?} must be a proper subset of the players"));
    }
    Ok(hermitian_eigenvalues(&rho.partial_transpose(side)?)?[0])
}

#[derive(Clone, Debug)]
pub struct PureState {
    pub dims: Vec<usize>,
    pub amplitudes: CVec,
}

impl PureState {
    /// Normalises the amplitudes.
    pub fn new(dims: Vec<usize>, amplitudes: CVec) -> Result<PureState> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || amplitudes.len() != total {
            return Err(invalid!("dimensions {dims:?} do not match {} amplitudes", amplitudes.len()));
        }
        let norm = amplitudes.norm();
        if norm < 1e-300 {
            return Err(invalid!("zero state vector"));
        }
        Ok(PureState {
            dims,
            amplitudes: amplitudes / c(norm, 0.0),
        })
    }

    pub fn basis(dims: Vec<usize>, index: usize) -> Result<PureState> {
        let total: usize = dims.iter().product();
        let mut v = CVec::zeros(total);
        if index >= total {
            return Err(invalid!("basis index {index} out of range"));
        }
        v[index] = c(1.0, 0.0);
        PureState::new(dims, v)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend(&other.dims);
        PureState {
            dims,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    /// Reorders tensor factors: factor `k` of the result is factor
    /// `order[k]` of `self`.
    pub fn permute(&self, order: &[usize]) -> Result<PureState> {
        check_subset(order, self.dims.len())?;
        if order.len() != self.dims.len() {
            return Err(invalid!("permutation {order:?} has the wrong length"));
        }
        let new_dims: Vec<usize> = order.iter().map(|&p| self.dims[p]).collect();
        let mut out = CVec::zeros(self.amplitudes.len());
        for i in 0..self.amplitudes.len() {
            let d = digits(i, &self.dims);
            let nd: Vec<usize> = order.iter().map(|&p| d[p]).collect();
            out[flat(&nd, &new_dims)] = self.amplitudes[i];
        }
        Ok(PureState {
            dims: new_dims,
            amplitudes: out,
        })
    }

    /// Groups consecutive factors: `sizes[k]` factors form new factor `k`.
    pub fn group(&self, sizes: &[usize]) -> Result<PureState> {
        if sizes.iter().sum::<usize>() != self.dims.len() {
            return Err(invalid!("grouping {sizes:?} does not cover {} factors", self.dims.len()));
        }
        let mut dims = Vec::new();
        let mut at = 0;
        for &s in sizes {
            dims.push(self.dims[at..at + s].iter().product());
            at += s;
        }
        Ok(PureState {
            dims,
            amplitudes: self.amplitudes.clone(),
        })
    }

    /// `Tr_rest |ψ⟩⟨ψ|` on `keep`, without forming the global density
    /// matrix.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        check_subset(keep, self.dims.len())?;
        let (map, dk, dr) = split_indices(&self.dims, keep);
        let mut m = CMat::zeros(dk, dr);
        for (i, &(k, r)) in map.iter().enumerate() {
            m[(k, r)] = self.amplitudes[i];
        }
        Ok(DensityMatrix {
            dims: keep.iter().map(|&p| self.dims[p]).collect(),
            rho: &m * m.adjoint(),
        })
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &PureState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm()
    }
}

/// A shared state, kept as a vector when pure.
#[derive(Clone, Debug)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn dims(&self) -> &[usize] {
        match self {
            State::Pure(p) => &p.dims,
            State::Mixed(m) => &m.dims,
        }
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        match self {
            State::Pure(p) => p.partial_trace(keep),
            State::Mixed(m) => m.partial_trace(keep),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            State::Pure(p) => DensityMatrix::from_pure(p),
            State::Mixed(m) => m.clone(),
        }
    }
}

/// `(|00⟩ + |11⟩)/√2` on two qubits.
pub fn epr() -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    PureState::new(
        vec![2, 2],
        CVec::from_vec(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]),
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn epr_reductions() {
        let rho = DensityMatrix::from_pure(&epr());
        let a = rho.partial_trace(&[0]).unwrap();
        assert!((a.rho[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!(a.rho[(0, 1)].norm() < 1e-12);
        assert_abs_diff_eq!(a.trace(), 1.0, epsilon = 1e-12);
        let pt = rho.partial_transpose(&[1]).unwrap();
        let eig = hermitian_eigenvalues(&pt).unwrap();
        for (x, y) in eig.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(ppt_min_eigenvalue(&rho, &[0]).unwrap(), -0.5, epsilon = 1e-10);
        assert!(rho.partial_trace(&[]).is_err());
        assert!(ppt_min_eigenvalue(&rho, &[0, 1]).is_err());
    }

    #[test]
    fn pure_and_mixed_traces_agree() {
        let psi = epr().tensor(&PureState::basis(vec![3], 2).unwrap()).tensor(&epr());
        let rho = DensityMatrix::from_pure(&psi);
        for keep in [vec![0], vec![1, 2], vec![4, 0], vec![2, 3, 1]] {
            let a = psi.partial_trace(&keep).unwrap();
            let b = rho.partial_trace(&keep).unwrap();
            assert!(super::super::linalg::max_abs_diff(&a.rho, &b.rho) < 1e-12);
            assert_abs_diff_eq!(a.trace(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn permutation_moves_factors() {
        let psi = PureState::basis(vec![2, 3], 1 * 3 + 2).unwrap();
        let swapped = psi.permute(&[1, 0]).unwrap();
        assert_eq!(swapped.dims, vec![3, 2]);
        assert_abs_diff_eq!(swapped.amplitudes[2 * 2 + 1].re, 1.0);
        let grouped = psi.tensor(&psi).group(&[2, 2]).unwrap();
        assert_eq!(grouped.dims, vec![6, 6]);
    }

    #[test]
    fn validation() {
        let bad = CMat::identity(2, 2);
        assert!(DensityMatrix::new(vec![2], bad).is_err());
        let ok = CMat::identity(2, 2) * c(0.5, 0.0);
        assert!(DensityMatrix::new(vec![2], ok).is_ok());
    }
}
