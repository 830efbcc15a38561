//! Dense complex-matrix kernel: everything downstream is expressed against
//! this contract. Backed by nalgebra; exact arithmetic lives in [`crate::dyadic`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Cx = Complex64;

/// Hermitian tolerance used by flag assertions and eigensolver input checks.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense complex matrix, the carrier for elements of M_n and for operators
/// on the truncated GNS spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    data: DMatrix<Cx>,
}

impl CMatrix {
    pub fn from_dmatrix(data: DMatrix<Cx>) -> Self {
        CMatrix { data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            data: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        CMatrix {
            data: DMatrix::identity(n, n),
        }
    }

    /// Build from a row-major closure.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx) -> Self {
        CMatrix {
            data: DMatrix::from_fn(rows, cols, |r, c| f(r, c)),
        }
    }

    /// Row-major nested rows of (re, im) pairs; the serialization layout.
    pub fn from_rows(rows: &[Vec<(f64, f64)>]) -> Result<Self> {
        let nr = rows.len();
        if nr == 0 {
            return Err(Error::Empty("matrix with no rows".into()));
        }
        let nc = rows[0].len();
        if rows.iter().any(|r| r.len() != nc) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Self::from_fn(nr, nc, |r, c| {
            Cx::new(rows[r][c].0, rows[r][c].1)
        }))
    }

    pub fn diag_real(d: &[f64]) -> Self {
        Self::from_fn(d.len(), d.len(), |r, c| {
            if r == c {
                Cx::new(d[r], 0.0)
            } else {
                Cx::new(0.0, 0.0)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, r: usize, c: usize) -> Cx {
        self.data[(r, c)]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Cx) {
        self.data[(r, c)] = v;
    }

    pub fn dmatrix(&self) -> &DMatrix<Cx> {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        CMatrix {
            data: self.data.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        CMatrix {
            data: self.data.transpose(),
        }
    }

    pub fn conjugate(&self) -> Self {
        CMatrix {
            data: self.data.conjugate(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        CMatrix {
            data: &self.data * &rhs.data,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        CMatrix {
            data: &self.data + &rhs.data,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        CMatrix {
            data: &self.data - &rhs.data,
        }
    }

    pub fn scale(&self, s: Cx) -> Self {
        CMatrix {
            data: self.data.map(|z| z * s),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Cx::new(s, 0.0))
    }

    pub fn trace(&self) -> Cx {
        self.data.diagonal().iter().sum()
    }

    /// Normalized trace τ = tr/n, so τ(1) = 1.
    pub fn normalized_trace(&self) -> Cx {
        self.trace() / Cx::new(self.rows() as f64, 0.0)
    }

    /// Entrywise max modulus, ‖A‖_max.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ‖A − A*‖_max.
    pub fn hermitian_residual(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn is_hermitian_within(&self, tol: f64) -> bool {
        self.is_square() && self.hermitian_residual() <= tol
    }

    /// Largest singular value, relative accuracy 1e−10.
    pub fn spectral_norm(&self) -> Result<f64> {
        spectral_norm(self)
    }
}

/// Largest singular value of `a` via the Hermitian eigenvalues of A*A.
pub fn spectral_norm(a: &CMatrix) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(0.0);
    }
    // Scale first: eigenvalues of (A/s)*(A/s) stay well inside f64 range.
    let s = a.max_abs();
    if s == 0.0 {
        return Ok(0.0);
    }
    let b = a.scale_re(1.0 / s);
    let gram = b.adjoint().mul(&b);
    let eigs = gram.data.symmetric_eigenvalues();
    let lmax = eigs.iter().fold(0.0f64, |m, &l| m.max(l)).max(0.0);
    Ok(s * lmax.sqrt())
}

/// Eigenvalues of a Hermitian matrix, ascending. Input is rejected when
/// ‖A − A*‖_max exceeds [`HERMITIAN_TOL`].
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    let sym = symmetrize(a);
    let mut eigs: Vec<f64> = sym.data.symmetric_eigenvalues().iter().copied().collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(eigs)
}

/// Full Hermitian eigendecomposition: ascending eigenvalues and the matrix of
/// eigenvectors V (columns), with ‖AV − VΛ‖ ≤ 1e−9‖A‖.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_hermitian(a)?;
    let sym = symmetrize(a);
    let se = nalgebra::linalg::SymmetricEigen::new(sym.data);
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let eigs: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let n = eigs.len();
    let mut v = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        v.set_column(col, &se.eigenvectors.column(i));
    }
    Ok((eigs, CMatrix::from_dmatrix(v)))
}

fn check_hermitian(a: &CMatrix) -> Result<()> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "hermitian eigensolver needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let residual = a.hermitian_residual();
    if residual > HERMITIAN_TOL && residual > HERMITIAN_TOL * a.max_abs() {
        return Err(Error::NotHermitian {
            residual,
            tol: HERMITIAN_TOL,
        });
    }
    Ok(())
}

// (A + A*)/2: removes the ≤1e−12 skew before handing to the solver.
fn symmetrize(a: &CMatrix) -> CMatrix {
    a.add(&a.adjoint()).scale_re(0.5)
}

/// Contiguous block-diagonal assembly of square blocks.
pub fn block_diag(blocks: &[CMatrix]) -> Result<CMatrix> {
    if blocks.is_empty() {
        return Err(Error::Empty("block_diag of no blocks".into()));
    }
    for b in blocks {
        if !b.is_square() {
            return Err(Error::Shape("block_diag blocks must be square".into()));
        }
    }
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        for r in 0..b.rows() {
            for c in 0..b.cols() {
                out.set(off + r, off + c, b.get(r, c));
            }
        }
        off += b.rows();
    }
    Ok(out)
}

/// Kronecker product with `a` outermost:
/// kron(a, b)[(s·q+u),(t·q+v)] = a[s,t]·b[u,v] for b of size q.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = (a.rows(), a.cols());
    let (br, bc) = (b.rows(), b.cols());
    CMatrix::from_fn(ar * br, ac * bc, |r, c| {
        a.get(r / br, c / bc) * b.get(r % br, c % bc)
    })
}

/// a ⊗ 1_m with the repo-wide convention
/// (a ⊗ 1_m)[(s·m+u),(t·m+v)] = a[s,t]·δ_{u,v}.
pub fn kron_identity(a: &CMatrix, m: usize) -> Result<CMatrix> {
    if m == 0 {
        return Err(Error::OutOfRange("kron_identity with m = 0".into()));
    }
    if !a.is_square() {
        return Err(Error::Shape("kron_identity needs a square matrix".into()));
    }
    Ok(kron(a, &CMatrix::identity(m)))
}
