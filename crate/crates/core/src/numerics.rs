//! Precision selection and the small dense linear-algebra kernel used by the
//! window and mixing designers.
//!
//! Design stages always run in `f64`. Filter application is generic over
//! [`Real`], so a bank instantiated with `f32` performs every multiply, add
//! and subtraction in single precision.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use num_complex::{Complex, Complex64};
use num_traits::{Float, FloatConst, NumAssign, Zero};

use crate::error::{invalid, Error, Result};

/// Default upper bound on the condition estimate accepted by [`solve_linear`].
pub const DEFAULT_CONDITION_BOUND: f64 = 1e12;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Floating-point width used for filter application and error analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Precision {
    Single,
    #[default]
    Double,
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Single => f.write_str("single"),
            Precision::Double => f.write_str("double"),
        }
    }
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "single" | "f32" => Ok(Precision::Single),
            "double" | "f64" => Ok(Precision::Double),
            other => Err(Error::Parse(format!("unknown precision '{other}'"))),
        }
    }
}

/// Scalar type a filter bank runs in.
pub trait Real:
    Float + FloatConst + NumAssign + Default + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const PRECISION: Precision;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;

    fn complex(z: Complex64) -> Complex<Self> {
        Complex::new(Self::from_f64(z.re), Self::from_f64(z.im))
    }

    fn widen(z: Complex<Self>) -> Complex64 {
        Complex64::new(z.re.to_f64(), z.im.to_f64())
    }
}

impl Real for f32 {
    const PRECISION: Precision = Precision::Single;

    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    const PRECISION: Precision = Precision::Double;

    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RealMatrix = Matrix<f64>;
pub type ComplexMatrix = Matrix<Complex64>;

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return invalid("ragged rows");
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().cloned().collect(),
        })
    }
}

impl<T> Matrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl RealMatrix {
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }
}

impl ComplexMatrix {
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::zero()
            }
        })
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return invalid(format!(
                "dimension mismatch: {}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            ));
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for p in 0..self.cols {
                let a = self[(i, p)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(p, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn conj_transpose(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.norm()))
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.im.abs()))
    }

    pub fn real_part(&self) -> RealMatrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.re).collect(),
        }
    }

    /// Checks `A[i][j] == conj(A[j][i])` to a tolerance relative to the largest entry.
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let tol = rel_tol * self.max_abs().max(f64::MIN_POSITIVE);
        (0..self.rows)
            .all(|i| (i..self.cols).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: RealMatrix,
    pub sweeps: usize,
}

impl SymmetricEigen {
    pub fn vector(&self, i: usize) -> Vec<f64> {
        (0..self.vectors.rows())
            .map(|r| self.vectors[(r, i)])
            .collect()
    }
}

/// Cyclic Jacobi eigen-solver for real symmetric matrices.
pub fn eig_sym(matrix: &RealMatrix) -> Result<SymmetricEigen> {
    if !matrix.is_square() {
        return invalid(format!(
            "eig_sym needs a square matrix, got {}x{}",
            matrix.rows(),
            matrix.cols()
        ));
    }
    let n = matrix.rows();
    let scale = matrix.max_abs();
    for i in 0..n {
        for j in i + 1..n {
            if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-10 * scale {
                return invalid(format!("matrix not symmetric at ({i},{j})"));
            }
        }
    }

    let mut a = matrix.clone();
    let mut v = RealMatrix::identity(n);
    let norm = a.frobenius();
    let mut sweeps = 0;

    loop {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * norm || off == 0.0 {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NumericalFailure { iterations: sweeps });
        }
        sweeps += 1;

        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    // stable sort keeps solver order among ties
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .partial_cmp(&a[(i, i)])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = RealMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

/// LU factorization with partial pivoting; `None` if a zero pivot is met.
struct Lu {
    n: usize,
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(a: &ComplexMatrix) -> Option<Lu> {
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (piv, mag) =
                (col..n)
                    .map(|r| (r, lu[(r, col)].norm()))
                    .fold(
                        (col, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if mag == 0.0 || !mag.is_finite() {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    let tmp = lu[(col, j)];
                    lu[(col, j)] = lu[(piv, j)];
                    lu[(piv, j)] = tmp;
                }
                perm.swap(col, piv);
            }
            let d = lu[(col, col)];
            for r in col + 1..n {
                let f = lu[(r, col)] / d;
                lu[(r, col)] = f;
                if f.is_zero() {
                    continue;
                }
                for j in col + 1..n {
                    let u = lu[(col, j)];
                    lu[(r, j)] -= f * u;
                }
            }
        }
        Some(Lu { n, lu, perm })
    }

    fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.n;
        let mut x = ComplexMatrix::from_fn(n, b.cols(), |i, j| b[(self.perm[i], j)]);
        for j in 0..b.cols() {
            for i in 0..n {
                let mut acc = x[(i, j)];
                for p in 0..i {
                    acc -= self.lu[(i, p)] * x[(p, j)];
                }
                x[(i, j)] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = x[(i, j)];
                for p in i + 1..n {
                    acc -= self.lu[(i, p)] * x[(p, j)];
                }
                x[(i, j)] = acc / self.lu[(i, i)];
            }
        }
        x
    }
}

/// Returns `‖A‖₁·‖A⁻¹‖₁`, or `+∞` when `A` is singular.
pub fn condition_estimate(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() {
        return invalid("condition estimate needs a square matrix");
    }
    if a.rows() == 0 {
        return Ok(1.0);
    }
    match Lu::factor(a) {
        None => Ok(f64::INFINITY),
        Some(lu) => {
            let inv = lu.solve(&ComplexMatrix::identity(a.rows()));
            let est = a.norm_one() * inv.norm_one();
            Ok(if est.is_finite() {
                est.max(1.0)
            } else {
                f64::INFINITY
            })
        }
    }
}

/// Solves `A·X = B`, refusing systems whose condition estimate exceeds `bound`.
pub fn solve_linear(a: &ComplexMatrix, b: &ComplexMatrix, bound: f64) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return invalid("solve_linear needs a square coefficient matrix");
    }
    if a.rows() != b.rows() {
        return invalid(format!(
            "right-hand side has {} rows, expected {}",
            b.rows(),
            a.rows()
        ));
    }
    let estimate = condition_estimate(a)?;
    if estimate.is_nan() || estimate > bound {
        return Err(Error::IllConditioned { estimate, bound });
    }
    let lu = Lu::factor(a).ok_or(Error::IllConditioned {
        estimate: f64::INFINITY,
        bound,
    })?;
    Ok(lu.solve(b))
}
