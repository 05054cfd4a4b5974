//! Vectors, square matrices and flat tensors over the Gaussian integers.
//!
//! Tensors are stored row-major with explicit shape metadata; all index
//! arithmetic funnels through [`Tensor::flat_index`]. Rank is computed by
//! fraction-free (Bareiss) elimination, which stays inside the ring: every
//! division it performs is exact by Sylvester's identity.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{CaError, Result};
use crate::gauss::Gauss;
use crate::scalar::IntScalar;

/// A finite family of Gaussian-integer amplitudes, one per degree of freedom.
#[derive(Clone, PartialEq, Eq, Serialize)]
#[serde(transparent, bound(serialize = "T: IntScalar"))]
pub struct Vector<T> {
    entries: Vec<Gauss<T>>,
}

impl<T: IntScalar> Vector<T> {
    pub fn new(entries: Vec<Gauss<T>>) -> Self {
        Vector { entries }
    }

    pub fn of(pairs: &[(i64, i64)]) -> Self {
        Vector {
            entries: pairs.iter().map(|&(re, im)| Gauss::of(re, im)).collect(),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Vector {
            entries: vec![Gauss::zero(); dim],
        }
    }

    /// Standard basis vector e_k.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[k] = Gauss::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, k: usize) -> &Gauss<T> {
        &self.entries[k]
    }

    pub fn entries(&self) -> &[Gauss<T>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Gauss::is_zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Vector {
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Vector {
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Gauss<T>) -> Self {
        Vector {
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul_i(&self) -> Self {
        Vector {
            entries: self.entries.iter().map(Gauss::mul_i).collect(),
        }
    }

    /// Sesquilinear product `sum_a conj(self_a) rhs_a`.
    pub fn dagger_dot(&self, rhs: &Self) -> Gauss<T> {
        let mut acc = Gauss::zero();
        for (a, b) in self.entries.iter().zip(&rhs.entries) {
            acc = &acc + &(&a.conj() * b);
        }
        acc
    }

    /// Plain bilinear product `sum_a self_a rhs_a` (no conjugation).
    pub fn dot(&self, rhs: &Self) -> Gauss<T> {
        let mut acc = Gauss::zero();
        for (a, b) in self.entries.iter().zip(&rhs.entries) {
            acc = &acc + &(a * b);
        }
        acc
    }

    /// `sum_a |self_a|^2`, the squared norm (not conserved by the dynamics).
    pub fn norm_sq(&self) -> T {
        self.dagger_dot(self).re
    }

    pub fn conj(&self) -> Self {
        Vector {
            entries: self.entries.iter().map(Gauss::conj).collect(),
        }
    }
}

impl<T: IntScalar> fmt::Debug for Vector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.entries).finish()
    }
}

impl<'de, T: IntScalar> Deserialize<'de> for Vector<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(Vector {
            entries: Vec::<Gauss<T>>::deserialize(deserializer)?,
        })
    }
}

/// A square matrix of Gaussian integers, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    dim: usize,
    entries: Vec<Gauss<T>>,
}

impl<T: IntScalar> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<Gauss<T>>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(CaError::NotSquare);
        }
        Ok(Matrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn of(rows: &[&[(i64, i64)]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(re, im)| Gauss::of(re, im)).collect())
                .collect(),
        )
    }

    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            entries: vec![Gauss::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m.entries[k * dim + k] = Gauss::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &Gauss<T> {
        &self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Gauss<T>) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Gauss::is_zero)
    }

    pub fn conj_transpose(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.entries[c * self.dim + r] = self.get(r, c).conj();
            }
        }
        out
    }

    /// Entrywise test against the conjugate transpose.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect().is_none()
    }

    fn hermitian_defect(&self) -> Option<(usize, usize)> {
        for r in 0..self.dim {
            for c in r..self.dim {
                if *self.get(r, c) != self.get(c, r).conj() {
                    return Some((r, c));
                }
            }
        }
        None
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        Ok(Matrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        Ok(Matrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for c in 0..d {
                let mut acc = Gauss::zero();
                for k in 0..d {
                    acc = &acc + &(self.get(r, k) * rhs.get(k, c));
                }
                out.entries[r * d + c] = acc;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &Vector<T>) -> Result<Vector<T>> {
        if v.dim() != self.dim {
            return Err(CaError::DimensionMismatch {
                expected: self.dim,
                found: v.dim(),
            });
        }
        let mut out = Vec::with_capacity(self.dim);
        for r in 0..self.dim {
            let mut acc = Gauss::zero();
            for c in 0..self.dim {
                acc = &acc + &(self.get(r, c) * v.get(c));
            }
            out.push(acc);
        }
        Ok(Vector::new(out))
    }

    /// Exact commutation test: `AB - BA == 0`.
    pub fn commutes(&self, rhs: &Self) -> Result<bool> {
        let ab = self.mul(rhs)?;
        let ba = rhs.mul(self)?;
        Ok(ab.sub(&ba)?.is_zero())
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut out = Self::identity(self.dim);
        for _ in 0..exp {
            out = out.mul(self).expect("same dimension by construction");
        }
        out
    }

    /// Kronecker product; the result acts on the concatenated index space.
    pub fn kron(&self, rhs: &Self) -> Self {
        let d1 = self.dim;
        let d2 = rhs.dim;
        let d = d1 * d2;
        let mut out = Self::zeros(d);
        for r1 in 0..d1 {
            for c1 in 0..d1 {
                for r2 in 0..d2 {
                    for c2 in 0..d2 {
                        out.entries[(r1 * d2 + r2) * d + (c1 * d2 + c2)] =
                            self.get(r1, c1) * rhs.get(r2, c2);
                    }
                }
            }
        }
        out
    }

    fn check_dim(&self, rhs: &Self) -> Result<()> {
        if self.dim != rhs.dim {
            return Err(CaError::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        Ok(())
    }

    /// Real parts of all entries, as a plain integer matrix.
    pub fn re_part(&self) -> IntMatrix<T> {
        IntMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|g| g.re.clone()).collect(),
        }
    }

    /// Imaginary parts of all entries, as a plain integer matrix.
    pub fn im_part(&self) -> IntMatrix<T> {
        IntMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|g| g.im.clone()).collect(),
        }
    }
}

impl<T: IntScalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}) [", self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                write!(f, "{} ", self.get(r, c))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Matrices serialize as nested arrays of ["re", "im"] pairs.
impl<T: IntScalar> Serialize for Matrix<T> {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[Gauss<T>]> = self.entries.chunks(self.dim.max(1)).collect();
        rows.serialize(serializer)
    }
}

impl<'de, T: IntScalar> Deserialize<'de> for Matrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Gauss<T>>>::deserialize(deserializer)?;
        Matrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// A validated self-adjoint matrix: `entries[a][b] == conj(entries[b][a])`.
///
/// Splits as `H = h_S + i h_A` with `h_S` real symmetric and `h_A` real
/// antisymmetric, both integer; see [`Matrix::re_part`] / [`Matrix::im_part`].
#[derive(Clone, PartialEq, Eq, Serialize)]
#[serde(transparent, bound(serialize = "T: IntScalar"))]
pub struct Hermitian<T>(Matrix<T>);

impl<T: IntScalar> Hermitian<T> {
    pub fn new(m: Matrix<T>) -> Result<Self> {
        match m.hermitian_defect() {
            None => Ok(Hermitian(m)),
            Some((row, col)) => Err(CaError::NotHermitian { row, col }),
        }
    }

    pub fn of(rows: &[&[(i64, i64)]]) -> Result<Self> {
        Self::new(Matrix::of(rows)?)
    }

    pub fn identity(dim: usize) -> Self {
        Hermitian(Matrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Hermitian(Matrix::zeros(dim))
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }
}

impl<T: IntScalar> Deref for Hermitian<T> {
    type Target = Matrix<T>;
    fn deref(&self) -> &Matrix<T> {
        &self.0
    }
}

impl<T: IntScalar> fmt::Debug for Hermitian<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian{:?}", self.0)
    }
}

impl<'de, T: IntScalar> Deserialize<'de> for Hermitian<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let m = Matrix::<T>::deserialize(deserializer)?;
        Hermitian::new(m).map_err(serde::de::Error::custom)
    }
}

/// A square matrix of plain integers (the symmetric/antisymmetric halves of a
/// self-adjoint matrix live here).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix<T> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: IntScalar> IntMatrix<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.entries[row * self.dim + col]
    }

    pub fn mul_ints(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.dim {
            return Err(CaError::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok((0..self.dim)
            .map(|r| {
                let mut acc = T::zero();
                for c in 0..self.dim {
                    acc = acc + self.get(r, c).clone() * v[c].clone();
                }
                acc
            })
            .collect())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|r| (r..self.dim).all(|c| *self.get(r, c) == *self.get(c, r)))
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..self.dim).all(|r| (r..self.dim).all(|c| *self.get(r, c) == -self.get(c, r).clone()))
    }
}

/// A flat row-major tensor with explicit shape, holding a multipartite
/// amplitude at one clock tuple.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TensorRepr<T>", into = "TensorRepr<T>")]
#[serde(bound(serialize = "T: IntScalar", deserialize = "T: IntScalar"))]
pub struct Tensor<T: IntScalar> {
    shape: Vec<usize>,
    entries: Vec<Gauss<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: IntScalar", deserialize = "T: IntScalar"))]
struct TensorRepr<T: IntScalar> {
    shape: Vec<usize>,
    entries: Vec<Gauss<T>>,
}

impl<T: IntScalar> From<Tensor<T>> for TensorRepr<T> {
    fn from(t: Tensor<T>) -> Self {
        TensorRepr {
            shape: t.shape,
            entries: t.entries,
        }
    }
}

impl<T: IntScalar> TryFrom<TensorRepr<T>> for Tensor<T> {
    type Error = CaError;
    fn try_from(r: TensorRepr<T>) -> Result<Self> {
        Tensor::new(r.shape, r.entries)
    }
}

impl<T: IntScalar> Tensor<T> {
    pub fn new(shape: Vec<usize>, entries: Vec<Gauss<T>>) -> Result<Self> {
        let len: usize = shape.iter().product();
        if entries.len() != len {
            return Err(CaError::ShapeMismatch {
                expected: shape.clone(),
                found: vec![entries.len()],
            });
        }
        Ok(Tensor { shape, entries })
    }

    /// Rank-0 tensor holding a single scalar.
    pub fn scalar(value: Gauss<T>) -> Self {
        Tensor {
            shape: vec![],
            entries: vec![value],
        }
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Tensor {
            shape,
            entries: vec![Gauss::zero(); len],
        }
    }

    pub fn from_vector(v: &Vector<T>) -> Self {
        Tensor {
            shape: vec![v.dim()],
            entries: v.entries().to_vec(),
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Gauss<T>] {
        &self.entries
    }

    /// Row-major offset of a multi-index; the single place where tensor index
    /// arithmetic happens.
    pub fn flat_index(shape: &[usize], idx: &[usize]) -> usize {
        debug_assert_eq!(shape.len(), idx.len());
        let mut off = 0;
        for (d, i) in shape.iter().zip(idx) {
            debug_assert!(i < d);
            off = off * d + i;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> &Gauss<T> {
        &self.entries[Self::flat_index(&self.shape, idx)]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Gauss::is_zero)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_shape(rhs)?;
        Ok(Tensor {
            shape: self.shape.clone(),
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_shape(rhs)?;
        Ok(Tensor {
            shape: self.shape.clone(),
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &Gauss<T>) -> Self {
        Tensor {
            shape: self.shape.clone(),
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul_i(&self) -> Self {
        Tensor {
            shape: self.shape.clone(),
            entries: self.entries.iter().map(Gauss::mul_i).collect(),
        }
    }

    /// Tensor (direct) product: shapes concatenate, entries are all pairwise
    /// products in row-major order.
    pub fn kron(&self, rhs: &Self) -> Self {
        let mut shape = self.shape.clone();
        shape.extend_from_slice(&rhs.shape);
        let mut entries = Vec::with_capacity(self.entries.len() * rhs.entries.len());
        for a in &self.entries {
            for b in &rhs.entries {
                entries.push(a * b);
            }
        }
        Tensor { shape, entries }
    }

    /// `sum conj(self) * rhs` over all entries.
    pub fn dagger_dot(&self, rhs: &Self) -> Result<Gauss<T>> {
        self.check_shape(rhs)?;
        let mut acc = Gauss::zero();
        for (a, b) in self.entries.iter().zip(&rhs.entries) {
            acc = &acc + &(&a.conj() * b);
        }
        Ok(acc)
    }

    /// Apply a matrix to one tensor axis: `out[.., a, ..] = sum_b M[a][b] t[.., b, ..]`.
    pub fn apply_axis(&self, m: &Matrix<T>, axis: usize) -> Result<Self> {
        if axis >= self.shape.len() {
            return Err(CaError::InvalidAxis {
                axis,
                rank: self.shape.len(),
            });
        }
        let d = self.shape[axis];
        if m.dim() != d {
            return Err(CaError::DimensionMismatch {
                expected: d,
                found: m.dim(),
            });
        }
        let inner: usize = self.shape[axis + 1..].iter().product();
        let outer: usize = self.shape[..axis].iter().product();
        let mut out = vec![Gauss::zero(); self.entries.len()];
        for o in 0..outer {
            let base = o * d * inner;
            for a in 0..d {
                for b in 0..d {
                    let coeff = m.get(a, b);
                    if coeff.is_zero() {
                        continue;
                    }
                    for k in 0..inner {
                        let src = &self.entries[base + b * inner + k];
                        if src.is_zero() {
                            continue;
                        }
                        let dst = &mut out[base + a * inner + k];
                        *dst = &*dst + &(coeff * src);
                    }
                }
            }
        }
        Ok(Tensor {
            shape: self.shape.clone(),
            entries: out,
        })
    }

    /// Flatten to a vector on the full product space (row-major).
    pub fn to_vector(&self) -> Vector<T> {
        Vector::new(self.entries.clone())
    }

    pub fn from_flat_vector(shape: Vec<usize>, v: &Vector<T>) -> Result<Self> {
        Tensor::new(shape, v.entries().to_vec())
    }

    /// Reshape across a bipartition of the axes: the listed axes become matrix
    /// rows, the complement (in increasing order) becomes columns.
    pub fn bipartition_matrix(&self, row_axes: &[usize]) -> Result<BipartitionMatrix<T>> {
        let rank = self.shape.len();
        for &ax in row_axes {
            if ax >= rank {
                return Err(CaError::InvalidAxis { axis: ax, rank });
            }
        }
        let mut seen = vec![false; rank];
        for &ax in row_axes {
            if seen[ax] {
                return Err(CaError::InvalidAxis { axis: ax, rank });
            }
            seen[ax] = true;
        }
        let col_axes: Vec<usize> = (0..rank).filter(|&ax| !seen[ax]).collect();
        if row_axes.is_empty() {
            return Err(CaError::EmptyBipartition { side: "row" });
        }
        if col_axes.is_empty() {
            return Err(CaError::EmptyBipartition { side: "column" });
        }
        let rows: usize = row_axes.iter().map(|&ax| self.shape[ax]).product();
        let cols: usize = col_axes.iter().map(|&ax| self.shape[ax]).product();
        let mut entries = Vec::with_capacity(rows * cols);
        let mut idx = vec![0usize; rank];
        for r in 0..rows {
            // decode r into the row axes, most significant first
            let mut rem = r;
            for &ax in row_axes.iter().rev() {
                idx[ax] = rem % self.shape[ax];
                rem /= self.shape[ax];
            }
            for c in 0..cols {
                let mut rem = c;
                for &ax in col_axes.iter().rev() {
                    idx[ax] = rem % self.shape[ax];
                    rem /= self.shape[ax];
                }
                entries.push(self.get(&idx).clone());
            }
        }
        Ok(BipartitionMatrix {
            rows,
            cols,
            entries,
        })
    }
}

impl<T: IntScalar> fmt::Debug for Tensor<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tensor{:?}{:?}", self.shape, self.entries)
    }
}

fn check_shape_impl(a: &[usize], b: &[usize]) -> Result<()> {
    if a != b {
        return Err(CaError::ShapeMismatch {
            expected: a.to_vec(),
            found: b.to_vec(),
        });
    }
    Ok(())
}

impl<T: IntScalar> Tensor<T> {
    fn check_shape(&self, rhs: &Self) -> Result<()> {
        check_shape_impl(&self.shape, &rhs.shape)
    }
}

/// A possibly rectangular matrix produced by reshaping a tensor across a
/// bipartition; input to the exact rank computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartitionMatrix<T: IntScalar> {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Gauss<T>>,
}

impl<T: IntScalar> BipartitionMatrix<T> {
    pub fn get(&self, r: usize, c: usize) -> &Gauss<T> {
        &self.entries[r * self.cols + c]
    }

    /// Exact rank over the Gaussian integers by fraction-free elimination.
    ///
    /// Bareiss one-step elimination: after each pivot the trailing block is
    /// divided by the previous pivot; Sylvester's identity guarantees the
    /// division is exact over any integral domain, so no fractions appear.
    pub fn rank(&self) -> usize {
        let mut a = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let at = |a: &[Gauss<T>], r: usize, c: usize| a[r * cols + c].clone();
        let mut prev: Gauss<T> = Gauss::one();
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            // smallest-norm nonzero pivot keeps intermediate entries small
            let pivot_row = (rank..rows)
                .filter(|&r| !at(&a, r, col).is_zero())
                .min_by_key(|&r| at(&a, r, col).norm_sq());
            let Some(p) = pivot_row else { continue };
            if p != rank {
                for c in 0..cols {
                    a.swap(rank * cols + c, p * cols + c);
                }
            }
            let pivot = at(&a, rank, col);
            for r in rank + 1..rows {
                let lead = at(&a, r, col);
                for c in col + 1..cols {
                    let num = &(&pivot * &at(&a, r, c)) - &(&lead * &at(&a, rank, c));
                    a[r * cols + c] = num
                        .exact_div(&prev)
                        .expect("fraction-free elimination divides exactly");
                }
                a[r * cols + col] = Gauss::zero();
            }
            prev = pivot;
            rank += 1;
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type G = Gauss<i64>;
    type M = Matrix<i64>;
    type V = Vector<i64>;
    type Tn = Tensor<i64>;

    #[test]
    fn hermitian_check_examples() {
        // real symmetric
        assert!(M::of(&[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]])
            .unwrap()
            .is_hermitian());
        // [[0, i], [i, 0]] is NOT self-adjoint
        assert!(!M::of(&[&[(0, 0), (0, 1)], &[(0, 1), (0, 0)]])
            .unwrap()
            .is_hermitian());
        // [[2, 1+i], [1-i, 3]] against the entrywise conjugate-transpose oracle
        let m = M::of(&[&[(2, 0), (1, 1)], &[(1, -1), (3, 0)]]).unwrap();
        assert_eq!(m.conj_transpose(), m);
        assert!(m.is_hermitian());
        assert!(Hermitian::new(m).is_ok());
    }

    #[test]
    fn non_square_rows_rejected() {
        assert_eq!(
            M::of(&[&[(1, 0), (0, 0)], &[(0, 0)]]),
            Err(CaError::NotSquare)
        );
    }

    #[test]
    fn commutation_examples() {
        let sx = M::of(&[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]]).unwrap();
        let sz = M::of(&[&[(1, 0), (0, 0)], &[(0, 0), (-1, 0)]]).unwrap();
        let id = M::identity(2);
        assert!(id.commutes(&sx).unwrap());
        assert!(sx.commutes(&sx).unwrap());
        // anticommuting pair, checked against a hand 2x2 product oracle:
        // sx sz = [[0,-1],[1,0]], sz sx = [[0,1],[-1,0]]
        let sxsz = sx.mul(&sz).unwrap();
        assert_eq!(
            sxsz,
            M::of(&[&[(0, 0), (-1, 0)], &[(1, 0), (0, 0)]]).unwrap()
        );
        assert!(!sx.commutes(&sz).unwrap());
        assert_eq!(
            sx.commutes(&M::identity(3)),
            Err(CaError::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
    }

    #[test]
    fn kron_examples() {
        let e0 = Tn::from_vector(&V::of(&[(1, 0), (0, 0)]));
        let e1 = Tn::from_vector(&V::of(&[(0, 0), (1, 0)]));
        let t = e0.kron(&e1);
        assert_eq!(t.shape(), &[2, 2]);
        assert_eq!(*t.get(&[0, 1]), G::one());
        assert!(t.entries().iter().filter(|g| !g.is_zero()).count() == 1);

        // (1, -i) x (-i, 1) = [-i, 1, -1, -i], the direct-product oracle
        let a = Tn::from_vector(&V::of(&[(1, 0), (0, -1)]));
        let b = Tn::from_vector(&V::of(&[(0, -1), (1, 0)]));
        let ab = a.kron(&b);
        assert_eq!(
            ab.entries(),
            &[G::of(0, -1), G::of(1, 0), G::of(-1, 0), G::of(0, -1)]
        );

        // scalar one is the identity factor
        let one = Tn::scalar(G::one());
        assert_eq!(a.kron(&one), a);
        assert_eq!(one.kron(&a).entries(), a.entries());
    }

    #[test]
    fn kron_is_associative_and_bilinear() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut rand_tensor = |shape: Vec<usize>| {
            let len = shape.iter().product();
            Tn::new(
                shape,
                (0..len)
                    .map(|_| G::of(rng.gen_range(-4..=4), rng.gen_range(-4..=4)))
                    .collect(),
            )
            .unwrap()
        };
        for _ in 0..25 {
            let a = rand_tensor(vec![2]);
            let b = rand_tensor(vec![3]);
            let c = rand_tensor(vec![2, 2]);
            assert_eq!(a.kron(&b).kron(&c), a.kron(&b.kron(&c)));
            // (s a + r a') x c == s (a x c) + r (a' x c)
            let a2 = rand_tensor(vec![2]);
            let (s, r) = (G::of(2, -3), G::of(-1, 1));
            let lhs = a.scale(&s).add(&a2.scale(&r)).unwrap().kron(&c);
            let rhs = a.kron(&c).scale(&s).add(&a2.kron(&c).scale(&r)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn hermitian_split_reconstructs_exactly() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let dim = rng.gen_range(1..=4);
            let mut m = M::zeros(dim);
            for r in 0..dim {
                m.set(r, r, G::of(rng.gen_range(-3..=3), 0));
                for c in r + 1..dim {
                    let g = G::of(rng.gen_range(-3..=3), rng.gen_range(-3..=3));
                    m.set(r, c, g.clone());
                    m.set(c, r, g.conj());
                }
            }
            let h = Hermitian::new(m.clone()).unwrap();
            let hs = h.re_part();
            let ha = h.im_part();
            assert!(hs.is_symmetric());
            assert!(ha.is_antisymmetric());
            // (M + M^T restricted to real parts) / 2 equals the symmetrization
            for r in 0..dim {
                for c in 0..dim {
                    let sym = (m.get(r, c).re + m.get(c, r).re) / 2;
                    assert_eq!(*hs.get(r, c), sym);
                    // M == h_S + i h_A entrywise
                    assert_eq!(m.get(r, c).re, *hs.get(r, c));
                    assert_eq!(m.get(r, c).im, *ha.get(r, c));
                }
            }
        }
    }

    #[test]
    fn rank_of_known_matrices() {
        let id3 = M::identity(3);
        let bip = BipartitionMatrix {
            rows: 3,
            cols: 3,
            entries: (0..3)
                .flat_map(|r| (0..3).map(move |c| if r == c { G::one() } else { G::zero() }))
                .collect(),
        };
        assert!(id3.is_hermitian());
        assert_eq!(bip.rank(), 3);

        // outer product has rank 1
        let a = V::of(&[(1, 2), (0, -1), (3, 0)]);
        let b = V::of(&[(2, 0), (1, 1)]);
        let outer = Tn::from_vector(&a).kron(&Tn::from_vector(&b));
        assert_eq!(outer.bipartition_matrix(&[0]).unwrap().rank(), 1);

        // antisymmetric 2x2 unit has rank 2
        let bell = Tn::new(
            vec![2, 2],
            vec![G::zero(), G::one(), G::of(-1, 0), G::zero()],
        )
        .unwrap();
        assert_eq!(bell.bipartition_matrix(&[0]).unwrap().rank(), 2);

        assert_eq!(
            bell.bipartition_matrix(&[0, 1]).unwrap_err(),
            CaError::EmptyBipartition { side: "column" }
        );
    }

    #[test]
    fn apply_axis_contracts_one_index() {
        let sx = M::of(&[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]]).unwrap();
        let e0 = V::of(&[(1, 0), (0, 0)]);
        let e1 = V::of(&[(0, 0), (1, 0)]);
        let t = Tn::from_vector(&e0).kron(&Tn::from_vector(&e1));
        // acting on axis 0 flips the first factor
        let flipped = t.apply_axis(&sx, 0).unwrap();
        assert_eq!(flipped, Tn::from_vector(&e1).kron(&Tn::from_vector(&e1)));
        // acting on axis 1 flips the second factor
        let flipped2 = t.apply_axis(&sx, 1).unwrap();
        assert_eq!(flipped2, Tn::from_vector(&e0).kron(&Tn::from_vector(&e0)));
    }

    #[test]
    fn kron_sum_acts_blockwise() {
        let sx = M::of(&[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]]).unwrap();
        let id = M::identity(2);
        let h0 = sx.kron(&id).add(&id.kron(&sx)).unwrap();
        let e00 = Tn::from_vector(&V::of(&[(1, 0), (0, 0)]))
            .kron(&Tn::from_vector(&V::of(&[(1, 0), (0, 0)])));
        let v = h0.mul_vec(&e00.to_vector()).unwrap();
        // sx(+)sx on e0 x e0 = e1 x e0 + e0 x e1
        assert_eq!(v, V::of(&[(0, 0), (1, 0), (1, 0), (0, 0)]));
    }
}
