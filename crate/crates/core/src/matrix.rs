//! Exact integer arithmetic on proximity matrices.
//!
//! All arithmetic is checked `i64`; an overflow is reported as
//! [`MatrixError::ArithmeticOverflow`] and never wraps.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{OrderedDiagram, ValidationError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("integer overflow in exact matrix arithmetic")]
    ArithmeticOverflow,
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("matrix rows have inconsistent lengths")]
    Ragged,
    #[error("not a proximity matrix: {0}")]
    NotProximity(String),
    #[error("divisor {which} is not effective")]
    PreconditionViolated { which: &'static str },
    #[error("pair invariants are undefined: entry ({row}, {col}) of P'^-1 P is {value}")]
    UndefinedForPair { row: usize, col: usize, value: i64 },
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

/// Dense square integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix {
            n,
            data: vec![0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(MatrixError::Ragged);
        }
        Ok(IntMatrix {
            n,
            data: rows.concat(),
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Entry at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.data[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: i64) {
        self.data[row * self.n + col] = value;
    }

    pub fn row(&self, row: usize) -> &[i64] {
        &self.data[row * self.n..(row + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn checked_mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.n != rhs.n {
            return Err(MatrixError::SizeMismatch {
                left: self.n,
                right: rhs.n,
            });
        }
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let prod = a
                        .checked_mul(rhs.get(k, j))
                        .ok_or(MatrixError::ArithmeticOverflow)?;
                    let cell = &mut out.data[i * n + j];
                    *cell = cell
                        .checked_add(prod)
                        .ok_or(MatrixError::ArithmeticOverflow)?;
                }
            }
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.n != rhs.n {
            return Err(MatrixError::SizeMismatch {
                left: self.n,
                right: rhs.n,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.checked_sub(*b).ok_or(MatrixError::ArithmeticOverflow))
            .collect::<Result<_, _>>()?;
        Ok(IntMatrix { n: self.n, data })
    }

    pub fn checked_mul_vec(&self, v: &[i64]) -> Result<Vec<i64>, MatrixError> {
        if v.len() != self.n {
            return Err(MatrixError::SizeMismatch {
                left: self.n,
                right: v.len(),
            });
        }
        self.rows().map(|row| checked_dot(row, v)).collect()
    }

    /// First negative entry in row-major order, 0-based.
    pub fn first_negative(&self) -> Option<(usize, usize, i64)> {
        self.data
            .iter()
            .position(|&x| x < 0)
            .map(|p| (p / self.n, p % self.n, self.data[p]))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&x| x >= 0)
    }

    /// Leading `k x k` block.
    pub fn leading(&self, k: usize) -> IntMatrix {
        let mut m = Self::zeros(k);
        for i in 0..k {
            for j in 0..k {
                m.set(i, j, self.get(i, j));
            }
        }
        m
    }

    /// Inverse of a lower unitriangular matrix by forward substitution.
    pub fn unitriangular_inverse(&self) -> Result<IntMatrix, MatrixError> {
        let n = self.n;
        for i in 0..n {
            if self.get(i, i) != 1 || (i + 1..n).any(|j| self.get(i, j) != 0) {
                return Err(MatrixError::NotProximity(
                    "matrix is not lower unitriangular".into(),
                ));
            }
        }
        let mut inv = Self::identity(n);
        for i in 0..n {
            for k in 0..i {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..=k {
                    let prod = a
                        .checked_mul(inv.get(k, j))
                        .ok_or(MatrixError::ArithmeticOverflow)?;
                    let cell = inv
                        .get(i, j)
                        .checked_sub(prod)
                        .ok_or(MatrixError::ArithmeticOverflow)?;
                    inv.set(i, j, cell);
                }
            }
        }
        Ok(inv)
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(deserializer)?;
        IntMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn checked_dot(a: &[i64], b: &[i64]) -> Result<i64, MatrixError> {
    a.iter().zip(b).try_fold(0i64, |acc, (x, y)| {
        x.checked_mul(*y)
            .and_then(|p| acc.checked_add(p))
            .ok_or(MatrixError::ArithmeticOverflow)
    })
}

/// Lower unitriangular matrix with `-1` at `(i, j)` when vertex `i` is
/// proximate to vertex `j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProximityMatrix(IntMatrix);

impl fmt::Debug for ProximityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl ProximityMatrix {
    pub fn of(d: &OrderedDiagram) -> Self {
        let r = d.r();
        let mut m = IntMatrix::identity(r);
        for i in 1..=r {
            for j in d.targets(i) {
                m.set(i - 1, j - 1, -1);
            }
        }
        ProximityMatrix(m)
    }

    /// Checks the entry pattern: unit diagonal, zeros above, at most two
    /// `-1` per row below.
    pub fn try_from_matrix(m: IntMatrix) -> Result<Self, MatrixError> {
        let n = m.size();
        for i in 0..n {
            let row = m.row(i);
            if row[i] != 1 {
                return Err(MatrixError::NotProximity(format!(
                    "diagonal entry {} is not 1",
                    i + 1
                )));
            }
            if row[i + 1..].iter().any(|&x| x != 0) {
                return Err(MatrixError::NotProximity(format!(
                    "row {} has entries above the diagonal",
                    i + 1
                )));
            }
            if row[..i].iter().any(|&x| x != 0 && x != -1) {
                return Err(MatrixError::NotProximity(format!(
                    "row {} has entries outside {{0, -1}}",
                    i + 1
                )));
            }
            if row[..i].iter().filter(|&&x| x == -1).count() > 2 {
                return Err(MatrixError::NotProximity(format!(
                    "row {} has more than two -1 entries",
                    i + 1
                )));
            }
        }
        Ok(ProximityMatrix(m))
    }

    /// Recovers the diagram. The predecessor is the later of the two
    /// targets, since the other target precedes it.
    pub fn to_diagram(&self) -> Result<OrderedDiagram, MatrixError> {
        let n = self.0.size();
        let mut pred = Vec::with_capacity(n);
        let mut second = Vec::with_capacity(n);
        for i in 0..n {
            let cols: Vec<usize> = (0..i)
                .filter(|&j| self.0.get(i, j) == -1)
                .map(|j| j + 1)
                .collect();
            match cols.as_slice() {
                [] => {
                    pred.push(None);
                    second.push(None);
                }
                [p] => {
                    pred.push(Some(*p));
                    second.push(None);
                }
                [s, p] => {
                    pred.push(Some(*p));
                    second.push(Some(*s));
                }
                _ => unreachable!("checked on construction"),
            }
        }
        Ok(OrderedDiagram::new(pred, second)?)
    }

    pub fn size(&self) -> usize {
        self.0.size()
    }

    pub fn as_matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn inverse(&self) -> Result<IntMatrix, MatrixError> {
        self.0.unitriangular_inverse()
    }
}

/// `P^-1 m` together with whether it is entrywise nonnegative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Effectivity {
    pub effective: bool,
    pub strict: Vec<i64>,
}

/// A divisor with total-transform coefficients `m` is effective iff its
/// strict-transform coefficients `P^-1 m` are all nonnegative.
pub fn is_effective(p: &ProximityMatrix, m: &[i64]) -> Result<Effectivity, MatrixError> {
    let strict = p.inverse()?.checked_mul_vec(m)?;
    Ok(Effectivity {
        effective: strict.iter().all(|&x| x >= 0),
        strict,
    })
}

/// Two effective divisors share a component iff their strict-transform
/// coefficient vectors have positive dot product.
pub fn shares_components(p: &ProximityMatrix, m: &[i64], m2: &[i64]) -> Result<bool, MatrixError> {
    let a = is_effective(p, m)?;
    if !a.effective {
        return Err(MatrixError::PreconditionViolated { which: "m" });
    }
    let b = is_effective(p, m2)?;
    if !b.effective {
        return Err(MatrixError::PreconditionViolated { which: "m'" });
    }
    Ok(checked_dot(&a.strict, &b.strict)? > 0)
}

/// `P'^-1 P`: the coefficients of the virtual exceptional divisors of `d`
/// in the strict-transform basis of a cluster with diagram `d2`.
pub fn transition(d: &OrderedDiagram, d2: &OrderedDiagram) -> Result<IntMatrix, MatrixError> {
    if d.r() != d2.r() {
        return Err(MatrixError::SizeMismatch {
            left: d.r(),
            right: d2.r(),
        });
    }
    ProximityMatrix::of(d2)
        .inverse()?
        .checked_mul(ProximityMatrix::of(d).as_matrix())
}

/// `M(D, D')` together with the counts `delta_i` and `epsilon_i`,
/// indexed `1..=r` (slot 0 of each vector is index 1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairInvariants {
    pub m: IntMatrix,
    pub delta: Vec<i64>,
    pub epsilon: Vec<i64>,
}

/// Whether `k` is extremal among the vertices proximate to `j`: it is
/// proximate to `j` and no other vertex proximate to `j` is infinitely
/// near to it.
pub fn is_extremal_proximate(d: &OrderedDiagram, k: usize, j: usize) -> bool {
    d.is_proximate(k, j)
        && !(k + 1..=d.r()).any(|l| d.is_proximate(l, j) && d.is_infinitely_near(l, k))
}

pub fn pair_invariants(
    d: &OrderedDiagram,
    d2: &OrderedDiagram,
) -> Result<PairInvariants, MatrixError> {
    let t = transition(d, d2)?;
    if let Some((row, col, value)) = t.first_negative() {
        return Err(MatrixError::UndefinedForPair {
            row: row + 1,
            col: col + 1,
            value,
        });
    }
    let m = t.transpose().checked_mul(&t)?;
    let r = d.r();
    let delta: Vec<i64> = (1..=r)
        .map(|i| {
            let mut count = 0;
            for j in i..=r {
                for k in j + 1..=r {
                    if m.get(j - 1, k - 1) != 0 && is_extremal_proximate(d, k, j) {
                        count += 1;
                    }
                }
            }
            count
        })
        .collect();
    let dim_gap = d.dim() as i64 - d2.dim() as i64;
    let epsilon = (1..=r)
        .map(|i| {
            let gap_i = d.prefix(i).dim() as i64 - d2.prefix(i).dim() as i64;
            dim_gap - gap_i - delta[i - 1]
        })
        .collect();
    Ok(PairInvariants { m, delta, epsilon })
}
