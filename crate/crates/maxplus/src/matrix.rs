//! Dense matrices over the max-plus semiring.
//!
//! Vectors are n-by-1 or 1-by-n matrices. The null matrix (all `eps`) and
//! the identity (0 on the diagonal, `eps` elsewhere) play the roles of zero
//! and one in the matrix semiring. The spectral radius of a square matrix
//! equals its maximum cycle mean and is computed here from the trace
//! formula `rho(A) = oplus_{m=1..n} tr(A^m)^(1/m)`.
//!
//! Matrices have a text form used by fixtures and the CLI: rows separated
//! by `;`, entries by `,`, with `eps` for the null element, e.g.
//! `"1,2;eps,0"`. Printing and parsing round-trip.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::MaxPlusScalar;

/// Dense row-major matrix of [`MaxPlusScalar`] entries.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxPlusMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<MaxPlusScalar>,
}

impl MaxPlusMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<MaxPlusScalar>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix by evaluating `f(i, j)` at every position.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> MaxPlusScalar) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    /// The null matrix (all entries `eps`).
    pub fn null(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| MaxPlusScalar::EPS)
    }

    /// The identity: 0 on the diagonal, `eps` elsewhere.
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                MaxPlusScalar::ONE
            } else {
                MaxPlusScalar::EPS
            }
        })
    }

    /// All entries equal to the multiplicative identity 0 (the vector `0`
    /// of the algebra when `cols == 1`).
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| MaxPlusScalar::ONE)
    }

    /// All entries equal to `value`.
    pub fn constant(rows: usize, cols: usize, value: MaxPlusScalar) -> Self {
        Self::from_fn(rows, cols, |_, _| value)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> MaxPlusScalar {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        self.entries[i * self.cols + j]
    }

    /// Row-major entry slice.
    pub fn entries(&self) -> &[MaxPlusScalar] {
        &self.entries
    }

    /// True when every entry is finite (no `eps`).
    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|e| e.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Entrywise `oplus` (maximum); shapes must match.
    pub fn oplus(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!(
                "oplus needs equal shapes, got {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.oplus(*b))
            .collect();
        Self::new(self.rows, self.cols, entries)
    }

    /// Max-plus matrix product: `(A (x) B)_ij = max_k (a_ik + b_kj)`.
    pub fn otimes(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "otimes needs inner dimensions to agree, got {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = vec![MaxPlusScalar::EPS; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entries[i * self.cols + k];
                if a.is_eps() {
                    continue;
                }
                let row = &other.entries[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d = d.oplus(a.otimes(*b));
                }
            }
        }
        Self::new(self.rows, other.cols, out)
    }

    /// `k`-fold `otimes` power of a square matrix; `A^0` is the identity.
    pub fn pow(&self, k: u32) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "matrix power needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let mut acc = Self::identity(self.rows);
        for _ in 0..k {
            acc = acc.otimes(self)?;
        }
        Ok(acc)
    }

    /// The conjugate `A^-`: transposed shape with entry `(i, j) = -a_ji`
    /// (`eps` fixed).
    pub fn conjugate(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).inverse())
    }

    /// The norm `||A||`: maximum entry (`eps` for the null matrix).
    pub fn norm(&self) -> MaxPlusScalar {
        self.entries
            .iter()
            .fold(MaxPlusScalar::EPS, |acc, e| acc.oplus(*e))
    }

    /// Row-major index of the first entry attaining the norm.
    pub fn norm_argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (idx, e) in self.entries.iter().enumerate() {
            if e.as_f64() > self.entries[best].as_f64() {
                best = idx;
            }
        }
        (best / self.cols, best % self.cols)
    }

    /// The trace: maximum diagonal entry of a square matrix.
    pub fn trace(&self) -> Result<MaxPlusScalar> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "trace needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok((0..self.rows).fold(MaxPlusScalar::EPS, |acc, i| acc.oplus(self.get(i, i))))
    }

    /// Spectral radius `rho(A) = oplus_{m=1..n} tr(A^m)^(1/m)`.
    ///
    /// Equals the maximum cycle mean of the weighted digraph of `A`; `eps`
    /// terms are neutral in the outer `oplus`, so the result is `eps` only
    /// when every power has an `eps` trace (an acyclic graph).
    pub fn spectral_radius(&self) -> Result<MaxPlusScalar> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "spectral radius needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut acc = MaxPlusScalar::EPS;
        let mut power = self.clone();
        for m in 1..=n {
            let term = power.trace()?.power(1.0 / m as f64)?;
            acc = acc.oplus(term);
            if m < n {
                power = power.otimes(self)?;
            }
        }
        Ok(acc)
    }

    /// The column vector `A (x) 0` of row maxima.
    pub fn row_maxima(&self) -> Self {
        Self::from_fn(self.rows, 1, |i, _| {
            (0..self.cols).fold(MaxPlusScalar::EPS, |acc, j| acc.oplus(self.get(i, j)))
        })
    }

    /// Entrywise `<=` for equal shapes.
    pub fn entrywise_le(&self, other: &Self) -> bool {
        self.shape() == other.shape()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.as_f64() <= b.as_f64())
    }
}

impl fmt::Display for MaxPlusMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(";")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        Ok(())
    }
}

impl FromStr for MaxPlusMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut rows: Vec<Vec<MaxPlusScalar>> = Vec::new();
        for row_text in s.split(';') {
            let row: Vec<MaxPlusScalar> = row_text
                .split(',')
                .map(str::parse)
                .collect::<Result<_>>()?;
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(Error::Parse(format!(
                        "ragged matrix literal: row {} has {} entries, expected {}",
                        rows.len() + 1,
                        row.len(),
                        first.len()
                    )));
                }
            }
            rows.push(row);
        }
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        let n_rows = rows.len();
        Self::new(n_rows, cols, rows.into_iter().flatten().collect())
    }
}

impl Serialize for MaxPlusMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MaxPlusMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(text: &str) -> MaxPlusMatrix {
        text.parse().unwrap()
    }

    #[test]
    fn oplus_is_entrywise_max() {
        let a = m("1,5;eps,0");
        let b = m("2,3;1,eps");
        assert_eq!(a.oplus(&b).unwrap(), m("2,5;1,0"));
        assert_eq!(a.oplus(&MaxPlusMatrix::null(2, 2)).unwrap(), a);
        assert_eq!(a.oplus(&a).unwrap(), a);
    }

    #[test]
    fn otimes_matches_hand_enumeration() {
        let a = m("1,2;3,4");
        let b = m("5,6;7,8");
        assert_eq!(a.otimes(&b).unwrap(), m("9,10;11,12"));
        assert_eq!(MaxPlusMatrix::identity(2).otimes(&b).unwrap(), b);
        assert_eq!(
            MaxPlusMatrix::null(2, 2).otimes(&b).unwrap(),
            MaxPlusMatrix::null(2, 2)
        );
    }

    #[test]
    fn otimes_rejects_shape_mismatch() {
        let a = m("1,2;3,4");
        let b = m("1,2,3");
        assert!(matches!(a.otimes(&b), Err(Error::Dimension(_))));
        assert!(matches!(a.oplus(&b), Err(Error::Dimension(_))));
    }

    #[test]
    fn pow_zero_is_identity() {
        let a = m("1,2;3,4");
        assert_eq!(a.pow(0).unwrap(), MaxPlusMatrix::identity(2));
        assert_eq!(m("eps,1;2,eps").pow(2).unwrap(), m("3,eps;eps,3"));
        // constant matrix closure: every power of an all-c matrix is all-(k*c)
        let c = MaxPlusMatrix::constant(2, 2, MaxPlusScalar::finite(1.5));
        assert_eq!(
            c.pow(3).unwrap(),
            MaxPlusMatrix::constant(2, 2, MaxPlusScalar::finite(4.5))
        );
        assert!(m("1,2,3").pow(2).is_err());
    }

    #[test]
    fn conjugate_transposes_and_negates() {
        assert_eq!(m("1,2;3,4").conjugate(), m("-1,-3;-2,-4"));
        assert_eq!(m("1;2").conjugate(), m("-1,-2"));
        let null = MaxPlusMatrix::null(2, 3);
        assert_eq!(null.conjugate(), MaxPlusMatrix::null(3, 2));
    }

    #[test]
    fn norm_and_trace() {
        let a = m("1,2;3,4");
        assert_eq!(a.norm(), MaxPlusScalar::finite(4.0));
        assert!(MaxPlusMatrix::null(2, 2).norm().is_eps());
        assert_eq!(a.trace().unwrap(), MaxPlusScalar::finite(4.0));
        assert_eq!(
            MaxPlusMatrix::identity(3).trace().unwrap(),
            MaxPlusScalar::ONE
        );
        assert!(m("eps,1;2,eps").trace().unwrap().is_eps());
        assert!(m("1,2,3").trace().is_err());
    }

    #[test]
    fn norm_is_multiplicative_in_scalars() {
        // ||c (x) A|| = c (x) ||A||
        let a = m("1,2;3,4");
        let c = MaxPlusMatrix::constant(2, 2, MaxPlusScalar::finite(2.0));
        let scaled = MaxPlusMatrix::from_fn(2, 2, |i, j| {
            MaxPlusScalar::finite(2.0).otimes(a.get(i, j))
        });
        assert_eq!(scaled.norm(), MaxPlusScalar::finite(6.0));
        let _ = c;
    }

    #[test]
    fn spectral_radius_examples() {
        let ones = MaxPlusMatrix::constant(2, 2, MaxPlusScalar::finite(1.0));
        assert_eq!(ones.spectral_radius().unwrap(), MaxPlusScalar::finite(1.0));

        let c = MaxPlusMatrix::constant(2, 2, MaxPlusScalar::finite(2.75));
        assert_eq!(c.spectral_radius().unwrap(), MaxPlusScalar::finite(2.75));

        let cyc = m("eps,1;2,eps");
        assert!((cyc.spectral_radius().unwrap().as_f64() - 1.5).abs() < 1e-12);

        // acyclic support: every trace is eps
        let nil = m("eps,1;eps,eps");
        assert!(nil.spectral_radius().unwrap().is_eps());
    }

    #[test]
    fn row_maxima_examples() {
        assert_eq!(m("1,2;3,4").row_maxima(), m("2;4"));
        assert_eq!(MaxPlusMatrix::identity(2).row_maxima(), m("0;0"));
        assert_eq!(
            MaxPlusMatrix::null(2, 2).row_maxima(),
            MaxPlusMatrix::null(2, 1)
        );
    }

    #[test]
    fn parse_rejects_bad_literals() {
        assert!("".parse::<MaxPlusMatrix>().is_err());
        assert!("1,2;3".parse::<MaxPlusMatrix>().is_err());
        assert!("1,nan".parse::<MaxPlusMatrix>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for text in ["1,2;eps,0", "eps", "-1.5,0;2.25,eps", "1;2;3"] {
            let a = m(text);
            let back: MaxPlusMatrix = a.to_string().parse().unwrap();
            assert_eq!(a, back);
        }
    }
}
