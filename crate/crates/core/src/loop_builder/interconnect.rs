//! Linear signal equations with polynomial coefficients.
//!
//! Every block `y = (n/d)·x` is entered as the polynomial equation
//! `d·y − n·x = 0`, so the interconnection is a square system `A(s)·x = b(s)·r`.
//! Cramer's rule gives each signal's transfer from `r` as
//! `det(A_k) / det(A)`, and `det(A)` is the characteristic polynomial of the
//! interconnection with exactly the order of its blocks: nothing is
//! introduced by intermediate reductions and nothing is cancelled.

use crate::error::{Error, Result};
use crate::poly_tf::{Polynomial, TransferFunction};

#[derive(Debug, Clone)]
pub(crate) struct SignalSystem {
    size: usize,
    rows: Vec<Vec<Polynomial>>,
    rhs: Vec<Polynomial>,
}

impl SignalSystem {
    pub(crate) fn new(size: usize) -> Self {
        Self { size, rows: Vec::with_capacity(size), rhs: Vec::with_capacity(size) }
    }

    /// Adds `Σ terms = rhs·r`.
    pub(crate) fn equation(&mut self, terms: &[(usize, Polynomial)], rhs: Polynomial) -> &mut Self {
        let mut row = vec![Polynomial::zero(); self.size];
        for (idx, p) in terms {
            row[*idx] = &row[*idx] + p;
        }
        self.rows.push(row);
        self.rhs.push(rhs);
        self
    }

    pub(crate) fn characteristic(&self) -> Polynomial {
        debug_assert_eq!(self.rows.len(), self.size, "system must be square");
        determinant(&self.rows)
    }

    /// Transfer from the external input to signal `output`.
    pub(crate) fn transfer(&self, output: usize) -> Result<TransferFunction> {
        let den = self.characteristic();
        if den.is_zero() {
            return Err(Error::AlgebraicDegeneracy(
                "signal equations are singular (zero characteristic polynomial)".into(),
            ));
        }
        let mut replaced = self.rows.clone();
        for (row, b) in replaced.iter_mut().zip(&self.rhs) {
            row[output] = b.clone();
        }
        TransferFunction::new(determinant(&replaced), den)
    }
}

/// Laplace expansion along the first row, skipping zero entries. The
/// systems here have at most seven signals and are sparse.
fn determinant(m: &[Vec<Polynomial>]) -> Polynomial {
    let n = m.len();
    match n {
        0 => return Polynomial::one(),
        1 => return m[0][0].clone(),
        _ => {}
    }
    let mut acc = Polynomial::zero();
    for (j, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Polynomial>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = entry * &determinant(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}
