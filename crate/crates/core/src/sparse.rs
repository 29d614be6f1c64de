//! Compressed-row complex matrices for the right-hand sides of the equations of motion.
//!
//! Operators are assembled densely and compressed once; the integrator then
//! only multiplies sparse operators into dense states.

use num_complex::Complex64;

use crate::hilbert::CMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl Csr {
    /// Compresses a square dense matrix, dropping exact zeros.
    pub fn from_dense(a: &CMatrix) -> Self {
        assert_eq!(a.nrows(), a.ncols(), "square matrices only");
        let dim = a.nrows();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..dim {
            for j in 0..dim {
                let v = a[(i, j)];
                if v != Complex64::default() {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self { dim, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn scale(&mut self, c: Complex64) {
        for v in &mut self.vals {
            *v *= c;
        }
    }

    /// out = A x.
    pub fn mul_vec(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.dim) {
            let mut acc = Complex64::default();
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[p] * x[self.cols[p]];
            }
            *o = acc;
        }
    }

    /// out = A X for a column-major dim×dim matrix X.
    pub fn mul_mat(&self, x: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        for c in 0..d {
            self.mul_vec(&x[c * d..(c + 1) * d], &mut out[c * d..(c + 1) * d]);
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut a = CMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                a[(i, self.cols[p])] = self.vals[p];
            }
        }
        a
    }
}
