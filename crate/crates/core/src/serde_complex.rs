//! Complex matrices as row-major lists of `[re, im]` pairs.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

pub type Pairs = Vec<[f64; 2]>;

pub fn matrix_to_pairs(m: &CMatrix) -> Pairs {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push([z.re, z.im]);
        }
    }
    out
}

/// Square matrix from a row-major pair list; the dimension is inferred.
pub fn matrix_from_pairs(pairs: &[[f64; 2]]) -> Result<CMatrix> {
    let n = (pairs.len() as f64).sqrt().round() as usize;
    if n * n != pairs.len() || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "expected a square number of [re, im] pairs, got {}",
            pairs.len()
        )));
    }
    let entries: Vec<C64> = pairs.iter().map(|p| C64::new(p[0], p[1])).collect();
    Ok(CMatrix::from_row_slice(n, n, &entries))
}

pub fn real_matrix_to_pairs(re: &nalgebra::DMatrix<f64>, im: &nalgebra::DMatrix<f64>) -> Pairs {
    let mut out = Vec::with_capacity(re.len());
    for i in 0..re.nrows() {
        for j in 0..re.ncols() {
            out.push([re[(i, j)], im[(i, j)]]);
        }
    }
    out
}
