use rayon::prelude::*;

use crate::error::{Error, Result};

/// Least `δ ≥ 0` with `(x,y)_p ≥ min{(x,z)_p, (y,z)_p} − δ` for every ordered
/// triple, given the matrix of Gromov products at a fixed base point.
///
/// Rows are scanned in parallel; each row's maximum is combined in row order.
pub fn four_point_delta(products: &[Vec<f64>]) -> Result<f64> {
    let n = products.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let row_max: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|x| {
            let px = &products[x];
            let mut worst = 0.0f64;
            for (y, py) in products.iter().enumerate() {
                let pxy = px[y];
                let m = px
                    .iter()
                    .zip(py)
                    .map(|(a, b)| a.min(*b))
                    .fold(f64::NEG_INFINITY, f64::max);
                worst = worst.max(m - pxy);
            }
            worst
        })
        .collect();
    Ok(row_max.into_iter().fold(0.0, f64::max))
}

/// Integer version for word models: entries are doubled Gromov products
/// `2(x,y)_p`, which are integers on graphs. Returns `2δ`.
pub fn four_point_delta_doubled(products: &[Vec<i32>]) -> Result<i32> {
    let n = products.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let row_max: Vec<i32> = (0..n)
        .into_par_iter()
        .map(|x| {
            let px = &products[x];
            let mut worst = 0i32;
            for (y, py) in products.iter().enumerate() {
                let pxy = px[y];
                let m = px
                    .iter()
                    .zip(py)
                    .map(|(a, b)| (*a).min(*b))
                    .max()
                    .unwrap_or(i32::MIN);
                worst = worst.max(m - pxy);
            }
            worst
        })
        .collect();
    Ok(row_max.into_iter().max().unwrap_or(0))
}
