//! Causal Savitzky–Golay smoothing.
//!
//! The value at day `t` is the least-squares polynomial fitted to days
//! `t−window+1 ..= t`, evaluated at the window's right edge, so no future
//! data is used. For window 7 and order 3 the weights (oldest first) are
//!
//! ```text
//! [-1/21, 2/21, 1/42, -2/21, -2/21, 4/21, 13/14]
//! ```
//!
//! Near the start of a series the window shrinks to the available points and
//! the order to `min(order, points − 1)`.

use crate::error::{Error, Result};

/// Right-edge weights `h = A (AᵀA)⁻¹ e₀` for positions `−(n−1)..=0`.
pub fn right_edge_weights(n: usize, order: usize) -> Vec<f64> {
    let order = order.min(n - 1);
    let p = order + 1;
    // positions centered for conditioning; evaluate at the right edge
    let c = (n - 1) as f64 / 2.0;
    let pos: Vec<f64> = (0..n).map(|i| i as f64 - c).collect();
    let edge = (n - 1) as f64 - c;
    let mut ata = vec![0.0; p * p];
    for &s in &pos {
        for j in 0..p {
            for k in 0..p {
                ata[j * p + k] += s.powi(j as i32) * s.powi(k as i32);
            }
        }
    }
    let rhs: Vec<f64> = (0..p).map(|j| edge.powi(j as i32)).collect();
    let z = solve(ata, rhs, p);
    pos.iter()
        .map(|&s| (0..p).map(|j| s.powi(j as i32) * z[j]).sum())
        .collect()
}

/// Gaussian elimination with partial pivoting on a small dense system.
fn solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Vec<f64> {
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row * n + row];
    }
    x
}

pub fn savitzky_golay(x: &[f64], window: usize, order: usize) -> Result<Vec<f64>> {
    if window % 2 == 0 || order >= window {
        return Err(Error::invalid(format!(
            "Savitzky–Golay needs an odd window larger than the order (window {window}, order {order})"
        )));
    }
    let full = right_edge_weights(window, order);
    let mut partial: Vec<Vec<f64>> = (1..window).map(|n| right_edge_weights(n, order)).collect();
    partial.push(full);
    Ok((0..x.len())
        .map(|t| {
            let n = (t + 1).min(window);
            let w = &partial[n - 1];
            x[t + 1 - n..=t].iter().zip(w).map(|(v, h)| v * h).sum()
        })
        .collect())
}
