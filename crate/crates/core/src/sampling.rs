//! Deterministic point sets: sphere directions and parameter grids.

use crate::error::{Error, Result};

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % b) as f64 * inv;
        i /= b;
        inv /= base as f64;
    }
    out
}

/// `count` unit vectors in `R^dim`, spread over `S^{dim−1}`.
///
/// `dim = 1` yields `[+1]` (callers scan both signs), `dim = 3` a Fibonacci
/// spiral, other dimensions Gaussianized Halton points.
pub fn sphere_points(dim: usize, count: usize) -> Result<Vec<Vec<f64>>> {
    match dim {
        0 => Err(Error::ZeroDimension),
        1 => Ok(vec![vec![1.0]; count.min(1)]),
        2 => Ok((0..count)
            .map(|i| {
                let a = std::f64::consts::TAU * (i as f64 + 0.5) / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect()),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            Ok((0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * i as f64;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect())
        }
        d => {
            let pairs = d.div_ceil(2);
            if 2 * pairs > PRIMES.len() {
                return Err(Error::InvalidParameter(format!("sphere dimension {d} too large")));
            }
            let mut out = Vec::with_capacity(count);
            let mut i = 1u64;
            while out.len() < count {
                let mut v = Vec::with_capacity(2 * pairs);
                for k in 0..pairs {
                    let u1 = radical_inverse(i, PRIMES[2 * k]).max(f64::MIN_POSITIVE);
                    let u2 = radical_inverse(i, PRIMES[2 * k + 1]);
                    let r = (-2.0 * u1.ln()).sqrt();
                    let a = std::f64::consts::TAU * u2;
                    v.push(r * a.cos());
                    v.push(r * a.sin());
                }
                v.truncate(d);
                let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                i += 1;
                if len > 1e-6 {
                    out.push(v.into_iter().map(|x| x / len).collect());
                }
            }
            Ok(out)
        }
    }
}

/// Tensor grid with `res` points per axis over `[lo, hi]`, last axis fastest.
pub fn grid(lo: &[f64], hi: &[f64], res: usize) -> Result<Vec<Vec<f64>>> {
    if lo.len() != hi.len() {
        return Err(Error::DimensionMismatch {
            expected: lo.len(),
            found: hi.len(),
        });
    }
    if lo.is_empty() {
        return Err(Error::InvalidBox("zero-dimensional grid".into()));
    }
    if res == 0 {
        return Err(Error::InvalidParameter("grid resolution must be positive".into()));
    }
    for (i, (l, h)) in lo.iter().zip(hi).enumerate() {
        if !(l.is_finite() && h.is_finite() && l < h) {
            return Err(Error::InvalidBox(format!("axis {i}: [{l}, {h}] is empty")));
        }
    }
    let ticks: Vec<Vec<f64>> = lo
        .iter()
        .zip(hi)
        .map(|(l, h)| {
            if res == 1 {
                vec![0.5 * (l + h)]
            } else {
                (0..res).map(|k| l + (h - l) * k as f64 / (res - 1) as f64).collect()
            }
        })
        .collect();
    let total = res.pow(lo.len() as u32);
    Ok((0..total)
        .map(|mut idx| {
            let mut p = vec![0.0; lo.len()];
            for axis in (0..lo.len()).rev() {
                p[axis] = ticks[axis][idx % res];
                idx /= res;
            }
            p
        })
        .collect())
}
