//! Small dense helpers on `Vec<f64>`.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|v| v * s).collect()
}

pub fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// `uᵀ M v`
pub fn bilinear(u: &[f64], m: &[Vec<f64>], v: &[f64]) -> f64 {
    dot(u, &mat_vec(m, v))
}

pub fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j]).collect())
        .collect()
}

pub fn frobenius_sq(m: &[Vec<f64>]) -> f64 {
    m.iter().flatten().map(|v| v * v).sum()
}

pub fn trace(m: &[Vec<f64>]) -> f64 {
    m.iter().enumerate().map(|(i, row)| row[i]).sum()
}

/// Gram-Schmidt with largest-remaining-norm pivoting (ties broken by lowest
/// index) and sign normalization: the first entry of each output vector with
/// magnitude above `1e-12` is positive. Stops after `count` vectors or when
/// every remaining candidate has norm below `min_norm`.
pub fn pivoted_gram_schmidt(candidates: &[Vec<f64>], count: usize, min_norm: f64) -> Vec<Vec<f64>> {
    let mut rest: Vec<Vec<f64>> = candidates.to_vec();
    let mut used = vec![false; rest.len()];
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(count);
    while out.len() < count {
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in rest.iter().enumerate() {
            if used[i] {
                continue;
            }
            let nv = norm(v);
            if best.is_none_or(|(_, b)| nv > b) {
                best = Some((i, nv));
            }
        }
        let Some((i, nv)) = best else { break };
        if nv < min_norm {
            break;
        }
        used[i] = true;
        let mut e = scaled(&rest[i], 1.0 / nv);
        // one reorthogonalization pass against the accepted vectors
        for q in &out {
            let c = dot(&e, q);
            axpy(&mut e, -c, q);
        }
        let ne = norm(&e);
        e.iter_mut().for_each(|v| *v /= ne);
        if let Some(first) = e.iter().find(|v| v.abs() > 1e-12) {
            if *first < 0.0 {
                e.iter_mut().for_each(|v| *v = -*v);
            }
        }
        for (j, v) in rest.iter_mut().enumerate() {
            if !used[j] {
                let c = dot(v, &e);
                axpy(v, -c, &e);
            }
        }
        out.push(e);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_schmidt_is_orthonormal_and_deterministic() {
        let c = vec![
            vec![1.0, 1.0, 0.0],
            vec![0.0, -2.0, 1.0],
            vec![1.0, 0.0, 2.0],
        ];
        let q = pivoted_gram_schmidt(&c, 3, 1e-12);
        assert_eq!(q.len(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&q[i], &q[j]) - target).abs() < 1e-14);
            }
        }
        // the largest candidate goes first, sign flipped to be positive
        assert!((q[0][1] - 2.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!(q.iter().all(|v| v.iter().find(|x| x.abs() > 1e-12).unwrap() > &0.0));
        assert_eq!(q, pivoted_gram_schmidt(&c, 3, 1e-12));
    }

    #[test]
    fn rank_deficient_input_stops_early() {
        let c = vec![vec![1.0, 0.0], vec![2.0, 0.0]];
        assert_eq!(pivoted_gram_schmidt(&c, 2, 1e-9).len(), 1);
    }
}
