//! Minimum enclosing ball of finitely many points given through their Gram
//! matrix. The center is returned as convex weights.

use crate::scalar::Real;

/// Largest point count solved exactly by support-set enumeration.
const EXACT_LIMIT: usize = 10;
const FW_ITERS: usize = 20_000;

/// Convex weights `w` of the MEB center `sum w_i p_i` and the squared radius.
pub(crate) fn meb<T: Real>(gram: &[Vec<T>]) -> (Vec<T>, T) {
    let k = gram.len();
    if k == 1 {
        return (vec![T::one()], T::zero());
    }
    if k <= EXACT_LIMIT {
        if let Some(sol) = exact(gram) {
            return sol;
        }
    }
    frank_wolfe(gram)
}

fn radius2_at<T: Real>(gram: &[Vec<T>], w: &[T]) -> Vec<T> {
    // ||c - p_i||^2 = w^T G w - 2 (G w)_i + G_ii
    let k = gram.len();
    let gw: Vec<T> = (0..k).map(|i| (0..k).map(|j| gram[i][j] * w[j]).sum()).collect();
    let cc: T = (0..k).map(|i| w[i] * gw[i]).sum();
    (0..k).map(|i| cc - T::lit(2.0) * gw[i] + gram[i][i]).collect()
}

fn exact<T: Real>(gram: &[Vec<T>]) -> Option<(Vec<T>, T)> {
    let k = gram.len();
    let scale = (0..k).map(|i| gram[i][i]).fold(T::zero(), T::max).max(T::min_positive_value());
    let slack = T::lit(1e-12) * scale;
    let mut best: Option<(Vec<T>, T)> = None;
    for mask in 1u32..(1u32 << k) {
        let support: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let s = support.len();
        // [2 G_SS  -1] [w]   [diag G_SS]
        // [1^T      0] [nu] = [1]
        let mut a = vec![vec![T::zero(); s + 1]; s + 1];
        let mut b = vec![T::zero(); s + 1];
        for (r, &i) in support.iter().enumerate() {
            for (c, &j) in support.iter().enumerate() {
                a[r][c] = T::lit(2.0) * gram[i][j];
            }
            a[r][s] = -T::one();
            a[s][r] = T::one();
            b[r] = gram[i][i];
        }
        b[s] = T::one();
        let Some(x) = solve(a, b) else { continue };
        if x[..s].iter().any(|&wi| wi < -T::lit(1e-12)) {
            continue;
        }
        let mut w = vec![T::zero(); k];
        for (r, &i) in support.iter().enumerate() {
            w[i] = x[r].max(T::zero());
        }
        let total: T = w.iter().copied().sum();
        w.iter_mut().for_each(|wi| *wi /= total);
        let d = radius2_at(gram, &w);
        let r2 = support.iter().map(|&i| d[i]).fold(T::zero(), T::max);
        if d.iter().any(|&di| di > r2 + slack) {
            continue;
        }
        if best.as_ref().is_none_or(|(_, br)| r2 < *br) {
            best = Some((w, r2));
        }
    }
    best
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    let norm = a.iter().flatten().map(|x| x.abs()).fold(T::zero(), T::max);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() <= T::lit(1e-13) * norm.max(T::one()) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
            let v = b[col];
            b[r] -= f * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for r in (0..n).rev() {
        let s: T = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Frank-Wolfe on the dual `max sum w_i G_ii - w^T G w` over the simplex.
fn frank_wolfe<T: Real>(gram: &[Vec<T>]) -> (Vec<T>, T) {
    let k = gram.len();
    let mut w = vec![T::zero(); k];
    w[0] = T::one();
    for it in 0..FW_ITERS {
        let d = radius2_at(gram, &w);
        let far = (0..k).max_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap()).unwrap_or(0);
        let step = T::one() / T::lit((it + 2) as f64);
        for (i, wi) in w.iter_mut().enumerate() {
            *wi = *wi * (T::one() - step) + if i == far { step } else { T::zero() };
        }
    }
    let r2 = radius2_at(gram, &w).into_iter().fold(T::zero(), T::max);
    (w, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram(points: &[[f64; 2]]) -> Vec<Vec<f64>> {
        points
            .iter()
            .map(|p| points.iter().map(|q| p[0] * q[0] + p[1] * q[1]).collect())
            .collect()
    }

    #[test]
    fn two_points_midpoint() {
        let (w, r2) = meb(&gram(&[[0.0, 0.0], [2.0, 0.0]]));
        assert!((w[0] - 0.5).abs() < 1e-14 && (r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn obtuse_triangle_uses_long_side() {
        let (w, r2) = meb(&gram(&[[-1.0, 0.0], [1.0, 0.0], [0.0, 0.2]]));
        assert!(w[2].abs() < 1e-14);
        assert!((r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn equilateral_circumcenter() {
        let s = 3f64.sqrt() / 2.0;
        let (w, r2) = meb(&gram(&[[1.0, 0.0], [-0.5, s], [-0.5, -s]]));
        for wi in w {
            assert!((wi - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frank_wolfe_agrees() {
        let g = gram(&[[0.3, 0.1], [-1.0, 0.4], [0.2, -0.9], [0.5, 0.5]]);
        let (_, exact_r2) = meb(&g);
        let (_, fw_r2) = frank_wolfe(&g);
        assert!((exact_r2 - fw_r2).abs() < 1e-3);
    }
}
