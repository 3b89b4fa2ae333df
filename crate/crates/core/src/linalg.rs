//! Small dense helpers for `d x d` row-major matrices.

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Angle between two nonzero vectors, accurate for nearly parallel inputs.
pub(crate) fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let (u, v) = (x / na, y / nb);
        diff += (u - v) * (u - v);
        sum += (u + v) * (u + v);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

/// `out = m * v` for a row-major `d x d` matrix.
#[inline]
pub(crate) fn mat_vec(m: &[f64], v: &[f64], out: &mut [f64]) {
    let d = v.len();
    for (r, o) in out.iter_mut().enumerate() {
        *o = dot(&m[r * d..(r + 1) * d], v);
    }
}

/// Gauss-Jordan inversion with partial pivoting; `None` when singular.
pub(crate) fn invert(m: &[f64], d: usize) -> Option<Vec<f64>> {
    let mut a = m.to_vec();
    let mut inv = vec![0.0; d * d];
    for k in 0..d {
        inv[k * d + k] = 1.0;
    }
    let scale = m.iter().fold(0.0_f64, |s, x| s.max(x.abs()));
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&r, &s| a[r * d + col].abs().total_cmp(&a[s * d + col].abs()))
            .unwrap();
        if a[pivot * d + col].abs() <= 1e-14 * scale {
            return None;
        }
        if pivot != col {
            for c in 0..d {
                a.swap(pivot * d + c, col * d + c);
                inv.swap(pivot * d + c, col * d + c);
            }
        }
        let p = a[col * d + col];
        for c in 0..d {
            a[col * d + c] /= p;
            inv[col * d + c] /= p;
        }
        for r in 0..d {
            if r == col {
                continue;
            }
            let f = a[r * d + col];
            if f != 0.0 {
                for c in 0..d {
                    a[r * d + c] -= f * a[col * d + c];
                    inv[r * d + c] -= f * inv[col * d + c];
                }
            }
        }
    }
    Some(inv)
}
