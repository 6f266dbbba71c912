//! Small dense-vector helpers on `&[f64]` points.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a + t·b`
pub fn axpy(a: &[f64], t: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * y).collect()
}

/// Point reflection `2z − p`.
pub fn reflect(p: &[f64], z: &[f64]) -> Vec<f64> {
    p.iter().zip(z).map(|(p, z)| 2.0 * z - p).collect()
}

pub fn is_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Unit vector in the plane at angle `theta`.
pub fn unit2(theta: f64) -> [f64; 2] {
    [theta.cos(), theta.sin()]
}

/// Rotates a planar point about the origin.
pub fn rotate2(p: &[f64], theta: f64) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

/// Completes `normal` (unit, in R³) to an orthonormal pair spanning its orthogonal plane.
pub fn orthonormal_complement3(normal: &[f64; 3]) -> [[f64; 3]; 2] {
    // Gram-Schmidt against the coordinate axis least aligned with the normal.
    let axis = {
        let a = normal.map(f64::abs);
        if a[0] <= a[1] && a[0] <= a[2] {
            [1.0, 0.0, 0.0]
        } else if a[1] <= a[2] {
            [0.0, 1.0, 0.0]
        } else {
            [0.0, 0.0, 1.0]
        }
    };
    let d = dot(&axis, normal);
    let mut u = [
        axis[0] - d * normal[0],
        axis[1] - d * normal[1],
        axis[2] - d * normal[2],
    ];
    let nu = norm(&u);
    u.iter_mut().for_each(|v| *v /= nu);
    let w = [
        normal[1] * u[2] - normal[2] * u[1],
        normal[2] * u[0] - normal[0] * u[2],
        normal[0] * u[1] - normal[1] * u[0],
    ];
    [u, w]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal() {
        let n = {
            let v = [0.3, -0.5, 0.8];
            let l = norm(&v);
            [v[0] / l, v[1] / l, v[2] / l]
        };
        let [u, w] = orthonormal_complement3(&n);
        assert!((norm(&u) - 1.0).abs() < 1e-14);
        assert!((norm(&w) - 1.0).abs() < 1e-14);
        assert!(dot(&u, &w).abs() < 1e-14);
        assert!(dot(&u, &n).abs() < 1e-14);
        assert!(dot(&w, &n).abs() < 1e-14);
    }

    #[test]
    fn rotation_preserves_length() {
        let p = rotate2(&[3.0, 4.0], 1.234);
        assert!((norm(&p) - 5.0).abs() < 1e-14);
    }
}
