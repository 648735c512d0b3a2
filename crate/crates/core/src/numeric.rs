//! Floating-point building blocks for the spectral and asymptotic side.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Arithmetic-geometric mean of two nonnegative numbers.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind, parameter convention `K(m)`, `m < 1`.
pub fn elliptic_k(m: f64) -> f64 {
    elliptic_k_complement((1.0 - m).sqrt())
}

/// `K` expressed through the complementary modulus `k' = sqrt(1 - m)`.
pub fn elliptic_k_complement(k_prime: f64) -> f64 {
    PI / (2.0 * agm(1.0, k_prime))
}

/// Tanh-sinh quadrature on `[a, b]`, tolerant of integrable endpoint singularities.
///
/// Nodes that round onto an endpoint are dropped, so singularities stronger
/// than logarithmic at `b` lose roughly `sqrt(ε)` of their mass.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let node = |t: f64| -> Option<f64> {
        let u = FRAC_PI_2 * t.sinh();
        // 1 - tanh|u| = 2 / (e^{2|u|} + 1)
        let gap = 2.0 / ((2.0 * u.abs()).exp() + 1.0);
        let offset = half * gap;
        let x = if t < 0.0 { a + offset } else { b - offset };
        if offset == 0.0 || x <= a || x >= b {
            return None;
        }
        let cosh_u = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        let v = f(x);
        v.is_finite().then_some(w * v)
    };
    let t_max = 4.0;
    let mut h = 0.5;
    let mut sum = f(mid) * half * FRAC_PI_2;
    let mut k = 1;
    while (k as f64) * h <= t_max {
        let t = k as f64 * h;
        sum += node(t).unwrap_or(0.0) + node(-t).unwrap_or(0.0);
        k += 1;
    }
    let mut estimate = sum * h;
    for _ in 0..10 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            let t = k as f64 * h;
            sum += node(t).unwrap_or(0.0) + node(-t).unwrap_or(0.0);
            k += 2;
        }
        let next = sum * h;
        let converged = (next - estimate).abs() <= tol * next.abs().max(1e-300);
        estimate = next;
        if converged {
            break;
        }
    }
    estimate
}

/// Eigenvalues of a real symmetric matrix (row-major) by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(n: usize, data: &[f64]) -> Vec<f64> {
    assert_eq!(data.len(), n * n, "matrix data does not match dimension");
    let mut a = data.to_vec();
    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Eigenvalues of a complex Hermitian matrix via the real symmetric embedding
/// `[[A, -B], [B, A]]`, whose spectrum is that of `A + iB` doubled.
pub fn hermitian_eigenvalues(n: usize, data: &[Complex64]) -> Vec<f64> {
    let m = 2 * n;
    let mut emb = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = data[i * n + j];
            emb[i * m + j] = z.re;
            emb[(i + n) * m + j + n] = z.re;
            emb[i * m + j + n] = -z.im;
            emb[(i + n) * m + j] = z.im;
        }
    }
    symmetric_eigenvalues(m, &emb).into_iter().step_by(2).collect()
}

/// Determinant by LU factorisation with partial pivoting.
pub fn complex_determinant(n: usize, data: &[Complex64]) -> Complex64 {
    let mut a = data.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let pivot = (k..n).max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm())).unwrap_or(k);
        if a[pivot * n + k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != k {
            for j in 0..n {
                a.swap(k * n + j, pivot * n + j);
            }
            det = -det;
        }
        let akk = a[k * n + k];
        det *= akk;
        for i in k + 1..n {
            let factor = a[i * n + k] / akk;
            for j in k + 1..n {
                let v = a[k * n + j];
                a[i * n + j] -= factor * v;
            }
        }
    }
    det
}

/// Horner evaluation of a real polynomial (index = degree).
pub fn eval_real(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

pub fn derivative_real(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect()
}

fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    let r = z.norm();
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
        scale = scale * r + c.norm();
    }
    (p, dp, scale)
}

/// All complex roots of a polynomial (index = degree) by Aberth–Ehrlich iteration.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut coeffs = coeffs.to_vec();
    while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
        coeffs.pop();
    }
    let d = coeffs.len().saturating_sub(1);
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[d];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let radius = monic[0].norm().powf(1.0 / d as f64).max(1e-3);
    let mut z: Vec<Complex64> =
        (0..d).map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / d as f64 + 0.4)).collect();
    const MAX_ITER: usize = 500;
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let mut done = true;
        for k in 0..d {
            let (p, dp, scale) = eval_with_derivative(&monic, z[k]);
            if p.norm() <= 1e-13 * scale * 1e-2 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..d).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let w = ratio / (1.0 - ratio * repulsion);
            z[k] -= w;
            if w.norm() > 1e-15 * z[k].norm().max(1e-300) && p.norm() > 1e-13 * scale {
                done = false;
            }
        }
        if done {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::RootFinding { iterations: MAX_ITER });
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp, _) = eval_with_derivative(&monic, *zk);
            if dp.norm() == 0.0 {
                break;
            }
            let candidate = *zk - p / dp;
            if eval_with_derivative(&monic, candidate).0.norm() < p.norm() {
                *zk = candidate;
            } else {
                break;
            }
        }
    }
    Ok(z)
}
