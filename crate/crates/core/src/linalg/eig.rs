//! Dense eigenvalue computation.
//!
//! Symmetric matrices (defect below 1e-12) are reduced by Householder
//! similarities to tridiagonal form and their eigenvalues extracted by Sturm
//! bisection, which keeps imaginary parts exactly zero. General matrices are
//! balanced, reduced to upper Hessenberg form by pivoted elimination, then
//! run through the Francis double-shift QR iteration, eigenvalues only.

use num_complex::Complex64;

use super::RealMatrix;
use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const MAX_ORDER: usize = 2000;

/// All eigenvalues of a square real matrix, sorted by (re, im).
pub fn eigenvalues(m: &RealMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::invalid("eigenvalues need a square matrix"));
    }
    let n = m.rows();
    if n > MAX_ORDER {
        return Err(Error::invalid(format!(
            "matrix order {n} exceeds the supported cap of {MAX_ORDER}"
        )));
    }
    let mut eigs: Vec<Complex64> = if n == 0 {
        Vec::new()
    } else if m.symmetry_defect() < SYMMETRY_TOL {
        symmetric_eigenvalues(m)
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect()
    } else {
        let mut h = m.clone();
        balance(&mut h);
        hessenberg(&mut h);
        francis_qr(&mut h)?
    };
    eigs.sort_unstable_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(eigs)
}

/// Eigenvalues of a symmetric matrix, ascending.
fn symmetric_eigenvalues(m: &RealMatrix) -> Vec<f64> {
    let (d, e) = householder_tridiagonalize(m);
    tridiagonal_eigenvalues(&d, &e)
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
/// Returns (diagonal, subdiagonal) with `e[i]` the entry at (i, i-1).
fn householder_tridiagonalize(m: &RealMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.rows();
    let mut a = m.clone();
    // Average away roundoff-level asymmetry before relying on symmetry.
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = s;
            a[(j, i)] = s;
        }
    }
    let mut v = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let mut norm2 = 0.0;
        for i in k + 1..n {
            norm2 += a[(i, k)] * a[(i, k)];
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= alpha;
        let vtv: f64 = (k + 1..n).map(|i| v[i] * v[i]).sum();
        if vtv == 0.0 {
            continue;
        }
        let beta = 2.0 / vtv;
        // p = beta * A v on the trailing block, then the symmetric rank-two
        // update A <- A - v q^T - q v^T with q = p - (beta v^T p / 2) v.
        let mut p = vec![0.0; n];
        for i in k + 1..n {
            let mut s = 0.0;
            for j in k + 1..n {
                s += a[(i, j)] * v[j];
            }
            p[i] = beta * s;
        }
        let vtp: f64 = (k + 1..n).map(|i| v[i] * p[i]).sum();
        let kk = 0.5 * beta * vtp;
        for i in k + 1..n {
            p[i] -= kk * v[i];
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[(i, j)] -= v[i] * p[j] + p[i] * v[j];
            }
        }
        // The reflector maps column k below the diagonal onto alpha * e1.
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = 0.0;
            a[(k, i)] = 0.0;
        }
    }
    let d: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    let mut e = vec![0.0; n];
    for i in 1..n {
        e[i] = a[(i, i - 1)];
    }
    (d, e)
}

/// Eigenvalues of a symmetric tridiagonal matrix by Sturm-sequence bisection,
/// ascending. `e[i]` is the subdiagonal entry coupling rows i-1 and i.
fn tridiagonal_eigenvalues(d: &[f64], e: &[f64]) -> Vec<f64> {
    let n = d.len();
    if n == 1 {
        return vec![d[0]];
    }
    let radius = |i: usize| {
        let below = if i + 1 < n { e[i + 1].abs() } else { 0.0 };
        e[i].abs() + below
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        lo = lo.min(d[i] - radius(i));
        hi = hi.max(d[i] + radius(i));
    }
    let fudge = (hi - lo).max(1.0) * f64::EPSILON * n as f64;
    lo -= fudge;
    hi += fudge;

    // Number of eigenvalues strictly below x, from the LDL^T sign recurrence.
    let count_below = |x: f64| -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0usize;
        let mut q = d[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            if q == 0.0 {
                q = tiny;
            }
            q = d[i] - x - e[i] * e[i] / q;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };

    (0..n)
        .map(|k| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if b - a <= 2.0 * f64::EPSILON * mid.abs().max(1.0) {
                    break;
                }
                if count_below(mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Diagonal similarity scaling by powers of two so row and column norms are
/// comparable; exact in floating point, improves QR accuracy.
fn balance(a: &mut RealMatrix) {
    let n = a.rows();
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut f = 1.0;
                let s = c + r;
                let mut g = r / RADIX;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[(i, j)] *= g;
                    }
                    for j in 0..n {
                        a[(j, i)] *= f;
                    }
                }
            }
        }
    }
}

/// Similarity reduction to upper Hessenberg form by stabilized elementary
/// eliminations (row pivoting keeps multipliers at most one in magnitude).
fn hessenberg(a: &mut RealMatrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    for m in 1..n - 1 {
        let mut x = 0.0f64;
        let mut pivot_row = m;
        for j in m..n {
            if a[(j, m - 1)].abs() > x.abs() {
                x = a[(j, m - 1)];
                pivot_row = j;
            }
        }
        if pivot_row != m {
            for j in m - 1..n {
                let t = a[(pivot_row, j)];
                a[(pivot_row, j)] = a[(m, j)];
                a[(m, j)] = t;
            }
            for j in 0..n {
                let t = a[(j, pivot_row)];
                a[(j, pivot_row)] = a[(j, m)];
                a[(j, m)] = t;
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let mut y = a[(i, m - 1)];
                if y != 0.0 {
                    y /= x;
                    a[(i, m - 1)] = 0.0;
                    for j in m..n {
                        let delta = y * a[(m, j)];
                        a[(i, j)] -= delta;
                    }
                    for j in 0..n {
                        let delta = y * a[(j, i)];
                        a[(j, m)] += delta;
                    }
                }
            }
        }
    }
    for i in 2..n {
        for j in 0..i - 1 {
            a[(i, j)] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix, eigenvalues only.
/// Classic EISPACK hqr schedule: a global budget of 30n sweeps, with an
/// exceptional shift every 10 sweeps spent on the same trailing block.
fn francis_qr(a: &mut RealMatrix) -> Result<Vec<Complex64>> {
    const EPS: f64 = f64::EPSILON;
    let n = a.rows();
    let ni = n as isize;
    let mut h = a.as_slice().to_vec();
    let ix = |i: isize, j: isize| (i as usize) * n + (j as usize);
    let mut wr = vec![0.0f64; n];
    let mut wi = vec![0.0f64; n];

    let mut anorm = 0.0;
    for i in 0..ni {
        for j in (i - 1).max(0)..ni {
            anorm += h[ix(i, j)].abs();
        }
    }
    if anorm == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); n]);
    }

    let mut nn: isize = ni - 1;
    let mut t = 0.0f64;
    // Global sweep budget as in EISPACK: one stubborn eigenvalue may borrow
    // sweeps saved by the easy ones.
    let mut budget = 30 * n.max(1);
    while nn >= 0 {
        let mut its = 0;
        loop {
            // Find the lowest decoupled block.
            let mut l = nn;
            while l >= 1 {
                let mut s = h[ix(l - 1, l - 1)].abs() + h[ix(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if h[ix(l, l - 1)].abs() <= EPS * s {
                    h[ix(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = h[ix(nn, nn)];
            if l == nn {
                // 1x1 block has converged.
                wr[nn as usize] = x + t;
                wi[nn as usize] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = h[ix(nn - 1, nn - 1)];
            let mut w = h[ix(nn, nn - 1)] * h[ix(nn - 1, nn)];
            if l == nn - 1 {
                // 2x2 block: real pair or complex conjugate pair.
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    let zz = p + if p >= 0.0 { z } else { -z };
                    wr[(nn - 1) as usize] = x + zz;
                    wr[nn as usize] = if zz != 0.0 { x - w / zz } else { x + zz };
                    wi[(nn - 1) as usize] = 0.0;
                    wi[nn as usize] = 0.0;
                } else {
                    wr[(nn - 1) as usize] = x + p;
                    wr[nn as usize] = x + p;
                    wi[(nn - 1) as usize] = -z;
                    wi[nn as usize] = z;
                }
                nn -= 2;
                break;
            }
            if budget == 0 {
                return Err(Error::numerical(
                    "QR iteration failed to converge within the global sweep budget",
                ));
            }
            budget -= 1;
            if its > 0 && its % 10 == 0 {
                t += x;
                for i in 0..=nn {
                    h[ix(i, i)] -= x;
                }
                let s = h[ix(nn, nn - 1)].abs() + h[ix(nn - 1, nn - 2)].abs();
                y = 0.75 * s;
                x = y;
                w = -0.4375 * s * s;
            }
            its += 1;
            // Look for two consecutive small subdiagonals so the sweep can
            // start inside the block.
            let mut m = nn - 2;
            let (mut p, mut q, mut r) = (0.0f64, 0.0f64, 0.0f64);
            while m >= l {
                let z = h[ix(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h[ix(m + 1, m)] + h[ix(m, m + 1)];
                q = h[ix(m + 1, m + 1)] - z - rr - ss;
                r = h[ix(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = h[ix(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs()
                    * (h[ix(m - 1, m - 1)].abs() + z.abs() + h[ix(m + 1, m + 1)].abs());
                if u <= EPS * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                h[ix(i, i - 2)] = 0.0;
                if i != m + 2 {
                    h[ix(i, i - 3)] = 0.0;
                }
            }
            // Double QR sweep over rows l..nn.
            for k in m..=nn - 1 {
                if k != m {
                    p = h[ix(k, k - 1)];
                    q = h[ix(k + 1, k - 1)];
                    r = if k != nn - 1 { h[ix(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s0 = (p * p + q * q + r * r).sqrt();
                let s = if p >= 0.0 { s0 } else { -s0 };
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        h[ix(k, k - 1)] = -h[ix(k, k - 1)];
                    }
                } else {
                    h[ix(k, k - 1)] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in k..=nn {
                    let mut pp = h[ix(k, j)] + q * h[ix(k + 1, j)];
                    if k != nn - 1 {
                        pp += r * h[ix(k + 2, j)];
                        h[ix(k + 2, j)] -= pp * z;
                    }
                    h[ix(k + 1, j)] -= pp * y;
                    h[ix(k, j)] -= pp * x;
                }
                let mmin = if nn < k + 3 { nn } else { k + 3 };
                for i in l..=mmin {
                    let mut pp = x * h[ix(i, k)] + y * h[ix(i, k + 1)];
                    if k != nn - 1 {
                        pp += z * h[ix(i, k + 2)];
                        h[ix(i, k + 2)] -= pp * r;
                    }
                    h[ix(i, k + 1)] -= pp * q;
                    h[ix(i, k)] -= pp;
                }
            }
        }
    }
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex64::new(re, im))
        .collect())
}
