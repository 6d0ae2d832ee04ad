//! Independent reference implementations used as test oracles.
//!
//! Everything here works on plain `Vec<Vec<Complex64>>` with textbook
//! algorithms so that no factorization is shared with the library.

#![allow(dead_code)]

use cfmimo_core::{ChannelBlock, CMat, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Dense = Vec<Vec<Complex64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn from_cmat(m: &CMat) -> Dense {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn to_cmat(m: &Dense) -> CMat {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    CMat::from_fn(rows, cols, |i, j| m[i][j])
}

pub fn complex_normal(rng: &mut ChaCha8Rng, variance: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * (variance / 2.0).sqrt()
}

pub fn random_cmat(rng: &mut ChaCha8Rng, rows: usize, cols: usize, variance: f64) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex_normal(rng, variance))
}

pub fn random_block(rng: &mut ChaCha8Rng, aps: usize, ues: usize, tau: f64) -> ChannelBlock {
    ChannelBlock {
        hat: random_cmat(rng, aps, ues, 1.0 - tau),
        err: random_cmat(rng, aps, ues, tau),
    }
}

pub fn transpose(a: &Dense) -> Dense {
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j]).collect()).collect()
}

pub fn adjoint(a: &Dense) -> Dense {
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j].conj()).collect()).collect()
}

pub fn conj(a: &Dense) -> Dense {
    a.iter().map(|row| row.iter().map(|z| z.conj()).collect()).collect()
}

pub fn mul(a: &Dense, b: &Dense) -> Dense {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    assert_eq!(a[0].len(), k, "inner dimensions");
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for t in 0..k {
                        acc += a[i][t] * b[t][j];
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn add(a: &Dense, b: &Dense) -> Dense {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn scale(a: &Dense, s: f64) -> Dense {
    a.iter().map(|row| row.iter().map(|z| z * s).collect()).collect()
}

pub fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
                .collect()
        })
        .collect()
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn inverse(a: &Dense) -> Dense {
    let n = a.len();
    let mut m: Dense = a.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[x][col].norm().partial_cmp(&m[y][col].norm()).unwrap())
            .unwrap();
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let p = m[col][col];
        assert!(p.norm() > 0.0, "singular matrix in oracle inverse");
        for j in 0..n {
            m[col][j] /= p;
            inv[col][j] /= p;
        }
        for row in 0..n {
            if row != col {
                let f = m[row][col];
                for j in 0..n {
                    let (mc, ic) = (m[col][j], inv[col][j]);
                    m[row][j] -= f * mc;
                    inv[row][j] -= f * ic;
                }
            }
        }
    }
    inv
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(a: &Dense) -> Complex64 {
    let n = a.len();
    let mut m = a.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[x][col].norm().partial_cmp(&m[y][col].norm()).unwrap())
            .unwrap();
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        let p = m[col][col];
        if p.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        det *= p;
        for row in col + 1..n {
            let f = m[row][col] / p;
            for j in col..n {
                let v = m[col][j];
                m[row][j] -= f * v;
            }
        }
    }
    det
}

/// `rho G^T P P^H G^*` for an `M x n` channel and an `M x n_i` precoder.
pub fn gram_term(g: &Dense, p: &Dense, rho: f64) -> Dense {
    let gt_p = mul(&transpose(g), p);
    scale(&mul(&gt_p, &adjoint(&gt_p)), rho)
}

/// Closed-form cluster sum-rate evaluated from scratch.
/// `cross[i] = (G_hat_ic, G_err_ic, P_i)` for every interfering cluster.
pub fn cluster_rate_oracle(
    g_hat: &Dense,
    g_err: &Dense,
    p: &Dense,
    cross: &[(Dense, Dense, Dense)],
    rho: f64,
    noise: f64,
) -> f64 {
    let n = g_hat[0].len();
    let signal = gram_term(g_hat, p, rho);
    let mut r = add(&gram_term(g_err, p, rho), &scale(&identity(n), noise));
    for (gh, ge, pi) in cross {
        r = add(&r, &gram_term(gh, pi, rho));
        r = add(&r, &gram_term(ge, pi, rho));
    }
    let a = add(&mul(&signal, &inverse(&r)), &identity(n));
    determinant(&a).norm().log2()
}

/// Relative error with an absolute floor for values near zero.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}

/// Network sum-rate by brute force over every `n`-subset of `0..k`
/// (lexicographic), scored with the given closure.
pub fn subsets(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            go(i + 1, k, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, k, n, &mut Vec::new(), &mut out);
    out
}

#[test]
fn oracle_self_checks() {
    let mut r = rng(1);
    let a = from_cmat(&random_cmat(&mut r, 5, 5, 1.0));
    let prod = mul(&a, &inverse(&a));
    for i in 0..5 {
        for j in 0..5 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((prod[i][j] - Complex64::new(want, 0.0)).norm() < 1e-10);
        }
    }
    // det(AB) = det(A) det(B)
    let b = from_cmat(&random_cmat(&mut r, 5, 5, 1.0));
    let lhs = determinant(&mul(&a, &b));
    let rhs = determinant(&a) * determinant(&b);
    assert!((lhs - rhs).norm() < 1e-9 * rhs.norm());
    assert_eq!(subsets(8, 4).len(), 70);
}
