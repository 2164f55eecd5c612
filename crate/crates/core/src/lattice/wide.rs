//! Smith form over arbitrary-precision integers, for inputs where the `i64`
//! elimination overflows. Alternating row and column Hermite reduction keeps
//! `D` small; the kernel parts of `U` and `V` are then LLL-reduced and the
//! remaining rows (columns) size-reduced against them, which usually brings
//! the transforms back into `i64` range.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

type Mat = Vec<Vec<BigInt>>;

pub(super) struct WideSmith {
    pub u: Vec<Vec<i64>>,
    pub d: Vec<Vec<i64>>,
    pub v: Vec<Vec<i64>>,
    pub v_inv: Vec<Vec<i64>>,
}

fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| BigInt::from(u8::from(i == j))).collect()).collect()
}

fn transpose(m: &Mat, cols: usize) -> Mat {
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Minimal Bezout pair: `s a + t b = g > 0`.
fn bezout(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    let (mut g, mut s, mut t) = (e.gcd, e.x, e.y);
    if g.is_negative() {
        g = -g;
        s = -s;
        t = -t;
    }
    (g, s, t)
}

/// `(r_i, r_j) <- (s r_i + t r_j, p r_i + q r_j)` on every matrix in `ms`.
fn combine_rows(ms: &mut [&mut Mat], i: usize, j: usize, [s, t, p, q]: [&BigInt; 4]) {
    for m in ms.iter_mut() {
        let (ri, rj) = (m[i].clone(), m[j].clone());
        m[i] = ri.iter().zip(&rj).map(|(x, y)| s * x + t * y).collect();
        m[j] = ri.iter().zip(&rj).map(|(x, y)| p * x + q * y).collect();
    }
}

/// Row Hermite form in place; `u` accumulates the row operations.
fn hermite(d: &mut Mat, u: &mut Mat) -> bool {
    let rows = d.len();
    let cols = d.first().map_or(0, Vec::len);
    let mut changed = false;
    let mut piv = 0;
    for j in 0..cols {
        if piv == rows {
            break;
        }
        for i in piv + 1..rows {
            if d[i][j].is_zero() {
                continue;
            }
            changed = true;
            if d[piv][j].is_zero() {
                d.swap(piv, i);
                u.swap(piv, i);
                continue;
            }
            let (a, b) = (d[piv][j].clone(), d[i][j].clone());
            let (g, s, t) = bezout(&a, &b);
            let (p, q) = (-(&b / &g), &a / &g);
            combine_rows(&mut [d, u], piv, i, [&s, &t, &p, &q]);
        }
        if d[piv][j].is_zero() {
            continue;
        }
        if d[piv][j].is_negative() {
            for m in [&mut *d, &mut *u] {
                m[piv].iter_mut().for_each(|x| *x = -&*x);
            }
        }
        let p = d[piv][j].clone();
        for i in 0..piv {
            let q = d[i][j].div_floor(&p);
            if !q.is_zero() {
                changed = true;
                for m in [&mut *d, &mut *u] {
                    let pivot_row = m[piv].clone();
                    m[i].iter_mut().zip(&pivot_row).for_each(|(x, y)| *x -= &q * y);
                }
            }
        }
        piv += 1;
    }
    changed
}

fn is_diagonal(d: &Mat) -> bool {
    d.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, x)| i == j || x.is_zero()))
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).fold(BigRational::zero(), |s, t| s + t)
}

fn rational(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

fn gram_schmidt(b: &Mat) -> Vec<Vec<BigRational>> {
    let mut out: Vec<Vec<BigRational>> = Vec::with_capacity(b.len());
    for row in b {
        let mut v = rational(row);
        for prev in &out {
            let mu = dot(&v, prev) / dot(prev, prev);
            v.iter_mut().zip(prev).for_each(|(x, y)| *x -= &mu * y);
        }
        out.push(v);
    }
    out
}

/// Textbook LLL (`delta = 3/4`) on the rows of `b`.
fn lll(b: &mut Mat) {
    let n = b.len();
    let delta = BigRational::new(3.into(), 4.into());
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let gs = gram_schmidt(b);
            let mu = dot(&rational(&b[k]), &gs[j]) / dot(&gs[j], &gs[j]);
            let q = mu.round().to_integer();
            if !q.is_zero() {
                let bj = b[j].clone();
                b[k].iter_mut().zip(&bj).for_each(|(x, y)| *x -= &q * y);
            }
        }
        let gs = gram_schmidt(b);
        let mu = dot(&rational(&b[k]), &gs[k - 1]) / dot(&gs[k - 1], &gs[k - 1]);
        if dot(&gs[k], &gs[k]) >= (&delta - &mu * &mu) * dot(&gs[k - 1], &gs[k - 1]) {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
}

/// Reduces rows `rank..` of `m` as a lattice basis, then size-reduces the
/// first `rank` rows against them by nearest plane.
fn reduce_against_kernel(m: &mut Mat, rank: usize) {
    if rank >= m.len() {
        return;
    }
    let mut kernel: Mat = m[rank..].to_vec();
    lll(&mut kernel);
    let gs = gram_schmidt(&kernel);
    for row in m.iter_mut().take(rank) {
        for j in (0..kernel.len()).rev() {
            let q = (dot(&rational(row), &gs[j]) / dot(&gs[j], &gs[j])).round().to_integer();
            if !q.is_zero() {
                row.iter_mut().zip(&kernel[j]).for_each(|(x, y)| *x -= &q * y);
            }
        }
    }
    m.splice(rank.., kernel);
}

/// Inverse of a unimodular matrix by Gauss-Jordan over the rationals.
fn inverse(m: &Mat) -> Option<Mat> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = rational(r);
            row.extend((0..n).map(|j| BigRational::from_integer(BigInt::from(u8::from(i == j)))));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        a[c].iter_mut().for_each(|x| *x *= &inv);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pivot = a[c].clone();
                a[r].iter_mut().zip(&pivot).for_each(|(x, y)| *x -= &f * y);
            }
        }
    }
    a.into_iter().map(|r| r[n..].iter().map(|x| x.is_integer().then(|| x.to_integer())).collect()).collect()
}

fn narrow(m: &Mat) -> Option<Vec<Vec<i64>>> {
    m.iter().map(|r| r.iter().map(ToPrimitive::to_i64).collect()).collect()
}

pub(super) fn smith(a: &[Vec<i64>], rows: usize, cols: usize) -> Option<WideSmith> {
    let mut d: Mat = a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut u = identity(rows);
    let mut vt = identity(cols);

    loop {
        hermite(&mut d, &mut u);
        if is_diagonal(&d) {
            break;
        }
        let mut dt = transpose(&d, cols);
        hermite(&mut dt, &mut vt);
        d = transpose(&dt, rows);
        if is_diagonal(&d) {
            break;
        }
    }

    // divisibility chain: diag(a, b) -> diag(g, ab/g)
    let k = rows.min(cols);
    for i in 0..k {
        for j in i + 1..k {
            let (x, y) = (d[i][i].clone(), d[j][j].clone());
            if y.is_zero() || (!x.is_zero() && (&y % &x).is_zero()) {
                continue;
            }
            if x.is_zero() {
                d[i][i] = y;
                d[j][j] = x;
                u.swap(i, j);
                vt.swap(i, j);
                continue;
            }
            let (g, s, t) = bezout(&x, &y);
            let (xg, yg) = (&x / &g, &y / &g);
            combine_rows(&mut [&mut u], i, j, [&s, &t, &(-&yg), &xg]);
            // columns: (c_i, c_j) <- (c_i + c_j, -t yg c_i + s xg c_j)
            combine_rows(&mut [&mut vt], i, j, [&BigInt::one(), &BigInt::one(), &(-(&t * &yg)), &(&s * &xg)]);
            d[i][i] = g;
            d[j][j] = &x * &yg;
        }
    }

    let rank = (0..k).take_while(|&i| !d[i][i].is_zero()).count();
    reduce_against_kernel(&mut u, rank);
    reduce_against_kernel(&mut vt, rank);
    let v = transpose(&vt, cols);
    let v_inv = inverse(&v)?;
    Some(WideSmith { u: narrow(&u)?, d: narrow(&d)?, v: narrow(&v)?, v_inv: narrow(&v_inv)? })
}
