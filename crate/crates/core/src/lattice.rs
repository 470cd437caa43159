//! Exact integer and rational linear algebra on small dense matrices.
//!
//! Everything here works over `BigInt` / `BigRational`; the matrices that
//! show up in fan and polytope code are at most a handful of rows, so plain
//! Gaussian elimination is the right tool.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IVec = Vec<BigInt>;
pub type QVec = Vec<BigRational>;

pub fn ivec(xs: &[i64]) -> IVec {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn to_q(v: &[BigInt]) -> QVec {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_q(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// `⟨m, eta⟩` for a rational point and an integer normal.
pub fn dot_qi(m: &[BigRational], eta: &[BigInt]) -> BigRational {
    m.iter().zip(eta).fold(BigRational::zero(), |acc, (x, y)| {
        acc + x * BigRational::from_integer(y.clone())
    })
}

pub fn sub_q(a: &[BigRational], b: &[BigRational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add_q(a: &[BigRational], b: &[BigRational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

pub fn is_primitive(v: &[BigInt]) -> bool {
    gcd_all(v).is_one()
}

/// Scales a rational vector to the primitive integer vector on the same ray.
/// Returns the zero vector unchanged.
pub fn primitive_integer(v: &[BigRational]) -> IVec {
    let l = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: IVec = v.iter().map(|x| (x * &l).to_integer()).collect();
    let g = gcd_all(&ints);
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Determinant of a square integer matrix (fraction-free Bareiss elimination).
pub fn det_int(m: &[IVec]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<IVec> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Row-reduces a rational matrix in place to reduced echelon form and
/// returns the pivot columns.
pub fn rref(m: &mut [QVec]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, p) in m[i].iter_mut().zip(&pivot_row) {
                    *x = &*x - p * &f;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank_q(rows: &[QVec]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

pub fn rank_int(rows: &[IVec]) -> usize {
    let q: Vec<QVec> = rows.iter().map(|r| to_q(r)).collect();
    rank_q(&q)
}

/// Solves the square system `a x = b` exactly; `None` if singular.
pub fn solve_q(a: &[QVec], b: &[BigRational]) -> Option<QVec> {
    let n = a.len();
    let mut aug: Vec<QVec> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n].clone()).collect())
}

/// Exact inverse of a square rational matrix.
pub fn inverse_q(a: &[QVec]) -> Option<Vec<QVec>> {
    let n = a.len();
    let mut aug: Vec<QVec> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Basis of the rational null space `{x : a x = 0}` (rows of `a` have `cols`
/// entries).
pub fn nullspace_q(a: &[QVec], cols: usize) -> Vec<QVec> {
    let mut m = a.to_vec();
    let piv = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![BigRational::zero(); cols];
            x[f] = BigRational::one();
            for (r, &p) in piv.iter().enumerate() {
                x[p] = -m[r][f].clone();
            }
            x
        })
        .collect()
}

/// Z-basis of the integer kernel `{x ∈ Z^cols : a x = 0}`, computed with
/// unimodular column operations.
pub fn integer_kernel(a: &[IVec], cols: usize) -> Vec<IVec> {
    let mut m: Vec<IVec> = a.to_vec();
    let mut u: Vec<IVec> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut piv = 0;
    for r in 0..m.len() {
        if piv >= cols {
            break;
        }
        for j in piv + 1..cols {
            if m[r][j].is_zero() {
                continue;
            }
            let a0 = m[r][piv].clone();
            let b0 = m[r][j].clone();
            let eg = a0.extended_gcd(&b0);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let p = -(&b0 / &g);
            let q = &a0 / &g;
            // [col_piv, col_j] <- [x col_piv + y col_j, p col_piv + q col_j]
            let mix = |rows: &mut Vec<IVec>| {
                for row in rows.iter_mut() {
                    let cp = row[piv].clone();
                    let cj = row[j].clone();
                    row[piv] = &x * &cp + &y * &cj;
                    row[j] = &p * &cp + &q * &cj;
                }
            };
            mix(&mut m);
            mix(&mut u);
        }
        if !m[r][piv].is_zero() {
            piv += 1;
        }
    }
    (piv..cols)
        .map(|c| u.iter().map(|row| row[c].clone()).collect())
        .collect()
}

/// Z-basis of `W ∩ Z^n` where `W` is the rational span of `dirs`.
pub fn saturated_lattice_basis(dirs: &[QVec], n: usize) -> Vec<IVec> {
    let rank = rank_q(dirs);
    if rank == 0 {
        return Vec::new();
    }
    let perp: Vec<IVec> = nullspace_q(dirs, n).iter().map(|v| primitive_integer(v)).collect();
    if perp.is_empty() {
        return (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
    }
    integer_kernel(&perp, n)
}

pub fn floor_q(x: &BigRational) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil_q(x: &BigRational) -> BigInt {
    x.ceil().to_integer()
}

pub fn abs_int(x: &BigInt) -> BigInt {
    x.abs()
}

pub fn format_q(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
