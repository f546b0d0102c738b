//! Small dense exterior-algebra and linear-algebra kernels: complex
//! determinants, Pfaffians, top-degree wedge evaluation and symmetric
//! eigenvalues. Everything here is sized for matrices of dimension <= ~12,
//! which covers the quadrics this crate works with.

use num_complex::Complex;

use crate::scalar::Real;

/// Determinant of a square complex matrix (row-major), by LU with partial
/// pivoting. Consumes the scratch buffer.
pub fn det_complex<T: Real>(m: &mut Vec<Vec<Complex<T>>>) -> Complex<T> {
    let n = m.len();
    debug_assert!(m.iter().all(|r| r.len() == n));
    let mut det = Complex::new(T::one(), T::zero());
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[col][col].norm_sqr();
        for row in col + 1..n {
            let mag = m[row][col].norm_sqr();
            if mag > best {
                best = mag;
                pivot = row;
            }
        }
        if best == T::zero() {
            return Complex::new(T::zero(), T::zero());
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let diag = m[col][col];
        det = det * diag;
        for row in col + 1..n {
            let factor = m[row][col] / diag;
            for k in col..n {
                let sub = factor * m[col][k];
                m[row][k] = m[row][k] - sub;
            }
        }
    }
    det
}

/// Determinant of a real square matrix, same elimination.
pub fn det_real<T: Real>(m: &mut Vec<Vec<T>>) -> T {
    let n = m.len();
    let mut det = T::one();
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[col][col].abs();
        for row in col + 1..n {
            if m[row][col].abs() > best {
                best = m[row][col].abs();
                pivot = row;
            }
        }
        if best == T::zero() {
            return T::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let diag = m[col][col];
        det = det * diag;
        for row in col + 1..n {
            let factor = m[row][col] / diag;
            for k in col..n {
                let sub = factor * m[col][k];
                m[row][k] = m[row][k] - sub;
            }
        }
    }
    det
}

/// Solves the square system `a x = b` in place by Gaussian elimination with
/// partial pivoting. Returns `None` when the pivot collapses.
pub fn solve<T: Real>(a: &mut Vec<Vec<T>>, b: &mut Vec<T>) -> Option<Vec<T>> {
    let n = a.len();
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col][col].abs();
        for row in col + 1..n {
            if a[row][col].abs() > best {
                best = a[row][col].abs();
                pivot = row;
            }
        }
        if !(best > T::zero()) || !best.is_finite() {
            return None;
        }
        if pivot != col {
            a.swap(pivot, col);
            b.swap(pivot, col);
        }
        let diag = a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / diag;
            for k in col..n {
                let sub = factor * a[col][k];
                a[row][k] = a[row][k] - sub;
            }
            let sub = factor * b[col];
            b[row] = b[row] - sub;
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc = acc - a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Pfaffian of an antisymmetric matrix of even dimension, by recursive
/// expansion over perfect matchings with bitmask memoization.
pub fn pfaffian<T: Real>(a: &[Vec<T>]) -> T {
    let n = a.len();
    assert!(n % 2 == 0 && n <= 16, "pfaffian sized for small even matrices");
    if n == 0 {
        return T::one();
    }
    let full: u32 = (1u32 << n) - 1;
    let mut memo: Vec<Option<T>> = vec![None; 1usize << n];
    pf_rec(a, full, &mut memo)
}

fn pf_rec<T: Real>(a: &[Vec<T>], mask: u32, memo: &mut Vec<Option<T>>) -> T {
    if mask == 0 {
        return T::one();
    }
    if let Some(v) = memo[mask as usize] {
        return v;
    }
    let i = mask.trailing_zeros() as usize;
    let rest = mask & !(1u32 << i);
    let mut acc = T::zero();
    let mut sign = T::one();
    let mut bits = rest;
    while bits != 0 {
        let j = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        let sub = rest & !(1u32 << j);
        let term = sign * a[i][j] * pf_rec(a, sub, memo);
        acc = acc + term;
        sign = -sign;
    }
    memo[mask as usize] = Some(acc);
    acc
}

/// Evaluates `(A ∧ B)(e_0, ..., e_{2n-1})` for two n-forms given through a
/// callback returning `A` on an index subset; `B` on the complement is the
/// conjugate of the callback (the `Ω ∧ Ω̄` case). Sums over (n,n)-shuffles.
pub fn wedge_conj_pairing<T: Real>(
    two_n: usize,
    form_on: impl Fn(&[usize]) -> Complex<T>,
) -> Complex<T> {
    let n = two_n / 2;
    assert_eq!(n * 2, two_n);
    let mut total = Complex::new(T::zero(), T::zero());
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        let comp: Vec<usize> = (0..two_n).filter(|i| !subset.contains(i)).collect();
        // Sign of the permutation [subset, comp] as a shuffle of 0..2n.
        let mut inversions = 0usize;
        for &s in &subset {
            for &c in &comp {
                if s > c {
                    inversions += 1;
                }
            }
        }
        let a = form_on(&subset);
        let b = form_on(&comp).conj();
        let term = a * b;
        if inversions % 2 == 0 {
            total = total + term;
        } else {
            total = total - term;
        }
        // Next n-combination of {0..2n} in lexicographic order.
        let mut idx = n;
        loop {
            if idx == 0 {
                return total;
            }
            idx -= 1;
            if subset[idx] != idx + two_n - n {
                subset[idx] += 1;
                for k in idx + 1..n {
                    subset[k] = subset[k - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
pub fn sym_eigenvalues<T: Real>(matrix: &[Vec<T>]) -> Vec<T> {
    let n = matrix.len();
    let mut a: Vec<Vec<T>> = matrix.to_vec();
    for _sweep in 0..64 {
        let mut off = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                off = off + a[i][j] * a[i][j];
            }
        }
        if off <= T::of(1e-30) * (T::one() + frobenius_sq(&a)) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::of(2.0) * a[p][q]);
                let t = {
                    let sign = if theta >= T::zero() { T::one() } else { -T::one() };
                    sign / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

fn frobenius_sq<T: Real>(a: &[Vec<T>]) -> T {
    let mut acc = T::zero();
    for row in a {
        for &v in row {
            acc = acc + v * v;
        }
    }
    acc
}
