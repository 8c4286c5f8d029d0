//! Hermite and Smith normal forms over the integers.
//!
//! Pivot choice is always the entry of smallest absolute value, ties broken
//! by the lowest (row-major) index, which keeps both forms deterministic.

use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::{Int, IntMatrix};

/// Row-style Hermite normal form of a matrix.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// The nonzero rows of the reduced HNF, one per pivot.
    pub hnf: IntMatrix,
    /// Pivot column of each HNF row.
    pub pivots: Vec<usize>,
    /// Unimodular `U` with `U·M = [hnf; 0]` when requested. Rows past the
    /// rank span the left kernel of `M`.
    pub transform: Option<IntMatrix>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Rounds `a / b` to the nearest integer (ties toward floor).
pub(crate) fn round_div(a: &Int, b: &Int) -> Int {
    let (q, r) = a.div_mod_floor(b);
    let twice = &r * 2;
    if b.is_positive() {
        if twice > *b {
            q + 1
        } else {
            q
        }
    } else if twice < *b {
        q + 1
    } else {
        q
    }
}

/// `dst[from..] -= q * src[from..]`
pub(crate) fn row_axpy(dst: &mut [Int], src: &[Int], q: &Int, from: usize) {
    if q.is_zero() {
        return;
    }
    for (d, s) in dst[from..].iter_mut().zip(&src[from..]) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

fn sub_rows(a: &mut [Vec<Int>], dst: usize, src: usize, q: &Int, from: usize) {
    if dst == src || q.is_zero() {
        return;
    }
    let (d, s) = if dst < src {
        let (lo, hi) = a.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = a.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    row_axpy(d, s, q, from);
}

/// Reduced row Hermite normal form: pivots positive, entries above each pivot
/// reduced into `[0, pivot)`.
pub fn echelon(m: &IntMatrix, with_transform: bool) -> Echelon {
    let (n, ncols) = m.shape();
    let mut a = m.data.clone();
    let mut u = with_transform.then(|| IntMatrix::identity(n).data);
    let mut r = 0usize;
    let mut pivots = Vec::new();
    for col in 0..ncols {
        if r == n {
            break;
        }
        let mut have_pivot = false;
        loop {
            let mut best: Option<usize> = None;
            for i in r..n {
                if !a[i][col].is_zero() && best.is_none_or(|b| a[i][col].abs() < a[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(p) = best else { break };
            have_pivot = true;
            a.swap(r, p);
            if let Some(u) = u.as_mut() {
                u.swap(r, p);
            }
            let mut residue = false;
            for i in r + 1..n {
                if a[i][col].is_zero() {
                    continue;
                }
                let q = round_div(&a[i][col], &a[r][col]);
                sub_rows(&mut a, i, r, &q, col);
                if let Some(u) = u.as_mut() {
                    sub_rows(u, i, r, &q, 0);
                }
                if !a[i][col].is_zero() {
                    residue = true;
                }
            }
            if !residue {
                break;
            }
        }
        if !have_pivot {
            continue;
        }
        if a[r][col].is_negative() {
            for x in a[r][col..].iter_mut() {
                *x = -&*x;
            }
            if let Some(u) = u.as_mut() {
                for x in u[r].iter_mut() {
                    *x = -&*x;
                }
            }
        }
        for i in 0..r {
            if a[i][col].is_zero() {
                continue;
            }
            let q = a[i][col].div_floor(&a[r][col]);
            sub_rows(&mut a, i, r, &q, col);
            if let Some(u) = u.as_mut() {
                sub_rows(u, i, r, &q, 0);
            }
        }
        pivots.push(col);
        r += 1;
    }
    a.truncate(r);
    Echelon {
        hnf: IntMatrix::from_rows(ncols, a),
        pivots,
        transform: u.map(|u| IntMatrix::from_rows(n, u)),
    }
}

pub fn rank(m: &IntMatrix) -> usize {
    echelon(m, false).rank()
}

/// Smith normal form `U·M·V = S`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<Int> {
        let k = self.s.nrows().min(self.s.ncols());
        (0..k).map(|i| self.s[(i, i)].clone()).take_while(|x| !x.is_zero()).collect()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let (s, u, v) = smith_core(m, true);
    Smith { s, u: u.unwrap(), v: v.unwrap() }
}

/// Nonzero invariant factors of `M`, in divisibility order.
pub fn invariant_factors(m: &IntMatrix) -> Vec<Int> {
    // Two echelon passes shrink the problem to a square triangular matrix with
    // the same invariant factors.
    let e1 = echelon(m, false);
    if e1.rank() == 0 {
        return Vec::new();
    }
    let e2 = echelon(&e1.hnf.transpose(), false);
    let (s, _, _) = smith_core(&e2.hnf, false);
    let k = s.nrows().min(s.ncols());
    (0..k).map(|i| s[(i, i)].clone()).take_while(|x| !x.is_zero()).collect()
}

fn smith_core(m: &IntMatrix, track: bool) -> (IntMatrix, Option<IntMatrix>, Option<IntMatrix>) {
    let (nr, nc) = m.shape();
    let mut a = m.data.clone();
    let mut u = track.then(|| IntMatrix::identity(nr).data);
    // V is kept transposed so column operations become row operations.
    let mut vt = track.then(|| IntMatrix::identity(nc).data);

    let swap_cols = |a: &mut Vec<Vec<Int>>, j: usize, k: usize| {
        if j != k {
            for row in a.iter_mut() {
                row.swap(j, k);
            }
        }
    };

    for t in 0..nr.min(nc) {
        // Smallest nonzero entry of the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        if let Some(u) = u.as_mut() {
            u.swap(t, pi);
        }
        swap_cols(&mut a, t, pj);
        if let Some(vt) = vt.as_mut() {
            vt.swap(t, pj);
        }

        loop {
            let mut clean = true;
            for i in t + 1..nr {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = round_div(&a[i][t], &a[t][t]);
                sub_rows(&mut a, i, t, &q, t);
                if let Some(u) = u.as_mut() {
                    sub_rows(u, i, t, &q, 0);
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..nc {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = round_div(&a[t][j], &a[t][t]);
                for row in a.iter_mut().skip(t) {
                    if !row[t].is_zero() {
                        let d = &q * &row[t];
                        row[j] -= d;
                    }
                }
                if let Some(vt) = vt.as_mut() {
                    sub_rows(vt, j, t, &q, 0);
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if clean {
                // Divisibility: fold in any row whose entries the pivot does not divide.
                let mut offender = None;
                'search: for i in t + 1..nr {
                    for j in t + 1..nc {
                        if !a[i][j].is_zero() && !a[i][j].is_multiple_of(&a[t][t]) {
                            offender = Some(i);
                            break 'search;
                        }
                    }
                }
                match offender {
                    None => break,
                    Some(i) => {
                        let minus_one = Int::from(-1);
                        sub_rows(&mut a, t, i, &minus_one, t);
                        if let Some(u) = u.as_mut() {
                            sub_rows(u, t, i, &minus_one, 0);
                        }
                        continue;
                    }
                }
            }
            // Move the smallest remaining entry of row/column t onto the diagonal.
            let mut best = (t, t);
            for i in t + 1..nr {
                if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t + 1..nc {
                if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                a.swap(t, best.0);
                if let Some(u) = u.as_mut() {
                    u.swap(t, best.0);
                }
            } else if best.1 != t {
                swap_cols(&mut a, t, best.1);
                if let Some(vt) = vt.as_mut() {
                    vt.swap(t, best.1);
                }
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            if let Some(u) = u.as_mut() {
                for x in u[t].iter_mut() {
                    *x = -&*x;
                }
            }
        }
    }
    let s = IntMatrix::from_rows(nc, a);
    let u = u.map(|u| IntMatrix::from_rows(nr, u));
    let v = vt.map(|vt| IntMatrix::from_rows(nc, vt).transpose());
    (s, u, v)
}
