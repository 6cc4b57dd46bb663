//! Dense Cholesky factorization with variance flooring.
//!
//! Matrices are square, row-major `Vec<f64>`. Only the lower triangle is read.
//! A factorization "fails" when a pivot (a sequential conditional variance)
//! drops below the floor. On failure the floor is added to the diagonal once
//! and the factorization is rerun, clamping any pivot that is still below the
//! floor. Either fallback marks the result as floored.

/// Block width of the left-looking update. Tuned for a few MB of cache.
const BLOCK: usize = 48;

#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    /// Row-major lower factor; entries above the diagonal are garbage.
    l: Vec<f64>,
    floored: bool,
}

impl Cholesky {
    /// Factors the symmetric matrix `a` (`n x n`, row-major).
    pub fn factor(mut a: Vec<f64>, n: usize, floor: f64) -> Self {
        assert_eq!(a.len(), n * n, "matrix must be n x n");
        let original = a.clone();
        if factor_in_place(&mut a, n, floor, false) {
            return Self {
                n,
                l: a,
                floored: false,
            };
        }
        a = original;
        for i in 0..n {
            a[i * n + i] += floor;
        }
        factor_in_place(&mut a, n, floor, true);
        Self {
            n,
            l: a,
            floored: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn floored(&self) -> bool {
        self.floored
    }

    /// Natural log of the determinant, `2 * sum(ln L_ii)`.
    pub fn log_det(&self) -> f64 {
        (0..self.n)
            .map(|i| self.l[i * self.n + i].ln())
            .sum::<f64>()
            * 2.0
    }

    /// Solves `L z = b` by forward substitution.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut z = Vec::with_capacity(n);
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s = b[i] - dot(row, &z);
            z.push(s / self.l[i * n + i]);
        }
        z
    }
}

/// Returns `false` if a pivot fell below `floor` and `clamp` is off. With
/// `clamp` on, such pivots are replaced by `floor` and factoring continues.
fn factor_in_place(a: &mut [f64], n: usize, floor: f64, clamp: bool) -> bool {
    let mut kb = 0;
    while kb < n {
        let ke = (kb + BLOCK).min(n);
        if kb > 0 {
            update_panel(a, n, kb, ke);
        }
        for j in kb..ke {
            let (row_j, below) = a[j * n..].split_at_mut(n);
            let mut d = row_j[j] - dot(&row_j[kb..j], &row_j[kb..j]);
            if !(d >= floor) {
                if !clamp {
                    return false;
                }
                d = floor;
            }
            let pivot = d.sqrt();
            row_j[j] = pivot;
            let rj = &row_j[kb..j];
            for ri in below.chunks_exact_mut(n) {
                ri[j] = (ri[j] - dot(&ri[kb..j], rj)) / pivot;
            }
        }
        kb = ke;
    }
    true
}

/// Subtracts the contribution of factored columns `0..kb` from columns
/// `kb..ke` of every row `i >= kb`.
fn update_panel(a: &mut [f64], n: usize, kb: usize, ke: usize) {
    // Snapshot the block rows' factored prefixes so the target rows can be
    // mutated freely.
    let width = ke - kb;
    let mut block = vec![0.0; width * kb];
    for (t, j) in (kb..ke).enumerate() {
        block[t * kb..(t + 1) * kb].copy_from_slice(&a[j * n..j * n + kb]);
    }
    for i in kb..n {
        let row = &mut a[i * n..(i + 1) * n];
        let (prefix, rest) = row.split_at_mut(kb);
        let prefix: &[f64] = prefix;
        let last = (i + 1).min(ke) - kb;
        let mut t = 0;
        while t + 4 <= last {
            let s = dot4(
                prefix,
                &block[t * kb..(t + 1) * kb],
                &block[(t + 1) * kb..(t + 2) * kb],
                &block[(t + 2) * kb..(t + 3) * kb],
                &block[(t + 3) * kb..(t + 4) * kb],
            );
            rest[t] -= s[0];
            rest[t + 1] -= s[1];
            rest[t + 2] -= s[2];
            rest[t + 3] -= s[3];
            t += 4;
        }
        while t < last {
            rest[t] -= dot(prefix, &block[t * kb..(t + 1) * kb]);
            t += 1;
        }
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

/// Four dot products sharing the left operand.
#[inline]
fn dot4(a: &[f64], b0: &[f64], b1: &[f64], b2: &[f64], b3: &[f64]) -> [f64; 4] {
    let k = a.len();
    let mut acc = [[0.0f64; 4]; 4];
    let full = k - k % 4;
    let mut p = 0;
    while p < full {
        let x = &a[p..p + 4];
        for (acc, b) in acc.iter_mut().zip([b0, b1, b2, b3]) {
            let y = &b[p..p + 4];
            acc[0] += x[0] * y[0];
            acc[1] += x[1] * y[1];
            acc[2] += x[2] * y[2];
            acc[3] += x[3] * y[3];
        }
        p += 4;
    }
    let mut out = [0.0; 4];
    for (o, (acc, b)) in out.iter_mut().zip(acc.iter().zip([b0, b1, b2, b3])) {
        let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
        for q in full..k {
            s += a[q] * b[q];
        }
        *o = s;
    }
    out
}
