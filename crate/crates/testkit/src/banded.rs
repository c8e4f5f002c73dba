//! Small banded linear solver (LU without pivoting) for the diagonally
//! dominant systems the LCP oracles assemble.

/// Banded matrix with half-bandwidth `kb`: entry `(i, j)` lives at
/// `band[i][j - i + kb]` for `|i - j| <= kb`.
pub struct Banded {
    n: usize,
    kb: usize,
    band: Vec<f64>,
}

impl Banded {
    pub fn zeros(n: usize, kb: usize) -> Self {
        Banded {
            n,
            kb,
            band: vec![0.0; n * (2 * kb + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kb >= i && j <= i + self.kb);
        i * (2 * self.kb + 1) + (j + self.kb - i)
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.band[k] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.band[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kb < i || j > i + self.kb {
            0.0
        } else {
            self.band[self.idx(i, j)]
        }
    }

    /// Solves `A x = rhs` in place by banded Gaussian elimination.
    /// Panics on a tiny pivot; callers assemble M-matrices where that
    /// cannot happen.
    pub fn solve(mut self, mut rhs: Vec<f64>) -> Vec<f64> {
        let (n, kb) = (self.n, self.kb);
        for k in 0..n {
            let piv = self.get(k, k);
            assert!(piv.abs() > 1e-12, "near-singular banded system at row {k}");
            let i_end = (k + kb).min(n - 1);
            for i in k + 1..=i_end {
                let factor = self.get(i, k) / piv;
                if factor == 0.0 {
                    continue;
                }
                let j_end = (k + kb).min(n - 1);
                for j in k..=j_end {
                    let v = self.get(i, j) - factor * self.get(k, j);
                    self.set(i, j, v);
                }
                rhs[i] -= factor * rhs[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut v = rhs[i];
            let j_end = (i + kb).min(n - 1);
            for j in i + 1..=j_end {
                v -= self.get(i, j) * x[j];
            }
            x[i] = v / self.get(i, i);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solve() {
        // -u'' = 1 on a 4-point grid, u(0) = u(5) = 0 analog.
        let n = 4;
        let mut a = Banded::zeros(n, 1);
        for i in 0..n {
            a.set(i, i, 2.0);
            if i > 0 {
                a.set(i, i - 1, -1.0);
            }
            if i + 1 < n {
                a.set(i, i + 1, -1.0);
            }
        }
        let x = a.solve(vec![1.0, 1.0, 1.0, 1.0]);
        // Exact solution of the discrete Poisson problem.
        let expect = [2.0, 3.0, 3.0, 2.0];
        for (got, want) in x.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12);
        }
    }
}
