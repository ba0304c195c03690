/// Banded matrix with lower bandwidth `kl` and upper bandwidth `ku`, stored by
/// rows with `kl` extra upper diagonals for fill-in from row pivoting.
pub(crate) struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![0.0; n * width] }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kl + self.ku, "({i}, {j}) outside the band");
        i * self.width + (j + self.kl - i)
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    /// Row-pivoted LU in place. Returns `None` for a singular matrix.
    pub fn factor(mut self) -> Option<BandedLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let p = (k..=last_row).max_by(|&a, &b| self.get(a, k).abs().total_cmp(&self.get(b, k).abs())).unwrap();
            if self.get(p, k) == 0.0 {
                return None;
            }
            pivots[k] = p;
            if p != k {
                for c in k..=last_col {
                    let (x, y) = (self.get(k, c), self.get(p, c));
                    self.set(k, c, y);
                    self.set(p, c, x);
                }
            }
            let pivot = self.get(k, k);
            for r in k + 1..=last_row {
                let l = self.get(r, k) / pivot;
                self.set(r, k, l);
                if l != 0.0 {
                    for c in k + 1..=last_col {
                        let v = self.get(r, c) - l * self.get(k, c);
                        self.set(r, c, v);
                    }
                }
            }
        }
        Some(BandedLu { m: self, pivots })
    }
}

pub(crate) struct BandedLu {
    m: BandedMatrix,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn solve(&self, b: &mut [f64]) {
        let (n, kl, ku) = (self.m.n, self.m.kl, self.m.ku);
        for k in 0..n {
            b.swap(k, self.pivots[k]);
            for r in k + 1..=(k + kl).min(n - 1) {
                b[r] -= self.m.get(r, k) * b[k];
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for c in k + 1..=(k + kl + ku).min(n - 1) {
                s -= self.m.get(k, c) * b[c];
            }
            b[k] = s / self.m.get(k, k);
        }
    }
}
