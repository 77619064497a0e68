//! Dense linear algebra over GF(2) with bit-packed rows.

const WORD: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(WORD);
        Self {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Panics if rows have unequal lengths.
    pub fn from_rows(rows: &[Vec<bool>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged GF(2) matrix");
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.data[i * self.words + j / WORD] >> (j % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let w = &mut self.data[i * self.words + j / WORD];
        let mask = 1u64 << (j % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row(&self, i: usize) -> Vec<bool> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    /// Product `A x` over GF(2).
    pub fn mul_vec(&self, x: &[bool]) -> Vec<bool> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).filter(|&j| x[j] && self.get(i, j)).count() % 2 == 1)
            .collect()
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let (s, d) = (src * self.words, dst * self.words);
        for k in 0..self.words {
            let v = self.data[s + k];
            self.data[d + k] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.words {
            self.data.swap(a * self.words + k, b * self.words + k);
        }
    }
}

/// Solves `A x = b` over GF(2) by Gauss-Jordan elimination. Returns `None`
/// when `A` is singular (or not square).
pub fn gf2_solve(a: &Gf2Matrix, b: &[bool]) -> Option<Vec<bool>> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return None;
    }
    // augmented [A | b]
    let mut m = Gf2Matrix::zeros(n, n + 1);
    for i in 0..n {
        for j in 0..n {
            if a.get(i, j) {
                m.set(i, j, true);
            }
        }
        m.set(i, n, b[i]);
    }
    for col in 0..n {
        let pivot = (col..n).find(|&r| m.get(r, col))?;
        m.swap_rows(pivot, col);
        for r in 0..n {
            if r != col && m.get(r, col) {
                m.xor_row_into(col, r);
            }
        }
    }
    Some((0..n).map(|i| m.get(i, n)).collect())
}

pub fn gf2_is_invertible(a: &Gf2Matrix) -> bool {
    a.rows() == a.cols() && gf2_solve(a, &vec![false; a.rows()]).is_some()
}
