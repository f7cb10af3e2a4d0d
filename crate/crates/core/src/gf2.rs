//! Dense matrices over Z2 backed by packed `u64` rows.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] ^= 1 << (c % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Product `self * other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let (src, dst) = (k * other.words, r * out.words);
                    for w in 0..out.words {
                        out.data[dst + w] ^= other.data[src + w];
                    }
                }
            }
        }
        out
    }

    /// Rank by forward elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let (word, bit) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (rank..self.rows).find(|&r| m[r * self.words + word] & bit != 0) else {
                continue;
            };
            if p != rank {
                for w in 0..self.words {
                    m.swap(p * self.words + w, rank * self.words + w);
                }
            }
            for r in rank + 1..self.rows {
                if m[r * self.words + word] & bit != 0 {
                    for w in 0..self.words {
                        m[r * self.words + w] ^= m[rank * self.words + w];
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_identity_and_zero() {
        let mut m = BitMatrix::zeros(70, 70);
        for i in 0..70 {
            m.set(i, i, true);
        }
        assert_eq!(m.rank(), 70);
        assert_eq!(BitMatrix::zeros(3, 5).rank(), 0);
        assert_eq!(BitMatrix::zeros(0, 4).rank(), 0);
    }

    #[test]
    fn dependent_rows() {
        let mut m = BitMatrix::zeros(3, 3);
        for (r, c) in [(0, 0), (0, 1), (1, 1), (1, 2), (2, 0), (2, 2)] {
            m.set(r, c, true);
        }
        assert_eq!(m.rank(), 2);
        assert_eq!(m.transpose().rank(), 2);
    }

    #[test]
    fn product_squares_to_zero() {
        // d = [[0,1],[0,0]]
        let mut d = BitMatrix::zeros(2, 2);
        d.set(0, 1, true);
        assert!(d.mul(&d).is_zero());
        assert!(!d.is_zero());
    }
}
