use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A bijection of `0..n`, acting on basis states as `|x> -> |map[x]>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
    inv: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut inv = vec![usize::MAX; n];
        for (x, &y) in map.iter().enumerate() {
            if y >= n {
                return Err(Error::BadPermutation(format!("image {y} of {x} out of range 0..{n}")));
            }
            if inv[y] != usize::MAX {
                return Err(Error::BadPermutation(format!("{y} is hit twice")));
            }
            inv[y] = x;
        }
        Ok(Self { map, inv })
    }

    pub fn identity(n: usize) -> Self {
        let map: Vec<usize> = (0..n).collect();
        Self { inv: map.clone(), map }
    }

    /// `x -> x ^ (1 << bit)` on `2^bits` states.
    pub fn bit_flip(bits: u32, bit: u32) -> Self {
        assert!(bit < bits);
        let map: Vec<usize> = (0..1usize << bits).map(|x| x ^ (1 << bit)).collect();
        Self { inv: map.clone(), map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn image(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn preimage(&self, y: usize) -> usize {
        self.inv[y]
    }

    pub fn inverse(&self) -> Self {
        Self { map: self.inv.clone(), inv: self.map.clone() }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// Dense matrix with a one at `(map[x], x)`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for x in 0..n {
            m[(self.map[x], x)] = 1.0;
        }
        m
    }
}
