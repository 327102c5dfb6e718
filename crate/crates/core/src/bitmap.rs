// Copyright 2026 The Basketry Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Fixed-length bitsets backing the vertical index.

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Bitmap {
    words: Vec<u64>,
}

impl Bitmap {
    pub fn new(len: usize) -> Self {
        Bitmap {
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn set(&mut self, bit: usize) {
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    #[cfg(test)]
    pub fn get(&self, bit: usize) -> bool {
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn and_count(&self, other: &Bitmap) -> u64 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as u64)
            .sum()
    }

    pub fn and_assign(&mut self, other: &Bitmap) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_count() {
        let mut a = Bitmap::new(130);
        for bit in [0, 63, 64, 129] {
            a.set(bit);
        }
        assert!(a.get(63) && a.get(64) && !a.get(65));
        assert_eq!(a.count_ones(), 4);

        let mut b = Bitmap::new(130);
        b.set(64);
        b.set(100);
        assert_eq!(a.and_count(&b), 1);
        a.and_assign(&b);
        assert_eq!(a.count_ones(), 1);
        assert!(a.get(64));
    }

    #[test]
    fn empty_bitmap() {
        let a = Bitmap::new(0);
        assert_eq!(a.count_ones(), 0);
        assert_eq!(a.and_count(&a), 0);
    }
}
