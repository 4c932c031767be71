// SPDX-License-Identifier: MIT
//! Lexicographic enumeration of fixed-size subsets.

use alloc::vec::Vec;

/// All `k`-element subsets of `items`, in lexicographic order of positions.
#[derive(Debug, Clone)]
pub struct Combinations<'a> {
    items: &'a [usize],
    idx: Vec<usize>,
    done: bool,
}

impl<'a> Combinations<'a> {
    pub fn new(items: &'a [usize], k: usize) -> Self {
        Combinations { items, idx: (0..k).collect(), done: k > items.len() }
    }
}

impl Iterator for Combinations<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.iter().map(|&i| self.items[i]).collect();
        let n = self.items.len();
        let k = self.idx.len();
        // advance the rightmost index that still has room
        match (0..k).rev().find(|&i| self.idx[i] < n - k + i) {
            Some(i) => {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
            }
            None => self.done = true,
        }
        Some(out)
    }
}

/// Subsets of `items` in order of increasing size, lexicographic within a size,
/// up to `max_size` elements.
pub fn subsets_up_to(items: &[usize], max_size: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..=max_size.min(items.len())).flat_map(move |k| Combinations::new(items, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn lexicographic_order() {
        let items = [3, 5, 7, 9];
        let got: Vec<Vec<usize>> = Combinations::new(&items, 2).collect();
        assert_eq!(
            got,
            vec![vec![3, 5], vec![3, 7], vec![3, 9], vec![5, 7], vec![5, 9], vec![7, 9]]
        );
        assert_eq!(Combinations::new(&items, 0).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
        assert_eq!(Combinations::new(&items, 5).count(), 0);
        assert_eq!(Combinations::new(&[], 0).count(), 1);
    }

    #[test]
    fn all_subsets_by_size() {
        let items = [0, 1, 2];
        let got: Vec<Vec<usize>> = subsets_up_to(&items, 3).collect();
        assert_eq!(got.len(), 8);
        assert_eq!(got[0], Vec::<usize>::new());
        assert_eq!(got[7], vec![0, 1, 2]);
        assert_eq!(subsets_up_to(&items, 1).count(), 4);
    }
}
