//! Fractional cascading: one binary search, then a constant number of steps
//! per list.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
struct Level<T> {
    keys: Vec<T>,
    /// Number of elements of the original list that are `<= keys[j]`.
    own: Vec<usize>,
    /// Number of elements of the next level that are `<= keys[j]`.
    down: Vec<usize>,
}

/// Predecessor search in several sorted lists at once. Each level holds its
/// own list merged with every second key of the level below it.
#[derive(Debug, Clone)]
pub struct Cascade<T> {
    levels: Vec<Level<T>>,
}

impl<T: Ord + Copy> Cascade<T> {
    pub fn build(lists: &[Vec<T>]) -> Result<Cascade<T>> {
        if let Some(i) = lists.iter().position(|l| l.windows(2).any(|w| w[0] > w[1])) {
            return Err(Error::UnsortedInput(i));
        }
        let mut levels: Vec<Level<T>> = Vec::with_capacity(lists.len());
        for list in lists.iter().rev() {
            let promoted: Vec<T> = levels.last().map(|l: &Level<T>| l.keys.iter().skip(1).step_by(2).copied().collect()).unwrap_or_default();
            let mut keys = Vec::with_capacity(list.len() + promoted.len());
            let (mut i, mut j) = (0, 0);
            while i < list.len() || j < promoted.len() {
                if j >= promoted.len() || (i < list.len() && list[i] <= promoted[j]) {
                    keys.push(list[i]);
                    i += 1;
                } else {
                    keys.push(promoted[j]);
                    j += 1;
                }
            }
            let own = count_le(&keys, list);
            let down = levels.last().map(|l| count_le(&keys, &l.keys)).unwrap_or_else(|| vec![0; keys.len()]);
            levels.push(Level { keys, own, down });
        }
        levels.reverse();
        Ok(Cascade { levels })
    }

    pub fn lists(&self) -> usize {
        self.levels.len()
    }

    /// For every list, the index of its last key `<= key`, or `None`.
    pub fn query(&self, key: T, probes: &mut u64) -> Vec<Option<usize>> {
        let mut out = Vec::with_capacity(self.levels.len());
        let Some(first) = self.levels.first() else {
            return out;
        };
        // `pos` counts the keys of the current level that are <= key
        let (mut lo, mut hi) = (0, first.keys.len());
        while lo < hi {
            *probes += 1;
            let mid = (lo + hi) / 2;
            if first.keys[mid] <= key {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let mut pos = lo;
        for (i, level) in self.levels.iter().enumerate() {
            if i > 0 {
                let prev = &self.levels[i - 1];
                pos = if pos == 0 { 0 } else { prev.down[pos - 1] };
                while pos < level.keys.len() && level.keys[pos] <= key {
                    *probes += 1;
                    pos += 1;
                }
            }
            *probes += 1;
            out.push(if pos == 0 { None } else { level.own[pos - 1].checked_sub(1) });
        }
        out
    }
}

/// For each key of `merged`, how many elements of sorted `part` are `<=` it.
fn count_le<T: Ord>(merged: &[T], part: &[T]) -> Vec<usize> {
    let mut j = 0;
    merged
        .iter()
        .map(|k| {
            while j < part.len() && part[j] <= *k {
                j += 1;
            }
            j
        })
        .collect()
}
