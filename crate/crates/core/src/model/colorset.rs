//! Subsets of colors `1..=n` as dynamic bitmasks.

/// A set of path colors. Color `c` is stored at bit `c - 1`; the word vector
/// grows on demand, so sets over a few hundred colors stay cheap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ColorSet {
    words: Vec<u64>,
}

impl ColorSet {
    pub fn new() -> Self {
        ColorSet { words: Vec::new() }
    }

    pub fn from_colors(colors: &[u32]) -> Self {
        let mut s = ColorSet::new();
        for &c in colors {
            s.insert(c);
        }
        s
    }

    pub fn insert(&mut self, color: u32) {
        assert!(color >= 1, "colors are 1-based");
        let bit = (color - 1) as usize;
        let w = bit / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << (bit % 64);
    }

    pub fn remove(&mut self, color: u32) {
        let bit = (color - 1) as usize;
        let w = bit / 64;
        if w < self.words.len() {
            self.words[w] &= !(1 << (bit % 64));
        }
    }

    pub fn contains(&self, color: u32) -> bool {
        let bit = (color - 1) as usize;
        let w = bit / 64;
        w < self.words.len() && self.words[w] >> (bit % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_disjoint(&self, other: &ColorSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    pub fn union(&self, other: &ColorSet) -> ColorSet {
        let n = self.words.len().max(other.words.len());
        let mut words = vec![0u64; n];
        for (i, w) in words.iter_mut().enumerate() {
            *w = self.words.get(i).copied().unwrap_or(0) | other.words.get(i).copied().unwrap_or(0);
        }
        ColorSet { words }
    }

    pub fn eq_as_sets(&self, other: &ColorSet) -> bool {
        let n = self.words.len().max(other.words.len());
        (0..n).all(|i| {
            self.words.get(i).copied().unwrap_or(0) == other.words.get(i).copied().unwrap_or(0)
        })
    }

    /// Number of members strictly greater than `color`.
    pub fn count_greater(&self, color: u32) -> u32 {
        count_above(&self.words, color)
    }

    /// Number of members strictly less than `color`.
    pub fn count_less(&self, color: u32) -> u32 {
        count_below(&self.words, color)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros();
                    bits &= bits - 1;
                    Some(wi as u32 * 64 + b + 1)
                }
            })
        })
    }
}

impl FromIterator<u32> for ColorSet {
    fn from_iter<T: IntoIterator<Item = u32>>(iter: T) -> Self {
        let mut s = ColorSet::new();
        for c in iter {
            s.insert(c);
        }
        s
    }
}

// Flat word-slice helpers shared with the sampler's occupancy grid. Color `c`
// lives at bit `c - 1`, so "greater than c" is exactly "bit index >= c".

#[inline]
pub(crate) fn count_above(words: &[u64], color: u32) -> u32 {
    let bit = color as usize;
    let w = bit / 64;
    if w >= words.len() {
        return 0;
    }
    let mut cnt = (words[w] >> (bit % 64)).count_ones();
    for &word in &words[w + 1..] {
        cnt += word.count_ones();
    }
    cnt
}

#[inline]
pub(crate) fn count_below(words: &[u64], color: u32) -> u32 {
    let bit = (color - 1) as usize;
    let w = bit / 64;
    let mut cnt = 0;
    for &word in words.iter().take(w.min(words.len())) {
        cnt += word.count_ones();
    }
    if w < words.len() {
        let off = bit % 64;
        if off > 0 {
            cnt += (words[w] & ((1u64 << off) - 1)).count_ones();
        }
    }
    cnt
}

/// Bits above `color` in the union of two equally sized slices.
#[inline]
pub(crate) fn count_above_pair(a: &[u64], b: &[u64], color: u32) -> u32 {
    let bit = color as usize;
    let w = bit / 64;
    if w >= a.len() {
        return 0;
    }
    let mut cnt = ((a[w] | b[w]) >> (bit % 64)).count_ones();
    for i in w + 1..a.len() {
        cnt += (a[i] | b[i]).count_ones();
    }
    cnt
}

#[inline]
pub(crate) fn set_bit(words: &mut [u64], color: u32) {
    let bit = (color - 1) as usize;
    words[bit / 64] |= 1 << (bit % 64);
}

#[inline]
pub(crate) fn clear_bit(words: &mut [u64], color: u32) {
    let bit = (color - 1) as usize;
    words[bit / 64] &= !(1 << (bit % 64));
}

#[inline]
pub(crate) fn popcount(words: &[u64]) -> u32 {
    words.iter().map(|w| w.count_ones()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_iter_ranks() {
        let s = ColorSet::from_colors(&[3, 1, 70, 200]);
        assert_eq!(s.len(), 4);
        assert!(s.contains(70));
        assert!(!s.contains(2));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 3, 70, 200]);
        assert_eq!(s.count_greater(3), 2);
        assert_eq!(s.count_greater(200), 0);
        assert_eq!(s.count_less(3), 1);
        assert_eq!(s.count_less(1), 0);
        assert_eq!(s.count_greater(2), 3);
    }

    #[test]
    fn disjoint_union() {
        let a = ColorSet::from_colors(&[1, 5]);
        let b = ColorSet::from_colors(&[2, 65]);
        assert!(a.is_disjoint(&b));
        let u = a.union(&b);
        assert_eq!(u.len(), 4);
        assert!(u.contains(65));
    }
}
