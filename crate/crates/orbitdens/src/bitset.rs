//! Dense bit set over `1..=horizon`, with the prefix-count scan used by all
//! empirical density computations.

/// Fixed-capacity bit set indexed by 1..=horizon.
#[derive(Clone, PartialEq, Eq)]
pub struct BitSet {
    words: Vec<u64>,
    horizon: u64,
}

impl std::fmt::Debug for BitSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitSet(horizon={}, count={})", self.horizon, self.count())
    }
}

impl BitSet {
    pub fn new(horizon: u64) -> Self {
        let words = vec![0u64; (horizon as usize / 64) + 1];
        Self { words, horizon }
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn insert(&mut self, n: u64) {
        debug_assert!(n >= 1 && n <= self.horizon);
        self.words[(n / 64) as usize] |= 1 << (n % 64);
    }

    /// Sets every index in `lo..=hi` (clamped to the domain).
    pub fn insert_range(&mut self, lo: u64, hi: u64) {
        let lo = lo.max(1);
        let hi = hi.min(self.horizon);
        if lo > hi {
            return;
        }
        let (wl, wh) = ((lo / 64) as usize, (hi / 64) as usize);
        if wl == wh {
            let mask = (u64::MAX << (lo % 64)) & (u64::MAX >> (63 - hi % 64));
            self.words[wl] |= mask;
        } else {
            self.words[wl] |= u64::MAX << (lo % 64);
            for w in &mut self.words[wl + 1..wh] {
                *w = u64::MAX;
            }
            self.words[wh] |= u64::MAX >> (63 - hi % 64);
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= 1 && n <= self.horizon && (self.words[(n / 64) as usize] >> (n % 64)) & 1 == 1
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (1..=self.horizon).filter(move |&n| self.contains(n))
    }

    /// Runs `f(n, count_up_to_n)` for every n in 1..=horizon with the running
    /// cardinality of the set restricted to [1, n].
    pub fn scan_prefix<F: FnMut(u64, u64)>(&self, mut f: F) {
        let mut count = 0u64;
        for n in 1..=self.horizon {
            if self.contains(n) {
                count += 1;
            }
            f(n, count);
        }
    }

    /// Cardinality of the set restricted to [1, n].
    pub fn count_prefix(&self, n: u64) -> u64 {
        let n = n.min(self.horizon);
        let full_words = (n / 64) as usize;
        let mut count: u64 = self.words[..full_words]
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum();
        let mask = if n % 64 == 63 {
            u64::MAX
        } else {
            (1u64 << (n % 64 + 1)) - 1
        };
        count += (self.words[full_words] & mask).count_ones() as u64;
        // Index 0 is outside the domain; it is never set, so no correction.
        count
    }

    /// Restriction of `other` to `lo+1..=hi`, merged into self.
    pub fn union_segment(&mut self, other: &BitSet, lo: u64, hi: u64) {
        debug_assert_eq!(self.horizon, other.horizon);
        for n in lo + 1..=hi.min(self.horizon) {
            if other.contains(n) {
                self.insert(n);
            }
        }
    }

    /// Run-length encoding as `[start, len]` pairs, for compact JSON reports.
    pub fn to_runs(&self) -> Vec<(u64, u64)> {
        let mut runs = Vec::new();
        let mut cur: Option<(u64, u64)> = None;
        for n in 1..=self.horizon {
            if self.contains(n) {
                match &mut cur {
                    Some((start, len)) if *start + *len == n => *len += 1,
                    _ => {
                        if let Some(r) = cur.take() {
                            runs.push(r);
                        }
                        cur = Some((n, 1));
                    }
                }
            }
        }
        if let Some(r) = cur {
            runs.push(r);
        }
        runs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_prefix_counts() {
        let mut s = BitSet::new(200);
        s.insert_range(10, 20);
        s.insert_range(64, 130);
        s.insert(1);
        assert_eq!(s.count(), 11 + 67 + 1);
        assert!(s.contains(64) && s.contains(130) && !s.contains(131));
        assert_eq!(s.count_prefix(9), 1);
        assert_eq!(s.count_prefix(20), 12);
        assert_eq!(s.count_prefix(1000), s.count());
        // scan agrees with count_prefix
        s.scan_prefix(|n, c| assert_eq!(c, s.count_prefix(n)));
    }

    #[test]
    fn runs_roundtrip() {
        let mut s = BitSet::new(100);
        s.insert_range(3, 5);
        s.insert(9);
        s.insert_range(63, 66);
        assert_eq!(s.to_runs(), vec![(3, 3), (9, 1), (63, 4)]);
    }
}
