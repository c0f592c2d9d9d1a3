use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidArgument(format!("not a partition: {parts:?}")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    /// From power notation: `mults[i]` copies of `i + 1`.
    pub fn from_mults(mults: &[usize]) -> Result<Self> {
        let parts = mults
            .iter()
            .enumerate()
            .rev()
            .flat_map(|(i, &m)| std::iter::repeat(i + 1).take(m))
            .collect();
        Self::new(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `m_1, ..., m_n`.
    pub fn mults(&self) -> Vec<usize> {
        let mut m = vec![0; self.n()];
        for &a in &self.parts {
            m[a - 1] += 1;
        }
        m
    }

    /// Power notation, e.g. `1^2 3^1`.
    pub fn power_notation(&self) -> String {
        self.mults()
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(i, m)| format!("{}^{}", i + 1, m))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> = self.parts.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", inner.join(","))
    }
}

/// Partitions of `n` with at most `max_len` parts, in reverse lexicographic order.
pub fn partitions_up_to_length(n: usize, max_len: usize) -> Vec<Partition> {
    fn go(rest: usize, cap: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        if slots == 0 {
            return;
        }
        for a in (1..=cap.min(rest)).rev() {
            cur.push(a);
            go(rest - a, a, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, n, max_len, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn shapes(v: &[Partition]) -> Vec<Vec<usize>> {
        v.iter().map(|p| p.parts().to_vec()).collect()
    }

    #[test]
    fn listed_examples() {
        assert_eq!(shapes(&partitions_up_to_length(3, 4)), vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
        assert_eq!(
            shapes(&partitions_up_to_length(6, 2)),
            vec![vec![6], vec![5, 1], vec![4, 2], vec![3, 3]]
        );
        assert_eq!(shapes(&partitions_up_to_length(7, 1)), vec![vec![7]]);
    }

    #[test]
    fn counts_match_partition_numbers() {
        let p = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for n in 1..=10 {
            assert_eq!(partitions_up_to_length(n, n).len(), p[n]);
        }
    }

    #[test]
    fn notation() {
        let d = Partition::new(vec![1, 3, 1]).unwrap();
        assert_eq!(d.parts(), &[3, 1, 1]);
        assert_eq!(d.mults(), vec![2, 0, 1, 0, 0]);
        assert_eq!(d.power_notation(), "1^2 3^1");
        assert_eq!(d.to_string(), "(3,1,1)");
        assert!(Partition::new(vec![]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
    }

    proptest! {
        #[test]
        fn parts_and_mults_agree(n in 1usize..12, k in 1usize..12) {
            let all = partitions_up_to_length(n, k);
            for w in all.windows(2) {
                prop_assert!(w[0] > w[1]);
            }
            for d in all {
                prop_assert!(d.len() <= k);
                let m = d.mults();
                prop_assert_eq!(m.iter().enumerate().map(|(i, c)| (i + 1) * c).sum::<usize>(), n);
                prop_assert_eq!(m.iter().sum::<usize>(), d.len());
                prop_assert_eq!(Partition::from_mults(&m).unwrap(), d);
            }
        }
    }
}
