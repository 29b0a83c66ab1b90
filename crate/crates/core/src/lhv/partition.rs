use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// A division of the parties `{1, ..., n}` into nonempty disjoint blocks.
///
/// Canonical form: members of each block ascending, blocks ordered by size
/// and then by smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Validates and canonicalizes.
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(domain("partition blocks must be nonempty"));
            }
            block.sort_unstable();
            for &k in block.iter() {
                if k == 0 || k > n {
                    return Err(domain(format!("party {k} outside 1..={n}")));
                }
                if std::mem::replace(&mut seen[k], true) {
                    return Err(domain(format!("party {k} appears in two blocks")));
                }
            }
        }
        if let Some(k) = (1..=n).find(|&k| !seen[k]) {
            return Err(domain(format!("party {k} is not covered")));
        }
        blocks.sort_by_key(|b| (b.len(), b[0]));
        Ok(Partition { n, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Block label of every party, from a restricted growth string.
    fn from_labels(labels: &[usize], m: usize) -> Self {
        let mut blocks = vec![Vec::new(); m];
        for (k, &l) in labels.iter().enumerate() {
            blocks[l].push(k + 1);
        }
        blocks.sort_by_key(|b| (b.len(), b[0]));
        Partition {
            n: labels.len(),
            blocks,
        }
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in &self.blocks {
            f.write_str("{")?;
            for (i, k) in b.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{k}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

/// Stirling number of the second kind, `S(n, m)`.
pub fn stirling2(n: usize, m: usize) -> u128 {
    let mut row = vec![0u128; m + 1];
    row[0] = 1;
    for _ in 0..n {
        for k in (1..=m).rev() {
            row[k] = k as u128 * row[k] + row[k - 1];
        }
        row[0] = 0;
    }
    row[m]
}

pub const MAX_PARTITION_PARTIES: usize = 12;

/// Every partition of `{1..n}` into exactly `m` blocks, canonical, sorted by
/// block lists.
pub fn enumerate_partitions(n: usize, m: usize) -> Result<Vec<Partition>> {
    if m < 2 || m > n {
        return Err(domain(format!(
            "block count must satisfy 2 <= m <= n={n}, got {m}"
        )));
    }
    if n > MAX_PARTITION_PARTIES {
        return Err(Error::SizeGuard {
            what: "partition enumeration",
            limit: MAX_PARTITION_PARTIES,
            requested: n,
        });
    }

    // restricted growth strings: labels[0] = 0, labels[k] <= 1 + max(labels[..k])
    let mut out = Vec::with_capacity(stirling2(n, m) as usize);
    let mut labels = vec![0usize; n];
    fn rec(k: usize, used: usize, m: usize, labels: &mut [usize], out: &mut Vec<Partition>) {
        let n = labels.len();
        if k == n {
            if used == m {
                out.push(Partition::from_labels(labels, m));
            }
            return;
        }
        // not enough parties left to open the missing blocks
        if used + (n - k) < m {
            return;
        }
        for l in 0..=used.min(m - 1) {
            labels[k] = l;
            rec(k + 1, used.max(l + 1), m, labels, out);
        }
    }
    rec(1, 1, m, &mut labels, &mut out);
    out.sort_by(|a, b| a.blocks.cmp(&b.blocks));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn three_into_two() {
        let parts = enumerate_partitions(3, 2).unwrap();
        let shown: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, ["{1}{2,3}", "{2}{1,3}", "{3}{1,2}"]);
    }

    #[test]
    fn all_singletons() {
        for n in 2..=6 {
            let parts = enumerate_partitions(n, n).unwrap();
            assert_eq!(parts.len(), 1);
            assert!(parts[0].blocks().iter().all(|b| b.len() == 1));
        }
    }

    #[test]
    fn four_into_two_brute_force() {
        // every labelling of 4 parties with 2 labels, both used, modulo swap
        let mut brute = HashSet::new();
        for mask in 1u32..15 {
            let (a, b): (Vec<usize>, Vec<usize>) = (1..=4).partition(|&k| mask >> (k - 1) & 1 == 1);
            brute.insert(Partition::new(4, vec![a, b]).unwrap());
        }
        let listed: HashSet<_> = enumerate_partitions(4, 2).unwrap().into_iter().collect();
        assert_eq!(listed.len(), 7);
        assert_eq!(listed, brute);
    }

    #[test]
    fn stirling_recurrence() {
        for n in 2..=8usize {
            for m in 2..=n {
                let parts = enumerate_partitions(n, m).unwrap();
                let rec = m as u128 * stirling2(n - 1, m) + stirling2(n - 1, m - 1);
                assert_eq!(parts.len() as u128, rec, "S({n},{m})");
                let distinct: HashSet<_> = parts.iter().collect();
                assert_eq!(distinct.len(), parts.len());
            }
        }
        assert_eq!(stirling2(6, 3), 90);
        assert_eq!(stirling2(10, 5), 42525);
    }

    #[test]
    fn canonical_order() {
        let p = Partition::new(5, vec![vec![5, 2, 1], vec![4], vec![3]]).unwrap();
        assert_eq!(p.blocks(), [vec![3], vec![4], vec![1, 2, 5]]);
        for p in enumerate_partitions(6, 3).unwrap() {
            let keys: Vec<_> = p.blocks().iter().map(|b| (b.len(), b[0])).collect();
            assert!(keys.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn invalid_partitions() {
        assert!(Partition::new(3, vec![vec![1, 2]]).is_err());
        assert!(Partition::new(3, vec![vec![1, 2], vec![2, 3]]).is_err());
        assert!(Partition::new(3, vec![vec![1, 2, 3], vec![]]).is_err());
        assert!(Partition::new(3, vec![vec![1, 4], vec![2, 3]]).is_err());
        assert!(enumerate_partitions(3, 4).is_err());
        assert!(enumerate_partitions(3, 1).is_err());
        assert!(enumerate_partitions(13, 2).is_err());
    }
}
