use std::io::Write;

use super::Linkage;
use crate::error::{Error, Result};

/// One agglomeration step. Leaves are nodes `0..n`; the cluster created by
/// merge `s` (0-based) is node `n + s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

/// Full merge history of an agglomeration over `n` items.
#[derive(Clone, Debug, PartialEq)]
pub struct Dendrogram {
    n: usize,
    linkage: Linkage,
    merges: Vec<Merge>,
}

impl Dendrogram {
    /// Validates a merge list: `n - 1` merges, each node used at most once as
    /// a child, children created before use, sizes consistent.
    pub fn from_merges(n: usize, linkage: Linkage, merges: Vec<Merge>) -> Result<Self> {
        if n < 2 || merges.len() != n - 1 {
            return Err(Error::InvalidInput(format!(
                "a dendrogram over {n} items needs {} merges, got {}",
                n.saturating_sub(1),
                merges.len()
            )));
        }
        let mut sizes = vec![1usize; n];
        let mut used = vec![false; 2 * n - 1];
        for (s, m) in merges.iter().enumerate() {
            let node = n + s;
            for child in [m.left, m.right] {
                if child >= node || used[child] {
                    return Err(Error::InvalidInput(format!(
                        "merge {s} refers to unavailable node {child}"
                    )));
                }
                used[child] = true;
            }
            if m.size != sizes[m.left] + sizes[m.right] {
                return Err(Error::InvalidInput(format!(
                    "merge {s} has inconsistent size {}",
                    m.size
                )));
            }
            sizes.push(m.size);
        }
        Ok(Dendrogram { n, linkage, merges })
    }

    pub(crate) fn new_unchecked(n: usize, linkage: Linkage, merges: Vec<Merge>) -> Self {
        debug_assert_eq!(merges.len() + 1, n);
        Dendrogram { n, linkage, merges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn linkage(&self) -> Linkage {
        self.linkage
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn heights(&self) -> impl Iterator<Item = f64> + '_ {
        self.merges.iter().map(|m| m.height)
    }

    /// Number of merges whose height is below the previous merge's height.
    pub fn inversions(&self) -> usize {
        self.merges.windows(2).filter(|w| w[1].height < w[0].height).count()
    }

    /// For every merge, the smallest item index on each side.
    pub fn merge_leaders(&self) -> Vec<(usize, usize)> {
        let mut leader: Vec<usize> = (0..self.n).collect();
        self.merges
            .iter()
            .map(|m| {
                let pair = (leader[m.left], leader[m.right]);
                leader.push(pair.0.min(pair.1));
                pair
            })
            .collect()
    }

    /// Partition after the first `n - k` merges.
    pub fn cut(&self, k: usize) -> Result<Clustering> {
        if k < 1 || k > self.n {
            return Err(Error::KOutOfRange { k, n: self.n });
        }
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(a, b) in self.merge_leaders().iter().take(self.n - k) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra.max(rb)] = ra.min(rb);
        }
        let roots: Vec<usize> = (0..self.n).map(|i| find(&mut parent, i)).collect();
        Ok(Clustering::from_keys(&roots))
    }

    /// Writes `step,left,right,height,size` rows; `step` counts from 1.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "left", "right", "height", "size"])?;
        for (s, m) in self.merges.iter().enumerate() {
            w.write_record([
                (s + 1).to_string(),
                m.left.to_string(),
                m.right.to_string(),
                m.height.to_string(),
                m.size.to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Partition of `n` items into `k` clusters with ids `0..k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clustering {
    k: usize,
    assignment: Vec<usize>,
}

impl Clustering {
    /// Accepts any assignment whose ids are exactly `0..k` for some `k`.
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        let k = assignment.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; k];
        for &c in &assignment {
            seen[c] = true;
        }
        if k == 0 || seen.iter().any(|s| !s) {
            return Err(Error::InvalidInput("cluster ids must be exactly 0..k".into()));
        }
        Ok(Clustering { k, assignment })
    }

    /// Relabels arbitrary keys to dense ids in order of first appearance.
    pub fn from_keys<T: PartialEq + Clone>(keys: &[T]) -> Self {
        let mut distinct: Vec<T> = Vec::new();
        let assignment = keys
            .iter()
            .map(|key| match distinct.iter().position(|d| d == key) {
                Some(p) => p,
                None => {
                    distinct.push(key.clone());
                    distinct.len() - 1
                }
            })
            .collect();
        Clustering {
            k: distinct.len(),
            assignment,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Members of each cluster in ascending item order, indexed by cluster id.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &c) in self.assignment.iter().enumerate() {
            out[c].push(i);
        }
        out
    }
}
