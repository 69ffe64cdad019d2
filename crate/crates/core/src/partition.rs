//! Set partitions of the input alphabet and the refinement lattice.
//!
//! A deterministic channel output is a function of the input symbol, which
//! is the same thing as a set partition of the input alphabet. Partitions
//! are kept in canonical form: blocks are numbered by first appearance, so
//! equality is a plain label-sequence comparison.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("ground sets differ: {0} vs {1} symbols")]
    GroundSetMismatch(usize, usize),
    #[error("a partition needs at least one symbol")]
    Empty,
}

/// A set partition of `{0, .., n-1}`, stored as one block label per symbol.
///
/// Canonical form: symbol 0 has label 0 and each new label is exactly one
/// more than the current maximum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    labels: Vec<usize>,
}

impl SetPartition {
    /// Canonicalizes an arbitrary labeling (block identities are preserved,
    /// label values are renumbered by first appearance).
    pub fn from_labels(raw: &[usize]) -> Result<Self, PartitionError> {
        if raw.is_empty() {
            return Err(PartitionError::Empty);
        }
        let mut map: Vec<Option<usize>> = Vec::new();
        let mut labels = Vec::with_capacity(raw.len());
        for &r in raw {
            if r >= map.len() {
                map.resize(r + 1, None);
            }
            let next = map.iter().flatten().count();
            let lab = *map[r].get_or_insert(next);
            labels.push(lab);
        }
        Ok(SetPartition { labels })
    }

    /// The finest partition (every symbol its own block).
    pub fn identity(n: usize) -> Self {
        SetPartition { labels: (0..n).collect() }
    }

    /// The coarsest partition (a single block).
    pub fn single_block(n: usize) -> Self {
        SetPartition { labels: vec![0; n] }
    }

    pub fn ground_size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Block label of a symbol.
    pub fn apply(&self, symbol: usize) -> usize {
        self.labels[symbol]
    }

    pub fn num_blocks(&self) -> usize {
        self.labels.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Blocks as symbol lists, ordered by block label.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (sym, &lab) in self.labels.iter().enumerate() {
            out[lab].push(sym);
        }
        out
    }

    fn check_ground(&self, other: &Self) -> Result<(), PartitionError> {
        if self.labels.len() != other.labels.len() {
            return Err(PartitionError::GroundSetMismatch(self.labels.len(), other.labels.len()));
        }
        Ok(())
    }

    /// True iff every block of `self` lies inside a single block of `other`
    /// (equivalently, `other` is a function of `self`).
    pub fn refines(&self, other: &Self) -> Result<bool, PartitionError> {
        self.check_ground(other)?;
        let mut image: Vec<Option<usize>> = vec![None; self.num_blocks()];
        for (sym, &lab) in self.labels.iter().enumerate() {
            let target = other.labels[sym];
            match image[lab] {
                None => image[lab] = Some(target),
                Some(t) if t == target => {}
                Some(_) => return Ok(false),
            }
        }
        Ok(true)
    }

    /// Meet: the common refinement, whose blocks are the pairwise
    /// intersections of `self`- and `other`-blocks.
    pub fn meet(&self, other: &Self) -> Result<Self, PartitionError> {
        self.check_ground(other)?;
        let nb = other.num_blocks();
        let raw: Vec<usize> = self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(&a, &b)| a * nb + b)
            .collect();
        SetPartition::from_labels(&raw)
    }

    /// Join: the finest partition of which both arguments are refinements
    /// (the Gacs-Korner-Witsenhausen common part). Computed as connected
    /// components of the bipartite graph between `self`-blocks and
    /// `other`-blocks that share a symbol, by breadth-first traversal.
    pub fn join(&self, other: &Self) -> Result<Self, PartitionError> {
        self.check_ground(other)?;
        let n = self.labels.len();
        let na = self.num_blocks();
        let nb = other.num_blocks();
        // Bipartite incidence: node ids 0..na for self-blocks, na..na+nb
        // for other-blocks.
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); na + nb];
        for sym in 0..n {
            let a = self.labels[sym];
            let b = na + other.labels[sym];
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut comp: Vec<Option<usize>> = vec![None; na + nb];
        let mut next_comp = 0usize;
        for start in 0..na {
            if comp[start].is_some() {
                continue;
            }
            let mut queue = std::collections::VecDeque::new();
            comp[start] = Some(next_comp);
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if comp[w].is_none() {
                        comp[w] = Some(next_comp);
                        queue.push_back(w);
                    }
                }
            }
            next_comp += 1;
        }
        let raw: Vec<usize> = self.labels.iter().map(|&a| comp[a].unwrap()).collect();
        SetPartition::from_labels(&raw)
    }
}

/// Enumerates all partitions of `{0..n-1}` via restricted growth strings,
/// in lexicographic order of the canonical label sequences.
pub fn all_partitions(n: usize) -> Vec<SetPartition> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    loop {
        out.push(SetPartition { labels: labels.clone() });
        // Next restricted growth string.
        let mut i = n;
        loop {
            if i == 1 {
                return out;
            }
            i -= 1;
            let max_prefix = labels[..i].iter().copied().max().unwrap();
            if labels[i] <= max_prefix {
                labels[i] += 1;
                for l in labels[i + 1..].iter_mut() {
                    *l = 0;
                }
                break;
            }
        }
    }
}
