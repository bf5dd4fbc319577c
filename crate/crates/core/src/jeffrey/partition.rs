//! Set partitions of `{0, ..., n-1}` and their enumeration in
//! restricted-growth-string order.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A set partition in canonical form: indices ascending inside each block,
/// blocks ordered by their smallest element.
///
/// Stored zero-based. The JSON form `{"blocks": [[1], [2, 3]]}` and the
/// `Display` output are one-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    size: usize,
}

impl Partition {
    /// Validates zero-based blocks covering `{0, ..., n-1}` exactly once.
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let size: usize = blocks.iter().map(Vec::len).sum();
        if size == 0 {
            return Err(Error::InvalidPartition("no elements".into()));
        }
        let mut seen = vec![false; size];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            block.sort_unstable();
            for &i in block.iter() {
                if i >= size {
                    return Err(Error::InvalidPartition(format!("index {} outside 1..={size}", i + 1)));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidPartition(format!("index {} repeated", i + 1)));
                }
            }
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Self { blocks, size })
    }

    /// Same as [`Partition::new`] with one-based indices.
    pub fn from_one_based(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let shifted = blocks
            .into_iter()
            .map(|b| {
                b.into_iter()
                    .map(|i| {
                        i.checked_sub(1).ok_or_else(|| Error::InvalidPartition("index 0 in one-based partition".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(shifted)
    }

    /// Partition whose blocks are the level sets of `labels`.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut slot = std::collections::HashMap::new();
        for (i, &label) in labels.iter().enumerate() {
            let k = *slot.entry(label).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[k].push(i);
        }
        Self { blocks, size: labels.len() }
    }

    /// All singletons.
    pub fn trivial(n: usize) -> Self {
        Self { blocks: (0..n).map(|i| vec![i]).collect(), size: n }
    }

    pub fn single_block(n: usize) -> Self {
        Self { blocks: vec![(0..n).collect()], size: n }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Size of the underlying set.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Some block has at least two elements.
    pub fn is_nontrivial(&self) -> bool {
        self.blocks.iter().any(|b| b.len() >= 2)
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.size != coarser.size {
            return false;
        }
        let mut owner = vec![0usize; coarser.size];
        for (k, block) in coarser.blocks.iter().enumerate() {
            for &i in block {
                owner[i] = k;
            }
        }
        self.blocks.iter().all(|b| b.iter().all(|&i| owner[i] == owner[b[0]]))
    }

    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.iter().map(|i| i + 1).collect()).collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, block) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, i) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", i + 1)?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct PartitionDoc {
    blocks: Vec<Vec<usize>>,
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PartitionDoc { blocks: self.to_one_based() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = PartitionDoc::deserialize(d)?;
        Partition::from_one_based(doc.blocks).map_err(serde::de::Error::custom)
    }
}

/// Iterator over every partition of `{0, ..., n-1}`, in lexicographic order
/// of restricted growth strings (`a_0 = 0`, `a_i <= 1 + max(a_0..a_{i-1})`).
///
/// The first partition yielded is the single block, the last the trivial one.
pub struct SetPartitions {
    rgs: Vec<usize>,
    // prefix_max[i] = max(rgs[0..=i])
    prefix_max: Vec<usize>,
    done: bool,
}

impl SetPartitions {
    pub fn new(n: usize) -> Self {
        Self { rgs: vec![0; n], prefix_max: vec![0; n], done: n == 0 }
    }

    fn advance(&mut self) {
        let n = self.rgs.len();
        for i in (1..n).rev() {
            if self.rgs[i] <= self.prefix_max[i - 1] {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for SetPartitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let out = Partition::from_labels(&self.rgs);
        self.advance();
        Some(out)
    }
}

/// Bell number `B_n`, the number of partitions of an `n`-set.
pub fn bell(n: usize) -> u64 {
    // Bell triangle.
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        row = next;
    }
    row[0]
}
