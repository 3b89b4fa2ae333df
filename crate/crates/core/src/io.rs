//! Text formats for point instances and spanning-tree results.
//!
//! Input: one point per line, coordinates separated by commas and/or
//! whitespace. Blank lines and lines starting with `#` are skipped.
//! Output: `u\tv\tw` per tree edge in original input indices, sorted by
//! `(w, u, v)`, then `total\tW`. Numbers use the shortest decimal that
//! parses back to the same `f64`.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::mst::MstResult;

/// Distinct points of an input plus the bookkeeping to map results back to
/// input line order.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub points: PointSet,
    /// Original index of each distinct point (its first occurrence).
    pub originals: Vec<usize>,
    /// Original index of every repeated point mapped to the original index
    /// of its first occurrence.
    pub duplicate_map: BTreeMap<usize, usize>,
}

impl Instance {
    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    /// Number of input points, duplicates included.
    pub fn original_len(&self) -> usize {
        self.originals.len() + self.duplicate_map.len()
    }

    pub fn from_rows<R: AsRef<[f64]>>(dim: usize, rows: &[R]) -> Result<Self> {
        let mut builder = Builder::new(dim);
        for row in rows {
            builder.push(row.as_ref())?;
        }
        Ok(builder.finish())
    }
}

struct Builder {
    points: PointSet,
    originals: Vec<usize>,
    duplicate_map: BTreeMap<usize, usize>,
    seen: HashMap<Vec<u64>, usize>,
    next: usize,
}

impl Builder {
    fn new(dim: usize) -> Self {
        Builder {
            points: PointSet::new(dim),
            originals: Vec::new(),
            duplicate_map: BTreeMap::new(),
            seen: HashMap::new(),
            next: 0,
        }
    }

    fn push(&mut self, row: &[f64]) -> Result<()> {
        let distinct = self.points.push(row)?;
        let key: Vec<u64> = self.points.point(distinct).iter().map(|c| c.to_bits()).collect();
        let original = self.next;
        self.next += 1;
        match self.seen.get(&key) {
            Some(&first) => {
                self.points.truncate(distinct);
                self.duplicate_map.insert(original, first);
            }
            None => {
                self.seen.insert(key, original);
                self.originals.push(original);
            }
        }
        Ok(())
    }

    fn finish(self) -> Instance {
        Instance {
            points: self.points,
            originals: self.originals,
            duplicate_map: self.duplicate_map,
        }
    }
}

/// Parses an instance. Without `dim` the dimension is taken from the first
/// data line; an input without data lines then has dimension 0.
pub fn read_points(source: impl BufRead, dim: Option<usize>) -> Result<Instance> {
    let mut builder: Option<Builder> = dim.map(Builder::new);
    let mut row = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        row.clear();
        for token in text.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let value: f64 = token.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("`{token}` is not a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("`{token}` is not a finite number"),
                });
            }
            row.push(value);
        }
        let b = builder.get_or_insert_with(|| Builder::new(row.len()));
        if row.len() != b.points.dim() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {} coordinates, found {}", b.points.dim(), row.len()),
            });
        }
        b.push(&row)?;
    }
    Ok(builder.unwrap_or_else(|| Builder::new(0)).finish())
}

/// Writes the spanning tree of `inst` (computed over its distinct points)
/// in original indices, with every duplicate attached to its first
/// occurrence by a zero-weight edge.
pub fn write_result(r: &MstResult, inst: &Instance, mut sink: impl Write) -> Result<()> {
    let mut lines: Vec<(f64, usize, usize)> = r
        .edges
        .iter()
        .map(|e| {
            let (a, b) = (inst.originals[e.u], inst.originals[e.v]);
            (e.weight, a.min(b), a.max(b))
        })
        .collect();
    lines.extend(inst.duplicate_map.iter().map(|(&dup, &first)| (0.0, first.min(dup), first.max(dup))));
    lines.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for (w, u, v) in lines {
        writeln!(sink, "{u}\t{v}\t{w}")?;
    }
    writeln!(sink, "total\t{}", r.total_weight)?;
    sink.flush()?;
    Ok(())
}

/// Writes points one per line, space separated, in a form `read_points`
/// reproduces exactly.
pub fn write_points<'a>(points: impl IntoIterator<Item = &'a [f64]>, mut sink: impl Write) -> Result<()> {
    for p in points {
        let mut first = true;
        for c in p {
            if !first {
                sink.write_all(b" ")?;
            }
            write!(sink, "{c}")?;
            first = false;
        }
        sink.write_all(b"\n")?;
    }
    sink.flush()?;
    Ok(())
}

/// `n` points with independent uniform integer coordinates in
/// `[-range, range]`. Repeats are possible.
pub fn random_integer_points(rng: &mut impl Rng, n: usize, dim: usize, range: i64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.gen_range(-range..=range) as f64).collect())
        .collect()
}
