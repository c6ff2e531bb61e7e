use std::collections::HashMap;
use std::hash::Hasher;
use std::io::{Read, Write};
use std::path::Path;

use super::word::{Letter, Word};
use crate::{Error, Mobius, Result};

/// Default element budget for enumeration.
pub const DEFAULT_BUDGET: usize = 4_000_000;

/// All freely reduced words up to a length bound, in breadth-first order
/// (by length, then lexicographically in `A < a < B < b`).
#[derive(Debug, Clone)]
pub struct GroupTable {
    pub max_word_len: usize,
    entries: Vec<(Word, Mobius)>,
    index: HashMap<Word, usize>,
}

/// Number of nontrivial reduced words of length `1..=n` in a free group of
/// rank 2.
pub fn free_word_count(n: usize) -> usize {
    (1..=n).map(|k| 4 * 3usize.pow(k as u32 - 1)).sum()
}

impl GroupTable {
    pub fn build(a: &Mobius, b: &Mobius, max_word_len: usize, budget: usize) -> Result<Self> {
        if max_word_len == 0 {
            return Err(Error::InvalidArgument(
                "max_word_len must be at least 1".into(),
            ));
        }
        let total = free_word_count(max_word_len);
        if total > budget {
            return Err(Error::CacheOverflow(total));
        }
        let mut entries: Vec<(Word, Mobius)> = Vec::with_capacity(total);
        let gens: Vec<Mobius> = Letter::ALL.iter().map(|l| l.matrix(a, b)).collect();
        for l in Letter::ALL {
            entries.push((Word::new([l]), gens[l.index() as usize]));
        }
        let mut start = 0;
        for _ in 1..max_word_len {
            let end = entries.len();
            for k in start..end {
                let last = *entries[k].0.letters().last().expect("nonempty");
                for l in Letter::ALL {
                    if l == last.inverse() {
                        continue;
                    }
                    let mut letters = entries[k].0.letters().to_vec();
                    letters.push(l);
                    let m = entries[k].1.compose(&gens[l.index() as usize]);
                    entries.push((Word::new(letters), m));
                }
            }
            start = end;
        }
        Ok(Self::from_entries(max_word_len, entries))
    }

    fn from_entries(max_word_len: usize, entries: Vec<(Word, Mobius)>) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (w, _))| (w.clone(), i))
            .collect();
        Self {
            max_word_len,
            entries,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Word, Mobius)> {
        self.entries.iter()
    }

    pub fn get(&self, w: &Word) -> Option<&Mobius> {
        self.index.get(w).map(|&i| &self.entries[i].1)
    }

    /// Writes the table: 8-byte magic, `u32` version, `u64` generator hash,
    /// `u32` word bound, `u64` count, then fixed-width records of
    /// `max_word_len` letter bytes (0xFF padded) and four little-endian `f64`.
    pub fn write_cache(&self, path: &Path, a: &Mobius, b: &Mobius) -> Result<()> {
        let io = |e: std::io::Error| Error::Cache(e.to_string());
        let dir = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        {
            let mut w = std::io::BufWriter::new(tmp.as_file_mut());
            w.write_all(CACHE_MAGIC).map_err(io)?;
            w.write_all(&CACHE_VERSION.to_le_bytes()).map_err(io)?;
            w.write_all(&generators_hash(a, b).to_le_bytes())
                .map_err(io)?;
            w.write_all(&(self.max_word_len as u32).to_le_bytes())
                .map_err(io)?;
            w.write_all(&(self.entries.len() as u64).to_le_bytes())
                .map_err(io)?;
            let mut rec = vec![0u8; self.max_word_len];
            for (word, m) in &self.entries {
                rec.fill(0xFF);
                for (slot, l) in rec.iter_mut().zip(word.letters()) {
                    *slot = l.index();
                }
                w.write_all(&rec).map_err(io)?;
                for v in [m.a, m.b, m.c, m.d] {
                    w.write_all(&v.to_le_bytes()).map_err(io)?;
                }
            }
            w.flush().map_err(io)?;
        }
        tmp.persist(path).map_err(|e| io(e.error))?;
        Ok(())
    }

    /// Reads a cache file; fails on any header mismatch.
    pub fn read_cache(path: &Path, a: &Mobius, b: &Mobius, max_word_len: usize) -> Result<Self> {
        let io = |e: std::io::Error| Error::Cache(e.to_string());
        let mismatch = |what: &str| Error::Cache(format!("cache header mismatch: {what}"));
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(io)?;
        let mut cur = Cursor {
            bytes: &bytes,
            pos: 0,
        };
        if cur.take(8)? != CACHE_MAGIC {
            return Err(mismatch("magic"));
        }
        if u32::from_le_bytes(cur.array()?) != CACHE_VERSION {
            return Err(mismatch("version"));
        }
        if u64::from_le_bytes(cur.array()?) != generators_hash(a, b) {
            return Err(mismatch("generators"));
        }
        if u32::from_le_bytes(cur.array()?) as usize != max_word_len {
            return Err(mismatch("max_word_len"));
        }
        let count = u64::from_le_bytes(cur.array()?) as usize;
        if count != free_word_count(max_word_len) {
            return Err(mismatch("count"));
        }
        let mut entries = Vec::with_capacity(count);
        for _ in 0..count {
            let rec = cur.take(max_word_len)?;
            let letters = rec
                .iter()
                .take_while(|&&c| c != 0xFF)
                .map(|&c| Letter::from_index(c).ok_or_else(|| mismatch("letter")))
                .collect::<Result<Vec<_>>>()?;
            let mut v = [0.0; 4];
            for x in &mut v {
                *x = f64::from_le_bytes(cur.array()?);
            }
            entries.push((
                Word::new(letters),
                Mobius::new_unchecked(v[0], v[1], v[2], v[3]),
            ));
        }
        Ok(Self::from_entries(max_word_len, entries))
    }

    /// Reads the cache if it matches, otherwise rebuilds and rewrites it.
    pub fn load_or_build(
        path: &Path,
        a: &Mobius,
        b: &Mobius,
        max_word_len: usize,
        budget: usize,
    ) -> Result<Self> {
        if let Ok(t) = Self::read_cache(path, a, b, max_word_len) {
            return Ok(t);
        }
        let t = Self::build(a, b, max_word_len, budget)?;
        // A cache that cannot be written is not an error for the caller.
        let _ = t.write_cache(path, a, b);
        Ok(t)
    }
}

const CACHE_MAGIC: &[u8; 8] = b"GEOLENWT";
const CACHE_VERSION: u32 = 1;

/// FNV-1a hash of the generator entries' bit patterns.
pub fn generators_hash(a: &Mobius, b: &Mobius) -> u64 {
    let mut h = fnv::FnvHasher::default();
    for v in [a.a, a.b, a.c, a.d, b.a, b.b, b.c, b.d] {
        h.write_u64(v.to_bits());
    }
    h.finish()
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let s = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Cache("truncated cache".into()))?;
        self.pos = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gens() -> (Mobius, Mobius) {
        (
            Mobius::new(1.0, 1.0, 1.0, 2.0).unwrap(),
            Mobius::new(1.0, -1.0, -1.0, 2.0).unwrap(),
        )
    }

    #[test]
    fn length_one() {
        let (a, b) = gens();
        let t = GroupTable::build(&a, &b, 1, DEFAULT_BUDGET).unwrap();
        let words: Vec<String> = t.iter().map(|(w, _)| w.to_string()).collect();
        assert_eq!(words, ["A", "a", "B", "b"]);
    }

    #[test]
    fn counts_closure_and_determinants() {
        let (a, b) = gens();
        for n in 1..=6 {
            let t = GroupTable::build(&a, &b, n, DEFAULT_BUDGET).unwrap();
            assert_eq!(t.len(), free_word_count(n));
            assert_eq!(
                t.len(),
                (1..=n).map(|k| 4 * 3usize.pow(k as u32 - 1)).sum::<usize>()
            );
            for (w, m) in t.iter() {
                assert!((m.det() - 1.0).abs() < 1e-10);
                assert!(t.get(&w.inverse()).is_some());
            }
        }
        assert!(matches!(
            GroupTable::build(&a, &b, 12, 1000),
            Err(Error::CacheOverflow(_))
        ));
    }

    #[test]
    fn cache_roundtrip_and_miss() {
        let (a, b) = gens();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("table.bin");
        let t = GroupTable::load_or_build(&path, &a, &b, 5, DEFAULT_BUDGET).unwrap();
        let r = GroupTable::read_cache(&path, &a, &b, 5).unwrap();
        assert_eq!(t.len(), r.len());
        for ((w1, m1), (w2, m2)) in t.iter().zip(r.iter()) {
            assert_eq!(w1, w2);
            assert_eq!(m1, m2);
        }
        assert!(GroupTable::read_cache(&path, &a, &b, 4).is_err());
        assert!(GroupTable::read_cache(&path, &b, &a, 5).is_err());
        std::fs::write(&path, b"garbage").unwrap();
        assert_eq!(
            GroupTable::load_or_build(&path, &a, &b, 3, DEFAULT_BUDGET)
                .unwrap()
                .len(),
            52
        );
    }
}
