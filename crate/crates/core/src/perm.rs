//! Permutations of `{1..n}`.
//!
//! Stored 0-based internally; every public constructor and accessor that
//! talks about labels uses 1-based values, matching the direction labels of
//! mutations. The serialized form is the image list `[σ(1), …, σ(n)]`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    /// Builds a permutation from its 1-based image list.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut zero_based = Vec::with_capacity(n);
        for &img in images {
            if img == 0 || img > n || seen[img - 1] {
                return Err(Error::Parse(format!("{images:?} is not a permutation of 1..={n}")));
            }
            seen[img - 1] = true;
            zero_based.push(img - 1);
        }
        Ok(Perm(zero_based))
    }

    pub(crate) fn from_zero_based(images: Vec<usize>) -> Self {
        debug_assert!({
            let mut s = images.clone();
            s.sort_unstable();
            s.iter().enumerate().all(|(i, &v)| i == v)
        });
        Perm(images)
    }

    /// Builds a permutation of `{1..n}` from 1-based disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (idx, &v) in cycle.iter().enumerate() {
                if v == 0 || v > n || touched[v - 1] {
                    return Err(Error::Parse(format!("bad cycle {cycle:?} for n = {n}")));
                }
                touched[v - 1] = true;
                let next = cycle[(idx + 1) % cycle.len()];
                if next == 0 || next > n {
                    return Err(Error::Parse(format!("bad cycle {cycle:?} for n = {n}")));
                }
                images[v - 1] = next - 1;
            }
        }
        Ok(Perm(images))
    }

    /// Parses cycle notation such as `(24)(35)`, `(1 3 2)(4,5,6,7)` or `1`/`id`.
    ///
    /// Without separators every digit is its own label, which is only
    /// meaningful for `n <= 9`.
    pub fn parse_cycles(n: usize, text: &str) -> Result<Self> {
        let t = text.trim();
        if t.is_empty() || t == "1" || t == "id" || t == "()" {
            return Ok(Perm::identity(n));
        }
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = t;
        while !rest.is_empty() {
            let rest_trim = rest.trim_start();
            let Some(body) = rest_trim.strip_prefix('(') else {
                return Err(Error::Parse(format!("expected '(' in cycle notation {text:?}")));
            };
            let close = body
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced cycle notation {text:?}")))?;
            let inner = &body[..close];
            let labels: Vec<usize> = if inner.contains([',', ' ']) {
                inner
                    .split([',', ' '])
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<usize>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
                    .collect::<Result<_>>()?
            } else {
                inner
                    .chars()
                    .map(|c| {
                        c.to_digit(10)
                            .map(|d| d as usize)
                            .ok_or_else(|| Error::Parse(format!("bad label {c:?} in {text:?}")))
                    })
                    .collect::<Result<_>>()?
            };
            cycles.push(labels);
            rest = body[close + 1..].trim_start();
        }
        let refs: Vec<&[usize]> = cycles.iter().map(|c| c.as_slice()).collect();
        Perm::from_cycles(n, &refs)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// Image of a 1-based label.
    pub fn apply(&self, label: usize) -> usize {
        self.0[label - 1] + 1
    }

    /// Image of a 0-based index.
    #[inline]
    pub(crate) fn at(&self, i: usize) -> usize {
        self.0[i]
    }

    /// 1-based image list `[σ(1), …, σ(n)]`.
    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|&v| v + 1).collect()
    }

    /// `self ∘ other`, i.e. `other` applied first.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.n(), other.n(), "permutation sizes differ");
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.n()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// All permutations of `{1..n}` in lexicographic order of image lists.
    pub fn all(n: usize) -> impl Iterator<Item = Perm> {
        let mut next = Some((0..n).collect::<Vec<usize>>());
        std::iter::from_fn(move || {
            let current = next.take()?;
            let mut succ = current.clone();
            if next_permutation(&mut succ) {
                next = Some(succ);
            }
            Some(Perm(current))
        })
    }

    /// Disjoint cycles of length at least two, 1-based, each starting at its
    /// smallest label.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for start in 0..self.n() {
            if seen[start] || self.0[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i + 1);
                i = self.0[i];
            }
            out.push(cycle);
        }
        out
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "1");
        }
        let sep = if self.n() > 9 { "," } else { "" };
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            write!(f, "({})", parts.join(sep))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.images())
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.images().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let images = Vec::<usize>::deserialize(d)?;
        Perm::from_images(&images).map_err(serde::de::Error::custom)
    }
}
