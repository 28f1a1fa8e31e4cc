//! Skew-symmetrizable exchange matrices.
//!
//! Matrix entries are checked `i64`; mutation reports
//! [`Error::IntegerOverflow`] instead of wrapping. Row/column indices of the
//! accessors are 0-based, mutation directions and permutation labels are
//! 1-based.

use std::cmp::Ordering;
use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Perm;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExchangeMatrix {
    n: usize,
    entries: Vec<i64>,
}

/// On-disk matrix format: `{"n": 4, "B": [[...], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    #[serde(rename = "B")]
    pub b: Vec<Vec<i64>>,
}

impl ExchangeMatrix {
    /// Validates squareness and skew-symmetrizability.
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let m = Self::from_rows_unchecked(rows)?;
        m.skew_symmetrizer()?;
        Ok(m)
    }

    /// Only checks squareness.
    pub fn from_rows_unchecked(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Dimension("exchange matrix must have rank at least 1".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!("row {} has {} entries, expected {n}", i + 1, row.len())));
            }
            entries.extend(row);
        }
        Ok(ExchangeMatrix { n, entries })
    }

    pub fn zero(n: usize) -> Self {
        ExchangeMatrix { n, entries: vec![0; n * n] }
    }

    pub fn from_file(file: &MatrixFile) -> Result<Self> {
        if file.b.len() != file.n {
            return Err(Error::Dimension(format!("declared n = {} but {} rows given", file.n, file.b.len())));
        }
        Self::new(file.b.clone())
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile { n: self.n, b: self.rows() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub(crate) fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub(crate) fn check_direction(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n {
            Err(Error::BadDirection { k, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Matrix mutation in direction `k` (1-based).
    pub fn mutate(&self, k: usize) -> Result<Self> {
        self.check_direction(k)?;
        let k = k - 1;
        let n = self.n;
        let mut out = self.entries.clone();
        for i in 0..n {
            for j in 0..n {
                let idx = i * n + j;
                if i == k || j == k {
                    out[idx] = self.entries[idx]
                        .checked_neg()
                        .ok_or(Error::IntegerOverflow("matrix mutation"))?;
                    continue;
                }
                let bik = self.get(i, k);
                let bkj = self.get(k, j);
                let delta = if bik > 0 && bkj > 0 {
                    bik.checked_mul(bkj)
                } else if bik < 0 && bkj < 0 {
                    bik.checked_mul(bkj).and_then(i64::checked_neg)
                } else {
                    Some(0)
                }
                .ok_or(Error::IntegerOverflow("matrix mutation"))?;
                out[idx] = self.entries[idx]
                    .checked_add(delta)
                    .ok_or(Error::IntegerOverflow("matrix mutation"))?;
            }
        }
        Ok(ExchangeMatrix { n, entries: out })
    }

    /// Left fold of [`mutate`](Self::mutate) over 1-based labels in application order.
    pub fn mutate_along(&self, labels: &[usize]) -> Result<Self> {
        let mut m = self.clone();
        for &k in labels {
            m = m.mutate(k)?;
        }
        Ok(m)
    }

    /// `(σB)_{ij} = b_{σ⁻¹(i)σ⁻¹(j)}`.
    pub fn permute(&self, sigma: &Perm) -> Self {
        assert_eq!(sigma.n(), self.n, "permutation size differs from rank");
        let n = self.n;
        let mut out = vec![0; n * n];
        for i in 0..n {
            let si = sigma.at(i);
            for j in 0..n {
                out[si * n + sigma.at(j)] = self.entries[i * n + j];
            }
        }
        ExchangeMatrix { n, entries: out }
    }

    pub fn neg(&self) -> Self {
        ExchangeMatrix { n: self.n, entries: self.entries.iter().map(|v| -v).collect() }
    }

    /// Componentwise-minimal positive `D` with `d_i b_ij = -d_j b_ji`,
    /// normalized per connected component (isolated vertices get 1).
    pub fn skew_symmetrizer(&self) -> Result<Vec<i64>> {
        let n = self.n;
        for i in 0..n {
            if self.get(i, i) != 0 {
                return Err(Error::NotSkewSymmetrizable(format!("diagonal entry b_{0}{0} is nonzero", i + 1)));
            }
            for j in (i + 1)..n {
                let (a, b) = (self.get(i, j), self.get(j, i));
                if (a == 0) != (b == 0) {
                    return Err(Error::NotSkewSymmetrizable(format!(
                        "b_{}{} and b_{}{} are not simultaneously zero",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
                if a != 0 && a.signum() == b.signum() {
                    return Err(Error::NotSkewSymmetrizable(format!(
                        "b_{}{} and b_{}{} have the same sign",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        let mut d: Vec<Option<BigRational>> = vec![None; n];
        let mut out = vec![0i64; n];
        for start in 0..n {
            if d[start].is_some() {
                continue;
            }
            d[start] = Some(BigRational::one());
            let mut component = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                let di = d[i].clone().expect("assigned");
                for j in 0..n {
                    let bij = self.get(i, j);
                    if bij == 0 {
                        continue;
                    }
                    // d_j = d_i * b_ij / (-b_ji)
                    let dj = di.clone() * BigRational::new(BigInt::from(bij), BigInt::from(-self.get(j, i)));
                    match &d[j] {
                        None => {
                            d[j] = Some(dj);
                            component.push(j);
                            queue.push_back(j);
                        }
                        Some(existing) if *existing != dj => {
                            return Err(Error::NotSkewSymmetrizable(format!(
                                "inconsistent symmetrizer around vertex {}",
                                j + 1
                            )));
                        }
                        Some(_) => {}
                    }
                }
            }
            let mut lcm = BigInt::one();
            for &v in &component {
                lcm = num_integer::Integer::lcm(&lcm, d[v].as_ref().expect("assigned").denom());
            }
            let scaled: Vec<BigInt> = component
                .iter()
                .map(|&v| {
                    let r = d[v].as_ref().expect("assigned");
                    r.numer() * (&lcm / r.denom())
                })
                .collect();
            let mut g = BigInt::zero();
            for s in &scaled {
                g = num_integer::Integer::gcd(&g, s);
            }
            for (&v, s) in component.iter().zip(&scaled) {
                out[v] = (s / &g)
                    .abs()
                    .to_i64()
                    .ok_or(Error::IntegerOverflow("skew-symmetrizer"))?;
            }
        }
        Ok(out)
    }

    /// True when `d` symmetrizes this matrix.
    pub fn is_symmetrized_by(&self, d: &[i64]) -> bool {
        let n = self.n;
        d.len() == n
            && (0..n).all(|i| {
                (0..n).all(|j| {
                    let lhs = (d[i] as i128) * (self.get(i, j) as i128);
                    let rhs = -(d[j] as i128) * (self.get(j, i) as i128);
                    lhs == rhs
                })
            })
    }

    /// Column `k` (1-based) nonnegative.
    pub fn is_sink(&self, k: usize) -> bool {
        (0..self.n).all(|j| self.get(j, k - 1) >= 0)
    }

    /// Column `k` (1-based) nonpositive.
    pub fn is_source(&self, k: usize) -> bool {
        (0..self.n).all(|j| self.get(j, k - 1) <= 0)
    }

    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm on the arrow digraph i -> j iff b_ij > 0
        let n = self.n;
        let mut indeg = vec![0usize; n];
        for i in 0..n {
            for j in 0..n {
                if self.get(i, j) > 0 {
                    indeg[j] += 1;
                }
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut removed = 0;
        while let Some(v) = stack.pop() {
            removed += 1;
            for j in 0..n {
                if self.get(v, j) > 0 {
                    indeg[j] -= 1;
                    if indeg[j] == 0 {
                        stack.push(j);
                    }
                }
            }
        }
        removed == n
    }

    pub fn is_indecomposable(&self) -> bool {
        let n = self.n;
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for j in 0..n {
                if !seen[j] && self.get(v, j) != 0 {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn weighted_graph(&self) -> WeightedGraph {
        let mut arrows = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let bij = self.get(i, j);
                if bij > 0 {
                    let sq = -(bij as i128) * (self.get(j, i) as i128);
                    arrows.push(Arrow { from: i + 1, to: j + 1, squared_weight: sq as u128 });
                }
            }
        }
        WeightedGraph { n: self.n, arrows }
    }

    /// Exact sum of the arrow weights `√(-b_ij b_ji)`.
    pub fn weight_sum(&self) -> WeightSum {
        let mut ws = WeightSum::default();
        for a in self.weighted_graph().arrows {
            ws.add_sqrt(a.squared_weight);
        }
        ws
    }

    pub fn to_dot(&self) -> String {
        self.weighted_graph().to_dot()
    }

    pub fn class_key(&self) -> ClassKey {
        canonical::class_key(self)
    }

    /// All `σ` (lexicographic by image list) with `σ(self) = sign · target`.
    pub fn isomorphisms_to(&self, target: &ExchangeMatrix, negate: bool, limit: Option<usize>) -> Vec<Perm> {
        canonical::isomorphisms(self, target, negate, limit)
    }
}

impl fmt::Debug for ExchangeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExchangeMatrix{:?}", self.rows())
    }
}

impl fmt::Display for ExchangeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub from: usize,
    pub to: usize,
    pub squared_weight: u128,
}

impl Arrow {
    /// `"sqrt(m)"`, or the integer root when `m` is a perfect square.
    pub fn label(&self) -> String {
        let r = isqrt_u128(self.squared_weight);
        if r * r == self.squared_weight {
            r.to_string()
        } else {
            format!("sqrt({})", self.squared_weight)
        }
    }
}

/// The weighted quiver of a matrix; output only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightedGraph {
    pub n: usize,
    pub arrows: Vec<Arrow>,
}

impl WeightedGraph {
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n");
        for v in 1..=self.n {
            s.push_str(&format!("  {v};\n"));
        }
        for a in &self.arrows {
            s.push_str(&format!("  {} -> {} [label=\"{}\"];\n", a.from, a.to, a.label()));
        }
        s.push_str("}\n");
        s
    }
}

pub(crate) fn isqrt_u128(m: u128) -> u128 {
    if m < 2 {
        return m;
    }
    let mut x = (m as f64).sqrt() as u128;
    while x * x > m {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= m {
        x += 1;
    }
    x
}

/// Splits `m = k² r` with `r` squarefree.
fn square_free_split(m: u128) -> (u128, u128) {
    if m == 0 {
        return (0, 1);
    }
    let mut k = 1u128;
    let mut r = 1u128;
    let mut rest = m;
    let mut p = 2u128;
    while p * p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            k *= p;
        }
        if e % 2 == 1 {
            r *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // `rest` now has at most two prime factors
    let s = isqrt_u128(rest);
    if s * s == rest {
        k *= s;
    } else {
        r *= rest;
    }
    (k, r)
}

/// An exact sum `Σ c_r √r` over squarefree radicals `r` with nonnegative
/// integer coefficients.
///
/// Equality is structural (square roots of distinct squarefree integers are
/// linearly independent over ℚ); strict comparisons are settled by interval
/// refinement, which always terminates because the difference is nonzero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct WeightSum {
    terms: BTreeMap<u128, u128>,
}

impl WeightSum {
    pub fn add_sqrt(&mut self, m: u128) {
        let (k, r) = square_free_split(m);
        if k == 0 {
            return;
        }
        *self.terms.entry(r).or_insert(0) += k;
    }

    pub fn from_integer(v: u128) -> Self {
        let mut w = WeightSum::default();
        if v > 0 {
            w.terms.insert(1, v);
        }
        w
    }

    /// Integer value when every radical is 1.
    pub fn as_integer(&self) -> Option<u128> {
        match self.terms.len() {
            0 => Some(0),
            1 => self.terms.get(&1).copied(),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms.iter().map(|(&r, &c)| c as f64 * (r as f64).sqrt()).sum()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u128, u128)> + '_ {
        self.terms.iter().map(|(&r, &c)| (r, c))
    }
}

fn sign_of_radical_sum(coeffs: &[(u128, BigInt)]) -> Ordering {
    if coeffs.iter().all(|(_, c)| c.is_zero()) {
        return Ordering::Equal;
    }
    let mut bits: u32 = 16;
    loop {
        let scale = BigInt::one() << (2 * bits);
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (r, c) in coeffs {
            if c.is_zero() {
                continue;
            }
            let v = c * c * BigInt::from(*r) * &scale;
            let s = v.sqrt();
            let exact = &s * &s == v;
            let up = if exact { s.clone() } else { &s + 1 };
            if c.is_positive() {
                lo += &s;
                hi += &up;
            } else {
                lo -= &up;
                hi -= &s;
            }
        }
        if lo.is_positive() {
            return Ordering::Greater;
        }
        if hi.is_negative() {
            return Ordering::Less;
        }
        bits *= 2;
    }
}

impl Ord for WeightSum {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let mut diff: BTreeMap<u128, BigInt> = BTreeMap::new();
        for (&r, &c) in &self.terms {
            *diff.entry(r).or_insert_with(BigInt::zero) += BigInt::from(c);
        }
        for (&r, &c) in &other.terms {
            *diff.entry(r).or_insert_with(BigInt::zero) -= BigInt::from(c);
        }
        let coeffs: Vec<(u128, BigInt)> = diff.into_iter().collect();
        sign_of_radical_sum(&coeffs)
    }
}

impl PartialOrd for WeightSum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for WeightSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&r, &c)| if r == 1 { c.to_string() } else { format!("{c}*sqrt({r})") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Canonical key of the class `{±σ(B)}`: the minimal flattening of `εσ(B)`
/// over all relabelings, prefixed with the rank.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassKey(Box<[i64]>);

impl ClassKey {
    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    /// Little-endian byte encoding.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    /// The canonical representative matrix of the class.
    pub fn representative(&self) -> ExchangeMatrix {
        let n = self.0[0] as usize;
        let flat = &self.0[1..];
        let mut entries = vec![0; n * n];
        let mut idx = 0;
        for p in 0..n {
            for i in 0..p {
                entries[i * n + p] = flat[idx];
                entries[p * n + i] = flat[idx + 1];
                idx += 2;
            }
            entries[p * n + p] = flat[idx];
            idx += 1;
        }
        ExchangeMatrix { n, entries }
    }

    /// Short stable hex digest for reports.
    pub fn short(&self) -> String {
        // FNV-1a
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.to_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}

impl fmt::Debug for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClassKey({})", self.representative())
    }
}

impl fmt::Display for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.representative())
    }
}

mod canonical {
    //! Branch-and-bound canonical labeling. Entries are emitted in
    //! "growing square" order so that fixing the first `p` positions fixes
    //! a prefix of the flattening, which is what makes pruning possible.

    use super::*;

    /// Sign-insensitive vertex invariant; equal for `v` in `B` and `σ(v)` in `±σ(B)`.
    pub(super) fn invariants(m: &ExchangeMatrix) -> Vec<Vec<i64>> {
        let n = m.n();
        (0..n)
            .map(|v| {
                let mut out: Vec<i64> = (0..n).map(|j| m.get(v, j).abs()).collect();
                out.sort_unstable();
                let mut col: Vec<i64> = (0..n).map(|j| m.get(j, v).abs()).collect();
                col.sort_unstable();
                let mut prod: Vec<i64> = (0..n).map(|j| m.get(v, j).saturating_mul(m.get(j, v))).collect();
                prod.sort_unstable();
                out.extend(col);
                out.extend(prod);
                out
            })
            .collect()
    }

    struct Search<'a> {
        n: usize,
        m: Vec<i64>,
        invs: &'a [Vec<i64>],
        targets: &'a [Vec<i64>],
        order: Vec<usize>,
        used: Vec<bool>,
        cur: Vec<i64>,
        best: &'a mut Option<Vec<i64>>,
    }

    impl Search<'_> {
        fn run(&mut self, pos: usize) {
            if pos == self.n {
                if self.best.as_ref().is_none_or(|b| self.cur < *b) {
                    *self.best = Some(self.cur.clone());
                }
                return;
            }
            let n = self.n;
            for v in 0..n {
                if self.used[v] || self.invs[v] != self.targets[pos] {
                    continue;
                }
                let start = self.cur.len();
                for i in 0..pos {
                    let o = self.order[i];
                    self.cur.push(self.m[o * n + v]);
                    self.cur.push(self.m[v * n + o]);
                }
                self.cur.push(self.m[v * n + v]);
                // the best key may have changed inside an earlier sibling, so compare the whole prefix
                let prune = self.best.as_ref().is_some_and(|b| self.cur[..] > b[..self.cur.len()]);
                if !prune {
                    self.used[v] = true;
                    self.order.push(v);
                    self.run(pos + 1);
                    self.order.pop();
                    self.used[v] = false;
                }
                self.cur.truncate(start);
            }
        }
    }

    pub(super) fn class_key(b: &ExchangeMatrix) -> ClassKey {
        let n = b.n();
        let invs = invariants(b);
        let mut targets = invs.clone();
        targets.sort();
        let mut best: Option<Vec<i64>> = None;
        for negate in [false, true] {
            let m: Vec<i64> = if negate { b.entries().iter().map(|v| -v).collect() } else { b.entries().to_vec() };
            let mut s = Search {
                n,
                m,
                invs: &invs,
                targets: &targets,
                order: Vec::with_capacity(n),
                used: vec![false; n],
                cur: Vec::with_capacity(n * n),
                best: &mut best,
            };
            s.run(0);
        }
        let mut key = Vec::with_capacity(n * n + 1);
        key.push(n as i64);
        key.extend(best.expect("at least one labeling"));
        ClassKey(key.into_boxed_slice())
    }

    /// `σ` with `a_{kl} = ε b_{σ(k)σ(l)}` for all `k, l`, in lexicographic order.
    pub(super) fn isomorphisms(a: &ExchangeMatrix, b: &ExchangeMatrix, negate: bool, limit: Option<usize>) -> Vec<Perm> {
        let n = a.n();
        if b.n() != n {
            return Vec::new();
        }
        let ia = invariants(a);
        let ib = invariants(b);
        let sign = if negate { -1 } else { 1 };
        let mut out = Vec::new();
        let mut img = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn rec(
            k: usize,
            n: usize,
            a: &ExchangeMatrix,
            b: &ExchangeMatrix,
            sign: i64,
            ia: &[Vec<i64>],
            ib: &[Vec<i64>],
            img: &mut Vec<usize>,
            used: &mut Vec<bool>,
            out: &mut Vec<Perm>,
            limit: Option<usize>,
        ) -> bool {
            if k == n {
                out.push(Perm::from_zero_based(img.clone()));
                return limit.is_some_and(|l| out.len() >= l);
            }
            for cand in 0..n {
                if used[cand] || ia[k] != ib[cand] {
                    continue;
                }
                if a.get(k, k) != sign * b.get(cand, cand) {
                    continue;
                }
                let ok = (0..k).all(|j| {
                    a.get(k, j) == sign * b.get(cand, img[j]) && a.get(j, k) == sign * b.get(img[j], cand)
                });
                if !ok {
                    continue;
                }
                img[k] = cand;
                used[cand] = true;
                let stop = rec(k + 1, n, a, b, sign, ia, ib, img, used, out, limit);
                used[cand] = false;
                img[k] = usize::MAX;
                if stop {
                    return true;
                }
            }
            false
        }
        rec(0, n, a, b, sign, &ia, &ib, &mut img, &mut used, &mut out, limit);
        out
    }
}
