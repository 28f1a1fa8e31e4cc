//! Labeled seeds, tree paths and cluster patterns.
//!
//! A [`TreePath`] lists mutation directions in application order: `[2, 1, 3]`
//! means mutate at 2, then at 1, then at 3, which is `μ₃μ₁μ₂` in operator
//! notation. [`TreePath::subscript`] renders the operator order.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exmatrix::ExchangeMatrix;
use crate::laurent::{pow_mod, Exponent, LaurentPoly};
use crate::perm::Perm;

static NON_EXACT_DIVISIONS: AtomicUsize = AtomicUsize::new(0);

/// Number of exchange-relation divisions that failed to be exact since
/// process start. Any nonzero value means invalid input reached the seed
/// layer or a bug in the Laurent engine.
pub fn non_exact_division_count() -> usize {
    NON_EXACT_DIVISIONS.load(Ordering::Relaxed)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TreePath(Vec<usize>);

impl TreePath {
    pub fn empty() -> Self {
        TreePath(Vec::new())
    }

    /// Validates that no two consecutive labels coincide.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        for (pos, w) in labels.windows(2).enumerate() {
            if w[0] == w[1] {
                return Err(Error::NonReducedPath { label: w[0], position: pos + 2 });
            }
        }
        if let Some(&bad) = labels.iter().find(|&&k| k == 0) {
            return Err(Error::BadDirection { k: bad, n: 0 });
        }
        Ok(TreePath(labels))
    }

    /// Like [`new`](Self::new) with a range check against rank `n`.
    pub fn checked(labels: Vec<usize>, n: usize) -> Result<Self> {
        if let Some(&k) = labels.iter().find(|&&k| k == 0 || k > n) {
            return Err(Error::BadDirection { k, n });
        }
        Self::new(labels)
    }

    /// Cancels adjacent repeats until the sequence is reduced.
    pub fn reduce(labels: impl IntoIterator<Item = usize>) -> Self {
        let mut p = TreePath::empty();
        for k in labels {
            p.push(k);
        }
        p
    }

    /// Parses comma-separated labels; the empty string is the root.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.is_empty() {
            return Ok(TreePath::empty());
        }
        let labels = t
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<usize>().map_err(|_| Error::Parse(format!("bad direction label {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(labels)
    }

    pub fn labels(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Appends `k`, cancelling it against an equal last label.
    pub fn push(&mut self, k: usize) {
        if self.0.last() == Some(&k) {
            self.0.pop();
        } else {
            self.0.push(k);
        }
    }

    pub fn prefix(&self, len: usize) -> TreePath {
        TreePath(self.0[..len].to_vec())
    }

    /// Reduced concatenation.
    pub fn concat(&self, other: &TreePath) -> TreePath {
        let mut p = self.clone();
        for &k in &other.0 {
            p.push(k);
        }
        p
    }

    pub fn reversed(&self) -> TreePath {
        TreePath(self.0.iter().rev().copied().collect())
    }

    /// Relabels every step `k` by `σ(k)`.
    pub fn relabel(&self, sigma: &Perm) -> TreePath {
        TreePath(self.0.iter().map(|&k| sigma.apply(k)).collect())
    }

    /// Operator-order subscript, e.g. application order `[2,1,3]` gives `"312"`.
    pub fn subscript(&self) -> String {
        let sep = if self.0.iter().any(|&k| k > 9) { "," } else { "" };
        self.0.iter().rev().map(|k| k.to_string()).collect::<Vec<_>>().join(sep)
    }
}

impl fmt::Display for TreePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for TreePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreePath[{self}]")
    }
}

impl Serialize for TreePath {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TreePath {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<usize>::deserialize(d)?;
        TreePath::new(labels).map_err(serde::de::Error::custom)
    }
}

/// True when every step of `path` from `b` mutates at a sink or a source.
pub fn is_sink_source_path(b: &ExchangeMatrix, path: &TreePath) -> Result<bool> {
    let mut m = b.clone();
    for &k in path.labels() {
        m.check_direction(k)?;
        if !m.is_sink(k) && !m.is_source(k) {
            return Ok(false);
        }
        m = m.mutate(k)?;
    }
    Ok(true)
}

/// Integer C-matrix (columns are c-vectors) tracked alongside a seed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CMatrix {
    n: usize,
    entries: Vec<i128>,
}

impl CMatrix {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        CMatrix { n, entries }
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.entries[i * self.n + j]
    }

    /// Mutation in direction `k` (1-based) using the exchange matrix `b` of
    /// the seed before mutation. `None` on overflow.
    pub fn mutate(&self, k: usize, b: &ExchangeMatrix) -> Option<CMatrix> {
        let n = self.n;
        let k = k - 1;
        let mut out = self.entries.clone();
        for i in 0..n {
            let cik = self.get(i, k);
            for j in 0..n {
                let idx = i * n + j;
                if j == k {
                    out[idx] = self.entries[idx].checked_neg()?;
                    continue;
                }
                let bkj = b.get(k, j) as i128;
                let delta = if cik > 0 && bkj > 0 {
                    cik.checked_mul(bkj)?
                } else if cik < 0 && bkj < 0 {
                    cik.checked_mul(bkj)?.checked_neg()?
                } else {
                    0
                };
                out[idx] = self.entries[idx].checked_add(delta)?;
            }
        }
        Some(CMatrix { n, entries: out })
    }

    /// The permutation `π` when every column `j` is the unit vector `e_{π(j)}`.
    pub fn as_permutation(&self) -> Option<Perm> {
        let n = self.n;
        let mut images = Vec::with_capacity(n);
        for j in 0..n {
            let mut hit = None;
            for i in 0..n {
                match self.get(i, j) {
                    0 => {}
                    1 if hit.is_none() => hit = Some(i),
                    _ => return None,
                }
            }
            images.push(hit? + 1);
        }
        Perm::from_images(&images).ok()
    }

    /// Columns reordered so that column `i` is column `σ(i)` of `self`.
    pub fn columns_by(&self, sigma: &Perm) -> CMatrix {
        let n = self.n;
        let mut out = vec![0; n * n];
        for i in 0..n {
            let src = sigma.at(i);
            for r in 0..n {
                out[r * n + i] = self.entries[r * n + src];
            }
        }
        CMatrix { n, entries: out }
    }

    pub fn is_identity(&self) -> bool {
        *self == CMatrix::identity(self.n)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[i128]> = self.entries.chunks(self.n).collect();
        write!(f, "CMatrix{rows:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Origin {
    pattern: u64,
    path: TreePath,
}

/// A labeled seed: cluster of Laurent polynomials in the initial variables
/// together with its exchange matrix.
#[derive(Clone, Debug)]
pub struct LabeledSeed {
    cluster: Vec<Arc<LaurentPoly>>,
    matrix: ExchangeMatrix,
    cmatrix: Option<CMatrix>,
    origin: Option<Origin>,
}

impl LabeledSeed {
    /// The initial seed `(x₁, …, xₙ; B)`.
    pub fn root(matrix: ExchangeMatrix, track_c: bool) -> Self {
        let n = matrix.n();
        LabeledSeed {
            cluster: (1..=n).map(|i| Arc::new(LaurentPoly::variable(n, i))).collect(),
            cmatrix: track_c.then(|| CMatrix::identity(n)),
            matrix,
            origin: None,
        }
    }

    /// A free-standing seed; not attached to any cluster pattern.
    pub fn from_parts(cluster: Vec<Arc<LaurentPoly>>, matrix: ExchangeMatrix) -> Result<Self> {
        if cluster.len() != matrix.n() || cluster.iter().any(|x| x.n() != matrix.n()) {
            return Err(Error::Dimension("cluster size differs from matrix rank".into()));
        }
        Ok(LabeledSeed { cluster, matrix, cmatrix: None, origin: None })
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn cluster(&self) -> &[Arc<LaurentPoly>] {
        &self.cluster
    }

    pub fn matrix(&self) -> &ExchangeMatrix {
        &self.matrix
    }

    pub fn cmatrix(&self) -> Option<&CMatrix> {
        self.cmatrix.as_ref()
    }

    /// Path from the pattern root, when the seed belongs to a pattern.
    pub fn path(&self) -> Option<&TreePath> {
        self.origin.as_ref().map(|o| &o.path)
    }

    /// Seed mutation in direction `k` (1-based).
    pub fn mutate(&self, k: usize) -> Result<LabeledSeed> {
        self.matrix.check_direction(k)?;
        let n = self.n();
        let col = k - 1;
        let mut plus = LaurentPoly::one(n);
        let mut minus = LaurentPoly::one(n);
        for j in 0..n {
            let b = self.matrix.get(j, col);
            if b == 0 {
                continue;
            }
            let factor = power(&self.cluster[j], b.unsigned_abs());
            if b > 0 {
                plus = &plus * &factor;
            } else {
                minus = &minus * &factor;
            }
        }
        let numerator = &plus + &minus;
        let new_var = numerator.exact_div(&self.cluster[col]).inspect_err(|_| {
            NON_EXACT_DIVISIONS.fetch_add(1, Ordering::Relaxed);
        })?;
        let mut cluster = self.cluster.clone();
        cluster[col] = Arc::new(new_var);
        let cmatrix = self.cmatrix.as_ref().and_then(|c| c.mutate(k, &self.matrix));
        let origin = self.origin.as_ref().map(|o| {
            let mut path = o.path.clone();
            path.push(k);
            Origin { pattern: o.pattern, path }
        });
        Ok(LabeledSeed { cluster, matrix: self.matrix.mutate(k)?, cmatrix, origin })
    }

    pub fn mutate_along(&self, path: &TreePath) -> Result<LabeledSeed> {
        let mut s = self.clone();
        for &k in path.labels() {
            s = s.mutate(k)?;
        }
        Ok(s)
    }

    /// `σΣ`: `x'_i = x_{σ⁻¹(i)}` and `σB`. The result is detached from any pattern.
    pub fn permute(&self, sigma: &Perm) -> LabeledSeed {
        let n = self.n();
        let mut cluster = self.cluster.clone();
        for i in 0..n {
            cluster[sigma.at(i)] = self.cluster[i].clone();
        }
        LabeledSeed { cluster, matrix: self.matrix.permute(sigma), cmatrix: None, origin: None }
    }

    pub fn is_sink(&self, k: usize) -> bool {
        self.matrix.is_sink(k)
    }

    pub fn is_source(&self, k: usize) -> bool {
        self.matrix.is_source(k)
    }

    fn check_same_pattern(&self, other: &LabeledSeed) -> Result<()> {
        match (&self.origin, &other.origin) {
            (Some(a), Some(b)) if a.pattern != b.pattern => Err(Error::PatternMismatch),
            _ => Ok(()),
        }
    }

    pub fn equal_labeled(&self, other: &LabeledSeed) -> Result<bool> {
        self.check_same_pattern(other)?;
        Ok(self.matrix == other.matrix && self.cluster == other.cluster)
    }

    /// Some `σ` with `σ(self) = other` as labeled seeds, if any.
    pub fn clusters_equal_up_to_perm(&self, other: &LabeledSeed) -> Result<Option<Perm>> {
        self.check_same_pattern(other)?;
        let n = self.n();
        if other.n() != n {
            return Ok(None);
        }
        let position: HashMap<&LaurentPoly, usize> =
            other.cluster.iter().enumerate().map(|(i, x)| (x.as_ref(), i)).collect();
        let mut images = Vec::with_capacity(n);
        for x in &self.cluster {
            match position.get(x.as_ref()) {
                Some(&j) => images.push(j),
                None => return Ok(None),
            }
        }
        let mut seen = vec![false; n];
        for &j in &images {
            if seen[j] {
                return Ok(None);
            }
            seen[j] = true;
        }
        let sigma = Perm::from_zero_based(images);
        Ok((self.matrix.permute(&sigma) == other.matrix).then_some(sigma))
    }
}

fn power(x: &LaurentPoly, e: u64) -> LaurentPoly {
    if x.is_monomial() {
        let (exp, c) = &x.terms()[0];
        let exp: Exponent = exp.iter().map(|v| v.checked_mul(e as i64).expect("Laurent exponent overflow")).collect();
        return LaurentPoly::monomial(x.n(), exp, num_traits::pow(c.clone(), e as usize));
    }
    let mut acc = LaurentPoly::one(x.n());
    let mut base = x.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Modulus of the evaluation fingerprints, the Mersenne prime `2^61 - 1`.
pub const EVAL_PRIME: u64 = (1 << 61) - 1;

/// Deterministic evaluation point number `idx` for rank `n`.
pub fn eval_point(n: usize, idx: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x636c_7573_7465_7200 ^ idx);
    (0..n).map(|_| rng.gen_range(2..EVAL_PRIME)).collect()
}

fn inv_mod(v: u64) -> u64 {
    pow_mod(v, EVAL_PRIME - 2, EVAL_PRIME)
}

fn mul_mod(a: u64, b: u64) -> u64 {
    (a as u128 * b as u128 % EVAL_PRIME as u128) as u64
}

/// Values of the cluster reached along `path` from `(point; b)` modulo
/// [`EVAL_PRIME`]. `Ok(None)` when an intermediate cluster variable vanishes
/// at the point.
pub fn eval_along(b: &ExchangeMatrix, point: &[u64], path: &TreePath) -> Result<Option<Vec<u64>>> {
    let mut vals = point.to_vec();
    let mut m = b.clone();
    for &k in path.labels() {
        m.check_direction(k)?;
        let col = k - 1;
        if vals[col] == 0 {
            return Ok(None);
        }
        let mut plus = 1u64;
        let mut minus = 1u64;
        for (j, &v) in vals.iter().enumerate() {
            let e = m.get(j, col);
            if e > 0 {
                plus = mul_mod(plus, pow_mod(v, e as u64, EVAL_PRIME));
            } else if e < 0 {
                minus = mul_mod(minus, pow_mod(v, e.unsigned_abs(), EVAL_PRIME));
            }
        }
        let num = (plus + minus) % EVAL_PRIME;
        vals[col] = mul_mod(num, inv_mod(vals[col]));
        m = m.mutate(k)?;
    }
    Ok(Some(vals))
}

static NEXT_PATTERN_ID: AtomicU64 = AtomicU64::new(1);

/// Seeds reachable from a fixed root, computed on demand from paths and memoized.
pub struct ClusterPattern {
    id: u64,
    root: Arc<LabeledSeed>,
    cfilter: bool,
    cache: Mutex<HashMap<TreePath, Arc<LabeledSeed>>>,
    cache_limit: usize,
}

impl fmt::Debug for ClusterPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClusterPattern")
            .field("id", &self.id)
            .field("root", &self.root.matrix)
            .field("cfilter", &self.cfilter)
            .finish()
    }
}

impl ClusterPattern {
    pub fn new(b: ExchangeMatrix) -> Arc<Self> {
        Self::with_cfilter(b, true)
    }

    /// `cfilter` enables the C-matrix pre-filter in identity tests.
    pub fn with_cfilter(b: ExchangeMatrix, cfilter: bool) -> Arc<Self> {
        let id = NEXT_PATTERN_ID.fetch_add(1, Ordering::Relaxed);
        let mut root = LabeledSeed::root(b, true);
        root.origin = Some(Origin { pattern: id, path: TreePath::empty() });
        Arc::new(ClusterPattern {
            id,
            root: Arc::new(root),
            cfilter,
            cache: Mutex::new(HashMap::new()),
            cache_limit: 200_000,
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn n(&self) -> usize {
        self.root.n()
    }

    pub fn root(&self) -> &Arc<LabeledSeed> {
        &self.root
    }

    pub fn root_matrix(&self) -> &ExchangeMatrix {
        &self.root.matrix
    }

    pub fn cfilter(&self) -> bool {
        self.cfilter
    }

    /// The seed at the end of `path`, memoizing every prefix.
    pub fn seed(&self, path: &TreePath) -> Result<Arc<LabeledSeed>> {
        let labels = path.labels();
        let (mut start, mut seed) = {
            let cache = self.cache.lock().expect("seed cache poisoned");
            let mut found = (0, self.root.clone());
            for len in (1..=labels.len()).rev() {
                if let Some(s) = cache.get(&path.prefix(len)) {
                    found = (len, s.clone());
                    break;
                }
            }
            found
        };
        while start < labels.len() {
            let next = Arc::new(seed.mutate(labels[start])?);
            start += 1;
            let mut cache = self.cache.lock().expect("seed cache poisoned");
            if cache.len() >= self.cache_limit {
                cache.clear();
            }
            cache.insert(path.prefix(start), next.clone());
            seed = next;
        }
        Ok(seed)
    }

    pub fn matrix_at(&self, path: &TreePath) -> Result<ExchangeMatrix> {
        self.root.matrix.mutate_along(path.labels())
    }

    /// C-matrix at the end of `path`; `None` on overflow.
    pub fn cmatrix_at(&self, path: &TreePath) -> Result<Option<CMatrix>> {
        let mut m = self.root.matrix.clone();
        let mut c = Some(CMatrix::identity(self.n()));
        for &k in path.labels() {
            m.check_direction(k)?;
            c = c.and_then(|c| c.mutate(k, &m));
            m = m.mutate(k)?;
        }
        Ok(c)
    }

    /// Cluster values at `path` for evaluation point number `idx`.
    pub fn eval_at(&self, path: &TreePath, idx: u64) -> Result<Option<Vec<u64>>> {
        eval_along(&self.root.matrix, &eval_point(self.n(), idx), path)
    }

    pub fn clear_cache(&self) {
        self.cache.lock().expect("seed cache poisoned").clear();
    }
}

/// Convenience for fixtures: `Σ x_i^{e_i}` style monomials.
pub fn monomial(n: usize, exps: &[i64]) -> LaurentPoly {
    LaurentPoly::monomial(n, Exponent::from_slice(exps), BigInt::one())
}
