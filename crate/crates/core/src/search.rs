//! Exploration of the mutation pattern and generator extraction.
//!
//! Notation: the root class is the class `[B_{t₀}]`. A path is in `𝒫₁` when
//! it ends in the root class and meets the root class exactly twice (at its
//! two endpoints). `ℬ` is the set of classes met by `𝒫₁` paths; in
//! sink-source mode only sink/source steps are allowed.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::autom::{AutDump, AutQuad, Sign};
use crate::error::{Error, Result};
use crate::exmatrix::{ClassKey, ExchangeMatrix};
use crate::seeds::{is_sink_source_path, ClusterPattern, TreePath};

/// How `ℬ` and the distances `l_i` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// All mutations; requires the mutation class to close.
    FiniteMutation,
    /// Sink/source mutations only; requires an acyclic root matrix.
    AcyclicSinkSource,
    /// All mutations, `ℬ` collected from `𝒫₁` paths up to the given length.
    Bounded(usize),
}

impl Mode {
    pub fn sink_source_only(self) -> bool {
        matches!(self, Mode::AcyclicSinkSource)
    }

    pub fn name(self) -> String {
        match self {
            Mode::FiniteMutation => "finite-mutation".into(),
            Mode::AcyclicSinkSource => "acyclic-ss".into(),
            Mode::Bounded(l) => format!("bounded({l})"),
        }
    }
}

/// Cheap membership test for a fixed class.
#[derive(Clone)]
pub struct ClassTester {
    key: ClassKey,
    abs_sorted: Vec<i64>,
}

impl ClassTester {
    pub fn new(b: &ExchangeMatrix) -> Self {
        ClassTester { key: b.class_key(), abs_sorted: abs_sorted(b) }
    }

    pub fn key(&self) -> &ClassKey {
        &self.key
    }

    pub fn contains(&self, b: &ExchangeMatrix) -> bool {
        abs_sorted(b) == self.abs_sorted && b.class_key() == self.key
    }
}

fn abs_sorted(b: &ExchangeMatrix) -> Vec<i64> {
    let mut v: Vec<i64> = b.entries().iter().map(|x| x.abs()).collect();
    v.sort_unstable();
    v
}

fn ss_step(m: &ExchangeMatrix, k: usize) -> bool {
    m.is_sink(k) || m.is_source(k)
}

/// Number of vertices on `path` (both endpoints included) whose matrix lies
/// in the class `reference`.
pub fn path_weight(b0: &ExchangeMatrix, path: &TreePath, reference: &ClassKey) -> Result<usize> {
    let mut m = b0.clone();
    let mut w = usize::from(m.class_key() == *reference);
    for &k in path.labels() {
        m = m.mutate(k)?;
        w += usize::from(m.class_key() == *reference);
    }
    Ok(w)
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassEntry {
    pub key: String,
    #[serde(skip)]
    pub class_key: ClassKey,
    pub representative: Vec<Vec<i64>>,
    pub depth: usize,
}

/// Classes met by a breadth-first walk of the mutation class.
#[derive(Debug, Clone, Serialize)]
pub struct ClassIndex {
    pub classes: Vec<ClassEntry>,
    pub finite: bool,
    pub max_depth: usize,
    pub max_classes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl ClassIndex {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn depth_of(&self, key: &ClassKey) -> Option<usize> {
        self.classes.iter().find(|c| c.class_key == *key).map(|c| c.depth)
    }
}

/// Breadth-first enumeration of classes, optionally along sink/source steps only.
pub fn enumerate_classes(b0: &ExchangeMatrix, max_depth: usize, max_classes: usize, ss: bool) -> ClassIndex {
    let n = b0.n();
    let mut seen: HashMap<ClassKey, usize> = HashMap::new();
    let root_key = b0.class_key();
    seen.insert(root_key.clone(), 0);
    let mut classes = vec![ClassEntry {
        key: root_key.short(),
        class_key: root_key,
        representative: b0.rows(),
        depth: 0,
    }];
    let mut frontier = vec![b0.clone()];
    let mut depth = 0;
    let mut diagnostic = None;
    let mut finite = true;
    let mut overflows = 0usize;
    while !frontier.is_empty() {
        if depth == max_depth {
            finite = false;
            break;
        }
        let expanded: Vec<Vec<Result<(ClassKey, ExchangeMatrix)>>> = frontier
            .par_iter()
            .map(|m| {
                (1..=n)
                    .filter(|&k| !ss || ss_step(m, k))
                    .map(|k| m.mutate(k).map(|next| (next.class_key(), next)))
                    .collect()
            })
            .collect();
        depth += 1;
        let mut next_frontier = Vec::new();
        'merge: for batch in expanded {
            for item in batch {
                let (key, m) = match item {
                    Ok(x) => x,
                    Err(e) => {
                        // an overflowing branch is dropped; the rest is still explored
                        overflows += 1;
                        finite = false;
                        diagnostic = Some(format!("{e} ({overflows} branches dropped)"));
                        continue;
                    }
                };
                if seen.contains_key(&key) {
                    continue;
                }
                if classes.len() == max_classes {
                    finite = false;
                    diagnostic = Some(format!("class bound {max_classes} reached"));
                    break 'merge;
                }
                seen.insert(key.clone(), classes.len());
                classes.push(ClassEntry { key: key.short(), class_key: key, representative: m.rows(), depth });
                next_frontier.push(m);
            }
        }
        if classes.len() == max_classes && !finite {
            break;
        }
        frontier = next_frontier;
    }
    ClassIndex { classes, finite, max_depth, max_classes, diagnostic }
}

/// Breadth-first enumeration of `[B]` over all mutations.
pub fn enumerate_class(b0: &ExchangeMatrix, max_depth: usize, max_classes: usize) -> ClassIndex {
    enumerate_classes(b0, max_depth, max_classes, false)
}

/// `G₀(t₀)`: every `(σ, ε)` with `σ(B) = εB`, sorted by `σ` then sign.
pub fn compute_g0(pattern: &Arc<ClusterPattern>) -> Vec<AutQuad> {
    let b = pattern.root_matrix();
    let mut out: Vec<AutQuad> = Vec::new();
    for (negate, sign) in [(false, Sign::Plus), (true, Sign::Minus)] {
        for sigma in b.isomorphisms_to(b, negate, None) {
            out.push(AutQuad::new(pattern, TreePath::empty(), sigma, sign).expect("isomorphism is valid"));
        }
    }
    out.sort_by(|a, b| (a.sigma(), a.sign()).cmp(&(b.sigma(), b.sign())));
    out
}

/// All `𝒫₁` paths of length at most `max_len`, in lexicographic order.
pub fn enumerate_p1(b0: &ExchangeMatrix, max_len: usize, ss: bool) -> Result<Vec<TreePath>> {
    let root = ClassTester::new(b0);
    let n = b0.n();
    let firsts: Vec<Result<Vec<TreePath>>> = (1..=n)
        .into_par_iter()
        .map(|k| {
            let mut out = Vec::new();
            if max_len == 0 || (ss && !ss_step(b0, k)) {
                return Ok(out);
            }
            let m = b0.mutate(k)?;
            let mut path = vec![k];
            if root.contains(&m) {
                out.push(TreePath::new(path)?);
            } else {
                p1_dfs(&m, &mut path, max_len, ss, &root, &mut out)?;
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for part in firsts {
        all.extend(part?);
    }
    Ok(all)
}

fn p1_dfs(
    m: &ExchangeMatrix,
    path: &mut Vec<usize>,
    max_len: usize,
    ss: bool,
    root: &ClassTester,
    out: &mut Vec<TreePath>,
) -> Result<()> {
    if path.len() >= max_len {
        return Ok(());
    }
    let last = *path.last().expect("nonempty");
    for k in 1..=m.n() {
        if k == last || (ss && !ss_step(m, k)) {
            continue;
        }
        let next = m.mutate(k)?;
        path.push(k);
        if root.contains(&next) {
            out.push(TreePath::new(path.clone())?);
        } else {
            p1_dfs(&next, path, max_len, ss, root, out)?;
        }
        path.pop();
    }
    Ok(())
}

/// Classes met by `𝒫₁` paths up to `max_len`; a lower bound for `ℬ` in general.
pub fn compute_b_set(b0: &ExchangeMatrix, max_len: usize, ss: bool) -> Result<Vec<ClassKey>> {
    let root_key = b0.class_key();
    let mut out = vec![];
    let paths = enumerate_p1(b0, max_len, ss)?;
    if !paths.is_empty() {
        out.push(root_key.clone());
    }
    for p in paths {
        let mut m = b0.clone();
        for &k in p.labels() {
            m = m.mutate(k)?;
            let key = m.class_key();
            if !out.contains(&key) {
                out.push(key);
            }
        }
    }
    Ok(out)
}

/// Exact `ℬ` obtained by closing the graph of states `(B_t, last step)`.
#[derive(Debug, Clone)]
pub struct BClosure {
    /// Root class first, then the others in order of discovery.
    pub classes: Vec<ClassKey>,
    pub states: usize,
}

/// Computes `ℬ` (or `ℬˢˢ`) exactly. The state of a tree vertex for the
/// purpose of extending reduced paths is its labeled matrix together with
/// the label of the step that reached it, so the tree walk collapses to a
/// finite graph whenever finitely many labeled matrices are reachable.
pub fn b_closure(b0: &ExchangeMatrix, ss: bool, max_states: usize) -> Result<BClosure> {
    let n = b0.n();
    let root = ClassTester::new(b0);
    let mut index: HashMap<(ExchangeMatrix, usize), usize> = HashMap::new();
    let mut states: Vec<(ExchangeMatrix, usize)> = vec![(b0.clone(), 0)];
    let mut is_root: Vec<bool> = vec![true];
    let mut rev: Vec<Vec<usize>> = vec![Vec::new()];
    index.insert((b0.clone(), 0), 0);
    let mut queue = VecDeque::from([0usize]);
    let mut class_cache: HashMap<ExchangeMatrix, bool> = HashMap::new();
    while let Some(s) = queue.pop_front() {
        if s != 0 && is_root[s] {
            continue;
        }
        let (m, last) = states[s].clone();
        for k in 1..=n {
            if k == last || (ss && !ss_step(&m, k)) {
                continue;
            }
            let next = m.mutate(k)?;
            let state = (next, k);
            let id = match index.get(&state) {
                Some(&id) => id,
                None => {
                    if states.len() == max_states {
                        return Err(Error::ResourceBound(format!(
                            "more than {max_states} labeled states while closing the class set"
                        )));
                    }
                    let id = states.len();
                    let r = *class_cache.entry(state.0.clone()).or_insert_with(|| root.contains(&state.0));
                    index.insert(state.clone(), id);
                    states.push(state);
                    is_root.push(r);
                    rev.push(Vec::new());
                    queue.push_back(id);
                    id
                }
            };
            rev[id].push(s);
        }
    }
    // states that reach a root-class state other than the start
    let mut good = vec![false; states.len()];
    let mut back: VecDeque<usize> = (1..states.len()).filter(|&s| is_root[s]).collect();
    for &s in &back {
        good[s] = true;
    }
    while let Some(s) = back.pop_front() {
        for &p in &rev[s] {
            if !good[p] {
                good[p] = true;
                back.push_back(p);
            }
        }
    }
    let mut classes = Vec::new();
    if good[0] {
        classes.push(root.key().clone());
    }
    let mut seen_keys: HashMap<ClassKey, ()> = HashMap::new();
    seen_keys.insert(root.key().clone(), ());
    let mut order: Vec<usize> = (0..states.len()).filter(|&s| good[s] && !is_root[s]).collect();
    order.sort_unstable();
    for s in order {
        let key = states[s].0.class_key();
        if seen_keys.insert(key.clone(), ()).is_none() {
            classes.push(key);
        }
    }
    Ok(BClosure { classes, states: states.len() })
}

/// Shortest sink-source path from the root to a matrix of class `target`.
pub fn find_sink_source_representative(b0: &ExchangeMatrix, target: &ClassKey, max_len: usize) -> Result<TreePath> {
    if b0.class_key() == *target {
        return Ok(TreePath::empty());
    }
    let n = b0.n();
    let mut seen: HashMap<ExchangeMatrix, ()> = HashMap::new();
    seen.insert(b0.clone(), ());
    let mut frontier = vec![(b0.clone(), TreePath::empty())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (m, p) in &frontier {
            for k in 1..=n {
                if p.last() == Some(k) || !ss_step(m, k) {
                    continue;
                }
                let mm = m.mutate(k)?;
                if seen.insert(mm.clone(), ()).is_some() {
                    continue;
                }
                let mut pp = p.clone();
                pp.push(k);
                if mm.class_key() == *target {
                    return Ok(pp);
                }
                next.push((mm, pp));
            }
        }
        frontier = next;
    }
    Err(Error::NotFound { what: "sink-source path to the target class".into(), bound: max_len })
}

/// The chosen automorphism `f_{p(t₀,t)}`: least `σ` image list, then `+` before `−`.
pub fn tie_break(pattern: &Arc<ClusterPattern>, path: &TreePath) -> Result<Option<AutQuad>> {
    let b0 = pattern.root_matrix();
    let bt = pattern.matrix_at(path)?;
    let plus = b0.isomorphisms_to(&bt, false, Some(1)).into_iter().next();
    let minus = b0.isomorphisms_to(&bt, true, Some(1)).into_iter().next();
    let choice = match (plus, minus) {
        (Some(p), Some(m)) if m < p => Some((m, Sign::Minus)),
        (Some(p), _) => Some((p, Sign::Plus)),
        (None, Some(m)) => Some((m, Sign::Minus)),
        (None, None) => None,
    };
    choice.map(|(s, e)| AutQuad::new(pattern, path.clone(), s, e)).transpose()
}

/// Machine-checkable summary of a generator extraction.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Certificate {
    pub b_set_complete: bool,
    pub classes: Vec<String>,
    pub l_values: Vec<usize>,
    pub l: usize,
    pub max_len: usize,
    pub p1_count: usize,
    pub p1_lengths: BTreeMap<usize, usize>,
    pub h1_before_dedup: usize,
    pub h1_count: usize,
    pub g0_order: usize,
    pub states_explored: usize,
}

/// `G₀(t₀) ∪ H₁^{<2l+2}` together with the data needed to reduce long
/// automorphisms to these generators.
#[derive(Debug, Clone)]
pub struct Generators {
    pub mode: Mode,
    pub pattern: Arc<ClusterPattern>,
    pub g0: Vec<AutQuad>,
    pub h1: Vec<AutQuad>,
    /// `ℬ` with the root class first.
    pub classes: Vec<ClassKey>,
    /// `l_i` for every non-root class of `ℬ`, aligned with `classes[1..]`.
    pub l_values: Vec<usize>,
    pub l: usize,
    pub p1_paths: Vec<TreePath>,
    path_to_gen: HashMap<TreePath, usize>,
    pub certificate: Certificate,
}

/// Bounds for [`extract_generators`].
#[derive(Debug, Clone, Copy)]
pub struct SearchBounds {
    pub max_depth: usize,
    pub max_classes: usize,
    pub max_states: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { max_depth: 10, max_classes: 100_000, max_states: 2_000_000 }
    }
}

/// Runs the generator extraction in the given mode.
pub fn extract_generators(pattern: &Arc<ClusterPattern>, mode: Mode, bounds: SearchBounds) -> Result<Generators> {
    let b0 = pattern.root_matrix().clone();
    let ss = mode.sink_source_only();
    let (classes, complete, states, class_depths) = match mode {
        Mode::FiniteMutation => {
            let idx = enumerate_class(&b0, bounds.max_depth, bounds.max_classes);
            if !idx.finite {
                return Err(Error::ModeUnavailable(format!(
                    "mutation class did not close within depth {} and {} classes{}",
                    bounds.max_depth,
                    bounds.max_classes,
                    idx.diagnostic.map(|d| format!(" ({d})")).unwrap_or_default()
                )));
            }
            let closure = b_closure(&b0, false, bounds.max_states)?;
            (closure.classes, true, closure.states, idx)
        }
        Mode::AcyclicSinkSource => {
            if !b0.is_acyclic() {
                return Err(Error::ModeUnavailable("root exchange matrix is not acyclic".into()));
            }
            let closure = b_closure(&b0, true, bounds.max_states)?;
            let idx = enumerate_classes(&b0, usize::MAX, bounds.max_classes, true);
            (closure.classes, true, closure.states, idx)
        }
        Mode::Bounded(len) => {
            let classes = compute_b_set(&b0, len, false)?;
            let idx = enumerate_class(&b0, bounds.max_depth, bounds.max_classes);
            (classes, false, 0, idx)
        }
    };
    let mut l_values = Vec::new();
    for key in classes.iter().skip(1) {
        let d = class_depths.depth_of(key).ok_or_else(|| Error::NotFound {
            what: format!("distance to class {}", key.short()),
            bound: bounds.max_depth,
        })?;
        l_values.push(d);
    }
    let l = l_values.iter().copied().max().unwrap_or(0);
    let max_len = 2 * l + 1;
    let p1_paths = enumerate_p1(&b0, max_len, ss)?;
    let g0 = compute_g0(pattern);
    let mut h1: Vec<AutQuad> = Vec::new();
    let mut path_to_gen = HashMap::new();
    let mut buckets: HashMap<crate::autom::Fingerprint, Vec<usize>> = HashMap::new();
    for p in &p1_paths {
        let f = tie_break(pattern, p)?.ok_or_else(|| {
            Error::InvalidAut(format!("path [{p}] ends in the root class but admits no automorphism"))
        })?;
        let fp = f.fingerprint()?;
        let mut found = None;
        if let Some(cands) = buckets.get(&fp) {
            for &c in cands {
                if h1[c].aut_equal(&f)? {
                    found = Some(c);
                    break;
                }
            }
        }
        let idx = match found {
            Some(c) => c,
            None => {
                h1.push(f);
                buckets.entry(fp).or_default().push(h1.len() - 1);
                h1.len() - 1
            }
        };
        path_to_gen.insert(p.clone(), idx);
    }
    let mut p1_lengths = BTreeMap::new();
    for p in &p1_paths {
        *p1_lengths.entry(p.len()).or_insert(0) += 1;
    }
    let certificate = Certificate {
        b_set_complete: complete,
        classes: classes.iter().map(|k| k.short()).collect(),
        l_values: l_values.clone(),
        l,
        max_len,
        p1_count: p1_paths.len(),
        p1_lengths,
        h1_before_dedup: p1_paths.len(),
        h1_count: h1.len(),
        g0_order: g0.len(),
        states_explored: states,
    };
    Ok(Generators {
        mode,
        pattern: pattern.clone(),
        g0,
        h1,
        classes,
        l_values,
        l,
        p1_paths,
        path_to_gen,
        certificate,
    })
}

/// A word over `Generators::all()`: letters are indices with exponent ±1,
/// evaluated as the composition `w₁ ∘ w₂ ∘ ⋯`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct GenWord(pub Vec<(usize, i8)>);

impl GenWord {
    fn append(&mut self, other: GenWord) {
        for letter in other.0 {
            if let Some(&(g, e)) = self.0.last() {
                if g == letter.0 && e == -letter.1 {
                    self.0.pop();
                    continue;
                }
            }
            self.0.push(letter);
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Named generator dump for reports.
#[derive(Debug, Clone, Serialize)]
pub struct NamedAut {
    pub name: String,
    pub kind: &'static str,
    #[serde(flatten)]
    pub aut: AutDump,
}

/// Report emitted by the `generators` command.
#[derive(Debug, Clone, Serialize)]
pub struct GeneratorReport {
    pub mode: String,
    pub classes: usize,
    pub l: usize,
    #[serde(rename = "G0_order")]
    pub g0_order: usize,
    #[serde(rename = "H1_count")]
    pub h1_count: usize,
    pub generators: Vec<NamedAut>,
    pub certificate: Certificate,
}

impl Generators {
    /// `G₀` followed by `H₁`.
    pub fn all(&self) -> Vec<&AutQuad> {
        self.g0.iter().chain(self.h1.iter()).collect()
    }

    /// `z0, z1, …` for `G₀` (with `z0` the identity) and `h1, h2, …` for `H₁`.
    pub fn name(&self, idx: usize) -> String {
        if idx < self.g0.len() {
            format!("z{idx}")
        } else {
            format!("h{}", idx - self.g0.len() + 1)
        }
    }

    pub fn report(&self) -> GeneratorReport {
        let generators = self
            .all()
            .into_iter()
            .enumerate()
            .map(|(i, g)| NamedAut {
                name: self.name(i),
                kind: if i < self.g0.len() { "G0" } else { "H1" },
                aut: g.dump(),
            })
            .collect();
        GeneratorReport {
            mode: self.mode.name(),
            classes: self.classes.len(),
            l: self.l,
            g0_order: self.g0.len(),
            h1_count: self.h1.len(),
            generators,
            certificate: self.certificate.clone(),
        }
    }

    pub fn evaluate(&self, word: &GenWord) -> Result<AutQuad> {
        let all = self.all();
        let mut acc = AutQuad::identity(&self.pattern);
        for &(g, e) in word.0.iter().rev() {
            let letter = if e < 0 { all[g].inverse() } else { all[g].clone() };
            acc = letter.compose(&acc)?;
        }
        Ok(acc)
    }

    fn g0_index(&self, f: &AutQuad) -> Result<usize> {
        debug_assert!(f.path().is_empty());
        self.g0
            .iter()
            .position(|z| z.sigma() == f.sigma() && z.sign() == f.sign())
            .or_else(|| self.g0.iter().position(|z| z.sigma() == f.sigma()))
            .ok_or_else(|| Error::ReductionFailed(format!("{f:?} is not in G0")))
    }

    fn g0_word(&self, f: &AutQuad) -> Result<GenWord> {
        let i = self.g0_index(f)?;
        Ok(if f.sigma().is_identity() { GenWord::default() } else { GenWord(vec![(i, 1)]) })
    }

    /// Expresses `f` as a word in the generators by the constructive
    /// induction: split at interior root-class vertices, and cut long `𝒫₁`
    /// paths at a midpoint through a nearby root-class vertex.
    pub fn reduce_to_generators(&self, f: &AutQuad) -> Result<GenWord> {
        if f.pattern().id() != self.pattern.id() {
            return Err(Error::PatternMismatch);
        }
        let word = self.reduce(f)?;
        debug_assert!(self.evaluate(&word)?.aut_equal(f)?, "reduction produced a wrong word");
        Ok(word)
    }

    fn reduce(&self, f: &AutQuad) -> Result<GenWord> {
        if f.path().is_empty() {
            return self.g0_word(f);
        }
        let b0 = self.pattern.root_matrix();
        let ss = self.mode.sink_source_only();
        if ss && !is_sink_source_path(b0, f.path())? {
            return self.reduce_via_sink_source(f);
        }
        let root = ClassTester::new(b0);
        let mut m = b0.clone();
        let labels = f.path().labels();
        for (i, &k) in labels.iter().enumerate() {
            m = m.mutate(k)?;
            if i + 1 < labels.len() && root.contains(&m) {
                let g = self.chosen(&f.path().prefix(i + 1))?;
                let h = f.factor_through(&g)?;
                let mut w = self.reduce_p1(&g)?;
                w.append(self.reduce(&h)?);
                return Ok(w);
            }
        }
        if !root.contains(&m) {
            return Err(Error::ReductionFailed(format!("path [{}] does not end in the root class", f.path())));
        }
        self.reduce_p1(f)
    }

    fn chosen(&self, path: &TreePath) -> Result<AutQuad> {
        tie_break(&self.pattern, path)?
            .ok_or_else(|| Error::ReductionFailed(format!("no automorphism along [{path}]")))
    }

    fn reduce_p1(&self, f: &AutQuad) -> Result<GenWord> {
        let len = f.path().len();
        let l = self.l;
        if len < 2 * l + 2 {
            let idx = *self.path_to_gen.get(f.path()).ok_or_else(|| {
                Error::ReductionFailed(format!("path [{}] missing from the enumerated generators", f.path()))
            })?;
            let g = &self.h1[idx];
            let z = f.factor_through(g)?;
            if !z.path().is_empty() {
                // the representative has a different path; compare as maps
                for (i, cand) in self.g0.iter().enumerate() {
                    if z.aut_equal(cand)? {
                        let mut w = GenWord(vec![(self.g0.len() + idx, 1)]);
                        if !cand.sigma().is_identity() {
                            w.append(GenWord(vec![(i, 1)]));
                        }
                        return Ok(w);
                    }
                }
                return Err(Error::ReductionFailed(format!("path [{}] not matched by its generator", f.path())));
            }
            let mut w = GenWord(vec![(self.g0.len() + idx, 1)]);
            w.append(self.g0_word(&z)?);
            return Ok(w);
        }
        let mid = len / 2;
        let prefix = f.path().prefix(mid);
        let m_mid = self.pattern.matrix_at(&prefix)?;
        let key = m_mid.class_key();
        let bound = self
            .classes
            .iter()
            .skip(1)
            .position(|c| *c == key)
            .map(|i| self.l_values[i])
            .unwrap_or(l);
        let q = self.nearest_root(&m_mid, bound)?;
        let s = prefix.concat(&q);
        let g = self.chosen(&s)?;
        let h = f.factor_through(&g)?;
        if g.path().len() >= len || h.path().len() >= len {
            return Err(Error::ReductionFailed(format!("cut at [{s}] does not shorten [{}]", f.path())));
        }
        let mut w = self.reduce(&g)?;
        w.append(self.reduce(&h)?);
        Ok(w)
    }

    /// Shortest path (sink-source in that mode) from `m` to the root class.
    fn nearest_root(&self, m: &ExchangeMatrix, bound: usize) -> Result<TreePath> {
        let root = ClassTester::new(self.pattern.root_matrix());
        let ss = self.mode.sink_source_only();
        let mut frontier = vec![(m.clone(), TreePath::empty())];
        for _ in 0..bound {
            let mut next = Vec::new();
            for (mm, p) in &frontier {
                for k in 1..=m.n() {
                    if p.last() == Some(k) || (ss && !ss_step(mm, k)) {
                        continue;
                    }
                    let nm = mm.mutate(k)?;
                    let mut np = p.clone();
                    np.push(k);
                    if root.contains(&nm) {
                        return Ok(np);
                    }
                    next.push((nm, np));
                }
            }
            frontier = next;
        }
        Err(Error::ReductionFailed(format!("no root-class vertex within distance {bound}")))
    }

    /// Acyclic case for a path that is not sink-source: find a sink-source
    /// path reaching the same unlabeled seed, then the rest lies in `G₀`.
    fn reduce_via_sink_source(&self, f: &AutQuad) -> Result<GenWord> {
        let b0 = self.pattern.root_matrix();
        let target = self.pattern.matrix_at(f.path())?.class_key();
        let n = b0.n();
        let bound = f.path().len() + 2 * self.l + 2;
        let mut frontier = vec![(b0.clone(), TreePath::empty())];
        for depth in 0..=bound {
            for (m, p) in &frontier {
                if m.class_key() != target {
                    continue;
                }
                let g = self.chosen(p)?;
                let h = f.factor_through(&g)?;
                for (i, z) in self.g0.iter().enumerate() {
                    if h.aut_equal(z)? {
                        let mut w = self.reduce(&g)?;
                        if !z.sigma().is_identity() {
                            w.append(GenWord(vec![(i, 1)]));
                        }
                        return Ok(w);
                    }
                }
            }
            if depth == bound {
                break;
            }
            let mut next = Vec::new();
            for (m, p) in &frontier {
                for k in 1..=n {
                    if p.last() == Some(k) || !ss_step(m, k) {
                        continue;
                    }
                    let mut np = p.clone();
                    np.push(k);
                    next.push((m.mutate(k)?, np));
                }
            }
            frontier = next;
        }
        Err(Error::ReductionFailed(format!(
            "no sink-source path within length {bound} reaches the seed of [{}]",
            f.path()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn weights() {
        let b = catalog::rank3_weighted();
        let key = b.class_key();
        assert_eq!(path_weight(&b, &TreePath::empty(), &key).unwrap(), 1);
        assert_eq!(path_weight(&b, &TreePath::parse("2,1,3").unwrap(), &key).unwrap(), 2);
        let other = catalog::x7().class_key();
        assert_eq!(path_weight(&b, &TreePath::parse("2,1,3").unwrap(), &other).unwrap(), 0);
    }

    #[test]
    fn class_enumeration() {
        let x7 = enumerate_class(&catalog::x7(), 10, 100_000);
        assert!(x7.finite);
        assert_eq!(x7.len(), 2);
        let a2 = enumerate_class(&catalog::a2(), 3, 100);
        assert!(a2.finite);
        assert_eq!(a2.len(), 1);
    }

    #[test]
    fn g0_orders() {
        let p = ClusterPattern::new(catalog::x7());
        assert_eq!(compute_g0(&p).len(), 12);
        let p = ClusterPattern::new(catalog::chain4_distinct());
        assert_eq!(compute_g0(&p).len(), 1);
        let p = ClusterPattern::new(catalog::rank3_weighted());
        assert_eq!(compute_g0(&p).len(), 1);
    }

    #[test]
    fn p1_rank3() {
        let paths = enumerate_p1(&catalog::rank3_weighted(), 6, true).unwrap();
        let labels: Vec<&[usize]> = paths.iter().map(|p| p.labels()).collect();
        assert_eq!(labels, vec![&[2, 1, 3][..], &[3, 1, 2][..]]);
    }

    #[test]
    fn sink_source_representatives() {
        let b = catalog::chain4_distinct();
        assert!(find_sink_source_representative(&b, &b.class_key(), 4).unwrap().is_empty());
        let b1 = b.mutate(4).unwrap();
        assert_eq!(find_sink_source_representative(&b, &b1.class_key(), 4).unwrap().len(), 1);
        let b2 = b1.mutate(3).unwrap();
        assert_eq!(find_sink_source_representative(&b, &b2.class_key(), 4).unwrap().len(), 2);
    }
}
