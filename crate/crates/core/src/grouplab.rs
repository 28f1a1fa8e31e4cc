//! Words over a set of named automorphisms: evaluation, relation discovery
//! in a Cayley ball, order bounds and relation checking.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::autom::{AutDump, AutQuad, Fingerprint};
use crate::error::{Error, Result};
use crate::search::Generators;
use crate::seeds::ClusterPattern;

/// A freely reduced word; letters are `(name, ±1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Word(Vec<(String, i8)>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(name: &str, exp: i8) -> Self {
        Word(vec![(name.to_string(), exp.signum())])
    }

    /// Builds a word and freely reduces it.
    pub fn from_letters(letters: impl IntoIterator<Item = (String, i8)>) -> Self {
        let mut out: Vec<(String, i8)> = Vec::new();
        for (name, e) in letters {
            if let Some((last, le)) = out.last() {
                if *last == name && *le == -e {
                    out.pop();
                    continue;
                }
            }
            out.push((name, e));
        }
        Word(out)
    }

    pub fn letters(&self) -> &[(String, i8)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|(n, e)| (n.clone(), -e)).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(other.0.iter()).cloned())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Parses whitespace-separated tokens `name`, `name^-1`, `name^k` and
    /// parenthesised groups `( … )^k`. `id` and the empty string denote the
    /// empty word.
    pub fn parse(text: &str) -> Result<Word> {
        let tokens = tokenize(text)?;
        let mut pos = 0;
        let w = parse_seq(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Parse(format!("unbalanced ')' in word {text:?}")));
        }
        Ok(w)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Open,
    Close,
    Pow(i64),
}

fn tokenize(text: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == '*' || c == '.' {
            i += 1;
        } else if c == '(' {
            out.push(Tok::Open);
            i += 1;
        } else if c == ')' {
            out.push(Tok::Close);
            i += 1;
        } else if c == '^' {
            i += 1;
            let braced = chars.get(i) == Some(&'{');
            if braced {
                i += 1;
            }
            let start = i;
            if matches!(chars.get(i), Some('-') | Some('+')) {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let k = s.parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent {s:?} in {text:?}")))?;
            if braced {
                if chars.get(i) != Some(&'}') {
                    return Err(Error::Parse(format!("missing '}}' in {text:?}")));
                }
                i += 1;
            }
            out.push(Tok::Pow(k));
        } else if c.is_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Name(chars[start..i].iter().collect()));
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in word {text:?}")));
        }
    }
    Ok(out)
}

fn parse_seq(tokens: &[Tok], pos: &mut usize) -> Result<Word> {
    let mut acc = Word::empty();
    while *pos < tokens.len() {
        let atom = match &tokens[*pos] {
            Tok::Name(n) => {
                *pos += 1;
                if n == "id" || n == "1" {
                    Word::empty()
                } else {
                    Word::letter(n, 1)
                }
            }
            Tok::Open => {
                *pos += 1;
                let inner = parse_seq(tokens, pos)?;
                if tokens.get(*pos) != Some(&Tok::Close) {
                    return Err(Error::Parse("missing ')'".into()));
                }
                *pos += 1;
                inner
            }
            Tok::Close => return Ok(acc),
            Tok::Pow(_) => return Err(Error::Parse("exponent without a base".into())),
        };
        let atom = match tokens.get(*pos) {
            Some(Tok::Pow(k)) => {
                *pos += 1;
                atom.pow(*k)
            }
            _ => atom,
        };
        acc = acc.concat(&atom);
    }
    Ok(acc)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "id");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let (name, e) = &self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            let k = (j - i) as i64 * i64::from(*e);
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if k == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{k}")?;
            }
            i = j;
        }
        Ok(())
    }
}

/// Named automorphisms of one pattern.
#[derive(Clone, Debug)]
pub struct GenSet {
    names: Vec<String>,
    auts: Vec<AutQuad>,
}

/// On-disk form of a named generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedDump {
    pub name: String,
    #[serde(flatten)]
    pub aut: AutDump,
}

impl GenSet {
    pub fn new(items: Vec<(String, AutQuad)>) -> Result<GenSet> {
        let mut names = Vec::new();
        let mut auts: Vec<AutQuad> = Vec::new();
        for (name, aut) in items {
            if name.is_empty() || name == "id" || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::Parse(format!("invalid generator name {name:?}")));
            }
            if names.contains(&name) {
                return Err(Error::Parse(format!("duplicate generator name {name:?}")));
            }
            if let Some(first) = auts.first() {
                if first.pattern().id() != aut.pattern().id() {
                    return Err(Error::PatternMismatch);
                }
            }
            names.push(name);
            auts.push(aut);
        }
        Ok(GenSet { names, auts })
    }

    /// All of `G₀ ∪ H₁` under the names `z…` and `h…`.
    pub fn from_generators(gens: &Generators) -> GenSet {
        let items = gens.all().into_iter().enumerate().map(|(i, g)| (gens.name(i), g.clone())).collect();
        GenSet::new(items).expect("generated names are valid")
    }

    pub fn from_dumps(pattern: &Arc<ClusterPattern>, dumps: &[NamedDump]) -> Result<GenSet> {
        let items = dumps
            .iter()
            .map(|d| Ok((d.name.clone(), AutQuad::from_dump(pattern, &d.aut)?)))
            .collect::<Result<Vec<_>>>()?;
        GenSet::new(items)
    }

    pub fn dumps(&self) -> Vec<NamedDump> {
        self.names.iter().zip(&self.auts).map(|(n, a)| NamedDump { name: n.clone(), aut: a.dump() }).collect()
    }

    /// Keeps only the listed names, in the given order.
    pub fn subset(&self, names: &[&str]) -> Result<GenSet> {
        let items = names
            .iter()
            .map(|n| Ok((n.to_string(), self.get(n)?.clone())))
            .collect::<Result<Vec<_>>>()?;
        GenSet::new(items)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn get(&self, name: &str) -> Result<&AutQuad> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.auts[i])
            .ok_or_else(|| Error::Parse(format!("unknown generator {name:?}")))
    }

    fn pattern(&self) -> Result<&Arc<ClusterPattern>> {
        self.auts
            .first()
            .map(|a| a.pattern())
            .ok_or_else(|| Error::Parse("empty generator set".into()))
    }
}

/// Evaluates `w₁ w₂ ⋯ w_k` as `w₁ ∘ w₂ ∘ ⋯ ∘ w_k`.
pub fn evaluate(word: &Word, gens: &GenSet) -> Result<AutQuad> {
    let mut acc = AutQuad::identity(gens.pattern()?);
    for (name, e) in word.letters().iter().rev() {
        let g = gens.get(name)?;
        let g = if *e < 0 { g.inverse() } else { g.clone() };
        acc = g.compose(&acc)?;
    }
    Ok(acc)
}

/// Outcome of [`order_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderBound {
    Exact(u64),
    Exceeds(u64),
}

impl fmt::Display for OrderBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderBound::Exact(k) => write!(f, "order {k}"),
            OrderBound::Exceeds(k) => write!(f, "order > {k}"),
        }
    }
}

/// Smallest `k ≤ max_pow` with `fᵏ = id`.
pub fn order_bound(f: &AutQuad, max_pow: u64) -> Result<OrderBound> {
    let mut acc = f.clone();
    for k in 1..=max_pow {
        if acc.is_identity()? {
            return Ok(OrderBound::Exact(k));
        }
        acc = f.compose(&acc)?;
    }
    Ok(OrderBound::Exceeds(max_pow))
}

/// Verdict of one relation check.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RelationCheck {
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

/// Parses one relation per line: `w₁ = w₂`, or `w` meaning `w = id`.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_relations(text: &str) -> Result<Vec<(Word, Word)>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(2, '=');
        let lhs = Word::parse(parts.next().unwrap_or(""))?;
        let rhs = match parts.next() {
            Some(r) => Word::parse(r)?,
            None => Word::empty(),
        };
        out.push((lhs, rhs));
    }
    Ok(out)
}

/// Compares both sides of each relation with [`AutQuad::aut_equal`].
pub fn verify_relations(gens: &GenSet, relations: &[(Word, Word)]) -> Result<Vec<RelationCheck>> {
    relations
        .iter()
        .map(|(l, r)| {
            let holds = evaluate(l, gens)?.aut_equal(&evaluate(r, gens)?)?;
            Ok(RelationCheck { lhs: l.to_string(), rhs: r.to_string(), holds })
        })
        .collect()
}

/// A relation found in the Cayley ball.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Relation {
    pub lhs: Word,
    pub rhs: Word,
    /// `lhs · rhs⁻¹`, cyclically reduced and normalised up to rotation and
    /// inversion, with inverses of known involutions dropped.
    pub relator: String,
    pub length: usize,
    pub verified: bool,
}

impl Relation {
    pub fn display(&self) -> String {
        format!("{} = {}", self.lhs, self.rhs)
    }
}

/// Result of [`relation_search`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationReport {
    pub generators: Vec<String>,
    pub max_len: usize,
    pub radius: usize,
    /// Number of elements of word length exactly `r`, for `r = 0..=radius`.
    pub sphere_sizes: Vec<usize>,
    /// Cumulative ball sizes.
    pub ball_sizes: Vec<usize>,
    /// The ball stopped growing before the radius was reached.
    pub closed: bool,
    pub relations: Vec<Relation>,
    pub orders: Vec<(String, OrderBound)>,
}

/// Options for [`relation_search`].
#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub max_len: usize,
    pub max_elements: usize,
    /// Relations assumed to hold; collisions they explain are not reported.
    pub known: Vec<(Word, Word)>,
}

impl SearchOptions {
    pub fn new(max_len: usize) -> Self {
        SearchOptions { max_len, max_elements: 1_000_000, known: Vec::new() }
    }
}

struct Ball {
    auts: Vec<AutQuad>,
    words: Vec<Vec<usize>>,
    // (vertex, letter) -> vertex
    edges: HashMap<(usize, usize), usize>,
}

impl Ball {
    fn define(&mut self, a: usize, letter: usize, b: usize) -> bool {
        if self.edges.contains_key(&(a, letter)) {
            debug_assert_eq!(self.edges[&(a, letter)], b, "inconsistent relation");
            return false;
        }
        self.edges.insert((a, letter), b);
        self.edges.insert((b, letter ^ 1), a);
        true
    }

    /// One deduction pass of `relator` from every vertex; returns whether an
    /// edge was added.
    fn scan(&mut self, relator: &[usize]) -> bool {
        let mut changed = false;
        for v in 0..self.auts.len() {
            let mut i = 0;
            let mut fwd = v;
            while i < relator.len() {
                match self.edges.get(&(fwd, relator[i])) {
                    Some(&w) => {
                        fwd = w;
                        i += 1;
                    }
                    None => break,
                }
            }
            if i == relator.len() {
                continue;
            }
            let mut j = relator.len();
            let mut back = v;
            while j > i {
                match self.edges.get(&(back, relator[j - 1] ^ 1)) {
                    Some(&w) => {
                        back = w;
                        j -= 1;
                    }
                    None => break,
                }
            }
            if j == i + 1 {
                changed |= self.define(fwd, relator[i], back);
            }
        }
        changed
    }

    fn deduce(&mut self, relators: &[Vec<usize>]) {
        loop {
            let mut changed = false;
            for r in relators {
                changed |= self.scan(r);
            }
            if !changed {
                break;
            }
        }
    }
}

fn letters_to_word(gens: &GenSet, letters: &[usize]) -> Word {
    Word::from_letters(letters.iter().map(|&l| (gens.names[l / 2].clone(), if l % 2 == 0 { 1 } else { -1 })))
}

fn word_to_letters(gens: &GenSet, w: &Word) -> Result<Vec<usize>> {
    w.letters()
        .iter()
        .map(|(n, e)| {
            let i = gens
                .names
                .iter()
                .position(|x| x == n)
                .ok_or_else(|| Error::Parse(format!("unknown generator {n:?}")))?;
            Ok(2 * i + usize::from(*e < 0))
        })
        .collect()
}

fn free_reduce(letters: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for l in letters {
        if out.last() == Some(&(l ^ 1)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn cyclic_reduce(mut r: Vec<usize>) -> Vec<usize> {
    while r.len() >= 2 && r[0] == r[r.len() - 1] ^ 1 {
        r.pop();
        r.remove(0);
    }
    r
}

/// Canonical rotation of `r` or its inverse: most positive letters, then least.
fn normalise_relator(r: &[usize]) -> Vec<usize> {
    let inv: Vec<usize> = r.iter().rev().map(|l| l ^ 1).collect();
    let mut best: Option<(usize, Vec<usize>)> = None;
    for base in [r.to_vec(), inv] {
        for s in 0..base.len().max(1) {
            let rot: Vec<usize> = base[s..].iter().chain(base[..s].iter()).copied().collect();
            let neg = rot.iter().filter(|l| *l % 2 == 1).count();
            let cand = (neg, rot);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.map(|b| b.1).unwrap_or_default()
}

fn relator_text(gens: &GenSet, r: &[usize]) -> String {
    let n = r.len();
    let period = (1..=n).find(|&p| n % p == 0 && (p..n).all(|i| r[i] == r[i - p])).unwrap_or(n);
    let base = letters_to_word(gens, &r[..period]);
    match (n / period.max(1), base.len()) {
        (1, _) => letters_to_word(gens, r).to_string(),
        (k, 1) => format!("{base}^{k}"),
        (k, _) => format!("({base})^{k}"),
    }
}

/// Breadth-first enumeration of the Cayley ball of radius `⌈max_len/2⌉`.
/// Elements are keyed by their evaluation fingerprint; every collision not
/// already implied by the relations found so far is reported and then
/// confirmed on Laurent images.
pub fn relation_search(gens: &GenSet, opts: &SearchOptions) -> Result<RelationReport> {
    if opts.max_len == 0 {
        return Err(Error::Parse("max_len must be positive".into()));
    }
    let pattern = gens.pattern()?.clone();
    let radius = opts.max_len.div_ceil(2);
    let letter_auts: Vec<AutQuad> = gens.auts.iter().flat_map(|g| [g.clone(), g.inverse()]).collect();
    let mut ball = Ball { auts: vec![AutQuad::identity(&pattern)], words: vec![vec![]], edges: HashMap::new() };
    let mut keys: HashMap<Fingerprint, usize> = HashMap::new();
    keys.insert(ball.auts[0].fingerprint()?, 0);
    let mut candidates: Vec<(usize, usize, usize)> = Vec::new();
    let mut sphere_sizes = vec![1];
    let mut frontier = vec![0usize];
    let mut closed = false;
    for depth in 1..=radius + 1 {
        let grow = depth <= radius;
        let products: Vec<Result<Vec<(usize, usize, AutQuad, Fingerprint)>>> = frontier
            .par_iter()
            .map(|&v| {
                let mut out = Vec::new();
                for (l, la) in letter_auts.iter().enumerate() {
                    if ball.words[v].last() == Some(&(l ^ 1)) {
                        continue;
                    }
                    let p = ball.auts[v].compose(la)?;
                    let fp = p.fingerprint()?;
                    out.push((v, l, p, fp));
                }
                Ok(out)
            })
            .collect();
        let mut next = Vec::new();
        let mut escaped = false;
        for batch in products {
            for (v, l, p, fp) in batch? {
                match keys.get(&fp) {
                    Some(&u) => candidates.push((v, l, u)),
                    None if grow => {
                        if ball.auts.len() == opts.max_elements {
                            return Err(Error::ResourceBound(format!(
                                "Cayley ball exceeds {} elements",
                                opts.max_elements
                            )));
                        }
                        let id = ball.auts.len();
                        let mut w = ball.words[v].clone();
                        w.push(l);
                        keys.insert(fp, id);
                        ball.auts.push(p);
                        ball.words.push(w);
                        ball.define(v, l, id);
                        next.push(id);
                    }
                    None => escaped = true,
                }
            }
        }
        if !grow {
            closed = !escaped;
            break;
        }
        sphere_sizes.push(next.len());
        if next.is_empty() {
            closed = true;
            // products of the last sphere were all collisions already
            break;
        }
        frontier = next;
    }
    while sphere_sizes.len() < radius + 1 {
        sphere_sizes.push(0);
    }

    let mut relators: Vec<Vec<usize>> = Vec::new();
    for (l, r) in &opts.known {
        let rel = cyclic_reduce(free_reduce(
            word_to_letters(gens, l)?.into_iter().chain(word_to_letters(gens, &r.inverse())?),
        ));
        if !rel.is_empty() {
            relators.push(rel);
        }
    }
    ball.deduce(&relators);
    let mut accepted: Vec<(usize, usize, usize)> = Vec::new();
    for &(v, l, u) in &candidates {
        if ball.edges.get(&(v, l)) == Some(&u) {
            continue;
        }
        let rel = cyclic_reduce(free_reduce(
            ball.words[v].iter().copied().chain([l]).chain(ball.words[u].iter().rev().map(|x| x ^ 1)),
        ));
        ball.define(v, l, u);
        relators.push(rel);
        ball.deduce(&relators);
        accepted.push((v, l, u));
    }
    let mut involutions = vec![false; gens.len()];
    let mut relator_texts = Vec::new();
    for &(v, l, u) in &accepted {
        let rel = cyclic_reduce(free_reduce(
            ball.words[v].iter().copied().chain([l]).chain(ball.words[u].iter().rev().map(|x| x ^ 1)),
        ));
        let simplified: Vec<usize> = rel.iter().map(|&x| if involutions[x / 2] { x & !1 } else { x }).collect();
        let norm = normalise_relator(&simplified);
        if norm.len() == 2 && norm[0] == norm[1] {
            involutions[norm[0] / 2] = true;
        }
        relator_texts.push(relator_text(gens, &norm));
    }
    let relations: Vec<Result<Relation>> = accepted
        .par_iter()
        .zip(relator_texts)
        .map(|(&(v, l, u), relator)| {
            let mut lw = ball.words[v].clone();
            lw.push(l);
            let length = lw.len() + ball.words[u].len();
            let verified = ball.auts[v].compose(&letter_auts[l])?.aut_equal(&ball.auts[u])?;
            Ok(Relation {
                lhs: letters_to_word(gens, &lw),
                rhs: letters_to_word(gens, &ball.words[u]),
                relator,
                length,
                verified,
            })
        })
        .collect();
    let relations = relations.into_iter().collect::<Result<Vec<_>>>()?;
    let mut ball_sizes = Vec::new();
    let mut total = 0;
    for s in &sphere_sizes {
        total += s;
        ball_sizes.push(total);
    }
    let orders = gens
        .names
        .iter()
        .zip(&gens.auts)
        .map(|(n, g)| Ok((n.clone(), order_bound(g, opts.max_len as u64)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RelationReport {
        generators: gens.names.clone(),
        max_len: opts.max_len,
        radius,
        sphere_sizes,
        ball_sizes,
        closed,
        relations,
        orders,
    })
}

/// Sphere sizes grow at most linearly: constant from radius 2 on.
pub fn linear_growth(report: &RelationReport) -> bool {
    let s = &report.sphere_sizes;
    s.len() >= 3 && s[2..].windows(2).all(|w| w[0] == w[1]) && s[2] > 0
}

/// One row of the exploratory scan of `W_k = (a f^{2k})^k (a f^{-2k})^k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternObservation {
    pub k: u32,
    pub predicted: String,
    pub word_is_identity: bool,
    pub cube_is_identity: bool,
    pub path_len: usize,
}

/// Evaluates `W_k` and `W_k³` for `k = 1..=k_max`. The prediction column
/// is `"W^3 = id"` for `k ≡ 1, 5 (mod 6)` and `"W = id"` otherwise; the
/// results are observations only.
pub fn scan_x7_pattern(gens: &GenSet, k_max: u32) -> Result<Vec<PatternObservation>> {
    (1..=k_max)
        .map(|k| {
            let k2 = 2 * i64::from(k);
            let w = Word::parse(&format!("(a f^{k2})^{k}"))?.concat(&Word::parse(&format!("(a f^{})^{k}", -k2))?);
            let e = evaluate(&w, gens)?;
            let word_is_identity = e.is_identity()?;
            let cube_is_identity = word_is_identity || e.pow(3)?.is_identity()?;
            let predicted = if k % 6 == 1 || k % 6 == 5 { "W^3 = id" } else { "W = id" };
            Ok(PatternObservation {
                k,
                predicted: predicted.into(),
                word_is_identity,
                cube_is_identity,
                path_len: e.path().len(),
            })
        })
        .collect()
}
