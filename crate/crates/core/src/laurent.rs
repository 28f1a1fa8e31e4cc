//! Sparse multivariate Laurent polynomials over ℤ.
//!
//! Terms are kept sorted ascending by exponent vector (lexicographic), with
//! no zero coefficients, so structural equality is polynomial equality.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Exponent = SmallVec<[i64; 8]>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    n: usize,
    terms: Vec<(Exponent, BigInt)>,
}

fn add_exp(a: &[i64], b: &[i64]) -> Exponent {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_add(*y).expect("Laurent exponent overflow"))
        .collect()
}

fn sub_exp(a: &[i64], b: &[i64]) -> Exponent {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_sub(*y).expect("Laurent exponent overflow"))
        .collect()
}

impl LaurentPoly {
    pub fn zero(n: usize) -> Self {
        LaurentPoly { n, terms: Vec::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, BigInt::one())
    }

    pub fn constant(n: usize, c: BigInt) -> Self {
        Self::monomial(n, Exponent::from_elem(0, n), c)
    }

    pub fn monomial(n: usize, exp: Exponent, c: BigInt) -> Self {
        assert_eq!(exp.len(), n, "exponent length differs from variable count");
        if c.is_zero() {
            return Self::zero(n);
        }
        LaurentPoly { n, terms: vec![(exp, c)] }
    }

    /// The variable `x_i`, 1-based.
    pub fn variable(n: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= n, "variable index {i} out of range 1..={n}");
        let mut e = Exponent::from_elem(0, n);
        e[i - 1] = 1;
        Self::monomial(n, e, BigInt::one())
    }

    /// Builds from arbitrary terms, merging duplicates and dropping zeros.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Exponent, BigInt)>) -> Self {
        let mut map: BTreeMap<Exponent, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), n, "exponent length differs from variable count");
            *map.entry(e).or_insert_with(BigInt::zero) += c;
        }
        LaurentPoly { n, terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Exponent, BigInt)] {
        &self.terms
    }

    /// Total degree spread, a rough size measure.
    pub fn max_abs_exponent(&self) -> i64 {
        self.terms.iter().flat_map(|(e, _)| e.iter().map(|v| v.abs())).max().unwrap_or(0)
    }

    pub fn checked_pow(&self, k: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one(self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    fn check_n(&self, other: &Self) {
        assert_eq!(self.n, other.n, "Laurent polynomials in different variable counts");
    }

    /// Exact quotient `self / q` in the Laurent ring.
    pub fn exact_div(&self, q: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_n(q);
        if q.is_zero() {
            return Err(Error::NonExactDivision);
        }
        if self.is_zero() {
            return Ok(LaurentPoly::zero(self.n));
        }
        if q.is_monomial() {
            let (qe, qc) = &q.terms[0];
            let mut out = Vec::with_capacity(self.terms.len());
            for (e, c) in &self.terms {
                let (quot, rem) = c.div_rem(qc);
                if !rem.is_zero() {
                    return Err(Error::NonExactDivision);
                }
                out.push((sub_exp(e, qe), quot));
            }
            // shifting by a fixed vector preserves the lexicographic order
            return Ok(LaurentPoly { n: self.n, terms: out });
        }
        let mp = self.min_exponents();
        let mq = q.min_exponents();
        let shift_p: BTreeMap<Exponent, BigInt> =
            self.terms.iter().map(|(e, c)| (sub_exp(e, &mp), c.clone())).collect();
        let q_terms: Vec<(Exponent, BigInt)> = q.terms.iter().map(|(e, c)| (sub_exp(e, &mq), c.clone())).collect();
        let (lq_e, lq_c) = q_terms.last().expect("nonzero").clone();
        let mut rem = shift_p;
        let mut quot: Vec<(Exponent, BigInt)> = Vec::new();
        while let Some((le, lc)) = rem.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            if le.iter().zip(&lq_e).any(|(a, b)| a < b) {
                return Err(Error::NonExactDivision);
            }
            let (qc, r) = lc.div_rem(&lq_c);
            if !r.is_zero() {
                return Err(Error::NonExactDivision);
            }
            let qe = sub_exp(&le, &lq_e);
            for (e, c) in &q_terms {
                let key = add_exp(e, &qe);
                let prod = c * &qc;
                match rem.get_mut(&key) {
                    Some(v) => {
                        *v -= prod;
                        if v.is_zero() {
                            rem.remove(&key);
                        }
                    }
                    None => {
                        rem.insert(key, -prod);
                    }
                }
            }
            quot.push((qe, qc));
        }
        let shift = sub_exp(&mp, &mq);
        quot.reverse();
        let terms = quot.into_iter().map(|(e, c)| (add_exp(&e, &shift), c)).collect();
        Ok(LaurentPoly { n: self.n, terms })
    }

    fn min_exponents(&self) -> Exponent {
        let mut m = self.terms[0].0.clone();
        for (e, _) in &self.terms[1..] {
            for (a, b) in m.iter_mut().zip(e) {
                if *b < *a {
                    *a = *b;
                }
            }
        }
        m
    }

    /// Evaluation modulo the prime `p` at a point given by the values of the
    /// variables and of their inverses.
    pub fn eval_mod(&self, values: &[u64], inverses: &[u64], p: u64) -> u64 {
        let mut acc: u128 = 0;
        let pb = BigInt::from(p);
        for (e, c) in &self.terms {
            let cm = c.mod_floor(&pb);
            let mut t: u128 = cm.try_into().expect("reduced below p");
            for (i, &k) in e.iter().enumerate() {
                if k != 0 {
                    let base = if k > 0 { values[i] } else { inverses[i] };
                    t = t * pow_mod(base, k.unsigned_abs(), p) as u128 % p as u128;
                }
            }
            acc = (acc + t) % p as u128;
        }
        acc as u64
    }

    /// Parses the text produced by `Display`.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut cur: Option<(Exponent, BigInt)> = None;
        let mut negate = false;
        for tok in text.split_whitespace() {
            match tok {
                "+" | "-" => {
                    terms.extend(cur.take());
                    negate = tok == "-";
                    continue;
                }
                "*" => continue,
                _ => {}
            }
            let (sign, body) = match tok.strip_prefix('-') {
                Some(rest) if !rest.is_empty() => (true, rest),
                _ => (false, tok),
            };
            let term = cur.get_or_insert_with(|| {
                let c = BigInt::from(if negate { -1 } else { 1 });
                negate = false;
                (Exponent::from_elem(0, n), c)
            });
            if sign {
                term.1 = -term.1.clone();
            }
            if body.starts_with(|c: char| c.is_ascii_digit()) {
                let c: BigInt = body.parse().map_err(|_| Error::Parse(format!("bad coefficient {tok:?}")))?;
                term.1 *= c;
                continue;
            }
            let (var, pow) = match body.split_once('^') {
                Some((v, p)) => (v, p.parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent in {tok:?}")))?),
                None => (body, 1),
            };
            let idx: usize = var
                .strip_prefix('x')
                .and_then(|s| s.parse().ok())
                .filter(|&i: &usize| i >= 1 && i <= n)
                .ok_or_else(|| Error::Parse(format!("bad variable {var:?}")))?;
            term.0[idx - 1] += pow;
        }
        terms.extend(cur);
        if terms.is_empty() {
            return Err(Error::Parse(format!("empty polynomial {text:?}")));
        }
        Ok(LaurentPoly::from_terms(n, terms))
    }
}

pub(crate) fn pow_mod(base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut b = base as u128 % p as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u128;
        }
        b = b * b % p as u128;
        exp >>= 1;
    }
    acc as u64
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k != 0)
                .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, k) })
                .collect();
            let mag = c.magnitude();
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if c.is_negative() { " - " } else { " + " })?;
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join(" "))?;
            } else {
                write!(f, "{mag} {}", factors.join(" "))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.check_n(rhs);
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < rhs.terms.len() {
            let (a, b) = (&self.terms[i], &rhs.terms[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &a.1 + &b.1;
                    if !c.is_zero() {
                        out.push((a.0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&rhs.terms[j..]);
        LaurentPoly { n: self.n, terms: out }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        LaurentPoly { n: self.n, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.check_n(rhs);
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero(self.n);
        }
        if self.is_monomial() || rhs.is_monomial() {
            let (m, other) = if self.is_monomial() { (self, rhs) } else { (rhs, self) };
            let (me, mc) = &m.terms[0];
            let terms = other.terms.iter().map(|(e, c)| (add_exp(e, me), c * mc)).collect();
            return LaurentPoly { n: self.n, terms };
        }
        let mut acc: HashMap<Exponent, BigInt> = HashMap::with_capacity((self.terms.len() * rhs.terms.len()).min(1 << 16));
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                *acc.entry(add_exp(ea, eb)).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        let mut terms: Vec<(Exponent, BigInt)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        LaurentPoly { n: self.n, terms }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;

            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;

    fn neg(mut self) -> LaurentPoly {
        for (_, c) in &mut self.terms {
            *c = -&*c;
        }
        self
    }
}

/// Helper for tests and fixtures: the coefficient of a given exponent.
impl LaurentPoly {
    pub fn coefficient(&self, exp: &[i64]) -> BigInt {
        self.terms
            .binary_search_by(|(e, _)| e.as_slice().cmp(exp))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| BigInt::zero())
    }

    pub fn is_positive(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_positive())
    }
}
