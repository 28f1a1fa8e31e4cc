//! Cluster automorphisms as quadruples `(t₀, t, σ, ε)` over a fixed root.
//!
//! An [`AutQuad`] stores the path from the root to `t`, the permutation `σ`
//! and the sign `ε`, subject to `σ(B_{t₀}) = ε B_t`. The induced algebra map
//! sends `x_i` to `x_{σ(i);t}`.
//!
//! Equality of maps is decided in stages. A C-matrix key (when enabled on
//! the pattern) and a modular evaluation fingerprint can only prove
//! inequality; a positive answer always comes from exact Laurent
//! arithmetic, run meet-in-the-middle so that only half of the path is
//! expanded from each side.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::perm::Perm;
use crate::seeds::{eval_point, CMatrix, ClusterPattern, TreePath};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn mul(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn parse(text: &str) -> Result<Sign> {
        match text.trim() {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            other => Err(Error::Parse(format!("bad sign {other:?}, expected \"+\" or \"-\""))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Sign::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serialized form of an automorphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutDump {
    pub path: TreePath,
    #[serde(default, skip_deserializing)]
    pub subscript: String,
    pub sigma: Perm,
    pub sign: Sign,
}

/// Invariant of the map used to rule out equality cheaply.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub sign: Option<Sign>,
    pub values: [Option<Vec<u64>>; 2],
}

#[derive(Clone)]
pub struct AutQuad {
    pattern: Arc<ClusterPattern>,
    path: TreePath,
    sigma: Perm,
    sign: Sign,
    images: OnceLock<Vec<Arc<LaurentPoly>>>,
}

impl AutQuad {
    /// Validates `σ(B_{t₀}) = ε B_t`.
    pub fn new(pattern: &Arc<ClusterPattern>, path: TreePath, sigma: Perm, sign: Sign) -> Result<AutQuad> {
        let n = pattern.n();
        if sigma.n() != n {
            return Err(Error::Dimension(format!("permutation of {} points for rank {n}", sigma.n())));
        }
        let bt = pattern.matrix_at(&path)?;
        let lhs = pattern.root_matrix().permute(&sigma);
        let rhs = if sign == Sign::Plus { bt } else { bt.neg() };
        if lhs != rhs {
            return Err(Error::InvalidAut(format!(
                "sigma = {sigma}, sign {sign} does not map B_t0 to sign * B_t at path [{path}]"
            )));
        }
        Ok(Self::unchecked(pattern, path, sigma, sign))
    }

    fn unchecked(pattern: &Arc<ClusterPattern>, path: TreePath, sigma: Perm, sign: Sign) -> AutQuad {
        AutQuad { pattern: pattern.clone(), path, sigma, sign, images: OnceLock::new() }
    }

    pub fn identity(pattern: &Arc<ClusterPattern>) -> AutQuad {
        Self::unchecked(pattern, TreePath::empty(), Perm::identity(pattern.n()), Sign::Plus)
    }

    pub fn from_dump(pattern: &Arc<ClusterPattern>, dump: &AutDump) -> Result<AutQuad> {
        Self::new(pattern, dump.path.clone(), dump.sigma.clone(), dump.sign)
    }

    pub fn dump(&self) -> AutDump {
        AutDump {
            path: self.path.clone(),
            subscript: self.path.subscript(),
            sigma: self.sigma.clone(),
            sign: self.sign,
        }
    }

    pub fn pattern(&self) -> &Arc<ClusterPattern> {
        &self.pattern
    }

    pub fn path(&self) -> &TreePath {
        &self.path
    }

    pub fn sigma(&self) -> &Perm {
        &self.sigma
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Re-checks the defining matrix condition.
    pub fn is_valid(&self) -> Result<bool> {
        Ok(Self::new(&self.pattern, self.path.clone(), self.sigma.clone(), self.sign).is_ok())
    }

    fn same_pattern(&self, other: &AutQuad) -> Result<()> {
        if self.pattern.id() == other.pattern.id() {
            Ok(())
        } else {
            Err(Error::PatternMismatch)
        }
    }

    /// `self ∘ f`.
    pub fn compose(&self, f: &AutQuad) -> Result<AutQuad> {
        self.same_pattern(f)?;
        let path = self.path.concat(&f.path.relabel(&self.sigma));
        let out = Self::unchecked(&self.pattern, path, self.sigma.compose(&f.sigma), self.sign.mul(f.sign));
        debug_assert!(out.is_valid().unwrap_or(true), "composition produced an invalid quadruple");
        Ok(out)
    }

    pub fn inverse(&self) -> AutQuad {
        let inv = self.sigma.inverse();
        let path = TreePath::reduce(self.path.reversed().relabel(&inv).labels().iter().copied());
        Self::unchecked(&self.pattern, path, inv, self.sign)
    }

    /// The `h` with `g ∘ h = self`.
    pub fn factor_through(&self, g: &AutQuad) -> Result<AutQuad> {
        g.inverse().compose(self)
    }

    pub fn pow(&self, k: i64) -> Result<AutQuad> {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = AutQuad::identity(&self.pattern);
        for _ in 0..k.unsigned_abs() {
            acc = base.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Images `f(x_i) = x_{σ(i);t}`, computed once.
    pub fn images(&self) -> Result<&[Arc<LaurentPoly>]> {
        if let Some(v) = self.images.get() {
            return Ok(v);
        }
        let seed = self.pattern.seed(&self.path)?;
        let n = self.pattern.n();
        let imgs: Vec<Arc<LaurentPoly>> = (0..n).map(|i| seed.cluster()[self.sigma.at(i)].clone()).collect();
        Ok(self.images.get_or_init(|| imgs))
    }

    fn sign_is_invariant(&self) -> bool {
        self.pattern.root_matrix().entries().iter().any(|&v| v != 0)
    }

    /// C-matrix key: `(ε, C_t` with column `i` taken from column `σ(i))`.
    /// Equal maps have equal keys; `None` when the C-matrix overflowed.
    pub fn c_key(&self) -> Result<Option<(Option<Sign>, CMatrix)>> {
        let sign = self.sign_is_invariant().then_some(self.sign);
        Ok(self.pattern.cmatrix_at(&self.path)?.map(|c| (sign, c.columns_by(&self.sigma))))
    }

    fn eval_images(&self, idx: u64) -> Result<Option<Vec<u64>>> {
        let vals = self.pattern.eval_at(&self.path, idx)?;
        Ok(vals.map(|v| (0..v.len()).map(|i| v[self.sigma.at(i)]).collect()))
    }

    /// Images evaluated modulo a large prime at two fixed points.
    pub fn fingerprint(&self) -> Result<Fingerprint> {
        Ok(Fingerprint {
            sign: self.sign_is_invariant().then_some(self.sign),
            values: [self.eval_images(0)?, self.eval_images(1)?],
        })
    }

    /// Whether the induced map is the identity.
    pub fn is_identity(&self) -> Result<bool> {
        if self.path.is_empty() {
            return Ok(self.sigma.is_identity());
        }
        let mut c_says_identity = false;
        if self.pattern.cfilter() {
            if let Some((_, key)) = self.c_key()? {
                if !key.is_identity() {
                    return Ok(false);
                }
                c_says_identity = true;
            }
        }
        for idx in 0..3 {
            if let Some(vals) = self.eval_images(idx)? {
                if vals != eval_point(self.pattern.n(), idx) {
                    if c_says_identity {
                        return Err(Error::FilterDisagreement(format!(
                            "C-matrix key is the identity but evaluation differs at path [{}]",
                            self.path
                        )));
                    }
                    return Ok(false);
                }
                break;
            }
        }
        let exact = self.is_identity_laurent()?;
        if c_says_identity && !exact {
            return Err(Error::FilterDisagreement(format!(
                "C-matrix key is the identity but Laurent images differ at path [{}]",
                self.path
            )));
        }
        Ok(exact)
    }

    /// Exact identity test using only Laurent arithmetic.
    ///
    /// Splits the path as `A ++ S` and compares the cluster at the end of
    /// `A` with the cluster obtained from `σ(x)` by undoing `S`; by
    /// equivariance the latter is `σ` applied to the seed at `σ⁻¹(reverse S)`.
    pub fn is_identity_laurent(&self) -> Result<bool> {
        if let Some(imgs) = self.images.get() {
            let n = self.pattern.n();
            return Ok((0..n).all(|i| *imgs[i] == LaurentPoly::variable(n, i + 1)));
        }
        let len = self.path.len();
        let half = len.div_ceil(2);
        let fwd = self.pattern.seed(&self.path.prefix(half))?;
        let tail = TreePath::reduce(self.path.labels()[half..].iter().rev().copied());
        let back = self.pattern.seed(&tail.relabel(&self.sigma.inverse()))?;
        let n = self.pattern.n();
        Ok((0..n).all(|i| fwd.cluster()[self.sigma.at(i)] == back.cluster()[i]))
    }

    /// Equality as maps.
    pub fn aut_equal(&self, other: &AutQuad) -> Result<bool> {
        self.same_pattern(other)?;
        if self.path == other.path && self.sigma == other.sigma {
            return Ok(true);
        }
        if self.path.is_empty() && other.path.is_empty() {
            return Ok(self.sigma == other.sigma);
        }
        if self.pattern.cfilter() {
            if let (Some(a), Some(b)) = (self.c_key()?, other.c_key()?) {
                if a != b {
                    return Ok(false);
                }
            }
        }
        let (fa, fb) = (self.fingerprint()?, other.fingerprint()?);
        if fa.sign != fb.sign {
            return Ok(false);
        }
        for (a, b) in fa.values.iter().zip(&fb.values) {
            if let (Some(a), Some(b)) = (a, b) {
                if a != b {
                    return Ok(false);
                }
            }
        }
        if let (Some(a), Some(b)) = (self.images.get(), other.images.get()) {
            return Ok(a == b);
        }
        other.inverse().compose(self)?.is_identity_laurent()
    }
}

impl fmt::Debug for AutQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AutQuad(path=[{}], sigma={}, sign={})", self.path, self.sigma, self.sign)
    }
}

impl fmt::Display for AutQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "psi^{{{},{}}}", self.sigma, self.sign)
        } else {
            write!(f, "g_{{{}}}^{{{},{}}}", self.path.subscript(), self.sigma, self.sign)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn quad(p: &Arc<ClusterPattern>, path: &str, sigma: &str, sign: Sign) -> Result<AutQuad> {
        AutQuad::new(p, TreePath::parse(path)?, Perm::parse_cycles(p.n(), sigma)?, sign)
    }

    #[test]
    fn validity_in_rank_two() {
        let p = ClusterPattern::new(catalog::a2());
        assert!(quad(&p, "", "(12)", Sign::Minus).is_ok());
        assert!(matches!(quad(&p, "1", "1", Sign::Plus), Err(Error::InvalidAut(_))));
        assert!(quad(&p, "1", "1", Sign::Minus).is_ok());
    }

    #[test]
    fn x7_symmetry() {
        let p = ClusterPattern::new(catalog::x7());
        let a = quad(&p, "", "(24)(35)", Sign::Plus).unwrap();
        assert!(a.compose(&a).unwrap().is_identity().unwrap());
        assert!(!a.is_identity().unwrap());
    }

    #[test]
    fn pentagon_automorphism() {
        // (1,2,1,2,1) returns the swapped cluster, so sigma = (12) gives the identity map
        let p = ClusterPattern::new(catalog::a2());
        let f = quad(&p, "1,2,1,2,1", "(12)", Sign::Plus).unwrap();
        assert!(f.is_identity().unwrap());
        assert!(f.is_identity_laurent().unwrap());
        let g = quad(&p, "1,2,1,2,1", "1", Sign::Minus).unwrap();
        assert!(!g.is_identity().unwrap());
        assert!(!g.is_identity_laurent().unwrap());
    }

    #[test]
    fn rank3_sink_source_pair_composes_to_identity() {
        let p = ClusterPattern::new(catalog::rank3_weighted());
        let g213 = quad(&p, "3,1,2", "1", Sign::Plus).unwrap();
        let g312 = quad(&p, "2,1,3", "1", Sign::Plus).unwrap();
        assert!(g213.compose(&g312).unwrap().is_identity().unwrap());
        assert!(g213.inverse().aut_equal(&g312).unwrap());
        assert!(!g213.is_identity().unwrap());
    }

    #[test]
    fn images_are_cluster_variables() {
        let p = ClusterPattern::new(catalog::a2());
        let f = quad(&p, "1", "1", Sign::Minus).unwrap();
        let imgs = f.images().unwrap();
        assert_eq!(*imgs[1], LaurentPoly::variable(2, 2));
        assert_eq!(f.to_string(), "g_{1}^{1,-}");
        let dump = serde_json::to_string(&f.dump()).unwrap();
        assert_eq!(dump, r#"{"path":[1],"subscript":"1","sigma":[1,2],"sign":"-"}"#);
        let back: AutDump = serde_json::from_str(&dump).unwrap();
        assert!(AutQuad::from_dump(&p, &back).unwrap().aut_equal(&f).unwrap());
    }

    #[test]
    fn patterns_do_not_mix() {
        let p = ClusterPattern::new(catalog::a2());
        let q = ClusterPattern::new(catalog::a2());
        let e1 = AutQuad::identity(&p);
        let e2 = AutQuad::identity(&q);
        assert_eq!(e1.compose(&e2).unwrap_err(), Error::PatternMismatch);
    }
}
