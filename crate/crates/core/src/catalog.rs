//! Exchange matrices used throughout the examples and tests.

use std::sync::Arc;

use crate::autom::{AutQuad, Sign};
use crate::exmatrix::ExchangeMatrix;
use crate::perm::Perm;
use crate::seeds::{ClusterPattern, TreePath};

fn build(rows: Vec<Vec<i64>>) -> ExchangeMatrix {
    ExchangeMatrix::new(rows).expect("catalog matrices are skew-symmetrizable")
}

/// Rank-2 type A₂: a single arrow 1 → 2.
pub fn a2() -> ExchangeMatrix {
    build(vec![vec![0, 1], vec![-1, 0]])
}

/// Rank-3 acyclic weighted triangle: 2 → 1 of weight 2, 1 → 3 of weight
/// 2√3, 2 → 3 of weight √3. Symmetrizer (4, 1, 3).
pub fn rank3_weighted() -> ExchangeMatrix {
    build(vec![vec![0, -1, 3], vec![4, 0, 3], vec![-4, -1, 0]])
}

/// Linear rank-4 chain 1 → 2 → 3 → 4 with weights `√(a1 a2)`, `√(b1 b2)`, `√(c1 c2)`.
pub fn chain4(a1: i64, a2: i64, b1: i64, b2: i64, c1: i64, c2: i64) -> ExchangeMatrix {
    build(vec![
        vec![0, a1, 0, 0],
        vec![-a2, 0, b1, 0],
        vec![0, -b2, 0, c1],
        vec![0, 0, -c2, 0],
    ])
}

/// Chain with pairwise distinct weights 2 < 3 < 4.
pub fn chain4_distinct() -> ExchangeMatrix {
    chain4(2, 2, 3, 3, 4, 4)
}

/// Chain with all weights equal to 2.
pub fn chain4_uniform() -> ExchangeMatrix {
    chain4(2, 2, 2, 2, 2, 2)
}

/// The exceptional rank-7 quiver X₇: three oriented triangles glued at
/// vertex 1, each carrying one double arrow (2 ⇒ 3, 4 ⇒ 5, 6 ⇒ 7).
pub fn x7() -> ExchangeMatrix {
    let mut b = vec![vec![0i64; 7]; 7];
    let mut arrow = |i: usize, j: usize, w: i64| {
        b[i - 1][j - 1] = w;
        b[j - 1][i - 1] = -w;
    };
    for (x, y) in [(2, 3), (4, 5), (6, 7)] {
        arrow(1, x, 1);
        arrow(x, y, 2);
        arrow(y, 1, 1);
    }
    build(b)
}

/// Looks up a catalog matrix by name.
pub fn by_name(name: &str) -> Option<ExchangeMatrix> {
    Some(match name {
        "a2" => a2(),
        "rank3-weighted" => rank3_weighted(),
        "chain4-distinct" => chain4_distinct(),
        "chain4-uniform" => chain4_uniform(),
        "x7" => x7(),
        _ => return None,
    })
}

fn quad(p: &Arc<ClusterPattern>, path: &str, cycles: &str, sign: Sign) -> AutQuad {
    let path = TreePath::parse(path).expect("catalog path");
    let sigma = Perm::parse_cycles(p.n(), cycles).expect("catalog permutation");
    AutQuad::new(p, path, sigma, sign).expect("catalog automorphism is valid")
}

/// Named automorphisms of the X₇ pattern: the involutions `a = ψ⁺_{(24)(35)}`,
/// `b = ψ⁺_{(46)(57)}`, the central `tau = ψ⁻_{(23)(45)(67)}`, the rotation
/// `f` along the path 1,2,3 and `g2` along the single step 2.
pub fn x7_automorphisms(p: &Arc<ClusterPattern>) -> Vec<(String, AutQuad)> {
    vec![
        ("a".into(), quad(p, "", "(24)(35)", Sign::Plus)),
        ("b".into(), quad(p, "", "(46)(57)", Sign::Plus)),
        ("tau".into(), quad(p, "", "(23)(45)(67)", Sign::Minus)),
        ("f".into(), quad(p, "1,2,3", "(132)(4567)", Sign::Plus)),
        ("g2".into(), quad(p, "2", "(23)", Sign::Plus)),
    ]
}

/// Named automorphisms of a rank-4 chain pattern: `x` along 4,3,2,1 and `y`
/// along 4,1,3,4, plus `psi = ψ⁻_{(14)(23)}` when all weights agree.
pub fn chain4_automorphisms(p: &Arc<ClusterPattern>) -> Vec<(String, AutQuad)> {
    let mut out = vec![
        ("x".into(), quad(p, "4,3,2,1", "", Sign::Plus)),
        ("y".into(), quad(p, "4,1,3,4", "", Sign::Minus)),
    ];
    let psi = Perm::parse_cycles(4, "(14)(23)").expect("literal");
    if p.root_matrix().permute(&psi) == p.root_matrix().neg() {
        out.push(("psi".into(), quad(p, "", "(14)(23)", Sign::Minus)));
    }
    out
}

pub const NAMES: &[&str] = &["a2", "rank3-weighted", "chain4-distinct", "chain4-uniform", "x7"];
