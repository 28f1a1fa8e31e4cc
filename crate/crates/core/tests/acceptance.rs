//! Acceptance run: one line per criterion, nonzero exit on any failure.
//! All checks are exact; there are no floating-point tolerances.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use clusteraut::grouplab::{self, linear_growth, relation_search, GenSet, OrderBound, SearchOptions};
use clusteraut::search::{self, enumerate_class, enumerate_p1, extract_generators, path_weight, tie_break, Mode};
use clusteraut::seeds::{is_sink_source_path, non_exact_division_count};
use clusteraut::{catalog, AutQuad, ClusterPattern, ExchangeMatrix, Perm, Sign, TreePath};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// Independent mutation and relabeling oracles on plain integer arrays.
fn oracle_mutate(b: &[Vec<i64>], k: usize) -> Vec<Vec<i64>> {
    let n = b.len();
    let mut out = b.to_vec();
    for i in 0..n {
        for j in 0..n {
            out[i][j] = if i == k || j == k {
                -b[i][j]
            } else {
                let (bik, bkj) = (b[i][k], b[k][j]);
                b[i][j] + bik.max(0) * bkj.max(0) - (-bik).max(0) * (-bkj).max(0)
            };
        }
    }
    out
}

fn oracle_permute(b: &[Vec<i64>], images: &[usize]) -> Vec<Vec<i64>> {
    let n = b.len();
    let mut out = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[images[i] - 1][images[j] - 1] = b[i][j];
        }
    }
    out
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ExchangeMatrix {
    // B = S·C with S skew-symmetric and C a positive diagonal is skew-symmetrizable by C
    let c: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=2)).collect();
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let s = rng.gen_range(-2..=2);
            rows[i][j] = s * c[j];
            rows[j][i] = -s * c[i];
        }
    }
    ExchangeMatrix::new(rows).expect("skew-symmetrizable by construction")
}

fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Perm {
    let mut v: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        v.swap(i, j);
    }
    Perm::from_images(&v).expect("permutation")
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let instances = 10_000;
    for t in 0..instances {
        let n = rng.gen_range(2..=5);
        let b = random_matrix(&mut rng, n);
        let k = rng.gen_range(1..=n);
        let sigma = random_perm(&mut rng, n);
        let mb = b.mutate(k).map_err(e2s)?;
        ensure(mb.rows() == oracle_mutate(&b.rows(), k - 1), || format!("mutation oracle mismatch on {b:?}, k={k}"))?;
        ensure(mb.mutate(k).map_err(e2s)? == b, || format!("mu_{k} is not an involution on {b:?}"))?;
        let lhs = mb.permute(&sigma);
        ensure(lhs.rows() == oracle_permute(&mb.rows(), &sigma.images()), || "relabeling oracle mismatch".into())?;
        let rhs = b.permute(&sigma).mutate(sigma.apply(k)).map_err(e2s)?;
        ensure(lhs == rhs, || format!("equivariance fails on {b:?}, k={k}, sigma={sigma}"))?;
        ensure(mb.is_symmetrized_by(&b.skew_symmetrizer().map_err(e2s)?), || "symmetrizer not preserved".into())?;
        if t % 50 == 0 && n <= 4 {
            // seed level: relabel of the mutated seed equals mutation of the relabeled seed
            let p = ClusterPattern::new(b.clone());
            let seed = p.root();
            let left = seed.mutate(k).map_err(e2s)?.permute(&sigma);
            let right = seed.permute(&sigma).mutate(sigma.apply(k)).map_err(e2s)?;
            ensure(left.equal_labeled(&right).map_err(e2s)?, || "seed equivariance fails".into())?;
        }
    }
    Ok(format!("{instances} random instances, ranks 2-5"))
}

fn arrows(m: &ExchangeMatrix) -> BTreeSet<(usize, usize, u128)> {
    m.weighted_graph().arrows.iter().map(|a| (a.from, a.to, a.squared_weight)).collect()
}

fn quiver(list: &[(usize, usize, u128)]) -> BTreeSet<(usize, usize, u128)> {
    list.iter().map(|&(i, j, w)| (i, j, w * w)).collect()
}

#[rustfmt::skip]
fn criterion_2() -> Check {
    let b0 = catalog::x7();
    let q0 = quiver(&[
        (1, 2, 1), (2, 3, 2), (3, 1, 1),
        (1, 4, 1), (4, 5, 2), (5, 1, 1),
        (1, 6, 1), (6, 7, 2), (7, 1, 1),
    ]);
    let q_mu2 = quiver(&[
        (2, 1, 1), (1, 3, 1), (3, 2, 2),
        (1, 4, 1), (4, 5, 2), (5, 1, 1),
        (7, 1, 1), (1, 6, 1), (6, 7, 2),
    ]);
    let q_s = quiver(&[
        (2, 3, 1), (3, 4, 1), (4, 5, 1), (5, 6, 1), (6, 7, 1), (7, 2, 1),
        (2, 1, 1), (4, 1, 1), (6, 1, 1), (1, 3, 1), (1, 5, 1), (1, 7, 1),
        (3, 6, 1), (5, 2, 1), (7, 4, 1),
    ]);
    let q_s2 = quiver(&[
        (1, 2, 1), (2, 5, 1), (5, 6, 1), (6, 7, 1), (7, 4, 1), (4, 1, 1),
        (1, 3, 1), (5, 3, 1), (7, 3, 1), (3, 2, 1), (3, 6, 1), (3, 4, 1),
        (2, 7, 1), (6, 1, 1), (4, 5, 1),
    ]);
    let q_s23 = quiver(&[
        (1, 2, 2), (2, 3, 1), (3, 1, 1),
        (3, 5, 1), (5, 6, 2), (6, 3, 1),
        (3, 7, 1), (7, 4, 2), (4, 3, 1),
    ]);
    let m = |path: &[usize]| b0.mutate_along(path).map_err(e2s);
    ensure(arrows(&b0) == q0, || "t0 quiver differs".into())?;
    ensure(arrows(&m(&[2])?) == q_mu2, || "mu_2(t0) quiver differs".into())?;
    ensure(arrows(&m(&[1])?) == q_s, || "s = mu_1(t0) quiver differs".into())?;
    ensure(arrows(&m(&[1, 2])?) == q_s2, || "mu_2(s) quiver differs".into())?;
    ensure(arrows(&m(&[1, 2, 3])?) == q_s23, || "mu_3 mu_2(s) quiver differs".into())?;
    Ok("4 mutation steps, 5 quivers match arrow for arrow".into())
}

fn criterion_3() -> Check {
    let p = ClusterPattern::new(catalog::rank3_weighted());
    let paths = enumerate_p1(p.root_matrix(), 9, true).map_err(e2s)?;
    let labels: Vec<Vec<usize>> = paths.iter().map(|q| q.labels().to_vec()).collect();
    ensure(labels == vec![vec![2, 1, 3], vec![3, 1, 2]], || format!("sink-source P1 paths {labels:?}"))?;
    let g0 = search::compute_g0(&p);
    ensure(g0.len() == 1, || format!("|G0| = {}", g0.len()))?;
    let gens = extract_generators(&p, Mode::AcyclicSinkSource, Default::default()).map_err(e2s)?;
    ensure(gens.h1.len() == 2, || format!("{} generators", gens.h1.len()))?;
    let prod = gens.h1[0].compose(&gens.h1[1]).map_err(e2s)?;
    ensure(prod.is_identity_laurent().map_err(e2s)?, || "generators do not compose to the identity".into())?;
    let inv = gens.h1[0].inverse();
    ensure(inv.aut_equal(&gens.h1[1]).map_err(e2s)?, || "generators are not mutually inverse".into())?;
    let order = grouplab::order_bound(&gens.h1[0], 20).map_err(e2s)?;
    ensure(order == OrderBound::Exceeds(20), || format!("generator has {order}"))?;
    Ok(format!("|P1ss| = 2, |G0| = 1, g*g' = id, {order}"))
}

fn chain_quad(p: &std::sync::Arc<ClusterPattern>, subscript: &str, sign: Sign) -> Result<AutQuad, String> {
    // subscripts are written in operator order; paths are stored in application order
    let labels: Vec<usize> = subscript.chars().rev().map(|c| c.to_digit(10).expect("digit") as usize).collect();
    AutQuad::new(p, TreePath::new(labels).map_err(e2s)?, Perm::identity(4), sign).map_err(e2s)
}

fn criterion_4() -> Check {
    let b0 = catalog::chain4_distinct();
    let p = ClusterPattern::new(b0.clone());
    let gens = extract_generators(&p, Mode::AcyclicSinkSource, Default::default()).map_err(e2s)?;
    ensure(gens.classes.len() == 4, || format!("|B^ss| = {}", gens.classes.len()))?;
    let l_of = |path: &[usize]| -> Result<usize, String> {
        let key = b0.mutate_along(path).map_err(e2s)?.class_key();
        let i = gens.classes.iter().position(|c| *c == key).ok_or("class missing from B^ss")?;
        Ok(gens.l_values[i - 1])
    };
    // B1: c reversed; B2: 1->2<-3->4; B3: 1->2<-3<-4 (the negative of mu_1 B)
    let ls = (l_of(&[4])?, l_of(&[4, 3])?, l_of(&[1])?);
    ensure(ls == (1, 2, 1), || format!("(l1, l2, l3) = {ls:?}"))?;
    ensure(gens.l == 2, || format!("l = {}", gens.l))?;
    let p1 = enumerate_p1(&b0, 5, true).map_err(e2s)?;
    ensure(p1.len() == 12, || format!("|P1ss^<6| = {}", p1.len()))?;
    let g = |s: &str, e: Sign| chain_quad(&p, s, e);
    let (m, pl) = (Sign::Minus, Sign::Plus);
    let id = AutQuad::identity(&p);
    let identities: Vec<(&str, AutQuad, AutQuad)> = vec![
        ("g1414 = id", g("1414", pl)?, id.clone()),
        ("g4141 = id", g("4141", pl)?, id.clone()),
        ("g4121 = g1421", g("4121", m)?, g("1421", m)?),
        ("g1241 = g1214", g("1241", m)?, g("1214", m)?),
        ("g4341 = g4314", g("4341", m)?, g("4314", m)?),
        ("g4134 = g1434", g("4134", m)?, g("1434", m)?),
        ("g4121 g1214 = id", g("4121", m)?.compose(&g("1214", m)?).map_err(e2s)?, id.clone()),
        ("g4321 g1234 = id", g("4321", pl)?.compose(&g("1234", pl)?).map_err(e2s)?, id.clone()),
        ("g4314 g4134 = id", g("4314", m)?.compose(&g("4134", m)?).map_err(e2s)?, id.clone()),
        ("g4314 g1234 = g1214", g("4314", m)?.compose(&g("1234", pl)?).map_err(e2s)?, g("1214", m)?),
        ("g4314 g4314 = id", g("4314", m)?.compose(&g("4314", m)?).map_err(e2s)?, id.clone()),
        (
            "g1234 g4314 = g4314 g4321",
            g("1234", pl)?.compose(&g("4314", m)?).map_err(e2s)?,
            g("4314", m)?.compose(&g("4321", pl)?).map_err(e2s)?,
        ),
    ];
    for (name, lhs, rhs) in &identities {
        ensure(lhs.aut_equal(rhs).map_err(e2s)?, || format!("identity {name} fails"))?;
    }
    // every extracted generator is a word in x and y
    let xy = GenSet::new(vec![("x".into(), g("1234", pl)?), ("y".into(), g("4314", m)?)]).map_err(e2s)?;
    let rep = relation_search(&xy, &SearchOptions::new(8)).map_err(e2s)?;
    let rels: Vec<&str> = rep.relations.iter().map(|r| r.relator.as_str()).collect();
    // (x y)^2 = id is xy = yx^-1 once y^2 = id
    ensure(rels == vec!["y^2", "(x y)^2"], || format!("relations {rels:?}"))?;
    ensure(rep.relations.iter().all(|r| r.verified), || "unverified relation".into())?;
    ensure(linear_growth(&rep), || format!("sphere sizes {:?}", rep.sphere_sizes))?;
    Ok(format!(
        "|B^ss| = 4, l = (1,2,1), l = 2, 12 paths, {} identities, relations {{y^2, xy = yx^-1}}, balls {:?}",
        identities.len(),
        rep.ball_sizes
    ))
}

fn criterion_5() -> Check {
    let b0 = catalog::chain4_uniform();
    let p = ClusterPattern::new(b0.clone());
    let named = GenSet::new(catalog::chain4_automorphisms(&p)).map_err(e2s)?;
    let (x, y, psi) = (named.get("x").map_err(e2s)?, named.get("y").map_err(e2s)?, named.get("psi").map_err(e2s)?);
    let x_rev = chain_quad(&p, "4321", Sign::Plus)?;
    ensure(psi.compose(x).and_then(|q| q.compose(psi)).map_err(e2s)?.aut_equal(&x_rev).map_err(e2s)?, || {
        "psi x psi = g4321 fails".into()
    })?;
    // the second identity holds with the minus sign on g4314 (the plus sign is not a valid quadruple)
    ensure(chain_quad(&p, "4314", Sign::Plus).is_err(), || "g4314 with + unexpectedly valid".into())?;
    ensure(
        psi.compose(y).and_then(|q| q.compose(psi)).map_err(e2s)?.aut_equal(&y.compose(x).map_err(e2s)?).map_err(e2s)?,
        || "psi y psi = y x fails".into(),
    )?;
    let mut m = b0.clone();
    let mut w = m.weight_sum();
    for i in 1..=20 {
        m = m.mutate(if i % 2 == 1 { 2 } else { 1 }).map_err(e2s)?;
        let next = m.weight_sum();
        ensure(next > w, || format!("w_{i} = {next} is not larger than w_{} = {w}", i - 1))?;
        w = next;
    }
    let gens = extract_generators(&p, Mode::AcyclicSinkSource, Default::default()).map_err(e2s)?;
    let root = b0.class_key();
    for (i, path) in ["2,4,2,4", "2,1,4,1,2,4", "2,1,2,4,2,1,2,4"].iter().enumerate() {
        let tp = TreePath::parse(path).map_err(e2s)?;
        ensure(path_weight(&b0, &tp, &root).map_err(e2s)? == 2, || format!("t_{} path weight", i + 1))?;
        let f = tie_break(&p, &tp).map_err(e2s)?.ok_or_else(|| format!("t_{} not in the root class", i + 1))?;
        let word = gens.reduce_to_generators(&f).map_err(e2s)?;
        ensure(word.0.iter().all(|&(g, _)| g < gens.g0.len()), || format!("t_{} reduces outside G0", i + 1))?;
        ensure(gens.evaluate(&word).map_err(e2s)?.aut_equal(&f).map_err(e2s)?, || "reduction is wrong".into())?;
    }
    Ok(format!("2 conjugation identities, w_0 < ... < w_20 (w_20 = {w}), t_1..t_3 reduce into G0"))
}

fn criterion_6() -> Check {
    let b0 = catalog::x7();
    let idx = enumerate_class(&b0, 10, 100_000);
    ensure(idx.finite && idx.len() == 2, || format!("class index finite={} size={}", idx.finite, idx.len()))?;
    let p = ClusterPattern::new(b0);
    ensure(p.cfilter(), || "C-matrix filter disabled".into())?;
    let gens = extract_generators(&p, Mode::FiniteMutation, Default::default()).map_err(e2s)?;
    ensure(gens.l == 1 && gens.classes.len() == 2, || format!("l = {}", gens.l))?;
    ensure(gens.g0.len() == 12, || format!("|G0| = {}", gens.g0.len()))?;
    ensure(gens.h1.len() == 12, || format!("|H1^<4| = {}", gens.h1.len()))?;
    let named = GenSet::new(catalog::x7_automorphisms(&p)).map_err(e2s)?;
    let ab = named.subset(&["a", "b"]).map_err(e2s)?;
    let rep = relation_search(&ab, &SearchOptions::new(6)).map_err(e2s)?;
    let rels: Vec<&str> = rep.relations.iter().map(|r| r.relator.as_str()).collect();
    ensure(rep.closed && rep.ball_sizes.last() == Some(&6), || format!("G0+ ball {:?}", rep.ball_sizes))?;
    ensure(rels == vec!["a^2", "b^2", "(a b)^3"], || format!("G0+ relations {rels:?}"))?;
    let tau = named.get("tau").map_err(e2s)?;
    ensure(grouplab::order_bound(tau, 4).map_err(e2s)? == OrderBound::Exact(2), || "tau order".into())?;
    let text = "tau a = a tau\ntau b = b tau\n\
                g3 = g2^-1\ng4 = a g2 a\ng2 b = f^2\n\
                (a f)^5\n(a f a f^-1)^3\n(a f^2)^3 = (f^2 a)^3\n(a f^2 a f^-2)^3";
    let mut items = catalog::x7_automorphisms(&p);
    let q = |path: &str, cyc: &str| {
        AutQuad::new(&p, TreePath::parse(path).expect("path"), Perm::parse_cycles(7, cyc).expect("perm"), Sign::Plus)
    };
    items.push(("g3".into(), q("3", "(23)").map_err(e2s)?));
    items.push(("g4".into(), q("4", "(45)").map_err(e2s)?));
    let all = GenSet::new(items).map_err(e2s)?;
    let relations = grouplab::parse_relations(text).map_err(e2s)?;
    let report = grouplab::verify_relations(&all, &relations).map_err(e2s)?;
    for r in &report {
        ensure(r.holds, || format!("{} = {} fails", r.lhs, r.rhs))?;
    }
    Ok(format!(
        "2 classes, l = 1, |G0| = 12, G0+ ball 6 with a^2, b^2, (ab)^3, |H1^<4| = 12, {} identities verified",
        report.len()
    ))
}

fn criterion_7() -> Check {
    let p = ClusterPattern::new(catalog::a2());
    let mut unlabeled = BTreeSet::new();
    let mut frontier = vec![TreePath::empty()];
    for _ in 0..=8 {
        let mut next = Vec::new();
        for path in &frontier {
            let seed = p.seed(path).map_err(e2s)?;
            let mut vars: Vec<String> = seed.cluster().iter().map(|x| x.to_string()).collect();
            vars.sort();
            unlabeled.insert(vars);
            for k in 1..=2 {
                if path.last() != Some(k) {
                    let mut q = path.clone();
                    q.push(k);
                    next.push(q);
                }
            }
        }
        frontier = next;
    }
    ensure(unlabeled.len() == 5, || format!("{} unlabeled seeds", unlabeled.len()))?;
    let seed = p.seed(&TreePath::parse("1,2,1,2,1").map_err(e2s)?).map_err(e2s)?;
    let root = p.root();
    ensure(
        *seed.cluster()[0] == *root.cluster()[1] && *seed.cluster()[1] == *root.cluster()[0],
        || "alternating path of length 5 does not swap x1 and x2".into(),
    )?;
    Ok("5 unlabeled seeds, mu_1 mu_2 mu_1 mu_2 mu_1 gives (x2, x1)".into())
}

fn class_weights(start: &ExchangeMatrix, path: &TreePath, refs: &[clusteraut::ClassKey]) -> Result<Vec<usize>, String> {
    let mut m = start.clone();
    let mut keys = vec![m.class_key()];
    for &k in path.labels() {
        m = m.mutate(k).map_err(e2s)?;
        keys.push(m.class_key());
    }
    Ok(refs.iter().map(|r| keys.iter().filter(|k| *k == r).count()).collect())
}

fn random_word(rng: &mut ChaCha8Rng, p: &std::sync::Arc<ClusterPattern>, all: &[&AutQuad]) -> Result<AutQuad, String> {
    let mut acc = AutQuad::identity(p);
    for _ in 0..rng.gen_range(1..=5) {
        let g = all[rng.gen_range(0..all.len())];
        let g = if rng.gen_bool(0.5) { g.inverse() } else { g.clone() };
        acc = acc.compose(&g).map_err(e2s)?;
    }
    Ok(acc)
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let setups = [
        (catalog::rank3_weighted(), Mode::AcyclicSinkSource),
        (catalog::chain4_distinct(), Mode::AcyclicSinkSource),
        (catalog::chain4_uniform(), Mode::AcyclicSinkSource),
        (ExchangeMatrix::new(vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]]).map_err(e2s)?, Mode::FiniteMutation),
        (catalog::chain4(1, 1, 1, 1, 1, 1), Mode::FiniteMutation),
    ];
    let mut prepared = Vec::new();
    for (b, mode) in setups {
        let p = ClusterPattern::new(b);
        let gens = extract_generators(&p, mode, Default::default()).map_err(e2s)?;
        prepared.push((p, gens));
    }
    let instances = 500;
    let mut ss_checked = 0;
    for _ in 0..instances {
        let (p, gens) = &prepared[rng.gen_range(0..prepared.len())];
        let all = gens.all();
        let f = random_word(&mut rng, p, &all)?;
        let g = random_word(&mut rng, p, &all)?;
        let h = f.factor_through(&g).map_err(e2s)?;
        ensure(g.compose(&h).map_err(e2s)?.aut_equal(&f).map_err(e2s)?, || "f != g h".into())?;
        ensure(*h.sigma() == g.sigma().inverse().compose(f.sigma()), || "sigma of h".into())?;
        ensure(h.sign() == g.sign().mul(f.sign()), || "sign of h".into())?;
        let b0 = p.root_matrix();
        let st = TreePath::reduce(g.path().reversed().labels().iter().chain(f.path().labels()).copied());
        let bs = p.matrix_at(g.path()).map_err(e2s)?;
        let mut refs: Vec<clusteraut::ClassKey> = gens.classes.clone();
        for path in [f.path(), g.path()] {
            let mut m = b0.clone();
            for &k in path.labels() {
                m = m.mutate(k).map_err(e2s)?;
                refs.push(m.class_key());
            }
        }
        refs.sort();
        refs.dedup();
        ensure(class_weights(b0, h.path(), &refs)? == class_weights(&bs, &st, &refs)?, || {
            format!("weights differ for f = {f}, g = {g}")
        })?;
        if gens.mode == Mode::AcyclicSinkSource {
            let f_ss = is_sink_source_path(b0, f.path()).map_err(e2s)?;
            let g_ss = is_sink_source_path(b0, g.path()).map_err(e2s)?;
            ensure(f_ss && g_ss, || "words in sink-source generators left the sink-source paths".into())?;
            ensure(is_sink_source_path(b0, h.path()).map_err(e2s)?, || {
                format!("h = {h} is not sink-source for f = {f}, g = {g}")
            })?;
            ss_checked += 1;
        }
    }
    Ok(format!("{instances} factorizations, {ss_checked} with the sink-source closure check"))
}

fn criterion_9() -> Check {
    let count = non_exact_division_count();
    ensure(count == 0, || format!("{count} non-exact divisions"))?;
    Ok("0 non-exact divisions".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("mutation correctness", criterion_1),
        ("X7 mutation figure", criterion_2),
        ("rank-3 weighted acyclic example", criterion_3),
        ("rank-4 chain with distinct weights", criterion_4),
        ("rank-4 chain with equal weights", criterion_5),
        ("X7 automorphism group", criterion_6),
        ("pentagon oracle", criterion_7),
        ("factorization properties", criterion_8),
        ("Laurent sentinel", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("[PASS] {} {name} (tol=exact, {secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {} {name} (tol=exact, {secs:.2}s): {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
