//! Chequered cycles, necklaces and doubly-indexed cycles.
//!
//! A chequered cycle with `2n` nodes is stored as its node labels
//! `[i1, i2, ..., i2n]`, read clockwise, with the edge `i(2j-1) -> i(2j)` of type 1
//! and `i(2j) -> i(2j+1)` of type 2. Only rotations by an even number of places
//! preserve the edge types, so classes are cyclic words in the pairs `(i(2j-1), i(2j))`.

use std::collections::BTreeMap;
use std::fmt;

use crate::linalg::CMat;
use crate::sewing_rho::{BVector, BlockMomentMatrix};
use crate::{Error, Result, C64};

/// Lexicographically least rotation of `w`.
pub fn min_rotation<T: Ord + Clone>(w: &[T]) -> Vec<T> {
    let n = w.len();
    let mut best = w.to_vec();
    for s in 1..n {
        let cand: Vec<T> = w[s..].iter().chain(w[..s].iter()).cloned().collect();
        if cand < best {
            best = cand;
        }
    }
    best
}

/// Number of rotations `0 <= s < n` with `rot^s(w) = w`.
pub fn rotation_group_order<T: PartialEq>(w: &[T]) -> usize {
    let n = w.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .filter(|&s| (0..n).all(|i| w[i] == w[(i + s) % n]))
        .count()
}

/// Shortest `y` with `w = y^r`; returns `(y, r)`.
pub fn primitive_root<T: PartialEq + Clone>(w: &[T]) -> (Vec<T>, usize) {
    let n = w.len();
    for p in 1..=n {
        if n % p == 0 && (0..n).all(|i| w[i] == w[i % p]) {
            return (w[..p].to_vec(), n / p);
        }
    }
    (w.to_vec(), 1)
}

fn entry(m: &CMat, k: usize, l: usize) -> Result<C64> {
    if k == 0 || l == 0 || k > m.nrows() || l > m.ncols() {
        return Err(Error::IndexError(format!(
            "label ({k}, {l}) outside the {}x{} truncation",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m[(k - 1, l - 1)])
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| Error::input(format!("bad label {t:?}: {e}")))
        })
        .collect()
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Oriented chequered cycle in canonical (least) rotation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChequeredCycle {
    pairs: Vec<(usize, usize)>,
}

impl ChequeredCycle {
    pub fn new(nodes: &[usize]) -> Result<Self> {
        if nodes.is_empty() || nodes.len() % 2 == 1 {
            return Err(Error::input(format!(
                "a chequered cycle needs an even, nonzero number of nodes (got {})",
                nodes.len()
            )));
        }
        if nodes.contains(&0) {
            return Err(Error::input("node labels must be positive"));
        }
        let pairs: Vec<(usize, usize)> = nodes.chunks(2).map(|c| (c[0], c[1])).collect();
        Ok(ChequeredCycle {
            pairs: min_rotation(&pairs),
        })
    }

    pub fn nodes(&self) -> Vec<usize> {
        self.pairs.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    pub fn node_count(&self) -> usize {
        2 * self.pairs.len()
    }

    /// Sum of node labels.
    pub fn label_weight(&self) -> usize {
        self.pairs.iter().map(|&(a, b)| a + b).sum()
    }

    /// Order of the rotation group, i.e. `|Aut|` of the oriented cycle.
    pub fn aut_order(&self) -> usize {
        rotation_group_order(&self.pairs)
    }

    pub fn is_rotationless(&self) -> bool {
        self.aut_order() == 1
    }

    /// Nodes labelled 1 entered by a type 2 edge and left by a type 1 edge.
    pub fn distinguished_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.0 == 1).count()
    }

    /// Same polygon traversed the other way.
    pub fn reversed(&self) -> ChequeredCycle {
        let mut n = self.nodes();
        n.reverse();
        ChequeredCycle::new(&n).expect("reversal keeps the shape")
    }

    /// Key of the unoriented class: the lesser of the two orientations.
    pub fn unoriented_key(&self) -> ChequeredCycle {
        let r = self.reversed();
        if r < *self {
            r
        } else {
            self.clone()
        }
    }

    /// Label preserving automorphisms of the unoriented polygon (rotations and
    /// reflections).
    pub fn unoriented_aut_order(&self) -> usize {
        let r = self.aut_order();
        if self.reversed() == *self {
            2 * r
        } else {
            r
        }
    }

    /// `prod A_1(i(2j-1), i(2j)) A_2(i(2j), i(2j+1))`.
    pub fn weight(&self, a1: &CMat, a2: &CMat) -> Result<C64> {
        let m = self.pairs.len();
        let mut w = C64::new(1.0, 0.0);
        for j in 0..m {
            let (k, l) = self.pairs[j];
            let next = self.pairs[(j + 1) % m].0;
            w *= entry(a1, k, l)? * entry(a2, l, next)?;
        }
        Ok(w)
    }

    /// Text form `nodes;edges`, e.g. `1,1;1,2`.
    pub fn to_text(&self) -> String {
        let edges: Vec<usize> = (0..self.node_count()).map(|i| 1 + i % 2).collect();
        format!("{};{}", join(&self.nodes()), join(&edges))
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let (n, e) = s
            .split_once(';')
            .ok_or_else(|| Error::input("expected `nodes;edges`"))?;
        let nodes = parse_list(n)?;
        let edges = parse_list(e)?;
        if edges.len() != nodes.len() {
            return Err(Error::input("one edge type per node expected"));
        }
        // rotate so that the first edge has type 1
        let start = match edges.first() {
            Some(1) => 0,
            Some(2) => 1,
            _ => return Err(Error::input("edge types must be 1 or 2")),
        };
        let len = nodes.len();
        for i in 0..len {
            if edges[(start + i) % len] != 1 + i % 2 {
                return Err(Error::input("edge types must alternate"));
            }
        }
        let rot: Vec<usize> = (0..len).map(|i| nodes[(start + i) % len]).collect();
        ChequeredCycle::new(&rot)
    }
}

impl fmt::Display for ChequeredCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A rotationless class together with its distinguished-node flags.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleClass {
    pub cycle: ChequeredCycle,
    /// at least one distinguished node
    pub in_r21: bool,
    /// exactly one distinguished node
    pub in_l21: bool,
}

fn pair_sequences(w: usize, f: &mut dyn FnMut(&[(usize, usize)])) {
    fn go(cur: &mut Vec<(usize, usize)>, left: usize, f: &mut dyn FnMut(&[(usize, usize)])) {
        for a in 1..left {
            for b in 1..=left - a {
                cur.push((a, b));
                f(cur);
                go(cur, left - a - b, f);
                cur.pop();
            }
        }
    }
    go(&mut Vec::new(), w, f);
}

/// Every oriented chequered cycle class with label weight `<= w`, each once.
pub fn enumerate_oriented_cycles(w: usize) -> Vec<ChequeredCycle> {
    let mut out = Vec::new();
    pair_sequences(w, &mut |s| {
        if min_rotation(s) == s {
            out.push(ChequeredCycle { pairs: s.to_vec() });
        }
    });
    out.sort();
    out
}

/// Rotationless classes with label weight `<= w`.
pub fn enumerate_rotationless_cycles(w: usize) -> Vec<CycleClass> {
    enumerate_oriented_cycles(w)
        .into_iter()
        .filter(|c| c.is_rotationless())
        .map(|c| {
            let d = c.distinguished_count();
            CycleClass {
                cycle: c,
                in_r21: d >= 1,
                in_l21: d == 1,
            }
        })
        .collect()
}

/// Oriented classes with exactly `2 n` nodes and labels in `1..=max_label`.
pub fn oriented_cycles_bounded(n: usize, max_label: usize) -> Vec<ChequeredCycle> {
    let mut out = Vec::new();
    if n == 0 || max_label == 0 {
        return out;
    }
    let total = 2 * n;
    let mut idx = vec![0usize; total];
    loop {
        let pairs: Vec<(usize, usize)> = idx.chunks(2).map(|c| (c[0] + 1, c[1] + 1)).collect();
        if min_rotation(&pairs) == pairs {
            out.push(ChequeredCycle { pairs });
        }
        let mut i = 0;
        loop {
            if i == total {
                return out;
            }
            idx[i] += 1;
            if idx[i] < max_label {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Truncated product of `1 - omega(N)` over rotationless cycles of weight `<= cap`.
pub fn product_formula_det(a1: &CMat, a2: &CMat, cap: usize) -> Result<C64> {
    let mut p = C64::new(1.0, 0.0);
    for c in enumerate_rotationless_cycles(cap) {
        p *= C64::new(1.0, 0.0) - c.cycle.weight(a1, a2)?;
    }
    Ok(p)
}

/// Truncated `prod_{L in R21} (1 - omega(L))^{-1}`.
pub fn r21_product(a1: &CMat, a2: &CMat, cap: usize) -> Result<C64> {
    let mut p = C64::new(1.0, 0.0);
    for c in enumerate_rotationless_cycles(cap) {
        if c.in_r21 {
            p /= C64::new(1.0, 0.0) - c.cycle.weight(a1, a2)?;
        }
    }
    Ok(p)
}

/// Truncated `(1 - sum_{L in L21} omega(L))^{-1}`.
pub fn l21_geometric(a1: &CMat, a2: &CMat, cap: usize) -> Result<C64> {
    let mut s = C64::new(0.0, 0.0);
    for c in enumerate_rotationless_cycles(cap) {
        if c.in_l21 {
            s += c.cycle.weight(a1, a2)?;
        }
    }
    Ok((C64::new(1.0, 0.0) - s).inv())
}

/// `sum_{M in O_2n} (n / |Aut M|) omega(M)` over all labels of the truncation.
pub fn trace_via_cycles(a1: &CMat, a2: &CMat, n: usize) -> Result<C64> {
    let mut s = C64::new(0.0, 0.0);
    for c in oriented_cycles_bounded(n, a1.nrows()) {
        s += c.weight(a1, a2)? * (n as f64 / c.aut_order() as f64);
    }
    Ok(s)
}

/// Coefficients, graded by label weight `0..=w`, of
/// `sum_D omega(D) / |Aut D|` over chequered diagrams (disjoint unions of
/// unoriented cycles), enumerated diagram by diagram.
pub fn diagram_sum_graded(a1: &CMat, a2: &CMat, w: usize) -> Result<Vec<C64>> {
    let mut classes: BTreeMap<ChequeredCycle, ()> = BTreeMap::new();
    for c in enumerate_oriented_cycles(w) {
        classes.insert(c.unoriented_key(), ());
    }
    let mut items = Vec::new();
    for c in classes.keys() {
        items.push((c.label_weight(), c.weight(a1, a2)?, c.unoriented_aut_order() as f64));
    }
    let mut out = vec![C64::new(0.0, 0.0); w + 1];
    // choose multiplicities class by class
    fn go(items: &[(usize, C64, f64)], i: usize, wt: usize, val: C64, wmax: usize, out: &mut [C64]) {
        if i == items.len() {
            out[wt] += val;
            return;
        }
        let (s, om, aut) = items[i];
        let mut m = 0usize;
        let mut v = val;
        let mut cur = wt;
        loop {
            go(items, i + 1, cur, v, wmax, out);
            m += 1;
            cur += s;
            if cur > wmax {
                break;
            }
            v = v * om / (aut * m as f64);
        }
    }
    go(&items, 0, 0, C64::new(1.0, 0.0), w, &mut out);
    Ok(out)
}

/// Graded coefficients of `exp(1/2 sum_{M in O} omega(M)/|Aut M|)` up to weight `w`.
pub fn half_exp_oriented_graded(a1: &CMat, a2: &CMat, w: usize) -> Result<Vec<C64>> {
    let mut s = vec![C64::new(0.0, 0.0); w + 1];
    for c in enumerate_oriented_cycles(w) {
        s[c.label_weight()] += c.weight(a1, a2)? * (0.5 / c.aut_order() as f64);
    }
    // exp of a series without constant term: n e_n = sum_k k s_k e_{n-k}
    let mut e = vec![C64::new(0.0, 0.0); w + 1];
    e[0] = C64::new(1.0, 0.0);
    for n in 1..=w {
        let mut acc = C64::new(0.0, 0.0);
        for k in 1..=n {
            acc += s[k] * e[n - k] * k as f64;
        }
        e[n] = acc / n as f64;
    }
    Ok(e)
}

/// Oriented path with alternating edge types. A single node is the degenerate
/// necklace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChequeredNecklace {
    pub nodes: Vec<usize>,
    /// type (1 or 2) of the leftmost edge; ignored for the degenerate necklace
    pub first_edge: u8,
}

impl ChequeredNecklace {
    pub fn degenerate() -> Self {
        ChequeredNecklace {
            nodes: vec![1],
            first_edge: 1,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.nodes.len() == 1
    }

    fn edge_type(&self, i: usize) -> u8 {
        if i % 2 == 0 {
            self.first_edge
        } else {
            3 - self.first_edge
        }
    }

    /// Type `ab` when both ends carry label 1: the leftmost edge is `abar`
    /// and the rightmost edge is `bbar`.
    pub fn kind(&self) -> Option<(u8, u8)> {
        if self.is_degenerate() {
            return None;
        }
        let e = self.nodes.len() - 1;
        if self.nodes[0] != 1 || self.nodes[e] != 1 {
            return None;
        }
        Some((3 - self.first_edge, 3 - self.edge_type(e - 1)))
    }

    pub fn weight(&self, a1: &CMat, a2: &CMat) -> Result<C64> {
        let mut w = C64::new(1.0, 0.0);
        for i in 0..self.nodes.len().saturating_sub(1) {
            let m = if self.edge_type(i) == 1 { a1 } else { a2 };
            w *= entry(m, self.nodes[i], self.nodes[i + 1])?;
        }
        Ok(w)
    }
}

/// `omega_ab` for `a, b` in `{1, 2}` (indexed from 0), with the number of
/// necklaces visited.
#[derive(Clone, Debug, PartialEq)]
pub struct NecklaceSums {
    pub omega: [[C64; 2]; 2],
    pub visited: usize,
}

/// Explicit enumeration of the type `ab` necklaces with label weight `<= cap`.
/// Branches through an exactly vanishing edge are skipped.
pub fn necklace_sums(a1: &CMat, a2: &CMat, cap: usize) -> Result<NecklaceSums> {
    if cap > a1.nrows() + 1 || cap > a2.nrows() + 1 {
        return Err(Error::IndexError(format!(
            "cap {cap} needs a truncation of at least {}",
            cap - 1
        )));
    }
    let mats = [a1, a2];
    let mut omega = [[C64::new(0.0, 0.0); 2]; 2];
    let mut visited = 0usize;
    // ab = 12 and 21 contain the degenerate necklace
    omega[0][1] += C64::new(1.0, 0.0);
    omega[1][0] += C64::new(1.0, 0.0);
    visited += 2;
    #[allow(clippy::too_many_arguments)]
    fn go(
        mats: &[&CMat; 2],
        node: usize,
        edge: usize,
        left: usize,
        val: C64,
        first: usize,
        omega: &mut [[C64; 2]; 2],
        visited: &mut usize,
    ) {
        let m = mats[edge];
        for l in 1..=left.min(m.nrows()) {
            let e = m[(node - 1, l - 1)];
            if e == C64::new(0.0, 0.0) {
                continue;
            }
            let v = val * e;
            if l == 1 {
                // close here: type (firstbar, edgebar)
                omega[1 - first][1 - edge] += v;
                *visited += 1;
            }
            go(mats, l, 1 - edge, left - l, v, first, omega, visited);
        }
    }
    for first in 0..2 {
        go(&mats, 1, first, cap.saturating_sub(1), C64::new(1.0, 0.0), first, &mut omega, &mut visited);
    }
    Ok(NecklaceSums { omega, visited })
}

/// Node `(k, a)` of a doubly-indexed graph, `a` in `{0, 1}` for the two copies.
pub type DNode = (usize, usize);

fn r_entry(r: &BlockMomentMatrix, x: DNode, y: DNode) -> Result<C64> {
    if x.0 == 0 || y.0 == 0 || x.0 > r.n || y.0 > r.n || x.1 > 1 || y.1 > 1 {
        return Err(Error::IndexError(format!(
            "node {x:?} or {y:?} outside the truncation {}",
            r.n
        )));
    }
    Ok(r.get(x.1, y.1, x.0, y.0))
}

/// Cyclic word in the nodes `(k, a)`, single edge type.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DoublyIndexedCycle {
    nodes: Vec<DNode>,
}

impl DoublyIndexedCycle {
    pub fn new(nodes: &[DNode]) -> Result<Self> {
        if nodes.is_empty() || nodes.iter().any(|&(k, a)| k == 0 || a > 1) {
            return Err(Error::input("nodes must be (k >= 1, a in {0, 1})"));
        }
        Ok(DoublyIndexedCycle {
            nodes: min_rotation(nodes),
        })
    }

    pub fn nodes(&self) -> &[DNode] {
        &self.nodes
    }

    pub fn label_weight(&self) -> usize {
        self.nodes.iter().map(|n| n.0).sum()
    }

    pub fn aut_order(&self) -> usize {
        rotation_group_order(&self.nodes)
    }

    pub fn is_rotationless(&self) -> bool {
        self.aut_order() == 1
    }

    pub fn weight(&self, r: &BlockMomentMatrix) -> Result<C64> {
        let m = self.nodes.len();
        let mut w = C64::new(1.0, 0.0);
        for i in 0..m {
            w *= r_entry(r, self.nodes[i], self.nodes[(i + 1) % m])?;
        }
        Ok(w)
    }
}

/// Rotationless doubly-indexed cycles with label weight `<= w`.
pub fn enumerate_rotationless_doubly_indexed(w: usize) -> Vec<DoublyIndexedCycle> {
    fn go(cur: &mut Vec<DNode>, left: usize, out: &mut Vec<DoublyIndexedCycle>) {
        for k in 1..=left {
            for a in 0..2 {
                cur.push((k, a));
                if min_rotation(cur) == *cur && rotation_group_order(cur) == 1 {
                    out.push(DoublyIndexedCycle { nodes: cur.clone() });
                }
                go(cur, left - k, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), w, &mut out);
    out.sort();
    out
}

/// Truncated `prod (1 - omega(L))` over rotationless doubly-indexed cycles.
pub fn product_formula_det_rho(r: &BlockMomentMatrix, cap: usize) -> Result<C64> {
    let mut p = C64::new(1.0, 0.0);
    for c in enumerate_rotationless_doubly_indexed(cap) {
        p *= C64::new(1.0, 0.0) - c.weight(r)?;
    }
    Ok(p)
}

/// Necklace sums of the rho scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhoGraphSums {
    pub omega_11: C64,
    pub omega_b1: C64,
    pub omega_bbbar: C64,
}

/// Sums over doubly-indexed necklaces with label weight `<= cap`, accumulated
/// weight by weight: `v_s(x)` is the total over necklaces ending at node `x`
/// whose labels add up to `s`.
pub fn rho_graph_sums(r: &BlockMomentMatrix, b: &BVector, cap: usize) -> Result<RhoGraphSums> {
    let n = r.n;
    if cap > n {
        return Err(Error::IndexError(format!(
            "cap {cap} exceeds the truncation {n}"
        )));
    }
    let bbar = b.bar();
    let idx = |k: usize, a: usize| a * n + k - 1;
    let spread = |init: Vec<Vec<C64>>| -> Vec<Vec<C64>> {
        let mut v = init;
        for s in 1..=cap {
            for x in 0..2 * n {
                let val = v[s][x];
                if val == C64::new(0.0, 0.0) {
                    continue;
                }
                for l in 1..=cap - s {
                    for bb in 0..2 {
                        let y = idx(l, bb);
                        v[s + l][y] += val * r.r[(x, y)];
                    }
                }
            }
        }
        v
    };
    let zero = || vec![vec![C64::new(0.0, 0.0); 2 * n]; cap + 1];
    let mut one = zero();
    let mut fromb = zero();
    for a in 0..2 {
        one[1][idx(1, a)] = C64::new(1.0, 0.0);
        for k in 1..=cap {
            fromb[k][idx(k, a)] += b.b[idx(k, a)];
        }
    }
    let one = spread(one);
    let fromb = spread(fromb);
    let mut w11 = C64::new(0.0, 0.0);
    let mut wb1 = C64::new(0.0, 0.0);
    let mut wbb = C64::new(0.0, 0.0);
    for s in 1..=cap {
        for a in 0..2 {
            w11 += one[s][idx(1, a)];
            wb1 += fromb[s][idx(1, a)];
        }
        for x in 0..2 * n {
            wbb += fromb[s][x] * bbar[x];
        }
    }
    Ok(RhoGraphSums {
        omega_11: w11,
        omega_b1: wb1,
        omega_bbbar: wbb,
    })
}

/// Reduced F-form of a permutation of `T = {0..n-1}` with labels `f`: the
/// sorted multiset of primitive cyclic words, each repeated by its power.
pub fn reduced_f_form(perm: &[usize], f: &[usize]) -> Vec<Vec<usize>> {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut word = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            word.push(f[x]);
            x = perm[x];
        }
        let (y, r) = primitive_root(&word);
        let y = min_rotation(&y);
        for _ in 0..r {
            out.push(y.clone());
        }
    }
    out.sort();
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Sizes of the F-equivalence classes of the symmetric group on `f.len()`
/// points, keyed by reduced F-form.
pub fn f_equivalence_classes(f: &[usize]) -> BTreeMap<Vec<Vec<usize>>, usize> {
    let mut perm: Vec<usize> = (0..f.len()).collect();
    let mut out = BTreeMap::new();
    loop {
        *out.entry(reduced_f_form(&perm, f)).or_insert(0) += 1;
        if !next_permutation(&mut perm) {
            return out;
        }
    }
}

/// Label multiplicities `s_i` of `f`.
pub fn label_multiplicities(f: &[usize]) -> Vec<usize> {
    let mut m: BTreeMap<usize, usize> = BTreeMap::new();
    for &x in f {
        *m.entry(x).or_insert(0) += 1;
    }
    m.into_values().collect()
}

/// Outcome of an exhaustive F-equivalence count.
#[derive(Clone, Debug, PartialEq)]
pub struct FequivCheck {
    pub multiplicities: Vec<usize>,
    pub class_sizes: Vec<usize>,
    /// `prod s_i`
    pub product: usize,
    /// `prod s_i!`
    pub factorial_product: usize,
}

impl FequivCheck {
    /// Every class has `prod s_i` elements.
    pub fn product_rule_holds(&self) -> bool {
        self.class_sizes.iter().all(|&c| c == self.product)
    }

    /// Every class has `prod s_i!` elements.
    pub fn factorial_rule_holds(&self) -> bool {
        self.class_sizes.iter().all(|&c| c == self.factorial_product)
    }
}

pub fn check_f_equivalence(f: &[usize]) -> FequivCheck {
    let s = label_multiplicities(f);
    let fact = |n: usize| (1..=n).product::<usize>();
    FequivCheck {
        product: s.iter().product(),
        factorial_product: s.iter().map(|&x| fact(x)).product(),
        class_sizes: f_equivalence_classes(f).into_values().collect(),
        multiplicities: s,
    }
}
