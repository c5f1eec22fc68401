//! Reference implementations and random instance generators shared by the
//! property tests and the acceptance suite. Kept deliberately naive.
#![allow(dead_code)]

use std::collections::BTreeMap;

use lexigraph_core::ingestion::LexicalUnit;
use lexigraph_core::morphology::{FamilyId, FamilyMember, FamilySet, WordFamily};
use lexigraph_core::semantics::{Edge, EmbeddingTable, FamilyGraph, GraphParams};
use lexigraph_core::Pos;
use rand::Rng;

pub fn naive_cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for i in 0..a.len() {
        dot += a[i] * b[i];
    }
    for x in a {
        na += x * x;
    }
    for x in b {
        nb += x * x;
    }
    dot / (na.sqrt() * nb.sqrt())
}

/// Families with raw member vectors; `None` marks an out-of-vocabulary member.
pub struct SyntheticBook {
    pub vectors: Vec<Vec<Option<Vec<f64>>>>,
    pub families: FamilySet,
    pub table: EmbeddingTable,
}

fn letters(mut i: usize) -> String {
    let mut s = String::new();
    loop {
        s.push((b'a' + (i % 26) as u8) as char);
        i /= 26;
        if i == 0 {
            return s;
        }
    }
}

/// Up to `max_families` families of 1 to 3 members over `dim`-dimensional
/// vectors. Some members are out of vocabulary and some vectors are exact
/// copies of earlier ones so that weight ties occur.
pub fn synthetic_book(rng: &mut impl Rng, max_families: usize, dim: usize) -> SyntheticBook {
    let n = rng.gen_range(1..=max_families);
    let mut pool: Vec<Vec<f64>> = Vec::new();
    let mut vectors = Vec::with_capacity(n);
    let mut families = Vec::with_capacity(n);
    let mut table = EmbeddingTable::new(dim);
    for f in 0..n {
        let members = rng.gen_range(1..=3);
        let mut fam_vectors = Vec::new();
        let mut fam_members = Vec::new();
        for m in 0..members {
            let lemma = format!("{}x{}", letters(f), letters(m));
            let v = match rng.gen_range(0..10) {
                0 => None,
                1 | 2 if !pool.is_empty() => Some(pool[rng.gen_range(0..pool.len())].clone()),
                _ => {
                    // bias towards a shared direction so many pairs pass the threshold
                    let v: Vec<f64> = (0..dim)
                        .map(|d| rng.gen_range(-1.0..1.0) + if d == 0 { 0.8 } else { 0.0 })
                        .collect();
                    Some(v)
                }
            };
            if let Some(v) = &v {
                pool.push(v.clone());
                table.insert(lemma.clone(), v.clone()).unwrap();
            }
            fam_vectors.push(v);
            fam_members.push(FamilyMember {
                unit: LexicalUnit::new(&lemma, Pos::Noun).unwrap(),
                level: 1,
                forms: vec![],
            });
        }
        // keep vector order aligned with the sorted members
        let mut paired: Vec<(FamilyMember, Option<Vec<f64>>)> = fam_members.into_iter().zip(fam_vectors).collect();
        paired.sort_by(|a, b| a.0.unit.cmp(&b.0.unit));
        let (fam_members, fam_vectors): (Vec<_>, Vec<_>) = paired.into_iter().unzip();
        vectors.push(fam_vectors);
        families.push(WordFamily {
            id: FamilyId(f as u32),
            base: fam_members[0].unit.lemma.clone(),
            representative: fam_members[0].unit.clone(),
            members: fam_members,
        });
    }
    SyntheticBook {
        vectors,
        families: FamilySet::new("synthetic", 6, families),
        table,
    }
}

/// All pairwise family weights, threshold, then keep an edge when fewer than
/// `k` heavier edges touch at least one of its endpoints.
pub fn brute_force_graph(vectors: &[Vec<Option<Vec<f64>>>], tau: f64, k: usize) -> BTreeMap<(u32, u32), f64> {
    let n = vectors.len();
    let mut kept: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut best: Option<f64> = None;
            for a in vectors[i].iter().flatten() {
                for b in vectors[j].iter().flatten() {
                    if a.iter().all(|x| *x == 0.0) || b.iter().all(|x| *x == 0.0) {
                        continue;
                    }
                    let c = naive_cosine(a, b);
                    if best.is_none_or(|m| c > m) {
                        best = Some(c);
                    }
                }
            }
            if let Some(w) = best {
                if w >= tau {
                    kept.insert((i as u32, j as u32), w);
                }
            }
        }
    }
    let heavier = |node: u32, w: f64| {
        kept.iter()
            .filter(|((a, b), x)| (*a == node || *b == node) && **x > w)
            .count()
    };
    kept.iter()
        .filter(|((a, b), w)| heavier(*a, **w) < k || heavier(*b, **w) < k)
        .map(|(e, w)| (*e, *w))
        .collect()
}

/// Random undirected graph on at most `max_nodes` nodes, edge weights in
/// [0.3, 1]; a share of instances is split into several components.
pub fn random_graph(rng: &mut impl Rng, max_nodes: usize) -> FamilyGraph {
    let n = rng.gen_range(1..=max_nodes);
    let p: f64 = rng.gen_range(0.02..0.4);
    let components = rng.gen_range(1..=3usize);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if a % components == b % components && rng.gen_bool(p) {
                edges.push(Edge {
                    a: FamilyId(a as u32),
                    b: FamilyId(b as u32),
                    weight: rng.gen_range(0.3..=1.0),
                });
            }
        }
    }
    FamilyGraph::from_edges("random", GraphParams::default(), n, edges).unwrap()
}

/// Floyd-Warshall hop distances, then the reachable-fraction closeness.
pub fn reference_closeness(graph: &FamilyGraph) -> Vec<f64> {
    let n = graph.node_count();
    const INF: usize = usize::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for e in graph.edges() {
        d[e.a.index()][e.b.index()] = 1;
        d[e.b.index()][e.a.index()] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    (0..n)
        .map(|i| {
            let reach: Vec<usize> = (0..n).filter(|&j| j != i && d[i][j] < INF).map(|j| d[i][j]).collect();
            if n <= 1 || reach.is_empty() {
                return 0.0;
            }
            let r = reach.len() as f64;
            let total: usize = reach.iter().sum();
            (r / (n - 1) as f64) * (r / total as f64)
        })
        .collect()
}

/// Dense-matrix learner model: the direct and spread formulas, applied
/// literally.
pub struct ReferenceModel {
    pub mastery: Vec<f64>,
    weights: Vec<Vec<f64>>,
    alpha: f64,
    beta: f64,
}

impl ReferenceModel {
    pub fn new(graph: &FamilyGraph, alpha: f64, beta: f64) -> Self {
        let n = graph.node_count();
        let mut weights = vec![vec![0.0; n]; n];
        for e in graph.edges() {
            weights[e.a.index()][e.b.index()] = e.weight;
            weights[e.b.index()][e.a.index()] = e.weight;
        }
        ReferenceModel {
            mastery: vec![0.5; n],
            weights,
            alpha,
            beta,
        }
    }

    pub fn apply(&mut self, i: usize, r: f64) {
        let m = self.mastery[i];
        self.mastery[i] = (m + m * self.alpha * r).clamp(0.0, 1.0);
        for j in 0..self.mastery.len() {
            let w = self.weights[i][j];
            if w > 0.0 {
                let m = self.mastery[j];
                self.mastery[j] = (m + m * (self.beta * r * w)).clamp(0.0, 1.0);
            }
        }
    }
}

/// Random spanning tree on `2..=max_nodes` nodes plus extra random edges.
pub fn random_connected_graph(rng: &mut impl Rng, max_nodes: usize) -> FamilyGraph {
    let n = rng.gen_range(2..=max_nodes);
    let mut pairs = BTreeMap::new();
    for b in 1..n {
        pairs.insert((rng.gen_range(0..b), b), rng.gen_range(0.3..=1.0));
    }
    for _ in 0..rng.gen_range(0..n) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            pairs.insert((a.min(b), a.max(b)), rng.gen_range(0.3..=1.0));
        }
    }
    let edges = pairs.into_iter().map(|((a, b), weight)| Edge {
        a: FamilyId(a as u32),
        b: FamilyId(b as u32),
        weight,
    });
    FamilyGraph::from_edges("connected", GraphParams::default(), n, edges).unwrap()
}
