//! The relative Cayley graph `Γ(G, X∪𝓗)`: truncated materialization,
//! relative distances and deterministic geodesics.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::word::{Letter, Word};
use crate::zoo::{ElementId, Group, GroupOracle, DEFAULT_VERTEX_CAP};

/// A based edge path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub base: ElementId,
    pub word: Word,
    /// `v_0 = base`, `v_{i+1} = v_i · letter_i`.
    pub vertices: Vec<ElementId>,
}

impl Path {
    pub fn new(oracle: &dyn GroupOracle, base: ElementId, word: Word) -> Self {
        let mut vertices = Vec::with_capacity(word.len() + 1);
        vertices.push(base.clone());
        for &l in &word {
            let next = oracle.multiply(vertices.last().unwrap(), &oracle.letter_element(l));
            vertices.push(next);
        }
        Path {
            base,
            word,
            vertices,
        }
    }

    /// The path from 1 labelled by `text`.
    pub fn parse(group: &Group, text: &str) -> Result<Self> {
        Ok(Path::new(
            &*group.oracle,
            group.oracle.identity(),
            group.parse(text)?,
        ))
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn start(&self) -> &ElementId {
        &self.vertices[0]
    }

    pub fn end(&self) -> &ElementId {
        self.vertices.last().unwrap()
    }

    /// The subpath on letters `[i, j)`.
    pub fn subpath(&self, i: usize, j: usize) -> Path {
        Path {
            base: self.vertices[i].clone(),
            word: self.word.subword(i, j),
            vertices: self.vertices[i..=j].to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceResult {
    /// Always an upper bound for `dist_{X∪𝓗}`.
    pub value: usize,
    pub exact: bool,
    /// Truncation radius consulted; 0 when no graph search was needed.
    pub radius: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct DistanceOptions {
    pub radius: usize,
    pub vertex_cap: usize,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        DistanceOptions {
            radius: 3,
            vertex_cap: DEFAULT_VERTEX_CAP,
        }
    }
}

/// The subgraph of `Γ(G, X∪𝓗)` induced on an X-ball, with coset cliques
/// stored as partitions.
#[derive(Clone, Debug)]
pub struct TruncatedGraph {
    pub radius: usize,
    pub vertices: Vec<ElementId>,
    index: HashMap<ElementId, usize>,
    /// Per vertex: `(target, generator, inverse)`.
    pub x_edges: Vec<Vec<(usize, usize, bool)>>,
    /// Per subgroup: class id of each vertex.
    pub clique_of: Vec<Vec<usize>>,
    /// Per subgroup: members of each class.
    pub cliques: Vec<Vec<Vec<usize>>>,
}

impl TruncatedGraph {
    pub fn build(group: &Group, radius: usize, vertex_cap: usize) -> Result<Self> {
        let oracle = &*group.oracle;
        if oracle.num_generators() == 0 {
            return Err(Error::EmptyGeneratingSet);
        }
        let vertices = oracle.enumerate_x_ball(radius, vertex_cap)?;
        let index: HashMap<ElementId, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let steps: Vec<(usize, bool, ElementId)> = (0..oracle.num_generators())
            .flat_map(|i| {
                let g = oracle.generator(i);
                [(i, false, g.clone()), (i, true, oracle.invert(&g))]
            })
            .collect();
        let x_edges = vertices
            .iter()
            .map(|v| {
                steps
                    .iter()
                    .filter_map(|(i, inv, s)| {
                        index.get(&oracle.multiply(v, s)).map(|&t| (t, *i, *inv))
                    })
                    .collect()
            })
            .collect();
        let mut clique_of = Vec::new();
        let mut cliques = Vec::new();
        for lambda in 0..oracle.num_subgroups() {
            let mut ids = HashMap::new();
            let mut members: Vec<Vec<usize>> = Vec::new();
            let mut of = Vec::with_capacity(vertices.len());
            for (i, v) in vertices.iter().enumerate() {
                let key = oracle.coset_key(lambda, v);
                let id = *ids.entry(key).or_insert_with(|| {
                    members.push(Vec::new());
                    members.len() - 1
                });
                members[id].push(i);
                of.push(id);
            }
            clique_of.push(of);
            cliques.push(members);
        }
        Ok(TruncatedGraph {
            radius,
            vertices,
            index,
            x_edges,
            clique_of,
            cliques,
        })
    }

    pub fn contains(&self, g: &ElementId) -> bool {
        self.index.contains_key(g)
    }

    pub fn index_of(&self, g: &ElementId) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn num_x_edges(&self) -> usize {
        self.x_edges.iter().map(Vec::len).sum()
    }

    /// Breadth-first distance from the identity to `target` inside the ball.
    pub fn bfs_distance(&self, group: &Group, target: &ElementId) -> Result<usize> {
        let oracle = &*group.oracle;
        let t = self
            .index_of(target)
            .ok_or_else(|| Error::OutsideTruncation(oracle.format_element(target), self.radius))?;
        let s = 0;
        if s == t {
            return Ok(0);
        }
        let mut dist = vec![usize::MAX; self.vertices.len()];
        let mut expanded: Vec<Vec<bool>> =
            self.cliques.iter().map(|c| vec![false; c.len()]).collect();
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v] + 1;
            let mut visit = |w: usize, queue: &mut VecDeque<usize>| {
                if dist[w] == usize::MAX {
                    dist[w] = d;
                    queue.push_back(w);
                }
            };
            for &(w, _, _) in &self.x_edges[v] {
                visit(w, &mut queue);
            }
            for (lambda, of) in self.clique_of.iter().enumerate() {
                let c = of[v];
                if !expanded[lambda][c] {
                    expanded[lambda][c] = true;
                    for &w in &self.cliques[lambda][c] {
                        visit(w, &mut queue);
                    }
                }
            }
            if dist[t] != usize::MAX {
                return Ok(dist[t]);
            }
        }
        Err(Error::OutsideTruncation(
            oracle.format_element(target),
            self.radius,
        ))
    }

    /// `dist_{X∪𝓗}(g, h)` as seen from this ball.
    pub fn rel_distance(
        &self,
        group: &Group,
        g: &ElementId,
        h: &ElementId,
    ) -> Result<DistanceResult> {
        let d = group.oracle.multiply(&group.oracle.invert(g), h);
        if let Some(value) = exact_rel_length(group, &d) {
            return Ok(DistanceResult {
                value,
                exact: true,
                radius: 0,
            });
        }
        let value = self.bfs_distance(group, &d)?;
        Ok(DistanceResult {
            value,
            exact: false,
            radius: self.radius,
        })
    }
}

/// Length 0 or 1 by direct test.
fn small_rel_length(group: &Group, d: &ElementId) -> Option<usize> {
    let o = &*group.oracle;
    if o.is_identity(d) {
        return Some(0);
    }
    let one_letter = (0..o.num_generators()).any(|i| {
        let g = o.generator(i);
        g == *d || o.invert(&g) == *d
    }) || (0..o.num_subgroups()).any(|l| o.subgroup_membership(l, d).is_some());
    one_letter.then_some(1)
}

/// `|d|_{X∪𝓗}` when it can be certified: by the oracle formula, or when it is
/// at most 1.
pub fn exact_rel_length(group: &Group, d: &ElementId) -> Option<usize> {
    group
        .oracle
        .relative_length_exact(d)
        .or_else(|| small_rel_length(group, d))
}

/// `dist_{X∪𝓗}(g, h)`. Exact via the oracle formula or a direct edge test;
/// otherwise an upper bound from breadth-first search in the X-ball.
pub fn rel_distance(
    group: &Group,
    g: &ElementId,
    h: &ElementId,
    opts: &DistanceOptions,
) -> Result<DistanceResult> {
    let d = group.oracle.multiply(&group.oracle.invert(g), h);
    if let Some(value) = exact_rel_length(group, &d) {
        return Ok(DistanceResult {
            value,
            exact: true,
            radius: 0,
        });
    }
    let graph = TruncatedGraph::build(group, opts.radius, opts.vertex_cap)?;
    let value = graph.bfs_distance(group, &d)?;
    Ok(DistanceResult {
        value,
        exact: false,
        radius: opts.radius,
    })
}

/// A geodesic from `g` to `h` with the deterministic tie-break: X-letters
/// before subgroup letters, generators in declaration order with `+` before
/// `-`, subgroups ascending, subgroup targets in vertex order.
pub fn rel_geodesic(group: &Group, g: &ElementId, h: &ElementId) -> Result<Path> {
    let o = &*group.oracle;
    let exact = |c: &ElementId| -> Result<usize> {
        let d = o.multiply(&o.invert(c), h);
        exact_rel_length(group, &d).ok_or_else(|| {
            Error::ExactnessUnavailable(format!(
                "no certified relative length for {}",
                o.format_element(&d)
            ))
        })
    };
    let mut letters = Vec::new();
    let mut c = g.clone();
    let mut r = exact(&c)?;
    while r > 0 {
        let step = next_step(group, &c, h, r, &exact)?;
        c = o.multiply(&c, &o.letter_element(step));
        letters.push(step);
        r -= 1;
    }
    Ok(Path::new(o, g.clone(), Word::new(letters)))
}

fn next_step(
    group: &Group,
    c: &ElementId,
    h: &ElementId,
    r: usize,
    exact: &dyn Fn(&ElementId) -> Result<usize>,
) -> Result<Letter> {
    let o = &*group.oracle;
    for i in 0..o.num_generators() {
        for inverse in [false, true] {
            let l = Letter::gen(i, inverse);
            let next = o.multiply(c, &o.letter_element(l));
            if exact(&next)? == r - 1 {
                return Ok(l);
            }
        }
    }
    let rest = o.multiply(&o.invert(c), h);
    let bound = o.x_length(&rest) as i64;
    for lambda in 0..o.num_subgroups() {
        let slot = &group.pres.subgroups[lambda];
        let mut exps: Vec<i64> = (-bound..=bound).map(|e| slot.normalize(e)).collect();
        if let Some(e) = o.subgroup_membership(lambda, &rest) {
            exps.push(e);
        }
        exps.retain(|&e| e != 0);
        exps.sort_unstable();
        exps.dedup();
        let mut cands: Vec<(usize, String, i64, ElementId)> = exps
            .into_iter()
            .map(|e| {
                let v = o.multiply(c, &o.subgroup_element(lambda, e));
                (o.x_length(&v), o.format_element(&v), e, v)
            })
            .collect();
        cands.sort();
        for (_, _, e, v) in cands {
            if exact(&v)? == r - 1 {
                return Ok(Letter::Sub {
                    index: lambda as u32,
                    elem: e,
                });
            }
        }
    }
    Err(Error::ExactnessUnavailable(format!(
        "no descent step found from {}",
        o.format_element(c)
    )))
}
