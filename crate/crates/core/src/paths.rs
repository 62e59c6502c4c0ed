//! Component calculus on paths in `Γ(G, X∪𝓗)`.

use std::collections::HashMap;

use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{exact_rel_length, Path};
use crate::word::{Letter, SyllableKind, Word};
use crate::zoo::{CosetKey, ElementId, Group};

/// An `H_λ`-component: a maximal run of `H_λ`-letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub lambda: usize,
    /// Letter range `[start, end)`.
    pub start: usize,
    pub end: usize,
    pub s_minus: ElementId,
    pub s_plus: ElementId,
    /// Exponent of the subgroup generator.
    pub value: i64,
    /// `|s_-⁻¹ s_+|_X`.
    pub x_span: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentReport {
    pub components: Vec<Component>,
    /// Components grouped by `(λ, coset)`, in order of first occurrence.
    pub classes: Vec<Vec<usize>>,
    pub isolated: Vec<bool>,
    pub backtracking: bool,
    /// Indices of vertices not interior to any component.
    pub phase_vertices: Vec<usize>,
}

pub fn components(group: &Group, path: &Path) -> Vec<Component> {
    let o = &*group.oracle;
    let mut out = Vec::new();
    for syl in path.word.syllables() {
        let SyllableKind::Sub(lambda) = syl.kind else {
            continue;
        };
        let value: i64 = path.word.letters()[syl.start..syl.end]
            .iter()
            .map(|l| match l {
                Letter::Sub { elem, .. } => *elem,
                Letter::Gen { .. } => 0,
            })
            .sum();
        let s_minus = path.vertices[syl.start].clone();
        let s_plus = path.vertices[syl.end].clone();
        out.push(Component {
            lambda,
            start: syl.start,
            end: syl.end,
            value: group.pres.subgroups[lambda].normalize(value),
            x_span: o.x_distance(&s_minus, &s_plus),
            s_minus,
            s_plus,
        });
    }
    out
}

/// The connectivity key `(λ, coset of s_-)`.
pub fn class_key(group: &Group, c: &Component) -> (usize, CosetKey) {
    (c.lambda, group.oracle.coset_key(c.lambda, &c.s_minus))
}

pub fn connected(group: &Group, a: &Component, b: &Component) -> bool {
    a.lambda == b.lambda && class_key(group, a) == class_key(group, b)
}

fn classes_of(group: &Group, comps: &[&Component]) -> Vec<Vec<usize>> {
    let mut ids: HashMap<(usize, CosetKey), usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, c) in comps.iter().enumerate() {
        let id = *ids.entry(class_key(group, c)).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[id].push(i);
    }
    classes
}

pub fn analyze(group: &Group, path: &Path) -> ComponentReport {
    let components = components(group, path);
    let refs: Vec<&Component> = components.iter().collect();
    let classes = classes_of(group, &refs);
    let mut isolated = vec![false; components.len()];
    for class in &classes {
        if class.len() == 1 {
            isolated[class[0]] = true;
        }
    }
    let backtracking = classes.iter().any(|c| c.len() >= 2);
    let mut inner = vec![false; path.vertices.len()];
    for c in &components {
        for v in &mut inner[c.start + 1..c.end] {
            *v = true;
        }
    }
    let phase_vertices = (0..path.vertices.len()).filter(|&i| !inner[i]).collect();
    ComponentReport {
        components,
        classes,
        isolated,
        backtracking,
        phase_vertices,
    }
}

/// Connectivity classes of the pooled components of several paths; entries are
/// `(path index, component index)`.
pub fn pooled_classes(group: &Group, reports: &[&ComponentReport]) -> Vec<Vec<(usize, usize)>> {
    let mut labels = Vec::new();
    let mut refs = Vec::new();
    for (p, r) in reports.iter().enumerate() {
        for (i, c) in r.components.iter().enumerate() {
            labels.push((p, i));
            refs.push(c);
        }
    }
    classes_of(group, &refs)
        .into_iter()
        .map(|class| class.into_iter().map(|i| labels[i]).collect())
        .collect()
}

impl ComponentReport {
    pub fn to_json(&self, group: &Group) -> Value {
        let comps: Vec<Value> = self
            .components
            .iter()
            .map(|c| {
                let slot = &group.pres.subgroups[c.lambda];
                json!({
                    "subgroup": slot.name,
                    "letters": [c.start, c.end],
                    "s_minus": group.show(&c.s_minus),
                    "s_plus": group.show(&c.s_plus),
                    "value": crate::presentation::power(&slot.gen_name, c.value),
                    "x_span": c.x_span,
                })
            })
            .collect();
        json!({
            "components": comps,
            "classes": self.classes,
            "isolated": self.isolated,
            "backtracking": self.backtracking,
            "phase_vertices": self.phase_vertices,
        })
    }
}

/// Replaces every component by one letter of equal value; components of
/// trivial value are removed.
pub fn locally_minimal(group: &Group, path: &Path) -> Path {
    let mut word = path.word.clone();
    loop {
        let mut letters = Vec::with_capacity(word.len());
        let mut changed = false;
        for syl in word.syllables() {
            match syl.kind {
                SyllableKind::Gen => letters.extend_from_slice(&word.letters()[syl.start..syl.end]),
                SyllableKind::Sub(lambda) => {
                    if syl.len() > 1 {
                        changed = true;
                        let total: i64 = word.letters()[syl.start..syl.end]
                            .iter()
                            .map(|l| match l {
                                Letter::Sub { elem, .. } => *elem,
                                Letter::Gen { .. } => 0,
                            })
                            .sum();
                        if let Some(l) = group.pres.sub_letter(lambda, total) {
                            letters.push(l);
                        }
                    } else {
                        letters.push(word.letters()[syl.start]);
                    }
                }
            }
        }
        word = Word::new(letters);
        if !changed {
            break;
        }
    }
    Path::new(&*group.oracle, path.base.clone(), word)
}

/// Whether both endpoint pairs are within X-distance `k`.
pub fn k_similar(group: &Group, p: &Path, q: &Path, k: usize) -> bool {
    let o = &*group.oracle;
    o.x_distance(p.start(), q.start()) <= k && o.x_distance(p.end(), q.end()) <= k
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalToGlobal {
    pub k: usize,
    pub lambda: Ratio<i64>,
    pub c: Ratio<i64>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathClass {
    pub is_geodesic: bool,
    pub quasi_geodesic: bool,
    /// Largest `k` such that every subpath of length at most `k` is geodesic.
    pub local_geodesic_k: usize,
    /// The local-to-global check, run when `k > 8δ̂`.
    pub local_to_global: Option<LocalToGlobal>,
}

/// Exact relative distances between all pairs of path vertices.
pub fn vertex_distances(group: &Group, path: &Path) -> Result<Vec<Vec<usize>>> {
    let o = &*group.oracle;
    let n = path.vertices.len();
    let mut d = vec![vec![0; n]; n];
    for i in 0..n {
        let inv = o.invert(&path.vertices[i]);
        for j in i + 1..n {
            let e = o.multiply(&inv, &path.vertices[j]);
            let v = exact_rel_length(group, &e).ok_or_else(|| {
                Error::ExactnessUnavailable(format!("subpath [{i}, {j}] has no certified length"))
            })?;
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    Ok(d)
}

fn is_quasi(d: &[Vec<usize>], lambda: Ratio<i64>, c: Ratio<i64>) -> bool {
    let n = d.len();
    (0..n).all(|i| {
        (i + 1..n).all(|j| Ratio::from_integer((j - i) as i64) <= lambda * (d[i][j] as i64) + c)
    })
}

pub fn classify(
    group: &Group,
    path: &Path,
    lambda: Ratio<i64>,
    c: Ratio<i64>,
    delta_hat: Option<Ratio<i64>>,
) -> Result<PathClass> {
    let d = vertex_distances(group, path)?;
    let n = path.len();
    let is_geodesic = n == 0 || d[0][n] == n;
    let quasi_geodesic = is_quasi(&d, lambda, c);
    let mut local_geodesic_k = n;
    'outer: for len in 1..=n {
        for i in 0..=n - len {
            if d[i][i + len] != len {
                local_geodesic_k = len - 1;
                break 'outer;
            }
        }
    }
    let local_to_global = delta_hat.and_then(|delta| {
        let k = Ratio::from_integer(local_geodesic_k as i64);
        let four = delta * 4;
        (k > delta * 8).then(|| {
            let lambda = (k + four) / (k - four);
            let c = delta * 2;
            LocalToGlobal {
                k: local_geodesic_k,
                lambda,
                c,
                holds: is_quasi(&d, lambda, c),
            }
        })
    });
    Ok(PathClass {
        is_geodesic,
        quasi_geodesic,
        local_geodesic_k,
        local_to_global,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::rel_geodesic;
    use crate::zoo::presets;

    #[test]
    fn example_comp_report() {
        let b = presets::bs12();
        let p = Path::parse(&b, "@H(a^2) t^-1 @H(a) t @H(a^3)").unwrap();
        let r = analyze(&b, &p);
        assert_eq!(r.components.len(), 3);
        assert_eq!(r.classes, vec![vec![0, 2], vec![1]]);
        assert_eq!(r.isolated, vec![false, true, false]);
        assert!(r.backtracking);
        assert_eq!(r.phase_vertices, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn f2relx_reports() {
        let f = presets::f2relx();
        let r = analyze(&f, &Path::parse(&f, "y @H(x) y").unwrap());
        assert_eq!(r.components.len(), 1);
        assert_eq!(r.isolated, vec![true]);
        assert!(!r.backtracking);
        let r = analyze(&f, &Path::parse(&f, "@H(x) y y^-1 @H(x)").unwrap());
        assert_eq!(r.classes, vec![vec![0, 1]]);
        assert!(r.backtracking);
    }

    #[test]
    fn phase_vertices_skip_inner_vertices() {
        let f = presets::f2relx();
        let r = analyze(&f, &Path::parse(&f, "y @H(x) @H(x^2) y").unwrap());
        assert_eq!(r.components.len(), 1);
        assert_eq!(r.components[0].value, 3);
        assert_eq!(r.phase_vertices, vec![0, 1, 3, 4]);
    }

    #[test]
    fn locally_minimal_examples() {
        let f = presets::f2relx();
        let p = Path::parse(&f, "@H(x) @H(x^2) y").unwrap();
        let m = locally_minimal(&f, &p);
        assert_eq!(f.format(&m.word), "@H(x^3) y");
        assert_eq!(m.end(), p.end());
        assert_eq!(locally_minimal(&f, &m), m);
        let b = presets::bs12();
        let p = Path::parse(&b, "@H(a^2) t^-1 @H(a) t @H(a^3)").unwrap();
        assert_eq!(locally_minimal(&b, &p), p);
    }

    #[test]
    fn classify_examples() {
        let one = Ratio::from_integer(1);
        let zero = Ratio::from_integer(0);
        let f = presets::f2relx();
        let p = Path::parse(&f, "@H(x) @H(x^-1)").unwrap();
        let c = classify(&f, &p, one, Ratio::from_integer(2), None).unwrap();
        assert!(!c.is_geodesic);
        assert!(c.quasi_geodesic);
        let g = rel_geodesic(&f, &f.oracle.identity(), &f.element("y x^3 y x").unwrap()).unwrap();
        assert!(classify(&f, &g, one, zero, None).unwrap().is_geodesic);
        let z = presets::zz();
        let p = Path::parse(&z, "b @H(a) b^-1 @H(a^-1)").unwrap();
        let c = classify(&z, &p, Ratio::from_integer(100), zero, None).unwrap();
        assert_eq!(c.local_geodesic_k, 2);
        assert!(!c.quasi_geodesic);
    }

    #[test]
    fn local_to_global_runs_when_k_is_large() {
        let f = presets::f2relx();
        let g = rel_geodesic(&f, &f.oracle.identity(), &f.element("y x y x y").unwrap()).unwrap();
        let c = classify(
            &f,
            &g,
            Ratio::from_integer(1),
            Ratio::from_integer(0),
            Some(Ratio::new(1, 2)),
        )
        .unwrap();
        let l = c.local_to_global.unwrap();
        assert_eq!(l.k, 5);
        assert_eq!(l.lambda, Ratio::new(7, 3));
        assert!(l.holds);
    }

    #[test]
    fn k_similar_examples() {
        let f = presets::f2relx();
        let y_inv = f.element("y^-1").unwrap();
        let p = Path::new(&*f.oracle, y_inv, f.parse("y @H(x^6)").unwrap());
        let q = Path::parse(&f, "@H(x^6)").unwrap();
        assert!(k_similar(&f, &p, &q, 1));
        assert!(!k_similar(&f, &p, &q, 0));
        assert!(k_similar(&f, &q, &q, 0));
        let r = Path::parse(&f, "y^5").unwrap();
        let e = Path::parse(&f, "1").unwrap();
        assert!(!k_similar(&f, &r, &e, 4));
    }
}
