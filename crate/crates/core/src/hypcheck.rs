//! Empirical estimators for thin triangles, bounded coset penetration and
//! relative quasi-convexity.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::{exact_rel_length, rel_geodesic, Path};
use crate::paths::{analyze, classify, connected, k_similar, ComponentReport};
use crate::zoo::{ElementId, Group, GroupOracle};

/// How triangles or pairs are drawn from a ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sample {
    Exhaustive,
    /// `count` draws from a ChaCha stream; runs with the same seed and a
    /// larger count extend the smaller one.
    Seeded {
        count: usize,
        seed: u64,
    },
}

fn exact_dist(group: &Group, g: &ElementId, h: &ElementId) -> Result<usize> {
    let o = &*group.oracle;
    let d = o.multiply(&o.invert(g), h);
    exact_rel_length(group, &d).ok_or_else(|| {
        Error::ExactnessUnavailable(format!("no certified length for {}", o.format_element(&d)))
    })
}

fn ball(group: &Group, radius: usize) -> Result<Vec<ElementId>> {
    let cap = crate::zoo::DEFAULT_VERTEX_CAP;
    group.oracle.enumerate_x_ball(radius, cap)
}

fn sample_pairs(n: usize, sample: Sample) -> Vec<(usize, usize)> {
    match sample {
        Sample::Exhaustive => (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect(),
        Sample::Seeded { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect()
        }
    }
}

#[cfg(feature = "parallel")]
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.iter().map(f).collect()
}

/// A geodesic triangle with vertices `1, y, z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriangleReport {
    pub y: String,
    pub z: String,
    /// Sides `[1,y]`, `[1,z]`, `[y,z]` in the word grammar.
    pub sides: [String; 3],
    /// Doubled tripod parameters `2a, 2b, 2c`.
    pub tripod2: [usize; 3],
    /// Some tripod parameter is a half-integer.
    pub half_integer: bool,
    pub rips: usize,
    pub xi: usize,
    pub nu: usize,
}

struct Triangle {
    sides: [Path; 3],
}

impl Triangle {
    fn new(group: &Group, y: &ElementId, z: &ElementId) -> Result<Self> {
        let one = group.oracle.identity();
        Ok(Triangle {
            sides: [
                rel_geodesic(group, &one, y)?,
                rel_geodesic(group, &one, z)?,
                rel_geodesic(group, y, z)?,
            ],
        })
    }

    fn report(&self, group: &Group) -> Result<TriangleReport> {
        let o = &*group.oracle;
        let [pxy, pxz, pyz] = &self.sides;
        let (dxy, dxz, dyz) = (pxy.len(), pxz.len(), pyz.len());
        let tripod2 = [dxy + dxz - dyz, dxy + dyz - dxz, dxz + dyz - dxy];
        let mut rips = 0;
        let mut nu = 0;
        for (i, side) in self.sides.iter().enumerate() {
            let others: Vec<&ElementId> = (0..3)
                .filter(|&j| j != i)
                .flat_map(|j| self.sides[j].vertices.iter())
                .collect();
            for v in &side.vertices {
                let mut best = usize::MAX;
                let mut best_x = usize::MAX;
                for u in &others {
                    best = best.min(exact_dist(group, v, u)?);
                    best_x = best_x.min(o.x_distance(v, u));
                }
                rips = rips.max(best);
                nu = nu.max(best_x);
            }
        }
        // Conjugate points at equal distance from a shared corner.
        let yz_rev: Vec<&ElementId> = pyz.vertices.iter().rev().collect();
        let xy_rev: Vec<&ElementId> = pxy.vertices.iter().rev().collect();
        let xz_rev: Vec<&ElementId> = pxz.vertices.iter().rev().collect();
        let pairs: [(Vec<&ElementId>, Vec<&ElementId>, usize); 3] = [
            (
                pxy.vertices.iter().collect(),
                pxz.vertices.iter().collect(),
                tripod2[0] / 2,
            ),
            (xy_rev, pyz.vertices.iter().collect(), tripod2[1] / 2),
            (xz_rev, yz_rev, tripod2[2] / 2),
        ];
        let mut xi = 0;
        for (s, t, len) in &pairs {
            for k in 0..=*len {
                xi = xi.max(exact_dist(group, s[k], t[k])?);
            }
        }
        Ok(TriangleReport {
            y: o.format_element(pxy.end()),
            z: o.format_element(pxz.end()),
            sides: self.sides.clone().map(|p| group.format(&p.word)),
            half_integer: tripod2.iter().any(|t| t % 2 == 1),
            tripod2,
            rips,
            xi,
            nu,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaReport {
    pub radius: usize,
    pub sample: Sample,
    pub triangles: usize,
    pub delta_hat: usize,
    pub xi_hat: usize,
    pub nu_hat: usize,
    /// Triangles attaining `δ̂`, `ξ̂` and `ν̂`.
    pub worst_delta: Option<TriangleReport>,
    pub worst_xi: Option<TriangleReport>,
    pub worst_nu: Option<TriangleReport>,
}

impl DeltaReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn worst(
    reports: &[TriangleReport],
    key: impl Fn(&TriangleReport) -> usize,
) -> Option<TriangleReport> {
    // First triangle attaining the maximum, independent of evaluation order.
    let m = reports.iter().map(&key).max()?;
    reports.iter().find(|r| key(r) == m).cloned()
}

/// Scans geodesic triangles `(1, y, z)` with `y, z` in the X-ball of the given
/// radius, measuring Rips thinness, tripod thinness and X-thinness.
pub fn estimate_delta(group: &Group, radius: usize, sample: Sample) -> Result<DeltaReport> {
    let pts = ball(group, radius)?;
    let pairs = sample_pairs(pts.len(), sample);
    let reports: Vec<Result<TriangleReport>> = par_map(&pairs, |&(i, j)| {
        Triangle::new(group, &pts[i], &pts[j])?.report(group)
    });
    let reports: Vec<TriangleReport> = reports.into_iter().collect::<Result<_>>()?;
    Ok(DeltaReport {
        radius,
        sample,
        triangles: reports.len(),
        delta_hat: reports.iter().map(|r| r.rips).max().unwrap_or(0),
        xi_hat: reports.iter().map(|r| r.xi).max().unwrap_or(0),
        nu_hat: reports.iter().map(|r| r.nu).max().unwrap_or(0),
        worst_delta: worst(&reports, |r| r.rips),
        worst_xi: worst(&reports, |r| r.xi),
        worst_nu: worst(&reports, |r| r.nu),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NuReport {
    pub radius: usize,
    pub triangles: usize,
    pub nu_hat: usize,
    pub witness: Option<TriangleReport>,
    /// Over quadrilaterals `(1, y, z, w)`: max over side vertices of the
    /// X-distance to the other three sides.
    pub quadrilaterals: usize,
    pub quad_nu_hat: usize,
}

/// X-thinness of relative geodesic triangles and quadrilaterals.
pub fn nu_scan(group: &Group, radius: usize, sample: Sample) -> Result<NuReport> {
    let d = estimate_delta(group, radius, sample)?;
    let pts = ball(group, radius)?;
    let quads: Vec<(usize, usize, usize)> = match sample {
        Sample::Exhaustive => sample_pairs(pts.len(), sample)
            .into_iter()
            .map(|(i, j)| (i, j, (i * 7 + j * 13) % pts.len()))
            .collect(),
        Sample::Seeded { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5155_4144);
            let n = pts.len();
            (0..count)
                .map(|_| {
                    (
                        rng.gen_range(0..n),
                        rng.gen_range(0..n),
                        rng.gen_range(0..n),
                    )
                })
                .collect()
        }
    };
    let o = &*group.oracle;
    let vals: Vec<Result<usize>> = par_map(&quads, |&(i, j, k)| {
        let one = o.identity();
        let corners = [&one, &pts[i], &pts[j], &pts[k]];
        let sides: Vec<Path> = (0..4)
            .map(|s| rel_geodesic(group, corners[s], corners[(s + 1) % 4]))
            .collect::<Result<_>>()?;
        let mut m = 0;
        for (s, side) in sides.iter().enumerate() {
            for v in &side.vertices {
                let best = sides
                    .iter()
                    .enumerate()
                    .filter(|&(t, _)| t != s)
                    .flat_map(|(_, p)| p.vertices.iter())
                    .map(|u| o.x_distance(v, u))
                    .min()
                    .unwrap_or(0);
                m = m.max(best);
            }
        }
        Ok(m)
    });
    let vals: Vec<usize> = vals.into_iter().collect::<Result<_>>()?;
    Ok(NuReport {
        radius,
        triangles: d.triangles,
        nu_hat: d.nu_hat,
        witness: d.worst_nu,
        quadrilaterals: vals.len(),
        quad_nu_hat: vals.into_iter().max().unwrap_or(0),
    })
}

/// Quasi-geodesic constants and similarity bound required of a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BcpParams {
    pub lambda: Ratio<i64>,
    pub c: Ratio<i64>,
    pub k: usize,
}

impl Default for BcpParams {
    fn default() -> Self {
        BcpParams {
            lambda: Ratio::from_integer(1),
            c: Ratio::from_integer(0),
            k: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum BcpWitness {
    /// A component of one path with no connected partner in the other.
    Unpartnered {
        path: char,
        component: usize,
        x_span: usize,
    },
    /// Connected components whose endpoints are far apart.
    Endpoints {
        p_component: usize,
        q_component: usize,
        x_distance: usize,
    },
    /// A phase vertex of one path far from all phase vertices of the other.
    Phase {
        path: char,
        vertex: usize,
        x_distance: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BcpReport {
    pub params: BcpParams,
    pub threshold: usize,
    /// Unmet preconditions; the margins are still measured.
    pub diagnostics: Vec<String>,
    pub margins: [usize; 3],
    pub epsilon_hat: usize,
    pub passes: [bool; 3],
    /// Witnesses for the conditions failing at `threshold`.
    pub violations: Vec<BcpWitness>,
    pub p: String,
    pub q: String,
}

impl BcpReport {
    pub fn all_pass(&self) -> bool {
        self.passes.iter().all(|&b| b)
    }
}

fn unpartnered(
    group: &Group,
    a: &ComponentReport,
    b: &ComponentReport,
    tag: char,
) -> Vec<(usize, BcpWitness)> {
    a.components
        .iter()
        .enumerate()
        .filter(|(_, s)| !b.components.iter().any(|t| connected(group, s, t)))
        .map(|(i, s)| {
            (
                s.x_span,
                BcpWitness::Unpartnered {
                    path: tag,
                    component: i,
                    x_span: s.x_span,
                },
            )
        })
        .collect()
}

fn phase_gaps(
    o: &dyn GroupOracle,
    a: &Path,
    ra: &ComponentReport,
    b: &Path,
    rb: &ComponentReport,
    tag: char,
) -> Vec<(usize, BcpWitness)> {
    ra.phase_vertices
        .iter()
        .map(|&i| {
            let d = rb
                .phase_vertices
                .iter()
                .map(|&j| o.x_distance(&a.vertices[i], &b.vertices[j]))
                .min()
                .unwrap_or(usize::MAX);
            (
                d,
                BcpWitness::Phase {
                    path: tag,
                    vertex: i,
                    x_distance: d,
                },
            )
        })
        .collect()
}

/// Measures the three coset-penetration conditions for `p` and `q` and tests
/// them against `threshold`.
pub fn bcp_check(
    group: &Group,
    p: &Path,
    q: &Path,
    params: &BcpParams,
    threshold: usize,
) -> Result<BcpReport> {
    let o = &*group.oracle;
    let mut diagnostics = Vec::new();
    if !k_similar(group, p, q, params.k) {
        diagnostics.push(format!("paths are not {}-similar", params.k));
    }
    let rp = analyze(group, p);
    let rq = analyze(group, q);
    for (name, path, r) in [("p", p, &rp), ("q", q, &rq)] {
        if r.backtracking {
            diagnostics.push(format!("{name} backtracks"));
        }
        match classify(group, path, params.lambda, params.c, None) {
            Ok(c) if !c.quasi_geodesic => diagnostics.push(format!(
                "{name} is not a ({}, {})-quasi-geodesic",
                params.lambda, params.c
            )),
            Ok(_) => {}
            Err(e) => diagnostics.push(format!("{name}: {e}")),
        }
    }

    let mut cond: [Vec<(usize, BcpWitness)>; 3] = Default::default();
    cond[0] = unpartnered(group, &rp, &rq, 'p');
    cond[0].extend(unpartnered(group, &rq, &rp, 'q'));
    for (i, s) in rp.components.iter().enumerate() {
        for (j, t) in rq.components.iter().enumerate() {
            if connected(group, s, t) {
                let d = o
                    .x_distance(&s.s_minus, &t.s_minus)
                    .max(o.x_distance(&s.s_plus, &t.s_plus));
                cond[1].push((
                    d,
                    BcpWitness::Endpoints {
                        p_component: i,
                        q_component: j,
                        x_distance: d,
                    },
                ));
            }
        }
    }
    cond[2] = phase_gaps(o, p, &rp, q, &rq, 'p');
    cond[2].extend(phase_gaps(o, q, &rq, p, &rp, 'q'));

    let margins = cond
        .clone()
        .map(|c| c.iter().map(|(d, _)| *d).max().unwrap_or(0));
    let passes = margins.map(|m| m <= threshold);
    let violations = cond
        .into_iter()
        .flatten()
        .filter(|(d, _)| *d > threshold)
        .map(|(_, w)| w)
        .collect();
    Ok(BcpReport {
        params: *params,
        threshold,
        diagnostics,
        epsilon_hat: margins.iter().copied().max().unwrap_or(0),
        margins,
        passes,
        violations,
        p: format!(
            "{} from {}",
            group.format(&p.word),
            o.format_element(p.start())
        ),
        q: format!(
            "{} from {}",
            group.format(&q.word),
            o.format_element(q.start())
        ),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BcpScan {
    pub pairs: usize,
    pub epsilon_hat: usize,
    pub failures: usize,
    pub worst: Option<BcpReport>,
}

/// Samples geodesic pairs `p: 1 → g`, `q: s → g h` with `|s|_X, |h|_X ≤ k` and
/// `|g|_X ≤ radius`, and records the largest measured `ε̂`.
pub fn bcp_scan(
    group: &Group,
    radius: usize,
    k: usize,
    count: usize,
    seed: u64,
    threshold: usize,
) -> Result<BcpScan> {
    let o = &*group.oracle;
    let far = ball(group, radius)?;
    let near = ball(group, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks: Vec<(usize, usize, usize)> = (0..count)
        .map(|_| {
            (
                rng.gen_range(0..far.len()),
                rng.gen_range(0..near.len()),
                rng.gen_range(0..near.len()),
            )
        })
        .collect();
    let params = BcpParams {
        k,
        ..Default::default()
    };
    let reports: Vec<Result<BcpReport>> = par_map(&picks, |&(g, s, h)| {
        let one = o.identity();
        let p = rel_geodesic(group, &one, &far[g])?;
        let q = rel_geodesic(group, &near[s], &o.multiply(&far[g], &near[h]))?;
        bcp_check(group, &p, &q, &params, threshold)
    });
    let reports: Vec<BcpReport> = reports.into_iter().collect::<Result<_>>()?;
    let epsilon_hat = reports.iter().map(|r| r.epsilon_hat).max().unwrap_or(0);
    Ok(BcpScan {
        pairs: reports.len(),
        epsilon_hat,
        failures: reports
            .iter()
            .filter(|r| !r.all_pass() || !r.diagnostics.is_empty())
            .count(),
        worst: reports.into_iter().find(|r| r.epsilon_hat == epsilon_hat),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QcReport {
    pub generators: Vec<String>,
    pub radius: usize,
    pub subgroup_elements: usize,
    pub samples: usize,
    pub sigma_hat: usize,
    pub witness: Option<(String, String)>,
    pub cap_hit: bool,
}

/// Distance from geodesics between subgroup elements to the enumerated
/// subgroup ball.
pub fn quasiconvexity_scan(
    group: &Group,
    generators: &[ElementId],
    radius: usize,
    sample: Sample,
    cap: usize,
) -> Result<QcReport> {
    let o = &*group.oracle;
    let mut elems = vec![o.identity()];
    let mut seen: std::collections::HashSet<ElementId> = elems.iter().cloned().collect();
    let mut frontier = elems.clone();
    let mut cap_hit = false;
    let steps: Vec<ElementId> = generators
        .iter()
        .flat_map(|g| [g.clone(), o.invert(g)])
        .collect();
    'grow: for _ in 0..radius {
        let mut next = Vec::new();
        for e in &frontier {
            for s in &steps {
                let n = o.multiply(e, s);
                if seen.insert(n.clone()) {
                    if seen.len() > cap {
                        cap_hit = true;
                        break 'grow;
                    }
                    next.push(n);
                }
            }
        }
        elems.extend(next.iter().cloned());
        frontier = next;
    }
    let targets: Vec<usize> = match sample {
        Sample::Exhaustive => (0..elems.len()).collect(),
        Sample::Seeded { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count).map(|_| rng.gen_range(0..elems.len())).collect()
        }
    };
    let one = o.identity();
    let vals: Vec<Result<(usize, Option<(String, String)>)>> = par_map(&targets, |&t| {
        let p = rel_geodesic(group, &one, &elems[t])?;
        let mut best = (0, None);
        for v in &p.vertices {
            let d = elems.iter().map(|w| o.x_distance(v, w)).min().unwrap_or(0);
            if d > best.0 {
                best = (d, Some((o.format_element(&elems[t]), o.format_element(v))));
            }
        }
        Ok(best)
    });
    let vals: Vec<(usize, Option<(String, String)>)> = vals.into_iter().collect::<Result<_>>()?;
    let sigma_hat = vals.iter().map(|v| v.0).max().unwrap_or(0);
    Ok(QcReport {
        generators: generators.iter().map(|g| o.format_element(g)).collect(),
        radius,
        subgroup_elements: elems.len(),
        samples: targets.len(),
        sigma_hat,
        witness: vals
            .into_iter()
            .find(|v| v.0 == sigma_hat)
            .and_then(|v| v.1),
        cap_hit,
    })
}
