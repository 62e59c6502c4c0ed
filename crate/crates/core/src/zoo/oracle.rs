use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{Letter, Word};

use super::base::{BaseGroup, BaseKind, CyclicSub};

/// Canonical normal-form handle of a group element.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementId(pub Vec<i64>);

/// Hashable key of a left coset `gH_λ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CosetKey(pub Vec<i64>);

/// A concrete group with a solved word problem, together with the generating
/// set `X` and the subgroups `H_λ` of a relative presentation.
pub trait GroupOracle: Send + Sync {
    fn identity(&self) -> ElementId;
    fn num_generators(&self) -> usize;
    fn num_subgroups(&self) -> usize;
    /// The element named by the `i`-th letter of `X`.
    fn generator(&self, i: usize) -> ElementId;
    /// `h_λ^e` for the cyclic generator `h_λ` of `H_λ`.
    fn subgroup_element(&self, sub: usize, exp: i64) -> ElementId;
    fn multiply(&self, a: &ElementId, b: &ElementId) -> ElementId;
    fn invert(&self, a: &ElementId) -> ElementId;
    /// The exponent `e` with `g = h_λ^e`, normalized, if `g ∈ H_λ`.
    fn subgroup_membership(&self, sub: usize, g: &ElementId) -> Option<i64>;
    fn coset_key(&self, sub: usize, g: &ElementId) -> CosetKey;
    /// `|g|_X`.
    fn x_length(&self, g: &ElementId) -> usize;
    /// Exact `|g|_{X∪𝓗}`, when a formula is known.
    fn relative_length_exact(&self, g: &ElementId) -> Option<usize>;
    fn format_element(&self, g: &ElementId) -> String;
    /// Parses a printable form back into a handle.
    fn parse_element(&self, text: &str) -> Result<ElementId>;
    /// The X-ball in breadth-first order, ties broken by printable form.
    fn enumerate_x_ball(&self, radius: usize, cap: usize) -> Result<Vec<ElementId>>;
    fn conjugacy_representative(&self, g: &ElementId) -> Option<ElementId>;
    fn certify_infinite_order(&self, g: &ElementId) -> Option<String>;
    /// Image under a homomorphism to `Z²`, for area bounds.
    fn planar_image(&self, g: &ElementId) -> Option<(i64, i64)>;

    fn is_identity(&self, g: &ElementId) -> bool {
        *g == self.identity()
    }

    fn letter_element(&self, l: Letter) -> ElementId {
        match l {
            Letter::Gen { index, inverse } => {
                let g = self.generator(index as usize);
                if inverse {
                    self.invert(&g)
                } else {
                    g
                }
            }
            Letter::Sub { index, elem } => self.subgroup_element(index as usize, elem),
        }
    }

    fn normal_form(&self, w: &Word) -> Result<ElementId> {
        let mut g = self.identity();
        for &l in w {
            let ok = match l {
                Letter::Gen { index, .. } => (index as usize) < self.num_generators(),
                Letter::Sub { index, .. } => (index as usize) < self.num_subgroups(),
            };
            if !ok {
                return Err(Error::ForeignLetter(format!("{l:?}")));
            }
            g = self.multiply(&g, &self.letter_element(l));
        }
        Ok(g)
    }

    fn power(&self, g: &ElementId, k: i64) -> ElementId {
        let base = if k < 0 { self.invert(g) } else { g.clone() };
        let mut acc = self.identity();
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.multiply(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.multiply(&sq, &sq);
            }
        }
        acc
    }

    /// `g^t = t⁻¹ g t`.
    fn conjugate(&self, g: &ElementId, t: &ElementId) -> ElementId {
        self.multiply(&self.multiply(&self.invert(t), g), t)
    }

    /// `|g⁻¹h|_X`.
    fn x_distance(&self, g: &ElementId, h: &ElementId) -> usize {
        self.x_length(&self.multiply(&self.invert(g), h))
    }
}

#[derive(Default)]
struct BallCache {
    layers: Vec<Vec<ElementId>>,
    dist: HashMap<ElementId, usize>,
}

/// How relative lengths can be computed in closed form.
#[derive(Clone, Debug, PartialEq, Eq)]
enum RelFormula {
    None,
    /// Free group: maximal runs of the listed generators count once.
    FreeRuns(Vec<i64>),
    /// Free product: syllables of the listed factors count once.
    FactorSyllables(Vec<usize>),
    /// `Z²` relative to `⟨a⟩`.
    ZzA,
}

/// The oracle behind every zoo group.
pub struct ZooOracle {
    base: BaseGroup,
    gens: Vec<ElementId>,
    subs: Vec<CyclicSub>,
    standard_x: bool,
    formula: RelFormula,
    vertex_cap: usize,
    ball: Mutex<BallCache>,
}

pub const DEFAULT_VERTEX_CAP: usize = 2_000_000;

impl ZooOracle {
    pub fn new(
        base: BaseGroup,
        gens: Vec<ElementId>,
        subs: Vec<CyclicSub>,
        vertex_cap: usize,
    ) -> Self {
        let mut hit = vec![false; base.num_gens()];
        let mut standard_x = gens.len() == base.num_gens();
        for g in &gens {
            match base.as_generator(g) {
                Some((i, _)) if !hit[i] => hit[i] = true,
                _ => standard_x = false,
            }
        }
        let formula = if standard_x {
            Self::formula(&base, &subs)
        } else {
            RelFormula::None
        };
        ZooOracle {
            base,
            gens,
            subs,
            standard_x,
            formula,
            vertex_cap,
            ball: Mutex::new(BallCache::default()),
        }
    }

    fn formula(base: &BaseGroup, subs: &[CyclicSub]) -> RelFormula {
        match &base.kind {
            BaseKind::Free { .. } => {
                let mut letters = Vec::new();
                for s in subs {
                    match s {
                        CyclicSub::FreeConj { u, c } if u.is_empty() && c.len() == 1 => {
                            let l = c[0].abs();
                            if letters.contains(&l) {
                                return RelFormula::None;
                            }
                            letters.push(l);
                        }
                        _ => return RelFormula::None,
                    }
                }
                RelFormula::FreeRuns(letters)
            }
            BaseKind::FreeProduct { .. } => {
                let mut factors = Vec::new();
                for s in subs {
                    match s {
                        CyclicSub::Factor { factor, .. } if !factors.contains(factor) => {
                            factors.push(*factor)
                        }
                        _ => return RelFormula::None,
                    }
                }
                RelFormula::FactorSyllables(factors)
            }
            BaseKind::Zz => match subs {
                [CyclicSub::Lattice { p, q: 0 }] if p.abs() == 1 => RelFormula::ZzA,
                _ => RelFormula::None,
            },
            BaseKind::Bs { .. } => RelFormula::None,
        }
    }

    pub fn base(&self) -> &BaseGroup {
        &self.base
    }

    pub fn subgroup_order(&self, sub: usize) -> Option<u64> {
        self.subs[sub].order()
    }

    /// Whether `X` is the standard basis of the base group (up to inverses).
    pub fn has_standard_x(&self) -> bool {
        self.standard_x
    }

    fn grow_ball(&self, cache: &mut BallCache, radius: usize) -> Result<()> {
        if cache.layers.is_empty() {
            let id = self.identity();
            cache.dist.insert(id.clone(), 0);
            cache.layers.push(vec![id]);
        }
        let mut steps = Vec::with_capacity(2 * self.gens.len());
        for g in &self.gens {
            steps.push(g.clone());
            steps.push(self.invert(g));
        }
        while cache.layers.len() <= radius {
            let r = cache.layers.len();
            let mut next = Vec::new();
            for v in &cache.layers[r - 1] {
                for s in &steps {
                    let w = self.multiply(v, s);
                    if !cache.dist.contains_key(&w) {
                        cache.dist.insert(w.clone(), r);
                        next.push(w);
                    }
                }
            }
            if cache.dist.len() > self.vertex_cap {
                for w in &next {
                    cache.dist.remove(w);
                }
                return Err(Error::VertexCap {
                    radius: r,
                    cap: self.vertex_cap,
                });
            }
            let mut keyed: Vec<(String, ElementId)> = next
                .into_iter()
                .map(|w| (self.format_element(&w), w))
                .collect();
            keyed.sort();
            cache
                .layers
                .push(keyed.into_iter().map(|(_, w)| w).collect());
        }
        Ok(())
    }

    fn rel_length_formula(&self, g: &ElementId) -> Option<usize> {
        match &self.formula {
            RelFormula::None => None,
            RelFormula::FreeRuns(letters) => {
                let mut count = 0;
                let mut prev: Option<i64> = None;
                for &l in &g.0 {
                    let a = l.abs();
                    if !(letters.contains(&a) && prev == Some(a)) {
                        count += 1;
                    }
                    prev = Some(a);
                }
                Some(count)
            }
            RelFormula::FactorSyllables(factors) => Some(
                g.0.chunks(2)
                    .map(|p| {
                        if factors.contains(&(p[0] as usize)) {
                            1
                        } else {
                            p[1].unsigned_abs() as usize
                        }
                    })
                    .sum(),
            ),
            RelFormula::ZzA => Some(g.0[1].unsigned_abs() as usize + usize::from(g.0[0] != 0)),
        }
    }
}

impl GroupOracle for ZooOracle {
    fn identity(&self) -> ElementId {
        self.base.identity()
    }

    fn num_generators(&self) -> usize {
        self.gens.len()
    }

    fn num_subgroups(&self) -> usize {
        self.subs.len()
    }

    fn generator(&self, i: usize) -> ElementId {
        self.gens[i].clone()
    }

    fn subgroup_element(&self, sub: usize, exp: i64) -> ElementId {
        self.base.sub_power(&self.subs[sub], exp)
    }

    fn multiply(&self, a: &ElementId, b: &ElementId) -> ElementId {
        self.base.multiply(a, b)
    }

    fn invert(&self, a: &ElementId) -> ElementId {
        self.base.invert(a)
    }

    fn subgroup_membership(&self, sub: usize, g: &ElementId) -> Option<i64> {
        self.base.sub_membership(&self.subs[sub], g)
    }

    fn coset_key(&self, sub: usize, g: &ElementId) -> CosetKey {
        self.base.sub_coset_key(sub, &self.subs[sub], g)
    }

    fn x_length(&self, g: &ElementId) -> usize {
        if self.standard_x {
            if let Some(n) = self.base.standard_length(g) {
                return n;
            }
        }
        let mut cache = self.ball.lock().unwrap_or_else(|e| e.into_inner());
        loop {
            if let Some(&d) = cache.dist.get(g) {
                return d;
            }
            let r = cache.layers.len();
            if let Err(e) = self.grow_ball(&mut cache, r) {
                panic!("x_length({}): {e}", self.format_element(g));
            }
        }
    }

    fn relative_length_exact(&self, g: &ElementId) -> Option<usize> {
        self.rel_length_formula(g)
    }

    fn format_element(&self, g: &ElementId) -> String {
        self.base.format(g)
    }

    fn parse_element(&self, text: &str) -> Result<ElementId> {
        self.base.parse(text)
    }

    fn enumerate_x_ball(&self, radius: usize, cap: usize) -> Result<Vec<ElementId>> {
        if self.gens.is_empty() {
            return Err(Error::EmptyGeneratingSet);
        }
        let mut cache = self.ball.lock().unwrap_or_else(|e| e.into_inner());
        self.grow_ball(&mut cache, radius)?;
        let out: Vec<ElementId> = cache.layers[..=radius].iter().flatten().cloned().collect();
        if out.len() > cap {
            return Err(Error::VertexCap { radius, cap });
        }
        Ok(out)
    }

    fn conjugacy_representative(&self, g: &ElementId) -> Option<ElementId> {
        self.base.conjugacy_representative(g)
    }

    fn certify_infinite_order(&self, g: &ElementId) -> Option<String> {
        self.base.certify_infinite_order(g)
    }

    fn planar_image(&self, g: &ElementId) -> Option<(i64, i64)> {
        self.base.planar(g)
    }
}
