//! Bounded-radius decision procedures: word problem, membership,
//! parabolicity, conjugacy, roots and power conjugacy, plus translation
//! numbers, element orders and atomic cycles.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filling::{
    cyclic_class_rep, null_word_classes, rel_area, AreaCaps, AreaCertificate, AreaOutcome,
};
use crate::graph::{exact_rel_length, rel_geodesic, Path};
use crate::paths::{analyze, classify};
use crate::word::{Letter, Word};
use crate::zoo::{ElementId, Group, DEFAULT_VERTEX_CAP};

fn ball(group: &Group, radius: usize) -> Result<Vec<ElementId>> {
    group.oracle.enumerate_x_ball(radius, DEFAULT_VERTEX_CAP)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordProblem {
    Trivial {
        area: usize,
        certificate: AreaCertificate,
    },
    NontrivialCertified {
        normal_form: String,
    },
    UnknownBeyondCaps,
}

/// Decides `w = 1` by relator-insertion search, with the oracle refuting
/// nontrivial words.
pub fn generic_word_problem(group: &Group, w: &Word, caps: &AreaCaps) -> Result<WordProblem> {
    let o = &*group.oracle;
    let e = o.normal_form(w)?;
    if !o.is_identity(&e) {
        return Ok(WordProblem::NontrivialCertified {
            normal_form: o.format_element(&e),
        });
    }
    Ok(match rel_area(group, w, caps)? {
        AreaOutcome::Found { area, certificate } => WordProblem::Trivial { area, certificate },
        AreaOutcome::NotFoundWithinCaps { .. } => WordProblem::UnknownBeyondCaps,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "answer", rename_all = "snake_case")]
pub enum Membership {
    InSubgroup { exponent: i64, handle: String },
    NotIn,
    UnknownBeyondCaps,
}

pub fn membership(group: &Group, lambda: usize, g: &ElementId) -> Membership {
    match group.oracle.subgroup_membership(lambda, g) {
        Some(e) => Membership::InSubgroup {
            exponent: e,
            handle: group.show(&group.oracle.subgroup_element(lambda, e)),
        },
        None => Membership::NotIn,
    }
}

/// Membership by enumerating products of at most `radius` elements of `Ω_λ`.
pub fn membership_generic(
    group: &Group,
    lambda: usize,
    g: &ElementId,
    radius: usize,
) -> Result<Membership> {
    let o = &*group.oracle;
    let omega = group.omega.get(lambda);
    if omega.is_empty() {
        return Err(Error::Precondition(format!(
            "Ω is empty for subgroup {}",
            group.pres.subgroups[lambda].name
        )));
    }
    let slot = &group.pres.subgroups[lambda];
    let mut seen = std::collections::BTreeSet::from([0i64]);
    let mut frontier = vec![0i64];
    for _ in 0..=radius {
        for &e in &frontier {
            let h = o.subgroup_element(lambda, e);
            if &h == g {
                return Ok(Membership::InSubgroup {
                    exponent: e,
                    handle: group.show(&h),
                });
            }
        }
        let mut next = Vec::new();
        for &e in &frontier {
            for &w in omega {
                for s in [w, -w] {
                    let n = slot.normalize(e + s);
                    if seen.insert(n) {
                        next.push(n);
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(Membership::UnknownBeyondCaps)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParabolicWitness {
    pub t: ElementId,
    pub lambda: usize,
    /// `t⁻¹ g t` as an exponent of the subgroup generator.
    pub image: i64,
}

/// First `t` in the X-ball (breadth-first, then printable order) with
/// `t⁻¹ g t ∈ H_λ`.
pub fn is_parabolic(
    group: &Group,
    g: &ElementId,
    radius: usize,
) -> Result<Option<ParabolicWitness>> {
    let o = &*group.oracle;
    for t in ball(group, radius)? {
        let c = o.conjugate(g, &t);
        for lambda in 0..o.num_subgroups() {
            if let Some(image) = o.subgroup_membership(lambda, &c) {
                debug_assert_eq!(o.subgroup_element(lambda, image), c);
                return Ok(Some(ParabolicWitness { t, lambda, image }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyWitness {
    pub t: ElementId,
    pub t_x_length: usize,
}

/// First `t` in the X-ball with `t⁻¹ f t = g`.
pub fn conjugate_search(
    group: &Group,
    f: &ElementId,
    g: &ElementId,
    radius: usize,
) -> Result<Option<ConjugacyWitness>> {
    let o = &*group.oracle;
    let ball = ball(group, radius)?;
    Ok(conjugator_in(group, &ball, f, g).map(|t| ConjugacyWitness {
        t_x_length: o.x_length(&t),
        t,
    }))
}

fn conjugator_in(
    group: &Group,
    ball: &[ElementId],
    f: &ElementId,
    g: &ElementId,
) -> Option<ElementId> {
    let o = &*group.oracle;
    ball.iter().find(|t| &o.conjugate(f, t) == g).cloned()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricPair {
    pub t: ElementId,
    /// From `1`, labelled by a geodesic word for `t`.
    pub p: Path,
    /// From `f`, with the same label.
    pub q: Path,
    /// Connected components of `p` and `q` sit at the same positions.
    pub synchronous_components: bool,
}

/// Among conjugators `t⁻¹ f t = g` in the X-ball, one of least relative length
/// (then least printable form), with its symmetric pair of geodesics.
pub fn min_symmetric_pair(
    group: &Group,
    f: &ElementId,
    g: &ElementId,
    radius: usize,
) -> Result<Option<SymmetricPair>> {
    let o = &*group.oracle;
    let mut best: Option<(usize, String, ElementId)> = None;
    for t in ball(group, radius)? {
        if &o.conjugate(f, &t) != g {
            continue;
        }
        let len = exact_rel_length(group, &t)
            .ok_or_else(|| Error::ExactnessUnavailable(format!("|{}|", o.format_element(&t))))?;
        let key = (len, o.format_element(&t), t);
        if best.as_ref().is_none_or(|b| (key.0, &key.1) < (b.0, &b.1)) {
            best = Some(key);
        }
    }
    let Some((_, _, t)) = best else {
        return Ok(None);
    };
    let p = rel_geodesic(group, &o.identity(), &t)?;
    let q = Path::new(o, f.clone(), p.word.clone());
    let chars = [
        o.multiply(&o.invert(p.start()), q.start()),
        o.multiply(&o.invert(p.end()), q.end()),
    ];
    if &chars[0] != f || &chars[1] != g {
        return Err(Error::Precondition(
            "characteristic elements do not match".into(),
        ));
    }
    let rp = analyze(group, &p);
    let rq = analyze(group, &q);
    let synchronous_components = rp.components.iter().all(|s| {
        rq.components
            .iter()
            .filter(|u| crate::paths::connected(group, s, u))
            .all(|u| u.start == s.start)
    });
    Ok(Some(SymmetricPair {
        t,
        p,
        q,
        synchronous_components,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SyncReport {
    pub kappa_hat: usize,
    /// Vertex position attaining `κ̂`.
    pub witness: usize,
}

/// Largest X-distance between synchronous vertices of a symmetric pair of
/// geodesics.
pub fn synchronous_check(group: &Group, p: &Path, q: &Path) -> Result<SyncReport> {
    if p.word != q.word {
        return Err(Error::Precondition("labels differ".into()));
    }
    let one = Ratio::from_integer(1);
    let zero = Ratio::from_integer(0);
    for (name, path) in [("p", p), ("q", q)] {
        if !classify(group, path, one, zero, None)?.is_geodesic {
            return Err(Error::Precondition(format!("{name} is not a geodesic")));
        }
    }
    let o = &*group.oracle;
    let mut report = SyncReport {
        kappa_hat: 0,
        witness: 0,
    };
    for (i, (u, v)) in p.vertices.iter().zip(&q.vertices).enumerate() {
        let d = o.x_distance(u, v);
        if d > report.kappa_hat {
            report = SyncReport {
                kappa_hat: d,
                witness: i,
            };
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranslationEstimate {
    pub element: String,
    /// The conjugate on which lengths are measured.
    pub representative: String,
    /// `τ̂_n = min_{m ≤ n} |r^m| / m` for `n = 1..=N`.
    pub terms: Vec<Ratio<i64>>,
    /// The same sequence measured on the element itself.
    pub raw_terms: Vec<Ratio<i64>>,
}

impl TranslationEstimate {
    pub fn last(&self) -> Ratio<i64> {
        *self.terms.last().expect("N ≥ 1")
    }
}

fn running_min(group: &Group, g: &ElementId, n: usize) -> Result<Vec<Ratio<i64>>> {
    let o = &*group.oracle;
    let mut out: Vec<Ratio<i64>> = Vec::with_capacity(n);
    let mut pow = o.identity();
    for m in 1..=n {
        pow = o.multiply(&pow, g);
        let len = exact_rel_length(group, &pow)
            .ok_or_else(|| Error::ExactnessUnavailable(format!("|{}|", o.format_element(&pow))))?;
        let v = Ratio::new(len as i64, m as i64);
        out.push(out.last().map_or(v, |&p: &Ratio<i64>| p.min(v)));
    }
    Ok(out)
}

/// Upper estimates of the relative translation number. Lengths are taken on
/// the oracle's canonical conjugate when one exists, which leaves the
/// estimate unchanged under conjugation.
pub fn translation_number(group: &Group, g: &ElementId, n: usize) -> Result<TranslationEstimate> {
    if n == 0 {
        return Err(Error::Precondition("N must be positive".into()));
    }
    let o = &*group.oracle;
    let rep = o.conjugacy_representative(g).unwrap_or_else(|| g.clone());
    let raw_terms = running_min(group, g, n)?;
    let terms = if &rep == g {
        raw_terms.clone()
    } else {
        running_min(group, &rep, n)?
    };
    Ok(TranslationEstimate {
        element: o.format_element(g),
        representative: o.format_element(&rep),
        terms,
        raw_terms,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "order", rename_all = "snake_case")]
pub enum OrderResult {
    Finite { n: u64 },
    InfiniteCertified { reason: String },
    UnknownBeyondCap { cap: u64 },
}

pub fn element_order(group: &Group, g: &ElementId, cap: u64) -> OrderResult {
    let o = &*group.oracle;
    let mut pow = o.identity();
    for k in 1..=cap {
        pow = o.multiply(&pow, g);
        if o.is_identity(&pow) {
            return OrderResult::Finite { n: k };
        }
    }
    match o.certify_infinite_order(g) {
        Some(reason) => OrderResult::InfiniteCertified { reason },
        None => OrderResult::UnknownBeyondCap { cap },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    pub f: ElementId,
    pub n: usize,
    /// `t⁻¹ fⁿ t = g`.
    pub t: ElementId,
}

/// Searches `f` in the X-ball and `n ∈ 2..=n_max` with `fⁿ` conjugate to `g`
/// by a conjugator in the same ball. Roots are nontrivial.
pub fn root_search(
    group: &Group,
    g: &ElementId,
    radius: usize,
    n_max: usize,
) -> Result<Option<Root>> {
    if n_max < 2 {
        return Err(Error::Precondition("n_max must be at least 2".into()));
    }
    let o = &*group.oracle;
    if o.is_identity(g) {
        return Ok(None);
    }
    let ball = ball(group, radius)?;
    for f in ball.iter().filter(|f| !o.is_identity(f)) {
        for n in 2..=n_max {
            let fn_ = o.power(f, n as i64);
            if let Some(t) = conjugator_in(group, &ball, &fn_, g) {
                return Ok(Some(Root { f: f.clone(), n, t }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerConjugacy {
    pub k: i64,
    pub l: i64,
    /// `t⁻¹ f^k t = g^l`.
    pub t: ElementId,
}

/// Exponent pairs in search order: `|k|+|l|`, then `|k|`, positive before
/// negative.
pub fn exponent_pairs(k_max: i64) -> Vec<(i64, i64)> {
    let mut pairs: Vec<(i64, i64)> = (-k_max..=k_max)
        .flat_map(|k| (-k_max..=k_max).map(move |l| (k, l)))
        .filter(|&(k, l)| k != 0 && l != 0)
        .collect();
    pairs.sort_by_key(|&(k, l)| (k.abs() + l.abs(), k.abs(), k < 0, l < 0));
    pairs
}

pub fn power_conjugacy_search(
    group: &Group,
    f: &ElementId,
    g: &ElementId,
    k_max: i64,
    radius: usize,
) -> Result<Option<PowerConjugacy>> {
    if k_max < 1 {
        return Err(Error::Precondition("k_max must be at least 1".into()));
    }
    let o = &*group.oracle;
    let ball = ball(group, radius)?;
    let hyperbolic =
        |e: &ElementId| -> Result<bool> { Ok(is_parabolic(group, e, radius)?.is_none()) };
    let mut fk = std::collections::HashMap::new();
    let mut gl = std::collections::HashMap::new();
    for (k, l) in exponent_pairs(k_max) {
        if let std::collections::hash_map::Entry::Vacant(e) = fk.entry(k) {
            let p = o.power(f, k);
            let h = hyperbolic(&p)?;
            e.insert((p, h));
        }
        if let std::collections::hash_map::Entry::Vacant(e) = gl.entry(l) {
            let p = o.power(g, l);
            let h = hyperbolic(&p)?;
            e.insert((p, h));
        }
        let (a, ha) = &fk[&k];
        let (b, hb) = &gl[&l];
        if !ha || !hb {
            continue;
        }
        if let Some(t) = conjugator_in(group, &ball, a, b) {
            return Ok(Some(PowerConjugacy { k, l, t }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtomicCycle {
    pub label: String,
    /// Nontrivial in `F` after rewriting X-generators that lie in some `H_λ`
    /// as subgroup letters.
    pub essential: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtomicSet {
    pub max_len: usize,
    pub sub_radius: i64,
    pub cycles: Vec<AtomicCycle>,
}

impl AtomicSet {
    pub fn essential(&self) -> impl Iterator<Item = &AtomicCycle> {
        self.cycles.iter().filter(|c| c.essential)
    }
}

/// Rewrites X-letters lying in a subgroup as subgroup letters and reduces.
pub fn absorb_generators(group: &Group, w: &Word) -> Word {
    let o = &*group.oracle;
    let subs: Vec<Option<(usize, i64)>> = (0..o.num_generators())
        .map(|i| {
            let g = o.generator(i);
            (0..o.num_subgroups()).find_map(|l| o.subgroup_membership(l, &g).map(|e| (l, e)))
        })
        .collect();
    let letters = w
        .iter()
        .map(|&l| match l {
            Letter::Gen { index, inverse } => match subs[index as usize] {
                Some((lambda, e)) => {
                    let e = if inverse { -e } else { e };
                    group.pres.sub_letter(lambda, e).unwrap_or(l)
                }
                None => l,
            },
            _ => l,
        })
        .collect();
    group.pres.free_reduce(&Word::new(letters))
}

fn is_atomic(group: &Group, w: &Word) -> Result<bool> {
    let o = &*group.oracle;
    let n = w.len();
    let elems: Vec<ElementId> = w.iter().map(|&l| o.letter_element(l)).collect();
    for start in 0..n {
        let mut e = o.identity();
        for len in 1..=n / 2 {
            e = o.multiply(&e, &elems[(start + len - 1) % n]);
            let d = exact_rel_length(group, &e).ok_or_else(|| {
                Error::ExactnessUnavailable(format!("|{}|", o.format_element(&e)))
            })?;
            if d != len {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Null words of length at most `max_len` (subgroup letters of infinite
/// subgroups up to `|k| ≤ sub_radius`) whose cyclic subpaths of at most half
/// their length are geodesic, one per rotation/inversion class.
pub fn enumerate_atomic_cycles(
    group: &Group,
    max_len: usize,
    sub_radius: i64,
) -> Result<AtomicSet> {
    let mut cycles = Vec::new();
    for w in null_word_classes(group, max_len, sub_radius) {
        if is_atomic(group, &w)? {
            cycles.push(AtomicCycle {
                label: group.format(&w),
                essential: !absorb_generators(group, &w).is_empty(),
            });
        }
    }
    Ok(AtomicSet {
        max_len,
        sub_radius,
        cycles,
    })
}

/// The class representative of a label, for comparing against an
/// [`AtomicSet`].
pub fn canonical_label(group: &Group, text: &str) -> Result<String> {
    let w = group.pres.free_reduce(&group.parse(text)?);
    Ok(group.format(&cyclic_class_rep(&group.pres, &w)))
}
