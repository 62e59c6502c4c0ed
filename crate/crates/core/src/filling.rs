//! Relative area of null words by relator-insertion search, certificates, and
//! Dehn-function scans.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Path;
use crate::paths::ComponentReport;
use crate::presentation::RelPresentation;
use crate::word::{Letter, Word};
use crate::zoo::Group;

/// Which insertions the search tries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveSet {
    /// Only insertions whose first letter interacts with the letter on its
    /// left or whose last letter interacts with the letter on its right.
    #[default]
    Interacting,
    /// Every relator at every position.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AreaCaps {
    pub max_area: usize,
    /// Longest intermediate word; `None` means `2‖w‖ + 2M`.
    pub max_len: Option<usize>,
    pub max_states: usize,
    pub moves: MoveSet,
}

impl Default for AreaCaps {
    fn default() -> Self {
        AreaCaps {
            max_area: 8,
            max_len: None,
            max_states: 2_000_000,
            moves: MoveSet::Interacting,
        }
    }
}

impl AreaCaps {
    pub fn with_max_area(max_area: usize) -> Self {
        AreaCaps {
            max_area,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    /// Index into the symmetrized relator list.
    pub relator: usize,
    /// Insertion position in the current F-normal form.
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AreaCertificate {
    pub start: Word,
    pub steps: Vec<Step>,
    pub final_word: Word,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateFile {
    start: String,
    steps: Vec<Step>,
    #[serde(rename = "final")]
    final_word: String,
}

impl AreaCertificate {
    pub fn area(&self) -> usize {
        self.steps.len()
    }

    pub fn to_json(&self, pres: &RelPresentation) -> serde_json::Value {
        serde_json::to_value(CertificateFile {
            start: pres.format_word(&self.start),
            steps: self.steps.clone(),
            final_word: pres.format_word(&self.final_word),
        })
        .expect("certificate serializes")
    }

    pub fn from_json(pres: &RelPresentation, value: serde_json::Value) -> Result<Self> {
        let f: CertificateFile = serde_json::from_value(value)?;
        Ok(AreaCertificate {
            start: pres.parse_word(&f.start)?,
            steps: f.steps,
            final_word: pres.parse_word(&f.final_word)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AreaOutcome {
    Found {
        area: usize,
        certificate: AreaCertificate,
    },
    NotFoundWithinCaps {
        states: usize,
        cap_hit: bool,
    },
}

impl AreaOutcome {
    pub fn area(&self) -> Option<usize> {
        match self {
            AreaOutcome::Found { area, .. } => Some(*area),
            AreaOutcome::NotFoundWithinCaps { .. } => None,
        }
    }
}

/// Inserts `r` at `pos` and reduces in `F`.
pub fn apply_step(pres: &RelPresentation, w: &Word, r: &Word, pos: usize) -> Word {
    let mut letters = Vec::with_capacity(w.len() + r.len());
    letters.extend_from_slice(&w.letters()[..pos]);
    letters.extend_from_slice(r.letters());
    letters.extend_from_slice(&w.letters()[pos..]);
    pres.free_reduce(&Word::new(letters))
}

/// Replays a certificate against `w`.
pub fn verify_certificate(pres: &RelPresentation, w: &Word, cert: &AreaCertificate) -> bool {
    if pres.free_reduce(w) != cert.start || !cert.final_word.is_empty() {
        return false;
    }
    let sym = pres.symmetrized();
    let mut cur = cert.start.clone();
    for s in &cert.steps {
        if s.relator >= sym.len() || s.position > cur.len() {
            return false;
        }
        cur = apply_step(pres, &cur, &sym[s.relator], s.position);
    }
    cur.is_empty()
}

/// Admissible lower bounds on the number of relator applications, from
/// homomorphisms `F → Z` (generator exponent sums, subgroup exponent sums for
/// infinite subgroups) and, for groups over `Z²`, the enclosed signed area.
pub struct AreaHeuristic {
    /// Per homomorphism: max |φ(R)| over relators.
    maxima: Vec<i64>,
    sum_max: i64,
    num_gens: usize,
    infinite_subs: Vec<usize>,
    planar: Option<(Vec<(i64, i64)>, HashMap<(usize, i64), (i64, i64)>, i64)>,
}

impl AreaHeuristic {
    pub fn new(group: &Group) -> Self {
        let pres = &group.pres;
        let num_gens = pres.generators.len();
        let infinite_subs: Vec<usize> = (0..pres.subgroups.len())
            .filter(|&l| pres.subgroups[l].order.is_none())
            .collect();
        let mut h = AreaHeuristic {
            maxima: Vec::new(),
            sum_max: 0,
            num_gens,
            infinite_subs,
            planar: None,
        };
        let o = &*group.oracle;
        let gens: Option<Vec<(i64, i64)>> = (0..num_gens)
            .map(|i| o.planar_image(&o.generator(i)))
            .collect();
        if let Some(gens) = gens {
            let mut subs = HashMap::new();
            let mut ok = true;
            for r in pres.relators() {
                for &l in r {
                    if let Letter::Sub { index, elem } = l {
                        match o.planar_image(&o.letter_element(l)) {
                            Some(p) => {
                                subs.insert((index as usize, elem), p);
                            }
                            None => ok = false,
                        }
                    }
                }
            }
            if ok {
                h.planar = Some((gens, subs, 0));
            }
        }
        let mut maxima = vec![0i64; h.num_homs()];
        let mut sum_max = 0;
        let mut area_max = 0;
        for r in pres.relators() {
            let v = h.homs(r);
            for (m, x) in maxima.iter_mut().zip(&v) {
                *m = (*m).max(x.abs());
            }
            sum_max = sum_max.max(v.iter().map(|x| x.abs()).sum());
            if let Some(a) = h.twice_area(group, r) {
                area_max = area_max.max(a.abs());
            }
        }
        h.maxima = maxima;
        h.sum_max = sum_max;
        if let Some(p) = &mut h.planar {
            p.2 = area_max;
        }
        h
    }

    fn num_homs(&self) -> usize {
        self.num_gens + self.infinite_subs.len()
    }

    fn homs(&self, w: &Word) -> Vec<i64> {
        let mut v = vec![0i64; self.num_homs()];
        for &l in w {
            match l {
                Letter::Gen { index, inverse } => v[index as usize] += if inverse { -1 } else { 1 },
                Letter::Sub { index, elem } => {
                    if let Some(k) = self.infinite_subs.iter().position(|&s| s == index as usize) {
                        v[self.num_gens + k] += elem;
                    }
                }
            }
        }
        v
    }

    fn twice_area(&self, group: &Group, w: &Word) -> Option<i64> {
        let (gens, subs, _) = self.planar.as_ref()?;
        let (mut x, mut y, mut acc) = (0i64, 0i64, 0i64);
        for &l in w {
            let (dx, dy) = match l {
                Letter::Gen { index, inverse } => {
                    let (a, b) = gens[index as usize];
                    if inverse {
                        (-a, -b)
                    } else {
                        (a, b)
                    }
                }
                Letter::Sub { index, elem } => match subs.get(&(index as usize, elem)) {
                    Some(&p) => p,
                    None => {
                        let o = &*group.oracle;
                        o.planar_image(&o.letter_element(l))?
                    }
                },
            };
            acc += x * (y + dy) - (x + dx) * y;
            x += dx;
            y += dy;
        }
        Some(acc)
    }

    /// Lower bound on the area; `None` when no sequence of insertions can
    /// reach the empty word.
    pub fn estimate(&self, group: &Group, w: &Word) -> Option<usize> {
        let v = self.homs(w);
        let mut best = 0i64;
        let mut total = 0i64;
        for (x, m) in v.iter().zip(&self.maxima) {
            total += x.abs();
            if *x != 0 {
                if *m == 0 {
                    return None;
                }
                best = best.max((x.abs() + m - 1) / m);
            }
        }
        if total > 0 {
            if self.sum_max == 0 {
                return None;
            }
            best = best.max((total + self.sum_max - 1) / self.sum_max);
        }
        if let Some((_, _, amax)) = &self.planar {
            if let Some(a) = self.twice_area(group, w) {
                if a != 0 {
                    if *amax == 0 {
                        return None;
                    }
                    best = best.max((a.abs() + amax - 1) / amax);
                }
            }
        }
        Some(best as usize)
    }
}

struct Node {
    word: Word,
    g: usize,
    parent: Option<usize>,
    step: Option<Step>,
}

/// Minimal number of relator insertions reducing `w` to the empty word in `F`.
pub fn rel_area(group: &Group, w: &Word, caps: &AreaCaps) -> Result<AreaOutcome> {
    let heuristic = AreaHeuristic::new(group);
    rel_area_with(group, &heuristic, w, caps)
}

pub fn rel_area_with(
    group: &Group,
    heuristic: &AreaHeuristic,
    w: &Word,
    caps: &AreaCaps,
) -> Result<AreaOutcome> {
    if caps.max_area == 0 || caps.max_states == 0 || caps.max_len == Some(0) {
        return Err(Error::InvalidCaps("caps must be positive".into()));
    }
    let pres = &group.pres;
    pres.check_letters(w)?;
    let start = pres.free_reduce(w);
    if start.is_empty() {
        let certificate = AreaCertificate {
            start,
            steps: Vec::new(),
            final_word: Word::empty(),
        };
        return Ok(AreaOutcome::Found {
            area: 0,
            certificate,
        });
    }
    let max_len = caps
        .max_len
        .unwrap_or(2 * w.len() + 2 * pres.max_relator_len());
    let sym = pres.symmetrized();
    let Some(h0) = heuristic.estimate(group, &start) else {
        return Ok(AreaOutcome::NotFoundWithinCaps {
            states: 1,
            cap_hit: false,
        });
    };
    let mut cap_hit = h0 > caps.max_area;
    if cap_hit {
        return Ok(AreaOutcome::NotFoundWithinCaps { states: 1, cap_hit });
    }
    let mut nodes = vec![Node {
        word: start.clone(),
        g: 0,
        parent: None,
        step: None,
    }];
    let mut best: HashMap<Word, usize> = HashMap::from([(start, 0)]);
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    heap.push(Reverse((h0, usize::MAX, seq, 0usize)));
    while let Some(Reverse((_, _, _, id))) = heap.pop() {
        let (g, word) = (nodes[id].g, nodes[id].word.clone());
        if best.get(&word).is_some_and(|&b| nodes[b].g < g) {
            continue;
        }
        if word.is_empty() {
            let mut steps = Vec::new();
            let mut cur = id;
            while let Some(s) = nodes[cur].step {
                steps.push(s);
                cur = nodes[cur].parent.unwrap();
            }
            steps.reverse();
            let certificate = AreaCertificate {
                start: nodes[0].word.clone(),
                steps,
                final_word: Word::empty(),
            };
            return Ok(AreaOutcome::Found {
                area: g,
                certificate,
            });
        }
        let letters = word.letters();
        for (ri, r) in sym.iter().enumerate() {
            let (first, last) = (r.letters()[0], r.letters()[r.len() - 1]);
            for pos in 0..=word.len() {
                if caps.moves == MoveSet::Interacting {
                    let left = pos > 0 && pres.interacts(letters[pos - 1], first);
                    let right = pos < word.len() && pres.interacts(last, letters[pos]);
                    if !left && !right {
                        continue;
                    }
                }
                let next = apply_step(pres, &word, r, pos);
                if next.len() > max_len {
                    cap_hit = true;
                    continue;
                }
                let g2 = g + 1;
                let Some(h) = heuristic.estimate(group, &next) else {
                    continue;
                };
                if g2 + h > caps.max_area {
                    cap_hit = true;
                    continue;
                }
                let step = Step {
                    relator: ri,
                    position: pos,
                };
                match best.entry(next.clone()) {
                    Entry::Occupied(mut e) => {
                        if nodes[*e.get()].g <= g2 {
                            continue;
                        }
                        nodes.push(Node {
                            word: next,
                            g: g2,
                            parent: Some(id),
                            step: Some(step),
                        });
                        e.insert(nodes.len() - 1);
                    }
                    Entry::Vacant(e) => {
                        nodes.push(Node {
                            word: next,
                            g: g2,
                            parent: Some(id),
                            step: Some(step),
                        });
                        e.insert(nodes.len() - 1);
                    }
                }
                if nodes.len() > caps.max_states {
                    return Ok(AreaOutcome::NotFoundWithinCaps {
                        states: nodes.len(),
                        cap_hit: true,
                    });
                }
                seq += 1;
                heap.push(Reverse((g2 + h, usize::MAX - g2, seq, nodes.len() - 1)));
            }
        }
    }
    Ok(AreaOutcome::NotFoundWithinCaps {
        states: nodes.len(),
        cap_hit,
    })
}

/// Area by exhaustive breadth-first search over all insertions, for
/// cross-checking the main search on small instances.
pub fn brute_force_area(group: &Group, w: &Word, max_area: usize, max_len: usize) -> Option<usize> {
    let pres = &group.pres;
    let start = pres.free_reduce(w);
    let mut frontier = vec![start];
    let mut seen: std::collections::HashSet<Word> = frontier.iter().cloned().collect();
    for depth in 0..=max_area {
        if frontier.iter().any(Word::is_empty) {
            return Some(depth);
        }
        let mut next = Vec::new();
        for word in &frontier {
            for r in pres.symmetrized() {
                for pos in 0..=word.len() {
                    let n = apply_step(pres, word, r, pos);
                    if n.len() <= max_len && seen.insert(n.clone()) {
                        next.push(n);
                    }
                }
            }
        }
        frontier = next;
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Exact,
    LowerBound,
    UnboundedEvidence,
    CapHit,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowStatus::Exact => "exact",
            RowStatus::LowerBound => "lower-bound",
            RowStatus::UnboundedEvidence => "unbounded-evidence",
            RowStatus::CapHit => "cap-hit",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DehnRow {
    pub n: usize,
    pub area: usize,
    pub status: RowStatus,
    /// A word of length at most `n` attaining `area`.
    pub witness: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScanOptions {
    /// Subgroup letters of infinite subgroups range over `|k| ≤ sub_radius`.
    pub sub_radius: i64,
    pub caps: AreaCaps,
    /// Rows whose area exceeds `slope · n` with a maximizer touching the
    /// subgroup cap are flagged as unbounded evidence.
    pub slope: Ratio<i64>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            sub_radius: 3,
            caps: AreaCaps::default(),
            slope: Ratio::new(3, 2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DehnTable {
    pub rows: Vec<DehnRow>,
    pub options: ScanOptions,
    pub classes: usize,
}

impl DehnTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,area,status\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.n, r.area, r.status.as_str()));
        }
        out
    }
}

/// The scan alphabet: X letters, then subgroup letters.
pub fn scan_alphabet(pres: &RelPresentation, sub_radius: i64) -> Vec<Letter> {
    let mut out = Vec::new();
    for i in 0..pres.generators.len() {
        out.push(Letter::gen(i, false));
        out.push(Letter::gen(i, true));
    }
    for (l, slot) in pres.subgroups.iter().enumerate() {
        let range: Vec<i64> = match slot.order {
            Some(n) => (1..n as i64).map(|e| slot.normalize(e)).collect(),
            None => (1..=sub_radius).flat_map(|e| [e, -e]).collect(),
        };
        let mut seen = std::collections::BTreeSet::new();
        for e in range {
            if seen.insert(e) {
                out.push(Letter::Sub {
                    index: l as u32,
                    elem: e,
                });
            }
        }
    }
    out
}

/// Smallest rotation of `w` or of its inverse.
pub fn cyclic_class_rep(pres: &RelPresentation, w: &Word) -> Word {
    let inv = pres.invert(w);
    (0..w.len().max(1))
        .flat_map(|k| [w.rotate(k), inv.rotate(k)])
        .min()
        .unwrap_or_default()
}

/// All F-reduced, cyclically reduced null words of length `1..=max_len` over
/// the scan alphabet, one per rotation/inversion class.
pub fn null_word_classes(group: &Group, max_len: usize, sub_radius: i64) -> Vec<Word> {
    let pres = &group.pres;
    let o = &*group.oracle;
    let alphabet = scan_alphabet(pres, sub_radius);
    let elems: Vec<_> = alphabet.iter().map(|&l| o.letter_element(l)).collect();
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    let mut prefix = vec![o.identity()];
    fn rec(
        group: &Group,
        alphabet: &[Letter],
        elems: &[crate::zoo::ElementId],
        len: usize,
        stack: &mut Vec<usize>,
        prefix: &mut Vec<crate::zoo::ElementId>,
        out: &mut Vec<Word>,
    ) {
        let pres = &group.pres;
        let o = &*group.oracle;
        let cur = prefix.last().unwrap().clone();
        let remaining = len - stack.len();
        if let Some(r) = o.relative_length_exact(&cur) {
            if r > remaining {
                return;
            }
        }
        if remaining == 0 {
            if o.is_identity(&cur) {
                let letters: Vec<Letter> = stack.iter().map(|&i| alphabet[i]).collect();
                let w = Word::new(letters);
                if pres.is_cyclically_reduced(&w) && cyclic_class_rep(pres, &w) == w {
                    out.push(w);
                }
            }
            return;
        }
        for i in 0..alphabet.len() {
            if let Some(&last) = stack.last() {
                if pres.interacts(alphabet[last], alphabet[i]) {
                    continue;
                }
            }
            stack.push(i);
            prefix.push(o.multiply(&cur, &elems[i]));
            rec(group, alphabet, elems, len, stack, prefix, out);
            prefix.pop();
            stack.pop();
        }
    }
    for len in 1..=max_len {
        rec(
            group,
            &alphabet,
            &elems,
            len,
            &mut stack,
            &mut prefix,
            &mut out,
        );
    }
    out
}

fn map_areas(group: &Group, words: &[Word], caps: &AreaCaps) -> Vec<Result<AreaOutcome>> {
    let heuristic = AreaHeuristic::new(group);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        words
            .par_iter()
            .map(|w| rel_area_with(group, &heuristic, w, caps))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        words
            .iter()
            .map(|w| rel_area_with(group, &heuristic, w, caps))
            .collect()
    }
}

/// Estimates `δ^rel(n)` for `n = 0..=n_max` from all null words of length at
/// most `n`.
pub fn dehn_scan(group: &Group, n_max: usize, opts: &ScanOptions) -> Result<DehnTable> {
    let pres = &group.pres;
    let words = null_word_classes(group, n_max, opts.sub_radius);
    let areas = map_areas(group, &words, &opts.caps);
    let truncated = pres.subgroups.iter().any(|s| s.order.is_none());
    let touches_cap = |w: &Word| {
        w.iter().any(|l| match *l {
            Letter::Sub { index, elem } => {
                pres.subgroups[index as usize].order.is_none() && elem.abs() == opts.sub_radius
            }
            Letter::Gen { .. } => false,
        })
    };
    let mut rows = vec![DehnRow {
        n: 0,
        area: 0,
        status: RowStatus::Exact,
        witness: None,
    }];
    let mut best: Option<(usize, &Word)> = None;
    let mut any_cap = false;
    for n in 1..=n_max {
        for (w, a) in words.iter().zip(&areas) {
            if w.len() != n {
                continue;
            }
            match a.as_ref().map_err(|e| Error::Precondition(e.to_string()))? {
                AreaOutcome::Found { area, .. } => {
                    if best.is_none_or(|(b, _)| *area > b) {
                        best = Some((*area, w));
                    }
                }
                AreaOutcome::NotFoundWithinCaps { .. } => any_cap = true,
            }
        }
        let area = best.map_or(0, |(a, _)| a);
        let unbounded = best.is_some_and(|(a, w)| {
            Ratio::from_integer(a as i64) > opts.slope * (n as i64) && touches_cap(w)
        });
        let status = if any_cap {
            RowStatus::CapHit
        } else if unbounded {
            RowStatus::UnboundedEvidence
        } else if truncated {
            RowStatus::LowerBound
        } else {
            RowStatus::Exact
        };
        rows.push(DehnRow {
            n,
            area,
            status,
            witness: best.map(|(_, w)| pres.format_word(w)),
        });
    }
    Ok(DehnTable {
        rows,
        options: *opts,
        classes: words.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum OmegaBound {
    Checked {
        sum: usize,
        bound: usize,
        holds: bool,
        slack: i64,
        lengths: Vec<usize>,
    },
    /// Some Ω-length search exhausted its cap.
    Inconclusive { component: usize },
}

/// Checks `Σ |value|_{Ω_λ} ≤ M · area` over the isolated components of a cycle.
pub fn omega_bound_check(
    group: &Group,
    cycle: &Path,
    report: &ComponentReport,
    area: usize,
    cap: usize,
) -> Result<OmegaBound> {
    if cycle.start() != cycle.end() {
        return Err(Error::Precondition("path is not a cycle".into()));
    }
    let pres = &group.pres;
    let mut lengths = Vec::new();
    for (i, c) in report.components.iter().enumerate() {
        if !report.isolated[i] {
            continue;
        }
        if group.omega.get(c.lambda).is_empty() {
            return Err(Error::Precondition(format!(
                "Ω is empty for subgroup {}",
                pres.subgroups[c.lambda].name
            )));
        }
        match pres.omega_length(&group.omega, c.lambda, c.value, cap) {
            Some(l) => lengths.push(l),
            None => return Ok(OmegaBound::Inconclusive { component: i }),
        }
    }
    let sum: usize = lengths.iter().sum();
    let bound = pres.max_relator_len() * area;
    Ok(OmegaBound::Checked {
        sum,
        bound,
        holds: sum <= bound,
        slack: bound as i64 - sum as i64,
        lengths,
    })
}
