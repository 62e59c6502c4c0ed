//! Relative presentations: the alphabet `X ∪ 𝓗`, the word grammar, reduction
//! in the free product `F = (∗ H̃_λ) ∗ F(X)`, symmetrized relators and the
//! `Ω`-sets read off relator syllables.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{Letter, SyllableKind, Word};

/// One subgroup `H_λ` of the collection. All subgroups here are cyclic, generated
/// by a single internal generator named `gen_name`; `order == None` means
/// infinite cyclic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupSlot {
    pub name: String,
    pub gen_name: String,
    pub order: Option<u64>,
}

impl SubgroupSlot {
    pub fn infinite(name: &str, gen_name: &str) -> Self {
        SubgroupSlot {
            name: name.into(),
            gen_name: gen_name.into(),
            order: None,
        }
    }

    pub fn finite(name: &str, gen_name: &str, order: u64) -> Self {
        SubgroupSlot {
            name: name.into(),
            gen_name: gen_name.into(),
            order: Some(order),
        }
    }

    /// Canonical exponent: unchanged for infinite subgroups, otherwise the
    /// representative in `(-n/2, n/2]`.
    pub fn normalize(&self, e: i64) -> i64 {
        match self.order {
            None => e,
            Some(n) => {
                let n = n as i64;
                let mut r = e.rem_euclid(n);
                if 2 * r > n {
                    r -= n;
                }
                r
            }
        }
    }
}

/// A violation reported by [`RelPresentation::check_reduced`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub relator: usize,
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    LongSyllable,
    NotFreelyReduced,
}

/// The per-subgroup sets `Ω_λ`, stored as exponents of the cyclic generator and
/// closed under inversion.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OmegaSets {
    pub sets: Vec<BTreeSet<i64>>,
}

impl OmegaSets {
    pub fn get(&self, sub: usize) -> &BTreeSet<i64> {
        &self.sets[sub]
    }

    pub fn is_empty(&self) -> bool {
        self.sets.iter().all(|s| s.is_empty())
    }
}

#[derive(Clone, Debug)]
pub struct RelPresentation {
    pub generators: Vec<String>,
    pub subgroups: Vec<SubgroupSlot>,
    relators: Vec<Word>,
    symmetrized: Vec<Word>,
    max_relator_len: usize,
    dehn_slope: Option<Ratio<i64>>,
}

impl RelPresentation {
    /// A presentation with no relators yet; useful for parsing.
    pub fn alphabet(generators: Vec<String>, subgroups: Vec<SubgroupSlot>) -> Self {
        RelPresentation {
            generators,
            subgroups,
            relators: Vec::new(),
            symmetrized: Vec::new(),
            max_relator_len: 0,
            dehn_slope: None,
        }
    }

    pub fn new(
        generators: Vec<String>,
        subgroups: Vec<SubgroupSlot>,
        relators: &[&str],
    ) -> Result<Self> {
        let mut pres = Self::alphabet(generators, subgroups);
        let words = relators
            .iter()
            .map(|r| pres.parse_word(r))
            .collect::<Result<Vec<_>>>()?;
        pres.set_relators(words);
        Ok(pres)
    }

    pub fn set_relators(&mut self, relators: Vec<Word>) {
        self.max_relator_len = relators.iter().map(Word::len).max().unwrap_or(0);
        self.relators = relators;
        self.symmetrized = self.symmetrize();
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// All cyclic shifts of every relator and its inverse, deduplicated, in
    /// (relator, inverse flag, shift) order.
    pub fn symmetrized(&self) -> &[Word] {
        &self.symmetrized
    }

    /// `M = max ‖R‖`.
    pub fn max_relator_len(&self) -> usize {
        self.max_relator_len
    }

    pub fn dehn_slope(&self) -> Option<Ratio<i64>> {
        self.dehn_slope
    }

    pub fn set_dehn_slope(&mut self, slope: Option<Ratio<i64>>) {
        self.dehn_slope = slope;
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    pub fn subgroup_index(&self, name: &str) -> Option<usize> {
        self.subgroups.iter().position(|s| s.name == name)
    }

    /// Builds a `Sub` letter, normalizing the exponent; `None` for the identity.
    pub fn sub_letter(&self, sub: usize, exp: i64) -> Option<Letter> {
        let e = self.subgroups[sub].normalize(exp);
        (e != 0).then_some(Letter::Sub {
            index: sub as u32,
            elem: e,
        })
    }

    pub fn invert_letter(&self, letter: Letter) -> Letter {
        match letter {
            Letter::Gen { index, inverse } => Letter::Gen {
                index,
                inverse: !inverse,
            },
            Letter::Sub { index, elem } => Letter::Sub {
                index,
                elem: self.subgroups[index as usize].normalize(-elem),
            },
        }
    }

    /// Letter-wise formal inverse.
    pub fn invert(&self, w: &Word) -> Word {
        Word::new(w.iter().rev().map(|&l| self.invert_letter(l)).collect())
    }

    /// Checks that every letter belongs to this alphabet.
    pub fn check_letters(&self, w: &Word) -> Result<()> {
        for l in w {
            let ok = match *l {
                Letter::Gen { index, .. } => (index as usize) < self.generators.len(),
                Letter::Sub { index, elem } => self
                    .subgroups
                    .get(index as usize)
                    .is_some_and(|s| elem != 0 && s.normalize(elem) == elem),
            };
            if !ok {
                return Err(Error::ForeignLetter(format!("{l:?}")));
            }
        }
        Ok(())
    }

    /// Normal form in `F`: adjacent inverse generator letters cancel, adjacent
    /// letters of one subgroup multiply, identity results vanish.
    pub fn free_reduce(&self, w: &Word) -> Word {
        let mut stack: Vec<Letter> = Vec::with_capacity(w.len());
        for &l in w {
            push_reduced(&self.subgroups, &mut stack, l);
        }
        Word::new(stack)
    }

    pub fn is_freely_reduced(&self, w: &Word) -> bool {
        w.letters().windows(2).all(|p| !self.interacts(p[0], p[1]))
    }

    /// Two adjacent letters interact under free reduction.
    pub fn interacts(&self, a: Letter, b: Letter) -> bool {
        match (a, b) {
            (
                Letter::Gen {
                    index: i,
                    inverse: s,
                },
                Letter::Gen {
                    index: j,
                    inverse: t,
                },
            ) => i == j && s != t,
            (Letter::Sub { index: i, .. }, Letter::Sub { index: j, .. }) => i == j,
            _ => false,
        }
    }

    /// Cyclically reduced: freely reduced and the last letter does not interact
    /// with the first.
    pub fn is_cyclically_reduced(&self, w: &Word) -> bool {
        let l = w.letters();
        self.is_freely_reduced(w) && (l.len() < 2 || !self.interacts(l[l.len() - 1], l[0]))
    }

    fn symmetrize(&self) -> Vec<Word> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for r in &self.relators {
            for base in [r.clone(), self.invert(r)] {
                for k in 0..base.len().max(1) {
                    let shifted = self.free_reduce(&base.rotate(k));
                    if shifted.is_empty() {
                        continue;
                    }
                    if seen.insert(shifted.clone()) {
                        out.push(shifted);
                    }
                }
            }
        }
        out
    }

    /// `Ω_λ`: values of `H_λ`-syllables over all symmetrized relators, closed
    /// under inversion.
    pub fn compute_omega(&self) -> OmegaSets {
        let mut sets = vec![BTreeSet::new(); self.subgroups.len()];
        for r in self.symmetrized.iter().chain(self.relators.iter()) {
            for syl in r.sub_syllables() {
                let SyllableKind::Sub(lambda) = syl.kind else {
                    continue;
                };
                let slot = &self.subgroups[lambda];
                let value: i64 = r.letters()[syl.start..syl.end]
                    .iter()
                    .map(|l| match l {
                        Letter::Sub { elem, .. } => *elem,
                        Letter::Gen { .. } => 0,
                    })
                    .sum();
                let v = slot.normalize(value);
                if v != 0 {
                    sets[lambda].insert(v);
                    sets[lambda].insert(slot.normalize(-v));
                }
            }
        }
        OmegaSets { sets }
    }

    pub fn check_reduced(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, r) in self.relators.iter().enumerate() {
            for syl in r.sub_syllables() {
                if syl.len() > 1 {
                    out.push(Violation {
                        relator: i,
                        kind: ViolationKind::LongSyllable,
                        detail: format!(
                            "syllable `{}` has {} letters",
                            self.format_word(&r.subword(syl.start, syl.end)),
                            syl.len()
                        ),
                    });
                }
            }
            let has_long = r.sub_syllables().iter().any(|s| s.len() > 1);
            if !has_long && !self.is_freely_reduced(r) {
                out.push(Violation {
                    relator: i,
                    kind: ViolationKind::NotFreelyReduced,
                    detail: format!("`{}` is not freely reduced", self.format_word(r)),
                });
            }
        }
        out
    }

    /// Length of `h = gen^exp` over the generating set `Ω_λ` of `⟨Ω_λ⟩`, by
    /// breadth-first search up to `cap` steps. `None` when the cap is exhausted.
    pub fn omega_length(
        &self,
        omega: &OmegaSets,
        sub: usize,
        exp: i64,
        cap: usize,
    ) -> Option<usize> {
        let slot = &self.subgroups[sub];
        let target = slot.normalize(exp);
        if target == 0 {
            return Some(0);
        }
        let steps: Vec<i64> = omega.get(sub).iter().copied().collect();
        let mut seen = HashSet::from([0i64]);
        let mut frontier = VecDeque::from([(0i64, 0usize)]);
        while let Some((v, d)) = frontier.pop_front() {
            if d == cap {
                continue;
            }
            for &s in &steps {
                let n = slot.normalize(v + s);
                if n == target {
                    return Some(d + 1);
                }
                if seen.insert(n) {
                    frontier.push_back((n, d + 1));
                }
            }
        }
        None
    }

    // ---- word grammar -------------------------------------------------------

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        Parser {
            pres: self,
            src: text,
            pos: 0,
        }
        .parse()
    }

    pub fn format_letter(&self, l: Letter) -> String {
        match l {
            Letter::Gen { index, inverse } => {
                let name = &self.generators[index as usize];
                if inverse {
                    format!("{name}^-1")
                } else {
                    name.clone()
                }
            }
            Letter::Sub { index, elem } => {
                let slot = &self.subgroups[index as usize];
                format!("@{}({})", slot.name, power(&slot.gen_name, elem))
            }
        }
    }

    /// Formats in the word grammar; runs of one generator letter are written as
    /// powers. The empty word formats as the empty string.
    pub fn format_word(&self, w: &Word) -> String {
        let mut parts = Vec::new();
        let letters = w.letters();
        let mut i = 0;
        while i < letters.len() {
            match letters[i] {
                Letter::Gen { index, inverse } => {
                    let mut j = i + 1;
                    while j < letters.len() && letters[j] == letters[i] {
                        j += 1;
                    }
                    let k = (j - i) as i64;
                    parts.push(power(
                        &self.generators[index as usize],
                        if inverse { -k } else { k },
                    ));
                    i = j;
                }
                l @ Letter::Sub { .. } => {
                    parts.push(self.format_letter(l));
                    i += 1;
                }
            }
        }
        parts.join(" ")
    }
}

pub(crate) fn power(name: &str, k: i64) -> String {
    if k == 1 {
        name.to_string()
    } else {
        format!("{name}^{k}")
    }
}

fn push_reduced(subgroups: &[SubgroupSlot], stack: &mut Vec<Letter>, l: Letter) {
    match (stack.last().copied(), l) {
        (
            Some(Letter::Gen {
                index: i,
                inverse: s,
            }),
            Letter::Gen {
                index: j,
                inverse: t,
            },
        ) if i == j && s != t => {
            stack.pop();
        }
        (Some(Letter::Sub { index: i, elem: a }), Letter::Sub { index: j, elem: b }) if i == j => {
            stack.pop();
            let e = subgroups[i as usize].normalize(a + b);
            if e != 0 {
                stack.push(Letter::Sub { index: i, elem: e });
            }
        }
        _ => stack.push(l),
    }
}

struct Parser<'a> {
    pres: &'a RelPresentation,
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn name(&mut self) -> Result<&str> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.pos += 1,
            _ => return self.err("expected a name"),
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(&self.src[start..self.pos])
    }

    fn exponent(&mut self, allow_zero: bool) -> Result<i64> {
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.pos += 1;
        let start = self.pos;
        if matches!(self.peek(), Some('-') | Some('+')) {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text = &self.src[start..self.pos];
        let k: i64 = match text.parse() {
            Ok(k) => k,
            Err(_) => {
                self.pos = start;
                return self.err(format!("bad exponent `{text}`"));
            }
        };
        if k == 0 && !allow_zero {
            self.pos = start;
            return self.err("exponent must be nonzero");
        }
        Ok(k)
    }

    fn at_token_end(&self) -> bool {
        self.peek().is_none_or(|c| c.is_whitespace())
    }

    fn parse(mut self) -> Result<Word> {
        let mut letters = Vec::new();
        loop {
            self.skip_ws();
            let Some(c) = self.peek() else { break };
            let token_start = self.pos;
            if c == '1' {
                self.pos += 1;
                if !self.at_token_end() {
                    self.pos = token_start;
                    return self.err("unexpected character after `1`");
                }
                continue;
            }
            if c == '@' {
                self.pos += 1;
                let sub_name = self.name()?.to_string();
                let Some(lambda) = self.pres.subgroup_index(&sub_name) else {
                    return Err(Error::UnknownSubgroup(sub_name));
                };
                if self.peek() != Some('(') {
                    return self.err("expected `(`");
                }
                self.pos += 1;
                let slot = &self.pres.subgroups[lambda];
                let mut total = 0i64;
                let mut any = false;
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(')') => {
                            self.pos += 1;
                            break;
                        }
                        None => return self.err("unterminated subgroup letter"),
                        Some('1') => {
                            self.pos += 1;
                            any = true;
                        }
                        Some(_) => {
                            let gname = self.name()?.to_string();
                            if gname != slot.gen_name {
                                return Err(Error::UnknownGenerator(format!(
                                    "{gname} (in subgroup {sub_name})"
                                )));
                            }
                            total += self.exponent(true)?;
                            any = true;
                        }
                    }
                }
                if !any {
                    return self.err("empty subgroup letter");
                }
                if !self.at_token_end() {
                    return self.err("unexpected character after subgroup letter");
                }
                match self.pres.sub_letter(lambda, total) {
                    Some(l) => letters.push(l),
                    None => return Err(Error::IdentitySubLetter(sub_name)),
                }
                continue;
            }
            let gname = self.name()?.to_string();
            let Some(index) = self.pres.generator_index(&gname) else {
                return Err(Error::UnknownGenerator(gname));
            };
            let k = self.exponent(false)?;
            if !self.at_token_end() {
                return self.err("unexpected character after generator");
            }
            for _ in 0..k.unsigned_abs() {
                letters.push(Letter::gen(index, k < 0));
            }
        }
        Ok(Word::new(letters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zz() -> RelPresentation {
        RelPresentation::new(
            vec!["b".into()],
            vec![SubgroupSlot::infinite("H", "a")],
            &["@H(a^-1) b^-1 @H(a) b"],
        )
        .unwrap()
    }

    fn bs12() -> RelPresentation {
        RelPresentation::new(
            vec!["t".into()],
            vec![SubgroupSlot::infinite("H", "a")],
            &["t^-1 @H(a) t @H(a^-2)"],
        )
        .unwrap()
    }

    fn f2x() -> RelPresentation {
        RelPresentation::new(
            vec!["x".into(), "y".into()],
            vec![SubgroupSlot::infinite("H", "x")],
            &["@H(x) x^-1"],
        )
        .unwrap()
    }

    #[test]
    fn parse_zz_word() {
        let p = zz();
        let w = p.parse_word("b^-1 @H(a) b").unwrap();
        assert_eq!(
            w.letters(),
            &[
                Letter::gen(0, true),
                Letter::Sub { index: 0, elem: 1 },
                Letter::gen(0, false)
            ]
        );
        assert_eq!(w.len(), 3);
    }

    #[test]
    fn parse_rejects_identity_sub_letter() {
        assert!(matches!(
            zz().parse_word("@H(a^0) b"),
            Err(Error::IdentitySubLetter(_))
        ));
        assert!(matches!(
            zz().parse_word("@H(a a^-1)"),
            Err(Error::IdentitySubLetter(_))
        ));
    }

    #[test]
    fn parse_errors() {
        let p = zz();
        assert!(matches!(p.parse_word("c"), Err(Error::UnknownGenerator(_))));
        assert!(matches!(
            p.parse_word("@K(a)"),
            Err(Error::UnknownSubgroup(_))
        ));
        assert!(matches!(p.parse_word("b^0"), Err(Error::Syntax { .. })));
        match p.parse_word("b @H(a") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
        assert!(matches!(p.parse_word("b^x"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn parse_expands_exponents_and_identity_token() {
        let p = zz();
        assert_eq!(p.parse_word("b^3").unwrap().len(), 3);
        assert!(p.parse_word("1").unwrap().is_empty());
        assert!(p.parse_word("").unwrap().is_empty());
        assert_eq!(
            p.parse_word("@H(a^2 a)").unwrap().letters(),
            &[Letter::Sub { index: 0, elem: 3 }]
        );
    }

    #[test]
    fn parse_example_comp_word() {
        let p = bs12();
        let w = p.parse_word("@H(a^2) t^-1 @H(a) t @H(a^3)").unwrap();
        assert_eq!(w.len(), 5);
        let subs = w.sub_syllables();
        assert_eq!(subs.len(), 3);
        let starts: Vec<_> = subs.iter().map(|s| s.start).collect();
        assert_eq!(starts, vec![0, 2, 4]);
        let gen_runs: Vec<_> = w
            .syllables()
            .into_iter()
            .filter(|s| s.kind == SyllableKind::Gen)
            .map(|s| s.start)
            .collect();
        assert_eq!(gen_runs, vec![1, 3]);
    }

    #[test]
    fn free_reduce_examples() {
        let p = zz();
        let w = Word::new(vec![
            Letter::Sub { index: 0, elem: 2 },
            Letter::Sub { index: 0, elem: -2 },
        ]);
        assert!(p.free_reduce(&w).is_empty());
        let w = p.parse_word("@H(a) @H(a^2) b").unwrap();
        assert_eq!(p.format_word(&p.free_reduce(&w)), "@H(a^3) b");
        let f = f2x();
        let w = f.parse_word("y y^-1 @H(x)").unwrap();
        assert_eq!(f.format_word(&f.free_reduce(&w)), "@H(x)");
    }

    #[test]
    fn free_reduce_cascades() {
        let p = f2x();
        let w = p.parse_word("x @H(x) y y^-1 @H(x^-1) x^-1").unwrap();
        assert!(p.free_reduce(&w).is_empty());
    }

    #[test]
    fn finite_subgroup_normalization() {
        let s = SubgroupSlot::finite("B", "u", 3);
        assert_eq!(s.normalize(2), -1);
        assert_eq!(s.normalize(3), 0);
        assert_eq!(s.normalize(-1), -1);
        let s2 = SubgroupSlot::finite("A", "s", 2);
        assert_eq!(s2.normalize(-1), 1);
        let p = RelPresentation::alphabet(vec!["s".into()], vec![s2]);
        let w = p.parse_word("@A(s) @A(s)").unwrap();
        assert!(p.free_reduce(&w).is_empty());
    }

    #[test]
    fn omega_examples() {
        assert_eq!(
            zz().compute_omega()
                .get(0)
                .iter()
                .copied()
                .collect::<Vec<_>>(),
            vec![-1, 1]
        );
        assert_eq!(
            bs12()
                .compute_omega()
                .get(0)
                .iter()
                .copied()
                .collect::<Vec<_>>(),
            vec![-2, -1, 1, 2]
        );
        let empty = RelPresentation::new(
            vec!["x".into()],
            vec![SubgroupSlot::infinite("H", "x")],
            &[],
        )
        .unwrap();
        assert!(empty.compute_omega().is_empty());
    }

    #[test]
    fn check_reduced_examples() {
        assert!(zz().check_reduced().is_empty());
        let p = RelPresentation::new(
            vec!["b".into()],
            vec![SubgroupSlot::infinite("H", "a")],
            &["@H(a) @H(a) b"],
        )
        .unwrap();
        let v = p.check_reduced();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::LongSyllable);
        let p = RelPresentation::new(
            vec!["x".into(), "y".into()],
            vec![SubgroupSlot::infinite("H", "x")],
            &["y y^-1 @H(x)"],
        )
        .unwrap();
        let v = p.check_reduced();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::NotFreelyReduced);
    }

    #[test]
    fn symmetrized_is_closed() {
        let p = zz();
        let sym = p.symmetrized();
        assert_eq!(sym.len(), 8);
        for r in sym {
            assert!(sym.contains(&p.invert(r)));
            assert!(sym.contains(&p.free_reduce(&r.rotate(1))));
        }
        assert!(sym.len() <= 2 * p.relators().iter().map(Word::len).sum::<usize>());
    }

    #[test]
    fn omega_length_bfs() {
        let p = zz();
        let om = p.compute_omega();
        assert_eq!(p.omega_length(&om, 0, 5, 10), Some(5));
        assert_eq!(p.omega_length(&om, 0, 5, 3), None);
        let b = bs12();
        let om = b.compute_omega();
        assert_eq!(b.omega_length(&om, 0, 5, 10), Some(3));
    }

    #[test]
    fn format_round_trip() {
        let p = bs12();
        let text = "@H(a^2) t^-2 @H(a) t @H(a^-3)";
        let w = p.parse_word(text).unwrap();
        assert_eq!(p.format_word(&w), text);
    }
}
