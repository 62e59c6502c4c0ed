//! Letters over `X ∪ 𝓗`, words, and syllable decompositions.

use serde::{Deserialize, Serialize};

/// A letter of the relative alphabet.
///
/// `Gen` is a letter of the finite generating set `X` (or its formal inverse);
/// `Sub` is a nontrivial element of the subgroup `H_λ`, stored as an exponent of
/// the subgroup's cyclic generator in canonical form (see
/// [`SubgroupSlot::normalize`](crate::presentation::SubgroupSlot::normalize)).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    Gen { index: u32, inverse: bool },
    Sub { index: u32, elem: i64 },
}

impl Letter {
    pub fn gen(index: usize, inverse: bool) -> Self {
        Letter::Gen {
            index: index as u32,
            inverse,
        }
    }

    pub fn is_sub(&self) -> bool {
        matches!(self, Letter::Sub { .. })
    }

    pub fn sub_index(&self) -> Option<usize> {
        match *self {
            Letter::Sub { index, .. } => Some(index as usize),
            Letter::Gen { .. } => None,
        }
    }
}

/// A finite sequence of letters. `len()` is `‖W‖`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn empty() -> Self {
        Word::default()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Letter> {
        self.letters.iter()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn subword(&self, start: usize, end: usize) -> Word {
        Word::new(self.letters[start..end].to_vec())
    }

    /// Rotation by `k` letters: `w[k..] w[..k]`.
    pub fn rotate(&self, k: usize) -> Word {
        let n = self.letters.len();
        if n == 0 {
            return self.clone();
        }
        let k = k % n;
        let mut letters = self.letters[k..].to_vec();
        letters.extend_from_slice(&self.letters[..k]);
        Word { letters }
    }

    /// Ordered partition of the letter positions into maximal generator runs and
    /// maximal `H_λ`-syllables.
    pub fn syllables(&self) -> Vec<Syllable> {
        let mut out: Vec<Syllable> = Vec::new();
        for (i, letter) in self.letters.iter().enumerate() {
            let kind = match letter {
                Letter::Gen { .. } => SyllableKind::Gen,
                Letter::Sub { index, .. } => SyllableKind::Sub(*index as usize),
            };
            match out.last_mut() {
                Some(last) if last.kind == kind && last.end == i => last.end = i + 1,
                _ => out.push(Syllable {
                    kind,
                    start: i,
                    end: i + 1,
                }),
            }
        }
        out
    }

    /// The `H_λ`-syllables only, in order.
    pub fn sub_syllables(&self) -> Vec<Syllable> {
        self.syllables()
            .into_iter()
            .filter(|s| matches!(s.kind, SyllableKind::Sub(_)))
            .collect()
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Word::new(letters)
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a Letter;
    type IntoIter = std::slice::Iter<'a, Letter>;
    fn into_iter(self) -> Self::IntoIter {
        self.letters.iter()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SyllableKind {
    Gen,
    Sub(usize),
}

/// A half-open range `[start, end)` of letter positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Syllable {
    pub kind: SyllableKind,
    pub start: usize,
    pub end: usize,
}

impl Syllable {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_word_has_no_syllables() {
        assert!(Word::empty().syllables().is_empty());
    }

    #[test]
    fn adjacent_sub_letters_form_one_syllable() {
        let w = Word::new(vec![
            Letter::Sub { index: 0, elem: 1 },
            Letter::Sub { index: 0, elem: 1 },
        ]);
        let s = w.syllables();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].len(), 2);
    }

    #[test]
    fn different_subgroups_split_syllables() {
        let w = Word::new(vec![
            Letter::Sub { index: 0, elem: 1 },
            Letter::Sub { index: 1, elem: 1 },
            Letter::gen(0, false),
            Letter::gen(1, true),
        ]);
        let kinds: Vec<_> = w.syllables().iter().map(|s| (s.kind, s.len())).collect();
        assert_eq!(
            kinds,
            vec![
                (SyllableKind::Sub(0), 1),
                (SyllableKind::Sub(1), 1),
                (SyllableKind::Gen, 2)
            ]
        );
    }

    #[test]
    fn rotate_wraps() {
        let w = Word::new(vec![
            Letter::gen(0, false),
            Letter::gen(1, false),
            Letter::gen(2, false),
        ]);
        assert_eq!(w.rotate(1).letters()[0], Letter::gen(1, false));
        assert_eq!(w.rotate(3), w);
    }
}
