use std::fmt;

use crate::moebius::{Moebius, SpherePoint};

use super::SchottkyError;

/// A generator `γ_i` or its inverse. Letters are ordered by [`Letter::index`],
/// i.e. `γ_1, γ_1⁻¹, γ_2, γ_2⁻¹, …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    generator: u16,
    inverse: bool,
}

impl Letter {
    /// Zero-based generator index.
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator: generator as u16, inverse }
    }

    pub fn from_index(index: usize) -> Self {
        Letter::new(index / 2, index % 2 == 1)
    }

    pub fn index(&self) -> usize {
        2 * self.generator as usize + self.inverse as usize
    }

    pub fn generator(&self) -> usize {
        self.generator as usize
    }

    pub fn is_inverse(&self) -> bool {
        self.inverse
    }

    pub fn inverse(&self) -> Letter {
        Letter { generator: self.generator, inverse: !self.inverse }
    }

    /// Zero-based index of the disk this letter maps the outside world into:
    /// `γ_i` lands in `D_{2i}`, `γ_i⁻¹` in `D_{2i-1}` (one-based names).
    pub fn disk_index(&self) -> usize {
        2 * self.generator as usize + if self.inverse { 0 } else { 1 }
    }

    /// The letter whose image disk is `disk` (zero-based).
    pub fn for_disk(disk: usize) -> Letter {
        Letter::new(disk / 2, disk % 2 == 0)
    }

    pub fn map(&self, generators: &[Moebius]) -> Moebius {
        let g = generators[self.generator()];
        if self.inverse { g.inverse() } else { g }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generator < 26 {
            let base = (b'a' + self.generator as u8) as char;
            let ch = if self.inverse { base.to_ascii_uppercase() } else { base };
            write!(f, "{ch}")
        } else if self.inverse {
            write!(f, "[g{}^-1]", self.generator + 1)
        } else {
            write!(f, "[g{}]", self.generator + 1)
        }
    }
}

/// A word in the generators, read left to right as a composition
/// (`w = l_1 l_2 … l_n` acts as `γ_{l_1} ∘ … ∘ γ_{l_n}`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord {
    letters: Vec<Letter>,
    reduced: bool,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord { letters: Vec::new(), reduced: true }
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        let reduced = letters.windows(2).all(|w| w[1] != w[0].inverse());
        GroupWord { letters, reduced }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    /// Cancel adjacent inverse pairs until none remain.
    pub fn free_reduce(&self) -> GroupWord {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord { letters: out, reduced: true }
    }

    pub fn push(&mut self, letter: Letter) {
        if self.letters.last() == Some(&letter.inverse()) {
            self.reduced = false;
        }
        self.letters.push(letter);
    }

    /// The product matrix.
    pub fn evaluate(&self, generators: &[Moebius]) -> Moebius {
        self.letters.iter().fold(Moebius::identity(), |acc, l| acc.compose(&l.map(generators)))
    }

    /// Act on a point one letter at a time, rightmost first.
    pub fn apply_letterwise(&self, generators: &[Moebius], p: SpherePoint) -> SpherePoint {
        self.letters.iter().rev().fold(p, |q, l| l.map(generators).apply(q))
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Number of reduced words of length exactly `n` in a free group of rank
/// `genus`: `1` for `n = 0`, `2g(2g-1)^{n-1}` otherwise. `None` on overflow.
pub fn reduced_word_count(genus: usize, n: usize) -> Option<u128> {
    if n == 0 {
        return Some(1);
    }
    let g = genus as u128;
    let mut count = 2u128.checked_mul(g)?;
    for _ in 1..n {
        count = count.checked_mul(2 * g - 1)?;
    }
    Some(count)
}

/// All reduced words of length exactly `n`, in lexicographic letter order.
pub fn enumerate_words(genus: usize, n: usize, budget: u64) -> Result<Vec<GroupWord>, SchottkyError> {
    if genus == 0 {
        return Err(SchottkyError::Shape(format!("genus must be positive, got {genus}")));
    }
    let count = reduced_word_count(genus, n).unwrap_or(u128::MAX);
    if count > budget as u128 {
        return Err(SchottkyError::DepthLimit { requested: count, budget });
    }
    let alphabet = 2 * genus;
    let mut out = Vec::with_capacity(count as usize);
    let mut stack: Vec<Letter> = Vec::with_capacity(n);
    fn extend(stack: &mut Vec<Letter>, n: usize, alphabet: usize, out: &mut Vec<GroupWord>) {
        if stack.len() == n {
            out.push(GroupWord { letters: stack.clone(), reduced: true });
            return;
        }
        for i in 0..alphabet {
            let l = Letter::from_index(i);
            if stack.last() == Some(&l.inverse()) {
                continue;
            }
            stack.push(l);
            extend(stack, n, alphabet, out);
            stack.pop();
        }
    }
    extend(&mut stack, n, alphabet, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Brute force: filter all 2g-letter strings of length n for reducedness.
    fn brute_count(genus: usize, n: usize) -> usize {
        let alphabet = 2 * genus;
        let total = alphabet.pow(n as u32);
        (0..total)
            .filter(|&code| {
                let mut c = code;
                let letters: Vec<Letter> = (0..n)
                    .map(|_| {
                        let l = Letter::from_index(c % alphabet);
                        c /= alphabet;
                        l
                    })
                    .collect();
                GroupWord::from_letters(letters).is_reduced()
            })
            .count()
    }

    #[test]
    fn counts_match_small_cases() {
        assert_eq!(enumerate_words(2, 1, 1000).unwrap().len(), 4);
        assert_eq!(enumerate_words(2, 2, 1000).unwrap().len(), 12);
        let id = enumerate_words(3, 0, 1000).unwrap();
        assert_eq!(id, vec![GroupWord::identity()]);
    }

    #[test]
    fn counts_match_brute_force() {
        for g in 2..=3 {
            for n in 0..=4 {
                let words = enumerate_words(g, n, 1_000_000).unwrap();
                assert_eq!(words.len(), brute_count(g, n));
                assert_eq!(words.len() as u128, reduced_word_count(g, n).unwrap());
                let unique: HashSet<_> = words.iter().collect();
                assert_eq!(unique.len(), words.len());
                assert!(words.iter().all(|w| w.is_reduced() && w.len() == n));
                assert!(words.windows(2).all(|p| p[0] < p[1]));
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = enumerate_words(2, 12, 1000).unwrap_err();
        assert!(matches!(err, SchottkyError::DepthLimit { requested: 708_588, budget: 1000 }));
    }

    #[test]
    fn reduction() {
        let a = Letter::new(0, false);
        let b = Letter::new(1, false);
        let w = GroupWord::from_letters(vec![a, b, b.inverse(), a, a.inverse(), b]);
        assert!(!w.is_reduced());
        let r = w.free_reduce();
        assert_eq!(r.letters(), &[a, b]);
        assert_eq!(r.to_string(), "ab");
        assert_eq!(GroupWord::from_letters(vec![a.inverse(), b]).to_string(), "Ab");
    }

    #[test]
    fn letter_disk_correspondence() {
        for d in 0..8 {
            assert_eq!(Letter::for_disk(d).disk_index(), d);
        }
        // γ_1 lands in D_2 (index 1); γ_1⁻¹ in D_1 (index 0)
        assert_eq!(Letter::new(0, false).disk_index(), 1);
        assert_eq!(Letter::new(0, true).disk_index(), 0);
    }
}
