//! Finite and eventually periodic words over the alphabet `{0, .., k-1}`.

use std::fmt;

/// A letter of the alphabet. Alphabets are small, so `u8` is plenty.
pub type Letter = u8;

/// A finite word over the alphabet, possibly empty.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FiniteWord(pub Vec<Letter>);

impl FiniteWord {
    pub fn empty() -> Self {
        FiniteWord(Vec::new())
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        FiniteWord(letters.to_vec())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn push(&mut self, x: Letter) {
        self.0.push(x);
    }

    pub fn concat(&self, other: &FiniteWord) -> FiniteWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        FiniteWord(v)
    }

    pub fn is_prefix_of(&self, other: &FiniteWord) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// The two cylinders `selfX` and `otherX` intersect iff one word is a
    /// prefix of the other.
    pub fn comparable(&self, other: &FiniteWord) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// Remainder of `other` after removing the prefix `self`.
    pub fn strip_from<'a>(&self, other: &'a FiniteWord) -> Option<&'a [Letter]> {
        if self.is_prefix_of(other) {
            Some(&other.0[self.0.len()..])
        } else {
            None
        }
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for x in &self.0 {
            write!(f, "{}", x)?;
        }
        Ok(())
    }
}

impl fmt::Debug for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// An eventually periodic infinite word `u (w)^∞`, held in canonical form:
/// the period `w` is primitive (not a proper power) and the preperiod `u` is
/// shortest, i.e. the last letter of `u` differs from the last letter of the
/// rotation of `w` that would absorb it. Two values are equal as infinite
/// words iff they are structurally equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EvPeriodicWord {
    pre: Vec<Letter>,
    per: Vec<Letter>,
}

impl EvPeriodicWord {
    /// Build `pre (per)^∞` and canonicalize. Panics on an empty period.
    pub fn new(pre: &[Letter], per: &[Letter]) -> Self {
        assert!(!per.is_empty(), "period must be nonempty");
        let mut w = EvPeriodicWord {
            pre: pre.to_vec(),
            per: per.to_vec(),
        };
        w.canonicalize();
        w
    }

    /// The constant word `x^∞`.
    pub fn constant(x: Letter) -> Self {
        EvPeriodicWord::new(&[], &[x])
    }

    fn canonicalize(&mut self) {
        // Primitive period via the KMP failure function.
        let n = self.per.len();
        let mut fail = vec![0usize; n];
        for i in 1..n {
            let mut j = fail[i - 1];
            while j > 0 && self.per[i] != self.per[j] {
                j = fail[j - 1];
            }
            if self.per[i] == self.per[j] {
                j += 1;
            }
            fail[i] = j;
        }
        let p = n - fail[n - 1];
        if n.is_multiple_of(p) {
            self.per.truncate(p);
        }
        // Shorten the preperiod: u·x (w'·x)^∞ = u (x·w')^∞.
        while let Some(&last) = self.pre.last() {
            if last == *self.per.last().unwrap() {
                self.pre.pop();
                let x = self.per.pop().unwrap();
                self.per.insert(0, x);
            } else {
                break;
            }
        }
    }

    pub fn preperiod_len(&self) -> usize {
        self.pre.len()
    }

    pub fn period_len(&self) -> usize {
        self.per.len()
    }

    pub fn preperiod(&self) -> &[Letter] {
        &self.pre
    }

    pub fn period(&self) -> &[Letter] {
        &self.per
    }

    pub fn letter_at(&self, i: usize) -> Letter {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.per[(i - self.pre.len()) % self.per.len()]
        }
    }

    /// The prefix consisting of the first `l` letters.
    pub fn prefix(&self, l: usize) -> FiniteWord {
        FiniteWord((0..l).map(|i| self.letter_at(i)).collect())
    }

    /// The word obtained by dropping the first `l` letters.
    pub fn tail(&self, l: usize) -> EvPeriodicWord {
        if l <= self.pre.len() {
            EvPeriodicWord::new(&self.pre[l..], &self.per)
        } else {
            let k = (l - self.pre.len()) % self.per.len();
            let mut per = self.per[k..].to_vec();
            per.extend_from_slice(&self.per[..k]);
            EvPeriodicWord::new(&[], &per)
        }
    }

    /// Prepend a finite word.
    pub fn with_prefix(&self, u: &FiniteWord) -> EvPeriodicWord {
        let mut pre = u.0.clone();
        pre.extend_from_slice(&self.pre);
        EvPeriodicWord::new(&pre, &self.per)
    }

    pub fn starts_with(&self, u: &FiniteWord) -> bool {
        u.0.iter().enumerate().all(|(i, &x)| self.letter_at(i) == x)
    }

    /// Parse the literal syntax `u(w)`, e.g. `0(110)` or `(1)`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let open = s.find('(').ok_or_else(|| format!("expected `u(w)` literal, got `{}`", s))?;
        if !s.ends_with(')') {
            return Err(format!("expected `u(w)` literal, got `{}`", s));
        }
        let parse_part = |part: &str| -> Result<Vec<Letter>, String> {
            part.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as Letter)
                        .ok_or_else(|| format!("bad letter `{}`", c))
                })
                .collect()
        };
        let pre = parse_part(&s[..open])?;
        let per = parse_part(&s[open + 1..s.len() - 1])?;
        if per.is_empty() {
            return Err("period must be nonempty".to_string());
        }
        Ok(EvPeriodicWord::new(&pre, &per))
    }
}

impl fmt::Display for EvPeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.pre {
            write!(f, "{}", x)?;
        }
        write!(f, "(")?;
        for x in &self.per {
            write!(f, "{}", x)?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for EvPeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> EvPeriodicWord {
        EvPeriodicWord::parse(s).unwrap()
    }

    #[test]
    fn canonical_forms_coincide() {
        assert_eq!(w("(1)"), w("1(1)"));
        assert_eq!(w("(11)"), w("(1)"));
        assert_eq!(w("0(110)"), w("011(011)"));
        assert_eq!(w("0(110)"), w("01(101)"));
        assert_ne!(w("0(110)"), w("(110)"));
        assert_ne!(w("(01)"), w("(10)"));
        assert_eq!(w("1(01)"), w("(10)"));
    }

    #[test]
    fn tails_and_prefixes() {
        let x = w("01(10)");
        assert_eq!(x.prefix(5).letters(), &[0, 1, 1, 0, 1]);
        assert_eq!(x.tail(1), w("1(10)"));
        assert_eq!(x.tail(2), w("(10)"));
        assert_eq!(x.tail(3), w("(01)"));
        assert_eq!(x.tail(4), w("(10)"));
        assert!(x.starts_with(&FiniteWord::from_letters(&[0, 1, 1])));
        assert!(!x.starts_with(&FiniteWord::from_letters(&[0, 0])));
    }

    #[test]
    fn tail_deep_into_period_rotates() {
        let x = w("(011)");
        assert_eq!(x.tail(7), w("(110)"));
        assert_eq!(x.tail(7).with_prefix(&x.prefix(7)), x);
    }
}
