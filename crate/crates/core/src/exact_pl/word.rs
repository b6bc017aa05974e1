use std::collections::{BTreeMap, HashSet};
use std::fmt;

use super::homeo::PLHomeo;
use super::rational::Rational;
use super::PlError;

/// Named generating set. `BTreeMap` gives the name ordering used by word
/// enumeration.
pub type GenSet = BTreeMap<String, PLHomeo>;

/// A freely reduced word: adjacent syllables have distinct generator names and
/// nonzero exponents. Words act right to left, so `a b` means "apply b, then a".
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupWord {
    letters: Vec<(String, i64)>,
}

impl GroupWord {
    pub fn new<S: Into<String>>(syllables: impl IntoIterator<Item = (S, i64)>) -> Self {
        let mut w = GroupWord::default();
        for (name, e) in syllables {
            w.push(name.into(), e);
        }
        w
    }

    pub fn identity() -> Self {
        GroupWord::default()
    }

    pub fn generator(name: &str) -> Self {
        GroupWord::new([(name, 1)])
    }

    fn push(&mut self, name: String, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.letters.last_mut() {
            if last.0 == name {
                last.1 += e;
                if last.1 == 0 {
                    self.letters.pop();
                }
                return;
            }
        }
        self.letters.push((name, e));
    }

    pub fn syllables(&self) -> &[(String, i64)] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Word length in the generators: sum of absolute exponents.
    pub fn len(&self) -> usize {
        self.letters.iter().map(|(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn inverse(&self) -> Self {
        GroupWord::new(self.letters.iter().rev().map(|(n, e)| (n.clone(), -e)))
    }

    /// `self · other` (other acts first).
    pub fn concat(&self, other: &GroupWord) -> Self {
        let mut w = self.clone();
        for (n, e) in &other.letters {
            w.push(n.clone(), *e);
        }
        w
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut w = GroupWord::identity();
        for _ in 0..n.unsigned_abs() {
            w = w.concat(&base);
        }
        w
    }

    pub fn commutator(&self, other: &GroupWord) -> Self {
        self.concat(other).concat(&self.inverse()).concat(&other.inverse())
    }

    /// Parses whitespace-separated syllables `a`, `a^-1`, `b^3`, or `a⁻¹`.
    pub fn parse(s: &str) -> Result<Self, PlError> {
        let mut w = GroupWord::identity();
        for tok in s.split_whitespace() {
            if tok == "1" || tok == "id" {
                continue;
            }
            let (name, exp) = if let Some(stripped) = tok.strip_suffix("⁻¹") {
                (stripped, -1)
            } else if let Some((n, e)) = tok.split_once('^') {
                let e: i64 = e.parse().map_err(|_| PlError::Parse(format!("bad exponent in {tok:?}")))?;
                (n, e)
            } else {
                (tok, 1)
            };
            if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '+') {
                return Err(PlError::Parse(format!("bad generator name in {tok:?}")));
            }
            w.push(name.to_string(), exp);
        }
        Ok(w)
    }

    /// Composes the word into a single map.
    pub fn evaluate(&self, gens: &GenSet) -> Result<PLHomeo, PlError> {
        let mut acc = PLHomeo::identity();
        for (name, e) in &self.letters {
            let g = gens.get(name).ok_or_else(|| PlError::UnboundGenerator(name.clone()))?;
            acc = acc.compose(&g.pow(*e));
        }
        Ok(acc)
    }

    /// Image of `x`, rightmost syllable first.
    pub fn evaluate_at(&self, gens: &GenSet, x: &Rational) -> Result<Rational, PlError> {
        let mut y = x.clone();
        for (name, e) in self.letters.iter().rev() {
            let g = gens.get(name).ok_or_else(|| PlError::UnboundGenerator(name.clone()))?;
            let step = if *e > 0 { g.clone() } else { g.inverse() };
            for _ in 0..e.unsigned_abs() {
                y = step.eval(&y)?;
            }
        }
        Ok(y)
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> =
            self.letters.iter().map(|(n, e)| if *e == 1 { n.clone() } else { format!("{n}^{e}") }).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Single-letter alphabet in enumeration order: generators by name, each
/// followed by its inverse.
fn alphabet(gens: &GenSet) -> Vec<(String, i64, PLHomeo)> {
    gens.iter().flat_map(|(n, g)| [(n.clone(), 1, g.clone()), (n.clone(), -1, g.inverse())]).collect()
}

/// One enumerated reduced word with its evaluation. `last` is the alphabet
/// index of the final (leftmost) letter, used to forbid cancellation.
#[derive(Clone, Debug)]
pub struct WordElement {
    pub word: GroupWord,
    pub element: PLHomeo,
    last: usize,
}

/// Breadth-first enumeration of reduced words of length `1..=max_len` in
/// length-lexicographic order. `visit` returns `false` to stop early.
pub fn for_each_reduced_word(gens: &GenSet, max_len: usize, mut visit: impl FnMut(&WordElement) -> bool) {
    let alpha = alphabet(gens);
    let mut level: Vec<WordElement> = Vec::new();
    for len in 1..=max_len {
        let mut next = Vec::new();
        if len == 1 {
            for (i, (n, e, g)) in alpha.iter().enumerate() {
                next.push(WordElement { word: GroupWord::new([(n.clone(), *e)]), element: g.clone(), last: i });
            }
        } else {
            for parent in &level {
                for (i, (n, e, g)) in alpha.iter().enumerate() {
                    if i == (parent.last ^ 1) {
                        continue;
                    }
                    // the new letter is appended on the left: it acts last
                    let word = GroupWord::new([(n.clone(), *e)]).concat(&parent.word);
                    next.push(WordElement { word, element: g.compose(&parent.element), last: i });
                }
            }
        }
        for we in &next {
            if !visit(we) {
                return;
            }
        }
        level = next;
    }
}

/// Distinct nontrivial elements reachable by words of length ≤ `budget`, each
/// with its first word in length-lexicographic order.
pub fn enumerate_elements(gens: &GenSet, budget: usize) -> Vec<(GroupWord, PLHomeo)> {
    let mut seen: HashSet<PLHomeo> = HashSet::new();
    let mut out = Vec::new();
    for_each_reduced_word(gens, budget, |we| {
        if !we.element.is_identity() && seen.insert(we.element.clone()) {
            out.push((we.word.clone(), we.element.clone()));
        }
        true
    });
    out
}

/// Shortest (then lexicographically first) nonempty reduced word of length
/// ≤ `max_len` that evaluates to the identity. `None` only means no relation
/// exists up to that length.
pub fn find_relation(gens: &GenSet, max_len: usize) -> Option<GroupWord> {
    let mut found = None;
    for_each_reduced_word(gens, max_len, |we| {
        if we.element.is_identity() {
            found = Some(we.word.clone());
            false
        } else {
            true
        }
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_pl::homeo::bump;
    use crate::exact_pl::rational::{int, rat};
    use crate::exact_pl::thompson::{standard_genset, thompson_generators};

    #[test]
    fn parse_and_reduce() {
        let w = GroupWord::parse("a b b^-1 a^2 c⁻¹").unwrap();
        assert_eq!(w.to_string(), "a^3 c^-1");
        assert_eq!(w.len(), 4);
        assert!(GroupWord::parse("a a^-1").unwrap().is_empty());
        assert!(GroupWord::parse("a^x").is_err());
    }

    #[test]
    fn evaluate_word_examples() {
        let (a, _) = thompson_generators();
        let gens: GenSet = [("a".to_string(), a)].into_iter().collect();
        let x = rat(1, 2);
        assert_eq!(GroupWord::identity().evaluate_at(&gens, &x).unwrap(), x);
        assert_eq!(GroupWord::parse("a").unwrap().evaluate_at(&gens, &x).unwrap(), rat(1, 4));
        assert_eq!(GroupWord::new([("a", 1), ("a", -1)]).evaluate_at(&gens, &x).unwrap(), x);
        assert!(matches!(GroupWord::parse("z").unwrap().evaluate_at(&gens, &x), Err(PlError::UnboundGenerator(_))));
    }

    #[test]
    fn word_action_is_right_to_left() {
        let gens = standard_genset();
        let w = GroupWord::parse("A B").unwrap();
        let x = rat(3, 4);
        let expected = gens["A"].eval(&gens["B"].eval(&x).unwrap()).unwrap();
        assert_eq!(w.evaluate_at(&gens, &x).unwrap(), expected);
        assert_eq!(w.evaluate(&gens).unwrap().eval(&x).unwrap(), expected);
    }

    #[test]
    fn enumeration_is_length_lex_and_reduced() {
        let gens = standard_genset();
        let mut words = Vec::new();
        for_each_reduced_word(&gens, 3, |we| {
            words.push(we.word.clone());
            true
        });
        // 4 + 4*3 + 4*9
        assert_eq!(words.len(), 52);
        assert_eq!(words[0].to_string(), "A");
        assert_eq!(words[1].to_string(), "A^-1");
        assert!(words.windows(2).all(|w| w[0].len() <= w[1].len()));
    }

    #[test]
    fn commutator_of_disjoint_bumps_is_found() {
        let f = bump(int(0), rat(1, 2), rat(1, 4), rat(3, 8)).unwrap();
        let g = bump(rat(1, 2), int(1), rat(3, 4), rat(7, 8)).unwrap();
        let gens: GenSet = [("a".to_string(), f), ("b".to_string(), g)].into_iter().collect();
        let rel = find_relation(&gens, 4).unwrap();
        assert_eq!(rel.len(), 4);
        assert!(rel.evaluate(&gens).unwrap().is_identity());
        assert_eq!(find_relation(&gens, 3), None);
    }

    #[test]
    fn infinite_order_generator_has_no_relation() {
        let (a, _) = thompson_generators();
        let gens: GenSet = [("A".to_string(), a)].into_iter().collect();
        assert_eq!(find_relation(&gens, 6), None);
    }
}
