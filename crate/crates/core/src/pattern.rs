//! Permutations, consecutive patterns and descent words.
//!
//! Patterns are stored in one-line notation with values `1..=k`. Sets of
//! forbidden patterns keep a dense membership mask indexed by lexicographic
//! rank so that window checks in the enumerators and on the grid are a table
//! lookup.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest window length for which a dense membership mask is kept.
const MASK_MAX_LEN: usize = 8;

/// A permutation of `1..=k` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    entries: Vec<usize>,
}

impl Pattern {
    /// Builds a pattern, checking that `entries` is a bijection on `1..=k`.
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidPattern("empty sequence".into()));
        }
        let k = entries.len();
        let mut seen = vec![false; k];
        for &v in &entries {
            if v == 0 || v > k || seen[v - 1] {
                return Err(Error::InvalidPattern(format!("{entries:?}")));
            }
            seen[v - 1] = true;
        }
        Ok(Pattern { entries })
    }

    pub fn identity(k: usize) -> Self {
        Pattern { entries: (1..=k).collect() }
    }

    pub fn decreasing(k: usize) -> Self {
        Pattern { entries: (1..=k).rev().collect() }
    }

    /// Unranks the `rank`-th permutation of length `k` in lexicographic order.
    pub fn from_rank(k: usize, mut rank: usize) -> Self {
        let mut pool: Vec<usize> = (1..=k).collect();
        let mut entries = Vec::with_capacity(k);
        for i in (0..k).rev() {
            let f = factorial(i);
            entries.push(pool.remove(rank / f));
            rank %= f;
        }
        Pattern { entries }
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Lexicographic rank among permutations of the same length.
    pub fn rank(&self) -> usize {
        order_rank(&self.entries)
    }

    pub fn is_increasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_decreasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[0] > w[1])
    }

    /// Maps every value `v` to `k + 1 - v` (the upside-down permutation).
    pub fn complement(&self) -> Pattern {
        let k = self.len() + 1;
        Pattern { entries: self.entries.iter().map(|&v| k - v).collect() }
    }

    pub fn reverse(&self) -> Pattern {
        Pattern { entries: self.entries.iter().rev().copied().collect() }
    }

    /// True when no proper prefix `π(1..i)` is exactly the set `{1..i}`.
    pub fn is_indecomposable(&self) -> bool {
        let mut prefix_max = 0;
        for (i, &v) in self.entries[..self.len() - 1].iter().enumerate() {
            prefix_max = prefix_max.max(v);
            if prefix_max == i + 1 {
                return false;
            }
        }
        true
    }

    pub fn descent_word(&self) -> Result<DescentWord> {
        descent_word(&self.entries)
    }

    /// Number of descents `π_i > π_{i+1}`.
    pub fn descents(&self) -> usize {
        self.entries.windows(2).filter(|w| w[0] > w[1]).count()
    }

    /// True iff every window of length `m+1` standardizes outside `set`.
    pub fn avoids(&self, set: &PatternSet) -> bool {
        avoids(&self.entries, set)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 9 {
            for v in &self.entries {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.entries.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_pattern_at(s.trim(), 0)
    }
}

impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn parse_pattern_at(s: &str, offset: usize) -> Result<Pattern> {
    let err = |position: usize, message: String| Error::Parse { position, message };
    if s.is_empty() {
        return Err(err(offset, "empty pattern".into()));
    }
    let entries: Vec<usize> = if s.contains(',') {
        let mut out = Vec::new();
        let mut pos = offset;
        for tok in s.split(',') {
            let t = tok.trim();
            let v = t.parse::<usize>().map_err(|_| err(pos, format!("expected an integer, found {tok:?}")))?;
            out.push(v);
            pos += tok.len() + 1;
        }
        out
    } else {
        s.chars()
            .enumerate()
            .map(|(i, c)| {
                c.to_digit(10).map(|d| d as usize).ok_or_else(|| err(offset + i, format!("unexpected character {c:?}")))
            })
            .collect::<Result<_>>()?
    };
    Pattern::new(entries).map_err(|_| err(offset, format!("{s:?} is not a permutation")))
}

/// Lexicographic rank of the standardization of `x`; entries must be distinct.
pub fn order_rank<T: PartialOrd>(x: &[T]) -> usize {
    let k = x.len();
    let mut rank = 0;
    for i in 0..k {
        let smaller = x[i + 1..].iter().filter(|y| **y < x[i]).count();
        rank = rank * (k - i) + smaller;
    }
    rank
}

/// The permutation recording the relative order of `x`.
///
/// Ties are detected by exact equality and reported as [`Error::DuplicateValue`].
pub fn standardize<T: PartialOrd>(x: &[T]) -> Result<Pattern> {
    if x.is_empty() {
        return Err(Error::TooShort(0));
    }
    let mut entries = vec![1; x.len()];
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            match x[i].partial_cmp(&x[j]) {
                Some(std::cmp::Ordering::Less) => entries[j] += 1,
                Some(std::cmp::Ordering::Greater) => entries[i] += 1,
                _ => return Err(Error::DuplicateValue { first: i, second: j }),
            }
        }
    }
    Ok(Pattern { entries })
}

pub(crate) fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Rearranges `a` into the next permutation in lexicographic order.
/// Returns false (leaving `a` sorted ascending) after the last one.
pub(crate) fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        a.reverse();
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// All permutations of length `k` in lexicographic order.
pub fn permutations(k: usize) -> impl Iterator<Item = Pattern> {
    let mut current: Option<Vec<usize>> = Some((1..=k).collect());
    std::iter::from_fn(move || {
        let out = current.take()?;
        let mut next = out.clone();
        if next_permutation(&mut next) {
            current = Some(next);
        }
        Some(Pattern { entries: out })
    })
}

/// A set of forbidden patterns, all of length `m + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    m: usize,
    members: BTreeSet<Pattern>,
    mask: Option<Vec<bool>>,
}

impl PatternSet {
    pub fn new(m: usize, members: impl IntoIterator<Item = Pattern>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("window order m must be at least 1".into()));
        }
        let members: BTreeSet<Pattern> = members.into_iter().collect();
        if let Some(p) = members.iter().find(|p| p.len() != m + 1) {
            return Err(Error::ArityMismatch { expected: m + 1, found: p.len() });
        }
        let mask = (m < MASK_MAX_LEN).then(|| {
            let mut mask = vec![false; factorial(m + 1)];
            for p in &members {
                mask[p.rank()] = true;
            }
            mask
        });
        Ok(PatternSet { m, members, mask })
    }

    /// Infers `m` from the members; the iterator must be nonempty.
    pub fn from_patterns(members: impl IntoIterator<Item = Pattern>) -> Result<Self> {
        let members: Vec<Pattern> = members.into_iter().collect();
        let first =
            members.first().ok_or_else(|| Error::InvalidParameter("cannot infer m from an empty set".into()))?;
        PatternSet::new(first.len() - 1, members)
    }

    pub fn empty(m: usize) -> Result<Self> {
        PatternSet::new(m, [])
    }

    /// Every pattern of length `m + 1` (the full symmetric group).
    pub fn full(m: usize) -> Result<Self> {
        PatternSet::new(m, permutations(m + 1))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn members(&self) -> impl ExactSizeIterator<Item = &Pattern> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: &Pattern) -> bool {
        self.members.contains(p)
    }

    /// Membership by lexicographic rank of a length-`m+1` permutation.
    #[inline]
    pub fn forbids_rank(&self, rank: usize) -> bool {
        match &self.mask {
            Some(mask) => mask[rank],
            None => self.members.contains(&Pattern::from_rank(self.m + 1, rank)),
        }
    }

    /// True iff the distinct values in `window` standardize into the set.
    #[inline]
    pub fn forbids_window<T: PartialOrd>(&self, window: &[T]) -> bool {
        self.forbids_rank(order_rank(window))
    }

    /// Indicator χ: 0 on ties or forbidden windows, 1 otherwise.
    pub fn chi(&self, x: &[f64]) -> Result<u8> {
        if x.len() != self.m + 1 {
            return Err(Error::ArityMismatch { expected: self.m + 1, found: x.len() });
        }
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                if x[i] == x[j] {
                    return Ok(0);
                }
            }
        }
        Ok(u8::from(!self.forbids_window(x)))
    }

    pub fn contains_increasing(&self) -> bool {
        self.contains(&Pattern::identity(self.m + 1))
    }

    pub fn contains_decreasing(&self) -> bool {
        self.contains(&Pattern::decreasing(self.m + 1))
    }

    fn map(&self, f: impl Fn(&Pattern) -> Pattern) -> PatternSet {
        PatternSet::new(self.m, self.members.iter().map(f)).expect("length preserved")
    }

    pub fn complement(&self) -> PatternSet {
        self.map(Pattern::complement)
    }

    pub fn reverse(&self) -> PatternSet {
        self.map(Pattern::reverse)
    }

    /// The descent set `U` with `S = S(U)`, if the set is closed under
    /// "same descent word".
    pub fn as_descent_set(&self) -> Option<DescentSet> {
        if self.m < 1 {
            return None;
        }
        let words: BTreeSet<DescentWord> =
            self.members.iter().map(|p| p.descent_word().expect("length at least 2")).collect();
        let u = DescentSet::new(self.m, words).ok()?;
        (patterns_of_descent_set(&u) == *self).then_some(u)
    }
}

impl fmt::Display for PatternSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.members.is_empty() {
            return write!(f, "{{}}:{}", self.m);
        }
        let parts: Vec<String> =
            self.members.iter().map(|p| if p.len() > 9 { format!("({p})") } else { p.to_string() }).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromStr for PatternSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_pattern_set(s)
    }
}

impl Serialize for PatternSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PatternSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Indicator χ of a pattern set at a point of `[0,1]^{m+1}`.
pub fn chi(set: &PatternSet, x: &[f64]) -> Result<u8> {
    set.chi(x)
}

/// Window test over a sequence of distinct values; vacuously true when the
/// sequence is no longer than `m`.
pub fn avoids<T: PartialOrd>(values: &[T], set: &PatternSet) -> bool {
    if set.is_empty() {
        return true;
    }
    values.windows(set.m + 1).all(|w| !set.forbids_window(w))
}

/// Letters of a descent word: `A` marks an ascent, `B` a descent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A,
    B,
}

impl Letter {
    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
        }
    }
}

/// An `ab`-word recording ascents and descents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DescentWord {
    letters: Vec<Letter>,
}

impl DescentWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        DescentWord { letters }
    }

    /// All words of the given length, lexicographic with `a < b`.
    pub fn all(len: usize) -> impl Iterator<Item = DescentWord> {
        (0..1usize << len).map(move |bits| DescentWord {
            letters: (0..len).map(|i| if bits >> (len - 1 - i) & 1 == 1 { Letter::B } else { Letter::A }).collect(),
        })
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

    /// Position among words of the same length, reading `a = 0`, `b = 1`
    /// as binary digits.
    pub fn index(&self) -> usize {
        self.letters.iter().fold(0, |acc, &l| (acc << 1) | usize::from(l == Letter::B))
    }

    pub fn from_index(len: usize, index: usize) -> Self {
        DescentWord {
            letters: (0..len).map(|i| if index >> (len - 1 - i) & 1 == 1 { Letter::B } else { Letter::A }).collect(),
        }
    }

    pub fn count(&self, letter: Letter) -> usize {
        self.letters.iter().filter(|&&l| l == letter).count()
    }
}

impl fmt::Display for DescentWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for DescentWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                'a' => Ok(Letter::A),
                'b' => Ok(Letter::B),
                _ => Err(Error::Parse { position: i, message: format!("expected 'a' or 'b', found {c:?}") }),
            })
            .collect::<Result<_>>()?;
        Ok(DescentWord { letters })
    }
}

/// Descent word of a sequence of distinct values.
pub fn descent_word<T: PartialOrd>(values: &[T]) -> Result<DescentWord> {
    if values.len() < 2 {
        return Err(Error::TooShort(values.len()));
    }
    Ok(DescentWord { letters: values.windows(2).map(|w| if w[0] < w[1] { Letter::A } else { Letter::B }).collect() })
}

/// A set of forbidden descent words, all of length `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentSet {
    m: usize,
    words: BTreeSet<DescentWord>,
}

impl DescentSet {
    pub fn new(m: usize, words: impl IntoIterator<Item = DescentWord>) -> Result<Self> {
        let words: BTreeSet<DescentWord> = words.into_iter().collect();
        if let Some(w) = words.iter().find(|w| w.len() != m) {
            return Err(Error::ArityMismatch { expected: m, found: w.len() });
        }
        if m == 0 {
            return Err(Error::TooShort(0));
        }
        Ok(DescentSet { m, words })
    }

    /// Infers `m` from the words; mixed lengths are an error.
    pub fn from_words(words: impl IntoIterator<Item = DescentWord>) -> Result<Self> {
        let words: Vec<DescentWord> = words.into_iter().collect();
        let m = words.first().ok_or_else(|| Error::InvalidParameter("cannot infer m from an empty set".into()))?.len();
        DescentSet::new(m, words)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn words(&self) -> impl ExactSizeIterator<Item = &DescentWord> {
        self.words.iter()
    }

    pub fn contains(&self, w: &DescentWord) -> bool {
        self.words.contains(w)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl fmt::Display for DescentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.words.iter().map(|w| w.to_string()).collect();
        write!(f, "d:{{{}}}", parts.join(","))
    }
}

/// `S(U)`: every permutation of length `m+1` whose descent word lies in `U`.
pub fn patterns_of_descent_set(u: &DescentSet) -> PatternSet {
    let members = permutations(u.m + 1).filter(|p| u.contains(&p.descent_word().expect("m >= 1")));
    PatternSet::new(u.m, members).expect("lengths are m+1")
}

/// A parsed pattern argument: the forbidden set plus, when it was given as
/// descent words, the originating descent set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternInput {
    pub set: PatternSet,
    pub descent: Option<DescentSet>,
}

/// Parses `"{123,231}"`, `"{}:2"`, `"213"`, `"d:aab"` or `"d:{aa,bb}"`.
pub fn parse_pattern_spec(text: &str) -> Result<PatternInput> {
    let trimmed = text.trim();
    let lead = text.len() - text.trim_start().len();
    if let Some(rest) = trimmed.strip_prefix("d:") {
        let offset = lead + 2;
        let (body, offset) = match rest.strip_prefix('{') {
            Some(inner) => (
                inner.strip_suffix('}').ok_or_else(|| Error::Parse {
                    position: offset + rest.len(),
                    message: "missing closing brace".into(),
                })?,
                offset + 1,
            ),
            None => (rest, offset),
        };
        let mut words = Vec::new();
        let mut pos = offset;
        for tok in body.split(',') {
            let w: DescentWord = tok.trim().parse().map_err(|e| match e {
                Error::Parse { position, message } => Error::Parse { position: pos + position, message },
                other => other,
            })?;
            if w.is_empty() {
                return Err(Error::Parse { position: pos, message: "empty descent word".into() });
            }
            words.push(w);
            pos += tok.len() + 1;
        }
        let m = words[0].len();
        if let Some(w) = words.iter().find(|w| w.len() != m) {
            return Err(Error::Parse {
                position: offset,
                message: format!("mixed word lengths: {} and {}", m, w.len()),
            });
        }
        let descent = DescentSet::new(m, words)?;
        let set = patterns_of_descent_set(&descent);
        return Ok(PatternInput { set, descent: Some(descent) });
    }
    Ok(PatternInput { set: parse_pattern_set_at(trimmed, lead)?, descent: None })
}

fn parse_pattern_set(s: &str) -> Result<PatternSet> {
    let lead = s.len() - s.trim_start().len();
    parse_pattern_set_at(s.trim(), lead)
}

fn parse_pattern_set_at(s: &str, offset: usize) -> Result<PatternSet> {
    let perr = |position: usize, message: &str| Error::Parse { position, message: message.into() };
    let Some(inner_and_tail) = s.strip_prefix('{') else {
        // A bare pattern is a singleton set.
        let p = parse_pattern_at(s, offset)?;
        return PatternSet::new(p.len() - 1, [p]).map_err(|e| perr(offset, &e.to_string()));
    };
    let close = inner_and_tail.rfind('}').ok_or_else(|| perr(offset + s.len(), "missing closing brace"))?;
    let inner = &inner_and_tail[..close];
    let tail = &inner_and_tail[close + 1..];
    let tail_pos = offset + 2 + close;
    let explicit_m = match tail.strip_prefix(':') {
        Some(m) => {
            Some(m.trim().parse::<usize>().map_err(|_| perr(tail_pos + 1, "expected the window order m after ':'"))?)
        }
        None if tail.trim().is_empty() => None,
        None => return Err(perr(tail_pos, "unexpected trailing characters")),
    };
    let mut patterns = Vec::new();
    let mut pos = offset + 1;
    for tok in split_top_level(inner) {
        let t = tok.trim();
        if t.is_empty() {
            if inner.trim().is_empty() {
                break;
            }
            return Err(perr(pos, "empty pattern"));
        }
        let token_pos = pos + (tok.len() - tok.trim_start().len());
        let p = match t.strip_prefix('(') {
            Some(body) => {
                let body = body.strip_suffix(')').ok_or_else(|| perr(token_pos, "unbalanced parenthesis"))?;
                parse_pattern_at(body, token_pos + 1)?
            }
            None => parse_pattern_at(t, token_pos)?,
        };
        patterns.push((token_pos, p));
        pos += tok.len() + 1;
    }
    let m = match (explicit_m, patterns.first()) {
        (Some(m), _) => m,
        (None, Some((_, p))) => p.len() - 1,
        (None, None) => return Err(perr(offset, "an empty set needs an explicit order, e.g. {}:2")),
    };
    if let Some((at, p)) = patterns.iter().find(|(_, p)| p.len() != m + 1) {
        return Err(perr(
            *at,
            &format!("mixed lengths: expected patterns of length {}, found {p} of length {}", m + 1, p.len()),
        ));
    }
    PatternSet::new(m, patterns.into_iter().map(|(_, p)| p)).map_err(|e| perr(offset, &e.to_string()))
}

/// Splits on commas that are not inside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}
