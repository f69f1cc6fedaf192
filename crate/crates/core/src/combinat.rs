//! Words over `{1, …, m}`, inversion counting, and the bijections between
//! binary words, north-east lattice paths, and Ferrers diagrams.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of words [`enumerate_words`] will produce.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

/// A word `w_1 ⋯ w_n` over the alphabet `{1, …, m}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<u32>,
    m: u32,
}

impl Word {
    pub fn new(letters: Vec<u32>, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if let Some((position, &letter)) = letters
            .iter()
            .enumerate()
            .find(|(_, &l)| l == 0 || l > m)
        {
            return Err(Error::LetterOutOfRange {
                letter,
                position,
                m,
            });
        }
        Ok(Self { letters, m })
    }

    /// Skips validation; callers guarantee every letter lies in `1..=m`.
    pub(crate) fn from_trusted(letters: Vec<u32>, m: u32) -> Self {
        debug_assert!(letters.iter().all(|&l| (1..=m).contains(&l)));
        Self { letters, m }
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Occurrences `N_1, …, N_m` of each letter.
    pub fn letter_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.m as usize];
        for &l in &self.letters {
            counts[l as usize - 1] += 1;
        }
        counts
    }

    /// Parses comma-separated letters, e.g. `"3,1,2"`. An empty string is
    /// the empty word.
    pub fn parse(s: &str, m: u32) -> Result<Self> {
        let s = s.trim();
        let letters = if s.is_empty() {
            Vec::new()
        } else {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|e| Error::Parse(format!("letter {t:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Self::new(letters, m)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.letters {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// `#{(i, j) : i < j, w_i > w_j}` by checking every pair.
pub fn inversions_naive(w: &Word) -> u64 {
    let l = w.letters();
    let mut count = 0;
    for i in 0..l.len() {
        for j in i + 1..l.len() {
            count += u64::from(l[i] > l[j]);
        }
    }
    count
}

/// Inversion count in `O(n log m)`: a Fenwick tree over the alphabet holds
/// how many of each letter have been seen so far.
pub fn inversions(w: &Word) -> u64 {
    let mut seen = Fenwick::new(w.m() as usize);
    let mut count = 0;
    for (i, &l) in w.letters().iter().enumerate() {
        // letters seen so far that are <= l
        let not_greater = seen.prefix_sum(l as usize);
        count += i as u64 - not_greater;
        seen.add(l as usize, 1);
    }
    count
}

/// Fenwick tree over positions `1..=len`.
struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(len: usize) -> Self {
        Self {
            tree: vec![0; len + 1],
        }
    }

    fn add(&mut self, mut i: usize, v: u64) {
        while i < self.tree.len() {
            self.tree[i] += v;
            i += i & i.wrapping_neg();
        }
    }

    fn prefix_sum(&self, mut i: usize) -> u64 {
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }
}

/// Unit step of a lattice path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Step {
    E,
    N,
}

impl Step {
    pub fn flipped(self) -> Self {
        match self {
            Step::E => Step::N,
            Step::N => Step::E,
        }
    }
}

/// A path of unit East/North steps starting at the origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticePath {
    steps: Vec<Step>,
}

impl LatticePath {
    pub fn new(steps: Vec<Step>) -> Self {
        Self { steps }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn east_steps(&self) -> usize {
        self.steps.iter().filter(|&&s| s == Step::E).count()
    }

    pub fn north_steps(&self) -> usize {
        self.len() - self.east_steps()
    }

    /// The mirror image in the diagonal (every step flipped).
    pub fn reflected(&self) -> Self {
        Self::new(self.steps.iter().map(|s| s.flipped()).collect())
    }

    /// Area between the path and the x-axis: each East step contributes
    /// the number of North steps before it.
    pub fn area_under(&self) -> u64 {
        let mut height = 0;
        let mut area = 0;
        for s in &self.steps {
            match s {
                Step::N => height += 1,
                Step::E => area += height,
            }
        }
        area
    }

    /// Area between the path and the y-axis: each North step contributes
    /// the number of East steps before it.
    pub fn area_left(&self) -> u64 {
        self.reflected().area_under()
    }

    /// The `2^n` paths of length `n`, in lexicographic order with `E < N`.
    pub fn all(n: usize) -> impl Iterator<Item = LatticePath> {
        assert!(n < 64, "path enumeration is limited to n < 64");
        (0u64..1 << n).map(move |bits| {
            LatticePath::new(
                (0..n)
                    .map(|i| {
                        if bits >> (n - 1 - i) & 1 == 1 {
                            Step::N
                        } else {
                            Step::E
                        }
                    })
                    .collect(),
            )
        })
    }
}

impl FromStr for LatticePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                'E' | 'e' => Ok(Step::E),
                'N' | 'n' => Ok(Step::N),
                other => Err(Error::Parse(format!("path step {other:?}, expected E or N"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

impl fmt::Display for LatticePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            f.write_str(match s {
                Step::E => "E",
                Step::N => "N",
            })?;
        }
        Ok(())
    }
}

/// Letter 1 becomes `E`, letter 2 becomes `N`, so inversions are the
/// `N`-before-`E` pairs.
pub fn word_to_path(w: &Word) -> Result<LatticePath> {
    if w.m() != 2 {
        return Err(Error::NotBinary(w.m()));
    }
    Ok(LatticePath::new(
        w.letters()
            .iter()
            .map(|&l| if l == 1 { Step::E } else { Step::N })
            .collect(),
    ))
}

pub fn path_to_word(p: &LatticePath) -> Word {
    Word::from_trusted(
        p.steps()
            .iter()
            .map(|s| match s {
                Step::E => 1,
                Step::N => 2,
            })
            .collect(),
        2,
    )
}

/// Left-justified rows of cells, top row first, row lengths weakly decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FerrersDiagram {
    rows: Vec<usize>,
}

impl FerrersDiagram {
    pub fn new(rows: Vec<usize>) -> Result<Self> {
        if let Some(i) = rows.iter().position(|&r| r == 0) {
            return Err(Error::InvalidFerrers(format!("row {i} is empty")));
        }
        if let Some(i) = rows.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::InvalidFerrers(format!(
                "row {} (length {}) is longer than the row above it (length {})",
                i + 1,
                rows[i + 1],
                rows[i]
            )));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.rows.first().copied().unwrap_or(0)
    }

    pub fn semiperimeter(&self) -> usize {
        self.height() + self.width()
    }

    pub fn area(&self) -> u64 {
        self.rows.iter().map(|&r| r as u64).sum()
    }

    /// Parses comma-separated row lengths, top row first.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Self::new(Vec::new());
        }
        let rows = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("row length {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }
}

impl fmt::Display for FerrersDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for r in &self.rows {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Diagram whose right boundary is `E · p · N`, read from `(-1, 0)`.
///
/// The extra column and row give height `#N + 1`, width `#E + 1`, and area
/// `area_left(p) + n + 1`.
pub fn path_to_ferrers(p: &LatticePath) -> FerrersDiagram {
    let mut rows = Vec::with_capacity(p.north_steps() + 1);
    let mut east = 0;
    for s in p.steps() {
        match s {
            Step::E => east += 1,
            Step::N => rows.push(east + 1),
        }
    }
    rows.push(east + 1);
    rows.reverse();
    FerrersDiagram { rows }
}

pub fn ferrers_to_path(f: &FerrersDiagram) -> Result<LatticePath> {
    if f.semiperimeter() < 2 {
        return Err(Error::InvalidFerrers(
            "semiperimeter must be at least 2".into(),
        ));
    }
    let mut bottom_up = f.rows().iter().rev().copied();
    let top = f.width();
    let mut steps = Vec::with_capacity(f.semiperimeter() - 2);
    let mut east = 0;
    for _ in 0..f.height() - 1 {
        let row = bottom_up.next().expect("height - 1 rows below the top");
        while east < row - 1 {
            steps.push(Step::E);
            east += 1;
        }
        steps.push(Step::N);
    }
    while east < top - 1 {
        steps.push(Step::E);
        east += 1;
    }
    Ok(LatticePath::new(steps))
}

/// All `m^n` words of length `n`, lexicographically, refusing when the count
/// exceeds [`DEFAULT_ENUMERATION_BUDGET`].
pub fn enumerate_words(n: usize, m: u32) -> Result<WordIter> {
    enumerate_words_with_budget(n, m, DEFAULT_ENUMERATION_BUDGET)
}

pub fn enumerate_words_with_budget(n: usize, m: u32, budget: u64) -> Result<WordIter> {
    if m == 0 {
        return Err(Error::EmptyAlphabet);
    }
    let total = u32::try_from(n)
        .ok()
        .and_then(|e| u64::from(m).checked_pow(e));
    match total {
        Some(t) if t <= budget => Ok(WordIter {
            current: Some(vec![1; n]),
            m,
            remaining: t,
        }),
        _ => Err(Error::BudgetExceeded {
            requested: format!("{m}^{n}"),
            budget,
        }),
    }
}

/// Odometer over `{1, …, m}^n`.
#[derive(Debug, Clone)]
pub struct WordIter {
    current: Option<Vec<u32>>,
    m: u32,
    remaining: u64,
}

impl Iterator for WordIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let letters = self.current.take()?;
        let out = Word::from_trusted(letters.clone(), self.m);
        self.remaining -= 1;
        let mut next = letters;
        let mut i = next.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if next[i] < self.m {
                next[i] += 1;
                self.current = Some(next);
                break;
            }
            next[i] = 1;
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (r, Some(r))
    }
}

impl ExactSizeIterator for WordIter {}

/// Histogram of inversion counts over every word of length `n`.
pub fn inversion_histogram(n: usize, m: u32) -> Result<Vec<u64>> {
    let mut hist = Vec::new();
    for w in enumerate_words(n, m)? {
        let k = inversions(&w) as usize;
        if hist.len() <= k {
            hist.resize(k + 1, 0);
        }
        hist[k] += 1;
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(letters: &[u32], m: u32) -> Word {
        Word::new(letters.to_vec(), m).unwrap()
    }

    fn path(s: &str) -> LatticePath {
        s.parse().unwrap()
    }

    #[test]
    fn inversion_examples() {
        for (word, expect) in [(w(&[1, 2, 3], 3), 0), (w(&[2, 1], 2), 1), (w(&[3, 1, 2, 3, 1], 3), 5)] {
            assert_eq!(inversions_naive(&word), expect);
            assert_eq!(inversions(&word), expect);
        }
        assert_eq!(inversions(&w(&[], 4)), 0);
    }

    #[test]
    fn word_validation() {
        assert_eq!(
            Word::new(vec![1, 4], 3),
            Err(Error::LetterOutOfRange {
                letter: 4,
                position: 1,
                m: 3
            })
        );
        assert!(matches!(Word::new(vec![0], 3), Err(Error::LetterOutOfRange { .. })));
        assert_eq!(Word::new(vec![], 0), Err(Error::EmptyAlphabet));
        assert_eq!(Word::parse("3, 1,2", 3).unwrap(), w(&[3, 1, 2], 3));
        assert!(Word::parse("1,x", 3).is_err());
        assert_eq!(w(&[3, 1, 3], 3).letter_counts(), vec![1, 0, 2]);
    }

    #[test]
    fn word_path_examples() {
        assert_eq!(word_to_path(&w(&[1, 2], 2)).unwrap().to_string(), "EN");
        assert_eq!(word_to_path(&w(&[2, 1], 2)).unwrap().to_string(), "NE");
        assert_eq!(word_to_path(&w(&[1, 2], 3)), Err(Error::NotBinary(3)));
    }

    #[test]
    fn word_path_round_trip_n10() {
        let words: Vec<_> = enumerate_words(10, 2).unwrap().collect();
        assert_eq!(words.len(), 1024);
        for word in words {
            assert_eq!(path_to_word(&word_to_path(&word).unwrap()), word);
        }
    }

    #[test]
    fn area_examples() {
        assert_eq!((path("EN").area_under(), path("EN").area_left()), (0, 1));
        assert_eq!((path("NE").area_under(), path("NE").area_left()), (1, 0));
        assert_eq!((path("EEE").area_under(), path("EEE").area_left()), (0, 0));
    }

    #[test]
    fn areas_fill_the_bounding_rectangle() {
        for p in LatticePath::all(9) {
            let rect = (p.east_steps() * p.north_steps()) as u64;
            assert_eq!(p.area_under() + p.area_left(), rect);
        }
    }

    #[test]
    fn ferrers_examples() {
        let f = path_to_ferrers(&path("NE"));
        assert_eq!(f.rows(), &[2, 1]);
        assert_eq!((f.area(), f.semiperimeter()), (3, 4));

        let f = path_to_ferrers(&path("EN"));
        assert_eq!(f.rows(), &[2, 2]);
        assert_eq!(f.area(), 4);

        let f = path_to_ferrers(&LatticePath::new(vec![]));
        assert_eq!(f.rows(), &[1]);
        assert_eq!((f.height(), f.width(), f.semiperimeter(), f.area()), (1, 1, 2, 1));
    }

    #[test]
    fn ferrers_round_trip_n8() {
        let mut seen = std::collections::HashSet::new();
        for p in LatticePath::all(8) {
            let f = path_to_ferrers(&p);
            assert_eq!(f.semiperimeter(), 10);
            assert_eq!(ferrers_to_path(&f).unwrap(), p);
            assert!(seen.insert(f));
        }
        assert_eq!(seen.len(), 256);
    }

    #[test]
    fn ferrers_validation() {
        assert!(FerrersDiagram::new(vec![2, 3]).is_err());
        assert!(FerrersDiagram::new(vec![2, 0]).is_err());
        assert_eq!(
            ferrers_to_path(&FerrersDiagram::new(vec![]).unwrap()),
            Err(Error::InvalidFerrers("semiperimeter must be at least 2".into()))
        );
        assert_eq!(FerrersDiagram::parse("3,3,1").unwrap().area(), 7);
        assert!(FerrersDiagram::parse("1,2").is_err());
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_words(2, 2).unwrap().count(), 4);
        assert_eq!(enumerate_words(3, 3).unwrap().count(), 27);
        assert_eq!(enumerate_words(0, 3).unwrap().count(), 1);
        let v: Vec<String> = enumerate_words(2, 2).unwrap().map(|w| w.to_string()).collect();
        assert_eq!(v, ["1,1", "1,2", "2,1", "2,2"]);
        assert_eq!(inversion_histogram(3, 2).unwrap(), vec![4, 2, 2]);
    }

    #[test]
    fn enumeration_budget_refusal() {
        let err = enumerate_words_with_budget(5, 4, 1000).unwrap_err();
        assert_eq!(
            err,
            Error::BudgetExceeded {
                requested: "4^5".into(),
                budget: 1000
            }
        );
        assert!(err.to_string().contains("1000"));
        assert!(enumerate_words(64, 2).is_err());
    }

    #[test]
    fn path_parse_errors() {
        assert!("ENX".parse::<LatticePath>().is_err());
        assert_eq!(path("enNE").to_string(), "ENNE");
    }
}
