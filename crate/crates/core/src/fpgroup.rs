//! Finitely presented groups: words, Todd–Coxeter coset enumeration,
//! abelianization and the Reidemeister–Schreier rewrite of a subgroup.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geography::MinimalType;
use crate::registry::ExampleRecord;
use crate::smith::{abelian_invariants, AbelianInvariants};

/// Default bound on the number of cosets an enumeration may define.
pub const DEFAULT_MAX_COSETS: usize = 100_000;

/// Covering degree of every census example over the Picard modular surface;
/// the cusp indices of each example add up to it.
pub const TOTAL_DEGREE: usize = 72;

/// A freely reduced word. Letter `g + 1` is generator `g` and `-(g + 1)` its
/// inverse.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<i32>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(g: usize) -> Self {
        Word(vec![g as i32 + 1])
    }

    /// Free reduction of the given letters. Panics on the non-letter `0`.
    pub fn from_letters(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut out: Vec<i32> = Vec::new();
        for l in letters {
            assert!(l != 0, "0 is not a letter");
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[0] != -p[1]) && !self.0.contains(&0)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// `[x, y] = x y x⁻¹ y⁻¹`.
    pub fn commutator(x: &Word, y: &Word) -> Word {
        x.concat(y).concat(&x.inverse()).concat(&y.inverse())
    }

    /// `by · self · by⁻¹`.
    pub fn conjugate(&self, by: &Word) -> Word {
        by.concat(self).concat(&by.inverse())
    }

    /// Largest generator index occurring in the word.
    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.unsigned_abs() as usize - 1).max()
    }

    pub fn exponent_sums(&self, generators: usize) -> Vec<i64> {
        let mut v = vec![0i64; generators];
        for l in &self.0 {
            v[l.unsigned_abs() as usize - 1] += l.signum() as i64;
        }
        v
    }

    /// Runs of equal letters are collapsed into powers, e.g. `P^3Q^-2`.
    /// Names longer than one character are separated by `*`.
    pub fn format<S: AsRef<str>>(&self, names: &[S]) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        let sep = if names.iter().any(|n| n.as_ref().chars().count() > 1) { "*" } else { "" };
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut run = 1;
            while i + run < self.0.len() && self.0[i + run] == l {
                run += 1;
            }
            let name = names.get(l.unsigned_abs() as usize - 1).map(|s| s.as_ref().to_string());
            let name = name.unwrap_or_else(|| format!("x{}", l.unsigned_abs()));
            let exp = l.signum() as i64 * run as i64;
            parts.push(if exp == 1 { name } else { format!("{name}^{exp}") });
            i += run;
        }
        parts.join(sep)
    }
}

/// Parses a word over the named generators.
///
/// Accepted syntax: juxtaposition (optionally with `*`, `·` or spaces),
/// parentheses, commutators `[x, y]` read as `x y x⁻¹ y⁻¹`, exponents
/// `^n`, `^-n`, `^{-n}` or superscripts such as `⁻¹`, and `1` for the
/// identity.
pub fn parse_word<S: AsRef<str>>(input: &str, names: &[S]) -> Result<Word> {
    let mut names: Vec<(Vec<char>, usize)> =
        names.iter().enumerate().map(|(i, n)| (n.as_ref().chars().collect(), i)).collect();
    names.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.1.cmp(&b.1)));
    if names.iter().any(|(n, _)| n.is_empty()) {
        return Err(Error::WordParse { word: input.into(), reason: "empty generator name".into() });
    }
    let mut p = WordParser { input, chars: input.chars().collect(), pos: 0, names };
    let w = p.word()?;
    p.skip_separators();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected {:?}", p.chars[p.pos])));
    }
    Ok(w)
}

struct WordParser<'a> {
    input: &'a str,
    chars: Vec<char>,
    pos: usize,
    names: Vec<(Vec<char>, usize)>,
}

const SUPERSCRIPT_DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

impl WordParser<'_> {
    fn error(&self, reason: String) -> Error {
        Error::WordParse { word: self.input.into(), reason: format!("{reason} at position {}", self.pos) }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_separators(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace() || c == '*' || c == '·') {
            self.pos += 1;
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn word(&mut self) -> Result<Word> {
        let mut w = Word::identity();
        loop {
            self.skip_separators();
            match self.peek() {
                None | Some(')') | Some(']') | Some(',') | Some('}') => return Ok(w),
                _ => {
                    let f = self.factor()?;
                    w = w.concat(&f);
                }
            }
        }
    }

    fn factor(&mut self) -> Result<Word> {
        let atom = self.atom()?;
        let mut out = atom;
        while let Some(n) = self.exponent()? {
            out = out.pow(n);
        }
        Ok(out)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_separators();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {c:?}")))
        }
    }

    fn atom(&mut self) -> Result<Word> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(')')?;
                Ok(w)
            }
            Some('[') => {
                self.pos += 1;
                let x = self.word()?;
                self.expect(',')?;
                let y = self.word()?;
                self.expect(']')?;
                Ok(Word::commutator(&x, &y))
            }
            Some('1') => {
                self.pos += 1;
                Ok(Word::identity())
            }
            _ => {
                let rest = &self.chars[self.pos..];
                let hit = self.names.iter().find(|(n, _)| rest.starts_with(n)).map(|(n, g)| (n.len(), *g));
                match hit {
                    Some((len, g)) => {
                        self.pos += len;
                        Ok(Word::generator(g))
                    }
                    None => Err(self.error("unknown generator".into())),
                }
            }
        }
    }

    fn digits(&mut self) -> Result<i64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<i64>().map_err(|_| self.error("expected exponent".into()))
    }

    fn exponent(&mut self) -> Result<Option<i64>> {
        self.skip_ws();
        match self.peek() {
            Some('^') => {
                self.pos += 1;
                self.skip_ws();
                let braced = self.peek() == Some('{');
                if braced {
                    self.pos += 1;
                }
                self.skip_ws();
                let negative = matches!(self.peek(), Some('-') | Some('−'));
                if negative {
                    self.pos += 1;
                }
                self.skip_ws();
                let n = self.digits()?;
                if braced {
                    self.expect('}')?;
                }
                Ok(Some(if negative { -n } else { n }))
            }
            Some(c) if c == '⁻' || SUPERSCRIPT_DIGITS.contains(&c) => {
                let negative = c == '⁻';
                if negative {
                    self.pos += 1;
                }
                let mut n: i64 = 0;
                let mut any = false;
                while let Some(d) = self.peek().and_then(|c| SUPERSCRIPT_DIGITS.iter().position(|s| *s == c)) {
                    n = n.checked_mul(10).and_then(|n| n.checked_add(d as i64)).ok_or_else(|| self.error("exponent too large".into()))?;
                    any = true;
                    self.pos += 1;
                }
                if !any {
                    return Err(self.error("expected superscript digits".into()));
                }
                Ok(Some(if negative { -n } else { n }))
            }
            _ => Ok(None),
        }
    }
}

/// `⟨generators | relators⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self> {
        for r in &relators {
            if r.max_generator().is_some_and(|g| g >= generators.len()) || !r.is_reduced() {
                return Err(Error::InvalidConfig(format!("relator {r:?} is not a reduced word over the generators")));
            }
        }
        Ok(Presentation { generators, relators })
    }

    pub fn parse(generators: &[&str], relators: &[&str]) -> Result<Self> {
        let rels = relators.iter().map(|r| parse_word(r, generators)).collect::<Result<Vec<_>>>()?;
        Presentation::new(generators.iter().map(|s| s.to_string()).collect(), rels)
    }

    /// `Δ = ⟨P, Q | (PQ⁻¹)⁶, P³Q⁻²⟩`.
    pub fn delta() -> Self {
        Presentation::parse(&["P", "Q"], &["(PQ^-1)^6", "P^3Q^-2"]).expect("static presentation")
    }

    /// The (2,3,6) triangle group `⟨x, y | x², y³, (xy)⁶⟩`.
    pub fn triangle_236() -> Self {
        Presentation::parse(&["x", "y"], &["x^2", "y^3", "(xy)^6"]).expect("static presentation")
    }

    /// `N_k = ⟨a, b, c | [a, c], [b, c], [a, b]c⁻ᵏ⟩`.
    pub fn nil(k: i64) -> Self {
        let names = ["a", "b", "c"];
        let (a, b, c) = (Word::generator(0), Word::generator(1), Word::generator(2));
        let rels = vec![
            Word::commutator(&a, &c),
            Word::commutator(&b, &c),
            Word::commutator(&a, &b).concat(&c.pow(-k)),
        ];
        Presentation::new(names.iter().map(|s| s.to_string()).collect(), rels).expect("static presentation")
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        parse_word(s, &self.generators)
    }

    pub fn format_word(&self, w: &Word) -> String {
        w.format(&self.generators)
    }

    /// Exponent-sum rows of the relators.
    pub fn relation_matrix(&self) -> Vec<Vec<i64>> {
        self.relators.iter().map(|r| r.exponent_sums(self.generators.len())).collect()
    }

    pub fn abelian_invariants(&self) -> Result<AbelianInvariants> {
        abelian_invariants(&self.relation_matrix(), self.generators.len())
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| self.format_word(r)).collect();
        write!(f, "⟨{} | {}⟩", self.generators.join(", "), rels.join(", "))
    }
}

/// A subgroup given by generator words in the ambient alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupSpec {
    pub name: String,
    pub generators: Vec<Word>,
}

impl SubgroupSpec {
    pub fn parse(name: &str, ambient: &Presentation, words: &[&str]) -> Result<Self> {
        let generators = words.iter().map(|w| ambient.parse_word(w)).collect::<Result<Vec<_>>>()?;
        Ok(SubgroupSpec { name: name.into(), generators })
    }

    /// The subgroup generated by all ambient generators.
    pub fn whole(ambient: &Presentation) -> Self {
        SubgroupSpec {
            name: "whole group".into(),
            generators: (0..ambient.generators().len()).map(Word::generator).collect(),
        }
    }
}

/// The four rotation-free parabolic subgroups of `Δ` met by the census.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParabolicSubgroup {
    Delta6,
    Delta18a,
    Delta18b,
    Delta54,
}

impl ParabolicSubgroup {
    pub const ALL: [ParabolicSubgroup; 4] =
        [ParabolicSubgroup::Delta6, ParabolicSubgroup::Delta18a, ParabolicSubgroup::Delta18b, ParabolicSubgroup::Delta54];

    pub fn key(self) -> &'static str {
        match self {
            ParabolicSubgroup::Delta6 => "delta6",
            ParabolicSubgroup::Delta18a => "delta18a",
            ParabolicSubgroup::Delta18b => "delta18b",
            ParabolicSubgroup::Delta54 => "delta54",
        }
    }

    pub fn parse(key: &str) -> Option<Self> {
        ParabolicSubgroup::ALL.into_iter().find(|s| s.key() == key)
    }

    pub fn label(self) -> &'static str {
        match self {
            ParabolicSubgroup::Delta6 => "Δ_6",
            ParabolicSubgroup::Delta18a => "Δ_{18,a}",
            ParabolicSubgroup::Delta18b => "Δ_{18,b}",
            ParabolicSubgroup::Delta54 => "Δ_54",
        }
    }

    /// Generator words over `{P, Q}`.
    pub fn generator_words(self) -> &'static [&'static str] {
        match self {
            ParabolicSubgroup::Delta6 => &["[Q,P]", "[P^-1,Q]"],
            ParabolicSubgroup::Delta18a => &["P^3", "[QPQ,P]", "[QP^-1Q,P]"],
            ParabolicSubgroup::Delta18b => &["P^3", "PQPQ^-1P", "[QPQ,P^-1QP]"],
            ParabolicSubgroup::Delta54 => &["[QPQ,P]", "P^-1(QP)^2QP^-1Q^-1"],
        }
    }

    /// The index in `Δ` carried by the subscript.
    pub fn nominal_index(self) -> usize {
        match self {
            ParabolicSubgroup::Delta6 => 6,
            ParabolicSubgroup::Delta18a | ParabolicSubgroup::Delta18b => 18,
            ParabolicSubgroup::Delta54 => 54,
        }
    }

    /// The `k` with the subgroup isomorphic to `N_k`.
    pub fn nil_k(self) -> i64 {
        match self {
            ParabolicSubgroup::Delta6 | ParabolicSubgroup::Delta54 => 1,
            ParabolicSubgroup::Delta18a | ParabolicSubgroup::Delta18b => 3,
        }
    }

    /// Self-intersection of the elliptic curve compactifying the cusp.
    pub fn cusp_self_intersection(self) -> i64 {
        -self.nil_k()
    }

    pub fn spec(self) -> SubgroupSpec {
        SubgroupSpec::parse(self.label(), &Presentation::delta(), self.generator_words()).expect("static words")
    }
}

impl fmt::Display for ParabolicSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A complete coset table: row `c` column `2g` is `c·g`, column `2g + 1` is
/// `c·g⁻¹`. Coset 0 is the subgroup itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    generators: usize,
    rows: Vec<Vec<usize>>,
    defined: usize,
}

fn column(letter: i32) -> usize {
    let g = letter.unsigned_abs() as usize - 1;
    if letter > 0 {
        2 * g
    } else {
        2 * g + 1
    }
}

fn column_letter(col: usize) -> i32 {
    let g = (col / 2) as i32 + 1;
    if col.is_multiple_of(2) {
        g
    } else {
        -g
    }
}

impl CosetTable {
    pub fn index(&self) -> usize {
        self.rows.len()
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    /// Total number of cosets defined while enumerating.
    pub fn cosets_defined(&self) -> usize {
        self.defined
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// `coset · w`.
    pub fn act(&self, coset: usize, w: &Word) -> usize {
        w.letters().iter().fold(coset, |c, l| self.rows[c][column(*l)])
    }

    /// Whether `w` lies in the subgroup.
    pub fn contains(&self, w: &Word) -> bool {
        self.act(0, w) == 0
    }

    /// Every relator fixes every coset and every subgroup generator fixes
    /// coset 0.
    pub fn verify(&self, p: &Presentation, h: &SubgroupSpec) -> bool {
        let complete = self.rows.iter().all(|r| r.len() == 2 * self.generators && r.iter().all(|c| *c < self.rows.len()));
        let inverse_ok = (0..self.rows.len()).all(|c| (0..2 * self.generators).all(|x| self.rows[self.rows[c][x]][x ^ 1] == c));
        complete
            && inverse_ok
            && (0..self.rows.len()).all(|c| p.relators().iter().all(|r| self.act(c, r) == c))
            && h.generators.iter().all(|w| self.contains(w))
    }

    /// Breadth-first spanning tree: for each coset the edge `(parent, column)`
    /// it was first reached by, and a representative word.
    fn spanning_tree(&self) -> (Vec<Option<(usize, usize)>>, Vec<Word>) {
        let n = self.rows.len();
        let mut tree = vec![None; n];
        let mut reps = vec![Word::identity(); n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            for x in 0..2 * self.generators {
                let d = self.rows[c][x];
                if !seen[d] {
                    seen[d] = true;
                    tree[d] = Some((c, x));
                    reps[d] = reps[c].concat(&Word(vec![column_letter(x)]));
                    queue.push_back(d);
                }
            }
        }
        (tree, reps)
    }

    /// A Schreier transversal: `reps[c]` maps coset 0 to coset `c`.
    pub fn transversal(&self) -> Vec<Word> {
        self.spanning_tree().1
    }

    /// Index of the Schreier generator on edge `c --g--> c·g`, or `None` for
    /// tree edges.
    fn schreier_indices(&self) -> (Vec<Vec<Option<usize>>>, usize) {
        let (tree, _) = self.spanning_tree();
        let mut idx = vec![vec![None; self.generators]; self.rows.len()];
        let mut count = 0;
        for c in 0..self.rows.len() {
            for g in 0..self.generators {
                let d = self.rows[c][2 * g];
                let is_tree = tree[d] == Some((c, 2 * g)) || tree[c] == Some((d, 2 * g + 1));
                if !is_tree {
                    idx[c][g] = Some(count);
                    count += 1;
                }
            }
        }
        (idx, count)
    }

    /// Schreier generators `rep(c) · g · rep(c·g)⁻¹` of the subgroup.
    pub fn schreier_generators(&self) -> Vec<Word> {
        let (_, reps) = self.spanning_tree();
        let (idx, count) = self.schreier_indices();
        let mut out = vec![Word::identity(); count];
        for (c, row) in idx.iter().enumerate() {
            for (g, k) in row.iter().enumerate() {
                if let Some(k) = k {
                    let d = self.rows[c][2 * g];
                    out[*k] = reps[c].concat(&Word::generator(g)).concat(&reps[d].inverse());
                }
            }
        }
        out
    }

    /// Abelianization of the subgroup from its Reidemeister–Schreier
    /// presentation: Schreier generators modulo the relators rewritten from
    /// every coset.
    pub fn subgroup_abelianization(&self, p: &Presentation) -> Result<AbelianInvariants> {
        let (idx, count) = self.schreier_indices();
        let mut rows = Vec::with_capacity(self.rows.len() * p.relators().len());
        for c in 0..self.rows.len() {
            for r in p.relators() {
                let mut row = vec![0i64; count];
                let mut x = c;
                for l in r.letters() {
                    let g = l.unsigned_abs() as usize - 1;
                    if *l > 0 {
                        if let Some(k) = idx[x][g] {
                            row[k] += 1;
                        }
                        x = self.rows[x][2 * g];
                    } else {
                        let y = self.rows[x][2 * g + 1];
                        if let Some(k) = idx[y][g] {
                            row[k] -= 1;
                        }
                        x = y;
                    }
                }
                rows.push(row);
            }
        }
        abelian_invariants(&rows, count)
    }

    /// The map `H·x ↦ K_start·x` onto the cosets of a second table, if it is
    /// well defined, which happens exactly when `H` lies in the stabilizer
    /// of coset `start` of `K`.
    pub fn projection_onto(&self, larger: &CosetTable, start: usize) -> Option<Vec<usize>> {
        if larger.generators != self.generators {
            return None;
        }
        let mut phi = vec![usize::MAX; self.rows.len()];
        phi[0] = start;
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            for x in 0..2 * self.generators {
                let d = self.rows[c][x];
                let image = larger.rows[phi[c]][x];
                if phi[d] == usize::MAX {
                    phi[d] = image;
                    queue.push_back(d);
                } else if phi[d] != image {
                    return None;
                }
            }
        }
        Some(phi)
    }
}

/// Outcome of a bounded coset enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enumeration {
    Complete(CosetTable),
    /// The bound was reached before the table closed.
    Inconclusive { defined: usize, bound: usize },
}

impl Enumeration {
    pub fn index(&self) -> Option<usize> {
        match self {
            Enumeration::Complete(t) => Some(t.index()),
            Enumeration::Inconclusive { .. } => None,
        }
    }

    pub fn table(&self) -> Option<&CosetTable> {
        match self {
            Enumeration::Complete(t) => Some(t),
            Enumeration::Inconclusive { .. } => None,
        }
    }
}

const UNDEFINED: usize = usize::MAX;

struct BoundReached;

struct Enumerator {
    cols: usize,
    table: Vec<Vec<usize>>,
    parent: Vec<usize>,
    bound: usize,
    queue: Vec<usize>,
}

impl Enumerator {
    fn new(cols: usize, bound: usize) -> Self {
        Enumerator { cols, table: vec![vec![UNDEFINED; cols]], parent: vec![0], bound, queue: Vec::new() }
    }

    fn live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, x: usize) -> std::result::Result<(), BoundReached> {
        if self.table.len() >= self.bound {
            return Err(BoundReached);
        }
        let d = self.table.len();
        self.table.push(vec![UNDEFINED; self.cols]);
        self.parent.push(d);
        self.table[c][x] = d;
        self.table[d][x ^ 1] = c;
        Ok(())
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = c;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        self.parent[hi] = lo;
        self.queue.push(hi);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let e = self.queue[i];
            i += 1;
            for x in 0..self.cols {
                let f = self.table[e][x];
                if f == UNDEFINED {
                    continue;
                }
                if self.table[f][x ^ 1] == e {
                    self.table[f][x ^ 1] = UNDEFINED;
                }
                let e1 = self.rep(e);
                let f1 = self.rep(f);
                if self.table[e1][x] != UNDEFINED {
                    let t = self.table[e1][x];
                    self.merge(f1, t);
                } else if self.table[f1][x ^ 1] != UNDEFINED {
                    let t = self.table[f1][x ^ 1];
                    self.merge(e1, t);
                } else {
                    self.table[e1][x] = f1;
                    self.table[f1][x ^ 1] = e1;
                }
            }
        }
    }

    /// Traces `word` from `c` forwards and backwards, defining cosets to
    /// close the gap and recording deductions and coincidences.
    fn scan_and_fill(&mut self, c: usize, word: &[usize]) -> std::result::Result<(), BoundReached> {
        let mut f = c;
        let mut b = c;
        let mut i: isize = 0;
        let mut j: isize = word.len() as isize - 1;
        loop {
            while i <= j && self.table[f][word[i as usize]] != UNDEFINED {
                f = self.table[f][word[i as usize]];
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i && self.table[b][word[j as usize] ^ 1] != UNDEFINED {
                b = self.table[b][word[j as usize] ^ 1];
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            }
            if i == j {
                let x = word[i as usize];
                self.table[f][x] = b;
                self.table[b][x ^ 1] = f;
                return Ok(());
            }
            self.define(f, word[i as usize])?;
        }
    }

    fn run(&mut self, relators: &[Vec<usize>], subgroup: &[Vec<usize>]) -> std::result::Result<(), BoundReached> {
        for w in subgroup {
            self.scan_and_fill(0, w)?;
        }
        let mut a = 0;
        while a < self.table.len() {
            for r in relators {
                if !self.live(a) {
                    break;
                }
                self.scan_and_fill(a, r)?;
            }
            if self.live(a) {
                for x in 0..self.cols {
                    if self.table[a][x] == UNDEFINED {
                        self.define(a, x)?;
                    }
                }
            }
            a += 1;
        }
        Ok(())
    }

    fn compact(mut self, generators: usize) -> CosetTable {
        let defined = self.table.len();
        let mut new_index = vec![UNDEFINED; defined];
        let mut live = Vec::new();
        for c in 0..defined {
            if self.live(c) {
                new_index[c] = live.len();
                live.push(c);
            }
        }
        let rows = live
            .iter()
            .map(|&c| {
                (0..self.cols)
                    .map(|x| {
                        let t = self.table[c][x];
                        if t == UNDEFINED {
                            UNDEFINED
                        } else {
                            let r = self.rep(t);
                            new_index[r]
                        }
                    })
                    .collect()
            })
            .collect();
        CosetTable { generators, rows, defined }
    }
}

/// Index of `h` in the group presented by `p`, by HLT coset enumeration with
/// coincidence processing. At most `max_cosets` cosets are ever defined;
/// hitting the bound yields [`Enumeration::Inconclusive`].
pub fn coset_enumeration(p: &Presentation, h: &SubgroupSpec, max_cosets: usize) -> Result<Enumeration> {
    if max_cosets == 0 {
        return Err(Error::InvalidConfig("max_cosets must be positive".into()));
    }
    let n = p.generators().len();
    for w in &h.generators {
        if w.max_generator().is_some_and(|g| g >= n) || !w.is_reduced() {
            return Err(Error::InvalidConfig(format!("subgroup generator {w:?} is not a reduced word over the generators")));
        }
    }
    let to_cols = |w: &Word| w.letters().iter().map(|l| column(*l)).collect::<Vec<_>>();
    let relators: Vec<Vec<usize>> = p.relators().iter().map(to_cols).collect();
    let subgroup: Vec<Vec<usize>> = h.generators.iter().map(to_cols).collect();
    let mut e = Enumerator::new(2 * n, max_cosets);
    match e.run(&relators, &subgroup) {
        Err(BoundReached) => Ok(Enumeration::Inconclusive { defined: e.table.len(), bound: max_cosets }),
        Ok(()) => {
            let table = e.compact(n);
            if !table.verify(p, h) {
                return Err(Error::Unsupported("coset table failed verification".into()));
            }
            Ok(Enumeration::Complete(table))
        }
    }
}

/// `[small : large]`-style containment found by projecting coset tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Containment {
    pub subgroup: ParabolicSubgroup,
    pub overgroup: ParabolicSubgroup,
    /// Word `g` with `subgroup ⊆ g⁻¹ · overgroup · g`.
    pub conjugator: String,
    pub relative_index: usize,
    /// Every fibre of the projection has `relative_index` cosets.
    pub multiplicative: bool,
}

/// For every pair of enumerated subgroups with dividing indices and every
/// conjugate of the larger one containing the smaller, checks that the
/// coset projection has uniform fibres of size `[Δ : H] / [Δ : K]`.
pub fn containment_checks(tables: &BTreeMap<ParabolicSubgroup, CosetTable>) -> Vec<Containment> {
    let delta = Presentation::delta();
    let mut out = Vec::new();
    for (h, th) in tables {
        for (k, tk) in tables {
            if h == k || tk.index() >= th.index() || th.index() % tk.index() != 0 {
                continue;
            }
            let relative = th.index() / tk.index();
            let reps = tk.transversal();
            for (start, g) in reps.iter().enumerate() {
                if let Some(phi) = th.projection_onto(tk, start) {
                    let mut fibres = vec![0usize; tk.index()];
                    for c in &phi {
                        fibres[*c] += 1;
                    }
                    out.push(Containment {
                        subgroup: *h,
                        overgroup: *k,
                        conjugator: delta.format_word(g),
                        relative_index: relative,
                        multiplicative: fibres.iter().all(|f| *f == relative),
                    });
                }
            }
        }
    }
    out
}

/// One row of the parabolic census: the cusp groups of an example, their
/// indices and the boundary self-intersections they predict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub example: u8,
    pub surface: String,
    /// `(subgroup, number of conjugacy classes)`.
    pub cusps: Vec<(ParabolicSubgroup, usize)>,
    pub indices: Vec<usize>,
    pub index_sum: usize,
    pub predicted_profile: Vec<i64>,
    pub boundary_profile: Vec<i64>,
    pub sum_ok: bool,
    pub profile_ok: bool,
}

impl CensusRow {
    pub fn holds(&self) -> bool {
        self.sum_ok && self.profile_ok
    }
}

/// The cusp groups of each kind of example.
pub fn cusp_groups(minimal: &MinimalType) -> Option<Vec<(ParabolicSubgroup, usize)>> {
    match minimal {
        MinimalType::Abelian => Some(vec![(ParabolicSubgroup::Delta6, 3), (ParabolicSubgroup::Delta54, 1)]),
        MinimalType::Bielliptic { s, t } if s * t == 3 => {
            Some(vec![(ParabolicSubgroup::Delta18a, 1), (ParabolicSubgroup::Delta54, 1)])
        }
        MinimalType::Bielliptic { s, t } if s * t == 9 => {
            Some(vec![(ParabolicSubgroup::Delta18b, 1), (ParabolicSubgroup::Delta54, 1)])
        }
        _ => None,
    }
}

/// Checks one row: the enumerated indices, weighted by the number of
/// conjugacy classes, add up to [`TOTAL_DEGREE`], and the cusp
/// self-intersections `−k` of the `N_k` cusp groups match the boundary.
pub fn census_row(
    example: u8,
    surface: &str,
    cusps: &[(ParabolicSubgroup, usize)],
    indices: &BTreeMap<ParabolicSubgroup, usize>,
    boundary_profile: &[i64],
) -> CensusRow {
    let mut idx = Vec::new();
    let mut predicted = Vec::new();
    let mut known = true;
    for (s, mult) in cusps {
        match indices.get(s) {
            Some(i) => idx.extend(std::iter::repeat_n(*i, *mult)),
            None => known = false,
        }
        predicted.extend(std::iter::repeat_n(s.cusp_self_intersection(), *mult));
    }
    predicted.sort_unstable();
    let mut boundary = boundary_profile.to_vec();
    boundary.sort_unstable();
    let index_sum = idx.iter().sum();
    CensusRow {
        example,
        surface: surface.into(),
        cusps: cusps.to_vec(),
        indices: idx,
        index_sum,
        predicted_profile: predicted.clone(),
        boundary_profile: boundary.clone(),
        sum_ok: known && index_sum == TOTAL_DEGREE,
        profile_ok: predicted == boundary,
    }
}

/// One [`CensusRow`] per example record.
pub fn census_table_check(
    indices: &BTreeMap<ParabolicSubgroup, usize>,
    records: &[ExampleRecord],
) -> Result<Vec<CensusRow>> {
    records
        .iter()
        .map(|r| {
            let cusps = cusp_groups(&r.minimal)
                .ok_or_else(|| Error::InvalidConfig(format!("example {} has no cusp assignment", r.id)))?;
            Ok(census_row(r.id, &r.surface, &cusps, indices, &r.cusp_profile))
        })
        .collect()
}

/// Cross-checks of a parabolic subgroup against `N_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NilConsistency {
    pub subgroup: ParabolicSubgroup,
    pub k: i64,
    /// Matrix witness for the `N_k` relations, if one was found.
    pub witness: Option<crate::picard::NilWitness>,
    pub nil_abelianization: AbelianInvariants,
    /// From the Reidemeister–Schreier presentation of the subgroup.
    pub subgroup_abelianization: AbelianInvariants,
    pub cusp_self_intersection: i64,
    pub consistent: bool,
}

/// `k ∈ {1, 3}`; `table` is a complete coset table of the subgroup in `Δ`.
pub fn nilgroup_consistency(k: i64, subgroup: ParabolicSubgroup, table: &CosetTable) -> Result<NilConsistency> {
    if k != 1 && k != 3 {
        return Err(Error::InvalidConfig(format!("k = {k} is not a census cusp type")));
    }
    let witness = crate::picard::nil_relation_witness(subgroup, k)?;
    let nil_abelianization = Presentation::nil(k).abelian_invariants()?;
    let subgroup_abelianization = table.subgroup_abelianization(&Presentation::delta())?;
    let consistent = witness.is_some() && nil_abelianization == subgroup_abelianization && subgroup.nil_k() == k;
    Ok(NilConsistency {
        subgroup,
        k,
        witness,
        nil_abelianization,
        subgroup_abelianization,
        cusp_self_intersection: -k,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> [&'static str; 2] {
        ["P", "Q"]
    }

    #[test]
    fn parser_forms_agree() {
        let a = parse_word("[Q,P]", &names()).unwrap();
        let b = parse_word("Q P Q^-1 P^-1", &names()).unwrap();
        let c = parse_word("QPQ⁻¹P⁻¹", &names()).unwrap();
        let d = parse_word("Q*P*Q^{-1}*P^{-1}", &names()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a, d);
        assert_eq!(a.format(&names()), "QPQ^-1P^-1");
        let w = parse_word("P^-1(QP)^2QP^-1Q^-1", &names()).unwrap();
        assert_eq!(w.format(&names()), "P^-1QPQPQP^-1Q^-1");
        assert_eq!(parse_word("PP^-1", &names()).unwrap(), Word::identity());
        assert_eq!(parse_word("1", &names()).unwrap(), Word::identity());
    }

    #[test]
    fn parser_rejects_garbage() {
        assert!(parse_word("PX", &names()).is_err());
        assert!(parse_word("[P,Q", &names()).is_err());
        assert!(parse_word("P^", &names()).is_err());
        assert!(parse_word("(P", &names()).is_err());
    }

    #[test]
    fn format_round_trips() {
        for s in ["P^3Q^-2", "QPQ^-1P^-1", "1", "P^-1QPQPQP^-1Q^-1"] {
            let w = parse_word(s, &names()).unwrap();
            assert_eq!(parse_word(&w.format(&names()), &names()).unwrap(), w);
        }
    }

    #[test]
    fn whole_group_has_index_one() {
        let p = Presentation::delta();
        let e = coset_enumeration(&p, &SubgroupSpec::whole(&p), 100).unwrap();
        assert_eq!(e.index(), Some(1));
    }

    #[test]
    fn finite_groups() {
        // S3 = ⟨a, b | a², b³, (ab)²⟩, trivial subgroup has index 6
        let s3 = Presentation::parse(&["a", "b"], &["a^2", "b^3", "(ab)^2"]).unwrap();
        let trivial = SubgroupSpec { name: "1".into(), generators: vec![] };
        assert_eq!(coset_enumeration(&s3, &trivial, 1000).unwrap().index(), Some(6));
        let a = SubgroupSpec::parse("⟨a⟩", &s3, &["a"]).unwrap();
        assert_eq!(coset_enumeration(&s3, &a, 1000).unwrap().index(), Some(3));
        // the (2,3,5) triangle group is A5, of order 60
        let a5 = Presentation::parse(&["x", "y"], &["x^2", "y^3", "(xy)^5"]).unwrap();
        assert_eq!(coset_enumeration(&a5, &trivial, 10_000).unwrap().index(), Some(60));
    }

    #[test]
    fn infinite_index_is_inconclusive() {
        let z2 = Presentation::parse(&["a", "b"], &["[a,b]"]).unwrap();
        let a = SubgroupSpec::parse("⟨a⟩", &z2, &["a"]).unwrap();
        assert!(matches!(coset_enumeration(&z2, &a, 500).unwrap(), Enumeration::Inconclusive { bound: 500, .. }));
        assert!(coset_enumeration(&z2, &a, 0).is_err());
    }

    #[test]
    fn schreier_rewrite_of_known_subgroups() {
        // commutator subgroup of S3 is Z/3
        let s3 = Presentation::parse(&["a", "b"], &["a^2", "b^3", "(ab)^2"]).unwrap();
        let h = SubgroupSpec::parse("⟨b⟩", &s3, &["b"]).unwrap();
        let t = coset_enumeration(&s3, &h, 100).unwrap();
        let t = t.table().unwrap();
        assert_eq!(t.subgroup_abelianization(&s3).unwrap(), AbelianInvariants::new(0, vec![3]));
        // index-2 subgroup of Z² generated by a², b is Z²
        let z2 = Presentation::parse(&["a", "b"], &["[a,b]"]).unwrap();
        let h = SubgroupSpec::parse("⟨a², b⟩", &z2, &["a^2", "b"]).unwrap();
        let t = coset_enumeration(&z2, &h, 100).unwrap();
        let t = t.table().unwrap();
        assert_eq!(t.index(), 2);
        assert_eq!(t.schreier_generators().len(), 3);
        assert_eq!(t.subgroup_abelianization(&z2).unwrap(), AbelianInvariants::free(2));
        assert!(t.schreier_generators().iter().all(|w| t.contains(w)));
    }

    #[test]
    fn presentation_abelianizations() {
        assert_eq!(Presentation::nil(1).abelian_invariants().unwrap(), AbelianInvariants::free(2));
        assert_eq!(Presentation::nil(3).abelian_invariants().unwrap(), AbelianInvariants::new(2, vec![3]));
        assert_eq!(Presentation::delta().abelian_invariants().unwrap(), AbelianInvariants::new(0, vec![6]));
        assert_eq!(Presentation::triangle_236().abelian_invariants().unwrap(), AbelianInvariants::new(0, vec![6]));
    }

    #[test]
    fn census_row_rejects_bad_sum() {
        let mut idx = BTreeMap::new();
        idx.insert(ParabolicSubgroup::Delta6, 6);
        idx.insert(ParabolicSubgroup::Delta54, 54);
        let good = census_row(1, "x", &[(ParabolicSubgroup::Delta6, 3), (ParabolicSubgroup::Delta54, 1)], &idx, &[-1; 4]);
        assert!(good.holds());
        let bad = census_row(1, "x", &[(ParabolicSubgroup::Delta6, 2), (ParabolicSubgroup::Delta54, 1)], &idx, &[-1; 3]);
        assert!(!bad.sum_ok);
        assert_eq!(bad.index_sum, 66);
    }
}
