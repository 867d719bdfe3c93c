//! Words over a generator alphabet, noncommutative polynomials, and tensors of
//! polynomials across several component algebras.
//!
//! Letters are small integer indices into an [`Alphabet`]. An invertible
//! generator occupies two consecutive indices, the generator and its inverse.
//! Form letters carry degree one; the degree of a word is its number of form
//! letters, and tensor products of graded components carry Koszul signs.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use crate::coeff::Scalar;
use crate::rewrite::Presentation;

/// Index of a letter within its alphabet.
pub type Letter = u16;

/// A finite sequence of letters; the empty word is the unit.
pub type Word = SmallVec<[Letter; 8]>;

/// Errors raised by free-algebra and tensor operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeAlgError {
    /// Two operands live over different alphabets.
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    /// Tensor operands have different arity or component spaces.
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    /// A generator name was declared twice.
    #[error("duplicate generator name {0}")]
    DuplicateName(String),
    /// A name does not denote a generator of the alphabet.
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
}

/// Whether a letter is an algebra element or a 1-form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LetterKind {
    /// Degree-zero generator.
    Algebra,
    /// Degree-one generator.
    Form,
}

/// Data attached to one letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterInfo {
    /// Generator name; inverse letters share the name of their generator.
    pub name: String,
    /// Algebra or form letter.
    pub kind: LetterKind,
    /// Right coaction weight `k` in `f -> f (x) t^k`; negated for inverses.
    pub weight: i32,
    /// Weight used by the term order (positive).
    pub order_weight: u32,
    /// The partner letter of an invertible generator.
    pub partner: Option<Letter>,
    /// True for the inverse letter of an invertible generator.
    pub is_inverse: bool,
}

/// An ordered set of letters. The index order is the lexicographic tiebreak
/// of the term order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<LetterInfo>,
    by_name: HashMap<String, Letter>,
}

/// One generator declaration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    /// Unique name.
    pub name: String,
    /// Whether an inverse letter is adjoined.
    pub invertible: bool,
    /// Coaction weight.
    pub weight: i32,
    /// Algebra or form letter.
    pub kind: LetterKind,
    /// Term-order weight.
    pub order_weight: u32,
}

impl Generator {
    /// A non-invertible algebra generator of weight zero.
    pub fn algebra(name: &str) -> Self {
        Generator {
            name: name.to_string(),
            invertible: false,
            weight: 0,
            kind: LetterKind::Algebra,
            order_weight: 1,
        }
    }

    /// A form generator.
    pub fn form(name: &str) -> Self {
        Generator {
            kind: LetterKind::Form,
            ..Generator::algebra(name)
        }
    }

    /// Marks the generator invertible.
    pub fn inv(mut self) -> Self {
        self.invertible = true;
        self
    }

    /// Sets the coaction weight.
    pub fn weight(mut self, w: i32) -> Self {
        self.weight = w;
        self
    }

    /// Sets the term-order weight.
    pub fn order(mut self, w: u32) -> Self {
        self.order_weight = w.max(1);
        self
    }
}

impl Alphabet {
    /// The empty alphabet (the ground field).
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a generator (and its inverse letter when invertible) and returns
    /// the generator's letter.
    pub fn add(&mut self, g: &Generator) -> Result<Letter, FreeAlgError> {
        if self.by_name.contains_key(&g.name) || g.name.is_empty() {
            return Err(FreeAlgError::DuplicateName(g.name.clone()));
        }
        let idx = self.letters.len() as Letter;
        self.letters.push(LetterInfo {
            name: g.name.clone(),
            kind: g.kind,
            weight: g.weight,
            order_weight: g.order_weight.max(1),
            partner: if g.invertible { Some(idx + 1) } else { None },
            is_inverse: false,
        });
        if g.invertible {
            self.letters.push(LetterInfo {
                name: g.name.clone(),
                kind: g.kind,
                weight: -g.weight,
                order_weight: g.order_weight.max(1),
                partner: Some(idx),
                is_inverse: true,
            });
        }
        self.by_name.insert(g.name.clone(), idx);
        Ok(idx)
    }

    /// Number of letters (inverse letters included).
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// True when there are no letters.
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Letter data.
    pub fn info(&self, x: Letter) -> &LetterInfo {
        &self.letters[x as usize]
    }

    /// All letters in index order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.letters.len()).map(|i| i as Letter)
    }

    /// The generator letter with this name.
    pub fn letter(&self, name: &str) -> Result<Letter, FreeAlgError> {
        let unknown = || FreeAlgError::UnknownGenerator(name.to_string());
        if let Some(&x) = self.by_name.get(name) {
            return Ok(x);
        }
        let base = name.strip_suffix("^-1").ok_or_else(unknown)?;
        let x = self.by_name.get(base).copied().ok_or_else(unknown)?;
        self.inverse(x).ok_or_else(unknown)
    }

    /// The inverse letter of `x`, if any.
    pub fn inverse(&self, x: Letter) -> Option<Letter> {
        self.letters[x as usize].partner
    }

    /// Generators in declaration order (inverse letters omitted).
    pub fn generators(&self) -> Vec<Generator> {
        self.letters
            .iter()
            .filter(|l| !l.is_inverse)
            .map(|l| Generator {
                name: l.name.clone(),
                invertible: l.partner.is_some(),
                weight: l.weight,
                kind: l.kind,
                order_weight: l.order_weight,
            })
            .collect()
    }

    /// Degree of a letter (1 for forms).
    pub fn letter_degree(&self, x: Letter) -> usize {
        match self.letters[x as usize].kind {
            LetterKind::Algebra => 0,
            LetterKind::Form => 1,
        }
    }

    /// True for form letters.
    pub fn is_form(&self, x: Letter) -> bool {
        self.letters[x as usize].kind == LetterKind::Form
    }

    /// Number of form letters in a word.
    pub fn degree(&self, w: &[Letter]) -> usize {
        w.iter().filter(|&&x| self.is_form(x)).count()
    }

    /// Number of algebra letters in a word.
    pub fn algebra_len(&self, w: &[Letter]) -> usize {
        w.len() - self.degree(w)
    }

    /// Sum of coaction weights of a word.
    pub fn weight(&self, w: &[Letter]) -> i32 {
        w.iter().map(|&x| self.letters[x as usize].weight).sum()
    }

    /// Term-order weight of a word.
    pub fn order_weight(&self, w: &[Letter]) -> u64 {
        w.iter()
            .map(|&x| self.letters[x as usize].order_weight as u64)
            .sum()
    }

    /// Compares two words in the weighted degree-lexicographic term order.
    pub fn cmp_words(&self, a: &[Letter], b: &[Letter]) -> std::cmp::Ordering {
        self.order_weight(a)
            .cmp(&self.order_weight(b))
            .then_with(|| a.cmp(b))
    }

    /// Rendered name of a letter, e.g. `u` or `u^-1`.
    pub fn letter_name(&self, x: Letter) -> String {
        let info = &self.letters[x as usize];
        if info.is_inverse {
            format!("{}^-1", info.name)
        } else {
            info.name.clone()
        }
    }

    /// True when `self` is a prefix of `other`, so that words over `self`
    /// are words over `other` with the same meaning.
    pub fn is_prefix_of(&self, other: &Alphabet) -> bool {
        self.letters.len() <= other.letters.len()
            && self
                .letters
                .iter()
                .zip(other.letters.iter())
                .all(|(a, b)| a == b)
    }

    /// Renders a word as `u*v^-1*du`; the empty word is `1`.
    pub fn render_word(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.iter()
            .map(|&x| self.letter_name(x))
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Checks every letter of a polynomial lies in this alphabet.
    pub fn check_poly(&self, p: &Poly) -> Result<(), FreeAlgError> {
        for (w, _) in p.terms() {
            if let Some(&x) = w.iter().find(|&&x| x as usize >= self.letters.len()) {
                return Err(FreeAlgError::AlphabetMismatch(format!(
                    "letter index {x} outside an alphabet of {} letters",
                    self.letters.len()
                )));
            }
        }
        Ok(())
    }
}

/// Builds a word from letters.
pub fn word(letters: &[Letter]) -> Word {
    Word::from_slice(letters)
}

/// Concatenates two words.
pub fn concat(a: &[Letter], b: &[Letter]) -> Word {
    let mut w = Word::with_capacity(a.len() + b.len());
    w.extend_from_slice(a);
    w.extend_from_slice(b);
    w
}

/// A noncommutative polynomial: a finite map from words to nonzero scalars.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Word, Scalar>,
}

impl Poly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Poly::default()
    }

    /// The unit polynomial.
    pub fn one() -> Self {
        Poly::scalar(Scalar::one())
    }

    /// A scalar multiple of the unit.
    pub fn scalar(c: Scalar) -> Self {
        Poly::term(Word::new(), c)
    }

    /// A single word with coefficient one.
    pub fn word(w: Word) -> Self {
        Poly::term(w, Scalar::one())
    }

    /// A single letter.
    pub fn letter(x: Letter) -> Self {
        Poly::word(word(&[x]))
    }

    /// `c * w`.
    pub fn term(w: Word, c: Scalar) -> Self {
        let mut p = Poly::zero();
        p.add_term(w, c);
        p
    }

    /// Iterates over `(word, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    /// Consumes the polynomial into its terms.
    pub fn into_terms(self) -> impl Iterator<Item = (Word, Scalar)> {
        self.terms.into_iter()
    }

    /// The underlying word-to-coefficient map.
    pub fn as_map(&self) -> &BTreeMap<Word, Scalar> {
        &self.terms
    }

    /// Builds a polynomial from a word-to-coefficient map, dropping zeros.
    pub fn from_map(m: BTreeMap<Word, Scalar>) -> Self {
        let mut p = Poly::zero();
        for (w, c) in m {
            p.add_term(w, c);
        }
        p
    }

    /// Coefficient of a word.
    pub fn coeff(&self, w: &[Letter]) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c * w`, dropping zero coefficients.
    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Poly, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (w, d) in &other.terms {
            self.add_term(w.clone(), c * d);
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(w, d)| (w.clone(), c * d)).collect(),
        }
    }

    /// Concatenation product without rewriting.
    pub fn concat_mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(concat(a, b), ca * cb);
            }
        }
        out
    }

    /// The scalar coefficient of the empty word.
    pub fn constant(&self) -> Scalar {
        self.coeff(&[])
    }

    /// True when every word has the given form degree.
    pub fn is_homogeneous(&self, alphabet: &Alphabet, degree: usize) -> bool {
        self.terms.keys().all(|w| alphabet.degree(w) == degree)
    }

    /// Keeps only terms of the given form degree.
    pub fn degree_part(&self, alphabet: &Alphabet, degree: usize) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| alphabet.degree(w) == degree)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Largest form degree among terms (0 for zero).
    pub fn max_degree(&self, alphabet: &Alphabet) -> usize {
        self.terms
            .keys()
            .map(|w| alphabet.degree(w))
            .max()
            .unwrap_or(0)
    }

    /// Longest word length.
    pub fn max_len(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    /// Renders against an alphabet, e.g. `u*v + (-l^1)*v*du`.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(w, c)| render_term(&alphabet.render_word(w), w.is_empty(), c))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn render_term(word: &str, empty: bool, c: &Scalar) -> String {
    if c.is_one() {
        word.to_string()
    } else if empty {
        format!("({c})")
    } else {
        format!("({c})*{word}")
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| format!("({c}){w:?}"))
            .collect();
        write!(f, "Poly[{}]", parts.join(" + "))
    }
}

impl std::ops::Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        for (w, c) in rhs.terms {
            self.add_term(w, c);
        }
        self
    }
}

impl<'a> std::ops::Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        self.clone() + rhs.clone()
    }
}

impl std::ops::Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        for (w, c) in rhs.terms {
            self.add_term(w, -c);
        }
        self
    }
}

impl<'a> std::ops::Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        self.clone() - rhs.clone()
    }
}

impl std::ops::Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Scalar::one())
    }
}

/// Concatenation product of two polynomials over the same alphabet.
pub fn poly_mul(alphabet: &Alphabet, p: &Poly, r: &Poly) -> Result<Poly, FreeAlgError> {
    alphabet.check_poly(p)?;
    alphabet.check_poly(r)?;
    Ok(p.concat_mul(r))
}

/// A linear combination of tuples of words, one word per component algebra.
///
/// Components are presentations; every stored word is in normal form for its
/// component, and multiplication carries the Koszul sign of the graded tensor
/// product.
#[derive(Clone)]
pub struct Tensor {
    comps: Vec<Arc<Presentation>>,
    terms: BTreeMap<Vec<Word>, Scalar>,
}

impl PartialEq for Tensor {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && same_comps(&self.comps, &other.comps)
    }
}

impl Eq for Tensor {}

fn same_comps(a: &[Arc<Presentation>], b: &[Arc<Presentation>]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| Arc::ptr_eq(x, y) || x.name() == y.name())
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tensor[{}]", self.render())
    }
}

impl Tensor {
    /// The zero tensor over the given components.
    pub fn zero(comps: Vec<Arc<Presentation>>) -> Self {
        Tensor {
            comps,
            terms: BTreeMap::new(),
        }
    }

    /// `1 (x) ... (x) 1`.
    pub fn one(comps: Vec<Arc<Presentation>>) -> Self {
        let n = comps.len();
        Tensor::pure(comps, vec![Word::new(); n], Scalar::one())
    }

    /// A single tuple of words (normalized componentwise).
    pub fn pure(comps: Vec<Arc<Presentation>>, words: Vec<Word>, c: Scalar) -> Self {
        let polys: Vec<Poly> = words.into_iter().map(Poly::word).collect();
        let mut t = Tensor::from_polys(comps, &polys);
        t = t.scale(&c);
        t
    }

    /// The tensor product of polynomials, normalized componentwise.
    pub fn from_polys(comps: Vec<Arc<Presentation>>, polys: &[Poly]) -> Self {
        assert_eq!(comps.len(), polys.len(), "one polynomial per component");
        let normal: Vec<Poly> = comps
            .iter()
            .zip(polys)
            .map(|(pres, p)| pres.nf(p))
            .collect();
        let mut out = Tensor::zero(comps);
        let mut acc: Vec<(Vec<Word>, Scalar)> = vec![(Vec::new(), Scalar::one())];
        for p in &normal {
            let mut next = Vec::new();
            for (ws, c) in &acc {
                for (w, d) in p.terms() {
                    let mut ws2 = ws.clone();
                    ws2.push(w.clone());
                    next.push((ws2, c * d));
                }
            }
            acc = next;
        }
        for (ws, c) in acc {
            out.add_term(ws, c);
        }
        out
    }

    /// Component presentations.
    pub fn comps(&self) -> &[Arc<Presentation>] {
        &self.comps
    }

    /// Number of tensor factors.
    pub fn arity(&self) -> usize {
        self.comps.len()
    }

    /// Iterates over `(tuple, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Word>, &Scalar)> {
        self.terms.iter()
    }

    /// The underlying tuple-to-coefficient map.
    pub fn as_map(&self) -> &BTreeMap<Vec<Word>, Scalar> {
        &self.terms
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True for the zero tensor.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a tuple.
    pub fn coeff(&self, ws: &[Word]) -> Scalar {
        self.terms.get(ws).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Adds `c * tuple`; the tuple must already be in normal form.
    pub fn add_term(&mut self, ws: Vec<Word>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(ws.len(), self.comps.len());
        match self.terms.entry(ws) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Tensor, c: &Scalar) {
        for (ws, d) in &other.terms {
            self.add_term(ws.clone(), c * d);
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Scalar) -> Tensor {
        let mut out = Tensor::zero(self.comps.clone());
        out.add_scaled(self, c);
        out
    }

    /// `self - other`.
    pub fn sub(&self, other: &Tensor) -> Tensor {
        let mut out = self.clone();
        out.add_scaled(other, &-Scalar::one());
        out
    }

    /// `self + other`.
    pub fn add(&self, other: &Tensor) -> Tensor {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one());
        out
    }

    fn check_same(&self, other: &Tensor) -> Result<(), FreeAlgError> {
        if !same_comps(&self.comps, &other.comps) {
            return Err(FreeAlgError::ArityMismatch(format!(
                "{} vs {}",
                self.space_name(),
                other.space_name()
            )));
        }
        Ok(())
    }

    /// Names of the component spaces, e.g. `A (x) H`.
    pub fn space_name(&self) -> String {
        self.comps
            .iter()
            .map(|p| p.name().to_string())
            .collect::<Vec<_>>()
            .join(" (x) ")
    }

    /// Form degree of the word in leg `i`.
    fn leg_degree(&self, i: usize, w: &[Letter]) -> usize {
        self.comps[i].alphabet().degree(w)
    }

    /// Componentwise product with the Koszul sign
    /// `(x1 (x) x2)(y1 (x) y2) = (-1)^{|x2||y1|} x1 y1 (x) x2 y2`.
    #[allow(clippy::needless_range_loop)]
    pub fn mul(&self, other: &Tensor) -> Result<Tensor, FreeAlgError> {
        self.check_same(other)?;
        let n = self.arity();
        let mut out = Tensor::zero(self.comps.clone());
        for (xs, cx) in &self.terms {
            let xdeg: Vec<usize> = (0..n).map(|i| self.leg_degree(i, &xs[i])).collect();
            for (ys, cy) in &other.terms {
                let mut sign = 0usize;
                for j in 0..n {
                    let yd = self.leg_degree(j, &ys[j]);
                    if yd == 0 {
                        continue;
                    }
                    for xd in xdeg.iter().skip(j + 1) {
                        sign += xd * yd;
                    }
                }
                let mut c = cx * cy;
                if sign % 2 == 1 {
                    c = -c;
                }
                let polys: Vec<Poly> = (0..n).map(|i| Poly::word(concat(&xs[i], &ys[i]))).collect();
                out.add_scaled(&Tensor::from_polys(self.comps.clone(), &polys), &c);
            }
        }
        Ok(out)
    }

    /// Swaps legs `i` and `i+1`, with the Koszul sign `(-1)^{|a||b|}`.
    pub fn flip(&self, i: usize) -> Result<Tensor, FreeAlgError> {
        if i + 1 >= self.arity() {
            return Err(FreeAlgError::ArityMismatch(format!(
                "flip at {i} on arity {}",
                self.arity()
            )));
        }
        let mut comps = self.comps.clone();
        comps.swap(i, i + 1);
        let mut out = Tensor::zero(comps);
        for (ws, c) in &self.terms {
            let da = self.leg_degree(i, &ws[i]);
            let db = self.leg_degree(i + 1, &ws[i + 1]);
            let mut ws2 = ws.clone();
            ws2.swap(i, i + 1);
            let c = if (da * db) % 2 == 1 {
                -c.clone()
            } else {
                c.clone()
            };
            out.add_term(ws2, c);
        }
        Ok(out)
    }

    /// Replaces leg `i` by the legs of `f(word)`.
    ///
    /// When `odd` is set, the map has odd degree and each term picks up the
    /// sign `(-1)^{(sum of degrees of legs before i)}`.
    pub fn map_leg<F>(
        &self,
        i: usize,
        out_comps: &[Arc<Presentation>],
        odd: bool,
        mut f: F,
    ) -> Tensor
    where
        F: FnMut(&Word) -> Tensor,
    {
        let mut comps: Vec<Arc<Presentation>> = self.comps[..i].to_vec();
        comps.extend_from_slice(out_comps);
        comps.extend_from_slice(&self.comps[i + 1..]);
        let mut out = Tensor::zero(comps);
        for (ws, c) in &self.terms {
            let img = f(&ws[i]);
            let mut c = c.clone();
            if odd {
                let before: usize = (0..i).map(|k| self.leg_degree(k, &ws[k])).sum();
                if before % 2 == 1 {
                    c = -c;
                }
            }
            for (vs, d) in img.terms() {
                let mut t: Vec<Word> = ws[..i].to_vec();
                t.extend(vs.iter().cloned());
                t.extend(ws[i + 1..].iter().cloned());
                out.add_term(t, &c * d);
            }
        }
        out
    }

    /// Replaces leg `i` by a polynomial image in the single component `out`.
    pub fn map_leg_poly<F>(&self, i: usize, out: &Arc<Presentation>, odd: bool, mut f: F) -> Tensor
    where
        F: FnMut(&Word) -> Poly,
    {
        let comps = vec![out.clone()];
        self.map_leg(i, &comps, odd, |w| {
            Tensor::from_polys(vec![out.clone()], &[f(w)])
        })
    }

    /// Contracts leg `i` by a scalar-valued map.
    pub fn contract_leg<F>(&self, i: usize, mut f: F) -> Tensor
    where
        F: FnMut(&Word) -> Scalar,
    {
        let mut comps = self.comps.clone();
        comps.remove(i);
        let mut out = Tensor::zero(comps);
        for (ws, c) in &self.terms {
            let s = f(&ws[i]);
            if s.is_zero() {
                continue;
            }
            let mut t = ws.clone();
            t.remove(i);
            out.add_term(t, c * &s);
        }
        out
    }

    /// Multiplies legs `i` and `i+1`, which must share a component algebra.
    pub fn multiply_legs(&self, i: usize) -> Result<Tensor, FreeAlgError> {
        if i + 1 >= self.arity() {
            return Err(FreeAlgError::ArityMismatch(format!(
                "multiply legs {i},{} on arity {}",
                i + 1,
                self.arity()
            )));
        }
        let pres = self.comps[i].clone();
        let other = &self.comps[i + 1];
        if !(Arc::ptr_eq(&pres, other) || other.alphabet().is_prefix_of(pres.alphabet())) {
            return Err(FreeAlgError::ArityMismatch(format!(
                "cannot multiply {} by {}",
                pres.name(),
                other.name()
            )));
        }
        let mut comps = self.comps.clone();
        comps.remove(i + 1);
        let mut out = Tensor::zero(comps);
        for (ws, c) in &self.terms {
            let prod = pres.nf(&Poly::word(concat(&ws[i], &ws[i + 1])));
            for (w, d) in prod.terms() {
                let mut t = ws.clone();
                t[i] = w.clone();
                t.remove(i + 1);
                out.add_term(t, c * d);
            }
        }
        Ok(out)
    }

    /// Keeps the terms whose leg degrees match `degrees` (`None` = any).
    pub fn degree_part(&self, degrees: &[Option<usize>]) -> Tensor {
        let mut out = Tensor::zero(self.comps.clone());
        for (ws, c) in &self.terms {
            let ok = degrees.iter().enumerate().all(|(i, d)| match d {
                None => true,
                Some(d) => self.leg_degree(i, &ws[i]) == *d,
            });
            if ok {
                out.add_term(ws.clone(), c.clone());
            }
        }
        out
    }

    /// Reinterprets leg words in new component presentations whose alphabets
    /// extend the current ones (e.g. H inside Omega(H)).
    pub fn recast(&self, comps: Vec<Arc<Presentation>>) -> Tensor {
        let polys_terms: Vec<(Vec<Word>, Scalar)> = self
            .terms
            .iter()
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        let mut out = Tensor::zero(comps.clone());
        for (ws, c) in polys_terms {
            let polys: Vec<Poly> = ws.into_iter().map(Poly::word).collect();
            out.add_scaled(&Tensor::from_polys(comps.clone(), &polys), &c);
        }
        out
    }

    /// Renders as `(u*v | t^-1) + (2)*(1 | t)`.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(ws, c)| {
                let inner = ws
                    .iter()
                    .enumerate()
                    .map(|(i, w)| self.comps[i].alphabet().render_word(w))
                    .collect::<Vec<_>>()
                    .join(" | ");
                if c.is_one() {
                    format!("({inner})")
                } else {
                    format!("({c})*({inner})")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Componentwise product of two tensors with the Koszul sign.
pub fn tensor_mul(s: &Tensor, t: &Tensor) -> Result<Tensor, FreeAlgError> {
    s.mul(t)
}

/// Swaps legs `i`, `i+1`.
pub fn flip(t: &Tensor, i: usize) -> Result<Tensor, FreeAlgError> {
    t.flip(i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::PresentationBuilder;
    use proptest::prelude::*;

    fn free_xy() -> Alphabet {
        let mut a = Alphabet::new();
        a.add(&Generator::algebra("x")).unwrap();
        a.add(&Generator::algebra("y")).unwrap();
        a
    }

    #[test]
    fn concatenation_and_distributivity() {
        let a = free_xy();
        let (x, y) = (Poly::letter(0), Poly::letter(1));
        assert_eq!(poly_mul(&a, &x, &y).unwrap(), Poly::word(word(&[0, 1])));
        let lhs = poly_mul(&a, &(&x + &y), &x).unwrap();
        assert_eq!(lhs, Poly::word(word(&[0, 0])) + Poly::word(word(&[1, 0])));
        assert_eq!(poly_mul(&a, &Poly::one(), &x).unwrap(), x);
        assert!(matches!(
            poly_mul(&a, &Poly::letter(7), &x),
            Err(FreeAlgError::AlphabetMismatch(_))
        ));
    }

    #[test]
    fn inverse_letters_and_rendering() {
        let mut a = Alphabet::new();
        let u = a.add(&Generator::algebra("u").inv().weight(1)).unwrap();
        let v = a.add(&Generator::algebra("v").inv().weight(-1)).unwrap();
        let du = a.add(&Generator::form("du")).unwrap();
        assert_eq!(a.inverse(u), Some(u + 1));
        assert_eq!(a.info(u + 1).weight, -1);
        assert_eq!(a.render_word(&[u, v + 1, du]), "u*v^-1*du");
        assert_eq!(a.render_word(&[]), "1");
        assert_eq!(a.degree(&[u, du, du]), 2);
        assert!(a.add(&Generator::algebra("u")).is_err());
    }

    #[test]
    fn poly_rendering() {
        let a = free_xy();
        let p = Poly::term(word(&[0, 1]), Scalar::q(2)) + Poly::scalar(Scalar::int(-1));
        assert_eq!(p.render(&a), "(-1) + (q^2)*x*y");
        assert_eq!(Poly::zero().render(&a), "0");
    }

    fn graded_pair() -> (Arc<Presentation>, Arc<Presentation>) {
        let mut b = PresentationBuilder::new("A");
        b.generator(Generator::algebra("u").inv().weight(1))
            .unwrap();
        b.generator(Generator::algebra("v").inv().weight(-1))
            .unwrap();
        b.generator(Generator::form("du")).unwrap();
        let a = Arc::new(b.build().unwrap());
        let mut h = PresentationBuilder::new("H");
        h.generator(Generator::algebra("t").inv()).unwrap();
        h.generator(Generator::form("dt")).unwrap();
        (a, Arc::new(h.build().unwrap()))
    }

    #[test]
    fn tensor_product_componentwise() {
        let (a, h) = graded_pair();
        let comps = vec![a.clone(), h.clone()];
        // (u (x) t)(v (x) t^-1) = uv (x) t t^-1 = uv (x) 1 after cancellation.
        let x = Tensor::pure(comps.clone(), vec![word(&[0]), word(&[0])], Scalar::one());
        let y = Tensor::pure(comps.clone(), vec![word(&[2]), word(&[1])], Scalar::one());
        let p = x.mul(&y).unwrap();
        assert_eq!(
            p,
            Tensor::pure(comps.clone(), vec![word(&[0, 2]), word(&[])], Scalar::one())
        );
        let one = Tensor::one(comps.clone());
        assert_eq!(x.mul(&one).unwrap(), x);
    }

    #[test]
    fn koszul_signs() {
        let (a, h) = graded_pair();
        let comps = vec![a.clone(), h.clone()];
        let du = a.alphabet().letter("du").unwrap();
        let dt = h.alphabet().letter("dt").unwrap();
        // (du (x) t)(v (x) t^-1): |t| = 0 so no sign.
        let x = Tensor::pure(comps.clone(), vec![word(&[du]), word(&[0])], Scalar::one());
        let y = Tensor::pure(comps.clone(), vec![word(&[2]), word(&[1])], Scalar::one());
        let p = x.mul(&y).unwrap();
        assert_eq!(p.coeff(&[word(&[du, 2]), word(&[])]), Scalar::one());
        // (1 (x) dt)(du (x) 1) = - du (x) dt.
        let s = Tensor::pure(comps.clone(), vec![word(&[]), word(&[dt])], Scalar::one());
        let r = Tensor::pure(comps.clone(), vec![word(&[du]), word(&[])], Scalar::one());
        let p = s.mul(&r).unwrap();
        assert_eq!(p.coeff(&[word(&[du]), word(&[dt])]), -Scalar::one());
        // flip of two odd legs picks up a sign.
        let two = Tensor::pure(comps.clone(), vec![word(&[du]), word(&[dt])], Scalar::one());
        let f = two.flip(0).unwrap();
        assert_eq!(f.coeff(&[word(&[dt]), word(&[du])]), -Scalar::one());
        assert_eq!(f.flip(0).unwrap(), two);
    }

    #[test]
    fn arity_mismatch() {
        let (a, h) = graded_pair();
        let x = Tensor::one(vec![a.clone(), h.clone()]);
        let y = Tensor::one(vec![a.clone(), a.clone()]);
        assert!(matches!(x.mul(&y), Err(FreeAlgError::ArityMismatch(_))));
        assert!(matches!(
            Tensor::one(vec![a]).flip(0),
            Err(FreeAlgError::ArityMismatch(_))
        ));
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec((prop::collection::vec(0u16..3, 0..4), -3i64..4), 0..5).prop_map(
            |v| {
                let mut p = Poly::zero();
                for (w, c) in v {
                    p.add_term(Word::from_vec(w), Scalar::int(c));
                }
                p
            },
        )
    }

    proptest! {
        #[test]
        fn poly_mul_associative_unital(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(a.concat_mul(&b).concat_mul(&c), a.concat_mul(&b.concat_mul(&c)));
            prop_assert_eq!(Poly::one().concat_mul(&a), a.clone());
            prop_assert_eq!(a.concat_mul(&Poly::one()), a);
        }

        #[test]
        fn tensor_mul_associative(ws in prop::collection::vec((prop::collection::vec(0u16..5, 0..3), prop::collection::vec(0u16..3, 0..3)), 3)) {
            let (a, h) = graded_pair();
            let comps = vec![a, h];
            let ts: Vec<Tensor> = ws.into_iter().map(|(x, y)| Tensor::pure(comps.clone(), vec![Word::from_vec(x), Word::from_vec(y)], Scalar::one())).collect();
            let l = ts[0].mul(&ts[1]).unwrap().mul(&ts[2]).unwrap();
            let r = ts[0].mul(&ts[1].mul(&ts[2]).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn flip_is_involution(x in prop::collection::vec(0u16..5, 0..3), y in prop::collection::vec(0u16..5, 0..3)) {
            let (a, _) = graded_pair();
            let comps = vec![a.clone(), a];
            let t = Tensor::pure(comps, vec![Word::from_vec(x), Word::from_vec(y)], Scalar::one());
            prop_assert_eq!(t.flip(0).unwrap().flip(0).unwrap(), t);
        }
    }
}
