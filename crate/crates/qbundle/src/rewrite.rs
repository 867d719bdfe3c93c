//! Finitely presented algebras given by oriented rewrite rules.
//!
//! A [`Presentation`] owns an alphabet and a list of rules `lhs -> rhs`. Every
//! rule must decrease in the weighted degree-lexicographic order of the
//! alphabet, which makes reduction terminate. Normal forms are computed by
//! appending one letter at a time to an already irreducible word, so only
//! redexes ending at the last position can occur; the results are memoized.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use parking_lot::RwLock;
use thiserror::Error;

use crate::coeff::Scalar;
use crate::freealg::{concat, word, Alphabet, FreeAlgError, Generator, Letter, Poly, Word};

/// Errors raised while building or using a presentation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    /// Reduction exceeded its step budget.
    #[error("reduction did not terminate within {0} steps")]
    NonTerminating(usize),
    /// A rule does not decrease in the term order.
    #[error("rule {0} is not decreasing in the term order")]
    NotDecreasing(String),
    /// A rule mixes form degrees.
    #[error("rule {0} is not homogeneous in form degree")]
    Inhomogeneous(String),
    /// Two rules share a left-hand side.
    #[error("duplicate left-hand side {0}")]
    DuplicateLhs(String),
    /// The rules are not locally confluent.
    #[error("presentation {0} is not confluent: {1}")]
    NotConfluent(String, String),
    /// Alphabet problem.
    #[error(transparent)]
    Alphabet(#[from] FreeAlgError),
}

/// An oriented relation `lhs -> rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    /// Word to replace.
    pub lhs: Word,
    /// Replacement.
    pub rhs: Poly,
    /// True for rules added automatically (cancellations, inverse commutations).
    pub derived: bool,
}

/// Incremental construction of a [`Presentation`].
#[derive(Clone, Debug)]
pub struct PresentationBuilder {
    name: String,
    alphabet: Alphabet,
    rules: Vec<Rule>,
    check_order: bool,
}

impl PresentationBuilder {
    /// Starts an empty presentation.
    pub fn new(name: &str) -> Self {
        PresentationBuilder {
            name: name.to_string(),
            alphabet: Alphabet::new(),
            rules: Vec::new(),
            check_order: true,
        }
    }

    /// Starts from an existing presentation (same letters and declared rules).
    pub fn extend(base: &Presentation, name: &str) -> Self {
        PresentationBuilder {
            name: name.to_string(),
            alphabet: base.alphabet().clone(),
            rules: base
                .rules()
                .iter()
                .filter(|r| !r.derived)
                .cloned()
                .collect(),
            check_order: true,
        }
    }

    /// Adds a generator and returns its letter.
    pub fn generator(&mut self, g: Generator) -> Result<Letter, RewriteError> {
        Ok(self.alphabet.add(&g)?)
    }

    /// The alphabet built so far.
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Adds the rule `lhs -> rhs`.
    pub fn rule(&mut self, lhs: &[Letter], rhs: Poly) -> &mut Self {
        self.rules.push(Rule {
            lhs: word(lhs),
            rhs,
            derived: false,
        });
        self
    }

    /// Skips the termination check (for diagnostics of ill-oriented input).
    pub fn unchecked(&mut self) -> &mut Self {
        self.check_order = false;
        self
    }

    fn render_rule(&self, r: &Rule) -> String {
        format!(
            "{} -> {}",
            self.alphabet.render_word(&r.lhs),
            r.rhs.render(&self.alphabet)
        )
    }

    /// Adds cancellation rules and the inverse-letter versions of
    /// q-commutation rules, then validates orientation and homogeneity.
    pub fn build(mut self) -> Result<Presentation, RewriteError> {
        let mut lhs_set: BTreeSet<Word> = BTreeSet::new();
        for r in &self.rules {
            if !lhs_set.insert(r.lhs.clone()) {
                return Err(RewriteError::DuplicateLhs(
                    self.alphabet.render_word(&r.lhs),
                ));
            }
        }
        let mut extra = Vec::new();
        for x in self.alphabet.letters() {
            let info = self.alphabet.info(x);
            if let (Some(xi), false) = (info.partner, info.is_inverse) {
                extra.push(Rule {
                    lhs: word(&[x, xi]),
                    rhs: Poly::one(),
                    derived: true,
                });
                extra.push(Rule {
                    lhs: word(&[xi, x]),
                    rhs: Poly::one(),
                    derived: true,
                });
            }
        }
        for r in &self.rules {
            extra.extend(inverse_commutations(&self.alphabet, r));
        }
        for r in extra {
            if lhs_set.insert(r.lhs.clone()) {
                self.rules.push(r);
            }
        }
        for r in &self.rules {
            self.alphabet.check_poly(&Poly::word(r.lhs.clone()))?;
            self.alphabet.check_poly(&r.rhs)?;
            let deg = self.alphabet.degree(&r.lhs);
            if !r.rhs.is_homogeneous(&self.alphabet, deg) {
                return Err(RewriteError::Inhomogeneous(self.render_rule(r)));
            }
            if self.check_order {
                for (w, _) in r.rhs.terms() {
                    if self.alphabet.cmp_words(&r.lhs, w) != std::cmp::Ordering::Greater {
                        return Err(RewriteError::NotDecreasing(self.render_rule(r)));
                    }
                }
            }
        }
        Ok(Presentation::from_parts(
            self.name,
            self.alphabet,
            self.rules,
        ))
    }
}

/// For a rule `y x -> c x y` with `c` a unit, the consequences for the
/// inverse letters of `x` and `y`.
fn inverse_commutations(a: &Alphabet, r: &Rule) -> Vec<Rule> {
    let mut out = Vec::new();
    if r.lhs.len() != 2 || r.rhs.len() != 1 {
        return out;
    }
    let (y, x) = (r.lhs[0], r.lhs[1]);
    let (w, c) = r.rhs.terms().next().expect("one term");
    if w.as_slice() != [x, y] || !c.is_monomial() || x == y {
        return out;
    }
    let cinv = c.inverse().expect("monomial");
    let base = |l: Letter| {
        let i = a.info(l);
        if i.is_inverse {
            None
        } else {
            i.partner
        }
    };
    let xi = base(x);
    let yi = base(y);
    if let Some(xi) = xi {
        out.push(Rule {
            lhs: word(&[y, xi]),
            rhs: Poly::term(word(&[xi, y]), cinv.clone()),
            derived: true,
        });
    }
    if let Some(yi) = yi {
        out.push(Rule {
            lhs: word(&[yi, x]),
            rhs: Poly::term(word(&[x, yi]), cinv.clone()),
            derived: true,
        });
    }
    if let (Some(xi), Some(yi)) = (xi, yi) {
        out.push(Rule {
            lhs: word(&[yi, xi]),
            rhs: Poly::term(word(&[xi, yi]), c.clone()),
            derived: true,
        });
    }
    out
}

/// Step budget for one reduction.
const STEP_BUDGET: usize = 2_000_000;
/// Nesting budget for one reduction.
const DEPTH_BUDGET: usize = 512;

struct ReduceState {
    steps: usize,
    depth: usize,
}

/// A validated finitely presented algebra.
pub struct Presentation {
    name: String,
    alphabet: Alphabet,
    rules: Vec<Rule>,
    lhs_index: HashMap<Word, usize>,
    lhs_lens: Vec<usize>,
    cache: RwLock<HashMap<Word, Arc<Poly>>>,
}

impl std::fmt::Debug for Presentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Presentation")
            .field("name", &self.name)
            .field("letters", &self.alphabet.len())
            .field("rules", &self.rules.len())
            .finish()
    }
}

/// One unresolved overlap ambiguity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ambiguity {
    /// The overlap word.
    pub word: Word,
    /// Normal form after applying the first rule.
    pub left: Poly,
    /// Normal form after applying the second rule.
    pub right: Poly,
}

/// Result of a local-confluence check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OverlapReport {
    /// Number of overlap words examined.
    pub checked: usize,
    /// Overlaps whose two reductions disagree.
    pub failures: Vec<Ambiguity>,
}

impl OverlapReport {
    /// True when every examined overlap resolved.
    pub fn is_confluent(&self) -> bool {
        self.failures.is_empty()
    }
}

impl Presentation {
    fn from_parts(name: String, alphabet: Alphabet, rules: Vec<Rule>) -> Self {
        let mut lhs_index = HashMap::new();
        let mut lens = BTreeSet::new();
        for (i, r) in rules.iter().enumerate() {
            lhs_index.insert(r.lhs.clone(), i);
            lens.insert(r.lhs.len());
        }
        Presentation {
            name,
            alphabet,
            rules,
            lhs_index,
            lhs_lens: lens.into_iter().rev().collect(),
            cache: RwLock::new(HashMap::new()),
        }
    }

    /// The same letters with only the declared rules accepted by `keep`;
    /// derived rules are regenerated.
    pub fn restrict<F: Fn(&Rule) -> bool>(
        &self,
        name: &str,
        keep: F,
    ) -> Result<Presentation, RewriteError> {
        let b = PresentationBuilder {
            name: name.to_string(),
            alphabet: self.alphabet.clone(),
            rules: self
                .rules
                .iter()
                .filter(|r| !r.derived && keep(r))
                .cloned()
                .collect(),
            check_order: true,
        };
        b.build()
    }

    /// The ground field: no letters, no rules.
    pub fn ground() -> Self {
        Self::from_parts("k".to_string(), Alphabet::new(), Vec::new())
    }

    /// The free algebra on the given alphabet.
    pub fn free(name: &str, alphabet: Alphabet) -> Self {
        Self::from_parts(name.to_string(), alphabet, Vec::new())
    }

    /// Name used in reports and tensor rendering.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// The alphabet.
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// All rules, derived ones included.
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Renders a rule as `lhs -> rhs`.
    pub fn render_rule(&self, r: &Rule) -> String {
        format!(
            "{} -> {}",
            self.alphabet.render_word(&r.lhs),
            r.rhs.render(&self.alphabet)
        )
    }

    /// Renders a polynomial in this alphabet.
    pub fn render(&self, p: &Poly) -> String {
        p.render(&self.alphabet)
    }

    fn redex_at_end(&self, w: &[Letter]) -> Option<(usize, usize)> {
        let n = w.len();
        for &len in &self.lhs_lens {
            if len <= n {
                if let Some(&ri) = self.lhs_index.get(&w[n - len..]) {
                    return Some((ri, len));
                }
            }
        }
        None
    }

    /// True when no rule applies anywhere in `w`.
    pub fn is_irreducible(&self, w: &[Letter]) -> bool {
        (1..=w.len()).all(|end| self.redex_at_end(&w[..end]).is_none())
    }

    fn append(
        &self,
        m: &[Letter],
        x: Letter,
        st: &mut ReduceState,
    ) -> Result<Arc<Poly>, RewriteError> {
        let mut w = Word::from_slice(m);
        w.push(x);
        if let Some(p) = self.cache.read().get(&w) {
            return Ok(p.clone());
        }
        let result = match self.redex_at_end(&w) {
            None => Poly::word(w.clone()),
            Some((ri, len)) => {
                st.steps += 1;
                st.depth += 1;
                if st.steps > STEP_BUDGET || st.depth > DEPTH_BUDGET {
                    return Err(RewriteError::NonTerminating(st.steps));
                }
                let prefix = &w[..w.len() - len];
                let mut acc = Poly::zero();
                for (rw, c) in self.rules[ri].rhs.terms() {
                    let part = self.fold_into(prefix, rw, st)?;
                    acc.add_scaled(&part, c);
                }
                st.depth -= 1;
                acc
            }
        };
        let result = Arc::new(result);
        self.cache.write().insert(w, result.clone());
        Ok(result)
    }

    /// Normal form of `prefix * letters` where `prefix` is irreducible.
    fn fold_into(
        &self,
        prefix: &[Letter],
        letters: &[Letter],
        st: &mut ReduceState,
    ) -> Result<Poly, RewriteError> {
        let mut cur = Poly::word(Word::from_slice(prefix));
        for &y in letters {
            let mut next = Poly::zero();
            for (m, c) in cur.terms() {
                let part = self.append(m, y, st)?;
                next.add_scaled(&part, c);
            }
            cur = next;
        }
        Ok(cur)
    }

    /// Normal form of a polynomial.
    pub fn normal_form(&self, p: &Poly) -> Result<Poly, RewriteError> {
        let mut st = ReduceState { steps: 0, depth: 0 };
        let mut out = Poly::zero();
        for (w, c) in p.terms() {
            let part = self.fold_into(&[], w, &mut st)?;
            out.add_scaled(&part, c);
        }
        Ok(out)
    }

    /// Normal form of a polynomial.
    ///
    /// # Panics
    /// Panics when reduction exceeds its budget, which cannot happen for
    /// presentations that passed the termination check in
    /// [`PresentationBuilder::build`].
    pub fn nf(&self, p: &Poly) -> Poly {
        self.normal_form(p)
            .unwrap_or_else(|e| panic!("presentation {}: {e}", self.name))
    }

    /// Normal form of a single word.
    pub fn nf_word(&self, w: &[Letter]) -> Poly {
        self.nf(&Poly::word(Word::from_slice(w)))
    }

    /// Normal form of a product.
    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.nf(&a.concat_mul(b))
    }

    /// Normal form of a product of several factors.
    pub fn mul_all(&self, factors: &[&Poly]) -> Poly {
        let mut acc = Poly::one();
        for f in factors {
            acc = self.mul(&acc, f);
        }
        acc
    }

    /// Checks every overlap and inclusion ambiguity of rule left-hand sides
    /// whose word has length at most `max_len`.
    pub fn check_local_confluence(&self, max_len: usize) -> Result<OverlapReport, RewriteError> {
        let mut report = OverlapReport::default();
        let mut seen = BTreeSet::new();
        for (i1, r1) in self.rules.iter().enumerate() {
            for (i2, r2) in self.rules.iter().enumerate() {
                let (l1, l2) = (&r1.lhs, &r2.lhs);
                // Overlaps: a proper suffix of l1 equals a proper prefix of l2.
                for k in 1..l1.len().min(l2.len()) {
                    if l1[l1.len() - k..] != l2[..k] {
                        continue;
                    }
                    let w = concat(l1, &l2[k..]);
                    if w.len() > max_len || !seen.insert((i1, i2, k, 0usize)) {
                        continue;
                    }
                    let left = r1.rhs.concat_mul(&Poly::word(Word::from_slice(&l2[k..])));
                    let right =
                        Poly::word(Word::from_slice(&l1[..l1.len() - k])).concat_mul(&r2.rhs);
                    self.record(&mut report, w, &left, &right)?;
                }
                // Inclusions: l2 occurs inside l1 (other than l1 itself).
                if i1 != i2 && l2.len() <= l1.len() && l1.len() <= max_len {
                    for p in 0..=(l1.len() - l2.len()) {
                        if l1[p..p + l2.len()] != l2[..] {
                            continue;
                        }
                        let left = r1.rhs.clone();
                        let right = Poly::word(Word::from_slice(&l1[..p]))
                            .concat_mul(&r2.rhs)
                            .concat_mul(&Poly::word(Word::from_slice(&l1[p + l2.len()..])));
                        self.record(&mut report, l1.clone(), &left, &right)?;
                    }
                }
            }
        }
        Ok(report)
    }

    fn record(
        &self,
        report: &mut OverlapReport,
        w: Word,
        left: &Poly,
        right: &Poly,
    ) -> Result<(), RewriteError> {
        report.checked += 1;
        let a = self.normal_form(left)?;
        let b = self.normal_form(right)?;
        if a != b {
            report.failures.push(Ambiguity {
                word: w,
                left: a,
                right: b,
            });
        }
        Ok(())
    }

    /// Fails with [`RewriteError::NotConfluent`] unless every ambiguity up
    /// to `max_len` resolves.
    pub fn require_confluent(&self, max_len: usize) -> Result<(), RewriteError> {
        let rep = self.check_local_confluence(max_len)?;
        if let Some(f) = rep.failures.first() {
            return Err(RewriteError::NotConfluent(
                self.name.clone(),
                format!(
                    "{}: {} vs {}",
                    self.alphabet.render_word(&f.word),
                    self.render(&f.left),
                    self.render(&f.right)
                ),
            ));
        }
        Ok(())
    }

    /// Irreducible words of length at most `max_len`, in term order.
    pub fn basis_words(&self, max_len: usize) -> Vec<Word> {
        self.enumerate(|_| true, |w| w.len() <= max_len)
    }

    /// Irreducible words with at most `max_alg` algebra letters and exactly
    /// `degree` form letters, in term order.
    pub fn graded_basis(&self, max_alg: usize, degree: usize) -> Vec<Word> {
        let a = &self.alphabet;
        let mut out = self.enumerate(
            |_| true,
            |w| a.algebra_len(w) <= max_alg && a.degree(w) <= degree,
        );
        out.retain(|w| a.degree(w) == degree);
        out
    }

    /// Irreducible words of algebra letters only, length at most `max_len`.
    pub fn algebra_basis(&self, max_len: usize) -> Vec<Word> {
        self.graded_basis(max_len, 0)
    }

    /// Enumerates irreducible words letter by letter; `keep` must be closed
    /// under taking prefixes.
    fn enumerate<F, K>(&self, allowed: F, keep: K) -> Vec<Word>
    where
        F: Fn(Letter) -> bool,
        K: Fn(&[Letter]) -> bool,
    {
        let mut out = vec![Word::new()];
        let mut frontier = vec![Word::new()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for w in &frontier {
                for x in self.alphabet.letters() {
                    if !allowed(x) {
                        continue;
                    }
                    let mut w2 = w.clone();
                    w2.push(x);
                    if !keep(&w2) || self.redex_at_end(&w2).is_some() {
                        continue;
                    }
                    next.push(w2);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out.sort_by(|a, b| self.alphabet.cmp_words(a, b));
        out
    }

    /// Letter lookup by name.
    pub fn letter(&self, name: &str) -> Result<Letter, FreeAlgError> {
        self.alphabet.letter(name)
    }

    /// The polynomial consisting of a single generator.
    pub fn gen(&self, name: &str) -> Result<Poly, FreeAlgError> {
        Ok(Poly::letter(self.letter(name)?))
    }

    /// The polynomial consisting of the inverse letter of a generator.
    pub fn gen_inv(&self, name: &str) -> Result<Poly, FreeAlgError> {
        let x = self.letter(name)?;
        let xi = self
            .alphabet
            .inverse(x)
            .ok_or_else(|| FreeAlgError::UnknownGenerator(format!("{name}^-1")))?;
        Ok(Poly::letter(xi))
    }
}

/// Normal form of `p` in `pres`.
pub fn normal_form(p: &Poly, pres: &Presentation) -> Result<Poly, RewriteError> {
    pres.normal_form(p)
}

/// Overlap report of `pres` up to `max_len`.
pub fn check_local_confluence(
    pres: &Presentation,
    max_len: usize,
) -> Result<OverlapReport, RewriteError> {
    pres.check_local_confluence(max_len)
}

/// Irreducible words up to `max_len`.
pub fn basis_words(pres: &Presentation, max_len: usize) -> Vec<Word> {
    pres.basis_words(max_len)
}

/// `c * w` helper for building rule right-hand sides.
pub fn mono(c: Scalar, letters: &[Letter]) -> Poly {
    Poly::term(word(letters), c)
}
