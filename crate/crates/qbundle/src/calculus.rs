//! Differential calculi over presented algebras: a graded algebra of forms
//! generated in degree zero, the differential extended by the graded Leibniz
//! rule, the universal calculus and its quotient map, calculi on Hopf
//! algebras built from right ideals of the augmentation ideal, the
//! Maurer-Cartan form, and the comparison with the maximal prolongation.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use parking_lot::RwLock;
use thiserror::Error;

use crate::coeff::Scalar;
use crate::comodule::{bounded_pairs, collect_failures};
use crate::freealg::{concat, Letter, LetterKind, Poly, Tensor, Word};
use crate::hopf::HopfAlgebra;
use crate::linalg::{self, LinalgError};
use crate::report::Report;
use crate::rewrite::{Presentation, RewriteError};

/// Errors raised by calculus operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    /// A result would exceed the top degree of the calculus.
    #[error("degree {degree} exceeds the top degree {max}")]
    DegreeOverflow {
        /// Requested degree.
        degree: usize,
        /// Top degree of the calculus.
        max: usize,
    },
    /// The element is not in the kernel of multiplication.
    #[error("{0} is not in the kernel of multiplication")]
    NotInKernel(String),
    /// The element has nonzero counit.
    #[error("{0} is not in the augmentation ideal")]
    NotInAugmentationIdeal(String),
    /// An ideal generator has nonzero counit.
    #[error("ideal generator {0} has nonzero counit")]
    IdealNotInKernel(String),
    /// A generator has no differential.
    #[error("no differential given for {0}")]
    MissingDifferential(String),
    /// The form algebra does not extend the base algebra.
    #[error("{0} does not extend {1}")]
    NotAnExtension(String, String),
    /// An element leaves the bounded basis used for linear algebra.
    #[error("{0} leaves the bounded basis")]
    OutOfBound(String),
    /// Rewriting failed.
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

/// A differential graded algebra of forms over a presented algebra, up to
/// a top degree. A first-order calculus has top degree 1.
pub struct Calculus {
    base: Arc<Presentation>,
    omega: Arc<Presentation>,
    d_images: HashMap<Letter, Poly>,
    exact: HashMap<Letter, Letter>,
    witnesses: HashMap<Letter, Vec<(Poly, Poly)>>,
    max_degree: usize,
    memo: RwLock<HashMap<Word, Arc<Poly>>>,
}

impl std::fmt::Debug for Calculus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Calculus")
            .field("omega", &self.omega.name())
            .field("max_degree", &self.max_degree)
            .finish()
    }
}

impl Calculus {
    /// Builds a calculus.
    ///
    /// `omega` must extend `base` by form letters. `d_algebra` gives `d` on
    /// algebra generators (inverse letters are derived from
    /// `d(x^-1) = -x^-1 d(x) x^-1`), `d_forms` gives `d` on form letters
    /// that are not themselves differentials of generators, and
    /// `witnesses` writes such form letters as `sum a d(b)`.
    pub fn new(
        base: Arc<Presentation>,
        omega: Arc<Presentation>,
        d_algebra: Vec<(Letter, Poly)>,
        d_forms: Vec<(Letter, Poly)>,
        witnesses: Vec<(Letter, Vec<(Poly, Poly)>)>,
        max_degree: usize,
    ) -> Result<Self, CalculusError> {
        if !base.alphabet().is_prefix_of(omega.alphabet()) {
            return Err(CalculusError::NotAnExtension(
                omega.name().to_string(),
                base.name().to_string(),
            ));
        }
        let oa = omega.alphabet();
        let mut d_images: HashMap<Letter, Poly> = HashMap::new();
        for (x, p) in d_algebra {
            if !p.is_homogeneous(oa, 1) {
                return Err(CalculusError::MissingDifferential(format!(
                    "{} (image is not a 1-form)",
                    oa.letter_name(x)
                )));
            }
            d_images.insert(x, omega.nf(&p));
        }
        for x in base.alphabet().letters() {
            if d_images.contains_key(&x) {
                continue;
            }
            let derived = oa.inverse(x).and_then(|xi| d_images.get(&xi)).map(|dx| {
                let xp = Poly::letter(x);
                -omega.mul_all(&[&xp, dx, &xp])
            });
            match derived {
                Some(p) => {
                    d_images.insert(x, p);
                }
                None => return Err(CalculusError::MissingDifferential(oa.letter_name(x))),
            }
        }
        let mut exact = HashMap::new();
        for x in base.alphabet().letters() {
            let img = &d_images[&x];
            if img.len() == 1 {
                let (w, c) = img.terms().next().expect("one term");
                if w.len() == 1 && c.is_one() && oa.is_form(w[0]) {
                    exact.entry(w[0]).or_insert(x);
                }
            }
        }
        let given: HashMap<Letter, Poly> = d_forms.into_iter().collect();
        for x in oa.letters() {
            if oa.info(x).kind != LetterKind::Form {
                continue;
            }
            if let Some(p) = given.get(&x) {
                if !p.is_homogeneous(oa, 2) {
                    return Err(CalculusError::MissingDifferential(format!(
                        "{} (image is not a 2-form)",
                        oa.letter_name(x)
                    )));
                }
                d_images.insert(x, omega.nf(p));
            } else if exact.contains_key(&x) || max_degree < 2 {
                d_images.insert(x, Poly::zero());
            } else {
                return Err(CalculusError::MissingDifferential(oa.letter_name(x)));
            }
        }
        Ok(Calculus {
            base,
            omega,
            d_images,
            exact,
            witnesses: witnesses.into_iter().collect(),
            max_degree,
            memo: RwLock::new(HashMap::new()),
        })
    }

    /// The degree-zero algebra.
    pub fn base(&self) -> &Arc<Presentation> {
        &self.base
    }

    /// The algebra of forms.
    pub fn omega(&self) -> &Arc<Presentation> {
        &self.omega
    }

    /// Top degree.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `d` of a single letter.
    pub fn d_image(&self, x: Letter) -> &Poly {
        &self.d_images[&x]
    }

    /// The generator whose differential is the form letter `theta`, if any.
    pub fn exact_letter(&self, theta: Letter) -> Option<Letter> {
        self.exact.get(&theta).copied()
    }

    /// Form letters of the calculus.
    pub fn form_letters(&self) -> Vec<Letter> {
        let a = self.omega.alphabet();
        a.letters().filter(|&x| a.is_form(x)).collect()
    }

    fn overflow(&self, degree: usize) -> CalculusError {
        CalculusError::DegreeOverflow {
            degree,
            max: self.max_degree,
        }
    }

    /// `d` of a word, by the graded Leibniz rule.
    pub fn d_word(&self, w: &[Letter]) -> Result<Arc<Poly>, CalculusError> {
        let a = self.omega.alphabet();
        let deg = a.degree(w);
        if deg + 1 > self.max_degree {
            return Err(self.overflow(deg + 1));
        }
        if w.is_empty() {
            return Ok(Arc::new(Poly::zero()));
        }
        if let Some(p) = self.memo.read().get(w) {
            return Ok(p.clone());
        }
        let n = w.len();
        let result = if n == 1 {
            self.d_images[&w[0]].clone()
        } else {
            let prefix = &w[..n - 1];
            let last = Poly::letter(w[n - 1]);
            let mut out = self.omega.mul(&*self.d_word(prefix)?, &last);
            let second = self.omega.mul(
                &Poly::word(Word::from_slice(prefix)),
                &self.d_images[&w[n - 1]],
            );
            if a.degree(prefix) % 2 == 1 {
                out = out - second;
            } else {
                out = out + second;
            }
            out
        };
        let result = Arc::new(result);
        self.memo
            .write()
            .insert(Word::from_slice(w), result.clone());
        Ok(result)
    }

    /// `d` of a form (applied word by word).
    pub fn d(&self, p: &Poly) -> Result<Poly, CalculusError> {
        let mut out = Poly::zero();
        for (w, c) in p.terms() {
            out.add_scaled(&*self.d_word(w)?, c);
        }
        Ok(out)
    }

    /// `d` on degree-zero elements.
    pub fn differential(&self, a: &Poly) -> Result<Poly, CalculusError> {
        self.d(a)
    }

    /// `d` on forms of any degree below the top.
    pub fn d_graded(&self, x: &Poly) -> Result<Poly, CalculusError> {
        self.d(x)
    }

    /// The wedge product. Terms above the top degree vanish.
    pub fn wedge(&self, x: &Poly, y: &Poly) -> Result<Poly, CalculusError> {
        let a = self.omega.alphabet();
        let mut out = Poly::zero();
        for (w, c) in self.omega.mul(x, y).terms() {
            if a.degree(w) <= self.max_degree {
                out.add_term(w.clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// The declared witness `sum a d(b)` for a form letter, or `d(x)` for
    /// a letter that is the differential of a generator.
    pub fn surjectivity_witness(&self, theta: Letter) -> Option<Vec<(Poly, Poly)>> {
        if let Some(x) = self.exact_letter(theta) {
            return Some(vec![(Poly::one(), Poly::letter(x))]);
        }
        self.witnesses.get(&theta).cloned()
    }

    /// Writes a form letter as `sum d(e) f` using `a d(b) = d(ab) - d(a) b`.
    pub fn right_witness(&self, theta: Letter) -> Option<Vec<(Poly, Poly)>> {
        let left = self.surjectivity_witness(theta)?;
        let mut out = Vec::new();
        for (a, b) in left {
            out.push((self.base.mul(&a, &b), Poly::one()));
            out.push((a, -b));
        }
        Some(out)
    }

    /// Evaluates `sum a d(b)`.
    pub fn eval_left(&self, pairs: &[(Poly, Poly)]) -> Result<Poly, CalculusError> {
        let mut out = Poly::zero();
        for (a, b) in pairs {
            out = out + self.omega.mul(a, &self.d(b)?);
        }
        Ok(out)
    }

    /// Evaluates `sum d(e) f`.
    pub fn eval_right(&self, pairs: &[(Poly, Poly)]) -> Result<Poly, CalculusError> {
        let mut out = Poly::zero();
        for (e, f) in pairs {
            out = out + self.omega.mul(&self.d(e)?, f);
        }
        Ok(out)
    }

    /// The universal differential `1 (x) a - a (x) 1`.
    pub fn universal_d(&self, a: &Poly) -> Tensor {
        universal_d(&self.base, a)
    }

    /// `sum x_i (x) y_i -> sum x_i d(y_i)` on the kernel of multiplication.
    pub fn universal_quotient(&self, x: &Tensor) -> Result<Poly, CalculusError> {
        let prod = x.multiply_legs(0).expect("both legs in the base algebra");
        if !prod.is_zero() {
            return Err(CalculusError::NotInKernel(x.render()));
        }
        let mut out = Poly::zero();
        for (ws, c) in x.terms() {
            let p = self
                .omega
                .mul(&Poly::word(ws[0].clone()), &*self.d_word(&ws[1])?);
            out.add_scaled(&p, c);
        }
        Ok(out)
    }

    /// `S(h1) d(h2)` for `h` in the augmentation ideal; the calculus must
    /// live on the Hopf algebra's presentation.
    pub fn maurer_cartan(&self, hopf: &HopfAlgebra, h: &Poly) -> Result<Poly, CalculusError> {
        if !hopf.counit(h).is_zero() {
            return Err(CalculusError::NotInAugmentationIdeal(hopf.pres().render(h)));
        }
        let mut out = Poly::zero();
        for (ws, c) in hopf.coproduct(&hopf.pres().nf(h)).terms() {
            let s = hopf.antipode_word(&ws[0]);
            out.add_scaled(&self.omega.mul(&s, &*self.d_word(&ws[1])?), c);
        }
        Ok(out)
    }

    /// Both sides of the Maurer-Cartan equation for `h` in the augmentation
    /// ideal. The left side is `sum d(S(h1)) d(h2)`, which only uses `d` on
    /// degree-zero elements, so it is meaningful in the free prolongation
    /// as well as in a quotient of the maximal prolongation. The right side
    /// is `-sum ϖ(π(h1)) ϖ(π(h2))`.
    pub fn maurer_cartan_equation(
        &self,
        hopf: &HopfAlgebra,
        h: &Poly,
    ) -> Result<(Poly, Poly), CalculusError> {
        if !hopf.counit(h).is_zero() {
            return Err(CalculusError::NotInAugmentationIdeal(hopf.pres().render(h)));
        }
        if self.max_degree < 2 {
            return Err(self.overflow(2));
        }
        let delta = hopf.coproduct(&hopf.pres().nf(h));
        let mut lhs = Poly::zero();
        let mut rhs = Poly::zero();
        for (ws, c) in delta.terms() {
            let ds = self.d(&hopf.antipode_word(&ws[0]))?;
            lhs.add_scaled(&self.omega.mul(&ds, &*self.d_word(&ws[1])?), c);
            let x = self.maurer_cartan(
                hopf,
                &hopf.augmentation_projection(&Poly::word(ws[0].clone())),
            )?;
            let y = self.maurer_cartan(
                hopf,
                &hopf.augmentation_projection(&Poly::word(ws[1].clone())),
            )?;
            rhs.add_scaled(&self.omega.mul(&x, &y), &-c.clone());
        }
        Ok((lhs, rhs))
    }

    /// Well-definedness, graded Leibniz, surjectivity, confluence and
    /// `d^2 = 0` on forms with at most `max_len` algebra letters.
    pub fn check(&self, max_len: usize) -> Report {
        let name = self.omega.name().to_string();
        let mut rep = Report::new(&format!("calculus {name}"));
        let o = self.omega.clone();
        let oa = o.alphabet();
        let s = |e: CalculusError| e.to_string();

        match o.check_local_confluence(6) {
            Ok(r) => {
                let f: Vec<String> = r
                    .failures
                    .iter()
                    .map(|a| {
                        format!(
                            "{}: {} vs {}",
                            oa.render_word(&a.word),
                            o.render(&a.left),
                            o.render(&a.right)
                        )
                    })
                    .collect();
                rep.push_failures(
                    format!("calculus.confluent[{name}]"),
                    "all rule overlaps resolve",
                    r.checked,
                    &f,
                );
            }
            Err(e) => rep.push(
                format!("calculus.confluent[{name}]"),
                "all rule overlaps resolve",
                false,
                e.to_string(),
            ),
        }

        let rules: Vec<_> = o
            .rules()
            .iter()
            .filter(|r| oa.degree(&r.lhs) < self.max_degree)
            .cloned()
            .collect();
        let f = collect_failures(&rules, |r| {
            let l = self.d_word(&r.lhs).map_err(s)?;
            let rr = self.d(&r.rhs).map_err(s)?;
            Ok((*l != rr).then(|| {
                format!(
                    "relation {}: {} vs {}",
                    o.render_rule(r),
                    o.render(&l),
                    o.render(&rr)
                )
            }))
        });
        rep.push_failures(
            format!("calculus.d-respects-relations[{name}]"),
            "d of both sides of each relation agree",
            rules.len(),
            &f,
        );

        let mut words = Vec::new();
        for k in 0..self.max_degree {
            words.extend(o.graded_basis(max_len, k));
        }
        let pairs: Vec<(Word, Word)> = bounded_pairs(&words, usize::MAX)
            .into_iter()
            .filter(|(x, y)| {
                oa.algebra_len(x) + oa.algebra_len(y) <= max_len
                    && oa.degree(x) + oa.degree(y) < self.max_degree
                    && !x.is_empty()
                    && !y.is_empty()
            })
            .collect();
        let f = collect_failures(&pairs, |(x, y)| {
            let lhs = self.d(&o.nf_word(&concat(x, y))).map_err(s)?;
            let dx = o.mul(&*self.d_word(x).map_err(s)?, &Poly::word(y.clone()));
            let xdy = o.mul(&Poly::word(x.clone()), &*self.d_word(y).map_err(s)?);
            let rhs = if oa.degree(x) % 2 == 1 {
                dx - xdy
            } else {
                dx + xdy
            };
            Ok((lhs != rhs).then(|| {
                format!(
                    "d({}*{}): {} vs {}",
                    oa.render_word(x),
                    oa.render_word(y),
                    o.render(&lhs),
                    o.render(&rhs)
                )
            }))
        });
        rep.push_failures(
            format!("calculus.leibniz[{name}]"),
            "graded Leibniz rule on word pairs",
            pairs.len(),
            &f,
        );

        let forms = self.form_letters();
        let f = collect_failures(&forms, |&x| {
            let Some(w) = self.surjectivity_witness(x) else {
                return Ok(Some(format!("{}: no witness", oa.letter_name(x))));
            };
            let got = self.eval_left(&w).map_err(s)?;
            let right = self
                .eval_right(&self.right_witness(x).expect("witness"))
                .map_err(s)?;
            let want = Poly::letter(x);
            Ok((got != want || right != want)
                .then(|| format!("{}: {}", oa.letter_name(x), o.render(&got))))
        });
        rep.push_failures(
            format!("calculus.surjective[{name}]"),
            "every form letter is a sum of a d(b) and of d(e) f",
            forms.len(),
            &f,
        );

        if self.max_degree >= 2 {
            let mut dd_words = Vec::new();
            for k in 0..=self.max_degree - 2 {
                dd_words.extend(o.graded_basis(max_len, k));
            }
            let f = collect_failures(&dd_words, |w| {
                let dd = self.d(&*self.d_word(w).map_err(s)?).map_err(s)?;
                Ok((!dd.is_zero()).then(|| format!("{}: {}", oa.render_word(w), o.render(&dd))))
            });
            rep.push_failures(
                format!("calculus.d-squared[{name}]"),
                "d d = 0",
                dd_words.len(),
                &f,
            );
        }
        rep
    }

    /// A copy of this calculus in which only the relations of degree at most
    /// one are kept, with top degree at least two. Its degree-two part is
    /// the tensor square of the first-order bimodule over the base.
    pub fn free_prolongation(&self) -> Result<Calculus, CalculusError> {
        let oa = self.omega.alphabet();
        let free = Arc::new(
            self.omega
                .restrict(&format!("{}~", self.omega.name()), |r| {
                    oa.degree(&r.lhs) <= 1
                })?,
        );
        let d_alg: Vec<(Letter, Poly)> = self
            .base
            .alphabet()
            .letters()
            .map(|x| (x, self.d_images[&x].clone()))
            .collect();
        let d_forms: Vec<(Letter, Poly)> = self
            .form_letters()
            .into_iter()
            .filter(|x| !self.exact.contains_key(x))
            .map(|x| (x, self.d_images[&x].clone()))
            .collect();
        let witnesses = self.witnesses.clone().into_iter().collect();
        Calculus::new(
            self.base.clone(),
            free,
            d_alg,
            d_forms,
            witnesses,
            self.max_degree.max(2),
        )
    }

    /// First-order relations `sum a d(b) = 0` with `a`, `b` basis words of
    /// total length `<= max_len`, as lists of `(a, b, coefficient)`.
    pub fn first_order_relations(
        &self,
        max_len: usize,
    ) -> Result<Vec<Vec<(Word, Word, Scalar)>>, CalculusError> {
        let words = self.base.basis_words(max_len);
        let pairs: Vec<(Word, Word)> = bounded_pairs(&words, max_len)
            .into_iter()
            .filter(|(_, b)| !b.is_empty())
            .collect();
        let mut images = Vec::with_capacity(pairs.len());
        for (a, b) in &pairs {
            let img = self.omega.mul(&Poly::word(a.clone()), &*self.d_word(b)?);
            images.push(img.as_map().clone());
        }
        Ok(linalg::kernel(&images)
            .into_iter()
            .map(|k| {
                k.into_iter()
                    .map(|(i, c)| (pairs[i].0.clone(), pairs[i].1.clone(), c))
                    .collect()
            })
            .collect())
    }

    /// Compares this calculus with the maximal prolongation of its first
    /// order part at the word bound.
    ///
    /// Every first-order relation `sum a d(b) = 0` yields the degree-two
    /// element `sum d(a) d(b)`. When the top degree is at least two, each
    /// such element must vanish here. When it is one, the check instead
    /// confirms that these elements span the whole degree-two part of the
    /// free prolongation on words with at most `max_len - 2` algebra letters.
    pub fn maximal_prolongation_check(
        &self,
        max_len: usize,
    ) -> Result<Prolongation, CalculusError> {
        let name = self.omega.name().to_string();
        let free = self.free_prolongation()?;
        let relations = self.first_order_relations(max_len)?;
        let mut generators = Vec::new();
        for rel in &relations {
            let mut g = Poly::zero();
            for (a, b, c) in rel {
                let da = free.d_word(a)?;
                let db = free.d_word(b)?;
                g.add_scaled(&free.omega.mul(&da, &db), c);
            }
            generators.push(g);
        }
        let mut report = Report::new(&format!("maximal prolongation of {name}"));
        let nonzero: Vec<&Poly> = generators.iter().filter(|g| !g.is_zero()).collect();
        report.push(
            format!("prolongation.relations[{name}]"),
            "first-order relations found by exact kernel computation",
            !relations.is_empty(),
            format!(
                "{} relations, {} nonzero degree-two images",
                relations.len(),
                nonzero.len()
            ),
        );
        let fo = free.omega.clone();
        if self.max_degree >= 2 {
            let f: Vec<String> = generators
                .iter()
                .filter_map(|g| {
                    let r = self.omega.nf(g);
                    (!r.is_zero())
                        .then(|| format!("{} survives as {}", fo.render(g), self.omega.render(&r)))
                })
                .collect();
            report.push_failures(
                format!("prolongation.quotient[{name}]"),
                "each generator of the prolongation ideal vanishes",
                generators.len(),
                &f,
            );
            return Ok(Prolongation {
                relations,
                generators,
                report,
                free,
            });
        }
        let fa = fo.alphabet();
        let words = self.base.basis_words(max_len);
        let mut spanning = Vec::new();
        for g in &nonzero {
            for w in &words {
                let wp = Poly::word(w.clone());
                spanning.push(fo.mul(&wp, g).as_map().clone());
                spanning.push(fo.mul(g, &wp).as_map().clone());
            }
        }
        let bounded = linalg::intersect_support(&spanning, |w: &Word| fa.algebra_len(w) <= max_len);
        let target = fo.graded_basis(max_len.saturating_sub(2), 2);
        let f: Vec<String> = target
            .iter()
            .filter(|w| !linalg::in_span(&bounded, Poly::word((*w).clone()).as_map()))
            .map(|w| fa.render_word(w))
            .collect();
        report.push_failures(
            format!("prolongation.top-degree-vanishes[{name}]"),
            "the prolongation ideal contains every two-form",
            target.len(),
            &f,
        );
        Ok(Prolongation {
            relations,
            generators,
            report,
            free,
        })
    }
}

/// Result of comparing a calculus with the maximal prolongation.
pub struct Prolongation {
    /// First-order relations `(a, b, c)` with `sum c a d(b) = 0`.
    pub relations: Vec<Vec<(Word, Word, Scalar)>>,
    /// Their images `sum c d(a) d(b)` in the free prolongation.
    pub generators: Vec<Poly>,
    /// Checks.
    pub report: Report,
    /// The calculus with only first-order relations.
    pub free: Calculus,
}

/// `1 (x) a - a (x) 1` in `A (x) A`.
pub fn universal_d(base: &Arc<Presentation>, a: &Poly) -> Tensor {
    let comps = vec![base.clone(), base.clone()];
    Tensor::from_polys(comps.clone(), &[Poly::one(), a.clone()])
        .sub(&Tensor::from_polys(comps, &[a.clone(), Poly::one()]))
}

/// `sum x_i d(y_i)` for `sum x_i (x) y_i` in the kernel of multiplication.
pub fn universal_quotient(x: &Tensor, calc: &Calculus) -> Result<Poly, CalculusError> {
    calc.universal_quotient(x)
}

/// `S(h1) d(h2)`.
pub fn maurer_cartan(h: &Poly, calc: &Calculus, hopf: &HopfAlgebra) -> Result<Poly, CalculusError> {
    calc.maurer_cartan(hopf, h)
}

/// Runs the calculus checks.
pub fn check_fodc(calc: &Calculus, max_len: usize) -> Report {
    calc.check(max_len)
}

/// Compares a calculus with its maximal prolongation at the bound.
pub fn maximal_prolongation_check(
    calc: &Calculus,
    max_len: usize,
) -> Result<Prolongation, CalculusError> {
    calc.maximal_prolongation_check(max_len)
}

/// A first-order calculus `H (x) (H+/I)` built from a right ideal `I` of the
/// augmentation ideal, computed on basis words of bounded length.
pub struct WoronowiczCalculus {
    hopf: Arc<HopfAlgebra>,
    max_len: usize,
    reps: Vec<Poly>,
    ideal: Vec<BTreeMap<Word, Scalar>>,
    bicovariant: bool,
    bicovariance_witness: String,
}

/// A form `sum h (x) [x_i]` as coefficients of `h` times the `i`-th basis
/// class of `H+/I`.
pub type QuotientForm = BTreeMap<(Word, usize), Scalar>;

impl WoronowiczCalculus {
    /// Dimension of `H+/I` at the bound.
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Representatives of a basis of `H+/I`.
    pub fn representatives(&self) -> &[Poly] {
        &self.reps
    }

    /// A basis of the ideal at the bound.
    pub fn ideal_basis(&self) -> Vec<Poly> {
        self.ideal
            .iter()
            .map(|m| Poly::from_map(m.clone()))
            .collect()
    }

    /// True when the ideal is stable under the adjoint coaction at the bound.
    pub fn is_bicovariant(&self) -> bool {
        self.bicovariant
    }

    /// Description of what the bicovariance test covered or where it failed.
    pub fn bicovariance_witness(&self) -> &str {
        &self.bicovariance_witness
    }

    /// Coordinates of the class of `x` in `H+/I`.
    pub fn class(&self, x: &Poly) -> Result<Vec<Scalar>, CalculusError> {
        let p = self.hopf.pres();
        let x = p.nf(x);
        if !self.hopf.counit(&x).is_zero() {
            return Err(CalculusError::NotInAugmentationIdeal(p.render(&x)));
        }
        if x.is_zero() {
            return Ok(vec![Scalar::zero(); self.dim()]);
        }
        let mut cols: Vec<BTreeMap<Word, Scalar>> =
            self.reps.iter().map(|r| r.as_map().clone()).collect();
        cols.extend(self.ideal.iter().cloned());
        match linalg::solve(&cols, x.as_map()) {
            Ok(c) => Ok(c[..self.dim()].to_vec()),
            Err(LinalgError::NotInSpan) | Err(LinalgError::NonUnitDenominator(_)) => {
                Err(CalculusError::OutOfBound(p.render(&x)))
            }
        }
    }

    fn push_class(
        &self,
        out: &mut QuotientForm,
        h: &Word,
        g: &Poly,
        c: &Scalar,
    ) -> Result<(), CalculusError> {
        for (i, k) in self.class(g)?.into_iter().enumerate() {
            let v = c * &k;
            if v.is_zero() {
                continue;
            }
            let e = out.entry((h.clone(), i)).or_insert_with(Scalar::zero);
            *e += v;
            if e.is_zero() {
                out.remove(&(h.clone(), i));
            }
        }
        Ok(())
    }

    /// `d h = (id (x) pi)(Delta(h) - h (x) 1)`.
    pub fn d(&self, h: &Poly) -> Result<QuotientForm, CalculusError> {
        let p = self.hopf.pres();
        let delta = self.hopf.coproduct(&p.nf(h));
        let diff = delta.sub(&Tensor::from_polys(
            self.hopf.comps2(),
            &[p.nf(h), Poly::one()],
        ));
        let mut grouped: BTreeMap<Word, Poly> = BTreeMap::new();
        for (ws, c) in diff.terms() {
            grouped
                .entry(ws[0].clone())
                .or_default()
                .add_term(ws[1].clone(), c.clone());
        }
        let mut out = QuotientForm::new();
        for (h1, g) in grouped {
            self.push_class(&mut out, &h1, &g, &Scalar::one())?;
        }
        Ok(out)
    }

    /// `(h (x) [g]) h' = h h'_1 (x) [g h'_2]`, with `g` given by a
    /// representative.
    pub fn right_mul(&self, h: &Poly, g: &Poly, hp: &Poly) -> Result<QuotientForm, CalculusError> {
        let p = self.hopf.pres();
        let mut out = QuotientForm::new();
        for (ws, c) in self.hopf.coproduct(&p.nf(hp)).terms() {
            let left = p.mul(h, &Poly::word(ws[0].clone()));
            let right = p.mul(g, &Poly::word(ws[1].clone()));
            for (w, k) in left.terms() {
                self.push_class(&mut out, w, &right, &(c * k))?;
            }
        }
        Ok(out)
    }

    /// Word bound used for the quotient.
    pub fn max_len(&self) -> usize {
        self.max_len
    }
}

/// Builds `H+/I` at the word bound from generators of a right ideal `I`.
pub fn woronowicz_from_ideal(
    hopf: &Arc<HopfAlgebra>,
    ideal_gens: &[Poly],
    max_len: usize,
) -> Result<WoronowiczCalculus, CalculusError> {
    let p = hopf.pres();
    for g in ideal_gens {
        if !hopf.counit(g).is_zero() {
            return Err(CalculusError::IdealNotInKernel(p.render(g)));
        }
    }
    let words = p.basis_words(max_len);
    let mut spanning = Vec::new();
    for g in ideal_gens {
        for w in &words {
            spanning.push(p.mul(g, &Poly::word(w.clone())).as_map().clone());
        }
    }
    let ideal = linalg::intersect_support(&spanning, |w: &Word| w.len() <= max_len);
    let mut all: Vec<BTreeMap<Word, Scalar>> = ideal.clone();
    let mut reps = Vec::new();
    let mut rank = linalg::rank(&all);
    for w in words.iter().filter(|w| !w.is_empty()) {
        let x = hopf.augmentation_projection(&Poly::word(w.clone()));
        all.push(x.as_map().clone());
        let r = linalg::rank(&all);
        if r > rank {
            reps.push(x);
            rank = r;
        } else {
            all.pop();
        }
    }
    let mut bicovariant = true;
    let mut tested = 0usize;
    let mut skipped = 0usize;
    let mut witness = String::new();
    'outer: for x in &ideal {
        let ad = hopf.adjoint_coaction(&Poly::from_map(x.clone()));
        let mut grouped: BTreeMap<Word, Poly> = BTreeMap::new();
        for (ws, c) in ad.terms() {
            grouped
                .entry(ws[1].clone())
                .or_default()
                .add_term(ws[0].clone(), c.clone());
        }
        for (k, q) in grouped {
            if q.max_len() > max_len {
                skipped += 1;
                continue;
            }
            tested += 1;
            if !linalg::in_span(&ideal, q.as_map()) {
                bicovariant = false;
                witness = format!(
                    "{} (x) {} leaves the ideal",
                    p.render(&q),
                    p.alphabet().render_word(&k)
                );
                break 'outer;
            }
        }
    }
    if bicovariant {
        witness = format!("{tested} components in the ideal, {skipped} beyond the bound");
    }
    Ok(WoronowiczCalculus {
        hopf: hopf.clone(),
        max_len,
        reps,
        ideal,
        bicovariant,
        bicovariance_witness: witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cz_calculus, group_hopf, suq2_calculus, torus_calculus};
    use crate::freealg::word;
    use crate::rewrite::mono;
    use proptest::prelude::*;

    #[test]
    fn su2_calculus_is_consistent() {
        let c = suq2_calculus();
        let r = c.check(2);
        assert!(r.all_passed(), "{}", r.to_text());
    }

    #[test]
    fn podles_relations() {
        let c = suq2_calculus();
        let o = c.omega().clone();
        let l = |n: &str| Poly::letter(o.letter(n).unwrap());
        let (al, be, ga, de) = (l("alpha"), l("beta"), l("gamma"), l("delta"));
        let (ep, em) = (l("ep"), l("em"));
        let q = Scalar::q;
        let z = o.mul(&ga, &de);
        let x = o.mul(&be, &ga).scale(&-q(-1));
        let zb = o.mul(&al, &be).scale(&-q(1));
        let (dz, dx, dzb) = (c.d(&z).unwrap(), c.d(&x).unwrap(), c.d(&zb).unwrap());
        let m = |a: &Poly, b: &Poly| o.mul(a, b);
        assert_eq!(m(&de, &ep), m(&al, &dz) + m(&ga, &dx).scale(&q(-1)));
        assert_eq!(
            m(&be, &ep),
            m(&ga, &dzb).scale(&q(-2)) - m(&al, &dx).scale(&q(1))
        );
        assert_ne!(
            m(&be, &ep),
            m(&ga, &dz).scale(&q(-2)) - m(&al, &dx).scale(&q(1))
        );
        assert_eq!(
            m(&al, &em),
            m(&be, &dx).scale(&q(2)) - m(&de, &dzb).scale(&q(-1))
        );
        assert_eq!(m(&ga, &em), -m(&de, &dx) - m(&be, &dz).scale(&q(1)));
    }

    #[test]
    fn torus_differential_examples() {
        let c = torus_calculus(None);
        let o = c.omega().clone();
        let l = |n: &str| o.letter(n).unwrap();
        let (u, v, du, dv) = (l("u"), l("v"), l("du"), l("dv"));
        let duv = c.d(&Poly::word(word(&[u, v]))).unwrap();
        let want = mono(Scalar::l(-1), &[v, du]) + mono(Scalar::one(), &[u, dv]);
        assert_eq!(duv, want);
        assert!(c.d(&Poly::one()).unwrap().is_zero());
        let d_udv = c.d(&Poly::word(word(&[u, dv]))).unwrap();
        assert_eq!(d_udv, Poly::word(word(&[du, dv])));
        let two_form = mono(Scalar::one(), &[du, dv]) + mono(Scalar::l(-1), &[dv, du]);
        assert!(o.nf(&two_form).is_zero());
        assert!(matches!(
            c.d(&Poly::word(word(&[du, dv]))),
            Err(CalculusError::DegreeOverflow { degree: 3, max: 2 })
        ));
    }

    #[test]
    fn torus_calculus_checks_pass() {
        let c = torus_calculus(None);
        let r = c.check(3);
        assert!(r.all_passed(), "{}", r.to_text());
        assert!(r.passed() >= 5);
    }

    #[test]
    fn corrupted_bimodule_rule_breaks_leibniz() {
        let c = torus_calculus(Some(Scalar::q(1)));
        let r = c.check(2);
        let leib = r.get("calculus.leibniz[Omega(A_l(T^2))]").unwrap();
        assert!(!leib.passed());
        assert!(!r
            .get("calculus.d-respects-relations[Omega(A_l(T^2))]")
            .unwrap()
            .passed());
    }

    #[test]
    fn q_calculus_on_the_integers() {
        let (_, c) = cz_calculus();
        let o = c.omega().clone();
        let (g, dg) = (o.letter("g").unwrap(), o.letter("dg").unwrap());
        let d2 = c.d(&Poly::word(word(&[g, g]))).unwrap();
        assert_eq!(d2, mono(Scalar::q_int(2), &[g, dg]));
        let d3 = c.d(&Poly::word(word(&[g, g, g]))).unwrap();
        assert_eq!(d3, mono(Scalar::q_int(3), &[g, g, dg]));
        let r = c.check(4);
        assert!(r.all_passed(), "{}", r.to_text());
    }

    #[test]
    fn universal_calculus_quotient() {
        let c = torus_calculus(None);
        let a = c.base().clone();
        let (u, v) = (a.letter("u").unwrap(), a.letter("v").unwrap());
        let ui = a.letter("u^-1").unwrap();
        assert!(c.universal_d(&Poly::one()).is_zero());
        for w in [word(&[u]), word(&[v]), word(&[u, v])] {
            let p = Poly::word(w);
            let x = c.universal_d(&p);
            assert!(x.multiply_legs(0).unwrap().is_zero());
            assert_eq!(c.universal_quotient(&x).unwrap(), c.d(&p).unwrap());
        }
        let comps = vec![a.clone(), a.clone()];
        let x = Tensor::pure(comps.clone(), vec![word(&[u]), word(&[ui])], Scalar::one())
            .sub(&Tensor::one(comps.clone()));
        let want = c
            .omega()
            .mul(&Poly::letter(u), &c.d(&Poly::letter(ui)).unwrap());
        assert_eq!(c.universal_quotient(&x).unwrap(), want);
        let bad = Tensor::pure(comps, vec![word(&[u]), word(&[])], Scalar::one());
        assert!(matches!(
            c.universal_quotient(&bad),
            Err(CalculusError::NotInKernel(_))
        ));
    }

    #[test]
    fn maurer_cartan_form() {
        let (h, c) = cz_calculus();
        let o = c.omega().clone();
        let (g, dg) = (o.letter("g").unwrap(), o.letter("dg").unwrap());
        let gi = o.letter("g^-1").unwrap();
        let x = h.augmentation_projection(&Poly::letter(g));
        assert_eq!(
            c.maurer_cartan(&h, &x).unwrap(),
            Poly::word(word(&[gi, dg]))
        );
        assert!(c
            .maurer_cartan(&h, &h.augmentation_projection(&Poly::one()))
            .unwrap()
            .is_zero());
        assert!(matches!(
            c.maurer_cartan(&h, &Poly::letter(g)),
            Err(CalculusError::NotInAugmentationIdeal(_))
        ));
    }

    #[test]
    fn maurer_cartan_equation_in_the_free_prolongation() {
        let (h, c) = cz_calculus();
        let free = c.free_prolongation().unwrap();
        let p = h.pres().clone();
        for w in p.basis_words(4) {
            let a = h.augmentation_projection(&Poly::word(w.clone()));
            let (lhs, rhs) = free.maurer_cartan_equation(&h, &a).unwrap();
            assert_eq!(lhs, rhs, "{}", p.alphabet().render_word(&w));
            if !w.is_empty() {
                assert!(!lhs.is_zero());
            }
        }
        assert!(matches!(
            c.maurer_cartan_equation(&h, &Poly::zero()),
            Err(CalculusError::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn prolongation_of_the_q_calculus_has_no_two_forms() {
        let (_, c) = cz_calculus();
        let pr = c.maximal_prolongation_check(4).unwrap();
        assert!(pr.report.all_passed(), "{}", pr.report.to_text());
        let a = c.base().clone();
        let (g, gi) = (a.letter("g").unwrap(), a.letter("g^-1").unwrap());
        // d(g^-1) + q^-1 g^-2 dg = 0 is among the relations found.
        let target: BTreeMap<(Word, Word), Scalar> = [
            ((word(&[]), word(&[gi])), Scalar::one()),
            ((word(&[gi, gi]), word(&[g])), Scalar::q(-1)),
        ]
        .into_iter()
        .collect();
        let rels: Vec<BTreeMap<(Word, Word), Scalar>> = pr
            .relations
            .iter()
            .map(|r| {
                r.iter()
                    .map(|(a, b, c)| ((a.clone(), b.clone()), c.clone()))
                    .collect()
            })
            .collect();
        assert!(linalg::in_span(&rels, &target));
    }

    #[test]
    fn torus_is_a_quotient_of_its_prolongation() {
        let c = torus_calculus(None);
        let pr = c.maximal_prolongation_check(3).unwrap();
        assert!(pr.report.all_passed(), "{}", pr.report.to_text());
    }

    #[test]
    fn woronowicz_quotient_of_the_integers() {
        let (h, c) = cz_calculus();
        let p = h.pres().clone();
        let g = p.letter("g").unwrap();
        let words: Vec<Word> = p
            .basis_words(4)
            .into_iter()
            .filter(|w| !w.is_empty())
            .collect();
        let images: Vec<BTreeMap<Word, Scalar>> = words
            .iter()
            .map(|w| {
                let x = h.augmentation_projection(&Poly::word(w.clone()));
                c.maurer_cartan(&h, &x).unwrap().as_map().clone()
            })
            .collect();
        let gens: Vec<Poly> = linalg::kernel(&images)
            .into_iter()
            .map(|k| {
                let mut x = Poly::zero();
                for (i, s) in k {
                    x.add_scaled(
                        &h.augmentation_projection(&Poly::word(words[i].clone())),
                        &s,
                    );
                }
                x
            })
            .collect();
        let wc = woronowicz_from_ideal(&h, &gens, 4).unwrap();
        assert_eq!(wc.dim(), 1);
        assert!(wc.is_bicovariant(), "{}", wc.bicovariance_witness());
        let dg = wc.d(&Poly::letter(g)).unwrap();
        let class = wc
            .class(&h.augmentation_projection(&Poly::letter(g)))
            .unwrap();
        assert_eq!(dg.len(), 1);
        assert_eq!(dg[&(word(&[g]), 0)], class[0]);
        assert!(wc.d(&Poly::one()).unwrap().is_empty());

        let all: Vec<Poly> = words
            .iter()
            .map(|w| h.augmentation_projection(&Poly::word(w.clone())))
            .collect();
        let zero = woronowicz_from_ideal(&h, &all, 4).unwrap();
        assert_eq!(zero.dim(), 0);
        assert!(zero.d(&Poly::letter(g)).unwrap().is_empty());
        assert!(matches!(
            woronowicz_from_ideal(&h, &[Poly::letter(g)], 2),
            Err(CalculusError::IdealNotInKernel(_))
        ));
    }

    #[test]
    fn woronowicz_bimodule_rule() {
        let h = group_hopf("C[Z]", "g");
        let p = h.pres().clone();
        let g = p.letter("g").unwrap();
        let wc = woronowicz_from_ideal(&h, &[], 2).unwrap();
        let x = h.augmentation_projection(&Poly::letter(g));
        let prod = wc.right_mul(&Poly::one(), &x, &Poly::letter(g)).unwrap();
        let gx = p.mul(&x, &Poly::letter(g));
        let mut want = QuotientForm::new();
        wc.push_class(&mut want, &word(&[g]), &gx, &Scalar::one())
            .unwrap();
        assert_eq!(prod, want);
    }

    proptest! {
        #[test]
        fn graded_leibniz_on_random_torus_forms(
            x in proptest::collection::vec(0u16..6, 0..4),
            y in proptest::collection::vec(0u16..6, 0..4),
        ) {
            let c = torus_calculus(None);
            let oa = c.omega().alphabet();
            prop_assume!(oa.degree(&x) + oa.degree(&y) < 2);
            let o = c.omega();
            let lhs = c.d(&o.nf_word(&concat(&x, &y))).unwrap();
            let dx = o.mul(&c.d_word(&x).unwrap(), &Poly::word(Word::from_slice(&y)));
            let xdy = o.mul(&Poly::word(Word::from_slice(&x)), &c.d_word(&y).unwrap());
            let rhs = if oa.degree(&x) % 2 == 1 { dx - xdy } else { dx + xdy };
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn d_squared_vanishes_on_random_words(x in proptest::collection::vec(0u16..6, 0..5)) {
            let c = torus_calculus(None);
            let oa = c.omega().alphabet();
            prop_assume!(oa.degree(&x) == 0);
            let dd = c.d(&c.d_word(&x).unwrap()).unwrap();
            prop_assert!(dd.is_zero());
        }
    }
}
