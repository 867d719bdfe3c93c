//! Differential calculi on quantum principal bundles: left-invariant forms
//! on the structure group with their right action, vertical forms with
//! their product and differential, the total coaction on the forms of the
//! total space and its graded components, horizontal and base forms, the
//! projection onto vertical forms and its comparison with the first-order
//! construction by tensoring over the universal calculus, and calculi on
//! smash products.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use parking_lot::RwLock;
use thiserror::Error;

use crate::calculus::{Calculus, CalculusError};
use crate::coeff::Scalar;
use crate::comodule::{bounded_pairs, collect_failures, Coaction, ComoduleError, CrossedData};
use crate::freealg::{FreeAlgError, Generator, Letter, LetterKind, Poly, Tensor, Word};
use crate::hopf::{HopfAlgebra, HopfError, Morphism};
use crate::linalg::{self, LinalgError};
use crate::report::Report;
use crate::rewrite::{Presentation, PresentationBuilder, RewriteError};

/// Errors raised by the bundle layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    /// A form on the structure group is not in the span of the invariant forms.
    #[error("{0} is not a combination of invariant forms")]
    NotInvariant(String),
    /// Inputs live on incompatible algebras.
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    /// A non-exact form letter has no witness `sum a d(b)`.
    #[error("form letter {0} has no surjectivity witness")]
    MissingWitness(String),
    /// The cocycle of a crossed product is not closed for the base calculus.
    #[error("cocycle is not closed: d(sigma({0})) = {1}")]
    TwistedCalculusViolation(String, String),
    /// The crossed product has a nontrivial cocycle, which the calculus
    /// construction does not cover.
    #[error("nontrivial cocycle value sigma({0}) = {1} is not supported")]
    UnsupportedCocycle(String, String),
    /// The action cannot be used to orient the cross relations.
    #[error("unsupported action: {0}")]
    UnsupportedAction(String),
    /// Calculus error.
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    /// Comodule error.
    #[error(transparent)]
    Comodule(#[from] ComoduleError),
    /// Map error.
    #[error(transparent)]
    Hopf(#[from] HopfError),
    /// Rewriting error.
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    /// Alphabet error.
    #[error(transparent)]
    FreeAlg(#[from] FreeAlgError),
}

fn catch<T, E: Into<BundleError>>(err: &mut Option<BundleError>, r: Result<T, E>, default: T) -> T {
    match r {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e.into());
            default
        }
    }
}

/// Applies `d` to leg `i` of a tensor, with the Koszul sign when `odd`.
fn d_leg(t: &Tensor, i: usize, calc: &Calculus, odd: bool) -> Result<Tensor, BundleError> {
    let mut err = None;
    let out = t.map_leg_poly(i, calc.omega(), odd, |w| {
        let r = calc.d_word(w).map(|p| (*p).clone());
        catch(&mut err, r, Poly::zero())
    });
    err.map_or(Ok(out), Err)
}

/// `d (x) id + (-1)^{|x|} id (x) d` on a two-leg tensor of forms.
pub fn d_tensor(t: &Tensor, left: &Calculus, right: &Calculus) -> Result<Tensor, BundleError> {
    Ok(d_leg(t, 0, left, false)?.add(&d_leg(t, 1, right, true)?))
}

/// Extends a map on algebra generators to the form letters of `calc` by
/// `theta = sum a d(b) |-> sum f(a) d_(x) f(b)`, where `f` is the morphism
/// given on algebra letters by `base_images` (into two-leg tensors of forms).
fn form_images(
    calc: &Calculus,
    target: &[Arc<Presentation>],
    left: &Calculus,
    right: &Calculus,
    base: &Morphism,
    declared: &HashMap<Letter, Tensor>,
) -> Result<Vec<(Letter, Tensor)>, BundleError> {
    let oa = calc.omega().alphabet();
    let mut out = Vec::new();
    for x in calc.form_letters() {
        if let Some(t) = declared.get(&x) {
            out.push((x, t.recast(target.to_vec())));
            continue;
        }
        let Some(wit) = calc.surjectivity_witness(x) else {
            return Err(BundleError::MissingWitness(oa.letter_name(x)));
        };
        let mut img = Tensor::zero(target.to_vec());
        for (a, b) in wit {
            let fa = base.apply(&a).recast(target.to_vec());
            let fb = base.apply(&b).recast(target.to_vec());
            let dfb = d_tensor(&fb, left, right)?;
            img = img.add(
                &fa.mul(&dfb)
                    .map_err(|e| BundleError::SignatureMismatch(e.to_string()))?,
            );
        }
        out.push((x, img));
    }
    Ok(out)
}

/// The left coaction `Omega(H) -> H (x) Omega(H)` of a Hopf algebra on its
/// forms, `h d(k) |-> h1 k1 (x) h2 d(k2)`.
pub fn left_coaction_on_forms(
    hopf: &Arc<HopfAlgebra>,
    hcalc: &Calculus,
) -> Result<Morphism, BundleError> {
    let h = hopf.pres().clone();
    let oh = hcalc.omega().clone();
    let target = vec![h.clone(), oh.clone()];
    let alg: Vec<(Letter, Tensor)> = h
        .alphabet()
        .letters()
        .map(|x| (x, hopf.delta().image(x).recast(target.clone())))
        .collect();
    let base = Morphism::new(
        "left coaction",
        h.clone(),
        target.clone(),
        alg.clone(),
        false,
    )?;
    let mut images = alg;
    for x in hcalc.form_letters() {
        let Some(wit) = hcalc.surjectivity_witness(x) else {
            return Err(BundleError::MissingWitness(oh.alphabet().letter_name(x)));
        };
        let mut img = Tensor::zero(target.clone());
        for (a, b) in wit {
            let fa = base.apply(&a);
            let fb = base.apply(&b);
            let dfb = d_leg(&fb, 1, hcalc, false)?.recast(target.clone());
            img = img.add(
                &fa.mul(&dfb)
                    .map_err(|e| BundleError::SignatureMismatch(e.to_string()))?,
            );
        }
        images.push((x, img));
    }
    Ok(Morphism::new(
        "left coaction on forms",
        oh,
        target,
        images,
        false,
    )?)
}

/// Left-invariant forms on the structure group: an explicitly presented
/// graded algebra `Lambda` embedded in `Omega(H)`, with the right action
/// `theta <- a = S(a1) theta a2` tabulated on generators.
pub struct InvariantForms {
    hopf: Arc<HopfAlgebra>,
    hcalc: Arc<Calculus>,
    lambda: Calculus,
    embed: HashMap<Letter, Poly>,
    hooks: HashMap<(Letter, Letter), Poly>,
    declared_hooks: Vec<(Letter, Letter)>,
    declared_d: Vec<Letter>,
    left: Morphism,
    columns: RwLock<HashMap<usize, Arc<(Vec<Word>, Vec<BTreeMap<Word, Scalar>>)>>>,
    hook_memo: RwLock<HashMap<(Word, Word), Arc<Poly>>>,
}

impl std::fmt::Debug for InvariantForms {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InvariantForms")
            .field("lambda", &self.lambda.omega().name())
            .finish()
    }
}

impl InvariantForms {
    /// Builds the invariant forms.
    ///
    /// `lambda` must consist of form letters only; `embed` sends each to a
    /// form on `H`. Missing entries of `hooks` (pairs of a `Lambda` letter
    /// and an `H` letter) and `d_images` are computed through the
    /// embedding; declared ones are verified by [`InvariantForms::check`].
    pub fn new(
        hopf: Arc<HopfAlgebra>,
        hcalc: Arc<Calculus>,
        lambda: Arc<Presentation>,
        embed: Vec<(Letter, Poly)>,
        hooks: Vec<((Letter, Letter), Poly)>,
        d_images: Vec<(Letter, Poly)>,
    ) -> Result<Self, BundleError> {
        let la = lambda.alphabet();
        if la.letters().any(|x| !la.is_form(x)) {
            return Err(BundleError::SignatureMismatch(format!(
                "{} has algebra letters",
                lambda.name()
            )));
        }
        if !Arc::ptr_eq(hcalc.base(), hopf.pres()) && hcalc.base().name() != hopf.pres().name() {
            return Err(BundleError::SignatureMismatch(format!(
                "calculus on {} used for {}",
                hcalc.base().name(),
                hopf.pres().name()
            )));
        }
        let embed: HashMap<Letter, Poly> = embed
            .into_iter()
            .map(|(x, p)| (x, hcalc.omega().nf(&p)))
            .collect();
        for x in la.letters() {
            if !embed.contains_key(&x) {
                return Err(BundleError::SignatureMismatch(format!(
                    "no embedding for {}",
                    la.letter_name(x)
                )));
            }
        }
        let left = left_coaction_on_forms(&hopf, &hcalc)?;
        let ground = Arc::new(Presentation::ground());
        let placeholder = Calculus::new(ground.clone(), lambda.clone(), vec![], vec![], vec![], 1)?;
        let mut inv = InvariantForms {
            hopf,
            hcalc,
            lambda: placeholder,
            embed,
            hooks: HashMap::new(),
            declared_hooks: Vec::new(),
            declared_d: Vec::new(),
            left,
            columns: RwLock::new(HashMap::new()),
            hook_memo: RwLock::new(HashMap::new()),
        };
        let declared_d: HashMap<Letter, Poly> = d_images.into_iter().collect();
        let top = inv.hcalc.max_degree();
        let mut d_forms = Vec::new();
        for x in la.letters() {
            let img = match declared_d.get(&x) {
                Some(p) => {
                    inv.declared_d.push(x);
                    p.clone()
                }
                None if la.letter_degree(x) < top => {
                    let dx = inv.hcalc.d(&inv.embed[&x])?;
                    inv.to_lambda(&dx)?
                }
                None => Poly::zero(),
            };
            d_forms.push((x, img));
        }
        inv.lambda = Calculus::new(ground, lambda.clone(), vec![], d_forms, vec![], top.max(1))?;
        let declared: HashMap<(Letter, Letter), Poly> = hooks.into_iter().collect();
        let hpres = inv.hopf.pres().clone();
        for theta in la.letters() {
            for a in hpres.alphabet().letters() {
                let img = match declared.get(&(theta, a)) {
                    Some(p) => {
                        inv.declared_hooks.push((theta, a));
                        lambda.nf(p)
                    }
                    None => inv.hook_by_embedding(&Poly::letter(theta), &[a])?,
                };
                inv.hooks.insert((theta, a), img);
            }
        }
        Ok(inv)
    }

    /// The structure group.
    pub fn hopf(&self) -> &Arc<HopfAlgebra> {
        &self.hopf
    }

    /// The calculus on the structure group.
    pub fn hcalc(&self) -> &Arc<Calculus> {
        &self.hcalc
    }

    /// `Lambda` as a calculus over the ground field.
    pub fn lambda(&self) -> &Calculus {
        &self.lambda
    }

    /// The presentation of `Lambda`.
    pub fn pres(&self) -> &Arc<Presentation> {
        self.lambda.omega()
    }

    /// The embedding of each `Lambda` letter into `Omega(H)`.
    pub fn embedding(&self) -> Vec<(Letter, Poly)> {
        self.pres()
            .alphabet()
            .letters()
            .map(|x| (x, self.embed[&x].clone()))
            .collect()
    }

    /// Generator actions that were given rather than computed.
    pub fn declared_hooks(&self) -> Vec<((Letter, Letter), Poly)> {
        self.declared_hooks
            .iter()
            .map(|k| (*k, self.hooks[k].clone()))
            .collect()
    }

    /// Differentials of `Lambda` letters that were given rather than computed.
    pub fn declared_differentials(&self) -> Vec<(Letter, Poly)> {
        self.declared_d
            .iter()
            .map(|&x| (x, self.lambda.d_image(x).clone()))
            .collect()
    }

    /// The image of an element of `Lambda` in `Omega(H)`.
    pub fn embed(&self, x: &Poly) -> Poly {
        let oh = self.hcalc.omega();
        let mut out = Poly::zero();
        for (w, c) in x.terms() {
            let factors: Vec<&Poly> = w.iter().map(|l| &self.embed[l]).collect();
            out.add_scaled(&oh.mul_all(&factors), c);
        }
        oh.nf(&out)
    }

    fn columns(&self, k: usize) -> Arc<(Vec<Word>, Vec<BTreeMap<Word, Scalar>>)> {
        if let Some(c) = self.columns.read().get(&k) {
            return c.clone();
        }
        let words = self.pres().graded_basis(0, k);
        let cols = words
            .iter()
            .map(|w| self.embed(&Poly::word(w.clone())).as_map().clone())
            .collect();
        let entry = Arc::new((words, cols));
        self.columns.write().insert(k, entry.clone());
        entry
    }

    /// Writes a form on `H` as an element of `Lambda`.
    pub fn to_lambda(&self, rho: &Poly) -> Result<Poly, BundleError> {
        let oh = self.hcalc.omega();
        let rho = oh.nf(rho);
        let mut out = Poly::zero();
        for k in 0..=rho.max_degree(oh.alphabet()) {
            let part = rho.degree_part(oh.alphabet(), k);
            if part.is_zero() {
                continue;
            }
            let cols = self.columns(k);
            let x = linalg::solve(&cols.1, part.as_map()).map_err(|e| match e {
                LinalgError::NotInSpan | LinalgError::NonUnitDenominator(_) => {
                    BundleError::NotInvariant(oh.render(&part))
                }
            })?;
            for (w, c) in cols.0.iter().zip(x) {
                out.add_term(w.clone(), c);
            }
        }
        Ok(out)
    }

    /// The Maurer-Cartan form `S(h1) d(h2)` as an element of `Lambda`.
    pub fn varpi(&self, h: &Poly) -> Result<Poly, BundleError> {
        let m = self.hcalc.maurer_cartan(&self.hopf, h)?;
        self.to_lambda(&m)
    }

    fn hook_by_embedding(&self, theta: &Poly, a: &[Letter]) -> Result<Poly, BundleError> {
        let oh = self.hcalc.omega();
        let e = self.embed(theta);
        let mut out = Poly::zero();
        for (ws, c) in self.hopf.coproduct_word(a).terms() {
            let s = self.hopf.antipode_word(&ws[0]);
            out.add_scaled(&oh.mul_all(&[&s, &e, &Poly::word(ws[1].clone())]), c);
        }
        self.to_lambda(&out)
    }

    fn hook_word(&self, theta: &[Letter], a: &[Letter]) -> Result<Arc<Poly>, BundleError> {
        if a.is_empty() {
            return Ok(Arc::new(Poly::word(Word::from_slice(theta))));
        }
        if theta.is_empty() {
            return Ok(Arc::new(Poly::scalar(self.hopf.counit_word(a))));
        }
        let key = (Word::from_slice(theta), Word::from_slice(a));
        if let Some(p) = self.hook_memo.read().get(&key) {
            return Ok(p.clone());
        }
        let lp = self.pres();
        let n = a.len();
        let result = if n > 1 {
            let first = self.hook_word(theta, &a[..n - 1])?;
            let mut out = Poly::zero();
            for (w, c) in first.terms() {
                out.add_scaled(&*self.hook_word(w, &a[n - 1..])?, c);
            }
            out
        } else if theta.len() == 1 {
            self.hooks[&(theta[0], a[0])].clone()
        } else {
            let mut out = Poly::zero();
            for (ws, c) in self.hopf.coproduct_word(a).terms() {
                let x = self.hook_word(&theta[..1], &ws[0])?;
                let y = self.hook_word(&theta[1..], &ws[1])?;
                out.add_scaled(&lp.mul(&x, &y), c);
            }
            out
        };
        let result = Arc::new(lp.nf(&result));
        self.hook_memo.write().insert(key, result.clone());
        Ok(result)
    }

    /// The right action `theta <- a`, extended from generators by
    /// `(theta eta) <- a = (theta <- a1)(eta <- a2)` and `1 <- a = eps(a)`.
    pub fn hook(&self, theta: &Poly, a: &Poly) -> Result<Poly, BundleError> {
        let a = self.hopf.pres().nf(a);
        let mut out = Poly::zero();
        for (w, c) in theta.terms() {
            for (v, d) in a.terms() {
                out.add_scaled(&*self.hook_word(w, v)?, &(c * d));
            }
        }
        Ok(out)
    }

    /// Basis words of `Lambda` in every degree up to the top degree.
    pub fn basis(&self) -> Vec<Word> {
        (0..=self.lambda.max_degree())
            .flat_map(|k| self.pres().graded_basis(0, k))
            .collect()
    }

    /// Coinvariance, the action formula, the action law, the differential
    /// and the Maurer-Cartan equation, on `H` words of length `<= max_len`.
    pub fn check(&self, max_len: usize) -> Report {
        let lp = self.pres().clone();
        let la = lp.alphabet();
        let name = lp.name().to_string();
        let oh = self.hcalc.omega().clone();
        let hp = self.hopf.pres().clone();
        let ha = hp.alphabet();
        let mut rep = Report::new(&format!("invariant forms {name}"));
        let s = |e: BundleError| e.to_string();

        let rules = lp.rules().to_vec();
        let f = collect_failures(&rules, |r| {
            let (l, rr) = (self.embed(&Poly::word(r.lhs.clone())), self.embed(&r.rhs));
            Ok((l != rr).then(|| {
                format!(
                    "{}: {} vs {}",
                    lp.render_rule(r),
                    oh.render(&l),
                    oh.render(&rr)
                )
            }))
        });
        rep.push_failures(
            format!("invariant.relations[{name}]"),
            "the embedding respects the relations",
            rules.len(),
            &f,
        );

        let gens: Vec<Letter> = la.letters().collect();
        let f = collect_failures(&gens, |&x| {
            let e = &self.embed[&x];
            let got = self.left.apply(e);
            let want = Tensor::from_polys(self.left.target().to_vec(), &[Poly::one(), e.clone()]);
            Ok((got != want).then(|| format!("{}: {}", la.letter_name(x), got.render())))
        });
        rep.push_failures(
            format!("invariant.left-coinvariant[{name}]"),
            "each generator is left coinvariant",
            gens.len(),
            &f,
        );

        let words = hp.basis_words(max_len);
        let basis = self.basis();
        let mut pairs = Vec::new();
        for t in &basis {
            for a in &words {
                pairs.push((t.clone(), a.clone()));
            }
        }
        let f = collect_failures(&pairs, |(t, a)| {
            let got = self
                .hook(&Poly::word(t.clone()), &Poly::word(a.clone()))
                .map_err(s)?;
            let want = if t.is_empty() {
                Poly::scalar(self.hopf.counit_word(a))
            } else {
                self.hook_by_embedding(&Poly::word(t.clone()), a)
                    .map_err(s)?
            };
            Ok((got != want).then(|| {
                format!(
                    "{} <- {}: {} vs {}",
                    la.render_word(t),
                    ha.render_word(a),
                    lp.render(&got),
                    lp.render(&want)
                )
            }))
        });
        let declared: Vec<String> = self
            .declared_hooks
            .iter()
            .map(|(t, a)| format!("{} <- {}", la.letter_name(*t), ha.letter_name(*a)))
            .collect();
        rep.push_failures(
            format!("invariant.action-formula[{name}]"),
            "theta <- a equals S(a1) theta a2",
            pairs.len(),
            &f,
        );
        if !declared.is_empty() {
            rep.push(
                format!("invariant.declared-action[{name}]"),
                "declared generator actions are covered by the formula check",
                f.is_empty(),
                declared.join(", "),
            );
        }

        let hpairs: Vec<(Word, Word)> = bounded_pairs(&words, max_len);
        let mut triples = Vec::new();
        for t in &basis {
            for (a, b) in &hpairs {
                triples.push((t.clone(), a.clone(), b.clone()));
            }
        }
        let f = collect_failures(&triples, |(t, a, b)| {
            let ta = self
                .hook(&Poly::word(t.clone()), &Poly::word(a.clone()))
                .map_err(s)?;
            let lhs = self.hook(&ta, &Poly::word(b.clone())).map_err(s)?;
            let ab = hp.mul(&Poly::word(a.clone()), &Poly::word(b.clone()));
            let rhs = self.hook(&Poly::word(t.clone()), &ab).map_err(s)?;
            Ok((lhs != rhs).then(|| {
                format!(
                    "({} <- {}) <- {}: {} vs {}",
                    la.render_word(t),
                    ha.render_word(a),
                    ha.render_word(b),
                    lp.render(&lhs),
                    lp.render(&rhs)
                )
            }))
        });
        rep.push_failures(
            format!("invariant.right-action[{name}]"),
            "(theta <- a) <- b = theta <- ab",
            triples.len(),
            &f,
        );

        let f = collect_failures(&gens, |&x| {
            if la.letter_degree(x) >= self.hcalc.max_degree() {
                return Ok(None);
            }
            let got = self.embed(self.lambda.d_image(x));
            let want = self.hcalc.d(&self.embed[&x]).map_err(|e| e.to_string())?;
            Ok((got != want).then(|| {
                format!(
                    "d {}: {} vs {}",
                    la.letter_name(x),
                    oh.render(&got),
                    oh.render(&want)
                )
            }))
        });
        rep.push_failures(
            format!("invariant.differential[{name}]"),
            "the embedding commutes with d",
            gens.len(),
            &f,
        );

        if self.hcalc.max_degree() >= 2 {
            let f = collect_failures(&words, |a| {
                let h = self.hopf.augmentation_projection(&Poly::word(a.clone()));
                let lhs = self
                    .lambda
                    .d(&self.varpi(&h).map_err(s)?)
                    .map_err(|e| e.to_string())?;
                let mut rhs = Poly::zero();
                for (ws, c) in self.hopf.coproduct_word(a).terms() {
                    let x = self
                        .varpi(
                            &self
                                .hopf
                                .augmentation_projection(&Poly::word(ws[0].clone())),
                        )
                        .map_err(s)?;
                    let y = self
                        .varpi(
                            &self
                                .hopf
                                .augmentation_projection(&Poly::word(ws[1].clone())),
                        )
                        .map_err(s)?;
                    rhs.add_scaled(&lp.mul(&x, &y), &-c.clone());
                }
                Ok((lhs != rhs).then(|| {
                    format!(
                        "{}: {} vs {}",
                        ha.render_word(a),
                        lp.render(&lhs),
                        lp.render(&rhs)
                    )
                }))
            });
            rep.push_failures(
                format!("invariant.maurer-cartan[{name}]"),
                "d varpi(a) = -varpi(a1) varpi(a2)",
                words.len(),
                &f,
            );
        }
        rep
    }
}

/// Vertical forms `A (x) Lambda` with `(a (x) theta)(b (x) eta) =
/// a b0 (x) (theta <- b1) eta` and `d(a (x) theta) = a (x) d theta +
/// a0 (x) varpi(a1 - eps(a1)) theta`.
pub struct VerticalForms {
    inv: Arc<InvariantForms>,
    coaction: Arc<Coaction>,
}

/// A vertical form: a tensor over `[A, Lambda]`.
pub type VerticalForm = Tensor;

impl VerticalForms {
    /// Vertical forms for a right coaction of the structure group.
    pub fn new(inv: Arc<InvariantForms>, coaction: Arc<Coaction>) -> Result<Self, BundleError> {
        if coaction.coalgebra_space().name() != inv.hopf().pres().name() {
            return Err(BundleError::SignatureMismatch(format!(
                "coaction of {} with invariant forms on {}",
                coaction.coalgebra_space().name(),
                inv.hopf().pres().name()
            )));
        }
        Ok(VerticalForms { inv, coaction })
    }

    /// The invariant forms.
    pub fn invariant_forms(&self) -> &Arc<InvariantForms> {
        &self.inv
    }

    /// Components `[A, Lambda]`.
    pub fn comps(&self) -> Vec<Arc<Presentation>> {
        vec![self.coaction.source().clone(), self.inv.pres().clone()]
    }

    /// `a (x) theta`.
    pub fn element(&self, a: &Poly, theta: &Poly) -> VerticalForm {
        Tensor::from_polys(self.comps(), &[a.clone(), theta.clone()])
    }

    /// The unit `1 (x) 1`.
    pub fn unit(&self) -> VerticalForm {
        Tensor::one(self.comps())
    }

    /// The product of vertical forms.
    pub fn wedge(&self, x: &VerticalForm, y: &VerticalForm) -> Result<VerticalForm, BundleError> {
        let a = self.coaction.source();
        let lp = self.inv.pres();
        let mut out = Tensor::zero(self.comps());
        for (xs, c) in x.terms() {
            for (ys, d) in y.terms() {
                for (bs, e) in self.coaction.apply_word(&ys[0]).terms() {
                    let left = a.mul(&Poly::word(xs[0].clone()), &Poly::word(bs[0].clone()));
                    let hooked = self
                        .inv
                        .hook(&Poly::word(xs[1].clone()), &Poly::word(bs[1].clone()))?;
                    let right = lp.mul(&hooked, &Poly::word(ys[1].clone()));
                    out.add_scaled(&self.element(&left, &right), &(c * &(d * e)));
                }
            }
        }
        Ok(out)
    }

    /// The vertical differential.
    pub fn d(&self, x: &VerticalForm) -> Result<VerticalForm, BundleError> {
        let lp = self.inv.pres();
        let hopf = self.inv.hopf();
        let mut out = Tensor::zero(self.comps());
        for (xs, c) in x.terms() {
            let a = Poly::word(xs[0].clone());
            let theta = Poly::word(xs[1].clone());
            out.add_scaled(&self.element(&a, &self.inv.lambda().d(&theta)?), c);
            for (ws, e) in self.coaction.apply_word(&xs[0]).terms() {
                let v = self
                    .inv
                    .varpi(&hopf.augmentation_projection(&Poly::word(ws[1].clone())))?;
                let right = lp.mul(&v, &theta);
                out.add_scaled(&self.element(&Poly::word(ws[0].clone()), &right), &(c * e));
            }
        }
        Ok(out)
    }

    /// Basis elements `a (x) theta` with `a` of length `<= max_len`.
    pub fn basis(&self, max_len: usize) -> Vec<VerticalForm> {
        let mut out = Vec::new();
        for a in self.coaction.source().basis_words(max_len) {
            for t in self.inv.basis() {
                out.push(Tensor::pure(
                    self.comps(),
                    vec![a.clone(), t],
                    Scalar::one(),
                ));
            }
        }
        out
    }

    fn degree(&self, x: &VerticalForm) -> usize {
        let la = self.inv.pres().alphabet();
        x.terms()
            .map(|(ws, _)| la.degree(&ws[1]))
            .max()
            .unwrap_or(0)
    }

    /// Unit, associativity, graded Leibniz and `d^2 = 0` on basis elements
    /// with `A` words of length `<= max_len`.
    pub fn check(&self, max_len: usize) -> Report {
        let name = format!(
            "{} (x) {}",
            self.coaction.source().name(),
            self.inv.pres().name()
        );
        let mut rep = Report::new(&format!("vertical forms {name}"));
        let s = |e: BundleError| e.to_string();
        let basis = self.basis(max_len);
        let small = self.basis(max_len.min(2));
        let one = self.unit();
        let f = collect_failures(&basis, |x| {
            let l = self.wedge(&one, x).map_err(s)?;
            let r = self.wedge(x, &one).map_err(s)?;
            Ok((l != *x || r != *x).then(|| x.render()))
        });
        rep.push_failures(
            format!("vertical.unit[{name}]"),
            "1 (x) 1 is a two-sided unit",
            basis.len(),
            &f,
        );

        let mut triples = Vec::new();
        for x in &small {
            for y in &small {
                for z in &small {
                    triples.push((x.clone(), y.clone(), z.clone()));
                }
            }
        }
        let f = collect_failures(&triples, |(x, y, z)| {
            let l = self.wedge(&self.wedge(x, y).map_err(s)?, z).map_err(s)?;
            let r = self.wedge(x, &self.wedge(y, z).map_err(s)?).map_err(s)?;
            Ok((l != r).then(|| format!("{} * {} * {}", x.render(), y.render(), z.render())))
        });
        rep.push_failures(
            format!("vertical.associative[{name}]"),
            "the product is associative",
            triples.len(),
            &f,
        );

        let top = self.inv.lambda().max_degree();
        let f = collect_failures(&basis, |x| {
            if self.degree(x) + 2 > top {
                return Ok(None);
            }
            let dd = self.d(&self.d(x).map_err(s)?).map_err(s)?;
            Ok((!dd.is_zero()).then(|| format!("{}: {}", x.render(), dd.render())))
        });
        rep.push_failures(
            format!("vertical.d-squared[{name}]"),
            "d_ver d_ver = 0",
            basis.len(),
            &f,
        );

        let mut pairs = Vec::new();
        for x in &small {
            for y in &small {
                pairs.push((x.clone(), y.clone()));
            }
        }
        let f = collect_failures(&pairs, |(x, y)| {
            if self.degree(x) + self.degree(y) >= top {
                return Ok(None);
            }
            let lhs = self.d(&self.wedge(x, y).map_err(s)?).map_err(s)?;
            let dx = self.wedge(&self.d(x).map_err(s)?, y).map_err(s)?;
            let xdy = self.wedge(x, &self.d(y).map_err(s)?).map_err(s)?;
            let rhs = if self.degree(x) % 2 == 1 {
                dx.sub(&xdy)
            } else {
                dx.add(&xdy)
            };
            Ok((lhs != rhs).then(|| {
                format!(
                    "{} * {}: {} vs {}",
                    x.render(),
                    y.render(),
                    lhs.render(),
                    rhs.render()
                )
            }))
        });
        rep.push_failures(
            format!("vertical.leibniz[{name}]"),
            "graded Leibniz rule for d_ver",
            pairs.len(),
            &f,
        );
        rep
    }
}

/// An expected value of a graded component of the total coaction.
#[derive(Clone, Debug)]
pub struct Expectation {
    /// Label used in reports.
    pub label: String,
    /// The form on the total space.
    pub element: Poly,
    /// `(k, l)`: degree on the total space and on the structure group.
    pub bidegree: (usize, usize),
    /// Expected value in `Omega(A) (x) Omega(H)`.
    pub value: Tensor,
}

/// Declared images of the total coaction on form letters and expected
/// values of its graded components.
#[derive(Clone, Debug, Default)]
pub struct CompletenessData {
    /// Images of form letters; missing ones are derived from surjectivity
    /// witnesses.
    pub forms: Vec<(Letter, Tensor)>,
    /// Values to confirm.
    pub expected: Vec<Expectation>,
}

/// A principal comodule algebra with calculi on the total space and the
/// structure group, and the total coaction between them.
pub struct Bundle {
    name: String,
    acalc: Arc<Calculus>,
    coaction: Arc<Coaction>,
    vertical: VerticalForms,
    total: Morphism,
    regular: Morphism,
    declared: Vec<(Letter, Tensor)>,
    expected: Vec<Expectation>,
}

impl std::fmt::Debug for Bundle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Bundle").field("name", &self.name).finish()
    }
}

impl Bundle {
    /// Assembles a bundle. The total coaction sends algebra letters to their
    /// coaction and form letters to the declared image, or to the image
    /// obtained from their witness `sum a d(b)`.
    pub fn new(
        name: &str,
        acalc: Arc<Calculus>,
        coaction: Arc<Coaction>,
        inv: Arc<InvariantForms>,
        data: CompletenessData,
    ) -> Result<Self, BundleError> {
        if coaction.source().name() != acalc.base().name() {
            return Err(BundleError::SignatureMismatch(format!(
                "coaction on {} with a calculus on {}",
                coaction.source().name(),
                acalc.base().name()
            )));
        }
        let hcalc = inv.hcalc().clone();
        let hopf = inv.hopf().clone();
        let target = vec![acalc.omega().clone(), hcalc.omega().clone()];
        let alg: Vec<(Letter, Tensor)> = acalc
            .base()
            .alphabet()
            .letters()
            .map(|x| (x, coaction.morphism().image(x).recast(target.clone())))
            .collect();
        let base = Morphism::new(
            "coaction",
            acalc.base().clone(),
            target.clone(),
            alg.clone(),
            false,
        )?;
        let declared_list = data.forms.clone();
        let declared: HashMap<Letter, Tensor> = data.forms.into_iter().collect();
        let mut images = alg;
        images.extend(form_images(
            &acalc, &target, &acalc, &hcalc, &base, &declared,
        )?);
        let total = Morphism::new(
            "total coaction",
            acalc.omega().clone(),
            target,
            images,
            false,
        )?;

        let htarget = vec![hcalc.omega().clone(), hcalc.omega().clone()];
        let halg: Vec<(Letter, Tensor)> = hopf
            .pres()
            .alphabet()
            .letters()
            .map(|x| (x, hopf.delta().image(x).recast(htarget.clone())))
            .collect();
        let hbase = Morphism::new(
            "coproduct",
            hopf.pres().clone(),
            htarget.clone(),
            halg.clone(),
            false,
        )?;
        let mut himages = halg;
        himages.extend(form_images(
            &hcalc,
            &htarget,
            &hcalc,
            &hcalc,
            &hbase,
            &HashMap::new(),
        )?);
        let regular = Morphism::new(
            "graded coproduct",
            hcalc.omega().clone(),
            htarget,
            himages,
            false,
        )?;
        let vertical = VerticalForms::new(inv, coaction.clone())?;
        Ok(Bundle {
            name: name.to_string(),
            acalc,
            coaction,
            vertical,
            total,
            regular,
            declared: declared_list,
            expected: data.expected,
        })
    }

    /// The bundle's name.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Calculus on the total space.
    pub fn acalc(&self) -> &Arc<Calculus> {
        &self.acalc
    }

    /// Calculus on the structure group.
    pub fn hcalc(&self) -> &Arc<Calculus> {
        self.vertical.inv.hcalc()
    }

    /// The structure group.
    pub fn hopf(&self) -> &Arc<HopfAlgebra> {
        self.vertical.inv.hopf()
    }

    /// The coaction on the total space.
    pub fn coaction(&self) -> &Arc<Coaction> {
        &self.coaction
    }

    /// The vertical forms.
    pub fn vertical(&self) -> &VerticalForms {
        &self.vertical
    }

    /// The invariant forms on the structure group.
    pub fn invariant_forms(&self) -> &Arc<InvariantForms> {
        &self.vertical.inv
    }

    /// The total coaction as a morphism.
    pub fn total(&self) -> &Morphism {
        &self.total
    }

    /// Declared images of form letters under the total coaction.
    pub fn declared_forms(&self) -> &[(Letter, Tensor)] {
        &self.declared
    }

    /// Expected component values.
    pub fn expectations(&self) -> &[Expectation] {
        &self.expected
    }

    /// Components `[Omega(A), Omega(H)]`.
    pub fn comps(&self) -> Vec<Arc<Presentation>> {
        self.total.target().to_vec()
    }

    /// `Delta^(omega)`.
    pub fn total_coaction(&self, omega: &Poly) -> Tensor {
        self.total.apply(&self.acalc.omega().nf(omega))
    }

    /// The component of bidegree `(k, l)` of the total coaction.
    pub fn ver(&self, omega: &Poly, k: usize, l: usize) -> Tensor {
        self.total_coaction(omega).degree_part(&[Some(k), Some(l)])
    }

    /// `omega (x) 1`.
    fn trivial(&self, omega: &Poly) -> Tensor {
        Tensor::from_polys(self.comps(), &[omega.clone(), Poly::one()])
    }

    fn vertical_part(&self, omega: &Poly) -> Tensor {
        let t = self.total_coaction(omega);
        t.sub(&t.degree_part(&[None, Some(0)]))
    }

    /// True when every component with positive degree on the structure
    /// group vanishes.
    pub fn is_horizontal(&self, omega: &Poly) -> bool {
        self.vertical_part(omega).is_zero()
    }

    /// The projection onto vertical forms: `ver^{0,k}` followed by
    /// `x (x) h |-> x0 (x) S(x1) h` and the identification with `Lambda`.
    pub fn pi_ver(&self, omega: &Poly) -> Result<VerticalForm, BundleError> {
        let o = self.acalc.omega();
        let omega = o.nf(omega);
        let inv = &self.vertical.inv;
        let oh = inv.hcalc().omega();
        let hopf = inv.hopf();
        let total = self.total.apply(&omega);
        let mut out = Tensor::zero(self.vertical.comps());
        for k in 0..=omega.max_degree(o.alphabet()) {
            let part = total.degree_part(&[Some(0), Some(k)]);
            let mut grouped: BTreeMap<Word, Poly> = BTreeMap::new();
            for (ws, c) in part.terms() {
                let h = Poly::word(ws[1].clone());
                for (ys, d) in self.coaction.apply_word(&ws[0]).terms() {
                    let p = oh.mul(&hopf.antipode_word(&ys[1]), &h);
                    grouped
                        .entry(ys[0].clone())
                        .or_default()
                        .add_scaled(&p, &(c * d));
                }
            }
            for (a, rho) in grouped {
                let lam = inv.to_lambda(&rho)?;
                out = out.add(&self.vertical.element(&Poly::word(a), &lam));
            }
        }
        Ok(out)
    }

    /// The coaction on vertical forms, `a (x) theta |-> a0 (x) theta_(1) (x)
    /// a1 theta_(2)`, as a tensor over `[A, Lambda, Omega(H)]`.
    pub fn vertical_coaction(&self, x: &VerticalForm) -> Result<Tensor, BundleError> {
        let inv = &self.vertical.inv;
        let oh = inv.hcalc().omega().clone();
        let comps = vec![
            self.coaction.source().clone(),
            inv.pres().clone(),
            oh.clone(),
        ];
        let mut out = Tensor::zero(comps.clone());
        for (xs, c) in x.terms() {
            let emb = inv.embed(&Poly::word(xs[1].clone()));
            let mut grouped: BTreeMap<Word, Poly> = BTreeMap::new();
            for (ys, d) in self.regular.apply(&emb).terms() {
                grouped
                    .entry(ys[1].clone())
                    .or_default()
                    .add_term(ys[0].clone(), d.clone());
            }
            for (right, left) in grouped {
                let lam = inv.to_lambda(&left)?;
                for (ws, e) in self.coaction.apply_word(&xs[0]).terms() {
                    let r = oh.mul(&Poly::word(ws[1].clone()), &Poly::word(right.clone()));
                    let t = Tensor::from_polys(
                        comps.clone(),
                        &[Poly::word(ws[0].clone()), lam.clone(), r],
                    );
                    out.add_scaled(&t, &(c * e));
                }
            }
        }
        Ok(out)
    }

    /// `a a'0 (x) varpi(a'1 - eps(a'1))`, the vertical part of `a d(a')`
    /// computed from the coaction on the algebra alone.
    pub fn ver_bm(&self, a: &Poly, b: &Poly) -> Result<VerticalForm, BundleError> {
        let alg = self.coaction.source();
        let inv = &self.vertical.inv;
        let mut out = Tensor::zero(self.vertical.comps());
        for (ws, c) in self.coaction.apply(&alg.nf(b)).terms() {
            let v = inv.varpi(
                &inv.hopf()
                    .augmentation_projection(&Poly::word(ws[1].clone())),
            )?;
            let left = alg.mul(a, &Poly::word(ws[0].clone()));
            out.add_scaled(&self.vertical.element(&left, &v), c);
        }
        Ok(out)
    }

    /// Well-definedness and structural checks of the total coaction.
    pub fn check_completeness(&self, max_len: usize) -> Report {
        let name = self.name.clone();
        let mut rep = Report::new(&format!("completeness {name}"));
        let o = self.acalc.omega().clone();
        let oa = o.alphabet();
        let hcalc = self.hcalc().clone();
        let s = |e: BundleError| e.to_string();

        let (n, f) = self.total.relation_failures();
        rep.push_failures(
            format!("completeness.relations[{name}]"),
            "the total coaction respects every relation",
            n,
            &f,
        );

        let letters: Vec<Letter> = oa.letters().collect();
        let f = collect_failures(&letters, |&x| {
            if oa.letter_degree(x) >= self.acalc.max_degree() {
                return Ok(None);
            }
            let lhs = self.total.apply(self.acalc.d_image(x));
            let rhs = d_tensor(self.total.image(x), &self.acalc, &hcalc).map_err(s)?;
            Ok((lhs != rhs).then(|| {
                format!(
                    "d {}: {} vs {}",
                    oa.letter_name(x),
                    lhs.render(),
                    rhs.render()
                )
            }))
        });
        rep.push_failures(
            format!("completeness.differential[{name}]"),
            "the total coaction commutes with d",
            letters.len(),
            &f,
        );

        let f = collect_failures(&letters, |&x| {
            let img = self.total.image(x);
            let deg = oa.letter_degree(x);
            let wrong: Vec<String> = img
                .terms()
                .filter(|(ws, _)| {
                    self.comps()[0].alphabet().degree(&ws[0])
                        + self.comps()[1].alphabet().degree(&ws[1])
                        != deg
                })
                .map(|(ws, _)| format!("{:?}", ws))
                .collect();
            let hp = self.hopf().clone();
            let counit = img
                .degree_part(&[None, Some(0)])
                .contract_leg(1, |w| hp.counit_word(w));
            let want = Tensor::from_polys(vec![o.clone()], &[Poly::letter(x)]);
            Ok((!wrong.is_empty() || counit != want)
                .then(|| format!("{}: {}", oa.letter_name(x), img.render())))
        });
        rep.push_failures(
            format!("completeness.counit[{name}]"),
            "images are homogeneous and (id (x) eps) of the coaction part is the identity",
            letters.len(),
            &f,
        );

        let f =
            collect_failures(&letters, |&x| {
                let img = self.total.image(x);
                let l = self.total.on_leg(img, 0);
                let r = self.regular.on_leg(img, 1);
                Ok((l != r)
                    .then(|| format!("{}: {} vs {}", oa.letter_name(x), l.render(), r.render())))
            });
        rep.push_failures(
            format!("completeness.coassociative[{name}]"),
            "the total coaction is coassociative",
            letters.len(),
            &f,
        );

        let mut pairs = Vec::new();
        for &x in &letters {
            for &y in &letters {
                if oa.letter_degree(x) + oa.letter_degree(y) <= self.acalc.max_degree() {
                    pairs.push((x, y));
                }
            }
        }
        let f = collect_failures(&pairs, |&(x, y)| {
            let lhs = self.total.apply(&o.nf_word(&[x, y]));
            let rhs = self
                .total
                .image(x)
                .mul(self.total.image(y))
                .map_err(|e| e.to_string())?;
            if lhs == rhs {
                return Ok(None);
            }
            let top = oa.letter_degree(x) + oa.letter_degree(y);
            let bad: Vec<String> = (0..=top)
                .filter(|&k| {
                    lhs.degree_part(&[Some(k), Some(top - k)])
                        != rhs.degree_part(&[Some(k), Some(top - k)])
                })
                .map(|k| format!("ver^{{{k},{}}}", top - k))
                .collect();
            Ok(Some(format!(
                "{} {}: {}",
                oa.letter_name(x),
                oa.letter_name(y),
                bad.join(", ")
            )))
        });
        rep.push_failures(
            format!("completeness.multiplicative[{name}]"),
            "components of a product are sums of products of components",
            pairs.len(),
            &f,
        );

        let _ = max_len;
        for e in &self.expected {
            let got = self.ver(&e.element, e.bidegree.0, e.bidegree.1);
            let want = e.value.recast(self.comps());
            rep.push(
                format!("completeness.expected[{name}: {}]", e.label),
                format!(
                    "ver^{{{},{}}} of {}",
                    e.bidegree.0,
                    e.bidegree.1,
                    o.render(&e.element)
                ),
                got == want,
                if got == want {
                    got.render()
                } else {
                    format!("got {} expected {}", got.render(), want.render())
                },
            );
        }
        rep
    }

    fn kernel(&self, words: &[Word], images: Vec<BTreeMap<Vec<Word>, Scalar>>) -> Vec<Poly> {
        linalg::kernel(&images)
            .into_iter()
            .map(|k| {
                let mut p = Poly::zero();
                for (i, c) in k {
                    p.add_term(words[i].clone(), c);
                }
                p
            })
            .collect()
    }

    /// A basis of the horizontal forms of degree `k` on basis words with at
    /// most `max_len` algebra letters.
    pub fn horizontal_forms(&self, k: usize, max_len: usize) -> Vec<Poly> {
        let words = self.acalc.omega().graded_basis(max_len, k);
        let images = words
            .iter()
            .map(|w| self.vertical_part(&Poly::word(w.clone())).as_map().clone())
            .collect();
        self.kernel(&words, images)
    }

    /// A basis of the forms of degree `k` with `Delta^(omega) = omega (x) 1`,
    /// on basis words with at most `max_len` algebra letters.
    pub fn base_forms(&self, k: usize, max_len: usize) -> Vec<Poly> {
        let words = self.acalc.omega().graded_basis(max_len, k);
        let images = words
            .iter()
            .map(|w| {
                let p = Poly::word(w.clone());
                self.total_coaction(&p)
                    .sub(&self.trivial(&p))
                    .as_map()
                    .clone()
            })
            .collect();
        self.kernel(&words, images)
    }

    /// A basis of `ker pi_ver` in degree `k` at the bound.
    pub fn pi_ver_kernel(&self, k: usize, max_len: usize) -> Result<Vec<Poly>, BundleError> {
        let words = self.acalc.omega().graded_basis(max_len, k);
        let mut images = Vec::with_capacity(words.len());
        for w in &words {
            images.push(self.pi_ver(&Poly::word(w.clone()))?.as_map().clone());
        }
        Ok(self.kernel(&words, images))
    }

    /// The span of `b0 d(b1) ... d(bk)` over basis coinvariants of length
    /// `<= max_len`, restricted to words with at most `max_len` algebra
    /// letters.
    pub fn b_db(&self, k: usize, max_len: usize) -> Result<Vec<Poly>, BundleError> {
        let o = self.acalc.omega();
        let b = self.coaction.coinvariants(max_len);
        let nonconst: Vec<&Poly> = b.iter().filter(|p| p.max_len() > 0).collect();
        let mut current: Vec<Poly> = b.clone();
        for _ in 0..k {
            let mut next = Vec::new();
            for x in &current {
                for y in &nonconst {
                    let dy = self.acalc.d(y)?;
                    next.push(o.mul(x, &dy));
                }
            }
            current = next;
        }
        let maps: Vec<BTreeMap<Word, Scalar>> =
            current.iter().map(|p| p.as_map().clone()).collect();
        let oa = o.alphabet();
        Ok(
            linalg::intersect_support(&maps, |w: &Word| oa.algebra_len(w) <= max_len)
                .into_iter()
                .map(Poly::from_map)
                .collect(),
        )
    }

    /// Base forms: the kernel computation agrees with horizontal and
    /// coinvariant forms, contains `B dB ... dB`, and is `B` in degree 0.
    pub fn check_base_forms(&self, max_len: usize, max_deg: usize) -> Report {
        let name = self.name.clone();
        let mut rep = Report::new(&format!("base forms {name}"));
        let o = self.acalc.omega();
        let maps = |v: &[Poly]| v.iter().map(|p| p.as_map().clone()).collect::<Vec<_>>();
        let b = self.coaction.coinvariants(max_len);
        let base0 = self.base_forms(0, max_len);
        rep.push(
            format!("base.degree-zero[{name}]"),
            "degree-zero base forms are the coinvariants",
            linalg::same_span(&maps(&base0), &maps(&b)),
            format!("dimension {}", base0.len()),
        );
        for k in 1..=max_deg.min(self.acalc.max_degree()) {
            let base = self.base_forms(k, max_len);
            let hor = self.horizontal_forms(k, max_len);
            let coinv: Vec<Poly> = hor
                .iter()
                .filter(|p| self.total_coaction(p) == self.trivial(p))
                .cloned()
                .collect();
            let all_hor = linalg::span_included(&maps(&base), &maps(&hor));
            let contained = coinv
                .iter()
                .all(|p| linalg::in_span(&maps(&base), p.as_map()));
            rep.push(
                format!("base.horizontal-coinvariant[{name}, {k}]"),
                "base forms are horizontal and coinvariant",
                all_hor && contained,
                format!("dimension {}", base.len()),
            );
            match self.b_db(k, max_len) {
                Ok(bdb) => {
                    let bad: Vec<String> = bdb
                        .iter()
                        .filter(|p| !linalg::in_span(&maps(&base), p.as_map()))
                        .map(|p| o.render(p))
                        .collect();
                    rep.push_failures(
                        format!("base.contains-bdb[{name}, {k}]"),
                        "B dB ... dB consists of base forms",
                        bdb.len(),
                        &bad,
                    );
                }
                Err(e) => rep.push(
                    format!("base.contains-bdb[{name}, {k}]"),
                    "B dB ... dB consists of base forms",
                    false,
                    e.to_string(),
                ),
            }
        }
        rep
    }

    /// The degree-one exact sequence at the bound: `ker pi_ver` equals the
    /// horizontal forms and `pi_ver` reaches every `a (x) theta` with `a` of
    /// length `< max_len`; in degree two only horizontal forms are required
    /// to lie in the kernel.
    pub fn check_exact_sequence(&self, max_len: usize) -> Report {
        let name = self.name.clone();
        let mut rep = Report::new(&format!("exact sequence {name}"));
        let maps = |v: &[Poly]| v.iter().map(|p| p.as_map().clone()).collect::<Vec<_>>();
        let o = self.acalc.omega();
        let hor1 = self.horizontal_forms(1, max_len);
        match self.pi_ver_kernel(1, max_len) {
            Ok(ker) => rep.push(
                format!("exact.kernel[{name}]"),
                "ker pi_ver = horizontal one-forms",
                linalg::same_span(&maps(&ker), &maps(&hor1)),
                format!("dimensions {} and {}", ker.len(), hor1.len()),
            ),
            Err(e) => rep.push(
                format!("exact.kernel[{name}]"),
                "ker pi_ver = horizontal one-forms",
                false,
                e.to_string(),
            ),
        }
        let words = o.graded_basis(max_len, 1);
        let mut images = Vec::new();
        let mut err = None;
        for w in &words {
            match self.pi_ver(&Poly::word(w.clone())) {
                Ok(t) => images.push(t.as_map().clone()),
                Err(e) => {
                    err = Some(e);
                    break;
                }
            }
        }
        let inv = self.invariant_forms();
        let mut targets = Vec::new();
        for a in self
            .coaction
            .source()
            .basis_words(max_len.saturating_sub(1))
        {
            for t in inv.pres().graded_basis(0, 1) {
                targets.push(Tensor::pure(
                    self.vertical.comps(),
                    vec![a.clone(), t],
                    Scalar::one(),
                ));
            }
        }
        let missing: Vec<String> = match err {
            Some(e) => vec![e.to_string()],
            None => targets
                .iter()
                .filter(|t| !linalg::in_span(&images, t.as_map()))
                .map(|t| t.render())
                .collect(),
        };
        rep.push_failures(
            format!("exact.surjective[{name}]"),
            "pi_ver reaches A (x) Lambda^1",
            targets.len(),
            &missing,
        );
        if self.acalc.max_degree() >= 2 {
            let small = self.horizontal_forms(1, max_len.min(2));
            let mut pairs = Vec::new();
            for x in &small {
                for y in &small {
                    pairs.push((x.clone(), y.clone()));
                }
            }
            let f = collect_failures(&pairs, |(x, y)| {
                let p = o.mul(x, y);
                Ok((!self.is_horizontal(&p))
                    .then(|| format!("({}) ({})", o.render(x), o.render(y))))
            });
            rep.push_failures(
                format!("hor.wedge-closed[{name}]"),
                "products of horizontal forms are horizontal",
                pairs.len(),
                &f,
            );
            let hor2 = self.horizontal_forms(2, max_len);
            let f = collect_failures(&hor2, |p| {
                let v = self.pi_ver(p).map_err(|e| e.to_string())?;
                Ok((!v.is_zero()).then(|| o.render(p)))
            });
            rep.push_failures(
                format!("exact.degree-two-inclusion[{name}]"),
                "horizontal two-forms lie in ker pi_ver",
                hor2.len(),
                &f,
            );
            if let Ok(ker2) = self.pi_ver_kernel(2, max_len) {
                rep.push(
                    format!("exact.degree-two-dimensions[{name}]"),
                    "dimension of ker pi_ver in degree two is at least that of the horizontal two-forms",
                    ker2.len() >= hor2.len(),
                    format!("kernel {} horizontal {}", ker2.len(), hor2.len()),
                );
            }
        }
        rep
    }

    /// The first-order vertical map defined through the algebra coaction:
    /// it vanishes on every first-order relation, agrees with `pi_ver`,
    /// and its kernel is `A d(B) A` at the bound.
    pub fn check_bm(&self, max_len: usize) -> Report {
        let name = self.name.clone();
        let mut rep = Report::new(&format!("first-order comparison {name}"));
        let alg = self.coaction.source().clone();
        let o = self.acalc.omega().clone();
        let oa = o.alphabet();
        match self.acalc.first_order_relations(max_len) {
            Ok(rels) => {
                let f = collect_failures(&rels, |rel| {
                    let mut sum = Tensor::zero(self.vertical.comps());
                    for (a, b, c) in rel {
                        let v = self
                            .ver_bm(&Poly::word(a.clone()), &Poly::word(b.clone()))
                            .map_err(|e| e.to_string())?;
                        sum.add_scaled(&v, c);
                    }
                    Ok((!sum.is_zero()).then(|| sum.render()))
                });
                rep.push_failures(
                    format!("bm.well-defined[{name}]"),
                    "the map vanishes on first-order relations",
                    rels.len(),
                    &f,
                );
            }
            Err(e) => rep.push(
                format!("bm.well-defined[{name}]"),
                "the map vanishes on first-order relations",
                false,
                e.to_string(),
            ),
        }
        let words = alg.basis_words(max_len);
        let pairs: Vec<(Word, Word)> = bounded_pairs(&words, max_len)
            .into_iter()
            .filter(|(_, b)| !b.is_empty())
            .collect();
        let f = collect_failures(&pairs, |(a, b)| {
            let (pa, pb) = (Poly::word(a.clone()), Poly::word(b.clone()));
            let bm = self.ver_bm(&pa, &pb).map_err(|e| e.to_string())?;
            let form = o.mul(&pa, &self.acalc.d(&pb).map_err(|e| e.to_string())?);
            let pv = self.pi_ver(&form).map_err(|e| e.to_string())?;
            Ok((bm != pv).then(|| {
                format!(
                    "{} d {}: {} vs {}",
                    alg.alphabet().render_word(a),
                    alg.alphabet().render_word(b),
                    bm.render(),
                    pv.render()
                )
            }))
        });
        rep.push_failures(
            format!("bm.agrees-with-pi-ver[{name}]"),
            "the map agrees with pi_ver on a d(b)",
            pairs.len(),
            &f,
        );

        let maps = |v: &[Poly]| v.iter().map(|p| p.as_map().clone()).collect::<Vec<_>>();
        let b: Vec<Poly> = self
            .coaction
            .coinvariants(max_len)
            .into_iter()
            .filter(|p| p.max_len() > 0)
            .collect();
        let mut spanning = Vec::new();
        let mut err = None;
        for x in &b {
            match self.acalc.d(x) {
                Ok(dx) => {
                    for a in &words {
                        let adx = o.mul(&Poly::word(a.clone()), &dx);
                        for c in &words {
                            spanning.push(o.mul(&adx, &Poly::word(c.clone())).as_map().clone());
                        }
                    }
                }
                Err(e) => err = Some(e.to_string()),
            }
        }
        let adba: Vec<BTreeMap<Word, Scalar>> =
            linalg::intersect_support(&spanning, |w: &Word| oa.algebra_len(w) <= max_len);
        match (err, self.pi_ver_kernel(1, max_len)) {
            (None, Ok(ker)) => rep.push(
                format!("bm.kernel[{name}]"),
                "ker pi_ver = A d(B) A",
                linalg::same_span(&maps(&ker), &adba),
                format!("dimensions {} and {}", ker.len(), adba.len()),
            ),
            (Some(e), _) => rep.push(
                format!("bm.kernel[{name}]"),
                "ker pi_ver = A d(B) A",
                false,
                e,
            ),
            (_, Err(e)) => rep.push(
                format!("bm.kernel[{name}]"),
                "ker pi_ver = A d(B) A",
                false,
                e.to_string(),
            ),
        }
        rep
    }

    /// `pi_ver` is the identity in degree zero, multiplicative, and commutes
    /// with the differentials, on basis words with at most `max_len`
    /// algebra letters.
    pub fn check_pi_ver(&self, max_len: usize) -> Report {
        let name = self.name.clone();
        let mut rep = Report::new(&format!("vertical projection {name}"));
        let o = self.acalc.omega().clone();
        let oa = o.alphabet();
        let s = |e: BundleError| e.to_string();
        let alg_words = o.graded_basis(max_len, 0);
        let f = collect_failures(&alg_words, |w| {
            let p = Poly::word(w.clone());
            let v = self.pi_ver(&p).map_err(s)?;
            Ok((v != self.vertical.element(&p, &Poly::one())).then(|| oa.render_word(w)))
        });
        rep.push_failures(
            format!("pi-ver.identity-on-algebra[{name}]"),
            "pi_ver restricts to the identity on A",
            alg_words.len(),
            &f,
        );

        let mut words = Vec::new();
        for k in 0..=self.acalc.max_degree() {
            words.extend(o.graded_basis(max_len.min(2), k));
        }
        let mut pairs = Vec::new();
        for x in &words {
            for y in &words {
                if oa.degree(x) + oa.degree(y) <= self.acalc.max_degree() {
                    pairs.push((x.clone(), y.clone()));
                }
            }
        }
        let f = collect_failures(&pairs, |(x, y)| {
            let (px, py) = (Poly::word(x.clone()), Poly::word(y.clone()));
            let lhs = self.pi_ver(&o.mul(&px, &py)).map_err(s)?;
            let rhs = self
                .vertical
                .wedge(&self.pi_ver(&px).map_err(s)?, &self.pi_ver(&py).map_err(s)?)
                .map_err(s)?;
            Ok((lhs != rhs).then(|| {
                format!(
                    "{} * {}: {} vs {}",
                    oa.render_word(x),
                    oa.render_word(y),
                    lhs.render(),
                    rhs.render()
                )
            }))
        });
        rep.push_failures(
            format!("pi-ver.multiplicative[{name}]"),
            "pi_ver of a product is the product of pi_ver",
            pairs.len(),
            &f,
        );

        let mut dwords = Vec::new();
        for k in 0..self.acalc.max_degree() {
            dwords.extend(o.graded_basis(max_len, k));
        }
        let f = collect_failures(&dwords, |w| {
            let p = Poly::word(w.clone());
            let lhs = self
                .pi_ver(&self.acalc.d(&p).map_err(|e| e.to_string())?)
                .map_err(s)?;
            let rhs = self.vertical.d(&self.pi_ver(&p).map_err(s)?).map_err(s)?;
            Ok((lhs != rhs).then(|| {
                format!(
                    "{}: {} vs {}",
                    oa.render_word(w),
                    lhs.render(),
                    rhs.render()
                )
            }))
        });
        rep.push_failures(
            format!("pi-ver.differential[{name}]"),
            "pi_ver d = d_ver pi_ver",
            dwords.len(),
            &f,
        );

        let mut gwords = Vec::new();
        for k in 0..=self.acalc.max_degree().min(2) {
            gwords.extend(o.graded_basis(max_len.min(2), k));
        }
        let f = collect_failures(&gwords, |w| {
            let p = Poly::word(w.clone());
            let lhs = self
                .vertical_coaction(&self.pi_ver(&p).map_err(s)?)
                .map_err(s)?;
            let comps = vec![
                self.coaction.source().clone(),
                self.invariant_forms().pres().clone(),
                self.hcalc().omega().clone(),
            ];
            let mut rhs = Tensor::zero(comps.clone());
            for (ws, c) in self.total_coaction(&p).terms() {
                for (vs, d) in self.pi_ver(&Poly::word(ws[0].clone())).map_err(s)?.terms() {
                    rhs.add_term(vec![vs[0].clone(), vs[1].clone(), ws[1].clone()], c * d);
                }
            }
            Ok((lhs != rhs).then(|| {
                format!(
                    "{}: {} vs {}",
                    oa.render_word(w),
                    lhs.render(),
                    rhs.render()
                )
            }))
        });
        rep.push_failures(
            format!("pi-ver.coaction-square[{name}]"),
            "the vertical coaction of pi_ver equals (pi_ver (x) id) of the total coaction",
            gwords.len(),
            &f,
        );
        rep
    }

    /// Every check of the bundle layer at the bound.
    pub fn check(&self, max_len: usize) -> Report {
        self.check_bounded(max_len, self.acalc.max_degree())
    }

    /// Every check of the bundle layer, with base forms computed up to
    /// degree `max_deg`.
    pub fn check_bounded(&self, max_len: usize, max_deg: usize) -> Report {
        let mut rep = Report::new(&format!("bundle {}", self.name));
        rep.extend(self.coaction.check(max_len));
        rep.extend(self.acalc.check(max_len));
        rep.extend(self.hcalc().check(max_len));
        rep.extend(self.invariant_forms().check(max_len));
        rep.extend(self.vertical.check(max_len.min(2)));
        rep.extend(self.check_completeness(max_len));
        rep.extend(self.check_pi_ver(max_len));
        rep.extend(self.check_exact_sequence(max_len));
        rep.extend(self.check_bm(max_len));
        rep.extend(self.check_base_forms(max_len, max_deg));
        rep
    }
}

/// Free-function form of [`Bundle::check_completeness`].
pub fn check_completeness(bundle: &Bundle, max_len: usize) -> Report {
    bundle.check_completeness(max_len)
}

/// Free-function form of [`Bundle::is_horizontal`].
pub fn is_horizontal(omega: &Poly, bundle: &Bundle) -> bool {
    bundle.is_horizontal(omega)
}

/// Free-function form of [`Bundle::base_forms`].
pub fn base_forms(bundle: &Bundle, max_len: usize, degree: usize) -> Vec<Poly> {
    bundle.base_forms(degree, max_len)
}

/// Free-function form of [`Bundle::pi_ver`].
pub fn pi_ver(omega: &Poly, bundle: &Bundle) -> Result<VerticalForm, BundleError> {
    bundle.pi_ver(omega)
}

/// True when [`Bundle::check_exact_sequence`] passes.
pub fn check_exact_sequence_deg1(bundle: &Bundle, max_len: usize) -> bool {
    bundle.check_exact_sequence(max_len).all_passed()
}

/// True when [`Bundle::check_bm`] passes.
pub fn check_bm_bundle(bundle: &Bundle, max_len: usize) -> bool {
    bundle.check_bm(max_len).all_passed()
}

/// A calculus on the smash product `B # H` of a module algebra `B` with
/// calculus `bcalc` and a Hopf algebra with calculus `hcalc`, together with
/// the coaction `b # h |-> b # h1 (x) h2`.
pub struct SmashCalculus {
    /// The calculus on `B # H`.
    pub calc: Arc<Calculus>,
    /// The right coaction of `H`.
    pub coaction: Arc<Coaction>,
    /// Letters of `Omega(B)` in the smash product, by original letter.
    pub base_letters: HashMap<Letter, Letter>,
    /// Letters of `Omega(H)` in the smash product, by original letter.
    pub hopf_letters: HashMap<Letter, Letter>,
}

fn map_poly(p: &Poly, m: &HashMap<Letter, Letter>) -> Poly {
    let mut out = Poly::zero();
    for (w, c) in p.terms() {
        out.add_term(w.iter().map(|x| m[x]).collect(), c.clone());
    }
    out
}

/// Builds the calculus `Omega(B) (x) Omega(H)` on a crossed product with
/// product `(1 # eta)(w # 1) = (-1)^{|eta||w|} (eta_{-1} . w) # eta_0`.
///
/// The cocycle must be closed for the calculus on `B`; a closed but
/// nontrivial cocycle is rejected as unsupported. The action on forms is
/// `h . (a d b) = (h1 . a) d(h2 . b)`, and moving a form of `B` past an
/// element of `H` uses `w h = h2 (S(h1) . w)`, which requires `S^2 = id`
/// on the relevant words.
pub fn crossed_product_calculus(
    name: &str,
    bcalc: &Arc<Calculus>,
    hcalc: &Arc<Calculus>,
    hopf: &Arc<HopfAlgebra>,
    data: &dyn CrossedData,
) -> Result<SmashCalculus, BundleError> {
    let bp = bcalc.base().clone();
    let hp = hopf.pres().clone();
    let ba = bp.alphabet();
    let ha = hp.alphabet();
    let hletters: Vec<Letter> = ha.letters().collect();
    for &x in &hletters {
        for &y in &hletters {
            let s = data.cocycle_word(&[x], &[y])?;
            let ds = bcalc.d(&s)?;
            let pair = format!("{} (x) {}", ha.letter_name(x), ha.letter_name(y));
            if !ds.is_zero() {
                return Err(BundleError::TwistedCalculusViolation(
                    pair,
                    bcalc.omega().render(&ds),
                ));
            }
            let trivial = Poly::scalar(&hopf.counit_word(&[x]) * &hopf.counit_word(&[y]));
            if bp.nf(&s) != trivial {
                return Err(BundleError::UnsupportedCocycle(pair, bp.render(&s)));
            }
        }
    }

    let boa = bcalc.omega().alphabet();
    let hoa = hcalc.omega().alphabet();
    let mut ab = PresentationBuilder::new(name);
    let mut bmap: HashMap<Letter, Letter> = HashMap::new();
    let mut hmap: HashMap<Letter, Letter> = HashMap::new();
    let add_gens = |b: &mut PresentationBuilder,
                    alphabet: &crate::freealg::Alphabet,
                    kind: LetterKind,
                    map: &mut HashMap<Letter, Letter>|
     -> Result<(), BundleError> {
        for g in alphabet.generators() {
            if (kind == LetterKind::Form) != (g.kind == LetterKind::Form) {
                continue;
            }
            let x = alphabet.letter(&g.name)?;
            let nx = b.generator(g.clone())?;
            map.insert(x, nx);
            if let (Some(xi), Some(nxi)) = (alphabet.inverse(x), b.alphabet().inverse(nx)) {
                map.insert(xi, nxi);
            }
        }
        Ok(())
    };
    add_gens(&mut ab, ba, LetterKind::Algebra, &mut bmap)?;
    add_gens(&mut ab, ha, LetterKind::Algebra, &mut hmap)?;
    for r in bp.rules().iter().filter(|r| !r.derived) {
        ab.rule(
            &r.lhs.iter().map(|x| bmap[x]).collect::<Word>(),
            map_poly(&r.rhs, &bmap),
        );
    }
    for r in hp.rules().iter().filter(|r| !r.derived) {
        ab.rule(
            &r.lhs.iter().map(|x| hmap[x]).collect::<Word>(),
            map_poly(&r.rhs, &hmap),
        );
    }
    let balg: Vec<Letter> = ba.letters().collect();
    for &z in &hletters {
        for &y in &balg {
            let mut rhs = Poly::zero();
            for (ws, c) in hopf.coproduct_word(&[z]).terms() {
                let acted = map_poly(&data.act_word(&ws[0], &[y])?, &bmap);
                rhs.add_scaled(
                    &acted.concat_mul(&map_poly(&Poly::word(ws[1].clone()), &hmap)),
                    c,
                );
            }
            ab.rule(&[hmap[&z], bmap[&y]], rhs);
        }
    }
    let apres = Arc::new(ab.build()?);

    let mut ob = PresentationBuilder::extend(&apres, &format!("Omega({name})"));
    add_gens(&mut ob, boa, LetterKind::Form, &mut bmap)?;
    add_gens(&mut ob, hoa, LetterKind::Form, &mut hmap)?;
    for r in bcalc
        .omega()
        .rules()
        .iter()
        .filter(|r| !r.derived && boa.degree(&r.lhs) > 0)
    {
        ob.rule(
            &r.lhs.iter().map(|x| bmap[x]).collect::<Word>(),
            map_poly(&r.rhs, &bmap),
        );
    }
    for r in hcalc
        .omega()
        .rules()
        .iter()
        .filter(|r| !r.derived && hoa.degree(&r.lhs) > 0)
    {
        ob.rule(
            &r.lhs.iter().map(|x| hmap[x]).collect::<Word>(),
            map_poly(&r.rhs, &hmap),
        );
    }

    // The action of an H word on a word of Omega(B).
    let act_omega = |g: &[Letter], w: &[Letter]| -> Result<Poly, BundleError> {
        fn go(
            g: &[Letter],
            w: &[Letter],
            hopf: &HopfAlgebra,
            bcalc: &Calculus,
            data: &dyn CrossedData,
        ) -> Result<Poly, BundleError> {
            let bo = bcalc.omega();
            if w.is_empty() {
                return Ok(Poly::scalar(hopf.counit_word(g)));
            }
            if w.len() > 1 {
                let mut out = Poly::zero();
                for (ws, c) in hopf.coproduct_word(g).terms() {
                    let x = go(&ws[0], &w[..1], hopf, bcalc, data)?;
                    let y = go(&ws[1], &w[1..], hopf, bcalc, data)?;
                    out.add_scaled(&bo.mul(&x, &y), c);
                }
                return Ok(out);
            }
            let x = w[0];
            if !bo.alphabet().is_form(x) {
                return Ok(data.act_word(g, &[x])?);
            }
            let Some(wit) = bcalc.surjectivity_witness(x) else {
                return Err(BundleError::MissingWitness(bo.alphabet().letter_name(x)));
            };
            let mut out = Poly::zero();
            for (a, b) in wit {
                for (ws, c) in hopf.coproduct_word(g).terms() {
                    let mut ga = Poly::zero();
                    for (v, e) in a.terms() {
                        ga.add_scaled(&go(&ws[0], v, hopf, bcalc, data)?, e);
                    }
                    let mut gb = Poly::zero();
                    for (v, e) in b.terms() {
                        gb.add_scaled(&go(&ws[1], v, hopf, bcalc, data)?, e);
                    }
                    out.add_scaled(&bo.mul(&ga, &bcalc.d(&gb)?), c);
                }
            }
            Ok(out)
        }
        go(g, w, hopf, bcalc, data)
    };

    let left = left_coaction_on_forms(hopf, hcalc)?;
    let bforms: Vec<Letter> = bcalc.form_letters();
    let hforms: Vec<Letter> = hcalc.form_letters();
    // Algebra letters of H against form letters of B: w z = z2 (S(z1) . w).
    for &z in &hletters {
        for &y in &bforms {
            let mut rhs = Poly::zero();
            for (ws, c) in hopf.coproduct_word(&[z]).terms() {
                let s = hopf.antipode_word(&ws[0]);
                if hopf.antipode(&s) != Poly::word(ws[0].clone()) {
                    return Err(BundleError::UnsupportedAction(format!(
                        "S^2 differs from the identity on {}",
                        ha.render_word(&ws[0])
                    )));
                }
                for (sw, sc) in s.terms() {
                    let acted = map_poly(&act_omega(sw, &[y])?, &bmap);
                    let h2 = map_poly(&Poly::word(ws[1].clone()), &hmap);
                    rhs.add_scaled(&h2.concat_mul(&acted), &(c * sc));
                }
            }
            ob.rule(&[bmap[&y], hmap[&z]], rhs);
        }
    }
    // Form letters of H against algebra and form letters of B.
    let bletters: Vec<Letter> = balg.iter().chain(bforms.iter()).copied().collect();
    for &z in &hforms {
        let img = left.image(z);
        for &y in &bletters {
            let sign = if boa.is_form(y) {
                -Scalar::one()
            } else {
                Scalar::one()
            };
            let mut rhs = Poly::zero();
            for (ws, c) in img.terms() {
                let acted = map_poly(&act_omega(&ws[0], &[y])?, &bmap);
                let eta = map_poly(&Poly::word(ws[1].clone()), &hmap);
                rhs.add_scaled(&acted.concat_mul(&eta), &(c * &sign));
            }
            ob.rule(&[hmap[&z], bmap[&y]], rhs);
        }
    }
    let omega = Arc::new(ob.build()?);

    let mut d_alg = Vec::new();
    for x in ba.letters() {
        d_alg.push((bmap[&x], map_poly(bcalc.d_image(x), &bmap)));
    }
    for x in ha.letters() {
        d_alg.push((hmap[&x], map_poly(hcalc.d_image(x), &hmap)));
    }
    let mut d_forms = Vec::new();
    let mut witnesses = Vec::new();
    for &x in &bforms {
        if bcalc.exact_letter(x).is_none() {
            d_forms.push((bmap[&x], map_poly(bcalc.d_image(x), &bmap)));
            if let Some(w) = bcalc.surjectivity_witness(x) {
                witnesses.push((
                    bmap[&x],
                    w.iter()
                        .map(|(a, b)| (map_poly(a, &bmap), map_poly(b, &bmap)))
                        .collect(),
                ));
            }
        }
    }
    for &x in &hforms {
        if hcalc.exact_letter(x).is_none() {
            d_forms.push((hmap[&x], map_poly(hcalc.d_image(x), &hmap)));
            if let Some(w) = hcalc.surjectivity_witness(x) {
                witnesses.push((
                    hmap[&x],
                    w.iter()
                        .map(|(a, b)| (map_poly(a, &hmap), map_poly(b, &hmap)))
                        .collect(),
                ));
            }
        }
    }
    let top = bcalc.max_degree() + hcalc.max_degree();
    let calc = Arc::new(Calculus::new(
        apres.clone(),
        omega,
        d_alg,
        d_forms,
        witnesses,
        top,
    )?);

    let target = vec![apres.clone(), hp.clone()];
    let mut images = Vec::new();
    for x in ba.letters() {
        images.push((
            bmap[&x],
            Tensor::from_polys(target.clone(), &[Poly::letter(bmap[&x]), Poly::one()]),
        ));
    }
    for x in ha.letters() {
        if ha.info(x).is_inverse {
            continue;
        }
        let img = hopf.delta().image(x);
        let mut t = Tensor::zero(target.clone());
        for (ws, c) in img.terms() {
            let a = map_poly(&Poly::word(ws[0].clone()), &hmap);
            t.add_scaled(
                &Tensor::from_polys(target.clone(), &[a, Poly::word(ws[1].clone())]),
                c,
            );
        }
        images.push((hmap[&x], t));
    }
    let coaction = Arc::new(Coaction::right(
        &format!("{name}:coaction"),
        apres,
        hopf,
        images,
    )?);
    Ok(SmashCalculus {
        calc,
        coaction,
        base_letters: bmap,
        hopf_letters: hmap,
    })
}

/// The generator of a one-letter invariant form space `w = S(x) d(x)` for a
/// group-like generator `x`, with `w w = 0`.
pub fn group_like_invariant_forms(
    hopf: &Arc<HopfAlgebra>,
    hcalc: &Arc<Calculus>,
    generator: &str,
    form_name: &str,
) -> Result<InvariantForms, BundleError> {
    let x = hopf.pres().letter(generator).map_err(RewriteError::from)?;
    let mut b = PresentationBuilder::new(&format!("Lambda({})", hopf.pres().name()));
    let w = b.generator(Generator::form(form_name))?;
    b.rule(&[w, w], Poly::zero());
    let lambda = Arc::new(b.build()?);
    let emb = hcalc.maurer_cartan(hopf, &hopf.augmentation_projection(&Poly::letter(x)))?;
    InvariantForms::new(
        hopf.clone(),
        hcalc.clone(),
        lambda,
        vec![(w, emb)],
        vec![],
        vec![],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comodule::SmashData;
    use crate::fixtures::{suq2_calculus, torus_calculus, u1_calculus};
    use crate::freealg::word;
    use crate::rewrite::mono;

    fn torus_bundle(twist: Option<Scalar>) -> Bundle {
        let (h, hc) = u1_calculus(0);
        let hc = Arc::new(hc);
        let ac = Arc::new(torus_calculus(None));
        let ac = if let Some(tw) = twist {
            let o = ac.omega();
            let (u, du) = (o.letter("u").unwrap(), o.letter("du").unwrap());
            let mut b = PresentationBuilder::extend(ac.base(), "Omega(A_l(T^2))'");
            for g in o
                .alphabet()
                .generators()
                .into_iter()
                .filter(|g| g.kind == LetterKind::Form)
            {
                b.generator(g).unwrap();
            }
            for r in o
                .rules()
                .iter()
                .filter(|r| !r.derived && o.alphabet().degree(&r.lhs) > 0)
            {
                let rhs = if r.lhs.as_slice() == [du, u] {
                    mono(tw.clone(), &[u, du])
                } else {
                    r.rhs.clone()
                };
                b.rule(&r.lhs, rhs);
            }
            let omega = Arc::new(b.build().unwrap());
            let base = ac.base().clone();
            let d_alg = base
                .alphabet()
                .letters()
                .filter(|&x| !base.alphabet().info(x).is_inverse)
                .map(|x| (x, ac.d_image(x).clone()))
                .collect();
            Arc::new(Calculus::new(base, omega, d_alg, vec![], vec![], 2).unwrap())
        } else {
            ac
        };
        let a = ac.base().clone();
        let t = h.pres().letter("t").unwrap();
        let (u, v) = (a.letter("u").unwrap(), a.letter("v").unwrap());
        let ti = h.pres().letter("t^-1").unwrap();
        let target = vec![a.clone(), h.pres().clone()];
        let coact = Arc::new(
            Coaction::right(
                "torus",
                a.clone(),
                &h,
                vec![
                    (
                        u,
                        Tensor::pure(target.clone(), vec![word(&[u]), word(&[t])], Scalar::one()),
                    ),
                    (
                        v,
                        Tensor::pure(target.clone(), vec![word(&[v]), word(&[ti])], Scalar::one()),
                    ),
                ],
            )
            .unwrap(),
        );
        let inv = Arc::new(group_like_invariant_forms(&h, &hc, "t", "w").unwrap());
        Bundle::new("torus", ac, coact, inv, CompletenessData::default()).unwrap()
    }

    #[test]
    fn invariant_forms_of_u1() {
        let (h, hc) = u1_calculus(2);
        let hc = Arc::new(hc);
        let inv = group_like_invariant_forms(&h, &hc, "t", "w").unwrap();
        let lp = inv.pres().clone();
        let w = Poly::letter(lp.letter("w").unwrap());
        let t = Poly::letter(h.pres().letter("t").unwrap());
        assert_eq!(inv.hook(&w, &t).unwrap(), w.scale(&Scalar::q(2)));
        assert_eq!(inv.hook(&Poly::one(), &t).unwrap(), Poly::one());
        assert_eq!(inv.hook(&w, &Poly::one()).unwrap(), w);
        let r = inv.check(3);
        assert!(r.all_passed(), "{}", r.to_text());
    }

    #[test]
    fn torus_vertical_forms() {
        let b = torus_bundle(None);
        let a = b.coaction().source().clone();
        let (u, v) = (
            Poly::letter(a.letter("u").unwrap()),
            Poly::letter(a.letter("v").unwrap()),
        );
        let vf = b.vertical();
        let w = Poly::letter(vf.invariant_forms().pres().letter("w").unwrap());
        assert_eq!(
            vf.d(&vf.element(&u, &Poly::one())).unwrap(),
            vf.element(&u, &w)
        );
        assert!(vf.d(&vf.unit()).unwrap().is_zero());
        let x = vf.wedge(&vf.element(&u, &w), &vf.element(&v, &w)).unwrap();
        assert!(x.is_zero());
        let r = vf.check(2);
        assert!(r.all_passed(), "{}", r.to_text());
    }

    #[test]
    fn torus_bundle_checks() {
        let b = torus_bundle(None);
        let o = b.acalc().omega().clone();
        let du = Poly::letter(o.letter("du").unwrap());
        let u = o.letter("u").unwrap();
        let w = Poly::letter(b.invariant_forms().pres().letter("w").unwrap());
        assert_eq!(
            b.pi_ver(&du).unwrap(),
            b.vertical().element(&Poly::letter(u), &w)
        );
        assert!(!b.is_horizontal(&du));
        let r = b.check(3);
        assert!(r.all_passed(), "{}", r.to_text());
    }

    #[test]
    fn corrupted_torus_rule_fails_completeness() {
        let b = torus_bundle(Some(Scalar::q(1)));
        let r = b.check_completeness(2);
        assert!(!r.all_passed());
        assert!(!r.get("completeness.relations[torus]").unwrap().passed());
    }

    #[test]
    fn smash_product_calculus() {
        let mut bb = PresentationBuilder::new("C[x]");
        let x = bb.generator(Generator::algebra("x")).unwrap();
        let bp = Arc::new(bb.build().unwrap());
        let mut ob = PresentationBuilder::extend(&bp, "Omega(C[x])");
        let dx = ob.generator(Generator::form("dx")).unwrap();
        ob.rule(&[dx, x], mono(Scalar::one(), &[x, dx]));
        ob.rule(&[dx, dx], Poly::zero());
        let bc = Arc::new(
            Calculus::new(
                bp.clone(),
                Arc::new(ob.build().unwrap()),
                vec![(x, Poly::letter(dx))],
                vec![],
                vec![],
                2,
            )
            .unwrap(),
        );
        let (h, hc) = u1_calculus(0);
        let hc = Arc::new(hc);
        let data = SmashData::trivial(bp.clone(), h.clone());
        let sc = crossed_product_calculus("C[x]#O(U(1))", &bc, &hc, &h, &data).unwrap();
        let r = sc.calc.check(3);
        assert!(r.all_passed(), "{}", r.to_text());
        let inv = Arc::new(group_like_invariant_forms(&h, &hc, "t", "w").unwrap());
        let bundle = Bundle::new(
            "smash",
            sc.calc.clone(),
            sc.coaction.clone(),
            inv,
            CompletenessData::default(),
        )
        .unwrap();
        let r = bundle.check_completeness(2);
        assert!(r.all_passed(), "{}", r.to_text());
        let o = sc.calc.omega();
        for k in 0..=2 {
            let base = bundle.base_forms(k, 3);
            let expected: Vec<BTreeMap<Word, Scalar>> = bc
                .omega()
                .graded_basis(3, k)
                .into_iter()
                .map(|w| map_poly(&Poly::word(w), &sc.base_letters).as_map().clone())
                .collect();
            let got: Vec<BTreeMap<Word, Scalar>> =
                base.iter().map(|p| p.as_map().clone()).collect();
            assert!(
                linalg::same_span(&got, &expected),
                "degree {k}: {:?}",
                base.iter().map(|p| o.render(p)).collect::<Vec<_>>()
            );
        }
    }

    fn hopf_fibration() -> Bundle {
        let (h, hc) = u1_calculus(2);
        let hc = Arc::new(hc);
        let ac = Arc::new(suq2_calculus());
        let a = ac.base().clone();
        let hp = h.pres().clone();
        let target = vec![a.clone(), hp.clone()];
        let t = |k: i32| -> Word {
            let x = if k > 0 {
                hp.letter("t").unwrap()
            } else {
                hp.letter("t^-1").unwrap()
            };
            vec![x; k.unsigned_abs() as usize].into_iter().collect()
        };
        let images = ["alpha", "beta", "gamma", "delta"]
            .iter()
            .map(|n| {
                let x = a.letter(n).unwrap();
                let w = a.alphabet().info(x).weight;
                (
                    x,
                    Tensor::pure(target.clone(), vec![word(&[x]), t(w)], Scalar::one()),
                )
            })
            .collect();
        let coact = Arc::new(Coaction::right("hopf fibration", a, &h, images).unwrap());
        let inv = Arc::new(group_like_invariant_forms(&h, &hc, "t", "w").unwrap());
        Bundle::new(
            "hopf fibration",
            ac,
            coact,
            inv,
            CompletenessData::default(),
        )
        .unwrap()
    }

    #[test]
    fn hopf_fibration_table() {
        let b = hopf_fibration();
        let o = b.acalc().omega().clone();
        let oh = b.hcalc().omega().clone();
        let comps = b.comps();
        let g = |n: &str| Poly::letter(o.letter(n).unwrap());
        let hw = |s: &[&str]| Poly::word(s.iter().map(|n| oh.letter(n).unwrap()).collect());
        let (ep, em, e0) = (g("ep"), g("em"), g("e0"));
        let t = |a: &Poly, h: Poly| Tensor::from_polys(comps.clone(), &[a.clone(), h]);
        let tinv_dt = hw(&["t^-1", "dt"]);
        for x in [&ep, &em] {
            assert!(b.ver(x, 0, 1).is_zero());
        }
        assert_eq!(b.ver(&e0, 0, 1), t(&Poly::one(), tinv_dt.clone()));
        let epe0 = o.mul(&ep, &e0);
        assert_eq!(b.ver(&epe0, 1, 1), t(&ep, hw(&["t", "dt"])));
        let eme0 = o.mul(&em, &e0);
        assert_eq!(
            b.ver(&eme0, 1, 1),
            t(&em, hw(&["t^-1", "t^-1", "t^-1", "dt"]))
        );
        let c = b.acalc();
        assert!(b.ver(&c.d(&e0).unwrap(), 1, 1).is_zero());
        let q = Scalar::q;
        assert_eq!(
            b.ver(&c.d(&ep).unwrap(), 1, 1),
            t(&ep, hw(&["t", "dt"])).scale(&-(q(2) + Scalar::one()))
        );
        assert_eq!(
            b.ver(&c.d(&em).unwrap(), 1, 1),
            t(&em, hw(&["t^-1", "t^-1", "t^-1", "dt"])).scale(&(&q(-2) * &(Scalar::one() + q(-2))))
        );
        let epem = o.mul(&ep, &em);
        let top = o.mul(&epem, &e0);
        assert_eq!(b.ver(&top, 2, 1), t(&epem, tinv_dt));
        assert!(b.ver(&c.d(&epem).unwrap(), 2, 1).is_zero());
        let r = b.check_completeness(2);
        assert!(r.all_passed(), "{}", r.to_text());
    }

    #[test]
    fn hopf_fibration_checks() {
        let b = hopf_fibration();
        let r = b.check(2);
        assert!(r.all_passed(), "{}", r.to_text());
    }

    use proptest::prelude::*;

    fn pick(pres: &Presentation, raw: &[u16]) -> Poly {
        let n = pres.alphabet().letters().count() as u16;
        let w: Vec<Letter> = raw.iter().map(|x| x % n).collect();
        pres.nf_word(&w)
    }

    fn random_vertical(b: &Bundle, terms: &[(Vec<u16>, usize, i64)]) -> VerticalForm {
        let vf = b.vertical();
        let a = b.coaction().source().clone();
        let thetas = vf.invariant_forms().basis();
        let mut out = Tensor::zero(vf.comps());
        for (x, k, c) in terms {
            let theta = Poly::word(thetas[k % thetas.len()].clone());
            out.add_scaled(&vf.element(&pick(&a, x), &theta), &Scalar::int(*c));
        }
        out
    }

    fn terms() -> impl Strategy<Value = Vec<(Vec<u16>, usize, i64)>> {
        let w = proptest::collection::vec(0u16..16, 0..4);
        proptest::collection::vec((w, 0usize..8, -3i64..4), 1..4)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn vertical_d_squared_vanishes(x in terms(), y in terms()) {
            for (b, t) in [(torus_bundle(None), &x), (hopf_fibration(), &y)] {
                let vf = b.vertical();
                let v = random_vertical(&b, t);
                prop_assert!(vf.d(&vf.d(&v).unwrap()).unwrap().is_zero());
            }
        }

        #[test]
        fn pi_ver_is_a_dga_morphism(
            x in proptest::collection::vec(0u16..16, 0..3),
            y in proptest::collection::vec(0u16..16, 0..3),
        ) {
            let b = hopf_fibration();
            let o = b.acalc().omega().clone();
            let (px, py) = (pick(&o, &x), pick(&o, &y));
            let deg = |p: &Poly| p.terms().map(|(w, _)| o.alphabet().degree(w)).max().unwrap_or(0);
            prop_assume!(deg(&px) + deg(&py) <= b.acalc().max_degree());
            let vf = b.vertical();
            let lhs = b.pi_ver(&o.mul(&px, &py)).unwrap();
            let rhs = vf.wedge(&b.pi_ver(&px).unwrap(), &b.pi_ver(&py).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            if deg(&px) < b.acalc().max_degree() {
                let d_then_pi = b.pi_ver(&b.acalc().d(&px).unwrap()).unwrap();
                prop_assert_eq!(d_then_pi, vf.d(&b.pi_ver(&px).unwrap()).unwrap());
            }
        }

        #[test]
        fn horizontal_forms_are_closed_under_wedge(
            i in 0usize..64,
            j in 0usize..64,
            y in proptest::collection::vec(0u16..16, 0..4),
        ) {
            let b = torus_bundle(None);
            let o = b.acalc().omega().clone();
            let hor = b.horizontal_forms(1, 2);
            prop_assume!(!hor.is_empty());
            let a = pick(b.coaction().source(), &y);
            let w = o.mul(&o.mul(&hor[i % hor.len()], &a), &hor[j % hor.len()]);
            prop_assert!(b.is_horizontal(&w));
        }
    }
}
