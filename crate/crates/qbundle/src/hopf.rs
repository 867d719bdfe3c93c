//! Hopf algebra structure maps, linear maps out of a Hopf algebra, the
//! convolution product and axiom verification.
//!
//! Every structure map is a [`Morphism`]: images are stored on generators and
//! extended multiplicatively (or anti-multiplicatively) on demand, with a
//! per-word memo. The counit is a morphism into the empty tensor product,
//! whose elements are scalars.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::RwLock;
use rayon::prelude::*;
use thiserror::Error;

use crate::coeff::Scalar;
use crate::freealg::{Letter, LetterKind, Poly, Tensor, Word};
use crate::report::Report;
use crate::rewrite::Presentation;

/// Errors raised when building or evaluating maps.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HopfError {
    /// A generator or basis word has no image.
    #[error("missing image for {0}")]
    MissingImage(String),
    /// Source or target spaces do not match.
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    /// The image of an invertible generator is not invertible.
    #[error("image of {0} is not an invertible monomial")]
    NotInvertible(String),
}

/// An algebra (or anti-algebra) map from a presentation into a tensor
/// product of presentations, defined by generator images.
pub struct Morphism {
    name: String,
    source: Arc<Presentation>,
    target: Vec<Arc<Presentation>>,
    images: HashMap<Letter, Tensor>,
    anti: bool,
    memo: RwLock<HashMap<Word, Arc<Tensor>>>,
}

impl std::fmt::Debug for Morphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Morphism")
            .field("name", &self.name)
            .field("source", &self.source.name())
            .field("anti", &self.anti)
            .finish()
    }
}

fn invert_word(pres: &Presentation, w: &[Letter]) -> Option<Word> {
    let a = pres.alphabet();
    w.iter().rev().map(|&x| a.inverse(x)).collect()
}

impl Morphism {
    /// Builds a morphism from generator images. Images of inverse letters
    /// are derived when the image of the letter is an invertible monomial.
    pub fn new(
        name: &str,
        source: Arc<Presentation>,
        target: Vec<Arc<Presentation>>,
        images: Vec<(Letter, Tensor)>,
        anti: bool,
    ) -> Result<Self, HopfError> {
        let mut map: HashMap<Letter, Tensor> = HashMap::new();
        for (x, t) in images {
            if t.arity() != target.len() {
                return Err(HopfError::SignatureMismatch(format!(
                    "{name}: image of {} has arity {}, expected {}",
                    source.alphabet().letter_name(x),
                    t.arity(),
                    target.len()
                )));
            }
            map.insert(x, t.recast(target.clone()));
        }
        let a = source.alphabet();
        for x in a.letters() {
            if map.contains_key(&x) {
                continue;
            }
            let info = a.info(x);
            let derived = match (info.kind, a.inverse(x)) {
                (LetterKind::Algebra, Some(xi)) => {
                    map.get(&xi).map(|img| Self::invert_image(&target, img))
                }
                _ => None,
            };
            match derived {
                Some(Ok(t)) => {
                    map.insert(x, t);
                }
                Some(Err(())) => {
                    return Err(HopfError::NotInvertible(format!(
                        "{name}: {}",
                        a.letter_name(a.inverse(x).expect("inverse"))
                    )))
                }
                None => {
                    return Err(HopfError::MissingImage(format!(
                        "{name}: generator {}",
                        a.letter_name(x)
                    )))
                }
            }
        }
        Ok(Morphism {
            name: name.to_string(),
            source,
            target,
            images: map,
            anti,
            memo: RwLock::new(HashMap::new()),
        })
    }

    fn invert_image(target: &[Arc<Presentation>], img: &Tensor) -> Result<Tensor, ()> {
        if img.len() != 1 {
            return Err(());
        }
        let (ws, c) = img.terms().next().expect("one term");
        let c_inv = c.inverse().map_err(|_| ())?;
        let mut inv = Vec::with_capacity(ws.len());
        for (i, w) in ws.iter().enumerate() {
            inv.push(invert_word(&target[i], w).ok_or(())?);
        }
        Ok(Tensor::pure(target.to_vec(), inv, c_inv))
    }

    /// The morphism's name.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Source presentation.
    pub fn source(&self) -> &Arc<Presentation> {
        &self.source
    }

    /// Target components.
    pub fn target(&self) -> &[Arc<Presentation>] {
        &self.target
    }

    /// Image of a generator.
    pub fn image(&self, x: Letter) -> &Tensor {
        &self.images[&x]
    }

    /// Image of a (not necessarily normal) word.
    pub fn apply_word(&self, w: &[Letter]) -> Arc<Tensor> {
        if w.is_empty() {
            return Arc::new(Tensor::one(self.target.clone()));
        }
        if let Some(t) = self.memo.read().get(w) {
            return t.clone();
        }
        let n = w.len();
        let result = if n == 1 {
            self.images[&w[0]].clone()
        } else {
            let prefix = self.apply_word(&w[..n - 1]);
            let last = &self.images[&w[n - 1]];
            let prod = if self.anti {
                last.mul(&prefix)
            } else {
                prefix.mul(last)
            };
            prod.expect("images share the target components")
        };
        let result = Arc::new(result);
        self.memo
            .write()
            .insert(Word::from_slice(w), result.clone());
        result
    }

    /// Image of a polynomial (applied word by word, without normalizing the
    /// input first).
    pub fn apply(&self, p: &Poly) -> Tensor {
        let mut out = Tensor::zero(self.target.clone());
        for (w, c) in p.terms() {
            out.add_scaled(&self.apply_word(w), c);
        }
        out
    }

    /// Applies the morphism to leg `i` of a tensor.
    pub fn on_leg(&self, t: &Tensor, i: usize) -> Tensor {
        t.map_leg(i, &self.target, false, |w| (*self.apply_word(w)).clone())
    }

    /// Relations whose two sides have different images, rendered.
    pub fn relation_failures(&self) -> (usize, Vec<String>) {
        let rules = self.source.rules();
        let fails: Vec<String> = rules
            .par_iter()
            .filter_map(|r| {
                let l = self.apply_word(&r.lhs);
                let rt = self.apply(&r.rhs);
                if *l == rt {
                    None
                } else {
                    Some(format!(
                        "relation {}: {} vs {}",
                        self.source.render_rule(r),
                        l.render(),
                        rt.render()
                    ))
                }
            })
            .collect();
        (rules.len(), fails)
    }
}

/// A Hopf algebra: a presentation with coproduct, counit and antipode.
#[derive(Debug)]
pub struct HopfAlgebra {
    pres: Arc<Presentation>,
    delta: Morphism,
    eps: Morphism,
    s: Morphism,
}

impl HopfAlgebra {
    /// Builds the structure maps from generator images. Images of inverse
    /// generators are derived for group-like generators.
    pub fn new(
        pres: Arc<Presentation>,
        coproduct: Vec<(Letter, Tensor)>,
        counit: Vec<(Letter, Scalar)>,
        antipode: Vec<(Letter, Poly)>,
    ) -> Result<Self, HopfError> {
        let two = vec![pres.clone(), pres.clone()];
        let one = vec![pres.clone()];
        let delta = Morphism::new("coproduct", pres.clone(), two, coproduct, false)?;
        let eps_images = counit
            .into_iter()
            .map(|(x, c)| (x, Tensor::one(vec![]).scale(&c)))
            .collect();
        let eps = Morphism::new("counit", pres.clone(), vec![], eps_images, false)?;
        let s_images = antipode
            .into_iter()
            .map(|(x, p)| (x, Tensor::from_polys(one.clone(), &[p])))
            .collect();
        let s = Morphism::new("antipode", pres.clone(), one, s_images, true)?;
        Ok(HopfAlgebra {
            pres,
            delta,
            eps,
            s,
        })
    }

    /// The underlying presentation.
    pub fn pres(&self) -> &Arc<Presentation> {
        &self.pres
    }

    /// The coproduct as a morphism into `H (x) H`.
    pub fn delta(&self) -> &Morphism {
        &self.delta
    }

    /// The counit as a morphism into scalars.
    pub fn counit_map(&self) -> &Morphism {
        &self.eps
    }

    /// The antipode as an anti-morphism into `H`.
    pub fn antipode_map(&self) -> &Morphism {
        &self.s
    }

    /// `[H, H]`.
    pub fn comps2(&self) -> Vec<Arc<Presentation>> {
        vec![self.pres.clone(), self.pres.clone()]
    }

    /// Coproduct of a polynomial.
    pub fn coproduct(&self, p: &Poly) -> Tensor {
        self.delta.apply(p)
    }

    /// Coproduct of a word.
    pub fn coproduct_word(&self, w: &[Letter]) -> Arc<Tensor> {
        self.delta.apply_word(w)
    }

    /// `(Delta (x) id) Delta`, three legs.
    pub fn coproduct2(&self, p: &Poly) -> Tensor {
        self.delta.on_leg(&self.coproduct(p), 0)
    }

    /// Counit of a polynomial.
    pub fn counit(&self, p: &Poly) -> Scalar {
        self.eps.apply(p).coeff(&[])
    }

    /// Counit of a word.
    pub fn counit_word(&self, w: &[Letter]) -> Scalar {
        self.eps.apply_word(w).coeff(&[])
    }

    /// Antipode of a polynomial, in normal form.
    pub fn antipode(&self, p: &Poly) -> Poly {
        tensor_to_poly(&self.s.apply(p))
    }

    /// Antipode of a word, in normal form.
    pub fn antipode_word(&self, w: &[Letter]) -> Poly {
        tensor_to_poly(&self.s.apply_word(w))
    }

    /// `h - eps(h) 1`.
    pub fn augmentation_projection(&self, p: &Poly) -> Poly {
        self.pres.nf(p) - Poly::scalar(self.counit(p))
    }

    /// The right adjoint coaction `h -> h2 (x) S(h1) h3`.
    pub fn adjoint_coaction(&self, p: &Poly) -> Tensor {
        let d2 = self.coproduct2(&self.pres.nf(p));
        let mut out = Tensor::zero(self.comps2());
        for (ws, c) in d2.terms() {
            let left = Poly::word(ws[1].clone());
            let right = self
                .pres
                .mul(&self.antipode_word(&ws[0]), &Poly::word(ws[2].clone()));
            out.add_scaled(&Tensor::from_polys(self.comps2(), &[left, right]), c);
        }
        out
    }

    /// Verifies the Hopf axioms, well-definedness on every relation and the
    /// derived antipode identities on all basis words of length `<= max_len`.
    pub fn check_axioms(&self, max_len: usize) -> Report {
        let name = self.pres.name().to_string();
        let mut rep = Report::new(&format!("Hopf algebra {name}"));
        let words = self.pres.basis_words(max_len);
        let a = self.pres.alphabet();
        let h1 = vec![self.pres.clone()];
        let fails = |f: &(dyn Fn(&Word) -> bool + Sync)| -> Vec<String> {
            let mut v: Vec<(usize, String)> = words
                .par_iter()
                .enumerate()
                .filter(|(_, w)| !f(w))
                .map(|(i, w)| (i, a.render_word(w)))
                .collect();
            v.sort();
            v.into_iter().map(|(_, s)| s).collect()
        };
        let n = words.len();

        let coassoc = fails(&|w| {
            let d = self.coproduct_word(w);
            self.delta.on_leg(&d, 0) == self.delta.on_leg(&d, 1)
        });
        rep.push_failures(
            format!("hopf.coassociativity[{name}]"),
            "(Delta (x) id) Delta = (id (x) Delta) Delta",
            n,
            &coassoc,
        );

        let counit = fails(&|w| {
            let d = self.coproduct_word(w);
            let me = Tensor::from_polys(h1.clone(), &[Poly::word(w.clone())]);
            d.contract_leg(0, |x| self.counit_word(x)) == me
                && d.contract_leg(1, |x| self.counit_word(x)) == me
        });
        rep.push_failures(
            format!("hopf.counit[{name}]"),
            "(eps (x) id) Delta = id = (id (x) eps) Delta",
            n,
            &counit,
        );

        let antipode = fails(&|w| {
            let d = self.coproduct_word(w);
            let unit = Tensor::one(h1.clone()).scale(&self.counit_word(w));
            let left = self.s.on_leg(&d, 0).multiply_legs(0).expect("same algebra");
            let right = self.s.on_leg(&d, 1).multiply_legs(0).expect("same algebra");
            left == unit && right == unit
        });
        rep.push_failures(
            format!("hopf.antipode[{name}]"),
            "S(h1) h2 = eps(h) 1 = h1 S(h2)",
            n,
            &antipode,
        );

        for (label, m) in [
            ("coproduct", &self.delta),
            ("counit", &self.eps),
            ("antipode", &self.s),
        ] {
            let (tested, f) = m.relation_failures();
            rep.push_failures(
                format!("hopf.well-defined.{label}[{name}]"),
                format!("{label} respects every defining relation"),
                tested,
                &f,
            );
        }

        let half: Vec<Word> = words
            .iter()
            .filter(|w| 2 * w.len() <= max_len.max(2))
            .cloned()
            .collect();
        let pairs: Vec<(Word, Word)> = half
            .iter()
            .flat_map(|h| half.iter().map(move |g| (h.clone(), g.clone())))
            .collect();
        let mut anti: Vec<String> = pairs
            .par_iter()
            .filter(|(h, g)| {
                let hg = self
                    .pres
                    .mul(&Poly::word(h.clone()), &Poly::word(g.clone()));
                self.antipode(&hg)
                    != self
                        .pres
                        .mul(&self.antipode_word(g), &self.antipode_word(h))
            })
            .map(|(h, g)| format!("h={}, g={}", a.render_word(h), a.render_word(g)))
            .collect();
        anti.sort();
        rep.push_failures(
            format!("hopf.antipode-anti-multiplicative[{name}]"),
            "S(hg) = S(g) S(h)",
            pairs.len(),
            &anti,
        );

        rep.push(
            format!("hopf.antipode-unit[{name}]"),
            "S(1) = 1",
            self.antipode(&Poly::one()) == Poly::one(),
            "1",
        );

        let flip = fails(&|w| {
            let d = self.coproduct_word(w);
            let lhs = self.s.on_leg(&self.s.on_leg(&d, 0), 1);
            let rhs = self
                .coproduct(&self.antipode_word(w))
                .flip(0)
                .expect("two legs");
            lhs == rhs
        });
        rep.push_failures(
            format!("hopf.antipode-coproduct[{name}]"),
            "(S (x) S) Delta = flip Delta S",
            n,
            &flip,
        );

        let eps_s = fails(&|w| self.counit(&self.antipode_word(w)) == self.counit_word(w));
        rep.push_failures(
            format!("hopf.counit-antipode[{name}]"),
            "eps S = eps",
            n,
            &eps_s,
        );
        rep
    }
}

/// Reads a one-leg tensor as a polynomial.
pub fn tensor_to_poly(t: &Tensor) -> Poly {
    debug_assert_eq!(t.arity(), 1);
    let mut p = Poly::zero();
    for (ws, c) in t.terms() {
        p.add_term(ws[0].clone(), c.clone());
    }
    p
}

/// Coproduct of a polynomial.
pub fn apply_coproduct(h: &Poly, hopf: &HopfAlgebra) -> Tensor {
    hopf.coproduct(h)
}

/// Runs the Hopf axiom suite.
pub fn check_hopf_axioms(hopf: &HopfAlgebra, max_len: usize) -> Report {
    hopf.check_axioms(max_len)
}

/// How generator images extend to words.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    /// Multiplicative.
    Algebra,
    /// Anti-multiplicative.
    AntiAlgebra,
    /// Linear on normal words, with a normal word sent to the product of its
    /// letters' images. The map need not respect products.
    NormalWords,
}

/// How a [`LinearMap`] is evaluated.
#[derive(Clone)]
pub enum MapRule {
    /// The identity of `H` (target must be `H`).
    Identity,
    /// `h -> eps(h) 1`.
    UnitCounit,
    /// The antipode (target must be `H`).
    Antipode,
    /// Generator images with an extension mode.
    Letters {
        /// Image of each generator.
        images: HashMap<Letter, Poly>,
        /// Extension mode.
        mode: Extension,
    },
    /// Images of normal words, extended linearly.
    Table(HashMap<Word, Poly>),
    /// Convolution product of two maps.
    Convolution(Arc<LinearMap>, Arc<LinearMap>),
    /// `then` after `first`; `first` must land in the source of `then`.
    Compose {
        /// Applied first, lands in `H`.
        first: Arc<LinearMap>,
        /// Applied second.
        then: Arc<LinearMap>,
    },
}

/// A linear map from a Hopf algebra to an algebra.
#[derive(Clone)]
pub struct LinearMap {
    name: String,
    source: Arc<HopfAlgebra>,
    target: Arc<Presentation>,
    rule: MapRule,
}

impl std::fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "LinearMap({}: {} -> {})",
            self.name,
            self.source.pres().name(),
            self.target.name()
        )
    }
}

fn same_space(a: &Presentation, b: &Presentation) -> bool {
    std::ptr::eq(a, b) || a.name() == b.name()
}

impl LinearMap {
    /// A map from an explicit rule.
    #[allow(clippy::collapsible_match)]
    pub fn new(
        name: &str,
        source: Arc<HopfAlgebra>,
        target: Arc<Presentation>,
        rule: MapRule,
    ) -> Result<Self, HopfError> {
        match &rule {
            MapRule::Identity | MapRule::Antipode => {
                if !same_space(source.pres(), &target) {
                    return Err(HopfError::SignatureMismatch(format!(
                        "{name}: target {} is not {}",
                        target.name(),
                        source.pres().name()
                    )));
                }
            }
            MapRule::Convolution(f, g) => {
                if !same_space(f.source.pres(), g.source.pres())
                    || !same_space(&f.target, &g.target)
                    || !same_space(&f.target, &target)
                {
                    return Err(HopfError::SignatureMismatch(format!(
                        "{name}: convolution of {:?} and {:?}",
                        f, g
                    )));
                }
            }
            MapRule::Compose { first, then } => {
                if !same_space(&first.target, then.source.pres())
                    || !same_space(&then.target, &target)
                {
                    return Err(HopfError::SignatureMismatch(format!(
                        "{name}: cannot compose {:?} with {:?}",
                        first, then
                    )));
                }
            }
            _ => {}
        }
        Ok(LinearMap {
            name: name.to_string(),
            source,
            target,
            rule,
        })
    }

    /// The identity map of `H`.
    pub fn identity(h: &Arc<HopfAlgebra>) -> Self {
        Self::new("id", h.clone(), h.pres().clone(), MapRule::Identity).expect("identity")
    }

    /// The antipode as a linear map.
    pub fn antipode(h: &Arc<HopfAlgebra>) -> Self {
        Self::new("S", h.clone(), h.pres().clone(), MapRule::Antipode).expect("antipode")
    }

    /// `eta eps` into the given algebra.
    pub fn unit_counit(h: &Arc<HopfAlgebra>, target: Arc<Presentation>) -> Self {
        Self::new("eta.eps", h.clone(), target, MapRule::UnitCounit).expect("unit counit")
    }

    /// A map defined by generator images.
    pub fn letters(
        name: &str,
        h: &Arc<HopfAlgebra>,
        target: Arc<Presentation>,
        images: HashMap<Letter, Poly>,
        mode: Extension,
    ) -> Result<Self, HopfError> {
        for x in h.pres().alphabet().letters() {
            if !images.contains_key(&x) {
                return Err(HopfError::MissingImage(format!(
                    "{name}: generator {}",
                    h.pres().alphabet().letter_name(x)
                )));
            }
        }
        Self::new(name, h.clone(), target, MapRule::Letters { images, mode })
    }

    /// A map defined on normal words.
    pub fn table(
        name: &str,
        h: &Arc<HopfAlgebra>,
        target: Arc<Presentation>,
        images: HashMap<Word, Poly>,
    ) -> Self {
        Self::new(name, h.clone(), target, MapRule::Table(images)).expect("table")
    }

    /// The convolution product `f * g = mu (f (x) g) Delta`.
    pub fn convolution(f: &Arc<LinearMap>, g: &Arc<LinearMap>) -> Result<Self, HopfError> {
        Self::new(
            &format!("({} * {})", f.name, g.name),
            f.source.clone(),
            f.target.clone(),
            MapRule::Convolution(f.clone(), g.clone()),
        )
    }

    /// `then` after `first`.
    pub fn compose(first: &Arc<LinearMap>, then: &Arc<LinearMap>) -> Result<Self, HopfError> {
        Self::new(
            &format!("{}.{}", then.name, first.name),
            first.source.clone(),
            then.target.clone(),
            MapRule::Compose {
                first: first.clone(),
                then: then.clone(),
            },
        )
    }

    /// The map's name.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Source Hopf algebra.
    pub fn source(&self) -> &Arc<HopfAlgebra> {
        &self.source
    }

    /// Target algebra.
    pub fn target(&self) -> &Arc<Presentation> {
        &self.target
    }

    /// Value on a normal word of the source.
    pub fn eval_word(&self, w: &[Letter]) -> Result<Poly, HopfError> {
        let t = &self.target;
        Ok(match &self.rule {
            MapRule::Identity => t.nf_word(w),
            MapRule::UnitCounit => Poly::scalar(self.source.counit_word(w)),
            MapRule::Antipode => self.source.antipode_word(w),
            MapRule::Letters { images, mode } => {
                let mut acc = Poly::one();
                let letters: Vec<Letter> = match mode {
                    Extension::AntiAlgebra => w.iter().rev().copied().collect(),
                    _ => w.to_vec(),
                };
                for x in letters {
                    let img = images.get(&x).ok_or_else(|| {
                        HopfError::MissingImage(format!(
                            "{}: generator {}",
                            self.name,
                            self.source.pres().alphabet().letter_name(x)
                        ))
                    })?;
                    acc = t.mul(&acc, img);
                }
                acc
            }
            MapRule::Table(images) => images.get(w).map(|p| t.nf(p)).ok_or_else(|| {
                HopfError::MissingImage(format!(
                    "{}: word {}",
                    self.name,
                    self.source.pres().alphabet().render_word(w)
                ))
            })?,
            MapRule::Convolution(f, g) => {
                let d = self.source.coproduct_word(w);
                let mut acc = Poly::zero();
                for (ws, c) in d.terms() {
                    let a = f.eval_word(&ws[0])?;
                    let b = g.eval_word(&ws[1])?;
                    acc.add_scaled(&t.mul(&a, &b), c);
                }
                acc
            }
            MapRule::Compose { first, then } => then.eval(&first.eval_word(w)?)?,
        })
    }

    /// Value on a polynomial (normalized in the source first).
    pub fn eval(&self, p: &Poly) -> Result<Poly, HopfError> {
        let p = self.source.pres().nf(p);
        let mut acc = Poly::zero();
        for (w, c) in p.terms() {
            acc.add_scaled(&self.eval_word(w)?, c);
        }
        Ok(acc)
    }

    /// True when the two maps agree on all basis words up to `max_len`.
    pub fn agrees_with(&self, other: &LinearMap, max_len: usize) -> Result<bool, HopfError> {
        for w in self.source.pres().basis_words(max_len) {
            if self.eval_word(&w)? != other.eval_word(&w)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The convolution product of two maps.
pub fn convolution(f: &Arc<LinearMap>, g: &Arc<LinearMap>) -> Result<LinearMap, HopfError> {
    LinearMap::convolution(f, g)
}

/// True when `f * g` and `g * f` both equal `eta eps` on all basis words up
/// to `max_len`.
pub fn convolution_inverse_check(
    f: &Arc<LinearMap>,
    g: &Arc<LinearMap>,
    max_len: usize,
) -> Result<bool, HopfError> {
    let unit = LinearMap::unit_counit(f.source(), f.target().clone());
    let fg = LinearMap::convolution(f, g)?;
    let gf = LinearMap::convolution(g, f)?;
    Ok(fg.agrees_with(&unit, max_len)? && gf.agrees_with(&unit, max_len)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freealg::{word, Generator};
    use crate::rewrite::{mono, PresentationBuilder};

    fn u1(corrupt: bool) -> Arc<HopfAlgebra> {
        let mut b = PresentationBuilder::new("O(U(1))");
        let t = b.generator(Generator::algebra("t").inv()).unwrap();
        let pres = Arc::new(b.build().unwrap());
        let ti = pres.alphabet().inverse(t).unwrap();
        let two = vec![pres.clone(), pres.clone()];
        let s_img = if corrupt {
            Poly::letter(t)
        } else {
            Poly::letter(ti)
        };
        Arc::new(
            HopfAlgebra::new(
                pres.clone(),
                vec![(
                    t,
                    Tensor::pure(two, vec![word(&[t]), word(&[t])], Scalar::one()),
                )],
                vec![(t, Scalar::one())],
                vec![(t, s_img)],
            )
            .unwrap(),
        )
    }

    /// Matrix coproduct on generators a, b, c, d with the given antipode.
    fn matrix_hopf(pres: Arc<Presentation>, s: [Poly; 4]) -> HopfAlgebra {
        let two = vec![pres.clone(), pres.clone()];
        let l = |n: &str| pres.letter(n).unwrap();
        let (a, b, c, d) = (l("alpha"), l("beta"), l("gamma"), l("delta"));
        let pair = |x: Letter, y: Letter| {
            Tensor::pure(two.clone(), vec![word(&[x]), word(&[y])], Scalar::one())
        };
        let co = vec![
            (a, pair(a, a).add(&pair(b, c))),
            (b, pair(a, b).add(&pair(b, d))),
            (c, pair(c, a).add(&pair(d, c))),
            (d, pair(c, b).add(&pair(d, d))),
        ];
        let eps = vec![
            (a, Scalar::one()),
            (b, Scalar::zero()),
            (c, Scalar::zero()),
            (d, Scalar::one()),
        ];
        let [sa, sb, sc, sd] = s;
        HopfAlgebra::new(pres, co, eps, vec![(a, sa), (b, sb), (c, sc), (d, sd)]).unwrap()
    }

    fn suq2() -> Arc<HopfAlgebra> {
        let mut b = PresentationBuilder::new("O_q(SU(2))");
        let be = b.generator(Generator::algebra("beta")).unwrap();
        let g = b.generator(Generator::algebra("gamma")).unwrap();
        let a = b.generator(Generator::algebra("alpha").order(2)).unwrap();
        let d = b.generator(Generator::algebra("delta").order(2)).unwrap();
        let q = Scalar::q;
        b.rule(&[a, be], mono(q(-1), &[be, a]));
        b.rule(&[a, g], mono(q(-1), &[g, a]));
        b.rule(&[d, be], mono(q(1), &[be, d]));
        b.rule(&[d, g], mono(q(1), &[g, d]));
        b.rule(&[g, be], mono(Scalar::one(), &[be, g]));
        b.rule(&[d, a], Poly::one() + mono(q(1), &[be, g]));
        b.rule(&[a, d], Poly::one() + mono(q(-1), &[be, g]));
        let pres = Arc::new(b.build().unwrap());
        Arc::new(matrix_hopf(
            pres,
            [
                Poly::letter(d),
                mono(-q(1), &[be]),
                mono(-q(-1), &[g]),
                Poly::letter(a),
            ],
        ))
    }

    #[test]
    fn u1_axioms_pass_and_corruption_is_caught() {
        let h = u1(false);
        let r = h.check_axioms(4);
        assert!(r.all_passed(), "{}", r.to_text());
        let bad = u1(true);
        let r = bad.check_axioms(4);
        let c = r.get("hopf.antipode[O(U(1))]").unwrap();
        assert!(!c.passed());
        assert!(c.witness.starts_with("t"), "{}", c.witness);
    }

    #[test]
    fn suq2_axioms_pass() {
        let h = suq2();
        let r = h.check_axioms(3);
        assert!(r.all_passed(), "{}", r.to_text());
    }

    #[test]
    fn wrong_antipode_sign_fails() {
        let h = suq2();
        let pres = h.pres().clone();
        let l = |n: &str| pres.letter(n).unwrap();
        let bad = matrix_hopf(
            pres.clone(),
            [
                Poly::letter(l("delta")),
                mono(Scalar::q(1), &[l("beta")]),
                mono(-Scalar::q(-1), &[l("gamma")]),
                Poly::letter(l("alpha")),
            ],
        );
        assert!(!bad.check_axioms(2).all_passed());
    }

    #[test]
    fn coproduct_examples() {
        let h = u1(false);
        let t = h.pres().letter("t").unwrap();
        let d = h.coproduct_word(&[t, t, t]);
        assert_eq!(d.len(), 1);
        assert_eq!(
            d.coeff(&[word(&[t, t, t]), word(&[t, t, t])]),
            Scalar::one()
        );
        assert_eq!(*h.coproduct_word(&[]), Tensor::one(h.comps2()));
        let s = suq2();
        let a = s.pres().letter("alpha").unwrap();
        assert_eq!(s.coproduct_word(&[a]).len(), 2);
    }

    #[test]
    fn convolution_identities() {
        let h = u1(false);
        let id = Arc::new(LinearMap::identity(&h));
        let s = Arc::new(LinearMap::antipode(&h));
        let unit = Arc::new(LinearMap::unit_counit(&h, h.pres().clone()));
        assert!(LinearMap::convolution(&unit, &id)
            .unwrap()
            .agrees_with(&id, 4)
            .unwrap());
        assert!(LinearMap::convolution(&id, &s)
            .unwrap()
            .agrees_with(&unit, 4)
            .unwrap());
        assert!(convolution_inverse_check(&id, &s, 4).unwrap());
        assert!(!convolution_inverse_check(&id, &id, 2).unwrap());
        let ground = Arc::new(Presentation::ground());
        let e = Arc::new(LinearMap::unit_counit(&h, ground));
        assert!(convolution_inverse_check(&e, &e, 3).unwrap());
        // j after S is the convolution inverse of an algebra map j.
        let js = Arc::new(LinearMap::compose(&s, &id).unwrap());
        assert!(convolution_inverse_check(&id, &js, 3).unwrap());
    }

    #[test]
    fn adjoint_coaction_is_a_coaction() {
        let s = suq2();
        let a = s.pres().letter("alpha").unwrap();
        let ad = s.adjoint_coaction(&Poly::letter(a));
        assert!(!ad.is_zero());
        for w in s.pres().basis_words(2) {
            let ad = s.adjoint_coaction(&Poly::word(w.clone()));
            let lhs = ad.map_leg(0, &s.comps2(), false, |v| {
                s.adjoint_coaction(&Poly::word(v.clone()))
            });
            let rhs = s.delta().on_leg(&ad, 1);
            assert_eq!(lhs, rhs, "word {}", s.pres().alphabet().render_word(&w));
        }
    }

    /// A linear map on the words of length `<= max_len`, each sent to a
    /// scalar multiple of one of those words.
    fn random_table(
        name: &str,
        h: &Arc<HopfAlgebra>,
        max_len: usize,
        seeds: &[(usize, i64)],
    ) -> Arc<LinearMap> {
        let words = h.pres().basis_words(max_len);
        let images = words
            .iter()
            .zip(seeds.iter().cycle())
            .map(|(w, (k, c))| {
                let img = Poly::word(words[k % words.len()].clone()).scale(&Scalar::int(*c));
                (w.clone(), img)
            })
            .collect();
        Arc::new(LinearMap::table(name, h, h.pres().clone(), images))
    }

    fn seeds() -> impl Strategy<Value = Vec<(usize, i64)>> {
        proptest::collection::vec((0usize..64, -3i64..4), 1..24)
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn convolution_is_associative_and_unital(f in seeds(), g in seeds(), k in seeds()) {
            for (h, len) in [(u1(false), 4), (suq2(), 2)] {
                let (f, g, k) = (
                    random_table("f", &h, len, &f),
                    random_table("g", &h, len, &g),
                    random_table("k", &h, len, &k),
                );
                let fg = Arc::new(LinearMap::convolution(&f, &g).unwrap());
                let gk = Arc::new(LinearMap::convolution(&g, &k).unwrap());
                let left = LinearMap::convolution(&fg, &k).unwrap();
                let right = LinearMap::convolution(&f, &gk).unwrap();
                prop_assert!(left.agrees_with(&right, len).unwrap());
                let unit = Arc::new(LinearMap::unit_counit(&h, h.pres().clone()));
                prop_assert!(LinearMap::convolution(&unit, &f).unwrap().agrees_with(&f, len).unwrap());
                prop_assert!(LinearMap::convolution(&f, &unit).unwrap().agrees_with(&f, len).unwrap());
            }
        }
    }
}
