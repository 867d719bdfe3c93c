//! Comodule algebras: coactions, coinvariants, cleaving maps, the canonical
//! Galois map and translation map, crossed products, and the passage from a
//! cleft extension to a crossed product.
//!
//! Elements of a balanced tensor product `A (x)_B A` are represented by
//! representatives in `A (x) A`; two representatives are compared by mapping
//! both through the canonical map into `A (x) H`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use parking_lot::RwLock;
use rayon::prelude::*;
use thiserror::Error;

use crate::coeff::Scalar;
use crate::freealg::{Letter, Poly, Tensor, Word};
use crate::hopf::{tensor_to_poly, HopfAlgebra, HopfError, LinearMap, Morphism};
use crate::linalg::{self, LinalgError};
use crate::report::Report;
use crate::rewrite::Presentation;

/// Errors raised by comodule constructions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComoduleError {
    /// A structure map could not be evaluated.
    #[error(transparent)]
    Hopf(#[from] HopfError),
    /// The generator images do not define a coaction.
    #[error("not a coaction: {0}")]
    NotACoaction(String),
    /// A left coaction was given where a right one is needed, or similar.
    #[error("side mismatch: {0}")]
    SideMismatch(String),
    /// An element expected in the base algebra could not be written there.
    #[error("{0} does not lie in the base algebra")]
    NotInBase(String),
    /// Measure and cocycle fail one of the crossed-product conditions.
    #[error("crossed-product data violate {0}")]
    CocycleViolation(String),
}

/// Which side the coalgebra leg sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `A -> H (x) A`.
    Left,
    /// `A -> A (x) H`.
    Right,
}

/// A coalgebra acting as the structure object of a coaction.
pub trait Coalgebra: Send + Sync {
    /// The underlying graded algebra.
    fn space(&self) -> &Arc<Presentation>;
    /// Applies the comultiplication to leg `i`, producing two legs.
    fn comultiply_leg(&self, t: &Tensor, i: usize) -> Tensor;
    /// Contracts leg `i` with the counit.
    fn counit_leg(&self, t: &Tensor, i: usize) -> Tensor;
}

impl Coalgebra for HopfAlgebra {
    fn space(&self) -> &Arc<Presentation> {
        self.pres()
    }

    fn comultiply_leg(&self, t: &Tensor, i: usize) -> Tensor {
        self.delta().on_leg(t, i)
    }

    fn counit_leg(&self, t: &Tensor, i: usize) -> Tensor {
        t.contract_leg(i, |w| self.counit_word(w))
    }
}

/// Collects rendered failures of `f` over `items` in parallel, in order.
pub(crate) fn collect_failures<T, F>(items: &[T], f: F) -> Vec<String>
where
    T: Sync,
    F: Fn(&T) -> Result<Option<String>, String> + Sync,
{
    items
        .par_iter()
        .filter_map(|x| match f(x) {
            Ok(r) => r,
            Err(e) => Some(e),
        })
        .collect()
}

/// Pairs of words whose lengths add up to at most `max_len`.
pub(crate) fn bounded_pairs(words: &[Word], max_len: usize) -> Vec<(Word, Word)> {
    let mut out = Vec::new();
    for a in words {
        for b in words {
            if a.len() + b.len() <= max_len {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

/// An algebra map `A -> A (x) C` (or `C (x) A`) defined on generators.
pub struct Coaction {
    name: String,
    side: Side,
    map: Morphism,
    coalg: Arc<dyn Coalgebra>,
}

impl std::fmt::Debug for Coaction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Coaction")
            .field("name", &self.name)
            .field("side", &self.side)
            .field("source", &self.map.source().name())
            .finish()
    }
}

impl Coaction {
    /// Builds a coaction from generator images and checks coassociativity
    /// and counitality on every generator.
    pub fn new(
        name: &str,
        side: Side,
        source: Arc<Presentation>,
        coalg: Arc<dyn Coalgebra>,
        images: Vec<(Letter, Tensor)>,
    ) -> Result<Self, ComoduleError> {
        let target = match side {
            Side::Right => vec![source.clone(), coalg.space().clone()],
            Side::Left => vec![coalg.space().clone(), source.clone()],
        };
        let map = Morphism::new(name, source.clone(), target, images, false)?;
        let c = Coaction {
            name: name.to_string(),
            side,
            map,
            coalg,
        };
        for x in source.alphabet().letters() {
            if let Some(f) = c
                .coassociativity_defect(&[x])
                .or_else(|| c.counit_defect(&[x]))
            {
                return Err(ComoduleError::NotACoaction(format!("{name}: {f}")));
            }
        }
        Ok(c)
    }

    /// A right coaction of a Hopf algebra.
    pub fn right(
        name: &str,
        source: Arc<Presentation>,
        hopf: &Arc<HopfAlgebra>,
        images: Vec<(Letter, Tensor)>,
    ) -> Result<Self, ComoduleError> {
        let coalg: Arc<dyn Coalgebra> = hopf.clone();
        Self::new(name, Side::Right, source, coalg, images)
    }

    /// The coproduct of `H` viewed as a right coaction of `H` on itself.
    pub fn regular(hopf: &Arc<HopfAlgebra>) -> Self {
        let pres = hopf.pres();
        let images = pres
            .alphabet()
            .letters()
            .map(|x| (x, hopf.delta().image(x).clone()))
            .collect();
        Self::right("coproduct", pres.clone(), hopf, images).expect("the coproduct is a coaction")
    }

    /// The coaction's name.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Left or right.
    pub fn side(&self) -> Side {
        self.side
    }

    /// The comodule algebra.
    pub fn source(&self) -> &Arc<Presentation> {
        self.map.source()
    }

    /// The coalgebra's underlying algebra.
    pub fn coalgebra_space(&self) -> &Arc<Presentation> {
        self.coalg.space()
    }

    /// The structure coalgebra.
    pub fn coalgebra(&self) -> &Arc<dyn Coalgebra> {
        &self.coalg
    }

    /// The underlying algebra map.
    pub fn morphism(&self) -> &Morphism {
        &self.map
    }

    /// Target components, `[A, C]` or `[C, A]`.
    pub fn target(&self) -> Vec<Arc<Presentation>> {
        self.map.target().to_vec()
    }

    /// Image of a word.
    pub fn apply_word(&self, w: &[Letter]) -> Arc<Tensor> {
        self.map.apply_word(w)
    }

    /// Image of a polynomial.
    pub fn apply(&self, p: &Poly) -> Tensor {
        self.map.apply(p)
    }

    /// `p (x) 1` or `1 (x) p`.
    pub fn trivial(&self, p: &Poly) -> Tensor {
        match self.side {
            Side::Right => Tensor::from_polys(self.target(), &[p.clone(), Poly::one()]),
            Side::Left => Tensor::from_polys(self.target(), &[Poly::one(), p.clone()]),
        }
    }

    /// True when the coaction fixes `p` (as `p (x) 1` or `1 (x) p`).
    pub fn is_coinvariant(&self, p: &Poly) -> bool {
        self.apply(p) == self.trivial(p)
    }

    fn render_word(&self, w: &[Letter]) -> String {
        self.source().alphabet().render_word(w)
    }

    /// A rendered failure of coassociativity on `w`, if any.
    pub fn coassociativity_defect(&self, w: &[Letter]) -> Option<String> {
        let t = self.apply_word(w);
        let (lhs, rhs) = match self.side {
            Side::Right => (self.map.on_leg(&t, 0), self.coalg.comultiply_leg(&t, 1)),
            Side::Left => (self.map.on_leg(&t, 1), self.coalg.comultiply_leg(&t, 0)),
        };
        (lhs != rhs).then(|| {
            format!(
                "{}: {} vs {}",
                self.render_word(w),
                lhs.render(),
                rhs.render()
            )
        })
    }

    /// A rendered failure of counitality on `w`, if any.
    pub fn counit_defect(&self, w: &[Letter]) -> Option<String> {
        let t = self.apply_word(w);
        let leg = match self.side {
            Side::Right => 1,
            Side::Left => 0,
        };
        let got = self.coalg.counit_leg(&t, leg);
        let want = Tensor::from_polys(
            vec![self.source().clone()],
            &[Poly::word(Word::from_slice(w))],
        );
        (got != want).then(|| format!("{}: {}", self.render_word(w), got.render()))
    }

    /// Coassociativity, counitality and well-definedness on basis words of
    /// length `<= max_len`.
    pub fn check(&self, max_len: usize) -> Report {
        let tag = format!("{}[{}]", self.name, self.source().name());
        let mut rep = Report::new(&format!("coaction {tag}"));
        let words = self.source().basis_words(max_len);
        let f = collect_failures(&words, |w| Ok(self.coassociativity_defect(w)));
        rep.push_failures(
            format!("coaction.coassociativity[{tag}]"),
            "coaction then coaction equals coaction then comultiplication",
            words.len(),
            &f,
        );
        let f = collect_failures(&words, |w| Ok(self.counit_defect(w)));
        rep.push_failures(
            format!("coaction.counit[{tag}]"),
            "counit on the coalgebra leg recovers the element",
            words.len(),
            &f,
        );
        let (n, f) = self.map.relation_failures();
        rep.push_failures(
            format!("coaction.well-defined[{tag}]"),
            "both sides of every relation have equal images",
            n,
            &f,
        );
        rep
    }

    /// A basis of the coinvariant elements spanned by basis words of length
    /// `<= max_len`, by exact kernel computation.
    pub fn coinvariants(&self, max_len: usize) -> Vec<Poly> {
        let words = self.source().basis_words(max_len);
        let images: Vec<BTreeMap<Vec<Word>, Scalar>> = words
            .par_iter()
            .map(|w| {
                let p = Poly::word(w.clone());
                self.apply(&p).sub(&self.trivial(&p)).as_map().clone()
            })
            .collect();
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
}

/// Coinvariant basis at bounded length.
pub fn coinvariants(coact: &Coaction, max_len: usize) -> Vec<Poly> {
    coact.coinvariants(max_len)
}

/// A cleaving map `j: H -> A` with its convolution inverse.
#[derive(Clone, Debug)]
pub struct Cleaving {
    coaction: Arc<Coaction>,
    hopf: Arc<HopfAlgebra>,
    j: Arc<LinearMap>,
    jinv: Arc<LinearMap>,
}

impl Cleaving {
    /// Bundles a right coaction with candidate maps `j` and `j^-1`.
    pub fn new(
        coaction: Arc<Coaction>,
        hopf: Arc<HopfAlgebra>,
        j: Arc<LinearMap>,
        jinv: Arc<LinearMap>,
    ) -> Result<Self, ComoduleError> {
        if coaction.side() != Side::Right {
            return Err(ComoduleError::SideMismatch(format!(
                "cleaving needs a right coaction, {} is left",
                coaction.name()
            )));
        }
        let a = coaction.source().name();
        for m in [&j, &jinv] {
            if m.target().name() != a || m.source().pres().name() != hopf.pres().name() {
                return Err(ComoduleError::Hopf(HopfError::SignatureMismatch(format!(
                    "{} must map {} to {a}",
                    m.name(),
                    hopf.pres().name()
                ))));
            }
        }
        Ok(Cleaving {
            coaction,
            hopf,
            j,
            jinv,
        })
    }

    /// `H` over the ground field, with `j = id` and `j^-1 = S`.
    pub fn self_bundle(hopf: &Arc<HopfAlgebra>) -> Self {
        let coaction = Arc::new(Coaction::regular(hopf));
        let j = Arc::new(LinearMap::identity(hopf));
        let jinv = Arc::new(LinearMap::antipode(hopf));
        Self::new(coaction, hopf.clone(), j, jinv).expect("self bundle")
    }

    /// The coaction.
    pub fn coaction(&self) -> &Arc<Coaction> {
        &self.coaction
    }

    /// The Hopf algebra.
    pub fn hopf(&self) -> &Arc<HopfAlgebra> {
        &self.hopf
    }

    /// The cleaving map.
    pub fn j(&self) -> &Arc<LinearMap> {
        &self.j
    }

    /// Its convolution inverse.
    pub fn jinv(&self) -> &Arc<LinearMap> {
        &self.jinv
    }

    /// The total algebra `A`.
    pub fn total(&self) -> &Arc<Presentation> {
        self.coaction.source()
    }

    fn aa(&self) -> Vec<Arc<Presentation>> {
        vec![self.total().clone(), self.total().clone()]
    }

    fn ah(&self) -> Vec<Arc<Presentation>> {
        self.coaction.target()
    }

    fn render_h(&self, w: &[Letter]) -> String {
        self.hopf.pres().alphabet().render_word(w)
    }

    fn render_a(&self, w: &[Letter]) -> String {
        self.total().alphabet().render_word(w)
    }

    /// `a a'_0 (x) a'_1` on a representative in `A (x) A`.
    pub fn chi(&self, x: &Tensor) -> Tensor {
        galois_chi(x, &self.coaction)
    }

    /// `a j^-1(h_1) (x) j(h_2)`, a representative of the inverse image of
    /// `a (x) h` under the canonical map.
    pub fn chi_inverse(&self, y: &Tensor) -> Result<Tensor, ComoduleError> {
        let a = self.total();
        let mut out = Tensor::zero(self.aa());
        for (ws, c) in y.terms() {
            let d = self.hopf.coproduct_word(&ws[1]);
            for (hs, e) in d.terms() {
                let left = a.mul(&Poly::word(ws[0].clone()), &self.jinv.eval_word(&hs[0])?);
                let right = self.j.eval_word(&hs[1])?;
                out.add_scaled(&Tensor::from_polys(self.aa(), &[left, right]), &(c * e));
            }
        }
        Ok(out)
    }

    /// The translation map `h -> h<1> (x) h<2>`, the inverse image of `1 (x) h`.
    pub fn translation(&self, h: &Poly) -> Result<Tensor, ComoduleError> {
        let y = Tensor::from_polys(self.ah(), &[Poly::one(), h.clone()]);
        self.chi_inverse(&y)
    }

    /// Replaces leg `i` (an `H` word) by `j` or `j^-1` of it.
    fn cleave_leg(&self, t: &Tensor, i: usize, inverse: bool) -> Result<Tensor, ComoduleError> {
        let map = if inverse { &self.jinv } else { &self.j };
        let mut err = None;
        let out = t.map_leg_poly(i, self.total(), false, |w| match map.eval_word(w) {
            Ok(p) => p,
            Err(e) => {
                err.get_or_insert(e);
                Poly::zero()
            }
        });
        match err {
            Some(e) => Err(e.into()),
            None => Ok(out),
        }
    }

    /// `sum a_0 j^-1(a_1)`, which lies in the coinvariants for a cleaving map.
    pub fn coinvariant_part(&self, a: &Poly) -> Result<Poly, ComoduleError> {
        let t = self.coaction.apply(a);
        let t = self.cleave_leg(&t, 1, true)?;
        Ok(tensor_to_poly(&t.multiply_legs(0).expect("same algebra")))
    }

    /// Colinearity, convolution invertibility and the structural properties
    /// of a cleaving map on basis words of length `<= max_len`.
    pub fn check(&self, max_len: usize) -> Report {
        let mut rep = Report::new(&format!(
            "cleaving {} for {}",
            self.j.name(),
            self.total().name()
        ));
        let hw = self.hopf.pres().basis_words(max_len);
        let aw = self.total().basis_words(max_len);
        let a = self.total().clone();
        let err = |e: ComoduleError| e.to_string();

        let f = collect_failures(&hw, |h| {
            let lhs = self
                .coaction
                .apply(&self.j.eval_word(h).map_err(|e| e.to_string())?);
            let rhs = self
                .cleave_leg(&self.hopf.coproduct_word(h), 0, false)
                .map_err(err)?;
            Ok((lhs != rhs)
                .then(|| format!("{}: {} vs {}", self.render_h(h), lhs.render(), rhs.render())))
        });
        rep.push_failures(
            "cleft.colinear",
            "coaction after j equals (j (x) id) after coproduct",
            hw.len(),
            &f,
        );

        let conv_defect =
            |f1: &LinearMap, f2: &LinearMap, h: &Word| -> Result<Option<String>, String> {
                let d = self.hopf.coproduct_word(h);
                let mut acc = Poly::zero();
                for (ws, c) in d.terms() {
                    let x = f1.eval_word(&ws[0]).map_err(|e| e.to_string())?;
                    let y = f2.eval_word(&ws[1]).map_err(|e| e.to_string())?;
                    acc.add_scaled(&a.mul(&x, &y), c);
                }
                let want = Poly::scalar(self.hopf.counit_word(h));
                Ok((acc != want).then(|| {
                    format!(
                        "{} * {} at {}: {}",
                        f1.name(),
                        f2.name(),
                        self.render_h(h),
                        a.render(&acc)
                    )
                }))
            };
        let f = collect_failures(&hw, |h| {
            Ok(conv_defect(&self.j, &self.jinv, h)?.or(conv_defect(&self.jinv, &self.j, h)?))
        });
        rep.push_failures(
            "cleft.convolution-inverse",
            "j * j^-1 = j^-1 * j = unit counit",
            hw.len(),
            &f,
        );

        let f = collect_failures(&hw, |h| {
            let lhs = self
                .coaction
                .apply(&self.jinv.eval_word(h).map_err(|e| e.to_string())?);
            let d = self.hopf.coproduct_word(h);
            let mut rhs = Tensor::zero(self.ah());
            for (ws, c) in d.terms() {
                let x = self.jinv.eval_word(&ws[1]).map_err(|e| e.to_string())?;
                let s = self.hopf.antipode_word(&ws[0]);
                rhs.add_scaled(&Tensor::from_polys(self.ah(), &[x, s]), c);
            }
            Ok((lhs != rhs)
                .then(|| format!("{}: {} vs {}", self.render_h(h), lhs.render(), rhs.render())))
        });
        rep.push_failures(
            "cleft.inverse-twisted-colinear",
            "coaction of j^-1(h) is j^-1(h2) (x) S(h1)",
            hw.len(),
            &f,
        );

        let f = collect_failures(&aw, |w| {
            let x = self.coinvariant_part(&Poly::word(w.clone())).map_err(err)?;
            Ok((!self.coaction.is_coinvariant(&x))
                .then(|| format!("{}: {}", self.render_a(w), a.render(&x))))
        });
        rep.push_failures(
            "cleft.coinvariant-part",
            "a0 j^-1(a1) is coinvariant",
            aw.len(),
            &f,
        );

        let unit_check = || -> Result<Option<String>, String> {
            let j1 = self.j.eval_word(&[]).map_err(|e| e.to_string())?;
            let ji1 = self.jinv.eval_word(&[]).map_err(|e| e.to_string())?;
            let p1 = a.mul(&j1, &ji1);
            let p2 = a.mul(&ji1, &j1);
            Ok((p1 != Poly::one() || p2 != Poly::one())
                .then(|| format!("j(1) = {}, j^-1(1) = {}", a.render(&j1), a.render(&ji1))))
        };
        let f: Vec<String> = match unit_check() {
            Ok(x) => x.into_iter().collect(),
            Err(e) => vec![e],
        };
        rep.push_failures(
            "cleft.unit-invertible",
            "j(1) is invertible with inverse j^-1(1)",
            1,
            &f,
        );

        let f = self.normalized_failures(&hw);
        rep.push_failures(
            "cleft.normalized",
            "j^-1(1) j is unital, colinear and convolution invertible",
            hw.len(),
            &f,
        );

        let pairs = bounded_pairs(&hw, max_len);
        let h = self.hopf.pres().clone();
        let not_mult = pairs.iter().find_map(|(x, y)| {
            let lhs = self
                .j
                .eval(&h.nf_word(&crate::freealg::concat(x, y)))
                .ok()?;
            let rhs = a.mul(&self.j.eval_word(x).ok()?, &self.j.eval_word(y).ok()?);
            (lhs != rhs).then(|| format!("({}, {})", self.render_h(x), self.render_h(y)))
        });
        match not_mult {
            Some(w) => rep.push(
                "cleft.anti-multiplicative-inverse",
                "j^-1 reverses products when j is multiplicative",
                true,
                format!("not applicable: j is not multiplicative at {w}"),
            ),
            None => {
                let f = collect_failures(&pairs, |(x, y)| {
                    let lhs = self
                        .jinv
                        .eval(&h.nf_word(&crate::freealg::concat(x, y)))
                        .map_err(|e| e.to_string())?;
                    let jx = self.jinv.eval_word(x).map_err(|e| e.to_string())?;
                    let jy = self.jinv.eval_word(y).map_err(|e| e.to_string())?;
                    let rhs = a.mul(&jy, &jx);
                    Ok((lhs != rhs)
                        .then(|| format!("({}, {})", self.render_h(x), self.render_h(y))))
                });
                rep.push_failures(
                    "cleft.anti-multiplicative-inverse",
                    "j^-1 reverses products when j is multiplicative",
                    pairs.len(),
                    &f,
                );
            }
        }
        rep
    }

    fn normalized_failures(&self, hw: &[Word]) -> Vec<String> {
        let a = self.total().clone();
        let (j1, ji1) = match (self.j.eval_word(&[]), self.jinv.eval_word(&[])) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(e), _) | (_, Err(e)) => return vec![e.to_string()],
        };
        let jn = |h: &[Letter]| -> Result<Poly, String> {
            Ok(a.mul(&ji1, &self.j.eval_word(h).map_err(|e| e.to_string())?))
        };
        let jn_inv = |h: &[Letter]| -> Result<Poly, String> {
            Ok(a.mul(&self.jinv.eval_word(h).map_err(|e| e.to_string())?, &j1))
        };
        let mut out = Vec::new();
        match jn(&[]) {
            Ok(p) if p == Poly::one() => {}
            Ok(p) => out.push(format!("normalized j(1) = {}", a.render(&p))),
            Err(e) => out.push(e),
        }
        out.extend(collect_failures(hw, |h| {
            let img = jn(h)?;
            let lhs = self.coaction.apply(&img);
            let d = self.hopf.coproduct_word(h);
            let mut rhs = Tensor::zero(self.ah());
            let mut left = Poly::zero();
            let mut right = Poly::zero();
            for (ws, c) in d.terms() {
                rhs.add_scaled(
                    &Tensor::from_polys(self.ah(), &[jn(&ws[0])?, Poly::word(ws[1].clone())]),
                    c,
                );
                left.add_scaled(&a.mul(&jn(&ws[0])?, &jn_inv(&ws[1])?), c);
                right.add_scaled(&a.mul(&jn_inv(&ws[0])?, &jn(&ws[1])?), c);
            }
            let unit = Poly::scalar(self.hopf.counit_word(h));
            if lhs != rhs {
                return Ok(Some(format!("colinearity at {}", self.render_h(h))));
            }
            Ok((left != unit || right != unit)
                .then(|| format!("convolution inverse at {}", self.render_h(h))))
        }));
        out
    }

    /// Galois round trips: `chi(chi^-1(a (x) h)) = a (x) h` and
    /// `chi(chi^-1(chi(x))) = chi(x)` on bounded tuples.
    pub fn check_galois(&self, max_len: usize) -> Report {
        let mut rep = Report::new(&format!("canonical map for {}", self.total().name()));
        let aw = self.total().basis_words(max_len);
        let hw = self.hopf.pres().basis_words(max_len);
        let mut ah_pairs = Vec::new();
        for a in &aw {
            for h in &hw {
                if a.len() + h.len() <= max_len {
                    ah_pairs.push((a.clone(), h.clone()));
                }
            }
        }
        let f = collect_failures(&ah_pairs, |(a, h)| {
            let y = Tensor::pure(self.ah(), vec![a.clone(), h.clone()], Scalar::one());
            let back = self.chi(&self.chi_inverse(&y).map_err(|e| e.to_string())?);
            Ok((back != y).then(|| {
                format!(
                    "{} (x) {}: {}",
                    self.render_a(a),
                    self.render_h(h),
                    back.render()
                )
            }))
        });
        rep.push_failures(
            "galois.right-inverse",
            "chi after chi^-1 is the identity",
            ah_pairs.len(),
            &f,
        );
        let aa_pairs = bounded_pairs(&aw, max_len);
        let f = collect_failures(&aa_pairs, |(a, b)| {
            let x = Tensor::pure(self.aa(), vec![a.clone(), b.clone()], Scalar::one());
            let cx = self.chi(&x);
            let again = self.chi(&self.chi_inverse(&cx).map_err(|e| e.to_string())?);
            Ok((again != cx).then(|| format!("{} (x) {}", self.render_a(a), self.render_a(b))))
        });
        rep.push_failures(
            "galois.left-inverse",
            "chi^-1 after chi is the identity modulo the balanced relation",
            aa_pairs.len(),
            &f,
        );
        rep
    }

    /// The five translation-map identities on basis words of length
    /// `<= max_len`, compared through the canonical map.
    pub fn check_translation_map(&self, max_len: usize) -> Report {
        let mut rep = Report::new(&format!("translation map for {}", self.total().name()));
        let hp = self.hopf.pres().clone();
        let a = self.total().clone();
        let hw = hp.basis_words(max_len);
        let aw = a.basis_words(max_len);
        let kappa = |h: &Poly| self.translation(h).map_err(|e| e.to_string());

        let f = collect_failures(&hw, |h| {
            let hp1 = Poly::word(h.clone());
            let got = self.chi(&kappa(&hp1)?);
            let want = Tensor::from_polys(self.ah(), &[Poly::one(), hp1]);
            Ok((got != want).then(|| format!("{}: {}", self.render_h(h), got.render())))
        });
        rep.push_failures(
            "translation.section",
            "chi(kappa(h)) = 1 (x) h",
            hw.len(),
            &f,
        );

        let f = collect_failures(&aw, |w| {
            let t = self.coaction.apply_word(w);
            let mut x = Tensor::zero(self.aa());
            for (ws, c) in t.terms() {
                let k = kappa(&Poly::word(ws[1].clone()))?;
                let left = Tensor::from_polys(self.aa(), &[Poly::word(ws[0].clone()), Poly::one()]);
                x.add_scaled(&left.mul(&k).expect("same space"), c);
            }
            let got = self.chi(&x);
            let want = self.chi(&Tensor::from_polys(
                self.aa(),
                &[Poly::one(), Poly::word(w.clone())],
            ));
            Ok((got != want).then(|| format!("{}: {}", self.render_a(w), got.render())))
        });
        rep.push_failures(
            "translation.recovers-element",
            "a0 kappa(a1) = 1 (x)_B a",
            aw.len(),
            &f,
        );

        let pairs = bounded_pairs(&hw, max_len);
        let f = collect_failures(&pairs, |(x, y)| {
            let lhs = kappa(&hp.nf_word(&crate::freealg::concat(x, y)))?;
            let kx = kappa(&Poly::word(x.clone()))?;
            let ky = kappa(&Poly::word(y.clone()))?;
            let mut rhs = Tensor::zero(self.aa());
            for (xs, c) in kx.terms() {
                for (ys, d) in ky.terms() {
                    let left = a.mul(&Poly::word(ys[0].clone()), &Poly::word(xs[0].clone()));
                    let right = a.mul(&Poly::word(xs[1].clone()), &Poly::word(ys[1].clone()));
                    rhs.add_scaled(&Tensor::from_polys(self.aa(), &[left, right]), &(c * d));
                }
            }
            let (l, r) = (self.chi(&lhs), self.chi(&rhs));
            Ok((l != r).then(|| format!("({}, {})", self.render_h(x), self.render_h(y))))
        });
        rep.push_failures(
            "translation.multiplicative",
            "kappa(h h') = h'<1> h<1> (x) h<2> h'<2>",
            pairs.len(),
            &f,
        );

        let f = collect_failures(&hw, |h| {
            let k = kappa(&Poly::word(h.clone()))?;
            let prod = tensor_to_poly(&k.multiply_legs(0).expect("same algebra"));
            let want = Poly::scalar(self.hopf.counit_word(h));
            Ok((prod != want).then(|| format!("{}: {}", self.render_h(h), a.render(&prod))))
        });
        rep.push_failures("translation.counit", "h<1> h<2> = eps(h) 1", hw.len(), &f);

        let f = collect_failures(&hw, |h| {
            let k = kappa(&Poly::word(h.clone()))?;
            let m = self.coaction.morphism();
            let t = m.on_leg(&m.on_leg(&k, 1), 1);
            let got = t.multiply_legs(0).expect("same algebra");
            let want = self
                .hopf
                .coproduct_word(h)
                .map_leg_poly(0, &hp, false, |w| Poly::word(w.clone()));
            let mut expect = Tensor::zero(vec![a.clone(), hp.clone(), hp.clone()]);
            for (ws, c) in want.terms() {
                let p = Tensor::from_polys(
                    expect.comps().to_vec(),
                    &[
                        Poly::one(),
                        Poly::word(ws[0].clone()),
                        Poly::word(ws[1].clone()),
                    ],
                );
                expect.add_scaled(&p, c);
            }
            Ok((got != expect).then(|| format!("{}: {}", self.render_h(h), got.render())))
        });
        rep.push_failures(
            "translation.colinear",
            "h<1> (x) coaction(h<2>) = kappa(h1) (x) h2",
            hw.len(),
            &f,
        );
        rep
    }
}

/// The lifted canonical map `A (x) A -> A (x) H`, `a (x) a' -> a a'_0 (x) a'_1`.
pub fn galois_chi(x: &Tensor, coact: &Coaction) -> Tensor {
    let t = coact.morphism().on_leg(x, 1);
    t.multiply_legs(0).expect("legs share the total algebra")
}

/// `a j^-1(h_1) (x) j(h_2)`.
pub fn galois_chi_inverse_cleft(y: &Tensor, cleaving: &Cleaving) -> Result<Tensor, ComoduleError> {
    cleaving.chi_inverse(y)
}

/// `kappa(h) = chi^-1(1 (x) h)`.
pub fn translation_map(h: &Poly, cleaving: &Cleaving) -> Result<Tensor, ComoduleError> {
    cleaving.translation(h)
}

/// Runs the cleaving checks.
pub fn check_cleaving(cleaving: &Cleaving, max_len: usize) -> Report {
    cleaving.check(max_len)
}

/// A weak action of `H` on `B` together with a normalized 2-cocycle and its
/// convolution inverse.
pub trait CrossedData: Send + Sync {
    /// The algebra being acted on.
    fn base(&self) -> &Arc<Presentation>;
    /// The acting Hopf algebra.
    fn hopf(&self) -> &Arc<HopfAlgebra>;
    /// `h . b` for normal words.
    fn act_word(&self, h: &[Letter], b: &[Letter]) -> Result<Poly, ComoduleError>;
    /// `sigma(h (x) k)` for normal words.
    fn cocycle_word(&self, h: &[Letter], k: &[Letter]) -> Result<Poly, ComoduleError>;
    /// `sigma^-1(h (x) k)` for normal words.
    fn cocycle_inv_word(&self, h: &[Letter], k: &[Letter]) -> Result<Poly, ComoduleError>;
}

/// `h . b`, extended bilinearly.
pub fn act(data: &dyn CrossedData, h: &Poly, b: &Poly) -> Result<Poly, ComoduleError> {
    let (hh, bb) = (data.hopf().pres().nf(h), data.base().nf(b));
    let mut out = Poly::zero();
    for (x, c) in hh.terms() {
        for (y, d) in bb.terms() {
            out.add_scaled(&data.act_word(x, y)?, &(c * d));
        }
    }
    Ok(out)
}

fn bilinear<F>(data: &dyn CrossedData, h: &Poly, k: &Poly, f: F) -> Result<Poly, ComoduleError>
where
    F: Fn(&[Letter], &[Letter]) -> Result<Poly, ComoduleError>,
{
    let hp = data.hopf().pres();
    let (hh, kk) = (hp.nf(h), hp.nf(k));
    let mut out = Poly::zero();
    for (x, c) in hh.terms() {
        for (y, d) in kk.terms() {
            out.add_scaled(&f(x, y)?, &(c * d));
        }
    }
    Ok(out)
}

/// `sigma(h (x) k)`, extended bilinearly.
pub fn sigma(data: &dyn CrossedData, h: &Poly, k: &Poly) -> Result<Poly, ComoduleError> {
    bilinear(data, h, k, |x, y| data.cocycle_word(x, y))
}

/// `sigma^-1(h (x) k)`, extended bilinearly.
pub fn sigma_inv(data: &dyn CrossedData, h: &Poly, k: &Poly) -> Result<Poly, ComoduleError> {
    bilinear(data, h, k, |x, y| data.cocycle_inv_word(x, y))
}

/// Crossed data with trivial cocycle and a module action given on
/// generator pairs (default: `x . y = eps(x) y`).
pub struct SmashData {
    base: Arc<Presentation>,
    hopf: Arc<HopfAlgebra>,
    table: HashMap<(Letter, Letter), Poly>,
}

impl SmashData {
    /// The trivial action.
    pub fn trivial(base: Arc<Presentation>, hopf: Arc<HopfAlgebra>) -> Self {
        SmashData {
            base,
            hopf,
            table: HashMap::new(),
        }
    }

    /// An action given by `x . y` for `H` generators `x` and `B` generators
    /// `y`; missing pairs act through the counit.
    pub fn with_action(
        base: Arc<Presentation>,
        hopf: Arc<HopfAlgebra>,
        table: HashMap<(Letter, Letter), Poly>,
    ) -> Self {
        SmashData { base, hopf, table }
    }
}

impl CrossedData for SmashData {
    fn base(&self) -> &Arc<Presentation> {
        &self.base
    }

    fn hopf(&self) -> &Arc<HopfAlgebra> {
        &self.hopf
    }

    fn act_word(&self, h: &[Letter], b: &[Letter]) -> Result<Poly, ComoduleError> {
        if b.is_empty() {
            return Ok(Poly::scalar(self.hopf.counit_word(h)));
        }
        if h.is_empty() {
            return Ok(self.base.nf_word(b));
        }
        if h.len() > 1 {
            let inner = self.act_word(&h[h.len() - 1..], b)?;
            return act(
                self,
                &Poly::word(Word::from_slice(&h[..h.len() - 1])),
                &inner,
            );
        }
        let x = h[0];
        if b.len() == 1 {
            return Ok(match self.table.get(&(x, b[0])) {
                Some(p) => self.base.nf(p),
                None => self.base.nf_word(b).scale(&self.hopf.counit_word(h)),
            });
        }
        let d = self.hopf.coproduct_word(h);
        let mut out = Poly::zero();
        for (ws, c) in d.terms() {
            let l = self.act_word(&ws[0], &b[..1])?;
            let r = self.act_word(&ws[1], &b[1..])?;
            out.add_scaled(&self.base.mul(&l, &r), c);
        }
        Ok(out)
    }

    fn cocycle_word(&self, h: &[Letter], k: &[Letter]) -> Result<Poly, ComoduleError> {
        Ok(Poly::scalar(
            &self.hopf.counit_word(h) * &self.hopf.counit_word(k),
        ))
    }

    fn cocycle_inv_word(&self, h: &[Letter], k: &[Letter]) -> Result<Poly, ComoduleError> {
        self.cocycle_word(h, k)
    }
}

/// Measure and cocycle induced by a cleaving map, computed in the total
/// algebra and written back in a presentation of the coinvariants.
pub struct CleftData {
    cleaving: Arc<Cleaving>,
    base: Arc<Presentation>,
    embed: Morphism,
    columns: RwLock<(usize, Vec<(Word, BTreeMap<Word, Scalar>)>)>,
    memo: RwLock<HashMap<(u8, Word, Word), Poly>>,
}

impl std::fmt::Debug for CleftData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CleftData")
            .field("base", &self.base.name())
            .finish()
    }
}

impl CleftData {
    /// `base` is a presentation of the coinvariants, embedded into the
    /// total algebra by `embedding` (generator images). Elements are written
    /// back in `base` using its basis words of length at least `base_len`,
    /// and up to the length of the element when that is larger.
    pub fn new(
        cleaving: Arc<Cleaving>,
        base: Arc<Presentation>,
        embedding: Vec<(Letter, Poly)>,
        base_len: usize,
    ) -> Result<Self, ComoduleError> {
        let a = cleaving.total().clone();
        let images: Vec<(Letter, Tensor)> = embedding
            .into_iter()
            .map(|(x, p)| (x, Tensor::from_polys(vec![a.clone()], &[p])))
            .collect();
        let embed = Morphism::new("embedding", base.clone(), vec![a.clone()], images, false)?;
        for x in base.alphabet().letters() {
            let img = tensor_to_poly(&embed.apply_word(&[x]));
            if !cleaving.coaction().is_coinvariant(&img) {
                return Err(ComoduleError::NotInBase(a.render(&img)));
            }
        }
        let columns = Self::columns_for(&base, &embed, base_len);
        Ok(CleftData {
            cleaving,
            base,
            embed,
            columns: RwLock::new((base_len, columns)),
            memo: RwLock::new(HashMap::new()),
        })
    }

    fn columns_for(
        base: &Presentation,
        embed: &Morphism,
        len: usize,
    ) -> Vec<(Word, BTreeMap<Word, Scalar>)> {
        base.basis_words(len)
            .into_iter()
            .map(|w| {
                let img = tensor_to_poly(&embed.apply_word(&w));
                (w, img.as_map().clone())
            })
            .collect()
    }

    /// The cleaving this data comes from.
    pub fn cleaving(&self) -> &Arc<Cleaving> {
        &self.cleaving
    }

    /// Image of a base element in the total algebra.
    pub fn embed(&self, b: &Poly) -> Poly {
        tensor_to_poly(&self.embed.apply(b))
    }

    /// Writes an element of the total algebra in the base presentation.
    pub fn pull_back(&self, x: &Poly) -> Result<Poly, ComoduleError> {
        let a = self.cleaving.total();
        let x = a.nf(x);
        if x.is_zero() {
            return Ok(Poly::zero());
        }
        let needed = x.max_len();
        if self.columns.read().0 < needed {
            let mut guard = self.columns.write();
            if guard.0 < needed {
                *guard = (needed, Self::columns_for(&self.base, &self.embed, needed));
            }
        }
        let guard = self.columns.read();
        let cols: Vec<BTreeMap<Word, Scalar>> = guard.1.iter().map(|(_, c)| c.clone()).collect();
        match linalg::solve(&cols, x.as_map()) {
            Ok(coeffs) => {
                let mut out = Poly::zero();
                for ((w, _), c) in guard.1.iter().zip(coeffs) {
                    out.add_term(w.clone(), c);
                }
                Ok(out)
            }
            Err(LinalgError::NotInSpan) | Err(LinalgError::NonUnitDenominator(_)) => {
                Err(ComoduleError::NotInBase(a.render(&x)))
            }
        }
    }

    fn memoized<F>(&self, kind: u8, h: &[Letter], k: &[Letter], f: F) -> Result<Poly, ComoduleError>
    where
        F: FnOnce() -> Result<Poly, ComoduleError>,
    {
        let key = (kind, Word::from_slice(h), Word::from_slice(k));
        if let Some(p) = self.memo.read().get(&key) {
            return Ok(p.clone());
        }
        let p = f()?;
        self.memo.write().insert(key, p.clone());
        Ok(p)
    }
}

impl CrossedData for CleftData {
    fn base(&self) -> &Arc<Presentation> {
        &self.base
    }

    fn hopf(&self) -> &Arc<HopfAlgebra> {
        self.cleaving.hopf()
    }

    fn act_word(&self, h: &[Letter], b: &[Letter]) -> Result<Poly, ComoduleError> {
        self.memoized(0, h, b, || {
            let c = &self.cleaving;
            let a = c.total();
            let eb = self.embed(&Poly::word(Word::from_slice(b)));
            let mut x = Poly::zero();
            for (ws, k) in c.hopf().coproduct_word(h).terms() {
                let p = a.mul_all(&[&c.j().eval_word(&ws[0])?, &eb, &c.jinv().eval_word(&ws[1])?]);
                x.add_scaled(&p, k);
            }
            self.pull_back(&x)
        })
    }

    fn cocycle_word(&self, h: &[Letter], k: &[Letter]) -> Result<Poly, ComoduleError> {
        self.memoized(1, h, k, || {
            let c = &self.cleaving;
            let (a, hp) = (c.total(), c.hopf().pres());
            let mut x = Poly::zero();
            for (hs, e) in c.hopf().coproduct_word(h).terms() {
                for (ks, f) in c.hopf().coproduct_word(k).terms() {
                    let prod = hp.mul(&Poly::word(hs[1].clone()), &Poly::word(ks[1].clone()));
                    let p = a.mul_all(&[
                        &c.j().eval_word(&hs[0])?,
                        &c.j().eval_word(&ks[0])?,
                        &c.jinv().eval(&prod)?,
                    ]);
                    x.add_scaled(&p, &(e * f));
                }
            }
            self.pull_back(&x)
        })
    }

    fn cocycle_inv_word(&self, h: &[Letter], k: &[Letter]) -> Result<Poly, ComoduleError> {
        self.memoized(2, h, k, || {
            let c = &self.cleaving;
            let (a, hp) = (c.total(), c.hopf().pres());
            let mut x = Poly::zero();
            for (hs, e) in c.hopf().coproduct_word(h).terms() {
                for (ks, f) in c.hopf().coproduct_word(k).terms() {
                    let prod = hp.mul(&Poly::word(hs[0].clone()), &Poly::word(ks[0].clone()));
                    let p = a.mul_all(&[
                        &c.j().eval(&prod)?,
                        &c.jinv().eval_word(&ks[1])?,
                        &c.jinv().eval_word(&hs[1])?,
                    ]);
                    x.add_scaled(&p, &(e * f));
                }
            }
            self.pull_back(&x)
        })
    }
}

/// Normalization, measure, cocycle, twisted-module and inverse-cocycle
/// conditions on `H` words of length `<= max_len` and `B` words of length
/// `<= base_len`.
pub fn check_crossed_data(data: &dyn CrossedData, max_len: usize, base_len: usize) -> Report {
    let hp = data.hopf().pres().clone();
    let bp = data.base().clone();
    let mut rep = Report::new(&format!("crossed data {} over {}", bp.name(), hp.name()));
    let hw = hp.basis_words(max_len);
    let bw = bp.basis_words(base_len);
    let rh = |w: &[Letter]| hp.alphabet().render_word(w);
    let rb = |w: &[Letter]| bp.alphabet().render_word(w);
    let s = |e: ComoduleError| e.to_string();
    let w = |x: &Word| Poly::word(x.clone());
    let eps = |x: &Word| data.hopf().counit_word(x);

    let f = collect_failures(&hw, |h| {
        let e = Poly::scalar(eps(h));
        let a = data.cocycle_word(h, &[]).map_err(s)?;
        let b = data.cocycle_word(&[], h).map_err(s)?;
        Ok((a != e || b != e).then(|| format!("{}: {} / {}", rh(h), bp.render(&a), bp.render(&b))))
    });
    rep.push_failures(
        "crossed.normalized",
        "sigma(h (x) 1) = eps(h) 1 = sigma(1 (x) h)",
        hw.len(),
        &f,
    );

    let f = collect_failures(&bw, |b| {
        let got = data.act_word(&[], b).map_err(s)?;
        Ok((got != bp.nf_word(b)).then(|| rb(b)))
    });
    rep.push_failures("crossed.unit-acts-trivially", "1 . b = b", bw.len(), &f);

    let mut triples = Vec::new();
    for h in &hw {
        for (b, c) in bounded_pairs(&bw, base_len) {
            triples.push((h.clone(), b, c));
        }
    }
    let f = collect_failures(&triples, |(h, b, c)| {
        let lhs = act(data, &w(h), &bp.mul(&w(b), &w(c))).map_err(s)?;
        let mut rhs = Poly::zero();
        for (ws, k) in data.hopf().coproduct_word(h).terms() {
            let x = data.act_word(&ws[0], b).map_err(s)?;
            let y = data.act_word(&ws[1], c).map_err(s)?;
            rhs.add_scaled(&bp.mul(&x, &y), k);
        }
        Ok((lhs != rhs).then(|| format!("{} . ({} {})", rh(h), rb(b), rb(c))))
    });
    rep.push_failures(
        "crossed.measure",
        "h . (b b') = (h1 . b)(h2 . b') and h . 1 = eps(h) 1",
        triples.len(),
        &f,
    );

    let mut hhh = Vec::new();
    for h in &hw {
        for k in &hw {
            for l in &hw {
                if h.len() + k.len() + l.len() <= max_len {
                    hhh.push((h.clone(), k.clone(), l.clone()));
                }
            }
        }
    }
    let f = collect_failures(&hhh, |(h, k, l)| {
        let dh = data.hopf().coproduct_word(h);
        let dk = data.hopf().coproduct_word(k);
        let dl = data.hopf().coproduct_word(l);
        let mut lhs = Poly::zero();
        let mut rhs = Poly::zero();
        for (hs, a) in dh.terms() {
            for (ks, b) in dk.terms() {
                let coeff = a * b;
                for (ls, c) in dl.terms() {
                    let inner = data.cocycle_word(&ks[0], &ls[0]).map_err(s)?;
                    let acted = act(data, &w(&hs[0]), &inner).map_err(s)?;
                    let kl = hp.mul(&w(&ks[1]), &w(&ls[1]));
                    let outer = sigma(data, &w(&hs[1]), &kl).map_err(s)?;
                    lhs.add_scaled(&bp.mul(&acted, &outer), &(&coeff * c));
                }
                let first = data.cocycle_word(&hs[0], &ks[0]).map_err(s)?;
                let hk = hp.mul(&w(&hs[1]), &w(&ks[1]));
                let second = sigma(data, &hk, &w(l)).map_err(s)?;
                rhs.add_scaled(&bp.mul(&first, &second), &coeff);
            }
        }
        Ok((lhs != rhs).then(|| {
            format!(
                "({}, {}, {}): {} vs {}",
                rh(h),
                rh(k),
                rh(l),
                bp.render(&lhs),
                bp.render(&rhs)
            )
        }))
    });
    rep.push_failures("crossed.cocycle", "2-cocycle condition", hhh.len(), &f);

    let mut hhb = Vec::new();
    for (h, k) in bounded_pairs(&hw, max_len) {
        for b in &bw {
            hhb.push((h.clone(), k.clone(), b.clone()));
        }
    }
    let f = collect_failures(&hhb, |(h, k, b)| {
        let inner = data.act_word(k, b).map_err(s)?;
        let lhs = act(data, &w(h), &inner).map_err(s)?;
        let dh = data.hopf().coproduct2(&w(h));
        let dk = data.hopf().coproduct2(&w(k));
        let mut rhs = Poly::zero();
        for (hs, x) in dh.terms() {
            for (ks, y) in dk.terms() {
                let s1 = data.cocycle_word(&hs[0], &ks[0]).map_err(s)?;
                let mid = act(data, &hp.mul(&w(&hs[1]), &w(&ks[1])), &w(b)).map_err(s)?;
                let s2 = data.cocycle_inv_word(&hs[2], &ks[2]).map_err(s)?;
                rhs.add_scaled(&bp.mul_all(&[&s1, &mid, &s2]), &(x * y));
            }
        }
        Ok((lhs != rhs).then(|| {
            format!(
                "{} . ({} . {}): {} vs {}",
                rh(h),
                rh(k),
                rb(b),
                bp.render(&lhs),
                bp.render(&rhs)
            )
        }))
    });
    rep.push_failures(
        "crossed.twisted-module",
        "h . (h' . b) = sigma(h1, h'1) (h2 h'2 . b) sigma^-1(h3, h'3)",
        hhb.len(),
        &f,
    );

    let pairs = bounded_pairs(&hw, max_len);
    let f = collect_failures(&pairs, |(h, k)| {
        let dh = data.hopf().coproduct_word(h);
        let dk = data.hopf().coproduct_word(k);
        let mut left = Poly::zero();
        let mut right = Poly::zero();
        for (hs, x) in dh.terms() {
            for (ks, y) in dk.terms() {
                let a = data.cocycle_word(&hs[0], &ks[0]).map_err(s)?;
                let b = data.cocycle_inv_word(&hs[1], &ks[1]).map_err(s)?;
                let c = data.cocycle_inv_word(&hs[0], &ks[0]).map_err(s)?;
                let d = data.cocycle_word(&hs[1], &ks[1]).map_err(s)?;
                left.add_scaled(&bp.mul(&a, &b), &(x * y));
                right.add_scaled(&bp.mul(&c, &d), &(x * y));
            }
        }
        let unit = Poly::scalar(&eps(h) * &eps(k));
        Ok((left != unit || right != unit).then(|| format!("({}, {})", rh(h), rh(k))))
    });
    rep.push_failures(
        "crossed.cocycle-inverse",
        "sigma * sigma^-1 = eps (x) eps = sigma^-1 * sigma",
        pairs.len(),
        &f,
    );
    rep
}

/// The crossed product algebra on `B (x) H`.
#[derive(Clone)]
pub struct CrossedProduct {
    data: Arc<dyn CrossedData>,
}

impl std::fmt::Debug for CrossedProduct {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "CrossedProduct({} # {})",
            self.data.base().name(),
            self.data.hopf().pres().name()
        )
    }
}

impl CrossedProduct {
    /// Checks the crossed data and builds the product; fails with the first
    /// violated condition.
    pub fn build(
        data: Arc<dyn CrossedData>,
        max_len: usize,
        base_len: usize,
    ) -> Result<Self, ComoduleError> {
        let rep = check_crossed_data(data.as_ref(), max_len, base_len);
        if let Some(c) = rep.first_failure() {
            return Err(ComoduleError::CocycleViolation(format!(
                "{}: {}",
                c.id, c.witness
            )));
        }
        Ok(CrossedProduct { data })
    }

    /// Builds the product without checking the data.
    pub fn unchecked(data: Arc<dyn CrossedData>) -> Self {
        CrossedProduct { data }
    }

    /// The crossed data.
    pub fn data(&self) -> &Arc<dyn CrossedData> {
        &self.data
    }

    /// `[B, H]`.
    pub fn comps(&self) -> Vec<Arc<Presentation>> {
        vec![self.data.base().clone(), self.data.hopf().pres().clone()]
    }

    /// `b # h`.
    pub fn element(&self, b: &Poly, h: &Poly) -> Tensor {
        Tensor::from_polys(self.comps(), &[b.clone(), h.clone()])
    }

    /// `(b # h)(b' # h') = b (h1 . b') sigma(h2, h'1) # h3 h'2`.
    pub fn mul(&self, x: &Tensor, y: &Tensor) -> Result<Tensor, ComoduleError> {
        let d = &self.data;
        let (bp, hp) = (d.base(), d.hopf().pres());
        let mut out = Tensor::zero(self.comps());
        for (xs, cx) in x.terms() {
            let d3 = d.hopf().coproduct2(&Poly::word(xs[1].clone()));
            for (ys, cy) in y.terms() {
                let dk = d.hopf().coproduct_word(&ys[1]);
                for (hs, c1) in d3.terms() {
                    let acted = d.act_word(&hs[0], &ys[0])?;
                    for (ks, c2) in dk.terms() {
                        let s = d.cocycle_word(&hs[1], &ks[0])?;
                        let left = bp.mul_all(&[&Poly::word(xs[0].clone()), &acted, &s]);
                        let right = hp.mul(&Poly::word(hs[2].clone()), &Poly::word(ks[1].clone()));
                        let c = cx * cy;
                        out.add_scaled(
                            &Tensor::from_polys(self.comps(), &[left, right]),
                            &(&c * &(c1 * c2)),
                        );
                    }
                }
            }
        }
        Ok(out)
    }

    /// The right coaction `id (x) Delta`.
    pub fn coaction(&self, x: &Tensor) -> Tensor {
        self.data.hopf().delta().on_leg(x, 1)
    }

    /// `j(h) = 1 # h`.
    pub fn j(&self, h: &Poly) -> Tensor {
        self.element(&Poly::one(), h)
    }

    /// `j^-1(h) = sigma^-1(S(h2), h3) # S(h1)`.
    pub fn jinv(&self, h: &Poly) -> Result<Tensor, ComoduleError> {
        let d = &self.data;
        let mut out = Tensor::zero(self.comps());
        for (hs, c) in d.hopf().coproduct2(h).terms() {
            let s2 = d.hopf().antipode_word(&hs[1]);
            let b = sigma_inv(d.as_ref(), &s2, &Poly::word(hs[2].clone()))?;
            let s1 = d.hopf().antipode_word(&hs[0]);
            out.add_scaled(&self.element(&b, &s1), c);
        }
        Ok(out)
    }

    /// Associativity and unitality on elements `b # h` with `b` a basis word
    /// of length `<= base_len` and `h` a basis word of length `<= max_len`;
    /// multiplicativity of the coaction; and the cleaving `h -> 1 # h`.
    pub fn check(&self, max_len: usize, base_len: usize) -> Report {
        let d = &self.data;
        let mut rep = Report::new(&format!("crossed product {:?}", self));
        let bw = d.base().basis_words(base_len);
        let hw = d.hopf().pres().basis_words(max_len);
        let mut elems = Vec::new();
        for b in &bw {
            for h in &hw {
                elems.push(Tensor::pure(
                    self.comps(),
                    vec![b.clone(), h.clone()],
                    Scalar::one(),
                ));
            }
        }
        let s = |e: ComoduleError| e.to_string();
        let mut triples = Vec::new();
        for i in 0..elems.len() {
            for j in 0..elems.len() {
                for k in 0..elems.len() {
                    triples.push((i, j, k));
                }
            }
        }
        let f = collect_failures(&triples, |&(i, j, k)| {
            let (x, y, z) = (&elems[i], &elems[j], &elems[k]);
            let l = self.mul(&self.mul(x, y).map_err(s)?, z).map_err(s)?;
            let r = self.mul(x, &self.mul(y, z).map_err(s)?).map_err(s)?;
            Ok((l != r).then(|| format!("({}) ({}) ({})", x.render(), y.render(), z.render())))
        });
        rep.push_failures(
            "crossed-product.associative",
            "(xy)z = x(yz)",
            triples.len(),
            &f,
        );

        let one = Tensor::one(self.comps());
        let f = collect_failures(&elems, |x| {
            let l = self.mul(&one, x).map_err(s)?;
            let r = self.mul(x, &one).map_err(s)?;
            Ok((l != *x || r != *x).then(|| x.render()))
        });
        rep.push_failures(
            "crossed-product.unit",
            "1 # 1 is a two-sided unit",
            elems.len(),
            &f,
        );

        let mut pairs = Vec::new();
        for i in 0..elems.len() {
            for j in 0..elems.len() {
                pairs.push((i, j));
            }
        }
        let hp = d.hopf().pres().clone();
        let f = collect_failures(&pairs, |&(i, j)| {
            let (x, y) = (&elems[i], &elems[j]);
            let lhs = self.coaction(&self.mul(x, y).map_err(s)?);
            let (cx, cy) = (self.coaction(x), self.coaction(y));
            let mut rhs = Tensor::zero(lhs.comps().to_vec());
            for (xs, a) in cx.terms() {
                for (ys, b) in cy.terms() {
                    let p = self
                        .mul(
                            &Tensor::pure(
                                self.comps(),
                                vec![xs[0].clone(), xs[1].clone()],
                                Scalar::one(),
                            ),
                            &Tensor::pure(
                                self.comps(),
                                vec![ys[0].clone(), ys[1].clone()],
                                Scalar::one(),
                            ),
                        )
                        .map_err(s)?;
                    let third = hp.mul(&Poly::word(xs[2].clone()), &Poly::word(ys[2].clone()));
                    for (ps, c) in p.terms() {
                        let t = Tensor::from_polys(
                            lhs.comps().to_vec(),
                            &[
                                Poly::word(ps[0].clone()),
                                Poly::word(ps[1].clone()),
                                third.clone(),
                            ],
                        );
                        rhs.add_scaled(&t, &(&(a * b) * c));
                    }
                }
            }
            Ok((lhs != rhs).then(|| format!("({}) ({})", x.render(), y.render())))
        });
        rep.push_failures(
            "crossed-product.comodule-algebra",
            "id (x) Delta is multiplicative",
            pairs.len(),
            &f,
        );

        let f = collect_failures(&hw, |h| {
            let hpoly = Poly::word(h.clone());
            let dh = d.hopf().coproduct_word(h);
            let mut l = Tensor::zero(self.comps());
            let mut r = Tensor::zero(self.comps());
            for (hs, c) in dh.terms() {
                let a = self.j(&Poly::word(hs[0].clone()));
                let ai = self.jinv(&Poly::word(hs[0].clone())).map_err(s)?;
                let b = self.j(&Poly::word(hs[1].clone()));
                let bi = self.jinv(&Poly::word(hs[1].clone())).map_err(s)?;
                l.add_scaled(&self.mul(&a, &bi).map_err(s)?, c);
                r.add_scaled(&self.mul(&ai, &b).map_err(s)?, c);
            }
            let unit = Tensor::one(self.comps()).scale(&d.hopf().counit(&hpoly));
            Ok((l != unit || r != unit).then(|| hp.alphabet().render_word(h)))
        });
        rep.push_failures(
            "crossed-product.cleaving",
            "h -> 1 # h is convolution invertible with inverse sigma^-1(S(h2), h3) # S(h1)",
            hw.len(),
            &f,
        );
        rep
    }
}

/// A crossed product built from a cleaving, with the isomorphism checks.
pub struct DoiTakeuchi {
    /// Induced measure and cocycle.
    pub data: Arc<CleftData>,
    /// The crossed product on `B (x) H`.
    pub product: CrossedProduct,
    /// Crossed-data checks and the isomorphism checks.
    pub report: Report,
}

impl DoiTakeuchi {
    /// `theta(a) = a0 j^-1(a1) # a2`.
    pub fn theta(&self, a: &Poly) -> Result<Tensor, ComoduleError> {
        let c = self.data.cleaving();
        let t = c.coaction().apply(a);
        let t = c.hopf().delta().on_leg(&t, 1);
        let t = c.cleave_leg(&t, 1, true)?;
        let t = t.multiply_legs(0).expect("same algebra");
        let mut out = Tensor::zero(self.product.comps());
        for (ws, k) in t.terms() {
            let b = self.data.pull_back(&Poly::word(ws[0].clone()))?;
            out.add_scaled(&self.product.element(&b, &Poly::word(ws[1].clone())), k);
        }
        Ok(out)
    }

    /// `b # h -> b j(h)`.
    pub fn theta_inverse(&self, x: &Tensor) -> Result<Poly, ComoduleError> {
        let c = self.data.cleaving();
        let mut out = Poly::zero();
        for (ws, k) in x.terms() {
            let b = self.data.embed(&Poly::word(ws[0].clone()));
            out.add_scaled(&c.total().mul(&b, &c.j().eval_word(&ws[1])?), k);
        }
        Ok(out)
    }
}

/// Induces crossed data from a cleaving and checks that `theta` is an
/// algebra and comodule isomorphism onto the crossed product on basis
/// words of length `<= max_len`.
pub fn doi_takeuchi_from_cleft(
    cleaving: Arc<Cleaving>,
    base: Arc<Presentation>,
    embedding: Vec<(Letter, Poly)>,
    base_len: usize,
    max_len: usize,
) -> Result<DoiTakeuchi, ComoduleError> {
    let data = Arc::new(CleftData::new(cleaving.clone(), base, embedding, base_len)?);
    let mut report = check_crossed_data(data.as_ref(), max_len, 1);
    let dyn_data: Arc<dyn CrossedData> = data.clone();
    let dt = DoiTakeuchi {
        data,
        product: CrossedProduct::unchecked(dyn_data),
        report: Report::default(),
    };
    let a = cleaving.total().clone();
    let aw = a.basis_words(max_len);
    let s = |e: ComoduleError| e.to_string();
    let ra = |w: &[Letter]| a.alphabet().render_word(w);

    let pairs = bounded_pairs(&aw, max_len);
    let f = collect_failures(&pairs, |(x, y)| {
        let lhs = dt
            .theta(&a.nf_word(&crate::freealg::concat(x, y)))
            .map_err(s)?;
        let tx = dt.theta(&Poly::word(x.clone())).map_err(s)?;
        let ty = dt.theta(&Poly::word(y.clone())).map_err(s)?;
        let rhs = dt.product.mul(&tx, &ty).map_err(s)?;
        Ok((lhs != rhs).then(|| {
            format!(
                "({}, {}): {} vs {}",
                ra(x),
                ra(y),
                lhs.render(),
                rhs.render()
            )
        }))
    });
    report.push_failures(
        "doi-takeuchi.multiplicative",
        "theta(a a') = theta(a) theta(a')",
        pairs.len(),
        &f,
    );

    let f = collect_failures(&aw, |w| {
        let t = dt.theta(&Poly::word(w.clone())).map_err(s)?;
        let lhs = dt.product.coaction(&t);
        let ca = cleaving.coaction().apply_word(w);
        let mut rhs = Tensor::zero(lhs.comps().to_vec());
        for (ws, k) in ca.terms() {
            let th = dt.theta(&Poly::word(ws[0].clone())).map_err(s)?;
            for (ts, c) in th.terms() {
                let p = Tensor::pure(
                    lhs.comps().to_vec(),
                    vec![ts[0].clone(), ts[1].clone(), ws[1].clone()],
                    Scalar::one(),
                );
                rhs.add_scaled(&p, &(k * c));
            }
        }
        Ok((lhs != rhs).then(|| ra(w)))
    });
    report.push_failures(
        "doi-takeuchi.colinear",
        "theta intertwines the coactions",
        aw.len(),
        &f,
    );

    let f = collect_failures(&aw, |w| {
        let p = Poly::word(w.clone());
        let back = dt.theta_inverse(&dt.theta(&p).map_err(s)?).map_err(s)?;
        Ok((back != p).then(|| format!("{}: {}", ra(w), a.render(&back))))
    });
    report.push_failures(
        "doi-takeuchi.invertible",
        "b # h -> b j(h) inverts theta",
        aw.len(),
        &f,
    );
    Ok(DoiTakeuchi { report, ..dt })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{pair, suq2, torus, u1};
    use crate::freealg::{word, Generator};
    use crate::hopf::Extension;
    use crate::rewrite::PresentationBuilder;

    fn torus_coaction(h: &Arc<HopfAlgebra>) -> Arc<Coaction> {
        let a = torus();
        let ah = vec![a.clone(), h.pres().clone()];
        let (u, v) = (a.letter("u").unwrap(), a.letter("v").unwrap());
        let (t, ti) = (
            h.pres().letter("t").unwrap(),
            h.pres().letter("t^-1").unwrap(),
        );
        Arc::new(
            Coaction::right(
                "coaction",
                a,
                h,
                vec![(u, pair(&ah, &[u], &[t])), (v, pair(&ah, &[v], &[ti]))],
            )
            .unwrap(),
        )
    }

    fn torus_cleaving() -> Arc<Cleaving> {
        let h = u1();
        let co = torus_coaction(&h);
        let a = co.source().clone();
        let hp = h.pres();
        let (t, ti) = (hp.letter("t").unwrap(), hp.letter("t^-1").unwrap());
        let l = |n: &str| a.letter(n).unwrap();
        let j = LinearMap::letters(
            "j",
            &h,
            a.clone(),
            HashMap::from([(t, Poly::letter(l("u"))), (ti, Poly::letter(l("v")))]),
            Extension::NormalWords,
        )
        .unwrap();
        let jinv = LinearMap::letters(
            "j^-1",
            &h,
            a.clone(),
            HashMap::from([(t, Poly::letter(l("u^-1"))), (ti, Poly::letter(l("v^-1")))]),
            Extension::NormalWords,
        )
        .unwrap();
        Arc::new(Cleaving::new(co, h, Arc::new(j), Arc::new(jinv)).unwrap())
    }

    fn laurent_base() -> Arc<Presentation> {
        let mut b = PresentationBuilder::new("C[z,z^-1]");
        b.generator(Generator::algebra("z").inv()).unwrap();
        Arc::new(b.build().unwrap())
    }

    #[test]
    fn torus_coaction_axioms_and_coinvariants() {
        let h = u1();
        let co = torus_coaction(&h);
        let r = co.check(4);
        assert!(r.all_passed(), "{}", r.to_text());
        let a = co.source().clone();
        let inv = co.coinvariants(2);
        let uv = a.nf(&(a.gen("u").unwrap().concat_mul(&a.gen("v").unwrap())));
        let uv_inv = a.nf(&(a.gen_inv("u").unwrap().concat_mul(&a.gen_inv("v").unwrap())));
        assert_eq!(inv.len(), 3);
        for p in [Poly::one(), uv, uv_inv] {
            let basis: Vec<_> = inv.iter().map(|x| x.as_map().clone()).collect();
            assert!(linalg::in_span(&basis, p.as_map()), "{}", a.render(&p));
        }
    }

    #[test]
    fn regular_coaction_has_scalar_coinvariants() {
        let h = u1();
        let co = Coaction::regular(&h);
        assert_eq!(co.coinvariants(3), vec![Poly::one()]);
    }

    #[test]
    fn suq2_coinvariants_are_the_sphere_generators() {
        let h = u1();
        let g = suq2();
        let a = g.pres().clone();
        let ah = vec![a.clone(), h.pres().clone()];
        let (t, ti) = (
            h.pres().letter("t").unwrap(),
            h.pres().letter("t^-1").unwrap(),
        );
        let l = |n: &str| a.letter(n).unwrap();
        let co = Coaction::right(
            "coaction",
            a.clone(),
            &h,
            vec![
                (l("alpha"), pair(&ah, &[l("alpha")], &[t])),
                (l("beta"), pair(&ah, &[l("beta")], &[ti])),
                (l("gamma"), pair(&ah, &[l("gamma")], &[t])),
                (l("delta"), pair(&ah, &[l("delta")], &[ti])),
            ],
        )
        .unwrap();
        assert!(co.check(3).all_passed());
        let inv = co.coinvariants(2);
        let want: Vec<Poly> = vec![
            Poly::one(),
            Poly::word(word(&[l("beta"), l("alpha")])),
            Poly::word(word(&[l("gamma"), l("delta")])),
            Poly::word(word(&[l("beta"), l("gamma")])),
        ];
        let got: Vec<_> = inv.iter().map(|x| x.as_map().clone()).collect();
        let want: Vec<_> = want.iter().map(|x| x.as_map().clone()).collect();
        assert!(linalg::same_span(&got, &want));
    }

    #[test]
    fn bad_coaction_is_rejected() {
        let h = u1();
        let a = torus();
        let ah = vec![a.clone(), h.pres().clone()];
        let (u, v) = (a.letter("u").unwrap(), a.letter("v").unwrap());
        let t = h.pres().letter("t").unwrap();
        let twisted = pair(&ah, &[u], &[t]).scale(&Scalar::int(2));
        let images = vec![(u, twisted), (v, pair(&ah, &[v], &[t]))];
        let err = Coaction::right("bad", a, &h, images).unwrap_err();
        assert!(matches!(err, ComoduleError::NotACoaction(_)));
    }

    #[test]
    fn torus_cleaving_passes() {
        let c = torus_cleaving();
        let r = c.check(3);
        assert!(r.all_passed(), "{}", r.to_text());
        let a = c.total().clone();
        let u = a.gen("u").unwrap();
        assert_eq!(c.coinvariant_part(&u).unwrap(), Poly::one());
        assert!(r
            .get("cleft.anti-multiplicative-inverse")
            .unwrap()
            .witness
            .starts_with("not applicable"));
    }

    #[test]
    fn broken_inverse_fails_convolution_check() {
        let c = torus_cleaving();
        let h = c.hopf().clone();
        let a = c.total().clone();
        let hp = h.pres();
        let (t, ti) = (hp.letter("t").unwrap(), hp.letter("t^-1").unwrap());
        let bad = LinearMap::letters(
            "bad",
            &h,
            a.clone(),
            HashMap::from([(t, a.gen_inv("v").unwrap()), (ti, a.gen_inv("u").unwrap())]),
            Extension::NormalWords,
        )
        .unwrap();
        let c2 = Cleaving::new(c.coaction().clone(), h, c.j().clone(), Arc::new(bad)).unwrap();
        let r = c2.check(2);
        assert!(!r.get("cleft.convolution-inverse").unwrap().passed());
    }

    #[test]
    fn galois_map_examples() {
        let c = torus_cleaving();
        let a = c.total().clone();
        let hp = c.hopf().pres().clone();
        let aa = vec![a.clone(), a.clone()];
        let ah = vec![a.clone(), hp.clone()];
        let (u, ui) = (a.letter("u").unwrap(), a.letter("u^-1").unwrap());
        let t = hp.letter("t").unwrap();
        let x = Tensor::pure(aa.clone(), vec![word(&[]), word(&[u])], Scalar::one());
        assert_eq!(c.chi(&x), pair(&ah, &[u], &[t]));
        let k = c.translation(&Poly::letter(t)).unwrap();
        assert_eq!(k, pair(&aa, &[ui], &[u]));
        assert_eq!(c.translation(&Poly::one()).unwrap(), Tensor::one(aa));
        assert!(c.check_galois(3).all_passed());
        let r = c.check_translation_map(3);
        assert!(r.all_passed(), "{}", r.to_text());
    }

    #[test]
    fn self_bundle_translation_map() {
        for h in [u1(), suq2()] {
            let c = Cleaving::self_bundle(&h);
            let hp = h.pres().clone();
            let comps = h.comps2();
            for w in hp.basis_words(2) {
                let k = c.translation(&Poly::word(w.clone())).unwrap();
                let mut want = Tensor::zero(comps.clone());
                for (ws, e) in h.coproduct_word(&w).terms() {
                    want.add_scaled(
                        &Tensor::from_polys(
                            comps.clone(),
                            &[h.antipode_word(&ws[0]), Poly::word(ws[1].clone())],
                        ),
                        e,
                    );
                }
                assert_eq!(k, want);
            }
            let len = if hp.name() == "O(U(1))" { 3 } else { 2 };
            for r in [
                c.check(len),
                c.check_galois(len),
                c.check_translation_map(len),
            ] {
                assert!(r.all_passed(), "{}", r.to_text());
            }
        }
    }

    #[test]
    fn doi_takeuchi_on_the_torus() {
        let c = torus_cleaving();
        let base = laurent_base();
        let a = c.total().clone();
        let z = base.letter("z").unwrap();
        let uv = a.gen("u").unwrap().concat_mul(&a.gen("v").unwrap());
        let dt = doi_takeuchi_from_cleft(c.clone(), base.clone(), vec![(z, uv)], 3, 2).unwrap();
        assert!(dt.report.all_passed(), "{}", dt.report.to_text());
        let hp = c.hopf().pres().clone();
        let (t, ti) = (hp.letter("t").unwrap(), hp.letter("t^-1").unwrap());
        let data = dt.data.as_ref();
        assert_eq!(data.cocycle_word(&[t], &[t]).unwrap(), Poly::one());
        assert_eq!(data.cocycle_word(&[t], &[ti]).unwrap(), Poly::letter(z));
        let theta_u = dt.theta(&a.gen("u").unwrap()).unwrap();
        assert_eq!(theta_u, dt.product.element(&Poly::one(), &Poly::letter(t)));
        let r = dt.product.check(2, 1);
        assert!(r.all_passed(), "{}", r.to_text());
    }

    #[test]
    fn trivial_extension_has_trivial_cocycle() {
        let h = u1();
        let c = Arc::new(Cleaving::self_bundle(&h));
        let ground = Arc::new(Presentation::ground());
        let dt = doi_takeuchi_from_cleft(c, ground, vec![], 0, 3).unwrap();
        assert!(dt.report.all_passed(), "{}", dt.report.to_text());
        for x in h.pres().basis_words(2) {
            for y in h.pres().basis_words(2) {
                let e = &h.counit_word(&x) * &h.counit_word(&y);
                assert_eq!(dt.data.cocycle_word(&x, &y).unwrap(), Poly::scalar(e));
            }
        }
    }

    #[test]
    fn smash_product_is_associative() {
        let h = u1();
        let base = laurent_base();
        let data: Arc<dyn CrossedData> = Arc::new(SmashData::trivial(base, h));
        let cp = CrossedProduct::build(data, 2, 1).unwrap();
        let r = cp.check(2, 1);
        assert!(r.all_passed(), "{}", r.to_text());
    }

    #[test]
    fn bad_action_is_a_cocycle_violation() {
        let h = u1();
        let base = laurent_base();
        let (t, z) = (h.pres().letter("t").unwrap(), base.letter("z").unwrap());
        let zi = base.letter("z^-1").unwrap();
        let table = HashMap::from([
            ((t, z), Poly::letter(z).scale(&Scalar::int(2))),
            ((t, zi), Poly::letter(zi)),
        ]);
        let data: Arc<dyn CrossedData> = Arc::new(SmashData::with_action(base, h, table));
        let err = CrossedProduct::build(data, 2, 2).unwrap_err();
        assert!(matches!(err, ComoduleError::CocycleViolation(_)), "{err}");
    }

    use proptest::prelude::*;

    /// The normal form of a word whose letters are taken modulo the alphabet.
    fn pick(pres: &Presentation, raw: &[u16]) -> Poly {
        let n = pres.alphabet().letters().count() as u16;
        let w: Vec<Letter> = raw.iter().map(|x| x % n).collect();
        pres.nf_word(&w)
    }

    fn random_tensor(comps: &[Arc<Presentation>], terms: &[(Vec<u16>, Vec<u16>, i64)]) -> Tensor {
        let mut out = Tensor::zero(comps.to_vec());
        for (x, y, c) in terms {
            let t = Tensor::from_polys(comps.to_vec(), &[pick(&comps[0], x), pick(&comps[1], y)]);
            out.add_scaled(&t, &Scalar::int(*c));
        }
        out
    }

    fn terms() -> impl Strategy<Value = Vec<(Vec<u16>, Vec<u16>, i64)>> {
        let w = || proptest::collection::vec(0u16..16, 0..4);
        proptest::collection::vec((w(), w(), -3i64..4), 1..4)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn coaction_axioms_on_random_words(raw in proptest::collection::vec(0u16..16, 0..5)) {
            let h = u1();
            let co = torus_coaction(&h);
            let p = pick(co.source(), &raw);
            for (w, _) in p.terms() {
                prop_assert_eq!(co.coassociativity_defect(w), None);
                prop_assert_eq!(co.counit_defect(w), None);
            }
        }

        #[test]
        fn galois_map_round_trips(x in terms(), y in terms()) {
            let c = torus_cleaving();
            let a = c.total().clone();
            let aa = vec![a.clone(), a.clone()];
            let ah = vec![a.clone(), c.hopf().pres().clone()];
            let y = random_tensor(&ah, &y);
            prop_assert_eq!(c.chi(&c.chi_inverse(&y).unwrap()), y);
            let x = random_tensor(&aa, &x);
            let back = c.chi_inverse(&c.chi(&x)).unwrap();
            prop_assert_eq!(c.chi(&back), c.chi(&x));
        }

        #[test]
        fn self_bundle_galois_round_trips(y in terms()) {
            let h = suq2();
            let c = Cleaving::self_bundle(&h);
            let y = random_tensor(&h.comps2(), &y);
            prop_assert_eq!(c.chi(&c.chi_inverse(&y).unwrap()), y);
        }
    }
}
