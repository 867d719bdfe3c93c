//! Worked examples as ready-to-check bundle descriptions, and a line-based
//! file format that stores every example so that catalog, file and parser
//! round-trip to the same data.
//!
//! Bundles: `group_z` (the group algebra of the integers over the ground
//! field), `torus` (the noncommutative torus over `O(U(1))`), `qsu2_hopf`
//! (the quantum Hopf fibration), `smash_demo` (a smash product with its
//! product calculus) and `crossed_demo` (the crossed product induced by the
//! torus cleaving). Hopf-algebra-only entries: `u1`, `cz`, `slq2`, `suq2`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::bundle::{
    crossed_product_calculus, group_like_invariant_forms, left_coaction_on_forms, Bundle,
    BundleError, CompletenessData, Expectation, InvariantForms,
};
use crate::calculus::Calculus;
use crate::coeff::Scalar;
use crate::comodule::{doi_takeuchi_from_cleft, Cleaving, Coaction, CrossedData, SmashData};
use crate::freealg::{word, Generator, Letter, LetterKind, Poly, Tensor};
use crate::hopf::{Extension, HopfAlgebra, LinearMap};
use crate::linalg;
use crate::report::Report;
use crate::rewrite::{mono, Presentation, PresentationBuilder};
use crate::text::{parse_tensor, Context, ParseError};

/// Names accepted by [`load_example`] that describe bundles.
pub const BUNDLES: [&str; 5] = [
    "group_z",
    "torus",
    "qsu2_hopf",
    "smash_demo",
    "crossed_demo",
];

/// Names accepted by [`load_example`] that describe Hopf algebras only.
pub const HOPF_ENTRIES: [&str; 4] = ["u1", "cz", "slq2", "suq2"];

/// Errors raised by the catalog and the file format.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    /// No example of that name.
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    /// A malformed line in a bundle file.
    #[error("line {line}: {msg}")]
    Syntax {
        /// One-based line number.
        line: usize,
        /// What went wrong.
        msg: String,
    },
    /// The data parsed but does not build.
    #[error("line {line}: {msg}")]
    Build {
        /// One-based line number.
        line: usize,
        /// The construction error.
        msg: String,
    },
}

/// `1 * (a (x) b)` on pure words over the given components.
pub fn pair(comps: &[Arc<Presentation>], a: &[Letter], b: &[Letter]) -> Tensor {
    Tensor::pure(comps.to_vec(), vec![word(a), word(b)], Scalar::one())
}

/// The group algebra of the integers on one group-like generator.
pub fn group_algebra(name: &str, letter: &str) -> Arc<HopfAlgebra> {
    let mut b = PresentationBuilder::new(name);
    let t = b
        .generator(Generator::algebra(letter).inv())
        .expect("fresh name");
    let pres = Arc::new(b.build().expect("group algebra"));
    let ti = pres.alphabet().inverse(t).expect("invertible");
    let two = vec![pres.clone(), pres.clone()];
    Arc::new(
        HopfAlgebra::new(
            pres,
            vec![(t, pair(&two, &[t], &[t]))],
            vec![(t, Scalar::one())],
            vec![(t, Poly::letter(ti))],
        )
        .expect("group algebra is a Hopf algebra"),
    )
}

/// `O(U(1))` on the letter `t`.
pub fn u1() -> Arc<HopfAlgebra> {
    group_algebra("O(U(1))", "t")
}

/// The group algebra `C[Z]` on the letter `g`.
pub fn cz() -> Arc<HopfAlgebra> {
    group_algebra("C[Z]", "g")
}

fn quantum_matrix_pres(name: &str, q: i32) -> Arc<Presentation> {
    let mut b = PresentationBuilder::new(name);
    let be = b
        .generator(Generator::algebra("beta").weight(-1))
        .expect("fresh");
    let g = b
        .generator(Generator::algebra("gamma").weight(1))
        .expect("fresh");
    let a = b
        .generator(Generator::algebra("alpha").order(2).weight(1))
        .expect("fresh");
    let d = b
        .generator(Generator::algebra("delta").order(2).weight(-1))
        .expect("fresh");
    let s = |e: i32| Scalar::q(e * q);
    b.rule(&[a, be], mono(s(-1), &[be, a]));
    b.rule(&[a, g], mono(s(-1), &[g, a]));
    b.rule(&[d, be], mono(s(1), &[be, d]));
    b.rule(&[d, g], mono(s(1), &[g, d]));
    b.rule(&[g, be], mono(Scalar::one(), &[be, g]));
    b.rule(&[d, a], Poly::one() + mono(s(1), &[be, g]));
    b.rule(&[a, d], Poly::one() + mono(s(-1), &[be, g]));
    Arc::new(b.build().expect("quantum matrix relations"))
}

fn quantum_matrix_hopf(pres: Arc<Presentation>, q: i32) -> Arc<HopfAlgebra> {
    let two = vec![pres.clone(), pres.clone()];
    let l = |n: &str| pres.letter(n).expect("generator");
    let (a, b, c, d) = (l("alpha"), l("beta"), l("gamma"), l("delta"));
    let p = |x: Letter, y: Letter| pair(&two, &[x], &[y]);
    let co = vec![
        (a, p(a, a).add(&p(b, c))),
        (b, p(a, b).add(&p(b, d))),
        (c, p(c, a).add(&p(d, c))),
        (d, p(c, b).add(&p(d, d))),
    ];
    let eps = vec![
        (a, Scalar::one()),
        (b, Scalar::zero()),
        (c, Scalar::zero()),
        (d, Scalar::one()),
    ];
    let s = vec![
        (a, Poly::letter(d)),
        (b, mono(-Scalar::q(q), &[b])),
        (c, mono(-Scalar::q(-q), &[c])),
        (d, Poly::letter(a)),
    ];
    Arc::new(HopfAlgebra::new(pres, co, eps, s).expect("quantum matrix Hopf algebra"))
}

/// `O_q(SU(2))` as a presentation: `beta alpha = q alpha beta`, ...,
/// `alpha delta - q^-1 beta gamma = 1`.
pub fn suq2_pres() -> Arc<Presentation> {
    quantum_matrix_pres("O_q(SU(2))", 1)
}

/// `O_q(SU(2))` with its matrix coproduct.
pub fn suq2() -> Arc<HopfAlgebra> {
    quantum_matrix_hopf(suq2_pres(), 1)
}

/// `SL_q(2)`: `alpha beta = q beta alpha`, ..., `alpha delta - q beta gamma = 1`.
pub fn slq2() -> Arc<HopfAlgebra> {
    quantum_matrix_hopf(quantum_matrix_pres("SL_q(2)", -1), -1)
}

/// The noncommutative torus on invertible `u`, `v` with `v u = l u v`.
pub fn torus() -> Arc<Presentation> {
    let mut b = PresentationBuilder::new("A_l(T^2)");
    let u = b
        .generator(Generator::algebra("u").inv().weight(1))
        .expect("fresh");
    let v = b
        .generator(Generator::algebra("v").inv().weight(-1))
        .expect("fresh");
    b.rule(&[v, u], mono(Scalar::l(1), &[u, v]));
    Arc::new(b.build().expect("torus"))
}

/// The torus calculus; `twist` replaces the coefficient in `dv u -> c u dv`.
pub fn torus_calculus_with(twist: Option<Scalar>) -> Calculus {
    let a = torus();
    let mut b = PresentationBuilder::extend(&a, "Omega(A_l(T^2))");
    let du = b.generator(Generator::form("du")).expect("fresh");
    let dv = b.generator(Generator::form("dv")).expect("fresh");
    let (u, v) = (a.letter("u").expect("u"), a.letter("v").expect("v"));
    let l = Scalar::l;
    b.rule(&[du, u], mono(Scalar::one(), &[u, du]));
    b.rule(&[du, v], mono(l(-1), &[v, du]));
    b.rule(&[dv, u], mono(twist.unwrap_or(l(1)), &[u, dv]));
    b.rule(&[dv, v], mono(Scalar::one(), &[v, dv]));
    b.rule(&[du, du], Poly::zero());
    b.rule(&[dv, dv], Poly::zero());
    b.rule(&[dv, du], mono(-l(1), &[du, dv]));
    let omega = Arc::new(b.build().expect("torus forms"));
    Calculus::new(
        a,
        omega,
        vec![(u, Poly::letter(du)), (v, Poly::letter(dv))],
        vec![],
        vec![],
        2,
    )
    .expect("torus calculus")
}

/// The torus calculus.
pub fn torus_calculus() -> Calculus {
    torus_calculus_with(None)
}

/// The q-calculus on the integers: `dg g = q g dg` and `dg dg = 0`, first order.
pub fn cz_calculus() -> (Arc<HopfAlgebra>, Calculus) {
    let h = cz();
    let a = h.pres().clone();
    let g = a.letter("g").expect("g");
    let mut b = PresentationBuilder::extend(&a, "Omega(C[Z])");
    let dg = b.generator(Generator::form("dg")).expect("fresh");
    b.rule(&[dg, g], mono(Scalar::q(1), &[g, dg]));
    b.rule(&[dg, dg], Poly::zero());
    let omega = Arc::new(b.build().expect("forms on C[Z]"));
    let c = Calculus::new(a, omega, vec![(g, Poly::letter(dg))], vec![], vec![], 1)
        .expect("q-calculus");
    (h, c)
}

/// The calculus on `O(U(1))` with `dt t = q^alpha t dt` and no two-forms.
pub fn u1_calculus(alpha: i32) -> (Arc<HopfAlgebra>, Calculus) {
    let h = u1();
    let a = h.pres().clone();
    let t = a.letter("t").expect("t");
    let mut b = PresentationBuilder::extend(&a, "Omega(O(U(1)))");
    let dt = b.generator(Generator::form("dt")).expect("fresh");
    b.rule(&[dt, t], mono(Scalar::q(alpha), &[t, dt]));
    b.rule(&[dt, dt], Poly::zero());
    let omega = Arc::new(b.build().expect("forms on U(1)"));
    let c = Calculus::new(a, omega, vec![(t, Poly::letter(dt))], vec![], vec![], 2)
        .expect("U(1) calculus");
    (h, c)
}

/// The three-dimensional calculus on `O_q(SU(2))` in the basis `ep`, `em`, `e0`.
pub fn suq2_calculus() -> Calculus {
    let a = suq2_pres();
    let l = |n: &str| a.letter(n).expect("generator");
    let (al, be, ga, de) = (l("alpha"), l("beta"), l("gamma"), l("delta"));
    let mut b = PresentationBuilder::extend(&a, "Omega(O_q(SU(2)))");
    let ep = b.generator(Generator::form("ep")).expect("fresh");
    let em = b.generator(Generator::form("em")).expect("fresh");
    let e0 = b.generator(Generator::form("e0")).expect("fresh");
    let q = Scalar::q;
    for (f, w) in [(al, 1), (be, -1), (ga, 1), (de, -1)] {
        b.rule(&[ep, f], mono(q(w), &[f, ep]));
        b.rule(&[em, f], mono(q(w), &[f, em]));
        b.rule(&[e0, f], mono(q(2 * w), &[f, e0]));
    }
    b.rule(&[ep, ep], Poly::zero());
    b.rule(&[em, em], Poly::zero());
    b.rule(&[e0, e0], Poly::zero());
    b.rule(&[em, ep], mono(-q(2), &[ep, em]));
    b.rule(&[e0, ep], mono(-q(4), &[ep, e0]));
    b.rule(&[e0, em], mono(-q(-4), &[em, e0]));
    let omega = Arc::new(b.build().expect("forms on SU(2)"));
    let two = Scalar::one() + q(-2);
    let d_alg = vec![
        (al, mono(Scalar::one(), &[al, e0]) + mono(q(1), &[be, ep])),
        (be, mono(Scalar::one(), &[al, em]) + mono(-q(-2), &[be, e0])),
        (ga, mono(Scalar::one(), &[ga, e0]) + mono(q(1), &[de, ep])),
        (de, mono(Scalar::one(), &[ga, em]) + mono(-q(-2), &[de, e0])),
    ];
    let d_forms = vec![
        (e0, mono(q(3), &[ep, em])),
        (ep, mono(-(&q(2) * &two), &[ep, e0])),
        (em, mono(&q(-2) * &two, &[em, e0])),
    ];
    let p = Poly::letter;
    let witnesses = vec![
        (
            ep,
            vec![(p(al).scale(&q(-1)), p(ga)), (p(ga).scale(&-q(-2)), p(al))],
        ),
        (em, vec![(p(de), p(be)), (p(be).scale(&-q(1)), p(de))]),
        (e0, vec![(p(de), p(al)), (p(be).scale(&-q(1)), p(ga))]),
    ];
    Calculus::new(a, omega, d_alg, d_forms, witnesses, 3).expect("SU(2) calculus")
}

/// A commutative one-generator algebra with `dx x = x dx`, `dx dx = 0`.
fn line_calculus(name: &str, var: &str, invertible: bool) -> Calculus {
    let mut b = PresentationBuilder::new(name);
    let g = Generator::algebra(var);
    let x = b
        .generator(if invertible { g.inv() } else { g })
        .expect("fresh");
    let a = Arc::new(b.build().expect("line"));
    let mut ob = PresentationBuilder::extend(&a, &format!("Omega({name})"));
    let dx = ob
        .generator(Generator::form(&format!("d{var}")))
        .expect("fresh");
    ob.rule(&[dx, x], mono(Scalar::one(), &[x, dx]));
    ob.rule(&[dx, dx], Poly::zero());
    let omega = Arc::new(ob.build().expect("line forms"));
    Calculus::new(a, omega, vec![(x, Poly::letter(dx))], vec![], vec![], 2).expect("line calculus")
}

/// Letter images of a cleaving `j` and its convolution inverse.
#[derive(Clone)]
pub struct CleavingSpec {
    /// `j` on every letter of `H`.
    pub j: Vec<(Letter, Poly)>,
    /// `j^-1` on every letter of `H`.
    pub jinv: Vec<(Letter, Poly)>,
    /// The cleaving, extended to normal words letter by letter.
    pub cleaving: Arc<Cleaving>,
}

/// The coinvariant subalgebra of a cleft extension, presented separately.
#[derive(Clone)]
pub struct CrossedSpec {
    /// Presentation of the coinvariants.
    pub base: Arc<Presentation>,
    /// Images of its generators in the total space.
    pub embedding: Vec<(Letter, Poly)>,
    /// Length of base words used to write coinvariants back in `base`.
    pub base_len: usize,
    /// A calculus on the base, used to test the crossed-product calculus.
    pub calculus: Option<Arc<Calculus>>,
}

/// Named form identities checked by normal forms.
#[derive(Clone)]
pub struct IdentitySet {
    /// The calculus the identities live in.
    pub calc: Arc<Calculus>,
    /// `let` bindings, in order, as source text.
    pub lets: Vec<(String, String)>,
    /// `(label, lhs, rhs)` as source text.
    pub items: Vec<(String, String, String)>,
}

/// Form letters that must be left invariant under a Hopf algebra's own
/// left coaction on its forms.
#[derive(Clone)]
pub struct LeftInvariance {
    /// The Hopf algebra.
    pub hopf: Arc<HopfAlgebra>,
    /// Its calculus.
    pub calc: Arc<Calculus>,
    /// The letters.
    pub letters: Vec<Letter>,
}

/// A catalog entry.
#[derive(Clone)]
pub struct Example {
    /// Identifier.
    pub name: String,
    /// One-line description.
    pub description: String,
    /// Default word-length bound.
    pub max_len: usize,
    /// Default form-degree bound.
    pub max_deg: usize,
    /// Plain algebras, Hopf algebras' presentations included.
    pub algebras: Vec<Arc<Presentation>>,
    /// Hopf algebras.
    pub hopfs: Vec<Arc<HopfAlgebra>>,
    /// Calculi, in dependency order.
    pub calculi: Vec<Arc<Calculus>>,
    /// The coaction on the total space.
    pub coaction: Option<Arc<Coaction>>,
    /// Invariant forms of the structure group.
    pub invariant: Option<Arc<InvariantForms>>,
    /// The bundle.
    pub bundle: Option<Arc<Bundle>>,
    /// A cleaving of the coaction.
    pub cleaving: Option<CleavingSpec>,
    /// Crossed-product data induced by the cleaving.
    pub crossed: Option<CrossedSpec>,
    /// Form identities.
    pub identities: Option<IdentitySet>,
    /// Left-invariance requirements.
    pub left_invariant: Vec<LeftInvariance>,
    /// A calculus whose forms should be exactly the base forms.
    pub base_calculus: Option<Arc<Calculus>>,
}

impl std::fmt::Debug for Example {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Example").field("name", &self.name).finish()
    }
}

impl Example {
    fn empty(name: &str, description: &str, max_len: usize, max_deg: usize) -> Self {
        Example {
            name: name.to_string(),
            description: description.to_string(),
            max_len,
            max_deg,
            algebras: Vec::new(),
            hopfs: Vec::new(),
            calculi: Vec::new(),
            coaction: None,
            invariant: None,
            bundle: None,
            cleaving: None,
            crossed: None,
            identities: None,
            left_invariant: Vec::new(),
            base_calculus: None,
        }
    }

    fn add_algebra(&mut self, a: &Arc<Presentation>) {
        if !self.algebras.iter().any(|x| x.name() == a.name()) {
            self.algebras.push(a.clone());
        }
    }

    fn add_hopf(&mut self, h: &Arc<HopfAlgebra>) {
        self.add_algebra(h.pres());
        if !self
            .hopfs
            .iter()
            .any(|x| x.pres().name() == h.pres().name())
        {
            self.hopfs.push(h.clone());
        }
    }

    fn add_calculus(&mut self, c: &Arc<Calculus>) {
        self.add_algebra(c.base());
        if !self
            .calculi
            .iter()
            .any(|x| x.omega().name() == c.omega().name())
        {
            self.calculi.push(c.clone());
        }
    }

    /// A plain algebra by name.
    pub fn algebra(&self, name: &str) -> Option<&Arc<Presentation>> {
        self.algebras.iter().find(|a| a.name() == name)
    }

    /// A calculus by the name of its form algebra or of its base.
    pub fn calculus(&self, name: &str) -> Option<&Arc<Calculus>> {
        self.calculi
            .iter()
            .find(|c| c.omega().name() == name)
            .or_else(|| self.calculi.iter().find(|c| c.base().name() == name))
    }

    /// The calculus on the total space, when there is one.
    pub fn total_calculus(&self) -> Option<&Arc<Calculus>> {
        if let Some(b) = &self.bundle {
            return Some(b.acalc());
        }
        let src = self
            .coaction
            .as_ref()
            .map(|c| c.source().name().to_string());
        match src {
            Some(s) => self.calculi.iter().find(|c| c.base().name() == s),
            None => self.calculi.first(),
        }
    }

    /// The algebra expressions are read in by default: the total space, or
    /// the first algebra.
    pub fn total_algebra(&self) -> Option<&Arc<Presentation>> {
        self.coaction
            .as_ref()
            .map(|c| c.source())
            .or_else(|| self.algebras.first())
    }

    /// Runs every check of the entry at the given bounds.
    pub fn check(&self, max_len: usize, max_deg: usize) -> Report {
        let mut rep = Report::new(&format!("example {}", self.name));
        let len3 = max_len.min(3);
        for h in &self.hopfs {
            rep.extend(h.check_axioms(max_len));
            let own = Cleaving::self_bundle(h);
            rep.extend(own.check_galois(len3));
        }
        let mut covered: Vec<String> = Vec::new();
        if let Some(b) = &self.bundle {
            rep.extend(b.check_bounded(max_len, max_deg));
            covered.push(b.acalc().omega().name().to_string());
            covered.push(b.hcalc().omega().name().to_string());
        } else if let Some(c) = &self.coaction {
            rep.extend(c.check(max_len));
        }
        for c in &self.calculi {
            if !covered.iter().any(|n| n == c.omega().name()) {
                rep.extend(c.check(max_len.min(c.max_degree().max(1) + 2)));
            }
        }
        if let Some(c) = &self.cleaving {
            rep.extend(c.cleaving.check(len3));
            rep.extend(c.cleaving.check_galois(len3));
            rep.extend(c.cleaving.check_translation_map(len3));
        }
        if let (Some(x), Some(c)) = (&self.crossed, &self.cleaving) {
            rep.extend(self.check_crossed(x, c, len3));
        }
        if let Some(ids) = &self.identities {
            rep.extend(check_identities(ids));
        }
        for li in &self.left_invariant {
            rep.extend(check_left_invariance(li));
        }
        if let (Some(bc), Some(b)) = (&self.base_calculus, &self.bundle) {
            rep.extend(check_base_calculus(b, bc, max_len.min(3), max_deg));
        }
        rep
    }

    fn check_crossed(&self, x: &CrossedSpec, c: &CleavingSpec, max_len: usize) -> Report {
        let mut rep = Report::new(&format!("crossed product {}", self.name));
        let dt = match doi_takeuchi_from_cleft(
            c.cleaving.clone(),
            x.base.clone(),
            x.embedding.clone(),
            x.base_len,
            max_len.min(2),
        ) {
            Ok(dt) => dt,
            Err(e) => {
                rep.push(
                    format!("crossed.build[{}]", self.name),
                    "the induced crossed data builds",
                    false,
                    e.to_string(),
                );
                return rep;
            }
        };
        rep.extend(dt.report.clone());
        rep.extend(dt.product.check(max_len.min(2), 1));
        let Some(bcalc) = &x.calculus else {
            return rep;
        };
        let hopf = c.cleaving.hopf().clone();
        let hcalc = self
            .calculi
            .iter()
            .find(|k| k.base().name() == hopf.pres().name());
        let name = format!("crossed.calculus-guard[{}]", self.name);
        let anchor = "a crossed-product calculus is built only for a closed, trivial cocycle";
        let Some(hcalc) = hcalc else {
            rep.push(name, anchor, false, "no calculus on the structure group");
            return rep;
        };
        let data = dt.data.as_ref();
        let hl: Vec<Letter> = hopf.pres().alphabet().letters().collect();
        let mut closed = true;
        let mut trivial = true;
        for &a in &hl {
            for &b in &hl {
                let s = data
                    .cocycle_word(&[a], &[b])
                    .unwrap_or_else(|_| Poly::zero());
                if !bcalc.d(&s).map(|p| p.is_zero()).unwrap_or(false) {
                    closed = false;
                }
                if s != Poly::scalar(&hopf.counit_word(&[a]) * &hopf.counit_word(&[b])) {
                    trivial = false;
                }
            }
        }
        let built = crossed_product_calculus("crossed", bcalc, hcalc, &hopf, data);
        let (ok, witness) = match (&built, closed, trivial) {
            (Err(BundleError::TwistedCalculusViolation(p, v)), false, _) => {
                (true, format!("rejected: d(sigma({p})) = {v}"))
            }
            (Err(BundleError::UnsupportedCocycle(p, v)), true, false) => {
                (true, format!("rejected: sigma({p}) = {v}"))
            }
            (Ok(_), true, true) => (true, "built".to_string()),
            (Ok(_), _, _) => (
                false,
                "built although the cocycle is not closed and trivial".to_string(),
            ),
            (Err(e), _, _) => (false, e.to_string()),
        };
        rep.push(name, anchor, ok, witness);
        rep
    }
}

/// Checks each identity as an equality of normal forms.
pub fn check_identities(ids: &IdentitySet) -> Report {
    let name = ids.calc.omega().name().to_string();
    let mut rep = Report::new(&format!("identities in {name}"));
    let mut bindings: HashMap<String, Poly> = HashMap::new();
    for (n, src) in &ids.lets {
        match Context::forms(&ids.calc)
            .with_bindings(&bindings)
            .parse(src)
        {
            Ok(p) => {
                bindings.insert(n.clone(), p);
            }
            Err(e) => rep.push(
                format!("identity.binding[{n}]"),
                "binding parses",
                false,
                e.to_string(),
            ),
        }
    }
    let o = ids.calc.omega();
    for (label, lhs, rhs) in &ids.items {
        let ctx = Context::forms(&ids.calc).with_bindings(&bindings);
        let id = format!("identity[{label}]");
        let anchor = format!("{lhs} = {rhs}");
        match (ctx.parse(lhs), ctx.parse(rhs)) {
            (Ok(l), Ok(r)) => {
                let ok = l == r;
                let w = if ok {
                    o.render(&l)
                } else {
                    format!("{} vs {}", o.render(&l), o.render(&r))
                };
                rep.push(id, anchor, ok, w);
            }
            (Err(e), _) | (_, Err(e)) => rep.push(id, anchor, false, e.to_string()),
        }
    }
    rep
}

/// Checks that the listed form letters are left invariant.
pub fn check_left_invariance(li: &LeftInvariance) -> Report {
    let o = li.calc.omega();
    let mut rep = Report::new(&format!("left invariance in {}", o.name()));
    match left_coaction_on_forms(&li.hopf, &li.calc) {
        Ok(m) => {
            let fails: Vec<String> = li
                .letters
                .iter()
                .filter(|&&x| {
                    *m.image(x)
                        != Tensor::from_polys(m.target().to_vec(), &[Poly::one(), Poly::letter(x)])
                })
                .map(|&x| format!("{}: {}", o.alphabet().letter_name(x), m.image(x).render()))
                .collect();
            rep.push_failures(
                format!("left-invariant[{}]", o.name()),
                "the left coaction sends each listed form to 1 (x) form",
                li.letters.len(),
                &fails,
            );
        }
        Err(e) => rep.push(
            format!("left-invariant[{}]", o.name()),
            "left coaction builds",
            false,
            e.to_string(),
        ),
    }
    rep
}

/// Compares the base forms of a bundle with the forms of a calculus on the
/// base, degree by degree, on words with at most `max_len` algebra letters.
pub fn check_base_calculus(b: &Bundle, bc: &Calculus, max_len: usize, max_deg: usize) -> Report {
    let mut rep = Report::new(&format!("base calculus of {}", b.name()));
    let o = b.acalc().omega().clone();
    let bo = bc.omega();
    let top = max_deg.min(b.acalc().max_degree()).min(bc.max_degree());
    for k in 0..=top {
        let base: Vec<_> = b
            .base_forms(k, max_len)
            .iter()
            .map(|p| p.as_map().clone())
            .collect();
        let mut expected = Vec::new();
        let mut missing = None;
        for w in bo.graded_basis(max_len, k) {
            let mut mapped = crate::freealg::Word::new();
            for &x in &w {
                match o.letter(&bo.alphabet().letter_name(x)) {
                    Ok(y) => mapped.push(y),
                    Err(_) => missing = Some(bo.alphabet().letter_name(x)),
                }
            }
            expected.push(o.nf(&Poly::word(mapped)).as_map().clone());
        }
        let expected = linalg::span_basis(&expected);
        let ok = missing.is_none() && linalg::same_span(&base, &expected);
        rep.push(
            format!("base.equals-base-calculus[{}, {k}]", b.name()),
            format!(
                "base forms of degree {k} are the forms of {} (x) 1",
                bo.name()
            ),
            ok,
            match missing {
                Some(m) => format!("letter {m} missing from the total space"),
                None => format!("dimensions {} and {}", base.len(), expected.len()),
            },
        );
    }
    rep
}

fn right_coaction(
    name: &str,
    a: &Arc<Presentation>,
    h: &Arc<HopfAlgebra>,
    images: &[(&str, &[&str])],
) -> Arc<Coaction> {
    let target = vec![a.clone(), h.pres().clone()];
    let imgs = images
        .iter()
        .map(|(x, hw)| {
            let x = a.letter(x).expect("generator");
            let w: crate::freealg::Word = hw
                .iter()
                .map(|n| h.pres().letter(n).expect("letter"))
                .collect();
            (
                x,
                Tensor::pure(target.clone(), vec![word(&[x]), w], Scalar::one()),
            )
        })
        .collect();
    Arc::new(Coaction::right(name, a.clone(), h, imgs).expect("coaction"))
}

fn expectation(
    b: &Bundle,
    label: &str,
    element: &str,
    k: usize,
    l: usize,
    value: &str,
) -> Expectation {
    let element = Context::forms(b.acalc())
        .parse(element)
        .expect("catalog element");
    let value = parse_tensor(value, &b.comps()).expect("catalog value");
    Expectation {
        label: label.to_string(),
        element,
        bidegree: (k, l),
        value,
    }
}

fn with_expectations(
    b: Bundle,
    inv: Arc<InvariantForms>,
    coaction: Arc<Coaction>,
    exp: &[(&str, &str, usize, usize, &str)],
) -> Arc<Bundle> {
    let expected = exp
        .iter()
        .map(|(lab, e, k, l, v)| expectation(&b, lab, e, *k, *l, v))
        .collect();
    let data = CompletenessData {
        forms: b.declared_forms().to_vec(),
        expected,
    };
    Arc::new(Bundle::new(b.name(), b.acalc().clone(), coaction, inv, data).expect("bundle"))
}

fn letters_cleaving(
    coaction: &Arc<Coaction>,
    h: &Arc<HopfAlgebra>,
    j: &[(&str, &str)],
    jinv: &[(&str, &str)],
) -> CleavingSpec {
    let a = coaction.source().clone();
    let table = |m: &[(&str, &str)]| -> Vec<(Letter, Poly)> {
        m.iter()
            .map(|(x, p)| {
                (
                    h.pres().letter(x).expect("letter"),
                    Context::new(&a).parse(p).expect("image"),
                )
            })
            .collect()
    };
    let (jt, jit) = (table(j), table(jinv));
    let cleaving = build_cleaving(coaction, h, &jt, &jit).expect("cleaving");
    CleavingSpec {
        j: jt,
        jinv: jit,
        cleaving,
    }
}

fn build_cleaving(
    coaction: &Arc<Coaction>,
    h: &Arc<HopfAlgebra>,
    j: &[(Letter, Poly)],
    jinv: &[(Letter, Poly)],
) -> Result<Arc<Cleaving>, String> {
    let a = coaction.source().clone();
    let jm = LinearMap::letters(
        "j",
        h,
        a.clone(),
        j.iter().cloned().collect(),
        Extension::NormalWords,
    )
    .map_err(|e| e.to_string())?;
    let jim = LinearMap::letters(
        "j^-1",
        h,
        a,
        jinv.iter().cloned().collect(),
        Extension::NormalWords,
    )
    .map_err(|e| e.to_string())?;
    Cleaving::new(coaction.clone(), h.clone(), Arc::new(jm), Arc::new(jim))
        .map(Arc::new)
        .map_err(|e| e.to_string())
}

fn group_z() -> Example {
    let mut ex = Example::empty(
        "group_z",
        "C[Z] over the ground field with the q-calculus dg g = q g dg",
        4,
        1,
    );
    let (h, c) = cz_calculus();
    let c = Arc::new(c);
    ex.add_hopf(&h);
    ex.add_calculus(&c);
    let co = right_coaction("regular", h.pres(), &h, &[("g", &["g"])]);
    let inv = Arc::new(group_like_invariant_forms(&h, &c, "g", "w").expect("invariant forms"));
    let b = Bundle::new(
        "group_z",
        c.clone(),
        co.clone(),
        inv.clone(),
        CompletenessData::default(),
    )
    .expect("bundle");
    let b = with_expectations(
        b,
        inv.clone(),
        co.clone(),
        &[("ver(dg)", "dg", 0, 1, "(g | dg)")],
    );
    ex.cleaving = Some(letters_cleaving(
        &co,
        &h,
        &[("g", "g"), ("g^-1", "g^-1")],
        &[("g", "g^-1"), ("g^-1", "g")],
    ));
    ex.coaction = Some(co);
    ex.invariant = Some(inv);
    ex.bundle = Some(b);
    ex
}

fn torus_example() -> Example {
    let mut ex = Example::empty(
        "torus",
        "the noncommutative torus v u = l u v as an O(U(1)) bundle",
        4,
        2,
    );
    let (h, hc) = u1_calculus(0);
    let hc = Arc::new(hc);
    let ac = Arc::new(torus_calculus());
    ex.add_hopf(&h);
    ex.add_calculus(&hc);
    ex.add_calculus(&ac);
    let co = right_coaction("torus", ac.base(), &h, &[("u", &["t"]), ("v", &["t^-1"])]);
    let inv = Arc::new(group_like_invariant_forms(&h, &hc, "t", "w").expect("invariant forms"));
    let b = Bundle::new(
        "torus",
        ac.clone(),
        co.clone(),
        inv.clone(),
        CompletenessData::default(),
    )
    .expect("bundle");
    let b = with_expectations(
        b,
        inv.clone(),
        co.clone(),
        &[
            ("ver(du)", "du", 0, 1, "(u | dt)"),
            ("ver(du v)", "du*v", 0, 1, "(u*v | dt*t^-1)"),
            ("ver(l^-1 v du)", "(l^-1)*v*du", 0, 1, "(u*v | dt*t^-1)"),
            (
                "ver11(du dv)",
                "du*dv",
                1,
                1,
                "-1*(u*dv + (l^-1)*v*du | dt*t^-1)",
            ),
            (
                "ver11(dv du)",
                "dv*du",
                1,
                1,
                "(l^1)*(u*dv + (l^-1)*v*du | dt*t^-1)",
            ),
        ],
    );
    ex.cleaving = Some(letters_cleaving(
        &co,
        &h,
        &[("t", "u"), ("t^-1", "v")],
        &[("t", "u^-1"), ("t^-1", "v^-1")],
    ));
    ex.coaction = Some(co);
    ex.invariant = Some(inv);
    ex.bundle = Some(b);
    ex
}

fn qsu2_hopf() -> Example {
    let mut ex = Example::empty(
        "qsu2_hopf",
        "the quantum Hopf fibration O_q(SU(2)) over the Podles sphere",
        3,
        3,
    );
    let (h, hc) = u1_calculus(2);
    let hc = Arc::new(hc);
    let su = suq2();
    let ac = Arc::new(suq2_calculus());
    ex.add_hopf(&h);
    ex.add_hopf(&su);
    ex.add_calculus(&hc);
    ex.add_calculus(&ac);
    let co = right_coaction(
        "hopf_fibration",
        ac.base(),
        &h,
        &[
            ("alpha", &["t"]),
            ("beta", &["t^-1"]),
            ("gamma", &["t"]),
            ("delta", &["t^-1"]),
        ],
    );
    let inv = Arc::new(group_like_invariant_forms(&h, &hc, "t", "w").expect("invariant forms"));
    let b = Bundle::new(
        "qsu2_hopf",
        ac.clone(),
        co.clone(),
        inv.clone(),
        CompletenessData::default(),
    )
    .expect("bundle");
    let b = with_expectations(
        b,
        inv.clone(),
        co.clone(),
        &[
            ("ver(ep)", "ep", 0, 1, "0"),
            ("ver(em)", "em", 0, 1, "0"),
            ("ver(e0)", "e0", 0, 1, "(1 | t^-1*dt)"),
            ("ver11(ep e0)", "ep*e0", 1, 1, "(ep | t*dt)"),
            ("ver11(em e0)", "em*e0", 1, 1, "(em | t^-3*dt)"),
            ("ver11(d e0)", "d(e0)", 1, 1, "0"),
            ("ver11(d ep)", "d(ep)", 1, 1, "(-q^2 - 1)*(ep | t*dt)"),
            ("ver11(d em)", "d(em)", 1, 1, "(q^-2 + q^-4)*(em | t^-3*dt)"),
            ("ver21(ep em e0)", "ep*em*e0", 2, 1, "(ep*em | t^-1*dt)"),
            ("ver21(d(ep em))", "d(ep*em)", 2, 1, "0"),
        ],
    );
    ex.identities = Some(IdentitySet {
        calc: ac.clone(),
        lets: vec![
            ("z".into(), "gamma*delta".into()),
            ("x".into(), "-q^-1*beta*gamma".into()),
            ("zbar".into(), "-q*alpha*beta".into()),
        ],
        items: vec![
            (
                "podles-delta-ep".into(),
                "delta*ep".into(),
                "alpha*d(z) + q^-1*gamma*d(x)".into(),
            ),
            (
                "podles-beta-ep".into(),
                "beta*ep".into(),
                "q^-2*gamma*d(zbar) - q*alpha*d(x)".into(),
            ),
            (
                "podles-alpha-em".into(),
                "alpha*em".into(),
                "q^2*beta*d(x) - q^-1*delta*d(zbar)".into(),
            ),
            (
                "podles-gamma-em".into(),
                "gamma*em".into(),
                "-delta*d(x) - q*beta*d(z)".into(),
            ),
            (
                "witness-ep".into(),
                "ep".into(),
                "q^-1*alpha*d(gamma) - q^-2*gamma*d(alpha)".into(),
            ),
            (
                "witness-em".into(),
                "em".into(),
                "delta*d(beta) - q*beta*d(delta)".into(),
            ),
            (
                "witness-e0".into(),
                "e0".into(),
                "delta*d(alpha) - q*beta*d(gamma)".into(),
            ),
        ],
    });
    let o = ac.omega();
    ex.left_invariant.push(LeftInvariance {
        hopf: su,
        calc: ac.clone(),
        letters: ["ep", "em", "e0"]
            .iter()
            .map(|n| o.letter(n).expect("form"))
            .collect(),
    });
    ex.coaction = Some(co);
    ex.invariant = Some(inv);
    ex.bundle = Some(b);
    ex
}

fn smash_demo() -> Example {
    let mut ex = Example::empty(
        "smash_demo",
        "C[x] # O(U(1)) with the trivial action and the product calculus",
        3,
        2,
    );
    let bc = Arc::new(line_calculus("C[x]", "x", false));
    let (h, hc) = u1_calculus(2);
    let hc = Arc::new(hc);
    let data = SmashData::trivial(bc.base().clone(), h.clone());
    let sc = crossed_product_calculus("C[x]#O(U(1))", &bc, &hc, &h, &data).expect("smash calculus");
    ex.add_hopf(&h);
    ex.add_calculus(&hc);
    ex.add_algebra(bc.base());
    ex.add_calculus(&bc);
    ex.add_calculus(&sc.calc);
    let inv = Arc::new(group_like_invariant_forms(&h, &hc, "t", "w").expect("invariant forms"));
    let b = Bundle::new(
        "smash_demo",
        sc.calc.clone(),
        sc.coaction.clone(),
        inv.clone(),
        CompletenessData::default(),
    )
    .expect("bundle");
    ex.coaction = Some(sc.coaction.clone());
    ex.invariant = Some(inv);
    ex.bundle = Some(Arc::new(b));
    ex.base_calculus = Some(bc);
    ex
}

fn crossed_demo() -> Example {
    let mut ex = Example::empty(
        "crossed_demo",
        "the crossed product C[z,z^-1] #_sigma O(U(1)) induced by the torus cleaving",
        3,
        2,
    );
    let h = u1();
    let (_, hc) = u1_calculus(0);
    let hc = Arc::new(hc);
    let a = torus();
    let bc = Arc::new(line_calculus("C[z,z^-1]", "z", true));
    ex.add_hopf(&h);
    ex.add_algebra(&a);
    ex.add_calculus(&hc);
    ex.add_calculus(&bc);
    let co = right_coaction("torus", &a, &h, &[("u", &["t"]), ("v", &["t^-1"])]);
    ex.cleaving = Some(letters_cleaving(
        &co,
        &h,
        &[("t", "u"), ("t^-1", "v")],
        &[("t", "u^-1"), ("t^-1", "v^-1")],
    ));
    let z = bc.base().letter("z").expect("z");
    ex.crossed = Some(CrossedSpec {
        base: bc.base().clone(),
        embedding: vec![(z, Context::new(&a).parse("u*v").expect("uv"))],
        base_len: 3,
        calculus: Some(bc),
    });
    ex.coaction = Some(co);
    ex
}

fn hopf_only(name: &str, h: Arc<HopfAlgebra>, description: &str) -> Example {
    let mut ex = Example::empty(name, description, 4, 0);
    ex.add_hopf(&h);
    ex
}

/// Loads a catalog entry by name.
pub fn load_example(name: &str) -> Result<Example, CatalogError> {
    Ok(match name {
        "group_z" => group_z(),
        "torus" => torus_example(),
        "qsu2_hopf" => qsu2_hopf(),
        "smash_demo" => smash_demo(),
        "crossed_demo" => crossed_demo(),
        "u1" => hopf_only("u1", u1(), "O(U(1)) = C[t, t^-1]"),
        "cz" => hopf_only("cz", cz(), "the group algebra C[Z]"),
        "slq2" => hopf_only("slq2", slq2(), "the quantum group SL_q(2)"),
        "suq2" => hopf_only("suq2", suq2(), "the quantum group O_q(SU(2))"),
        other => return Err(CatalogError::UnknownExample(other.to_string())),
    })
}

/// All catalog names, bundles first.
pub fn example_names() -> Vec<&'static str> {
    BUNDLES.iter().chain(HOPF_ENTRIES.iter()).copied().collect()
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

fn render_generator(g: &Generator) -> String {
    let mut s = format!("gen {}", g.name);
    if g.invertible {
        s.push_str(" inv");
    }
    if g.weight != 0 {
        let _ = write!(s, " weight {}", g.weight);
    }
    if g.order_weight != 1 {
        let _ = write!(s, " order {}", g.order_weight);
    }
    if g.kind == LetterKind::Form {
        s.push_str(" form");
    }
    s
}

fn render_body(out: &mut String, pres: &Presentation, prefix: Option<&Presentation>) {
    let skip = prefix.map_or(0, |p| p.alphabet().generators().len());
    for g in pres.alphabet().generators().iter().skip(skip) {
        let _ = writeln!(out, "  {}", render_generator(g));
    }
    let prefix_rules = prefix.map_or(0, |p| p.rules().iter().filter(|r| !r.derived).count());
    for r in pres
        .rules()
        .iter()
        .filter(|r| !r.derived)
        .skip(prefix_rules)
    {
        let _ = writeln!(out, "  rule {}", pres.render_rule(r));
    }
}

fn render_witness(w: &[(Poly, Poly)], base: &Presentation) -> String {
    w.iter()
        .map(|(a, b)| format!("{} , {}", base.render(a), base.render(b)))
        .collect::<Vec<_>>()
        .join(" ; ")
}

/// Writes an example in the bundle file format.
pub fn export(ex: &Example) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "example {}", ex.name);
    let _ = writeln!(out, "description {}", ex.description);
    let _ = writeln!(out, "bounds {} {}", ex.max_len, ex.max_deg);
    for a in &ex.algebras {
        let _ = writeln!(out, "\nalgebra {}", a.name());
        render_body(&mut out, a, None);
    }
    for h in &ex.hopfs {
        let p = h.pres();
        let _ = writeln!(out, "\nhopf {}", p.name());
        for g in p.alphabet().generators() {
            let x = p.letter(&g.name).expect("generator");
            let _ = writeln!(
                out,
                "  coproduct {} = {}",
                g.name,
                h.delta().image(x).render()
            );
            let _ = writeln!(out, "  counit {} = {}", g.name, h.counit_word(&[x]));
            let _ = writeln!(
                out,
                "  antipode {} = {}",
                g.name,
                p.render(&h.antipode_word(&[x]))
            );
        }
    }
    for c in &ex.calculi {
        let (o, a) = (c.omega(), c.base());
        let _ = writeln!(out, "\ncalculus {} over {}", o.name(), a.name());
        let _ = writeln!(out, "  degree {}", c.max_degree());
        render_body(&mut out, o, Some(a));
        for x in a
            .alphabet()
            .letters()
            .filter(|&x| !a.alphabet().info(x).is_inverse)
        {
            let _ = writeln!(
                out,
                "  d {} = {}",
                a.alphabet().letter_name(x),
                o.render(c.d_image(x))
            );
        }
        for x in c.form_letters() {
            if c.exact_letter(x).is_some() {
                continue;
            }
            let _ = writeln!(
                out,
                "  d {} = {}",
                o.alphabet().letter_name(x),
                o.render(c.d_image(x))
            );
            if let Some(w) = c.surjectivity_witness(x) {
                let _ = writeln!(
                    out,
                    "  witness {} = {}",
                    o.alphabet().letter_name(x),
                    render_witness(&w, a)
                );
            }
        }
    }
    if let Some(co) = &ex.coaction {
        let a = co.source();
        let _ = writeln!(
            out,
            "\ncoaction {} on {} by {}",
            co.name(),
            a.name(),
            co.coalgebra_space().name()
        );
        for x in a
            .alphabet()
            .letters()
            .filter(|&x| !a.alphabet().info(x).is_inverse)
        {
            let _ = writeln!(
                out,
                "  image {} = {}",
                a.alphabet().letter_name(x),
                co.morphism().image(x).render()
            );
        }
    }
    if let Some(inv) = &ex.invariant {
        let lp = inv.pres();
        let _ = writeln!(
            out,
            "\ninvariant {} for {} with {}",
            lp.name(),
            inv.hopf().pres().name(),
            inv.hcalc().omega().name()
        );
        render_body(&mut out, lp, None);
        let oh = inv.hcalc().omega();
        for (x, p) in inv.embedding() {
            let _ = writeln!(
                out,
                "  embed {} = {}",
                lp.alphabet().letter_name(x),
                oh.render(&p)
            );
        }
        let ha = inv.hopf().pres().alphabet();
        for ((t, a), p) in inv.declared_hooks() {
            let _ = writeln!(
                out,
                "  hook {} {} = {}",
                lp.alphabet().letter_name(t),
                ha.letter_name(a),
                lp.render(&p)
            );
        }
        for (x, p) in inv.declared_differentials() {
            let _ = writeln!(
                out,
                "  d {} = {}",
                lp.alphabet().letter_name(x),
                lp.render(&p)
            );
        }
    }
    if let Some(b) = &ex.bundle {
        let _ = writeln!(out, "\nbundle {}", b.name());
        let _ = writeln!(out, "  calculus {}", b.acalc().omega().name());
        let _ = writeln!(out, "  coaction {}", b.coaction().name());
        let _ = writeln!(out, "  invariant {}", b.invariant_forms().pres().name());
        let oa = b.acalc().omega().alphabet();
        for (x, t) in b.declared_forms() {
            let _ = writeln!(out, "  total {} = {}", oa.letter_name(*x), t.render());
        }
        for e in b.expectations() {
            let _ = writeln!(
                out,
                "  expect {} : {} {} : {} = {}",
                e.label,
                e.bidegree.0,
                e.bidegree.1,
                b.acalc().omega().render(&e.element),
                e.value.render()
            );
        }
    }
    if let Some(c) = &ex.cleaving {
        let ha = c.cleaving.hopf().pres().alphabet().clone();
        let a = c.cleaving.total().clone();
        let _ = writeln!(out, "\ncleaving");
        for (x, p) in &c.j {
            let _ = writeln!(out, "  j {} = {}", ha.letter_name(*x), a.render(p));
        }
        for (x, p) in &c.jinv {
            let _ = writeln!(out, "  jinv {} = {}", ha.letter_name(*x), a.render(p));
        }
    }
    if let Some(x) = &ex.crossed {
        let _ = writeln!(out, "\ncrossed {} {}", x.base.name(), x.base_len);
        let a = ex.total_algebra().expect("total space");
        for (z, p) in &x.embedding {
            let _ = writeln!(
                out,
                "  embed {} = {}",
                x.base.alphabet().letter_name(*z),
                a.render(p)
            );
        }
        if let Some(c) = &x.calculus {
            let _ = writeln!(out, "  calculus {}", c.omega().name());
        }
    }
    if let Some(ids) = &ex.identities {
        let _ = writeln!(out, "\nidentities {}", ids.calc.omega().name());
        for (n, src) in &ids.lets {
            let _ = writeln!(out, "  let {n} = {src}");
        }
        for (label, l, r) in &ids.items {
            let _ = writeln!(out, "  identity {label} : {l} = {r}");
        }
    }
    for li in &ex.left_invariant {
        let o = li.calc.omega();
        let names: Vec<String> = li
            .letters
            .iter()
            .map(|&x| o.alphabet().letter_name(x))
            .collect();
        let _ = writeln!(
            out,
            "\nleft-invariant {} on {} : {}",
            li.hopf.pres().name(),
            o.name(),
            names.join(" ")
        );
    }
    if let Some(bc) = &ex.base_calculus {
        let _ = writeln!(out, "\nbase-calculus {}", bc.omega().name());
    }
    out
}

#[derive(Default)]
struct Section {
    header: Vec<String>,
    line: usize,
    body: Vec<(usize, String)>,
}

fn split_sections(src: &str) -> Result<Vec<Section>, CatalogError> {
    const HEADERS: [&str; 14] = [
        "example",
        "description",
        "bounds",
        "algebra",
        "hopf",
        "calculus",
        "coaction",
        "invariant",
        "bundle",
        "cleaving",
        "crossed",
        "identities",
        "left-invariant",
        "base-calculus",
    ];
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indented = raw.starts_with(' ') || raw.starts_with('\t');
        let first = trimmed.split_whitespace().next().unwrap_or("");
        if !indented && HEADERS.contains(&first) {
            let header = if first == "description" {
                vec![first.to_string(), trimmed[first.len()..].trim().to_string()]
            } else {
                trimmed.split_whitespace().map(str::to_string).collect()
            };
            out.push(Section {
                header,
                line: i + 1,
                body: Vec::new(),
            });
        } else {
            match out.last_mut() {
                Some(s) => s.body.push((i + 1, trimmed.to_string())),
                None => {
                    return Err(CatalogError::Syntax {
                        line: i + 1,
                        msg: "content before any section".into(),
                    })
                }
            }
        }
    }
    Ok(out)
}

fn syn(line: usize, msg: impl Into<String>) -> CatalogError {
    CatalogError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn bld(line: usize, e: impl std::fmt::Display) -> CatalogError {
    CatalogError::Build {
        line,
        msg: e.to_string(),
    }
}

fn perr(line: usize, e: ParseError) -> CatalogError {
    match e {
        ParseError::Syntax { pos, msg } => syn(line, format!("column {pos}: {msg}")),
        other => bld(line, other),
    }
}

/// Splits `key rest = value` into `(rest, value)`.
fn key_value<'s>(line: usize, s: &'s str, key: &str) -> Result<(&'s str, &'s str), CatalogError> {
    let rest = s[key.len()..].trim();
    let (l, r) = rest
        .split_once('=')
        .ok_or_else(|| syn(line, format!("expected `{key} ... = ...`")))?;
    Ok((l.trim(), r.trim()))
}

fn parse_generator(line: usize, s: &str) -> Result<Generator, CatalogError> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    let name = toks
        .get(1)
        .ok_or_else(|| syn(line, "generator needs a name"))?;
    let mut g = Generator::algebra(name);
    let mut i = 2;
    while i < toks.len() {
        match toks[i] {
            "inv" => g = g.inv(),
            "form" => g.kind = LetterKind::Form,
            "weight" | "order" => {
                let v: i64 = toks
                    .get(i + 1)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| syn(line, format!("`{}` needs an integer", toks[i])))?;
                if toks[i] == "weight" {
                    g = g.weight(v as i32);
                } else {
                    g = g.order(v as u32);
                }
                i += 1;
            }
            other => return Err(syn(line, format!("unknown generator flag `{other}`"))),
        }
        i += 1;
    }
    Ok(g)
}

/// Adds `gen` and `rule` lines to a builder; returns the remaining lines.
fn build_presentation(
    mut b: PresentationBuilder,
    body: &[(usize, String)],
    header_line: usize,
) -> Result<(Presentation, Vec<(usize, String)>), CatalogError> {
    let mut rest = Vec::new();
    let mut rules = Vec::new();
    for (ln, s) in body {
        if s.starts_with("gen ") {
            b.generator(parse_generator(*ln, s)?)
                .map_err(|e| bld(*ln, e))?;
        } else if s.starts_with("rule ") {
            rules.push((*ln, s.clone()));
        } else {
            rest.push((*ln, s.clone()));
        }
    }
    for (ln, s) in rules {
        let body = s["rule".len()..].trim();
        let (l, r) = body
            .split_once("->")
            .ok_or_else(|| syn(ln, "expected `rule lhs -> rhs`"))?;
        let alphabet = b.alphabet().clone();
        let ctx = Context::raw(&alphabet);
        let lhs = ctx.parse(l).map_err(|e| perr(ln, e))?;
        let rhs = ctx.parse(r).map_err(|e| perr(ln, e))?;
        let (w, c) = match lhs.terms().next() {
            Some((w, c)) if lhs.len() == 1 => (w.clone(), c.clone()),
            _ => return Err(syn(ln, "a rule needs a single word on the left")),
        };
        if !c.is_one() {
            return Err(syn(ln, "a rule needs a single word on the left"));
        }
        b.rule(&w, rhs);
    }
    let p = b.build().map_err(|e| bld(header_line, e))?;
    Ok((p, rest))
}

fn lookup<'m, T>(
    map: &'m HashMap<String, T>,
    line: usize,
    kind: &str,
    name: &str,
) -> Result<&'m T, CatalogError> {
    map.get(name)
        .ok_or_else(|| bld(line, format!("unknown {kind} `{name}`")))
}

/// Reads an example from the bundle file format.
pub fn parse_example(src: &str) -> Result<Example, CatalogError> {
    let sections = split_sections(src)?;
    let mut ex = Example::empty("unnamed", "", 4, 2);
    let mut algebras: HashMap<String, Arc<Presentation>> = HashMap::new();
    let mut hopfs: HashMap<String, Arc<HopfAlgebra>> = HashMap::new();
    let mut calculi: HashMap<String, Arc<Calculus>> = HashMap::new();
    let mut coactions: HashMap<String, Arc<Coaction>> = HashMap::new();
    let mut invariants: HashMap<String, Arc<InvariantForms>> = HashMap::new();
    for sec in &sections {
        let h = &sec.header;
        let ln = sec.line;
        let arg = |i: usize| {
            h.get(i)
                .map(String::as_str)
                .ok_or_else(|| syn(ln, format!("`{}` header is incomplete", h[0])))
        };
        match h[0].as_str() {
            "example" => ex.name = arg(1)?.to_string(),
            "description" => ex.description = h.get(1).cloned().unwrap_or_default(),
            "bounds" => {
                ex.max_len = arg(1)?
                    .parse()
                    .map_err(|_| syn(ln, "bounds need integers"))?;
                ex.max_deg = arg(2)?
                    .parse()
                    .map_err(|_| syn(ln, "bounds need integers"))?;
            }
            "algebra" => {
                let (p, rest) =
                    build_presentation(PresentationBuilder::new(arg(1)?), &sec.body, ln)?;
                if let Some((l, s)) = rest.first() {
                    return Err(syn(*l, format!("unexpected `{s}` in an algebra section")));
                }
                let p = Arc::new(p);
                algebras.insert(p.name().to_string(), p.clone());
                ex.add_algebra(&p);
            }
            "hopf" => {
                let p = lookup(&algebras, ln, "algebra", arg(1)?)?.clone();
                let two = vec![p.clone(), p.clone()];
                let (mut co, mut eps, mut s) = (Vec::new(), Vec::new(), Vec::new());
                for (l, line) in &sec.body {
                    let key = line.split_whitespace().next().unwrap_or("");
                    let (x, v) = key_value(*l, line, key)?;
                    let x = p.letter(x).map_err(|e| bld(*l, e))?;
                    match key {
                        "coproduct" => {
                            co.push((x, parse_tensor(v, &two).map_err(|e| perr(*l, e))?))
                        }
                        "counit" => {
                            eps.push((x, crate::text::parse_scalar(v).map_err(|e| perr(*l, e))?))
                        }
                        "antipode" => {
                            s.push((x, Context::new(&p).parse(v).map_err(|e| perr(*l, e))?))
                        }
                        other => return Err(syn(*l, format!("unknown hopf entry `{other}`"))),
                    }
                }
                let hopf =
                    Arc::new(HopfAlgebra::new(p.clone(), co, eps, s).map_err(|e| bld(ln, e))?);
                hopfs.insert(p.name().to_string(), hopf.clone());
                ex.add_hopf(&hopf);
            }
            "calculus" => {
                if arg(2)? != "over" {
                    return Err(syn(ln, "expected `calculus NAME over ALGEBRA`"));
                }
                let base = lookup(&algebras, ln, "algebra", arg(3)?)?.clone();
                let (omega, rest) =
                    build_presentation(PresentationBuilder::extend(&base, arg(1)?), &sec.body, ln)?;
                let omega = Arc::new(omega);
                let oa = omega.alphabet();
                let mut degree = 1;
                let (mut d_alg, mut d_forms, mut witnesses) = (Vec::new(), Vec::new(), Vec::new());
                for (l, line) in &rest {
                    let key = line.split_whitespace().next().unwrap_or("");
                    match key {
                        "degree" => {
                            degree = line[key.len()..]
                                .trim()
                                .parse()
                                .map_err(|_| syn(*l, "degree needs an integer"))?;
                        }
                        "d" => {
                            let (x, v) = key_value(*l, line, key)?;
                            let x = omega.letter(x).map_err(|e| bld(*l, e))?;
                            let p = Context::new(&omega).parse(v).map_err(|e| perr(*l, e))?;
                            if oa.is_form(x) {
                                d_forms.push((x, p));
                            } else {
                                d_alg.push((x, p));
                            }
                        }
                        "witness" => {
                            let (x, v) = key_value(*l, line, key)?;
                            let x = omega.letter(x).map_err(|e| bld(*l, e))?;
                            let mut pairs = Vec::new();
                            for part in v.split(';') {
                                let (a, b) = part
                                    .split_once(',')
                                    .ok_or_else(|| syn(*l, "witness pairs are `a , b`"))?;
                                let ctx = Context::new(&base);
                                pairs.push((
                                    ctx.parse(a).map_err(|e| perr(*l, e))?,
                                    ctx.parse(b).map_err(|e| perr(*l, e))?,
                                ));
                            }
                            witnesses.push((x, pairs));
                        }
                        other => return Err(syn(*l, format!("unknown calculus entry `{other}`"))),
                    }
                }
                let c = Arc::new(
                    Calculus::new(base, omega, d_alg, d_forms, witnesses, degree)
                        .map_err(|e| bld(ln, e))?,
                );
                calculi.insert(c.omega().name().to_string(), c.clone());
                ex.add_calculus(&c);
            }
            "coaction" => {
                if arg(2)? != "on" || arg(4)? != "by" {
                    return Err(syn(ln, "expected `coaction NAME on ALGEBRA by HOPF`"));
                }
                let a = lookup(&algebras, ln, "algebra", arg(3)?)?.clone();
                let hopf = lookup(&hopfs, ln, "Hopf algebra", arg(5)?)?.clone();
                let comps = vec![a.clone(), hopf.pres().clone()];
                let mut images = Vec::new();
                for (l, line) in &sec.body {
                    let (x, v) = key_value(*l, line, "image")?;
                    let x = a.letter(x).map_err(|e| bld(*l, e))?;
                    images.push((x, parse_tensor(v, &comps).map_err(|e| perr(*l, e))?));
                }
                let co =
                    Arc::new(Coaction::right(arg(1)?, a, &hopf, images).map_err(|e| bld(ln, e))?);
                coactions.insert(co.name().to_string(), co.clone());
                ex.coaction = Some(co);
            }
            "invariant" => {
                if arg(2)? != "for" || arg(4)? != "with" {
                    return Err(syn(ln, "expected `invariant NAME for HOPF with CALCULUS`"));
                }
                let hopf = lookup(&hopfs, ln, "Hopf algebra", arg(3)?)?.clone();
                let hcalc = lookup(&calculi, ln, "calculus", arg(5)?)?.clone();
                let (lp, rest) =
                    build_presentation(PresentationBuilder::new(arg(1)?), &sec.body, ln)?;
                let lp = Arc::new(lp);
                let (mut embed, mut hooks, mut ds) = (Vec::new(), Vec::new(), Vec::new());
                for (l, line) in &rest {
                    let key = line.split_whitespace().next().unwrap_or("");
                    let (x, v) = key_value(*l, line, key)?;
                    match key {
                        "embed" => {
                            let x = lp.letter(x).map_err(|e| bld(*l, e))?;
                            embed.push((
                                x,
                                Context::new(hcalc.omega())
                                    .parse(v)
                                    .map_err(|e| perr(*l, e))?,
                            ));
                        }
                        "hook" => {
                            let (t, a) = x
                                .split_once(' ')
                                .ok_or_else(|| syn(*l, "expected `hook THETA GEN = ...`"))?;
                            let t = lp.letter(t.trim()).map_err(|e| bld(*l, e))?;
                            let a = hopf.pres().letter(a.trim()).map_err(|e| bld(*l, e))?;
                            hooks.push((
                                (t, a),
                                Context::new(&lp).parse(v).map_err(|e| perr(*l, e))?,
                            ));
                        }
                        "d" => {
                            let x = lp.letter(x).map_err(|e| bld(*l, e))?;
                            ds.push((x, Context::new(&lp).parse(v).map_err(|e| perr(*l, e))?));
                        }
                        other => return Err(syn(*l, format!("unknown invariant entry `{other}`"))),
                    }
                }
                let inv = Arc::new(
                    InvariantForms::new(hopf, hcalc, lp, embed, hooks, ds)
                        .map_err(|e| bld(ln, e))?,
                );
                invariants.insert(inv.pres().name().to_string(), inv.clone());
                ex.invariant = Some(inv);
            }
            "bundle" => {
                let name = arg(1)?;
                let mut calc = None;
                let mut coaction = None;
                let mut inv = None;
                let mut totals = Vec::new();
                let mut expects = Vec::new();
                for (l, line) in &sec.body {
                    let key = line.split_whitespace().next().unwrap_or("");
                    let rest = line[key.len()..].trim();
                    match key {
                        "calculus" => calc = Some(lookup(&calculi, *l, "calculus", rest)?.clone()),
                        "coaction" => {
                            coaction = Some(lookup(&coactions, *l, "coaction", rest)?.clone())
                        }
                        "invariant" => {
                            inv = Some(lookup(&invariants, *l, "invariant forms", rest)?.clone())
                        }
                        "total" => totals.push((*l, line.clone())),
                        "expect" => expects.push((*l, rest.to_string())),
                        other => return Err(syn(*l, format!("unknown bundle entry `{other}`"))),
                    }
                }
                let calc = calc.ok_or_else(|| syn(ln, "bundle needs a calculus"))?;
                let coaction = coaction.ok_or_else(|| syn(ln, "bundle needs a coaction"))?;
                let inv = inv.ok_or_else(|| syn(ln, "bundle needs invariant forms"))?;
                let comps = vec![calc.omega().clone(), inv.hcalc().omega().clone()];
                let mut data = CompletenessData::default();
                for (l, line) in totals {
                    let (x, v) = key_value(l, &line, "total")?;
                    let x = calc.omega().letter(x).map_err(|e| bld(l, e))?;
                    data.forms
                        .push((x, parse_tensor(v, &comps).map_err(|e| perr(l, e))?));
                }
                for (l, rest) in expects {
                    let parts: Vec<&str> = rest.splitn(3, ':').collect();
                    if parts.len() != 3 {
                        return Err(syn(l, "expected `expect LABEL : K L : ELEMENT = VALUE`"));
                    }
                    let degs: Vec<usize> = parts[1]
                        .split_whitespace()
                        .filter_map(|x| x.parse().ok())
                        .collect();
                    if degs.len() != 2 {
                        return Err(syn(l, "expected two degrees"));
                    }
                    let (e, v) = parts[2]
                        .split_once('=')
                        .ok_or_else(|| syn(l, "expected `ELEMENT = VALUE`"))?;
                    data.expected.push(Expectation {
                        label: parts[0].trim().to_string(),
                        element: Context::forms(&calc).parse(e).map_err(|er| perr(l, er))?,
                        bidegree: (degs[0], degs[1]),
                        value: parse_tensor(v, &comps).map_err(|er| perr(l, er))?,
                    });
                }
                let b = Bundle::new(name, calc, coaction, inv, data).map_err(|e| bld(ln, e))?;
                ex.bundle = Some(Arc::new(b));
            }
            "cleaving" => {
                let co = ex
                    .coaction
                    .clone()
                    .ok_or_else(|| bld(ln, "cleaving needs a coaction"))?;
                let hopf = lookup(&hopfs, ln, "Hopf algebra", co.coalgebra_space().name())?.clone();
                let a = co.source().clone();
                let (mut j, mut jinv) = (Vec::new(), Vec::new());
                for (l, line) in &sec.body {
                    let key = line.split_whitespace().next().unwrap_or("");
                    let (x, v) = key_value(*l, line, key)?;
                    let x = hopf.pres().letter(x).map_err(|e| bld(*l, e))?;
                    let p = Context::new(&a).parse(v).map_err(|e| perr(*l, e))?;
                    match key {
                        "j" => j.push((x, p)),
                        "jinv" => jinv.push((x, p)),
                        other => return Err(syn(*l, format!("unknown cleaving entry `{other}`"))),
                    }
                }
                let cleaving = build_cleaving(&co, &hopf, &j, &jinv).map_err(|e| bld(ln, e))?;
                ex.cleaving = Some(CleavingSpec { j, jinv, cleaving });
            }
            "crossed" => {
                let base = lookup(&algebras, ln, "algebra", arg(1)?)?.clone();
                let base_len = arg(2)?
                    .parse()
                    .map_err(|_| syn(ln, "base length must be an integer"))?;
                let a = ex
                    .coaction
                    .as_ref()
                    .map(|c| c.source().clone())
                    .ok_or_else(|| bld(ln, "crossed needs a coaction"))?;
                let mut embedding = Vec::new();
                let mut calc = None;
                for (l, line) in &sec.body {
                    let key = line.split_whitespace().next().unwrap_or("");
                    match key {
                        "embed" => {
                            let (x, v) = key_value(*l, line, key)?;
                            let x = base.letter(x).map_err(|e| bld(*l, e))?;
                            embedding
                                .push((x, Context::new(&a).parse(v).map_err(|e| perr(*l, e))?));
                        }
                        "calculus" => {
                            calc = Some(
                                lookup(&calculi, *l, "calculus", line[key.len()..].trim())?.clone(),
                            )
                        }
                        other => return Err(syn(*l, format!("unknown crossed entry `{other}`"))),
                    }
                }
                ex.crossed = Some(CrossedSpec {
                    base,
                    embedding,
                    base_len,
                    calculus: calc,
                });
            }
            "identities" => {
                let calc = lookup(&calculi, ln, "calculus", arg(1)?)?.clone();
                let mut set = IdentitySet {
                    calc,
                    lets: Vec::new(),
                    items: Vec::new(),
                };
                for (l, line) in &sec.body {
                    let key = line.split_whitespace().next().unwrap_or("");
                    match key {
                        "let" => {
                            let (n, v) = key_value(*l, line, key)?;
                            set.lets.push((n.to_string(), v.to_string()));
                        }
                        "identity" => {
                            let rest = line[key.len()..].trim();
                            let (label, eq) = rest
                                .split_once(':')
                                .ok_or_else(|| syn(*l, "expected `identity LABEL : LHS = RHS`"))?;
                            let (lhs, rhs) = eq
                                .split_once('=')
                                .ok_or_else(|| syn(*l, "expected `LHS = RHS`"))?;
                            set.items.push((
                                label.trim().to_string(),
                                lhs.trim().to_string(),
                                rhs.trim().to_string(),
                            ));
                        }
                        other => {
                            return Err(syn(*l, format!("unknown identities entry `{other}`")))
                        }
                    }
                }
                ex.identities = Some(set);
            }
            "left-invariant" => {
                if arg(2)? != "on" || arg(4)? != ":" {
                    return Err(syn(
                        ln,
                        "expected `left-invariant HOPF on CALCULUS : LETTERS`",
                    ));
                }
                let hopf = lookup(&hopfs, ln, "Hopf algebra", arg(1)?)?.clone();
                let calc = lookup(&calculi, ln, "calculus", arg(3)?)?.clone();
                let letters = h[5..]
                    .iter()
                    .map(|n| calc.omega().letter(n).map_err(|e| bld(ln, e)))
                    .collect::<Result<Vec<_>, _>>()?;
                ex.left_invariant.push(LeftInvariance {
                    hopf,
                    calc,
                    letters,
                });
            }
            "base-calculus" => {
                ex.base_calculus = Some(lookup(&calculi, ln, "calculus", arg(1)?)?.clone());
            }
            other => return Err(syn(ln, format!("unknown section `{other}`"))),
        }
    }
    Ok(ex)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_example() {
        assert_eq!(
            load_example("nope").unwrap_err(),
            CatalogError::UnknownExample("nope".into())
        );
    }

    #[test]
    fn torus_entry_shape() {
        let ex = load_example("torus").unwrap();
        let a = ex.total_algebra().unwrap();
        assert_eq!(a.render_rule(&a.rules()[0]), "v*u -> (l^1)*u*v");
        let co = ex.coaction.as_ref().unwrap();
        assert_eq!(
            co.morphism().image(a.letter("u").unwrap()).render(),
            "(u | t)"
        );
        assert_eq!(
            co.morphism().image(a.letter("v").unwrap()).render(),
            "(v | t^-1)"
        );
    }

    #[test]
    fn group_z_differential_of_powers() {
        let ex = load_example("group_z").unwrap();
        let c = ex.total_calculus().unwrap();
        let g = c.base().letter("g").unwrap();
        for n in 1..5usize {
            let p = Poly::word(vec![g; n].into_iter().collect());
            let expected = mono(
                Scalar::q_int(n as i32),
                &vec![g; n - 1]
                    .into_iter()
                    .chain([c.omega().letter("dg").unwrap()])
                    .collect::<Vec<_>>(),
            );
            assert_eq!(c.d(&p).unwrap(), expected);
        }
    }

    #[test]
    fn qsu2_witness_is_in_the_catalog() {
        let ex = load_example("qsu2_hopf").unwrap();
        let ids = check_identities(ex.identities.as_ref().unwrap());
        assert!(ids.all_passed(), "{}", ids.to_text());
    }

    #[test]
    fn printed_podles_form_fails() {
        let ex = load_example("qsu2_hopf").unwrap();
        let mut ids = ex.identities.clone().unwrap();
        ids.items = vec![(
            "printed".into(),
            "beta*ep".into(),
            "q^-2*gamma*d(z) - q*alpha*d(x)".into(),
        )];
        assert!(!check_identities(&ids).all_passed());
    }

    #[test]
    fn export_round_trips() {
        for name in example_names() {
            let ex = load_example(name).unwrap();
            let text = export(&ex);
            let back = parse_example(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
            assert_eq!(export(&back), text, "{name}");
        }
    }

    #[test]
    fn syntax_errors_name_the_line() {
        let src = "example x\nalgebra A\n  gen u\n  rule u*u -> (q^1)*\n";
        match parse_example(src) {
            Err(CatalogError::Syntax { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }
}

#[cfg(test)]
mod slow {
    use super::*;

    #[test]
    fn every_example_passes_its_checks() {
        for name in example_names() {
            let ex = load_example(name).unwrap();
            let rep = ex.check(ex.max_len.min(3), ex.max_deg);
            assert!(rep.all_passed(), "{name}\n{}", rep.to_text());
        }
    }
}

#[cfg(test)]
mod crossed {
    use super::*;

    #[test]
    fn torus_cocycle_is_not_closed_so_the_calculus_is_refused() {
        let ex = load_example("crossed_demo").unwrap();
        let rep = ex.check(2, 2);
        let c = rep
            .get("crossed.calculus-guard[crossed_demo]")
            .expect("guard ran");
        assert!(c.witness.starts_with("rejected: d(sigma("), "{}", c.witness);
    }
}
