//! Exact coefficient ring: Laurent polynomials in the formal parameters `q` and
//! `l` (standing for e^{iθ}) with rational coefficients.
//!
//! A [`Scalar`] is stored canonically as a sorted map from exponent pairs
//! `(power of q, power of l)` to nonzero rationals, so structural equality is
//! mathematical equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

/// Errors raised by coefficient arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    /// Only nonzero monomials are units of the Laurent ring.
    #[error("{0} is not a unit of the coefficient ring")]
    NotAUnit(String),
    /// Exact division left a remainder.
    #[error("{0} is not divisible by {1}")]
    NotDivisible(String, String),
}

/// Exponent pair `(q, l)` of a monomial.
pub type Exponent = (i32, i32);

/// A rational Laurent polynomial in `q` and `l`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Scalar {
    terms: BTreeMap<Exponent, BigRational>,
}

impl Scalar {
    /// The zero scalar.
    pub fn zero() -> Self {
        Scalar {
            terms: BTreeMap::new(),
        }
    }

    /// The unit scalar.
    pub fn one() -> Self {
        Self::monomial(BigRational::one(), 0, 0)
    }

    /// An integer constant.
    pub fn int(n: i64) -> Self {
        Self::monomial(BigRational::from_integer(BigInt::from(n)), 0, 0)
    }

    /// The rational constant `num/den`.
    ///
    /// # Panics
    /// Panics if `den` is zero.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::monomial(BigRational::new(BigInt::from(num), BigInt::from(den)), 0, 0)
    }

    /// `c * q^qe * l^le`; the zero scalar when `c` is zero.
    pub fn monomial(c: BigRational, qe: i32, le: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((qe, le), c);
        }
        Scalar { terms }
    }

    /// `q^e`.
    pub fn q(e: i32) -> Self {
        Self::monomial(BigRational::one(), e, 0)
    }

    /// `l^e`.
    pub fn l(e: i32) -> Self {
        Self::monomial(BigRational::one(), 0, e)
    }

    /// The q-integer `1 + q + ... + q^{n-1}` for `n >= 0`, and
    /// `-(q^-1 + ... + q^n)` for negative `n`.
    pub fn q_int(n: i32) -> Self {
        let mut s = Scalar::zero();
        if n >= 0 {
            for i in 0..n {
                s += Scalar::q(i);
            }
        } else {
            for i in n..0 {
                s -= Scalar::q(i);
            }
        }
        s
    }

    /// Builds a scalar from `(coefficient, q exponent, l exponent)` triples,
    /// merging repeated exponents.
    pub fn from_terms<I: IntoIterator<Item = (BigRational, i32, i32)>>(it: I) -> Self {
        let mut s = Scalar::zero();
        for (c, qe, le) in it {
            s.add_term((qe, le), c);
        }
        s
    }

    /// Iterates over the stored terms in exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigRational)> {
        self.terms.iter()
    }

    /// Number of stored monomials.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True for the zero scalar.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for the unit scalar.
    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&(0, 0)).map(|c| c.is_one()).unwrap_or(false)
    }

    /// True when the scalar is a single nonzero monomial, i.e. a unit.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// True when the scalar has no `q` or `l` dependence.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| *e == (0, 0))
    }

    /// The rational constant term.
    pub fn constant_term(&self) -> BigRational {
        self.terms
            .get(&(0, 0))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, e: Exponent, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
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

    /// Multiplicative inverse of a nonzero monomial.
    pub fn inverse(&self) -> Result<Scalar, CoeffError> {
        if self.terms.len() != 1 {
            return Err(CoeffError::NotAUnit(self.to_string()));
        }
        let (&(qe, le), c) = self.terms.iter().next().expect("one term");
        Ok(Scalar::monomial(c.recip(), -qe, -le))
    }

    /// Exact division by a monomial.
    pub fn div_monomial(&self, m: &Scalar) -> Result<Scalar, CoeffError> {
        Ok(self * &m.inverse()?)
    }

    /// Exact division in the Laurent ring.
    ///
    /// Monomial divisors always succeed. Otherwise the quotient is found by
    /// long division in lexicographic exponent order; a nonzero remainder is
    /// reported as [`CoeffError::NotDivisible`].
    pub fn exact_div(&self, d: &Scalar) -> Result<Scalar, CoeffError> {
        if d.is_zero() {
            return Err(CoeffError::NotAUnit(d.to_string()));
        }
        if d.is_monomial() {
            return self.div_monomial(d);
        }
        if self.is_zero() {
            return Ok(Scalar::zero());
        }
        let mut rem = self.clone();
        let mut quot = Scalar::zero();
        let (dlead_e, dlead_c) = {
            let (e, c) = d.terms.iter().next_back().expect("nonzero");
            (*e, c.clone())
        };
        // If self = quot * d, the lowest and highest degree in each variable
        // of self is the sum of those of quot and d, so every quotient term
        // lies in a fixed box; long division emits terms in decreasing order,
        // so leaving the box means a nonzero remainder.
        let span = |s: &Scalar, pick: fn(&Exponent) -> i32| {
            let lo = s.terms.keys().map(pick).min().expect("nonzero");
            let hi = s.terms.keys().map(pick).max().expect("nonzero");
            (lo, hi)
        };
        let (sq, sl) = (span(self, |e| e.0), span(self, |e| e.1));
        let (dq, dl) = (span(d, |e| e.0), span(d, |e| e.1));
        let in_box = |e: Exponent| {
            e.0 >= sq.0 - dq.0 && e.0 <= sq.1 - dq.1 && e.1 >= sl.0 - dl.0 && e.1 <= sl.1 - dl.1
        };
        loop {
            if rem.is_zero() {
                return Ok(quot);
            }
            let (re, rc) = {
                let (e, c) = rem.terms.iter().next_back().expect("nonzero");
                (*e, c.clone())
            };
            let te = (re.0 - dlead_e.0, re.1 - dlead_e.1);
            if !in_box(te) {
                break;
            }
            let t = Scalar::monomial(rc / dlead_c.clone(), te.0, te.1);
            rem = &rem - &(&t * d);
            quot += t;
        }
        Err(CoeffError::NotDivisible(self.to_string(), d.to_string()))
    }

    /// Integer power; negative exponents require a monomial.
    pub fn pow(&self, e: i32) -> Result<Scalar, CoeffError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Scalar::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// The leading monomial (largest exponent pair) as a scalar.
    pub fn leading_monomial(&self) -> Option<Scalar> {
        self.terms
            .iter()
            .next_back()
            .map(|(e, c)| Scalar::monomial(c.clone(), e.0, e.1))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

fn fmt_monomial(f: &mut fmt::Formatter<'_>, c: &BigRational, e: &Exponent) -> fmt::Result {
    let mut parts: Vec<String> = Vec::new();
    let has_power = e.0 != 0 || e.1 != 0;
    if !has_power || !c.abs().is_one() {
        parts.push(c.to_string());
    } else if c.is_negative() {
        write!(f, "-")?;
    }
    if e.0 != 0 {
        parts.push(format!("q^{}", e.0));
    }
    if e.1 != 0 {
        parts.push(format!("l^{}", e.1));
    }
    write!(f, "{}", parts.join("*"))
}

impl fmt::Display for Scalar {
    /// Renders monomials as `3/2*q^-2*l^1`, joined with ` + `.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            fmt_monomial(f, c, e)?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs.clone();
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, rhs: Scalar) -> Scalar {
        self += rhs;
        self
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
    }
}

impl<'a> AddAssign<&'a Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &'a Scalar) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs.clone();
        out
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(mut self, rhs: Scalar) -> Scalar {
        self -= rhs;
        self
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        for (e, c) in rhs.terms {
            self.add_term(e, -c);
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term((ea.0 + eb.0, ea.1 + eb.1), ca * cb);
            }
        }
        out
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(c: BigRational) -> Self {
        Scalar::monomial(c, 0, 0)
    }
}

/// Termwise sum.
pub fn scalar_add(a: &Scalar, b: &Scalar) -> Scalar {
    a + b
}

/// Distributive product.
pub fn scalar_mul(a: &Scalar, b: &Scalar) -> Scalar {
    a * b
}

/// Reciprocal of a monomial; [`CoeffError::NotAUnit`] otherwise.
pub fn scalar_inverse(a: &Scalar) -> Result<Scalar, CoeffError> {
    a.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn additive_inverse_cancels() {
        assert!((Scalar::q(1) + -Scalar::q(1)).is_zero());
    }

    #[test]
    fn q_integer_two_at_inverse_square() {
        // [2]_x = (1 - x^2)/(1 - x) = 1 + x with x = q^-2.
        let two = Scalar::one() + Scalar::q(-2);
        let num = Scalar::one() - Scalar::q(-4);
        let den = Scalar::one() - Scalar::q(-2);
        assert_eq!(num.exact_div(&den).unwrap(), two);
    }

    #[test]
    fn doubling() {
        assert_eq!(Scalar::l(1) + Scalar::l(1), &Scalar::int(2) * &Scalar::l(1));
    }

    #[test]
    fn products() {
        assert!((Scalar::q(1) * Scalar::q(-1)).is_one());
        assert!((Scalar::l(1) * Scalar::l(-1)).is_one());
        let lhs = (Scalar::q(1) - Scalar::q(-1)) * Scalar::q(1);
        assert_eq!(lhs, Scalar::q(2) - Scalar::one());
    }

    #[test]
    fn monomial_inverse() {
        let a = &(&Scalar::int(2) * &Scalar::q(2)) * &Scalar::l(-1);
        let expect = &(&Scalar::ratio(1, 2) * &Scalar::q(-2)) * &Scalar::l(1);
        assert_eq!(a.inverse().unwrap(), expect);
        assert!(matches!(
            (Scalar::one() + Scalar::q(1)).inverse(),
            Err(CoeffError::NotAUnit(_))
        ));
        assert!(matches!(
            Scalar::zero().inverse(),
            Err(CoeffError::NotAUnit(_))
        ));
    }

    #[test]
    fn rendering() {
        let s = Scalar::monomial(BigRational::new(3.into(), 2.into()), -2, 1);
        assert_eq!(s.to_string(), "3/2*q^-2*l^1");
        assert_eq!(Scalar::zero().to_string(), "0");
        assert_eq!((-Scalar::q(1)).to_string(), "-q^1");
        assert_eq!(Scalar::int(-3).to_string(), "-3");
    }

    #[test]
    fn q_int_values() {
        assert_eq!(
            Scalar::q_int(3),
            Scalar::one() + Scalar::q(1) + Scalar::q(2)
        );
        assert_eq!(Scalar::q_int(-2), -(Scalar::q(-1) + Scalar::q(-2)));
        assert!(Scalar::q_int(0).is_zero());
    }

    #[test]
    fn non_divisible_reported() {
        let a = Scalar::one() + Scalar::q(2);
        let b = Scalar::one() + Scalar::q(1);
        assert!(a.exact_div(&b).is_err());
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        prop::collection::vec((-5i64..6, 1i64..4, -3i32..4, -3i32..4), 0..5).prop_map(|v| {
            Scalar::from_terms(
                v.into_iter()
                    .map(|(n, d, a, b)| (BigRational::new(n.into(), d.into()), a, b)),
            )
        })
    }

    fn arb_monomial() -> impl Strategy<Value = Scalar> {
        (1i64..7, 1i64..5, any::<bool>(), -4i32..5, -4i32..5).prop_map(|(n, d, neg, a, b)| {
            let n = if neg { -n } else { n };
            Scalar::monomial(BigRational::new(n.into(), d.into()), a, b)
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn inverse_is_involutive(m in arb_monomial()) {
            prop_assert_eq!(m.inverse().unwrap().inverse().unwrap(), m.clone());
            prop_assert!((&m * &m.inverse().unwrap()).is_one());
        }

        #[test]
        fn canonical_form_is_idempotent(a in arb_scalar()) {
            let rebuilt = Scalar::from_terms(a.terms().map(|(e, c)| (c.clone(), e.0, e.1)));
            prop_assert_eq!(rebuilt, a);
        }

        #[test]
        fn exact_division_roundtrip(a in arb_scalar(), b in arb_scalar()) {
            prop_assume!(!b.is_zero());
            let p = &a * &b;
            prop_assert_eq!(p.exact_div(&b).unwrap(), a);
        }
    }
}
