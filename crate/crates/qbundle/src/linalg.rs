//! Exact sparse linear algebra over the Laurent coefficient ring.
//!
//! Vectors are sparse maps from ordered coordinate keys to scalars. Elimination
//! is fraction-free: a pivot that is a unit (a monomial) or divides the entry
//! to be cleared is used directly, otherwise the row being reduced is scaled
//! by the pivot first. All spans and kernels are therefore spans over the
//! field of fractions, which is what the verification layer compares.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::coeff::Scalar;

/// Errors from exact solving.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    /// The target is not in the span of the columns.
    #[error("target is not in the span")]
    NotInSpan,
    /// A solution exists over the fraction field but not over the ring.
    #[error("solution needs division by the non-unit {0}")]
    NonUnitDenominator(String),
}

/// A sparse vector with integer coordinates.
pub type SparseVec = BTreeMap<usize, Scalar>;

fn axpy(dst: &mut SparseVec, c: &Scalar, src: &SparseVec) {
    if c.is_zero() {
        return;
    }
    for (k, v) in src {
        let e = dst.entry(*k).or_insert_with(Scalar::zero);
        *e += c * v;
        if e.is_zero() {
            dst.remove(k);
        }
    }
}

fn scale(v: &mut SparseVec, c: &Scalar) {
    for x in v.values_mut() {
        *x = &*x * c;
    }
}

/// A row together with the record of how it was combined from inputs.
#[derive(Clone, Debug, Default)]
struct Row {
    vec: SparseVec,
    tag: SparseVec,
}

/// Incremental row-echelon form; the pivot of a row is its smallest column.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<Row>,
    pivots: BTreeMap<usize, usize>,
}

impl Echelon {
    /// An empty echelon form.
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of independent rows inserted so far.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce_row(&self, row: &mut Row) {
        let mut from = 0usize;
        loop {
            let next = row
                .vec
                .range(from..)
                .map(|(k, _)| *k)
                .find(|k| self.pivots.contains_key(k));
            let Some(col) = next else { break };
            let prow = &self.rows[self.pivots[&col]];
            let a = &prow.vec[&col];
            let b = row.vec[&col].clone();
            let quotient = if a.is_monomial() {
                Some(b.div_monomial(a).expect("monomial"))
            } else {
                b.exact_div(a).ok()
            };
            match quotient {
                Some(f) => {
                    let f = -f;
                    axpy(&mut row.vec, &f, &prow.vec);
                    axpy(&mut row.tag, &f, &prow.tag);
                }
                None => {
                    scale(&mut row.vec, a);
                    scale(&mut row.tag, a);
                    let f = -b;
                    axpy(&mut row.vec, &f, &prow.vec);
                    axpy(&mut row.tag, &f, &prow.tag);
                }
            }
            debug_assert!(!row.vec.contains_key(&col));
            from = col + 1;
        }
    }

    fn normalize(row: &mut Row) {
        let Some((_, lead)) = row.vec.iter().next() else {
            return;
        };
        let lead = lead.clone();
        if lead.is_monomial() {
            if !lead.is_one() {
                let inv = lead.inverse().expect("monomial");
                scale(&mut row.vec, &inv);
                scale(&mut row.tag, &inv);
            }
            return;
        }
        let divided: Option<Vec<(usize, Scalar)>> = row
            .vec
            .iter()
            .map(|(k, v)| v.exact_div(&lead).ok().map(|x| (*k, x)))
            .collect();
        let tag_divided: Option<Vec<(usize, Scalar)>> = row
            .tag
            .iter()
            .map(|(k, v)| v.exact_div(&lead).ok().map(|x| (*k, x)))
            .collect();
        if let (Some(v), Some(t)) = (divided, tag_divided) {
            row.vec = v.into_iter().collect();
            row.tag = t.into_iter().collect();
        }
    }

    /// Inserts a vector with an attached tag. Returns the reduced tag when the
    /// vector depends on earlier rows (a linear relation), `None` when it
    /// increased the rank.
    pub fn insert_tagged(&mut self, vec: SparseVec, tag: SparseVec) -> Option<SparseVec> {
        let mut row = Row { vec, tag };
        self.reduce_row(&mut row);
        if row.vec.is_empty() {
            return Some(row.tag);
        }
        Self::normalize(&mut row);
        let col = *row.vec.keys().next().expect("nonzero");
        self.pivots.insert(col, self.rows.len());
        self.rows.push(row);
        None
    }

    /// Inserts a vector; true when it increased the rank.
    pub fn insert(&mut self, vec: SparseVec) -> bool {
        self.insert_tagged(vec, SparseVec::new()).is_none()
    }

    /// True when `v` lies in the span of the rows.
    pub fn contains(&self, v: &SparseVec) -> bool {
        let mut row = Row {
            vec: v.clone(),
            tag: SparseVec::new(),
        };
        self.reduce_row(&mut row);
        row.vec.is_empty()
    }

    /// Rows whose pivot column satisfies `pred`.
    pub fn rows_with_pivot<F: Fn(usize) -> bool>(&self, pred: F) -> Vec<SparseVec> {
        self.pivots
            .iter()
            .filter(|(c, _)| pred(**c))
            .map(|(_, r)| self.rows[*r].vec.clone())
            .collect()
    }

    /// All rows.
    pub fn rows(&self) -> Vec<SparseVec> {
        self.rows.iter().map(|r| r.vec.clone()).collect()
    }
}

/// Assigns integer coordinates to keys in sorted order.
#[derive(Clone, Debug)]
pub struct Coords<K: Ord + Clone> {
    to_index: BTreeMap<K, usize>,
    keys: Vec<K>,
}

impl<K: Ord + Clone> Coords<K> {
    /// Coordinates for every key occurring in the vectors, sorted.
    pub fn from_vectors<'a, I>(vecs: I) -> Self
    where
        I: IntoIterator<Item = &'a BTreeMap<K, Scalar>>,
        K: 'a,
    {
        let mut all: BTreeMap<K, ()> = BTreeMap::new();
        for v in vecs {
            for k in v.keys() {
                all.insert(k.clone(), ());
            }
        }
        let keys: Vec<K> = all.into_keys().collect();
        Self::from_keys(keys)
    }

    /// Coordinates in the given key order.
    pub fn from_keys(keys: Vec<K>) -> Self {
        let to_index = keys
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, k)| (k, i))
            .collect();
        Coords { to_index, keys }
    }

    /// Adds a key at the end if missing.
    pub fn intern(&mut self, k: &K) -> usize {
        if let Some(&i) = self.to_index.get(k) {
            return i;
        }
        let i = self.keys.len();
        self.keys.push(k.clone());
        self.to_index.insert(k.clone(), i);
        i
    }

    /// Converts a keyed vector, interning new keys.
    pub fn encode(&mut self, v: &BTreeMap<K, Scalar>) -> SparseVec {
        v.iter().map(|(k, c)| (self.intern(k), c.clone())).collect()
    }

    /// Converts back to keys.
    pub fn decode(&self, v: &SparseVec) -> BTreeMap<K, Scalar> {
        v.iter()
            .map(|(i, c)| (self.keys[*i].clone(), c.clone()))
            .collect()
    }

    /// The key of a coordinate.
    pub fn key(&self, i: usize) -> &K {
        &self.keys[i]
    }
}

/// A basis of the kernel of the linear map sending the `i`-th domain basis
/// vector to `images[i]`; each kernel vector is a sparse map over domain
/// indices.
pub fn kernel<K: Ord + Clone>(images: &[BTreeMap<K, Scalar>]) -> Vec<SparseVec> {
    let mut coords = Coords::from_vectors(images.iter());
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    for (i, img) in images.iter().enumerate() {
        let v = coords.encode(img);
        let mut tag = SparseVec::new();
        tag.insert(i, Scalar::one());
        if let Some(rel) = ech.insert_tagged(v, tag) {
            out.push(rel);
        }
    }
    out
}

/// Dimension of the span of the vectors.
pub fn rank<K: Ord + Clone>(vecs: &[BTreeMap<K, Scalar>]) -> usize {
    let mut coords = Coords::from_vectors(vecs.iter());
    let mut ech = Echelon::new();
    for v in vecs {
        ech.insert(coords.encode(v));
    }
    ech.rank()
}

/// True when the two families span the same subspace.
pub fn same_span<K: Ord + Clone>(a: &[BTreeMap<K, Scalar>], b: &[BTreeMap<K, Scalar>]) -> bool {
    let ra = rank(a);
    let rb = rank(b);
    if ra != rb {
        return false;
    }
    let mut both: Vec<BTreeMap<K, Scalar>> = a.to_vec();
    both.extend(b.iter().cloned());
    rank(&both) == ra
}

/// True when the span of `a` is contained in the span of `b`.
pub fn span_included<K: Ord + Clone>(a: &[BTreeMap<K, Scalar>], b: &[BTreeMap<K, Scalar>]) -> bool {
    let rb = rank(b);
    let mut both: Vec<BTreeMap<K, Scalar>> = b.to_vec();
    both.extend(a.iter().cloned());
    rank(&both) == rb
}

/// True when `v` lies in the span of `basis`.
pub fn in_span<K: Ord + Clone>(basis: &[BTreeMap<K, Scalar>], v: &BTreeMap<K, Scalar>) -> bool {
    span_included(std::slice::from_ref(v), basis)
}

/// Coefficients `x` with `sum x[i] * columns[i] = target`.
///
/// Requires the relevant columns to be independent enough that the solution
/// found by elimination has ring coefficients; otherwise
/// [`LinalgError::NonUnitDenominator`] is returned.
pub fn solve<K: Ord + Clone>(
    columns: &[BTreeMap<K, Scalar>],
    target: &BTreeMap<K, Scalar>,
) -> Result<Vec<Scalar>, LinalgError> {
    let mut coords = Coords::from_vectors(columns.iter().chain(std::iter::once(target)));
    let mut ech = Echelon::new();
    for (i, c) in columns.iter().enumerate() {
        let mut tag = SparseVec::new();
        tag.insert(i, Scalar::one());
        ech.insert_tagged(coords.encode(c), tag);
    }
    let n = columns.len();
    let mut tag = SparseVec::new();
    tag.insert(n, Scalar::one());
    let mut neg = coords.encode(target);
    for v in neg.values_mut() {
        *v = -v.clone();
    }
    let Some(rel) = ech.insert_tagged(neg, tag) else {
        return Err(LinalgError::NotInSpan);
    };
    let c = rel.get(&n).cloned().unwrap_or_else(Scalar::zero);
    if c.is_zero() {
        return Err(LinalgError::NotInSpan);
    }
    let mut x = vec![Scalar::zero(); n];
    for (i, k) in rel {
        if i == n {
            continue;
        }
        x[i] = k
            .exact_div(&c)
            .map_err(|_| LinalgError::NonUnitDenominator(c.to_string()))?;
    }
    Ok(x)
}

/// A basis of the intersection of `span(vecs)` with the subspace of vectors
/// supported on keys satisfying `allowed`.
pub fn intersect_support<K, F>(vecs: &[BTreeMap<K, Scalar>], allowed: F) -> Vec<BTreeMap<K, Scalar>>
where
    K: Ord + Clone,
    F: Fn(&K) -> bool,
{
    let probe = Coords::from_vectors(vecs.iter());
    let mut keys: Vec<K> = probe.keys.clone();
    keys.sort_by_key(|k| allowed(k));
    let boundary = keys.iter().take_while(|k| !allowed(k)).count();
    let mut coords = Coords::from_keys(keys);
    let mut ech = Echelon::new();
    for v in vecs {
        ech.insert(coords.encode(v));
    }
    ech.rows_with_pivot(|c| c >= boundary)
        .iter()
        .map(|r| coords.decode(r))
        .collect()
}

/// A basis of the span of the vectors (echelon rows).
pub fn span_basis<K: Ord + Clone>(vecs: &[BTreeMap<K, Scalar>]) -> Vec<BTreeMap<K, Scalar>> {
    let mut coords = Coords::from_vectors(vecs.iter());
    let mut ech = Echelon::new();
    for v in vecs {
        ech.insert(coords.encode(v));
    }
    ech.rows().iter().map(|r| coords.decode(r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(entries: &[(u32, Scalar)]) -> BTreeMap<u32, Scalar> {
        entries.iter().cloned().collect()
    }

    #[test]
    fn kernel_of_rank_one_map() {
        // x0 -> e0, x1 -> q e0, x2 -> e1: kernel spanned by q x0 - x1.
        let imgs = vec![
            v(&[(0, Scalar::one())]),
            v(&[(0, Scalar::q(1))]),
            v(&[(1, Scalar::one())]),
        ];
        let k = kernel(&imgs);
        assert_eq!(k.len(), 1);
        let kv = &k[0];
        // Check it is a relation.
        let mut acc = BTreeMap::new();
        for (i, c) in kv {
            for (key, val) in &imgs[*i] {
                let e = acc.entry(*key).or_insert_with(Scalar::zero);
                *e += c * val;
            }
        }
        assert!(acc.values().all(|x| x.is_zero()));
    }

    #[test]
    fn non_monomial_pivots() {
        let a = v(&[(0, Scalar::one() + Scalar::q(1)), (1, Scalar::one())]);
        let b = v(&[(0, Scalar::one() - Scalar::q(1)), (1, Scalar::q(2))]);
        let c = v(&[(0, Scalar::int(2)), (1, Scalar::one() + Scalar::q(2))]);
        // c = a + b.
        assert_eq!(rank(&[a.clone(), b.clone(), c.clone()]), 2);
        let x = solve(&[a, b], &c).unwrap();
        assert_eq!(x, vec![Scalar::one(), Scalar::one()]);
    }

    #[test]
    fn bounded_intersection() {
        // span{e0 + e2, e1 - e2}; allowed = {0, 1}: intersection spanned by e0 + e1.
        let a = v(&[(0, Scalar::one()), (2, Scalar::one())]);
        let b = v(&[(1, Scalar::one()), (2, -Scalar::one())]);
        let i = intersect_support(&[a, b], |k| *k < 2);
        assert_eq!(i.len(), 1);
        assert!(same_span(
            &i,
            &[v(&[(0, Scalar::one()), (1, Scalar::one())])]
        ));
    }

    #[test]
    fn solve_reports_outside_span() {
        let a = v(&[(0, Scalar::one())]);
        assert_eq!(
            solve(&[a], &v(&[(1, Scalar::one())])),
            Err(LinalgError::NotInSpan)
        );
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_relations(entries in prop::collection::vec(prop::collection::vec((0u32..4, -2i32..3, -2i64..3), 0..4), 1..7)) {
            let imgs: Vec<BTreeMap<u32, Scalar>> = entries.iter().map(|row| {
                let mut m: BTreeMap<u32, Scalar> = BTreeMap::new();
                for (k, e, c) in row {
                    let s = &Scalar::q(*e) * &Scalar::int(*c) + Scalar::one();
                    let e = m.entry(*k).or_insert_with(Scalar::zero);
                    *e += s;
                }
                m.retain(|_, s| !s.is_zero());
                m
            }).collect();
            let ker = kernel(&imgs);
            prop_assert_eq!(ker.len() + rank(&imgs), imgs.len());
            for kv in ker {
                let mut acc: BTreeMap<u32, Scalar> = BTreeMap::new();
                for (i, c) in &kv {
                    for (key, val) in &imgs[*i] {
                        let e = acc.entry(*key).or_insert_with(Scalar::zero);
                        *e += c * val;
                    }
                }
                prop_assert!(acc.values().all(|x| x.is_zero()));
            }
        }
    }
}
