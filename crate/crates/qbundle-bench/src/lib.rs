//! Inputs shared by the benchmarks.

use qbundle::{Poly, Presentation, Word};

/// The first `n` basis words of `pres` with at most `max_len` letters,
/// concatenated pairwise so that each product needs real rewriting.
pub fn word_products(pres: &Presentation, max_len: usize, n: usize) -> Vec<(Poly, Poly)> {
    let words: Vec<Word> = pres.basis_words(max_len).into_iter().take(n).collect();
    let mut out = Vec::new();
    for a in &words {
        for b in words.iter().rev() {
            out.push((Poly::word(a.clone()), Poly::word(b.clone())));
            if out.len() == n {
                return out;
            }
        }
    }
    out
}
