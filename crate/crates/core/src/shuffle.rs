//! The quasi-shuffle algebra on words in letters `z_1, z_2, ...`.
//!
//! A word `z_{v_1} ... z_{v_a}` stands for the exponent vector
//! `(v_1, ..., v_a)`, and a [`LinComb`] of words maps linearly to the
//! combination of generating series `U_v`. Under that map the quasi-shuffle
//! product of words becomes the ordinary product of series.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{bernoulli, binomial, factorial};
use crate::error::{Error, Result};
use crate::linalg;
use crate::partition::{u_coefficients, u_series, PartVector};
use crate::series::{format_rational, int, parse_rational, ExactRational, QSeries};

/// A finite sequence of letter indices. The empty word is the unit.
///
/// Words order by filtration weight (sum of entries plus length), then by
/// length, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(letters: Vec<u32>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(v: u32) -> Self {
        Word(vec![v])
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn filtration_weight(&self) -> u32 {
        self.weight() + self.0.len() as u32
    }

    fn prepend(&self, x: u32) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(x);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn to_part_vector(&self) -> Option<PartVector> {
        PartVector::new(self.0.clone()).ok()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.filtration_weight(), self.len(), &self.0).cmp(&(
            other.filtration_weight(),
            other.len(),
            &other.0,
        ))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<&PartVector> for Word {
    fn from(v: &PartVector) -> Self {
        Word(v.entries().to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Finitely supported rational combination of words. Zero coefficients are
/// never stored, and distinct words never merge.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinComb {
    terms: BTreeMap<Word, ExactRational>,
}

impl LinComb {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(w: Word) -> Self {
        Self::term(w, BigRational::one())
    }

    pub fn term(w: Word, c: ExactRational) -> Self {
        let mut l = Self::zero();
        l.add_term(w, c);
        l
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Word, ExactRational)>) -> Self {
        let mut l = Self::zero();
        for (w, c) in terms {
            l.add_term(w, c);
        }
        l
    }

    pub fn add_term(&mut self, w: Word, c: ExactRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add_scaled(&mut self, c: &ExactRational, other: &LinComb) {
        for (w, x) in &other.terms {
            self.add_term(w.clone(), c * x);
        }
    }

    pub fn scale(&self, c: &ExactRational) -> LinComb {
        LinComb::from_terms(self.terms.iter().map(|(w, x)| (w.clone(), x * c)))
    }

    pub fn coeff(&self, w: &Word) -> ExactRational {
        self.terms.get(w).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &ExactRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest filtration weight and largest plain weight among the words.
    pub fn max_weights(&self) -> (u32, u32) {
        self.terms.keys().fold((0, 0), |(f, w), k| {
            (f.max(k.filtration_weight()), w.max(k.weight()))
        })
    }

    fn prepend_all(&self, x: u32, c: &ExactRational, out: &mut LinComb) {
        for (w, y) in &self.terms {
            out.add_term(w.prepend(x), c * y);
        }
    }

    /// Denominators cleared and content removed, so the coefficients are
    /// coprime integers; the first word (in word order) keeps its sign
    /// positive unless `keep_sign` is set.
    pub fn primitive_integer(&self, keep_sign: bool) -> BTreeMap<Word, BigInt> {
        use num_integer::Integer;
        let den = crate::series::common_denominator(self.terms.values());
        let ints: Vec<(Word, BigInt)> = self
            .terms
            .iter()
            .map(|(w, c)| (w.clone(), c.numer() * (&den / c.denom())))
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c));
        if g.is_zero() {
            return BTreeMap::new();
        }
        let flip = !keep_sign && ints.first().is_some_and(|(_, c)| c.is_negative());
        ints.into_iter()
            .map(|(w, c)| {
                let c = c / &g;
                (w, if flip { -c } else { c })
            })
            .collect()
    }
}

impl fmt::Display for LinComb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}{}", format_rational(c), w)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    vector: Vec<u32>,
    coeff: String,
}

impl Serialize for LinComb {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire: Vec<TermWire> = self
            .terms
            .iter()
            .map(|(w, c)| TermWire {
                vector: w.0.clone(),
                coeff: format_rational(c),
            })
            .collect();
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinComb {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = Vec::<TermWire>::deserialize(d)?;
        let mut l = LinComb::zero();
        for t in wire {
            let c = parse_rational(&t.coeff).map_err(D::Error::custom)?;
            l.add_term(Word(t.vector), c);
        }
        Ok(l)
    }
}

/// Structure constant `c_{i,j,m}` of the diamond product.
pub fn diamond_coefficient(i: u32, j: u32, m: u32) -> ExactRational {
    let top = i + j;
    if m > top {
        return BigRational::zero();
    }
    if m == top {
        return BigRational::new(
            factorial(i as u64) * factorial(j as u64),
            factorial(top as u64 + 1),
        );
    }
    let sign = |e: u32| if e % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    let bracket = sign(j) * binomial(i as u64, m as u64 + 1) + sign(i) * binomial(j as u64, m as u64 + 1);
    if bracket.is_zero() {
        return BigRational::zero();
    }
    let k = (top - m) as usize;
    BigRational::from_integer(bracket) * bernoulli(k) / BigRational::from_integer(BigInt::from(k))
}

/// `z_i ⋄ z_j = Σ_{m=0}^{i+j} c_{i,j,m} z_{m+1}` as a combination of
/// one-letter words.
pub fn diamond(i: u32, j: u32) -> LinComb {
    LinComb::from_terms((0..=i + j).map(|m| (Word::letter(m + 1), diamond_coefficient(i, j, m))))
}

/// Bilinear extension of [`diamond`] to combinations of one-letter words.
pub fn diamond_lin(a: &LinComb, b: &LinComb) -> LinComb {
    let mut out = LinComb::zero();
    for (x, cx) in a.iter() {
        for (y, cy) in b.iter() {
            assert!(x.len() == 1 && y.len() == 1, "diamond acts on letters");
            out.add_scaled(&(cx * cy), &diamond(x.0[0], y.0[0]));
        }
    }
    out
}

/// Iterated diamond product of the given letters.
pub fn diamond_all(letters: &[u32]) -> LinComb {
    let mut iter = letters.iter();
    let Some(&first) = iter.next() else {
        return LinComb::word(Word::empty());
    };
    iter.fold(LinComb::word(Word::letter(first)), |acc, &v| {
        diamond_lin(&acc, &LinComb::word(Word::letter(v)))
    })
}

type Memo = HashMap<(Vec<u32>, Vec<u32>), LinComb>;

/// Quasi-shuffle product, defined by `1 * w = w * 1 = w` and
/// `xw * yv = x(w * yv) + y(xw * v) + (x ⋄ y)(w * v)`.
pub fn quasi_shuffle(w: &Word, v: &Word) -> LinComb {
    let mut memo = Memo::new();
    shuffle_rec(&w.0, &v.0, &mut memo)
}

fn shuffle_rec(w: &[u32], v: &[u32], memo: &mut Memo) -> LinComb {
    if w.is_empty() {
        return LinComb::word(Word(v.to_vec()));
    }
    if v.is_empty() {
        return LinComb::word(Word(w.to_vec()));
    }
    let key = (w.to_vec(), v.to_vec());
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let (x, rest_w) = (w[0], &w[1..]);
    let (y, rest_v) = (v[0], &v[1..]);
    let one = BigRational::one();
    let mut out = LinComb::zero();
    shuffle_rec(rest_w, v, memo).prepend_all(x, &one, &mut out);
    shuffle_rec(w, rest_v, memo).prepend_all(y, &one, &mut out);
    let tail = shuffle_rec(rest_w, rest_v, memo);
    for (z, c) in diamond(x, y).iter() {
        tail.prepend_all(z.0[0], c, &mut out);
    }
    memo.insert(key, out.clone());
    out
}

/// Bilinear extension of [`quasi_shuffle`].
pub fn quasi_shuffle_lin(a: &LinComb, b: &LinComb) -> LinComb {
    let mut memo = Memo::new();
    let mut out = LinComb::zero();
    for (w, cw) in a.iter() {
        for (v, cv) in b.iter() {
            out.add_scaled(&(cw * cv), &shuffle_rec(&w.0, &v.0, &mut memo));
        }
    }
    out
}

/// Series of a word; the empty word maps to the constant 1.
pub fn word_series(w: &Word, truncation: usize) -> QSeries {
    let c = u_coefficients(&w.0, truncation);
    QSeries::from_coeffs(c[..=truncation].iter().cloned().map(int).collect()).expect("nonempty")
}

/// Linear extension `U_{Σ c_v v} = Σ c_v U_v`.
pub fn u_of_lincomb(l: &LinComb, truncation: usize) -> QSeries {
    let words: Vec<(&Word, &ExactRational)> = l.iter().collect();
    let parts: Vec<QSeries> = words
        .par_iter()
        .map(|(w, c)| word_series(w, truncation).scale(c))
        .collect();
    parts
        .iter()
        .fold(QSeries::zero(truncation), |acc, s| &acc + s)
}

/// Rewrites the convolution `Σ_{i+j=n} M_α(i) M_β(j)` as a constant
/// combination of `M_v(n)`.
pub fn convolution_reduce(alpha: &PartVector, beta: &PartVector) -> LinComb {
    quasi_shuffle(&Word::from(alpha), &Word::from(beta))
}

/// Every exponent vector (zeros allowed, length >= 1) with
/// `|v| + length(v) <= bound`, in word order.
pub fn vectors_up_to(bound: u32) -> Vec<Word> {
    fn rec(left: u32, cur: &mut Vec<u32>, out: &mut Vec<Word>) {
        if !cur.is_empty() {
            out.push(Word(cur.clone()));
        }
        if left == 0 {
            return;
        }
        for v in 0..left {
            cur.push(v);
            rec(left - v - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(bound, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Every all-odd vector with `|v| + length(v) <= bound`, in word order.
pub fn odd_vectors_up_to(bound: u32) -> Vec<PartVector> {
    vectors_up_to(bound)
        .into_iter()
        .filter(|w| w.0.iter().all(|v| v % 2 == 1))
        .filter_map(|w| w.to_part_vector())
        .collect()
}

/// Expresses `target` as a combination of the series of `candidates`,
/// solving on the coefficients of `q^1 ..= q^(count + 20)` and then checking
/// the result to `verify_to`. Among several solutions the one supported on
/// the greedily chosen independent candidates, scanned from the last
/// candidate to the first, is returned.
pub fn represent_in_words(
    target: &QSeries,
    candidates: &[Word],
    verify_to: usize,
) -> Option<LinComb> {
    let rows = candidates.len() + 20;
    let n = rows.max(verify_to);
    if target.truncation() < n {
        return None;
    }
    let series: Vec<QSeries> = candidates.par_iter().map(|w| word_series(w, n)).collect();
    // columns in reverse order so that elimination prefers later candidates
    let order: Vec<usize> = (0..candidates.len()).rev().collect();
    let a: Vec<Vec<ExactRational>> = (1..=rows)
        .map(|i| order.iter().map(|&c| series[c].coeff(i).clone()).collect())
        .collect();
    let b: Vec<ExactRational> = (1..=rows).map(|i| target.coeff(i).clone()).collect();
    let x = linalg::solve(&a, &b)?;
    let l = LinComb::from_terms(
        order
            .iter()
            .zip(x)
            .map(|(&c, xi)| (candidates[c].clone(), xi)),
    );
    let check = u_of_lincomb(&l, n);
    check.eq_positive(&target.truncate(n)).then_some(l)
}

/// Rewrites `n M_α(n)` as a constant combination of `M_v(n)` with
/// `|v| + length(v) <= |α| + length(α) + 2`, verified to `verify_to`.
pub fn times_n_reduce(alpha: &PartVector, verify_to: usize) -> Result<LinComb> {
    let bound = alpha.filtration_weight() + 2;
    let candidates = vectors_up_to(bound);
    let n = (candidates.len() + 20).max(verify_to);
    let target = u_series(alpha, n).apply_d(1);
    represent_in_words(&target, &candidates, verify_to).ok_or(Error::NoRepresentation { bound: bound as usize })
}

/// Canonical constant-coefficient form of a combination: its series
/// re-expressed over all vectors up to the combination's own filtration
/// weight, with the same selection rule as [`times_n_reduce`].
pub fn canonical_form(l: &LinComb, verify_to: usize) -> Result<LinComb> {
    let bound = l.max_weights().0;
    let candidates = vectors_up_to(bound);
    let n = (candidates.len() + 20).max(verify_to);
    let target = u_of_lincomb(l, n);
    represent_in_words(&target, &candidates, verify_to).ok_or(Error::NoRepresentation { bound: bound as usize })
}

/// Applies [`times_n_reduce`] termwise: the combination whose series is
/// `D` of the series of `l`.
pub fn times_n_lincomb(l: &LinComb, verify_to: usize) -> Result<LinComb> {
    let mut out = LinComb::zero();
    for (w, c) in l.iter() {
        let v = w
            .to_part_vector()
            .ok_or_else(|| Error::invalid("D of the constant word is zero and has no word form"))?;
        out.add_scaled(c, &times_n_reduce(&v, verify_to)?);
    }
    Ok(out)
}

fn check_odd(vec: &PartVector) -> Result<()> {
    if !vec.all_odd() {
        return Err(Error::invalid(format!(
            "symmetrized series need all entries odd and >= 1, got {vec}"
        )));
    }
    Ok(())
}

/// Distinct rearrangements of `entries`, each with the number of
/// permutations that produce it.
pub fn distinct_permutations(entries: &[u32]) -> Vec<(Vec<u32>, u64)> {
    let mut sorted = entries.to_vec();
    sorted.sort_unstable();
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for &v in entries {
        *counts.entry(v).or_default() += 1;
    }
    let stabilizer: u64 = counts.values().map(|&c| (1..=c).product::<u64>()).product();
    let mut out = Vec::new();
    loop {
        out.push((sorted.clone(), stabilizer));
        // next lexicographic permutation
        let Some(i) = (0..sorted.len().saturating_sub(1)).rev().find(|&i| sorted[i] < sorted[i + 1]) else {
            break;
        };
        let j = (i + 1..sorted.len()).rev().find(|&j| sorted[j] > sorted[i]).expect("exists");
        sorted.swap(i, j);
        sorted[i + 1..].reverse();
    }
    out
}

/// Word combination `Σ_{σ ∈ S_a} σ v`.
pub fn sym_lincomb(vec: &PartVector) -> LinComb {
    LinComb::from_terms(
        distinct_permutations(vec.entries())
            .into_iter()
            .map(|(p, mult)| (Word(p), BigRational::from_integer(BigInt::from(mult)))),
    )
}

/// Symmetrized series `Σ_{σ ∈ S_a} U_{σ v}` for an all-odd vector.
pub fn sym_u(vec: &PartVector, truncation: usize) -> Result<QSeries> {
    check_odd(vec)?;
    Ok(u_of_lincomb(&sym_lincomb(vec), truncation))
}

/// A partition of `{0, ..., a-1}` into nonempty blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetPartition {
    pub blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// `(-1)^{a-|B|} Π_β (|β|-1)!`
    pub fn hoffman_weight(&self) -> BigInt {
        let a: usize = self.blocks.iter().map(Vec::len).sum();
        let sign = if (a - self.blocks.len()) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        self.blocks
            .iter()
            .map(|b| factorial(b.len() as u64 - 1))
            .product::<BigInt>()
            * sign
    }
}

/// All set partitions of `{0, ..., a-1}`, generated from restricted growth
/// strings.
pub fn set_partitions(a: usize) -> Vec<SetPartition> {
    fn rec(i: usize, a: usize, rgs: &mut Vec<usize>, max: usize, out: &mut Vec<SetPartition>) {
        if i == a {
            let mut blocks = vec![Vec::new(); max + 1];
            for (e, &b) in rgs.iter().enumerate() {
                blocks[b].push(e);
            }
            out.push(SetPartition { blocks });
            return;
        }
        for b in 0..=max + 1 {
            rgs.push(b);
            rec(i + 1, a, rgs, max.max(b), out);
            rgs.pop();
        }
    }
    let mut out = Vec::new();
    if a == 0 {
        return vec![SetPartition { blocks: Vec::new() }];
    }
    let mut rgs = vec![0];
    rec(1, a, &mut rgs, 0, &mut out);
    out
}

/// Symmetrized series by the set-partition formula
/// `Σ_B c(B) Π_{β ∈ B} U_{⋄_β}`, where `⋄_β` is the diamond product of the
/// letters indexed by the block.
pub fn hoffman_sym(vec: &PartVector, truncation: usize) -> Result<QSeries> {
    if vec.entries().contains(&0) {
        return Err(Error::invalid(format!("letters must be >= 1, got {vec}")));
    }
    let mut block_cache: HashMap<Vec<u32>, QSeries> = HashMap::new();
    let mut total = QSeries::zero(truncation);
    for part in set_partitions(vec.len()) {
        let mut prod = QSeries::one(truncation);
        for block in &part.blocks {
            let mut letters: Vec<u32> = block.iter().map(|&i| vec.entries()[i]).collect();
            letters.sort_unstable();
            let s = block_cache
                .entry(letters.clone())
                .or_insert_with(|| u_of_lincomb(&diamond_all(&letters), truncation));
            prod = &prod * s;
        }
        total.add_scaled(&BigRational::from_integer(part.hoffman_weight()), &prod);
    }
    Ok(total)
}

/// Checks that every word in a product `α * β` respects the filtration
/// bound `|α| + |β| + a + b`. Returns the observed maxima of filtration
/// weight and of plain weight.
pub fn filtration_maxima(l: &LinComb) -> (u32, u32) {
    l.max_weights()
}

/// True when a combination has no negative coefficients.
pub fn is_nonnegative(l: &LinComb) -> bool {
    l.iter().all(|(_, c)| !c.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    fn w(e: &[u32]) -> Word {
        Word::new(e.to_vec())
    }

    fn pv(e: &[u32]) -> PartVector {
        PartVector::new(e.to_vec()).unwrap()
    }

    #[test]
    fn diamond_examples() {
        let d = diamond(1, 1);
        assert_eq!(d, LinComb::from_terms([(w(&[3]), rat(1, 6)), (w(&[1]), rat(-1, 6))]));
        for i in 1..6 {
            for j in 1..6 {
                assert_eq!(diamond(i, j), diamond(j, i));
            }
        }
        for i in (1..9).step_by(2) {
            for j in (1..9).step_by(2) {
                for m in (1..=i + j).step_by(2) {
                    assert!(diamond_coefficient(i, j, m).is_zero(), "c_{{{i},{j},{m}}}");
                }
            }
        }
    }

    #[test]
    fn diamond_is_associative_on_letters() {
        for (a, b, c) in [(1, 1, 1), (1, 2, 3), (3, 1, 2), (2, 2, 5)] {
            let la = LinComb::word(Word::letter(a));
            let lb = LinComb::word(Word::letter(b));
            let lc = LinComb::word(Word::letter(c));
            assert_eq!(
                diamond_lin(&diamond_lin(&la, &lb), &lc),
                diamond_lin(&la, &diamond_lin(&lb, &lc))
            );
        }
    }

    #[test]
    fn printed_quasi_shuffle_example() {
        let p = quasi_shuffle(&w(&[1]), &w(&[1, 1]));
        let expected = LinComb::from_terms([
            (w(&[1, 1, 1]), rat(3, 1)),
            (w(&[3, 1]), rat(1, 6)),
            (w(&[1, 3]), rat(1, 6)),
            (w(&[1, 1]), rat(-1, 3)),
        ]);
        assert_eq!(p, expected);
    }

    #[test]
    fn unit_law() {
        let x = w(&[2, 0, 5]);
        assert_eq!(quasi_shuffle(&Word::empty(), &x), LinComb::word(x.clone()));
        assert_eq!(quasi_shuffle(&x, &Word::empty()), LinComb::word(x));
    }

    #[test]
    fn convolution_example() {
        let l = convolution_reduce(&pv(&[1]), &pv(&[1]));
        let expected = LinComb::from_terms([
            (w(&[3]), rat(1, 6)),
            (w(&[1, 1]), rat(2, 1)),
            (w(&[1]), rat(-1, 6)),
        ]);
        assert_eq!(l, expected);
        let n = 60;
        let u1 = u_series(&pv(&[1]), n);
        assert_eq!(u_of_lincomb(&l, n), &u1 * &u1);
        let l12 = convolution_reduce(&pv(&[1]), &pv(&[2]));
        assert_eq!(u_of_lincomb(&l12, n), &u1 * &u_series(&pv(&[2]), n));
    }

    #[test]
    fn u_of_lincomb_base_cases() {
        assert_eq!(u_of_lincomb(&LinComb::word(w(&[1])), 20), u_series(&pv(&[1]), 20));
        assert_eq!(u_of_lincomb(&LinComb::word(Word::empty()), 20), QSeries::one(20));
        assert_eq!(u_of_lincomb(&LinComb::zero(), 20), QSeries::zero(20));
    }

    #[test]
    fn word_order_and_json() {
        let l = LinComb::from_terms([
            (w(&[1, 1, 1]), rat(3, 1)),
            (w(&[3, 1]), rat(1, 6)),
            (w(&[1]), rat(-1, 6)),
            (w(&[1, 3]), rat(1, 6)),
        ]);
        let order: Vec<_> = l.iter().map(|(k, _)| k.clone()).collect();
        assert_eq!(order, vec![w(&[1]), w(&[1, 3]), w(&[3, 1]), w(&[1, 1, 1])]);
        let text = serde_json::to_string(&l).unwrap();
        assert_eq!(
            text,
            r#"[{"vector":[1],"coeff":"-1/6"},{"vector":[1,3],"coeff":"1/6"},{"vector":[3,1],"coeff":"1/6"},{"vector":[1,1,1],"coeff":"3"}]"#
        );
        let back: LinComb = serde_json::from_str(&text).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn set_partition_counts() {
        let bell = [1, 1, 2, 5, 15, 52, 203];
        for (a, &b) in bell.iter().enumerate() {
            assert_eq!(set_partitions(a).len(), b);
        }
        for p in set_partitions(4) {
            let mut all: Vec<usize> = p.blocks.concat();
            all.sort();
            assert_eq!(all, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn vector_enumeration_counts() {
        // compositions of m <= bound into parts >= 1: 2^bound - 1 of them
        for b in 1..=8 {
            assert_eq!(vectors_up_to(b).len(), (1usize << b) - 1);
        }
        assert_eq!(odd_vectors_up_to(12).len(), 63);
    }

    #[test]
    fn permutations_with_multiplicity() {
        let p = distinct_permutations(&[1, 3, 1]);
        assert_eq!(p.len(), 3);
        assert!(p.iter().all(|(_, m)| *m == 2));
        let total: u64 = distinct_permutations(&[1, 1, 3, 5]).iter().map(|(_, m)| m).sum();
        assert_eq!(total, 24);
    }

    #[test]
    fn sym_u_examples() {
        let n = 40;
        assert_eq!(sym_u(&pv(&[5]), n).unwrap(), u_series(&pv(&[5]), n));
        assert_eq!(
            sym_u(&pv(&[1, 3]), n).unwrap(),
            &u_series(&pv(&[1, 3]), n) + &u_series(&pv(&[3, 1]), n)
        );
        assert!(sym_u(&pv(&[1, 2]), n).is_err());
        assert!(sym_u(&pv(&[0, 1]), n).is_err());
    }

    #[test]
    fn hoffman_small_cases() {
        let n = 60;
        assert_eq!(hoffman_sym(&pv(&[3]), n).unwrap(), u_series(&pv(&[3]), n));
        let u1 = u_series(&pv(&[1]), n);
        let pair = &(&u1 * &u1) - &u_of_lincomb(&diamond(1, 1), n);
        assert_eq!(hoffman_sym(&pv(&[1, 1]), n).unwrap(), pair);
        assert_eq!(pair, u_series(&pv(&[1, 1]), n).scale(&rat(2, 1)));
        assert_eq!(
            hoffman_sym(&pv(&[1, 1, 1]), n).unwrap(),
            sym_u(&pv(&[1, 1, 1]), n).unwrap()
        );
    }

    #[test]
    fn primitive_integer_normalization() {
        let l = LinComb::from_terms([(w(&[1]), rat(-2, 3)), (w(&[2]), rat(4, 9))]);
        let p = l.primitive_integer(false);
        assert_eq!(p[&w(&[1])], BigInt::from(3));
        assert_eq!(p[&w(&[2])], BigInt::from(-2));
    }

    fn lc(terms: &[(&[u32], i64, i64)]) -> LinComb {
        LinComb::from_terms(terms.iter().map(|(e, p, q)| (w(e), rat(*p, *q))))
    }

    #[test]
    fn times_n_reduce_printed_example() {
        let got = times_n_reduce(&pv(&[1, 1]), 60).unwrap();
        let expected = lc(&[
            (&[3, 0], 24, 22),
            (&[1, 3], -9, 22),
            (&[2, 2], 72, 22),
            (&[3, 1], -21, 22),
            (&[1, 1, 1], -72, 22),
            (&[2, 0, 1], 24, 22),
            (&[2, 1, 0], -24, 22),
            (&[3, 0, 0], -24, 22),
        ]);
        assert_eq!(got, expected);
        let n = 100;
        assert_eq!(u_of_lincomb(&got, n), u_series(&pv(&[1, 1]), n).apply_d(1));
    }

    #[test]
    fn times_n_reduce_single_part() {
        let n = 100;
        let got = times_n_reduce(&pv(&[1]), n).unwrap();
        assert!(got.max_weights().0 <= 4);
        assert!(u_of_lincomb(&got, n).eq_positive(&u_series(&pv(&[1]), n).apply_d(1)));
    }

    #[test]
    fn iterated_reduction_matches_first_detector() {
        let verify = 60;
        let m1 = LinComb::word(w(&[1]));
        let n_m1 = times_n_lincomb(&m1, verify).unwrap();
        let n2_m1 = times_n_lincomb(&n_m1, verify).unwrap();
        let mut l = n2_m1;
        l.add_scaled(&rat(-3, 1), &n_m1);
        l.add_scaled(&rat(2, 1), &m1);
        l.add_term(w(&[1, 1]), rat(-8, 1));
        let reduced = canonical_form(&l, verify).unwrap();
        let psi1 = lc(&[
            (&[2, 2], 63, 1),
            (&[3, 0], -12, 1),
            (&[3, 1], -39, 1),
            (&[1, 3], -12, 1),
            (&[1, 1, 1], 80, 1),
            (&[2, 0, 1], -12, 1),
            (&[2, 1, 0], 12, 1),
            (&[3, 0, 0], 12, 1),
        ]);
        assert_eq!(reduced, psi1.scale(&rat(3, 11)));
    }

    fn small_word() -> impl proptest::strategy::Strategy<Value = Word> {
        proptest::collection::vec(1u32..=3, 0..=3).prop_map(Word::new)
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn quasi_shuffle_commutative_associative(a in small_word(), b in small_word(), c in small_word()) {
            prop_assert_eq!(quasi_shuffle(&a, &b), quasi_shuffle(&b, &a));
            let left = quasi_shuffle_lin(&quasi_shuffle(&a, &b), &LinComb::word(c.clone()));
            let right = quasi_shuffle_lin(&LinComb::word(a.clone()), &quasi_shuffle(&b, &c));
            prop_assert_eq!(left, right);
        }

        #[test]
        fn quasi_shuffle_realizes_series_product(a in small_word(), b in small_word()) {
            let n = 30;
            let lhs = &word_series(&a, n) * &word_series(&b, n);
            prop_assert_eq!(u_of_lincomb(&quasi_shuffle(&a, &b), n), lhs);
        }
    }
}
