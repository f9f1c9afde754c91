//! Eisenstein series, the prime-detecting forms `H_k` and `f_{k,l}`, and
//! quasimodular membership as exact linear algebra on q-expansions.
//!
//! A series is treated as quasimodular of mixed weight `<= k` when it lies in
//! the span of the monomials `G_2^i G_4^j G_6^l` of weight `<= k`, checked on
//! at least basis-size + 20 coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::arith::{bernoulli, is_prime, sigma};
use crate::error::{Error, Result};
use crate::linalg;
use crate::partition::PartVector;
use crate::series::{format_rational, int, rat, ExactRational, QSeries};
use crate::shuffle::sym_u;

/// Extra coefficients required beyond the number of unknowns before a
/// coefficient identity is accepted.
pub const COEFFICIENT_MARGIN: usize = 20;

/// Weight of an Eisenstein series: even and at least 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EisensteinLabel(u32);

impl EisensteinLabel {
    pub fn new(k: u32) -> Result<Self> {
        if k < 2 || k % 2 == 1 {
            return Err(Error::invalid(format!(
                "Eisenstein weight must be even and >= 2, got {k}"
            )));
        }
        Ok(EisensteinLabel(k))
    }

    pub fn weight(self) -> u32 {
        self.0
    }
}

/// `G_k = -B_k/(2k) + Σ σ_{k-1}(n) q^n`.
pub fn g_series(k: u32, truncation: usize) -> Result<QSeries> {
    let k = EisensteinLabel::new(k)?.weight();
    let constant = -bernoulli(k as usize) / int(2 * k);
    Ok(QSeries::from_fn(truncation, constant, |n| {
        int(sigma(k - 1, n as u64).expect("n >= 1"))
    }))
}

fn check_h_weight(k: u32) -> Result<()> {
    if k < 6 || k % 2 == 1 {
        return Err(Error::invalid(format!("H_k needs even k >= 6, got {k}")));
    }
    Ok(())
}

/// The weight-`k` form
/// `H_6 = ((D^2 - D + 1) G_2 - G_4) / 6` and, for `k >= 8`,
/// `H_k = (-D^2 G_{k-6} + (D^2 + 1) G_{k-4} - G_{k-2}) / 24`.
pub fn h_series(k: u32, truncation: usize) -> Result<QSeries> {
    check_h_weight(k)?;
    let n = truncation;
    if k == 6 {
        let g2 = g_series(2, n)?;
        let g4 = g_series(4, n)?;
        let mut s = &(&g2.apply_d(2) - &g2.apply_d(1)) + &g2;
        s = &s - &g4;
        return Ok(s.scale(&rat(1, 6)));
    }
    let a = g_series(k - 6, n)?;
    let b = g_series(k - 4, n)?;
    let c = g_series(k - 2, n)?;
    let s = &(&(&b.apply_d(2) + &b) - &a.apply_d(2)) - &c;
    Ok(s.scale(&rat(1, 24)))
}

/// `f_{k,l} = (D^l + 1) G_{k+1} - (D^k + 1) G_{l+1}` for odd `k < l`.
pub fn f_series(k: u32, l: u32, truncation: usize) -> Result<QSeries> {
    if k % 2 == 0 || l % 2 == 0 || l <= k {
        return Err(Error::invalid(format!(
            "f_{{k,l}} needs odd k < l, got k={k}, l={l}"
        )));
    }
    let gk = g_series(k + 1, truncation)?;
    let gl = g_series(l + 1, truncation)?;
    let left = &gk.apply_d(l) + &gk;
    let right = &gl.apply_d(k) + &gl;
    Ok(&left - &right)
}

/// An element of one of the spanning sets used for quasimodular
/// representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisElement {
    /// `G_2^i G_4^j G_6^l`
    Monomial { i: u32, j: u32, l: u32 },
    /// `D^n H_k`
    DerivedH { n: u32, k: u32 },
    /// `D^n G_k`
    DerivedG { n: u32, k: u32 },
    /// Symmetrized series of an all-odd vector.
    SymU(PartVector),
}

impl BasisElement {
    pub fn weight(&self) -> u32 {
        match self {
            BasisElement::Monomial { i, j, l } => 2 * i + 4 * j + 6 * l,
            BasisElement::DerivedH { n, k } | BasisElement::DerivedG { n, k } => k + 2 * n,
            BasisElement::SymU(v) => v.filtration_weight(),
        }
    }

    pub fn series(&self, truncation: usize) -> Result<QSeries> {
        match self {
            BasisElement::Monomial { i, j, l } => {
                let mut s = QSeries::one(truncation);
                for (k, e) in [(2, *i), (4, *j), (6, *l)] {
                    if e > 0 {
                        s = &s * &g_series(k, truncation)?.pow(e);
                    }
                }
                Ok(s)
            }
            BasisElement::DerivedH { n, k } => Ok(h_series(*k, truncation)?.apply_d(*n)),
            BasisElement::DerivedG { n, k } => Ok(g_series(*k, truncation)?.apply_d(*n)),
            BasisElement::SymU(v) => sym_u(v, truncation),
        }
    }
}

fn power_label(f: &mut fmt::Formatter<'_>, name: &str, e: u32, first: &mut bool) -> fmt::Result {
    if e == 0 {
        return Ok(());
    }
    if !*first {
        write!(f, "*")?;
    }
    *first = false;
    if e == 1 {
        write!(f, "{name}")
    } else {
        write!(f, "{name}^{e}")
    }
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisElement::Monomial { i, j, l } => {
                if *i == 0 && *j == 0 && *l == 0 {
                    return write!(f, "1");
                }
                let mut first = true;
                power_label(f, "G2", *i, &mut first)?;
                power_label(f, "G4", *j, &mut first)?;
                power_label(f, "G6", *l, &mut first)
            }
            BasisElement::DerivedH { n: 0, k } => write!(f, "H{k}"),
            BasisElement::DerivedH { n: 1, k } => write!(f, "D H{k}"),
            BasisElement::DerivedH { n, k } => write!(f, "D^{n} H{k}"),
            BasisElement::DerivedG { n: 0, k } => write!(f, "G{k}"),
            BasisElement::DerivedG { n: 1, k } => write!(f, "D G{k}"),
            BasisElement::DerivedG { n, k } => write!(f, "D^{n} G{k}"),
            BasisElement::SymU(v) => write!(f, "Usym{v}"),
        }
    }
}

pub type Basis = Vec<(BasisElement, QSeries)>;

pub fn expand_basis(elements: Vec<BasisElement>, truncation: usize) -> Result<Basis> {
    let series = elements
        .par_iter()
        .map(|e| e.series(truncation))
        .collect::<Result<Vec<_>>>()?;
    Ok(elements.into_iter().zip(series).collect())
}

/// Exponents `(i, j, l)` with `2i + 4j + 6l <= max_weight`, ordered by weight
/// and then lexicographically.
pub fn monomial_exponents(max_weight: u32) -> Vec<BasisElement> {
    let mut out = Vec::new();
    for l in 0..=max_weight / 6 {
        for j in 0..=(max_weight - 6 * l) / 4 {
            for i in 0..=(max_weight - 6 * l - 4 * j) / 2 {
                out.push(BasisElement::Monomial { i, j, l });
            }
        }
    }
    out.sort_by_key(|e| match e {
        BasisElement::Monomial { i, j, l } => (e.weight(), *l, *j, *i),
        _ => unreachable!(),
    });
    out
}

/// All monomials in `G_2, G_4, G_6` of weight `<= max_weight`.
pub fn qm_mixed_basis(max_weight: u32, truncation: usize) -> Result<Basis> {
    expand_basis(monomial_exponents(max_weight), truncation)
}

/// `D^n H_m` for even `m >= 6` and `m + 2n <= max_weight`, ordered by weight
/// and then by `m`.
pub fn detecting_elements(max_weight: u32) -> Vec<BasisElement> {
    let mut out = Vec::new();
    let mut m = 6;
    while m <= max_weight {
        for n in 0..=(max_weight - m) / 2 {
            out.push(BasisElement::DerivedH { n, k: m });
        }
        m += 2;
    }
    out.sort_by_key(|e| match e {
        BasisElement::DerivedH { k, .. } => (e.weight(), *k),
        _ => unreachable!(),
    });
    out
}

pub fn detecting_basis(max_weight: u32, truncation: usize) -> Result<Basis> {
    if max_weight < 6 || max_weight % 2 == 1 {
        return Err(Error::invalid(format!(
            "detecting basis needs even weight >= 6, got {max_weight}"
        )));
    }
    expand_basis(detecting_elements(max_weight), truncation)
}

/// `(k-2)(k-4)/8`
pub fn detecting_dimension(k: u32) -> usize {
    ((k - 2) * (k - 4) / 8) as usize
}

/// Coefficients of a target with respect to a spanning set, plus the
/// residual `target - Σ c_i b_i`, which is zero whenever the representation
/// was produced by [`express_in_basis`].
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    pub coefficients: Vec<(BasisElement, ExactRational)>,
    pub residual: QSeries,
}

impl Representation {
    pub fn coeff(&self, e: &BasisElement) -> Option<&ExactRational> {
        self.coefficients.iter().find(|(b, _)| b == e).map(|(_, c)| c)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &(BasisElement, ExactRational)> {
        self.coefficients.iter().filter(|(_, c)| !c.is_zero())
    }
}

impl Serialize for Representation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.coefficients.len()))?;
        for (b, c) in &self.coefficients {
            map.serialize_entry(&b.to_string(), &format_rational(c))?;
        }
        map.end()
    }
}

/// Solves for `target = Σ c_i basis_i` using every coefficient
/// `q^0 ..= q^N` of the target. Free directions of a dependent basis get
/// coefficient zero.
pub fn express_in_basis(target: &QSeries, basis: &[(BasisElement, QSeries)]) -> Result<Representation> {
    let needed = basis.len() + COEFFICIENT_MARGIN;
    let n = target.truncation();
    if n < needed {
        return Err(Error::InsufficientTruncation {
            needed,
            have: n,
        });
    }
    if let Some((b, s)) = basis.iter().find(|(_, s)| s.truncation() < n) {
        return Err(Error::invalid(format!(
            "basis element {b} is truncated at {} but the target needs {n}",
            s.truncation()
        )));
    }
    let a: Vec<Vec<ExactRational>> = (0..=n)
        .map(|i| basis.iter().map(|(_, s)| s.coeff(i).clone()).collect())
        .collect();
    let b: Vec<ExactRational> = target.coeffs().to_vec();
    let x = match linalg::solve(&a, &b) {
        Some(x) => x,
        None => {
            let index = linalg::first_inconsistent_row(&a, &b).unwrap_or(n);
            return Err(Error::NotInSpan { index });
        }
    };
    let mut residual = target.clone();
    for ((_, s), c) in basis.iter().zip(&x) {
        residual.add_scaled(&-c, s);
    }
    debug_assert!(residual.is_zero());
    Ok(Representation {
        coefficients: basis.iter().map(|(e, _)| e.clone()).zip(x).collect(),
        residual,
    })
}

/// Outcome of a prime-detection check on `1..=N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No { witness: usize, reason: String },
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes)
    }
}

/// Checks that the coefficient of `q^n` is nonnegative for `1 <= n <= N`,
/// zero at `n = 1`, and for `n >= 2` zero exactly when `n` is prime. The
/// constant term is ignored. The verdict only covers the truncation window.
pub fn is_prime_detecting(f: &QSeries) -> Result<Verdict> {
    if f.truncation() < 10 {
        return Err(Error::InsufficientTruncation {
            needed: 10,
            have: f.truncation(),
        });
    }
    Ok(detect_on_window(f.coeffs()))
}

/// Same check on an explicit coefficient table (index = n).
pub fn detect_on_window(coeffs: &[ExactRational]) -> Verdict {
    for (n, c) in coeffs.iter().enumerate().skip(1) {
        if c.is_negative() {
            return Verdict::No {
                witness: n,
                reason: format!("coefficient {} is negative", format_rational(c)),
            };
        }
        let should_vanish = n == 1 || is_prime(n as u64);
        if should_vanish && !c.is_zero() {
            return Verdict::No {
                witness: n,
                reason: format!("coefficient {} is nonzero at n = {n}", format_rational(c)),
            };
        }
        if !should_vanish && c.is_zero() {
            return Verdict::No {
                witness: n,
                reason: format!("coefficient vanishes at composite n = {n}"),
            };
        }
    }
    Verdict::Yes
}

/// The three derivative identities for `G_2, G_4, G_6`, checked exactly.
pub fn ramanujan_residuals(truncation: usize) -> Result<[QSeries; 3]> {
    let n = truncation;
    let g2 = g_series(2, n)?;
    let g4 = g_series(4, n)?;
    let g6 = g_series(6, n)?;
    let r2 = &g2.apply_d(1) - &(&(&g2 * &g2).scale(&rat(-2, 1)) + &g4.scale(&rat(5, 6)));
    let r4 = &g4.apply_d(1) - &(&(&g2 * &g4).scale(&rat(-8, 1)) + &g6.scale(&rat(7, 10)));
    let r6 = &g6.apply_d(1) - &(&(&g2 * &g6).scale(&rat(-12, 1)) + &(&g4 * &g4).scale(&rat(400, 7)));
    Ok([r2, r4, r6])
}

pub fn verify_ramanujan(truncation: usize) -> Result<bool> {
    if truncation < 10 {
        return Err(Error::InsufficientTruncation {
            needed: 10,
            have: truncation,
        });
    }
    Ok(ramanujan_residuals(truncation)?.iter().all(QSeries::is_zero))
}

/// Integer values `scale * b_n(f)` for `n` in the given range, or the first
/// index at which the scaled coefficient is not integral.
pub fn scaled_integers(
    f: &QSeries,
    scale: i64,
    range: std::ops::RangeInclusive<usize>,
) -> std::result::Result<Vec<BigInt>, usize> {
    let s = BigRational::from_integer(BigInt::from(scale));
    range
        .map(|n| {
            let v = f.coeff(n) * &s;
            if v.is_integer() {
                Ok(v.to_integer())
            } else {
                Err(n)
            }
        })
        .collect()
}
