//! Prime-detecting partition expressions: the polynomial-coefficient family
//! in `M_1, ..., M_a`, the constant-coefficient family in the `M_v`,
//! certificates for both, and searches for new ones.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::linalg;
use crate::partition::{brute_m_table, macmahon_u, PartVector};
use crate::poly::IntPoly;
use crate::quasimodular::{
    detecting_basis, detect_on_window, express_in_basis, h_series, BasisElement, Verdict,
    COEFFICIENT_MARGIN,
};
use crate::series::{format_rational, int, parse_rational, ExactRational, QSeries};
use crate::shuffle::{quasi_shuffle_lin, sym_lincomb, u_of_lincomb, LinComb, Word};

/// `E(n) = Σ_i p_i(n) M_i(n)`, with `polys[i - 1] = p_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyDetector {
    pub polys: Vec<IntPoly>,
}

impl PolyDetector {
    pub fn new(polys: Vec<IntPoly>) -> Self {
        let mut polys = polys;
        while polys.last().is_some_and(IntPoly::is_zero) {
            polys.pop();
        }
        PolyDetector { polys }
    }

    /// Rows of coefficients, highest degree first.
    pub fn from_descending(rows: &[&[i64]]) -> Self {
        Self::new(
            rows.iter()
                .map(|r| {
                    let mut c = r.to_vec();
                    c.reverse();
                    IntPoly::from_i64(&c)
                })
                .collect(),
        )
    }

    /// Coefficients in comparison order: `p_1` from its leading term down,
    /// then `p_2`, and so on.
    fn ordered_coeffs(&self) -> impl Iterator<Item = BigInt> + '_ {
        self.polys.iter().flat_map(|p| p.coeffs().iter().rev().cloned())
    }

    /// Coprime integer coefficients with the first nonzero coefficient (in
    /// the order above) positive.
    pub fn normalized(&self) -> PolyDetector {
        let g = self.ordered_coeffs().fold(BigInt::zero(), |acc, c| acc.gcd(&c));
        if g.is_zero() {
            return self.clone();
        }
        let negative = self.ordered_coeffs().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative());
        let g = if negative { -g } else { g };
        PolyDetector::new(self.polys.iter().map(|p| p.divide_exact(&g)).collect())
    }

    /// Multiplies every polynomial by `n^k`.
    pub fn shift(&self, k: usize) -> PolyDetector {
        PolyDetector::new(self.polys.iter().map(|p| p.shift(k)).collect())
    }

    pub fn max_degree(&self) -> usize {
        self.polys.iter().filter_map(IntPoly::degree).max().unwrap_or(0)
    }

    /// `Σ_i p_i(D) U_i`; its coefficients are `E(0..=N)`.
    pub fn series(&self, truncation: usize) -> Result<QSeries> {
        let mut total = QSeries::zero(truncation);
        for (i, p) in self.polys.iter().enumerate() {
            if !p.is_zero() {
                total = &total + &macmahon_u(i + 1, truncation)?.apply_poly_in_d(p);
            }
        }
        Ok(total)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "poly",
            "polys": self.polys.iter()
                .map(|p| p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for PolyDetector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, p) in self.polys.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let c = p.coeff(0);
            let constant = p.degree() == Some(0);
            if !first {
                write!(f, "{}", if constant && c.is_negative() { " - " } else { " + " })?;
            } else if constant && c.is_negative() {
                write!(f, "-")?;
            }
            if constant {
                write!(f, "{}M_{}", coefficient_prefix(&c.abs()), i + 1)?;
            } else {
                write!(f, "({p})M_{}", i + 1)?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn coefficient_prefix(c: &BigInt) -> String {
    if c.is_one() {
        String::new()
    } else {
        c.to_string()
    }
}

pub fn eval_poly_detector(det: &PolyDetector, truncation: usize) -> Result<QSeries> {
    det.series(truncation)
}

/// `Σ c_v M_v(n)` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstDetector {
    pub terms: BTreeMap<Word, BigInt>,
    /// Bound on `|v|` the detector was built for.
    pub max_weight: u32,
}

impl ConstDetector {
    /// Clears denominators and content, keeping signs.
    pub fn from_lincomb(l: &LinComb, max_weight: u32) -> Self {
        ConstDetector {
            terms: l.primitive_integer(true),
            max_weight,
        }
    }

    pub fn from_terms(terms: &[(&[u32], i64)]) -> Self {
        let terms: BTreeMap<Word, BigInt> = terms
            .iter()
            .map(|(v, c)| (Word::new(v.to_vec()), BigInt::from(*c)))
            .collect();
        let max_weight = terms.keys().map(Word::weight).max().unwrap_or(0);
        ConstDetector { terms, max_weight }
    }

    pub fn lincomb(&self) -> LinComb {
        LinComb::from_terms(self.terms.iter().map(|(w, c)| (w.clone(), int(c.clone()))))
    }

    pub fn observed_max_weight(&self) -> u32 {
        self.terms.keys().map(Word::weight).max().unwrap_or(0)
    }

    pub fn series(&self, truncation: usize) -> QSeries {
        u_of_lincomb(&self.lincomb(), truncation)
    }

    /// Values `Σ c_v M_v(n)` for `0 <= n <= n_max` by direct enumeration of
    /// partitions, independent of the series machinery.
    pub fn brute_values(&self, n_max: u64) -> Result<Vec<BigInt>> {
        let vecs: Vec<PartVector> = self
            .terms
            .keys()
            .map(|w| PartVector::new(w.letters().to_vec()))
            .collect::<Result<_>>()?;
        let table = brute_m_table(&vecs, n_max);
        let mut out = vec![BigInt::zero(); n_max as usize + 1];
        for (row, c) in table.iter().zip(self.terms.values()) {
            for (slot, m) in out.iter_mut().zip(row) {
                *slot += c * m;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "const",
            "max_weight": self.max_weight,
            "terms": self.terms.iter()
                .map(|(w, c)| json!({"vector": w.letters(), "coeff": c.to_string()}))
                .collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for ConstDetector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write!(f, "{}M{w}", coefficient_prefix(&c.abs()))?;
        }
        Ok(())
    }
}

pub fn eval_const_detector(det: &ConstDetector, truncation: usize) -> QSeries {
    det.series(truncation)
}

/// A detector of either family, as read from a detector file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Detector {
    Poly(PolyDetector),
    Const(ConstDetector),
}

fn json_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("not an integer: {n}"))),
        Value::String(s) => s
            .trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("not an integer: {s:?}"))),
        other => Err(Error::Parse(format!("expected integer, got {other}"))),
    }
}

impl Detector {
    /// Parses `{"kind": "poly", "polys": [[c0, c1, ...], ...]}` (lowest
    /// degree first, integers or integer strings) or
    /// `{"kind": "const", "terms": [{"vector": [..], "coeff": "c"}, ...]}`.
    pub fn from_json(text: &str) -> Result<Detector> {
        let v: Value = serde_json::from_str(text)?;
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("detector file needs a \"kind\" field".into()))?;
        match kind {
            "poly" => {
                let polys = v
                    .get("polys")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Parse("poly detector needs a \"polys\" array".into()))?;
                let polys = polys
                    .iter()
                    .map(|p| {
                        let coeffs = p
                            .as_array()
                            .ok_or_else(|| Error::Parse("each polynomial must be an array".into()))?;
                        Ok(IntPoly::new(coeffs.iter().map(json_int).collect::<Result<_>>()?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Detector::Poly(PolyDetector::new(polys)))
            }
            "const" => {
                let terms = v
                    .get("terms")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Parse("const detector needs a \"terms\" array".into()))?;
                let mut map: BTreeMap<Word, BigInt> = BTreeMap::new();
                for t in terms {
                    let vector: Vec<u32> = serde_json::from_value(
                        t.get("vector").cloned().unwrap_or(Value::Null),
                    )?;
                    PartVector::new(vector.clone())?;
                    let coeff = match t.get("coeff") {
                        Some(Value::String(s)) => parse_rational(s)?,
                        Some(other) => int(json_int(other)?),
                        None => return Err(Error::Parse("term without \"coeff\"".into())),
                    };
                    if !coeff.is_integer() {
                        return Err(Error::Parse(format!(
                            "const detector coefficients must be integers, got {}",
                            format_rational(&coeff)
                        )));
                    }
                    *map.entry(Word::new(vector)).or_default() += coeff.to_integer();
                }
                map.retain(|_, c| !c.is_zero());
                let max_weight = map.keys().map(Word::weight).max().unwrap_or(0);
                Ok(Detector::Const(ConstDetector { terms: map, max_weight }))
            }
            other => Err(Error::Parse(format!("unknown detector kind {other:?}"))),
        }
    }

    pub fn series(&self, truncation: usize) -> Result<QSeries> {
        match self {
            Detector::Poly(d) => d.series(truncation),
            Detector::Const(d) => Ok(d.series(truncation)),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Detector::Poly(d) => d.to_json(),
            Detector::Const(d) => d.to_json(),
        }
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Detector::Poly(d) => d.fmt(f),
            Detector::Const(d) => d.fmt(f),
        }
    }
}

/// Record of a successful prime-detection check on `1..=range`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub detector: String,
    pub range: usize,
    /// `(n, value)` for every composite `n <= range`.
    pub composite_values: Vec<(usize, String)>,
    /// SHA-256 of the comma-separated primes up to `range`.
    pub prime_table_sha256: String,
}

pub fn prime_table_hash(range: usize) -> String {
    let primes: Vec<String> = (2..=range as u64)
        .filter(|&n| is_prime(n))
        .map(|n| n.to_string())
        .collect();
    let digest = Sha256::digest(primes.join(",").as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Checks `f` on `1..=N` and returns a certificate, or a verification error
/// naming the first failing `n`.
pub fn certify(label: impl Into<String>, f: &QSeries) -> Result<Certificate> {
    let label = label.into();
    let range = f.truncation();
    if range < 10 {
        return Err(Error::InsufficientTruncation { needed: 10, have: range });
    }
    certify_values(label, f.coeffs())
}

fn certify_values(label: String, values: &[ExactRational]) -> Result<Certificate> {
    let range = values.len() - 1;
    if let Verdict::No { witness, reason } = detect_on_window(values) {
        return Err(Error::verification(
            format!("{label}: not prime-detecting at n = {witness}: {reason}"),
            Some(witness),
        ));
    }
    let composite_values = (4..=range)
        .filter(|&n| !is_prime(n as u64))
        .map(|n| (n, format_rational(&values[n])))
        .collect();
    Ok(Certificate {
        detector: label,
        range,
        composite_values,
        prime_table_sha256: prime_table_hash(range),
    })
}

/// `Σ p_k(D) H_k` for pairs `(p_k, k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HForm {
    pub terms: Vec<(IntPoly, u32)>,
}

impl HForm {
    pub fn series(&self, truncation: usize) -> Result<QSeries> {
        let mut total = QSeries::zero(truncation);
        for (p, k) in &self.terms {
            total = &total + &h_series(*k, truncation)?.apply_poly_in_d(p);
        }
        Ok(total)
    }
}

impl fmt::Display for HForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (p, k)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let text = p.to_string().replace('n', "D");
            if p.degree() == Some(0) {
                write!(f, "{text}H_{k}")?;
            } else {
                write!(f, "({text})H_{k}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table1Row {
    pub detector: PolyDetector,
    pub form: HForm,
}

/// The five polynomial-coefficient detectors in `M_1, ..., M_a` together
/// with the quasimodular forms they equal.
pub fn table1() -> Vec<Table1Row> {
    let c = |k: i64| IntPoly::from_i64(&[k]);
    vec![
        Table1Row {
            detector: PolyDetector::from_descending(&[&[1, -3, 2], &[-8]]),
            form: HForm { terms: vec![(c(6), 6)] },
        },
        Table1Row {
            detector: PolyDetector::from_descending(&[&[3, -13, 18, -8], &[12, -120, 212], &[-960]]),
            form: HForm { terms: vec![(c(36), 8)] },
        },
        Table1Row {
            detector: PolyDetector::from_descending(&[
                &[25, -171, 423, -447, 170],
                &[300, -3554, 12900, -14990],
                &[2400, -60480, 214080],
                &[-725760],
            ]),
            form: HForm { terms: vec![(c(90), 10)] },
        },
        Table1Row {
            detector: PolyDetector::from_descending(&[
                &[126, -1303, 5073, -9323, 8097, -2670],
                &[3024, -48900, 288014, -737100, 695490],
                &[60480, -1510080, 10644480, -23496480],
                &[725760, -36288000, 218453760],
                &[-580608000],
            ]),
            form: HForm { terms: vec![(c(90), 12)] },
        },
        Table1Row {
            detector: PolyDetector::from_descending(&[
                &[300, -1542, -33049, 377959, -1651959, 3726801, -4575760, 2903750, -746500],
                &[12000, -91008, -2799900, 50637162, -351366300, 1239098170, -2210467000, 1585493500],
                &[432000, -3548160, -236343840, 5133219840, -42370071840, 161101416000, -236150560800],
                &[12096000, -72817920, -17599680000, 396192142080, -3123876672000, 8555162112000],
                &[193536000, 0, -1056513024000, 21310248960000, -112944125952000],
                &[-46495088640000, 604436152320000],
                &[-1115882127360000],
            ]),
            form: HForm {
                terms: vec![(IntPoly::from_i64(&[30, 0, 30]), 14), (c(30), 16)],
            },
        },
    ]
}

/// Verifies every row of [`table1`]: prime detection on `1..=N` and exact
/// agreement with its quasimodular form on `q^1..q^N`.
pub fn verify_table1(truncation: usize) -> Result<Vec<Certificate>> {
    if truncation < 30 {
        return Err(Error::InsufficientTruncation { needed: 30, have: truncation });
    }
    table1()
        .par_iter()
        .enumerate()
        .map(|(i, row)| {
            let row_no = i + 1;
            let e = row.detector.series(truncation)?;
            let h = row.form.series(truncation)?;
            if let Some(n) = e.first_difference_positive(&h) {
                return Err(Error::verification(
                    format!(
                        "row {row_no}: coefficient of q^{n} is {} but {} gives {}",
                        format_rational(e.coeff(n)),
                        row.form,
                        format_rational(h.coeff(n))
                    ),
                    Some(n),
                ));
            }
            certify(format!("row {row_no}: {} = {}", row.detector, row.form), &e).map_err(|err| match err {
                Error::Verification { message, index } => {
                    Error::verification(format!("row {row_no}: {message}"), index)
                }
                other => other,
            })
        })
        .collect()
}

pub fn psi1() -> ConstDetector {
    ConstDetector::from_terms(&[
        (&[2, 2], 63),
        (&[3, 0], -12),
        (&[3, 1], -39),
        (&[1, 3], -12),
        (&[1, 1, 1], 80),
        (&[2, 0, 1], -12),
        (&[2, 1, 0], 12),
        (&[3, 0, 0], 12),
    ])
}

pub fn psi2() -> ConstDetector {
    ConstDetector::from_terms(&[
        (&[1], 14),
        (&[2], -15),
        (&[3], -2),
        (&[4], 3),
        (&[2, 0], 30),
        (&[3, 0], -72),
        (&[2, 1], -36),
        (&[4, 0], -6),
        (&[3, 1], -12),
        (&[2, 1, 0], 72),
        (&[3, 0, 0], 72),
    ])
}

/// `Ψ_3` built from its convolution definition with series products:
/// `10U_(1) - 17U_(3) + 7U_(5) + 12 U_(1)(U_(1) - 10U_(3)) + 96 U_(1)^3`.
pub fn psi3_series(truncation: usize) -> QSeries {
    let u = |v: u32| u_of_lincomb(&LinComb::word(Word::letter(v)), truncation);
    let (u1, u3, u5) = (u(1), u(3), u(5));
    let c = |k: i64| int(k);
    let mut s = u1.scale(&c(10));
    s.add_scaled(&c(-17), &u3);
    s.add_scaled(&c(7), &u5);
    let inner = &u1 - &u3.scale(&c(10));
    s.add_scaled(&c(12), &(&u1 * &inner));
    s.add_scaled(&c(96), &(&(&u1 * &u1) * &u1));
    s
}

/// `Ψ_3` rewritten as a constant combination of `M_v` through the
/// quasi-shuffle product.
pub fn psi3_lincomb() -> LinComb {
    let l = |v: u32| LinComb::word(Word::letter(v));
    let c = |k: i64| int(k);
    let mut out = LinComb::zero();
    out.add_scaled(&c(10), &l(1));
    out.add_scaled(&c(-17), &l(3));
    out.add_scaled(&c(7), &l(5));
    let mut inner = l(1);
    inner.add_scaled(&c(-10), &l(3));
    out.add_scaled(&c(12), &quasi_shuffle_lin(&l(1), &inner));
    let square = quasi_shuffle_lin(&l(1), &l(1));
    out.add_scaled(&c(96), &quasi_shuffle_lin(&square, &l(1)));
    out
}

/// Builds `Ψ_3` from products, checks that it equals `Ψ_2` on `q^0..q^N`
/// and certifies it.
pub fn verify_psi3(truncation: usize) -> Result<Certificate> {
    if truncation < 30 {
        return Err(Error::InsufficientTruncation { needed: 30, have: truncation });
    }
    let s3 = psi3_series(truncation);
    let s2 = psi2().series(truncation);
    if let Some(n) = s3.first_difference(&s2) {
        return Err(Error::verification(
            format!("Psi_3 and Psi_2 differ at q^{n}"),
            Some(n),
        ));
    }
    certify("Psi_3 = 10M_(1) - 17M_(3) + 7M_(5) + 12 M_(1)*(M_(1) - 10M_(3)) + 96 M_(1)*M_(1)*M_(1)", &s3)
}

/// Result of a constant-coefficient search in mixed weight `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstSearch {
    pub weight: u32,
    /// The weight bound `d` requested; `weight = d + 4`.
    pub bound: u32,
    pub targets: Vec<BasisElement>,
    pub detectors: Vec<ConstDetector>,
    /// Largest `|v|` among all returned terms.
    pub observed_max_weight: u32,
}

impl ConstSearch {
    pub fn exceeds_bound(&self) -> bool {
        self.observed_max_weight > self.bound
    }
}

/// All-odd vectors with non-increasing entries and `|v| + length <= k`:
/// one representative per symmetrization orbit.
pub fn odd_orbit_representatives(k: u32) -> Vec<PartVector> {
    fn rec(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        let mut v = 1;
        while v <= max && v < left {
            cur.push(v);
            rec(left - v - 1, v, cur, out);
            cur.pop();
            v += 2;
        }
    }
    let mut out = Vec::new();
    rec(k, k, &mut Vec::new(), &mut out);
    let mut words: Vec<Word> = out.into_iter().map(Word::new).collect();
    words.sort();
    words
        .into_iter()
        .map(|w| PartVector::new(w.letters().to_vec()).expect("nonempty"))
        .collect()
}

/// Constant-coefficient detectors with `|v| <= d`, searched in mixed weight
/// `k = d + 4`.
pub fn search_const_detectors(d: u32, truncation: usize) -> Result<ConstSearch> {
    if d < 4 {
        return Err(Error::invalid(format!("weight bound d must be >= 4, got {d}")));
    }
    let mut s = search_const_detectors_at_weight(d + 4, truncation)?;
    s.bound = d;
    Ok(s)
}

/// One detector per `D^n H_m` with `m + 2n <= k`: each target is written in
/// the span of `1` and the symmetrized series `Σ_σ U_{σ v}` over all-odd `v`
/// with `|v| + length(v) <= k`, then expanded into individual `M_v` and
/// cleared to coprime integers. Every detector is certified on `1..=N`.
pub fn search_const_detectors_at_weight(k: u32, truncation: usize) -> Result<ConstSearch> {
    if k < 6 || k % 2 == 1 {
        return Err(Error::invalid(format!("working weight must be even and >= 6, got {k}")));
    }
    if truncation < 10 {
        return Err(Error::InsufficientTruncation { needed: 10, have: truncation });
    }
    let mut elements = vec![BasisElement::Monomial { i: 0, j: 0, l: 0 }];
    elements.extend(odd_orbit_representatives(k).into_iter().map(BasisElement::SymU));
    let solve_to = elements.len() + COEFFICIENT_MARGIN;
    let n = solve_to.max(truncation);
    let generators = crate::quasimodular::expand_basis(elements, n)?;
    let targets = detecting_basis(k, n)?;

    let detectors = targets
        .par_iter()
        .map(|(label, h)| {
            let rep = express_in_basis(h, &generators).map_err(|e| match e {
                Error::NotInSpan { index } => Error::SpanDeficiency(format!(
                    "{label} is not in the span of symmetrized odd series of weight <= {k} (first mismatch at q^{index})"
                )),
                other => other,
            })?;
            let mut l = LinComb::zero();
            for (g, c) in rep.nonzero() {
                if let BasisElement::SymU(v) = g {
                    l.add_scaled(c, &sym_lincomb(v));
                }
            }
            let det = ConstDetector::from_lincomb(&l, k.saturating_sub(4));
            let s = det.series(truncation);
            certify(label.to_string(), &s)?;
            Ok(det)
        })
        .collect::<Result<Vec<_>>>()?;

    let rows: Vec<Vec<ExactRational>> = detectors
        .iter()
        .map(|d| d.series(truncation).coeffs()[1..].to_vec())
        .collect();
    let rank = linalg::rank(&rows);
    if rank != detectors.len() {
        return Err(Error::verification(
            format!("{} detectors found but only {rank} are independent", detectors.len()),
            None,
        ));
    }
    let observed_max_weight = detectors.iter().map(ConstDetector::observed_max_weight).max().unwrap_or(0);
    Ok(ConstSearch {
        weight: k,
        bound: k - 4,
        targets: targets.into_iter().map(|(e, _)| e).collect(),
        detectors,
        observed_max_weight,
    })
}

/// Re-checks a constant detector by direct partition enumeration on
/// `1..=n_max`.
pub fn verify_const_by_enumeration(det: &ConstDetector, n_max: u64) -> Result<Certificate> {
    let values: Vec<ExactRational> = det.brute_values(n_max)?.into_iter().map(int).collect();
    certify_values(det.to_string(), &values)
}

/// Basis of the polynomial-coefficient expressions `Σ_{a <= max_a} p_a(n)
/// M_a(n)` with `deg p_a <= max_deg` whose series (for `n >= 1`) lies in the
/// span of the `D^n H_m` of weight `<= 2(max_a + max_deg)`.
///
/// The basis is the reduced echelon form with coordinates ordered `p_1` from
/// its top degree down, then `p_2`, and so on; each vector is scaled to
/// coprime integers with its first nonzero coordinate positive. Elements are
/// in the span of prime-detecting forms but need not be nonnegative
/// themselves.
pub fn search_poly_detectors(max_a: usize, max_deg: usize, truncation: usize) -> Result<Vec<PolyDetector>> {
    if max_a == 0 {
        return Err(Error::invalid("max_a must be >= 1"));
    }
    let k = 2 * (max_a + max_deg) as u32;
    if k < 6 {
        return Ok(Vec::new());
    }
    let coords: Vec<(usize, usize)> = (1..=max_a)
        .flat_map(|a| (0..=max_deg).rev().map(move |j| (a, j)))
        .collect();
    let h_elements = crate::quasimodular::detecting_elements(k);
    let rows = coords.len() + h_elements.len() + COEFFICIENT_MARGIN;
    let n = rows.max(truncation);

    let us: Vec<QSeries> = (1..=max_a)
        .into_par_iter()
        .map(|a| macmahon_u(a, n))
        .collect::<Result<_>>()?;
    let mut columns: Vec<QSeries> = coords.iter().map(|&(a, j)| us[a - 1].apply_d(j as u32)).collect();
    let hs = crate::quasimodular::expand_basis(h_elements, n)?;
    columns.extend(hs.iter().map(|(_, s)| s.scale(&-BigRational::one())));

    let matrix: Vec<Vec<ExactRational>> = (1..=rows)
        .map(|i| columns.iter().map(|c| c.coeff(i).clone()).collect())
        .collect();
    let kernel = linalg::nullspace(&matrix);
    let (reduced, _) = linalg::rref(&kernel);

    let mut out = Vec::new();
    for v in reduced {
        let x = &v[..coords.len()];
        let y = &v[coords.len()..];
        if y.iter().all(Zero::is_zero) {
            // a relation among the candidates themselves: zero series
            continue;
        }
        let mut lhs = QSeries::zero(n);
        for (c, s) in x.iter().zip(&columns) {
            lhs.add_scaled(c, s);
        }
        let mut rhs = QSeries::zero(n);
        for (c, (_, s)) in y.iter().zip(&hs) {
            rhs.add_scaled(c, s);
        }
        if let Some(i) = lhs.first_difference_positive(&rhs) {
            return Err(Error::verification(
                format!("kernel vector fails beyond the solved window at q^{i}"),
                Some(i),
            ));
        }
        out.push(poly_detector_from_coords(&coords, x, max_a).normalized());
    }
    Ok(out)
}

fn poly_detector_from_coords(coords: &[(usize, usize)], x: &[ExactRational], max_a: usize) -> PolyDetector {
    let den = crate::series::common_denominator(x);
    let mut polys = vec![Vec::<BigInt>::new(); max_a];
    for (&(a, j), c) in coords.iter().zip(x) {
        let p = &mut polys[a - 1];
        if p.len() <= j {
            p.resize(j + 1, BigInt::zero());
        }
        p[j] = c.numer() * (&den / c.denom());
    }
    PolyDetector::new(polys.into_iter().map(IntPoly::new).collect())
}

/// Whether `target` is a combination `Σ r_i(n) g_i` of the generators with
/// polynomial multipliers `r_i` of degree `<= max_shift`.
pub fn in_polynomial_span(generators: &[PolyDetector], target: &PolyDetector, max_shift: usize) -> bool {
    let spanning: Vec<PolyDetector> = generators
        .iter()
        .flat_map(|g| (0..=max_shift).map(move |s| g.shift(s)))
        .collect();
    let a = spanning
        .iter()
        .chain(std::iter::once(target))
        .map(|d| d.polys.len())
        .max()
        .unwrap_or(0);
    let deg = spanning
        .iter()
        .chain(std::iter::once(target))
        .map(PolyDetector::max_degree)
        .max()
        .unwrap_or(0);
    let flatten = |d: &PolyDetector| -> Vec<ExactRational> {
        (0..a)
            .flat_map(|i| {
                (0..=deg).map(move |j| int(d.polys.get(i).map(|p| p.coeff(j)).unwrap_or_default()))
            })
            .collect()
    };
    let cols: Vec<Vec<ExactRational>> = spanning.iter().map(flatten).collect();
    let b = flatten(target);
    let matrix: Vec<Vec<ExactRational>> = (0..b.len())
        .map(|r| cols.iter().map(|c| c[r].clone()).collect())
        .collect();
    linalg::solve(&matrix, &b).is_some()
}
