//! MacMahonesque partition functions.
//!
//! `M_v(n)` sums `m_1^{v_1} ... m_a^{v_a}` over the ways of writing `n` as a
//! sum of exactly `a` distinct part sizes with multiplicities `m_i >= 1`,
//! where `m_1` is the multiplicity of the largest part size, `m_2` of the
//! next largest, and so on. For palindromic vectors such as `(1, ..., 1)`
//! the pairing is immaterial. The brute-force functions here enumerate the
//! decompositions directly and serve as the oracle for the generating-series
//! path in [`u_series`].

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::binomial;
use crate::error::{Error, Result};
use crate::series::{int, QSeries};

/// Exponent vector `(v_1, ..., v_a)` indexing `M_v`. Entries may be zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct PartVector(Vec<u32>);

impl PartVector {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("a part vector needs at least one entry"));
        }
        Ok(PartVector(entries))
    }

    /// The all-ones vector of length `a`, for which `M_v = M_a`.
    pub fn ones(a: usize) -> Result<Self> {
        Self::new(vec![1; a])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `|v| + length(v)`, the grading under which products stay bounded.
    pub fn filtration_weight(&self) -> u32 {
        self.weight() + self.0.len() as u32
    }

    pub fn all_odd(&self) -> bool {
        self.0.iter().all(|v| v % 2 == 1)
    }
}

impl TryFrom<Vec<u32>> for PartVector {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        PartVector::new(v)
    }
}

impl From<PartVector> for Vec<u32> {
    fn from(v: PartVector) -> Vec<u32> {
        v.0
    }
}

impl FromStr for PartVector {
    type Err = Error;

    /// Parses comma-separated text such as `1,1` or `(2,0,1)`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let entries = body
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad vector entry {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        PartVector::new(entries)
    }
}

impl fmt::Display for PartVector {
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

/// A partition of `n` as (size, multiplicity) pairs with strictly
/// increasing sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionDecomposition {
    pub parts: Vec<(u64, u64)>,
}

impl PartitionDecomposition {
    pub fn total(&self) -> u64 {
        self.parts.iter().map(|(s, m)| s * m).sum()
    }
}

/// Calls `visit` on every decomposition of `n` with exactly `a` distinct part
/// sizes, in lexicographic order of the size tuple and then of the
/// multiplicities.
pub fn for_each_decomposition(n: u64, a: usize, mut visit: impl FnMut(&[(u64, u64)])) {
    fn rec(
        remaining: u64,
        left: usize,
        min_size: u64,
        stack: &mut Vec<(u64, u64)>,
        visit: &mut dyn FnMut(&[(u64, u64)]),
    ) {
        if left == 0 {
            if remaining == 0 {
                visit(stack);
            }
            return;
        }
        let mut s = min_size;
        loop {
            // the other `left - 1` sizes are at least s+1, ..., s+left-1
            let l = left as u64;
            let need = l * s + (l - 1) * l / 2;
            if need > remaining {
                break;
            }
            let mut m = 1;
            while m * s <= remaining {
                stack.push((s, m));
                rec(remaining - m * s, left - 1, s + 1, stack, visit);
                stack.pop();
                m += 1;
            }
            s += 1;
        }
    }
    if a == 0 {
        return;
    }
    let mut stack = Vec::with_capacity(a);
    rec(n, a, 1, &mut stack, &mut visit);
}

pub fn decompositions(n: u64, a: usize) -> Vec<PartitionDecomposition> {
    let mut out = Vec::new();
    for_each_decomposition(n, a, |p| {
        out.push(PartitionDecomposition { parts: p.to_vec() })
    });
    out
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("partition functions require n >= 1"));
    }
    Ok(())
}

/// `parts` is in increasing size order and `exps[0]` belongs to the largest
/// size.
fn weight_product(parts: &[(u64, u64)], exps: &[u32]) -> BigInt {
    let mut acc: u128 = 1;
    for (&(_, m), &v) in parts.iter().zip(exps.iter().rev()) {
        match (m as u128).checked_pow(v).and_then(|p| acc.checked_mul(p)) {
            Some(x) => acc = x,
            None => {
                return parts
                    .iter()
                    .zip(exps.iter().rev())
                    .map(|(&(_, m), &v)| BigInt::from(m).pow(v))
                    .product()
            }
        }
    }
    BigInt::from(acc)
}

/// Exhaustive-enumeration value of `M_v(n)`.
pub fn brute_m(vec: &PartVector, n: u64) -> Result<BigInt> {
    check_n(n)?;
    let mut total = BigInt::zero();
    for_each_decomposition(n, vec.len(), |p| total += weight_product(p, vec.entries()));
    Ok(total)
}

/// `M_v(n)` for every vector in `vecs` and every `1 <= n <= n_max`, sharing
/// one enumeration per (n, length). Row `i` holds `M_{vecs[i]}(0..=n_max)`
/// with a zero at index 0.
pub fn brute_m_table(vecs: &[PartVector], n_max: u64) -> Vec<Vec<BigInt>> {
    let mut table = vec![vec![BigInt::zero(); n_max as usize + 1]; vecs.len()];
    let mut by_len: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, v) in vecs.iter().enumerate() {
        by_len.entry(v.len()).or_default().push(i);
    }
    for (a, idx) in by_len {
        for n in 1..=n_max {
            for_each_decomposition(n, a, |p| {
                for &i in &idx {
                    table[i][n as usize] += weight_product(p, vecs[i].entries());
                }
            });
        }
    }
    table
}

/// Exhaustive-enumeration value of `N_v(n) = Σ Π C(m_i + v_i - 1, v_i)`.
pub fn brute_n(vec: &PartVector, n: u64) -> Result<BigInt> {
    check_n(n)?;
    let mut total = BigInt::zero();
    for_each_decomposition(n, vec.len(), |p| {
        total += p
            .iter()
            .zip(vec.entries().iter().rev())
            .map(|(&(_, m), &v)| binomial(m + v as u64 - 1, v as u64))
            .product::<BigInt>();
    });
    Ok(total)
}

/// Eulerian polynomial `P_k`, defined by `x P_k(x) / (1-x)^{k+1} = Σ_j j^k x^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerianPolynomial {
    pub index: usize,
    /// Lowest degree first.
    pub coeffs: Vec<BigInt>,
}

pub fn eulerian(k: usize) -> EulerianPolynomial {
    // A(n, m) = (m+1) A(n-1, m) + (n-m) A(n-1, m-1), starting from P_0 = 1
    let mut row = vec![BigInt::one()];
    for n in 1..=k {
        let len = n.max(1);
        let mut next = vec![BigInt::zero(); len];
        for (m, slot) in next.iter_mut().enumerate() {
            let a = row.get(m).cloned().unwrap_or_default() * BigInt::from(m + 1);
            let b = if m > 0 {
                row.get(m - 1).cloned().unwrap_or_default() * BigInt::from(n - m)
            } else {
                BigInt::zero()
            };
            *slot = a + b;
        }
        row = next;
    }
    EulerianPolynomial { index: k, coeffs: row }
}

/// The single-size block `Σ_{m>=1} m^v q^{m s}`, which equals
/// `q^s P_v(q^s) / (1 - q^s)^{v+1}`.
pub fn block_series(v: u32, s: usize, truncation: usize) -> QSeries {
    QSeries::from_fn(truncation, int(0), |n| {
        if n % s == 0 {
            int(BigInt::from(n / s).pow(v))
        } else {
            int(0)
        }
    })
}

type UCache = Mutex<HashMap<Vec<u32>, Arc<Vec<BigInt>>>>;
static U_CACHE: OnceLock<UCache> = OnceLock::new();

/// Coefficients `M_v(0..=truncation)` of the generating series, cached per
/// vector.
pub fn u_coefficients(entries: &[u32], truncation: usize) -> Arc<Vec<BigInt>> {
    let cache = U_CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(entries) {
        if hit.len() > truncation {
            return hit.clone();
        }
    }
    let computed = Arc::new(compute_u(entries, truncation));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    let slot = guard.entry(entries.to_vec()).or_insert_with(|| computed.clone());
    if slot.len() < computed.len() {
        *slot = computed.clone();
    }
    computed
}

/// Expands `Σ_{s_1>...>s_a} Π_i B_{v_i}(q^{s_i})` by sweeping the sizes in
/// increasing order, so the entries are consumed from last to first.
/// `layers[j]` holds the partial sum over size tuples that have consumed `j`
/// entries, and each block series is multiplied in exactly once per size.
fn compute_u(entries: &[u32], truncation: usize) -> Vec<BigInt> {
    let entries: Vec<u32> = entries.iter().rev().copied().collect();
    let a = entries.len();
    let n = truncation;
    if a == 0 {
        let mut one = vec![BigInt::zero(); n + 1];
        one[0] = BigInt::one();
        return one;
    }
    let max_v = entries.iter().copied().max().unwrap_or(0);
    let powers: Vec<Vec<BigInt>> = (0..=max_v)
        .map(|v| (0..=n).map(|m| BigInt::from(m).pow(v)).collect())
        .collect();

    let mut layers = vec![vec![BigInt::zero(); n + 1]; a + 1];
    layers[0][0] = BigInt::one();
    // lowest index at which layer j can be nonzero
    let mut low: Vec<usize> = vec![usize::MAX; a + 1];
    low[0] = 0;
    for s in 1..=n {
        for j in (1..=a).rev() {
            let start = low[j - 1];
            if start == usize::MAX || start + s > n {
                continue;
            }
            let pw = &powers[entries[j - 1] as usize];
            let (head, tail) = layers.split_at_mut(j);
            let src = &head[j - 1];
            let dst = &mut tail[0];
            for i in start..=n - s {
                if src[i].is_zero() {
                    continue;
                }
                let mut m = 1;
                while i + m * s <= n {
                    dst[i + m * s] += &src[i] * &pw[m];
                    m += 1;
                }
            }
            low[j] = low[j].min(start + s);
        }
    }
    layers.pop().unwrap_or_default()
}

/// `U_v(q) = Σ_{n>=1} M_v(n) q^n` to the given truncation.
pub fn u_series(vec: &PartVector, truncation: usize) -> QSeries {
    let coeffs = u_coefficients(vec.entries(), truncation);
    QSeries::from_coeffs(coeffs[..=truncation].iter().cloned().map(int).collect())
        .expect("nonempty")
}

/// MacMahon's `U_a`, the series of the all-ones vector of length `a`.
pub fn macmahon_u(a: usize, truncation: usize) -> Result<QSeries> {
    Ok(u_series(&PartVector::ones(a)?, truncation))
}
