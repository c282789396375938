//! Multi-index sets `A_{m,n,p} = {α ∈ ℕ₀^m : ‖α‖_p ≤ n}` and their counting theory.
//!
//! Sets are stored flat (stride `m`) in ascending co-lexicographic order: the
//! first coordinate varies fastest, the last coordinate is most significant.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Relative slack used when comparing floating power sums against `n^p`, so
/// that exact boundary points are kept despite rounding.
const TIE_TOLERANCE: f64 = 1e-12;

/// The exponent `p ∈ [0, ∞]` of the ℓᵖ degree.
///
/// `p = 0` denotes the additively separable set (see [`build_index_set`]),
/// not the ℓ⁰ pseudo-norm ball.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PNorm(f64);

impl PNorm {
    pub const ZERO: PNorm = PNorm(0.0);
    pub const ONE: PNorm = PNorm(1.0);
    pub const TWO: PNorm = PNorm(2.0);
    pub const INFINITY: PNorm = PNorm(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "p must lie in [0, inf], got {value}"
            )));
        }
        Ok(PNorm(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// True for `p ∈ (0, ∞)`.
    pub fn is_finite_positive(self) -> bool {
        self.0 > 0.0 && self.0.is_finite()
    }

    /// `Some(k)` if `p` is a positive integer small enough for exact power sums.
    pub fn as_integer(self) -> Option<u32> {
        if self.is_finite_positive() && self.0.fract() == 0.0 && self.0 <= 16.0 {
            Some(self.0 as u32)
        } else {
            None
        }
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for PNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(PNorm::INFINITY),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("invalid p value `{s}`")))
                .and_then(PNorm::new),
        }
    }
}

/// Co-lexicographic comparison: the last coordinate is most significant.
pub fn colex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    debug_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// An ordered downward closed multi-index set.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiIndexSet {
    m: usize,
    n: u32,
    p: Option<PNorm>,
    data: Vec<u32>,
}

impl MultiIndexSet {
    /// Builds a general downward closed set from arbitrary indices.
    ///
    /// The indices are sorted co-lexicographically; duplicates and sets that
    /// are not downward closed are rejected. The resulting set carries no `p`.
    pub fn from_indices(m: usize, indices: &[Vec<u32>]) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("dimension m must be >= 1".into()));
        }
        let mut rows: Vec<&[u32]> = Vec::with_capacity(indices.len());
        for idx in indices {
            if idx.len() != m {
                return Err(Error::LengthMismatch {
                    expected: m,
                    actual: idx.len(),
                });
            }
            rows.push(idx);
        }
        rows.sort_by(|a, b| colex_cmp(a, b));
        if rows.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate multi-index".into()));
        }
        let n = rows.iter().flat_map(|r| r.iter()).copied().max().unwrap_or(0);
        let set = MultiIndexSet {
            m,
            n,
            p: None,
            data: rows.concat(),
        };
        if let Some(bad) = set.first_closure_violation() {
            return Err(Error::InvalidArgument(format!(
                "set is not downward closed at {bad:?}"
            )));
        }
        Ok(set)
    }

    pub(crate) fn from_flat_unchecked(m: usize, n: u32, p: Option<PNorm>, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len() % m, 0);
        MultiIndexSet { m, n, p, data }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The degree bound `n` (the largest coordinate for general sets).
    pub fn n(&self) -> u32 {
        self.n
    }

    /// The exponent the set was built with; `None` for general sets.
    pub fn p(&self) -> Option<PNorm> {
        self.p
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.m
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> &[u32] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.data.chunks_exact(self.m)
    }

    /// The flat, stride-`m` storage.
    pub fn as_flat(&self) -> &[u32] {
        &self.data
    }

    /// Largest coordinate value occurring in the set.
    pub fn max_degree(&self) -> u32 {
        self.data.iter().copied().max().unwrap_or(0)
    }

    /// Co-lex position of `alpha`, found by binary search.
    pub fn position(&self, alpha: &[u32]) -> Option<usize> {
        if alpha.len() != self.m {
            return None;
        }
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match colex_cmp(self.get(mid), alpha) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn contains(&self, alpha: &[u32]) -> bool {
        self.position(alpha).is_some()
    }

    /// Returns an element `α` with some `α - eᵢ` missing, if any.
    pub fn first_closure_violation(&self) -> Option<Vec<u32>> {
        let mut probe = vec![0u32; self.m];
        for alpha in self.iter() {
            for i in 0..self.m {
                if alpha[i] > 0 {
                    probe.copy_from_slice(alpha);
                    probe[i] -= 1;
                    if !self.contains(&probe) {
                        return Some(alpha.to_vec());
                    }
                }
            }
        }
        None
    }

    /// True if the stored order is strictly increasing co-lex.
    pub fn is_strictly_colex(&self) -> bool {
        self.data
            .chunks_exact(self.m)
            .zip(self.data.chunks_exact(self.m).skip(1))
            .all(|(a, b)| colex_cmp(a, b) == Ordering::Less)
    }
}

/// Remaining ℓᵖ budget while descending through the coordinates.
#[derive(Clone, Copy)]
enum Budget {
    /// `p = ∞`: every coordinate independently bounded by `n`.
    Box,
    /// `p = 0`: at most one nonzero coordinate.
    Separable { used: bool },
    /// Integer `p`: exact remaining `n^p - Σ αᵢ^p`.
    Exact { remaining: u128, p: u32 },
    /// Other finite `p`.
    Float { remaining: f64, p: f64, slack: f64 },
}

impl Budget {
    fn new(n: u32, p: PNorm) -> Self {
        if p.is_infinite() {
            Budget::Box
        } else if p.is_zero() {
            Budget::Separable { used: false }
        } else if let Some(k) = p.as_integer() {
            Budget::Exact {
                remaining: (n as u128).pow(k),
                p: k,
            }
        } else {
            let total = (n as f64).powf(p.value());
            Budget::Float {
                remaining: total,
                p: p.value(),
                slack: TIE_TOLERANCE * total.max(1.0),
            }
        }
    }

    /// Spends `v` on one coordinate; `None` once the budget is exceeded.
    /// Monotone: if `take(v)` fails, so does `take(v + 1)`.
    fn take(self, v: u32) -> Option<Budget> {
        if v == 0 {
            return Some(self);
        }
        match self {
            Budget::Box => Some(self),
            Budget::Separable { used } => (!used).then_some(Budget::Separable { used: true }),
            Budget::Exact { remaining, p } => {
                let cost = (v as u128).pow(p);
                (cost <= remaining).then(|| Budget::Exact {
                    remaining: remaining - cost,
                    p,
                })
            }
            Budget::Float { remaining, p, slack } => {
                let cost = (v as f64).powf(p);
                (cost <= remaining + slack).then_some(Budget::Float {
                    remaining: remaining - cost,
                    p,
                    slack,
                })
            }
        }
    }
}

fn validate_shape(m: usize, n: i64) -> Result<u32> {
    if m == 0 {
        return Err(Error::InvalidArgument("dimension m must be >= 1".into()));
    }
    if n < 0 {
        return Err(Error::InvalidArgument(format!("degree n must be >= 0, got {n}")));
    }
    u32::try_from(n).map_err(|_| Error::InvalidArgument(format!("degree n = {n} is too large")))
}

/// Visits `A_{m,n,p}` in ascending co-lex order without materializing the box.
fn visit<F: FnMut(&[u32])>(m: usize, n: u32, p: PNorm, mut f: F) {
    fn descend<F: FnMut(&[u32])>(d: usize, n: u32, budget: Budget, alpha: &mut [u32], f: &mut F) {
        for v in 0..=n {
            let Some(rest) = budget.take(v) else { break };
            alpha[d] = v;
            if d == 0 {
                f(alpha);
            } else {
                descend(d - 1, n, rest, alpha, f);
            }
        }
        alpha[d] = 0;
    }
    let mut alpha = vec![0u32; m];
    descend(m - 1, n, Budget::new(n, p), &mut alpha, &mut f);
}

/// Builds `A_{m,n,p}` in strict co-lex order.
///
/// Membership is `Σ αᵢ^p ≤ n^p` for finite `p > 0` (exact integer arithmetic
/// for integer `p`), `max αᵢ ≤ n` for `p = ∞`, and `{0} ∪ {k·eᵢ : k ≤ n}`
/// for `p = 0`, so that `|A_{m,n,0}| = m·n + 1`.
pub fn build_index_set(m: usize, n: i64, p: PNorm) -> Result<MultiIndexSet> {
    let n = validate_shape(m, n)?;
    let mut data = Vec::new();
    visit(m, n, p, |alpha| data.extend_from_slice(alpha));
    Ok(MultiIndexSet::from_flat_unchecked(m, n, Some(p), data))
}

/// `|A_{m,n,p}|` by enumeration, without storing the set.
pub fn count_index_set(m: usize, n: i64, p: PNorm) -> Result<u64> {
    let n = validate_shape(m, n)?;
    let mut count = 0u64;
    visit(m, n, p, |_| count += 1);
    Ok(count)
}

/// A count that may have saturated at `2^63`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cardinality {
    pub value: u64,
    pub saturated: bool,
}

impl Cardinality {
    const LIMIT: u128 = 1 << 63;

    fn from_wide(v: Option<u128>) -> Self {
        match v {
            Some(v) if v < Self::LIMIT => Cardinality {
                value: v as u64,
                saturated: false,
            },
            _ => Cardinality {
                value: Self::LIMIT as u64,
                saturated: true,
            },
        }
    }
}

/// `C(n, k)` in 128-bit arithmetic; `None` on overflow.
pub(crate) fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = acc.checked_mul(n as u128 - i)? / (i + 1);
    }
    Some(acc)
}

/// Closed-form cardinalities for `p ∈ {0, 1, ∞}`.
pub fn cardinality_closed_form(m: usize, n: i64, p: PNorm) -> Result<Cardinality> {
    let n = validate_shape(m, n)? as u64;
    let m64 = m as u64;
    let wide = if p.is_infinite() {
        u32::try_from(m)
            .ok()
            .and_then(|e| (n as u128 + 1).checked_pow(e))
    } else if p.is_zero() {
        Some(m64 as u128 * n as u128 + 1)
    } else if p.value() == 1.0 {
        binomial(n + m64, n)
    } else {
        return Err(Error::UnsupportedP(p.value()));
    };
    Ok(Cardinality::from_wide(wide))
}

/// Volume of the radius-`r` ℓᵖ ball restricted to the positive orthant,
/// `r^m Γ(1+1/p)^m / Γ(1+m/p)`, evaluated through log-gamma.
pub fn orthant_ball_volume(m: usize, r: f64, p: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("dimension m must be >= 1".into()));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    if !p.is_finite() || p <= 0.0 {
        return Err(Error::Domain(format!("p must lie in (0, inf), got {p}")));
    }
    let mf = m as f64;
    let log_vol = mf * r.ln() + mf * libm::lgamma(1.0 + 1.0 / p) - libm::lgamma(1.0 + mf / p);
    Ok(log_vol.exp())
}

/// Quantitative summary of `A_{m,n,p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CardinalityBounds {
    pub cardinality: u64,
    /// Orthant ball volume at radius `n`; present for `p ∈ (0, ∞)` and `n ≥ 1`.
    pub lower: Option<f64>,
    /// Orthant ball volume at radius `n + m^{1/p}`; present for `p ∈ [1, ∞)`.
    pub upper: Option<f64>,
    /// The closed-form allocation bound `U(m,n,p)`; present for `p ∈ [0, 2]`.
    pub memory_bound: Option<f64>,
    pub density: f64,
    pub carry_count: f64,
}

/// The allocation bound `U(m,n,p)` for `p ∈ [0, 2]`.
pub fn memory_bound(m: usize, n: i64, p: PNorm) -> Result<f64> {
    let n = validate_shape(m, n)? as f64;
    let (mf, pv) = (m as f64, p.value());
    if (0.0..=1.0).contains(&pv) {
        let total_degree = libm::lgamma(mf + n + 1.0) - libm::lgamma(mf + 1.0) - libm::lgamma(n + 1.0);
        Ok(pv * total_degree.exp() + (1.0 - pv) * (1.0 + mf * n))
    } else if pv > 1.0 && pv <= 2.0 {
        let radius = n + mf.powf(1.0 / pv);
        let per_dim = radius.ln() + (pv * std::f64::consts::E / mf).ln() / pv + libm::lgamma(1.0 + 1.0 / pv);
        let log_u = mf * per_dim + 0.5 * (pv / (2.0 * std::f64::consts::PI * mf)).ln();
        Ok(log_u.exp())
    } else {
        Err(Error::UnsupportedP(pv))
    }
}

pub fn cardinality_bounds(m: usize, n: i64, p: PNorm) -> Result<CardinalityBounds> {
    let cardinality = count_index_set(m, n, p)?;
    let nf = n as f64;
    let lower = if p.is_finite_positive() && n > 0 {
        Some(orthant_ball_volume(m, nf, p.value())?)
    } else {
        None
    };
    let upper = if p.is_finite_positive() && p.value() >= 1.0 {
        let radius = nf + (m as f64).powf(1.0 / p.value());
        Some(orthant_ball_volume(m, radius, p.value())?)
    } else {
        None
    };
    let memory_bound = memory_bound(m, n, p).ok();
    Ok(CardinalityBounds {
        cardinality,
        lower,
        upper,
        memory_bound,
        density: density_of(cardinality, m, n),
        carry_count: carry_count(m, n, p)?,
    })
}

fn density_of(cardinality: u64, m: usize, n: i64) -> f64 {
    let box_size = ((n + 1) as f64).powi(m as i32);
    if box_size < 2f64.powi(53) {
        // Both operands are exact, so the quotient is correctly rounded.
        cardinality as f64 / box_size
    } else {
        // In logs to stay finite for large m.
        ((cardinality as f64).ln() - m as f64 * ((n + 1) as f64).ln()).exp()
    }
}

/// `ρ_{m,n,p} = |A_{m,n,p}| / (n+1)^m`.
pub fn density(m: usize, n: i64, p: PNorm) -> Result<f64> {
    let cardinality = count_index_set(m, n, p)?;
    Ok(density_of(cardinality, m, n))
}

/// `κ_{m,n,p} = (Σ_{k=1}^{m} |A_{k,n,p}|) / |A_{m,n,p}|`.
pub fn carry_count(m: usize, n: i64, p: PNorm) -> Result<f64> {
    let top = count_index_set(m, n, p)?;
    let mut total = 0u64;
    for k in 1..=m {
        total += count_index_set(k, n, p)?;
    }
    Ok(total as f64 / top as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(m: usize, n: u32, keep: impl Fn(&[u32]) -> bool) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let total = (n as usize + 1).pow(m as u32);
        for code in 0..total {
            let mut c = code;
            let alpha: Vec<u32> = (0..m)
                .map(|_| {
                    let v = (c % (n as usize + 1)) as u32;
                    c /= n as usize + 1;
                    v
                })
                .collect();
            if keep(&alpha) {
                out.push(alpha);
            }
        }
        out
    }

    #[test]
    fn total_degree_example_set() {
        let set = build_index_set(3, 2, PNorm::ONE).unwrap();
        let expected: Vec<Vec<u32>> = vec![
            vec![0, 0, 0],
            vec![1, 0, 0],
            vec![2, 0, 0],
            vec![0, 1, 0],
            vec![1, 1, 0],
            vec![0, 2, 0],
            vec![0, 0, 1],
            vec![1, 0, 1],
            vec![0, 1, 1],
            vec![0, 0, 2],
        ];
        let got: Vec<Vec<u32>> = set.iter().map(|a| a.to_vec()).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn univariate_sets_coincide() {
        for p in [0.5, 1.0, 2.0, 3.7, f64::INFINITY] {
            let set = build_index_set(1, 4, PNorm::new(p).unwrap()).unwrap();
            let got: Vec<u32> = set.iter().map(|a| a[0]).collect();
            assert_eq!(got, vec![0, 1, 2, 3, 4], "p = {p}");
        }
    }

    #[test]
    fn half_norm_matches_brute_force() {
        // (Σ √αᵢ)² ≤ 2, evaluated on the full box before trusting the budgeted walk.
        let mut oracle = brute_force(3, 2, |a| {
            let s: f64 = a.iter().map(|&v| (v as f64).sqrt()).sum();
            s * s <= 2.0 + 1e-12
        });
        oracle.sort_by(|a, b| colex_cmp(a, b));
        assert_eq!(oracle.len(), 7);
        let set = build_index_set(3, 2, PNorm::new(0.5).unwrap()).unwrap();
        let got: Vec<Vec<u32>> = set.iter().map(|a| a.to_vec()).collect();
        assert_eq!(got, oracle);
    }

    #[test]
    fn separable_set_has_one_nonzero() {
        let set = build_index_set(3, 2, PNorm::ZERO).unwrap();
        assert_eq!(set.len(), 7);
        assert!(set.iter().all(|a| a.iter().filter(|&&v| v > 0).count() <= 1));
    }

    #[test]
    fn rejects_bad_shape() {
        assert!(build_index_set(0, 2, PNorm::ONE).is_err());
        assert!(build_index_set(2, -1, PNorm::ONE).is_err());
        assert!("-1".parse::<PNorm>().is_err());
        assert!("nan".parse::<PNorm>().is_err());
        assert_eq!("inf".parse::<PNorm>().unwrap(), PNorm::INFINITY);
    }

    #[test]
    fn closed_forms() {
        assert_eq!(cardinality_closed_form(3, 2, PNorm::ONE).unwrap().value, 10);
        assert_eq!(cardinality_closed_form(2, 2, PNorm::INFINITY).unwrap().value, 9);
        assert_eq!(cardinality_closed_form(2, 3, PNorm::ZERO).unwrap().value, 7);
        assert!(matches!(
            cardinality_closed_form(2, 3, PNorm::TWO),
            Err(Error::UnsupportedP(_))
        ));
        let huge = cardinality_closed_form(64, 10, PNorm::INFINITY).unwrap();
        assert!(huge.saturated);
        let big = cardinality_closed_form(62, 1, PNorm::INFINITY).unwrap();
        assert_eq!(big, Cardinality { value: 1 << 62, saturated: false });
    }

    #[test]
    fn closed_forms_match_enumeration() {
        for m in 1..=5 {
            for n in 0..=6 {
                for p in [PNorm::ZERO, PNorm::ONE, PNorm::INFINITY] {
                    let closed = cardinality_closed_form(m, n, p).unwrap().value;
                    assert_eq!(closed, count_index_set(m, n, p).unwrap(), "({m},{n},{p})");
                }
            }
        }
    }

    #[test]
    fn ball_volumes() {
        assert!((orthant_ball_volume(1, 3.5, 1.7).unwrap() - 3.5).abs() < 1e-13);
        assert!((orthant_ball_volume(2, 1.0, 2.0).unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-13);
        assert!((orthant_ball_volume(2, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-14);
        assert!(orthant_ball_volume(2, 0.0, 1.0).is_err());
        assert!(orthant_ball_volume(2, 1.0, 0.0).is_err());
        assert!(orthant_ball_volume(2, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn bounds_examples() {
        let b = cardinality_bounds(1, 4, PNorm::ONE).unwrap();
        assert_eq!(b.cardinality, 5);
        assert!((b.lower.unwrap() - 4.0).abs() < 1e-12);
        assert!((b.upper.unwrap() - 5.0).abs() < 1e-12);

        let b = cardinality_bounds(3, 2, PNorm::ONE).unwrap();
        assert!((b.memory_bound.unwrap() - 10.0).abs() < 1e-9);

        let b = cardinality_bounds(3, 2, PNorm::new(0.5).unwrap()).unwrap();
        assert_eq!(b.cardinality, 7);
        assert!((b.memory_bound.unwrap() - 8.5).abs() < 1e-9);
        assert!(b.upper.is_none());

        assert!(cardinality_bounds(3, 2, PNorm::new(3.0).unwrap())
            .unwrap()
            .memory_bound
            .is_none());
    }

    #[test]
    fn densities_and_carry_counts() {
        assert!((density(4, 3, PNorm::INFINITY).unwrap() - 1.0).abs() < 1e-14);
        assert!((density(3, 2, PNorm::ONE).unwrap() - 10.0 / 27.0).abs() < 1e-14);
        assert!((density(2, 3, PNorm::ZERO).unwrap() - 0.4375).abs() < 1e-14);
        assert!((carry_count(2, 1, PNorm::INFINITY).unwrap() - 1.5).abs() < 1e-14);
        assert!((carry_count(2, 2, PNorm::ONE).unwrap() - 1.5).abs() < 1e-14);
        assert_eq!(carry_count(1, 7, PNorm::TWO).unwrap(), 1.0);
    }

    #[test]
    fn position_lookup() {
        let set = build_index_set(3, 3, PNorm::TWO).unwrap();
        for (i, alpha) in set.iter().enumerate() {
            assert_eq!(set.position(alpha), Some(i));
        }
        assert_eq!(set.position(&[3, 3, 3]), None);
        assert!(set.is_strictly_colex());
        assert!(set.first_closure_violation().is_none());
    }

    #[test]
    fn general_sets_are_validated() {
        let ok = MultiIndexSet::from_indices(2, &[vec![0, 1], vec![0, 0], vec![1, 0]]).unwrap();
        assert_eq!(ok.get(0), &[0, 0]);
        assert_eq!(ok.get(2), &[0, 1]);
        assert!(ok.p().is_none());
        assert!(MultiIndexSet::from_indices(2, &[vec![0, 0], vec![1, 1]]).is_err());
        assert!(MultiIndexSet::from_indices(2, &[vec![0, 0], vec![0, 0]]).is_err());
    }
}
