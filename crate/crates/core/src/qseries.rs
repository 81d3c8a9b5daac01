//! Exact truncated Laurent series in `q` with exponents on a rational lattice
//! and arbitrary-precision integer coefficients.
//!
//! A [`QSeries`] stores a finite map `exponent -> coefficient` together with a
//! validity horizon: coefficients of `q^e` for all `e <= valid_through` are
//! exact. Finite Laurent polynomials carry the sentinel [`Validity::Exact`]
//! (valid everywhere), which is what makes `q -> q^{-1}` substitution and
//! exact polynomial comparison well-defined.
//!
//! All Pochhammer/binomial primitives live here:
//!
//!   (a;q)_n   = prod_{k=0}^{n-1} (1 - a q^k),
//!   (a;q)_{-n} = 1 / prod_{k=1}^{n} (1 - a q^{-k}),
//!   (a;q)_inf = prod_{k=0}^{inf} (1 - a q^k),
//!   [n, j]_q  = (q)_n / ((q)_j (q)_{n-j}),
//!   [n+m, m]'_q = (q^{n+1})_m / (q)_m   (extended, defined for negative n).
//!
//! Division is restricted to series with unit leading coefficient, which keeps
//! every coefficient in Z. Every denominator in the character formulas is a
//! product of `(1 -(+-) q^e)` factors, so this loses nothing.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rat::{format_rat, rint, Rat};

/// Validity horizon of a series: either exact everywhere (a finite Laurent
/// polynomial) or exact for all exponents `<= UpTo(v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validity {
    UpTo(Rat),
    Exact,
}

impl Validity {
    /// The weaker of two horizons.
    pub fn meet(self, other: Validity) -> Validity {
        match (self, other) {
            (Validity::Exact, v) | (v, Validity::Exact) => v,
            (Validity::UpTo(a), Validity::UpTo(b)) => Validity::UpTo(a.min(b)),
        }
    }

    /// Shift the horizon by `d` (used when multiplying by a monomial).
    pub fn shifted(self, d: Rat) -> Validity {
        match self {
            Validity::Exact => Validity::Exact,
            Validity::UpTo(v) => Validity::UpTo(v + d),
        }
    }

    /// Is the coefficient of `q^e` exact under this horizon?
    pub fn allows(self, e: Rat) -> bool {
        match self {
            Validity::Exact => true,
            Validity::UpTo(v) => e <= v,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Validity::Exact)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QSeriesError {
    #[error("leading coefficient is not a unit (+1 or -1)")]
    LeadingCoefficientNotUnit,
    #[error("negative Pochhammer index hits an identically zero factor (a = q^{0})")]
    PoleInNegativePochhammer(i64),
    #[error("infinite product does not converge termwise: base exponent {0} <= 0")]
    NonconvergentProduct(Rat),
    #[error("extended q-binomial requires m >= 0, got {0}")]
    NegativeM(i64),
    #[error("q -> 1/q substitution requires a finite Laurent polynomial")]
    NotAPolynomial,
    #[error("coefficient of q^{requested} requested beyond validity horizon {valid_through}")]
    BeyondValidity { requested: Rat, valid_through: Rat },
    #[error("operation undefined on the zero series")]
    ZeroSeries,
    #[error("not divisible: exact division left a remainder")]
    NotDivisible,
}

/// A signed q-monomial `(+-) q^e`, the base of a Pochhammer symbol.
///
/// Houses specialized bases such as `a = q^{b-s}` and `rho_2 = -q^{(b-s+1)/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignedMonomial {
    pub sign: i8,
    pub exponent: Rat,
}

impl SignedMonomial {
    pub fn plus(exponent: Rat) -> Self {
        SignedMonomial { sign: 1, exponent }
    }

    pub fn minus(exponent: Rat) -> Self {
        SignedMonomial { sign: -1, exponent }
    }

    /// The base shifted by `q^d`.
    pub fn shift(self, d: Rat) -> Self {
        SignedMonomial { sign: self.sign, exponent: self.exponent + d }
    }
}

/// Truncated Laurent series in `q`: finite exponent->coefficient map plus a
/// validity horizon. Exponents are exact rationals, coefficients exact big
/// integers; no stored coefficient is zero and no stored exponent exceeds the
/// horizon.
///
/// Values are immutable after construction and freely shareable across
/// threads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    terms: BTreeMap<Rat, BigInt>,
    validity: Validity,
}

impl QSeries {
    /// The zero series at the given horizon (empty term map).
    pub fn zero(validity: Validity) -> Self {
        QSeries { terms: BTreeMap::new(), validity }
    }

    /// The zero polynomial (exact everywhere).
    pub fn zero_poly() -> Self {
        Self::zero(Validity::Exact)
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        Self::monomial(BigInt::one(), rint(0))
    }

    /// The exact monomial `c * q^e`.
    pub fn monomial(c: BigInt, e: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        QSeries { terms, validity: Validity::Exact }
    }

    /// `q^e` as an exact monomial.
    pub fn qpow(e: Rat) -> Self {
        Self::monomial(BigInt::one(), e)
    }

    /// Build from `(exponent, coefficient)` pairs; zero coefficients are
    /// dropped and terms beyond the horizon are truncated away.
    pub fn from_terms<I>(pairs: I, validity: Validity) -> Self
    where
        I: IntoIterator<Item = (Rat, BigInt)>,
    {
        let mut terms = BTreeMap::new();
        for (e, c) in pairs {
            if c.is_zero() || !validity.allows(e) {
                continue;
            }
            let entry = terms.entry(e).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(&e);
            }
        }
        QSeries { terms, validity }
    }

    pub fn validity(&self) -> Validity {
        self.validity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest exponent carrying a nonzero coefficient, if any.
    pub fn ord(&self) -> Option<Rat> {
        self.terms.keys().next().copied()
    }

    /// Highest stored exponent.
    pub fn max_exp(&self) -> Option<Rat> {
        self.terms.keys().next_back().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Rat, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of `q^e`. Strict: requesting a coefficient beyond the
    /// validity horizon is an error, not a silent zero.
    pub fn coeff(&self, e: Rat) -> Result<BigInt, QSeriesError> {
        match self.validity {
            Validity::Exact => {}
            Validity::UpTo(v) => {
                if e > v {
                    return Err(QSeriesError::BeyondValidity { requested: e, valid_through: v });
                }
            }
        }
        Ok(self.terms.get(&e).cloned().unwrap_or_else(BigInt::zero))
    }

    /// Minimal exponent-lattice denominator of the stored terms (1 for the
    /// zero series). Computed on demand; arithmetic works directly on reduced
    /// rational exponents, which is the common-refinement lattice.
    pub fn den(&self) -> i64 {
        self.terms
            .keys()
            .fold(1i64, |acc, e| num_integer::lcm(acc, *e.denom()))
    }

    /// Restrict the horizon (drops any term beyond it). The horizon can only
    /// get weaker; `truncate` never claims precision it does not have.
    pub fn truncate(&self, validity: Validity) -> QSeries {
        let v = self.validity.meet(validity);
        QSeries {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| v.allows(**e))
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
            validity: v,
        }
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
            validity: self.validity,
        }
    }

    /// Multiply by the monomial `c * q^d`.
    pub fn mul_monomial(&self, c: &BigInt, d: Rat) -> QSeries {
        if c.is_zero() {
            return QSeries::zero_poly();
        }
        QSeries {
            terms: self.terms.iter().map(|(e, k)| (*e + d, k * c)).collect(),
            validity: self.validity.shifted(d),
        }
    }

    /// Multiply every coefficient by the integer `c`.
    pub fn scale(&self, c: i64) -> QSeries {
        self.mul_monomial(&BigInt::from(c), rint(0))
    }

    /// Divide every coefficient exactly by the integer `c`.
    pub fn div_exact(&self, c: i64) -> Result<QSeries, QSeriesError> {
        if c == 0 {
            return Err(QSeriesError::ZeroSeries);
        }
        let c = BigInt::from(c);
        let mut terms = BTreeMap::new();
        for (e, k) in &self.terms {
            let (quot, rem) = num_integer::Integer::div_rem(k, &c);
            if !rem.is_zero() {
                return Err(QSeriesError::NotDivisible);
            }
            terms.insert(*e, quot);
        }
        Ok(QSeries { terms, validity: self.validity })
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.combine(other, true)
    }

    fn combine(&self, other: &QSeries, negate: bool) -> QSeries {
        let validity = self.validity.meet(other.validity);
        let mut terms: BTreeMap<Rat, BigInt> = self
            .terms
            .iter()
            .filter(|(e, _)| validity.allows(**e))
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        for (e, c) in &other.terms {
            if !validity.allows(*e) {
                continue;
            }
            let entry = terms.entry(*e).or_insert_with(BigInt::zero);
            if negate {
                *entry -= c;
            } else {
                *entry += c;
            }
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        QSeries { terms, validity }
    }

    /// Exact product. The horizon follows the conservative rule
    /// `min(V_f + ord(g), V_g + ord(f))`; a zero operand contributes `ord = 0`.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        if self.is_zero() && self.validity.is_exact() {
            return QSeries::zero_poly();
        }
        if other.is_zero() && other.validity.is_exact() {
            return QSeries::zero_poly();
        }
        let ord_self = self.ord().unwrap_or_else(|| rint(0));
        let ord_other = other.ord().unwrap_or_else(|| rint(0));
        let validity = self
            .validity
            .shifted(ord_other)
            .meet(other.validity.shifted(ord_self));
        let mut terms: BTreeMap<Rat, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = *e1 + *e2;
                if !validity.allows(e) {
                    continue;
                }
                let entry = terms.entry(e).or_insert_with(BigInt::zero);
                *entry += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        QSeries { terms, validity }
    }

    /// Multiplicative inverse. Requires the lowest coefficient to be +1 or
    /// -1, which keeps all coefficients integral. The result carries enough
    /// terms that `f * reciprocal(f)` is certified equal to 1 through
    /// `q^order` under the conservative product-horizon rule.
    pub fn reciprocal(&self, order: Rat) -> Result<QSeries, QSeriesError> {
        let m = self.ord().ok_or(QSeriesError::ZeroSeries)?;
        let lead = &self.terms[&m];
        if !lead.magnitude().is_one() {
            return Err(QSeriesError::LeadingCoefficientNotUnit);
        }
        let target = if m < rint(0) { order - m } else { order };
        // r_s is determined by f through q^{s+m}; honor the input horizon.
        let validity = Validity::UpTo(target).meet(self.validity.shifted(-m));
        let horizon = match validity {
            Validity::UpTo(v) => v,
            Validity::Exact => unreachable!("reciprocal horizon is always finite"),
        };
        // Solve f * r = 1 coefficient by coefficient in ascending exponent:
        //   f_m r_s = delta_{s+m,0} - sum_{a>m} f_a r_{s+m-a}.
        let mut r: BTreeMap<Rat, BigInt> = BTreeMap::new();
        let mut pending: BTreeMap<Rat, BigInt> = BTreeMap::new();
        pending.insert(rint(0), BigInt::one());
        // Exponents of r live on the lattice generated by -m and the gaps of f;
        // walk the pending convolution targets in order.
        while let Some((&t, _)) = pending.iter().next() {
            let rhs = pending.remove(&t).unwrap();
            let s = t - m;
            if s > horizon {
                continue;
            }
            if rhs.is_zero() {
                continue;
            }
            let coeff = if lead.is_one() { rhs.clone() } else { -rhs.clone() };
            // Propagate -f_a * r_s into future targets t' = s + a for a > m.
            for (a, fa) in self.terms.iter().skip(1) {
                let entry = pending.entry(s + *a).or_insert_with(BigInt::zero);
                *entry -= fa * &coeff;
            }
            r.insert(s, coeff);
        }
        r.retain(|_, c| !c.is_zero());
        Ok(QSeries { terms: r, validity })
    }

    /// Substitute `q -> q^{-1}`. Only defined on finite Laurent polynomials.
    pub fn invert_q(&self) -> Result<QSeries, QSeriesError> {
        if !self.validity.is_exact() {
            return Err(QSeriesError::NotAPolynomial);
        }
        Ok(QSeries {
            terms: self.terms.iter().map(|(e, c)| (-*e, c.clone())).collect(),
            validity: Validity::Exact,
        })
    }

    /// Sum of all coefficients (the value at q = 1); polynomials only.
    pub fn eval_at_one(&self) -> Result<BigInt, QSeriesError> {
        if !self.validity.is_exact() {
            return Err(QSeriesError::NotAPolynomial);
        }
        Ok(self.terms.values().sum())
    }

    /// First exponent `<= horizon` where the two series differ, with both
    /// coefficients. `None` means they agree everywhere below the horizon.
    pub fn first_difference(&self, other: &QSeries, horizon: Rat) -> Option<(Rat, BigInt, BigInt)> {
        let mut exps: Vec<Rat> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .copied()
            .filter(|e| *e <= horizon)
            .collect();
        exps.sort();
        exps.dedup();
        for e in exps {
            let a = self.terms.get(&e).cloned().unwrap_or_else(BigInt::zero);
            let b = other.terms.get(&e).cloned().unwrap_or_else(BigInt::zero);
            if a != b {
                return Some((e, a, b));
            }
        }
        None
    }

    /// Do the two series agree on every exponent `<= horizon`? Errors if
    /// either horizon is too weak to decide.
    pub fn agrees_through(&self, other: &QSeries, horizon: Rat) -> Result<bool, QSeriesError> {
        for s in [self, other] {
            if let Validity::UpTo(v) = s.validity {
                if v < horizon {
                    return Err(QSeriesError::BeyondValidity { requested: horizon, valid_through: v });
                }
            }
        }
        Ok(self.first_difference(other, horizon).is_none())
    }

    /// Exact JSON form:
    /// `{"den": D, "valid_through": "a/b" | "inf", "terms": [["num","coeff"],..]}`
    /// with exponents rendered as numerators over the lattice denominator `D`
    /// and coefficients as decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        let den = self.den();
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let num = e.numer() * (den / e.denom());
                serde_json::json!([num.to_string(), c.to_string()])
            })
            .collect();
        let vt = match self.validity {
            Validity::Exact => "inf".to_string(),
            Validity::UpTo(v) => format_rat(v),
        };
        serde_json::json!({ "den": den, "valid_through": vt, "terms": terms })
    }
}

impl fmt::Display for QSeries {
    /// Terms in ascending exponent, format `c*q^(a/b)` with `b` omitted when 1,
    /// e.g. `1 + q^(1/2) - 2*q^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.magnitude();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let qpart = if e.is_zero() {
                None
            } else if *e == rint(1) {
                Some("q".to_string())
            } else if *e.denom() == 1 && *e.numer() > 0 {
                Some(format!("q^{}", e.numer()))
            } else {
                Some(format!("q^({})", format_rat(*e)))
            };
            match qpart {
                None => write!(f, "{mag}")?,
                Some(qp) if mag.is_one() => write!(f, "{qp}")?,
                Some(qp) => write!(f, "{mag}*{qp}")?,
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        QSeries::add(self, rhs)
    }
}

impl std::ops::Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        QSeries::sub(self, rhs)
    }
}

impl std::ops::Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        QSeries::mul(self, rhs)
    }
}

/// Exact division of a Laurent polynomial by `(1 - sign*q^{e0})`, `e0 > 0`.
/// Errors with [`QSeriesError::NotDivisible`] when a remainder is left.
fn div_exact_factor(f: &QSeries, sign: i8, e0: Rat) -> Result<QSeries, QSeriesError> {
    debug_assert!(e0 > rint(0));
    if f.is_zero() {
        return Ok(QSeries::zero_poly());
    }
    let top = f.max_exp().unwrap();
    let mut rem: BTreeMap<Rat, BigInt> = f.terms.clone();
    let mut quot: BTreeMap<Rat, BigInt> = BTreeMap::new();
    while let Some((&e, _)) = rem.iter().next() {
        if e > top {
            return Err(QSeriesError::NotDivisible);
        }
        let c = rem.remove(&e).unwrap();
        if c.is_zero() {
            continue;
        }
        // Quotient term c*q^e contributes c*q^e - sign*c*q^{e+e0} to the product.
        let carry = rem.entry(e + e0).or_insert_with(BigInt::zero);
        if sign > 0 {
            *carry += &c;
        } else {
            *carry -= &c;
        }
        if carry.is_zero() {
            rem.remove(&(e + e0));
        }
        quot.insert(e, c);
    }
    Ok(QSeries { terms: quot, validity: Validity::Exact })
}

/// One factor `(1 - sign*q^e)` as an exact polynomial.
fn factor(sign: i8, e: Rat) -> QSeries {
    let one = QSeries::one();
    let mono = QSeries::monomial(BigInt::from(sign as i64), e);
    one.sub(&mono)
}

/// Finite q-Pochhammer symbol `(a;q)_n` for a signed monomial base.
///
/// For `n >= 0` the result is the exact finite product. For `n < 0` it is the
/// reciprocal of `prod_{k=1}^{-n}(1 - a q^{-k})`, truncated at `order`; a
/// factor that is identically zero (base `a = q^k` hit by the shift) is a
/// pole and is reported as an error so that callers implementing the
/// summation convention `1/(q)_{m<0} = 0` can substitute zero.
pub fn pochhammer(a: &SignedMonomial, n: i64, order: Rat) -> Result<QSeries, QSeriesError> {
    if n >= 0 {
        let mut acc = QSeries::one();
        for k in 0..n {
            acc = acc.mul(&factor(a.sign, a.exponent + rint(k)));
        }
        Ok(acc)
    } else {
        let mut acc = QSeries::one();
        for k in 1..=(-n) {
            let e = a.exponent - rint(k);
            if a.sign > 0 && e.is_zero() {
                return Err(QSeriesError::PoleInNegativePochhammer(k));
            }
            acc = acc.mul(&factor(a.sign, e));
        }
        acc.reciprocal(order)
    }
}

/// Infinite q-Pochhammer symbol `(a;q)_inf` truncated at `order`. Requires a
/// strictly positive base exponent so the product converges term by term.
pub fn pochhammer_infinite(a: &SignedMonomial, order: Rat) -> Result<QSeries, QSeriesError> {
    if a.exponent <= rint(0) {
        return Err(QSeriesError::NonconvergentProduct(a.exponent));
    }
    let mut acc = QSeries::one().truncate(Validity::UpTo(order));
    let mut k = 0i64;
    // Factors with base exponent beyond the horizon are 1 + O(q^{>order}).
    while a.exponent + rint(k) <= order {
        acc = acc.mul(&factor(a.sign, a.exponent + rint(k)));
        k += 1;
    }
    Ok(acc.truncate(Validity::UpTo(order)))
}

/// Gaussian binomial coefficient `[n, j]_q`: the polynomial
/// `(q)_n / ((q)_j (q)_{n-j})` for `0 <= j <= n`, the zero polynomial
/// otherwise.
pub fn qbinomial(n: i64, j: i64) -> QSeries {
    if j < 0 || j > n {
        return QSeries::zero_poly();
    }
    let j = j.min(n - j);
    // [n, j] = prod_{i=1}^{j} (1 - q^{n-j+i}) / (1 - q^i), exact division.
    let mut acc = QSeries::one();
    for i in 1..=j {
        acc = acc.mul(&factor(1, rint(n - j + i)));
    }
    for i in 1..=j {
        acc = div_exact_factor(&acc, 1, rint(i))
            .expect("Gaussian binomial numerator is divisible by (q)_j");
    }
    acc
}

/// Extended q-binomial `[n+m, m]'_q = (q^{n+1})_m / (q)_m`, defined for
/// negative `n` as well; the result is an exact finite Laurent polynomial
/// (with negative exponents when `n < -m`).
pub fn qbinomial_ext(n: i64, m: i64) -> Result<QSeries, QSeriesError> {
    if m < 0 {
        return Err(QSeriesError::NegativeM(m));
    }
    // (q^{n+1})_m contains (1 - q^0) = 0 iff n+k = 0 for some 1 <= k <= m.
    if n < 0 && n + m >= 0 {
        return Ok(QSeries::zero_poly());
    }
    let mut acc = QSeries::one();
    for k in 1..=m {
        acc = acc.mul(&factor(1, rint(n + k)));
    }
    for i in 1..=m {
        acc = div_exact_factor(&acc, 1, rint(i))
            .expect("(q^{n+1})_m is divisible by (q)_m");
    }
    Ok(acc)
}

/// Classical extended binomial with top `t` and bottom `m`:
/// `[t, m]' = qbinomial_ext(t - m, m)`.
pub fn qbinomial_ext_top(t: i64, m: i64) -> Result<QSeries, QSeriesError> {
    qbinomial_ext(t - m, m)
}
