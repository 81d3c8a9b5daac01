//! Finite Laurent polynomials in `z` whose coefficients are [`QSeries`],
//! used for two-variable characters chi(q, z).
//!
//! The `z`-exponents are integers; fractional overall powers like `z^{-c/6}`
//! never enter here (they ride in the character prefactor). All coefficient
//! series share one q-validity horizon, so comparisons below the horizon are
//! exact. The `z`-range stays finite because every large `z`-power only
//! occurs with q-exponents past the horizon and is pruned.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::qseries::{QSeries, Validity};
use crate::rat::{format_rat, rat, rint, Rat};

/// A monomial `(+-) z^{ze} q^{qe}`, the base of a bivariate Pochhammer symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZMonomial {
    pub sign: i8,
    pub z_exp: i64,
    pub q_exp: Rat,
}

/// Finite Laurent polynomial in `z` with `QSeries` coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZQSeries {
    terms: BTreeMap<i64, QSeries>,
    validity: Validity,
}

impl ZQSeries {
    pub fn zero(validity: Validity) -> Self {
        ZQSeries { terms: BTreeMap::new(), validity }
    }

    pub fn one() -> Self {
        Self::from_scalar(QSeries::one())
    }

    /// Lift a plain q-series to the z^0 coefficient.
    pub fn from_scalar(c: QSeries) -> Self {
        let validity = c.validity();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(0, c);
        }
        ZQSeries { terms, validity }
    }

    /// The exact monomial `(+-) z^{ze} q^{qe}`.
    pub fn monomial(m: &ZMonomial) -> Self {
        let c = QSeries::monomial(BigInt::from(m.sign as i64), m.q_exp);
        let mut terms = BTreeMap::new();
        terms.insert(m.z_exp, c);
        ZQSeries { terms, validity: Validity::Exact }
    }

    /// `1 - sign*z^{ze} q^{qe}` (one Pochhammer factor).
    pub fn one_minus(m: &ZMonomial) -> Self {
        let neg = ZMonomial { sign: -m.sign, ..*m };
        Self::one().add(&Self::monomial(&neg))
    }

    pub fn validity(&self) -> Validity {
        self.validity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Inclusive z-exponent bounds, `None` for the zero polynomial.
    pub fn z_range(&self) -> Option<(i64, i64)> {
        match (self.terms.keys().next(), self.terms.keys().next_back()) {
            (Some(a), Some(b)) => Some((*a, *b)),
            _ => None,
        }
    }

    /// Minimal q-exponent over all z-coefficients.
    pub fn ord_q(&self) -> Option<Rat> {
        self.terms.values().filter_map(|c| c.ord()).min()
    }

    pub fn z_terms(&self) -> impl Iterator<Item = (i64, &QSeries)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    /// Coefficient of `z^k` (zero series if absent).
    pub fn coeff_z(&self, k: i64) -> QSeries {
        self.terms.get(&k).cloned().unwrap_or_else(|| QSeries::zero(self.validity))
    }

    fn normalized(terms: BTreeMap<i64, QSeries>, validity: Validity) -> Self {
        let mut out = BTreeMap::new();
        for (k, c) in terms {
            let c = c.truncate(validity);
            if !c.is_zero() {
                out.insert(k, c);
            }
        }
        ZQSeries { terms: out, validity }
    }

    pub fn truncate(&self, validity: Validity) -> ZQSeries {
        Self::normalized(self.terms.clone(), self.validity.meet(validity))
    }

    pub fn neg(&self) -> ZQSeries {
        ZQSeries {
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(),
            validity: self.validity,
        }
    }

    pub fn add(&self, other: &ZQSeries) -> ZQSeries {
        let validity = self.validity.meet(other.validity);
        let mut terms: BTreeMap<i64, QSeries> = self.terms.clone();
        for (k, c) in &other.terms {
            let sum = match terms.remove(k) {
                Some(e) => e.add(c),
                None => c.clone(),
            };
            terms.insert(*k, sum);
        }
        Self::normalized(terms, validity)
    }

    pub fn sub(&self, other: &ZQSeries) -> ZQSeries {
        self.add(&other.neg())
    }

    /// Exact product with the conservative q-horizon rule
    /// `min(V_f + ord_q(g), V_g + ord_q(f))`.
    pub fn mul(&self, other: &ZQSeries) -> ZQSeries {
        if (self.is_zero() && self.validity.is_exact())
            || (other.is_zero() && other.validity.is_exact())
        {
            return ZQSeries::zero(Validity::Exact);
        }
        let ord_self = self.ord_q().unwrap_or_else(|| rint(0));
        let ord_other = other.ord_q().unwrap_or_else(|| rint(0));
        let validity = self
            .validity
            .shifted(ord_other)
            .meet(other.validity.shifted(ord_self));
        let mut terms: BTreeMap<i64, QSeries> = BTreeMap::new();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let prod = c1.mul(c2).truncate(validity);
                if prod.is_zero() {
                    continue;
                }
                let k = k1 + k2;
                let sum = match terms.remove(&k) {
                    Some(e) => e.add(&prod),
                    None => prod,
                };
                terms.insert(k, sum);
            }
        }
        Self::normalized(terms, validity)
    }

    /// Multiply by a plain q-series (a z-independent scalar).
    pub fn scalar_mul(&self, c: &QSeries) -> ZQSeries {
        self.mul(&ZQSeries::from_scalar(c.clone()))
    }

    /// Substitution `z -> z * q^{halfsteps/2}`: each term `z^k c(q)` becomes
    /// `z^k q^{k*halfsteps/2} c(q)`. The common horizon is adjusted by the
    /// most negative exponent shift over the z-range.
    pub fn shift_z(&self, halfsteps: i64) -> ZQSeries {
        if self.terms.is_empty() {
            return self.clone();
        }
        let shift = |k: i64| rat(k * halfsteps, 2);
        let validity = match self.validity {
            Validity::Exact => Validity::Exact,
            Validity::UpTo(v) => {
                Validity::UpTo(self.terms.keys().map(|k| v + shift(*k)).min().unwrap())
            }
        };
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (*k, c.mul_monomial(&BigInt::one(), shift(*k))))
            .collect();
        Self::normalized(terms, validity)
    }

    /// Substitution `z -> z^{-1}`.
    pub fn swap_z(&self) -> ZQSeries {
        ZQSeries {
            terms: self.terms.iter().map(|(k, c)| (-*k, c.clone())).collect(),
            validity: self.validity,
        }
    }

    /// Specialize `z = 1`: the sum of all z-coefficients.
    pub fn set_z_one(&self) -> QSeries {
        self.terms
            .values()
            .fold(QSeries::zero(self.validity), |acc, c| acc.add(c))
    }

    /// First `(z-exponent, q-exponent)` where the two differ below the given
    /// q-horizon, with both coefficients.
    pub fn first_difference(
        &self,
        other: &ZQSeries,
        horizon: Rat,
    ) -> Option<(i64, Rat, BigInt, BigInt)> {
        let mut zs: Vec<i64> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        zs.sort();
        zs.dedup();
        for k in zs {
            let a = self.coeff_z(k);
            let b = other.coeff_z(k);
            if let Some((e, ca, cb)) = a.first_difference(&b, horizon) {
                return Some((k, e, ca, cb));
            }
        }
        None
    }

    /// JSON rendering: `{"z_terms": [[k, <QSeries JSON>], ...],
    /// "q_valid_through": "a/b"}`.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(k, c)| serde_json::json!([k, c.to_json()]))
            .collect();
        let vt = match self.validity {
            Validity::Exact => "inf".to_string(),
            Validity::UpTo(v) => format_rat(v),
        };
        serde_json::json!({ "z_terms": terms, "q_valid_through": vt })
    }
}

impl fmt::Display for ZQSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "z^{k}:  {c}")?;
        }
        Ok(())
    }
}

/// Bivariate q-Pochhammer symbol `(base; q)_n = prod_{k=0}^{n-1}
/// (1 - base*q^k)` for a signed z-monomial base and `n >= 0`.
pub fn zpochhammer(base: &ZMonomial, n: i64, order: Rat) -> ZQSeries {
    debug_assert!(n >= 0);
    let mut acc = ZQSeries::one();
    for k in 0..n {
        let m = ZMonomial { q_exp: base.q_exp + rint(k), ..*base };
        acc = acc.mul(&ZQSeries::one_minus(&m)).truncate(Validity::UpTo(order));
    }
    acc
}

/// Bivariate infinite Pochhammer `(base; q)_inf` truncated at `order`.
/// Requires the base q-exponent to be strictly positive.
pub fn zpochhammer_infinite(base: &ZMonomial, order: Rat) -> ZQSeries {
    debug_assert!(base.q_exp > rint(0), "infinite product needs a positive base exponent");
    let mut acc = ZQSeries::one().truncate(Validity::UpTo(order));
    let mut k = 0i64;
    while base.q_exp + rint(k) <= order {
        let m = ZMonomial { q_exp: base.q_exp + rint(k), ..*base };
        acc = acc.mul(&ZQSeries::one_minus(&m)).truncate(Validity::UpTo(order));
        k += 1;
    }
    acc
}

/// Geometric expansion of `1 / (1 + sign*z^{ze} q^{qe})` through `q^order`,
/// requiring `qe > 0`:  `sum_{k>=0} (-sign)^k z^{k*ze} q^{k*qe}`.
///
/// Callers with `qe < 0` must flip the factor first:
/// `1/(1 + s*z^a q^e) = s*z^{-a} q^{-e} / (1 + s*z^{-a} q^{-e})`.
pub fn geometric_inverse(m: &ZMonomial, order: Rat) -> ZQSeries {
    assert!(m.q_exp > rint(0), "geometric expansion needs a positive q-exponent");
    let mut terms: BTreeMap<i64, QSeries> = BTreeMap::new();
    let mut k = 0i64;
    while m.q_exp * rint(k) <= order {
        let c: i64 = if m.sign > 0 && k % 2 == 1 { -1 } else { 1 };
        let mono = QSeries::monomial(BigInt::from(c), m.q_exp * rint(k));
        let sum = match terms.remove(&(k * m.z_exp)) {
            Some(e) => e.add(&mono),
            None => mono,
        };
        terms.insert(k * m.z_exp, sum);
        k += 1;
    }
    ZQSeries::normalized(terms, Validity::UpTo(order))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(k: i64) -> ZQSeries {
        ZQSeries::monomial(&ZMonomial { sign: 1, z_exp: k, q_exp: rint(0) })
    }

    fn zq(k: i64, e: Rat) -> ZQSeries {
        ZQSeries::monomial(&ZMonomial { sign: 1, z_exp: k, q_exp: e })
    }

    #[test]
    fn zring_examples() {
        // z * z^{-1} = 1
        assert_eq!(z(1).mul(&z(-1)), ZQSeries::one());
        // (1+z)(1+z^{-1}q) = z^{-1}q + 1 + q + z
        let lhs = ZQSeries::one().add(&z(1)).mul(&ZQSeries::one().add(&zq(-1, rint(1))));
        let rhs = zq(-1, rint(1))
            .add(&ZQSeries::one())
            .add(&zq(0, rint(1)))
            .add(&z(1));
        assert_eq!(lhs, rhs);
        // (z + z^{-1}) + (-z) = z^{-1}
        assert_eq!(z(1).add(&z(-1)).sub(&z(1)), z(-1));
        assert_eq!(z(1).add(&z(-1)).z_range(), Some((-1, 1)));
    }

    #[test]
    fn shift_z_examples() {
        // z*q^{1/2} under halfsteps=-1 -> z
        assert_eq!(zq(1, rat(1, 2)).shift_z(-1), z(1));
        // z^{-1} under halfsteps=-1 -> z^{-1} q^{1/2}
        assert_eq!(z(-1).shift_z(-1), zq(-1, rat(1, 2)));
        // 1 + z under halfsteps=2 -> 1 + z*q
        assert_eq!(ZQSeries::one().add(&z(1)).shift_z(2), ZQSeries::one().add(&zq(1, rint(1))));
    }

    #[test]
    fn shift_z_composes() {
        let f = ZQSeries::one().add(&z(1)).add(&zq(-2, rat(3, 2)));
        for (a, b) in [(1i64, 2i64), (-1, 1), (-3, -2), (2, -2)] {
            assert_eq!(f.shift_z(a).shift_z(b), f.shift_z(a + b));
        }
    }

    #[test]
    fn shift_z_adjusts_horizon() {
        let f = ZQSeries::one().add(&z(2)).truncate(Validity::UpTo(rint(5)));
        let g = f.shift_z(-1);
        // most negative shift over the z-range: z^2 -> q^{-1}
        assert_eq!(g.validity(), Validity::UpTo(rint(4)));
    }

    #[test]
    fn set_z_one_examples() {
        // (1+z)(1+z^{-1}q) at z=1 -> 2(1+q)
        let f = ZQSeries::one().add(&z(1)).mul(&ZQSeries::one().add(&zq(-1, rint(1))));
        let expect = QSeries::from_terms(
            [(rint(0), BigInt::from(2)), (rint(1), BigInt::from(2))],
            Validity::Exact,
        );
        assert_eq!(f.set_z_one(), expect);
        // z - z^{-1} at z=1 -> 0
        assert!(z(1).sub(&z(-1)).set_z_one().is_zero());
    }

    #[test]
    fn set_z_one_after_shift_matches_substitution() {
        // set_z_one(shift_z(f, k)) equals substituting z = q^{k/2} into f.
        let f = ZQSeries::one()
            .add(&z(1))
            .add(&zq(-2, rat(3, 2)))
            .add(&zq(3, rint(2)).neg());
        for k in [-3i64, -1, 0, 1, 2] {
            let lhs = f.shift_z(k).set_z_one();
            let mut rhs = QSeries::zero(f.validity());
            for (zk, c) in f.z_terms() {
                rhs = rhs.add(&c.mul_monomial(&BigInt::one(), rat(zk * k, 2)));
            }
            assert_eq!(lhs, rhs, "k={k}");
        }
    }

    #[test]
    fn ns_product_symmetric_under_z_inversion() {
        // prod (1 + z q^{n-1/2})(1 + z^{-1} q^{n-1/2}) is invariant under
        // z -> z^{-1}.
        let order = rint(8);
        let plus = ZMonomial { sign: -1, z_exp: 1, q_exp: rat(1, 2) };
        let minus = ZMonomial { sign: -1, z_exp: -1, q_exp: rat(1, 2) };
        let p = zpochhammer_infinite(&plus, order).mul(&zpochhammer_infinite(&minus, order));
        assert_eq!(p, p.swap_z());
    }

    #[test]
    fn geometric_inverse_is_inverse() {
        for (sign, ze, qe) in [(1i8, 1i64, rint(1)), (-1, -1, rat(1, 2)), (1, 2, rat(3, 2))] {
            let m = ZMonomial { sign, z_exp: ze, q_exp: qe };
            let g = geometric_inverse(&m, rint(6));
            // (1 + s z^a q^e) * g = 1; one_minus flips the sign for us.
            let neg = ZMonomial { sign: -sign, ..m };
            let prod = ZQSeries::one_minus(&neg).mul(&g);
            assert!(
                prod.first_difference(&ZQSeries::one(), rint(6)).is_none(),
                "sign={sign} ze={ze} qe={qe}"
            );
        }
    }

    #[test]
    fn zpochhammer_matches_manual_product() {
        // (-z q^{1/2}; q)_2 = (1 + z q^{1/2})(1 + z q^{3/2})
        let base = ZMonomial { sign: -1, z_exp: 1, q_exp: rat(1, 2) };
        let p = zpochhammer(&base, 2, rint(10));
        let manual = ZQSeries::one()
            .add(&zq(1, rat(1, 2)))
            .mul(&ZQSeries::one().add(&zq(1, rat(3, 2))));
        assert_eq!(p, manual.truncate(p.validity()));
    }

    #[test]
    fn json_shape() {
        let f = ZQSeries::one().add(&zq(-1, rint(1))).truncate(Validity::UpTo(rint(4)));
        let j = f.to_json();
        assert_eq!(j["q_valid_through"], "4");
        assert_eq!(j["z_terms"][0][0], -1);
        assert_eq!(j["z_terms"][1][0], 0);
    }
}
