//! Bilateral Bailey pairs, their duals, and the bilateral Bailey lemma.
//!
//! A pair (alpha_n, beta_n) of bilateral sequences is a Bailey pair relative
//! to `a` when
//!
//!   beta_n = sum_{j=-inf}^{n} alpha_j / [(q)_{n-j} (aq)_{n+j}],
//!
//! with the summation convention that a reciprocal Pochhammer hitting an
//! identically zero factor kills the term. The alpha sequences used here are
//! sparse: signed q-monomials supported on arithmetic progressions
//! `n = modulus*j + shift` with exponents quadratic in the family parameter
//! `j`. That covers the minimal-model pairs
//!
//!   alpha_n = q^{j(j p p' + r p' - s p)}  at n = j p' - x,
//!           = -q^{(jp-r)(jp'-s)}          at n = j p' - b - x,
//!
//! their duals, and the unit pair. The dual construction is
//! `A_n(a,q) = a^n q^{n^2} alpha_n(1/a, 1/q)`, which on monomial families is
//! a pure exponent transformation.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::bivariate::ZQSeries;
use crate::minimal_model::{bose_poly, decompose, uv_vectors, ModelError};
use crate::qseries::{
    pochhammer, pochhammer_infinite, QSeries, QSeriesError, SignedMonomial, Validity,
};
use crate::rat::{quad_window, rat, rint, Rat};
use crate::superconformal::{
    n1_character, n1_flow_lhs, n2_flow_lhs, n2_ns_vacuum, n2_r_vacuum, CharError, Sector,
    VacuumForm,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BaileyError {
    #[error("alpha family is not monomial-valued under a pure q-power base")]
    NonMonomialAlpha,
    #[error("unsupported specialization: {0}")]
    UnsupportedSpecialization(String),
    #[error(transparent)]
    Series(#[from] QSeriesError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Char(#[from] CharError),
}

/// A sparse alpha branch: signed monomials `sign * q^{a2 j^2 + a1 j + a0}`
/// supported on the injective index map `n = modulus*j + shift`, optionally
/// restricted to a finite window of `j` (used by the unit pair).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticFamily {
    pub sign: i8,
    pub modulus: i64,
    pub shift: i64,
    /// Exponent coefficients (a2, a1, a0) in the family parameter j.
    pub quad: (Rat, Rat, Rat),
    /// Restrict j to an inclusive range; `None` means all integers.
    pub j_range: Option<(i64, i64)>,
}

impl QuadraticFamily {
    pub fn index(&self, j: i64) -> i64 {
        self.modulus * j + self.shift
    }

    pub fn exponent(&self, j: i64) -> Rat {
        let (a2, a1, a0) = self.quad;
        a2 * rint(j * j) + a1 * rint(j) + a0
    }

    /// The family parameter hitting Bailey index `n`, if any.
    pub fn j_for_index(&self, n: i64) -> Option<i64> {
        if self.modulus == 0 {
            return None;
        }
        let d = n - self.shift;
        if d % self.modulus != 0 {
            return None;
        }
        let j = d / self.modulus;
        match self.j_range {
            Some((lo, hi)) if j < lo || j > hi => None,
            _ => Some(j),
        }
    }

    fn j_in_range(&self, j: i64) -> bool {
        match self.j_range {
            Some((lo, hi)) => j >= lo && j <= hi,
            None => true,
        }
    }

    /// alpha at Bailey index n, as (sign, exponent); `None` when unsupported.
    pub fn alpha_at(&self, n: i64) -> Option<(i8, Rat)> {
        self.j_for_index(n).map(|j| (self.sign, self.exponent(j)))
    }
}

/// Rule producing beta_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BetaOracle {
    /// Evaluate the defining sum over the alpha families.
    FromAlpha,
    /// The minimal-model closed form `B_{r,s}(2n+b-s+2x, b) / (aq)_{2n}`.
    Bosonic { p: i64, p_prime: i64, r: i64, s: i64, b: i64, x: i64 },
}

/// A bilateral Bailey pair: base monomial, sparse alpha, and a beta rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaileyPair {
    pub a: SignedMonomial,
    pub alpha: Vec<QuadraticFamily>,
    pub beta: BetaOracle,
}

impl BaileyPair {
    /// The unit pair: alpha_n = delta_{n,0}, relative to the given base.
    pub fn unit(a: SignedMonomial) -> Self {
        BaileyPair {
            a,
            alpha: vec![QuadraticFamily {
                sign: 1,
                modulus: 1,
                shift: 0,
                quad: (rint(0), rint(0), rint(0)),
                j_range: Some((0, 0)),
            }],
            beta: BetaOracle::FromAlpha,
        }
    }

    /// The M(p,p') pair relative to `a = q^{b-s+2x}`, with `r = r(b)` from
    /// the Takahashi data.
    pub fn minimal_model(p: i64, p_prime: i64, b: i64, s: i64, x: i64) -> Result<Self, BaileyError> {
        let model = decompose(p, p_prime)?;
        let r = uv_vectors(&model, b, s)?.r;
        Ok(BaileyPair {
            a: SignedMonomial::plus(rint(b - s + 2 * x)),
            alpha: alpha_mpp(p, p_prime, r, s, b, x),
            beta: BetaOracle::Bosonic { p, p_prime, r, s, b, x },
        })
    }

    pub fn bosonic_labels(&self) -> Option<(i64, i64, i64, i64, i64, i64)> {
        match self.beta {
            BetaOracle::Bosonic { p, p_prime, r, s, b, x } => Some((p, p_prime, r, s, b, x)),
            BetaOracle::FromAlpha => None,
        }
    }
}

/// The two alpha branches of the M(p,p') Bailey pair.
pub fn alpha_mpp(p: i64, p_prime: i64, r: i64, s: i64, b: i64, x: i64) -> Vec<QuadraticFamily> {
    vec![
        QuadraticFamily {
            sign: 1,
            modulus: p_prime,
            shift: -x,
            quad: (rint(p * p_prime), rint(r * p_prime - s * p), rint(0)),
            j_range: None,
        },
        QuadraticFamily {
            sign: -1,
            modulus: p_prime,
            shift: -b - x,
            quad: (rint(p * p_prime), rint(-(p * s + r * p_prime)), rint(r * s)),
            j_range: None,
        },
    ]
}

/// The two alpha branches of the dual M(p,p') pair.
pub fn alpha_mpp_dual(p: i64, p_prime: i64, r: i64, s: i64, b: i64, x: i64) -> Vec<QuadraticFamily> {
    let lead = rint(p_prime * (p_prime - p));
    vec![
        QuadraticFamily {
            sign: 1,
            modulus: p_prime,
            shift: -x,
            quad: (
                lead,
                rint(-p_prime * (r - b) - s * (p_prime - p)),
                rint(-x * (b + x - s)),
            ),
            j_range: None,
        },
        QuadraticFamily {
            sign: -1,
            modulus: p_prime,
            shift: -b - x,
            quad: (
                lead,
                rint(p_prime * (r - b) - s * (p_prime - p)),
                rint(-s * (r - b) - x * (b + x - s)),
            ),
            j_range: None,
        },
    ]
}

/// Dual of a monomial alpha family list: `A_n = a^n q^{n^2} alpha_n(1/a, 1/q)`
/// with `n = modulus*j + shift` turns the exponent `E(j)` into
/// `n(j)^2 + e_a n(j) - E(j)`.
pub fn dualize_alpha(
    families: &[QuadraticFamily],
    a: &SignedMonomial,
) -> Result<Vec<QuadraticFamily>, BaileyError> {
    if a.sign != 1 {
        return Err(BaileyError::NonMonomialAlpha);
    }
    let ea = a.exponent;
    Ok(families
        .iter()
        .map(|f| {
            let m = rint(f.modulus);
            let c = rint(f.shift);
            let (a2, a1, a0) = f.quad;
            QuadraticFamily {
                sign: f.sign,
                modulus: f.modulus,
                shift: f.shift,
                quad: (
                    m * m - a2,
                    rint(2) * m * c + ea * m - a1,
                    c * c + ea * c - a0,
                ),
                j_range: f.j_range,
            }
        })
        .collect())
}

/// `1/(base)_m` with the bilateral conventions: for `m >= 0` the reciprocal
/// series, for `m < 0` the finite product `prod_{k=1}^{-m} (1 - base q^{-k})`
/// (which is identically zero exactly when the convention kills the term).
fn recip_poch(base: &SignedMonomial, m: i64, order: Rat) -> Result<QSeries, QSeriesError> {
    if m >= 0 {
        pochhammer(base, m, order)?.reciprocal(order)
    } else {
        let mut acc = QSeries::one();
        for k in 1..=(-m) {
            let e = base.exponent - rint(k);
            let factor = QSeries::one().sub(&QSeries::monomial(BigInt::from(base.sign as i64), e));
            acc = acc.mul(&factor);
        }
        Ok(acc)
    }
}

/// Evaluate `beta_n` from the defining sum over the alpha families, exact
/// through `order`.
pub fn beta_from_alpha(pair: &BaileyPair, n: i64, order: Rat) -> Result<QSeries, BaileyError> {
    let aq = pair.a.shift(rint(1));
    // With a = q^{e >= 0} every reciprocal Pochhammer in range has order 0,
    // so terms sit exactly at the alpha exponent. Other bases get slack for
    // the negative-index window (|n+j| <= -e-ish factors below q^0).
    let slack = if pair.a.sign == 1 && pair.a.exponent >= rint(0) {
        rint(0)
    } else {
        let m = rint(2 * n.abs()) + pair.a.exponent.abs() + rint(2);
        m * m
    };
    let mut acc = QSeries::zero(Validity::UpTo(order));
    for fam in &pair.alpha {
        let hi_bound = order + slack;
        let w = quad_window(fam.quad.0.max(rat(1, 2)), fam.quad.1, hi_bound);
        for j in -w..=w {
            if !fam.j_in_range(j) {
                continue;
            }
            let idx = fam.index(j);
            if idx > n || fam.exponent(j) > hi_bound {
                continue;
            }
            let r1 = recip_poch(&SignedMonomial::plus(rint(1)), n - idx, order)?;
            if r1.is_zero() {
                continue;
            }
            let r2 = recip_poch(&aq, n + idx, order)?;
            if r2.is_zero() {
                continue;
            }
            let term = QSeries::monomial(BigInt::from(fam.sign as i64), fam.exponent(j))
                .mul(&r1)
                .mul(&r2)
                .truncate(Validity::UpTo(order));
            acc = acc.add(&term);
        }
    }
    Ok(acc)
}

/// Evaluate `beta_n` from the pair's oracle: either the defining sum or the
/// bosonic closed form `B_{r,s}(2n+b-s+2x, b)/(aq)_{2n}`.
pub fn beta_oracle(pair: &BaileyPair, n: i64, order: Rat) -> Result<QSeries, BaileyError> {
    match pair.beta {
        BetaOracle::FromAlpha => beta_from_alpha(pair, n, order),
        BetaOracle::Bosonic { p, p_prime, r, s, b, x } => {
            let l = 2 * n + b - s + 2 * x;
            let bp = bose_poly(p, p_prime, r, s, b, l);
            let aq = pair.a.shift(rint(1));
            Ok(bp.mul(&recip_poch(&aq, 2 * n, order)?).truncate(Validity::UpTo(order)))
        }
    }
}

/// Named parameter specializations of the bilateral Bailey lemma. The limit
/// forms are the printed ones, not symbolic limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Specialization {
    /// rho_1, rho_2 -> inf: weight `a^n q^{n^2}`, prefactor `1/(aq)_inf`.
    BothRhoInfinity,
    /// rho_1 -> inf, rho_2 = -q^{(b-s+1)/2} (NS) or the R-sector form; the
    /// dual flag routes through the dual pair sum.
    N1Flow { dual: bool },
    /// rho_1 = -z q^{1/2}, rho_2 = -z^{-1} q^{1/2} with aq/(rho_1 rho_2) -> 1.
    N2Ns,
    /// rho_1 = -z, rho_2 = -z^{-1} q with aq/(rho_1 rho_2) -> 1.
    N2R,
}

/// Both sides of the lemma under a named specialization.
#[derive(Clone, Debug)]
pub enum LemmaSides {
    Univariate { lhs: QSeries, rhs: QSeries },
    Bivariate { lhs: ZQSeries, rhs: ZQSeries },
}

/// Expand both sides of the bilateral Bailey lemma for a supported
/// specialization, exactly through `order`.
pub fn lemma_sides(
    pair: &BaileyPair,
    spec: Specialization,
    order: Rat,
) -> Result<LemmaSides, BaileyError> {
    match spec {
        Specialization::BothRhoInfinity => {
            let ea = pair.a.exponent;
            if pair.a.sign != 1 || ea < rint(0) {
                return Err(BaileyError::UnsupportedSpecialization(
                    "rho -> inf limit implemented for bases a = q^{e >= 0}".into(),
                ));
            }
            // LHS: sum_{n>=0} q^{n^2} a^n beta_n
            let mut lhs = QSeries::zero(Validity::UpTo(order));
            let mut n = 0i64;
            while rint(n * n) + ea * rint(n) <= order {
                let w = QSeries::qpow(rint(n * n) + ea * rint(n));
                lhs = lhs.add(&w.mul(&beta_oracle(pair, n, order)?).truncate(Validity::UpTo(order)));
                n += 1;
            }
            // RHS: 1/(aq)_inf * sum_{n in Z} q^{n^2} a^n alpha_n
            let mut alpha_sum = QSeries::zero(Validity::UpTo(order));
            for fam in &pair.alpha {
                let m = rint(fam.modulus);
                let c = rint(fam.shift);
                // combined exponent: (Mj+c)^2 + e_a (Mj+c) + E(j)
                let a2 = m * m + fam.quad.0;
                let a1 = rint(2) * m * c + ea * m + fam.quad.1;
                let a0 = c * c + ea * c + fam.quad.2;
                let w = quad_window(a2, a1, order);
                for j in -w..=w {
                    if !fam.j_in_range(j) {
                        continue;
                    }
                    let e = a2 * rint(j * j) + a1 * rint(j) + a0;
                    if e <= order {
                        alpha_sum =
                            alpha_sum.add(&QSeries::monomial(BigInt::from(fam.sign as i64), e));
                    }
                }
            }
            let pre = pochhammer_infinite(&pair.a.shift(rint(1)), order)?.reciprocal(order)?;
            let rhs = pre.mul(&alpha_sum).truncate(Validity::UpTo(order));
            Ok(LemmaSides::Univariate { lhs, rhs })
        }
        Specialization::N1Flow { dual } => {
            let Some((p, p_prime, r, s, b, x)) = pair.bosonic_labels() else {
                return Err(BaileyError::UnsupportedSpecialization(
                    "N=1 flow needs the bosonic beta oracle".into(),
                ));
            };
            if x != 0 {
                return Err(BaileyError::UnsupportedSpecialization(
                    "printed N=1 flows set x = 0".into(),
                ));
            }
            let lhs = n1_flow_lhs(p, p_prime, b, s, dual, order)?;
            let (sp, spp, sr, ss) = if dual {
                (p_prime, 3 * p_prime - 2 * p, s, 3 * b - 2 * r)
            } else {
                (p_prime, 2 * p + p_prime, s, 2 * r + b)
            };
            let chi = n1_character(sp, spp, sr, ss, order)?;
            Ok(LemmaSides::Univariate { lhs, rhs: chi.body_q().unwrap().clone() })
        }
        Specialization::N2Ns | Specialization::N2R => {
            let Some((p, p_prime, r, s, b, x)) = pair.bosonic_labels() else {
                return Err(BaileyError::UnsupportedSpecialization(
                    "N=2 flow needs the bosonic beta oracle".into(),
                ));
            };
            if (r, s, b, x) != (0, 1, 1, 0) {
                return Err(BaileyError::UnsupportedSpecialization(
                    "N=2 flows use the (r,s,b,x) = (0,1,1,0) pair".into(),
                ));
            }
            let sector = if spec == Specialization::N2Ns { Sector::Ns } else { Sector::R };
            let lhs = n2_flow_lhs(p, p_prime, sector, order)?;
            let rhs = match sector {
                Sector::Ns => n2_ns_vacuum(p, p_prime, VacuumForm::Product, order)?
                    .body_zq()
                    .unwrap()
                    .clone(),
                Sector::R => n2_r_vacuum(p, p_prime, order)?.body_zq().unwrap().clone(),
            };
            Ok(LemmaSides::Bivariate { lhs, rhs })
        }
    }
}

/// Outcome of a calibrated comparison: `q^{shift} * lhs` against `rhs`
/// through the common horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Calibration {
    pub shift: Rat,
    pub matched: bool,
    pub first_mismatch: Option<(Rat, BigInt, BigInt)>,
    pub horizon: Rat,
    pub terms_compared: usize,
}

/// Align two series by the monomial `q^{ord(rhs) - ord(lhs)}` and diff them
/// exactly through the common horizon.
pub fn calibrate(lhs: &QSeries, rhs: &QSeries) -> Result<Calibration, QSeriesError> {
    let ol = lhs.ord().ok_or(QSeriesError::ZeroSeries)?;
    let or = rhs.ord().ok_or(QSeriesError::ZeroSeries)?;
    let shift = or - ol;
    let shifted = lhs.mul_monomial(&BigInt::one(), shift);
    let horizon = match shifted.validity().meet(rhs.validity()) {
        Validity::UpTo(v) => v,
        Validity::Exact => {
            // two exact polynomials: compare through their top
            let a = shifted.max_exp().unwrap_or(rint(0));
            let b = rhs.max_exp().unwrap_or(rint(0));
            a.max(b)
        }
    };
    let first_mismatch = shifted.first_difference(rhs, horizon);
    let terms_compared = shifted
        .terms()
        .map(|(e, _)| e)
        .chain(rhs.terms().map(|(e, _)| e))
        .filter(|e| *e <= horizon)
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    Ok(Calibration {
        shift,
        matched: first_mismatch.is_none(),
        first_mismatch,
        horizon,
        terms_compared,
    })
}

/// Bivariate calibration: one global q-shift, then z-coefficient-wise diff.
pub fn calibrate_zq(lhs: &ZQSeries, rhs: &ZQSeries) -> Result<Calibration, QSeriesError> {
    let ol = lhs.ord_q().ok_or(QSeriesError::ZeroSeries)?;
    let or = rhs.ord_q().ok_or(QSeriesError::ZeroSeries)?;
    let shift = or - ol;
    let shifted = lhs.scalar_mul(&QSeries::qpow(shift));
    let horizon = match shifted.validity().meet(rhs.validity()) {
        Validity::UpTo(v) => v,
        Validity::Exact => rint(i64::MAX / 2),
    };
    let first = shifted.first_difference(rhs, horizon);
    let mut terms = 0usize;
    for (_, c) in shifted.z_terms() {
        terms += c.terms().filter(|(e, _)| *e <= horizon).count();
    }
    Ok(Calibration {
        shift,
        matched: first.is_none(),
        first_mismatch: first.map(|(_, e, a, b)| (e, a, b)),
        horizon,
        terms_compared: terms,
    })
}
