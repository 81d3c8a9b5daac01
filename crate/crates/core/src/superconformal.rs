//! Closed-form character series: N=1 minimal superconformal characters, the
//! N=2 NS vacuum character (embedding-diagram and product forms), spectral
//! flow, the Ramond vacuum character, and the flow-side sums built from the
//! bosonic polynomial.
//!
//! Characters are returned "normalized": fractional overall powers such as
//! `q^{-c/24}` and `z^{-c/6}` live in [`Prefactor`], while the body starts on
//! an integer or half-integer exponent lattice. Identity checks compare
//! bodies up to a monomial shift and prefactors by exact rational equality.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::bivariate::{geometric_inverse, zpochhammer_infinite, ZMonomial, ZQSeries};
use crate::minimal_model::{
    bose01_sum_cutoff, bose_deg_upper, bose_poly, decompose, uv_vectors, ModelError,
};
use crate::qseries::{
    pochhammer, pochhammer_infinite, QSeries, QSeriesError, SignedMonomial, Validity,
};
use crate::rat::{quad_window, rat, rint, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("character labels out of range: {0}")]
    LabelOutOfRange(String),
    #[error("bad parity: {0}")]
    BadParity(String),
    #[error("sector mismatch: expected {expected:?}")]
    SectorMismatch { expected: Sector },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Series(#[from] QSeriesError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sector {
    Ns,
    R,
}

/// Fractional overall powers `q^{q_exp} z^{z_exp}` riding outside the body.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prefactor {
    pub q_exp: Rat,
    pub z_exp: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CharBody {
    Q(QSeries),
    Zq(ZQSeries),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharLabels {
    /// A minimal N=1 superconformal character chi^{(p,p')}_{r,s}.
    N1 { p: i64, p_prime: i64, r: i64, s: i64 },
    /// An N=2 character with L_0 eigenvalue h and U(1) charge Q.
    N2 { p: i64, p_prime: i64, h: Rat, charge: Rat },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterResult {
    pub prefactor: Prefactor,
    pub body: CharBody,
    pub sector: Sector,
    pub labels: CharLabels,
    pub central_charge: Rat,
}

impl CharacterResult {
    pub fn body_q(&self) -> Option<&QSeries> {
        match &self.body {
            CharBody::Q(s) => Some(s),
            CharBody::Zq(_) => None,
        }
    }

    pub fn body_zq(&self) -> Option<&ZQSeries> {
        match &self.body {
            CharBody::Zq(s) => Some(s),
            CharBody::Q(_) => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let body = match &self.body {
            CharBody::Q(s) => s.to_json(),
            CharBody::Zq(s) => s.to_json(),
        };
        serde_json::json!({
            "prefactor": {
                "q_exp": crate::rat::format_rat(self.prefactor.q_exp),
                "z_exp": crate::rat::format_rat(self.prefactor.z_exp),
            },
            "sector": match self.sector { Sector::Ns => "NS", Sector::R => "R" },
            "central_charge": crate::rat::format_rat(self.central_charge),
            "body": body,
        })
    }
}

/// N=1 central charge `c = 3/2 - 3 (p - p')^2 / (p p')`.
pub fn central_charge_n1(p: i64, p_prime: i64) -> Rat {
    rat(3, 2) - rat(3 * (p - p_prime) * (p - p_prime), p * p_prime)
}

/// N=2 central charge `c = 3 (1 - 2p/p')`.
pub fn central_charge_n2(p: i64, p_prime: i64) -> Rat {
    rint(3) - rat(6 * p, p_prime)
}

/// Reciprocal of `(q; q)_L` through `order`, with the summation convention
/// `1/(q)_L = 0` for negative `L`.
pub(crate) fn recip_q_poch(l: i64, order: Rat) -> Result<QSeries, QSeriesError> {
    if l < 0 {
        return Ok(QSeries::zero(Validity::UpTo(order)));
    }
    pochhammer(&SignedMonomial::plus(rint(1)), l, order)?.reciprocal(order)
}

/// N=1 superconformal character `chi^{(p,p')}_{r,s}(q)`:
///
///   (-q^{eps_{r-s}})_inf / (q)_inf
///     * sum_j ( q^{j(j p p' + r p' - s p)/2} - q^{(jp-r)(jp'-s)/2} ),
///
/// with eps = 1/2 for r-s even (NS) and 1 for r-s odd (R).
pub fn n1_character(
    p: i64,
    p_prime: i64,
    r: i64,
    s: i64,
    order: Rat,
) -> Result<CharacterResult, CharError> {
    if !(1..=p - 1).contains(&r) || !(1..=p_prime - 1).contains(&s) {
        return Err(CharError::LabelOutOfRange(format!(
            "need 1 <= r <= p-1 and 1 <= s <= p'-1, got r={r}, s={s} for SM({p},{p_prime})"
        )));
    }
    if (p_prime - p) % 2 != 0 {
        return Err(CharError::BadParity(format!(
            "p' - p must be even for SM(p,p'), got ({p},{p_prime})"
        )));
    }
    if num_integer::gcd(p, (p_prime - p) / 2) != 1 {
        return Err(CharError::LabelOutOfRange(format!(
            "p and (p'-p)/2 must be coprime, got ({p},{p_prime})"
        )));
    }
    let sector = if (r - s) % 2 == 0 { Sector::Ns } else { Sector::R };
    let eps = match sector {
        Sector::Ns => rat(1, 2),
        Sector::R => rint(1),
    };
    let prefactor = pochhammer_infinite(&SignedMonomial::minus(eps), order)?
        .mul(&pochhammer_infinite(&SignedMonomial::plus(rint(1)), order)?.reciprocal(order)?);

    let mut num = QSeries::zero(Validity::UpTo(order));
    let a2 = rat(p * p_prime, 2);
    let w1 = quad_window(a2, rat(r * p_prime - s * p, 2), order);
    let w2 = quad_window(a2, rat(-(p * s + r * p_prime), 2), order);
    for j in -(w1.max(w2))..=w1.max(w2) {
        let e1 = rat(j * (j * p * p_prime + r * p_prime - s * p), 2);
        if e1 <= order {
            num = num.add(&QSeries::qpow(e1));
        }
        let e2 = rat((j * p - r) * (j * p_prime - s), 2);
        if e2 <= order {
            num = num.sub(&QSeries::qpow(e2));
        }
    }
    Ok(CharacterResult {
        prefactor: Prefactor { q_exp: rint(0), z_exp: rint(0) },
        body: CharBody::Q(prefactor.mul(&num).truncate(Validity::UpTo(order))),
        sector,
        labels: CharLabels::N1 { p, p_prime, r, s },
        central_charge: central_charge_n1(p, p_prime),
    })
}

/// Flow-side sum for the N=1 models: with `L = 2n + b - s` and the bosonic
/// polynomial standing in for `q^{-N} F`,
///
///   sum_{n>=0} q^{n(n+b-s)/2}  (-q^{1/2})_{n+(b-s)/2} / (q)_L * B(L)   (NS)
///   sum_{n>=0} q^{n(n+b-s)/2}  (-q)_{n+(b-s-1)/2}     / (q)_L * B(L)   (R)
///
/// and for the dual flow the explicit power becomes `q^{3n(n+b-s)/2}` with
/// `B(L)` replaced by its `q -> 1/q` image.
pub fn n1_flow_lhs(
    p: i64,
    p_prime: i64,
    b: i64,
    s: i64,
    dual: bool,
    order: Rat,
) -> Result<QSeries, CharError> {
    let model = decompose(p, p_prime)?;
    let uv = uv_vectors(&model, b, s)?;
    let r = uv.r;
    let delta = b - s;
    let mut acc = QSeries::zero(Validity::UpTo(order));
    let mut n = 0i64;
    loop {
        let l = 2 * n + delta;
        // Tail certificate: non-dual terms sit at or above the explicit
        // power n(n+delta)/2 since ord B >= 0; dual terms at or above
        // 3n(n+delta)/2 - deg B(L), bounded below via bose_deg_upper. Both
        // bounds increase once n >= |delta|.
        let explicit = if dual { rat(3 * n * (n + delta), 2) } else { rat(n * (n + delta), 2) };
        let low = if dual { explicit - bose_deg_upper(p, p_prime, r, s, b, l) } else { explicit };
        if n >= delta.abs() && low > order {
            break;
        }
        if l >= 0 {
            let poch_idx = if delta % 2 == 0 { n + delta / 2 } else { n + (delta - 1) / 2 };
            let base = if delta % 2 == 0 {
                SignedMonomial::minus(rat(1, 2))
            } else {
                SignedMonomial::minus(rint(1))
            };
            let bp = bose_poly(p, p_prime, r, s, b, l);
            let bp = if dual { bp.invert_q()? } else { bp };
            let term = QSeries::qpow(explicit)
                .mul(&pochhammer(&base, poch_idx, order)?)
                .mul(&recip_q_poch(l, order)?)
                .mul(&bp)
                .truncate(Validity::UpTo(order));
            acc = acc.add(&term);
        }
        n += 1;
    }
    Ok(acc.truncate(Validity::UpTo(order)))
}

/// `1 / (1 + z^{a} q^{e})` as an exact expansion through `q^order`, flipping
/// the factor when `e < 0` so the geometric series converges in `q`.
fn inv_one_plus(z_exp: i64, q_exp: Rat, order: Rat) -> ZQSeries {
    assert!(!q_exp.is_zero(), "1/(1+z) has no expansion on the q-lattice");
    if q_exp > rint(0) {
        geometric_inverse(&ZMonomial { sign: 1, z_exp, q_exp }, order)
    } else {
        // 1/(1 + z^a q^e) = z^{-a} q^{-e} / (1 + z^{-a} q^{-e})
        let flip = ZMonomial { sign: 1, z_exp: -z_exp, q_exp: -q_exp };
        ZQSeries::monomial(&flip)
            .mul(&geometric_inverse(&flip, order))
            .truncate(Validity::UpTo(order))
    }
}

/// The common NS prefactor `prod_{n>=1} (1+z q^{n-1/2})(1+z^{-1} q^{n-1/2})
/// / (1-q^n)^2` through `q^order`.
fn ns_vacuum_prefactor(order: Rat) -> Result<ZQSeries, QSeriesError> {
    let up = zpochhammer_infinite(&ZMonomial { sign: -1, z_exp: 1, q_exp: rat(1, 2) }, order);
    let dn = zpochhammer_infinite(&ZMonomial { sign: -1, z_exp: -1, q_exp: rat(1, 2) }, order);
    let recip = pochhammer_infinite(&SignedMonomial::plus(rint(1)), order)?.reciprocal(order)?;
    Ok(up.mul(&dn).scalar_mul(&recip).scalar_mul(&recip).truncate(Validity::UpTo(order)))
}

/// Which closed form of the N=2 NS vacuum character to expand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VacuumForm {
    /// The embedding-diagram form (explicit singular-vector subtractions).
    Embedding,
    /// The single bilateral-sum form.
    Product,
}

/// N=2 NS-sector vacuum character as a two-variable series, body of
///
///   q^{-c/24} prod (1+zq^{n-1/2})(1+z^{-1}q^{n-1/2})/(1-q^n)^2 * S(q,z)
///
/// where `S` is either the embedding-diagram bracket or the bilateral sum
/// `sum_j q^{pj(p'j+1)} (1-q^{2p'j+1}) / ((1+zq^{p'j+1/2})(1+z^{-1}q^{p'j+1/2}))`.
pub fn n2_ns_vacuum(
    p: i64,
    p_prime: i64,
    form: VacuumForm,
    order: Rat,
) -> Result<CharacterResult, CharError> {
    if p <= 0 || p_prime <= p || num_integer::gcd(p, p_prime) != 1 {
        return Err(CharError::LabelOutOfRange(format!(
            "need coprime 0 < p < p', got ({p},{p_prime})"
        )));
    }
    let c = central_charge_n2(p, p_prime);
    let pre = ns_vacuum_prefactor(order)?;
    let sum = match form {
        VacuumForm::Product => {
            let mut sum = ZQSeries::zero(Validity::UpTo(order));
            // j >= 0 terms enter at q^{pj(p'j+1)}; j < 0 terms at
            // q^{pj(p'j+1) - 2p'|j| - 1} after flipping both denominators.
            let w = quad_window(rint(p * p_prime), rint(-(p + 2 * p_prime)), order) + 1;
            for j in -w..=w {
                let e = rint(p * j * (p_prime * j + 1));
                let half = rat(2 * p_prime * j + 1, 2);
                let num = QSeries::qpow(e).sub(&QSeries::qpow(e + rint(2 * p_prime * j + 1)));
                let term = inv_one_plus(1, half, order)
                    .mul(&inv_one_plus(-1, half, order))
                    .scalar_mul(&num)
                    .truncate(Validity::UpTo(order));
                sum = sum.add(&term);
            }
            sum
        }
        VacuumForm::Embedding => {
            let mut sum = ZQSeries::one().truncate(Validity::UpTo(order));
            // subtracted family, n >= 0
            let mut n = 0i64;
            loop {
                let e_vac = rint(p * (n + 1) * (p_prime * (n + 1) - 1));
                let e_g = rint(p_prime * n * (p * n + 1) + p * n) + rat(1, 2);
                if e_vac > order && e_g > order {
                    break;
                }
                if e_vac <= order {
                    sum = sum.sub(&ZQSeries::from_scalar(QSeries::qpow(e_vac)));
                }
                if e_g <= order {
                    let den = rat(2 * p_prime * n + 1, 2);
                    for z_exp in [1i64, -1] {
                        let t = ZQSeries::monomial(&ZMonomial { sign: 1, z_exp, q_exp: e_g })
                            .mul(&inv_one_plus(z_exp, den, order));
                        sum = sum.sub(&t.truncate(Validity::UpTo(order)));
                    }
                }
                n += 1;
            }
            // added family, n >= 1
            let mut n = 1i64;
            loop {
                let e_vac = rint(p * n * (p_prime * n + 1));
                let e_g = rint(p_prime * n * (p * n + 1) - p * n) - rat(1, 2);
                if e_vac > order && e_g > order {
                    break;
                }
                if e_vac <= order {
                    sum = sum.add(&ZQSeries::from_scalar(QSeries::qpow(e_vac)));
                }
                if e_g <= order {
                    let den = rat(2 * p_prime * n - 1, 2);
                    for z_exp in [1i64, -1] {
                        let t = ZQSeries::monomial(&ZMonomial { sign: 1, z_exp, q_exp: e_g })
                            .mul(&inv_one_plus(z_exp, den, order));
                        sum = sum.add(&t.truncate(Validity::UpTo(order)));
                    }
                }
                n += 1;
            }
            sum
        }
    };
    Ok(CharacterResult {
        prefactor: Prefactor { q_exp: -c / rint(24), z_exp: rint(0) },
        body: CharBody::Zq(pre.mul(&sum).truncate(Validity::UpTo(order))),
        sector: Sector::Ns,
        labels: CharLabels::N2 { p, p_prime, h: rint(0), charge: rint(0) },
        central_charge: c,
    })
}

/// The `z = 1` specialization of the NS vacuum character (its own closed
/// form, used as an independent route):
///
///   q^{-c/24} prod ((1+q^{n-1/2})^2/(1-q^n)^2)
///     * sum_j q^{pj(p'j+1)} (1-q^{p'j+1/2})/(1+q^{p'j+1/2}).
pub fn n2_ns_vacuum_z1(p: i64, p_prime: i64, order: Rat) -> Result<QSeries, CharError> {
    let half = pochhammer_infinite(&SignedMonomial::minus(rat(1, 2)), order)?;
    let recip = pochhammer_infinite(&SignedMonomial::plus(rint(1)), order)?.reciprocal(order)?;
    let pre = half.mul(&half).mul(&recip).mul(&recip);
    let mut sum = QSeries::zero(Validity::UpTo(order));
    let w = quad_window(rint(p * p_prime), rint(p), order) + 1;
    for j in -w..=w {
        let e = rint(p * j * (p_prime * j + 1));
        if e > order {
            continue;
        }
        let half_exp = rat(2 * p_prime * j + 1, 2);
        // (1-q^h)/(1+q^h); for h < 0 this equals -(1-q^{-h})/(1+q^{-h}).
        let (sign, h) = if half_exp > rint(0) { (1i64, half_exp) } else { (-1, -half_exp) };
        let ratio = QSeries::one()
            .sub(&QSeries::qpow(h))
            .mul(&QSeries::one().add(&QSeries::qpow(h)).reciprocal(order)?);
        sum = sum.add(&ratio.mul_monomial(&BigInt::from(sign), e).truncate(Validity::UpTo(order)));
    }
    Ok(pre.mul(&sum).truncate(Validity::UpTo(order)))
}

/// N=2 Ramond vacuum character body (the `z^{-c/6}` power lives in the
/// prefactor):
///
///   (-z)_inf (-z^{-1}q)_inf / (q)_inf^2
///     * sum_j q^{pj(p'j+1)} (1-q^{2p'j+1}) / ((1+zq^{p'j})(1+z^{-1}q^{p'j+1})).
///
/// The `q^0` factor `(1+z)` of `(-z)_inf` is held out of the product and
/// cancelled against the `j = 0` denominator, which keeps every expansion on
/// a positive q-lattice.
pub fn n2_r_vacuum(p: i64, p_prime: i64, order: Rat) -> Result<CharacterResult, CharError> {
    if p <= 0 || p_prime <= p || num_integer::gcd(p, p_prime) != 1 {
        return Err(CharError::LabelOutOfRange(format!(
            "need coprime 0 < p < p', got ({p},{p_prime})"
        )));
    }
    let c = central_charge_n2(p, p_prime);
    let up = zpochhammer_infinite(&ZMonomial { sign: -1, z_exp: 1, q_exp: rint(1) }, order);
    let dn = zpochhammer_infinite(&ZMonomial { sign: -1, z_exp: -1, q_exp: rint(1) }, order);
    let recip = pochhammer_infinite(&SignedMonomial::plus(rint(1)), order)?.reciprocal(order)?;
    let pre = up.mul(&dn).scalar_mul(&recip).scalar_mul(&recip).truncate(Validity::UpTo(order));

    let one_plus_z = ZQSeries::one().add(&ZQSeries::monomial(&ZMonomial {
        sign: 1,
        z_exp: 1,
        q_exp: rint(0),
    }));
    let mut sum = ZQSeries::zero(Validity::UpTo(order));
    let w = quad_window(rint(p * p_prime), rint(-(p + 2 * p_prime)), order) + 1;
    for j in -w..=w {
        let e = rint(p * j * (p_prime * j + 1));
        let num = QSeries::qpow(e).sub(&QSeries::qpow(e + rint(2 * p_prime * j + 1)));
        let term = if j == 0 {
            // (1+z)/((1+z)(1+z^{-1}q)) = 1/(1+z^{-1}q)
            inv_one_plus(-1, rint(1), order).scalar_mul(&num)
        } else {
            one_plus_z
                .mul(&inv_one_plus(1, rint(p_prime * j), order))
                .mul(&inv_one_plus(-1, rint(p_prime * j + 1), order))
                .scalar_mul(&num)
        };
        sum = sum.add(&term.truncate(Validity::UpTo(order)));
    }
    Ok(CharacterResult {
        prefactor: Prefactor { q_exp: rint(0), z_exp: -c / rint(6) },
        body: CharBody::Zq(pre.mul(&sum).truncate(Validity::UpTo(order))),
        sector: Sector::R,
        labels: CharLabels::N2 { p, p_prime, h: c / rint(24), charge: -c / rint(6) },
        central_charge: c,
    })
}

/// Transport a two-variable character by the half-unit spectral flow
/// `eta = direction/2`:
///
///   chi'(q,z) = q^{c/24} z^{-d c/6} chi(q, z q^{-d/2}),
///
/// so the prefactor picks up `q_exp += c/24 - d*z_exp/2`,
/// `z_exp += -d*c/6`, and the body is `shift_z(body, -d)`. Direction +1 maps
/// NS to R and -1 maps R back; the two compose to the identity.
pub fn spectral_flow_half(
    chi: &CharacterResult,
    direction: i64,
) -> Result<CharacterResult, CharError> {
    assert!(direction == 1 || direction == -1);
    let body = match &chi.body {
        CharBody::Zq(b) => b,
        CharBody::Q(_) => {
            return Err(CharError::BadParity(
                "spectral flow needs a two-variable body".into(),
            ))
        }
    };
    let expected = if direction == 1 { Sector::Ns } else { Sector::R };
    if chi.sector != expected {
        return Err(CharError::SectorMismatch { expected });
    }
    let c = chi.central_charge;
    let d = rint(direction);
    let labels = match chi.labels {
        CharLabels::N2 { p, p_prime, h, charge } => CharLabels::N2 {
            p,
            p_prime,
            h: h - d * charge / rint(2) + c / rint(24),
            charge: charge - d * c / rint(6),
        },
        other => other,
    };
    Ok(CharacterResult {
        prefactor: Prefactor {
            q_exp: chi.prefactor.q_exp + c / rint(24) - d * chi.prefactor.z_exp / rint(2),
            z_exp: chi.prefactor.z_exp - d * c / rint(6),
        },
        body: CharBody::Zq(body.shift_z(-direction)),
        sector: match chi.sector {
            Sector::Ns => Sector::R,
            Sector::R => Sector::Ns,
        },
        labels,
        central_charge: c,
    })
}

/// Bailey-flow side of the N=2 identities, with the bosonic polynomial
/// standing in for `q^{-N} F_{0,1}`:
///
///   NS:  sum_{n>=0} (-z q^{1/2})_n (-z^{-1} q^{1/2})_n / (q)_{2n} * B(2n)
///   R :  sum_{n>=0} (-z)_n (-z^{-1} q)_n / (q)_{2n} * B(2n)
///
/// The cutoff certifying completeness below `q^order` comes from
/// [`bose01_sum_cutoff`].
pub fn n2_flow_lhs(
    p: i64,
    p_prime: i64,
    sector: Sector,
    order: Rat,
) -> Result<ZQSeries, CharError> {
    if p <= 0 || p_prime <= p || num_integer::gcd(p, p_prime) != 1 {
        return Err(CharError::LabelOutOfRange(format!(
            "need coprime 0 < p < p', got ({p},{p_prime})"
        )));
    }
    let (base_up, base_dn) = match sector {
        Sector::Ns => (
            ZMonomial { sign: -1, z_exp: 1, q_exp: rat(1, 2) },
            ZMonomial { sign: -1, z_exp: -1, q_exp: rat(1, 2) },
        ),
        Sector::R => (
            ZMonomial { sign: -1, z_exp: 1, q_exp: rint(0) },
            ZMonomial { sign: -1, z_exp: -1, q_exp: rint(1) },
        ),
    };
    let cutoff = bose01_sum_cutoff(p, p_prime, order);
    let mut acc = ZQSeries::zero(Validity::UpTo(order));
    // running Pochhammer products: (base)_0 = 1, extended one factor per n
    let mut poch_up = ZQSeries::one().truncate(Validity::UpTo(order));
    let mut poch_dn = ZQSeries::one().truncate(Validity::UpTo(order));
    for n in 0..cutoff {
        if n > 0 {
            let k = rint(n - 1);
            poch_up = poch_up
                .mul(&ZQSeries::one_minus(&ZMonomial { q_exp: base_up.q_exp + k, ..base_up }))
                .truncate(Validity::UpTo(order));
            poch_dn = poch_dn
                .mul(&ZQSeries::one_minus(&ZMonomial { q_exp: base_dn.q_exp + k, ..base_dn }))
                .truncate(Validity::UpTo(order));
        }
        let weight = bose_poly(p, p_prime, 0, 1, 1, 2 * n).mul(&recip_q_poch(2 * n, order)?);
        let term = poch_up.mul(&poch_dn).scalar_mul(&weight);
        acc = acc.add(&term.truncate(Validity::UpTo(order)));
    }
    Ok(acc)
}

/// Scan a body for a negative coefficient; returns the witness
/// `(z-exponent or 0, q-exponent, coefficient)` if one exists.
pub fn negative_coefficient_witness(body: &CharBody) -> Option<(i64, Rat, BigInt)> {
    use num_traits::Signed;
    match body {
        CharBody::Q(s) => s
            .terms()
            .find(|(_, c)| c.is_negative())
            .map(|(e, c)| (0, e, c.clone())),
        CharBody::Zq(s) => {
            for (k, coeff) in s.z_terms() {
                if let Some((e, c)) = coeff.terms().find(|(_, c)| c.is_negative()) {
                    return Some((k, e, c.clone()));
                }
            }
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    /// Shift lhs by ord(rhs) - ord(lhs) and compare through the common
    /// horizon (the full calibration report lives in the bailey module).
    fn matches_up_to_shift(lhs: &QSeries, rhs: &QSeries) -> bool {
        let (Some(ol), Some(or)) = (lhs.ord(), rhs.ord()) else {
            return lhs.is_zero() && rhs.is_zero();
        };
        let shift = or - ol;
        let shifted = lhs.mul_monomial(&BigInt::one(), shift);
        let horizon = match shifted.validity().meet(rhs.validity()) {
            Validity::UpTo(v) => v,
            Validity::Exact => rhs.max_exp().unwrap_or(rint(0)) + rint(1),
        };
        shifted.first_difference(rhs, horizon).is_none()
    }

    #[test]
    fn n1_character_basics() {
        let chi = n1_character(5, 11, 1, 1, rint(10)).unwrap();
        assert_eq!(chi.sector, Sector::Ns);
        assert_eq!(chi.central_charge, rat(3, 2) - rat(3 * 36, 55));
        let body = chi.body_q().unwrap();
        assert_eq!(body.ord().unwrap(), rint(0));
        assert_eq!(body.coeff(rint(0)).unwrap(), BigInt::one());

        let chi = n1_character(7, 17, 1, 4, rint(8)).unwrap();
        assert_eq!(chi.sector, Sector::R);
    }

    #[test]
    fn n1_character_label_symmetry() {
        // chi_{r,s} = chi_{p-r, p'-s}
        let a = n1_character(5, 11, 1, 1, rint(20)).unwrap();
        let b = n1_character(5, 11, 4, 10, rint(20)).unwrap();
        assert_eq!(a.body_q().unwrap(), b.body_q().unwrap());
    }

    #[test]
    fn n1_character_errors() {
        assert!(matches!(
            n1_character(5, 11, 0, 1, rint(5)),
            Err(CharError::LabelOutOfRange(_))
        ));
        assert!(matches!(n1_character(4, 7, 1, 1, rint(5)), Err(CharError::BadParity(_))));
        // p = 6 and (p'-p)/2 = 2 share a factor
        assert!(matches!(
            n1_character(6, 10, 1, 1, rint(5)),
            Err(CharError::LabelOutOfRange(_))
        ));
    }

    #[test]
    fn n1_ns_flow_identity_m35() {
        let lhs = n1_flow_lhs(3, 5, 1, 1, false, rint(25)).unwrap();
        let rhs = n1_character(5, 11, 1, 1, rint(25)).unwrap();
        assert!(matches_up_to_shift(&lhs, rhs.body_q().unwrap()));
    }

    #[test]
    fn n1_r_flow_identity_m57() {
        let lhs = n1_flow_lhs(5, 7, 2, 1, false, rint(20)).unwrap();
        let rhs = n1_character(7, 17, 1, 4, rint(20)).unwrap();
        assert!(matches_up_to_shift(&lhs, rhs.body_q().unwrap()));
    }

    #[test]
    fn n1_dual_flow_identity_m35() {
        let lhs = n1_flow_lhs(3, 5, 1, 1, true, rint(20)).unwrap();
        let rhs = n1_character(5, 9, 1, 3, rint(20)).unwrap();
        assert!(matches_up_to_shift(&lhs, rhs.body_q().unwrap()));
    }

    #[test]
    fn vacuum_forms_agree_m25() {
        let a = n2_ns_vacuum(2, 5, VacuumForm::Embedding, rint(10)).unwrap();
        let b = n2_ns_vacuum(2, 5, VacuumForm::Product, rint(10)).unwrap();
        assert_eq!(a.prefactor, b.prefactor);
        assert!(a
            .body_zq()
            .unwrap()
            .first_difference(b.body_zq().unwrap(), rint(10))
            .is_none());
    }

    #[test]
    fn vacuum_ground_state_m35() {
        let chi = n2_ns_vacuum(3, 5, VacuumForm::Product, rint(8)).unwrap();
        let z0 = chi.body_zq().unwrap().coeff_z(0);
        assert_eq!(z0.coeff(rint(0)).unwrap(), BigInt::one());
        assert_eq!(chi.prefactor.q_exp, rat(1, 40)); // -c/24 = 1/40 for c = -3/5
    }

    #[test]
    fn vacuum_z1_matches_specialization() {
        for (p, pp) in [(3i64, 5i64), (2, 5)] {
            let biv = n2_ns_vacuum(p, pp, VacuumForm::Product, rint(15)).unwrap();
            let z1 = biv.body_zq().unwrap().set_z_one();
            let direct = n2_ns_vacuum_z1(p, pp, rint(15)).unwrap();
            assert!(z1.first_difference(&direct, rint(15)).is_none(), "M({p},{pp})");
        }
    }

    #[test]
    fn spectral_flow_reaches_ramond() {
        for (p, pp) in [(2i64, 3i64), (3, 5)] {
            let ns = n2_ns_vacuum(p, pp, VacuumForm::Product, rint(24)).unwrap();
            let flowed = spectral_flow_half(&ns, 1).unwrap();
            let r = n2_r_vacuum(p, pp, rint(24)).unwrap();
            assert_eq!(flowed.prefactor, r.prefactor);
            assert_eq!(flowed.sector, Sector::R);
            assert_eq!(flowed.labels, r.labels);
            let horizon = match flowed.body_zq().unwrap().validity() {
                Validity::UpTo(v) => v.min(rint(10)),
                Validity::Exact => rint(10),
            };
            assert!(
                flowed
                    .body_zq()
                    .unwrap()
                    .first_difference(r.body_zq().unwrap(), horizon)
                    .is_none(),
                "M({p},{pp})"
            );
        }
    }

    #[test]
    fn spectral_flow_round_trip_is_identity() {
        let ns = n2_ns_vacuum(3, 5, VacuumForm::Product, rint(16)).unwrap();
        let back = spectral_flow_half(&spectral_flow_half(&ns, 1).unwrap(), -1).unwrap();
        assert_eq!(back.prefactor, ns.prefactor);
        assert_eq!(back.sector, ns.sector);
        let horizon = match back.body_zq().unwrap().validity() {
            Validity::UpTo(v) => v,
            Validity::Exact => rint(16),
        };
        assert!(back
            .body_zq()
            .unwrap()
            .first_difference(ns.body_zq().unwrap(), horizon)
            .is_none());
    }

    #[test]
    fn ramond_ground_state_and_asymmetry() {
        let chi = n2_r_vacuum(3, 5, rint(12)).unwrap();
        let body = chi.body_zq().unwrap();
        assert_eq!(body.coeff_z(0).coeff(rint(0)).unwrap(), BigInt::one());
        // the R body is NOT invariant under z <-> z^{-1}
        let swapped = body.swap_z();
        assert!(body.first_difference(&swapped, rint(12)).is_some());
    }

    #[test]
    fn n2_flow_ns_matches_vacuum_m23() {
        let lhs = n2_flow_lhs(2, 3, Sector::Ns, rint(14)).unwrap();
        let rhs = n2_ns_vacuum(2, 3, VacuumForm::Product, rint(14)).unwrap();
        // equal including normalization: both sides start at z^0 q^0 = 1
        assert!(lhs.first_difference(rhs.body_zq().unwrap(), rint(14)).is_none());
    }

    #[test]
    fn n2_flow_ns_z1_closed_form_m23() {
        // sum_n q^n (-q^{1/2})_n^2 / (q)_{2n}, since B(2n) = q^n for M(2,3)
        let order = rint(20);
        let lhs = n2_flow_lhs(2, 3, Sector::Ns, order).unwrap().set_z_one();
        let mut rhs = QSeries::zero(Validity::UpTo(order));
        for n in 0..=20 {
            let poch = pochhammer(&SignedMonomial::minus(rat(1, 2)), n, order).unwrap();
            let term = QSeries::qpow(rint(n))
                .mul(&poch)
                .mul(&poch)
                .mul(&recip_q_poch(2 * n, order).unwrap());
            rhs = rhs.add(&term.truncate(Validity::UpTo(order)));
        }
        assert!(lhs.first_difference(&rhs, order).is_none());
    }

    #[test]
    fn n2_flow_r_matches_ramond_m23() {
        let lhs = n2_flow_lhs(2, 3, Sector::R, rint(12)).unwrap();
        let rhs = n2_r_vacuum(2, 3, rint(12)).unwrap();
        assert!(lhs.first_difference(rhs.body_zq().unwrap(), rint(12)).is_none());
    }
}
