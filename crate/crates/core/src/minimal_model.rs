//! Structural data of the minimal models M(p,p') and the bosonic polynomial.
//!
//! Everything here derives from the continued fraction decomposition
//!
//!   p'/(p'-p) = 1 + nu_0 + 1/(nu_1 + 1/(... + 1/(nu_{n0} + 2))),
//!
//! which produces the zone boundaries `t_i = nu_0 + ... + nu_{i-1}`, the
//! fractional-level incidence matrix `I_B` with Cartan matrix `B = 2I - I_B`,
//! the recursive sequences `y`, `ybar`, and from those the Takahashi lengths
//! `l_{j+1} = y_{m-1} + (j - t_m) y_m` (truncated lengths via `ybar`).
//!
//! The bosonic polynomial is the alternating binomial sum
//!
//!   B_{r,s}(L,b;q) = sum_j ( q^{j(j p p' + r p' - s p)} [L, (L+s-b)/2 - j p']
//!                          - q^{(jp-r)(jp'-s)}         [L, (L-s-b)/2 + j p'] ).
//!
//! Only finitely many `j` contribute since the binomial bottom must lie in
//! `[0, L]`.

use num_bigint::BigInt;
use thiserror::Error;

use crate::qseries::{qbinomial, QSeries};
use crate::rat::{rat, rint, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("p and p' must be coprime with 0 < p < p', got ({0}, {1})")]
    BadLabels(i64, i64),
    #[error("p'/(p'-p) = {0}/{1} <= 2: only p < p' < 2p is in the fermionic regime")]
    UnsupportedFraction(i64, i64),
    #[error("{0} is not a Takahashi length of this model")]
    NotTakahashi(i64),
    #[error("label index {0} exceeds the vector-space dimension {1} (boundary Takahashi label)")]
    BoundaryLabelUnsupported(i64, usize),
}

/// One Takahashi entry: the index `j` with `t_m < j <= t_{m+1} + delta_{m,n0}`,
/// its zone `m`, the length `l_{j+1}` and truncated length `lbar_{j+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TakahashiLabel {
    pub index: i64,
    pub zone: usize,
    pub length: i64,
    pub truncated: i64,
}

/// All structural data of M(p,p').
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelData {
    pub p: i64,
    pub p_prime: i64,
    /// Continued-fraction digits nu_0 .. nu_{n0}.
    pub nu: Vec<i64>,
    /// Zone boundaries t_1 .. t_{n0+1} (t_0 = 0 is implicit).
    pub t: Vec<i64>,
    /// Dimension of the quasiparticle space, t_{n0+1}.
    pub dim: usize,
    /// Incidence matrix I_B (dim x dim).
    pub incidence: Vec<Vec<i64>>,
    /// Cartan matrix B = 2I - I_B.
    pub cartan: Vec<Vec<i64>>,
    /// y_{-1} .. y_{n0+1} (index shifted by one: y[0] = y_{-1} = 0).
    pub y: Vec<i64>,
    /// ybar_{-1} .. ybar_{n0+1} (ybar[0] = -1).
    pub ybar: Vec<i64>,
    pub takahashi: Vec<TakahashiLabel>,
}

impl ModelData {
    pub fn n0(&self) -> usize {
        self.nu.len() - 1
    }

    /// `t_i` with the convention `t_0 = 0`.
    pub fn t_at(&self, i: usize) -> i64 {
        if i == 0 {
            0
        } else {
            self.t[i - 1]
        }
    }

    /// `y_m` indexed from m = -1.
    pub fn y_at(&self, m: i64) -> i64 {
        self.y[(m + 1) as usize]
    }

    pub fn ybar_at(&self, m: i64) -> i64 {
        self.ybar[(m + 1) as usize]
    }

    pub fn label_for_length(&self, len: i64) -> Option<&TakahashiLabel> {
        self.takahashi.iter().find(|l| l.length == len)
    }
}

/// Continued fraction of num/den with all partial quotients positive and the
/// last one >= 2 (the canonical form of a non-integer rational, via Euclid).
fn continued_fraction(mut num: i64, mut den: i64) -> Vec<i64> {
    let mut digits = Vec::new();
    while den != 0 {
        digits.push(num.div_euclid(den));
        let r = num.rem_euclid(den);
        num = den;
        den = r;
    }
    digits
}

/// Decompose M(p,p') into its structural data.
pub fn decompose(p: i64, p_prime: i64) -> Result<ModelData, ModelError> {
    if p <= 0 || p_prime <= p || num_integer::gcd(p, p_prime) != 1 {
        return Err(ModelError::BadLabels(p, p_prime));
    }
    // x = p'/(p'-p); a nonnegative nu_0 needs x > 2.
    let den = p_prime - p;
    if p_prime <= 2 * den {
        return Err(ModelError::UnsupportedFraction(p_prime, den));
    }
    let nu: Vec<i64> = if p_prime % den == 0 {
        // Degenerate single-digit reading p'/(p'-p) = nu_0 + 3, so that
        // y_1 = nu_0 + 3 = p' under the recursion's delta_{m,0} + 2 delta_{m,n0}.
        vec![p_prime / den - 3]
    } else {
        let cf = continued_fraction(p_prime, den);
        let last = cf.len() - 1;
        cf.into_iter()
            .enumerate()
            .map(|(i, a)| match i {
                0 => a - 1,
                i if i == last => a - 2,
                _ => a,
            })
            .collect()
    };
    debug_assert!(nu.iter().all(|&v| v >= 0));
    let n0 = nu.len() - 1;

    let t: Vec<i64> = (1..=n0 + 1).map(|i| nu[..i].iter().sum()).collect();
    let dim = t[n0] as usize;

    // Incidence rows: chain neighbors, with corrections at the inner zone
    // boundaries j = t_i (i <= n0 - delta_{nu_{n0},0}) and at j = t_{n0+1}.
    let inner_limit = n0 as i64 - if nu[n0] == 0 { 1 } else { 0 };
    let is_inner_boundary =
        |j: i64| (1..=inner_limit).any(|i| t[(i - 1) as usize] == j);
    let mut incidence = vec![vec![0i64; dim]; dim];
    for j in 1..=dim as i64 {
        let row = &mut incidence[(j - 1) as usize];
        let mut set = |k: i64, v: i64| {
            if k >= 1 && k <= dim as i64 {
                row[(k - 1) as usize] += v;
            }
        };
        if j == dim as i64 {
            set(j - 1, 1);
            if nu[n0] == 0 {
                set(j, 1);
            }
        } else if is_inner_boundary(j) {
            set(j - 1, 1);
            set(j, 1);
            set(j + 1, -1);
        } else {
            set(j - 1, 1);
            set(j + 1, 1);
        }
    }
    let cartan: Vec<Vec<i64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|k| if i == k { 2 } else { 0 } - incidence[i][k])
                .collect()
        })
        .collect();

    // y_{m+1} = y_{m-1} + (nu_m + delta_{m,0} + 2 delta_{m,n0}) y_m.
    let mut y = vec![0i64, 1];
    let mut ybar = vec![-1i64, 1];
    for m in 0..=n0 {
        let coef = nu[m] + if m == 0 { 1 } else { 0 } + if m == n0 { 2 } else { 0 };
        y.push(y[m] + coef * y[m + 1]);
        ybar.push(ybar[m] + coef * ybar[m + 1]);
    }

    let mut model = ModelData {
        p,
        p_prime,
        nu,
        t,
        dim,
        incidence,
        cartan,
        y,
        ybar,
        takahashi: Vec::new(),
    };
    debug_assert_eq!(model.y_at(n0 as i64 + 1), p_prime);
    debug_assert_eq!(model.ybar_at(n0 as i64 + 1), p);
    model.takahashi = takahashi_list(&model);
    Ok(model)
}

/// The Takahashi table: one entry per `j` with
/// `t_m < j <= t_{m+1} + delta_{m,n0}`, `0 <= m <= n0`.
pub fn takahashi_list(model: &ModelData) -> Vec<TakahashiLabel> {
    let n0 = model.n0();
    let mut out = Vec::new();
    for m in 0..=n0 {
        let lo = model.t_at(m);
        let hi = model.t_at(m + 1) + if m == n0 { 1 } else { 0 };
        for j in (lo + 1)..=hi {
            out.push(TakahashiLabel {
                index: j,
                zone: m,
                length: model.y_at(m as i64 - 1) + (j - lo) * model.y_at(m as i64),
                truncated: model.ybar_at(m as i64 - 1) + (j - lo) * model.ybar_at(m as i64),
            });
        }
    }
    out
}

/// The background data attached to a pair of Takahashi lengths (b, s).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UvData {
    pub u: Vec<i64>,
    pub v: Vec<i64>,
    /// r(b), the truncated partner of b.
    pub r: i64,
    pub beta: i64,
    pub sigma: i64,
}

/// Compute `u = e_beta - sum_{k=xi+1}^{n0} e_{t_k}` and
/// `v = e_sigma - sum_{k=zeta+1}^{n0} e_{t_k}` for `b = l_{beta+1}`,
/// `s = l_{sigma+1}`, plus `r = lbar_{beta+1}`.
///
/// Boundary labels (index dim+1, which would reference e_{dim+1}) are
/// rejected, except in the zero-dimensional case where every vector is empty.
pub fn uv_vectors(model: &ModelData, b: i64, s: i64) -> Result<UvData, ModelError> {
    let unit = |label: &TakahashiLabel| -> Result<Vec<i64>, ModelError> {
        let mut e = vec![0i64; model.dim];
        if model.dim == 0 {
            return Ok(e);
        }
        let j = label.index;
        if j > model.dim as i64 {
            return Err(ModelError::BoundaryLabelUnsupported(j, model.dim));
        }
        e[(j - 1) as usize] += 1;
        for k in (label.zone + 1)..=model.n0() {
            let tk = model.t_at(k);
            debug_assert!(tk >= 1 && tk <= model.dim as i64);
            e[(tk - 1) as usize] -= 1;
        }
        Ok(e)
    };
    let b_label = *model.label_for_length(b).ok_or(ModelError::NotTakahashi(b))?;
    let s_label = *model.label_for_length(s).ok_or(ModelError::NotTakahashi(s))?;
    Ok(UvData {
        u: unit(&b_label)?,
        v: unit(&s_label)?,
        r: b_label.truncated,
        beta: b_label.index,
        sigma: s_label.index,
    })
}

/// The bosonic polynomial `B_{r,s}(L, b; q)`. Defined for any integer labels;
/// when `L + s - b` is odd the binomial bottoms are not integers and the
/// polynomial is the (flagged) zero series.
pub fn bose_poly(p: i64, p_prime: i64, r: i64, s: i64, b: i64, l: i64) -> QSeries {
    if l < 0 || (l + s - b).rem_euclid(2) == 1 {
        return QSeries::zero_poly();
    }
    let mut acc = QSeries::zero_poly();
    let window = (l + s.abs() + b.abs()) / (2 * p_prime) + 2;
    for j in -window..=window {
        let a1 = (l + s - b) / 2 - j * p_prime;
        if a1 >= 0 && a1 <= l {
            let e = j * (j * p * p_prime + r * p_prime - s * p);
            acc = acc.add(&qbinomial(l, a1).mul_monomial(&BigInt::from(1), rint(e)));
        }
        let a2 = (l - s - b) / 2 + j * p_prime;
        if a2 >= 0 && a2 <= l {
            let e = (j * p - r) * (j * p_prime - s);
            acc = acc.add(&qbinomial(l, a2).mul_monomial(&BigInt::from(-1), rint(e)));
        }
    }
    acc
}

/// Does `(L, s, b)` satisfy the parity condition `L = b - s (mod 2)`?
pub fn bose_parity_ok(s: i64, b: i64, l: i64) -> bool {
    (l + s - b).rem_euclid(2) == 0
}

/// Rigorous upper bound on `deg B_{r,s}(L, b; q)`.
///
/// Each contribution is `E_j + a_j (L - a_j)` with `a_j (L - a_j) =
/// L^2/4 - (a_j - L/2)^2`; substituting the bottoms turns both families into
/// downward parabolas in `j` of the form `L^2/4 - j^2 p'(p'-p) + linear`,
/// whose real maxima give a constant overshoot independent of `L`.
pub fn bose_deg_upper(p: i64, p_prime: i64, r: i64, s: i64, b: i64, l: i64) -> Rat {
    let l2_4 = rat(l * l, 4);
    // family 1: L^2/4 - (s-b)^2/4 - j^2 p'(p'-p) + j [p'(r-b) + s(p'-p)]
    // family 2: L^2/4 - (s+b)^2/4 + rs - j^2 p'(p'-p) + j [p'(s+b) - ps - rp']
    let a = rint(p_prime * (p_prime - p));
    let peak = |lin: Rat, cst: Rat| -> Rat { cst + lin * lin / (rint(4) * a) };
    let c1 = peak(
        rint(p_prime * (r - b) + s * (p_prime - p)),
        -rat((s - b) * (s - b), 4),
    );
    let c2 = peak(
        rint(p_prime * (s + b) - p * s - r * p_prime),
        rint(r * s) - rat((s + b) * (s + b), 4),
    );
    l2_4 + c1.max(c2).max(rint(0))
}

/// Rigorous lower bound on `ord B_{0,1}(2n, 1; q)`.
///
/// With r=0, s=b=1 both families share the exponent `E_j = j p (j p' - 1)`
/// and pair up as `q^{E_j} ([2n, n - j p'] - [2n, n + 1 - j p'])` (using the
/// symmetry [L,a] = [L,L-a]). For a difference `[L,c] - [L,c+1]` with both
/// bottoms in range, every partition of `m <= min(c, L-c-1)` fits in both
/// counting boxes, so the difference has order at least `min(c, L-c-1) + 1`.
/// Terms with `|j| p' > n + 1` have both bottoms out of range and vanish.
pub fn bose01_ord_lower(p: i64, p_prime: i64, n: i64) -> i64 {
    let l = 2 * n;
    let mut best: Option<i64> = None;
    for j in (-(n + 1) / p_prime - 1)..=((n + 1) / p_prime + 1) {
        let c = n - j * p_prime;
        let first_ok = (0..=l).contains(&c);
        let second_ok = (0..=l).contains(&(c + 1));
        if first_ok || second_ok {
            let e = j * p * (j * p_prime - 1);
            let bound = if first_ok && second_ok {
                e + c.min(l - c - 1) + 1
            } else {
                e
            };
            best = Some(best.map_or(bound, |v: i64| v.min(bound)));
        }
    }
    best.unwrap_or(i64::MAX)
}

/// Smallest `n*` such that every term of a sum weighted by
/// `B_{0,1}(2n,1)/(q)_{2n}` with `n >= n*` provably sits above `q^order`:
/// active pair terms only grow with `n`, and any pair activating later (at
/// `|j| p' > n + 1`) enters with exponent `E_j >= p n (n+1) / p' > order`.
pub fn bose01_sum_cutoff(p: i64, p_prime: i64, order: Rat) -> i64 {
    let mut n = 0i64;
    loop {
        let active = rint(bose01_ord_lower(p, p_prime, n)) > order;
        let future = rat(p * n * (n + 1), p_prime) > order;
        if active && future {
            return n;
        }
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::Validity;
    use num_traits::Signed;

    /// Reconstruct p'/(p'-p) from the digits via exact rational arithmetic.
    fn reconstruct(nu: &[i64]) -> Rat {
        let n0 = nu.len() - 1;
        if n0 == 0 {
            return rint(nu[0] + 3);
        }
        let mut x = rint(nu[n0] + 2);
        for m in (1..n0).rev() {
            x = rint(nu[m]) + rint(1) / x;
        }
        rint(1 + nu[0]) + rint(1) / x
    }

    #[test]
    fn decompose_m35() {
        let m = decompose(3, 5).unwrap();
        assert_eq!(m.nu, vec![1, 0]);
        assert_eq!(m.t, vec![1, 1]);
        assert_eq!(m.dim, 1);
        assert_eq!(m.incidence, vec![vec![1]]);
        assert_eq!(m.cartan, vec![vec![1]]);
        assert_eq!(m.y, vec![0, 1, 2, 5]);
        assert_eq!(m.ybar, vec![-1, 1, 1, 3]);
        assert_eq!(reconstruct(&m.nu), rat(5, 2));
    }

    #[test]
    fn decompose_m45_degenerate() {
        let m = decompose(4, 5).unwrap();
        assert_eq!(m.nu, vec![2]);
        assert_eq!(m.y_at(1), 5);
        assert_eq!(m.ybar_at(1), 4);
    }

    #[test]
    fn decompose_m58() {
        let m = decompose(5, 8).unwrap();
        assert_eq!(m.nu, vec![1, 1, 0]);
        assert_eq!(m.t, vec![1, 2, 2]);
        assert_eq!(reconstruct(&m.nu), rat(8, 3));
        assert_eq!(&m.y[1..], &[1, 2, 3, 8]);
        assert_eq!(&m.ybar[1..], &[1, 1, 2, 5]);
    }

    #[test]
    fn decompose_invariants_hold_broadly() {
        for p in 2..14i64 {
            for pp in (p + 1)..(2 * p) {
                if num_integer::gcd(p, pp) != 1 {
                    continue;
                }
                let m = decompose(p, pp).unwrap();
                assert_eq!(reconstruct(&m.nu), rat(pp, pp - p), "M({p},{pp})");
                assert_eq!(m.y_at(m.n0() as i64 + 1), pp);
                assert_eq!(m.ybar_at(m.n0() as i64 + 1), p);
                for i in 0..m.dim {
                    for k in 0..m.dim {
                        let id = if i == k { 2 } else { 0 };
                        assert_eq!(m.cartan[i][k], id - m.incidence[i][k]);
                    }
                }
                // l_2 = 1 always; values strictly increasing within a zone.
                assert_eq!(m.takahashi[0].length, 1);
                for w in m.takahashi.windows(2) {
                    if w[0].zone == w[1].zone {
                        assert!(w[0].length < w[1].length);
                        assert!(w[0].truncated < w[1].truncated);
                    }
                }
            }
        }
    }

    #[test]
    fn rejected_labels() {
        assert!(matches!(decompose(3, 6), Err(ModelError::BadLabels(..))));
        assert!(matches!(decompose(5, 3), Err(ModelError::BadLabels(..))));
        // p' >= 2p leaves the fermionic regime
        assert!(matches!(decompose(2, 5), Err(ModelError::UnsupportedFraction(..))));
        assert!(matches!(decompose(1, 3), Err(ModelError::UnsupportedFraction(..))));
    }

    #[test]
    fn takahashi_tables() {
        let m = decompose(3, 5).unwrap();
        let pairs: Vec<(i64, i64)> = m.takahashi.iter().map(|l| (l.length, l.truncated)).collect();
        assert_eq!(pairs, vec![(1, 0), (3, 2)]);

        let m = decompose(5, 7).unwrap();
        assert_eq!(m.nu, vec![2, 0]);
        assert_eq!(&m.y[1..], &[1, 3, 7]);
        assert_eq!(&m.ybar[1..], &[1, 2, 5]);
        let pairs: Vec<(i64, i64)> = m.takahashi.iter().map(|l| (l.length, l.truncated)).collect();
        assert_eq!(pairs, vec![(1, 0), (2, 1), (4, 3)]);

        let m = decompose(2, 3).unwrap();
        assert_eq!(m.dim, 0);
        let pairs: Vec<(i64, i64)> = m.takahashi.iter().map(|l| (l.length, l.truncated)).collect();
        assert_eq!(pairs, vec![(1, 0)]);
    }

    #[test]
    fn uv_vectors_examples() {
        let m = decompose(3, 5).unwrap();
        let d = uv_vectors(&m, 1, 1).unwrap();
        assert_eq!(d.u, vec![0]);
        assert_eq!(d.v, vec![0]);
        assert_eq!(d.r, 0);
        // b = 3 is the boundary label (index 2 > dim 1)
        assert!(matches!(
            uv_vectors(&m, 3, 1),
            Err(ModelError::BoundaryLabelUnsupported(2, 1))
        ));
        assert!(matches!(uv_vectors(&m, 2, 1), Err(ModelError::NotTakahashi(2))));

        // b = 2 in M(5,7): index 2 sits in zone 0 (t_0 < 2 <= t_1 = 2), so the
        // correction sum runs over k = 1..n0 and cancels e_2.
        let m = decompose(5, 7).unwrap();
        let d = uv_vectors(&m, 2, 1).unwrap();
        assert_eq!(d.r, 1);
        assert_eq!(d.beta, 2);
        assert_eq!(d.u, vec![0, 0]);
        assert_eq!(d.v, vec![1, -1]);

        // dim = 0: all vectors empty, the single label is accepted.
        let m = decompose(2, 3).unwrap();
        let d = uv_vectors(&m, 1, 1).unwrap();
        assert_eq!(d.u, Vec::<i64>::new());
        assert_eq!(d.r, 0);
    }

    fn poly(pairs: &[(i64, i64)]) -> QSeries {
        QSeries::from_terms(
            pairs.iter().map(|(e, c)| (rint(*e), BigInt::from(*c))),
            Validity::Exact,
        )
    }

    #[test]
    fn bose_poly_small_values() {
        assert_eq!(bose_poly(3, 5, 0, 1, 1, 0), QSeries::one());
        assert_eq!(bose_poly(3, 5, 0, 1, 1, 2), poly(&[(1, 1)]));
        assert_eq!(bose_poly(3, 5, 0, 1, 1, 4), poly(&[(2, 1), (4, 1)]));
        // parity mismatch flagged as the zero polynomial
        assert!(bose_poly(3, 5, 0, 1, 1, 3).is_zero());
        assert!(!bose_parity_ok(1, 1, 3));
        // M(2,3): B(L) = q^{L/2}
        for n in 0..=8 {
            assert_eq!(bose_poly(2, 3, 0, 1, 1, 2 * n), QSeries::qpow(rint(n)));
        }
    }

    #[test]
    fn bose_poly_stabilization_and_positivity() {
        // B(L) and B(L+2) agree on exponents <= floor(L/2) - 1; coefficients
        // nonnegative; the first admissible L has constant term 1.
        for (p, pp, b, s) in [(3i64, 5i64, 1i64, 1i64), (5, 7, 2, 1), (2, 3, 1, 1), (3, 4, 1, 1)] {
            let m = decompose(p, pp).unwrap();
            let r = uv_vectors(&m, b, s).unwrap().r;
            let mut l = (b - s).rem_euclid(2);
            while l <= 20 {
                let cur = bose_poly(p, pp, r, s, b, l);
                for (_, c) in cur.terms() {
                    assert!(!c.is_negative(), "negative coefficient in B({l}) of M({p},{pp})");
                }
                if l + 2 <= 20 && l / 2 - 1 >= 0 {
                    let next = bose_poly(p, pp, r, s, b, l + 2);
                    assert!(
                        cur.first_difference(&next, rint(l / 2 - 1)).is_none(),
                        "stabilization fails at L={l} for M({p},{pp})"
                    );
                }
                l += 2;
            }
            if b >= s {
                let first = bose_poly(p, pp, r, s, b, b - s);
                assert_eq!(first.coeff(rint(0)).unwrap(), BigInt::from(1));
            }
        }
    }

    #[test]
    fn deg_upper_is_an_upper_bound() {
        for (p, pp, b, s) in [(3i64, 5i64, 1i64, 1i64), (5, 7, 2, 1), (3, 4, 1, 1)] {
            let m = decompose(p, pp).unwrap();
            let r = uv_vectors(&m, b, s).unwrap().r;
            let mut l = (b - s).rem_euclid(2);
            while l <= 16 {
                let bp = bose_poly(p, pp, r, s, b, l);
                if let Some(d) = bp.max_exp() {
                    assert!(d <= bose_deg_upper(p, pp, r, s, b, l), "L={l} M({p},{pp})");
                }
                l += 2;
            }
        }
    }

    #[test]
    fn ord_lower_is_a_lower_bound() {
        for (p, pp) in [(2i64, 3i64), (3, 5), (5, 7), (4, 7), (5, 8)] {
            for n in 0..=14 {
                let bp = bose_poly(p, pp, 0, 1, 1, 2 * n);
                if let Some(o) = bp.ord() {
                    assert!(
                        o >= rint(bose01_ord_lower(p, pp, n)),
                        "M({p},{pp}) n={n}: ord {o} < bound {}",
                        bose01_ord_lower(p, pp, n)
                    );
                }
            }
        }
    }

    #[test]
    fn sum_cutoff_covers_the_tail() {
        for (p, pp) in [(2i64, 3i64), (3, 5), (5, 7)] {
            let cutoff = bose01_sum_cutoff(p, pp, rint(25));
            for n in cutoff..cutoff + 10 {
                assert!(rint(bose01_ord_lower(p, pp, n)) > rint(25));
            }
        }
    }
}
