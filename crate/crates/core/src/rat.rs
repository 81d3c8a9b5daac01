//! Small helpers around the exact rational type used for q-exponents.

use num_rational::Ratio;

/// Exact rational number. Exponents of `q` live on lattices `(1/D)*Z`, so
/// an `i64`-backed ratio is plenty; coefficients are the big ones.
pub type Rat = Ratio<i64>;

/// Shorthand constructor for `n/d`.
pub fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(n, d)
}

/// Integer rational `n/1`.
pub fn rint(n: i64) -> Rat {
    Ratio::from_integer(n)
}

/// Render as `a/b`, omitting `/b` when the denominator is 1.
pub fn format_rat(r: Rat) -> String {
    if *r.denom() == 1 {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Smallest `J >= 1` such that `a2*j^2 + a1*j > bound` for every `|j| >= J`
/// (requires `a2 > 0`). Used to window bilateral sums with quadratic
/// exponents; exact rational comparisons only.
pub fn quad_window(a2: Rat, a1: Rat, bound: Rat) -> i64 {
    let a1 = if a1 < rint(0) { -a1 } else { a1 };
    let mut j = 1i64;
    loop {
        let jr = rint(j);
        if a2 * jr * jr - a1 * jr > bound && rint(2) * a2 * jr > a1 {
            return j;
        }
        j += 1;
    }
}

/// Parse `a` or `a/b`.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: i64 = a.trim().parse().map_err(|e| format!("bad numerator {a:?}: {e}"))?;
        let d: i64 = b.trim().parse().map_err(|e| format!("bad denominator {b:?}: {e}"))?;
        if d == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Ratio::new(n, d))
    } else {
        let n: i64 = s.parse().map_err(|e| format!("bad rational {s:?}: {e}"))?;
        Ok(Ratio::from_integer(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "5", "-3", "1/2", "-7/8", "22/7"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(r), s);
        }
        assert_eq!(parse_rat("4/2").unwrap(), rint(2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }
}
