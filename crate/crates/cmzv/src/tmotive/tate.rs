//! Truncated Tate-algebra series: polynomials in `t` with Laurent-scalar
//! coefficients, truncated at a `t`-degree.
//!
//! A series is either an exact polynomial (`trunc = None`) or truncated
//! (`trunc = Some(T)`: coefficients of `t^k`, `k > T`, are unknown).
//! Precision of the scalar coefficients propagates through the coefficient
//! arithmetic; the `t`-truncation combines as
//!
//! - poly * poly = poly,
//! - poly * trunc(T) = trunc(T) (every product coefficient up to `T` only
//!   needs known inputs),
//! - trunc(T1) * trunc(T2) = trunc(min).
//!
//! For specializing a truncated series at a point, the unknown `t`-tail
//! needs a bound. A [`TailCert`] carries a closed-form valuation floor
//! `val(a_k) >= C + A * q^max(0, ceil((k - D) / s))` for the *true*
//! coefficients, composed conservatively through products, sums and twists;
//! [`TateSeries::eval_certified`] turns it into a certified error bound.

use crate::scalars::{LaurentScalar, UniformizerSpec, EXACT};
use crate::{Error, Result};

/// Closed-form valuation floor for the coefficients of a series:
/// `val(a_k) >= base + amp * q^max(0, ceil((k - shift) / window))`,
/// with `amp > 0`.
#[derive(Clone, Debug)]
pub struct TailCert {
    pub base: i64,
    pub amp: i64,
    pub shift: i64,
    pub window: u32,
}

impl TailCert {
    pub fn floor(&self, k: i64, q: i64) -> i64 {
        let e = if k <= self.shift {
            0
        } else {
            (k - self.shift + self.window as i64 - 1) / self.window as i64
        };
        let mut pow = 1i64;
        for _ in 0..e.min(62) {
            pow = pow.saturating_mul(q);
        }
        self.base.saturating_add(self.amp.saturating_mul(pow))
    }

    /// Conservative floor for a product of two certified series: at least
    /// one factor in any split `k1 + k2 = k` carries exponent
    /// `>= ceil((k - D1 - D2) / (s1 + s2))`; the other contributes its
    /// `k = 0` value.
    pub fn mul(&self, other: &TailCert) -> TailCert {
        let (keep, drop) = if self.amp <= other.amp {
            (self, other)
        } else {
            (other, self)
        };
        TailCert {
            base: self
                .base
                .saturating_add(other.base)
                .saturating_add(drop.amp),
            amp: keep.amp,
            shift: self.shift.saturating_add(other.shift),
            window: self.window + other.window,
        }
    }

    /// Pointwise-min floor for a sum of two certified series.
    pub fn add(&self, other: &TailCert) -> TailCert {
        TailCert {
            base: self.base.min(other.base),
            amp: self.amp.min(other.amp),
            shift: self.shift.max(other.shift),
            window: self.window.max(other.window),
        }
    }

    /// Floor after a `q^d`-power twist (valuations scale by `q^d`).
    pub fn twist(&self, q: i64, d: u32) -> TailCert {
        let mut f = 1i64;
        for _ in 0..d.min(62) {
            f = f.saturating_mul(q);
        }
        TailCert {
            base: self.base.saturating_mul(f),
            amp: self.amp.saturating_mul(f),
            shift: self.shift,
            window: self.window,
        }
    }

    /// Floor after scaling by a scalar of valuation `>= v0`.
    pub fn scale(&self, v0: i64) -> TailCert {
        TailCert {
            base: self.base.saturating_add(v0),
            amp: self.amp,
            shift: self.shift,
            window: self.window,
        }
    }

    /// Lower bound on `min_{k > t_max} (floor(k) - penalty * k)`: the
    /// valuation of the omitted tail when evaluating at a point whose
    /// `t`-power costs `penalty` per degree. Scans past the turning point;
    /// the increments of the geometric part are nondecreasing, so once they
    /// exceed the penalty the sequence increases forever.
    pub fn tail_value_bound(&self, t_max: i64, penalty: i64, q: i64) -> i64 {
        let mut best = i64::MAX;
        let mut k = t_max + 1;
        let mut prev = self.floor(k, q).saturating_sub(penalty.saturating_mul(k));
        best = best.min(prev);
        let mut rising = 0u32;
        for _ in 0..1_000_000 {
            k += 1;
            let cur = self.floor(k, q).saturating_sub(penalty.saturating_mul(k));
            best = best.min(cur);
            if cur > prev {
                rising += 1;
                // increments of the geometric part only grow: after a full
                // window of strict increase the tail keeps increasing
                if rising > self.window {
                    return best;
                }
            } else {
                rising = 0;
            }
            prev = cur;
        }
        // could not certify the turning point
        i64::MIN
    }
}

/// A `t`-series with Laurent-scalar coefficients.
#[derive(Clone, Debug)]
pub struct TateSeries {
    spec: UniformizerSpec,
    coeffs: Vec<LaurentScalar>,
    /// `None`: exact polynomial. `Some(T)`: coefficients above `t^T` unknown.
    trunc: Option<usize>,
    /// Valuation floor for the true coefficients, when known.
    cert: Option<TailCert>,
}

impl TateSeries {
    pub fn zero(spec: &UniformizerSpec, trunc: Option<usize>) -> TateSeries {
        let coeffs = match trunc {
            None => Vec::new(),
            Some(t) => vec![spec.zero(EXACT); t + 1],
        };
        TateSeries {
            spec: spec.clone(),
            coeffs,
            trunc,
            cert: None,
        }
    }

    pub fn one(spec: &UniformizerSpec) -> TateSeries {
        TateSeries::polynomial(spec, vec![spec.one()])
    }

    /// Exact polynomial from ascending coefficients.
    pub fn polynomial(spec: &UniformizerSpec, mut coeffs: Vec<LaurentScalar>) -> TateSeries {
        while coeffs.last().map_or(false, |c| c.is_zero_to_prec()) {
            coeffs.pop();
        }
        TateSeries {
            spec: spec.clone(),
            coeffs,
            trunc: None,
            cert: None,
        }
    }

    pub fn with_cert(mut self, cert: TailCert) -> TateSeries {
        self.cert = Some(cert);
        self
    }

    pub fn cert(&self) -> Option<&TailCert> {
        self.cert.as_ref()
    }

    pub fn spec(&self) -> &UniformizerSpec {
        &self.spec
    }

    /// `Some(T)` if truncated, `None` for exact polynomials.
    pub fn trunc(&self) -> Option<usize> {
        self.trunc
    }

    /// Degree of the stored part.
    pub fn t_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> LaurentScalar {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| self.spec.zero(EXACT))
    }

    pub fn coeffs(&self) -> &[LaurentScalar] {
        &self.coeffs
    }

    /// All stored coefficients are (truncated) zero.
    pub fn is_zero_to_prec(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero_to_prec())
    }

    /// Least valuation across stored coefficients, if any digit is known.
    pub fn min_val(&self) -> Option<i64> {
        self.coeffs.iter().filter_map(|c| c.val()).min()
    }

    fn join_trunc(&self, other: &TateSeries) -> Option<usize> {
        match (self.trunc, other.trunc) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a),
            (Some(a), Some(b)) => Some(a.min(b)),
        }
    }

    pub fn add(&self, other: &TateSeries) -> TateSeries {
        let trunc = self.join_trunc(other);
        let len = match trunc {
            None => self.coeffs.len().max(other.coeffs.len()),
            Some(t) => t + 1,
        };
        let mut coeffs = Vec::with_capacity(len);
        for k in 0..len {
            coeffs.push(self.coeff(k).add(&other.coeff(k)));
        }
        let cert = match (&self.cert, &other.cert) {
            (Some(a), Some(b)) => Some(a.add(b)),
            _ => None,
        };
        let mut out = TateSeries {
            spec: self.spec.clone(),
            coeffs,
            trunc,
            cert,
        };
        if out.trunc.is_none() {
            while out.coeffs.last().map_or(false, |c| c.is_zero_to_prec()) {
                out.coeffs.pop();
            }
        }
        out
    }

    pub fn neg(&self) -> TateSeries {
        TateSeries {
            spec: self.spec.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            trunc: self.trunc,
            cert: self.cert.clone(),
        }
    }

    pub fn sub(&self, other: &TateSeries) -> TateSeries {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &TateSeries) -> TateSeries {
        let trunc = self.join_trunc(other);
        let out_len = match trunc {
            None => {
                if self.coeffs.is_empty() || other.coeffs.is_empty() {
                    0
                } else {
                    self.coeffs.len() + other.coeffs.len() - 1
                }
            }
            Some(t) => t + 1,
        };
        let mut coeffs = vec![self.spec.zero(EXACT); out_len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero_to_prec() && a.prec() >= EXACT {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= out_len {
                    break;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        let cert = match (&self.cert, &other.cert) {
            (Some(a), Some(b)) => Some(a.mul(b)),
            _ => None,
        };
        let mut out = TateSeries {
            spec: self.spec.clone(),
            coeffs,
            trunc,
            cert,
        };
        if out.trunc.is_none() {
            while out.coeffs.last().map_or(false, |c| c.is_zero_to_prec()) {
                out.coeffs.pop();
            }
        }
        out
    }

    pub fn scale(&self, c: &LaurentScalar) -> TateSeries {
        let cert = match (&self.cert, c.val()) {
            (Some(a), Some(v)) => Some(a.scale(v)),
            _ => None,
        };
        TateSeries {
            spec: self.spec.clone(),
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
            trunc: self.trunc,
            cert,
        }
    }

    pub fn pow(&self, n: u32) -> TateSeries {
        if n == 0 {
            return TateSeries::one(&self.spec);
        }
        // square-and-multiply without a synthetic identity, so tail
        // certificates compose from actual factors only
        let mut r: Option<TateSeries> = None;
        let mut base = self.clone();
        let mut n = n;
        loop {
            if n & 1 == 1 {
                r = Some(match r {
                    None => base.clone(),
                    Some(acc) => acc.mul(&base),
                });
            }
            n >>= 1;
            if n == 0 {
                break;
            }
            base = base.mul(&base);
        }
        r.expect("n >= 1")
    }

    /// Coefficientwise Frobenius twist; `t`-exponents unchanged.
    pub fn twist(&self, n: i64) -> Result<TateSeries> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.qtwist(n))
            .collect::<Result<Vec<_>>>()?;
        let cert = if n >= 0 {
            self.cert
                .as_ref()
                .map(|c| c.twist(self.spec.q() as i64, n as u32))
        } else {
            None
        };
        Ok(TateSeries {
            spec: self.spec.clone(),
            coeffs,
            trunc: self.trunc,
            cert,
        })
    }

    /// Truncates the `t`-degree.
    pub fn truncate_t(&self, t: usize) -> TateSeries {
        let trunc = Some(match self.trunc {
            None => t,
            Some(old) => old.min(t),
        });
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(t + 1);
        coeffs.resize(t + 1, self.spec.zero(EXACT));
        TateSeries {
            spec: self.spec.clone(),
            coeffs,
            trunc,
            cert: self.cert.clone(),
        }
    }

    /// Truncates every coefficient's `v`-precision.
    pub fn truncate_prec(&self, prec: i64) -> TateSeries {
        TateSeries {
            spec: self.spec.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.clone().truncate(prec))
                .collect(),
            trunc: self.trunc,
            cert: self.cert.clone(),
        }
    }

    /// Multiplicative inverse up to `t`-degree `t_out` (the constant
    /// coefficient must be invertible).
    pub fn inverse(&self, t_out: usize) -> Result<TateSeries> {
        let c0 = self.coeff(0);
        let c0_inv = c0.inv()?;
        // f = c0 (1 + u), val_t(u) >= 1: 1/f = c0^{-1} sum (-u)^k
        let unit = self.scale(&c0_inv);
        let mut u = unit.sub(&TateSeries::one(&self.spec)).truncate_t(t_out);
        u.cert = None;
        let mut acc = TateSeries::one(&self.spec).truncate_t(t_out);
        let mut term = acc.clone();
        let neg_u = u.neg();
        for _ in 0..t_out {
            term = term.mul(&neg_u);
            if term.is_zero_to_prec() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc.scale(&c0_inv))
    }

    /// Horner evaluation at a scalar point: the plain partial sum over the
    /// stored coefficients. For truncated series the omitted `t`-tail is NOT
    /// accounted for; use [`Self::eval_certified`] when a tail certificate
    /// is available.
    pub fn eval(&self, at: &LaurentScalar) -> LaurentScalar {
        let mut acc = self.spec.zero(EXACT);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(at).add(c);
        }
        acc
    }

    /// Certified evaluation at a point of negative valuation `-penalty`
    /// per `t`-power (e.g. `theta` has `penalty = (q-1) q^r`). The result
    /// precision is capped so that the omitted tail is provably below it.
    pub fn eval_certified(&self, at: &LaurentScalar, penalty: i64) -> Result<LaurentScalar> {
        let partial = self.eval(at);
        match self.trunc {
            None => Ok(partial),
            Some(t) => {
                let cert = self.cert.as_ref().ok_or_else(|| {
                    Error::BudgetExhausted(
                        "specialization of a truncated series without a tail certificate".into(),
                    )
                })?;
                let bound = cert.tail_value_bound(t as i64, penalty, self.spec.q() as i64);
                if bound == i64::MIN {
                    return Err(Error::BudgetExhausted(
                        "tail certificate did not converge at this point".into(),
                    ));
                }
                Ok(partial.truncate(bound - 1))
            }
        }
    }

    /// Digitwise comparison of two series over the jointly certified range:
    /// `Ok(min v-precision)` or the first mismatch `(t_exp, v_exp)`.
    pub fn digits_agree(&self, other: &TateSeries) -> std::result::Result<i64, (usize, i64)> {
        let t_hi = match self.join_trunc(other) {
            None => self.coeffs.len().max(other.coeffs.len()),
            Some(t) => t + 1,
        };
        let mut joint = i64::MAX;
        for k in 0..t_hi {
            match self.coeff(k).digits_agree(&other.coeff(k)) {
                Ok(p) => joint = joint.min(p),
                Err(v) => return Err((k, v)),
            }
        }
        Ok(joint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> UniformizerSpec {
        UniformizerSpec::new(3, 1).unwrap()
    }

    #[test]
    fn polynomial_times_truncated_keeps_truncation() {
        let s = spec();
        let p = TateSeries::polynomial(&s, vec![s.one(), s.theta()]);
        assert_eq!(p.trunc(), None);
        let t = TateSeries::one(&s).truncate_t(5);
        let prod = p.mul(&t);
        assert_eq!(prod.trunc(), Some(5));
        assert_eq!(prod.coeff(1), s.theta());
    }

    #[test]
    fn inverse_round_trip() {
        let s = spec();
        let f = TateSeries::polynomial(&s, vec![s.one(), s.theta(), s.one()]).truncate_t(8);
        let fi = f.inverse(8).unwrap();
        let prod = f.mul(&fi);
        let one = TateSeries::one(&s).truncate_t(8);
        assert!(prod.digits_agree(&one).is_ok());
        for k in 1..=8 {
            assert!(prod.coeff(k).is_zero_to_prec(), "t^{k} residual");
        }
    }

    #[test]
    fn twist_round_trip_on_theta_coeffs() {
        let s = spec();
        let f = TateSeries::polynomial(&s, vec![s.theta(), s.one()]);
        let up = f.twist(1).unwrap();
        assert_eq!(up.coeff(0), s.theta().pow(3));
        let back = up.twist(-1).unwrap();
        assert!(f.digits_agree(&back).is_ok());
    }

    #[test]
    fn tail_cert_bounds() {
        // floor(k) = 9 * 3^k, penalty 6 per degree: tail beyond t=4
        let c = TailCert {
            base: 0,
            amp: 9,
            shift: 0,
            window: 1,
        };
        let b = c.tail_value_bound(4, 6, 3);
        // k=5: 9*243 - 30 = 2157, increasing afterwards
        assert_eq!(b, 2157);
        // heavier penalty pushes the minimum further out but still certifies
        let b2 = c.tail_value_bound(4, 2000, 3);
        assert!(b2 < 2157 && b2 > i64::MIN);
    }

    #[test]
    fn cert_composition_is_conservative() {
        let q = 3i64;
        let a = TailCert {
            base: -5,
            amp: 9,
            shift: 1,
            window: 2,
        };
        let b = TailCert {
            base: 0,
            amp: 27,
            shift: 0,
            window: 1,
        };
        let m = a.mul(&b);
        // check floor_m(k) <= floor_a(k1) + floor_b(k2) for all splits
        for k in 0..20i64 {
            let lhs = m.floor(k, q);
            for k1 in 0..=k {
                let rhs = a.floor(k1, q) + b.floor(k - k1, q);
                assert!(lhs <= rhs, "k={k} k1={k1}: {lhs} > {rhs}");
            }
        }
        let s = a.add(&b);
        for k in 0..20i64 {
            assert!(s.floor(k, q) <= a.floor(k, q).min(b.floor(k, q)));
        }
    }
}
