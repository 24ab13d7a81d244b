//! Power sums, nested/twisted power sums, and CMZV evaluation.
//!
//! A power sum is `S_d(s) = sum_{a monic, deg a = d} a^{-s}`, an exact
//! rational function in `theta`. The twisted variant scales by `xi^d`, the
//! nested variant chains strictly decreasing degrees:
//!
//! `S_d(s_1..s_n; xi_1..xi_n) = xi_1^d S_d(s_1) * S_{<d}(s_2..s_n; ...)`.
//!
//! CMZVs are the sums over all `d >= 0`, truncated soundly using the strict
//! degree decrease `deg S_{d+1}(s) < deg S_d(s)`: once the leading term of a
//! degree-`d` slice is provably below the precision window, every later
//! slice is too.
//!
//! Two evaluation routes coexist:
//! - [`power_sum`] enumerates monic polynomials literally (the oracle-grade
//!   method: slow and unimpeachable);
//! - [`PowerSumCtx`] uses the generating-function recursion
//!   `ell_d S_d(s) = [x^{s-1}] (1 - e_d(x)/D_d)^{-1}`, where `e_d` is the
//!   Carlitz linearized polynomial with roots `A_{<d}`. Tests pin the two
//!   routes against each other; the recursion is only an accelerator.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::gf::{Embedding, FieldSpec, GFElem};
use crate::ringa::{carlitz_d, carlitz_ell, monics, to_laurent, PolyA, RatFuncExt};
use crate::scalars::{LaurentScalar, UniformizerSpec};
use crate::{Error, Result};

/// A colored index: a composition `(s_1..s_n)` with colors `(xi_1..xi_n)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Index {
    s: Vec<u32>,
    xi: Vec<GFElem>,
}

impl fmt::Debug for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}; ", self.s)?;
        for (i, c) in self.xi.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c.encoding())?;
        }
        write!(f, ")")
    }
}

impl Index {
    pub fn new(s: Vec<u32>, xi: Vec<GFElem>) -> Result<Index> {
        if s.is_empty() || s.len() != xi.len() {
            return Err(Error::InvalidIndex(format!(
                "{} exponents vs {} colors",
                s.len(),
                xi.len()
            )));
        }
        if s.iter().any(|&si| si == 0) {
            return Err(Error::InvalidIndex("exponents must be positive".into()));
        }
        if xi.iter().any(|c| c.is_zero()) {
            return Err(Error::InvalidIndex("colors must be nonzero".into()));
        }
        Ok(Index { s, xi })
    }

    /// Index with all colors trivial.
    pub fn trivial(s: Vec<u32>, field: &FieldSpec) -> Result<Index> {
        let xi = vec![field.one(); s.len()];
        Index::new(s, xi)
    }

    pub fn weight(&self) -> u32 {
        self.s.iter().sum()
    }

    pub fn depth(&self) -> usize {
        self.s.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.s
    }

    pub fn colors(&self) -> &[GFElem] {
        &self.xi
    }

    pub fn head(&self) -> (u32, &GFElem) {
        (self.s[0], &self.xi[0])
    }

    /// The tail index, or `None` at depth one.
    pub fn tail(&self) -> Option<Index> {
        if self.s.len() == 1 {
            None
        } else {
            Some(Index {
                s: self.s[1..].to_vec(),
                xi: self.xi[1..].to_vec(),
            })
        }
    }

    /// Lifts every color through an embedding.
    pub fn lift(&self, emb: &Embedding) -> Result<Index> {
        Ok(Index {
            s: self.s.clone(),
            xi: self
                .xi
                .iter()
                .map(|c| emb.apply(c))
                .collect::<Result<Vec<_>>>()?,
        })
    }
}

/// `S_d(s)` by literal monic enumeration (balanced-tree accumulation).
pub fn power_sum(field: &FieldSpec, d: u32, s: u32) -> Result<RatFuncExt> {
    fn sum_range(field: &FieldSpec, monics: &[PolyA], s: u32) -> (PolyA, PolyA) {
        match monics {
            [] => (PolyA::zero(field), PolyA::one(field)),
            [a] => (PolyA::one(field), a.pow(s)),
            _ => {
                let (lo, hi) = monics.split_at(monics.len() / 2);
                let (n1, d1) = sum_range(field, lo, s);
                let (n2, d2) = sum_range(field, hi, s);
                (n1.mul(&d2).add(&n2.mul(&d1)), d1.mul(&d2))
            }
        }
    }
    let all: Vec<PolyA> = monics(field, d)?.collect();
    let (num, den) = sum_range(field, &all, s);
    RatFuncExt::new(num, den)
}

/// Caching evaluator for power sums over a base field `F_q` and an
/// extension field holding the colors. All values are exact.
pub struct PowerSumCtx {
    base: FieldSpec,
    ext: FieldSpec,
    emb: Embedding,
    q: u64,
    base_sums: HashMap<(u32, u32), RatFuncExt>,
    lifted: HashMap<(u32, u32), RatFuncExt>,
    nested: HashMap<(u32, Index), RatFuncExt>,
    lt: HashMap<(u32, Index), RatFuncExt>,
    ells: Vec<PolyA>,
    ds: Vec<PolyA>,
}

impl PowerSumCtx {
    pub fn new(base: FieldSpec, ext: FieldSpec) -> Result<PowerSumCtx> {
        let emb = Embedding::new(&base, &ext)?;
        let q = base.size();
        Ok(PowerSumCtx {
            base,
            ext,
            emb,
            q,
            base_sums: HashMap::new(),
            lifted: HashMap::new(),
            nested: HashMap::new(),
            lt: HashMap::new(),
            ells: Vec::new(),
            ds: Vec::new(),
        })
    }

    /// Context whose extension field is the coefficient field of `spec`.
    pub fn for_spec(spec: &UniformizerSpec) -> Result<PowerSumCtx> {
        let (p, eq) = crate::gf::split_prime_power(spec.q())?;
        let base = crate::gf::build_field(p, eq)?;
        PowerSumCtx::new(base, spec.coeff_field().clone())
    }

    pub fn base_field(&self) -> &FieldSpec {
        &self.base
    }

    pub fn ext_field(&self) -> &FieldSpec {
        &self.ext
    }

    fn ell(&mut self, d: u32) -> PolyA {
        while self.ells.len() <= d as usize {
            let k = self.ells.len() as u32;
            self.ells.push(carlitz_ell(&self.base, k));
        }
        self.ells[d as usize].clone()
    }

    fn d_factorial(&mut self, i: u32) -> PolyA {
        while self.ds.len() <= i as usize {
            let k = self.ds.len() as u32;
            self.ds.push(carlitz_d(&self.base, k));
        }
        self.ds[i as usize].clone()
    }

    /// `S_d(s)` over the base field.
    ///
    /// Recursion: with `G_d(x) = sum_s ell_d S_d(s) x^{s-1} =
    /// (1 - e_d(x)/D_d)^{-1}` and `e_d(x)/D_d = sum_i x^{q^i} /
    /// (D_i ell_{d-i}^{q^i})`, the coefficients satisfy `g_0 = 1`,
    /// `g_k = sum_{q^i <= k, i <= d} g_{k - q^i} / (D_i ell_{d-i}^{q^i})`,
    /// and `S_d(s) = g_{s-1} / ell_d`.
    pub fn power_sum(&mut self, d: u32, s: u32) -> RatFuncExt {
        if let Some(v) = self.base_sums.get(&(d, s)) {
            return v.clone();
        }
        let mut coeffs = Vec::with_capacity(d as usize + 1);
        for i in 0..=d {
            let den = self
                .d_factorial(i)
                .mul(&pow_u64(&self.ell(d - i), self.q.pow(i)));
            coeffs.push(RatFuncExt::new(PolyA::one(&self.base), den).expect("nonzero"));
        }
        let mut g: Vec<RatFuncExt> = vec![RatFuncExt::one(&self.base)];
        for k in 1..s {
            let mut acc = RatFuncExt::zero(&self.base);
            let mut i = 0u32;
            let mut qi = 1u64;
            while qi <= k as u64 && i <= d {
                acc = acc.add(&coeffs[i as usize].mul(&g[(k as u64 - qi) as usize]));
                i += 1;
                qi *= self.q;
            }
            g.push(acc);
        }
        let ell_inv = RatFuncExt::new(PolyA::one(&self.base), self.ell(d)).expect("nonzero");
        let out = g[(s - 1) as usize].mul(&ell_inv);
        self.base_sums.insert((d, s), out.clone());
        out
    }

    /// `S_d(s)` lifted into the extension field.
    pub fn power_sum_ext(&mut self, d: u32, s: u32) -> RatFuncExt {
        if let Some(v) = self.lifted.get(&(d, s)) {
            return v.clone();
        }
        let v = self
            .power_sum(d, s)
            .lift(&self.emb)
            .expect("base embeds in ext");
        self.lifted.insert((d, s), v.clone());
        v
    }

    /// `deg_theta S_d(s)` (power sums never vanish).
    pub fn power_sum_degree(&mut self, d: u32, s: u32) -> i64 {
        self.power_sum(d, s).degree().expect("power sums are nonzero")
    }

    /// Nested twisted power sum `S_d(idx)`; zero when `d < dep - 1`.
    pub fn nested(&mut self, d: u32, idx: &Index) -> RatFuncExt {
        if (d as usize) < idx.depth() - 1 {
            return RatFuncExt::zero(&self.ext);
        }
        let key = (d, idx.clone());
        if let Some(v) = self.nested.get(&key) {
            return v.clone();
        }
        let (s1, xi1) = idx.head();
        let xi1 = xi1.clone();
        let head = self.power_sum_ext(d, s1).scale(&xi1.pow(d as u128));
        let v = match idx.tail() {
            None => head,
            Some(tail) => head.mul(&self.lt(d, &tail)),
        };
        self.nested.insert(key, v.clone());
        v
    }

    /// `S_{<d}(idx) = sum_{d' < d} S_{d'}(idx)`.
    pub fn lt(&mut self, d: u32, idx: &Index) -> RatFuncExt {
        if d == 0 {
            return RatFuncExt::zero(&self.ext);
        }
        let key = (d, idx.clone());
        if let Some(v) = self.lt.get(&key) {
            return v.clone();
        }
        let v = self.lt(d - 1, idx).add(&self.nested(d - 1, idx));
        self.lt.insert(key, v.clone());
        v
    }
}

fn pow_u64(p: &PolyA, mut n: u64) -> PolyA {
    let mut r = PolyA::one(p.field());
    let mut base = p.clone();
    while n > 0 {
        if n & 1 == 1 {
            r = r.mul(&base);
        }
        base = base.mul(&base);
        n >>= 1;
    }
    r
}

/// Metadata attached to a CMZV evaluation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CmzvMeta {
    /// Certified leading degree `deg_theta` of the value (Thakur's
    /// inequality makes the chain `d = (n-1, ..., 0)` dominate).
    pub leading_deg_theta: i64,
    /// First omitted degree slice; all slices `>= d_cutoff` are provably
    /// below the precision window.
    pub d_cutoff: u32,
}

/// Evaluates a CMZV as a Laurent scalar with every digit up to `prec_v`
/// certified.
///
/// The cutoff uses the computed degrees: `deg S_d(s)` decreases strictly in
/// `d` (checked as we go), so once `-deg_theta(S_d(s_1)) * stride > prec_v`,
/// every later slice (whose leading factor has even smaller degree and whose
/// remaining factors have degree <= 0) lies beyond the window.
pub fn cmzv(
    ctx: &mut PowerSumCtx,
    idx: &Index,
    spec: &UniformizerSpec,
    prec_v: i64,
) -> Result<(LaurentScalar, CmzvMeta)> {
    let stride = spec.theta_stride();
    let n = idx.depth() as u32;
    let mut acc = spec.zero(prec_v);
    let mut prev_deg: Option<i64> = None;
    let mut d = 0u32;
    let d_cutoff;
    loop {
        if d > 64 {
            return Err(Error::BudgetExhausted(
                "degree-slice cutoff not reached within 64 slices".into(),
            ));
        }
        let lead_deg = ctx.power_sum_degree(d, idx.exponents()[0]);
        if let Some(p) = prev_deg {
            if lead_deg >= p {
                return Err(Error::BudgetExhausted(format!(
                    "degree certificate violated at d = {d}"
                )));
            }
        }
        prev_deg = Some(lead_deg);
        if -lead_deg * stride > prec_v && d >= n - 1 {
            d_cutoff = d;
            break;
        }
        if d >= n - 1 {
            let term = ctx.nested(d, idx);
            if !term.is_zero() {
                acc = acc.add(&to_laurent(&term, spec, prec_v)?);
            }
        }
        d += 1;
    }
    // non-vanishing certificate: the chain (n-1, ..., 0) dominates
    let mut cert = 0i64;
    for (j, &sj) in idx.exponents().iter().enumerate() {
        cert += ctx.power_sum_degree(n - 1 - j as u32, sj);
    }
    let meta = CmzvMeta {
        leading_deg_theta: cert,
        d_cutoff,
    };
    if acc.val() != Some(cert * -stride) {
        return Err(Error::BudgetExhausted(format!(
            "leading-degree certificate mismatch: val {:?}, certified {}",
            acc.val(),
            -cert * stride
        )));
    }
    Ok((acc, meta))
}

/// Convenience wrapper: precision given in `theta`-digit units.
pub fn cmzv_theta_digits(
    ctx: &mut PowerSumCtx,
    idx: &Index,
    spec: &UniformizerSpec,
    prec_theta: i64,
) -> Result<(LaurentScalar, CmzvMeta)> {
    cmzv(ctx, idx, spec, prec_theta * spec.theta_stride())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::build_field;

    fn ctx(q: u64) -> PowerSumCtx {
        let (p, e) = crate::gf::split_prime_power(q).unwrap();
        let f = build_field(p, e).unwrap();
        PowerSumCtx::new(f.clone(), f).unwrap()
    }

    #[test]
    fn s0_is_one_for_all_s() {
        let mut c = ctx(3);
        let one = RatFuncExt::one(&c.base_field().clone());
        for s in 1..8 {
            assert_eq!(c.power_sum(0, s), one);
        }
    }

    #[test]
    fn depth_one_examples() {
        // q=3: S_1(1) = -1/(theta^3 - theta); q=2: S_1(1) = 1/(theta^2+theta)
        let mut c3 = ctx(3);
        let f3 = c3.base_field().clone();
        let t = PolyA::theta(&f3);
        let den = t.pow(3).sub(&t);
        let expect = RatFuncExt::new(PolyA::constant(f3.from_int(2)), den).unwrap();
        assert_eq!(c3.power_sum(1, 1), expect);

        let mut c2 = ctx(2);
        let f2 = c2.base_field().clone();
        let t = PolyA::theta(&f2);
        let expect = RatFuncExt::new(PolyA::one(&f2), t.pow(2).add(&t)).unwrap();
        assert_eq!(c2.power_sum(1, 1), expect);
    }

    #[test]
    fn recursion_matches_enumeration() {
        // the generating-function accelerator against the literal
        // monic-enumeration oracle
        for q in [2u64, 3, 4] {
            let mut c = ctx(q);
            let field = c.base_field().clone();
            for d in 0..=3u32 {
                for s in 1..=6u32 {
                    let fast = c.power_sum(d, s);
                    let slow = power_sum(&field, d, s).unwrap();
                    assert_eq!(fast, slow, "q={q} d={d} s={s}");
                }
            }
        }
    }

    #[test]
    fn thakur_inequality_on_computed_grid() {
        for q in [2u64, 3] {
            let mut c = ctx(q);
            for s in 1..=5u32 {
                let mut prev = c.power_sum_degree(0, s);
                assert_eq!(prev, 0, "deg S_0(s) = 0");
                for d in 1..=5u32 {
                    let cur = c.power_sum_degree(d, s);
                    assert!(cur < prev, "strict decrease q={q} s={s} d={d}");
                    assert!(cur <= -(s as i64) - (d as i64 - 1), "conservative bound");
                    prev = cur;
                }
            }
        }
    }

    #[test]
    fn nested_sums_reduce_and_vanish() {
        let mut c = ctx(3);
        let f = c.base_field().clone();
        // depth 1, trivial color reduces to the plain power sum
        let idx = Index::trivial(vec![2], &f).unwrap();
        assert_eq!(c.nested(2, &idx), c.power_sum(2, 2));
        // chain impossible when d < n-1
        let idx2 = Index::trivial(vec![1, 1, 1], &f).unwrap();
        assert!(c.nested(1, &idx2).is_zero());
        // q=3, ((1,1);(1,1)), d=1 -> S_1(1) * S_0(1) = -1/(theta^3-theta)
        let idx3 = Index::trivial(vec![1, 1], &f).unwrap();
        let expect = c.power_sum(1, 1);
        assert_eq!(c.nested(1, &idx3), expect);
    }

    #[test]
    fn lt_telescopes() {
        let mut c = ctx(3);
        let f = c.base_field().clone();
        let idx = Index::trivial(vec![1, 2], &f).unwrap();
        assert!(c.lt(0, &idx).is_zero());
        for d in 0..4u32 {
            let diff = c.lt(d + 1, &idx).sub(&c.lt(d, &idx));
            assert_eq!(diff, c.nested(d, &idx));
        }
    }

    #[test]
    fn cmzv_leading_coefficient_is_one_for_depth_one() {
        // zeta_A(s; 1) = 1 + lower order, since S_0(s) = 1 dominates
        let spec = UniformizerSpec::new(3, 1).unwrap();
        let mut c = ctx(3);
        let f = c.base_field().clone();
        for s in 1..4u32 {
            let idx = Index::trivial(vec![s], &f).unwrap();
            let (z, meta) = cmzv_theta_digits(&mut c, &idx, &spec, 30).unwrap();
            assert_eq!(z.val(), Some(0), "leading digit at theta-degree 0");
            assert!(z.coeff(0).is_one());
            assert_eq!(meta.leading_deg_theta, 0);
        }
    }

    #[test]
    fn char2_frobenius_square() {
        // q=2: zeta(1)^2 = zeta(2) to every computed digit
        let spec = UniformizerSpec::new(2, 1).unwrap();
        let mut c = ctx(2);
        let f = c.base_field().clone();
        let z1 = cmzv_theta_digits(&mut c, &Index::trivial(vec![1], &f).unwrap(), &spec, 40)
            .unwrap()
            .0;
        let z2 = cmzv_theta_digits(&mut c, &Index::trivial(vec![2], &f).unwrap(), &spec, 40)
            .unwrap()
            .0;
        let sq = z1.mul(&z1);
        assert!(sq.digits_agree(&z2).is_ok());
        assert!(sq.sub(&z2).is_zero_to_prec());
    }

    #[test]
    fn frobenius_functoriality_with_colors() {
        // cmzv(p s; xi^p) = cmzv(s; xi)^p
        let spec = UniformizerSpec::new(3, 1).unwrap();
        let ext = spec.coeff_field().clone();
        let base = build_field(3, 1).unwrap();
        let mut c = PowerSumCtx::new(base, ext.clone()).unwrap();
        let xi = ext.from_int(2);
        let idx = Index::new(vec![1, 2], vec![xi.clone(), xi.clone()]).unwrap();
        let idx_p = Index::new(vec![3, 6], vec![xi.pow(3), xi.pow(3)]).unwrap();
        let (z, _) = cmzv_theta_digits(&mut c, &idx, &spec, 25).unwrap();
        let (zp, _) = cmzv_theta_digits(&mut c, &idx_p, &spec, 70).unwrap();
        let cube = z.mul(&z).mul(&z);
        assert!(cube.digits_agree(&zp).is_ok());
        assert!(cube.sub(&zp).is_zero_to_prec());
    }

    #[test]
    fn precision_stability() {
        let spec = UniformizerSpec::new(3, 2).unwrap();
        let base = build_field(3, 1).unwrap();
        let mut c = PowerSumCtx::new(base, spec.coeff_field().clone()).unwrap();
        let g = spec.level_generator();
        let idx = Index::new(vec![2, 1], vec![g.pow(4), g.pow(4)]).unwrap();
        let (lo, m1) = cmzv_theta_digits(&mut c, &idx, &spec, 20).unwrap();
        let (hi, m2) = cmzv_theta_digits(&mut c, &idx, &spec, 40).unwrap();
        assert!(lo.digits_agree(&hi).is_ok());
        assert_eq!(m1.leading_deg_theta, m2.leading_deg_theta);
        assert!(m2.d_cutoff >= m1.d_cutoff);
    }
}
