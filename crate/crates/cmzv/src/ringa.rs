//! Exact arithmetic in `A = F_q[theta]` and its fraction field.
//!
//! [`PolyA`] is a dense polynomial in `theta` over a finite field (the base
//! `F_q`, or an extension when color-twisted sums are in play). [`RatFuncExt`]
//! is a reduced fraction of two such polynomials with a monic denominator, so
//! equal fractions have identical representations.
//!
//! The module also provides monic enumeration (the source of truth for power
//! sums), the Carlitz factorials `D_i`, the products
//! `ell_d = prod_{i<=d} (theta - theta^{q^i})`, and the Carlitz gamma values.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::gf::{Embedding, FieldSpec, GFElem};
use crate::scalars::{LaurentScalar, UniformizerSpec};
use crate::{Error, Result, MAX_ENUMERATION};

/// Dense polynomial in `theta` over a finite field, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PolyA {
    field: FieldSpec,
    /// Ascending degree; empty means zero; last entry nonzero otherwise.
    coeffs: Vec<GFElem>,
}

impl fmt::Debug for PolyA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{:?}θ^{}", c.coeffs(), i)?;
        }
        Ok(())
    }
}

impl PolyA {
    pub fn zero(field: &FieldSpec) -> PolyA {
        PolyA {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &FieldSpec) -> PolyA {
        PolyA::constant(field.one())
    }

    pub fn constant(c: GFElem) -> PolyA {
        let field = c.spec().clone();
        let coeffs = if c.is_zero() { Vec::new() } else { vec![c] };
        PolyA { field, coeffs }
    }

    pub fn theta(field: &FieldSpec) -> PolyA {
        PolyA {
            field: field.clone(),
            coeffs: vec![field.zero(), field.one()],
        }
    }

    pub fn from_coeffs(field: &FieldSpec, coeffs: Vec<GFElem>) -> PolyA {
        let mut p = PolyA {
            field: field.clone(),
            coeffs,
        };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn coeffs(&self) -> &[GFElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() as i64 - 1)
        }
    }

    pub fn leading(&self) -> Option<&GFElem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().map_or(false, |c| c.is_one())
    }

    pub fn add(&self, other: &PolyA) -> PolyA {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i);
            let b = other.coeffs.get(i);
            coeffs.push(match (a, b) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        PolyA::from_coeffs(&self.field, coeffs)
    }

    pub fn neg(&self) -> PolyA {
        PolyA {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &PolyA) -> PolyA {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PolyA) -> PolyA {
        if self.is_zero() || other.is_zero() {
            return PolyA::zero(&self.field);
        }
        let mut coeffs = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        PolyA::from_coeffs(&self.field, coeffs)
    }

    pub fn scale(&self, c: &GFElem) -> PolyA {
        if c.is_zero() {
            return PolyA::zero(&self.field);
        }
        PolyA {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> PolyA {
        let mut r = PolyA::one(&self.field);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                r = r.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        r
    }

    /// Euclidean division; the divisor must be nonzero.
    pub fn divrem(&self, den: &PolyA) -> Result<(PolyA, PolyA)> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let dd = den.coeffs.len();
        if self.coeffs.len() < dd {
            return Ok((PolyA::zero(&self.field), self.clone()));
        }
        let lead_inv = den.leading().unwrap().inv()?;
        let mut rem = self.coeffs.clone();
        let mut quo = vec![self.field.zero(); self.coeffs.len() - dd + 1];
        for k in (0..quo.len()).rev() {
            let c = rem[k + dd - 1].mul(&lead_inv);
            if c.is_zero() {
                continue;
            }
            quo[k] = c.clone();
            for (i, d) in den.coeffs.iter().enumerate() {
                rem[k + i] = rem[k + i].sub(&c.mul(d));
            }
        }
        Ok((
            PolyA::from_coeffs(&self.field, quo),
            PolyA::from_coeffs(&self.field, rem),
        ))
    }

    pub fn gcd(&self, other: &PolyA) -> PolyA {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.divrem(&b).expect("nonzero divisor").1;
            a = b;
            b = r;
        }
        // monic normalization for canonicity
        if let Some(l) = a.leading() {
            let inv = l.inv().expect("nonzero leading");
            a = a.scale(&inv);
        }
        a
    }

    pub fn eval(&self, at: &GFElem) -> GFElem {
        let mut acc = at.spec().zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(at).add(c);
        }
        acc
    }

    /// Horner evaluation at a Laurent scalar image of `theta` (or of any
    /// `theta^{q^{-j}}`); coefficients are lifted through `lift`.
    pub fn eval_laurent(&self, at: &LaurentScalar, lift: &Embedding) -> Result<LaurentScalar> {
        let spec = at.spec();
        let mut acc = spec.zero(crate::scalars::EXACT);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(at).add(&spec.constant(lift.apply(c)?));
        }
        Ok(acc)
    }

    /// Coefficientwise application of an embedding into a larger field.
    pub fn lift(&self, emb: &Embedding) -> Result<PolyA> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| emb.apply(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyA::from_coeffs(emb.target(), coeffs))
    }

    /// `theta -> theta^{q^n}` substitution (the `n`-fold Frobenius twist of
    /// an element of `A`, coefficients included).
    pub fn frobenius_twist(&self, q: u64, n: u32) -> PolyA {
        let step = q.pow(n) as usize;
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.field.zero(); (self.coeffs.len() - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[i * step] = crate::gf::qtwist(c, q, n as i64).expect("char power");
            }
        }
        PolyA::from_coeffs(&self.field, coeffs)
    }
}

/// Streams the `q^d` monic polynomials of degree `d` in lexicographic order
/// (low coefficients vary fastest, field elements in encoding order).
pub fn monics(field: &FieldSpec, d: u32) -> Result<impl Iterator<Item = PolyA> + '_> {
    let q = field.size();
    let count = (q as u128).pow(d);
    if count > MAX_ENUMERATION as u128 {
        return Err(Error::EnumerationTooLarge(count, MAX_ENUMERATION));
    }
    let count = count as u64;
    Ok((0..count).map(move |n| {
        let mut coeffs = Vec::with_capacity(d as usize + 1);
        let mut m = n;
        for _ in 0..d {
            coeffs.push(field.from_int(m % q));
            m /= q;
        }
        coeffs.push(field.one());
        PolyA::from_coeffs(field, coeffs)
    }))
}

/// Carlitz factorial `D_i = prod_{j<i} (theta^{q^i} - theta^{q^j})`, via the
/// recursion `D_0 = 1`, `D_i = (theta^{q^i} - theta) D_{i-1}^q`.
pub fn carlitz_d(field: &FieldSpec, i: u32) -> PolyA {
    let q = field.size();
    let theta = PolyA::theta(field);
    let mut d = PolyA::one(field);
    for k in 1..=i {
        let tq = theta.pow_u64(q.pow(k));
        d = tq.sub(&theta).mul(&d.pow_u64(q));
    }
    d
}

/// `ell_d = prod_{i=1..d} (theta - theta^{q^i})`; `ell_0 = 1`. The reciprocal
/// interpolates the depth-one power sums: `S_d(1) = 1/ell_d`.
pub fn carlitz_ell(field: &FieldSpec, d: u32) -> PolyA {
    let q = field.size();
    let theta = PolyA::theta(field);
    let mut ell = PolyA::one(field);
    for i in 1..=d {
        ell = ell.mul(&theta.sub(&theta.pow_u64(q.pow(i))));
    }
    ell
}

impl PolyA {
    fn pow_u64(&self, mut n: u64) -> PolyA {
        let mut r = PolyA::one(&self.field);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                r = r.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        r
    }
}

/// Carlitz gamma value `Gamma_{n+1} = prod_i D_i^{n_i}` where
/// `n = sum n_i q^i` in base `q`. `gamma(0) = Gamma_1 = 1`.
pub fn gamma(field: &FieldSpec, n: u64) -> PolyA {
    let q = field.size();
    let mut out = PolyA::one(field);
    let mut n = n;
    let mut i = 0;
    while n > 0 {
        let ni = (n % q) as u32;
        n /= q;
        if ni > 0 {
            out = out.mul(&carlitz_d(field, i).pow(ni));
        }
        i += 1;
    }
    out
}

/// Reduced rational function over an extension field: `num/den` with
/// `gcd = 1` and monic denominator, so representations are canonical.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct RatFuncExt {
    num: PolyA,
    den: PolyA,
}

impl RatFuncExt {
    pub fn new(num: PolyA, den: PolyA) -> Result<RatFuncExt> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut r = RatFuncExt { num, den };
        r.reduce()?;
        Ok(r)
    }

    pub fn zero(field: &FieldSpec) -> RatFuncExt {
        RatFuncExt {
            num: PolyA::zero(field),
            den: PolyA::one(field),
        }
    }

    pub fn one(field: &FieldSpec) -> RatFuncExt {
        RatFuncExt {
            num: PolyA::one(field),
            den: PolyA::one(field),
        }
    }

    pub fn from_poly(p: PolyA) -> RatFuncExt {
        let den = PolyA::one(p.field());
        RatFuncExt { num: p, den }
    }

    fn reduce(&mut self) -> Result<()> {
        if self.num.is_zero() {
            self.den = PolyA::one(self.num.field());
            return Ok(());
        }
        let g = self.num.gcd(&self.den);
        if !g.is_one() {
            self.num = self.num.divrem(&g)?.0;
            self.den = self.den.divrem(&g)?.0;
        }
        let lead_inv = self.den.leading().unwrap().inv()?;
        self.num = self.num.scale(&lead_inv);
        self.den = self.den.scale(&lead_inv);
        Ok(())
    }

    pub fn num(&self) -> &PolyA {
        &self.num
    }

    pub fn den(&self) -> &PolyA {
        &self.den
    }

    pub fn field(&self) -> &FieldSpec {
        self.num.field()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `deg num - deg den`; `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        Some(self.num.degree()? - self.den.degree().unwrap_or(0))
    }

    pub fn add(&self, other: &RatFuncExt) -> RatFuncExt {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RatFuncExt::new(num, den).expect("nonzero denominator")
    }

    pub fn neg(&self) -> RatFuncExt {
        RatFuncExt {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RatFuncExt) -> RatFuncExt {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFuncExt) -> RatFuncExt {
        RatFuncExt::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominator")
    }

    pub fn scale(&self, c: &GFElem) -> RatFuncExt {
        RatFuncExt::new(self.num.scale(c), self.den.clone()).expect("nonzero denominator")
    }

    pub fn inv(&self) -> Result<RatFuncExt> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RatFuncExt::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, n: u32) -> RatFuncExt {
        RatFuncExt {
            num: self.num.pow(n),
            den: self.den.pow(n),
        }
    }

    /// Coefficientwise lift into an extension field.
    pub fn lift(&self, emb: &Embedding) -> Result<RatFuncExt> {
        Ok(RatFuncExt {
            num: self.num.lift(emb)?,
            den: self.den.lift(emb)?,
        })
    }
}

/// `v`-adic expansion of a rational function, exact to `prec`: the embed of
/// `theta` is the monomial `-v^{-(q-1) q^r}`, numerator and denominator are
/// evaluated exactly, and one division is performed with enough guard digits
/// that every digit up to `prec` is certified.
pub fn to_laurent(f: &RatFuncExt, spec: &UniformizerSpec, prec: i64) -> Result<LaurentScalar> {
    let emb = Embedding::new(f.field(), spec.coeff_field())?;
    let theta = spec.theta();
    let num = f.num.eval_laurent(&theta, &emb)?;
    if f.den.is_one() {
        let floor = num.val().unwrap_or(prec);
        return Ok(num.truncate(prec.max(floor)));
    }
    let den = f.den.eval_laurent(&theta, &emb)?;
    let dval = den.val().ok_or(Error::DivisionByZero)?;
    let nval = num.val().unwrap_or(0);
    let target = prec - dval + nval.min(0).abs();
    let den_inv = den.inv_to(target)?;
    Ok(num.mul(&den_inv).truncate(prec))
}
