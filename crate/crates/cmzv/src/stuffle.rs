//! The symbolic sum-shuffle (stuffle) engine.
//!
//! Products of power sums expand into `F_p`-linear combinations of power
//! sums with coefficients independent of the degree `d`. Two expansion
//! levels are computed and kept apart:
//!
//! - the *fixed-degree* product [`stuffle_product`]:
//!   `S_d(a) S_d(b) = sum_w f_w S_d(w)` for every `d >= 0`. Both outer sums
//!   run over the same degree `d`, so only head merges (Chen's
//!   partial-fraction coefficients) occur;
//! - the *cumulative* product behind [`zeta_relation`]:
//!   `S_{<D}(a) S_{<D}(b) = sum_w g_w S_{<D}(w)` for every `D`, obtained by
//!   trichotomy on the largest degree. Letting `D -> infinity` gives the
//!   CMZV relation `zeta(a) zeta(b) = sum_w g_w zeta(w)`.
//!
//! Every emitted word conserves total weight and the product of colors, and
//! its depth is at most `dep(a) + dep(b)`; [`verify_relation`] checks the
//! identities exactly (rational functions, degree by degree) and numerically
//! (Laurent digits).

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::gf::{FieldSpec, GFElem};
use crate::powersum::{cmzv, Index, PowerSumCtx};
use crate::ringa::RatFuncExt;
use crate::scalars::UniformizerSpec;
use crate::{Error, Result};

/// A word of letters `(s_i, xi_i)`: exponent and color.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<(u32, GFElem)>);

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (s, c)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}:{}", s, c.encoding())?;
        }
        write!(f, "]")
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        // canonical presentation order: depth, then exponent vector, then
        // color encodings
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| {
                self.0
                    .iter()
                    .map(|(s, _)| *s)
                    .cmp(other.0.iter().map(|(s, _)| *s))
            })
            .then_with(|| {
                self.0
                    .iter()
                    .map(|(_, c)| c.encoding())
                    .cmp(other.0.iter().map(|(_, c)| c.encoding()))
            })
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Word {
    pub fn new(letters: Vec<(u32, GFElem)>) -> Word {
        Word(letters)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|(s, _)| s).sum()
    }

    /// Product of all colors; `one` for the empty word.
    pub fn color_product(&self, field: &FieldSpec) -> GFElem {
        self.0.iter().fold(field.one(), |acc, (_, c)| acc.mul(c))
    }

    fn head(&self) -> (u32, GFElem) {
        (self.0[0].0, self.0[0].1.clone())
    }

    fn tail(&self) -> Word {
        Word(self.0[1..].to_vec())
    }

    fn prepend(&self, letter: (u32, GFElem)) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(letter);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn to_index(&self) -> Result<Index> {
        Index::new(
            self.0.iter().map(|(s, _)| *s).collect(),
            self.0.iter().map(|(_, c)| c.clone()).collect(),
        )
    }
}

/// `F_p`-linear combination of words; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct FormalSum(pub BTreeMap<Word, u64>);

impl FormalSum {
    pub fn zero() -> FormalSum {
        FormalSum(BTreeMap::new())
    }

    pub fn single(w: Word) -> FormalSum {
        let mut m = BTreeMap::new();
        m.insert(w, 1);
        FormalSum(m)
    }

    pub fn add_scaled(&mut self, w: Word, c: u64, p: u64) {
        let c = c % p;
        if c == 0 {
            return;
        }
        let e = self.0.entry(w.clone()).or_insert(0);
        *e = (*e + c) % p;
        if *e == 0 {
            self.0.remove(&w);
        }
    }

    pub fn add_all(&mut self, other: &FormalSum, scale: u64, p: u64) {
        for (w, &c) in &other.0 {
            self.add_scaled(w.clone(), c * scale % p, p);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, u64)> {
        self.0.iter().map(|(w, &c)| (w, c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Chen's partial-fraction coefficient
/// `Delta^j_{s1,s2} = (-1)^{s1-1} C(j-1, s1-1) + (-1)^{s2-1} C(j-1, s2-1)`
/// reduced mod `p` (binomials via Lucas' theorem).
pub fn chen_delta(s1: u32, s2: u32, j: u32, p: u64) -> Result<u64> {
    if j == 0 || j >= s1 + s2 {
        return Err(Error::ChenIndexRange { j, hi: s1 + s2 });
    }
    let a = binom_mod(j as u64 - 1, s1 as u64 - 1, p);
    let b = binom_mod(j as u64 - 1, s2 as u64 - 1, p);
    let sa = if (s1 - 1) % 2 == 0 { a } else { (p - a) % p };
    let sb = if (s2 - 1) % 2 == 0 { b } else { (p - b) % p };
    Ok((sa + sb) % p)
}

/// Binomial coefficient mod a prime, by Lucas' theorem.
fn binom_mod(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while n > 0 || k > 0 {
        let ni = n % p;
        let ki = k % p;
        if ki > ni {
            return 0;
        }
        let mut num = 1u64;
        let mut den = 1u64;
        for i in 0..ki {
            num = num * ((ni - i) % p) % p;
            den = den * ((i + 1) % p) % p;
        }
        r = r * num % p * mod_pow(den, p - 2, p) % p;
        n /= p;
        k /= p;
    }
    r
}

fn mod_pow(mut a: u64, mut n: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while n > 0 {
        if n & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        n >>= 1;
    }
    r
}

/// The equal-degree head merge: expands `S_d(s1; xi1) S_d(s2; xi2)` as
/// `[(s1+s2; xi1 xi2)] + sum_{0<j<s1+s2, (q-1)|j} Delta^j [(s1+s2-j, j;
/// xi1 xi2, 1)]`. Both sums run over monics of the same degree `d`, so only
/// merge terms appear; the correction colors are literally 1.
pub fn depth1_product(
    s1: u32,
    xi1: &GFElem,
    s2: u32,
    xi2: &GFElem,
    q: u64,
    p: u64,
) -> Result<FormalSum> {
    let field = xi1.spec();
    let one = field.one();
    let merged = xi1.mul(xi2);
    let mut out = FormalSum::zero();
    out.add_scaled(Word::new(vec![(s1 + s2, merged.clone())]), 1, p);
    for j in 1..s1 + s2 {
        if (j as u64) % (q - 1) != 0 {
            continue;
        }
        let c = chen_delta(s1, s2, j, p)?;
        if c != 0 {
            out.add_scaled(
                Word::new(vec![(s1 + s2 - j, merged.clone()), (j, one.clone())]),
                c,
                p,
            );
        }
    }
    Ok(out)
}

/// Memoizing engine for the two product expansions.
pub struct StuffleEngine {
    q: u64,
    p: u64,
    field: FieldSpec,
    eq_memo: HashMap<(Word, Word), FormalSum>,
    lt_memo: HashMap<(Word, Word), FormalSum>,
}

impl StuffleEngine {
    /// `field` is the color field (typically `F_{q^r}`); `q` the base field
    /// size; coefficients live in `F_p` for the characteristic `p`.
    pub fn new(q: u64, field: FieldSpec) -> Result<StuffleEngine> {
        let (p, _) = crate::gf::split_prime_power(q)?;
        if p != field.p() {
            return Err(Error::NotCharPower(q, field.p()));
        }
        Ok(StuffleEngine {
            q,
            p,
            field,
            eq_memo: HashMap::new(),
            lt_memo: HashMap::new(),
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn color_field(&self) -> &FieldSpec {
        &self.field
    }

    /// Fixed-degree expansion: `S_d(a) S_d(b) = sum f_w S_d(w)`, all `d`.
    pub fn product_eq(&mut self, a: &Word, b: &Word) -> Result<FormalSum> {
        if a.is_empty() {
            return Ok(FormalSum::single(b.clone()));
        }
        if b.is_empty() {
            return Ok(FormalSum::single(a.clone()));
        }
        let key = (a.clone(), b.clone());
        if let Some(v) = self.eq_memo.get(&key) {
            return Ok(v.clone());
        }
        let (s1, xi1) = a.head();
        let (s2, xi2) = b.head();
        let heads = depth1_product(s1, &xi1, s2, &xi2, self.q, self.p)?;
        let tails = self.product_lt(&a.tail(), &b.tail())?;
        let mut out = FormalSum::zero();
        for (hw, hc) in heads.0.clone() {
            match hw.0.len() {
                1 => {
                    let letter = hw.0[0].clone();
                    for (w, c) in tails.terms() {
                        out.add_scaled(w.prepend(letter.clone()), hc * c % self.p, self.p);
                    }
                }
                2 => {
                    // S_d(c1, c2; mu, 1) * S_{<d}(a') S_{<d}(b')
                    //   = S_d(c1; mu) * [ S_{<d}((c2; 1)) * (tail product) ]
                    let first = hw.0[0].clone();
                    let second = Word::new(vec![hw.0[1].clone()]);
                    for (w, c) in tails.0.clone() {
                        let inner = self.product_lt(&second, &w)?;
                        for (w2, c2) in inner.terms() {
                            out.add_scaled(
                                w2.prepend(first.clone()),
                                hc * c % self.p * c2 % self.p,
                                self.p,
                            );
                        }
                    }
                }
                _ => unreachable!("head merges have depth 1 or 2"),
            }
        }
        self.eq_memo.insert(key, out.clone());
        Ok(out)
    }

    /// Cumulative expansion: `S_{<D}(a) S_{<D}(b) = sum g_w S_{<D}(w)`,
    /// all `D`, by trichotomy on the largest degree.
    pub fn product_lt(&mut self, a: &Word, b: &Word) -> Result<FormalSum> {
        if a.is_empty() {
            return Ok(FormalSum::single(b.clone()));
        }
        if b.is_empty() {
            return Ok(FormalSum::single(a.clone()));
        }
        let key = (a.clone(), b.clone());
        if let Some(v) = self.lt_memo.get(&key) {
            return Ok(v.clone());
        }
        let mut out = FormalSum::zero();
        // a-head carries the strictly largest degree
        let inner = self.product_lt(&a.tail(), b)?;
        for (w, c) in inner.terms() {
            out.add_scaled(w.prepend(a.head()), c, self.p);
        }
        // b-head carries the strictly largest degree
        let inner = self.product_lt(a, &b.tail())?;
        for (w, c) in inner.terms() {
            out.add_scaled(w.prepend(b.head()), c, self.p);
        }
        // both heads at the same degree
        let eq = self.product_eq(a, b)?;
        out.add_all(&eq, 1, self.p);
        self.lt_memo.insert(key, out.clone());
        Ok(out)
    }
}

/// The fixed-degree stuffle product: `S_d(a) S_d(b) = sum_w R[w] S_d(w)`
/// with coefficients independent of `d`.
pub fn stuffle_product(engine: &mut StuffleEngine, a: &Word, b: &Word) -> Result<FormalSum> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyWord);
    }
    engine.product_eq(a, b)
}

/// A CMZV relation `zeta(a) zeta(b) = sum_w rhs[w] zeta(w)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub lhs: (Word, Word),
    pub rhs: FormalSum,
}

/// Builds the CMZV relation for a pair of words (the cumulative expansion,
/// summed to `D -> infinity`).
pub fn zeta_relation(engine: &mut StuffleEngine, a: &Word, b: &Word) -> Result<Relation> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyWord);
    }
    let rhs = engine.product_lt(a, b)?;
    Ok(Relation {
        lhs: (a.clone(), b.clone()),
        rhs,
    })
}

fn word_invariants_hold(a: &Word, b: &Word, w: &Word, field: &FieldSpec) -> bool {
    w.weight() == a.weight() + b.weight()
        && w.depth() <= a.depth() + b.depth()
        && w.color_product(field) == a.color_product(field).mul(&b.color_product(field))
}

/// Checks the three conservation invariants (weight, depth bound, color
/// product) on every term of a formal sum.
pub fn check_invariants(a: &Word, b: &Word, fs: &FormalSum, field: &FieldSpec) -> bool {
    fs.terms().all(|(w, _)| word_invariants_hold(a, b, w, field))
}

/// Exact verification of the fixed-degree identity
/// `S_d(a) S_d(b) = sum f_w S_d(w)` for each `d <= d_max`.
/// Returns the first failing `d`, if any.
pub fn verify_stuffle_exact(
    ctx: &mut PowerSumCtx,
    a: &Word,
    b: &Word,
    fs: &FormalSum,
    d_max: u32,
) -> Result<Option<u32>> {
    let ia = a.to_index()?;
    let ib = b.to_index()?;
    let terms: Vec<(Index, u64)> = fs
        .terms()
        .map(|(w, c)| Ok((w.to_index()?, c)))
        .collect::<Result<_>>()?;
    for d in 0..=d_max {
        let lhs = ctx.nested(d, &ia).mul(&ctx.nested(d, &ib));
        let mut rhs = RatFuncExt::zero(ctx.ext_field());
        for (w, c) in &terms {
            let v = ctx.nested(d, w);
            rhs = rhs.add(&v.scale(&ctx.ext_field().from_prime(*c)));
        }
        if lhs != rhs {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// Exact verification of the cumulative identity
/// `S_{<d}(a) S_{<d}(b) = sum g_w S_{<d}(w)` for each `d <= d_max`.
pub fn verify_cumulative_exact(
    ctx: &mut PowerSumCtx,
    a: &Word,
    b: &Word,
    fs: &FormalSum,
    d_max: u32,
) -> Result<Option<u32>> {
    let ia = a.to_index()?;
    let ib = b.to_index()?;
    let terms: Vec<(Index, u64)> = fs
        .terms()
        .map(|(w, c)| Ok((w.to_index()?, c)))
        .collect::<Result<_>>()?;
    for d in 0..=d_max {
        let lhs = ctx.lt(d, &ia).mul(&ctx.lt(d, &ib));
        let mut rhs = RatFuncExt::zero(ctx.ext_field());
        for (w, c) in &terms {
            let v = ctx.lt(d, w);
            rhs = rhs.add(&v.scale(&ctx.ext_field().from_prime(*c)));
        }
        if lhs != rhs {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// Verification report for a relation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationReport {
    pub invariants_ok: bool,
    /// First degree `d <= d_max` at which the cumulative rational-function
    /// identity fails; `None` means the exact check passed everywhere.
    pub first_exact_failure: Option<u32>,
    /// Largest jointly certified `v`-exponent on success, or the first
    /// mismatching exponent on failure.
    pub numeric: std::result::Result<i64, i64>,
    pub d_max: u32,
    pub prec_theta: i64,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.invariants_ok && self.first_exact_failure.is_none() && self.numeric.is_ok()
    }
}

/// Verifies a CMZV relation (i) exactly, degree by degree up to `d_max`,
/// and (ii) numerically, comparing zeta values to `prec_theta` digits.
pub fn verify_relation(
    engine: &StuffleEngine,
    rel: &Relation,
    prec_theta: i64,
    d_max: u32,
) -> Result<RelationReport> {
    let field = engine.color_field().clone();
    let (p, eq) = crate::gf::split_prime_power(engine.q)?;
    let base = crate::gf::build_field(p, eq)?;
    let mut ctx = PowerSumCtx::new(base, field.clone())?;
    let (a, b) = (&rel.lhs.0, &rel.lhs.1);
    let invariants_ok = check_invariants(a, b, &rel.rhs, &field);
    let first_exact_failure = verify_cumulative_exact(&mut ctx, a, b, &rel.rhs, d_max)?;

    // numeric check over the uniformizer whose coefficient field is the
    // color field
    let r = (field.e() / eq).max(1);
    let spec = UniformizerSpec::with_extension(engine.q, r, 1)?;
    let prec_v = prec_theta * spec.theta_stride();
    let za = cmzv(&mut ctx, &a.to_index()?, &spec, prec_v)?.0;
    let zb = cmzv(&mut ctx, &b.to_index()?, &spec, prec_v)?.0;
    let lhs = za.mul(&zb);
    let mut rhs = spec.zero(prec_v);
    for (w, c) in rel.rhs.terms() {
        let zw = cmzv(&mut ctx, &w.to_index()?, &spec, prec_v)?.0;
        rhs = rhs.add(&zw.scale(&field.from_prime(c)));
    }
    let numeric = lhs.digits_agree(&rhs);
    Ok(RelationReport {
        invariants_ok,
        first_exact_failure,
        numeric,
        d_max,
        prec_theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::build_field;

    fn engine(q: u64, r: u32) -> StuffleEngine {
        let (p, eq) = crate::gf::split_prime_power(q).unwrap();
        let field = build_field(p, eq * r).unwrap();
        StuffleEngine::new(q, field).unwrap()
    }

    fn w(field: &FieldSpec, letters: &[(u32, u64)]) -> Word {
        Word::new(
            letters
                .iter()
                .map(|&(s, c)| (s, field.from_int(c)))
                .collect(),
        )
    }

    #[test]
    fn chen_delta_hand_values() {
        assert_eq!(chen_delta(1, 2, 2, 3).unwrap(), 0);
        assert_eq!(chen_delta(2, 2, 2, 3).unwrap(), 1);
        assert_eq!(chen_delta(1, 1, 1, 2).unwrap(), 0);
        assert!(chen_delta(1, 2, 3, 3).is_err());
        assert!(chen_delta(1, 2, 0, 3).is_err());
    }

    #[test]
    fn depth1_q3_weight2_has_no_correction() {
        // q=3: (1,xi)(1,lam) -> [(2; xi lam)] only (no j with 2|j in 0<j<2)
        let e = engine(3, 1);
        let f = e.color_field().clone();
        let out = depth1_product(1, &f.from_int(2), 1, &f.from_int(2), 3, 3).unwrap();
        assert_eq!(out.len(), 1);
        let (word, c) = out.terms().next().unwrap();
        assert_eq!(c, 1);
        assert_eq!(word, &w(&f, &[(2, 1)])); // 2 * 2 = 4 = 1 in F_3
    }

    #[test]
    fn depth1_q3_weight4_correction() {
        // q=3: (2,xi)(2,lam) -> [(4; xi lam)] + 1*[(2,2; xi lam, 1)]
        let e = engine(3, 1);
        let f = e.color_field().clone();
        let out = depth1_product(2, &f.from_int(1), 2, &f.from_int(2), 3, 3).unwrap();
        assert_eq!(out.len(), 2);
        let terms: Vec<_> = out.terms().map(|(wd, c)| (wd.clone(), c)).collect();
        assert!(terms.contains(&(w(&f, &[(4, 2)]), 1)));
        assert!(terms.contains(&(w(&f, &[(2, 2), (2, 1)]), 1)));
    }

    #[test]
    fn depth1_q2_squaring() {
        // q=2: (1,1)(1,1) -> [(2;1)]; Delta^1_{1,1} = 0 mod 2
        let e = engine(2, 1);
        let f = e.color_field().clone();
        let out = depth1_product(1, &f.one(), 1, &f.one(), 2, 2).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.terms().next().unwrap().0, &w(&f, &[(2, 1)]));
    }

    #[test]
    fn zeta_relation_q3_depth_one() {
        // zeta(1;xi) zeta(1;lam) = zeta(2;xi lam) + zeta(1,1;xi,lam)
        //                          + zeta(1,1;lam,xi)
        let mut e = engine(3, 2);
        let f = e.color_field().clone();
        let g = crate::gf::canonical_generator(&f);
        let xi = g.pow(2);
        let lam = g.pow(3);
        let a = Word::new(vec![(1, xi.clone())]);
        let b = Word::new(vec![(1, lam.clone())]);
        let rel = zeta_relation(&mut e, &a, &b).unwrap();
        let mut expect = FormalSum::zero();
        expect.add_scaled(Word::new(vec![(2, xi.mul(&lam))]), 1, 3);
        expect.add_scaled(Word::new(vec![(1, xi.clone()), (1, lam.clone())]), 1, 3);
        expect.add_scaled(Word::new(vec![(1, lam), (1, xi)]), 1, 3);
        assert_eq!(rel.rhs, expect);
    }

    #[test]
    fn stuffle_product_is_fixed_degree_at_depth_one() {
        // fixed-degree: S_d(1)S_d(1) = S_d(2) at q=3 (no interleavings)
        let mut e = engine(3, 1);
        let f = e.color_field().clone();
        let a = w(&f, &[(1, 1)]);
        let fs = stuffle_product(&mut e, &a, &a).unwrap();
        assert_eq!(fs.len(), 1);
        assert_eq!(fs.terms().next().unwrap().0, &w(&f, &[(2, 1)]));
    }

    #[test]
    fn fixed_degree_identity_exact() {
        for q in [2u64, 3] {
            let mut e = engine(q, 2);
            let f = e.color_field().clone();
            let g = crate::gf::canonical_generator(&f);
            let (p, eq) = crate::gf::split_prime_power(q).unwrap();
            let base = build_field(p, eq).unwrap();
            let mut ctx = PowerSumCtx::new(base, f.clone()).unwrap();
            let words = [
                Word::new(vec![(1, g.clone())]),
                Word::new(vec![(2, g.pow(2))]),
                Word::new(vec![(1, g.pow(3)), (1, g.clone())]),
            ];
            for a in &words {
                for b in &words {
                    if a.weight() + b.weight() > 4 {
                        continue;
                    }
                    let fs = stuffle_product(&mut e, a, b).unwrap();
                    assert!(check_invariants(a, b, &fs, &f));
                    let fail = verify_stuffle_exact(&mut ctx, a, b, &fs, 3).unwrap();
                    assert_eq!(fail, None, "q={q} a={a:?} b={b:?}");
                }
            }
        }
    }

    #[test]
    fn commutativity() {
        let mut e = engine(3, 2);
        let f = e.color_field().clone();
        let g = crate::gf::canonical_generator(&f);
        let a = Word::new(vec![(1, g.clone()), (2, g.pow(3))]);
        let b = Word::new(vec![(1, g.pow(5))]);
        assert_eq!(e.product_eq(&a, &b).unwrap(), e.product_eq(&b, &a).unwrap());
        assert_eq!(e.product_lt(&a, &b).unwrap(), e.product_lt(&b, &a).unwrap());
    }

    #[test]
    fn associativity_via_exact_evaluation() {
        // (a*b)*c = a*(b*c) as cumulative formal sums, checked exactly by
        // evaluating both flattenings at several degrees
        let mut e = engine(3, 1);
        let f = e.color_field().clone();
        let mut ctx = PowerSumCtx::new(f.clone(), f.clone()).unwrap();
        let a = w(&f, &[(1, 2)]);
        let b = w(&f, &[(1, 1)]);
        let c = w(&f, &[(2, 2)]);
        let ab = e.product_lt(&a, &b).unwrap();
        let bc = e.product_lt(&b, &c).unwrap();
        let mut left = FormalSum::zero();
        for (wv, k) in ab.0.clone() {
            let inner = e.product_lt(&wv, &c).unwrap();
            left.add_all(&inner, k, 3);
        }
        let mut right = FormalSum::zero();
        for (wv, k) in bc.0.clone() {
            let inner = e.product_lt(&a, &wv).unwrap();
            right.add_all(&inner, k, 3);
        }
        for d in 0..=4u32 {
            let evl = eval_fs(&mut ctx, &left, d);
            let evr = eval_fs(&mut ctx, &right, d);
            assert_eq!(evl, evr, "associativity at D = {d}");
        }
    }

    fn eval_fs(ctx: &mut PowerSumCtx, fs: &FormalSum, d: u32) -> RatFuncExt {
        let mut acc = RatFuncExt::zero(ctx.ext_field());
        for (w, c) in fs.terms() {
            let idx = w.to_index().unwrap();
            let v = ctx.lt(d, &idx);
            acc = acc.add(&v.scale(&ctx.ext_field().from_prime(c)));
        }
        acc
    }

    #[test]
    fn verify_relation_soundness_and_completeness_probe() {
        let mut e = engine(3, 1);
        let f = e.color_field().clone();
        let a = w(&f, &[(1, 2)]);
        let b = w(&f, &[(2, 1)]);
        let rel = zeta_relation(&mut e, &a, &b).unwrap();
        let report = verify_relation(&e, &rel, 25, 3).unwrap();
        assert!(report.passed(), "{report:?}");

        // perturb a coefficient: verification must fail with a witness
        let mut bad = rel.clone();
        let first = bad.rhs.terms().next().unwrap().0.clone();
        bad.rhs.add_scaled(first, 1, 3);
        let report = verify_relation(&e, &bad, 25, 3).unwrap();
        assert!(!report.passed());
        assert!(report.first_exact_failure.is_some());
    }

    #[test]
    fn q2_char2_zeta_square() {
        // zeta(1)^2 = zeta(2) at q=2
        let mut e = engine(2, 1);
        let f = e.color_field().clone();
        let a = w(&f, &[(1, 1)]);
        let rel = zeta_relation(&mut e, &a, &a).unwrap();
        // rhs: zeta(2) + 2 zeta(1,1) = zeta(2) mod 2
        assert_eq!(rel.rhs.len(), 1);
        assert_eq!(rel.rhs.terms().next().unwrap().0, &w(&f, &[(2, 1)]));
        let report = verify_relation(&e, &rel, 40, 3).unwrap();
        assert!(report.passed());
    }
}
