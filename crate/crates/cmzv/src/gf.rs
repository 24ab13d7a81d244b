//! Finite field towers with deterministic construction.
//!
//! Fields are described by a [`FieldSpec`]: a characteristic `p`, an extension
//! degree `e`, and the modulus used for `F_{p^e} = F_p[x]/(modulus)`. The
//! modulus is pinned deterministically: it is the monic irreducible of degree
//! `e` whose coefficient vector, read as the base-`p` integer
//! `sum c_i p^i`, is minimal. Rebuilding a spec therefore always yields
//! bit-identical data, and serialized elements are portable across runs.
//!
//! Elements are coefficient vectors over `F_p`. The module also provides the
//! `q`-power Frobenius and its inverse ([`qtwist`]), subfield embeddings, and
//! the root extraction [`solve_mu`] used to attach the constants `mu_i` to a
//! color `xi`: `mu^{q^r - 1} = xi^r`, found in the smallest field
//! `F_{q^{r m}}` that contains such a root.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{max_field_size, Error, Result};

/// Description of a finite field `F_{p^e}` with a deterministic modulus.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    p: u64,
    e: u32,
    /// Dense monic modulus over `F_p`, ascending degree, length `e + 1`.
    modulus: Arc<Vec<u64>>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{{{}^{}}}", self.p, self.e)
    }
}

impl FieldSpec {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// Field size `p^e`.
    pub fn size(&self) -> u64 {
        self.p.pow(self.e)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// The zero element.
    pub fn zero(&self) -> GFElem {
        GFElem {
            spec: self.clone(),
            coeffs: vec![0; self.e as usize],
        }
    }

    /// The multiplicative identity.
    pub fn one(&self) -> GFElem {
        self.from_int(1)
    }

    /// Element with the given base-`p` integer encoding `sum c_i p^i`.
    pub fn from_int(&self, mut n: u64) -> GFElem {
        let mut coeffs = vec![0; self.e as usize];
        for c in coeffs.iter_mut() {
            *c = n % self.p;
            n /= self.p;
        }
        debug_assert_eq!(n, 0, "encoding out of range");
        GFElem {
            spec: self.clone(),
            coeffs,
        }
    }

    /// Element of the prime field lifted into this field.
    pub fn from_prime(&self, c: u64) -> GFElem {
        self.from_int(c % self.p)
    }

    /// Iterates all field elements in integer-encoding order.
    pub fn elements(&self) -> impl Iterator<Item = GFElem> + '_ {
        (0..self.size()).map(move |n| self.from_int(n))
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits a prime power `q = p^e`, or errors.
pub fn split_prime_power(q: u64) -> Result<(u64, u32)> {
    for p in 2..=q {
        if q % p == 0 {
            if !is_prime(p) {
                return Err(Error::NotPrime(q));
            }
            let mut e = 0;
            let mut m = q;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if m != 1 {
                return Err(Error::NotPrime(q));
            }
            return Ok((p, e));
        }
    }
    Err(Error::NotPrime(q))
}

// ---- dense F_p[x] helpers used only for modulus construction ----

fn poly_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                let c = &mut r[i + j];
                *c = (*c + x * y) % p;
            }
        }
    }
    poly_rem(&mut r, m, p);
    r
}

fn poly_rem(a: &mut Vec<u64>, m: &[u64], p: u64) {
    // m monic
    poly_trim(a);
    while a.len() >= m.len() {
        let c = *a.last().unwrap();
        let k = a.len() - m.len();
        for (i, &y) in m.iter().enumerate() {
            a[i + k] = (a[i + k] + p - (c * y) % p) % p;
        }
        poly_trim(a);
    }
}

fn poly_powmod(mut base: Vec<u64>, mut n: u128, m: &[u64], p: u64) -> Vec<u64> {
    let mut r = vec![1u64];
    while n > 0 {
        if n & 1 == 1 {
            r = poly_mulmod(&r, &base, m, p);
        }
        base = poly_mulmod(&base, &base, m, p);
        n >>= 1;
    }
    r
}

fn poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        // make b monic before reducing
        let lc = *b.last().unwrap();
        if lc != 1 {
            let inv = mod_inv(lc, p);
            for c in b.iter_mut() {
                *c = *c * inv % p;
            }
        }
        poly_rem(&mut a, &b, p);
        std::mem::swap(&mut a, &mut b);
    }
    a
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p prime, a != 0
    mod_pow(a, p - 2, p)
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

/// Irreducibility of a monic degree-`e` polynomial over `F_p`, by the
/// standard test: `x^{p^e} = x (mod f)` and `gcd(x^{p^{e/l}} - x, f) = 1`
/// for each prime divisor `l` of `e`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let e = (f.len() - 1) as u32;
    if e == 0 {
        return false;
    }
    let x = vec![0, 1];
    let xq = poly_powmod(x.clone(), (p as u128).pow(e), f, p);
    let mut diff = xq;
    // subtract x
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    poly_trim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    let mut m = e;
    let mut l = 2;
    let mut primes = Vec::new();
    while m > 1 {
        if m % l == 0 {
            primes.push(l);
            while m % l == 0 {
                m /= l;
            }
        }
        l += 1;
    }
    for l in primes {
        let xk = poly_powmod(vec![0, 1], (p as u128).pow(e / l), f, p);
        let mut diff = xk;
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        poly_trim(&mut diff);
        let g = poly_gcd(diff, f.to_vec(), p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Builds `F_{p^e}` with the deterministic modulus: the monic irreducible of
/// degree `e` minimal in integer encoding. Repeated calls are bit-identical.
pub fn build_field(p: u64, e: u32) -> Result<FieldSpec> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if e == 0 {
        return Err(Error::ZeroDegree);
    }
    let size = (p as u128).pow(e);
    let guard = max_field_size();
    if size > guard as u128 {
        return Err(Error::FieldTooLarge(size, guard));
    }
    if e == 1 {
        // degree-1 convention: modulus x, arithmetic is plain mod p
        return Ok(FieldSpec {
            p,
            e,
            modulus: Arc::new(vec![0, 1]),
        });
    }
    // enumerate lower coefficients in integer order
    for n in 0..p.pow(e) {
        let mut f = Vec::with_capacity(e as usize + 1);
        let mut m = n;
        for _ in 0..e {
            f.push(m % p);
            m /= p;
        }
        f.push(1);
        if is_irreducible(&f, p) {
            return Ok(FieldSpec {
                p,
                e,
                modulus: Arc::new(f),
            });
        }
    }
    unreachable!("an irreducible of every degree exists")
}

/// An element of `F_{p^e}`, as a coefficient vector over `F_p`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GFElem {
    spec: FieldSpec,
    coeffs: Vec<u64>,
}

impl fmt::Debug for GFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gf{:?}", self.coeffs)
    }
}

impl GFElem {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Integer encoding `sum c_i p^i`; inverse of [`FieldSpec::from_int`].
    pub fn encoding(&self) -> u64 {
        let mut n = 0;
        for &c in self.coeffs.iter().rev() {
            n = n * self.spec.p + c;
        }
        n
    }

    fn check_same(&self, other: &GFElem) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch {
                expected: format!("{:?}", self.spec),
                got: format!("{:?}", other.spec),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &GFElem) -> GFElem {
        self.check_same(other).expect("field mismatch in add");
        let p = self.spec.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + b) % p)
            .collect();
        GFElem {
            spec: self.spec.clone(),
            coeffs,
        }
    }

    pub fn sub(&self, other: &GFElem) -> GFElem {
        self.check_same(other).expect("field mismatch in sub");
        let p = self.spec.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + p - b) % p)
            .collect();
        GFElem {
            spec: self.spec.clone(),
            coeffs,
        }
    }

    pub fn neg(&self) -> GFElem {
        let p = self.spec.p;
        GFElem {
            spec: self.spec.clone(),
            coeffs: self.coeffs.iter().map(|&a| (p - a) % p).collect(),
        }
    }

    pub fn mul(&self, other: &GFElem) -> GFElem {
        self.check_same(other).expect("field mismatch in mul");
        let p = self.spec.p;
        let e = self.spec.e as usize;
        let mut prod = vec![0u64; 2 * e];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b != 0 {
                    prod[i + j] = (prod[i + j] + a * b) % p;
                }
            }
        }
        // reduce by the monic modulus
        let m = &self.spec.modulus;
        for k in (e..2 * e).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &y) in m.iter().take(e).enumerate() {
                if y != 0 {
                    let idx = k - e + i;
                    prod[idx] = (prod[idx] + (p - y) * c) % p;
                }
            }
        }
        prod.truncate(e);
        GFElem {
            spec: self.spec.clone(),
            coeffs: prod,
        }
    }

    pub fn pow(&self, mut n: u128) -> GFElem {
        let mut base = self.clone();
        let mut r = self.spec.one();
        while n > 0 {
            if n & 1 == 1 {
                r = r.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        r
    }

    pub fn inv(&self) -> Result<GFElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // x^{p^e - 2}
        Ok(self.pow(self.spec.size() as u128 - 2))
    }

    /// Order in the multiplicative group; zero has no order.
    pub fn mult_order(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.spec.size() - 1;
        let mut ord = n;
        let mut m = n;
        let mut l = 2;
        while m > 1 {
            if m % l == 0 {
                while m % l == 0 {
                    m /= l;
                }
                while ord % l == 0 && self.pow((ord / l) as u128).is_one() {
                    ord /= l;
                }
            }
            l += 1;
        }
        Ok(ord)
    }

    /// `p`-power Frobenius applied `k` times (`k` reduced mod `e`).
    pub fn frobenius(&self, k: u32) -> GFElem {
        let k = k % self.spec.e;
        if k == 0 {
            return self.clone();
        }
        self.pow((self.spec.p as u128).pow(k))
    }
}

/// `x^{q^n}` for `q = p^m` a power of the characteristic; `n` may be
/// negative, using that the Frobenius is invertible on a finite field.
pub fn qtwist(x: &GFElem, q: u64, n: i64) -> Result<GFElem> {
    let (p, m) = split_prime_power(q)?;
    if p != x.spec().p() {
        return Err(Error::NotCharPower(q, x.spec().p()));
    }
    let e = x.spec().e() as i64;
    let steps = ((m as i64 * n) % e + e) % e;
    Ok(x.frobenius(steps as u32))
}

/// A subfield embedding `F_{p^a} -> F_{p^b}` (with `a | b`), realized by the
/// least root of the source modulus in the target field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    source: FieldSpec,
    target: FieldSpec,
    gen_image: GFElem,
}

impl Embedding {
    /// Finds the embedding deterministically (least root in encoding order).
    pub fn new(source: &FieldSpec, target: &FieldSpec) -> Result<Embedding> {
        if source.p() != target.p() || target.e() % source.e() != 0 {
            return Err(Error::SpecMismatch {
                expected: format!("extension of {:?}", source),
                got: format!("{:?}", target),
            });
        }
        if source == target {
            // identity: the generator maps to itself (for e = 1 the modulus
            // is x, whose root is 0)
            let gen_image = if source.e() == 1 {
                target.zero()
            } else {
                target.from_int(source.p())
            };
            return Ok(Embedding {
                source: source.clone(),
                target: target.clone(),
                gen_image,
            });
        }
        for cand in target.elements() {
            if eval_modulus(source, &cand).is_zero() {
                return Ok(Embedding {
                    source: source.clone(),
                    target: target.clone(),
                    gen_image: cand,
                });
            }
        }
        unreachable!("source modulus splits in any extension of its field")
    }

    pub fn source(&self) -> &FieldSpec {
        &self.source
    }

    pub fn target(&self) -> &FieldSpec {
        &self.target
    }

    /// Ring-homomorphic image of `x` in the target field.
    pub fn apply(&self, x: &GFElem) -> Result<GFElem> {
        if x.spec() != &self.source {
            return Err(Error::SpecMismatch {
                expected: format!("{:?}", self.source),
                got: format!("{:?}", x.spec()),
            });
        }
        // Horner in the generator image
        let mut acc = self.target.zero();
        for &c in x.coeffs().iter().rev() {
            acc = acc.mul(&self.gen_image);
            acc = acc.add(&self.target.from_prime(c));
        }
        Ok(acc)
    }
}

fn eval_modulus(source: &FieldSpec, at: &GFElem) -> GFElem {
    let t = at.spec();
    let mut acc = t.zero();
    for &c in source.modulus().iter().rev() {
        acc = acc.mul(at);
        acc = acc.add(&t.from_prime(c));
    }
    acc
}

/// Deterministic multiplicative generator: the least element (in encoding
/// order) of order `p^e - 1`.
pub fn canonical_generator(spec: &FieldSpec) -> GFElem {
    let n = spec.size() - 1;
    if n == 1 {
        return spec.one();
    }
    for x in spec.elements().skip(1) {
        if x.mult_order().unwrap() == n {
            return x;
        }
    }
    unreachable!("the multiplicative group of a finite field is cyclic")
}

/// Discrete log of `x` with respect to `g` by exhaustive scan.
fn discrete_log(g: &GFElem, x: &GFElem) -> Option<u64> {
    let n = g.spec().size() - 1;
    let mut acc = g.spec().one();
    for k in 0..n {
        if &acc == x {
            return Some(k);
        }
        acc = acc.mul(g);
    }
    None
}

/// Solves `mu^{q^r - 1} = xi^r` for `xi` in `F_{q^r}^x`, searching the tower
/// `F_{q^{r m}}`, `m = 1, 2, ...` for the smallest field with a root.
///
/// The root is chosen deterministically: the one with the least discrete log
/// with respect to the canonical generator of the home field. The output
/// satisfies both `mu^{q^r-1} = xi^r` and `mu^{q^{-r}} = xi^{-r} mu`.
pub fn solve_mu(xi: &GFElem, q: u64, r: u32) -> Result<(GFElem, FieldSpec)> {
    if xi.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let (p, eq) = split_prime_power(q)?;
    if p != xi.spec().p() {
        return Err(Error::NotCharPower(q, xi.spec().p()));
    }
    let exp = q.pow(r) - 1; // q^r - 1
    for m in 1..=8u32 {
        let home = match build_field(p, eq * r * m) {
            Ok(h) => h,
            Err(Error::FieldTooLarge(a, b)) => return Err(Error::FieldTooLarge(a, b)),
            Err(e) => return Err(e),
        };
        let emb = Embedding::new(xi.spec(), &home)?;
        let a = emb.apply(xi)?.pow(r as u128); // xi^r in the home field
        let g = canonical_generator(&home);
        let order = home.size() - 1;
        let dl = discrete_log(&g, &a).expect("nonzero element has a log");
        let gcd = gcd_u64(exp % order, order);
        if dl % gcd != 0 {
            continue; // no (q^r-1)-th root of xi^r here, go up the tower
        }
        // solve k * exp = dl (mod order); least nonnegative solution
        let step = order / gcd;
        let mut k0 = None;
        for k in 0..step {
            if (exp as u128 * k as u128) % order as u128 == (dl % order) as u128 {
                k0 = Some(k);
                break;
            }
        }
        // least discrete log among all solutions k0 + t*step is k0 itself
        let k = k0.expect("solvable congruence");
        let mu = g.pow(k as u128);
        debug_assert_eq!(mu.pow(exp as u128), a);
        return Ok((mu, home));
    }
    Err(Error::BudgetExhausted(
        "mu root search exceeded the field-size guard".into(),
    ))
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if a == 0 {
        b
    } else {
        gcd_u64(b % a, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_modulus_is_x() {
        let f2 = build_field(2, 1).unwrap();
        assert_eq!(f2.modulus(), &[0, 1]);
        assert_eq!(f2.size(), 2);
    }

    #[test]
    fn least_irreducible_quadratic_over_f3() {
        // enumeration oracle: x^2+1, x^2+x+2, x^2+2x+2 are the monic
        // irreducible quadratics over F_3; least in encoding order is x^2+1
        let f9 = build_field(3, 2).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn degree_four_over_f2() {
        let f16 = build_field(2, 4).unwrap();
        assert_eq!(f16.modulus(), &[1, 1, 0, 0, 1]);
        // roots generate F_16: x has order dividing 15 and not 1, 3, 5
        let x = f16.from_int(2);
        assert_eq!(x.mult_order().unwrap(), 15);
    }

    #[test]
    fn deterministic_rebuild() {
        let a = build_field(3, 3).unwrap();
        let b = build_field(3, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(build_field(6, 1), Err(Error::NotPrime(6))));
        assert!(matches!(build_field(2, 0), Err(Error::ZeroDegree)));
        assert!(matches!(
            build_field(2, 40),
            Err(Error::FieldTooLarge(_, _))
        ));
    }

    #[test]
    fn frobenius_fixes_every_element_of_small_fields() {
        for (p, e) in [(2, 1), (2, 4), (3, 2), (5, 2)] {
            let f = build_field(p, e).unwrap();
            for x in f.elements() {
                assert_eq!(x.frobenius(e), x, "x^{{p^e}} = x in F_{{{p}^{e}}}");
                if !x.is_zero() {
                    assert!(x.pow(f.size() as u128 - 1).is_one());
                }
            }
        }
    }

    #[test]
    fn qtwist_fixes_fq_and_inverts() {
        let f9 = build_field(3, 2).unwrap();
        for x in f9.elements() {
            // F_9 is fixed by the 9-power map
            assert_eq!(qtwist(&x, 9, 1).unwrap(), x);
            let up = qtwist(&x, 3, 1).unwrap();
            assert_eq!(qtwist(&up, 3, -1).unwrap(), x);
        }
        let g = canonical_generator(&f9);
        assert_eq!(qtwist(&g, 3, 1).unwrap(), g.pow(3));
    }

    #[test]
    fn qtwist_is_a_field_automorphism() {
        let f16 = build_field(2, 4).unwrap();
        for a in f16.elements().step_by(3) {
            for b in f16.elements().step_by(5) {
                let t = |x: &GFElem| qtwist(x, 4, 1).unwrap();
                assert_eq!(t(&a.mul(&b)), t(&a).mul(&t(&b)));
                assert_eq!(t(&a.add(&b)), t(&a).add(&t(&b)));
            }
        }
    }

    #[test]
    fn canonical_generators() {
        let f2 = build_field(2, 1).unwrap();
        assert!(canonical_generator(&f2).is_one());
        let f3 = build_field(3, 1).unwrap();
        assert_eq!(canonical_generator(&f3).encoding(), 2);
        let f9 = build_field(3, 2).unwrap();
        let g = canonical_generator(&f9);
        assert_eq!(g.mult_order().unwrap(), 8);
        assert_eq!(g.encoding(), 4); // 1 + x
    }

    #[test]
    fn embedding_is_ring_hom() {
        let f3 = build_field(3, 1).unwrap();
        let f9 = build_field(3, 2).unwrap();
        let emb = Embedding::new(&f3, &f9).unwrap();
        assert!(emb.apply(&f3.zero()).unwrap().is_zero());
        assert!(emb.apply(&f3.one()).unwrap().is_one());
        let g3 = canonical_generator(&f3);
        let img = emb.apply(&g3).unwrap();
        assert_eq!(img.mult_order().unwrap(), 2);
        for a in f3.elements() {
            for b in f3.elements() {
                assert_eq!(
                    emb.apply(&a.mul(&b)).unwrap(),
                    emb.apply(&a).unwrap().mul(&emb.apply(&b).unwrap())
                );
                assert_eq!(
                    emb.apply(&a.add(&b)).unwrap(),
                    emb.apply(&a).unwrap().add(&emb.apply(&b).unwrap())
                );
            }
        }
    }

    #[test]
    fn embedding_commutes_with_qtwist() {
        let f4 = build_field(2, 2).unwrap();
        let f16 = build_field(2, 4).unwrap();
        let emb = Embedding::new(&f4, &f16).unwrap();
        for x in f4.elements() {
            let a = emb.apply(&qtwist(&x, 2, 1).unwrap()).unwrap();
            let b = qtwist(&emb.apply(&x).unwrap(), 2, 1).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn mu_for_trivial_color_is_root_of_unity() {
        let f3 = build_field(3, 1).unwrap();
        let (mu, home) = solve_mu(&f3.one(), 3, 1).unwrap();
        assert_eq!(home, f3);
        assert!(mu.pow(2).is_one());
        assert!(mu.is_one(), "least-log root of 1 is 1");
    }

    #[test]
    fn mu_for_minus_one_lives_in_f9() {
        // q=3, r=1, xi=-1: mu^2 = -1 has no solution in F_3, lives in F_9
        let f3 = build_field(3, 1).unwrap();
        let xi = f3.from_int(2);
        let (mu, home) = solve_mu(&xi, 3, 1).unwrap();
        assert_eq!(home, build_field(3, 2).unwrap());
        let emb = Embedding::new(&f3, &home).unwrap();
        assert_eq!(mu.mul(&mu), emb.apply(&xi).unwrap());
        // exhaustive: the two square roots of -1 are g^2 and g^6; least log wins
        let g = canonical_generator(&home);
        assert_eq!(mu, g.pow(2));
    }

    #[test]
    fn mu_twist_identity() {
        // mu^{q^{-r}} = xi^{-r} mu for a few colors
        for (q, r, code) in [(3u64, 1u32, 2u64), (2, 2, 2), (3, 2, 4)] {
            let (p, eq) = split_prime_power(q).unwrap();
            let fqr = build_field(p, eq * r).unwrap();
            let xi = fqr.from_int(code);
            let (mu, home) = solve_mu(&xi, q, r).unwrap();
            let emb = Embedding::new(&fqr, &home).unwrap();
            let xi_h = emb.apply(&xi).unwrap();
            let lhs = qtwist(&mu, q, -(r as i64)).unwrap();
            let rhs = xi_h.pow(r as u128).inv().unwrap().mul(&mu);
            assert_eq!(lhs, rhs);
            // defining property
            assert_eq!(mu.pow(q.pow(r) as u128 - 1), xi_h.pow(r as u128));
        }
    }
}
