use serde::{Deserialize, Serialize};

use super::RingError;

/// Largest supported modulus. Products of two residues must fit in a `u64`.
pub const MAX_MODULUS: u64 = (1 << 31) - 1;

/// A prime power `p^k` appearing in the factorization of a modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimePower {
    pub p: u64,
    pub k: u32,
}

impl PrimePower {
    pub fn new(p: u64, k: u32) -> Self {
        PrimePower { p, k }
    }

    /// The modulus `p^k`.
    pub fn value(&self) -> u64 {
        self.p.pow(self.k)
    }

    pub fn ring(&self) -> RingSpec {
        RingSpec {
            d: self.value(),
            factors: vec![*self],
        }
    }

    /// p-adic valuation of `x` as an element of `Z_{p^k}`; zero has valuation `k`.
    pub fn valuation(&self, x: u64) -> u32 {
        let x = x % self.value();
        if x == 0 {
            return self.k;
        }
        let mut v = 0;
        let mut y = x;
        while y.is_multiple_of(self.p) {
            y /= self.p;
            v += 1;
        }
        v
    }

    pub fn is_unit(&self, x: u64) -> bool {
        !x.is_multiple_of(self.p)
    }
}

impl std::fmt::Display for PrimePower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// The ring `Z_d` together with the prime-power factorization of `d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingSpec {
    d: u64,
    factors: Vec<PrimePower>,
}

impl RingSpec {
    pub fn new(d: u64) -> Result<Self, RingError> {
        if !(2..=MAX_MODULUS).contains(&d) {
            return Err(RingError::InvalidModulus(d));
        }
        Ok(RingSpec {
            d,
            factors: factorize(d),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.d
    }

    pub fn factors(&self) -> &[PrimePower] {
        &self.factors
    }

    pub fn is_local(&self) -> bool {
        self.factors.len() == 1
    }

    /// The factor with the given prime-power value, if it divides `d` exactly.
    pub fn factor(&self, value: u64) -> Option<PrimePower> {
        self.factors.iter().copied().find(|f| f.value() == value)
    }

    pub fn reduce(&self, x: i64) -> u64 {
        x.rem_euclid(self.d as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.d
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.d - b % self.d) % self.d
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.d
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.d - a % self.d) % self.d
    }

    pub fn is_unit(&self, x: u64) -> bool {
        gcd(x % self.d, self.d) == 1
    }

    pub fn inverse(&self, x: u64) -> Result<u64, RingError> {
        mod_inverse(x, self.d)
    }

    /// Components of `x` modulo each prime-power factor, in factor order.
    pub fn crt_split(&self, x: u64) -> Vec<u64> {
        self.factors.iter().map(|f| x % f.value()).collect()
    }

    /// Inverse of [`RingSpec::crt_split`].
    pub fn crt_join(&self, parts: &[u64]) -> u64 {
        assert_eq!(parts.len(), self.factors.len(), "one residue per factor");
        let mut acc = 0u64;
        for (f, &r) in self.factors.iter().zip(parts) {
            let q = f.value();
            let rest = self.d / q;
            // rest * (rest^{-1} mod q) is 1 mod q and 0 mod every other factor.
            let inv = mod_inverse(rest % q, q).expect("coprime factors");
            let idem = (rest % self.d) * inv % self.d;
            acc = (acc + idem * (r % q)) % self.d;
        }
        acc
    }

    /// Lift a residue mod the factor `f` to `Z_d`, zero in every other factor.
    pub fn lift_from_factor(&self, f: PrimePower, r: u64) -> u64 {
        let parts: Vec<u64> = self
            .factors
            .iter()
            .map(|g| if *g == f { r } else { 0 })
            .collect();
        self.crt_join(&parts)
    }

    /// A unit `u` with `u * x == gcd(x, d) (mod d)`.
    pub fn unit_normalizer(&self, x: u64) -> u64 {
        unit_normalizer(x, self.d)
    }
}

impl Serialize for RingSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.d)
    }
}

impl<'de> Deserialize<'de> for RingSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let d = u64::deserialize(de)?;
        RingSpec::new(d).map_err(serde::de::Error::custom)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended Euclid on signed integers: returns `(g, s, t)` with `s*a + t*b = g >= 0`.
pub fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn mod_inverse(x: u64, d: u64) -> Result<u64, RingError> {
    let x = x % d;
    let (g, s, _) = xgcd(x as i64, d as i64);
    if g != 1 {
        return Err(RingError::NotAUnit {
            value: x,
            modulus: d,
        });
    }
    Ok(s.rem_euclid(d as i64) as u64)
}

pub(crate) fn unit_normalizer(x: u64, d: u64) -> u64 {
    let x = x % d;
    if x == 0 {
        return 1;
    }
    let g = gcd(x, d);
    let reduced = d / g;
    if reduced == 1 {
        return 1;
    }
    let base = mod_inverse((x / g) % reduced, reduced).expect("x/g is a unit mod d/g");
    let mut u = base;
    while gcd(u, d) != 1 {
        u += reduced;
    }
    u % d
}

fn factorize(mut d: u64) -> Vec<PrimePower> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= d {
        if d.is_multiple_of(p) {
            let mut k = 0;
            while d.is_multiple_of(p) {
                d /= p;
                k += 1;
            }
            out.push(PrimePower::new(p, k));
        }
        p += 1;
    }
    if d > 1 {
        out.push(PrimePower::new(d, 1));
    }
    out
}
