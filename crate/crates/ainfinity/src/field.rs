//! Exact scalar arithmetic: arbitrary-precision rationals and prime fields.
//!
//! Every scalar knows which field it lives in, so all arithmetic is exact and
//! no silent coercion between fields can happen. Prime moduli are restricted to
//! `2 <= p < 2^31` so that products of canonical residues fit in `u64`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::fmt;

/// Which exact field scalars are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldSpec {
    /// The rational numbers, arbitrary precision.
    Rationals,
    /// The prime field with `p` elements, `2 <= p < 2^31`.
    Prime(u64),
}

impl FieldSpec {
    /// Validates the spec (primality and range of the modulus).
    pub fn validate(&self) -> Result<(), String> {
        match self {
            FieldSpec::Rationals => Ok(()),
            FieldSpec::Prime(p) => {
                if *p < 2 || *p >= (1 << 31) {
                    return Err(format!("modulus {p} out of range [2, 2^31)"));
                }
                if !is_prime(*p) {
                    return Err(format!("modulus {p} is not prime"));
                }
                Ok(())
            }
        }
    }

    pub fn zero(&self) -> K {
        match self {
            FieldSpec::Rationals => K::Q(BigRational::zero()),
            FieldSpec::Prime(p) => K::Fp { v: 0, p: *p },
        }
    }

    pub fn one(&self) -> K {
        match self {
            FieldSpec::Rationals => K::Q(BigRational::one()),
            FieldSpec::Prime(p) => K::Fp { v: 1 % p, p: *p },
        }
    }

    pub fn from_i64(&self, n: i64) -> K {
        match self {
            FieldSpec::Rationals => K::Q(BigRational::from_integer(BigInt::from(n))),
            FieldSpec::Prime(p) => {
                let m = n.rem_euclid(*p as i64) as u64;
                K::Fp { v: m, p: *p }
            }
        }
    }

    /// Parses a scalar in wire form: `"a"` or `"a/b"` for rationals (lowest
    /// terms enforced on output, any exact form accepted on input), a decimal
    /// residue for prime fields.
    pub fn parse(&self, s: &str) -> Result<K, String> {
        match self {
            FieldSpec::Rationals => {
                let (num, den) = match s.split_once('/') {
                    Some((a, b)) => (a, b),
                    None => (s, "1"),
                };
                let n: BigInt = num
                    .parse()
                    .map_err(|_| format!("bad rational numerator {num:?}"))?;
                let d: BigInt = den
                    .parse()
                    .map_err(|_| format!("bad rational denominator {den:?}"))?;
                if d.is_zero() {
                    return Err(format!("zero denominator in {s:?}"));
                }
                Ok(K::Q(BigRational::new(n, d)))
            }
            FieldSpec::Prime(p) => {
                let v: i64 = s.parse().map_err(|_| format!("bad residue {s:?}"))?;
                Ok(K::Fp {
                    v: v.rem_euclid(*p as i64) as u64,
                    p: *p,
                })
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "q"),
            FieldSpec::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact scalar. Arithmetic between scalars of different fields panics:
/// a single document/session fixes one field for everything it contains, so a
/// mismatch is a programming error rather than a user-input error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum K {
    Q(BigRational),
    Fp { v: u64, p: u64 },
}

impl K {
    pub fn field(&self) -> FieldSpec {
        match self {
            K::Q(_) => FieldSpec::Rationals,
            K::Fp { p, .. } => FieldSpec::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            K::Q(r) => r.is_zero(),
            K::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            K::Q(r) => r.is_one(),
            K::Fp { v, p } => *v == 1 % p,
        }
    }

    pub fn add(&self, rhs: &K) -> K {
        match (self, rhs) {
            (K::Q(a), K::Q(b)) => K::Q(a + b),
            (K::Fp { v: a, p }, K::Fp { v: b, p: q }) => {
                assert_eq!(p, q, "mixed prime fields");
                K::Fp {
                    v: (a + b) % p,
                    p: *p,
                }
            }
            _ => panic!("mixed scalar fields"),
        }
    }

    pub fn sub(&self, rhs: &K) -> K {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> K {
        match self {
            K::Q(a) => K::Q(-a),
            K::Fp { v, p } => K::Fp {
                v: if *v == 0 { 0 } else { p - v },
                p: *p,
            },
        }
    }

    pub fn mul(&self, rhs: &K) -> K {
        match (self, rhs) {
            (K::Q(a), K::Q(b)) => K::Q(a * b),
            (K::Fp { v: a, p }, K::Fp { v: b, p: q }) => {
                assert_eq!(p, q, "mixed prime fields");
                K::Fp {
                    v: (a * b) % p,
                    p: *p,
                }
            }
            _ => panic!("mixed scalar fields"),
        }
    }

    /// Multiplicative inverse. Panics on zero (callers check first).
    pub fn inv(&self) -> K {
        match self {
            K::Q(a) => {
                assert!(!a.is_zero(), "inverse of zero");
                K::Q(a.recip())
            }
            K::Fp { v, p } => {
                assert!(*v != 0, "inverse of zero");
                K::Fp {
                    v: pow_mod(*v, p - 2, *p),
                    p: *p,
                }
            }
        }
    }

    pub fn div(&self, rhs: &K) -> K {
        self.mul(&rhs.inv())
    }

    /// Flips the sign when `sign` is negative; `sign` must be `1` or `-1`.
    pub fn with_sign(&self, sign: i64) -> K {
        match sign {
            1 => self.clone(),
            -1 => self.neg(),
            _ => panic!("sign must be 1 or -1, got {sign}"),
        }
    }

    /// Canonical wire form: `"a"` or `"a/b"` in lowest terms for rationals,
    /// the canonical residue for prime fields.
    pub fn to_wire(&self) -> String {
        match self {
            K::Q(r) => {
                if r.denom().is_one() {
                    r.numer().to_string()
                } else {
                    // BigRational::new reduces and keeps the denominator positive.
                    let s = if (r.numer().is_negative()) != (r.denom().is_negative()) {
                        "-"
                    } else {
                        ""
                    };
                    format!("{s}{}/{}", r.numer().abs(), r.denom().abs())
                }
            }
            K::Fp { v, .. } => v.to_string(),
        }
    }
}

impl fmt::Display for K {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_wire())
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}
