//! Exact arithmetic in the binary fields GF(2^n) and in odd prime fields F_p.
//!
//! Field elements of GF(2^n) are bit-vectors of polynomial coefficients packed
//! into a `u32`; the integer value of the bit-vector is the canonical element
//! ordering used everywhere else in this crate (vertex coordinates, witness
//! ordering, table indexing). Prime-field support is limited to what the
//! Cayley construction needs: residue arithmetic and quadratic-residue tests.

use thiserror::Error;

/// Largest supported extension degree. Crookedness certification costs grow
/// like 2^(3n), so degrees past 13 are not desk-scale.
pub const MAX_DEGREE: u32 = 13;

/// Version of the pinned modulus table below.
pub const MODULUS_TABLE_VERSION: u32 = 1;

/// Pinned modulus per degree n (index n-1): the lexicographically least
/// irreducible polynomial of degree n over GF(2), encoded with bit i holding
/// the coefficient of x^i. Every `FieldCtx` re-verifies irreducibility of its
/// entry at construction, so a corrupted table cannot go unnoticed.
const MODULI: [u32; MAX_DEGREE as usize] = [
    0b10,              // x
    0b111,             // x^2 + x + 1
    0b1011,            // x^3 + x + 1
    0b10011,           // x^4 + x + 1
    0b100101,          // x^5 + x^2 + 1
    0b1000011,         // x^6 + x + 1
    0b10000011,        // x^7 + x + 1
    0b100011011,       // x^8 + x^4 + x^3 + x + 1
    0b1000000011,      // x^9 + x + 1
    0b10000001001,     // x^10 + x^3 + 1
    0b100000000101,    // x^11 + x^2 + 1
    0b1000000001001,   // x^12 + x^3 + 1
    0b10000000011011,  // x^13 + x^4 + x^3 + x + 1
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("extension degree {0} out of range (expected 1..={MAX_DEGREE})")]
    DegreeOutOfRange(u32),
    #[error("element bits {value:#x} do not fit in {n} bits")]
    ElementOutOfRange { value: u32, n: u32 },
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
}

/// An element of GF(2^n): coefficient bits of a polynomial of degree < n.
///
/// Addition is coefficient-wise XOR and needs no field context; products and
/// powers are taken through [`FieldCtx`]. `Ord` is the canonical integer
/// ordering of the bit-vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Gf2Elem(u32);

impl Gf2Elem {
    pub const ZERO: Gf2Elem = Gf2Elem(0);
    pub const ONE: Gf2Elem = Gf2Elem(1);

    /// The packed coefficient bits (also the canonical integer index).
    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::ops::Add for Gf2Elem {
    type Output = Gf2Elem;
    /// Characteristic-2 addition: coefficient-wise XOR.
    #[inline]
    fn add(self, rhs: Gf2Elem) -> Gf2Elem {
        Gf2Elem(self.0 ^ rhs.0)
    }
}

impl std::fmt::Display for Gf2Elem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Arithmetic context for GF(2^n): the extension degree and the pinned
/// irreducible modulus. Immutable after construction; all operations are pure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCtx {
    n: u32,
    modulus: u32,
}

impl FieldCtx {
    /// Builds the context for GF(2^n), 1 <= n <= 13.
    ///
    /// The pinned modulus is re-checked for irreducibility by exhaustive trial
    /// division (no factor of degree <= n/2) on every construction.
    pub fn new(n: u32) -> Result<FieldCtx, FieldError> {
        if n < 1 || n > MAX_DEGREE {
            return Err(FieldError::DegreeOutOfRange(n));
        }
        let modulus = MODULI[(n - 1) as usize];
        assert_eq!(
            32 - modulus.leading_zeros() - 1,
            n,
            "pinned modulus for degree {n} has the wrong degree"
        );
        assert!(
            poly_is_irreducible(modulus as u64),
            "pinned modulus {modulus:#b} for degree {n} is reducible"
        );
        Ok(FieldCtx { n, modulus })
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Field size q = 2^n.
    #[inline]
    pub fn order(&self) -> usize {
        1usize << self.n
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Wraps raw bits as an element, rejecting bits at position n or above.
    pub fn elem(&self, bits: u32) -> Result<Gf2Elem, FieldError> {
        if bits >> self.n != 0 {
            return Err(FieldError::ElementOutOfRange { value: bits, n: self.n });
        }
        Ok(Gf2Elem(bits))
    }

    /// All field elements in canonical integer order.
    pub fn elements(&self) -> impl Iterator<Item = Gf2Elem> {
        (0..self.order() as u32).map(Gf2Elem)
    }

    /// Carryless polynomial product reduced modulo the field modulus.
    pub fn mul(&self, a: Gf2Elem, b: Gf2Elem) -> Gf2Elem {
        debug_assert!(a.0 >> self.n == 0 && b.0 >> self.n == 0);
        let top = 1u32 << self.n;
        let mut acc = 0u32;
        let mut a = a.0;
        let mut b = b.0;
        while b != 0 {
            if b & 1 != 0 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.modulus;
            }
        }
        Gf2Elem(acc)
    }

    /// Square-and-multiply exponentiation; `pow(a, 0)` is one for every a.
    pub fn pow(&self, a: Gf2Elem, e: u64) -> Gf2Elem {
        let mut base = a;
        let mut e = e;
        let mut acc = Gf2Elem::ONE;
        while e != 0 {
            if e & 1 != 0 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

/// Remainder of GF(2)[x] division, operating on packed coefficient bits.
fn poly_rem(mut a: u64, b: u64) -> u64 {
    debug_assert!(b != 0);
    let db = 63 - b.leading_zeros();
    while a != 0 {
        let da = 63 - a.leading_zeros();
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Exhaustive trial-division irreducibility test over GF(2): a polynomial of
/// degree n is irreducible iff no polynomial of degree 1..=n/2 divides it.
fn poly_is_irreducible(m: u64) -> bool {
    let deg = 63 - m.leading_zeros();
    if deg < 1 {
        return false;
    }
    for d in 1..=deg / 2 {
        for f in (1u64 << d)..(1u64 << (d + 1)) {
            if poly_rem(m, f) == 0 {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Odd prime fields
// ---------------------------------------------------------------------------

/// Deterministic trial-division primality test; ample for desk-scale moduli.
pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A residue in F_p for an odd prime p. Carries its modulus so mixed-modulus
/// arithmetic is caught immediately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeFieldElem {
    value: u64,
    p: u64,
}

impl PrimeFieldElem {
    /// Reduces `value` into [0, p), accepting negative representatives.
    pub fn new(value: i64, p: u64) -> Result<PrimeFieldElem, FieldError> {
        if !is_odd_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        Ok(PrimeFieldElem { value: value.rem_euclid(p as i64) as u64, p })
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn add(self, rhs: PrimeFieldElem) -> PrimeFieldElem {
        assert_eq!(self.p, rhs.p, "mixed prime-field moduli");
        PrimeFieldElem { value: (self.value + rhs.value) % self.p, p: self.p }
    }

    pub fn sub(self, rhs: PrimeFieldElem) -> PrimeFieldElem {
        assert_eq!(self.p, rhs.p, "mixed prime-field moduli");
        PrimeFieldElem { value: (self.value + self.p - rhs.value) % self.p, p: self.p }
    }

    pub fn mul(self, rhs: PrimeFieldElem) -> PrimeFieldElem {
        assert_eq!(self.p, rhs.p, "mixed prime-field moduli");
        let v = (self.value as u128 * rhs.value as u128) % self.p as u128;
        PrimeFieldElem { value: v as u64, p: self.p }
    }

    pub fn neg(self) -> PrimeFieldElem {
        PrimeFieldElem { value: (self.p - self.value) % self.p, p: self.p }
    }

    pub fn square(self) -> PrimeFieldElem {
        self.mul(self)
    }

    pub fn pow(self, mut e: u64) -> PrimeFieldElem {
        let mut base = self;
        let mut acc = PrimeFieldElem { value: 1 % self.p, p: self.p };
        while e != 0 {
            if e & 1 != 0 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        acc
    }
}

/// The Legendre symbol (a | p) in {-1, 0, +1}, by Euler's criterion
/// a^((p-1)/2) mod p. Errors unless p is an odd prime.
pub fn legendre(a: i64, p: u64) -> Result<i32, FieldError> {
    let a = PrimeFieldElem::new(a, p)?;
    if a.value() == 0 {
        return Ok(0);
    }
    let r = a.pow((p - 1) / 2).value();
    Ok(if r == 1 { 1 } else { -1 })
}
