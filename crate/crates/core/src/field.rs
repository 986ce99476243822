//! Exact scalar arithmetic over the two coefficient domains used everywhere
//! else: prime fields F_p (machine words, modulus below 2^31 so products fit
//! in a u64) and arbitrary-precision rationals.
//!
//! Scalars are kept in canonical form at all times — prime-field values as
//! their least nonnegative residue, rationals fully reduced with positive
//! denominator — so `==` is mathematical equality and `Ord` gives a stable
//! sort order for set building and report output.

use std::cmp::Ordering;
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Zero};
use thiserror::Error;

/// Largest admissible prime modulus (exclusive).  With p < 2^31 the product
/// of two residues stays below 2^62 and never overflows u64.
pub const MAX_MODULUS: u64 = 1 << 31;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} out of range (need 2 <= p < 2^31)")]
    ModulusRange(u64),
    #[error("division by zero")]
    DivisionByZero,
}

/// Identifies a coefficient field: F_p for a checked prime p, or Q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldDescriptor(Repr);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Prime(u64),
    Rational,
}

impl FieldDescriptor {
    /// The rational field Q.
    pub const RATIONAL: FieldDescriptor = FieldDescriptor(Repr::Rational);

    /// The prime field F_p.  The modulus is validated eagerly by trial
    /// division; composite or out-of-range moduli are rejected.
    pub fn prime(p: u64) -> Result<FieldDescriptor, FieldError> {
        if !(2..MAX_MODULUS).contains(&p) {
            return Err(FieldError::ModulusRange(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(FieldDescriptor(Repr::Prime(p)))
    }

    /// 0 for Q, p for F_p.
    pub fn characteristic(&self) -> u64 {
        match self.0 {
            Repr::Prime(p) => p,
            Repr::Rational => 0,
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match self.0 {
            Repr::Prime(p) => Some(p),
            Repr::Rational => None,
        }
    }

    pub fn is_prime_field(&self) -> bool {
        matches!(self.0, Repr::Prime(_))
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero(self)
    }

    pub fn one(&self) -> Scalar {
        Scalar::one(self)
    }

    /// Number of field elements; `None` for Q.
    pub fn order(&self) -> Option<u64> {
        self.modulus()
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Repr::Prime(p) => write!(f, "F_{p}"),
            Repr::Rational => write!(f, "Q"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// An exact field element.
///
/// Invariants: `Mod { modulus, value }` has prime `modulus < 2^31` and
/// `value < modulus`; `Rational` values are reduced with positive denominator
/// (maintained by [`BigRational`] itself).  Arithmetic between scalars of
/// different fields is a programming error and panics.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Mod { modulus: u64, value: u64 },
    Rational(BigRational),
}

impl Scalar {
    pub fn zero(field: &FieldDescriptor) -> Scalar {
        Scalar::from_int(field, 0)
    }

    pub fn one(field: &FieldDescriptor) -> Scalar {
        Scalar::from_int(field, 1)
    }

    /// Embeds an integer, reducing mod p in the prime-field case.
    pub fn from_int(field: &FieldDescriptor, n: i64) -> Scalar {
        match field.0 {
            Repr::Prime(p) => Scalar::Mod {
                modulus: p,
                value: n.rem_euclid(p as i64) as u64,
            },
            Repr::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
        }
    }

    /// The rational n/d in canonical (reduced, positive-denominator) form.
    /// Panics when d = 0.
    pub fn ratio(n: i64, d: i64) -> Scalar {
        assert!(d != 0, "zero denominator");
        Scalar::Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        match self {
            Scalar::Mod { modulus, .. } => FieldDescriptor(Repr::Prime(*modulus)),
            Scalar::Rational(_) => FieldDescriptor::RATIONAL,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 0,
            Scalar::Rational(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 1,
            Scalar::Rational(q) => q.is_one(),
        }
    }

    /// Multiplicative inverse; `DivisionByZero` on 0.
    pub fn inv(&self) -> Result<Scalar, FieldError> {
        match self {
            Scalar::Mod { modulus, value } => {
                if *value == 0 {
                    return Err(FieldError::DivisionByZero);
                }
                Ok(Scalar::Mod {
                    modulus: *modulus,
                    value: mod_inverse(*value, *modulus),
                })
            }
            Scalar::Rational(q) => {
                if q.is_zero() {
                    return Err(FieldError::DivisionByZero);
                }
                Ok(Scalar::Rational(q.recip()))
            }
        }
    }

    /// a^e by binary exponentiation, with the convention 0^0 = 1.
    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one(&self.descriptor());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn same_field(&self, other: &Scalar) -> u64 {
        match (self, other) {
            (Scalar::Mod { modulus: p, .. }, Scalar::Mod { modulus: q, .. }) if p == q => *p,
            (Scalar::Rational(_), Scalar::Rational(_)) => 0,
            _ => panic!(
                "cannot combine scalars from different fields ({} vs {})",
                self.descriptor(),
                other.descriptor()
            ),
        }
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Extended Euclid on (a, p); p prime and a nonzero mod p.
    let (mut r0, mut r1) = (a as i64, p as i64);
    let (mut t0, mut t1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "{a} not invertible mod {p}");
    t0.rem_euclid(p as i64) as u64
}

impl std::ops::Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let p = self.same_field(rhs);
        match (self, rhs) {
            (Scalar::Mod { value: a, .. }, Scalar::Mod { value: b, .. }) => {
                let mut v = a + b;
                if v >= p {
                    v -= p;
                }
                Scalar::Mod { modulus: p, value: v }
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            _ => unreachable!(),
        }
    }
}

impl std::ops::Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let p = self.same_field(rhs);
        match (self, rhs) {
            (Scalar::Mod { value: a, .. }, Scalar::Mod { value: b, .. }) => {
                let v = if a >= b { a - b } else { a + p - b };
                Scalar::Mod { modulus: p, value: v }
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            _ => unreachable!(),
        }
    }
}

impl std::ops::Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let p = self.same_field(rhs);
        match (self, rhs) {
            (Scalar::Mod { value: a, .. }, Scalar::Mod { value: b, .. }) => Scalar::Mod {
                modulus: p,
                value: a * b % p,
            },
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            _ => unreachable!(),
        }
    }
}

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Mod { modulus, value } => Scalar::Mod {
                modulus: *modulus,
                value: if *value == 0 { 0 } else { modulus - value },
            },
            Scalar::Rational(q) => Scalar::Rational(-q),
        }
    }
}

impl std::ops::Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl std::ops::Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl std::ops::Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

// Scalars from different fields never coexist in one collection in practice;
// the cross-kind ordering (prime fields before Q, then by modulus) just keeps
// Ord total.
impl Ord for Scalar {
    fn cmp(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (
                Scalar::Mod { modulus: p, value: a },
                Scalar::Mod { modulus: q, value: b },
            ) => p.cmp(q).then(a.cmp(b)),
            (Scalar::Rational(a), Scalar::Rational(b)) => a.cmp(b),
            (Scalar::Mod { .. }, Scalar::Rational(_)) => Ordering::Less,
            (Scalar::Rational(_), Scalar::Mod { .. }) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Scalar) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod { value, .. } => write!(f, "{value}"),
            Scalar::Rational(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fp(p: u64) -> FieldDescriptor {
        FieldDescriptor::prime(p).unwrap()
    }

    fn s(field: &FieldDescriptor, n: i64) -> Scalar {
        Scalar::from_int(field, n)
    }

    #[test]
    fn modulus_validation() {
        assert!(FieldDescriptor::prime(2).is_ok());
        assert!(FieldDescriptor::prime(3).is_ok());
        assert!(FieldDescriptor::prime(2147483629).is_ok()); // largest prime < 2^31
        assert_eq!(FieldDescriptor::prime(1), Err(FieldError::ModulusRange(1)));
        assert_eq!(FieldDescriptor::prime(0), Err(FieldError::ModulusRange(0)));
        assert_eq!(
            FieldDescriptor::prime(1 << 31),
            Err(FieldError::ModulusRange(1 << 31))
        );
        assert_eq!(FieldDescriptor::prime(4), Err(FieldError::NotPrime(4)));
        assert_eq!(FieldDescriptor::prime(6), Err(FieldError::NotPrime(6)));
        assert_eq!(FieldDescriptor::prime(91), Err(FieldError::NotPrime(91))); // 7*13
    }

    #[test]
    fn characteristic_and_display() {
        assert_eq!(fp(5).characteristic(), 5);
        assert_eq!(FieldDescriptor::RATIONAL.characteristic(), 0);
        assert_eq!(fp(7).to_string(), "F_7");
        assert_eq!(FieldDescriptor::RATIONAL.to_string(), "Q");
    }

    #[test]
    fn prime_field_hand_values() {
        let f5 = fp(5);
        assert_eq!(&s(&f5, 3) + &s(&f5, 4), s(&f5, 2));
        assert_eq!(&s(&f5, 3) * &s(&f5, 4), s(&f5, 2));
        assert_eq!(&s(&f5, 0) - &s(&f5, 1), s(&f5, 4));
        assert_eq!(s(&f5, 2).inv().unwrap(), s(&f5, 3));
        assert_eq!(s(&f5, 4).inv().unwrap(), s(&f5, 4));
        let f2 = fp(2);
        assert_eq!(&s(&f2, 1) + &s(&f2, 1), s(&f2, 0));
        assert_eq!(-&s(&f2, 1), s(&f2, 1));
    }

    #[test]
    fn rational_canonical_forms() {
        let q = FieldDescriptor::RATIONAL;
        let half = Scalar::ratio(1, 2);
        assert_eq!(&half * &Scalar::ratio(2, 3), Scalar::ratio(1, 3));
        assert_eq!(Scalar::ratio(2, 4), half);
        assert_eq!(Scalar::ratio(-1, -2), half);
        // inverse of -3/7 is -7/3, with the sign on the numerator
        let inv = Scalar::ratio(-3, 7).inv().unwrap();
        assert_eq!(inv, Scalar::ratio(-7, 3));
        match &inv {
            Scalar::Rational(r) => {
                assert_eq!(r.numer(), &BigInt::from(-7));
                assert_eq!(r.denom(), &BigInt::from(3));
            }
            _ => unreachable!(),
        }
        assert_eq!(inv.to_string(), "-7/3");
        assert_eq!(s(&q, -4).to_string(), "-4");
        assert!((&half - &half).is_zero());
    }

    #[test]
    fn from_int_reduces() {
        assert_eq!(s(&fp(3), 7), s(&fp(3), 1));
        assert_eq!(s(&fp(2), 2), s(&fp(2), 0));
        assert_eq!(s(&fp(5), -1), s(&fp(5), 4));
        assert_eq!(s(&fp(5), -13), s(&fp(5), 2));
    }

    #[test]
    fn inverse_matches_fermat() {
        for p in [2u64, 3, 5, 7, 11, 31, 101] {
            let f = fp(p);
            for a in 1..p {
                let x = s(&f, a as i64);
                let inv = x.inv().unwrap();
                assert_eq!(inv, x.pow(p - 2), "inv mismatch for {a} mod {p}");
                assert!((&x * &inv).is_one());
            }
        }
    }

    #[test]
    fn division_by_zero_rejected() {
        assert_eq!(
            Scalar::zero(&fp(5)).inv(),
            Err(FieldError::DivisionByZero)
        );
        assert_eq!(
            Scalar::zero(&FieldDescriptor::RATIONAL).inv(),
            Err(FieldError::DivisionByZero)
        );
    }

    #[test]
    #[should_panic(expected = "different fields")]
    fn mixed_field_arithmetic_panics() {
        let _ = &s(&fp(2), 1) + &s(&fp(3), 1);
    }

    #[test]
    fn pow_conventions() {
        let f5 = fp(5);
        assert!(s(&f5, 0).pow(0).is_one());
        assert!(s(&f5, 3).pow(0).is_one());
        assert_eq!(s(&f5, 2).pow(10), s(&f5, 4)); // 1024 = 4 mod 5
        assert_eq!(Scalar::ratio(2, 3).pow(3), Scalar::ratio(8, 27));
    }

    fn check_axioms(a: &Scalar, b: &Scalar, c: &Scalar) {
        let zero = Scalar::zero(&a.descriptor());
        let one = Scalar::one(&a.descriptor());
        assert_eq!(&(a + b) + c, a + &(b + c));
        assert_eq!(a + b, b + a);
        assert_eq!(&(a * b) * c, a * &(b * c));
        assert_eq!(a * b, b * a);
        assert_eq!(a * &(b + c), &(a * b) + &(a * c));
        assert_eq!(a + &zero, a.clone());
        assert_eq!(a * &one, a.clone());
        assert!((a + &-a).is_zero());
        if !a.is_zero() {
            assert!((a * &a.inv().unwrap()).is_one());
        }
        // canonical-form equality agrees with subtraction
        assert_eq!(a == b, (a - b).is_zero());
    }

    #[test]
    fn axioms_exhaustive_small_fields() {
        for p in [2u64, 3, 5] {
            let f = fp(p);
            for a in 0..p {
                for b in 0..p {
                    for c in 0..p {
                        check_axioms(&s(&f, a as i64), &s(&f, b as i64), &s(&f, c as i64));
                    }
                }
            }
        }
    }

    fn arb_scalar(field: FieldDescriptor) -> BoxedStrategy<Scalar> {
        match field.modulus() {
            Some(p) => (0..p as i64).prop_map(move |v| s(&field, v)).boxed(),
            None => (-1000i64..1000, 1i64..1000)
                .prop_map(|(n, d)| Scalar::ratio(n, d))
                .boxed(),
        }
    }

    fn arb_triple() -> impl Strategy<Value = (Scalar, Scalar, Scalar)> {
        prop_oneof![
            Just(fp(2)),
            Just(fp(3)),
            Just(fp(5)),
            Just(fp(101)),
            Just(FieldDescriptor::RATIONAL),
        ]
        .prop_flat_map(|f| (arb_scalar(f), arb_scalar(f), arb_scalar(f)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50_000))]
        #[test]
        fn axioms_random_triples((a, b, c) in arb_triple()) {
            check_axioms(&a, &b, &c);
        }
    }
}
