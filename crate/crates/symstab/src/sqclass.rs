//! Local fields at the level of square classes.
//!
//! A [`SquareClass`] is an element of `F^x / (F^x)^2` for `F` either the real
//! numbers or a p-adic field `Q_p`. The group has order 2 over the reals, 4 over
//! `Q_p` for odd `p` and 8 over `Q_2`. Hilbert symbols are computed with the
//! classical closed formulas; the search-based checker in [`crate::oracle`]
//! validates them independently.

use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A prime number, checked at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    /// Returns `Prime(p)` if `p` is prime.
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    /// The underlying integer.
    pub fn get(self) -> u64 {
        self.0
    }
}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A local field of characteristic zero supported by the library.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalField {
    /// The real numbers.
    Real,
    /// The p-adic numbers `Q_p`.
    Padic(Prime),
}

impl LocalField {
    /// `Q_p`, failing when `p` is not prime.
    pub fn padic(p: u64) -> Result<Self> {
        Ok(LocalField::Padic(Prime::new(p)?))
    }

    /// The residue characteristic, or `None` for the reals.
    pub fn prime(&self) -> Option<u64> {
        match self {
            LocalField::Real => None,
            LocalField::Padic(p) => Some(p.get()),
        }
    }

    /// True for the reals.
    pub fn is_archimedean(&self) -> bool {
        matches!(self, LocalField::Real)
    }

    /// True for `Q_p` with `p` odd.
    pub fn has_odd_residual_characteristic(&self) -> bool {
        matches!(self.prime(), Some(p) if p != 2)
    }

    /// Order of the square-class group `F^x / (F^x)^2`.
    pub fn class_group_order(&self) -> usize {
        match self.prime() {
            None => 2,
            Some(2) => 8,
            Some(_) => 4,
        }
    }

    /// The fixed unit nonresidue `u` (smallest positive quadratic nonresidue mod `p`)
    /// for odd `p`.
    pub fn nonresidue(&self) -> Option<u64> {
        match self.prime() {
            Some(p) if p != 2 => (2..p).find(|&a| legendre(a, p) == -1),
            _ => None,
        }
    }
}

impl fmt::Display for LocalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalField::Real => write!(f, "R"),
            LocalField::Padic(p) => write!(f, "Qp:{}", p.get()),
        }
    }
}

impl FromStr for LocalField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "R" {
            return Ok(LocalField::Real);
        }
        let digits = s
            .strip_prefix("Qp:")
            .or_else(|| s.strip_prefix('Q'))
            .ok_or_else(|| Error::Parse(format!("unknown field `{s}` (expected R or Qp:<p>)")))?;
        let p: u64 = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad prime in field `{s}`")))?;
        LocalField::padic(p)
    }
}

/// A value in `{+1, -1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    /// `+1`
    Plus,
    /// `-1`
    Minus,
}

impl Sign {
    /// `Plus` when `b` holds.
    pub fn from_bool(b: bool) -> Self {
        if b {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// `(-1)^k`.
    pub fn from_parity(k: u64) -> Self {
        Sign::from_bool(k.is_multiple_of(2))
    }

    /// The integer value `1` or `-1`.
    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// Parses `1`, `+1`, `+`, `-1` or `-`.
    pub fn from_value(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::Parse(format!("{v} is not a sign"))),
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_bool(self == rhs)
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i32(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_value(v).map_err(serde::de::Error::custom)
    }
}

/// An element of `F^x / (F^x)^2`.
///
/// The class is stored as the parity of the valuation together with a tag for
/// the unit part: the sign over the reals, square/nonsquare for odd `p`, and
/// the residue modulo 8 for `p = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClass {
    field: LocalField,
    val: u8,
    unit: u8,
}

impl SquareClass {
    /// Builds a class from its raw components, validating them.
    ///
    /// `unit` is `0`/`1` for the sign over the reals (1 meaning negative) and for
    /// square/nonsquare when `p` is odd, and an odd residue in `{1,3,5,7}` for `p = 2`.
    pub fn from_parts(field: LocalField, val_parity: u8, unit: u8) -> Result<Self> {
        let ok = match field.prime() {
            None => val_parity == 0 && unit < 2,
            Some(2) => val_parity < 2 && matches!(unit, 1 | 3 | 5 | 7),
            Some(_) => val_parity < 2 && unit < 2,
        };
        if ok {
            Ok(SquareClass {
                field,
                val: val_parity,
                unit,
            })
        } else {
            Err(Error::Invalid(format!(
                "no square class over {field} with valuation parity {val_parity} and unit tag {unit}"
            )))
        }
    }

    /// The trivial class.
    pub fn one(field: LocalField) -> Self {
        let unit = if field.prime() == Some(2) { 1 } else { 0 };
        SquareClass { field, val: 0, unit }
    }

    /// The class of `-1`.
    pub fn minus_one(field: LocalField) -> Self {
        Self::from_int(field, -1).expect("-1 is nonzero")
    }

    /// The class of the prime `p` itself (odd valuation, unit part 1).
    pub fn uniformizer(field: LocalField) -> Result<Self> {
        match field.prime() {
            None => Err(Error::Invalid("the reals have no uniformizer".into())),
            Some(p) => Self::from_int(field, p as i64),
        }
    }

    /// The class of the integer `x`.
    pub fn from_int(field: LocalField, x: i64) -> Result<Self> {
        Self::from_ratio(field, x, 1)
    }

    /// The class of the rational `num / den`.
    pub fn from_ratio(field: LocalField, num: i64, den: i64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::ZeroInput);
        }
        let negative = (num < 0) != (den < 0);
        let (mut m, mut n) = (num.unsigned_abs() as u128, den.unsigned_abs() as u128);
        match field.prime() {
            None => Ok(SquareClass {
                field,
                val: 0,
                unit: negative as u8,
            }),
            Some(p) => {
                let p = p as u128;
                let mut v = 0u32;
                while m % p == 0 {
                    m /= p;
                    v += 1;
                }
                while n % p == 0 {
                    n /= p;
                    v += 1;
                }
                // m/n and m*n differ by the square n^2.
                let modulus = if p == 2 { 8 } else { p };
                let mut r = (m % modulus) * (n % modulus) % modulus;
                if negative {
                    r = (modulus - r) % modulus;
                }
                let unit = if p == 2 {
                    r as u8
                } else {
                    (legendre(r as u64, p as u64) == -1) as u8
                };
                Ok(SquareClass {
                    field,
                    val: (v % 2) as u8,
                    unit,
                })
            }
        }
    }

    /// The field this class lives over.
    pub fn field(&self) -> LocalField {
        self.field
    }

    /// Parity of the valuation (always 0 over the reals).
    pub fn val_parity(&self) -> u8 {
        self.val
    }

    /// Raw unit tag, see [`SquareClass::from_parts`].
    pub fn unit_tag(&self) -> u8 {
        self.unit
    }

    /// True for the class of squares.
    pub fn is_trivial(&self) -> bool {
        *self == Self::one(self.field)
    }

    /// A small integer in this class: `+-1` over the reals, `u^e p^v` for odd `p`,
    /// and `r 2^v` with `r` in `{1,3,5,7}` for `p = 2`.
    pub fn representative(&self) -> i64 {
        match self.field.prime() {
            None => {
                if self.unit == 1 {
                    -1
                } else {
                    1
                }
            }
            Some(2) => self.unit as i64 * if self.val == 1 { 2 } else { 1 },
            Some(p) => {
                let u = if self.unit == 1 {
                    self.field.nonresidue().expect("odd p") as i64
                } else {
                    1
                };
                u * if self.val == 1 { p as i64 } else { 1 }
            }
        }
    }

    /// Product with a class over the same field.
    pub fn checked_mul(&self, other: &SquareClass) -> Result<SquareClass> {
        same_field(self.field, other.field)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &SquareClass) -> SquareClass {
        let unit = match self.field.prime() {
            Some(2) => ((self.unit as u16 * other.unit as u16) % 8) as u8,
            _ => self.unit ^ other.unit,
        };
        SquareClass {
            field: self.field,
            val: self.val ^ other.val,
            unit,
        }
    }

    /// Compact token used inside form literals: `1`, `u`, `p`, `up` for odd `p`,
    /// the integer representative for `p = 2`, and `+`/`-` over the reals.
    pub fn token(&self) -> String {
        match self.field.prime() {
            None => if self.unit == 1 { "-" } else { "+" }.to_string(),
            Some(2) => self.representative().to_string(),
            Some(_) => match (self.val, self.unit) {
                (0, 0) => "1".into(),
                (0, _) => "u".into(),
                (_, 0) => "p".into(),
                _ => "up".into(),
            },
        }
    }

    /// Parses a class token over `field`.
    ///
    /// Accepted forms: an optional leading sign followed by a nonzero integer or
    /// ratio (`-3`, `9/2`), by the symbols `u`, `p`, `up`, `pu`, or by an integer
    /// followed by `u` (`3u`). Over the reals a bare `+` or `-` is accepted.
    pub fn parse_token(field: LocalField, token: &str) -> Result<SquareClass> {
        let t = token.trim();
        let err = || Error::Parse(format!("bad square-class token `{token}` over {field}"));
        let (negative, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let mut class = if negative {
            Self::minus_one(field)
        } else {
            Self::one(field)
        };
        if body.is_empty() {
            return if t.is_empty() { Err(err()) } else { Ok(class) };
        }
        let (body, with_u) = match body {
            "pu" | "up" => ("p", true),
            _ => match body.strip_suffix('u') {
                Some(rest) => (rest, true),
                None => (body, false),
            },
        };
        if with_u {
            let u = field.nonresidue().ok_or_else(err)?;
            class = class.mul_unchecked(&Self::from_int(field, u as i64)?);
        }
        let factor = match body {
            "" | "1" => Self::one(field),
            "p" => Self::uniformizer(field).map_err(|_| err())?,
            _ => {
                let (n, d) = match body.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (body, "1"),
                };
                let n: i64 = n.parse().map_err(|_| err())?;
                let d: i64 = d.parse().map_err(|_| err())?;
                Self::from_ratio(field, n, d)?
            }
        };
        Ok(class.mul_unchecked(&factor))
    }
}

impl Mul for SquareClass {
    type Output = SquareClass;

    /// Group law. Panics if the classes live over different fields; use
    /// [`SquareClass::checked_mul`] for a fallible version.
    fn mul(self, rhs: SquareClass) -> SquareClass {
        self.checked_mul(&rhs).expect("square classes over different fields")
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = match self.field.prime() {
            Some(p) if p != 2 => match (self.val, self.unit) {
                (0, 0) => "1".to_string(),
                (0, _) => "u".to_string(),
                (_, 0) => p.to_string(),
                _ => format!("{p}u"),
            },
            _ => self.token(),
        };
        write!(f, "{}|{}", self.field, body)
    }
}

impl FromStr for SquareClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (field, token) = s
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("expected <field>|<class>, got `{s}`")))?;
        SquareClass::parse_token(field.parse()?, token)
    }
}

impl Serialize for SquareClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SquareClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn same_field(a: LocalField, b: LocalField) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::FieldMismatch(a.to_string(), b.to_string()))
    }
}

/// All square classes of `field`, trivial class first.
///
/// Order: `[+, -]` over the reals, `[1, u, p, up]` for odd `p`, and
/// `[1, 3, 5, 7, 2, 6, 10, 14]` for `p = 2`.
pub fn enumerate_classes(field: LocalField) -> Vec<SquareClass> {
    let units: &[u8] = match field.prime() {
        None => &[0, 1],
        Some(2) => &[1, 3, 5, 7],
        Some(_) => &[0, 1],
    };
    let vals: &[u8] = if field.is_archimedean() { &[0] } else { &[0, 1] };
    vals.iter()
        .flat_map(|&val| units.iter().map(move |&unit| SquareClass { field, val, unit }))
        .collect()
}

/// Legendre symbol `(a/p)` for an odd prime `p`, returning `0` when `p | a`.
pub fn legendre(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut acc: u128 = 1;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// The Hilbert symbol `{a, b}`: `+1` iff `a x^2 + b y^2 = 1` is solvable in `F`.
pub fn hilbert(a: &SquareClass, b: &SquareClass) -> Result<Sign> {
    same_field(a.field, b.field)?;
    Ok(symbol(a, b))
}

/// Hilbert symbol for classes already known to share a field.
pub(crate) fn symbol(a: &SquareClass, b: &SquareClass) -> Sign {
    debug_assert_eq!(a.field, b.field);
    match a.field.prime() {
        None => Sign::from_bool(!(a.unit == 1 && b.unit == 1)),
        Some(2) => {
            let eps = |u: u8| ((u as u64 - 1) / 2) % 2;
            let omega = |u: u8| ((u as u64 * u as u64 - 1) / 8) % 2;
            let e = eps(a.unit) * eps(b.unit)
                + a.val as u64 * omega(b.unit)
                + b.val as u64 * omega(a.unit);
            Sign::from_parity(e)
        }
        Some(p) => {
            let eps_p = ((p - 1) / 2) % 2;
            // (u/p) = -1 exactly when the unit tag is 1.
            let e = a.val as u64 * b.val as u64 * eps_p
                + b.val as u64 * a.unit as u64
                + a.val as u64 * b.unit as u64;
            Sign::from_parity(e)
        }
    }
}

/// True iff `x` is a norm from `F(sqrt d)`, i.e. `{x, d} = +1`.
pub fn is_norm(x: &SquareClass, d: &SquareClass) -> Result<bool> {
    same_field(x.field, d.field)?;
    check_extension(d)?;
    Ok(symbol(x, d) == Sign::Plus)
}

/// The norm group of `F(sqrt d)` modulo squares, an index-2 subgroup of the
/// square-class group, listed in [`enumerate_classes`] order.
pub fn norm_group_mod_squares(d: &SquareClass) -> Result<Vec<SquareClass>> {
    check_extension(d)?;
    Ok(enumerate_classes(d.field)
        .into_iter()
        .filter(|x| symbol(x, d) == Sign::Plus)
        .collect())
}

pub(crate) fn check_extension(d: &SquareClass) -> Result<()> {
    if d.is_trivial() {
        Err(Error::NotQuadraticExtension(d.to_string()))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u64) -> LocalField {
        LocalField::padic(p).unwrap()
    }

    #[test]
    fn rejects_composite_and_zero() {
        assert_eq!(LocalField::padic(9), Err(Error::NotPrime(9)));
        assert_eq!(SquareClass::from_int(q(3), 0), Err(Error::ZeroInput));
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(
            SquareClass::from_int(LocalField::Real, -4).unwrap(),
            SquareClass::minus_one(LocalField::Real)
        );
        let c = SquareClass::from_ratio(q(3), 9, 2).unwrap();
        assert_eq!((c.val_parity(), c.unit_tag()), (0, 1));
        assert!(SquareClass::from_int(q(2), 17).unwrap().is_trivial());
    }

    #[test]
    fn multiplication_examples() {
        let f = q(2);
        let c = SquareClass::from_int(f, 3).unwrap() * SquareClass::from_int(f, 5).unwrap();
        assert_eq!(c, SquareClass::from_int(f, 7).unwrap());
        let g = q(7);
        let up = SquareClass::uniformizer(g).unwrap() * SquareClass::parse_token(g, "u").unwrap();
        assert_eq!(up.token(), "up");
        assert!(SquareClass::one(g)
            .checked_mul(&SquareClass::one(f))
            .is_err());
    }

    #[test]
    fn enumeration_order() {
        let tokens: Vec<_> = enumerate_classes(q(2)).iter().map(|c| c.token()).collect();
        assert_eq!(tokens, ["1", "3", "5", "7", "2", "6", "10", "14"]);
        let tokens: Vec<_> = enumerate_classes(q(5)).iter().map(|c| c.to_string()).collect();
        assert_eq!(tokens, ["Qp:5|1", "Qp:5|u", "Qp:5|5", "Qp:5|5u"]);
        assert_eq!(enumerate_classes(LocalField::Real).len(), 2);
    }

    #[test]
    fn text_round_trip() {
        for field in [LocalField::Real, q(2), q(3), q(13)] {
            for c in enumerate_classes(field) {
                assert_eq!(c.to_string().parse::<SquareClass>().unwrap(), c);
                assert_eq!(SquareClass::parse_token(field, &c.token()).unwrap(), c);
                assert_eq!(SquareClass::from_int(field, c.representative()).unwrap(), c);
            }
        }
        assert_eq!(
            "Qp:3|3u".parse::<SquareClass>().unwrap(),
            SquareClass::parse_token(q(3), "up").unwrap()
        );
    }

    #[test]
    fn symbol_examples() {
        let r = LocalField::Real;
        let m = SquareClass::minus_one(r);
        assert_eq!(hilbert(&m, &m).unwrap(), Sign::Minus);
        let three = SquareClass::from_int(q(3), 3).unwrap();
        assert_eq!(hilbert(&three, &three).unwrap(), Sign::Minus);
        let minus_three = SquareClass::from_int(q(3), -3).unwrap();
        assert!(is_norm(&minus_three, &three).unwrap());
        assert!(!is_norm(&m, &m).unwrap());
        let two = SquareClass::from_int(q(3), 2).unwrap();
        assert!(!is_norm(&two, &three).unwrap());
        assert!(is_norm(&two, &SquareClass::one(q(3))).is_err());
    }

    #[test]
    fn norm_groups() {
        let three = SquareClass::from_int(q(3), 3).unwrap();
        let group = norm_group_mod_squares(&three).unwrap();
        assert_eq!(
            group,
            vec![SquareClass::one(q(3)), SquareClass::from_int(q(3), -3).unwrap()]
        );
        let m = SquareClass::minus_one(LocalField::Real);
        assert_eq!(
            norm_group_mod_squares(&m).unwrap(),
            vec![SquareClass::one(LocalField::Real)]
        );
        for d in enumerate_classes(q(2)).into_iter().skip(1) {
            assert_eq!(norm_group_mod_squares(&d).unwrap().len(), 4);
        }
    }

    #[test]
    fn smallest_nonresidues() {
        assert_eq!(q(3).nonresidue(), Some(2));
        assert_eq!(q(7).nonresidue(), Some(3));
        assert_eq!(q(17).nonresidue(), Some(3));
        assert_eq!(q(2).nonresidue(), None);
    }
}
