//! Hermitian forms attached to a quadratic extension `E = F(sqrt d)`.
//!
//! Over `Q_p` a Hermitian form is determined by its rank and its determinant in
//! `F^x / N(E^x)`, a group of order 2. Over the reals (`E = C`) it is determined
//! by its signature. Forms are therefore stored as invariant records.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sqclass::{check_extension, is_norm, same_field, LocalField, SquareClass};

/// A quadratic extension `F(sqrt d)` of a local field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadExt {
    d: SquareClass,
}

impl QuadExt {
    /// `F(sqrt d)`; fails when `d` is a square.
    pub fn new(d: SquareClass) -> Result<Self> {
        check_extension(&d)?;
        Ok(QuadExt { d })
    }

    /// `C / R`.
    pub fn complex() -> Self {
        QuadExt {
            d: SquareClass::minus_one(LocalField::Real),
        }
    }

    /// The base field `F`.
    pub fn base(&self) -> LocalField {
        self.d.field()
    }

    /// The class `d` with `E = F(sqrt d)`.
    pub fn d(&self) -> SquareClass {
        self.d
    }

    /// All quadratic extensions of `field`, one per nontrivial square class.
    pub fn all(field: LocalField) -> Vec<QuadExt> {
        crate::sqclass::enumerate_classes(field)
            .into_iter()
            .skip(1)
            .map(|d| QuadExt { d })
            .collect()
    }

    /// Class of `x` in `F^x / N(E^x)`.
    pub fn norm_class(&self, x: &SquareClass) -> Result<NormClass> {
        Ok(NormClass::from_is_norm(is_norm(x, &self.d)?))
    }

    /// Class of `-1` in `F^x / N(E^x)`, the determinant of a hyperbolic plane.
    pub fn minus_one_class(&self) -> NormClass {
        NormClass::from_is_norm(
            is_norm(&SquareClass::minus_one(self.base()), &self.d).expect("same field"),
        )
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.base() {
            LocalField::Real => write!(f, "C/R"),
            base => write!(f, "{},d={}", base, self.d.token()),
        }
    }
}

impl FromStr for QuadExt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "C/R" {
            return Ok(QuadExt::complex());
        }
        let (field, d) = s
            .split_once(",d=")
            .ok_or_else(|| Error::Parse(format!("expected <field>,d=<class> or C/R, got `{s}`")))?;
        let field: LocalField = field.trim().parse()?;
        QuadExt::new(SquareClass::parse_token(field, d)?)
    }
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuadExt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An element of `F^x / N(E^x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormClass {
    /// The class of norms.
    Norm,
    /// The nontrivial class.
    NonNorm,
}

impl NormClass {
    fn from_is_norm(b: bool) -> Self {
        if b {
            NormClass::Norm
        } else {
            NormClass::NonNorm
        }
    }

    /// `norm` or `nonnorm`.
    pub fn name(self) -> &'static str {
        match self {
            NormClass::Norm => "norm",
            NormClass::NonNorm => "nonnorm",
        }
    }
}

/// Group law in the order-2 group.
impl std::ops::Mul for NormClass {
    type Output = NormClass;

    fn mul(self, other: NormClass) -> NormClass {
        NormClass::from_is_norm(self == other)
    }
}

/// The classifying data of a Hermitian form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum HermData {
    Padic { rank: usize, det: NormClass },
    Real { pos: usize, neg: usize },
}

/// A Hermitian form up to equivalence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HermForm {
    ext: QuadExt,
    data: HermData,
}

impl HermForm {
    /// The p-adic Hermitian form with the given rank and determinant class.
    /// Rank 0 forces the determinant to be a norm.
    pub fn padic(ext: QuadExt, rank: usize, det: NormClass) -> Result<Self> {
        if ext.base().is_archimedean() {
            return Err(Error::Invalid("use HermForm::real for C/R".into()));
        }
        if rank == 0 && det == NormClass::NonNorm {
            return Err(Error::Invalid("the rank-0 Hermitian form has norm determinant".into()));
        }
        Ok(HermForm {
            ext,
            data: HermData::Padic { rank, det },
        })
    }

    /// The Hermitian form over `C/R` with signature `(pos, neg)`.
    pub fn real(pos: usize, neg: usize) -> Self {
        HermForm {
            ext: QuadExt::complex(),
            data: HermData::Real { pos, neg },
        }
    }

    /// The diagonal Hermitian form `<a_1, ..., a_n>` with entries in `F`.
    pub fn from_diagonal(ext: QuadExt, entries: &[SquareClass]) -> Result<Self> {
        for a in entries {
            same_field(ext.base(), a.field())?;
        }
        match ext.base() {
            LocalField::Real => {
                let neg = entries.iter().filter(|a| a.unit_tag() == 1).count();
                Ok(HermForm::real(entries.len() - neg, neg))
            }
            _ => {
                let mut det = NormClass::Norm;
                for a in entries {
                    det = det * ext.norm_class(a)?;
                }
                HermForm::padic(ext, entries.len(), det)
            }
        }
    }

    /// The extension the form is defined for.
    pub fn ext(&self) -> QuadExt {
        self.ext
    }

    /// Rank over `E`.
    pub fn rank(&self) -> usize {
        match self.data {
            HermData::Padic { rank, .. } => rank,
            HermData::Real { pos, neg } => pos + neg,
        }
    }

    /// Determinant class; over `C/R` this is the class of `(-1)^neg`, which is
    /// always a norm.
    pub fn det_class(&self) -> NormClass {
        match self.data {
            HermData::Padic { det, .. } => det,
            HermData::Real { .. } => NormClass::Norm,
        }
    }

    /// Signature over `C/R`.
    pub fn signature(&self) -> Option<(usize, usize)> {
        match self.data {
            HermData::Real { pos, neg } => Some((pos, neg)),
            HermData::Padic { .. } => None,
        }
    }

    /// Whether the form is anisotropic; over `C/R` this means definite. The
    /// empty form counts as anisotropic.
    pub fn is_anisotropic(&self) -> bool {
        match self.data {
            HermData::Real { pos, neg } => pos == 0 || neg == 0,
            HermData::Padic { .. } => self.herm_mu() == 0,
        }
    }

    fn check_ext(&self, other: &HermForm) -> Result<()> {
        if self.ext == other.ext {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.ext.to_string(), other.ext.to_string()))
        }
    }

    /// Equivalence of Hermitian forms.
    pub fn herm_equivalent(&self, other: &HermForm) -> Result<bool> {
        self.check_ext(other)?;
        Ok(self.data == other.data)
    }

    /// Witt index.
    pub fn herm_mu(&self) -> usize {
        match self.data {
            HermData::Real { pos, neg } => pos.min(neg),
            HermData::Padic { mut rank, mut det } => {
                let m = self.ext.minus_one_class();
                let mut k = 0;
                while rank >= 3 || (rank == 2 && det == m) {
                    rank -= 2;
                    det = det * m;
                    k += 1;
                }
                k
            }
        }
    }

    /// Whether `self` is an orthogonal summand of `b`.
    pub fn herm_is_subform(&self, b: &HermForm) -> Result<bool> {
        self.check_ext(b)?;
        Ok(match (self.data, b.data) {
            (HermData::Real { pos, neg }, HermData::Real { pos: pb, neg: nb }) => pos <= pb && neg <= nb,
            _ => self.rank() < b.rank() || (self.rank() == b.rank() && self.data == b.data),
        })
    }

    /// Orthogonal sum.
    pub fn herm_direct_sum(&self, other: &HermForm) -> Result<HermForm> {
        self.check_ext(other)?;
        let data = match (self.data, other.data) {
            (HermData::Real { pos, neg }, HermData::Real { pos: p2, neg: n2 }) => HermData::Real {
                pos: pos + p2,
                neg: neg + n2,
            },
            (HermData::Padic { rank, det }, HermData::Padic { rank: r2, det: d2 }) => HermData::Padic {
                rank: rank + r2,
                det: det * d2,
            },
            _ => unreachable!("same extension implies same kind"),
        };
        Ok(HermForm { ext: self.ext, data })
    }

    /// All Hermitian forms of the given rank for `ext` (real case: all signatures).
    pub fn all_of_rank(ext: QuadExt, rank: usize) -> Vec<HermForm> {
        match ext.base() {
            LocalField::Real => (0..=rank).rev().map(|pos| HermForm::real(pos, rank - pos)).collect(),
            _ if rank == 0 => vec![HermForm::padic(ext, 0, NormClass::Norm).expect("valid")],
            _ => [NormClass::Norm, NormClass::NonNorm]
                .into_iter()
                .map(|det| HermForm::padic(ext, rank, det).expect("valid"))
                .collect(),
        }
    }
}

impl fmt::Display for HermForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.data {
            HermData::Real { pos, neg } => write!(f, "hf(C/R)[{pos},{neg}]"),
            HermData::Padic { rank, det } => write!(f, "hf({})[rank={rank},det={}]", self.ext, det.name()),
        }
    }
}

impl FromStr for HermForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let err = || {
            Error::Parse(format!(
                "expected hf(<field>,d=<class>)[rank=<n>,det=norm|nonnorm] or hf(C/R)[<pos>,<neg>], got `{s}`"
            ))
        };
        let rest = s.strip_prefix("hf(").ok_or_else(err)?;
        let (ext, rest) = rest.split_once(')').ok_or_else(err)?;
        let body = rest
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(err)?;
        let ext: QuadExt = ext.parse()?;
        let (a, b) = body.split_once(',').ok_or_else(err)?;
        let (a, b) = (a.trim(), b.trim());
        if ext.base().is_archimedean() {
            let pos = a.parse().map_err(|_| err())?;
            let neg = b.parse().map_err(|_| err())?;
            return Ok(HermForm::real(pos, neg));
        }
        let rank = a
            .strip_prefix("rank=")
            .and_then(|r| r.parse().ok())
            .ok_or_else(err)?;
        let det = match b.strip_prefix("det=") {
            Some("norm") => NormClass::Norm,
            Some("nonnorm") => NormClass::NonNorm,
            _ => return Err(err()),
        };
        HermForm::padic(ext, rank, det)
    }
}

impl Serialize for HermForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HermForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext(s: &str) -> QuadExt {
        s.parse().unwrap()
    }

    fn hf(s: &str) -> HermForm {
        s.parse().unwrap()
    }

    #[test]
    fn extension_parsing() {
        let e = ext("Qp:3,d=p");
        assert_eq!(e.d(), SquareClass::from_int(LocalField::padic(3).unwrap(), 3).unwrap());
        assert_eq!(e.to_string(), "Qp:3,d=p");
        assert!("Qp:3,d=1".parse::<QuadExt>().is_err());
        assert_eq!(QuadExt::all(LocalField::padic(2).unwrap()).len(), 7);
    }

    #[test]
    fn equivalence_examples() {
        let e = ext("Qp:3,d=p");
        let zero = HermForm::padic(e, 0, NormClass::Norm).unwrap();
        assert!(zero.herm_equivalent(&zero).unwrap());
        assert!(!hf("hf(Qp:3,d=p)[rank=2,det=norm]")
            .herm_equivalent(&hf("hf(Qp:3,d=p)[rank=2,det=nonnorm]"))
            .unwrap());
        assert!(!hf("hf(C/R)[2,0]").herm_equivalent(&hf("hf(C/R)[1,1]")).unwrap());
        assert!(HermForm::padic(e, 0, NormClass::NonNorm).is_err());
    }

    #[test]
    fn witt_index_examples() {
        assert_eq!(hf("hf(Qp:3,d=p)[rank=1,det=norm]").herm_mu(), 0);
        assert_eq!(hf("hf(C/R)[1,1]").herm_mu(), 1);
        assert!(hf("hf(Qp:3,d=p)[rank=3,det=norm]").herm_mu() >= 1);
        assert!(hf("hf(Qp:3,d=p)[rank=3,det=nonnorm]").herm_mu() >= 1);
        // -1 is not a norm from Q_3(sqrt 3) since {-1, 3} = -1 over Q_3.
        assert_eq!(hf("hf(Qp:3,d=p)[rank=2,det=nonnorm]").herm_mu(), 1);
        assert_eq!(hf("hf(Qp:3,d=p)[rank=2,det=norm]").herm_mu(), 0);
    }

    #[test]
    fn subform_and_sum_examples() {
        let b = hf("hf(Qp:3,d=p)[rank=2,det=norm]");
        assert!(b.herm_is_subform(&b).unwrap());
        assert!(hf("hf(Qp:3,d=p)[rank=1,det=nonnorm]").herm_is_subform(&b).unwrap());
        assert!(!hf("hf(C/R)[2,0]").herm_is_subform(&hf("hf(C/R)[1,1]")).unwrap());
        let s = hf("hf(Qp:3,d=p)[rank=1,det=norm]")
            .herm_direct_sum(&hf("hf(Qp:3,d=p)[rank=1,det=nonnorm]"))
            .unwrap();
        assert_eq!(s, hf("hf(Qp:3,d=p)[rank=2,det=nonnorm]"));
        assert_eq!(
            hf("hf(C/R)[1,0]").herm_direct_sum(&hf("hf(C/R)[0,1]")).unwrap(),
            hf("hf(C/R)[1,1]")
        );
        assert!(b.herm_direct_sum(&hf("hf(Qp:3,d=u)[rank=1,det=norm]")).is_err());
    }

    #[test]
    fn text_round_trip() {
        for s in ["hf(Qp:3,d=p)[rank=2,det=nonnorm]", "hf(C/R)[2,1]", "hf(Qp:2,d=5)[rank=0,det=norm]"] {
            assert_eq!(hf(s).to_string(), s);
            let json = serde_json::to_string(&hf(s)).unwrap();
            assert_eq!(serde_json::from_str::<HermForm>(&json).unwrap(), hf(s));
        }
    }
}
