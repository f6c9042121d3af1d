//! Classification of symmetric pairs of classical groups.
//!
//! [`classify`] decides, for one member of a family of symmetric pairs over a
//! local field, whether the pair is stable, s-stable, p-stable and Gelfand.
//! Each answer is a [`Tri`] carrying citation tags that name the statement it
//! rests on; the tags are listed in the crate README. Conditions involving
//! quadratic or Hermitian forms are evaluated from the primitives of
//! [`crate::quadform`] and [`crate::hermform`].

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hermform::{HermForm, QuadExt};
use crate::quadform::{all_diagonal_forms, form_classes, QuadForm, QuadInvariants};
use crate::sqclass::{
    is_norm, is_prime, norm_group_mod_squares, same_field, LocalField, SquareClass,
};

/// Three-valued answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    /// Proven to hold.
    Yes,
    /// Proven to fail.
    No,
    /// Not decided.
    Unknown,
}

impl Tri {
    /// `Yes` or `No` according to `b`.
    pub fn from_bool(b: bool) -> Self {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    /// Lower-case name.
    pub fn as_str(self) -> &'static str {
        match self {
            Tri::Yes => "yes",
            Tri::No => "no",
            Tri::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Base field of a pair: the complex numbers or a local field from [`LocalField`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairField {
    /// The complex numbers.
    Complex,
    /// The reals or a p-adic field.
    Local(LocalField),
}

impl PairField {
    fn local(self) -> Option<LocalField> {
        match self {
            PairField::Complex => None,
            PairField::Local(f) => Some(f),
        }
    }
}

impl fmt::Display for PairField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairField::Complex => f.write_str("C"),
            PairField::Local(l) => write!(f, "{l}"),
        }
    }
}

impl FromStr for PairField {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "C" {
            Ok(PairField::Complex)
        } else {
            Ok(PairField::Local(s.parse()?))
        }
    }
}

impl Serialize for PairField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PairField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One member of a family of symmetric pairs.
///
/// For the families built from a quadratic extension `E/F`, `dim` is the
/// dimension over the larger field: `GL_F_over_E` and `SL_F_over_E` are
/// `(GL_{2n}(F), GL_n(E))` and `(SL_{2n}(F), SL_n(E))`, and the base-change
/// families are `(GL_n(E), GL_n(F))` and `(SL_n(E), SL_n(F))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", content = "params")]
pub enum PairSpec {
    /// `(GL(V), GL(V+) x GL(V-))`.
    #[serde(rename = "GLxGL")]
    GlxGl {
        /// Base field.
        field: PairField,
        /// `dim V+`.
        dim_plus: usize,
        /// `dim V-`.
        dim_minus: usize,
    },
    /// `(SL(V), S(GL(V+) x GL(V-)))`.
    #[serde(rename = "SLxGL")]
    SlxGl {
        /// Base field.
        field: PairField,
        /// `dim V+`.
        dim_plus: usize,
        /// `dim V-`.
        dim_minus: usize,
    },
    /// `(GL_F(V), GL_E(V))`.
    #[serde(rename = "GL_F_over_E")]
    GlFOverE {
        /// The extension `E/F`.
        ext: QuadExt,
        /// `dim_E V`.
        dim: usize,
    },
    /// `(SL_F(V), SL_E(V))`.
    #[serde(rename = "SL_F_over_E")]
    SlFOverE {
        /// The extension `E/F`.
        ext: QuadExt,
        /// `dim_E V`.
        dim: usize,
    },
    /// `(GL(V(E)), GL(V(F)))` with Galois conjugation.
    #[serde(rename = "GL_basechange")]
    GlBasechange {
        /// The extension `E/F`.
        ext: QuadExt,
        /// `dim V`.
        dim: usize,
    },
    /// `(SL(V(E)), SL(V(F)))` with Galois conjugation.
    #[serde(rename = "SL_basechange")]
    SlBasechange {
        /// The extension `E/F`.
        ext: QuadExt,
        /// `dim V`.
        dim: usize,
    },
    /// `(O(B), O(B+) x O(B-))` with `B = B+ + B-`.
    #[serde(rename = "O_pair")]
    OPair {
        /// The form on `V+`.
        bplus: QuadForm,
        /// The form on `V-`.
        bminus: QuadForm,
    },
    /// `(U(B), U(B+) x U(B-))` with `B = B+ + B-`.
    #[serde(rename = "U_pair")]
    UPair {
        /// The form on `V+`.
        bplus: HermForm,
        /// The form on `V-`.
        bminus: HermForm,
    },
    /// `(GL(V), O(B))`.
    #[serde(rename = "GL_O")]
    GlO {
        /// The quadratic form.
        b: QuadForm,
    },
    /// `(GL_E(V), U(B))`.
    #[serde(rename = "GL_U")]
    GlU {
        /// The Hermitian form.
        b: HermForm,
    },
    /// The quaternion example over `Q_p`, `p = 3 mod 4`.
    #[serde(rename = "Quaternion")]
    Quaternion {
        /// The prime.
        p: u64,
    },
}

impl PairSpec {
    /// The family tag.
    pub fn family(&self) -> Family {
        match self {
            PairSpec::GlxGl { .. } => Family::GlxGl,
            PairSpec::SlxGl { .. } => Family::SlxGl,
            PairSpec::GlFOverE { .. } => Family::GlFOverE,
            PairSpec::SlFOverE { .. } => Family::SlFOverE,
            PairSpec::GlBasechange { .. } => Family::GlBasechange,
            PairSpec::SlBasechange { .. } => Family::SlBasechange,
            PairSpec::OPair { .. } => Family::OPair,
            PairSpec::UPair { .. } => Family::UPair,
            PairSpec::GlO { .. } => Family::GlO,
            PairSpec::GlU { .. } => Family::GlU,
            PairSpec::Quaternion { .. } => Family::Quaternion,
        }
    }

    /// The base field.
    pub fn field(&self) -> PairField {
        match self {
            PairSpec::GlxGl { field, .. } | PairSpec::SlxGl { field, .. } => *field,
            PairSpec::GlFOverE { ext, .. }
            | PairSpec::SlFOverE { ext, .. }
            | PairSpec::GlBasechange { ext, .. }
            | PairSpec::SlBasechange { ext, .. } => PairField::Local(ext.base()),
            PairSpec::OPair { bplus, .. } => PairField::Local(bplus.field()),
            PairSpec::UPair { bplus, .. } => PairField::Local(bplus.ext().base()),
            PairSpec::GlO { b } => PairField::Local(b.field()),
            PairSpec::GlU { b } => PairField::Local(b.ext().base()),
            PairSpec::Quaternion { p } => {
                PairField::Local(LocalField::padic(*p).unwrap_or(LocalField::Real))
            }
        }
    }

    /// The parameters without the family tag, as JSON.
    pub fn params(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("specs serialize");
        v["params"].take()
    }
}

/// Names of the families, as used on the command line and in JSON.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// See [`PairSpec::GlxGl`].
    GlxGl,
    /// See [`PairSpec::SlxGl`].
    SlxGl,
    /// See [`PairSpec::GlFOverE`].
    GlFOverE,
    /// See [`PairSpec::SlFOverE`].
    SlFOverE,
    /// See [`PairSpec::GlBasechange`].
    GlBasechange,
    /// See [`PairSpec::SlBasechange`].
    SlBasechange,
    /// See [`PairSpec::OPair`].
    OPair,
    /// See [`PairSpec::UPair`].
    UPair,
    /// See [`PairSpec::GlO`].
    GlO,
    /// See [`PairSpec::GlU`].
    GlU,
    /// See [`PairSpec::Quaternion`].
    Quaternion,
}

impl Family {
    /// Every family, in table order.
    pub const ALL: [Family; 11] = [
        Family::GlxGl,
        Family::SlxGl,
        Family::GlFOverE,
        Family::SlFOverE,
        Family::GlBasechange,
        Family::SlBasechange,
        Family::OPair,
        Family::UPair,
        Family::GlO,
        Family::GlU,
        Family::Quaternion,
    ];

    /// The families of the summary table.
    pub const TABLE: [Family; 10] = [
        Family::GlxGl,
        Family::SlxGl,
        Family::GlFOverE,
        Family::SlFOverE,
        Family::GlBasechange,
        Family::SlBasechange,
        Family::OPair,
        Family::UPair,
        Family::GlO,
        Family::GlU,
    ];

    /// The tag used in JSON.
    pub fn tag(self) -> &'static str {
        match self {
            Family::GlxGl => "GLxGL",
            Family::SlxGl => "SLxGL",
            Family::GlFOverE => "GL_F_over_E",
            Family::SlFOverE => "SL_F_over_E",
            Family::GlBasechange => "GL_basechange",
            Family::SlBasechange => "SL_basechange",
            Family::OPair => "O_pair",
            Family::UPair => "U_pair",
            Family::GlO => "GL_O",
            Family::GlU => "GL_U",
            Family::Quaternion => "Quaternion",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let alias = match key.as_str() {
            "o" => "o_pair",
            "u" => "u_pair",
            "quaternion" | "q" => "quaternion",
            other => other,
        };
        Family::ALL
            .into_iter()
            .find(|f| f.tag().to_ascii_lowercase() == alias)
            .ok_or_else(|| Error::Parse(format!("unknown family `{s}`")))
    }
}

/// The four-property verdict for one pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    /// Every closed double coset is preserved by the anti-involution.
    pub stable: Tri,
    /// s-stability.
    pub s_stable: Tri,
    /// p-stability.
    pub p_stable: Tri,
    /// Gelfand property.
    pub gelfand: Tri,
    /// Tags of the statements each answer rests on.
    pub citations: Vec<String>,
}

impl Verdict {
    fn new(stable: Tri, s_stable: Tri, p_stable: Tri, gelfand: Tri, citations: &[&str]) -> Self {
        let v = Verdict {
            stable,
            s_stable,
            p_stable,
            gelfand,
            citations: citations.iter().map(|c| c.to_string()).collect(),
        };
        assert!(v.chain_holds(), "implication chain violated: {v:?}");
        v
    }

    fn uniform(b: bool, gelfand: Tri, citations: &[&str]) -> Self {
        let t = Tri::from_bool(b);
        Verdict::new(t, t, t, gelfand, citations)
    }

    /// `stable => p-stable => s-stable` and `Gelfand => p-stable`, for proven answers.
    pub fn chain_holds(&self) -> bool {
        let implies = |a: Tri, b: Tri| a != Tri::Yes || b == Tri::Yes;
        let refutes = |a: Tri, b: Tri| b != Tri::No || a == Tri::No;
        implies(self.stable, self.p_stable)
            && implies(self.p_stable, self.s_stable)
            && implies(self.gelfand, self.p_stable)
            && refutes(self.stable, self.p_stable)
            && refutes(self.p_stable, self.s_stable)
            && refutes(self.gelfand, self.p_stable)
    }
}

/// A classified pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    /// The pair.
    #[serde(flatten)]
    pub spec: PairSpec,
    /// Its verdict.
    #[serde(flatten)]
    pub verdict: Verdict,
}

fn definite(b: &QuadForm) -> bool {
    match b.invariants() {
        QuadInvariants::Real { pos, neg, .. } => pos == 0 || neg == 0,
        _ => false,
    }
}

fn require_nonarch(field: LocalField) -> Result<()> {
    if field.is_archimedean() {
        Err(Error::Invalid("condition only defined over non-Archimedean fields".into()))
    } else {
        Ok(())
    }
}

/// `min(rank B+, rank B-, mu(B+ + B-))`.
pub fn orthogonal_rank(bplus: &QuadForm, bminus: &QuadForm) -> Result<usize> {
    let b = bplus.direct_sum(bminus)?;
    Ok(bplus.rank().min(bminus.rank()).min(b.mu()))
}

/// `min(rank B+, rank B-, mu(B+ + B-))` for Hermitian forms.
pub fn unitary_rank(bplus: &HermForm, bminus: &HermForm) -> Result<usize> {
    let b = bplus.herm_direct_sum(bminus)?;
    Ok(bplus.rank().min(bminus.rank()).min(b.herm_mu()))
}

/// The largest `k` such that some rank-`k` form `C` satisfies `C <= B+` and
/// `-C <= B-`: the number of hyperbolic planes of `B` split by the involution,
/// found by enumeration. Used to cross-check [`orthogonal_rank`].
pub fn orthogonal_split_rank(bplus: &QuadForm, bminus: &QuadForm) -> Result<usize> {
    same_field(bplus.field(), bminus.field())?;
    let field = bplus.field();
    let m = SquareClass::minus_one(field);
    for k in (0..=bplus.rank().min(bminus.rank())).rev() {
        let candidates = if field.is_archimedean() {
            all_diagonal_forms(field, k)
        } else {
            form_classes(field, k)
        };
        for c in candidates {
            if c.is_subform(bplus)? && c.scale(&m)?.is_subform(bminus)? {
                return Ok(k);
            }
        }
    }
    unreachable!("k = 0 always qualifies")
}

/// Hermitian analogue of [`orthogonal_split_rank`].
pub fn unitary_split_rank(bplus: &HermForm, bminus: &HermForm) -> Result<usize> {
    let ext = bplus.ext();
    let minus = |c: &HermForm| -> Result<HermForm> {
        match c.signature() {
            Some((p, q)) => Ok(HermForm::real(q, p)),
            None => {
                let m = ext.minus_one_class();
                let det = if c.rank() % 2 == 1 { c.det_class() * m } else { c.det_class() };
                HermForm::padic(ext, c.rank(), det)
            }
        }
    };
    for k in (0..=bplus.rank().min(bminus.rank())).rev() {
        for c in HermForm::all_of_rank(ext, k) {
            if c.herm_is_subform(bplus)? && minus(&c)?.herm_is_subform(bminus)? {
                return Ok(k);
            }
        }
    }
    unreachable!("k = 0 always qualifies")
}

/// Whether `B+ = Q([a, b, ...])` and `B- = Q([e1 a, e2 b, ...])` for some classes
/// and independent signs, matching the entries of the shorter form against a
/// prefix of the longer one. Decided by enumerating diagonalizations.
pub fn sign_twin_exists(bplus: &QuadForm, bminus: &QuadForm) -> Result<bool> {
    same_field(bplus.field(), bminus.field())?;
    let field = bplus.field();
    require_nonarch(field)?;
    if bplus.rank() > 3 || bminus.rank() > 3 {
        return Err(Error::Invalid("sign twins are only decided for ranks <= 3".into()));
    }
    let (short, long) = if bplus.rank() <= bminus.rank() {
        (bplus, bminus)
    } else {
        (bminus, bplus)
    };
    let short_inv = short.invariants();
    let long_inv = long.invariants();
    let m = SquareClass::minus_one(field);
    let extra = long.rank() - short.rank();
    for diag in all_diagonal_forms(field, short.rank()) {
        if diag.invariants() != short_inv {
            continue;
        }
        for signs in 0u32..(1 << short.rank()) {
            let signed: Vec<SquareClass> = diag
                .diag()
                .iter()
                .enumerate()
                .map(|(i, &a)| if signs >> i & 1 == 1 { a * m } else { a })
                .collect();
            let head = QuadForm::new(field, signed)?;
            for tail in all_diagonal_forms(field, extra) {
                if head.direct_sum(&tail)?.invariants() == long_inv {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// Condition (A): `dim V+ <= 1` or `dim V- <= 1`; or odd residual
/// characteristic, `dim V <= 5`, `mu(B) <= 1`, `mu(B+) = mu(B-) = 0` and no sign twin.
pub fn condition_a(bplus: &QuadForm, bminus: &QuadForm) -> Result<bool> {
    let b = bplus.direct_sum(bminus)?;
    require_nonarch(b.field())?;
    if bplus.rank() <= 1 || bminus.rank() <= 1 {
        return Ok(true);
    }
    Ok(fine_case(bplus, bminus, &b) && !sign_twin_exists(bplus, bminus)?)
}

fn fine_case(bplus: &QuadForm, bminus: &QuadForm, b: &QuadForm) -> bool {
    b.field().has_odd_residual_characteristic()
        && b.rank() <= 5
        && b.mu() <= 1
        && bplus.mu() == 0
        && bminus.mu() == 0
}

/// Condition (B): `dim V+ <= 1` or `dim V- <= 1`; or odd residual
/// characteristic, `dim V <= 5`, `mu(B) <= 1` and `mu(B+) = mu(B-) = 0`; or `mu(B) = 0`.
pub fn condition_b(bplus: &QuadForm, bminus: &QuadForm) -> Result<bool> {
    let b = bplus.direct_sum(bminus)?;
    require_nonarch(b.field())?;
    Ok(bplus.rank() <= 1 || bminus.rank() <= 1 || fine_case(bplus, bminus, &b) || b.mu() == 0)
}

/// Condition (C): `min(dim V+, dim V-, mu(B)) <= 1`.
pub fn condition_c(bplus: &QuadForm, bminus: &QuadForm) -> Result<bool> {
    require_nonarch(bplus.field())?;
    Ok(orthogonal_rank(bplus, bminus)? <= 1)
}

/// Condition (C) for Hermitian forms.
pub fn condition_c_unitary(bplus: &HermForm, bminus: &HermForm) -> Result<bool> {
    require_nonarch(bplus.ext().base())?;
    Ok(unitary_rank(bplus, bminus)? <= 1)
}

/// Condition (D): `min(dim V+, dim V-) <= 1`.
pub fn condition_d(dim_plus: usize, dim_minus: usize) -> bool {
    dim_plus.min(dim_minus) <= 1
}

/// Order of the kernel of `N(E^x)/(F^x)^2 -> F^x / N(E^x)` for `E = Q_p(sqrt p)`.
pub fn quaternion_obstruction(p: u64) -> Result<usize> {
    Ok(quaternion_kernel(p)?.len())
}

/// The kernel itself, in class enumeration order.
pub fn quaternion_kernel(p: u64) -> Result<Vec<SquareClass>> {
    if p.is_multiple_of(2) {
        return Err(Error::Invalid(format!("{p} is not an odd prime")));
    }
    let field = LocalField::padic(p)?;
    let d = SquareClass::uniformizer(field)?;
    let mut kernel = Vec::new();
    for x in norm_group_mod_squares(&d)? {
        if is_norm(&x, &d)? {
            kernel.push(x);
        }
    }
    Ok(kernel)
}

fn check_dims(total: usize) -> Result<()> {
    if total == 0 {
        Err(Error::Invalid("the total dimension must be positive".into()))
    } else {
        Ok(())
    }
}

/// Classifies one pair.
pub fn classify(spec: &PairSpec) -> Result<Verdict> {
    use Tri::{No, Unknown, Yes};
    Ok(match spec {
        PairSpec::GlxGl { field, dim_plus, dim_minus } => {
            check_dims(dim_plus + dim_minus)?;
            match field {
                PairField::Complex => Verdict::uniform(true, Unknown, &["prop:complex-pairs-stable"]),
                _ => Verdict::uniform(true, Yes, &["thm:gl-gl-stable", "prior:gl-gl-gelfand"]),
            }
        }
        PairSpec::SlxGl { field, dim_plus, dim_minus } => {
            check_dims(dim_plus + dim_minus)?;
            match field {
                PairField::Complex => Verdict::uniform(true, Unknown, &["prop:complex-pairs-stable"]),
                _ => {
                    let b = dim_plus != dim_minus;
                    Verdict::uniform(
                        b,
                        Tri::from_bool(b),
                        &["cor:sl-gl-stable-iff-unequal-dims", "thm:gelfand-sl-gl"],
                    )
                }
            }
        }
        PairSpec::GlFOverE { dim, .. } => {
            check_dims(*dim)?;
            Verdict::uniform(true, Yes, &["thm:gl-f-over-e-stable", "thm:gelfand-gl-f-over-e"])
        }
        PairSpec::SlFOverE { ext, dim } => {
            check_dims(*dim)?;
            if ext.base().is_archimedean() {
                Verdict::uniform(true, Yes, &["thm:sl-f-over-e-real-stable", "thm:gelfand-sl-f-over-e"])
            } else {
                Verdict::uniform(
                    false,
                    No,
                    &["thm:sl-f-over-e-nonarch-not-s-stable", "thm:gelfand-sl-f-over-e"],
                )
            }
        }
        PairSpec::GlBasechange { dim, .. } => {
            check_dims(*dim)?;
            Verdict::uniform(true, Yes, &["thm:gl-basechange-stable", "prior:gl-basechange-gelfand"])
        }
        PairSpec::SlBasechange { dim, .. } => {
            check_dims(*dim)?;
            let b = dim % 2 == 1;
            Verdict::uniform(
                b,
                Tri::from_bool(b),
                &["thm:sl-basechange-stable-iff-odd", "thm:gelfand-sl-basechange"],
            )
        }
        PairSpec::GlO { b } => {
            check_dims(b.rank())?;
            let c = if b.field().is_archimedean() { definite(b) } else { b.rank() == 1 };
            gl_form_verdict(c, "cor:gl-o-stable")
        }
        PairSpec::GlU { b } => {
            check_dims(b.rank())?;
            let c = if b.ext().base().is_archimedean() {
                b.is_anisotropic()
            } else {
                b.rank() == 1
            };
            gl_form_verdict(c, "thm:gl-u-stable")
        }
        PairSpec::Quaternion { p } => {
            if !is_prime(*p) || p % 4 != 3 {
                return Err(Error::Invalid(format!("{p} is not a prime congruent to 3 mod 4")));
            }
            debug_assert_eq!(quaternion_obstruction(*p)?, 2);
            Verdict::new(
                No,
                Yes,
                Yes,
                Unknown,
                &[
                    "thm:quaternion-unstable",
                    "remark:quaternion-no-parabolics",
                    "remark:gelfand-open",
                ],
            )
        }
        PairSpec::OPair { bplus, bminus } => {
            same_field(bplus.field(), bminus.field())?;
            check_dims(bplus.rank() + bminus.rank())?;
            if bplus.field().is_archimedean() {
                let c = definite(bplus) || definite(bminus);
                Verdict::uniform(c, Tri::from_bool(c), &["thm:stability-for-O-real", "thm:gelfand-O-real"])
            } else {
                classify_o_nonarch(bplus, bminus)?
            }
        }
        PairSpec::UPair { bplus, bminus } => {
            if bplus.ext() != bminus.ext() {
                return Err(Error::FieldMismatch(bplus.ext().to_string(), bminus.ext().to_string()));
            }
            check_dims(bplus.rank() + bminus.rank())?;
            if bplus.ext().base().is_archimedean() {
                let c = bplus.is_anisotropic() || bminus.is_anisotropic();
                Verdict::uniform(c, Tri::from_bool(c), &["thm:stability-for-U-real", "thm:gelfand-U-real"])
            } else {
                let d = condition_d(bplus.rank(), bminus.rank());
                let s = condition_c_unitary(bplus, bminus)?;
                Verdict::new(
                    Tri::from_bool(d),
                    Tri::from_bool(s),
                    Tri::from_bool(d),
                    Tri::from_bool(d),
                    &["cond:C", "cond:D", "thm:stability-for-U", "thm:gelfand-U"],
                )
            }
        }
    })
}

fn gl_form_verdict(c: bool, tag: &str) -> Verdict {
    if c {
        Verdict::uniform(true, Tri::Yes, &[tag, "fact:compact-or-abelian-gelfand"])
    } else {
        Verdict::uniform(false, Tri::No, &[tag, "thm:gelfand-then-p-stable"])
    }
}

fn classify_o_nonarch(bplus: &QuadForm, bminus: &QuadForm) -> Result<Verdict> {
    let a = condition_a(bplus, bminus)?;
    let b = condition_b(bplus, bminus)?;
    let c = condition_c(bplus, bminus)?;
    let mut cites = vec![
        "cond:A",
        "cond:B",
        "cond:C",
        "thm:stability-for-O",
        "thm:p-stability-for-O",
        "thm:s-stability-for-O",
    ];
    let sum = bplus.direct_sum(bminus)?;
    let both_large = bplus.rank() > 1 && bminus.rank() > 1;
    if both_large
        && !sum.field().has_odd_residual_characteristic()
        && sum.rank() <= 5
        && sum.mu() <= 1
        && bplus.mu() == 0
        && bminus.mu() == 0
        && sum.mu() != 0
    {
        cites.push("note:p-stability-residual-char");
    }
    let gelfand = if a {
        cites.push("thm:gelfand-O");
        Tri::Yes
    } else if !b {
        cites.push("thm:gelfand-then-p-stable");
        Tri::No
    } else {
        cites.push("remark:gelfand-open");
        if both_large
            && (!sum.field().has_odd_residual_characteristic()
                || bplus.mu() > 0
                || bminus.mu() > 0
                || sum.rank() >= 6)
        {
            cites.push("note:O-negative-list-exceeds-proof");
        }
        Tri::Unknown
    };
    Ok(Verdict::new(
        Tri::from_bool(a),
        Tri::from_bool(c),
        Tri::from_bool(b),
        gelfand,
        &cites,
    ))
}

/// Enumeration bounds for [`sweep`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepBounds {
    /// Largest dimension for dimension families, and largest total rank for
    /// form families over `Q_p`.
    pub max_dim: usize,
    /// Largest signature entry of each real form.
    pub max_sig: usize,
}

impl Default for SweepBounds {
    fn default() -> Self {
        SweepBounds { max_dim: 6, max_sig: 3 }
    }
}

/// Largest total rank allowed for form families over `Q_p`.
pub const MAX_PADIC_RANK: usize = 6;
/// Largest signature entry allowed for real forms.
pub const MAX_REAL_SIG: usize = 4;
/// Largest dimension allowed for dimension families.
pub const MAX_DIM: usize = 64;

fn specs_for(family: Family, field: PairField, bounds: SweepBounds) -> Result<Vec<PairSpec>> {
    let is_form_family = matches!(family, Family::OPair | Family::UPair | Family::GlO | Family::GlU);
    if bounds.max_sig > MAX_REAL_SIG || bounds.max_dim > MAX_DIM {
        return Err(Error::BudgetExceeded(format!(
            "sweep bounds {bounds:?} exceed max_dim {MAX_DIM} / max_sig {MAX_REAL_SIG}"
        )));
    }
    if is_form_family && matches!(field, PairField::Local(LocalField::Padic(_))) && bounds.max_dim > MAX_PADIC_RANK {
        return Err(Error::BudgetExceeded(format!(
            "total rank {} exceeds {MAX_PADIC_RANK} for form families over p-adic fields",
            bounds.max_dim
        )));
    }
    let n = bounds.max_dim;
    let dims_pairs = || {
        (0..=n).flat_map(move |a| (0..=n - a).map(move |b| (a, b))).filter(|&(a, b)| a + b >= 1)
    };
    let exts = || field.local().map(QuadExt::all).unwrap_or_default();
    let real_sigs = |min_rank: usize| {
        let s = bounds.max_sig;
        (0..=s)
            .flat_map(move |p| (0..=s).map(move |q| (p, q)))
            .filter(move |&(p, q)| p + q >= min_rank)
            .collect::<Vec<_>>()
    };
    let mut out = Vec::new();
    match family {
        Family::GlxGl | Family::SlxGl => {
            for (a, b) in dims_pairs() {
                out.push(if family == Family::GlxGl {
                    PairSpec::GlxGl { field, dim_plus: a, dim_minus: b }
                } else {
                    PairSpec::SlxGl { field, dim_plus: a, dim_minus: b }
                });
            }
        }
        Family::GlFOverE | Family::SlFOverE | Family::GlBasechange | Family::SlBasechange => {
            for ext in exts() {
                for dim in 1..=n {
                    out.push(match family {
                        Family::GlFOverE => PairSpec::GlFOverE { ext, dim },
                        Family::SlFOverE => PairSpec::SlFOverE { ext, dim },
                        Family::GlBasechange => PairSpec::GlBasechange { ext, dim },
                        _ => PairSpec::SlBasechange { ext, dim },
                    });
                }
            }
        }
        Family::OPair => match field.local() {
            None => {}
            Some(LocalField::Real) => {
                for &(p1, q1) in &real_sigs(0) {
                    for &(p2, q2) in &real_sigs(0) {
                        if p1 + q1 + p2 + q2 >= 1 {
                            out.push(PairSpec::OPair {
                                bplus: QuadForm::real(p1, q1),
                                bminus: QuadForm::real(p2, q2),
                            });
                        }
                    }
                }
            }
            Some(f) => {
                for (a, b) in dims_pairs() {
                    for bplus in form_classes(f, a) {
                        for bminus in form_classes(f, b) {
                            out.push(PairSpec::OPair { bplus: bplus.clone(), bminus });
                        }
                    }
                }
            }
        },
        Family::UPair => match field.local() {
            None => {}
            Some(LocalField::Real) => {
                for &(p1, q1) in &real_sigs(0) {
                    for &(p2, q2) in &real_sigs(0) {
                        if p1 + q1 + p2 + q2 >= 1 {
                            out.push(PairSpec::UPair {
                                bplus: HermForm::real(p1, q1),
                                bminus: HermForm::real(p2, q2),
                            });
                        }
                    }
                }
            }
            Some(_) => {
                for ext in exts() {
                    for (a, b) in dims_pairs() {
                        for bplus in HermForm::all_of_rank(ext, a) {
                            for bminus in HermForm::all_of_rank(ext, b) {
                                out.push(PairSpec::UPair { bplus, bminus });
                            }
                        }
                    }
                }
            }
        },
        Family::GlO => match field.local() {
            None => {}
            Some(LocalField::Real) => {
                for (p, q) in real_sigs(1) {
                    out.push(PairSpec::GlO { b: QuadForm::real(p, q) });
                }
            }
            Some(f) => {
                for rank in 1..=n {
                    for b in form_classes(f, rank) {
                        out.push(PairSpec::GlO { b });
                    }
                }
            }
        },
        Family::GlU => match field.local() {
            None => {}
            Some(LocalField::Real) => {
                for (p, q) in real_sigs(1) {
                    out.push(PairSpec::GlU { b: HermForm::real(p, q) });
                }
            }
            Some(_) => {
                for ext in exts() {
                    for rank in 1..=n {
                        for b in HermForm::all_of_rank(ext, rank) {
                            out.push(PairSpec::GlU { b });
                        }
                    }
                }
            }
        },
        Family::Quaternion => {
            if let Some(p) = field.local().and_then(|f| f.prime()) {
                if p % 4 == 3 && n >= 1 {
                    out.push(PairSpec::Quaternion { p });
                }
            }
        }
    }
    Ok(out)
}

/// Classifies every pair of `family` over `field` within `bounds`, in a
/// deterministic order. Families that do not exist over `field` give no rows.
pub fn sweep(family: Family, field: PairField, bounds: SweepBounds) -> Result<Vec<Row>> {
    let specs = specs_for(family, field, bounds)?;
    specs
        .into_par_iter()
        .map(|spec| classify(&spec).map(|verdict| Row { spec, verdict }))
        .collect()
}

/// [`sweep`] over every summary-table family, which is every family except
/// the quaternion example.
pub fn sweep_all(field: PairField, bounds: SweepBounds) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for family in Family::TABLE {
        rows.extend(sweep(family, field, bounds)?);
    }
    Ok(rows)
}

/// Re-derives the cross-checks that every row must satisfy and returns a
/// description of each violation.
pub fn check_row(row: &Row) -> Vec<String> {
    let mut bad = Vec::new();
    let v = &row.verdict;
    if !v.chain_holds() {
        bad.push("implication chain violated".to_string());
    }
    let mut expect = |what: &str, ok: bool| {
        if !ok {
            bad.push(what.to_string());
        }
    };
    match &row.spec {
        PairSpec::SlxGl { field, dim_plus, dim_minus } if *field != PairField::Complex => {
            expect("SLxGL must flip exactly at dim+ = dim-", (v.stable == Tri::Yes) == (dim_plus != dim_minus));
        }
        PairSpec::SlBasechange { dim, .. } => {
            expect("SL_basechange must follow the parity of dim", (v.stable == Tri::Yes) == (dim % 2 == 1));
        }
        PairSpec::OPair { bplus, bminus } => {
            let again = bplus_variants(bplus)
                .into_iter()
                .zip(bplus_variants(bminus))
                .all(|(p, m)| classify(&PairSpec::OPair { bplus: p, bminus: m }).as_ref() == Ok(v));
            expect("verdict must depend only on the equivalence classes", again);
            if !bplus.field().is_archimedean() {
                let formula = orthogonal_rank(bplus, bminus).unwrap_or(usize::MAX);
                let split = orthogonal_split_rank(bplus, bminus).unwrap_or(usize::MAX);
                expect("rank formula must match split enumeration", formula == split);
                expect("s-stable must match rank <= 1", (v.s_stable == Tri::Yes) == (formula <= 1));
                expect(
                    "Gelfand unknown exactly on p-stable, unstable rows",
                    (v.gelfand == Tri::Unknown) == (v.p_stable == Tri::Yes && v.stable == Tri::No),
                );
            } else {
                expect("real O rows are uniform", v.gelfand == v.stable && v.s_stable == v.stable);
            }
        }
        PairSpec::UPair { bplus, bminus } if !bplus.ext().base().is_archimedean() => {
            let d = condition_d(bplus.rank(), bminus.rank());
            expect("U rows: stable iff p-stable", v.stable == v.p_stable);
            expect("U rows: stable iff (D)", (v.stable == Tri::Yes) == d);
            let formula = unitary_rank(bplus, bminus).unwrap_or(usize::MAX);
            let split = unitary_split_rank(bplus, bminus).unwrap_or(usize::MAX);
            expect("unitary rank formula must match split enumeration", formula == split);
        }
        _ => {}
    }
    if v.gelfand == Tri::Unknown && row.spec.field() != PairField::Complex {
        expect(
            "Gelfand unknown only on O or quaternion rows",
            matches!(row.spec.family(), Family::OPair | Family::Quaternion),
        );
    }
    bad
}

/// Equivalent re-diagonalizations used to test that verdicts only depend on classes.
fn bplus_variants(b: &QuadForm) -> Vec<QuadForm> {
    let mut reversed = b.diag().to_vec();
    reversed.reverse();
    let canonical = QuadForm::from_invariants(&b.invariants()).expect("realizable");
    vec![QuadForm::new(b.field(), reversed).expect("same field"), canonical]
}

/// One line of the reproduced summary table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SummaryLine {
    /// Family tag.
    pub family: String,
    /// `Archimedean` or `non-Archimedean`.
    pub field_kind: String,
    /// Characterization of the stable rows.
    pub stable: String,
    /// Characterization of the s-stable rows.
    pub s_stable: String,
    /// Characterization of the p-stable rows.
    pub p_stable: String,
    /// Characterization of the Gelfand rows.
    pub gelfand: String,
}

type Predicate = (&'static str, fn(&PairSpec) -> bool);

fn predicates() -> Vec<Predicate> {
    fn dims(s: &PairSpec) -> Option<(usize, usize)> {
        match s {
            PairSpec::GlxGl { dim_plus, dim_minus, .. } | PairSpec::SlxGl { dim_plus, dim_minus, .. } => {
                Some((*dim_plus, *dim_minus))
            }
            _ => None,
        }
    }
    fn dim(s: &PairSpec) -> Option<usize> {
        match s {
            PairSpec::GlFOverE { dim, .. }
            | PairSpec::SlFOverE { dim, .. }
            | PairSpec::GlBasechange { dim, .. }
            | PairSpec::SlBasechange { dim, .. } => Some(*dim),
            PairSpec::GlO { b } => Some(b.rank()),
            PairSpec::GlU { b } => Some(b.rank()),
            _ => None,
        }
    }
    vec![
        ("always", |_| true),
        ("never", |_| false),
        ("dim V+ != dim V-", |s| dims(s).is_some_and(|(a, b)| a != b)),
        ("dim V odd", |s| dim(s).is_some_and(|d| d % 2 == 1)),
        ("dim V = 1", |s| dim(s) == Some(1)),
        ("B definite", |s| match s {
            PairSpec::GlO { b } => definite(b),
            PairSpec::GlU { b } => b.signature().is_some() && b.is_anisotropic(),
            _ => false,
        }),
        ("B+ or B- definite", |s| match s {
            PairSpec::OPair { bplus, bminus } => definite(bplus) || definite(bminus),
            PairSpec::UPair { bplus, bminus } => {
                bplus.signature().is_some() && (bplus.is_anisotropic() || bminus.is_anisotropic())
            }
            _ => false,
        }),
        ("(A)", |s| match s {
            PairSpec::OPair { bplus, bminus } => condition_a(bplus, bminus).unwrap_or(false),
            _ => false,
        }),
        ("(B)", |s| match s {
            PairSpec::OPair { bplus, bminus } => condition_b(bplus, bminus).unwrap_or(false),
            _ => false,
        }),
        ("(C)", |s| match s {
            PairSpec::OPair { bplus, bminus } => condition_c(bplus, bminus).unwrap_or(false),
            PairSpec::UPair { bplus, bminus } => condition_c_unitary(bplus, bminus).unwrap_or(false),
            _ => false,
        }),
        ("(D)", |s| match s {
            PairSpec::UPair { bplus, bminus } => condition_d(bplus.rank(), bminus.rank()),
            _ => false,
        }),
    ]
}

fn describe(rows: &[&Row], pick: fn(&Verdict) -> Tri) -> String {
    let unknown = rows.iter().filter(|r| pick(&r.verdict) == Tri::Unknown).count();
    if unknown == rows.len() {
        return "open".to_string();
    }
    let decided: Vec<&&Row> = rows.iter().filter(|r| pick(&r.verdict) != Tri::Unknown).collect();
    let label = predicates()
        .into_iter()
        .find(|(_, p)| decided.iter().all(|r| (pick(&r.verdict) == Tri::Yes) == p(&r.spec)))
        .map(|(l, _)| l.to_string())
        .unwrap_or_else(|| "mixed".to_string());
    if unknown > 0 {
        format!("{label}; open on {unknown} rows")
    } else {
        label
    }
}

/// Summarizes sweep rows per family and field kind: each cell names the first
/// characterization from a fixed menu that matches every decided row exactly.
pub fn summary_table(rows: &[Row]) -> Vec<SummaryLine> {
    let mut out = Vec::new();
    for family in Family::ALL {
        for arch in [true, false] {
            let group: Vec<&Row> = rows
                .iter()
                .filter(|r| {
                    r.spec.family() == family
                        && match r.spec.field() {
                            PairField::Complex => false,
                            PairField::Local(f) => f.is_archimedean() == arch,
                        }
                })
                .collect();
            if group.is_empty() {
                continue;
            }
            out.push(SummaryLine {
                family: family.tag().to_string(),
                field_kind: if arch { "Archimedean" } else { "non-Archimedean" }.to_string(),
                stable: describe(&group, |v| v.stable),
                s_stable: describe(&group, |v| v.s_stable),
                p_stable: describe(&group, |v| v.p_stable),
                gelfand: describe(&group, |v| v.gelfand),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qf(s: &str) -> QuadForm {
        s.parse().unwrap()
    }

    fn hf(s: &str) -> HermForm {
        s.parse().unwrap()
    }

    fn q(p: u64) -> PairField {
        PairField::Local(LocalField::padic(p).unwrap())
    }

    fn all(v: &Verdict) -> [Tri; 4] {
        [v.stable, v.s_stable, v.p_stable, v.gelfand]
    }

    #[test]
    fn sl_gl_equal_dims_is_unstable() {
        let v = classify(&PairSpec::SlxGl { field: q(3), dim_plus: 2, dim_minus: 2 }).unwrap();
        assert_eq!(all(&v), [Tri::No; 4]);
    }

    #[test]
    fn sl_basechange_odd_is_stable() {
        let ext = "Qp:5,d=u".parse().unwrap();
        let v = classify(&PairSpec::SlBasechange { ext, dim: 3 }).unwrap();
        assert_eq!(all(&v), [Tri::Yes; 4]);
    }

    #[test]
    fn o_pair_examples() {
        let v = classify(&PairSpec::OPair { bplus: qf("qf(R)[+,+]"), bminus: qf("qf(R)[+,-]") }).unwrap();
        assert_eq!((v.stable, v.gelfand), (Tri::Yes, Tri::Yes));
        let v = classify(&PairSpec::OPair { bplus: qf("qf(Qp:3)[1,1]"), bminus: qf("qf(Qp:3)[3,2]") }).unwrap();
        assert_eq!((v.stable, v.gelfand), (Tri::Yes, Tri::Yes));
        assert!(classify(&PairSpec::OPair { bplus: qf("qf(Qp:3)[]"), bminus: qf("qf(Qp:3)[]") }).is_err());
        assert!(classify(&PairSpec::OPair { bplus: qf("qf(Qp:3)[1]"), bminus: qf("qf(Qp:5)[1]") }).is_err());
    }

    #[test]
    fn u_pair_and_quaternion_examples() {
        let v = classify(&PairSpec::UPair {
            bplus: hf("hf(Qp:3,d=p)[rank=1,det=norm]"),
            bminus: hf("hf(Qp:3,d=p)[rank=3,det=nonnorm]"),
        })
        .unwrap();
        assert_eq!((v.stable, v.gelfand), (Tri::Yes, Tri::Yes));
        let v = classify(&PairSpec::Quaternion { p: 7 }).unwrap();
        assert_eq!((v.stable, v.s_stable, v.p_stable), (Tri::No, Tri::Yes, Tri::Yes));
        assert!(classify(&PairSpec::Quaternion { p: 5 }).is_err());
    }

    #[test]
    fn rank_examples() {
        assert!(orthogonal_rank(&qf("qf(Qp:3)[1]"), &qf("qf(Qp:3)[1,1,1]")).unwrap() <= 1);
        assert_eq!(orthogonal_rank(&qf("qf(R)[+,-]"), &qf("qf(R)[+,-]")).unwrap(), 2);
        assert_eq!(orthogonal_rank(&qf("qf(Qp:3)[1,1]"), &qf("qf(Qp:3)[3,2]")).unwrap(), 1);
        assert_eq!(unitary_rank(&hf("hf(C/R)[1,1]"), &hf("hf(C/R)[1,1]")).unwrap(), 2);
        assert!(unitary_rank(&hf("hf(Qp:3,d=p)[rank=1,det=norm]"), &hf("hf(Qp:3,d=p)[rank=3,det=norm]")).unwrap() <= 1);
    }

    #[test]
    fn sign_twin_examples() {
        let b = qf("qf(Qp:3)[1,u]");
        assert!(sign_twin_exists(&b, &b).unwrap());
        assert!(sign_twin_exists(&qf("qf(Qp:3)[1,p]"), &qf("qf(Qp:3)[1,-3]")).unwrap());
        assert!(!sign_twin_exists(&qf("qf(Qp:3)[1,1]"), &qf("qf(Qp:3)[3,2]")).unwrap());
        assert!(sign_twin_exists(&qf("qf(R)[+]"), &qf("qf(R)[+]")).is_err());
    }

    #[test]
    fn condition_examples() {
        let one = qf("qf(Qp:2)[1]");
        let big = qf("qf(Qp:2)[1,3,5]");
        assert!(condition_a(&one, &big).unwrap());
        assert!(condition_b(&one, &big).unwrap());
        assert!(condition_d(1, 3));
        let aniso = qf("qf(Qp:3)[1,1,up,up]");
        assert_eq!(aniso.mu(), 0);
        assert!(condition_b(&qf("qf(Qp:3)[1,1]"), &qf("qf(Qp:3)[up,up]")).unwrap());
        assert!(!condition_a(&qf("qf(Qp:2)[1,3]"), &qf("qf(Qp:2)[2,6]")).unwrap());
    }

    #[test]
    fn quaternion_kernel_is_generated_by_minus_p() {
        for p in [3, 7, 11, 19] {
            let f = LocalField::padic(p).unwrap();
            let k = quaternion_kernel(p).unwrap();
            assert_eq!(k.len(), 2);
            assert_eq!(k[1], SquareClass::from_int(f, -(p as i64)).unwrap());
        }
        assert!(quaternion_obstruction(2).is_err());
    }

    #[test]
    fn json_row_round_trip() {
        let spec = PairSpec::OPair { bplus: qf("qf(Qp:3)[1,1]"), bminus: qf("qf(Qp:3)[3,2]") };
        let row = Row { verdict: classify(&spec).unwrap(), spec };
        let json = serde_json::to_value(&row).unwrap();
        assert_eq!(json["family"], "O_pair");
        assert_eq!(json["params"]["bplus"], "qf(Qp:3)[1,1]");
        assert_eq!(json["stable"], "yes");
        let back: Row = serde_json::from_value(json).unwrap();
        assert_eq!(back, row);
    }

    #[test]
    fn empty_bounds_give_no_rows() {
        let rows = sweep(Family::OPair, q(3), SweepBounds { max_dim: 0, max_sig: 0 }).unwrap();
        assert!(rows.is_empty());
        assert!(sweep(Family::OPair, q(3), SweepBounds { max_dim: 7, max_sig: 0 }).is_err());
    }

    #[test]
    fn family_names_parse() {
        for f in Family::ALL {
            assert_eq!(f.tag().parse::<Family>().unwrap(), f);
        }
        assert_eq!("O".parse::<Family>().unwrap(), Family::OPair);
    }
}
