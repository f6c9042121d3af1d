//! Non-degenerate quadratic forms over a local field.
//!
//! Forms are stored as diagonals `Q([a_1, ..., a_n])` of square classes. Over
//! `Q_p` a form is determined up to equivalence by its rank, determinant and
//! Hasse invariant `H = prod_{i<j} {a_i, a_j}`; over the reals by its signature.
//! Every operation below works through those invariants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sqclass::{enumerate_classes, same_field, symbol, LocalField, Sign, SquareClass};

/// Complete invariants of a quadratic form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuadInvariants {
    /// Rank, determinant and Hasse invariant of a form over `Q_p`.
    Padic {
        /// Number of variables.
        rank: usize,
        /// Determinant modulo squares.
        det: SquareClass,
        /// Hasse invariant.
        hasse: Sign,
    },
    /// Rank and signature of a real form.
    Real {
        /// Number of variables, always `pos + neg`.
        rank: usize,
        /// Number of positive entries.
        pos: usize,
        /// Number of negative entries.
        neg: usize,
    },
}

impl QuadInvariants {
    /// Invariants of the real form with the given signature.
    pub fn real(pos: usize, neg: usize) -> Self {
        QuadInvariants::Real {
            rank: pos + neg,
            pos,
            neg,
        }
    }

    /// The field the invariants refer to.
    pub fn field(&self) -> LocalField {
        match self {
            QuadInvariants::Padic { det, .. } => det.field(),
            QuadInvariants::Real { .. } => LocalField::Real,
        }
    }

    /// Rank of the form.
    pub fn rank(&self) -> usize {
        match *self {
            QuadInvariants::Padic { rank, .. } | QuadInvariants::Real { rank, .. } => rank,
        }
    }

    /// Determinant modulo squares; `(-1)^neg` over the reals.
    pub fn det(&self) -> SquareClass {
        match *self {
            QuadInvariants::Padic { det, .. } => det,
            QuadInvariants::Real { neg, .. } => {
                if neg % 2 == 1 {
                    SquareClass::minus_one(LocalField::Real)
                } else {
                    SquareClass::one(LocalField::Real)
                }
            }
        }
    }

    /// Hasse invariant; `(-1)^{neg(neg-1)/2}` over the reals.
    pub fn hasse(&self) -> Sign {
        match *self {
            QuadInvariants::Padic { hasse, .. } => hasse,
            QuadInvariants::Real { neg, .. } => Sign::from_parity((neg * neg.saturating_sub(1) / 2) as u64),
        }
    }

    /// Whether some form has these invariants.
    pub fn is_realizable(&self) -> bool {
        match *self {
            QuadInvariants::Real { rank, pos, neg } => rank == pos + neg,
            QuadInvariants::Padic { rank, det, hasse } => match rank {
                0 => det.is_trivial() && hasse == Sign::Plus,
                1 => hasse == Sign::Plus,
                2 => !(det == SquareClass::minus_one(det.field()) && hasse == Sign::Minus),
                _ => true,
            },
        }
    }

    /// Whether a form with these invariants represents zero nontrivially.
    /// The empty form is anisotropic.
    pub fn is_isotropic(&self) -> bool {
        match *self {
            QuadInvariants::Real { pos, neg, .. } => pos >= 1 && neg >= 1,
            QuadInvariants::Padic { rank, det, hasse } => {
                let f = det.field();
                let m = SquareClass::minus_one(f);
                match rank {
                    0 | 1 => false,
                    2 => det == m,
                    3 => hasse == symbol(&m, &(m * det)),
                    4 => !(det.is_trivial() && hasse == -symbol(&m, &m)),
                    _ => true,
                }
            }
        }
    }

    /// Invariants after splitting off one hyperbolic plane, if the form is isotropic.
    pub fn strip_hyperbolic(&self) -> Option<QuadInvariants> {
        if !self.is_isotropic() {
            return None;
        }
        Some(match *self {
            QuadInvariants::Real { pos, neg, .. } => QuadInvariants::real(pos - 1, neg - 1),
            QuadInvariants::Padic { rank, det, hasse } => {
                let m = SquareClass::minus_one(det.field());
                let det2 = det * m;
                QuadInvariants::Padic {
                    rank: rank - 2,
                    det: det2,
                    hasse: hasse * symbol(&m, &det2),
                }
            }
        })
    }

    /// Witt decomposition `(k, anisotropic kernel)`.
    pub fn witt_decompose(&self) -> (usize, QuadInvariants) {
        let mut k = 0;
        let mut cur = *self;
        while let Some(next) = cur.strip_hyperbolic() {
            k += 1;
            cur = next;
        }
        (k, cur)
    }

    /// Invariants of the orthogonal sum.
    pub fn direct_sum(&self, other: &QuadInvariants) -> Result<QuadInvariants> {
        same_field(self.field(), other.field())?;
        Ok(match (*self, *other) {
            (QuadInvariants::Real { pos, neg, .. }, QuadInvariants::Real { pos: p2, neg: n2, .. }) => {
                QuadInvariants::real(pos + p2, neg + n2)
            }
            _ => QuadInvariants::Padic {
                rank: self.rank() + other.rank(),
                det: self.det() * other.det(),
                hasse: self.hasse() * other.hasse() * symbol(&self.det(), &other.det()),
            },
        })
    }

    /// Invariants a complement `D` with `C + D = B` would need, where `self = B`.
    /// Returns `None` when `rank(C) > rank(B)` or, over the reals, when a
    /// signature entry of `C` exceeds that of `B`. The result may be unrealizable.
    pub fn forced_complement(&self, c: &QuadInvariants) -> Result<Option<QuadInvariants>> {
        same_field(self.field(), c.field())?;
        if c.rank() > self.rank() {
            return Ok(None);
        }
        Ok(match (*self, *c) {
            (QuadInvariants::Real { pos, neg, .. }, QuadInvariants::Real { pos: pc, neg: nc, .. }) => {
                (pc <= pos && nc <= neg).then(|| QuadInvariants::real(pos - pc, neg - nc))
            }
            _ => {
                let (db, dc) = (self.det(), c.det());
                let m = SquareClass::minus_one(db.field());
                Some(QuadInvariants::Padic {
                    rank: self.rank() - c.rank(),
                    det: db * dc,
                    hasse: self.hasse() * c.hasse() * symbol(&dc, &(m * db)),
                })
            }
        })
    }
}

/// A diagonal quadratic form `Q([a_1, ..., a_n])` over a local field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadForm {
    field: LocalField,
    diag: Vec<SquareClass>,
}

impl QuadForm {
    /// Builds the form with the given diagonal entries.
    pub fn new(field: LocalField, diag: Vec<SquareClass>) -> Result<Self> {
        for a in &diag {
            same_field(field, a.field())?;
        }
        Ok(QuadForm { field, diag })
    }

    /// Builds a form from integer diagonal entries.
    pub fn from_ints(field: LocalField, entries: &[i64]) -> Result<Self> {
        let diag = entries
            .iter()
            .map(|&x| SquareClass::from_int(field, x))
            .collect::<Result<_>>()?;
        Ok(QuadForm { field, diag })
    }

    /// The empty form of rank 0.
    pub fn empty(field: LocalField) -> Self {
        QuadForm { field, diag: vec![] }
    }

    /// The hyperbolic form `H_k = Q([1, -1, ..., 1, -1])` of rank `2k`.
    pub fn hyperbolic(field: LocalField, k: usize) -> Self {
        let (one, m) = (SquareClass::one(field), SquareClass::minus_one(field));
        QuadForm {
            field,
            diag: (0..k).flat_map(|_| [one, m]).collect(),
        }
    }

    /// The real form with `pos` entries `+1` followed by `neg` entries `-1`.
    pub fn real(pos: usize, neg: usize) -> Self {
        let f = LocalField::Real;
        let mut diag = vec![SquareClass::one(f); pos];
        diag.extend(std::iter::repeat_n(SquareClass::minus_one(f), neg));
        QuadForm { field: f, diag }
    }

    /// A diagonal form with the given invariants, if they are realizable.
    pub fn from_invariants(inv: &QuadInvariants) -> Result<Self> {
        if !inv.is_realizable() {
            return Err(Error::Invalid(format!("invariants {inv:?} are not realizable")));
        }
        match *inv {
            QuadInvariants::Real { pos, neg, .. } => Ok(QuadForm::real(pos, neg)),
            QuadInvariants::Padic { rank, .. } => {
                let field = inv.field();
                let tail = rank.min(3);
                let ones = vec![SquareClass::one(field); rank - tail];
                let classes = enumerate_classes(field);
                let mut idx = vec![0usize; tail];
                loop {
                    let mut diag = ones.clone();
                    diag.extend(idx.iter().map(|&i| classes[i]));
                    if invariants_of(field, &diag) == *inv {
                        return Ok(QuadForm { field, diag });
                    }
                    if !advance(&mut idx, classes.len()) {
                        unreachable!("realizable invariants of rank <= 3 have a diagonal representative");
                    }
                }
            }
        }
    }

    /// The field of definition.
    pub fn field(&self) -> LocalField {
        self.field
    }

    /// The diagonal entries.
    pub fn diag(&self) -> &[SquareClass] {
        &self.diag
    }

    /// Number of variables.
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Rank, determinant and Hasse invariant (signature over the reals).
    pub fn invariants(&self) -> QuadInvariants {
        invariants_of(self.field, &self.diag)
    }

    /// Equivalence, decided by comparing invariants.
    pub fn equivalent(&self, other: &QuadForm) -> Result<bool> {
        same_field(self.field, other.field)?;
        Ok(self.invariants() == other.invariants())
    }

    /// Orthogonal sum (concatenation of diagonals).
    pub fn direct_sum(&self, other: &QuadForm) -> Result<QuadForm> {
        same_field(self.field, other.field)?;
        let mut diag = self.diag.clone();
        diag.extend_from_slice(&other.diag);
        Ok(QuadForm {
            field: self.field,
            diag,
        })
    }

    /// Entrywise multiplication by `lambda`.
    pub fn scale(&self, lambda: &SquareClass) -> Result<QuadForm> {
        same_field(self.field, lambda.field())?;
        Ok(QuadForm {
            field: self.field,
            diag: self.diag.iter().map(|a| *a * *lambda).collect(),
        })
    }

    /// Whether the form represents zero nontrivially. Errors on the empty form.
    pub fn is_isotropic(&self) -> Result<bool> {
        if self.diag.is_empty() {
            return Err(Error::RankZero);
        }
        Ok(self.invariants().is_isotropic())
    }

    /// Witt index: the number of hyperbolic planes that split off.
    pub fn mu(&self) -> usize {
        self.witt_decompose().0
    }

    /// `B = H_k + B_an` with `B_an` anisotropic; returns `k` and the invariants of `B_an`.
    pub fn witt_decompose(&self) -> (usize, QuadInvariants) {
        self.invariants().witt_decompose()
    }

    /// Whether the form takes a value in the class `x`, i.e. `B + Q([-x])` is isotropic.
    pub fn represents(&self, x: &SquareClass) -> Result<bool> {
        if self.diag.is_empty() {
            return Err(Error::RankZero);
        }
        same_field(self.field, x.field())?;
        let minus_x = SquareClass::minus_one(self.field) * *x;
        let mut diag = self.diag.clone();
        diag.push(minus_x);
        Ok(invariants_of(self.field, &diag).is_isotropic())
    }

    /// All square classes represented by the form, in enumeration order.
    /// Empty for the empty form.
    pub fn rep_set(&self) -> Vec<SquareClass> {
        enumerate_classes(self.field)
            .into_iter()
            .filter(|x| self.represents(x).unwrap_or(false))
            .collect()
    }

    /// Whether `self` is (equivalent to) an orthogonal summand of `b`.
    pub fn is_subform(&self, b: &QuadForm) -> Result<bool> {
        same_field(self.field, b.field)?;
        Ok(b
            .invariants()
            .forced_complement(&self.invariants())?
            .is_some_and(|d| d.is_realizable()))
    }
}

/// Invariants of the diagonal form with the given entries.
pub(crate) fn invariants_of(field: LocalField, diag: &[SquareClass]) -> QuadInvariants {
    match field {
        LocalField::Real => {
            let neg = diag.iter().filter(|a| a.unit_tag() == 1).count();
            QuadInvariants::real(diag.len() - neg, neg)
        }
        LocalField::Padic(_) => {
            let mut det = SquareClass::one(field);
            let mut hasse = Sign::Plus;
            for a in diag {
                hasse = hasse * symbol(&det, a);
                det = det * *a;
            }
            QuadInvariants::Padic {
                rank: diag.len(),
                det,
                hasse,
            }
        }
    }
}

/// Advances a mixed-radix counter; returns false after the last value.
pub(crate) fn advance(idx: &mut [usize], base: usize) -> bool {
    for digit in idx.iter_mut().rev() {
        *digit += 1;
        if *digit < base {
            return true;
        }
        *digit = 0;
    }
    false
}

/// All diagonal forms of the given rank over the canonical class representatives.
pub fn all_diagonal_forms(field: LocalField, rank: usize) -> Vec<QuadForm> {
    let classes = enumerate_classes(field);
    let mut out = Vec::new();
    let mut idx = vec![0usize; rank];
    loop {
        out.push(QuadForm {
            field,
            diag: idx.iter().map(|&i| classes[i]).collect(),
        });
        if !advance(&mut idx, classes.len()) {
            return out;
        }
    }
}

/// One representative per equivalence class of forms of the given rank,
/// ordered by first occurrence among [`all_diagonal_forms`].
pub fn form_classes(field: LocalField, rank: usize) -> Vec<QuadForm> {
    if rank > 3 && !field.is_archimedean() {
        let mut out: Vec<QuadForm> = Vec::new();
        for f in form_classes(field, 3) {
            let mut diag = vec![SquareClass::one(field); rank - 3];
            diag.extend_from_slice(f.diag());
            let g = QuadForm { field, diag };
            if !out.iter().any(|h| h.invariants() == g.invariants()) {
                out.push(g);
            }
        }
        return out;
    }
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for f in all_diagonal_forms(field, rank) {
        let inv = f.invariants();
        if !seen.contains(&inv) {
            seen.push(inv);
            out.push(f);
        }
    }
    out
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens: Vec<String> = self.diag.iter().map(|a| a.token()).collect();
        write!(f, "qf({})[{}]", self.field, tokens.join(","))
    }
}

impl FromStr for QuadForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let err = || Error::Parse(format!("expected qf(<field>)[a,b,...], got `{s}`"));
        let rest = s.strip_prefix("qf(").ok_or_else(err)?;
        let (field, rest) = rest.split_once(')').ok_or_else(err)?;
        let body = rest
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(err)?;
        let field: LocalField = field.parse()?;
        let diag = if body.trim().is_empty() {
            vec![]
        } else {
            body.split(',')
                .map(|t| SquareClass::parse_token(field, t))
                .collect::<Result<_>>()?
        };
        Ok(QuadForm { field, diag })
    }
}

impl Serialize for QuadForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuadForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
