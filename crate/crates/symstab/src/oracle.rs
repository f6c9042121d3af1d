//! Brute-force ground truth for the closed-form engines.
//!
//! Every function here decides its question by finite search, independently of
//! the formulas in [`crate::sqclass`] and [`crate::quadform`]:
//!
//! * [`hilbert_oracle`] searches for primitive solutions of `a x^2 + b y^2 = z^2`
//!   modulo `p^N` with `N = v_p(4ab) + 3`;
//! * [`isotropy_oracle`] searches for primitive zeros of a diagonal form modulo
//!   `p^N` with `N = 2 max v_p(2 a_i) + 1`;
//! * [`subform_oracle`] enumerates diagonal complements;
//! * [`dimension_formula_check`] computes eigenspace dimensions of rational
//!   matrices by exact Gaussian elimination.
//!
//! The margins are Hensel bounds: once the entries have valuation at most one,
//! a primitive zero modulo `p^N` lifts to a genuine zero.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::quadform::{all_diagonal_forms, QuadForm};
use crate::sqclass::{enumerate_classes, LocalField, Sign, SquareClass};

/// Largest modulus any search is allowed to use.
const MAX_MODULUS: u64 = 1 << 22;

/// Largest number of candidate vectors an isotropy search may visit.
const MAX_CANDIDATES: u64 = 50_000_000;

fn valuation(mut x: i64, p: u64) -> u32 {
    let p = p as i64;
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Divides out even powers of `p`, leaving an integer of valuation 0 or 1 in
/// the same square class.
fn reduce(mut x: i64, p: u64) -> i64 {
    let q = (p * p) as i64;
    while x % q == 0 {
        x /= q;
    }
    x
}

fn modulus(p: u64, n: u32) -> Result<u64> {
    p.checked_pow(n)
        .filter(|&m| m <= MAX_MODULUS)
        .ok_or_else(|| Error::BudgetExceeded(format!("search modulus {p}^{n}")))
}

fn residue(x: i64, m: u64) -> u64 {
    x.rem_euclid(m as i64) as u64
}

/// `squares[r]` is true iff `r` is a square modulo `m`.
fn square_table(m: u64) -> Vec<bool> {
    let mut t = vec![false; m as usize];
    for z in 0..m {
        t[(z as u128 * z as u128 % m as u128) as usize] = true;
    }
    t
}

/// For every residue `r`, whether `r = z^2 (mod m)` for some `z` prime to `p`.
fn unit_square_table(m: u64, p: u64) -> Vec<bool> {
    let mut t = vec![false; m as usize];
    for z in (0..m).filter(|z| z % p != 0) {
        t[(z as u128 * z as u128 % m as u128) as usize] = true;
    }
    t
}

/// The Hilbert symbol of the integers `a`, `b` over `field`, by search.
///
/// Over `Q_p` this looks for a primitive `(x, y, z)` with
/// `a x^2 + b y^2 = z^2 (mod p^N)`, `N = v_p(4ab) + 3`, after reducing `a`
/// and `b` to valuation at most one.
pub fn hilbert_oracle(field: LocalField, a: i64, b: i64) -> Result<Sign> {
    if a == 0 || b == 0 {
        return Err(Error::ZeroInput);
    }
    let p = match field.prime() {
        None => return Ok(Sign::from_bool(!(a < 0 && b < 0))),
        Some(p) => p,
    };
    let (a, b) = (reduce(a, p), reduce(b, p));
    let n = valuation(4 * a * b, p) + 3;
    let m = modulus(p, n)?;
    let squares = square_table(m);
    let zero_unit = unit_square_table(m, p);
    let (ar, br) = (residue(a, m) as u128, residue(b, m) as u128);
    let q = |x: u64, y: u64| ((ar * (x as u128 * x as u128) + br * (y as u128 * y as u128)) % m as u128) as usize;
    // A primitive solution, scaled, has x a unit, or y a unit with p | x, or
    // z a unit with p | x and p | y.
    for y in 0..m {
        if squares[q(1, y)] {
            return Ok(Sign::Plus);
        }
    }
    for x in (0..m).step_by(p as usize) {
        if squares[q(x, 1)] {
            return Ok(Sign::Plus);
        }
    }
    for x in (0..m).step_by(p as usize) {
        for y in (0..m).step_by(p as usize) {
            if zero_unit[q(x, y)] {
                return Ok(Sign::Plus);
            }
        }
    }
    Ok(Sign::Minus)
}

/// Whether the diagonal form `B` is isotropic, by search for a primitive zero.
///
/// Over the reals this reads the signs. Over `Q_p` each entry is replaced by
/// its class representative and the search runs modulo `p^N` with
/// `N = 2 max v_p(2 a_i) + 1`.
pub fn isotropy_oracle(b: &QuadForm) -> Result<bool> {
    if b.rank() == 0 {
        return Err(Error::RankZero);
    }
    let field = b.field();
    let coeffs: Vec<i64> = b.diag().iter().map(SquareClass::representative).collect();
    let p = match field.prime() {
        None => {
            return Ok(coeffs.iter().any(|&c| c > 0) && coeffs.iter().any(|&c| c < 0));
        }
        Some(p) => p,
    };
    if b.rank() == 1 {
        return Ok(false);
    }
    let n = 2 * coeffs.iter().map(|&c| valuation(2 * c, p)).max().unwrap_or(0) + 1;
    let m = modulus(p, n)?;
    let k = coeffs.len();
    let budget = (k as u64).saturating_mul(m.saturating_pow(k as u32 - 1));
    if budget > MAX_CANDIDATES {
        return Err(Error::BudgetExceeded(format!("isotropy search over {budget} vectors")));
    }
    let rs: Vec<u128> = coeffs.iter().map(|&c| residue(c, m) as u128).collect();
    let mm = m as u128;
    // `hits[s]` is true iff `s + c_last t^2 = 0 (mod m)` for some `t`.
    let mut hits = vec![false; m as usize];
    for t in 0..mm {
        let v = rs[k - 1] * (t * t % mm) % mm;
        hits[((mm - v) % mm) as usize] = true;
    }
    // Scale a primitive vector so that its first unit coordinate is 1: earlier
    // coordinates are divisible by p, later ones are free, and the last one is
    // found by table lookup.
    for lead in 0..k {
        let free = (k - 1).saturating_sub(lead + 1);
        let mut idx = vec![0u64; lead + free];
        loop {
            let mut s = rs[lead];
            for (i, &x) in idx.iter().enumerate() {
                let (coeff, x) = if i < lead {
                    (rs[i], (x * p) as u128)
                } else {
                    (rs[i + 1], x as u128)
                };
                s += coeff * (x * x % mm);
            }
            let s = s % mm;
            let found = if lead == k - 1 { s == 0 } else { hits[s as usize] };
            if found {
                return Ok(true);
            }
            if !step_mixed(&mut idx, lead, m / p, m) {
                break;
            }
        }
    }
    Ok(false)
}

/// Mixed-radix counter: the first `head` digits run to `head_base`, the rest to `tail_base`.
fn step_mixed(idx: &mut [u64], head: usize, head_base: u64, tail_base: u64) -> bool {
    for (i, d) in idx.iter_mut().enumerate() {
        *d += 1;
        if *d < if i < head { head_base } else { tail_base } {
            return true;
        }
        *d = 0;
    }
    false
}

/// Whether `C <= B`, by enumerating diagonal complements `D` of rank
/// `rank B - rank C` and testing `C + D = B` on invariants.
pub fn subform_oracle(c: &QuadForm, b: &QuadForm) -> Result<bool> {
    if c.field() != b.field() {
        return Err(Error::FieldMismatch(c.field().to_string(), b.field().to_string()));
    }
    if c.rank() > b.rank() {
        return Ok(false);
    }
    for d in all_diagonal_forms(b.field(), b.rank() - c.rank()) {
        if c.direct_sum(&d)?.equivalent(b)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Partition of the diagonal forms of `rank` over `field` into isometry
/// classes, computed without invariants.
///
/// Two diagonal forms are isometric iff they are joined by a chain of moves
/// replacing adjacent entries `[a, b]` by `[c, abc]` where `[a, b]` represents
/// `c`; representation is decided by [`isotropy_oracle`] on `[a, b, -c]`.
/// Returns every form of [`all_diagonal_forms`] with a component label;
/// labels are the smallest index in the component.
pub fn chain_equivalence_classes(field: LocalField, rank: usize) -> Result<Vec<(QuadForm, usize)>> {
    let classes = enumerate_classes(field);
    let k = classes.len();
    let position = |c: &SquareClass| classes.iter().position(|x| x == c).expect("enumerated");
    let minus = SquareClass::minus_one(field);
    // represents[a][b][c]: whether [a, b] represents c.
    let mut represents = vec![vec![vec![false; k]; k]; k];
    for (a, ca) in classes.iter().enumerate() {
        for (b, cb) in classes.iter().enumerate() {
            for (c, cc) in classes.iter().enumerate() {
                let form = QuadForm::new(field, vec![*ca, *cb, *cc * minus])?;
                represents[a][b][c] = isotropy_oracle(&form)?;
            }
        }
    }
    let forms = all_diagonal_forms(field, rank);
    let code = |digits: &[usize]| digits.iter().rev().fold(0, |acc, &d| acc * k + d);
    let mut parent: Vec<usize> = (0..forms.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut index_of_code = vec![0usize; forms.len()];
    let digits_of: Vec<Vec<usize>> = forms.iter().map(|f| f.diag().iter().map(position).collect()).collect();
    for (i, d) in digits_of.iter().enumerate() {
        index_of_code[code(d)] = i;
    }
    for (i, digits) in digits_of.iter().enumerate() {
        for pos in 0..rank.saturating_sub(1) {
            let (a, b) = (digits[pos], digits[pos + 1]);
            let ab = classes[a] * classes[b];
            for c in 0..k {
                if !represents[a][b][c] {
                    continue;
                }
                let mut moved = digits.clone();
                moved[pos] = c;
                moved[pos + 1] = position(&(ab * classes[c]));
                let j = index_of_code[code(&moved)];
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let labels: Vec<usize> = (0..forms.len()).map(|i| find(&mut parent, i)).collect();
    Ok(forms.into_iter().zip(labels).collect())
}

/// Rational square matrix, row major.
pub type Matrix = Vec<Vec<Ratio<i128>>>;

/// Identity matrix of size `n`.
pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| Ratio::from_integer((i == j) as i128)).collect())
        .collect()
}

/// Matrix from integer entries.
pub fn matrix(rows: &[&[i128]]) -> Matrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| Ratio::from_integer(x)).collect())
        .collect()
}

/// Product `a b`.
pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn add_scalar(a: &Matrix, s: i128) -> Matrix {
    let mut out = a.clone();
    for (i, row) in out.iter_mut().enumerate() {
        row[i] += Ratio::from_integer(s);
    }
    out
}

/// Rank by Gaussian elimination.
pub fn rank(a: &Matrix) -> usize {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| m[i][c] != Ratio::from_integer(0)) else {
            continue;
        };
        m.swap(r, piv);
        let pv = m[r][c];
        for i in 0..rows {
            if i != r && m[i][c] != Ratio::from_integer(0) {
                let f = m[i][c] / pv;
                let pivot_row = m[r].clone();
                for (x, &y) in m[i][c..cols].iter_mut().zip(&pivot_row[c..cols]) {
                    *x -= y * f;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

fn kernel_dim(a: &Matrix) -> usize {
    a.len() - rank(a)
}

/// `dim (ker a  ∩  ker b)`, computed as the kernel of the stacked matrix.
fn joint_kernel_dim(a: &Matrix, b: &Matrix) -> usize {
    let mut stacked = a.clone();
    stacked.extend(b.iter().cloned());
    a.len() - rank(&stacked)
}

/// Checks the eigenspace dimension formulas for an involution `h` inverting a
/// semisimple `r`.
///
/// With `Sigma = n - dim V_1(r) - dim V_-1(r)`, verifies
/// `dim V_1(h) = Sigma/2 + dim(V_1(r) ∩ V_1(h)) + dim(V_-1(r) ∩ V_1(h))` and
/// `dim V_1(rh) = Sigma/2 + dim(V_1(r) ∩ V_1(h)) + dim(V_-1(r) ∩ V_-1(h))`.
/// Fails with [`Error::Invalid`] when `h^2 != 1`, `h r h^-1 != r^-1`, or `r`
/// is not semisimple at the eigenvalues `±1`.
pub fn dimension_formula_check(r: &Matrix, h: &Matrix) -> Result<bool> {
    let n = r.len();
    if h.len() != n || r.iter().chain(h.iter()).any(|row| row.len() != n) {
        return Err(Error::Invalid("matrices must be square of the same size".into()));
    }
    let id = identity(n);
    if mat_mul(h, h) != id {
        return Err(Error::Invalid("h is not an involution".into()));
    }
    let rh = mat_mul(r, h);
    if mat_mul(&rh, &rh) != id {
        return Err(Error::Invalid("h r h^-1 is not r^-1".into()));
    }
    for s in [-1, 1] {
        let a = add_scalar(r, s);
        if rank(&a) != rank(&mat_mul(&a, &a)) {
            return Err(Error::Invalid("r is not semisimple at ±1".into()));
        }
    }
    let r_plus = add_scalar(r, -1);
    let r_minus = add_scalar(r, 1);
    let h_plus = add_scalar(h, -1);
    let h_minus = add_scalar(h, 1);
    let sigma = n - kernel_dim(&r_plus) - kernel_dim(&r_minus);
    if sigma % 2 == 1 {
        return Ok(false);
    }
    let half = sigma / 2;
    let pp = joint_kernel_dim(&r_plus, &h_plus);
    let mp = joint_kernel_dim(&r_minus, &h_plus);
    let mm = joint_kernel_dim(&r_minus, &h_minus);
    let v1_h = kernel_dim(&h_plus);
    let v1_rh = kernel_dim(&add_scalar(&rh, -1));
    Ok(v1_h == half + pp + mp && v1_rh == half + pp + mm)
}

/// The primary block types used to build test instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    /// `r = diag(l, 1/l)` with `h = ±swap`.
    A {
        /// The eigenvalue `l`.
        lambda: i128,
        /// Sign of the swap.
        plus: bool,
    },
    /// `r` the companion matrix of `x^2 - t x + 1` with `h = ±swap`.
    B {
        /// The trace `t`.
        trace: i128,
        /// Sign of the swap.
        plus: bool,
    },
    /// `r = ±1` and `h = ±1` on a line.
    C {
        /// Sign of `r`.
        r_plus: bool,
        /// Sign of `h`.
        h_plus: bool,
    },
}

impl Block {
    fn dim(self) -> usize {
        match self {
            Block::C { .. } => 1,
            _ => 2,
        }
    }

    fn matrices(self) -> (Matrix, Matrix) {
        let sign = |b: bool| if b { 1 } else { -1 };
        match self {
            Block::A { lambda, plus } => {
                let z = Ratio::from_integer(0);
                let r = vec![
                    vec![Ratio::from_integer(lambda), z],
                    vec![z, Ratio::new(1, lambda)],
                ];
                (r, matrix(&[&[0, sign(plus)], &[sign(plus), 0]]))
            }
            Block::B { trace, plus } => (
                matrix(&[&[0, -1], &[1, trace]]),
                matrix(&[&[0, sign(plus)], &[sign(plus), 0]]),
            ),
            Block::C { r_plus, h_plus } => (matrix(&[&[sign(r_plus)]]), matrix(&[&[sign(h_plus)]])),
        }
    }
}

/// Every block type with its parameter choices.
pub fn block_menu() -> Vec<Block> {
    let mut out = Vec::new();
    for plus in [true, false] {
        for lambda in [2, 3] {
            out.push(Block::A { lambda, plus });
        }
        for trace in [0, 1, 3] {
            out.push(Block::B { trace, plus });
        }
    }
    for r_plus in [true, false] {
        for h_plus in [true, false] {
            out.push(Block::C { r_plus, h_plus });
        }
    }
    out
}

fn block_diag(blocks: &[Block]) -> (Matrix, Matrix) {
    let n: usize = blocks.iter().map(|b| b.dim()).sum();
    let zero = Ratio::from_integer(0);
    let mut r = vec![vec![zero; n]; n];
    let mut h = vec![vec![zero; n]; n];
    let mut at = 0;
    for &b in blocks {
        let (rb, hb) = b.matrices();
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                r[at + i][at + j] = rb[i][j];
                h[at + i][at + j] = hb[i][j];
            }
        }
        at += b.dim();
    }
    (r, h)
}

/// Unimodular upper-triangular matrix with ones on the two superdiagonals, and
/// its inverse.
fn mixing(n: usize) -> (Matrix, Matrix) {
    let mut p = identity(n);
    for i in 0..n.saturating_sub(1) {
        p[i][i + 1] = Ratio::from_integer(1);
    }
    for i in 0..n.saturating_sub(2) {
        p[i][i + 2] = Ratio::from_integer(1);
    }
    // Back substitution for the upper-triangular inverse.
    let mut inv = identity(n);
    for col in 0..n {
        for i in (0..n).rev() {
            let mut s = if i == col { Ratio::from_integer(1) } else { Ratio::from_integer(0) };
            for (k, row) in inv.iter().enumerate().skip(i + 1) {
                s -= p[i][k] * row[col];
            }
            inv[i][col] = s;
        }
    }
    (p, inv)
}

/// All multisets of blocks from [`block_menu`] with total dimension at most
/// `max_dim`, each assembled block-diagonally and then conjugated by a fixed
/// unimodular change of basis.
pub fn generate_instances(max_dim: usize) -> Vec<(Matrix, Matrix)> {
    let menu = block_menu();
    let mut multisets: Vec<Vec<Block>> = Vec::new();
    let mut current = Vec::new();
    fn grow(
        menu: &[Block],
        start: usize,
        left: usize,
        current: &mut Vec<Block>,
        out: &mut Vec<Vec<Block>>,
    ) {
        if !current.is_empty() {
            out.push(current.clone());
        }
        for i in start..menu.len() {
            if menu[i].dim() <= left {
                current.push(menu[i]);
                grow(menu, i, left - menu[i].dim(), current, out);
                current.pop();
            }
        }
    }
    grow(&menu, 0, max_dim, &mut current, &mut multisets);
    multisets
        .iter()
        .map(|blocks| {
            let (r, h) = block_diag(blocks);
            let (p, pinv) = mixing(r.len());
            (mat_mul(&mat_mul(&p, &r), &pinv), mat_mul(&mat_mul(&p, &h), &pinv))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sqclass::hilbert;

    fn q(p: u64) -> LocalField {
        LocalField::padic(p).unwrap()
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_oracle(LocalField::Real, -1, -1).unwrap(), Sign::Minus);
        assert_eq!(hilbert_oracle(q(3), 3, 3).unwrap(), Sign::Minus);
        assert_eq!(hilbert_oracle(q(3), 2, 3).unwrap(), Sign::Minus);
        assert_eq!(hilbert_oracle(q(2), 17, 3).unwrap(), Sign::Plus);
        assert_eq!(hilbert_oracle(q(2), -1, -1).unwrap(), Sign::Minus);
        assert!(hilbert_oracle(q(3), 0, 1).is_err());
    }

    #[test]
    fn hilbert_agrees_with_formula_for_small_primes() {
        for p in [2, 3, 5] {
            let f = q(p);
            for a in enumerate_classes(f) {
                for b in enumerate_classes(f) {
                    let o = hilbert_oracle(f, a.representative(), b.representative()).unwrap();
                    assert_eq!(o, hilbert(&a, &b).unwrap(), "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn isotropy_examples() {
        let f = q(3);
        assert!(isotropy_oracle(&QuadForm::hyperbolic(f, 1)).unwrap());
        assert!(!isotropy_oracle(&QuadForm::from_ints(f, &[1, 1]).unwrap()).unwrap());
        assert!(isotropy_oracle(&QuadForm::from_ints(f, &[1, 2, 3, 6, 1]).unwrap()).unwrap());
        assert!(isotropy_oracle(&QuadForm::from_ints(f, &[1, 2, 3, 6]).unwrap()).unwrap());
        assert!(!isotropy_oracle(&QuadForm::from_ints(f, &[1, 1, 6, 6]).unwrap()).unwrap());
        assert!(!isotropy_oracle(&QuadForm::from_ints(q(2), &[1, 1, 1]).unwrap()).unwrap());
        assert!(isotropy_oracle(&QuadForm::from_ints(q(2), &[1, 1, 1, 1, 1]).unwrap()).unwrap());
    }

    #[test]
    fn subform_examples() {
        let f = q(3);
        let b = QuadForm::from_ints(f, &[1, 1, 3, 2]).unwrap();
        assert!(subform_oracle(&b, &b).unwrap());
        assert!(!subform_oracle(&QuadForm::from_ints(f, &[1]).unwrap(), &QuadForm::from_ints(f, &[3, 3]).unwrap()).unwrap());
    }

    #[test]
    fn chain_classes_match_invariants_in_rank_two() {
        for f in [q(3), LocalField::Real] {
            let labelled = chain_equivalence_classes(f, 2).unwrap();
            for (a, la) in &labelled {
                for (b, lb) in &labelled {
                    assert_eq!(la == lb, a.invariants() == b.invariants(), "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn dimension_formula_degenerate_cases() {
        let id = identity(3);
        let h = matrix(&[&[1, 0, 0], &[0, -1, 0], &[0, 0, 1]]);
        assert!(dimension_formula_check(&id, &h).unwrap());
        let minus: Matrix = matrix(&[&[-1, 0, 0], &[0, -1, 0], &[0, 0, -1]]);
        assert!(dimension_formula_check(&minus, &h).unwrap());
        let bad = matrix(&[&[1, 1], &[0, 1]]);
        assert!(dimension_formula_check(&bad, &identity(2)).is_err());
    }

    #[test]
    fn dimension_formula_on_type_a() {
        let (r, h) = block_diag(&[Block::A { lambda: 2, plus: true }]);
        assert!(dimension_formula_check(&r, &h).unwrap());
        assert!(generate_instances(4).iter().all(|(r, h)| dimension_formula_check(r, h).unwrap()));
    }
}
