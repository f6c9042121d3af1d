//! First cohomology of finite groups with an involution.
//!
//! For a finite group `G` with involution `theta` the symmetric part is
//! `S = { s : theta(s) = s^-1 }`, the cocycles of `Z/2` acting through `theta`.
//! `G` acts on `S` by `delta_g(s) = g^-1 s theta(g)` and `H^1(theta, G)` is the
//! set of orbits, pointed by the orbit of the identity. Every statement about
//! these objects is decided by enumeration.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Largest group order accepted from multiplication tables.
pub const MAX_ORDER: usize = 200;

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    names: Vec<String>,
    table: Vec<usize>,
    inv: Vec<usize>,
    id: usize,
    flip: Option<Vec<usize>>,
}

impl Group {
    /// Builds a group from element names and a table with `mul[a][b] = a*b`.
    ///
    /// The table is checked for closure, identity and inverses; associativity is
    /// checked exhaustively up to order 64 and on a deterministic sample above.
    pub fn from_table(names: Vec<String>, mul: Vec<Vec<usize>>) -> Result<Group> {
        let n = names.len();
        if n == 0 || n > MAX_ORDER {
            return Err(Error::Invalid(format!("group order {n} outside 1..={MAX_ORDER}")));
        }
        if mul.len() != n || mul.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::Invalid("multiplication table must be n x n with entries < n".into()));
        }
        let table: Vec<usize> = mul.into_iter().flatten().collect();
        let at = |a: usize, b: usize| table[a * n + b];
        let id = (0..n)
            .find(|&e| (0..n).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| Error::Invalid("no identity element".into()))?;
        let mut inv = vec![0; n];
        for (a, slot) in inv.iter_mut().enumerate() {
            *slot = (0..n)
                .find(|&b| at(a, b) == id && at(b, a) == id)
                .ok_or_else(|| Error::Invalid(format!("element {} has no inverse", names[a])))?;
        }
        let sample: Vec<usize> = if n <= 64 {
            (0..n).collect()
        } else {
            (0..n).step_by(n / 16).collect()
        };
        for a in 0..n {
            for b in 0..n {
                for &c in &sample {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return Err(Error::Invalid("multiplication is not associative".into()));
                    }
                }
            }
        }
        Ok(Group {
            names,
            table,
            inv,
            id,
            flip: None,
        })
    }

    /// Number of elements.
    pub fn order(&self) -> usize {
        self.names.len()
    }

    /// Product `a * b`.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b]
    }

    /// Inverse of `a`.
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// Index of the identity.
    pub fn id(&self) -> usize {
        self.id
    }

    /// Name of element `a`.
    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    /// All element names in index order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Index of the element with the given name.
    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Invalid(format!("no element named `{name}`")))
    }

    /// `g x g^-1`.
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// Whether `x` commutes with every element.
    pub fn is_central(&self, x: usize) -> bool {
        (0..self.order()).all(|g| self.mul(g, x) == self.mul(x, g))
    }

    /// Centralizer of `x`, sorted.
    pub fn centralizer(&self, x: usize) -> Vec<usize> {
        (0..self.order()).filter(|&g| self.mul(g, x) == self.mul(x, g)).collect()
    }

    /// Conjugacy class of `x`, sorted.
    pub fn conjugacy_class(&self, x: usize) -> Vec<usize> {
        let set: BTreeSet<usize> = (0..self.order()).map(|g| self.conj(g, x)).collect();
        set.into_iter().collect()
    }

    /// Order of the element `x`.
    pub fn element_order(&self, x: usize) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != self.id {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    /// Subgroup generated by `gens`, sorted.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.id] = true;
        let mut queue = vec![self.id];
        let mut i = 0;
        while i < queue.len() {
            let x = queue[i];
            i += 1;
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push(y);
                }
            }
        }
        (0..self.order()).filter(|&x| seen[x]).collect()
    }

    /// Whether `k` is a subgroup.
    pub fn is_subgroup(&self, k: &[usize]) -> bool {
        let set: BTreeSet<usize> = k.iter().copied().collect();
        set.contains(&self.id)
            && k.iter()
                .all(|&a| set.contains(&self.inv(a)) && k.iter().all(|&b| set.contains(&self.mul(a, b))))
    }

    /// A small generating set: a single generator or pair if one exists,
    /// otherwise a pair extended greedily.
    pub fn generators(&self) -> Vec<usize> {
        let n = self.order();
        if n == 1 {
            return vec![];
        }
        if let Some(g) = (0..n).find(|&g| self.closure(&[g]).len() == n) {
            return vec![g];
        }
        let mut best: Vec<usize> = vec![];
        let mut best_size = 0;
        for a in 0..n {
            for b in a + 1..n {
                let size = self.closure(&[a, b]).len();
                if size == n {
                    return vec![a, b];
                }
                if size > best_size {
                    best_size = size;
                    best = vec![a, b];
                }
            }
        }
        loop {
            let current = self.closure(&best);
            if current.len() == n {
                return best;
            }
            let next = (0..n)
                .filter(|x| current.binary_search(x).is_err())
                .max_by_key(|&x| {
                    let mut g = best.clone();
                    g.push(x);
                    (self.closure(&g).len(), std::cmp::Reverse(x))
                })
                .expect("proper subgroup has a complement element");
            best.push(next);
        }
    }

    /// The map `g -> h g h^-1`.
    pub fn inner(&self, h: usize) -> Vec<usize> {
        (0..self.order()).map(|g| self.conj(h, g)).collect()
    }

    /// The factor swap `(a, b) -> (b, a)` when the group was built as `A x A`.
    pub fn flip(&self) -> Option<&[usize]> {
        self.flip.as_deref()
    }

    /// All automorphisms, as permutations of the element indices.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let gens = self.generators();
        let n = self.order();
        let candidates: Vec<Vec<usize>> = gens
            .iter()
            .map(|&g| {
                let o = self.element_order(g);
                (0..n).filter(|&x| self.element_order(x) == o).collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; gens.len()];
        loop {
            let images: Vec<usize> = idx.iter().zip(&candidates).map(|(&i, c)| c[i]).collect();
            if let Some(map) = self.extend_hom(&gens, &images) {
                out.push(map);
            }
            let mut pos = gens.len();
            loop {
                if pos == 0 {
                    out.sort();
                    return out;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < candidates[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    /// Extends `gens[i] -> images[i]` to a bijective endomorphism, if possible.
    fn extend_hom(&self, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
        let n = self.order();
        let mut map = vec![usize::MAX; n];
        map[self.id] = self.id;
        let mut queue = vec![self.id];
        let mut i = 0;
        while i < queue.len() {
            let x = queue[i];
            i += 1;
            for (&g, &img) in gens.iter().zip(images) {
                let y = self.mul(x, g);
                let val = self.mul(map[x], img);
                if map[y] == usize::MAX {
                    map[y] = val;
                    queue.push(y);
                } else if map[y] != val {
                    return None;
                }
            }
        }
        let mut hit = vec![false; n];
        for &v in &map {
            if v == usize::MAX || hit[v] {
                return None;
            }
            hit[v] = true;
        }
        Some(map)
    }

    /// Automorphisms `theta` with `theta o theta = id`, the identity included.
    pub fn involutions(&self) -> Vec<Vec<usize>> {
        self.automorphisms()
            .into_iter()
            .filter(|t| (0..self.order()).all(|g| t[t[g]] == g))
            .collect()
    }

    /// Named menu of involutions: `id`, `flip` for `A x A`, `inv` for abelian
    /// groups, `conj:<h>` for inner involutions, and `auto:<k>` for the k-th
    /// involution in [`Group::involutions`] order.
    pub fn involution_menu(&self) -> Vec<(String, Vec<usize>)> {
        let mut menu = Vec::new();
        for (k, t) in self.involutions().into_iter().enumerate() {
            let name = if t.iter().enumerate().all(|(g, &x)| g == x) {
                "id".to_string()
            } else if self.flip() == Some(&t[..]) {
                "flip".to_string()
            } else if (0..self.order()).all(|g| t[g] == self.inv(g)) {
                "inv".to_string()
            } else if let Some(h) = (0..self.order()).find(|&h| self.inner(h) == t) {
                format!("conj:{}", self.name(h))
            } else {
                format!("auto:{k}")
            };
            menu.push((name, t));
        }
        menu
    }

    /// Resolves an involution name (see [`Group::involution_menu`]); `conj:<h>` is
    /// accepted for any `h` with `h^2` central.
    pub fn involution_by_name(&self, name: &str) -> Result<Vec<usize>> {
        if let Some(h) = name.strip_prefix("conj:") {
            let h = self.index_of(h)?;
            if !self.is_central(self.mul(h, h)) {
                return Err(Error::Invalid(format!("conjugation by {} is not an involution", self.name(h))));
            }
            return Ok(self.inner(h));
        }
        if let Some(k) = name.strip_prefix("auto:") {
            let k: usize = k.parse().map_err(|_| Error::Parse(format!("bad involution `{name}`")))?;
            return self
                .involutions()
                .into_iter()
                .nth(k)
                .ok_or_else(|| Error::Invalid(format!("no involution number {k}")));
        }
        match name {
            "id" => Ok((0..self.order()).collect()),
            "flip" => self
                .flip()
                .map(<[usize]>::to_vec)
                .ok_or_else(|| Error::Invalid("flip needs a group of the form A x A".into())),
            "inv" => {
                let t: Vec<usize> = (0..self.order()).map(|g| self.inv(g)).collect();
                if (0..self.order()).all(|a| (0..self.order()).all(|b| self.mul(a, b) == self.mul(b, a))) {
                    Ok(t)
                } else {
                    Err(Error::Invalid("inversion is an automorphism only for abelian groups".into()))
                }
            }
            _ => Err(Error::Parse(format!("unknown involution `{name}`"))),
        }
    }

    /// The cyclic group `Z/n`, elements named `0..n-1`.
    pub fn cyclic(n: usize) -> Result<Group> {
        let names = (0..n).map(|i| i.to_string()).collect();
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Group::from_table(names, mul)
    }

    /// The dihedral group of order `2n`, elements `r^a s^e` named `e, r, r2, ..., s, rs, r2s, ...`.
    pub fn dihedral(n: usize) -> Result<Group> {
        let name = |a: usize, e: usize| {
            let r = match a {
                0 => String::new(),
                1 => "r".to_string(),
                _ => format!("r{a}"),
            };
            match (r.is_empty(), e) {
                (true, 0) => "e".to_string(),
                (_, 0) => r,
                _ => format!("{r}s"),
            }
        };
        let idx = |a: usize, e: usize| a + n * e;
        let mut names = vec![String::new(); 2 * n];
        let mut mul = vec![vec![0; 2 * n]; 2 * n];
        for a in 0..n {
            for e in 0..2 {
                names[idx(a, e)] = name(a, e);
                for b in 0..n {
                    for f in 0..2 {
                        let c = if e == 0 { (a + b) % n } else { (a + n - b) % n };
                        mul[idx(a, e)][idx(b, f)] = idx(c, (e + f) % 2);
                    }
                }
            }
        }
        Group::from_table(names, mul)
    }

    /// The quaternion group `{+-1, +-i, +-j, +-k}`.
    pub fn quaternion() -> Result<Group> {
        // unit index 0..4 = 1, i, j, k; product table (sign, unit)
        const UNIT: [[(bool, usize); 4]; 4] = [
            [(false, 0), (false, 1), (false, 2), (false, 3)],
            [(false, 1), (true, 0), (false, 3), (true, 2)],
            [(false, 2), (true, 3), (true, 0), (false, 1)],
            [(false, 3), (false, 2), (true, 1), (true, 0)],
        ];
        let letters = ["1", "i", "j", "k"];
        let idx = |neg: bool, u: usize| 2 * u + neg as usize;
        let mut names = vec![String::new(); 8];
        let mut mul = vec![vec![0; 8]; 8];
        for u in 0..4 {
            for su in [false, true] {
                names[idx(su, u)] = format!("{}{}", if su { "-" } else { "" }, letters[u]);
                for v in 0..4 {
                    for sv in [false, true] {
                        let (s, w) = UNIT[u][v];
                        mul[idx(su, u)][idx(sv, v)] = idx(s ^ su ^ sv, w);
                    }
                }
            }
        }
        Group::from_table(names, mul)
    }

    /// The symmetric group on `n <= 5` letters; elements in lexicographic order of
    /// their one-line notation, named in cycle notation such as `(12)(34)`, with
    /// `(sigma tau)(i) = sigma(tau(i))`.
    pub fn symmetric(n: usize) -> Result<Group> {
        if n == 0 || n > 5 {
            return Err(Error::Invalid("symmetric groups are built for 1 <= n <= 5".into()));
        }
        let mut perms: Vec<Vec<usize>> = vec![(0..n).collect()];
        loop {
            let mut p = perms.last().unwrap().clone();
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
            p.swap(i, j);
            p[i + 1..].reverse();
            perms.push(p);
        }
        let index = |p: &Vec<usize>| perms.iter().position(|q| q == p).unwrap();
        let names = perms.iter().map(|p| cycle_name(p)).collect();
        let mul = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| index(&(0..n).map(|i| a[b[i]]).collect()))
                    .collect()
            })
            .collect();
        Group::from_table(names, mul)
    }

    /// Direct product `A x B` with elements `(a,b)` at index `a |B| + b`.
    pub fn direct_product(a: &Group, b: &Group) -> Result<Group> {
        let (na, nb) = (a.order(), b.order());
        let names = (0..na)
            .flat_map(|i| (0..nb).map(move |j| (i, j)))
            .map(|(i, j)| format!("({},{})", a.name(i), b.name(j)))
            .collect();
        let mul = (0..na * nb)
            .map(|x| {
                (0..na * nb)
                    .map(|y| a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb))
                    .collect()
            })
            .collect();
        let mut g = Group::from_table(names, mul)?;
        if a == b {
            g.flip = Some((0..na * nb).map(|x| (x % nb) * nb + x / nb).collect());
        }
        Ok(g)
    }

    /// Builtin groups by name: `Z<n>`, `D<n>` (order `2n`), `Q8`, `S<n>`, `1` for
    /// the trivial group, and products written `AxB` such as `S3xS3` or `D4xZ2`.
    pub fn builtin(name: &str) -> Result<Group> {
        let name = name.trim();
        if let Some((l, r)) = name.split_once('x') {
            return Group::direct_product(&Group::builtin(l)?, &Group::builtin(r)?);
        }
        let num = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::Parse(format!("unknown builtin group `{name}`")))
        };
        match name {
            "1" => Group::cyclic(1),
            "Q8" => Group::quaternion(),
            _ if name.starts_with('Z') => Group::cyclic(num(&name[1..])?),
            _ if name.starts_with('D') => Group::dihedral(num(&name[1..])?),
            _ if name.starts_with('S') => Group::symmetric(num(&name[1..])?),
            _ => Err(Error::Parse(format!("unknown builtin group `{name}`"))),
        }
    }
}

fn cycle_name(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        out.push('(');
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            out.push_str(&(i + 1).to_string());
            i = p[i];
        }
        out.push(')');
    }
    if out.is_empty() {
        "()".to_string()
    } else {
        out
    }
}

/// JSON input format for a group with involution.
///
/// `mul[a][b]` is the index of `a*b`; `theta[g]` is the index of `theta(g)`.
/// A missing `theta` means the identity involution.
#[derive(Debug, Deserialize)]
pub struct GroupJson {
    /// Element names.
    pub elements: Vec<String>,
    /// Multiplication table by index.
    pub mul: Vec<Vec<usize>>,
    /// Involution table by index.
    #[serde(default)]
    pub theta: Option<Vec<usize>>,
}

/// An orbit of the symmetric part under the coboundary action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyClass {
    /// The smallest element index in the orbit.
    pub representative: usize,
    /// All members, sorted.
    pub orbit: Vec<usize>,
}

/// A finite group together with an involutive automorphism.
#[derive(Clone, Debug)]
pub struct InvolutiveGroup {
    group: Arc<Group>,
    theta: Vec<usize>,
}

impl InvolutiveGroup {
    /// Pairs a group with `theta`, checking that it is an automorphism of order at most 2.
    pub fn new(group: Arc<Group>, theta: Vec<usize>) -> Result<Self> {
        let n = group.order();
        if theta.len() != n || theta.iter().any(|&x| x >= n) {
            return Err(Error::Invalid("theta table must have one entry < n per element".into()));
        }
        if (0..n).any(|g| theta[theta[g]] != g) {
            return Err(Error::Invalid("theta is not an involution".into()));
        }
        for a in 0..n {
            for b in 0..n {
                if theta[group.mul(a, b)] != group.mul(theta[a], theta[b]) {
                    return Err(Error::Invalid("theta is not a homomorphism".into()));
                }
            }
        }
        Ok(InvolutiveGroup { group, theta })
    }

    /// Parses the JSON group format of [`GroupJson`].
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GroupJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let n = spec.elements.len();
        let group = Arc::new(Group::from_table(spec.elements, spec.mul)?);
        let theta = spec.theta.unwrap_or_else(|| (0..n).collect());
        InvolutiveGroup::new(group, theta)
    }

    /// The underlying group.
    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    /// `theta(g)`.
    pub fn theta(&self, g: usize) -> usize {
        self.theta[g]
    }

    /// `sigma(g) = theta(g)^-1`.
    pub fn sigma(&self, g: usize) -> usize {
        self.group.inv(self.theta[g])
    }

    /// The coboundary action `delta_g(s) = g^-1 s theta(g)`.
    pub fn delta(&self, g: usize, s: usize) -> usize {
        let grp = &self.group;
        grp.mul(grp.mul(grp.inv(g), s), self.theta[g])
    }

    /// The symmetric part `S = { s : theta(s) = s^-1 }`, sorted.
    pub fn symmetric_part(&self) -> Vec<usize> {
        (0..self.group.order())
            .filter(|&s| self.theta[s] == self.group.inv(s))
            .collect()
    }

    /// The fixed-point subgroup `H = G^theta`, sorted.
    pub fn fixed_subgroup(&self) -> Vec<usize> {
        (0..self.group.order()).filter(|&g| self.theta[g] == g).collect()
    }

    fn check_stable_subgroup(&self, k: &[usize]) -> Result<()> {
        if !self.group.is_subgroup(k) {
            return Err(Error::Invalid("not a subgroup".into()));
        }
        let set: BTreeSet<usize> = k.iter().copied().collect();
        if k.iter().any(|&x| !set.contains(&self.theta[x])) {
            return Err(Error::Invalid("subgroup is not theta-stable".into()));
        }
        Ok(())
    }

    /// Orbits of `S` under `delta`, the class of the identity first.
    pub fn h1(&self) -> Vec<CohomologyClass> {
        let all: Vec<usize> = (0..self.group.order()).collect();
        self.orbits_within(&all)
    }

    /// `H^1(theta, K)` for a theta-stable subgroup `K`.
    pub fn h1_of_subgroup(&self, k: &[usize]) -> Result<Vec<CohomologyClass>> {
        self.check_stable_subgroup(k)?;
        Ok(self.orbits_within(k))
    }

    fn orbits_within(&self, k: &[usize]) -> Vec<CohomologyClass> {
        let grp = &self.group;
        let set: BTreeSet<usize> = k.iter().copied().collect();
        let s_k: Vec<usize> = self
            .symmetric_part()
            .into_iter()
            .filter(|s| set.contains(s))
            .collect();
        let mut assigned = vec![false; grp.order()];
        let mut classes = Vec::new();
        let mut starts = vec![grp.id()];
        starts.extend(s_k.iter().copied().filter(|&s| s != grp.id()));
        for s in starts {
            if assigned[s] {
                continue;
            }
            let orbit: BTreeSet<usize> = k.iter().map(|&g| self.delta(g, s)).collect();
            for &x in &orbit {
                assigned[x] = true;
            }
            let orbit: Vec<usize> = orbit.into_iter().collect();
            classes.push(CohomologyClass {
                representative: orbit[0],
                orbit,
            });
        }
        classes
    }

    /// Classes of `H^1(theta, K)` that become trivial in `H^1(theta, G)`.
    pub fn kernel_h1(&self, k: &[usize]) -> Result<Vec<CohomologyClass>> {
        let classes = self.h1_of_subgroup(k)?;
        let trivial: BTreeSet<usize> = (0..self.group.order())
            .map(|g| self.delta(g, self.group.id()))
            .collect();
        Ok(classes
            .into_iter()
            .filter(|c| trivial.contains(&c.representative))
            .collect())
    }

    /// The twisted involution `theta_a(g) = a theta(g) a^-1` for a cocycle `a`.
    pub fn twist(&self, a: usize) -> Result<InvolutiveGroup> {
        let grp = &self.group;
        if self.theta[a] != grp.inv(a) {
            return Err(Error::Invalid(format!("{} is not in the symmetric part", grp.name(a))));
        }
        let theta = (0..grp.order()).map(|g| grp.conj(a, self.theta[g])).collect();
        InvolutiveGroup::new(Arc::clone(grp), theta)
    }

    /// Checks that `s -> s a` maps the cocycles of the twist by `a` bijectively
    /// onto those of `theta` and carries orbits onto orbits. The base point of
    /// the twist, the orbit of the identity, then lands on the class of `a`.
    pub fn twist_bijection_ok(&self, a: usize) -> Result<bool> {
        let twisted = self.twist(a)?;
        let grp = &self.group;
        let shift = |s: usize| grp.mul(s, a);
        let mut image: Vec<usize> = twisted.symmetric_part().into_iter().map(shift).collect();
        image.sort_unstable();
        if image != self.symmetric_part() {
            return Ok(false);
        }
        let ours = self.h1();
        let class_of = |x: usize| ours.iter().position(|c| c.orbit.binary_search(&x).is_ok());
        let theirs = twisted.h1();
        let mut hit = vec![false; ours.len()];
        for c in &theirs {
            let mut mapped: Vec<usize> = c.orbit.iter().map(|&s| shift(s)).collect();
            mapped.sort_unstable();
            let Some(i) = class_of(mapped[0]) else { return Ok(false) };
            if ours[i].orbit != mapped || hit[i] {
                return Ok(false);
            }
            hit[i] = true;
        }
        Ok(hit.iter().all(|&h| h))
    }

    /// The symmetrization `s(g) = g sigma(g) = g theta(g)^-1`.
    pub fn symmetrization(&self, g: usize) -> usize {
        self.group.mul(g, self.sigma(g))
    }

    /// `S_0 = { s(g) }` and whether `|S_0| = [G : H]`.
    pub fn symmetrization_classes(&self) -> (Vec<usize>, bool) {
        let s0: BTreeSet<usize> = (0..self.group.order()).map(|g| self.symmetrization(g)).collect();
        let index = self.group.order() / self.fixed_subgroup().len();
        let ok = s0.len() == index;
        (s0.into_iter().collect(), ok)
    }

    /// The double coset `H g H`, sorted.
    pub fn double_coset(&self, g: usize) -> Vec<usize> {
        let h = self.fixed_subgroup();
        let grp = &self.group;
        let set: BTreeSet<usize> = h
            .iter()
            .flat_map(|&x| h.iter().map(move |&y| grp.mul(grp.mul(x, g), y)))
            .collect();
        set.into_iter().collect()
    }

    /// Whether `sigma(HgH) = HgH`, by direct set comparison.
    pub fn double_coset_stable(&self, g: usize) -> bool {
        let coset = self.double_coset(g);
        let mut image: Vec<usize> = coset.iter().map(|&x| self.sigma(x)).collect();
        image.sort_unstable();
        image == coset
    }

    /// Stability of `g` decided in the centralizer of `r = s(g)`: `g` is stable
    /// iff `r` lies in the `delta_{Z_G(r)}`-orbit of the identity.
    pub fn centralizer_criterion(&self, g: usize) -> bool {
        let r = self.symmetrization(g);
        self.group
            .centralizer(r)
            .into_iter()
            .any(|z| self.delta(z, self.group.id()) == r)
    }

    /// For a theta-fixed `x0`, returns the number of `G^theta`-orbits on the
    /// theta-fixed part of the conjugacy class of `x0`, and the size of the kernel
    /// of `H^1(theta, Z_G(x0)) -> H^1(theta, G)`. The two agree.
    pub fn descent_counts(&self, x0: usize) -> Result<(usize, usize)> {
        if self.theta[x0] != x0 {
            return Err(Error::Invalid(format!("{} is not theta-fixed", self.group.name(x0))));
        }
        let grp = &self.group;
        let fixed_points: Vec<usize> = grp
            .conjugacy_class(x0)
            .into_iter()
            .filter(|&x| self.theta[x] == x)
            .collect();
        let h = self.fixed_subgroup();
        let mut seen = BTreeSet::new();
        let mut orbits = 0;
        for &x in &fixed_points {
            if seen.insert(x) {
                orbits += 1;
                for &y in &h {
                    seen.insert(grp.conj(y, x));
                }
            }
        }
        let kernel = self.kernel_h1(&grp.centralizer(x0))?.len();
        Ok((orbits, kernel))
    }
}

/// For `h` with `h^2` central, checks that `r -> r h` induces a bijection from
/// `H^1(Ad_h, G)` onto the conjugacy classes of `{ h' : h'^2 = h^2 }`, sending the
/// base point to the class of `h`.
pub fn conjugacy_bijection_check(group: &Arc<Group>, h: usize) -> Result<bool> {
    let hh = group.mul(h, h);
    if !group.is_central(hh) {
        return Err(Error::Invalid(format!("{}^2 is not central", group.name(h))));
    }
    let ig = InvolutiveGroup::new(Arc::clone(group), group.inner(h))?;
    let target: BTreeSet<usize> = (0..group.order()).filter(|&x| group.mul(x, x) == hh).collect();
    let mut covered = BTreeSet::new();
    for (i, class) in ig.h1().iter().enumerate() {
        let mut image: Vec<usize> = class.orbit.iter().map(|&r| group.mul(r, h)).collect();
        image.sort_unstable();
        if image != group.conjugacy_class(image[0]) {
            return Ok(false);
        }
        if i == 0 && image.binary_search(&h).is_err() {
            return Ok(false);
        }
        for x in image {
            if !target.contains(&x) || !covered.insert(x) {
                return Ok(false);
            }
        }
    }
    Ok(covered == target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ig(name: &str, inv: &str) -> InvolutiveGroup {
        let g = Arc::new(Group::builtin(name).unwrap());
        let t = g.involution_by_name(inv).unwrap();
        InvolutiveGroup::new(g, t).unwrap()
    }

    #[test]
    fn builtin_orders() {
        for (name, n) in [("Z4", 4), ("D4", 8), ("Q8", 8), ("S3", 6), ("S4", 24), ("S3xS3", 36), ("D4xZ2", 16), ("1", 1)] {
            assert_eq!(Group::builtin(name).unwrap().order(), n, "{name}");
        }
        assert!(Group::builtin("T7").is_err());
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(Group::builtin("S3").unwrap().automorphisms().len(), 6);
        assert_eq!(Group::builtin("D4").unwrap().automorphisms().len(), 8);
        assert_eq!(Group::builtin("Q8").unwrap().automorphisms().len(), 24);
        assert_eq!(Group::builtin("S4").unwrap().automorphisms().len(), 24);
        assert_eq!(Group::builtin("Z5").unwrap().automorphisms().len(), 4);
    }

    #[test]
    fn symmetric_part_examples() {
        let g = ig("Z6", "id");
        assert_eq!(g.symmetric_part(), vec![0, 3]);
        assert_eq!(ig("Z4", "inv").symmetric_part().len(), 4);
        let g = ig("S3", "conj:(12)");
        for s in g.symmetric_part() {
            assert_eq!(g.group().mul(s, g.theta(s)), g.group().id());
        }
    }

    #[test]
    fn h1_examples() {
        assert_eq!(ig("Z2", "id").h1().len(), 2);
        assert_eq!(ig("S3xS3", "flip").h1().len(), 1);
        assert_eq!(ig("1", "id").h1().len(), 1);
        let g = ig("D4", "conj:r2");
        assert_eq!(g.h1()[0].orbit[0], g.group().id());
    }

    #[test]
    fn twisting_examples() {
        let g = ig("Q8", "id");
        let a = g.group().index_of("-1").unwrap();
        let t = g.twist(a).unwrap();
        assert_eq!(t.theta, g.theta);
        assert!(g.twist_bijection_ok(a).unwrap());
        let e = g.group().id();
        assert_eq!(g.twist(e).unwrap().theta, g.theta);
        let i = g.group().index_of("i").unwrap();
        assert!(g.twist(i).is_err());
    }

    #[test]
    fn kernel_examples() {
        let g = ig("S4", "conj:(12)(34)");
        let all: Vec<usize> = (0..24).collect();
        assert_eq!(g.kernel_h1(&all).unwrap().len(), 1);
        assert_eq!(g.kernel_h1(&[g.group().id()]).unwrap().len(), 1);
        let not_stable = g.group().closure(&[g.group().index_of("(123)").unwrap()]);
        assert!(g.kernel_h1(&not_stable).is_err());
    }

    #[test]
    fn symmetrization_examples() {
        let (s0, ok) = ig("S3", "id").symmetrization_classes();
        assert_eq!(s0, vec![0]);
        assert!(ok);
        let (s0, ok) = ig("Z4", "inv").symmetrization_classes();
        assert_eq!(s0, vec![0, 2]);
        assert!(ok);
    }

    #[test]
    fn stability_criteria_agree() {
        for (name, inv) in [("S4", "conj:(12)(34)"), ("D4", "conj:s"), ("Q8", "conj:i")] {
            let g = ig(name, inv);
            assert!(g.double_coset_stable(g.group().id()));
            for x in 0..g.group().order() {
                assert_eq!(g.centralizer_criterion(x), g.double_coset_stable(x), "{name} {x}");
            }
        }
    }

    #[test]
    fn conjugacy_bijection_examples() {
        for (name, h) in [("Q8", "i"), ("D4", "s"), ("S4", "()")] {
            let g = Arc::new(Group::builtin(name).unwrap());
            let h = g.index_of(h).unwrap();
            assert!(conjugacy_bijection_check(&g, h).unwrap());
        }
        let s3 = Arc::new(Group::builtin("S3").unwrap());
        assert!(conjugacy_bijection_check(&s3, s3.index_of("(123)").unwrap()).is_err());
    }

    #[test]
    fn json_input() {
        let text = r#"{"elements":["e","a"],"mul":[[0,1],[1,0]],"theta":[0,1]}"#;
        let g = InvolutiveGroup::from_json(text).unwrap();
        assert_eq!(g.h1().len(), 2);
        let bad = r#"{"elements":["e","a"],"mul":[[0,1],[1,1]]}"#;
        assert!(InvolutiveGroup::from_json(bad).is_err());
        let bad_theta = r#"{"elements":["e","a"],"mul":[[0,1],[1,0]],"theta":[1,0]}"#;
        assert!(InvolutiveGroup::from_json(bad_theta).is_err());
    }
}
