//! Acceptance suite: runs each criterion, prints one line per criterion and
//! exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use symstab::cohom::{conjugacy_bijection_check, Group, InvolutiveGroup};
use symstab::hermform::{HermForm, QuadExt};
use symstab::oracle::{
    chain_equivalence_classes, dimension_formula_check, generate_instances, hilbert_oracle,
    isotropy_oracle, subform_oracle,
};
use symstab::quadform::{all_diagonal_forms, form_classes};
use symstab::sqclass::{enumerate_classes, hilbert, is_norm};
use symstab::stability::{
    check_row, classify, quaternion_kernel, quaternion_obstruction, sweep_all, PairField,
    PairSpec, SweepBounds, Tri,
};
use symstab::{LocalField, QuadForm, QuadInvariants, Sign, SquareClass};

type Outcome = Result<String, String>;

fn q(p: u64) -> LocalField {
    LocalField::padic(p).expect("prime")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: symstab::Error) -> String {
    e.to_string()
}

fn criterion_1() -> Outcome {
    let mut pairs = 0;
    let fields = [LocalField::Real, q(2), q(3), q(5), q(7), q(11)];
    for f in fields {
        for a in enumerate_classes(f) {
            for b in enumerate_classes(f) {
                let engine = hilbert(&a, &b).map_err(err)?;
                let oracle = hilbert_oracle(f, a.representative(), b.representative()).map_err(err)?;
                ensure(engine == oracle, || format!("{{{a}, {b}}}: engine {engine}, oracle {oracle}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} class pairs agree with the conic oracle"))
}

fn criterion_2() -> Outcome {
    for p in [2, 3, 5, 7] {
        let f = q(p);
        let classes = enumerate_classes(f);
        let m = SquareClass::minus_one(f);
        let h = |a: &SquareClass, b: &SquareClass| hilbert(a, b).expect("same field");
        for a in &classes {
            ensure(h(a, &(*a * m)) == Sign::Plus, || format!("{{{a}, -{a}}} != 1 over Q{p}"))?;
            ensure(
                a.is_trivial() || classes.iter().any(|b| h(a, b) == Sign::Minus),
                || format!("{a} is degenerate over Q{p}"),
            )?;
            for b in &classes {
                ensure(h(a, b) == h(b, a), || format!("symmetry fails at {a}, {b}"))?;
                for c in &classes {
                    ensure(h(a, &(*b * *c)) == h(a, b) * h(a, c), || {
                        format!("bimultiplicativity fails at {a}, {b}, {c}")
                    })?;
                }
            }
        }
    }
    Ok("symmetry, bimultiplicativity, {a,-a}=1 and nondegeneracy over Q2, Q3, Q5, Q7".into())
}

/// Checks that the invariant partition of the diagonal forms of `rank` equals
/// the chain-equivalence partition.
fn partitions_agree(field: LocalField, rank: usize) -> Result<usize, String> {
    let labelled = chain_equivalence_classes(field, rank).map_err(err)?;
    let mut by_label: BTreeMap<usize, QuadInvariants> = BTreeMap::new();
    let mut by_inv: BTreeMap<String, usize> = BTreeMap::new();
    for (form, label) in &labelled {
        let inv = form.invariants();
        if let Some(prev) = by_label.insert(*label, inv) {
            ensure(prev == inv, || format!("{form} is chain-equivalent to a form with other invariants"))?;
        }
        let key = format!("{inv:?}");
        if let Some(prev) = by_inv.insert(key, *label) {
            ensure(prev == *label, || format!("{form} shares invariants with a non-equivalent form"))?;
        }
    }
    let rep = &labelled[labelled.len() / 2].0;
    let other = &labelled[labelled.len() / 3].0;
    ensure(
        rep.equivalent(other).map_err(err)? == (rep.invariants() == other.invariants()),
        || "equivalent() disagrees with invariants".into(),
    )?;
    Ok(by_label.len())
}

fn criterion_3() -> Outcome {
    let mut forms = 0;
    let mut classes = Vec::new();
    for f in [q(3), q(2)] {
        for rank in 1..=4 {
            classes.push(format!("{f} rank {rank}: {}", partitions_agree(f, rank)?));
            let all = all_diagonal_forms(f, rank);
            let bad: Vec<String> = all
                .par_iter()
                .filter_map(|b| match (b.is_isotropic(), isotropy_oracle(b)) {
                    (Ok(x), Ok(y)) if x == y => None,
                    (x, y) => Some(format!("{b}: engine {x:?}, oracle {y:?}")),
                })
                .collect();
            ensure(bad.is_empty(), || bad.join("; "))?;
            forms += all.len();
        }
    }
    Ok(format!("{forms} diagonal forms; class counts {}", classes.join(", ")))
}

fn criterion_4() -> Outcome {
    let f = q(3);
    let mut kernels = 0;
    for rank in 0..=4 {
        for kernel in form_classes(f, rank).into_iter().filter(|c| c.mu() == 0) {
            if rank > 0 {
                ensure(!isotropy_oracle(&kernel).map_err(err)?, || format!("{kernel} is isotropic"))?;
            }
            kernels += 1;
            for k in 0..=2 {
                let b = QuadForm::hyperbolic(f, k).direct_sum(&kernel).map_err(err)?;
                ensure(b.mu() == k, || format!("mu(H_{k} + {kernel}) = {}", b.mu()))?;
                let (w, core) = b.witt_decompose();
                ensure(w == k && core == kernel.invariants(), || format!("Witt decomposition of {b}"))?;
            }
        }
    }
    let mut checks = 0usize;
    for field in [q(3), q(5)] {
        let mut label: BTreeMap<Vec<SquareClass>, usize> = BTreeMap::new();
        for rank in 1..=6 {
            for (form, l) in chain_equivalence_classes(field, rank).map_err(err)? {
                label.insert(form.diag().to_vec(), l);
            }
        }
        let same = |a: &QuadForm, b: &QuadForm| label[a.diag()] == label[b.diag()];
        for rank in 1..=3 {
            let forms = all_diagonal_forms(field, rank);
            for crank in 1..=3 {
                for c in all_diagonal_forms(field, crank) {
                    for a in &forms {
                        let ca = c.direct_sum(a).map_err(err)?;
                        for b in &forms {
                            let cb = c.direct_sum(b).map_err(err)?;
                            if same(&ca, &cb) {
                                ensure(same(a, b), || format!("cancellation fails: {c} + {a} = {c} + {b}"))?;
                                ensure(a.equivalent(b).map_err(err)?, || format!("engine: {a} !~ {b}"))?;
                            }
                            checks += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{kernels} anisotropic kernels over Q3; {checks} cancellation instances over Q3, Q5"))
}

fn criterion_5() -> Outcome {
    let f = q(3);
    let mut pairs = 0;
    for brank in 0..=4 {
        let bs = all_diagonal_forms(f, brank);
        for crank in 0..=brank {
            let cs = all_diagonal_forms(f, crank);
            let bad: Vec<String> = bs
                .par_iter()
                .flat_map(|b| {
                    cs.iter()
                        .filter_map(|c| match (c.is_subform(b), subform_oracle(c, b)) {
                            (Ok(x), Ok(y)) if x == y => None,
                            (x, y) => Some(format!("{c} <= {b}: engine {x:?}, oracle {y:?}")),
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
            ensure(bad.is_empty(), || bad.join("; "))?;
            pairs += bs.len() * cs.len();
        }
    }
    let m = SquareClass::minus_one(f);
    let ghost = QuadInvariants::Padic { rank: 2, det: m, hasse: Sign::Minus };
    ensure(!ghost.is_realizable(), || "rank 2, det -1, Hasse -1 is realizable".into())?;
    let mut rejected = 0;
    for b in form_classes(f, 3) {
        for c in form_classes(f, 1) {
            if b.invariants().forced_complement(&c.invariants()).map_err(err)? == Some(ghost) {
                ensure(!c.is_subform(&b).map_err(err)?, || format!("engine accepts {c} <= {b}"))?;
                ensure(!subform_oracle(&c, &b).map_err(err)?, || format!("oracle accepts {c} <= {b}"))?;
                rejected += 1;
            }
        }
    }
    ensure(rejected > 0, || "no pair forces the unrealizable complement".into())?;
    Ok(format!("{pairs} pairs agree; {rejected} pairs forcing the unrealizable complement rejected"))
}

fn criterion_6() -> Outcome {
    let s3 = Group::symmetric(3).map_err(err)?;
    let z2 = Group::cyclic(2).map_err(err)?;
    let groups = vec![
        ("D4", Group::dihedral(4).map_err(err)?),
        ("Q8", Group::quaternion().map_err(err)?),
        ("S3", s3.clone()),
        ("S4", Group::symmetric(4).map_err(err)?),
        ("Z2xS3", Group::direct_product(&z2, &s3).map_err(err)?),
        ("S3xS3", Group::direct_product(&s3, &s3).map_err(err)?),
    ];
    let mut summary = Vec::new();
    for (name, group) in groups {
        let group = Arc::new(group);
        let involutions = group.involutions();
        let results: Vec<Result<usize, String>> = involutions
            .par_iter()
            .map(|theta| check_involutive(&group, theta.clone(), name))
            .collect();
        let mut elements = 0;
        for r in results {
            elements += r?;
        }
        for h in 0..group.order() {
            if group.is_central(group.mul(h, h)) {
                ensure(conjugacy_bijection_check(&group, h).map_err(err)?, || {
                    format!("{name}: conjugacy bijection fails for {}", group.name(h))
                })?;
            }
        }
        summary.push(format!("{name} ({} involutions, {elements} elements)", involutions.len()));
    }
    Ok(summary.join(", "))
}

fn check_involutive(group: &Arc<Group>, theta: Vec<usize>, name: &str) -> Result<usize, String> {
    let ig = InvolutiveGroup::new(Arc::clone(group), theta).map_err(err)?;
    let h1 = ig.h1().len();
    for a in ig.symmetric_part() {
        let twisted = ig.twist(a).map_err(err)?;
        ensure(twisted.h1().len() == h1, || format!("{name}: twisting by {} changes |H1|", group.name(a)))?;
        ensure(ig.twist_bijection_ok(a).map_err(err)?, || {
            format!("{name}: twisting bijection fails for {}", group.name(a))
        })?;
    }
    for x in ig.fixed_subgroup() {
        let (orbits, kernel) = ig.descent_counts(x).map_err(err)?;
        ensure(orbits == kernel, || {
            format!("{name}: descent count at {}: {orbits} orbits vs kernel {kernel}", group.name(x))
        })?;
    }
    for g in 0..group.order() {
        ensure(ig.centralizer_criterion(g) == ig.double_coset_stable(g), || {
            format!("{name}: centralizer criterion disagrees at {}", group.name(g))
        })?;
    }
    Ok(group.order())
}

fn criterion_7() -> Outcome {
    for p in [3u64, 7, 11, 19] {
        let f = q(p);
        let n = quaternion_obstruction(p).map_err(err)?;
        ensure(n == 2, || format!("obstruction at p = {p} is {n}"))?;
        let minus_p = SquareClass::from_int(f, -(p as i64)).map_err(err)?;
        let kernel = quaternion_kernel(p).map_err(err)?;
        ensure(kernel.contains(&minus_p), || format!("class(-{p}) is not in the kernel"))?;
        let d = SquareClass::uniformizer(f).map_err(err)?;
        ensure(is_norm(&minus_p, &d).map_err(err)?, || format!("-{p} is not a norm"))?;
        let v = classify(&PairSpec::Quaternion { p }).map_err(err)?;
        ensure(v.stable == Tri::No, || format!("quaternion pair at {p} is not unstable"))?;
    }
    Ok("kernel of order 2 generated by class(-p) for p = 3, 7, 11, 19".into())
}

fn criterion_8() -> Outcome {
    let bounds = SweepBounds { max_dim: 6, max_sig: 3 };
    let mut total = 0;
    let mut unknown = 0;
    for field in [q(3), q(2), LocalField::Real] {
        let rows = sweep_all(PairField::Local(field), bounds).map_err(err)?;
        let bad: Vec<String> = rows
            .par_iter()
            .flat_map(|row| {
                let mut v = check_row(row);
                if row.verdict.gelfand == Tri::Unknown
                    && !(row.spec.family() == symstab::stability::Family::OPair
                        && row.verdict.p_stable == Tri::Yes
                        && row.verdict.stable == Tri::No)
                {
                    v.push("unknown Gelfand outside O rows with p-stable yes, stable no".into());
                }
                v.into_iter()
                    .map(|msg| format!("{}: {msg}", serde_json::to_string(&row.spec).unwrap_or_default()))
                    .collect::<Vec<_>>()
            })
            .collect();
        ensure(bad.is_empty(), || bad.iter().take(5).cloned().collect::<Vec<_>>().join("; "))?;
        unknown += rows.iter().filter(|r| r.verdict.gelfand == Tri::Unknown).count();
        total += rows.len();
    }
    Ok(format!("{total} rows checked, {unknown} with Gelfand unknown"))
}

fn criterion_9() -> Outcome {
    let fields = [q(2), q(3), LocalField::Real];
    for f in fields {
        let field = PairField::Local(f);
        for n in 1..=6 {
            for k in 0..=n {
                let v = classify(&PairSpec::SlxGl { field, dim_plus: k, dim_minus: n - k }).map_err(err)?;
                let expect = Tri::from_bool(2 * k != n);
                ensure(v.gelfand == expect, || format!("SLxGL n={n} k={k} over {f}: {}", v.gelfand))?;
            }
        }
        for ext in QuadExt::all(f) {
            for n in 1..=5 {
                let v = classify(&PairSpec::SlBasechange { ext, dim: n }).map_err(err)?;
                ensure(v.gelfand == Tri::from_bool(n % 2 == 1), || format!("SL basechange n={n} over {ext}"))?;
            }
            for n in 1..=3 {
                let v = classify(&PairSpec::SlFOverE { ext, dim: n }).map_err(err)?;
                let expect = Tri::from_bool(f.is_archimedean());
                ensure(v.gelfand == expect, || format!("SL_F_over_E n={n} over {ext}"))?;
            }
        }
    }
    let mut sigs = Vec::new();
    for p in 0..=4 {
        for q in 0..=4 - p {
            sigs.push((p, q));
        }
    }
    let mut u_rows = 0;
    for &(p1, q1) in &sigs {
        for &(p2, q2) in &sigs {
            if p1 + q1 + p2 + q2 == 0 {
                continue;
            }
            let spec = PairSpec::UPair { bplus: HermForm::real(p1, q1), bminus: HermForm::real(p2, q2) };
            let v = classify(&spec).map_err(err)?;
            let vanishes = [p1, q1, p2, q2].contains(&0);
            ensure(v.gelfand == Tri::from_bool(vanishes), || format!("U real ({p1},{q1}) + ({p2},{q2})"))?;
            u_rows += 1;
        }
    }
    Ok(format!("SLxGL, SL base change, SL_F_over_E and {u_rows} real U pairs match"))
}

fn criterion_10() -> Outcome {
    let instances = generate_instances(8);
    let dims: BTreeSet<usize> = instances.iter().map(|(r, _)| r.len()).collect();
    let failures = instances
        .par_iter()
        .filter(|(r, h)| !matches!(dimension_formula_check(r, h), Ok(true)))
        .count();
    ensure(failures == 0, || format!("{failures} of {} instances fail", instances.len()))?;
    Ok(format!("{} block instances of dimensions {dims:?}", instances.len()))
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Hilbert symbol equals the conic oracle", criterion_1, Duration::from_secs(5)),
        ("symbol identities", criterion_2, Duration::from_secs(1)),
        ("quadratic classification and isotropy", criterion_3, Duration::from_secs(60)),
        ("Witt decomposition and cancellation", criterion_4, Duration::from_secs(30)),
        ("subform criterion", criterion_5, Duration::from_secs(60)),
        ("cohomology engine", criterion_6, Duration::from_secs(60)),
        ("quaternion obstruction", criterion_7, Duration::from_secs(5)),
        ("summary-table sweep", criterion_8, Duration::from_secs(120)),
        ("spot Gelfand verdicts", criterion_9, Duration::from_secs(5)),
        ("dimension formula", criterion_10, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {}: PASS [{elapsed:.2?}] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL [{elapsed:.2?}] {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
