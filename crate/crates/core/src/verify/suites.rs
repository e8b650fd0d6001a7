use std::collections::HashMap;
use std::fmt::Debug;
use std::time::Instant;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::field::{FieldElement, FieldSpec};
use crate::lattice::{
    classify_minimal_node, descriptor_contains, lattice_graph, normal_closure, quotient_image, LatticeNode, NormalSubgroupDescriptor,
};
use crate::matrices::{Element, FinitaryMatrix, Generator, GroupWord, Normal, ScaledFinitary, StringMatrix, Tail};
use crate::procedures::{
    center_witness, conjugate_by_finitary, conjugate_by_string, conjugate_by_triangular, d, det_decompose, scalar_split,
    transvection_witness, CenterWitness, ConjugationResult, ProcedureError,
};
use crate::unit_groups::UnitSubgroup;

use super::oracle::{gl_order, SmallGl, MAX_AMBIENT_ORDER};
use super::sample;
use super::VerifyError;

pub const SUITES: [&str; 8] = ["field", "unit-groups", "normality", "quotients", "closure-oracle", "transvection", "center", "lattice"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteParams {
    /// Trials per case; exhaustive suites ignore it.
    pub trials: usize,
    pub seed: u64,
    pub window: usize,
    pub field: FieldSpec,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams { trials: 100, seed: 42, window: 6, field: FieldSpec::rationals() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub trial: usize,
    /// The suite seed; the trial's generator is `trial_rng(seed, trial)`.
    pub seed: u64,
    pub input: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub field: String,
    pub seed: u64,
    pub trials: usize,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
    pub elapsed_secs: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_text(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut out = format!(
            "{status} suite={} field={} seed={} trials={} failures={} time={:.3}s\n",
            self.suite,
            self.field,
            self.seed,
            self.trials,
            self.failures.len(),
            self.elapsed_secs
        );
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        for f in &self.failures {
            out.push_str(&format!("  failure trial={} seed={}: expected {} got {}; input {}\n", f.trial, f.seed, f.expected, f.actual, f.input));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// The generator for one trial: seeded by the suite seed, on a stream per trial.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

struct Run {
    seed: u64,
    trials: usize,
    failures: Vec<Failure>,
    notes: Vec<String>,
}

impl Run {
    fn fail(&mut self, trial: usize, input: impl Debug, expected: impl Debug, actual: impl Debug) {
        self.failures.push(Failure {
            trial,
            seed: self.seed,
            input: format!("{input:?}"),
            expected: format!("{expected:?}"),
            actual: format!("{actual:?}"),
        });
    }

    fn check_eq<T: PartialEq + Debug>(&mut self, trial: usize, input: impl Debug, expected: T, actual: T) {
        if expected != actual {
            self.fail(trial, input, expected, actual);
        }
    }
}

pub fn run_suite(name: &str, params: &SuiteParams) -> Result<SuiteReport, VerifyError> {
    let start = Instant::now();
    let mut run = Run { seed: params.seed, trials: 0, failures: Vec::new(), notes: Vec::new() };
    match name {
        "field" => field_suite(&mut run, params),
        "unit-groups" => unit_group_suite(&mut run, params)?,
        "normality" => normality_suite(&mut run, params)?,
        "quotients" => quotient_suite(&mut run, params)?,
        "closure-oracle" => closure_oracle_suite(&mut run, params)?,
        "transvection" => transvection_suite(&mut run, params)?,
        "center" => center_suite(&mut run, params)?,
        "lattice" => lattice_suite(&mut run, params)?,
        other => return Err(VerifyError::UnknownSuite(other.to_string())),
    }
    Ok(SuiteReport {
        suite: name.to_string(),
        field: params.field.to_string(),
        seed: params.seed,
        trials: run.trials,
        failures: run.failures,
        notes: run.notes,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

fn field_suite(run: &mut Run, params: &SuiteParams) {
    let spec = params.field;
    for t in 0..params.trials {
        let rng = &mut trial_rng(params.seed, t);
        let [a, b, c] = [0; 3].map(|_| sample::entry(spec, rng, 9));
        let input = (&a, &b, &c);
        run.check_eq(t, input, &(&a + &b) + &c, &a + &(&b + &c));
        run.check_eq(t, input, &(&a * &b) * &c, &a * &(&b * &c));
        run.check_eq(t, input, &a * &(&b + &c), &(&a * &b) + &(&a * &c));
        run.check_eq(t, input, &a * &b, &b * &a);
        run.check_eq(t, input, FieldElement::zero(spec), &a + &(-&a));
        if !a.is_zero() {
            let inv = a.inv().expect("nonzero");
            run.check_eq(t, input, FieldElement::one(spec), &a * &inv);
            run.check_eq(t, input, Ok(inv), a.pow(-1));
            run.check_eq(t, input, Ok(&(&a * &a) * &a), a.pow(3));
        }
        run.trials += 1;
    }
}

/// Membership queries checked against enumeration of exponents in `[-5, 5]^k` over ℚ,
/// or against the explicitly enumerated subgroup over GF(p).
/// Membership queries against bounded exponent enumeration.
///
/// Over ℚ the generators have independent prime-exponent vectors, so a
/// representation is unique when it exists; the exact answer comes from a
/// rational solve, and queries whose unique representation leaves the
/// enumeration box are redrawn so the box oracle is complete on what remains.
fn unit_group_suite(run: &mut Run, params: &SuiteParams) -> Result<(), VerifyError> {
    let spec = params.field;
    let mut redrawn = 0usize;
    for t in 0..params.trials {
        let rng = &mut trial_rng(params.seed, t);
        let (gens, x, truth) = match spec.modulus() {
            None => loop {
                let (gens, x) = rational_query(rng);
                let truth = exact_membership(&gens, &x);
                if truth.iter().flatten().all(|v| v.abs() <= ENUMERATION_BOUND) {
                    let values = gens.iter().map(|g| g.value(spec)).collect::<Vec<_>>();
                    break (values, x.value(spec), Some(truth.is_some()));
                }
                redrawn += 1;
            },
            Some(p) => {
                let k = rng.gen_range(1..=3);
                let gens: Vec<FieldElement> = (0..k).map(|_| FieldElement::from_int(spec, rng.gen_range(1..p) as i64)).collect();
                let x = FieldElement::from_int(spec, rng.gen_range(1..p) as i64);
                (gens, x, None)
            }
        };
        let h = UnitSubgroup::new(spec, gens.clone())?;
        let got = h.membership(&x)?;
        let expected = match spec.modulus() {
            None => enumerate_exponents(&gens, &x, ENUMERATION_BOUND),
            Some(p) => enumerate_subgroup(&gens, p).contains(&x),
        };
        let input = (&gens, &x);
        run.check_eq(t, input, expected, got.is_some());
        if let Some(truth) = truth {
            run.check_eq(t, (input, "exact"), truth, expected);
        }
        if let Some(w) = got {
            let mut replay = FieldElement::one(spec);
            for (g, e) in gens.iter().zip(&w.exponents) {
                replay = &replay * &g.pow(e.to_i64().expect("small exponent"))?;
            }
            run.check_eq(t, input, &x, &replay);
        }
        run.trials += 1;
    }
    if spec.is_rationals() {
        run.notes.push(format!("{redrawn} queries redrawn because their unique representation left [-{ENUMERATION_BOUND}, {ENUMERATION_BOUND}]"));
    }
    Ok(())
}

const ENUMERATION_BOUND: i64 = 5;

/// `±2^a·3^b·5^c·7^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Monomial {
    negative: bool,
    exps: [i64; 4],
}

impl Monomial {
    const PRIMES: [i64; 4] = [2, 3, 5, 7];

    fn new(negative: bool, exps: [i64; 4]) -> Self {
        Monomial { negative, exps }
    }

    /// `self · other^e`.
    fn times_power(self, other: &Monomial, e: i64) -> Self {
        let mut exps = self.exps;
        for (a, b) in exps.iter_mut().zip(other.exps) {
            *a += e * b;
        }
        Monomial { negative: self.negative ^ (other.negative && e % 2 != 0), exps }
    }

    fn value(&self, spec: FieldSpec) -> FieldElement {
        let mut x = FieldElement::from_int(spec, if self.negative { -1 } else { 1 });
        for (p, e) in Self::PRIMES.iter().zip(self.exps) {
            x = &x * &FieldElement::from_int(spec, *p).pow(e).expect("nonzero");
        }
        x
    }
}

/// Up to three generators over {2, 3, 5} with independent exponent vectors,
/// and a query built from them times a factor from a small pool.
fn rational_query<R: Rng>(rng: &mut R) -> (Vec<Monomial>, Monomial) {
    const EXTRA: [(bool, [i64; 4]); 12] = [
        (false, [0, 0, 0, 0]),
        (false, [0, 0, 0, 0]),
        (false, [0, 0, 0, 0]),
        (true, [0, 0, 0, 0]),
        (false, [1, 0, 0, 0]),
        (false, [0, 1, 0, 0]),
        (false, [0, 0, 1, 0]),
        (false, [0, 0, 0, 1]),
        (false, [-1, 0, 0, 0]),
        (false, [0, -1, 0, 0]),
        (true, [1, 0, -1, 0]),
        (false, [2, 0, 0, 0]),
    ];
    let k = rng.gen_range(1..=3);
    let gens = loop {
        let gens: Vec<Monomial> = (0..k)
            .map(|_| Monomial::new(rng.gen_bool(0.25), [rng.gen_range(-2..=2), rng.gen_range(-2..=2), rng.gen_range(-2..=2), 0]))
            .collect();
        if exponent_rank(&gens) == k {
            break gens;
        }
    };
    let mut x = Monomial::new(false, [0; 4]);
    for g in &gens {
        x = x.times_power(g, rng.gen_range(-3..=3));
    }
    let &(negative, exps) = EXTRA.choose(rng).expect("pool");
    (gens, x.times_power(&Monomial::new(negative, exps), 1))
}

/// Row-reduces the `4 × (k+1)` system `Σ eᵢ·vᵢ = v` over ℚ; returns the
/// reduced rows and the pivot columns.
fn reduce(gens: &[Monomial], x: &Monomial) -> (Vec<Vec<Rational64>>, Vec<usize>) {
    let k = gens.len();
    let mut rows: Vec<Vec<Rational64>> =
        (0..4).map(|r| gens.iter().map(|g| Rational64::from_integer(g.exps[r])).chain([Rational64::from_integer(x.exps[r])]).collect()).collect();
    let mut pivots = Vec::new();
    for c in 0..k {
        let r0 = pivots.len();
        let Some(r) = (r0..4).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(r0, r);
        let pivot = rows[r0][c];
        for v in rows[r0].iter_mut() {
            *v /= pivot;
        }
        for r in 0..4 {
            if r != r0 && !rows[r][c].is_zero() {
                let f = rows[r][c];
                let top = rows[r0].clone();
                for (v, t) in rows[r].iter_mut().zip(top) {
                    *v -= f * t;
                }
            }
        }
        pivots.push(c);
    }
    (rows, pivots)
}

fn exponent_rank(gens: &[Monomial]) -> usize {
    reduce(gens, &Monomial::new(false, [0; 4])).1.len()
}

/// The unique exponent vector representing `x`, for independent generators.
fn exact_membership(gens: &[Monomial], x: &Monomial) -> Option<Vec<i64>> {
    let (rows, pivots) = reduce(gens, x);
    let k = gens.len();
    debug_assert_eq!(pivots.len(), k, "generators must be independent");
    if rows[k..].iter().any(|r| !r[k].is_zero()) {
        return None;
    }
    let e = rows[..k].iter().map(|r| r[k].is_integer().then(|| r[k].to_integer())).collect::<Option<Vec<i64>>>()?;
    let negative = gens.iter().zip(&e).fold(false, |acc, (g, e)| acc ^ (g.negative && e % 2 != 0));
    (negative == x.negative).then_some(e)
}

fn enumerate_exponents(gens: &[FieldElement], x: &FieldElement, bound: i64) -> bool {
    let powers: Vec<Vec<FieldElement>> = gens.iter().map(|g| (-bound..=bound).map(|e| g.pow(e).expect("unit")).collect()).collect();
    let width = (2 * bound + 1) as usize;
    let total = width.pow(gens.len() as u32);
    (0..total).any(|mut code| {
        let mut acc = FieldElement::one(x.spec());
        for p in &powers {
            acc = &acc * &p[code % width];
            code /= width;
        }
        acc == *x
    })
}

fn enumerate_subgroup(gens: &[FieldElement], p: u64) -> Vec<FieldElement> {
    let spec = gens[0].spec();
    let mut elems = vec![FieldElement::one(spec)];
    let mut i = 0;
    while i < elems.len() && (elems.len() as u64) < p {
        for g in gens {
            let y = &elems[i] * g;
            if !elems.contains(&y) {
                elems.push(y);
            }
        }
        i += 1;
    }
    elems
}

#[derive(Debug, Clone, Copy)]
enum ConjugatorClass {
    StringIdentityTail,
    StringPeriodicTail,
    Triangular,
    Finitary,
}

const SANDWICH_NODES: [LatticeNode; 4] = [LatticeNode::SLfr, LatticeNode::GLfr, LatticeNode::DscSLfr, LatticeNode::DscGLfr];

/// Nodes with elements outside all smaller nodes over `spec`.
fn available(spec: FieldSpec, nodes: &[LatticeNode]) -> Vec<LatticeNode> {
    let tiny = spec.modulus() == Some(2);
    nodes.iter().copied().filter(|n| !tiny || matches!(n, LatticeNode::Trivial | LatticeNode::SLfr | LatticeNode::GLcf)).collect()
}

/// Conjugating an element of each sandwich node by strings, triangular
/// prefixes and finitary matrices keeps its node and quotient image; the
/// certified finitary result must agree with lazy evaluation of `c⁻¹·g·c`.
fn normality_suite(run: &mut Run, params: &SuiteParams) -> Result<(), VerifyError> {
    let spec = params.field;
    let classes = [ConjugatorClass::StringIdentityTail, ConjugatorClass::StringPeriodicTail, ConjugatorClass::Triangular, ConjugatorClass::Finitary];
    let nodes = available(spec, &SANDWICH_NODES);
    let mut index = 0;
    for &node in &nodes {
        for class in classes {
            for _ in 0..params.trials {
                let t = index;
                index += 1;
                let rng = &mut trial_rng(params.seed, t);
                let g = sample::node_element(spec, rng, node, params.window)?;
                let (alpha, h) = scalar_split(&g)?;
                let (conj, generator) = match class {
                    ConjugatorClass::StringIdentityTail | ConjugatorClass::StringPeriodicTail => {
                        let periodic = matches!(class, ConjugatorClass::StringPeriodicTail);
                        let s = sample::string(spec, rng, periodic, 3, 2);
                        (conjugate_by_string(&h, &s), Generator::String(s))
                    }
                    ConjugatorClass::Triangular => {
                        let u = sample::triangular_prefix(spec, rng, params.window, 2);
                        (conjugate_by_triangular(&h, &u), Generator::Triangular(u))
                    }
                    ConjugatorClass::Finitary => {
                        let x = sample::finitary(spec, rng, params.window, 2);
                        (conjugate_by_finitary(&h, &x), Generator::Finitary(x))
                    }
                };
                let input = (g.clone(), generator.clone());
                let input = &input;
                let ConjugationResult { result, .. } = match conj {
                    Ok(r) => r,
                    Err(e) => {
                        run.fail(t, input, "a certified conjugate", e);
                        run.trials += 1;
                        continue;
                    }
                };
                let conjugated = Element::from(ScaledFinitary::new(alpha.clone(), result)?);
                run.check_eq(t, input, Ok(node), classify_minimal_node(&conjugated));
                run.check_eq(t, input, quotient_image(&g), quotient_image(&conjugated));
                let lazy = GroupWord::from_letters(spec, vec![(generator.clone(), true), (Generator::Scaled(ScaledFinitary::new(alpha, h)?), false), (generator.clone(), false)])?;
                let Element::Scaled(expected) = &conjugated else { unreachable!() };
                run.check_eq(t, input, Ok(Normal::InProduct(expected.clone())), lazy.normalize());
                run.trials += 1;
            }
        }
    }
    run.notes.push(format!("{} trials per node and conjugator class over nodes {:?}", params.trials, nodes));
    Ok(())
}

/// Determinant decomposition, multiplicativity, and the quotient map on random pairs.
fn quotient_suite(run: &mut Run, params: &SuiteParams) -> Result<(), VerifyError> {
    let spec = params.field;
    let nodes = available(spec, &[LatticeNode::Trivial, LatticeNode::Dsc, LatticeNode::SLfr, LatticeNode::GLfr, LatticeNode::DscSLfr, LatticeNode::DscGLfr]);
    for t in 0..params.trials {
        let rng = &mut trial_rng(params.seed, t);
        let mut pick = || -> Result<(Element, ScaledFinitary), VerifyError> {
            let node = *nodes.choose(rng).expect("nonempty");
            let e = sample::node_element(spec, rng, node, params.window)?;
            let (a, h) = scalar_split(&e)?;
            Ok((e, ScaledFinitary::new(a, h)?))
        };
        let (g1, s1) = pick()?;
        let (g2, s2) = pick()?;
        let product = Element::from(s1.mul(&s2));
        let input = (&g1, &g2);

        for s in [&s1, &s2] {
            let (alpha, rest) = det_decompose(s.body());
            run.check_eq(t, input, s.body(), &d(&alpha).mul(&rest));
            run.check_eq(t, input, true, rest.corner_det().is_one());
        }
        let alpha = |s: &ScaledFinitary| det_decompose(s.body()).0;
        run.check_eq(t, input, &alpha(&s1) * &alpha(&s2), det_decompose(&s1.body().mul(s2.body())).0);

        let (i1, i2) = (quotient_image(&g1)?, quotient_image(&g2)?);
        run.check_eq(t, input, Ok((&i1.0 * &i2.0, &i1.1 * &i2.1)), quotient_image(&product));

        for e in [&g1, &g2, &product] {
            let (a, b) = quotient_image(e)?;
            let in_kernel = a.is_one() && b.is_one();
            run.check_eq(t, (e, "kernel"), in_kernel, classify_minimal_node(e)?.le(LatticeNode::SLfr));
        }
        run.trials += 1;
    }
    Ok(())
}

/// Every element of `SL(3, F_p)`: the predicted closure intersected with
/// `GL(3, F_p)` equals the brute-force normal closure.
fn closure_oracle_suite(run: &mut Run, params: &SuiteParams) -> Result<(), VerifyError> {
    let spec = params.field;
    let p = match spec.modulus() {
        Some(p @ (2 | 3)) => p,
        _ => return Err(VerifyError::Unsupported(format!("closure-oracle needs GF(2) or GF(3), got {spec}"))),
    };
    let group = SmallGl::new(3, p)?;
    let embed = |a: u32| Element::from(FinitaryMatrix::from_corner(&group.to_dense(a)).expect("invertible"));
    let order = group.order() as usize;
    let mut class_rep = vec![u32::MAX; order];
    let mut oracle: HashMap<u32, Vec<bool>> = HashMap::new();
    let mut predicted: HashMap<NormalSubgroupDescriptor, Vec<bool>> = HashMap::new();
    for a in (0..group.order()).filter(|&a| group.is_special(a)) {
        if class_rep[a as usize] == u32::MAX {
            for c in group.class(a) {
                class_rep[c as usize] = a;
            }
        }
        let rep = class_rep[a as usize];
        let brute = oracle.entry(rep).or_insert_with(|| group.normal_closure(&[rep]));
        let descriptor = normal_closure(spec, &[embed(a)])?;
        if !predicted.contains_key(&descriptor) {
            let mut mask = Vec::with_capacity(order);
            for k in 0..group.order() {
                mask.push(descriptor_contains(&descriptor, &embed(k))?);
            }
            predicted.insert(descriptor.clone(), mask);
        }
        let mask = &predicted[&descriptor];
        if mask != brute {
            let size = |m: &[bool]| m.iter().filter(|&&b| b).count();
            run.fail(a as usize, group.to_dense(a), format!("{descriptor} with {} elements", size(mask)), format!("{} elements", size(brute)));
        }
        run.trials += 1;
    }
    run.notes.push(format!("{} conjugacy classes closed by brute force, {} distinct descriptors", oracle.len(), predicted.len()));
    Ok(())
}

/// Certificates for every nontrivial element of `SL(3, F_p)` when the group is
/// small enough, otherwise for random determinant-1 elements.
fn transvection_suite(run: &mut Run, params: &SuiteParams) -> Result<(), VerifyError> {
    let spec = params.field;
    let mut certified = 0usize;
    let mut exhausted = 0usize;
    let mut attempt = |run: &mut Run, t: usize, g: FinitaryMatrix| {
        match transvection_witness(&g) {
            Ok(w) if w.verify(&g) => certified += 1,
            Ok(w) => run.fail(t, &g, "a replayable certificate", w),
            Err(ProcedureError::SearchExhausted { .. }) => exhausted += 1,
            Err(e) => run.fail(t, &g, "a certificate", e),
        }
        run.trials += 1;
    };
    let exhaustive = spec.modulus().is_some_and(|p| gl_order(3, p) <= MAX_AMBIENT_ORDER);
    if exhaustive {
        let group = SmallGl::new(3, spec.modulus().expect("prime field"))?;
        for a in (1..group.order()).filter(|&a| group.is_special(a)) {
            attempt(run, a as usize, FinitaryMatrix::from_corner(&group.to_dense(a))?);
        }
        if exhausted > 0 {
            let total = run.trials;
            run.fail(0, "all nontrivial elements of SL(3)", "100% certificates", format!("{certified}/{total}"));
        }
    } else {
        let window = params.window.clamp(1, 4);
        for t in 0..params.trials {
            let rng = &mut trial_rng(params.seed, t);
            let g = loop {
                let g = sample::finitary(spec, rng, window, 4);
                if g.corner_det().is_one() {
                    break g;
                }
            };
            attempt(run, t, g);
        }
        let rate = certified as f64 / run.trials.max(1) as f64;
        if rate < 0.95 {
            run.fail(0, "random determinant-1 pool", "certificate rate ≥ 0.95", rate);
        }
    }
    run.notes.push(format!("certified {certified}, search exhausted {exhausted}, of {}", run.trials));
    Ok(())
}

/// Non-scalar elements get a non-commuting witness, checked on word
/// products independent of the procedure; scalar ones are central.
fn center_suite(run: &mut Run, params: &SuiteParams) -> Result<(), VerifyError> {
    let spec = params.field;
    for t in 0..params.trials {
        let rng = &mut trial_rng(params.seed, t);
        let g = non_scalar_element(spec, rng, t, params.window)?;
        match center_witness(&g) {
            Ok(CenterWitness::Witness { x, column }) => {
                let mut gx = g.to_word();
                gx.push(Generator::Finitary(x.clone()), false)?;
                let mut xg = GroupWord::from_letters(spec, vec![(Generator::Finitary(x.clone()), false)])?;
                for l in g.to_word().letters() {
                    xg.push(l.generator().clone(), l.inverted())?;
                }
                if gx.column(column) == xg.column(column) {
                    run.fail(t, &g, "g·x ≠ x·g on the reported column", (&x, column));
                }
            }
            other => run.fail(t, &g, "a witness", other),
        }
        let z = scalar_element(spec, rng, t)?;
        run.check_eq(t, &z, Ok(CenterWitness::Central), center_witness(&z));
        run.trials += 2;
    }
    Ok(())
}

fn non_scalar_element<R: Rng>(spec: FieldSpec, rng: &mut R, t: usize, window: usize) -> Result<Element, VerifyError> {
    Ok(match t % 4 {
        0 => Element::from(sample::finitary(spec, rng, window, 3)),
        1 => {
            let a = sample::scalar(spec, rng).unwrap_or_else(|| FieldElement::one(spec));
            Element::from(ScaledFinitary::new(a, sample::finitary(spec, rng, window, 3))?)
        }
        2 => Element::from(sample::string_outside(spec, rng, 3, 3)),
        _ => {
            let periodic = rng.gen_bool(0.5);
            let s = sample::string(spec, rng, periodic, 3, 2);
            let x = sample::finitary(spec, rng, window, 3);
            Element::from(GroupWord::from_letters(spec, vec![(Generator::String(s.clone()), true), (Generator::Finitary(x), false), (Generator::String(s), false)])?)
        }
    })
}

fn scalar_element<R: Rng>(spec: FieldSpec, rng: &mut R, t: usize) -> Result<Element, VerifyError> {
    let a = if rng.gen_bool(0.9) { sample::scalar(spec, rng) } else { None }.unwrap_or_else(|| FieldElement::one(spec));
    Ok(match t % 3 {
        0 => Element::from(ScaledFinitary::scalar_matrix(a)?),
        1 => {
            let b = rng.gen_range(1..=3);
            let block = crate::matrices::DenseMatrix::identity(spec, b).scale(&a);
            let prefix = vec![block.clone(); rng.gen_range(0..=2)];
            Element::from(StringMatrix::new(spec, prefix, Tail::Periodic(block))?)
        }
        _ => {
            let s = sample::string(spec, rng, true, 3, 2);
            let z = Generator::Scaled(ScaledFinitary::scalar_matrix(a)?);
            Element::from(GroupWord::from_letters(spec, vec![(Generator::String(s.clone()), true), (z, false), (Generator::String(s), false)])?)
        }
    })
}

/// Graph consistency, monotonicity of membership in the order, and
/// idempotence of closures under adding members.
fn lattice_suite(run: &mut Run, params: &SuiteParams) -> Result<(), VerifyError> {
    let spec = params.field;
    if let Err(e) = lattice_graph().check() {
        run.fail(0, "lattice graph", "consistent Hasse diagram", e);
    }
    let nodes = available(spec, &LatticeNode::ALL);
    for t in 0..params.trials {
        let rng = &mut trial_rng(params.seed, t);
        let (n1, n2) = (*nodes.choose(rng).expect("nonempty"), *nodes.choose(rng).expect("nonempty"));
        let g1 = sample::node_element(spec, rng, n1, params.window)?;
        let g2 = sample::node_element(spec, rng, n2, params.window)?;
        let min = classify_minimal_node(&g1)?;
        for x in LatticeNode::ALL {
            run.check_eq(t, (&g1, x), min.le(x), descriptor_contains(&x.descriptor(spec), &g1)?);
        }
        let gens = vec![g1.clone(), g2.clone()];
        let before = normal_closure(spec, &gens)?;
        let mut more = gens.clone();
        if let (Ok((a1, h1)), Ok((a2, h2))) = (scalar_split(&g1), scalar_split(&g2)) {
            more.push(Element::from(ScaledFinitary::new(a1, h1)?.mul(&ScaledFinitary::new(a2, h2)?)));
        }
        if matches!(before, NormalSubgroupDescriptor::Sandwich(_) | NormalSubgroupDescriptor::Full) {
            more.push(Element::from(sample::finitary_det_one(spec, rng, params.window, 2)));
        }
        for e in &more {
            run.check_eq(t, (&before, e), true, descriptor_contains(&before, e)?);
        }
        run.check_eq(t, &gens, before.clone(), normal_closure(spec, &more)?);
        run.trials += 1;
    }
    Ok(())
}
