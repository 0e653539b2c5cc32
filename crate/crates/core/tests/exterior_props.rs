//! Exterior calculus against a dense oracle: forms are evaluated on tuples
//! of basis vectors by summing over permutations, independently of the
//! bitmask bookkeeping used by the library.

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use nk_flow_core::exterior::{
    check_d_squared, ext_d, ext_d_structure, flat, hodge, sharp, Blade, Coframe, FrameChange, JetMatrix,
};
use nk_flow_core::{Form, Jet, MetricTensor, Vector};

const TOL: f64 = 1e-12;

/// `w(e_{i₁}, …, e_{i_k})` for an arbitrary index tuple.
fn eval_tuple(w: &Form, idx: &[usize]) -> f64 {
    let mut sorted = idx.to_vec();
    let mut sign = 1.0;
    for i in 0..sorted.len() {
        for j in 0..sorted.len() - 1 - i {
            if sorted[j] == sorted[j + 1] {
                return 0.0;
            }
            if sorted[j] > sorted[j + 1] {
                sorted.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if sorted.windows(2).any(|p| p[0] == p[1]) {
        return 0.0;
    }
    sign * w.coeff(&sorted).val
}

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    if n == 0 {
        return vec![(vec![], 1.0)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            // inserting the largest element at `pos` adds (len − pos) inversions
            let sign = if (p.len() - pos) % 2 == 0 { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `(a∧b)(e_I) = (1/(p!q!)) Σ_π sgn π · a(e_{π(I)₁…}) b(e_{…π(I)_k})`.
fn wedge_oracle(a: &Form, b: &Form, idx: &[usize]) -> f64 {
    let (p, q) = (a.grade(), b.grade());
    let mut total = 0.0;
    for (perm, sign) in permutations(p + q) {
        let t: Vec<usize> = perm.iter().map(|&k| idx[k]).collect();
        total += sign * eval_tuple(a, &t[..p]) * eval_tuple(b, &t[p..]);
    }
    total / (factorial(p) * factorial(q))
}

fn sorted_tuples(dim: usize, grade: usize) -> Vec<Vec<usize>> {
    Blade::all_of_grade(dim, grade).into_iter().map(|b| b.indices().collect()).collect()
}

fn form_from(dim: usize, grade: usize, values: &[f64]) -> Form {
    let mut w = Form::zero(dim, grade);
    for (blade, v) in Blade::all_of_grade(dim, grade).into_iter().zip(values) {
        w.add_term(blade, Jet::constant(*v));
    }
    w
}

fn coeff() -> impl Strategy<Value = f64> {
    (-40i32..=40).prop_map(|x| f64::from(x) / 8.0)
}

fn arb_form(dim: usize, grade: usize) -> impl Strategy<Value = Form> {
    let n = Blade::all_of_grade(dim, grade).len();
    prop::collection::vec(coeff(), n).prop_map(move |v| form_from(dim, grade, &v))
}

fn arb_jet_form(dim: usize, grade: usize) -> impl Strategy<Value = Form> {
    let n = Blade::all_of_grade(dim, grade).len();
    prop::collection::vec((coeff(), coeff()), n).prop_map(move |v| {
        let mut w = Form::zero(dim, grade);
        for (blade, (a, b)) in Blade::all_of_grade(dim, grade).into_iter().zip(v) {
            w.add_term(blade, Jet::new(a, b));
        }
        w
    })
}

fn arb_graded(dim: usize) -> impl Strategy<Value = Form> {
    (0..=dim).prop_flat_map(move |k| arb_form(dim, k))
}

fn arb_vector(dim: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(coeff(), dim).prop_map(|v| Vector::from_values(&v))
}

/// Symmetric positive-definite `AᵀA + I`.
fn arb_metric(dim: usize) -> impl Strategy<Value = MetricTensor> {
    prop::collection::vec(-1.0f64..1.0, dim * dim).prop_map(move |a| {
        let mut g = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                g[i * dim + j] = (0..dim).map(|k| a[k * dim + i] * a[k * dim + j]).sum::<f64>();
            }
            g[i * dim + i] += 1.0;
        }
        MetricTensor::new(JetMatrix::from_f64(dim, &g).unwrap()).unwrap()
    })
}

/// Quadratic coefficients `c(s) = p₀ + p₁s + p₂s²` for two one-forms and a
/// metric `g(s) = AᵀA + I + s·S` on four dimensions.
#[derive(Clone, Debug)]
struct Family {
    a: Vec<[f64; 3]>,
    b: Vec<[f64; 3]>,
    base: Vec<f64>,
    slope: Vec<f64>,
}

impl Family {
    fn jet(p: &[f64; 3], s: f64, with_dds: bool) -> Jet {
        let val = p[0] + p[1] * s + p[2] * s * s;
        Jet::new(val, if with_dds { p[1] + 2.0 * p[2] * s } else { 0.0 })
    }

    fn eval(&self, s: f64, with_dds: bool) -> (Form, Jet) {
        let one = |c: &[[f64; 3]]| Form::one_form(&c.iter().map(|p| Family::jet(p, s, with_dds)).collect::<Vec<_>>());
        let (a, b) = (one(&self.a), one(&self.b));
        let rows: Vec<Vec<Jet>> = (0..4)
            .map(|i| (0..4).map(|j| Jet::new(self.base[i * 4 + j] + s * self.slope[i * 4 + j], if with_dds { self.slope[i * 4 + j] } else { 0.0 })).collect())
            .collect();
        let g = MetricTensor::new(JetMatrix::from_rows(&rows).unwrap()).unwrap();
        let vol = Form::monomial(4, &[0, 1, 2, 3], g.det().sqrt().unwrap()).unwrap();
        (hodge(&a.wedge(&b).unwrap(), &g, &vol).unwrap(), g.form_inner(&a, &b).unwrap())
    }
}

fn arb_family() -> impl Strategy<Value = Family> {
    let poly = || prop::collection::vec([-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0], 4);
    (poly(), poly(), prop::collection::vec(-1.0f64..1.0, 16), prop::collection::vec(-1.0f64..1.0, 16)).prop_map(|(a, b, m, t)| {
        let mut base = vec![0.0; 16];
        let mut slope = vec![0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                base[i * 4 + j] = (0..4).map(|k| m[k * 4 + i] * m[k * 4 + j]).sum::<f64>() + if i == j { 1.0 } else { 0.0 };
                // symmetric, spectral radius < 0.4: g stays positive definite near s = 1
                slope[i * 4 + j] = 0.05 * (t[i * 4 + j] + t[j * 4 + i]);
            }
        }
        Family { a, b, base, slope }
    })
}

/// Lie algebras of dimension 3 and a product of two of them, plus one with
/// an `s`-slot; all satisfy the Jacobi identity.
fn lie_frames() -> Vec<Coframe> {
    vec![
        Coframe::from_constants(&["a", "b", "c"], &[(0, 1, 2, 1.0)], None).unwrap(),
        Coframe::from_constants(&["a", "b", "c"], &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)], None).unwrap(),
        Coframe::from_constants(&["a", "b", "c"], &[(1, 0, 1, 1.0), (2, 0, 2, -0.5)], None).unwrap(),
        Coframe::from_constants(
            &["ds", "x", "y", "a", "b", "c"],
            &[(1, 3, 5, 0.7), (2, 3, 4, -0.7), (3, 4, 5, 1.0)],
            Some(0),
        )
        .unwrap(),
    ]
}

#[test]
fn permutation_table_is_signed_correctly() {
    let perms = permutations(3);
    assert_eq!(perms.len(), 6);
    assert_eq!(perms.iter().map(|(_, s)| s).sum::<f64>(), 0.0);
    for (p, s) in &perms {
        let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        assert_eq!(*s, if inversions % 2 == 0 { 1.0 } else { -1.0 });
    }
}

#[test]
fn basis_two_form_evaluation() {
    let w = Form::basis(6, 1).wedge(&Form::basis(6, 2)).unwrap();
    assert_eq!(eval_tuple(&w, &[1, 2]), 1.0);
    assert_eq!(eval_tuple(&w, &[2, 1]), -1.0);
    let a = Form::basis(6, 1).wedge(&Form::basis(6, 2)).unwrap();
    let b = Form::basis(6, 1).wedge(&Form::basis(6, 3)).unwrap();
    assert!(a.wedge(&b).unwrap().is_empty());
}

#[test]
fn standard_sigma_cubed() {
    let sigma = form_from(6, 2, &[0.0; 15]);
    let mut sigma = sigma;
    for (i, j) in [(0, 1), (2, 3), (4, 5)] {
        sigma.add_unsorted(&[i, j], Jet::ONE).unwrap();
    }
    let cube = sigma.wedge(&sigma).unwrap().wedge(&sigma).unwrap();
    assert_eq!(cube.coeff(&[0, 1, 2, 3, 4, 5]).val, 6.0);
    assert_eq!(cube.len(), 1);
    assert_abs_diff_eq!(wedge_oracle(&sigma.wedge(&sigma).unwrap(), &sigma, &[0, 1, 2, 3, 4, 5]), 6.0, epsilon = TOL);
}

#[test]
fn grade_overflow_is_rejected() {
    let a = Form::monomial(3, &[0, 1], Jet::ONE).unwrap();
    assert!(a.wedge(&a).is_err());
    assert!(Form::scalar(3, Jet::ONE).contract(&Vector::basis(3, 0)).is_err());
}

#[test]
fn contraction_examples() {
    let w = Form::monomial(6, &[0, 1], Jet::ONE).unwrap();
    assert_eq!(w.contract(&Vector::basis(6, 0)).unwrap(), Form::basis(6, 1));
}

#[test]
fn hodge_examples() {
    let g = MetricTensor::identity(6);
    let vol = Form::monomial(6, &[0, 1, 2, 3, 4, 5], Jet::ONE).unwrap();
    let w = Form::monomial(6, &[0, 1], Jet::ONE).unwrap();
    assert_eq!(hodge(&w, &g, &vol).unwrap(), Form::monomial(6, &[2, 3, 4, 5], Jet::ONE).unwrap());
    let singular = JetMatrix::from_f64(2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
    assert!(MetricTensor::new(singular).is_err());
}

#[test]
fn flat_under_dense_oracle() {
    let g = JetMatrix::from_f64(3, &[2.0, 0.5, 0.0, 0.5, 1.0, 0.25, 0.0, 0.25, 3.0]).unwrap();
    let g = MetricTensor::new(g).unwrap();
    let x = Vector::from_values(&[1.0, -2.0, 0.5]);
    let fx = flat(&x, &g).unwrap();
    // (X♭)_j = Σ_i g_ij X^i
    let expected = [2.0 - 1.0, 0.5 - 2.0 + 0.125, -0.5 + 1.5];
    for (j, e) in expected.iter().enumerate() {
        assert_abs_diff_eq!(fx.coeff(&[j]).val, *e, epsilon = TOL);
    }
    assert!(sharp(&fx, &g).unwrap().max_abs_diff(&x) < TOL);
}

#[test]
fn d_squared_on_lie_frames() {
    for frame in lie_frames() {
        assert!(check_d_squared(&frame));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hodge_involution(g in arb_metric(6), k in 0usize..=6, seed in prop::collection::vec(coeff(), 20)) {
        let w = form_from(6, k, &seed);
        let det = g.det().val;
        let vol = Form::monomial(6, &[0, 1, 2, 3, 4, 5], Jet::constant(det.sqrt())).unwrap();
        let twice = hodge(&hodge(&w, &g, &vol).unwrap(), &g, &vol).unwrap();
        let sign = if (k * (6 - k)) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(twice.max_abs_diff(&w.scale_f64(sign)) <= TOL * (1.0 + w.max_abs()));
    }

    #[test]
    fn jets_agree_with_finite_differences(fam in arb_family()) {
        // d/ds of ⋆(a∧b) and of ⟨a, b⟩ for an s-dependent metric and forms
        const H: f64 = 1e-4;
        let s = 1.0;
        let (star_j, inner_j) = fam.eval(s, true);
        let (star_p, inner_p) = fam.eval(s + H, false);
        let (star_m, inner_m) = fam.eval(s - H, false);
        for blade in Blade::all_of_grade(4, 2) {
            let fd = (star_p.get(blade).val - star_m.get(blade).val) / (2.0 * H);
            prop_assert!((star_j.get(blade).dds - fd).abs() <= 1e-6 * (1.0 + fd.abs()));
        }
        let fd = (inner_p.val - inner_m.val) / (2.0 * H);
        prop_assert!((inner_j.dds - fd).abs() <= 1e-6 * (1.0 + fd.abs()));
    }

    #[test]
    fn wedge_matches_dense_oracle(a in arb_graded(5), b in arb_graded(5)) {
        prop_assume!(a.grade() + b.grade() <= 5);
        let w = a.wedge(&b).unwrap();
        for idx in sorted_tuples(5, a.grade() + b.grade()) {
            prop_assert!((w.coeff(&idx).val - wedge_oracle(&a, &b, &idx)).abs() < TOL);
        }
    }

    #[test]
    fn graded_commutativity(a in arb_graded(6), b in arb_graded(6)) {
        prop_assume!(a.grade() + b.grade() <= 6);
        let sign = if (a.grade() * b.grade()) % 2 == 0 { 1.0 } else { -1.0 };
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        prop_assert!(ab.max_abs_diff(&ba.scale_f64(sign)) < TOL);
    }

    #[test]
    fn wedge_is_associative(a in arb_form(6, 1), b in arb_form(6, 2), c in arb_form(6, 2)) {
        let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) < 1e-10);
    }

    #[test]
    fn contraction_matches_dense_oracle(w in (1usize..=5).prop_flat_map(|k| arb_form(5, k)), x in arb_vector(5)) {
        let c = w.contract(&x).unwrap();
        for idx in sorted_tuples(5, w.grade() - 1) {
            let expected: f64 = (0..5).map(|i| {
                let mut t = vec![i];
                t.extend_from_slice(&idx);
                x[i].val * eval_tuple(&w, &t)
            }).sum();
            prop_assert!((c.coeff(&idx).val - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn contraction_is_an_antiderivation(a in arb_form(6, 2), b in arb_form(6, 3), x in arb_vector(6)) {
        let lhs = a.wedge(&b).unwrap().contract(&x).unwrap();
        let rhs = &a.contract(&x).unwrap().wedge(&b).unwrap() + &a.wedge(&b.contract(&x).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-9);
        let twice = b.contract(&x).unwrap().contract(&x).unwrap();
        prop_assert!(twice.max_abs() < 1e-12);
    }

    #[test]
    fn d_is_an_antiderivation_and_squares_to_zero(
        which in 0usize..4,
        ka in 0usize..3,
        kb in 0usize..3,
        seed_a in prop::collection::vec((coeff(), coeff()), 20),
        seed_b in prop::collection::vec((coeff(), coeff()), 20),
    ) {
        let frame = &lie_frames()[which];
        let dim = frame.dim();
        prop_assume!(ka + kb < dim);
        let build = |k: usize, seed: &[(f64, f64)]| {
            let mut w = Form::zero(dim, k);
            for (blade, (v, d)) in Blade::all_of_grade(dim, k).into_iter().zip(seed) {
                // s-dependence only makes sense when the frame has an s-slot
                let dds = if frame.s_index().is_some() { *d } else { 0.0 };
                w.add_term(blade, Jet::new(*v, dds));
            }
            w
        };
        let a = build(ka, &seed_a);
        let b = build(kb, &seed_b);
        let sign = if ka % 2 == 0 { 1.0 } else { -1.0 };
        let lhs = ext_d(&a.wedge(&b).unwrap(), frame).unwrap();
        let rhs = &ext_d(&a, frame).unwrap().wedge(&b).unwrap()
            + &a.wedge(&ext_d(&b, frame).unwrap()).unwrap().scale_f64(sign);
        prop_assert!(lhs.values_only().max_abs_diff(&rhs.values_only()) < 1e-9);
        if ka + 2 <= dim {
            // s-channel coefficients carry no second derivative, so d∘d is exact
            // for coefficients linear in s
            let dd = ext_d(&ext_d(&a, frame).unwrap(), frame).unwrap();
            prop_assert!(dd.max_abs() < 1e-10);
        }
    }

    #[test]
    fn frame_change_commutes_with_d(w in arb_form(3, 1), p in prop::collection::vec(-2.0f64..2.0, 9)) {
        let pm = JetMatrix::from_f64(3, &p).unwrap();
        prop_assume!(pm.det().val.abs() > 0.1);
        let frame = &lie_frames()[1];
        let change = FrameChange::new(3, &p).unwrap();
        let new_frame = change.frame(frame).unwrap();
        prop_assert!(check_d_squared(&new_frame));
        let lhs = ext_d_structure(&change.form(&w).unwrap(), &new_frame).unwrap();
        let rhs = change.form(&ext_d_structure(&w, frame).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hodge_defining_identity_and_isometry(g in arb_metric(5), k in 0usize..=5, sa in prop::collection::vec(coeff(), 10), sb in prop::collection::vec(coeff(), 10)) {
        let a = form_from(5, k, &sa);
        let b = form_from(5, k, &sb);
        let vol = Form::monomial(5, &[0, 1, 2, 3, 4], Jet::constant(g.det().val.sqrt())).unwrap();
        let star_b = hodge(&b, &g, &vol).unwrap();
        let lhs = a.wedge(&star_b).unwrap();
        let rhs = vol.scale(g.form_inner(&a, &b).unwrap());
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-8 * (1.0 + rhs.max_abs()));
        let iso = g.form_inner(&hodge(&a, &g, &vol).unwrap(), &star_b).unwrap().val;
        let plain = g.form_inner(&a, &b).unwrap().val;
        prop_assert!((iso - plain).abs() < 1e-8 * (1.0 + plain.abs()));
    }

    #[test]
    fn musical_round_trip(g in arb_metric(6), x in arb_vector(6), y in arb_vector(6)) {
        let fx = flat(&x, &g).unwrap();
        prop_assert!(sharp(&fx, &g).unwrap().max_abs_diff(&x) < 1e-10);
        let w = Form::one_form_f64(&(0..6).map(|i| y[i].val).collect::<Vec<_>>());
        let pair = g.inner(&sharp(&w, &g).unwrap(), &x).val;
        prop_assert!((pair - w.eval(&[&x]).unwrap().val).abs() < 1e-9);
    }

    #[test]
    fn jet_forms_keep_the_product_rule(a in arb_jet_form(4, 1), b in arb_jet_form(4, 2)) {
        // coefficientwise: (a∧b).dds equals a.dds∧b + a∧b.dds
        let w = a.wedge(&b).unwrap();
        let split = |f: &Form, take_dds: bool| {
            let mut out = Form::zero(f.dim(), f.grade());
            for (blade, c) in f.terms() {
                out.add_term(blade, Jet::constant(if take_dds { c.dds } else { c.val }));
            }
            out
        };
        let expected = &split(&a, true).wedge(&split(&b, false)).unwrap() + &split(&a, false).wedge(&split(&b, true)).unwrap();
        prop_assert!(split(&w, true).max_abs_diff(&expected) < 1e-10);
    }
}
