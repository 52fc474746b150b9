use graphext_core::airy::{self, catalogue as ac};
use graphext_core::graph::{synthesize_with_trace, trace_of};
use graphext_core::krein::{graph_basis, is_krein_contraction, is_krein_unitary, is_w_self_orthogonal, krein_adjoint};
use graphext_core::linalg::frobenius;
use graphext_core::schrodinger::{self, catalogue as sc};
use graphext_core::{CMat, FramedOperator, IndefiniteForm, MetricGraph, OperatorOrder, TraceVector, C64};
use proptest::prelude::*;

fn cmat(n: usize, m: usize, re: &[f64], im: &[f64]) -> CMat {
    CMat::from_fn(n, m, |i, j| C64::new(re[i * m + j], im[i * m + j]))
}

fn hermitian(n: usize, re: &[f64], im: &[f64]) -> CMat {
    let a = cmat(n, n, re, im);
    let mut h = &a + a.adjoint();
    for i in 0..n {
        h[(i, i)] += C64::new(if i % 2 == 0 { 3.0 } else { -3.0 } * n as f64, 0.0);
    }
    h
}

fn square(max: usize) -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (2..=max).prop_flat_map(|n| {
        let k = n * n;
        (
            Just(n),
            prop::collection::vec(-1.0..1.0f64, k),
            prop::collection::vec(-1.0..1.0f64, k),
            prop::collection::vec(-1.0..1.0f64, k),
            prop::collection::vec(-1.0..1.0f64, k),
        )
    })
}

fn symmetric(n: usize, vals: &[f64]) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| vals[i.min(j) * n + i.max(j)]).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjoint_is_an_involution((n, a, b, c, d) in square(12)) {
        let h1 = IndefiniteForm::new(hermitian(n, &a, &b)).unwrap();
        let h2 = IndefiniteForm::new(hermitian(n, &b, &c)).unwrap();
        let op = FramedOperator::new(cmat(n, n, &c, &d), h1, h2).unwrap();
        let back = krein_adjoint(&krein_adjoint(&op));
        prop_assert!(frobenius(&(back.lmat - &op.lmat)) <= 1e-11 * (1.0 + frobenius(&op.lmat)));
    }

    #[test]
    fn unitary_iff_graph_is_self_orthogonal((n, a, b, c, d) in square(8), perturb in prop::bool::ANY) {
        let mut l = cmat(n, n, &c, &d);
        for i in 0..n {
            l[(i, i)] += C64::new(2.0, 0.0);
        }
        let cod = IndefiniteForm::new(hermitian(n, &a, &b)).unwrap();
        let mut hd = l.adjoint() * cod.matrix() * &l;
        if perturb {
            hd[(0, 0)] += C64::new(0.5, 0.0);
        }
        let dom = IndefiniteForm::new(hd).unwrap();
        let op = FramedOperator::new(l.clone(), dom.clone(), cod.clone()).unwrap();
        let u = is_krein_unitary(&op, 1e-10).unwrap();
        let w = is_w_self_orthogonal(&graph_basis(&l), &dom, &cod, 1e-10).unwrap();
        prop_assert_eq!(u.unitary, w.self_orthogonal);
        prop_assert_eq!(u.unitary, !perturb);
        if u.unitary {
            prop_assert!(is_krein_contraction(&op, 1e-10).contraction);
            prop_assert!(is_krein_contraction(&krein_adjoint(&op), 1e-10).contraction);
        }
    }

    #[test]
    fn delta_family_is_unitary(z in -10.0..10.0f64) {
        let g = ac::alternating_graph(1.0, 1, 1.0, 1.0).unwrap();
        let op = ac::delta_z(&g, z).unwrap().framed_operator().unwrap();
        let u = is_krein_unitary(&op, 1e-12).unwrap();
        prop_assert!(u.unitary, "residual {}", u.residual);
    }

    #[test]
    fn airy_form_split_agrees(vals in prop::collection::vec(-2.0..2.0f64, 24), a in 0.2..3.0f64, b in -2.0..2.0f64) {
        let g = MetricGraph::looping_edge(1.0, vec![(a, b), (-a, 1.0), (2.0 * a, -b)]).unwrap();
        let u = TraceVector::from_real(OperatorOrder::Airy3, &vals[..12]).unwrap();
        let v = TraceVector::from_real(OperatorOrder::Airy3, &vals[12..]).unwrap();
        let f = airy::boundary_form(&u, &v, &g).unwrap();
        let s = airy::boundary_form_split(&u, &v, &g).unwrap();
        prop_assert!((f - s).norm() <= 1e-12 * (1.0 + f.norm()));
        let swapped = airy::boundary_form(&v, &u, &g).unwrap();
        prop_assert!((f - swapped.conj()).norm() <= 1e-12 * (1.0 + f.norm()));
    }

    #[test]
    fn schrodinger_form_is_skew(re in prop::collection::vec(-2.0..2.0f64, 16), im in prop::collection::vec(-2.0..2.0f64, 16)) {
        let g = MetricGraph::schrodinger_loop(1.0, 2).unwrap();
        let mk = |r: &[f64], i: &[f64]| TraceVector::new(OperatorOrder::Schrodinger2, r.iter().zip(i).map(|(&x, &y)| C64::new(x, y)).collect()).unwrap();
        let u = mk(&re[..8], &im[..8]);
        let v = mk(&re[8..], &im[8..]);
        let f = schrodinger::boundary_form(&u, &v, &g).unwrap();
        let back = schrodinger::boundary_form(&v, &u, &g).unwrap();
        prop_assert!((f + back.conj()).norm() <= 1e-12 * (1.0 + f.norm()));
        let q = schrodinger::boundary_form_q(&u, &v, &g).unwrap();
        prop_assert!((f - q).norm() <= 1e-12 * (1.0 + f.norm()));
        let real = TraceVector::from_real(OperatorOrder::Schrodinger2, &re[..8]).unwrap();
        prop_assert!(schrodinger::boundary_form(&real, &real, &g).unwrap().norm() <= 1e-13);
    }

    #[test]
    fn delta_coupling_gram_identity(n in 1usize..=6, vals in prop::collection::vec(-3.0..3.0f64, 49)) {
        let m = symmetric(n + 1, &vals);
        let spec = sc::delta_spec(1.0, &m).unwrap();
        let op = spec.framed_operator().unwrap().unwrap();
        prop_assert!(frobenius(&op.gram_defect()) <= 1e-13 * (1.0 + frobenius(&op.lmat)));
    }

    #[test]
    fn airy_deficiency_sum(coef in prop::collection::vec((0.2..3.0f64, -3.0..3.0f64, prop::bool::ANY), 1..6)) {
        let mut c = vec![(1.0, 0.0)];
        c.extend(coef.iter().map(|&(a, b, neg)| (if neg { -a } else { a }, b)));
        let g = MetricGraph::looping_edge(1.0, c).unwrap();
        if let Ok(d) = airy::deficiency(&g) {
            prop_assert_eq!(d.d_minus + d.d_plus, 3 * (g.n() + 1) + 3);
        }
    }

    #[test]
    fn trace_is_linear(vals in prop::collection::vec(-1.0..1.0f64, 18), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let g = MetricGraph::tadpole(1.0, (1.0, 1.0), (1.0, 0.0)).unwrap();
        let h = 1.0 / 128.0;
        let t1 = TraceVector::from_real(OperatorOrder::Airy3, &vals[..9]).unwrap();
        let t2 = TraceVector::from_real(OperatorOrder::Airy3, &vals[9..]).unwrap();
        let f = synthesize_with_trace(&g, &t1, h, 2.0).unwrap();
        let k = synthesize_with_trace(&g, &t2, h, 2.0).unwrap();
        let mix = f.combine(C64::new(a, 0.0), &k, C64::new(b, 0.0)).unwrap();
        let lhs = trace_of(&mix, OperatorOrder::Airy3).unwrap();
        let r1 = trace_of(&f, OperatorOrder::Airy3).unwrap();
        let r2 = trace_of(&k, OperatorOrder::Airy3).unwrap();
        let roundoff = 64.0 * f64::EPSILON / (h * h) * (1.0 + a.abs() + b.abs());
        for i in 0..9 {
            let rhs = r1.values[i] * a + r2.values[i] * b;
            prop_assert!((lhs.values[i] - rhs).norm() <= roundoff);
            prop_assert!((r1.values[i] - t1.values[i]).norm() <= 1e-8);
        }
    }
}
