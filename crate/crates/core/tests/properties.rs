use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use normform::baker::{matveev_bound, MatveevInput, UnitLogData};
use normform::field::NFElement;
use normform::io::{parse_and_validate_bundle, parse_bundle, FieldBundle, LoadedField};
use normform::linalg::{column_subset_rank, kernel_basis, rref_fraction_free, QMatrix};
use normform::oracle::{oracle_exponent_box, BoxSpec};
use normform::poly::Q;
use normform::solver::solve_three_term;
use normform::solver::threeterm::DEFAULT_BUDGET;
use normform::units::{ExponentVector, UnitSystem};

fn load(name: &str) -> LoadedField {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    parse_and_validate_bundle(&std::fs::read_to_string(path).unwrap(), 256).unwrap()
}

fn z7() -> &'static UnitSystem {
    static F: OnceLock<LoadedField> = OnceLock::new();
    F.get_or_init(|| load("q_zeta7.json")).units.as_ref().unwrap()
}

fn z16() -> &'static UnitSystem {
    static F: OnceLock<LoadedField> = OnceLock::new();
    F.get_or_init(|| load("q_zeta16.json")).units.as_ref().unwrap()
}

fn qm(rows: &[Vec<i64>]) -> QMatrix {
    QMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| Q::from_integer(v.into())).collect()).collect(), Q::zero())
}

fn small_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-3i64..=3, c), r))
}

fn exponents(r: usize, w: u64, a: i64) -> impl Strategy<Value = ExponentVector> {
    (0..w, prop::collection::vec(-a..=a, r)).prop_map(|(k, a)| ExponentVector { k, a })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_multiplicative(a in prop::collection::vec(-6i64..=6, 6), b in prop::collection::vec(-6i64..=6, 6)) {
        let f = &z7().ctx.field;
        let (x, y) = (NFElement::from_i64_coords(f, &a), NFElement::from_i64_coords(f, &b));
        prop_assert_eq!(x.mul(&y).norm(), x.norm() * y.norm());
    }

    #[test]
    fn norm_is_the_orbit_product(a in prop::collection::vec(-4i64..=4, 8)) {
        let ctx = &z16().ctx;
        let x = NFElement::from_i64_coords(&ctx.field, &a);
        let prod = (0..ctx.gal.order()).fold(NFElement::one(&ctx.field), |acc, s| acc.mul(&ctx.apply(s, &x)));
        prop_assert_eq!(prod, NFElement::from_q(&ctx.field, &x.norm()));
    }

    #[test]
    fn automorphisms_compose_as_tabulated(s in 0usize..8, t in 0usize..8, a in prop::collection::vec(-3i64..=3, 8)) {
        let ctx = &z16().ctx;
        let x = NFElement::from_i64_coords(&ctx.field, &a);
        let st = ctx.gal.compose[s][t];
        prop_assert_eq!(ctx.apply(st, &x), ctx.apply(s, &ctx.apply(t, &x)));
        prop_assert_eq!(ctx.apply(ctx.gal.inverse[s], &ctx.apply(s, &x)), x);
    }

    #[test]
    fn discrete_log_roundtrip(e in exponents(3, 16, 25)) {
        let us = z16();
        prop_assert_eq!(us.discrete_log(&us.from_exponents(&e)).unwrap(), e);
    }

    #[test]
    fn exponent_arithmetic_matches_units(x in exponents(2, 14, 6), y in exponents(2, 14, 6), s in 0usize..6) {
        let us = z7();
        prop_assert_eq!(us.from_exponents(&us.mul_exponents(&x, &y)), us.from_exponents(&x).mul(&us.from_exponents(&y)));
        prop_assert_eq!(us.from_exponents(&us.apply_exponents(s, &x)), us.ctx.apply(s, &us.from_exponents(&x)));
    }

    #[test]
    fn rref_is_idempotent_and_kernels_annihilate(m in small_matrix(5, 7)) {
        let a = qm(&m);
        let (r, piv) = rref_fraction_free(&a);
        let (rr, piv2) = rref_fraction_free(&r);
        prop_assert_eq!(&r, &rr);
        prop_assert_eq!(&piv, &piv2);
        let k = kernel_basis(&a);
        prop_assert_eq!(k.rows, a.cols - a.rank());
        prop_assert_eq!(k.rank(), k.rows);
        prop_assert!(a.mul(&k.transpose()).is_zero());
    }

    #[test]
    fn rank_lemma(c in small_matrix(4, 4), m in small_matrix(4, 4), extra in 0usize..3) {
        // s×s invertible M (forced by adding a large diagonal), B = M·[C | I]
        let s = m.len().min(c.len());
        let r = c[0].len() + extra;
        let n = r + s;
        let mut mm = vec![vec![0i64; s]; s];
        for i in 0..s {
            for j in 0..s {
                mm[i][j] = m[i][j % m[i].len()] + if i == j { 20 } else { 0 };
            }
        }
        let ci: Vec<Vec<i64>> = (0..s)
            .map(|i| (0..n).map(|j| if j < r { c[i][j % c[i].len()] } else { (j - r == i) as i64 }).collect())
            .collect();
        let b = qm(&mm).mul(&qm(&ci));
        prop_assume!(column_subset_rank(&b, &(r..n).collect::<Vec<_>>()) == s);
        let a = kernel_basis(&b);
        prop_assert_eq!(a.rows, r);
        prop_assert_eq!(column_subset_rank(&a, &(0..r).collect::<Vec<_>>()), r);
    }

    #[test]
    fn matveev_is_monotone(m in 1usize..5, n in 1usize..20, b in 1.0f64..1e9, a in prop::collection::vec(0.16f64..50.0, 5), bump in 1.0f64..100.0, j in 0usize..5) {
        let base = MatveevInput { m, n_deg: n, kappa: 2, b, a_list: a[..m].to_vec() };
        let v = matveev_bound(&base, 128).unwrap();
        let mut more_b = base.clone();
        more_b.b = b + bump;
        prop_assert!(matveev_bound(&more_b, 128).unwrap() < v);
        let mut more_a = base.clone();
        more_a.a_list[j % m] += bump;
        prop_assert!(matveev_bound(&more_a, 128).unwrap() < v);
    }

    #[test]
    fn bundle_roundtrip(label in "[A-Za-z0-9()]{1,12}", poly in prop::collection::vec(-50i64..50, 4), units in prop::collection::vec((prop::collection::vec(-9i64..9, 4), 1i64..6), 0..3), w in 1u64..30) {
        let q = |n: i64, d: i64| Q::new(n.into(), d.into());
        let mut min_poly: Vec<BigInt> = poly.iter().map(|&c| c.into()).collect();
        min_poly.push(BigInt::one());
        let b = FieldBundle {
            label,
            min_poly,
            torsion_order: w,
            torsion_gen: vec![q(-1, 1), q(0, 1), q(0, 1), q(0, 1)],
            fund_units: units.iter().map(|(u, d)| u.iter().map(|&c| q(c, *d)).collect()).collect(),
            regulator: "1.25".into(),
            normal_closure: None,
        };
        let text = b.emit();
        let back = parse_bundle(&text).unwrap();
        prop_assert_eq!(&back, &b);
        prop_assert_eq!(back.emit(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Λ = b₁ Log ι(ε₁) + b₂ Log ι(ε₂) at each place of Q(ζ₇) never drops
    /// below the Matveev bound.
    #[test]
    fn linear_forms_respect_matveev(b in prop::collection::vec(-400i64..=400, 2)) {
        prop_assume!(b.iter().any(|&v| v != 0));
        let us = z7();
        let ctx = &us.ctx;
        let one = NFElement::one(&ctx.field);
        for v in 0..ctx.s() {
            let j = ctx.place_embedding(v);
            let mut re = 0.0;
            let mut im = 0.0;
            let mut a_list = Vec::new();
            for (e, bi) in us.data.fund_units.iter().zip(&b) {
                let (x, y) = ctx.table.embed_at(e, j).to_c64();
                let (lr, li) = ((x * x + y * y).sqrt().ln(), y.atan2(x));
                re += *bi as f64 * lr;
                im += *bi as f64 * li;
                let (_, nh) = us.tuple_height(&[one.clone(), e.clone()]).unwrap();
                a_list.push(nh.upper_f64().max((lr * lr + li * li).sqrt()).max(0.16));
            }
            let inp = MatveevInput { m: 2, n_deg: 6, kappa: 2, b: b.iter().map(|x| x.abs()).max().unwrap() as f64, a_list };
            let lower = matveev_bound(&inp, 128).unwrap().to_f64();
            prop_assert!((re * re + im * im).sqrt().ln() >= lower);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// αx + βy + γ = 0 built around a known solution (x₀, y₀): the solver
    /// finds it, agrees with the exponent box |a_i| ≤ 3, and its bound covers
    /// every solution it reports.
    #[test]
    fn three_term_contains_planted_solution(
        x0 in exponents(2, 14, 2),
        y0 in exponents(2, 14, 2),
        a in prop::collection::vec(-2i64..=2, 2),
        b in prop::collection::vec(-2i64..=2, 2),
    ) {
        let us = z7();
        let f = &us.ctx.field;
        let alpha = NFElement::from_i64_coords(f, &[1, a[0], a[1]]);
        let beta = NFElement::from_i64_coords(f, &[b[0], 1, b[1]]);
        let gamma = alpha.mul(&us.from_exponents(&x0)).add(&beta.mul(&us.from_exponents(&y0))).neg();
        prop_assume!(!gamma.is_zero());
        let ld = UnitLogData::new(us).unwrap();
        let res = solve_three_term(&alpha, &beta, &gamma, us, &ld, None, DEFAULT_BUDGET).unwrap();
        prop_assume!(res.certificate.is_proven());
        let found: std::collections::BTreeSet<_> = res.solutions.iter().map(|s| (s.x.clone(), s.y.clone())).collect();
        prop_assert!(found.contains(&(x0.clone(), y0.clone())));
        for (x, y) in &found {
            prop_assert!(x.max_abs() as u64 <= res.certificate.reduced_bound && y.max_abs() as u64 <= res.certificate.reduced_bound);
        }
        let boxed = oracle_exponent_box(&[alpha, beta, gamma], us, &BoxSpec::new(3)).unwrap();
        let inbox: std::collections::BTreeSet<_> = found.iter().filter(|(x, y)| x.max_abs() <= 3 && y.max_abs() <= 3).cloned().collect();
        let want: std::collections::BTreeSet<_> = boxed.into_iter().map(|v| (v[0].clone(), v[1].clone())).collect();
        prop_assert_eq!(inbox, want);
    }
}
