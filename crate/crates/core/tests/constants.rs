use std::f64::consts::PI;

use approx::assert_relative_eq;

use billiard_core::constants::*;
use billiard_core::geom::PlanarVec;
use billiard_core::real::{Hp192, Real};

fn cot(x: f64) -> f64 {
    1.0 / x.tan()
}

/// Theorem-level closed form of `c_N`, written out independently in doubles.
fn c_n_oracle(n: i64) -> f64 {
    let nf = n as f64;
    let sigma = if n % 2 == 0 {
        1.0
    } else {
        4.0 * (PI / nf).cos() / (1.0 + (PI / nf).cos()).powi(2)
    };
    let pre = nf.powi(4) * (2.0 * PI / nf).sin().powi(2) / (48.0 * PI * PI * (nf - 2.0));
    sigma * pre * (nf * nf / 12.0 - 1.0 / (4.0 * (PI / nf).sin().powi(2)) - 1.0 / 12.0)
}

/// Final combinatorial constant for even N.
fn c_comb_even_oracle(n: i64) -> f64 {
    let nf = n as f64;
    nf.powi(4) * (2.0 * PI / nf).sin().powi(2) / (16.0 * PI * PI * (nf - 2.0))
        * (nf * nf / 12.0 - 1.0 / (4.0 * (PI / nf).sin().powi(2)) - 1.0 / 12.0)
}

#[test]
fn fundamental_identity_examples() {
    let (l, r) = fundamental_identity::<f64>(2).unwrap();
    assert_relative_eq!(l, 1.0, max_relative = 1e-15);
    assert_eq!(r, 1.0);
    let (l, r) = fundamental_identity::<f64>(3).unwrap();
    assert_relative_eq!(l, 8.0 / 3.0, max_relative = 1e-14);
    assert_relative_eq!(r, 8.0 / 3.0, max_relative = 1e-15);
    let (l, _) = fundamental_identity::<Hp192>(100).unwrap();
    assert!((l.to_f64() - 3333.0).abs() / 3333.0 < 1e-6);
    assert!(fundamental_identity::<f64>(1).is_err());
}

#[test]
fn trig_sum_examples() {
    assert_relative_eq!(TrigSum::Zero.direct::<f64>(2), 2.0, max_relative = 1e-14);
    assert_relative_eq!(TrigSum::Zero.closed::<f64>(2), 2.0, max_relative = 1e-15);
    assert_relative_eq!(TrigSum::PiOverNStar.direct::<f64>(1), 4.0 / 3.0, max_relative = 1e-14);
    assert_relative_eq!(TrigSum::PiOverNStar.closed::<f64>(1), 4.0 / 3.0, max_relative = 1e-15);
    assert_relative_eq!(TrigSum::HalfPiStarStar.direct::<f64>(1), 4.0 / 3.0, max_relative = 1e-14);
    assert_relative_eq!(TrigSum::HalfPiStarStar.closed::<f64>(1), 4.0 / 3.0, max_relative = 1e-15);
    // The printed intermediate line is a constant 1/3 short of the true sum.
    for k in 1..=50 {
        let gap = TrigSum::HalfPiStarStar.direct::<f64>(k) - half_pi_star_star_printed_step::<f64>(k);
        assert_relative_eq!(gap, 1.0 / 3.0, max_relative = 1e-9);
    }
}

#[test]
fn omega_examples() {
    let sq = omega_polygon(&[PlanarVec::new(-1.0, 1.0), PlanarVec::new(-1.0, -1.0)]).unwrap();
    assert_relative_eq!(sq.area, 1.0, max_relative = 1e-14);
    assert_relative_eq!(omega_area_closed::<f64>(4).unwrap(), 1.0, max_relative = 1e-14);
    assert_relative_eq!(omega_area_closed::<f64>(8).unwrap(), 2.0 * (PI / 8.0).tan(), max_relative = 1e-14);

    let o8 = omega_for_ngon::<f64>(8).unwrap();
    assert_eq!(o8.vertices.len(), 8);
    for v in &o8.vertices {
        assert_relative_eq!(v.norm(), 0.5 / (PI / 8.0).cos(), max_relative = 1e-12);
    }
    // Odd N: a regular 2N-gon of radius ρ_N, whose area is N ρ² sin(π/N).
    for n in [5i64, 7, 9, 21] {
        let rho = 1.0 / (2.0 * (1.0 + (PI / n as f64).cos()));
        let o = omega_for_ngon::<f64>(n).unwrap();
        assert_eq!(o.vertices.len(), 2 * n as usize);
        for v in &o.vertices {
            assert_relative_eq!(v.norm(), rho, max_relative = 1e-12);
        }
        assert_relative_eq!(o.area, n as f64 * rho * rho * (PI / n as f64).sin(), max_relative = 1e-12);
        assert_relative_eq!(omega_area_closed::<f64>(n).unwrap(), o.area, max_relative = 1e-12);
    }
}

#[test]
fn omega_scales_inverse_quadratically() {
    let zs = side_holonomies_f64(9, 9);
    let base = omega_polygon(&zs).unwrap();
    for c in [0.3, 2.0, 7.5] {
        let scaled: Vec<PlanarVec> = zs.iter().map(|z| c * *z).collect();
        assert_relative_eq!(omega_polygon(&scaled).unwrap().area, base.area / (c * c), max_relative = 1e-12);
    }
    assert!(omega_polygon(&[PlanarVec::new(1.0, 0.0), PlanarVec::new(-2.0, 0.0)]).is_err());
}

#[test]
fn cusp_representative_examples() {
    let c12 = cusp_representatives::<f64>(12).unwrap();
    let h12 = c12.iter().find(|c| c.direction == CuspDirection::Horizontal).unwrap();
    assert_eq!(h12.flat().len(), 5);
    let mut want = vec![2.0, 3f64.sqrt(), 3f64.sqrt(), 1.0, 1.0];
    let mut got = h12.flat();
    want.sort_by(f64::total_cmp);
    got.sort_by(f64::total_cmp);
    for (g, w) in got.iter().zip(&want) {
        assert_relative_eq!(g, w, max_relative = 1e-14);
    }

    let h10 = cusp_representatives::<f64>(10).unwrap().remove(0);
    let side10 = 2.0 * (2.0 * PI / 5.0).cos();
    assert_eq!(h10.flat().iter().filter(|l| (*l - side10).abs() < 1e-12).count(), 1);
    // That green class has the length of a side of P_10.
    assert_relative_eq!(side10, (2.0 * (1.0 - (PI / 5.0).cos())).sqrt(), max_relative = 1e-14);

    let v7 = cusp_representatives::<f64>(7).unwrap().remove(0);
    assert_eq!(v7.direction, CuspDirection::Vertical);
    let mults: Vec<u32> = v7.lengths.iter().map(|(_, m)| *m).collect();
    assert_eq!(mults.iter().sum::<u32>(), 5);
    assert_eq!(mults.iter().filter(|&&m| m == 1).count(), 1);
}

#[test]
fn cusp_constant_examples() {
    let covol8 = 2.0 * PI * 6.0 / 8.0;
    let h = cusp_constant(&[2.0, 2f64.sqrt(), 2f64.sqrt()], 8, &covol8).unwrap();
    let h_closed = (1.0 / (PI * PI)) * (8.0 / 6.0) * cot(PI / 8.0) * (0.25 + 1.0);
    assert_relative_eq!(h, h_closed, max_relative = 1e-12);

    let reps: Vec<f64> = cusp_representatives::<f64>(8).unwrap()[1].flat();
    let d = cusp_constant(&reps, 8, &covol8).unwrap();
    let d_closed = (1.0 / (PI * PI)) * (8.0 / 6.0) * cot(PI / 8.0) * (4.0 - 1.0 / (4.0 * (PI / 8.0).sin().powi(2)));
    assert_relative_eq!(d, d_closed, max_relative = 1e-12);

    for n in [5i64, 7, 9, 11] {
        let k = (n - 1) / 2;
        let reps: Vec<f64> = cusp_representatives::<f64>(n).unwrap()[0].flat();
        let v = cusp_constant(&reps, n, &(PI * (n - 2) as f64 / n as f64)).unwrap();
        let nf = n as f64;
        let closed = (1.0 / (PI * PI)) * (nf / (nf - 2.0)) * cot(PI / nf)
            * (2.0 / 3.0 * (k * k + k) as f64 - 1.0 / (2.0 * (2.0 * PI * k as f64 / nf).sin().powi(2)));
        assert_relative_eq!(v, closed, max_relative = 1e-12);
    }
    assert!(matches!(cusp_constant(&[1.0, 0.0], 8, &covol8), Err(billiard_core::error::ConstantsError::ZeroLengthRep)));
}

#[test]
fn combinatorial_constant_examples() {
    for n in [6i64, 8, 10, 12, 16] {
        assert_relative_eq!(c_comb::<Hp192>(n).unwrap().to_f64(), c_comb_even_oracle(n), max_relative = 1e-12);
    }
    // Odd pipeline is six times the final formula.
    for n in [5i64, 7, 9] {
        assert_relative_eq!(c_comb::<Hp192>(n).unwrap().to_f64(), 6.0 * c_n_oracle(n), max_relative = 1e-12);
    }
}

#[test]
fn complexity_constant_examples() {
    let c4 = c_n::<Hp192>(4).unwrap();
    assert!(c4.index_two_special_case);
    assert_relative_eq!(c4.value.to_f64(), 4.0 / (PI * PI), max_relative = 1e-15);
    assert_relative_eq!(c4.closed.to_f64(), 2.0 / (PI * PI), max_relative = 1e-14);
    let c3 = c_n::<Hp192>(3).unwrap();
    assert_relative_eq!(c3.value.to_f64(), 3.0 / (4.0 * PI * PI), max_relative = 1e-15);
    assert_relative_eq!(c3.closed.to_f64(), 3.0 / (8.0 * PI * PI), max_relative = 1e-14);
    assert!(c_n::<f64>(2).is_err());

    // Values fixed by the double-precision oracle, checked against both routes.
    let fixed = [
        (5, 0.5020503289172598),
        (6, 0.9831321100295587),
        (7, 1.6510723158764213),
        (8, 2.552676511634425),
        (9, 3.6991085848626333),
        (10, 5.13412485619606),
        (100, 4924.328423706783),
    ];
    for (n, want) in fixed {
        assert_relative_eq!(c_n_oracle(n), want, max_relative = 1e-12);
        let v = c_n::<Hp192>(n).unwrap();
        assert!(!v.index_two_special_case);
        assert_relative_eq!(v.closed.to_f64(), want, max_relative = 1e-12);
        assert_relative_eq!(v.pipeline.to_f64(), want, max_relative = 1e-12);
    }
}

#[test]
fn combinatorial_constant_is_normalization_independent() {
    for n in [5i64, 8, 10, 13] {
        let native = c_comb_at::<Hp192>(n, None).unwrap();
        for a in [Hp192::from_i64(1), Hp192::from_ratio(73, 10)] {
            let other = c_comb_at::<Hp192>(n, Some(a)).unwrap();
            let rel = ((other.c_comb.clone() - native.c_comb.clone()) / native.c_comb.clone()).to_f64().abs();
            assert!(rel < 1e-12, "N = {n}: {rel:e}");
        }
    }
}

#[test]
fn limit_is_approached_by_both_parities() {
    let lim = (1.0 / 3.0 - 1.0 / (PI * PI)) / 48.0;
    assert_relative_eq!(limit_constant::<f64>(), lim, max_relative = 1e-15);
    for n in [2000i64, 2001] {
        let r = c_n_formula::<Hp192>(n).unwrap().to_f64() / (n as f64).powi(3);
        assert!((r - lim).abs() / lim < 0.01, "N = {n}: {r}");
    }
    let rows = asymptotic_limit_check(400, 99).unwrap();
    assert!(rows.windows(2).all(|w| w[1].rel_dev <= w[0].rel_dev));
}

#[test]
fn reports_pass_dual_route_check() {
    for n in [3i64, 4, 5, 6, 7, 8, 12, 31] {
        let r = constants_report(n).unwrap();
        if n >= 5 {
            assert!(r.passes(), "N = {n}");
        }
        assert_eq!(r.index_two_special_case, n <= 4);
    }
}
