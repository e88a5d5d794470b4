use dampwave_core::special::{
    bessel_i, bessel_i_scaled, i0_integral_oracle, i0_integral_oracle_scaled, i0_lower_bound_scaled, i1_over_z,
    i1_over_z_scaled, BesselOrder,
};
use proptest::prelude::*;

/// Independent power series for `I_n(x)`, summed until terms drop below 1e-18 relative.
fn series_oracle(n: u32, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut k = 0u32;
    loop {
        let mut term = (x / 2.0).powi((2 * k + n) as i32);
        for j in 1..=k {
            term /= j as f64;
        }
        for j in 1..=(k + n) {
            term /= j as f64;
        }
        sum += term;
        if term < 1e-18 * sum || (x == 0.0 && k > 0) {
            break;
        }
        k += 1;
    }
    sum
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn spec_values() {
    assert_eq!(bessel_i_scaled(BesselOrder::Zero, 0.0).unwrap(), 1.0);
    assert_eq!(bessel_i_scaled(BesselOrder::One, 0.0).unwrap(), 0.0);
    let v = bessel_i_scaled(BesselOrder::Zero, 1.0).unwrap();
    assert!(rel(v, series_oracle(0, 1.0) * (-1.0f64).exp()) < 1e-14);
    assert!((v - 0.465759).abs() < 1e-6);
    let r = i1_over_z(1.0).unwrap();
    assert!(rel(r, series_oracle(1, 1.0)) < 1e-14);
    assert!((r - 0.565159).abs() < 1e-6);
    assert_eq!(i1_over_z(0.0).unwrap(), 0.5);
    assert!((i1_over_z(1e-8).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn matches_series_oracle_below_switch() {
    for order in [BesselOrder::Zero, BesselOrder::One, BesselOrder::Two] {
        for i in 0..=400 {
            let x = i as f64 * 0.05;
            let a = bessel_i(order, x).unwrap();
            let b = series_oracle(order.index(), x);
            if b == 0.0 {
                assert_eq!(a, 0.0);
            } else {
                assert!(rel(a, b) < 1e-13, "{order:?} x={x}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn integral_oracle_agreement() {
    assert_eq!(i0_integral_oracle(0.0, 16).unwrap(), 1.0);
    let direct = bessel_i_scaled(BesselOrder::Zero, 1.0).unwrap() * 1f64.exp();
    assert!((i0_integral_oracle(1.0, 2048).unwrap() - direct).abs() < 1e-10);
    let scaled = bessel_i_scaled(BesselOrder::Zero, 30.0).unwrap();
    assert!(rel(i0_integral_oracle_scaled(30.0, 8192).unwrap(), scaled) < 1e-10);
    for i in 0..=300 {
        let x = i as f64 * 0.1;
        let a = i0_integral_oracle_scaled(x, 2048).unwrap();
        let b = bessel_i_scaled(BesselOrder::Zero, x).unwrap();
        assert!(rel(a, b) < 1e-10, "x={x}");
    }
}

#[test]
fn lower_bound_of_i0() {
    for i in 1..=5000 {
        let x = i as f64 * 0.01;
        let v = bessel_i_scaled(BesselOrder::Zero, x).unwrap();
        assert!(v >= i0_lower_bound_scaled(x).unwrap(), "x={x}");
    }
}

#[test]
fn recurrence_i0_minus_i2() {
    // Cancellation in I0 - I2 grows like x/2; the range keeps it below 1e-12.
    let mut x = 0.01;
    while x <= 1000.0 {
        let i0 = bessel_i_scaled(BesselOrder::Zero, x).unwrap();
        let i1 = bessel_i_scaled(BesselOrder::One, x).unwrap();
        let i2 = bessel_i_scaled(BesselOrder::Two, x).unwrap();
        assert!(rel(i0 - i2, 2.0 * i1 / x) < 1e-12, "x={x}");
        x *= 1.01;
    }
}

#[test]
fn scaled_values_do_not_overflow() {
    for x in [700.0, 701.0, 1e3, 1e4, 1e5, 1e6] {
        for order in [BesselOrder::Zero, BesselOrder::One, BesselOrder::Two] {
            let v = bessel_i_scaled(order, x).unwrap();
            assert!(v.is_finite() && v > 0.0 && v < 1.0);
        }
        let expected = 1.0 / (2.0 * std::f64::consts::PI * x).sqrt();
        assert!(rel(bessel_i_scaled(BesselOrder::Zero, x).unwrap(), expected) < 1.0 / x);
        assert!(i1_over_z_scaled(x).unwrap().is_finite());
    }
}

proptest! {
    #[test]
    fn i0_scaled_in_unit_interval_and_decreasing(x in 0.0f64..1e4, dx in 1e-6f64..10.0) {
        let a = bessel_i_scaled(BesselOrder::Zero, x).unwrap();
        let b = bessel_i_scaled(BesselOrder::Zero, x + dx).unwrap();
        prop_assert!(a > 0.0 && a <= 1.0);
        prop_assert!(b < a);
    }

    #[test]
    fn orders_are_ordered(x in 1e-3f64..1e4) {
        let i0 = bessel_i_scaled(BesselOrder::Zero, x).unwrap();
        let i1 = bessel_i_scaled(BesselOrder::One, x).unwrap();
        let i2 = bessel_i_scaled(BesselOrder::Two, x).unwrap();
        prop_assert!(i0 > i1 && i1 > i2 && i2 > 0.0);
    }

    #[test]
    fn rejects_negative(x in -1e6f64..-1e-12) {
        prop_assert!(bessel_i_scaled(BesselOrder::Zero, x).is_err());
        prop_assert!(i1_over_z(x).is_err());
    }
}
