mod common;

use common::{floor_mantissa, rat};
use plflab_core::{FixedDec, FixedError};
use proptest::prelude::*;

fn dec() -> impl Strategy<Value = FixedDec> {
    (-(10i128.pow(30))..10i128.pow(30)).prop_map(FixedDec::from_mantissa)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3000))]

    #[test]
    fn mul_is_exact_floor(a in dec(), b in dec()) {
        match floor_mantissa(&(rat(a) * rat(b))) {
            Some(m) => prop_assert_eq!(a.checked_mul(b).unwrap().mantissa(), m),
            None => prop_assert_eq!(a.checked_mul(b), Err(FixedError::Overflow)),
        }
    }

    #[test]
    fn div_is_exact_floor(a in dec(), b in dec()) {
        prop_assume!(!b.is_zero());
        match floor_mantissa(&(rat(a) / rat(b))) {
            Some(m) => prop_assert_eq!(a.checked_div(b).unwrap().mantissa(), m),
            None => prop_assert_eq!(a.checked_div(b), Err(FixedError::Overflow)),
        }
    }

    #[test]
    fn display_parse_round_trip(a in any::<i128>()) {
        let x = FixedDec::from_mantissa(a);
        let s = x.to_string();
        prop_assert_eq!(s.parse::<FixedDec>().unwrap(), x);
        prop_assert_eq!(s.rsplit('.').next().unwrap().len(), 18);
    }

    #[test]
    fn add_sub_inverse(a in dec(), b in dec()) {
        prop_assert_eq!(a.checked_add(b).unwrap().checked_sub(b).unwrap(), a);
    }

    #[test]
    fn pow_close_to_exact_power(m in 0i128..2 * 10i128.pow(18), n in 0u32..40) {
        let x = FixedDec::from_mantissa(m);
        let exact = num_traits::pow(rat(x), n as usize);
        let got = x.pow_u(n).unwrap();
        // each floor loses < 1 unit, later multiplications scale earlier losses by at most x^n
        let bound = n as f64 * x.to_f64().max(1.0).powi(n as i32) + 1.0;
        prop_assert!(common::unit_error(&exact, got) <= bound);
        prop_assert!(got <= FixedDec::from_mantissa(floor_mantissa(&exact).unwrap()));
    }
}

#[test]
fn overflow_and_zero_division_are_errors() {
    assert!(FixedDec::MAX.checked_mul(FixedDec::from_int(2)).is_err());
    assert!(FixedDec::ONE.checked_div(FixedDec::ZERO).is_err());
    assert!(FixedDec::MAX.checked_add(FixedDec::from_mantissa(1)).is_err());
}
