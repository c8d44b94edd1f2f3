use num_bigint::BigInt;
use num_traits::{One, Zero};

use blform_core::exactla::*;

#[test]
fn parse_forms() {
    assert_eq!(parse_rational("3").unwrap(), rat(3));
    assert_eq!(parse_rational("-6/4").unwrap(), ratio(-3, 2));
    assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
    assert_eq!(parse_rational("-1.5").unwrap(), ratio(-3, 2));
    assert_eq!(parse_rational("0/7").unwrap(), Rational::zero());
    assert!(parse_rational("1/0").is_err());
    assert!(parse_rational("abc").is_err());
}

#[test]
fn canonical_zero_and_sign() {
    let z = ratio(0, -5);
    assert_eq!(z.numer(), &BigInt::zero());
    assert_eq!(z.denom(), &BigInt::one());
    let r = ratio(4, -6);
    assert_eq!(format_rational(&r), "-2/3");
}
